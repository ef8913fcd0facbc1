use rayon::prelude::*;
use serde_json::{json, Value};

use super::{algo_name, one_n, patterns_or, positive, Check, ExperimentConfig, Outcome, Provenance, Reference};
use crate::error::{argument, Result};
use crate::inversions::{inversion_moments, sukhatme_inversion_constant, sukhatme_inversion_mean_constant};
use crate::io::{fmt_f64, Table, WeightsSpec};
use crate::locallimits::{lambda_exponential, lambda_finite, nu_infinity_exponential, nu_infinity_uniform, nu_n_squared};
use crate::model::{rng_stream, WeightProfile, WeightVector};
use crate::numeric::rational::ExactRational;
use crate::numeric::stats::{ks_test, normal_cdf, Estimate, Moments};
use crate::patterns::{binomial, cocc, count_inversions, Pattern};

/// Limiting mean and variance (times `n`) of the proportion of consecutive
/// occurrences, when known.
struct Limits {
    mean: ExactRational,
    nu: ExactRational,
    label: &'static str,
}

fn limits_for(spec: &WeightsSpec, alpha: Option<&ExactRational>, pi: &Pattern) -> Result<Option<Limits>> {
    match (spec.profile(), alpha) {
        (Some(WeightProfile::ExpSukhatme { .. }), Some(a)) => Ok(Some(Limits {
            mean: lambda_exponential(pi, a)?,
            nu: nu_infinity_exponential(pi, a)?,
            label: "geometric-weight limit",
        })),
        (Some(p), _) if p.has_permuton_limit() => {
            let k_fact: i64 = (1..=pi.len() as i64).product();
            Ok(Some(Limits {
                mean: ExactRational::new(1, k_fact),
                nu: nu_infinity_uniform(pi)?,
                label: "locally uniform limit",
            }))
        }
        _ => Ok(None),
    }
}

pub(super) fn local_clt(cfg: &ExperimentConfig, exponential: bool) -> Result<Outcome> {
    let n = one_n(cfg, 1000)?;
    let reps = positive("reps", cfg.reps.unwrap_or(3000))?;
    let (spec, alpha) = if exponential {
        if cfg.weights.is_some() {
            return Err(argument("local-clt-exp takes --alpha, not --weights"));
        }
        let text = cfg.alpha.clone().unwrap_or_else(|| "2".into());
        let alpha: ExactRational = text.parse()?;
        let spec = WeightsSpec::Profile(WeightProfile::exp_sukhatme(alpha.to_f64())?);
        (spec, Some(alpha))
    } else {
        let spec = WeightsSpec::parse(cfg.weights.as_deref().unwrap_or("sukhatme"))?;
        let alpha = match spec.profile() {
            Some(WeightProfile::ExpSukhatme { .. }) => {
                let text = cfg.weights.as_deref().and_then(|w| w.split_once(':')).map(|(_, a)| a).unwrap_or("2");
                Some(text.parse::<ExactRational>()?)
            }
            _ => None,
        };
        (spec, alpha)
    };
    let patterns = if exponential {
        patterns_or(cfg, &super::SMALL_PATTERNS)
    } else {
        patterns_or(cfg, &["21", "321", "231"])
    };
    if let Some(p) = patterns.iter().find(|p| p.len() < 2 || p.len() > n) {
        return Err(argument(format!("pattern {p} needs 2 <= k <= n")));
    }
    let weights = spec.resolve(Some(n))?;

    let counts: Vec<Vec<u64>> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let sigma = cfg.algo.sample(&weights, &mut rng_stream(cfg.seed, r));
            patterns.iter().map(|p| cocc(p, &sigma).expect("k <= n").count).collect()
        })
        .collect();

    let mut table = Table::new(&["pattern", "replicate", "cocc", "cocc_proportion"]);
    let mut references = Vec::new();
    let mut checks = Vec::new();
    let mut summary = Vec::new();
    for (j, pi) in patterns.iter().enumerate() {
        let windows = (n - pi.len() + 1) as f64;
        let props: Vec<f64> = counts.iter().map(|c| c[j] as f64 / windows).collect();
        for (r, c) in counts.iter().enumerate() {
            table.push(vec![pi.to_string(), r.to_string(), c[j].to_string(), fmt_f64(props[r])]);
        }
        let m: Moments = props.iter().copied().collect();
        let est = Estimate::from_moments(&m);
        let finite_mean = lambda_finite(&weights, pi)? * n as f64 / windows;
        let finite_var = nu_n_squared(&weights, pi)? / (windows * windows);
        references.push(Reference::new(format!("{pi}: finite-n mean"), finite_mean, Provenance::Exact));
        references.push(Reference::new(format!("{pi}: finite-n variance"), finite_var, Provenance::Exact));
        let mut entry = json!({
            "pattern": pi.to_string(),
            "mean": est.value,
            "stderr": est.stderr,
            "variance": m.variance(),
            "finite_n_mean": finite_mean,
            "finite_n_variance": finite_var,
        });
        if let Some(lim) = limits_for(&spec, alpha.as_ref(), pi)? {
            let mean = lim.mean.to_f64();
            let var = lim.nu.to_f64() / n as f64;
            references.push(Reference::exact(format!("{pi}: limit mean"), &lim.mean));
            references.push(Reference::exact(format!("{pi}: limit variance times n"), &lim.nu));
            checks.push(Check::stderrs(format!("{pi}: mean within 4 stderr of limit"), est.value, est.stderr, mean, 4.0));
            checks.push(Check::relative(format!("{pi}: variance within 15% of limit / n"), m.variance(), var, 0.15));
            let ks = ks_test(&props, |x| normal_cdf(x, mean, var.sqrt()), Some(1.0 / windows));
            if !exponential {
                checks.push(Check::at_least(format!("{pi}: KS p-value against normal limit"), ks.p_value, 0.01));
            }
            entry["limit"] = json!({
                "kind": lim.label,
                "mean": mean,
                "mean_exact": lim.mean.to_string(),
                "variance": var,
                "nu_infinity_exact": lim.nu.to_string(),
                "ks_statistic": ks.statistic,
                "ks_p_value": ks.p_value,
            });
        } else {
            checks.push(Check::stderrs(format!("{pi}: mean within 4 stderr of finite-n mean"), est.value, est.stderr, finite_mean, 4.0));
            checks.push(Check::relative(format!("{pi}: variance within 15% of finite-n variance"), m.variance(), finite_var, 0.15));
        }
        summary.push(entry);
    }
    let config = json!({
        "weights": spec.to_string(),
        "alpha": alpha.map(|a| a.to_string()),
        "patterns": patterns.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "n": n,
        "reps": reps,
        "seed": cfg.seed,
        "algo": algo_name(cfg.algo),
        "proportion_denominator": "n-k+1",
    });
    Ok(Outcome { config, table, references, checks, summary: Value::Array(summary) })
}

pub(super) fn inversions_clt(cfg: &ExperimentConfig) -> Result<Outcome> {
    let n = one_n(cfg, 1000)?;
    if n < 2 {
        return Err(argument("inversions need n >= 2"));
    }
    let reps = positive("reps", cfg.reps.unwrap_or(3000))?;
    let spec = WeightsSpec::parse(cfg.weights.as_deref().unwrap_or("sukhatme"))?;
    let weights: WeightVector = spec.resolve(Some(n))?;
    let pairs = binomial(n as u64, 2) as f64;

    let inv: Vec<u64> = (0..reps)
        .into_par_iter()
        .map(|r| count_inversions(&cfg.algo.sample(&weights, &mut rng_stream(cfg.seed, r))))
        .collect();
    let mut table = Table::new(&["replicate", "inv_count", "inv_proportion"]);
    let props: Vec<f64> = inv.iter().map(|&c| c as f64 / pairs).collect();
    for (r, (&c, &p)) in inv.iter().zip(&props).enumerate() {
        table.push(vec![r.to_string(), c.to_string(), fmt_f64(p)]);
    }
    let m: Moments = props.iter().copied().collect();
    let est = Estimate::from_moments(&m);

    let exact = inversion_moments(&weights)?;
    let finite_mean = exact.mean / pairs;
    let finite_var = exact.variance / (pairs * pairs);
    let mut references = vec![
        Reference::new("finite-n mean proportion", finite_mean, Provenance::Exact),
        Reference::new("finite-n variance of proportion", finite_var, Provenance::Exact),
    ];
    let mut checks = Vec::new();
    let (ref_mean, ref_var) = if spec.profile() == Some(&WeightProfile::Sukhatme) {
        let v = sukhatme_inversion_constant();
        let mean = 2.0 * sukhatme_inversion_mean_constant();
        references.push(Reference::new("limit mean proportion 1 - log 2", mean, Provenance::Exact));
        references.push(Reference::new("V (triple integral)", v, Provenance::Numerical));
        references.push(Reference::new("V", 0.0181166, Provenance::Literature));
        references.push(Reference::new("limit variance 4V/n", 4.0 * v / n as f64, Provenance::Numerical));
        (mean, 4.0 * v / n as f64)
    } else {
        (finite_mean, finite_var)
    };
    checks.push(Check::stderrs("mean within 4 stderr", est.value, est.stderr, ref_mean, 4.0));
    checks.push(Check::relative("variance within 15%", m.variance(), ref_var, 0.15));
    let ks = ks_test(&props, |x| normal_cdf(x, ref_mean, ref_var.sqrt()), Some(1.0 / pairs));
    let summary = json!({
        "mean": est.value,
        "stderr": est.stderr,
        "variance": m.variance(),
        "reference_mean": ref_mean,
        "reference_variance": ref_var,
        "exact_mean_count": exact.mean,
        "exact_variance_count": exact.variance,
        "ks_statistic": ks.statistic,
        "ks_p_value": ks.p_value,
    });
    let config = json!({
        "weights": spec.to_string(),
        "n": n,
        "reps": reps,
        "seed": cfg.seed,
        "algo": algo_name(cfg.algo),
    });
    Ok(Outcome { config, table, references, checks, summary })
}
