use serde_json::{json, Value};

use super::{one_n, patterns_or, positive, Check, ExperimentConfig, Outcome, Provenance, Reference, SMALL_PATTERNS};
use crate::error::{argument, Result};
use crate::io::{fmt_f64, Table};
use crate::model::{derive_seed, rng_stream, WeightProfile};
use crate::patterns::{cocc, occ_estimate, occ_exact, Pattern};
use crate::permuton::{DensityMethod, PermutonModel, MAX_QUADRATURE_K};

/// Pattern densities of the permuton with `f(y) = 1 - y`.
fn sukhatme_reference(pi: &str) -> Option<f64> {
    let (l2, l3) = (2f64.ln(), 3f64.ln());
    Some(match pi {
        "12" => l2,
        "21" => 1.0 - l2,
        "123" => (2.0 - (27.0f64 / 16.0).ln()) / 4.0,
        "213" => (256.0f64 / 27.0).ln() - 2.0,
        "132" => 6.0 * (5.0 * l3 / 8.0 - 1.0 / 12.0 - 5.0 * l2 / 6.0),
        "231" => 2.0 - (27.0f64 / 4.0).ln(),
        "321" => ((256.0f64 / 27.0).ln() - 2.0) / 4.0,
        // the six densities of length 3 sum to one
        "312" => 1.0 - ["123", "213", "132", "231", "321"].iter().filter_map(|p| sukhatme_reference(p)).sum::<f64>(),
        _ => return None,
    })
}

fn profile_of(cfg: &ExperimentConfig, default: &str) -> Result<WeightProfile> {
    let text = cfg.weights.as_deref().unwrap_or(default);
    if text.starts_with("file:") {
        return Err(argument("this experiment needs a weight profile, not a weights file"));
    }
    WeightProfile::parse(text)
}

fn reference_density(profile: &WeightProfile, pi: &Pattern) -> Option<(f64, Provenance)> {
    match profile {
        WeightProfile::Sukhatme => sukhatme_reference(&pi.to_string()).map(|v| (v, Provenance::Exact)),
        WeightProfile::Constant(_) => Some((1.0 / (1..=pi.len()).product::<usize>() as f64, Provenance::Exact)),
        _ => None,
    }
}

pub(super) fn pattern_table(cfg: &ExperimentConfig) -> Result<Outcome> {
    let profile = profile_of(cfg, "sukhatme")?;
    let model = PermutonModel::new(profile.clone())?;
    let patterns = patterns_or(cfg, &SMALL_PATTERNS);
    let samples = positive("mc-samples", cfg.mc_samples.unwrap_or(10_000_000))?;
    let mut table = Table::new(&["pattern", "quadrature", "mc", "mc_stderr", "reference"]);
    let mut references = Vec::new();
    let mut checks = Vec::new();
    for (i, pi) in patterns.iter().enumerate() {
        let quad = if pi.len() <= MAX_QUADRATURE_K && pi.len() <= 3 {
            Some(model.pattern_density(pi, DensityMethod::Quadrature)?.value)
        } else {
            None
        };
        let mc = model.pattern_density(pi, DensityMethod::MonteCarlo { samples, seed: derive_seed(cfg.seed, i as u64) })?;
        let reference = reference_density(&profile, pi);
        if let Some((v, prov)) = reference {
            references.push(Reference::new(format!("{pi}: density"), v, prov));
            if let Some(q) = quad {
                checks.push(Check::absolute(format!("{pi}: quadrature"), q, v, 1e-4));
            }
            checks.push(Check::absolute(format!("{pi}: Monte Carlo"), mc.value, v, 3e-3));
        }
        table.push(vec![
            pi.to_string(),
            quad.map(fmt_f64).unwrap_or_default(),
            fmt_f64(mc.value),
            fmt_f64(mc.stderr),
            reference.map(|r| fmt_f64(r.0)).unwrap_or_default(),
        ]);
    }
    let config = json!({
        "profile": profile.to_string(),
        "patterns": patterns.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "mc_samples": samples,
        "quadrature_max_k": 3,
        "quadrature_tolerance": model.tolerance(),
        "seed": cfg.seed,
    });
    Ok(Outcome { config, table, references, checks, summary: Value::Null })
}

pub(super) fn permuton_convergence(cfg: &ExperimentConfig) -> Result<Outcome> {
    let profile = profile_of(cfg, "sukhatme")?;
    let model = PermutonModel::new(profile.clone())?;
    let n = one_n(cfg, 100_000)?;
    let samples = positive("mc-samples", cfg.mc_samples.unwrap_or(10_000_000))?;
    let patterns = patterns_or(cfg, &["21"]);
    if let Some(p) = patterns.iter().find(|p| p.len() > n || p.len() > MAX_QUADRATURE_K) {
        return Err(argument(format!("pattern {p} too long for this experiment")));
    }
    let weights = profile.weights(n)?;
    let sigma = cfg.algo.sample(&weights, &mut rng_stream(cfg.seed, 0));
    let mut table = Table::new(&["pattern", "statistic", "value", "stderr", "reference"]);
    let mut references = Vec::new();
    let mut checks = Vec::new();
    for (i, pi) in patterns.iter().enumerate() {
        let limit = model.pattern_density(pi, DensityMethod::Quadrature)?.value;
        references.push(Reference::new(format!("{pi}: permuton density"), limit, Provenance::Numerical));
        let est = occ_estimate(pi, &sigma, samples, &mut rng_stream(cfg.seed, 1 + i as u64))?;
        table.push(vec![pi.to_string(), "occ_estimate".into(), fmt_f64(est.value), fmt_f64(est.stderr), fmt_f64(limit)]);
        checks.push(Check::absolute(format!("{pi}: sampled occurrence proportion"), est.value, limit, 0.005));
        if let Ok(exact) = occ_exact(pi, &sigma) {
            table.push(vec![pi.to_string(), "occ_exact".into(), fmt_f64(exact.proportion), "0".into(), fmt_f64(limit)]);
        }
        let k_fact = (1..=pi.len()).product::<usize>() as f64;
        let c = cocc(pi, &sigma)?;
        table.push(vec![pi.to_string(), "cocc".into(), fmt_f64(c.proportion), "0".into(), fmt_f64(1.0 / k_fact)]);
        references.push(Reference::new(format!("{pi}: consecutive limit 1/k!"), 1.0 / k_fact, Provenance::Exact));
        checks.push(Check::absolute(format!("{pi}: consecutive proportion"), c.proportion, 1.0 / k_fact, 0.005));
    }
    let config = json!({
        "profile": profile.to_string(),
        "patterns": patterns.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "n": n,
        "mc_samples": samples,
        "seed": cfg.seed,
        "algo": super::algo_name(cfg.algo),
    });
    Ok(Outcome { config, table, references, checks, summary: Value::Null })
}
