use rayon::prelude::*;
use serde_json::json;

use super::{algo_name, positive, Check, ExperimentConfig, Outcome, Provenance, Reference};
use crate::error::{argument, Result};
use crate::io::Table;
use crate::model::{derive_seed, rng_stream, WeightProfile};
use crate::numeric::quad::{graded_breaks, integrate_with_breaks};
use crate::numeric::stats::{Estimate, Moments};
use crate::patterns::fixed_points as count_fixed;
use crate::permuton::PermutonModel;

/// Mean fixed-point counts reported alongside the Sukhatme simulations in
/// the literature, keyed by `n`.
const SUKHATME_REPORTED: [(usize, f64); 3] = [(1_000, 2.76), (10_000, 3.64), (100_000, 4.33)];

/// `∫₀¹ ρ(x, x) dx`, the limiting expected number of fixed points, or `None`
/// when the density blows up along the diagonal.
pub(crate) fn diagonal_integral(profile: &WeightProfile) -> Result<Option<f64>> {
    match profile {
        // ρ(x, x) grows like 1/(1 - x) near the corner
        WeightProfile::Sukhatme => Ok(None),
        WeightProfile::Constant(_) => Ok(Some(1.0)),
        WeightProfile::ExpSukhatme { .. } => Ok(None),
        p => {
            let model = PermutonModel::new(p.clone())?;
            let rho = |x: f64| model.density(x, x).unwrap_or(0.0);
            let r = integrate_with_breaks(rho, &graded_breaks(0.0, 1.0, 30), 1e-10, 1e-10);
            Ok(Some(r.value))
        }
    }
}

pub(super) fn fixed_points(cfg: &ExperimentConfig) -> Result<Outcome> {
    let text = cfg.weights.as_deref().unwrap_or("linear");
    if text.starts_with("file:") {
        return Err(argument("fixed-points needs a weight profile, not a weights file"));
    }
    let profile = WeightProfile::parse(text)?;
    let sukhatme = matches!(profile, WeightProfile::Sukhatme);
    let ns = match (cfg.n.is_empty(), sukhatme) {
        (false, _) => cfg.n.clone(),
        (true, true) => vec![1_000, 10_000, 100_000],
        (true, false) => vec![1_000],
    };
    let limit = diagonal_integral(&profile)?;
    let mut table = Table::new(&["n", "replicate", "fixed_points"]);
    let mut references = Vec::new();
    let mut checks = Vec::new();
    let mut means = Vec::new();
    let mut reps_used = Vec::new();
    if let Some(v) = limit {
        references.push(Reference::new("limiting mean (diagonal integral of the density)", v, Provenance::Numerical));
    }
    if matches!(profile, WeightProfile::Linear) {
        references.push(Reference::new("reported limiting mean", 0.629, Provenance::Literature));
    }
    for (i, &n) in ns.iter().enumerate() {
        let reps = positive("reps", cfg.reps.unwrap_or(if n >= 100_000 { 2000 } else { 3000 }))?;
        let weights = profile.weights(n)?;
        let seed = derive_seed(cfg.seed, i as u64);
        let counts: Vec<usize> = (0..reps)
            .into_par_iter()
            .map(|r| count_fixed(&cfg.algo.sample(&weights, &mut rng_stream(seed, r))))
            .collect();
        let mut m = Moments::new();
        for (r, &c) in counts.iter().enumerate() {
            m.push(c as f64);
            table.push(vec![n.to_string(), r.to_string(), c.to_string()]);
        }
        let est = Estimate::from_moments(&m);
        if let Some(v) = limit {
            checks.push(Check::stderrs(format!("n={n}: mean fixed points"), est.value, est.stderr, v, 4.0));
        }
        if sukhatme {
            if let Some(&(_, v)) = SUKHATME_REPORTED.iter().find(|(m, _)| *m == n) {
                references.push(Reference::new(format!("n={n}: reported mean fixed points"), v, Provenance::Literature));
            }
        }
        means.push(json!({"n": n, "mean": est.value, "stderr": est.stderr, "variance": m.variance()}));
        reps_used.push(reps);
        if i > 0 && sukhatme {
            let prev = means[i - 1]["mean"].as_f64().unwrap_or(f64::NAN);
            checks.push(Check::greater(format!("n={n}: mean exceeds the previous n"), est.value, prev));
        }
    }
    let config = json!({
        "profile": profile.to_string(),
        "n": ns,
        "reps": reps_used,
        "seed": cfg.seed,
        "algo": algo_name(cfg.algo),
    });
    Ok(Outcome { config, table, references, checks, summary: json!({ "means": means }) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_diagonal_integral() {
        let v = diagonal_integral(&WeightProfile::Linear).unwrap().unwrap();
        assert!((v - 0.629).abs() < 1e-3, "{v}");
    }

    #[test]
    fn uniform_has_one_fixed_point_on_average() {
        let cfg = ExperimentConfig { weights: Some("constant".into()), n: vec![200], reps: Some(4000), ..Default::default() };
        let out = fixed_points(&cfg).unwrap();
        assert!(out.checks.iter().all(|c| c.passed), "{:?}", out.checks);
    }
}
