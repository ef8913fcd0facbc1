use serde_json::json;

use super::{positive, Check, ExperimentConfig, Outcome, Provenance, Reference};
use crate::error::{argument, Result};
use crate::io::{fmt_f64, Table, WeightsSpec};
use crate::model::{derive_seed, WeightProfile};
use crate::permuton::PermutonModel;
use crate::topk::{topk_probability_luce, topk_probability_permuton, PositionQuery, TopkMethod};

/// Reported probabilities that label 1 is drawn last for `θᵢ = i`, keyed by
/// `n`: the finite Luce model and the permuton sample.
const REPORTED: [(usize, f64, f64); 6] = [
    (10, 0.5184, 0.4641),
    (20, 0.5162, 0.5049),
    (50, 0.5161, 0.5339),
    (100, 0.5161, 0.5443),
    (1_000, 0.5161, 0.5540),
    (10_000, 0.5161, 0.5551),
];

pub(super) fn topk_compare(cfg: &ExperimentConfig) -> Result<Outcome> {
    let spec = WeightsSpec::parse(cfg.weights.as_deref().unwrap_or("linear"))?;
    let model = match spec.profile() {
        Some(p) if p.has_permuton_limit() => Some(PermutonModel::new(p.clone())?),
        _ => None,
    };
    let default_labels = [1usize];
    let labels: &[usize] = if cfg.labels.is_empty() { &default_labels } else { &cfg.labels };
    let ns = if cfg.n.is_empty() { REPORTED.iter().map(|r| r.0).collect() } else { cfg.n.clone() };
    if matches!(spec, WeightsSpec::File(_)) && ns.len() > 1 {
        return Err(argument("a weights file fixes n; pass a single --n"));
    }
    let reported = labels == [1] && matches!(spec.profile(), Some(WeightProfile::Linear));
    let mut table = Table::new(&["n", "p_permuton", "p_permuton_stderr", "p_luce", "p_luce_stderr"]);
    let mut references = Vec::new();
    let mut checks = Vec::new();
    let mut reps_used = Vec::new();
    let mut last_gap = None;
    for (i, &n) in ns.iter().enumerate() {
        let query = PositionQuery::new(labels.to_vec(), n)?;
        let weights = spec.resolve(Some(n))?;
        let seed = derive_seed(cfg.seed, i as u64);
        let reps = positive("reps", cfg.reps.unwrap_or(if n <= 1_000 { 1_000_000 } else { 100_000 }))?;
        reps_used.push(reps);
        let luce = if query.k() == 1 && !weights.has_underflow() {
            topk_probability_luce(&weights, &query, TopkMethod::Quadrature)?
        } else {
            topk_probability_luce(&weights, &query, TopkMethod::MonteCarlo { samples: reps, seed: derive_seed(seed, 1) })?
        };
        let perm = match &model {
            Some(m) => Some(topk_probability_permuton(m, &query, reps, seed)?),
            None => None,
        };
        table.push(vec![
            n.to_string(),
            perm.map(|e| fmt_f64(e.value)).unwrap_or_default(),
            perm.map(|e| fmt_f64(e.stderr)).unwrap_or_default(),
            fmt_f64(luce.value),
            fmt_f64(luce.stderr),
        ]);
        if let Some(p) = perm {
            last_gap = Some((n, (p.value - luce.value).abs()));
        }
        if !reported {
            continue;
        }
        if let Some(&(_, l, p)) = REPORTED.iter().find(|r| r.0 == n) {
            references.push(Reference::new(format!("n={n}: Luce"), l, Provenance::Literature));
            references.push(Reference::new(format!("n={n}: permuton"), p, Provenance::Literature));
            checks.push(Check::absolute(format!("n={n}: Luce probability"), luce.value, l, 1e-3));
            if let Some(e) = perm {
                checks.push(Check::absolute(format!("n={n}: permuton probability"), e.value, p, 0.01));
            }
        }
    }
    if reported {
        if let Some((n, gap)) = last_gap {
            checks.push(Check::at_least(format!("n={n}: permuton and Luce differ"), gap, 0.02));
        }
    }
    let config = json!({
        "weights": spec.to_string(),
        "labels": labels,
        "n": ns,
        "reps": reps_used,
        "luce_method": "quadrature when k = 1, otherwise Monte Carlo",
        "seed": cfg.seed,
    });
    Ok(Outcome { config, table, references, checks, summary: json!(null) })
}
