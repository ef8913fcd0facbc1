use std::collections::BTreeSet;

use serde_json::json;

use super::{patterns_or, Check, ExperimentConfig, Outcome, Reference, SMALL_PATTERNS};
use crate::error::{argument, Result};
use crate::io::{fmt_f64, Table};
use crate::locallimits::{lambda_exponential, nu_infinity_exponential, nu_infinity_uniform};
use crate::numeric::rational::ExactRational;
use crate::patterns::Pattern;

fn q(n: i64, d: i64) -> ExactRational {
    ExactRational::new(n, d)
}

/// Locally uniform limits for patterns of length 2 and 3.
fn expected_uniform(pi: &Pattern) -> Option<ExactRational> {
    match pi.to_string().as_str() {
        "12" | "21" => Some(q(1, 12)),
        "123" | "321" => Some(q(23, 180)),
        "132" | "312" | "213" | "231" => Some(q(7, 90)),
        _ => None,
    }
}

fn expected_lambda_two() -> Vec<ExactRational> {
    vec![q(2, 3), q(1, 3), q(8, 21), q(4, 21), q(8, 35), q(2, 35), q(2, 21), q(1, 21)]
}

fn expected_nu_two() -> Vec<ExactRational> {
    let big = |n: i64, d: i64| q(n, d);
    vec![
        q(2, 21),
        q(6184, 22785),
        q(6892, 68355),
        big(1_496_456, 15_197_595),
        q(3802, 68355),
        big(635_822, 15_197_595),
        q(976, 22785),
    ]
}

fn row(table: &mut Table, pi: &Pattern, quantity: &str, v: &ExactRational) {
    table.push(vec![pi.to_string(), quantity.into(), v.numer().to_string(), v.denom().to_string(), fmt_f64(v.to_f64())]);
}

pub(super) fn constants(cfg: &ExperimentConfig) -> Result<Outcome> {
    let alpha: ExactRational = cfg.alpha.as_deref().unwrap_or("2").parse()?;
    if alpha <= ExactRational::from_integer(1) {
        return Err(argument("alpha must exceed 1"));
    }
    let patterns = patterns_or(cfg, &SMALL_PATTERNS);
    let mut table = Table::new(&["pattern", "quantity", "exact_num", "exact_den", "float"]);
    let mut references = Vec::new();
    let mut checks = Vec::new();
    let mut lambdas = Vec::new();
    let mut nus = BTreeSet::new();
    for pi in &patterns {
        let nu = nu_infinity_uniform(pi)?;
        row(&mut table, pi, "nu_inf_uniform", &nu);
        references.push(Reference::exact(format!("{pi}: nu_inf uniform"), &nu));
        if let Some(want) = expected_uniform(pi) {
            checks.push(Check::flag(format!("{pi}: nu_inf uniform = {want}"), nu == want));
        }
        let lambda = lambda_exponential(pi, &alpha)?;
        row(&mut table, pi, "lambda_exp", &lambda);
        references.push(Reference::exact(format!("{pi}: Lambda geometric"), &lambda));
        let nu_exp = nu_infinity_exponential(pi, &alpha)?;
        row(&mut table, pi, "nu_inf_exp", &nu_exp);
        references.push(Reference::exact(format!("{pi}: nu_inf geometric"), &nu_exp));
        lambdas.push(lambda);
        nus.insert(nu_exp);
    }
    let full = patterns.len() == SMALL_PATTERNS.len()
        && patterns.iter().zip(SMALL_PATTERNS).all(|(p, s)| p.to_string() == s);
    if full && alpha == ExactRational::from_integer(2) {
        let mut got = lambdas.clone();
        got.sort();
        let mut want = expected_lambda_two();
        want.sort();
        checks.push(Check::flag("alpha=2: Lambda values over S2 and S3", got == want));
        let want: BTreeSet<_> = expected_nu_two().into_iter().collect();
        checks.push(Check::flag("alpha=2: nu_inf values over S2 and S3", nus == want));
    }
    let config = json!({
        "patterns": patterns.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "alpha": alpha.to_string(),
    });
    Ok(Outcome { config, table, references, checks, summary: json!(null) })
}
