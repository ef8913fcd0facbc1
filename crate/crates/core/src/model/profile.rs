use std::fmt;

use crate::error::{argument, domain, Result};
use crate::model::WeightVector;

/// A limiting weight profile `f` on `[0, 1]` together with the weight
/// sequence it induces at each size `n`.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightProfile {
    /// `f ≡ c`.
    Constant(f64),
    /// `f(x) = 1 - x`; `θᵢ = (n-i+1)/n`.
    Sukhatme,
    /// `f(x) = x`; `θᵢ = i/n`.
    Linear,
    /// `θᵢ = α^{n-i+1}`. The rescaled weights have no almost-everywhere
    /// limit, so this profile has no limiting permuton.
    ExpSukhatme { alpha: f64 },
    /// Step function: value `values[j]` on `[breaks[j], breaks[j+1])`,
    /// with `breaks[0] = 0` and `breaks[m] = 1`.
    Tabulated { breaks: Vec<f64>, values: Vec<f64> },
}

impl WeightProfile {
    pub fn constant(c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(domain(format!("constant profile value {c} must be positive and finite")));
        }
        Ok(WeightProfile::Constant(c))
    }

    pub fn exp_sukhatme(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(domain(format!("alpha = {alpha} must be positive and finite")));
        }
        Ok(WeightProfile::ExpSukhatme { alpha })
    }

    pub fn tabulated(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || breaks.len() != values.len() + 1 {
            return Err(argument("tabulated profile needs m values and m+1 break points"));
        }
        if breaks[0] != 0.0 || *breaks.last().unwrap() != 1.0 {
            return Err(argument("tabulated break points must start at 0 and end at 1"));
        }
        if breaks.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(argument("tabulated break points must be strictly increasing"));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(domain(format!("tabulated value {v} must be positive and finite")));
        }
        Ok(WeightProfile::Tabulated { breaks, values })
    }

    /// Equal-width step profile.
    pub fn steps(values: Vec<f64>) -> Result<Self> {
        let m = values.len();
        let breaks = (0..=m).map(|j| j as f64 / m.max(1) as f64).collect();
        Self::tabulated(breaks, values)
    }

    /// Parses `constant[:C]`, `sukhatme`, `linear`, `exp-sukhatme:ALPHA`
    /// or `steps:V1,V2,...`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (head, arg) = match spec.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (spec, None),
        };
        let num = |s: &str| -> Result<f64> {
            s.trim().parse::<f64>().map_err(|_| argument(format!("bad number {s:?} in profile {spec:?}")))
        };
        match (head, arg) {
            ("constant", None) => Ok(WeightProfile::Constant(1.0)),
            ("constant", Some(c)) => Self::constant(num(c)?),
            ("sukhatme", None) => Ok(WeightProfile::Sukhatme),
            ("linear", None) => Ok(WeightProfile::Linear),
            ("exp-sukhatme", Some(a)) => Self::exp_sukhatme(num(a)?),
            ("steps", Some(vs)) => Self::steps(vs.split(',').map(num).collect::<Result<_>>()?),
            _ => Err(argument(format!(
                "unknown profile {spec:?}; expected constant[:C], sukhatme, linear, exp-sukhatme:ALPHA or steps:V1,V2,..."
            ))),
        }
    }

    pub fn has_permuton_limit(&self) -> bool {
        !matches!(self, WeightProfile::ExpSukhatme { .. })
    }

    /// `f(y)`; fails for profiles without an almost-everywhere limit.
    pub fn eval(&self, y: f64) -> Result<f64> {
        if !self.has_permuton_limit() {
            return Err(domain("exponential Sukhatme weights have no limiting profile"));
        }
        if !(0.0..=1.0).contains(&y) {
            return Err(domain(format!("profile argument {y} outside [0, 1]")));
        }
        Ok(self.f(y))
    }

    /// Unchecked evaluation of the limiting profile.
    pub(crate) fn f(&self, y: f64) -> f64 {
        match self {
            WeightProfile::Constant(c) => *c,
            WeightProfile::Sukhatme => 1.0 - y,
            WeightProfile::Linear => y,
            WeightProfile::ExpSukhatme { .. } => f64::NAN,
            WeightProfile::Tabulated { breaks, values } => {
                let j = breaks[1..].partition_point(|b| *b <= y);
                values[j.min(values.len() - 1)]
            }
        }
    }

    /// Weights `θ₁..θₙ` of the size-`n` instance.
    pub fn weights(&self, n: usize) -> Result<WeightVector> {
        if n == 0 {
            return Err(argument("n must be at least 1"));
        }
        let nf = n as f64;
        match self {
            WeightProfile::Constant(c) => WeightVector::new(vec![*c; n]),
            WeightProfile::Sukhatme => WeightVector::new((1..=n).map(|i| (n - i + 1) as f64 / nf).collect()),
            WeightProfile::Linear => WeightVector::new((1..=n).map(|i| i as f64 / nf).collect()),
            WeightProfile::ExpSukhatme { alpha } => {
                let la = alpha.ln();
                WeightVector::from_logs((1..=n).map(|i| (n - i + 1) as f64 * la).collect())
            }
            WeightProfile::Tabulated { .. } => {
                WeightVector::new((1..=n).map(|i| self.f((i as f64 - 0.5) / nf)).collect())
            }
        }
    }

    /// The step function `f_n(y) = θ_{⌊yn⌋}` (index clamped to `[1, n]`).
    pub fn discretized(&self, n: usize, y: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&y) {
            return Err(domain(format!("argument {y} outside [0, 1]")));
        }
        let w = self.weights(n)?;
        let i = ((y * n as f64).floor() as usize).clamp(1, n);
        Ok(if w.has_underflow() { w.logs()[i - 1].exp() } else { w.values()[i - 1] })
    }
}

impl fmt::Display for WeightProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightProfile::Constant(c) => write!(f, "constant:{c}"),
            WeightProfile::Sukhatme => write!(f, "sukhatme"),
            WeightProfile::Linear => write!(f, "linear"),
            WeightProfile::ExpSukhatme { alpha } => write!(f, "exp-sukhatme:{alpha}"),
            WeightProfile::Tabulated { breaks, values } => {
                write!(f, "tabulated:{breaks:?}:{values:?}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discretizations() {
        let w = WeightProfile::Sukhatme.weights(4).unwrap();
        assert_eq!(w.values(), &[1.0, 0.75, 0.5, 0.25]);
        let w = WeightProfile::Linear.weights(4).unwrap();
        assert_eq!(w.values(), &[0.25, 0.5, 0.75, 1.0]);
        let w = WeightProfile::exp_sukhatme(2.0).unwrap().weights(3).unwrap();
        for (a, b) in w.values().iter().zip([1.0, 0.5, 0.25]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn step_lookup_and_discretizer() {
        let p = WeightProfile::steps(vec![1.0, 3.0]).unwrap();
        assert_eq!(p.eval(0.2).unwrap(), 1.0);
        assert_eq!(p.eval(0.5).unwrap(), 3.0);
        assert_eq!(p.eval(1.0).unwrap(), 3.0);
        assert_eq!(WeightProfile::Linear.discretized(10, 0.35).unwrap(), 0.3);
        assert_eq!(WeightProfile::Linear.discretized(10, 0.01).unwrap(), 0.1);
    }

    #[test]
    fn exp_sukhatme_is_flagged() {
        let p = WeightProfile::exp_sukhatme(2.0).unwrap();
        assert!(!p.has_permuton_limit());
        assert!(p.eval(0.5).is_err());
    }

    #[test]
    fn parsing() {
        assert_eq!(WeightProfile::parse("sukhatme").unwrap(), WeightProfile::Sukhatme);
        assert_eq!(
            WeightProfile::parse("exp-sukhatme:2").unwrap(),
            WeightProfile::ExpSukhatme { alpha: 2.0 }
        );
        assert_eq!(WeightProfile::parse("constant:3").unwrap(), WeightProfile::Constant(3.0));
        assert!(WeightProfile::parse("exp-sukhatme:-1").is_err());
        assert!(WeightProfile::parse("zipf").is_err());
        assert!(WeightProfile::tabulated(vec![0.0, 0.5], vec![1.0]).is_err());
    }
}
