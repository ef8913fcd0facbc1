use crate::error::{argument, domain, Result};

/// Positive finite weights `θ₁..θₙ` of one Luce instance (`n ≥ 1`).
///
/// The weights are kept both as given and as natural logarithms. Vectors
/// built from logarithms (e.g. `θᵢ = α^{n-i+1}` for large `n`) may span more
/// than the `f64` exponent range; their linear values are rescaled so the
/// largest weight is 1, and entries that still underflow are reported by
/// [`WeightVector::has_underflow`]. Every operation in the crate that could
/// meet such entries works from the logarithms instead.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    values: Vec<f64>,
    logs: Vec<f64>,
    underflow: bool,
}

impl WeightVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(argument("weight vector must contain at least one weight"));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            return Err(domain(format!("weight {} is {v}; weights must be positive and finite", i + 1)));
        }
        let logs = values.iter().map(|v| v.ln()).collect();
        Ok(WeightVector { values, logs, underflow: false })
    }

    /// Builds weights `θᵢ = exp(logs[i])`, stored rescaled so `max θ = 1`.
    pub fn from_logs(logs: Vec<f64>) -> Result<Self> {
        if logs.is_empty() {
            return Err(argument("weight vector must contain at least one weight"));
        }
        if let Some((i, v)) = logs.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(domain(format!("log-weight {} is {v}; must be finite", i + 1)));
        }
        let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let values: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
        let underflow = values.iter().any(|v| !v.is_normal());
        Ok(WeightVector { values, logs, underflow })
    }

    /// `n` equal weights.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Linear weights (rescaled for vectors built from logarithms).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn logs(&self) -> &[f64] {
        &self.logs
    }

    /// True when some linear value underflowed to a subnormal or zero.
    pub fn has_underflow(&self) -> bool {
        self.underflow
    }

    /// `w_n = Σ θᵢ` in the units of [`values`](Self::values).
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Weights of the given (0-based) labels, rescaled so their maximum is 1
    /// when the vector carries underflowed entries. Scale does not matter to
    /// any Luce probability, so this is exact at the model level.
    pub fn gather(&self, labels: &[usize]) -> Vec<f64> {
        if !self.underflow {
            return labels.iter().map(|&i| self.values[i]).collect();
        }
        let max = labels.iter().map(|&i| self.logs[i]).fold(f64::NEG_INFINITY, f64::max);
        labels.iter().map(|&i| (self.logs[i] - max).exp()).collect()
    }

    /// The contiguous block `θ_{start+1}..θ_{start+len}` (0-based `start`),
    /// rescaled as in [`gather`](Self::gather).
    pub fn window(&self, start: usize, len: usize) -> Vec<f64> {
        let idx: Vec<usize> = (start..start + len).collect();
        self.gather(&idx)
    }

    /// The same model with every weight multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(domain(format!("scale factor {c} must be positive and finite")));
        }
        if self.underflow {
            Self::from_logs(self.logs.iter().map(|l| l + c.ln()).collect())
        } else {
            Self::new(self.values.iter().map(|v| v * c).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_weights() {
        assert!(WeightVector::new(vec![]).is_err());
        assert!(WeightVector::new(vec![1.0, 0.0]).is_err());
        assert!(WeightVector::new(vec![1.0, -2.0]).is_err());
        assert!(WeightVector::new(vec![f64::NAN]).is_err());
        assert!(WeightVector::new(vec![f64::INFINITY]).is_err());
        assert!(WeightVector::from_logs(vec![0.0, f64::NEG_INFINITY]).is_err());
    }

    #[test]
    fn logs_rescale_to_unit_max() {
        let w = WeightVector::from_logs(vec![3.0, 5.0, 4.0]).unwrap();
        assert_eq!(w.values()[1], 1.0);
        assert!((w.values()[0] - (-2.0f64).exp()).abs() < 1e-15);
        assert!(!w.has_underflow());
    }

    #[test]
    fn extreme_span_windows_stay_positive() {
        let logs: Vec<f64> = (0..5000).map(|i| -(i as f64) * 2f64.ln()).collect();
        let w = WeightVector::from_logs(logs).unwrap();
        assert!(w.has_underflow());
        let win = w.window(4990, 3);
        assert_eq!(win[0], 1.0);
        assert!((win[1] - 0.5).abs() < 1e-12 && (win[2] - 0.25).abs() < 1e-12);
    }
}
