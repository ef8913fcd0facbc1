//! The limiting permuton of Luce permutations with a weight profile `f`.
//!
//! For `U` uniform and `E ~ Exp(1)` independent, the limit is the law of
//! `(U, F(E / f(U)))` with `F(x) = 1 - ∫₀¹ e^{-x f(y)} dy`.

use rand::Rng;
use rand_distr::Exp1;

use crate::error::{capacity, domain, Result};
use crate::model::{p_unchecked, ranks_of, Permutation, WeightProfile};
use crate::numeric::quad::{graded_breaks, integrate_simplex, integrate_with_breaks};
use crate::numeric::root::invert_increasing;
use crate::numeric::mc::sharded_mean;
use crate::numeric::stats::Estimate;
use crate::patterns::Pattern;

/// Largest `y` accepted by the clamped inverse.
pub const Y_CLAMP: f64 = 1.0 - 1e-12;
/// Largest pattern size for simplex quadrature.
pub const MAX_QUADRATURE_K: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct PermutonModel {
    profile: WeightProfile,
    tol: f64,
}

/// How to evaluate a pattern density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensityMethod {
    Quadrature,
    MonteCarlo { samples: u64, seed: u64 },
}

impl PermutonModel {
    /// Fails for profiles without an almost-everywhere limit.
    pub fn new(profile: WeightProfile) -> Result<Self> {
        if !profile.has_permuton_limit() {
            return Err(domain(format!("profile {profile} has no limiting permuton")));
        }
        Ok(PermutonModel { profile, tol: 1e-10 })
    }

    pub fn with_tolerance(mut self, tol: f64) -> Result<Self> {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(domain(format!("tolerance {tol} must be positive")));
        }
        self.tol = tol;
        Ok(self)
    }

    pub fn profile(&self) -> &WeightProfile {
        &self.profile
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// `f(y)`.
    pub fn f(&self, y: f64) -> f64 {
        self.profile.f(y)
    }

    fn check_x(x: f64) -> Result<()> {
        if !(x >= 0.0) {
            return Err(domain(format!("F is defined for x >= 0, got {x}")));
        }
        Ok(())
    }

    /// `F(x) = 1 - ∫₀¹ e^{-x f(y)} dy`, in closed form for every built-in profile.
    pub fn capital_f(&self, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        Ok(self.f_unchecked(x))
    }

    fn f_unchecked(&self, x: f64) -> f64 {
        if x == f64::INFINITY {
            return 1.0;
        }
        match &self.profile {
            WeightProfile::Constant(c) => -(-c * x).exp_m1(),
            WeightProfile::Sukhatme | WeightProfile::Linear => ramp_f(x),
            WeightProfile::Tabulated { breaks, values } => {
                let tail: f64 = breaks
                    .windows(2)
                    .zip(values)
                    .map(|(b, v)| (b[1] - b[0]) * (-x * v).exp())
                    .sum();
                1.0 - tail
            }
            WeightProfile::ExpSukhatme { .. } => unreachable!("rejected at construction"),
        }
    }

    /// `F(x)` by adaptive quadrature of the defining integral.
    pub fn capital_f_quadrature(&self, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        let r = integrate_with_breaks(|y| (-x * self.f(y)).exp(), &self.breaks(30), self.tol, 0.0);
        Ok(1.0 - r.value)
    }

    /// `F'(x) = ∫₀¹ f(y) e^{-x f(y)} dy`.
    pub fn capital_f_prime(&self, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        Ok(match &self.profile {
            WeightProfile::Constant(c) => c * (-c * x).exp(),
            WeightProfile::Sukhatme | WeightProfile::Linear => ramp_f_prime(x),
            WeightProfile::Tabulated { breaks, values } => breaks
                .windows(2)
                .zip(values)
                .map(|(b, v)| (b[1] - b[0]) * v * (-x * v).exp())
                .sum(),
            WeightProfile::ExpSukhatme { .. } => unreachable!("rejected at construction"),
        })
    }

    /// `F⁻¹(y)` for `0 ≤ y < 1`.
    pub fn capital_f_inverse(&self, y: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&y) {
            return Err(domain(format!("F⁻¹ is defined on [0, 1), got {y}")));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        if let WeightProfile::Constant(c) = self.profile {
            return Ok(-(-y).ln_1p() / c);
        }
        invert_increasing(
            |x| self.f_unchecked(x),
            Some(|x: f64| self.capital_f_prime(x).unwrap_or(0.0)),
            y,
            self.tol,
        )
    }

    /// `F⁻¹(min(y, 1 - 10⁻¹²))`; the flag reports whether clamping occurred.
    pub fn capital_f_inverse_clamped(&self, y: f64) -> Result<(f64, bool)> {
        if !(0.0..=1.0).contains(&y) {
            return Err(domain(format!("y = {y} outside [0, 1]")));
        }
        let clamped = y > Y_CLAMP;
        Ok((self.capital_f_inverse(y.min(Y_CLAMP))?, clamped))
    }

    fn breaks(&self, depth: u32) -> Vec<f64> {
        let mut b = graded_breaks(0.0, 1.0, depth);
        if let WeightProfile::Tabulated { breaks, .. } = &self.profile {
            b.extend_from_slice(breaks);
            b.sort_by(f64::total_cmp);
            b.dedup();
        }
        b
    }

    /// Density `ρ(x, y) = f(x) e^{-f(x) s} / ∫₀¹ f(t) e^{-f(t) s} dt`,
    /// `s = F⁻¹(y)`, with the denominator computed by quadrature.
    pub fn density(&self, x: f64, y: f64) -> Result<f64> {
        check_open(x, y)?;
        let (s, _) = self.capital_f_inverse_clamped(y)?;
        let g = |t: f64| {
            let ft = self.f(t);
            ft * (-ft * s).exp()
        };
        let den = integrate_with_breaks(g, &self.breaks(48), 0.0, 1e-12).value;
        Ok(g(x) / den)
    }

    /// Rows `(x, y, ρ)` over the grid, row-major in `xs`.
    pub fn density_grid(&self, xs: &[f64], ys: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
        let mut rows = Vec::with_capacity(xs.len() * ys.len());
        for &x in xs {
            for &y in ys {
                rows.push((x, y, self.density(x, y)?));
            }
        }
        Ok(rows)
    }

    /// A sample of `Perm(μ, n)`.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Permutation {
        self.sample_with(n, rng, false)
    }

    /// As [`sample`](Self::sample); with `evaluate_f` the `y`-coordinates are
    /// computed as `F(E/f(U))` instead of ranked through `ln E - ln f(U)`.
    pub fn sample_with<R: Rng + ?Sized>(&self, n: usize, rng: &mut R, evaluate_f: bool) -> Permutation {
        let mut points: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                let e: f64 = rng.sample(Exp1);
                let fu = self.f(u);
                let key = if evaluate_f { self.f_unchecked(e / fu) } else { e.ln() - fu.ln() };
                (u, key)
            })
            .collect();
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let keys: Vec<f64> = points.into_iter().map(|p| p.1).collect();
        ranks_of(&keys)
    }

    /// `õcc(π, μ) = k! ∫_{0<u₁<…<u_k<1} p(f(u_{π⁻¹(1)}), …, f(u_{π⁻¹(k)})) du`.
    pub fn pattern_density(&self, pi: &Pattern, method: DensityMethod) -> Result<Estimate> {
        let k = pi.len();
        let chain: Vec<usize> = pi.inverse().as_slice().iter().map(|&v| v as usize - 1).collect();
        let integrand = |u: &[f64]| {
            let mut w = [0.0; 8];
            for (slot, &j) in w.iter_mut().zip(&chain) {
                *slot = self.f(u[j]).max(f64::MIN_POSITIVE);
            }
            p_unchecked(&w[..k])
        };
        let k_fact: f64 = (1..=k).map(|i| i as f64).product();
        match method {
            DensityMethod::Quadrature => {
                if k > MAX_QUADRATURE_K {
                    return Err(capacity(format!(
                        "simplex quadrature supports k <= {MAX_QUADRATURE_K}; use Monte Carlo for k = {k}"
                    )));
                }
                Ok(Estimate::exact(k_fact * integrate_simplex(k, &integrand, self.tol)))
            }
            DensityMethod::MonteCarlo { samples, seed } => {
                if samples == 0 {
                    return Err(domain("Monte Carlo needs at least one sample"));
                }
                let est = sharded_mean(samples, seed, |rng| {
                    let mut u = [0.0; 8];
                    for slot in u[..k].iter_mut() {
                        *slot = rng.random();
                    }
                    u[..k].sort_by(f64::total_cmp);
                    integrand(&u[..k])
                });
                // sorted uniforms already carry the density k! on the simplex
                Ok(est)
            }
        }
    }
}

fn check_open(x: f64, y: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0) {
        return Err(domain(format!("({x}, {y}) must lie in the open unit square")));
    }
    Ok(())
}

/// `(x - 1 + e^{-x}) / x`, the `F` shared by `f(y) = 1 - y` and `f(y) = y`.
fn ramp_f(x: f64) -> f64 {
    if x < 0.1 {
        // x/2 - x²/6 + x³/24 - …
        let mut term = x / 2.0;
        let mut sum = 0.0;
        for m in 2..20 {
            sum += term;
            term *= -x / (m as f64 + 1.0);
        }
        sum
    } else {
        (x + (-x).exp_m1()) / x
    }
}

/// `(1 - e^{-x}(1 + x)) / x²`.
fn ramp_f_prime(x: f64) -> f64 {
    if x < 0.1 {
        // Σ_{m≥0} (-x)^m / (m! (m + 2))
        let mut fact = 1.0;
        let mut sum = 0.0;
        for m in 0..20 {
            if m > 0 {
                fact *= -x / m as f64;
            }
            sum += fact / (m as f64 + 2.0);
        }
        sum
    } else {
        let tail = 1.0 - (-x).exp() * (1.0 + x);
        tail / (x * x)
    }
}

/// `1 - e^{-φ}(1 + φ)`.
fn one_minus_poisson_tail(phi: f64) -> f64 {
    if phi < 0.01 {
        let p2 = phi * phi;
        p2 * (0.5 - phi / 3.0 + p2 / 8.0 - p2 * phi / 30.0 + p2 * p2 / 144.0)
    } else {
        -(-phi).exp_m1() - phi * (-phi).exp()
    }
}

/// Closed-form density for `f(y) = 1 - y`:
/// `(1-x) φ² e^{xφ} / (e^φ - φ - 1)`, `φ = F⁻¹(y)`.
pub fn sukhatme_density(x: f64, y: f64) -> Result<f64> {
    check_open(x, y)?;
    let model = PermutonModel { profile: WeightProfile::Sukhatme, tol: 1e-12 };
    let (phi, _) = model.capital_f_inverse_clamped(y)?;
    // divided through by e^φ
    Ok((1.0 - x) * phi * phi * (-(1.0 - x) * phi).exp() / one_minus_poisson_tail(phi))
}

/// Density of the Mallows permuton with parameter `β > 0`.
pub fn mallows_density(beta: f64, x: f64, y: f64) -> Result<f64> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(domain(format!("beta = {beta} must be positive")));
    }
    check_open(x, y)?;
    let h = beta / 2.0;
    let den = (beta / 4.0).exp() * (h * (x - y)).cosh() - (-beta / 4.0).exp() * (h * (x + y - 1.0)).cosh();
    Ok(h * h.sinh() / (den * den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rng_stream;

    fn suk() -> PermutonModel {
        PermutonModel::new(WeightProfile::Sukhatme).unwrap()
    }

    #[test]
    fn rejects_exp_sukhatme() {
        assert!(PermutonModel::new(WeightProfile::exp_sukhatme(2.0).unwrap()).is_err());
    }

    #[test]
    fn closed_forms() {
        let c = PermutonModel::new(WeightProfile::Constant(1.0)).unwrap();
        let m = suk();
        for &x in &[0.0, 1e-8, 0.05, 0.1, 0.7, 3.0, 40.0] {
            assert!((c.capital_f(x).unwrap() + (-x).exp_m1()).abs() < 1e-15);
            let expect = if x < 1e-4 { x / 2.0 - x * x / 6.0 } else { (x - 1.0 + (-x).exp()) / x };
            assert!((m.capital_f(x).unwrap() - expect).abs() < 1e-12, "x={x}");
            assert!((m.capital_f_quadrature(x).unwrap() - m.capital_f(x).unwrap()).abs() < 1e-9);
        }
        assert!(m.capital_f(-1.0).is_err());
    }

    #[test]
    fn series_branches_are_continuous() {
        // slopes near 0.1 are below 1 in absolute value
        let a = ramp_f(0.1 - 1e-12);
        let b = ramp_f(0.1 + 1e-12);
        assert!((a - b).abs() < 3e-12);
        assert!((ramp_f(0.1) - 0.048_374_180_359_595_73).abs() < 1e-15);
        let a = ramp_f_prime(0.1 - 1e-12);
        let b = ramp_f_prime(0.1 + 1e-12);
        assert!((a - b).abs() < 3e-12);
        assert!((ramp_f_prime(0.1) - 0.467_884_016_044_446_95).abs() < 1e-14);
        assert!((one_minus_poisson_tail(0.01 - 1e-12) - one_minus_poisson_tail(0.01 + 1e-12)).abs() < 1e-13);
    }

    #[test]
    fn inverse_roundtrip_and_asymptotics() {
        let m = suk();
        for i in 1..10 {
            let y = i as f64 / 10.0;
            let x = m.capital_f_inverse(y).unwrap();
            assert!((m.capital_f(x).unwrap() - y).abs() < 1e-9);
        }
        assert_eq!(m.capital_f_inverse(0.0).unwrap(), 0.0);
        assert!(m.capital_f_inverse(1.0).is_err());
        let x = m.capital_f_inverse(0.999).unwrap();
        assert!((x * 0.001 - 1.0).abs() < 0.05);
        let (_, clamped) = m.capital_f_inverse_clamped(1.0).unwrap();
        assert!(clamped);
    }

    #[test]
    fn constant_density_is_one() {
        let m = PermutonModel::new(WeightProfile::Constant(2.5)).unwrap();
        assert!((m.density(0.3, 0.8).unwrap() - 1.0).abs() < 1e-10);
        assert!(m.density(0.0, 0.5).is_err());
    }

    #[test]
    fn sukhatme_density_agrees_with_general_formula() {
        let m = suk();
        for i in 1..20 {
            for j in 1..20 {
                let (x, y) = (i as f64 / 20.0, j as f64 / 20.0);
                let a = m.density(x, y).unwrap();
                let b = sukhatme_density(x, y).unwrap();
                assert!((a - b).abs() < 1e-7 * b.max(1.0), "({x},{y}): {a} vs {b}");
            }
        }
    }

    #[test]
    fn mallows_properties() {
        let a = mallows_density(3.0, 0.2, 0.7).unwrap();
        let b = mallows_density(3.0, 0.7, 0.2).unwrap();
        assert!((a - b).abs() < 1e-14);
        assert!((mallows_density(1e-4, 0.3, 0.9).unwrap() - 1.0).abs() < 1e-3);
        assert!(mallows_density(0.0, 0.3, 0.3).is_err());
    }

    #[test]
    fn rank_shortcut_matches_f_evaluation() {
        let m = suk();
        let mut a = rng_stream(5, 0);
        let mut b = rng_stream(5, 0);
        assert_eq!(m.sample_with(500, &mut a, false), m.sample_with(500, &mut b, true));
        assert_eq!(m.sample(1, &mut a).as_slice(), &[1]);
    }

    #[test]
    fn pattern_density_quadrature() {
        let m = suk();
        let d = m.pattern_density(&"12".parse().unwrap(), DensityMethod::Quadrature).unwrap();
        assert!((d.value - 2f64.ln()).abs() < 1e-8, "{}", d.value);
        let c = PermutonModel::new(WeightProfile::Constant(1.0)).unwrap();
        let d = c.pattern_density(&"2413".parse().unwrap(), DensityMethod::Quadrature).unwrap();
        assert!((d.value - 1.0 / 24.0).abs() < 1e-9);
        assert!(c.pattern_density(&"123456".parse().unwrap(), DensityMethod::Quadrature).is_err());
    }

    #[test]
    fn pattern_density_monte_carlo() {
        let m = PermutonModel::new(WeightProfile::Sukhatme).unwrap();
        let e = m.pattern_density(&"12".parse().unwrap(), DensityMethod::MonteCarlo { samples: 200_000, seed: 4 }).unwrap();
        assert!(e.within(2f64.ln(), 4.0), "{e:?}");
        let total: f64 = Pattern::all(3)
            .unwrap()
            .iter()
            .map(|p| m.pattern_density(p, DensityMethod::MonteCarlo { samples: 400_000, seed: 9 }).unwrap().value)
            .sum();
        assert!((total - 1.0).abs() < 2e-3, "{total}");
    }

    #[test]
    fn density_has_uniform_marginals() {
        for profile in [WeightProfile::Sukhatme, WeightProfile::Linear] {
            let m = PermutonModel::new(profile).unwrap();
            for t in [0.1, 0.5, 0.9] {
                let breaks = graded_breaks(0.0, 1.0, 30);
                let over_x = integrate_with_breaks(|x| m.density(x, t).unwrap_or(0.0), &breaks, 1e-10, 1e-10).value;
                let over_y = integrate_with_breaks(|y| m.density(t, y).unwrap_or(0.0), &breaks, 1e-10, 1e-10).value;
                assert!((over_x - 1.0).abs() < 1e-6, "x-marginal at {t}: {over_x}");
                assert!((over_y - 1.0).abs() < 1e-6, "y-marginal at {t}: {over_y}");
            }
        }
    }
}
