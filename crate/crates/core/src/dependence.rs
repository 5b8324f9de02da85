//! Copula-level quantities of the exchangeable vector `(X_1, ..., X_n)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mixing::{MixingDistribution, MixingKind};
use crate::numeric::Integrator;
use crate::specfun::{exp_e1_scaled, gamma_q, gamma_upper_quantile};

/// Claims `X_i | Θ = θ ~ Exp(θ)`, conditionally independent, `i = 1..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DependentVector {
    pub mixing: MixingDistribution,
    pub n: usize,
}

impl DependentVector {
    pub fn new(mixing: MixingDistribution, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", "dimension must be at least 1"));
        }
        Ok(DependentVector { mixing, n })
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: len,
            });
        }
        Ok(())
    }

    /// `P(X_1 > x_1, ..., X_n > x_n) = L(Σ x_i)`.
    pub fn joint_survival(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x.len())?;
        if let Some(bad) = x.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::param("x", format!("coordinates must be >= 0, got {bad}")));
        }
        self.mixing.laplace(x.iter().sum())
    }

    /// Survival copula `L(Σ φ(u_i))`; any zero argument gives 0.
    pub fn survival_copula(&self, u: &[f64]) -> Result<f64> {
        self.check_len(u.len())?;
        check_unit(u)?;
        if u.contains(&0.0) {
            return Ok(0.0);
        }
        let mut s = 0.0;
        for &v in u {
            s += self.mixing.generator(v)?;
        }
        self.mixing.laplace(s)
    }

    /// Family-specific copula formula (Clayton, gamma-claims, Gumbel,
    /// inverse Gaussian).
    pub fn survival_copula_closed(&self, u: &[f64]) -> Result<f64> {
        self.check_len(u.len())?;
        check_unit(u)?;
        if u.contains(&0.0) {
            return Ok(0.0);
        }
        let n = u.len() as f64;
        match self.mixing.kind() {
            MixingKind::Gamma { shape, .. } => {
                let s: f64 = u.iter().map(|v| v.powf(-1.0 / shape)).sum();
                Ok((s - n + 1.0).powf(-shape))
            }
            MixingKind::GleserGamma { alpha, .. } => {
                let mut s = 0.0;
                for &v in u {
                    s += gamma_upper_quantile(alpha, v)?;
                }
                Ok(gamma_q(alpha, s))
            }
            MixingKind::PositiveStable { alpha } => gumbel(u, 1.0 / alpha),
            MixingKind::Levy { .. } => gumbel(u, 2.0),
            MixingKind::InverseGaussian { lambda, mu } => {
                let r = mu / lambda;
                let s: f64 = u.iter().map(|v| (1.0 - r * v.ln()).powi(2)).sum();
                Ok((-(lambda / mu) * ((s - n + 1.0).sqrt() - 1.0)).exp())
            }
            MixingKind::Lindley { .. } | MixingKind::BetaSecondKind { .. } => Err(Error::Unsupported(format!(
                "no closed copula formula for {}",
                self.mixing
            ))),
        }
    }

    fn require_pair(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::param("n", "pairwise measures need n >= 2"));
        }
        Ok(())
    }

    /// Kendall's τ by quadrature: `τ = 1 - 4 ∫_0^∞ s L'(s)^2 ds`, integrated
    /// in `y = ln s`.
    pub fn kendall_tau(&self) -> Result<f64> {
        self.require_pair()?;
        kendall_tau_numeric(&self.mixing)
    }

    /// Kendall's τ from the family formula where one exists.
    pub fn kendall_tau_closed(&self) -> Result<f64> {
        self.require_pair()?;
        match self.mixing.kind() {
            MixingKind::Gamma { shape, .. } => Ok(1.0 / (1.0 + 2.0 * shape)),
            MixingKind::PositiveStable { alpha } => Ok(1.0 - alpha),
            MixingKind::Levy { .. } => Ok(0.5),
            MixingKind::InverseGaussian { lambda, mu } => {
                let a = mu / lambda;
                let z = 2.0 / a;
                Ok(1.0 - (a * (2.0 + a) - 4.0 * exp_e1_scaled(z)) / (2.0 * a * a))
            }
            _ => Err(Error::Unsupported(format!("no closed Kendall τ for {}", self.mixing))),
        }
    }

    /// Pearson correlation between two coordinates, from `W = 1/Θ`.
    pub fn pearson_rho(&self) -> Result<f64> {
        self.require_pair()?;
        let m1 = self.mixing.neg_moment(1)?;
        let m2 = self.mixing.neg_moment(2)?;
        Ok((m2 - m1 * m1) / (2.0 * m2 - m1 * m1))
    }

    /// Pearson correlation from the family formula where one exists.
    pub fn pearson_rho_closed(&self) -> Result<f64> {
        self.require_pair()?;
        match self.mixing.kind() {
            MixingKind::Gamma { shape, .. } if shape > 2.0 => Ok(1.0 / shape),
            MixingKind::InverseGaussian { lambda, mu } => {
                Ok(mu * (lambda + 2.0 * mu) / (lambda * lambda + 4.0 * lambda * mu + 5.0 * mu * mu))
            }
            _ => Err(Error::Unsupported(format!("no closed Pearson ρ for {}", self.mixing))),
        }
    }

    /// `E Π X_i^{r_i} = Π Γ(r_i + 1) · E Θ^{-Σ r_i}`.
    pub fn joint_moment(&self, r: &[u32]) -> Result<f64> {
        self.check_len(r.len())?;
        let total: u32 = r.iter().sum();
        let fact: f64 = r.iter().map(|&k| factorial(k)).product();
        Ok(fact * self.mixing.neg_moment(total)?)
    }
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

fn check_unit(u: &[f64]) -> Result<()> {
    if let Some(bad) = u.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::param(
            "u",
            format!("copula arguments must lie in [0, 1], got {bad}"),
        ));
    }
    Ok(())
}

fn gumbel(u: &[f64], theta: f64) -> Result<f64> {
    let s: f64 = u.iter().map(|v| (-v.ln()).powf(theta)).sum();
    Ok((-s.powf(1.0 / theta)).exp())
}

/// `φ(t)/φ'(t)` at `t = L(s)`, which equals `s L'(s)`; the τ integral
/// formula needs it to vanish as `t -> 0`.
pub fn generator_ratio_at(m: &MixingDistribution, s: f64) -> Result<f64> {
    Ok(s * m.laplace_derivative(1, s)?)
}

/// `1 - 4 ∫ s L'(s)^2 ds` for any frailty law.
pub fn kendall_tau_numeric(m: &MixingDistribution) -> Result<f64> {
    let h = |y: f64| -> f64 {
        let s = y.exp();
        match m.laplace_derivative(1, s) {
            Ok(d) if d.is_finite() => (s * d).powi(2),
            _ => f64::NAN,
        }
    };
    // widen the window until the integrand is negligible at both ends
    let peak = [-5.0f64, -1.0, 0.0, 1.0, 5.0]
        .iter()
        .map(|&y| h(y))
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    let negligible = |y: f64| {
        let v = h(y);
        v.is_finite() && v <= 1e-18 * peak
    };
    let mut lo = -40.0;
    while !negligible(lo) && lo > -700.0 {
        lo *= 1.5;
    }
    let mut hi = 40.0;
    while !negligible(hi) && hi < 700.0 {
        hi *= 1.5;
    }
    let lo = lo.max(-700.0);
    let hi = hi.min(700.0);
    let mut pts = vec![lo];
    for p in [-100.0, -30.0, -10.0, -3.0, 0.0, 3.0, 10.0, 30.0, 100.0] {
        if p > lo && p < hi {
            pts.push(p);
        }
    }
    pts.push(hi);
    let q = Integrator::new(1e-15, 1e-13).with_max_segments(8000);
    let mut total = 0.0;
    for w in pts.windows(2) {
        total += q.integrate(h, w[0], w[1]).require("Kendall τ integral")?;
    }
    Ok(1.0 - 4.0 * total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v(m: MixingDistribution, n: usize) -> DependentVector {
        DependentVector::new(m, n).unwrap()
    }

    #[test]
    fn joint_survival_examples() {
        let p = v(MixingDistribution::gamma(3.0, 1.0).unwrap(), 2);
        assert_relative_eq!(p.joint_survival(&[1.0, 1.0]).unwrap(), 1.0 / 27.0, max_relative = 1e-15);
        assert_eq!(p.joint_survival(&[0.0, 0.0]).unwrap(), 1.0);
        assert!(matches!(p.joint_survival(&[1.0]), Err(Error::DimensionMismatch { .. })));
        let ig = v(MixingDistribution::inverse_gaussian(1.0, 1.0).unwrap(), 3);
        assert_relative_eq!(
            ig.joint_survival(&[1.0, 0.0, 0.0]).unwrap(),
            (-(3f64.sqrt() - 1.0)).exp(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn copula_examples() {
        let c = v(MixingDistribution::gamma(1.0, 1.0).unwrap(), 2);
        assert_relative_eq!(c.survival_copula(&[0.5, 0.5]).unwrap(), 1.0 / 3.0, max_relative = 1e-14);
        assert_eq!(c.survival_copula(&[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(c.survival_copula(&[0.0, 0.3]).unwrap(), 0.0);
        let g = v(MixingDistribution::positive_stable(0.5).unwrap(), 2);
        let e = (-1f64).exp();
        assert_relative_eq!(
            g.survival_copula(&[e, e]).unwrap(),
            (-(2f64.sqrt())).exp(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn copula_generic_equals_closed() {
        let models = [
            MixingDistribution::gamma(1.7, 2.0).unwrap(),
            MixingDistribution::gleser_gamma(0.4, 1.5).unwrap(),
            MixingDistribution::positive_stable(0.3).unwrap(),
            MixingDistribution::levy(0.8).unwrap(),
            MixingDistribution::inverse_gaussian(1.2, 0.7).unwrap(),
        ];
        for m in models {
            let d = v(m, 3);
            for u in [[0.2, 0.5, 0.9], [0.01, 0.99, 0.5], [0.7, 0.7, 0.7]] {
                assert_relative_eq!(
                    d.survival_copula(&u).unwrap(),
                    d.survival_copula_closed(&u).unwrap(),
                    max_relative = 1e-10
                );
            }
        }
    }

    #[test]
    fn tau_examples() {
        let w = v(MixingDistribution::positive_stable(0.5).unwrap(), 2);
        assert_relative_eq!(w.kendall_tau().unwrap(), 0.5, max_relative = 1e-8);
        let ig = v(MixingDistribution::inverse_gaussian(1.0, 1.0).unwrap(), 2);
        assert_relative_eq!(
            ig.kendall_tau_closed().unwrap(),
            0.222_657_233_776_445,
            max_relative = 1e-12
        );
        assert_relative_eq!(ig.kendall_tau().unwrap(), 0.222_657_233_776_445, max_relative = 1e-8);
        let c = v(MixingDistribution::gamma(1.0, 3.0).unwrap(), 2);
        assert_relative_eq!(c.kendall_tau().unwrap(), 1.0 / 3.0, max_relative = 1e-8);
        let lv = v(MixingDistribution::levy(2.0).unwrap(), 2);
        assert_relative_eq!(lv.kendall_tau().unwrap(), 0.5, max_relative = 1e-8);
        assert!(v(MixingDistribution::levy(2.0).unwrap(), 1).kendall_tau().is_err());
    }

    #[test]
    fn gamma_claims_boundary_condition() {
        let m = MixingDistribution::gleser_gamma(0.3, 1.0).unwrap();
        let mut prev = f64::INFINITY;
        for s in [10.0, 50.0, 200.0, 1000.0] {
            let r = generator_ratio_at(&m, s).unwrap().abs();
            assert!(r < prev);
            prev = r;
        }
        assert!(prev < 1e-100);
        // τ is finite and inside [0, 1)
        let t = kendall_tau_numeric(&m).unwrap();
        assert!((0.0..1.0).contains(&t));
    }

    #[test]
    fn rho_examples() {
        let p = v(MixingDistribution::gamma(3.0, 1.0).unwrap(), 2);
        assert_relative_eq!(p.pearson_rho().unwrap(), 1.0 / 3.0, max_relative = 1e-14);
        let ig = v(MixingDistribution::inverse_gaussian(1.0, 1.0).unwrap(), 2);
        assert_relative_eq!(ig.pearson_rho().unwrap(), 0.3, max_relative = 1e-14);
        assert_relative_eq!(ig.pearson_rho_closed().unwrap(), 0.3, max_relative = 1e-14);
        let near = v(MixingDistribution::gamma(1e4, 1e4).unwrap(), 2);
        assert!(near.pearson_rho().unwrap().abs() < 1e-3);
        assert!(v(MixingDistribution::gamma(1.5, 1.0).unwrap(), 2)
            .pearson_rho()
            .is_err());
    }

    #[test]
    fn joint_moment_examples() {
        let p = v(MixingDistribution::gamma(5.0, 1.0).unwrap(), 2);
        assert_relative_eq!(p.joint_moment(&[1, 1]).unwrap(), 1.0 / 12.0, max_relative = 1e-14);
        assert_eq!(p.joint_moment(&[0, 0]).unwrap(), 1.0);
        let ig = v(MixingDistribution::inverse_gaussian(1.0, 1.0).unwrap(), 1);
        assert_relative_eq!(ig.joint_moment(&[1]).unwrap(), 2.0, max_relative = 1e-14);
    }
}
