//! Tail approximations for frailty mixtures of classical Pareto sums.
//!
//! Given `Θ = θ`, the sum of classical Pareto claims with precision `β` has
//! density `~ θ β^{mθ} x^{-θ-1}`; mixing over Θ gives
//! `f(x) ~ -d/dx L_Θ(log(x/β^m))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mixing::{MixingDistribution, MixingKind};
use crate::numeric::Integrator;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParetoTailSpec {
    /// Precision (scale) of the classical Pareto claims.
    pub beta: f64,
    /// Index of the claim with the smallest shape.
    pub m: u32,
    /// Gamma or inverse Gaussian frailty.
    pub mixing: MixingDistribution,
}

impl ParetoTailSpec {
    pub fn new(beta: f64, m: u32, mixing: MixingDistribution) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::param("beta", format!("must be positive, got {beta}")));
        }
        if m == 0 {
            return Err(Error::param("m", "index must be >= 1"));
        }
        match mixing.kind() {
            MixingKind::Gamma { .. } | MixingKind::InverseGaussian { .. } => {}
            other => {
                return Err(Error::Unsupported(format!(
                    "tail approximation is specialised to gamma and inverse Gaussian frailty, got {other:?}"
                )))
            }
        }
        Ok(ParetoTailSpec { beta, m, mixing })
    }

    /// `log(x / β^m)`, positive on the valid domain.
    fn log_arg(&self, x: f64) -> Result<f64> {
        let y = x.ln() - f64::from(self.m) * self.beta.ln();
        if !(y > 0.0) || !y.is_finite() {
            return Err(Error::param(
                "x",
                format!(
                    "tail form needs x > beta^m = {}, got {x}",
                    self.beta.powi(self.m as i32)
                ),
            ));
        }
        Ok(y)
    }
}

/// `-L'(log(x/β^m)) / x` through the frailty Laplace derivative.
pub fn tail_pdf_generic(spec: &ParetoTailSpec, x: f64) -> Result<f64> {
    let y = spec.log_arg(x)?;
    Ok(-spec.mixing.laplace_derivative(1, y)? / x)
}

fn check_tail_args(beta: f64, m: u32, x: f64) -> Result<f64> {
    if !(beta > 0.0) || m == 0 {
        return Err(Error::param("beta", "need beta > 0 and m >= 1"));
    }
    let y = x.ln() - f64::from(m) * beta.ln();
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::param("x", format!("tail form needs x > beta^m, got {x}")));
    }
    Ok(y)
}

/// Gamma(α, λ) frailty: `α λ^α / (x [λ + log x - m log β]^{α+1})`.
pub fn tail_pdf_gamma(alpha: f64, lambda: f64, beta: f64, m: u32, x: f64) -> Result<f64> {
    if !(alpha > 0.0 && lambda > 0.0) {
        return Err(Error::param("alpha", "need alpha > 0 and lambda > 0"));
    }
    let y = check_tail_args(beta, m, x)?;
    Ok(alpha * (alpha * lambda.ln() - (alpha + 1.0) * (lambda + y).ln()).exp() / x)
}

/// Inverse Gaussian(λ, μ) frailty:
/// `(1/x) sqrt(λ/φ) exp(λ/μ - sqrt(λφ))` with `φ = λ/μ² + 2 log(x/β^m)`.
pub fn tail_pdf_ig(lambda: f64, mu: f64, beta: f64, m: u32, x: f64) -> Result<f64> {
    if !(lambda > 0.0 && mu > 0.0) {
        return Err(Error::param("lambda", "need lambda > 0 and mu > 0"));
    }
    let y = check_tail_args(beta, m, x)?;
    let phi = lambda / (mu * mu) + 2.0 * y;
    Ok((lambda / phi).sqrt() * (lambda / mu - (lambda * phi).sqrt()).exp() / x)
}

/// Exact density of `S_n` when, given `Θ = θ`, the claims are iid classical
/// Pareto with shape θ and precision β. Supports `n = 1` (closed) and `n = 2`
/// (nested quadrature).
pub fn pareto_mixture_pdf(mixing: &MixingDistribution, beta: f64, n: usize, x: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::param("beta", format!("must be positive, got {beta}")));
    }
    match n {
        1 => {
            if x <= beta {
                return Ok(0.0);
            }
            Ok(-mixing.laplace_derivative(1, (x / beta).ln())? / x)
        }
        2 => {
            if x <= 2.0 * beta {
                return Ok(0.0);
            }
            let inner = Integrator::new(1e-300, 1e-11).with_max_segments(4000);
            let outer = Integrator::new(1e-300, 1e-10).with_max_segments(4000);
            let half = x / 2.0;
            let cuts: Vec<f64> = [1.01, 1.1, 2.0, 10.0, 100.0, 1e3, 1e4]
                .iter()
                .map(|c| c * beta)
                .filter(|&t| t < half)
                .collect();
            let conditional = |th: f64| -> f64 {
                // 2 ∫_β^{x/2} p(t) p(x - t) dt, p(t) = θ β^θ t^{-θ-1}
                let lp = |t: f64| th.ln() + th * beta.ln() - (th + 1.0) * t.ln();
                let mut pts = vec![beta];
                pts.extend(cuts.iter().copied());
                pts.push(half);
                let mut s = 0.0;
                for w in pts.windows(2) {
                    s += inner.integrate(|t| (lp(t) + lp(x - t)).exp(), w[0], w[1]).value;
                }
                2.0 * s
            };
            let lx = (x / beta).ln();
            mixing.expect(conditional, &[0.1 / lx, 1.0 / lx, 10.0 / lx], &outer)
        }
        _ => Err(Error::Unsupported(format!(
            "exact Pareto-mixture density implemented for n = 1, 2 only, got n = {n}"
        ))),
    }
}

/// Slope of `log f_1 - log f_2` against `log x` between `x_lo` and `x_hi`.
pub fn log_slope_difference(
    f1: impl Fn(f64) -> Result<f64>,
    f2: impl Fn(f64) -> Result<f64>,
    x_lo: f64,
    x_hi: f64,
) -> Result<f64> {
    let d = |x: f64| -> Result<f64> { Ok(f1(x)?.ln() - f2(x)?.ln()) };
    Ok((d(x_hi)? - d(x_lo)?) / (x_hi / x_lo).ln())
}
