//! Frailty laws Θ: Laplace transforms and their derivatives, copula
//! generators, moments, densities and exact samplers.

use std::f64::consts::PI;
use std::fmt;

use rand::Rng;
use rand_distr::{Beta, Distribution, Exp1, Gamma, InverseGaussian, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::beta::ln_beta;
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};
use crate::numeric::{bracket_decreasing, breakpoints, brent, log_sum_exp, Integrator};
use crate::specfun::{
    bell_table, binomial, falling_factorial, gamma_q, gamma_upper_quantile, kummer_u_integral, ln_bessel_k_half,
    sqrt_derivative_coefficient,
};

/// Highest derivative order the closed-form paths will evaluate.
pub const DERIVATIVE_CAP: u32 = 64;

/// The supported frailty families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MixingKind {
    /// Gamma with shape `shape` and rate `rate`; `L(s) = (1 + s/rate)^{-shape}`.
    Gamma { shape: f64, rate: f64 },
    /// One-sided 1/2-stable law; `L(s) = exp(-λ √s)`.
    Levy { lambda: f64 },
    /// One-sided α-stable law; `L(s) = exp(-s^α)`, α in (0, 1].
    PositiveStable { alpha: f64 },
    /// Inverse Gaussian with shape `lambda` and mean `mu`.
    InverseGaussian { lambda: f64, mu: f64 },
    /// Lindley law, a mixture of Exp(λ) and Gamma(2, λ).
    Lindley { lambda: f64 },
    /// Mixing law that turns exponentials into Gamma(α, λ) claims, α in (0, 1].
    GleserGamma { alpha: f64, lambda: f64 },
    /// Ratio `G_beta / G_gamma` of independent unit gammas.
    BetaSecondKind { beta: f64, gamma: f64 },
}

/// A validated frailty distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixingDistribution {
    kind: MixingKind,
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be positive and finite, got {v}")))
    }
}

fn unit_closed(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must lie in (0, 1], got {v}")))
    }
}

impl fmt::Display for MixingDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            MixingKind::Gamma { shape, rate } => write!(f, "Gamma(shape={shape}, rate={rate})"),
            MixingKind::Levy { lambda } => write!(f, "Levy(lambda={lambda})"),
            MixingKind::PositiveStable { alpha } => write!(f, "PositiveStable(alpha={alpha})"),
            MixingKind::InverseGaussian { lambda, mu } => {
                write!(f, "InverseGaussian(lambda={lambda}, mu={mu})")
            }
            MixingKind::Lindley { lambda } => write!(f, "Lindley(lambda={lambda})"),
            MixingKind::GleserGamma { alpha, lambda } => {
                write!(f, "GleserGamma(alpha={alpha}, lambda={lambda})")
            }
            MixingKind::BetaSecondKind { beta, gamma } => {
                write!(f, "BetaSecondKind(beta={beta}, gamma={gamma})")
            }
        }
    }
}

// Lower support edge, exponent e and smooth factor h with f(θ) = (θ - lo)^e h(θ)
// near the edge. Only used when e < 0.
struct EdgeForm {
    lo: f64,
    exponent: f64,
    scale: f64,
}

impl MixingDistribution {
    pub fn new(kind: MixingKind) -> Result<Self> {
        match kind {
            MixingKind::Gamma { shape, rate } => {
                positive("shape", shape)?;
                positive("rate", rate)?;
            }
            MixingKind::Levy { lambda } | MixingKind::Lindley { lambda } => {
                positive("lambda", lambda)?;
            }
            MixingKind::PositiveStable { alpha } => unit_closed("alpha", alpha)?,
            MixingKind::InverseGaussian { lambda, mu } => {
                positive("lambda", lambda)?;
                positive("mu", mu)?;
            }
            MixingKind::GleserGamma { alpha, lambda } => {
                unit_closed("alpha", alpha)?;
                positive("lambda", lambda)?;
            }
            MixingKind::BetaSecondKind { beta, gamma } => {
                positive("beta", beta)?;
                positive("gamma", gamma)?;
            }
        }
        Ok(MixingDistribution { kind })
    }

    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        Self::new(MixingKind::Gamma { shape, rate })
    }
    pub fn levy(lambda: f64) -> Result<Self> {
        Self::new(MixingKind::Levy { lambda })
    }
    pub fn positive_stable(alpha: f64) -> Result<Self> {
        Self::new(MixingKind::PositiveStable { alpha })
    }
    pub fn inverse_gaussian(lambda: f64, mu: f64) -> Result<Self> {
        Self::new(MixingKind::InverseGaussian { lambda, mu })
    }
    pub fn lindley(lambda: f64) -> Result<Self> {
        Self::new(MixingKind::Lindley { lambda })
    }
    pub fn gleser_gamma(alpha: f64, lambda: f64) -> Result<Self> {
        Self::new(MixingKind::GleserGamma { alpha, lambda })
    }
    pub fn beta_second_kind(beta: f64, gamma: f64) -> Result<Self> {
        Self::new(MixingKind::BetaSecondKind { beta, gamma })
    }

    pub fn kind(&self) -> MixingKind {
        self.kind
    }

    /// True when Θ is a point mass (stable α = 1, Gleser α = 1).
    pub fn is_degenerate(&self) -> bool {
        matches!(
            self.kind,
            MixingKind::PositiveStable { alpha } | MixingKind::GleserGamma { alpha, .. } if alpha == 1.0
        )
    }

    /// `L(s) = E e^{-sΘ}`.
    pub fn laplace(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::param("s", format!("Laplace argument must be >= 0, got {s}")));
        }
        if s.is_infinite() {
            return Ok(0.0);
        }
        Ok(match self.kind {
            MixingKind::Gamma { shape, rate } => (-shape * (s / rate).ln_1p()).exp(),
            MixingKind::Levy { lambda } => (-lambda * s.sqrt()).exp(),
            MixingKind::PositiveStable { alpha } => (-s.powf(alpha)).exp(),
            MixingKind::InverseGaussian { lambda, mu } => {
                let b = 2.0 * mu * mu / lambda;
                // sqrt(1 + bs) - 1 without cancellation
                let a = b * s / ((1.0 + b * s).sqrt() + 1.0);
                (-(lambda / mu) * a).exp()
            }
            MixingKind::Lindley { lambda } => {
                let d = lambda + s;
                lambda * lambda * (lambda + 1.0 + s) / ((1.0 + lambda) * d * d)
            }
            MixingKind::GleserGamma { alpha, lambda } => gamma_q(alpha, lambda * s),
            MixingKind::BetaSecondKind { beta, gamma } => {
                if s == 0.0 {
                    1.0
                } else {
                    kummer_u_integral(beta, 1.0 - gamma, s)? / ln_beta(beta, gamma).exp()
                }
            }
        })
    }

    fn check_order(n: u32, s: f64) -> Result<()> {
        if n > DERIVATIVE_CAP {
            return Err(Error::DerivativeCapExceeded {
                order: n,
                cap: DERIVATIVE_CAP,
            });
        }
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::param("s", format!("derivative argument must be > 0, got {s}")));
        }
        Ok(())
    }

    /// `d^n/ds^n L(s)` from the kind-specific closed form.
    ///
    /// Routes: gamma ratio (Gamma), Leibniz sum (Gleser), half-integer Bessel K
    /// (Lévy, inverse Gaussian), coefficient recurrence (stable), partial
    /// fractions (Lindley), Kummer U integral (second-kind beta).
    pub fn laplace_derivative(&self, n: u32, s: f64) -> Result<f64> {
        if n == 0 {
            return self.laplace(s);
        }
        Self::check_order(n, s)?;
        let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        let nf = f64::from(n);
        let magnitude = match self.kind {
            MixingKind::Gamma { shape, rate } => {
                (ln_gamma(shape + nf) - ln_gamma(shape) - nf * rate.ln() - (shape + nf) * (s / rate).ln_1p()).exp()
            }
            MixingKind::GleserGamma { alpha, lambda } => {
                let terms: Vec<f64> = (0..n)
                    .map(|k| {
                        let kf = f64::from(k);
                        binomial(n - 1, k).ln()
                            + (nf - 1.0 - kf) * lambda.ln()
                            + falling_factorial(alpha - 1.0, k).abs().ln()
                            + (alpha - 1.0 - kf) * s.ln()
                    })
                    .collect();
                (alpha * lambda.ln() - ln_gamma(alpha) - lambda * s + log_sum_exp(&terms)).exp()
            }
            MixingKind::Levy { lambda } => {
                let order = nf - 0.5;
                (lambda.ln() - 0.5 * PI.ln()
                    + 0.5 * order * (lambda * lambda / (4.0 * s)).ln()
                    + ln_bessel_k_half(n - 1, lambda * s.sqrt())?)
                .exp()
            }
            MixingKind::InverseGaussian { lambda, mu } => {
                let a = lambda / (mu * mu) + 2.0 * s;
                let order = nf - 0.5;
                (0.5 * (lambda / (2.0 * PI)).ln()
                    + lambda / mu
                    + 2f64.ln()
                    + 0.5 * order * (lambda / a).ln()
                    + ln_bessel_k_half(n - 1, (lambda * a).sqrt())?)
                .exp()
            }
            MixingKind::PositiveStable { alpha } => {
                let c = stable_coefficients(alpha, n);
                let ls = s.ln();
                let terms: Vec<f64> = (1..=n as usize)
                    .map(|j| c[j].ln() + (j as f64 * alpha - nf) * ls)
                    .collect();
                (log_sum_exp(&terms) - s.powf(alpha)).exp()
            }
            MixingKind::Lindley { lambda } => {
                let d = lambda + s;
                let lf = ln_gamma(nf + 1.0);
                let c = 2.0 * lambda.ln() - lambda.ln_1p();
                (c + lf - (nf + 1.0) * d.ln()).exp() + (c + lf + nf.ln_1p() - (nf + 2.0) * d.ln()).exp()
            }
            MixingKind::BetaSecondKind { beta, gamma } => {
                kummer_u_integral(beta + nf, nf + 1.0 - gamma, s)? / ln_beta(beta, gamma).exp()
            }
        };
        Ok(sign * magnitude)
    }

    /// Independent derivative path: Faà di Bruno over partial Bell polynomials
    /// for the composite transforms, a product rule for Lindley and the
    /// expanded mixing integral for the Gleser law.
    pub fn laplace_derivative_generic(&self, n: u32, s: f64) -> Result<f64> {
        if n == 0 {
            return self.laplace(s);
        }
        Self::check_order(n, s)?;
        let nu = n as usize;
        let nf = f64::from(n);
        match self.kind {
            MixingKind::Gamma { shape, rate } => {
                // f(u) = u^{-shape}, g(s) = 1 + s/rate
                let u = 1.0 + s / rate;
                let f: Vec<f64> = (1..=n)
                    .map(|k| falling_factorial(-shape, k) * u.powf(-shape - f64::from(k)))
                    .collect();
                let mut g = vec![0.0; nu];
                g[0] = 1.0 / rate;
                let row = bell_table(nu, &g);
                Ok((1..=nu).map(|k| f[k - 1] * row[nu][k]).sum())
            }
            MixingKind::Levy { lambda } => {
                // f(u) = e^{-λu}, g(s) = √s; B_{n,k}(a_j s^{1/2-j}) = s^{k/2-n} B_{n,k}(a)
                let a: Vec<f64> = (1..=n).map(sqrt_derivative_coefficient).collect();
                let row = bell_table(nu, &a);
                let e = (-lambda * s.sqrt()).exp();
                let sum: f64 = (1..=nu)
                    .map(|k| (-lambda).powi(k as i32) * s.powf(k as f64 / 2.0) * row[nu][k])
                    .sum();
                Ok(e * sum * s.powf(-nf))
            }
            MixingKind::PositiveStable { alpha } => {
                // f(u) = e^{-u}, g(s) = s^α; g^{(j)} = (α)_j s^{α-j}
                let a: Vec<f64> = (1..=n).map(|j| falling_factorial(alpha, j)).collect();
                let row = bell_table(nu, &a);
                let e = (-s.powf(alpha)).exp();
                let sum: f64 = (1..=nu)
                    .map(|k| {
                        let sg = if k % 2 == 0 { 1.0 } else { -1.0 };
                        sg * s.powf(k as f64 * alpha) * row[nu][k]
                    })
                    .sum();
                Ok(e * sum * s.powf(-nf))
            }
            MixingKind::InverseGaussian { lambda, mu } => {
                // f(u) = e^{-(λ/μ)u}, g(s) = √(1+bs) - 1
                let b = 2.0 * mu * mu / lambda;
                let c = lambda / mu;
                let w = 1.0 + b * s;
                let a: Vec<f64> = (1..=n).map(sqrt_derivative_coefficient).collect();
                let row = bell_table(nu, &a);
                let e = self.laplace(s)?;
                let sum: f64 = (1..=nu)
                    .map(|k| (-c).powi(k as i32) * w.powf(k as f64 / 2.0) * row[nu][k])
                    .sum();
                Ok(e * sum * (b / w).powi(n as i32))
            }
            MixingKind::Lindley { lambda } => {
                // λ²/(1+λ) · (λ+1+s) · (λ+s)^{-2}, product rule
                let d = lambda + s;
                let q = |k: u32| {
                    let kf = f64::from(k);
                    let sg = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
                    sg * gamma(kf + 2.0) * d.powf(-2.0 - kf)
                };
                let c = lambda * lambda / (1.0 + lambda);
                Ok(c * ((lambda + 1.0 + s) * q(n) + nf * q(n - 1)))
            }
            MixingKind::GleserGamma { alpha, lambda } => {
                let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
                if alpha == 1.0 {
                    return Ok(sign * lambda.powi(n as i32) * (-lambda * s).exp());
                }
                // E Θ^n e^{-sΘ} with (θ)^{n-1} = (u + λ)^{n-1} expanded, θ = λ + u
                let sum: f64 = (0..n)
                    .map(|k| {
                        let kf = f64::from(k);
                        binomial(n - 1, k)
                            * lambda.powf(nf - 1.0 - kf)
                            * gamma(kf + 1.0 - alpha)
                            * s.powf(alpha - kf - 1.0)
                    })
                    .sum();
                let c = lambda.powf(alpha) / (gamma(1.0 - alpha) * gamma(alpha));
                Ok(sign * c * (-lambda * s).exp() * sum)
            }
            MixingKind::BetaSecondKind { .. } => Err(Error::Unsupported(
                "no composite derivative path for the second-kind beta law".into(),
            )),
        }
    }

    /// Archimedean generator `φ = L^{-1}`.
    pub fn generator(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) || t > 1.0 {
            return Err(Error::param(
                "t",
                format!("generator argument must lie in (0, 1], got {t}"),
            ));
        }
        if t == 0.0 {
            return Err(Error::Divergent("generator is infinite at t = 0".into()));
        }
        if t == 1.0 {
            return Ok(0.0);
        }
        let lt = t.ln();
        Ok(match self.kind {
            MixingKind::Gamma { shape, rate } => rate * (-lt / shape).exp_m1(),
            MixingKind::GleserGamma { alpha, lambda } => {
                if alpha == 1.0 {
                    -lt / lambda
                } else {
                    gamma_upper_quantile(alpha, t)? / lambda
                }
            }
            MixingKind::Levy { lambda } => (lt / lambda).powi(2),
            MixingKind::PositiveStable { alpha } => (-lt).powf(1.0 / alpha),
            MixingKind::InverseGaussian { lambda, mu } => {
                let r = -(mu / lambda) * lt;
                lambda / (2.0 * mu * mu) * r * (2.0 + r)
            }
            MixingKind::Lindley { .. } | MixingKind::BetaSecondKind { .. } => {
                let g = |s: f64| self.laplace(s).map(f64::ln).unwrap_or(f64::NAN) - lt;
                let (lo, hi) = bracket_decreasing(g, 1.0)?;
                brent(g, lo, hi, 1e-15, 0.0)?
            }
        })
    }

    /// `E Θ^{-r}`.
    pub fn neg_moment(&self, r: u32) -> Result<f64> {
        if r == 0 {
            return Ok(1.0);
        }
        let rf = f64::from(r);
        let missing = |reason: String| Error::NonexistentMoment { order: -rf, reason };
        match self.kind {
            MixingKind::Gamma { shape, rate } => {
                if rf >= shape {
                    return Err(missing(format!("E Θ^-{r} needs shape > {r}, got {shape}")));
                }
                Ok(rate.powi(r as i32) / rising(shape - rf, r))
            }
            MixingKind::InverseGaussian { mu, .. } => Ok(self.moment(r + 1)? / mu.powi(2 * r as i32 + 1)),
            MixingKind::Lindley { .. } => Err(missing(
                "Lindley density is positive at θ = 0, so E Θ^-r is infinite for r >= 1".into(),
            )),
            MixingKind::GleserGamma { alpha, lambda } => {
                Ok(rising(alpha, r) / (rising(1.0, r) * lambda.powi(r as i32)))
            }
            MixingKind::PositiveStable { alpha } => Ok((ln_gamma(1.0 + rf / alpha) - ln_gamma(1.0 + rf)).exp()),
            MixingKind::Levy { lambda } => Ok(rising(1.0 + rf, r) / lambda.powi(2 * r as i32)),
            MixingKind::BetaSecondKind { beta, gamma } => {
                if rf >= beta {
                    return Err(missing(format!("E Θ^-{r} needs beta > {r}, got {beta}")));
                }
                Ok(rising(gamma, r) / rising(beta - rf, r))
            }
        }
    }

    /// `E Θ^r` for positive integer `r`.
    pub fn moment(&self, r: u32) -> Result<f64> {
        if r == 0 {
            return Ok(1.0);
        }
        let rf = f64::from(r);
        let missing = |reason: String| Error::NonexistentMoment { order: rf, reason };
        match self.kind {
            MixingKind::Gamma { shape, rate } => Ok(rising(shape, r) / rate.powi(r as i32)),
            MixingKind::InverseGaussian { lambda, mu } => {
                let mut sum = 0.0;
                for s in 0..r {
                    let sf = f64::from(s);
                    let c = (ln_gamma(rf + sf) - ln_gamma(sf + 1.0) - ln_gamma(rf - sf)).exp();
                    sum += c * (2.0 * lambda / mu).powf(-sf);
                }
                Ok(mu.powi(r as i32) * sum)
            }
            MixingKind::Lindley { lambda } => Ok(lambda * lambda / (1.0 + lambda)
                * (gamma(rf + 1.0) / lambda.powf(rf + 1.0) + gamma(rf + 2.0) / lambda.powf(rf + 2.0))),
            MixingKind::GleserGamma { alpha, lambda } => {
                if alpha == 1.0 {
                    Ok(lambda.powf(rf))
                } else {
                    Err(missing(format!("E Θ^{r} is infinite for alpha < 1")))
                }
            }
            MixingKind::PositiveStable { alpha } => {
                if alpha == 1.0 {
                    Ok(1.0)
                } else {
                    Err(missing("stable law with alpha < 1 has no positive moments".into()))
                }
            }
            MixingKind::Levy { .. } => Err(missing("Lévy law has no moments of order >= 1/2".into())),
            MixingKind::BetaSecondKind { beta, gamma } => {
                if rf >= gamma {
                    return Err(missing(format!("E Θ^{r} needs gamma > {r}, got {gamma}")));
                }
                Ok(rising(beta, r) / rising(gamma - rf, r))
            }
        }
    }

    /// Whether Θ has a Lebesgue density usable for quadrature.
    pub fn has_density(&self) -> bool {
        !matches!(self.kind, MixingKind::PositiveStable { .. }) && !self.is_degenerate()
    }

    /// Density `f_Θ(θ)`.
    pub fn density(&self, theta: f64) -> Result<f64> {
        if !self.has_density() {
            return Err(Error::Unsupported(format!("{self} has no usable density")));
        }
        if !(theta > 0.0) || theta.is_infinite() {
            return Ok(0.0);
        }
        let th = theta;
        Ok(match self.kind {
            MixingKind::Gamma { shape, rate } => {
                (shape * rate.ln() + (shape - 1.0) * th.ln() - rate * th - ln_gamma(shape)).exp()
            }
            MixingKind::Levy { lambda } => {
                lambda / (2.0 * PI.sqrt()) * th.powf(-1.5) * (-lambda * lambda / (4.0 * th)).exp()
            }
            MixingKind::InverseGaussian { lambda, mu } => {
                (lambda / (2.0 * PI)).sqrt()
                    * th.powf(-1.5)
                    * (-lambda * (th - mu).powi(2) / (2.0 * mu * mu * th)).exp()
            }
            MixingKind::Lindley { lambda } => lambda * lambda / (1.0 + lambda) * (1.0 + th) * (-lambda * th).exp(),
            MixingKind::GleserGamma { alpha, lambda } => {
                if th <= lambda {
                    0.0
                } else {
                    (th - lambda).powf(-alpha) * lambda.powf(alpha) / (th * gamma(1.0 - alpha) * gamma(alpha))
                }
            }
            MixingKind::BetaSecondKind { beta, gamma } => {
                ((beta - 1.0) * th.ln() - (beta + gamma) * th.ln_1p() - ln_beta(beta, gamma)).exp()
            }
            MixingKind::PositiveStable { .. } => unreachable!(),
        })
    }

    // f(θ) / (θ - lo)^e near a singular lower edge.
    fn edge_form(&self) -> Option<EdgeForm> {
        match self.kind {
            MixingKind::Gamma { shape, rate } if shape < 1.0 => Some(EdgeForm {
                lo: 0.0,
                exponent: shape - 1.0,
                scale: shape.max(0.05) / rate,
            }),
            MixingKind::GleserGamma { alpha, lambda } if alpha < 1.0 => Some(EdgeForm {
                lo: lambda,
                exponent: -alpha,
                scale: lambda,
            }),
            MixingKind::BetaSecondKind { beta, .. } if beta < 1.0 => Some(EdgeForm {
                lo: 0.0,
                exponent: beta - 1.0,
                scale: 1.0,
            }),
            _ => None,
        }
    }

    fn edge_smooth(&self, theta: f64) -> f64 {
        match self.kind {
            MixingKind::Gamma { shape, rate } => (shape * rate.ln() - rate * theta - ln_gamma(shape)).exp(),
            MixingKind::GleserGamma { alpha, lambda } => {
                lambda.powf(alpha) / (theta * gamma(1.0 - alpha) * gamma(alpha))
            }
            MixingKind::BetaSecondKind { beta, gamma } => {
                (-(beta + gamma) * theta.ln_1p() - ln_beta(beta, gamma)).exp()
            }
            _ => f64::NAN,
        }
    }

    // Natural length scales of the density, used as quadrature breakpoints.
    fn scales(&self) -> Vec<f64> {
        match self.kind {
            MixingKind::Gamma { shape, rate } => {
                let m = shape / rate;
                let sd = shape.sqrt() / rate;
                vec![m, m + 3.0 * sd, m + 10.0 * sd, (m - 2.0 * sd).max(0.0)]
            }
            MixingKind::Levy { lambda } => {
                let m = lambda * lambda / 6.0;
                vec![m * 0.2, m, m * 10.0, m * 1e3]
            }
            MixingKind::InverseGaussian { lambda, mu } => {
                let sd = (mu.powi(3) / lambda).sqrt();
                vec![mu * 0.1, mu, mu + 3.0 * sd, mu + 20.0 * sd]
            }
            MixingKind::Lindley { lambda } => vec![1.0 / lambda, 5.0 / lambda, 30.0 / lambda],
            MixingKind::GleserGamma { lambda, .. } => vec![2.0 * lambda, 10.0 * lambda, 100.0 * lambda],
            MixingKind::BetaSecondKind { .. } => vec![1.0, 10.0, 100.0],
            MixingKind::PositiveStable { .. } => vec![1.0],
        }
    }

    /// `E g(Θ)` by adaptive quadrature against the density; `hints` are extra
    /// breakpoints where `g` varies quickly.
    pub fn expect<G: Fn(f64) -> f64>(&self, g: G, hints: &[f64], q: &Integrator) -> Result<f64> {
        if self.is_degenerate() {
            let point = match self.kind {
                MixingKind::GleserGamma { lambda, .. } => lambda,
                _ => 1.0,
            };
            return Ok(g(point));
        }
        if !self.has_density() {
            return Err(Error::Unsupported(format!("{self} has no usable density")));
        }
        let mut interior = self.scales();
        interior.extend_from_slice(hints);
        match self.edge_form() {
            Some(edge) => {
                let e1 = edge.exponent + 1.0;
                let c = edge.scale;
                let head = q.integrate(
                    |u: f64| {
                        let th = edge.lo + c * u.powf(1.0 / e1);
                        g(th) * self.edge_smooth(th)
                    },
                    0.0,
                    1.0,
                );
                let head = head.require("mixing expectation near the support edge")? * c.powf(e1) / e1;
                let pts = breakpoints(edge.lo + c, &interior);
                let tail = q
                    .integrate_pieces(|th| g(th) * self.density(th).unwrap_or(0.0), &pts)
                    .require("mixing expectation")?;
                Ok(head + tail)
            }
            None => {
                let lo = match self.kind {
                    MixingKind::GleserGamma { lambda, .. } => lambda,
                    _ => 0.0,
                };
                let pts = breakpoints(lo, &interior);
                q.integrate_pieces(|th| g(th) * self.density(th).unwrap_or(0.0), &pts)
                    .require("mixing expectation")
            }
        }
    }

    /// A reusable exact sampler for Θ.
    pub fn sampler(&self) -> ThetaSampler {
        let inner = match self.kind {
            MixingKind::Gamma { shape, rate } => SamplerInner::Gamma(Gamma::new(shape, 1.0 / rate).expect("validated")),
            MixingKind::Levy { lambda } => SamplerInner::Levy { lambda },
            MixingKind::PositiveStable { alpha } => SamplerInner::Stable { alpha },
            MixingKind::InverseGaussian { lambda, mu } => {
                SamplerInner::InverseGaussian(InverseGaussian::new(mu, lambda).expect("validated"))
            }
            MixingKind::Lindley { lambda } => SamplerInner::Lindley {
                lambda,
                second: Gamma::new(2.0, 1.0 / lambda).expect("validated"),
            },
            MixingKind::GleserGamma { alpha, lambda } => {
                if alpha == 1.0 {
                    SamplerInner::Point(lambda)
                } else {
                    SamplerInner::Gleser {
                        lambda,
                        beta: Beta::new(alpha, 1.0 - alpha).expect("validated"),
                    }
                }
            }
            MixingKind::BetaSecondKind { beta, gamma } => SamplerInner::Ratio {
                num: Gamma::new(beta, 1.0).expect("validated"),
                den: Gamma::new(gamma, 1.0).expect("validated"),
            },
        };
        ThetaSampler { inner }
    }

    /// One draw of Θ.
    pub fn sample_theta<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sampler().sample(rng)
    }
}

/// `a (a + 1) ... (a + r - 1)`.
fn rising(a: f64, r: u32) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (a + f64::from(i)))
}

/// Coefficients `c_{n,j}` (index 0 unused) with
/// `(-1)^n d^n/ds^n e^{-s^α} = e^{-s^α} Σ_j c_{n,j} s^{jα - n}`.
pub fn stable_coefficients(alpha: f64, n: u32) -> Vec<f64> {
    let n = n as usize;
    let mut c = vec![0.0; n + 1];
    if n == 0 {
        return c;
    }
    c[1] = alpha;
    for m in 1..n {
        let mut next = vec![0.0; n + 1];
        for j in 1..=m + 1 {
            let from_lower = if j >= 2 { alpha * c[j - 1] } else { 0.0 };
            let same = if j <= m {
                (m as f64 - j as f64 * alpha) * c[j]
            } else {
                0.0
            };
            next[j] = from_lower + same;
        }
        c = next;
    }
    c
}

#[derive(Debug, Clone)]
enum SamplerInner {
    Gamma(Gamma<f64>),
    Levy { lambda: f64 },
    Stable { alpha: f64 },
    InverseGaussian(InverseGaussian<f64>),
    Lindley { lambda: f64, second: Gamma<f64> },
    Gleser { lambda: f64, beta: Beta<f64> },
    Point(f64),
    Ratio { num: Gamma<f64>, den: Gamma<f64> },
}

/// Exact sampler for a frailty law.
#[derive(Debug, Clone)]
pub struct ThetaSampler {
    inner: SamplerInner,
}

impl Distribution<f64> for ThetaSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.inner {
            SamplerInner::Gamma(g) => g.sample(rng),
            SamplerInner::Levy { lambda } => {
                let z: f64 = rng.sample(StandardNormal);
                lambda * lambda / (2.0 * z * z)
            }
            SamplerInner::Stable { alpha } => {
                let alpha = *alpha;
                if alpha == 1.0 {
                    return 1.0;
                }
                // Kanter's representation
                let u = PI * open_unit(rng);
                let e: f64 = rng.sample(Exp1);
                let a = (alpha * u).sin() / u.sin().powf(1.0 / alpha);
                let b = (((1.0 - alpha) * u).sin() / e).powf((1.0 - alpha) / alpha);
                a * b
            }
            SamplerInner::InverseGaussian(d) => d.sample(rng),
            SamplerInner::Lindley { lambda, second } => {
                if rng.random::<f64>() < lambda / (1.0 + lambda) {
                    let e: f64 = rng.sample(Exp1);
                    e / lambda
                } else {
                    second.sample(rng)
                }
            }
            SamplerInner::Gleser { lambda, beta } => {
                let b: f64 = beta.sample(rng);
                lambda / b.max(f64::MIN_POSITIVE)
            }
            SamplerInner::Point(v) => *v,
            SamplerInner::Ratio { num, den } => num.sample(rng) / den.sample(rng),
        }
    }
}

fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}
