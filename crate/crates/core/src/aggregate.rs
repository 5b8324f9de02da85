//! Distribution of the aggregate `S_n = X_1 + ... + X_n`.
//!
//! Conditionally on the frailty, `S_n` is `Gamma(n, Θ)`, so every quantity
//! reduces to derivatives of the frailty Laplace transform:
//! `f(x) = x^{n-1}/Γ(n) (-1)^n L^{(n)}(x)` and
//! `P(S_n > x) = Σ_{k<n} x^k/k! (-1)^k L^{(k)}(x)`.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::dependence::DependentVector;
use crate::error::{Error, Result};
use crate::mixing::{stable_coefficients, MixingDistribution, MixingKind};
use crate::mixture::{ComponentLaw, MixtureComponent, MixtureRepresentation};
use crate::numeric::log_sum_exp;
use crate::ruin_collective::lindley_sum_pdf;
use crate::specfun::{bell_table, falling_factorial, ln_factorial, sqrt_derivative_coefficient};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregateModel {
    pub vector: DependentVector,
}

impl AggregateModel {
    pub fn new(mixing: MixingDistribution, n: usize) -> Result<Self> {
        Ok(AggregateModel {
            vector: DependentVector::new(mixing, n)?,
        })
    }

    pub fn from_vector(vector: DependentVector) -> Self {
        AggregateModel { vector }
    }

    pub fn mixing(&self) -> &MixingDistribution {
        &self.vector.mixing
    }

    pub fn n(&self) -> usize {
        self.vector.n
    }

    fn order(&self) -> u32 {
        self.vector.n as u32
    }

    fn check_x(x: f64) -> Result<()> {
        if x.is_nan() {
            return Err(Error::param("x", "evaluation point is NaN"));
        }
        Ok(())
    }

    /// Density through the `n`-th Laplace derivative.
    pub fn pdf_generic(&self, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        if x < 0.0 || x.is_infinite() {
            return Ok(0.0);
        }
        if x == 0.0 {
            return self.pdf_at_zero();
        }
        let n = self.order();
        let d = self.mixing().laplace_derivative(n, x)?;
        let signed = if n.is_multiple_of(2) { d } else { -d };
        if !(signed > 0.0) {
            return Ok(0.0);
        }
        let nf = f64::from(n);
        Ok(((nf - 1.0) * x.ln() - ln_gamma(nf) + signed.ln()).exp())
    }

    /// Limit of the density at `0+`; [`Error::InfiniteDensity`] when it blows up.
    pub fn pdf_at_zero(&self) -> Result<f64> {
        let n = self.order();
        let infinite = Err(Error::InfiniteDensity { at: 0.0 });
        if self.mixing().moment(n).is_ok() {
            // f(x) ~ x^{n-1} E Θ^n / Γ(n)
            return if n == 1 { self.mixing().moment(1) } else { Ok(0.0) };
        }
        match self.mixing().kind() {
            MixingKind::BetaSecondKind { beta, gamma } => {
                // E[Θ^n e^{-xΘ}] ~ Γ(n-γ) x^{γ-n} C, so f ~ x^{γ-1}
                if n >= 2 && gamma > 1.0 {
                    Ok(0.0)
                } else if n >= 2 && gamma == 1.0 {
                    Ok(beta / f64::from(n - 1))
                } else {
                    infinite
                }
            }
            _ => infinite,
        }
    }

    /// Density from the kind-specific closed form.
    pub fn pdf_closed(&self, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        if matches!(self.mixing().kind(), MixingKind::BetaSecondKind { .. }) {
            return Err(Error::Unsupported(
                "no closed-form aggregate density for second-kind beta frailty".into(),
            ));
        }
        if x < 0.0 || x.is_infinite() {
            return Ok(0.0);
        }
        if x == 0.0 {
            return self.pdf_at_zero();
        }
        let n = self.order();
        let nf = f64::from(n);
        let lx = x.ln();
        Ok(match self.mixing().kind() {
            MixingKind::Gamma { shape, rate } => ComponentLaw::BetaSecondKind {
                shape1: nf,
                shape2: shape,
                scale: rate,
            }
            .pdf(x),
            MixingKind::GleserGamma { alpha, lambda } => {
                let terms: Vec<f64> = (0..n)
                    .map(|k| {
                        let kf = f64::from(k);
                        let ff = falling_factorial(alpha - 1.0, k);
                        if ff == 0.0 {
                            return f64::NEG_INFINITY;
                        }
                        ff.abs().ln() - ln_gamma(alpha) - ln_factorial(k) - ln_factorial(n - k - 1)
                            + lambda.ln()
                            + (nf + alpha - kf - 2.0) * (lambda * x).ln()
                    })
                    .collect();
                (log_sum_exp(&terms) - lambda * x).exp()
            }
            MixingKind::Levy { lambda } => {
                let terms: Vec<f64> = (0..n)
                    .map(|k| {
                        let kf = f64::from(k);
                        ln_factorial(2 * n - 2 - k) - ln_factorial(n - k - 1) - ln_factorial(k)
                            + kf * (2.0 * lambda).ln()
                            + 0.5 * (kf - 1.0) * lx
                    })
                    .collect();
                (lambda.ln() - (2.0 * nf - 1.0) * 2f64.ln() - ln_gamma(nf) + log_sum_exp(&terms) - lambda * x.sqrt())
                    .exp()
            }
            MixingKind::PositiveStable { alpha } => {
                let nu = n as usize;
                let args: Vec<f64> = (1..=n)
                    .map(|j| falling_factorial(alpha, j) * x.powf(alpha - f64::from(j)))
                    .collect();
                let row = &bell_table(nu, &args)[nu];
                let e = (-x.powf(alpha)).exp();
                let sum: f64 = (1..=nu)
                    .map(|k| {
                        let sign = if (nu + k).is_multiple_of(2) { 1.0 } else { -1.0 };
                        sign * e * row[k]
                    })
                    .sum();
                ((nf - 1.0) * lx - ln_gamma(nf)).exp() * sum
            }
            MixingKind::InverseGaussian { lambda, mu } => {
                let nu = n as usize;
                let b = 2.0 * mu * mu / lambda;
                let w = 1.0 + b * x;
                let bx = (lambda / mu) * (b * x / (w.sqrt() + 1.0));
                let args: Vec<f64> = (1..=n)
                    .map(|j| sqrt_derivative_coefficient(j) * b.powi(j as i32) * w.powf(0.5 - f64::from(j)))
                    .collect();
                let row = &bell_table(nu, &args)[nu];
                let sum: f64 = (1..=nu)
                    .map(|k| {
                        let sign = if (nu + k).is_multiple_of(2) { 1.0 } else { -1.0 };
                        sign * (lambda / mu).powi(k as i32) * (-bx).exp() * row[k]
                    })
                    .sum();
                ((nf - 1.0) * lx - ln_gamma(nf)).exp() * sum
            }
            MixingKind::Lindley { lambda } => lindley_sum_pdf(lambda, self.n(), x)?,
            MixingKind::BetaSecondKind { .. } => unreachable!(),
        })
    }

    /// Closed form where one exists, otherwise the derivative path.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        match self.pdf_closed(x) {
            Err(Error::Unsupported(_)) => self.pdf_generic(x),
            other => other,
        }
    }

    /// `P(S_n > x)`.
    pub fn survival(&self, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        if x <= 0.0 {
            return Ok(1.0);
        }
        if x.is_infinite() {
            return Ok(0.0);
        }
        let lx = x.ln();
        let mut total = 0.0;
        for k in 0..self.order() {
            let d = self.mixing().laplace_derivative(k, x)?;
            let signed = if k % 2 == 0 { d } else { -d };
            if signed > 0.0 {
                total += (f64::from(k) * lx - ln_factorial(k) + signed.ln()).exp();
            }
        }
        Ok(total.clamp(0.0, 1.0))
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        Ok(1.0 - self.survival(x)?)
    }

    /// `E S_n^r = Γ(n+r)/Γ(n) E Θ^{-r}`.
    pub fn moment(&self, r: u32) -> Result<f64> {
        if r == 0 {
            return Ok(1.0);
        }
        let nf = self.n() as f64;
        let rf = f64::from(r);
        Ok((ln_gamma(nf + rf) - ln_gamma(nf)).exp() * self.mixing().neg_moment(r)?)
    }

    pub fn mean(&self) -> Result<f64> {
        self.moment(1)
    }

    pub fn variance(&self) -> Result<f64> {
        let m1 = self.moment(1)?;
        Ok(self.moment(2)? - m1 * m1)
    }

    /// Finite mixture of standard families equal to the aggregate law.
    pub fn mixture_representation(&self) -> Result<MixtureRepresentation> {
        let n = self.order();
        let nf = f64::from(n);
        let comps = match self.mixing().kind() {
            MixingKind::Gamma { shape, rate } => vec![MixtureComponent {
                law: ComponentLaw::BetaSecondKind {
                    shape1: nf,
                    shape2: shape,
                    scale: rate,
                },
                weight: 1.0,
            }],
            MixingKind::GleserGamma { alpha, lambda } => (0..n)
                .map(|k| {
                    let shape = nf + alpha - f64::from(k) - 1.0;
                    let ff = falling_factorial(alpha - 1.0, k);
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    let mag = if ff == 0.0 {
                        0.0
                    } else {
                        (ff.abs().ln() + ln_gamma(shape) - ln_gamma(alpha) - ln_factorial(k) - ln_factorial(n - k - 1))
                            .exp()
                    };
                    MixtureComponent {
                        law: ComponentLaw::ClassicalGamma { shape, rate: lambda },
                        weight: sign * ff.signum() * mag,
                    }
                })
                .collect(),
            MixingKind::Levy { lambda } => (0..n)
                .map(|k| MixtureComponent {
                    law: ComponentLaw::SquareGamma {
                        shape: (f64::from(k) + 1.0) / 2.0,
                        rate: lambda,
                    },
                    weight: (ln_factorial(2 * n - k - 2)
                        - ln_factorial(n - k - 1)
                        - ln_gamma(nf)
                        - f64::from(2 * n - k - 2) * 2f64.ln())
                    .exp(),
                })
                .collect(),
            MixingKind::PositiveStable { alpha } => {
                let c = stable_coefficients(alpha, n);
                (1..=n)
                    .map(|j| {
                        let jf = f64::from(j);
                        MixtureComponent {
                            law: ComponentLaw::GeneralizedGamma {
                                power: alpha,
                                eta: jf,
                                scale: 1.0,
                            },
                            weight: c[j as usize] * (ln_gamma(jf) - ln_gamma(nf)).exp() / alpha,
                        }
                    })
                    .collect()
            }
            other => {
                return Err(Error::Unsupported(format!(
                    "no finite mixture representation for {other:?}"
                )))
            }
        };
        Ok(MixtureRepresentation::new(comps))
    }
}

/// Weighted sum of component moments.
pub fn moment_from_mixture(rep: &MixtureRepresentation, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::param("r", format!("moment order must be >= 0, got {r}")));
    }
    if r == 0.0 {
        return Ok(1.0);
    }
    rep.moment(r)
}
