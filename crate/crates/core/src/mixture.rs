//! Finite mixtures of the component families that appear in the closed-form
//! aggregate densities.

use serde::{Deserialize, Serialize};
use statrs::function::beta::{checked_beta_reg, ln_beta};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::specfun::gamma_q;

/// A component family with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ComponentLaw {
    /// Gamma with shape and rate.
    ClassicalGamma { shape: f64, rate: f64 },
    /// `√X ~ Gamma(2 shape, rate)`; density `rate^{2a} x^{a-1} e^{-rate √x} / (2Γ(2a))`.
    SquareGamma { shape: f64, rate: f64 },
    /// `(X/scale)^power ~ Gamma(eta, 1)`.
    GeneralizedGamma { power: f64, eta: f64, scale: f64 },
    /// `X/scale = G_{shape1} / G_{shape2}`.
    BetaSecondKind { shape1: f64, shape2: f64, scale: f64 },
}

fn reg_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    checked_beta_reg(a, b, x).unwrap_or(f64::NAN)
}

impl ComponentLaw {
    pub fn pdf(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 0.0;
        }
        let lx = x.ln();
        match *self {
            ComponentLaw::ClassicalGamma { shape, rate } => {
                (shape * rate.ln() + (shape - 1.0) * lx - rate * x - ln_gamma(shape)).exp()
            }
            ComponentLaw::SquareGamma { shape, rate } => {
                (2.0 * shape * rate.ln() + (shape - 1.0) * lx - rate * x.sqrt() - 2f64.ln() - ln_gamma(2.0 * shape))
                    .exp()
            }
            ComponentLaw::GeneralizedGamma { power, eta, scale } => {
                let z = (x / scale).powf(power);
                (power.ln() + (power * eta - 1.0) * lx - power * eta * scale.ln() - z - ln_gamma(eta)).exp()
            }
            ComponentLaw::BetaSecondKind { shape1, shape2, scale } => ((shape1 - 1.0) * lx
                - shape1 * scale.ln()
                - ln_beta(shape1, shape2)
                - (shape1 + shape2) * (x / scale).ln_1p())
            .exp(),
        }
    }

    pub fn survival(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 1.0;
        }
        match *self {
            ComponentLaw::ClassicalGamma { shape, rate } => gamma_q(shape, rate * x),
            ComponentLaw::SquareGamma { shape, rate } => gamma_q(2.0 * shape, rate * x.sqrt()),
            ComponentLaw::GeneralizedGamma { power, eta, scale } => gamma_q(eta, (x / scale).powf(power)),
            ComponentLaw::BetaSecondKind { shape1, shape2, scale } => {
                let z = x / scale;
                reg_beta(shape2, shape1, 1.0 / (1.0 + z))
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        1.0 - self.survival(x)
    }

    /// `E X^r` for real `r >= 0`.
    pub fn moment(&self, r: f64) -> Result<f64> {
        if r == 0.0 {
            return Ok(1.0);
        }
        match *self {
            ComponentLaw::ClassicalGamma { shape, rate } => {
                Ok((ln_gamma(shape + r) - ln_gamma(shape) - r * rate.ln()).exp())
            }
            ComponentLaw::SquareGamma { shape, rate } => {
                Ok((ln_gamma(2.0 * shape + 2.0 * r) - ln_gamma(2.0 * shape) - 2.0 * r * rate.ln()).exp())
            }
            ComponentLaw::GeneralizedGamma { power, eta, scale } => {
                Ok((r * scale.ln() + ln_gamma(eta + r / power) - ln_gamma(eta)).exp())
            }
            ComponentLaw::BetaSecondKind { shape1, shape2, scale } => {
                if r >= shape2 {
                    return Err(Error::NonexistentMoment {
                        order: r,
                        reason: format!("second-kind beta component needs shape2 > {r}, got {shape2}"),
                    });
                }
                Ok(
                    (r * scale.ln() + ln_gamma(shape1 + r) + ln_gamma(shape2 - r)
                        - ln_gamma(shape1)
                        - ln_gamma(shape2))
                    .exp(),
                )
            }
        }
    }

    /// Upper incomplete moment `E[X^r; X > a] = ∫_a^∞ x^r f(x) dx`.
    pub fn upper_moment(&self, r: f64, a: f64) -> Result<f64> {
        let full = self.moment(r)?;
        if !(a > 0.0) {
            return Ok(full);
        }
        // each family's size-biased law stays in the same family
        let frac = match *self {
            ComponentLaw::ClassicalGamma { shape, rate } => gamma_q(shape + r, rate * a),
            ComponentLaw::SquareGamma { shape, rate } => gamma_q(2.0 * shape + 2.0 * r, rate * a.sqrt()),
            ComponentLaw::GeneralizedGamma { power, eta, scale } => gamma_q(eta + r / power, (a / scale).powf(power)),
            ComponentLaw::BetaSecondKind { shape1, shape2, scale } => {
                reg_beta(shape2 - r, shape1 + r, 1.0 / (1.0 + a / scale))
            }
        };
        Ok(full * frac)
    }
}

/// One weighted component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub law: ComponentLaw,
    pub weight: f64,
}

/// Finite mixture `Σ w_k f_k`. Weights may be negative; only the summed
/// density has to be non-negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureRepresentation {
    pub components: Vec<MixtureComponent>,
}

impl MixtureRepresentation {
    pub fn new(components: Vec<MixtureComponent>) -> Self {
        MixtureRepresentation { components }
    }

    pub fn weight_sum(&self) -> f64 {
        self.components.iter().map(|c| c.weight).sum()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.components.iter().map(|c| c.weight * c.law.pdf(x)).sum()
    }

    pub fn survival(&self, x: f64) -> f64 {
        self.components.iter().map(|c| c.weight * c.law.survival(x)).sum()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.components.iter().map(|c| c.weight * c.law.cdf(x)).sum()
    }

    /// `E X^r = Σ w_k E X_k^r`.
    pub fn moment(&self, r: f64) -> Result<f64> {
        let mut s = 0.0;
        for c in &self.components {
            s += c.weight * c.law.moment(r)?;
        }
        Ok(s)
    }

    /// `Σ w_k E[X_k^r; X_k > a]`.
    pub fn upper_moment(&self, r: f64, a: f64) -> Result<f64> {
        let mut s = 0.0;
        for c in &self.components {
            s += c.weight * c.law.upper_moment(r, a)?;
        }
        Ok(s)
    }
}
