//! Lindley frailty: sum density, mixed ruin probability and compound
//! (collective risk) total-claim densities.

use serde::{Deserialize, Serialize};
use statrs::function::beta::checked_beta_reg;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::specfun::{exp_e1_scaled, gamma_p};

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be positive and finite, got {v}")))
    }
}

fn open_unit(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must lie in (0, 1), got {v}")))
    }
}

/// Density of `S_n` under Lindley(λ) frailty:
/// `n λ² x^{n-1} (x+λ+n+1) / ((1+λ)(x+λ)^{n+2})`.
pub fn lindley_sum_pdf(lambda: f64, n: usize, x: f64) -> Result<f64> {
    positive("lambda", lambda)?;
    if n == 0 {
        return Err(Error::param("n", "dimension must be >= 1"));
    }
    if x.is_nan() {
        return Err(Error::param("x", "evaluation point is NaN"));
    }
    if x < 0.0 || x.is_infinite() {
        return Ok(0.0);
    }
    let nf = n as f64;
    if x == 0.0 {
        return Ok(if n == 1 {
            lambda * lambda * (lambda + 2.0) / ((1.0 + lambda) * lambda.powi(3))
        } else {
            0.0
        });
    }
    Ok(
        (nf.ln() + 2.0 * lambda.ln() + (nf - 1.0) * x.ln() + (x + lambda + nf + 1.0).ln()
            - lambda.ln_1p()
            - (nf + 2.0) * (x + lambda).ln())
        .exp(),
    )
}

/// Inputs of the mixed compound Poisson ruin problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuinInput {
    /// Lindley parameter of the frailty.
    pub lambda: f64,
    /// Poisson claim intensity.
    pub phi: f64,
    /// Premium intensity.
    pub c: f64,
    /// Initial capital.
    pub u: f64,
}

impl RuinInput {
    pub fn theta0(&self) -> f64 {
        self.phi / self.c
    }

    fn validate(&self) -> Result<()> {
        positive("lambda", self.lambda)?;
        positive("phi", self.phi)?;
        positive("c", self.c)?;
        if !(self.u >= 0.0) {
            return Err(Error::param(
                "u",
                format!("initial capital must be >= 0, got {}", self.u),
            ));
        }
        Ok(())
    }
}

/// Lindley cdf `1 - (1+λ(1+t))/(1+λ) e^{-λt}`.
pub fn lindley_cdf(lambda: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    -((1.0 + lambda * (1.0 + t)) / (1.0 + lambda) * (-lambda * t).exp() - 1.0)
}

/// `lim_{u→∞} ψ(u)`, the Lindley cdf at `θ₀ = φ/c`.
pub fn ruin_limit(input: &RuinInput) -> Result<f64> {
    input.validate()?;
    Ok(lindley_cdf(input.lambda, input.theta0()))
}

/// Ruin probability `ψ(u)` of the compound Poisson surplus with exponential
/// claims whose rate is Lindley distributed.
///
/// The bracket `e^{uθ₀}[e^{-θ₀(u+λ)} + (u+λ)Γ(0, θ₀(u+λ))]` is evaluated as
/// `e^{-θ₀λ}[1 + z/θ₀ · e^z E1(z)]` with `z = θ₀(u+λ)`.
pub fn ruin_probability(input: &RuinInput) -> Result<f64> {
    input.validate()?;
    let RuinInput { lambda, u, .. } = *input;
    let t0 = input.theta0();
    let base = lindley_cdf(lambda, t0);
    if u.is_infinite() {
        return Ok(base);
    }
    let w = u + lambda;
    let z = t0 * w;
    let scaled = exp_e1_scaled(z);
    if !scaled.is_finite() {
        return Err(Error::Divergent(format!("scaled exponential integral at {z}")));
    }
    let front = lambda * lambda * t0 * (-t0 * lambda).exp() / ((1.0 + lambda) * w);
    Ok(base + front * (1.0 + w * scaled))
}

/// Claim-count law of the collective model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum PrimaryLaw {
    Poisson { phi: f64 },
    NegativeBinomial { r: f64, p: f64 },
    Geometric { p: f64 },
    Logarithmic { phi: f64 },
}

/// Compound sum `S_N` with exponential claims under Lindley(λ) frailty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompoundModel {
    pub primary: PrimaryLaw,
    pub lambda: f64,
}

/// Value of a compound density: the atom at zero or the continuous part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum CompoundDensity {
    Atom(f64),
    Density(f64),
}

impl CompoundDensity {
    pub fn value(&self) -> f64 {
        match *self {
            CompoundDensity::Atom(v) | CompoundDensity::Density(v) => v,
        }
    }
}

/// Truncated series value together with the neglected count mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    pub tail_mass: f64,
}

impl CompoundModel {
    pub fn new(primary: PrimaryLaw, lambda: f64) -> Result<Self> {
        let m = CompoundModel { primary, lambda };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        positive("lambda", self.lambda)?;
        match self.primary {
            PrimaryLaw::Poisson { phi } => positive("phi", phi),
            PrimaryLaw::NegativeBinomial { r, p } => {
                positive("r", r)?;
                open_unit("p", p)
            }
            PrimaryLaw::Geometric { p } => open_unit("p", p),
            PrimaryLaw::Logarithmic { phi } => open_unit("phi", phi),
        }
    }

    fn nb_params(&self) -> Option<(f64, f64)> {
        match self.primary {
            PrimaryLaw::NegativeBinomial { r, p } => Some((r, p)),
            PrimaryLaw::Geometric { p } => Some((1.0, p)),
            _ => None,
        }
    }

    /// `P(N = k)`.
    pub fn count_pmf(&self, k: u64) -> f64 {
        let kf = k as f64;
        if k == 0 {
            return match self.primary {
                PrimaryLaw::Poisson { phi } => (-phi).exp(),
                PrimaryLaw::Logarithmic { .. } => 0.0,
                _ => {
                    let (r, p) = self.nb_params().unwrap();
                    p.powf(r)
                }
            };
        }
        if let Some((r, p)) = self.nb_params() {
            return (ln_gamma(kf + r) - ln_gamma(r) - ln_gamma(kf + 1.0) + r * p.ln() + kf * (1.0 - p).ln()).exp();
        }
        match self.primary {
            PrimaryLaw::Poisson { phi } => (kf * phi.ln() - phi - ln_gamma(kf + 1.0)).exp(),
            PrimaryLaw::Logarithmic { phi } => -(kf * phi.ln()).exp() / (kf * (-phi).ln_1p()),
            _ => unreachable!(),
        }
    }

    /// `P(N > k)`.
    pub fn count_tail(&self, k: u64) -> f64 {
        let kf = k as f64;
        if let Some((r, p)) = self.nb_params() {
            return checked_beta_reg(kf + 1.0, r, 1.0 - p).unwrap_or(f64::NAN);
        }
        match self.primary {
            PrimaryLaw::Poisson { phi } => gamma_p(kf + 1.0, phi),
            PrimaryLaw::Logarithmic { .. } => {
                let mut s = 0.0;
                let mut j = k + 1;
                loop {
                    let t = self.count_pmf(j);
                    s += t;
                    if t <= s * 1e-17 || t == 0.0 {
                        break s;
                    }
                    j += 1;
                }
            }
            _ => unreachable!(),
        }
    }

    pub fn mean_count(&self) -> f64 {
        if let Some((r, p)) = self.nb_params() {
            return r * (1.0 - p) / p;
        }
        match self.primary {
            PrimaryLaw::Poisson { phi } => phi,
            PrimaryLaw::Logarithmic { phi } => -phi / ((1.0 - phi) * (-phi).ln_1p()),
            _ => unreachable!(),
        }
    }

    /// Atom at zero, `P(N = 0)`.
    pub fn atom(&self) -> f64 {
        self.count_pmf(0)
    }

    /// Closed-form total-claim density; the atom is returned at `x = 0`.
    pub fn compound_pdf(&self, x: f64) -> Result<CompoundDensity> {
        self.validate()?;
        if !(x >= 0.0) {
            return Err(Error::param("x", format!("must be >= 0, got {x}")));
        }
        if x == 0.0 {
            return Ok(CompoundDensity::Atom(self.atom()));
        }
        if x.is_infinite() {
            return Ok(CompoundDensity::Density(0.0));
        }
        let l = self.lambda;
        let v = if let Some((r, p)) = self.nb_params() {
            let q = 1.0 - p;
            let num = l * (l + 2.0) + x * (p * (x + l - r + 1.0) + l + r + 1.0);
            num / (l + 1.0)
                * ((r - 2.0) * (x + l).ln() - (2.0 + r) * (l + p * x).ln() + r * p.ln()).exp()
                * l
                * l
                * q
                * r
        } else {
            match self.primary {
                PrimaryLaw::Poisson { phi } => {
                    let num = l * (l + 2.0) + x * (2.0 * (l + 1.0) + phi + x);
                    num / ((l + 1.0) * (l + x).powi(4)) * phi * l * l * (-l * phi / (l + x)).exp()
                }
                PrimaryLaw::Logarithmic { phi } => {
                    let num = x * phi * (l + x + 1.0) - (l + x) * (l + x + 2.0);
                    let d = (l + x) * (l + x * (1.0 - phi));
                    l * l * phi * num / ((l + 1.0) * d * d * (-phi).ln_1p())
                }
                _ => unreachable!(),
            }
        };
        Ok(CompoundDensity::Density(v))
    }

    /// `Σ_{n=1}^{n_max} P(N=n) f_{S_n}(x)` and the neglected mass `P(N > n_max)`.
    pub fn compound_pdf_series(&self, x: f64, n_max: usize) -> Result<SeriesValue> {
        self.validate()?;
        if n_max == 0 {
            return Err(Error::param("n_max", "must be >= 1"));
        }
        if !(x > 0.0) {
            return Err(Error::param("x", format!("must be > 0, got {x}")));
        }
        let mut value = 0.0;
        for n in 1..=n_max {
            let w = self.count_pmf(n as u64);
            if w > 0.0 {
                value += w * lindley_sum_pdf(self.lambda, n, x)?;
            }
        }
        Ok(SeriesValue {
            value,
            tail_mass: self.count_tail(n_max as u64),
        })
    }
}
