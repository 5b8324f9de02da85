//! Multivariate mixtures of gamma laws sharing a frailty rate, and the
//! Sibuya model `X_i = G_{α_i} H` with `H = G_β / G_γ`.

use serde::{Deserialize, Serialize};
use statrs::function::beta::ln_beta;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::mixing::{MixingDistribution, DERIVATIVE_CAP};
use crate::numeric::{breakpoints, Integrator};
use crate::specfun::kummer_u_integral;

fn check_shapes(shapes: &[f64]) -> Result<()> {
    if shapes.is_empty() {
        return Err(Error::param("shapes", "need at least one shape"));
    }
    for &a in shapes {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::param("shapes", format!("shape must be positive, got {a}")));
        }
    }
    Ok(())
}

fn rising(a: f64, r: u32) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (a + f64::from(i)))
}

/// `X_i | Θ = θ ~ Gamma(α_i, rate θ)`, independent given Θ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaMixtureModel {
    pub shapes: Vec<f64>,
    pub mixing: MixingDistribution,
}

impl GammaMixtureModel {
    pub fn new(shapes: Vec<f64>, mixing: MixingDistribution) -> Result<Self> {
        check_shapes(&shapes)?;
        Ok(GammaMixtureModel { shapes, mixing })
    }

    pub fn dim(&self) -> usize {
        self.shapes.len()
    }

    /// `α̃ = Σ α_i`.
    pub fn total_shape(&self) -> f64 {
        self.shapes.iter().sum()
    }

    /// Density of the sum: `x^{α̃-1}/Γ(α̃) E[Θ^{α̃} e^{-Θx}]`.
    ///
    /// Integer `α̃` reuses the Laplace derivatives; otherwise quadrature.
    pub fn gm_sum_pdf(&self, x: f64) -> Result<f64> {
        let at = self.total_shape();
        if at.fract() == 0.0 && at <= f64::from(DERIVATIVE_CAP) && x > 0.0 {
            let n = at as u32;
            let d = self.mixing.laplace_derivative(n, x)?;
            let signed = if n.is_multiple_of(2) { d } else { -d };
            return Ok(((at - 1.0) * x.ln() - ln_gamma(at)).exp() * signed.max(0.0));
        }
        self.gm_sum_pdf_quadrature(x)
    }

    /// Same density, always by quadrature over the frailty.
    pub fn gm_sum_pdf_quadrature(&self, x: f64) -> Result<f64> {
        if x.is_nan() {
            return Err(Error::param("x", "evaluation point is NaN"));
        }
        if x <= 0.0 || x.is_infinite() {
            return Ok(0.0);
        }
        let at = self.total_shape();
        let lead = (at - 1.0) * x.ln() - ln_gamma(at);
        let q = Integrator::new(1e-300, 1e-13).with_max_segments(8000);
        let peak = at / x;
        let e = self.mixing.expect(
            |th: f64| (lead + at * th.ln() - th * x).exp(),
            &[0.1 * peak, peak, 5.0 * peak, 30.0 * peak],
            &q,
        )?;
        Ok(e)
    }
}

/// Sibuya model: `X_i = G_{α_i} H_{β,γ}` with a common `H = G_β / G_γ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SibuyaModel {
    pub shapes: Vec<f64>,
    pub beta: f64,
    pub gamma: f64,
}

impl SibuyaModel {
    pub fn new(shapes: Vec<f64>, beta: f64, gamma: f64) -> Result<Self> {
        check_shapes(&shapes)?;
        for (name, v) in [("beta", beta), ("gamma", gamma)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, format!("must be positive, got {v}")));
            }
        }
        Ok(SibuyaModel { shapes, beta, gamma })
    }

    pub fn total_shape(&self) -> f64 {
        self.shapes.iter().sum()
    }

    /// Frailty `Θ = 1/H = G_γ / G_β`.
    pub fn frailty(&self) -> MixingDistribution {
        MixingDistribution::beta_second_kind(self.gamma, self.beta).expect("validated")
    }

    pub fn as_gamma_mixture(&self) -> GammaMixtureModel {
        GammaMixtureModel {
            shapes: self.shapes.clone(),
            mixing: self.frailty(),
        }
    }

    /// `Γ(β+γ)/(Γ(a)Γ(β)Γ(γ)) x^{a-1} U_raw(a+γ, a-β+1, x)` with the raw
    /// Kummer integral.
    fn kummer_density(&self, a: f64, x: f64) -> Result<f64> {
        if x.is_nan() {
            return Err(Error::param("x", "evaluation point is NaN"));
        }
        if x <= 0.0 || x.is_infinite() {
            return Ok(0.0);
        }
        let u = kummer_u_integral(a + self.gamma, a - self.beta + 1.0, x)?;
        Ok((-ln_gamma(a) - ln_beta(self.beta, self.gamma) + (a - 1.0) * x.ln()).exp() * u)
    }

    /// Density of `X_i` (Kummer form).
    pub fn sibuya_marginal_pdf(&self, i: usize, x: f64) -> Result<f64> {
        let a = *self.shapes.get(i).ok_or(Error::DimensionMismatch {
            expected: self.shapes.len(),
            got: i + 1,
        })?;
        self.kummer_density(a, x)
    }

    /// Density of `S_n` in the Kummer form.
    pub fn sibuya_sum_pdf_kummer(&self, x: f64) -> Result<f64> {
        self.kummer_density(self.total_shape(), x)
    }

    /// Density of `S_n = G_{α̃} H`, conditioning on `H`:
    /// `∫ f_G(x/h)/h f_H(h) dh`.
    pub fn sibuya_sum_pdf(&self, x: f64) -> Result<f64> {
        if x.is_nan() {
            return Err(Error::param("x", "evaluation point is NaN"));
        }
        if x <= 0.0 || x.is_infinite() {
            return Ok(0.0);
        }
        let at = self.total_shape();
        let (b, g) = (self.beta, self.gamma);
        let c = -ln_gamma(at) - ln_beta(b, g);
        let lx = x.ln();
        let f = |h: f64| {
            if h <= 0.0 {
                return 0.0;
            }
            let lh = h.ln();
            (c + (at - 1.0) * (lx - lh) - x / h - lh + (b - 1.0) * lh - (b + g) * h.ln_1p()).exp()
        };
        // the h-integrand peaks near x / (α̃ + γ) for large x and near x / α̃ for small x
        let m = x / (at + g);
        let q = Integrator::new(1e-300, 1e-12).with_max_segments(8000);
        let pts = breakpoints(
            0.0,
            &[0.05 * m, 0.3 * m, m, x / at, 3.0 * x / at, 1.0, 10.0, 100.0, 1e4],
        );
        q.integrate_pieces(f, &pts).require("Sibuya conditioning integral")
    }

    /// `E Π X_i^{r_i} = Π Γ(α_i+r_i)/Γ(α_i) · Γ(β+r̃)Γ(γ-r̃)/(Γ(β)Γ(γ))`.
    pub fn sibuya_moments(&self, r: &[u32]) -> Result<f64> {
        if r.len() != self.shapes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.shapes.len(),
                got: r.len(),
            });
        }
        let total: u32 = r.iter().sum();
        let g = self.h_moment(total)?;
        Ok(self
            .shapes
            .iter()
            .zip(r)
            .map(|(&a, &ri)| rising(a, ri))
            .product::<f64>()
            * g)
    }

    /// `E S_n^r = Γ(α̃+r)/Γ(α̃) E H^r`.
    pub fn sum_moment(&self, r: u32) -> Result<f64> {
        Ok(rising(self.total_shape(), r) * self.h_moment(r)?)
    }

    fn h_moment(&self, r: u32) -> Result<f64> {
        let rf = f64::from(r);
        if rf >= self.gamma {
            return Err(Error::NonexistentMoment {
                order: rf,
                reason: format!("Sibuya moments of total order {r} need gamma > {r}, got {}", self.gamma),
            });
        }
        Ok(rising(self.beta, r) / rising(self.gamma - rf, r))
    }
}
