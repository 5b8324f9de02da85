//! Value at risk, tail value at risk and conditional upper tail moments.
//!
//! Level convention: `F(VaR) = level`, so `VaR` at 0.99 is the 99% quantile.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use crate::aggregate::AggregateModel;
use crate::error::{Error, Result};
use crate::mixture::MixtureRepresentation;
use crate::numeric::{bracket_decreasing, breakpoints, brent, Integrator};

/// Levels at or above this are refused: the survival function underflows.
pub const MAX_LEVEL: f64 = 1.0 - 1e-12;

/// Anything with a survival function and upper incomplete moments.
pub trait TailModel {
    fn survival_at(&self, x: f64) -> Result<f64>;
    /// `E X^r`, or an error when it does not exist.
    fn raw_moment(&self, r: u32) -> Result<f64>;
    /// `E[X^r; X > a]`.
    fn upper_moment(&self, r: u32, a: f64) -> Result<f64>;
}

impl TailModel for AggregateModel {
    fn survival_at(&self, x: f64) -> Result<f64> {
        self.survival(x)
    }

    fn raw_moment(&self, r: u32) -> Result<f64> {
        self.moment(r)
    }

    fn upper_moment(&self, r: u32, a: f64) -> Result<f64> {
        let full = self.moment(r)?;
        if a <= 0.0 {
            return Ok(full);
        }
        let q = Integrator::new(1e-300, 1e-12).with_max_segments(20_000);
        let scale = full.powf(1.0 / f64::from(r.max(1)));
        let pts = breakpoints(a, &[2.0 * a, 10.0 * a, 100.0 * a, scale, 10.0 * scale, 1e3 * scale]);
        let first = RefCell::new(None);
        let est = q.integrate_pieces(
            |x| match self.pdf(x) {
                Ok(v) => x.powi(r as i32) * v,
                Err(e) => {
                    first.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            },
            &pts,
        );
        if let Some(e) = first.into_inner() {
            return Err(e);
        }
        est.require("upper tail moment")
    }
}

impl TailModel for MixtureRepresentation {
    fn survival_at(&self, x: f64) -> Result<f64> {
        Ok(self.survival(x).clamp(0.0, 1.0))
    }

    fn raw_moment(&self, r: u32) -> Result<f64> {
        self.moment(f64::from(r))
    }

    fn upper_moment(&self, r: u32, a: f64) -> Result<f64> {
        MixtureRepresentation::upper_moment(self, f64::from(r), a)
    }
}

/// `VaR` at `level`: the `x` with `P(X <= x) = level`.
pub fn value_at_risk<M: TailModel + ?Sized>(model: &M, level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::param("level", format!("must lie in (0, 1), got {level}")));
    }
    if level >= MAX_LEVEL {
        return Err(Error::TailUnderflow { threshold: level });
    }
    let target = 1.0 - level;
    let first = RefCell::new(None);
    let g = |x: f64| match model.survival_at(x) {
        Ok(s) => s - target,
        Err(e) => {
            first.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let bracket = bracket_decreasing(g, 1.0);
    if let Some(e) = first.borrow_mut().take() {
        return Err(e);
    }
    let (lo, hi) = bracket?;
    let root = brent(g, lo, hi, 1e-13, 1e-300);
    if let Some(e) = first.into_inner() {
        return Err(e);
    }
    root
}

/// Conditional upper tail moment `E[X^r | X > a]`.
pub fn tail_moment<M: TailModel + ?Sized>(model: &M, r: u32, a: f64) -> Result<f64> {
    if !(a >= 0.0) {
        return Err(Error::param("a", format!("threshold must be >= 0, got {a}")));
    }
    let raw = model.raw_moment(r)?;
    if a == 0.0 {
        return Ok(raw);
    }
    let surv = model.survival_at(a)?;
    if !(surv > 1e-300) {
        return Err(Error::TailUnderflow { threshold: a });
    }
    Ok(model.upper_moment(r, a)? / surv)
}

/// `TVaR = E[X | X > VaR(level)]`.
pub fn tvar<M: TailModel + ?Sized>(model: &M, level: f64) -> Result<f64> {
    model.raw_moment(1)?;
    let v = value_at_risk(model, level)?;
    tail_moment(model, 1, v)
}

/// Risk summary at one level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub level: f64,
    pub var: f64,
    pub tvar: f64,
    /// `(r, E[X^r | X > VaR])`.
    pub tail_moments: Vec<(u32, f64)>,
}

/// VaR, TVaR and the requested tail moments at `level`.
pub fn risk_report<M: TailModel + ?Sized>(model: &M, level: f64, orders: &[u32]) -> Result<RiskReport> {
    let var = value_at_risk(model, level)?;
    let tvar = tail_moment(model, 1, var)?;
    let tail_moments = orders
        .iter()
        .map(|&r| Ok((r, tail_moment(model, r, var)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(RiskReport {
        level,
        var,
        tvar,
        tail_moments,
    })
}
