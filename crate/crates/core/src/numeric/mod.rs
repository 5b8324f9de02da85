//! Numerical building blocks: adaptive quadrature and root finding.

pub mod quadrature;
pub mod roots;

pub use quadrature::{breakpoints, Estimate, Integrator};
pub use roots::{bracket_decreasing, brent};

/// `ln(Σ exp(v_i))` for a slice of log-magnitudes.
pub(crate) fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}
