//! Special functions used by the closed-form densities.
//!
//! Partial Bell polynomials, falling factorials, incomplete gamma (including
//! non-positive shapes), gamma quantiles, half-integer Bessel K and the raw
//! Kummer U integral.

use statrs::function::gamma::{checked_gamma_lr, checked_gamma_ur, gamma, ln_gamma};

use crate::error::{Error, Result};
use crate::numeric::{breakpoints, brent, log_sum_exp, Integrator};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082;

/// `a (a - 1) ... (a - k + 1)`; the empty product for `k = 0` is 1.
pub fn falling_factorial(a: f64, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (a - f64::from(i)))
}

/// Binomial coefficient as a float, exact for the sizes used here.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut c = 1.0;
    for i in 0..k {
        c = c * f64::from(n - i) / f64::from(i + 1);
    }
    c.round()
}

/// `ln(n!)`.
pub fn ln_factorial(n: u32) -> f64 {
    ln_gamma(f64::from(n) + 1.0)
}

/// Table `t[m][j] = B_{m,j}(x_1, ..., x_{m-j+1})` for `0 <= j <= m <= n`.
///
/// `x` must hold at least `n` values (missing trailing entries are never read
/// by the rows that would need them, so callers may zero-pad).
pub fn bell_table(n: usize, x: &[f64]) -> Vec<Vec<f64>> {
    let mut t = vec![vec![0.0; n + 1]; n + 1];
    t[0][0] = 1.0;
    for m in 1..=n {
        for j in 1..=m {
            // B_{m,j} = sum_i C(m-1, i-1) x_i B_{m-i, j-1}
            let mut s = 0.0;
            for i in 1..=(m - j + 1) {
                let b = t[m - i][j - 1];
                if b != 0.0 {
                    s += binomial((m - 1) as u32, (i - 1) as u32) * x[i - 1] * b;
                }
            }
            t[m][j] = s;
        }
    }
    t
}

/// Partial Bell polynomial `B_{n,k}(x_1, ..., x_{n-k+1})`.
///
/// `x` must contain exactly `n - k + 1` values.
pub fn bell_partial(n: usize, k: usize, x: &[f64]) -> Result<f64> {
    if k < 1 || k > n {
        return Err(Error::param("k", format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    let len = n - k + 1;
    if x.len() != len {
        return Err(Error::DimensionMismatch {
            expected: len,
            got: x.len(),
        });
    }
    let mut padded = x.to_vec();
    padded.resize(n, 0.0);
    Ok(bell_table(n, &padded)[n][k])
}

/// Row `B_{n,0..=n}` for the arguments `x_1..x_n`.
pub fn bell_row(n: usize, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() < n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    Ok(bell_table(n, x).swap_remove(n))
}

/// n-th derivative of `f(g(s))` from `f^{(k)}(g(s))` (k = 1..n) and
/// `g^{(j)}(s)` (j = 1..n).
pub fn faa_di_bruno(n: usize, f_derivs: &[f64], g_derivs: &[f64]) -> Result<f64> {
    if f_derivs.len() < n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: f_derivs.len(),
        });
    }
    let row = bell_row(n, g_derivs)?;
    Ok((1..=n).map(|k| f_derivs[k - 1] * row[k]).sum())
}

/// Regularized upper incomplete gamma `Q(s, x)` for `s > 0`, `x >= 0`.
pub fn gamma_q(s: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x.is_infinite() {
        return 0.0;
    }
    checked_gamma_ur(s, x).unwrap_or(f64::NAN)
}

/// Regularized lower incomplete gamma `P(s, x)` for `s > 0`, `x >= 0`.
pub fn gamma_p(s: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    checked_gamma_lr(s, x).unwrap_or(f64::NAN)
}

/// Exponential integral `E1(x)` for `x > 0`.
pub fn exp_integral_e1(x: f64) -> f64 {
    if x <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..200 {
            term *= -x / k as f64;
            let add = term / k as f64;
            sum += add;
            if add.abs() < 1e-17 * sum.abs().max(1e-300) {
                break;
            }
        }
        -EULER_GAMMA - x.ln() - sum
    } else {
        exp_e1_scaled(x) * (-x).exp()
    }
}

/// `e^z E1(z)`, i.e. `e^z Γ(0, z)`, without overflow for large `z`.
pub fn exp_e1_scaled(z: f64) -> f64 {
    if z <= 1.0 {
        return z.exp() * exp_integral_e1(z);
    }
    continued_fraction_gamma(0.0, z)
}

// e^x x^{-s} Γ(s, x) by modified Lentz, valid for x >= 1 and any real s.
fn continued_fraction_gamma(s: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// Upper incomplete gamma `Γ(s, x) = ∫_x^∞ t^{s-1} e^{-t} dt`.
///
/// Any real `s` is accepted for `x > 0`; `s = 0` is the exponential integral.
/// At `x = 0` only `s > 0` converges.
pub fn upper_incomplete_gamma(s: f64, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !s.is_finite() {
        return Err(Error::param("x", format!("need x >= 0, got {x}")));
    }
    if x == 0.0 {
        if s > 0.0 {
            return Ok(gamma(s));
        }
        return Err(Error::Divergent(format!("Γ({s}, 0) diverges for s <= 0")));
    }
    if s > 0.0 {
        return Ok(gamma(s) * gamma_q(s, x));
    }
    if s == 0.0 {
        return Ok(exp_integral_e1(x));
    }
    if x >= 1.0 {
        return Ok((-x + s * x.ln()).exp() * continued_fraction_gamma(s, x));
    }
    // step down from s0 in [0, 1): Γ(a-1, x) = (Γ(a, x) - x^{a-1} e^{-x}) / (a - 1)
    let m = (-s).ceil();
    let mut a = s + m;
    let mut g = if a == 0.0 {
        exp_integral_e1(x)
    } else {
        gamma(a) * gamma_q(a, x)
    };
    for _ in 0..(m as u32) {
        g = (g - x.powf(a - 1.0) * (-x).exp()) / (a - 1.0);
        a -= 1.0;
    }
    Ok(g)
}

// Solves increasing `f(y) = 0` on (0, ∞) starting from a positive guess.
fn solve_increasing<F: Fn(f64) -> f64>(f: F, guess: f64) -> Result<f64> {
    let mut lo = guess;
    let mut hi = guess;
    let mut n = 0;
    while f(lo) > 0.0 {
        lo *= 0.25;
        n += 1;
        if lo < 1e-300 || n > 600 {
            return Ok(0.0);
        }
    }
    n = 0;
    while f(hi) < 0.0 {
        hi *= 2.0;
        n += 1;
        if !hi.is_finite() || n > 2000 {
            return Err(Error::NoConvergence {
                what: "quantile bracket",
                estimate: hi,
                error: f64::INFINITY,
            });
        }
    }
    brent(f, lo, hi, 1e-15, 0.0)
}

/// Quantile of the unit-scale gamma law: `y` with `P(alpha, y) = p`.
pub fn gamma_quantile(alpha: f64, p: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::param("alpha", "shape must be positive"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param("p", format!("need 0 <= p < 1, got {p}")));
    }
    if p == 1.0 {
        return Err(Error::param("p", "p = 1 gives an infinite quantile"));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    if p > 0.5 {
        return gamma_upper_quantile(alpha, 1.0 - p);
    }
    // small-y behaviour: P(α, y) ≈ y^α / Γ(α+1)
    let guess = ((p.ln() + ln_gamma(alpha + 1.0)) / alpha)
        .exp()
        .max(1e-300)
        .min(alpha.max(1.0));
    solve_increasing(|y| gamma_p(alpha, y) - p, guess)
}

/// `y` with `Q(alpha, y) = q`, accurate for small `q`.
pub fn gamma_upper_quantile(alpha: f64, q: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::param("alpha", "shape must be positive"));
    }
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::param("q", format!("need 0 < q <= 1, got {q}")));
    }
    if q == 1.0 {
        return Ok(0.0);
    }
    if q > 0.5 {
        return gamma_quantile(alpha, 1.0 - q);
    }
    solve_increasing(|y| q - gamma_q(alpha, y), alpha.max(1.0))
}

/// `ln K_{n+1/2}(x)` for `x > 0`.
pub fn ln_bessel_k_half(n: u32, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::param("x", format!("Bessel K needs x > 0, got {x}")));
    }
    let ln2x = (2.0 * x).ln();
    let terms: Vec<f64> = (0..=n)
        .map(|k| ln_factorial(n + k) - ln_factorial(k) - ln_factorial(n - k) - f64::from(k) * ln2x)
        .collect();
    Ok(0.5 * (std::f64::consts::PI / (2.0 * x)).ln() - x + log_sum_exp(&terms))
}

/// Modified Bessel function of the second kind at half-integer order
/// `K_{n+1/2}(x)`, from its finite sum.
pub fn bessel_k_half(n: u32, x: f64) -> Result<f64> {
    ln_bessel_k_half(n, x).map(f64::exp)
}

/// `∫_0^∞ e^{-zt} t^{a-1} (1+t)^{b-a-1} dt` (no `1/Γ(a)` prefactor).
pub fn kummer_u_integral(a: f64, b: f64, z: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::Divergent(format!(
            "Kummer U integral diverges at t = 0 for a = {a} <= 0"
        )));
    }
    if !(z > 0.0) || !b.is_finite() {
        return Err(Error::param("z", format!("need z > 0, got {z}")));
    }
    let q = Integrator::new(1e-300, 1e-13).with_max_segments(8000);
    let c = b - a - 1.0;
    // near zero t^{a-1} is singular for a < 1: t = u^{1/a} removes it
    let head = if a < 1.0 {
        q.integrate(
            |u: f64| {
                let t = u.powf(1.0 / a);
                (-z * t).exp() * (1.0 + t).powf(c) / a
            },
            0.0,
            1.0,
        )
    } else {
        q.integrate(|t: f64| (-z * t).exp() * t.powf(a - 1.0) * (1.0 + t).powf(c), 0.0, 1.0)
    };
    // log-integrand peaks where (a-1)/t + c/(1+t) = z
    let mode = if a + c > 1.0 { (a + c - 1.0) / z } else { 1.0 };
    let pts = breakpoints(1.0, &[mode, 1.0 + 10.0 / z, mode + 20.0 / z]);
    let tail = q.integrate_pieces(
        |t: f64| {
            let lv = -z * t + (a - 1.0) * t.ln() + c * (1.0 + t).ln();
            lv.exp()
        },
        &pts,
    );
    let h = head.require("Kummer U integral on [0, 1]")?;
    let t = tail.require("Kummer U integral on [1, ∞)")?;
    Ok(h + t)
}

/// Taylor coefficients `a_j` with `d^j/ds^j sqrt(s) = a_j s^{1/2 - j}`.
pub fn sqrt_derivative_coefficient(j: u32) -> f64 {
    falling_factorial(0.5, j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn falling_factorial_examples() {
        assert_eq!(falling_factorial(3.0, 2), 6.0);
        assert_eq!(falling_factorial(7.5, 0), 1.0);
        assert_relative_eq!(falling_factorial(-0.5, 2), 0.75);
    }

    #[test]
    fn bell_examples() {
        assert_eq!(bell_partial(2, 2, &[5.0]).unwrap(), 25.0);
        assert_eq!(bell_partial(4, 2, &[1.0, 2.0, 3.0]).unwrap(), 24.0);
        assert_eq!(bell_partial(5, 3, &[1.0, 1.0, 1.0]).unwrap(), 25.0);
        assert!(matches!(
            bell_partial(4, 2, &[1.0, 2.0]),
            Err(Error::DimensionMismatch { expected: 3, got: 2 })
        ));
        assert!(bell_partial(2, 3, &[]).is_err());
    }

    #[test]
    fn sqrt_coefficients_match_closed_form() {
        for j in 1..12u32 {
            let jj = f64::from(j);
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            let closed = sign * (ln_factorial(2 * j - 2) - (2.0 * jj - 1.0) * 2f64.ln() - ln_factorial(j - 1)).exp();
            assert_relative_eq!(sqrt_derivative_coefficient(j), closed, max_relative = 1e-13);
        }
    }

    #[test]
    fn incomplete_gamma_values() {
        assert_relative_eq!(
            upper_incomplete_gamma(1.0, 0.7).unwrap(),
            (-0.7f64).exp(),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            upper_incomplete_gamma(2.5, 0.0).unwrap(),
            gamma(2.5),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            upper_incomplete_gamma(0.0, 2.0).unwrap(),
            0.048_900_510_708_061_1,
            max_relative = 1e-13
        );
        assert_relative_eq!(exp_e1_scaled(2.0), 0.361_328_616_888_223, max_relative = 1e-13);
        assert!(matches!(upper_incomplete_gamma(0.0, 0.0), Err(Error::Divergent(_))));
        assert!(upper_incomplete_gamma(-1.0, 0.0).is_err());
    }

    #[test]
    fn incomplete_gamma_negative_shape() {
        // Γ(-1, x) = E2(x)/x = (e^{-x} - x E1(x)) / x
        for &x in &[0.1, 0.5, 0.9, 1.0, 3.0, 10.0] {
            let e1 = exp_integral_e1(x);
            let expect = ((-x).exp() - x * e1) / x;
            assert_relative_eq!(upper_incomplete_gamma(-1.0, x).unwrap(), expect, max_relative = 1e-11);
        }
        // both branches agree for fractional s near x = 1
        let lo = upper_incomplete_gamma(-0.5, 0.999_999_999).unwrap();
        let hi = upper_incomplete_gamma(-0.5, 1.0).unwrap();
        assert_relative_eq!(lo, hi, max_relative = 1e-8);
    }

    #[test]
    fn e1_branches_meet() {
        let a = exp_integral_e1(1.0);
        let b = exp_e1_scaled(1.000_000_000_001) * (-1.000_000_000_001f64).exp();
        assert_relative_eq!(a, b, max_relative = 1e-10);
        assert_relative_eq!(a, 0.219_383_934_395_520_3, max_relative = 1e-14);
    }

    #[test]
    fn quantiles() {
        assert_relative_eq!(
            gamma_quantile(0.5, 0.5).unwrap(),
            0.227_468_211_559_786,
            max_relative = 1e-12
        );
        assert_relative_eq!(gamma_quantile(1.0, 0.3).unwrap(), -(0.7f64).ln(), max_relative = 1e-12);
        assert_eq!(gamma_quantile(2.0, 0.0).unwrap(), 0.0);
        assert!(gamma_quantile(2.0, 1.0).is_err());
        assert_relative_eq!(
            gamma_upper_quantile(1.0, 1e-12).unwrap(),
            1e12f64.ln(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn bessel_values() {
        let x: f64 = 0.8;
        assert_relative_eq!(
            bessel_k_half(0, x).unwrap(),
            (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp(),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            bessel_k_half(1, 1.0).unwrap(),
            0.922_137_008_895_789,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            bessel_k_half(2, 2.0).unwrap(),
            0.389_797_758_896_2,
            max_relative = 1e-13
        );
        assert!(bessel_k_half(1, 0.0).is_err());
    }

    #[test]
    fn kummer_examples() {
        assert_relative_eq!(
            kummer_u_integral(1.0, 2.0, 3.0).unwrap(),
            1.0 / 3.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            kummer_u_integral(1.0, 1.0, 2.0).unwrap(),
            0.361_328_616_888_223,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            kummer_u_integral(0.5, 0.5, 1.0).unwrap(),
            1.343_293_421_646_74,
            max_relative = 1e-10
        );
        assert!(matches!(kummer_u_integral(0.0, 1.0, 1.0), Err(Error::Divergent(_))));
    }
}
