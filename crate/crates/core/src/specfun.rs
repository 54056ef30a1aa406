//! Confluent hypergeometric and associated Laguerre kernels.
//!
//! Everything downstream (closed-form spectra, eigenspinors, shell
//! matching) reduces to Kummer's function `1F1(a, c, z)` with `z = M omega
//! r^2` and to associated Laguerre polynomials, which are the terminating
//! special case. Gamma-function prefactors are handled in log space with
//! explicit sign tracking so that ratios like `Gamma(c)/Gamma(a)` stay
//! finite and correctly signed for negative arguments.
//!
//! Numerical policy:
//!
//! * a numerator parameter within [`INTEGER_SNAP_TOL`] of a non-positive
//!   integer is snapped to it and the series is summed as an exact
//!   polynomial (no truncation error);
//! * otherwise the power series is summed until the term is below
//!   `1e-16` of the partial sum for three consecutive terms, with a hard
//!   cap of 10_000 terms;
//! * the large-`z` form includes the full inverse-power correction
//!   series, truncated adaptively where its terms stop shrinking.

// Tabulated coefficients and frozen reference values keep every digit of
// their source even past f64 resolution.
#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

use thiserror::Error;

/// Half-width of the window in which a floating-point parameter is
/// treated as an exact integer.
pub const INTEGER_SNAP_TOL: f64 = 1e-12;

const SERIES_TOL: f64 = 1e-16;
const MAX_SERIES_TERMS: usize = 10_000;
const MAX_ASYMPTOTIC_TERMS: usize = 30;

/// Errors from the special-function kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecFunError {
    /// A gamma-function argument or series denominator sits at a pole.
    #[error("pole: {context} = {value} is a non-positive integer")]
    Pole { context: &'static str, value: f64 },
    /// The power series failed to converge within the term cap.
    #[error("1F1({a}, {c}, {z}) did not converge within {terms} terms")]
    Convergence {
        a: f64,
        c: f64,
        z: f64,
        terms: usize,
    },
    /// An argument is outside the supported domain.
    #[error("domain error: {0}")]
    Domain(String),
}

/// Lanczos coefficients (g = 7, 9 terms), accurate to ~1e-13 relative.
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `sin(pi x)` with argument reduction, exact at integers.
fn sin_pi(x: f64) -> f64 {
    let mut r = x % 2.0;
    if r < 0.0 {
        r += 2.0;
    }
    let arg = if r < 0.5 {
        r
    } else if r < 1.5 {
        1.0 - r
    } else {
        r - 2.0
    };
    (PI * arg).sin()
}

/// Returns `Some(k)` when `x` is within [`INTEGER_SNAP_TOL`] of a
/// non-positive integer `k`.
pub fn nearest_nonpositive_integer(x: f64) -> Option<i64> {
    let r = x.round();
    if r <= 0.5 && (x - r).abs() <= INTEGER_SNAP_TOL {
        Some(r as i64)
    } else {
        None
    }
}

/// Log-gamma for strictly positive argument (Lanczos, g = 7).
fn lanczos_ln_gamma(x: f64) -> f64 {
    debug_assert!(x >= 0.5);
    let xm1 = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &coeff) in LANCZOS.iter().enumerate().skip(1) {
        acc += coeff / (xm1 + i as f64);
    }
    let t = xm1 + 7.5;
    0.5 * (2.0 * PI).ln() + (xm1 + 0.5) * t.ln() - t + acc.ln()
}

/// `(ln |Gamma(x)|, sign of Gamma(x))` for any non-pole argument.
///
/// At a pole (non-positive integer) the result is `(inf, 0.0)`; callers
/// that must reject poles should test with [`nearest_nonpositive_integer`]
/// first. Negative arguments go through the reflection formula
/// `Gamma(x) Gamma(1 - x) = pi / sin(pi x)`, whose sine factor carries the
/// sign.
pub fn ln_abs_gamma(x: f64) -> (f64, f64) {
    if x >= 0.5 {
        return (lanczos_ln_gamma(x), 1.0);
    }
    let s = sin_pi(x);
    if s == 0.0 {
        return (f64::INFINITY, 0.0);
    }
    let ln = PI.ln() - s.abs().ln() - lanczos_ln_gamma(1.0 - x);
    (ln, s.signum())
}

/// Log-gamma for `x > 0`; `NaN` outside that domain.
pub fn ln_gamma(x: f64) -> f64 {
    if x > 0.0 {
        ln_abs_gamma(x).0
    } else {
        f64::NAN
    }
}

/// The gamma function, valid for any non-pole argument (signed).
pub fn gamma(x: f64) -> f64 {
    let (ln, sign) = ln_abs_gamma(x);
    sign * ln.exp()
}

/// Kummer's confluent hypergeometric function `1F1(a, c, z)`.
///
/// Terminates exactly (degree `-a` polynomial) when `a` snaps to a
/// non-positive integer. A non-positive-integer `c` is a pole unless the
/// numerator terminates strictly first (`a` integer with `c < a <= 0`).
pub fn kummer_1f1(a: f64, c: f64, z: f64) -> Result<f64, SpecFunError> {
    if !(a.is_finite() && c.is_finite() && z.is_finite()) {
        return Err(SpecFunError::Domain(format!(
            "non-finite argument in 1F1({a}, {c}, {z})"
        )));
    }
    let a_int = nearest_nonpositive_integer(a);
    if let Some(kc) = nearest_nonpositive_integer(c) {
        match a_int {
            Some(ka) if ka > kc => {} // series stops before the denominator pole
            _ => {
                return Err(SpecFunError::Pole {
                    context: "c",
                    value: c,
                })
            }
        }
    }

    if let Some(ka) = a_int {
        // Exact polynomial of degree n = -ka.
        let n = (-ka) as usize;
        let a_snapped = ka as f64;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 0..n {
            let kf = k as f64;
            term *= (a_snapped + kf) * z / ((c + kf) * (kf + 1.0));
            sum += term;
        }
        return Ok(sum);
    }

    let mut term = 1.0;
    let mut sum = 1.0;
    let mut small_streak = 0;
    for k in 0..MAX_SERIES_TERMS {
        let kf = k as f64;
        term *= (a + kf) * z / ((c + kf) * (kf + 1.0));
        sum += term;
        if !sum.is_finite() {
            break;
        }
        if term.abs() <= SERIES_TOL * sum.abs() {
            small_streak += 1;
            if small_streak >= 3 {
                return Ok(sum);
            }
        } else {
            small_streak = 0;
        }
    }
    Err(SpecFunError::Convergence {
        a,
        c,
        z,
        terms: MAX_SERIES_TERMS,
    })
}

/// `d/dz 1F1(a, c, z) = (a/c) 1F1(a + 1, c + 1, z)`.
pub fn kummer_1f1_dz(a: f64, c: f64, z: f64) -> Result<f64, SpecFunError> {
    Ok(a / c * kummer_1f1(a + 1.0, c + 1.0, z)?)
}

/// Large-`z` behavior of `1F1(a, c, z)`:
///
/// `Gamma(c)/Gamma(a) e^z z^(a-c) [1 + sum_k (c-a)_k (1-a)_k / (k! z^k)]`.
///
/// The bracketed correction series is truncated adaptively: summation
/// stops at a zero term (exact for positive-integer `a`), when a term
/// falls below `1e-16` of the partial sum, when terms stop shrinking
/// (asymptotic-series divergence onset), or at 30 terms. Requires
/// `z > 0`; `a` and `c` must not sit at gamma poles.
pub fn kummer_asymptotic(a: f64, c: f64, z: f64) -> Result<f64, SpecFunError> {
    if !(z.is_finite() && z > 0.0) {
        return Err(SpecFunError::Domain(format!(
            "asymptotic form needs z > 0, got z = {z}"
        )));
    }
    if nearest_nonpositive_integer(a).is_some() {
        return Err(SpecFunError::Pole {
            context: "a",
            value: a,
        });
    }
    if nearest_nonpositive_integer(c).is_some() {
        return Err(SpecFunError::Pole {
            context: "c",
            value: c,
        });
    }
    let (ln_c, sign_c) = ln_abs_gamma(c);
    let (ln_a, sign_a) = ln_abs_gamma(a);
    let log_mag = ln_c - ln_a + z + (a - c) * z.ln();

    let mut sum = 1.0;
    let mut term = 1.0;
    for k in 0..MAX_ASYMPTOTIC_TERMS {
        let kf = k as f64;
        let next = term * (c - a + kf) * (1.0 - a + kf) / ((kf + 1.0) * z);
        if next == 0.0 {
            break; // numerator hit a Pochhammer zero: series is exact
        }
        if next.abs() >= term.abs() {
            break; // divergence onset
        }
        sum += next;
        term = next;
        if next.abs() <= SERIES_TOL * sum.abs() {
            break;
        }
    }
    Ok(sign_c * sign_a * log_mag.exp() * sum)
}

/// Associated Laguerre polynomial `L_n^mu(x)` by upward recurrence.
pub fn laguerre(n: u32, mu: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + mu - x;
    for k in 2..=n {
        let kf = f64::from(k);
        let next = ((2.0 * kf - 1.0 + mu - x) * cur - (kf - 1.0 + mu) * prev) / kf;
        prev = cur;
        cur = next;
    }
    cur
}

/// Numerical left-hand side of the radial Laguerre derivative identity:
/// `d/dr L_n^mu(M omega r^2)` by centered differences with
/// `h = 1e-6 max(1, |r|)`.
///
/// The analytic right-hand side is `-2 M omega r L_{n-1}^{mu+1}(M omega
/// r^2)` (zero for `n = 0`); tests pin the two against each other.
pub fn laguerre_derivative_lhs(n: u32, mu: f64, mass: f64, omega: f64, r: f64) -> f64 {
    let h = 1e-6 * r.abs().max(1.0);
    let f = |rr: f64| laguerre(n, mu, mass * omega * rr * rr);
    (f(r + h) - f(r - h)) / (2.0 * h)
}
