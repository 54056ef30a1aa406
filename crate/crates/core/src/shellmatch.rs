//! Finite-radius flux-shell model: exact interior/exterior matching across
//! the delta shell, the quantization condition at finite shell radius, and
//! the zero-radius limit weights that decide between regular and irregular
//! exterior solutions.
//!
//! Inside the shell (`r < R`) the flux is absent and the radial solution is
//! the regular oscillator function of order `|m|`; outside it feels the full
//! flux `alpha` and is a combination `A u_A + B u_B` of the regular
//! (`r^{+|m+alpha|}`) and irregular (`r^{-|m+alpha|}`) Kummer-type
//! solutions. Matching value continuity and the derivative jump
//! `[df/dr] = (alpha s / R) f(R)` fixes `(A, B)`; demanding that the
//! growing `e^{+M omega r^2/2}` asymptotic part of the matched exterior
//! cancel quantizes the energy at finite `R`. As `R -> 0` the weights tend
//! to closed-form constants whose vanishing reproduces the channel
//! classification of [`crate::spectrum`].

use num_rational::Rational64;
use thiserror::Error;

use crate::specfun::{
    kummer_1f1, kummer_1f1_dz, ln_abs_gamma, nearest_nonpositive_integer, SpecFunError,
};
use crate::spectrum::{wavenumbers, PhysicalParams, Spin};

/// Scan resolution for [`solve_finite_r_spectrum`]: dense enough that level
/// spacings down to `0.05 omega` are never merged at the tested parameters.
const SCAN_POINTS: usize = 400;
/// Bisection stops at `|dE| <= BISECT_TOL * M`.
const BISECT_TOL: f64 = 1e-10;
/// `R * sqrt(M omega)` below this is the lowest-order regime.
const LOWEST_ORDER_REGIME: f64 = 0.1;

#[derive(Debug, Error)]
pub enum MatchError {
    #[error("|m + alpha| = {coupling} is an integer; the irregular exterior solution degenerates")]
    Pole { coupling: f64 },
    #[error("matching system is singular at E = {energy}")]
    SingularSystem { energy: f64 },
    #[error("m + alpha vanishes; zero-radius weights are undefined")]
    Division,
    #[error("found {found} spectrum roots in the window, needed {requested}")]
    NoRoot { found: usize, requested: usize },
    #[error("invalid shell: {0}")]
    InvalidShell(String),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

/// A flux line regularized to a shell of radius `R`: the flux sits entirely
/// on `r = R`, so the interior is flux-free.
#[derive(Debug, Clone, Copy)]
pub struct ShellModel {
    pub radius: f64,
    pub params: PhysicalParams,
    pub m: i64,
}

impl ShellModel {
    pub fn new(radius: f64, params: PhysicalParams, m: i64) -> Result<Self, MatchError> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(MatchError::InvalidShell(format!(
                "shell radius must be positive and finite, got {radius}"
            )));
        }
        Ok(Self { radius, params, m })
    }

    /// True when `R` is far below the oscillator length, where the
    /// lowest-order (`F -> 1`) forms are accurate.
    pub fn in_lowest_order_regime(&self) -> bool {
        self.radius * self.params.mass_omega().sqrt() < LOWEST_ORDER_REGIME
    }

    fn coupling(&self) -> f64 {
        self.params.coupling(self.m)
    }
}

/// Amplitudes of the matched solution at trial energy `E` (interior
/// normalization fixed to 1).
#[derive(Debug, Clone, Copy)]
pub struct MatchedCoefficients {
    /// Amplitude of the regular exterior solution `r^{+|m+alpha|} ...`.
    pub regular: f64,
    /// Amplitude of the irregular exterior solution `r^{-|m+alpha|} ...`.
    pub irregular: f64,
    /// Interior amplitude (always 1 in this normalization).
    pub interior: f64,
    /// Trial energy the match was computed at.
    pub energy: f64,
}

/// Value and radial derivative of one basis solution at the shell.
#[derive(Debug, Clone, Copy)]
struct Basis {
    value: f64,
    derivative: f64,
}

/// Kummer parameters `(a, c)` of a solution `r^p e^{-x/2} F(a, c, x)` with
/// reduced wavenumber `kappa = k^2 / (2 M omega)`: `a = (1 + p - kappa)/2`,
/// `c = 1 + p`.
fn kummer_parameters(p: f64, kappa: f64) -> (f64, f64) {
    (0.5 * (1.0 + p - kappa), 1.0 + p)
}

/// Exact basis element `r^p e^{-M omega r^2/2} F(a, c, M omega r^2)` and its
/// derivative (term-wise differentiated series).
fn kummer_basis(p: f64, a: f64, c: f64, lam: f64, r: f64) -> Result<Basis, SpecFunError> {
    let x = lam * r * r;
    let f = kummer_1f1(a, c, x)?;
    let df = kummer_1f1_dz(a, c, x)?;
    let gauss = (-0.5 * x).exp();
    let value = r.powf(p) * gauss * f;
    let derivative =
        gauss * (p * r.powf(p - 1.0) * f + (2.0 * lam * df - lam * f) * r.powf(p + 1.0));
    Ok(Basis { value, derivative })
}

/// Lowest-order basis: `F -> 1` and `dF/dr -> (2a/c) M omega r`.
fn lowest_order_basis(p: f64, a: f64, c: f64, lam: f64, r: f64) -> Basis {
    let x = lam * r * r;
    let gauss = (-0.5 * x).exp();
    let value = r.powf(p) * gauss;
    let derivative = gauss * (p * r.powf(p - 1.0) + (2.0 * lam * (a / c) - lam) * r.powf(p + 1.0));
    Basis { value, derivative }
}

fn require_fractional_coupling(shell: &ShellModel) -> Result<f64, MatchError> {
    let mu = shell.coupling();
    let e = mu.abs();
    if (e - e.round()).abs() < f64::EPSILON * 8.0 * (1.0 + e) {
        return Err(MatchError::Pole { coupling: mu });
    }
    Ok(e)
}

/// Interior solution `C r^{|m|} e^{-M omega r^2/2}
/// F((|m|+1-kappa_in)/2, |m|+1, M omega r^2)` with `C = 1`.
///
/// Regular at the origin for every channel; the only failure mode is
/// non-convergence of the series, which cannot occur for `c >= 1`, `x >= 0`.
pub fn interior_solution(shell: &ShellModel, energy: f64, r: f64) -> Result<f64, MatchError> {
    let lam = shell.params.mass_omega();
    let kappa_in = wavenumbers(&shell.params, shell.m, energy).k_in_sq / (2.0 * lam);
    let p = shell.m.unsigned_abs() as f64;
    let (a, c) = kummer_parameters(p, kappa_in);
    Ok(kummer_basis(p, a, c, lam, r)?.value)
}

/// Solves the matching conditions at `r = R` for the exterior amplitudes
/// `(A, B)` with interior amplitude `C = 1`:
///
/// ```text
/// A u_A(R) + B u_B(R)  = u_in(R)                       (continuity)
/// A u_A'(R) + B u_B'(R) = u_in'(R) + (alpha s / R) u_in(R)   (jump)
/// ```
///
/// using exact Kummer values and term-wise series derivatives. A vanishing
/// flux makes the shell inert (`A = 1`, `B = 0`) for every energy; any other
/// integer `|m + alpha|` degenerates the exterior pair and is rejected.
pub fn match_coefficients(
    shell: &ShellModel,
    energy: f64,
) -> Result<MatchedCoefficients, MatchError> {
    match_with_basis(shell, energy, &kummer_basis)
}

/// Same solve with the lowest-order basis (`F -> 1`,
/// `dF/dr -> (2a/c) M omega r`), the regime used by the zero-radius limit.
pub fn match_coefficients_lowest_order(
    shell: &ShellModel,
    energy: f64,
) -> Result<MatchedCoefficients, MatchError> {
    match_with_basis(shell, energy, &|p, a, c, lam, r| {
        Ok(lowest_order_basis(p, a, c, lam, r))
    })
}

fn match_with_basis(
    shell: &ShellModel,
    energy: f64,
    basis: &dyn Fn(f64, f64, f64, f64, f64) -> Result<Basis, SpecFunError>,
) -> Result<MatchedCoefficients, MatchError> {
    if shell.params.alpha == 0.0 {
        return Ok(MatchedCoefficients {
            regular: 1.0,
            irregular: 0.0,
            interior: 1.0,
            energy,
        });
    }
    let e = require_fractional_coupling(shell)?;
    let lam = shell.params.mass_omega();
    let s = shell.params.spin.sign();
    let waves = wavenumbers(&shell.params, shell.m, energy);
    let kappa_out = waves.k_out_sq / (2.0 * lam);
    let kappa_in = waves.k_in_sq / (2.0 * lam);
    let r = shell.radius;

    let p_in = shell.m.unsigned_abs() as f64;
    let (a_in, c_in) = kummer_parameters(p_in, kappa_in);
    let u_in = basis(p_in, a_in, c_in, lam, r)?;
    let (a_reg, c_reg) = kummer_parameters(e, kappa_out);
    let u_reg = basis(e, a_reg, c_reg, lam, r)?;
    let (a_irr, c_irr) = kummer_parameters(-e, kappa_out);
    let u_irr = basis(-e, a_irr, c_irr, lam, r)?;

    let rhs_jump = u_in.derivative + shell.params.alpha * s / r * u_in.value;
    // The determinant is the exterior Wronskian, exactly -2|m+alpha|/R.
    let det = u_reg.value * u_irr.derivative - u_irr.value * u_reg.derivative;
    if det.abs() < f64::EPSILON * (u_reg.value.abs() * u_irr.derivative.abs() + 1.0) {
        return Err(MatchError::SingularSystem { energy });
    }
    Ok(MatchedCoefficients {
        regular: (u_in.value * u_irr.derivative - u_irr.value * rhs_jump) / det,
        irregular: (u_reg.value * rhs_jump - u_in.value * u_reg.derivative) / det,
        interior: 1.0,
        energy,
    })
}

/// Shares of the shell-value carried by the regular and irregular exterior
/// solutions, `(A u_A(R) / f(R), B u_B(R) / f(R))`; they sum to 1 and tend
/// to [`lowest_order_coefficients`] as `R -> 0`.
pub fn exterior_weights(
    shell: &ShellModel,
    coeffs: &MatchedCoefficients,
) -> Result<(f64, f64), MatchError> {
    if shell.params.alpha == 0.0 {
        return Ok((1.0, 0.0));
    }
    let e = require_fractional_coupling(shell)?;
    let lam = shell.params.mass_omega();
    let kappa_out = wavenumbers(&shell.params, shell.m, coeffs.energy).k_out_sq / (2.0 * lam);
    let r = shell.radius;
    let (a_reg, c_reg) = kummer_parameters(e, kappa_out);
    let (a_irr, c_irr) = kummer_parameters(-e, kappa_out);
    let reg = coeffs.regular * kummer_basis(e, a_reg, c_reg, lam, r)?.value;
    let irr = coeffs.irregular * kummer_basis(-e, a_irr, c_irr, lam, r)?.value;
    let total = reg + irr;
    if total == 0.0 {
        return Err(MatchError::SingularSystem {
            energy: coeffs.energy,
        });
    }
    Ok((reg / total, irr / total))
}

/// Zero-radius limit of the exterior weights:
/// `c_reg = 1/2 + (|m| + alpha s) / (2 |m + alpha|)` and
/// `c_irr = 1 - c_reg`.
///
/// `c_reg` vanishes exactly on the whole band of channels whose spin-orbit
/// term is attractive (`|m| + alpha s = -|m + alpha|`).  The channels
/// classified irregular by [`crate::spectrum::classify_state`] are the
/// subset of that band where the irregular solution is also square
/// integrable (`|m + alpha| < 1`); elsewhere in the band the regular
/// solution is kept despite the vanishing limit weight.
pub fn lowest_order_coefficients(m: i64, alpha: f64, spin: Spin) -> Result<(f64, f64), MatchError> {
    let mu = m as f64 + alpha;
    if mu == 0.0 {
        return Err(MatchError::Division);
    }
    let share = (m.unsigned_abs() as f64 + alpha * spin.sign()) / (2.0 * mu.abs());
    Ok((0.5 + share, 0.5 - share))
}

/// [`lowest_order_coefficients`] in exact rational arithmetic for rational
/// flux, immune to rounding in the vanishing test.
pub fn lowest_order_coefficients_rational(
    m: i64,
    alpha: Rational64,
    spin: Spin,
) -> Result<(Rational64, Rational64), MatchError> {
    let mu = Rational64::from_integer(m) + alpha;
    if mu.numer() == &0 {
        return Err(MatchError::Division);
    }
    let sign = Rational64::from_integer(if spin == Spin::Up { 1 } else { -1 });
    let abs_mu = if mu < Rational64::from_integer(0) {
        -mu
    } else {
        mu
    };
    let share =
        (Rational64::from_integer(m.abs()) + alpha * sign) / (Rational64::from_integer(2) * abs_mu);
    let half = Rational64::new(1, 2);
    Ok((half + share, half - share))
}

/// Coefficient of the exponentially growing `e^{+M omega r^2/2}` asymptotic
/// part of the matched exterior solution,
///
/// ```text
/// A Gamma(c_A)/Gamma(a_A) (M omega)^{a_A - c_A}
///   + B Gamma(c_B)/Gamma(a_B) (M omega)^{a_B - c_B},
/// ```
///
/// whose roots in `E` are the bound states of the finite-radius shell. A
/// `1/Gamma` factor at a pole contributes exactly zero (the corresponding
/// Kummer function truncates to a polynomial).
pub fn quantization_mismatch(shell: &ShellModel, energy: f64) -> Result<f64, MatchError> {
    let lam = shell.params.mass_omega();
    let kappa_out = wavenumbers(&shell.params, shell.m, energy).k_out_sq / (2.0 * lam);
    if shell.params.alpha == 0.0 {
        // Inert shell: the interior regular solution extends everywhere.
        let (a, c) = kummer_parameters(shell.m.unsigned_abs() as f64, kappa_out);
        return Ok(growing_coefficient(1.0, a, c, lam));
    }
    let e = require_fractional_coupling(shell)?;
    let coeffs = match_coefficients(shell, energy)?;
    let (a_reg, c_reg) = kummer_parameters(e, kappa_out);
    let (a_irr, c_irr) = kummer_parameters(-e, kappa_out);
    Ok(growing_coefficient(coeffs.regular, a_reg, c_reg, lam)
        + growing_coefficient(coeffs.irregular, a_irr, c_irr, lam))
}

/// `amplitude * Gamma(c)/Gamma(a) * lam^{a-c}`, with the `1/Gamma(a)` zero
/// at poles of `Gamma(a)` taken exactly.
fn growing_coefficient(amplitude: f64, a: f64, c: f64, lam: f64) -> f64 {
    if amplitude == 0.0 || nearest_nonpositive_integer(a).is_some() {
        return 0.0;
    }
    let (ln_c, sign_c) = ln_abs_gamma(c);
    let (ln_a, sign_a) = ln_abs_gamma(a);
    amplitude * sign_c * sign_a * (ln_c - ln_a + (a - c) * lam.ln()).exp()
}

/// Bound states of the finite-radius shell inside `window`: scans
/// [`quantization_mismatch`] on a 400-point grid, bisects each sign change
/// to `|dE| <= 1e-10 M`, and returns the roots in ascending order.
///
/// Errors with `NoRoot` if fewer than `count` roots are found.
pub fn solve_finite_r_spectrum(
    shell: &ShellModel,
    window: (f64, f64),
    count: usize,
) -> Result<Vec<f64>, MatchError> {
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(MatchError::InvalidShell(format!(
            "energy window [{lo}, {hi}] is not an increasing finite pair"
        )));
    }
    let tol = BISECT_TOL * shell.params.mass;
    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let mut roots: Vec<f64> = Vec::new();
    let push = |root: f64, roots: &mut Vec<f64>| {
        if roots
            .last()
            .is_none_or(|last| (root - last).abs() > 2.0 * tol)
        {
            roots.push(root);
        }
    };
    let mut prev_e = lo;
    let mut prev_g = quantization_mismatch(shell, lo)?;
    if prev_g == 0.0 {
        push(lo, &mut roots);
    }
    for i in 1..SCAN_POINTS {
        let e = lo + step * i as f64;
        let g = quantization_mismatch(shell, e)?;
        if g == 0.0 {
            push(e, &mut roots);
        } else if prev_g != 0.0 && g.signum() != prev_g.signum() {
            let root = bisect(shell, (prev_e, prev_g), (e, g), tol)?;
            push(root, &mut roots);
        }
        (prev_e, prev_g) = (e, g);
    }
    if roots.len() < count {
        return Err(MatchError::NoRoot {
            found: roots.len(),
            requested: count,
        });
    }
    Ok(roots)
}

fn bisect(
    shell: &ShellModel,
    mut neg_side: (f64, f64),
    mut pos_side: (f64, f64),
    tol: f64,
) -> Result<f64, MatchError> {
    while (pos_side.0 - neg_side.0).abs() > tol {
        let mid = 0.5 * (neg_side.0 + pos_side.0);
        let g = quantization_mismatch(shell, mid)?;
        if g == 0.0 {
            return Ok(mid);
        }
        if g.signum() == neg_side.1.signum() {
            neg_side = (mid, g);
        } else {
            pos_side = (mid, g);
        }
    }
    Ok(0.5 * (neg_side.0 + pos_side.0))
}
