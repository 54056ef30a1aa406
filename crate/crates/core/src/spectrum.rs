//! Closed-form bound-state energies and degeneracy structure.
//!
//! Channels are labeled by the orbital number `m`, the spin projection
//! `s = +/-1`, and the flux `alpha = N + xi` (`N` integer, `xi in [0, 1)`).
//! The effective angular coupling is `mu = m + alpha`.
//!
//! For a generic channel only the solution regular at the origin is
//! admissible and the spectrum is
//!
//! `E^2 = M^2 + 2 M omega [ |mu| + s mu + 2n ]`.
//!
//! Exactly one channel per spin orientation also admits a
//! square-integrable irregular solution when the flux has a fractional
//! part:
//!
//! * case A (`m = -N`, spin down, `alpha > 0`): core `r^{-xi}`,
//!   `E^2 = M^2 + 4 M omega (n - xi)`;
//! * case B (`m = -N - 1`, spin up, `alpha < 0`): core `r^{xi - 1}`,
//!   `E^2 = M^2 + 4 M omega (n + xi - 1)`.
//!
//! Both irregular series may dip below `E^2 = 0` for `n = 0`; that is
//! reported as [`SpectrumError::NonRealEnergy`] rather than silently
//! clamped. The nonrelativistic (Pauli) energies `epsilon` satisfy
//! `E = M + epsilon + O(epsilon^2 / M)`.

use std::fmt;

use thiserror::Error;

/// Errors from spectrum construction.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    /// Parameter validation failed (`mass`, `omega` must be positive and
    /// finite, `alpha` finite).
    #[error("invalid physical parameters: {0}")]
    InvalidParams(String),
    /// An operation was asked for on a channel of the wrong class.
    #[error("wrong channel class: {0}")]
    Classification(String),
    /// The closed-form radicand is negative: no real bound-state energy.
    #[error("energy is not real: E^2 = {e_squared} < 0")]
    NonRealEnergy { e_squared: f64 },
    /// The requested degeneracy family is m-independent and needs an
    /// explicit m window to be finite.
    #[error("energy is m-independent in this channel; supply an m window")]
    MissingWindow,
}

/// Spin projection `s = +/-1` along the flux axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    /// `+1.0` or `-1.0`.
    pub fn sign(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }

    /// Parses `+1` / `-1`.
    pub fn from_sign(value: i64) -> Result<Self, SpectrumError> {
        match value {
            1 => Ok(Spin::Up),
            -1 => Ok(Spin::Down),
            other => Err(SpectrumError::InvalidParams(format!(
                "spin must be +1 or -1, got {other}"
            ))),
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spin::Up => "+1",
            Spin::Down => "-1",
        })
    }
}

/// Sign of the square root taken for the relativistic energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Positive,
    Negative,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Positive => 1.0,
            Branch::Negative => -1.0,
        }
    }
}

/// Which radial solution the channel selects at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regularity {
    /// Regular core `r^{|mu|}`.
    Regular,
    /// Irregular core `r^{-xi}` (spin down, `m = -N`).
    IrregularA,
    /// Irregular core `r^{xi - 1}` (spin up, `m = -N - 1`).
    IrregularB,
}

impl fmt::Display for Regularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regularity::Regular => "regular",
            Regularity::IrregularA => "irregular-a",
            Regularity::IrregularB => "irregular-b",
        })
    }
}

/// Flux split into integer and fractional parts, `alpha = N + xi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxDecomposition {
    /// Integer part `N = floor(alpha)`.
    pub integer: i64,
    /// Fractional part `xi in [0, 1)`.
    pub fractional: f64,
}

/// Splits `alpha` as `N + xi` with `N = floor(alpha)`, `xi in [0, 1)`.
pub fn decompose_flux(alpha: f64) -> FluxDecomposition {
    let n = alpha.floor();
    FluxDecomposition {
        integer: n as i64,
        fractional: alpha - n,
    }
}

/// Model parameters: mass, oscillator frequency, flux, spin projection.
///
/// Natural units (`hbar = c = 1`); all lengths downstream scale as
/// `1/sqrt(M omega)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub mass: f64,
    pub omega: f64,
    pub alpha: f64,
    pub spin: Spin,
}

impl PhysicalParams {
    pub fn new(mass: f64, omega: f64, alpha: f64, spin: Spin) -> Result<Self, SpectrumError> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(SpectrumError::InvalidParams(format!(
                "mass must be positive and finite, got {mass}"
            )));
        }
        if !(omega.is_finite() && omega > 0.0) {
            return Err(SpectrumError::InvalidParams(format!(
                "omega must be positive and finite, got {omega}"
            )));
        }
        if !alpha.is_finite() {
            return Err(SpectrumError::InvalidParams(format!(
                "alpha must be finite, got {alpha}"
            )));
        }
        Ok(Self {
            mass,
            omega,
            alpha,
            spin,
        })
    }

    /// `M omega`, the inverse square of the oscillator length.
    pub fn mass_omega(&self) -> f64 {
        self.mass * self.omega
    }

    /// Effective angular coupling `mu = m + alpha`.
    pub fn coupling(&self, m: i64) -> f64 {
        m as f64 + self.alpha
    }

    /// Flux decomposition `alpha = N + xi`.
    pub fn flux(&self) -> FluxDecomposition {
        decompose_flux(self.alpha)
    }
}

/// Orbital and radial quantum numbers of a level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuantumNumbers {
    pub m: i64,
    pub n: u32,
}

impl QuantumNumbers {
    pub fn new(m: i64, n: u32) -> Self {
        Self { m, n }
    }
}

/// One relativistic level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyLevel {
    /// Signed energy (sign follows the branch).
    pub value: f64,
    pub branch: Branch,
    pub class: Regularity,
    /// Channel that produced the level; irregular series pin `m` to the
    /// single channel they live in.
    pub qn: QuantumNumbers,
}

/// Squared wavenumbers entering the radial equations at energy `E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavenumbers {
    /// Exterior (flux felt): `E^2 - M^2 + 2 M omega [1 - s (m + alpha)]`.
    pub k_out_sq: f64,
    /// Interior of a flux shell (no flux): `E^2 - M^2 + 2 M omega (1 - s m)`.
    pub k_in_sq: f64,
    /// Oscillator scale `lambda^2 = (M omega)^2`.
    pub lambda_sq: f64,
}

/// Wavenumbers of channel `m` at energy `energy`.
pub fn wavenumbers(params: &PhysicalParams, m: i64, energy: f64) -> Wavenumbers {
    let s = params.spin.sign();
    let e2m2 = energy * energy - params.mass * params.mass;
    let two_mw = 2.0 * params.mass_omega();
    Wavenumbers {
        k_out_sq: e2m2 + two_mw * (1.0 - s * params.coupling(m)),
        k_in_sq: e2m2 + two_mw * (1.0 - s * m as f64),
        lambda_sq: params.mass_omega() * params.mass_omega(),
    }
}

/// Classifies channel `m`: which radial solution is physical at the
/// origin.
///
/// Irregular cases require a genuinely fractional flux (`xi > 0`);
/// integer flux is always regular.
pub fn classify_state(m: i64, params: &PhysicalParams) -> Regularity {
    let flux = params.flux();
    if flux.fractional > 0.0 {
        if params.alpha > 0.0 && params.spin == Spin::Down && m == -flux.integer {
            return Regularity::IrregularA;
        }
        if params.alpha < 0.0 && params.spin == Spin::Up && m == -flux.integer - 1 {
            return Regularity::IrregularB;
        }
    }
    Regularity::Regular
}

fn level_from_e_squared(
    e_squared: f64,
    branch: Branch,
    class: Regularity,
    qn: QuantumNumbers,
) -> Result<EnergyLevel, SpectrumError> {
    if e_squared < 0.0 {
        return Err(SpectrumError::NonRealEnergy { e_squared });
    }
    Ok(EnergyLevel {
        value: branch.sign() * e_squared.sqrt(),
        branch,
        class,
        qn,
    })
}

/// Energy of the regular solution in channel `(m, n)`:
/// `E = +/- sqrt(M^2 + 2 M omega [ |mu| + s mu + 2n ])`.
///
/// Defined for every channel (it is the spectrum of the regular-boundary
/// radial problem even where the physical state is irregular), and always
/// real since `|mu| + s mu >= 0`.
pub fn energy_regular(
    params: &PhysicalParams,
    qn: QuantumNumbers,
    branch: Branch,
) -> Result<EnergyLevel, SpectrumError> {
    let mu = params.coupling(qn.m);
    let s = params.spin.sign();
    let e2 = params.mass * params.mass
        + 2.0 * params.mass_omega() * (mu.abs() + s * mu + 2.0 * f64::from(qn.n));
    level_from_e_squared(e2, branch, Regularity::Regular, qn)
}

/// Energy of the case-A irregular series (`m = -N`, spin down):
/// `E = +/- sqrt(M^2 + 4 M omega (n - xi))`.
///
/// Requires spin down and `alpha >= 0`; integer flux (`xi = 0`) is
/// admitted and reproduces the regular series of the `mu = 0` channel.
pub fn energy_irregular_a(
    params: &PhysicalParams,
    n: u32,
    branch: Branch,
) -> Result<EnergyLevel, SpectrumError> {
    if params.spin != Spin::Down || params.alpha < 0.0 {
        return Err(SpectrumError::Classification(format!(
            "irregular case A needs spin -1 and alpha >= 0, got spin {}, alpha = {}",
            params.spin, params.alpha
        )));
    }
    let flux = params.flux();
    let e2 =
        params.mass * params.mass + 4.0 * params.mass_omega() * (f64::from(n) - flux.fractional);
    level_from_e_squared(
        e2,
        branch,
        Regularity::IrregularA,
        QuantumNumbers::new(-flux.integer, n),
    )
}

/// Energy of the case-B irregular series (`m = -N - 1`, spin up):
/// `E = +/- sqrt(M^2 + 4 M omega (n + xi - 1))`.
///
/// Requires spin up and `alpha <= 0`; integer flux is admitted.
pub fn energy_irregular_b(
    params: &PhysicalParams,
    n: u32,
    branch: Branch,
) -> Result<EnergyLevel, SpectrumError> {
    if params.spin != Spin::Up || params.alpha > 0.0 {
        return Err(SpectrumError::Classification(format!(
            "irregular case B needs spin +1 and alpha <= 0, got spin {}, alpha = {}",
            params.spin, params.alpha
        )));
    }
    let flux = params.flux();
    let e2 = params.mass * params.mass
        + 4.0 * params.mass_omega() * (f64::from(n) + flux.fractional - 1.0);
    level_from_e_squared(
        e2,
        branch,
        Regularity::IrregularB,
        QuantumNumbers::new(-flux.integer - 1, n),
    )
}

/// Nonrelativistic (Pauli-limit) energy `epsilon` of a level, defined by
/// `E_+ = M + epsilon + O(epsilon^2/M)`:
///
/// * regular: `omega [ 2n + |mu| + s mu ]`;
/// * case A: `omega [ 2n - 2 xi ]`;
/// * case B: `omega [ 2n - 2 + 2 xi ]`.
pub fn energy_nonrel(
    params: &PhysicalParams,
    qn: QuantumNumbers,
    class: Regularity,
) -> Result<f64, SpectrumError> {
    let n = f64::from(qn.n);
    let xi = params.flux().fractional;
    match class {
        Regularity::Regular => {
            let mu = params.coupling(qn.m);
            Ok(params.omega * (2.0 * n + mu.abs() + params.spin.sign() * mu))
        }
        Regularity::IrregularA => {
            if params.spin != Spin::Down || params.alpha < 0.0 {
                return Err(SpectrumError::Classification(
                    "case-A Pauli limit needs spin -1 and alpha >= 0".into(),
                ));
            }
            Ok(params.omega * (2.0 * n - 2.0 * xi))
        }
        Regularity::IrregularB => {
            if params.spin != Spin::Up || params.alpha > 0.0 {
                return Err(SpectrumError::Classification(
                    "case-B Pauli limit needs spin +1 and alpha <= 0".into(),
                ));
            }
            Ok(params.omega * (2.0 * n - 2.0 + 2.0 * xi))
        }
    }
}

/// Shifted Pauli energy `epsilon + omega` that a spinless particle (no
/// spin-orbit term) would have on the *irregular* solution of the same
/// channel: `omega [ 2n + 1 - |mu| ]`, i.e. `omega [ 2n + 1 - xi ]` for
/// case A and `omega [ 2n + xi ]` for case B.
///
/// Only the two irregular classes support this comparison; asking for the
/// regular class is a classification error.
pub fn energy_nonrel_no_spin_orbit(
    params: &PhysicalParams,
    qn: QuantumNumbers,
    class: Regularity,
) -> Result<f64, SpectrumError> {
    let n = f64::from(qn.n);
    let xi = params.flux().fractional;
    match class {
        Regularity::Regular => Err(SpectrumError::Classification(
            "the no-spin-orbit comparison is defined for irregular channels only".into(),
        )),
        Regularity::IrregularA => Ok(params.omega * (2.0 * n + 1.0 - xi)),
        Regularity::IrregularB => Ok(params.omega * (2.0 * n + xi)),
    }
}

/// All regular levels degenerate with the seed `(m, n)`, within
/// `|m - m_seed| <= max_shift` (or inside `m_window` when the energy is
/// m-independent).
///
/// With `s mu > 0` the degenerate partners form the shift family
/// `(m - s j, n + j)`; they exist for `-max_shift <= j <= max_shift`
/// subject to `n + j >= 0` and the partner staying in the `s mu > 0`
/// region. With `s mu <= 0` the energy `E^2 = M^2 + 4 M omega n` does not
/// depend on `m` at all, so a finite `m_window = (lo, hi)` must be given;
/// every regular channel in the window with `s mu' <= 0` belongs. Channels
/// classified irregular are excluded in both cases (their spectrum is the
/// shifted irregular series, not this one).
///
/// The seed itself must be a regular channel.
pub fn degeneracy_family(
    params: &PhysicalParams,
    qn: QuantumNumbers,
    max_shift: u32,
    m_window: Option<(i64, i64)>,
) -> Result<Vec<QuantumNumbers>, SpectrumError> {
    if classify_state(qn.m, params) != Regularity::Regular {
        return Err(SpectrumError::Classification(format!(
            "degeneracy seed (m = {}, n = {}) is not a regular channel",
            qn.m, qn.n
        )));
    }
    let s = params.spin.sign();
    let smu = s * params.coupling(qn.m);
    let mut family = Vec::new();
    if smu > 0.0 {
        let shift = i64::from(max_shift);
        for j in -shift..=shift {
            if j < -i64::from(qn.n) {
                continue; // partner radial number would be negative
            }
            // Partner must stay strictly inside the s mu > 0 region.
            if (j as f64) >= smu {
                continue;
            }
            let m = qn.m - (s as i64) * j;
            let n = (i64::from(qn.n) + j) as u32;
            if classify_state(m, params) == Regularity::Regular {
                family.push(QuantumNumbers::new(m, n));
            }
        }
    } else {
        let (lo, hi) = m_window.ok_or(SpectrumError::MissingWindow)?;
        for m in lo..=hi {
            if s * params.coupling(m) <= 0.0 && classify_state(m, params) == Regularity::Regular {
                family.push(QuantumNumbers::new(m, qn.n));
            }
        }
    }
    family.sort();
    Ok(family)
}

/// One row of a spectrum listing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumRow {
    pub qn: QuantumNumbers,
    pub class: Regularity,
    /// Relativistic energy on the requested branch; `None` when the
    /// radicand is negative (no real level).
    pub energy: Option<f64>,
    /// Pauli-limit energy `epsilon` (always real).
    pub energy_nonrel: f64,
}

/// Levels for every channel in `m_range` x `n_range` (inclusive), each
/// computed from the formula its classification selects, sorted by energy
/// (ascending as signed values; non-real rows sort last, ordered by
/// quantum numbers).
pub fn spectrum_table(
    params: &PhysicalParams,
    m_range: (i64, i64),
    n_range: (u32, u32),
    branch: Branch,
) -> Vec<SpectrumRow> {
    let mut rows = Vec::new();
    for m in m_range.0..=m_range.1 {
        let class = classify_state(m, params);
        for n in n_range.0..=n_range.1 {
            let qn = QuantumNumbers::new(m, n);
            let level = match class {
                Regularity::Regular => energy_regular(params, qn, branch),
                Regularity::IrregularA => energy_irregular_a(params, n, branch),
                Regularity::IrregularB => energy_irregular_b(params, n, branch),
            };
            let energy = match level {
                Ok(level) => Some(level.value),
                Err(SpectrumError::NonRealEnergy { .. }) => None,
                // Gates can't fire: the class came from classify_state.
                Err(err) => unreachable!("spectrum_table: {err}"),
            };
            let energy_nonrel = energy_nonrel(params, qn, class)
                .expect("class/spin consistency is guaranteed by classify_state");
            rows.push(SpectrumRow {
                qn,
                class,
                energy,
                energy_nonrel,
            });
        }
    }
    rows.sort_by(|a, b| match (a.energy, b.energy) {
        (Some(x), Some(y)) => x
            .partial_cmp(&y)
            .expect("energies are finite")
            .then(a.qn.cmp(&b.qn)),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => a.qn.cmp(&b.qn),
    });
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn params(mass: f64, omega: f64, alpha: f64, spin: Spin) -> PhysicalParams {
        PhysicalParams::new(mass, omega, alpha, spin).unwrap()
    }

    #[test]
    fn parameter_validation() {
        assert!(PhysicalParams::new(0.0, 1.0, 0.3, Spin::Up).is_err());
        assert!(PhysicalParams::new(1.0, -0.1, 0.3, Spin::Up).is_err());
        assert!(PhysicalParams::new(1.0, 1.0, f64::NAN, Spin::Up).is_err());
        assert!(Spin::from_sign(2).is_err());
        assert_eq!(Spin::from_sign(-1).unwrap(), Spin::Down);
    }

    #[test]
    fn flux_decomposition_cases() {
        let d = decompose_flux(2.3);
        assert_eq!(d.integer, 2);
        assert_abs_diff_eq!(d.fractional, 0.3, epsilon = 1e-14);

        let d = decompose_flux(-1.25);
        assert_eq!(d.integer, -2);
        assert_abs_diff_eq!(d.fractional, 0.75, epsilon = 1e-14);

        let d = decompose_flux(3.0);
        assert_eq!(d.integer, 3);
        assert_eq!(d.fractional, 0.0);

        let d = decompose_flux(-0.7);
        assert_eq!(d.integer, -1);
        assert_abs_diff_eq!(d.fractional, 0.3, epsilon = 1e-14);
    }

    #[test]
    fn classification_gates() {
        // alpha = 2.3 (N = 2): only m = -2 with spin down is case A.
        let down = params(1.0, 1.0, 2.3, Spin::Down);
        assert_eq!(classify_state(-2, &down), Regularity::IrregularA);
        for m in [-5, -3, -1, 0, 2] {
            assert_eq!(classify_state(m, &down), Regularity::Regular);
        }
        let up = params(1.0, 1.0, 2.3, Spin::Up);
        assert_eq!(classify_state(-2, &up), Regularity::Regular);

        // alpha = -1.25 (N = -2): only m = 1 with spin up is case B.
        let up = params(1.0, 1.0, -1.25, Spin::Up);
        assert_eq!(classify_state(1, &up), Regularity::IrregularB);
        assert_eq!(classify_state(2, &up), Regularity::Regular);
        let down = params(1.0, 1.0, -1.25, Spin::Down);
        assert_eq!(classify_state(1, &down), Regularity::Regular);

        // Integer flux never admits an irregular channel.
        let int_down = params(1.0, 1.0, 3.0, Spin::Down);
        for m in -5..=5 {
            assert_eq!(classify_state(m, &int_down), Regularity::Regular);
        }
    }

    #[test]
    fn wavenumber_relations() {
        let p = params(1.0, 0.05, 0.3, Spin::Up);
        let w = wavenumbers(&p, 1, 1.1);
        assert_relative_eq!(w.lambda_sq, 0.05 * 0.05, max_relative = 1e-15);
        // Interior and exterior differ only through the flux:
        // k_out^2 - k_in^2 = -2 M omega s alpha.
        assert_relative_eq!(
            w.k_out_sq - w.k_in_sq,
            -2.0 * p.mass_omega() * p.spin.sign() * p.alpha,
            max_relative = 1e-12
        );
        // Explicit value at E = 1.1, m = 1, s = +1, alpha = 0.3.
        assert_relative_eq!(
            w.k_out_sq,
            1.1 * 1.1 - 1.0 + 2.0 * 0.05 * (1.0 - 1.3),
            max_relative = 1e-14
        );
    }

    #[test]
    fn regular_energy_values() {
        // Ground state of the unfluxed m = 0 channel sits exactly at M.
        let p = params(1.0, 1.0, 0.0, Spin::Up);
        let e = energy_regular(&p, QuantumNumbers::new(0, 0), Branch::Positive).unwrap();
        assert_abs_diff_eq!(e.value, 1.0, epsilon = 1e-15);

        // m = 1, n = 0, alpha = 0.3, s = +1, omega = 0.05:
        // E = sqrt(1 + 0.1 * 2.6) = sqrt(1.26).
        let p = params(1.0, 0.05, 0.3, Spin::Up);
        let e = energy_regular(&p, QuantumNumbers::new(1, 0), Branch::Positive).unwrap();
        assert_relative_eq!(e.value, 1.26_f64.sqrt(), max_relative = 1e-15);

        // Negative branch mirrors the positive one.
        let neg = energy_regular(&p, QuantumNumbers::new(1, 0), Branch::Negative).unwrap();
        assert_relative_eq!(neg.value, -e.value, max_relative = 1e-15);
    }

    #[test]
    fn irregular_energy_values() {
        // Case A, alpha = 2.3, M = omega = 1: E(n=1) = sqrt(1 + 4 * 0.7).
        let p = params(1.0, 1.0, 2.3, Spin::Down);
        let e = energy_irregular_a(&p, 1, Branch::Positive).unwrap();
        assert_relative_eq!(e.value, 3.8_f64.sqrt(), max_relative = 1e-15);
        // The level records the one channel the series lives in: m = -N.
        assert_eq!(e.qn, QuantumNumbers::new(-2, 1));

        // n = 0 of the same series has E^2 = 1 - 1.2 < 0.
        assert!(matches!(
            energy_irregular_a(&p, 0, Branch::Positive),
            Err(SpectrumError::NonRealEnergy { .. })
        ));

        // Integer flux is admitted and reduces to the regular series:
        // alpha = 2, n = 1: E = sqrt(1 + 4) = sqrt(5).
        let p_int = params(1.0, 1.0, 2.0, Spin::Down);
        let e = energy_irregular_a(&p_int, 1, Branch::Positive).unwrap();
        assert_relative_eq!(e.value, 5.0_f64.sqrt(), max_relative = 1e-15);
        let reg = energy_regular(&p_int, QuantumNumbers::new(-2, 1), Branch::Positive).unwrap();
        assert_relative_eq!(e.value, reg.value, max_relative = 1e-15);

        // Case B, alpha = -1.25 (xi = 0.75): E(n=1) = sqrt(1 + 4 * 0.75) = 2.
        let p = params(1.0, 1.0, -1.25, Spin::Up);
        let e = energy_irregular_b(&p, 1, Branch::Positive).unwrap();
        assert_relative_eq!(e.value, 2.0, max_relative = 1e-15);
        // Case B pins m = -(N+1) with N = floor(alpha) = -2.
        assert_eq!(e.qn, QuantumNumbers::new(1, 1));

        // Wrong-spin / wrong-sign gates are classification errors.
        assert!(matches!(
            energy_irregular_a(&params(1.0, 1.0, 2.3, Spin::Up), 1, Branch::Positive),
            Err(SpectrumError::Classification(_))
        ));
        assert!(matches!(
            energy_irregular_b(&params(1.0, 1.0, 2.3, Spin::Up), 1, Branch::Positive),
            Err(SpectrumError::Classification(_))
        ));
    }

    #[test]
    fn nonrel_limit_tracks_relativistic_gap() {
        // E_+ - M = eps - eps^2/(2M) + O(eps^3/M^2), so the gap defect is
        // bounded by ~eps^2/(2M) level by level.
        for &(alpha, spin) in &[
            (0.3, Spin::Up),
            (0.3, Spin::Down),
            (-1.25, Spin::Up),
            (-1.25, Spin::Down),
        ] {
            let p = params(1.0, 1e-4, alpha, spin);
            for m in -3..=3 {
                let class = classify_state(m, &p);
                for n in 0..=3 {
                    let qn = QuantumNumbers::new(m, n);
                    let level = match class {
                        Regularity::Regular => energy_regular(&p, qn, Branch::Positive),
                        Regularity::IrregularA => energy_irregular_a(&p, n, Branch::Positive),
                        Regularity::IrregularB => energy_irregular_b(&p, n, Branch::Positive),
                    }
                    .unwrap();
                    let eps = energy_nonrel(&p, qn, class).unwrap();
                    let tol = 1.1 * eps * eps / (2.0 * p.mass) + 1e-15;
                    assert!(
                        ((level.value - p.mass) - eps).abs() <= tol,
                        "alpha={alpha} spin={spin} m={m} n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn no_spin_orbit_shift_is_irregular_only() {
        let p = params(1.0, 1.0, 2.3, Spin::Down);
        let qn = QuantumNumbers::new(-2, 1);
        // Case A: omega (2n + 1 - xi).
        let shifted = energy_nonrel_no_spin_orbit(&p, qn, Regularity::IrregularA).unwrap();
        assert_relative_eq!(shifted, 2.0 + 1.0 - 0.3, max_relative = 1e-12);
        // Case B: omega (2n + xi).
        let pb = params(1.0, 1.0, -1.25, Spin::Up);
        let shifted =
            energy_nonrel_no_spin_orbit(&pb, QuantumNumbers::new(1, 1), Regularity::IrregularB)
                .unwrap();
        assert_relative_eq!(shifted, 2.0 + 0.75, max_relative = 1e-12);
        // Regular channels have no such comparison.
        assert!(energy_nonrel_no_spin_orbit(&p, qn, Regularity::Regular).is_err());
    }

    #[test]
    fn shift_family_is_degenerate() {
        // alpha = 0.3, s = +1, seed (2, 1), shifts up to 3:
        // family (3,0), (2,1), (1,2), (0,3); m = -1 would cross mu = 0.
        let p = params(1.0, 0.05, 0.3, Spin::Up);
        let seed = QuantumNumbers::new(2, 1);
        let family = degeneracy_family(&p, seed, 3, None).unwrap();
        assert_eq!(
            family,
            vec![
                QuantumNumbers::new(0, 3),
                QuantumNumbers::new(1, 2),
                QuantumNumbers::new(2, 1),
                QuantumNumbers::new(3, 0),
            ]
        );
        let e0 = energy_regular(&p, seed, Branch::Positive).unwrap().value;
        for qn in family {
            let e = energy_regular(&p, qn, Branch::Positive).unwrap().value;
            assert!((e - e0).abs() <= 1e-12 * e0.abs());
        }
    }

    #[test]
    fn collapsed_family_needs_window_and_skips_irregular() {
        // alpha = 0.3, s = -1: E^2 = M^2 + 4 M omega n for every mu > 0,
        // so a window is mandatory, and m = 0 (case A) must be excluded.
        let p = params(1.0, 0.05, 0.3, Spin::Down);
        let seed = QuantumNumbers::new(2, 1);
        assert!(matches!(
            degeneracy_family(&p, seed, 3, None),
            Err(SpectrumError::MissingWindow)
        ));
        let family = degeneracy_family(&p, seed, 3, Some((-3, 3))).unwrap();
        assert_eq!(
            family,
            vec![
                QuantumNumbers::new(1, 1),
                QuantumNumbers::new(2, 1),
                QuantumNumbers::new(3, 1),
            ]
        );
        let e0 = energy_regular(&p, seed, Branch::Positive).unwrap().value;
        for qn in family {
            let e = energy_regular(&p, qn, Branch::Positive).unwrap().value;
            assert!((e - e0).abs() <= 1e-12 * e0.abs());
        }
        // An irregular seed is rejected outright.
        assert!(matches!(
            degeneracy_family(&p, QuantumNumbers::new(0, 1), 3, Some((-3, 3))),
            Err(SpectrumError::Classification(_))
        ));
    }

    #[test]
    fn spectrum_table_is_sorted_with_non_real_last() {
        // alpha = 2.3, spin down: the m = -2 channel is case A and its
        // n = 0 level is non-real at omega = 1.
        let p = params(1.0, 1.0, 2.3, Spin::Down);
        let rows = spectrum_table(&p, (-3, 1), (0, 2), Branch::Positive);
        assert_eq!(rows.len(), 5 * 3);
        let split = rows
            .iter()
            .position(|r| r.energy.is_none())
            .unwrap_or(rows.len());
        for w in rows[..split].windows(2) {
            assert!(w[0].energy.unwrap() <= w[1].energy.unwrap());
        }
        assert!(rows[split..].iter().all(|r| r.energy.is_none()));
        assert_eq!(rows[split..].len(), 1);
        assert_eq!(rows[split].qn, QuantumNumbers::new(-2, 0));
        assert_eq!(rows[split].class, Regularity::IrregularA);
        // The irregular rows that are real use the irregular series.
        let irr: Vec<_> = rows
            .iter()
            .filter(|r| r.class == Regularity::IrregularA && r.energy.is_some())
            .collect();
        assert_eq!(irr.len(), 2);
        assert_relative_eq!(irr[0].energy.unwrap(), 3.8_f64.sqrt(), max_relative = 1e-14);
    }

    proptest! {
        #[test]
        fn flux_roundtrip(alpha in -50.0f64..50.0) {
            let d = decompose_flux(alpha);
            prop_assert!((0.0..1.0).contains(&d.fractional));
            let rebuilt = d.integer as f64 + d.fractional;
            prop_assert!((rebuilt - alpha).abs() <= 1e-12 * alpha.abs().max(1.0));
        }

        #[test]
        fn branches_are_symmetric(
            alpha in -5.0f64..5.0,
            m in -6i64..6,
            n in 0u32..6,
            spin_up in proptest::bool::ANY,
        ) {
            let spin = if spin_up { Spin::Up } else { Spin::Down };
            let p = params(1.0, 0.2, alpha, spin);
            let qn = QuantumNumbers::new(m, n);
            let pos = energy_regular(&p, qn, Branch::Positive).unwrap().value;
            let neg = energy_regular(&p, qn, Branch::Negative).unwrap().value;
            prop_assert!((pos + neg).abs() <= 1e-12 * pos.abs().max(1.0));
            prop_assert!(pos >= p.mass - 1e-12);
        }

        #[test]
        fn shift_families_share_one_energy(
            alpha in 0.05f64..3.0,
            m in 1i64..5,
            n in 0u32..4,
            shift in 1u32..4,
        ) {
            // mu = m + alpha > 0 with spin up: shift family.
            let p = params(1.0, 0.1, alpha, Spin::Up);
            let qn = QuantumNumbers::new(m, n);
            let family = degeneracy_family(&p, qn, shift, None).unwrap();
            prop_assert!(family.contains(&qn));
            let e0 = energy_regular(&p, qn, Branch::Positive).unwrap().value;
            for partner in family {
                let e = energy_regular(&p, partner, Branch::Positive).unwrap().value;
                prop_assert!((e - e0).abs() <= 1e-12 * e0.abs());
            }
        }
    }
}
