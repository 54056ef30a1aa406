//! Bound states of a planar Dirac oscillator coupled to an Aharonov-Bohm
//! flux line.
//!
//! The model is a (2+1)-dimensional Dirac oscillator (linear, spin-coupled
//! confinement of frequency `omega`) pierced at the origin by a magnetic
//! flux `alpha` in units of the flux quantum. Units are natural
//! (`hbar = c = 1`), so `omega/M` is the only dynamical scale and `alpha`,
//! `spin`, and the angular quantum number `m` select the channel.
//!
//! The flux splits into an integer part `N` and a fractional part
//! `xi in [0, 1)`. For almost every channel the physical radial solution is
//! the one regular at the origin; for exactly one angular momentum per spin
//! orientation (`m = -N` for spin up the flux, `m = -N - 1` against it) a
//! square-integrable solution with a mildly divergent `r^{-xi}` or
//! `r^{xi-1}` core exists and carries its own energy series. The crate
//! computes both families three independent ways and cross-checks them:
//!
//! * [`spectrum`] — closed-form energies, the nonrelativistic (Pauli)
//!   limit, and degeneracy families;
//! * [`wavefun`] — two-component eigenspinors, normalization, and a
//!   residual check that plugs them back into the Dirac equation;
//! * [`shellmatch`] — a finite-radius flux shell whose interior/exterior
//!   matching selects the regular or irregular family as the shell
//!   shrinks;
//! * [`oracle`] — a finite-difference eigensolver for the equivalent
//!   radial Schroedinger problem, used as a formula-free check;
//! * [`specfun`] — the confluent hypergeometric / Laguerre kernels the
//!   other modules share.

pub mod oracle;
pub mod shellmatch;
pub mod specfun;
pub mod spectrum;
pub mod wavefun;
