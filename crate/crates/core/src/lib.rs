//! Exit and recurrence times for pure-state unitary dynamics.
//!
//! Given a Hamiltonian spectrum and an initial state in its eigenbasis, this
//! crate computes when the evolved state first leaves an ε-neighborhood of
//! its initial point (the exit time) and when it first returns after leaving
//! (the recurrence time), with a certified Lipschitz search. Alongside the
//! measured times it evaluates the closed-form ceilings and floors these
//! quantities obey — speed-limit brackets, recurrence bounds growing like
//! (1/ε)^{d−1}, effective-support refinements, free-evolution and
//! unitary-channel variants, a finiteness criterion — plus the explicit
//! phase-net coverings behind the recurrence bounds and Monte Carlo ensembles
//! over random spectra that probe how recurrence times scale with dimension.

pub mod bounds;
pub mod ensemble;
pub mod error;
pub mod geometry;
pub mod io;
pub mod spectral;
pub mod structure;
pub mod timing;

pub use error::{Error, Result};
pub use spectral::{MomentSummary, SpectralState, Survival};
pub use timing::{CrossingQuery, SearchStatus, TimingCertificate};
