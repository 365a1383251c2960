//! Bell-basis block reduction and pulsed SU(2) propagators for two-qubit
//! Heisenberg-Ising dynamics.
//!
//! The library splits the 4×4 Hamiltonian of a two-qubit Heisenberg-Ising
//! system with a directional magnetic field into two independent 2×2 sectors
//! in the Bell basis, evolves each sector under time-dependent pulses with
//! first- and second-order stepped integrators, benchmarks precision against
//! partition count, and searches the pulse-parameter plane for prescriptions
//! that realize target gate amplitudes.
//!
//! Module map:
//! - [`su2`]: 2×2 complex matrices, Pauli basis, gate-form conversion.
//! - [`model`]: full Hamiltonian, sign bookkeeping, Bell-basis reduction.
//! - [`fields`]: time-dependent drive envelopes on the unit window.
//! - [`propagator`]: stepped integrators, closed-form oracles, refined reference.
//! - [`bench`]: precision-vs-partition benchmark harness.
//! - [`synthesis`]: contour search in the pulse-parameter plane.

pub mod bench;
pub mod error;
pub mod fields;
pub mod model;
pub mod propagator;
pub mod su2;
pub mod synthesis;

pub use error::{Error, Result};
