//! Quantum-speed-limit toolkit for a qubit coupled to finite-temperature
//! bosonic environments.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`] small dense complex matrices (dimension 2 and 4), density
//!   matrices, entropies and partial traces;
//! * [`quadrature`] adaptive Gauss–Kronrod, Wynn-accelerated oscillatory
//!   tails and adaptive Simpson;
//! * [`bath`] spectral densities, decoherence factors (free and under
//!   bang-bang control) and the Matsubara expansion of the Drude bath;
//! * [`dephasing`] exact pure-dephasing evolution of a single qubit;
//! * [`qsl`] the unified speed-limit bound, its closed form for dephasing and
//!   relative purity;
//! * [`coherence`] l1-norm and Jensen–Shannon coherence;
//! * [`heom`] hierarchical equations of motion for two qubits, one of which
//!   is coupled to a Drude bath.
//!
//! Data-parallel loops (trajectory sampling, hierarchy right-hand side) run on
//! rayon when the `parallel` feature is enabled, and fall back to plain
//! iterators otherwise. See [`Execution`].

pub mod bath;
pub mod coherence;
pub mod dephasing;
mod error;
mod exec;
pub mod heom;
pub mod linalg;
pub mod qsl;
pub mod quadrature;

pub use error::{Error, Result};
pub use exec::Execution;

pub use num_complex::Complex64;
