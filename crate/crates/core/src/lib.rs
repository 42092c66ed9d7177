//! Maximum-confidence (MC) and sequential maximum-confidence (SMC)
//! discrimination of equiprobable symmetric pure qudit states.
//!
//! The library covers the full workflow: designing the optimal MC POVM and
//! the square-root minimum-error measurement for a symmetric set, realizing
//! each MC stage physically (ancilla coupling plus an extended-space inverse
//! DFT), planning the full sequential measurement over failure subspaces,
//! verifying the statistics by seeded Monte Carlo, and compiling the
//! four-state qutrit instance to a linear-optical circuit.
//!
//! See the crate `examples/` directory for one runnable walkthrough per
//! capability, and the `seqmc` binary for batch use.

pub mod error;
pub mod linalg;
pub mod montecarlo;
pub mod neumark;
pub mod optics;
pub mod povm;
pub mod smc;
pub mod symmetric;

pub mod cli;

pub use error::{Error, Result};
pub use linalg::Tolerances;
pub use symmetric::SymmetricSet;
