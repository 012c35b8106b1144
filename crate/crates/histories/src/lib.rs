//! History-vector formalism for quantum systems.
//!
//! An evolving quantum system measured at times `t1..tn` is described by a
//! vector in the temporal tensor product of its per-time Hilbert spaces,
//! with coefficients given by the history amplitudes. This crate computes
//! those amplitudes and everything built on top of them: sequence
//! probabilities, decoherence functionals and consistency verdicts,
//! multitime observables, history density matrices with space and time
//! reduction and von Neumann entropy, the clone-gate protocol mapping an
//! evolving system onto a static composite one, and the Leggett-Garg and
//! temporal CHSH inequalities.

pub mod density;
pub mod engine;
pub mod error;
pub mod inequality;
pub mod observables;
pub mod protocol;
pub mod qubit;
pub mod tensor;

pub use error::{HistoryError, Result};
pub use num_complex::Complex64;
