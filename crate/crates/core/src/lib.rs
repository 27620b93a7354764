//! Toolkit for the qutrit Bell functional `I_a`.
//!
//! The crate covers four concerns:
//!
//! * [`qcore`] — complex linear algebra on qutrit (3-dim) and two-qutrit
//!   (9-dim) spaces, the canonical entangled state and measurement bases,
//!   and Born-rule behaviors.
//! * [`polytope`] — exact-rational certification of the binary-nonsignaling
//!   bound `I_a <= 1` and the nonsignaling bound `I_a <= 4/3`.
//! * [`seesaw`] — variational see-saw search for the quantum maximum
//!   `2(2/3)^(3/2)`.
//! * [`simlab`] / [`stats`] — Monte Carlo coincidence simulation of the
//!   photonic experiment and the full statistical evaluation pipeline
//!   (normalization, nonsignaling, and binarity conditions with p-value
//!   reporting, plus the nonsignaling-constrained maximum-likelihood fit).

pub mod behavior;
pub mod error;
pub mod linalg;
pub mod polytope;
pub mod qcore;
pub mod seesaw;
pub mod simlab;
pub mod stats;

pub use behavior::{Behavior, Marginals};
pub use error::{Error, Result};
pub use qcore::{MeasurementBasis, NoiseModel, QutritState, TwoQutritState};
pub use simlab::{RunRecord, SimConfig};
pub use stats::{AnalysisReport, CompleteSet, ConditionStat};

/// The quantum maximum of `I_a`, `2 (2/3)^(3/2)`.
pub const QUANTUM_MAX: f64 = 1.088662107903635;
