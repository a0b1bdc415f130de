//! Learning toolkit for extended sparse Pauli-Lindblad noise models.
//!
//! The crate plans, simulates, and fits the learning of `ℓ`-local,
//! crosstalk-aware Pauli-Lindblad noise models for layers of Hermitian
//! Clifford gates.  The main pieces are:
//!
//! * [`pauli`] — symplectic Pauli algebra (products, commutation, parsing);
//! * [`clifford`] — signed tableaus, conjugation, and the four-class
//!   characterization of two-qubit Hermitian Cliffords;
//! * [`model`] — sparse Pauli-Lindblad models, error sampling, and a dense
//!   brute-force channel oracle for small qubit counts;
//! * [`twirl`] — Pauli-rotation twirling: feasible twirl sets, fidelity
//!   averaging partitions, and correction-sequence synthesis;
//! * [`coverarray`] — covering array construction and verification;
//! * [`basisselect`] — learning-graph construction, coloring, and
//!   covering-array-driven measurement basis emission;
//! * [`learn`] — design matrices, decay-curve simulation and fitting,
//!   symmetry resolution, and nonnegative least-squares model recovery.

pub mod basisselect;
pub mod clifford;
pub mod coverarray;
pub mod error;
pub mod learn;
pub mod model;
pub mod pauli;
pub mod twirl;

pub use basisselect::{
    BasisSet, Coloring, Layer, LayerGate, LearningGraph, Topology, TwirlMode,
};
pub use clifford::{CliffordTableau, GateClassification, GateName};
pub use coverarray::CoveringArray;
pub use error::Error;
pub use learn::{
    DesignMatrix, FidelityEstimates, FitResult, LearnConfig, LearnOutcome, NnlsSolution,
    RankReport,
};
pub use model::{DensePauliChannel, ModelSpec, NoiseModel};
pub use pauli::{Letter, PauliString, PhasedPauli};
pub use twirl::{AveragingPartition, CorrectionSchedule, TwirlSet};
