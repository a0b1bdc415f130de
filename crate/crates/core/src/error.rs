use thiserror::Error;

/// Error type shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("invalid Pauli letter '{0}' (expected one of I, X, Y, Z)")]
    InvalidLetter(char),
    #[error("empty Pauli string")]
    EmptyPauli,
    #[error("empty support set")]
    EmptySupport,
    #[error("qubit index {index} out of range for {n} qubits")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("unknown gate name '{0}'")]
    UnknownGate(String),
    #[error("gate '{gate}' expects {expected} distinct qubits, got {got}")]
    BadGateArity { gate: String, expected: usize, got: usize },
    #[error("duplicate qubit index in gate qubits")]
    DuplicateQubit,
    #[error("operator is not Hermitian (O^2 != I)")]
    NotHermitian,
    #[error("classification requires a two-qubit operator, got n = {0}")]
    NotTwoQubit(usize),
    #[error("no class pattern matches the operator's support transitions")]
    Unclassifiable,
    #[error("unsupported rotation angle")]
    UnsupportedAngle,
    #[error("dense channel limited to n <= {max}, got n = {n}")]
    TooManyQubits { n: usize, max: usize },
    #[error("unsupported covering array parameters (t={t}, k={k}, v={v})")]
    UnsupportedCoveringArray { t: usize, k: usize, v: usize },
    #[error("covering array has {k} columns but the coloring uses {kc} colors")]
    TooManyColors { kc: usize, k: usize },
    #[error("gates overlap on qubit {0}")]
    OverlappingGates(usize),
    #[error("invalid fidelity partition: {0}")]
    InvalidPartition(String),
    #[error("learning depth {0} must be even and positive")]
    OddDepth(usize),
    #[error("decay series has no usable (positive) estimates")]
    UnfittableSeries,
    #[error("target fidelity {0} is not covered by any learning basis")]
    UncoveredTarget(String),
    #[error("nonnegative least squares did not converge after {0} iterations")]
    NnlsNonConvergence(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
