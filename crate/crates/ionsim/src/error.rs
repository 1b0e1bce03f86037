use thiserror::Error;

/// Errors shared across the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count {n} outside supported range {min}..={max}")]
    QubitCount { n: usize, min: usize, max: usize },

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitIndex { index: usize, n_qubits: usize },

    #[error("duplicate target qubit {0}")]
    DuplicateTarget(usize),

    #[error("gate acts on {0} qubits; only 1- and 2-qubit gates are supported")]
    UnsupportedArity(usize),

    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("Kraus set is not trace preserving (max deviation {0:.3e})")]
    IncompleteKraus(f64),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("non-finite parameter: {0}")]
    NonFinite(f64),

    #[error("{name} = {value} outside [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("probability {0:.3e} is negative beyond round-off tolerance")]
    NegativeProbability(f64),

    #[error("probabilities sum to {0} (expected 1 within 1e-6)")]
    UnnormalizedProbabilities(f64),

    #[error("state is not normalized (|norm - 1| = {0:.3e})")]
    NotNormalized(f64),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("confusion matrix is singular (eps_bright + eps_dark = 1)")]
    SingularConfusion,

    #[error("parity fit needs at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("parity fit design matrix is degenerate (phases coincide mod 2pi/n)")]
    DegenerateFit,

    #[error("circuit contains unsupported instruction {kind} for this pass")]
    UnsupportedInstruction { kind: String },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("transpiled circuit failed the equivalence check (distance {0:.3e})")]
    EquivalenceBroken(f64),

    #[error("shots must be >= 1")]
    NoShots,

    #[error("{0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
