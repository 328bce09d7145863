use thiserror::Error;

/// Errors raised by the basis, encoding, simulation and observable routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function evaluated at non-positive argument {0}")]
    GammaDomain(f64),

    #[error("longitudinal momentum fraction x = {0} is outside (0, 1)")]
    OutsideUnitInterval(f64),

    #[error("unsupported basis cutoffs: {0}")]
    UnsupportedCutoffs(String),

    #[error("no basis states with J_z = {0} for M_max = 2")]
    InvalidJz(i32),

    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric (largest asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix has non-negligible imaginary entries (largest {0:e})")]
    NotReal(f64),

    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("gate acts twice on qubit {0}")]
    RepeatedQubit(usize),

    #[error("invalid fermionic mode pair ({i}, {j}) for {n_modes} modes")]
    InvalidModes { i: usize, j: usize, n_modes: usize },

    #[error("invalid Pauli label {0:?}")]
    InvalidPauliLabel(String),

    #[error("Bravyi-Kitaev encoder is only defined for power-of-two sizes, got {0}")]
    UnsupportedEncoderSize(usize),

    #[error("readout calibration for qubit {0} is singular")]
    SingularCalibration(usize),

    #[error("probability {0} is outside [0, 1)")]
    InvalidProbability(f64),

    #[error("vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("encoding uses {expected} qubits but the operator acts on {found}")]
    EncodingMismatch { expected: usize, found: usize },

    #[error("quantum numbers out of range: {0}")]
    QuantumNumbersOutOfRange(String),

    #[error("eigendecomposition failed to converge")]
    EigenFailure,

    #[error("not enough form-factor samples near Q^2 = 0: {0}")]
    InsufficientPoints(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
