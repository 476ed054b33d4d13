use thiserror::Error;

/// Errors raised by the linear algebra substrate and the protocol modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("state is not normalized (norm squared {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("operator is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NegativeEigenvalue { eigenvalue: f64 },

    #[error("angle {name} = {value} outside {range}")]
    AngleOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("angle ordering violated: theta = {theta} > eta = {eta}")]
    AngleOrdering { theta: f64, eta: f64 },

    #[error("state carries no entanglement to concentrate")]
    NoEntanglement,

    #[error("measurement is incomplete (sum of M^dag M deviates from identity by {deviation:e})")]
    IncompleteMeasurement { deviation: f64 },

    #[error("not a projective measurement: {0}")]
    NotProjective(String),

    #[error("projector {index} has rank {rank}, only rank-1 projectors are supported")]
    ProjectorRank { index: usize, rank: usize },

    #[error("invalid Schmidt coefficients: {0}")]
    InvalidSchmidt(String),

    #[error("target state leaves the support of the reference state (leakage {leakage:e})")]
    SupportViolation { leakage: f64 },

    #[error("measurement element violates M^dag M <= I (max eigenvalue excess {excess:e})")]
    OperatorInequality { excess: f64 },

    #[error("expected a two-qubit state, got dimensions {dim_a}x{dim_b}")]
    NotTwoQubit { dim_a: usize, dim_b: usize },

    #[error("wire index {wire} out of range for {wires} wires")]
    InvalidWire { wire: usize, wires: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// Stable machine-readable tag for each variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::NotSquare { .. } => "not_square",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::NotUnitary { .. } => "not_unitary",
            Error::NotNormalized { .. } => "not_normalized",
            Error::NegativeEigenvalue { .. } => "negative_eigenvalue",
            Error::AngleOutOfRange { .. } => "angle_out_of_range",
            Error::AngleOrdering { .. } => "angle_ordering",
            Error::NoEntanglement => "no_entanglement",
            Error::IncompleteMeasurement { .. } => "incomplete_measurement",
            Error::NotProjective(_) => "not_projective",
            Error::ProjectorRank { .. } => "projector_rank",
            Error::InvalidSchmidt(_) => "invalid_schmidt",
            Error::SupportViolation { .. } => "support_violation",
            Error::OperatorInequality { .. } => "operator_inequality",
            Error::NotTwoQubit { .. } => "not_two_qubit",
            Error::InvalidWire { .. } => "invalid_wire",
            Error::Parse { .. } => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
