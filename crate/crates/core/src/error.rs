use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Which qubit of the pair an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Signal,
    Meter,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Signal => f.write_str("signal"),
            Side::Meter => f.write_str("meter"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian: max |A - A†| = {deviation:e}")]
    NotHermitian { deviation: f64 },
    #[error("trace is not one: Tr = {trace}")]
    TraceNotOne { trace: f64 },
    #[error("matrix is not positive semidefinite: smallest eigenvalue = {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },
    #[error("matrix is not unitary: max |U U† - 1| = {deviation:e}")]
    NotUnitary { deviation: f64 },
    #[error(
        "matrix is not a proper rotation: orthogonality deviation {orthogonality:e}, det = {det}"
    )]
    NotRotation { orthogonality: f64, det: f64 },
    #[error("measurement axis is not a unit vector: |a| = {norm}")]
    NotUnitAxis { norm: f64 },
    #[error("signal measurements are not complementary: a·a' = {overlap:e}")]
    NotComplementary { overlap: f64 },
    #[error("{name} = {value} is outside [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("not a probability vector: {0}")]
    NotAProbabilityVector(String),
    #[error("{side} reduced state is rank deficient: smallest eigenvalue = {min_eigenvalue:e}")]
    SingularReduction { side: Side, min_eigenvalue: f64 },
    #[error(
        "local filtering did not converge within {max_iter} iterations (deviation {deviation:e})"
    )]
    NoConvergence { max_iter: usize, deviation: f64 },
    #[error("coincidence record{} has zero total counts", .index.map(|i| format!(" #{i}")).unwrap_or_default())]
    EmptyRecord { index: Option<usize> },
    #[error("invalid mixing model: {0}")]
    InvalidModel(String),
    #[error("state file: {0}")]
    StateFile(String),
}
