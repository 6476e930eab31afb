use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("argument {value} outside the domain of {what}")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("no guided fundamental mode (V = {v_number:.6})")]
    NoGuidedMode { v_number: f64 },

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("eigensolver did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    EigenNoConvergence { iterations: usize, residual: f64 },

    #[error("sparse factorization failed: {0}")]
    Factorization(String),

    #[error("coupling is singular at ({x_nm:.3} nm, {y_nm:.3} nm)")]
    SingularPosition { x_nm: f64, y_nm: f64 },

    #[error("detuning must be nonzero")]
    ZeroDetuning,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("spin f = {0} is too small for the qutrit truncation (need f >= 2)")]
    InvalidSpin(f64),

    #[error("need at least two atoms, got {0}")]
    TooFewAtoms(u64),

    #[error("mean spin <F_x> = {0:.3e} is too small to define the squeezing parameter")]
    DegenerateMean(f64),

    #[error("integration unstable at t = {t}: population {population} left [0, 1]")]
    StepInstability { t: f64, population: f64 },

    #[error("density matrix lost positivity at t = {t}: eigenvalue {eigenvalue:.3e}")]
    PositivityViolation { t: f64, eigenvalue: f64 },

    #[error("fit input rejected: {0}")]
    FitInput(String),

    #[error("mode cache {path}: version {found}, expected {expected}")]
    CacheVersion {
        path: PathBuf,
        found: u32,
        expected: u32,
    },

    #[error("mode cache {0}: checksum mismatch")]
    CacheChecksum(PathBuf),

    #[error("mode cache {path}: {reason}")]
    CacheFormat { path: PathBuf, reason: String },

    #[error("geometry mismatch: requested {expected}, cache holds {found}")]
    GeometryMismatch { expected: String, found: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
