use thiserror::Error;

use crate::fock::ModeLabel;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("state must contain at least one mode")]
    EmptyModes,

    #[error("mode {0} appears more than once")]
    DuplicateMode(ModeLabel),

    #[error("mode {0} is not present in the state")]
    UnknownMode(ModeLabel),

    #[error("cutoff for mode {mode} must be at least 1, got {cutoff}")]
    InvalidCutoff { mode: ModeLabel, cutoff: usize },

    #[error("kernel cutoffs ({kernel_i}, {kernel_j}) do not match mode cutoffs ({mode_i}, {mode_j})")]
    KernelCutoffMismatch {
        kernel_i: usize,
        kernel_j: usize,
        mode_i: usize,
        mode_j: usize,
    },

    #[error("two-mode operation requires distinct modes, got {0} twice")]
    SameMode(ModeLabel),

    #[error("partial transpose must act on a nonempty strict subset of the modes")]
    InvalidTransposeSet,

    #[error("parameter {name} = {value} is outside {domain}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("heralding failed: success probability {probability:e} below threshold")]
    HeraldFailure { probability: f64 },

    #[error("eve-purification channel requires Eve's modes E and F in the state")]
    MissingEveState,

    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("expected a {expected}-mode operator, got {found} modes")]
    ModeCount { expected: usize, found: usize },

    #[error("covariance matrix is not symmetric (max deviation {0:e})")]
    NotSymmetric(f64),

    #[error("covariance blocks are not of the required I/Z form (deviation {0:e})")]
    NotStandardForm(f64),

    #[error("unphysical covariance: symplectic eigenvalue {0} below 1")]
    Unphysical(f64),

    #[error("conditional variance {0} is not positive")]
    NonPositiveVariance(f64),

    #[error("eigen-decomposition failed")]
    EigenFailure,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("objective has no feasible kappa in the search domain")]
    NoFeasibleKappa,

    #[error("cannot write {path}: {message}")]
    Output { path: String, message: String },
}
