use thiserror::Error;

/// Errors surfaced by model construction, evolution and spectral analysis.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("skin transform overflow: |2 pi eta x| = {0:.3} exceeds 700")]
    SkinOverflow(f64),

    #[error("coin square root branch ambiguity: |tr Q + 2| = {0:.3e}")]
    BranchAmbiguity(f64),

    #[error("dense eigensolve failed (LAPACK info = {info}); n = {n}, one-norm = {one_norm:.3e}")]
    Eigensolve { info: i32, n: usize, one_norm: f64 },

    #[error("LAPACK routine {routine} failed with info = {info}")]
    Lapack { routine: &'static str, info: i32 },

    #[error("matrix dimension 2N = {0} exceeds the dense cap {1}")]
    DenseCap(usize, usize),

    #[error("no eigenvalue within no-loss tolerance {tolerance:.3e}; closest |Im E| = {closest:.3e}")]
    NoNoLossState { tolerance: f64, closest: f64 },

    #[error("winding base point too close to the eta=0 spectrum: distance {distance:.3e} <= threshold {threshold:.3e}")]
    BasePointInSpectrum { distance: f64, threshold: f64 },

    #[error("phase tracking failed: max arg jump {max_jump:.3} rad at {samples} samples (cap reached)")]
    PhaseTracking { max_jump: f64, samples: usize },

    #[error("insufficient dynamic range for decay fit: {decades:.2} decades usable (need >= {required:.1})")]
    InsufficientDynamicRange { decades: f64, required: f64 },

    #[error("eigenbasis too ill-conditioned for projection analysis: cond = {condition:.3e}")]
    IllConditionedEigenbasis { condition: f64 },
}

pub type Result<T> = std::result::Result<T, CoreError>;
