//! Simulation and spectral analysis of a quasiperiodic split-step quantum
//! walk (the unitary almost-Mathieu operator) and its non-reciprocal
//! extension: dynamics and localization observables, complex eigenspectra
//! and their phase classification, spectral winding numbers, closed-form
//! critical values, and the wave-plate level optical decomposition with loss
//! bookkeeping.

pub mod analytics;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod model;
pub mod optics;
pub mod spectral;

pub use error::{CoreError, Result};
pub use model::{
    coin_at, coin_at_complex, coin_sqrt, skin_transform, verify_pt_symmetry, Boundary,
    FloquetOperator, FluxSpec, Lattice, Mat2, ModelParams, SpinorState, Variant, GOLDEN_FLUX,
};
pub use spectral::{PtPhase, SpectrumResult};
