//! Image inpainting by averaging and semi-discrete hypoelliptic evolution.
//!
//! An image is lifted to a stack of `N` orientation layers, evolved by a
//! hypoelliptic diffusion that is integrated exactly in space (Fourier) and by
//! Crank–Nicolson in time, then projected back. Averaging heuristics on the
//! known-good pixels supply the initial conditions for heavily corrupted
//! inputs.
//!
//! Module map:
//!
//! * [`grid`]: periodic images, corruption masks, orientation stacks.
//! * [`lift`] / [`project`]: image → stack and stack → image.
//! * [`spectral`]: constant-coefficient evolution in the frequency domain.
//! * [`varcoef`]: per-pixel coefficient fields and frozen-coefficient stepping.
//! * [`restore`]: static / dynamic restoration loops.
//! * [`average`]: boundary-peeling fills used by the four-step pipeline.
//! * [`pipeline`]: the end-to-end reconstructions.
//! * [`bench`]: corruption generation, metrics and baselines.

pub mod average;
pub mod bench;
pub mod error;
pub mod grid;
pub mod lift;
pub mod pipeline;
pub mod project;
pub mod restore;
pub mod spectral;
pub mod varcoef;

pub use error::{Error, Result};
pub use grid::{CorruptionMask, Label, OrientationStack, PeriodicImage, GRAY_STEP};
pub use pipeline::{AheConfig, AheIntermediates, AheOutput, LiftMode, PlainParams, Preset, VarcoefDrConfig};
pub use restore::{RestoreMode, RestoreParams};
pub use spectral::{FrequencySymbol, SpectralState};
pub use varcoef::{CoefficientField, CoefficientParams, VarcoefSolver};
