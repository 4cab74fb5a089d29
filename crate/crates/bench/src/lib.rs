//! Deterministic inputs shared by the benchmarks.

use ahe_core::bench::{corrupt, CorruptionSpec, Synthetic};
use ahe_core::lift::lift_trivial;
use ahe_core::{CorruptionMask, OrientationStack, PeriodicImage};

/// A synthetic ground truth together with its corrupted copy.
pub struct Case {
    pub truth: PeriodicImage,
    pub corrupted: PeriodicImage,
    pub mask: CorruptionMask,
}

/// Waves image of side `size` under 3-pixel line corruption.
pub fn corrupted_case(size: usize, fraction: f64, seed: u64) -> Case {
    let truth = Synthetic::Waves.render(size);
    let (corrupted, mask) = corrupt(&truth, &CorruptionSpec::lines(fraction, 3, seed)).expect("valid corruption spec");
    Case { truth, corrupted, mask }
}

/// Trivially lifted synthetic image, the usual input of the evolution solvers.
pub fn lifted(size: usize, layers: usize) -> OrientationStack {
    lift_trivial(&Synthetic::Rings.render(size), layers).expect("at least two layers")
}
