//! Orientation stack → image.

use crate::grid::{OrientationStack, PeriodicImage};

/// ℓ∞ projection: per-pixel maximum over the orientation layers.
///
/// Values above 1 (possible only through dispersion of a gradient lift) are
/// clamped so the result stays a valid image; no rescaling is applied.
pub fn project_max(stack: &OrientationStack) -> PeriodicImage {
    let data = stack
        .as_slice()
        .chunks_exact(stack.layers())
        .map(|cell| cell.iter().copied().fold(0.0, f64::max))
        .collect();
    PeriodicImage::from_clamped(stack.size(), data)
}

/// Multiplicative rescaling so the maximum becomes `reference_max`, then
/// clamped to `[0, 1]`. An all-zero image is returned unchanged.
pub fn renormalize(img: &PeriodicImage, reference_max: f64) -> PeriodicImage {
    let current = img.max();
    if current == 0.0 {
        return img.clone();
    }
    let scale = reference_max / current;
    let data = img.as_slice().iter().map(|&v| v * scale).collect();
    PeriodicImage::from_clamped(img.size(), data)
}
