//! Image → orientation stack.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{finite_gradient, OrientationStack, PeriodicImage};

/// Kernel half-width in standard deviations; the tail beyond it is below 1e-21.
const GAUSS_HALF_WIDTH: f64 = 10.0;

/// Wrapped 1-D Gaussian weights: entry `d` holds the total normalized weight
/// of all offsets congruent to `d` modulo `size`.
fn periodic_gaussian(size: usize, sigma: f64) -> Vec<f64> {
    let reach = (GAUSS_HALF_WIDTH * sigma).ceil() as isize;
    let mut w = vec![0.0; size];
    for e in -reach..=reach {
        let t = e as f64 / sigma;
        w[e.rem_euclid(size as isize) as usize] += (-0.5 * t * t).exp();
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

/// Circular convolution with a normalized isotropic Gaussian of standard
/// deviation `radius` pixels. `radius == 0` is the identity.
pub fn gaussian_smooth(img: &PeriodicImage, radius: f64) -> Result<PeriodicImage> {
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::invalid(format!("smoothing radius {radius} must be >= 0")));
    }
    if radius == 0.0 {
        return Ok(img.clone());
    }
    let m = img.size();
    let kernel = periodic_gaussian(m, radius);
    let taps: Vec<(usize, f64)> = kernel
        .iter()
        .copied()
        .enumerate()
        .filter(|&(_, w)| w != 0.0)
        .collect();
    let src = img.as_slice();

    // separable: rows then columns
    let mut rows = vec![0.0; m * m];
    for y in 0..m {
        for x in 0..m {
            let mut acc = 0.0;
            for &(d, w) in &taps {
                acc += w * src[y * m + (x + m - d) % m];
            }
            rows[y * m + x] = acc;
        }
    }
    let mut out = vec![0.0; m * m];
    for y in 0..m {
        for x in 0..m {
            let mut acc = 0.0;
            for &(d, w) in &taps {
                acc += w * rows[((y + m - d) % m) * m + x];
            }
            out[y * m + x] = acc;
        }
    }
    Ok(PeriodicImage::from_clamped(m, out))
}

fn check_layers(layers: usize) -> Result<()> {
    if layers < 2 {
        return Err(Error::invalid(format!(
            "need at least 2 orientation layers, got {layers}"
        )));
    }
    Ok(())
}

/// Slope angle of the level curve through a pixel, in `[0, π)`:
/// `tan θ = −gx / gy`, with `θ = π/2` when only `gy` vanishes.
pub fn level_curve_angle(gx: f64, gy: f64) -> f64 {
    let theta = (-gx).atan2(gy).rem_euclid(PI);
    // rem_euclid can round up to exactly π
    if theta >= PI {
        0.0
    } else {
        theta
    }
}

/// Index of the orientation layer nearest to `theta` (mod π). An angle
/// exactly half-way between two layers goes to the lower index.
pub fn nearest_layer(theta: f64, layers: usize) -> usize {
    let t = theta.rem_euclid(PI) * layers as f64 / PI;
    let lower = t.floor();
    let r = if t - lower > 0.5 { lower as usize + 1 } else { lower as usize };
    r % layers
}

/// Gradient lift: the pixel value goes to the single layer aligned with the
/// level curve. Pixels with a vanishing gradient are spread uniformly.
pub fn lift_gradient(img: &PeriodicImage, layers: usize) -> Result<OrientationStack> {
    check_layers(layers)?;
    let m = img.size();
    let mut data = vec![0.0; m * m * layers];
    for y in 0..m {
        for x in 0..m {
            let v = img.get(x, y);
            let (gx, gy) = finite_gradient(img, (x, y));
            let cell = &mut data[(y * m + x) * layers..(y * m + x + 1) * layers];
            if gx.abs() + gy.abs() > 0.0 {
                cell[nearest_layer(level_curve_angle(gx, gy), layers)] = v;
            } else {
                cell.fill(v / layers as f64);
            }
        }
    }
    Ok(OrientationStack::from_raw(m, layers, data))
}

/// Trivial lift: every pixel value is spread uniformly over all layers.
pub fn lift_trivial(img: &PeriodicImage, layers: usize) -> Result<OrientationStack> {
    check_layers(layers)?;
    let n = layers as f64;
    let data = img
        .as_slice()
        .iter()
        .flat_map(|&v| std::iter::repeat_n(v / n, layers))
        .collect();
    Ok(OrientationStack::from_raw(img.size(), layers, data))
}

/// Lift at one fixed orientation layer for every pixel.
pub fn lift_constant_angle(
    img: &PeriodicImage,
    layers: usize,
    theta: f64,
) -> Result<OrientationStack> {
    check_layers(layers)?;
    let r = nearest_layer(theta, layers);
    let m = img.size();
    let mut stack = OrientationStack::zeros(m, layers);
    for y in 0..m {
        for x in 0..m {
            stack.set(x, y, r, img.get(x, y));
        }
    }
    Ok(stack)
}
