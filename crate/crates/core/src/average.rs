//! Boundary-peeling fills.
//!
//! Each round assigns a value to every bad pixel that touches the good set
//! (its 9-point neighbourhood contains a good pixel) and then promotes all of
//! them to good. Updates within a round read only the round-start state, so
//! the result does not depend on the order in which pixels are visited.

use crate::error::{Error, Result};
use crate::grid::{boundary_bad, neighborhood, CorruptionMask, Label, PeriodicImage, Pixel};

/// A good neighbour seen from a boundary pixel: its position and current value.
pub type Neighbor = (Pixel, f64);

/// Runs the peeling schedule with a caller-supplied update rule and returns
/// the filled image with the number of rounds taken.
pub fn peel_fill<F>(f: &PeriodicImage, mask: &CorruptionMask, mut rule: F) -> Result<(PeriodicImage, usize)>
where
    F: FnMut(Pixel, &[Neighbor]) -> Result<f64>,
{
    if f.size() != mask.size() {
        return Err(Error::SizeMismatch {
            expected: f.size(),
            actual: mask.size(),
        });
    }
    if !mask.has_bad() {
        return Ok((f.clone(), 0));
    }
    if mask.good_count() == 0 {
        return Err(Error::NoGoodPixels);
    }
    let m = f.size();
    let mut img = f.clone();
    let mut current = mask.clone();
    let mut rounds = 0;
    let mut neighbors = Vec::with_capacity(8);
    loop {
        let front = boundary_bad(&current);
        if front.is_empty() {
            break;
        }
        let mut updates = Vec::with_capacity(front.len());
        for &(x, y) in &front {
            neighbors.clear();
            for (nx, ny) in neighborhood(m, x, y) {
                if current.is_good(nx, ny) {
                    neighbors.push(((nx, ny), img.get(nx, ny)));
                }
            }
            updates.push(rule((x, y), &neighbors)?);
        }
        for (&(x, y), v) in front.iter().zip(updates) {
            img.set(x, y, v.clamp(0.0, 1.0));
            current.set(x, y, Label::Good);
        }
        rounds += 1;
    }
    Ok((img, rounds))
}

/// Fills bad pixels with the arithmetic mean of their good neighbours.
pub fn simple_average_fill(f: &PeriodicImage, mask: &CorruptionMask) -> Result<PeriodicImage> {
    peel_fill(f, mask, |_, nb| {
        // offsets from the first value keep constant neighbourhoods exact
        let base = nb[0].1;
        Ok(base + nb.iter().map(|&(_, v)| v - base).sum::<f64>() / nb.len() as f64)
    })
    .map(|(img, _)| img)
}

/// Minimizer over `[0, 1]` of `Σ |X/f_i − h_c/h_i|²` for good neighbours with
/// values `f_i` and smoothed values `h_i`:
/// `X* = h_c · Σ (f_i h_i)⁻¹ / Σ f_i⁻²`, clamped.
pub fn advanced_value(h_center: f64, neighbors: &[(f64, f64)]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for &(fv, hv) in neighbors {
        let inv_f = 1.0 / fv;
        num += inv_f / hv;
        den += inv_f * inv_f;
    }
    (h_center * num / den).clamp(0.0, 1.0)
}

/// Fills bad pixels by fusing the good neighbours with a smoothed image `h`.
pub fn advanced_average_fill(
    f: &PeriodicImage,
    mask: &CorruptionMask,
    h: &PeriodicImage,
) -> Result<PeriodicImage> {
    if h.size() != f.size() {
        return Err(Error::SizeMismatch {
            expected: f.size(),
            actual: h.size(),
        });
    }
    if let Some(v) = h.as_slice().iter().find(|&&v| v <= 0.0) {
        return Err(Error::invalid(format!("smoothed image must be > 0, found {v}")));
    }
    if f.size() == mask.size()
        && f
            .as_slice()
            .iter()
            .zip(mask.labels())
            .any(|(&v, &l)| l == Label::Good && v <= 0.0)
    {
        return Err(Error::invalid("good pixels must hold positive values"));
    }
    let mut pairs = Vec::with_capacity(8);
    peel_fill(f, mask, |(x, y), nb| {
        pairs.clear();
        pairs.extend(nb.iter().map(|&((nx, ny), v)| (v, h.get(nx, ny))));
        Ok(advanced_value(h.get(x, y), &pairs))
    })
    .map(|(img, _)| img)
}
