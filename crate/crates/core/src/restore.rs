//! Static and dynamic restoration loops.
//!
//! Each iteration lifts the current image, runs an injected evolution,
//! projects and renormalizes, then writes the stored value back into every
//! good pixel. In dynamic mode, bad pixels that climbed above `epsilon` are
//! promoted to good with their current value frozen.

use crate::error::{Error, Result};
use crate::grid::{CorruptionMask, Label, OrientationStack, PeriodicImage};
use crate::project::renormalize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RestoreMode {
    /// The good set is fixed to the initially uncorrupted pixels.
    Static,
    /// Reconstructed pixels above the threshold join the good set.
    #[default]
    Dynamic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestoreParams {
    pub iterations: usize,
    pub epsilon: f64,
    pub mode: RestoreMode,
}

impl RestoreParams {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::invalid("restoration needs at least one iteration"));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::invalid(format!("threshold {} must be >= 0", self.epsilon)));
        }
        Ok(())
    }
}

/// Runs `params.iterations` rounds of lift → evolve → project → renormalize →
/// reset. The renormalization target is the maximum of the image that was
/// lifted in that round.
///
/// Good pixels of `mask0` hold their `f0` values in the output bit for bit.
pub fn restore_loop<L, E, P>(
    f0: &PeriodicImage,
    mask0: &CorruptionMask,
    params: &RestoreParams,
    lift: L,
    evolve: E,
    project: P,
) -> Result<PeriodicImage>
where
    L: Fn(&PeriodicImage) -> Result<OrientationStack>,
    E: FnMut(OrientationStack, &PeriodicImage) -> Result<OrientationStack>,
    P: Fn(&OrientationStack) -> PeriodicImage,
{
    restore_loop_traced(f0, mask0, params, lift, evolve, project).map(|(img, _)| img)
}

/// [`restore_loop`] that also returns the final good/bad labelling.
pub fn restore_loop_traced<L, E, P>(
    f0: &PeriodicImage,
    mask0: &CorruptionMask,
    params: &RestoreParams,
    lift: L,
    mut evolve: E,
    project: P,
) -> Result<(PeriodicImage, CorruptionMask)>
where
    L: Fn(&PeriodicImage) -> Result<OrientationStack>,
    E: FnMut(OrientationStack, &PeriodicImage) -> Result<OrientationStack>,
    P: Fn(&OrientationStack) -> PeriodicImage,
{
    params.validate()?;
    if f0.size() != mask0.size() {
        return Err(Error::SizeMismatch {
            expected: f0.size(),
            actual: mask0.size(),
        });
    }
    let mut fixed: Vec<Option<f64>> = f0
        .as_slice()
        .iter()
        .zip(mask0.labels())
        .map(|(&v, &l)| (l == Label::Good).then_some(v))
        .collect();
    if fixed.iter().all(Option::is_some) {
        return Ok((f0.clone(), mask0.clone()));
    }

    let mut current = f0.clone();
    for _ in 0..params.iterations {
        let lifted = lift(&current)?;
        let evolved = evolve(lifted, &current)?;
        let mut next = renormalize(&project(&evolved), current.max()).into_vec();
        for (v, slot) in next.iter_mut().zip(fixed.iter_mut()) {
            match slot {
                Some(stored) => *v = *stored,
                None if params.mode == RestoreMode::Dynamic && *v > params.epsilon => {
                    *slot = Some(*v);
                }
                None => {}
            }
        }
        current = PeriodicImage::new(f0.size(), next)?;
    }
    let labels = fixed
        .iter()
        .map(|s| if s.is_some() { Label::Good } else { Label::Bad })
        .collect();
    Ok((current, CorruptionMask::new(f0.size(), labels)?))
}
