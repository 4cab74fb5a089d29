//! Corruption generation, reconstruction metrics, baselines and synthetic
//! test images.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::average::peel_fill;
use crate::error::{Error, Result};
use crate::grid::{wrap, CorruptionMask, Label, PeriodicImage, GRAY_STEP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CorruptionPattern {
    /// Randomly placed and oriented straight segments.
    #[default]
    Lines,
    RandomPixels,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorruptionSpec {
    pub pattern: CorruptionPattern,
    /// Side of the square brush used to draw segments, in pixels.
    pub line_width: usize,
    pub target_fraction: f64,
    pub seed: u64,
}

impl CorruptionSpec {
    pub fn lines(target_fraction: f64, line_width: usize, seed: u64) -> Self {
        CorruptionSpec {
            pattern: CorruptionPattern::Lines,
            line_width,
            target_fraction,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.target_fraction) {
            return Err(Error::invalid(format!(
                "corruption fraction {} must lie in [0, 1)",
                self.target_fraction
            )));
        }
        if self.line_width == 0 {
            return Err(Error::invalid("line width must be >= 1"));
        }
        Ok(())
    }
}

/// Overlays corruption until the bad fraction reaches the target. Bad pixels
/// are set to 0; good pixels keep their value, except that a good pixel
/// holding exactly 0 is raised to [`GRAY_STEP`].
pub fn corrupt(img: &PeriodicImage, spec: &CorruptionSpec) -> Result<(PeriodicImage, CorruptionMask)> {
    spec.validate()?;
    let m = img.size();
    let total = m * m;
    let target = (spec.target_fraction * total as f64).ceil() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut bad = vec![false; total];

    match spec.pattern {
        CorruptionPattern::RandomPixels => {
            for i in sample(&mut rng, total, target) {
                bad[i] = true;
            }
        }
        CorruptionPattern::Lines => {
            let mut count = 0;
            let w = spec.line_width as isize;
            let lo = -(w - 1) / 2;
            while count < target {
                let cx = rng.random::<f64>() * m as f64;
                let cy = rng.random::<f64>() * m as f64;
                let angle = rng.random::<f64>() * PI;
                let length = (0.25 + 0.75 * rng.random::<f64>()) * m as f64;
                let (dx, dy) = (angle.cos(), angle.sin());
                let samples = (2.0 * length).ceil() as usize;
                'segment: for s in 0..=samples {
                    let t = s as f64 * 0.5 - 0.5 * length;
                    let px = (cx + t * dx).floor() as isize;
                    let py = (cy + t * dy).floor() as isize;
                    for oy in lo..lo + w {
                        for ox in lo..lo + w {
                            let i = wrap(py + oy, m) * m + wrap(px + ox, m);
                            if !bad[i] {
                                bad[i] = true;
                                count += 1;
                                if count >= target {
                                    break 'segment;
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    let labels: Vec<Label> = bad.iter().map(|&b| if b { Label::Bad } else { Label::Good }).collect();
    let mask = CorruptionMask::new(m, labels)?;
    let data = img
        .as_slice()
        .iter()
        .zip(&bad)
        .map(|(&v, &b)| if b { 0.0 } else if v == 0.0 { GRAY_STEP } else { v })
        .collect();
    Ok((PeriodicImage::new(m, data)?, mask))
}

/// PSNR in dB for signals in `[0, 1]`; `+∞` when the error vanishes.
pub fn psnr(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (1.0 / mse).log10()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub mse_all: f64,
    pub psnr_all: f64,
    /// MSE over the bad pixels; 0 when there are none.
    pub mse_bad: f64,
    pub psnr_bad: f64,
    pub bad_pixels: usize,
}

pub fn metrics(reconstructed: &PeriodicImage, truth: &PeriodicImage, mask: &CorruptionMask) -> Result<Metrics> {
    for s in [truth.size(), mask.size()] {
        if s != reconstructed.size() {
            return Err(Error::SizeMismatch {
                expected: reconstructed.size(),
                actual: s,
            });
        }
    }
    let mut sum_all = 0.0;
    let mut sum_bad = 0.0;
    let mut bad_pixels = 0;
    for ((r, t), l) in reconstructed.as_slice().iter().zip(truth.as_slice()).zip(mask.labels()) {
        let e = (r - t) * (r - t);
        sum_all += e;
        if *l == Label::Bad {
            sum_bad += e;
            bad_pixels += 1;
        }
    }
    let mse_all = sum_all / reconstructed.len() as f64;
    let mse_bad = if bad_pixels == 0 { 0.0 } else { sum_bad / bad_pixels as f64 };
    Ok(Metrics {
        mse_all,
        psnr_all: psnr(mse_all),
        mse_bad,
        psnr_bad: psnr(mse_bad),
        bad_pixels,
    })
}

fn fmt_value(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.6}")
    }
}

impl Metrics {
    /// `key=value` lines with the keys `method`, `mse`, `psnr_all`,
    /// `psnr_bad`, `seconds`.
    pub fn to_records(&self, method: &str, seconds: f64) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "method={method}");
        let _ = writeln!(out, "mse={}", fmt_value(self.mse_all));
        let _ = writeln!(out, "psnr_all={}", fmt_value(self.psnr_all));
        let _ = writeln!(out, "psnr_bad={}", fmt_value(self.psnr_bad));
        let _ = writeln!(out, "seconds={seconds:.3}");
        out
    }
}

/// Peeling fill with the median of the good neighbours; even counts take the
/// lower of the two middle values.
pub fn median_filter(img: &PeriodicImage, mask: &CorruptionMask) -> Result<PeriodicImage> {
    let mut vals = Vec::with_capacity(8);
    peel_fill(img, mask, |_, nb| {
        vals.clear();
        vals.extend(nb.iter().map(|&(_, v)| v));
        Ok(lower_median(&mut vals))
    })
    .map(|(out, _)| out)
}

pub fn lower_median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values[(values.len() - 1) / 2]
}

/// Deterministic synthetic test images with smooth and sharp structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Synthetic {
    Stripes,
    Rings,
    Blobs,
    Bars,
    Waves,
}

impl Synthetic {
    pub const ALL: [Synthetic; 5] = [
        Synthetic::Stripes,
        Synthetic::Rings,
        Synthetic::Blobs,
        Synthetic::Bars,
        Synthetic::Waves,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Synthetic::Stripes => "stripes",
            Synthetic::Rings => "rings",
            Synthetic::Blobs => "blobs",
            Synthetic::Bars => "bars",
            Synthetic::Waves => "waves",
        }
    }

    pub fn render(self, size: usize) -> PeriodicImage {
        let m = size as f64;
        let tau = 2.0 * PI;
        let smoothstep = |e: f64| {
            let t = e.clamp(0.0, 1.0);
            t * t * (3.0 - 2.0 * t)
        };
        // periodic distance along one axis, in pixels
        let pd = |a: f64, b: f64| {
            let d = (a - b).rem_euclid(m);
            d.min(m - d)
        };
        let img = PeriodicImage::from_fn(size, |x, y| {
            let (u, v) = (x as f64 / m, y as f64 / m);
            let value = match self {
                Synthetic::Stripes => 0.5 + 0.4 * (tau * (5.0 * u + 3.0 * v)).sin(),
                Synthetic::Rings => {
                    let r = (pd(x as f64, 0.5 * m).powi(2) + pd(y as f64, 0.45 * m).powi(2)).sqrt() / m;
                    0.5 + 0.4 * (tau * 6.0 * r).cos() * (-3.0 * r).exp()
                }
                Synthetic::Blobs => {
                    let centres = [(0.25, 0.3, 0.08, 0.8), (0.7, 0.25, 0.12, 0.6), (0.45, 0.7, 0.1, 0.9), (0.85, 0.75, 0.06, 0.5)];
                    let mut acc = 0.1;
                    for (cx, cy, s, amp) in centres {
                        let dx = pd(x as f64, cx * m) / m;
                        let dy = pd(y as f64, cy * m) / m;
                        acc += amp * (-(dx * dx + dy * dy) / (2.0 * s * s)).exp();
                    }
                    acc
                }
                Synthetic::Bars => {
                    // soft-edged dark bars: two horizontal, one vertical, one diagonal
                    let edge = 1.5 / m;
                    let bar = |d: f64, half: f64| 1.0 - smoothstep((d - half) / edge + 0.5);
                    let h1 = bar((v - 0.25).abs(), 0.05);
                    let h2 = bar((v - 0.65).abs(), 0.03);
                    let vt = bar((u - 0.6).abs(), 0.04);
                    let dg = {
                        let s = (u + v).rem_euclid(1.0);
                        bar((s - 0.5).abs() / 2f64.sqrt(), 0.025)
                    };
                    0.15 + 0.75 * h1.max(h2).max(vt).max(dg)
                }
                Synthetic::Waves => {
                    0.5 + 0.2 * (tau * 2.0 * u).sin() * (tau * 3.0 * v).cos() + 0.2 * (tau * (u - 2.0 * v)).cos()
                }
            };
            value.clamp(GRAY_STEP, 1.0)
        });
        img.expect("synthetic images stay in range")
    }
}
