//! Reference computations written independently of the library code paths.
#![allow(dead_code)]

use std::f64::consts::PI;

use ahe_core::spectral::Complex64;
use ahe_core::{CorruptionMask, Label, OrientationStack, PeriodicImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_stack(size: usize, layers: usize, seed: u64) -> OrientationStack {
    let mut r = rng(seed);
    let data = (0..size * size * layers).map(|_| r.random::<f64>()).collect();
    OrientationStack::new(size, layers, data).unwrap()
}

/// Values in `[lo, 1]`.
pub fn random_image(size: usize, lo: f64, seed: u64) -> PeriodicImage {
    let mut r = rng(seed);
    let data = (0..size * size).map(|_| lo + (1.0 - lo) * r.random::<f64>()).collect();
    PeriodicImage::new(size, data).unwrap()
}

pub fn random_mask(size: usize, bad_probability: f64, seed: u64) -> CorruptionMask {
    let mut r = rng(seed);
    let labels = (0..size * size)
        .map(|_| if r.random::<f64>() < bad_probability { Label::Bad } else { Label::Good })
        .collect();
    CorruptionMask::new(size, labels).unwrap()
}

/// Zeroes the bad pixels of `img`.
pub fn apply_mask(img: &PeriodicImage, mask: &CorruptionMask) -> PeriodicImage {
    let data = img
        .as_slice()
        .iter()
        .zip(mask.labels())
        .map(|(&v, l)| if *l == Label::Bad { 0.0 } else { v })
        .collect();
    PeriodicImage::new(img.size(), data).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `max |a − b| / max |b|`.
pub fn max_rel_err(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().map(|v| v.abs()).fold(0.0, f64::max);
    max_abs_diff(a, b) / scale
}

/// Plain double-sum DFT of a row-major `m × m` array, indexed `[ky][kx]`.
pub fn dft2(values: &[Complex64], m: usize, inverse: bool) -> Vec<Complex64> {
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut out = vec![Complex64::new(0.0, 0.0); m * m];
    for ky in 0..m {
        for kx in 0..m {
            let mut acc = Complex64::new(0.0, 0.0);
            for y in 0..m {
                for x in 0..m {
                    let phase = sign * 2.0 * PI * ((kx * x + ky * y) % m) as f64 / m as f64;
                    acc += values[y * m + x] * Complex64::from_polar(1.0, phase);
                }
            }
            out[ky * m + kx] = if inverse { acc / (m * m) as f64 } else { acc };
        }
    }
    out
}

/// Layer `r` of a stack as a complex plane.
pub fn layer(stack: &OrientationStack, r: usize) -> Vec<Complex64> {
    let m = stack.size();
    (0..m * m)
        .map(|i| Complex64::new(stack.get(i % m, i / m, r), 0.0))
        .collect()
}

/// Dense `n × n` block generator for frequency `(kx, ky)`:
/// `a/4` on the cyclic neighbours, `−a/2 − (b·w/2)·s_p²` on the diagonal.
pub fn generator(m: usize, n: usize, a: f64, b: f64, w: f64, kx: usize, ky: usize) -> Vec<f64> {
    let mut l = vec![0.0; n * n];
    for p in 0..n {
        let theta = p as f64 * PI / n as f64;
        let s = theta.cos() * (2.0 * PI * kx as f64 / m as f64).sin()
            + theta.sin() * (2.0 * PI * ky as f64 / m as f64).sin();
        l[p * n + p] += -0.5 * a - 0.5 * b * w * s * s;
        l[p * n + (p + 1) % n] += 0.25 * a;
        l[p * n + (p + n - 1) % n] += 0.25 * a;
    }
    l
}

fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}

/// Matrix exponential by scaling and squaring with a Taylor core.
pub fn expm(a: &[f64], n: usize) -> Vec<f64> {
    let norm = (0..n)
        .map(|j| (0..n).map(|i| a[i * n + j].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scale = 0.5f64.powi(squarings as i32);
    let scaled: Vec<f64> = a.iter().map(|v| v * scale).collect();
    let mut result = vec![0.0; n * n];
    let mut term = vec![0.0; n * n];
    for i in 0..n {
        result[i * n + i] = 1.0;
        term[i * n + i] = 1.0;
    }
    for k in 1..30 {
        term = matmul(&term, &scaled, n);
        for v in term.iter_mut() {
            *v /= k as f64;
        }
        for (r, t) in result.iter_mut().zip(&term) {
            *r += t;
        }
    }
    for _ in 0..squarings {
        result = matmul(&result, &result, n);
    }
    result
}

/// `exp(t·L)` applied blockwise in the frequency domain, with negative
/// values clamped at the end. Uses `w = m`.
pub fn evolve_dense(stack: &OrientationStack, a: f64, b: f64, t: f64) -> Vec<f64> {
    let (m, n) = (stack.size(), stack.layers());
    let spectra: Vec<Vec<Complex64>> = (0..n).map(|r| dft2(&layer(stack, r), m, false)).collect();
    let mut evolved = vec![vec![Complex64::new(0.0, 0.0); m * m]; n];
    for ky in 0..m {
        for kx in 0..m {
            let l = generator(m, n, a, b, m as f64, kx, ky);
            let tl: Vec<f64> = l.iter().map(|v| v * t).collect();
            let e = expm(&tl, n);
            let i = ky * m + kx;
            for p in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for q in 0..n {
                    acc += spectra[q][i] * e[p * n + q];
                }
                evolved[p][i] = acc;
            }
        }
    }
    let planes: Vec<Vec<Complex64>> = evolved.iter().map(|s| dft2(s, m, true)).collect();
    let mut out = vec![0.0; m * m * n];
    for i in 0..m * m {
        for r in 0..n {
            out[i * n + r] = planes[r][i].re.max(0.0);
        }
    }
    out
}

/// Fully spatial explicit-Euler integration of
/// `∂ψ/∂t = a(x)·¼(ψ_{r−1} − 2ψ_r + ψ_{r+1}) + b(x)·(w/2)·D_r²ψ`,
/// with `D_r²` written out as a 5 × 5 stencil of step-2 differences.
/// Negative values are clamped at the end.
pub fn explicit_euler(
    stack: &OrientationStack,
    a: &[f64],
    b: &[f64],
    w: f64,
    t: f64,
    steps: usize,
) -> Vec<f64> {
    let (m, n) = (stack.size(), stack.layers());
    let idx = |x: isize, y: isize, r: usize| -> usize {
        let xm = x.rem_euclid(m as isize) as usize;
        let ym = y.rem_euclid(m as isize) as usize;
        (ym * m + xm) * n + r
    };
    let trig: Vec<(f64, f64)> = (0..n)
        .map(|r| {
            let th = r as f64 * PI / n as f64;
            (th.cos(), th.sin())
        })
        .collect();
    let dt = t / steps as f64;
    let mut psi = stack.as_slice().to_vec();
    let mut next = psi.clone();
    for _ in 0..steps {
        for y in 0..m as isize {
            for x in 0..m as isize {
                let i = (y as usize) * m + x as usize;
                for r in 0..n {
                    let c = psi[idx(x, y, r)];
                    let ang = 0.25 * (psi[idx(x, y, (r + n - 1) % n)] - 2.0 * c + psi[idx(x, y, (r + 1) % n)]);
                    let (co, si) = trig[r];
                    // (co δx + si δy)² with δ the centered difference, δ f = (f(+1) − f(−1))/2
                    let dxx = psi[idx(x + 2, y, r)] - 2.0 * c + psi[idx(x - 2, y, r)];
                    let dyy = psi[idx(x, y + 2, r)] - 2.0 * c + psi[idx(x, y - 2, r)];
                    let dxy = psi[idx(x + 1, y + 1, r)] - psi[idx(x + 1, y - 1, r)] - psi[idx(x - 1, y + 1, r)]
                        + psi[idx(x - 1, y - 1, r)];
                    let d2 = 0.25 * (co * co * dxx + 2.0 * co * si * dxy + si * si * dyy);
                    next[idx(x, y, r)] = c + dt * (a[i] * ang + b[i] * 0.5 * w * d2);
                }
            }
        }
        std::mem::swap(&mut psi, &mut next);
    }
    psi.iter().map(|v| v.max(0.0)).collect()
}

/// Objective of the fused fill: `Σ |X/f_i − h_c/h_i|²`.
pub fn fusion_objective(x: f64, hc: f64, neighbors: &[(f64, f64)]) -> f64 {
    neighbors.iter().map(|&(f, h)| (x / f - hc / h).powi(2)).sum()
}

/// Minimizer of [`fusion_objective`] over a uniform grid on `[0, 1]`.
pub fn grid_search(hc: f64, neighbors: &[(f64, f64)], step: f64) -> f64 {
    let count = (1.0 / step).round() as usize;
    let mut best = (f64::INFINITY, 0.0);
    for k in 0..=count {
        let x = k as f64 * step;
        let v = fusion_objective(x, hc, neighbors);
        if v < best.0 {
            best = (v, x);
        }
    }
    best.1
}

/// Periodic convolution with an isotropic Gaussian evaluated directly over
/// every offset of the torus, summing all periodic images of the kernel.
pub fn gaussian_direct(img: &PeriodicImage, sigma: f64) -> Vec<f64> {
    let m = img.size();
    let wraps = (10.0 * sigma / m as f64).ceil() as i64 + 1;
    let mut w1 = vec![0.0; m];
    for (d, w) in w1.iter_mut().enumerate() {
        for k in -wraps..=wraps {
            let dd = d as f64 + (k * m as i64) as f64;
            *w += (-dd * dd / (2.0 * sigma * sigma)).exp();
        }
    }
    let total: f64 = w1.iter().sum();
    let mut out = vec![0.0; m * m];
    for y in 0..m {
        for x in 0..m {
            let mut acc = 0.0;
            for sy in 0..m {
                for sx in 0..m {
                    let dx = (x + m - sx) % m;
                    let dy = (y + m - sy) % m;
                    acc += w1[dx] * w1[dy] * img.get(sx, sy);
                }
            }
            out[y * m + x] = acc / (total * total);
        }
    }
    out
}

/// Weighted second moment of `img` about `centre` along the unit vector `dir`,
/// using periodic (minimal) displacements.
pub fn directional_moment(img: &PeriodicImage, centre: (usize, usize), dir: (f64, f64)) -> f64 {
    directional_moment_raw(img.as_slice(), img.size(), centre, dir)
}

/// [`directional_moment`] over a raw row-major `m × m` array (values may be signed).
pub fn directional_moment_raw(values: &[f64], m: usize, centre: (usize, usize), dir: (f64, f64)) -> f64 {
    let m = m as isize;
    let wrapd = |d: isize| {
        let d = d.rem_euclid(m);
        if d > m / 2 { d - m } else { d }
    };
    let norm = (dir.0 * dir.0 + dir.1 * dir.1).sqrt();
    let (ux, uy) = (dir.0 / norm, dir.1 / norm);
    let mut mass = 0.0;
    let mut acc = 0.0;
    for y in 0..m {
        for x in 0..m {
            let v = values[(y * m + x) as usize];
            let dx = wrapd(x - centre.0 as isize) as f64;
            let dy = wrapd(y - centre.1 as isize) as f64;
            let proj = dx * ux + dy * uy;
            acc += v * proj * proj;
            mass += v;
        }
    }
    acc / mass
}

/// Gaussian elimination with partial pivoting on a dense `n × n` system.
pub fn solve_real(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i * n + col].abs().total_cmp(&m[j * n + col].abs()))
            .unwrap();
        if pivot != col {
            for k in 0..n {
                m.swap(col * n + k, pivot * n + k);
            }
            x.swap(col, pivot);
        }
        for row in col + 1..n {
            let factor = m[row * n + col] / m[col * n + col];
            for k in col..n {
                m[row * n + k] -= factor * m[col * n + k];
            }
            x[row] -= factor * x[col];
        }
    }
    for row in (0..n).rev() {
        let mut acc = x[row];
        for k in row + 1..n {
            acc -= m[row * n + k] * x[k];
        }
        x[row] = acc / m[row * n + row];
    }
    x
}

/// Straightforward boundary peeling: every round scans the whole grid for bad
/// pixels with a good 8-neighbour, evaluates `rule` on the round-start values
/// of those neighbours, then marks the whole front good.
pub fn naive_peel(
    f: &PeriodicImage,
    mask: &CorruptionMask,
    rule: impl Fn((usize, usize), &[((usize, usize), f64)]) -> f64,
) -> Vec<f64> {
    let m = f.size();
    let mut values = f.as_slice().to_vec();
    let mut good: Vec<bool> = mask.labels().iter().map(|l| *l == Label::Good).collect();
    loop {
        let mut front = Vec::new();
        for y in 0..m {
            for x in 0..m {
                if good[y * m + x] {
                    continue;
                }
                let mut nb = Vec::new();
                for dy in [m - 1, 0, 1] {
                    for dx in [m - 1, 0, 1] {
                        let (nx, ny) = ((x + dx) % m, (y + dy) % m);
                        if (nx, ny) != (x, y) && good[ny * m + nx] {
                            nb.push(((nx, ny), values[ny * m + nx]));
                        }
                    }
                }
                if !nb.is_empty() {
                    front.push((y * m + x, rule((x, y), &nb)));
                }
            }
        }
        if front.is_empty() {
            return values;
        }
        for (i, v) in front {
            values[i] = v.clamp(0.0, 1.0);
            good[i] = true;
        }
    }
}
