//! Hypoelliptic evolution with per-pixel diffusion coefficients.
//!
//! The generator `Δ_H ψ = a(x,y)·Λψ + b(x,y)·Aψ` no longer decouples in
//! frequency. On each time interval it is replaced by the constant generator
//! with the frozen maxima `a' = max a`, `b' = max b`, plus the explicit drift
//! `d_i = Δ_H ψ_{i−1} − Δ'_H ψ_{i−1}` evaluated at the start of the interval:
//!
//! ```text
//! ∂ψ/∂t = Δ'_H ψ + d_i,   t ∈ [t_{i−1}, t_i]
//! ```
//!
//! which is again solved blockwise by Crank–Nicolson.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{gradient_magnitude, layer_angle, OrientationStack, PeriodicImage};
use crate::spectral::{symbol, Fft2d, FrequencySymbol, Propagator, SpectralState};

/// Constants of the heuristic coefficient formula
/// `a = a0 + a1·exp(−u²/σ)`, `b = b0 + b1·exp(−u²/σ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientParams {
    pub a0: f64,
    pub a1: f64,
    pub b0: f64,
    pub b1: f64,
    pub sigma: f64,
}

impl CoefficientParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.a0 > 0.0
            && self.b0 > 0.0
            && self.a1 >= 0.0
            && self.b1 >= 0.0
            && self.sigma > 0.0
            && [self.a0, self.a1, self.b0, self.b1, self.sigma]
                .iter()
                .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "coefficient parameters need a0, b0, sigma > 0 and a1, b1 >= 0: {self:?}"
            )))
        }
    }

    /// `(a, b)` for a given value of the driving quantity `u`.
    #[inline]
    pub fn evaluate(&self, u: f64) -> (f64, f64) {
        let w = (-u * u / self.sigma).exp();
        (self.a0 + self.a1 * w, self.b0 + self.b1 * w)
    }
}

/// Per-pixel diffusion intensities.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField {
    size: usize,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl CoefficientField {
    pub fn new(size: usize, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        for v in [&a, &b] {
            if v.len() != size * size {
                return Err(Error::SizeMismatch {
                    expected: size * size,
                    actual: v.len(),
                });
            }
        }
        if a.iter().chain(&b).any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::invalid("coefficients must be finite and > 0"));
        }
        Ok(CoefficientField { size, a, b })
    }

    pub fn constant(size: usize, a: f64, b: f64) -> Result<Self> {
        Self::new(size, vec![a; size * size], vec![b; size * size])
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn max_a(&self) -> f64 {
        self.a.iter().copied().fold(f64::MIN, f64::max)
    }

    pub fn max_b(&self) -> f64 {
        self.b.iter().copied().fold(f64::MIN, f64::max)
    }
}

fn field_from(size: usize, drive: impl Iterator<Item = f64>, p: &CoefficientParams) -> Result<CoefficientField> {
    p.validate()?;
    let (a, b) = drive.map(|u| p.evaluate(u)).unzip();
    CoefficientField::new(size, a, b)
}

/// Coefficients driven by the gray level: strongest where `f` is small.
pub fn coeffs_from_image(f: &PeriodicImage, p: &CoefficientParams) -> Result<CoefficientField> {
    field_from(f.size(), f.as_slice().iter().copied(), p)
}

/// Coefficients driven by `φ = 1 − |∇g| / max|∇g|`: strongest where the
/// gradient peaks. A constant image has `φ ≡ 1`.
pub fn coeffs_from_gradient(g: &PeriodicImage, p: &CoefficientParams) -> Result<CoefficientField> {
    let grad = gradient_magnitude(g);
    let peak = grad.iter().copied().fold(0.0, f64::max);
    let phi = grad
        .into_iter()
        .map(move |v| if peak > 0.0 { 1.0 - v / peak } else { 1.0 });
    field_from(g.size(), phi, p)
}

/// Time partition for [`evolve_varcoef`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarcoefSolver {
    pub time: f64,
    /// Number of intervals on which the drift is frozen.
    pub substeps: usize,
    /// Crank–Nicolson steps inside each interval.
    pub cn_steps: usize,
}

impl Default for VarcoefSolver {
    fn default() -> Self {
        VarcoefSolver {
            time: 1.0,
            substeps: 20,
            cn_steps: 5,
        }
    }
}

/// Scratch buffers for [`drift`].
struct DriftWork {
    dirs: Vec<(f64, f64)>,
    first: Vec<f64>,
    second: Vec<f64>,
}

impl DriftWork {
    fn new(m: usize, n: usize) -> Self {
        let dirs = (0..n)
            .map(|r| {
                let t = layer_angle(r, n);
                (0.5 * t.cos(), 0.5 * t.sin())
            })
            .collect();
        DriftWork {
            dirs,
            first: vec![0.0; m * m * n],
            second: vec![0.0; m * m * n],
        }
    }
}

/// `Δ_H ψ − Δ'_H ψ` with spatial stencils matching the spectral symbol:
/// the angular part is `¼(ψ_{r−1} − 2ψ_r + ψ_{r+1})`, the spatial part is
/// `(W/2)·D_r(D_r ψ)` with `D_r = cos θ_r δ_x + sin θ_r δ_y` built from
/// centered first differences.
#[allow(clippy::too_many_arguments)]
fn drift(
    psi: &[f64],
    m: usize,
    n: usize,
    coeffs: &CoefficientField,
    frozen: (f64, f64),
    weight: f64,
    work: &mut DriftWork,
    out: &mut [f64],
) {
    directional_difference(psi, m, n, &work.dirs, &mut work.first);
    directional_difference(&work.first, m, n, &work.dirs, &mut work.second);
    let second = &work.second;
    out.par_chunks_mut(n).enumerate().for_each(|(i, cell)| {
        let da = coeffs.a[i] - frozen.0;
        let db = coeffs.b[i] - frozen.1;
        if da == 0.0 && db == 0.0 {
            cell.fill(0.0);
            return;
        }
        let v = &psi[i * n..(i + 1) * n];
        for r in 0..n {
            let angular = 0.25 * (v[(r + n - 1) % n] - 2.0 * v[r] + v[(r + 1) % n]);
            let spatial = 0.5 * weight * second[i * n + r];
            cell[r] = da * angular + db * spatial;
        }
    });
}

/// One application of `D_r` to every layer; `dirs` holds the half-weights
/// `(cos θ_r / 2, sin θ_r / 2)`.
fn directional_difference(src: &[f64], m: usize, n: usize, dirs: &[(f64, f64)], out: &mut [f64]) {
    out.par_chunks_mut(m * n).enumerate().for_each(|(y, row)| {
        let yp = (y + 1) % m;
        let ym = (y + m - 1) % m;
        for x in 0..m {
            let xp = (x + 1) % m;
            let xm = (x + m - 1) % m;
            let east = &src[(y * m + xp) * n..][..n];
            let west = &src[(y * m + xm) * n..][..n];
            let north = &src[(yp * m + x) * n..][..n];
            let south = &src[(ym * m + x) * n..][..n];
            let cell = &mut row[x * n..(x + 1) * n];
            for r in 0..n {
                let (c, s) = dirs[r];
                cell[r] = c * (east[r] - west[r]) + s * (north[r] - south[r]);
            }
        }
    });
}

/// Evolves a stack over `[0, time]` with per-pixel coefficients using
/// frozen-coefficient drift stepping. Negative values are clamped only at
/// the end.
pub fn evolve_varcoef(
    stack: &OrientationStack,
    coeffs: &CoefficientField,
    time: f64,
    substeps: usize,
    cn_steps_per_substep: usize,
) -> Result<OrientationStack> {
    let sym = symbol(stack.size(), stack.layers())?;
    evolve_varcoef_with(
        stack,
        coeffs,
        &sym,
        &VarcoefSolver {
            time,
            substeps,
            cn_steps: cn_steps_per_substep,
        },
    )
}

pub fn evolve_varcoef_with(
    stack: &OrientationStack,
    coeffs: &CoefficientField,
    sym: &FrequencySymbol,
    solver: &VarcoefSolver,
) -> Result<OrientationStack> {
    if coeffs.size() != stack.size() {
        return Err(Error::SizeMismatch {
            expected: stack.size(),
            actual: coeffs.size(),
        });
    }
    if !(solver.time > 0.0 && solver.time.is_finite()) {
        return Err(Error::invalid(format!("final time {} must be > 0", solver.time)));
    }
    if solver.substeps == 0 || solver.cn_steps == 0 {
        return Err(Error::invalid("substeps and Crank-Nicolson steps must be >= 1"));
    }
    let frozen_a = coeffs.max_a();
    let frozen_b = coeffs.max_b();
    let dt = solver.time / (solver.substeps * solver.cn_steps) as f64;

    let (m, n) = (stack.size(), stack.layers());
    let fft = Fft2d::new(m);
    let propagator = Propagator::new(sym, frozen_a, frozen_b, dt)?;
    let mut fft_work = Vec::new();
    let mut drift_work = DriftWork::new(m, n);
    let mut state = SpectralState::zeros(m, n);
    let mut d_hat = SpectralState::zeros(m, n);
    let mut current = stack.as_slice().to_vec();
    let mut d = vec![0.0; current.len()];
    fft.forward_into(&current, n, &mut fft_work, &mut state.data);
    for i in 0..solver.substeps {
        if i > 0 {
            fft.inverse_into(&state.data, n, &mut fft_work, &mut current);
        }
        drift(&current, m, n, coeffs, (frozen_a, frozen_b), sym.spatial_weight(), &mut drift_work, &mut d);
        fft.forward_into(&d, n, &mut fft_work, &mut d_hat.data);
        propagator.run(&mut state, solver.cn_steps, Some(&d_hat), true)?;
    }
    fft.inverse_into(&state.data, n, &mut fft_work, &mut current);
    let mut out = OrientationStack::from_raw(m, n, current);
    out.clamp_negative();
    Ok(out)
}
