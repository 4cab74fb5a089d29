//! Constant-coefficient hypoelliptic evolution in the frequency domain.
//!
//! After a 2-D DFT of every orientation layer the semi-discrete operator
//! decouples into `M²` independent linear systems over `ℂᴺ`:
//!
//! ```text
//! dΨ̂_{k,l}/dt = L_{k,l} Ψ̂_{k,l},   L_{k,l} = ½ (a Λ_N − b W diag_p (a^p_{k,l})²)
//! (Λ_N v)_r   = ½ (v_{r−1} − 2 v_r + v_{r+1})            (cyclic in r)
//! a^p_{k,l}   = cos θ_p sin(2πk/M) + sin θ_p sin(2πl/M)
//! ```
//!
//! with `W = M` (see [`OperatorScaling`]). Each block is advanced by
//! Crank–Nicolson; its left-hand matrix is cyclic tridiagonal, so one step
//! costs `O(N)` per frequency.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
pub use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{layer_angle, OrientationStack};

/// Factor multiplying `b · diag(a^p)²` in the block generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OperatorScaling {
    /// `W = M`, the printed form of the decoupled system.
    #[default]
    Resolution,
    /// `W = 1`.
    Unit,
}

impl OperatorScaling {
    pub fn weight(self, size: usize) -> f64 {
        match self {
            OperatorScaling::Resolution => size as f64,
            OperatorScaling::Unit => 1.0,
        }
    }
}

/// Table of the directional symbols `a^p_{k,l}`, together with the spatial
/// weight `W` used by the block generator.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySymbol {
    size: usize,
    layers: usize,
    weight: f64,
    coeff: Vec<f64>,
}

impl FrequencySymbol {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    /// The factor `W` in `b W diag(a^p)²`.
    pub fn spatial_weight(&self) -> f64 {
        self.weight
    }

    /// `a^p_{kx,ky}` with zero-based frequency indices.
    #[inline]
    pub fn coefficient(&self, kx: usize, ky: usize, p: usize) -> f64 {
        self.coeff[(ky * self.size + kx) * self.layers + p]
    }

    pub fn block(&self, kx: usize, ky: usize) -> &[f64] {
        let start = (ky * self.size + kx) * self.layers;
        &self.coeff[start..start + self.layers]
    }
}

/// Symbol table for an `M × M` grid with `N` orientations and `W = M`.
pub fn symbol(size: usize, layers: usize) -> Result<FrequencySymbol> {
    symbol_scaled(size, layers, OperatorScaling::Resolution)
}

pub fn symbol_scaled(
    size: usize,
    layers: usize,
    scaling: OperatorScaling,
) -> Result<FrequencySymbol> {
    if size < 2 || layers < 1 {
        return Err(Error::invalid(format!(
            "symbol needs M >= 2 and N >= 1 (got M = {size}, N = {layers})"
        )));
    }
    let sines: Vec<f64> = (0..size)
        .map(|k| (2.0 * PI * k as f64 / size as f64).sin())
        .collect();
    let dirs: Vec<(f64, f64)> = (0..layers)
        .map(|p| {
            let t = layer_angle(p, layers);
            (t.cos(), t.sin())
        })
        .collect();
    let mut coeff = Vec::with_capacity(size * size * layers);
    for ky in 0..size {
        for kx in 0..size {
            for &(c, s) in &dirs {
                coeff.push(c * sines[kx] + s * sines[ky]);
            }
        }
    }
    Ok(FrequencySymbol {
        size,
        layers,
        weight: scaling.weight(size),
        coeff,
    })
}

/// Fourier-side unknowns: one `N`-vector per spatial frequency `(kx, ky)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState {
    size: usize,
    layers: usize,
    pub(crate) data: Vec<Complex64>,
}

impl SpectralState {
    pub fn new(size: usize, layers: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != size * size * layers {
            return Err(Error::SizeMismatch {
                expected: size * size * layers,
                actual: data.len(),
            });
        }
        Ok(SpectralState { size, layers, data })
    }

    pub fn zeros(size: usize, layers: usize) -> Self {
        SpectralState {
            size,
            layers,
            data: vec![Complex64::new(0.0, 0.0); size * size * layers],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn block(&self, kx: usize, ky: usize) -> &[Complex64] {
        let start = (ky * self.size + kx) * self.layers;
        &self.data[start..start + self.layers]
    }

    pub fn block_mut(&mut self, kx: usize, ky: usize) -> &mut [Complex64] {
        let start = (ky * self.size + kx) * self.layers;
        &mut self.data[start..start + self.layers]
    }

    /// Largest `|Ψ̂(k) − conj(Ψ̂(−k))|` over all blocks and components.
    pub fn conjugate_asymmetry(&self) -> f64 {
        let m = self.size;
        let mut worst: f64 = 0.0;
        for ky in 0..m {
            for kx in 0..m {
                let mirror = self.block((m - kx) % m, (m - ky) % m);
                for (u, v) in self.block(kx, ky).iter().zip(mirror) {
                    worst = worst.max((u - v.conj()).norm());
                }
            }
        }
        worst
    }

    fn check_compatible(&self, other: &SpectralState) -> Result<()> {
        if self.size != other.size || self.layers != other.layers {
            return Err(Error::SizeMismatch {
                expected: self.data.len(),
                actual: other.data.len(),
            });
        }
        Ok(())
    }
}

/// 2-D FFT plans for one grid size.
pub(crate) struct Fft2d {
    size: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Fft2d {
    pub(crate) fn new(size: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2d {
            size,
            forward: planner.plan_fft_forward(size),
            inverse: planner.plan_fft_inverse(size),
        }
    }

    /// In-place unnormalized 2-D transform of a row-major `M × M` buffer.
    fn transform(&self, buf: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(buf, &mut scratch);
        transpose_in_place(buf, self.size);
        plan.process_with_scratch(buf, &mut scratch);
        transpose_in_place(buf, self.size);
    }

    pub(crate) fn stack_to_spectral(&self, stack: &OrientationStack) -> SpectralState {
        let mut state = SpectralState::zeros(stack.size(), stack.layers());
        self.forward_into(stack.as_slice(), stack.layers(), &mut Vec::new(), &mut state.data);
        state
    }

    /// Real part of the normalized inverse transform; the state is assumed
    /// conjugate symmetric.
    pub(crate) fn spectral_to_stack(&self, state: &SpectralState) -> OrientationStack {
        let mut data = vec![0.0; state.data.len()];
        self.inverse_into(&state.data, state.layers, &mut Vec::new(), &mut data);
        OrientationStack::from_raw(state.size, state.layers, data)
    }

    /// Forward transform of a pixel-major stack into block-major `out`.
    /// `work` is scratch space reused between calls.
    pub(crate) fn forward_into(&self, src: &[f64], n: usize, work: &mut Vec<Vec<Complex64>>, out: &mut [Complex64]) {
        let m = self.size;
        let bufs = self.pair_buffers(n, work);

        // layers 2q and 2q+1 become the real and imaginary parts of buffer q
        for (i, cell) in src.chunks_exact(n).enumerate() {
            for (q, buf) in bufs.iter_mut().enumerate() {
                let im = if 2 * q + 1 < n { cell[2 * q + 1] } else { 0.0 };
                buf[i] = Complex64::new(cell[2 * q], im);
            }
        }
        bufs.par_iter_mut()
            .for_each(|buf| self.transform(buf, &self.forward));

        let bufs = &*bufs;
        out.par_chunks_mut(n).enumerate().for_each(|(i, block)| {
            let (kx, ky) = (i % m, i / m);
            let j = ((m - ky) % m) * m + (m - kx) % m;
            for (q, buf) in bufs.iter().enumerate() {
                let z = buf[i];
                let zm = buf[j].conj();
                block[2 * q] = (z + zm) * 0.5;
                if 2 * q + 1 < n {
                    // (z − zm) / 2i
                    let d = (z - zm) * 0.5;
                    block[2 * q + 1] = Complex64::new(d.im, -d.re);
                }
            }
        });
    }

    /// Inverse of [`Fft2d::forward_into`], keeping real parts.
    pub(crate) fn inverse_into(&self, src: &[Complex64], n: usize, work: &mut Vec<Vec<Complex64>>, out: &mut [f64]) {
        let scale = 1.0 / (self.size * self.size) as f64;
        let bufs = self.pair_buffers(n, work);
        for (i, block) in src.chunks_exact(n).enumerate() {
            for (q, buf) in bufs.iter_mut().enumerate() {
                let u = block[2 * q];
                buf[i] = if 2 * q + 1 < n {
                    let v = block[2 * q + 1];
                    u + Complex64::new(-v.im, v.re)
                } else {
                    u
                };
            }
        }
        bufs.par_iter_mut()
            .for_each(|buf| self.transform(buf, &self.inverse));

        let bufs = &*bufs;
        out.par_chunks_mut(n).enumerate().for_each(|(i, cell)| {
            for (q, buf) in bufs.iter().enumerate() {
                let z = buf[i];
                cell[2 * q] = z.re * scale;
                if 2 * q + 1 < n {
                    cell[2 * q + 1] = z.im * scale;
                }
            }
        });
    }

    fn pair_buffers<'a>(&self, n: usize, work: &'a mut Vec<Vec<Complex64>>) -> &'a mut [Vec<Complex64>] {
        let cells = self.size * self.size;
        let pairs = n.div_ceil(2);
        if work.len() != pairs || work.iter().any(|b| b.len() != cells) {
            *work = vec![vec![Complex64::new(0.0, 0.0); cells]; pairs];
        }
        work
    }
}

fn transpose_in_place(buf: &mut [Complex64], m: usize) {
    const TILE: usize = 16;
    for bi in (0..m).step_by(TILE) {
        for bj in (bi..m).step_by(TILE) {
            for i in bi..(bi + TILE).min(m) {
                let from = if bi == bj { i + 1 } else { bj };
                for j in from..(bj + TILE).min(m) {
                    buf.swap(i * m + j, j * m + i);
                }
            }
        }
    }
}

/// Unnormalized 2-D DFT of every orientation layer.
pub fn to_spectral(stack: &OrientationStack) -> SpectralState {
    Fft2d::new(stack.size()).stack_to_spectral(stack)
}

/// Inverse of [`to_spectral`]; keeps the real part of a conjugate-symmetric
/// state.
pub fn to_spatial(state: &SpectralState) -> OrientationStack {
    Fft2d::new(state.size()).spectral_to_stack(state)
}

/// Crank–Nicolson factorization of one frequency block.
///
/// The block generator is `L = c (S⁻ + S⁺) + diag(d)` with `c = a/4` and
/// `d_p = −a/2 − (bW/2)(a^p)²`, `S^±` the cyclic shifts over `p`.
struct BlockStepper {
    h: f64,
    dt: f64,
    couple: f64,
    /// `1 + h·d_p`
    rhs_diag: Vec<f64>,
    solver: CyclicSolver,
}

impl BlockStepper {
    fn new(coeffs: &[f64], a: f64, b: f64, weight: f64, dt: f64) -> Option<Self> {
        let h = 0.5 * dt;
        let couple = 0.25 * a;
        let diag: Vec<f64> = coeffs
            .iter()
            .map(|s| -0.5 * a - 0.5 * b * weight * s * s)
            .collect();
        let lhs_diag: Vec<f64> = diag.iter().map(|d| 1.0 - h * d).collect();
        let rhs_diag = diag.iter().map(|d| 1.0 + h * d).collect();
        let solver = CyclicSolver::new(&lhs_diag, -h * couple)?;
        Some(BlockStepper {
            h,
            dt,
            couple,
            rhs_diag,
            solver,
        })
    }

    /// `rhs ← (I + hL) x + dt·src`.
    fn explicit_half(&self, x: &[Complex64], src: Option<&[Complex64]>, rhs: &mut [Complex64]) {
        let n = x.len();
        let hc = self.h * self.couple;
        let d = &self.rhs_diag;
        if n >= 3 {
            rhs[0] = x[0] * d[0] + (x[n - 1] + x[1]) * hc;
            for r in 1..n - 1 {
                rhs[r] = x[r] * d[r] + (x[r - 1] + x[r + 1]) * hc;
            }
            rhs[n - 1] = x[n - 1] * d[n - 1] + (x[n - 2] + x[0]) * hc;
        } else {
            for r in 0..n {
                rhs[r] = x[r] * d[r] + (x[(r + n - 1) % n] + x[(r + 1) % n]) * hc;
            }
        }
        if let Some(src) = src {
            for (v, s) in rhs.iter_mut().zip(src) {
                *v += s * self.dt;
            }
        }
    }

    /// `x ← (I − hL)⁻¹ ((I + hL) x + dt·src)`.
    fn step(&self, x: &mut [Complex64], src: Option<&[Complex64]>, rhs: &mut [Complex64]) {
        self.explicit_half(x, src, rhs);
        self.solver.solve(rhs, x);
    }

    /// Two independent [`BlockStepper::step`]s with interleaved sweeps, giving
    /// the same bits as stepping each block alone.
    fn step_pair(
        (p, xp, sp, rp): (&Self, &mut [Complex64], Option<&[Complex64]>, &mut [Complex64]),
        (q, xq, sq, rq): (&Self, &mut [Complex64], Option<&[Complex64]>, &mut [Complex64]),
    ) {
        p.explicit_half(xp, sp, rp);
        q.explicit_half(xq, sq, rq);
        match (&p.solver, &q.solver) {
            (CyclicSolver::General(gp), CyclicSolver::General(gq)) => {
                Cyclic::solve_pair((gp, rp, xp), (gq, rq, xq))
            }
            _ => {
                p.solver.solve(rp, xp);
                q.solver.solve(rq, xq);
            }
        }
    }
}

/// Solver for `A x = r` with `A` real, cyclic tridiagonal, constant
/// off-diagonal `e` and diagonal `diag`. For `N ≤ 2` the cyclic neighbours
/// coincide and their couplings add up.
enum CyclicSolver {
    One { inv: f64 },
    Two { inv_det: f64, d0: f64, d1: f64, off: f64 },
    General(Cyclic),
}

/// Thomas sweep plus a Sherman–Morrison correction for the corner entries.
struct Cyclic {
    e: f64,
    /// `e / γ`
    ratio: f64,
    /// modified super-diagonal ratios of the Thomas sweep
    cprime: Vec<f64>,
    inv_pivot: Vec<f64>,
    /// `T⁻¹ u` for the Sherman–Morrison correction
    z: Vec<f64>,
    inv_denom: f64,
}

impl CyclicSolver {
    const TINY: f64 = 1e-300;

    fn new(diag: &[f64], e: f64) -> Option<Self> {
        let n = diag.len();
        match n {
            1 => {
                let d = diag[0] + 2.0 * e;
                (d.abs() > Self::TINY).then(|| CyclicSolver::One { inv: 1.0 / d })
            }
            2 => {
                let off = 2.0 * e;
                let det = diag[0] * diag[1] - off * off;
                (det.abs() > Self::TINY).then(|| CyclicSolver::Two {
                    inv_det: 1.0 / det,
                    d0: diag[0],
                    d1: diag[1],
                    off,
                })
            }
            _ => {
                // T = A − u vᵀ with u = (γ, 0, …, 0, e), v = (1, 0, …, 0, e/γ)
                let gamma = -diag[0];
                let mut bb = diag.to_vec();
                bb[0] -= gamma;
                bb[n - 1] -= e * e / gamma;
                let mut cprime = vec![0.0; n];
                let mut inv_pivot = vec![0.0; n];
                let mut pivot = bb[0];
                for i in 0..n {
                    if i > 0 {
                        pivot = bb[i] - e * cprime[i - 1];
                    }
                    if pivot.abs() <= Self::TINY {
                        return None;
                    }
                    inv_pivot[i] = 1.0 / pivot;
                    cprime[i] = e * inv_pivot[i];
                }
                let mut u = vec![0.0; n];
                u[0] = gamma;
                u[n - 1] = e;
                let z = thomas_real(&u, e, &cprime, &inv_pivot);
                let denom = 1.0 + z[0] + e * z[n - 1] / gamma;
                (denom.abs() > Self::TINY).then(|| {
                    CyclicSolver::General(Cyclic {
                        e,
                        ratio: e / gamma,
                        cprime,
                        inv_pivot,
                        z,
                        inv_denom: 1.0 / denom,
                    })
                })
            }
        }
    }

    fn solve(&self, rhs: &[Complex64], x: &mut [Complex64]) {
        match self {
            CyclicSolver::One { inv } => x[0] = rhs[0] * *inv,
            CyclicSolver::Two { inv_det, d0, d1, off } => {
                x[0] = (rhs[0] * *d1 - rhs[1] * *off) * *inv_det;
                x[1] = (rhs[1] * *d0 - rhs[0] * *off) * *inv_det;
            }
            CyclicSolver::General(c) => c.solve(rhs, x),
        }
    }
}

impl Cyclic {
    fn solve(&self, rhs: &[Complex64], x: &mut [Complex64]) {
        let n = rhs.len();
        let (e, ip, cp) = (self.e, &self.inv_pivot, &self.cprime);
        x[0] = rhs[0] * ip[0];
        for i in 1..n {
            x[i] = (rhs[i] - x[i - 1] * e) * ip[i];
        }
        for i in (0..n - 1).rev() {
            let next = x[i + 1];
            x[i] -= next * cp[i];
        }
        let fact = (x[0] + x[n - 1] * self.ratio) * self.inv_denom;
        for (xi, zi) in x.iter_mut().zip(&self.z) {
            *xi -= fact * *zi;
        }
    }

    /// Both solves in lockstep so their dependency chains overlap.
    fn solve_pair(
        (p, rp, xp): (&Self, &[Complex64], &mut [Complex64]),
        (q, rq, xq): (&Self, &[Complex64], &mut [Complex64]),
    ) {
        let n = rp.len();
        xp[0] = rp[0] * p.inv_pivot[0];
        xq[0] = rq[0] * q.inv_pivot[0];
        for i in 1..n {
            xp[i] = (rp[i] - xp[i - 1] * p.e) * p.inv_pivot[i];
            xq[i] = (rq[i] - xq[i - 1] * q.e) * q.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            let (np, nq) = (xp[i + 1], xq[i + 1]);
            xp[i] -= np * p.cprime[i];
            xq[i] -= nq * q.cprime[i];
        }
        let fp = (xp[0] + xp[n - 1] * p.ratio) * p.inv_denom;
        let fq = (xq[0] + xq[n - 1] * q.ratio) * q.inv_denom;
        for i in 0..n {
            xp[i] -= fp * p.z[i];
            xq[i] -= fq * q.z[i];
        }
    }
}

fn thomas_real(rhs: &[f64], e: f64, cprime: &[f64], inv_pivot: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let mut x = vec![0.0; n];
    x[0] = rhs[0] * inv_pivot[0];
    for i in 1..n {
        x[i] = (rhs[i] - e * x[i - 1]) * inv_pivot[i];
    }
    for i in (0..n - 1).rev() {
        x[i] -= cprime[i] * x[i + 1];
    }
    x
}

fn check_step_params(a: f64, b: f64, dt: f64) -> Result<()> {
    if !(a >= 0.0 && b >= 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::invalid(format!(
            "diffusion coefficients must be finite and >= 0 (a = {a}, b = {b})"
        )));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid(format!("time step {dt} must be > 0")));
    }
    Ok(())
}

/// Crank–Nicolson factorizations of every frequency block for one choice of
/// `(a, b, dt)`, reusable across calls.
pub(crate) struct Propagator {
    size: usize,
    layers: usize,
    steppers: Vec<BlockStepper>,
}

impl Propagator {
    pub(crate) fn new(sym: &FrequencySymbol, a: f64, b: f64, dt: f64) -> Result<Self> {
        check_step_params(a, b, dt)?;
        let m = sym.size;
        let steppers = (0..m * m)
            .into_par_iter()
            .map(|i| {
                let (kx, ky) = (i % m, i / m);
                BlockStepper::new(sym.block(kx, ky), a, b, sym.weight, dt)
                    .ok_or(Error::SingularSolve { kx, ky })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Propagator {
            size: m,
            layers: sym.layers,
            steppers,
        })
    }

    /// Advances every block by `steps` steps with `source` held constant.
    ///
    /// With `hermitian` set, state and source must be spectra of real stacks:
    /// only the rows `ky ≤ M/2` are stepped and the others are filled in by
    /// conjugate symmetry.
    pub(crate) fn run(
        &self,
        state: &mut SpectralState,
        steps: usize,
        source: Option<&SpectralState>,
        hermitian: bool,
    ) -> Result<()> {
        if state.size != self.size || state.layers != self.layers {
            return Err(Error::SizeMismatch {
                expected: self.steppers.len() * self.layers,
                actual: state.data.len(),
            });
        }
        if let Some(src) = source {
            state.check_compatible(src)?;
        }
        let (m, n) = (self.size, self.layers);
        let rows = if hermitian { m / 2 + 1 } else { m };
        let (upper, lower) = state.data.split_at_mut(rows * m * n);
        upper
            .par_chunks_mut(2 * n)
            .enumerate()
            .for_each_init(
                || vec![Complex64::new(0.0, 0.0); 2 * n],
                |rhs, (k, blocks)| {
                    let i = 2 * k;
                    let src = |j: usize| source.map(|s| &s.data[j * n..(j + 1) * n]);
                    if blocks.len() == 2 * n {
                        let (xa, xb) = blocks.split_at_mut(n);
                        let (ra, rb) = rhs.split_at_mut(n);
                        let (sa, sb) = (&self.steppers[i], &self.steppers[i + 1]);
                        for _ in 0..steps {
                            BlockStepper::step_pair((sa, &mut *xa, src(i), &mut *ra), (sb, &mut *xb, src(i + 1), &mut *rb));
                        }
                    } else {
                        for _ in 0..steps {
                            self.steppers[i].step(blocks, src(i), &mut rhs[..n]);
                        }
                    }
                },
            );
        if hermitian {
            let upper = &*upper;
            lower
                .par_chunks_mut(m * n)
                .enumerate()
                .for_each(|(j, row)| {
                    let mirror = m - (rows + j);
                    for kx in 0..m {
                        let from = (mirror * m + (m - kx) % m) * n;
                        for (z, w) in row[kx * n..(kx + 1) * n].iter_mut().zip(&upper[from..from + n]) {
                            *z = w.conj();
                        }
                    }
                });
        }
        Ok(())
    }
}

/// One Crank–Nicolson step of `dΨ̂/dt = L Ψ̂ + d̂` for every frequency block:
/// `(I − dt/2·L) Ψ̂' = (I + dt/2·L) Ψ̂ + dt·d̂`.
pub fn cn_step(
    state: &SpectralState,
    sym: &FrequencySymbol,
    a: f64,
    b: f64,
    dt: f64,
    source: Option<&SpectralState>,
) -> Result<SpectralState> {
    let mut next = state.clone();
    Propagator::new(sym, a, b, dt)?.run(&mut next, 1, source, false)?;
    Ok(next)
}

/// Step count giving `dt ≤ 0.01 · min(1/a, 1/(bW))` over `[0, t]`.
pub fn default_steps(a: f64, b: f64, weight: f64, t: f64) -> usize {
    let rate = a.max(b * weight);
    if rate <= 0.0 {
        return 1;
    }
    let dt_max = 0.01 / rate;
    ((t / dt_max).ceil() as usize).max(1)
}

/// Evolves a stack over `[0, t]` with constant coefficients and `W = M`.
/// Negative values left by dispersion are clamped only at the end.
pub fn evolve_const(
    stack: &OrientationStack,
    a: f64,
    b: f64,
    t: f64,
    steps: usize,
) -> Result<OrientationStack> {
    let sym = symbol(stack.size(), stack.layers())?;
    evolve_const_with(stack, &sym, a, b, t, steps)
}

pub fn evolve_const_with(
    stack: &OrientationStack,
    sym: &FrequencySymbol,
    a: f64,
    b: f64,
    t: f64,
    steps: usize,
) -> Result<OrientationStack> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::invalid(format!("final time {t} must be > 0")));
    }
    if steps == 0 {
        return Err(Error::invalid("step count must be >= 1"));
    }
    let fft = Fft2d::new(stack.size());
    let mut state = fft.stack_to_spectral(stack);
    Propagator::new(sym, a, b, t / steps as f64)?.run(&mut state, steps, None, true)?;
    let mut out = fft.spectral_to_stack(&state);
    out.clamp_negative();
    Ok(out)
}
