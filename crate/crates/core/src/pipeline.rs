//! End-to-end reconstructions.
//!
//! * [`run_plain`]: lift, constant-coefficient evolution, projection,
//!   optionally inside a restoration loop.
//! * [`run_varcoef_dr`]: trivial lift and image-driven coefficients inside a
//!   restoration loop.
//! * [`run_ahe`]: simple averaging, strong smoothing, advanced averaging, weak
//!   smoothing.

use crate::average::{advanced_average_fill, simple_average_fill};
use crate::bench::CorruptionSpec;
use crate::error::{Error, Result};
use crate::grid::{gradient_magnitude, CorruptionMask, OrientationStack, PeriodicImage, GRAY_STEP};
use crate::lift::{gaussian_smooth, lift_gradient, lift_trivial};
use crate::project::{project_max, renormalize};
use crate::restore::{restore_loop, RestoreMode, RestoreParams};
use crate::spectral::{default_steps, evolve_const_with, symbol};
use crate::varcoef::{coeffs_from_gradient, coeffs_from_image, evolve_varcoef_with, CoefficientParams, VarcoefSolver};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LiftMode {
    #[default]
    Gradient,
    Trivial,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlainParams {
    pub a: f64,
    pub b: f64,
    pub layers: usize,
    pub lift: LiftMode,
    /// Gaussian pre-smoothing radius in pixels, used by the gradient lift only.
    pub smoothing_radius: f64,
    pub time: f64,
    /// Crank–Nicolson steps; `None` picks [`default_steps`].
    pub steps: Option<usize>,
}

impl Default for PlainParams {
    fn default() -> Self {
        PlainParams {
            a: 1.0,
            b: 1.0,
            layers: 30,
            lift: LiftMode::Gradient,
            smoothing_radius: 1.0,
            time: 1.0,
            steps: None,
        }
    }
}

fn check_sizes(f: &PeriodicImage, mask: &CorruptionMask) -> Result<()> {
    if f.size() != mask.size() {
        return Err(Error::SizeMismatch {
            expected: f.size(),
            actual: mask.size(),
        });
    }
    Ok(())
}

/// Plain hypoelliptic inpainting with constant coefficients.
///
/// Without `restore` this is a single lift → evolve → project → renormalize
/// pass over the whole image. With `restore` the same evolution runs inside
/// [`restore_loop`].
pub fn run_plain(
    f: &PeriodicImage,
    mask: &CorruptionMask,
    params: &PlainParams,
    restore: Option<&RestoreParams>,
) -> Result<PeriodicImage> {
    check_sizes(f, mask)?;
    if !(params.a >= 0.0 && params.b >= 0.0 && params.a.is_finite() && params.b.is_finite()) {
        return Err(Error::invalid(format!(
            "diffusion intensities must be finite and >= 0, got a={} b={}",
            params.a, params.b
        )));
    }
    if !(params.smoothing_radius >= 0.0) {
        return Err(Error::invalid("smoothing radius must be >= 0"));
    }
    let sym = symbol(f.size(), params.layers)?;
    let steps = params
        .steps
        .unwrap_or_else(|| default_steps(params.a, params.b, sym.spatial_weight(), params.time));
    let lift = |img: &PeriodicImage| -> Result<OrientationStack> {
        match params.lift {
            LiftMode::Trivial => lift_trivial(img, params.layers),
            LiftMode::Gradient => lift_gradient(&gaussian_smooth(img, params.smoothing_radius)?, params.layers),
        }
    };
    let evolve = |stack: OrientationStack, _: &PeriodicImage| {
        evolve_const_with(&stack, &sym, params.a, params.b, params.time, steps)
    };
    match restore {
        Some(r) => restore_loop(f, mask, r, lift, evolve, project_max),
        None => {
            let evolved = evolve(lift(f)?, f)?;
            Ok(renormalize(&project_max(&evolved), f.max()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarcoefDrConfig {
    pub coefficients: CoefficientParams,
    pub restore: RestoreParams,
    pub layers: usize,
    pub solver: VarcoefSolver,
}

/// Varying-coefficient evolution with the trivial lift inside a restoration
/// loop. Coefficients are recomputed from the current image every round.
pub fn run_varcoef_dr(f: &PeriodicImage, mask: &CorruptionMask, cfg: &VarcoefDrConfig) -> Result<PeriodicImage> {
    check_sizes(f, mask)?;
    cfg.coefficients.validate()?;
    let sym = symbol(f.size(), cfg.layers)?;
    restore_loop(
        f,
        mask,
        &cfg.restore,
        |img| lift_trivial(img, cfg.layers),
        |stack, current| {
            let coeffs = coeffs_from_image(current, &cfg.coefficients)?;
            evolve_varcoef_with(&stack, &coeffs, &sym, &cfg.solver)
        },
        project_max,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AheConfig {
    pub layers: usize,
    /// Strong smoothing of the averaged image.
    pub step2: CoefficientParams,
    pub step2_solver: VarcoefSolver,
    /// Weak smoothing of the fused image.
    pub step4: CoefficientParams,
    pub step4_solver: VarcoefSolver,
    pub emit_intermediates: bool,
}

impl Default for AheConfig {
    fn default() -> Self {
        AheConfig {
            layers: 30,
            step2: CoefficientParams { a0: 0.55, a1: 5.0, b0: 0.05, b1: 0.2, sigma: 0.4 },
            step2_solver: VarcoefSolver::default(),
            step4: CoefficientParams { a0: 0.75, a1: 1.5, b0: 0.015, b1: 0.1, sigma: 0.3 },
            step4_solver: VarcoefSolver::default(),
            emit_intermediates: false,
        }
    }
}

impl AheConfig {
    pub fn validate(&self) -> Result<()> {
        self.step2.validate()?;
        self.step4.validate()?;
        if self.layers < 2 {
            return Err(Error::invalid("at least two orientation layers are required"));
        }
        Ok(())
    }
}

/// Images produced between the stages of [`run_ahe`].
#[derive(Debug, Clone, PartialEq)]
pub struct AheIntermediates {
    /// Simple-average fill.
    pub g: PeriodicImage,
    /// `|∇g|` scaled to a maximum of 1.
    pub grad_mag: PeriodicImage,
    /// Strongly smoothed `g`.
    pub h: PeriodicImage,
    /// Advanced-average fill; equals `f` on the good pixels.
    pub f3: PeriodicImage,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AheOutput {
    pub output: PeriodicImage,
    pub intermediates: Option<AheIntermediates>,
}

fn scaled_gradient(g: &PeriodicImage) -> Result<PeriodicImage> {
    let grad = gradient_magnitude(g);
    let peak = grad.iter().copied().fold(0.0, f64::max);
    let data = if peak > 0.0 { grad.into_iter().map(|v| v / peak).collect() } else { grad };
    PeriodicImage::new(g.size(), data)
}

/// Trivial lift → varying-coefficient evolution with gradient-driven
/// coefficients → projection renormalized to the input maximum.
fn smooth_stage(
    img: &PeriodicImage,
    layers: usize,
    params: &CoefficientParams,
    solver: &VarcoefSolver,
) -> Result<PeriodicImage> {
    let sym = symbol(img.size(), layers)?;
    let coeffs = coeffs_from_gradient(img, params)?;
    let evolved = evolve_varcoef_with(&lift_trivial(img, layers)?, &coeffs, &sym, solver)?;
    Ok(renormalize(&project_max(&evolved), img.max()))
}

/// The four-step averaging and hypoelliptic evolution reconstruction.
///
/// An input without bad pixels is returned unchanged.
pub fn run_ahe(f: &PeriodicImage, mask: &CorruptionMask, cfg: &AheConfig) -> Result<AheOutput> {
    check_sizes(f, mask)?;
    cfg.validate()?;
    if !mask.has_bad() {
        let intermediates = if cfg.emit_intermediates {
            Some(AheIntermediates {
                g: f.clone(),
                grad_mag: scaled_gradient(f)?,
                h: f.clone(),
                f3: f.clone(),
            })
        } else {
            None
        };
        return Ok(AheOutput { output: f.clone(), intermediates });
    }
    let f = f.with_positive_good(mask);

    let g = simple_average_fill(&f, mask)?;
    let h = smooth_stage(&g, cfg.layers, &cfg.step2, &cfg.step2_solver)?;
    // the fusion divides by h
    let h = PeriodicImage::new(h.size(), h.into_vec().into_iter().map(|v| v.max(GRAY_STEP)).collect())?;
    let f3 = advanced_average_fill(&f, mask, &h)?;
    let output = smooth_stage(&f3, cfg.layers, &cfg.step4, &cfg.step4_solver)?;

    let intermediates = if cfg.emit_intermediates {
        Some(AheIntermediates {
            grad_mag: scaled_gradient(&g)?,
            g,
            h,
            f3,
        })
    } else {
        None
    };
    Ok(AheOutput { output, intermediates })
}

/// Named parameter sets taken from published experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Varying coefficients with dynamic restoration, 37% corruption.
    Fig4,
    /// Stronger coefficients for 67% corruption with 6-pixel lines.
    Fig5w6,
    /// 85% corruption, 100 restoration rounds.
    Fig8,
    AheDefault,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Fig4, Preset::Fig5w6, Preset::Fig8, Preset::AheDefault];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig4 => "fig4",
            Preset::Fig5w6 => "fig5w6",
            Preset::Fig8 => "fig8",
            Preset::AheDefault => "ahe-default",
        }
    }

    pub fn from_name(name: &str) -> Option<Preset> {
        Preset::ALL.into_iter().find(|p| p.name() == name)
    }

    /// Corruption regime the preset was tuned for.
    pub fn corruption(self, seed: u64) -> CorruptionSpec {
        match self {
            Preset::Fig4 => CorruptionSpec::lines(0.37, 3, seed),
            Preset::Fig5w6 => CorruptionSpec::lines(0.67, 6, seed),
            Preset::Fig8 | Preset::AheDefault => CorruptionSpec::lines(0.85, 3, seed),
        }
    }

    /// Varying-coefficient restoration settings; `None` for [`Preset::AheDefault`].
    pub fn varcoef_dr(self) -> Option<VarcoefDrConfig> {
        let fig4 = CoefficientParams { a0: 1.1, a1: 10.0, b0: 0.1, b1: 0.4, sigma: 0.1 };
        let (coefficients, iterations, epsilon) = match self {
            Preset::Fig4 => (fig4, 50, 0.1),
            Preset::Fig5w6 => (CoefficientParams { a0: 2.3, a1: 20.0, b0: 1.5, b1: 6.6, sigma: 0.1 }, 50, 0.1),
            Preset::Fig8 => (fig4, 100, 1.0),
            Preset::AheDefault => return None,
        };
        Some(VarcoefDrConfig {
            coefficients,
            restore: RestoreParams { iterations, epsilon, mode: RestoreMode::Dynamic },
            layers: 30,
            solver: VarcoefSolver::default(),
        })
    }
}
