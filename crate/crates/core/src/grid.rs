//! Periodic images, corruption masks and orientation stacks.
//!
//! Pixels are addressed as `(x, y)` with `x` the column and `y` the row; all
//! storage is row-major. The grid is a torus: every neighbourhood and every
//! finite difference wraps around the edges.
//!
//! Gray values follow the ink convention: `0` is white, `1` is black, and a
//! corrupted pixel carries the value `0`.

use crate::error::{Error, Result};

/// Smallest positive gray level of an 8-bit image. Good pixels whose value is
/// exactly zero are lifted to this step so that zero keeps meaning "missing".
pub const GRAY_STEP: f64 = 1.0 / 255.0;

/// A pixel coordinate `(x, y)`.
pub type Pixel = (usize, usize);

#[inline]
pub(crate) fn wrap(i: isize, size: usize) -> usize {
    i.rem_euclid(size as isize) as usize
}

/// The 9-point neighbourhood of `(x, y)` on a torus of side `size`, centre
/// included, in row-major order.
pub fn neighborhood(size: usize, x: usize, y: usize) -> [Pixel; 9] {
    let mut out = [(0, 0); 9];
    let mut i = 0;
    for dy in -1..=1isize {
        for dx in -1..=1isize {
            out[i] = (wrap(x as isize + dx, size), wrap(y as isize + dy, size));
            i += 1;
        }
    }
    out
}

/// An `M × M` gray-level image with periodic indexing.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicImage {
    size: usize,
    data: Vec<f64>,
}

impl PeriodicImage {
    pub fn new(size: usize, data: Vec<f64>) -> Result<Self> {
        if size == 0 {
            return Err(Error::invalid("image size must be positive"));
        }
        if data.len() != size * size {
            return Err(Error::SizeMismatch {
                expected: size * size,
                actual: data.len(),
            });
        }
        if let Some(v) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::invalid(format!("gray value {v} outside [0, 1]")));
        }
        Ok(PeriodicImage { size, data })
    }

    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(size * size);
        for y in 0..size {
            for x in 0..size {
                data.push(f(x, y));
            }
        }
        Self::new(size, data)
    }

    pub fn filled(size: usize, value: f64) -> Result<Self> {
        Self::new(size, vec![value; size * size])
    }

    /// Builds an image from values that are already known to be finite, clamping
    /// them into `[0, 1]`.
    pub(crate) fn from_clamped(size: usize, mut data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), size * size);
        for v in &mut data {
            *v = v.clamp(0.0, 1.0);
        }
        PeriodicImage { size, data }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.size + x
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.size + x]
    }

    /// Periodic access: any integer coordinates are wrapped onto the torus.
    #[inline]
    pub fn at(&self, x: isize, y: isize) -> f64 {
        self.data[wrap(y, self.size) * self.size + wrap(x, self.size)]
    }

    pub(crate) fn set(&mut self, x: usize, y: usize, value: f64) {
        let i = self.index(x, y);
        self.data[i] = value;
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    /// Circular shift: the output at `(x + sx, y + sy)` is the input at `(x, y)`.
    pub fn circular_shift(&self, sx: isize, sy: isize) -> Self {
        let m = self.size;
        let mut data = vec![0.0; m * m];
        for y in 0..m {
            for x in 0..m {
                let (nx, ny) = (wrap(x as isize + sx, m), wrap(y as isize + sy, m));
                data[ny * m + nx] = self.data[y * m + x];
            }
        }
        PeriodicImage { size: m, data }
    }

    /// Rotation by 90° about the origin of the torus: `(x, y) ↦ (−y, x)`.
    pub fn rotate90(&self) -> Self {
        let m = self.size;
        let mut data = vec![0.0; m * m];
        for y in 0..m {
            for x in 0..m {
                let (nx, ny) = (wrap(-(y as isize), m), x);
                data[ny * m + nx] = self.data[y * m + x];
            }
        }
        PeriodicImage { size: m, data }
    }

    /// Raises good pixels holding exactly zero to [`GRAY_STEP`].
    pub fn with_positive_good(&self, mask: &CorruptionMask) -> Self {
        let mut out = self.clone();
        for (v, l) in out.data.iter_mut().zip(mask.labels()) {
            if *l == Label::Good && *v == 0.0 {
                *v = GRAY_STEP;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Good,
    Bad,
}

/// Per-pixel good/bad labelling of a periodic image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorruptionMask {
    size: usize,
    labels: Vec<Label>,
}

impl CorruptionMask {
    pub fn new(size: usize, labels: Vec<Label>) -> Result<Self> {
        if labels.len() != size * size {
            return Err(Error::SizeMismatch {
                expected: size * size,
                actual: labels.len(),
            });
        }
        Ok(CorruptionMask { size, labels })
    }

    /// The zero-means-corrupted convention: a pixel is bad iff its value is 0.
    pub fn from_image(img: &PeriodicImage) -> Self {
        let labels = img
            .as_slice()
            .iter()
            .map(|&v| if v == 0.0 { Label::Bad } else { Label::Good })
            .collect();
        CorruptionMask {
            size: img.size(),
            labels,
        }
    }

    pub fn all_good(size: usize) -> Self {
        CorruptionMask {
            size,
            labels: vec![Label::Good; size * size],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    #[inline]
    pub fn label(&self, x: usize, y: usize) -> Label {
        self.labels[y * self.size + x]
    }

    #[inline]
    pub fn is_good(&self, x: usize, y: usize) -> bool {
        self.label(x, y) == Label::Good
    }

    pub(crate) fn set(&mut self, x: usize, y: usize, label: Label) {
        self.labels[y * self.size + x] = label;
    }

    pub fn bad_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l == Label::Bad).count()
    }

    pub fn good_count(&self) -> usize {
        self.labels.len() - self.bad_count()
    }

    pub fn bad_fraction(&self) -> f64 {
        self.bad_count() as f64 / self.labels.len() as f64
    }

    pub fn has_bad(&self) -> bool {
        self.labels.contains(&Label::Bad)
    }

    pub fn circular_shift(&self, sx: isize, sy: isize) -> Self {
        let m = self.size;
        let mut labels = vec![Label::Good; m * m];
        for y in 0..m {
            for x in 0..m {
                let (nx, ny) = (wrap(x as isize + sx, m), wrap(y as isize + sy, m));
                labels[ny * m + nx] = self.labels[y * m + x];
            }
        }
        CorruptionMask { size: m, labels }
    }
}

/// Orientation layers over an image: value at `(x, y)` for direction
/// `θ_r = rπ/N`, `r = 0..N`, cyclic in `r`.
///
/// The `N` values of one pixel are contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientationStack {
    size: usize,
    layers: usize,
    data: Vec<f64>,
}

impl OrientationStack {
    pub fn new(size: usize, layers: usize, data: Vec<f64>) -> Result<Self> {
        if size == 0 || layers == 0 {
            return Err(Error::invalid("stack dimensions must be positive"));
        }
        if data.len() != size * size * layers {
            return Err(Error::SizeMismatch {
                expected: size * size * layers,
                actual: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("stack values must be finite"));
        }
        Ok(OrientationStack { size, layers, data })
    }

    pub fn zeros(size: usize, layers: usize) -> Self {
        OrientationStack {
            size,
            layers,
            data: vec![0.0; size * size * layers],
        }
    }

    pub(crate) fn from_raw(size: usize, layers: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), size * size * layers);
        OrientationStack { size, layers, data }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    /// Orientation of layer `r`, `rπ/N`.
    pub fn angle(&self, r: usize) -> f64 {
        layer_angle(r, self.layers)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, r: usize) -> f64 {
        self.data[(y * self.size + x) * self.layers + r]
    }

    pub fn set(&mut self, x: usize, y: usize, r: usize, value: f64) {
        let i = (y * self.size + x) * self.layers + r;
        self.data[i] = value;
    }

    /// All layers of one pixel.
    pub fn pixel(&self, x: usize, y: usize) -> &[f64] {
        let start = (y * self.size + x) * self.layers;
        &self.data[start..start + self.layers]
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn circular_shift(&self, sx: isize, sy: isize) -> Self {
        let (m, n) = (self.size, self.layers);
        let mut data = vec![0.0; self.data.len()];
        for y in 0..m {
            for x in 0..m {
                let (nx, ny) = (wrap(x as isize + sx, m), wrap(y as isize + sy, m));
                let dst = (ny * m + nx) * n;
                data[dst..dst + n].copy_from_slice(self.pixel(x, y));
            }
        }
        OrientationStack::from_raw(m, n, data)
    }

    /// Cyclic layer shift: layer `r` moves to `r + shift (mod N)`.
    pub fn shift_layers(&self, shift: usize) -> Self {
        let n = self.layers;
        let mut data = vec![0.0; self.data.len()];
        for (src, dst) in self.data.chunks_exact(n).zip(data.chunks_exact_mut(n)) {
            for r in 0..n {
                dst[(r + shift) % n] = src[r];
            }
        }
        OrientationStack::from_raw(self.size, n, data)
    }

    /// Spatial rotation by 90° (see [`PeriodicImage::rotate90`]) without
    /// touching the layer index.
    pub fn rotate90_positions(&self) -> Self {
        let (m, n) = (self.size, self.layers);
        let mut data = vec![0.0; self.data.len()];
        for y in 0..m {
            for x in 0..m {
                let (nx, ny) = (wrap(-(y as isize), m), x);
                let dst = (ny * m + nx) * n;
                data[dst..dst + n].copy_from_slice(self.pixel(x, y));
            }
        }
        OrientationStack::from_raw(m, n, data)
    }

    /// Clamps negative values to zero.
    pub(crate) fn clamp_negative(&mut self) {
        for v in &mut self.data {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
    }
}

#[inline]
pub fn layer_angle(r: usize, layers: usize) -> f64 {
    r as f64 * std::f64::consts::PI / layers as f64
}

/// Centered differences with periodic wrap:
/// `((f(x+1,y) − f(x−1,y))/2, (f(x,y+1) − f(x,y−1))/2)`.
#[inline]
pub fn finite_gradient(img: &PeriodicImage, at: Pixel) -> (f64, f64) {
    let (x, y) = (at.0 as isize, at.1 as isize);
    let gx = (img.at(x + 1, y) - img.at(x - 1, y)) / 2.0;
    let gy = (img.at(x, y + 1) - img.at(x, y - 1)) / 2.0;
    (gx, gy)
}

/// `|∇f|` at every pixel, row-major.
pub fn gradient_magnitude(img: &PeriodicImage) -> Vec<f64> {
    let m = img.size();
    let mut out = Vec::with_capacity(m * m);
    for y in 0..m {
        for x in 0..m {
            let (gx, gy) = finite_gradient(img, (x, y));
            out.push(gx.hypot(gy));
        }
    }
    out
}

/// Bad pixels with at least one good pixel in their 9-point neighbourhood,
/// in row-major order.
pub fn boundary_bad(mask: &CorruptionMask) -> Vec<Pixel> {
    let m = mask.size();
    let mut out = Vec::new();
    for y in 0..m {
        for x in 0..m {
            if mask.is_good(x, y) {
                continue;
            }
            if neighborhood(m, x, y)
                .iter()
                .any(|&(nx, ny)| mask.is_good(nx, ny))
            {
                out.push((x, y));
            }
        }
    }
    out
}
