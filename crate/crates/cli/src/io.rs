//! Grayscale image and mask files.
//!
//! Bytes map to values by `v = (255 − byte) / 255`, so white is 0 and black
//! is 1. Masks store 255 for good pixels and 0 for bad ones.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use ahe_core::{CorruptionMask, Label, PeriodicImage};
use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, GrayImage, ImageEncoder, ImageFormat};

use crate::error::{CliError, CliResult};

/// Raw square 8-bit raster as read from disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayBytes {
    pub size: usize,
    pub bytes: Vec<u8>,
}

impl GrayBytes {
    pub fn to_image(&self) -> CliResult<PeriodicImage> {
        let data = self.bytes.iter().map(|&b| byte_to_value(b)).collect();
        Ok(PeriodicImage::new(self.size, data)?)
    }

    /// Quantizes `img`, keeping the original byte wherever `keep` is good.
    pub fn from_image(img: &PeriodicImage, original: Option<(&GrayBytes, &CorruptionMask)>) -> GrayBytes {
        let mut bytes: Vec<u8> = img.as_slice().iter().map(|&v| value_to_byte(v)).collect();
        if let Some((orig, mask)) = original {
            for ((b, &o), &l) in bytes.iter_mut().zip(&orig.bytes).zip(mask.labels()) {
                if l == Label::Good {
                    *b = o;
                }
            }
        }
        GrayBytes { size: img.size(), bytes }
    }
}

pub fn byte_to_value(b: u8) -> f64 {
    f64::from(255 - b) / 255.0
}

pub fn value_to_byte(v: f64) -> u8 {
    255 - (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

pub fn read_gray(path: &Path) -> CliResult<GrayBytes> {
    let img = image::open(path).map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    let gray = img.into_luma8();
    let (w, h) = gray.dimensions();
    if w != h || w == 0 {
        return Err(CliError::io(format!(
            "{}: images must be square and non-empty, got {w}x{h}",
            path.display()
        )));
    }
    Ok(GrayBytes {
        size: w as usize,
        bytes: gray.into_raw(),
    })
}

/// Writes P5 PGM, or PNG when the extension is `.png`.
pub fn write_gray(path: &Path, img: &GrayBytes) -> CliResult<()> {
    let fail = |e: &dyn std::fmt::Display| CliError::io(format!("cannot write {}: {e}", path.display()));
    let side = img.size as u32;
    let is_png = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("png"));
    if is_png {
        let buf = GrayImage::from_raw(side, side, img.bytes.clone()).expect("buffer matches dimensions");
        return buf.save_with_format(path, ImageFormat::Png).map_err(|e| fail(&e));
    }
    let file = File::create(path).map_err(|e| fail(&e))?;
    PnmEncoder::new(BufWriter::new(file))
        .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
        .write_image(&img.bytes, side, side, ExtendedColorType::L8)
        .map_err(|e| fail(&e))
}

pub fn read_mask(path: &Path) -> CliResult<CorruptionMask> {
    let raw = read_gray(path)?;
    let labels = raw
        .bytes
        .iter()
        .map(|&b| if b == 0 { Label::Bad } else { Label::Good })
        .collect();
    Ok(CorruptionMask::new(raw.size, labels)?)
}

pub fn write_mask(path: &Path, mask: &CorruptionMask) -> CliResult<()> {
    let bytes = mask
        .labels()
        .iter()
        .map(|&l| if l == Label::Good { 255 } else { 0 })
        .collect();
    write_gray(path, &GrayBytes { size: mask.size(), bytes })
}
