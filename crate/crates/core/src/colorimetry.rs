//! Red/white pixel populations and mean colour of a partitioned cell.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::raster::{RasterImage, Rgb};
use crate::segmentation::{BinaryMask, CellPartition};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColorimetryError {
    #[error("cell has no pixels")]
    EmptyCell,
    #[error("mask has no foreground pixels")]
    EmptyMask,
    #[error("image is {0}x{1} but mask is {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColorimetricFeatures {
    pub red_count: usize,
    pub white_count: usize,
    pub pct_red: f64,
    pub pct_white: f64,
    /// Mean colour over the whole cell.
    pub mean_color: Rgb,
    /// Mean colour of the red region, absent when it is empty.
    pub mean_red_color: Option<Rgb>,
    /// Mean colour of the white region, absent when it is empty.
    pub mean_white_color: Option<Rgb>,
}

impl ColorimetricFeatures {
    /// Copy with percentages rounded to two decimals, as printed in reports.
    pub fn rounded(&self) -> Self {
        let r2 = |v: f64| (v * 100.0).round() / 100.0;
        ColorimetricFeatures { pct_red: r2(self.pct_red), pct_white: r2(self.pct_white), ..self.clone() }
    }
}

pub fn compute_colorimetry(
    img: &RasterImage,
    part: &CellPartition,
) -> Result<ColorimetricFeatures, ColorimetryError> {
    let (red_count, white_count) = color_counts(part);
    let (pct_red, pct_white) = color_proportions(red_count, white_count)?;
    let region_mean = |mask: &BinaryMask| match mean_cell_color(img, mask) {
        Ok(c) => Ok(Some(c)),
        Err(ColorimetryError::EmptyMask) => Ok(None),
        Err(e) => Err(e),
    };
    Ok(ColorimetricFeatures {
        red_count,
        white_count,
        pct_red,
        pct_white,
        mean_color: mean_cell_color(img, &part.cell_mask)?,
        mean_red_color: region_mean(&part.red_mask)?,
        mean_white_color: region_mean(&part.white_mask)?,
    })
}

pub fn color_counts(part: &CellPartition) -> (usize, usize) {
    (part.red_mask.count(), part.white_mask.count())
}

/// Percentages of red and white pixels over the cell area.
pub fn color_proportions(red_count: usize, white_count: usize) -> Result<(f64, f64), ColorimetryError> {
    let area = red_count + white_count;
    if area == 0 {
        return Err(ColorimetryError::EmptyCell);
    }
    let area = area as f64;
    Ok((100.0 * red_count as f64 / area, 100.0 * white_count as f64 / area))
}

/// Per-channel mean over the mask, rounded half-up.
pub fn mean_cell_color(img: &RasterImage, cell: &BinaryMask) -> Result<Rgb, ColorimetryError> {
    if img.width() != cell.width() || img.height() != cell.height() {
        return Err(ColorimetryError::DimensionMismatch(
            img.width(),
            img.height(),
            cell.width(),
            cell.height(),
        ));
    }
    let mut sums = [0u64; 3];
    let mut n = 0u64;
    for (x, y) in cell.foreground() {
        let p = img.get(x, y);
        for (s, &c) in sums.iter_mut().zip(&p) {
            *s += u64::from(c);
        }
        n += 1;
    }
    if n == 0 {
        return Err(ColorimetryError::EmptyMask);
    }
    Ok(sums.map(|s| ((2 * s + n) / (2 * n)) as u8))
}
