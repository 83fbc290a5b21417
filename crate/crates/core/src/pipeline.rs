//! ROI in, report out: isolation, features, classification.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::{classify, ErythrocyteClass, ThresholdError};
use crate::colorimetry::{compute_colorimetry, ColorimetricFeatures, ColorimetryError};
use crate::config::AnalysisConfig;
use crate::morphometry::{compute_morphometry, MorphometricFeatures, MorphometryError};
use crate::raster::{crop_roi, to_grayscale, RasterError, RasterImage, Roi};
use crate::segmentation::{
    binarize, fill_holes, gray_histogram, isolate_target_cell, label_components_8, otsu_threshold,
    partition_cell_colors, BinaryMask, CellPartition, Polarity, SegmentationError,
};

/// Report schema tag carried by every serialized report.
pub const SCHEMA: &str = "erythro/1";

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Roi(#[from] RasterError),
    #[error("no cell found in roi: {0}")]
    NoCellFound(String),
    #[error(transparent)]
    Segmentation(SegmentationError),
    #[error(transparent)]
    Morphometry(#[from] MorphometryError),
    #[error(transparent)]
    Colorimetry(#[from] ColorimetryError),
    #[error("invalid thresholds: {0}")]
    Thresholds(#[from] ThresholdError),
}

impl From<SegmentationError> for AnalysisError {
    fn from(e: SegmentationError) -> Self {
        match e {
            SegmentationError::NoCellFound { .. } => AnalysisError::NoCellFound(e.to_string()),
            // a flat ROI holds nothing distinguishable from background
            SegmentationError::NoSeparation => AnalysisError::NoCellFound(e.to_string()),
            other => AnalysisError::Segmentation(other),
        }
    }
}

impl AnalysisError {
    /// Short machine-readable name used in diagnostics and error bodies.
    pub fn kind(&self) -> &'static str {
        match self {
            AnalysisError::Roi(RasterError::RoiOutOfBounds { .. }) => "RoiOutOfBounds",
            AnalysisError::Roi(RasterError::EmptyRoi { .. }) => "EmptyRoi",
            AnalysisError::Roi(_) => "ImageError",
            AnalysisError::NoCellFound(_) => "NoCellFound",
            AnalysisError::Segmentation(_) => "SegmentationError",
            AnalysisError::Morphometry(_) => "MorphometryError",
            AnalysisError::Colorimetry(_) => "ColorimetryError",
            AnalysisError::Thresholds(_) => "InvalidThresholds",
        }
    }
}

/// Horizontal run of cell pixels: `[row, first column, length]`, ROI-local.
pub type Run = [usize; 3];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErythrocyteReport {
    pub schema: String,
    pub roi: Roi,
    pub morpho: MorphometricFeatures,
    /// Percentages rounded to two decimals.
    pub color: ColorimetricFeatures,
    pub label: ErythrocyteClass,
    /// Set when the cell showed a single gray level and was counted all red.
    pub uniform_cell: bool,
    /// Fired rules in evaluation order; the last entry names the label.
    pub trace: Vec<String>,
    /// Isolated cell mask, run-length encoded.
    pub cell_runs: Vec<Run>,
}

impl ErythrocyteReport {
    /// The one serialization used by every output path.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// One human-readable line.
    pub fn to_text(&self) -> String {
        let m = &self.morpho;
        let c = &self.color;
        format!(
            "roi={} label={} area={} perimeter={} compactness={:.2} major={:.2} minor={:.2} spacing={:.2} varconvex={} ncc={} red={} white={} red%={:.2} white%={:.2} color={},{},{}",
            self.roi, self.label, m.area, m.perimeter, m.compactness, m.major_axis, m.minor_axis,
            m.axis_spacing, m.varconvex, m.ncc, c.red_count, c.white_count, c.pct_red, c.pct_white,
            c.mean_color[0], c.mean_color[1], c.mean_color[2],
        )
    }
}

/// Intermediate products of one ROI, for callers that want the masks.
#[derive(Debug, Clone)]
pub struct CellAnalysis {
    pub crop: RasterImage,
    /// Otsu binarization of the whole ROI.
    pub roi_mask: BinaryMask,
    pub partition: CellPartition,
    pub morpho: MorphometricFeatures,
    pub color: ColorimetricFeatures,
    pub report: ErythrocyteReport,
}

/// Binarizes a cropped ROI and isolates its target cell. Returns the ROI
/// binarization and the hole-filled cell mask.
pub fn isolate_cell(crop: &RasterImage, min_area: usize) -> Result<(BinaryMask, BinaryMask), AnalysisError> {
    let gray = to_grayscale(crop);
    let stats = otsu_threshold(&gray_histogram(&gray)?)?;
    let roi_mask = binarize(&gray, stats.threshold, Polarity::DarkIsForeground);
    let labels = label_components_8(&roi_mask);
    let center = (crop.width() / 2, crop.height() / 2);
    let cell = fill_holes(&isolate_target_cell(&labels, center, min_area)?);
    Ok((roi_mask, cell))
}

pub fn analyze_cell(img: &RasterImage, roi: &Roi, config: &AnalysisConfig) -> Result<CellAnalysis, AnalysisError> {
    config.thresholds.validate()?;
    let crop = crop_roi(img, roi)?;
    let (roi_mask, cell) = isolate_cell(&crop, config.min_area)?;
    let partition = partition_cell_colors(&to_grayscale(&crop), &cell)?;
    let morpho = compute_morphometry(&cell)?;
    let color = compute_colorimetry(&crop, &partition)?;
    let (label, trace) = classify(&morpho, &color, &config.thresholds);
    let report = ErythrocyteReport {
        schema: SCHEMA.to_string(),
        roi: *roi,
        morpho,
        color: color.rounded(),
        label,
        uniform_cell: partition.uniform,
        trace,
        cell_runs: encode_runs(&cell),
    };
    Ok(CellAnalysis { crop, roi_mask, partition, morpho, color, report })
}

/// Runs the full pipeline on one ROI.
pub fn analyze_roi(img: &RasterImage, roi: &Roi, config: &AnalysisConfig) -> Result<ErythrocyteReport, AnalysisError> {
    analyze_cell(img, roi, config).map(|a| a.report)
}

/// Analyzes ROIs in parallel; results come back in input order.
pub fn analyze_rois(
    img: &RasterImage,
    rois: &[Roi],
    config: &AnalysisConfig,
) -> Vec<Result<ErythrocyteReport, AnalysisError>> {
    rois.par_iter().map(|roi| analyze_roi(img, roi, config)).collect()
}

pub fn encode_runs(mask: &BinaryMask) -> Vec<Run> {
    let mut runs = Vec::new();
    for y in 0..mask.height() {
        let mut x = 0;
        while x < mask.width() {
            if mask.get(x, y) {
                let start = x;
                while x < mask.width() && mask.get(x, y) {
                    x += 1;
                }
                runs.push([y, start, x - start]);
            } else {
                x += 1;
            }
        }
    }
    runs
}

pub fn decode_runs(runs: &[Run], width: usize, height: usize) -> BinaryMask {
    let mut mask = BinaryMask::new(width, height);
    for &[y, x0, len] in runs {
        for x in x0..x0 + len {
            mask.set(x, y, true);
        }
    }
    mask
}
