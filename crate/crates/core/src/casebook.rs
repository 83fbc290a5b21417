//! Reference measurements of documented cells, one row per cell, with the
//! class a haematologist assigned. Used by `erythro selftest` and the
//! acceptance suite to pin the classifier's decisions.

use crate::classifier::{classify, ClassificationThresholds, ErythrocyteClass};
use crate::colorimetry::ColorimetricFeatures;
use crate::morphometry::{compute_compactness, MorphometricFeatures};
use crate::raster::Rgb;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseRow {
    pub name: &'static str,
    pub expected: ErythrocyteClass,
    pub compactness: f64,
    pub area: usize,
    pub perimeter: usize,
    pub minor_axis: f64,
    pub major_axis: f64,
    pub axis_spacing: f64,
    pub varconvex: u8,
    /// Only recorded for non-convex cells.
    pub ncc: Option<u32>,
    pub red_count: usize,
    pub white_count: usize,
    pub pct_white: f64,
    pub pct_red: f64,
    pub color: Rgb,
}

impl CaseRow {
    pub fn morpho(&self) -> MorphometricFeatures {
        MorphometricFeatures {
            area: self.area,
            perimeter: self.perimeter,
            compactness: self.compactness,
            major_axis: self.major_axis,
            minor_axis: self.minor_axis,
            axis_spacing: self.axis_spacing,
            varconvex: self.varconvex,
            ncc: self.ncc.unwrap_or(0),
        }
    }

    pub fn color(&self) -> ColorimetricFeatures {
        ColorimetricFeatures {
            red_count: self.red_count,
            white_count: self.white_count,
            pct_red: self.pct_red,
            pct_white: self.pct_white,
            mean_color: self.color,
            mean_red_color: None,
            mean_white_color: None,
        }
    }
}

#[allow(clippy::too_many_arguments)]
const fn row(
    name: &'static str,
    expected: ErythrocyteClass,
    (compactness, area, perimeter): (f64, usize, usize),
    (minor_axis, major_axis, axis_spacing): (f64, f64, f64),
    varconvex: u8,
    ncc: Option<u32>,
    (red_count, white_count): (usize, usize),
    (pct_white, pct_red): (f64, f64),
    color: Rgb,
) -> CaseRow {
    CaseRow {
        name,
        expected,
        compactness,
        area,
        perimeter,
        minor_axis,
        major_axis,
        axis_spacing,
        varconvex,
        ncc,
        red_count,
        white_count,
        pct_white,
        pct_red,
        color,
    }
}

use ErythrocyteClass::*;

pub const CASES: [CaseRow; 16] = [
    row("healthy-1", Healthy, (1.22, 4472, 215), (35.36, 39.22, 3.86), 0, None, (3889, 583), (13.03, 86.94), [255, 222, 219]),
    row("healthy-2", Healthy, (1.20, 4939, 231), (37.40, 41.04, 3.63), 0, None, (4321, 618), (12.51, 87.49), [255, 222, 219]),
    row("healthy-3", Healthy, (1.13, 4697, 228), (35.33, 41.74, 6.41), 0, None, (4054, 643), (13.69, 86.31), [255, 222, 219]),
    row("healthy-4", Healthy, (1.20, 4722, 224), (37.02, 39.73, 2.71), 0, None, (4253, 469), (10.00, 90.00), [255, 222, 219]),
    row("annulocyte-1", Annulocyte, (0.93, 3571, 219), (30.63, 35.27, 4.64), 0, None, (2385, 1186), (33.26, 66.79), [255, 232, 221]),
    row("annulocyte-2", Annulocyte, (1.05, 3510, 205), (30.87, 34.82, 3.95), 0, None, (1913, 1597), (45.50, 54.50), [255, 232, 221]),
    row("annulocyte-3", Annulocyte, (0.91, 3589, 222), (29.92, 36.44, 6.52), 0, None, (2341, 1248), (34.77, 65.23), [255, 232, 221]),
    row("annulocyte-4", Annulocyte, (1.04, 3546, 207), (29.51, 36.14, 6.63), 0, None, (2021, 1525), (43.00, 57.00), [255, 232, 221]),
    row("sickle-1", Sickle, (0.67, 2037, 195), (8.49, 40.49, 32.00), 1, Some(2), (2022, 15), (0.73, 99.27), [253, 214, 204]),
    // printed white share is garbled; 8.20 complements the 91.8 red share
    row("sickle-2", Sickle, (0.76, 3838, 252), (12.21, 47.40, 35.19), 1, Some(2), (3547, 291), (8.20, 91.80), [255, 213, 206]),
    row("sickle-3", Sickle, (0.53, 3791, 300), (10.24, 45.93, 35.69), 1, Some(2), (3789, 2), (0.05, 99.95), [255, 218, 215]),
    row("acanthocyte-1", Acanthocyte, (0.57, 6954, 378), (24.41, 66.43, 42.02), 1, Some(4), (6489, 0), (0.0, 100.0), [254, 222, 229]),
    row("acanthocyte-2", Acanthocyte, (0.78, 5785, 306), (30.30, 51.58, 21.28), 1, Some(6), (5785, 0), (0.0, 100.0), [254, 222, 229]),
    row("elliptocyte-1", Elliptocyte, (0.90, 3925, 236), (23.29, 52.64, 29.36), 0, None, (2297, 1628), (41.45, 58.55), [255, 233, 228]),
    row("elliptocyte-2", Elliptocyte, (1.09, 4408, 225), (28.51, 53.51, 25.00), 0, None, (3637, 771), (17.50, 82.50), [255, 233, 228]),
    row("elliptocyte-3", Elliptocyte, (1.02, 4233, 228), (25.00, 51.60, 26.60), 0, None, (3449, 784), (18.52, 81.48), [255, 233, 228]),
];

/// Every reference row.
pub fn all_cases() -> impl Iterator<Item = &'static CaseRow> {
    CASES.iter()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Classifies every reference row and re-derives the printed compactness
/// from area and perimeter for rows where the two agree.
pub fn run_selfcheck(th: &ClassificationThresholds) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    for case in all_cases() {
        let (label, _) = classify(&case.morpho(), &case.color(), th);
        out.push(CheckOutcome {
            name: format!("classify {}", case.name),
            passed: label == case.expected,
            detail: format!("expected {} got {}", case.expected, label),
        });
    }
    for name in ["healthy-1", "sickle-3"] {
        let case = all_cases().find(|c| c.name == name).expect("known case");
        let c = compute_compactness(case.area, case.perimeter).expect("nonzero perimeter");
        out.push(CheckOutcome {
            name: format!("compactness {name}"),
            passed: (c - case.compactness).abs() <= 0.01,
            detail: format!("4pi*{}/{}^2 = {c:.4}, printed {:.2}", case.area, case.perimeter, case.compactness),
        });
    }
    out
}
