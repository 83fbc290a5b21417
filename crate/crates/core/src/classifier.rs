//! Rule-based morphology test.
//!
//! Shape is decided first. Compact cells are split into elliptical and
//! circular by the spacing between their axes, and circular ones are then
//! judged by the size of their central pallor. Cells below the compactness
//! gate go through the concavity test, where exactly two complement regions
//! mean a sickle and more mean an acanthocyte.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::colorimetry::ColorimetricFeatures;
use crate::morphometry::MorphometricFeatures;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ErythrocyteClass {
    Healthy,
    Annulocyte,
    Sickle,
    Acanthocyte,
    Elliptocyte,
    Indeterminate,
}

impl fmt::Display for ErythrocyteClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThresholdError {
    #[error("threshold {0} must be strictly positive")]
    NonPositive(&'static str),
    #[error("healthy white band [{min}, {max}] is empty")]
    EmptyHealthyBand { min: f64, max: f64 },
    #[error("healthy white band ends at {healthy_max}% but annulocyte band starts at {annulocyte_min}%")]
    OverlappingBands { healthy_max: f64, annulocyte_min: f64 },
}

/// Decision thresholds. Defaults are calibrated for 100x objective images.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassificationThresholds {
    /// Compactness at or above which a cell is circular or elliptical.
    pub compactness_gate: f64,
    /// Axis spacing, in pixels, above which a compact cell is elliptical.
    pub spacing_gate: f64,
    pub healthy_white_min: f64,
    pub healthy_white_max: f64,
    pub annulocyte_white_min: f64,
    /// Red percentage that corroborates a sickle call. Reported only.
    pub sickle_red_min: f64,
    pub ncc_sickle: u32,
}

impl Default for ClassificationThresholds {
    fn default() -> Self {
        ClassificationThresholds {
            compactness_gate: 0.8,
            spacing_gate: 7.0,
            healthy_white_min: 10.0,
            healthy_white_max: 14.0,
            annulocyte_white_min: 33.0,
            sickle_red_min: 91.0,
            ncc_sickle: 2,
        }
    }
}

impl ClassificationThresholds {
    pub fn validate(&self) -> Result<(), ThresholdError> {
        let positive = [
            ("compactness_gate", self.compactness_gate),
            ("spacing_gate", self.spacing_gate),
            ("healthy_white_min", self.healthy_white_min),
            ("healthy_white_max", self.healthy_white_max),
            ("annulocyte_white_min", self.annulocyte_white_min),
            ("sickle_red_min", self.sickle_red_min),
            ("ncc_sickle", f64::from(self.ncc_sickle)),
        ];
        for (name, v) in positive {
            // also rejects NaN
            if !(v > 0.0) {
                return Err(ThresholdError::NonPositive(name));
            }
        }
        if self.healthy_white_min > self.healthy_white_max {
            return Err(ThresholdError::EmptyHealthyBand {
                min: self.healthy_white_min,
                max: self.healthy_white_max,
            });
        }
        if self.healthy_white_max >= self.annulocyte_white_min {
            return Err(ThresholdError::OverlappingBands {
                healthy_max: self.healthy_white_max,
                annulocyte_min: self.annulocyte_white_min,
            });
        }
        Ok(())
    }
}

/// Assigns one class and returns the fired rules in order. The last trace
/// entry always names the label.
pub fn classify(
    morpho: &MorphometricFeatures,
    color: &ColorimetricFeatures,
    th: &ClassificationThresholds,
) -> (ErythrocyteClass, Vec<String>) {
    let mut trace = Vec::new();
    let label = if morpho.compactness >= th.compactness_gate {
        trace.push(format!(
            "compactness {:.2} >= {:.2}: circular or elliptical",
            morpho.compactness, th.compactness_gate
        ));
        compact_branch(morpho, color, th, &mut trace)
    } else {
        trace.push(format!(
            "compactness {:.2} < {:.2}: non-convex, running concavity test",
            morpho.compactness, th.compactness_gate
        ));
        concave_branch(morpho, color, th, &mut trace)
    };
    trace.push(format!("label: {label}"));
    (label, trace)
}

fn compact_branch(
    morpho: &MorphometricFeatures,
    color: &ColorimetricFeatures,
    th: &ClassificationThresholds,
    trace: &mut Vec<String>,
) -> ErythrocyteClass {
    if morpho.axis_spacing > th.spacing_gate {
        trace.push(format!(
            "axis spacing {:.2} > {:.2} px: elliptical",
            morpho.axis_spacing, th.spacing_gate
        ));
        return ErythrocyteClass::Elliptocyte;
    }
    trace.push(format!(
        "axis spacing {:.2} <= {:.2} px: circular",
        morpho.axis_spacing, th.spacing_gate
    ));
    let white = color.pct_white;
    if (th.healthy_white_min..=th.healthy_white_max).contains(&white) {
        trace.push(format!(
            "white {white:.2}% within healthy band [{}, {}]%",
            th.healthy_white_min, th.healthy_white_max
        ));
        ErythrocyteClass::Healthy
    } else if white >= th.annulocyte_white_min {
        trace.push(format!(
            "white {white:.2}% >= {}%: enlarged central pallor",
            th.annulocyte_white_min
        ));
        ErythrocyteClass::Annulocyte
    } else if white > th.healthy_white_max {
        trace.push(format!(
            "white {white:.2}% between healthy band and annulocyte minimum: hypochromic tendency",
        ));
        ErythrocyteClass::Indeterminate
    } else {
        trace.push(format!(
            "white {white:.2}% below healthy band minimum {}%: no rule applies",
            th.healthy_white_min
        ));
        ErythrocyteClass::Indeterminate
    }
}

fn concave_branch(
    morpho: &MorphometricFeatures,
    color: &ColorimetricFeatures,
    th: &ClassificationThresholds,
    trace: &mut Vec<String>,
) -> ErythrocyteClass {
    use std::cmp::Ordering::*;
    match morpho.ncc.cmp(&th.ncc_sickle) {
        Equal => {
            trace.push(format!("ncc {} == {}: falciform", morpho.ncc, th.ncc_sickle));
            if color.pct_red >= th.sickle_red_min {
                trace.push(format!(
                    "red {:.2}% >= {}%: colour corroborates sickle",
                    color.pct_red, th.sickle_red_min
                ));
            } else {
                trace.push(format!(
                    "red {:.2}% < {}%: colour does not corroborate sickle",
                    color.pct_red, th.sickle_red_min
                ));
            }
            ErythrocyteClass::Sickle
        }
        Greater => {
            trace.push(format!("ncc {} > {}: spiculated", morpho.ncc, th.ncc_sickle));
            ErythrocyteClass::Acanthocyte
        }
        Less => {
            trace.push(format!("ncc {} < {}: no concavity rule applies", morpho.ncc, th.ncc_sickle));
            ErythrocyteClass::Indeterminate
        }
    }
}
