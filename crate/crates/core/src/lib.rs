//! Semi-automatic identification of erythrocyte forms in blood smear images.
//!
//! The operator frames one red blood cell in a region of interest. The cell is
//! isolated with Otsu thresholding and 8-connected labeling, measured for
//! shape and red/white pallor distribution, then assigned a class by a small
//! rule set: healthy, annulocyte, sickle, acanthocyte, elliptocyte, or
//! indeterminate.
//!
//! ```no_run
//! use erythro::{analyze_roi, load_image, AnalysisConfig, Roi};
//!
//! let img = load_image("smear.png").unwrap();
//! let roi = Roi::new(410, 220, 96, 96).unwrap();
//! let report = analyze_roi(&img, &roi, &AnalysisConfig::default()).unwrap();
//! println!("{}", report.to_json());
//! ```

pub mod casebook;
pub mod classifier;
pub mod cli;
pub mod colorimetry;
pub mod config;
pub mod morphometry;
pub mod pipeline;
pub mod raster;
pub mod segmentation;
pub mod service;
pub mod synth;

pub use classifier::{classify, ClassificationThresholds, ErythrocyteClass};
pub use colorimetry::ColorimetricFeatures;
pub use config::{AnalysisConfig, OutputFormat};
pub use morphometry::{compute_morphometry, MorphometricFeatures};
pub use pipeline::{analyze_cell, analyze_roi, analyze_rois, AnalysisError, ErythrocyteReport};
pub use raster::{crop_roi, decode_image, load_image, save_image, to_grayscale, GrayImage, RasterImage, Roi};
pub use segmentation::BinaryMask;
pub use synth::{render_shape, ShapeSpec};
