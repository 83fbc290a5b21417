//! `key = value` configuration files and the analysis settings they carry.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classifier::ClassificationThresholds;
use crate::raster::Rgb;

/// Default minimum pixel count for a component to be taken as a cell.
pub const DEFAULT_MIN_AREA: usize = 800;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    pub fn new(message: impl Into<String>) -> Self {
        ConfigError { line: None, message: message.into() }
    }

    pub fn at(line: usize, message: impl Into<String>) -> Self {
        ConfigError { line: Some(line), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Splits `key = value` lines. Blank lines and `#` comments are skipped.
/// Returns `(line number, key, value)` triples in file order.
pub fn parse_key_values(text: &str) -> Result<Vec<(usize, String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::at(line_no, format!("expected key = value, got {line:?}")))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(ConfigError::at(line_no, "empty key"));
        }
        out.push((line_no, key.to_string(), value.trim().to_string()));
    }
    Ok(out)
}

/// Parses `r,g,b`.
pub fn parse_rgb(s: &str) -> Result<Rgb, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [r, g, b] = parts[..] else {
        return Err(format!("expected R,G,B, got {s:?}"));
    };
    let channel = |c: &str| c.parse::<u8>().map_err(|_| format!("channel {c:?} is not in 0..=255"));
    Ok([channel(r)?, channel(g)?, channel(b)?])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Text,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "text" => Ok(OutputFormat::Text),
            other => Err(format!("unknown output format {other:?} (expected json or text)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisConfig {
    pub min_area: usize,
    pub thresholds: ClassificationThresholds,
    pub format: OutputFormat,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            min_area: DEFAULT_MIN_AREA,
            thresholds: ClassificationThresholds::default(),
            format: OutputFormat::Json,
        }
    }
}

impl AnalysisConfig {
    /// Parses a config file body on top of the defaults.
    ///
    /// Recognised keys: `min_area`, `format` and every field of
    /// [`ClassificationThresholds`].
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = AnalysisConfig::default();
        for (line, key, value) in parse_key_values(text)? {
            cfg.set(&key, &value).map_err(|m| ConfigError::at(line, m))?;
        }
        cfg.thresholds.validate().map_err(|e| ConfigError::new(e.to_string()))?;
        if cfg.min_area == 0 {
            return Err(ConfigError::new("min_area must be positive"));
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
            value.parse().map_err(|_| format!("{key}: invalid value {value:?}"))
        }
        let th = &mut self.thresholds;
        match key {
            "min_area" => self.min_area = num(key, value)?,
            "format" => self.format = value.parse()?,
            "compactness_gate" => th.compactness_gate = num(key, value)?,
            "spacing_gate" => th.spacing_gate = num(key, value)?,
            "healthy_white_min" => th.healthy_white_min = num(key, value)?,
            "healthy_white_max" => th.healthy_white_max = num(key, value)?,
            "annulocyte_white_min" => th.annulocyte_white_min = num(key, value)?,
            "sickle_red_min" => th.sickle_red_min = num(key, value)?,
            "ncc_sickle" => th.ncc_sickle = num(key, value)?,
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_classifier_and_segmentation_values() {
        let cfg = AnalysisConfig::default();
        assert_eq!(cfg.min_area, 800);
        assert_eq!(cfg.thresholds, ClassificationThresholds::default());
        assert_eq!(cfg.thresholds.compactness_gate, 0.8);
        assert_eq!(cfg.thresholds.spacing_gate, 7.0);
    }

    #[test]
    fn parses_overrides_and_comments() {
        let cfg = AnalysisConfig::parse("# lab bench 2\nmin_area = 500\n\nspacing_gate=9 # 60x objective\nformat = text\n").unwrap();
        assert_eq!(cfg.min_area, 500);
        assert_eq!(cfg.thresholds.spacing_gate, 9.0);
        assert_eq!(cfg.format, OutputFormat::Text);
    }

    #[test]
    fn rejects_bad_lines() {
        let err = AnalysisConfig::parse("min_area = 10\nnonsense").unwrap_err();
        assert_eq!(err.line, Some(2));
        let err = AnalysisConfig::parse("colour = red").unwrap_err();
        assert!(err.message.contains("unknown key"));
        let err = AnalysisConfig::parse("spacing_gate = wide").unwrap_err();
        assert_eq!(err.line, Some(1));
        assert!(AnalysisConfig::parse("healthy_white_max = 50").is_err());
        assert!(AnalysisConfig::parse("min_area = 0").is_err());
    }

    #[test]
    fn rgb_parsing() {
        assert_eq!(parse_rgb("255, 222,219"), Ok([255, 222, 219]));
        assert!(parse_rgb("1,2").is_err());
        assert!(parse_rgb("1,2,300").is_err());
    }
}
