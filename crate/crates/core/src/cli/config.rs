//! Resolved run configuration: defaults, then an optional `key = value`
//! file, then command-line flags.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::effects::{ComparisonConfig, PairedStandardizer, VarianceModel};
use crate::error::{Error, Result};
use crate::mbi::{DescriptorLadder, Locale, MagnitudeScale, MbiConfig, Swc, UnclearThresholds};
use crate::report::AnalysisMetadata;
use crate::specfun::Probability;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub ci_level: f64,
    pub swc: Swc,
    pub variance_model: VarianceModel,
    pub log_scale: bool,
    pub scale: MagnitudeScale,
    pub ladder_thresholds: Vec<f64>,
    pub unclear: UnclearThresholds,
    pub locale: Locale,
    pub paired_standardizer: PairedStandardizer,
    pub seed: Option<u64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            ci_level: 0.90,
            swc: Swc::default(),
            variance_model: VarianceModel::Welch,
            log_scale: false,
            scale: MagnitudeScale::default(),
            ladder_thresholds: DescriptorLadder::DEFAULT_THRESHOLDS.to_vec(),
            unclear: UnclearThresholds::default(),
            locale: Locale::En,
            paired_standardizer: PairedStandardizer::BaselineSd,
            seed: None,
        }
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::InvalidConfig(format!("{key}: '{value}' is not a number")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value.split(',').map(|v| parse_f64(key, v.trim())).collect()
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::InvalidConfig(format!("{key}: '{value}' is not a boolean"))),
    }
}

impl RunConfig {
    /// Applies one setting. Keys mirror the long flag names.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "ci" => self.ci_level = parse_f64(key, value)?,
            "swc" => {
                let v = parse_f64(key, value)?;
                self.swc = match self.swc {
                    Swc::Standardized(_) => Swc::Standardized(v),
                    Swc::Raw(_) => Swc::Raw(v),
                };
            }
            "swc-units" => {
                let v = match self.swc {
                    Swc::Standardized(v) | Swc::Raw(v) => v,
                };
                self.swc = match value {
                    "standardized" => Swc::Standardized(v),
                    "raw" => Swc::Raw(v),
                    other => {
                        return Err(Error::InvalidConfig(format!(
                            "swc-units: '{other}' (expected standardized or raw)"
                        )))
                    }
                };
            }
            "variance" => self.variance_model = value.parse()?,
            "log" => self.log_scale = parse_bool(key, value)?,
            "scale" => self.scale = MagnitudeScale::with_thresholds(parse_list(key, value)?)?,
            "ladder" => self.ladder_thresholds = parse_list(key, value)?,
            "unclear-positive" => self.unclear.positive = parse_f64(key, value)?,
            "unclear-negative" => self.unclear.negative = parse_f64(key, value)?,
            "inference" => {
                self.unclear = match value {
                    "mechanistic" => UnclearThresholds::mechanistic(),
                    "clinical" => UnclearThresholds::clinical(),
                    other => {
                        return Err(Error::InvalidConfig(format!(
                            "inference: '{other}' (expected mechanistic or clinical)"
                        )))
                    }
                }
            }
            "locale" => self.locale = value.parse()?,
            "standardizer" => self.paired_standardizer = value.parse()?,
            "seed" => {
                self.seed = Some(
                    value
                        .parse()
                        .map_err(|_| Error::InvalidConfig(format!("seed: '{value}' is not a u64")))?,
                )
            }
            other => return Err(Error::InvalidConfig(format!("unknown setting '{other}'"))),
        }
        Ok(())
    }

    /// Reads `key = value` lines; `#` starts a comment.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        self.apply_text(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfig(format!("line {}: expected key = value", n + 1)))?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn ladder(&self) -> DescriptorLadder {
        DescriptorLadder {
            thresholds: self.ladder_thresholds.clone(),
            ..DescriptorLadder::for_locale(self.locale)
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.comparison()?.validate()?;
        self.mbi().validate()
    }

    pub fn comparison(&self) -> Result<ComparisonConfig> {
        let cfg = ComparisonConfig {
            ci_level: Probability::new(self.ci_level)
                .map_err(|_| Error::InvalidConfig(format!("ci: {} outside (0.5, 1)", self.ci_level)))?,
            variance_model: self.variance_model,
            use_log_scale: self.log_scale,
            paired_standardizer: self.paired_standardizer,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn mbi(&self) -> MbiConfig {
        MbiConfig {
            swc: self.swc,
            scale: self.scale.clone(),
            ladder: self.ladder(),
            unclear: self.unclear,
        }
    }

    pub fn metadata(&self) -> AnalysisMetadata {
        AnalysisMetadata {
            ci_level: self.ci_level,
            swc: self.swc,
            variance_model: self.variance_model,
            paired_standardizer: self.paired_standardizer,
            log_scale: self.log_scale,
            unclear: self.unclear,
            locale: self.locale,
            ..AnalysisMetadata::default()
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}
