//! Sample summaries and the log-transform pathway for data whose spread
//! grows with its level.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered collection of finite observations with a short label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    label: String,
    values: Vec<f64>,
}

impl Sample {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let label = label.into();
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { label, index, value });
        }
        Ok(Sample { label, values })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator).
    pub sd: f64,
    pub sem: f64,
}

impl SampleSummary {
    pub fn variance(&self) -> f64 {
        self.sd * self.sd
    }
}

/// Mean, standard deviation and standard error in one Welford pass.
pub fn summarize(sample: &Sample) -> Result<SampleSummary> {
    summarize_values(sample.label(), sample.values())
}

pub(crate) fn summarize_values(label: &str, values: &[f64]) -> Result<SampleSummary> {
    if values.len() < 2 {
        return Err(Error::InsufficientData {
            what: format!("summary of '{label}'"),
            needed: 2,
            got: values.len(),
        });
    }
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (i, &x) in values.iter().enumerate() {
        let delta = x - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (x - mean);
    }
    let n = values.len();
    let sd = (m2.max(0.0) / (n - 1) as f64).sqrt();
    Ok(SampleSummary {
        n,
        mean,
        sd,
        sem: sd / (n as f64).sqrt(),
    })
}

/// Element-wise natural logarithm. Every value must be strictly positive;
/// no offset is ever added to rescue zeros.
pub fn log_transform(sample: &Sample) -> Result<Sample> {
    let mut out = Vec::with_capacity(sample.len());
    for (index, &value) in sample.values.iter().enumerate() {
        if value <= 0.0 {
            return Err(Error::NonPositiveValue {
                label: sample.label.clone(),
                index,
                value,
            });
        }
        out.push(value.ln());
    }
    Ok(Sample {
        label: format!("ln({})", sample.label),
        values: out,
    })
}

/// An effect and its interval expressed as percentages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PercentEffect {
    pub pct: f64,
    pub pct_low: f64,
    pub pct_high: f64,
}

/// Maps a log-scale difference to a percent change, `100 (e^x - 1)`.
pub fn log_to_pct(x: f64) -> f64 {
    100.0 * x.exp_m1()
}

/// Back-transforms a natural-log effect and its interval bounds to percent
/// changes. The result is asymmetric about the point estimate.
pub fn back_transform_pct(log_effect: f64, log_ci_low: f64, log_ci_high: f64) -> PercentEffect {
    PercentEffect {
        pct: log_to_pct(log_effect),
        pct_low: log_to_pct(log_ci_low),
        pct_high: log_to_pct(log_ci_high),
    }
}
