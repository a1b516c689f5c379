//! Two-group and paired comparisons: mean difference with its confidence
//! interval, two-tailed p-value, percent difference on the log pathway and
//! a standardized effect size with its own interval.

use serde::{Deserialize, Serialize};

use crate::descriptive::{back_transform_pct, log_transform, summarize_values, Sample, SampleSummary};
use crate::error::{Error, Result};
use crate::specfun::{norm_quantile, t_cdf, t_quantile, Probability};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum VarianceModel {
    /// Unequal variances, Welch–Satterthwaite degrees of freedom.
    #[default]
    Welch,
    Pooled,
}

impl std::str::FromStr for VarianceModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "welch" => Ok(VarianceModel::Welch),
            "pooled" => Ok(VarianceModel::Pooled),
            other => Err(Error::InvalidConfig(format!(
                "unknown variance model '{other}' (expected welch or pooled)"
            ))),
        }
    }
}

/// Standardizer for the paired effect size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PairedStandardizer {
    /// SD of the pre scores.
    #[default]
    BaselineSd,
    /// SD of the within-subject differences.
    DiffSd,
}

impl std::str::FromStr for PairedStandardizer {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "baseline-sd" => Ok(PairedStandardizer::BaselineSd),
            "diff-sd" => Ok(PairedStandardizer::DiffSd),
            other => Err(Error::InvalidConfig(format!(
                "unknown standardizer '{other}' (expected baseline-sd or diff-sd)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonConfig {
    pub ci_level: Probability,
    pub variance_model: VarianceModel,
    pub use_log_scale: bool,
    pub paired_standardizer: PairedStandardizer,
}

impl Default for ComparisonConfig {
    fn default() -> Self {
        ComparisonConfig {
            ci_level: Probability::new(0.90).unwrap(),
            variance_model: VarianceModel::Welch,
            use_log_scale: false,
            paired_standardizer: PairedStandardizer::BaselineSd,
        }
    }
}

impl ComparisonConfig {
    pub fn with_ci_level(mut self, level: f64) -> Result<Self> {
        self.ci_level = Probability::new(level)?;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let level = self.ci_level.get();
        if level > 0.5 && level < 1.0 {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "confidence level must lie in (0.5, 1), got {level}"
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Design {
    Independent,
    Paired,
}

/// Which SD the standardized effect was divided by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StandardizerKind {
    PooledSd,
    BaselineSd,
    DiffSd,
}

/// How the effect-size interval was built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EffectCiMethod {
    /// `d ± z · se_d` with the large-sample standard error of d.
    NormalApproximation,
    /// The t interval of the raw difference divided by the standardizer.
    ScaledT,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonResult {
    pub design: Design,
    /// Mean of group b minus mean of group a (post minus pre when paired),
    /// in analysis units (log units on the log pathway).
    pub diff: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub se: f64,
    pub t_statistic: f64,
    pub p_value: f64,
    pub df: f64,
    pub effect_size: f64,
    pub es_ci_low: f64,
    pub es_ci_high: f64,
    pub pct_diff: Option<f64>,
    pub pct_ci_low: Option<f64>,
    pub pct_ci_high: Option<f64>,
    pub standardizer: f64,
    pub standardizer_kind: StandardizerKind,
    pub es_ci_method: EffectCiMethod,
    pub ci_level: f64,
    pub variance_model: VarianceModel,
    pub log_scale: bool,
}

impl ComparisonResult {
    pub fn ci_halfwidth(&self) -> f64 {
        0.5 * (self.ci_high - self.ci_low)
    }
}

/// Cohen's d with its normal-approximation interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectSize {
    pub d: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub se: f64,
    pub pooled_sd: f64,
}

fn pooled_sd(a: &SampleSummary, b: &SampleSummary) -> f64 {
    let (na, nb) = (a.n as f64, b.n as f64);
    (((na - 1.0) * a.variance() + (nb - 1.0) * b.variance()) / (na + nb - 2.0)).sqrt()
}

/// Cohen's d for `mean(b) - mean(a)` over the pooled SD.
pub fn cohens_d(a: &Sample, b: &Sample, ci_level: f64) -> Result<EffectSize> {
    let sa = summarize_values(a.label(), a.values())?;
    let sb = summarize_values(b.label(), b.values())?;
    cohens_d_from_summaries(&sa, &sb, ci_level)
}

pub(crate) fn cohens_d_from_summaries(a: &SampleSummary, b: &SampleSummary, ci_level: f64) -> Result<EffectSize> {
    let sd = pooled_sd(a, b);
    let diff = b.mean - a.mean;
    if sd == 0.0 {
        return Err(Error::InfiniteEffect { diff });
    }
    let d = diff / sd;
    let (na, nb) = (a.n as f64, b.n as f64);
    let se = ((na + nb) / (na * nb) + d * d / (2.0 * (na + nb))).sqrt();
    let z = norm_quantile(0.5 * (1.0 + ci_level))?;
    Ok(EffectSize {
        d,
        ci_low: d - z * se,
        ci_high: d + z * se,
        se,
        pooled_sd: sd,
    })
}

/// Two-sided p-value for `t` on `df` degrees of freedom.
pub(crate) fn two_tailed_p(t: f64, df: f64) -> Result<f64> {
    Ok((2.0 * t_cdf(-t.abs(), df)?).min(1.0))
}

fn analysis_samples<'a>(
    a: &'a Sample,
    b: &'a Sample,
    log: bool,
) -> Result<(std::borrow::Cow<'a, Sample>, std::borrow::Cow<'a, Sample>)> {
    use std::borrow::Cow;
    if log {
        Ok((Cow::Owned(log_transform(a)?), Cow::Owned(log_transform(b)?)))
    } else {
        Ok((Cow::Borrowed(a), Cow::Borrowed(b)))
    }
}

/// Compares two independent groups; the difference is `mean(b) - mean(a)`.
pub fn compare_independent(a: &Sample, b: &Sample, cfg: &ComparisonConfig) -> Result<ComparisonResult> {
    cfg.validate()?;
    let (a, b) = analysis_samples(a, b, cfg.use_log_scale)?;
    let sa = summarize_values(a.label(), a.values())?;
    let sb = summarize_values(b.label(), b.values())?;
    compare_summaries(&sa, &sb, cfg)
}

pub(crate) fn compare_summaries(
    sa: &SampleSummary,
    sb: &SampleSummary,
    cfg: &ComparisonConfig,
) -> Result<ComparisonResult> {
    let level = cfg.ci_level.get();
    let diff = sb.mean - sa.mean;
    let (na, nb) = (sa.n as f64, sb.n as f64);
    let (va, vb) = (sa.variance() / na, sb.variance() / nb);

    let (se, df) = match cfg.variance_model {
        VarianceModel::Welch => {
            let se2 = va + vb;
            let denom = va * va / (na - 1.0) + vb * vb / (nb - 1.0);
            let df = if denom > 0.0 { se2 * se2 / denom } else { na + nb - 2.0 };
            (se2.sqrt(), df)
        }
        VarianceModel::Pooled => {
            let sp = pooled_sd(sa, sb);
            (sp * (1.0 / na + 1.0 / nb).sqrt(), na + nb - 2.0)
        }
    };

    if se == 0.0 {
        if diff != 0.0 {
            return Err(Error::DegenerateVariance(format!(
                "both groups have zero variance but differ by {diff}"
            )));
        }
        return Ok(ComparisonResult {
            design: Design::Independent,
            diff: 0.0,
            ci_low: 0.0,
            ci_high: 0.0,
            se: 0.0,
            t_statistic: 0.0,
            p_value: 1.0,
            df,
            effect_size: 0.0,
            es_ci_low: 0.0,
            es_ci_high: 0.0,
            pct_diff: cfg.use_log_scale.then_some(0.0),
            pct_ci_low: cfg.use_log_scale.then_some(0.0),
            pct_ci_high: cfg.use_log_scale.then_some(0.0),
            standardizer: 0.0,
            standardizer_kind: StandardizerKind::PooledSd,
            es_ci_method: EffectCiMethod::NormalApproximation,
            ci_level: level,
            variance_model: cfg.variance_model,
            log_scale: cfg.use_log_scale,
        });
    }

    let t_crit = t_quantile(0.5 * (1.0 + level), df)?;
    let t_stat = diff / se;
    let p_value = two_tailed_p(t_stat, df)?;
    let es = cohens_d_from_summaries(sa, sb, level)?;
    let (ci_low, ci_high) = (diff - t_crit * se, diff + t_crit * se);
    let pct = cfg.use_log_scale.then(|| back_transform_pct(diff, ci_low, ci_high));

    Ok(ComparisonResult {
        design: Design::Independent,
        diff,
        ci_low,
        ci_high,
        se,
        t_statistic: t_stat,
        p_value,
        df,
        effect_size: es.d,
        es_ci_low: es.ci_low,
        es_ci_high: es.ci_high,
        pct_diff: pct.map(|p| p.pct),
        pct_ci_low: pct.map(|p| p.pct_low),
        pct_ci_high: pct.map(|p| p.pct_high),
        standardizer: es.pooled_sd,
        standardizer_kind: StandardizerKind::PooledSd,
        es_ci_method: EffectCiMethod::NormalApproximation,
        ci_level: level,
        variance_model: cfg.variance_model,
        log_scale: cfg.use_log_scale,
    })
}

/// Paired comparison on positional differences `post - pre`.
pub fn compare_paired(pre: &Sample, post: &Sample, cfg: &ComparisonConfig) -> Result<ComparisonResult> {
    cfg.validate()?;
    if pre.len() != post.len() {
        return Err(Error::LengthMismatch {
            left: pre.label().to_string(),
            left_len: pre.len(),
            right: post.label().to_string(),
            right_len: post.len(),
        });
    }
    let (pre, post) = analysis_samples(pre, post, cfg.use_log_scale)?;
    let diffs: Vec<f64> = pre.values().iter().zip(post.values()).map(|(a, b)| b - a).collect();
    let sd_diff = summarize_values("differences", &diffs)?;
    let sd_pre = summarize_values(pre.label(), pre.values())?;

    let level = cfg.ci_level.get();
    let n = diffs.len() as f64;
    let df = n - 1.0;
    let diff = sd_diff.mean;
    let se = sd_diff.sem;

    if se == 0.0 && diff != 0.0 {
        return Err(Error::DegenerateVariance(format!(
            "every paired difference equals {diff}"
        )));
    }

    let (standardizer, kind) = match cfg.paired_standardizer {
        PairedStandardizer::BaselineSd => (sd_pre.sd, StandardizerKind::BaselineSd),
        PairedStandardizer::DiffSd => (sd_diff.sd, StandardizerKind::DiffSd),
    };
    if standardizer == 0.0 && diff != 0.0 {
        return Err(Error::InfiniteEffect { diff });
    }

    let (ci_low, ci_high, t_stat, p_value) = if se == 0.0 {
        (0.0, 0.0, 0.0, 1.0)
    } else {
        let t_crit = t_quantile(0.5 * (1.0 + level), df)?;
        let t_stat = diff / se;
        (
            diff - t_crit * se,
            diff + t_crit * se,
            t_stat,
            two_tailed_p(t_stat, df)?,
        )
    };
    let scale = |x: f64| if standardizer == 0.0 { 0.0 } else { x / standardizer };
    let pct = cfg.use_log_scale.then(|| back_transform_pct(diff, ci_low, ci_high));

    Ok(ComparisonResult {
        design: Design::Paired,
        diff,
        ci_low,
        ci_high,
        se,
        t_statistic: t_stat,
        p_value,
        df,
        effect_size: scale(diff),
        es_ci_low: scale(ci_low),
        es_ci_high: scale(ci_high),
        pct_diff: pct.map(|p| p.pct),
        pct_ci_low: pct.map(|p| p.pct_low),
        pct_ci_high: pct.map(|p| p.pct_high),
        standardizer,
        standardizer_kind: kind,
        es_ci_method: EffectCiMethod::ScaledT,
        ci_level: level,
        variance_model: cfg.variance_model,
        log_scale: cfg.use_log_scale,
    })
}
