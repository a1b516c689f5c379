//! Seeded replication of a two-group experiment ("dance of the p-values"),
//! with analytic power and false-discovery companions.
//!
//! # Reproducibility
//!
//! The random stream is part of the interface. Experiment `i` (0-based)
//! draws from its own PCG32 (XSH-RR 64/32) generator with
//! `initstate = mix(seed, i)` and `initseq = i`, where `mix` is
//!
//! ```text
//! mix(seed, i) = splitmix64(seed ^ splitmix64(i + 0x9E3779B97F4A7C15))
//! ```
//!
//! and `splitmix64` is the SplitMix64 finalizer. Uniforms take the top 53
//! bits of two consecutive outputs (high word first); normal variates come
//! from the Marsaglia polar method, both members of each accepted pair
//! used in order. Group a (mean 0) is drawn in full before group b.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::descriptive::summarize_values;
use crate::effects::{compare_summaries, ComparisonConfig, VarianceModel};
use crate::error::{Error, Result};
use crate::specfun::{nct_cdf, t_quantile, Probability};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const PCG_MULT: u64 = 6_364_136_223_846_793_005;

pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of substream `index` under `seed`.
pub fn mix(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(GOLDEN_GAMMA)))
}

/// PCG32, XSH-RR output on a 64-bit LCG state.
#[derive(Debug, Clone)]
pub struct Pcg32 {
    state: u64,
    inc: u64,
}

impl Pcg32 {
    pub fn new(initstate: u64, initseq: u64) -> Self {
        let mut rng = Pcg32 {
            state: 0,
            inc: (initseq << 1) | 1,
        };
        rng.next_u32();
        rng.state = rng.state.wrapping_add(initstate);
        rng.next_u32();
        rng
    }

    /// Generator for experiment `index` of a run seeded with `seed`.
    pub fn substream(seed: u64, index: u64) -> Self {
        Pcg32::new(mix(seed, index), index)
    }

    pub fn next_u32(&mut self) -> u32 {
        let old = self.state;
        self.state = old.wrapping_mul(PCG_MULT).wrapping_add(self.inc);
        let xorshifted = (((old >> 18) ^ old) >> 27) as u32;
        let rot = (old >> 59) as u32;
        xorshifted.rotate_right(rot)
    }

    pub fn next_u64(&mut self) -> u64 {
        let hi = self.next_u32() as u64;
        let lo = self.next_u32() as u64;
        (hi << 32) | lo
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Standard normal variates by the polar method.
#[derive(Debug, Clone)]
pub struct NormalSource {
    rng: Pcg32,
    spare: Option<f64>,
}

impl NormalSource {
    pub fn new(rng: Pcg32) -> Self {
        NormalSource { rng, spare: None }
    }

    pub fn next_standard(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.rng.next_f64() - 1.0;
            let v = 2.0 * self.rng.next_f64() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                self.spare = Some(v * f);
                return u * f;
            }
        }
    }

    pub fn next_normal(&mut self, mean: f64, sd: f64) -> f64 {
        mean + sd * self.next_standard()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DanceConfig {
    pub n_experiments: usize,
    pub n_per_group: usize,
    pub sigma: f64,
    pub delta_mu: f64,
    pub alpha: f64,
    pub ci_level: f64,
    pub seed: u64,
    pub variance_model: VarianceModel,
}

impl DanceConfig {
    /// Defaults of the classic demonstration: 25 experiments, 20 per group,
    /// σ = 20, a true difference of 10, α = 0.05, 95% intervals.
    pub fn new(seed: u64) -> Self {
        DanceConfig {
            n_experiments: 25,
            n_per_group: 20,
            sigma: 20.0,
            delta_mu: 10.0,
            alpha: 0.05,
            ci_level: 0.95,
            seed,
            variance_model: VarianceModel::Pooled,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_experiments == 0 {
            return fail("need at least one experiment".into());
        }
        if self.n_per_group < 2 {
            return fail(format!("n per group must be at least 2, got {}", self.n_per_group));
        }
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return fail(format!("sigma must be positive, got {}", self.sigma));
        }
        if !self.delta_mu.is_finite() {
            return fail("delta must be finite".into());
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return fail(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if !(self.ci_level > 0.5 && self.ci_level < 1.0) {
            return fail(format!("ci level must lie in (0.5, 1), got {}", self.ci_level));
        }
        Ok(())
    }
}

/// p-value bands used to annotate each replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SigCategory {
    #[serde(rename = "***")]
    Three,
    #[serde(rename = "**")]
    Two,
    #[serde(rename = "*")]
    One,
    #[serde(rename = "?")]
    Marginal,
    #[serde(rename = "ns")]
    NotSignificant,
}

impl SigCategory {
    /// Boundary values fall into the upper (less significant) band.
    pub fn from_p(p: f64) -> Self {
        if p < 0.001 {
            SigCategory::Three
        } else if p < 0.01 {
            SigCategory::Two
        } else if p < 0.05 {
            SigCategory::One
        } else if p < 0.10 {
            SigCategory::Marginal
        } else {
            SigCategory::NotSignificant
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SigCategory::Three => "***",
            SigCategory::Two => "**",
            SigCategory::One => "*",
            SigCategory::Marginal => "?",
            SigCategory::NotSignificant => "ns",
        }
    }

    /// Glyph drawn beside a row; empty for `ns`.
    pub fn glyph(self) -> &'static str {
        match self {
            SigCategory::NotSignificant => "",
            other => other.as_str(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DanceRecord {
    /// 1-based experiment number.
    pub index: usize,
    pub diff: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub p_value: f64,
    pub sig_category: SigCategory,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DanceSummary {
    pub n_experiments: usize,
    /// Experiments with `p < alpha`.
    pub count_significant: usize,
    /// Intervals containing the true difference.
    pub ci_capture_count: usize,
    pub mean_diff_of_diffs: f64,
}

impl DanceSummary {
    pub fn significant_fraction(&self) -> f64 {
        self.count_significant as f64 / self.n_experiments as f64
    }

    pub fn capture_rate(&self) -> f64 {
        self.ci_capture_count as f64 / self.n_experiments as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DanceResult {
    pub config: DanceConfig,
    pub records: Vec<DanceRecord>,
    pub summary: DanceSummary,
}

fn run_experiment(cfg: &DanceConfig, cmp: &ComparisonConfig, index: usize) -> Result<DanceRecord> {
    let mut normals = NormalSource::new(Pcg32::substream(cfg.seed, index as u64));
    let n = cfg.n_per_group;
    let a: Vec<f64> = (0..n).map(|_| normals.next_normal(0.0, cfg.sigma)).collect();
    let b: Vec<f64> = (0..n).map(|_| normals.next_normal(cfg.delta_mu, cfg.sigma)).collect();
    let sa = summarize_values("a", &a)?;
    let sb = summarize_values("b", &b)?;
    let r = compare_summaries(&sa, &sb, cmp)?;
    Ok(DanceRecord {
        index: index + 1,
        diff: r.diff,
        ci_low: r.ci_low,
        ci_high: r.ci_high,
        p_value: r.p_value,
        sig_category: SigCategory::from_p(r.p_value),
    })
}

/// Neumaier-compensated sum, taken in slice order.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Runs the replications in parallel on the current rayon pool. The output
/// does not depend on the pool size.
pub fn run_dance(cfg: &DanceConfig) -> Result<DanceResult> {
    cfg.validate()?;
    let cmp = ComparisonConfig {
        ci_level: Probability::new(cfg.ci_level)?,
        variance_model: cfg.variance_model,
        ..ComparisonConfig::default()
    };
    let records = (0..cfg.n_experiments)
        .into_par_iter()
        .map(|i| run_experiment(cfg, &cmp, i))
        .collect::<Result<Vec<_>>>()?;

    let count_significant = records.iter().filter(|r| r.p_value < cfg.alpha).count();
    let ci_capture_count = records
        .iter()
        .filter(|r| r.ci_low <= cfg.delta_mu && cfg.delta_mu <= r.ci_high)
        .count();
    let mean_diff_of_diffs = compensated_sum(records.iter().map(|r| r.diff)) / records.len() as f64;

    Ok(DanceResult {
        config: *cfg,
        summary: DanceSummary {
            n_experiments: records.len(),
            count_significant,
            ci_capture_count,
            mean_diff_of_diffs,
        },
        records,
    })
}

impl DanceResult {
    /// One row per experiment, LF line endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,diff,ci_low,ci_high,p_value,sig_category\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.index,
                r.diff,
                r.ci_low,
                r.ci_high,
                r.p_value,
                r.sig_category.as_str()
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dance result serializes")
    }

    /// Count of records per significance band.
    pub fn histogram(&self) -> std::collections::BTreeMap<SigCategory, usize> {
        let mut h = std::collections::BTreeMap::new();
        for r in &self.records {
            *h.entry(r.sig_category).or_insert(0) += 1;
        }
        h
    }
}

/// Power of the two-sided two-sample t test with `n` per group, from the
/// noncentral t with noncentrality `d·sqrt(n/2)`.
pub fn theoretical_power(d: f64, n_per_group: usize, alpha: f64) -> Result<f64> {
    if n_per_group < 2 {
        return Err(Error::InvalidConfig(format!(
            "n per group must be at least 2, got {n_per_group}"
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidConfig(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if !d.is_finite() {
        return Err(Error::InvalidConfig("effect size must be finite".into()));
    }
    let n = n_per_group as f64;
    let df = 2.0 * n - 2.0;
    let ncp = d * (n / 2.0).sqrt();
    let t_crit = t_quantile(1.0 - alpha / 2.0, df)?;
    let upper = 1.0 - nct_cdf(t_crit, df, ncp)?;
    let lower = nct_cdf(-t_crit, df, ncp)?;
    Ok((upper + lower).clamp(0.0, 1.0))
}

/// Share of significant results that are false positives, given the prior
/// share of tested hypotheses whose effect is real.
pub fn false_discovery_rate(prior_real_effect: f64, alpha: f64, power: f64) -> Result<f64> {
    if !(prior_real_effect > 0.0 && prior_real_effect <= 1.0) {
        return Err(Error::domain(format!(
            "prior probability of a real effect must lie in (0, 1], got {prior_real_effect}"
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if !(power > 0.0 && power <= 1.0) {
        return Err(Error::domain(format!("power must lie in (0, 1], got {power}")));
    }
    let false_pos = alpha * (1.0 - prior_real_effect);
    let true_pos = power * prior_real_effect;
    Ok(false_pos / (false_pos + true_pos))
}
