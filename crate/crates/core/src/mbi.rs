//! Magnitude-based inference.
//!
//! An effect is judged against a smallest worthwhile change (SWC): the
//! chances that the true value lies below `-swc`, within `±swc`, or above
//! `+swc` form a triplet, and the triplet is put into words through a
//! descriptor ladder. Magnitudes of standardized effects are banded on a
//! separate threshold scale.

use serde::{Deserialize, Serialize};

use crate::effects::ComparisonResult;
use crate::error::{Error, Result};
use crate::specfun::t_cdf;

/// Ordered thresholds on |d| and one label per band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScale", into = "RawScale")]
pub struct MagnitudeScale {
    thresholds: Vec<f64>,
    labels: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct RawScale {
    thresholds: Vec<f64>,
    labels: Vec<String>,
}

impl TryFrom<RawScale> for MagnitudeScale {
    type Error = Error;
    fn try_from(raw: RawScale) -> Result<Self> {
        MagnitudeScale::new(raw.thresholds, raw.labels)
    }
}

impl From<MagnitudeScale> for RawScale {
    fn from(s: MagnitudeScale) -> Self {
        RawScale {
            thresholds: s.thresholds,
            labels: s.labels,
        }
    }
}

impl Default for MagnitudeScale {
    fn default() -> Self {
        MagnitudeScale {
            thresholds: vec![0.2, 0.6, 1.2, 2.0],
            labels: ["trivial", "small", "moderate", "large", "very large"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }
}

impl MagnitudeScale {
    pub fn new(thresholds: Vec<f64>, labels: Vec<String>) -> Result<Self> {
        if thresholds.is_empty() {
            return Err(Error::InvalidConfig(
                "magnitude scale needs at least one threshold".into(),
            ));
        }
        if thresholds.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
            return Err(Error::InvalidConfig(
                "magnitude thresholds must be positive and finite".into(),
            ));
        }
        if thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "magnitude thresholds must be strictly increasing".into(),
            ));
        }
        if labels.len() != thresholds.len() + 1 {
            return Err(Error::InvalidConfig(format!(
                "{} thresholds need {} labels, got {}",
                thresholds.len(),
                thresholds.len() + 1,
                labels.len()
            )));
        }
        Ok(MagnitudeScale { thresholds, labels })
    }

    /// Keeps the default labels, replaces the thresholds.
    pub fn with_thresholds(thresholds: Vec<f64>) -> Result<Self> {
        let labels = if thresholds.len() == 4 {
            MagnitudeScale::default().labels
        } else {
            (0..=thresholds.len()).map(|i| format!("band {i}")).collect()
        };
        MagnitudeScale::new(thresholds, labels)
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Band index for |d|; lower bounds are inclusive.
    pub fn band(&self, d: f64) -> usize {
        let m = d.abs();
        self.thresholds.iter().take_while(|&&t| m >= t).count()
    }
}

/// Label of the band containing |d|.
pub fn classify_magnitude(d: f64, scale: &MagnitudeScale) -> &str {
    &scale.labels[scale.band(d)]
}

/// Smallest worthwhile change.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "units", content = "value", rename_all = "lowercase")]
pub enum Swc {
    /// In units of the comparison's standardizer.
    Standardized(f64),
    /// In the measurement units of the analysis.
    Raw(f64),
}

impl Default for Swc {
    fn default() -> Self {
        Swc::Standardized(0.2)
    }
}

impl Swc {
    pub fn validate(&self) -> Result<()> {
        let v = match self {
            Swc::Standardized(v) | Swc::Raw(v) => *v,
        };
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("SWC must be positive, got {v}")))
        }
    }

    /// The SWC in analysis units given the comparison's standardizer.
    pub fn in_raw_units(&self, standardizer: f64) -> f64 {
        match *self {
            Swc::Standardized(v) => v * standardizer,
            Swc::Raw(v) => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChanceTriplet {
    pub negative: f64,
    pub trivial: f64,
    pub positive: f64,
}

impl ChanceTriplet {
    /// Builds a triplet from chances that may not sum exactly to one, e.g.
    /// percentages rounded for publication.
    pub fn normalized(negative: f64, trivial: f64, positive: f64) -> Result<Self> {
        let parts = [negative, trivial, positive];
        if parts.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
            return Err(Error::domain("chances must be finite and nonnegative"));
        }
        let total: f64 = parts.iter().sum();
        if total <= 0.0 {
            return Err(Error::domain("chances sum to zero"));
        }
        Ok(ChanceTriplet {
            negative: negative / total,
            trivial: trivial / total,
            positive: positive / total,
        })
    }

    pub fn sum(&self) -> f64 {
        self.negative + self.trivial + self.positive
    }

    pub fn get(&self, direction: Direction) -> Option<f64> {
        match direction {
            Direction::Negative => Some(self.negative),
            Direction::Trivial => Some(self.trivial),
            Direction::Positive => Some(self.positive),
            Direction::Unclear => None,
        }
    }
}

/// Chances that the true effect is negative, trivial or positive relative
/// to `±swc`, from a t sampling distribution centred on `effect`.
pub fn mbi_chances(effect: f64, se: f64, df: f64, swc: f64) -> Result<ChanceTriplet> {
    if !(se > 0.0) || !se.is_finite() {
        return Err(Error::domain(format!("standard error must be positive, got {se}")));
    }
    if !(swc > 0.0) {
        return Err(Error::domain(format!("SWC must be positive, got {swc}")));
    }
    if !effect.is_finite() {
        return Err(Error::domain("effect must be finite"));
    }
    let positive = t_cdf((effect - swc) / se, df)?.clamp(0.0, 1.0);
    let negative = t_cdf((-swc - effect) / se, df)?.clamp(0.0, 1.0);
    let trivial = (1.0 - (positive + negative)).clamp(0.0, 1.0);
    Ok(ChanceTriplet {
        negative,
        trivial,
        positive,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Negative,
    Trivial,
    Positive,
    Unclear,
}

/// An effect is unclear when both tails exceed their thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnclearThresholds {
    pub positive: f64,
    pub negative: f64,
}

impl Default for UnclearThresholds {
    fn default() -> Self {
        UnclearThresholds::mechanistic()
    }
}

impl UnclearThresholds {
    pub fn mechanistic() -> Self {
        UnclearThresholds {
            positive: 0.05,
            negative: 0.05,
        }
    }

    /// Benefit must be at least possible (25%) while harm is tolerated only
    /// when most unlikely (0.5%).
    pub fn clinical() -> Self {
        UnclearThresholds {
            positive: 0.25,
            negative: 0.005,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for v in [self.positive, self.negative] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "unclear thresholds must lie in (0, 1), got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Clear/unclear verdict; when clear, the direction with the greatest
/// chance (ties resolved negative, trivial, positive in that order).
pub fn mechanistic_inference(chances: &ChanceTriplet, unclear: &UnclearThresholds) -> Direction {
    if chances.positive > unclear.positive && chances.negative > unclear.negative {
        return Direction::Unclear;
    }
    let mut best = (Direction::Negative, chances.negative);
    for (dir, p) in [
        (Direction::Trivial, chances.trivial),
        (Direction::Positive, chances.positive),
    ] {
        if p > best.1 {
            best = (dir, p);
        }
    }
    best.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Locale {
    #[default]
    En,
    Pt,
}

impl std::str::FromStr for Locale {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "en" => Ok(Locale::En),
            "pt" => Ok(Locale::Pt),
            other => Err(Error::InvalidConfig(format!(
                "unknown locale '{other}' (expected en or pt)"
            ))),
        }
    }
}

/// Words for the three directions and the unclear verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionTerms {
    pub negative: String,
    pub trivial: String,
    pub positive: String,
    pub unclear: String,
}

/// Maps a chance to a qualitative word. Rungs are lower-inclusive: a
/// chance at or above `thresholds[i]` and below `thresholds[i + 1]` gets
/// `words[i + 1]`. Chances are first rounded to `sig_figs` significant
/// figures as a percentage, so the word always agrees with the number a
/// report prints next to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptorLadder {
    pub thresholds: Vec<f64>,
    pub words: Vec<String>,
    pub directions: DirectionTerms,
    pub sig_figs: u32,
}

impl Default for DescriptorLadder {
    fn default() -> Self {
        DescriptorLadder::for_locale(Locale::En)
    }
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

impl DescriptorLadder {
    pub const DEFAULT_THRESHOLDS: [f64; 6] = [0.01, 0.05, 0.25, 0.75, 0.95, 0.99];

    pub fn for_locale(locale: Locale) -> Self {
        let (words, directions) = match locale {
            Locale::En => (
                strings(&[
                    "most unlikely",
                    "very unlikely",
                    "unlikely",
                    "possibly",
                    "likely",
                    "very likely",
                    "almost certainly",
                ]),
                DirectionTerms {
                    negative: "negative".into(),
                    trivial: "trivial".into(),
                    positive: "positive".into(),
                    unclear: "unclear".into(),
                },
            ),
            Locale::Pt => (
                strings(&[
                    "quase certamente não",
                    "muito improvável",
                    "improvável",
                    "possivelmente",
                    "provavelmente",
                    "muito provavelmente",
                    "quase certamente",
                ]),
                DirectionTerms {
                    negative: "negativo".into(),
                    trivial: "trivial".into(),
                    positive: "positivo".into(),
                    unclear: "pouco claro".into(),
                },
            ),
        };
        DescriptorLadder {
            thresholds: Self::DEFAULT_THRESHOLDS.to_vec(),
            words,
            directions,
            sig_figs: 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.words.len() != self.thresholds.len() + 1 {
            return Err(Error::InvalidConfig(format!(
                "descriptor ladder with {} thresholds needs {} words, got {}",
                self.thresholds.len(),
                self.thresholds.len() + 1,
                self.words.len()
            )));
        }
        if self.thresholds.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
            return Err(Error::InvalidConfig("ladder thresholds must lie in (0, 1)".into()));
        }
        if self.thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "ladder thresholds must be strictly increasing".into(),
            ));
        }
        if self.sig_figs == 0 {
            return Err(Error::InvalidConfig(
                "ladder rounding needs at least one significant figure".into(),
            ));
        }
        Ok(())
    }

    /// Chance rounded the way reports print it.
    pub fn rounded(&self, chance: f64) -> f64 {
        round_sig(chance * 100.0, self.sig_figs) / 100.0
    }

    pub fn word(&self, chance: f64) -> &str {
        let c = self.rounded(chance);
        let rung = self.thresholds.iter().take_while(|&&t| c >= t).count();
        &self.words[rung]
    }

    pub fn direction_term(&self, direction: Direction) -> &str {
        match direction {
            Direction::Negative => &self.directions.negative,
            Direction::Trivial => &self.directions.trivial,
            Direction::Positive => &self.directions.positive,
            Direction::Unclear => &self.directions.unclear,
        }
    }
}

/// Rounds `x` to `sig` significant figures.
pub fn round_sig(x: f64, sig: u32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = sig as i32 - 1 - magnitude;
    if decimals >= 0 {
        let f = 10f64.powi(decimals);
        (x * f).round() / f
    } else {
        let f = 10f64.powi(-decimals);
        (x / f).round() * f
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Qualitative {
    pub direction: Direction,
    pub descriptor: String,
}

/// Direction plus ladder wording, e.g. "likely positive" or "unclear".
pub fn qualitative_label(
    chances: &ChanceTriplet,
    ladder: &DescriptorLadder,
    unclear: &UnclearThresholds,
) -> Qualitative {
    let direction = mechanistic_inference(chances, unclear);
    let descriptor = match chances.get(direction) {
        None => ladder.direction_term(Direction::Unclear).to_string(),
        Some(chance) => format!("{} {}", ladder.word(chance), ladder.direction_term(direction)),
    };
    Qualitative { direction, descriptor }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MbiInference {
    pub p_negative: f64,
    pub p_trivial: f64,
    pub p_positive: f64,
    pub descriptor: String,
    pub direction: Direction,
    pub magnitude_label: String,
}

impl MbiInference {
    pub fn chances(&self) -> ChanceTriplet {
        ChanceTriplet {
            negative: self.p_negative,
            trivial: self.p_trivial,
            positive: self.p_positive,
        }
    }
}

/// Everything needed to turn a comparison into an inference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct MbiConfig {
    pub swc: Swc,
    pub scale: MagnitudeScale,
    pub ladder: DescriptorLadder,
    pub unclear: UnclearThresholds,
}

impl MbiConfig {
    pub fn validate(&self) -> Result<()> {
        self.swc.validate()?;
        self.ladder.validate()?;
        self.unclear.validate()
    }
}

/// Judges a comparison's raw difference against the SWC expressed in the
/// same units, so the chances are those of the standardized effect.
pub fn infer(result: &ComparisonResult, cfg: &MbiConfig) -> Result<MbiInference> {
    let swc = cfg.swc.in_raw_units(result.standardizer);
    let chances = if result.se > 0.0 && swc > 0.0 {
        mbi_chances(result.diff, result.se, result.df, swc)?
    } else {
        // no sampling spread: all the chance sits where the estimate is
        let d = result.diff;
        let (neg, pos) = (d < -swc, d > swc);
        ChanceTriplet {
            negative: if neg { 1.0 } else { 0.0 },
            trivial: if !neg && !pos { 1.0 } else { 0.0 },
            positive: if pos { 1.0 } else { 0.0 },
        }
    };
    let q = qualitative_label(&chances, &cfg.ladder, &cfg.unclear);
    Ok(MbiInference {
        p_negative: chances.negative,
        p_trivial: chances.trivial,
        p_positive: chances.positive,
        descriptor: q.descriptor,
        direction: q.direction,
        magnitude_label: classify_magnitude(result.effect_size, &cfg.scale).to_string(),
    })
}
