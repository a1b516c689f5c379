//! C interface to `mbi-core`.
//!
//! Every fallible function returns an [`MbiStatus`] and writes its result
//! through an out-pointer. On failure a message is available from
//! [`mbi_last_error_message`] on the same thread. Handles are opaque and
//! must be released with their matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mbi_core::effects::{ComparisonConfig, ComparisonResult, PairedStandardizer, VarianceModel};
use mbi_core::mbi::{MagnitudeScale, MbiConfig, MbiInference, Swc};
use mbi_core::simulate::{DanceConfig, DanceResult, SigCategory};
use mbi_core::specfun::Probability;
use mbi_core::{descriptive::Sample, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MbiStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Degenerate = 3,
    Numeric = 4,
    Panic = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

// A domain error here always comes from a caller's argument.
fn status_of(err: &Error) -> MbiStatus {
    if err.is_statistical() {
        MbiStatus::Degenerate
    } else if matches!(err, Error::NoConvergence { .. }) {
        MbiStatus::Numeric
    } else {
        MbiStatus::InvalidInput
    }
}

fn fail(err: Error) -> MbiStatus {
    set_last_error(&err.to_string());
    status_of(&err)
}

fn null_pointer(what: &str) -> MbiStatus {
    set_last_error(&format!("{what} is null"));
    MbiStatus::NullPointer
}

/// Runs `f`, converting errors and panics into a status.
fn guard<F>(f: F) -> MbiStatus
where
    F: FnOnce() -> Result<(), MbiStatus>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            MbiStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => {
            set_last_error("internal panic");
            MbiStatus::Panic
        }
    }
}

fn lift<T>(r: mbi_core::Result<T>) -> Result<T, MbiStatus> {
    r.map_err(fail)
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, MbiStatus> {
    p.as_mut().ok_or_else(|| null_pointer(what))
}

unsafe fn slice<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], MbiStatus> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null_pointer(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

/// Message for the most recent failure on this thread, or an empty string.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn mbi_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn mbi_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Student t cumulative distribution.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mbi_t_cdf(t: f64, df: f64, out: *mut f64) -> MbiStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = lift(mbi_core::specfun::t_cdf(t, df))?;
        Ok(())
    })
}

/// Student t quantile.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mbi_t_quantile(p: f64, df: f64, out: *mut f64) -> MbiStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = lift(mbi_core::specfun::t_quantile(p, df))?;
        Ok(())
    })
}

/// Standard normal cumulative distribution.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mbi_norm_cdf(x: f64, out: *mut f64) -> MbiStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = lift(mbi_core::specfun::norm_cdf(x))?;
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MbiChances {
    pub negative: f64,
    pub trivial: f64,
    pub positive: f64,
}

/// Chances that the true effect is below `-swc`, within `±swc` or above
/// `swc`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mbi_chances(effect: f64, se: f64, df: f64, swc: f64, out: *mut MbiChances) -> MbiStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let c = lift(mbi_core::mbi::mbi_chances(effect, se, df, swc))?;
        *out = MbiChances {
            negative: c.negative,
            trivial: c.trivial,
            positive: c.positive,
        };
        Ok(())
    })
}

const MAGNITUDE_LABELS: [&CStr; 5] = [c"trivial", c"small", c"moderate", c"large", c"very large"];

/// Magnitude label of a standardized effect on the default scale, or null
/// for NaN. The string is static.
#[no_mangle]
pub extern "C" fn mbi_classify_magnitude(d: f64) -> *const c_char {
    if d.is_nan() {
        return ptr::null();
    }
    let band = MagnitudeScale::default().band(d);
    MAGNITUDE_LABELS[band.min(MAGNITUDE_LABELS.len() - 1)].as_ptr()
}

/// Expected share of significant results that are false discoveries.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mbi_false_discovery_rate(prior: f64, alpha: f64, power: f64, out: *mut f64) -> MbiStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = lift(mbi_core::simulate::false_discovery_rate(prior, alpha, power))?;
        Ok(())
    })
}

/// Power of a two-sided two-sample t test for standardized effect `d`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mbi_theoretical_power(d: f64, n_per_group: usize, alpha: f64, out: *mut f64) -> MbiStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = lift(mbi_core::simulate::theoretical_power(d, n_per_group, alpha))?;
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MbiComparisonConfig {
    pub ci_level: f64,
    /// Smallest worthwhile change.
    pub swc: f64,
    /// When true `swc` is in measurement units, else standardized.
    pub swc_raw: bool,
    /// Pooled variance instead of Welch.
    pub pooled: bool,
    pub log_scale: bool,
    /// Paired designs: standardize by the SD of the differences instead of
    /// the baseline SD.
    pub diff_sd_standardizer: bool,
}

impl Default for MbiComparisonConfig {
    fn default() -> Self {
        MbiComparisonConfig {
            ci_level: 0.90,
            swc: 0.2,
            swc_raw: false,
            pooled: false,
            log_scale: false,
            diff_sd_standardizer: false,
        }
    }
}

impl MbiComparisonConfig {
    fn split(&self) -> mbi_core::Result<(ComparisonConfig, MbiConfig)> {
        let comparison = ComparisonConfig {
            ci_level: Probability::new(self.ci_level)?,
            variance_model: if self.pooled {
                VarianceModel::Pooled
            } else {
                VarianceModel::Welch
            },
            use_log_scale: self.log_scale,
            paired_standardizer: if self.diff_sd_standardizer {
                PairedStandardizer::DiffSd
            } else {
                PairedStandardizer::BaselineSd
            },
        };
        comparison.validate()?;
        let mbi = MbiConfig {
            swc: if self.swc_raw {
                Swc::Raw(self.swc)
            } else {
                Swc::Standardized(self.swc)
            },
            ..MbiConfig::default()
        };
        mbi.validate()?;
        Ok((comparison, mbi))
    }
}

/// 90% intervals, Welch variance, standardized SWC of 0.2.
#[no_mangle]
pub extern "C" fn mbi_comparison_config_default() -> MbiComparisonConfig {
    MbiComparisonConfig::default()
}

/// Result of one comparison together with its inference.
pub struct MbiComparison {
    result: ComparisonResult,
    inference: MbiInference,
    descriptor: CString,
    magnitude: CString,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MbiComparisonValues {
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
    pub standardizer: f64,
    pub chances: MbiChances,
    /// Set on the log pathway; the three percent fields are NaN otherwise.
    pub has_pct: bool,
    pub pct_diff: f64,
    pub pct_ci_low: f64,
    pub pct_ci_high: f64,
}

fn finish_comparison(result: ComparisonResult, mbi: &MbiConfig, out: &mut *mut MbiComparison) -> Result<(), MbiStatus> {
    let inference = lift(mbi_core::mbi::infer(&result, mbi))?;
    let to_c = |s: &str| CString::new(s).unwrap_or_default();
    let handle = MbiComparison {
        descriptor: to_c(&inference.descriptor),
        magnitude: to_c(&inference.magnitude_label),
        result,
        inference,
    };
    *out = Box::into_raw(Box::new(handle));
    Ok(())
}

/// Compares two independent samples (b minus a).
///
/// # Safety
/// `a` and `b` must point to `na` and `nb` doubles, `cfg` may be null for
/// defaults, and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mbi_compare_independent(
    a: *const f64,
    na: usize,
    b: *const f64,
    nb: usize,
    cfg: *const MbiComparisonConfig,
    out: *mut *mut MbiComparison,
) -> MbiStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let sa = lift(Sample::new("a", slice(a, na, "a")?.to_vec()))?;
        let sb = lift(Sample::new("b", slice(b, nb, "b")?.to_vec()))?;
        let (comparison, mbi) = lift(cfg.as_ref().copied().unwrap_or_default().split())?;
        let result = lift(mbi_core::effects::compare_independent(&sa, &sb, &comparison))?;
        finish_comparison(result, &mbi, out)
    })
}

/// Compares paired measurements (post minus pre).
///
/// # Safety
/// `pre` and `post` must each point to `n` doubles, `cfg` may be null for
/// defaults, and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mbi_compare_paired(
    pre: *const f64,
    post: *const f64,
    n: usize,
    cfg: *const MbiComparisonConfig,
    out: *mut *mut MbiComparison,
) -> MbiStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let sa = lift(Sample::new("pre", slice(pre, n, "pre")?.to_vec()))?;
        let sb = lift(Sample::new("post", slice(post, n, "post")?.to_vec()))?;
        let (comparison, mbi) = lift(cfg.as_ref().copied().unwrap_or_default().split())?;
        let result = lift(mbi_core::effects::compare_paired(&sa, &sb, &comparison))?;
        finish_comparison(result, &mbi, out)
    })
}

/// # Safety
/// `h` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mbi_comparison_values(h: *const MbiComparison, out: *mut MbiComparisonValues) -> MbiStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null_pointer("handle"))?;
        let out = out_ref(out, "out")?;
        let r = &h.result;
        let c = h.inference.chances();
        *out = MbiComparisonValues {
            diff: r.diff,
            ci_low: r.ci_low,
            ci_high: r.ci_high,
            se: r.se,
            t_statistic: r.t_statistic,
            p_value: r.p_value,
            df: r.df,
            effect_size: r.effect_size,
            es_ci_low: r.es_ci_low,
            es_ci_high: r.es_ci_high,
            standardizer: r.standardizer,
            chances: MbiChances {
                negative: c.negative,
                trivial: c.trivial,
                positive: c.positive,
            },
            has_pct: r.pct_diff.is_some(),
            pct_diff: r.pct_diff.unwrap_or(f64::NAN),
            pct_ci_low: r.pct_ci_low.unwrap_or(f64::NAN),
            pct_ci_high: r.pct_ci_high.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

/// Qualitative descriptor such as "likely positive". Owned by the handle.
///
/// # Safety
/// `h` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn mbi_comparison_descriptor(h: *const MbiComparison) -> *const c_char {
    h.as_ref().map_or(ptr::null(), |h| h.descriptor.as_ptr())
}

/// Magnitude label of the effect size. Owned by the handle.
///
/// # Safety
/// `h` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn mbi_comparison_magnitude(h: *const MbiComparison) -> *const c_char {
    h.as_ref().map_or(ptr::null(), |h| h.magnitude.as_ptr())
}

/// # Safety
/// `h` must come from a compare function and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn mbi_comparison_free(h: *mut MbiComparison) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MbiDanceConfig {
    pub n_experiments: usize,
    pub n_per_group: usize,
    pub sigma: f64,
    pub delta_mu: f64,
    pub alpha: f64,
    pub ci_level: f64,
    pub seed: u64,
    /// Welch variance instead of pooled.
    pub welch: bool,
}

impl From<MbiDanceConfig> for DanceConfig {
    fn from(c: MbiDanceConfig) -> Self {
        DanceConfig {
            n_experiments: c.n_experiments,
            n_per_group: c.n_per_group,
            sigma: c.sigma,
            delta_mu: c.delta_mu,
            alpha: c.alpha,
            ci_level: c.ci_level,
            seed: c.seed,
            variance_model: if c.welch {
                VarianceModel::Welch
            } else {
                VarianceModel::Pooled
            },
        }
    }
}

/// 25 experiments of 20 per group, sigma 20, true difference 10.
#[no_mangle]
pub extern "C" fn mbi_dance_config_default(seed: u64) -> MbiDanceConfig {
    let d = DanceConfig::new(seed);
    MbiDanceConfig {
        n_experiments: d.n_experiments,
        n_per_group: d.n_per_group,
        sigma: d.sigma,
        delta_mu: d.delta_mu,
        alpha: d.alpha,
        ci_level: d.ci_level,
        seed: d.seed,
        welch: d.variance_model == VarianceModel::Welch,
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MbiSigCategory {
    Three = 0,
    Two = 1,
    One = 2,
    Marginal = 3,
    NotSignificant = 4,
}

impl From<SigCategory> for MbiSigCategory {
    fn from(s: SigCategory) -> Self {
        match s {
            SigCategory::Three => MbiSigCategory::Three,
            SigCategory::Two => MbiSigCategory::Two,
            SigCategory::One => MbiSigCategory::One,
            SigCategory::Marginal => MbiSigCategory::Marginal,
            SigCategory::NotSignificant => MbiSigCategory::NotSignificant,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MbiDanceRecord {
    /// 1-based experiment number.
    pub index: usize,
    pub diff: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub p_value: f64,
    pub sig_category: MbiSigCategory,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MbiDanceSummary {
    pub n_experiments: usize,
    pub count_significant: usize,
    pub ci_capture_count: usize,
    pub mean_diff: f64,
    pub significant_fraction: f64,
    pub capture_rate: f64,
}

/// A completed replication run.
pub struct MbiDance {
    result: DanceResult,
}

/// # Safety
/// `cfg` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mbi_dance_run(cfg: *const MbiDanceConfig, out: *mut *mut MbiDance) -> MbiStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let cfg = cfg.as_ref().ok_or_else(|| null_pointer("cfg"))?;
        let result = lift(mbi_core::simulate::run_dance(&DanceConfig::from(*cfg)))?;
        *out = Box::into_raw(Box::new(MbiDance { result }));
        Ok(())
    })
}

/// Number of records, or 0 for a null handle.
///
/// # Safety
/// `h` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn mbi_dance_len(h: *const MbiDance) -> usize {
    h.as_ref().map_or(0, |h| h.result.records.len())
}

/// Record `i`, counted from zero.
///
/// # Safety
/// `h` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mbi_dance_record(h: *const MbiDance, i: usize, out: *mut MbiDanceRecord) -> MbiStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null_pointer("handle"))?;
        let out = out_ref(out, "out")?;
        let r = h.result.records.get(i).ok_or_else(|| {
            fail(Error::InvalidInput(format!(
                "record {i} out of range for {} records",
                h.result.records.len()
            )))
        })?;
        *out = MbiDanceRecord {
            index: r.index,
            diff: r.diff,
            ci_low: r.ci_low,
            ci_high: r.ci_high,
            p_value: r.p_value,
            sig_category: r.sig_category.into(),
        };
        Ok(())
    })
}

/// # Safety
/// `h` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mbi_dance_summary(h: *const MbiDance, out: *mut MbiDanceSummary) -> MbiStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null_pointer("handle"))?;
        let out = out_ref(out, "out")?;
        let s = &h.result.summary;
        *out = MbiDanceSummary {
            n_experiments: s.n_experiments,
            count_significant: s.count_significant,
            ci_capture_count: s.ci_capture_count,
            mean_diff: s.mean_diff_of_diffs,
            significant_fraction: s.significant_fraction(),
            capture_rate: s.capture_rate(),
        };
        Ok(())
    })
}

/// The run as CSV. Release with `mbi_string_free`; null for a null handle.
///
/// # Safety
/// `h` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn mbi_dance_to_csv(h: *const MbiDance) -> *mut c_char {
    match h.as_ref() {
        Some(h) => CString::new(h.result.to_csv()).map_or(ptr::null_mut(), CString::into_raw),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `h` must come from `mbi_dance_run` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn mbi_dance_free(h: *mut MbiDance) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}
