//! Special functions behind every interval, p-value and chance in the crate:
//! log-gamma, the regularized incomplete beta and gamma functions, and the
//! Student-t and standard normal distributions.
//!
//! Everything here is a pure function of its arguments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const LENTZ_MAX_ITER: usize = 300;
const LENTZ_EPS: f64 = 1e-15;
const NCT_MAX_ITER: usize = 5000;
const FPMIN: f64 = 1e-300;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Probability(f64);

impl Probability {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            Err(Error::domain(format!("probability {value} outside [0, 1]")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Probability {
    type Error = Error;
    fn try_from(value: f64) -> Result<Self> {
        Probability::new(value)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

/// Degrees of freedom of a t distribution. Non-integer values are allowed.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct DegreesOfFreedom(f64);

impl DegreesOfFreedom {
    pub fn new(value: f64) -> Result<Self> {
        check_df(value)?;
        Ok(DegreesOfFreedom(value))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for DegreesOfFreedom {
    type Error = Error;
    fn try_from(value: f64) -> Result<Self> {
        DegreesOfFreedom::new(value)
    }
}

impl From<DegreesOfFreedom> for f64 {
    fn from(df: DegreesOfFreedom) -> f64 {
        df.0
    }
}

fn check_df(df: f64) -> Result<()> {
    if df > 0.0 && !df.is_nan() {
        Ok(())
    } else {
        Err(Error::domain(format!("degrees of freedom must be positive, got {df}")))
    }
}

fn check_open_prob(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("probability {p} outside (0, 1)")))
    }
}

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural logarithm of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    Ok(ln_gamma_unchecked(x))
}

fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // reflection: Γ(x)Γ(1-x) = π / sin(πx)
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma_unchecked(1.0 - x);
    }
    if x >= 10.0 {
        return ln_gamma_stirling(x);
    }
    let z = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + acc.ln()
}

fn ln_gamma_stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // Bernoulli series, truncation error below 1e-12 for x >= 10
    let series =
        inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))));
    (x - 0.5) * x.ln() - x + LN_SQRT_2PI + series
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma_unchecked(a) + ln_gamma_unchecked(b) - ln_gamma_unchecked(a + b)
}

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn reg_inc_beta(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(a > 0.0) || !(b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::domain(format!(
            "reg_inc_beta requires a, b > 0, got a = {a}, b = {b}"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("reg_inc_beta requires x in [0, 1], got {x}")));
    }
    inc_beta(a, b, x, 1.0 - x)
}

/// `I_x(a, b)` with `y = 1 - x` supplied by the caller so that values of
/// `x` close to one keep their precision.
fn inc_beta(a: f64, b: f64, x: f64, y: f64) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    if y <= 0.0 {
        return Ok(1.0);
    }
    let ln_front = a * x.ln() + b * y.ln() - ln_beta(a, b);
    let front = ln_front.exp();
    let value = if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x)? / a
    } else {
        1.0 - front * beta_cf(b, a, y)? / b
    };
    Ok(value.clamp(0.0, 1.0))
}

/// Continued fraction for the incomplete beta, modified Lentz iteration.
fn beta_cf(a: f64, b: f64, x: f64) -> Result<f64> {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=LENTZ_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;

        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;

        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < LENTZ_EPS {
            return Ok(h);
        }
    }
    Err(Error::NoConvergence {
        routine: "incomplete beta continued fraction",
        iterations: LENTZ_MAX_ITER,
    })
}

/// Upper regularized incomplete gamma `Q(a, x)`, used for `erfc`.
fn upper_inc_gamma(a: f64, x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Ok(1.0);
    }
    let ln_front = -x + a * x.ln() - ln_gamma_unchecked(a);
    if x < a + 1.0 {
        // series for P(a, x)
        let mut ap = a;
        let mut term = 1.0 / a;
        let mut sum = term;
        for _ in 0..LENTZ_MAX_ITER {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * LENTZ_EPS {
                return Ok(1.0 - sum * ln_front.exp());
            }
        }
        Err(Error::NoConvergence {
            routine: "incomplete gamma series",
            iterations: LENTZ_MAX_ITER,
        })
    } else {
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / FPMIN;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..=LENTZ_MAX_ITER {
            let i = i as f64;
            let an = -i * (i - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < FPMIN {
                d = FPMIN;
            }
            c = b + an / c;
            if c.abs() < FPMIN {
                c = FPMIN;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < LENTZ_EPS {
                return Ok(ln_front.exp() * h);
            }
        }
        Err(Error::NoConvergence {
            routine: "incomplete gamma continued fraction",
            iterations: LENTZ_MAX_ITER,
        })
    }
}

/// Complementary error function for `x >= 0`.
fn erfc_nonneg(x: f64) -> Result<f64> {
    upper_inc_gamma(0.5, x * x)
}

/// Standard normal upper tail `P(Z > z)` for `z >= 0`.
fn norm_upper(z: f64) -> Result<f64> {
    Ok(0.5 * erfc_nonneg(z / std::f64::consts::SQRT_2)?)
}

/// Standard normal CDF.
pub fn norm_cdf(z: f64) -> Result<f64> {
    if z.is_nan() {
        return Err(Error::domain("norm_cdf of NaN"));
    }
    if z.is_infinite() {
        return Ok(if z > 0.0 { 1.0 } else { 0.0 });
    }
    if z < 0.0 {
        norm_upper(-z)
    } else {
        Ok(1.0 - norm_upper(z)?)
    }
}

pub fn norm_pdf(z: f64) -> f64 {
    (-0.5 * z * z - LN_SQRT_2PI).exp()
}

/// Standard normal quantile.
pub fn norm_quantile(p: f64) -> Result<f64> {
    check_open_prob(p)?;
    if p == 0.5 {
        return Ok(0.0);
    }
    let tail = p.min(1.0 - p);
    let z = invert_upper_tail(tail, initial_normal_guess(tail), norm_upper, norm_pdf)?;
    Ok(if p > 0.5 { z } else { -z })
}

/// Student-t density.
pub fn t_pdf(t: f64, df: f64) -> Result<f64> {
    check_df(df)?;
    Ok(t_pdf_unchecked(t, df))
}

fn t_pdf_unchecked(t: f64, df: f64) -> f64 {
    let ln_norm =
        ln_gamma_unchecked(0.5 * (df + 1.0)) - ln_gamma_unchecked(0.5 * df) - 0.5 * (df * std::f64::consts::PI).ln();
    (ln_norm - 0.5 * (df + 1.0) * (t * t / df).ln_1p()).exp()
}

/// Student-t upper tail `P(T > t)` for `t >= 0`.
fn t_upper(t: f64, df: f64) -> Result<f64> {
    let t2 = t * t;
    if t2.is_infinite() {
        return Ok(0.0);
    }
    let x = df / (df + t2);
    let y = t2 / (df + t2);
    Ok(0.5 * inc_beta(0.5 * df, 0.5, x, y)?)
}

/// Student-t CDF `P(T <= t)` with `df` degrees of freedom.
pub fn t_cdf(t: f64, df: f64) -> Result<f64> {
    check_df(df)?;
    if t.is_nan() {
        return Err(Error::domain("t_cdf of NaN"));
    }
    if t == 0.0 {
        return Ok(0.5);
    }
    let upper = t_upper(t.abs(), df)?;
    Ok(if t > 0.0 { 1.0 - upper } else { upper })
}

/// Student-t quantile: the `t` with `t_cdf(t, df) = p`.
pub fn t_quantile(p: f64, df: f64) -> Result<f64> {
    check_open_prob(p)?;
    check_df(df)?;
    if p == 0.5 {
        return Ok(0.0);
    }
    let tail = p.min(1.0 - p);
    let t = invert_upper_tail(
        tail,
        initial_normal_guess(tail),
        |t| t_upper(t, df),
        |t| t_pdf_unchecked(t, df),
    )?;
    Ok(if p > 0.5 { t } else { -t })
}

/// Noncentral Student-t CDF `P(T <= t)` with noncentrality `ncp`, by the
/// Poisson-weighted incomplete-beta series (Lenth's AS 243).
pub fn nct_cdf(t: f64, df: f64, ncp: f64) -> Result<f64> {
    check_df(df)?;
    if t.is_nan() || !ncp.is_finite() {
        return Err(Error::domain(format!(
            "nct_cdf needs finite ncp and non-NaN t, got t = {t}, ncp = {ncp}"
        )));
    }
    if ncp == 0.0 {
        return t_cdf(t, df);
    }
    if t.is_infinite() {
        return Ok(if t > 0.0 { 1.0 } else { 0.0 });
    }
    let (tt, del, negate) = if t >= 0.0 { (t, ncp, false) } else { (-t, -ncp, true) };
    let mut tnc = 0.0;
    if tt > 0.0 {
        let lambda = del * del;
        let mut p = 0.5 * (-0.5 * lambda).exp();
        if p == 0.0 {
            // Poisson weights underflow; fall back to the normal approximation
            let z = (tt * (1.0 - 0.25 / df) - del) / (1.0 + 0.5 * tt * tt / df).sqrt();
            let v = norm_cdf(z)?;
            return Ok(if negate { 1.0 - v } else { v });
        }
        let mut q = (2.0 / std::f64::consts::PI).sqrt() * p * del;
        let mut s = -0.5 * (-0.5 * lambda).exp_m1();
        let x = tt * tt / (tt * tt + df);
        let y = df / (tt * tt + df);
        let mut a = 0.5;
        let b = 0.5 * df;
        let rxb = y.powf(b);
        let ln_front = ln_gamma_unchecked(a + b) - ln_gamma_unchecked(a) - ln_gamma_unchecked(b);
        let mut xodd = inc_beta(a, b, x, y)?;
        let mut godd = 2.0 * rxb * (a * x.ln() + ln_front).exp();
        let mut xeven = if b * x < f64::EPSILON { b * x } else { 1.0 - rxb };
        let mut geven = b * x * rxb;
        tnc = p * xodd + q * xeven;
        let mut converged = false;
        for en in 1..=NCT_MAX_ITER {
            let en = en as f64;
            a += 1.0;
            xodd -= godd;
            xeven -= geven;
            godd *= x * (a + b - 1.0) / a;
            geven *= x * (a + b - 0.5) / (a + 0.5);
            p *= lambda / (2.0 * en);
            q *= lambda / (2.0 * en + 1.0);
            s -= p;
            tnc += p * xodd + q * xeven;
            if (2.0 * s * (xodd - godd)).abs() <= 1e-14 && en > 0.5 * lambda {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence {
                routine: "noncentral t series",
                iterations: NCT_MAX_ITER,
            });
        }
    }
    tnc += norm_cdf(-del)?;
    let v = tnc.clamp(0.0, 1.0);
    Ok(if negate { 1.0 - v } else { v })
}

/// Rational approximation to the normal upper-tail quantile, used only as
/// a starting point (absolute error about 4.5e-4).
fn initial_normal_guess(tail: f64) -> f64 {
    let s = (-2.0 * tail.ln()).sqrt();
    let num = 2.515_517 + s * (0.802_853 + s * 0.010_328);
    let den = 1.0 + s * (1.432_788 + s * (0.189_269 + s * 0.001_308));
    (s - num / den).max(0.0)
}

/// Solves `upper(t) = target` for `t >= 0`, where `upper` is a decreasing
/// upper-tail function with density `pdf`. Brackets by doubling, then runs
/// Newton steps, falling back to bisection when a step leaves the bracket.
fn invert_upper_tail<U, D>(target: f64, guess: f64, upper: U, pdf: D) -> Result<f64>
where
    U: Fn(f64) -> Result<f64>,
    D: Fn(f64) -> f64,
{
    const MAX_ITER: usize = 200;

    let mut lo = 0.0_f64;
    let mut hi = guess.max(1.0);
    let mut doublings = 0;
    while upper(hi)? > target {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 1100 {
            return Err(Error::NoConvergence {
                routine: "quantile bracketing",
                iterations: doublings,
            });
        }
    }

    let mut t = if guess > lo && guess < hi {
        guess
    } else {
        0.5 * (lo + hi)
    };
    for _ in 0..MAX_ITER {
        // f is increasing in t
        let f = target - upper(t)?;
        if f == 0.0 {
            return Ok(t);
        }
        if f > 0.0 {
            hi = t;
        } else {
            lo = t;
        }
        let density = pdf(t);
        let mut next = t - f / density;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - t).abs() <= 4.0 * f64::EPSILON * t.abs().max(1e-300) {
            return Ok(next);
        }
        t = next;
        if hi - lo <= 2.0 * f64::EPSILON * hi {
            return Ok(t);
        }
    }
    Err(Error::NoConvergence {
        routine: "quantile refinement",
        iterations: MAX_ITER,
    })
}
