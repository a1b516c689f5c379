//! Independent oracles and shared fixtures for the integration tests.
#![allow(dead_code)]

pub mod props;

use mbi_core::descriptive::{summarize, Sample};
use mbi_core::effects::{compare_independent, ComparisonConfig};
use mbi_core::mbi::{infer, MbiConfig};
use mbi_core::report::{AnalysisMetadata, BundleEntry, ReportBundle};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

extern "C" {
    #[link_name = "lgamma"]
    fn c_lgamma(x: f64) -> f64;
    #[link_name = "erfc"]
    fn c_erfc(x: f64) -> f64;
}

/// ln Γ from the platform C math library.
pub fn lgamma(x: f64) -> f64 {
    unsafe { c_lgamma(x) }
}

/// Standard normal CDF from the platform erfc.
pub fn phi(x: f64) -> f64 {
    0.5 * unsafe { c_erfc(-x / std::f64::consts::SQRT_2) }
}

/// Noncentral t CDF by integrating the normal CDF against the chi-square
/// density of the denominator.
pub fn nct_cdf_quad(t: f64, df: f64, ncp: f64) -> f64 {
    let ln_c = -0.5 * df * std::f64::consts::LN_2 - lgamma(0.5 * df);
    let f = |v: f64| {
        if v <= 0.0 {
            return 0.0;
        }
        let dens = (ln_c + (0.5 * df - 1.0) * v.ln() - 0.5 * v).exp();
        phi(t * (v / df).sqrt() - ncp) * dens
    };
    let hi = df + 40.0 * (2.0 * df).sqrt() + 80.0;
    let mut area = 0.0;
    let mut lo = 0.0;
    let step = hi / 64.0;
    while lo < hi {
        let next = (lo + step).min(hi);
        area += integrate(&f, lo, next, 1e-15);
        lo = next;
    }
    area
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Student t density with the normalizer from the C library's lgamma.
pub fn t_density(x: f64, df: f64) -> f64 {
    let ln_c = lgamma(0.5 * (df + 1.0)) - lgamma(0.5 * df) - 0.5 * (df * std::f64::consts::PI).ln();
    (ln_c - 0.5 * (df + 1.0) * (x * x / df).ln_1p()).exp()
}

/// t CDF by integrating the density from 0, split into unit panels.
pub fn t_cdf_quad(t: f64, df: f64) -> f64 {
    let f = |x: f64| t_density(x, df);
    let mut area = 0.0;
    let mut lo = 0.0;
    let hi = t.abs();
    while lo < hi {
        let next = (lo + 1.0).min(hi);
        area += integrate(&f, lo, next, 1e-15);
        lo = next;
    }
    if t >= 0.0 {
        0.5 + area
    } else {
        0.5 - area
    }
}

/// Upper-tail point by bisection on the quadrature CDF.
pub fn t_quantile_quad(p: f64, df: f64) -> f64 {
    let (mut lo, mut hi) = (-1e3, 1e3);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if t_cdf_quad(mid, df) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Regularized incomplete beta by quadrature of the beta density.
pub fn inc_beta_quad(a: f64, b: f64, x: f64) -> f64 {
    let ln_beta = lgamma(a) + lgamma(b) - lgamma(a + b);
    let f = |u: f64| {
        if u <= 0.0 || u >= 1.0 {
            0.0
        } else {
            ((a - 1.0) * u.ln() + (b - 1.0) * (1.0 - u).ln() - ln_beta).exp()
        }
    };
    integrate(&f, 0.0, x, 1e-15)
}

/// MBI chances from the quadrature CDF: (negative, trivial, positive).
pub fn chances_quad(effect: f64, se: f64, df: f64, swc: f64) -> (f64, f64, f64) {
    let pos = t_cdf_quad((effect - swc) / se, df);
    let neg = t_cdf_quad((-swc - effect) / se, df);
    (neg, 1.0 - pos - neg, pos)
}

pub struct McSummary {
    pub significant: usize,
    pub captured: usize,
    pub n: usize,
}

/// Replication experiments with an unrelated generator and a critical
/// value from the quadrature oracle.
pub fn mc_dance(seed: u64, experiments: usize, n: usize, sigma: f64, delta: f64, alpha: f64, level: f64) -> McSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pop = Normal::new(0.0, sigma).unwrap();
    let df = (2 * n - 2) as f64;
    let t_sig = t_quantile_quad(1.0 - 0.5 * alpha, df);
    let t_ci = t_quantile_quad(0.5 * (1.0 + level), df);
    let mut out = McSummary {
        significant: 0,
        captured: 0,
        n: experiments,
    };
    for _ in 0..experiments {
        let a: Vec<f64> = (0..n).map(|_| pop.sample(&mut rng)).collect();
        let b: Vec<f64> = (0..n).map(|_| delta + pop.sample(&mut rng)).collect();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let ss = |v: &[f64], m: f64| v.iter().map(|x| (x - m) * (x - m)).sum::<f64>();
        let (ma, mb) = (mean(&a), mean(&b));
        let sp2 = (ss(&a, ma) + ss(&b, mb)) / df;
        let se = (sp2 * 2.0 / n as f64).sqrt();
        let diff = mb - ma;
        if (diff / se).abs() > t_sig {
            out.significant += 1;
        }
        if (diff - delta).abs() <= t_ci * se {
            out.captured += 1;
        }
    }
    out
}

/// Two-sided binomial band: counts whose tails both exceed 2.5%.
pub fn binomial_band(n: u64, p: f64) -> (u64, u64) {
    let pmf = |k: u64| {
        let ln = lgamma(n as f64 + 1.0) - lgamma(k as f64 + 1.0) - lgamma((n - k) as f64 + 1.0)
            + k as f64 * p.ln()
            + (n - k) as f64 * (1.0 - p).ln();
        ln.exp()
    };
    let mut cdf = 0.0;
    let mut lo = 0;
    for k in 0..=n {
        cdf += pmf(k);
        if cdf >= 0.025 {
            lo = k;
            break;
        }
    }
    let mut sf = 0.0;
    let mut hi = n;
    for k in (0..=n).rev() {
        sf += pmf(k);
        if sf >= 0.025 {
            hi = k;
            break;
        }
    }
    (lo, hi)
}

pub fn entry(name: &str, a: &[f64], b: &[f64], cfg: &ComparisonConfig, mbi: &MbiConfig) -> BundleEntry {
    let sa = Sample::new("a", a.to_vec()).unwrap();
    let sb = Sample::new("b", b.to_vec()).unwrap();
    let result = compare_independent(&sa, &sb, cfg).unwrap();
    BundleEntry {
        name: name.to_string(),
        group_a: summarize(&sa).unwrap(),
        group_b: summarize(&sb).unwrap(),
        inference: infer(&result, mbi).unwrap(),
        result,
    }
}

pub fn bundle(rows: &[(Vec<f64>, Vec<f64>)]) -> ReportBundle {
    let mbi = MbiConfig::default();
    let cfg = ComparisonConfig::default();
    let mut b = ReportBundle::new(mbi.scale.clone(), mbi.ladder.clone(), AnalysisMetadata::default());
    for (i, (a, bb)) in rows.iter().enumerate() {
        b.push(entry(&format!("var {}", i + 1), a, bb, &cfg, &mbi)).unwrap();
    }
    b
}

/// The two groups behind the six-column table example.
pub fn table_fixture() -> ReportBundle {
    bundle(&[
        (
            vec![71.2, 68.4, 74.9, 70.1, 69.3, 72.8],
            vec![73.0, 75.6, 72.1, 77.4, 74.2, 76.0],
        ),
        (vec![12.1, 11.4, 12.8, 11.9, 12.5], vec![11.2, 11.0, 11.9, 11.4, 10.8]),
    ])
}

/// Markdown rendering of `table_fixture`.
pub const GOLDEN_MD: &str = "\
| Variable | Group 1 / Pre (mean±SD) | Group 2 / Post (mean±SD) | Mean difference; ±90% CI | % difference; ±90% CI | Effect size (90% CI) |
|---|---|---|---|---|---|
| var 1 | 71.12±2.40 | 74.72±1.98 | 3.60; ±2.31 |  | 1.63 (0.54 to 2.73) |
| var 2 | 12.14±0.54 | 11.26±0.42 | -0.88; ±0.58 |  | -1.81 (-3.05 to -0.58) |
";

/// CSV rendering of `table_fixture`.
pub const GOLDEN_CSV: &str = "\
Variable,Group 1 / Pre (mean±SD),Group 2 / Post (mean±SD),Mean difference; ±90% CI,% difference; ±90% CI,Effect size (90% CI)
var 1,71.12±2.40,74.72±1.98,3.60; ±2.31,,1.63 (0.54 to 2.73)
var 2,12.14±0.54,11.26±0.42,-0.88; ±0.58,,-1.81 (-3.05 to -0.58)
";

/// Parses an SVG and checks every coordinate against its viewBox. Returns
/// the number of coordinates checked.
pub fn check_geometry(svg: &str) -> Result<usize, String> {
    let doc = roxmltree::Document::parse(svg).map_err(|e| format!("not well-formed: {e}"))?;
    let root = doc.root_element();
    let vb: Vec<f64> = root
        .attribute("viewBox")
        .ok_or("missing viewBox")?
        .split_whitespace()
        .map(|v| v.parse().unwrap())
        .collect();
    let (x0, y0, w, h) = (vb[0], vb[1], vb[2], vb[3]);
    let inside_x = |v: f64| v >= x0 - 1e-9 && v <= x0 + w + 1e-9;
    let inside_y = |v: f64| v >= y0 - 1e-9 && v <= y0 + h + 1e-9;
    let num = |n: roxmltree::Node, a: &str| n.attribute(a).map(|v| v.parse::<f64>().unwrap());
    let mut checked = 0;
    for node in root.descendants().filter(|n| n.is_element()) {
        let name = node.tag_name().name();
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for a in ["x", "x1", "x2", "cx"] {
            xs.extend(num(node, a));
        }
        for a in ["y", "y1", "y2", "cy"] {
            ys.extend(num(node, a));
        }
        if name == "rect" {
            let (x, y) = (num(node, "x").unwrap(), num(node, "y").unwrap());
            xs.push(x + num(node, "width").unwrap());
            ys.push(y + num(node, "height").unwrap());
        }
        if name == "circle" {
            let (cx, cy, r) = (
                num(node, "cx").unwrap(),
                num(node, "cy").unwrap(),
                num(node, "r").unwrap(),
            );
            xs.extend([cx - r, cx + r]);
            ys.extend([cy - r, cy + r]);
        }
        if name == "path" {
            let coords: Vec<f64> = node
                .attribute("d")
                .unwrap()
                .split_whitespace()
                .filter_map(|t| t.parse().ok())
                .collect();
            for pair in coords.chunks(2) {
                xs.push(pair[0]);
                ys.push(pair[1]);
            }
        }
        for &x in &xs {
            if !inside_x(x) {
                return Err(format!(
                    "<{name} class={:?}> x = {x} outside viewBox",
                    node.attribute("class")
                ));
            }
        }
        for &y in &ys {
            if !inside_y(y) {
                return Err(format!(
                    "<{name} class={:?}> y = {y} outside viewBox",
                    node.attribute("class")
                ));
            }
        }
        checked += xs.len() + ys.len();
    }
    Ok(checked)
}

pub fn count_class(svg: &str, class: &str) -> usize {
    let doc = roxmltree::Document::parse(svg).unwrap();
    doc.descendants()
        .filter(|n| n.attribute("class") == Some(class))
        .count()
}

pub fn class_attr(svg: &str, class: &str, attr: &str) -> Vec<f64> {
    let doc = roxmltree::Document::parse(svg).unwrap();
    doc.descendants()
        .filter(|n| n.attribute("class") == Some(class))
        .map(|n| n.attribute(attr).unwrap().parse().unwrap())
        .collect()
}
