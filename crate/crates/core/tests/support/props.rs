//! Property checks shared by the property tests and the acceptance run.
//! Each takes a case count and reports the first counterexample.

use std::sync::OnceLock;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use mbi_core::descriptive::{log_to_pct, summarize, Sample};
use mbi_core::effects::{compare_independent, ComparisonConfig, ComparisonResult, VarianceModel};
use mbi_core::mbi::{
    classify_magnitude, mbi_chances, qualitative_label, DescriptorLadder, MagnitudeScale, UnclearThresholds,
};
use mbi_core::report::{
    render_dance_svg, render_forest_svg, render_individuals_svg, render_json, render_table, table_cells, ReportBundle,
    SvgOptions, TableFormat,
};
use mbi_core::simulate::{false_discovery_rate, run_dance, DanceConfig, SigCategory};
use mbi_core::specfun::{reg_inc_beta, t_cdf, t_quantile};

use super::{bundle, check_geometry, class_attr, count_class};

pub type Check = fn(u32) -> Result<(), String>;

pub const MIN_CASES: u32 = 1000;

/// Every property, by name.
pub const ALL: &[(&str, Check)] = &[
    ("t_cdf symmetry", t_symmetry),
    ("t quantile round trip", t_round_trip),
    ("incomplete beta complement", beta_complement),
    ("summary shift equivariance", summary_shift),
    ("summary scale equivariance", summary_scale),
    ("percent back-transform", percent_back_transform),
    ("comparison exchange antisymmetry", exchange),
    ("comparison affine invariance", affine),
    ("CI nesting", ci_nesting),
    ("p-value at zero and monotone in |diff|", p_monotone),
    ("Welch df bound", welch_df),
    ("chance triplet sums to one", chance_sum),
    ("chance reflection", chance_reflection),
    ("chances monotone in effect", chance_monotone),
    ("dominant chance as se shrinks", chance_concentrates),
    ("qualitative label scale-free", label_scale_free),
    ("magnitude classification even and total", classify_even),
    ("significance bands partition p", sig_partition),
    ("false discovery rate monotone", fdr_monotone),
    ("dance determinism across thread counts", dance_threads),
    ("forest SVG well-formed, counted, in bounds", forest_svg),
    ("forest axis preserves order", forest_axis_order),
    ("dance SVG well-formed, counted, in bounds", dance_svg),
    ("individuals SVG well-formed, counted, in bounds", individuals_svg),
    ("table CSV round trip and JSON agreement", table_agreement),
];

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        max_global_rejects: cases * 20,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn check<S, F>(cases: u32, strategy: S, test: F) -> Result<(), String>
where
    S: Strategy,
    S::Value: std::fmt::Debug,
    F: Fn(S::Value) -> Result<(), TestCaseError>,
{
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

fn close(a: f64, b: f64, rel: f64, abs: f64) -> bool {
    (a - b).abs() <= abs + rel * a.abs().max(b.abs())
}

fn values(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50.0..50.0f64, len)
}

fn spread(v: &[f64]) -> bool {
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    hi - lo > 1e-3
}

fn cmp(a: &[f64], b: &[f64], model: VarianceModel, level: f64) -> ComparisonResult {
    let cfg = ComparisonConfig {
        variance_model: model,
        ..ComparisonConfig::default()
    }
    .with_ci_level(level)
    .unwrap();
    compare_independent(
        &Sample::new("a", a.to_vec()).unwrap(),
        &Sample::new("b", b.to_vec()).unwrap(),
        &cfg,
    )
    .unwrap()
}

fn model() -> impl Strategy<Value = VarianceModel> {
    prop_oneof![Just(VarianceModel::Welch), Just(VarianceModel::Pooled)]
}

fn df_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![
        prop::sample::select(vec![1.0, 2.0, 5.0, 10.0, 38.0, 100.0]),
        0.3..3000.0f64
    ]
}

pub fn t_symmetry(cases: u32) -> Result<(), String> {
    check(cases, (-60.0..60.0f64, df_strategy()), |(t, df)| {
        let s = t_cdf(t, df).unwrap() + t_cdf(-t, df).unwrap();
        prop_assert!((s - 1.0).abs() <= 1e-12, "sum {s}");
        Ok(())
    })
}

pub fn t_round_trip(cases: u32) -> Result<(), String> {
    check(cases, (0.001..0.999f64, df_strategy()), |(p, df)| {
        let q = t_quantile(p, df).unwrap();
        let back = t_cdf(q, df).unwrap();
        prop_assert!((back - p).abs() <= 1e-9, "q = {q}, F(q) = {back}");
        Ok(())
    })
}

pub fn beta_complement(cases: u32) -> Result<(), String> {
    check(cases, (0.05..60.0f64, 0.05..60.0f64, 0.0..=1.0f64), |(a, b, x)| {
        let s = reg_inc_beta(a, b, x).unwrap() + reg_inc_beta(b, a, 1.0 - x).unwrap();
        prop_assert!((s - 1.0).abs() <= 1e-12, "sum {s}");
        Ok(())
    })
}

pub fn summary_shift(cases: u32) -> Result<(), String> {
    check(cases, (values(2..40), -1e3..1e3f64), |(v, c)| {
        let s = summarize(&Sample::new("s", v.clone()).unwrap()).unwrap();
        let shifted: Vec<f64> = v.iter().map(|x| x + c).collect();
        let t = summarize(&Sample::new("s", shifted).unwrap()).unwrap();
        prop_assert!(close(t.mean, s.mean + c, 1e-12, 1e-10), "{} vs {}", t.mean, s.mean + c);
        prop_assert!(close(t.sd, s.sd, 1e-9, 1e-10), "{} vs {}", t.sd, s.sd);
        Ok(())
    })
}

pub fn summary_scale(cases: u32) -> Result<(), String> {
    check(cases, (values(2..40), 1e-3..1e3f64), |(v, c)| {
        let s = summarize(&Sample::new("s", v.clone()).unwrap()).unwrap();
        let scaled: Vec<f64> = v.iter().map(|x| x * c).collect();
        let t = summarize(&Sample::new("s", scaled).unwrap()).unwrap();
        prop_assert!(close(t.sd, c * s.sd, 1e-12, 0.0), "{} vs {}", t.sd, c * s.sd);
        prop_assert!(
            close(t.mean, c * s.mean, 1e-12, 1e-12 * c),
            "{} vs {}",
            t.mean,
            c * s.mean
        );
        Ok(())
    })
}

pub fn percent_back_transform(cases: u32) -> Result<(), String> {
    let strat = (prop::collection::vec(0.1..100.0f64, 2..20), -5.0..5.0f64, 1e-6..2.0f64);
    check(cases, strat, |(v, x, dx)| {
        prop_assert!(log_to_pct(x) < log_to_pct(x + dx));
        prop_assume!(spread(&v));
        let cfg = ComparisonConfig {
            use_log_scale: true,
            ..ComparisonConfig::default()
        };
        let s = Sample::new("s", v).unwrap();
        let r = compare_independent(&s, &s, &cfg).unwrap();
        prop_assert_eq!(r.pct_diff, Some(0.0));
        Ok(())
    })
}

pub fn exchange(cases: u32) -> Result<(), String> {
    check(cases, (values(2..25), values(2..25), model()), |(a, b, m)| {
        prop_assume!(spread(&a) && spread(&b));
        let ab = cmp(&a, &b, m, 0.9);
        let ba = cmp(&b, &a, m, 0.9);
        prop_assert_eq!(ab.diff, -ba.diff);
        prop_assert!(close(ab.effect_size, -ba.effect_size, 1e-12, 0.0));
        prop_assert!(
            close(ab.p_value, ba.p_value, 1e-12, 0.0),
            "{} vs {}",
            ab.p_value,
            ba.p_value
        );
        prop_assert!(close(ab.df, ba.df, 1e-12, 0.0));
        Ok(())
    })
}

pub fn affine(cases: u32) -> Result<(), String> {
    let strat = (values(2..25), values(2..25), -100.0..100.0f64, 0.01..100.0f64, model());
    check(cases, strat, |(a, b, c, k, m)| {
        prop_assume!(spread(&a) && spread(&b));
        let base = cmp(&a, &b, m, 0.9);
        let shift = |v: &[f64]| v.iter().map(|x| x + c).collect::<Vec<_>>();
        let scale = |v: &[f64]| v.iter().map(|x| x * k).collect::<Vec<_>>();
        let sh = cmp(&shift(&a), &shift(&b), m, 0.9);
        let sc = cmp(&scale(&a), &scale(&b), m, 0.9);
        for other in [&sh, &sc] {
            prop_assert!(close(other.effect_size, base.effect_size, 1e-8, 1e-10));
            prop_assert!(
                close(other.p_value, base.p_value, 1e-7, 1e-12),
                "{} vs {}",
                other.p_value,
                base.p_value
            );
        }
        let diff_tol = 1e-9 * (base.diff.abs() + base.se);
        prop_assert!(close(sh.diff, base.diff, 0.0, 10.0 * diff_tol + 1e-11));
        prop_assert!(close(sc.diff, k * base.diff, 1e-10, k * diff_tol));
        prop_assert!(close(sc.ci_low, k * base.ci_low, 1e-10, k * diff_tol));
        prop_assert!(close(sc.ci_high, k * base.ci_high, 1e-10, k * diff_tol));
        prop_assert!(close(sc.standardizer, k * base.standardizer, 1e-10, 0.0));
        Ok(())
    })
}

pub fn ci_nesting(cases: u32) -> Result<(), String> {
    check(cases, (values(2..25), values(2..25), model()), |(a, b, m)| {
        prop_assume!(spread(&a) && spread(&b));
        let r90 = cmp(&a, &b, m, 0.90);
        let r95 = cmp(&a, &b, m, 0.95);
        prop_assert!(r95.ci_low < r90.ci_low && r90.ci_high < r95.ci_high);
        prop_assert!(r95.es_ci_low < r90.es_ci_low && r90.es_ci_high < r95.es_ci_high);
        Ok(())
    })
}

pub fn p_monotone(cases: u32) -> Result<(), String> {
    check(
        cases,
        (values(2..25), model(), 0.0..4.0f64, 1.05..3.0f64),
        |(a, m, c1, r)| {
            prop_assume!(spread(&a));
            let same = cmp(&a, &a, m, 0.9);
            prop_assert_eq!(same.diff, 0.0);
            prop_assert_eq!(same.p_value, 1.0);
            // shift one copy further and further; the variances stay put
            let se = same.se;
            let shifted = |c: f64| a.iter().map(|x| x + c * se).collect::<Vec<_>>();
            let p1 = cmp(&a, &shifted(c1), m, 0.9).p_value;
            let p2 = cmp(&a, &shifted(c1 * r + 0.01), m, 0.9).p_value;
            prop_assert!(p2 < p1, "p({}) = {p1}, p({}) = {p2}", c1, c1 * r + 0.01);
            Ok(())
        },
    )
}

pub fn welch_df(cases: u32) -> Result<(), String> {
    check(cases, (values(2..25), values(2..25), -30.0..30.0f64), |(a, b, c)| {
        prop_assume!(spread(&a) && spread(&b));
        let r = cmp(&a, &b, VarianceModel::Welch, 0.9);
        let bound = (a.len() + b.len() - 2) as f64;
        prop_assert!(r.df <= bound + 1e-9, "df {} > {bound}", r.df);
        let twin: Vec<f64> = a.iter().map(|x| x + c).collect();
        let eq = cmp(&a, &twin, VarianceModel::Welch, 0.9);
        let full = (2 * a.len() - 2) as f64;
        prop_assert!((eq.df - full).abs() <= 1e-9, "df {} vs {full}", eq.df);
        Ok(())
    })
}

fn chance_inputs() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (-5.0..5.0f64, 0.01..5.0f64, 1.0..500.0f64, 0.01..2.0f64)
}

pub fn chance_sum(cases: u32) -> Result<(), String> {
    check(cases, chance_inputs(), |(e, se, df, swc)| {
        let c = mbi_chances(e, se, df, swc).unwrap();
        prop_assert!((c.sum() - 1.0).abs() <= 1e-12);
        prop_assert!(c.negative >= 0.0 && c.trivial >= 0.0 && c.positive >= 0.0);
        Ok(())
    })
}

pub fn chance_reflection(cases: u32) -> Result<(), String> {
    check(cases, chance_inputs(), |(e, se, df, swc)| {
        let c = mbi_chances(e, se, df, swc).unwrap();
        let r = mbi_chances(-e, se, df, swc).unwrap();
        prop_assert_eq!(c.positive, r.negative);
        prop_assert_eq!(c.negative, r.positive);
        prop_assert_eq!(c.trivial, r.trivial);
        Ok(())
    })
}

pub fn chance_monotone(cases: u32) -> Result<(), String> {
    check(cases, (chance_inputs(), 0.0..3.0f64), |((e, se, df, swc), step)| {
        let lo = mbi_chances(e, se, df, swc).unwrap();
        let hi = mbi_chances(e + step, se, df, swc).unwrap();
        prop_assert!(hi.positive >= lo.positive, "{} < {}", hi.positive, lo.positive);
        prop_assert!(hi.negative <= lo.negative, "{} > {}", hi.negative, lo.negative);
        Ok(())
    })
}

pub fn chance_concentrates(cases: u32) -> Result<(), String> {
    check(
        cases,
        (0.01..2.0f64, 1.02..5.0f64, any::<bool>(), 5.0..200.0f64),
        |(swc, ratio, neg, df)| {
            let e = if neg { -swc * ratio } else { swc * ratio };
            let gap = e.abs() - swc;
            let mut last = 0.0;
            for k in 0..6 {
                let se = gap / (5.0 * 2f64.powi(k));
                let c = mbi_chances(e, se, df, swc).unwrap();
                let dominant = if neg { c.negative } else { c.positive };
                prop_assert!(dominant >= last, "dominant chance fell: {dominant} < {last}");
                last = dominant;
            }
            prop_assert!(last > 1.0 - 1e-6, "dominant chance only {last}");
            Ok(())
        },
    )
}

pub fn label_scale_free(cases: u32) -> Result<(), String> {
    let ladder = DescriptorLadder::default();
    let unclear = UnclearThresholds::default();
    check(cases, (chance_inputs(), 1e-3..1e3f64), move |((e, se, df, swc), c)| {
        let base = mbi_chances(e, se, df, swc).unwrap();
        let scaled = mbi_chances(c * e, c * se, df, c * swc).unwrap();
        prop_assert!((base.positive - scaled.positive).abs() <= 1e-12);
        prop_assert!((base.negative - scaled.negative).abs() <= 1e-12);
        prop_assert!((base.trivial - scaled.trivial).abs() <= 1e-12);
        let q1 = qualitative_label(&base, &ladder, &unclear);
        let q2 = qualitative_label(&scaled, &ladder, &unclear);
        prop_assert_eq!(q1, q2);
        Ok(())
    })
}

pub fn classify_even(cases: u32) -> Result<(), String> {
    let scale = MagnitudeScale::default();
    let labels = scale.labels().to_vec();
    check(cases, -10.0..10.0f64, move |d| {
        let l = classify_magnitude(d, &scale);
        prop_assert_eq!(l, classify_magnitude(-d, &scale));
        prop_assert_eq!(labels.iter().filter(|x| *x == l).count(), 1);
        Ok(())
    })
}

pub fn sig_partition(cases: u32) -> Result<(), String> {
    let strat = prop_oneof![
        0.0..=1.0f64,
        prop::sample::select(vec![0.0, 0.001, 0.01, 0.05, 0.1, 1.0]),
        0.0..0.002f64
    ];
    check(cases, strat, |p| {
        let bands = [
            (SigCategory::Three, p < 0.001),
            (SigCategory::Two, (0.001..0.01).contains(&p)),
            (SigCategory::One, (0.01..0.05).contains(&p)),
            (SigCategory::Marginal, (0.05..0.10).contains(&p)),
            (SigCategory::NotSignificant, p >= 0.10),
        ];
        prop_assert_eq!(bands.iter().filter(|b| b.1).count(), 1);
        let expected = bands.iter().find(|b| b.1).unwrap().0;
        prop_assert_eq!(SigCategory::from_p(p), expected);
        Ok(())
    })
}

pub fn fdr_monotone(cases: u32) -> Result<(), String> {
    let strat = (0.01..0.98f64, 0.001..0.5f64, 0.01..0.98f64, 0.01..0.5f64);
    check(cases, strat, |(prior, alpha, power, step)| {
        let base = false_discovery_rate(prior, alpha, power).unwrap();
        let more_prior = false_discovery_rate((prior + step).min(1.0), alpha, power).unwrap();
        let more_power = false_discovery_rate(prior, alpha, (power + step).min(1.0)).unwrap();
        let more_alpha = false_discovery_rate(prior, (alpha + step).min(0.99), power).unwrap();
        prop_assert!(more_prior < base && more_power < base && more_alpha > base);
        Ok(())
    })
}

fn pools() -> &'static (rayon::ThreadPool, rayon::ThreadPool) {
    static POOLS: OnceLock<(rayon::ThreadPool, rayon::ThreadPool)> = OnceLock::new();
    POOLS.get_or_init(|| {
        let make = |n| rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
        (make(1), make(4))
    })
}

fn dance_cfg() -> impl Strategy<Value = DanceConfig> {
    (
        any::<u64>(),
        1usize..12,
        2usize..12,
        0.5..30.0f64,
        -20.0..20.0f64,
        model(),
    )
        .prop_map(|(seed, exps, n, sigma, delta, m)| DanceConfig {
            n_experiments: exps,
            n_per_group: n,
            sigma,
            delta_mu: delta,
            variance_model: m,
            ..DanceConfig::new(seed)
        })
}

pub fn dance_threads(cases: u32) -> Result<(), String> {
    let (one, four) = pools();
    check(cases, dance_cfg(), |cfg| {
        let a = one.install(|| run_dance(&cfg)).unwrap();
        let b = four.install(|| run_dance(&cfg)).unwrap();
        let c = run_dance(&cfg).unwrap();
        prop_assert_eq!(a.to_csv(), b.to_csv());
        prop_assert_eq!(&a, &c);
        Ok(())
    })
}

fn rows() -> impl Strategy<Value = Vec<(Vec<f64>, Vec<f64>)>> {
    prop::collection::vec((values(2..15), values(2..15), -40.0..40.0f64), 1..7).prop_map(|rows| {
        rows.into_iter()
            .map(|(a, b, shift)| (a, b.into_iter().map(|x| x + shift).collect()))
            .collect()
    })
}

fn all_spread(rows: &[(Vec<f64>, Vec<f64>)]) -> bool {
    rows.iter().all(|(a, b)| spread(a) && spread(b))
}

pub fn forest_svg(cases: u32) -> Result<(), String> {
    check(cases, rows(), |rows| {
        prop_assume!(all_spread(&rows));
        let b = bundle(&rows);
        let opts = SvgOptions::default();
        let svg = render_forest_svg(&b, &opts).unwrap();
        prop_assert_eq!(&svg, &render_forest_svg(&b, &opts).unwrap());
        check_geometry(&svg).map_err(TestCaseError::fail)?;
        let n = rows.len();
        for class in ["row-label", "ci-bar", "marker", "annotation"] {
            prop_assert_eq!(count_class(&svg, class), n, "class {}", class);
        }
        prop_assert_eq!(count_class(&svg, "band-boundary"), 2 * b.scale.thresholds().len());
        prop_assert_eq!(count_class(&svg, "band-label"), b.scale.labels().len());
        prop_assert_eq!(count_class(&svg, "zero-line"), 1);
        let height = opts.row_height * n as f64 + opts.extra_height;
        let attr = format!("height=\"{:.2}\"", height);
        prop_assert!(svg.contains(&attr), "missing {}", attr);
        Ok(())
    })
}

pub fn forest_axis_order(cases: u32) -> Result<(), String> {
    check(cases, rows(), |rows| {
        prop_assume!(all_spread(&rows));
        let b = bundle(&rows);
        let svg = render_forest_svg(&b, &SvgOptions::default()).unwrap();
        let xs = class_attr(&svg, "marker", "cx");
        let es: Vec<f64> = b.comparisons.iter().map(|c| c.result.effect_size).collect();
        for i in 0..es.len() {
            for j in 0..es.len() {
                // two-decimal pixel output can tie effects closer than 0.005 px
                if es[i] < es[j] {
                    prop_assert!(xs[i] <= xs[j], "d {} < {} but x {} > {}", es[i], es[j], xs[i], xs[j]);
                }
            }
        }
        let lows = class_attr(&svg, "ci-bar", "x1");
        let highs = class_attr(&svg, "ci-bar", "x2");
        for k in 0..es.len() {
            prop_assert!(lows[k] <= xs[k] && xs[k] <= highs[k]);
        }
        Ok(())
    })
}

pub fn dance_svg(cases: u32) -> Result<(), String> {
    check(cases, dance_cfg(), |cfg| {
        let result = run_dance(&cfg).unwrap();
        let svg = render_dance_svg(&result, &cfg, &SvgOptions::default()).unwrap();
        check_geometry(&svg).map_err(TestCaseError::fail)?;
        let n = cfg.n_experiments;
        for class in ["row-label", "ci-bar", "marker"] {
            prop_assert_eq!(count_class(&svg, class), n, "class {}", class);
        }
        let flagged = result
            .records
            .iter()
            .filter(|r| r.sig_category != SigCategory::NotSignificant)
            .count();
        prop_assert_eq!(count_class(&svg, "glyph"), flagged);
        prop_assert_eq!(count_class(&svg, "reference"), 1);
        Ok(())
    })
}

pub fn individuals_svg(cases: u32) -> Result<(), String> {
    let strat = prop::collection::vec(values(1..20), 1..6);
    check(cases, strat, |groups| {
        let samples: Vec<Sample> = groups
            .iter()
            .enumerate()
            .map(|(i, v)| Sample::new(format!("g{i}"), v.clone()).unwrap())
            .collect();
        let svg = render_individuals_svg(&samples, 0.95, &SvgOptions::default()).unwrap();
        check_geometry(&svg).map_err(TestCaseError::fail)?;
        let points: usize = groups.iter().map(Vec::len).sum();
        prop_assert_eq!(count_class(&svg, "point"), points);
        prop_assert_eq!(count_class(&svg, "whisker"), groups.len());
        prop_assert_eq!(count_class(&svg, "group-label"), groups.len());
        Ok(())
    })
}

pub fn table_agreement(cases: u32) -> Result<(), String> {
    check(cases, rows(), |rows| {
        prop_assume!(all_spread(&rows));
        let b = bundle(&rows);
        let csv_text = render_table(&b, TableFormat::Csv).unwrap();
        prop_assert_eq!(&csv_text, &render_table(&b, TableFormat::Csv).unwrap());
        let from_json = ReportBundle::from_json(&render_json(&b)).unwrap();
        prop_assert_eq!(&from_json, &b);
        let mut rdr = csv::Reader::from_reader(csv_text.as_bytes());
        prop_assert_eq!(rdr.headers().unwrap().len(), 6);
        let parsed: Vec<Vec<String>> = rdr
            .records()
            .map(|r| r.unwrap().iter().map(str::to_string).collect())
            .collect();
        prop_assert_eq!(parsed.len(), rows.len());
        for (row, entry) in parsed.iter().zip(&from_json.comparisons) {
            let cells = table_cells(entry, from_json.metadata.locale);
            prop_assert_eq!(row, &cells.to_vec());
        }
        Ok(())
    })
}
