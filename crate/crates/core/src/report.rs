//! Tables, SVG figures and JSON for analysis results.
//!
//! Every renderer is a pure function of its input: identical bundles give
//! byte-identical documents. Numbers always use `.` as the decimal point;
//! the locale only changes words.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::descriptive::{Sample, SampleSummary};
use crate::effects::{ComparisonResult, PairedStandardizer, VarianceModel};
use crate::error::{Error, Result};
use crate::mbi::{round_sig, DescriptorLadder, Locale, MagnitudeScale, MbiInference, Swc, UnclearThresholds};
use crate::simulate::{DanceConfig, DanceResult};
use crate::specfun::t_quantile;

/// Options echoed into every report so a document can be reproduced from
/// its own contents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisMetadata {
    pub ci_level: f64,
    pub swc: Swc,
    pub variance_model: VarianceModel,
    pub paired_standardizer: PairedStandardizer,
    pub log_scale: bool,
    /// Base of the log pathway; percent effects are `100 (e^x - 1)`.
    pub log_base: String,
    pub unclear: UnclearThresholds,
    pub locale: Locale,
    pub generator: String,
}

impl Default for AnalysisMetadata {
    fn default() -> Self {
        AnalysisMetadata {
            ci_level: 0.90,
            swc: Swc::default(),
            variance_model: VarianceModel::default(),
            paired_standardizer: PairedStandardizer::default(),
            log_scale: false,
            log_base: "e".into(),
            unclear: UnclearThresholds::default(),
            locale: Locale::En,
            generator: concat!("mbi-core ", env!("CARGO_PKG_VERSION")).into(),
        }
    }
}

/// One row of a report: a named comparison with both group summaries in
/// measurement units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleEntry {
    pub name: String,
    pub group_a: SampleSummary,
    pub group_b: SampleSummary,
    pub result: ComparisonResult,
    pub inference: MbiInference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub comparisons: Vec<BundleEntry>,
    pub scale: MagnitudeScale,
    pub ladder: DescriptorLadder,
    pub metadata: AnalysisMetadata,
}

impl ReportBundle {
    pub fn new(scale: MagnitudeScale, ladder: DescriptorLadder, metadata: AnalysisMetadata) -> Self {
        ReportBundle {
            comparisons: Vec::new(),
            scale,
            ladder,
            metadata,
        }
    }

    /// Appends a comparison; names must be unique. Insertion order is kept.
    pub fn push(&mut self, entry: BundleEntry) -> Result<()> {
        if self.comparisons.iter().any(|c| c.name == entry.name) {
            return Err(Error::DuplicateName(entry.name));
        }
        self.comparisons.push(entry);
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for c in &self.comparisons {
            if !seen.insert(c.name.as_str()) {
                return Err(Error::DuplicateName(c.name.clone()));
            }
        }
        self.ladder.validate()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let bundle: ReportBundle =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("bundle JSON: {e}")))?;
        bundle.validate()?;
        Ok(bundle)
    }

    fn ensure_nonempty(&self) -> Result<()> {
        if self.comparisons.is_empty() {
            Err(Error::Empty("report bundle has no comparisons".into()))
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Markdown,
    Csv,
}

/// Fixed-point formatting that never prints a negative zero.
pub fn fmt_fixed(x: f64, decimals: usize) -> String {
    let s = format!("{x:.decimals$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// A chance as a percentage with two significant figures.
pub fn fmt_chance(p: f64) -> String {
    let v = round_sig(p * 100.0, 2);
    if v == 0.0 {
        return "0".into();
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (1 - magnitude).max(0) as usize;
    fmt_fixed(v, decimals)
}

fn fmt_level(level: f64) -> String {
    let s = fmt_fixed(level * 100.0, 1);
    s.strip_suffix(".0").map(str::to_string).unwrap_or(s)
}

fn table_header(locale: Locale, ci_level: f64) -> [String; 6] {
    let lvl = fmt_level(ci_level);
    match locale {
        Locale::En => [
            "Variable".into(),
            "Group 1 / Pre (mean±SD)".into(),
            "Group 2 / Post (mean±SD)".into(),
            format!("Mean difference; ±{lvl}% CI"),
            format!("% difference; ±{lvl}% CI"),
            format!("Effect size ({lvl}% CI)"),
        ],
        Locale::Pt => [
            "Variável".into(),
            "Grupo 1 ou Res. Pré (Média±DP)".into(),
            "Grupo 2 ou Res. Pós (Média±DP)".into(),
            format!("Dif. entre as médias; ±IC {lvl}%"),
            format!("%Dif; ±%IC {lvl}%"),
            format!("Tamanho do efeito (IC {lvl}%)"),
        ],
    }
}

/// The six cells of one table row.
pub fn table_cells(entry: &BundleEntry, locale: Locale) -> [String; 6] {
    let r = &entry.result;
    let summary = |s: &SampleSummary| format!("{}±{}", fmt_fixed(s.mean, 2), fmt_fixed(s.sd, 2));
    let pct = match (r.pct_diff, r.pct_ci_low, r.pct_ci_high) {
        (Some(p), Some(lo), Some(hi)) => {
            format!("{}%; ±{}%", fmt_fixed(p, 1), fmt_fixed(0.5 * (hi - lo), 1))
        }
        _ => String::new(),
    };
    let to = match locale {
        Locale::En => "to",
        Locale::Pt => "a",
    };
    [
        entry.name.clone(),
        summary(&entry.group_a),
        summary(&entry.group_b),
        format!("{}; ±{}", fmt_fixed(r.diff, 2), fmt_fixed(r.ci_halfwidth(), 2)),
        pct,
        format!(
            "{} ({} {to} {})",
            fmt_fixed(r.effect_size, 2),
            fmt_fixed(r.es_ci_low, 2),
            fmt_fixed(r.es_ci_high, 2)
        ),
    ]
}

fn md_escape(cell: &str) -> String {
    cell.replace('|', "\\|")
}

/// Six-column table: variable, both group summaries, difference with its
/// interval half-width, percent difference (blank off the log pathway) and
/// effect size with its interval.
pub fn render_table(bundle: &ReportBundle, format: TableFormat) -> Result<String> {
    bundle.ensure_nonempty()?;
    let locale = bundle.metadata.locale;
    let header = table_header(locale, bundle.metadata.ci_level);
    let rows: Vec<[String; 6]> = bundle.comparisons.iter().map(|e| table_cells(e, locale)).collect();
    match format {
        TableFormat::Markdown => {
            let mut out = String::new();
            let line = |cells: &[String]| {
                let escaped: Vec<String> = cells.iter().map(|c| md_escape(c)).collect();
                format!("| {} |\n", escaped.join(" | "))
            };
            out.push_str(&line(&header));
            out.push_str(&format!("|{}\n", "---|".repeat(6)));
            for row in &rows {
                out.push_str(&line(row));
            }
            Ok(out)
        }
        TableFormat::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            let csv_err = |e: csv::Error| Error::InvalidInput(format!("csv: {e}"));
            w.write_record(&header).map_err(csv_err)?;
            for row in &rows {
                w.write_record(row).map_err(csv_err)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}

pub fn render_json(bundle: &ReportBundle) -> String {
    bundle.to_json()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvgOptions {
    pub width: f64,
    pub row_height: f64,
    /// Height added to `row_height · rows` for titles and axes.
    pub extra_height: f64,
    pub font_size: f64,
    pub locale: Locale,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            width: 900.0,
            row_height: 60.0,
            extra_height: 120.0,
            font_size: 12.0,
            locale: Locale::En,
        }
    }
}

impl SvgOptions {
    fn validate(&self) -> Result<()> {
        if self.width < 400.0 || self.row_height <= 0.0 || self.extra_height < 100.0 || self.font_size <= 0.0 {
            return Err(Error::InvalidConfig(
                "svg canvas needs width >= 400, extra height >= 100 and positive row height and font size".into(),
            ));
        }
        Ok(())
    }

    fn canvas_height(&self, rows: usize) -> f64 {
        self.row_height * rows as f64 + self.extra_height
    }
}

pub fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn n2(x: f64) -> String {
    fmt_fixed(x, 2)
}

/// Minimal SVG writer.
struct Svg {
    buf: String,
}

impl Svg {
    fn new(width: f64, height: f64, font_size: f64) -> Self {
        let mut buf = String::new();
        buf.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = writeln!(
            buf,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\" font-size=\"{f}\">",
            w = n2(width),
            h = n2(height),
            f = n2(font_size)
        );
        Svg { buf }
    }

    fn metadata(&mut self, json: &str) {
        let _ = writeln!(self.buf, "<metadata>{}</metadata>", xml_escape(json));
    }

    fn line(&mut self, class: &str, x1: f64, y1: f64, x2: f64, y2: f64, style: &str) {
        let _ = writeln!(
            self.buf,
            "<line class=\"{class}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" {style}/>",
            n2(x1),
            n2(y1),
            n2(x2),
            n2(y2)
        );
    }

    fn rect(&mut self, class: &str, x: f64, y: f64, w: f64, h: f64, fill: &str) {
        let _ = writeln!(
            self.buf,
            "<rect class=\"{class}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{fill}\"/>",
            n2(x),
            n2(y),
            n2(w.max(0.0)),
            n2(h.max(0.0))
        );
    }

    fn circle(&mut self, class: &str, cx: f64, cy: f64, r: f64, fill: &str) {
        let _ = writeln!(
            self.buf,
            "<circle class=\"{class}\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{fill}\"/>",
            n2(cx),
            n2(cy),
            n2(r)
        );
    }

    fn text(&mut self, class: &str, x: f64, y: f64, anchor: &str, content: &str) {
        let _ = writeln!(
            self.buf,
            "<text class=\"{class}\" x=\"{}\" y=\"{}\" text-anchor=\"{anchor}\">{}</text>",
            n2(x),
            n2(y),
            xml_escape(content)
        );
    }

    fn path(&mut self, class: &str, d: &str, style: &str) {
        let _ = writeln!(self.buf, "<path class=\"{class}\" d=\"{d}\" {style}/>");
    }

    fn finish(mut self) -> String {
        self.buf.push_str("</svg>\n");
        self.buf
    }
}

/// Affine map from data values to pixels.
#[derive(Debug, Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
    p0: f64,
    p1: f64,
}

impl Axis {
    fn map(&self, v: f64) -> f64 {
        self.p0 + (v - self.lo) / (self.hi - self.lo) * (self.p1 - self.p0)
    }
}

/// Tick step giving at most ten ticks over `span`.
fn tick_step(span: f64) -> f64 {
    let raw = span / 10.0;
    let base = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * base)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * base)
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = tick_step(hi - lo);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn tick_label(v: f64, step: f64) -> String {
    let decimals = if step >= 1.0 {
        0
    } else {
        (-step.log10().floor()) as usize
    };
    fmt_fixed(v, decimals)
}

fn horizontal_axis(svg: &mut Svg, axis: &Axis, y: f64, title: &str, font: f64) {
    svg.line("axis", axis.p0, y, axis.p1, y, "stroke=\"#000\"");
    let step = tick_step(axis.hi - axis.lo);
    for t in ticks(axis.lo, axis.hi) {
        let x = axis.map(t);
        svg.line("tick", x, y, x, y + 5.0, "stroke=\"#000\"");
        svg.text("tick-label", x, y + 6.0 + font, "middle", &tick_label(t, step));
    }
    svg.text(
        "axis-title",
        0.5 * (axis.p0 + axis.p1),
        y + 12.0 + 2.0 * font,
        "middle",
        title,
    );
}

/// Horizontal forest plot of standardized effects over shaded magnitude
/// bands, one row per comparison with its chance triplet and descriptor.
pub fn render_forest_svg(bundle: &ReportBundle, opts: &SvgOptions) -> Result<String> {
    bundle.ensure_nonempty()?;
    opts.validate()?;
    let rows = bundle.comparisons.len();
    let width = opts.width;
    let height = opts.canvas_height(rows);
    let font = opts.font_size;
    let top = 50.0;
    let plot_bottom = top + opts.row_height * rows as f64;
    let left = 0.2 * width;
    let right = width - 0.33 * width;

    let thresholds = bundle.scale.thresholds();
    let last = *thresholds.last().expect("scale has thresholds");
    let extent = bundle
        .comparisons
        .iter()
        .flat_map(|c| [c.result.effect_size, c.result.es_ci_low, c.result.es_ci_high])
        .fold(last * 1.25, |m, v| m.max(v.abs()));
    let extent = (extent * 2.0).ceil() / 2.0;
    let axis = Axis {
        lo: -extent,
        hi: extent,
        p0: left,
        p1: right,
    };

    let mut svg = Svg::new(width, height, font);
    svg.metadata(&serde_json::to_string(&bundle.metadata).expect("metadata serializes"));

    // bands: index 0 is the central band, higher indices mirror outward
    let fills = ["#f0f0f0", "#e0e0e0"];
    let mut edges = vec![0.0];
    edges.extend_from_slice(thresholds);
    edges.push(extent);
    for k in 0..edges.len() - 1 {
        let (a, b) = (edges[k], edges[k + 1]);
        let fill = fills[k % 2];
        if k == 0 {
            svg.rect(
                "band",
                axis.map(-b),
                top,
                axis.map(b) - axis.map(-b),
                plot_bottom - top,
                fill,
            );
        } else {
            svg.rect(
                "band",
                axis.map(a),
                top,
                axis.map(b) - axis.map(a),
                plot_bottom - top,
                fill,
            );
            svg.rect(
                "band",
                axis.map(-b),
                top,
                axis.map(-a) - axis.map(-b),
                plot_bottom - top,
                fill,
            );
        }
        let label = &bundle.scale.labels()[k];
        let cx = if k == 0 { axis.map(0.0) } else { axis.map(0.5 * (a + b)) };
        let y = top - 8.0 - if k % 2 == 1 { font } else { 0.0 };
        svg.text("band-label", cx, y, "middle", label);
    }
    for &t in thresholds {
        for x in [axis.map(-t), axis.map(t)] {
            svg.line(
                "band-boundary",
                x,
                top,
                x,
                plot_bottom,
                "stroke=\"#999\" stroke-dasharray=\"4 3\"",
            );
        }
    }
    svg.line(
        "zero-line",
        axis.map(0.0),
        top,
        axis.map(0.0),
        plot_bottom,
        "stroke=\"#000\"",
    );

    for (i, entry) in bundle.comparisons.iter().enumerate() {
        let y = top + opts.row_height * (i as f64 + 0.5);
        let r = &entry.result;
        svg.text("row-label", 8.0, y + 0.35 * font, "start", &entry.name);
        svg.line(
            "ci-bar",
            axis.map(r.es_ci_low),
            y,
            axis.map(r.es_ci_high),
            y,
            "stroke=\"#000\" stroke-width=\"2\"",
        );
        svg.circle("marker", axis.map(r.effect_size), y, 5.0, "#000");
        let inf = &entry.inference;
        let note = format!(
            "{}/{}/{} — {}",
            fmt_chance(inf.p_negative),
            fmt_chance(inf.p_trivial),
            fmt_chance(inf.p_positive),
            inf.descriptor
        );
        svg.text("annotation", right + 10.0, y + 0.35 * font, "start", &note);
    }

    let title = match opts.locale {
        Locale::En => "Standardized effect size (Cohen's d)",
        Locale::Pt => "Tamanho do efeito (unidades estandardizadas)",
    };
    horizontal_axis(&mut svg, &axis, plot_bottom + 10.0, title, font);
    let header = match opts.locale {
        Locale::En => "Chances (%) negative/trivial/positive",
        Locale::Pt => "Chances (%) negativo/trivial/positivo",
    };
    svg.text("annotation-header", right + 10.0, top - 8.0, "start", header);
    Ok(svg.finish())
}

/// Stacked interval plot of a replication run: one numbered row per
/// experiment, a reference line at the true difference and a glyph for the
/// p-value band.
pub fn render_dance_svg(result: &DanceResult, cfg: &DanceConfig, opts: &SvgOptions) -> Result<String> {
    if result.records.is_empty() {
        return Err(Error::Empty("dance result has no experiments".into()));
    }
    opts.validate()?;
    let rows = result.records.len();
    let width = opts.width;
    let height = opts.canvas_height(rows);
    let font = opts.font_size;
    let top = 40.0;
    let plot_bottom = top + opts.row_height * rows as f64;

    let (mut lo, mut hi) = (cfg.delta_mu.min(0.0), cfg.delta_mu.max(0.0));
    for r in &result.records {
        lo = lo.min(r.ci_low);
        hi = hi.max(r.ci_high);
    }
    let pad = 0.05 * (hi - lo).max(1e-9);
    let axis = Axis {
        lo: lo - pad,
        hi: hi + pad,
        p0: 60.0,
        p1: width - 80.0,
    };

    let mut svg = Svg::new(width, height, font);
    svg.metadata(&serde_json::to_string(cfg).expect("config serializes"));
    svg.line(
        "zero-line",
        axis.map(0.0),
        top,
        axis.map(0.0),
        plot_bottom,
        "stroke=\"#999\"",
    );
    svg.line(
        "reference",
        axis.map(cfg.delta_mu),
        top,
        axis.map(cfg.delta_mu),
        plot_bottom,
        "stroke=\"#c00\" stroke-dasharray=\"6 3\"",
    );
    for (i, r) in result.records.iter().enumerate() {
        let y = top + opts.row_height * (i as f64 + 0.5);
        svg.text("row-label", 40.0, y + 0.35 * font, "end", &r.index.to_string());
        svg.line(
            "ci-bar",
            axis.map(r.ci_low),
            y,
            axis.map(r.ci_high),
            y,
            "stroke=\"#000\" stroke-width=\"2\"",
        );
        svg.circle("marker", axis.map(r.diff), y, 4.0, "#000");
        let glyph = r.sig_category.glyph();
        if !glyph.is_empty() {
            svg.text("glyph", width - 70.0, y + 0.35 * font, "start", glyph);
        }
    }
    let title = match opts.locale {
        Locale::En => "Difference between means",
        Locale::Pt => "Diferença entre as médias",
    };
    horizontal_axis(&mut svg, &axis, plot_bottom + 10.0, title, font);
    Ok(svg.finish())
}

fn jitter(i: usize) -> f64 {
    (((i * 7) % 9) as f64 - 4.0) * 2.5
}

/// Individual values per group, deterministically jittered, each column
/// paired with a mean ± CI whisker. Groups of one value get a zero-height
/// whisker.
pub fn render_individuals_svg(samples: &[Sample], ci_level: f64, opts: &SvgOptions) -> Result<String> {
    if samples.is_empty() {
        return Err(Error::Empty("no groups to plot".into()));
    }
    if let Some(s) = samples.iter().find(|s| s.is_empty()) {
        return Err(Error::Empty(format!("group '{}' has no values", s.label())));
    }
    if !(ci_level > 0.0 && ci_level < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "ci level must lie in (0, 1), got {ci_level}"
        )));
    }
    opts.validate()?;

    struct Column {
        mean: f64,
        low: f64,
        high: f64,
    }
    let mut columns = Vec::with_capacity(samples.len());
    for s in samples {
        let v = s.values();
        let n = v.len();
        let mean = v.iter().sum::<f64>() / n as f64;
        let half = if n >= 2 {
            let sum = crate::descriptive::summarize(s)?;
            t_quantile(0.5 * (1.0 + ci_level), (n - 1) as f64)? * sum.sem
        } else {
            0.0
        };
        columns.push(Column {
            mean,
            low: mean - half,
            high: mean + half,
        });
    }

    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (s, c) in samples.iter().zip(&columns) {
        for &v in s.values() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        lo = lo.min(c.low);
        hi = hi.max(c.high);
    }
    if hi - lo < 1e-12 {
        lo -= 1.0;
        hi += 1.0;
    }
    let pad = 0.05 * (hi - lo);

    let width = opts.width;
    let height = opts.canvas_height(8);
    let font = opts.font_size;
    let top = 30.0;
    let bottom = height - 60.0;
    // vertical axis: larger values higher up
    let axis = Axis {
        lo: lo - pad,
        hi: hi + pad,
        p0: bottom,
        p1: top,
    };
    let left = 80.0;
    let col_w = (width - left - 20.0) / samples.len() as f64;

    let mut svg = Svg::new(width, height, font);
    svg.line("axis", left, top, left, bottom, "stroke=\"#000\"");
    let step = tick_step(axis.hi - axis.lo);
    for t in ticks(axis.lo, axis.hi) {
        let y = axis.map(t);
        svg.line("tick", left - 5.0, y, left, y, "stroke=\"#000\"");
        svg.text("tick-label", left - 8.0, y + 0.35 * font, "end", &tick_label(t, step));
    }

    for (k, (s, c)) in samples.iter().zip(&columns).enumerate() {
        let cx = left + col_w * (k as f64 + 0.5);
        for (i, &v) in s.values().iter().enumerate() {
            svg.circle("point", cx - 18.0 + jitter(i), axis.map(v), 3.5, "#555");
        }
        let wx = cx + 18.0;
        let (y_lo, y_hi, y_mean) = (axis.map(c.low), axis.map(c.high), axis.map(c.mean));
        let d = format!(
            "M {x} {a} L {x} {b} M {l} {a} L {r} {a} M {l} {b} L {r} {b} M {ml} {m} L {mr} {m}",
            x = n2(wx),
            a = n2(y_lo),
            b = n2(y_hi),
            l = n2(wx - 5.0),
            r = n2(wx + 5.0),
            ml = n2(wx - 9.0),
            mr = n2(wx + 9.0),
            m = n2(y_mean),
        );
        svg.path("whisker", &d, "stroke=\"#000\" stroke-width=\"2\" fill=\"none\"");
        svg.text("group-label", cx, bottom + 10.0 + font, "middle", s.label());
    }
    Ok(svg.finish())
}
