//! The `mbi` command-line tool.
//!
//! Exit codes: 0 success, 2 input or usage error, 3 statistical degeneracy,
//! 4 numeric failure.

mod config;
mod input;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::RunConfig;
pub use input::{read_long, read_paired, read_single_column};

use crate::descriptive::{log_transform, summarize, Sample};
use crate::effects::{compare_independent, compare_paired};
use crate::error::{Error, Result};
use crate::mbi::{infer, qualitative_label, DescriptorLadder, Locale};
use crate::report::{
    render_dance_svg, render_forest_svg, render_individuals_svg, render_json, render_table, BundleEntry, ReportBundle,
    SvgOptions, TableFormat,
};
use crate::simulate::{run_dance, DanceConfig};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_STATISTICAL: u8 = 3;
pub const EXIT_NUMERIC: u8 = 4;

/// Maps an error to its exit status.
pub fn exit_code(err: &Error) -> u8 {
    if err.is_statistical() {
        EXIT_STATISTICAL
    } else if err.is_numeric() {
        EXIT_NUMERIC
    } else {
        EXIT_INPUT
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "mbi",
    version,
    about = "Effect sizes, confidence intervals and magnitude-based inference"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compare two independent groups
    Compare(CompareArgs),
    /// Compare paired pre/post measurements
    Paired(PairedArgs),
    /// Simulate repeated experiments and their intervals
    Dance(DanceArgs),
    /// Re-render a saved JSON report
    Plot(PlotArgs),
}

#[derive(Args, Debug, Default)]
struct AnalysisFlags {
    /// key = value settings file; flags override it
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Confidence level, e.g. 0.90
    #[arg(long)]
    ci: Option<String>,
    /// Smallest worthwhile change
    #[arg(long)]
    swc: Option<String>,
    /// Units of --swc: standardized or raw
    #[arg(long, value_name = "UNITS")]
    swc_units: Option<String>,
    /// welch or pooled
    #[arg(long)]
    variance: Option<String>,
    /// Analyse on the natural-log scale and report percent effects
    #[arg(long)]
    log: bool,
    /// en or pt
    #[arg(long)]
    locale: Option<String>,
    /// Comma-separated magnitude thresholds, e.g. 0.2,0.6,1.2,2.0
    #[arg(long)]
    scale: Option<String>,
    /// Six comma-separated descriptor thresholds
    #[arg(long)]
    ladder: Option<String>,
    /// mechanistic or clinical
    #[arg(long)]
    inference: Option<String>,
    #[arg(long, value_name = "P")]
    unclear_positive: Option<String>,
    #[arg(long, value_name = "P")]
    unclear_negative: Option<String>,
}

impl AnalysisFlags {
    fn resolve(&self, extra: &[(&str, Option<&str>)]) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        let flags = [
            ("swc-units", self.swc_units.as_deref()),
            ("ci", self.ci.as_deref()),
            ("swc", self.swc.as_deref()),
            ("variance", self.variance.as_deref()),
            ("log", self.log.then_some("true")),
            ("locale", self.locale.as_deref()),
            ("scale", self.scale.as_deref()),
            ("ladder", self.ladder.as_deref()),
            ("inference", self.inference.as_deref()),
            ("unclear-positive", self.unclear_positive.as_deref()),
            ("unclear-negative", self.unclear_negative.as_deref()),
        ];
        for (key, value) in flags.iter().chain(extra) {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Md,
    Csv,
    Json,
    Svg,
}

#[derive(Args, Debug)]
struct OutputFlags {
    /// Payload format
    #[arg(long, visible_alias = "out", value_enum, default_value = "md")]
    format: Format,
    /// Write the payload here instead of standard output
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Also write a forest plot
    #[arg(long, value_name = "FILE")]
    svg: Option<PathBuf>,
    /// Also write the JSON report
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
    /// Also write a plot of the individual values
    #[arg(long, value_name = "FILE")]
    individuals: Option<PathBuf>,
    /// Row label
    #[arg(long)]
    name: Option<String>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    /// Single-column CSV for group 1
    #[arg(long, value_name = "FILE", requires = "b", conflicts_with = "data")]
    a: Option<PathBuf>,
    /// Single-column CSV for group 2
    #[arg(long, value_name = "FILE", requires = "a")]
    b: Option<PathBuf>,
    /// Long-format CSV with group,value columns and two groups
    #[arg(long, value_name = "FILE", required_unless_present = "a")]
    data: Option<PathBuf>,
    #[command(flatten)]
    analysis: AnalysisFlags,
    #[command(flatten)]
    output: OutputFlags,
}

#[derive(Args, Debug)]
struct PairedArgs {
    /// CSV with pre,post columns
    #[arg(long, value_name = "FILE")]
    csv: PathBuf,
    /// baseline-sd or diff-sd
    #[arg(long)]
    standardizer: Option<String>,
    #[command(flatten)]
    analysis: AnalysisFlags,
    #[command(flatten)]
    output: OutputFlags,
}

#[derive(Args, Debug)]
struct DanceArgs {
    #[arg(long, default_value_t = 25)]
    experiments: usize,
    /// Observations per group
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, default_value_t = 20.0)]
    sigma: f64,
    /// True difference between population means
    #[arg(long, default_value_t = 10.0)]
    delta: f64,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 0.95)]
    ci: f64,
    #[arg(long, required = true)]
    seed: u64,
    /// welch or pooled
    #[arg(long, default_value = "pooled")]
    variance: String,
    #[arg(long, value_name = "FILE")]
    svg: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
    /// Print summary counts
    #[arg(long)]
    summary: bool,
    /// Worker threads; results do not depend on it
    #[arg(long)]
    threads: Option<usize>,
    /// en or pt
    #[arg(long, default_value = "en")]
    locale: String,
}

#[derive(Args, Debug)]
struct PlotArgs {
    /// JSON report written by compare or paired
    #[arg(long, value_name = "FILE")]
    bundle: PathBuf,
    #[arg(long, visible_alias = "out", value_enum, default_value = "svg")]
    format: Format,
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Relabel in another language
    #[arg(long)]
    locale: Option<String>,
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status. Diagnostics go to standard error.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let outcome = match cli.command {
        Command::Compare(a) => cmd_compare(&a),
        Command::Paired(a) => cmd_paired(&a),
        Command::Dance(a) => cmd_dance(&a),
        Command::Plot(a) => cmd_plot(&a),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error: {msg}");
            exit_code(&e)
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

/// Sends the payload to a file when one is given, else to standard output.
fn emit(payload: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => write_file(path, payload),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(payload.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Error::InvalidInput(format!("standard output: {e}")))
        }
    }
}

fn announce(config_json: &str) {
    eprintln!("# config: {config_json}");
}

fn svg_options(locale: Locale) -> SvgOptions {
    SvgOptions {
        locale,
        ..SvgOptions::default()
    }
}

fn render(bundle: &ReportBundle, format: Format) -> Result<String> {
    match format {
        Format::Md => render_table(bundle, TableFormat::Markdown),
        Format::Csv => render_table(bundle, TableFormat::Csv),
        Format::Json => Ok(render_json(bundle)),
        Format::Svg => render_forest_svg(bundle, &svg_options(bundle.metadata.locale)),
    }
}

fn report(cfg: &RunConfig, entry: BundleEntry, samples: &[Sample], out: &OutputFlags) -> Result<()> {
    let mut bundle = ReportBundle::new(cfg.scale.clone(), cfg.ladder(), cfg.metadata());
    bundle.push(entry)?;
    let payload = render(&bundle, out.format)?;
    if let Some(path) = &out.svg {
        write_file(path, &render_forest_svg(&bundle, &svg_options(cfg.locale))?)?;
    }
    if let Some(path) = &out.json {
        write_file(path, &render_json(&bundle))?;
    }
    if let Some(path) = &out.individuals {
        write_file(
            path,
            &render_individuals_svg(samples, cfg.ci_level, &svg_options(cfg.locale))?,
        )?;
    }
    emit(&payload, out.output.as_deref())
}

fn compare_groups(cfg: &RunConfig, a: &Sample, b: &Sample, out: &OutputFlags) -> Result<()> {
    let comparison = cfg.comparison()?;
    let result = compare_independent(a, b, &comparison)?;
    let inference = infer(&result, &cfg.mbi())?;
    let entry = BundleEntry {
        name: out
            .name
            .clone()
            .unwrap_or_else(|| format!("{} vs {}", b.label(), a.label())),
        group_a: summarize(a)?,
        group_b: summarize(b)?,
        result,
        inference,
    };
    report(cfg, entry, &[a.clone(), b.clone()], out)
}

fn cmd_compare(args: &CompareArgs) -> Result<()> {
    let cfg = args.analysis.resolve(&[])?;
    announce(&cfg.to_json_line());
    let (a, b) = match (&args.a, &args.b, &args.data) {
        (Some(pa), Some(pb), _) => (read_single_column(pa)?.0, read_single_column(pb)?.0),
        (_, _, Some(path)) => {
            let mut groups = read_long(path)?;
            if groups.len() != 2 {
                return Err(Error::InvalidInput(format!(
                    "{}: expected exactly two groups, found {}",
                    path.display(),
                    groups.len()
                )));
            }
            let b = groups.pop().expect("two groups");
            let a = groups.pop().expect("two groups");
            (a, b)
        }
        _ => return Err(Error::InvalidInput("give --a and --b, or --data".into())),
    };
    if cfg.log_scale {
        // surface nonpositive values before any other analysis
        log_transform(&a)?;
        log_transform(&b)?;
    }
    compare_groups(&cfg, &a, &b, &args.output)
}

fn cmd_paired(args: &PairedArgs) -> Result<()> {
    let cfg = args
        .analysis
        .resolve(&[("standardizer", args.standardizer.as_deref())])?;
    announce(&cfg.to_json_line());
    let (pre, post) = read_paired(&args.csv)?;
    let comparison = cfg.comparison()?;
    let result = compare_paired(&pre, &post, &comparison)?;
    let inference = infer(&result, &cfg.mbi())?;
    let entry = BundleEntry {
        name: args.output.name.clone().unwrap_or_else(|| {
            args.csv
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "post vs pre".into())
        }),
        group_a: summarize(&pre)?,
        group_b: summarize(&post)?,
        result,
        inference,
    };
    report(&cfg, entry, &[pre, post], &args.output)
}

fn cmd_dance(args: &DanceArgs) -> Result<()> {
    let cfg = DanceConfig {
        n_experiments: args.experiments,
        n_per_group: args.n,
        sigma: args.sigma,
        delta_mu: args.delta,
        alpha: args.alpha,
        ci_level: args.ci,
        seed: args.seed,
        variance_model: args.variance.parse()?,
    };
    let locale: Locale = args.locale.parse()?;
    cfg.validate()?;
    announce(&serde_json::to_string(&cfg).expect("config serializes"));
    let result = match args.threads {
        Some(0) => return Err(Error::InvalidConfig("--threads must be at least 1".into())),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?
            .install(|| run_dance(&cfg))?,
        None => run_dance(&cfg)?,
    };
    if let Some(path) = &args.csv {
        write_file(path, &result.to_csv())?;
    }
    if let Some(path) = &args.json {
        write_file(path, &result.to_json())?;
    }
    if let Some(path) = &args.svg {
        write_file(path, &render_dance_svg(&result, &cfg, &svg_options(locale))?)?;
    }
    if args.summary {
        let s = &result.summary;
        let mut text = String::new();
        text.push_str(&format!("n_experiments: {}\n", s.n_experiments));
        text.push_str(&format!("count_significant: {}\n", s.count_significant));
        text.push_str(&format!("significant_fraction: {:.4}\n", s.significant_fraction()));
        text.push_str(&format!("ci_capture_count: {}\n", s.ci_capture_count));
        text.push_str(&format!("capture_rate: {:.4}\n", s.capture_rate()));
        text.push_str(&format!("mean_diff: {:.4}\n", s.mean_diff_of_diffs));
        emit(&text, None)?;
    } else if args.csv.is_none() && args.json.is_none() && args.svg.is_none() {
        emit(&result.to_csv(), None)?;
    }
    Ok(())
}

/// Swaps the wording of a saved report into another language, keeping its
/// thresholds.
fn relabel(bundle: &mut ReportBundle, locale: Locale) {
    let ladder = DescriptorLadder {
        thresholds: bundle.ladder.thresholds.clone(),
        ..DescriptorLadder::for_locale(locale)
    };
    for entry in &mut bundle.comparisons {
        let q = qualitative_label(&entry.inference.chances(), &ladder, &bundle.metadata.unclear);
        entry.inference.descriptor = q.descriptor;
    }
    bundle.ladder = ladder;
    bundle.metadata.locale = locale;
}

fn cmd_plot(args: &PlotArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.bundle)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", args.bundle.display())))?;
    let mut bundle = ReportBundle::from_json(&text)?;
    if let Some(l) = &args.locale {
        relabel(&mut bundle, l.parse()?);
    }
    announce(&serde_json::to_string(&bundle.metadata).expect("metadata serializes"));
    emit(&render(&bundle, args.format)?, args.output.as_deref())
}
