//! Command-line surface.
//!
//! Every subcommand is a pure function of its flags and input files. JSON
//! reports embed the tool version and the effective configuration; floats
//! are written in shortest round-trip form.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::counting::{self, DistRow, ShiftedFrame};
use crate::error::{Error, Result};
use crate::fattails::{self, FatTailHistogram, TailMass};
use crate::indicator::{self, IndicatorSnapshot};
use crate::structure::{self, DensityCondition};
use crate::ticks::{self, TickSeries};
use crate::variation::{self, HyperbolaResiduals};

pub const TOOL: &str = "bvprice";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = TOOL, version, about = "Bounded-variation price model toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Seed for the seeded subcommands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Variation, Jordan decomposition and structure parameters of a tick CSV.
    Analyze {
        /// Tick CSV (`timestamp,price`); standard input when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Transition count; defaults to round(√ticks) − 1, at least 1.
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, default_value_t = 0.5)]
        epsilon_rho: f64,
    },
    /// Exact and Gaussian difference distribution with P(ζ ≤ 0).
    Dist {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        alpha: f64,
        /// Also write the table CSV here.
        #[arg(long)]
        csv_out: Option<PathBuf>,
    },
    /// Sampled differences against the moments implied by α.
    Simulate {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Heavy-tail histogram, tail masses and coefficient discrepancy.
    Fattails {
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 60)]
        bins: usize,
        /// Also write the histogram CSV here.
        #[arg(long)]
        csv_out: Option<PathBuf>,
    },
    /// Rolling decline-probability indicator over a tick CSV.
    Indicator {
        #[arg(long)]
        input: Option<PathBuf>,
        /// Window length in ticks.
        #[arg(long)]
        window: usize,
        /// Transition count per window.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        epsilon_rho: f64,
    },
}

/// Effective configuration, echoed into every JSON report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub subcommand: &'static str,
    pub input_path: Option<String>,
    pub output_path: Option<String>,
    pub seed: u64,
    pub format: Format,
    pub n: Option<u64>,
    pub alpha: Option<f64>,
    pub epsilon_rho: Option<f64>,
    pub window: Option<usize>,
    pub samples: Option<usize>,
    pub bins: Option<usize>,
}

impl RunConfig {
    fn new(subcommand: &'static str, common: &Common, default_format: Format) -> Self {
        Self {
            subcommand,
            input_path: None,
            output_path: common.output.as_ref().map(|p| p.display().to_string()),
            seed: common.seed,
            format: common.format.unwrap_or(default_format),
            n: None,
            alpha: None,
            epsilon_rho: None,
            window: None,
            samples: None,
            bins: None,
        }
    }
}

#[derive(Serialize)]
struct Header<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a RunConfig,
}

impl<'a> Header<'a> {
    fn new(config: &'a RunConfig) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            config,
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn read_input(path: Option<&PathBuf>) -> Result<String> {
    let mut text = String::new();
    match path {
        Some(p) => {
            text = std::fs::read_to_string(p)
                .map_err(|e| Error::Io(format!("{}: {e}", p.display())))?
        }
        None => {
            std::io::stdin().read_to_string(&mut text)?;
        }
    }
    Ok(text)
}

fn load_series(path: Option<&PathBuf>) -> Result<TickSeries> {
    ticks::parse_csv(&read_input(path)?)
}

#[derive(Serialize)]
struct VariationReport {
    #[serde(rename = "V")]
    total: f64,
    #[serde(rename = "D")]
    difference: f64,
    sigma_plus: f64,
    sigma_minus: f64,
}

#[derive(Serialize)]
struct StructureReport {
    transitions: usize,
    segment_count: usize,
    cover_tolerance_ms: f64,
    #[serde(rename = "V_osc")]
    v_osc: f64,
    #[serde(rename = "V_osc_ratio")]
    v_osc_ratio: f64,
    lambda: f64,
    rho_bar: f64,
    densities: Vec<f64>,
    alpha1: f64,
    alpha2: f64,
    alpha: f64,
    v_model: f64,
    density_condition: DensityCondition,
}

#[derive(Serialize)]
struct AnalyzeReport<'a> {
    #[serde(flatten)]
    header: Header<'a>,
    ticks: usize,
    span: (i64, i64),
    variation: VariationReport,
    hyperbola_residuals: HyperbolaResiduals,
    structure: Option<StructureReport>,
    warnings: Vec<String>,
}

/// `round(√len) − 1`, at least 1.
pub fn default_transitions(len: usize) -> u64 {
    ((len as f64).sqrt().round() as u64)
        .saturating_sub(1)
        .max(1)
}

fn structure_report(
    series: &TickSeries,
    transitions: usize,
    epsilon_rho: f64,
    total: f64,
) -> Result<StructureReport> {
    let part = ticks::partition(series, transitions)?;
    let osc = variation::segment_oscillations(series, &part)?;
    let v_osc = variation::oscillation_variation(&osc)?;
    let profile = structure::density_profile(&osc, epsilon_rho)?;
    let params = structure::structure_params(&osc, &profile)?;
    Ok(StructureReport {
        transitions,
        segment_count: part.segment_count,
        cover_tolerance_ms: part.cover_tolerance,
        v_osc,
        v_osc_ratio: v_osc / total,
        lambda: profile.lambda,
        rho_bar: profile.rho_bar,
        density_condition: structure::density_condition(&profile),
        densities: profile.densities,
        alpha1: params.alpha1,
        alpha2: params.alpha2,
        alpha: params.alpha,
        v_model: params.v_model,
    })
}

fn analyze(
    common: &Common,
    input: Option<PathBuf>,
    n: Option<u64>,
    epsilon_rho: f64,
) -> Result<String> {
    if !(epsilon_rho > 0.0 && epsilon_rho < 1.0) {
        return Err(Error::domain("epsilon_rho", "must lie in (0, 1)"));
    }
    let series = load_series(input.as_ref())?;
    let n = n.unwrap_or_else(|| default_transitions(series.len()));
    let mut config = RunConfig::new("analyze", common, Format::Json);
    config.input_path = input.as_ref().map(|p| p.display().to_string());
    config.n = Some(n);
    config.epsilon_rho = Some(epsilon_rho);
    if config.format != Format::Json {
        return Err(Error::domain("format", "analyze emits json only"));
    }

    let summary = variation::variation_summary(&series);
    let mut warnings = Vec::new();
    let structure = match structure_report(&series, n as usize, epsilon_rho, summary.total) {
        Ok(s) => Some(s),
        Err(e) => {
            warnings.push(format!("structure skipped: {e}"));
            None
        }
    };
    Ok(to_json(&AnalyzeReport {
        header: Header::new(&config),
        ticks: series.len(),
        span: series.span(),
        variation: VariationReport {
            total: summary.total,
            difference: summary.difference,
            sigma_plus: summary.sigma_plus,
            sigma_minus: summary.sigma_minus,
        },
        hyperbola_residuals: summary.hyperbola_residuals(),
        structure,
        warnings,
    }))
}

#[derive(Serialize)]
struct DistReport<'a> {
    #[serde(flatten)]
    header: Header<'a>,
    frame: ShiftedFrame,
    prob_nonpositive: f64,
    total_probability: f64,
    table: Vec<DistRow>,
}

fn dist(common: &Common, n: u64, alpha: f64, csv_out: Option<PathBuf>) -> Result<String> {
    let mut config = RunConfig::new("dist", common, Format::Json);
    config.n = Some(n);
    config.alpha = Some(alpha);
    let (frame, table) = counting::distribution_table(n, alpha)?;
    let csv = counting::table_to_csv(&table);
    if let Some(path) = csv_out {
        std::fs::write(&path, &csv).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    if config.format == Format::Csv {
        return Ok(csv);
    }
    Ok(to_json(&DistReport {
        header: Header::new(&config),
        frame,
        prob_nonpositive: counting::prob_nonpositive(alpha, n)?,
        total_probability: table.iter().map(|r| r.p_exact).sum(),
        table,
    }))
}

/// Summary of sampled differences against the moment predictions.
#[derive(Debug, Clone, Serialize)]
pub struct SampleSummary {
    pub samples: usize,
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
    pub predicted_mean: f64,
    pub predicted_variance: f64,
    /// Share of `d ≤ 0`, counting `d = 0` with weight one half.
    pub fraction_nonpositive: f64,
    pub prob_nonpositive: f64,
}

pub fn summarize_samples(n: u64, alpha: f64, d: &[i64]) -> Result<SampleSummary> {
    if d.len() < 2 {
        return Err(Error::domain("samples", "need at least 2"));
    }
    let len = d.len() as f64;
    let mean = d.iter().map(|&x| x as i128).sum::<i128>() as f64 / len;
    let variance = d.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / (len - 1.0);
    let below = d.iter().filter(|&&x| x < 0).count() as f64;
    let zeros = d.iter().filter(|&&x| x == 0).count() as f64;
    let two_n = 2.0 * n as f64;
    Ok(SampleSummary {
        samples: d.len(),
        mean,
        variance,
        std_error: (variance / len).sqrt(),
        predicted_mean: -two_n * alpha,
        predicted_variance: two_n * (1.0 - alpha.abs()),
        fraction_nonpositive: (below + 0.5 * zeros) / len,
        prob_nonpositive: counting::prob_nonpositive(alpha, n)?,
    })
}

#[derive(Serialize)]
struct SimulateReport<'a> {
    #[serde(flatten)]
    header: Header<'a>,
    frame: ShiftedFrame,
    #[serde(flatten)]
    summary: SampleSummary,
}

fn simulate(common: &Common, n: u64, alpha: f64, samples: usize) -> Result<String> {
    let mut config = RunConfig::new("simulate", common, Format::Json);
    config.n = Some(n);
    config.alpha = Some(alpha);
    config.samples = Some(samples);
    if config.format != Format::Json {
        return Err(Error::domain("format", "simulate emits json only"));
    }
    let frame = counting::frame_for_alpha(n, alpha)?;
    let d = counting::sample_difference(n, alpha, samples, common.seed)?;
    Ok(to_json(&SimulateReport {
        header: Header::new(&config),
        frame,
        summary: summarize_samples(n, alpha, &d)?,
    }))
}

#[derive(Serialize)]
struct Discrepancy {
    zeta0: f64,
    max_abs_cdf_gap: f64,
}

#[derive(Serialize)]
struct HistogramRow {
    bin_left: f64,
    bin_right: f64,
    count_model: u64,
    count_normal: u64,
}

#[derive(Serialize)]
struct FattailsReport<'a> {
    #[serde(flatten)]
    header: Header<'a>,
    samples: usize,
    tails: &'a [TailMass],
    max_abs_model: f64,
    max_abs_normal: f64,
    monotone_limit: f64,
    saturated: u64,
    saturated_zeta0: &'a [f64],
    coefficient_discrepancy: Vec<Discrepancy>,
    histogram: Vec<HistogramRow>,
}

/// `ζ ∈ [−6, 6]` in steps of 0.01.
fn discrepancy_grid() -> Vec<f64> {
    (-600..=600).map(|i| i as f64 / 100.0).collect()
}

fn fattails_cmd(
    common: &Common,
    samples: usize,
    bins: usize,
    csv_out: Option<PathBuf>,
) -> Result<String> {
    let mut config = RunConfig::new("fattails", common, Format::Json);
    config.samples = Some(samples);
    config.bins = Some(bins);
    let hist: FatTailHistogram = fattails::simulate_histogram(samples, bins, common.seed)?;
    let csv = hist.to_csv();
    if let Some(path) = csv_out {
        std::fs::write(&path, &csv).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    if config.format == Format::Csv {
        return Ok(csv);
    }
    let grid = discrepancy_grid();
    let coefficient_discrepancy = (0..10)
        .map(|i| {
            let zeta0 = i as f64 / 10.0;
            Ok(Discrepancy {
                zeta0,
                max_abs_cdf_gap: fattails::coefficient_discrepancy(zeta0, &grid)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let histogram = hist
        .edges
        .windows(2)
        .enumerate()
        .map(|(i, w)| HistogramRow {
            bin_left: w[0],
            bin_right: w[1],
            count_model: hist.counts_model[i],
            count_normal: hist.counts_normal[i],
        })
        .collect();
    Ok(to_json(&FattailsReport {
        header: Header::new(&config),
        samples: hist.samples,
        tails: &hist.tails,
        max_abs_model: hist.max_abs_model,
        max_abs_normal: hist.max_abs_normal,
        monotone_limit: fattails::MONOTONE_LIMIT,
        saturated: hist.saturated,
        saturated_zeta0: &hist.saturated_zeta0,
        coefficient_discrepancy,
        histogram,
    }))
}

#[derive(Serialize)]
struct IndicatorReport<'a> {
    #[serde(flatten)]
    header: Header<'a>,
    stride: usize,
    alpha_clamp: f64,
    snapshots: &'a [IndicatorSnapshot],
    warnings: &'a [String],
}

fn indicator_cmd(
    common: &Common,
    input: Option<PathBuf>,
    window: usize,
    n: usize,
    epsilon_rho: f64,
) -> Result<String> {
    let mut config = RunConfig::new("indicator", common, Format::Csv);
    config.input_path = input.as_ref().map(|p| p.display().to_string());
    config.window = Some(window);
    config.n = Some(n as u64);
    config.epsilon_rho = Some(epsilon_rho);
    let series = load_series(input.as_ref())?;
    let rolling = indicator::rolling_indicator(&series, window, n, epsilon_rho)?;
    match config.format {
        Format::Csv => Ok(rolling.to_csv()),
        Format::Json => Ok(to_json(&IndicatorReport {
            header: Header::new(&config),
            stride: rolling.stride,
            alpha_clamp: rolling.alpha_clamp,
            snapshots: &rolling.snapshots,
            warnings: &rolling.warnings,
        })),
    }
}

fn dispatch(cli: Cli) -> Result<String> {
    let common = &cli.common;
    match cli.command {
        Command::Analyze {
            input,
            n,
            epsilon_rho,
        } => analyze(common, input, n, epsilon_rho),
        Command::Dist { n, alpha, csv_out } => dist(common, n, alpha, csv_out),
        Command::Simulate { n, alpha, samples } => simulate(common, n, alpha, samples),
        Command::Fattails {
            samples,
            bins,
            csv_out,
        } => fattails_cmd(common, samples, bins, csv_out),
        Command::Indicator {
            input,
            window,
            n,
            epsilon_rho,
        } => indicator_cmd(common, input, window, n, epsilon_rho),
    }
}

/// Parses `args`, runs the subcommand and returns the process exit code:
/// 0 on success, 1 on usage or input errors, 2 on domain errors.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let output = cli.common.output.clone();
    let report = match dispatch(cli) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return if e.is_input_error() {
                EXIT_INPUT
            } else {
                EXIT_DOMAIN
            };
        }
    };
    let written = match output {
        Some(path) => std::fs::write(&path, report.as_bytes()),
        None => stdout.write_all(report.as_bytes()),
    };
    match written {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: io: {e}");
            EXIT_INPUT
        }
    }
}
