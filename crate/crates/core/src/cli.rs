//! Command-line front end.
//!
//! Exit codes: 0 success, 1 i/o failure, 2 parse or input error, 3 ill-posed
//! configuration, 4 numerical validation failure. Reports go to `--out`,
//! else to `$DCQD_OUTPUT_DIR/<command>.<ext>` when that variable is set,
//! else to stdout.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::channels::{chi_from_kraus, validate, ChannelSpec, KrausSet, ValidationReport};
use crate::dcqd::{Amplitudes, Characterizer, DesignDiagnostics};
use crate::error::{DcqdError, Result};
use crate::qcore::{frobenius_distance, max_abs_diff};
use crate::relax::{joint_estimate, relaxation_channel, RelaxEstimate, Shots};
use crate::report::{resource_csv, resource_table, ChiReport, ResourceRow};
use crate::sampling::{characterize_sampled, characterize_with_optics, CountsTable};
use crate::sqpt::SqptPlan;

pub const OUTPUT_DIR_VAR: &str = "DCQD_OUTPUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "dcqd", version, about = "Entanglement-assisted process characterization simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    /// Channel in compact form, e.g. `bit_flip:0.25` or `amplitude_damping:t=1,T1=2;phase_flip:0.1`.
    #[arg(long, conflicts_with = "channel_file")]
    pub channel: Option<String>,
    /// File holding a JSON channel description or the compact form.
    #[arg(long)]
    pub channel_file: Option<PathBuf>,
    /// Number of primary qubits.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct AmplitudeArgs {
    /// Amplitude of |00⟩ as `re` or `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Amplitude of |11⟩ as `re` or `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reconstruct χ from all 4^n configurations.
    Characterize {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        amplitudes: AmplitudeArgs,
        /// Shots per configuration; exact statistics when absent.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        shots: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Measure through the partial Bell analyzer (single pair only).
        #[arg(long)]
        optics: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Standard process tomography baseline.
    Sqpt {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Both methods on one channel, with errors and resource counts.
    Compare {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        amplitudes: AmplitudeArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Simulate amplitude then phase damping and estimate T1 and T2 from one
    /// Bell-type measurement.
    Partial {
        #[arg(long = "T1")]
        time_t1: f64,
        #[arg(long = "T2")]
        time_t2: f64,
        #[arg(long)]
        t1: f64,
        #[arg(long)]
        t2: f64,
        #[command(flatten)]
        amplitudes: AmplitudeArgs,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        shots: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Resource comparison table.
    Resources {
        /// Qubit count `k` or inclusive range `a..b`.
        #[arg(long, default_value = "1..4")]
        n: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Median reconstruction error versus shots per configuration.
    SampleSweep {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        amplitudes: AmplitudeArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [10_000u64, 1_000_000])]
        shots: Vec<u64>,
        /// Number of seeds per shot count.
        #[arg(long, default_value_t = 20)]
        seeds: u64,
        /// First seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Characterize { .. } => "characterize",
            Command::Sqpt { .. } => "sqpt",
            Command::Compare { .. } => "compare",
            Command::Partial { .. } => "partial",
            Command::Resources { .. } => "resources",
            Command::SampleSweep { .. } => "sample-sweep",
        }
    }

    fn output(&self) -> &OutputArgs {
        match self {
            Command::Characterize { output, .. }
            | Command::Sqpt { output, .. }
            | Command::Compare { output, .. }
            | Command::Partial { output, .. }
            | Command::Resources { output, .. }
            | Command::SampleSweep { output, .. } => output,
        }
    }
}

pub fn exit_code(err: &DcqdError) -> i32 {
    match err {
        DcqdError::Parse { .. }
        | DcqdError::DimensionMismatch(_)
        | DcqdError::InvalidChannel(_)
        | DcqdError::InvalidState(_) => 2,
        DcqdError::IllPosed(_) | DcqdError::InvalidConfiguration(_) | DcqdError::IllConditionedPlan(_) => 3,
        DcqdError::Validation(_)
        | DcqdError::NotCompletelyPositive { .. }
        | DcqdError::InvalidDistribution(_)
        | DcqdError::Saturation(_)
        | DcqdError::InconsistentData(_) => 4,
        DcqdError::Io(_) => 1,
    }
}

/// A rendered report and whether its numbers passed validation.
struct Rendered {
    body: String,
    extension: &'static str,
    failure: Option<String>,
}

fn render<T: Serialize>(value: &T, format: Format, csv: impl FnOnce() -> String) -> Result<Rendered> {
    let (body, extension) = match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value).map_err(|e| DcqdError::Io(e.to_string()))?;
            s.push('\n');
            (s, "json")
        }
        Format::Csv => (csv(), "csv"),
    };
    Ok(Rendered {
        body,
        extension,
        failure: None,
    })
}

fn load_channel(args: &ChannelArgs) -> Result<(ChannelSpec, KrausSet)> {
    let spec = match (&args.channel, &args.channel_file) {
        (Some(text), None) => ChannelSpec::parse(text)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| DcqdError::Io(format!("{}: {e}", path.display())))?;
            if text.trim_start().starts_with('{') {
                ChannelSpec::from_json(&text)?
            } else {
                ChannelSpec::parse(text.trim())?
            }
        }
        _ => return Err(DcqdError::parse("channel", "give exactly one of --channel or --channel-file")),
    };
    let kraus = spec.to_kraus(args.n)?;
    Ok((spec, kraus))
}

fn parse_complex(field: &str, text: &str) -> Result<Complex64> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |s: &str| {
        s.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| DcqdError::parse(field, format!("'{s}' is not a finite number")))
    };
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(DcqdError::parse(field, "expected `re` or `re,im`")),
    }
}

/// Amplitudes from the flags; normalization is restored when off by less
/// than 1e-6 so that rounded decimals are accepted.
fn amplitudes(args: &AmplitudeArgs, default: Amplitudes) -> Result<Amplitudes> {
    match (&args.alpha, &args.beta) {
        (None, None) => Ok(default),
        (Some(a), Some(b)) => {
            let (a, b) = (parse_complex("alpha", a)?, parse_complex("beta", b)?);
            let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
            if (norm - 1.0).abs() > 1e-6 {
                return Err(DcqdError::parse("alpha/beta", format!("|α|² + |β|² = {} is not 1", norm * norm)));
            }
            Amplitudes::new(a / norm, b / norm)
        }
        _ => Err(DcqdError::parse("alpha/beta", "give both --alpha and --beta")),
    }
}

fn parse_range(text: &str) -> Result<std::ops::RangeInclusive<u32>> {
    let num = |s: &str| {
        s.trim()
            .parse::<u32>()
            .map_err(|_| DcqdError::parse("n", format!("'{s}' is not a qubit count")))
    };
    let range = match text.split_once("..") {
        Some((a, b)) => num(a)?..=num(b.trim_start_matches('='))?,
        None => {
            let k = num(text)?;
            k..=k
        }
    };
    if *range.start() == 0 || range.start() > range.end() {
        return Err(DcqdError::parse("n", format!("'{text}' is not a nonempty range of positive counts")));
    }
    Ok(range)
}

#[derive(Debug, Serialize)]
struct CharacterizeReport {
    command: &'static str,
    n: usize,
    channel: ChannelSpec,
    amplitudes: Amplitudes,
    configurations: usize,
    shots: Option<u64>,
    seed: Option<u64>,
    optics: bool,
    chi: ChiReport,
    closed_form: Option<ChiReport>,
    closed_form_residual: Option<f64>,
    fit_residual: f64,
    diagnostics: DesignDiagnostics,
    validation: ValidationReport,
    error_vs_truth: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    counts: Vec<CountsTable>,
}

fn characterize_cmd(
    channel: &ChannelArgs,
    amps: &AmplitudeArgs,
    shots: Option<u64>,
    seed: u64,
    optics: bool,
    format: Format,
) -> Result<Rendered> {
    let (spec, kraus) = load_channel(channel)?;
    let amplitudes = amplitudes(amps, Amplitudes::default())?;
    let (result, configurations, counts) = if optics {
        let r = characterize_with_optics(&kraus, &amplitudes, shots.map(|s| (s, seed)))?;
        (r.result, r.configurations, Vec::new())
    } else if let Some(s) = shots {
        let r = characterize_sampled(&kraus, &amplitudes, s, seed)?;
        let configs = r.counts.len();
        (r.result, configs, r.counts)
    } else {
        let r = Characterizer::new(kraus.n_qubits(), amplitudes)?.characterize(&kraus)?;
        let configs = r.configurations;
        (r, configs, Vec::new())
    };
    let validation = validate(&result.chi, kraus.is_trace_preserving());
    let truth = chi_from_kraus(&kraus);
    let report = CharacterizeReport {
        command: "characterize",
        n: kraus.n_qubits(),
        channel: spec,
        amplitudes,
        configurations,
        shots,
        seed: shots.map(|_| seed),
        optics,
        chi: ChiReport::from_process(&result.chi),
        closed_form: result.closed_form.as_ref().map(ChiReport::from_process),
        closed_form_residual: result.residual,
        fit_residual: result.fit_residual,
        diagnostics: result.diagnostics,
        validation: validation.clone(),
        error_vs_truth: frobenius_distance(result.chi.matrix(), truth.matrix()),
        counts,
    };
    let mut rendered = render(&report, format, || report.chi.to_csv())?;
    // finite-shot estimates may legitimately leave the physical set
    if shots.is_none() && !validation.passes() {
        rendered.failure = Some(validation.violations().join("; "));
    }
    Ok(rendered)
}

#[derive(Debug, Serialize)]
struct SqptReport {
    command: &'static str,
    n: usize,
    channel: ChannelSpec,
    inputs: usize,
    settings: usize,
    configurations: usize,
    chi: ChiReport,
    validation: ValidationReport,
    error_vs_truth: f64,
}

fn sqpt_cmd(channel: &ChannelArgs, format: Format) -> Result<Rendered> {
    let (spec, kraus) = load_channel(channel)?;
    let r = SqptPlan::new(kraus.n_qubits())?.characterize(&kraus)?;
    let validation = validate(&r.chi, kraus.is_trace_preserving());
    let report = SqptReport {
        command: "sqpt",
        n: kraus.n_qubits(),
        channel: spec,
        inputs: r.inputs,
        settings: r.settings,
        configurations: r.experiments,
        chi: ChiReport::from_process(&r.chi),
        validation: validation.clone(),
        error_vs_truth: frobenius_distance(r.chi.matrix(), chi_from_kraus(&kraus).matrix()),
    };
    let mut rendered = render(&report, format, || report.chi.to_csv())?;
    if !validation.passes() {
        rendered.failure = Some(validation.violations().join("; "));
    }
    Ok(rendered)
}

#[derive(Debug, Serialize)]
struct MethodSummary {
    configurations: usize,
    error_vs_truth: f64,
}

#[derive(Debug, Serialize)]
struct CompareReport {
    command: &'static str,
    n: usize,
    channel: ChannelSpec,
    dcqd: MethodSummary,
    sqpt: MethodSummary,
    max_entry_difference: f64,
    resources: Vec<ResourceRow>,
}

fn compare_cmd(channel: &ChannelArgs, amps: &AmplitudeArgs, format: Format) -> Result<Rendered> {
    let (spec, kraus) = load_channel(channel)?;
    let amplitudes = amplitudes(amps, Amplitudes::default())?;
    let truth = chi_from_kraus(&kraus);
    let d = Characterizer::new(kraus.n_qubits(), amplitudes)?.characterize(&kraus)?;
    let s = SqptPlan::new(kraus.n_qubits())?.characterize(&kraus)?;
    let report = CompareReport {
        command: "compare",
        n: kraus.n_qubits(),
        channel: spec,
        dcqd: MethodSummary {
            configurations: d.configurations,
            error_vs_truth: frobenius_distance(d.chi.matrix(), truth.matrix()),
        },
        sqpt: MethodSummary {
            configurations: s.experiments,
            error_vs_truth: frobenius_distance(s.chi.matrix(), truth.matrix()),
        },
        max_entry_difference: max_abs_diff(d.chi.matrix(), s.chi.matrix()),
        resources: resource_table([kraus.n_qubits() as u32])?,
    };
    render(&report, format, || {
        let mut out = String::from("method,configurations,error_vs_truth\n");
        out.push_str(&format!("DCQD,{},{:e}\n", report.dcqd.configurations, report.dcqd.error_vs_truth));
        out.push_str(&format!("SQPT,{},{:e}\n", report.sqpt.configurations, report.sqpt.error_vs_truth));
        out
    })
}

#[derive(Debug, Serialize)]
struct PartialReport {
    command: &'static str,
    true_t1: f64,
    true_t2: f64,
    shots: Option<u64>,
    seed: Option<u64>,
    estimate: RelaxEstimate,
    #[serde(skip_serializing_if = "Option::is_none")]
    counts: Option<CountsTable>,
}

#[allow(clippy::too_many_arguments)]
fn partial_cmd(
    time_t1: f64,
    time_t2: f64,
    t1: f64,
    t2: f64,
    amps: &AmplitudeArgs,
    shots: Option<u64>,
    seed: u64,
    format: Format,
) -> Result<Rendered> {
    if !(time_t1 > 0.0 && time_t2 > 0.0) {
        return Err(DcqdError::parse("T1/T2", "time constants must be positive"));
    }
    let default = Amplitudes::real((2.0f64 / 3.0).sqrt())?;
    let amplitudes = amplitudes(amps, default)?;
    let channel = relaxation_channel(t1, time_t1, t2, time_t2)?;
    let (estimate, counts) = joint_estimate(&channel, &amplitudes, t1, t2, shots.map(|shots| Shots { shots, seed }))?;
    let report = PartialReport {
        command: "partial",
        true_t1: time_t1,
        true_t2: time_t2,
        shots,
        seed: shots.map(|_| seed),
        estimate,
        counts,
    };
    render(&report, format, || {
        let show = |v: Option<f64>| v.map_or("inf".to_string(), |x| format!("{x:e}"));
        format!(
            "quantity,value\nT1,{}\nT2,{}\nt_prime_over_T2_prime,{:e}\np_minus,{:e}\nxx_out,{:e}\nconfigurations,{}\n",
            show(report.estimate.time_t1.value()),
            show(report.estimate.time_t2.value()),
            report.estimate.t_prime_over_t2_prime,
            report.estimate.p_minus,
            report.estimate.xx_out,
            report.estimate.configurations
        )
    })
}

fn resources_cmd(n: &str, format: Format) -> Result<Rendered> {
    let rows = resource_table(parse_range(n)?)?;
    render(&rows, format, || resource_csv(&rows))
}

#[derive(Debug, Serialize)]
struct SweepRow {
    shots: u64,
    seeds: u64,
    median_error: f64,
    min_error: f64,
    max_error: f64,
}

#[derive(Debug, Serialize)]
struct SweepReport {
    command: &'static str,
    n: usize,
    channel: ChannelSpec,
    first_seed: u64,
    rows: Vec<SweepRow>,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        (v[k / 2 - 1] + v[k / 2]) / 2.0
    }
}

fn sweep_cmd(
    channel: &ChannelArgs,
    amps: &AmplitudeArgs,
    shots: &[u64],
    seeds: u64,
    seed: u64,
    format: Format,
) -> Result<Rendered> {
    if seeds == 0 || shots.is_empty() || shots.contains(&0) {
        return Err(DcqdError::parse("shots/seeds", "need at least one seed and positive shot counts"));
    }
    let (spec, kraus) = load_channel(channel)?;
    let amplitudes = amplitudes(amps, Amplitudes::default())?;
    let mut rows = Vec::new();
    for &s in shots {
        let errors = (seed..seed + seeds)
            .map(|sd| characterize_sampled(&kraus, &amplitudes, s, sd).map(|r| r.frobenius_error))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(SweepRow {
            shots: s,
            seeds,
            min_error: errors.iter().copied().fold(f64::INFINITY, f64::min),
            max_error: errors.iter().copied().fold(0.0, f64::max),
            median_error: median(errors),
        });
    }
    let report = SweepReport {
        command: "sample-sweep",
        n: kraus.n_qubits(),
        channel: spec,
        first_seed: seed,
        rows,
    };
    render(&report, format, || {
        let mut out = String::from("shots,seeds,median_error,min_error,max_error\n");
        for r in &report.rows {
            out.push_str(&format!("{},{},{:e},{:e},{:e}\n", r.shots, r.seeds, r.median_error, r.min_error, r.max_error));
        }
        out
    })
}

fn execute(command: &Command) -> Result<Rendered> {
    let format = command.output().format;
    match command {
        Command::Characterize {
            channel,
            amplitudes,
            shots,
            seed,
            optics,
            ..
        } => characterize_cmd(channel, amplitudes, *shots, *seed, *optics, format),
        Command::Sqpt { channel, .. } => sqpt_cmd(channel, format),
        Command::Compare { channel, amplitudes, .. } => compare_cmd(channel, amplitudes, format),
        Command::Partial {
            time_t1,
            time_t2,
            t1,
            t2,
            amplitudes,
            shots,
            seed,
            ..
        } => partial_cmd(*time_t1, *time_t2, *t1, *t2, amplitudes, *shots, *seed, format),
        Command::Resources { n, .. } => resources_cmd(n, format),
        Command::SampleSweep {
            channel,
            amplitudes,
            shots,
            seeds,
            seed,
            ..
        } => sweep_cmd(channel, amplitudes, shots, *seeds, *seed, format),
    }
}

fn destination(command: &Command, extension: &str, env_dir: Option<&Path>) -> Option<PathBuf> {
    command
        .output()
        .out
        .clone()
        .or_else(|| env_dir.map(|d| d.join(format!("{}.{extension}", command.name()))))
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let env_dir = std::env::var_os(OUTPUT_DIR_VAR).map(PathBuf::from);
    run_with_output_dir(cli, env_dir.as_deref())
}

pub fn run_with_output_dir(cli: &Cli, env_dir: Option<&Path>) -> i32 {
    let rendered = match execute(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    match destination(&cli.command, rendered.extension, env_dir) {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, &rendered.body) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return 1;
            }
        }
        None => print!("{}", rendered.body),
    }
    match rendered.failure {
        Some(msg) => {
            eprintln!("error: numerical validation failed: {msg}");
            4
        }
        None => 0,
    }
}

/// Entry point used by the binary.
pub fn main() -> i32 {
    match Cli::try_parse() {
        Ok(cli) => run(&cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                2
            } else {
                0
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("dcqd").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn complex_and_range_parsing() {
        assert_eq!(parse_complex("alpha", "0.5").unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(parse_complex("beta", "0.1,-0.2").unwrap(), Complex64::new(0.1, -0.2));
        assert!(matches!(parse_complex("beta", "x"), Err(DcqdError::Parse { ref field, .. }) if field == "beta"));
        assert_eq!(parse_range("3").unwrap(), 3..=3);
        assert_eq!(parse_range("1..4").unwrap(), 1..=4);
        assert!(parse_range("0..2").is_err());
        assert!(parse_range("4..1").is_err());
    }

    #[test]
    fn amplitude_flags() {
        let args = AmplitudeArgs {
            alpha: Some("0.8".into()),
            beta: Some("0.36,0.48".into()),
        };
        let a = amplitudes(&args, Amplitudes::default()).unwrap();
        assert!((a.beta - Complex64::new(0.36, 0.48)).norm() < 1e-15);
        let half = AmplitudeArgs {
            alpha: Some("0.8".into()),
            beta: None,
        };
        assert!(amplitudes(&half, Amplitudes::default()).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&DcqdError::parse("x", "y")), 2);
        assert_eq!(exit_code(&DcqdError::IllPosed("x".into())), 3);
        assert_eq!(exit_code(&DcqdError::Validation("x".into())), 4);
    }

    #[test]
    fn destination_precedence() {
        let cli = parse(&["resources", "--n", "3"]);
        assert_eq!(destination(&cli.command, "json", None), None);
        assert_eq!(
            destination(&cli.command, "json", Some(Path::new("/tmp/x"))),
            Some(PathBuf::from("/tmp/x/resources.json"))
        );
        let cli = parse(&["resources", "--out", "a.csv", "--format", "csv"]);
        assert_eq!(
            destination(&cli.command, "csv", Some(Path::new("/tmp/x"))),
            Some(PathBuf::from("a.csv"))
        );
    }

    #[test]
    fn ill_posed_amplitudes_exit_three() {
        let cli = parse(&["characterize", "--channel", "identity", "--alpha", "0.8", "--beta", "0.6"]);
        assert_eq!(execute(&cli.command).err().map(|e| exit_code(&e)), Some(3));
    }
}
