//! Command-line front end: rate evaluation, amplitude optimization,
//! distance sweeps, protocol comparison and the self-test battery.
//!
//! Machine-readable artifacts (CSV or JSON) go to stdout or `--output`;
//! summaries and diagnostics go to stderr. Exit codes: 0 success, 2
//! invalid flags, 3 no secure operating point, 1 internal error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cvqkd::analysis::{
    compare_protocols, optimize_alpha, sweep_distance, SweepSpec, DEFAULT_ALPHA_BOUNDS,
    DEFAULT_ALPHA_TOL, DEFAULT_K_MIN,
};
use cvqkd::channel::{ChannelParams, DetectionParams, NoiseSignConvention, DEFAULT_LOSS_DB_PER_KM};
use cvqkd::error::Error;
use cvqkd::fock::Truncation;
use cvqkd::keyrate::{key_rate, Conventions, MiConvention};
use cvqkd::modulation::{ModulationEnsemble, StateFamily};
use cvqkd::report::{self, Metadata, TruncationSource};
use cvqkd::selftest;

/// Environment variable overriding the default photon-number cutoff.
const TRUNCATION_ENV: &str = "CVQKD_TRUNCATION";

#[derive(Parser)]
#[command(
    name = "cvqkd",
    version,
    about = "Secret-key rates of discrete-modulated CV-QKD protocols"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the key rate at a single operating point.
    Rate(RateArgs),
    /// Find the amplitude that maximizes the key rate.
    Optimize(OptimizeArgs),
    /// Sweep the key rate over a distance grid, one curve per ξ.
    Sweep(SweepArgs),
    /// Sweep both protocols and report dominance and cutoff gaps.
    Compare(CompareArgs),
    /// Run the cross-path consistency battery.
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProtocolArg {
    Pascs,
    Coherent,
}

impl ProtocolArg {
    fn family(self) -> StateFamily {
        match self {
            ProtocolArg::Pascs => StateFamily::Pascs,
            ProtocolArg::Coherent => StateFamily::Coherent,
        }
    }

    fn default_alpha(self) -> f64 {
        match self {
            ProtocolArg::Pascs => 0.13,
            ProtocolArg::Coherent => 0.25,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConventionArg {
    Standard,
    PaperLiteral,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct CommonArgs {
    /// Reconciliation efficiency β.
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Detector quantum efficiency η_det, folded into the channel loss.
    #[arg(long = "eta-det", default_value_t = 1.0)]
    eta_det: f64,
    /// Fiber loss rate in dB/km.
    #[arg(long, default_value_t = DEFAULT_LOSS_DB_PER_KM)]
    loss: f64,
    /// Sign with which excess noise enters γ_B and V_{A|B}.
    #[arg(long, value_enum, default_value = "standard")]
    convention: ConventionArg,
    /// Numerator of the mutual information: V = 1+V_A or the bare V_A.
    #[arg(long = "mi-convention", value_enum, default_value = "standard")]
    mi_convention: ConventionArg,
    /// Output format of the machine-readable artifact.
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Write the artifact to this path instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

impl CommonArgs {
    fn conventions(&self) -> Conventions {
        Conventions {
            noise_sign: match self.convention {
                ConventionArg::Standard => NoiseSignConvention::Standard,
                ConventionArg::PaperLiteral => NoiseSignConvention::PaperLiteral,
            },
            mutual_information: match self.mi_convention {
                ConventionArg::Standard => MiConvention::Standard,
                ConventionArg::PaperLiteral => MiConvention::PaperLiteral,
            },
        }
    }
}

#[derive(Args)]
struct RateArgs {
    #[arg(long, value_enum, default_value = "pascs")]
    protocol: ProtocolArg,
    /// Signal amplitude α; defaults to the per-protocol optimum.
    #[arg(long)]
    alpha: Option<f64>,
    /// Transmission distance in km.
    #[arg(long, default_value_t = 100.0)]
    distance: f64,
    /// Excess noise ξ at the channel input.
    #[arg(long, default_value_t = 0.002)]
    xi: f64,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long, value_enum, default_value = "pascs")]
    protocol: ProtocolArg,
    #[arg(long, default_value_t = 100.0)]
    distance: f64,
    #[arg(long, default_value_t = 0.002)]
    xi: f64,
    /// Lower amplitude bound of the search interval.
    #[arg(long = "alpha-min", default_value_t = DEFAULT_ALPHA_BOUNDS.0)]
    alpha_min: f64,
    /// Upper amplitude bound of the search interval.
    #[arg(long = "alpha-max", default_value_t = DEFAULT_ALPHA_BOUNDS.1)]
    alpha_max: f64,
    /// Amplitude tolerance of the golden-section search.
    #[arg(long, default_value_t = DEFAULT_ALPHA_TOL)]
    tol: f64,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum, default_value = "pascs")]
    protocol: ProtocolArg,
    #[arg(long)]
    alpha: Option<f64>,
    /// Distance grid as start:stop:step in km.
    #[arg(long, default_value = "0:450:1")]
    distance: String,
    /// Excess noise values, comma separated.
    #[arg(long, default_value = "0.002")]
    xi: String,
    /// Reporting floor for the threshold-crossing cutoff.
    #[arg(long, default_value_t = DEFAULT_K_MIN)]
    kmin: f64,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CompareArgs {
    /// PASCS amplitude.
    #[arg(long = "alpha-pascs", default_value_t = 0.13)]
    alpha_pascs: f64,
    /// Coherent-state amplitude.
    #[arg(long = "alpha-coherent", default_value_t = 0.25)]
    alpha_coherent: f64,
    #[arg(long, default_value = "0:450:1")]
    distance: String,
    #[arg(long, default_value = "0.002,0.01")]
    xi: String,
    #[arg(long, default_value_t = DEFAULT_K_MIN)]
    kmin: f64,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, value_enum, default_value = "standard")]
    convention: ConventionArg,
    #[arg(long = "mi-convention", value_enum, default_value = "standard")]
    mi_convention: ConventionArg,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match &e {
                Error::NoSecureOperatingPoint => 3,
                Error::InvalidParam(_) | Error::NonFinite(_) => 2,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let (truncation, truncation_source) = truncation_from_env()?;
    match cli.command {
        Command::Rate(args) => run_rate(args, truncation, truncation_source),
        Command::Optimize(args) => run_optimize(args, truncation, truncation_source),
        Command::Sweep(args) => run_sweep(args, truncation, truncation_source),
        Command::Compare(args) => run_compare(args, truncation, truncation_source),
        Command::Selftest(args) => run_selftest(args, truncation),
    }
}

fn truncation_from_env() -> Result<(Truncation, TruncationSource), Error> {
    match std::env::var(TRUNCATION_ENV) {
        Ok(raw) => {
            let n: usize = raw.parse().map_err(|_| {
                Error::InvalidParam(format!(
                    "{TRUNCATION_ENV} must be a positive integer, got {raw:?}"
                ))
            })?;
            if n == 0 {
                return Err(Error::InvalidParam(format!(
                    "{TRUNCATION_ENV} must be a positive integer, got 0"
                )));
            }
            Ok((Truncation::Fixed(n), TruncationSource::Environment))
        }
        Err(_) => Ok((Truncation::default(), TruncationSource::Default)),
    }
}

fn emit(common: &CommonArgs, artifact: &str) -> Result<(), Error> {
    match &common.output {
        Some(path) => std::fs::write(path, artifact)
            .map_err(|e| Error::InvalidParam(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(artifact.as_bytes())
                .map_err(|e| Error::InvalidParam(format!("cannot write to stdout: {e}")))
        }
    }
}

fn run_rate(args: RateArgs, truncation: Truncation, source: TruncationSource) -> Result<(), Error> {
    let conventions = args.common.conventions();
    let alpha = args.alpha.unwrap_or_else(|| args.protocol.default_alpha());
    let ensemble = ModulationEnsemble::new(args.protocol.family(), alpha, 4, truncation)?;
    let channel = ChannelParams::from_fiber(args.distance, args.common.loss, args.xi)?;
    let detection = DetectionParams::new(args.common.beta, args.common.eta_det)?;
    let point = key_rate(&ensemble, &channel, &detection, conventions)?;
    if conventions.mutual_information == MiConvention::PaperLiteral && point.i_ab < 0.0 {
        eprintln!(
            "warning: I_AB = {:.6e} < 0 under the paper-literal mutual-information \
             numerator; formula regime",
            point.i_ab
        );
    }
    let meta = Metadata::new(conventions, truncation, source);
    let artifact = match args.common.format {
        FormatArg::Csv => report::points_csv([&point]),
        FormatArg::Json => report::points_json(std::slice::from_ref(&point), &meta),
    };
    emit(&args.common, &artifact)?;
    eprintln!(
        "rate: {} alpha={} L={} km xi={} -> K = {:.6e} bits/pulse",
        args.protocol.family().label(),
        alpha,
        args.distance,
        args.xi,
        point.key_rate
    );
    Ok(())
}

fn run_optimize(
    args: OptimizeArgs,
    truncation: Truncation,
    source: TruncationSource,
) -> Result<(), Error> {
    let conventions = args.common.conventions();
    let channel = ChannelParams::from_fiber(args.distance, args.common.loss, args.xi)?;
    let detection = DetectionParams::new(args.common.beta, args.common.eta_det)?;
    let optimum = optimize_alpha(
        args.protocol.family(),
        4,
        &channel,
        &detection,
        conventions,
        truncation,
        (args.alpha_min, args.alpha_max),
        args.tol,
    )?;
    let meta = Metadata::new(conventions, truncation, source);
    let artifact = match args.common.format {
        FormatArg::Csv => report::optimum_csv(&optimum),
        FormatArg::Json => report::optimum_json(&optimum, &meta),
    };
    emit(&args.common, &artifact)?;
    eprintln!(
        "optimize: {} at L={} km, xi={}: alpha_opt = {:.4}, K = {:.6e} bits/pulse",
        args.protocol.family().label(),
        args.distance,
        args.xi,
        optimum.alpha,
        optimum.key_rate
    );
    Ok(())
}

fn parse_distance_range(raw: &str) -> Result<(f64, f64, f64), Error> {
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidParam(format!(
            "distance range must be start:stop:step, got {raw:?}"
        )));
    }
    let parse = |s: &str| -> Result<f64, Error> {
        s.parse()
            .map_err(|_| Error::InvalidParam(format!("bad number {s:?} in distance range")))
    };
    Ok((parse(parts[0])?, parse(parts[1])?, parse(parts[2])?))
}

fn parse_xi_list(raw: &str) -> Result<Vec<f64>, Error> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Error::InvalidParam(format!("bad excess-noise value {s:?}")))
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn build_spec(
    family: StateFamily,
    alpha: f64,
    distance: &str,
    xi: &str,
    kmin: f64,
    common: &CommonArgs,
    truncation: Truncation,
) -> Result<SweepSpec, Error> {
    let (start, stop, step) = parse_distance_range(distance)?;
    let mut spec = SweepSpec::new(family, alpha);
    spec.distance_start_km = start;
    spec.distance_stop_km = stop;
    spec.distance_step_km = step;
    spec.excess_noise_values = parse_xi_list(xi)?;
    spec.reconciliation_efficiency = common.beta;
    spec.detector_efficiency = common.eta_det;
    spec.loss_db_per_km = common.loss;
    spec.k_min = kmin;
    spec.conventions = common.conventions();
    spec.truncation = truncation;
    spec.validate()?;
    Ok(spec)
}

fn run_sweep(
    args: SweepArgs,
    truncation: Truncation,
    source: TruncationSource,
) -> Result<(), Error> {
    let alpha = args.alpha.unwrap_or_else(|| args.protocol.default_alpha());
    let spec = build_spec(
        args.protocol.family(),
        alpha,
        &args.distance,
        &args.xi,
        args.kmin,
        &args.common,
        truncation,
    )?;
    let result = sweep_distance(&spec)?;
    let meta = Metadata::new(spec.conventions, truncation, source);
    let artifact = match args.common.format {
        FormatArg::Csv => report::sweep_csv(&result),
        FormatArg::Json => report::sweep_json(&result, &meta),
    };
    emit(&args.common, &artifact)?;
    for curve in &result.curves {
        if let Some(diag) = &curve.diagnostic {
            eprintln!("warning: curve xi={}: {diag}", curve.excess_noise);
        }
        eprintln!(
            "sweep: {} alpha={} xi={}: cutoff K>0 at {} km, K>={:.0e} at {} km",
            spec.family.label(),
            spec.alpha,
            curve.excess_noise,
            fmt_cutoff(curve.cutoff_positive_km),
            spec.k_min,
            fmt_cutoff(curve.cutoff_kmin_km),
        );
    }
    Ok(())
}

fn fmt_cutoff(cutoff: Option<f64>) -> String {
    cutoff.map_or_else(|| "none".to_string(), |km| format!("{km:.1}"))
}

fn run_compare(
    args: CompareArgs,
    truncation: Truncation,
    source: TruncationSource,
) -> Result<(), Error> {
    let template = build_spec(
        StateFamily::Pascs,
        args.alpha_pascs,
        &args.distance,
        &args.xi,
        args.kmin,
        &args.common,
        truncation,
    )?;
    ModulationEnsemble::new(StateFamily::Coherent, args.alpha_coherent, 4, truncation)?;
    let report_data = compare_protocols(&template, args.alpha_pascs, args.alpha_coherent)?;
    let meta = Metadata::new(template.conventions, truncation, source);
    let artifact = match args.common.format {
        FormatArg::Csv => report::comparison_csv(&report_data),
        FormatArg::Json => report::comparison_json(&report_data, &meta),
    };
    emit(&args.common, &artifact)?;
    for (cp, cc) in report_data
        .pascs
        .curves
        .iter()
        .zip(report_data.coherent.curves.iter())
    {
        eprintln!(
            "compare: xi={}: pascs cutoff K>0 at {} km, coherent at {} km",
            cp.excess_noise,
            fmt_cutoff(cp.cutoff_positive_km),
            fmt_cutoff(cc.cutoff_positive_km),
        );
    }
    for gap in &report_data.cutoff_gaps {
        if let Some(g) = gap.gap_positive_km {
            eprintln!(
                "compare: xi={}: cutoff gap (pascs - coherent) = {g:.1} km",
                gap.excess_noise
            );
        }
    }
    let verdict = if report_data.pascs_dominates_everywhere {
        "PASCS >= coherent at all points"
    } else {
        "coherent exceeds PASCS at some points"
    };
    eprintln!("compare: dominance verdict: {verdict}");
    Ok(())
}

fn run_selftest(args: SelftestArgs, truncation: Truncation) -> Result<(), Error> {
    let conventions = Conventions {
        noise_sign: match args.convention {
            ConventionArg::Standard => NoiseSignConvention::Standard,
            ConventionArg::PaperLiteral => NoiseSignConvention::PaperLiteral,
        },
        mutual_information: match args.mi_convention {
            ConventionArg::Standard => MiConvention::Standard,
            ConventionArg::PaperLiteral => MiConvention::PaperLiteral,
        },
    };
    let checks = selftest::run(conventions, truncation);
    print!("{}", selftest::render_table(&checks));
    if selftest::all_passed(&checks) {
        Ok(())
    } else {
        let failing = checks
            .iter()
            .find(|c| matches!(c.status, selftest::CheckStatus::Failed(_)))
            .map(|c| c.name)
            .unwrap_or("unknown");
        Err(Error::Unphysical(format!("self-test failed: {failing}")))
    }
}
