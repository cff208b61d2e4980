//! Command-line front end: estimation from CSV, closed-form evaluation,
//! simulation and the Pareto ρ / ρ_C curves.
//!
//! Exit codes: 0 success, 2 input or usage error, 3 degenerate data or a
//! measure unsupported for the sample's dimension, 4 invalid model or
//! parameters.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::analytic::{
    egm3_kappa, egm3_rho, fgm_rho_closed, gaussian_rho, gaussian_rho_c, pareto3_moments, pareto3_rho, pareto3_rho_c,
    rho_from_copula, FgmMargins, ParetoVariant,
};
use crate::empirical::{classical_hat, kappa_hat, rho_c_hat, rho_hat_general, rho_hat_nonneg, ClassicalMeasures};
use crate::error::{Error, Result};
use crate::model::{
    Copula, CopulaModel, GaussianJoint, JointModel, Marginal, Measure, ParetoII3, SampleMatrix, Variant,
};
use crate::oracle::{kappa_from_copula, mc_rho, pareto_tail_moment, tail_integral_rho};
use crate::quadrature::QuadratureSpec;
use crate::simulate::sample;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_INVALID: i32 = 4;

/// Significant digits of every printed value.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Parser)]
#[command(name = "comodep", version, about = "Comonotonicity-based dependence measures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate measures from a CSV sample (header row, numeric columns).
    Estimate(EstimateArgs),
    /// Evaluate a closed form for a parametric model.
    Analytic(AnalyticArgs),
    /// Simulate a parametric model and write the sample as CSV.
    Simulate(SimulateArgs),
    /// Tabulate the trivariate Pareto ρ and ρ_C over a grid of alpha0.
    Figure1(Figure1Args),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimatorVariant {
    General,
    Nonneg,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    pub csv: PathBuf,
    /// Comma-separated measures: rho, rho_c, kappa, pearson, kendall,
    /// spearman, gini, blomqvist.
    #[arg(long, value_delimiter = ',', default_value = "rho")]
    pub measures: Vec<Measure>,
    /// Estimator of ρ.
    #[arg(long, value_enum, default_value_t = EstimatorVariant::General)]
    pub variant: EstimatorVariant,
    /// Emit one JSON object per line.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelName {
    Fgm2,
    Egm3,
    Pareto3,
    Gaussian,
    Independent,
    Comonotone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MarginFamily {
    Uniform01,
    Exp1,
}

impl From<MarginFamily> for FgmMargins {
    fn from(m: MarginFamily) -> Self {
        match m {
            MarginFamily::Uniform01 => FgmMargins::Uniform01,
            MarginFamily::Exp1 => FgmMargins::Exp1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ParetoVariantArg {
    Paper,
    Corrected,
}

impl From<ParetoVariantArg> for ParetoVariant {
    fn from(v: ParetoVariantArg) -> Self {
        match v {
            ParetoVariantArg::Paper => ParetoVariant::Uncorrected,
            ParetoVariantArg::Corrected => ParetoVariant::Corrected,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub model: ModelName,
    /// FGM parameter, or the Pareto shape alpha.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Pareto alpha0.
    #[arg(long, default_value_t = 0.0)]
    pub a0: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a12: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a13: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a23: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a123: f64,
    /// Marginal family for copula models.
    #[arg(long, value_enum, default_value_t = MarginFamily::Uniform01)]
    pub margins: MarginFamily,
    /// Dimension of Gaussian, independent and comonotone models.
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    /// Common Gaussian mean.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub mean: f64,
    /// Common Gaussian correlation.
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub r: f64,
    /// Gaussian means as a comma-separated list; overrides --mean and --dim.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub means: Option<Vec<f64>>,
    /// Gaussian covariance, row-major and comma-separated; overrides --r.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub cov: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AnalyticMeasure {
    Rho,
    #[value(name = "rho_c")]
    RhoC,
    Kappa,
}

impl From<AnalyticMeasure> for Measure {
    fn from(m: AnalyticMeasure) -> Self {
        match m {
            AnalyticMeasure::Rho => Measure::Rho,
            AnalyticMeasure::RhoC => Measure::RhoC,
            AnalyticMeasure::Kappa => Measure::Kappa,
        }
    }
}

#[derive(Debug, Args)]
pub struct AnalyticArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value_t = AnalyticMeasure::Rho)]
    pub measure: AnalyticMeasure,
    /// Comonotone moment used for the Pareto ρ.
    #[arg(long, value_enum, default_value_t = ParetoVariantArg::Corrected)]
    pub variant: ParetoVariantArg,
    /// Also evaluate an independent numerical oracle and print the gap.
    #[arg(long)]
    pub check: bool,
    /// Seed for Monte Carlo checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Figure1Args {
    #[arg(long)]
    pub alpha: f64,
    /// Grid of alpha0 values as lo:hi:step.
    #[arg(long, default_value = "0:10:0.5")]
    pub a0_grid: String,
    #[arg(long, value_enum, default_value_t = ParetoVariantArg::Corrected)]
    pub variant: ParetoVariantArg,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Formats `v` with [`SIGNIFICANT_DIGITS`] significant digits, dropping
/// trailing zeros.
pub fn format_value(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        let fixed = format!("{:.*}", decimals, sci.parse::<f64>().expect("round trip"));
        trim_zeros(&fixed)
    } else {
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn rounded(v: f64) -> f64 {
    format_value(v).parse().unwrap_or(v)
}

/// One output record; the JSON schema is `{measure, variant, value, n, seed}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportLine {
    pub measure: String,
    pub variant: String,
    pub value: f64,
    pub n: Option<usize>,
    pub seed: Option<u64>,
}

fn emit(out: &mut dyn Write, lines: &[ReportLine], json: bool) -> io::Result<()> {
    for l in lines {
        if json {
            let rec = ReportLine { value: rounded(l.value), ..l.clone() };
            writeln!(out, "{}", serde_json::to_string(&rec).expect("serializable record"))?;
        } else {
            writeln!(out, "{:<10} {:<18} {}", l.measure, l.variant, format_value(l.value))?;
        }
    }
    Ok(())
}

struct Failure {
    code: i32,
    error: Error,
}

fn fail(code: i32) -> impl Fn(Error) -> Failure {
    move |error| Failure { code, error }
}

/// Exit code for an error raised while estimating from data.
fn estimate_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::Io(_) => EXIT_INPUT,
        Error::DegenerateData(_) | Error::DegenerateDenominator { .. } | Error::DimensionUnsupported { .. } => {
            EXIT_DEGENERATE
        }
        _ => EXIT_INVALID,
    }
}

fn model_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) | Error::Parse { .. } => EXIT_INPUT,
        _ => EXIT_INVALID,
    }
}

fn estimate_one(
    sample: &SampleMatrix,
    measure: Measure,
    variant: EstimatorVariant,
    classical: &mut Option<ClassicalMeasures>,
) -> Result<(f64, Variant)> {
    let general = Variant::EstimatorGeneral;
    let mut classical_value = |pick: fn(&ClassicalMeasures) -> f64| -> Result<(f64, Variant)> {
        if classical.is_none() {
            *classical = Some(classical_hat(sample)?);
        }
        Ok((pick(classical.as_ref().unwrap()), general))
    };
    match measure {
        Measure::Rho => match variant {
            EstimatorVariant::General => Ok((rho_hat_general(sample)?, general)),
            EstimatorVariant::Nonneg => Ok((rho_hat_nonneg(sample)?, Variant::EstimatorNonneg)),
        },
        Measure::RhoC => Ok((rho_c_hat(sample)?, general)),
        Measure::Kappa => Ok((kappa_hat(sample)?, general)),
        Measure::Pearson => classical_value(|c| c.pearson),
        Measure::Kendall => classical_value(|c| c.kendall),
        Measure::Spearman => classical_value(|c| c.spearman),
        Measure::Gini => classical_value(|c| c.gini),
        Measure::Blomqvist => classical_value(|c| c.blomqvist),
    }
}

fn cmd_estimate(args: &EstimateArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let sample = SampleMatrix::read_csv_path(&args.csv).map_err(|e| Failure { code: estimate_code(&e), error: e })?;
    let mut classical = None;
    let mut lines = Vec::new();
    for &measure in &args.measures {
        if measure.is_bivariate() && sample.ncols() != 2 {
            return Err(Failure {
                code: EXIT_DEGENERATE,
                error: Error::DimensionUnsupported { dim: sample.ncols(), supported: "2 (bivariate measure)" },
            });
        }
        let (value, variant) = estimate_one(&sample, measure, args.variant, &mut classical)
            .map_err(|e| Failure { code: estimate_code(&e), error: e })?;
        lines.push(ReportLine {
            measure: measure.name().into(),
            variant: variant.name().into(),
            value,
            n: Some(sample.nrows()),
            seed: None,
        });
    }
    emit(out, &lines, args.json).map_err(|e| fail(EXIT_INPUT)(e.into()))
}

fn require_alpha(m: &ModelArgs) -> Result<f64> {
    m.alpha.ok_or_else(|| Error::InvalidParameter(format!("--alpha is required for {:?}", m.model)))
}

fn margin(m: &ModelArgs) -> Marginal {
    match m.margins {
        MarginFamily::Uniform01 => Marginal::standard_uniform(),
        MarginFamily::Exp1 => Marginal::exponential(1.0).expect("unit rate"),
    }
}

fn gaussian_model(m: &ModelArgs) -> Result<GaussianJoint> {
    let means = m.means.clone().unwrap_or_else(|| vec![m.mean; m.dim]);
    let d = means.len();
    let cov = match &m.cov {
        Some(c) if c.len() == d * d => DMatrix::from_row_slice(d, d, c),
        Some(c) => return Err(Error::InvalidParameter(format!("--cov has {} entries, expected {}", c.len(), d * d))),
        None => DMatrix::from_fn(d, d, |i, j| if i == j { 1.0 } else { m.r }),
    };
    GaussianJoint::new(DVector::from_vec(means), cov)
}

/// Builds the joint model described by the flags.
pub fn build_model(m: &ModelArgs) -> Result<JointModel> {
    Ok(match m.model {
        ModelName::Fgm2 => CopulaModel::with_identical_marginals(Copula::fgm2(require_alpha(m)?)?, margin(m)).into(),
        ModelName::Egm3 => {
            CopulaModel::with_identical_marginals(Copula::egm3(m.a12, m.a13, m.a23, m.a123)?, margin(m)).into()
        }
        ModelName::Independent => CopulaModel::with_identical_marginals(Copula::independent(m.dim)?, margin(m)).into(),
        ModelName::Comonotone => CopulaModel::with_identical_marginals(Copula::comonotone(m.dim)?, margin(m)).into(),
        ModelName::Pareto3 => ParetoII3::standard(require_alpha(m)?, m.a0)?.into(),
        ModelName::Gaussian => gaussian_model(m)?.into(),
    })
}

const CHECK_MC_ROWS: usize = 200_000;

fn analytic_values(args: &AnalyticArgs) -> Result<Vec<ReportLine>> {
    let m = &args.model;
    let measure: Measure = args.measure.into();
    let unsupported = || Error::UnsupportedModel(format!("{} has no closed form for {:?}", measure, m.model));
    let quad = QuadratureSpec::default().with_tolerance(1e-9)?;
    let line = |variant: Variant, value: f64, n: Option<usize>, seed: Option<u64>| ReportLine {
        measure: measure.name().into(),
        variant: variant.name().into(),
        value,
        n,
        seed,
    };
    let model = build_model(m)?;
    let (closed, check): (f64, Option<ReportLine>) = match (m.model, args.measure) {
        (ModelName::Fgm2, _) => {
            // for two coordinates ρ, ρ_C and κ coincide
            let closed = fgm_rho_closed(require_alpha(m)?, m.margins.into())?;
            let check = match (&model, args.check) {
                (JointModel::Copula(cm), true) => Some(match args.measure {
                    AnalyticMeasure::Kappa => kappa_from_copula(cm, &quad)?.value,
                    _ => rho_from_copula(cm, &quad)?.value,
                }),
                _ => None,
            };
            (closed, check.map(|v| line(Variant::Quadrature, v, None, None)))
        }
        (ModelName::Egm3, AnalyticMeasure::Rho | AnalyticMeasure::Kappa) => {
            if m.margins != MarginFamily::Uniform01 {
                return Err(Error::UnsupportedModel("EGM closed forms assume uniform margins".into()));
            }
            let kappa = args.measure == AnalyticMeasure::Kappa;
            let closed =
                if kappa { egm3_kappa(m.a12, m.a13, m.a23, m.a123)? } else { egm3_rho(m.a12, m.a13, m.a23, m.a123)? };
            let check = match (&model, args.check) {
                (JointModel::Copula(cm), true) => {
                    Some(if kappa { kappa_from_copula(cm, &quad)?.value } else { rho_from_copula(cm, &quad)?.value })
                }
                _ => None,
            };
            (closed, check.map(|v| line(Variant::Quadrature, v, None, None)))
        }
        (ModelName::Pareto3, AnalyticMeasure::Rho) => {
            let alpha = require_alpha(m)?;
            let closed = pareto3_rho(m.a0, alpha, args.variant.into())?;
            let check = if args.check { Some(tail_integral_rho(&model, &quad)?.value) } else { None };
            (closed, check.map(|v| line(Variant::Quadrature, v, None, None)))
        }
        (ModelName::Pareto3, AnalyticMeasure::RhoC) => {
            let alpha = require_alpha(m)?;
            let closed = pareto3_rho_c(m.a0, alpha)?;
            let check = if args.check {
                let mean = pareto3_moments(m.a0, alpha)?.mean;
                let pair = pareto_tail_moment(m.a0, alpha, 2, &quad)?.value;
                let marg = ParetoII3::standard(alpha, m.a0)?.marginal(0);
                let com = crate::analytic::comonotone_product_moment(&[marg.clone(), marg], &quad)?.value;
                Some((pair - mean * mean) / (com - mean * mean))
            } else {
                None
            };
            (closed, check.map(|v| line(Variant::Quadrature, v, None, None)))
        }
        (ModelName::Gaussian, AnalyticMeasure::Rho | AnalyticMeasure::RhoC) => {
            let JointModel::Gaussian(g) = &model else { unreachable!("gaussian flags build a Gaussian model") };
            let closed = if args.measure == AnalyticMeasure::Rho { gaussian_rho(g)? } else { gaussian_rho_c(g)? };
            let check = if args.check && args.measure == AnalyticMeasure::Rho {
                let mc = mc_rho(&model, CHECK_MC_ROWS, args.seed)?;
                Some(line(Variant::MonteCarlo, mc.value, Some(mc.n), Some(mc.seed)))
            } else {
                None
            };
            (closed, check)
        }
        _ => return Err(unsupported()),
    };
    let mut lines = vec![line(Variant::ClosedForm, closed, None, None)];
    if let Some(c) = check {
        let gap = (c.value - closed).abs();
        lines.push(c);
        lines.push(ReportLine {
            measure: measure.name().into(),
            variant: "abs_gap".into(),
            value: gap,
            n: None,
            seed: None,
        });
    }
    Ok(lines)
}

fn cmd_analytic(args: &AnalyticArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let lines = analytic_values(args).map_err(|e| Failure { code: model_code(&e), error: e })?;
    emit(out, &lines, args.json).map_err(|e| fail(EXIT_INPUT)(e.into()))
}

fn open_output(
    path: &Option<PathBuf>,
    stdout: &mut dyn Write,
    write: impl FnOnce(&mut dyn Write) -> Result<()>,
) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            write(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => write(stdout),
    }
}

fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let code = |e: Error| Failure { code: model_code(&e), error: e };
    let model = build_model(&args.model).map_err(code)?;
    let s = sample(&model, args.n, args.seed).map_err(code)?;
    open_output(&args.out, out, |w| s.write_csv(w)).map_err(code)
}

/// Parses `lo:hi:step` into the grid `lo, lo + step, ...` up to `hi`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::InvalidParameter(format!("grid {spec:?} is not lo:hi:step"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let v: Vec<f64> = parts.iter().map(|p| p.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<_>>()?;
    let (lo, hi, step) = (v[0], v[1], v[2]);
    if !(step > 0.0) || !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(bad());
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| lo + k as f64 * step).collect())
}

fn cmd_figure1(args: &Figure1Args, out: &mut dyn Write) -> Result<(), Failure> {
    let code = |e: Error| Failure { code: model_code(&e), error: e };
    let grid = parse_grid(&args.a0_grid).map_err(code)?;
    let variant: ParetoVariant = args.variant.into();
    let rows = grid
        .iter()
        .map(|&a0| Ok((a0, pareto3_rho(a0, args.alpha, variant)?, pareto3_rho_c(a0, args.alpha)?)))
        .collect::<Result<Vec<_>>>()
        .map_err(code)?;
    open_output(&args.out, out, |w| {
        writeln!(w, "a0,rho,rho_c")?;
        for (a0, rho, rho_c) in &rows {
            writeln!(w, "{},{},{}", format_value(*a0), format_value(*rho), format_value(*rho_c))?;
        }
        Ok(())
    })
    .map_err(code)
}

fn configure_threads() {
    if let Some(n) = std::env::var("COMODEP_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        // an already-initialized pool keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

/// Runs the parsed command, writing results to `out` and diagnostics to
/// `err`; returns the exit code.
pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Estimate(a) => cmd_estimate(a, out),
        Command::Analytic(a) => cmd_analytic(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Figure1(a) => cmd_figure1(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.error);
            f.code
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli, out, err),
        Err(e) => {
            let _ = write!(err, "{e}");
            if e.use_stderr() {
                EXIT_INPUT
            } else {
                // --help and --version
                let _ = write!(out, "{e}");
                EXIT_OK
            }
        }
    }
}

/// Entry point of the `comodep` binary.
pub fn run_from_env() -> i32 {
    configure_threads();
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
