use std::fmt;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use smalldev::brownian::{self, sup_cdf, wiener_term_prob};
use smalldev::dichotomy::{
    classify_psi, increment_decay_exponent, partial_sum_diagnostic,
    partial_sum_diagnostic_tabulated, partial_sum_trend, PsiSpec, SummandMode,
};
use smalldev::series::{
    self, critical_threshold, limit_constant, series_profile, weighted_series_wiener, DriftSpec,
    Scaling, WeightParams,
};
use smalldev::simulate::{
    self, estimate_small_dev, gaussian_grid_oracle, rademacher_oracle_ln, sample_walk_maxima,
    IncrementLaw, LawKind, McConfig, ProbabilitySource,
};
use smalldev::specfun;
use smalldev::Error;

use crate::output::Output;

#[derive(Debug)]
pub enum CliError {
    Lib(Error),
    Usage(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Lib(Error::Argument { .. }) => 2,
            CliError::Lib(Error::Domain { .. }) => 3,
            CliError::Lib(Error::Divergent { .. }) => 4,
            CliError::Lib(Error::Numerical { .. }) | CliError::Io(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

/// Command-line flag carrying a library parameter.
fn flag(param: &str) -> String {
    match param {
        "abs_tol" | "rel_tol" => "--tol".into(),
        "psi" => "--c/--b/--d".into(),
        "cutoffs" => "--cutoffs".into(),
        "n_schedule" => "--ns".into(),
        "threshold" => "--eps".into(),
        other => format!("--{}", other.replace('_', "-")),
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lib(e @ Error::Divergent { .. }) => write!(f, "--eps: {e}"),
            CliError::Lib(e) => match e.param() {
                Some(p) => write!(f, "{}: {e}", flag(p)),
                None => write!(f, "{e}"),
            },
            CliError::Usage(msg) | CliError::Io(msg) => f.write_str(msg),
        }
    }
}

/// Result of a command plus what its manifest needs.
pub struct Outcome {
    pub output: Output,
    pub params: Value,
    pub seeds: Vec<u64>,
    pub workers: Option<usize>,
}

impl Outcome {
    fn new(output: Output, params: &impl Serialize) -> Self {
        Outcome {
            output,
            params: to_value(params),
            seeds: Vec::new(),
            workers: None,
        }
    }

    fn seeded(mut self, seed: u64, workers: usize) -> Self {
        self.seeds = vec![seed];
        self.workers = Some(workers);
        self
    }
}

fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("plain data serialises")
}

fn drift(tau: f64) -> DriftSpec {
    DriftSpec::from_tau(tau)
}

fn parse_law(name: &str, alpha: Option<f64>) -> Result<LawKind, CliError> {
    let kind: LawKind = name.replace('-', "_").parse()?;
    match (kind, alpha) {
        (LawKind::SymmetricPareto { .. }, Some(alpha)) => Ok(LawKind::SymmetricPareto { alpha }),
        (_, Some(_)) => Err(CliError::Usage(
            "--alpha: only applies to --law symmetric_pareto".into(),
        )),
        (kind, None) => Ok(kind),
    }
}

fn build_law(
    name: &str,
    sigma: f64,
    alpha: Option<f64>,
    moment_eps: Option<f64>,
) -> Result<IncrementLaw, CliError> {
    let kind = parse_law(name, alpha)?;
    Ok(match moment_eps {
        Some(m) => IncrementLaw::new(kind, sigma, m)?,
        None => IncrementLaw::with_sigma(kind, sigma)?,
    })
}

#[derive(Debug, Args, Serialize)]
pub struct BrownianCdfArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub x: f64,
    /// Absolute truncation tolerance.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Also report the leading-order form (4/pi) exp(-pi^2 / (8 x^2)).
    #[arg(long)]
    pub asymptotic: bool,
}

pub fn brownian_cdf(args: BrownianCdfArgs) -> Result<Outcome, CliError> {
    let r = sup_cdf(args.x, args.tol)?;
    let mut value = to_value(&r);
    if args.asymptotic {
        value["asymptotic"] = json!(brownian::sup_cdf_asymptotic(args.x)?);
    }
    Ok(Outcome::new(Output::record(value), &args))
}

#[derive(Debug, Args, Serialize)]
pub struct WienerTermArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub tau: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

pub fn wiener_term(args: WienerTermArgs) -> Result<Outcome, CliError> {
    let r = wiener_term_prob(args.n, args.eps, drift(args.tau), args.tol)?;
    Ok(Outcome::new(Output::record(to_value(&r)), &args))
}

#[derive(Debug, Args, Serialize)]
pub struct SeriesArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub r: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub tau: f64,
    /// Threshold multiplier; give this or --lambda.
    #[arg(
        long,
        allow_hyphen_values = true,
        conflicts_with = "lambda",
        required_unless_present = "lambda"
    )]
    pub eps: Option<f64>,
    /// eps^-2 - (r - 1).
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    /// Relative accuracy target.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Fixed cutoffs (comma separated) instead of the automatic one; one row each.
    #[arg(long, value_delimiter = ',')]
    pub cutoffs: Option<Vec<u64>>,
}

pub fn series(args: SeriesArgs) -> Result<Outcome, CliError> {
    let params = WeightParams::new(args.r, args.a)?;
    // lambda <= 0 maps to eps at or above the threshold and is rejected as divergent.
    let eps = match (args.eps, args.lambda) {
        (Some(eps), _) => eps,
        (None, Some(lambda)) => params.eps_for_lambda(lambda),
        (None, None) => unreachable!("clap requires --eps or --lambda"),
    };
    let output = match &args.cutoffs {
        Some(cutoffs) => {
            let rows = series_profile(params, eps, drift(args.tau), cutoffs)?;
            Output::record(to_value(&rows))
        }
        None => Output::record(to_value(&weighted_series_wiener(
            params,
            eps,
            drift(args.tau),
            args.tol,
        )?)),
    };
    Ok(Outcome::new(output, &args))
}

#[derive(Debug, Args, Serialize)]
pub struct LimitProbeArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub r: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub tau: f64,
    /// Strictly decreasing schedule, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub lambdas: Vec<f64>,
    /// Relative accuracy of each series evaluation.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Relative agreement required between extrapolated and analytic limits.
    #[arg(long, default_value_t = 0.02)]
    pub agreement: f64,
}

pub fn limit_probe(args: LimitProbeArgs) -> Result<Outcome, CliError> {
    let params = WeightParams::new(args.r, args.a)?;
    let probe = series::limit_probe(
        params,
        drift(args.tau),
        &args.lambdas,
        args.tol,
        args.agreement,
    )?;
    let table = probe
        .rows
        .iter()
        .map(|row| json!({"lambda": row.lambda, "normalized": row.normalized}))
        .collect();
    let output = Output {
        json: to_value(&probe),
        table: Value::Array(table),
        footer: vec![
            ("extrapolated".into(), json!(probe.extrapolated)),
            ("analytic".into(), json!(probe.analytic)),
        ],
    };
    Ok(Outcome::new(output, &args))
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingArg {
    Phi,
    SqrtNOverLogN,
}

#[derive(Debug, Args, Serialize)]
pub struct ConstantsArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub r: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub tau: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub sigma: f64,
    #[arg(long, value_enum, default_value = "phi")]
    pub scaling: ScalingArg,
}

pub fn constants(args: ConstantsArgs) -> Result<Outcome, CliError> {
    let params = WeightParams::new(args.r, args.a)?;
    let scaling = match args.scaling {
        ScalingArg::Phi => Scaling::Phi,
        ScalingArg::SqrtNOverLogN => Scaling::SqrtNOverLogN,
    };
    let value = json!({
        "limit_constant": limit_constant(params, args.tau),
        "critical_threshold": critical_threshold(params, args.sigma, scaling)?,
    });
    Ok(Outcome::new(Output::record(value), &args))
}

#[derive(Debug, Args, Serialize)]
pub struct GammaArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub z: f64,
}

pub fn gamma(args: GammaArgs) -> Result<Outcome, CliError> {
    let value = json!({ "value": specfun::gamma_fn(args.z)? });
    Ok(Outcome::new(Output::record(value), &args))
}

#[derive(Debug, Args, Serialize)]
pub struct TailIntegralArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub y0: f64,
}

pub fn tail_integral(args: TailIntegralArgs) -> Result<Outcome, CliError> {
    let r = specfun::tail_integral(args.lambda, args.a, args.y0)?;
    Ok(Outcome::new(Output::record(to_value(&r)), &args))
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Exponential,
    WienerProb,
}

#[derive(Debug, Args, Serialize)]
pub struct DichotomyArgs {
    /// psi(n) = c log n + b log log n + d.
    #[arg(long, allow_hyphen_values = true, required_unless_present = "psi_file")]
    pub c: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub b: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub d: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub r: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a: f64,
    /// Largest cutoff N.
    #[arg(long, default_value_t = 1_000_000)]
    pub n: u64,
    #[arg(long, value_enum, default_value = "exponential")]
    pub mode: ModeArg,
    /// Tabulated psi(1), psi(2), ..., one value per line; no verdict is given.
    #[arg(long, conflicts_with = "c")]
    pub psi_file: Option<PathBuf>,
}

pub fn dichotomy(args: DichotomyArgs) -> Result<Outcome, CliError> {
    let params = WeightParams::new(args.r, args.a)?;
    let mode = match args.mode {
        ModeArg::Exponential => SummandMode::Exponential,
        ModeArg::WienerProb => SummandMode::WienerProb,
    };
    let (verdict, rows) = match (&args.psi_file, args.c) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("--psi-file: {e}")))?;
            let values = text
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::Usage(format!("--psi-file: {e}")))?;
            (
                None,
                partial_sum_diagnostic_tabulated(&values, params, mode)?,
            )
        }
        (None, Some(c)) => {
            let psi = PsiSpec::new(c, args.b, args.d)?;
            (
                Some(classify_psi(psi, params)?),
                partial_sum_diagnostic(psi, params, args.n, mode)?,
            )
        }
        (None, None) => unreachable!("clap requires --c or --psi-file"),
    };
    let trend = partial_sum_trend(&rows);
    let decay = increment_decay_exponent(&rows);
    let json = json!({
        "verdict": verdict,
        "trend": trend,
        "increment_decay_exponent": decay,
        "rows": rows,
    });
    let mut footer = Vec::new();
    if let Some(v) = verdict {
        footer.push(("verdict".into(), to_value(&v)));
    }
    if let Some(t) = trend {
        footer.push(("trend".into(), to_value(&t)));
    }
    let output = Output {
        json,
        table: to_value(&rows),
        footer,
    };
    Ok(Outcome::new(output, &args))
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    /// rademacher, gaussian, uniform_centered, exponential_centered or symmetric_pareto.
    #[arg(long)]
    pub law: String,
    #[arg(long)]
    pub n: u64,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub tau: f64,
    #[arg(long)]
    pub samples: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, default_value_t = 0.95)]
    pub confidence: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub sigma: f64,
    /// Tail index for symmetric_pareto.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Moment order with E|X|^(2 + moment_eps) finite.
    #[arg(long, allow_hyphen_values = true)]
    pub moment_eps: Option<f64>,
}

pub fn simulate(args: SimulateArgs) -> Result<Outcome, CliError> {
    let law = build_law(&args.law, args.sigma, args.alpha, args.moment_eps)?;
    let cfg = McConfig::new(args.samples, args.seed, args.workers, args.confidence)?;
    let est = estimate_small_dev(&law, args.n, args.eps, drift(args.tau), &cfg)?;
    let value = json!({
        "law": law.kind.name(),
        "n": args.n,
        "eps": args.eps,
        "tau": args.tau,
        "sigma": law.sigma,
        "estimate": est,
    });
    Ok(Outcome::new(Output::record(value), &args).seeded(args.seed, args.workers))
}

#[derive(Debug, Args, Serialize)]
pub struct WalkMaxArgs {
    #[arg(long)]
    pub law: String,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub samples: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub sigma: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
}

pub fn walk_max(args: WalkMaxArgs) -> Result<Outcome, CliError> {
    let law = build_law(&args.law, args.sigma, args.alpha, None)?;
    let maxima = sample_walk_maxima(&law, args.n, args.samples, args.seed, args.workers)?;
    let rows: Vec<Value> = maxima
        .iter()
        .enumerate()
        .map(|(i, m)| json!({"sample": i, "m_n": m}))
        .collect();
    let output = Output {
        json: json!({"law": law.kind.name(), "n": args.n, "sigma": law.sigma, "m_n": maxima}),
        table: Value::Array(rows),
        footer: Vec::new(),
    };
    Ok(Outcome::new(output, &args).seeded(args.seed, args.workers))
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleKind {
    Rademacher,
    Gaussian,
}

#[derive(Debug, Args, Serialize)]
pub struct OracleArgs {
    #[arg(long, value_enum)]
    pub kind: OracleKind,
    #[arg(long)]
    pub n: u64,
    /// Barrier in units of sigma.
    #[arg(long, allow_hyphen_values = true)]
    pub x: f64,
    /// Grid points for the gaussian oracle.
    #[arg(long, default_value_t = 1024)]
    pub grid: usize,
}

pub fn oracle(args: OracleArgs) -> Result<Outcome, CliError> {
    let value = match args.kind {
        OracleKind::Rademacher => {
            let ln = rademacher_oracle_ln(args.n, args.x)?;
            json!({"value": ln.exp(), "ln_value": if ln.is_finite() { json!(ln) } else { Value::Null }, "error_estimate": 0.0})
        }
        OracleKind::Gaussian => to_value(&gaussian_grid_oracle(args.n, args.x, args.grid)?),
    };
    Ok(Outcome::new(Output::record(value), &args))
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Oracle,
    Mc,
}

#[derive(Debug, Args, Serialize)]
pub struct ExponentCheckArgs {
    #[arg(long)]
    pub law: String,
    #[arg(long, allow_hyphen_values = true)]
    pub x: f64,
    /// Increasing walk lengths, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub ns: Vec<u64>,
    #[arg(long, value_enum, default_value = "oracle")]
    pub method: MethodArg,
    #[arg(long, default_value_t = 1024)]
    pub grid: usize,
    /// Monte Carlo only.
    #[arg(long, required_if_eq("method", "mc"))]
    pub samples: Option<u64>,
    /// Monte Carlo only.
    #[arg(long, required_if_eq("method", "mc"))]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, default_value_t = 0.95)]
    pub confidence: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub sigma: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
}

pub fn exponent_check(args: ExponentCheckArgs) -> Result<Outcome, CliError> {
    let law = build_law(&args.law, args.sigma, args.alpha, None)?;
    let source =
        match (args.method, args.samples, args.seed) {
            (MethodArg::Oracle, _, _) => ProbabilitySource::Oracle {
                grid_points: args.grid,
            },
            (MethodArg::Mc, Some(samples), Some(seed)) => ProbabilitySource::MonteCarlo(
                McConfig::new(samples, seed, args.workers, args.confidence)?,
            ),
            (MethodArg::Mc, _, _) => {
                unreachable!("clap requires --samples and --seed with --method mc")
            }
        };
    let rows = simulate::exponent_check(&law, args.x, &args.ns, source)?;
    let outcome = Outcome::new(Output::record(to_value(&rows)), &args);
    Ok(match (args.method, args.seed) {
        (MethodArg::Mc, Some(seed)) => outcome.seeded(seed, args.workers),
        _ => outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_error_kind() {
        let domain = CliError::Lib(Error::Domain {
            param: "x",
            reason: "bad".into(),
        });
        assert_eq!(domain.exit_code(), 3);
        assert!(domain.to_string().starts_with("--x: "));
        let divergent = CliError::Lib(Error::Divergent {
            eps: 1.1,
            threshold: 1.0,
        });
        assert_eq!(divergent.exit_code(), 4);
        assert_eq!(CliError::Usage("u".into()).exit_code(), 2);
        let arg = CliError::Lib(Error::Argument {
            param: "r",
            reason: "r > 1 required".into(),
        });
        assert_eq!(arg.exit_code(), 2);
        assert!(arg.to_string().starts_with("--r: "));
    }

    #[test]
    fn flag_names() {
        assert_eq!(flag("abs_tol"), "--tol");
        assert_eq!(flag("moment_eps"), "--moment-eps");
        assert_eq!(flag("lambdas"), "--lambdas");
    }

    #[test]
    fn law_names_accept_either_separator() {
        assert_eq!(
            parse_law("uniform-centered", None).unwrap(),
            LawKind::UniformCentered
        );
        assert_eq!(
            parse_law("symmetric_pareto", Some(3.0)).unwrap(),
            LawKind::SymmetricPareto { alpha: 3.0 }
        );
        assert!(parse_law("gaussian", Some(3.0)).is_err());
        assert!(parse_law("cauchy", None).is_err());
    }
}
