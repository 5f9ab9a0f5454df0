//! Command implementations behind the `bernlog` binary. Each `cmd_*` takes
//! its parsed arguments and returns an [`Output`] holding the rendered table
//! and the process exit code.

use std::fmt::Write as _;
use std::path::PathBuf;

use bernlog::bounds::{grouped_tail_bound, Side};
use bernlog::mgf::{check_bernstein_condition, mgf_boundary_scan, mgf_scan, moment_scan};
use bernlog::numeric::log_symmetric_unit_grid;
use bernlog::report::{distribution_rows, to_csv_string, BoundRow, MgfScanRow};
use bernlog::verify::{exact_for, random_bernoulli, random_grouped, random_multinoulli, verify_ensemble, VerifyOutcome};
use bernlog::{
    chernoff_optimize, compare, multinoulli_bound, simulate_mgf, simulate_tail, BernoulliEnsemble,
    Ensemble, GroupedEnsemble, MultinoulliEnsemble, SimConfig, TailBoundReport,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "bernlog", version, about = "Tail bounds for Bernoulli log-likelihood sums")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// New vs Hoeffding vs classical Bernstein bounds on a t grid
    Bounds(BoundsArgs),
    /// Check every applicable bound against the exact distribution
    Verify(VerifyArgs),
    /// Evaluate G(p, λ) and its envelope on a probability grid
    MgfScan(MgfScanArgs),
    /// Moment condition report or a single-order moment profile
    Moments(MomentsArgs),
    /// Monte Carlo tail (and optionally MGF) estimate
    Simulate(SimulateArgs),
    /// Numerically minimize the Chernoff exponent
    Chernoff(ChernoffArgs),
    /// Exact distribution of the statistic as (value, mass) rows
    Exact(ExactArgs),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Ways to supply an ensemble on the command line.
#[derive(Debug, Clone, Default, Args)]
pub struct EnsembleArgs {
    /// Comma-separated Bernoulli probabilities
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub probs: Option<Vec<f64>>,
    /// Constant probability for all `--n` variables
    #[arg(long)]
    pub probs_const: Option<f64>,
    /// Constant natural-log probability (p = e^L) for all `--n` variables
    #[arg(long, allow_hyphen_values = true)]
    pub probs_log_const: Option<f64>,
    /// Number of variables for the constant forms
    #[arg(long)]
    pub n: Option<usize>,
    /// Ensemble JSON file: {"bernoulli": [...]}, {"multinoulli": [[...]]} or {"grouped": [[...]]}
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Grouped ensemble as an inline JSON array of arrays
    #[arg(long)]
    pub grouped: Option<String>,
    /// Multinoulli ensemble as an inline JSON array of rows
    #[arg(long)]
    pub multinoulli: Option<String>,
}

impl EnsembleArgs {
    fn given(&self) -> usize {
        [
            self.probs.is_some(),
            self.probs_const.is_some(),
            self.probs_log_const.is_some(),
            self.input.is_some(),
            self.grouped.is_some(),
            self.multinoulli.is_some(),
        ]
        .iter()
        .filter(|&&b| b)
        .count()
    }

    pub fn resolve(&self) -> Result<Ensemble, CliError> {
        match self.given() {
            0 => return Err(CliError::usage("no ensemble given (use --probs, --probs-const, --probs-log-const, --input, --grouped or --multinoulli)")),
            1 => {}
            _ => return Err(CliError::usage("give exactly one ensemble source")),
        }
        let constant = |p: f64| -> Result<Ensemble, CliError> {
            let n = self
                .n
                .ok_or_else(|| CliError::usage("--probs-const/--probs-log-const need --n"))?;
            Ok(BernoulliEnsemble::constant(p, n)?.into())
        };
        if let Some(p) = &self.probs {
            return Ok(BernoulliEnsemble::new(p.clone())?.into());
        }
        if let Some(p) = self.probs_const {
            return constant(p);
        }
        if let Some(l) = self.probs_log_const {
            if l > 0.0 {
                return Err(CliError::usage("--probs-log-const must be <= 0"));
            }
            return constant(l.exp());
        }
        if let Some(path) = &self.input {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
            return Ok(Ensemble::from_json(&text)?);
        }
        if let Some(g) = &self.grouped {
            let groups: Vec<Vec<f64>> =
                serde_json::from_str(g).map_err(|e| CliError::usage(format!("--grouped: {e}")))?;
            return Ok(GroupedEnsemble::new(groups)?.into());
        }
        if let Some(m) = &self.multinoulli {
            let rows: Vec<Vec<f64>> =
                serde_json::from_str(m).map_err(|e| CliError::usage(format!("--multinoulli: {e}")))?;
            return Ok(MultinoulliEnsemble::new(rows)?.into());
        }
        unreachable!("one source is set")
    }
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    /// Deviation thresholds (comma-separated)
    #[arg(long, required = true, value_delimiter = ',')]
    pub t: Vec<f64>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    /// Verify this many generated ensembles of each kind instead of one input
    #[arg(long)]
    pub random: Option<usize>,
    /// Largest variable count for generated ensembles
    #[arg(long, default_value_t = 12)]
    pub max_n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct MgfScanArgs {
    /// λ values (comma-separated)
    #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambda: Vec<f64>,
    /// Log10 grid `lo:hi:count` for p, e.g. -12:-1:100
    #[arg(long, allow_hyphen_values = true)]
    pub p_grid_log: Option<String>,
    /// Explicit probabilities (comma-separated)
    #[arg(long, value_delimiter = ',')]
    pub p_grid: Option<Vec<f64>>,
    /// Treat the grid as a sequence p -> 0 and report a divergence verdict per λ
    #[arg(long)]
    pub boundary: bool,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct MomentsArgs {
    /// Highest moment order checked
    #[arg(long, default_value_t = 20)]
    pub m_max: u32,
    /// Number of points in the log-symmetric grid over [1e-12, 1 - 1e-12]
    #[arg(long, default_value_t = 400)]
    pub grid: usize,
    /// Emit the |E[Y^m]| profile for this single order instead
    #[arg(long)]
    pub scan: Option<u32>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long)]
    pub t: f64,
    #[arg(long, default_value_t = bernlog::montecarlo::DEFAULT_REPLICATES)]
    pub replicates: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = bernlog::montecarlo::DEFAULT_CONFIDENCE)]
    pub confidence: f64,
    /// Worker threads (defaults to available parallelism)
    #[arg(long)]
    pub workers: Option<usize>,
    /// Also estimate E[exp(λ S)] (Bernoulli ensembles only)
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Left,
    Right,
}

#[derive(Debug, Clone, Args)]
pub struct ChernoffArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub t: f64,
    #[arg(long, value_enum, default_value_t = SideArg::Left)]
    pub side: SideArg,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Library(bernlog::Error),
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        EXIT_USAGE
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Library(e) => write!(f, "error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<bernlog::Error> for CliError {
    fn from(e: bernlog::Error) -> Self {
        CliError::Library(e)
    }
}

/// Rendered stdout text, diagnostics for stderr, and the exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Output {
            stdout,
            stderr: String::new(),
            code: EXIT_OK,
        }
    }
}

fn render<T: Serialize, R: Serialize>(format: Format, json: &T, rows: &[R]) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(json).map_err(|e| CliError::usage(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => Ok(to_csv_string(rows)?),
    }
}

fn check_thresholds(t: &[f64]) -> Result<(), CliError> {
    if t.is_empty() || t.iter().any(|&x| !(x > 0.0) || x.is_infinite()) {
        return Err(CliError::usage("--t values must be positive and finite"));
    }
    Ok(())
}

/// Bound comparison table. Bernoulli input yields new/Hoeffding/classical
/// Bernstein rows; grouped and multinoulli inputs yield their own bound with
/// `ε = t / n` for the latter.
pub fn cmd_bounds(args: &BoundsArgs) -> Result<Output, CliError> {
    check_thresholds(&args.t)?;
    let ensemble = args.ensemble.resolve()?;
    let reports: Vec<TailBoundReport> = match &ensemble {
        Ensemble::Bernoulli(e) => compare(e, &args.t)?,
        Ensemble::Grouped(e) => args
            .t
            .iter()
            .map(|&t| grouped_tail_bound(e.total(), t))
            .collect::<Result<_, _>>()?,
        Ensemble::Multinoulli(e) => args
            .t
            .iter()
            .map(|&t| multinoulli_bound(e.len(), e.categories(), t / e.len() as f64))
            .collect::<Result<_, _>>()?,
    };
    let rows: Vec<BoundRow> = reports.iter().map(BoundRow::from).collect();
    Ok(Output::ok(render(args.format, &reports, &rows)?))
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyRow {
    pub index: usize,
    #[serde(flatten)]
    pub outcome: VerifyOutcome,
}

#[derive(Debug, Clone, Serialize)]
struct VerifyCsvRow {
    index: usize,
    kind: &'static str,
    n: usize,
    checks: usize,
    max_ratio: f64,
    argmax_t: f64,
    argmax_method: String,
    support_radius: f64,
    pass: bool,
}

/// Exact-oracle check of the applicable bounds over the automatic t grid.
/// Exit code 1 when any exact tail exceeds its bound.
pub fn cmd_verify(args: &VerifyArgs) -> Result<Output, CliError> {
    let ensembles: Vec<Ensemble> = match args.random {
        Some(count) => {
            if args.ensemble.given() > 0 {
                return Err(CliError::usage("--random cannot be combined with an ensemble"));
            }
            if args.max_n == 0 || args.max_n > 24 {
                return Err(CliError::usage("--max-n must be in 1..=24"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            let mut out = Vec::with_capacity(3 * count);
            for _ in 0..count {
                out.push(random_bernoulli(&mut rng, args.max_n).into());
                out.push(random_grouped(&mut rng, 4, args.max_n).into());
                out.push(random_multinoulli(&mut rng, args.max_n.min(10), 3).into());
            }
            out
        }
        None => vec![args.ensemble.resolve()?],
    };
    let mut rows = Vec::with_capacity(ensembles.len());
    for (index, e) in ensembles.iter().enumerate() {
        let outcome = verify_ensemble(e).map_err(|err| match err {
            bernlog::Error::EnumerationCap { .. } => CliError::usage(format!("{err} (try `bernlog simulate`)")),
            other => other.into(),
        })?;
        rows.push(VerifyRow { index, outcome });
    }
    let pass = rows.iter().all(|r| r.outcome.pass);
    let worst = rows.iter().map(|r| r.outcome.max_ratio).fold(0.0, f64::max);
    let csv_rows: Vec<VerifyCsvRow> = rows
        .iter()
        .map(|r| VerifyCsvRow {
            index: r.index,
            kind: r.outcome.kind,
            n: r.outcome.n,
            checks: r.outcome.checks,
            max_ratio: r.outcome.max_ratio,
            argmax_t: r.outcome.argmax_t,
            argmax_method: r.outcome.argmax_method.map(|m| m.to_string()).unwrap_or_default(),
            support_radius: r.outcome.support_radius,
            pass: r.outcome.pass,
        })
        .collect();
    let stdout = render(args.format, &rows, &csv_rows)?;
    let mut stderr = String::new();
    let _ = writeln!(
        stderr,
        "{}: {} ensembles, max exact/bound ratio {worst:.6}",
        if pass { "pass" } else { "FAIL" },
        rows.len()
    );
    Ok(Output {
        stdout,
        stderr,
        code: if pass { EXIT_OK } else { EXIT_VERIFY_FAILED },
    })
}

fn parse_log_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || CliError::usage(format!("--p-grid-log expects lo:hi:count, got {spec:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if count == 0 {
        return Err(bad());
    }
    let step = if count > 1 { (hi - lo) / (count - 1) as f64 } else { 0.0 };
    Ok((0..count).map(|i| 10f64.powf(lo + step * i as f64)).collect())
}

#[derive(Debug, Clone, Serialize)]
struct BoundarySummary<'a> {
    lambda: f64,
    verdict: bernlog::Verdict,
    limit_estimate: f64,
    rows: &'a [MgfScanRow],
}

pub fn cmd_mgf_scan(args: &MgfScanArgs) -> Result<Output, CliError> {
    let grid = match (&args.p_grid_log, &args.p_grid) {
        (Some(spec), None) => parse_log_grid(spec)?,
        (None, Some(g)) => g.clone(),
        (None, None) => log_symmetric_unit_grid(1e-12, 400),
        _ => return Err(CliError::usage("give at most one of --p-grid-log and --p-grid")),
    };
    if args.boundary {
        let mut seq = grid;
        seq.sort_by(|a, b| b.total_cmp(a));
        let mut stderr = String::new();
        let mut scans = Vec::new();
        for &lambda in &args.lambda {
            let scan = mgf_boundary_scan(lambda, &seq)?;
            let _ = writeln!(stderr, "lambda {lambda}: {:?}, G at smallest p = {}", scan.verdict, scan.limit_estimate);
            scans.push(scan);
        }
        let rows: Vec<Vec<MgfScanRow>> = scans
            .iter()
            .map(|s| s.values.iter().map(MgfScanRow::from).collect())
            .collect();
        let summaries: Vec<BoundarySummary> = scans
            .iter()
            .zip(&rows)
            .map(|(s, r)| BoundarySummary {
                lambda: s.lambda,
                verdict: s.verdict,
                limit_estimate: s.limit_estimate,
                rows: r,
            })
            .collect();
        let flat: Vec<MgfScanRow> = rows.concat();
        return Ok(Output {
            stdout: render(args.format, &summaries, &flat)?,
            stderr,
            code: EXIT_OK,
        });
    }
    let evals = mgf_scan(&args.lambda, &grid)?;
    let rows: Vec<MgfScanRow> = evals.iter().map(MgfScanRow::from).collect();
    Ok(Output::ok(render(args.format, &rows, &rows)?))
}

#[derive(Debug, Clone, Serialize)]
struct ProfileRow {
    p: f64,
    abs_moment: f64,
}

/// Moment-condition report; exit code 1 if `|E[Y^m]| > m!/2` anywhere.
pub fn cmd_moments(args: &MomentsArgs) -> Result<Output, CliError> {
    if args.grid == 0 {
        return Err(CliError::usage("--grid must be >= 1"));
    }
    let grid = log_symmetric_unit_grid(1e-12, args.grid);
    if let Some(m) = args.scan {
        let scan = moment_scan(m, &grid)?;
        let rows: Vec<ProfileRow> = scan
            .profile
            .iter()
            .map(|&(p, abs_moment)| ProfileRow { p, abs_moment })
            .collect();
        let mut out = Output::ok(render(args.format, &scan, &rows)?);
        out.stderr = format!(
            "m={m}: peak of p|ln p|^m at p={} (e^-m = {}), value {} <= (m/e)^m = {}\n",
            scan.bump_argmax_p, scan.bump_location, scan.bump_peak, scan.bump_ceiling
        );
        return Ok(out);
    }
    let report = check_bernstein_condition(args.m_max, &grid)?;
    let code = if report.holds() { EXIT_OK } else { EXIT_VERIFY_FAILED };
    Ok(Output {
        stdout: render(args.format, &report, &[report])?,
        stderr: String::new(),
        code,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationRecord {
    pub ensemble: bernlog::EnsembleSpec,
    pub t: f64,
    pub replicates: u64,
    pub seed: u64,
    pub confidence: f64,
    pub workers: usize,
    pub estimate: bernlog::MonteCarloEstimate,
    pub bounds: Vec<TailBoundReport>,
    pub mgf: Option<bernlog::MgfEstimate>,
    /// `exp(n λ² / (2(1 - |λ|)))` when `|λ| < 1`.
    pub mgf_envelope: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
struct SimulationCsvRow {
    t: f64,
    hits: u64,
    replicates: u64,
    point: f64,
    ci_low: f64,
    ci_high: f64,
    confidence: f64,
    seed: u64,
    workers: usize,
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<Output, CliError> {
    let ensemble = args.ensemble.resolve()?;
    if !(args.t >= 0.0) || args.t.is_infinite() {
        return Err(CliError::usage("--t must be >= 0 and finite"));
    }
    let config = SimConfig {
        replicates: args.replicates,
        seed: args.seed,
        confidence: args.confidence,
        workers: args.workers.unwrap_or_else(|| SimConfig::default().workers),
    };
    let estimate = simulate_tail(&ensemble, args.t, &config)?;
    let bounds = if args.t > 0.0 {
        match &ensemble {
            Ensemble::Bernoulli(e) => compare(e, &[args.t])?,
            Ensemble::Grouped(e) => vec![grouped_tail_bound(e.total(), args.t)?],
            Ensemble::Multinoulli(e) => {
                vec![multinoulli_bound(e.len(), e.categories(), args.t / e.len() as f64)?]
            }
        }
    } else {
        Vec::new()
    };
    let (mgf, mgf_envelope) = match (args.lambda, &ensemble) {
        (None, _) => (None, None),
        (Some(lambda), Ensemble::Bernoulli(e)) => {
            let est = simulate_mgf(e, lambda, &config)?;
            let env = bernlog::mgf::log_envelope(lambda).ok().map(|l| (l * e.len() as f64).exp());
            (Some(est), env)
        }
        (Some(_), _) => return Err(CliError::usage("--lambda needs a Bernoulli ensemble")),
    };
    let record = SimulationRecord {
        ensemble: ensemble.to_spec(),
        t: args.t,
        replicates: config.replicates,
        seed: config.seed,
        confidence: config.confidence,
        workers: config.workers,
        estimate,
        bounds,
        mgf,
        mgf_envelope,
    };
    let row = SimulationCsvRow {
        t: estimate.t,
        hits: estimate.hits,
        replicates: estimate.replicates,
        point: estimate.point,
        ci_low: estimate.ci_low,
        ci_high: estimate.ci_high,
        confidence: estimate.confidence,
        seed: estimate.seed,
        workers: estimate.workers,
    };
    Ok(Output::ok(render(args.format, &record, &[row])?))
}

pub fn cmd_chernoff(args: &ChernoffArgs) -> Result<Output, CliError> {
    let side = match args.side {
        SideArg::Left => Side::Left,
        SideArg::Right => Side::Right,
    };
    let solution = chernoff_optimize(args.n, args.t, side)?;
    Ok(Output::ok(render(args.format, &solution, &[solution])?))
}

pub fn cmd_exact(args: &ExactArgs) -> Result<Output, CliError> {
    let ensemble = args.ensemble.resolve()?;
    let dist = exact_for(&ensemble)?;
    let rows = distribution_rows(&dist);
    Ok(Output::ok(render(args.format, &dist, &rows)?))
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Bounds(a) => cmd_bounds(a),
        Command::Verify(a) => cmd_verify(a),
        Command::MgfScan(a) => cmd_mgf_scan(a),
        Command::Moments(a) => cmd_moments(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Chernoff(a) => cmd_chernoff(a),
        Command::Exact(a) => cmd_exact(a),
    }
}

/// Parse `argv` and run, folding every failure into an [`Output`].
pub fn run_from_args<I, T>(argv: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Output::ok(text)
            } else {
                Output {
                    stdout: String::new(),
                    stderr: text,
                    code,
                }
            };
        }
    };
    match run(&cli) {
        Ok(out) => out,
        Err(e) => Output {
            stdout: String::new(),
            stderr: format!("{e}\n"),
            code: e.exit_code(),
        },
    }
}
