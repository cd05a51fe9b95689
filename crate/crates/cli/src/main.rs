mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bellforge::catalog::{self, cglmp_value_from_i22dd, CatalogEntry, CGLMP_QUANTUM_VALUES};
use bellforge::io::{read_strategy, strategy_to_json};
use bellforge::npa::{npa_upper_bound, NpaLevel, NpaProgram};
use bellforge::optimize::{
    self, seesaw, sqs_lower_bound, OptimizationReport, ParamOptConfig, SeesawConfig, SeesawMode,
    Subspace, DEFAULT_SEED, SWEEP_CSV_HEADER,
};
use bellforge::quantum::{self, best_state_for_measurements, cglmp_optimal_measurements};
use bellforge::symmetry::{check_sufficient_conditions, symmetry_report, MapKind};
use bellforge::{local_bound, Error, QuantumStrategy, Scenario};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use report::{nums, text, Report};

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;

/// Largest d covered by the tabulated CGLMP values.
const CGLMP_DMAX: usize = CGLMP_QUANTUM_VALUES.len() + 1;

#[derive(Debug, Parser)]
#[command(
    name = "bellforge",
    version,
    about = "Local, quantum and symmetric-quantum bounds for bipartite Bell functionals",
    after_help = "Exit codes: 0 success, 1 usage or input error, 2 numerical failure.\n\
                  BELLFORGE_THREADS caps the number of worker threads."
)]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Browse the built-in functionals.
    #[command(subcommand)]
    Catalog(CatalogCmd),
    /// Compute bounds on a catalog functional.
    #[command(subcommand)]
    Bound(BoundCmd),
    /// Evaluate a functional on a strategy file.
    Eval { name: String, strategy: PathBuf },
    /// Symmetry diagnostics.
    #[command(subcommand)]
    Check(CheckCmd),
    /// Negativity of the state in a strategy file.
    Negativity { strategy: PathBuf },
    /// Parameter sweeps.
    #[command(subcommand)]
    Sweep(SweepCmd),
    /// Regenerate published tables as CSV.
    #[command(subcommand)]
    Reproduce(ReproduceCmd),
    /// Built-in strategies.
    #[command(subcommand)]
    Strategy(StrategyCmd),
}

#[derive(Debug, Subcommand)]
enum CatalogCmd {
    /// Names accepted wherever a functional is expected.
    List,
    /// Scenario, symmetry and known bounds of one functional.
    Show { name: String },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LowerMode {
    /// Unrestricted see-saw.
    Free,
    /// See-saw restricted to symmetric correlations.
    Symcorr,
    /// Symmetric quantum strategies by local search.
    Sqs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SubspaceArg {
    Symmetric,
    Antisymmetric,
    Full,
}

impl From<SubspaceArg> for Subspace {
    fn from(s: SubspaceArg) -> Self {
        match s {
            SubspaceArg::Symmetric => Subspace::Symmetric,
            SubspaceArg::Antisymmetric => Subspace::Antisymmetric,
            SubspaceArg::Full => Subspace::Full,
        }
    }
}

#[derive(Debug, Subcommand)]
enum BoundCmd {
    /// Exact local bound by enumeration.
    Local { name: String },
    /// Lower bound on the quantum value in fixed local dimension.
    QuantumLower {
        name: String,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, value_enum, default_value_t = LowerMode::Free)]
        mode: LowerMode,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Write the best strategy found as JSON.
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Lower bound over symmetric quantum strategies.
    SqsLower {
        name: String,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, value_enum, default_value_t = SubspaceArg::Full)]
        subspace: SubspaceArg,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// NPA upper bound.
    Npa {
        name: String,
        /// 1, 1ab, 2 or 2aab.
        #[arg(long, default_value = "1")]
        level: NpaLevel,
        /// Twirl over the party swap: bound over symmetric correlations.
        #[arg(long)]
        symmetric: bool,
        /// Also write the program in SDPA sparse format.
        #[arg(long)]
        sdpa: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum CheckCmd {
    /// Correlation symmetry, SQS form and mirror conditions of a strategy.
    Symmetry { strategy: PathBuf },
}

#[derive(Debug, Subcommand)]
enum SweepCmd {
    /// Sweep I_S(alpha).
    ///
    /// CSV columns: alpha, local (exact local bound), sqs_qubit (best
    /// symmetric qubit strategy found), quantum (best unrestricted qubit
    /// see-saw value).
    IsAlpha(SweepArgs),
}

#[derive(Debug, clap::Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 1.5)]
    from: f64,
    #[arg(long, default_value_t = 3.0)]
    to: f64,
    /// Number of grid points, endpoints included.
    #[arg(long, default_value_t = 61)]
    steps: usize,
    /// Restarts per point for both optimizers.
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum ReproduceCmd {
    /// CGLMP values of the optimal symmetric strategy.
    ///
    /// CSV columns: d, i22dd (value of the I_22dd form), cglmp (the same
    /// value in CGLMP normalization), table (tabulated value), abs_error.
    CglmpValues {
        #[arg(long, default_value_t = 8)]
        dmax: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Negativity of the optimal CGLMP states.
    ///
    /// CSV columns: d, negativity, max_negativity ((d-1)/2, the maximum in
    /// local dimension d).
    Negativity {
        #[arg(long, default_value_t = 5)]
        dmax: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The I_S(alpha) trade-off curve; same columns as `sweep is-alpha`.
    Fig2(SweepArgs),
}

#[derive(Debug, Subcommand)]
enum StrategyCmd {
    /// Write a built-in strategy as JSON.
    ///
    /// Names: chsh-max, chsh-sym, i3322c, is-1.5, is-2, j42, i9-max,
    /// i9-sym, cglmp-<d>.
    Export {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Core(Error::Numerical(_) | Error::Sdp(_)) => EXIT_NUMERICAL,
            _ => EXIT_USAGE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(m) => f.write_str(m),
            Self::Core(e) => write!(f, "{e}"),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// What a command produced: either fields or a table.
enum Output {
    Fields(Report),
    Table {
        header: Vec<&'static str>,
        rows: Vec<Vec<Value>>,
        out: Option<PathBuf>,
        seed: Option<u64>,
    },
    Raw { body: String, out: Option<PathBuf> },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let result = configure_threads().and_then(|_| run(cli.command)).and_then(|o| emit(o, cli.json));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if cli.json {
                println!("{}", json!({ "error": e.to_string(), "exit_code": e.exit_code() }));
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("BELLFORGE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("BELLFORGE_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size the thread pool: {e}")))
}

fn run(cmd: Command) -> Result<Output> {
    match cmd {
        Command::Catalog(CatalogCmd::List) => catalog_list(),
        Command::Catalog(CatalogCmd::Show { name }) => catalog_show(&name),
        Command::Bound(b) => bound(b),
        Command::Eval { name, strategy } => eval(&name, &strategy),
        Command::Check(CheckCmd::Symmetry { strategy }) => check_symmetry(&strategy),
        Command::Negativity { strategy } => negativity(&strategy),
        Command::Sweep(SweepCmd::IsAlpha(args)) | Command::Reproduce(ReproduceCmd::Fig2(args)) => {
            sweep_is(args)
        }
        Command::Reproduce(ReproduceCmd::CglmpValues { dmax, out }) => cglmp_values(dmax, out),
        Command::Reproduce(ReproduceCmd::Negativity { dmax, out }) => negativity_table(dmax, out),
        Command::Strategy(StrategyCmd::Export { name, out }) => export(&name, out),
    }
}

fn emit(output: Output, json: bool) -> Result<()> {
    let (body, out) = match output {
        Output::Fields(r) => (r.render(json), None),
        Output::Table { header, rows, out, seed } => {
            if let Some(seed) = seed {
                eprintln!("seed: {seed}");
            }
            let body = if json {
                let objs: Vec<Value> = rows
                    .iter()
                    .map(|r| {
                        Value::Object(header.iter().map(|h| h.to_string()).zip(r.iter().cloned()).collect())
                    })
                    .collect();
                json!({ "seed": seed, "rows": objs }).to_string()
            } else {
                let mut lines = vec![header.join(",")];
                lines.extend(rows.iter().map(|r| r.iter().map(text).collect::<Vec<_>>().join(",")));
                lines.join("\n")
            };
            (body, out)
        }
        Output::Raw { body, out } => (body, out),
    };
    match out {
        Some(path) => std::fs::write(&path, format!("{body}\n"))
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{body}");
            Ok(())
        }
    }
}

fn entry(name: &str) -> Result<CatalogEntry> {
    Ok(catalog::lookup(name)?)
}

fn scenario_label(s: Scenario) -> String {
    if s.settings_a == s.settings_b {
        format!("(2,{},{})", s.settings_a, s.outcomes)
    } else {
        format!("(2,{}x{},{})", s.settings_a, s.settings_b, s.outcomes)
    }
}

fn catalog_list() -> Result<Output> {
    let report = catalog::list()
        .into_iter()
        .fold(Report::new(), |r, (name, description)| r.put(name, description));
    Ok(Output::Fields(report))
}

fn catalog_show(name: &str) -> Result<Output> {
    let e = entry(name)?;
    let f = &e.functional;
    Ok(Output::Fields(
        Report::new()
            .put("name", f.name.as_str())
            .put("scenario", scenario_label(f.scenario()))
            .put("symmetric", e.symmetric)
            .put_opt("local_bound", e.local_bound())
            .put_opt("quantum_value", e.known_quantum_value)
            .put_opt("sqs_qubit_value", e.known_sqs_qubit_value)
            .put("in_domain", e.in_domain)
            .put("source", e.source.as_str()),
    ))
}

fn bound(cmd: BoundCmd) -> Result<Output> {
    match cmd {
        BoundCmd::Local { name } => {
            let f = entry(&name)?.functional;
            let lb = local_bound(&f)?;
            let w = &lb.witness;
            Ok(Output::Fields(
                Report::new()
                    .put("functional", f.name.as_str())
                    .put("local_bound", lb.value)
                    .put("witness_alice", w.alice.clone())
                    .put("witness_bob", w.bob.clone()),
            ))
        }
        BoundCmd::QuantumLower { name, dim, mode, restarts, seed, save } => {
            let f = entry(&name)?.functional;
            let report = match mode {
                LowerMode::Sqs => sqs_lower_bound(&f, &sqs_config(dim, Subspace::Full, restarts, seed))?,
                LowerMode::Free | LowerMode::Symcorr => {
                    let cfg = SeesawConfig {
                        local_dim: dim,
                        restarts,
                        seed,
                        mode: match mode {
                            LowerMode::Symcorr => SeesawMode::SymmetricCorrelation,
                            _ => SeesawMode::Unrestricted,
                        },
                        ..SeesawConfig::default()
                    };
                    seesaw(&f, &cfg)?
                }
            };
            lower_bound_output(&f.name, &report, seed, save.as_deref())
        }
        BoundCmd::SqsLower { name, dim, subspace, restarts, seed, save } => {
            let f = entry(&name)?.functional;
            let report = sqs_lower_bound(&f, &sqs_config(dim, subspace.into(), restarts, seed))?;
            lower_bound_output(&f.name, &report, seed, save.as_deref())
        }
        BoundCmd::Npa { name, level, symmetric, sdpa } => {
            let f = entry(&name)?.functional;
            if let Some(path) = &sdpa {
                let program = NpaProgram::new(&f, level, symmetric)?;
                std::fs::write(path, program.to_sdpa())
                    .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
            }
            let value = npa_upper_bound(&f, level, symmetric)?;
            Ok(Output::Fields(
                Report::new()
                    .put("functional", f.name.as_str())
                    .put("level", level.to_string())
                    .put("symmetric", symmetric)
                    .put("upper_bound", value),
            ))
        }
    }
}

fn sqs_config(dim: usize, subspace: Subspace, restarts: usize, seed: u64) -> ParamOptConfig {
    ParamOptConfig {
        local_dim: dim,
        subspace,
        restarts,
        seed,
        ..ParamOptConfig::default()
    }
}

fn lower_bound_output(
    name: &str,
    r: &OptimizationReport,
    seed: u64,
    save: Option<&Path>,
) -> Result<Output> {
    if let Some(path) = save {
        write_strategy(&r.best_strategy, path)?;
    }
    Ok(Output::Fields(
        Report::new()
            .put("functional", name)
            .put("mode", r.mode.as_str())
            .put("dim", r.local_dim)
            .put("restarts", r.per_restart.len())
            .put("seed", seed)
            .put("lower_bound", r.best_value)
            .put("converged", r.converged)
            .put("per_restart", nums(&r.per_restart)),
    ))
}

fn write_strategy(s: &QuantumStrategy, path: &Path) -> Result<()> {
    std::fs::write(path, strategy_to_json(s)?)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn eval(name: &str, path: &Path) -> Result<Output> {
    let e = entry(name)?;
    let s = read_strategy(path)?;
    let value = s.value(&e.functional)?;
    let local = e.local_bound();
    Ok(Output::Fields(
        Report::new()
            .put("functional", e.name())
            .put("value", value)
            .put_opt("local_bound", local)
            .put_opt("violation", local.map(|l| value - l))
            .put_opt("quantum_value", e.known_quantum_value),
    ))
}

fn check_symmetry(path: &Path) -> Result<Output> {
    let s = read_strategy(path)?;
    let r = symmetry_report(&s)?;
    Ok(Output::Fields(
        Report::new()
            .put("correlation_asymmetry", r.correlation_asymmetry)
            .put("correlation_symmetric", r.correlation_symmetric)
            .put("sqs", r.sqs)
            .put("identity_conditions", check_sufficient_conditions(&s, MapKind::Identity))
            .put("conjugation_conditions", r.mirror_kind)
            .put_opt("aligning_rotation", r.aligning_rotation),
    ))
}

fn negativity(path: &Path) -> Result<Output> {
    let s = read_strategy(path)?;
    let dims = s.dims();
    let n = quantum::negativity(&s.state.density(), dims);
    Ok(Output::Fields(
        Report::new()
            .put("dims", vec![dims.0, dims.1])
            .put("negativity", n)
            .put("max_negativity", (dims.0.min(dims.1) as f64 - 1.0) / 2.0),
    ))
}

fn check_dmax(dmax: usize) -> Result<()> {
    if (2..=CGLMP_DMAX).contains(&dmax) {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--dmax must lie in 2..={CGLMP_DMAX}")))
    }
}

fn cglmp_values(dmax: usize, out: Option<PathBuf>) -> Result<Output> {
    check_dmax(dmax)?;
    let rows = (2..=dmax)
        .map(|d| {
            let f = catalog::i22dd(d)?.functional;
            let ms = cglmp_optimal_measurements(d)?;
            let v = best_state_for_measurements(&f, &ms, &ms)?.value;
            let cglmp = cglmp_value_from_i22dd(d, v);
            let table = CGLMP_QUANTUM_VALUES[d - 2];
            Ok(vec![
                Value::from(d),
                Value::from(v),
                Value::from(cglmp),
                Value::from(table),
                Value::from((cglmp - table).abs()),
            ])
        })
        .collect::<Result<_>>()?;
    Ok(Output::Table {
        header: vec!["d", "i22dd", "cglmp", "table", "abs_error"],
        rows,
        out,
        seed: None,
    })
}

fn negativity_table(dmax: usize, out: Option<PathBuf>) -> Result<Output> {
    check_dmax(dmax)?;
    let rows = (2..=dmax)
        .map(|d| {
            let f = catalog::i22dd(d)?.functional;
            let ms = cglmp_optimal_measurements(d)?;
            let ket = best_state_for_measurements(&f, &ms, &ms)?.ket;
            let n = quantum::negativity(&ket.density(), (d, d));
            Ok(vec![
                Value::from(d),
                Value::from(n),
                Value::from((d as f64 - 1.0) / 2.0),
            ])
        })
        .collect::<Result<_>>()?;
    Ok(Output::Table {
        header: vec!["d", "negativity", "max_negativity"],
        rows,
        out,
        seed: None,
    })
}

fn sweep_is(args: SweepArgs) -> Result<Output> {
    if args.steps == 0 || !(args.from.is_finite() && args.to.is_finite()) {
        return Err(CliError::Usage("need at least one grid point and finite endpoints".into()));
    }
    let alphas: Vec<f64> = if args.steps == 1 {
        vec![args.from]
    } else {
        let h = (args.to - args.from) / (args.steps - 1) as f64;
        (0..args.steps).map(|i| args.from + h * i as f64).collect()
    };
    let seesaw_cfg = SeesawConfig {
        restarts: args.restarts,
        seed: args.seed,
        ..SeesawConfig::default()
    };
    let sqs_cfg = sqs_config(2, Subspace::Full, args.restarts, args.seed);
    let rows = optimize::sweep(|a| catalog::i_s(a).functional, &alphas, &seesaw_cfg, &sqs_cfg)?;
    let rows = rows
        .iter()
        .map(|r| [r.alpha, r.local, r.sqs_qubit, r.quantum].map(Value::from).to_vec())
        .collect();
    Ok(Output::Table {
        header: SWEEP_CSV_HEADER.split(',').collect(),
        rows,
        out: args.out,
        seed: Some(args.seed),
    })
}

fn builtin_strategy(name: &str) -> Result<QuantumStrategy> {
    let lower = name.to_ascii_lowercase();
    let s = match lower.as_str() {
        "chsh-max" => quantum::strategy_chsh_max(),
        "chsh-sym" => quantum::strategy_chsh_sym(),
        "i3322c" => quantum::strategy_i3322c(1.0),
        "j42" => quantum::strategy_j42(),
        "i9-max" => quantum::strategy_i9_max(),
        "i9-sym" => quantum::strategy_i9_sym(),
        _ => {
            if let Some(a) = lower.strip_prefix("is-") {
                let alpha = a
                    .parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("unknown strategy `{name}`")))?;
                quantum::strategy_is(alpha)?
            } else if let Some(d) = lower.strip_prefix("cglmp-") {
                let d = d
                    .parse::<usize>()
                    .map_err(|_| CliError::Usage(format!("unknown strategy `{name}`")))?;
                let f = catalog::i22dd(d)?.functional;
                let ms = cglmp_optimal_measurements(d)?;
                let ket = best_state_for_measurements(&f, &ms, &ms)?.ket;
                quantum::shared_strategy(ket.into(), ms)?
            } else {
                return Err(CliError::Usage(format!("unknown strategy `{name}`")));
            }
        }
    };
    Ok(s)
}

fn export(name: &str, out: Option<PathBuf>) -> Result<Output> {
    let s = builtin_strategy(name)?;
    Ok(Output::Raw {
        body: strategy_to_json(&s)?,
        out,
    })
}
