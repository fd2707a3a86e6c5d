//! `ksemi`: tables, simulations, comparisons, exact oracle values and
//! dominance tests for the k-semi-random graph process.

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use ksemi::harness::{self, OracleSpec, Report, Target, TrialSpec, DEFAULT_THRESHOLD};
use ksemi::ode::{self, IntegratorConfig, Property, TableOptions, HAM_X_STOP, PM_EPS};
use ksemi::strategies::StrategyKind;
use ksemi::{Error, LoopDegree, TieBreak};

#[derive(Debug, Parser)]
#[command(name = "ksemi", version, about = "k-semi-random graph process: simulator and ODE lab")]
struct Cli {
    /// More log output (-v info, -vv debug, -vvv trace). Without it the
    /// LOG_LEVEL environment variable applies (default: warn).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    /// Cap on worker threads for trials (default: one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Print the effective configuration as JSON and exit.
    #[arg(long, global = true)]
    print_config: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate the limiting constants.
    OdeTable(OdeTableArgs),
    /// Run seeded trials and summarise hitting times.
    Simulate(SimulateArgs),
    /// Run trials and measure the distance to the limiting trajectory.
    Compare(SimulateArgs),
    /// Exact expected hitting time for a tiny instance.
    Oracle(OracleArgs),
    /// Paired test: does the strategy beat a baseline?
    Dominance(DominanceArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct OdeTableArgs {
    /// mindeg, pm or ham.
    #[arg(long)]
    property: Property,
    /// Range of k, as A..B or a single value.
    #[arg(long, default_value = "1..5")]
    k_range: String,
    /// Range of l for the minimum-degree table.
    #[arg(long, default_value = "1..5")]
    l_range: String,
    /// Stopping level 1 - x of the matching system.
    #[arg(long, default_value_t = PM_EPS)]
    eps: f64,
    /// Stopping level x of the Hamilton-path system.
    #[arg(long, default_value_t = HAM_X_STOP)]
    x_stop: f64,
    /// Output file (default: stdout).
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct TrialArgs {
    /// mindeg<l>, pm or ham.
    #[arg(long)]
    property: Target,
    /// Strategy name (default: the optimal one for the property).
    #[arg(long)]
    strategy: Option<StrategyKind>,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 20)]
    trials: u64,
    /// Base seed; trial i uses stream i of this seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Covered fraction at which the matching or path phase stops.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    /// Circle tie-break: lowest_index, avoid_square_then_lowest or uniform_random.
    #[arg(long, default_value_t = TieBreak::AvoidSquareThenLowest)]
    tie_break: TieBreak,
    /// Tie-break among equally good squares.
    #[arg(long, default_value_t = TieBreak::LowestIndex)]
    square_tie_break: TieBreak,
    /// Degree added by a loop: counts_two or counts_one.
    #[arg(long, default_value = "counts_two")]
    loop_degree: LoopDegree,
    /// Trajectory sample spacing in rounds (compare default: n/100).
    #[arg(long)]
    stride: Option<u64>,
    /// Check every invariant after every round.
    #[arg(long)]
    validate: bool,
}

impl TrialArgs {
    fn spec(&self) -> TrialSpec {
        let mut s = TrialSpec::new(self.property, self.n, self.k, self.trials, self.seed);
        if let Some(st) = self.strategy {
            s.strategy = st;
        }
        s.threshold = self.threshold;
        s.tie_break = self.tie_break;
        s.square_tie_break = self.square_tie_break;
        s.loop_degree = self.loop_degree;
        s.stride = self.stride;
        s.validate = self.validate;
        s
    }
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    trials: TrialArgs,
    /// Write per-trial rows (csv) or the full report (json) here.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// mindeg<l> or pm.
    #[arg(long)]
    property: Target,
    #[arg(long)]
    strategy: Option<StrategyKind>,
    #[arg(long, default_value_t = TieBreak::AvoidSquareThenLowest)]
    tie_break: TieBreak,
    #[arg(long, default_value_t = TieBreak::LowestIndex)]
    square_tie_break: TieBreak,
    #[arg(long, default_value = "counts_two")]
    loop_degree: LoopDegree,
    /// Rounds covered by the printed distribution (with --distribution).
    #[arg(long, default_value_t = 32)]
    horizon: u64,
    /// Also print the exact fraction and P(H = t) for t <= horizon.
    #[arg(long)]
    distribution: bool,
}

#[derive(Debug, Args)]
struct DominanceArgs {
    #[command(flatten)]
    trials: TrialArgs,
    /// Strategy to compare against.
    #[arg(long)]
    baseline: StrategyKind,
}

fn writer(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn print_json<T: serde::Serialize>(v: &T) -> Result<(), Error> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn print_summary(spec: &TrialSpec, s: &harness::TrialSummary) {
    println!("property: {}  strategy: {}  n: {}  k: {}  trials: {}  seed: {}", spec.target, spec.strategy, spec.n, spec.k, spec.trials, spec.seed);
    println!("mean H/n: {:.6}", s.mean_h_over_n);
    println!("sd H/n: {:.6}", s.sd_h_over_n);
    println!("95% CI: [{:.6}, {:.6}]", s.ci95_h_over_n[0], s.ci95_h_over_n[1]);
    if !s.mean_breakpoints.is_empty() {
        let b: Vec<String> = s.mean_breakpoints.iter().map(|x| format!("{x:.6}")).collect();
        println!("mean t_q/n: {}", b.join(" "));
    }
    if !matches!(spec.target, Target::MinDegree(_)) {
        println!("mean completion rounds: {:.2}", s.mean_completion_rounds);
    }
}

fn write_outputs(spec: &TrialSpec, summary: &harness::TrialSummary, ode: Option<ode::Trajectory>, args: &SimulateArgs) -> Result<(), Error> {
    let Some(path) = &args.output else {
        return Ok(());
    };
    let w = BufWriter::new(File::create(path)?);
    match args.format {
        Format::Csv => harness::write_trials_csv(spec, summary, w),
        Format::Json => harness::write_report(
            &Report {
                spec: spec.clone(),
                summary: summary.clone(),
                ode,
                trajectories: Vec::new(),
            },
            w,
        ),
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::OdeTable(a) => {
            let k = ode::tables::parse_range(&a.k_range)?;
            let l = ode::tables::parse_range(&a.l_range)?;
            let opts = TableOptions {
                pm_eps: a.eps,
                ham_x_stop: a.x_stop,
                integrator: IntegratorConfig::default(),
            };
            if cli.print_config {
                return print_json(&serde_json::json!({
                    "property": a.property,
                    "k_range": [k.0, k.1],
                    "l_range": [l.0, l.1],
                    "eps": a.eps,
                    "x_stop": a.x_stop,
                    "format": format!("{:?}", a.format).to_lowercase(),
                }));
            }
            let records = ode::emit_tables(a.property, k, l, &opts)?;
            let mut w = writer(&a.output)?;
            match a.format {
                Format::Csv => ode::tables::write_csv(&records, &mut w)?,
                Format::Json => ode::tables::write_json(&records, &mut w)?,
            }
            w.flush()?;
        }
        Command::Simulate(a) => {
            let spec = a.trials.spec();
            spec.validate()?;
            if cli.print_config {
                return print_json(&spec);
            }
            info!("simulating {spec:?}");
            let summary = harness::run_trials(&spec)?;
            print_summary(&spec, &summary);
            write_outputs(&spec, &summary, None, &a)?;
        }
        Command::Compare(a) => {
            let spec = a.trials.spec();
            spec.validate()?;
            if cli.print_config {
                return print_json(&spec);
            }
            let report = harness::compare(&spec, &IntegratorConfig::default())?;
            print_summary(&spec, &report.summary);
            println!("limiting constant: {:.6}", report.ode_constant);
            println!("sup-distance ({}): max {:.6}  mean {:.6}", report.trajectory.coords.join(", "), report.trajectory.max, report.trajectory.mean);
            write_outputs(&spec, &report.summary, Some(report.ode), &a)?;
        }
        Command::Oracle(a) => {
            let spec = OracleSpec {
                n: a.n,
                k: a.k,
                target: a.property,
                strategy: a.strategy.unwrap_or(a.property.default_strategy()),
                tie_break: a.tie_break,
                square_tie_break: a.square_tie_break,
                loop_degree: a.loop_degree,
                horizon: a.horizon,
            };
            if cli.print_config {
                return print_json(&spec);
            }
            let r = harness::exact_small_oracle(&spec)?;
            println!("{}", r.mean());
            if a.distribution {
                let rep = r.report();
                println!("exact: {}", rep.exact);
                for (t, p) in rep.distribution.iter().enumerate() {
                    println!("P(H = {}) = {p}", t + 1);
                }
                println!("P(H > {}) = {}", a.horizon, rep.tail);
            }
        }
        Command::Dominance(a) => {
            let spec = a.trials.spec();
            spec.validate()?;
            if cli.print_config {
                return print_json(&spec);
            }
            let r = harness::dominance_experiment(&spec, a.baseline)?;
            println!("strategy {}: mean H {:.3}", r.strategy, r.mean_strategy);
            println!("baseline {}: mean H {:.3}", r.baseline, r.mean_baseline);
            println!("paired difference: {:.3} (se {:.3}, z {:.3})", r.mean_difference, r.se_difference, r.z);
            println!("one-sided p-value: {:e}", r.p_value);
        }
    }
    Ok(())
}

fn init_logging(verbose: u8) {
    let filter = match verbose {
        0 => std::env::var("LOG_LEVEL").unwrap_or_else(|_| "warn".into()),
        1 => "info".into(),
        2 => "debug".into(),
        _ => "trace".into(),
    };
    let _ = env_logger::Builder::new().parse_filters(&filter).try_init();
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    init_logging(cli.verbose);
    if let Some(t) = cli.threads {
        if t == 0 || rayon::ThreadPoolBuilder::new().num_threads(t).build_global().is_err() {
            eprintln!("error: --threads must be a positive integer");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
