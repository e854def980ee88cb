use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use verum_core::format::{parse_instance, write_instance, write_oracle_result, write_result};
use verum_core::harness::{
    evaluate, greedy_baseline, run_sweep, summarize, Execution, Mechanism, RunSettings, SweepSpec,
};
use verum_core::oracle::{optimal_revenue_exclusive, optimal_revenue_sharing, optimal_welfare};
use verum_core::verify::{efficiency_suite, truthfulness_suite, SmallInstanceSpec, SuiteReport};
use verum_core::{generate_instance, run_auction, run_sharing_auction, AssignMode, AuctionConfig, Instance};

#[derive(Parser)]
#[command(name = "verum", version, about = "Iterative clinching auctions for TV white space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a scenario instance.
    Gen(GenArgs),
    /// Run one mechanism on an instance.
    Run(RunArgs),
    /// Run a parameter sweep and write CSV.
    Sweep(SweepArgs),
    /// Solve an instance exhaustively.
    Oracle(OracleArgs),
    /// Run the randomised truthfulness and efficiency suites.
    Verify(VerifyArgs),
}

/// Scenario overrides shared by `gen` and `run`.
#[derive(Args)]
struct ScenarioArgs {
    /// TOML file with `[scenario]`, `[auction]`, `[sharing]` tables, or a bare scenario.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "channels", short = 'C')]
    channels: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Interference range in metres.
    #[arg(long)]
    range: Option<f64>,
    #[arg(long)]
    demand_pct: Option<f64>,
    #[arg(long)]
    third_party_fraction: Option<f64>,
}

impl ScenarioArgs {
    fn settings(&self) -> Result<RunSettings> {
        let mut s = match &self.config {
            Some(path) => RunSettings::from_toml(&read(path)?).with_context(|| format!("{}", path.display()))?,
            None => RunSettings::default(),
        };
        let sc = &mut s.scenario;
        if let Some(v) = self.n {
            sc.n = v;
        }
        if let Some(v) = self.channels {
            sc.channels = v;
        }
        if let Some(v) = self.seed {
            sc.rng_seed = v;
        }
        if let Some(v) = self.range {
            sc.interference_range = v;
        }
        if let Some(v) = self.demand_pct {
            sc.avg_demand_pct = v;
        }
        if let Some(v) = self.third_party_fraction {
            sc.third_party_fraction = v;
        }
        sc.validate()?;
        Ok(s)
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Instance file written by `gen`. Generated from the scenario settings when absent.
    #[arg(long)]
    instance: Option<PathBuf>,
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, default_value = "verum-exclusive")]
    mechanism: Mechanism,
    /// Shorthand for `--mechanism verum-sharing`.
    #[arg(long)]
    sharing: bool,
    #[arg(long)]
    reserve: Option<u32>,
    #[arg(long)]
    step: Option<u32>,
    /// Interference temperature threshold in kelvin.
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    b_min: Option<f64>,
    #[arg(long)]
    b_max: Option<f64>,
    /// Print the metrics CSV row instead of the result file.
    #[arg(long)]
    metrics: bool,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep specification (TOML).
    spec: PathBuf,
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Run on the calling thread only.
    #[arg(long)]
    sequential: bool,
    /// Fill the wall_ms column.
    #[arg(long)]
    wall_time: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Objective {
    Welfare,
    RevenueExclusive,
    RevenueSharing,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "welfare")]
    objective: Objective,
    /// Settings for reserve, step and sharing parameters.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    reserve: Option<u32>,
    #[arg(long)]
    step: Option<u32>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Suite {
    Truthfulness,
    Efficiency,
    All,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    suite: Suite,
    #[arg(long, default_value_t = 500)]
    instances: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn gen(args: GenArgs) -> Result<()> {
    let settings = args.scenario.settings()?;
    let instance = generate_instance(&settings.scenario)?;
    emit(&write_instance(&instance), args.out.as_deref())
}

fn run(args: RunArgs) -> Result<()> {
    let mut settings = args.scenario.settings()?;
    if let Some(v) = args.reserve {
        settings.auction.reserve_price = v;
    }
    if let Some(v) = args.step {
        settings.auction.step_size = v;
    }
    if let Some(v) = args.tau {
        settings.sharing.tau = v;
    }
    if let Some(v) = args.b_min {
        settings.sharing.b_min = v;
    }
    if let Some(v) = args.b_max {
        settings.sharing.b_max = v;
    }
    settings.auction.validate()?;
    settings.sharing.validate()?;
    let mechanism = if args.sharing { Mechanism::VerumSharing } else { args.mechanism };

    let instance = load_or_generate(args.instance.as_deref(), &settings)?;
    if args.metrics {
        let id = format!("seed={}", instance.seed);
        let row = evaluate(mechanism, &instance, &settings, &id, true)?;
        return emit(&verum_core::harness::csv_string(&[row]), args.out.as_deref());
    }
    let (graph, profiles) = (&instance.graph, &instance.profiles);
    let config = settings.auction;
    let text = match mechanism {
        Mechanism::VerumExclusive => write_result(&run_auction(graph, profiles, &config)?, graph, mechanism.name(), instance.seed),
        Mechanism::VerumSharing => {
            let params = settings.sharing.params_for(graph.len(), instance.seed)?;
            let outcome = run_sharing_auction(graph, profiles, &config, &params)?;
            write_result(&outcome, graph, mechanism.name(), instance.seed)
        }
        Mechanism::GreedyBaseline => {
            let outcome = greedy_baseline(graph, profiles, config.reserve_price);
            write_result(&outcome, graph, mechanism.name(), instance.seed)
        }
        Mechanism::Oracle => write_oracle_result(&optimal_revenue_exclusive(graph, profiles, &config)?, "revenue-exclusive"),
    };
    emit(&text, args.out.as_deref())
}

fn load_or_generate(path: Option<&Path>, settings: &RunSettings) -> Result<Instance> {
    match path {
        Some(p) => parse_instance(&read(p)?).with_context(|| format!("{}", p.display())),
        None => Ok(generate_instance(&settings.scenario)?),
    }
}

fn sweep(args: SweepArgs) -> Result<()> {
    let mut spec = SweepSpec::from_toml(&read(&args.spec)?).with_context(|| format!("{}", args.spec.display()))?;
    spec.record_wall_time |= args.wall_time;
    let execution = if args.sequential { Execution::Sequential } else { Execution::Parallel };
    let report = run_sweep(&spec, execution)?;
    for f in &report.failures {
        let m = f.mechanism.map_or("-".to_string(), |m| m.to_string());
        eprintln!("failed {} {}: {}", f.scenario_id, m, f.error);
    }
    emit(&report.csv(), args.out.as_deref())?;
    if args.out.is_some() {
        println!("{:>12} {:<16} {:>4} {:>12} {:>8} {:>8} {:>8}", spec.parameter.name(), "mechanism", "reps", "revenue", "util%", "win%", "rounds");
        for s in summarize(&spec, &report.rows) {
            println!(
                "{:>12} {:<16} {:>4} {:>12.1} {:>8.2} {:>8.2} {:>8.1}",
                s.value,
                s.mechanism.name(),
                s.replicates,
                s.revenue.mean,
                s.utilization_pct.mean,
                s.winner_pct.mean,
                s.rounds.mean
            );
        }
    }
    if !report.failures.is_empty() {
        bail!("{} rows failed", report.failures.len());
    }
    Ok(())
}

fn oracle(args: OracleArgs) -> Result<()> {
    let mut settings = match &args.config {
        Some(p) => RunSettings::from_toml(&read(p)?)?,
        None => RunSettings::default(),
    };
    if let Some(v) = args.reserve {
        settings.auction.reserve_price = v;
    }
    if let Some(v) = args.step {
        settings.auction.step_size = v;
    }
    if let Some(v) = args.tau {
        settings.sharing.tau = v;
    }
    let config: AuctionConfig = settings.auction.without_log();
    config.validate()?;
    let instance = parse_instance(&read(&args.instance)?)?;
    let (graph, profiles) = (&instance.graph, &instance.profiles);
    let (result, name) = match args.objective {
        Objective::Welfare => (optimal_welfare(graph, profiles, AssignMode::Exclusive)?, "welfare"),
        Objective::RevenueExclusive => (optimal_revenue_exclusive(graph, profiles, &config)?, "revenue-exclusive"),
        Objective::RevenueSharing => {
            let params = settings.sharing.params_for(graph.len(), instance.seed)?;
            (optimal_revenue_sharing(graph, profiles, &config, &params)?, "revenue-sharing")
        }
    };
    emit(&write_oracle_result(&result, name), args.out.as_deref())
}

fn print_suite(name: &str, r: &SuiteReport) {
    let status = if r.passed() { "PASS" } else { "FAIL" };
    println!(
        "{status} {name}: {} instances, {} checks, {} violations, worst {:.4}",
        r.instances,
        r.checks,
        r.violations.len(),
        r.worst as f64 / 10_000.0
    );
}

fn verify(args: VerifyArgs) -> Result<()> {
    let mut ok = true;
    if args.suite != Suite::Efficiency {
        let r = truthfulness_suite(&SmallInstanceSpec::default(), &AuctionConfig::new(1, 1), args.seed, args.instances)?;
        print_suite("truthfulness", &r);
        ok &= r.passed();
    }
    if args.suite != Suite::Truthfulness {
        let spec = SmallInstanceSpec { max_n: 7, distinct_values: true, v_min: 1, ..Default::default() };
        let r = efficiency_suite(&spec, &AuctionConfig::new(0, 1), args.seed, args.instances)?;
        print_suite("efficiency", &r);
        ok &= r.passed();
    }
    if !ok {
        bail!("verification found violations");
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Gen(a) => gen(a),
        Command::Run(a) => run(a),
        Command::Sweep(a) => sweep(a),
        Command::Oracle(a) => oracle(a),
        Command::Verify(a) => verify(a),
    }
}
