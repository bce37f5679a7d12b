//! Command-line harness: generate scenarios, schedule them, replay the
//! schedules under a gating policy, and compare runs.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use greensched::hgreen::{baseline_map, hga_map, Baseline};
use greensched::model::{
    AnalyzerVariant, Catalog, FormulaVariant, GreenConfig, Schedule, Workflow,
};
use greensched::powergate::{GatingKind, GatingPolicy};
use greensched::sim::{compare, simulate, timeline_to_csv, Comparison, EnergyLedger, SimOutput};
use greensched::workload::ScenarioSpec;

#[derive(Parser)]
#[command(name = "greensched", version, about = "Energy-aware workflow scheduling toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Directory output files are written into.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Base seed: reseeds generation, and seeds the random scheduler.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// On-disk format for energy ledgers.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Write a workflow and catalog, either from a preset or a spec file.
    Generate(GenerateArgs),
    /// Map a workflow onto catalog sites and write the schedule.
    Schedule(ScheduleArgs),
    /// Replay a schedule under a gating policy; write ledger and timeline.
    Simulate(SimulateArgs),
    /// Compare two ledgers, or run the whole pipeline against a batch of
    /// random baselines.
    Compare(CompareArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Eega3,
}

impl Preset {
    fn spec(self) -> ScenarioSpec {
        match self {
            Preset::Eega3 => ScenarioSpec::eega3(),
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    /// Bundled scenario to start from.
    #[arg(long, value_enum, default_value_t = Preset::Eega3)]
    preset: Preset,

    /// Scenario spec file (JSON); replaces the preset.
    #[arg(long)]
    spec: Option<PathBuf>,

    #[arg(long)]
    n_tasks: Option<usize>,

    #[arg(long)]
    n_layers: Option<usize>,

    #[arg(long)]
    edge_density: Option<f64>,

    #[arg(long)]
    n_sites: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchedulerArg {
    Hga,
    Random,
    Fifo,
    Greedy,
}

impl SchedulerArg {
    fn name(self) -> &'static str {
        match self {
            SchedulerArg::Hga => "hga",
            SchedulerArg::Random => "random",
            SchedulerArg::Fifo => "fifo",
            SchedulerArg::Greedy => "greedy",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Literal,
    Tradeoff,
}

impl From<VariantArg> for FormulaVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Literal => FormulaVariant::Literal,
            VariantArg::Tradeoff => FormulaVariant::Tradeoff,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AnalyzerArg {
    CyclesPlusIo,
    CyclesOnly,
}

impl From<AnalyzerArg> for AnalyzerVariant {
    fn from(a: AnalyzerArg) -> Self {
        match a {
            AnalyzerArg::CyclesPlusIo => AnalyzerVariant::CyclesPlusIo,
            AnalyzerArg::CyclesOnly => AnalyzerVariant::CyclesOnly,
        }
    }
}

#[derive(Args)]
struct ScheduleArgs {
    #[arg(long)]
    workflow: PathBuf,

    #[arg(long)]
    catalog: PathBuf,

    #[arg(long, value_enum, default_value_t = SchedulerArg::Hga)]
    scheduler: SchedulerArg,

    /// Green factor in [0, 1].
    #[arg(long, default_value_t = 0.5)]
    gf: f64,

    #[arg(long, value_enum, default_value_t = VariantArg::Tradeoff)]
    variant: VariantArg,

    /// Rank with raw metric values instead of min-max normalized ones.
    #[arg(long)]
    raw_metrics: bool,

    #[arg(long, value_enum, default_value_t = AnalyzerArg::CyclesPlusIo)]
    analyzer: AnalyzerArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum GatingArg {
    None,
    Coarse,
    Fine,
}

impl From<GatingArg> for GatingKind {
    fn from(g: GatingArg) -> Self {
        match g {
            GatingArg::None => GatingKind::None,
            GatingArg::Coarse => GatingKind::Coarse,
            GatingArg::Fine => GatingKind::Fine,
        }
    }
}

#[derive(Args)]
struct PolicyArgs {
    #[arg(long, value_enum, default_value_t = GatingArg::None)]
    gating: GatingArg,

    /// Seconds a gated block needs to wake up.
    #[arg(long)]
    wake_latency: Option<f64>,

    /// Joules burned per wake-up.
    #[arg(long)]
    wake_energy: Option<f64>,

    /// Fraction of idle power a gated block still leaks, in [0, 1).
    #[arg(long)]
    residual: Option<f64>,
}

impl PolicyArgs {
    fn policy(&self) -> Result<GatingPolicy, CliError> {
        let mut policy = GatingPolicy::with_defaults(self.gating.into());
        if let Some(v) = self.wake_latency {
            policy.wake_latency_s = v;
        }
        if let Some(v) = self.wake_energy {
            policy.wake_energy_j = v;
        }
        if let Some(v) = self.residual {
            policy.residual_fraction = v;
        }
        policy.validate()?;
        Ok(policy)
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    workflow: PathBuf,

    #[arg(long)]
    catalog: PathBuf,

    #[arg(long)]
    schedule: PathBuf,

    #[command(flatten)]
    policy: PolicyArgs,
}

#[derive(Args)]
struct CompareArgs {
    /// Ledger of the run under evaluation.
    #[arg(long, required_unless_present = "pipeline")]
    candidate: Option<PathBuf>,

    /// Ledger of the reference run.
    #[arg(long, required_unless_present = "pipeline")]
    baseline: Option<PathBuf>,

    /// Generate, schedule, simulate, and compare in one invocation:
    /// the list scheduler against a batch of seeded random schedules.
    #[arg(long, conflicts_with_all = ["candidate", "baseline"])]
    pipeline: bool,

    #[arg(long, value_enum, default_value_t = Preset::Eega3)]
    preset: Preset,

    /// Number of random baseline seeds in pipeline mode.
    #[arg(long, default_value_t = 20)]
    baseline_seeds: u64,

    #[arg(long, default_value_t = 0.5)]
    gf: f64,

    #[arg(long, value_enum, default_value_t = VariantArg::Tradeoff)]
    variant: VariantArg,

    #[command(flatten)]
    policy: PolicyArgs,
}

enum CliError {
    /// Bad input: malformed files, values out of range, mismatched data.
    Usage(String),
    /// The tool itself failed, e.g. an output write error.
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Internal(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Internal(m) => m,
        }
    }
}

impl From<greensched::Error> for CliError {
    fn from(e: greensched::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write_output(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn load_workflow(path: &Path) -> Result<Workflow, CliError> {
    Ok(Workflow::from_json(&read_input(path)?)?)
}

fn load_catalog(path: &Path) -> Result<Catalog, CliError> {
    Ok(Catalog::from_json(&read_input(path)?)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    fs::create_dir_all(&cli.out)
        .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", cli.out.display())))?;
    match &cli.command {
        Command::Generate(args) => cmd_generate(cli, args),
        Command::Schedule(args) => cmd_schedule(cli, args),
        Command::Simulate(args) => cmd_simulate(cli, args),
        Command::Compare(args) => cmd_compare(cli, args),
    }
}

fn scenario_spec(cli: &Cli, preset: Preset, spec_file: Option<&Path>) -> Result<ScenarioSpec, CliError> {
    let mut spec = match spec_file {
        Some(path) => ScenarioSpec::from_json(&read_input(path)?)?,
        None => preset.spec(),
    };
    if let Some(seed) = cli.seed {
        spec = spec.with_seed(seed);
    }
    Ok(spec)
}

fn cmd_generate(cli: &Cli, args: &GenerateArgs) -> Result<(), CliError> {
    let mut spec = scenario_spec(cli, args.preset, args.spec.as_deref())?;
    if let Some(n) = args.n_tasks {
        spec.workflow.n_tasks = n;
    }
    if let Some(n) = args.n_layers {
        spec.workflow.n_layers = n;
    }
    if let Some(d) = args.edge_density {
        spec.workflow.edge_density = d;
    }
    if let Some(n) = args.n_sites {
        spec.catalog.n_sites = n;
    }
    let (workflow, catalog) = spec.generate()?;
    write_output(&cli.out.join("workflow.json"), &workflow.to_json())?;
    write_output(&cli.out.join("catalog.json"), &catalog.to_json())?;
    Ok(())
}

fn green_config(gf: f64, variant: VariantArg, raw_metrics: bool) -> Result<GreenConfig, CliError> {
    Ok(GreenConfig::new(
        gf,
        variant.into(),
        !raw_metrics,
        AnalyzerVariant::CyclesPlusIo,
    )?)
}

fn cmd_schedule(cli: &Cli, args: &ScheduleArgs) -> Result<(), CliError> {
    let workflow = load_workflow(&args.workflow)?;
    let catalog = load_catalog(&args.catalog)?;
    catalog.validate_for(&workflow)?;

    let schedule = match args.scheduler {
        SchedulerArg::Hga => {
            let config = GreenConfig::new(
                args.gf,
                args.variant.into(),
                !args.raw_metrics,
                args.analyzer.into(),
            )?;
            hga_map(&workflow, &catalog, &config)?
        }
        SchedulerArg::Random => baseline_map(
            &workflow,
            &catalog,
            Baseline::RandomSeeded {
                seed: cli.seed.unwrap_or(0),
            },
        )?,
        SchedulerArg::Fifo => baseline_map(&workflow, &catalog, Baseline::FifoFirstSite)?,
        SchedulerArg::Greedy => baseline_map(&workflow, &catalog, Baseline::MakespanGreedy)?,
    };

    write_output(&cli.out.join("schedule.json"), &schedule.to_json())?;
    println!(
        "scheduler {}: {} tasks, {} mapped",
        args.scheduler.name(),
        workflow.len(),
        schedule.assignment.len()
    );
    Ok(())
}

fn write_run(cli: &Cli, stem: &str, run: &SimOutput) -> Result<(), CliError> {
    match cli.format {
        Format::Json => write_output(&cli.out.join(format!("{stem}.json")), &run.ledger.to_json())?,
        Format::Csv => write_output(&cli.out.join(format!("{stem}.csv")), &run.ledger.to_csv())?,
    }
    write_output(&cli.out.join("timeline.csv"), &timeline_to_csv(&run.timeline))
}

fn cmd_simulate(cli: &Cli, args: &SimulateArgs) -> Result<(), CliError> {
    let workflow = load_workflow(&args.workflow)?;
    let catalog = load_catalog(&args.catalog)?;
    let schedule = Schedule::from_json(&read_input(&args.schedule)?)?;
    let policy = args.policy.policy()?;

    let run = simulate(&workflow, &catalog, &schedule, &policy)?;
    write_run(cli, "ledger", &run)?;
    println!(
        "makespan {} s, total energy {} J",
        run.ledger.makespan_s, run.ledger.total_j
    );
    Ok(())
}

fn direction(savings: f64) -> &'static str {
    if savings > 0.0 {
        "candidate uses less energy than baseline"
    } else if savings < 0.0 {
        "candidate uses more energy than baseline"
    } else {
        "identical energy use"
    }
}

fn comparison_rows(rows: &[(String, Comparison)]) -> String {
    let mut csv =
        String::from("label,candidate_total_j,baseline_total_j,savings_fraction,makespan_delta_s\n");
    for (label, c) in rows {
        writeln!(
            csv,
            "{label},{},{},{},{}",
            c.candidate_total_j, c.baseline_total_j, c.savings_fraction, c.makespan_delta_s
        )
        .expect("string write");
    }
    csv
}

fn plot_rows(rows: &[(String, Comparison)]) -> String {
    let mut dat = String::from("# scenario  savings_pct\n");
    for (label, c) in rows {
        writeln!(dat, "{label} {:.4}", c.savings_fraction * 100.0).expect("string write");
    }
    dat
}

fn write_report(cli: &Cli, rows: &[(String, Comparison)]) -> Result<(), CliError> {
    write_output(&cli.out.join("report.csv"), &comparison_rows(rows))?;
    write_output(&cli.out.join("savings.dat"), &plot_rows(rows))
}

fn cmd_compare(cli: &Cli, args: &CompareArgs) -> Result<(), CliError> {
    if args.pipeline {
        return cmd_pipeline(cli, args);
    }
    let candidate_path = args.candidate.as_deref().expect("required by clap");
    let baseline_path = args.baseline.as_deref().expect("required by clap");
    let candidate = EnergyLedger::from_json(&read_input(candidate_path)?)?;
    let baseline = EnergyLedger::from_json(&read_input(baseline_path)?)?;
    let cmp = compare(&candidate, &baseline)?;

    let label = candidate_path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("candidate")
        .to_string();
    write_report(cli, &[(label, cmp)])?;
    println!(
        "savings {:.2}% ({})",
        cmp.savings_fraction * 100.0,
        direction(cmp.savings_fraction)
    );
    Ok(())
}

fn cmd_pipeline(cli: &Cli, args: &CompareArgs) -> Result<(), CliError> {
    if args.baseline_seeds == 0 {
        return Err(CliError::Usage("baseline-seeds must be at least 1".into()));
    }
    let spec = scenario_spec(cli, args.preset, None)?;
    let (workflow, catalog) = spec.generate()?;
    write_output(&cli.out.join("workflow.json"), &workflow.to_json())?;
    write_output(&cli.out.join("catalog.json"), &catalog.to_json())?;

    let config = green_config(args.gf, args.variant, false)?;
    let policy = args.policy.policy()?;
    let schedule = hga_map(&workflow, &catalog, &config)?;
    write_output(&cli.out.join("schedule.json"), &schedule.to_json())?;
    let run = simulate(&workflow, &catalog, &schedule, &policy)?;
    write_run(cli, "ledger", &run)?;

    let mut rows = Vec::new();
    for seed in 0..args.baseline_seeds {
        let baseline = baseline_map(&workflow, &catalog, Baseline::RandomSeeded { seed })?;
        let base_run = simulate(&workflow, &catalog, &baseline, &policy)?;
        let cmp = compare(&run.ledger, &base_run.ledger)?;
        rows.push((format!("seed{seed:02}"), cmp));
    }
    write_report(cli, &rows)?;

    let savings: Vec<f64> = rows.iter().map(|(_, c)| c.savings_fraction).collect();
    let mean = savings.iter().sum::<f64>() / savings.len() as f64;
    let min = savings.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = savings.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    println!(
        "savings over {} baseline seeds: mean {:.2}%, min {:.2}%, max {:.2}%",
        args.baseline_seeds,
        mean * 100.0,
        min * 100.0,
        max * 100.0
    );
    Ok(())
}
