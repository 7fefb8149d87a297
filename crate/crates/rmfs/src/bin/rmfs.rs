use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rmfs::harness::{self, ExperimentConfig};
use rmfs::instance::{Instance, InstanceParams, Layout, gen_instance};
use rmfs::model::{assignment_to_json, state_from_json, validate_assignment};
use rmfs::sim::{self, Policy, SimOptions};
use rmfs::solver::{SolverConfig, brute_force_oracle, solve_state};
use rmfs::{ModelParams, Variant, WarehouseState, baseline, ilp, prefilter};

/// Pick-order assignment and pod selection for robotic mobile fulfillment.
#[derive(Parser)]
#[command(name = "rmfs", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate an instance file.
    Gen(GenArgs),
    /// Solve one period decision for a state.
    Solve(SolveArgs),
    /// Simulate an instance until every order is picked.
    Simulate(SimArgs),
    /// Run a configured experiment into a CSV.
    Experiment(ExpArgs),
    /// Summarize an experiment CSV.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    orders: u32,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    skus: u32,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pods: u32,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    alpha: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    length_p: Option<f64>,
    #[arg(long)]
    popularity_p: Option<f64>,
    /// `desk`, `standard`, or a layout file. Orders are cut to its largest station capacity.
    #[arg(long, default_value = "standard")]
    layout: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// State file; the alternative is --instance, which starts with every pod stored.
    #[arg(long, conflicts_with = "instance", required_unless_present = "instance")]
    state: Option<PathBuf>,
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long, default_value = "desk")]
    layout: String,
    /// integrated, split (= split_stations), split_time or sequential.
    #[arg(long, default_value = "integrated")]
    variant: String,
    /// Keep only the n best-covered backlog orders.
    #[arg(long)]
    prefilter: Option<usize>,
    /// Packing capacity for split orders.
    #[arg(long)]
    packing: Option<u32>,
    #[arg(long, default_value_t = 2)]
    w_u: u32,
    /// Cross-check the objective with exhaustive search when the state is small enough.
    #[arg(long)]
    oracle: bool,
    /// Objective the solve must reach; a mismatch exits like an oracle mismatch.
    #[arg(long, hide = true)]
    expect: Option<i64>,
    /// Write the model in LP format.
    #[arg(long)]
    lp: Option<PathBuf>,
    #[arg(long)]
    node_limit: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, conflicts_with = "state", required_unless_present = "state")]
    instance: Option<PathBuf>,
    /// Start from a state file instead; pods listed at stations start docked.
    #[arg(long)]
    state: Option<PathBuf>,
    #[arg(long, default_value = "desk")]
    layout: String,
    #[arg(long, default_value = "integrated")]
    policy: Policy,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    prefilter: Option<usize>,
    #[arg(long)]
    packing: Option<u32>,
    /// Planning window in ticks; by default every trip is planned to its end.
    #[arg(long)]
    window: Option<u32>,
    /// Write an event trace as TSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the full report as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExpArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Prefilter sweep, e.g. 10,20,50. Unfiltered runs are always included.
    #[arg(long, value_delimiter = ',')]
    prefilter: Option<Vec<usize>>,
    #[arg(long)]
    repetitions: Option<u32>,
}

#[derive(Args)]
struct ReportArgs {
    csv: PathBuf,
    /// Solver timing rows; defaults to `<csv>.timing.csv` when present.
    #[arg(long)]
    timing: Option<PathBuf>,
    /// Plot data, one row per group and metric; defaults to `<csv>.plot.csv`.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] rmfs::Error),
    #[error("oracle mismatch: {0}")]
    Oracle(String),
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Lib(e.into())
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Lib(_) => 2,
            CliError::Oracle(_) => 3,
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let res = match cli.cmd {
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Solve(a) => cmd_solve(a),
        Cmd::Simulate(a) => cmd_simulate(a),
        Cmd::Experiment(a) => cmd_experiment(a),
        Cmd::Report(a) => cmd_report(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rmfs: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load_layout(spec: &str) -> CliResult<Layout> {
    match spec {
        "desk" => Ok(Layout::desk()),
        "standard" => Ok(Layout::standard()),
        path => Ok(Layout::from_json(&read(Path::new(path))?)?),
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_gen(a: GenArgs) -> CliResult {
    let layout = load_layout(&a.layout)?;
    let mut p = InstanceParams::new(a.orders, a.skus, a.pods, a.alpha, a.seed);
    if let Some(l) = a.length_p {
        p.length_p = l;
    }
    p.popularity_p = a.popularity_p;
    let inst = gen_instance(&p, &layout)?;
    emit(a.out.as_deref(), &(inst.to_json() + "\n"))
}

fn load_state(state: Option<&Path>, instance: Option<&Path>, layout: &str) -> CliResult<(WarehouseState, Layout)> {
    let layout = load_layout(layout)?;
    match (state, instance) {
        (Some(s), _) => Ok((state_from_json(&read(s)?)?, layout)),
        (None, Some(i)) => {
            let inst = Instance::from_json(&read(i)?)?;
            Ok((sim::initial_state(&inst, &layout), layout))
        }
        (None, None) => Err(CliError::Usage("give --state or --instance".into())),
    }
}

fn cmd_solve(a: SolveArgs) -> CliResult {
    let (mut state, _) = load_state(a.state.as_deref(), a.instance.as_deref(), &a.layout)?;
    if let Some(n) = a.prefilter {
        state = state.with_backlog(&prefilter::prefilter(&state, n));
    }
    let params = ModelParams { w_u: a.w_u, packing_capacity: a.packing };
    if a.variant == "sequential" {
        if a.oracle || a.lp.is_some() {
            return Err(CliError::Usage("--oracle and --lp need a model variant".into()));
        }
        let asg = baseline::sequential_assignment(&state, a.w_u);
        println!("sequential: {} new pod-station visits", asg.new_visits(&state));
        return emit(a.out.as_deref(), &(assignment_to_json(&asg) + "\n"));
    }
    let variant: Variant = a.variant.parse().map_err(|e: rmfs::Error| CliError::Usage(e.to_string()))?;
    if let Some(path) = &a.lp {
        fs::write(path, ilp::to_lp(&ilp::build_model(&state, variant, &params)?))?;
    }
    let mut config = SolverConfig::default();
    if a.node_limit.is_some() {
        config.node_limit = a.node_limit;
    }
    let (asg, sol) = solve_state(&state, variant, &params, &config)?;
    let violations = validate_assignment(&state, &asg, variant, &params);
    if !violations.is_empty() {
        return Err(rmfs::Error::Invalid(violations).into());
    }
    let summary = format!(
        "{variant}: objective {} ({:?}, {} nodes, {} new visits)",
        asg.objective_value,
        sol.status,
        sol.nodes,
        asg.new_visits(&state)
    );
    if a.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    if let Some(want) = a.expect.filter(|&w| w != asg.objective_value) {
        return Err(CliError::Oracle(format!("solver {} vs expected {want}", asg.objective_value)));
    }
    if a.oracle {
        match brute_force_oracle(&state, variant, &params) {
            Ok((want, _)) if want == asg.objective_value => eprintln!("oracle agrees: {want}"),
            Ok((want, _)) => {
                return Err(CliError::Oracle(format!("solver {} vs oracle {want}", asg.objective_value)));
            }
            Err(e) => eprintln!("oracle skipped: {e}"),
        }
    }
    emit(a.out.as_deref(), &(assignment_to_json(&asg) + "\n"))
}

fn cmd_simulate(a: SimArgs) -> CliResult {
    let (state, layout) = load_state(a.state.as_deref(), a.instance.as_deref(), &a.layout)?;
    layout.validate(state.pods.len() as u32)?;
    let params = ModelParams { packing_capacity: a.packing.or(layout.packing_capacity), ..Default::default() };
    let options = SimOptions { prefilter: a.prefilter, window: a.window, trace: a.trace.is_some(), ..Default::default() };
    let r = sim::run_state(&state, &layout, a.policy, &params, a.seed, &options)?;
    if let Some(path) = &a.trace {
        r.write_trace(io::BufWriter::new(fs::File::create(path)?))?;
    }
    if let Some(path) = &a.out {
        fs::write(path, serde_json::to_string_pretty(&r).map_err(rmfs::Error::from)? + "\n")?;
    }
    let orders = r.completed_orders.max(1) as f64;
    println!("policy            {}", r.policy);
    println!("orders            {}", r.completed_orders);
    println!("picks             {}", r.total_picks);
    println!("visits            {}", r.pod_station_visits);
    println!("visits/order      {:.4}", r.pod_station_visits as f64 / orders);
    println!("pile-on           {:.4}", r.pile_on.value());
    println!("distance/order    {:.2} m", r.robot_distance / orders);
    println!("turnover backlog  {:.2} s", r.mean_backlog_time());
    println!("turnover station  {:.2} s", r.mean_station_time());
    println!("makespan          {:.2} s", r.sim_seconds);
    println!("periods           {}", r.periods.len());
    println!("solver t=1        {:.4} s", r.solver_time(true).as_secs_f64());
    println!("solver t>1        {:.4} s", r.solver_time(false).as_secs_f64());
    if !r.collisions.is_empty() {
        return Err(rmfs::Error::Sim(format!("{} collisions, first: {}", r.collisions.len(), r.collisions[0])).into());
    }
    Ok(())
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn cmd_experiment(a: ExpArgs) -> CliResult {
    let mut config = ExperimentConfig::from_json(&read(&a.config)?)?;
    if let Some(sweep) = a.prefilter {
        config.prefilter = std::iter::once(None).chain(sweep.into_iter().map(Some)).collect();
    }
    if let Some(r) = a.repetitions {
        config.repetitions = r;
    }
    let out = harness::run_experiment(&config)?;
    harness::write_rows(fs::File::create(&a.out)?, &out.rows)?;
    harness::write_rows(fs::File::create(sidecar(&a.out, ".timing.csv"))?, &out.timing)?;
    let failed = out.rows.iter().filter(|r| r.status != "ok").count();
    println!("{} runs, {} failed, written to {}", out.rows.len(), failed, a.out.display());
    Ok(())
}

fn cmd_report(a: ReportArgs) -> CliResult {
    let rows = harness::read_rows(read(&a.csv)?.as_bytes())?;
    let timing_path = a.timing.clone().unwrap_or_else(|| sidecar(&a.csv, ".timing.csv"));
    let timing = if a.timing.is_some() || timing_path.exists() {
        harness::read_timing(read(&timing_path)?.as_bytes())?
    } else {
        Vec::new()
    };
    let summary = harness::summarize(&rows, &timing);
    print!("{}", harness::render_table(&summary));
    let plot = a.plot.unwrap_or_else(|| sidecar(&a.csv, ".plot.csv"));
    harness::write_rows(fs::File::create(&plot)?, &summary)?;
    Ok(())
}
