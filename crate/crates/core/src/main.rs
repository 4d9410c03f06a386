use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use grone::cli::{
    parse_scenario_str, parse_sweep_arg, run_sweep, SweepOptions, SweepParameter, SweepSpec,
    DEFAULT_SEEDS,
};
use grone::engine::{Protocol, Scenario, World};
use grone::metrics::{compute_report, UNDEFINED};

#[derive(Parser)]
#[command(name = "grone-sim", version, about = "Delay-tolerant network routing simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and print its metrics.
    Run(RunArgs),
    /// Sweep one setting over several values and seeds, writing result tables.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    /// 40 nodes, 500 m × 500 m, one hour.
    Desk,
    /// 120 nodes, 1000 m × 1000 m, five hours.
    Standard,
}

#[derive(Args)]
struct ScenarioArgs {
    /// key = value scenario file, applied on top of the preset.
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "standard")]
    preset: Preset,
}

impl ScenarioArgs {
    fn load(&self) -> Result<Scenario, String> {
        let base = match self.preset {
            Preset::Desk => Scenario::desk(),
            Preset::Standard => Scenario::standard(),
        };
        let Some(path) = &self.scenario else {
            return Ok(base);
        };
        let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        parse_scenario_str(&text, base).map_err(|e| format!("{}: {e}", path.display()))
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Overrides the scenario's protocol.
    #[arg(long)]
    protocol: Option<Protocol>,
    /// Overrides the scenario's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the event log here.
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Protocols to run, comma separated, or `all`. Defaults to the four
    /// compared protocols.
    #[arg(long, value_delimiter = ',')]
    protocol: Vec<String>,
    /// Swept setting and its values, e.g. `message_interval=20,30,40,50,60`.
    #[arg(long)]
    sweep: String,
    /// Comma-separated seeds.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SEEDS)]
    seeds: Vec<u64>,
    /// Output directory for the tables.
    #[arg(long, env = "GRONE_OUTPUT_DIR", default_value = "results")]
    out: PathBuf,
    /// Also write one event log per run.
    #[arg(long)]
    verbose: bool,
    /// Concurrent runs; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

fn protocols(names: &[String]) -> Result<Vec<Protocol>, String> {
    if names.is_empty() || names.iter().any(|n| n.eq_ignore_ascii_case("all")) {
        return Ok(Protocol::COMPARED.to_vec());
    }
    names.iter().map(|n| n.parse()).collect()
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| UNDEFINED.to_string(), |v| format!("{v:.6}"))
}

fn run(args: RunArgs) -> Result<(), String> {
    let mut scenario = args.scenario.load()?;
    if let Some(p) = args.protocol {
        scenario.protocol = p;
    }
    if let Some(s) = args.seed {
        scenario.seed = s;
    }
    let mut world = World::new(scenario.clone()).map_err(|e| e.to_string())?;
    world.run_to_end();
    let log = world.into_log();
    if let Some(path) = &args.log {
        let file = File::create(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let mut out = BufWriter::new(file);
        log.write_to(&mut out)
            .and_then(|_| out.flush())
            .map_err(|e| format!("{}: {e}", path.display()))?;
    }
    let r = compute_report(&log);
    println!("protocol               {}", scenario.protocol);
    println!("seed                   {}", scenario.seed);
    println!("created                {}", r.created);
    println!("delivered              {}", r.delivered);
    println!("relayed                {}", r.relayed);
    println!("delivery_ratio         {:.6}", r.delivery_ratio);
    println!("avg_hop_count          {:.6}", r.avg_hop_count);
    println!("avg_hop_per_delivered  {}", fmt_opt(r.avg_hop_per_delivered));
    println!("overhead_ratio         {}", fmt_opt(r.overhead_ratio));
    println!("observed_max_hop       {}", r.observed_max_hop);
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<(), String> {
    let base = args.scenario.load()?;
    let (parameter, values): (SweepParameter, Vec<f64>) = parse_sweep_arg(&args.sweep)?;
    let spec = SweepSpec { base, parameter, values, seeds: args.seeds, protocols: protocols(&args.protocol)? };
    let options = SweepOptions { verbose: args.verbose, jobs: args.jobs };
    let results = run_sweep(&spec, &args.out, options).map_err(|e| e.to_string())?;
    eprintln!(
        "{} runs, {} points written to {}",
        results.runs.len(),
        results.points.len(),
        args.out.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(a) => run(a),
        Command::Sweep(a) => sweep(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("grone-sim: {e}");
            ExitCode::FAILURE
        }
    }
}
