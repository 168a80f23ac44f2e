use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use oblot::algorithms::AlgorithmKind;
use oblot::engine::generate::{run_batch, BatchRow, BatchSpec};
use oblot::engine::{demo_fsync_trap, demo_mirror_gathering, run, trap_start, RunStatus, Trace};
use oblot::scenario::{parse_scenario, Scenario};
use oblot::{Error, Point, Result};

#[derive(Parser)]
#[command(name = "oblot", version, about = "Oblivious robot simulator: runs, batches, demos and the session server")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its line-delimited trace.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run generated scenario families on a worker pool.
    Batch {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Impossibility demonstrations.
    Demo {
        name: DemoName,
        /// Algorithm under test.
        #[arg(long)]
        candidate: Option<AlgorithmArg>,
        /// Grant weak multiplicity detection (mirror-gathering control run).
        #[arg(long)]
        grant_bits: bool,
        #[arg(long, default_value_t = 10_000)]
        rounds: u64,
        /// Robots in the mirror scenario.
        #[arg(long, default_value_t = 3)]
        robots: usize,
        /// Seed of the fsync-trap start.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Where to write the demo trace.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the session API, and the UI bundle when a static directory is given.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DemoName {
    FsyncTrap,
    MirrorGathering,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    SeqPf,
    SeqPfSmall,
    SeqGathering,
    GoToCenterSec,
    Rendezvous,
    Stay,
    GoToOther,
    GoToMidpoint,
}

impl From<AlgorithmArg> for AlgorithmKind {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::SeqPf => AlgorithmKind::SeqPf,
            AlgorithmArg::SeqPfSmall => AlgorithmKind::SeqPfSmall,
            AlgorithmArg::SeqGathering => AlgorithmKind::SeqGathering,
            AlgorithmArg::GoToCenterSec => AlgorithmKind::GoToCenterSec,
            AlgorithmArg::Rendezvous => AlgorithmKind::Rendezvous,
            AlgorithmArg::Stay => AlgorithmKind::Stay,
            AlgorithmArg::GoToOther => AlgorithmKind::GoToOther,
            AlgorithmArg::GoToMidpoint => AlgorithmKind::GoToMidpoint,
        }
    }
}

fn env_seed() -> Option<u64> {
    std::env::var("OBLOT_SEED").ok().and_then(|v| v.trim().parse().ok())
}

fn write_trace(path: &Path, trace: &Trace) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, trace.to_jsonl()?)?;
    Ok(())
}

fn cmd_run(scenario: &Path, out: &Path) -> Result<ExitCode> {
    let text = fs::read_to_string(scenario)?;
    let mut s: Scenario = parse_scenario(&text)?;
    s.apply_env_seed();
    s.validate()?;
    let trace = run(&s)?;
    write_trace(out, &trace)?;
    println!("{}", trace.summary());
    Ok(match trace.status {
        RunStatus::Formed => ExitCode::SUCCESS,
        _ => ExitCode::from(2),
    })
}

fn cmd_batch(spec: &Path, jobs: usize, out_dir: &Path) -> Result<ExitCode> {
    let text = fs::read_to_string(spec)?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    let mut spec: BatchSpec = serde_path_to_error::deserialize(de)
        .map_err(|e| Error::Schema { path: e.path().to_string(), message: e.inner().to_string() })?;
    if let Some(seed) = env_seed() {
        spec.generators.iter_mut().for_each(|g| g.seed = seed);
    }
    let rows = run_batch(&spec, jobs)?;
    fs::create_dir_all(out_dir)?;
    let mut csv = String::from(BatchRow::HEADER);
    csv.push('\n');
    for r in &rows {
        csv.push_str(&r.csv());
        csv.push('\n');
    }
    fs::write(out_dir.join("summary.csv"), csv)?;
    fs::write(out_dir.join("summary.json"), serde_json::to_string_pretty(&rows)?)?;
    let failed = rows.iter().filter(|r| !r.pass).count();
    println!("{} runs, {} failed, table at {}", rows.len(), failed, out_dir.join("summary.csv").display());
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn hexagon() -> Vec<Point> {
    (0..6).map(|i| Point::polar(1.0, i as f64 * std::f64::consts::TAU / 6.0)).collect()
}

#[allow(clippy::too_many_arguments)]
fn cmd_demo(
    name: DemoName,
    candidate: Option<AlgorithmArg>,
    grant_bits: bool,
    rounds: u64,
    robots: usize,
    seed: u64,
    out: Option<PathBuf>,
) -> Result<ExitCode> {
    let seed = env_seed().unwrap_or(seed);
    let (trace, verdict, report, default_out) = match name {
        DemoName::FsyncTrap => {
            let algorithm = candidate.map(AlgorithmKind::from).unwrap_or(AlgorithmKind::SeqPf);
            let pattern = hexagon();
            let start = trap_start(seed, pattern.len(), 3);
            let (trace, report) = demo_fsync_trap(&pattern, &start, algorithm, rounds)?;
            let verdict = if report.trap_confirmed { "trap-confirmed" } else { "trap-escaped" };
            (trace, verdict.to_string(), serde_json::to_value(&report)?, "fsync-trap.jsonl")
        }
        DemoName::MirrorGathering => {
            let algorithm = candidate.map(AlgorithmKind::from).unwrap_or(AlgorithmKind::GoToMidpoint);
            let (trace, report) = demo_mirror_gathering(algorithm, robots, rounds, grant_bits)?;
            (trace, report.verdict.clone(), serde_json::to_value(&report)?, "mirror-gathering.jsonl")
        }
    };
    let out = out.unwrap_or_else(|| PathBuf::from(default_out));
    write_trace(&out, &trace)?;
    println!("{report}");
    println!("verdict: {verdict} after {} rounds", trace.events.len());
    println!("trace: {}", out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_serve(port: u16, static_dir: Option<PathBuf>) -> Result<ExitCode> {
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async {
        if let Some(dir) = &static_dir {
            println!("serving {} and the session API on port {port}", dir.display());
        } else {
            println!("serving the session API on port {port}");
        }
        oblot::server::serve(port, static_dir).await
    })?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { scenario, out } => cmd_run(&scenario, &out),
        Command::Batch { spec, jobs, out_dir } => cmd_batch(&spec, jobs, &out_dir),
        Command::Demo { name, candidate, grant_bits, rounds, robots, seed, out } => {
            cmd_demo(name, candidate, grant_bits, rounds, robots, seed, out)
        }
        Command::Serve { port, static_dir } => cmd_serve(port, static_dir),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
