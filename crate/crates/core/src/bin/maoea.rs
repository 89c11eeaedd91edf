use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use maoea::adaptation::AdaptationParams;
use maoea::refgen::ReferenceArchive;
use maoea::runner::{experiment, RunConfig};
use maoea::simharness::{load_scenarios, permutation_similarity, run_scenario, ArchiveMode};
use maoea::{Error, Result};

#[derive(Parser)]
#[command(name = "maoea", version, about = "Adaptive reference-vector many-objective optimizer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment over one or more seeds.
    Run(Box<RunArgs>),
    /// Drive the adaptation engine with simulated 2-D fronts.
    Simulate(SimulateArgs),
    /// Print a reference archive's base layer as JSON.
    Lattice {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        h: u32,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    /// JSON config file; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    evals: Option<u64>,
    #[arg(long)]
    w: Option<usize>,
    #[arg(long)]
    theta: Option<f64>,
    /// `1..20` (inclusive), `1,5,9` or a single seed.
    #[arg(long, value_parser = parse_seeds)]
    seeds: Option<SeedList>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    no_ia: bool,
    #[arg(long)]
    fixed_z: bool,
    #[arg(long)]
    igd_samples: Option<usize>,
    #[arg(long)]
    sample_points: Option<usize>,
    #[arg(long)]
    confidence: Option<f64>,
    #[arg(long)]
    eta_c: Option<f64>,
    #[arg(long)]
    eta_m: Option<f64>,
    #[arg(long)]
    p_c: Option<f64>,
    #[arg(long)]
    p_m: Option<f64>,
    #[arg(long)]
    density_cap: Option<u32>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Reset,
    CarryOver,
    Both,
}

#[derive(clap::Args)]
struct SimulateArgs {
    #[arg(long)]
    scenarios: PathBuf,
    #[arg(long, default_value_t = 24)]
    n: usize,
    #[arg(long, default_value_t = 0.2)]
    theta: f64,
    #[arg(long, value_enum, default_value = "both")]
    mode: ModeArg,
    #[arg(long, default_value_t = 64)]
    density_cap: u32,
    /// Directory for `report.json` and the similarity CSVs; stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone)]
struct SeedList(Vec<u64>);

fn parse_seeds(s: &str) -> std::result::Result<SeedList, String> {
    parse_seed_values(s).map(SeedList)
}

fn parse_seed_values(s: &str) -> std::result::Result<Vec<u64>, String> {
    let bad = |_| format!("invalid seed list `{s}`");
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (u64, u64) = (a.trim().parse().map_err(bad)?, b.trim().parse().map_err(bad)?);
        if a > b {
            return Err(format!("empty seed range `{s}`"));
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|t| t.trim().parse().map_err(bad)).collect()
}

fn config_from(args: RunArgs) -> Result<RunConfig> {
    let mut obj = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            match serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))? {
                Value::Object(m) => m,
                _ => return Err(Error::Config(format!("{}: expected a JSON object", path.display()))),
            }
        }
        None => Map::new(),
    };
    // normalise aliases so flags overwrite rather than duplicate
    for (alias, key) in [("evals", "max_evals"), ("out", "out_dir")] {
        if let Some(v) = obj.remove(alias) {
            obj.entry(key).or_insert(v);
        }
    }
    let mut set = |key: &str, v: Value| {
        obj.insert(key.to_string(), v);
    };
    if let Some(v) = args.problem {
        set("problem", json!(v));
    }
    if let Some(v) = args.m {
        set("m", json!(v));
    }
    if let Some(v) = args.d {
        set("d", json!(v));
    }
    if let Some(v) = args.n {
        set("n", json!(v));
    }
    if let Some(v) = args.evals {
        set("max_evals", json!(v));
    }
    if let Some(v) = args.w {
        set("w", json!(v));
    }
    if let Some(v) = args.theta {
        set("theta", json!(v));
    }
    if let Some(SeedList(v)) = args.seeds {
        set("seeds", json!(v));
    }
    if let Some(v) = args.out {
        set("out_dir", json!(v));
    }
    if args.no_ia {
        set("no_ia", json!(true));
    }
    if args.fixed_z {
        set("fixed_z", json!(true));
    }
    if let Some(v) = args.igd_samples {
        set("igd_samples", json!(v));
    }
    if let Some(v) = args.sample_points {
        set("sample_points", json!(v));
    }
    if let Some(v) = args.confidence {
        set("confidence", json!(v));
    }
    if let Some(v) = args.density_cap {
        set("density_cap", json!(v));
    }
    let variation = obj.entry("variation").or_insert_with(|| json!({}));
    let Value::Object(var) = variation else {
        return Err(Error::Config("`variation` must be an object".into()));
    };
    for (key, v) in [("eta_c", args.eta_c), ("eta_m", args.eta_m), ("p_c", args.p_c), ("p_m", args.p_m)] {
        if let Some(v) = v {
            var.insert(key.into(), json!(v));
        }
    }
    let config: RunConfig =
        serde_json::from_value(Value::Object(obj)).map_err(|e| Error::Config(e.to_string()))?;
    if config.seeds.is_empty() {
        return Err(Error::Config("no seeds given".into()));
    }
    config.validate()?;
    Ok(config)
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let config = config_from(args)?;
    log::info!(
        "{} M={} N={} budget {} over {} seed(s)",
        config.problem,
        config.m,
        config.n,
        config.max_evals,
        config.seeds.len()
    );
    let result = experiment(&config)?;
    println!("{}", serde_json::to_string_pretty(&result.summary)?);
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let scenarios = load_scenarios(&args.scenarios)?;
    let params = AdaptationParams::new(args.n, args.theta, 1)
        .map_err(|e| Error::Config(e.to_string()))?
        .with_density_cap(args.density_cap);
    params.validate().map_err(|e| Error::Config(e.to_string()))?;

    let mut reports = Vec::new();
    for s in &scenarios {
        let mut archive = ReferenceArchive::for_population(2, args.n)?;
        reports.push(run_scenario(s, &mut archive, &params)?);
    }
    let modes: &[ArchiveMode] = match args.mode {
        ModeArg::Reset => &[ArchiveMode::Reset],
        ModeArg::CarryOver => &[ArchiveMode::CarryOver],
        ModeArg::Both => &[ArchiveMode::Reset, ArchiveMode::CarryOver],
    };
    let mut similarity = Vec::new();
    for &mode in modes {
        similarity.push(permutation_similarity(&scenarios, &params, mode)?);
    }
    let report = json!({
        "population_size": args.n,
        "theta": args.theta,
        "scenarios": reports,
        "similarity": similarity,
    });
    let text = serde_json::to_string_pretty(&report)? + "\n";
    match &args.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| Error::Io {
                path: dir.clone(),
                source: e,
            })?;
            write(&dir.join("report.json"), &text)?;
            for sim in &similarity {
                let name = match sim.mode {
                    ArchiveMode::Reset => "similarity_reset.csv",
                    ArchiveMode::CarryOver => "similarity_carry_over.csv",
                };
                write(&dir.join(name), &sim.matrix_csv())?;
            }
            for sim in &similarity {
                eprintln!("{:?}: mean similarity {:.2}%", sim.mode, sim.mean);
            }
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_lattice(m: usize, h: u32) -> Result<()> {
    let archive = ReferenceArchive::new(m, h)?;
    println!("{}", serde_json::to_string_pretty(&archive.dump())?);
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(*args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Lattice { m, h } => cmd_lattice(m, h),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 1 } else { 2 })
        }
    }
}
