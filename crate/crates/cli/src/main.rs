use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gather_core::experiment::{
    emit, run_experiment, sweep, write_sweep_csv, ExperimentConfig, RunSummary, SweepConfig, PRESETS,
};
use gather_core::GatherError;

const VALIDATION_EXIT: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "swarm-gather", version, about = "Run multi-agent gathering experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct Common {
    /// JSON experiment (or sweep) description.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Master seed; overrides the config. Falls back to SWARM_GATHER_SEED.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one experiment and write config, summary, metrics and trajectory files.
    Run(Common),
    /// Run a parameter grid over a base experiment and write `sweep.csv`.
    Sweep(Common),
    /// List the named starting constellations.
    Presets,
    /// Check a config without running it.
    Validate {
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
        #[arg(long)]
        quiet: bool,
    },
}

fn env_seed() -> Result<Option<u64>, GatherError> {
    match std::env::var("SWARM_GATHER_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| GatherError::param("SWARM_GATHER_SEED", format!("not an unsigned integer: {s:?}"))),
        Err(_) => Ok(None),
    }
}

/// Flag, then config, then environment, then 0.
fn resolve_seed(flag: Option<u64>, config: Option<u64>) -> Result<u64, GatherError> {
    if let Some(s) = flag.or(config) {
        return Ok(s);
    }
    Ok(env_seed()?.unwrap_or(0))
}

fn read_text(path: &Path) -> Result<String, GatherError> {
    std::fs::read_to_string(path).map_err(|e| GatherError::Io(format!("{}: {e}", path.display())))
}

fn is_sweep(text: &str) -> bool {
    serde_json::from_str::<serde_json::Value>(text)
        .ok()
        .and_then(|v| v.as_object().map(|o| o.contains_key("base")))
        .unwrap_or(false)
}

fn cmd_run(a: &Common) -> Result<u8, GatherError> {
    let mut cfg = ExperimentConfig::from_json(&read_text(&a.config)?)?;
    cfg.seed = Some(resolve_seed(a.seed, cfg.seed)?);
    let r = run_experiment(&cfg)?;
    let files = emit(&cfg, &r, &a.out)?;
    if !a.quiet {
        for w in &r.warnings {
            eprintln!("warning: {w}");
        }
        let s = RunSummary::new(&cfg, &r);
        println!(
            "{}: {} after {} steps (t = {}), diameter {:.6e} -> {:.6e}, {} violation(s)",
            s.system,
            serde_json::to_value(s.status)?.as_str().unwrap_or_default(),
            s.steps,
            s.final_time,
            s.initial_diameter,
            s.final_diameter,
            s.violations.len()
        );
        if let Some(f) = &r.failure {
            println!("failure: {f}");
        }
        if let Some(g) = r.richardson {
            println!("richardson gap: {g:.3e}");
        }
        println!("wrote {}", files.summary.parent().unwrap_or(&a.out).display());
    }
    Ok(r.status.code() as u8)
}

fn cmd_sweep(a: &Common) -> Result<u8, GatherError> {
    let mut sc = SweepConfig::from_json(&read_text(&a.config)?)?;
    sc.base.seed = Some(resolve_seed(a.seed, sc.base.seed)?);
    let rows = sweep(&sc.base, &sc.grid, &sc.seeds)?;
    std::fs::create_dir_all(&a.out).map_err(|e| GatherError::Io(format!("{}: {e}", a.out.display())))?;
    let path = a.out.join("sweep.csv");
    write_sweep_csv(&rows, &sc.grid, &path)?;
    if !a.quiet {
        let gathered = rows.iter().filter(|r| r.gathered).count();
        let worst = rows.iter().map(|r| r.max_violation).fold(0.0, f64::max);
        println!(
            "{} run(s), {gathered} gathered, max violation {worst:.3e}; wrote {}",
            rows.len(),
            path.display()
        );
        if let Some(r) = rows.iter().filter_map(|r| r.s4_post_entry_radius).reduce(f64::max) {
            println!("max post-entry radius {r:.6}");
        }
    }
    Ok(0)
}

fn cmd_validate(path: &Path, quiet: bool) -> Result<u8, GatherError> {
    let text = read_text(path)?;
    let warnings = if is_sweep(&text) {
        let sc = SweepConfig::from_json(&text)?;
        let cells = gather_core::experiment::expand_grid(&sc.base, &sc.grid)?;
        if !quiet {
            println!("ok: sweep with {} cell(s) x {} seed(s)", cells.len(), sc.seeds.len().max(1));
        }
        sc.base.warnings()
    } else {
        let cfg = ExperimentConfig::from_json(&text)?;
        cfg.validate()?;
        cfg.initial_constellation()?;
        if !quiet {
            println!("ok: {} with {} agents", cfg.system.name(), cfg.initial_constellation()?.len());
        }
        cfg.warnings()
    };
    if !quiet {
        for w in warnings {
            eprintln!("warning: {w}");
        }
    }
    Ok(0)
}

fn cmd_presets() -> u8 {
    for p in PRESETS.iter() {
        let size = if p.sized {
            format!("n = {} (adjustable)", p.default_n)
        } else {
            format!("n = {}", p.default_n)
        };
        println!("{:<14} {size:<20} {}", p.name, p.description);
    }
    0
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Presets => Ok(cmd_presets()),
        Command::Validate { config, quiet } => cmd_validate(config, *quiet),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(VALIDATION_EXIT)
        }
    }
}
