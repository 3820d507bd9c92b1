use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use greenplan::error::Error;
use greenplan::model::Approach;
use greenplan::scenario::{
    renewable_cell, run_sweep, solve_job, write_renewable, InstanceFile, Job, RenewableConfig, ScenarioConfig,
};
use greenplan::solver::{export_lp, Solution, Status};
use greenplan::workload::StorageScenario;

const OK: u8 = 0;
const INFEASIBLE: u8 = 1;
const CONFIG_ERROR: u8 = 2;
const LIMIT: u8 = 3;

/// Largest instance solved without `--large`.
const DESK_NODES: usize = 8;
const DESK_BETA: u32 = 10;

#[derive(Parser)]
#[command(name = "greenplan", version, about = "Energy-aware big-data placement over IP-over-WDM networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance.
    Solve {
        #[arg(long)]
        topology: PathBuf,
        #[arg(long, default_value = "a1")]
        scenario: StorageScenario,
        #[arg(long, default_value = "green")]
        mode: Approach,
        #[arg(long, value_enum, default_value = "off")]
        backup: OnOff,
        #[arg(long)]
        beta: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Comma-separated solar levels (kW per node) for a renewable sweep.
        #[arg(long)]
        renewable: Option<String>,
        #[arg(long)]
        export_lp: Option<PathBuf>,
        #[arg(long)]
        integer_ports: bool,
        /// Classical approach on cleansed instead of raw volumes.
        #[arg(long)]
        same_volumes: bool,
        /// Allow instances beyond desk scale with gap-limited solves.
        #[arg(long)]
        large: bool,
        /// Sweep config supplying ranges, parameters and solver options.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a sweep from a JSON config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Audit a stored solution against its instance.
    Verify {
        /// `instance.json` written by `solve`.
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
}

fn exit_for(status: Status) -> u8 {
    match status {
        Status::Optimal => OK,
        Status::Infeasible | Status::Unbounded => INFEASIBLE,
        Status::Feasible { .. } | Status::Timeout => LIMIT,
    }
}

fn config_error(e: &Error) -> bool {
    matches!(e, Error::Invalid(_) | Error::Json(_) | Error::Io { .. } | Error::TooLarge(_))
}

fn parse_levels(text: &str) -> Result<Vec<f64>, Error> {
    text.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Invalid(format!("bad solar level '{t}'"))))
        .collect()
}

fn create_dir(dir: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.to_path_buf(), source: e })
}

#[allow(clippy::too_many_arguments)]
fn solve(
    topology: PathBuf,
    scenario: StorageScenario,
    mode: Approach,
    backup: OnOff,
    beta: u32,
    seed: u64,
    renewable: Option<String>,
    export: Option<PathBuf>,
    integer_ports: bool,
    same_volumes: bool,
    large: bool,
    config: Option<PathBuf>,
    out: PathBuf,
) -> Result<u8, Error> {
    let mut config = match config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default(),
    };
    config.topology = topology;
    config.model.integer_ports |= integer_ports;
    config.model.same_volumes |= same_volumes;
    let backup = matches!(backup, OnOff::On);
    config.betas = vec![beta];
    config.seeds = vec![seed];
    config.modes = None;
    config.scenarios = vec![scenario];
    config.approaches = vec![mode];
    config.backup = vec![backup];
    if large {
        config.solver.optimality_gap = config.solver.optimality_gap.max(1e-2);
        config.solver.time_limit_s.get_or_insert(600.0);
    }
    let levels = renewable.as_deref().map(parse_levels).transpose()?;
    if let Some(levels) = &levels {
        config.renewable = Some(RenewableConfig {
            solar_kw: levels.clone(),
            scenario,
            approach: mode,
            backup,
            betas: None,
            seeds: None,
        });
    }
    let topo = config.validate()?;
    if !large && (topo.node_count() > DESK_NODES || beta > DESK_BETA) {
        return Err(Error::Invalid(format!(
            "instance beyond desk scale ({} nodes, beta {beta}); pass --large for a gap-limited solve",
            topo.node_count()
        )));
    }
    create_dir(&out)?;
    let job = Job { scenario, beta, seed, approach: mode, backup };
    let work = config.workload(&topo, scenario, beta, seed)?;
    let flags = config.flags(mode, backup);
    InstanceFile::new(&topo, &work, &flags, &config.params)?.save(out.join("instance.json"))?;
    let result = solve_job(&config, &topo, job, &[], None)?;
    if let Some(path) = export {
        export_lp(&result.model, path)?;
    }
    result.solution.save(out.join("solution.json"))?;
    let row = &result.row;
    std::fs::write(out.join("result.json"), serde_json::to_string_pretty(row)?)
        .map_err(|e| Error::Io { path: out.join("result.json"), source: e })?;
    println!("{}: {} objective {:?} W gap {:?}", job.label(), result.solution.status, row.objective_w, row.gap);
    if !row.note.is_empty() {
        println!("note: {}", row.note);
    }
    let mut code = exit_for(result.solution.status);
    if result.solution.status.has_solution() && !row.verified {
        eprintln!("verification failed: {}", row.note);
        code = INFEASIBLE;
    }
    if let Some(renewable) = &config.renewable {
        let (rows, _) = renewable_cell(&config, renewable, &topo, beta, seed)?;
        write_renewable(&out, &rows)?;
        for r in &rows {
            println!("solar {:>6} kW: {} TNRE {:?} W reduction {:?}%", r.solar_kw, r.status, r.tnre_w, r.reduction_pct);
            if code == OK && r.status != "optimal" {
                code = LIMIT;
            }
        }
    }
    Ok(code)
}

fn sweep(config: PathBuf, out: Option<PathBuf>) -> Result<u8, Error> {
    let config = ScenarioConfig::load(config)?;
    let out = out.or(config.out_dir.clone()).ok_or_else(|| Error::Invalid("no output directory (--out)".into()))?;
    let result = run_sweep(&config, Some(&out))?;
    let mut code = OK;
    for row in &result.rows {
        let row_code = match row.status.as_str() {
            "optimal" => OK,
            "infeasible" | "unbounded" => INFEASIBLE,
            _ => LIMIT,
        };
        if row.objective_w.is_some() && !row.verified {
            eprintln!("{}: verification failed: {}", row.job().label(), row.note);
            code = code.max(INFEASIBLE);
        }
        if row_code == LIMIT {
            code = LIMIT;
        } else if row_code == INFEASIBLE && code == OK {
            code = INFEASIBLE;
        }
    }
    let proven = result.rows.iter().filter(|r| r.proven_optimal()).count();
    println!("{} rows ({} proven optimal) written to {}", result.rows.len(), proven, out.display());
    if !result.renewable.is_empty() {
        println!("{} renewable rows", result.renewable.len());
    }
    Ok(code)
}

fn verify(model: PathBuf, solution: PathBuf) -> Result<u8, Error> {
    let instance = InstanceFile::load(&model)?;
    let (_, built) = instance.build()?;
    let solution = Solution::load(&built, &solution)?;
    let check = instance.verify(&solution)?;
    print!("{}", check.report);
    if check.report.is_feasible() {
        println!();
    }
    println!("objective {} W, recomputed {} W", check.objective_w, check.recomputed_w);
    Ok(if check.passed() { OK } else { INFEASIBLE })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve {
            topology,
            scenario,
            mode,
            backup,
            beta,
            seed,
            renewable,
            export_lp,
            integer_ports,
            same_volumes,
            large,
            config,
            out,
        } => solve(
            topology,
            scenario,
            mode,
            backup,
            beta,
            seed,
            renewable,
            export_lp,
            integer_ports,
            same_volumes,
            large,
            config,
            out,
        ),
        Command::Sweep { config, out } => sweep(config, out),
        Command::Verify { model, solution } => verify(model, solution),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if config_error(&e) { CONFIG_ERROR } else { INFEASIBLE })
        }
    }
}
