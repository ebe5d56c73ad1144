use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use retri_core::sim;
use retri_experiments::config::{parse_config, ExperimentConfig, Overrides};
use retri_experiments::runner::{self, read_rows, write_rows};
use retri_experiments::{heatmap, verify, RunError};

#[derive(Parser)]
#[command(name = "retri", version, about = "Model, simulate and sweep ring All-to-All schedules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the first grid cell end to end and print a report.
    Run {
        #[command(flatten)]
        common: Common,
        /// Per-phase metrics as TSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Exported phase schedule.
        #[arg(long)]
        schedule: Option<PathBuf>,
        /// Edge list of the active topology before each phase.
        #[arg(long)]
        topology: Option<PathBuf>,
    },
    /// Evaluate every (message size, delay) cell and write CSV.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Build a speedup matrix from two sweep tables.
    Heatmap {
        #[arg(long)]
        sweep: PathBuf,
        #[arg(long)]
        baseline: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Divide totals by node count first (no-op for normalized tables).
        #[arg(long)]
        normalize: bool,
    },
    /// Run the delivery and invariant suite.
    Verify {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    /// retri, bruck or direct.
    #[arg(long = "algo")]
    algorithm: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated sizes, e.g. 1KB,1MB.
    #[arg(long, value_delimiter = ',')]
    msg_bytes: Option<Vec<String>>,
    /// Comma-separated delays, e.g. 1us,50ms.
    #[arg(long, value_delimiter = ',')]
    delta: Option<Vec<String>>,
    /// `auto` or a fixed count.
    #[arg(long)]
    reconfigs: Option<String>,
    /// `algo:n[:reconfigs]`, or `none`.
    #[arg(long)]
    baseline: Option<String>,
    #[arg(long)]
    normalize: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig, RunError> {
        let base = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)?;
                parse_config(&text)?
            }
            None => ExperimentConfig::default(),
        };
        let overrides = Overrides {
            algorithm: self.algorithm.clone(),
            n: self.n,
            message_bytes: self.msg_bytes.clone(),
            deltas: self.delta.clone(),
            reconfigs: self.reconfigs.clone(),
            baseline: self.baseline.clone(),
            normalize: self.normalize,
        };
        Ok(overrides.apply(base)?)
    }
}

fn write_to(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, contents).with_context(|| format!("writing {}", p.display())),
        None => io::stdout().write_all(contents.as_bytes()).context("writing stdout"),
    }
}

/// `out.csv` -> `out.<tag>.csv`.
fn sibling(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
    let ext = path.extension().map(|e| format!(".{}", e.to_string_lossy())).unwrap_or_default();
    path.with_file_name(format!("{stem}.{tag}{ext}"))
}

fn rows_to_string(header: &[String], rows: &[runner::SweepRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_rows(&mut buf, header, rows)?;
    Ok(String::from_utf8(buf)?)
}

fn run(common: &Common, trace: Option<&Path>, schedule: Option<&Path>, topology: Option<&Path>) -> Result<()> {
    let cfg = common.load()?;
    let report = runner::run_single(&cfg)?;
    write_to(common.out.as_deref(), &report.render())?;
    if let Some(sim) = &report.simulation {
        if let Some(p) = trace {
            write_to(Some(p), &sim::trace(&sim.metrics))?;
        }
        if let Some(p) = schedule {
            write_to(Some(p), &sim.schedule.export())?;
        }
        if let Some(p) = topology {
            let mut dump = String::new();
            for phase in 0..sim.plan.phases() {
                let topo = sim::active_topology(&sim.schedule, &sim.plan, phase)?;
                dump.push_str(&format!("# phase {phase}\n{}", topo.dump()));
            }
            write_to(Some(p), &dump)?;
        }
        if !sim.delivered() {
            return Err(RunError::Verification(format!("{} blocks misplaced", sim.misplaced.len())).into());
        }
    } else if trace.is_some() || schedule.is_some() || topology.is_some() {
        bail!("exports need a simulated run (n <= {})", runner::SIMULATION_NODE_LIMIT);
    }
    Ok(())
}

fn sweep(common: &Common) -> Result<()> {
    let cfg = common.load()?;
    let sweep = runner::run_sweep(&cfg)?;
    write_to(common.out.as_deref(), &rows_to_string(&sweep.header, &sweep.rows())?)?;
    if let (Some(rows), Some(out)) = (sweep.baseline_rows(), &common.out) {
        write_to(Some(&sibling(out, "baseline")), &rows_to_string(&sweep.header, &rows)?)?;
    }
    Ok(())
}

fn already_normalized(text: &str) -> bool {
    text.lines()
        .take_while(|l| l.starts_with('#'))
        .any(|l| l.trim() == "# normalize_per_node = true")
}

fn heatmap(sweep: &Path, baseline: &Path, out: Option<&Path>, normalize: bool) -> Result<()> {
    let cand_text = fs::read_to_string(sweep).with_context(|| format!("reading {}", sweep.display()))?;
    let base_text = fs::read_to_string(baseline).with_context(|| format!("reading {}", baseline.display()))?;
    let normalize = normalize && !(already_normalized(&cand_text) && already_normalized(&base_text));
    let map = heatmap::emit_heatmap(&read_rows(&cand_text)?, &read_rows(&base_text)?, normalize)?;
    write_to(out, &map.to_csv())?;
    match out {
        Some(p) => {
            write_to(Some(&sibling(p, "reconfigs")), &map.reconfigs_csv())?;
            fs::write(p.with_extension("txt"), map.render())?;
        }
        None => print!("\n{}", map.render()),
    }
    Ok(())
}

fn verify(common: &Common) -> Result<()> {
    let cfg = common.load()?;
    let report = verify::run_verify(&cfg)?;
    write_to(common.out.as_deref(), &format!("{report}\n"))?;
    if !report.passed() {
        return Err(RunError::Verification("invariant suite reported failures".into()).into());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run {
            common,
            trace,
            schedule,
            topology,
        } => run(common, trace.as_deref(), schedule.as_deref(), topology.as_deref()),
        Command::Sweep { common } => sweep(common),
        Command::Heatmap {
            sweep,
            baseline,
            out,
            normalize,
        } => heatmap(sweep, baseline, out.as_deref(), *normalize),
        Command::Verify { common } => verify(common),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err.downcast_ref::<RunError>().map_or(1, RunError::exit_code);
            ExitCode::from(code)
        }
    }
}
