//! Model evaluation over the (message size × reconfiguration delay) grid,
//! plus the end-to-end single run that also simulates the schedule.

use std::io::Write;
use std::time::Duration;

use rayon::prelude::*;
use retri_core::cost::{self, CostBreakdown, CostParams};
use retri_core::optimizer::{self, balanced_segments, plan_from_segments};
use retri_core::schedule::{self, Algorithm, Schedule};
use retri_core::sim::{self, Misplaced, PhaseMetrics};
use retri_core::ReconfigPlan;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Reconfigs, Series};
use crate::RunError;

/// Above this executed size `run` reports the model only.
pub const SIMULATION_NODE_LIMIT: usize = 1024;

/// Model evaluation of one series at one grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub algorithm: Algorithm,
    pub requested_n: usize,
    /// Executed size after padding to the radix power.
    pub n: usize,
    pub m_bytes: u64,
    /// Payload the executed ring actually carries, `⌈m/requested_n⌉ · n`.
    pub effective_m: u64,
    pub delta: Duration,
    pub reconfigurations: usize,
    /// Unnormalized model cost.
    pub cost: CostBreakdown,
    /// Bruck cost at `0 < R < s−1` comes from the base-2 segment model,
    /// which has no closed form of its own.
    pub extrapolated: bool,
}

impl Cell {
    pub fn is_padded(&self) -> bool {
        self.n != self.requested_n
    }

    pub fn phases(&self) -> usize {
        phases_of(self.algorithm, self.n)
    }

    /// Cost as reported: per node when `normalize` is set.
    pub fn reported(&self, normalize: bool) -> CostBreakdown {
        if !normalize {
            return self.cost;
        }
        let k = self.n as f64;
        CostBreakdown {
            per_phase: self.cost.per_phase / k,
            hop: self.cost.hop / k,
            transmission: self.cost.transmission / k,
            reconfig: self.cost.reconfig / k,
            total: self.cost.total / k,
            reconfigurations: self.cost.reconfigurations,
        }
    }
}

fn phases_of(algorithm: Algorithm, n: usize) -> usize {
    match algorithm.radix() {
        Some(radix) => radix.phases_for(n).max(1),
        None => 1,
    }
}

/// Evaluates `series` with payload `m` under `params`.
pub fn evaluate(series: &Series, m: u64, params: &CostParams) -> Result<Cell, RunError> {
    let algorithm = series.algorithm;
    let n = algorithm.executed_size(series.n);
    let effective_m = m.div_ceil(series.n as u64) * n as u64;
    let m_f = effective_m as f64;
    let (reconfigurations, cost) = match series.reconfigs {
        Reconfigs::Auto => optimizer::optimal_r(n, m_f, params, algorithm)?,
        Reconfigs::Fixed(r) => (r, optimizer::model_cost(algorithm, n, m_f, params, r)?),
    };
    let extrapolated =
        algorithm == Algorithm::BruckMirrored && reconfigurations > 0 && reconfigurations + 1 < phases_of(algorithm, n);
    Ok(Cell {
        algorithm,
        requested_n: series.n,
        n,
        m_bytes: m,
        effective_m,
        delta: Duration::from_secs_f64(params.delta),
        reconfigurations,
        cost,
        extrapolated,
    })
}

/// One CSV row: the cost-model columns plus the speedup over the baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub algorithm: String,
    pub n: usize,
    pub m_bytes: u64,
    #[serde(rename = "R")]
    pub r: usize,
    pub alpha_s: f64,
    pub alpha_h: f64,
    pub beta: f64,
    pub delta: f64,
    pub per_phase: f64,
    pub hop: f64,
    pub transmission: f64,
    pub reconfig: f64,
    pub total: f64,
    pub speedup_vs_baseline: Option<f64>,
}

impl SweepRow {
    fn new(cell: &Cell, params: &CostParams, normalize: bool, baseline: Option<&Cell>) -> Self {
        let c = cell.reported(normalize);
        Self {
            algorithm: cell.algorithm.name().to_string(),
            n: cell.n,
            m_bytes: cell.m_bytes,
            r: cell.reconfigurations,
            alpha_s: params.alpha_s,
            alpha_h: params.alpha_h,
            beta: params.beta,
            delta: params.delta,
            per_phase: c.per_phase,
            hop: c.hop,
            transmission: c.transmission,
            reconfig: c.reconfig,
            total: c.total,
            speedup_vs_baseline: baseline.map(|b| speedup(b, cell, normalize)),
        }
    }
}

/// `baseline_total / candidate_total` after optional per-node normalization.
pub fn speedup(baseline: &Cell, candidate: &Cell, normalize: bool) -> f64 {
    baseline.reported(normalize).total / candidate.reported(normalize).total
}

/// Simulation half of a single run.
#[derive(Debug, Clone)]
pub struct SimulationReport {
    pub plan: ReconfigPlan,
    pub metrics: Vec<PhaseMetrics>,
    pub simulated: CostBreakdown,
    /// Relative gap between model and simulation; only defined unpadded.
    pub crosscheck: Option<f64>,
    pub misplaced: Vec<Misplaced>,
    pub schedule: Schedule,
}

impl SimulationReport {
    pub fn delivered(&self) -> bool {
        self.misplaced.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct SingleReport {
    pub header: Vec<String>,
    pub params: CostParams,
    pub normalize: bool,
    pub cell: Cell,
    pub baseline: Option<Cell>,
    /// `None` above [`SIMULATION_NODE_LIMIT`].
    pub simulation: Option<SimulationReport>,
}

impl SingleReport {
    pub fn speedup(&self) -> Option<f64> {
        self.baseline.as_ref().map(|b| speedup(b, &self.cell, self.normalize))
    }

    /// Same row the sweep writes for this cell.
    pub fn row(&self) -> SweepRow {
        SweepRow::new(&self.cell, &self.params, self.normalize, self.baseline.as_ref())
    }

    pub fn delivered(&self) -> Option<bool> {
        self.simulation.as_ref().map(SimulationReport::delivered)
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join("\n");
        out.push('\n');
        let c = &self.cell;
        let cost = c.reported(self.normalize);
        let mut line = |k: &str, v: String| {
            out.push_str(&format!("{k:<22}{v}\n"));
        };
        line("algorithm", c.algorithm.to_string());
        line("n", c.n.to_string());
        if c.is_padded() {
            line("padded", format!("yes ({} -> {} nodes)", c.requested_n, c.n));
        } else {
            line("padded", "no".to_string());
        }
        line("phases", c.phases().to_string());
        line("m_bytes", c.m_bytes.to_string());
        line("delta", format!("{:e}", self.params.delta));
        line("R", c.reconfigurations.to_string());
        if c.extrapolated {
            line("note", "model extrapolation (intermediate R for bruck)".to_string());
        }
        let unit = if self.normalize { " s/node" } else { " s" };
        line("per_phase", format!("{:e}{unit}", cost.per_phase));
        line("hop", format!("{:e}{unit}", cost.hop));
        line("transmission", format!("{:e}{unit}", cost.transmission));
        line("reconfig", format!("{:e}{unit}", cost.reconfig));
        line("total", format!("{:e}{unit}", cost.total));
        if let Some(b) = &self.baseline {
            line("baseline", format!("{}:{} R={}", b.algorithm, b.n, b.reconfigurations));
            line("baseline_total", format!("{:e}{unit}", b.reported(self.normalize).total));
            line("speedup_vs_baseline", format!("{:.2}", self.speedup().unwrap()));
        }
        match &self.simulation {
            Some(sim) => {
                line("simulated_total", format!("{:e} s", sim.simulated.total));
                match sim.crosscheck {
                    Some(e) => line("crosscheck", format!("{e:e}")),
                    None => line("crosscheck", "n/a (padded)".to_string()),
                }
                line(
                    "delivery",
                    if sim.delivered() {
                        "ok".to_string()
                    } else {
                        format!("FAILED ({} blocks misplaced)", sim.misplaced.len())
                    },
                );
            }
            None => line("simulation", format!("skipped (n > {SIMULATION_NODE_LIMIT})")),
        }
        out
    }
}

fn plan_for(cell: &Cell) -> Result<ReconfigPlan, RunError> {
    Ok(match cell.algorithm.radix() {
        Some(_) => plan_from_segments(&balanced_segments(cell.phases(), cell.reconfigurations)?),
        None => ReconfigPlan::static_plan(1),
    })
}

fn simulate(cell: &Cell, params: &CostParams) -> Result<SimulationReport, RunError> {
    let schedule = schedule::build(cell.algorithm, cell.requested_n, cell.m_bytes)?;
    let plan = plan_for(cell)?;
    let exec = sim::execute(&schedule, &plan)?;
    let misplaced = match sim::verify_all_delivered(&exec.final_state, &schedule) {
        Ok(()) => Vec::new(),
        Err(m) => m,
    };
    let simulated = cost::cost_from_metrics(&exec.metrics, params, plan.reconfigurations());
    let crosscheck = (!schedule.is_padded()).then(|| cost::crosscheck(cell.cost.total, &simulated));
    Ok(SimulationReport {
        plan,
        metrics: exec.metrics,
        simulated,
        crosscheck,
        misplaced,
        schedule,
    })
}

fn header(cfg: &ExperimentConfig) -> Vec<String> {
    let mut lines = cfg.header_lines();
    let mut note = |s: &Series| {
        let executed = s.algorithm.executed_size(s.n);
        if executed != s.n {
            lines.push(format!("# padded {} = {} -> {}", s.algorithm, s.n, executed));
        }
    };
    note(&cfg.candidate);
    if let Some(b) = &cfg.baseline {
        note(b);
    }
    lines
}

/// Runs the first grid cell end to end: schedule, plan, simulation, model.
pub fn run_single(cfg: &ExperimentConfig) -> Result<SingleReport, RunError> {
    let m = cfg.message_bytes[0];
    let params = cfg.params(cfg.deltas[0]);
    let cell = evaluate(&cfg.candidate, m, &params)?;
    let baseline = cfg.baseline.as_ref().map(|b| evaluate(b, m, &params)).transpose()?;
    let simulation = (cell.n <= SIMULATION_NODE_LIMIT && cell.n >= 2)
        .then(|| simulate(&cell, &params))
        .transpose()?;
    Ok(SingleReport {
        header: header(cfg),
        params,
        normalize: cfg.normalize_per_node,
        cell,
        baseline,
        simulation,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub candidate: Cell,
    pub baseline: Option<Cell>,
}

#[derive(Debug, Clone)]
pub struct Sweep {
    pub header: Vec<String>,
    pub normalize: bool,
    pub cells: Vec<SweepCell>,
    params: Vec<CostParams>,
}

impl Sweep {
    pub fn rows(&self) -> Vec<SweepRow> {
        self.cells
            .iter()
            .zip(&self.params)
            .map(|(c, p)| SweepRow::new(&c.candidate, p, self.normalize, c.baseline.as_ref()))
            .collect()
    }

    /// Baseline series as rows of its own; `None` without a baseline.
    pub fn baseline_rows(&self) -> Option<Vec<SweepRow>> {
        self.cells
            .iter()
            .zip(&self.params)
            .map(|(c, p)| c.baseline.as_ref().map(|b| SweepRow::new(b, p, self.normalize, None)))
            .collect()
    }
}

/// Evaluates every (m, δ) cell, m outer and δ inner.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Sweep, RunError> {
    let grid: Vec<(u64, CostParams)> = cfg
        .message_bytes
        .iter()
        .flat_map(|&m| cfg.deltas.iter().map(move |&d| (m, cfg.params(d))))
        .collect();
    let cells = grid
        .par_iter()
        .map(|(m, params)| {
            Ok(SweepCell {
                candidate: evaluate(&cfg.candidate, *m, params)?,
                baseline: cfg.baseline.as_ref().map(|b| evaluate(b, *m, params)).transpose()?,
            })
        })
        .collect::<Result<Vec<_>, RunError>>()?;
    let mut header = header(cfg);
    let involves_bruck = std::iter::once(&cfg.candidate)
        .chain(cfg.baseline.as_ref())
        .any(|s| s.algorithm == Algorithm::BruckMirrored);
    if involves_bruck {
        header.push("# note = bruck rows with 0 < R < s-1 are a model extrapolation".to_string());
    }
    Ok(Sweep {
        header,
        normalize: cfg.normalize_per_node,
        cells,
        params: grid.into_iter().map(|(_, p)| p).collect(),
    })
}

/// Writes `# ` header lines followed by the CSV table.
pub fn write_rows<W: Write>(mut out: W, header: &[String], rows: &[SweepRow]) -> Result<(), RunError> {
    for line in header {
        writeln!(out, "{line}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses a table written by [`write_rows`], skipping `#` lines.
pub fn read_rows(text: &str) -> Result<Vec<SweepRow>, RunError> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(RunError::from)
}
