//! Phase-synchronous replay of a [`Schedule`] on the active topology.
//!
//! Each message walks its subring hop by hop in the direction of its sign,
//! loading every directed link it crosses. Hop distance `h_k` and congestion
//! `c_k` are measured from those walks, so they serve as an oracle that is
//! independent of the closed forms in [`crate::cost`].

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::schedule::{Algorithm, Block, BlockId, Direction, Half, PhaseSchedule, Schedule};
use crate::topology::{self, ReconfigPlan, Topology};

/// Where every block sits after `phase_completed` phases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacementState {
    pub location: Vec<usize>,
    pub phase_completed: usize,
}

impl PlacementState {
    pub fn initial(schedule: &Schedule) -> Self {
        Self {
            location: schedule.blocks.iter().map(|b| b.source).collect(),
            phase_completed: 0,
        }
    }
}

/// One direction of a physical link. The direction is the ring orientation
/// of the traversal, so the two orientations of a two-node subring's single
/// link are distinct channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct DirectedLink {
    pub from: usize,
    pub to: usize,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseMetrics {
    pub phase: usize,
    pub reconfigured: bool,
    /// `h_k`: longest walk (in links) between communicating peers.
    pub hops: usize,
    /// `c_k`: max directed-link load divided by `m_k`.
    pub congestion: f64,
    /// `m_k`: largest per-node, per-direction payload in bytes.
    pub bytes_per_direction: u64,
    pub max_link_load: u64,
    pub max_link: Option<DirectedLink>,
}

#[derive(Debug, Clone)]
pub struct Execution {
    pub final_state: PlacementState,
    pub metrics: Vec<PhaseMetrics>,
}

/// First hop from `node` in `direction`: the neighbor with the smallest
/// modular distance in that orientation.
fn first_hop(topology: &Topology, node: usize, direction: Direction) -> Option<usize> {
    let n = topology.n;
    topology.neighbors(node).iter().copied().min_by_key(|&w| match direction {
        Direction::Right => (w + n - node) % n,
        Direction::Left => (node + n - w) % n,
    })
}

/// Walks from `from` to `to` around the component in `direction`; `None` if
/// `to` is not reached within one full turn.
fn walk(
    topology: &Topology,
    phase: usize,
    from: usize,
    to: usize,
    direction: Direction,
) -> Result<Vec<DirectedLink>> {
    let unreachable = Error::Unreachable { phase, from, to };
    let mut path = Vec::new();
    let mut prev = from;
    let mut cur = match first_hop(topology, from, direction) {
        Some(v) if from != to => v,
        _ if from == to => return Ok(path),
        _ => return Err(unreachable),
    };
    path.push(DirectedLink {
        from,
        to: cur,
        direction,
    });
    while cur != to {
        if path.len() >= topology.n {
            return Err(unreachable);
        }
        let neighbors = topology.neighbors(cur);
        if neighbors.len() > 2 {
            return Err(Error::AmbiguousRoute { phase, node: cur });
        }
        let Some(&next) = neighbors.iter().find(|&&w| w != prev) else {
            return Err(unreachable);
        };
        path.push(DirectedLink {
            from: cur,
            to: next,
            direction,
        });
        prev = cur;
        cur = next;
    }
    Ok(path)
}

fn transfer_bytes(blocks: &[Block], ids: &[BlockId]) -> u64 {
    ids.iter().map(|&b| blocks[b].bytes).sum()
}

/// Bytes carried by every directed link while `phase` runs on `topology`.
pub fn link_loads(
    topology: &Topology,
    phase: &PhaseSchedule,
    blocks: &[Block],
) -> Result<BTreeMap<DirectedLink, u64>> {
    let (loads, _) = route_phase(topology, phase, blocks)?;
    Ok(loads.into_iter().collect())
}

fn route_phase(
    topology: &Topology,
    phase: &PhaseSchedule,
    blocks: &[Block],
) -> Result<(HashMap<DirectedLink, u64>, usize)> {
    let mut loads: HashMap<DirectedLink, u64> = HashMap::new();
    let mut hops = 0;
    for t in phase.transfers.iter().filter(|t| !t.blocks.is_empty()) {
        let path = walk(topology, phase.phase, t.from, t.to, t.direction)?;
        hops = hops.max(path.len());
        let bytes = transfer_bytes(blocks, &t.blocks);
        for link in path {
            *loads.entry(link).or_default() += bytes;
        }
    }
    Ok((loads, hops))
}

/// Topology serving `phase` under `plan`.
pub fn active_topology(schedule: &Schedule, plan: &ReconfigPlan, phase: usize) -> Result<Topology> {
    match schedule.algorithm.radix() {
        Some(radix) => topology::reconfigure(schedule.n, plan.active_configuration(phase), radix),
        None => Ok(topology::build_base_ring(schedule.n)),
    }
}

/// Runs every phase of `schedule` under `plan`, measuring `h_k`, `m_k`, `c_k`.
pub fn execute(schedule: &Schedule, plan: &ReconfigPlan) -> Result<Execution> {
    let phases = schedule.phase_count();
    if plan.phases() != phases.max(1) {
        return Err(Error::PlanLength {
            plan: plan.phases(),
            schedule: phases,
        });
    }
    let mut state = PlacementState::initial(schedule);
    let mut metrics = Vec::with_capacity(phases);
    let mut topology = active_topology(schedule, plan, 0)?;

    for phase in &schedule.phases {
        let k = phase.phase;
        let reconfigured = k > 0 && plan.reconfigures_before(k);
        if reconfigured {
            topology = active_topology(schedule, plan, k)?;
        }

        let (loads, hops) = route_phase(&topology, phase, &schedule.blocks)?;

        let mut per_direction: HashMap<(usize, Direction), u64> = HashMap::new();
        let mut next = state.location.clone();
        for t in &phase.transfers {
            for &b in &t.blocks {
                if state.location[b] != t.from {
                    return Err(Error::BlockNotPresent {
                        phase: k,
                        block: b,
                        expected: t.from,
                        actual: state.location[b],
                    });
                }
                if next[b] != state.location[b] {
                    return Err(Error::BlockSentTwice { phase: k, block: b });
                }
                next[b] = t.to;
            }
            *per_direction.entry((t.from, t.direction)).or_default() +=
                transfer_bytes(&schedule.blocks, &t.blocks);
        }
        // barrier: all messages of the phase land before the next one starts
        state.location = next;
        state.phase_completed = k + 1;

        let bytes_per_direction = per_direction.values().copied().max().unwrap_or(0);
        let max = loads
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .map(|(&link, &load)| (link, load));
        let max_link_load = max.map_or(0, |(_, load)| load);
        let congestion = if bytes_per_direction == 0 {
            1.0
        } else {
            max_link_load as f64 / bytes_per_direction as f64
        };
        metrics.push(PhaseMetrics {
            phase: k,
            reconfigured,
            hops,
            congestion,
            bytes_per_direction,
            max_link_load,
            max_link: max.map(|(link, _)| link),
        });
    }

    Ok(Execution {
        final_state: state,
        metrics,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Misplaced {
    pub block: BlockId,
    pub source: usize,
    pub destination: usize,
    pub half: Half,
    pub location: usize,
}

/// Ok iff every block (every half, for mirrored Bruck) sits at its destination.
pub fn verify_all_delivered(
    state: &PlacementState,
    schedule: &Schedule,
) -> std::result::Result<(), Vec<Misplaced>> {
    let misplaced: Vec<Misplaced> = schedule
        .blocks
        .iter()
        .enumerate()
        .filter(|&(id, b)| state.location[id] != b.destination)
        .map(|(id, b)| Misplaced {
            block: id,
            source: b.source,
            destination: b.destination,
            half: b.half,
            location: state.location[id],
        })
        .collect();
    if misplaced.is_empty() && state.phase_completed == schedule.phase_count() {
        Ok(())
    } else {
        Err(misplaced)
    }
}

/// Per-phase trace, tab separated.
pub fn trace(metrics: &[PhaseMetrics]) -> String {
    let mut out =
        String::from("phase\treconfigured\thops\tcongestion\tbytes_per_direction\tmax_load\tmax_link\n");
    for m in metrics {
        let link = m.max_link.map_or_else(
            || "-".to_string(),
            |l| format!("{}->{}:{}", l.from, l.to, l.direction.name()),
        );
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            m.phase,
            u8::from(m.reconfigured),
            m.hops,
            m.congestion,
            m.bytes_per_direction,
            m.max_link_load,
            link
        );
    }
    out
}

/// The static plan that matches a schedule's phase count.
pub fn static_plan_for(schedule: &Schedule) -> ReconfigPlan {
    ReconfigPlan::static_plan(schedule.phase_count())
}

/// Reconfigure before every phase (the direct baseline has only one).
pub fn full_plan_for(schedule: &Schedule) -> ReconfigPlan {
    match schedule.algorithm {
        Algorithm::Direct => ReconfigPlan::static_plan(1),
        _ => ReconfigPlan::every_phase(schedule.phase_count()),
    }
}
