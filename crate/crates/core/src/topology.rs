//! Degree-two optical topologies: the base ring, the per-phase edge sets
//! `E_k = {{i, i + radix^k}}` and their residue-class subrings, plus the
//! reconfiguration plans that select which edge set is active.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ternary::Radix;

/// Ports per node on a `2n`-port optical circuit switch.
pub const MAX_DEGREE: usize = 2;

/// Undirected edge set over `n` nodes; pairs are stored as `(min, max)`,
/// sorted, duplicates retained so that [`validate`] can report them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    pub n: usize,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
}

impl Topology {
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut edges: Vec<(usize, usize)> = edges
            .into_iter()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        edges.sort_unstable();
        let mut neighbors = vec![Vec::new(); n];
        for &(a, b) in &edges {
            neighbors[a].push(b);
            if a != b {
                neighbors[b].push(a);
            }
        }
        Self {
            n,
            edges,
            neighbors,
        }
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.neighbors[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.edges
            .iter()
            .map(|&(a, b)| usize::from(a == node) + usize::from(b == node))
            .sum()
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&(a.min(b), a.max(b))).is_ok()
    }

    /// Connected components, each sorted; components ordered by smallest node.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            let mut comp = Vec::new();
            while let Some(u) = queue.pop_front() {
                comp.push(u);
                for &v in &self.neighbors[u] {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// One edge per line, `a b` with `a < b`, sorted.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (a, b) in &self.edges {
            let _ = writeln!(out, "{a} {b}");
        }
        out
    }
}

/// Residue classes `S_i^{(k)} = { u : u ≡ i (mod radix^k) }`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubringPartition {
    pub k: usize,
    pub radix: Radix,
    pub classes: Vec<Vec<usize>>,
}

/// Which phases are preceded by a reconfiguration. Entry 0 is the initial
/// base-ring setup and is never charged.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReconfigPlan {
    pub x: Vec<bool>,
}

impl ReconfigPlan {
    pub fn new(mut x: Vec<bool>) -> Result<Self> {
        match x.first_mut() {
            Some(first) => *first = true,
            None => {
                return Err(Error::InvalidLayout(
                    "a plan needs at least one phase".into(),
                ))
            }
        }
        Ok(Self { x })
    }

    /// Static plan: base ring for every phase.
    pub fn static_plan(phases: usize) -> Self {
        Self::from_boundaries(phases, &[])
    }

    /// Reconfigure before every phase.
    pub fn every_phase(phases: usize) -> Self {
        Self {
            x: vec![true; phases.max(1)],
        }
    }

    /// Reconfigure before each phase listed in `boundaries` (and phase 0).
    pub fn from_boundaries(phases: usize, boundaries: &[usize]) -> Self {
        let mut x = vec![false; phases.max(1)];
        x[0] = true;
        for &b in boundaries {
            if b < x.len() {
                x[b] = true;
            }
        }
        Self { x }
    }

    pub fn phases(&self) -> usize {
        self.x.len()
    }

    /// `R`: charged reconfigurations (entries 1..s).
    pub fn reconfigurations(&self) -> usize {
        self.x[1..].iter().filter(|&&b| b).count()
    }

    pub fn reconfigures_before(&self, phase: usize) -> bool {
        self.x[phase]
    }

    /// Phase whose edge set is active during `phase`.
    pub fn active_configuration(&self, phase: usize) -> usize {
        (0..=phase).rev().find(|&j| self.x[j]).unwrap_or(0)
    }

    /// Lengths of the maximal runs of phases served by one configuration.
    pub fn segment_lengths(&self) -> Vec<usize> {
        let mut lengths = Vec::new();
        for (k, &reconf) in self.x.iter().enumerate() {
            if k == 0 || reconf {
                lengths.push(1);
            } else if let Some(last) = lengths.last_mut() {
                *last += 1;
            }
        }
        lengths
    }

    /// Every plan over `phases` phases, `2^(phases-1)` in total.
    pub fn enumerate(phases: usize) -> impl Iterator<Item = ReconfigPlan> {
        let free = phases.saturating_sub(1);
        (0u64..1 << free).map(move |mask| {
            let mut x = vec![true; phases.max(1)];
            for (bit, slot) in x.iter_mut().skip(1).enumerate() {
                *slot = mask >> bit & 1 == 1;
            }
            ReconfigPlan { x }
        })
    }
}

/// `{i, i+1}` for all `i`; a single link when `n = 2`.
pub fn build_base_ring(n: usize) -> Topology {
    ring_with_stride(n, 1)
}

fn ring_with_stride(n: usize, stride: usize) -> Topology {
    if n < 2 {
        return Topology::from_edges(n, []);
    }
    let edges: BTreeSet<(usize, usize)> = (0..n)
        .map(|i| {
            let j = (i + stride) % n;
            (i.min(j), i.max(j))
        })
        .collect();
    Topology::from_edges(n, edges)
}

/// Edge set `E_k` connecting each node to `u ± radix^k`. Two-node subrings
/// collapse to a single link.
pub fn reconfigure(n: usize, k: usize, radix: Radix) -> Result<Topology> {
    let phases = radix.phases_for(n);
    if k >= phases {
        return Err(Error::PhaseOutOfRange { phase: k, phases });
    }
    Ok(ring_with_stride(n, radix.pow(k)))
}

pub fn subrings(n: usize, k: usize, radix: Radix) -> SubringPartition {
    let modulus = radix.pow(k).min(n.max(1));
    let classes = (0..modulus)
        .map(|i| (i..n).step_by(modulus).collect())
        .collect();
    SubringPartition { k, radix, classes }
}

/// Degree or multiplicity violations found by [`validate`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    /// `(node, degree)` for every node above [`MAX_DEGREE`].
    pub over_degree: Vec<(usize, usize)>,
    pub duplicate_edges: Vec<(usize, usize)>,
    pub self_loops: Vec<usize>,
}

impl ValidationReport {
    pub fn offending_nodes(&self) -> Vec<usize> {
        let mut nodes: BTreeSet<usize> = self.over_degree.iter().map(|&(u, _)| u).collect();
        nodes.extend(self.duplicate_edges.iter().flat_map(|&(a, b)| [a, b]));
        nodes.extend(self.self_loops.iter().copied());
        nodes.into_iter().collect()
    }
}

pub fn validate(topology: &Topology) -> std::result::Result<(), ValidationReport> {
    let mut report = ValidationReport::default();
    let mut degree = vec![0usize; topology.n];
    for (i, &(a, b)) in topology.edges.iter().enumerate() {
        if a == b {
            report.self_loops.push(a);
        }
        if i > 0 && topology.edges[i - 1] == (a, b) && report.duplicate_edges.last() != Some(&(a, b)) {
            report.duplicate_edges.push((a, b));
        }
        degree[a] += 1;
        degree[b] += 1;
    }
    report.over_degree = degree
        .into_iter()
        .enumerate()
        .filter(|&(_, d)| d > MAX_DEGREE)
        .collect();
    if report == ValidationReport::default() {
        Ok(())
    } else {
        Err(report)
    }
}

/// Brute-force check that the class of every node mod `radix^k` is exactly
/// the set of nodes it must stay connected to for phases `k..s`: all future
/// peers stay inside the class, and the closure of the future-peer relation
/// covers the whole class.
pub fn check_subring_minimality(n: usize, k: usize, radix: Radix) -> bool {
    let phases = radix.phases_for(n);
    let modulus = radix.pow(k);
    let offsets: Vec<usize> = (k..phases).map(|j| radix.pow(j) % n).collect();
    let partition = subrings(n, k, radix);

    for u in 0..n {
        for &off in &offsets {
            let left = (u + n - off) % n;
            let right = (u + off) % n;
            if left % modulus != u % modulus || right % modulus != u % modulus {
                return false;
            }
        }
    }

    let mut reached = vec![false; n];
    for class in &partition.classes {
        let Some(&start) = class.first() else {
            return false;
        };
        let mut closure = vec![start];
        let mut queue = VecDeque::from([start]);
        reached[start] = true;
        while let Some(u) = queue.pop_front() {
            for &off in &offsets {
                for v in [(u + off) % n, (u + n - off) % n] {
                    if !reached[v] {
                        reached[v] = true;
                        closure.push(v);
                        queue.push_back(v);
                    }
                }
            }
        }
        closure.sort_unstable();
        if &closure != class {
            return false;
        }
    }
    true
}
