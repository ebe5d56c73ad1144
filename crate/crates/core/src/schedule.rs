//! Phase-by-phase All-to-All schedules: balanced ternary (ReTri), mirrored
//! radix-2 Bruck and the single-phase static direct baseline.
//!
//! Every schedule materializes all `n²` blocks, self-blocks included. The
//! generators track block locations with closed-form prefix sums; the
//! simulator in [`crate::sim`] replays transfers independently.

use std::collections::HashSet;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ternary::{self, Radix, Trit};

/// Version tag written in the first line of the schedule export.
pub const SCHEDULE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Retri,
    BruckMirrored,
    Direct,
}

impl Algorithm {
    /// Phase radix; `None` for the single-phase direct baseline.
    pub fn radix(self) -> Option<Radix> {
        match self {
            Algorithm::Retri => Some(Radix::Ternary),
            Algorithm::BruckMirrored => Some(Radix::Binary),
            Algorithm::Direct => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Retri => "retri",
            Algorithm::BruckMirrored => "bruck",
            Algorithm::Direct => "direct",
        }
    }

    pub fn parse(raw: &str) -> Option<Self> {
        match raw.trim().to_ascii_lowercase().as_str() {
            "retri" => Some(Algorithm::Retri),
            "bruck" | "bruck_mirrored" | "bruck-mirrored" | "bridge" => {
                Some(Algorithm::BruckMirrored)
            }
            "direct" | "static" => Some(Algorithm::Direct),
            _ => None,
        }
    }

    /// Node count the schedule actually runs on (padded to the radix power).
    pub fn executed_size(self, n: usize) -> usize {
        match self.radix() {
            Some(radix) => radix.next_power(n),
            None => n,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Half {
    Whole,
    Forward,
    Mirror,
}

/// Logical ring direction of a transfer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Direction {
    Left,
    Right,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::Left => "left",
            Direction::Right => "right",
        }
    }
}

pub type BlockId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Block {
    pub source: usize,
    pub destination: usize,
    pub bytes: u64,
    pub half: Half,
}

/// One message: the blocks node `from` ships to `to` in one direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transfer {
    pub from: usize,
    pub to: usize,
    pub direction: Direction,
    pub blocks: Vec<BlockId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseSchedule {
    pub phase: usize,
    /// Logical peer offset `radix^k`; `None` for the direct baseline.
    pub offset: Option<usize>,
    /// Sorted by `(from, direction, to)`.
    pub transfers: Vec<Transfer>,
}

impl PhaseSchedule {
    pub fn sent_by(&self, node: usize) -> impl Iterator<Item = &Transfer> {
        // transfers are sorted by sender
        let start = self.transfers.partition_point(|t| t.from < node);
        self.transfers[start..].iter().take_while(move |t| t.from == node)
    }

    pub fn to_left(&self, node: usize) -> Vec<BlockId> {
        self.blocks_in(node, Direction::Left)
    }

    pub fn to_right(&self, node: usize) -> Vec<BlockId> {
        self.blocks_in(node, Direction::Right)
    }

    fn blocks_in(&self, node: usize, direction: Direction) -> Vec<BlockId> {
        self.sent_by(node)
            .filter(|t| t.direction == direction)
            .flat_map(|t| t.blocks.iter().copied())
            .collect()
    }
}

/// A complete, immutable All-to-All schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub algorithm: Algorithm,
    /// Executed ring size (after padding).
    pub n: usize,
    /// Size the caller asked for; nodes `>= requested_n` are virtual.
    pub requested_n: usize,
    /// Per-node payload `m` as requested.
    pub m_bytes: u64,
    /// Bytes of one real block, `⌈m / requested_n⌉`.
    pub block_bytes: u64,
    pub blocks: Vec<Block>,
    pub phases: Vec<PhaseSchedule>,
}

impl Schedule {
    pub fn is_padded(&self) -> bool {
        self.n != self.requested_n
    }

    /// `block_bytes · n`: the per-node payload the executed schedule moves
    /// when every node is real. Equals `m` in the divisible, canonical case.
    pub fn effective_m(&self) -> u64 {
        self.block_bytes * self.n as u64
    }

    pub fn phase_count(&self) -> usize {
        self.phases.len()
    }

    /// Id of `B[source, destination]` (of the given half for mirrored Bruck).
    pub fn block_id(&self, source: usize, destination: usize, half: Half) -> BlockId {
        let pair = source * self.n + destination;
        match (self.algorithm, half) {
            (Algorithm::BruckMirrored, Half::Forward) => 2 * pair,
            (Algorithm::BruckMirrored, Half::Mirror) => 2 * pair + 1,
            _ => pair,
        }
    }

    /// Structured text export: a versioned header then one tab-separated
    /// record per phase, sender and peer.
    pub fn export(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "#retri-schedule v{SCHEDULE_FORMAT_VERSION}");
        let _ = writeln!(
            out,
            "#algorithm={} n={} requested_n={} m_bytes={} block_bytes={} phases={}",
            self.algorithm,
            self.n,
            self.requested_n,
            self.m_bytes,
            self.block_bytes,
            self.phases.len()
        );
        out.push_str("phase\tnode\tpeer\tdirection\tbytes\tblocks\n");
        for phase in &self.phases {
            for t in &phase.transfers {
                let bytes: u64 = t.blocks.iter().map(|&b| self.blocks[b].bytes).sum();
                let list = t
                    .blocks
                    .iter()
                    .map(|&b| {
                        let block = &self.blocks[b];
                        let suffix = match block.half {
                            Half::Whole => "",
                            Half::Forward => ":f",
                            Half::Mirror => ":m",
                        };
                        format!("{}>{}{}", block.source, block.destination, suffix)
                    })
                    .collect::<Vec<_>>()
                    .join(",");
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}",
                    phase.phase,
                    t.from,
                    t.to,
                    t.direction.name(),
                    bytes,
                    list
                );
            }
        }
        out
    }
}

fn block_bytes(m: u64, n: usize) -> u64 {
    m.div_ceil(n as u64)
}

fn pair_bytes(source: usize, destination: usize, requested_n: usize, bytes: u64) -> u64 {
    if source < requested_n && destination < requested_n {
        bytes
    } else {
        0
    }
}

/// Groups `(node, direction, peer, block)` sends into sorted transfers.
fn collect_transfers(mut sends: Vec<(usize, Direction, usize, BlockId)>) -> Vec<Transfer> {
    sends.sort_unstable();
    let mut transfers: Vec<Transfer> = Vec::new();
    for (from, direction, to, block) in sends {
        match transfers.last_mut() {
            Some(t) if t.from == from && t.direction == direction && t.to == to => {
                t.blocks.push(block)
            }
            _ => transfers.push(Transfer {
                from,
                to,
                direction,
                blocks: vec![block],
            }),
        }
    }
    transfers
}

/// Ensures each node has a (possibly empty) transfer to both phase peers.
fn with_both_peers(
    mut transfers: Vec<Transfer>,
    n: usize,
    k: usize,
    radix: Radix,
) -> Vec<Transfer> {
    let present: HashSet<(usize, Direction)> =
        transfers.iter().map(|t| (t.from, t.direction)).collect();
    for node in 0..n {
        let (left, right) = ternary::peers_with_radix(node, k, n, radix);
        for (direction, to) in [(Direction::Left, left), (Direction::Right, right)] {
            if !present.contains(&(node, direction)) {
                transfers.push(Transfer {
                    from: node,
                    to,
                    direction,
                    blocks: Vec::new(),
                });
            }
        }
    }
    transfers.sort_by_key(|t| (t.from, t.direction, t.to));
    transfers
}

fn validate_ring_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidNodeCount {
            n,
            reason: "a schedule needs at least one node",
        });
    }
    Ok(())
}

/// Balanced ternary schedule on `n = 3^s` nodes.
pub fn retri_schedule(n: usize, m: u64) -> Result<Schedule> {
    if !Radix::Ternary.is_power(n) {
        return Err(Error::NotPowerOf {
            n,
            radix: Radix::Ternary,
        });
    }
    build_retri(n, n, m)
}

/// Balanced ternary schedule for any `n`, padded to the next power of three
/// with virtual nodes whose blocks carry zero bytes.
pub fn retri_schedule_padded(n: usize, m: u64) -> Result<Schedule> {
    validate_ring_size(n)?;
    build_retri(Radix::Ternary.next_power(n), n, m)
}

fn build_retri(n: usize, requested_n: usize, m: u64) -> Result<Schedule> {
    let s = Radix::Ternary.phases_for(n);
    if s > ternary::MAX_TERNARY_DIGITS {
        return Err(Error::InvalidNodeCount {
            n,
            reason: "more than 3^12 nodes",
        });
    }
    let bytes = block_bytes(m, requested_n);
    let mut blocks = Vec::with_capacity(n * n);
    let mut digits = Vec::with_capacity(n * n);
    for source in 0..n {
        for destination in 0..n {
            let delta = ternary::centered_pair_offset(source, destination, n)?;
            digits.push(ternary::balanced_ternary_digits(delta, s)?);
            blocks.push(Block {
                source,
                destination,
                bytes: pair_bytes(source, destination, requested_n, bytes),
                half: Half::Whole,
            });
        }
    }

    let mut location: Vec<usize> = blocks.iter().map(|b| b.source).collect();
    let mut phases = Vec::with_capacity(s);
    for k in 0..s {
        let step = Radix::Ternary.pow(k);
        let mut sends = Vec::with_capacity(2 * n * n / 3);
        for (id, tau) in digits.iter().enumerate() {
            let at = location[id];
            let (direction, to) = match tau.digit(k) {
                Trit::Zero => continue,
                Trit::Pos => (Direction::Right, (at + step) % n),
                Trit::Neg => (Direction::Left, (at + n - step) % n),
            };
            sends.push((at, direction, to, id));
            location[id] = to;
        }
        phases.push(PhaseSchedule {
            phase: k,
            offset: Some(step),
            transfers: with_both_peers(collect_transfers(sends), n, k, Radix::Ternary),
        });
    }

    Ok(Schedule {
        algorithm: Algorithm::Retri,
        n,
        requested_n,
        m_bytes: m,
        block_bytes: bytes,
        blocks,
        phases,
    })
}

/// Mirrored radix-2 Bruck on `n = 2^s` nodes: each block is split by bytes
/// into a forward half routed by `+2^k` and a mirror half routed by `-2^k`.
pub fn bruck_mirrored_schedule(n: usize, m: u64) -> Result<Schedule> {
    if !Radix::Binary.is_power(n) {
        return Err(Error::NotPowerOf {
            n,
            radix: Radix::Binary,
        });
    }
    build_bruck(n, n, m)
}

/// Mirrored Bruck padded to the next power of two.
pub fn bruck_mirrored_schedule_padded(n: usize, m: u64) -> Result<Schedule> {
    validate_ring_size(n)?;
    build_bruck(Radix::Binary.next_power(n), n, m)
}

fn build_bruck(n: usize, requested_n: usize, m: u64) -> Result<Schedule> {
    let s = Radix::Binary.phases_for(n);
    let bytes = block_bytes(m, requested_n);
    // forward half takes the odd byte
    let forward_bytes = bytes.div_ceil(2);
    let mirror_bytes = bytes / 2;

    let mut blocks = Vec::with_capacity(2 * n * n);
    let mut bits = Vec::with_capacity(2 * n * n);
    for source in 0..n {
        for destination in 0..n {
            let forward = (destination + n - source) % n;
            let mirror = (source + n - destination) % n;
            for (half, half_bytes, offset) in [
                (Half::Forward, forward_bytes, forward),
                (Half::Mirror, mirror_bytes, mirror),
            ] {
                bits.push(ternary::binary_digits(offset, s)?);
                blocks.push(Block {
                    source,
                    destination,
                    bytes: pair_bytes(source, destination, requested_n, half_bytes),
                    half,
                });
            }
        }
    }

    let mut location: Vec<usize> = blocks.iter().map(|b| b.source).collect();
    let mut phases = Vec::with_capacity(s);
    for k in 0..s {
        let step = Radix::Binary.pow(k);
        let mut sends = Vec::with_capacity(n * n);
        for (id, digits) in bits.iter().enumerate() {
            if !digits.bit(k) {
                continue;
            }
            let at = location[id];
            let (direction, to) = match blocks[id].half {
                Half::Mirror => (Direction::Left, (at + n - step) % n),
                _ => (Direction::Right, (at + step) % n),
            };
            sends.push((at, direction, to, id));
            location[id] = to;
        }
        phases.push(PhaseSchedule {
            phase: k,
            offset: Some(step),
            transfers: with_both_peers(collect_transfers(sends), n, k, Radix::Binary),
        });
    }

    Ok(Schedule {
        algorithm: Algorithm::BruckMirrored,
        n,
        requested_n,
        m_bytes: m,
        block_bytes: bytes,
        blocks,
        phases,
    })
}

/// Single-phase static baseline: every block goes straight to its
/// destination along the shorter ring direction. Offset exactly `n/2` on
/// even rings goes right (clockwise).
pub fn direct_schedule(n: usize, m: u64) -> Result<Schedule> {
    if n < 2 {
        return Err(Error::InvalidNodeCount {
            n,
            reason: "the direct baseline needs at least two nodes",
        });
    }
    let bytes = block_bytes(m, n);
    let mut blocks = Vec::with_capacity(n * n);
    let mut sends = Vec::with_capacity(n * (n - 1));
    for source in 0..n {
        for destination in 0..n {
            let id = blocks.len();
            blocks.push(Block {
                source,
                destination,
                bytes,
                half: Half::Whole,
            });
            let offset = (destination + n - source) % n;
            if offset == 0 {
                continue;
            }
            let direction = if 2 * offset <= n {
                Direction::Right
            } else {
                Direction::Left
            };
            sends.push((source, direction, destination, id));
        }
    }
    Ok(Schedule {
        algorithm: Algorithm::Direct,
        n,
        requested_n: n,
        m_bytes: m,
        block_bytes: bytes,
        blocks,
        phases: vec![PhaseSchedule {
            phase: 0,
            offset: None,
            transfers: collect_transfers(sends),
        }],
    })
}

/// Builds the schedule for `algorithm`, padding non-canonical sizes.
pub fn build(algorithm: Algorithm, n: usize, m: u64) -> Result<Schedule> {
    match algorithm {
        Algorithm::Retri => retri_schedule_padded(n, m),
        Algorithm::BruckMirrored => bruck_mirrored_schedule_padded(n, m),
        Algorithm::Direct => direct_schedule(n, m),
    }
}
