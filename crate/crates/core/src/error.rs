use thiserror::Error;

use crate::ternary::Radix;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("centered representative is undefined for even modulus {n}")]
    EvenModulus { n: usize },

    #[error("offset {offset} is outside [0, {n})")]
    OffsetOutOfRange { offset: i64, n: usize },

    #[error("offset {delta} cannot be written with {digits} balanced ternary digits")]
    NotRepresentable { delta: i64, digits: usize },

    #[error("node count {n} is not a power of {radix}")]
    NotPowerOf { n: usize, radix: Radix },

    #[error("invalid node count {n}: {reason}")]
    InvalidNodeCount { n: usize, reason: &'static str },

    #[error("phase {phase} is out of range for a {phases}-phase schedule")]
    PhaseOutOfRange { phase: usize, phases: usize },

    #[error("reconfiguration count {requested} exceeds the maximum {max}")]
    TooManyReconfigurations { requested: usize, max: usize },

    #[error("plan covers {plan} phases but the schedule has {schedule}")]
    PlanLength { plan: usize, schedule: usize },

    #[error("invalid segment layout: {0}")]
    InvalidLayout(String),

    #[error("invalid cost parameter: {0}")]
    InvalidParams(String),

    #[error("phase {phase}: node {to} is unreachable from node {from} on the active topology")]
    Unreachable { phase: usize, from: usize, to: usize },

    #[error("phase {phase}: block {block} is at node {actual}, but node {expected} tries to send it")]
    BlockNotPresent {
        phase: usize,
        block: usize,
        expected: usize,
        actual: usize,
    },

    #[error("phase {phase}: block {block} is sent more than once")]
    BlockSentTwice { phase: usize, block: usize },

    #[error("phase {phase}: node {node} has degree above two on the active topology")]
    AmbiguousRoute { phase: usize, node: usize },
}
