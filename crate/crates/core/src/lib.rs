//! All-to-All schedules for reconfigurable ring interconnects.
//!
//! The balanced ternary schedule (`retri`) completes in `⌈log_3 n⌉` phases
//! with pairwise bidirectional exchanges; every phase `k` only needs the
//! residue-class subrings `u ≡ i (mod 3^k)`, so one optical configuration
//! can serve several consecutive phases. The crate also provides the mirrored
//! radix-2 Bruck and static direct baselines, a phase-level propagation
//! simulator, the α-β cost model and the optimizer for the number of
//! reconfigurations.

pub mod cost;
pub mod error;
pub mod optimizer;
pub mod schedule;
pub mod sim;
pub mod ternary;
pub mod topology;

pub use cost::{CostBreakdown, CostParams};
pub use error::{Error, Result};
pub use schedule::{Algorithm, Schedule};
pub use sim::{Execution, PhaseMetrics, PlacementState};
pub use ternary::{Radix, RingConfig};
pub use topology::{ReconfigPlan, Topology};
