//! Extended Hockney (α-β) cost model.
//!
//! A phase costs `α_s + h_k·α_h + m_k·c_k·β`; a run adds `R·δ` for its
//! charged reconfigurations. Within a segment of `r` phases served by one
//! configuration, hop distance and congestion both grow as `radix^t`, which
//! gives the closed forms below. All arithmetic is `f64` seconds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizer;
use crate::sim::PhaseMetrics;
use crate::ternary::Radix;
use crate::topology::ReconfigPlan;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostParams {
    /// Per-phase startup delay, seconds.
    pub alpha_s: f64,
    /// Per-hop delay, seconds.
    pub alpha_h: f64,
    /// Seconds per byte.
    pub beta: f64,
    /// Reconfiguration delay, seconds.
    pub delta: f64,
}

impl CostParams {
    pub fn new(alpha_s: f64, alpha_h: f64, beta: f64, delta: f64) -> Result<Self> {
        let params = Self {
            alpha_s,
            alpha_h,
            beta,
            delta,
        };
        params.validate()?;
        Ok(params)
    }

    /// `β = 8 / bandwidth` with bandwidth in bits per second.
    pub fn from_bandwidth(alpha_s: f64, alpha_h: f64, bits_per_second: f64, delta: f64) -> Result<Self> {
        if !(bits_per_second > 0.0 && bits_per_second.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "bandwidth must be positive, got {bits_per_second}"
            )));
        }
        Self::new(alpha_s, alpha_h, 8.0 / bits_per_second, delta)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("alpha_s", self.alpha_s),
            ("alpha_h", self.alpha_h),
            ("beta", self.beta),
            ("delta", self.delta),
        ] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(Error::InvalidParams(format!(
                    "{name} must be finite and non-negative, got {value}"
                )));
            }
        }
        Ok(())
    }

    pub fn with_delta(self, delta: f64) -> Self {
        Self { delta, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub per_phase: f64,
    pub hop: f64,
    pub transmission: f64,
    pub reconfig: f64,
    pub total: f64,
    pub reconfigurations: usize,
}

impl CostBreakdown {
    pub fn new(per_phase: f64, hop: f64, transmission: f64, reconfig: f64, reconfigurations: usize) -> Self {
        Self {
            per_phase,
            hop,
            transmission,
            reconfig,
            total: per_phase + hop + transmission + reconfig,
            reconfigurations,
        }
    }
}

/// `s·α_s + Σ (h_k·α_h + m_k·c_k·β) + R·δ` over measured phases.
pub fn cost_from_metrics(metrics: &[PhaseMetrics], params: &CostParams, reconfigurations: usize) -> CostBreakdown {
    let per_phase = metrics.len() as f64 * params.alpha_s;
    let hop = metrics.iter().map(|m| m.hops as f64 * params.alpha_h).sum();
    let transmission = metrics
        .iter()
        .map(|m| m.bytes_per_direction as f64 * m.congestion * params.beta)
        .sum();
    CostBreakdown::new(
        per_phase,
        hop,
        transmission,
        reconfigurations as f64 * params.delta,
        reconfigurations,
    )
}

/// Per-node, per-direction share of `m` in every phase: `m/3` for the
/// ternary schedule, `m/4` for mirrored Bruck.
pub fn share_per_direction(radix: Radix, m: f64) -> f64 {
    match radix {
        Radix::Ternary => m / 3.0,
        Radix::Binary => m / 4.0,
    }
}

fn require_power(n: usize, radix: Radix) -> Result<usize> {
    if !radix.is_power(n) {
        return Err(Error::NotPowerOf { n, radix });
    }
    Ok(radix.phases_for(n))
}

/// Segment of `r` phases on one configuration, split into
/// `(per_phase, hop, transmission)`.
fn segment_parts(radix: Radix, r: usize, m: f64, params: &CostParams) -> (f64, f64, f64) {
    let growth = radix.geometric_sum(r) as f64;
    (
        r as f64 * params.alpha_s,
        params.alpha_h * growth,
        params.beta * share_per_direction(radix, m) * growth,
    )
}

/// `r·α_s + y·(3^r − 1)/2` with `y = α_h + β·m/3`.
pub fn segment_cost(r: usize, m: f64, params: &CostParams) -> f64 {
    let y = params.alpha_h + params.beta * m / 3.0;
    r as f64 * params.alpha_s + y * (3f64.powi(r as i32) - 1.0) / 2.0
}

/// Base-2 analog: `r·α_s + (α_h + β·m/4)·(2^r − 1)`.
pub fn bruck_segment_cost(r: usize, m: f64, params: &CostParams) -> f64 {
    let y = params.alpha_h + params.beta * m / 4.0;
    r as f64 * params.alpha_s + y * (2f64.powi(r as i32) - 1.0)
}

/// Static ring: `log_3 n·α_s + (α_h + β·m/3)·(n − 1)/2`.
pub fn retri_static_cost(n: usize, m: f64, params: &CostParams) -> Result<f64> {
    let s = require_power(n, Radix::Ternary)?;
    Ok(s as f64 * params.alpha_s + (params.alpha_h + params.beta * m / 3.0) * (n as f64 - 1.0) / 2.0)
}

/// Reconfigure before every phase:
/// `log_3 n·(α_s + α_h + β·m/3) + (log_3 n − 1)·δ`.
pub fn retri_full_reconfig_cost(n: usize, m: f64, params: &CostParams) -> Result<f64> {
    let s = require_power(n, Radix::Ternary)? as f64;
    Ok(s * (params.alpha_s + params.alpha_h + params.beta * m / 3.0) + (s - 1.0).max(0.0) * params.delta)
}

/// `log_2 n·(α_s + α_h + β·m/4) + (log_2 n − 1)·δ`.
pub fn bruck_full_reconfig_cost(n: usize, m: f64, params: &CostParams) -> Result<f64> {
    let s = require_power(n, Radix::Binary)? as f64;
    Ok(s * (params.alpha_s + params.alpha_h + params.beta * m / 4.0) + (s - 1.0).max(0.0) * params.delta)
}

/// Cost of arbitrary segment lengths plus `R·δ`, `R = lengths.len() − 1`.
pub fn segments_cost(radix: Radix, lengths: &[usize], m: f64, params: &CostParams) -> CostBreakdown {
    let (mut per_phase, mut hop, mut transmission) = (0.0, 0.0, 0.0);
    for &r in lengths {
        let (p, h, t) = segment_parts(radix, r, m, params);
        per_phase += p;
        hop += h;
        transmission += t;
    }
    let reconfigurations = lengths.len().saturating_sub(1);
    CostBreakdown::new(
        per_phase,
        hop,
        transmission,
        reconfigurations as f64 * params.delta,
        reconfigurations,
    )
}

/// Balanced-segment cost with `reconfigurations` charged reconfigurations.
pub fn cost_r(radix: Radix, n: usize, m: f64, params: &CostParams, reconfigurations: usize) -> Result<CostBreakdown> {
    let s = require_power(n, radix)?;
    let layout = optimizer::balanced_segments(s, reconfigurations)?;
    Ok(segments_cost(radix, &layout.lengths, m, params))
}

pub fn retri_cost_r(n: usize, m: f64, params: &CostParams, reconfigurations: usize) -> Result<CostBreakdown> {
    cost_r(Radix::Ternary, n, m, params, reconfigurations)
}

/// Mirrored Bruck with balanced segments. For `0 < R < s − 1` this is the
/// base-2 extrapolation of the ternary segment model.
pub fn bruck_cost_r(n: usize, m: f64, params: &CostParams, reconfigurations: usize) -> Result<CostBreakdown> {
    cost_r(Radix::Binary, n, m, params, reconfigurations)
}

/// Cost of an arbitrary plan on `n = radix^s` nodes.
pub fn plan_cost(radix: Radix, n: usize, m: f64, params: &CostParams, plan: &ReconfigPlan) -> Result<CostBreakdown> {
    let s = require_power(n, radix)?;
    if plan.phases() != s.max(1) {
        return Err(Error::PlanLength {
            plan: plan.phases(),
            schedule: s,
        });
    }
    Ok(segments_cost(radix, &plan.segment_lengths(), m, params))
}

/// Static shortest-path baseline on a ring of `n` nodes: one phase whose
/// longest path is `L = ⌊n/2⌋` hops and whose busiest directed link carries
/// `L(L+1)/2` blocks of `m/n` bytes.
pub fn direct_cost(n: usize, m: f64, params: &CostParams) -> Result<CostBreakdown> {
    if n < 2 {
        return Err(Error::InvalidNodeCount {
            n,
            reason: "the direct baseline needs at least two nodes",
        });
    }
    let longest = (n / 2) as f64;
    let busiest_blocks = longest * (longest + 1.0) / 2.0;
    Ok(CostBreakdown::new(
        params.alpha_s,
        longest * params.alpha_h,
        busiest_blocks * m / n as f64 * params.beta,
        0.0,
        0,
    ))
}

/// `|closed − simulated| / max(closed, ε)`.
pub fn crosscheck(closed: f64, simulated: &CostBreakdown) -> f64 {
    (closed - simulated.total).abs() / closed.abs().max(f64::MIN_POSITIVE)
}
