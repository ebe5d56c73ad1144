//! Choice of the reconfiguration count `R*` and the balanced plan realizing it.

use crate::cost::{self, CostBreakdown, CostParams};
use crate::error::{Error, Result};
use crate::schedule::Algorithm;
use crate::ternary::Radix;
use crate::topology::ReconfigPlan;

/// Segment lengths, longest first; they sum to `s` and differ by at most one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentLayout {
    pub lengths: Vec<usize>,
}

impl SegmentLayout {
    pub fn new(lengths: Vec<usize>) -> Result<Self> {
        if lengths.is_empty() || lengths.contains(&0) {
            return Err(Error::InvalidLayout(format!(
                "segments must be non-empty and positive, got {lengths:?}"
            )));
        }
        let (lo, hi) = (lengths.iter().min().unwrap(), lengths.iter().max().unwrap());
        if hi - lo > 1 {
            return Err(Error::InvalidLayout(format!(
                "segment lengths {lengths:?} differ by more than one"
            )));
        }
        Ok(Self { lengths })
    }

    pub fn phases(&self) -> usize {
        self.lengths.iter().sum()
    }

    pub fn reconfigurations(&self) -> usize {
        self.lengths.len() - 1
    }
}

/// `R + 1` lengths of `⌊s/(R+1)⌋` or `⌈s/(R+1)⌉`, longer ones first.
pub fn balanced_segments(s: usize, reconfigurations: usize) -> Result<SegmentLayout> {
    let max = s.saturating_sub(1);
    if reconfigurations > max {
        return Err(Error::TooManyReconfigurations {
            requested: reconfigurations,
            max,
        });
    }
    let count = reconfigurations + 1;
    let (base, extra) = (s / count, s % count);
    SegmentLayout::new((0..count).map(|i| base + usize::from(i < extra)).collect())
}

/// Reconfiguration before phase 0 (free) and at every segment boundary.
pub fn plan_from_segments(layout: &SegmentLayout) -> ReconfigPlan {
    let boundaries: Vec<usize> = layout
        .lengths
        .iter()
        .scan(0, |start, &len| {
            let here = *start;
            *start += len;
            Some(here)
        })
        .collect();
    ReconfigPlan::from_boundaries(layout.phases(), &boundaries)
}

/// Modeled cost of `algorithm` on canonical `n` with `reconfigurations`.
pub fn model_cost(
    algorithm: Algorithm,
    n: usize,
    m: f64,
    params: &CostParams,
    reconfigurations: usize,
) -> Result<CostBreakdown> {
    match algorithm.radix() {
        Some(radix) => cost::cost_r(radix, n, m, params, reconfigurations),
        None if reconfigurations == 0 => cost::direct_cost(n, m, params),
        None => Err(Error::TooManyReconfigurations {
            requested: reconfigurations,
            max: 0,
        }),
    }
}

/// Exhaustive search over `R ∈ [0, s−1]`; ties go to the smaller `R`.
pub fn optimal_r(n: usize, m: f64, params: &CostParams, algorithm: Algorithm) -> Result<(usize, CostBreakdown)> {
    let max_r = match algorithm.radix() {
        Some(radix) => {
            if !radix.is_power(n) {
                return Err(Error::NotPowerOf { n, radix });
            }
            radix.phases_for(n).saturating_sub(1)
        }
        None => 0,
    };
    let mut best: Option<(usize, CostBreakdown)> = None;
    for r in 0..=max_r {
        let c = model_cost(algorithm, n, m, params, r)?;
        if best.as_ref().is_none_or(|(_, b)| c.total < b.total) {
            best = Some((r, c));
        }
    }
    Ok(best.expect("at least R = 0 is evaluated"))
}

/// Cheapest plan among all `2^(s−1)` plans, ties toward fewer
/// reconfigurations then enumeration order.
pub fn exhaustive_best_plan(
    radix: Radix,
    n: usize,
    m: f64,
    params: &CostParams,
) -> Result<(ReconfigPlan, CostBreakdown)> {
    let s = radix.phases_for(n);
    let mut best: Option<(ReconfigPlan, CostBreakdown)> = None;
    for plan in ReconfigPlan::enumerate(s) {
        let c = cost::plan_cost(radix, n, m, params, &plan)?;
        let better = best.as_ref().is_none_or(|(_, b)| {
            c.total < b.total || (c.total == b.total && c.reconfigurations < b.reconfigurations)
        });
        if better {
            best = Some((plan, c));
        }
    }
    Ok(best.expect("at least one plan exists"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_examples() {
        assert_eq!(balanced_segments(4, 1).unwrap().lengths, vec![2, 2]);
        assert_eq!(balanced_segments(5, 1).unwrap().lengths, vec![3, 2]);
        assert_eq!(balanced_segments(4, 3).unwrap().lengths, vec![1, 1, 1, 1]);
        assert_eq!(balanced_segments(7, 2).unwrap().lengths, vec![3, 2, 2]);
        assert!(matches!(
            balanced_segments(4, 4),
            Err(Error::TooManyReconfigurations { requested: 4, max: 3 })
        ));
    }

    #[test]
    fn plan_examples() {
        let plan = |l: Vec<usize>| plan_from_segments(&SegmentLayout::new(l).unwrap()).x;
        assert_eq!(plan(vec![2, 2]), vec![true, false, true, false]);
        assert_eq!(plan(vec![4]), vec![true, false, false, false]);
        assert_eq!(plan(vec![1, 1, 1, 1]), vec![true; 4]);
        let layout = SegmentLayout::new(vec![3, 2]).unwrap();
        assert_eq!(plan_from_segments(&layout).reconfigurations(), layout.reconfigurations());
    }

    #[test]
    fn layout_validation() {
        assert!(SegmentLayout::new(vec![]).is_err());
        assert!(SegmentLayout::new(vec![3, 1]).is_err());
        assert!(SegmentLayout::new(vec![0, 1]).is_err());
    }

    #[test]
    fn free_reconfiguration_reconfigures_everywhere() {
        let params = CostParams::new(1e-6, 1e-6, 2e-11, 0.0).unwrap();
        for n in [9, 27, 81, 243] {
            let (r, _) = optimal_r(n, 1e6, &params, Algorithm::Retri).unwrap();
            assert_eq!(r, Radix::Ternary.phases_for(n) - 1);
        }
    }

    #[test]
    fn huge_delta_never_reconfigures() {
        let params = CostParams::new(1e-6, 1e-6, 2e-11, 1e9).unwrap();
        assert_eq!(optimal_r(81, 1e6, &params, Algorithm::Retri).unwrap().0, 0);
        assert_eq!(optimal_r(64, 1e6, &params, Algorithm::BruckMirrored).unwrap().0, 0);
    }

    #[test]
    fn optimum_is_minimal() {
        let params = CostParams::new(1.7e-6, 1e-6, 2e-11, 1e-4).unwrap();
        let (_, best) = optimal_r(81, 1e7, &params, Algorithm::Retri).unwrap();
        for r in 0..4 {
            assert!(best.total <= cost::retri_cost_r(81, 1e7, &params, r).unwrap().total);
        }
    }

    #[test]
    fn direct_has_no_reconfigurations() {
        let params = CostParams::new(1.7e-6, 1e-6, 2e-11, 0.0).unwrap();
        let (r, c) = optimal_r(64, 1e6, &params, Algorithm::Direct).unwrap();
        assert_eq!(r, 0);
        assert_eq!(c, cost::direct_cost(64, 1e6, &params).unwrap());
        assert!(model_cost(Algorithm::Direct, 64, 1e6, &params, 1).is_err());
        assert!(optimal_r(10, 1e6, &params, Algorithm::Retri).is_err());
    }
}
