//! Invariant suite behind `retri verify`.

use std::collections::HashSet;
use std::fmt;

use retri_core::cost;
use retri_core::optimizer::{exhaustive_best_plan, optimal_r, plan_from_segments, balanced_segments};
use retri_core::schedule::{self, Algorithm, Schedule};
use retri_core::sim::{self, execute, verify_all_delivered};
use retri_core::ternary::{balanced_ternary_digits, digits_to_offset, CenteredOffset, Radix, Trit};
use retri_core::topology::{check_subring_minimality, reconfigure, validate};
use retri_core::ReconfigPlan;

use crate::config::{ExperimentConfig, Series};
use crate::runner;
use crate::RunError;

/// Largest phase count for the exhaustive plan audit (`2^(s−1)` plans).
pub const AUDIT_MAX_PHASES: usize = 8;
/// Largest phase count for the full digit enumeration (`3^s` vectors).
pub const DIGIT_ENUMERATION_MAX_PHASES: usize = 7;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict}  {:<28}{}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        write!(f, "{} checks, {failed} failed", self.checks.len())
    }
}

/// Static, every-phase, and each single-boundary plan.
pub fn plan_family(s: usize) -> Vec<ReconfigPlan> {
    let s = s.max(1);
    let mut plans = vec![ReconfigPlan::static_plan(s)];
    if s > 1 {
        plans.push(ReconfigPlan::every_phase(s));
        plans.extend((1..s).map(|j| ReconfigPlan::from_boundaries(s, &[j])));
    }
    plans
}

/// Every plan delivers every block; within each segment `h = c = radix^t`.
pub fn check_delivery(schedule: &Schedule) -> Result<Vec<Check>, RunError> {
    let plans = match schedule.algorithm {
        Algorithm::Direct => vec![ReconfigPlan::static_plan(1)],
        _ => plan_family(schedule.phase_count()),
    };
    let mut failures = Vec::new();
    let mut law_failures = Vec::new();
    for plan in &plans {
        let exec = execute(schedule, plan)?;
        if let Err(misplaced) = verify_all_delivered(&exec.final_state, schedule) {
            failures.push(format!("{:?}: {} misplaced", plan.x, misplaced.len()));
        }
        if let Some(radix) = schedule.algorithm.radix() {
            for m in &exec.metrics {
                let expected = radix.pow(m.phase - plan.active_configuration(m.phase));
                if m.hops != expected || m.congestion != expected as f64 {
                    law_failures.push(format!(
                        "{:?} phase {}: h={} c={} expected {expected}",
                        plan.x, m.phase, m.hops, m.congestion
                    ));
                }
            }
        }
    }
    let mut checks = vec![Check::new(
        "delivery",
        failures.is_empty(),
        if failures.is_empty() {
            format!("{} blocks under {} plans", schedule.blocks.len(), plans.len())
        } else {
            failures.join("; ")
        },
    )];
    // zero-byte virtual blocks make c undefined on padded rings
    if schedule.algorithm != Algorithm::Direct && !schedule.is_padded() {
        checks.push(Check::new(
            "hop/congestion law",
            law_failures.is_empty(),
            law_failures.first().cloned().unwrap_or_else(|| "h = c = radix^t in every segment".into()),
        ));
    }
    Ok(checks)
}

/// Each node sends `n/3` blocks each way and keeps `n/3` in every phase.
pub fn check_balance(schedule: &Schedule) -> Check {
    let n = schedule.n;
    let third = n / 3;
    let mut location: Vec<usize> = schedule.blocks.iter().map(|b| b.source).collect();
    for phase in &schedule.phases {
        let mut stored = vec![0usize; n];
        for &l in &location {
            stored[l] += 1;
        }
        for (node, &kept) in stored.iter().enumerate() {
            let (left, right) = (phase.to_left(node).len(), phase.to_right(node).len());
            if (left, right, kept - left - right) != (third, third, third) {
                return Check::new(
                    "phase balance",
                    false,
                    format!("phase {} node {node}: left={left} right={right}", phase.phase),
                );
            }
        }
        for t in &phase.transfers {
            for &b in &t.blocks {
                location[b] = t.to;
            }
        }
    }
    Check::new("phase balance", true, format!("n/3 = {third} blocks per direction per phase"))
}

/// Enumerates every digit vector of length `s` and checks that the map to
/// centered offsets is a bijection inverted by `balanced_ternary_digits`.
pub fn check_digit_bijection(s: usize) -> Check {
    let n = 3usize.pow(s as u32) as i64;
    let half = (n - 1) / 2;
    let mut seen = HashSet::new();
    let mut digits = vec![Trit::Neg; s];
    for index in 0..n {
        let mut rest = index;
        for d in digits.iter_mut() {
            *d = Trit::ALL[(rest % 3) as usize];
            rest /= 3;
        }
        let vector = retri_core::ternary::BalancedDigits(digits.clone());
        let offset = digits_to_offset(&vector);
        let round_trip = balanced_ternary_digits(CenteredOffset(offset), s).ok();
        if offset.abs() > half || !seen.insert(offset) || round_trip.as_ref() != Some(&vector) {
            return Check::new("digit bijection", false, format!("vector {index} maps to {offset}"));
        }
    }
    Check::new("digit bijection", true, format!("{n} vectors onto [-{half}, {half}]"))
}

/// Subring minimality for every phase, plus degree validation.
pub fn check_subrings(n: usize, radix: Radix) -> Result<Check, RunError> {
    let s = radix.phases_for(n);
    for k in 0..s {
        if let Err(report) = validate(&reconfigure(n, k, radix)?) {
            return Ok(Check::new(
                "subring minimality",
                false,
                format!("k={k}: invalid topology at nodes {:?}", report.offending_nodes()),
            ));
        }
        if !check_subring_minimality(n, k, radix) {
            return Ok(Check::new("subring minimality", false, format!("k={k}")));
        }
    }
    Ok(Check::new("subring minimality", true, format!("k = 0..{s}, radix {radix}")))
}

/// Balanced plan at `R*` against all `2^(s−1)` plans for every grid cell.
pub fn audit_plans(cfg: &ExperimentConfig) -> Result<Check, RunError> {
    let series = cfg.candidate;
    let Some(radix) = series.algorithm.radix() else {
        return Ok(Check::new("plan optimality", true, "single-phase baseline, nothing to audit"));
    };
    let n = series.algorithm.executed_size(series.n);
    let s = radix.phases_for(n);
    if s > AUDIT_MAX_PHASES {
        return Ok(Check::new("plan optimality", true, format!("skipped (s = {s} > {AUDIT_MAX_PHASES})")));
    }
    let mut counterexamples = Vec::new();
    let mut cells = 0;
    for &m in &cfg.message_bytes {
        for &d in &cfg.deltas {
            let params = cfg.params(d);
            let m = (m.div_ceil(series.n as u64) * n as u64) as f64;
            let (r, balanced) = optimal_r(n, m, &params, series.algorithm)?;
            let (plan, best) = exhaustive_best_plan(radix, n, m, &params)?;
            cells += 1;
            if best.total < balanced.total * (1.0 - 1e-12) {
                counterexamples.push(format!(
                    "m={m} delta={}: balanced R={r} {:e} > plan {:?} {:e}",
                    params.delta, balanced.total, plan.x, best.total
                ));
            }
        }
    }
    Ok(Check::new(
        "plan optimality",
        counterexamples.is_empty(),
        if counterexamples.is_empty() {
            format!("{cells} cells, {} plans each", 1usize << (s - 1))
        } else {
            counterexamples.join("; ")
        },
    ))
}

/// Model against simulation at `R*` for each message size, first delay.
pub fn check_crosscheck(cfg: &ExperimentConfig, series: &Series) -> Result<Check, RunError> {
    let params = cfg.params(cfg.deltas[0]);
    let mut worst: f64 = 0.0;
    for &m in &cfg.message_bytes {
        let cell = runner::evaluate(series, m, &params)?;
        let schedule = schedule::build(series.algorithm, series.n, m)?;
        let plan = match series.algorithm.radix() {
            Some(_) => plan_from_segments(&balanced_segments(cell.phases(), cell.reconfigurations)?),
            None => ReconfigPlan::static_plan(1),
        };
        let exec = sim::execute(&schedule, &plan)?;
        let simulated = cost::cost_from_metrics(&exec.metrics, &params, plan.reconfigurations());
        worst = worst.max(cost::crosscheck(cell.cost.total, &simulated));
    }
    let tolerance = 1e-9;
    Ok(Check::new(
        "model/simulation crosscheck",
        worst < tolerance,
        format!("max relative error {worst:e} (tolerance {tolerance:e})"),
    ))
}

/// Runs every applicable check for the configured candidate.
pub fn run_verify(cfg: &ExperimentConfig) -> Result<VerifyReport, RunError> {
    let series = cfg.candidate;
    let mut report = VerifyReport::default();
    let n = series.algorithm.executed_size(series.n);
    if n > runner::SIMULATION_NODE_LIMIT {
        return Err(RunError::Verification(format!(
            "{n} nodes exceeds the simulation limit of {}",
            runner::SIMULATION_NODE_LIMIT
        )));
    }
    let schedule = schedule::build(series.algorithm, series.n, cfg.message_bytes[0])?;
    report.checks.extend(check_delivery(&schedule)?);
    if series.algorithm == Algorithm::Retri && !schedule.is_padded() {
        report.checks.push(check_balance(&schedule));
    }
    if let Some(radix) = series.algorithm.radix() {
        if series.algorithm == Algorithm::Retri {
            let s = radix.phases_for(n).min(DIGIT_ENUMERATION_MAX_PHASES);
            report.checks.push(check_digit_bijection(s));
        }
        report.checks.push(check_subrings(n, radix)?);
        report.checks.push(audit_plans(cfg)?);
    }
    if !schedule.is_padded() {
        report.checks.push(check_crosscheck(cfg, &series)?);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Reconfigs;

    #[test]
    fn default_config_verifies() {
        let cfg = ExperimentConfig {
            message_bytes: vec![81, 81 * 300],
            deltas: vec![std::time::Duration::from_micros(1), std::time::Duration::from_millis(1)],
            ..Default::default()
        };
        let report = run_verify(&cfg).unwrap();
        assert!(report.passed(), "{report}");
        assert_eq!(report.checks.len(), 7);
    }

    #[test]
    fn digit_bijection_up_to_seven() {
        for s in 1..=DIGIT_ENUMERATION_MAX_PHASES {
            assert!(check_digit_bijection(s).passed);
        }
    }

    #[test]
    fn padded_and_direct_configs_verify() {
        for (algorithm, n) in [(Algorithm::Retri, 10), (Algorithm::Direct, 64), (Algorithm::BruckMirrored, 12)] {
            let cfg = ExperimentConfig {
                candidate: Series { algorithm, n, reconfigs: Reconfigs::Auto },
                message_bytes: vec![4 * n as u64],
                ..Default::default()
            };
            let report = run_verify(&cfg).unwrap();
            assert!(report.passed(), "{algorithm} {n}: {report}");
        }
    }
}
