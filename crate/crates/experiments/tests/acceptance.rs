//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use retri_core::cost::{self, cost_from_metrics, crosscheck, retri_cost_r, retri_static_cost, CostParams};
use retri_core::optimizer::{balanced_segments, exhaustive_best_plan, optimal_r, plan_from_segments};
use retri_core::schedule::{bruck_mirrored_schedule, retri_schedule, Algorithm, Half};
use retri_core::sim::{execute, verify_all_delivered};
use retri_core::ternary::Radix;
use retri_core::topology::check_subring_minimality;
use retri_experiments::config::{ExperimentConfig, Reconfigs, Series, DEFAULT_MESSAGE_BYTES};
use retri_experiments::runner::{self, evaluate};
use retri_experiments::verify::{check_balance, check_digit_bijection, plan_family};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const RETRI_SIZES: [usize; 5] = [3, 9, 27, 81, 243];
const BRUCK_SIZES: [usize; 6] = [2, 4, 8, 16, 32, 64];

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(budget: Duration, start: Instant) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < budget, || format!("took {took:?}, budget {budget:?}"))
}

fn defaults() -> ExperimentConfig {
    ExperimentConfig::default()
}

fn default_params(delta: Duration) -> CostParams {
    defaults().params(delta)
}

fn series(algorithm: Algorithm, n: usize) -> Series {
    Series {
        algorithm,
        n,
        reconfigs: Reconfigs::Auto,
    }
}

/// Checks `h = c = radix^t` on every phase of an execution.
fn hop_law(radix: Radix, plan: &retri_core::ReconfigPlan, metrics: &[retri_core::PhaseMetrics]) -> Result<(), String> {
    for m in metrics {
        let expected = radix.pow(m.phase - plan.active_configuration(m.phase));
        ensure(m.hops == expected && m.congestion == expected as f64, || {
            format!("plan {:?} phase {}: h={} c={} expected {expected}", plan.x, m.phase, m.hops, m.congestion)
        })?;
    }
    Ok(())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut runs = 0;
    for n in RETRI_SIZES {
        let s = Radix::Ternary.phases_for(n);
        let schedule = retri_schedule(n, n as u64).map_err(|e| e.to_string())?;
        ensure(schedule.phase_count() == s, || format!("n={n}: {} phases", schedule.phase_count()))?;
        let offdiagonal = schedule.blocks.iter().filter(|b| b.source != b.destination).count();
        ensure(offdiagonal == n * (n - 1), || format!("n={n}: {offdiagonal} blocks"))?;
        for plan in plan_family(s) {
            let exec = execute(&schedule, &plan).map_err(|e| e.to_string())?;
            verify_all_delivered(&exec.final_state, &schedule)
                .map_err(|m| format!("n={n} plan {:?}: {} misplaced", plan.x, m.len()))?;
            runs += 1;
        }
    }
    within(Duration::from_secs(10), start)?;
    Ok(format!("{runs} executions delivered in {:.2?}", start.elapsed()))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut runs = 0;
    for n in BRUCK_SIZES {
        let s = Radix::Binary.phases_for(n);
        let schedule = bruck_mirrored_schedule(n, 2 * n as u64).map_err(|e| e.to_string())?;
        ensure(schedule.phase_count() == s, || format!("n={n}: {} phases", schedule.phase_count()))?;
        for half in [Half::Forward, Half::Mirror] {
            let count = schedule.blocks.iter().filter(|b| b.half == half).count();
            ensure(count == n * n, || format!("n={n}: {count} {half:?} halves"))?;
        }
        for plan in plan_family(s) {
            let exec = execute(&schedule, &plan).map_err(|e| e.to_string())?;
            verify_all_delivered(&exec.final_state, &schedule)
                .map_err(|m| format!("n={n} plan {:?}: {} misplaced", plan.x, m.len()))?;
            runs += 1;
        }
    }
    within(Duration::from_secs(5), start)?;
    Ok(format!("{runs} executions, both halves delivered in {:.2?}", start.elapsed()))
}

fn criterion_3() -> Outcome {
    for s in 1..=7 {
        let check = check_digit_bijection(s);
        ensure(check.passed, || format!("s={s}: {}", check.detail))?;
    }
    for n in RETRI_SIZES {
        let schedule = retri_schedule(n, n as u64).map_err(|e| e.to_string())?;
        let check = check_balance(&schedule);
        ensure(check.passed, || format!("n={n}: {}", check.detail))?;
    }
    Ok("digit map bijective for s <= 7 (2187 vectors at s = 7); n/3 per direction for n <= 243".into())
}

fn criterion_4() -> Outcome {
    let mut cases = 0;
    for n in RETRI_SIZES {
        for k in 0..Radix::Ternary.phases_for(n) {
            ensure(check_subring_minimality(n, k, Radix::Ternary), || format!("n={n} k={k}"))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} (n, k) pairs minimal"))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let params = default_params(Duration::from_micros(5));
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for n in [9, 27, 81, 243] {
        let s = Radix::Ternary.phases_for(n);
        for m in [n as u64, 3 * n as u64, 300 * n as u64] {
            let schedule = retri_schedule(n, m).map_err(|e| e.to_string())?;
            for r in 0..s {
                let plan = plan_from_segments(&balanced_segments(s, r).map_err(|e| e.to_string())?);
                let exec = execute(&schedule, &plan).map_err(|e| e.to_string())?;
                let simulated = cost_from_metrics(&exec.metrics, &params, plan.reconfigurations());
                let closed = retri_cost_r(n, m as f64, &params, r).map_err(|e| e.to_string())?;
                let err = crosscheck(closed.total, &simulated);
                ensure(err < 1e-9, || format!("n={n} m={m} R={r}: relative error {err:e}"))?;
                worst = worst.max(err);
                cases += 1;
            }
        }
    }
    within(Duration::from_secs(30), start)?;
    Ok(format!("{cases} cases, max relative error {worst:e}, {:.2?}", start.elapsed()))
}

fn criterion_6() -> Outcome {
    let mut runs = 0;
    for n in RETRI_SIZES {
        let s = Radix::Ternary.phases_for(n);
        let schedule = retri_schedule(n, 3 * n as u64).map_err(|e| e.to_string())?;
        for plan in plan_family(s) {
            let exec = execute(&schedule, &plan).map_err(|e| e.to_string())?;
            hop_law(Radix::Ternary, &plan, &exec.metrics).map_err(|e| format!("retri n={n}: {e}"))?;
            runs += 1;
        }
    }
    for n in BRUCK_SIZES {
        let s = Radix::Binary.phases_for(n);
        let schedule = bruck_mirrored_schedule(n, 4 * n as u64).map_err(|e| e.to_string())?;
        for plan in plan_family(s) {
            let exec = execute(&schedule, &plan).map_err(|e| e.to_string())?;
            hop_law(Radix::Binary, &plan, &exec.metrics).map_err(|e| format!("bruck n={n}: {e}"))?;
            runs += 1;
        }
    }
    Ok(format!("h = c = 3^t (2^t for bruck) on {runs} executions"))
}

fn criterion_7() -> Outcome {
    let sizes = [1e3, 1e6, 2.68e8];
    for s in 2..=12 {
        let n = 3usize.pow(s as u32);
        for m in sizes {
            let free = default_params(Duration::ZERO);
            let (r, _) = optimal_r(n, m, &free, Algorithm::Retri).map_err(|e| e.to_string())?;
            ensure(r == s - 1, || format!("delta=0 n={n} m={m}: R*={r}"))?;

            let static_cost = retri_static_cost(n, m, &free).map_err(|e| e.to_string())?;
            let costly = free.with_delta(1e3 * static_cost);
            let (r, _) = optimal_r(n, m, &costly, Algorithm::Retri).map_err(|e| e.to_string())?;
            ensure(r == 0, || format!("huge delta n={n} m={m}: R*={r}"))?;

            for delta in [1e-6, 1e-4, 1e-2, 5e-2] {
                let p = free.with_delta(delta);
                let (_, best) = optimal_r(n, m, &p, Algorithm::Retri).map_err(|e| e.to_string())?;
                for r in 0..s {
                    let c = retri_cost_r(n, m, &p, r).map_err(|e| e.to_string())?;
                    ensure(best.total <= c.total, || format!("n={n} m={m} delta={delta}: R={r} beats R*"))?;
                }
            }
        }
    }
    let mut audited = 0;
    for s in 1..=8 {
        let n = 3usize.pow(s as u32);
        for m in sizes {
            for delta in [0.0, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 5e-2] {
                let p = default_params(Duration::from_secs_f64(delta));
                let (_, balanced) = optimal_r(n, m, &p, Algorithm::Retri).map_err(|e| e.to_string())?;
                let (plan, best) = exhaustive_best_plan(Radix::Ternary, n, m, &p).map_err(|e| e.to_string())?;
                ensure(balanced.total <= best.total * (1.0 + 1e-12), || {
                    format!("s={s} m={m} delta={delta}: plan {:?} beats the balanced plan", plan.x)
                })?;
                audited += 1;
            }
        }
    }
    Ok(format!("R* limits hold for s <= 12; balanced plan optimal in {audited} exhaustive audits"))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let mut cfg = defaults();
    cfg.candidate = series(Algorithm::Retri, 81);
    cfg.baseline = Some(series(Algorithm::Direct, 64));
    let sweep = runner::run_sweep(&cfg).map_err(|e| e.to_string())?;
    let rows = sweep.rows();
    let cell = rows
        .iter()
        .find(|r| r.m_bytes == 256 << 20 && r.delta == 1e-6)
        .ok_or("missing 256MB / 1us cell")?;
    let speedup = cell.speedup_vs_baseline.ok_or("no speedup column")?;
    ensure((4.0..=12.0).contains(&speedup), || format!("speedup {speedup:.3} outside [4, 12]"))?;
    for row in rows.chunks(cfg.deltas.len()) {
        for pair in row.windows(2) {
            let (a, b) = (pair[0].speedup_vs_baseline.unwrap(), pair[1].speedup_vs_baseline.unwrap());
            ensure(b <= a, || format!("m={}: speedup rises from {a} to {b} as delta grows", pair[0].m_bytes))?;
        }
    }
    within(Duration::from_secs(1), start)?;
    Ok(format!("speedup {speedup:.2} at 256MB, 1us (R={}); rows non-increasing in delta", cell.r))
}

fn criterion_9() -> Outcome {
    let params = default_params(Duration::from_micros(1));
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for m in DEFAULT_MESSAGE_BYTES.into_iter().filter(|&m| m >= 1 << 20) {
        let retri = evaluate(&series(Algorithm::Retri, 81), m, &params).map_err(|e| e.to_string())?;
        let bruck = evaluate(&series(Algorithm::BruckMirrored, 64), m, &params).map_err(|e| e.to_string())?;
        let speedup = runner::speedup(&bruck, &retri, false);
        ensure((1.05..=2.5).contains(&speedup), || format!("m={m}: speedup {speedup:.3} outside [1.05, 2.5]"))?;
        lo = lo.min(speedup);
        hi = hi.max(speedup);
    }

    let ratio = Radix::Binary.phases_for(64) as f64 / Radix::Ternary.phases_for(81) as f64;
    ensure(ratio == 1.5, || format!("phase ratio {ratio}"))?;

    let round3 = |x: f64| (x * 1e3).round() / 1e3;
    let target = round3(3f64.log2());
    for s in 1..=12u32 {
        let n = 3usize.pow(s);
        let a = (n as f64).log2() / Radix::Ternary.phases_for(n) as f64;
        let n2 = 2usize.pow(s);
        let b = Radix::Binary.phases_for(n2) as f64 / (n2 as f64).log(3.0);
        ensure(round3(a) == target && round3(b) == target, || {
            format!("s={s}: ratios {a:.4}, {b:.4} vs {target}")
        })?;
    }
    Ok(format!("speedup {lo:.2}..{hi:.2} for m >= 1MB; phase ratio 1.5; asymptotic ratio {target:.3}"))
}

fn criterion_10() -> Outcome {
    let m = 256u64 << 20;
    let speedup_at = |delta: Duration| -> Result<f64, String> {
        let params = default_params(delta);
        let retri = evaluate(&series(Algorithm::Retri, 243), m, &params).map_err(|e| e.to_string())?;
        let direct = evaluate(&series(Algorithm::Direct, 256), m, &params).map_err(|e| e.to_string())?;
        Ok(runner::speedup(&direct, &retri, true))
    };
    let at_50 = speedup_at(Duration::from_millis(50))?;
    let at_150 = speedup_at(Duration::from_millis(150))?;
    ensure(at_50 > 1.0, || format!("speedup {at_50:.3} at 50ms"))?;
    ensure(at_150 >= 1.0 - 0.15, || format!("speedup {at_150:.3} at 150ms below 0.85"))?;
    // sanity: the direct model is independent of delta
    let p = default_params(Duration::ZERO);
    let d0 = cost::direct_cost(256, m as f64, &p).map_err(|e| e.to_string())?.total;
    let d1 = cost::direct_cost(256, m as f64, &p.with_delta(1.0)).map_err(|e| e.to_string())?.total;
    ensure(d0 == d1, || "direct cost depends on delta".into())?;
    Ok(format!("per-node speedup {at_50:.2} at 50ms, {at_150:.2} at 150ms"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("ReTri delivery", criterion_1),
        ("mirrored Bruck delivery", criterion_2),
        ("digit bijection and balance", criterion_3),
        ("subring minimality", criterion_4),
        ("closed form vs simulation", criterion_5),
        ("hop/congestion law", criterion_6),
        ("optimizer", criterion_7),
        ("trend vs static ring", criterion_8),
        ("trend vs mirrored Bruck", criterion_9),
        ("large-delta regime", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS  criterion {:>2}  {name}: {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL  criterion {:>2}  {name}: {reason}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
