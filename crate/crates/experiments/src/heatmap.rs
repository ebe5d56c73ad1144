//! Speedup matrices: rows are message sizes, columns are reconfiguration
//! delays, cells are `baseline_total / candidate_total`.

use std::fmt::Write as _;
use std::time::Duration;

use crate::runner::SweepRow;
use crate::units;
use crate::RunError;

#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    pub message_bytes: Vec<u64>,
    /// Seconds.
    pub deltas: Vec<f64>,
    /// `speedup[i][j]` for `message_bytes[i]`, `deltas[j]`.
    pub speedup: Vec<Vec<f64>>,
    /// Candidate `R` per cell.
    pub reconfigs: Vec<Vec<usize>>,
    pub candidate: String,
    pub baseline: String,
}

fn axes(rows: &[SweepRow]) -> (Vec<u64>, Vec<f64>) {
    let mut ms = Vec::new();
    let mut ds: Vec<f64> = Vec::new();
    for r in rows {
        if !ms.contains(&r.m_bytes) {
            ms.push(r.m_bytes);
        }
        if !ds.contains(&r.delta) {
            ds.push(r.delta);
        }
    }
    (ms, ds)
}

fn series_name(rows: &[SweepRow]) -> String {
    rows.first().map(|r| format!("{}:{}", r.algorithm, r.n)).unwrap_or_default()
}

/// `normalize` divides each total by its row's `n` first; pass `false` for
/// tables that were written already normalized.
pub fn emit_heatmap(candidate: &[SweepRow], baseline: &[SweepRow], normalize: bool) -> Result<Heatmap, RunError> {
    if candidate.is_empty() {
        return Err(RunError::Grid("candidate table has no rows".into()));
    }
    if candidate.len() != baseline.len() {
        return Err(RunError::Grid(format!(
            "candidate has {} cells but baseline has {}",
            candidate.len(),
            baseline.len()
        )));
    }
    let (ms, ds) = axes(candidate);
    if ms.len() * ds.len() != candidate.len() {
        return Err(RunError::Grid("candidate table is not a full m × delta grid".into()));
    }
    let mut speedup = vec![vec![0.0; ds.len()]; ms.len()];
    let mut reconfigs = vec![vec![0; ds.len()]; ms.len()];
    for (c, b) in candidate.iter().zip(baseline) {
        if (c.m_bytes, c.delta) != (b.m_bytes, b.delta) {
            return Err(RunError::Grid(format!(
                "cell mismatch: candidate (m={}, delta={}) vs baseline (m={}, delta={})",
                c.m_bytes, c.delta, b.m_bytes, b.delta
            )));
        }
        let scale = |row: &SweepRow| if normalize { row.total / row.n as f64 } else { row.total };
        let i = ms.iter().position(|&m| m == c.m_bytes).expect("axis built from rows");
        let j = ds.iter().position(|&d| d == c.delta).expect("axis built from rows");
        speedup[i][j] = scale(b) / scale(c);
        reconfigs[i][j] = c.r;
    }
    Ok(Heatmap {
        message_bytes: ms,
        deltas: ds,
        speedup,
        reconfigs,
        candidate: series_name(candidate),
        baseline: series_name(baseline),
    })
}

impl Heatmap {
    fn matrix<T>(&self, cells: &[Vec<T>], fmt: impl Fn(&T) -> String) -> String {
        let mut out = String::from("m_bytes");
        for d in &self.deltas {
            write!(out, ",{d}").unwrap();
        }
        out.push('\n');
        for (m, row) in self.message_bytes.iter().zip(cells) {
            out.push_str(&m.to_string());
            for v in row {
                write!(out, ",{}", fmt(v)).unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Speedups to two decimals.
    pub fn to_csv(&self) -> String {
        self.matrix(&self.speedup, |v| format!("{v:.2}"))
    }

    /// Candidate `R` per cell, same layout as [`Heatmap::to_csv`].
    pub fn reconfigs_csv(&self) -> String {
        self.matrix(&self.reconfigs, usize::to_string)
    }

    /// Aligned table with `speedup (R)` cells and human-readable axes.
    pub fn render(&self) -> String {
        let label = |d: f64| units::format_duration(Duration::from_secs_f64(d));
        let width = 13;
        let mut out = format!("speedup of {} over {} (R in parentheses)\n", self.candidate, self.baseline);
        write!(out, "{:>8}", "m \\ δ").unwrap();
        for &d in &self.deltas {
            write!(out, "{:>width$}", label(d)).unwrap();
        }
        out.push('\n');
        for (i, &m) in self.message_bytes.iter().enumerate() {
            write!(out, "{:>8}", units::format_bytes(m)).unwrap();
            for j in 0..self.deltas.len() {
                let cell = format!("{:.2} ({})", self.speedup[i][j], self.reconfigs[i][j]);
                write!(out, "{cell:>width$}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}
