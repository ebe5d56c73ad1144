//! Experiment configuration: a flat TOML file plus command-line overrides.
//!
//! ```toml
//! algorithm = "retri"
//! n = 81
//! message_bytes = ["1KB", "1MB", "256MB"]
//! delta_seconds = ["1us", "1ms", "50ms"]
//! alpha_s = "1.7us"
//! alpha_h = "1us"
//! bandwidth_bits_per_s = "400Gbps"
//! reconfigs = "auto"
//! normalize_per_node = false
//!
//! [baseline]
//! algorithm = "direct"
//! n = 64
//! ```

use std::fmt;
use std::ops::Range;
use std::time::Duration;

use retri_core::{Algorithm, CostParams};
use serde::Deserialize;
use toml::Spanned;

use crate::units;

/// Message sizes of the default grid.
pub const DEFAULT_MESSAGE_BYTES: [u64; 9] = [
    1 << 10,
    8 << 10,
    64 << 10,
    512 << 10,
    1 << 20,
    4 << 20,
    8 << 20,
    64 << 20,
    256 << 20,
];

/// Reconfiguration delays of the default grid, in nanoseconds.
pub const DEFAULT_DELTA_NANOS: [u64; 6] = [1_000, 10_000, 100_000, 1_000_000, 10_000_000, 50_000_000];

pub const DEFAULT_ALPHA_S: Duration = Duration::from_nanos(1_700);
pub const DEFAULT_ALPHA_H: Duration = Duration::from_nanos(1_000);
pub const DEFAULT_BANDWIDTH_BITS_PER_S: f64 = 400e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reconfigs {
    Auto,
    Fixed(usize),
}

impl Reconfigs {
    pub fn parse(raw: &str) -> Result<Self, String> {
        match raw.trim() {
            "auto" => Ok(Reconfigs::Auto),
            other => other
                .parse()
                .map(Reconfigs::Fixed)
                .map_err(|_| format!("expected `auto` or a non-negative integer, got `{raw}`")),
        }
    }
}

impl fmt::Display for Reconfigs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reconfigs::Auto => f.write_str("auto"),
            Reconfigs::Fixed(r) => write!(f, "{r}"),
        }
    }
}

/// One evaluated algorithm-at-size, the candidate or the baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Series {
    pub algorithm: Algorithm,
    pub n: usize,
    pub reconfigs: Reconfigs,
}

impl Series {
    /// `algo:n[:reconfigs]`, as accepted by `--baseline`.
    pub fn parse(raw: &str) -> Result<Self, String> {
        let mut parts = raw.split(':');
        let algorithm = parts
            .next()
            .and_then(Algorithm::parse)
            .ok_or_else(|| format!("unknown algorithm in `{raw}`"))?;
        let n = parts
            .next()
            .ok_or_else(|| format!("missing node count in `{raw}` (expected algo:n)"))?
            .parse()
            .map_err(|_| format!("invalid node count in `{raw}`"))?;
        let reconfigs = parts.next().map(Reconfigs::parse).transpose()?.unwrap_or(Reconfigs::Auto);
        if parts.next().is_some() {
            return Err(format!("too many fields in `{raw}`"));
        }
        Ok(Self { algorithm, n, reconfigs })
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.algorithm, self.n, self.reconfigs)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub candidate: Series,
    pub message_bytes: Vec<u64>,
    pub deltas: Vec<Duration>,
    pub alpha_s: Duration,
    pub alpha_h: Duration,
    pub bandwidth_bits_per_s: f64,
    pub baseline: Option<Series>,
    pub normalize_per_node: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            candidate: Series {
                algorithm: Algorithm::Retri,
                n: 81,
                reconfigs: Reconfigs::Auto,
            },
            message_bytes: DEFAULT_MESSAGE_BYTES.to_vec(),
            deltas: DEFAULT_DELTA_NANOS.iter().map(|&ns| Duration::from_nanos(ns)).collect(),
            alpha_s: DEFAULT_ALPHA_S,
            alpha_h: DEFAULT_ALPHA_H,
            bandwidth_bits_per_s: DEFAULT_BANDWIDTH_BITS_PER_S,
            baseline: None,
            normalize_per_node: false,
        }
    }
}

impl ExperimentConfig {
    /// Model parameters at reconfiguration delay `delta`.
    pub fn params(&self, delta: Duration) -> CostParams {
        CostParams::from_bandwidth(
            self.alpha_s.as_secs_f64(),
            self.alpha_h.as_secs_f64(),
            self.bandwidth_bits_per_s,
            delta.as_secs_f64(),
        )
        .expect("validated on load")
    }

    /// Every setting, one `# key = value` line each, for output headers.
    pub fn header_lines(&self) -> Vec<String> {
        let list = |items: Vec<String>| format!("[{}]", items.join(", "));
        let mut lines = vec![
            format!("# algorithm = {}", self.candidate.algorithm),
            format!("# n = {}", self.candidate.n),
            format!("# reconfigs = {}", self.candidate.reconfigs),
            format!(
                "# message_bytes = {}",
                list(self.message_bytes.iter().map(|&b| units::format_bytes(b)).collect())
            ),
            format!(
                "# delta_seconds = {}",
                list(self.deltas.iter().map(|&d| units::format_duration(d)).collect())
            ),
            format!("# alpha_s = {}", units::format_duration(self.alpha_s)),
            format!("# alpha_h = {}", units::format_duration(self.alpha_h)),
            format!("# bandwidth_bits_per_s = {}", self.bandwidth_bits_per_s),
            format!("# normalize_per_node = {}", self.normalize_per_node),
        ];
        lines.push(match &self.baseline {
            Some(b) => format!("# baseline = {b}"),
            None => "# baseline = none".to_string(),
        });
        lines
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.message_bytes.is_empty() {
            return Err(ConfigError::field("message_bytes", "list must not be empty"));
        }
        if self.deltas.is_empty() {
            return Err(ConfigError::field("delta_seconds", "list must not be empty"));
        }
        if !(self.bandwidth_bits_per_s > 0.0 && self.bandwidth_bits_per_s.is_finite()) {
            return Err(ConfigError::field("bandwidth_bits_per_s", "must be positive"));
        }
        validate_series(&self.candidate, "")?;
        if let Some(b) = &self.baseline {
            validate_series(b, "baseline.")?;
        }
        Ok(())
    }
}

fn validate_series(series: &Series, prefix: &str) -> Result<(), ConfigError> {
    let min = if series.algorithm == Algorithm::Direct { 2 } else { 1 };
    if series.n < min {
        return Err(ConfigError::field(&format!("{prefix}n"), format!("must be at least {min}")));
    }
    if series.algorithm == Algorithm::Retri && series.n > 3usize.pow(retri_core::ternary::MAX_TERNARY_DIGITS as u32) {
        return Err(ConfigError::field(&format!("{prefix}n"), "at most 3^12 nodes are supported"));
    }
    if let Reconfigs::Fixed(r) = series.reconfigs {
        let max = match series.algorithm.radix() {
            Some(radix) => radix.phases_for(series.algorithm.executed_size(series.n)).saturating_sub(1),
            None => 0,
        };
        if r > max {
            return Err(ConfigError::field(
                &format!("{prefix}reconfigs"),
                format!("{r} exceeds the maximum of {max} for {} on {} nodes", series.algorithm, series.n),
            ));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub field: Option<String>,
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn field(field: &str, message: impl Into<String>) -> Self {
        Self {
            field: Some(field.to_string()),
            line: None,
            message: message.into(),
        }
    }

    fn at(mut self, source: &str, span: Range<usize>) -> Self {
        self.line = Some(line_of(source, span.start));
        self
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("config error")?;
        if let Some(line) = self.line {
            write!(f, " at line {line}")?;
        }
        if let Some(field) = &self.field {
            write!(f, " in `{field}`")?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for ConfigError {}

fn line_of(source: &str, offset: usize) -> usize {
    source[..offset.min(source.len())].matches('\n').count() + 1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Quantity {
    Int(i64),
    Float(f64),
    Text(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    Many(Vec<Quantity>),
    One(Quantity),
}

impl OneOrMany {
    fn into_vec(self) -> Vec<Quantity> {
        match self {
            OneOrMany::Many(v) => v,
            OneOrMany::One(q) => vec![q],
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSeries {
    algorithm: Option<Spanned<String>>,
    n: Option<Spanned<i64>>,
    reconfigs: Option<Spanned<Quantity>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    algorithm: Option<Spanned<String>>,
    n: Option<Spanned<i64>>,
    message_bytes: Option<Spanned<OneOrMany>>,
    delta_seconds: Option<Spanned<OneOrMany>>,
    alpha_s: Option<Spanned<Quantity>>,
    alpha_h: Option<Spanned<Quantity>>,
    bandwidth_bits_per_s: Option<Spanned<Quantity>>,
    reconfigs: Option<Spanned<Quantity>>,
    normalize_per_node: Option<bool>,
    baseline: Option<RawSeries>,
}

fn bytes_of(q: &Quantity) -> Result<u64, String> {
    match q {
        Quantity::Int(i) if *i >= 0 => Ok(*i as u64),
        Quantity::Text(t) => units::parse_bytes(t),
        _ => Err("expected a non-negative byte count such as 1024 or \"1KB\"".into()),
    }
}

fn duration_of(q: &Quantity) -> Result<Duration, String> {
    match q {
        Quantity::Int(i) => units::duration_from_seconds(*i as f64),
        Quantity::Float(f) => units::duration_from_seconds(*f),
        Quantity::Text(t) => units::parse_duration(t),
    }
}

fn rate_of(q: &Quantity) -> Result<f64, String> {
    match q {
        Quantity::Int(i) if *i > 0 => Ok(*i as f64),
        Quantity::Float(f) if *f > 0.0 => Ok(*f),
        Quantity::Text(t) => units::parse_rate(t),
        _ => Err("expected a positive rate such as \"400Gbps\"".into()),
    }
}

fn reconfigs_of(q: &Quantity) -> Result<Reconfigs, String> {
    match q {
        Quantity::Int(i) if *i >= 0 => Ok(Reconfigs::Fixed(*i as usize)),
        Quantity::Text(t) => Reconfigs::parse(t),
        _ => Err("expected `auto` or a non-negative integer".into()),
    }
}

fn convert<T, U>(
    source: &str,
    field: &str,
    value: &Spanned<T>,
    f: impl FnOnce(&T) -> Result<U, String>,
) -> Result<U, ConfigError> {
    f(value.get_ref()).map_err(|msg| ConfigError::field(field, msg).at(source, value.span()))
}

fn algorithm_of(source: &str, field: &str, value: &Spanned<String>) -> Result<Algorithm, ConfigError> {
    convert(source, field, value, |s| {
        Algorithm::parse(s).ok_or_else(|| format!("unknown algorithm `{s}` (expected retri, bruck or direct)"))
    })
}

fn nodes_of(source: &str, field: &str, value: &Spanned<i64>) -> Result<usize, ConfigError> {
    convert(source, field, value, |&n| {
        usize::try_from(n).map_err(|_| format!("node count must be positive, got {n}"))
    })
}

/// Parses a config file, falling back to the defaults field by field.
pub fn parse_config(source: &str) -> Result<ExperimentConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(source).map_err(|e| {
        let err = ConfigError {
            field: None,
            line: None,
            message: e.message().to_string(),
        };
        match e.span() {
            Some(span) => err.at(source, span),
            None => err,
        }
    })?;

    let mut cfg = ExperimentConfig::default();
    if let Some(v) = &raw.algorithm {
        cfg.candidate.algorithm = algorithm_of(source, "algorithm", v)?;
    }
    if let Some(v) = &raw.n {
        cfg.candidate.n = nodes_of(source, "n", v)?;
    }
    if let Some(v) = &raw.reconfigs {
        cfg.candidate.reconfigs = convert(source, "reconfigs", v, reconfigs_of)?;
    }
    if let Some(v) = &raw.message_bytes {
        cfg.message_bytes = convert(source, "message_bytes", v, |l| {
            l.clone().into_vec().iter().map(bytes_of).collect()
        })?;
    }
    if let Some(v) = &raw.delta_seconds {
        cfg.deltas = convert(source, "delta_seconds", v, |l| {
            l.clone().into_vec().iter().map(duration_of).collect()
        })?;
    }
    if let Some(v) = &raw.alpha_s {
        cfg.alpha_s = convert(source, "alpha_s", v, duration_of)?;
    }
    if let Some(v) = &raw.alpha_h {
        cfg.alpha_h = convert(source, "alpha_h", v, duration_of)?;
    }
    if let Some(v) = &raw.bandwidth_bits_per_s {
        cfg.bandwidth_bits_per_s = convert(source, "bandwidth_bits_per_s", v, rate_of)?;
    }
    if let Some(v) = raw.normalize_per_node {
        cfg.normalize_per_node = v;
    }
    if let Some(b) = &raw.baseline {
        let algorithm = b
            .algorithm
            .as_ref()
            .map(|v| algorithm_of(source, "baseline.algorithm", v))
            .transpose()?
            .ok_or_else(|| ConfigError::field("baseline.algorithm", "required when [baseline] is present"))?;
        let n = match &b.n {
            Some(v) => nodes_of(source, "baseline.n", v)?,
            None => cfg.candidate.n,
        };
        let reconfigs = b
            .reconfigs
            .as_ref()
            .map(|v| convert(source, "baseline.reconfigs", v, reconfigs_of))
            .transpose()?
            .unwrap_or(Reconfigs::Auto);
        cfg.baseline = Some(Series { algorithm, n, reconfigs });
    }

    cfg.validate().map_err(|e| locate(e, source, &raw))?;
    Ok(cfg)
}

/// Attaches the line of the offending key to a validation error.
fn locate(mut err: ConfigError, source: &str, raw: &RawConfig) -> ConfigError {
    let span = match err.field.as_deref() {
        Some("n") => raw.n.as_ref().map(Spanned::span),
        Some("reconfigs") => raw.reconfigs.as_ref().map(Spanned::span),
        Some("message_bytes") => raw.message_bytes.as_ref().map(Spanned::span),
        Some("delta_seconds") => raw.delta_seconds.as_ref().map(Spanned::span),
        Some("baseline.n") => raw.baseline.as_ref().and_then(|b| b.n.as_ref()).map(Spanned::span),
        Some("baseline.reconfigs") => raw.baseline.as_ref().and_then(|b| b.reconfigs.as_ref()).map(Spanned::span),
        _ => None,
    };
    if let Some(span) = span {
        err.line = Some(line_of(source, span.start));
    }
    err
}

/// Command-line overrides applied on top of a file or the defaults.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub algorithm: Option<String>,
    pub n: Option<usize>,
    pub message_bytes: Option<Vec<String>>,
    pub deltas: Option<Vec<String>>,
    pub reconfigs: Option<String>,
    pub baseline: Option<String>,
    pub normalize: bool,
}

impl Overrides {
    pub fn apply(&self, mut cfg: ExperimentConfig) -> Result<ExperimentConfig, ConfigError> {
        let flag = |name: &str, msg: String| ConfigError::field(&format!("--{name}"), msg);
        if let Some(a) = &self.algorithm {
            cfg.candidate.algorithm =
                Algorithm::parse(a).ok_or_else(|| flag("algo", format!("unknown algorithm `{a}`")))?;
        }
        if let Some(n) = self.n {
            cfg.candidate.n = n;
        }
        if let Some(list) = &self.message_bytes {
            cfg.message_bytes = list
                .iter()
                .map(|s| units::parse_bytes(s))
                .collect::<Result<_, _>>()
                .map_err(|e| flag("msg-bytes", e))?;
        }
        if let Some(list) = &self.deltas {
            cfg.deltas = list
                .iter()
                .map(|s| units::parse_duration(s))
                .collect::<Result<_, _>>()
                .map_err(|e| flag("delta", e))?;
        }
        if let Some(r) = &self.reconfigs {
            cfg.candidate.reconfigs = Reconfigs::parse(r).map_err(|e| flag("reconfigs", e))?;
        }
        if let Some(b) = &self.baseline {
            cfg.baseline = if b == "none" {
                None
            } else {
                Some(Series::parse(b).map_err(|e| flag("baseline", e))?)
            };
        }
        if self.normalize {
            cfg.normalize_per_node = true;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
