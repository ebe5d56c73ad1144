//! Human-readable quantities: byte sizes, durations and link rates.
//!
//! Byte suffixes are binary (`1KB = 1KiB = 1024 B`); rate suffixes are
//! decimal (`400Gbps = 400e9 bit/s`). Durations are kept as whole
//! nanoseconds so values such as `1.7us` are exact.

use std::time::Duration;

fn split_number(raw: &str) -> Option<(f64, &str)> {
    let raw = raw.trim();
    let end = raw
        .find(|c: char| !(c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || c == '-' || c == '+'))
        .unwrap_or(raw.len());
    // "1e" followed by a unit letter: back off so "e" is not eaten as exponent
    let (mut num, mut unit) = raw.split_at(end);
    if num.ends_with(['e', 'E']) {
        num = &num[..num.len() - 1];
        unit = &raw[num.len()..];
    }
    let value: f64 = num.parse().ok()?;
    Some((value, unit.trim()))
}

pub fn parse_bytes(raw: &str) -> Result<u64, String> {
    let (value, unit) = split_number(raw).ok_or_else(|| format!("cannot parse byte size `{raw}`"))?;
    let scale: u64 = match unit.to_ascii_lowercase().as_str() {
        "" | "b" => 1,
        "k" | "kb" | "kib" => 1 << 10,
        "m" | "mb" | "mib" => 1 << 20,
        "g" | "gb" | "gib" => 1 << 30,
        _ => return Err(format!("unknown byte unit `{unit}` in `{raw}`")),
    };
    let bytes = value * scale as f64;
    if !(bytes >= 0.0 && bytes.is_finite()) || bytes.fract() != 0.0 {
        return Err(format!("byte size `{raw}` must be a non-negative whole number of bytes"));
    }
    Ok(bytes as u64)
}

/// A bare number is taken as seconds.
pub fn parse_duration(raw: &str) -> Result<Duration, String> {
    let (value, unit) = split_number(raw).ok_or_else(|| format!("cannot parse duration `{raw}`"))?;
    let nanos_per_unit = match unit {
        "" | "s" => 1e9,
        "ms" => 1e6,
        "us" | "µs" | "μs" => 1e3,
        "ns" => 1.0,
        _ => return Err(format!("unknown time unit `{unit}` in `{raw}`")),
    };
    seconds_like(value * nanos_per_unit, raw)
}

pub fn duration_from_seconds(seconds: f64) -> Result<Duration, String> {
    seconds_like(seconds * 1e9, &seconds.to_string())
}

fn seconds_like(nanos: f64, raw: &str) -> Result<Duration, String> {
    if !(nanos >= 0.0 && nanos.is_finite()) {
        return Err(format!("duration `{raw}` must be non-negative"));
    }
    Ok(Duration::from_nanos(nanos.round() as u64))
}

/// Link rate in bits per second.
pub fn parse_rate(raw: &str) -> Result<f64, String> {
    let (value, unit) = split_number(raw).ok_or_else(|| format!("cannot parse rate `{raw}`"))?;
    let scale = match unit.to_ascii_lowercase().as_str() {
        "" | "bps" | "b/s" => 1.0,
        "kbps" => 1e3,
        "mbps" => 1e6,
        "gbps" => 1e9,
        "tbps" => 1e12,
        _ => return Err(format!("unknown rate unit `{unit}` in `{raw}`")),
    };
    let rate = value * scale;
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(format!("rate `{raw}` must be positive"));
    }
    Ok(rate)
}

pub fn format_bytes(bytes: u64) -> String {
    for (unit, scale) in [("GB", 1u64 << 30), ("MB", 1 << 20), ("KB", 1 << 10)] {
        if bytes >= scale && bytes.is_multiple_of(scale) {
            return format!("{}{unit}", bytes / scale);
        }
    }
    format!("{bytes}B")
}

pub fn format_duration(d: Duration) -> String {
    let nanos = d.as_nanos();
    for (unit, scale) in [("s", 1_000_000_000u128), ("ms", 1_000_000), ("us", 1_000)] {
        if nanos >= scale && nanos.is_multiple_of(scale) {
            return format!("{}{unit}", nanos / scale);
        }
    }
    if nanos >= 1_000 {
        return format!("{}us", nanos as f64 / 1e3);
    }
    format!("{nanos}ns")
}
