//! Integer machinery shared by every schedule: centered residues, balanced
//! ternary and binary digit expansions, and the per-phase peer function.
//!
//! Digits are stored least-significant first, so digit `k` is the one
//! consumed by phase `k`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest ternary exponent supported (`3^12 = 531441` nodes).
pub const MAX_TERNARY_DIGITS: usize = 12;

/// Base of the phase structure: 3 for the balanced ternary schedule, 2 for Bruck.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Radix {
    Binary,
    Ternary,
}

impl Radix {
    pub const fn value(self) -> usize {
        match self {
            Radix::Binary => 2,
            Radix::Ternary => 3,
        }
    }

    /// `radix^k`.
    pub fn pow(self, k: usize) -> usize {
        self.value().pow(k as u32)
    }

    /// `⌈log_radix n⌉`, the number of phases needed to reach `n` nodes.
    pub fn phases_for(self, n: usize) -> usize {
        let mut s = 0;
        let mut reach = 1usize;
        while reach < n {
            reach *= self.value();
            s += 1;
        }
        s
    }

    pub fn is_power(self, n: usize) -> bool {
        n >= 1 && self.pow(self.phases_for(n)) == n
    }

    /// Smallest power of the radix that is `>= n`.
    pub fn next_power(self, n: usize) -> usize {
        self.pow(self.phases_for(n))
    }

    /// `Σ_{t<r} radix^t`: hop distance accumulated over a segment of `r` phases.
    pub fn geometric_sum(self, r: usize) -> usize {
        (self.pow(r) - 1) / (self.value() - 1)
    }
}

impl fmt::Display for Radix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Node count, radix and the derived phase count `s = ⌈log_radix n⌉`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingConfig {
    pub n: usize,
    pub radix: Radix,
    pub phases: usize,
}

impl RingConfig {
    pub fn new(n: usize, radix: Radix) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidNodeCount {
                n,
                reason: "a ring needs at least one node",
            });
        }
        Ok(Self {
            n,
            radix,
            phases: radix.phases_for(n),
        })
    }

    /// Config that must already be a power of the radix.
    pub fn canonical(n: usize, radix: Radix) -> Result<Self> {
        if !radix.is_power(n) {
            return Err(Error::NotPowerOf { n, radix });
        }
        Self::new(n, radix)
    }

    pub fn is_canonical(&self) -> bool {
        self.radix.is_power(self.n)
    }

    /// The canonical config of the next power of the radix.
    pub fn padded(&self) -> Self {
        Self {
            n: self.radix.next_power(self.n),
            ..*self
        }
    }
}

/// Signed offset in `[-(n-1)/2, (n-1)/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CenteredOffset(pub i64);

impl CenteredOffset {
    pub fn value(self) -> i64 {
        self.0
    }
}

/// One balanced ternary digit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Trit {
    Neg,
    Zero,
    Pos,
}

impl Trit {
    pub const ALL: [Trit; 3] = [Trit::Neg, Trit::Zero, Trit::Pos];

    pub fn value(self) -> i64 {
        match self {
            Trit::Neg => -1,
            Trit::Zero => 0,
            Trit::Pos => 1,
        }
    }
}

/// Balanced ternary expansion, least significant digit first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BalancedDigits(pub Vec<Trit>);

impl BalancedDigits {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn digit(&self, k: usize) -> Trit {
        self.0[k]
    }

    /// Displacement accumulated by the phases before `k`: `Σ_{ℓ<k} τ_ℓ 3^ℓ`.
    pub fn prefix_offset(&self, k: usize) -> i64 {
        self.0[..k]
            .iter()
            .enumerate()
            .map(|(l, t)| t.value() * 3i64.pow(l as u32))
            .sum()
    }
}

/// Unsigned base-2 expansion, least significant bit first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryDigits(pub Vec<bool>);

impl BinaryDigits {
    pub fn bit(&self, k: usize) -> bool {
        self.0[k]
    }

    /// `Σ_{ℓ<k} bit_ℓ 2^ℓ`.
    pub fn prefix_offset(&self, k: usize) -> usize {
        self.0[..k]
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(l, _)| 1usize << l)
            .sum()
    }
}

/// Unique centered representative of `offset` modulo odd `n`.
pub fn ucr(offset: i64, n: usize) -> Result<CenteredOffset> {
    if n.is_multiple_of(2) {
        return Err(Error::EvenModulus { n });
    }
    if offset < 0 || offset >= n as i64 {
        return Err(Error::OffsetOutOfRange { offset, n });
    }
    let half = (n as i64 - 1) / 2;
    Ok(CenteredOffset(if offset > half {
        offset - n as i64
    } else {
        offset
    }))
}

/// Centered offset of the pair `(source, destination)` on an odd ring.
pub fn centered_pair_offset(source: usize, destination: usize, n: usize) -> Result<CenteredOffset> {
    let raw = (destination as i64 - source as i64).rem_euclid(n as i64);
    ucr(raw, n)
}

/// Balanced ternary digits of `delta` using exactly `s` digits.
pub fn balanced_ternary_digits(delta: CenteredOffset, s: usize) -> Result<BalancedDigits> {
    let limit = (3i64.pow(s as u32) - 1) / 2;
    if s > MAX_TERNARY_DIGITS || delta.0.abs() > limit {
        return Err(Error::NotRepresentable {
            delta: delta.0,
            digits: s,
        });
    }
    let mut rest = delta.0;
    let mut digits = Vec::with_capacity(s);
    for _ in 0..s {
        let digit = match rest.rem_euclid(3) {
            0 => Trit::Zero,
            1 => Trit::Pos,
            _ => Trit::Neg,
        };
        rest = (rest - digit.value()) / 3;
        digits.push(digit);
    }
    debug_assert_eq!(rest, 0);
    Ok(BalancedDigits(digits))
}

/// `Σ τ_k 3^k`.
pub fn digits_to_offset(digits: &BalancedDigits) -> i64 {
    digits.prefix_offset(digits.len())
}

/// Left and right peers of node `r` in phase `k`: `r ∓ 3^k mod n`.
pub fn peers(r: usize, k: usize, n: usize) -> (usize, usize) {
    peers_with_radix(r, k, n, Radix::Ternary)
}

/// Peers at offset `∓ radix^k`; the binary form is the mirrored Bruck analog.
pub fn peers_with_radix(r: usize, k: usize, n: usize, radix: Radix) -> (usize, usize) {
    let step = pow_mod(radix.value(), k, n);
    ((r + n - step) % n, (r + step) % n)
}

fn pow_mod(base: usize, exp: usize, n: usize) -> usize {
    (0..exp).fold(1 % n, |acc, _| acc * base % n)
}

/// Binary digits of `offset` on a ring of `n = 2^s` nodes.
pub fn binary_digits(offset: usize, s: usize) -> Result<BinaryDigits> {
    let n = 1usize << s;
    if offset >= n {
        return Err(Error::OffsetOutOfRange {
            offset: offset as i64,
            n,
        });
    }
    Ok(BinaryDigits((0..s).map(|k| offset >> k & 1 == 1).collect()))
}
