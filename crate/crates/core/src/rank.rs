//! Vertex and edge identities, and the fixed-point rank space.
//!
//! A rank is a 64-bit fixed-point number in `[0, 1)` carrying the key of the
//! edge it belongs to as a tie-break, so two distinct edges never compare
//! equal even if their random bits collide.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Index of a vertex in the fixed universe `[0, n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for VertexId {
    fn from(v: u32) -> Self {
        VertexId(v)
    }
}

/// Canonical unordered vertex pair with `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeKey {
    lo: VertexId,
    hi: VertexId,
}

impl EdgeKey {
    /// Smallest possible key; used as the tie-break of threshold ranks.
    pub(crate) const MIN: EdgeKey = EdgeKey { lo: VertexId(0), hi: VertexId(0) };
    /// Larger than every real key; used as the tie-break of the sentinel rank.
    pub(crate) const MAX: EdgeKey = EdgeKey { lo: VertexId(u32::MAX), hi: VertexId(u32::MAX) };

    /// Canonicalizes `{u, v}`. Returns `None` for a self-loop.
    pub fn new(u: VertexId, v: VertexId) -> Option<EdgeKey> {
        match u.cmp(&v) {
            std::cmp::Ordering::Less => Some(EdgeKey { lo: u, hi: v }),
            std::cmp::Ordering::Greater => Some(EdgeKey { lo: v, hi: u }),
            std::cmp::Ordering::Equal => None,
        }
    }

    /// Convenience constructor for tests and generators; panics on a loop.
    pub fn of(u: u32, v: u32) -> EdgeKey {
        EdgeKey::new(VertexId(u), VertexId(v)).expect("self-loop edge key")
    }

    #[inline]
    pub fn lo(self) -> VertexId {
        self.lo
    }

    #[inline]
    pub fn hi(self) -> VertexId {
        self.hi
    }

    #[inline]
    pub fn endpoints(self) -> [VertexId; 2] {
        [self.lo, self.hi]
    }

    /// The endpoint that is not `v`. `v` must be an endpoint.
    #[inline]
    pub fn other(self, v: VertexId) -> VertexId {
        debug_assert!(v == self.lo || v == self.hi);
        if v == self.lo {
            self.hi
        } else {
            self.lo
        }
    }

    #[inline]
    pub fn contains(self, v: VertexId) -> bool {
        v == self.lo || v == self.hi
    }
}

impl fmt::Display for EdgeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

/// A point of `[0, 1]` in 64-bit fixed point, totally ordered by
/// `(value, tiebreak)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Rank {
    value: u64,
    tiebreak: EdgeKey,
}

const TWO_POW_64: f64 = 18_446_744_073_709_551_616.0;

impl Rank {
    /// The sentinel "1": above every edge rank. Unmatched vertices carry it.
    pub const ONE: Rank = Rank { value: u64::MAX, tiebreak: EdgeKey::MAX };
    /// Below every edge rank.
    pub const ZERO: Rank = Rank { value: 0, tiebreak: EdgeKey::MIN };

    pub fn new(value: u64, tiebreak: EdgeKey) -> Rank {
        Rank { value, tiebreak }
    }

    /// Lowest rank whose value is `value`: `r >= Rank::floor(x)` iff
    /// `r.value() >= x`.
    pub fn floor(value: u64) -> Rank {
        Rank { value, tiebreak: EdgeKey::MIN }
    }

    /// Fixed-point image of a real in `[0, 1]`, saturating at the top.
    pub fn fixed_from_f64(x: f64) -> u64 {
        if x.is_nan() || x <= 0.0 {
            0
        } else if x >= 1.0 {
            u64::MAX
        } else {
            let scaled = (x * TWO_POW_64).floor();
            if scaled >= TWO_POW_64 {
                u64::MAX
            } else {
                scaled as u64
            }
        }
    }

    /// Rank with the given real value for `key`; mostly for tests.
    pub fn from_f64(x: f64, key: EdgeKey) -> Rank {
        Rank::new(Rank::fixed_from_f64(x), key)
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.value
    }

    #[inline]
    pub fn tiebreak(self) -> EdgeKey {
        self.tiebreak
    }

    #[inline]
    pub fn is_one(self) -> bool {
        self == Rank::ONE
    }

    pub fn as_f64(self) -> f64 {
        if self.is_one() {
            1.0
        } else {
            self.value as f64 / TWO_POW_64
        }
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            write!(f, "1")
        } else {
            write!(f, "{:.6}@{}", self.as_f64(), self.tiebreak)
        }
    }
}
