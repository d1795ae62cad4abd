//! Closed real intervals with a fixed outward-rounding slack.
//!
//! Every arithmetic operation widens its result by [`OUTWARD`] on both sides,
//! so an enclosure computed with a handful of floating-point steps stays an
//! enclosure despite rounding error. The slack is absolute, which is adequate
//! for the quantities handled here (proportions and utilities of order one).

use std::fmt;
use std::ops::{Add, Sub};

use crate::error::{Error, Result};

/// Outward rounding applied per operation.
pub const OUTWARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::Parameter(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    /// The degenerate interval `[x, x]`.
    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    /// `[center - radius, center + radius]`, rounded outward.
    pub fn around(center: f64, radius: f64) -> Self {
        let r = radius.abs();
        Interval {
            lo: center - r - OUTWARD,
            hi: center + r + OUTWARD,
        }
    }

    /// Hull of two values in either order, rounded outward.
    pub fn hull(a: f64, b: f64) -> Self {
        Interval {
            lo: a.min(b) - OUTWARD,
            hi: a.max(b) + OUTWARD,
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Widen by `slack` on each side (plus the rounding slack).
    pub fn widen(&self, slack: f64) -> Self {
        let s = slack.abs() + OUTWARD;
        Interval {
            lo: self.lo - s,
            hi: self.hi + s,
        }
    }

    /// Multiply by a scalar.
    pub fn scale(&self, k: f64) -> Self {
        let (a, b) = (self.lo * k, self.hi * k);
        Interval::hull(a, b)
    }

    /// Add a scalar.
    pub fn shift(&self, c: f64) -> Self {
        Interval {
            lo: self.lo + c - OUTWARD,
            hi: self.hi + c + OUTWARD,
        }
    }

    /// Intersect with `[lo, hi]`; used to keep proportion enclosures in
    /// `[0, 1]`.
    pub fn clamp(&self, lo: f64, hi: f64) -> Self {
        Interval {
            lo: self.lo.max(lo).min(hi),
            hi: self.hi.min(hi).max(lo),
        }
    }
}

impl Add for Interval {
    type Output = Interval;

    fn add(self, rhs: Interval) -> Interval {
        Interval {
            lo: self.lo + rhs.lo - OUTWARD,
            hi: self.hi + rhs.hi + OUTWARD,
        }
    }
}

impl Sub for Interval {
    type Output = Interval;

    fn sub(self, rhs: Interval) -> Interval {
        Interval {
            lo: self.lo - rhs.hi - OUTWARD,
            hi: self.hi - rhs.lo + OUTWARD,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
