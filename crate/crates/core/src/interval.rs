//! Intervals on the line and points of the upper half-plane.

use crate::error::WeightError;
use crate::Result;

/// A nondegenerate bounded interval `(lo, hi)`, `lo < hi`.
///
/// Endpoints are finite; construction enforces both. All analysis
/// operations treat intervals as open/closed interchangeably — masses of
/// endpoints are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    /// Build an interval; panics on non-finite or misordered endpoints.
    ///
    /// Use [`Interval::try_new`] for data that has not been validated yet
    /// (config parsing does).
    pub fn new(lo: f64, hi: f64) -> Self {
        match Self::try_new(lo, hi) {
            Ok(i) => i,
            Err(e) => panic!("Interval::new({lo}, {hi}): {e}"),
        }
    }

    /// Fallible constructor for unvalidated endpoint data.
    pub fn try_new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(WeightError::InvalidParameter(format!(
                "interval endpoints must be finite, got [{lo}, {hi}]"
            )));
        }
        if lo >= hi {
            return Err(WeightError::InvalidParameter(format!(
                "interval endpoints must satisfy lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        self.lo + 0.5 * (self.hi - self.lo)
    }

    /// Left half `(lo, mid)`.
    pub fn left_half(&self) -> Interval {
        Interval { lo: self.lo, hi: self.midpoint() }
    }

    /// Right half `(mid, hi)`.
    pub fn right_half(&self) -> Interval {
        Interval { lo: self.midpoint(), hi: self.hi }
    }

    pub fn contains_point(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Interval translated by `dx`.
    pub fn translated(&self, dx: f64) -> Interval {
        Interval { lo: self.lo + dx, hi: self.hi + dx }
    }

    /// The adjacent interval of equal length sitting immediately to the right.
    pub fn right_neighbor(&self) -> Interval {
        Interval { lo: self.hi, hi: self.hi + self.length() }
    }

    /// Lexicographic key used for deterministic tie-breaking in sweeps.
    pub fn order_key(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
}

/// A point `z = (x, y)` of the upper half-plane, `y > 0`.
///
/// `x` is the center and `y` the height; the associated base interval is
/// `I_z = (x - y/2, x + y/2)`, so `|I_z| = y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxPoint {
    x: f64,
    y: f64,
}

impl BoxPoint {
    /// Build a half-plane point; panics on `y <= 0` or non-finite data.
    pub fn new(x: f64, y: f64) -> Self {
        match Self::try_new(x, y) {
            Ok(z) => z,
            Err(e) => panic!("BoxPoint::new({x}, {y}): {e}"),
        }
    }

    /// Fallible constructor for unvalidated data.
    pub fn try_new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(WeightError::InvalidParameter(format!(
                "box point coordinates must be finite, got ({x}, {y})"
            )));
        }
        if y <= 0.0 {
            return Err(WeightError::InvalidParameter(format!(
                "box point height must be positive, got ({x}, {y})"
            )));
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    /// Base interval `I_z = (x - y/2, x + y/2)`.
    pub fn interval(&self) -> Interval {
        Interval::new(self.x - 0.5 * self.y, self.x + 0.5 * self.y)
    }

    /// Left half of the base interval, `(x - y/2, x)`.
    pub fn left_half(&self) -> Interval {
        Interval::new(self.x - 0.5 * self.y, self.x)
    }

    /// Right half of the base interval, `(x, x + y/2)`.
    pub fn right_half(&self) -> Interval {
        Interval::new(self.x, self.x + 0.5 * self.y)
    }

    /// Lexicographic key used for deterministic tie-breaking in sweeps.
    pub fn order_key(&self) -> (f64, f64) {
        (self.x, self.y)
    }
}

/// Dyadic tiling of the box over `base`: for each level `k = 1..=depth`
/// the `2^k` points whose base intervals are the level-`k` dyadic
/// subintervals of `base` (height `|base| / 2^k`).
///
/// The total count at depth `d` is `2^(d+1) - 2`.
pub fn dyadic_boxes(base: Interval, depth: u32) -> Vec<BoxPoint> {
    let mut out = Vec::new();
    let len = base.length();
    for k in 1..=depth {
        let pieces = 1u64 << k;
        let h = len / pieces as f64;
        for j in 0..pieces {
            let lo = base.lo() + j as f64 * h;
            out.push(BoxPoint::new(lo + 0.5 * h, h));
        }
    }
    out
}
