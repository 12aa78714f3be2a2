//! Deterministic search drivers shared by the oscillation, doubling, and
//! box-density analyses.
//!
//! Every extremal quantity in this crate is a supremum over a family of
//! intervals or boxes.  The drivers here fix, once and for all, how those
//! families are discretised: translation grids stepped by a fixed fraction of
//! the object length, hard caps on the number of positions per scale, and a
//! first-wins tie rule so that reruns produce byte-identical witnesses.

use crate::interval::Interval;

/// Default number of steps per object length when translating test objects.
pub const DEFAULT_STEP_DIVISOR: u32 = 8;

/// Default cap on translation positions examined per scale.
pub const DEFAULT_MAX_POSITIONS: usize = 4096;

/// Controls how densely a sweep translates its test objects.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPolicy {
    /// The translation step is `length / step_divisor`.
    pub step_divisor: u32,
    /// Upper bound on positions per scale; when the stepped grid would
    /// exceed it, the step widens to cover the same span with this many.
    pub max_positions: usize,
}

impl Default for SweepPolicy {
    fn default() -> Self {
        Self { step_divisor: DEFAULT_STEP_DIVISOR, max_positions: DEFAULT_MAX_POSITIONS }
    }
}

impl SweepPolicy {
    pub fn new(step_divisor: u32, max_positions: usize) -> Self {
        Self { step_divisor: step_divisor.max(1), max_positions: max_positions.max(2) }
    }

    pub fn with_max_positions(self, max_positions: usize) -> Self {
        Self { max_positions: max_positions.max(2), ..self }
    }
}

/// Logarithmically spaced scales from `lo` to `hi`, ascending.
///
/// `count == 1` yields just `hi` (the coarsest requested scale).
pub fn log_spaced_scales(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > 0.0 && hi >= lo, "scale range must be positive and ordered");
    if count <= 1 || lo == hi {
        return vec![hi];
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let t = k as f64 / (count - 1) as f64;
        out.push((llo + t * (lhi - llo)).exp());
    }
    out[0] = lo;
    out[count - 1] = hi;
    out
}

/// Left endpoints for subintervals of `length` translated across `window`.
///
/// The grid starts flush left, steps by `length / step_divisor` (widened if
/// the cap would be exceeded), and always ends flush right so both extreme
/// placements are examined.  Empty when `length` exceeds the window.
pub fn interval_starts(window: Interval, length: f64, policy: SweepPolicy) -> Vec<f64> {
    let span = window.length() - length;
    if !(length > 0.0) || span < 0.0 {
        return Vec::new();
    }
    if span == 0.0 {
        return vec![window.lo()];
    }
    let mut step = length / policy.step_divisor as f64;
    let mut steps = (span / step).ceil() as usize;
    if steps + 1 > policy.max_positions {
        steps = policy.max_positions - 1;
        step = span / steps as f64;
    }
    let mut out = Vec::with_capacity(steps + 1);
    for k in 0..steps {
        out.push(window.lo() + k as f64 * step);
    }
    out.push(window.lo() + span); // flush right, exact
    out
}

/// Centers for boxes of height `y` whose base interval stays inside `window`.
pub fn box_centers(window: Interval, y: f64, policy: SweepPolicy) -> Vec<f64> {
    interval_starts(window, y, policy).into_iter().map(|lo| lo + y / 2.0).collect()
}

/// Running supremum with the witness of the first position attaining it.
///
/// `offer` keeps the incumbent on ties, so sweeping positions left to right
/// yields the leftmost maximiser — the determinism contract for witnesses.
#[derive(Debug, Clone, Copy)]
pub struct Supremum<W: Copy> {
    value: f64,
    witness: Option<W>,
}

impl<W: Copy> Default for Supremum<W> {
    fn default() -> Self {
        Self { value: f64::NEG_INFINITY, witness: None }
    }
}

impl<W: Copy> Supremum<W> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn offer(&mut self, value: f64, witness: W) {
        if self.witness.is_none() || value > self.value {
            self.value = value;
            self.witness = Some(witness);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.witness.is_none()
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn witness(&self) -> Option<W> {
        self.witness
    }

    /// Fold another accumulator in, preserving the first-wins rule when the
    /// other was built from later positions.
    pub fn merge(&mut self, other: Self) {
        if let Some(w) = other.witness {
            self.offer(other.value, w);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scales_are_log_spaced_and_pinned() {
        let s = log_spaced_scales(0.01, 0.5, 9);
        assert_eq!(s.len(), 9);
        assert_eq!(s[0], 0.01);
        assert_eq!(s[8], 0.5);
        for pair in s.windows(2) {
            assert!(pair[1] > pair[0]);
        }
        // constant ratio between consecutive scales
        let r0 = s[1] / s[0];
        for pair in s.windows(2) {
            assert!((pair[1] / pair[0] - r0).abs() < 1e-12);
        }
        assert_eq!(log_spaced_scales(0.25, 0.25, 5), vec![0.25]);
    }

    #[test]
    fn interval_grid_covers_flush_ends() {
        let w = Interval::new(-1.0, 1.0);
        let starts = interval_starts(w, 0.5, SweepPolicy::default());
        assert_eq!(starts[0], -1.0);
        assert_eq!(*starts.last().unwrap(), 0.5);
        // step = length/8 over span 1.5 → 24 steps + flush right
        assert_eq!(starts.len(), 25);
        for pair in starts.windows(2) {
            assert!(pair[1] > pair[0]);
        }
    }

    #[test]
    fn interval_grid_respects_cap() {
        let w = Interval::new(0.0, 1000.0);
        let policy = SweepPolicy::new(8, 64);
        let starts = interval_starts(w, 0.01, policy);
        assert_eq!(starts.len(), 64);
        assert_eq!(starts[0], 0.0);
        assert!((starts.last().unwrap() - 999.99).abs() < 1e-9);
    }

    #[test]
    fn oversized_length_gives_empty_sweep() {
        let w = Interval::new(0.0, 1.0);
        assert!(interval_starts(w, 2.0, SweepPolicy::default()).is_empty());
        assert_eq!(interval_starts(w, 1.0, SweepPolicy::default()), vec![0.0]);
    }

    #[test]
    fn supremum_keeps_first_maximiser() {
        let mut s = Supremum::new();
        s.offer(1.0, 'a');
        s.offer(2.0, 'b');
        s.offer(2.0, 'c'); // tie: incumbent stays
        s.offer(1.5, 'd');
        assert_eq!(s.value(), 2.0);
        assert_eq!(s.witness(), Some('b'));

        let mut empty: Supremum<char> = Supremum::new();
        assert!(empty.is_empty());
        empty.merge(s);
        assert_eq!(empty.witness(), Some('b'));
    }

    #[test]
    fn negative_values_still_tracked() {
        let mut s = Supremum::new();
        s.offer(-3.0, 0);
        assert_eq!(s.value(), -3.0);
        assert_eq!(s.witness(), Some(0));
    }
}
