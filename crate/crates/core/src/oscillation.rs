//! Mean oscillation of `log w`: BMO norms, vanishing-oscillation profiles,
//! exponential distribution tails, and the two reverse-Jensen ratio
//! functionals whose small-scale limits characterise vanishing oscillation.
//!
//! All suprema are certified lower bounds: each profile value is the maximum
//! over an explicit finite sweep of test intervals, reported with the witness
//! interval that attained it.  Profiles are restricted suprema over interval
//! lengths `<= δ`, so they are monotone in δ by construction.

use crate::interval::Interval;
use crate::quadrature::KahanSum;
use crate::sweep::{interval_starts, Supremum, SweepPolicy};
use crate::weight::WeightHandle;
use crate::{Result, WeightError};

/// Default quadrature panels per interval when the weight has no natural grid.
pub const DEFAULT_OSC_PANELS: usize = 512;

/// One scale of a restricted-supremum profile.
#[derive(Debug, Clone, Copy)]
pub struct ProfilePoint {
    /// Length bound δ for this entry.
    pub scale: f64,
    /// Supremum of the functional over tested intervals with length ≤ δ.
    pub value: f64,
    /// Interval attaining `value` (leftmost-first under the sweep order).
    pub witness: Option<Interval>,
    /// True when some tested interval at this scale had a divergent
    /// functional; `value` then covers only the finite evaluations.
    pub diverged: bool,
}

/// Restricted-supremum profile v(δ) over decreasing scales δ.
#[derive(Debug, Clone)]
pub struct OscillationProfile {
    /// Human-readable functional tag ("mean-oscillation", "sarason", …).
    pub functional: &'static str,
    /// Structural lower bound of the functional (0 for oscillation,
    /// 1 for the ratio functionals).
    pub floor: f64,
    /// Entries in strictly decreasing scale order.
    pub points: Vec<ProfilePoint>,
}

impl OscillationProfile {
    pub fn scales(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.scale).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    /// Entry at the smallest computed scale.
    pub fn smallest(&self) -> &ProfilePoint {
        self.points.last().expect("profile has at least one scale")
    }

    /// Entry at the largest computed scale (the whole-sweep supremum).
    pub fn largest(&self) -> &ProfilePoint {
        self.points.first().expect("profile has at least one scale")
    }

    /// Distance above the structural floor at the smallest scale.
    pub fn excess_at_smallest(&self) -> f64 {
        (self.smallest().value - self.floor).max(0.0)
    }

    /// Distance above the floor for the k-th smallest scale (0 = smallest).
    pub fn excess_at(&self, k_from_smallest: usize) -> Option<f64> {
        let n = self.points.len();
        if k_from_smallest >= n {
            return None;
        }
        Some((self.points[n - 1 - k_from_smallest].value - self.floor).max(0.0))
    }

    pub fn any_diverged(&self) -> bool {
        self.points.iter().any(|p| p.diverged)
    }
}

/// Validates a strictly decreasing positive scale list.
pub(crate) fn check_scales_decreasing(scales: &[f64]) -> Result<()> {
    if scales.is_empty() {
        return Err(WeightError::InvalidParameter("scale list is empty".into()));
    }
    for s in scales {
        if !(s.is_finite() && *s > 0.0) {
            return Err(WeightError::InvalidParameter(format!("scale {s} must be positive")));
        }
    }
    if scales.windows(2).any(|p| p[1] >= p[0]) {
        return Err(WeightError::InvalidParameter(
            "scales must be strictly decreasing".into(),
        ));
    }
    Ok(())
}

/// The three test lengths examined at scale δ.
pub(crate) fn scale_lengths(delta: f64) -> [f64; 3] {
    [delta, delta / 2.0, delta / 4.0]
}

/// Builds a restricted-supremum profile over intervals of length ≤ δ.
///
/// For each scale, intervals of length δ, δ/2, δ/4 are translated across
/// the window; the profile value is the running maximum over this and all
/// smaller scales, making the profile monotone by construction.  A
/// `Diverged` evaluation marks the scale's flag and is excluded from the
/// maximum; any other error aborts.
pub(crate) fn restricted_sup_profile(
    window: Interval,
    scales: &[f64],
    policy: SweepPolicy,
    floor: f64,
    functional: &'static str,
    mut eval: impl FnMut(Interval) -> Result<f64>,
) -> Result<OscillationProfile> {
    check_scales_decreasing(scales)?;
    let mut ascending: Vec<ProfilePoint> = Vec::with_capacity(scales.len());
    let mut running: Supremum<Interval> = Supremum::new();
    let mut tested_any = false;
    for &delta in scales.iter().rev() {
        let mut diverged = false;
        for length in scale_lengths(delta) {
            for lo in interval_starts(window, length, policy) {
                let i = Interval::new(lo, lo + length);
                tested_any = true;
                match eval(i) {
                    Ok(v) => running.offer(v, i),
                    Err(WeightError::Diverged { .. }) => diverged = true,
                    Err(e) => return Err(e),
                }
            }
        }
        let value = if running.is_empty() { floor } else { running.value().max(floor) };
        ascending.push(ProfilePoint { scale: delta, value, witness: running.witness(), diverged });
    }
    if !tested_any {
        return Err(WeightError::EmptySweep(format!(
            "no test interval at any requested scale fits the window {window:?}"
        )));
    }
    ascending.reverse();
    Ok(OscillationProfile { functional, floor, points: ascending })
}

/// Average of `log w` over an interval.
pub fn interval_mean(w: &WeightHandle, i: Interval) -> Result<f64> {
    w.log_average(i)
}

/// Mean oscillation of `log w` over an interval:
/// `(1/|I|) ∫_I |log w − (log w)_I|`.
///
/// Sampled weights are integrated exactly cell by cell; closed-form weights
/// use `panels` equal panels with the exact per-panel mean of `log w`, so the
/// only quadrature error comes from panels where `log w − (log w)_I` changes
/// sign (second order in the panel width).
pub fn mean_oscillation(w: &WeightHandle, i: Interval, panels: usize) -> Result<f64> {
    let m = w.log_average(i)?;
    let mut acc = KahanSum::new();
    w.for_each_log_segment(i, panels, |seg| {
        acc.add(seg.seg.length() * (seg.mean_log - m).abs());
    })?;
    Ok((acc.total() / i.length()).max(0.0))
}

/// Whole-sweep supremum with its witness.
#[derive(Debug, Clone, Copy)]
pub struct SweepExtremum {
    pub value: f64,
    pub witness: Option<Interval>,
}

/// Supremum of mean oscillation over the sweep of all scales — a certified
/// lower bound for the BMO norm of `log w` on the window.
pub fn bmo_norm_estimate(
    w: &WeightHandle,
    window: Interval,
    scales: &[f64],
    policy: SweepPolicy,
    panels: usize,
) -> Result<SweepExtremum> {
    let profile = vmo_modulus(w, window, scales, policy, panels)?;
    let top = profile.largest();
    Ok(SweepExtremum { value: top.value, witness: top.witness })
}

/// Restricted-supremum profile of mean oscillation: v(δ) = sup over tested
/// intervals of length ≤ δ.  `log w` has vanishing mean oscillation exactly
/// when this tends to 0 with δ.
pub fn vmo_modulus(
    w: &WeightHandle,
    window: Interval,
    scales: &[f64],
    policy: SweepPolicy,
    panels: usize,
) -> Result<OscillationProfile> {
    restricted_sup_profile(window, scales, policy, 0.0, "mean-oscillation", |i| {
        mean_oscillation(w, i, panels)
    })
}

/// Empirical exponential-tail record for `log w` on one interval.
#[derive(Debug, Clone)]
pub struct JNTail {
    pub interval: Interval,
    /// Thresholds λ, strictly increasing.
    pub lambdas: Vec<f64>,
    /// Fraction of the interval where `|log w − (log w)_I| > λ`.
    pub tail_fractions: Vec<f64>,
    /// Exponential-fit constants (C1, C2) for
    /// `fraction(λ) ≤ C1·exp(−C2·λ/norm)`; `None` when too few usable
    /// tail points exist (e.g. constant weights).
    pub fitted: Option<(f64, f64)>,
    /// The oscillation norm the fit is expressed against.
    pub bmo_norm_used: f64,
    /// Whether every positive tail fraction satisfies the fitted bound.
    pub bound_holds: Option<bool>,
}

/// Tail fractions participate in the exponential fit only inside this band:
/// above it the distribution head is not exponential, below it the empirical
/// measure is dominated by grid resolution.
pub const JN_FIT_BAND: (f64, f64) = (1e-6, 0.5);

/// Measures the distribution tails of `|log w − (log w)_I|` and fits an
/// exponential bound.
///
/// The tail measure counts each quadrature segment by its midpoint value
/// (exact for sampled weights).  The decay rate comes from least squares on
/// `ln fraction` vs λ over the usable band; the prefactor is then raised to
/// the empirical envelope so the reported pair is an actual bound on every
/// measured point.
pub fn jn_tail(
    w: &WeightHandle,
    i: Interval,
    lambdas: &[f64],
    bmo_norm_used: f64,
    panels: usize,
) -> Result<JNTail> {
    if !(bmo_norm_used.is_finite() && bmo_norm_used > 0.0) {
        return Err(WeightError::InvalidParameter(format!(
            "oscillation norm for the tail fit must be positive, got {bmo_norm_used}"
        )));
    }
    if lambdas.is_empty() || lambdas.windows(2).any(|p| p[1] <= p[0]) {
        return Err(WeightError::InvalidParameter(
            "tail thresholds must be nonempty and strictly increasing".into(),
        ));
    }
    if lambdas.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
        return Err(WeightError::InvalidParameter(
            "tail thresholds must be nonnegative".into(),
        ));
    }
    let m = w.log_average(i)?;
    let mut counts: Vec<KahanSum> = vec![KahanSum::new(); lambdas.len()];
    w.for_each_log_segment(i, panels, |seg| {
        let d = (seg.mid_log - m).abs();
        for (k, &lambda) in lambdas.iter().enumerate() {
            if d > lambda {
                counts[k].add(seg.seg.length());
            } else {
                break; // thresholds increase, later ones cannot be exceeded
            }
        }
    })?;
    let tail_fractions: Vec<f64> =
        counts.iter().map(|c| (c.total() / i.length()).clamp(0.0, 1.0)).collect();

    // Least squares of ln(fraction) against λ over the usable band.
    let usable: Vec<(f64, f64)> = lambdas
        .iter()
        .zip(&tail_fractions)
        .filter(|(_, &f)| f >= JN_FIT_BAND.0 && f <= JN_FIT_BAND.1)
        .map(|(&l, &f)| (l, f.ln()))
        .collect();
    let (fitted, bound_holds) = if usable.len() < 2 {
        (None, None)
    } else {
        let n = usable.len() as f64;
        let sx: f64 = usable.iter().map(|(l, _)| l).sum();
        let sy: f64 = usable.iter().map(|(_, y)| y).sum();
        let sxx: f64 = usable.iter().map(|(l, _)| l * l).sum();
        let sxy: f64 = usable.iter().map(|(l, y)| l * y).sum();
        let denom = n * sxx - sx * sx;
        if denom <= 0.0 {
            (None, None)
        } else {
            let slope = (n * sxy - sx * sy) / denom;
            let c2 = (-slope * bmo_norm_used).max(0.0);
            // Raise the prefactor to the envelope of every measured point with
            // positive tail mass so the reported pair bounds them all.
            let c1 = lambdas
                .iter()
                .zip(&tail_fractions)
                .filter(|(_, &f)| f > 0.0)
                .map(|(&l, &f)| (f.ln() + c2 * l / bmo_norm_used).exp())
                .fold(f64::MIN_POSITIVE, f64::max);
            let holds = lambdas.iter().zip(&tail_fractions).all(|(&l, &f)| {
                f <= 0.0 || f <= c1 * (-c2 * l / bmo_norm_used).exp() * (1.0 + 1e-9)
            });
            (Some((c1, c2)), Some(holds))
        }
    };
    Ok(JNTail { interval: i, lambdas: lambdas.to_vec(), tail_fractions, fitted, bmo_norm_used, bound_holds })
}

/// `mean(w) · mean(1/w)` over an interval; ≥ 1 by Cauchy–Schwarz.
///
/// Returns `Diverged` when the reciprocal weight has infinite mass on the
/// interval (for example across an interior zero of the weight).
pub fn sarason_product(w: &WeightHandle, i: Interval) -> Result<f64> {
    let r = w.reciprocal()?;
    Ok((w.average(i)? * r.average(i)?).max(1.0))
}

/// `mean(w) · exp(−mean(log w))` over an interval; ≥ 1 by Jensen.
pub fn mitsis_ratio(w: &WeightHandle, i: Interval) -> Result<f64> {
    Ok(w.average(i)? * (-w.log_average(i)?).exp())
}

/// Restricted-supremum profile of `sarason_product` (floor 1).
pub fn sarason_modulus(
    w: &WeightHandle,
    window: Interval,
    scales: &[f64],
    policy: SweepPolicy,
) -> Result<OscillationProfile> {
    restricted_sup_profile(window, scales, policy, 1.0, "sarason", |i| sarason_product(w, i))
}

/// Restricted-supremum profile of `mitsis_ratio` (floor 1).
pub fn mitsis_modulus(
    w: &WeightHandle,
    window: Interval,
    scales: &[f64],
    policy: SweepPolicy,
) -> Result<OscillationProfile> {
    restricted_sup_profile(window, scales, policy, 1.0, "mitsis", |i| mitsis_ratio(w, i))
}
