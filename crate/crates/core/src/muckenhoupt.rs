//! Doubling and Muckenhoupt-type diagnostics: the doubling constant and
//! its vanishing modulus λ_δ, A_p and A∞ sweep constants, an equal-mass
//! set diagnostic, the adjacent-interval sandwich bounds, and the
//! dyadic integral criterion on λ_δ.
//!
//! All constants are restricted suprema over finite sweeps and are
//! therefore certified lower bounds; witnesses point at the maximizing
//! configuration so a reported value can be recomputed in isolation.

use crate::carleson::{eta_tilde, NONVANISH_THRESHOLD};
use crate::interval::{BoxPoint, Interval};
use crate::oscillation::{
    check_scales_decreasing, mitsis_ratio, restricted_sup_profile, scale_lengths,
    OscillationProfile,
};
use crate::sweep::{interval_starts, Supremum, SweepPolicy};
use crate::weight::WeightHandle;
use crate::{Result, WeightError};

/// Largest mass ratio between an interval and its double.
#[derive(Debug, Clone)]
pub struct DoublingReport {
    /// Supremum of `max(ω(I)/ω(J), ω(J)/ω(I))` over swept adjacent
    /// equal-length pairs `(I, J)`; at least 1.
    pub constant: f64,
    /// The maximizing pair.
    pub witness_pair: Option<(Interval, Interval)>,
    /// Scales the sweep covered (each expanded to length, length/2,
    /// length/4).
    pub scales: Vec<f64>,
    /// Placement policy used for the sweep.
    pub policy: SweepPolicy,
    /// Whether any pair was dropped for a divergent mass.
    pub diverged: bool,
}

/// Vanishing-doubling modulus: restricted supremum of the squared
/// half-mass deviation η̃ over boxes of height at most δ.
#[derive(Debug, Clone)]
pub struct DoublingModulus {
    /// Profile over the requested scales, floor 0, monotone in δ.
    pub profile: OscillationProfile,
}

/// A_p sweep outcome.
#[derive(Debug, Clone)]
pub struct ApReport {
    pub p: f64,
    /// Supremum of the per-interval A_p product; at least 1.
    pub constant: f64,
    pub witness: Option<Interval>,
    /// Whether intervals were dropped because the dual-power mass
    /// diverged there.
    pub diverged: bool,
}

/// A∞ (reverse-Jensen) sweep outcome.
#[derive(Debug, Clone)]
pub struct AinftyReport {
    /// Supremum of average / exp(log-average); at least 1.
    pub constant: f64,
    pub witness: Option<Interval>,
    pub diverged: bool,
}

/// One sample of the equal-cell concentration diagnostic.
#[derive(Debug, Clone, Copy)]
pub struct SetConditionSample {
    /// Fraction of `|I|` actually covered (quantized upward to whole
    /// cells).
    pub measure_fraction: f64,
    /// Fraction of the total mass the covered cells carry.
    pub mass_fraction: f64,
}

/// Two-sided sandwich bounds for the wide-to-narrow mass ratio.
#[derive(Debug, Clone, Copy)]
pub struct SandwichReport {
    pub x0: f64,
    pub t: f64,
    /// Half-width of the wide interval, in units of t.
    pub n: u32,
    /// Deviation parameter the bounds were evaluated with.
    pub eps: f64,
    /// Largest adjacent-pair deviation actually measured at scale t.
    pub eps_measured: f64,
    /// `ω(x0 − nt, x0 + nt) / ω(x0 − t, x0 + t)`.
    pub ratio_wide: f64,
    /// Lower bound `((1+ε)^n − 1) / (ε (1+ε)^{n−1})`.
    pub lower: f64,
    /// Upper bound `((1+ε)^n − 1) / ε`.
    pub upper: f64,
    /// `ratio_wide − lower` (nonnegative when the claim holds).
    pub margin_lower: f64,
    /// `upper − ratio_wide`.
    pub margin_upper: f64,
    /// Extremes of the translated-interval ratio over 64 positions.
    pub translate_min: f64,
    pub translate_max: f64,
    /// Worst slack of the translated ratio against `[(1+ε)^{-1}, 1+ε]`.
    pub margin_translate: f64,
    pub pass: bool,
}

/// Verdict of the dyadic integral criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    /// The tail integral is finite on the evidence of the sweep.
    Converging,
    /// λ_δ stays bounded away from zero at the smallest scales.
    Diverging,
    /// The sweep cannot tell.
    Inconclusive,
}

/// Trapezoid estimate of `∫ λ_δ dδ/δ` over the tested scales and the
/// small-scale trend it supports.
#[derive(Debug, Clone)]
pub struct IntegralCriterion {
    /// Trapezoid value of the integral over the tested scale range.
    pub estimate: f64,
    pub trend: Trend,
    pub modulus: DoublingModulus,
}

/// Largest two-sided deviation `max(r, 1/r) − 1` of the mass ratio of
/// adjacent equal-length intervals inside `region`, over the given
/// lengths, stepping pairs by length/divisor.
pub fn max_adjacent_deviation(
    w: &WeightHandle,
    region: Interval,
    lengths: &[f64],
    policy: SweepPolicy,
) -> Result<f64> {
    if lengths.is_empty() {
        return Err(WeightError::InvalidParameter("no lengths to sweep".into()));
    }
    let mut worst = f64::NEG_INFINITY;
    let mut tested = false;
    for &len in lengths {
        if !(len.is_finite() && len > 0.0) {
            return Err(WeightError::InvalidParameter(format!(
                "adjacent-pair length must be positive and finite, got {len}"
            )));
        }
        // the pair spans 2·len; halving the step of the pair keeps the
        // single-interval step at len/divisor
        let pair_policy = SweepPolicy::new(policy.step_divisor * 2, policy.max_positions);
        for start in interval_starts(region, 2.0 * len, pair_policy) {
            let first = Interval::new(start, start + len);
            let second = Interval::new(start + len, start + 2.0 * len);
            let m1 = w.mass(first)?;
            let m2 = w.mass(second)?;
            if !(m1 > 0.0 && m2 > 0.0) {
                return Err(WeightError::InvalidWeight(format!(
                    "degenerate adjacent masses {m1}, {m2} near {start}"
                )));
            }
            worst = worst.max((m1 / m2).max(m2 / m1) - 1.0);
            tested = true;
        }
    }
    if !tested {
        return Err(WeightError::EmptySweep(format!(
            "no adjacent pair of the requested lengths fits {region:?}"
        )));
    }
    Ok(worst)
}

/// Sweeps adjacent equal-length pairs for the doubling constant.
pub fn doubling_constant(
    w: &WeightHandle,
    window: Interval,
    scales: &[f64],
    policy: SweepPolicy,
) -> Result<DoublingReport> {
    check_scales_decreasing(scales)?;
    let mut sup: Supremum<(Interval, Interval)> = Supremum::new();
    let mut diverged = false;
    let mut tested = false;
    for &delta in scales {
        for len in scale_lengths(delta) {
            let pair_policy = SweepPolicy::new(policy.step_divisor * 2, policy.max_positions);
            for start in interval_starts(window, 2.0 * len, pair_policy) {
                let first = Interval::new(start, start + len);
                let second = Interval::new(start + len, start + 2.0 * len);
                let (m1, m2) = match (w.mass(first), w.mass(second)) {
                    (Ok(a), Ok(b)) => (a, b),
                    (Err(WeightError::Diverged { .. }), _)
                    | (_, Err(WeightError::Diverged { .. })) => {
                        diverged = true;
                        continue;
                    }
                    (Err(e), _) | (_, Err(e)) => return Err(e),
                };
                if !(m1 > 0.0 && m2 > 0.0) {
                    return Err(WeightError::InvalidWeight(format!(
                        "degenerate adjacent masses {m1}, {m2} near {start}"
                    )));
                }
                tested = true;
                sup.offer((m1 / m2).max(m2 / m1), (first, second));
            }
        }
    }
    if !tested {
        return Err(WeightError::EmptySweep(format!(
            "no adjacent pair at the requested scales fits {window:?}"
        )));
    }
    Ok(DoublingReport {
        constant: sup.value().max(1.0),
        witness_pair: sup.witness(),
        scales: scales.to_vec(),
        policy,
        diverged,
    })
}

/// Restricted supremum of η̃ over boxes of height at most each scale.
pub fn vanishing_doubling_modulus(
    w: &WeightHandle,
    window: Interval,
    scales: &[f64],
    policy: SweepPolicy,
) -> Result<DoublingModulus> {
    let profile = restricted_sup_profile(window, scales, policy, 0.0, "lambda", |i| {
        eta_tilde(w, BoxPoint::new(i.midpoint(), i.length()))
    })?;
    Ok(DoublingModulus { profile })
}

/// The A_p product of one interval: `avg(w) · avg(w^{−1/(p−1)})^{p−1}`,
/// clamped below by its Hölder floor 1.
///
/// Builds the dual-power weight on the fly; for sweeps prefer
/// [`ap_constant`], which constructs it once.
pub fn ap_product(w: &WeightHandle, p: f64, interval: Interval) -> Result<f64> {
    check_exponent(p)?;
    let dual = w.powf(-1.0 / (p - 1.0))?;
    ap_product_with(w, &dual, p, interval)
}

fn check_exponent(p: f64) -> Result<()> {
    if !(p.is_finite() && p > 1.0) {
        return Err(WeightError::InvalidParameter(format!(
            "A_p exponent must be finite and exceed 1, got {p}"
        )));
    }
    Ok(())
}

fn ap_product_with(
    w: &WeightHandle,
    dual: &WeightHandle,
    p: f64,
    interval: Interval,
) -> Result<f64> {
    let value = w.average(interval)? * dual.average(interval)?.powf(p - 1.0);
    Ok(value.max(1.0))
}

/// Sweeps the A_p product over the window.  Intervals where the dual
/// mass diverges (e.g. straddling a zero of the weight) are skipped and
/// flagged, so the constant is the supremum over the integrable part.
pub fn ap_constant(
    w: &WeightHandle,
    p: f64,
    window: Interval,
    scales: &[f64],
    policy: SweepPolicy,
) -> Result<ApReport> {
    check_exponent(p)?;
    check_scales_decreasing(scales)?;
    let dual = w.powf(-1.0 / (p - 1.0))?;
    let mut sup: Supremum<Interval> = Supremum::new();
    let mut diverged = false;
    let mut tested = false;
    for &delta in scales {
        for len in scale_lengths(delta) {
            for start in interval_starts(window, len, policy) {
                let interval = Interval::new(start, start + len);
                match ap_product_with(w, &dual, p, interval) {
                    Ok(v) => {
                        tested = true;
                        sup.offer(v, interval);
                    }
                    Err(WeightError::Diverged { .. }) => diverged = true,
                    Err(e) => return Err(e),
                }
            }
        }
    }
    if !tested {
        return Err(WeightError::EmptySweep(format!(
            "no interval at the requested scales fits {window:?}, or every one diverged"
        )));
    }
    Ok(ApReport { p, constant: sup.value().max(1.0), witness: sup.witness(), diverged })
}

/// Sweeps the reverse-Jensen ratio (average over exponential of the log
/// average) for the A∞ constant.
pub fn ainfty_constant(
    w: &WeightHandle,
    window: Interval,
    scales: &[f64],
    policy: SweepPolicy,
) -> Result<AinftyReport> {
    check_scales_decreasing(scales)?;
    let mut sup: Supremum<Interval> = Supremum::new();
    let mut diverged = false;
    let mut tested = false;
    for &delta in scales {
        for len in scale_lengths(delta) {
            for start in interval_starts(window, len, policy) {
                let interval = Interval::new(start, start + len);
                match mitsis_ratio(w, interval) {
                    Ok(v) => {
                        tested = true;
                        sup.offer(v, interval);
                    }
                    Err(WeightError::Diverged { .. }) => diverged = true,
                    Err(e) => return Err(e),
                }
            }
        }
    }
    if !tested {
        return Err(WeightError::EmptySweep(format!(
            "no interval at the requested scales fits {window:?}, or every one diverged"
        )));
    }
    Ok(AinftyReport { constant: sup.value().max(1.0), witness: sup.witness(), diverged })
}

/// Mass concentration of the heaviest equal cells of `interval`.
///
/// For each requested measure fraction `f`, takes cells in decreasing
/// mass order until at least `f·|I|` is covered and reports the covered
/// measure and mass fractions.  A weight far from degenerate keeps the
/// mass fraction close to the measure fraction; concentration shows up
/// as mass fractions well above them.  This is a fixed-partition probe,
/// not a supremum over all subsets.
pub fn ainfty_set_diagnostic(
    w: &WeightHandle,
    interval: Interval,
    cells: usize,
    fractions: &[f64],
) -> Result<Vec<SetConditionSample>> {
    if cells < 2 {
        return Err(WeightError::InvalidParameter(format!(
            "set diagnostic needs at least 2 cells, got {cells}"
        )));
    }
    if fractions.iter().any(|f| !(f.is_finite() && *f > 0.0 && *f <= 1.0)) {
        return Err(WeightError::InvalidParameter(format!(
            "measure fractions must lie in (0, 1], got {fractions:?}"
        )));
    }
    let width = interval.length() / cells as f64;
    let mut masses = Vec::with_capacity(cells);
    let mut total = 0.0f64;
    for i in 0..cells {
        let lo = interval.lo() + i as f64 * width;
        let m = w.mass(Interval::new(lo, lo + width))?;
        total += m;
        masses.push((i, m));
    }
    if !(total > 0.0 && total.is_finite()) {
        return Err(WeightError::InvalidWeight(format!(
            "degenerate total mass {total} over {interval:?}"
        )));
    }
    masses.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut out = Vec::with_capacity(fractions.len());
    for &f in fractions {
        let needed = (f * cells as f64).ceil().min(cells as f64) as usize;
        let needed = needed.max(1);
        let mass: f64 = masses[..needed].iter().map(|(_, m)| m).sum();
        out.push(SetConditionSample {
            measure_fraction: needed as f64 / cells as f64,
            mass_fraction: mass / total,
        });
    }
    Ok(out)
}

/// Verifies the two-sided sandwich bounds at `(x0, t)` with wide radius
/// `n·t`.
///
/// The deviation ε defaults to the worst adjacent-pair deviation
/// measured at scale t across the wide interval; passing `Some(eps)`
/// asserts a hypothesis instead, and the check refuses with
/// `HypothesisNotMet` when the data exceeds it.
pub fn sandwich_check(
    w: &WeightHandle,
    x0: f64,
    t: f64,
    n: u32,
    eps_override: Option<f64>,
    policy: SweepPolicy,
) -> Result<SandwichReport> {
    if !(x0.is_finite() && t.is_finite() && t > 0.0 && n >= 1) {
        return Err(WeightError::InvalidParameter(format!(
            "sandwich check needs finite x0, t > 0 and n >= 1, got ({x0}, {t}, {n})"
        )));
    }
    let reach = (n as f64 + 1.0) * t;
    let region = Interval::new(x0 - reach, x0 + reach);
    if !w.domain().contains(&region) {
        return Err(WeightError::DomainExceeded { requested: region, domain: w.domain() });
    }
    let eps_measured = max_adjacent_deviation(w, region, &[t], policy)?;
    let eps = match eps_override {
        Some(e) => {
            if !(e.is_finite() && e >= 0.0) {
                return Err(WeightError::InvalidParameter(format!(
                    "deviation hypothesis must be a finite nonnegative number, got {e}"
                )));
            }
            if eps_measured > e {
                return Err(WeightError::HypothesisNotMet(format!(
                    "adjacent-mass deviation {eps_measured:.6} exceeds the hypothesis {e:.6} \
                     at scale {t} around {x0}"
                )));
            }
            e
        }
        None => eps_measured,
    };

    let nf = n as f64;
    let wide = w.mass(Interval::new(x0 - nf * t, x0 + nf * t))?;
    let narrow = w.mass(Interval::new(x0 - t, x0 + t))?;
    if !(wide > 0.0 && narrow > 0.0) {
        return Err(WeightError::InvalidWeight(format!(
            "degenerate masses {wide}, {narrow} at ({x0}, {t})"
        )));
    }
    let ratio_wide = wide / narrow;
    // below the noise floor of exact-mass arithmetic the bounds collapse
    // to their common ε → 0 limit n
    let (lower, upper) = if eps < 1e-13 {
        (nf, nf)
    } else {
        let growth = (1.0 + eps).powi(n as i32);
        ((growth - 1.0) / (eps * (1.0 + eps).powi(n as i32 - 1)), (growth - 1.0) / eps)
    };
    let margin_lower = ratio_wide - lower;
    let margin_upper = upper - ratio_wide;

    // translated narrow intervals against the left half of the pivot
    let denom = w.mass(Interval::new(x0 - t, x0))?;
    let lo_bound = 1.0 / (1.0 + eps);
    let hi_bound = 1.0 + eps;
    let mut translate_min = f64::INFINITY;
    let mut translate_max = f64::NEG_INFINITY;
    let mut margin_translate = f64::INFINITY;
    for j in 0..64 {
        let x1 = x0 - t + (j as f64 + 0.5) * t / 64.0;
        let r = w.mass(Interval::new(x1, x1 + t))? / denom;
        translate_min = translate_min.min(r);
        translate_max = translate_max.max(r);
        margin_translate = margin_translate.min((r - lo_bound).min(hi_bound - r));
    }

    let tol = -1e-12;
    let pass = margin_lower >= tol && margin_upper >= tol && margin_translate >= tol;
    Ok(SandwichReport {
        x0,
        t,
        n,
        eps,
        eps_measured,
        ratio_wide,
        lower,
        upper,
        margin_lower,
        margin_upper,
        translate_min,
        translate_max,
        margin_translate,
        pass,
    })
}

/// Trapezoid estimate of `∫ λ_δ dδ/δ` over the tested scales, with a
/// small-scale trend verdict.
pub fn lambda_integral_criterion(
    w: &WeightHandle,
    window: Interval,
    scales: &[f64],
    policy: SweepPolicy,
) -> Result<IntegralCriterion> {
    let modulus = vanishing_doubling_modulus(w, window, scales, policy)?;
    // ascending in δ
    let points: Vec<(f64, f64)> =
        modulus.profile.points.iter().rev().map(|p| (p.scale, p.value)).collect();
    let mut estimate = 0.0f64;
    for pair in points.windows(2) {
        let (d0, l0) = pair[0];
        let (d1, l1) = pair[1];
        estimate += 0.5 * (l0 / d0 + l1 / d1) * (d1 - d0);
    }

    let max_lambda = points.iter().fold(0.0f64, |m, &(_, l)| m.max(l));
    let (delta_min, lambda_min_scale) = points[0];
    let trend = if max_lambda < 1e-14 {
        Trend::Converging
    } else if lambda_min_scale >= NONVANISH_THRESHOLD {
        Trend::Diverging
    } else {
        // least-squares slope of ln λ against ln δ over the last decade
        let decade: Vec<(f64, f64)> = points
            .iter()
            .filter(|(d, l)| *d <= 10.0 * delta_min && *l > 0.0)
            .map(|&(d, l)| (d.ln(), l.ln()))
            .collect();
        if decade.len() < 2 {
            Trend::Inconclusive
        } else {
            let n = decade.len() as f64;
            let sx: f64 = decade.iter().map(|(x, _)| x).sum();
            let sy: f64 = decade.iter().map(|(_, y)| y).sum();
            let sxx: f64 = decade.iter().map(|(x, _)| x * x).sum();
            let sxy: f64 = decade.iter().map(|(x, y)| x * y).sum();
            let denom = n * sxx - sx * sx;
            let slope = if denom.abs() < 1e-30 { 0.0 } else { (n * sxy - sx * sy) / denom };
            if slope > 0.1 {
                Trend::Converging
            } else {
                Trend::Inconclusive
            }
        }
    };
    Ok(IntegralCriterion { estimate, trend, modulus })
}
