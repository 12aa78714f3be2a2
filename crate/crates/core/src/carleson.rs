//! The half-mass asymmetry fields η(z) and η̃(z) on the upper half-plane,
//! the Carleson box functional built from them, box sweeps (norm and
//! vanishing modulus), the layered decomposition diagnostics, and the
//! combined three-modulus equivalence verdict.
//!
//! The box functional at `(x0, t)` is the average
//! `A(x0,t) = (1/t) ∫_0^t ∫_{I(x0,t)} η(x,y) dx dy/y`, evaluated by
//! re-summing the `y`-integral over dyadic layers `y ∈ (t/2^k, t/2^{k-1}]`
//! and mapping each layer back to the top one, so a single tensor midpoint
//! grid on `I(x0,t) × (t/2, t]` serves every layer.  Truncation below
//! `t/2^depth` is reported, never silently dropped.

use crate::interval::{BoxPoint, Interval};
use crate::oscillation::{
    check_scales_decreasing, mitsis_modulus, OscillationProfile, ProfilePoint,
};
use crate::quadrature::KahanSum;
use crate::sweep::{interval_starts, Supremum, SweepPolicy};
use crate::weight::WeightHandle;
use crate::{Result, WeightError};
use std::f64::consts::LN_2;

/// A modulus counts as vanishing when its excess over the floor falls
/// below this at the smallest tested scale.
pub const VANISH_THRESHOLD: f64 = 0.02;

/// A modulus counts as non-vanishing when its excess stays at or above
/// this at every tested scale.
pub const NONVANISH_THRESHOLD: f64 = 0.05;

fn checked_halves(w: &WeightHandle, z: BoxPoint) -> Result<(f64, f64)> {
    let (l, r) = w.half_masses(z)?;
    if !(l > 0.0 && r > 0.0) {
        return Err(WeightError::InvalidWeight(format!(
            "degenerate half-mass at box ({}, {}): left {l}, right {r}",
            z.x(),
            z.y()
        )));
    }
    Ok((l, r))
}

/// η from the two half-masses, in the cancellation-free form
/// `ln cosh(d/2)` with `d = ln(m⁺/m⁻)`: exactly 0 for equal halves,
/// structurally nonnegative.
fn eta_from_halves(m_left: f64, m_right: f64) -> f64 {
    let d = m_right.ln() - m_left.ln();
    (2.0 * (d / 4.0).sinh().powi(2)).ln_1p()
}

/// Log of the arithmetic-to-geometric mean ratio of the two half-masses
/// of the base interval of `z`; nonnegative, zero only for equal halves.
pub fn eta(w: &WeightHandle, z: BoxPoint) -> Result<f64> {
    let (l, r) = checked_halves(w, z)?;
    Ok(eta_from_halves(l, r))
}

/// Squared deviation of the right/left half-mass ratio from 1:
/// `|1 − ω(I_z⁺)/ω(I_z⁻)|²`.
pub fn eta_tilde(w: &WeightHandle, z: BoxPoint) -> Result<f64> {
    let (l, r) = checked_halves(w, z)?;
    Ok((1.0 - r / l).powi(2))
}

/// Convenience view pairing a weight with the two box evaluators.
#[derive(Clone, Copy)]
pub struct EtaField<'a> {
    w: &'a WeightHandle,
}

impl<'a> EtaField<'a> {
    pub fn new(w: &'a WeightHandle) -> Self {
        Self { w }
    }

    pub fn weight(&self) -> &'a WeightHandle {
        self.w
    }

    pub fn eta(&self, z: BoxPoint) -> Result<f64> {
        eta(self.w, z)
    }

    pub fn eta_tilde(&self, z: BoxPoint) -> Result<f64> {
        eta_tilde(self.w, z)
    }
}

/// Resolution of the layered box quadrature: dyadic truncation depth and
/// the tensor midpoint panel counts on the top layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoxQuadrature {
    /// Number of dyadic layers kept; truncation below `t/2^depth`.
    pub depth: usize,
    /// Midpoint panels across the base interval.
    pub panels_x: usize,
    /// Midpoint panels across the top layer `(t/2, t]` of heights.
    pub panels_y: usize,
}

impl Default for BoxQuadrature {
    fn default() -> Self {
        Self { depth: 8, panels_x: 16, panels_y: 4 }
    }
}

impl BoxQuadrature {
    /// High-resolution preset for refinement studies.
    pub const DEEP: BoxQuadrature = BoxQuadrature { depth: 12, panels_x: 64, panels_y: 8 };

    /// One refinement step: panels double, one extra layer.
    pub fn refined(self) -> Self {
        Self { depth: self.depth + 1, panels_x: self.panels_x * 2, panels_y: self.panels_y * 2 }
    }

    /// Same depth, doubled panels: isolates panel error from truncation.
    pub fn with_doubled_panels(self) -> Self {
        Self { panels_x: self.panels_x * 2, panels_y: self.panels_y * 2, ..self }
    }

    fn validate(&self) -> Result<()> {
        if self.depth == 0 || self.depth > 40 {
            return Err(WeightError::InvalidParameter(format!(
                "box quadrature depth must be in 1..=40, got {}",
                self.depth
            )));
        }
        if self.panels_x == 0 || self.panels_y == 0 || self.panels_x > 65536 || self.panels_y > 65536
        {
            return Err(WeightError::InvalidParameter(format!(
                "box quadrature panels must be in 1..=65536, got {}x{}",
                self.panels_x, self.panels_y
            )));
        }
        Ok(())
    }
}

fn check_box_inputs(w: &WeightHandle, x0: f64, t: f64, reach: f64) -> Result<()> {
    if !(x0.is_finite() && t.is_finite() && t > 0.0) {
        return Err(WeightError::InvalidParameter(format!(
            "box center and height must be finite with t > 0, got ({x0}, {t})"
        )));
    }
    let needed = Interval::new(x0 - reach * t, x0 + reach * t);
    if !w.domain().contains(&needed) {
        return Err(WeightError::DomainExceeded { requested: needed, domain: w.domain() });
    }
    Ok(())
}

/// Value of the box functional together with its truncation accounting.
#[derive(Debug, Clone, Copy)]
pub struct BoxFunctionalValue {
    /// The layered quadrature value of `A(x0, t)`.
    pub value: f64,
    /// Per-layer bound on the omitted tail: the largest η sampled on the
    /// deepest kept layer times ln 2 bounds the next omitted layer's
    /// contribution when η does not grow as `y` shrinks; under the
    /// quadratic small-scale decay of smooth weights the whole tail is at
    /// most 4/3 of this.
    pub truncation_bound: f64,
    /// Quadrature that produced the value.
    pub quadrature: BoxQuadrature,
}

/// Layered-quadrature average of η over the Carleson box at `(x0, t)`.
///
/// Requires `(x0 − t, x0 + t)` inside the working domain: the half-mass
/// queries of the top layer reach half a box height beyond the base on
/// each side.
pub fn box_functional(
    w: &WeightHandle,
    x0: f64,
    t: f64,
    quad: BoxQuadrature,
) -> Result<BoxFunctionalValue> {
    quad.validate()?;
    check_box_inputs(w, x0, t, 1.0)?;
    let base_lo = x0 - t / 2.0;
    let dx = t / quad.panels_x as f64;
    let dv = (t / 2.0) / quad.panels_y as f64;
    let mut total = KahanSum::new();
    let mut deepest_max = 0.0f64;
    for k in 1..=quad.depth {
        let layer_scale = 2.0f64.powi(1 - k as i32);
        for j in 0..quad.panels_y {
            let v = t / 2.0 + (j as f64 + 0.5) * dv;
            let h = v * layer_scale;
            let node_weight = dx * dv / (v * t);
            for i in 0..quad.panels_x {
                let x = base_lo + (i as f64 + 0.5) * dx;
                let e = eta(w, BoxPoint::new(x, h))?;
                total.add(e * node_weight);
                if k == quad.depth && e > deepest_max {
                    deepest_max = e;
                }
            }
        }
    }
    Ok(BoxFunctionalValue { value: total.total(), truncation_bound: deepest_max * LN_2, quadrature: quad })
}

/// Outcome of a box-valued sweep: the restricted-supremum profile plus a
/// count of boxes skipped for divergent or degenerate masses.
pub(crate) struct BoxSweepOutcome {
    pub profile: OscillationProfile,
    pub skipped: usize,
}

/// Restricted-supremum profile of a box-valued functional over swept box
/// centers.  At each scale t (one box height per scale; the scale list
/// itself supplies the height refinement) centers step by `t / divisor`
/// across the window shrunk by `margin·t` on both sides, so every query
/// the evaluator makes stays inside the domain.  Cumulative over scales:
/// the value at scale δ covers all tested boxes with height ≤ δ.
pub(crate) fn box_value_profile(
    window: Interval,
    scales: &[f64],
    policy: SweepPolicy,
    margin: f64,
    floor: f64,
    functional: &'static str,
    mut eval: impl FnMut(f64, f64) -> Result<f64>,
) -> Result<BoxSweepOutcome> {
    check_scales_decreasing(scales)?;
    let mut skipped = 0usize;
    let mut tested_any = false;
    let mut running: Supremum<Interval> = Supremum::new();
    let mut ascending: Vec<ProfilePoint> = Vec::with_capacity(scales.len());
    for &t in scales.iter().rev() {
        let mut diverged = false;
        let lo = window.lo() + margin * t;
        let hi = window.hi() - margin * t;
        if hi - lo > 0.0 {
            let center_span = Interval::new(lo - t / 2.0, hi + t / 2.0);
            for start in interval_starts(center_span, t, policy) {
                let x0 = start + t / 2.0;
                tested_any = true;
                match eval(x0, t) {
                    Ok(v) => running.offer(v, Interval::new(x0 - t / 2.0, x0 + t / 2.0)),
                    Err(WeightError::Diverged { .. }) | Err(WeightError::InvalidWeight(_)) => {
                        skipped += 1;
                        diverged = true;
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        let value = if running.is_empty() { floor } else { running.value().max(floor) };
        ascending.push(ProfilePoint { scale: t, value, witness: running.witness(), diverged });
    }
    if !tested_any {
        return Err(WeightError::EmptySweep(format!(
            "no box at any requested scale fits the window {window:?} with margin {margin}"
        )));
    }
    ascending.reverse();
    Ok(BoxSweepOutcome {
        profile: OscillationProfile { functional, floor, points: ascending },
        skipped,
    })
}

/// Carleson norm estimate and vanishing modulus of the η measure.
#[derive(Debug, Clone)]
pub struct CarlesonReport {
    /// Largest box average seen anywhere in the sweep.
    pub norm_sq: f64,
    /// Base interval of the box attaining `norm_sq`.
    pub witness: Option<Interval>,
    /// Restricted supremum of box averages over heights ≤ δ (floor 0).
    pub modulus: OscillationProfile,
    /// Boxes dropped because a mass query diverged or degenerated.
    pub skipped: usize,
    /// Quadrature used for every box.
    pub quadrature: BoxQuadrature,
}

/// Sweeps the box functional over centers and scales.
///
/// The modulus values are monotone in δ by construction, and the norm is
/// the value at the largest scale; all values are certified lower bounds
/// for the corresponding suprema.
pub fn carleson_report(
    w: &WeightHandle,
    window: Interval,
    scales: &[f64],
    policy: SweepPolicy,
    quad: BoxQuadrature,
) -> Result<CarlesonReport> {
    let out = box_value_profile(window, scales, policy, 1.0, 0.0, "carleson-box", |x0, t| {
        box_functional(w, x0, t, quad).map(|b| b.value)
    })?;
    let (norm_sq, witness) = {
        let top = out.profile.largest();
        (top.value, top.witness)
    };
    Ok(CarlesonReport { norm_sq, witness, modulus: out.profile, skipped: out.skipped, quadrature: quad })
}

/// Split of the box functional into its four layered parts.
///
/// With the same tensor grid as [`box_functional`], the total satisfies
/// `A_total = A1_hat − A2_hat + A3 + A4` exactly in the continuum; the
/// reported residual therefore isolates pure quadrature error — the only
/// surviving term is the midpoint error of the `dv/v` node weights
/// against ln 2, times the Jensen gap of the base interval.
#[derive(Debug, Clone, Copy)]
pub struct DecompositionDiagnostics {
    pub x0: f64,
    pub t: f64,
    /// Number of dyadic layers (the series truncation order).
    pub depth: usize,
    /// The layered box functional itself at this quadrature.
    pub a_total: f64,
    /// Deviation of the local average from the base average, integrated
    /// over the top layer of sliding intervals.
    pub a1_hat: f64,
    /// Finest-layer remainder: the half-interval log averages at depth
    /// `depth` against the base log average.
    pub a2_hat: f64,
    /// Sum over intermediate layers of the center-interval log mass
    /// against the geometric mean of its flanks.
    pub a3: f64,
    /// `ln 2` times the Jensen gap `ln ω_I − (ln ω)_I` of the base.
    pub a4: f64,
    /// `|a_total − (a1_hat − a2_hat + a3 + a4)|`.
    pub residual: f64,
    pub quadrature: BoxQuadrature,
}

/// Computes the four-part split of the box functional and its
/// reconstruction residual at truncation order `quad.depth`.
pub fn decomposition_diagnostics(
    w: &WeightHandle,
    x0: f64,
    t: f64,
    quad: BoxQuadrature,
) -> Result<DecompositionDiagnostics> {
    quad.validate()?;
    check_box_inputs(w, x0, t, 1.0)?;
    let n = quad.depth;
    let base = Interval::new(x0 - t / 2.0, x0 + t / 2.0);
    let ln_avg = w.average(base)?.ln();
    let log_avg = w.log_average(base)?;
    let dx = t / quad.panels_x as f64;
    let dv = (t / 2.0) / quad.panels_y as f64;

    let mut a_total = KahanSum::new();
    let mut a1 = KahanSum::new();
    let mut a2 = KahanSum::new();
    let mut a3 = KahanSum::new();
    let mut left = vec![0.0f64; n + 1];
    let mut right = vec![0.0f64; n + 1];
    for j in 0..quad.panels_y {
        let v = t / 2.0 + (j as f64 + 0.5) * dv;
        let node_weight = dx * dv / (v * t);
        for i in 0..quad.panels_x {
            let x = base.lo() + (i as f64 + 0.5) * dx;
            for k in 1..=n {
                let h = v * 2.0f64.powi(1 - k as i32);
                let (l, r) = checked_halves(w, BoxPoint::new(x, h))?;
                left[k] = l;
                right[k] = r;
                a_total.add(eta_from_halves(l, r) * node_weight);
            }
            let m1 = left[1] + right[1];
            a1.add(((m1 / v).ln() - ln_avg) * node_weight);
            let r_n = v * 2.0f64.powi(-(n as i32));
            a2.add(
                (0.5 * (left[n] / r_n).ln() + 0.5 * (right[n] / r_n).ln() - log_avg)
                    * node_weight,
            );
            for k in 1..n {
                let center = left[k + 1] + right[k + 1];
                a3.add(
                    (center.ln() - 0.5 * left[k].ln() - 0.5 * right[k].ln()) * node_weight,
                );
            }
        }
    }
    let a4 = LN_2 * (ln_avg - log_avg);
    let (a_total, a1_hat, a2_hat, a3) = (a_total.total(), a1.total(), a2.total(), a3.total());
    let residual = (a_total - (a1_hat - a2_hat + a3 + a4)).abs();
    Ok(DecompositionDiagnostics {
        x0,
        t,
        depth: n,
        a_total,
        a1_hat,
        a2_hat,
        a3,
        a4,
        residual,
        quadrature: quad,
    })
}

/// One layer of the boundary-flux bound behind the intermediate sum.
#[derive(Debug, Clone, Copy)]
pub struct LayerRemainder {
    /// Layer index (1 = coarsest intermediate layer).
    pub k: u32,
    /// Largest measured `|F_k(y)|/y` over the sampled heights.
    pub worst_ratio: f64,
    /// The geometric bound `2^{−(k−1)} ε′` it must stay under.
    pub bound: f64,
    pub pass: bool,
}

/// Measured per-layer boundary fluxes of the intermediate sum, with the
/// adjacent-mass deviation ε′ they are bounded by.
#[derive(Debug, Clone)]
pub struct LayerRemainderReport {
    pub x0: f64,
    pub t: f64,
    /// Largest adjacent equal-length mass deviation measured over
    /// `(x0 − t, x0 + t)` at dyadic lengths down from `t`.
    pub eps_prime: f64,
    pub layers: Vec<LayerRemainder>,
}

impl LayerRemainderReport {
    pub fn all_pass(&self) -> bool {
        self.layers.iter().all(|l| l.pass)
    }
}

/// The signed boundary flux of layer `k` at height `y`: what the sliding
/// center-interval log mass gains over the flank geometric mean when the
/// sliding window enters and leaves the base interval.  Doubled value.
fn layer_flux_doubled(
    w: &WeightHandle,
    x0: f64,
    t: f64,
    k: u32,
    y: f64,
    panels: usize,
) -> Result<f64> {
    let half = y * 2.0f64.powi(-(k as i32 + 1)); // y / 2^{k+1}
    let full = 2.0 * half; // y / 2^k
    let mut acc = KahanSum::new();
    let h = half / panels as f64;
    for (strip_lo, sign) in [(x0 - t / 2.0, 1.0), (x0 + t / 2.0, -1.0)] {
        for i in 0..panels {
            let x = strip_lo + (i as f64 + 0.5) * h;
            let centered = w.mass(Interval::new(x - half, x + half))?;
            let left = w.mass(Interval::new(x - full, x))?;
            acc.add(sign * (centered.ln() - left.ln()) * h);
        }
    }
    Ok(acc.total())
}

/// Checks the geometric decay of the per-layer boundary fluxes: each
/// measured `|F_k(y)|/y` must stay below `2^{−(k−1)} ε′` with ε′ the
/// worst adjacent-mass deviation around the box.
pub fn layer_remainder_check(
    w: &WeightHandle,
    x0: f64,
    t: f64,
    max_k: u32,
    strip_panels: usize,
    height_samples: usize,
    policy: SweepPolicy,
) -> Result<LayerRemainderReport> {
    if max_k == 0 || strip_panels == 0 || height_samples == 0 {
        return Err(WeightError::InvalidParameter(
            "layer check needs max_k, strip_panels, height_samples all >= 1".into(),
        ));
    }
    check_box_inputs(w, x0, t, 1.0)?;
    let region = Interval::new(x0 - t, x0 + t);
    let lengths: Vec<f64> = (0..=12).map(|j| t * 2.0f64.powi(-j)).collect();
    let eps_prime = crate::muckenhoupt::max_adjacent_deviation(w, region, &lengths, policy)?;
    let dv = (t / 2.0) / height_samples as f64;
    let mut layers = Vec::with_capacity(max_k as usize);
    for k in 1..=max_k {
        let mut worst = 0.0f64;
        for j in 0..height_samples {
            let y = t / 2.0 + (j as f64 + 0.5) * dv;
            let flux = layer_flux_doubled(w, x0, t, k, y, strip_panels)? / 2.0;
            worst = worst.max(flux.abs() / y);
        }
        let bound = eps_prime * 2.0f64.powi(1 - k as i32);
        layers.push(LayerRemainder { k, worst_ratio: worst, bound, pass: worst <= bound + 1e-12 });
    }
    Ok(LayerRemainderReport { x0, t, eps_prime, layers })
}

/// Measured band of the ratio η̃/η over swept boxes.
#[derive(Debug, Clone, Copy)]
pub struct ComparabilityBand {
    /// Only boxes whose half-mass ratio is within `[1/rho, rho]` enter.
    pub rho: f64,
    /// Boxes with η at or below this are excluded (the ratio is 0/0 in
    /// the symmetric limit; it tends to 8 along any approach).
    pub eta_floor: f64,
    pub lo: f64,
    pub hi: f64,
    /// Number of boxes that entered the band.
    pub boxes: usize,
}

/// Measures min and max of η̃/η over all swept boxes with bounded
/// half-mass ratio.  Errors with `EmptySweep` when no box qualifies
/// (e.g. an exactly constant weight).
pub fn comparability_band(
    w: &WeightHandle,
    window: Interval,
    scales: &[f64],
    policy: SweepPolicy,
    rho: f64,
    eta_floor: f64,
) -> Result<ComparabilityBand> {
    if !(rho.is_finite() && rho > 1.0) {
        return Err(WeightError::InvalidParameter(format!(
            "comparability ratio bound must exceed 1, got {rho}"
        )));
    }
    check_scales_decreasing(scales)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut boxes = 0usize;
    for &delta in scales {
        for length in crate::oscillation::scale_lengths(delta) {
            for start in interval_starts(window, length, policy) {
                let z = BoxPoint::new(start + length / 2.0, length);
                let (l, r) = match checked_halves(w, z) {
                    Ok(pair) => pair,
                    Err(WeightError::Diverged { .. }) | Err(WeightError::InvalidWeight(_)) => {
                        continue
                    }
                    Err(e) => return Err(e),
                };
                let ratio = (r / l).max(l / r);
                if ratio > rho {
                    continue;
                }
                let e = eta_from_halves(l, r);
                if e <= eta_floor {
                    continue;
                }
                let band_value = (1.0 - r / l).powi(2) / e;
                lo = lo.min(band_value);
                hi = hi.max(band_value);
                boxes += 1;
            }
        }
    }
    if boxes == 0 {
        return Err(WeightError::EmptySweep(
            "no box with bounded half-mass ratio and nonzero asymmetry was found".into(),
        ));
    }
    Ok(ComparabilityBand { rho, eta_floor, lo, hi, boxes })
}

/// Box average of η̃ against the dyadic integral of its height-wise
/// suprema over the same layered grid.
#[derive(Debug, Clone, Copy)]
pub struct TildeDomination {
    /// `(1/t) ∫∫` of η̃ over the box, layered quadrature.
    pub box_average: f64,
    /// Discrete `∫_0^t sup_x η̃(x, y) dy/y` over the same layers.
    pub lambda_integral: f64,
    /// Whether the average is dominated by the integral (it must be:
    /// each grid row is bounded by its own maximum).
    pub holds: bool,
    pub quadrature: BoxQuadrature,
}

/// Verifies on one box that the η̃ average is controlled by the dyadic
/// integral of per-height suprema.
pub fn tilde_box_domination(
    w: &WeightHandle,
    x0: f64,
    t: f64,
    quad: BoxQuadrature,
) -> Result<TildeDomination> {
    quad.validate()?;
    check_box_inputs(w, x0, t, 1.0)?;
    let base_lo = x0 - t / 2.0;
    let dx = t / quad.panels_x as f64;
    let dv = (t / 2.0) / quad.panels_y as f64;
    let mut lhs = KahanSum::new();
    let mut rhs = KahanSum::new();
    for k in 1..=quad.depth {
        let layer_scale = 2.0f64.powi(1 - k as i32);
        for j in 0..quad.panels_y {
            let v = t / 2.0 + (j as f64 + 0.5) * dv;
            let h = v * layer_scale;
            let mut row_max = 0.0f64;
            let mut row_sum = KahanSum::new();
            for i in 0..quad.panels_x {
                let x = base_lo + (i as f64 + 0.5) * dx;
                let e = eta_tilde(w, BoxPoint::new(x, h))?;
                row_sum.add(e * dx / t);
                row_max = row_max.max(e);
            }
            lhs.add(row_sum.total() * dv / v);
            rhs.add(row_max * dv / v);
        }
    }
    let (box_average, lambda_integral) = (lhs.total(), rhs.total());
    Ok(TildeDomination {
        box_average,
        lambda_integral,
        holds: box_average <= lambda_integral + 1e-12,
        quadrature: quad,
    })
}

/// Small-scale behaviour of one modulus profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModulusTrend {
    /// Excess below [`VANISH_THRESHOLD`] at the smallest scale and below
    /// [`NONVANISH_THRESHOLD`] on the three smallest.
    Vanishing,
    /// Excess at or above [`NONVANISH_THRESHOLD`] at every tested scale.
    NonVanishing,
    /// Neither pattern.
    Inconclusive,
}

/// Classifies a profile's excesses over its floor against the shared
/// thresholds.
pub fn classify_modulus(profile: &OscillationProfile) -> ModulusTrend {
    let n = profile.points.len();
    let smallest_ok = profile.excess_at_smallest() < VANISH_THRESHOLD;
    let head_ok = (0..n.min(3))
        .all(|k| profile.excess_at(k).is_some_and(|e| e < NONVANISH_THRESHOLD));
    if smallest_ok && head_ok {
        return ModulusTrend::Vanishing;
    }
    let all_large = (0..n).all(|k| profile.excess_at(k).is_some_and(|e| e >= NONVANISH_THRESHOLD));
    if all_large {
        return ModulusTrend::NonVanishing;
    }
    ModulusTrend::Inconclusive
}

/// Joint verdict over the three moduli.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquivalenceVerdict {
    /// All three moduli trend to their floors.
    AllVanishing,
    /// All three stay bounded away from their floors.
    NoneVanishing,
    /// Some vanish and some do not — evidence against the equivalence at
    /// the tested resolution.
    Mixed,
    /// At least one modulus fits neither pattern.
    Inconclusive,
}

/// The three moduli whose joint small-scale behaviour the equivalence
/// asserts, with per-modulus trends and the combined verdict.
#[derive(Debug, Clone)]
pub struct TheoremCheck {
    /// Reverse-Jensen sweep constant used as the admissibility screen.
    pub ainfty_constant: f64,
    pub ainfty_witness: Option<Interval>,
    /// Reverse-Jensen ratio profile (floor 1).
    pub mitsis: OscillationProfile,
    /// Box-average sweep of η (floor 0).
    pub carleson: CarlesonReport,
    /// Half-mass asymmetry sweep η̃ (floor 0).
    pub lambda: OscillationProfile,
    /// Trends in the order (mitsis, carleson, lambda).
    pub trends: [ModulusTrend; 3],
    pub verdict: EquivalenceVerdict,
}

/// Runs the three moduli side by side and classifies their joint trend.
///
/// Refuses with `HypothesisNotMet` when the reverse-Jensen screen
/// diverges: the equivalence is only asserted for weights passing it.
pub fn theorem_check(
    w: &WeightHandle,
    window: Interval,
    scales: &[f64],
    policy: SweepPolicy,
    quad: BoxQuadrature,
) -> Result<TheoremCheck> {
    let screen = crate::muckenhoupt::ainfty_constant(w, window, scales, policy)?;
    if screen.diverged || !screen.constant.is_finite() {
        return Err(WeightError::HypothesisNotMet(format!(
            "reverse-Jensen screen failed for `{}`: sweep diverged or unbounded",
            w.label()
        )));
    }
    let mitsis = mitsis_modulus(w, window, scales, policy)?;
    let carleson = carleson_report(w, window, scales, policy, quad)?;
    let lambda = crate::muckenhoupt::vanishing_doubling_modulus(w, window, scales, policy)?.profile;
    let trends =
        [classify_modulus(&mitsis), classify_modulus(&carleson.modulus), classify_modulus(&lambda)];
    let vanish = trends.iter().filter(|t| **t == ModulusTrend::Vanishing).count();
    let non_vanish = trends.iter().filter(|t| **t == ModulusTrend::NonVanishing).count();
    let verdict = if vanish == 3 {
        EquivalenceVerdict::AllVanishing
    } else if non_vanish == 3 {
        EquivalenceVerdict::NoneVanishing
    } else if vanish > 0 && non_vanish > 0 {
        EquivalenceVerdict::Mixed
    } else {
        EquivalenceVerdict::Inconclusive
    };
    Ok(TheoremCheck {
        ainfty_constant: screen.constant,
        ainfty_witness: screen.witness,
        mitsis,
        carleson,
        lambda,
        trends,
        verdict,
    })
}
