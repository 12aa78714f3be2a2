//! The square of the area-type functional over aperture-1 cones, its
//! interval average, and the exact split of that average into boundary
//! terms plus twice the box functional.
//!
//! Writing `G(x,y) = ∫_{-1}^{1} η(x+sy, y) ds`, the cone square is
//! `A_t(x)² = ∫ G(x,y) dy/y` over the truncated range `(y_min, t)`,
//! `y_min = t/2^depth`.  Splitting `G = 2η(x,·) + (G − 2η)` and
//! integrating the remainder by parts in the aperture variable turns the
//! interval average `(A_t²)_I` into `2A + B₁ + B₂₁ + B₂₂ + B₃`
//! exactly on the truncated cone, so the reported residual of that
//! identity isolates pure quadrature error.

use crate::carleson::{box_functional, box_value_profile, classify_modulus, BoxQuadrature, ModulusTrend};
use crate::interval::{BoxPoint, Interval};
use crate::oscillation::OscillationProfile;
use crate::quadrature::KahanSum;
use crate::sweep::SweepPolicy;
use crate::weight::WeightHandle;
use crate::{Result, WeightError};

/// Resolution of the truncated-cone quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConeSpec {
    /// Dyadic truncation: heights cover `(t/2^depth, t)`.
    pub depth: usize,
    /// Midpoint panels across the aperture `(-1, 1)`.
    pub panels_s: usize,
    /// Midpoint panels across the top height layer `(t/2, t]`.
    pub panels_y: usize,
    /// Midpoint panels across the base interval for averages.
    pub panels_x: usize,
}

impl Default for ConeSpec {
    fn default() -> Self {
        Self { depth: 8, panels_s: 8, panels_y: 4, panels_x: 16 }
    }
}

impl ConeSpec {
    /// One refinement step: all panels double, one extra layer.
    pub fn refined(self) -> Self {
        Self {
            depth: self.depth + 1,
            panels_s: self.panels_s * 2,
            panels_y: self.panels_y * 2,
            panels_x: self.panels_x * 2,
        }
    }

    /// Cheaper preset for sweeps over many cone positions.
    pub const SWEEP: ConeSpec = ConeSpec { depth: 6, panels_s: 8, panels_y: 4, panels_x: 8 };

    fn validate(&self) -> Result<()> {
        if self.depth == 0 || self.depth > 40 {
            return Err(WeightError::InvalidParameter(format!(
                "cone depth must be in 1..=40, got {}",
                self.depth
            )));
        }
        for (name, n) in
            [("panels_s", self.panels_s), ("panels_y", self.panels_y), ("panels_x", self.panels_x)]
        {
            if n == 0 || n > 65536 {
                return Err(WeightError::InvalidParameter(format!(
                    "cone {name} must be in 1..=65536, got {n}"
                )));
            }
        }
        Ok(())
    }

    /// Depth actually usable at height scale `t`: sampled weights stop
    /// refining once a layer height falls under 8 grid cells, where cell
    /// quantization would dominate the half-mass asymmetry.
    fn effective_depth(&self, w: &WeightHandle, t: f64) -> usize {
        match w.resolution() {
            Some(cell) if cell > 0.0 => {
                let mut d = 1usize;
                while d < self.depth && t * 2.0f64.powi(-(d as i32 + 1)) >= 8.0 * cell {
                    d += 1;
                }
                d
            }
            _ => self.depth,
        }
    }
}

/// The aperture average `G(x, y) = ∫_{-1}^{1} η(x+sy, y) ds` by midpoints.
fn aperture_average(w: &WeightHandle, x: f64, y: f64, panels_s: usize) -> Result<f64> {
    let ds = 2.0 / panels_s as f64;
    let mut acc = KahanSum::new();
    for m in 0..panels_s {
        let s = -1.0 + (m as f64 + 0.5) * ds;
        acc.add(crate::carleson::eta(w, BoxPoint::new(x + s * y, y))? * ds);
    }
    Ok(acc.total())
}

fn check_cone_inputs(w: &WeightHandle, x: f64, t: f64, reach: f64) -> Result<()> {
    if !(x.is_finite() && t.is_finite() && t > 0.0) {
        return Err(WeightError::InvalidParameter(format!(
            "cone apex and height must be finite with t > 0, got ({x}, {t})"
        )));
    }
    let needed = Interval::new(x - reach * t, x + reach * t);
    if !w.domain().contains(&needed) {
        return Err(WeightError::DomainExceeded { requested: needed, domain: w.domain() });
    }
    Ok(())
}

/// Squared area functional at one point: the η integral over the
/// truncated aperture-1 cone above `x` up to height `t`.
///
/// Needs `(x − 1.52 t, x + 1.52 t)` inside the domain: the widest η
/// query sits a full height off-center plus half a (slightly enlarged)
/// height of half-mass reach.
pub fn area_function(w: &WeightHandle, x: f64, t: f64, spec: ConeSpec) -> Result<f64> {
    spec.validate()?;
    check_cone_inputs(w, x, t, 1.52)?;
    let depth = spec.effective_depth(w, t);
    let dv = (t / 2.0) / spec.panels_y as f64;
    let mut acc = KahanSum::new();
    for k in 1..=depth {
        let layer_scale = 2.0f64.powi(1 - k as i32);
        for j in 0..spec.panels_y {
            let v = t / 2.0 + (j as f64 + 0.5) * dv;
            let y = v * layer_scale;
            acc.add(aperture_average(w, x, y, spec.panels_s)? * dv / v);
        }
    }
    Ok(acc.total())
}

/// The interval average of the squared area functional, its split into
/// boundary terms plus twice the box functional, and the residual of
/// that identity.
#[derive(Debug, Clone, Copy)]
pub struct AreaReport {
    pub x0: f64,
    pub t: f64,
    /// `(1/t) ∫_I A_t(x)² dx` on the truncated cone.
    pub area_sq_avg: f64,
    /// The box functional at matching depth and panels.
    pub box_average: f64,
    /// Height-boundary term: aperture averages at the truncation floor
    /// against the top height.
    pub b1: f64,
    /// Right edge-shift term: η displaced one full height to the right
    /// against η in place.
    pub b21: f64,
    /// Left edge-shift term.
    pub b22: f64,
    /// Height-derivative term, plain `dy` measure, central differences.
    pub b3: f64,
    /// `|area_sq_avg − (2·box_average + b1 + b21 + b22 + b3)|`.
    pub identity_residual: f64,
    /// Layers actually used (may be fewer than requested on sampled
    /// grids).
    pub depth_used: usize,
    pub spec: ConeSpec,
}

/// Computes `(A_t²)_I` over `I(x0, t)` together with the four boundary
/// terms reconstructing it from the box functional.
///
/// Needs `(x0 − 2.02 t, x0 + 2.02 t)` inside the domain (edge-shifted η
/// and the height-derivative probes reach slightly past `2t`).
pub fn area_square_average(
    w: &WeightHandle,
    x0: f64,
    t: f64,
    spec: ConeSpec,
) -> Result<AreaReport> {
    spec.validate()?;
    check_cone_inputs(w, x0, t, 2.02)?;
    let depth = spec.effective_depth(w, t);
    let base_lo = x0 - t / 2.0;
    let dx = t / spec.panels_x as f64;
    let dv = (t / 2.0) / spec.panels_y as f64;
    let y_min = t * 2.0f64.powi(-(depth as i32));

    let mut area_sq = KahanSum::new();
    let mut b1 = KahanSum::new();
    let mut b21 = KahanSum::new();
    let mut b22 = KahanSum::new();
    let mut b3 = KahanSum::new();
    let ds = 2.0 / spec.panels_s as f64;
    for i in 0..spec.panels_x {
        let x = base_lo + (i as f64 + 0.5) * dx;
        // height-boundary term at the exact truncation edges
        let g_floor = aperture_average(w, x, y_min, spec.panels_s)?;
        let g_top = aperture_average(w, x, t, spec.panels_s)?;
        b1.add((g_floor - g_top) * dx / t);
        for k in 1..=depth {
            let layer_scale = 2.0f64.powi(1 - k as i32);
            for j in 0..spec.panels_y {
                let v = t / 2.0 + (j as f64 + 0.5) * dv;
                let y = v * layer_scale;
                let log_weight = dx * dv / (v * t);
                let here = crate::carleson::eta(w, BoxPoint::new(x, y))?;
                let right = crate::carleson::eta(w, BoxPoint::new(x + y, y))?;
                let left = crate::carleson::eta(w, BoxPoint::new(x - y, y))?;
                b21.add((right - here) * log_weight);
                b22.add((left - here) * log_weight);
                let h = y / 64.0;
                let plain_weight = dx * (dv * layer_scale) / t;
                for m in 0..spec.panels_s {
                    let s = -1.0 + (m as f64 + 0.5) * ds;
                    let u = x + s * y;
                    area_sq.add(crate::carleson::eta(w, BoxPoint::new(u, y))? * ds * log_weight);
                    let up = crate::carleson::eta(w, BoxPoint::new(u, y + h))?;
                    let down = crate::carleson::eta(w, BoxPoint::new(u, y - h))?;
                    b3.add((up - down) / (2.0 * h) * ds * plain_weight);
                }
            }
        }
    }
    let quad = BoxQuadrature { depth, panels_x: spec.panels_x, panels_y: spec.panels_y };
    let box_average = box_functional(w, x0, t, quad)?.value;
    let (area_sq_avg, b1, b21, b22, b3) =
        (area_sq.total(), b1.total(), b21.total(), b22.total(), b3.total());
    let identity_residual = (area_sq_avg - (2.0 * box_average + b1 + b21 + b22 + b3)).abs();
    Ok(AreaReport {
        x0,
        t,
        area_sq_avg,
        box_average,
        b1,
        b21,
        b22,
        b3,
        identity_residual,
        depth_used: depth,
        spec,
    })
}

/// Average of the right-endpoint density against the half-interval mass
/// around a box: `∫_{x−y}^{x+y} ω(u + y/2) / ω(u, u+y/2) du` by
/// midpoints.  Bounded by 8 for doubling-type weights; exactly 4 for a
/// constant.
pub fn density_mass_ratio_integral(
    w: &WeightHandle,
    x: f64,
    y: f64,
    panels: usize,
) -> Result<f64> {
    if !(x.is_finite() && y.is_finite() && y > 0.0) || panels == 0 {
        return Err(WeightError::InvalidParameter(format!(
            "ratio integral needs finite x, y > 0 and panels >= 1, got ({x}, {y}, {panels})"
        )));
    }
    let needed = Interval::new(x - y, x + 1.5 * y);
    if !w.domain().contains(&needed) {
        return Err(WeightError::DomainExceeded { requested: needed, domain: w.domain() });
    }
    let du = 2.0 * y / panels as f64;
    let mut acc = KahanSum::new();
    for i in 0..panels {
        let u = x - y + (i as f64 + 0.5) * du;
        let mass = w.mass(Interval::new(u, u + y / 2.0))?;
        if !(mass > 0.0) {
            return Err(WeightError::InvalidWeight(format!(
                "degenerate half-interval mass {mass} at {u}"
            )));
        }
        acc.add(w.density(u + y / 2.0)? / mass * du);
    }
    Ok(acc.total())
}

/// Side-by-side small-scale trends of cone averages and box averages.
#[derive(Debug, Clone)]
pub struct ConeBoxReport {
    /// Restricted-supremum profile of `(A_t²)_I` (floor 0).
    pub cone: OscillationProfile,
    /// Restricted-supremum profile of the box functional (floor 0).
    pub boxes: OscillationProfile,
    pub cone_trend: ModulusTrend,
    pub box_trend: ModulusTrend,
    /// True when both trends agree and neither is inconclusive.
    pub agree: bool,
    /// Min and max of cone/box value over scales where the box value is
    /// above 1e-14, when any.
    pub ratio_band: Option<(f64, f64)>,
    /// Cone positions skipped for divergent or degenerate masses.
    pub skipped: usize,
}

/// The cone-average value alone — the `(1/t) ∫_I A_t(x)² dx` quadrature
/// without the boundary-term split, for sweeps where only the value
/// matters.  Reach stays within `(x0 − 2t, x0 + 2t)`.
fn cone_square_value(w: &WeightHandle, x0: f64, t: f64, spec: ConeSpec) -> Result<f64> {
    let depth = spec.effective_depth(w, t);
    let base_lo = x0 - t / 2.0;
    let dx = t / spec.panels_x as f64;
    let dv = (t / 2.0) / spec.panels_y as f64;
    let ds = 2.0 / spec.panels_s as f64;
    let mut acc = KahanSum::new();
    for i in 0..spec.panels_x {
        let x = base_lo + (i as f64 + 0.5) * dx;
        for k in 1..=depth {
            let layer_scale = 2.0f64.powi(1 - k as i32);
            for j in 0..spec.panels_y {
                let v = t / 2.0 + (j as f64 + 0.5) * dv;
                let y = v * layer_scale;
                let log_weight = dx * dv / (v * t);
                for m in 0..spec.panels_s {
                    let s = -1.0 + (m as f64 + 0.5) * ds;
                    acc.add(
                        crate::carleson::eta(w, BoxPoint::new(x + s * y, y))? * ds * log_weight,
                    );
                }
            }
        }
    }
    Ok(acc.total())
}

/// Sweeps cone averages and box averages over the same scales and
/// compares their vanishing verdicts.
///
/// Cone positions are capped at 512 per scale — enough for cone bases to
/// tile an 8-unit window down to scale 1/64 with no gaps, while keeping
/// the cone sweep (an order of magnitude costlier per position than a
/// box) affordable; the box sweep keeps the caller's budget.
pub fn cone_box_equivalence(
    w: &WeightHandle,
    window: Interval,
    scales: &[f64],
    policy: SweepPolicy,
    spec: ConeSpec,
    quad: BoxQuadrature,
) -> Result<ConeBoxReport> {
    spec.validate()?;
    let cone_policy = SweepPolicy::new(policy.step_divisor, policy.max_positions.min(512));
    let cone_out = box_value_profile(window, scales, cone_policy, 2.0, 0.0, "cone-average", |c, t| {
        cone_square_value(w, c, t, spec)
    })?;
    let box_out = box_value_profile(window, scales, policy, 1.0, 0.0, "carleson-box", |c, t| {
        box_functional(w, c, t, quad).map(|b| b.value)
    })?;
    let cone_trend = classify_modulus(&cone_out.profile);
    let box_trend = classify_modulus(&box_out.profile);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (c, b) in cone_out.profile.points.iter().zip(&box_out.profile.points) {
        if b.value > 1e-14 {
            let r = c.value / b.value;
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    Ok(ConeBoxReport {
        agree: cone_trend == box_trend && cone_trend != ModulusTrend::Inconclusive,
        cone: cone_out.profile,
        boxes: box_out.profile,
        cone_trend,
        box_trend,
        ratio_band: if lo.is_finite() { Some((lo, hi)) } else { None },
        skipped: cone_out.skipped + box_out.skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::{AnalyticWeight, SampledWeight};

    fn window() -> Interval {
        Interval::new(-4.0, 4.0)
    }

    fn handle(w: AnalyticWeight) -> WeightHandle {
        WeightHandle::analytic(w, window()).unwrap()
    }

    fn abs_w() -> WeightHandle {
        handle(AnalyticWeight::power(0.0, 1.0).unwrap())
    }

    #[test]
    fn cone_spec_validation() {
        let w = handle(AnalyticWeight::constant(1.0).unwrap());
        let bad = ConeSpec { depth: 0, ..ConeSpec::default() };
        assert!(matches!(
            area_function(&w, 0.0, 0.1, bad),
            Err(WeightError::InvalidParameter(_))
        ));
        assert!(matches!(
            area_function(&w, 3.9, 0.2, ConeSpec::default()),
            Err(WeightError::DomainExceeded { .. })
        ));
    }

    #[test]
    fn area_function_constant_is_zero() {
        let w = handle(AnalyticWeight::constant(3.0).unwrap());
        let v = area_function(&w, 0.4, 0.3, ConeSpec::default()).unwrap();
        assert!(v.abs() < 1e-12, "{v}");
    }

    #[test]
    fn area_function_scale_invariant_at_power_center() {
        let w = abs_w();
        let a = area_function(&w, 0.0, 0.4, ConeSpec::default()).unwrap();
        let b = area_function(&w, 0.0, 0.2, ConeSpec::default()).unwrap();
        assert!(a > 0.1, "{a}");
        assert!((a - b).abs() < 0.02 * a.max(b), "{a} vs {b}");
    }

    #[test]
    fn identity_residual_small_for_smooth_weight() {
        let w = handle(AnalyticWeight::exp_sin(0.05, 1.0).unwrap());
        let rep = area_square_average(&w, 0.0, 0.1, ConeSpec::default()).unwrap();
        assert!(rep.identity_residual < 1e-2, "{rep:?}");
        let fine = area_square_average(&w, 0.0, 0.1, ConeSpec::default().refined()).unwrap();
        assert!(
            fine.identity_residual <= 0.5 * rep.identity_residual + 1e-15,
            "{} then {}",
            rep.identity_residual,
            fine.identity_residual
        );
    }

    #[test]
    fn identity_residual_relative_for_kinked_weight() {
        let w = abs_w();
        let rep = area_square_average(&w, 0.3, 0.2, ConeSpec::default()).unwrap();
        assert!(rep.area_sq_avg > 0.0);
        assert!(
            rep.identity_residual < 0.05 * rep.area_sq_avg,
            "residual {} vs average {}",
            rep.identity_residual,
            rep.area_sq_avg
        );
    }

    #[test]
    fn report_box_term_matches_box_functional() {
        let w = handle(AnalyticWeight::exp_sin(1.0, 1.0).unwrap());
        let spec = ConeSpec::default();
        let rep = area_square_average(&w, 0.3, 0.2, spec).unwrap();
        let quad =
            BoxQuadrature { depth: rep.depth_used, panels_x: spec.panels_x, panels_y: spec.panels_y };
        let b = box_functional(&w, 0.3, 0.2, quad).unwrap();
        assert_eq!(rep.box_average, b.value);
    }

    #[test]
    fn sampled_grids_clamp_the_depth() {
        let grid = crate::weight::GridSpec::new(window(), 4096).unwrap();
        let sw = SampledWeight::from_density(grid, "smooth", |x| (0.2 * x).cos() + 2.0).unwrap();
        let w = WeightHandle::sampled(sw);
        // cell = 8/4096; t/2^d >= 8*cell forces d <= 2 at t = 0.1
        let rep = area_square_average(&w, 0.0, 0.1, ConeSpec::default()).unwrap();
        assert_eq!(rep.depth_used, 2, "{rep:?}");
        assert!(rep.identity_residual < 1e-2);
    }

    #[test]
    fn density_mass_ratio_oracles() {
        let c = handle(AnalyticWeight::constant(7.0).unwrap());
        let v = density_mass_ratio_integral(&c, 0.5, 0.8, 512).unwrap();
        assert!((v - 4.0).abs() < 1e-12, "{v}");

        // |x| around the origin: closed-form pieces give ≈ 4.822
        let v = density_mass_ratio_integral(&abs_w(), 0.0, 1.0, 4096).unwrap();
        assert!((v - 4.822).abs() < 0.05, "{v}");

        for w in [abs_w(), handle(AnalyticWeight::step(0.0, 1.0, 2.0).unwrap()), handle(AnalyticWeight::exp_sin(1.0, 1.0).unwrap())] {
            let v = density_mass_ratio_integral(&w, 0.0, 1.0, 1024).unwrap();
            assert!(v < 8.0, "{}: {v}", w.label());
        }
    }

    #[test]
    fn cone_and_box_verdicts_agree_on_archetypes() {
        let scales = vec![0.4, 0.1, 0.025];
        let policy = SweepPolicy::default().with_max_positions(512);

        let c = handle(AnalyticWeight::constant(1.0).unwrap());
        let rep = cone_box_equivalence(
            &c,
            window(),
            &scales,
            policy,
            ConeSpec::SWEEP,
            BoxQuadrature::default(),
        )
        .unwrap();
        assert!(rep.agree, "{:?} vs {:?}", rep.cone_trend, rep.box_trend);
        assert_eq!(rep.cone_trend, ModulusTrend::Vanishing);

        let rep = cone_box_equivalence(
            &abs_w(),
            window(),
            &scales,
            policy,
            ConeSpec::SWEEP,
            BoxQuadrature::default(),
        )
        .unwrap();
        assert!(rep.agree, "{:?} vs {:?}", rep.cone_trend, rep.box_trend);
        assert_eq!(rep.cone_trend, ModulusTrend::NonVanishing);
        let (lo, hi) = rep.ratio_band.unwrap();
        // the cone square sees each box point from both cone flanks:
        // roughly twice the box value plus positive flux terms
        assert!(lo > 1.0 && hi < 10.0, "{lo} {hi}");
    }
}
