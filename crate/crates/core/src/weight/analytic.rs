//! Closed-form weight families with exact primitives.

use crate::error::WeightError;
use crate::interval::Interval;
use crate::quadrature::{gauss8, KahanSum};
use crate::Result;
use std::sync::Arc;

/// Pointwise function used by the `custom` family.
pub type PointFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Analytic weight family.
///
/// Every built-in family is closed under raising to a real power, which
/// is how reciprocal weights (`s = -1`) and the `A_p` dual exponent
/// (`s = -1/(p-1)`) are produced without any numerical inversion.
#[derive(Clone)]
pub enum Family {
    /// `w(x) = c`.
    Constant { c: f64 },
    /// `w(x) = |x - center|^alpha`. Locally integrable iff `alpha > -1`;
    /// transformed instances may carry any exponent, with non-integrable
    /// mass queries reported as diverged.
    Power { center: f64, alpha: f64 },
    /// `w(x) = exp(a sin(b x))`; the primitive is tabulated (see
    /// [`AnalyticWeight::prepare`]), the log-primitive is closed-form.
    ExpSin { a: f64, b: f64 },
    /// Piecewise constant with one jump: `left` for `x < x0`, `right` after.
    Step { x0: f64, left: f64, right: f64 },
    /// Caller-supplied density with its primitive and (optionally) the
    /// primitive of its logarithm. Not closed under power transforms.
    Custom {
        name: String,
        density: PointFn,
        antiderivative: PointFn,
        log_antiderivative: Option<PointFn>,
    },
}

impl std::fmt::Debug for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&family_label(self))
    }
}

fn family_label(fam: &Family) -> String {
    match fam {
        Family::Constant { c } => format!("constant:{c}"),
        Family::Power { center, alpha } => format!("power:{center}:{alpha}"),
        Family::ExpSin { a, b } => format!("expsin:{a}:{b}"),
        Family::Step { x0, left, right } => format!("step:{x0}:{left}:{right}"),
        Family::Custom { name, .. } => format!("custom:{name}"),
    }
}

/// Tabulated primitive for families without a closed-form one.
///
/// The working domain is split into `SEGMENTS` equal segments; the
/// primitive at segment boundaries is accumulated from per-segment
/// 8-point Gauss panels with compensated summation, and a query adds one
/// more Gauss panel from the nearest boundary below. For the smooth
/// densities tabulated here the result is exact to a few ulps, and it is
/// a deterministic pointwise function, so mass additivity telescopes
/// exactly like a closed form.
#[derive(Clone)]
struct PrimitiveTable {
    lo: f64,
    seg_width: f64,
    cumulative: Vec<f64>,
}

const TABLE_SEGMENTS: usize = 1 << 16;

impl PrimitiveTable {
    fn build<F: Fn(f64) -> f64>(domain: Interval, f: F) -> Self {
        let n = TABLE_SEGMENTS;
        let lo = domain.lo();
        let seg_width = domain.length() / n as f64;
        let mut cumulative = Vec::with_capacity(n + 1);
        let mut acc = KahanSum::new();
        cumulative.push(0.0);
        for j in 0..n {
            let a = lo + j as f64 * seg_width;
            acc.add(gauss8(a, a + seg_width, &f));
            cumulative.push(acc.total());
        }
        Self { lo, seg_width, cumulative }
    }

    fn eval<F: Fn(f64) -> f64>(&self, x: f64, f: F) -> f64 {
        let t = (x - self.lo) / self.seg_width;
        let j = (t.floor() as isize).clamp(0, TABLE_SEGMENTS as isize - 1) as usize;
        let base = self.lo + j as f64 * self.seg_width;
        if x == base {
            self.cumulative[j]
        } else {
            self.cumulative[j] + gauss8(base, x, f)
        }
    }
}

/// A weight in closed form: family parameters plus, when needed, the
/// tabulated primitive over the working domain.
///
/// `scale` is a positive multiplier applied on top of the family density
/// (`scale * w`). It keeps every family closed under positive scalar
/// multiplication: the primitive is multiplied through and the
/// log-primitive gains a linear term `x ln(scale)`.
#[derive(Clone)]
pub struct AnalyticWeight {
    family: Family,
    table: Option<PrimitiveTable>,
    scale: f64,
}

impl AnalyticWeight {
    /// Constant weight `c > 0`.
    pub fn constant(c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(WeightError::InvalidWeight(format!(
                "constant density must be positive and finite, got {c}"
            )));
        }
        Ok(Self::from_family(Family::Constant { c }))
    }

    /// Power weight `|x - center|^alpha` with `alpha > -1` (local
    /// integrability).
    pub fn power(center: f64, alpha: f64) -> Result<Self> {
        if !center.is_finite() || !alpha.is_finite() {
            return Err(WeightError::InvalidWeight(format!(
                "power parameters must be finite, got center {center}, exponent {alpha}"
            )));
        }
        if alpha <= -1.0 {
            return Err(WeightError::InvalidWeight(format!(
                "power exponent must exceed -1 for local integrability, got {alpha}"
            )));
        }
        Ok(Self::from_family(Family::Power { center, alpha }))
    }

    /// Smooth oscillating weight `exp(a sin(b x))`, `b != 0`.
    pub fn exp_sin(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() || b == 0.0 {
            return Err(WeightError::InvalidWeight(format!(
                "expsin parameters must be finite with nonzero frequency, got a {a}, b {b}"
            )));
        }
        Ok(Self::from_family(Family::ExpSin { a, b }))
    }

    /// Step weight with one jump at `x0`.
    pub fn step(x0: f64, left: f64, right: f64) -> Result<Self> {
        let ok = x0.is_finite()
            && left.is_finite()
            && right.is_finite()
            && left > 0.0
            && right > 0.0;
        if !ok {
            return Err(WeightError::InvalidWeight(format!(
                "step parameters must be finite with positive levels, got x0 {x0}, levels {left}/{right}"
            )));
        }
        Ok(Self::from_family(Family::Step { x0, left, right }))
    }

    /// Caller-supplied closed-form weight. `antiderivative` must be a
    /// primitive of `density`; `log_antiderivative`, when given, a
    /// primitive of `ln(density)`. Log-based analyses fail with
    /// `Unsupported` without the latter.
    pub fn custom(
        name: impl Into<String>,
        density: PointFn,
        antiderivative: PointFn,
        log_antiderivative: Option<PointFn>,
    ) -> Self {
        Self::from_family(Family::Custom {
            name: name.into(),
            density,
            antiderivative,
            log_antiderivative,
        })
    }

    pub(crate) fn from_family(family: Family) -> Self {
        Self { family, table: None, scale: 1.0 }
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn label(&self) -> String {
        let base = family_label(&self.family);
        if self.scale == 1.0 {
            base
        } else {
            format!("scaled:{}:{base}", self.scale)
        }
    }

    /// Finish construction for a working domain: validate parameters and
    /// build the tabulated primitive when the family needs one. Called by
    /// `WeightHandle::analytic`.
    pub(crate) fn validate(&self, _domain: Interval) -> Result<()> {
        match &self.family {
            Family::Constant { c } => {
                if !(c.is_finite() && *c > 0.0) {
                    return Err(WeightError::InvalidWeight(format!(
                        "constant density must be positive and finite, got {c}"
                    )));
                }
            }
            Family::Power { center, alpha } => {
                if !center.is_finite() || !alpha.is_finite() {
                    return Err(WeightError::InvalidWeight(
                        "power parameters must be finite".into(),
                    ));
                }
            }
            Family::ExpSin { a, b } => {
                if !a.is_finite() || !b.is_finite() || *b == 0.0 {
                    return Err(WeightError::InvalidWeight(
                        "expsin parameters must be finite with nonzero frequency".into(),
                    ));
                }
            }
            Family::Step { x0, left, right } => {
                if !x0.is_finite() || !(left.is_finite() && *left > 0.0) || !(right.is_finite() && *right > 0.0) {
                    return Err(WeightError::InvalidWeight(
                        "step parameters must be finite with positive levels".into(),
                    ));
                }
            }
            Family::Custom { .. } => {}
        }
        Ok(())
    }

    /// Build the tabulated primitive if this family requires one.
    pub(crate) fn prepare(mut self, domain: Interval) -> Result<Self> {
        self.validate(domain)?;
        if let Family::ExpSin { a, b } = self.family {
            if self.table.is_none() {
                self.table =
                    Some(PrimitiveTable::build(domain, move |x| (a * (b * x).sin()).exp()));
            }
        }
        Ok(self)
    }

    /// Pointwise density.
    pub fn density(&self, x: f64) -> f64 {
        self.scale * self.family_density(x)
    }

    fn family_density(&self, x: f64) -> f64 {
        match &self.family {
            Family::Constant { c } => *c,
            Family::Power { center, alpha } => {
                let d = (x - center).abs();
                if *alpha == 0.0 {
                    1.0
                } else {
                    d.powf(*alpha)
                }
            }
            Family::ExpSin { a, b } => (a * (b * x).sin()).exp(),
            Family::Step { x0, left, right } => {
                if x < *x0 {
                    *left
                } else {
                    *right
                }
            }
            Family::Custom { density, .. } => density(x),
        }
    }

    /// Primitive of the density at `x` (family-specific base point).
    fn primitive(&self, x: f64) -> f64 {
        self.scale * self.family_primitive(x)
    }

    fn family_primitive(&self, x: f64) -> f64 {
        match &self.family {
            Family::Constant { c } => c * x,
            Family::Power { center, alpha } => {
                let d = x - center;
                if *alpha == -1.0 {
                    // like the general branch, odd in d so the primitive
                    // increases on both sides of the singularity
                    d.signum() * d.abs().ln()
                } else {
                    let p = alpha + 1.0;
                    d.signum() * d.abs().powf(p) / p
                }
            }
            Family::ExpSin { a, b } => {
                let (a, b) = (*a, *b);
                self.table
                    .as_ref()
                    .expect("expsin primitive table built at handle construction")
                    .eval(x, move |u| (a * (b * u).sin()).exp())
            }
            Family::Step { x0, left, right } => {
                if x < *x0 {
                    left * (x - x0)
                } else {
                    right * (x - x0)
                }
            }
            Family::Custom { antiderivative, .. } => antiderivative(x),
        }
    }

    /// Primitive of `ln(density)` at `x`.
    fn log_primitive(&self, x: f64) -> Result<f64> {
        let shift = if self.scale == 1.0 { 0.0 } else { x * self.scale.ln() };
        Ok(shift + self.family_log_primitive(x)?)
    }

    fn family_log_primitive(&self, x: f64) -> Result<f64> {
        Ok(match &self.family {
            Family::Constant { c } => x * c.ln(),
            Family::Power { center, alpha } => {
                let d = x - center;
                if d == 0.0 {
                    0.0
                } else {
                    alpha * (d * d.abs().ln() - d)
                }
            }
            Family::ExpSin { a, b } => -(a / b) * (b * x).cos(),
            Family::Step { x0, left, right } => {
                if x < *x0 {
                    left.ln() * (x - x0)
                } else {
                    right.ln() * (x - x0)
                }
            }
            Family::Custom { name, log_antiderivative, .. } => match log_antiderivative {
                Some(g) => g(x),
                None => {
                    return Err(WeightError::Unsupported(format!(
                        "custom weight `{name}` has no log primitive; log-based analyses unavailable"
                    )))
                }
            },
        })
    }

    /// True when `∫_I w` is finite.
    fn integrable_over(&self, lo: f64, hi: f64) -> bool {
        match &self.family {
            Family::Power { center, alpha } => {
                *alpha > -1.0 || !(lo <= *center && *center <= hi)
            }
            _ => true,
        }
    }

    /// Lengths of the pieces of `i` left and right of a step at `x0`.
    fn split_at(i: Interval, x0: f64) -> (f64, f64) {
        let left = (x0.min(i.hi()) - i.lo()).max(0.0);
        (left, i.length() - left)
    }

    pub(crate) fn mass(&self, i: Interval) -> Result<f64> {
        if !self.integrable_over(i.lo(), i.hi()) {
            return Err(WeightError::Diverged { what: "mass", interval: i });
        }
        // piecewise-constant families: level times length is exact, while
        // the generic primitive difference cancels on short intervals far
        // from the anchor
        match &self.family {
            Family::Constant { c } => Ok(self.scale * c * i.length()),
            Family::Step { x0, left, right } => {
                let (ll, rl) = Self::split_at(i, *x0);
                Ok(self.scale * (left * ll + right * rl))
            }
            _ => Ok(self.primitive(i.hi()) - self.primitive(i.lo())),
        }
    }

    pub(crate) fn log_mass(&self, i: Interval) -> Result<f64> {
        match &self.family {
            Family::Constant { c } => Ok((self.scale * c).ln() * i.length()),
            Family::Step { x0, left, right } => {
                let (ll, rl) = Self::split_at(i, *x0);
                Ok((self.scale * left).ln() * ll + (self.scale * right).ln() * rl)
            }
            _ => Ok(self.log_primitive(i.hi())? - self.log_primitive(i.lo())?),
        }
    }

    pub(crate) fn half_masses(&self, lo: f64, mid: f64, hi: f64) -> Result<(f64, f64)> {
        if !self.integrable_over(lo, hi) {
            return Err(WeightError::Diverged {
                what: "mass",
                interval: Interval::new(lo, hi),
            });
        }
        let (a, m, b) = (self.primitive(lo), self.primitive(mid), self.primitive(hi));
        Ok((m - a, b - m))
    }

    /// The family of `w^s`; every built-in family is closed under this.
    pub(crate) fn powf(&self, s: f64) -> Result<AnalyticWeight> {
        let family = match &self.family {
            Family::Constant { c } => {
                let cs = c.powf(s);
                if !(cs.is_finite() && cs > 0.0) {
                    return Err(WeightError::InvalidParameter(format!(
                        "constant {c} to power {s} is not a positive finite density"
                    )));
                }
                Family::Constant { c: cs }
            }
            Family::Power { center, alpha } => {
                Family::Power { center: *center, alpha: alpha * s }
            }
            Family::ExpSin { a, b } => Family::ExpSin { a: a * s, b: *b },
            Family::Step { x0, left, right } => {
                Family::Step { x0: *x0, left: left.powf(s), right: right.powf(s) }
            }
            Family::Custom { name, .. } => {
                return Err(WeightError::Unsupported(format!(
                    "custom weight `{name}` has no closed power transform"
                )))
            }
        };
        let scale = self.scale.powf(s);
        if !(scale.is_finite() && scale > 0.0) {
            return Err(WeightError::InvalidParameter(format!(
                "scale {} to power {s} is not a positive finite multiplier",
                self.scale
            )));
        }
        let mut out = AnalyticWeight::from_family(family);
        out.scale = scale;
        Ok(out)
    }

    /// The weight `c * w`, `c > 0`. Family parameters and any tabulated
    /// primitive are reused; only the scalar multiplier changes.
    pub(crate) fn scaled(&self, c: f64) -> Result<AnalyticWeight> {
        let scale = self.scale * c;
        if !(c.is_finite() && c > 0.0 && scale.is_finite() && scale > 0.0) {
            return Err(WeightError::InvalidParameter(format!(
                "scale factor must be positive and finite, got {c}"
            )));
        }
        Ok(Self { family: self.family.clone(), table: self.table.clone(), scale })
    }
}
