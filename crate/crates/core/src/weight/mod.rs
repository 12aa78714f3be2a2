//! Weight representations and exact interval queries.
//!
//! A [`WeightHandle`] owns one positive weight on a bounded working
//! domain, in one of two representations:
//!
//! * **analytic** — a closed-form family carrying exact primitives of the
//!   density and of its logarithm, so masses and log-masses are evaluated
//!   by endpoint differences;
//! * **sampled** — piecewise-constant cell densities on a uniform grid
//!   with precomputed prefix sums, so masses and log-masses are exact *for
//!   the sampled model* (partial cells enter proportionally) and cost O(1).
//!
//! Both evaluate masses as differences of a deterministic pointwise
//! primitive, so additivity `mass(a,b) + mass(b,c) = mass(a,c)` telescopes
//! to within a rounding error of the outer additions regardless of
//! interval count.

mod analytic;
mod sampled;
pub mod spec;

pub use analytic::{AnalyticWeight, Family, PointFn};
pub use sampled::{GridSpec, SampledWeight};

use crate::error::WeightError;
use crate::interval::{BoxPoint, Interval};
use crate::Result;
use std::sync::{Arc, OnceLock};

/// One segment of the piecewise view of `log w` over an interval: its
/// extent, exact mean of `log w` over it, and a pointwise `log w` sample
/// at its midpoint.
#[derive(Debug, Clone, Copy)]
pub struct LogSegment {
    pub seg: Interval,
    pub mean_log: f64,
    pub mid_log: f64,
}

/// A positive weight on a bounded working domain.
///
/// All query intervals must lie inside the working domain; this keeps
/// every supremum in the library a supremum over a declared bounded
/// window, which reports must (and do) state.
pub struct WeightHandle {
    repr: Repr,
    domain: Interval,
    label: String,
    reciprocal: OnceLock<std::result::Result<Arc<WeightHandle>, WeightError>>,
}

enum Repr {
    Analytic(AnalyticWeight),
    Sampled(SampledWeight),
}

impl std::fmt::Debug for WeightHandle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WeightHandle")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .finish()
    }
}

impl WeightHandle {
    /// Wrap an analytic family on its working domain.
    pub fn analytic(w: AnalyticWeight, domain: Interval) -> Result<Self> {
        w.validate(domain)?;
        let w = w.prepare(domain)?;
        let label = w.label();
        Ok(Self { repr: Repr::Analytic(w), domain, label, reciprocal: OnceLock::new() })
    }

    /// Wrap a sampled weight; the working domain is its grid domain.
    pub fn sampled(w: SampledWeight) -> Self {
        Self {
            domain: w.grid().domain(),
            label: w.label().to_string(),
            repr: Repr::Sampled(w),
            reciprocal: OnceLock::new(),
        }
    }

    /// Working domain: every query interval must sit inside it.
    pub fn domain(&self) -> Interval {
        self.domain
    }

    /// Human-readable construction label (family spec or data source).
    pub fn label(&self) -> &str {
        &self.label
    }

    /// Grid cell width for sampled weights; `None` for analytic ones.
    pub fn resolution(&self) -> Option<f64> {
        match &self.repr {
            Repr::Analytic(_) => None,
            Repr::Sampled(s) => Some(s.grid().cell_width()),
        }
    }

    fn check_interval(&self, i: Interval) -> Result<()> {
        if self.domain.contains(&i) {
            Ok(())
        } else {
            Err(WeightError::DomainExceeded { requested: i, domain: self.domain })
        }
    }

    fn check_point(&self, x: f64) -> Result<()> {
        if self.domain.contains_point(x) {
            Ok(())
        } else {
            Err(WeightError::PointOutsideDomain { point: x, domain: self.domain })
        }
    }

    /// Pointwise density `w(x)`.
    pub fn density(&self, x: f64) -> Result<f64> {
        self.check_point(x)?;
        Ok(match &self.repr {
            Repr::Analytic(w) => w.density(x),
            Repr::Sampled(s) => s.density(x),
        })
    }

    /// Pointwise `log w(x)`.
    pub fn log_density(&self, x: f64) -> Result<f64> {
        self.check_point(x)?;
        Ok(match &self.repr {
            Repr::Analytic(w) => w.density(x).ln(),
            Repr::Sampled(s) => s.log_density(x),
        })
    }

    /// Mass `w(I) = ∫_I w`.
    ///
    /// Positive for every nondegenerate interval; `Diverged` when the
    /// density is not integrable over `I` (possible only for transformed
    /// power families).
    pub fn mass(&self, i: Interval) -> Result<f64> {
        self.check_interval(i)?;
        match &self.repr {
            Repr::Analytic(w) => w.mass(i),
            Repr::Sampled(s) => Ok(s.mass(i)),
        }
    }

    /// Average density `w(I) / |I|`.
    pub fn average(&self, i: Interval) -> Result<f64> {
        Ok(self.mass(i)? / i.length())
    }

    /// Log-mass `∫_I log w`.
    pub fn log_mass(&self, i: Interval) -> Result<f64> {
        self.check_interval(i)?;
        match &self.repr {
            Repr::Analytic(w) => w.log_mass(i),
            Repr::Sampled(s) => Ok(s.log_mass(i)),
        }
    }

    /// Mean of `log w` over `I`.
    pub fn log_average(&self, i: Interval) -> Result<f64> {
        Ok(self.log_mass(i)? / i.length())
    }

    /// Masses of the left and right halves of the base interval of `z`,
    /// evaluated from three primitive values so that their sum is exactly
    /// the full-interval mass.
    pub fn half_masses(&self, z: BoxPoint) -> Result<(f64, f64)> {
        let i = z.interval();
        self.check_interval(i)?;
        match &self.repr {
            Repr::Analytic(w) => w.half_masses(i.lo(), z.x(), i.hi()),
            Repr::Sampled(s) => Ok(s.half_masses(i.lo(), z.x(), i.hi())),
        }
    }

    /// Primitive homeomorphism `h(x) = h0 + signed mass between 0 and x`.
    ///
    /// Requires `0` and `x` in the working domain. Strictly increasing in
    /// `x` since the density is positive.
    pub fn primitive_homeomorphism(&self, x: f64, h0: f64) -> Result<f64> {
        self.check_point(x)?;
        self.check_point(0.0)?;
        let signed = if x >= 0.0 {
            self.mass_signed_segment(0.0, x)?
        } else {
            -self.mass_signed_segment(x, 0.0)?
        };
        Ok(h0 + signed)
    }

    fn mass_signed_segment(&self, a: f64, b: f64) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        self.mass(Interval::new(a, b))
    }

    /// The transformed weight `w^s` on the same working domain.
    ///
    /// Closed for every analytic family except `custom`; for sampled
    /// weights the cell densities are raised to `s` and prefix sums
    /// rebuilt. The result may have non-integrable singularities (power
    /// family with `s*alpha <= -1`); these surface as `Diverged` on the
    /// offending mass queries, not at construction.
    pub fn powf(&self, s: f64) -> Result<WeightHandle> {
        if !s.is_finite() {
            return Err(WeightError::InvalidParameter(format!(
                "power transform exponent must be finite, got {s}"
            )));
        }
        match &self.repr {
            Repr::Analytic(w) => {
                let transformed = w.powf(s)?;
                WeightHandle::analytic(transformed, self.domain)
            }
            Repr::Sampled(sw) => Ok(WeightHandle::sampled(sw.powf(s))),
        }
    }

    /// The weight `c * w`, `c > 0`, on the same working domain.
    pub fn scaled(&self, c: f64) -> Result<WeightHandle> {
        if !(c.is_finite() && c > 0.0) {
            return Err(WeightError::InvalidParameter(format!(
                "scale factor must be positive and finite, got {c}"
            )));
        }
        match &self.repr {
            Repr::Analytic(w) => WeightHandle::analytic(w.scaled(c)?, self.domain),
            Repr::Sampled(sw) => Ok(WeightHandle::sampled(sw.scaled(c))),
        }
    }

    /// The reciprocal weight `1/w`, built on first use and cached.
    pub fn reciprocal(&self) -> Result<Arc<WeightHandle>> {
        let cached = self
            .reciprocal
            .get_or_init(|| self.powf(-1.0).map(Arc::new));
        cached.clone()
    }

    /// Piecewise view of `log w` over `I`.
    ///
    /// For sampled weights the segments are the grid cells overlapping
    /// `I` (partial end cells trimmed), on which `log w` is exactly
    /// constant. For analytic weights, `fallback_panels` equal panels
    /// with exact per-panel means. The callback receives segments in
    /// left-to-right order.
    pub fn for_each_log_segment<F: FnMut(LogSegment)>(
        &self,
        i: Interval,
        fallback_panels: usize,
        mut f: F,
    ) -> Result<()> {
        self.check_interval(i)?;
        match &self.repr {
            Repr::Sampled(s) => {
                s.for_each_log_cell(i, |seg, v| {
                    f(LogSegment { seg, mean_log: v, mid_log: v });
                });
                Ok(())
            }
            Repr::Analytic(w) => {
                let panels = fallback_panels.max(1);
                let h = i.length() / panels as f64;
                for j in 0..panels {
                    let lo = i.lo() + j as f64 * h;
                    let hi = if j + 1 == panels { i.hi() } else { i.lo() + (j + 1) as f64 * h };
                    let seg = Interval::new(lo, hi);
                    let mean = w.log_mass(seg)? / seg.length();
                    let mid = w.density(seg.midpoint()).ln();
                    f(LogSegment { seg, mean_log: mean, mid_log: mid });
                }
                Ok(())
            }
        }
    }
}
