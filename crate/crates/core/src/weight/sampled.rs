//! Piecewise-constant sampled weights on uniform grids.

use crate::error::WeightError;
use crate::interval::Interval;
use crate::quadrature::KahanSum;
use crate::Result;

/// Uniform grid over a bounded domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    domain: Interval,
    cells: usize,
}

impl GridSpec {
    pub fn new(domain: Interval, cells: usize) -> Result<Self> {
        if cells < 2 {
            return Err(WeightError::InvalidParameter(format!(
                "grid needs at least 2 cells, got {cells}"
            )));
        }
        Ok(Self { domain, cells })
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn cell_width(&self) -> f64 {
        self.domain.length() / self.cells as f64
    }

    /// Left edge of cell `j` (`j` may equal `cells`, giving the domain end).
    pub fn edge(&self, j: usize) -> f64 {
        if j >= self.cells {
            self.domain.hi()
        } else {
            self.domain.lo() + j as f64 * self.cell_width()
        }
    }

    /// Midpoint of cell `j < cells`.
    pub fn cell_midpoint(&self, j: usize) -> f64 {
        self.domain.lo() + (j as f64 + 0.5) * self.cell_width()
    }

    /// Index of the cell containing `x` (clamped to the grid).
    pub fn cell_of(&self, x: f64) -> usize {
        let t = (x - self.domain.lo()) / self.cell_width();
        (t.floor() as isize).clamp(0, self.cells as isize - 1) as usize
    }
}

/// A weight known through per-cell densities on a uniform grid.
///
/// The model *is* the piecewise-constant function: all masses, log-masses
/// and derived quantities are exact for it. Partial cells contribute
/// proportionally, which is the exact integral of a constant over a
/// sub-cell. Prefix sums make every interval query O(1).
pub struct SampledWeight {
    grid: GridSpec,
    values: Vec<f64>,
    /// `prefix_mass[j] = ∫` from domain start to edge `j`; length `cells+1`.
    prefix_mass: Vec<f64>,
    /// Same for `ln(density)`.
    prefix_log: Vec<f64>,
    label: String,
}

impl SampledWeight {
    /// Build from explicit cell densities (all positive and finite).
    pub fn from_values(grid: GridSpec, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if values.len() != grid.cells() {
            return Err(WeightError::InvalidWeight(format!(
                "expected {} cell values, got {}",
                grid.cells(),
                values.len()
            )));
        }
        for (j, v) in values.iter().enumerate() {
            if !(v.is_finite() && *v > 0.0) {
                return Err(WeightError::InvalidWeight(format!(
                    "cell {j} density must be positive and finite, got {v}"
                )));
            }
        }
        let w = grid.cell_width();
        let mut prefix_mass = Vec::with_capacity(values.len() + 1);
        let mut prefix_log = Vec::with_capacity(values.len() + 1);
        let (mut am, mut al) = (KahanSum::new(), KahanSum::new());
        prefix_mass.push(0.0);
        prefix_log.push(0.0);
        for v in &values {
            am.add(v * w);
            al.add(v.ln() * w);
            prefix_mass.push(am.total());
            prefix_log.push(al.total());
        }
        Ok(Self { grid, values, prefix_mass, prefix_log, label: label.into() })
    }

    /// Sample a density function at cell midpoints.
    pub fn from_density<F: Fn(f64) -> f64>(
        grid: GridSpec,
        label: impl Into<String>,
        f: F,
    ) -> Result<Self> {
        let values = (0..grid.cells()).map(|j| f(grid.cell_midpoint(j))).collect();
        Self::from_values(grid, values, label)
    }

    /// Resample scattered `(x, density)` points onto the grid by linear
    /// interpolation at cell midpoints. Points must be strictly
    /// increasing in `x` and cover the grid domain.
    pub fn resample_from_points(
        grid: GridSpec,
        points: &[(f64, f64)],
        label: impl Into<String>,
    ) -> Result<Self> {
        if points.len() < 2 {
            return Err(WeightError::InvalidWeight(
                "sampled weight needs at least 2 data points".into(),
            ));
        }
        for w in points.windows(2) {
            if !(w[0].0 < w[1].0) {
                return Err(WeightError::InvalidWeight(format!(
                    "sample abscissas must be strictly increasing, got {} then {}",
                    w[0].0, w[1].0
                )));
            }
        }
        for (x, v) in points {
            if !x.is_finite() || !(v.is_finite() && *v > 0.0) {
                return Err(WeightError::InvalidWeight(format!(
                    "sample ({x}, {v}) must be finite with positive density"
                )));
            }
        }
        let d = grid.domain();
        if points[0].0 > d.lo() || points[points.len() - 1].0 < d.hi() {
            return Err(WeightError::InvalidWeight(format!(
                "samples cover [{}, {}] but the window is [{}, {}]",
                points[0].0,
                points[points.len() - 1].0,
                d.lo(),
                d.hi()
            )));
        }
        let interp = |x: f64| -> f64 {
            // binary search for the bracketing pair
            let mut lo = 0usize;
            let mut hi = points.len() - 1;
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if points[mid].0 <= x {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let (x0, v0) = points[lo];
            let (x1, v1) = points[hi];
            v0 + (v1 - v0) * ((x - x0) / (x1 - x0))
        };
        Self::from_density(grid, label, interp)
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The sampled model of `w^s` on the same grid.
    pub fn powf(&self, s: f64) -> SampledWeight {
        let values: Vec<f64> = self.values.iter().map(|v| v.powf(s)).collect();
        SampledWeight::from_values(self.grid, values, format!("pow({},{s})", self.label))
            .expect("positive cells stay positive under real powers")
    }

    /// The sampled model of `c * w`, `c > 0`, on the same grid.
    pub fn scaled(&self, c: f64) -> SampledWeight {
        let values: Vec<f64> = self.values.iter().map(|v| v * c).collect();
        SampledWeight::from_values(self.grid, values, format!("scaled({c},{})", self.label))
            .expect("positive cells stay positive under positive scaling")
    }

    /// Exact primitive of the piecewise-constant model at `x`.
    fn primitive(&self, x: f64) -> f64 {
        let j = self.grid.cell_of(x);
        self.prefix_mass[j] + (x - self.grid.edge(j)) * self.values[j]
    }

    fn log_primitive(&self, x: f64) -> f64 {
        let j = self.grid.cell_of(x);
        self.prefix_log[j] + (x - self.grid.edge(j)) * self.values[j].ln()
    }

    pub fn density(&self, x: f64) -> f64 {
        self.values[self.grid.cell_of(x)]
    }

    pub fn log_density(&self, x: f64) -> f64 {
        self.values[self.grid.cell_of(x)].ln()
    }

    /// Spans at most this many cells wide are summed cell by cell: a
    /// prefix difference only resolves the prefix magnitude's rounding,
    /// which a short interval cannot absorb.
    const DIRECT_SUM_CELLS: usize = 64;

    /// Sum `per_cell(value) · overlap length` over the cells meeting `i`.
    fn direct_sum(&self, i: Interval, per_cell: impl Fn(f64) -> f64) -> f64 {
        let mut total = 0.0;
        self.for_each_overlap(i, |len, v| total += len * per_cell(v));
        total
    }

    fn for_each_overlap(&self, i: Interval, mut f: impl FnMut(f64, f64)) {
        let first = self.grid.cell_of(i.lo());
        let last = self.grid.cell_of(i.hi());
        for j in first..=last {
            let lo = self.grid.edge(j).max(i.lo());
            let hi = self.grid.edge(j + 1).min(i.hi());
            if hi > lo {
                f(hi - lo, self.values[j]);
            }
        }
    }

    fn short_span(&self, i: Interval) -> bool {
        self.grid.cell_of(i.hi()) - self.grid.cell_of(i.lo()) <= Self::DIRECT_SUM_CELLS
    }

    pub fn mass(&self, i: Interval) -> f64 {
        if self.short_span(i) {
            self.direct_sum(i, |v| v)
        } else {
            self.primitive(i.hi()) - self.primitive(i.lo())
        }
    }

    pub fn log_mass(&self, i: Interval) -> f64 {
        if self.short_span(i) {
            self.direct_sum(i, f64::ln)
        } else {
            self.log_primitive(i.hi()) - self.log_primitive(i.lo())
        }
    }

    pub fn half_masses(&self, lo: f64, mid: f64, hi: f64) -> (f64, f64) {
        let (a, m, b) = (self.primitive(lo), self.primitive(mid), self.primitive(hi));
        (m - a, b - m)
    }

    /// Visit the grid cells overlapping `i` in order, trimmed to `i`,
    /// with the (exactly constant) `ln(density)` on each.
    pub fn for_each_log_cell<F: FnMut(Interval, f64)>(&self, i: Interval, mut f: F) {
        let first = self.grid.cell_of(i.lo());
        let last = self.grid.cell_of(i.hi());
        for j in first..=last {
            let lo = self.grid.edge(j).max(i.lo());
            let hi = self.grid.edge(j + 1).min(i.hi());
            if hi > lo {
                f(Interval::new(lo, hi), self.values[j].ln());
            }
        }
    }
}
