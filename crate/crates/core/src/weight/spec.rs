//! Weight family specification strings and the family registry.
//!
//! Grammar (colon-separated, numbers in ordinary float syntax):
//!
//! * `constant:<c>` — constant density `c > 0`
//! * `power:<center>:<alpha>` — `|x - center|^alpha`, `alpha > -1`
//! * `expsin:<a>:<b>` — `exp(a sin(b x))`, `b != 0`
//! * `step:<x0>:<v1>:<v2>` — `v1` left of `x0`, `v2` right of it
//! * `martingale:<seed>:<levels>:<c0>:<decay>` — seeded dyadic
//!   log-martingale: `ln w = Σ_k ±c_k` with independent signs per dyadic
//!   cell of each level `k < levels` and `c_k = c0 * decay^k`; realized as
//!   a sampled weight on the experiment grid
//! * `sampled:<path>` — CSV of `x,density` rows resampled onto the grid

use super::{AnalyticWeight, GridSpec, SampledWeight, WeightHandle};
use crate::error::WeightError;
use crate::interval::Interval;
use crate::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Maximum martingale depth; keeps the sign tables small and within any
/// reasonable grid resolution.
pub const MAX_MARTINGALE_LEVELS: u32 = 20;

/// Registry entry describing one weight family.
pub struct FamilyInfo {
    pub name: &'static str,
    pub syntax: &'static str,
    pub summary: &'static str,
    /// What the small-scale analyses are expected to show on archetypal
    /// members of the family.
    pub archetype: &'static str,
}

/// The built-in family registry, in listing order.
pub fn families() -> Vec<FamilyInfo> {
    vec![
        FamilyInfo {
            name: "constant",
            syntax: "constant:<c>",
            summary: "constant density c > 0",
            archetype: "all oscillation and box moduli vanish identically",
        },
        FamilyInfo {
            name: "power",
            syntax: "power:<center>:<alpha>",
            summary: "|x - center|^alpha with alpha > -1 (exact primitives)",
            archetype: "doubling but not vanishing-doubling; moduli stay bounded away from 0 at the singularity",
        },
        FamilyInfo {
            name: "expsin",
            syntax: "expsin:<a>:<b>",
            summary: "exp(a sin(b x)), smooth log-density (tabulated primitive)",
            archetype: "all small-scale moduli vanish (log-density is smooth)",
        },
        FamilyInfo {
            name: "step",
            syntax: "step:<x0>:<v1>:<v2>",
            summary: "single jump between positive levels v1, v2",
            archetype: "non-vanishing moduli concentrated at the jump",
        },
        FamilyInfo {
            name: "martingale",
            syntax: "martingale:<seed>:<levels>:<c0>:<decay>",
            summary: "seeded dyadic log-martingale, coefficients c0 * decay^k (sampled)",
            archetype: "decay = 1: moduli stay positive at all scales; fast decay: moduli vanish",
        },
        FamilyInfo {
            name: "sampled",
            syntax: "sampled:<path>",
            summary: "CSV of x,density rows resampled onto the experiment grid",
            archetype: "behavior inherited from the data",
        },
    ]
}

fn bad(spec: &str, reason: impl Into<String>) -> WeightError {
    WeightError::InvalidSpec { spec: spec.to_string(), reason: reason.into() }
}

fn parse_f64(spec: &str, field: &str, s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| bad(spec, format!("{field} `{s}` is not a number")))
}

/// Parse a family spec string into a weight on `window`.
///
/// `cells` is the experiment grid resolution, used by the sampled-backed
/// families (`martingale`, `sampled`); analytic families ignore it.
pub fn parse_weight_spec(spec: &str, window: Interval, cells: usize) -> Result<WeightHandle> {
    let spec = spec.trim();
    let (tag, rest) = match spec.split_once(':') {
        Some((t, r)) => (t, r),
        None => (spec, ""),
    };
    match tag {
        "constant" => {
            let c = parse_f64(spec, "density", rest)?;
            let w = AnalyticWeight::constant(c).map_err(|e| bad(spec, e.to_string()))?;
            WeightHandle::analytic(w, window)
        }
        "power" => {
            let parts: Vec<&str> = rest.split(':').collect();
            if parts.len() != 2 {
                return Err(bad(spec, "expected power:<center>:<alpha>"));
            }
            let center = parse_f64(spec, "center", parts[0])?;
            let alpha = parse_f64(spec, "exponent", parts[1])?;
            if alpha <= -1.0 {
                return Err(bad(
                    spec,
                    format!("exponent must exceed -1 for local integrability, got {alpha}"),
                ));
            }
            let w = AnalyticWeight::power(center, alpha).map_err(|e| bad(spec, e.to_string()))?;
            WeightHandle::analytic(w, window)
        }
        "expsin" => {
            let parts: Vec<&str> = rest.split(':').collect();
            if parts.len() != 2 {
                return Err(bad(spec, "expected expsin:<a>:<b>"));
            }
            let a = parse_f64(spec, "amplitude", parts[0])?;
            let b = parse_f64(spec, "frequency", parts[1])?;
            let w = AnalyticWeight::exp_sin(a, b).map_err(|e| bad(spec, e.to_string()))?;
            WeightHandle::analytic(w, window)
        }
        "step" => {
            let parts: Vec<&str> = rest.split(':').collect();
            if parts.len() != 3 {
                return Err(bad(spec, "expected step:<x0>:<v1>:<v2>"));
            }
            let x0 = parse_f64(spec, "jump location", parts[0])?;
            let v1 = parse_f64(spec, "left level", parts[1])?;
            let v2 = parse_f64(spec, "right level", parts[2])?;
            let w = AnalyticWeight::step(x0, v1, v2).map_err(|e| bad(spec, e.to_string()))?;
            WeightHandle::analytic(w, window)
        }
        "martingale" => {
            let parts: Vec<&str> = rest.split(':').collect();
            if parts.len() != 4 {
                return Err(bad(spec, "expected martingale:<seed>:<levels>:<c0>:<decay>"));
            }
            let seed: u64 = parts[0]
                .trim()
                .parse()
                .map_err(|_| bad(spec, format!("seed `{}` is not an unsigned integer", parts[0])))?;
            let levels: u32 = parts[1]
                .trim()
                .parse()
                .map_err(|_| bad(spec, format!("levels `{}` is not a positive integer", parts[1])))?;
            if levels == 0 || levels > MAX_MARTINGALE_LEVELS {
                return Err(bad(
                    spec,
                    format!("levels must be in 1..={MAX_MARTINGALE_LEVELS}, got {levels}"),
                ));
            }
            let c0 = parse_f64(spec, "base coefficient", parts[2])?;
            if !(c0 >= 0.0 && c0.is_finite()) {
                return Err(bad(spec, format!("base coefficient must be >= 0, got {c0}")));
            }
            let decay = parse_f64(spec, "decay", parts[3])?;
            if !(decay > 0.0 && decay <= 1.0) {
                return Err(bad(spec, format!("decay must lie in (0, 1], got {decay}")));
            }
            let grid = GridSpec::new(window, cells)?;
            Ok(WeightHandle::sampled(martingale_weight(grid, seed, levels, c0, decay, spec)?))
        }
        "sampled" => {
            if rest.is_empty() {
                return Err(bad(spec, "expected sampled:<path>"));
            }
            let grid = GridSpec::new(window, cells)?;
            let points = read_density_csv(rest)?;
            Ok(WeightHandle::sampled(SampledWeight::resample_from_points(
                grid, &points, spec,
            )?))
        }
        other => Err(bad(
            spec,
            format!(
                "unknown family `{other}`; known families: constant, power, expsin, step, martingale, sampled"
            ),
        )),
    }
}

/// Seeded dyadic log-martingale realized on a grid.
///
/// Signs are drawn level-major from a counter-based generator, so the
/// realization is a pure function of the seed regardless of grid
/// resolution or platform.
fn martingale_weight(
    grid: GridSpec,
    seed: u64,
    levels: u32,
    c0: f64,
    decay: f64,
    label: &str,
) -> Result<SampledWeight> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut signs: Vec<Vec<f64>> = Vec::with_capacity(levels as usize);
    for k in 0..levels {
        let n = 1usize << k;
        let mut row = Vec::with_capacity(n);
        for _ in 0..n {
            row.push(if rng.gen::<bool>() { 1.0 } else { -1.0 });
        }
        signs.push(row);
    }
    let domain = grid.domain();
    let values: Vec<f64> = (0..grid.cells())
        .map(|j| {
            let frac = (grid.cell_midpoint(j) - domain.lo()) / domain.length();
            let mut log_v = 0.0;
            let mut c = c0;
            for row in &signs {
                let idx = ((frac * row.len() as f64).floor() as usize).min(row.len() - 1);
                log_v += row[idx] * c;
                c *= decay;
            }
            log_v.exp()
        })
        .collect();
    SampledWeight::from_values(grid, values, label)
}

/// Read `x,density` rows from a CSV-ish text file. A single leading
/// header line is tolerated; blank lines and `#` comments are skipped.
fn read_density_csv(path: &str) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path.trim())
        .map_err(|e| WeightError::Io(format!("reading `{}`: {e}", path.trim())))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split(',');
        let parse = |s: Option<&str>| s.and_then(|v| v.trim().parse::<f64>().ok());
        match (parse(cols.next()), parse(cols.next())) {
            (Some(x), Some(v)) => out.push((x, v)),
            _ if lineno == 0 => continue, // header
            _ => {
                return Err(WeightError::Io(format!(
                    "`{}` line {}: expected `x,density`, got `{line}`",
                    path.trim(),
                    lineno + 1
                )))
            }
        }
    }
    if out.is_empty() {
        return Err(WeightError::Io(format!("`{}` holds no data rows", path.trim())));
    }
    Ok(out)
}
