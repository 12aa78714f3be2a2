//! Experiment configuration: the `key=value` text format, validation, and
//! canonical serialization.
//!
//! A config is plain text, one `key=value` per line.  A `#` that starts a
//! line or follows whitespace begins a comment; several pairs may share a
//! line when every whitespace-separated token contains `=`.  Keys:
//!
//! | key             | value                                   | default      |
//! |-----------------|-----------------------------------------|--------------|
//! | `weight`        | family spec, e.g. `power:0:1`           | required     |
//! | `window`        | `lo,hi`                                 | required     |
//! | `cells`         | grid cells for sampled-backed families  | required     |
//! | `analyses`      | comma-separated analysis ids            | required     |
//! | `scales`        | `lo,hi,count`, log-spaced               | `0.01,0.5,9` |
//! | `step_divisor`  | sweep step = length / this              | `8`          |
//! | `max_positions` | cap on sweep positions per scale        | `4096`       |
//! | `out`           | report path, `-` for stdout             | `-`          |
//! | `format`        | `csv` or `json`                         | `csv`        |
//!
//! Serialization is canonical (fixed key order, shortest round-trip float
//! text), so `parse(serialize(cfg)) == cfg` for every valid config.

use std::fmt;

use thiserror::Error;
use weightlab_core::sweep::{
    log_spaced_scales, SweepPolicy, DEFAULT_MAX_POSITIONS, DEFAULT_STEP_DIVISOR,
};
use weightlab_core::weight::spec::{families, parse_weight_spec};
use weightlab_core::{Interval, WeightHandle};

/// Smallest grid admitted when an analysis integrates over half-plane
/// boxes; coarser grids alias the dyadic layers of the box quadratures.
pub const MIN_BOX_CELLS: usize = 1 << 12;

/// Scale range used when the config names none.
pub const DEFAULT_SCALE_SPEC: ScaleSpec = ScaleSpec { lo: 0.01, hi: 0.5, count: 9 };

/// Report serialization format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

/// Log-spaced scale list: `count` scales from `lo` to `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl ScaleSpec {
    /// The scales in the strictly decreasing order the sweeps expect.
    pub fn descending(&self) -> Vec<f64> {
        let mut s = log_spaced_scales(self.lo, self.hi, self.count);
        s.reverse();
        s
    }
}

/// Explicit placement for the two-sided mass-ratio sandwich.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichParams {
    /// Center of the narrow interval.
    pub x0: f64,
    /// Narrow half-width.
    pub t: f64,
    /// Wide half-width in units of `t`.
    pub n: u32,
}

/// One requested analysis, with its optional colon parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Analysis {
    /// Mass, average density, and log average over the window.
    Masses,
    /// Supremum of mean oscillation of `log w` over the sweep.
    Bmo,
    /// Mean-oscillation profile over the scale list.
    Vmo,
    /// Exponential distribution tails of `log w` with a fitted bound.
    Jn,
    /// `mean(w)·mean(1/w)` profile (floor 1).
    Sarason,
    /// `mean(w)·exp(−mean(log w))` profile (floor 1).
    Mitsis,
    /// Adjacent-interval mass-ratio supremum.
    Doubling,
    /// A_p sweep constants, one per listed exponent (`ap:2:4`; bare `ap`
    /// means `ap:2`).
    Ap(Vec<f64>),
    /// Reverse-Jensen sweep constant.
    Ainfty,
    /// Two-sided wide-to-narrow mass-ratio sandwich
    /// (`lemma32:<x0>:<t>:<n>`; bare `lemma32` centers the narrow
    /// interval on the window at the smallest scale with `n = 8`).
    Lemma32(Option<SandwichParams>),
    /// Trapezoid estimate of `∫ λ_δ dδ/δ` with its trend.
    LambdaCriterion,
    /// Pointwise `η`/`η̃` field over sweep boxes at each scale.
    Eta,
    /// Box-functional sweep: norm and per-scale modulus.
    Carleson,
    /// Four-part split of the box functional at the listed truncation
    /// depths (`decomposition:4:8`; bare means `decomposition:4:8:12`).
    Decomposition(Vec<usize>),
    /// Cone average of the squared area function with its boundary-term
    /// reconstruction from the box functional.
    Area,
    /// The three moduli side by side with a joint verdict.
    TheoremCheck,
    /// Cone-average and box-functional profiles compared per scale.
    ConeBox,
}

impl Analysis {
    /// The bare id token, without parameters.
    pub fn base_id(&self) -> &'static str {
        match self {
            Analysis::Masses => "masses",
            Analysis::Bmo => "bmo",
            Analysis::Vmo => "vmo",
            Analysis::Jn => "jn",
            Analysis::Sarason => "sarason",
            Analysis::Mitsis => "mitsis",
            Analysis::Doubling => "doubling",
            Analysis::Ap(_) => "ap",
            Analysis::Ainfty => "ainfty",
            Analysis::Lemma32(_) => "lemma32",
            Analysis::LambdaCriterion => "lambda-criterion",
            Analysis::Eta => "eta",
            Analysis::Carleson => "carleson",
            Analysis::Decomposition(_) => "decomposition",
            Analysis::Area => "area",
            Analysis::TheoremCheck => "theorem-check",
            Analysis::ConeBox => "cone-box",
        }
    }

    /// Whether this analysis integrates over half-plane boxes and so
    /// demands the [`MIN_BOX_CELLS`] grid floor.
    fn needs_box_grid(&self) -> bool {
        matches!(
            self,
            Analysis::Carleson
                | Analysis::Decomposition(_)
                | Analysis::Area
                | Analysis::TheoremCheck
                | Analysis::ConeBox
        )
    }
}

impl fmt::Display for Analysis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.base_id())?;
        match self {
            Analysis::Ap(ps) => {
                for p in ps {
                    write!(f, ":{p}")?;
                }
            }
            Analysis::Decomposition(ns) => {
                for n in ns {
                    write!(f, ":{n}")?;
                }
            }
            Analysis::Lemma32(Some(s)) => write!(f, ":{}:{}:{}", s.x0, s.t, s.n)?,
            _ => {}
        }
        Ok(())
    }
}

/// A validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Weight family spec string (see `weightlab families`).
    pub weight: String,
    /// Working window; every sweep stays inside it.
    pub window: Interval,
    /// Grid resolution for sampled-backed families.
    pub cells: usize,
    /// Log-spaced scale list.
    pub scales: ScaleSpec,
    /// Sweep step is object length divided by this.
    pub step_divisor: u32,
    /// Cap on sweep positions per scale.
    pub max_positions: usize,
    /// Analyses to run, in declaration order.
    pub analyses: Vec<Analysis>,
    /// Report destination; `-` writes to stdout.
    pub out: String,
    /// Report serialization format.
    pub format: OutputFormat,
}

impl ExperimentConfig {
    /// Sweep placement policy from the config's two knobs.
    pub fn policy(&self) -> SweepPolicy {
        SweepPolicy::new(self.step_divisor, self.max_positions)
    }

    /// Scales in the strictly decreasing order the sweeps expect.
    pub fn scales_descending(&self) -> Vec<f64> {
        self.scales.descending()
    }

    /// Construct the configured weight on the configured window/grid.
    pub fn build_weight(&self) -> weightlab_core::Result<WeightHandle> {
        parse_weight_spec(&self.weight, self.window, self.cells)
    }

    /// Canonical text form; `parse_config` inverts it exactly.
    pub fn serialize(&self) -> String {
        let analyses: Vec<String> = self.analyses.iter().map(|a| a.to_string()).collect();
        format!(
            "weight={}\nwindow={},{}\ncells={}\nscales={},{},{}\nstep_divisor={}\n\
             max_positions={}\nanalyses={}\nout={}\nformat={}\n",
            self.weight,
            self.window.lo(),
            self.window.hi(),
            self.cells,
            self.scales.lo,
            self.scales.hi,
            self.scales.count,
            self.step_divisor,
            self.max_positions,
            analyses.join(","),
            self.out,
            self.format,
        )
    }
}

/// Everything that can be wrong with a config, each case named distinctly
/// and carrying the offending line (0 for values passed on the command
/// line) and key.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key=value`, got `{text}`")]
    NotKeyValue { line: usize, text: String },

    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },

    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },

    #[error("missing required key `{key}`")]
    MissingKey { key: String },

    /// A field that must be numeric did not parse.
    #[error("line {line}: key `{key}`: `{text}` is not a valid {expected}")]
    MalformedNumber { line: usize, key: String, text: String, expected: &'static str },

    /// A field parsed but its value is out of range or the wrong shape.
    #[error("line {line}: key `{key}`: {reason}")]
    InvalidValue { line: usize, key: String, reason: String },

    #[error(
        "line {line}: unknown analysis `{id}`; known ids: masses, bmo, vmo, jn, sarason, \
         mitsis, doubling, ap, ainfty, lemma32, lambda-criterion, eta, carleson, \
         decomposition, area, theorem-check, cone-box"
    )]
    UnknownAnalysis { line: usize, id: String },

    /// The weight spec's family tag is not in the registry.
    #[error("line {line}: unknown weight family `{tag}`; run `weightlab families` for the registry")]
    UnknownFamily { line: usize, tag: String },

    /// The family is known but the spec's parameters are invalid.
    #[error("line {line}: {reason}")]
    InvalidWeightSpec { line: usize, reason: String },

    /// Cross-field constraint violated (window ordering, scales vs
    /// window, grid floor for box analyses).
    #[error("line {line}: inconsistent bounds: {what}")]
    InconsistentBounds { line: usize, what: String },
}

/// One raw `key=value` pair with the line it came from (0 = synthetic).
pub type RawPair = (usize, String, String);

fn strip_comment(line: &str) -> &str {
    // `#` opens a comment at line start or after whitespace, so weight
    // specs and paths may contain literal `#` when glued to the value.
    let b = line.as_bytes();
    for (i, &c) in b.iter().enumerate() {
        if c == b'#' && (i == 0 || b[i - 1].is_ascii_whitespace()) {
            return &line[..i];
        }
    }
    line
}

/// Split config text into raw pairs.  Several pairs may share a line only
/// when every whitespace-separated token contains `=`; otherwise the
/// whole line is one pair (so paths with spaces survive).
fn tokenize(text: &str) -> Result<Vec<RawPair>, ConfigError> {
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let multi = tokens.len() > 1 && tokens.iter().all(|t| t.contains('='));
        let units: Vec<&str> = if multi { tokens } else { vec![line] };
        for unit in units {
            match unit.split_once('=') {
                Some((k, v)) => pairs.push((line_no, k.trim().to_string(), v.trim().to_string())),
                None => {
                    return Err(ConfigError::NotKeyValue { line: line_no, text: unit.to_string() })
                }
            }
        }
    }
    Ok(pairs)
}

fn parse_num<T: std::str::FromStr>(
    line: usize,
    key: &str,
    text: &str,
    expected: &'static str,
) -> Result<T, ConfigError> {
    text.trim().parse::<T>().map_err(|_| ConfigError::MalformedNumber {
        line,
        key: key.to_string(),
        text: text.to_string(),
        expected,
    })
}

fn split_fields<'t>(
    line: usize,
    key: &str,
    text: &'t str,
    want: usize,
) -> Result<Vec<&'t str>, ConfigError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != want {
        return Err(ConfigError::InvalidValue {
            line,
            key: key.to_string(),
            reason: format!("expected {want} comma-separated fields, got `{text}`"),
        });
    }
    Ok(parts)
}

/// Parse one analysis id token (`ap:2:4`, `lemma32`, …).
pub fn parse_analysis(line: usize, token: &str) -> Result<Analysis, ConfigError> {
    let token = token.trim();
    let (head, params) = match token.split_once(':') {
        Some((h, rest)) => (h, rest.split(':').collect::<Vec<_>>()),
        None => (token, Vec::new()),
    };
    let invalid = |reason: String| ConfigError::InvalidValue {
        line,
        key: "analyses".to_string(),
        reason,
    };
    let bare = |a: Analysis| {
        if params.is_empty() {
            Ok(a)
        } else {
            Err(invalid(format!("analysis `{head}` takes no parameters, got `{token}`")))
        }
    };
    match head {
        "masses" => bare(Analysis::Masses),
        "bmo" => bare(Analysis::Bmo),
        "vmo" => bare(Analysis::Vmo),
        "jn" => bare(Analysis::Jn),
        "sarason" => bare(Analysis::Sarason),
        "mitsis" => bare(Analysis::Mitsis),
        "doubling" => bare(Analysis::Doubling),
        "ainfty" => bare(Analysis::Ainfty),
        "lambda-criterion" => bare(Analysis::LambdaCriterion),
        "eta" => bare(Analysis::Eta),
        "carleson" => bare(Analysis::Carleson),
        "area" => bare(Analysis::Area),
        "theorem-check" => bare(Analysis::TheoremCheck),
        "cone-box" => bare(Analysis::ConeBox),
        "ap" => {
            let mut ps = Vec::new();
            for part in &params {
                let p: f64 = parse_num(line, "analyses", part, "A_p exponent")?;
                if !(p.is_finite() && p > 1.0) {
                    return Err(invalid(format!("A_p exponent must exceed 1, got {p}")));
                }
                ps.push(p);
            }
            if ps.is_empty() {
                ps.push(2.0);
            }
            Ok(Analysis::Ap(ps))
        }
        "decomposition" => {
            let mut ns = Vec::new();
            for part in &params {
                let n: usize = parse_num(line, "analyses", part, "truncation depth")?;
                if !(1..=40).contains(&n) {
                    return Err(invalid(format!("truncation depth must be in 1..=40, got {n}")));
                }
                ns.push(n);
            }
            if ns.is_empty() {
                ns = vec![4, 8, 12];
            }
            Ok(Analysis::Decomposition(ns))
        }
        "lemma32" => {
            if params.is_empty() {
                return Ok(Analysis::Lemma32(None));
            }
            if params.len() != 3 {
                return Err(invalid(format!(
                    "expected lemma32:<x0>:<t>:<n>, got `{token}`"
                )));
            }
            let x0: f64 = parse_num(line, "analyses", params[0], "center")?;
            let t: f64 = parse_num(line, "analyses", params[1], "narrow half-width")?;
            let n: u32 = parse_num(line, "analyses", params[2], "width multiple")?;
            if !x0.is_finite() || !(t.is_finite() && t > 0.0) || n == 0 {
                return Err(invalid(format!(
                    "lemma32 needs finite x0, positive t, n >= 1, got `{token}`"
                )));
            }
            Ok(Analysis::Lemma32(Some(SandwichParams { x0, t, n })))
        }
        other => Err(ConfigError::UnknownAnalysis { line, id: other.to_string() }),
    }
}

/// Assemble and validate a config from raw pairs (the shared path for
/// config files and `weightlab analyze` flags).
pub fn build_config(pairs: &[RawPair]) -> Result<ExperimentConfig, ConfigError> {
    let mut weight: Option<(usize, String)> = None;
    let mut window: Option<(usize, Interval)> = None;
    let mut cells: Option<(usize, usize)> = None;
    let mut scales: Option<(usize, ScaleSpec)> = None;
    let mut step_divisor: Option<u32> = None;
    let mut max_positions: Option<usize> = None;
    let mut analyses: Option<(usize, Vec<Analysis>)> = None;
    let mut out: Option<String> = None;
    let mut format: Option<OutputFormat> = None;
    let mut seen: Vec<String> = Vec::new();

    for (line, key, value) in pairs {
        let line = *line;
        if seen.iter().any(|k| k == key) {
            return Err(ConfigError::DuplicateKey { line, key: key.clone() });
        }
        seen.push(key.clone());
        match key.as_str() {
            "weight" => weight = Some((line, value.clone())),
            "window" => {
                let f = split_fields(line, key, value, 2)?;
                let lo: f64 = parse_num(line, key, f[0], "number")?;
                let hi: f64 = parse_num(line, key, f[1], "number")?;
                let i = Interval::try_new(lo, hi).map_err(|e| ConfigError::InconsistentBounds {
                    line,
                    what: e.to_string(),
                })?;
                window = Some((line, i));
            }
            "cells" => {
                let n: usize = parse_num(line, key, value, "positive integer")?;
                if n < 2 {
                    return Err(ConfigError::InvalidValue {
                        line,
                        key: key.clone(),
                        reason: format!("grid needs at least 2 cells, got {n}"),
                    });
                }
                cells = Some((line, n));
            }
            "scales" => {
                let f = split_fields(line, key, value, 3)?;
                let lo: f64 = parse_num(line, key, f[0], "number")?;
                let hi: f64 = parse_num(line, key, f[1], "number")?;
                let count: usize = parse_num(line, key, f[2], "positive integer")?;
                if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi >= lo) {
                    return Err(ConfigError::InconsistentBounds {
                        line,
                        what: format!("scales need 0 < lo <= hi, got {lo}, {hi}"),
                    });
                }
                if count == 0 {
                    return Err(ConfigError::InvalidValue {
                        line,
                        key: key.clone(),
                        reason: "scale count must be at least 1".to_string(),
                    });
                }
                if count > 1 && lo == hi {
                    return Err(ConfigError::InconsistentBounds {
                        line,
                        what: format!("{count} distinct scales need lo < hi, got both {lo}"),
                    });
                }
                scales = Some((line, ScaleSpec { lo, hi, count }));
            }
            "step_divisor" => {
                let d: u32 = parse_num(line, key, value, "positive integer")?;
                if d == 0 {
                    return Err(ConfigError::InvalidValue {
                        line,
                        key: key.clone(),
                        reason: "step divisor must be at least 1".to_string(),
                    });
                }
                step_divisor = Some(d);
            }
            "max_positions" => {
                let m: usize = parse_num(line, key, value, "positive integer")?;
                if m < 2 {
                    return Err(ConfigError::InvalidValue {
                        line,
                        key: key.clone(),
                        reason: format!("position cap must be at least 2, got {m}"),
                    });
                }
                max_positions = Some(m);
            }
            "analyses" => {
                let mut list = Vec::new();
                for token in value.split(',') {
                    if token.trim().is_empty() {
                        continue;
                    }
                    list.push(parse_analysis(line, token)?);
                }
                if list.is_empty() {
                    return Err(ConfigError::InvalidValue {
                        line,
                        key: key.clone(),
                        reason: "at least one analysis is required".to_string(),
                    });
                }
                analyses = Some((line, list));
            }
            "out" => {
                if value.is_empty() {
                    return Err(ConfigError::InvalidValue {
                        line,
                        key: key.clone(),
                        reason: "output path must be nonempty (`-` for stdout)".to_string(),
                    });
                }
                out = Some(value.clone());
            }
            "format" => {
                format = Some(match value.as_str() {
                    "csv" => OutputFormat::Csv,
                    "json" => OutputFormat::Json,
                    other => {
                        return Err(ConfigError::InvalidValue {
                            line,
                            key: key.clone(),
                            reason: format!("format is `csv` or `json`, got `{other}`"),
                        })
                    }
                });
            }
            _ => return Err(ConfigError::UnknownKey { line, key: key.clone() }),
        }
    }

    let missing = |key: &str| ConfigError::MissingKey { key: key.to_string() };
    let (weight_line, weight) = weight.ok_or_else(|| missing("weight"))?;
    let (window_line, window) = window.ok_or_else(|| missing("window"))?;
    let (cells_line, cells) = cells.ok_or_else(|| missing("cells"))?;
    let (_, analyses) = analyses.ok_or_else(|| missing("analyses"))?;
    let (scales_line, scales) = scales.unwrap_or((window_line, DEFAULT_SCALE_SPEC));

    // Cross-field checks: scales must fit the window, and box-integrating
    // analyses need the grid floor.
    if scales.hi > window.length() {
        return Err(ConfigError::InconsistentBounds {
            line: scales_line,
            what: format!(
                "largest scale {} exceeds the window length {}",
                scales.hi,
                window.length()
            ),
        });
    }
    if cells < MIN_BOX_CELLS {
        if let Some(a) = analyses.iter().find(|a| a.needs_box_grid()) {
            return Err(ConfigError::InconsistentBounds {
                line: cells_line,
                what: format!(
                    "analysis `{}` integrates over boxes and needs cells >= {MIN_BOX_CELLS}, got {cells}",
                    a.base_id()
                ),
            });
        }
    }

    // Family validation: tag against the registry first so an unknown
    // family is reported as such, then the full spec (parameter ranges,
    // sampled-data reads) through the weight constructor itself.
    let tag = weight.split(':').next().unwrap_or("").trim().to_string();
    if !families().iter().any(|f| f.name == tag) {
        return Err(ConfigError::UnknownFamily { line: weight_line, tag });
    }
    parse_weight_spec(&weight, window, cells)
        .map_err(|e| ConfigError::InvalidWeightSpec { line: weight_line, reason: e.to_string() })?;

    Ok(ExperimentConfig {
        weight,
        window,
        cells,
        scales,
        step_divisor: step_divisor.unwrap_or(DEFAULT_STEP_DIVISOR),
        max_positions: max_positions.unwrap_or(DEFAULT_MAX_POSITIONS),
        analyses,
        out: out.unwrap_or_else(|| "-".to_string()),
        format: format.unwrap_or(OutputFormat::Csv),
    })
}

/// Parse and validate config text.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    build_config(&tokenize(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> &'static str {
        "weight=constant:1\nwindow=-1,1\ncells=4096\nanalyses=bmo\n"
    }

    #[test]
    fn parses_minimal_config_with_defaults() {
        let cfg = parse_config(minimal()).unwrap();
        assert_eq!(cfg.weight, "constant:1");
        assert_eq!(cfg.window, Interval::new(-1.0, 1.0));
        assert_eq!(cfg.cells, 4096);
        assert_eq!(cfg.analyses, vec![Analysis::Bmo]);
        assert_eq!(cfg.scales, DEFAULT_SCALE_SPEC);
        assert_eq!(cfg.step_divisor, 8);
        assert_eq!(cfg.max_positions, 4096);
        assert_eq!(cfg.out, "-");
        assert_eq!(cfg.format, OutputFormat::Csv);
    }

    #[test]
    fn accepts_pairs_sharing_a_line() {
        let cfg = parse_config("weight=constant:1 window=-1,1 cells=4096 analyses=bmo").unwrap();
        assert_eq!(cfg.analyses.len(), 1);
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let text = "# experiment\nweight=power:0:1\n\nwindow=-4,4 # working window\ncells=4096\nanalyses=mitsis\n";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.weight, "power:0:1");
        assert_eq!(cfg.window, Interval::new(-4.0, 4.0));
    }

    #[test]
    fn hash_glued_to_value_is_literal() {
        let text = "weight=constant:1\nwindow=-1,1\ncells=4096\nanalyses=bmo\nout=run#3.csv\n";
        assert_eq!(parse_config(text).unwrap().out, "run#3.csv");
    }

    #[test]
    fn error_kinds_are_distinct() {
        let e = parse_config("weight=gauss:1\nwindow=-1,1\ncells=4096\nanalyses=bmo\n");
        assert!(matches!(e, Err(ConfigError::UnknownFamily { tag, .. }) if tag == "gauss"));

        let e = parse_config("weight=power:0:-1.5\nwindow=-1,1\ncells=4096\nanalyses=bmo\n");
        assert!(
            matches!(e, Err(ConfigError::InvalidWeightSpec { reason, .. }) if reason.contains("-1")),
            "alpha at or below -1 must be rejected as not locally integrable"
        );

        let e = parse_config("weight=constant:1\nwindow=-1,1\ncells=many\nanalyses=bmo\n");
        assert!(matches!(e, Err(ConfigError::MalformedNumber { key, .. }) if key == "cells"));

        let e = parse_config("weight=constant:1\nwindow=1,-1\ncells=4096\nanalyses=bmo\n");
        assert!(matches!(e, Err(ConfigError::InconsistentBounds { line: 2, .. })));

        let e =
            parse_config("weight=constant:1\nwindow=-1,1\ncells=4096\nanalyses=bmo\nscales=0.1,5,3\n");
        assert!(matches!(e, Err(ConfigError::InconsistentBounds { line: 5, .. })));
    }

    #[test]
    fn box_analyses_enforce_the_grid_floor() {
        let e = parse_config("weight=constant:1\nwindow=-1,1\ncells=1024\nanalyses=carleson\n");
        match e {
            Err(ConfigError::InconsistentBounds { what, .. }) => {
                assert!(what.contains("4096"), "{what}")
            }
            other => panic!("expected a grid-floor error, got {other:?}"),
        }
        // interval-only analyses run fine on coarse grids
        parse_config("weight=constant:1\nwindow=-1,1\ncells=1024\nanalyses=bmo\n").unwrap();
    }

    #[test]
    fn structural_errors_are_reported() {
        assert!(matches!(
            parse_config("weight\n"),
            Err(ConfigError::NotKeyValue { line: 1, .. })
        ));
        assert!(matches!(
            parse_config("colour=red\n"),
            Err(ConfigError::UnknownKey { line: 1, .. })
        ));
        assert!(matches!(
            parse_config("cells=4096\ncells=8192\n"),
            Err(ConfigError::DuplicateKey { line: 2, .. })
        ));
        assert!(matches!(
            parse_config("weight=constant:1\nwindow=-1,1\ncells=4096\n"),
            Err(ConfigError::MissingKey { key }) if key == "analyses"
        ));
    }

    #[test]
    fn analysis_grammar_round_trips() {
        for (token, parsed) in [
            ("ap", Analysis::Ap(vec![2.0])),
            ("ap:1.5:3", Analysis::Ap(vec![1.5, 3.0])),
            ("decomposition", Analysis::Decomposition(vec![4, 8, 12])),
            ("decomposition:6", Analysis::Decomposition(vec![6])),
            ("lemma32", Analysis::Lemma32(None)),
            (
                "lemma32:0.3:0.05:8",
                Analysis::Lemma32(Some(SandwichParams { x0: 0.3, t: 0.05, n: 8 })),
            ),
            ("lambda-criterion", Analysis::LambdaCriterion),
            ("theorem-check", Analysis::TheoremCheck),
        ] {
            let a = parse_analysis(1, token).unwrap();
            assert_eq!(a, parsed, "{token}");
            // display → parse is the identity (bare forms normalize)
            assert_eq!(parse_analysis(1, &a.to_string()).unwrap(), a);
        }
    }

    #[test]
    fn analysis_grammar_rejects_bad_parameters() {
        assert!(matches!(parse_analysis(1, "warp"), Err(ConfigError::UnknownAnalysis { .. })));
        assert!(matches!(parse_analysis(1, "ap:1"), Err(ConfigError::InvalidValue { .. })));
        assert!(matches!(parse_analysis(1, "ap:x"), Err(ConfigError::MalformedNumber { .. })));
        assert!(matches!(
            parse_analysis(1, "decomposition:0"),
            Err(ConfigError::InvalidValue { .. })
        ));
        assert!(matches!(
            parse_analysis(1, "lemma32:0.3:0.05"),
            Err(ConfigError::InvalidValue { .. })
        ));
        assert!(matches!(parse_analysis(1, "bmo:3"), Err(ConfigError::InvalidValue { .. })));
    }

    #[test]
    fn serialization_round_trips_exactly() {
        let text = "weight=martingale:7:12:0.4:1\nwindow=-4,4\ncells=65536\n\
                    scales=0.025,0.4,5\nstep_divisor=8\nmax_positions=512\n\
                    analyses=masses,mitsis,ap:2:4,lemma32:0.3:0.05:8,decomposition:6:12,theorem-check\n\
                    out=report.csv\nformat=json\n";
        let cfg = parse_config(text).unwrap();
        let cfg2 = parse_config(&cfg.serialize()).unwrap();
        assert_eq!(cfg, cfg2);
        // canonical text is a fixpoint
        assert_eq!(cfg.serialize(), cfg2.serialize());
    }

    #[test]
    fn descending_scales_are_strictly_decreasing() {
        let s = ScaleSpec { lo: 0.01, hi: 0.5, count: 9 }.descending();
        assert_eq!(s.len(), 9);
        assert_eq!(s[0], 0.5);
        assert_eq!(s[8], 0.01);
        assert!(s.windows(2).all(|p| p[1] < p[0]));
    }
}
