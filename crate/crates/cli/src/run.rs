//! Experiment orchestration: runs the configured analyses in declaration
//! order and flattens their reports into rows.
//!
//! Execution is strictly sequential and deterministic; rows appear in the
//! order the analyses were declared.  An analysis that fails contributes a
//! single row with an `error` verdict (its id names the failure kind) and
//! the run as a whole is marked failed, but later analyses still run.

use weightlab_core::area::{
    area_square_average, cone_box_equivalence, density_mass_ratio_integral, ConeSpec,
};
use weightlab_core::carleson::{
    carleson_report, decomposition_diagnostics, eta, eta_tilde, theorem_check, BoxQuadrature,
    EquivalenceVerdict, ModulusTrend,
};
use weightlab_core::muckenhoupt::{
    ainfty_constant, ap_constant, doubling_constant, lambda_integral_criterion, sandwich_check,
    Trend,
};
use weightlab_core::oscillation::{
    bmo_norm_estimate, jn_tail, mitsis_modulus, sarason_modulus, vmo_modulus, OscillationProfile,
    DEFAULT_OSC_PANELS,
};
use weightlab_core::sweep::{box_centers, SweepPolicy};
use weightlab_core::{BoxPoint, Interval, Result, WeightError, WeightHandle};

use crate::config::{Analysis, ExperimentConfig, SandwichParams};
use crate::report::ReportRow;

/// Number of distribution thresholds the tail analysis measures, spaced
/// by a quarter of the oscillation norm.
const TAIL_THRESHOLDS: usize = 12;

/// The rows of a finished run plus the analyses that failed.
#[derive(Debug)]
pub struct RunOutcome {
    pub rows: Vec<ReportRow>,
    /// `(analysis id, error)` for every failed analysis, in order.
    pub failures: Vec<(String, WeightError)>,
}

impl RunOutcome {
    pub fn succeeded(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Short machine-readable tag for a failure kind.
fn error_slug(e: &WeightError) -> &'static str {
    match e {
        WeightError::DomainExceeded { .. } => "domain-exceeded",
        WeightError::PointOutsideDomain { .. } => "point-outside-domain",
        WeightError::Diverged { .. } => "diverged",
        WeightError::InvalidWeight(_) => "invalid-weight",
        WeightError::InvalidSpec { .. } => "invalid-spec",
        WeightError::InvalidParameter(_) => "invalid-parameter",
        WeightError::Unsupported(_) => "unsupported",
        WeightError::EmptySweep(_) => "empty-sweep",
        WeightError::HypothesisNotMet(_) => "hypothesis-not-met",
        WeightError::Io(_) => "io",
    }
}

fn trend_token(t: ModulusTrend) -> &'static str {
    match t {
        ModulusTrend::Vanishing => "vanishing",
        ModulusTrend::NonVanishing => "non-vanishing",
        ModulusTrend::Inconclusive => "inconclusive",
    }
}

fn verdict_token(v: EquivalenceVerdict) -> &'static str {
    match v {
        EquivalenceVerdict::AllVanishing => "all-vanishing",
        EquivalenceVerdict::NoneVanishing => "none-vanishing",
        EquivalenceVerdict::Mixed => "mixed",
        EquivalenceVerdict::Inconclusive => "inconclusive",
    }
}

fn integral_trend_token(t: Trend) -> &'static str {
    match t {
        Trend::Converging => "converging",
        Trend::Diverging => "diverging",
        Trend::Inconclusive => "inconclusive",
    }
}

fn pass_token(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

/// Run every configured analysis against the configured weight.
///
/// Errs only when the weight itself cannot be constructed; per-analysis
/// failures are folded into the outcome instead.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    let weight = cfg.build_weight()?;
    let scales = cfg.scales_descending();
    let policy = cfg.policy();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for analysis in &cfg.analyses {
        let ctx = Ctx { cfg, weight: &weight, scales: &scales, policy, analysis };
        match ctx.rows() {
            Ok(mut r) => rows.append(&mut r),
            Err(e) => {
                let mut row = ReportRow::new(analysis.base_id(), &cfg.weight, error_slug(&e));
                row.verdict = "error".to_string();
                rows.push(row);
                failures.push((analysis.to_string(), e));
            }
        }
    }
    Ok(RunOutcome { rows, failures })
}

/// Everything one analysis needs, bundled to keep the dispatch readable.
struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    weight: &'a WeightHandle,
    scales: &'a [f64],
    policy: SweepPolicy,
    analysis: &'a Analysis,
}

impl Ctx<'_> {
    fn row(&self, id: impl Into<String>) -> ReportRow {
        ReportRow::new(self.analysis.base_id(), &self.cfg.weight, id)
    }

    /// One row per profile point: scale, value, witness, diverged flag.
    fn profile_rows(
        &self,
        id: &str,
        profile: &OscillationProfile,
        depth: Option<usize>,
        panels: Option<usize>,
    ) -> Vec<ReportRow> {
        profile
            .points
            .iter()
            .map(|p| {
                let mut row = self.row(id).with_witness(p.witness);
                row.scale = Some(p.scale);
                row.value = Some(p.value);
                row.depth = depth;
                row.panels = panels;
                row.floor = profile.floor as u8;
                row.verdict = if p.diverged { "diverged" } else { "ok" }.to_string();
                row
            })
            .collect()
    }

    fn rows(&self) -> Result<Vec<ReportRow>> {
        let w = self.weight;
        let window = self.cfg.window;
        let scales = self.scales;
        let policy = self.policy;
        match self.analysis {
            Analysis::Masses => {
                let mut out = Vec::new();
                for (id, value) in [
                    ("mass", w.mass(window)?),
                    ("average", w.average(window)?),
                    ("log-average", w.log_average(window)?),
                ] {
                    let mut row = self.row(id).with_witness(Some(window));
                    row.value = Some(value);
                    out.push(row);
                }
                Ok(out)
            }
            Analysis::Bmo => {
                let est = bmo_norm_estimate(w, window, scales, policy, DEFAULT_OSC_PANELS)?;
                let mut row = self.row("bmo-norm").with_witness(est.witness);
                row.value = Some(est.value);
                row.panels = Some(DEFAULT_OSC_PANELS);
                Ok(vec![row])
            }
            Analysis::Vmo => {
                let profile = vmo_modulus(w, window, scales, policy, DEFAULT_OSC_PANELS)?;
                Ok(self.profile_rows("vmo", &profile, None, Some(DEFAULT_OSC_PANELS)))
            }
            Analysis::Jn => self.jn_rows(),
            Analysis::Sarason => {
                let profile = sarason_modulus(w, window, scales, policy)?;
                Ok(self.profile_rows("sarason", &profile, None, None))
            }
            Analysis::Mitsis => {
                let profile = mitsis_modulus(w, window, scales, policy)?;
                Ok(self.profile_rows("mitsis", &profile, None, None))
            }
            Analysis::Doubling => {
                let rep = doubling_constant(w, window, scales, policy)?;
                let witness = rep
                    .witness_pair
                    .map(|(a, b)| Interval::new(a.lo().min(b.lo()), a.hi().max(b.hi())));
                let mut row = self.row("constant").with_witness(witness);
                row.value = Some(rep.constant);
                row.floor = 1;
                row.verdict = if rep.diverged { "diverged" } else { "ok" }.to_string();
                Ok(vec![row])
            }
            Analysis::Ap(ps) => {
                let mut out = Vec::new();
                for &p in ps {
                    let rep = ap_constant(w, p, window, scales, policy)?;
                    let mut row = self.row(format!("p={p}")).with_witness(rep.witness);
                    row.value = Some(rep.constant);
                    row.floor = 1;
                    row.verdict = if rep.diverged { "diverged" } else { "ok" }.to_string();
                    out.push(row);
                }
                Ok(out)
            }
            Analysis::Ainfty => {
                let rep = ainfty_constant(w, window, scales, policy)?;
                let mut row = self.row("constant").with_witness(rep.witness);
                row.value = Some(rep.constant);
                row.floor = 1;
                row.verdict = if rep.diverged { "diverged" } else { "ok" }.to_string();
                Ok(vec![row])
            }
            Analysis::Lemma32(params) => self.sandwich_rows(*params),
            Analysis::LambdaCriterion => {
                let crit = lambda_integral_criterion(w, window, scales, policy)?;
                let mut out = self.profile_rows("lambda", &crit.modulus.profile, None, None);
                let mut row = self.row("integral");
                row.value = Some(crit.estimate);
                row.verdict = integral_trend_token(crit.trend).to_string();
                out.push(row);
                Ok(out)
            }
            Analysis::Eta => {
                let mut out = Vec::new();
                for &delta in scales {
                    for center in box_centers(window, delta, policy) {
                        let z = BoxPoint::new(center, delta);
                        let mut row = self.row("field").with_witness(Some(z.interval()));
                        row.scale = Some(delta);
                        row.value = Some(eta(w, z)?);
                        row.value2 = Some(eta_tilde(w, z)?);
                        out.push(row);
                    }
                }
                Ok(out)
            }
            Analysis::Carleson => {
                let quad = BoxQuadrature::default();
                let rep = carleson_report(w, window, scales, policy, quad)?;
                let meta = (Some(quad.depth), Some(quad.panels_x));
                let mut out = self.profile_rows("box-modulus", &rep.modulus, meta.0, meta.1);
                let mut row = self.row("norm-sq").with_witness(rep.witness);
                row.value = Some(rep.norm_sq);
                row.depth = meta.0;
                row.panels = meta.1;
                out.push(row);
                let mut row = self.row("skipped");
                row.value = Some(rep.skipped as f64);
                out.push(row);
                Ok(out)
            }
            Analysis::Decomposition(depths) => self.decomposition_rows(depths),
            Analysis::Area => self.area_rows(),
            Analysis::TheoremCheck => self.theorem_rows(),
            Analysis::ConeBox => self.cone_box_rows(),
        }
    }

    fn jn_rows(&self) -> Result<Vec<ReportRow>> {
        let w = self.weight;
        let window = self.cfg.window;
        let est =
            bmo_norm_estimate(w, window, self.scales, self.policy, DEFAULT_OSC_PANELS)?;
        if !(est.value > 1e-12) {
            // nothing oscillates: the distribution has no tail to fit
            let mut row = self.row("fit");
            row.verdict = "degenerate".to_string();
            return Ok(vec![row]);
        }
        let norm = est.value;
        let lambdas: Vec<f64> =
            (1..=TAIL_THRESHOLDS).map(|k| k as f64 * norm / 4.0).collect();
        let tail = jn_tail(w, window, &lambdas, norm, DEFAULT_OSC_PANELS)?;
        let mut out = Vec::new();
        for (k, (&lambda, &fraction)) in
            tail.lambdas.iter().zip(&tail.tail_fractions).enumerate()
        {
            let mut row = self.row(format!("tail-{}", k + 1)).with_witness(Some(window));
            row.value = Some(fraction);
            row.value2 = Some(lambda);
            row.panels = Some(DEFAULT_OSC_PANELS);
            out.push(row);
        }
        let mut row = self.row("fit");
        match tail.fitted {
            Some((c1, c2)) => {
                row.value = Some(c1);
                row.value2 = Some(c2);
                row.verdict = match tail.bound_holds {
                    Some(ok) => pass_token(ok).to_string(),
                    None => "degenerate".to_string(),
                };
            }
            None => row.verdict = "degenerate".to_string(),
        }
        out.push(row);
        Ok(out)
    }

    fn sandwich_rows(&self, params: Option<SandwichParams>) -> Result<Vec<ReportRow>> {
        let window = self.cfg.window;
        let p = params.unwrap_or(SandwichParams {
            x0: window.midpoint(),
            t: self.cfg.scales.lo,
            n: 8,
        });
        let rep = sandwich_check(self.weight, p.x0, p.t, p.n, None, self.policy)?;
        let tol = 1e-12;
        let wide = Interval::new(p.x0 - p.n as f64 * p.t, p.x0 + p.n as f64 * p.t);
        let narrow = Interval::new(p.x0 - p.t, p.x0 + p.t);

        let mut bounds = self.row("bounds").with_witness(Some(wide));
        bounds.scale = Some(p.t);
        bounds.value = Some(rep.lower);
        bounds.value2 = Some(rep.upper);
        bounds.verdict =
            pass_token(rep.margin_lower >= -tol && rep.margin_upper >= -tol).to_string();

        let mut ratio = self.row("ratio").with_witness(Some(narrow));
        ratio.scale = Some(p.t);
        ratio.value = Some(rep.ratio_wide);
        ratio.value2 = Some(rep.eps_measured);
        ratio.verdict = pass_token(rep.pass).to_string();

        let mut band = self
            .row("translate-band")
            .with_witness(Some(Interval::new(p.x0 - p.t, p.x0)));
        band.scale = Some(p.t);
        band.value = Some(rep.translate_min);
        band.value2 = Some(rep.translate_max);
        band.verdict = pass_token(rep.margin_translate >= -tol).to_string();

        Ok(vec![bounds, ratio, band])
    }

    fn decomposition_rows(&self, depths: &[usize]) -> Result<Vec<ReportRow>> {
        let x0 = self.cfg.window.midpoint();
        let t = self.cfg.scales.hi;
        let base = Interval::new(x0 - t / 2.0, x0 + t / 2.0);
        let mut out = Vec::new();
        for &depth in depths {
            let quad = BoxQuadrature { depth, ..BoxQuadrature::default() };
            let d = decomposition_diagnostics(self.weight, x0, t, quad)?;
            for (id, value, value2) in [
                ("split", d.a1_hat, d.a2_hat),
                ("interior", d.a3, d.a4),
                ("residual", d.residual, d.a_total),
            ] {
                let mut row = self.row(id).with_witness(Some(base));
                row.scale = Some(t);
                row.value = Some(value);
                row.value2 = Some(value2);
                row.depth = Some(depth);
                row.panels = Some(quad.panels_x);
                out.push(row);
            }
        }
        Ok(out)
    }

    fn area_rows(&self) -> Result<Vec<ReportRow>> {
        let x0 = self.cfg.window.midpoint();
        let t = self.cfg.scales.hi;
        let spec = ConeSpec::default();
        let rep = area_square_average(self.weight, x0, t, spec)?;
        let base = Interval::new(x0 - t / 2.0, x0 + t / 2.0);
        let mut out = Vec::new();
        let mut push = |id: &str, value: f64, value2: Option<f64>, verdict: Option<String>| {
            let mut row = self.row(id).with_witness(Some(base));
            row.scale = Some(t);
            row.value = Some(value);
            row.value2 = value2;
            row.depth = Some(rep.depth_used);
            row.panels = Some(spec.panels_x);
            if let Some(v) = verdict {
                row.verdict = v;
            }
            out.push(row);
        };
        push("area-sq-avg", rep.area_sq_avg, Some(rep.box_average), None);
        push("boundary-height", rep.b1, None, None);
        push("boundary-shift", rep.b21, Some(rep.b22), None);
        push("boundary-slope", rep.b3, None, None);
        push("identity-residual", rep.identity_residual, None, None);
        // the interior-density comparison the cone estimates lean on: its
        // normalized integral stays below 8 for doubling-regular data
        let ratio = density_mass_ratio_integral(self.weight, x0, t, 512)?;
        push("density-mass-ratio", ratio, Some(8.0), Some(pass_token(ratio < 8.0).to_string()));
        Ok(out)
    }

    fn theorem_rows(&self) -> Result<Vec<ReportRow>> {
        let quad = BoxQuadrature::default();
        let rep =
            theorem_check(self.weight, self.cfg.window, self.scales, self.policy, quad)?;
        let mut out = Vec::new();
        for ((id, profile), trend) in [
            ("mitsis", &rep.mitsis),
            ("carleson-box", &rep.carleson.modulus),
            ("lambda", &rep.lambda),
        ]
        .into_iter()
        .zip(rep.trends)
        {
            let small = profile.smallest();
            let large = profile.largest();
            let mut row = self.row(id).with_witness(small.witness);
            row.scale = Some(small.scale);
            row.value = Some(small.value);
            row.value2 = Some(large.value);
            row.floor = profile.floor as u8;
            row.verdict = trend_token(trend).to_string();
            out.push(row);
        }
        let mut row = self.row("verdict").with_witness(rep.ainfty_witness);
        row.value = Some(rep.ainfty_constant);
        row.floor = 1;
        row.verdict = verdict_token(rep.verdict).to_string();
        out.push(row);
        Ok(out)
    }

    fn cone_box_rows(&self) -> Result<Vec<ReportRow>> {
        let spec = ConeSpec::SWEEP;
        let quad = BoxQuadrature::default();
        let rep = cone_box_equivalence(
            self.weight,
            self.cfg.window,
            self.scales,
            self.policy,
            spec,
            quad,
        )?;
        let mut out = self.profile_rows("cone", &rep.cone, Some(spec.depth), Some(spec.panels_x));
        out.extend(self.profile_rows("box", &rep.boxes, Some(quad.depth), Some(quad.panels_x)));
        let mut row = self.row("coupling");
        row.value = rep.ratio_band.map(|(lo, _)| lo);
        row.value2 = rep.ratio_band.map(|(_, hi)| hi);
        row.verdict = if rep.agree {
            "agree".to_string()
        } else if rep.cone_trend != ModulusTrend::Inconclusive
            && rep.box_trend != ModulusTrend::Inconclusive
        {
            "mixed".to_string()
        } else {
            "inconclusive".to_string()
        };
        out.push(row);
        let mut row = self.row("skipped");
        row.value = Some(rep.skipped as f64);
        out.push(row);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;
    use crate::report;
    use crate::config::OutputFormat;

    fn cfg_with(analyses: &str) -> ExperimentConfig {
        let text = format!(
            "weight=constant:1\nwindow=-2,2\ncells=4096\nscales=0.05,0.4,4\n\
             max_positions=256\nanalyses={analyses}\n"
        );
        parse_config(&text).unwrap()
    }

    #[test]
    fn masses_rows_carry_exact_values() {
        let out = run_experiment(&cfg_with("masses")).unwrap();
        assert!(out.succeeded());
        assert_eq!(out.rows.len(), 3);
        assert_eq!(out.rows[0].id, "mass");
        assert!((out.rows[0].value.unwrap() - 4.0).abs() < 1e-12);
        assert_eq!(out.rows[1].id, "average");
        assert!((out.rows[1].value.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(out.rows[2].id, "log-average");
        assert!(out.rows[2].value.unwrap().abs() < 1e-12);
        assert_eq!(out.rows[0].witness_lo, Some(-2.0));
        assert_eq!(out.rows[0].witness_hi, Some(2.0));
    }

    #[test]
    fn declaration_order_is_preserved() {
        let out = run_experiment(&cfg_with("mitsis,masses,doubling")).unwrap();
        let order: Vec<&str> = out.rows.iter().map(|r| r.analysis.as_str()).collect();
        let first_masses = order.iter().position(|a| *a == "masses").unwrap();
        let last_mitsis = order.iter().rposition(|a| *a == "mitsis").unwrap();
        let doubling = order.iter().position(|a| *a == "doubling").unwrap();
        assert!(last_mitsis < first_masses && first_masses < doubling, "{order:?}");
    }

    #[test]
    fn theorem_check_on_constant_weight_reports_floors() {
        let out = run_experiment(&cfg_with("theorem-check")).unwrap();
        assert!(out.succeeded());
        assert_eq!(out.rows.len(), 4);
        let ids: Vec<&str> = out.rows.iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, ["mitsis", "carleson-box", "lambda", "verdict"]);
        for row in &out.rows[..3] {
            assert_eq!(row.verdict, "vanishing");
            // at the floor: the reported value sits on it
            assert!((row.value.unwrap() - row.floor as f64).abs() < 1e-10, "{row:?}");
        }
        assert_eq!(out.rows[3].verdict, "all-vanishing");
        assert_eq!(out.rows[0].floor, 1);
        assert_eq!(out.rows[1].floor, 0);
        assert_eq!(out.rows[2].floor, 0);
    }

    #[test]
    fn failed_analysis_yields_error_row_and_marks_run() {
        // decomposition probes (x0 - t, x0 + t): a scale equal to the
        // window length cannot fit, so the analysis must fail cleanly
        let text = "weight=constant:1\nwindow=-1,1\ncells=4096\nscales=0.5,2,2\nanalyses=decomposition:4,masses\n";
        let cfg = parse_config(text).unwrap();
        let out = run_experiment(&cfg).unwrap();
        assert!(!out.succeeded());
        assert_eq!(out.failures.len(), 1);
        assert!(matches!(out.failures[0].1, WeightError::DomainExceeded { .. }));
        assert_eq!(out.rows[0].verdict, "error");
        assert_eq!(out.rows[0].id, "domain-exceeded");
        // the later analysis still ran
        assert!(out.rows.iter().any(|r| r.analysis == "masses"));
    }

    #[test]
    fn eta_field_vanishes_for_constant_weight() {
        let out = run_experiment(&cfg_with("eta")).unwrap();
        assert!(out.rows.len() > 8);
        for row in &out.rows {
            assert!(row.value.unwrap().abs() < 1e-12);
            assert!(row.value2.unwrap().abs() < 1e-12);
            let len = row.witness_hi.unwrap() - row.witness_lo.unwrap();
            assert!((len - row.scale.unwrap()).abs() < 1e-12, "box base has height length");
        }
    }

    #[test]
    fn jn_on_constant_weight_is_degenerate() {
        let out = run_experiment(&cfg_with("jn")).unwrap();
        assert_eq!(out.rows.len(), 1);
        assert_eq!(out.rows[0].verdict, "degenerate");
    }

    #[test]
    fn jn_on_power_weight_fits_a_tail() {
        // needs a weight whose log is unbounded: bounded logs put every
        // tail fraction either above the fit band or at zero
        let text = "weight=power:0:1\nwindow=-2,2\ncells=4096\nscales=0.05,0.4,4\nanalyses=jn\n";
        let out = run_experiment(&parse_config(text).unwrap()).unwrap();
        let fit = out.rows.last().unwrap();
        assert_eq!(fit.id, "fit");
        assert_eq!(fit.verdict, "pass");
        assert!(fit.value.unwrap() > 0.0);
        let tails: Vec<f64> =
            out.rows.iter().filter(|r| r.id.starts_with("tail-")).map(|r| r.value.unwrap()).collect();
        assert_eq!(tails.len(), TAIL_THRESHOLDS);
        assert!(tails.windows(2).all(|p| p[1] <= p[0] + 1e-12), "tails decrease");
    }

    #[test]
    fn runs_are_bitwise_deterministic() {
        let cfg = cfg_with("masses,bmo,vmo,mitsis,doubling,ap:2,ainfty,lambda-criterion");
        let a = report::render(&run_experiment(&cfg).unwrap().rows, OutputFormat::Csv);
        let b = report::render(&run_experiment(&cfg).unwrap().rows, OutputFormat::Csv);
        assert_eq!(a, b);
    }

    #[test]
    fn seeded_martingale_runs_are_reproducible() {
        let text = "weight=martingale:11:8:0.3:0.7\nwindow=-2,2\ncells=4096\n\
                    scales=0.05,0.4,3\nmax_positions=128\nanalyses=masses,vmo,carleson\n";
        let cfg = parse_config(text).unwrap();
        let a = report::render(&run_experiment(&cfg).unwrap().rows, OutputFormat::Json);
        let b = report::render(&run_experiment(&cfg).unwrap().rows, OutputFormat::Json);
        assert_eq!(a, b);
    }
}
