//! Acceptance gate: one test per release criterion, each ending in a
//! single `criterion NN …: PASS` line (a failed assertion is the FAIL).
//!
//! Tolerances are pinned here as literals; the expected constants come
//! from closed-form evaluation of the archetype weights.

use std::fs;
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use weightlab_core::area::{
    area_square_average, cone_box_equivalence, density_mass_ratio_integral, ConeSpec,
};
use weightlab_core::carleson::{
    box_functional, carleson_report, decomposition_diagnostics, eta, eta_tilde,
    layer_remainder_check, BoxQuadrature,
};
use weightlab_core::muckenhoupt::{
    doubling_constant, sandwich_check, vanishing_doubling_modulus,
};
use weightlab_core::oscillation::{mitsis_modulus, mitsis_ratio, sarason_product};
use weightlab_core::sweep::{log_spaced_scales, SweepPolicy};
use weightlab_core::weight::spec::parse_weight_spec;
use weightlab_core::{BoxPoint, Interval, WeightHandle};

/// One concrete instance per built-in analytic/seeded family; `sampled`
/// is a loader, not an archetype, so it has no registry instance.
const REGISTRY: [&str; 5] =
    ["constant:1", "power:0:1", "expsin:1:1", "step:0:1:6", "martingale:7:12:0.4:1.0"];

const CELLS: usize = 1 << 16;

fn window() -> Interval {
    Interval::new(-4.0, 4.0)
}

fn registry() -> Vec<(&'static str, WeightHandle)> {
    REGISTRY
        .iter()
        .map(|s| (*s, parse_weight_spec(s, window(), CELLS).unwrap()))
        .collect()
}

/// The default scale ladder, largest scale first as the sweeps expect.
fn default_scales() -> Vec<f64> {
    let mut s = log_spaced_scales(0.01, 0.5, 9);
    s.reverse();
    s
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen::<f64>() * (hi.ln() - lo.ln()) + lo.ln()).exp()
}

/// Random box with base inside the window, height log-uniform so small
/// scales are exercised as often as large ones.
fn random_box(rng: &mut ChaCha8Rng) -> BoxPoint {
    let y = log_uniform(rng, 1e-3, 4.0);
    let x = rng.gen_range((-4.0 + y / 2.0)..(4.0 - y / 2.0));
    BoxPoint::new(x, y)
}

fn random_interval(rng: &mut ChaCha8Rng) -> Interval {
    let len = log_uniform(rng, 1e-3, 7.9);
    let lo = rng.gen_range(-4.0..(4.0 - len));
    Interval::new(lo, lo + len)
}

/// Distance from the origin to an interval, zero when it contains 0.
fn origin_distance(i: Interval) -> f64 {
    if i.lo() > 0.0 {
        i.lo()
    } else if i.hi() < 0.0 {
        -i.hi()
    } else {
        0.0
    }
}

#[test]
fn criterion_01_amgm_floor() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for (spec, w) in registry() {
        for _ in 0..10_000 {
            let z = random_box(&mut rng);
            let e = eta(&w, z).unwrap();
            let et = eta_tilde(&w, z).unwrap();
            assert!(e >= -1e-12, "{spec}: eta = {e} at {z:?}");
            assert!(et >= 0.0, "{spec}: eta-tilde = {et} at {z:?}");
        }
    }
    // boxes centered on a symmetry center have equal half masses
    let pi2 = std::f64::consts::FRAC_PI_2;
    for (spec, center) in [("constant:1", 0.0), ("power:0:1", 0.0), ("expsin:1:1", pi2)] {
        let w = parse_weight_spec(spec, window(), CELLS).unwrap();
        let max_y = (2.0 * (4.0 - f64::abs(center)) - 1e-9).min(4.0);
        for _ in 0..10_000 {
            let y = log_uniform(&mut rng, 1e-3, max_y);
            let e = eta(&w, BoxPoint::new(center, y)).unwrap();
            assert!(e.abs() <= 1e-12, "{spec}: eta = {e} on symmetric box of height {y}");
        }
    }
    println!("criterion 01 (AM-GM floor of the box fields): PASS");
}

#[test]
fn criterion_02_jensen_chain() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for (spec, w) in registry() {
        let mut diverged = 0usize;
        for _ in 0..10_000 {
            let i = random_interval(&mut rng);
            let m = mitsis_ratio(&w, i).unwrap();
            assert!(m >= 1.0 - 1e-12, "{spec}: mitsis {m} below 1 on {i:?}");
            match sarason_product(&w, i) {
                Ok(s) => {
                    assert!(s >= m * (1.0 - 1e-12), "{spec}: sarason {s} < mitsis {m} on {i:?}")
                }
                Err(_) => diverged += 1,
            }
        }
        // the reciprocal mass is infinite only across a density zero
        if diverged > 0 {
            assert_eq!(spec, "power:0:1", "unexpected divergence for {spec}");
        }
    }
    println!("criterion 02 (Jensen chain sarason >= mitsis >= 1): PASS");
}

#[test]
fn criterion_03_derived_constants() {
    let w = parse_weight_spec("power:0:1", window(), CELLS).unwrap();

    let rep =
        doubling_constant(&w, window(), &default_scales(), SweepPolicy::default()).unwrap();
    let target = 2.0 + 5.0f64.sqrt();
    assert!(
        (rep.constant - target).abs() <= 0.01 * target,
        "doubling {} vs {target}",
        rep.constant
    );

    let et = eta_tilde(&w, BoxPoint::new(0.5, 1.0)).unwrap();
    assert!((et - 4.0).abs() <= 1e-9, "eta-tilde {et} vs 4");

    let m = mitsis_ratio(&w, Interval::new(0.0, 1.0)).unwrap();
    let target = std::f64::consts::E / 2.0;
    assert!((m - target).abs() <= 1e-6, "mitsis {m} vs e/2 = {target}");

    println!("criterion 03 (derived constants of the power archetype): PASS");
}

/// The three small-scale moduli of the equivalence, with their floors
/// already subtracted: Mitsis excess, box-integral sup, and the
/// half-mass-asymmetry sup.
fn three_moduli(
    w: &WeightHandle,
    scales: &[f64],
    policy: SweepPolicy,
) -> [weightlab_core::oscillation::OscillationProfile; 3] {
    let mitsis = mitsis_modulus(w, window(), scales, policy).unwrap();
    let boxes = carleson_report(w, window(), scales, policy, BoxQuadrature::default())
        .unwrap()
        .modulus;
    let lambda = vanishing_doubling_modulus(w, window(), scales, policy).unwrap().profile;
    [mitsis, boxes, lambda]
}

#[test]
fn criterion_04_vanishing_instance() {
    let w = parse_weight_spec("expsin:1:1", window(), CELLS).unwrap();
    let policy = SweepPolicy::default().with_max_positions(1024);
    for profile in three_moduli(&w, &default_scales(), policy) {
        let at_large = profile.largest().value - profile.floor;
        let at_small = profile.excess_at_smallest();
        assert!(
            at_large >= 4.0 * at_small,
            "{}: {at_large} at 0.5 vs {at_small} at 0.01",
            profile.functional
        );
        assert!(at_small < 0.02, "{}: {at_small} at 0.01", profile.functional);
    }
    println!("criterion 04 (smooth archetype: moduli vanish small-scale): PASS");
}

#[test]
fn criterion_05_nonvanishing_instance() {
    let w = parse_weight_spec("power:0:1", window(), CELLS).unwrap();
    let policy = SweepPolicy::default().with_max_positions(1024);
    for profile in three_moduli(&w, &default_scales(), policy) {
        for pt in &profile.points {
            assert!(
                pt.value - profile.floor > 0.05,
                "{} at scale {}: {}",
                profile.functional,
                pt.scale,
                pt.value
            );
            let witness = pt.witness.expect("supremum carries a witness");
            assert!(
                origin_distance(witness) <= witness.length(),
                "{} witness {witness:?} strays from the singularity",
                profile.functional
            );
        }
    }
    // the box functional is scale-invariant at the singularity
    let quad = BoxQuadrature::default();
    let a1 = box_functional(&w, 0.0, 0.2, quad).unwrap().value;
    let a2 = box_functional(&w, 0.0, 0.1, quad).unwrap().value;
    assert!((a1 - a2).abs() <= 0.02 * a1.abs(), "A(0, 0.2) = {a1} vs A(0, 0.1) = {a2}");
    println!("criterion 05 (power archetype: moduli stay up, origin-pinned): PASS");
}

#[test]
fn criterion_06_decomposition_identity() {
    for spec in ["power:0:1", "expsin:1:1"] {
        let w = parse_weight_spec(spec, window(), CELLS).unwrap();
        let quad = BoxQuadrature { depth: 12, ..BoxQuadrature::default() };
        let d = decomposition_diagnostics(&w, 0.3, 0.2, quad).unwrap();
        assert!(d.residual < 1e-3, "{spec}: residual {} at depth 12", d.residual);
        let finer =
            decomposition_diagnostics(&w, 0.3, 0.2, quad.with_doubled_panels()).unwrap();
        assert!(
            finer.residual < 0.5 * d.residual + 1e-14,
            "{spec}: {} then {}",
            d.residual,
            finer.residual
        );
    }
    println!("criterion 06 (four-term box decomposition closes): PASS");
}

#[test]
fn criterion_07_sandwich_bounds() {
    let w = parse_weight_spec("expsin:0.05:1", window(), CELLS).unwrap();
    for n in [1u32, 2, 4, 8, 16] {
        let rep = sandwich_check(&w, 0.3, 0.05, n, None, SweepPolicy::default()).unwrap();
        assert!(rep.eps_measured > 0.0, "n={n}: deviation must be measured");
        assert!(
            rep.margin_lower >= -1e-12 && rep.margin_upper >= -1e-12,
            "n={n}: bracket [{}, {}] vs ratio {}",
            rep.lower,
            rep.upper,
            rep.ratio_wide
        );
        assert!(rep.margin_translate >= -1e-12, "n={n}: translate margin {}", rep.margin_translate);
        assert!(rep.pass, "n={n}: {rep:?}");
    }
    println!("criterion 07 (mass sandwich brackets with nonnegative margins): PASS");
}

#[test]
fn criterion_08_area_identity() {
    let w = parse_weight_spec("expsin:0.05:1", window(), CELLS).unwrap();
    let rep = area_square_average(&w, 0.0, 0.1, ConeSpec::default()).unwrap();
    assert!(rep.identity_residual.abs() < 1e-2, "residual {}", rep.identity_residual);
    let fine = area_square_average(&w, 0.0, 0.1, ConeSpec::default().refined()).unwrap();
    assert!(
        fine.identity_residual.abs() <= 0.5 * rep.identity_residual.abs() + 1e-15,
        "{} then {}",
        rep.identity_residual,
        fine.identity_residual
    );
    let ratio = density_mass_ratio_integral(&w, 0.0, 0.1, 512).unwrap();
    assert!(ratio < 8.0, "density-mass ratio integral {ratio}");
    println!("criterion 08 (area square-average identity and ratio bound): PASS");
}

#[test]
fn criterion_09_layer_remainders() {
    let w = parse_weight_spec("expsin:0.05:1", window(), CELLS).unwrap();
    let rep = layer_remainder_check(&w, 0.0, 0.05, 10, 32, 4, SweepPolicy::default()).unwrap();
    assert!(rep.eps_prime > 0.0 && rep.eps_prime.is_finite(), "eps' {}", rep.eps_prime);
    assert_eq!(rep.layers.len(), 10);
    for layer in &rep.layers {
        assert!(
            layer.worst_ratio <= layer.bound,
            "layer {}: {} exceeds {}",
            layer.k,
            layer.worst_ratio,
            layer.bound
        );
    }
    assert!(rep.all_pass());
    println!("criterion 09 (geometric layer remainder bounds, k <= 10): PASS");
}

#[test]
fn criterion_10_cone_box_coupling() {
    let scales = [0.4, 0.2, 0.1, 0.05, 0.025];
    let policy = SweepPolicy::new(8, 1024);
    for (spec, w) in registry() {
        let rep = cone_box_equivalence(
            &w,
            window(),
            &scales,
            policy,
            ConeSpec::SWEEP,
            BoxQuadrature::default(),
        )
        .unwrap();
        let both_vanish =
            rep.cone.excess_at_smallest() < 0.02 && rep.boxes.excess_at_smallest() < 0.02;
        let both_stay_up = rep
            .cone
            .points
            .iter()
            .all(|p| p.value - rep.cone.floor > 0.05)
            && rep.boxes.points.iter().all(|p| p.value - rep.boxes.floor > 0.05);
        assert!(
            both_vanish || both_stay_up,
            "{spec}: mixed verdict, cone {:?} vs box {:?}",
            rep.cone.values(),
            rep.boxes.values()
        );
    }
    println!("criterion 10 (cone and box moduli agree on every registry weight): PASS");
}

#[test]
fn criterion_11_byte_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let configs = [
        (
            "full.cfg",
            "full.csv",
            "weight=expsin:1:1\nwindow=-2,2\ncells=4096\nscales=0.05,0.4,5\n\
             max_positions=128\n\
             analyses=masses,bmo,vmo,jn,sarason,mitsis,doubling,ap:2:4,ainfty,lemma32,\
lambda-criterion,eta,carleson,decomposition:4:8,area,theorem-check,cone-box\n\
             format=csv\n",
        ),
        (
            "seeded.cfg",
            "seeded.json",
            "weight=martingale:7:10:0.4:0.9\nwindow=-2,2\ncells=4096\nscales=0.05,0.4,5\n\
             max_positions=128\nanalyses=masses,vmo,eta,carleson,theorem-check\nformat=json\n",
        ),
    ];
    for (cfg_name, out_name, body) in configs {
        let out = dir.path().join(out_name);
        let cfg = dir.path().join(cfg_name);
        fs::write(&cfg, format!("{body}out={}\n", out.display())).unwrap();
        let mut reports = Vec::new();
        for _ in 0..2 {
            let res = Command::new(env!("CARGO_BIN_EXE_weightlab"))
                .args(["run", cfg.to_str().unwrap()])
                .output()
                .unwrap();
            assert!(
                res.status.success(),
                "{cfg_name}: {}",
                String::from_utf8_lossy(&res.stderr)
            );
            reports.push(fs::read(&out).unwrap());
        }
        assert_eq!(reports[0], reports[1], "{cfg_name}: reports differ between runs");
        assert!(!reports[0].is_empty());
    }
    println!("criterion 11 (identical configs give byte-identical reports): PASS");
}
