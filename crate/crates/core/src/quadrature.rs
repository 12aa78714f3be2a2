//! Small deterministic quadrature and summation helpers.

/// 8-point Gauss–Legendre abscissas on `[-1, 1]`.
const GL8_X: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329_0,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];

/// 8-point Gauss–Legendre weights on `[-1, 1]`.
const GL8_W: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362_0,
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// 8-point Gauss–Legendre integral of `f` over `[a, b]`.
///
/// Exact for polynomials of degree 15; near machine precision for smooth
/// integrands over short panels.
pub fn gauss8<F: Fn(f64) -> f64>(a: f64, b: f64, f: F) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for i in 0..8 {
        acc += GL8_W[i] * f(c + h * GL8_X[i]);
    }
    acc * h
}

/// Composite midpoint rule with `panels` equal panels over `[a, b]`.
pub fn midpoint<F: Fn(f64) -> f64>(a: f64, b: f64, panels: usize, f: F) -> f64 {
    debug_assert!(panels > 0);
    let h = (b - a) / panels as f64;
    let mut acc = KahanSum::new();
    for j in 0..panels {
        acc.add(f(a + (j as f64 + 0.5) * h));
    }
    acc.total() * h
}

/// Compensated (Kahan) running sum.
///
/// Used wherever many terms of one sign accumulate (prefix masses,
/// antiderivative tables), keeping relative error at a few ulps
/// independently of the term count.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum
    }
}

/// Midpoints of `panels` equal panels over `[a, b]`.
pub fn panel_midpoints(a: f64, b: f64, panels: usize) -> impl Iterator<Item = f64> {
    let h = (b - a) / panels as f64;
    (0..panels).map(move |j| a + (j as f64 + 0.5) * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss8_is_machine_exact_on_smooth_panels() {
        // antiderivative of exp(sin x) has no closed form; compare against
        // a fine composite midpoint reference instead
        let reference = midpoint(0.0, 0.5, 200_000, |x| (x.sin()).exp());
        let got = gauss8(0.0, 0.5, |x| (x.sin()).exp());
        assert!((got - reference).abs() < 1e-10, "got {got}, ref {reference}");
        // polynomial exactness
        let poly = gauss8(-1.0, 2.0, |x| 3.0 * x * x * x - x + 0.5);
        let exact = |x: f64| 0.75 * x.powi(4) - 0.5 * x * x + 0.5 * x;
        assert!((poly - (exact(2.0) - exact(-1.0))).abs() < 1e-12);
    }

    #[test]
    fn kahan_sum_beats_naive_on_many_small_terms() {
        let n = 1_000_000;
        let term = 0.1f64;
        let mut k = KahanSum::new();
        for _ in 0..n {
            k.add(term);
        }
        let exact = term * n as f64;
        assert!((k.total() - exact).abs() / exact < 1e-15);
    }

    #[test]
    fn midpoint_integrates_linear_exactly() {
        let v = midpoint(-2.0, 5.0, 7, |x| 3.0 * x + 1.0);
        let exact = 1.5 * (25.0 - 4.0) + 7.0;
        assert!((v - exact).abs() < 1e-12);
    }
}
