use fvcond::approx::*;
use proptest::prelude::*;

const GRID: usize = 100_000;

#[test]
fn linear_reciprocal_error() {
    // Best linear fit of 1/x on [1, 2] has error (3 - 2 sqrt 2) / 4.
    let bound = (3.0 - 2.0 * 2f64.sqrt()) / 4.0;
    let err = RECIP_DEG1.max_error_on_grid(|x| 1.0 / x, GRID);
    assert!(err <= 0.0429 + 1e-4, "{err}");
    assert!((err - bound).abs() < 2e-4, "{err} vs {bound}");
    assert!((1.0 / recip_deg1(1.0) - 1.0 / 0.9571).abs() < 1e-12);
    let s = 2f64.sqrt();
    // The error 1/x - p(x) equioscillates: +0.0429 at 1, -0.0429 at sqrt 2.
    assert!((1.0 / s - recip_deg1(s) + 0.0429).abs() < 1e-4);
}

#[test]
fn cubic_reciprocal_error_and_equioscillation() {
    let err = RECIP_DEG3.max_error_on_grid(|x| 1.0 / x, GRID);
    assert!(err <= 2f64.powf(-9.62) * 1.05, "{err}");
    let errs = RECIP_DEG3.errors_on_grid(|x| 1.0 / x, GRID);
    // Count sign alternations among near-extremal points.
    let mut signs = Vec::new();
    let mut i = 0;
    while i < errs.len() {
        if errs[i].abs() > 0.9 * err {
            let s = errs[i] > 0.0;
            if signs.last() != Some(&s) {
                signs.push(s);
            }
        }
        i += 1;
    }
    assert!(signs.len() >= 5, "{signs:?}");
}

#[test]
fn shifted_reciprocal_error() {
    let mut worst: f64 = 0.0;
    for i in 0..=GRID {
        let x = i as f64 / GRID as f64;
        worst = worst.max((1.0 / (1.0 + x) - recip_unit_shifted(x)).abs());
    }
    assert!(worst <= 0.043 + 1e-9, "{worst}");
}

#[test]
fn iteration_stays_bounded() {
    for i in 0..=10_000 {
        let z = -0.25 + 0.5 * i as f64 / 10_000.0;
        for r in 0..=10 {
            assert!(tanh_iterate(z, r).abs() <= 1.02);
        }
    }
}

#[test]
fn iteration_is_monotone_for_small_r() {
    for r in 0..=3 {
        let mut last = f64::NEG_INFINITY;
        for i in 0..=2_500 {
            let v = tanh_iterate(0.25 * i as f64 / 2_500.0, r);
            assert!(v >= last);
            last = v;
        }
    }
}

#[test]
fn iteration_approaches_sign_on_average() {
    // Pointwise the error overshoots (z = 0.2 is closest to 1 at r = 3), but
    // its mean over the grid shrinks through r = 6.
    let zs: Vec<f64> = [-4i32, -3, -2, -1, 1, 2, 3, 4].iter().map(|&s| 0.05 * s as f64).collect();
    let mean = |r| zs.iter().map(|&z| (tanh_iterate(z, r) - z.signum()).abs()).sum::<f64>() / 8.0;
    let errs: Vec<f64> = (1..=6).map(mean).collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
}

proptest! {
    #[test]
    fn doubling_is_odd(z in -2.0f64..2.0) {
        prop_assert_eq!(tanh_double(-z), -tanh_double(z));
    }

    #[test]
    fn iteration_is_odd(z in -0.25f64..0.25, r in 0u32..10) {
        prop_assert_eq!(tanh_iterate(-z, r), -tanh_iterate(z, r));
    }
}
