use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;
use zsk_core::lattice::{phi, PhiParams};
use zsk_core::numerics::{
    gamma_ref, grouped_difference_sum, grouped_difference_tail, periodic_trapezoid_integral, theta_ab, zeta_real,
    zeta_ref, AccumulatorMode, CompensatedAccumulator, NumericsError, ToleranceConfig,
};

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn exact_sum(terms: &[f64]) -> f64 {
    let mut acc = BigRational::zero();
    for &t in terms {
        acc += BigRational::from_float(t).unwrap();
    }
    acc.to_f64().unwrap()
}

fn ulp(x: f64) -> f64 {
    let x = x.abs();
    if x == 0.0 {
        return f64::from_bits(1);
    }
    f64::from_bits(x.to_bits() + 1) - x
}

fn accumulate(terms: &[f64], mode: AccumulatorMode) -> CompensatedAccumulator {
    let mut acc = CompensatedAccumulator::with_mode(mode);
    for &t in terms {
        acc.add(t).unwrap();
    }
    acc
}

#[test]
fn accumulator_examples() {
    for mode in [AccumulatorMode::Neumaier, AccumulatorMode::DoubleWord] {
        assert_eq!(accumulate(&[1.0, -1.0], mode).value(), 0.0);
        assert_eq!(accumulate(&[1e16, 1.0, -1e16], mode).value(), 1.0);
    }
}

#[test]
fn million_tenths_match_exact_rational_sum() {
    let terms = vec![0.1; 1_000_000];
    let exact = exact_sum(&terms);
    assert!((exact - 1e5).abs() < 1e-9);
    for mode in [AccumulatorMode::Neumaier, AccumulatorMode::DoubleWord] {
        let acc = accumulate(&terms, mode);
        assert!((acc.value() - 1e5).abs() < 1e-9, "{mode:?}: {}", acc.value());
        assert!((acc.value() - exact).abs() <= ulp(exact));
        assert_eq!(acc.count(), 1_000_000);
    }
    // The plain loop drifts well past the tolerance.
    let naive: f64 = terms.iter().sum();
    assert!((naive - 1e5).abs() > 1e-9);
}

#[test]
fn non_finite_terms_are_rejected() {
    let mut acc = CompensatedAccumulator::new();
    acc.add(2.0).unwrap();
    assert!(matches!(acc.add(f64::NAN), Err(NumericsError::NonFiniteTerm(_))));
    assert!(acc.add(f64::INFINITY).is_err());
    assert_eq!(acc.value(), 2.0);
    assert_eq!(acc.count(), 1);
}

#[test]
fn zeta_classical_values() {
    let z2 = zeta_ref(Complex64::new(2.0, 0.0), &tol()).unwrap();
    assert!((z2.re - PI * PI / 6.0).abs() < 1e-14 && z2.im.abs() < 1e-15);
    let z4 = zeta_real(4.0, &tol()).unwrap();
    assert!((z4 - PI.powi(4) / 90.0).abs() < 1e-14);
}

/// `ζ(3)` from the alternating series `Σ (−1)^{n+1} n^{−3}` summed in pairs with
/// Richardson extrapolation on the truncation point.
fn apery_oracle() -> f64 {
    let eta = |n: u64| -> f64 {
        let mut acc = CompensatedAccumulator::with_mode(AccumulatorMode::DoubleWord);
        for k in 1..=n {
            let kf = k as f64;
            let t = 1.0 / (kf * kf * kf);
            acc.add_finite(if k % 2 == 1 { t } else { -t });
        }
        // Averaging consecutive partial sums cancels the leading n^{-3} oscillation.
        let next = ((n + 1) as f64).powi(-3) * if n % 2 == 0 { 1.0 } else { -1.0 };
        acc.value() + next / 2.0
    };
    let (e1, e2) = (eta(20_000), eta(40_000));
    // Remaining error is O(n^{-4}).
    let eta3 = e2 + (e2 - e1) / 15.0;
    eta3 / (1.0 - 0.25)
}

#[test]
fn zeta_three_against_accelerated_alternating_sum() {
    let oracle = apery_oracle();
    assert!((oracle - 1.202_056_903_159_594_2).abs() < 1e-12, "{oracle}");
    let z = zeta_real(3.0, &tol()).unwrap();
    assert!((z - oracle).abs() < 1e-12, "{z} vs {oracle}");
}

#[test]
fn zeta_rejects_excluded_arguments() {
    assert!(zeta_ref(Complex64::new(1.0, 0.0), &tol()).is_err());
    assert!(zeta_ref(Complex64::new(-0.5, 0.0), &tol()).is_err());
    // 2^{1−s} = 1 on the line Re s = 1.
    assert!(zeta_ref(Complex64::new(1.0, 2.0 * PI / 2f64.ln()), &tol()).is_err());
}

#[test]
fn grouped_difference_matches_scaled_zeta() {
    let groups = 100_000;
    for s in [Complex64::new(1.5, 0.0), Complex64::new(2.0, 3.0)] {
        let z = zeta_ref(s, &tol()).unwrap();
        for m in [2u32, 3, 5] {
            let lhs = grouped_difference_sum(s, m, groups).unwrap();
            let factor = Complex64::new(1.0, 0.0) - ((1.0 - s) * (m as f64).ln()).exp();
            let bound = grouped_difference_tail(s, m, groups) + 1e-12;
            let err = (lhs - factor * z).norm();
            assert!(err <= bound, "M={m} s={s}: {err} > {bound}");
        }
    }
}

#[test]
fn gamma_examples_and_domain() {
    assert!((gamma_ref(1.0).unwrap() - 1.0).abs() < 1e-15);
    assert!((gamma_ref(0.5).unwrap() - PI.sqrt()).abs() < 1e-15);
    assert!((gamma_ref(5.0).unwrap() - 24.0).abs() < 24.0 * 1e-14);
    assert!(gamma_ref(0.0).is_err());
    assert!(gamma_ref(-1.5).is_err());
}

#[test]
fn gamma_recurrence_on_grid() {
    let mut x = 0.1;
    while x <= 20.0 {
        let lhs = gamma_ref(x + 1.0).unwrap();
        let rhs = x * gamma_ref(x).unwrap();
        assert!((lhs - rhs).abs() <= 1e-12 * lhs, "x={x}");
        x += 0.05;
    }
}

#[test]
fn trapezoid_examples() {
    for points in [2, 3, 17, 1000] {
        assert_eq!(periodic_trapezoid_integral(|_| 1.0, points).unwrap(), 1.0);
    }
    let v = periodic_trapezoid_integral(|x| (2.0 * PI * x).sin().powi(2), 64).unwrap();
    assert!((v - 0.5).abs() < 1e-14);
    assert!(periodic_trapezoid_integral(|x| x, 1).is_err());
}

#[test]
fn trapezoid_of_abs_sine_against_richardson() {
    let f = |x: f64| (PI * x).sin().abs();
    let (t18, t19, t20) = (
        periodic_trapezoid_integral(f, 1 << 18).unwrap(),
        periodic_trapezoid_integral(f, 1 << 19).unwrap(),
        periodic_trapezoid_integral(f, 1 << 20).unwrap(),
    );
    // The kink at the integers gives an h² error term.
    let oracle = t20 + (t20 - t19) / 3.0;
    assert!((oracle - (t19 + (t19 - t18) / 3.0)).abs() < 1e-13);
    assert!((t20 - oracle).abs() < 1e-10, "{t20} vs {oracle}");
    assert!((oracle - 2.0 / PI).abs() < 1e-13);
}

#[test]
fn theta_jacobi_value_against_brute_force() {
    let brute: f64 = (-12i32..=12).map(|n| (-(n * n) as f64).exp()).sum();
    let v = theta_ab(2.0, 0.0, 1.0, &tol()).unwrap();
    assert!((v - brute).abs() < 1e-12, "{v} vs {brute}");
}

#[test]
fn theta_decays_for_positive_b() {
    let v = theta_ab(1.0, 1.0, 50.0, &tol()).unwrap();
    assert!(v > 0.0 && v < 1e-20);
}

#[test]
fn theta_doubling_matches_direct_phi() {
    let p = PhiParams::new(2.0, 0.0, 2, 0).unwrap();
    for w in [0.01, 0.1, 0.37, 1.0, 2.5, 10.0] {
        let from_theta = (theta_ab(2.0, 0.0, w, &tol()).unwrap() - 2.0 * theta_ab(2.0, 0.0, 4.0 * w, &tol()).unwrap()
            + 1.0)
            / 2.0;
        let direct = phi(&p, w, &tol()).unwrap();
        assert!((from_theta - direct).abs() < 1e-12, "w={w}: {from_theta} vs {direct}");
    }
}

#[test]
fn tolerance_config_validation() {
    assert!(ToleranceConfig::new(0.0, 0.0, 10).is_err());
    assert!(ToleranceConfig::new(1e-12, -1.0, 10).is_err());
    assert!(ToleranceConfig::new(1e-12, 0.0, 0).is_err());
    assert!(ToleranceConfig::new(f64::NAN, 0.0, 10).is_err());
    let t = ToleranceConfig::new(1e-12, 0.0, 1).unwrap();
    assert_eq!(t.max_terms(), 1);
    assert!(t.with_max_terms(0).is_err());
}

fn scaled_terms(signed: bool) -> impl Strategy<Value = Vec<f64>> {
    let lo = if signed { -1.0 } else { 0.0 };
    prop::collection::vec((lo..1.0f64, -30i32..30), 1..400)
        .prop_map(|v| v.into_iter().map(|(m, e)| m * 2f64.powi(e)).collect())
}

proptest! {
    #[test]
    fn double_word_within_one_ulp_of_exact(terms in scaled_terms(true)) {
        let exact = exact_sum(&terms);
        let got = accumulate(&terms, AccumulatorMode::DoubleWord).value();
        prop_assert!((got - exact).abs() <= ulp(exact), "{got} vs {exact}");
    }

    #[test]
    fn neumaier_within_one_ulp_on_same_sign_terms(terms in scaled_terms(false)) {
        let exact = exact_sum(&terms);
        let got = accumulate(&terms, AccumulatorMode::Neumaier).value();
        prop_assert!((got - exact).abs() <= ulp(exact), "{got} vs {exact}");
    }

    #[test]
    fn count_tracks_adds(terms in scaled_terms(true)) {
        for mode in [AccumulatorMode::Neumaier, AccumulatorMode::DoubleWord] {
            prop_assert_eq!(accumulate(&terms, mode).count(), terms.len() as u64);
        }
    }

    #[test]
    fn merged_chunks_stay_within_one_ulp(terms in scaled_terms(true), split in 0usize..400) {
        let split = split.min(terms.len());
        let mut left = accumulate(&terms[..split], AccumulatorMode::DoubleWord);
        left.merge(&accumulate(&terms[split..], AccumulatorMode::DoubleWord));
        let exact = exact_sum(&terms);
        prop_assert_eq!(left.count(), terms.len() as u64);
        prop_assert!((left.value() - exact).abs() <= ulp(exact));
    }

    #[test]
    fn gamma_recurrence_holds(x in 0.1f64..20.0) {
        let lhs = gamma_ref(x + 1.0).unwrap();
        prop_assert!((lhs - x * gamma_ref(x).unwrap()).abs() <= 1e-12 * lhs);
    }
}

#[test]
fn exact_oracle_sanity() {
    let third = BigRational::new(BigInt::from(1), BigInt::from(3));
    assert!((third.to_f64().unwrap() - 1.0 / 3.0).abs() <= ulp(1.0 / 3.0));
}
