use ballspace::kernel::{kernel_coeff, kernel_coeffs, kernel_log_value, KernelParams};
use ballspace::numerics::{LogReal, RadialSeries};
use ballspace::quadrature::{integrate_slice, montecarlo_sphere, QuadratureSpec};
use ballspace::spaces::{szego_project_mixed, MultiIndex, SpaceSpec};
use ballspace::toeplitz::{apply_toeplitz, solve_toeplitz_disk};
use nalgebra::{DMatrix, DVector};
use num_bigint::BigUint;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::from(1u32), |acc, k| acc * k)
}

/// `(m, e)` with `x ≈ m · 2^e` and `m` holding the top 63 bits.
fn top_bits(x: &BigUint) -> (f64, i64) {
    let shift = x.bits().saturating_sub(63);
    let top = (x >> shift).to_u64_digits().first().copied().unwrap_or(0);
    (top as f64, shift as i64)
}

fn ln_big(x: &BigUint) -> f64 {
    let (m, e) = top_bits(x);
    m.ln() + e as f64 * std::f64::consts::LN_2
}

fn ln_ratio(num: &BigUint, den: &BigUint) -> f64 {
    let (mn, en) = top_bits(num);
    let (md, ed) = top_bits(den);
    (mn / md).ln() + (en - ed) as f64 * std::f64::consts::LN_2
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ball_norms_match_exact_factorials(alpha in prop::collection::vec(0u32..60, 1..6)) {
        let d = alpha.len() as u64;
        let total: u64 = alpha.iter().map(|&a| u64::from(a)).sum();
        let num = alpha.iter().fold(factorial(d - 1), |acc, &a| acc * factorial(u64::from(a)));
        let den = factorial(d - 1 + total);
        let space = SpaceSpec::ball(d as u32).unwrap();
        let got = space.monomial_norm_sq(&MultiIndex::new(alpha).unwrap()).unwrap();
        prop_assert!((got.logmag() - ln_ratio(&num, &den)).abs() < 1e-12);
    }

    #[test]
    fn weighted_disk_norms_match_exact_products(n in 0u32..10, k in 0u64..400) {
        let den = (k + 1..=k + u64::from(n) + 1).fold(BigUint::from(1u32), |acc, j| acc * j);
        let got = SpaceSpec::weighted_disk(n).radial_norm_sq(k);
        prop_assert!((got.logmag() + ln_big(&den)).abs() < 1e-12);
    }

    #[test]
    fn projection_matches_exact_factorials(
        d in 2u32..5,
        i in 0u64..50,
        j in 0u64..50,
        rest in prop::collection::vec(0u32..8, 3),
    ) {
        let alphas = &rest[..(d - 1) as usize];
        let got = szego_project_mixed(d, i, j, alphas).unwrap();
        if i < j {
            prop_assert!(got.is_zero());
        } else {
            let d = u64::from(d);
            let sa: u64 = alphas.iter().map(|&a| u64::from(a)).sum();
            let num = alphas
                .iter()
                .fold(factorial(d - 1 + i - j) * factorial(i), |acc, &a| acc * factorial(u64::from(a)));
            let den = factorial(i - j) * factorial(d - 1 + i + sa);
            prop_assert!((got.logmag() - ln_ratio(&num, &den)).abs() < 1e-12);
        }
    }
}

/// `T_{m̄}` as a dense upper-triangular matrix on degrees `0..=n`.
fn dense_toeplitz(m: &[f64], space: &SpaceSpec, n: usize) -> DMatrix<f64> {
    let w: Vec<f64> = (0..=n).map(|k| space.radial_norm_sq(k as u64).to_f64()).collect();
    DMatrix::from_fn(n + 1, n + 1, |j, i| {
        if i >= j && i - j < m.len() {
            m[i - j] * w[i] / w[j]
        } else {
            0.0
        }
    })
}

#[test]
fn disk_solve_matches_a_dense_triangular_solve() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..12 {
        let n_space = trial % 7;
        let space = SpaceSpec::weighted_disk(n_space as u32);
        let big_n = 80;
        let mut m = vec![1.5 + rng.gen::<f64>()];
        m.extend((0..3).map(|_| rng.gen_range(-0.4..0.4)));
        let f: Vec<f64> = (0..=big_n)
            .map(|k| rng.gen_range(0.5..1.5) * (-(k as f64).powf(0.6)).exp())
            .collect();
        let a = dense_toeplitz(&m, &space, big_n);
        let dense = a.solve_upper_triangular(&DVector::from_vec(f.clone())).unwrap();
        let sol = solve_toeplitz_disk(&RadialSeries::from_f64s(&m), &RadialSeries::from_f64s(&f), &space, big_n).unwrap();
        for k in 0..=big_n {
            let got = sol.g.coeff(k).to_f64();
            assert!(
                (got - dense[k]).abs() <= 1e-11 * dense[k].abs().max(1e-300),
                "trial {trial}, degree {k}: {got} vs {}",
                dense[k]
            );
        }
        let applied = apply_toeplitz(&RadialSeries::from_f64s(&m), &sol.g, &space);
        let dense_applied = &a * DVector::from_iterator(big_n + 1, (0..=big_n).map(|k| sol.g.coeff(k).to_f64()));
        for k in 0..=big_n - 3 {
            let got = applied.coeff(k).to_f64();
            assert!((got - dense_applied[k]).abs() <= 1e-12 * dense_applied[k].abs() + 1e-300);
        }
    }
}

fn schoolbook_exp(a: &[f64], n: usize) -> Vec<f64> {
    let mul = |x: &[f64], y: &[f64]| {
        let mut out = vec![0.0; n + 1];
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate().take(n + 1 - i) {
                out[i + j] += xi * yj;
            }
        }
        out
    };
    let mut a1 = a.to_vec();
    a1.resize(n + 1, 0.0);
    let c0 = a1[0];
    a1[0] = 0.0;
    let mut term = vec![0.0; n + 1];
    term[0] = 1.0;
    let mut sum = term.clone();
    for p in 1..=n {
        term = mul(&term, &a1).iter().map(|t| t / p as f64).collect();
        for (s, t) in sum.iter_mut().zip(&term) {
            *s += t;
        }
    }
    sum.iter().map(|s| s * c0.exp()).collect()
}

#[test]
fn series_exp_matches_the_power_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let a: Vec<f64> = (0..=12).map(|_| rng.gen_range(0.0..1.0)).collect();
        let n = 30;
        let want = schoolbook_exp(&a, n);
        let got = RadialSeries::from_f64s(&a).exp(n);
        for (k, w) in want.iter().enumerate() {
            let g = got.coeff(k).to_f64();
            assert!((g - w).abs() <= 1e-12 * w.abs(), "degree {k}: {g} vs {w}");
        }
    }
}

/// Taylor coefficients from a discrete Cauchy integral on `|z| = 1`.
fn cauchy_coeffs(p: &KernelParams, degree: usize) -> Vec<f64> {
    let m = 256;
    (0..=degree)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..m {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
                let z = Complex64::from_polar(1.0, theta);
                let f = kernel_log_value(p, z).unwrap().exp();
                acc += f * Complex64::from_polar(1.0, -(k as f64) * theta);
            }
            acc.re / m as f64
        })
        .collect()
}

#[test]
fn kernel_coefficients_match_a_cauchy_integral() {
    let p = KernelParams::new(2, 1.0, 0.5).unwrap();
    let want = cauchy_coeffs(&p, 8);
    let series = kernel_coeffs(&p, 8);
    for (k, w) in want.iter().enumerate() {
        let a = series.coeff(k).to_f64();
        let b = kernel_coeff(&p, k as u64).to_f64();
        assert!((a - w).abs() <= 1e-10 * w.abs(), "series degree {k}: {a} vs {w}");
        assert!((b - w).abs() <= 1e-10 * w.abs(), "direct degree {k}: {b} vs {w}");
    }
    assert!((want[0] - 0.75f64.exp()).abs() < 1e-12);
}

#[test]
fn quadrature_agrees_with_monte_carlo() {
    for (d, k) in [(2u32, 1u32), (3, 2), (4, 3)] {
        let quad = integrate_slice(|l| l.norm_sqr().powi(k as i32), d, &QuadratureSpec::default()).unwrap();
        let mc = montecarlo_sphere(|z| z[0].norm_sqr().powi(k as i32), d, 200_000, 3).unwrap();
        assert!(
            (quad.value - mc.value).abs() < 5.0 * mc.std_error,
            "d = {d}, k = {k}: {} vs {} ± {}",
            quad.value,
            mc.value,
            mc.std_error
        );
    }
}

#[test]
fn log_of_a_zero_free_polynomial_integrates_to_its_value_at_zero() {
    // log|p(ζ_1)| is pluriharmonic, so its sphere mean is log|p(0)|
    let p = RadialSeries::from_f64s(&[2.0, -1.0, 0.5]);
    for d in 2..=4 {
        let est = integrate_slice(|l| p.eval(l).norm().ln(), d, &QuadratureSpec::default()).unwrap();
        assert!((est.value - 2f64.ln()).abs() < 1e-9, "d = {d}: {}", est.value);
    }
    let mc = montecarlo_sphere(|z| p.eval(z[0]).norm().ln(), 3, 100_000, 5).unwrap();
    assert!((mc.value - 2f64.ln()).abs() < 5.0 * mc.std_error);
}

#[test]
fn logreal_sums_match_exact_rationals() {
    // Σ_{k=1}^{60} 1/k against the exact harmonic number
    let terms: Vec<LogReal> = (1..=60).map(|k| LogReal::from_f64(1.0 / k as f64)).collect();
    let got = LogReal::sum(terms);
    let den = (1..=60u64).fold(BigUint::from(1u32), |acc, k| acc * k);
    let num = (1..=60u64).fold(BigUint::from(0u32), |acc, k| acc + &den / k);
    let diff = got.logmag() - ln_ratio(&num, &den);
    assert!(diff.abs() < 1e-14, "{diff:e}");
}
