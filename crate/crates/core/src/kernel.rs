//! The kernels `F(z) = exp(c(1-r²)/(1-r z_1)^{d+1})` centred at `r e_1`.
//!
//! Everything here depends on `z` only through `λ = z_1`. Writing
//! `A = c(1-r²)` and `s = d+1`, the Taylor coefficients are
//! `F̂(0) = e^A` and, for `i ≥ 1`,
//! `F̂(i) = r^i Σ_{m≥1} (A^m/m!) C(i+sm-1, i)`,
//! a sum of positive log-concave terms in `m`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::numerics::{
    grid_then_golden, ln_factorial, ln_gamma, softplus, GoldenBudget, LogReal,
    RadialSeries,
};
use crate::quadrature::{integrate_slice, integrate_slice_focused, Estimate, QuadratureSpec};
use crate::{Error, Result};

/// Terms this far below the peak (in log) are dropped from the binomial
/// sum; `e^{-40}` is well below one ulp.
const SUM_CUTOFF: f64 = 40.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub d: u32,
    pub c: f64,
    pub r: f64,
}

impl KernelParams {
    pub fn new(d: u32, c: f64, r: f64) -> Result<Self> {
        let p = KernelParams { d, c, r };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::invalid(format!("kernel needs d >= 2, got {}", self.d)));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::invalid(format!("kernel needs c > 0, got {}", self.c)));
        }
        if !(0.0..1.0).contains(&self.r) {
            return Err(Error::invalid(format!("kernel needs 0 <= r < 1, got {}", self.r)));
        }
        Ok(())
    }

    /// `ln A = ln(c(1-r²))`.
    pub fn ln_amplitude(&self) -> f64 {
        self.c.ln() + (-self.r * self.r).ln_1p()
    }

    fn exponent(&self) -> u64 {
        u64::from(self.d) + 1
    }
}

/// Taylor coefficients to degree `N` by exponentiating
/// `A Σ_k C(k+d, d) r^k z^k`.
pub fn kernel_coeffs(p: &KernelParams, trunc_degree: usize) -> RadialSeries {
    let ln_a = p.ln_amplitude();
    let ln_r = p.r.ln();
    let d = u64::from(p.d);
    let inner = RadialSeries::from_fn(trunc_degree, |k| {
        if k > 0 && p.r == 0.0 {
            return LogReal::ZERO;
        }
        let k64 = k as u64;
        let ln_binom = ln_factorial(k64 + d) - ln_factorial(k64) - ln_factorial(d);
        let ln_rk = if k == 0 { 0.0 } else { k as f64 * ln_r };
        LogReal::from_log(ln_a + ln_binom + ln_rk)
    });
    inner.exp(trunc_degree)
}

/// Single coefficient `F̂(i)` from the binomial sum, without building the
/// series below it.
pub fn kernel_coeff(p: &KernelParams, i: u64) -> LogReal {
    let ln_a = p.ln_amplitude();
    if i == 0 {
        return LogReal::from_log(ln_a.exp());
    }
    if p.r == 0.0 {
        return LogReal::ZERO;
    }
    let s = p.exponent() as f64;
    let fi = i as f64;
    let ln_i_fact = ln_factorial(i);
    let term = |m: u64| {
        let mf = m as f64;
        mf * ln_a - ln_factorial(m) + ln_gamma(fi + s * mf) - ln_gamma(s * mf) - ln_i_fact
    };
    let rising = |m: u64| term(m + 1) > term(m);
    // exponential then binary search for the first m where the terms stop
    // increasing
    let mut hi = 1u64;
    while rising(hi) {
        hi *= 2;
    }
    let mut lo = hi / 2;
    if lo == 0 {
        lo = 1;
    }
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if rising(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    let peak = lo;
    let top = term(peak);
    let mut logs = vec![top];
    let mut m = peak;
    while m > 1 {
        m -= 1;
        let t = term(m);
        if t < top - SUM_CUTOFF {
            break;
        }
        logs.push(t);
    }
    let mut m = peak;
    loop {
        m += 1;
        let t = term(m);
        if t < top - SUM_CUTOFF {
            break;
        }
        logs.push(t);
    }
    let sum: f64 = logs.iter().map(|&t| (t - top).exp()).sum();
    LogReal::from_log(top + sum.ln() + fi * p.r.ln())
}

/// `F̂(0..=N)` each from [`kernel_coeff`], computed in parallel.
pub fn kernel_coeffs_direct(p: &KernelParams, trunc_degree: usize) -> RadialSeries {
    let coeffs: Vec<LogReal> = (0..=trunc_degree as u64)
        .into_par_iter()
        .map(|i| kernel_coeff(p, i))
        .collect();
    RadialSeries::from_coeffs(coeffs)
}

/// The complex logarithm `A (1 - rλ)^{-(d+1)}` of `F` at `λ`.
pub fn kernel_log_value(p: &KernelParams, lambda: Complex64) -> Result<Complex64> {
    let z = Complex64::new(1.0, 0.0) - lambda * p.r;
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::Pole);
    }
    let (rho, theta) = z.to_polar();
    let s = p.exponent() as f64;
    let a = p.ln_amplitude().exp();
    Ok(Complex64::from_polar(a * rho.powf(-s), -s * theta))
}

/// `ln|F(λ)| = A Re (1 - rλ)^{-(d+1)}`.
pub fn kernel_log_modulus(p: &KernelParams, lambda: Complex64) -> Result<f64> {
    kernel_log_value(p, lambda).map(|v| v.re)
}

fn log_modulus_unchecked(p: &KernelParams, lambda: Complex64) -> f64 {
    kernel_log_modulus(p, lambda).unwrap_or(f64::INFINITY)
}

/// `∫_{S_d} log(1 + c|F|) dσ_d`, with the integrand as `softplus(X + ln c)`.
pub fn drewnowski_integral(p: &KernelParams, quad: &QuadratureSpec) -> Result<Estimate> {
    p.validate()?;
    let ln_c = p.c.ln();
    let phi = |l: Complex64| softplus(log_modulus_unchecked(p, l) + ln_c);
    if p.r == 0.0 {
        integrate_slice(phi, p.d, quad)
    } else {
        integrate_slice_focused(phi, p.d, quad, 1.0 - p.r)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchBudget {
    /// Largest coefficient index the search will evaluate.
    pub max_index: u64,
    pub grid_points: usize,
    pub golden: GoldenBudget,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_index: 200_000,
            grid_points: 64,
            golden: GoldenBudget::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NawrockiResult {
    pub d: u32,
    pub c: f64,
    pub i: u64,
    pub r_star: f64,
    pub log_value: f64,
}

/// `ln( √C(d-1+i, i) F̂(i) )` at radius `r`.
pub fn normalized_log_coeff(d: u32, c: f64, i: u64, r: f64) -> f64 {
    let p = KernelParams { d, c, r };
    let d = u64::from(d);
    let half_ln_binom = 0.5 * (ln_factorial(d - 1 + i) - ln_factorial(d - 1) - ln_factorial(i));
    half_ln_binom + kernel_coeff(&p, i).logmag()
}

/// The uniform grid `(j + 1/2)/n`, `j < n`, that the search result must
/// dominate.
pub fn uniform_r_grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| (j as f64 + 0.5) / n as f64).collect()
}

/// `sup_{0 ≤ r < 1}` of the normalized `i`-th coefficient.
pub fn nawrocki_search(d: u32, c: f64, i: u64, budget: &SearchBudget) -> Result<NawrockiResult> {
    KernelParams::new(d, c, 0.0)?;
    if i > budget.max_index {
        return Err(Error::TruncationBudget {
            index: i,
            budget: budget.max_index,
        });
    }
    if i == 0 {
        // e^{c(1-r²)} is largest at r = 0
        return Ok(NawrockiResult {
            d,
            c,
            i,
            r_star: 0.0,
            log_value: c,
        });
    }
    let f = |r: f64| {
        if r <= 0.0 || r >= 1.0 {
            f64::NEG_INFINITY
        } else {
            normalized_log_coeff(d, c, i, r)
        }
    };
    let seed = 1.0 - (i as f64).powf(-1.0 / f64::from(d + 1));
    let mut grid = uniform_r_grid(budget.grid_points);
    grid.extend((1..=48).map(|k| 1.0 - 10f64.powf(-f64::from(k) / 8.0)));
    grid.push(seed);
    grid.retain(|&r| r > 0.0 && r < 1.0);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let (r_star, log_value) = grid_then_golden(f, &grid, budget.golden);
    Ok(NawrockiResult {
        d,
        c,
        i,
        r_star,
        log_value,
    })
}

/// `(λ on the boundary of {|λ| ≤ 1, Re λ ≤ 1 - 1/(2n²)}, ln(c|F(λ)|))` at
/// the maximizer. By the maximum principle for the harmonic exponent the
/// sup over the region is attained on its boundary; by conjugation
/// symmetry only the upper half is searched.
pub fn sup_on_vn_point(p: &KernelParams, n: u32) -> Result<(Complex64, LogReal)> {
    p.validate()?;
    if n == 0 {
        return Err(Error::invalid("level n must be at least 1"));
    }
    let ln_c = p.c.ln();
    let nf = f64::from(n);
    let x0 = 1.0 - 1.0 / (2.0 * nf * nf);
    let y0 = (1.0 - x0 * x0).max(0.0).sqrt();
    let theta0 = x0.acos();
    let budget = GoldenBudget::default();
    let arc = |th: f64| Complex64::from_polar(1.0, th);
    let chord = |y: f64| Complex64::new(x0, y);
    let grid = |a: f64, b: f64| -> Vec<f64> {
        (0..2048).map(|j| a + (b - a) * j as f64 / 2047.0).collect()
    };
    let (th, x_arc) = grid_then_golden(
        |th| log_modulus_unchecked(p, arc(th)),
        &grid(theta0, std::f64::consts::PI),
        budget,
    );
    let (y, x_chord) = grid_then_golden(|y| log_modulus_unchecked(p, chord(y)), &grid(0.0, y0), budget);
    let (lambda, x) = if x_arc >= x_chord {
        (arc(th), x_arc)
    } else {
        (chord(y), x_chord)
    };
    Ok((lambda, LogReal::from_log(ln_c + x)))
}

/// `sup_{ζ ∈ V_n} c|F(ζ)|` where `V_n = {ζ ∈ S_d : |ζ - e_1| ≥ 1/n}`.
pub fn sup_on_vn(p: &KernelParams, n: u32) -> Result<LogReal> {
    sup_on_vn_point(p, n).map(|(_, v)| v)
}

/// `ln F(ρ)` at a real `ρ < 1/r`. Positive coefficients make this the
/// maximum of `|F|` on the circle `|z| = ρ`.
pub fn kernel_log_at_real(p: &KernelParams, rho: f64) -> Result<f64> {
    if p.r * rho >= 1.0 {
        return Err(Error::Pole);
    }
    Ok(p.ln_amplitude().exp() * (1.0 - p.r * rho).powi(-(p.d as i32 + 1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(c: f64, r: f64) -> KernelParams {
        KernelParams::new(2, c, r).unwrap()
    }

    #[test]
    fn validation() {
        assert!(KernelParams::new(1, 1.0, 0.5).is_err());
        assert!(KernelParams::new(2, 0.0, 0.5).is_err());
        assert!(KernelParams::new(2, 1.0, 1.0).is_err());
        assert!(KernelParams::new(2, 1.0, -0.1).is_err());
    }

    #[test]
    fn first_coefficients() {
        let p = params(1.0, 0.5);
        let a = 0.75;
        let f = kernel_coeffs(&p, 8);
        assert!((f.coeff(0).logmag() - a).abs() < 1e-15);
        let expected = (a * 3.0 * 0.5) * f64::exp(a);
        assert!(f.coeff(1).rel_diff(LogReal::from_f64(expected)) < 1e-14);
    }

    #[test]
    fn two_routes_agree() {
        for &(c, r) in &[(1.0, 0.5), (0.25, 0.9), (0.01, 0.99), (3.0, 0.3)] {
            let p = params(c, r);
            let a = kernel_coeffs(&p, 300);
            let b = kernel_coeffs_direct(&p, 300);
            for k in 0..=300 {
                assert!(a.coeff(k).rel_diff(b.coeff(k)) < 1e-11, "c={c} r={r} k={k}");
                assert_eq!(a.coeff(k).sign(), 1);
            }
        }
        let p = KernelParams::new(4, 0.5, 0.7).unwrap();
        let a = kernel_coeffs(&p, 100);
        let b = kernel_coeffs_direct(&p, 100);
        for k in 0..=100 {
            assert!(a.coeff(k).rel_diff(b.coeff(k)) < 1e-11);
        }
    }

    #[test]
    fn zero_radius_is_constant() {
        let p = params(0.7, 0.0);
        assert!((kernel_log_modulus(&p, Complex64::new(0.3, -0.8)).unwrap() - 0.7).abs() < 1e-15);
        assert!(kernel_coeff(&p, 5).is_zero());
        assert!(kernel_coeffs(&p, 5).coeff(5).is_zero());
    }

    #[test]
    fn log_modulus_examples() {
        let p = params(1.0, 0.5);
        let at_one = kernel_log_modulus(&p, Complex64::new(1.0, 0.0)).unwrap();
        assert!((at_one - 0.75 / 0.125).abs() < 1e-13);
        let at_minus_one = kernel_log_modulus(&p, Complex64::new(-1.0, 0.0)).unwrap();
        assert!((at_minus_one - 2.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn drewnowski_constant_case() {
        let p = params(0.5, 0.0);
        let e = drewnowski_integral(&p, &QuadratureSpec::default()).unwrap();
        let exact = (1.0 + 0.5 * 0.5f64.exp()).ln();
        assert!((e.value - exact).abs() < 1e-14);
    }

    #[test]
    fn nawrocki_zero_index_and_budget() {
        let r = nawrocki_search(2, 1.5, 0, &SearchBudget::default()).unwrap();
        assert_eq!(r.r_star, 0.0);
        assert_eq!(r.log_value, 1.5);
        let tight = SearchBudget {
            max_index: 10,
            ..SearchBudget::default()
        };
        assert!(matches!(
            nawrocki_search(2, 1.0, 11, &tight),
            Err(Error::TruncationBudget { index: 11, budget: 10 })
        ));
    }

    #[test]
    fn nawrocki_dominates_grid() {
        let res = nawrocki_search(2, 1.0, 256, &SearchBudget::default()).unwrap();
        for r in uniform_r_grid(64) {
            assert!(res.log_value >= normalized_log_coeff(2, 1.0, 256, r));
        }
        assert!(res.r_star > 0.5 && res.r_star < 1.0);
    }

    #[test]
    fn sup_on_vn_basics() {
        let p = params(0.3, 0.0);
        let v = sup_on_vn(&p, 3).unwrap();
        assert!((v.logmag() - (0.3f64.ln() + 0.3)).abs() < 1e-15);
        let p = params(1.0, 0.9);
        let mut last = f64::NEG_INFINITY;
        for n in 1..=6 {
            let v = sup_on_vn(&p, n).unwrap().logmag();
            assert!(v >= last);
            last = v;
        }
    }
}
