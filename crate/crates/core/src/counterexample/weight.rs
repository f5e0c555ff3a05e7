//! The weight `g = (1 + Σ_n |c_n F_n|²)^{-1/2}` and the functionals the
//! certificate checks against it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::certificate::{Certificate, Level};
use crate::kernel::{kernel_coeffs_direct, kernel_log_at_real, kernel_log_modulus, KernelParams};
use crate::numerics::{golden_max, log_sum_exp, softplus, GoldenBudget, LogReal};
use crate::quadrature::{integrate_slice_focused, Estimate, QuadratureSpec};
use crate::spaces::{decay_target, gamma_functional, SpaceSpec};
use crate::Result;

fn log_cf(p: &KernelParams, lambda: Complex64) -> f64 {
    p.c.ln() + kernel_log_modulus(p, lambda).unwrap_or(f64::INFINITY)
}

/// `log g(λ) = -½ log(1 + Σ_n e^{2(log c_n + X_n(λ))})`.
pub fn g_log_modulus(cert: &Certificate, lambda: Complex64) -> f64 {
    let params = cert.kernel_params();
    log_g(&params, lambda)
}

fn log_g(params: &[KernelParams], lambda: Complex64) -> f64 {
    let exps: Vec<f64> = params.iter().map(|p| 2.0 * log_cf(p, lambda)).collect();
    -0.5 * softplus(log_sum_exp(&exps))
}

/// Narrowest kernel width, which sets the quadrature focus.
fn focus_width(params: &[KernelParams]) -> f64 {
    params
        .iter()
        .map(|p| 1.0 - p.r)
        .fold(1.0, f64::min)
}

/// `∫_{S_d} log g dσ_d` over the levels present.
pub fn szego_estimate(cert: &Certificate, quad: &QuadratureSpec) -> Result<Estimate> {
    let params = cert.kernel_params();
    let width = focus_width(&params);
    integrate_slice_focused(|l| log_g(&params, l), cert.d, quad, width)
}

/// `∫_{S_d} |c_n F_n|² g² dσ_d` for each level.
pub fn p2_norms(cert: &Certificate, quad: &QuadratureSpec) -> Result<Vec<Estimate>> {
    let params = cert.kernel_params();
    let width = focus_width(&params);
    params
        .iter()
        .map(|p| {
            integrate_slice_focused(
                |l| (2.0 * log_cf(p, l) + 2.0 * log_g(&params, l)).exp(),
                cert.d,
                quad,
                width,
            )
        })
        .collect()
}

/// `Γ(cF) = Σ_k c F̂(k) e^{-k^γ}` split into a computed partial sum and a
/// rigorous bound on the rest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaSum {
    /// Last degree included in the partial sum.
    pub terms: u64,
    pub ln_partial: f64,
    /// `ln` of an upper bound on `Σ_{k > terms}`.
    pub ln_tail_bound: f64,
    /// Whether every partial sum was at least the previous one.
    pub monotone: bool,
}

impl GammaSum {
    pub fn partial(&self) -> f64 {
        self.ln_partial.exp()
    }

    /// `ln` of partial sum plus tail bound.
    pub fn ln_upper(&self) -> f64 {
        log_sum_exp(&[self.ln_partial, self.ln_tail_bound])
    }
}

/// `Γ(c F)` against `f = Σ e^{-k^γ} C(k+d-1, k) z_1^k` in `H²(B_d)`, with
/// `F̂(0..=K)` computed directly and the rest bounded through Cauchy's
/// estimate `F̂(k) ≤ F(ρ) ρ^{-k}` for `1 < ρ < 1/r`:
/// `Σ_{k>K} ≤ c F(ρ) ρ^{-(K+1)} e^{-(K+1)^γ} / (1 - 1/ρ)`.
pub fn gamma_sum(p: &KernelParams, exponent: f64, terms: u64) -> GammaSum {
    let k_max = terms as usize;
    let cf = kernel_coeffs_direct(p, k_max).scale(LogReal::from_f64(p.c));
    let target = decay_target(p.d, exponent, k_max);
    let space = SpaceSpec::Ball { d: p.d };
    let partial = gamma_functional(&cf, &target, &space);

    let mut monotone = true;
    let mut running = LogReal::ZERO;
    for k in 0..=k_max {
        let term = cf.coeff(k) * target.coeff(k) * space.radial_norm_sq(k as u64);
        let next = running + term;
        if next.cmp_value(running) == std::cmp::Ordering::Less {
            monotone = false;
        }
        running = next;
    }

    let k1 = (terms + 1) as f64;
    let bound = |u: f64| {
        // ρ = e^u
        let rho = u.exp();
        match kernel_log_at_real(p, rho) {
            Ok(ln_f) => p.c.ln() + ln_f - k1 * u - k1.powf(exponent) - (-(-u).exp()).ln_1p(),
            Err(_) => f64::INFINITY,
        }
    };
    let u_max = if p.r == 0.0 { 50.0 } else { -p.r.ln() };
    let (_, neg) = golden_max(|u| -bound(u), 0.0, u_max, GoldenBudget::default());
    GammaSum {
        terms,
        ln_partial: partial.logmag(),
        ln_tail_bound: -neg,
        monotone,
    }
}

/// Number of terms used for `Γ` at a level: `factor · i_n`, capped by the
/// truncation budget.
pub fn gamma_terms(level: &Level, factor: f64, max_index: u64) -> u64 {
    (((level.i_n as f64) * factor).ceil() as u64).clamp(level.i_n, max_index.max(level.i_n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_sum_of_constant_kernel() {
        // r = 0: F = e^c, so Γ(cF) = c e^c exactly
        let p = KernelParams::new(2, 0.5, 0.0).unwrap();
        let s = gamma_sum(&p, 4.0 / 7.0, 10);
        assert!((s.ln_partial - (0.5f64.ln() + 0.5)).abs() < 1e-14);
        assert!(s.monotone);
    }

    #[test]
    fn tail_bound_dominates_a_longer_partial_sum() {
        let p = KernelParams::new(2, 0.25, 0.8).unwrap();
        let short = gamma_sum(&p, 4.0 / 7.0, 200);
        let long = gamma_sum(&p, 4.0 / 7.0, 2000);
        assert!(long.ln_partial >= short.ln_partial);
        assert!(long.ln_partial <= short.ln_upper() + 1e-12);
        assert!(short.ln_tail_bound.is_finite());
    }
}
