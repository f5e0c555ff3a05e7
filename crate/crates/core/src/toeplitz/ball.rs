//! Solving `T_{m̄} g = f` on `H²(B_d)` for `f` depending on `z_1` only.
//!
//! With `t` and `m_1` from [`plan_for_symbol`], `g` has the form
//! `z_2^{t_2} ⋯ z_d^{t_d} · G(z_1)`, so the problem reduces to a
//! one-variable solve:
//!
//! * `n = 0`: `T_{m̄_1} g_1 = f` in `𝓗_{d-2}`, whose monomial norms are
//!   proportional to those of `z_1^k` in `H²(B_d)`, and `g = g_1(z_1)`.
//! * `n > 0`: `T_{m̄_1} g_2 = f_2` in `𝓗_{dn}` with
//!   `f̂_2(k) = f̂(k) (k+d)⋯(k+dn+1)`, `γ_k = ĝ_2(k) ‖z^k‖²_{dn}` and
//!   `G(z) = (1/t!) Σ γ_k (k+1)⋯(k+n+d-1) z^k`.
//!
//! The result is checked by applying `T_{m̄}` to `g` term by term in all
//! `d` variables, independently of the reduction.

use std::collections::BTreeMap;

use serde::Serialize;

use super::disk::{apply_toeplitz, solve_toeplitz_disk};
use super::growth::{growth_fit, GrowthFit};
use super::symbol::{plan_for_symbol, SymbolSeries, ToeplitzBallPlan};
use crate::numerics::{ln_factorial, LogReal, RadialSeries};
use crate::spaces::{MultiIndex, SpaceSpec};
use crate::Result;

#[derive(Clone, Debug)]
pub struct BallSolution {
    pub plan: ToeplitzBallPlan,
    /// Solution of the reduced one-variable problem (`g_1` or `g_2`).
    pub g_disk: RadialSeries,
    /// `γ_k`, present when `n > 0`.
    pub gamma: Option<RadialSeries>,
    /// `G`: the coefficient of `z_1^k z_2^{t_2} ⋯ z_d^{t_d}` in `g`.
    pub g_axis: RadialSeries,
    /// `e_j`: coefficients of `T_{m̄} g` along `z_1^j`, from the
    /// multivariable application.
    pub e: RadialSeries,
    /// `e_j` from the reduced formula `(j+1)⋯(j+d-1) Σ_k γ_k c_{k-j}`.
    pub e_reduced: RadialSeries,
    pub report: BallReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BallReport {
    pub d: usize,
    pub t: Vec<u32>,
    pub n: u64,
    pub trunc_degree: usize,
    /// Degrees `j ≤ checked_degree` are free of truncation effects.
    pub checked_degree: usize,
    /// `ln ‖g‖²` summed monomial by monomial.
    pub ln_norm_sq: f64,
    /// `ln ‖g‖²` from the closed form in terms of `γ` (or `g_1`).
    pub ln_norm_sq_chain: f64,
    /// `ln` of the upper bound `((d-1)!/t!) ‖g_2‖²_{𝓗_{dn}}`.
    pub ln_norm_bound: f64,
    /// Largest coefficient of `T_{m̄} g` that is not a real multiple of
    /// some `z_1^j`.
    pub off_axis: f64,
    /// `sup_j |e_j - f̂(j)| / |f̂(j)|` over checked degrees.
    pub mismatch: f64,
    /// `sup_j` relative gap between `e` and `e_reduced`.
    pub reduced_gap: f64,
    pub disk_residual: f64,
    pub disk_unmatched: f64,
    pub decay_fit: Option<GrowthFit>,
    pub warnings: Vec<String>,
}

fn rel_gap(a: LogReal, b: LogReal) -> f64 {
    let diff = a - b;
    if diff.is_zero() {
        0.0
    } else if b.is_zero() {
        diff.to_f64().abs()
    } else {
        (diff.logmag() - b.logmag()).exp()
    }
}

/// Solves `T_{m̄} g = f(z_1)` on `H²(B_d)` with everything truncated at
/// degree `N` in `z_1`.
pub fn solve_toeplitz_ball(
    m: &SymbolSeries,
    f: &RadialSeries,
    trunc_degree: usize,
) -> Result<BallSolution> {
    let plan = plan_for_symbol(m)?;
    let d = plan.d as u64;
    let n_shift = plan.n;
    let big_n = trunc_degree;
    let f = f.truncated(big_n);
    let m1 = plan.m1.truncated(big_n.max(plan.m1.trunc_degree()));
    let ln_t_fact = plan.ln_t_factorial();
    let mut warnings = Vec::new();

    let decay_fit = match growth_fit(&f) {
        Ok(fit) => {
            if !(fit.gamma > 0.5 && fit.c > 0.0) {
                warnings.push(format!(
                    "right-hand side decays like exp(-{:.3} k^{:.3}), slower than the required k^(1/2+eps)",
                    fit.c, fit.gamma
                ));
            }
            Some(fit)
        }
        Err(e) => {
            warnings.push(format!("decay of the right-hand side not checked: {e}"));
            None
        }
    };

    let (disk, g_disk, gamma, g_axis, e_reduced, ln_chain, ln_bound) = if n_shift == 0 {
        let space = if d >= 2 {
            SpaceSpec::weighted_disk((d - 2) as u32)
        } else {
            SpaceSpec::Ball { d: 1 }
        };
        let sol = solve_toeplitz_disk(&m1, &f, &space, big_n)?;
        let e_reduced = apply_toeplitz(&m1, &sol.g, &space);
        // ‖z_1^k‖²_{H²(B_d)} = (d-1)! ‖z^k‖²_{𝓗_{d-2}}
        let ln_chain = ln_factorial(d - 1)
            + LogReal::sum(
                (0..=big_n).map(|k| sol.g.coeff(k).powi(2).scale_log(space.ln_radial_norm_sq(k as u64))),
            )
            .logmag();
        let g = sol.g.clone();
        (sol, g.clone(), None, g, e_reduced, ln_chain, ln_chain)
    } else {
        let dn = d * n_shift;
        let space = SpaceSpec::weighted_disk(dn as u32);
        let f2 = RadialSeries::from_fn(big_n, |k| {
            let k = k as u64;
            f.coeff(k as usize)
                .scale_log(ln_factorial(k + dn + 1) - ln_factorial(k + d - 1))
        });
        let sol = solve_toeplitz_disk(&m1, &f2, &space, big_n)?;
        let gamma = RadialSeries::from_fn(big_n, |k| {
            sol.g.coeff(k).scale_log(space.ln_radial_norm_sq(k as u64))
        });
        let g_axis = RadialSeries::from_fn(big_n, |k| {
            let k64 = k as u64;
            gamma
                .coeff(k)
                .scale_log(ln_factorial(k64 + n_shift + d - 1) - ln_factorial(k64) - ln_t_fact)
        });
        let c: Vec<(usize, LogReal)> = m1
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, x)| (i, *x))
            .collect();
        let e_reduced = RadialSeries::from_fn(big_n, |j| {
            let s = LogReal::sum(
                c.iter()
                    .take_while(|&&(i, _)| j + i <= big_n)
                    .map(|&(i, ci)| gamma.coeff(j + i) * ci),
            );
            let j = j as u64;
            s.scale_log(ln_factorial(j + d - 1) - ln_factorial(j))
        });
        let ln_pre = ln_factorial(d - 1) - ln_t_fact;
        let ln_chain = ln_pre
            + LogReal::sum((0..=big_n).map(|k| {
                let k = k as u64;
                gamma
                    .coeff(k as usize)
                    .powi(2)
                    .scale_log(ln_factorial(k + n_shift + d - 1) - ln_factorial(k))
            }))
            .logmag();
        let ln_g2 = LogReal::sum(
            (0..=big_n).map(|k| sol.g.coeff(k).powi(2).scale_log(space.ln_radial_norm_sq(k as u64))),
        )
        .logmag();
        let g2 = sol.g.clone();
        (sol, g2, Some(gamma), g_axis, e_reduced, ln_chain, ln_pre + ln_g2)
    };

    let ball = SpaceSpec::Ball { d: d as u32 };
    let shift: Vec<u32> = std::iter::once(0).chain(plan.t.iter().copied()).collect();
    let alpha_at = |k: usize| {
        let mut a = shift.clone();
        a[0] = k as u32;
        MultiIndex::new(a).expect("d >= 1")
    };
    let ln_norm_sq = LogReal::sum((0..=big_n).map(|k| {
        let w = ball
            .monomial_norm_sq(&alpha_at(k))
            .expect("multi-index built with the symbol's dimension");
        g_axis.coeff(k).powi(2) * w
    }))
    .logmag();

    let (e, off_axis) = apply_ball(m, &g_axis, &shift, big_n);
    let checked_degree = big_n.saturating_sub(m1.degree().unwrap_or(0));
    let mismatch = (0..=checked_degree)
        .map(|j| rel_gap(e.coeff(j), f.coeff(j)))
        .fold(0.0, f64::max);
    let reduced_gap = (0..=checked_degree)
        .map(|j| rel_gap(e.coeff(j), e_reduced.coeff(j)))
        .fold(0.0, f64::max);

    let report = BallReport {
        d: plan.d,
        t: plan.t.clone(),
        n: n_shift,
        trunc_degree: big_n,
        checked_degree,
        ln_norm_sq,
        ln_norm_sq_chain: ln_chain,
        ln_norm_bound: ln_bound,
        off_axis,
        mismatch,
        reduced_gap,
        disk_residual: disk.residual,
        disk_unmatched: disk.unmatched,
        decay_fit,
        warnings,
    };
    Ok(BallSolution {
        plan,
        g_disk,
        gamma,
        g_axis,
        e,
        e_reduced,
        report,
    })
}

/// `T_{m̄} g` for `g = Σ_k G_k z^{(k, t)}`, via
/// `T_{m̄}(ζ^α/‖ζ^α‖²) = Σ_{β≤α} conj(b_{α-β}) ζ^β/‖ζ^β‖²` over every term
/// of `m`. Returns the `z_1^j` coefficients and the largest modulus of
/// anything else.
fn apply_ball(m: &SymbolSeries, g_axis: &RadialSeries, shift: &[u32], big_n: usize) -> (RadialSeries, f64) {
    let d = shift.len();
    let ball = SpaceSpec::Ball { d: d as u32 };
    let mut acc: BTreeMap<Vec<u32>, (Vec<LogReal>, Vec<LogReal>)> = BTreeMap::new();
    for (beta, b) in m.terms() {
        let be = beta.entries();
        if be[1..].iter().zip(&shift[1..]).any(|(x, y)| x > y) {
            continue;
        }
        let b_re = LogReal::from_f64(b.re);
        // conjugate
        let b_im = LogReal::from_f64(-b.im);
        for k in (be[0] as usize)..=big_n {
            let gk = g_axis.coeff(k);
            if gk.is_zero() {
                continue;
            }
            let mut alpha = shift.to_vec();
            alpha[0] = k as u32;
            let out: Vec<u32> = alpha.iter().zip(be).map(|(a, x)| a - x).collect();
            let ln_w_in = ball
                .monomial_norm_sq(&MultiIndex::new(alpha).expect("nonempty"))
                .expect("dimension matches")
                .logmag();
            let ln_w_out = ball
                .monomial_norm_sq(&MultiIndex::new(out.clone()).expect("nonempty"))
                .expect("dimension matches")
                .logmag();
            let base = gk.scale_log(ln_w_in - ln_w_out);
            let slot = acc.entry(out).or_default();
            if !b_re.is_zero() {
                slot.0.push(base * b_re);
            }
            if !b_im.is_zero() {
                slot.1.push(base * b_im);
            }
        }
    }
    let mut e = RadialSeries::zeros(big_n);
    let mut off_axis = 0.0f64;
    for (idx, (re, im)) in acc {
        let re = LogReal::sum(re);
        let im = LogReal::sum(im);
        let on_axis = idx[1..].iter().all(|&x| x == 0) && (idx[0] as usize) <= big_n;
        if on_axis {
            e.set(idx[0] as usize, re);
            off_axis = off_axis.max(im.to_f64().abs());
        } else {
            off_axis = off_axis.max(re.to_f64().hypot(im.to_f64()));
        }
    }
    (e, off_axis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn decaying(n: usize, p: f64) -> RadialSeries {
        RadialSeries::from_fn(n, |k| LogReal::from_log(-(k as f64).powf(p)))
    }

    #[test]
    fn pure_shift_symbol_hand_case() {
        // T_{z̄_2}(a z_2) = a ‖z_2‖² = a/2 in H²(B_2), so g = 2 z_2
        let m = SymbolSeries::real(2, [(vec![0, 1], 1.0)]).unwrap();
        let sol = solve_toeplitz_ball(&m, &RadialSeries::one(0), 0).unwrap();
        assert_eq!(sol.plan.t, vec![1]);
        assert!((sol.g_axis.coeff(0).to_f64() - 2.0).abs() < 1e-14);
        assert!((sol.e.coeff(0).to_f64() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn identity_symbol_returns_f() {
        let m = SymbolSeries::real(3, [(vec![0, 0, 0], 1.0)]).unwrap();
        let f = decaying(30, 0.6);
        let sol = solve_toeplitz_ball(&m, &f, 30).unwrap();
        for k in 0..=30 {
            assert!(sol.g_axis.coeff(k).rel_diff(f.coeff(k)) < 1e-14);
        }
        assert!(sol.report.mismatch < 1e-13);
    }

    #[test]
    fn case_a_shift() {
        let m = SymbolSeries::real(2, [(vec![1, 0], 1.0)]).unwrap();
        let f = decaying(200, 0.6);
        let sol = solve_toeplitz_ball(&m, &f, 200).unwrap();
        assert_eq!(sol.report.checked_degree, 199);
        assert!(sol.report.mismatch < 1e-8);
        assert!(sol.report.disk_residual < 1e-8);
        assert!(sol.report.off_axis == 0.0);
        assert!((sol.report.ln_norm_sq - sol.report.ln_norm_sq_chain).abs() < 1e-12);
    }

    #[test]
    fn case_b_identity_and_norm_chain() {
        let m = SymbolSeries::real(2, [(vec![0, 1], 1.0), (vec![1, 1], 1.0)]).unwrap();
        let f = RadialSeries::from_fn(120, |k| {
            LogReal::from_log(-(k as f64).powf(0.6) + ((k + 1) as f64).ln())
        });
        let sol = solve_toeplitz_ball(&m, &f, 120).unwrap();
        let r = &sol.report;
        assert_eq!(r.n, 1);
        assert!(r.mismatch < 1e-8, "{}", r.mismatch);
        assert!(r.reduced_gap < 1e-10, "{}", r.reduced_gap);
        assert!((r.ln_norm_sq - r.ln_norm_sq_chain).abs() < 1e-10);
        assert!(r.ln_norm_sq_chain <= r.ln_norm_bound);
    }

    #[test]
    fn off_plan_terms_stay_off_axis_free() {
        // the z_2² z_3 term has t-part (2,1) ≰ (1,0) and never reaches g
        let m = SymbolSeries::new(
            3,
            [
                (vec![0, 1, 0], Complex64::new(2.0, 0.0)),
                (vec![1, 1, 0], Complex64::new(0.5, 0.0)),
                (vec![0, 2, 1], Complex64::new(0.0, 1.0)),
            ],
        )
        .unwrap();
        let f = decaying(60, 0.7);
        let sol = solve_toeplitz_ball(&m, &f, 60).unwrap();
        assert_eq!(sol.plan.t, vec![1, 0]);
        assert_eq!(sol.report.off_axis, 0.0);
        assert!(sol.report.mismatch < 1e-9);
    }

    #[test]
    fn slow_decay_warns() {
        let m = SymbolSeries::real(2, [(vec![0, 0], 1.0)]).unwrap();
        let f = decaying(100, 0.3);
        let sol = solve_toeplitz_ball(&m, &f, 100).unwrap();
        assert_eq!(sol.report.warnings.len(), 1);
    }
}
