//! Co-analytic Toeplitz operators `T_{m̄}` on one-variable graded spaces.
//!
//! With `w(i) = ‖z^i‖²`, `T_{m̄}` acts on coefficients by
//! `(T g)_k = w(k)^{-1} Σ_{i≥k} ĝ(i) w(i) conj(m̂(i-k))`, which is upper
//! triangular: degree `k` only sees degrees `≥ k`.

use rayon::prelude::*;
use serde::Serialize;

use crate::numerics::{LogReal, RadialSeries};
use crate::spaces::SpaceSpec;
use crate::{Error, Result};

/// Nonzero `(degree, coefficient)` pairs of a real symbol.
fn support(m1: &RadialSeries) -> Vec<(usize, LogReal)> {
    m1.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, *c))
        .collect()
}

/// `T_{m̄_1} g` in `space`, truncated at the degree of `g`.
pub fn apply_toeplitz(m1: &RadialSeries, g: &RadialSeries, space: &SpaceSpec) -> RadialSeries {
    let n = g.trunc_degree();
    let ln_w = space.ln_radial_norms(n);
    let sup = support(m1);
    let h: Vec<LogReal> = (0..=n).map(|i| g.coeff(i).scale_log(ln_w[i])).collect();
    let out: Vec<LogReal> = (0..=n)
        .into_par_iter()
        .map(|k| {
            let mut buf: Vec<LogReal> = sup
                .iter()
                .take_while(|&&(s, _)| k + s <= n)
                .map(|&(s, b)| h[k + s] * b)
                .filter(|t| !t.is_zero())
                .collect();
            LogReal::sum_slice(&mut buf).scale_log(-ln_w[k])
        })
        .collect();
    RadialSeries::from_coeffs(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiskSolution {
    #[serde(skip)]
    pub g: RadialSeries,
    /// Vanishing order of the symbol at the origin.
    pub order: usize,
    /// `sup_{j ≤ N - deg m_1} |(T g - f)_j|`.
    pub residual: f64,
    /// `sup_{N - p < j ≤ N} |f̂(j)|`: the equations with no unknown left
    /// once the vanishing order `p` shifts the system.
    pub unmatched: f64,
}

/// Solves `T_{m̄_1} g = f` by back substitution from degree `N` down.
///
/// With vanishing order `p`, the equation at degree `j` determines
/// `ĝ(j + p)`; the coefficients `ĝ(0..p)` are set to zero and the top `p`
/// equations are reported through `unmatched`.
pub fn solve_toeplitz_disk(
    m1: &RadialSeries,
    f: &RadialSeries,
    space: &SpaceSpec,
    trunc_degree: usize,
) -> Result<DiskSolution> {
    let p = m1.order().ok_or(Error::ZeroSymbol)?;
    let n = trunc_degree;
    let ln_w = space.ln_radial_norms(n);
    let sup = support(m1);
    let lead = m1.coeff(p);
    // h(i) = ĝ(i) w(i)
    let mut h = vec![LogReal::ZERO; n + 1];
    let mut buf = Vec::with_capacity(sup.len());
    if n >= p {
        for j in (0..=n - p).rev() {
            buf.clear();
            buf.push(f.coeff(j).scale_log(ln_w[j]));
            for &(s, b) in sup.iter().skip(1) {
                if j + s > n {
                    break;
                }
                let t = h[j + s] * b;
                if !t.is_zero() {
                    buf.push(-t);
                }
            }
            h[j + p] = LogReal::sum_slice(&mut buf) / lead;
        }
    }
    let g = RadialSeries::from_fn(n, |i| h[i].scale_log(-ln_w[i]));
    let tg = apply_toeplitz(m1, &g, space);
    let deg = m1.degree().unwrap_or(0);
    let residual = if deg <= n {
        (0..=n - deg)
            .map(|j| (tg.coeff(j) - f.coeff(j)).to_f64().abs())
            .fold(0.0, f64::max)
    } else {
        0.0
    };
    let unmatched = (n.saturating_sub(p) + 1..=n)
        .map(|j| f.coeff(j).to_f64().abs())
        .fold(0.0, f64::max);
    Ok(DiskSolution {
        g,
        order: p,
        residual,
        unmatched,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk(n: u32) -> SpaceSpec {
        SpaceSpec::weighted_disk(n)
    }

    #[test]
    fn shift_symbol_on_ball() {
        let m1 = RadialSeries::from_f64s(&[0.0, 1.0]);
        let g = RadialSeries::monomial(2, 2);
        let out = apply_toeplitz(&m1, &g, &SpaceSpec::ball(2).unwrap());
        let v = out.to_f64s();
        assert_eq!(v[0], 0.0);
        assert!((v[1] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(v[2], 0.0);
    }

    #[test]
    fn identity_and_constant_symbols() {
        let f = RadialSeries::from_f64s(&[1.0, -2.0, 0.5, 3.0]);
        assert_eq!(apply_toeplitz(&RadialSeries::one(0), &f, &disk(2)), f);
        let s = solve_toeplitz_disk(&RadialSeries::one(0), &f, &disk(2), 3).unwrap();
        assert_eq!(s.g, f);
        assert_eq!(s.residual, 0.0);
        let s = solve_toeplitz_disk(&RadialSeries::from_f64s(&[4.0]), &f, &disk(1), 3).unwrap();
        for (a, b) in s.g.to_f64s().iter().zip(f.to_f64s()) {
            assert!((a - b / 4.0).abs() < 1e-15);
        }
    }

    #[test]
    fn high_shift_kills_low_degree() {
        let m1 = RadialSeries::monomial(3, 3);
        let g = RadialSeries::from_f64s(&[1.0, 1.0, 1.0]);
        assert!(apply_toeplitz(&m1, &g, &disk(0)).is_zero());
    }

    #[test]
    fn zero_symbol_is_an_error() {
        let f = RadialSeries::one(4);
        assert!(matches!(
            solve_toeplitz_disk(&RadialSeries::zeros(2), &f, &disk(0), 4),
            Err(Error::ZeroSymbol)
        ));
    }

    #[test]
    fn vanishing_order_shift() {
        // T_{z̄} g = f gives ĝ(k+1) w(k+1) = f̂(k) w(k)
        let m1 = RadialSeries::from_f64s(&[0.0, 1.0]);
        let f = RadialSeries::from_f64s(&[1.0, 2.0, 3.0, 4.0]);
        let s = solve_toeplitz_disk(&m1, &f, &disk(0), 3).unwrap();
        assert_eq!(s.order, 1);
        let g = s.g.to_f64s();
        assert_eq!(g[0], 0.0);
        for k in 0..3 {
            let expected = f.to_f64s()[k] * (k + 2) as f64 / (k + 1) as f64;
            assert!((g[k + 1] - expected).abs() < 1e-14);
        }
        assert_eq!(s.unmatched, 4.0);
        assert!(s.residual < 1e-14);
    }
}
