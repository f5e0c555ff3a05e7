//! Graded Hilbert spaces of holomorphic functions in which monomials are
//! orthogonal: the Hardy space of the ball `H²(B_d)` and the weighted
//! Bergman spaces `𝓗_n` of the disk.
//!
//! Norms are always returned squared.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::numerics::{ln_factorial, LogReal, RadialSeries};
use crate::{Error, Result};

/// Exponent `(α_1, …, α_d)` of the monomial `z_1^{α_1} ⋯ z_d^{α_d}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("multi-index needs at least one entry"));
        }
        Ok(MultiIndex(entries))
    }

    /// `k e_1` in `d` variables.
    pub fn axis(d: usize, k: u32) -> Self {
        assert!(d >= 1);
        let mut v = vec![0; d];
        v[0] = k;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|α|`.
    pub fn total(&self) -> u64 {
        self.0.iter().map(|&a| u64::from(a)).sum()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// `ln α!`.
    pub fn ln_factorial(&self) -> f64 {
        self.0.iter().map(|&a| ln_factorial(u64::from(a))).sum()
    }
}

/// Which graded space a coefficient sequence lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceSpec {
    /// `H²(B_d)`, `‖ζ^α‖² = (d-1)! α! / (d-1+|α|)!`.
    Ball { d: u32 },
    /// `𝓗_n = P²((1-|z|²)^n dA/π)`, `‖z^k‖² = 1/((k+1)⋯(k+n+1))`.
    WeightedDisk { n: u32 },
}

impl SpaceSpec {
    pub fn ball(d: u32) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("ball dimension must be at least 1"));
        }
        Ok(SpaceSpec::Ball { d })
    }

    pub fn weighted_disk(n: u32) -> Self {
        SpaceSpec::WeightedDisk { n }
    }

    /// Number of variables of the monomials this space grades.
    pub fn dim(&self) -> usize {
        match *self {
            SpaceSpec::Ball { d } => d as usize,
            SpaceSpec::WeightedDisk { .. } => 1,
        }
    }

    /// `‖ζ^α‖²` for a full multi-index.
    pub fn monomial_norm_sq(&self, alpha: &MultiIndex) -> Result<LogReal> {
        if alpha.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: alpha.dim(),
            });
        }
        Ok(match *self {
            SpaceSpec::Ball { d } => {
                let d = u64::from(d);
                LogReal::from_log(
                    ln_factorial(d - 1) + alpha.ln_factorial() - ln_factorial(d - 1 + alpha.total()),
                )
            }
            SpaceSpec::WeightedDisk { .. } => self.radial_norm_sq(alpha.total()),
        })
    }

    /// `‖z_1^k‖²`: the norm of the `k`-th power of the first coordinate.
    pub fn radial_norm_sq(&self, k: u64) -> LogReal {
        LogReal::from_log(self.ln_radial_norm_sq(k))
    }

    pub fn ln_radial_norm_sq(&self, k: u64) -> f64 {
        match *self {
            SpaceSpec::Ball { d } => {
                let d = u64::from(d);
                ln_factorial(d - 1) + ln_factorial(k) - ln_factorial(d - 1 + k)
            }
            SpaceSpec::WeightedDisk { n } => ln_factorial(k) - ln_factorial(k + u64::from(n) + 1),
        }
    }

    /// `‖z^k‖²` for `k = 0..=N`, as logs.
    pub fn ln_radial_norms(&self, trunc_degree: usize) -> Vec<f64> {
        (0..=trunc_degree as u64).map(|k| self.ln_radial_norm_sq(k)).collect()
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::Ball { d } => write!(f, "ball:{d}"),
            SpaceSpec::WeightedDisk { n } => write!(f, "disk:{n}"),
        }
    }
}

impl FromStr for SpaceSpec {
    type Err = Error;

    /// `ball:<d>` or `disk:<n>`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, param) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("space {s:?}: expected ball:<d> or disk:<n>")))?;
        let param: u32 = param
            .parse()
            .map_err(|_| Error::Parse(format!("space {s:?}: bad parameter")))?;
        match kind {
            "ball" => SpaceSpec::ball(param),
            "disk" => Ok(SpaceSpec::weighted_disk(param)),
            _ => Err(Error::Parse(format!("space {s:?}: unknown kind {kind:?}"))),
        }
    }
}

/// Free-function form of [`SpaceSpec::monomial_norm_sq`].
pub fn monomial_norm_sq(space: &SpaceSpec, alpha: &MultiIndex) -> Result<LogReal> {
    space.monomial_norm_sq(alpha)
}

/// Coefficient of `z_1^{i-j}` in `P_{H²(B_d)}(|z_2^{α_2}|² ⋯ |z_d^{α_d}|² z̄_1^j z_1^i)`.
///
/// Zero when `i < j`. `alphas` holds `(α_2, …, α_d)` and must have length
/// `d - 1`.
pub fn szego_project_mixed(d: u32, i: u64, j: u64, alphas: &[u32]) -> Result<LogReal> {
    if d == 0 || alphas.len() + 1 != d as usize {
        return Err(Error::DimensionMismatch {
            expected: (d as usize).saturating_sub(1),
            got: alphas.len(),
        });
    }
    if i < j {
        return Ok(LogReal::ZERO);
    }
    let d = u64::from(d);
    let tail: u64 = alphas.iter().map(|&a| u64::from(a)).sum();
    let ln_tail_fact: f64 = alphas.iter().map(|&a| ln_factorial(u64::from(a))).sum();
    Ok(LogReal::from_log(
        ln_factorial(d - 1 + i - j) + ln_factorial(i) + ln_tail_fact
            - ln_factorial(i - j)
            - ln_factorial(d - 1 + i + tail),
    ))
}

/// `Γ(p) = ⟨p, f⟩ = Σ_k p̂(k) conj(f̂(k)) ‖z_1^k‖²`, summed over the common
/// truncation of the two series. Coefficients are real, so conjugation is
/// the identity.
pub fn gamma_functional(p: &RadialSeries, f: &RadialSeries, space: &SpaceSpec) -> LogReal {
    let n = p.trunc_degree().min(f.trunc_degree());
    LogReal::sum((0..=n).map(|k| p.coeff(k) * f.coeff(k) * space.radial_norm_sq(k as u64)))
}

/// `f(z_1) = Σ_k e^{-k^γ} C(k+d-1, k) z_1^k`, the one-variable function
/// whose pairing against `z_1^k` in `H²(B_d)` is exactly `e^{-k^γ}`.
pub fn decay_target(d: u32, exponent: f64, trunc_degree: usize) -> RadialSeries {
    let d = u64::from(d);
    RadialSeries::from_fn(trunc_degree, |k| {
        let k64 = k as u64;
        let ln_binom = ln_factorial(k64 + d - 1) - ln_factorial(d - 1) - ln_factorial(k64);
        LogReal::from_log(-(k as f64).powf(exponent) + ln_binom)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn val(x: LogReal) -> f64 {
        x.to_f64()
    }

    #[test]
    fn ball_norm_examples() {
        let b2 = SpaceSpec::ball(2).unwrap();
        let b3 = SpaceSpec::ball(3).unwrap();
        let n = b2.monomial_norm_sq(&MultiIndex::new(vec![1, 0]).unwrap()).unwrap();
        assert!((val(n) - 0.5).abs() < 1e-15);
        let n = b3.monomial_norm_sq(&MultiIndex::new(vec![0, 0, 0]).unwrap()).unwrap();
        assert_eq!(val(n), 1.0);
        // 2! * 2! * 1! / 5! = 4 / 120
        let n = b3.monomial_norm_sq(&MultiIndex::new(vec![2, 1, 0]).unwrap()).unwrap();
        assert!((val(n) - 1.0 / 30.0).abs() < 1e-15);
    }

    #[test]
    fn weighted_disk_norm_example() {
        let s = SpaceSpec::weighted_disk(1);
        assert!((val(s.radial_norm_sq(2)) - 1.0 / 12.0).abs() < 1e-16);
        assert!((val(SpaceSpec::weighted_disk(0).radial_norm_sq(4)) - 0.2).abs() < 1e-16);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let b2 = SpaceSpec::ball(2).unwrap();
        assert!(matches!(
            b2.monomial_norm_sq(&MultiIndex::new(vec![1, 0, 0]).unwrap()),
            Err(Error::DimensionMismatch { expected: 2, got: 3 })
        ));
        assert!(SpaceSpec::weighted_disk(2)
            .monomial_norm_sq(&MultiIndex::new(vec![1, 1]).unwrap())
            .is_err());
        assert!(MultiIndex::new(vec![]).is_err());
        assert!(SpaceSpec::ball(0).is_err());
    }

    #[test]
    fn norms_strictly_decrease() {
        for space in [SpaceSpec::ball(1).unwrap(), SpaceSpec::ball(3).unwrap(), SpaceSpec::weighted_disk(4)] {
            let norms = space.ln_radial_norms(200);
            let strict = norms.windows(2).all(|w| w[1] < w[0]);
            // H²(B_1) has all norms equal to one
            if matches!(space, SpaceSpec::Ball { d: 1 }) {
                assert!(norms.iter().all(|&x| x == 0.0));
            } else {
                assert!(strict, "{space}");
            }
        }
        let b2 = SpaceSpec::ball(2).unwrap();
        let a = b2.monomial_norm_sq(&MultiIndex::new(vec![1, 1]).unwrap()).unwrap();
        let b = b2.monomial_norm_sq(&MultiIndex::new(vec![2, 1]).unwrap()).unwrap();
        assert!(b.logmag() < a.logmag());
    }

    #[test]
    fn projection_examples() {
        let p = szego_project_mixed(2, 2, 1, &[0]).unwrap();
        assert!((val(p) - 2.0 / 3.0).abs() < 1e-15);
        assert!(szego_project_mixed(3, 1, 4, &[2, 0]).unwrap().is_zero());
        assert_eq!(val(szego_project_mixed(4, 0, 0, &[0, 0, 0]).unwrap()), 1.0);
        // i = j gives the constant term ⟨|z_1|^{2i}, 1⟩ = ‖z_1^i‖²
        let p = szego_project_mixed(3, 5, 5, &[0, 0]).unwrap();
        let n = SpaceSpec::ball(3).unwrap().radial_norm_sq(5);
        assert!(p.rel_diff(n) < 1e-14);
        assert!(szego_project_mixed(3, 2, 1, &[0]).is_err());
    }

    #[test]
    fn gamma_functional_trivial_pairing() {
        let one = RadialSeries::one(3);
        let g = gamma_functional(&one, &one, &SpaceSpec::ball(2).unwrap());
        assert_eq!(val(g), 1.0);
    }

    #[test]
    fn target_pairing_cancels_binomial() {
        for d in 1..=4u32 {
            let space = SpaceSpec::ball(d).unwrap();
            let f = decay_target(d, 4.0 / 7.0, 20);
            for k in 0..=20usize {
                let p = RadialSeries::monomial(k, 20);
                let g = gamma_functional(&p, &f, &space);
                let expected = -(k as f64).powf(4.0 / 7.0);
                assert!((g.logmag() - expected).abs() < 1e-13, "d={d} k={k}");
            }
        }
    }

    #[test]
    fn space_parsing() {
        assert_eq!("ball:3".parse::<SpaceSpec>().unwrap(), SpaceSpec::Ball { d: 3 });
        assert_eq!("disk:0".parse::<SpaceSpec>().unwrap(), SpaceSpec::WeightedDisk { n: 0 });
        assert!("torus:2".parse::<SpaceSpec>().is_err());
        assert!("ball".parse::<SpaceSpec>().is_err());
    }
}
