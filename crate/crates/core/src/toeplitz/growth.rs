//! Fitting `log|a_k| ≈ -c k^γ` to a coefficient sequence.

use serde::{Deserialize, Serialize};

use crate::numerics::{grid_then_golden, GoldenBudget, RadialSeries};
use crate::{Error, Result};

const MIN_NONZERO: usize = 16;
const GAMMA_MAX: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub c: f64,
    pub gamma: f64,
}

/// Fits over the upper half (by degree) of the nonzero coefficients.
pub fn growth_fit(a: &RadialSeries) -> Result<GrowthFit> {
    let nonzero: Vec<(f64, f64)> = a
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (k as f64, c.logmag()))
        .collect();
    if nonzero.len() < MIN_NONZERO {
        return Err(Error::TooFewCoefficients {
            needed: MIN_NONZERO,
            found: nonzero.len(),
        });
    }
    let top = &nonzero[nonzero.len() / 2..];
    growth_fit_points(top)
}

/// Least squares for `y ≈ -c k^γ` over `(k, y)` points with `k > 0`.
///
/// For fixed `γ` the best `c` is linear, so only `γ ∈ [0, 2]` is searched.
/// Identically zero data fits `(c, γ) = (0, 0)`.
pub fn growth_fit_points(points: &[(f64, f64)]) -> Result<GrowthFit> {
    let pts: Vec<(f64, f64)> = points.iter().copied().filter(|&(k, _)| k > 0.0).collect();
    if pts.len() < 3 {
        return Err(Error::TooFewCoefficients {
            needed: 3,
            found: pts.len(),
        });
    }
    if pts.iter().any(|&(_, y)| !y.is_finite()) {
        return Err(Error::invalid("growth fit needs finite log values"));
    }
    let yy: f64 = pts.iter().map(|&(_, y)| y * y).sum();
    if yy == 0.0 {
        return Ok(GrowthFit { c: 0.0, gamma: 0.0 });
    }
    let moments = |gamma: f64| {
        let mut xy = 0.0;
        let mut xx = 0.0;
        for &(k, y) in &pts {
            let x = k.powf(gamma);
            xy += x * y;
            xx += x * x;
        }
        (xy, xx)
    };
    let neg_sse = |gamma: f64| {
        let (xy, xx) = moments(gamma);
        xy * xy / xx - yy
    };
    let grid: Vec<f64> = (0..=200).map(|j| GAMMA_MAX * j as f64 / 200.0).collect();
    let (gamma, _) = grid_then_golden(neg_sse, &grid, GoldenBudget::default());
    let (xy, xx) = moments(gamma);
    Ok(GrowthFit { c: -xy / xx, gamma })
}
