//! Log-domain scalars, truncated power series and the special functions
//! everything else is built on.

mod gamma;
mod logreal;
mod optimize;
mod series;

pub use gamma::{ln_binomial, ln_factorial, ln_gamma, ln_rising_from, EXACT_FACTORIAL_MAX};
pub use logreal::{LogReal, CANCELLATION_EPS};
pub use optimize::{golden_max, grid_then_golden, GoldenBudget};
pub use series::{fmt_sig17, RadialSeries};

/// Stable `log(1 + e^x)`.
#[inline]
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `log Σ e^{x_i}` over a slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m.is_infinite() {
        return m;
    }
    m + xs.iter().map(|&x| (x - m).exp()).sum::<f64>().ln()
}
