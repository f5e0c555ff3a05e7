//! Log-gamma and the factorial-type quantities built on it.

use std::f64::consts::PI;
use std::sync::OnceLock;

// Lanczos, g = 7, 9 terms.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Largest `n` whose factorial is taken from the table instead of the
/// Lanczos series.
pub const EXACT_FACTORIAL_MAX: u64 = 170;

fn ln_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut fact = 1.0f64;
        let mut out = Vec::with_capacity(EXACT_FACTORIAL_MAX as usize + 1);
        out.push(0.0);
        for n in 1..=EXACT_FACTORIAL_MAX {
            fact *= n as f64;
            out.push(fact.ln());
        }
        out
    })
}

/// `ln Γ(x)` for `x > 0`.
///
/// Integer arguments up to 171 go through a factorial table so small
/// cases are bit-stable; everything else uses the Lanczos series.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "ln_gamma requires x > 0, got {x}");
    if x.fract() == 0.0 && x >= 1.0 && x <= (EXACT_FACTORIAL_MAX + 1) as f64 {
        return ln_factorial_table()[x as usize - 1];
    }
    if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x keeps us on the accurate side of the series
        return ln_gamma(x + 1.0) - x.ln();
    }
    let z = x - 1.0;
    let mut a = LANCZOS[0];
    for (k, &p) in LANCZOS.iter().enumerate().skip(1) {
        a += p / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + a.ln()
}

/// `ln n!`.
pub fn ln_factorial(n: u64) -> f64 {
    if n <= EXACT_FACTORIAL_MAX {
        ln_factorial_table()[n as usize]
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

/// `ln C(n, k)` for `k <= n`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// `ln (x+1)(x+2)...(x+m)` for a non-negative integer `x`.
pub fn ln_rising_from(x: u64, m: u64) -> f64 {
    ln_factorial(x + m) - ln_factorial(x)
}
