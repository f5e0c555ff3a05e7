//! Truncated one-variable power series with [`LogReal`] coefficients.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use super::LogReal;
use crate::{Error, Result};

/// `f(z) = Σ_{k=0}^{N} a_k z^k`. Always holds `N + 1` coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialSeries {
    coeffs: Vec<LogReal>,
}

impl RadialSeries {
    pub fn zeros(trunc_degree: usize) -> Self {
        RadialSeries {
            coeffs: vec![LogReal::ZERO; trunc_degree + 1],
        }
    }

    pub fn one(trunc_degree: usize) -> Self {
        Self::monomial(0, trunc_degree)
    }

    pub fn monomial(k: usize, trunc_degree: usize) -> Self {
        let mut s = Self::zeros(trunc_degree);
        if k <= trunc_degree {
            s.coeffs[k] = LogReal::ONE;
        }
        s
    }

    /// Takes ownership of a coefficient vector; an empty vector becomes the
    /// zero series of degree 0.
    pub fn from_coeffs(mut coeffs: Vec<LogReal>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(LogReal::ZERO);
        }
        RadialSeries { coeffs }
    }

    pub fn from_f64s(values: &[f64]) -> Self {
        Self::from_coeffs(values.iter().map(|&x| LogReal::from_f64(x)).collect())
    }

    /// Series with `a_k = f(k)` for `k = 0..=N`.
    pub fn from_fn(trunc_degree: usize, f: impl FnMut(usize) -> LogReal) -> Self {
        RadialSeries {
            coeffs: (0..=trunc_degree).map(f).collect(),
        }
    }

    #[inline]
    pub fn trunc_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient `a_k`; zero past the truncation degree.
    #[inline]
    pub fn coeff(&self, k: usize) -> LogReal {
        self.coeffs.get(k).copied().unwrap_or(LogReal::ZERO)
    }

    pub fn set(&mut self, k: usize, v: LogReal) {
        self.coeffs[k] = v;
    }

    pub fn coeffs(&self) -> &[LogReal] {
        &self.coeffs
    }

    pub fn to_f64s(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64()).collect()
    }

    /// Re-truncates (or zero-pads) to degree `n`.
    pub fn truncated(&self, n: usize) -> Self {
        Self::from_fn(n, |k| self.coeff(k))
    }

    /// Lowest degree with a nonzero coefficient.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Highest degree with a nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.order().is_none()
    }

    pub fn nonzero_count(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    pub fn neg(&self) -> Self {
        Self::from_fn(self.trunc_degree(), |k| -self.coeff(k))
    }

    pub fn scale(&self, s: LogReal) -> Self {
        Self::from_fn(self.trunc_degree(), |k| self.coeff(k) * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.trunc_degree().max(other.trunc_degree());
        Self::from_fn(n, |k| self.coeff(k) + other.coeff(k))
    }

    /// Cauchy product truncated at degree `n`.
    pub fn mul(&self, other: &Self, n: usize) -> Self {
        let mut buf = Vec::with_capacity(n + 1);
        Self::from_fn(n, |k| {
            buf.clear();
            let lo = k.saturating_sub(other.trunc_degree());
            let hi = k.min(self.trunc_degree());
            for j in lo..=hi {
                let t = self.coeff(j) * other.coeff(k - j);
                if !t.is_zero() {
                    buf.push(t);
                }
            }
            LogReal::sum_slice(&mut buf)
        })
    }

    /// `exp(a)` truncated at degree `n`, from `k g_k = Σ_{j=1..k} j a_j g_{k-j}`.
    ///
    /// The constant term only shifts the result: `g_0 = e^{a_0}` is stored
    /// as a log magnitude, so `a_0` may be far outside the `f64` exponent
    /// range of `e^{a_0}`.
    pub fn exp(&self, n: usize) -> Self {
        let a0 = self.coeff(0).to_f64();
        // j * a_j with ln j folded in
        let weighted: Vec<LogReal> = (0..=n)
            .map(|j| {
                if j == 0 {
                    LogReal::ZERO
                } else {
                    self.coeff(j).scale_log((j as f64).ln())
                }
            })
            .collect();
        let support: Vec<usize> = (1..=n).filter(|&j| !weighted[j].is_zero()).collect();
        let mut g = vec![LogReal::ZERO; n + 1];
        g[0] = LogReal::from_log(a0);
        let mut buf = Vec::with_capacity(support.len());
        for k in 1..=n {
            buf.clear();
            for &j in support.iter().take_while(|&&j| j <= k) {
                let t = weighted[j] * g[k - j];
                if !t.is_zero() {
                    buf.push(t);
                }
            }
            g[k] = LogReal::sum_slice(&mut buf).scale_log(-(k as f64).ln());
        }
        RadialSeries { coeffs: g }
    }

    /// Evaluates `Σ a_k λ^k` at a complex point, term by term in the log
    /// domain so huge coefficients against tiny powers stay finite.
    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        let (rho, theta) = lambda.to_polar();
        let ln_rho = rho.ln();
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let lm = if k == 0 { c.logmag() } else { c.logmag() + k as f64 * ln_rho };
            if lm == f64::NEG_INFINITY {
                continue;
            }
            let mag = f64::from(c.sign()) * lm.exp();
            acc += Complex64::from_polar(mag, k as f64 * theta);
        }
        acc
    }

    /// Writes the `k,sign,logmag` CSV form, log magnitudes to 17
    /// significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "k,sign,logmag")?;
        for (k, c) in self.coeffs.iter().enumerate() {
            writeln!(w, "{k},{},{}", c.sign(), fmt_sig17(c.logmag()))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = Vec::new();
        self.write_csv(&mut out).expect("writing to a Vec cannot fail");
        String::from_utf8(out).expect("csv is ascii")
    }

    /// Reads the CSV form. Rows may come in any order; missing degrees are
    /// zero.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty series file".into()))??;
        if header.trim() != "k,sign,logmag" {
            return Err(Error::Parse(format!("bad series header {header:?}")));
        }
        let mut rows: Vec<(usize, LogReal)> = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = || Error::Parse(format!("line {}: {line:?}", lineno + 2));
            let mut parts = line.split(',');
            let k: usize = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
            let sign: i8 = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
            let logmag = parse_f64(parts.next().ok_or_else(bad)?.trim()).ok_or_else(bad)?;
            if parts.next().is_some() || !(-1..=1).contains(&sign) {
                return Err(bad());
            }
            rows.push((k, LogReal::new(sign, logmag)));
        }
        let n = rows.iter().map(|&(k, _)| k).max().unwrap_or(0);
        let mut s = Self::zeros(n);
        for (k, v) in rows {
            s.coeffs[k] = v;
        }
        Ok(s)
    }
}

/// `{:.16e}` gives 17 significant digits; infinities are spelled out.
pub fn fmt_sig17(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else if x == f64::INFINITY {
        "inf".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn parse_f64(s: &str) -> Option<f64> {
    match s {
        "-inf" | "-Infinity" => Some(f64::NEG_INFINITY),
        "inf" | "Infinity" => Some(f64::INFINITY),
        _ => s.parse().ok(),
    }
}
