//! Polynomial symbols `m(z) = Σ b_β z^β` on the ball and the reduction to
//! a one-variable symbol.

use std::collections::BTreeMap;
use std::io::Read;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::numerics::{LogReal, RadialSeries};
use crate::spaces::MultiIndex;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SymbolSeries {
    d: usize,
    terms: BTreeMap<MultiIndex, Complex64>,
    growth_class: Option<u32>,
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    alpha: Vec<u32>,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct SymbolRecord {
    d: usize,
    terms: Vec<TermRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    growth_class: Option<u32>,
}

impl SymbolSeries {
    /// Builds a symbol from `(β, b_β)` pairs. Zero coefficients are
    /// dropped; repeated exponents are an error.
    pub fn new(d: usize, terms: impl IntoIterator<Item = (Vec<u32>, Complex64)>) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("symbol dimension must be at least 1"));
        }
        let mut map = BTreeMap::new();
        for (alpha, b) in terms {
            if alpha.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: alpha.len(),
                });
            }
            if !b.re.is_finite() || !b.im.is_finite() {
                return Err(Error::invalid(format!("non-finite coefficient at {alpha:?}")));
            }
            let key = MultiIndex::new(alpha)?;
            if map.contains_key(&key) {
                return Err(Error::Parse(format!("repeated exponent {:?}", key.entries())));
            }
            if b != Complex64::new(0.0, 0.0) {
                map.insert(key, b);
            }
        }
        Ok(SymbolSeries {
            d,
            terms: map,
            growth_class: None,
        })
    }

    /// Real-coefficient shorthand for [`SymbolSeries::new`].
    pub fn real(d: usize, terms: impl IntoIterator<Item = (Vec<u32>, f64)>) -> Result<Self> {
        Self::new(d, terms.into_iter().map(|(a, b)| (a, Complex64::new(b, 0.0))))
    }

    pub fn with_growth_class(mut self, n: Option<u32>) -> Self {
        self.growth_class = n;
        self
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn growth_class(&self) -> Option<u32> {
        self.growth_class
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let rec: SymbolRecord = serde_json::from_str(s)?;
        let sym = Self::new(
            rec.d,
            rec.terms
                .into_iter()
                .map(|t| (t.alpha, Complex64::new(t.re, t.im))),
        )?;
        Ok(sym.with_growth_class(rec.growth_class))
    }

    pub fn from_json_reader<R: Read>(mut r: R) -> Result<Self> {
        let mut s = String::new();
        r.read_to_string(&mut s)?;
        Self::from_json_str(&s)
    }

    pub fn to_json_string(&self) -> String {
        let rec = SymbolRecord {
            d: self.d,
            terms: self
                .terms
                .iter()
                .map(|(a, b)| TermRecord {
                    alpha: a.entries().to_vec(),
                    re: b.re,
                    im: b.im,
                })
                .collect(),
            growth_class: self.growth_class,
        };
        serde_json::to_string(&rec).expect("symbol records always serialize")
    }
}

/// The shift exponents `t = (t_2, …, t_d)`, their sum `n`, and the reduced
/// symbol `m_1(z) = Σ_{i} b_{i, t_2, …, t_d} z^i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ToeplitzBallPlan {
    pub d: usize,
    pub t: Vec<u32>,
    pub n: u64,
    pub m1: RadialSeries,
}

impl ToeplitzBallPlan {
    /// `ln(t_2! ⋯ t_d!)`.
    pub fn ln_t_factorial(&self) -> f64 {
        self.t
            .iter()
            .map(|&t| crate::numerics::ln_factorial(u64::from(t)))
            .sum()
    }
}

/// Picks `t_d` as the least `d`-th exponent over all terms, then for
/// `k = d-1, …, 2` the least `k`-th exponent among terms whose later
/// exponents equal `t_{k+1}, …, t_d`.
pub fn plan_for_symbol(m: &SymbolSeries) -> Result<ToeplitzBallPlan> {
    if m.is_zero() {
        return Err(Error::ZeroSymbol);
    }
    let d = m.d;
    // t[k] for k in 1..d (0-based variable index), filled from the back
    let mut t = vec![0u32; d];
    for k in (1..d).rev() {
        t[k] = m
            .terms
            .keys()
            .filter(|a| a.entries()[k + 1..] == t[k + 1..])
            .map(|a| a.entries()[k])
            .min()
            .expect("the terms matching t_{k+1..d} always include the one that fixed t_{k+1}");
    }
    let on_plan: Vec<(u32, Complex64)> = m
        .terms
        .iter()
        .filter(|(a, _)| a.entries()[1..] == t[1..])
        .map(|(a, b)| (a.entries()[0], *b))
        .collect();
    let deg = on_plan.iter().map(|&(i, _)| i as usize).max().unwrap_or(0);
    let mut m1 = RadialSeries::zeros(deg);
    for (i, b) in on_plan {
        if b.im != 0.0 {
            return Err(Error::ComplexReduction {
                degree: i as usize,
                re: b.re,
                im: b.im,
            });
        }
        m1.set(i as usize, LogReal::from_f64(b.re));
    }
    let t: Vec<u32> = t[1..].to_vec();
    let n = t.iter().map(|&x| u64::from(x)).sum();
    Ok(ToeplitzBallPlan { d, t, n, m1 })
}
