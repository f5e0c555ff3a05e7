//! A finite-level certificate for the weight `g` built from the kernels
//! `c_n F_{c_n, r_n e_1}`: at every level the coefficient inequality
//! (jz), the sup bound on `V_n` (su), and the Drewnowski bound hold, and
//! the resulting `g` has a finite Szegő integral.

mod certificate;
mod verify;
mod weight;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use certificate::{Certificate, Level, Truncation};
pub use verify::{contrast_values, verify_certificate, Failure, LevelReport, VerificationReport};
pub use weight::{g_log_modulus, gamma_sum, gamma_terms, p2_norms, szego_estimate, GammaSum};

use crate::kernel::{drewnowski_integral, kernel_coeff, nawrocki_search, sup_on_vn, KernelParams, SearchBudget};
use crate::quadrature::QuadratureSpec;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CertificateConfig {
    pub d: u32,
    pub levels: u32,
    pub gamma_exp: f64,
    /// `c_n = c_base · c_ratio^{n-1}` before any shrinking.
    pub c_base: f64,
    pub c_ratio: f64,
    /// How many times a level may halve `c_n` when (su) or the Drewnowski
    /// bound fails.
    pub max_shrinks: u32,
    pub max_index: u64,
    pub gamma_factor: f64,
    pub search: SearchBudget,
    pub quadrature: QuadratureSpec,
    pub timestamp: bool,
}

impl Default for CertificateConfig {
    fn default() -> Self {
        CertificateConfig {
            d: 2,
            levels: 3,
            gamma_exp: 4.0 / 7.0,
            c_base: 0.125,
            c_ratio: 0.5,
            max_shrinks: 4,
            max_index: 200_000,
            gamma_factor: 2.0,
            search: SearchBudget::default(),
            quadrature: QuadratureSpec {
                tolerance: 1e-6,
                ..QuadratureSpec::default()
            },
            timestamp: false,
        }
    }
}

/// `(1/2, d/(d+1))`: the exponents for which the construction works.
pub fn check_gamma_exp(d: u32, gamma_exp: f64) -> Result<()> {
    let upper = f64::from(d) / f64::from(d + 1);
    if !(gamma_exp > 0.5 && gamma_exp < upper) {
        return Err(Error::invalid(format!(
            "gamma_exp must lie in (1/2, {upper}) for d = {d}, got {gamma_exp}"
        )));
    }
    Ok(())
}

impl CertificateConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::invalid(format!("certificate needs d >= 2, got {}", self.d)));
        }
        if self.levels == 0 {
            return Err(Error::invalid("certificate needs at least one level"));
        }
        check_gamma_exp(self.d, self.gamma_exp)?;
        if !(self.c_base > 0.0) || !(self.c_ratio > 0.0 && self.c_ratio <= 1.0) {
            return Err(Error::invalid("need c_base > 0 and 0 < c_ratio <= 1"));
        }
        if !(self.gamma_factor >= 1.0) {
            return Err(Error::invalid("gamma_factor must be at least 1"));
        }
        self.quadrature.validate()
    }

    fn search_budget(&self) -> SearchBudget {
        SearchBudget {
            max_index: self.max_index,
            ..self.search
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Probe {
    i: u64,
    r: f64,
    jz_margin: f64,
    su_log: f64,
}

impl Probe {
    fn passes(&self, n: u32) -> bool {
        self.jz_margin > 0.0 && self.su_log <= su_limit(n)
    }
}

/// `ln 2^{-n}`.
pub fn su_limit(n: u32) -> f64 {
    -f64::from(n) * std::f64::consts::LN_2
}

/// `ln F̂(i) - ln(n/c) - i^γ` at the given radius.
pub fn jz_margin(d: u32, c: f64, r: f64, i: u64, n: u32, gamma_exp: f64) -> f64 {
    let p = KernelParams { d, c, r };
    kernel_coeff(&p, i).logmag() + c.ln() - f64::from(n).ln() - (i as f64).powf(gamma_exp)
}

fn probe(cfg: &CertificateConfig, c: f64, i: u64, n: u32) -> Result<Probe> {
    let found = nawrocki_search(cfg.d, c, i, &cfg.search_budget())?;
    let r = found.r_star;
    let p = KernelParams::new(cfg.d, c, r)?;
    Ok(Probe {
        i,
        r,
        jz_margin: jz_margin(cfg.d, c, r, i, n, cfg.gamma_exp),
        su_log: sup_on_vn(&p, n)?.logmag(),
    })
}

enum Search {
    Found(Probe),
    /// (jz) held somewhere but (su) never did alongside it.
    SupTooLarge,
}

/// Smallest `i` (doubling grid, then bisection) where both (jz) and (su)
/// hold with `r` at the coefficient maximizer.
fn search_index(cfg: &CertificateConfig, c: f64, n: u32) -> Result<Search> {
    let mut grid: Vec<u64> = std::iter::successors(Some(1u64), |&i| i.checked_mul(2))
        .take_while(|&i| i <= cfg.max_index)
        .collect();
    if grid.last() != Some(&cfg.max_index) {
        grid.push(cfg.max_index);
    }
    let probes: Vec<Probe> = grid
        .par_iter()
        .map(|&i| probe(cfg, c, i, n))
        .collect::<Result<_>>()?;
    let Some(j) = probes.iter().position(|p| p.passes(n)) else {
        let best = probes
            .iter()
            .max_by(|a, b| a.jz_margin.total_cmp(&b.jz_margin))
            .expect("grid is never empty");
        if best.jz_margin > 0.0 {
            return Ok(Search::SupTooLarge);
        }
        return Err(Error::BudgetExceeded {
            level: n,
            detail: format!(
                "no i <= {} satisfies (jz) at c = {c}; best log margin {:.6} at i = {}",
                cfg.max_index, best.jz_margin, best.i
            ),
        });
    };
    let mut hi = probes[j];
    let mut lo = if j == 0 { 0 } else { probes[j - 1].i };
    while hi.i - lo > 1 {
        let mid = lo + (hi.i - lo) / 2;
        let p = probe(cfg, c, mid, n)?;
        if p.passes(n) {
            hi = p;
        } else {
            lo = mid;
        }
    }
    Ok(Search::Found(hi))
}

fn build_level(
    cfg: &CertificateConfig,
    n: u32,
    progress: &mut dyn FnMut(String),
) -> Result<Level> {
    let mut c = cfg.c_base * cfg.c_ratio.powi(n as i32 - 1);
    let limit = su_limit(n).exp();
    let mut last_reason = String::new();
    for shrink in 0..=cfg.max_shrinks {
        if shrink > 0 {
            c *= 0.5;
            progress(format!("level {n}: {last_reason}; retrying with c = {c}"));
        }
        let found = match search_index(cfg, c, n)? {
            Search::Found(p) => p,
            Search::SupTooLarge => {
                last_reason = format!("(su) fails for every i <= {}", cfg.max_index);
                continue;
            }
        };
        let p = KernelParams::new(cfg.d, c, found.r)?;
        let drew = drewnowski_integral(&p, &cfg.quadrature)?;
        if drew.value + drew.est_error > limit {
            last_reason = format!("Drewnowski integral {} exceeds {limit}", drew.value);
            continue;
        }
        let gamma_term = (f64::from(n).ln() + found.jz_margin).exp();
        progress(format!(
            "level {n}: c = {c}, i = {}, r = {:.6}, jz margin = {:.3e}",
            found.i, found.r, found.jz_margin
        ));
        return Ok(Level {
            n,
            c_n: c,
            r_n: found.r,
            i_n: found.i,
            jz_margin: found.jz_margin,
            su_log: found.su_log,
            drew: drew.value,
            gamma_term,
        });
    }
    Err(Error::BudgetExceeded {
        level: n,
        detail: format!("gave up after {} shrinks of c: {last_reason}", cfg.max_shrinks),
    })
}

pub fn build_certificate(cfg: &CertificateConfig) -> Result<Certificate> {
    build_certificate_with_progress(cfg, &mut |_| {})
}

/// Builds levels `1..=levels` in order, then the Szegő integral and the
/// weighted norms of the assembled `g`.
pub fn build_certificate_with_progress(
    cfg: &CertificateConfig,
    progress: &mut dyn FnMut(String),
) -> Result<Certificate> {
    cfg.validate()?;
    let mut levels = Vec::with_capacity(cfg.levels as usize);
    for n in 1..=cfg.levels {
        levels.push(build_level(cfg, n, progress)?);
    }
    let mut cert = Certificate {
        d: cfg.d,
        gamma_exp: cfg.gamma_exp,
        levels,
        szego_estimate: 0.0,
        p2_norms: Vec::new(),
        quadrature: cfg.quadrature,
        truncation: Truncation {
            max_index: cfg.max_index,
            gamma_factor: cfg.gamma_factor,
        },
        timestamp: None,
    };
    cert.szego_estimate = szego_estimate(&cert, &cfg.quadrature)?.value;
    cert.p2_norms = p2_norms(&cert, &cfg.quadrature)?
        .into_iter()
        .map(|e| e.value)
        .collect();
    if cfg.timestamp {
        cert.timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs());
    }
    Ok(cert)
}
