//! Independent re-check of a certificate: every inequality is recomputed
//! from `(d, γ, c_n, r_n, i_n)` and compared in log scale.

use serde::{Deserialize, Serialize};

use super::certificate::Certificate;
use super::weight::{gamma_sum, gamma_terms, p2_norms, szego_estimate, GammaSum};
use super::{check_gamma_exp, jz_margin, su_limit};
use crate::kernel::{drewnowski_integral, sup_on_vn, KernelParams};
use crate::quadrature::Estimate;
use crate::{Error, Result};

/// Stored values may drift from recomputation by this relative amount
/// before a warning is raised.
const DRIFT: f64 = 1e-9;

/// Slack allowed when `Γ`'s partial sum is compared with one of its own
/// terms.
const GAMMA_SLACK: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    /// One of `schema`, `jz`, `su`, `drew`, `gamma`, `szego`, `p2`.
    pub check: String,
    pub level: Option<u32>,
    /// `ln` of the side that must be smaller.
    pub ln_lhs: f64,
    pub ln_rhs: f64,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub n: u32,
    pub jz_margin: f64,
    pub su_log: f64,
    pub su_limit: f64,
    pub drew: Estimate,
    pub gamma: GammaSum,
    pub ln_gamma_term: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub failures: Vec<Failure>,
    pub warnings: Vec<String>,
    pub levels: Vec<LevelReport>,
    pub szego: Option<Estimate>,
    pub p2_norms: Vec<Estimate>,
}

impl VerificationReport {
    pub fn into_result(self) -> Result<Self> {
        if self.passed {
            return Ok(self);
        }
        let summary: Vec<String> = self
            .failures
            .iter()
            .map(|f| match f.level {
                Some(n) => format!("{} at level {n}: {}", f.check, f.message),
                None => format!("{}: {}", f.check, f.message),
            })
            .collect();
        Err(Error::Verification(summary.join("; ")))
    }
}

struct Checker {
    failures: Vec<Failure>,
    warnings: Vec<String>,
}

impl Checker {
    /// Records a failure unless `ln_lhs <= ln_rhs`.
    fn le(&mut self, check: &str, level: Option<u32>, ln_lhs: f64, ln_rhs: f64, what: &str) {
        if ln_lhs <= ln_rhs {
            return;
        }
        self.failures.push(Failure {
            check: check.to_string(),
            level,
            ln_lhs,
            ln_rhs,
            message: format!("{what}: ln lhs = {ln_lhs:.9e} > ln rhs = {ln_rhs:.9e}"),
        });
    }

    fn schema(&mut self, message: String) {
        self.failures.push(Failure {
            check: "schema".to_string(),
            level: None,
            ln_lhs: f64::NAN,
            ln_rhs: f64::NAN,
            message,
        });
    }

    fn drift(&mut self, what: &str, stored: f64, recomputed: f64) {
        let scale = stored.abs().max(recomputed.abs()).max(f64::MIN_POSITIVE);
        if (stored - recomputed).abs() > DRIFT * scale {
            self.warnings
                .push(format!("{what}: stored {stored:e}, recomputed {recomputed:e}"));
        }
    }
}

fn check_shape(cert: &Certificate, ck: &mut Checker) -> bool {
    let before = ck.failures.len();
    if cert.d < 2 {
        ck.schema(format!("d must be at least 2, got {}", cert.d));
    }
    if let Err(e) = check_gamma_exp(cert.d.max(2), cert.gamma_exp) {
        ck.schema(e.to_string());
    }
    if cert.levels.is_empty() {
        ck.schema("certificate has no levels".to_string());
    }
    for (k, l) in cert.levels.iter().enumerate() {
        if l.n as usize != k + 1 {
            ck.schema(format!("level {} is listed at position {}", l.n, k + 1));
        }
        if KernelParams::new(cert.d.max(2), l.c_n, l.r_n).is_err() {
            ck.schema(format!("level {}: need c_n > 0 and 0 <= r_n < 1", l.n));
        }
        if l.i_n == 0 {
            ck.schema(format!("level {}: i_n must be positive", l.n));
        }
    }
    if cert.p2_norms.len() != cert.levels.len() {
        ck.schema(format!(
            "{} p2 norms for {} levels",
            cert.p2_norms.len(),
            cert.levels.len()
        ));
    }
    if let Err(e) = cert.quadrature.validate() {
        ck.schema(e.to_string());
    }
    ck.failures.len() == before
}

pub fn verify_certificate(cert: &Certificate) -> Result<VerificationReport> {
    let mut ck = Checker {
        failures: Vec::new(),
        warnings: Vec::new(),
    };
    if !check_shape(cert, &mut ck) {
        return Ok(VerificationReport {
            passed: false,
            failures: ck.failures,
            warnings: ck.warnings,
            levels: Vec::new(),
            szego: None,
            p2_norms: Vec::new(),
        });
    }

    let quad = &cert.quadrature;
    let mut levels = Vec::with_capacity(cert.levels.len());
    for (l, p) in cert.levels.iter().zip(cert.kernel_params()) {
        let n = l.n;
        let lvl = Some(n);

        let margin = jz_margin(cert.d, l.c_n, l.r_n, l.i_n, n, cert.gamma_exp);
        ck.le("jz", lvl, -margin, 0.0, "c F̂(i) must exceed n e^{i^γ}");
        ck.drift(&format!("level {n} jz_margin"), l.jz_margin, margin);

        let su = sup_on_vn(&p, n)?.logmag();
        ck.le("su", lvl, su, su_limit(n), "sup over V_n of c|F| must be at most 2^{-n}");
        ck.drift(&format!("level {n} su_log"), l.su_log, su);

        let drew = drewnowski_integral(&p, quad)?;
        ck.le(
            "drew",
            lvl,
            (drew.value + drew.est_error).ln(),
            su_limit(n),
            "Drewnowski integral must be at most 2^{-n}",
        );
        ck.drift(&format!("level {n} drew"), l.drew, drew.value);

        let ln_term = f64::from(n).ln() + margin;
        ck.drift(&format!("level {n} gamma_term"), l.gamma_term, ln_term.exp());
        let terms = gamma_terms(l, cert.truncation.gamma_factor, cert.truncation.max_index);
        let gamma = gamma_sum(&p, cert.gamma_exp, terms);
        ck.le(
            "gamma",
            lvl,
            ln_term,
            gamma.ln_partial + GAMMA_SLACK,
            "partial Γ must dominate its i_n-th term",
        );
        if !gamma.monotone {
            ck.warnings.push(format!("level {n}: Γ partial sums were not monotone"));
        }

        levels.push(LevelReport {
            n,
            jz_margin: margin,
            su_log: su,
            su_limit: su_limit(n),
            drew,
            gamma,
            ln_gamma_term: ln_term,
        });
    }

    let szego = szego_estimate(cert, quad)?;
    let tol = quad.tolerance;
    ck.le(
        "szego",
        None,
        -(szego.value - szego.est_error + 2.0 + tol),
        0.0,
        "Szegő integral of log g must exceed -2",
    );
    ck.drift("szego_estimate", cert.szego_estimate, szego.value);

    let p2 = p2_norms(cert, quad)?;
    for ((l, est), stored) in cert.levels.iter().zip(&p2).zip(&cert.p2_norms) {
        let upper = est.value + est.est_error;
        if !(upper < 1.0) {
            ck.failures.push(Failure {
                check: "p2".to_string(),
                level: Some(l.n),
                ln_lhs: upper.ln(),
                ln_rhs: 0.0,
                message: format!("weighted norm {upper:e} is not below 1"),
            });
        }
        ck.drift(&format!("level {} p2_norm", l.n), *stored, est.value);
    }

    Ok(VerificationReport {
        passed: ck.failures.is_empty(),
        failures: ck.failures,
        warnings: ck.warnings,
        levels,
        szego: Some(szego),
        p2_norms: p2,
    })
}

/// Tail bounds below `e^{-TAIL_GAP}` times the partial sum count as
/// negligible.
const TAIL_GAP: f64 = 14.0;

/// `Γ_γ'(c_n F_n)` with a different decay exponent, used to show that the
/// sums stay bounded when `γ'` is large. The partial sum is lengthened
/// (within the truncation budget) until its tail bound is negligible.
pub fn contrast_values(cert: &Certificate, exponent: f64) -> Vec<GammaSum> {
    let max_index = cert.truncation.max_index;
    cert.levels
        .iter()
        .zip(cert.kernel_params())
        .map(|(l, p)| {
            let mut terms = gamma_terms(l, cert.truncation.gamma_factor, max_index);
            loop {
                let sum = gamma_sum(&p, exponent, terms);
                if sum.ln_tail_bound <= sum.ln_partial - TAIL_GAP || terms >= max_index {
                    return sum;
                }
                terms = (terms * 2).min(max_index);
            }
        })
        .collect()
}
