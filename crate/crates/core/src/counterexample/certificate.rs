//! The certificate document and its JSON form.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::kernel::KernelParams;
use crate::quadrature::QuadratureSpec;
use crate::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub n: u32,
    pub c_n: f64,
    pub r_n: f64,
    pub i_n: u64,
    /// `ln F̂(i_n) - ln(n/c_n) - i_n^γ`.
    pub jz_margin: f64,
    /// `ln sup_{V_n} c_n|F|`.
    pub su_log: f64,
    /// Drewnowski integral `∫ log(1 + c_n|F|) dσ`.
    pub drew: f64,
    /// `c_n F̂(i_n) e^{-i_n^γ}`.
    pub gamma_term: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    /// Largest coefficient index any search may touch.
    pub max_index: u64,
    /// `Γ` partial sums run to `gamma_factor · i_n` terms.
    pub gamma_factor: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub d: u32,
    pub gamma_exp: f64,
    pub levels: Vec<Level>,
    pub szego_estimate: f64,
    pub p2_norms: Vec<f64>,
    pub quadrature: QuadratureSpec,
    pub truncation: Truncation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl Certificate {
    pub fn kernel_params(&self) -> Vec<KernelParams> {
        self.levels
            .iter()
            .map(|l| KernelParams {
                d: self.d,
                c: l.c_n,
                r: l.r_n,
            })
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        crate::json::to_string(self)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
