//! Report schema shared by every subcommand: one JSON object per checked
//! claim, newline-delimited in suite mode. Reports are byte-stable across
//! identical runs; wall-clock timing is opt-in via `--timings`.

use pseudoturan_core::field::FieldSpec;
use pseudoturan_core::graph::{Graph, JumbledCert};
use pseudoturan_core::spectral::{SpectralMethod, SpectralSummary};
use serde::Serialize;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct FieldDesc {
    pub p: u64,
    pub h: usize,
    pub modulus: Vec<u64>,
}

impl From<&FieldSpec> for FieldDesc {
    fn from(fs: &FieldSpec) -> Self {
        FieldDesc { p: fs.p(), h: fs.h(), modulus: fs.modulus().to_vec() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DegreeRange {
    pub min: usize,
    pub max: usize,
}

impl DegreeRange {
    pub fn of(g: &Graph) -> DegreeRange {
        let degs = g.degrees();
        DegreeRange {
            min: degs.iter().copied().min().unwrap_or(0),
            max: degs.iter().copied().max().unwrap_or(0),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Checks {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub triangle_free: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k23_free: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clique_cap: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumOut {
    pub lambda1: f64,
    pub lambda: f64,
    pub method: &'static str,
}

impl From<&SpectralSummary> for SpectrumOut {
    fn from(s: &SpectralSummary) -> Self {
        SpectrumOut {
            lambda1: s.lambda1,
            lambda: s.lambda,
            method: match s.method {
                SpectralMethod::CharacterSum => "character-sum",
                SpectralMethod::DenseNumeric => "dense-numeric",
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct JumbledOut {
    pub p: String,
    pub alpha: f64,
    pub provenance: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimality_ratio: Option<f64>,
}

impl From<&JumbledCert> for JumbledOut {
    fn from(c: &JumbledCert) -> Self {
        JumbledOut {
            p: c.density.to_string(),
            alpha: c.alpha,
            provenance: c.provenance.to_string(),
            optimality_ratio: c.optimality_ratio,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub claim_id: String,
    pub tool_version: &'static str,
    pub construction: String,
    pub params: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldDesc>,
    pub seed: u64,
    pub n: usize,
    pub degrees: DegreeRange,
    pub checks: Checks,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jumbled: Option<JumbledOut>,
    pub result: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u128>,
}

impl Report {
    pub fn new(claim_id: &str, construction: &str, params: serde_json::Value, g: &Graph) -> Report {
        Report {
            claim_id: claim_id.to_string(),
            tool_version: TOOL_VERSION,
            construction: construction.to_string(),
            params,
            field: None,
            seed: 0,
            n: g.n(),
            degrees: DegreeRange::of(g),
            checks: Checks::default(),
            spectrum: None,
            jumbled: None,
            result: "pass".to_string(),
            runtime_ms: None,
        }
    }


    pub fn emit(&self) {
        println!("{}", serde_json::to_string(self).expect("report serializes"));
    }
}
