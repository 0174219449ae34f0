use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    /// Wall-clock time of the run; the only field that varies between
    /// identical runs.
    pub timestamp: String,
    pub version: String,
    pub config: RunConfig,
    pub validation: Validation,
    pub branches: Vec<BranchReport>,
    pub oracle: Option<OracleReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadCertificate {
    pub balance_residual: f64,
    pub balance_ok: bool,
    pub sign_changes: usize,
    pub single_zero_ok: bool,
    pub r3: Option<f64>,
    pub l1_norm: f64,
    pub l1_bound: f64,
    pub l1_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StressSummary {
    pub inner_endpoint: f64,
    pub outer_endpoint: f64,
    pub sign_constant: bool,
    pub interior_positive: bool,
    pub max_amplitude: f64,
    pub critical_amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Validation {
    pub spec: Vec<Check>,
    pub load: LoadCertificate,
    pub stress: StressSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Energies {
    pub primal: f64,
    pub dual: f64,
    pub total_complementary: f64,
    pub gap: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// Max-norm of ν(½s² − λ)s − F·r at the nodes.
    pub constitutive: f64,
    /// Max-norm of the conservative finite-difference residual.
    pub finite_difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub l: usize,
    pub kappa: f64,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stability {
    pub verdict: String,
    pub scale: f64,
    pub tolerance: f64,
    pub modes: Vec<Mode>,
    /// Common sign of the dual second variation over the interior.
    pub dual_form_sign: Option<f64>,
    pub dual_bracket_discrepancy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchReport {
    pub branch: usize,
    pub energies: Energies,
    pub residuals: Residuals,
    pub stability: Stability,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledEnergy {
    pub branch: usize,
    pub discrete: f64,
    pub primal: f64,
    pub relative_difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Descent {
    pub start: usize,
    pub iterations: usize,
    pub converged: bool,
    pub gradient_norm: f64,
    pub initial_energy: f64,
    pub final_energy: f64,
    /// Branch whose mean-free samples are closest in max-norm.
    pub nearest_branch: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub seed: u64,
    pub sampled: Vec<SampledEnergy>,
    pub descents: Vec<Descent>,
}
