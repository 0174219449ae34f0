use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use dualwell::fields::DEFAULT_NODES;
use dualwell::problem::{balanced_linear_load, validate_spec, LoadFunction, ProblemSpec, RadialGrid};
use dualwell::stability::{DEFAULT_ELEMENTS, DEFAULT_MAX_MODE};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub spec: SpecSection,
    pub load: LoadSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub stability: StabilitySection,
    #[serde(default)]
    pub oracle: OracleSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecSection {
    pub nu: f64,
    pub lambda: f64,
    pub r1: f64,
    pub r2: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum LoadSection {
    Linear { amplitude: f64 },
    Table { points: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub nodes: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { nodes: DEFAULT_NODES }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilitySection {
    pub max_mode: usize,
    pub elements: usize,
}

impl Default for StabilitySection {
    fn default() -> Self {
        Self {
            max_mode: DEFAULT_MAX_MODE,
            elements: DEFAULT_ELEMENTS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    pub enabled: bool,
    pub starts: usize,
    pub seed: u64,
}

impl Default for OracleSection {
    fn default() -> Self {
        Self {
            enabled: true,
            starts: 4,
            seed: 0,
        }
    }
}

/// Optional artifacts written next to fields.csv and report.json.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Modes,
    Text,
    Plots,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub directory: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("output"),
            formats: vec![Format::Modes, Format::Text],
        }
    }
}

impl OutputSection {
    pub fn wants(&self, format: Format) -> bool {
        self.formats.contains(&format)
    }
}

/// Everything the pipeline needs, already checked against the spec invariants.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub config: RunConfig,
    pub spec: ProblemSpec,
    pub load: LoadFunction,
    pub grid: RadialGrid,
}

pub fn parse(text: &str) -> Result<RunConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::Config(format!("{path}: {}", e.inner()))
    })
}

pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

fn field_of(check: &str) -> &'static str {
    match check {
        "nu > 0" => "spec.nu",
        "lambda > 0" => "spec.lambda",
        "r2 > 0" => "spec.r2",
        "r1 > r2" => "spec.r1",
        _ => "spec.n",
    }
}

/// Builds spec, load and grid. Schema-level problems map to exit code 2.
pub fn prepare(config: RunConfig) -> Result<Prepared, CliError> {
    let s = config.spec;
    let candidate = ProblemSpec {
        nu: s.nu,
        lambda: s.lambda,
        r1: s.r1,
        r2: s.r2,
        n: s.n,
    };
    if let Some(check) = validate_spec(&candidate).first_failure() {
        return Err(CliError::Config(format!(
            "{}: {} violated ({})",
            field_of(check.name),
            check.name,
            check.detail
        )));
    }
    let spec = ProblemSpec::new(s.nu, s.lambda, s.r1, s.r2, s.n).map_err(CliError::from_core)?;

    let load = match &config.load {
        LoadSection::Linear { amplitude } => balanced_linear_load(&spec, *amplitude)
            .map_err(|e| CliError::Config(format!("load.amplitude: {e}")))?,
        LoadSection::Table { points } => LoadFunction::tabulated(points.iter().map(|p| (p[0], p[1])).collect()),
    };
    if config.grid.nodes < 3 {
        return Err(CliError::Config(format!(
            "grid.nodes: need at least 3 nodes, got {}",
            config.grid.nodes
        )));
    }
    if config.stability.elements < 2 {
        return Err(CliError::Config(format!(
            "stability.elements: need at least 2 elements, got {}",
            config.stability.elements
        )));
    }
    let grid = RadialGrid::uniform(&spec, config.grid.nodes).map_err(|e| CliError::Config(format!("grid.nodes: {e}")))?;
    Ok(Prepared {
        config,
        spec,
        load,
        grid,
    })
}
