//! JSON run configuration. Unknown keys are rejected everywhere; numeric
//! validation is left to the library so the rules live in one place.

use serde::Deserialize;
use std::path::{Path, PathBuf};

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub grid: GridSection,
    pub pulse: Option<PulseSection>,
    pub cavity: Option<CavitySection>,
    pub modulation: Option<ModulationSection>,
    pub codebook: Option<CodebookSection>,
    pub code: Option<CodeSection>,
    pub output: Option<OutputSection>,
}

impl RawConfig {
    /// Interpret relative file references against the config's directory.
    pub fn resolve(&mut self, base: &Path) {
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&p);
            }
        };
        if let Some(pulse) = &mut self.pulse {
            if let Some(f) = &mut pulse.file {
                rebase(f);
            }
        }
        if let Some(book) = &mut self.codebook {
            if let Some(f) = &mut book.file {
                rebase(f);
            }
        }
        if let Some(code) = &mut self.code {
            if let Some(f) = &mut code.input {
                rebase(f);
            }
        }
        if let Some(output) = &mut self.output {
            if let Some(p) = &mut output.path {
                rebase(p);
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n: usize,
    pub delta_omega: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSection {
    pub shape: PulseShape,
    pub sigma: Option<f64>,
    pub center: Option<f64>,
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PulseShape {
    Gaussian,
    CustomFile,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavitySection {
    pub gamma: f64,
    #[serde(default)]
    pub delta: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulationSection {
    pub epsilon: f64,
    pub big_omega: f64,
    pub method: Option<FmMethod>,
    pub oracle: Option<OracleSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FmMethod {
    SingleSideband,
    TwoSideband,
    Oracle,
}

impl FmMethod {
    pub fn parse(s: &str) -> CliResult<Self> {
        match s {
            "single_sideband" => Ok(Self::SingleSideband),
            "two_sideband" => Ok(Self::TwoSideband),
            "oracle" => Ok(Self::Oracle),
            other => Err(CliError::Config(format!(
                "unknown fm method {other:?}; use single_sideband, two_sideband or oracle"
            ))),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    pub dt: Option<f64>,
    pub window: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodebookSection {
    pub kind: CodebookKind,
    #[serde(rename = "K")]
    pub k: Option<usize>,
    pub bin_width: Option<f64>,
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CodebookKind {
    Timebin,
    File,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSection {
    pub action: Option<CodeAction>,
    pub bits: Option<String>,
    pub input: Option<PathBuf>,
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeAction {
    Encode,
    Decode,
    Roundtrip,
    Crosstalk,
}

impl CodeAction {
    pub fn parse(s: &str) -> CliResult<Self> {
        match s {
            "encode" => Ok(Self::Encode),
            "decode" => Ok(Self::Decode),
            "roundtrip" => Ok(Self::Roundtrip),
            "crosstalk" => Ok(Self::Crosstalk),
            other => Err(CliError::Config(format!(
                "unknown code action {other:?}; use encode, decode, roundtrip or crosstalk"
            ))),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

pub fn load(path: &Path) -> CliResult<RawConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Config(format!("cannot read config {}: {e}", path.display()))
    })?;
    parse(&text)
}

pub fn parse(text: &str) -> CliResult<RawConfig> {
    serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
}

pub fn from_value(value: serde_json::Value) -> CliResult<RawConfig> {
    serde_json::from_value(value).map_err(|e| CliError::Config(format!("config: {e}")))
}
