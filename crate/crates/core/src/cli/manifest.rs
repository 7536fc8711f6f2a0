use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{DsomError, Result};
use crate::som::Variant;
use crate::topology::Layout;

pub const TOOL_NAME: &str = "dsom";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Every resolved parameter of a run. Re-executing a manifest reproduces the
/// run's result files byte for byte.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    #[serde(flatten)]
    pub run: Run,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "subcommand", rename_all = "lowercase")]
pub enum Run {
    Gen(GenParams),
    Dist(DistParams),
    Train(TrainParams),
    Verify(VerifyParams),
    Bench(BenchParams),
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GenParams {
    pub n: usize,
    pub seed: u64,
    pub out: PathBuf,
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize, clap::ValueEnum,
)]
#[serde(rename_all = "lowercase")]
pub enum InputKind {
    /// Headerless CSV of points, squared Euclidean distance.
    Vectors,
    /// One word per line, Levenshtein distance.
    Words,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DistParams {
    pub input: PathBuf,
    pub kind: InputKind,
    pub normalized: bool,
    pub integerize: Option<f64>,
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MapParams {
    pub grid: Layout,
    /// Side of the map; `M = m^2` models.
    pub m: usize,
    pub epochs: usize,
    pub sigma_initial: f64,
    pub sigma_final: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrainParams {
    pub matrix: PathBuf,
    #[serde(flatten)]
    pub map: MapParams,
    pub variant: Variant,
    pub ratio: f64,
    pub seed: u64,
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct VerifyParams {
    pub matrix: PathBuf,
    #[serde(flatten)]
    pub map: MapParams,
    /// Seeds `seed .. seed + seeds`.
    pub seed: u64,
    pub seeds: u64,
    pub variants: Vec<Variant>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub inject_tie_fault: bool,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BenchParams {
    /// `(N, m)` pairs; `M = m^2`.
    pub sizes: Vec<(usize, usize)>,
    pub variants: Vec<Variant>,
    pub epochs: usize,
    pub repeats: usize,
    pub seed: u64,
    pub out: PathBuf,
}

impl RunManifest {
    pub fn new(run: Run) -> Self {
        RunManifest {
            tool: TOOL_NAME.to_string(),
            version: TOOL_VERSION.to_string(),
            run,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?).map_err(|e| DsomError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| DsomError::io(path, e))?;
        let manifest: RunManifest = serde_json::from_str(&text)?;
        if manifest.tool != TOOL_NAME {
            return Err(DsomError::invalid(format!(
                "{}: written by {:?}, not {TOOL_NAME}",
                path.display(),
                manifest.tool
            )));
        }
        Ok(manifest)
    }

    /// Points the run's output at `out`.
    pub fn redirect(&mut self, out: PathBuf) {
        match &mut self.run {
            Run::Gen(p) => p.out = out,
            Run::Dist(p) => p.out = out,
            Run::Train(p) => p.out = out,
            Run::Verify(p) => p.out = Some(out),
            Run::Bench(p) => p.out = out,
        }
    }
}
