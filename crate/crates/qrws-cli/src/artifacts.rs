//! Artifact files: naming, the CSV dialect (two comment lines, then a
//! header, then rows at 17 significant digits) and the JSON schemas.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qrws::coin::DependenceLaw;
use qrws::robustness::NeighborLevel;
use qrws::walk::RunMode;

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// 17 significant digits: enough for exact f64 round trips.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn mode_suffix(mode: RunMode) -> &'static str {
    match mode {
        RunMode::Standard => "",
        RunMode::Alternating => "_alternating",
    }
}

pub fn distribution_path(dir: &Path, m: usize, law: DependenceLaw, mode: RunMode) -> PathBuf {
    dir.join(format!("distribution_m{m}_{}{}.csv", law.cli_name(), mode_suffix(mode)))
}

pub fn trace_path(dir: &Path, m: usize, law: DependenceLaw, mode: RunMode) -> PathBuf {
    dir.join(format!("trace_m{m}_{}{}.csv", law.cli_name(), mode_suffix(mode)))
}

pub fn run_summary_path(dir: &Path, m: usize, law: DependenceLaw, mode: RunMode) -> PathBuf {
    dir.join(format!("run_m{m}_{}{}.json", law.cli_name(), mode_suffix(mode)))
}

pub fn sweep_path(dir: &Path, m: usize, law: DependenceLaw) -> PathBuf {
    dir.join(format!("sweep_m{m}_{}.csv", law.cli_name()))
}

pub fn heatmap_path(dir: &Path, m: usize) -> PathBuf {
    dir.join(format!("heatmap_m{m}.csv"))
}

pub fn robustness_path(dir: &Path, m: usize, law: DependenceLaw, level: NeighborLevel) -> PathBuf {
    dir.join(format!(
        "robustness_m{m}_{}_{}.json",
        law.cli_name(),
        level.cli_name()
    ))
}

pub fn fit_path(dir: &Path, m: usize, law: DependenceLaw, level: NeighborLevel) -> PathBuf {
    dir.join(format!("fit_m{m}_{}_{}.json", law.cli_name(), level.cli_name()))
}

pub fn secondary_path(dir: &Path, law: DependenceLaw, level: NeighborLevel) -> PathBuf {
    dir.join(format!("secondary_{}_{}.json", law.cli_name(), level.cli_name()))
}

pub fn extrapolate_path(dir: &Path, m: usize, law: DependenceLaw, level: NeighborLevel) -> PathBuf {
    dir.join(format!(
        "extrapolate_m{m}_{}_{}.json",
        law.cli_name(),
        level.cli_name()
    ))
}

pub fn prognosis_path(dir: &Path, m: usize, law: DependenceLaw, level: NeighborLevel) -> PathBuf {
    dir.join(format!(
        "prognosis_m{m}_{}_{}.csv",
        law.cli_name(),
        level.cli_name()
    ))
}

pub fn lambda_json_path(dir: &Path, m: usize, law: DependenceLaw) -> PathBuf {
    dir.join(format!("lambda_m{m}_{}.json", law.cli_name()))
}

pub fn lambda_csv_path(dir: &Path, m: usize, law: DependenceLaw) -> PathBuf {
    dir.join(format!("lambda_m{m}_{}.csv", law.cli_name()))
}

pub fn report_path(dir: &Path) -> PathBuf {
    dir.join("report.txt")
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

/// Writes a CSV artifact: schema/config comment lines, a header, rows.
pub fn write_csv<I>(path: &Path, config_hash: &str, header: &str, rows: I) -> Result<()>
where
    I: IntoIterator<Item = String>,
{
    let mut out = String::new();
    out.push_str(&format!("# schema_version: {SCHEMA_VERSION}\n"));
    out.push_str(&format!("# config_hash: {config_hash}\n"));
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    let mut file = fs::File::create(path)?;
    file.write_all(out.as_bytes())?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Artifact {
        path: path.to_path_buf(),
        message: format!("serialization failed: {e}"),
    })?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path, producer: &str) -> Result<T> {
    let text = read_artifact_text(path, producer)?;
    serde_json::from_str(&text).map_err(|e| CliError::Artifact {
        path: path.to_path_buf(),
        message: format!("malformed artifact: {e}"),
    })
}

fn read_artifact_text(path: &Path, producer: &str) -> Result<String> {
    match fs::read_to_string(path) {
        Ok(text) => Ok(text),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(CliError::MissingArtifact {
            path: path.to_path_buf(),
            producer: producer.to_string(),
        }),
        Err(e) => Err(e.into()),
    }
}

/// A parsed CSV artifact: named columns of f64.
pub struct CsvTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

/// Reads a CSV artifact, checking the header against `expected_header`.
/// Parse failures name the offending physical row.
pub fn read_csv(path: &Path, expected_header: &str, producer: &str) -> Result<CsvTable> {
    let text = read_artifact_text(path, producer)?;
    let mut columns: Vec<String> = Vec::new();
    let mut rows = Vec::new();
    let mut header_seen = false;
    for (idx, line) in text.lines().enumerate() {
        let row_no = idx + 1;
        let line = line.trim_end_matches('\r');
        if line.starts_with('#') || line.is_empty() {
            continue;
        }
        if !header_seen {
            if line != expected_header {
                return Err(CliError::Schema {
                    path: path.to_path_buf(),
                    row: row_no,
                    message: format!("header `{line}` does not match `{expected_header}`"),
                });
            }
            columns = line.split(',').map(str::to_string).collect();
            header_seen = true;
            continue;
        }
        let mut parsed = Vec::with_capacity(columns.len());
        for field in line.split(',') {
            let trimmed = field.trim();
            if trimmed.is_empty() {
                parsed.push(f64::NAN);
                continue;
            }
            match trimmed.parse::<f64>() {
                Ok(v) => parsed.push(v),
                Err(_) => {
                    return Err(CliError::Schema {
                        path: path.to_path_buf(),
                        row: row_no,
                        message: format!("cannot parse `{trimmed}` as a number"),
                    })
                }
            }
        }
        if parsed.len() != columns.len() {
            return Err(CliError::Schema {
                path: path.to_path_buf(),
                row: row_no,
                message: format!(
                    "expected {} fields, found {}",
                    columns.len(),
                    parsed.len()
                ),
            });
        }
        rows.push(parsed);
    }
    if !header_seen {
        return Err(CliError::Schema {
            path: path.to_path_buf(),
            row: 1,
            message: "no header row".into(),
        });
    }
    Ok(CsvTable { columns, rows })
}

pub const SWEEP_HEADER: &str = "phi,zeta,p_w,p_f,p_s";
pub const HEATMAP_HEADER: &str = "phi,zeta,p_w";
pub const DISTRIBUTION_HEADER: &str = "node,probability";
pub const TRACE_HEADER: &str = "iteration,p_marked";
pub const LAMBDA_HEADER: &str = "phi,lambda1,lambda2";
pub const PROGNOSIS_HEADER: &str = "phi,p_predicted";

// JSON artifact bodies. Field order is the serialization order, which keeps
// artifacts byte-stable.

#[derive(Debug, Serialize, Deserialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub config_hash: String,
    pub m: usize,
    pub law: DependenceLaw,
    pub mode: RunMode,
    pub marked: usize,
    pub phi: f64,
    pub zeta: f64,
    pub iterations_run: usize,
    pub oracle_calls: usize,
    pub p_w: f64,
    pub p_f: f64,
    pub p_s: f64,
    pub p_marked: f64,
    pub p_first_sum: f64,
    pub p_second_sum: f64,
    pub residue: f64,
    pub shell_counts: [usize; 4],
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RobustnessArtifact {
    pub schema_version: u32,
    pub config_hash: String,
    pub m: usize,
    pub law: DependenceLaw,
    pub level: NeighborLevel,
    pub omega: f64,
    pub phi_max: f64,
    pub p_max: f64,
    pub epsilon: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FitArtifact {
    pub schema_version: u32,
    pub config_hash: String,
    pub law: DependenceLaw,
    pub level: NeighborLevel,
    pub m: usize,
    pub b: f64,
    pub kappa: f64,
    pub eta: f64,
    pub sigma: f64,
    pub window: [f64; 2],
    pub samples: usize,
    pub exceeds_nominal_height: bool,
}

/// One secondary-law entry: which parameter, the four coefficients (frozen
/// ones zero), and which coefficient names are frozen for this form.
#[derive(Debug, Serialize, Deserialize)]
pub struct SecondaryEntry {
    pub law: DependenceLaw,
    pub level: NeighborLevel,
    pub param: String,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub frozen: Vec<String>,
    pub sigma: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SecondaryArtifact {
    pub schema_version: u32,
    pub config_hash: String,
    pub law: DependenceLaw,
    pub level: NeighborLevel,
    pub ms: Vec<usize>,
    pub entries: Vec<SecondaryEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ExtrapolateArtifact {
    pub schema_version: u32,
    pub config_hash: String,
    pub law: DependenceLaw,
    pub level: NeighborLevel,
    pub m: usize,
    /// Raw height from the secondary law; `b` is the value used for the
    /// prognosis curve after clamping into (0, 1].
    pub b_raw: f64,
    pub b: f64,
    pub kappa: f64,
    pub eta: f64,
    pub omega: f64,
    pub epsilon_tilde: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LambdaArtifact {
    pub schema_version: u32,
    pub config_hash: String,
    pub m: usize,
    pub law: DependenceLaw,
    pub omega: f64,
    pub epsilon: f64,
    pub capital_lambda1: f64,
    pub capital_lambda2: f64,
    pub interval: [f64; 2],
}
