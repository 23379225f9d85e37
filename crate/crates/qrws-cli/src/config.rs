//! Experiment configuration: JSON file and/or flags, flags winning, with all
//! defaults resolved before any simulation starts.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use qrws::coin::{AlphaTable, DependenceLaw};
use qrws::robustness::{NeighborLevel, DEFAULT_GRID_STEP, DEFAULT_OMEGA};
use qrws::walk::{RunMode, WalkOnlyVariant};
use qrws::QrwsError;

use crate::error::{CliError, Result};

/// On-disk configuration. Every field is optional; flags override whatever
/// the file provides. Unknown keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FileConfig {
    pub m: Option<usize>,
    /// Inclusive register-size range `[lo, hi]`.
    pub m_range: Option<[usize; 2]>,
    pub law: Option<String>,
    /// Path to a ζ-law coefficient table for the machine-learned law, or the
    /// special values "builtin" (default) and "none".
    pub alpha_table: Option<String>,
    pub marked: Option<usize>,
    pub levels: Option<Vec<String>>,
    pub grid_step: Option<f64>,
    pub omega: Option<f64>,
    pub mode: Option<String>,
    pub alternating_variant: Option<String>,
    pub output_dir: Option<PathBuf>,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, clap::Args)]
pub struct CommonArgs {
    /// JSON configuration file; explicit flags take precedence over it.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Register size (number of hypercube dimensions). Defaults to 6.
    #[arg(long)]
    pub m: Option<usize>,
    /// Inclusive register-size range, written `lo:hi`.
    #[arg(long, value_name = "LO:HI")]
    pub m_range: Option<String>,
    /// Phase-dependence law: const, linear, nl-fixed or nl-ml.
    #[arg(long)]
    pub law: Option<String>,
    /// Coefficient table for the machine-learned law: a JSON path, "builtin"
    /// or "none".
    #[arg(long, value_name = "PATH|builtin|none")]
    pub alpha_table: Option<String>,
    /// Marked (searched-for) node index.
    #[arg(long)]
    pub marked: Option<usize>,
    /// Neighbor levels to process: walk, first, second (repeatable,
    /// comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<String>>,
    /// Restrict to a single neighbor level (shorthand for --levels).
    #[arg(long)]
    pub level: Option<String>,
    /// φ grid spacing in radians.
    #[arg(long)]
    pub grid_step: Option<f64>,
    /// Robustness threshold Ω in (0, 1).
    #[arg(long)]
    pub omega: Option<f64>,
    /// Runner: standard or alternating.
    #[arg(long)]
    pub mode: Option<String>,
    /// Even-step flavor for the alternating runner: with-shift or literal.
    #[arg(long)]
    pub alternating_variant: Option<String>,
    /// Directory artifacts are written to.
    #[arg(long, value_name = "DIR")]
    pub output_dir: Option<PathBuf>,
    /// Worker thread count; defaults to the available cores.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Additionally render SVG plots next to the CSV artifacts.
    #[arg(long)]
    pub plot: bool,
}

/// Where the machine-learned ζ-law coefficients come from.
#[derive(Debug, Clone)]
pub enum AlphaSource {
    Builtin,
    None,
    File(AlphaTable),
}

/// Fully resolved configuration: every command consumes this.
#[derive(Debug, Clone)]
pub struct Config {
    pub ms: Vec<usize>,
    pub law: DependenceLaw,
    pub alpha: AlphaSource,
    pub marked: usize,
    pub levels: Vec<NeighborLevel>,
    /// `None` means "command-specific default" (sweeps 0.005, heatmaps 0.1).
    pub grid_step: Option<f64>,
    pub omega: f64,
    pub mode: RunMode,
    pub variant: WalkOnlyVariant,
    pub output_dir: PathBuf,
    pub jobs: Option<usize>,
    pub plot: bool,
}

impl Config {
    pub fn sweep_step(&self) -> f64 {
        self.grid_step.unwrap_or(DEFAULT_GRID_STEP)
    }

    pub fn heatmap_step(&self) -> f64 {
        self.grid_step.unwrap_or(0.1)
    }

    /// The ζ-law coefficient for `m`, if the law in use needs one.
    pub fn alpha_for(&self, m: usize) -> Result<Option<f64>> {
        if !self.law.requires_alpha() {
            return Ok(None);
        }
        match &self.alpha {
            AlphaSource::Builtin => Ok(Some(AlphaTable::builtin().resolve::<f64>(m)?)),
            AlphaSource::File(table) => Ok(Some(table.resolve::<f64>(m)?)),
            AlphaSource::None => Err(CliError::Qrws(QrwsError::MissingAlpha { m })),
        }
    }

    pub fn alpha_available(&self) -> bool {
        !matches!(self.alpha, AlphaSource::None)
    }

    /// Deterministic digest of everything that influences artifact content
    /// for one command invocation. Output location, parallelism and plotting
    /// are deliberately excluded: they do not change the data.
    pub fn digest(&self, command: &str, extras: &[(&str, String)]) -> String {
        #[derive(Serialize)]
        struct DigestBody<'a> {
            command: &'a str,
            ms: &'a [usize],
            law: &'a str,
            marked: usize,
            levels: Vec<&'a str>,
            grid_step: Option<f64>,
            omega: f64,
            mode: &'a str,
            variant: &'a str,
            alpha: Vec<(usize, f64)>,
            extras: BTreeMap<&'a str, &'a str>,
        }
        let alpha: Vec<(usize, f64)> = if self.law.requires_alpha() {
            self.ms
                .iter()
                .filter_map(|&m| self.alpha_for(m).ok().flatten().map(|a| (m, a)))
                .collect()
        } else {
            Vec::new()
        };
        let body = DigestBody {
            command,
            ms: &self.ms,
            law: self.law.cli_name(),
            marked: self.marked,
            levels: self.levels.iter().map(|l| l.cli_name()).collect(),
            grid_step: self.grid_step,
            omega: self.omega,
            mode: match self.mode {
                RunMode::Standard => "standard",
                RunMode::Alternating => "alternating",
            },
            variant: match self.variant {
                WalkOnlyVariant::WithShift => "with-shift",
                WalkOnlyVariant::Literal => "literal",
            },
            alpha,
            extras: extras.iter().map(|(k, v)| (*k, v.as_str())).collect(),
        };
        let json = serde_json::to_string(&body).expect("digest serialization cannot fail");
        let mut hasher = Sha256::new();
        hasher.update(json.as_bytes());
        let digest = hasher.finalize();
        let mut hex = String::with_capacity(64);
        for byte in digest {
            use std::fmt::Write;
            write!(hex, "{byte:02x}").unwrap();
        }
        hex
    }
}

fn parse_m_range(text: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 2 {
        return Err(CliError::Config(format!(
            "m-range must be written lo:hi, got `{text}`"
        )));
    }
    let lo = parts[0]
        .trim()
        .parse::<usize>()
        .map_err(|_| CliError::Config(format!("invalid m-range lower bound `{}`", parts[0])))?;
    let hi = parts[1]
        .trim()
        .parse::<usize>()
        .map_err(|_| CliError::Config(format!("invalid m-range upper bound `{}`", parts[1])))?;
    if hi < lo {
        return Err(CliError::Config(format!(
            "m-range upper bound {hi} is below lower bound {lo}"
        )));
    }
    Ok((lo, hi))
}

fn parse_mode(text: &str) -> Result<RunMode> {
    match text {
        "standard" => Ok(RunMode::Standard),
        "alternating" => Ok(RunMode::Alternating),
        other => Err(CliError::Config(format!(
            "unknown mode `{other}` (standard, alternating)"
        ))),
    }
}

fn parse_variant(text: &str) -> Result<WalkOnlyVariant> {
    match text {
        "with-shift" | "with_shift" => Ok(WalkOnlyVariant::WithShift),
        "literal" => Ok(WalkOnlyVariant::Literal),
        other => Err(CliError::Config(format!(
            "unknown alternating variant `{other}` (with-shift, literal)"
        ))),
    }
}

fn parse_levels(items: &[String]) -> Result<Vec<NeighborLevel>> {
    let mut out = Vec::new();
    for item in items {
        let level: NeighborLevel = item.parse().map_err(CliError::Qrws)?;
        if !out.contains(&level) {
            out.push(level);
        }
    }
    if out.is_empty() {
        return Err(CliError::Config("levels list is empty".into()));
    }
    Ok(out)
}

/// Angles on the command line: plain radians (`3.14`, `-0.5`) or multiples
/// of π written `pi`, `-pi`, `2pi`, `pi/2`, `2pi/3`, `1.5pi`.
pub fn parse_angle(text: &str) -> Result<f64> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let err = || CliError::Config(format!("cannot parse angle `{text}`"));
    if compact.is_empty() {
        return Err(err());
    }
    if let Ok(v) = compact.parse::<f64>() {
        if v.is_finite() {
            return Ok(v);
        }
        return Err(err());
    }
    let lower = compact.to_ascii_lowercase();
    let (sign, rest) = match lower.strip_prefix('-') {
        Some(r) => (-1.0, r),
        None => (1.0, lower.strip_prefix('+').unwrap_or(&lower)),
    };
    let pi_at = rest.find("pi").ok_or_else(err)?;
    let coef_text = &rest[..pi_at];
    let tail = &rest[pi_at + 2..];
    let coef = if coef_text.is_empty() {
        1.0
    } else {
        coef_text.parse::<f64>().map_err(|_| err())?
    };
    let denom = if tail.is_empty() {
        1.0
    } else {
        let d = tail.strip_prefix('/').ok_or_else(err)?;
        let d = d.parse::<f64>().map_err(|_| err())?;
        if d == 0.0 {
            return Err(err());
        }
        d
    };
    let value = sign * coef * std::f64::consts::PI / denom;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(err())
    }
}

/// Merges file and flags (flags win) and applies defaults.
pub fn resolve(args: &CommonArgs) -> Result<Config> {
    let file = match &args.config {
        Some(path) => load_file_config(path)?,
        None => FileConfig::default(),
    };

    let ms = match (
        args.m,
        args.m_range.as_deref(),
        file.m,
        file.m_range,
    ) {
        (Some(m), None, _, _) => vec![m],
        (None, Some(range), _, _) => {
            let (lo, hi) = parse_m_range(range)?;
            (lo..=hi).collect()
        }
        (Some(_), Some(_), _, _) => {
            return Err(CliError::Config(
                "pass either --m or --m-range, not both".into(),
            ))
        }
        (None, None, Some(m), None) => vec![m],
        (None, None, None, Some([lo, hi])) => {
            if hi < lo {
                return Err(CliError::Config(format!(
                    "m-range upper bound {hi} is below lower bound {lo}"
                )));
            }
            (lo..=hi).collect()
        }
        (None, None, Some(_), Some(_)) => {
            return Err(CliError::Config(
                "config file sets both m and m-range".into(),
            ))
        }
        (None, None, None, None) => vec![6],
    };

    let law_text = args
        .law
        .clone()
        .or(file.law)
        .unwrap_or_else(|| "linear".to_string());
    let law: DependenceLaw = law_text.parse().map_err(CliError::Qrws)?;

    let alpha_text = args
        .alpha_table
        .clone()
        .or(file.alpha_table)
        .unwrap_or_else(|| "builtin".to_string());
    let alpha = match alpha_text.as_str() {
        "builtin" => AlphaSource::Builtin,
        "none" => AlphaSource::None,
        path => {
            let path = PathBuf::from(path);
            let text = std::fs::read_to_string(&path).map_err(|e| CliError::Artifact {
                path: path.clone(),
                message: format!("cannot read alpha table: {e}"),
            })?;
            let table = AlphaTable::from_json_str(&text).map_err(CliError::Qrws)?;
            AlphaSource::File(table)
        }
    };

    let levels = if let Some(one) = &args.level {
        parse_levels(std::slice::from_ref(one))?
    } else if let Some(list) = &args.levels {
        parse_levels(list)?
    } else if let Some(list) = &file.levels {
        parse_levels(list)?
    } else {
        NeighborLevel::ALL.to_vec()
    };

    let grid_step = args.grid_step.or(file.grid_step);
    if let Some(step) = grid_step {
        if !(step > 0.0 && step < std::f64::consts::PI) {
            return Err(CliError::Config(format!(
                "grid-step {step} outside (0, pi)"
            )));
        }
    }

    let omega = args.omega.or(file.omega).unwrap_or(DEFAULT_OMEGA);
    if !(omega > 0.0 && omega < 1.0) {
        return Err(CliError::Config(format!("omega {omega} outside (0, 1)")));
    }

    let mode = match args.mode.as_deref().or(file.mode.as_deref()) {
        Some(text) => parse_mode(text)?,
        None => RunMode::Standard,
    };
    let variant = match args
        .alternating_variant
        .as_deref()
        .or(file.alternating_variant.as_deref())
    {
        Some(text) => parse_variant(text)?,
        None => WalkOnlyVariant::WithShift,
    };

    if let Some(jobs) = args.jobs {
        if jobs == 0 {
            return Err(CliError::Config("jobs must be at least 1".into()));
        }
    }

    Ok(Config {
        ms,
        law,
        alpha,
        marked: args.marked.or(file.marked).unwrap_or(2),
        levels,
        grid_step,
        omega,
        mode,
        variant,
        output_dir: args
            .output_dir
            .clone()
            .or(file.output_dir)
            .unwrap_or_else(|| PathBuf::from("artifacts")),
        jobs: args.jobs,
        plot: args.plot,
    })
}

fn load_file_config(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Artifact {
        path: path.to_path_buf(),
        message: format!("cannot read config: {e}"),
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn angles_parse() {
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("-pi").unwrap(), -PI);
        assert_eq!(parse_angle("2pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_angle("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("2pi/3").unwrap(), 2.0 * PI / 3.0);
        assert_eq!(parse_angle("1.5pi").unwrap(), 1.5 * PI);
        assert_eq!(parse_angle("3.25").unwrap(), 3.25);
        assert_eq!(parse_angle(" -0.5 ").unwrap(), -0.5);
        assert!(parse_angle("tau").is_err());
        assert!(parse_angle("pi/0").is_err());
        assert!(parse_angle("").is_err());
    }

    #[test]
    fn m_range_parses() {
        assert_eq!(parse_m_range("4:10").unwrap(), (4, 10));
        assert!(parse_m_range("10:4").is_err());
        assert!(parse_m_range("4-10").is_err());
    }

    #[test]
    fn digest_ignores_location_and_scheduling() {
        let args = CommonArgs {
            config: None,
            m: Some(6),
            m_range: None,
            law: None,
            alpha_table: None,
            marked: None,
            levels: None,
            level: None,
            grid_step: None,
            omega: None,
            mode: None,
            alternating_variant: None,
            output_dir: None,
            jobs: None,
            plot: false,
        };
        let a = resolve(&args).unwrap();
        let mut args_b = args.clone();
        args_b.output_dir = Some(PathBuf::from("elsewhere"));
        args_b.jobs = Some(2);
        args_b.plot = true;
        let b = resolve(&args_b).unwrap();
        assert_eq!(a.digest("sweep", &[]), b.digest("sweep", &[]));
        assert_ne!(a.digest("sweep", &[]), a.digest("heatmap", &[]));
        assert_ne!(
            a.digest("simulate", &[("phi", "1".into())]),
            a.digest("simulate", &[("phi", "2".into())])
        );
    }

    #[test]
    fn defaults_are_applied() {
        let args = CommonArgs {
            config: None,
            m: None,
            m_range: None,
            law: None,
            alpha_table: None,
            marked: None,
            levels: None,
            level: None,
            grid_step: None,
            omega: None,
            mode: None,
            alternating_variant: None,
            output_dir: None,
            jobs: None,
            plot: false,
        };
        let cfg = resolve(&args).unwrap();
        assert_eq!(cfg.ms, vec![6]);
        assert_eq!(cfg.law, DependenceLaw::Linear);
        assert_eq!(cfg.marked, 2);
        assert_eq!(cfg.levels.len(), 3);
        assert_eq!(cfg.omega, 0.9);
        assert_eq!(cfg.sweep_step(), 0.005);
        assert_eq!(cfg.heatmap_step(), 0.1);
    }
}
