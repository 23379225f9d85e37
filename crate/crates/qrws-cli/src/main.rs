//! `qrws` — experiment harness for quantum-random-walk search on the
//! hypercube. Orchestrates simulations, phase sweeps, robustness and
//! regression analyses and emits deterministic CSV/JSON artifacts.

mod artifacts;
mod config;
mod error;
mod golden;
mod plot;
mod report;

use clap::{Parser, Subcommand};

use qrws::coin::zeta_of_phi;
use qrws::hill::{
    epsilon_tilde, hill_eval, hill_fit, secondary_fit, KappaVariant, SecondaryFit,
};
use qrws::neighborhood::aggregate;
use qrws::robustness::{
    default_phi_grid, lambda_report, robustness_epsilon, sweep_heatmap, sweep_phi, NeighborLevel,
    PhiSweep, ProbabilityCurve, SweepRow,
};
use qrws::walk::{self, RunConfig};

use artifacts::{fmt_float, SCHEMA_VERSION};
use config::{parse_angle, CommonArgs, Config};
use error::{CliError, Result};

#[derive(Parser)]
#[command(
    name = "qrws",
    version,
    about = "Quantum-random-walk search on the hypercube: simulation, sweeps, robustness and regression artifacts",
    after_help = "Exit codes: 0 success, 1 invalid configuration or input, 2 numerical failure, 3 missing artifact."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one search; write distribution, trace and a run summary.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Coin phase φ (radians or multiples of pi, e.g. `pi`, `2pi/3`).
        #[arg(long, default_value = "pi")]
        phi: String,
        /// Override ζ instead of deriving it from the law.
        #[arg(long)]
        zeta: Option<String>,
        /// Override the iteration budget.
        #[arg(long)]
        iterations: Option<usize>,
    },
    /// Sweep φ with ζ following the configured law; write the sweep CSV.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Decoupled (φ, ζ) scan of the marked-node probability.
    Heatmap {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Stability windows ε at threshold Ω from an archived sweep.
    Robustness {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Hill regression of success-probability curves from an archived sweep.
    Fit {
        #[command(flatten)]
        common: CommonArgs,
        /// Lower window bound (exclusive); both bounds or neither.
        #[arg(long)]
        window_lo: Option<String>,
        /// Upper window bound (exclusive).
        #[arg(long)]
        window_hi: Option<String>,
    },
    /// Cross-size regression of the Hill parameters from archived fits.
    SecondaryFit {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Predict Hill parameters and ε̃ at a register size from a secondary fit.
    Extrapolate {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Neighbor-gain curves λ₁, λ₂ and their interval averages.
    Lambda {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Compare artifacts against the embedded reference values.
    Report {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn main() {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.exit_code());
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    let common = match &cli.command {
        Command::Simulate { common, .. }
        | Command::Sweep { common }
        | Command::Heatmap { common }
        | Command::Robustness { common }
        | Command::Fit { common, .. }
        | Command::SecondaryFit { common }
        | Command::Extrapolate { common }
        | Command::Lambda { common }
        | Command::Report { common } => common,
    };
    let cfg = config::resolve(common)?;
    if let Some(jobs) = cfg.jobs {
        // Ignore the error: the pool can only be installed once per process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    artifacts::ensure_dir(&cfg.output_dir)?;

    match &cli.command {
        Command::Simulate {
            phi,
            zeta,
            iterations,
            ..
        } => cmd_simulate(&cfg, phi, zeta.as_deref(), *iterations),
        Command::Sweep { .. } => cmd_sweep(&cfg),
        Command::Heatmap { .. } => cmd_heatmap(&cfg),
        Command::Robustness { .. } => cmd_robustness(&cfg),
        Command::Fit {
            window_lo,
            window_hi,
            ..
        } => cmd_fit(&cfg, window_lo.as_deref(), window_hi.as_deref()),
        Command::SecondaryFit { .. } => cmd_secondary_fit(&cfg),
        Command::Extrapolate { .. } => cmd_extrapolate(&cfg),
        Command::Lambda { .. } => cmd_lambda(&cfg),
        Command::Report { .. } => report::cmd_report(&cfg),
    }
}

fn cmd_simulate(
    cfg: &Config,
    phi_text: &str,
    zeta_text: Option<&str>,
    iterations: Option<usize>,
) -> Result<i32> {
    let phi = parse_angle(phi_text)?;
    let hash = cfg.digest(
        "simulate",
        &[
            ("phi", phi_text.to_string()),
            ("zeta", zeta_text.unwrap_or("").to_string()),
            (
                "iterations",
                iterations.map(|k| k.to_string()).unwrap_or_default(),
            ),
        ],
    );
    for &m in &cfg.ms {
        let alpha = cfg.alpha_for(m)?;
        let zeta = match zeta_text {
            Some(text) => parse_angle(text)?,
            None => zeta_of_phi(cfg.law, phi, alpha)?,
        };
        let run_config = RunConfig::new(m, vec![cfg.marked], phi, zeta)
            .with_iterations(iterations)
            .with_mode(cfg.mode)
            .with_variant(cfg.variant);
        let out = walk::run(&run_config)?;
        let agg = aggregate(&out.distribution, cfg.marked, m)?;

        let dir = &cfg.output_dir;
        artifacts::write_csv(
            &artifacts::distribution_path(dir, m, cfg.law, cfg.mode),
            &hash,
            artifacts::DISTRIBUTION_HEADER,
            out.distribution
                .iter()
                .enumerate()
                .map(|(node, p)| format!("{node},{}", fmt_float(*p))),
        )?;
        artifacts::write_csv(
            &artifacts::trace_path(dir, m, cfg.law, cfg.mode),
            &hash,
            artifacts::TRACE_HEADER,
            out.trace
                .iter()
                .enumerate()
                .map(|(i, p)| format!("{},{}", i + 1, fmt_float(*p))),
        )?;
        let summary = artifacts::RunSummary {
            schema_version: SCHEMA_VERSION,
            config_hash: hash.clone(),
            m,
            law: cfg.law,
            mode: cfg.mode,
            marked: cfg.marked,
            phi,
            zeta,
            iterations_run: out.iterations_run,
            oracle_calls: out.oracle_calls,
            p_w: agg.p_w(),
            p_f: agg.p_f(),
            p_s: agg.p_s(),
            p_marked: agg.p_marked,
            p_first_sum: agg.p_first_sum,
            p_second_sum: agg.p_second_sum,
            residue: agg.residue,
            shell_counts: agg.counts,
        };
        artifacts::write_json(&artifacts::run_summary_path(dir, m, cfg.law, cfg.mode), &summary)?;
        println!(
            "m={m} law={} phi={:.6} zeta={:.6} p_w={:.6} k={} oracle_calls={}",
            cfg.law.cli_name(),
            phi,
            zeta,
            summary.p_w,
            out.iterations_run,
            out.oracle_calls
        );
    }
    Ok(0)
}

fn cmd_sweep(cfg: &Config) -> Result<i32> {
    let step = cfg.sweep_step();
    let grid = default_phi_grid::<f64>(step)?;
    let hash = cfg.digest("sweep", &[("step", fmt_float(step))]);
    for &m in &cfg.ms {
        let alpha = cfg.alpha_for(m)?;
        let sweep = sweep_phi(m, cfg.marked, cfg.law, alpha, &grid)?;
        let path = artifacts::sweep_path(&cfg.output_dir, m, cfg.law);
        artifacts::write_csv(
            &path,
            &hash,
            artifacts::SWEEP_HEADER,
            sweep.rows.iter().map(|r| {
                format!(
                    "{},{},{},{},{}",
                    fmt_float(r.phi),
                    fmt_float(r.zeta),
                    fmt_float(r.p_w),
                    fmt_float(r.p_f),
                    fmt_float(r.p_s)
                )
            }),
        )?;
        println!("wrote {} ({} rows)", path.display(), sweep.rows.len());
        if cfg.plot {
            let xs: Vec<f64> = sweep.rows.iter().map(|r| r.phi).collect();
            plot::line_plot(
                &path.with_extension("svg"),
                &format!("phase sweep, m={m}, law={}", cfg.law.cli_name()),
                "phi",
                "success probability",
                &xs,
                &[
                    ("p_w", sweep.rows.iter().map(|r| r.p_w).collect()),
                    ("p_f", sweep.rows.iter().map(|r| r.p_f).collect()),
                    ("p_s", sweep.rows.iter().map(|r| r.p_s).collect()),
                ],
            )?;
        }
    }
    Ok(0)
}

fn heatmap_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step < std::f64::consts::PI) {
        return Err(CliError::Config(format!(
            "grid-step {step} outside (0, pi)"
        )));
    }
    let mut grid = Vec::new();
    let mut k = 0usize;
    loop {
        let value = k as f64 * step;
        if value >= 2.0 * std::f64::consts::PI {
            break;
        }
        grid.push(value);
        k += 1;
    }
    Ok(grid)
}

fn cmd_heatmap(cfg: &Config) -> Result<i32> {
    let step = cfg.heatmap_step();
    let grid = heatmap_grid(step)?;
    let hash = cfg.digest("heatmap", &[("step", fmt_float(step))]);
    for &m in &cfg.ms {
        let cells = sweep_heatmap(m, cfg.marked, &grid, &grid)?;
        let path = artifacts::heatmap_path(&cfg.output_dir, m);
        artifacts::write_csv(
            &path,
            &hash,
            artifacts::HEATMAP_HEADER,
            cells.iter().map(|c| {
                format!(
                    "{},{},{}",
                    fmt_float(c.phi),
                    fmt_float(c.zeta),
                    fmt_float(c.p_w)
                )
            }),
        )?;
        println!("wrote {} ({} cells)", path.display(), cells.len());
        if cfg.plot {
            let values: Vec<Vec<f64>> = (0..grid.len())
                .map(|i| (0..grid.len()).map(|j| cells[i * grid.len() + j].p_w).collect())
                .collect();
            plot::heatmap_plot(
                &path.with_extension("svg"),
                &format!("marked-node probability, m={m}"),
                "phi",
                "zeta",
                &grid,
                &grid,
                &values,
            )?;
        }
    }
    Ok(0)
}

fn level_column(level: NeighborLevel) -> &'static str {
    match level {
        NeighborLevel::Walk => "p_w",
        NeighborLevel::First => "p_f",
        NeighborLevel::Second => "p_s",
    }
}

fn read_sweep_curves(
    cfg: &Config,
    m: usize,
) -> Result<(Vec<f64>, artifacts::CsvTable)> {
    let path = artifacts::sweep_path(&cfg.output_dir, m, cfg.law);
    let table = artifacts::read_csv(&path, artifacts::SWEEP_HEADER, "sweep")?;
    let phis = table.column("phi").ok_or_else(|| CliError::Schema {
        path: path.clone(),
        row: 3,
        message: "phi column missing".into(),
    })?;
    Ok((phis, table))
}

fn cmd_robustness(cfg: &Config) -> Result<i32> {
    let hash = cfg.digest("robustness", &[]);
    for &m in &cfg.ms {
        let (phis, table) = read_sweep_curves(cfg, m)?;
        for &level in &cfg.levels {
            let values = table.column(level_column(level)).unwrap();
            let curve = ProbabilityCurve::new(m, cfg.law, level, phis.clone(), values)?;
            let rep = robustness_epsilon(&curve, cfg.omega)?;
            let artifact = artifacts::RobustnessArtifact {
                schema_version: SCHEMA_VERSION,
                config_hash: hash.clone(),
                m,
                law: cfg.law,
                level,
                omega: cfg.omega,
                phi_max: rep.phi_max,
                p_max: rep.p_max,
                epsilon: rep.epsilon,
            };
            artifacts::write_json(
                &artifacts::robustness_path(&cfg.output_dir, m, cfg.law, level),
                &artifact,
            )?;
            println!(
                "m={m} law={} level={}: epsilon={} phi_max={:.6} p_max={:.6}",
                cfg.law.cli_name(),
                level.cli_name(),
                rep.epsilon,
                rep.phi_max,
                rep.p_max
            );
        }
    }
    Ok(0)
}

fn cmd_fit(cfg: &Config, window_lo: Option<&str>, window_hi: Option<&str>) -> Result<i32> {
    let window = match (window_lo, window_hi) {
        (Some(lo), Some(hi)) => Some((parse_angle(lo)?, parse_angle(hi)?)),
        (None, None) => None,
        _ => {
            return Err(CliError::Config(
                "pass both --window-lo and --window-hi, or neither".into(),
            ))
        }
    };
    let hash = cfg.digest(
        "fit",
        &[
            ("window_lo", window_lo.unwrap_or("").to_string()),
            ("window_hi", window_hi.unwrap_or("").to_string()),
        ],
    );
    for &m in &cfg.ms {
        let (phis, table) = read_sweep_curves(cfg, m)?;
        for &level in &cfg.levels {
            let values = table.column(level_column(level)).unwrap();
            let curve = ProbabilityCurve::new(m, cfg.law, level, phis.clone(), values)?;
            let fit = hill_fit(&curve, window)?;
            if fit.exceeds_nominal_height {
                eprintln!(
                    "warning: m={m} {} {}: fitted height {:.4} exceeds the nominal bound 1.05",
                    cfg.law.cli_name(),
                    level.cli_name(),
                    fit.b
                );
            }
            let artifact = artifacts::FitArtifact {
                schema_version: SCHEMA_VERSION,
                config_hash: hash.clone(),
                law: cfg.law,
                level,
                m,
                b: fit.b,
                kappa: fit.kappa,
                eta: fit.eta,
                sigma: fit.sigma,
                window: [fit.window.0, fit.window.1],
                samples: fit.samples,
                exceeds_nominal_height: fit.exceeds_nominal_height,
            };
            artifacts::write_json(
                &artifacts::fit_path(&cfg.output_dir, m, cfg.law, level),
                &artifact,
            )?;
            println!(
                "m={m} law={} level={}: b={:.6} kappa={:.6} eta={:.6} sigma={:.6} ({} samples)",
                cfg.law.cli_name(),
                level.cli_name(),
                fit.b,
                fit.kappa,
                fit.eta,
                fit.sigma,
                fit.samples
            );
        }
    }
    Ok(0)
}

fn variant_name(variant: KappaVariant) -> &'static str {
    match variant {
        KappaVariant::ExponentialPower => "exponential-power",
        KappaVariant::PowerOffset => "power-offset",
        KappaVariant::PurePower => "pure-power",
    }
}

fn variant_from_name(name: &str) -> Option<KappaVariant> {
    match name {
        "exponential-power" => Some(KappaVariant::ExponentialPower),
        "power-offset" => Some(KappaVariant::PowerOffset),
        "pure-power" => Some(KappaVariant::PurePower),
        _ => None,
    }
}

fn cmd_secondary_fit(cfg: &Config) -> Result<i32> {
    if cfg.ms.len() < 5 {
        return Err(CliError::Config(format!(
            "secondary-fit needs at least 5 register sizes (--m-range lo:hi), got {}",
            cfg.ms.len()
        )));
    }
    let hash = cfg.digest("secondary-fit", &[]);
    for &level in &cfg.levels {
        let mut bs = Vec::new();
        let mut kappas = Vec::new();
        let mut etas = Vec::new();
        for &m in &cfg.ms {
            let path = artifacts::fit_path(&cfg.output_dir, m, cfg.law, level);
            let fit: artifacts::FitArtifact = artifacts::read_json(&path, "fit")?;
            bs.push(fit.b);
            kappas.push(fit.kappa);
            etas.push(fit.eta);
        }
        let fit = secondary_fit(&cfg.ms, &bs, &kappas, &etas)?;
        let entries = vec![
            artifacts::SecondaryEntry {
                law: cfg.law,
                level,
                param: "b".into(),
                c1: fit.b_coeffs[0],
                c2: fit.b_coeffs[1],
                c3: 0.0,
                c4: 0.0,
                frozen: vec!["c3".into(), "c4".into()],
                sigma: fit.b_sigma,
                variant: None,
            },
            artifacts::SecondaryEntry {
                law: cfg.law,
                level,
                param: "kappa".into(),
                c1: fit.kappa_coeffs[0],
                c2: fit.kappa_coeffs[1],
                c3: fit.kappa_coeffs[2],
                c4: fit.kappa_coeffs[3],
                frozen: fit
                    .kappa_variant
                    .frozen()
                    .iter()
                    .map(|s| s.to_string())
                    .collect(),
                sigma: fit.kappa_sigma,
                variant: Some(variant_name(fit.kappa_variant).to_string()),
            },
            artifacts::SecondaryEntry {
                law: cfg.law,
                level,
                param: "eta".into(),
                c1: fit.eta_coeffs[0],
                c2: fit.eta_coeffs[1],
                c3: fit.eta_coeffs[2],
                c4: 0.0,
                frozen: vec!["c4".into()],
                sigma: fit.eta_sigma,
                variant: None,
            },
        ];
        let artifact = artifacts::SecondaryArtifact {
            schema_version: SCHEMA_VERSION,
            config_hash: hash.clone(),
            law: cfg.law,
            level,
            ms: cfg.ms.clone(),
            entries,
        };
        artifacts::write_json(
            &artifacts::secondary_path(&cfg.output_dir, cfg.law, level),
            &artifact,
        )?;
        println!(
            "law={} level={}: kappa variant {} (sigma {:.6}); b sigma {:.6}; eta sigma {:.6}",
            cfg.law.cli_name(),
            level.cli_name(),
            variant_name(fit.kappa_variant),
            fit.kappa_sigma,
            fit.b_sigma,
            fit.eta_sigma
        );
    }
    Ok(0)
}

fn secondary_from_artifact(
    path: &std::path::Path,
    artifact: &artifacts::SecondaryArtifact,
) -> Result<SecondaryFit<f64>> {
    let entry = |param: &str| -> Result<&artifacts::SecondaryEntry> {
        artifact
            .entries
            .iter()
            .find(|e| e.param == param)
            .ok_or_else(|| CliError::Artifact {
                path: path.to_path_buf(),
                message: format!("no `{param}` entry"),
            })
    };
    let b = entry("b")?;
    let kappa = entry("kappa")?;
    let eta = entry("eta")?;
    let variant = kappa
        .variant
        .as_deref()
        .and_then(variant_from_name)
        .ok_or_else(|| CliError::Artifact {
            path: path.to_path_buf(),
            message: "kappa entry lacks a valid variant".into(),
        })?;
    Ok(SecondaryFit {
        ms: artifact.ms.clone(),
        b_coeffs: [b.c1, b.c2],
        b_sigma: b.sigma,
        eta_coeffs: [eta.c1, eta.c2, eta.c3],
        eta_sigma: eta.sigma,
        kappa_coeffs: [kappa.c1, kappa.c2, kappa.c3, kappa.c4],
        kappa_sigma: kappa.sigma,
        kappa_variant: variant,
    })
}

fn cmd_extrapolate(cfg: &Config) -> Result<i32> {
    let hash = cfg.digest("extrapolate", &[]);
    for &level in &cfg.levels {
        let path = artifacts::secondary_path(&cfg.output_dir, cfg.law, level);
        let artifact: artifacts::SecondaryArtifact =
            artifacts::read_json(&path, "secondary-fit")?;
        let secondary = secondary_from_artifact(&path, &artifact)?;
        for &m in &cfg.ms {
            let params = qrws::hill::extrapolate(&secondary, m)?;
            let eps = epsilon_tilde(params.kappa, params.eta, cfg.omega)?;
            let b_raw = params.b;
            let b_used = if b_raw > 1.0 {
                eprintln!(
                    "note: m={m} {} {}: predicted height {b_raw:.4} clamped to 1.0 for the prognosis curve",
                    cfg.law.cli_name(),
                    level.cli_name()
                );
                1.0
            } else if b_raw <= 0.0 {
                return Err(CliError::Qrws(qrws::QrwsError::FitFailure(format!(
                    "height law drops to {b_raw} at m = {m}; outside its validity range"
                ))));
            } else {
                b_raw
            };
            let out = artifacts::ExtrapolateArtifact {
                schema_version: SCHEMA_VERSION,
                config_hash: hash.clone(),
                law: cfg.law,
                level,
                m,
                b_raw,
                b: b_used,
                kappa: params.kappa,
                eta: params.eta,
                omega: cfg.omega,
                epsilon_tilde: eps,
            };
            artifacts::write_json(
                &artifacts::extrapolate_path(&cfg.output_dir, m, cfg.law, level),
                &out,
            )?;
            let grid = default_phi_grid::<f64>(cfg.sweep_step())?;
            let prog_path = artifacts::prognosis_path(&cfg.output_dir, m, cfg.law, level);
            artifacts::write_csv(
                &prog_path,
                &hash,
                artifacts::PROGNOSIS_HEADER,
                grid.iter().map(|&phi| {
                    format!(
                        "{},{}",
                        fmt_float(phi),
                        fmt_float(hill_eval(b_used, params.kappa, params.eta, phi))
                    )
                }),
            )?;
            if cfg.plot {
                let ys: Vec<f64> = grid
                    .iter()
                    .map(|&phi| hill_eval(b_used, params.kappa, params.eta, phi))
                    .collect();
                plot::line_plot(
                    &prog_path.with_extension("svg"),
                    &format!(
                        "prognosis, m={m}, law={}, level={}",
                        cfg.law.cli_name(),
                        level.cli_name()
                    ),
                    "phi",
                    "predicted probability",
                    &grid,
                    &[("prediction", ys)],
                )?;
            }
            println!(
                "m={m} law={} level={}: b={:.6} kappa={:.6} eta={:.6} epsilon_tilde={:.6}",
                cfg.law.cli_name(),
                level.cli_name(),
                b_used,
                params.kappa,
                params.eta,
                eps
            );
        }
    }
    Ok(0)
}

fn cmd_lambda(cfg: &Config) -> Result<i32> {
    let hash = cfg.digest("lambda", &[]);
    for &m in &cfg.ms {
        let sweep_file = artifacts::sweep_path(&cfg.output_dir, m, cfg.law);
        let sweep: PhiSweep<f64> = if sweep_file.exists() {
            let table = artifacts::read_csv(&sweep_file, artifacts::SWEEP_HEADER, "sweep")?;
            let rows = table
                .rows
                .iter()
                .map(|r| SweepRow {
                    phi: r[0],
                    zeta: r[1],
                    p_w: r[2],
                    p_f: r[3],
                    p_s: r[4],
                })
                .collect();
            PhiSweep {
                m,
                law: cfg.law,
                marked: cfg.marked,
                rows,
            }
        } else {
            let grid = default_phi_grid::<f64>(cfg.sweep_step())?;
            let alpha = cfg.alpha_for(m)?;
            let sweep = sweep_phi(m, cfg.marked, cfg.law, alpha, &grid)?;
            artifacts::write_csv(
                &sweep_file,
                &cfg.digest("sweep", &[("step", fmt_float(cfg.sweep_step()))]),
                artifacts::SWEEP_HEADER,
                sweep.rows.iter().map(|r| {
                    format!(
                        "{},{},{},{},{}",
                        fmt_float(r.phi),
                        fmt_float(r.zeta),
                        fmt_float(r.p_w),
                        fmt_float(r.p_f),
                        fmt_float(r.p_s)
                    )
                }),
            )?;
            sweep
        };
        let (lam, rob) = lambda_report(&sweep, cfg.omega)?;
        let csv_path = artifacts::lambda_csv_path(&cfg.output_dir, m, cfg.law);
        artifacts::write_csv(
            &csv_path,
            &hash,
            artifacts::LAMBDA_HEADER,
            lam.curves
                .phis
                .iter()
                .zip(lam.curves.lambda1.iter().zip(&lam.curves.lambda2))
                .map(|(&phi, (l1, l2))| {
                    let fmt_opt =
                        |v: &Option<f64>| v.map(fmt_float).unwrap_or_default();
                    format!("{},{},{}", fmt_float(phi), fmt_opt(l1), fmt_opt(l2))
                }),
        )?;
        let artifact = artifacts::LambdaArtifact {
            schema_version: SCHEMA_VERSION,
            config_hash: hash.clone(),
            m,
            law: cfg.law,
            omega: cfg.omega,
            epsilon: rob.epsilon,
            capital_lambda1: lam.capital_lambda1,
            capital_lambda2: lam.capital_lambda2,
            interval: [lam.interval.0, lam.interval.1],
        };
        artifacts::write_json(
            &artifacts::lambda_json_path(&cfg.output_dir, m, cfg.law),
            &artifact,
        )?;
        println!(
            "m={m} law={}: Lambda1={:.7e} Lambda2={:.7e} epsilon={}",
            cfg.law.cli_name(),
            lam.capital_lambda1,
            lam.capital_lambda2,
            rob.epsilon
        );
        if cfg.plot {
            let to_nan = |v: &Option<f64>| v.unwrap_or(f64::NAN);
            plot::line_plot(
                &csv_path.with_extension("svg"),
                &format!("neighbor gain, m={m}, law={}", cfg.law.cli_name()),
                "phi",
                "lambda",
                &lam.curves.phis,
                &[
                    ("lambda1", lam.curves.lambda1.iter().map(to_nan).collect()),
                    ("lambda2", lam.curves.lambda2.iter().map(to_nan).collect()),
                ],
            )?;
        }
    }
    Ok(0)
}
