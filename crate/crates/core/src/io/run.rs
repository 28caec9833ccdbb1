use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::checkpoint::{read_checkpoint, write_checkpoint};
use super::config::RunConfig;
use crate::analytic::{reference_rows, MtfModel};
use crate::error::{Error, Result};
use crate::gauge::default_reference_width;
use crate::grid::{size_grid, uniform_radii, Grid};
use crate::hartree::{initialize_orbitals, minimize, HartreeProblem, OrbitalSet, Termination, TraceEntry};
use crate::observables::{
    husimi_ll_filling, momentum_density, momentum_support_bound, radial_symmetry_fraction, tf_momentum_profile_mc,
    HusimiParams, HusimiResult, MomentumProfile,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// SHA-256 over the library sources this binary was built from.
pub const SOURCE_HASH: &str = env!("ANYON_SOURCE_HASH");

pub const SWEEP_CSV: &str = "sweep.csv";
pub const SWEEP_REPORT: &str = "sweep_report.json";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyReport {
    pub kinetic: f64,
    pub trap: f64,
    pub total: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FillingRow {
    pub level: u32,
    pub value: f64,
    pub normalized: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HusimiReport {
    pub width: f64,
    pub field: f64,
    pub center: [f64; 2],
    pub completeness: f64,
    pub bound: f64,
    pub fillings: Vec<FillingRow>,
}

impl HusimiReport {
    fn new(params: &HusimiParams, result: &HusimiResult) -> Self {
        Self {
            width: params.width,
            field: params.field,
            center: params.center,
            completeness: result.completeness,
            bound: result.bound(),
            fillings: result
                .fillings
                .iter()
                .map(|f| FillingRow { level: f.level, value: f.value, normalized: f.normalized })
                .collect(),
        }
    }
}

/// Everything needed to interpret and reproduce one solve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub alpha: f64,
    pub particles: usize,
    pub exponent: f64,
    pub grid_points: usize,
    pub box_length: f64,
    pub energy: EnergyReport,
    pub energy_over_n2: f64,
    pub mtf_energy_over_n2: f64,
    pub iterations: usize,
    /// `"converged"` or `"max_iterations"`.
    pub termination: String,
    pub gradient_norm: f64,
    pub wall_seconds: f64,
    /// Share of the density variance carried by its radial average.
    pub radial_symmetry: f64,
    pub momentum_mass: Option<f64>,
    pub husimi: Option<HusimiReport>,
    /// Files written for this run, the report itself last.
    pub files: Vec<PathBuf>,
    pub config: RunConfig,
    pub config_sha256: String,
    pub version: String,
    pub source_hash: String,
}

impl RunReport {
    pub fn converged(&self) -> bool {
        self.termination == "converged"
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub alpha: f64,
    pub mtf_energy_over_n2: f64,
    pub report: Option<RunReport>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub points: Vec<SweepPoint>,
    pub csv: PathBuf,
    pub config_sha256: String,
    pub version: String,
    pub source_hash: String,
}

impl SweepReport {
    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| p.error.is_some()).count()
    }
}

/// Directory holding the outputs of the run at `alpha`.
pub fn run_directory(config: &RunConfig, alpha: f64) -> PathBuf {
    config.output_dir.join(format!("alpha_{alpha}"))
}

/// `#`-prefixed provenance lines shared by every table.
pub fn preamble(config_hash: &str, description: &str) -> String {
    format!("# anyon-hartree {VERSION} source {SOURCE_HASH}\n# config_sha256 {config_hash}\n# {description}\n")
}

/// Width `sqrt(l_B R)` between the magnetic length of the central mTF field and the
/// cloud radius, and `floor(1/alpha) + 1` levels, unless given.
pub fn husimi_params(model: &MtfModel, width: Option<f64>, max_level: Option<u32>, center: [f64; 2]) -> Result<HusimiParams> {
    let field = model.central_field();
    if !(field > 0.0) {
        return Err(Error::InvalidInput("Landau levels need alpha > 0".into()));
    }
    let width = width.unwrap_or_else(|| (model.radius / field.sqrt()).sqrt());
    let max_level = max_level.unwrap_or((1.0 / model.alpha).floor() as u32 + 1);
    let reference_density = model.density(center);
    if !(reference_density > 0.0) {
        return Err(Error::InvalidInput(format!("center {center:?} lies outside the mTF support")));
    }
    Ok(HusimiParams { width, field, center, max_level, reference_density })
}

fn check_window(grid: &Grid, params: &HusimiParams) -> Result<()> {
    let reach = 5.0 * params.width;
    let half = grid.box_length() / 2.0;
    let fits = params.center.iter().all(|c| c - reach >= -half && c + reach <= half - grid.spacing());
    if fits {
        Ok(())
    } else {
        Err(Error::WindowOutsideBox { radius: reach, cx: params.center[0], cy: params.center[1] })
    }
}

pub fn profile_csv(preamble: &str, abscissae: &[f64], values: &[f64], errors: Option<&[f64]>) -> String {
    let mut out = String::from(preamble);
    out.push_str("r_or_p,value,stderr_if_mc\n");
    for (i, (x, v)) in abscissae.iter().zip(values).enumerate() {
        match errors {
            Some(e) => writeln!(out, "{x},{v},{}", e[i]),
            None => writeln!(out, "{x},{v},"),
        }
        .expect("string write");
    }
    out
}

pub fn momentum_profile_csv(preamble: &str, profile: &MomentumProfile) -> String {
    profile_csv(preamble, &profile.momenta, &profile.values, profile.errors.as_deref())
}

pub fn husimi_csv(preamble: &str, alpha: f64, result: &HusimiResult) -> String {
    let mut out = String::from(preamble);
    out.push_str("alpha,n,m_raw,m_normalized\n");
    for f in &result.fillings {
        writeln!(out, "{alpha},{},{},{}", f.level, f.value, f.normalized).expect("string write");
    }
    out
}

pub fn trace_csv(preamble: &str, trace: &[TraceEntry]) -> String {
    let mut out = String::from(preamble);
    out.push_str("iteration,energy,gradient_norm,step\n");
    for t in trace {
        writeln!(out, "{},{},{},{}", t.iteration, t.energy, t.gradient_norm, t.step).expect("string write");
    }
    out
}

/// Table with columns `alpha,c_minus_1,bound_quarter_alpha_sq,lambda,E_over_N2`.
pub fn reference_table(alphas: &[f64], exponent: f64) -> Result<String> {
    let mut out = format!("# anyon-hartree {VERSION} source {SOURCE_HASH}\n# magnetic Thomas-Fermi constants, trap exponent {exponent}\n");
    out.push_str("alpha,c_minus_1,bound_quarter_alpha_sq,lambda,E_over_N2\n");
    for row in reference_rows(alphas, exponent)? {
        writeln!(
            out,
            "{},{},{},{},{}",
            row.alpha,
            row.constant - 1.0,
            row.alpha * row.alpha / 4.0,
            row.chemical_potential,
            row.energy_over_n2
        )
        .expect("string write");
    }
    Ok(out)
}

fn write_file(path: &Path, contents: &str, files: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(path, contents)?;
    files.push(path.to_path_buf());
    Ok(())
}

/// Solves for the single alpha of `config` and writes its tables, checkpoint and report.
pub fn run_solve(config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    let [alpha] = config.alphas[..] else {
        return Err(Error::InvalidInput(format!("solve needs exactly one alpha, got {}", config.alphas.len())));
    };
    let start = Instant::now();
    let n = config.particles;
    let sizing = size_grid(n, alpha, config.exponent, config.q_x, config.q_p, config.max_points)?;
    let grid = &sizing.grid;
    let model = MtfModel::new(n as f64, alpha, config.exponent)?;
    let obs = &config.observables;
    let husimi = if obs.husimi && alpha > 0.0 {
        let params = husimi_params(&model, obs.husimi_width, obs.husimi_levels, [0.0, 0.0])?;
        check_window(grid, &params)?;
        Some(params)
    } else {
        if obs.husimi {
            log::warn!("skipping Husimi fillings at alpha = 0");
        }
        None
    };

    let width = config.solver.reference_width.unwrap_or_else(|| default_reference_width(sizing.support_radius));
    let problem = HartreeProblem::power_trap(grid, config.exponent, alpha, n, width)?;
    let initial = match &config.checkpoint_in {
        Some(path) => load_start(path, grid, n, alpha, config.exponent)?,
        None => initialize_orbitals(&problem, config.solver.init_mode(), config.seed)?,
    };

    let dir = run_directory(config, alpha);
    fs::create_dir_all(&dir)?;
    let checkpoint_path = dir.join("checkpoint.anyh");
    let every = config.checkpoint_every;
    log::info!("alpha = {alpha}: M = {}, L = {:.4}", grid.points(), grid.box_length());
    let outcome = minimize(&problem, initial, &config.solver.params(), |orbitals, entry| {
        log::debug!("iter {} E = {} |g|/N = {:e}", entry.iteration, entry.energy, entry.gradient_norm);
        if every > 0 && entry.iteration > 0 && entry.iteration % every == 0 {
            write_checkpoint(&checkpoint_path, orbitals, alpha, config.exponent)?;
        }
        Ok(())
    })?;

    let hash = config.hash();
    let mut files = Vec::new();
    write_checkpoint(&checkpoint_path, &outcome.orbitals, alpha, config.exponent)?;
    files.push(checkpoint_path);
    write_file(
        &dir.join("trace.csv"),
        &trace_csv(&preamble(&hash, &format!("minimizer trace, N = {n}, alpha = {alpha}")), &outcome.trace),
        &mut files,
    )?;

    let density = outcome.orbitals.density();
    if obs.position_profile {
        let radii = uniform_radii(obs.radial_points, grid.box_length() / 2.0);
        let profile = grid.radial_average(&density, &radii)?;
        let pre = preamble(&hash, &format!("radial density rho(r), N = {n}, alpha = {alpha}"));
        write_file(&dir.join("position_profile.csv"), &profile_csv(&pre, &radii, &profile.values, None), &mut files)?;
    }
    let mut momentum_mass = None;
    if obs.momentum {
        let t = momentum_density(&outcome.orbitals);
        momentum_mass = Some(t.mass());
        let momenta = uniform_radii(obs.momentum_points, t.grid().box_length() / 2.0);
        let profile = t.radial_profile(&momenta)?;
        let pre = preamble(&hash, &format!("radial momentum density t(p), N = {n}, alpha = {alpha}"));
        write_file(&dir.join("momentum_profile.csv"), &momentum_profile_csv(&pre, &profile), &mut files)?;
    }
    if obs.mc_samples > 0 {
        let momenta = uniform_radii(obs.momentum_points, 1.05 * momentum_support_bound(&model));
        let profile = tf_momentum_profile_mc(&model, &momenta, obs.mc_samples, config.seed)?;
        let pre = preamble(
            &hash,
            &format!("semiclassical mTF momentum density, {} samples per point, seed {}", obs.mc_samples, config.seed),
        );
        write_file(&dir.join("momentum_mtf_mc.csv"), &momentum_profile_csv(&pre, &profile), &mut files)?;
    }
    let mut husimi_report = None;
    if let Some(params) = husimi {
        let result = husimi_ll_filling(&outcome.orbitals, &params)?;
        let pre = preamble(
            &hash,
            &format!(
                "Landau-level fillings at the center, width {}, field {}, normalized by the mTF density {}",
                params.width, params.field, params.reference_density
            ),
        );
        write_file(&dir.join("husimi.csv"), &husimi_csv(&pre, alpha, &result), &mut files)?;
        husimi_report = Some(HusimiReport::new(&params, &result));
    }

    let n2 = (n * n) as f64;
    let report_path = dir.join("report.json");
    files.push(report_path.clone());
    let report = RunReport {
        alpha,
        particles: n,
        exponent: config.exponent,
        grid_points: grid.points(),
        box_length: grid.box_length(),
        energy: EnergyReport {
            kinetic: outcome.energy.kinetic,
            trap: outcome.energy.trap,
            total: outcome.energy.total,
        },
        energy_over_n2: outcome.energy.total / n2,
        mtf_energy_over_n2: model.energy_per_particle_squared(),
        iterations: outcome.iterations,
        termination: match outcome.termination {
            Termination::Converged => "converged",
            Termination::MaxIterations => "max_iterations",
        }
        .into(),
        gradient_norm: outcome.gradient_norm,
        wall_seconds: start.elapsed().as_secs_f64(),
        radial_symmetry: radial_symmetry_fraction(grid, &density)?,
        momentum_mass,
        husimi: husimi_report,
        files,
        config: config.clone(),
        config_sha256: hash,
        version: VERSION.into(),
        source_hash: SOURCE_HASH.into(),
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    fs::write(&report_path, json)?;
    Ok(report)
}

fn load_start(path: &Path, grid: &Grid, particles: usize, alpha: f64, exponent: f64) -> Result<OrbitalSet> {
    let cp = read_checkpoint(path)?;
    let g = cp.orbitals.grid();
    let mut problems = Vec::new();
    if g.points() != grid.points() || g.box_length() != grid.box_length() {
        problems.push(format!(
            "grid {} x {} on L = {} differs from the configured {} x {} on L = {}",
            g.points(),
            g.points(),
            g.box_length(),
            grid.points(),
            grid.points(),
            grid.box_length()
        ));
    }
    if cp.orbitals.count() != particles {
        problems.push(format!("{} orbitals, configuration has N = {particles}", cp.orbitals.count()));
    }
    if cp.alpha != alpha || cp.exponent != exponent {
        problems.push(format!(
            "alpha = {}, s = {} differ from the configured alpha = {alpha}, s = {exponent}",
            cp.alpha, cp.exponent
        ));
    }
    if !problems.is_empty() {
        return Err(Error::Checkpoint(format!("{} does not match: {}", path.display(), problems.join("; "))));
    }
    // rebuild on the configured grid so downstream grid comparisons are by value
    OrbitalSet::from_raw(grid, particles, cp.orbitals.into_data())
}

/// Runs every alpha of `config`; a failing point is recorded and the sweep continues.
pub fn run_sweep(config: &RunConfig) -> Result<SweepReport> {
    config.validate()?;
    fs::create_dir_all(&config.output_dir)?;
    let solve_point = |&alpha: &f64| -> SweepPoint {
        let mtf = MtfModel::new(config.particles as f64, alpha, config.exponent)
            .map(|m| m.energy_per_particle_squared())
            .unwrap_or(f64::NAN);
        match run_solve(&config.for_alpha(alpha)) {
            Ok(report) => SweepPoint { alpha, mtf_energy_over_n2: mtf, report: Some(report), error: None },
            Err(e) => {
                log::error!("alpha = {alpha}: {e}");
                SweepPoint { alpha, mtf_energy_over_n2: mtf, report: None, error: Some(e.to_string()) }
            }
        }
    };
    let points: Vec<SweepPoint> = if config.parallel_sweep {
        config.alphas.par_iter().map(solve_point).collect()
    } else {
        config.alphas.iter().map(solve_point).collect()
    };

    let hash = config.hash();
    let mut csv = preamble(
        &hash,
        &format!("energy sweep, N = {}, s = {}, empty fields mark failed points", config.particles, config.exponent),
    );
    csv.push_str("alpha,E_over_N2,E_mtf_over_N2,iterations,wall_s\n");
    for p in &points {
        match &p.report {
            Some(r) => {
                let wall = if config.record_wall_time { r.wall_seconds.to_string() } else { String::new() };
                writeln!(csv, "{},{},{},{},{wall}", p.alpha, r.energy_over_n2, p.mtf_energy_over_n2, r.iterations)
            }
            None => writeln!(csv, "{},,{},,", p.alpha, p.mtf_energy_over_n2),
        }
        .expect("string write");
    }
    let csv_path = config.output_dir.join(SWEEP_CSV);
    fs::write(&csv_path, csv)?;
    let report = SweepReport {
        points,
        csv: csv_path,
        config_sha256: hash,
        version: VERSION.into(),
        source_hash: SOURCE_HASH.into(),
    };
    fs::write(
        config.output_dir.join(SWEEP_REPORT),
        serde_json::to_string_pretty(&report).expect("report serializes"),
    )?;
    Ok(report)
}
