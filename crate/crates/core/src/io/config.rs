use std::path::PathBuf;

use serde::Serialize;
use sha2::{Digest, Sha256};
use toml::{Table, Value};

use super::run::husimi_params;
use crate::analytic::MtfModel;
use crate::error::{Error, Result};
use crate::grid::{planned_points, DEFAULT_MAX_POINTS};
use crate::hartree::{InitMode, SolverParams};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverConfig {
    pub history: usize,
    pub gradient_tolerance: f64,
    pub max_iterations: usize,
    pub armijo: f64,
    pub backtrack: f64,
    pub max_backtracks: usize,
    pub precondition: bool,
    /// `"linear"` or `"random"`.
    pub init: String,
    /// Width of the Gaussian reference density; half the mTF radius when absent.
    pub reference_width: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let p = SolverParams::default();
        Self {
            history: p.history,
            gradient_tolerance: p.gradient_tolerance,
            max_iterations: p.max_iterations,
            armijo: p.armijo,
            backtrack: p.backtrack,
            max_backtracks: p.max_backtracks,
            precondition: p.precondition,
            init: "linear".into(),
            reference_width: None,
        }
    }
}

impl SolverConfig {
    pub fn params(&self) -> SolverParams {
        SolverParams {
            history: self.history,
            gradient_tolerance: self.gradient_tolerance,
            max_iterations: self.max_iterations,
            armijo: self.armijo,
            backtrack: self.backtrack,
            max_backtracks: self.max_backtracks,
            precondition: self.precondition,
        }
    }

    pub fn init_mode(&self) -> InitMode {
        if self.init == "random" {
            InitMode::Random
        } else {
            InitMode::Linear
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObservablesConfig {
    /// Radial profile of the lattice momentum density.
    pub momentum: bool,
    pub momentum_points: usize,
    /// Samples per momentum for the semiclassical Monte-Carlo profile; 0 disables it.
    pub mc_samples: usize,
    pub position_profile: bool,
    pub radial_points: usize,
    pub husimi: bool,
    /// Localization width; `sqrt(l_B R)` from the mTF central field when absent.
    pub husimi_width: Option<f64>,
    /// Highest Landau level index; `floor(1/alpha) + 1` when absent.
    pub husimi_levels: Option<u32>,
}

impl Default for ObservablesConfig {
    fn default() -> Self {
        Self {
            momentum: true,
            momentum_points: 200,
            mc_samples: 0,
            position_profile: true,
            radial_points: 200,
            husimi: false,
            husimi_width: None,
            husimi_levels: None,
        }
    }
}

/// A validated run description. `alphas` holds one value for `solve` and the
/// sorted sweep points otherwise.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub particles: usize,
    pub alphas: Vec<f64>,
    pub exponent: f64,
    pub q_x: f64,
    pub q_p: f64,
    pub max_points: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub checkpoint_in: Option<PathBuf>,
    /// Write a checkpoint every this many iterations (0: only at completion).
    pub checkpoint_every: usize,
    /// Fill the `wall_s` column of sweep tables (makes them run-dependent).
    pub record_wall_time: bool,
    pub parallel_sweep: bool,
    pub solver: SolverConfig,
    pub observables: ObservablesConfig,
}

impl RunConfig {
    /// Defaults for everything but the physical parameters.
    pub fn new(particles: usize, alphas: Vec<f64>, exponent: f64) -> Self {
        Self {
            particles,
            alphas,
            exponent,
            q_x: 2.0,
            q_p: 6.0,
            max_points: DEFAULT_MAX_POINTS,
            seed: 0,
            output_dir: PathBuf::from("out"),
            checkpoint_in: None,
            checkpoint_every: 100,
            record_wall_time: false,
            parallel_sweep: false,
            solver: SolverConfig::default(),
            observables: ObservablesConfig::default(),
        }
    }

    /// The same configuration restricted to a single statistics parameter.
    pub fn for_alpha(&self, alpha: f64) -> Self {
        Self { alphas: vec![alpha], ..self.clone() }
    }

    /// SHA-256 of the canonical JSON form, ignoring where outputs are written.
    pub fn hash(&self) -> String {
        let mut value = serde_json::to_value(self).expect("config serializes");
        if let Some(map) = value.as_object_mut() {
            map.remove("output_dir");
        }
        hex::encode(Sha256::digest(value.to_string().as_bytes()))
    }

    /// Re-runs the full validation, e.g. after programmatic edits.
    pub fn validate(&self) -> Result<()> {
        let mut errors = Vec::new();
        check_physics(self, &mut errors);
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errors))
        }
    }
}

/// Parses TOML text; every violation is reported, not just the first.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_with(text, &[])
}

/// As [`parse_config`], with `key = value` overrides (dotted keys address tables)
/// applied before validation. Override values are TOML literals; bare words are
/// read as strings.
pub fn parse_config_with(text: &str, overrides: &[(String, String)]) -> Result<RunConfig> {
    let mut table: Table = text.parse().map_err(|e: toml::de::Error| Error::Config(vec![e.message().to_string()]))?;
    let mut errors = Vec::new();
    for (key, raw) in overrides {
        match override_value(raw) {
            Ok(value) => insert_dotted(&mut table, key, value, &mut errors),
            Err(msg) => errors.push(format!("{key}: {msg}")),
        }
    }
    let config = read_table(&table, &mut errors);
    match config {
        Some(c) if errors.is_empty() => Ok(c),
        _ => Err(Error::Config(errors)),
    }
}

fn override_value(raw: &str) -> std::result::Result<Value, String> {
    let trimmed = raw.trim();
    // comma lists without brackets are accepted for convenience
    let literal = if trimmed.contains(',') && !trimmed.starts_with('[') { format!("[{trimmed}]") } else { trimmed.to_string() };
    match format!("v = {literal}").parse::<Table>() {
        Ok(mut t) => Ok(t.remove("v").expect("key present")),
        Err(_) if !trimmed.is_empty() => Ok(Value::String(trimmed.to_string())),
        Err(e) => Err(e.message().to_string()),
    }
}

fn insert_dotted(table: &mut Table, key: &str, value: Value, errors: &mut Vec<String>) {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().unwrap_or_default();
    let mut current = table;
    for part in parts {
        let entry = current.entry(part.to_string()).or_insert_with(|| Value::Table(Table::new()));
        match entry {
            Value::Table(t) => current = t,
            _ => {
                errors.push(format!("{key}: `{part}` is not a table"));
                return;
            }
        }
    }
    current.insert(last.to_string(), value);
}

const TOP_KEYS: &[&str] = &[
    "particles",
    "alpha",
    "exponent",
    "q_x",
    "q_p",
    "max_points",
    "seed",
    "output_dir",
    "checkpoint_in",
    "checkpoint_every",
    "record_wall_time",
    "parallel_sweep",
    "solver",
    "observables",
];
const SOLVER_KEYS: &[&str] = &[
    "history",
    "gradient_tolerance",
    "max_iterations",
    "armijo",
    "backtrack",
    "max_backtracks",
    "precondition",
    "init",
    "reference_width",
];
const OBSERVABLE_KEYS: &[&str] = &[
    "momentum",
    "momentum_points",
    "mc_samples",
    "position_profile",
    "radial_points",
    "husimi",
    "husimi_width",
    "husimi_levels",
];

struct Reader<'a> {
    table: &'a Table,
    prefix: &'static str,
    errors: &'a mut Vec<String>,
}

impl Reader<'_> {
    fn name(&self, key: &str) -> String {
        format!("{}{key}", self.prefix)
    }

    fn unknown(&mut self, known: &[&str]) {
        for key in self.table.keys() {
            if !known.contains(&key.as_str()) {
                let msg = format!("unknown key `{}`", self.name(key));
                self.errors.push(msg);
            }
        }
    }

    fn float(&mut self, key: &str) -> Option<f64> {
        match self.table.get(key)? {
            Value::Float(f) => Some(*f),
            Value::Integer(i) => Some(*i as f64),
            other => {
                let msg = format!("`{}` must be a number, got {}", self.name(key), other.type_str());
                self.errors.push(msg);
                None
            }
        }
    }

    fn integer(&mut self, key: &str) -> Option<i64> {
        match self.table.get(key)? {
            Value::Integer(i) => Some(*i),
            other => {
                let msg = format!("`{}` must be an integer, got {}", self.name(key), other.type_str());
                self.errors.push(msg);
                None
            }
        }
    }

    /// Integer at least `min`.
    fn count(&mut self, key: &str, min: i64) -> Option<usize> {
        let v = self.integer(key)?;
        if v < min {
            let msg = format!("`{}` must be at least {min}, got {v}", self.name(key));
            self.errors.push(msg);
            return None;
        }
        Some(v as usize)
    }

    fn boolean(&mut self, key: &str) -> Option<bool> {
        match self.table.get(key)? {
            Value::Boolean(b) => Some(*b),
            other => {
                let msg = format!("`{}` must be a boolean, got {}", self.name(key), other.type_str());
                self.errors.push(msg);
                None
            }
        }
    }

    fn string(&mut self, key: &str) -> Option<String> {
        match self.table.get(key)? {
            Value::String(s) => Some(s.clone()),
            other => {
                let msg = format!("`{}` must be a string, got {}", self.name(key), other.type_str());
                self.errors.push(msg);
                None
            }
        }
    }

    /// Real in the open-closed range given by `ok`, described by `range`.
    fn real(&mut self, key: &str, range: &str, ok: impl Fn(f64) -> bool) -> Option<f64> {
        let v = self.float(key)?;
        if !(v.is_finite() && ok(v)) {
            let msg = format!("`{}` must be {range}, got {v}", self.name(key));
            self.errors.push(msg);
            return None;
        }
        Some(v)
    }
}

fn read_table(table: &Table, errors: &mut Vec<String>) -> Option<RunConfig> {
    let mut top = Reader { table, prefix: "", errors };
    top.unknown(TOP_KEYS);

    let particles = if table.contains_key("particles") {
        top.count("particles", 1)
    } else {
        top.errors.push("missing required key `particles`".into());
        None
    };
    let alphas = read_alphas(table, top.errors);
    let exponent = match table.contains_key("exponent") {
        true => top.real("exponent", "positive", |v| v > 0.0),
        false => Some(2.0),
    };
    let mut config = RunConfig::new(particles.unwrap_or(1), alphas.clone().unwrap_or_default(), exponent.unwrap_or(2.0));
    if let Some(v) = top.real("q_x", "at least 1", |v| v >= 1.0) {
        config.q_x = v;
    }
    if let Some(v) = top.real("q_p", "at least 1", |v| v >= 1.0) {
        config.q_p = v;
    }
    if let Some(v) = top.count("max_points", crate::grid::MIN_POINTS as i64) {
        config.max_points = v;
    }
    if let Some(v) = top.count("seed", 0) {
        config.seed = v as u64;
    }
    if let Some(v) = top.string("output_dir") {
        config.output_dir = v.into();
    }
    config.checkpoint_in = top.string("checkpoint_in").map(Into::into);
    if let Some(v) = top.count("checkpoint_every", 0) {
        config.checkpoint_every = v;
    }
    if let Some(v) = top.boolean("record_wall_time") {
        config.record_wall_time = v;
    }
    if let Some(v) = top.boolean("parallel_sweep") {
        config.parallel_sweep = v;
    }

    let solver = sub_table(table, "solver", top.errors);
    let mut s = Reader { table: &solver, prefix: "solver.", errors: top.errors };
    s.unknown(SOLVER_KEYS);
    let sc = &mut config.solver;
    if let Some(v) = s.count("history", 1) {
        sc.history = v;
    }
    if let Some(v) = s.real("gradient_tolerance", "positive", |v| v > 0.0) {
        sc.gradient_tolerance = v;
    }
    if let Some(v) = s.count("max_iterations", 0) {
        sc.max_iterations = v;
    }
    if let Some(v) = s.real("armijo", "in (0, 1)", |v| v > 0.0 && v < 1.0) {
        sc.armijo = v;
    }
    if let Some(v) = s.real("backtrack", "in (0, 1)", |v| v > 0.0 && v < 1.0) {
        sc.backtrack = v;
    }
    if let Some(v) = s.count("max_backtracks", 1) {
        sc.max_backtracks = v;
    }
    if let Some(v) = s.boolean("precondition") {
        sc.precondition = v;
    }
    if let Some(v) = s.string("init") {
        if v == "linear" || v == "random" {
            sc.init = v;
        } else {
            s.errors.push(format!("`solver.init` must be \"linear\" or \"random\", got \"{v}\""));
        }
    }
    sc.reference_width = s.real("reference_width", "positive", |v| v > 0.0);

    let observables = sub_table(table, "observables", s.errors);
    let mut o = Reader { table: &observables, prefix: "observables.", errors: s.errors };
    o.unknown(OBSERVABLE_KEYS);
    let oc = &mut config.observables;
    if let Some(v) = o.boolean("momentum") {
        oc.momentum = v;
    }
    if let Some(v) = o.count("momentum_points", 2) {
        oc.momentum_points = v;
    }
    if let Some(v) = o.count("mc_samples", 0) {
        if v != 0 && v < crate::observables::MIN_SAMPLES {
            o.errors.push(format!(
                "`observables.mc_samples` must be 0 or at least {}, got {v}",
                crate::observables::MIN_SAMPLES
            ));
        } else {
            oc.mc_samples = v;
        }
    }
    if let Some(v) = o.boolean("position_profile") {
        oc.position_profile = v;
    }
    if let Some(v) = o.count("radial_points", 2) {
        oc.radial_points = v;
    }
    if let Some(v) = o.boolean("husimi") {
        oc.husimi = v;
    }
    oc.husimi_width = o.real("husimi_width", "positive", |v| v > 0.0);
    oc.husimi_levels = o.count("husimi_levels", 0).map(|v| v as u32);

    let errors = o.errors;
    particles?;
    alphas?;
    exponent?;
    check_physics(&config, errors);
    Some(config)
}

fn sub_table(table: &Table, key: &str, errors: &mut Vec<String>) -> Table {
    match table.get(key) {
        None => Table::new(),
        Some(Value::Table(t)) => t.clone(),
        Some(other) => {
            errors.push(format!("`{key}` must be a table, got {}", other.type_str()));
            Table::new()
        }
    }
}

fn read_alphas(table: &Table, errors: &mut Vec<String>) -> Option<Vec<f64>> {
    let raw: Vec<&Value> = match table.get("alpha") {
        None => {
            errors.push("missing required key `alpha`".into());
            return None;
        }
        Some(Value::Array(items)) => items.iter().collect(),
        Some(v) => vec![v],
    };
    if raw.is_empty() {
        errors.push("`alpha` list is empty".into());
        return None;
    }
    let mut alphas = Vec::with_capacity(raw.len());
    let mut ok = true;
    for v in raw {
        let a = match v {
            Value::Float(f) => *f,
            Value::Integer(i) => *i as f64,
            other => {
                errors.push(format!("`alpha` entries must be numbers, got {}", other.type_str()));
                ok = false;
                continue;
            }
        };
        if !(a.is_finite() && (0.0..1.0).contains(&a)) {
            errors.push(format!("alpha = {a} is outside the statistics domain [0, 1)"));
            ok = false;
            continue;
        }
        alphas.push(a);
    }
    alphas.sort_by(f64::total_cmp);
    for w in alphas.windows(2) {
        if w[0] == w[1] {
            errors.push(format!("alpha = {} is listed more than once", w[0]));
            ok = false;
        }
    }
    ok.then_some(alphas)
}

/// Cross-field checks that need the physical parameters.
fn check_physics(config: &RunConfig, errors: &mut Vec<String>) {
    if config.particles == 0 {
        errors.push("`particles` must be at least 1".into());
        return;
    }
    if config.alphas.is_empty() {
        errors.push("no alpha values".into());
        return;
    }
    if config.checkpoint_in.is_some() && config.alphas.len() > 1 {
        errors.push("`checkpoint_in` requires a single alpha".into());
    }
    for &alpha in &config.alphas {
        if !(0.0..1.0).contains(&alpha) {
            errors.push(format!("alpha = {alpha} is outside the statistics domain [0, 1)"));
            continue;
        }
        let plan = planned_points(config.particles, alpha, config.exponent, config.q_x, config.q_p, config.max_points);
        let (points, box_length) = match plan {
            Ok(p) => p,
            Err(e) => {
                errors.push(format!("alpha = {alpha}: {e}"));
                continue;
            }
        };
        if config.observables.husimi && alpha > 0.0 {
            let obs = &config.observables;
            let params = MtfModel::new(config.particles as f64, alpha, config.exponent)
                .and_then(|m| husimi_params(&m, obs.husimi_width, obs.husimi_levels, [0.0, 0.0]));
            match params {
                Ok(p) => {
                    let reach = 5.0 * p.width;
                    let room = box_length / 2.0 - box_length / points as f64;
                    if reach > room {
                        errors.push(format!(
                            "alpha = {alpha}: Husimi window 5 x {:.4} exceeds the {room:.4} available in the box; lower `observables.husimi_width` or raise `q_x`",
                            p.width
                        ));
                    }
                }
                Err(e) => errors.push(format!("alpha = {alpha}: {e}")),
            }
        }
        if config.observables.husimi && alpha > 0.0 {
            if let Some(levels) = config.observables.husimi_levels {
                let top = (1.0 / alpha).floor() as u32;
                if levels < top {
                    errors.push(format!(
                        "alpha = {alpha}: `observables.husimi_levels` = {levels} stops below level {top}, which the mTF state occupies"
                    ));
                }
            }
        }
    }
}
