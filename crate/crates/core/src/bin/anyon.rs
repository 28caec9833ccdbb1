use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use anyon_hartree::analytic::MtfModel;
use anyon_hartree::io::{
    configure_threads, husimi_csv, husimi_params, momentum_profile_csv, parse_config_with, preamble, read_checkpoint,
    reference_table, run_solve, run_sweep, RunConfig, THREADS_ENV,
};
use anyon_hartree::grid::uniform_radii;
use anyon_hartree::observables::{
    husimi_ll_filling, momentum_density, momentum_support_bound, rescale_momentum_profile, tf_momentum_profile_mc,
};
use anyon_hartree::{Error, Result};

/// Hartree ground states of trapped anyons and their magnetic Thomas-Fermi references.
#[derive(Parser)]
#[command(version, after_help = format!("Worker threads: set {THREADS_ENV} (default: available parallelism)."))]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for a single statistics parameter.
    Solve(RunArgs),
    /// Solve for every alpha of a list and tabulate the energies.
    Sweep(RunArgs),
    /// Tabulate the magnetic Thomas-Fermi constants.
    Reference(ReferenceArgs),
    /// Landau-level fillings of checkpointed orbitals.
    Husimi(HusimiArgs),
    /// Radial momentum density of checkpointed orbitals or of the mTF state (Monte Carlo).
    Momentum(MomentumArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration; flags below override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    particles: Option<usize>,
    /// One value, or a comma-separated list for sweeps.
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    exponent: Option<f64>,
    #[arg(long)]
    q_x: Option<f64>,
    #[arg(long)]
    q_p: Option<f64>,
    #[arg(long)]
    max_points: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    checkpoint_in: Option<PathBuf>,
    #[arg(long)]
    checkpoint_every: Option<usize>,
    #[arg(long)]
    record_wall_time: bool,
    #[arg(long)]
    parallel_sweep: bool,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    gradient_tolerance: Option<f64>,
    /// `linear` or `random`.
    #[arg(long)]
    init: Option<String>,
    #[arg(long)]
    husimi: bool,
    #[arg(long)]
    mc_samples: Option<usize>,
    /// Any configuration key, e.g. `--set solver.history=20`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl RunArgs {
    fn load(&self) -> Result<RunConfig> {
        let text = match &self.config {
            Some(path) => std::fs::read_to_string(path)?,
            None => String::new(),
        };
        let mut o: Vec<(String, String)> = Vec::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                o.push((k.to_string(), v));
            }
        };
        let quoted = |p: &Option<PathBuf>| p.as_ref().map(|p| format!("{:?}", p.display().to_string()));
        put("particles", self.particles.map(|v| v.to_string()));
        put("alpha", self.alpha.clone());
        put("exponent", self.exponent.map(|v| format!("{v:?}")));
        put("q_x", self.q_x.map(|v| format!("{v:?}")));
        put("q_p", self.q_p.map(|v| format!("{v:?}")));
        put("max_points", self.max_points.map(|v| v.to_string()));
        put("seed", self.seed.map(|v| v.to_string()));
        put("output_dir", quoted(&self.output_dir));
        put("checkpoint_in", quoted(&self.checkpoint_in));
        put("checkpoint_every", self.checkpoint_every.map(|v| v.to_string()));
        put("record_wall_time", self.record_wall_time.then(|| "true".into()));
        put("parallel_sweep", self.parallel_sweep.then(|| "true".into()));
        put("solver.max_iterations", self.max_iterations.map(|v| v.to_string()));
        put("solver.gradient_tolerance", self.gradient_tolerance.map(|v| format!("{v:?}")));
        put("solver.init", self.init.as_ref().map(|v| format!("{v:?}")));
        put("observables.husimi", self.husimi.then(|| "true".into()));
        put("observables.mc_samples", self.mc_samples.map(|v| v.to_string()));
        for item in &self.set {
            let Some((k, v)) = item.split_once('=') else {
                return Err(Error::Config(vec![format!("`--set {item}` is not of the form KEY=VALUE")]));
            };
            o.push((k.trim().to_string(), v.to_string()));
        }
        parse_config_with(&text, &o)
    }
}

#[derive(Args)]
struct ReferenceArgs {
    /// Comma-separated alpha values; defaults to a uniform grid of `--steps` points on [0, 1).
    #[arg(long, value_delimiter = ',')]
    alpha: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    #[arg(long, default_value_t = 2.0)]
    exponent: f64,
    /// Output file (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HusimiArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    /// Localization width (default: sqrt of magnetic length times cloud radius).
    #[arg(long)]
    width: Option<f64>,
    /// Highest Landau level index (default: floor(1/alpha) + 1).
    #[arg(long)]
    levels: Option<u32>,
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0.0, 0.0])]
    center: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MomentumArgs {
    /// Lattice momentum density of these orbitals.
    #[arg(long, conflicts_with = "mc")]
    checkpoint: Option<PathBuf>,
    /// Monte-Carlo semiclassical density of the mTF state instead.
    #[arg(long)]
    mc: bool,
    #[arg(long, required_if_eq("mc", "true"))]
    particles: Option<usize>,
    #[arg(long, required_if_eq("mc", "true"))]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    exponent: f64,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Report `t(sqrt(N) q)` against `q = p / sqrt(N)`.
    #[arg(long)]
    rescale: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve(args) => {
            let config = args.load()?;
            let report = run_solve(&config)?;
            println!(
                "alpha = {}: E/N^2 = {} (mTF {}), {} after {} iterations",
                report.alpha, report.energy_over_n2, report.mtf_energy_over_n2, report.termination, report.iterations
            );
            for f in &report.files {
                println!("  {}", f.display());
            }
        }
        Command::Sweep(args) => {
            let config = args.load()?;
            let report = run_sweep(&config)?;
            for p in &report.points {
                match (&p.report, &p.error) {
                    (Some(r), _) => println!("alpha = {}: E/N^2 = {} (mTF {})", p.alpha, r.energy_over_n2, p.mtf_energy_over_n2),
                    (None, Some(e)) => println!("alpha = {}: failed: {e}", p.alpha),
                    (None, None) => {}
                }
            }
            println!("{}", report.csv.display());
            if report.failures() > 0 {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Reference(args) => {
            let alphas = if args.alpha.is_empty() {
                (0..args.steps).map(|i| i as f64 / args.steps as f64).collect()
            } else {
                args.alpha
            };
            emit(&args.out, &reference_table(&alphas, args.exponent)?)?;
        }
        Command::Husimi(args) => {
            let cp = read_checkpoint(&args.checkpoint)?;
            let model = MtfModel::new(cp.orbitals.count() as f64, cp.alpha, cp.exponent)?;
            let params = husimi_params(&model, args.width, args.levels, [args.center[0], args.center[1]])?;
            let result = husimi_ll_filling(&cp.orbitals, &params)?;
            let pre = preamble(
                "-",
                &format!(
                    "Landau-level fillings of {}, width {}, field {}, completeness {}",
                    args.checkpoint.display(),
                    params.width,
                    params.field,
                    result.completeness
                ),
            );
            emit(&args.out, &husimi_csv(&pre, cp.alpha, &result))?;
        }
        Command::Momentum(args) => {
            let (profile, what) = if let Some(path) = &args.checkpoint {
                let cp = read_checkpoint(path)?;
                let t = momentum_density(&cp.orbitals);
                let momenta = uniform_radii(args.points, t.grid().box_length() / 2.0);
                (t.radial_profile(&momenta)?, format!("lattice momentum density of {}", path.display()))
            } else if args.mc {
                let particles = args.particles.expect("required by clap");
                let model = MtfModel::new(particles as f64, args.alpha.expect("required by clap"), args.exponent)?;
                let momenta = uniform_radii(args.points, 1.05 * momentum_support_bound(&model));
                let profile = tf_momentum_profile_mc(&model, &momenta, args.samples, args.seed)?;
                (profile, format!("mTF momentum density, {} samples, seed {}", args.samples, args.seed))
            } else {
                return Err(Error::InvalidInput("give --checkpoint or --mc".into()));
            };
            let profile = if args.rescale {
                rescale_momentum_profile(&profile, profile.particles)?
            } else {
                profile
            };
            let what = if args.rescale { format!("{what}, rescaled to unit mass") } else { what };
            emit(&args.out, &momentum_profile_csv(&preamble("-", &what), &profile))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| run(cli));
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_solver_failure() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
