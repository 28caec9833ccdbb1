//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs with a custom harness so the lines are always printed. The slow mTF trend
//! study (criterion 7) only runs when `--ignored` or `--include-ignored` is passed.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use anyon_hartree::analytic::{
    homogeneous_energy_density, mtf_constant, theoretical_ll_filling, MtfModel,
};
use anyon_hartree::gauge::{curl_residual, default_reference_width, solve_correction, solve_vector_potential, GaussianReference};
use anyon_hartree::grid::{size_grid, Grid, ScalarField};
use anyon_hartree::hartree::{
    initialize_orbitals, lowest_eigenpairs, minimize, project_tangent, real_inner, retract, EigenOptions,
    HartreeProblem, InitMode, OrbitalSet, SolverParams,
};
use anyon_hartree::io::{run_solve, run_sweep, RunConfig};
use anyon_hartree::observables::{
    husimi_ll_filling, landau_states, momentum_density, momentum_support_bound, rescale_momentum_profile,
    tf_momentum_density_mc, tf_momentum_profile_mc, HusimiParams,
};
use num_complex::Complex64;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

// ---------------------------------------------------------------------------

fn criterion_1() -> Outcome {
    let c = |a: f64| mtf_constant(a).unwrap();
    let mut fails = Vec::new();
    for (alpha, expected) in [(0.5, 1.0), (1.0 / 3.0, 1.0), (0.75, 1.125)] {
        if (c(alpha) - expected).abs() > 1e-12 {
            fails.push(format!("c({alpha}) = {}", c(alpha)));
        }
    }
    // grid alpha = k / 1000; the fractional part of 1/alpha is (1000 mod k) / k exactly
    let mut best = (0usize, f64::MIN);
    for k in 1..1000usize {
        let alpha = k as f64 / 1000.0;
        let excess = c(alpha) - 1.0;
        if excess > best.1 {
            best = (k, excess);
        }
        let bound = alpha * alpha / 4.0;
        if excess > bound + 1e-12 || excess < -1e-12 {
            fails.push(format!("bound violated at alpha = {alpha}"));
        }
        let half = 2 * (1000 % k) == k;
        let equal = (excess - bound).abs() <= 1e-12;
        if half != equal {
            fails.push(format!("equality mismatch at alpha = {alpha} (frac 1/2: {half}, equal: {equal})"));
        }
    }
    if best.0 != 750 {
        fails.push(format!("maximum at alpha = {}", best.0 as f64 / 1000.0));
    }
    outcome(
        fails.is_empty(),
        if fails.is_empty() {
            format!("c(1/2) = c(1/3) = 1, c(3/4) = 1.125, argmax alpha = 0.750, c - 1 <= alpha^2/4 with equality only at frac(1/alpha) = 1/2")
        } else {
            fails.join("; ")
        },
    )
}

/// Composite Gauss-Legendre (5 points) on `[a, b]` with `panels` panels.
fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    const X: [f64; 5] = [0.0, -0.538_469_310_105_683_1, 0.538_469_310_105_683_1, -0.906_179_845_938_664, 0.906_179_845_938_664];
    const W: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let mid = a + (p as f64 + 0.5) * h;
            X.iter().zip(W).map(|(x, w)| w * f(mid + 0.5 * h * x)).sum::<f64>() * 0.5 * h
        })
        .sum()
}

fn criterion_2() -> Outcome {
    let mut fails = Vec::new();
    let m = MtfModel::new(25.0, 0.75, 2.0).unwrap();
    if (m.chemical_potential - 3.0).abs() > 1e-12 || (m.energy_per_particle_squared() - 2.0).abs() > 1e-12 {
        fails.push(format!("alpha = 3/4: lambda = {}, E/N^2 = {}", m.chemical_potential, m.energy_per_particle_squared()));
    }
    let tf = MtfModel::new(25.0, 0.0, 2.0).unwrap().energy_per_particle_squared();
    let expected = 8f64.powf(1.5) / 12.0;
    if (tf - expected).abs() > 1e-12 {
        fails.push(format!("alpha = 0: E/N^2 = {tf}, expected {expected}"));
    }
    let mut worst = 0.0f64;
    for &alpha in &[0.0, 0.25, 0.5, 0.75, 0.9] {
        for &s in &[1.0, 1.5, 2.0, 3.0, 4.0] {
            let model = MtfModel::new(10.0, alpha, s).unwrap();
            // substitute r = R u^2 to smooth the r^{s+1} behaviour at the origin
            let r_max = model.radius;
            let mass = gauss_legendre(
                |u| {
                    let r = r_max * u * u;
                    2.0 * PI * r * model.density_radial(r) * 2.0 * r_max * u
                },
                0.0,
                1.0,
                400,
            );
            worst = worst.max(rel(mass, 10.0));
        }
    }
    if worst > 1e-10 {
        fails.push(format!("mass error {worst:e}"));
    }
    outcome(
        fails.is_empty(),
        if fails.is_empty() {
            format!("lambda = 3, E/N^2 = 2 at alpha = 3/4; TF E/N^2 = 8^(3/2)/12; worst mass error {worst:.1e} over 25 (alpha, s)")
        } else {
            fails.join("; ")
        },
    )
}

/// Energy per area of `rho` particles filling Landau levels of `B = 2 pi alpha rho`,
/// `alpha rho` states per level at energy `2B(n + 1/2)`.
fn landau_level_energy(alpha: f64, rho: f64) -> f64 {
    let b = 2.0 * PI * alpha * rho;
    let capacity = alpha * rho;
    let mut left = rho;
    let mut energy = 0.0;
    let mut n = 0.0;
    while left > 1e-15 * rho {
        let take = left.min(capacity);
        energy += take * 2.0 * b * (n + 0.5);
        left -= take;
        n += 1.0;
    }
    energy
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0f64;
    for k in 1..=81 {
        // avoid exact 1/n points where the last level is filled up to rounding
        let alpha = k as f64 / 82.0;
        for rho in [0.3, 1.0, 7.5] {
            let lda = homogeneous_energy_density(alpha, rho).unwrap();
            worst = worst.max(rel(lda, landau_level_energy(alpha, rho)));
        }
    }
    outcome(worst < 1e-12, format!("81 alpha values x 3 densities, worst relative deviation {worst:.1e}"))
}

fn criterion_4() -> Outcome {
    let grid = Grid::new(16.0, 128).unwrap();
    let mut fails = Vec::new();

    // off-centre smooth density with an anisotropic lump
    let blobs = [
        GaussianReference { mass: 2.0, width: 0.9, center: [0.7, -0.4] },
        GaussianReference { mass: 1.0, width: 0.6, center: [-1.1, 0.8] },
    ];
    let rho = ScalarField::from_fn(&grid, |x| blobs.iter().map(|b| b.density(x)).sum::<f64>() * (1.0 + 0.2 * x[0] * x[1] * (-0.1 * (x[0] * x[0] + x[1] * x[1])).exp()));
    let mass = rho.integral(&grid);
    let reference = GaussianReference::new(mass, 1.2).unwrap();
    let correction = solve_correction(&grid, &rho, &reference).unwrap();
    let curl = curl_residual(&grid, &rho, &reference, &correction);
    let scale = 2.0 * PI * rho.max_abs();
    let curl_err = curl.iter().fold(0.0f64, |m, v| m.max(v.abs())) / scale;
    let div = grid.divergence(&correction);
    let div_err = div.iter().fold(0.0f64, |m, v| m.max(v.abs())) / scale;
    // reference part: divergence-free analytically; check by central differences
    let h = 1e-5;
    let mut ref_div = 0.0f64;
    for x in [[0.3, 0.2], [-1.0, 0.5], [2.0, -1.5]] {
        let d = (reference.potential([x[0] + h, x[1]])[0] - reference.potential([x[0] - h, x[1]])[0]
            + reference.potential([x[0], x[1] + h])[1]
            - reference.potential([x[0], x[1] - h])[1])
            / (2.0 * h);
        ref_div = ref_div.max(d.abs() / scale);
    }
    if curl_err > 1e-10 || div_err > 1e-10 || ref_div > 1e-8 {
        fails.push(format!("curl {curl_err:.1e}, div {div_err:.1e}, reference div {ref_div:.1e}"));
    }

    // radial density: A is azimuthal with |A| = (enclosed mass) / r
    let f = |r: f64| (1.0 + r * r) * (-r * r).exp() / PI;
    // int_0^r 2 pi s f(s) ds = 2 int_0^r (s + s^3) e^{-s^2} ds = 2 - (2 + r^2) e^{-r^2}
    let enclosed = |r: f64| 2.0 - (2.0 + r * r) * (-r * r).exp();
    let rho = ScalarField::from_fn(&grid, |x| f(x[0].hypot(x[1])));
    let mass = rho.integral(&grid);
    let reference = GaussianReference::new(mass, 1.0).unwrap();
    let a = solve_vector_potential(&grid, &rho, &reference).unwrap();
    let mut newton = 0.0f64;
    let a_scale = a.max_norm();
    for idx in 0..grid.len() {
        let x = grid.position(idx);
        let r = x[0].hypot(x[1]);
        if r == 0.0 || r > 7.0 {
            continue;
        }
        let amp = enclosed(r) / r;
        let exact = [-amp * x[1] / r, amp * x[0] / r];
        let err = (a.x[idx] - exact[0]).hypot(a.y[idx] - exact[1]) / a_scale;
        newton = newton.max(err);
    }
    if newton > 1e-8 {
        fails.push(format!("radial deviation {newton:.1e}"));
    }
    outcome(
        fails.is_empty(),
        if fails.is_empty() {
            format!("M = 128: curl residual {curl_err:.1e}, div {div_err:.1e}, radial enclosed-mass deviation {newton:.1e}")
        } else {
            fails.join("; ")
        },
    )
}

/// Lowest linear eigenstates dressed with a smooth phase, so currents are nonzero.
fn complex_start(problem: &HartreeProblem) -> OrbitalSet {
    let grid = problem.grid();
    let base = initialize_orbitals(problem, InitMode::Linear, 0).unwrap();
    let data = base
        .orbitals()
        .flat_map(|u| {
            u.iter().enumerate().map(|(idx, z)| {
                let [x, y] = grid.position(idx);
                z * Complex64::from_polar(1.0, 0.4 * x - 0.25 * y + 0.1 * x * y)
            })
        })
        .collect();
    OrbitalSet::orthonormalized(grid, base.count(), data).unwrap()
}

fn criterion_5() -> Outcome {
    let grid = Grid::new(9.0, 40).unwrap();
    let mut worst = 0.0f64;
    let mut cases = 0;
    for &n in &[1usize, 2, 4] {
        for &alpha in &[0.0, 0.3, 0.75] {
            let problem = HartreeProblem::power_trap(&grid, 2.0, alpha, n, 0.8).unwrap();
            let u = complex_start(&problem);
            let (_, raw) = problem.energy_and_gradient(&u).unwrap();
            for d in 0..3 {
                let ambient: Vec<Complex64> = u
                    .data()
                    .iter()
                    .enumerate()
                    .map(|(i, z)| {
                        let [x, y] = grid.position(i % grid.len());
                        let j = (i / grid.len()) as f64;
                        let env = (-(x * x + y * y) / 2.0).exp();
                        z * Complex64::new(x * (d as f64 + 1.0), y * y - j) + Complex64::new(0.3 * y, 0.2 * x * (d as f64 - 1.0)) * env
                    })
                    .collect();
                let xi = project_tangent(&u, &ambient).unwrap();
                let predicted = real_inner(grid.cell_area(), &raw, &xi);
                let t = 1e-5;
                let plus = problem.energy(&retract(&u, &xi, t).unwrap()).unwrap().total;
                let minus = problem.energy(&retract(&u, &xi, -t).unwrap()).unwrap().total;
                let fd = (plus - minus) / (2.0 * t);
                worst = worst.max(rel(fd, predicted));
                cases += 1;
            }
        }
    }
    outcome(worst < 1e-6, format!("{cases} directions, N in {{1,2,4}}, alpha in {{0,0.3,0.75}}, M = 40: worst relative error {worst:.1e}"))
}

fn criterion_6() -> Outcome {
    let mut fails = Vec::new();
    let mut details = Vec::new();
    for (n, shell_sum) in [(4usize, 8.0), (6, 14.0)] {
        let sizing = size_grid(n, 0.0, 2.0, 2.0, 6.0, 1024).unwrap();
        let grid = &sizing.grid;
        let problem =
            HartreeProblem::power_trap(grid, 2.0, 0.0, n, default_reference_width(sizing.support_radius)).unwrap();
        let linear: f64 = lowest_eigenpairs(&problem, n, EigenOptions::default()).unwrap().values.iter().sum();
        let start = initialize_orbitals(&problem, InitMode::Random, 7).unwrap();
        let solved = minimize(&problem, start, &SolverParams::default(), |_, _| Ok(())).unwrap();
        let e = solved.energy.total;
        let continuum = 2.0 * (n as f64).sqrt() * shell_sum;
        let (d_lin, d_cont) = (rel(e, linear), rel(e, continuum));
        if !solved.converged() || d_lin > 5e-3 || d_cont > 2e-2 {
            fails.push(format!("N = {n}: E = {e}, linear {linear}, continuum {continuum}, {:?}", solved.termination));
        }
        details.push(format!("N = {n}: E = {e:.8} vs linear {linear:.8} ({d_lin:.1e}), shell sum {continuum:.4} ({d_cont:.1e})"));
    }
    outcome(fails.is_empty(), if fails.is_empty() { details.join("; ") } else { fails.join("; ") })
}

fn criterion_7() -> Outcome {
    let alphas: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
    let mut fails = Vec::new();
    let mut gaps = Vec::new();
    for &n in &[8usize, 16, 25] {
        let mut energies = Vec::new();
        for &alpha in &alphas {
            let sizing = size_grid(n, alpha, 2.0, 2.0, 6.0, 1024).unwrap();
            let problem = HartreeProblem::power_trap(
                &sizing.grid,
                2.0,
                alpha,
                n,
                default_reference_width(sizing.support_radius),
            )
            .unwrap();
            let start = initialize_orbitals(&problem, InitMode::Linear, 0).unwrap();
            let solved = minimize(&problem, start, &SolverParams::default(), |_, _| Ok(())).unwrap();
            let e = solved.energy.total / (n * n) as f64;
            println!("    N = {n:2}, alpha = {alpha:.1}: E/N^2 = {e:.8} ({:?}, {} iterations)", solved.termination, solved.iterations);
            energies.push(e);
        }
        let argmax = (0..energies.len()).max_by(|&a, &b| energies[a].total_cmp(&energies[b])).unwrap();
        if (alphas[argmax] - 0.8).abs() > 1e-12 && (alphas[argmax] - 0.7).abs() > 1e-12 {
            fails.push(format!("N = {n}: maximum at alpha = {}", alphas[argmax]));
        }
        // 0.7 and 0.8 are equally near 0.75; either counts
        let mtf = MtfModel::new(n as f64, 0.75, 2.0).unwrap().energy_per_particle_squared();
        let sizing = size_grid(n, 0.75, 2.0, 2.0, 6.0, 1024).unwrap();
        let problem =
            HartreeProblem::power_trap(&sizing.grid, 2.0, 0.75, n, default_reference_width(sizing.support_radius)).unwrap();
        let start = initialize_orbitals(&problem, InitMode::Linear, 0).unwrap();
        let solved = minimize(&problem, start, &SolverParams::default(), |_, _| Ok(())).unwrap();
        gaps.push((n, (solved.energy.total / (n * n) as f64 - mtf).abs()));
    }
    if !gaps.windows(2).all(|w| w[1].1 < w[0].1) {
        fails.push(format!("gap at alpha = 0.75 not decreasing: {gaps:?}"));
    }
    let gap_text: Vec<String> = gaps.iter().map(|(n, g)| format!("N = {n}: {g:.4}")).collect();
    outcome(
        fails.is_empty(),
        if fails.is_empty() {
            format!("maxima next to alpha = 0.75 for N = 8, 16, 25; gaps at 0.75 {}", gap_text.join(", "))
        } else {
            format!("{}; gaps {}", fails.join("; "), gap_text.join(", "))
        },
    )
}

fn criterion_8() -> Outcome {
    let mut fails = Vec::new();

    // lattice mass of a converged state
    let n = 6;
    let sizing = size_grid(n, 0.5, 2.0, 2.0, 6.0, 1024).unwrap();
    let problem =
        HartreeProblem::power_trap(&sizing.grid, 2.0, 0.5, n, default_reference_width(sizing.support_radius)).unwrap();
    let start = initialize_orbitals(&problem, InitMode::Linear, 0).unwrap();
    let solved = minimize(&problem, start, &SolverParams::default(), |_, _| Ok(())).unwrap();
    let lattice_mass = momentum_density(&solved.orbitals).mass();
    let lattice_err = rel(lattice_mass, n as f64);
    if lattice_err > 1e-10 {
        fails.push(format!("lattice mass {lattice_mass}"));
    }

    // Monte-Carlo mass of the mTF momentum density
    let model = MtfModel::new(25.0, 0.75, 2.0).unwrap();
    let momenta: Vec<f64> = (0..=400).map(|i| 1.02 * momentum_support_bound(&model) * i as f64 / 400.0).collect();
    let profile = tf_momentum_profile_mc(&model, &momenta, 40_000, 3).unwrap();
    let (mc_mass, mc_sigma) = (profile.mass(), profile.mass_error().unwrap());
    let mc_z = (mc_mass - 25.0) / mc_sigma;
    if mc_z.abs() > 3.0 {
        fails.push(format!("MC mass {mc_mass} +- {mc_sigma}"));
    }

    // alpha = 0: rescaled momentum profile against rho^TF(q) / N
    let tf = MtfModel::new(25.0, 0.0, 2.0).unwrap();
    let momenta: Vec<f64> = (0..50).map(|i| 0.98 * momentum_support_bound(&tf) * i as f64 / 50.0).collect();
    let profile = rescale_momentum_profile(&tf_momentum_profile_mc(&tf, &momenta, 200_000, 11).unwrap(), 25.0).unwrap();
    let errors = profile.errors.as_ref().unwrap();
    let mut max_z = 0.0f64;
    let mut chi2 = 0.0;
    let mut dof = 0;
    for ((q, t), e) in profile.momenta.iter().zip(&profile.values).zip(errors) {
        let shape = tf.density_radial(*q) / 25.0;
        if *e > 0.0 {
            let z = (t - shape) / e;
            max_z = max_z.max(z.abs());
            chi2 += z * z;
            dof += 1;
        } else if (t - shape).abs() > 1e-12 {
            max_z = f64::INFINITY;
        }
    }
    if max_z > 4.5 {
        fails.push(format!("shape mismatch, max |z| = {max_z:.2}"));
    }

    // convergence rate: RMS error over seeds against the exact alpha = 0 value
    let p = (25.0 * tf.chemical_potential / 2.0).sqrt();
    let exact = (tf.chemical_potential - p * p / 25.0) / (4.0 * PI);
    let sizes = [10_000usize, 100_000, 1_000_000, 10_000_000];
    let seeds = 12;
    let rms: Vec<f64> = sizes
        .iter()
        .map(|&s| {
            let sq: f64 = (0..seeds)
                .map(|seed| (tf_momentum_density_mc(&tf, [p, 0.0], s, 100 + seed).unwrap().value - exact).powi(2))
                .sum();
            (sq / seeds as f64).sqrt()
        })
        .collect();
    let xs: Vec<f64> = sizes.iter().map(|&s| (s as f64).ln()).collect();
    let ys: Vec<f64> = rms.iter().map(|r| r.ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    if (slope + 0.5).abs() > 0.1 {
        fails.push(format!("error exponent {slope:.3}"));
    }
    outcome(
        fails.is_empty(),
        format!(
            "{}lattice mass error {lattice_err:.1e}; MC mass {mc_mass:.4} +- {mc_sigma:.4} (z = {mc_z:.2}); alpha = 0 shape max |z| = {max_z:.2}, chi2/dof = {:.2}; error exponent {slope:.3}",
            if fails.is_empty() { String::new() } else { format!("{}; ", fails.join("; ")) },
            chi2 / dof as f64
        ),
    )
}

fn criterion_9(work: &Path) -> Outcome {
    let mut fails = Vec::new();

    // completely filled lowest Landau level: m(0) = (B / 2 pi) B eps^2 / (B eps^2 + 1)
    let (field, width) = (24.0, 1.0);
    let grid = Grid::new(11.5, 192).unwrap();
    let states = landau_states(&grid, field, 150).unwrap();
    let bound = field / (2.0 * PI);
    let params = HusimiParams { width, field, center: [0.0, 0.0], max_level: 3, reference_density: bound };
    let result = husimi_ll_filling(&states, &params).unwrap();
    let m: Vec<f64> = result.fillings.iter().map(|f| f.value / bound).collect();
    let closed = field * width * width / (field * width * width + 1.0);
    if (m[0] - 1.0).abs() > 0.05 || m[1..].iter().any(|v| v.abs() > 0.05) || (m[0] - closed).abs() > 1e-3 {
        fails.push(format!("synthetic fillings / (B/2pi) = {m:?}, closed form {closed}"));
    }
    if result.fillings.iter().any(|f| f.value > bound * (1.0 + 1e-9)) {
        fails.push("Pauli bound exceeded on synthetic state".into());
    }

    let mut sum_err = 0.0f64;
    for k in 0..100 {
        let alpha = (k as f64 + 1.0) / 101.0;
        let top = (1.0 / alpha).floor() as u32 + 2;
        let s: f64 = (0..=top).map(|n| theoretical_ll_filling(alpha, n).unwrap()).sum();
        sum_err = sum_err.max((s - 1.0).abs());
    }
    if sum_err > 1e-12 {
        fails.push(format!("theoretical fillings sum error {sum_err:e}"));
    }

    // converged N = 25, alpha = 3/4 state through the solve driver
    let mut config = RunConfig::new(25, vec![0.75], 2.0);
    config.output_dir = work.join("husimi_n25");
    config.checkpoint_every = 0;
    config.observables.husimi = true;
    config.observables.momentum_points = 50;
    config.observables.radial_points = 50;
    let report = run_solve(&config).unwrap();
    let husimi = report.husimi.as_ref().unwrap();
    let lowest: f64 = husimi.fillings.iter().take(2).map(|f| f.value).sum();
    let share = lowest / husimi.completeness;
    if !report.converged() || share < 0.7 {
        fails.push(format!("N = 25: lowest two levels carry {share:.3} of {:.4} ({})", husimi.completeness, report.termination));
    }
    if husimi.fillings.iter().any(|f| f.value > husimi.bound * (1.0 + 1e-9)) {
        fails.push("Pauli bound exceeded on converged state".into());
    }
    let levels: Vec<String> = husimi.fillings.iter().map(|f| format!("{:.4}", f.value / husimi.bound)).collect();
    outcome(
        fails.is_empty(),
        format!(
            "{}synthetic LLL m/(B/2pi) = [{}] (closed form {closed:.4}); filling sums within {sum_err:.0e}; N = 25: width {:.3}, levels/(B/2pi) = [{}], lowest two = {:.1}% of completeness",
            if fails.is_empty() { String::new() } else { format!("{}; ", fails.join("; ")) },
            m.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join(", "),
            husimi.width,
            levels.join(", "),
            100.0 * share
        ),
    )
}

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else if path.extension().is_some_and(|e| e == "csv" || e == "anyh") {
                out.push((path.strip_prefix(dir).unwrap().display().to_string(), std::fs::read(&path).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn criterion_10(work: &Path) -> Outcome {
    let mut config = RunConfig::new(3, vec![0.25, 0.5, 0.75], 2.0);
    config.seed = 42;
    config.solver.init = "random".into();
    config.observables.mc_samples = 20_000;
    config.observables.momentum_points = 20;
    let mut trees = Vec::new();
    for run in ["a", "b"] {
        config.output_dir = work.join(format!("sweep_{run}"));
        let report = run_sweep(&config).unwrap();
        assert_eq!(report.failures(), 0);
        trees.push(read_tree(&config.output_dir));
    }
    let csv_equal = std::fs::read(work.join("sweep_a/sweep.csv")).unwrap() == std::fs::read(work.join("sweep_b/sweep.csv")).unwrap();
    let all_equal = trees[0] == trees[1];
    outcome(
        csv_equal && all_equal,
        format!("two seeded sweeps: sweep.csv identical = {csv_equal}, all {} tables and checkpoints identical = {all_equal}", trees[0].len()),
    )
}

// ---------------------------------------------------------------------------

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let slow = args.iter().any(|a| a == "--ignored" || a == "--include-ignored");
    let work = tempfile::tempdir().expect("temporary directory");
    let work_path = work.path().to_path_buf();

    type Criterion<'a> = Box<dyn Fn() -> Outcome + 'a>;
    let criteria: Vec<(u32, &str, Criterion)> = vec![
        (1, "statistics constant", Box::new(criterion_1)),
        (2, "mTF closed forms", Box::new(criterion_2)),
        (3, "local density consistency", Box::new(criterion_3)),
        (4, "gauge solver", Box::new(criterion_4)),
        (5, "gradient correctness", Box::new(criterion_5)),
        (6, "alpha = 0 oracle", Box::new(criterion_6)),
        (7, "mTF trend (slow)", Box::new(criterion_7)),
        (8, "momentum densities", Box::new(criterion_8)),
        (9, "Husimi fillings", Box::new(|| criterion_9(&work_path))),
        (10, "determinism", Box::new(|| criterion_10(&work_path))),
    ];
    let mut failed = 0;
    for (number, name, run) in criteria {
        if number == 7 && !slow {
            println!("criterion {number} ({name}): SKIP slow suite; run with `cargo test --release --test acceptance -- --ignored`");
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run));
        let elapsed = start.elapsed().as_secs_f64();
        match result {
            Ok(o) => {
                println!("criterion {number} ({name}): {} [{elapsed:.1} s] {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
                if !o.pass {
                    failed += 1;
                }
            }
            Err(_) => {
                println!("criterion {number} ({name}): FAIL [{elapsed:.1} s] panicked");
                failed += 1;
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
