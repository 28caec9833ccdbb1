use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::grid::Grid;

fn smooth_block(grid: &Grid, count: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(count * grid.len());
    for _ in 0..count {
        let coeffs: Vec<(f64, f64, f64, f64)> =
            (0..6).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        for idx in 0..grid.len() {
            let [x, y] = grid.position(idx);
            let env = (-(x * x + y * y) / 1.5).exp();
            let mut z = Complex64::default();
            for (k, &(a, b, c, d)) in coeffs.iter().enumerate() {
                let p = match k {
                    0 => 1.0,
                    1 => x,
                    2 => y,
                    3 => x * y,
                    4 => x * x,
                    _ => y * y,
                };
                z += Complex64::new(a + c * x, b + d * y) * p;
            }
            data.push(z * env);
        }
    }
    data
}

fn problem(alpha: f64, count: usize, points: usize) -> HartreeProblem {
    let grid = Grid::new(9.0, points).unwrap();
    HartreeProblem::power_trap(&grid, 2.0, alpha, count, 0.8).unwrap()
}

#[test]
fn gradient_matches_finite_differences() {
    for &alpha in &[0.0, 0.3, 0.75] {
        for &count in &[1usize, 2, 4] {
            let p = problem(alpha, count, 32);
            let grid = p.grid().clone();
            let u = OrbitalSet::orthonormalized(&grid, count, smooth_block(&grid, count, 11)).unwrap();
            let (_, g) = p.energy_and_gradient(&u).unwrap();
            for trial in 0..3 {
                let d = project_tangent(&u, &smooth_block(&grid, count, 100 + trial)).unwrap();
                let predicted = real_inner(grid.cell_area(), &g, &d);
                let eps = 1e-5;
                let shifted = |t: f64| {
                    let data: Vec<Complex64> = u.data().iter().zip(&d).map(|(a, b)| a + b * t).collect();
                    p.energy(&OrbitalSet::from_raw(&grid, count, data).unwrap()).unwrap().total
                };
                let fd = (shifted(eps) - shifted(-eps)) / (2.0 * eps);
                let rel = (fd - predicted).abs() / predicted.abs().max(1.0);
                assert!(rel < 1e-6, "alpha {alpha} N {count}: fd {fd} vs {predicted} ({rel:e})");
            }
        }
    }
}

fn plane_wave(grid: &Grid, a: i64, b: i64) -> Vec<Complex64> {
    let dk = grid.momentum_spacing();
    let l = grid.box_length();
    (0..grid.len())
        .map(|idx| {
            let [x, y] = grid.position(idx);
            Complex64::from_polar(1.0 / l, dk * (a as f64 * x + b as f64 * y))
        })
        .collect()
}

#[test]
fn plane_wave_current_and_energy() {
    let grid = Grid::new(6.0, 24).unwrap();
    let u = OrbitalSet::from_raw(&grid, 1, plane_wave(&grid, 2, -1)).unwrap();
    assert!(u.gram_deviation() < 1e-12);
    let k = [2.0 * grid.momentum_spacing(), -grid.momentum_spacing()];
    let l2 = grid.box_length().powi(2);
    let j = compute_current(&u, &crate::grid::VectorField::zeros(&grid), 0.0);
    for idx in 0..grid.len() {
        assert!((j.x[idx] - k[0] / l2).abs() < 1e-12);
        assert!((j.y[idx] - k[1] / l2).abs() < 1e-12);
    }
    let free = HartreeProblem::new(&grid, crate::grid::ScalarField::zeros(&grid), 0.0, 1, 1.0).unwrap();
    let e = free.energy(&u).unwrap();
    assert!((e.total - (k[0] * k[0] + k[1] * k[1])).abs() < 1e-10);
    assert_eq!(e.trap, 0.0);
}

#[test]
fn real_orbitals_carry_only_gauge_current() {
    let p = problem(0.6, 2, 48);
    let grid = p.grid().clone();
    // extra envelope keeps the functions negligible at the box edge
    let real: Vec<Complex64> = smooth_block(&grid, 2, 8)
        .iter()
        .enumerate()
        .map(|(i, z)| {
            let [x, y] = grid.position(i % grid.len());
            Complex64::new(z.re * (-(x * x + y * y)).exp(), 0.0)
        })
        .collect();
    let u = OrbitalSet::orthonormalized(&grid, 2, real).unwrap();
    let rho = u.density();
    let zero = compute_current(&u, &crate::grid::VectorField::zeros(&grid), 0.0);
    assert!(zero.max_norm() < 1e-12, "{:e}", zero.max_norm());
    let a = p.vector_potential(&rho);
    let j = p.current(&u).unwrap();
    for idx in 0..grid.len() {
        assert!((j.x[idx] - 0.6 * rho.values[idx] * a.x[idx]).abs() < 1e-12);
        assert!((j.y[idx] - 0.6 * rho.values[idx] * a.y[idx]).abs() < 1e-12);
    }
}

#[test]
fn energy_is_continuous_at_zero_alpha() {
    let grid = Grid::new(9.0, 32).unwrap();
    let u = OrbitalSet::orthonormalized(&grid, 3, smooth_block(&grid, 3, 21)).unwrap();
    let e0 = HartreeProblem::power_trap(&grid, 2.0, 0.0, 3, 0.8).unwrap().energy(&u).unwrap();
    let e1 = HartreeProblem::power_trap(&grid, 2.0, 1e-8, 3, 0.8).unwrap().energy(&u).unwrap();
    let e2 = HartreeProblem::power_trap(&grid, 2.0, 2e-8, 3, 0.8).unwrap().energy(&u).unwrap();
    let d1 = e1.total - e0.total;
    let d2 = e2.total - e0.total;
    assert!(d1.abs() < 1e-6 * e0.total);
    // first-order behaviour: doubling alpha doubles the change
    assert!((d2 - 2.0 * d1).abs() < 1e-3 * d1.abs().max(1e-12) + 1e-12);
    assert!((e0.kinetic + e0.trap - e0.total).abs() <= 1e-12 * e0.total);
}

#[test]
fn linear_energy_matches_quadratic_form() {
    let p = problem(0.0, 2, 32);
    let grid = p.grid().clone();
    let u = OrbitalSet::orthonormalized(&grid, 2, smooth_block(&grid, 2, 5)).unwrap();
    let e = p.energy(&u).unwrap().total;
    let q: f64 = (0..2)
        .map(|j| {
            let hu = p.apply_linear(u.orbital(j));
            real_inner(grid.cell_area(), u.orbital(j), &hu)
        })
        .sum();
    assert!((e - q).abs() < 1e-10 * q.abs());
}

#[test]
fn density_has_orbital_mass() {
    let grid = Grid::new(7.0, 24).unwrap();
    let u = OrbitalSet::orthonormalized(&grid, 3, smooth_block(&grid, 3, 9)).unwrap();
    assert!(u.gram_deviation() < 1e-12);
    assert!((u.density().integral(&grid) - 3.0).abs() < 1e-12);
}

#[test]
fn projection_is_tangent_and_idempotent() {
    let grid = Grid::new(7.0, 24).unwrap();
    let u = OrbitalSet::orthonormalized(&grid, 3, smooth_block(&grid, 3, 1)).unwrap();
    let g = smooth_block(&grid, 3, 2);
    let xi = project_tangent(&u, &g).unwrap();
    let s = super::orbitals::overlap(&grid, 3, u.data(), &xi);
    let herm = &s + s.adjoint();
    assert!(herm.iter().all(|z| z.norm() < 1e-12));
    let again = project_tangent(&u, &xi).unwrap();
    let diff: f64 = xi.iter().zip(&again).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(diff < 1e-12);
}

#[test]
fn projection_special_directions() {
    let grid = Grid::new(7.0, 24).unwrap();
    let u = OrbitalSet::orthonormalized(&grid, 2, smooth_block(&grid, 2, 1)).unwrap();
    let normal = project_tangent(&u, u.data()).unwrap();
    assert!(normal.iter().all(|z| z.norm() < 1e-12));

    // orthogonal complement of span(U) is left untouched
    let mut g = smooth_block(&grid, 2, 4);
    let c = super::orbitals::overlap(&grid, 2, u.data(), &g);
    let proj = super::orbitals::combine(grid.len(), u.data(), &c);
    g.iter_mut().zip(&proj).for_each(|(a, b)| *a -= b);
    let xi = project_tangent(&u, &g).unwrap();
    let diff: f64 = xi.iter().zip(&g).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(diff < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn projection_is_orthogonal_to_hermitian_motions(seed in 0u64..1000, h in prop::collection::vec(-1.0f64..1.0, 9)) {
        let grid = Grid::new(7.0, 16).unwrap();
        let u = OrbitalSet::orthonormalized(&grid, 3, smooth_block(&grid, 3, seed)).unwrap();
        let xi = project_tangent(&u, &smooth_block(&grid, 3, seed + 1)).unwrap();
        let mut herm = nalgebra::DMatrix::<Complex64>::zeros(3, 3);
        for i in 0..3 {
            herm[(i, i)] = Complex64::new(h[i], 0.0);
            for j in (i + 1)..3 {
                let z = Complex64::new(h[3 + i + j - 1], h[6 + i + j - 1]);
                herm[(i, j)] = z;
                herm[(j, i)] = z.conj();
            }
        }
        let uh = super::orbitals::combine(grid.len(), u.data(), &herm);
        prop_assert!(real_inner(grid.cell_area(), &xi, &uh).abs() < 1e-12);
    }
}

#[test]
fn zero_step_retraction_is_identity() {
    let grid = Grid::new(7.0, 16).unwrap();
    let u = OrbitalSet::orthonormalized(&grid, 2, smooth_block(&grid, 2, 3)).unwrap();
    let d = smooth_block(&grid, 2, 4);
    let r = retract(&u, &d, 0.0).unwrap();
    assert_eq!(r.data(), u.data());
}

#[test]
fn retraction_is_second_order() {
    let grid = Grid::new(7.0, 16).unwrap();
    let u = OrbitalSet::orthonormalized(&grid, 2, smooth_block(&grid, 2, 3)).unwrap();
    let d = project_tangent(&u, &smooth_block(&grid, 2, 4)).unwrap();
    let err = |t: f64| {
        let r = retract(&u, &d, t).unwrap();
        let lin: Vec<Complex64> = u.data().iter().zip(&d).map(|(a, b)| a + b * t).collect();
        let diff: Vec<Complex64> = r.data().iter().zip(&lin).map(|(a, b)| a - b).collect();
        block_norm(grid.cell_area(), &diff)
    };
    let ratio = err(1e-2) / err(5e-3);
    assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
}

#[test]
fn retraction_detects_rank_loss() {
    let grid = Grid::new(7.0, 16).unwrap();
    let u = OrbitalSet::orthonormalized(&grid, 2, smooth_block(&grid, 2, 3)).unwrap();
    // Direction that maps the second orbital onto the first.
    let n = grid.len();
    let mut d = vec![Complex64::default(); 2 * n];
    for i in 0..n {
        d[n + i] = u.orbital(0)[i] - u.orbital(1)[i];
    }
    assert!(matches!(retract(&u, &d, 1.0), Err(crate::Error::RankDeficient)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn retraction_stays_orthonormal(seed in 0u64..1000, step in -3.0f64..3.0, count in 1usize..4) {
        let grid = Grid::new(7.0, 16).unwrap();
        let u = OrbitalSet::orthonormalized(&grid, count, smooth_block(&grid, count, seed)).unwrap();
        let d = project_tangent(&u, &smooth_block(&grid, count, seed + 7)).unwrap();
        let r = retract(&u, &d, step).unwrap();
        prop_assert!(r.gram_deviation() < 1e-12);
    }
}

#[test]
fn oscillator_spectrum() {
    // -Laplacian + N |x|^2 has levels 2 sqrt(N) (k + 1) with degeneracy k + 1.
    let p = problem(0.0, 4, 48);
    let pairs = lowest_eigenpairs(&p, 6, EigenOptions::default()).unwrap();
    let expected = [4.0, 8.0, 8.0, 12.0, 12.0, 12.0];
    for (v, e) in pairs.values.iter().zip(expected) {
        assert!((v - e).abs() < 1e-8, "{v} vs {e}");
    }
}

#[test]
fn free_fermions_minimize_to_shell_sum() {
    let p = problem(0.0, 4, 40);
    let init = initialize_orbitals(&p, InitMode::Random, 3).unwrap();
    let out = minimize(&p, init, &SolverParams::default(), |_, _| Ok(())).unwrap();
    assert!(out.converged());
    assert!((out.energy.total - 32.0).abs() < 1e-8, "{}", out.energy.total);
    let energies: Vec<f64> = out.trace.iter().map(|t| t.energy).collect();
    assert!(energies.windows(2).all(|w| w[1] <= w[0] + 1e-10 * w[0].abs()));
}

#[test]
fn anyon_minimization_is_deterministic_and_descends() {
    let p = problem(0.5, 3, 32);
    let params = SolverParams { gradient_tolerance: 1e-5, ..SolverParams::default() };
    let run = || {
        let init = initialize_orbitals(&p, InitMode::Linear, 0).unwrap();
        minimize(&p, init, &params, |_, _| Ok(())).unwrap()
    };
    let a = run();
    let b = run();
    assert!(a.converged());
    assert_eq!(a.trace, b.trace);
    let linear = a.trace[0].energy;
    assert!(a.energy.total < linear);
    assert!(a.orbitals.gram_deviation() < 1e-10);
}

#[test]
fn iteration_cap_is_reported() {
    let p = problem(0.3, 2, 24);
    let init = initialize_orbitals(&p, InitMode::Random, 1).unwrap();
    let params = SolverParams { max_iterations: 3, ..SolverParams::default() };
    let out = minimize(&p, init, &params, |_, _| Ok(())).unwrap();
    assert_eq!(out.termination, Termination::MaxIterations);
    assert_eq!(out.iterations, 3);
}

#[test]
fn single_orbital_initialization_is_oscillator_ground_state() {
    let count = 1;
    let p = problem(0.0, count, 40);
    let grid = p.grid().clone();
    let u = initialize_orbitals(&p, InitMode::Linear, 0).unwrap();
    // exp(-sqrt(N) |x|^2 / 2), normalized
    let w = (count as f64).sqrt();
    let g: Vec<f64> = (0..grid.len())
        .map(|i| {
            let [x, y] = grid.position(i);
            (w / std::f64::consts::PI).sqrt() * (-w * (x * x + y * y) / 2.0).exp()
        })
        .collect();
    let overlap: Complex64 =
        u.orbital(0).iter().zip(&g).map(|(a, b)| a.conj() * b).sum::<Complex64>() * grid.cell_area();
    assert!(overlap.norm() > 0.999, "{}", overlap.norm());
}

#[test]
fn degenerate_shell_initialization_is_orthonormal() {
    let p = problem(0.0, 3, 32);
    let u = initialize_orbitals(&p, InitMode::Linear, 0).unwrap();
    assert!(u.gram_deviation() < 1e-10);
}

#[test]
fn randomized_initialization_is_seeded() {
    let p = problem(0.2, 3, 24);
    let a = initialize_orbitals(&p, InitMode::Random, 42).unwrap();
    let b = initialize_orbitals(&p, InitMode::Random, 42).unwrap();
    let c = initialize_orbitals(&p, InitMode::Random, 43).unwrap();
    assert_eq!(a.data(), b.data());
    assert_ne!(a.data(), c.data());
    assert!(a.gram_deviation() < 1e-10);
}

#[test]
fn translated_trap_translates_density() {
    // shift by a whole number of grid cells so both problems share lattice points
    let grid = Grid::new(9.0, 32).unwrap();
    let shift = 3usize;
    let offset = shift as f64 * grid.spacing();
    let count = 2;
    let centered = HartreeProblem::power_trap(&grid, 2.0, 0.4, count, 0.8).unwrap();
    let trap = crate::grid::ScalarField::from_fn(&grid, |x| (x[0] - offset).powi(2) + x[1].powi(2));
    let moved = HartreeProblem::new(&grid, trap, 0.4, count, 0.8).unwrap();
    let params = SolverParams { gradient_tolerance: 1e-7, ..SolverParams::default() };

    let init = initialize_orbitals(&centered, InitMode::Linear, 0).unwrap();
    let m = grid.points();
    let shifted_data: Vec<Complex64> = init
        .orbitals()
        .flat_map(|u| (0..grid.len()).map(move |idx| u[((idx / m + m - shift) % m) * m + idx % m]))
        .collect();
    let init_moved = OrbitalSet::from_raw(&grid, count, shifted_data).unwrap();

    let a = minimize(&centered, init, &params, |_, _| Ok(())).unwrap();
    let b = minimize(&moved, init_moved, &params, |_, _| Ok(())).unwrap();
    let ra = a.orbitals.density();
    let rb = b.orbitals.density();
    let peak = ra.max_abs();
    let mut worst = 0.0f64;
    for idx in 0..grid.len() {
        let src = ((idx / m + m - shift) % m) * m + idx % m;
        worst = worst.max((rb.values[idx] - ra.values[src]).abs());
    }
    assert!(worst < 1e-4 * peak, "density mismatch {worst:e} (peak {peak})");
    assert!((a.energy.total - b.energy.total).abs() < 1e-6 * a.energy.total);
}
