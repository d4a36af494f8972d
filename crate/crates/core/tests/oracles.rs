//! Independent computations checked against the closed-form paths.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qubit_transfer::algebra::{generator, transition_matrix, BaseCoordinates, Matrix4};
use qubit_transfer::dynamics::{propagate_transition, rk4_on_grid, uniform_grid};
use qubit_transfer::transfer::{
    default_design, endpoint_transition, extract_blocks, predicted_final, Branch, TransferSpec,
};
use qubit_transfer::weinorman::{cbh_coefficients, gdot_from_controls, wn_inverse, wn_matrix};
use qubit_transfer::FlatDesign;

fn reference_design() -> FlatDesign {
    default_design(&TransferSpec::reference_scenario()).unwrap()
}

/// Grid whose interior nodes and RK4 stages never land on `T/2`, where `cos 2g2`
/// vanishes for the linear `g2` profile.
fn shifted_grid(horizon: f64, steps: usize) -> Vec<f64> {
    let h = horizon / steps as f64;
    let mut grid = vec![0.0];
    grid.extend((1..steps).map(|k| k as f64 * h - h / 3.0));
    grid.push(horizon);
    grid
}

#[test]
fn base_functions_recovered_from_controls() {
    // g' = W^{-1}(g) (u1, u2, 0) with g(0) = 0 must reproduce the designed path
    let design = reference_design();
    let grid = shifted_grid(design.horizon(), 10_000);
    let path = rk4_on_grid(
        |t, g: &[f64; 3]| {
            let u = design.synthesize_controls(t)?;
            gdot_from_controls(&BaseCoordinates::new(g[0], g[1], g[2]), u.u1, u.u2)
        },
        &grid,
        [0.0; 3],
    )
    .unwrap();
    let mut worst: f64 = 0.0;
    for (&t, g) in grid.iter().zip(&path) {
        let exact = design.coordinates(t).unwrap().as_array();
        worst = (0..3).fold(worst, |w, i| w.max((g[i] - exact[i]).abs()));
    }
    assert!(worst <= 1e-5, "max deviation {worst:e}");
}

#[test]
fn transition_ivp_from_coefficients() {
    // Phi' = (f1 F1 + f2 F2 + f3 F3) Phi, coefficients from the Wei-Norman map
    let design = reference_design();
    let grid = uniform_grid(design.horizon(), 10_000);
    let phis = propagate_transition(
        |t| Ok(cbh_coefficients(&design.coordinates(t)?)?.generator()),
        &grid,
    )
    .unwrap();
    for (&t, phi) in grid.iter().zip(&phis) {
        let exact = transition_matrix(&design.coordinates(t).unwrap()).unwrap();
        assert!((*phi - exact).frobenius_norm() <= 1e-6, "t = {t}");
    }
}

#[test]
fn g1_rate_matches_finite_differences() {
    let design = reference_design();
    let t_end = design.horizon();
    let h = 1e-5;
    for k in 1..1000 {
        let t = t_end * k as f64 / 1000.0;
        if (t - t_end / 2.0).abs() < 1e-3 {
            continue;
        }
        let fd = (design.recover_g1(t + h).unwrap() - design.recover_g1(t - h).unwrap()) / (2.0 * h);
        let exact = design.g1_dot(t).unwrap();
        assert!((fd - exact).abs() <= 1e-6, "t = {t}: {fd} vs {exact}");
    }
}

#[test]
fn g1_quarter_horizon_value() {
    let g1 = reference_design().recover_g1(2.5).unwrap();
    assert!((g1 - (-0.462291262834479)).abs() < 1e-13, "{g1}");
}

#[test]
fn wn_inverse_matches_adjugate() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..200 {
        let g1 = rng.gen_range(-PI..PI);
        let g2 = rng.gen_range(-PI..PI);
        if (2.0 * g2).cos().abs() < 1e-3 {
            continue;
        }
        let w = wn_matrix(g1, g2).0;
        let det = w[0][0] * (w[1][1] * w[2][2] - w[1][2] * w[2][1])
            - w[0][1] * (w[1][0] * w[2][2] - w[1][2] * w[2][0])
            + w[0][2] * (w[1][0] * w[2][1] - w[1][1] * w[2][0]);
        let cof = |r: usize, c: usize| {
            let (r0, r1) = ((r + 1) % 3, (r + 2) % 3);
            let (c0, c1) = ((c + 1) % 3, (c + 2) % 3);
            w[r0][c0] * w[r1][c1] - w[r0][c1] * w[r1][c0]
        };
        let inv = wn_inverse(g1, g2).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let adj = cof(j, i) / det;
                assert!((inv[(i, j)] - adj).abs() <= 1e-9 * (1.0 + adj.abs()), "({i},{j})");
            }
        }
    }
}

#[test]
fn exponentials_match_power_series() {
    for i in 1..=3 {
        let f = generator(i).unwrap();
        for &g in &[-2.7, -0.4, 0.0, 0.9, FRAC_PI_2, 3.1] {
            let mut term = Matrix4::IDENTITY;
            let mut sum = Matrix4::IDENTITY;
            for n in 1..30 {
                term = (term * f).scale(g / n as f64);
                sum = sum + term;
            }
            let closed = qubit_transfer::algebra::exp_generator(i, g).unwrap();
            assert!(closed.approx_eq(&sum, 1e-13), "F{i}, g = {g}");
        }
    }
}

#[test]
fn predicted_final_state_branch_b() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..100 {
        let alpha = rng.gen_range(-PI..PI);
        let beta = rng.gen_range(-PI..PI);
        let spec = TransferSpec::new(alpha, beta, 1.0, Branch::B).unwrap();
        let blocks = extract_blocks(&endpoint_transition(&spec));
        let [x1, x2] = predicted_final(&blocks, alpha).unwrap();
        assert!((x1 - beta.cos()).abs() <= 1e-12 && (x2 - beta.sin()).abs() <= 1e-12);
    }
}

#[test]
fn scenario_final_state_closed_form() {
    // x(T) = Phi(T) x0 with g(T) = (0, pi/2, 5pi/6), x0 = (0, 0, sin alpha, cos alpha)
    let phi = transition_matrix(&BaseCoordinates::new(0.0, FRAC_PI_2, 5.0 * PI / 6.0)).unwrap();
    let x0 = [0.0, 0.0, (-2.0 * PI / 3.0).sin(), (-2.0 * PI / 3.0).cos()];
    let x = phi.mul_vec(&x0);
    let expect = [0.5, 3f64.sqrt() / 2.0, 0.0, 0.0];
    for k in 0..4 {
        assert!((x[k] - expect[k]).abs() < 1e-15, "{x:?}");
    }
}
