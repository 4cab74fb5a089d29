mod common;

use ahe_core::spectral::{cn_step, default_steps, evolve_const, symbol, to_spatial, to_spectral, Complex64};
use ahe_core::SpectralState;
use common::*;
use proptest::prelude::*;

#[test]
fn forward_transform_matches_direct_dft() {
    let stack = random_stack(6, 3, 1);
    let state = to_spectral(&stack);
    for p in 0..3 {
        let direct = dft2(&layer(&stack, p), 6, false);
        for ky in 0..6 {
            for kx in 0..6 {
                let err = (state.block(kx, ky)[p] - direct[ky * 6 + kx]).norm();
                assert!(err < 1e-12, "({kx},{ky},{p}): {err}");
            }
        }
    }
    assert!(max_abs_diff(to_spatial(&state).as_slice(), stack.as_slice()) < 1e-14);
}

/// One Crank–Nicolson step per block, solved densely.
fn dense_cn(state: &SpectralState, source: &SpectralState, a: f64, b: f64, dt: f64) -> Vec<Complex64> {
    let (m, n) = (state.size(), state.layers());
    let mut out = Vec::with_capacity(m * m * n);
    for ky in 0..m {
        for kx in 0..m {
            let l = generator(m, n, a, b, m as f64, kx, ky);
            let mut lhs = vec![0.0; n * n];
            let mut rhs_op = vec![0.0; n * n];
            for i in 0..n * n {
                let id = if i % (n + 1) == 0 { 1.0 } else { 0.0 };
                lhs[i] = id - 0.5 * dt * l[i];
                rhs_op[i] = id + 0.5 * dt * l[i];
            }
            let psi = state.block(kx, ky);
            let d = source.block(kx, ky);
            let rhs: Vec<Complex64> = (0..n)
                .map(|p| (0..n).map(|q| psi[q] * rhs_op[p * n + q]).sum::<Complex64>() + d[p] * dt)
                .collect();
            let re = solve_real(&lhs, &rhs.iter().map(|z| z.re).collect::<Vec<_>>(), n);
            let im = solve_real(&lhs, &rhs.iter().map(|z| z.im).collect::<Vec<_>>(), n);
            out.extend(re.into_iter().zip(im).map(|(r, i)| Complex64::new(r, i)));
        }
    }
    out
}

#[test]
fn crank_nicolson_step_matches_dense_solve() {
    for (m, n) in [(4, 5), (5, 4), (6, 2), (4, 1)] {
        let state = to_spectral(&random_stack(m, n, 10 + m as u64));
        let source = to_spectral(&random_stack(m, n, 20 + n as u64));
        let sym = symbol(m, n).unwrap();
        let fast = cn_step(&state, &sym, 1.3, 0.7, 0.05, Some(&source)).unwrap();
        let dense = dense_cn(&state, &source, 1.3, 0.7, 0.05);
        let err = fast
            .as_slice()
            .iter()
            .zip(&dense)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-11, "M={m} N={n}: {err}");
    }
}

#[test]
fn small_steps_track_the_exponential() {
    let stack = random_stack(5, 3, 3);
    let sym = symbol(5, 3).unwrap();
    let mut state = to_spectral(&stack);
    for _ in 0..10 {
        state = cn_step(&state, &sym, 0.9, 1.4, 1e-4, None).unwrap();
    }
    let stepped: Vec<f64> = to_spatial(&state).as_slice().iter().map(|v| v.max(0.0)).collect();
    let exact = evolve_dense(&stack, 0.9, 1.4, 1e-3);
    assert!(max_rel_err(&stepped, &exact) < 1e-10);
}

#[test]
fn odd_sizes_match_the_dense_oracle() {
    for (m, n, a, b) in [(5, 3, 0.5, 2.0), (7, 5, 2.0, 0.5), (3, 6, 1.0, 1.0)] {
        let stack = random_stack(m, n, 40 + m as u64);
        let fast = evolve_const(&stack, a, b, 0.1, 1024).unwrap();
        let dense = evolve_dense(&stack, a, b, 0.1);
        let err = max_rel_err(fast.as_slice(), &dense);
        assert!(err <= 1e-6, "M={m} N={n}: {err}");
    }
}

#[test]
fn output_is_clamped_non_negative() {
    let stack = random_stack(16, 4, 5);
    let out = evolve_const(&stack, 0.5, 4.0, 0.3, 200).unwrap();
    assert!(out.as_slice().iter().all(|&v| v >= 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn parameter_scaling(seed in 0u64..1000, a in 0.1f64..2.0, b in 0.1f64..2.0, c in 0.2f64..5.0) {
        let stack = random_stack(8, 4, seed);
        let lhs = evolve_const(&stack, a, b, 0.1, 64).unwrap();
        let rhs = evolve_const(&stack, a / c, b / c, 0.1 * c, 64).unwrap();
        prop_assert!(max_rel_err(lhs.as_slice(), rhs.as_slice()) < 1e-12);
    }

    #[test]
    fn translation_equivariance(seed in 0u64..1000, sx in -9isize..9, sy in -9isize..9) {
        let stack = random_stack(8, 3, seed);
        let lhs = evolve_const(&stack.circular_shift(sx, sy), 1.1, 0.6, 0.1, 50).unwrap();
        let rhs = evolve_const(&stack, 1.1, 0.6, 0.1, 50).unwrap().circular_shift(sx, sy);
        prop_assert!(max_abs_diff(lhs.as_slice(), rhs.as_slice()) < 1e-12);
    }

    #[test]
    fn linear_evolution_conserves_mass(seed in 0u64..1000, a in 0.0f64..3.0, b in 0.0f64..3.0) {
        let stack = random_stack(8, 5, seed);
        let sym = symbol(8, 5).unwrap();
        let steps = default_steps(a, b, 8.0, 0.2);
        let mut state = to_spectral(&stack);
        for _ in 0..steps {
            state = cn_step(&state, &sym, a, b, 0.2 / steps as f64, None).unwrap();
        }
        let evolved = to_spatial(&state);
        prop_assert!((evolved.sum() - stack.sum()).abs() <= 1e-12 * stack.sum());
    }
}
