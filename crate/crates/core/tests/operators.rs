mod common;

use ahe_core::average::{advanced_average_fill, simple_average_fill};
use ahe_core::bench::median_filter;
use ahe_core::lift::gaussian_smooth;
use ahe_core::spectral::evolve_const;
use ahe_core::varcoef::evolve_varcoef;
use ahe_core::{CoefficientField, CorruptionMask, Label, PeriodicImage};
use common::*;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn gaussian_smoothing_matches_direct_convolution() {
    let impulse = PeriodicImage::from_fn(16, |x, y| if (x, y) == (3, 11) { 1.0 } else { 0.0 }).unwrap();
    let smooth = gaussian_smooth(&impulse, 1.5).unwrap();
    assert!(max_abs_diff(smooth.as_slice(), &gaussian_direct(&impulse, 1.5)) < 1e-10);

    for (m, sigma) in [(9, 0.7), (12, 4.0), (16, 1.0)] {
        let img = random_image(m, 0.0, m as u64);
        let smooth = gaussian_smooth(&img, sigma).unwrap();
        assert!(max_abs_diff(smooth.as_slice(), &gaussian_direct(&img, sigma)) < 1e-10, "M={m} sigma={sigma}");
    }
}

#[test]
fn drift_stepping_converges_as_substeps_double() {
    let stack = random_stack(12, 4, 7);
    let m = 12;
    let a: Vec<f64> = (0..m * m).map(|i| 0.4 + 0.8 * ((i % m) as f64 / m as f64)).collect();
    let b: Vec<f64> = (0..m * m).map(|i| 0.2 + 0.6 * ((i / m) as f64 / m as f64)).collect();
    let coeffs = CoefficientField::new(m, a, b).unwrap();
    let runs: Vec<Vec<f64>> = [5, 10, 20, 40, 80]
        .iter()
        .map(|&s| evolve_varcoef(&stack, &coeffs, 0.2, s, 2).unwrap().as_slice().to_vec())
        .collect();
    let gaps: Vec<f64> = runs.windows(2).map(|w| max_abs_diff(&w[0], &w[1])).collect();
    for g in gaps.windows(2) {
        assert!(g[1] < g[0], "gaps {gaps:?}");
    }
}

#[test]
fn two_level_field_matches_explicit_euler() {
    let (m, n) = (6, 3);
    let stack = random_stack(m, n, 8);
    let a: Vec<f64> = (0..m * m).map(|i| if (i % m + i / m) % 2 == 0 { 0.3 } else { 1.2 }).collect();
    let b: Vec<f64> = (0..m * m).map(|i| if i % m < 3 { 0.5 } else { 0.9 }).collect();
    let coeffs = CoefficientField::new(m, a.clone(), b.clone()).unwrap();
    let fast = evolve_varcoef(&stack, &coeffs, 0.02, 400, 1).unwrap();
    let oracle = explicit_euler(&stack, &a, &b, m as f64, 0.02, 20_000);
    assert!(max_abs_diff(fast.as_slice(), &oracle) < 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn constant_field_reduces_to_constant_solver(seed in 0u64..1000, a in 0.0f64..2.0, b in 0.0f64..2.0) {
        let stack = random_stack(8, 4, seed);
        let coeffs = CoefficientField::constant(8, a, b).unwrap();
        let var = evolve_varcoef(&stack, &coeffs, 0.1, 4, 6).unwrap();
        let constant = evolve_const(&stack, a, b, 0.1, 24).unwrap();
        prop_assert!(max_abs_diff(var.as_slice(), constant.as_slice()) <= 1e-10);
        prop_assert!(var.as_slice().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn simple_fill_matches_naive_peeling(seed in 0u64..5000, p in 0.1f64..0.95) {
        let truth = random_image(10, 0.01, seed);
        let mask = random_mask(10, p, seed + 1);
        prop_assume!(mask.good_count() > 0);
        let f = apply_mask(&truth, &mask);
        let fast = simple_average_fill(&f, &mask).unwrap();
        let naive = naive_peel(&f, &mask, |_, nb| nb.iter().map(|n| n.1).sum::<f64>() / nb.len() as f64);
        prop_assert!(max_abs_diff(fast.as_slice(), &naive) < 1e-14);
    }

    #[test]
    fn median_fill_matches_naive_peeling(seed in 0u64..5000, p in 0.1f64..0.95) {
        let truth = random_image(10, 0.01, seed);
        let mask = random_mask(10, p, seed + 2);
        prop_assume!(mask.good_count() > 0);
        let f = apply_mask(&truth, &mask);
        let fast = median_filter(&f, &mask).unwrap();
        let naive = naive_peel(&f, &mask, |_, nb| {
            let mut v: Vec<f64> = nb.iter().map(|n| n.1).collect();
            v.sort_by(f64::total_cmp);
            v[(v.len() - 1) / 2]
        });
        prop_assert_eq!(fast.as_slice(), &naive[..]);
        for (i, l) in mask.labels().iter().enumerate() {
            if *l == Label::Good {
                prop_assert_eq!(fast.as_slice()[i].to_bits(), f.as_slice()[i].to_bits());
            }
        }
    }
}

#[test]
fn fused_fill_minimizes_the_objective_on_isolated_holes() {
    let mut r = rng(9);
    for trial in 0..5 {
        let m = 12;
        let truth = random_image(m, 0.05, 100 + trial);
        let h = random_image(m, 0.05, 200 + trial);
        // holes on a sparse lattice never touch each other, so one round fills them all
        let labels = (0..m * m)
            .map(|i| {
                let (x, y) = (i % m, i / m);
                if x % 3 == 1 && y % 3 == 1 && r.random::<f64>() < 0.8 { Label::Bad } else { Label::Good }
            })
            .collect();
        let mask = CorruptionMask::new(m, labels).unwrap();
        let f = apply_mask(&truth, &mask);
        let filled = advanced_average_fill(&f, &mask, &h).unwrap();
        for y in 0..m {
            for x in 0..m {
                if mask.is_good(x, y) {
                    assert_eq!(filled.get(x, y).to_bits(), f.get(x, y).to_bits());
                    continue;
                }
                let nb: Vec<(f64, f64)> = (0..9)
                    .map(|k| ((x + m + k % 3 - 1) % m, (y + m + k / 3 - 1) % m))
                    .filter(|&(nx, ny)| (nx, ny) != (x, y))
                    .map(|(nx, ny)| (f.get(nx, ny), h.get(nx, ny)))
                    .collect();
                let best = grid_search(h.get(x, y), &nb, 1e-5);
                assert!((filled.get(x, y) - best).abs() < 1e-4, "({x},{y})");
            }
        }
    }
}
