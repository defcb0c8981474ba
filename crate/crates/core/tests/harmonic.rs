mod common;

use std::sync::Arc;

use common::*;
use ends_splitter::ends::{end_classes, EndFunction};
use ends_splitter::harmonic::{
    decay_profile, energy, energy_form, lattice_ops, pullback, solve_dirichlet, solve_with_boundary, spectral_gap,
    HarmonicField, SolverConfig,
};
use ends_splitter::{build_truncation, Presentation, VertexId};
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

#[test]
fn elimination_oracle_agrees_with_dense_lu() {
    for (p, rho) in
        [(Presentation::free(2), 4), (Presentation::free_product(&[2, 3]), 7), (Presentation::free_product(&[4, 0]), 4)]
    {
        let t = build_truncation(&p, rho).unwrap();
        let classes = end_classes(&t, 1).unwrap();
        let mut chi = vec![0u8; classes.len()];
        chi[0] = 1;
        let chi = EndFunction::new(1, chi).unwrap();
        let b = boundary_values(&t, &classes, &chi);
        assert!(max_diff(&direct_solve(&t, &b), &dense_solve(&t, &b)) < 1e-12, "{p}");
    }
}

#[test]
fn iterative_solve_matches_direct_solve() {
    let cases = [
        (Presentation::free(2), 8, 1),
        (Presentation::free(3), 5, 2),
        (Presentation::free_product(&[2, 3]), 12, 2),
        (Presentation::free_product(&[4, 0]), 6, 1),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (p, rho, base) in cases {
        let t = Arc::new(build_truncation(&p, rho).unwrap());
        let classes = end_classes(&t, base).unwrap();
        let full = (1u64 << classes.len()) - 1;
        let mask = rng.gen_range(1..full);
        let chi = chi_from_mask(&classes, mask);
        let h = solve_dirichlet(&t, &classes, &chi, &SolverConfig::default()).unwrap();
        let x = direct_solve(&t, &boundary_values(&t, &classes, &chi));
        assert!(max_diff(h.values(), &x) < 1e-6, "{p} mask {mask:b}");
        assert!((energy(&h).total - energy_of(&t, &x)).abs() < 1e-5, "{p}");
    }
}

#[test]
fn maximum_principle_and_mean_value() {
    for (p, rho) in [(Presentation::free(2), 9), (Presentation::free_product(&[2, 3]), 12), (Presentation::free(3), 5)]
    {
        let s = first_letter(&p, rho, 1, 'a');
        let (lo, hi) = s.h.interior_range();
        assert!(lo > 0.0 && hi < 1.0, "{p}: [{lo}, {hi}]");
        // Independent restatement of the mean-value defect.
        let t = &s.t;
        let worst = t
            .interior_vertices()
            .map(|v| {
                let mean: f64 = t.neighbors(v).map(|u| s.h.value(u)).sum::<f64>() / t.degree() as f64;
                (s.h.value(v) - mean).abs()
            })
            .fold(0.0, f64::max);
        assert!(worst <= TOL, "{p}: {worst}");
    }
}

#[test]
fn energy_is_minimal_under_single_vertex_perturbation() {
    let s = first_letter(&Presentation::free(2), 7, 1, 'a');
    let base = energy(&s.h).total;
    let eps = 10.0 * TOL;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let interior: Vec<VertexId> = s.t.interior_vertices().collect();
    for _ in 0..100 {
        let v = interior[rng.gen_range(0..interior.len())];
        for sign in [1.0, -1.0] {
            let mut x = s.h.values().to_vec();
            x[v.index()] += sign * eps;
            // Exact change: d ε² ± 2ε (d h(v) - Σ neighbors); the linear term
            // is bounded by 2 ε d TOL.
            let change = energy_of(&s.t, &x) - base;
            let d = s.t.degree() as f64;
            assert!(change > d * eps * eps - 2.0 * eps * d * TOL - 1e-15, "{change}");
        }
    }
}

#[test]
fn harnack_bound_on_positive_fields() {
    // At an interior vertex v with neighbor w, d h(v) >= h(w), so
    // (h(w) - h(v)) / h(v) <= d - 1.
    for (p, rho) in [(Presentation::free(2), 8), (Presentation::free_product(&[2, 3]), 10)] {
        let s = first_letter(&p, rho, 1, 'a');
        let t = &s.t;
        let d = t.degree() as f64;
        for e in t.edges() {
            let (u, v) = if s.h.value(e.0) <= s.h.value(e.1) { (e.0, e.1) } else { (e.1, e.0) };
            if !t.is_interior(u) {
                continue;
            }
            let ratio = (s.h.value(v) - s.h.value(u)) / s.h.value(u);
            assert!(ratio <= d - 1.0 + 1e-6, "{p} edge {e:?}: {ratio}");
        }
    }
}

#[test]
fn window_energies_settle_across_radii() {
    let window = 3;
    let mut energies = Vec::new();
    for rho in 5..=11 {
        let s = first_letter(&Presentation::free(2), rho, 1, 'a');
        let inner = s.t.ball_len(window);
        let e: f64 =
            s.t.edges()
                .filter(|e| e.0.index() < inner && e.1.index() < inner)
                .map(|e| (s.h.value(e.0) - s.h.value(e.1)).powi(2))
                .sum();
        energies.push(e);
    }
    let steps: Vec<f64> = energies.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    for w in steps.windows(2) {
        assert!(w[1] < w[0], "{energies:?}");
    }
    assert!(*steps.last().unwrap() < 1e-3, "{steps:?}");
}

#[test]
fn monotone_in_boundary_data() {
    let t = Arc::new(build_truncation(&Presentation::free(2), 7).unwrap());
    let classes = end_classes(&t, 2).unwrap();
    let full = (1u64 << classes.len()) - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let low = rng.gen_range(1..full);
        let high = low | rng.gen_range(0..full);
        if high == full {
            continue;
        }
        let cfg = SolverConfig::default();
        let h1 = solve_dirichlet(&t, &classes, &chi_from_mask(&classes, low), &cfg).unwrap();
        let h2 = solve_dirichlet(&t, &classes, &chi_from_mask(&classes, high), &cfg).unwrap();
        for (a, b) in h1.values().iter().zip(h2.values()) {
            assert!(*a <= *b + 2.0 * TOL);
        }
    }
}

#[test]
fn pullback_solves_the_translated_problem() {
    let s = first_letter(&Presentation::free(2), 12, 1, 'a');
    let exact = direct_solve(&s.t, &boundary_values(&s.t, &s.classes, &s.chi));
    let solver_error = max_diff(s.h.values(), &exact);
    let a = s.t.group().parse_word("a").unwrap();
    let pulled = pullback(&s.h, &a);
    // On B_8 every vertex translates into the ball, so the pulled-back field
    // is defined there and harmonic on its interior.
    let t8 = Arc::new(build_truncation(&Presentation::free(2), 8).unwrap());
    let on_b8: Vec<f64> = t8.vertices().map(|v| pulled.get(v).unwrap()).collect();
    let defect = t8
        .interior_vertices()
        .map(|v| (on_b8[v.index()] - t8.neighbors(v).map(|u| on_b8[u.index()]).sum::<f64>() / 4.0).abs())
        .fold(0.0, f64::max);
    assert!(defect <= TOL, "{defect:e}");
    let mut shell = vec![0.0; t8.len()];
    for v in t8.shell_vertices() {
        shell[v.index()] = on_b8[v.index()];
    }
    let translated = direct_solve(&t8, &shell);
    let worst = max_diff(&translated, &on_b8);
    assert!(worst <= solver_error + 1e-12, "{worst:e} vs solver error {solver_error:e}");
    let iterative = solve_with_boundary(&t8, shell, &SolverConfig::default()).unwrap();
    assert!(max_diff(iterative.values(), &translated) < 1e-6);
}

#[test]
fn branch_decay_ratio_is_at_most_half() {
    let s = first_letter(&Presentation::free(2), 12, 1, 'a');
    let b = s.t.parse_vertex("b").unwrap();
    let branch = &s.classes.classes[s.classes.class_of(b).unwrap()].component;
    let p = decay_profile(&s.h, &branch.boundary_attachment, branch, 0);
    assert!(p.by_distance[0] <= 1.0);
    for (d, r) in p.ratios().iter().enumerate().skip(1) {
        assert!(*r <= 0.5, "d={d}: {r}");
    }
}

#[test]
fn spectral_estimate_matches_dense_eigensolve() {
    let t = build_truncation(&Presentation::free(2), 3).unwrap();
    let ids: Vec<VertexId> = t.interior_vertices().collect();
    let m = ids.len();
    let mut a = DMatrix::<f64>::zeros(m, m);
    for (i, &v) in ids.iter().enumerate() {
        a[(i, i)] = t.degree() as f64;
        for (j, &u) in ids.iter().enumerate() {
            if t.neighbors(v).any(|w| w == u) {
                a[(i, j)] -= 1.0;
            }
        }
    }
    let lambda = SymmetricEigen::new(a).eigenvalues.min();
    let rep = spectral_gap(&t).unwrap();
    assert!((rep.lambda1_estimate - lambda).abs() < 1e-6, "{} vs {lambda}", rep.lambda1_estimate);
    assert!(rep.lambda1_lower <= rep.lambda1_estimate);
}

#[test]
fn spectral_estimate_decreases_toward_the_tree_bottom() {
    let floor = 4.0 - 2.0 * 3f64.sqrt();
    let mut last = f64::INFINITY;
    for rho in [3, 5, 7] {
        let rep = spectral_gap(&build_truncation(&Presentation::free(2), rho).unwrap()).unwrap();
        assert!(rep.lambda1_estimate < last && rep.lambda1_estimate > floor);
        assert!(rep.lambda1_lower <= rep.lambda1_estimate);
        last = rep.lambda1_estimate;
    }
}

fn random_pair(xs: &[f64]) -> (HarmonicField, HarmonicField) {
    let t = Arc::new(build_truncation(&Presentation::free_product(&[2, 3]), 5).unwrap());
    let n = t.len();
    let u = HarmonicField::from_values(t.clone(), xs[..n].to_vec()).unwrap();
    let v = HarmonicField::from_values(t, xs[n..2 * n].to_vec()).unwrap();
    (u, v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn parallelogram_identity(xs in proptest::collection::vec(-1.0f64..1.0, 2 * 64)) {
        let (u, v) = random_pair(&xs);
        let lhs = energy(&u.sub(&v).unwrap()).total;
        let rhs = energy(&u).total + energy(&v).total - 2.0 * energy_form(&u, &v).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn lattice_defect_lives_on_crossing_edges(xs in proptest::collection::vec(0.0f64..1.0, 2 * 64)) {
        let (u, v) = random_pair(&xs);
        let res = lattice_ops(&u, &v.to_partial(), TOL).unwrap();
        let d = res.energies.defect();
        prop_assert!(d >= -1e-12);
        if res.crossing_edges.is_empty() {
            prop_assert!(d.abs() <= 1e-12);
        }
    }
}
