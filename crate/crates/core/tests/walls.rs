mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use common::*;
use ends_splitter::ends::end_classes;
use ends_splitter::harmonic::{solve_dirichlet, SolverConfig};
use ends_splitter::walls::{analyze_walls, build_walls, choose_threshold, WallOptions};
use ends_splitter::{build_truncation, Edge, Error, Presentation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn walls_are_translated_level_cuts() {
    let s = first_letter(&Presentation::free(2), 8, 1, 'a');
    let opts = WallOptions { sample_radius: 2, ..WallOptions::default() };
    let sample = s.t.group_ball(2);
    let cfg = choose_threshold(&s.h, &sample, &opts).unwrap();
    let family = build_walls(&s.h, &cfg).unwrap();
    let thr = cfg.threshold;
    let level_cut: Vec<Edge> = s.t.edges().filter(|e| (s.h.value(e.0) > thr) != (s.h.value(e.1) > thr)).collect();
    let g = s.t.group();
    for w in &family.walls {
        for label in &w.labels {
            let inv = g.inverse(label);
            let mut expected: BTreeSet<Edge> = BTreeSet::new();
            for e in &level_cut {
                if let (Some(a), Some(b)) = (s.t.left_multiply(&inv, e.0), s.t.left_multiply(&inv, e.1)) {
                    if family.in_domain(a) && family.in_domain(b) {
                        expected.insert(Edge::new(a, b));
                    }
                }
            }
            let got: BTreeSet<Edge> = w.edges.iter().copied().collect();
            assert_eq!(got, expected, "wall of {label}");
        }
    }
}

#[test]
fn random_chi_gives_a_tree_or_a_diagnostic() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let setups = [(Presentation::free(2), 8u32, 2u32), (Presentation::free_product(&[2, 3]), 12, 2)];
    let (mut trees, mut diagnosed) = (0, 0);
    for i in 0..24 {
        let (p, rho, base) = &setups[i % 2];
        let t = Arc::new(build_truncation(p, *rho).unwrap());
        let classes = end_classes(&t, *base).unwrap();
        let full = (1u64 << classes.len()) - 1;
        let chi = chi_from_mask(&classes, rng.gen_range(1..full));
        let h = solve_dirichlet(&t, &classes, &chi, &SolverConfig::default()).unwrap();
        match analyze_walls(&h, &WallOptions { sample_radius: 1, ..WallOptions::default() }) {
            Ok(a) => {
                assert!(a.tree.is_tree() && a.tree.euler, "{p} chi {:?}", chi.values);
                assert_eq!(a.tree.walls.len() + 1, a.tree.regions.len());
                trees += 1;
            }
            Err(Error::CrossingWalls(msg) | Error::NotATree(msg)) => {
                assert!(!msg.is_empty());
                diagnosed += 1;
            }
            Err(e @ Error::NoRegularValue { .. }) => panic!("{p}: {e}"),
            Err(e) => panic!("unexpected error {e}"),
        }
    }
    assert_eq!(trees + diagnosed, 24);
    assert!(trees > 0);
}

#[test]
fn sample_radius_zero_is_a_single_edge() {
    let s = first_letter(&Presentation::free_product(&[2, 3]), 10, 2, 'a');
    let a = analyze_walls(&s.h, &WallOptions { sample_radius: 0, ..WallOptions::default() }).unwrap();
    assert_eq!(a.tree.walls.len(), 1);
    assert_eq!(a.tree.regions.len(), 2);
    assert!(a.action.precisely_invariant());
}
