#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use ends_splitter::ends::{end_classes, EndClasses, EndFunction};
use ends_splitter::harmonic::{solve_dirichlet, HarmonicField, SolverConfig};
use ends_splitter::{build_truncation, Presentation, Truncation};
use nalgebra::{DMatrix, DVector};

pub struct Solved {
    pub t: Arc<Truncation>,
    pub classes: EndClasses,
    pub chi: EndFunction,
    pub h: HarmonicField,
}

pub fn first_letter(p: &Presentation, rho: u32, base: u32, letter: char) -> Solved {
    let t = Arc::new(build_truncation(p, rho).unwrap());
    let classes = end_classes(&t, base).unwrap();
    let chi = EndFunction::first_letter(&t, &classes, letter).unwrap();
    let h = solve_dirichlet(&t, &classes, &chi, &SolverConfig::default()).unwrap();
    Solved { t, classes, chi, h }
}

/// Boundary vector: `chi` on shell vertices, zero elsewhere.
pub fn boundary_values(t: &Truncation, classes: &EndClasses, chi: &EndFunction) -> Vec<f64> {
    t.vertices()
        .map(|v| match classes.class_of(v) {
            Some(k) if t.is_shell(v) => chi.value(k) as f64,
            _ => 0.0,
        })
        .collect()
}

/// Harmonic extension of the shell values by Gaussian elimination on the
/// sparse interior system, eliminating the deepest vertices first.
pub fn direct_solve(t: &Truncation, boundary: &[f64]) -> Vec<f64> {
    let n = t.len();
    let deg = t.degree() as f64;
    let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
    let mut rhs = vec![0.0; n];
    for v in t.interior_vertices() {
        let i = v.index();
        *rows[i].entry(i).or_insert(0.0) += deg;
        for u in t.neighbors(v) {
            if t.is_interior(u) {
                *rows[i].entry(u.index()).or_insert(0.0) -= 1.0;
            } else {
                rhs[i] += boundary[u.index()];
            }
        }
    }
    let mut order: Vec<usize> = t.interior_vertices().map(|v| v.index()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(t.depth(ends_splitter::VertexId(i as u32))));
    let mut done = vec![false; n];
    for &p in &order {
        done[p] = true;
        let pivot_row = rows[p].clone();
        let pivot = pivot_row[&p];
        let targets: Vec<usize> = pivot_row.keys().copied().filter(|&r| !done[r]).collect();
        for r in targets {
            let Some(&a) = rows[r].get(&p) else { continue };
            let f = a / pivot;
            for (&c, &x) in &pivot_row {
                *rows[r].entry(c).or_insert(0.0) -= f * x;
            }
            rows[r].remove(&p);
            rhs[r] -= f * rhs[p];
        }
    }
    let mut x = boundary.to_vec();
    for &p in order.iter().rev() {
        let mut s = rhs[p];
        for (&c, &a) in &rows[p] {
            if c != p {
                s -= a * x[c];
            }
        }
        x[p] = s / rows[p][&p];
    }
    x
}

/// Same system through a dense LU factorization; small truncations only.
pub fn dense_solve(t: &Truncation, boundary: &[f64]) -> Vec<f64> {
    let ids: Vec<usize> = t.interior_vertices().map(|v| v.index()).collect();
    let mut pos = vec![usize::MAX; t.len()];
    for (k, &i) in ids.iter().enumerate() {
        pos[i] = k;
    }
    let m = ids.len();
    let mut a = DMatrix::<f64>::zeros(m, m);
    let mut b = DVector::<f64>::zeros(m);
    for (k, &i) in ids.iter().enumerate() {
        let v = ends_splitter::VertexId(i as u32);
        a[(k, k)] = t.degree() as f64;
        for u in t.neighbors(v) {
            if t.is_interior(u) {
                a[(k, pos[u.index()])] -= 1.0;
            } else {
                b[k] += boundary[u.index()];
            }
        }
    }
    let sol = a.lu().solve(&b).expect("Dirichlet system is nonsingular");
    let mut x = boundary.to_vec();
    for (k, &i) in ids.iter().enumerate() {
        x[i] = sol[k];
    }
    x
}

pub fn energy_of(t: &Truncation, x: &[f64]) -> f64 {
    t.edges().map(|e| (x[e.0.index()] - x[e.1.index()]).powi(2)).sum()
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Nonconstant chi from a bit mask over end classes.
pub fn chi_from_mask(classes: &EndClasses, mask: u64) -> EndFunction {
    EndFunction::new(classes.base_radius, (0..classes.len()).map(|k| ((mask >> k) & 1) as u8).collect()).unwrap()
}
