//! Bottom of the Dirichlet spectrum and a sweep-cut Cheeger value.
//!
//! The operator is the combinatorial Laplacian `D - A` restricted to interior
//! vertices, with the shell held at zero. For the sweep sets `S` of the ground
//! state `f`, the ratio `|∂S| / vol(S)` (with `vol` the degree sum) satisfies
//! `ratio² / 2 <= R(f) / d_min`, where `R(f)` is the Rayleigh quotient, so
//! `ratio² / 4` is a certified lower bound for the computed eigenvalue.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::truncation::Truncation;

/// A finite graph with marked interior vertices; the rest is Dirichlet
/// boundary.
#[derive(Debug, Clone)]
pub struct DirichletGraph {
    adj: Vec<Vec<u32>>,
    interior: Vec<bool>,
}

impl DirichletGraph {
    pub fn new(adj: Vec<Vec<u32>>, interior: Vec<bool>) -> Result<Self> {
        if adj.len() != interior.len() {
            return Err(Error::InvalidArgument("adjacency and interior mask differ in length".into()));
        }
        Ok(DirichletGraph { adj, interior })
    }

    pub fn from_truncation(t: &Truncation) -> Self {
        DirichletGraph {
            adj: t.vertices().map(|v| t.neighbors(v).map(|u| u.0).collect()).collect(),
            interior: t.vertices().map(|v| t.is_interior(v)).collect(),
        }
    }

    /// The path `0 - 1 - ... - n+1` with its two endpoints as boundary.
    pub fn path(n: usize) -> Self {
        let adj = (0..n + 2)
            .map(|i| {
                let mut a = Vec::new();
                if i > 0 {
                    a.push(i as u32 - 1);
                }
                if i < n + 1 {
                    a.push(i as u32 + 1);
                }
                a
            })
            .collect();
        let interior = (0..n + 2).map(|i| i > 0 && i <= n).collect();
        DirichletGraph { adj, interior }
    }

    pub fn interior_count(&self) -> usize {
        self.interior.iter().filter(|&&b| b).count()
    }

    pub fn spectral_gap(&self) -> Result<SpectralReport> {
        Estimator::new(self)?.run()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    /// Best sweep-cut ratio `|∂S| / vol(S)` over level sets of the ground state.
    pub cheeger_lower: f64,
    /// `cheeger_lower² / 4`.
    pub lambda1_lower: f64,
    /// Rayleigh quotient of the converged ground state.
    pub lambda1_estimate: f64,
    pub iterations: usize,
    pub inner_iterations: usize,
    pub residual: f64,
}

pub fn spectral_gap(t: &Truncation) -> Result<SpectralReport> {
    DirichletGraph::from_truncation(t).spectral_gap()
}

const MAX_OUTER: usize = 500;
const EIG_TOL: f64 = 1e-13;

struct Estimator<'a> {
    g: &'a DirichletGraph,
    ids: Vec<usize>,
    pos: Vec<usize>,
}

impl<'a> Estimator<'a> {
    fn new(g: &'a DirichletGraph) -> Result<Self> {
        let ids: Vec<usize> = (0..g.adj.len()).filter(|&i| g.interior[i]).collect();
        if ids.len() < 2 {
            return Err(Error::InvalidArgument("spectral estimate needs at least 2 interior vertices".into()));
        }
        let mut pos = vec![usize::MAX; g.adj.len()];
        for (k, &i) in ids.iter().enumerate() {
            pos[i] = k;
        }
        Ok(Estimator { g, ids, pos })
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (k, &i) in self.ids.iter().enumerate() {
            let mut s = self.g.adj[i].len() as f64 * x[k];
            for &u in &self.g.adj[i] {
                let p = self.pos[u as usize];
                if p != usize::MAX {
                    s -= x[p];
                }
            }
            out[k] = s;
        }
    }

    // Conjugate gradients for L y = b; returns the iteration count.
    fn solve(&self, b: &[f64], y: &mut [f64]) -> usize {
        let n = b.len();
        y.fill(0.0);
        let mut r = b.to_vec();
        let mut p = r.clone();
        let mut ap = vec![0.0; n];
        let mut rr = dot(&r, &r);
        let stop = rr * 1e-30;
        let mut it = 0;
        while rr > stop && it < 10 * n + 100 {
            self.apply(&p, &mut ap);
            let alpha = rr / dot(&p, &ap);
            for k in 0..n {
                y[k] += alpha * p[k];
                r[k] -= alpha * ap[k];
            }
            let rr_new = dot(&r, &r);
            let beta = rr_new / rr;
            rr = rr_new;
            for k in 0..n {
                p[k] = r[k] + beta * p[k];
            }
            it += 1;
        }
        it
    }

    fn run(&self) -> Result<SpectralReport> {
        let n = self.ids.len();
        let mut x = vec![1.0 / (n as f64).sqrt(); n];
        let mut y = vec![0.0; n];
        let mut lx = vec![0.0; n];
        let mut lambda = f64::INFINITY;
        let mut inner = 0;
        let mut residual = f64::INFINITY;
        for outer in 1..=MAX_OUTER {
            inner += self.solve(&x, &mut y);
            let norm = dot(&y, &y).sqrt();
            for k in 0..n {
                x[k] = y[k] / norm;
            }
            self.apply(&x, &mut lx);
            let next = dot(&x, &lx);
            residual = lx.iter().zip(&x).map(|(a, b)| (a - next * b).powi(2)).sum::<f64>().sqrt();
            let settled = (next - lambda).abs() <= EIG_TOL * next.max(1.0);
            lambda = next;
            if settled && residual <= 1e-8 {
                let cheeger = self.sweep(&x);
                return Ok(SpectralReport {
                    cheeger_lower: cheeger,
                    lambda1_lower: cheeger * cheeger / 4.0,
                    lambda1_estimate: lambda,
                    iterations: outer,
                    inner_iterations: inner,
                    residual,
                });
            }
        }
        Err(Error::NonConvergence { residual, iterations: MAX_OUTER })
    }

    fn sweep(&self, x: &[f64]) -> f64 {
        let mut order: Vec<usize> = (0..x.len()).collect();
        order.sort_by(|&a, &b| x[b].abs().total_cmp(&x[a].abs()).then(a.cmp(&b)));
        let mut in_set = vec![false; self.g.adj.len()];
        let mut boundary = 0i64;
        let mut volume = 0usize;
        let mut best = f64::INFINITY;
        for k in order {
            let i = self.ids[k];
            for &u in &self.g.adj[i] {
                if in_set[u as usize] {
                    boundary -= 1;
                } else {
                    boundary += 1;
                }
            }
            in_set[i] = true;
            volume += self.g.adj[i].len();
            best = best.min(boundary as f64 / volume as f64);
        }
        best
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
