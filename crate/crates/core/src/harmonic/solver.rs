use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{stable_sum, HarmonicField};
use crate::ends::{EndClasses, EndFunction};
use crate::error::{Error, Result};
use crate::truncation::{Truncation, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Multicolor Gauss-Seidel: one parallel sweep per color class.
    GaussSeidel,
    Jacobi,
    /// Conjugate gradients on the interior Laplacian.
    ConjugateDirection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Bound on the max mean-value defect over interior vertices.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub scheme: Scheme,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { tolerance: 1e-9, max_iterations: 1_000_000, scheme: Scheme::GaussSeidel }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidArgument("solver tolerance must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument("solver max_iterations must be >= 1".into()));
        }
        Ok(())
    }
}

// Sweeps between residual evaluations for the stationary schemes.
const CHECK_EVERY: usize = 4;

/// Harmonic extension of `chi`: shell vertices take the value of their end
/// class, every other vertex is solved for.
pub fn solve_dirichlet(
    t: &Arc<Truncation>,
    classes: &EndClasses,
    chi: &EndFunction,
    cfg: &SolverConfig,
) -> Result<HarmonicField> {
    if chi.base_radius != classes.base_radius || chi.values.len() != classes.len() {
        return Err(Error::InvalidArgument(format!(
            "chi has {} values at base radius {}, end classes number {} at base radius {}",
            chi.values.len(),
            chi.base_radius,
            classes.len(),
            classes.base_radius
        )));
    }
    // Start every vertex at the value of its end class; this is already close
    // to the solution away from the base ball.
    let mut values = vec![0.5; t.len()];
    for v in t.vertices() {
        match classes.class_of(v) {
            Some(k) => values[v.index()] = chi.value(k) as f64,
            None if t.is_shell(v) => return Err(Error::InvalidBoundary { word: t.word_string(v) }),
            None => {}
        }
    }
    let mut h = solve_with_boundary(t, values, cfg)?;
    h.boundary_spec = Some(chi.clone());
    Ok(h)
}

/// Solves with shell values taken from `values`; interior entries are the
/// starting guess.
pub fn solve_with_boundary(t: &Arc<Truncation>, mut values: Vec<f64>, cfg: &SolverConfig) -> Result<HarmonicField> {
    cfg.validate()?;
    if values.len() != t.len() {
        return Err(Error::InvalidArgument("boundary vector length mismatch".into()));
    }
    let (residual, iterations) = match cfg.scheme {
        Scheme::GaussSeidel => gauss_seidel(t, &mut values, cfg),
        Scheme::Jacobi => jacobi(t, &mut values, cfg),
        Scheme::ConjugateDirection => conjugate_gradient(t, &mut values, cfg),
    };
    if residual > cfg.tolerance {
        return Err(Error::NonConvergence { residual, iterations });
    }
    Ok(HarmonicField::solved(t.clone(), values, None, residual, iterations))
}

#[inline]
fn neighbor_mean(t: &Truncation, values: &[f64], v: VertexId) -> f64 {
    let mut s = 0.0;
    for u in t.neighbors(v) {
        s += values[u.index()];
    }
    s / t.degree() as f64
}

fn residual(t: &Truncation, values: &[f64]) -> f64 {
    let n_int = t.ball_len(t.radius() - 1);
    (0..n_int as u32)
        .into_par_iter()
        .map(|i| (values[i as usize] - neighbor_mean(t, values, VertexId(i))).abs())
        .reduce(|| 0.0, f64::max)
}

fn gauss_seidel(t: &Truncation, values: &mut [f64], cfg: &SolverConfig) -> (f64, usize) {
    let colors = t.interior_colors();
    let mut res = residual(t, values);
    let mut it = 0;
    while res > cfg.tolerance && it < cfg.max_iterations {
        for class in colors {
            let updated: Vec<f64> = class.par_iter().map(|&v| neighbor_mean(t, values, v)).collect();
            for (v, x) in class.iter().zip(updated) {
                values[v.index()] = x;
            }
        }
        it += 1;
        if it % CHECK_EVERY == 0 || it == cfg.max_iterations {
            res = residual(t, values);
        }
    }
    (res, it)
}

fn jacobi(t: &Truncation, values: &mut [f64], cfg: &SolverConfig) -> (f64, usize) {
    let n_int = t.ball_len(t.radius() - 1);
    let mut res = residual(t, values);
    let mut it = 0;
    while res > cfg.tolerance && it < cfg.max_iterations {
        let updated: Vec<f64> =
            (0..n_int as u32).into_par_iter().map(|i| neighbor_mean(t, values, VertexId(i))).collect();
        values[..n_int].copy_from_slice(&updated);
        it += 1;
        if it % CHECK_EVERY == 0 || it == cfg.max_iterations {
            res = residual(t, values);
        }
    }
    (res, it)
}

// Interior unknowns are the ids below n_int; the operator is deg·x - A·x.
fn apply_laplacian(t: &Truncation, n_int: usize, x: &[f64], out: &mut [f64]) {
    let d = t.degree() as f64;
    out.par_iter_mut().enumerate().for_each(|(i, o)| {
        let mut s = 0.0;
        for u in t.neighbors(VertexId(i as u32)) {
            if u.index() < n_int {
                s += x[u.index()];
            }
        }
        *o = d * x[i] - s;
    });
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let prods: Vec<f64> = a.par_iter().zip(b).map(|(x, y)| x * y).collect();
    stable_sum(&prods)
}

fn conjugate_gradient(t: &Truncation, values: &mut [f64], cfg: &SolverConfig) -> (f64, usize) {
    let n_int = t.ball_len(t.radius() - 1);
    let d = t.degree() as f64;
    let rhs: Vec<f64> = (0..n_int)
        .map(|i| t.neighbors(VertexId(i as u32)).filter(|u| u.index() >= n_int).map(|u| values[u.index()]).sum())
        .collect();
    let mut x = values[..n_int].to_vec();
    let mut ax = vec![0.0; n_int];
    let mut it = 0;
    loop {
        // (Re)start from the true residual.
        apply_laplacian(t, n_int, &x, &mut ax);
        let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let true_res = r.iter().fold(0.0f64, |m, v| m.max(v.abs())) / d;
        if true_res <= cfg.tolerance || it >= cfg.max_iterations {
            values[..n_int].copy_from_slice(&x);
            return (residual(t, values), it);
        }
        let mut p = r.clone();
        let mut rr = dot(&r, &r);
        let mut ap = vec![0.0; n_int];
        while it < cfg.max_iterations {
            apply_laplacian(t, n_int, &p, &mut ap);
            let alpha = rr / dot(&p, &ap);
            x.par_iter_mut().zip(&p).for_each(|(xi, pi)| *xi += alpha * pi);
            r.par_iter_mut().zip(&ap).for_each(|(ri, api)| *ri -= alpha * api);
            it += 1;
            let rmax = r.par_iter().map(|v| v.abs()).reduce(|| 0.0, f64::max) / d;
            if rmax <= 0.5 * cfg.tolerance {
                break;
            }
            let rr_new = dot(&r, &r);
            let beta = rr_new / rr;
            rr = rr_new;
            p.par_iter_mut().zip(&r).for_each(|(pi, ri)| *pi = ri + beta * *pi);
        }
    }
}
