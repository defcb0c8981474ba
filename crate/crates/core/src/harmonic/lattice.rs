use serde::Serialize;

use super::{HarmonicField, PartialField};
use crate::error::{Error, Result};
use crate::group::Word;
use crate::truncation::{Edge, VertexId};

/// `v ↦ h(g·v)` on the vertices whose translate stays in the ball.
pub fn pullback(h: &HarmonicField, g: &Word) -> PartialField {
    let t = h.truncation();
    let values = t.left_translation(g).into_iter().map(|gv| gv.map(|u| h.value(u))).collect();
    PartialField::new(t.clone(), values).expect("translation map covers every vertex")
}

/// Pointwise max/min of `h` and `k` on the domain of `k`.
#[derive(Debug, Clone)]
pub struct LatticeResult {
    pub g_plus: PartialField,
    pub g_minus: PartialField,
    /// Edges across which the sign of `h - k` flips strictly.
    pub crossing_edges: Vec<Edge>,
    /// Vertices with `|h - k| <= equality tolerance`.
    pub equal_vertices: Vec<VertexId>,
    pub energies: LatticeEnergies,
}

/// Energies over the edges with both endpoints in the common domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatticeEnergies {
    pub h: f64,
    pub k: f64,
    pub plus: f64,
    pub minus: f64,
}

impl LatticeEnergies {
    /// `E(h) + E(k) - E(max) - E(min)`, never negative up to rounding.
    pub fn defect(&self) -> f64 {
        (self.h + self.k) - (self.plus + self.minus)
    }
}

impl LatticeResult {
    /// Per-edge defect `E_e(h) + E_e(k) - E_e(max) - E_e(min)` next to the
    /// closed form `-2 (h-k)(u) (h-k)(v)` on flipping edges and `0` elsewhere.
    pub fn edge_defects(&self, h: &HarmonicField, k: &PartialField) -> Vec<(Edge, f64, f64)> {
        let t = h.truncation();
        let sq = |a: f64, b: f64| (a - b) * (a - b);
        t.edges()
            .filter_map(|e| {
                let (ku, kv) = (k.get(e.0)?, k.get(e.1)?);
                let (hu, hv) = (h.value(e.0), h.value(e.1));
                let (pu, pv) = (self.g_plus.get(e.0)?, self.g_plus.get(e.1)?);
                let (mu, mv) = (self.g_minus.get(e.0)?, self.g_minus.get(e.1)?);
                let measured = sq(hu, hv) + sq(ku, kv) - sq(pu, pv) - sq(mu, mv);
                let prod = (hu - ku) * (hv - kv);
                let predicted = if prod < 0.0 { -2.0 * prod } else { 0.0 };
                Some((e, measured, predicted))
            })
            .collect()
    }
}

pub fn lattice_ops(h: &HarmonicField, k: &PartialField, equality_tol: f64) -> Result<LatticeResult> {
    if !std::sync::Arc::ptr_eq(h.truncation(), k.truncation()) {
        return Err(Error::MismatchedTruncation);
    }
    let t = h.truncation();
    let mut plus = Vec::with_capacity(t.len());
    let mut minus = Vec::with_capacity(t.len());
    let mut equal_vertices = Vec::new();
    for v in t.vertices() {
        match k.get(v) {
            Some(kv) => {
                let hv = h.value(v);
                plus.push(Some(hv.max(kv)));
                minus.push(Some(hv.min(kv)));
                if (hv - kv).abs() <= equality_tol {
                    equal_vertices.push(v);
                }
            }
            None => {
                plus.push(None);
                minus.push(None);
            }
        }
    }
    let g_plus = PartialField::new(t.clone(), plus)?;
    let g_minus = PartialField::new(t.clone(), minus)?;
    let mut crossing_edges = Vec::new();
    let mut energies = LatticeEnergies { h: 0.0, k: 0.0, plus: 0.0, minus: 0.0 };
    let sq = |a: f64, b: f64| (a - b) * (a - b);
    for e in t.edges() {
        let (Some(ku), Some(kv)) = (k.get(e.0), k.get(e.1)) else {
            continue;
        };
        let (hu, hv) = (h.value(e.0), h.value(e.1));
        if (hu - ku) * (hv - kv) < 0.0 {
            crossing_edges.push(e);
        }
        energies.h += sq(hu, hv);
        energies.k += sq(ku, kv);
        energies.plus += sq(hu.max(ku), hv.max(kv));
        energies.minus += sq(hu.min(ku), hv.min(kv));
    }
    Ok(LatticeResult { g_plus, g_minus, crossing_edges, equal_vertices, energies })
}
