use serde::Serialize;

use super::HarmonicField;
use crate::error::{Error, Result};
use crate::truncation::Edge;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    pub total: f64,
    /// Energy per region when regions were supplied.
    pub per_region: Option<Vec<f64>>,
}

#[inline]
pub fn edge_energy(h: &HarmonicField, e: Edge) -> f64 {
    let d = h.value(e.0) - h.value(e.1);
    d * d
}

/// Dirichlet energy with unit edge weights, summed in edge-id order.
pub fn energy(h: &HarmonicField) -> EnergyReport {
    let total = h.truncation().edges().map(|e| edge_energy(h, e)).sum();
    EnergyReport { total, per_region: None }
}

/// Energy of the edges accepted by `filter`.
pub fn energy_on_edges(h: &HarmonicField, filter: impl Fn(Edge) -> bool) -> f64 {
    h.truncation().edges().filter(|&e| filter(e)).map(|e| edge_energy(h, e)).sum()
}

/// Total energy plus the energy of each region; `region_of` assigns an edge
/// to at most one region.
pub fn energy_by_region(h: &HarmonicField, regions: usize, region_of: impl Fn(Edge) -> Option<usize>) -> EnergyReport {
    let mut per = vec![0.0; regions];
    let mut total = 0.0;
    for e in h.truncation().edges() {
        let x = edge_energy(h, e);
        total += x;
        if let Some(r) = region_of(e) {
            per[r] += x;
        }
    }
    EnergyReport { total, per_region: Some(per) }
}

/// The bilinear form `Σ (u(a) - u(b))(v(a) - v(b))` over edges.
pub fn energy_form(u: &HarmonicField, v: &HarmonicField) -> Result<f64> {
    if !u.same_truncation(v) {
        return Err(Error::MismatchedTruncation);
    }
    Ok(u.truncation().edges().map(|e| (u.value(e.0) - u.value(e.1)) * (v.value(e.0) - v.value(e.1))).sum())
}
