use serde::Serialize;

use super::HarmonicField;
use crate::ends::ComplementComponent;
use crate::truncation::{VertexId, NONE};

/// Largest deviation `|h - θ|` at each distance from an anchor set, with
/// distances measured inside one component.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayProfile {
    pub theta: u8,
    /// Anchor vertices that lie in the component.
    pub anchor: Vec<VertexId>,
    pub by_distance: Vec<f64>,
}

impl DecayProfile {
    /// Successive ratios `by_distance[d+1] / by_distance[d]`.
    pub fn ratios(&self) -> Vec<f64> {
        self.by_distance.windows(2).map(|w| w[1] / w[0]).collect()
    }
}

pub fn decay_profile(
    h: &HarmonicField,
    anchor: &[VertexId],
    component: &ComplementComponent,
    theta: u8,
) -> DecayProfile {
    let t = h.truncation();
    let mut inside = vec![false; t.len()];
    for v in &component.members {
        inside[v.index()] = true;
    }
    let sources: Vec<VertexId> = anchor.iter().copied().filter(|v| inside[v.index()]).collect();
    let dist = t.bfs(&sources, u32::MAX - 1, |u| inside[u.index()]);
    let mut by_distance: Vec<f64> = Vec::new();
    for &v in &component.members {
        let d = dist[v.index()];
        if d == NONE {
            continue;
        }
        let d = d as usize;
        if by_distance.len() <= d {
            by_distance.resize(d + 1, 0.0);
        }
        let dev = (h.value(v) - theta as f64).abs();
        by_distance[d] = by_distance[d].max(dev);
    }
    DecayProfile { theta, anchor: sources, by_distance }
}
