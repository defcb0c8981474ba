//! Walls cut out by translates of a harmonic field, and the tree they form.
//!
//! For each `g` in a word-length ball the pullback `g*h` is compared with
//! `h` and `1 - h`, and its level set at a regular threshold `t` near 1/2 is
//! taken as a sign-change edge cut. Deleting all cuts splits the valid domain
//! into regions; regions and walls form a bipartite incidence graph that
//! should be a tree on which the sample acts without inversions.

mod construct;
mod tree;
mod trichotomy;

pub use construct::{
    build_walls, choose_threshold, crossing_pairs, indecomposable_regions, threshold_for_values, valid_domain_len,
    wall_separates_domain, IndecomposableRegion, Regions, Wall, WallConfig, WallFamily, WallOptions,
};
pub use tree::{
    action_on_tree, build_wall_tree, ActionReport, ElementAction, RegionNode, WallNode, WallTree, WallTreeSummary,
};
pub use trichotomy::{classify_relation, trichotomy, violation_count, Relation, TrichotomyVerdict};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::harmonic::HarmonicField;

/// Everything computed for one field.
#[derive(Debug, Clone, PartialEq)]
pub struct WallAnalysis {
    pub family: WallFamily,
    pub regions: Regions,
    pub tree: WallTree,
    pub action: ActionReport,
}

impl WallAnalysis {
    pub fn summary(&self) -> WallTreeSummary {
        let mut relations = BTreeMap::new();
        for v in &self.family.verdicts {
            let key =
                serde_json::to_value(v.relation).expect("enum serializes").as_str().unwrap_or_default().to_string();
            *relations.entry(key).or_insert(0) += 1;
        }
        WallTreeSummary {
            threshold: self.family.config.threshold,
            sample_radius: self.family.config.sample_radius,
            sample_size: self.family.sample.len(),
            walls: self.tree.walls.len(),
            regions: self.tree.regions.len(),
            is_tree: self.tree.is_tree(),
            euler: self.tree.euler,
            crossing_pairs: 0,
            violations: violation_count(&self.family.verdicts),
            relations,
            inversions: self.action.inversion_count,
            precisely_invariant: self.action.precisely_invariant(),
            max_stabilizer: self.action.stabilizers.iter().map(Vec::len).max().unwrap_or(0),
            fixed_regions: self.action.fixed_regions.len(),
        }
    }
}

/// Threshold, walls, non-crossing check, regions, tree and action.
pub fn analyze_walls(h: &HarmonicField, opts: &WallOptions) -> Result<WallAnalysis> {
    let t = h.truncation();
    let sample = t.group_ball(opts.sample_radius);
    let config = choose_threshold(h, &sample, opts)?;
    let family = build_walls(h, &config)?;
    let crossing = crossing_pairs(&family);
    if !crossing.is_empty() {
        let pairs: Vec<String> =
            crossing.iter().map(|&(i, j)| format!("{}/{}", family.walls[i].label(), family.walls[j].label())).collect();
        return Err(Error::CrossingWalls(format!("{} crossing pairs: [{}]", pairs.len(), pairs.join(", "))));
    }
    let regions = indecomposable_regions(t, &family)?;
    let tree = build_wall_tree(t, &family, &regions)?;
    let action = action_on_tree(h, &family, &regions);
    Ok(WallAnalysis { family, regions, tree, action })
}
