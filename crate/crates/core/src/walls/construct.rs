use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::trichotomy::{trichotomy, Relation, TrichotomyVerdict};
use crate::error::{Error, Result};
use crate::group::Word;
use crate::harmonic::HarmonicField;
use crate::truncation::{Edge, Truncation, VertexId, NONE};

/// User-facing wall settings; the threshold is normally chosen automatically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WallOptions {
    pub sample_radius: u32,
    pub equality_tol: f64,
    pub step: f64,
    /// Fixed threshold, bypassing the search.
    pub threshold: Option<f64>,
}

impl Default for WallOptions {
    fn default() -> Self {
        WallOptions { sample_radius: 3, equality_tol: 1e-9, step: 1e-3, threshold: None }
    }
}

impl WallOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.equality_tol >= 0.0 && self.equality_tol.is_finite()) {
            return Err(Error::InvalidArgument("wall equality_tol must be finite and >= 0".into()));
        }
        if !(self.step > 0.0 && self.step < 0.1) {
            return Err(Error::InvalidArgument("wall step must lie in (0, 0.1)".into()));
        }
        if let Some(t) = self.threshold {
            if !(t > 0.0 && t < 1.0) || t == 0.5 {
                return Err(Error::InvalidArgument("wall threshold must lie in (0, 1) and differ from 1/2".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WallConfig {
    pub threshold: f64,
    pub sample_radius: u32,
    pub equality_tol: f64,
}

/// `0.5 + k·step` for the least `k >= 1` at distance `>= equality_tol` from
/// every value, searched below 0.6.
pub fn threshold_for_values(values: &[f64], equality_tol: f64, step: f64) -> Result<f64> {
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    for k in 1.. {
        let t = 0.5 + k as f64 * step;
        if t >= 0.6 {
            break;
        }
        let i = sorted.partition_point(|&x| x < t);
        let gap_above = sorted.get(i).map_or(f64::INFINITY, |&x| x - t);
        let gap_below = if i > 0 { t - sorted[i - 1] } else { f64::INFINITY };
        if gap_above >= equality_tol && gap_below >= equality_tol {
            return Ok(t);
        }
    }
    Err(Error::NoRegularValue { equality_tol })
}

/// Vertices `v` with `g·v` in the ball for every `|g| <= s`: the ball of
/// radius `ρ - s`, an id prefix.
pub fn valid_domain_len(t: &Truncation, sample_radius: u32) -> Result<usize> {
    if sample_radius + 1 >= t.radius() {
        return Err(Error::InvalidArgument(format!(
            "sample radius {sample_radius} leaves no interior window in a truncation of radius {}",
            t.radius()
        )));
    }
    Ok(t.ball_len(t.radius() - sample_radius))
}

/// Picks the threshold from the values of every sampled pullback on the
/// valid domain.
pub fn choose_threshold(h: &HarmonicField, sample: &[Word], opts: &WallOptions) -> Result<WallConfig> {
    opts.validate()?;
    let t = h.truncation();
    let domain = valid_domain_len(t, opts.sample_radius)?;
    let threshold = match opts.threshold {
        Some(x) => x,
        None => {
            let mut seen = vec![false; t.len()];
            for g in sample {
                let map = t.left_translation(g);
                for gv in map[..domain].iter().flatten() {
                    seen[gv.index()] = true;
                }
            }
            let values: Vec<f64> = t.vertices().filter(|v| seen[v.index()]).map(|v| h.value(v)).collect();
            threshold_for_values(&values, opts.equality_tol, opts.step)?
        }
    };
    Ok(WallConfig { threshold, sample_radius: opts.sample_radius, equality_tol: opts.equality_tol })
}

/// Sign-change edge cut of one pullback, restricted to the valid domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Wall {
    /// Sampled elements whose pullback produced this wall; the first one
    /// names it.
    pub labels: Vec<Word>,
    /// Sorted.
    pub edges: Vec<Edge>,
    /// `g*h > t`, indexed by valid-domain vertex id.
    pub plus: Vec<bool>,
    /// Component of the valid domain minus this wall's edges, per vertex.
    pub piece: Vec<u32>,
    pub pieces: usize,
}

impl Wall {
    pub fn label(&self) -> &Word {
        &self.labels[0]
    }

    pub fn is_plus(&self, v: VertexId) -> bool {
        self.plus[v.index()]
    }

    /// Edges of `other` not shared with `self` lie in at least two
    /// components of the domain cut along `self`.
    pub fn separates(&self, other: &Wall) -> bool {
        let mut first = None;
        for e in &other.edges {
            if self.edges.binary_search(e).is_ok() {
                continue;
            }
            let p = self.piece[e.0.index()];
            match first {
                None => first = Some(p),
                Some(q) if q != p => return true,
                _ => {}
            }
        }
        false
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WallFamily {
    pub config: WallConfig,
    /// The valid domain is the id prefix `0..domain_len`.
    pub domain_len: usize,
    pub sample: Vec<Word>,
    /// One verdict per sampled element, in sample order.
    pub verdicts: Vec<TrichotomyVerdict>,
    /// The first wall is the level cut of `h` itself.
    pub walls: Vec<Wall>,
    /// Sampled elements whose cut misses the valid domain.
    pub empty: Vec<Word>,
}

impl WallFamily {
    pub fn in_domain(&self, v: VertexId) -> bool {
        v.index() < self.domain_len
    }

    /// Wall index by exact edge set.
    pub fn index_by_edges(&self) -> BTreeMap<&[Edge], usize> {
        self.walls.iter().enumerate().map(|(i, w)| (w.edges.as_slice(), i)).collect()
    }
}

// Components of the domain prefix with the sorted `cut` edges removed.
fn pieces(t: &Truncation, domain_len: usize, cut: &[Edge]) -> (Vec<u32>, usize) {
    let mut label = vec![NONE; domain_len];
    let mut count = 0u32;
    for s in 0..domain_len {
        if label[s] != NONE {
            continue;
        }
        label[s] = count;
        let mut stack = vec![VertexId(s as u32)];
        while let Some(v) = stack.pop() {
            for u in t.neighbors(v) {
                if u.index() < domain_len && label[u.index()] == NONE && cut.binary_search(&Edge::new(u, v)).is_err() {
                    label[u.index()] = count;
                    stack.push(u);
                }
            }
        }
        count += 1;
    }
    (label, count as usize)
}

fn cut(t: &Truncation, f: &[f64], domain_len: usize, threshold: f64) -> (Vec<Edge>, Vec<bool>) {
    let plus: Vec<bool> = f.iter().map(|&x| x > threshold).collect();
    let mut edges = Vec::new();
    for v in (0..domain_len as u32).map(VertexId) {
        for u in t.neighbors(v) {
            if u > v && u.index() < domain_len && plus[u.index()] != plus[v.index()] {
                edges.push(Edge(v, u));
            }
        }
    }
    edges.sort_unstable();
    (edges, plus)
}

/// The walls of `g*h` for every `g` in the sample ball.
///
/// Elements whose pullback equals `h` or `1 - h` within tolerance join the
/// wall of `h`; the others are deduplicated by exact edge set.
pub fn build_walls(h: &HarmonicField, cfg: &WallConfig) -> Result<WallFamily> {
    let t = h.truncation();
    let domain_len = valid_domain_len(t, cfg.sample_radius)?;
    let sample = t.group_ball(cfg.sample_radius);
    let per_g: Vec<(TrichotomyVerdict, Vec<Edge>, Vec<bool>)> = sample
        .par_iter()
        .map(|g| {
            let verdict = trichotomy(h, g, cfg.equality_tol)?;
            let map = t.left_translation(g);
            let f: Vec<f64> = map[..domain_len]
                .iter()
                .map(|gv| h.value(gv.expect("valid domain translates into the ball")))
                .collect();
            let (edges, plus) = cut(t, &f, domain_len, cfg.threshold);
            Ok((verdict, edges, plus))
        })
        .collect::<Result<_>>()?;

    let mut walls: Vec<Wall> = Vec::new();
    let mut by_edges: BTreeMap<Vec<Edge>, usize> = BTreeMap::new();
    let mut empty = Vec::new();
    let mut verdicts = Vec::with_capacity(sample.len());
    for (g, (verdict, edges, plus)) in sample.iter().zip(per_g) {
        let same_as_h = matches!(verdict.relation, Relation::EqH | Relation::EqOneMinusH);
        verdicts.push(verdict);
        if !g.is_identity() && same_as_h && !walls.is_empty() {
            walls[0].labels.push(g.clone());
            continue;
        }
        if edges.is_empty() {
            empty.push(g.clone());
            continue;
        }
        match by_edges.get(&edges) {
            Some(&i) => walls[i].labels.push(g.clone()),
            None => {
                by_edges.insert(edges.clone(), walls.len());
                let (piece, pieces) = pieces(t, domain_len, &edges);
                walls.push(Wall { labels: vec![g.clone()], edges, plus, piece, pieces });
            }
        }
    }
    Ok(WallFamily { config: *cfg, domain_len, sample, verdicts, walls, empty })
}

/// Pairs of walls one of which has edges on both sides of the other.
pub fn crossing_pairs(family: &WallFamily) -> Vec<(usize, usize)> {
    let w = &family.walls;
    let mut out = Vec::new();
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            if w[i].separates(&w[j]) || w[j].separates(&w[i]) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Deleting the wall's edges leaves no path from its plus side to its minus
/// side inside the valid domain.
pub fn wall_separates_domain(t: &Truncation, family: &WallFamily, wall: &Wall) -> bool {
    let cut: HashSet<Edge> = wall.edges.iter().copied().collect();
    let Some(start) = (0..family.domain_len as u32).map(VertexId).find(|&v| wall.is_plus(v)) else {
        return true;
    };
    let mut seen = vec![false; family.domain_len];
    seen[start.index()] = true;
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        if !wall.is_plus(v) {
            return false;
        }
        for u in t.neighbors(v) {
            if u.index() < family.domain_len && !seen[u.index()] && !cut.contains(&Edge::new(u, v)) {
                seen[u.index()] = true;
                stack.push(u);
            }
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndecomposableRegion {
    pub representative: VertexId,
    pub size: usize,
    /// Indices of walls with an edge leaving the region.
    pub adjacent_walls: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Regions {
    pub regions: Vec<IndecomposableRegion>,
    /// Region id per valid-domain vertex.
    pub region_of: Vec<u32>,
}

impl Regions {
    pub fn members(&self, r: usize) -> Vec<VertexId> {
        (0..self.region_of.len() as u32).filter(|&v| self.region_of[v as usize] == r as u32).map(VertexId).collect()
    }
}

// Components of the valid domain after deleting every wall edge.
fn regions_by_deletion(t: &Truncation, family: &WallFamily) -> (Vec<u32>, usize) {
    let mut cut: Vec<Edge> = family.walls.iter().flat_map(|w| w.edges.iter().copied()).collect();
    cut.sort_unstable();
    cut.dedup();
    pieces(t, family.domain_len, &cut)
}

// Classes of "no single wall separates them".
fn regions_by_separation(family: &WallFamily) -> (Vec<u32>, usize) {
    let mut ids: BTreeMap<Vec<u32>, u32> = BTreeMap::new();
    let mut label = vec![NONE; family.domain_len];
    for (v, l) in label.iter_mut().enumerate() {
        let sig: Vec<u32> = family.walls.iter().map(|w| w.piece[v]).collect();
        let next = ids.len() as u32;
        *l = *ids.entry(sig).or_insert(next);
    }
    (label, ids.len())
}

/// Indecomposable regions, computed both as components of the domain with
/// all wall edges removed and as classes of vertices no single wall
/// separates. The two agree when the walls do not cross.
pub fn indecomposable_regions(t: &Truncation, family: &WallFamily) -> Result<Regions> {
    let (by_cut, n_cut) = regions_by_deletion(t, family);
    let (by_side, n_side) = regions_by_separation(family);
    let mut side_of_cut = vec![NONE; n_cut];
    let mut cut_of_side = vec![NONE; n_side];
    for v in 0..family.domain_len {
        let (c, s) = (by_cut[v] as usize, by_side[v] as usize);
        if side_of_cut[c] == NONE {
            side_of_cut[c] = s as u32;
        }
        if cut_of_side[s] == NONE {
            cut_of_side[s] = c as u32;
        }
        if side_of_cut[c] != s as u32 || cut_of_side[s] != c as u32 {
            let crossing = crossing_pairs(family)
                .iter()
                .map(|&(i, j)| format!("{}/{}", family.walls[i].label(), family.walls[j].label()))
                .collect::<Vec<_>>();
            return Err(Error::CrossingWalls(format!(
                "{n_cut} components after deleting wall edges but {n_side} separation classes at vertex {}; crossing pairs: [{}]",
                t.word_string(VertexId(v as u32)),
                crossing.join(", ")
            )));
        }
    }
    let mut regions: Vec<IndecomposableRegion> = (0..n_cut)
        .map(|_| IndecomposableRegion { representative: VertexId(u32::MAX), size: 0, adjacent_walls: Vec::new() })
        .collect();
    for (v, &l) in by_cut.iter().enumerate() {
        let r = &mut regions[l as usize];
        if r.size == 0 {
            r.representative = VertexId(v as u32);
        }
        r.size += 1;
    }
    for (i, w) in family.walls.iter().enumerate() {
        for e in &w.edges {
            for end in [e.0, e.1] {
                let adj = &mut regions[by_cut[end.index()] as usize].adjacent_walls;
                if !adj.contains(&i) {
                    adj.push(i);
                }
            }
        }
    }
    Ok(Regions { regions, region_of: by_cut })
}
