//! The uniform connectivity function.
//!
//! For a set `K` of net points, each component `C` of `B_R(K)^c` meets the
//! neighborhood in its trace `C ∩ B_R(K)`. `Φ(K)` is the largest diameter of
//! a trace measured inside its own component, and `φ(r)` is the supremum of
//! `Φ(K)` over sets of diameter at most `r`.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use super::label_components;
use crate::error::{Error, Result};
use crate::truncation::{Net, Truncation, VertexId, NONE};

/// A diameter, or infinity when a trace could only be connected through the
/// shell (the path may close up beyond the truncation).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PhiValue {
    Finite(u32),
    Infinite,
}

impl PhiValue {
    pub fn finite(self) -> Option<u32> {
        match self {
            PhiValue::Finite(d) => Some(d),
            PhiValue::Infinite => None,
        }
    }
}

impl fmt::Display for PhiValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhiValue::Finite(d) => write!(f, "{d}"),
            PhiValue::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for PhiValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            PhiValue::Finite(d) => s.serialize_u32(*d),
            PhiValue::Infinite => s.serialize_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhiMode {
    /// Every candidate set inside the window was evaluated.
    WindowExact,
    /// Candidates were drawn with a seeded generator.
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhiConfig {
    /// Net points considered have word length at most this; defaults to
    /// `ρ - 2R - 1`.
    pub window_radius: Option<u32>,
    /// Largest candidate count evaluated exhaustively; also the sample size.
    pub max_exhaustive: usize,
    pub seed: u64,
}

impl Default for PhiConfig {
    fn default() -> Self {
        PhiConfig { window_radius: None, max_exhaustive: 10_000, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhiEntry {
    pub r: u32,
    pub value: PhiValue,
    pub mode: PhiMode,
    pub candidates: usize,
}

/// `Φ(K)` for the neighborhood `B_R(K)`.
pub fn phi_of_set(t: &Truncation, k: &[VertexId], big_r: u32) -> PhiValue {
    let dist = t.bfs(k, big_r, |_| true);
    let removed: Vec<bool> = t.vertices().map(|v| dist[v.index()] < big_r && !t.is_shell(v)).collect();
    let (label, count) = label_components(t, &removed);
    let mut traces: Vec<Vec<VertexId>> = vec![Vec::new(); count];
    for v in t.vertices() {
        if dist[v.index()] != NONE && !removed[v.index()] {
            traces[label[v.index()] as usize].push(v);
        }
    }
    let mut worst = PhiValue::Finite(0);
    for (l, trace) in traces.iter().enumerate() {
        if trace.len() <= 1 {
            if trace.iter().any(|&v| t.is_shell(v)) {
                return PhiValue::Infinite;
            }
            continue;
        }
        if trace.iter().any(|&v| t.is_shell(v)) {
            return PhiValue::Infinite;
        }
        for &s in trace {
            let d = t.bfs(&[s], u32::MAX - 1, |u| label[u.index()] == l as u32 && !t.is_shell(u));
            for &x in trace {
                let dx = d[x.index()];
                if dx == NONE {
                    return PhiValue::Infinite;
                }
                worst = worst.max(PhiValue::Finite(dx));
            }
        }
    }
    worst
}

/// `φ(r)` over subsets of net points in the window with diameter `<= r`.
pub fn connectivity_phi(t: &Truncation, net: &Net, big_r: u32, r: u32, cfg: &PhiConfig) -> Result<PhiEntry> {
    if big_r < 1 {
        return Err(Error::InvalidArgument("neighborhood radius R must be >= 1".into()));
    }
    let window = cfg.window_radius.unwrap_or_else(|| t.radius().saturating_sub(2 * big_r + 1));
    let points: Vec<VertexId> = net.members.iter().copied().filter(|&v| t.depth(v) <= window).collect();
    if points.is_empty() {
        return Err(Error::InvalidArgument(format!("no net points within window radius {window}")));
    }
    let words: Vec<_> = points.iter().map(|&v| t.word(v)).collect();
    let n = points.len();
    let mut close = vec![false; n * n];
    for i in 0..n {
        for j in 0..n {
            close[i * n + j] = t.group().distance(&words[i], &words[j]) as u32 <= r;
        }
    }

    let mut sets = Vec::new();
    let exhaustive = enumerate_cliques(n, &close, cfg.max_exhaustive, &mut sets);
    let (mode, sets) = if exhaustive {
        (PhiMode::WindowExact, sets)
    } else {
        (PhiMode::Sampled, sample_cliques(n, &close, cfg.max_exhaustive, cfg.seed))
    };
    let mut value = PhiValue::Finite(0);
    for set in &sets {
        let k: Vec<VertexId> = set.iter().map(|&i| points[i]).collect();
        value = value.max(phi_of_set(t, &k, big_r));
        if value == PhiValue::Infinite {
            break;
        }
    }
    Ok(PhiEntry { r, value, mode, candidates: sets.len() })
}

// Depth-first listing of index sets that are pairwise close; false when
// more than `limit` exist.
fn enumerate_cliques(n: usize, close: &[bool], limit: usize, out: &mut Vec<Vec<usize>>) -> bool {
    fn extend(n: usize, close: &[bool], limit: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) -> bool {
        let start = cur.last().map_or(0, |&l| l + 1);
        for j in start..n {
            if cur.iter().all(|&i| close[i * n + j]) {
                cur.push(j);
                out.push(cur.clone());
                if out.len() > limit || !extend(n, close, limit, cur, out) {
                    return false;
                }
                cur.pop();
            }
        }
        true
    }
    extend(n, close, limit, &mut Vec::new(), out)
}

fn sample_cliques(n: usize, close: &[bool], count: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let anchor = rng.gen_range(0..n);
            let mut others: Vec<usize> = (0..n).filter(|&j| j != anchor && close[anchor * n + j]).collect();
            others.shuffle(&mut rng);
            let mut set = vec![anchor];
            for j in others {
                if rng.gen_bool(0.5) && set.iter().all(|&i| close[i * n + j]) {
                    set.push(j);
                }
            }
            set.sort_unstable();
            set
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Presentation;
    use crate::truncation::{build_net, build_truncation};

    #[test]
    fn singleton_on_tree_has_zero_phi() {
        let t = build_truncation(&Presentation::free(2), 6).unwrap();
        for v in t.interior_vertices().filter(|&v| t.depth(v) <= 3) {
            assert_eq!(phi_of_set(&t, &[v], 1), PhiValue::Finite(0));
        }
        let net = build_net(&t, 1).unwrap();
        let e = connectivity_phi(&t, &net, 1, 0, &PhiConfig::default()).unwrap();
        assert_eq!(e.value, PhiValue::Finite(0));
        assert_eq!(e.mode, PhiMode::WindowExact);
        assert_eq!(e.candidates, t.ball_len(3));
    }

    #[test]
    fn edge_pair_on_tree() {
        let t = build_truncation(&Presentation::free(2), 6).unwrap();
        let a = t.parse_vertex("a").unwrap();
        // Every trace of B_1({e, a}) is still a single vertex.
        assert_eq!(phi_of_set(&t, &[VertexId::IDENTITY, a], 1), PhiValue::Finite(0));
        let aa = t.parse_vertex("aa").unwrap();
        assert_eq!(phi_of_set(&t, &[VertexId::IDENTITY, aa], 1), PhiValue::Finite(0));
    }

    #[test]
    fn shell_trace_is_infinite() {
        let t = build_truncation(&Presentation::free(2), 3).unwrap();
        let v = t.parse_vertex("aa").unwrap();
        assert_eq!(phi_of_set(&t, &[v], 1), PhiValue::Infinite);
    }

    #[test]
    fn sampling_is_seeded() {
        let t = build_truncation(&Presentation::free_product(&[2, 3]), 8).unwrap();
        let net = build_net(&t, 1).unwrap();
        let cfg = PhiConfig { window_radius: Some(3), max_exhaustive: 5, seed: 7 };
        let a = connectivity_phi(&t, &net, 2, 2, &cfg).unwrap();
        let b = connectivity_phi(&t, &net, 2, 2, &cfg).unwrap();
        assert_eq!(a.mode, PhiMode::Sampled);
        assert_eq!(a, b);
    }
}
