use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use super::construct::{Regions, WallFamily};
use crate::error::{Error, Result};
use crate::harmonic::HarmonicField;
use crate::truncation::{Edge, Truncation, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegionNode {
    pub representative: String,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WallNode {
    pub label: String,
    pub labels: Vec<String>,
    pub edge_count: usize,
    /// The two regions the wall separates.
    pub regions: (usize, usize),
}

/// Regions as vertices, walls as edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WallTree {
    pub regions: Vec<RegionNode>,
    pub walls: Vec<WallNode>,
    pub connected: bool,
    pub acyclic: bool,
    /// `|walls| = |regions| - 1`.
    pub euler: bool,
}

impl WallTree {
    pub fn is_tree(&self) -> bool {
        self.connected && self.acyclic
    }
}

/// Assembles the incidence graph and checks that it is a tree.
pub fn build_wall_tree(t: &Truncation, family: &WallFamily, regions: &Regions) -> Result<WallTree> {
    let mut walls = Vec::with_capacity(family.walls.len());
    for w in &family.walls {
        let touched: BTreeSet<u32> =
            w.edges.iter().flat_map(|e| [regions.region_of[e.0.index()], regions.region_of[e.1.index()]]).collect();
        if touched.len() != 2 {
            return Err(Error::NotATree(format!("wall {} touches {} regions", w.label(), touched.len())));
        }
        let mut it = touched.into_iter();
        let pair = (it.next().unwrap() as usize, it.next().unwrap() as usize);
        walls.push(WallNode {
            label: w.label().to_string(),
            labels: w.labels.iter().map(ToString::to_string).collect(),
            edge_count: w.edges.len(),
            regions: pair,
        });
    }
    let n = regions.regions.len();

    // Connectivity by breadth-first search.
    let mut adj = vec![Vec::new(); n];
    for (i, w) in walls.iter().enumerate() {
        adj[w.regions.0].push((w.regions.1, i));
        adj[w.regions.1].push((w.regions.0, i));
    }
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for &(y, _) in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    let connected = seen.iter().all(|&s| s);

    // Acyclicity by union-find; the first closing wall names the cycle.
    let mut uf: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut closing = None;
    for (i, w) in walls.iter().enumerate() {
        let (a, b) = (find(&mut uf, w.regions.0), find(&mut uf, w.regions.1));
        if a == b {
            closing = Some(i);
            break;
        }
        uf[a] = b;
    }
    let acyclic = closing.is_none();
    let euler = walls.len() + 1 == n;
    let tree = WallTree {
        regions: regions
            .regions
            .iter()
            .map(|r| RegionNode { representative: t.word_string(r.representative), size: r.size })
            .collect(),
        walls,
        connected,
        acyclic,
        euler,
    };
    if let Some(i) = closing {
        let w = &tree.walls[i];
        return Err(Error::NotATree(format!(
            "wall {} closes a cycle between regions {} and {}",
            w.label, tree.regions[w.regions.0].representative, tree.regions[w.regions.1].representative
        )));
    }
    if !connected {
        return Err(Error::NotATree(format!(
            "{} of {} regions are unreachable",
            seen.iter().filter(|&&s| !s).count(),
            n
        )));
    }
    Ok(tree)
}

/// Where one sampled element sends the walls and regions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ElementAction {
    pub g: String,
    /// Image wall by exact edge set; `None` when the translate leaves the
    /// valid domain or matches no wall of the family.
    pub walls: Vec<Option<usize>>,
    /// Image region when every member translates into one region.
    pub regions: Vec<Option<usize>>,
    /// Walls fixed with their two sides exchanged.
    pub inversions: Vec<usize>,
    /// Image of the level cut of `h`: equal to it, edge-disjoint from it, and
    /// whether it coincides with some wall of the family.
    pub h_wall_equal: bool,
    pub h_wall_disjoint: bool,
    pub h_wall_in_family: bool,
    /// Whether `min(h, g*h)` and `max(h, g*h)` round to a constant on the
    /// outer sphere of the valid domain.
    pub min_trace_constant: bool,
    pub max_trace_constant: bool,
}

impl ElementAction {
    pub fn precisely_invariant(&self) -> bool {
        self.h_wall_equal || self.h_wall_disjoint
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ActionReport {
    pub elements: Vec<ElementAction>,
    /// Per wall, the sampled elements fixing it.
    pub stabilizers: Vec<Vec<String>>,
    /// Regions fixed by every sampled element (window evidence only).
    pub fixed_regions: Vec<usize>,
    pub inversion_count: usize,
}

impl ActionReport {
    pub fn precisely_invariant(&self) -> bool {
        self.elements.iter().all(ElementAction::precisely_invariant)
    }
}

/// The level cut of `h` on every edge of the ball.
fn full_level_cut(h: &HarmonicField, threshold: f64) -> Vec<Edge> {
    let t = h.truncation();
    t.edges().filter(|e| (h.value(e.0) > threshold) != (h.value(e.1) > threshold)).collect()
}

pub fn action_on_tree(h: &HarmonicField, family: &WallFamily, regions: &Regions) -> ActionReport {
    let t = h.truncation();
    let index = family.index_by_edges();
    let h_cut = full_level_cut(h, family.config.threshold);
    let h_wall: BTreeSet<Edge> = family.walls.first().map(|w| w.edges.iter().copied().collect()).unwrap_or_default();
    let outer = t.sphere(t.radius() - family.config.sample_radius);

    let elements: Vec<ElementAction> = family
        .sample
        .par_iter()
        .map(|g| {
            let map = t.left_translation(g);
            let image = |v: VertexId| map[v.index()].filter(|&u| family.in_domain(u));
            let image_edges = |edges: &[Edge]| -> Option<Vec<Edge>> {
                let mut out: Vec<Edge> =
                    edges.iter().map(|e| Some(Edge::new(image(e.0)?, image(e.1)?))).collect::<Option<_>>()?;
                out.sort_unstable();
                Some(out)
            };
            let walls: Vec<Option<usize>> = family
                .walls
                .iter()
                .map(|w| image_edges(&w.edges).and_then(|img| index.get(img.as_slice()).copied()))
                .collect();

            let mut target: Vec<Option<Option<u32>>> = vec![None; regions.regions.len()];
            for v in 0..family.domain_len {
                let r = regions.region_of[v] as usize;
                let img = image(VertexId(v as u32)).map(|u| regions.region_of[u.index()]);
                target[r] = match (target[r], img) {
                    (None, img) => Some(img),
                    (Some(Some(a)), Some(b)) if a == b => Some(Some(a)),
                    _ => Some(None),
                };
            }
            let region_map: Vec<Option<usize>> = target.into_iter().map(|x| x.flatten().map(|r| r as usize)).collect();

            let inversions: Vec<usize> = walls
                .iter()
                .enumerate()
                .filter(|&(i, img)| *img == Some(i))
                .filter(|&(i, _)| {
                    let w = &family.walls[i];
                    let e = w.edges[0];
                    let (p, m) = if w.is_plus(e.0) { (e.0, e.1) } else { (e.1, e.0) };
                    let (gp, gm) = (image(p).expect("fixed wall"), image(m).expect("fixed wall"));
                    !w.is_plus(gp) && w.is_plus(gm)
                })
                .map(|(i, _)| i)
                .collect();

            let mut h_image: Vec<Edge> =
                h_cut.iter().filter_map(|e| Some(Edge::new(image(e.0)?, image(e.1)?))).collect();
            h_image.sort_unstable();
            // Restricting the translate to the valid domain is exact here:
            // every domain edge has its preimage inside the ball.
            let h_wall_equal = h_image.len() == h_wall.len() && h_image.iter().all(|e| h_wall.contains(e));
            let h_wall_disjoint = h_image.iter().all(|e| !h_wall.contains(e));
            let h_wall_in_family = index.contains_key(h_image.as_slice());

            let (mut lo, mut hi) = (BTreeSet::new(), BTreeSet::new());
            for v in outer.clone() {
                let v = VertexId(v as u32);
                let (a, b) = (h.value(v), h.value(map[v.index()].expect("domain translates into the ball")));
                lo.insert(a.min(b) > 0.5);
                hi.insert(a.max(b) > 0.5);
            }
            ElementAction {
                g: g.to_string(),
                walls,
                regions: region_map,
                inversions,
                h_wall_equal,
                h_wall_disjoint,
                h_wall_in_family,
                min_trace_constant: lo.len() == 1,
                max_trace_constant: hi.len() == 1,
            }
        })
        .collect();

    let stabilizers: Vec<Vec<String>> = (0..family.walls.len())
        .map(|i| elements.iter().filter(|a| a.walls[i] == Some(i)).map(|a| a.g.clone()).collect())
        .collect();
    let fixed_regions =
        (0..regions.regions.len()).filter(|&r| elements.iter().all(|a| a.regions[r] == Some(r))).collect();
    let inversion_count = elements.iter().map(|a| a.inversions.len()).sum();
    ActionReport { elements, stabilizers, fixed_regions, inversion_count }
}

/// Summary counts for reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WallTreeSummary {
    pub threshold: f64,
    pub sample_radius: u32,
    pub sample_size: usize,
    pub walls: usize,
    pub regions: usize,
    pub is_tree: bool,
    pub euler: bool,
    pub crossing_pairs: usize,
    pub violations: usize,
    pub relations: BTreeMap<String, usize>,
    pub inversions: usize,
    pub precisely_invariant: bool,
    pub max_stabilizer: usize,
    pub fixed_regions: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ends::{end_classes, EndFunction};
    use crate::group::{Presentation, Word};
    use crate::harmonic::{solve_dirichlet, SolverConfig};
    use crate::truncation::build_truncation;
    use crate::walls::{build_walls, choose_threshold, indecomposable_regions, WallConfig, WallOptions};
    use std::sync::Arc;

    fn f2_first_letter(rho: u32) -> HarmonicField {
        let t = Arc::new(build_truncation(&Presentation::free(2), rho).unwrap());
        let classes = end_classes(&t, 1).unwrap();
        let chi = EndFunction::first_letter(&t, &classes, 'a').unwrap();
        solve_dirichlet(&t, &classes, &chi, &SolverConfig::default()).unwrap()
    }

    #[test]
    fn one_wall_is_a_path() {
        let h = f2_first_letter(6);
        let t = h.truncation();
        let opts = WallOptions { sample_radius: 0, ..WallOptions::default() };
        let cfg = choose_threshold(&h, &[Word::identity()], &opts).unwrap();
        let fam = build_walls(&h, &cfg).unwrap();
        let regions = indecomposable_regions(t, &fam).unwrap();
        let tree = build_wall_tree(t, &fam, &regions).unwrap();
        assert_eq!((tree.regions.len(), tree.walls.len()), (2, 1));
        assert_eq!(tree.walls[0].regions, (0, 1));
        let action = action_on_tree(&h, &fam, &regions);
        assert_eq!(action.elements[0].walls, vec![Some(0)]);
        assert_eq!(action.elements[0].regions, vec![Some(0), Some(1)]);
        assert_eq!(action.fixed_regions, vec![0, 1]);
        assert_eq!(action.stabilizers, vec![vec!["e".to_string()]]);
    }

    #[test]
    fn first_letter_tree_and_action() {
        let h = f2_first_letter(8);
        let t = h.truncation();
        let opts = WallOptions { sample_radius: 2, ..WallOptions::default() };
        let cfg = choose_threshold(&h, &t.group_ball(2), &opts).unwrap();
        let fam = build_walls(&h, &cfg).unwrap();
        let regions = indecomposable_regions(t, &fam).unwrap();
        let tree = build_wall_tree(t, &fam, &regions).unwrap();
        assert!(tree.is_tree() && tree.euler);
        assert_eq!(tree.walls.len() + 1, tree.regions.len());
        let action = action_on_tree(&h, &fam, &regions);
        assert!(action.precisely_invariant());
        assert_eq!(action.inversion_count, 0);
        let aa = action.elements.iter().find(|a| a.g == "aa").unwrap();
        assert!(aa.h_wall_disjoint && !aa.h_wall_equal);
        // The h-wall is the single edge e–a; its translate by aa is aa–aaa.
        let h_wall = &fam.walls[0].edges;
        let expected = Edge::new(t.parse_vertex("aa").unwrap(), t.parse_vertex("aaa").unwrap());
        assert!(!h_wall.contains(&expected));
        assert!(action.stabilizers.iter().all(|s| s == &vec!["e".to_string()]));
    }

    #[test]
    fn swapping_sides_is_recorded_as_an_inversion() {
        // In Z/2*Z the involution a swaps the two sides of the edge e–a. A
        // field growing away from that edge on one side and falling on the
        // other satisfies a*h = 1 - h.
        let t = Arc::new(build_truncation(&Presentation::free_product(&[2, 0]), 8).unwrap());
        let values: Vec<f64> = t
            .vertices()
            .map(|v| {
                let w = t.word(v);
                let n = w.len() as f64;
                if w.first_letter().is_some_and(|l| l.factor == 0) {
                    0.5 + 0.05 * n
                } else {
                    0.5 - 0.05 * (n + 1.0)
                }
            })
            .collect();
        let h = HarmonicField::from_values(t.clone(), values).unwrap();
        let cfg = WallConfig { threshold: 0.501, sample_radius: 1, equality_tol: 1e-9 };
        let fam = build_walls(&h, &cfg).unwrap();
        let a_verdict = fam.verdicts.iter().find(|v| v.g == "a").unwrap();
        assert_eq!(a_verdict.relation, super::super::Relation::EqOneMinusH);
        let regions = indecomposable_regions(&t, &fam).unwrap();
        let action = action_on_tree(&h, &fam, &regions);
        let a = action.elements.iter().find(|x| x.g == "a").unwrap();
        assert_eq!(a.walls[0], Some(0));
        assert_eq!(a.inversions, vec![0]);
        // Explicit side images: a exchanges e and a.
        let e = VertexId::IDENTITY;
        let av = t.parse_vertex("a").unwrap();
        assert_ne!(fam.walls[0].is_plus(e), fam.walls[0].is_plus(av));
        assert_eq!(t.left_multiply(&t.group().parse_word("a").unwrap(), e), Some(av));
    }
}
