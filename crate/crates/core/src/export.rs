//! Text exports: field CSV, Graphviz DOT and the wall-tree JSON.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

use crate::harmonic::HarmonicField;
use crate::necks::DualGraph;
use crate::truncation::Truncation;
use crate::walls::{ActionReport, WallTree};

/// `word,value` rows in vertex-id order, 17 significant digits.
pub fn field_csv(h: &HarmonicField) -> String {
    let t = h.truncation();
    let mut out = String::from("word,value\n");
    for v in t.vertices() {
        writeln!(out, "{},{:.16e}", t.word_string(v), h.value(v)).expect("write to string");
    }
    out
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Group neighborhoods as boxes, complement components as ellipses.
pub fn dual_graph_dot(t: &Truncation, g: &DualGraph) -> String {
    let mut out = String::from("graph dual {\n");
    for (i, members) in g.groups.iter().enumerate() {
        let words: Vec<String> = members.iter().map(|&v| t.word_string(v)).collect();
        writeln!(out, "  k{i} [shape=box, label={}];", quote(&words.join(" "))).expect("write to string");
    }
    for (j, c) in g.components.iter().enumerate() {
        let label =
            format!("{} ({}{})", t.word_string(c.representative), c.size, if c.unbounded { ", unbounded" } else { "" });
        writeln!(out, "  c{j} [shape=ellipse, label={}];", quote(&label)).expect("write to string");
    }
    for &(i, j) in &g.edges {
        writeln!(out, "  k{i} -- c{j};").expect("write to string");
    }
    out.push_str("}\n");
    out
}

/// Regions as ellipses labelled by size, walls as edges labelled by element.
pub fn wall_tree_dot(tree: &WallTree) -> String {
    let mut out = String::from("graph walls {\n");
    for (i, r) in tree.regions.iter().enumerate() {
        writeln!(out, "  r{i} [shape=ellipse, label={}];", quote(&r.size.to_string())).expect("write to string");
    }
    for w in &tree.walls {
        writeln!(out, "  r{} -- r{} [label={}];", w.regions.0, w.regions.1, quote(&w.label)).expect("write to string");
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeNodeJson {
    pub id: String,
    pub kind: &'static str,
    pub label: String,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeEdgeJson {
    pub wall: String,
    pub region: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElementJson {
    /// Node id to image node id; absent where undefined in the window.
    pub permutation: BTreeMap<String, String>,
    pub inversions: Vec<String>,
    pub precisely_invariant: bool,
    pub min_trace_constant: bool,
    pub max_trace_constant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WallTreeJson {
    pub nodes: Vec<TreeNodeJson>,
    pub edges: Vec<TreeEdgeJson>,
    pub action: BTreeMap<String, ElementJson>,
    pub stabilizers: BTreeMap<String, Vec<String>>,
    pub fixed_regions: Vec<String>,
    pub is_tree: bool,
}

/// The bipartite incidence tree with the partial action of the sample.
pub fn wall_tree_json(tree: &WallTree, action: &ActionReport) -> WallTreeJson {
    let region_id = |i: usize| format!("r{i}");
    let wall_id = |i: usize| format!("w{i}");
    let mut nodes: Vec<TreeNodeJson> = tree
        .regions
        .iter()
        .enumerate()
        .map(|(i, r)| TreeNodeJson { id: region_id(i), kind: "region", label: r.representative.clone(), size: r.size })
        .collect();
    nodes.extend(tree.walls.iter().enumerate().map(|(i, w)| TreeNodeJson {
        id: wall_id(i),
        kind: "wall",
        label: w.label.clone(),
        size: w.edge_count,
    }));
    let edges = tree
        .walls
        .iter()
        .enumerate()
        .flat_map(|(i, w)| [w.regions.0, w.regions.1].map(|r| TreeEdgeJson { wall: wall_id(i), region: region_id(r) }))
        .collect();
    let action_map = action
        .elements
        .iter()
        .map(|a| {
            let mut permutation = BTreeMap::new();
            for (i, img) in a.regions.iter().enumerate() {
                if let Some(j) = img {
                    permutation.insert(region_id(i), region_id(*j));
                }
            }
            for (i, img) in a.walls.iter().enumerate() {
                if let Some(j) = img {
                    permutation.insert(wall_id(i), wall_id(*j));
                }
            }
            let json = ElementJson {
                permutation,
                inversions: a.inversions.iter().map(|&i| wall_id(i)).collect(),
                precisely_invariant: a.precisely_invariant(),
                min_trace_constant: a.min_trace_constant,
                max_trace_constant: a.max_trace_constant,
            };
            (a.g.clone(), json)
        })
        .collect();
    WallTreeJson {
        nodes,
        edges,
        action: action_map,
        stabilizers: action.stabilizers.iter().enumerate().map(|(i, s)| (wall_id(i), s.clone())).collect(),
        fixed_regions: action.fixed_regions.iter().map(|&r| region_id(r)).collect(),
        is_tree: tree.is_tree(),
    }
}
