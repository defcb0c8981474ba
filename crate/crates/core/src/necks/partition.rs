use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::ends::{interior_mask, label_components};
use crate::error::{Error, Result};
use crate::truncation::{Truncation, VertexId, NONE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PartitionParams {
    /// Linkage threshold: members this close end up in one group.
    pub max_diameter: u32,
    /// Required gap between the R-neighborhoods of distinct groups.
    pub min_gap: u32,
    /// Neighborhood radius used for the gap.
    pub radius: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Partition {
    pub groups: Vec<Vec<VertexId>>,
    pub diameters: Vec<u32>,
    /// Smallest distance between members of distinct groups.
    pub member_gap: Option<u32>,
    /// Smallest distance between the R-neighborhoods of distinct groups.
    pub neighborhood_gap: Option<u32>,
    /// Neighborhood gaps all exceed the required minimum.
    pub separated: bool,
    /// Some group is wider than the linkage threshold (chaining).
    pub chained: bool,
}

/// Single-linkage grouping: two members share a group when a chain of
/// members joins them with steps of length at most `max_diameter`.
pub fn partition_k(t: &Truncation, k: &[VertexId], params: &PartitionParams) -> Result<Partition> {
    if k.is_empty() {
        return Err(Error::InvalidArgument("cannot partition an empty set".into()));
    }
    let mut k: Vec<VertexId> = k.to_vec();
    k.sort_unstable();
    k.dedup();
    let words: Vec<_> = k.iter().map(|&v| t.word(v)).collect();
    let n = k.len();
    let dist = |i: usize, j: usize| t.group().distance(&words[i], &words[j]) as u32;

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for i in 0..n {
        for j in i + 1..n {
            if dist(i, j) <= params.max_diameter {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    let diameters: Vec<u32> = groups
        .iter()
        .map(|g| g.iter().flat_map(|&i| g.iter().map(move |&j| (i, j))).map(|(i, j)| dist(i, j)).max().unwrap_or(0))
        .collect();
    let mut member_gap: Option<u32> = None;
    for a in 0..groups.len() {
        for b in a + 1..groups.len() {
            for &i in &groups[a] {
                for &j in &groups[b] {
                    let d = dist(i, j);
                    member_gap = Some(member_gap.map_or(d, |g| g.min(d)));
                }
            }
        }
    }
    let neighborhood_gap = member_gap.map(|g| g.saturating_sub(2 * params.radius));
    Ok(Partition {
        separated: neighborhood_gap.is_none_or(|g| g > params.min_gap),
        chained: diameters.iter().any(|&d| d > params.max_diameter),
        groups: groups.into_iter().map(|g| g.into_iter().map(|i| k[i]).collect()).collect(),
        diameters,
        member_gap,
        neighborhood_gap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum DualNode {
    Group(usize),
    Component(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DualComponent {
    pub representative: VertexId,
    pub size: usize,
    pub unbounded: bool,
}

/// Incidence graph between group neighborhoods and the components of the
/// complement of their union.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DualGraph {
    pub groups: Vec<Vec<VertexId>>,
    pub components: Vec<DualComponent>,
    /// `(group, component)` pairs, sorted.
    pub edges: Vec<(usize, usize)>,
    pub connected: bool,
    pub acyclic: bool,
    /// Edge count equals node count minus one.
    pub euler: bool,
    pub is_tree: bool,
    /// A cycle, when one exists.
    pub cycle: Option<Vec<DualNode>>,
}

impl DualGraph {
    pub fn node_count(&self) -> usize {
        self.groups.len() + self.components.len()
    }
}

pub fn dual_graph(t: &Truncation, groups: &[Vec<VertexId>], big_r: u32) -> Result<DualGraph> {
    if groups.is_empty() || groups.iter().any(Vec::is_empty) {
        return Err(Error::InvalidArgument("dual graph needs nonempty groups".into()));
    }
    let all: Vec<VertexId> = groups.iter().flatten().copied().collect();
    let removed = interior_mask(t, &t.ball_mask(&all, big_r));
    let (label, count) = label_components(t, &removed);
    let mut components: Vec<DualComponent> =
        (0..count).map(|_| DualComponent { representative: VertexId(u32::MAX), size: 0, unbounded: false }).collect();
    for v in t.vertices() {
        let l = label[v.index()];
        if l == NONE {
            continue;
        }
        let c = &mut components[l as usize];
        if c.size == 0 {
            c.representative = v;
        }
        c.size += 1;
        c.unbounded |= t.is_shell(v);
    }
    let mut edges = BTreeSet::new();
    for (i, g) in groups.iter().enumerate() {
        let d = t.bfs(g, big_r, |_| true);
        for v in t.vertices() {
            if d[v.index()] != NONE && label[v.index()] != NONE {
                edges.insert((i, label[v.index()] as usize));
            }
        }
    }
    let edges: Vec<(usize, usize)> = edges.into_iter().collect();
    let k = groups.len();
    let nodes = k + count;
    let node = |n: DualNode| match n {
        DualNode::Group(i) => i,
        DualNode::Component(j) => k + j,
    };
    let unnode = |x: usize| if x < k { DualNode::Group(x) } else { DualNode::Component(x - k) };

    // Connectivity and acyclicity by a depth-first traversal.
    let mut adj = vec![Vec::new(); nodes];
    for &(i, j) in &edges {
        let (a, b) = (node(DualNode::Group(i)), node(DualNode::Component(j)));
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut parent = vec![usize::MAX; nodes];
    let mut visited = vec![false; nodes];
    let mut cycle = None;
    let mut roots = 0;
    for s in 0..nodes {
        if visited[s] {
            continue;
        }
        roots += 1;
        visited[s] = true;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !visited[y] {
                    visited[y] = true;
                    parent[y] = x;
                    stack.push(y);
                } else if parent[x] != y && parent[y] != x && cycle.is_none() {
                    cycle = Some(cycle_through(&parent, x, y).into_iter().map(unnode).collect());
                }
            }
        }
    }
    let connected = roots == 1;
    let acyclic = cycle.is_none();
    let euler = edges.len() + 1 == nodes;
    Ok(DualGraph {
        groups: groups.to_vec(),
        components,
        edges,
        connected,
        acyclic,
        euler,
        is_tree: connected && acyclic,
        cycle,
    })
}

// Closes the tree paths from x and y to their common ancestor with the
// extra edge x–y.
fn cycle_through(parent: &[usize], x: usize, y: usize) -> Vec<usize> {
    let up = |mut v: usize| {
        let mut path = vec![v];
        while parent[v] != usize::MAX {
            v = parent[v];
            path.push(v);
        }
        path
    };
    let px = up(x);
    let py = up(y);
    let in_py: std::collections::HashSet<usize> = py.iter().copied().collect();
    let meet = *px.iter().find(|v| in_py.contains(v)).expect("same tree");
    let mut cyc: Vec<usize> = px.iter().copied().take_while(|&v| v != meet).collect();
    cyc.push(meet);
    let back: VecDeque<usize> = py.iter().copied().take_while(|&v| v != meet).collect();
    cyc.extend(back.into_iter().rev());
    cyc
}
