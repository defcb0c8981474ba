//! Complement components, end classes, end-functions and clusters.
//!
//! Complements follow the closed-set convention `N^c = M ∖ int(N)`: the
//! interior of a vertex set keeps only members that are not on the shell and
//! whose neighbors all lie in the set. For a ball `B_r(x)` the interior is
//! `B_{r-1}(x)`, so the complement of `B_1(e)` in the 4-regular tree has four
//! components, one per branch.

mod connectivity;

pub use connectivity::{connectivity_phi, PhiConfig, PhiEntry, PhiMode, PhiValue};

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::Word;
use crate::truncation::{Truncation, VertexId, NONE};

/// One connected component of a complement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComplementComponent {
    /// Members in increasing id order.
    pub members: Vec<VertexId>,
    /// True when the component reaches the shell.
    pub unbounded: bool,
    /// Members adjacent to the removed set.
    pub boundary_attachment: Vec<VertexId>,
}

impl ComplementComponent {
    pub fn representative(&self) -> VertexId {
        self.members[0]
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    pub fn shell_members<'a>(&'a self, t: &'a Truncation) -> impl Iterator<Item = VertexId> + 'a {
        self.members.iter().copied().filter(move |&v| t.is_shell(v))
    }
}

/// Membership mask of a vertex list.
pub fn mask_of(t: &Truncation, set: &[VertexId]) -> Vec<bool> {
    let mut mask = vec![false; t.len()];
    for v in set {
        mask[v.index()] = true;
    }
    mask
}

/// Interior of a set: members off the shell whose neighbors are all members.
pub fn interior_mask(t: &Truncation, set: &[bool]) -> Vec<bool> {
    t.vertices().map(|v| set[v.index()] && !t.is_shell(v) && t.neighbors(v).all(|u| set[u.index()])).collect()
}

/// Labels the connected components of the vertices outside `removed`.
///
/// Components are numbered in order of their smallest member. Removed
/// vertices get `u32::MAX`. Returns the labels and the component count.
pub fn label_components(t: &Truncation, removed: &[bool]) -> (Vec<u32>, usize) {
    let mut label = vec![NONE; t.len()];
    let mut count = 0u32;
    let mut queue = VecDeque::new();
    for s in t.vertices() {
        if removed[s.index()] || label[s.index()] != NONE {
            continue;
        }
        label[s.index()] = count;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for u in t.neighbors(v) {
                if !removed[u.index()] && label[u.index()] == NONE {
                    label[u.index()] = count;
                    queue.push_back(u);
                }
            }
        }
        count += 1;
    }
    (label, count as usize)
}

/// Components of `t ∖ removed` (the removed set is taken literally).
pub fn components_outside(t: &Truncation, removed: &[bool]) -> Vec<ComplementComponent> {
    let (label, count) = label_components(t, removed);
    let mut comps: Vec<ComplementComponent> = (0..count)
        .map(|_| ComplementComponent { members: Vec::new(), unbounded: false, boundary_attachment: Vec::new() })
        .collect();
    for v in t.vertices() {
        let l = label[v.index()];
        if l == NONE {
            continue;
        }
        let c = &mut comps[l as usize];
        c.members.push(v);
        if t.is_shell(v) {
            c.unbounded = true;
        }
        if t.neighbors(v).any(|u| removed[u.index()]) {
            c.boundary_attachment.push(v);
        }
    }
    comps
}

/// Components of the complement `N^c = M ∖ int(N)` of the vertex set `set`.
pub fn complement_components(t: &Truncation, set: &[VertexId]) -> Vec<ComplementComponent> {
    components_outside(t, &interior_mask(t, &mask_of(t, set)))
}

/// An unbounded component of the complement of `B_r(e)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndClass {
    pub id: usize,
    pub base_radius: u32,
    pub component: ComplementComponent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EndClassSummary {
    pub id: usize,
    pub base_radius: u32,
    pub representative_vertex_word: String,
    pub size: usize,
    pub unbounded: bool,
}

/// All end classes at one base radius, with a vertex lookup.
#[derive(Debug, Clone)]
pub struct EndClasses {
    pub base_radius: u32,
    pub classes: Vec<EndClass>,
    class_of: Vec<u32>,
}

impl EndClasses {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// End class containing `v`, if `v` lies in an unbounded component.
    pub fn class_of(&self, v: VertexId) -> Option<usize> {
        let c = self.class_of[v.index()];
        (c != NONE).then_some(c as usize)
    }

    pub fn summaries(&self, t: &Truncation) -> Vec<EndClassSummary> {
        self.classes
            .iter()
            .map(|c| EndClassSummary {
                id: c.id,
                base_radius: c.base_radius,
                representative_vertex_word: t.word_string(c.component.representative()),
                size: c.component.members.len(),
                unbounded: c.component.unbounded,
            })
            .collect()
    }

    /// For each class here, the class at the coarser radius that contains it.
    pub fn refinement_map(&self, coarser: &EndClasses) -> Vec<Option<usize>> {
        self.classes
            .iter()
            .map(|c| {
                let owners: BTreeSet<Option<usize>> =
                    c.component.members.iter().map(|&v| coarser.class_of(v)).collect();
                match owners.into_iter().collect::<Vec<_>>().as_slice() {
                    [Some(k)] => Some(*k),
                    _ => None,
                }
            })
            .collect()
    }
}

/// End classes at base radius `r`: the unbounded components of `B_r(e)^c`.
pub fn end_classes(t: &Truncation, r: u32) -> Result<EndClasses> {
    if r < 1 || r >= t.radius() {
        return Err(Error::InvalidArgument(format!(
            "base radius {r} must satisfy 1 <= r < truncation radius {}",
            t.radius()
        )));
    }
    let removed: Vec<bool> = t.vertices().map(|v| t.depth(v) < r).collect();
    let comps = components_outside(t, &removed);
    let mut class_of = vec![NONE; t.len()];
    let mut classes = Vec::new();
    for component in comps.into_iter().filter(|c| c.unbounded) {
        let id = classes.len();
        for v in &component.members {
            class_of[v.index()] = id as u32;
        }
        classes.push(EndClass { id, base_radius: r, component });
    }
    if classes.is_empty() {
        return Err(Error::NoUnboundedComponent { base_radius: r, radius: t.radius() });
    }
    Ok(EndClasses { base_radius: r, classes, class_of })
}

/// A {0,1}-valued assignment on the end classes of one base radius.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EndFunction {
    pub base_radius: u32,
    pub values: Vec<u8>,
}

impl EndFunction {
    pub fn new(base_radius: u32, values: Vec<u8>) -> Result<Self> {
        if values.iter().any(|&x| x > 1) {
            return Err(Error::InvalidArgument("end-function values must be 0 or 1".into()));
        }
        Ok(EndFunction { base_radius, values })
    }

    pub fn constant(classes: &EndClasses, value: u8) -> Self {
        EndFunction { base_radius: classes.base_radius, values: vec![value.min(1); classes.len()] }
    }

    /// 1 on classes whose representative starts with `letter`, else 0.
    pub fn first_letter(t: &Truncation, classes: &EndClasses, letter: char) -> Result<Self> {
        let l = t
            .group()
            .parse_letter(letter)
            .ok_or_else(|| Error::InvalidWord { word: letter.to_string(), reason: "not a generator letter".into() })?;
        let values = classes
            .classes
            .iter()
            .map(|c| u8::from(t.word(c.component.representative()).first_letter() == Some(l)))
            .collect();
        Ok(EndFunction { base_radius: classes.base_radius, values })
    }

    /// Value of the longest key that prefixes the class representative's
    /// normal form; `default` when no key matches.
    pub fn from_prefixes(
        t: &Truncation,
        classes: &EndClasses,
        prefixes: &BTreeMap<Word, u8>,
        default: Option<u8>,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(classes.len());
        for c in &classes.classes {
            let rep = t.word(c.component.representative());
            let rep_letters: Vec<_> = rep.letters().collect();
            let best = prefixes
                .iter()
                .filter(|(k, _)| {
                    let kl: Vec<_> = k.letters().collect();
                    kl.len() <= rep_letters.len() && kl[..] == rep_letters[..kl.len()]
                })
                .max_by_key(|(k, _)| k.len())
                .map(|(_, &v)| v)
                .or(default);
            match best {
                Some(v) if v <= 1 => values.push(v),
                Some(_) => return Err(Error::InvalidArgument("chi values must be 0 or 1".into())),
                None => return Err(Error::InvalidArgument(format!("chi leaves the end class at {rep} unassigned"))),
            }
        }
        Ok(EndFunction { base_radius: classes.base_radius, values })
    }

    pub fn is_nonconstant(&self) -> bool {
        self.values.contains(&0) && self.values.contains(&1)
    }

    pub fn require_nonconstant(&self) -> Result<()> {
        if self.is_nonconstant() {
            Ok(())
        } else {
            Err(Error::ConstantEndFunction)
        }
    }

    pub fn value(&self, class: usize) -> u8 {
        self.values[class]
    }

    /// Pointwise order on classes.
    pub fn le(&self, other: &EndFunction) -> bool {
        self.values.len() == other.values.len() && self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }
}

/// Cluster status of one unbounded component under an end-function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "verdict", content = "theta", rename_all = "snake_case")]
pub enum ClusterVerdict {
    /// Every end met by the component has this value.
    Cluster(u8),
    /// The component meets ends of both values.
    NotCluster,
    /// Some ends are not visible; carries the value of the visible ones, if
    /// they agree.
    Undetermined(Option<u8>),
}

impl ClusterVerdict {
    /// Verdict from the set of end values met so far.
    pub fn from_values(seen0: bool, seen1: bool, complete: bool) -> Self {
        match (seen0, seen1) {
            (true, true) => ClusterVerdict::NotCluster,
            (true, false) if complete => ClusterVerdict::Cluster(0),
            (false, true) if complete => ClusterVerdict::Cluster(1),
            (true, false) => ClusterVerdict::Undetermined(Some(0)),
            (false, true) => ClusterVerdict::Undetermined(Some(1)),
            (false, false) => ClusterVerdict::Undetermined(None),
        }
    }

    /// The decided verdicts this one may stand for.
    pub fn options(self) -> Vec<ClusterVerdict> {
        match self {
            ClusterVerdict::Undetermined(Some(th)) => vec![ClusterVerdict::Cluster(th), ClusterVerdict::NotCluster],
            ClusterVerdict::Undetermined(None) => {
                vec![ClusterVerdict::Cluster(0), ClusterVerdict::Cluster(1), ClusterVerdict::NotCluster]
            }
            v => vec![v],
        }
    }
}

/// `Some(θ)` when every end class met by `c` at the shell has value θ.
pub fn is_cluster(t: &Truncation, classes: &EndClasses, chi: &EndFunction, c: &ComplementComponent) -> Option<u8> {
    match cluster_verdict(t, classes, chi, c) {
        ClusterVerdict::Cluster(th) => Some(th),
        _ => None,
    }
}

pub fn cluster_verdict(
    t: &Truncation,
    classes: &EndClasses,
    chi: &EndFunction,
    c: &ComplementComponent,
) -> ClusterVerdict {
    let mut seen = [false; 2];
    for v in c.shell_members(t) {
        if let Some(k) = classes.class_of(v) {
            seen[chi.value(k) as usize] = true;
        }
    }
    ClusterVerdict::from_values(seen[0], seen[1], true)
}
