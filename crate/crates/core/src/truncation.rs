//! Finite balls in Cayley graphs.
//!
//! A [`Truncation`] is the ball of radius `ρ` around the identity in the
//! right-multiplication Cayley graph (`v ~ v·s`). Vertex ids are assigned
//! breadth-first with the generator order of [`Group::letters`], so the
//! identity is `0` and every sphere occupies a contiguous id range.
//!
//! Words are not stored per vertex. Each vertex keeps its last syllable and
//! the id of the vertex obtained by deleting that syllable (its *stem*), which
//! is enough to rebuild the normal form and to compute left translations.

use std::collections::VecDeque;
use std::ops::Range;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Group, Letter, Presentation, Syllable, Word};

pub(crate) const NONE: u32 = u32::MAX;
const NO_FACTOR: u8 = u8::MAX;

/// Dense index of a vertex inside one truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub u32);

impl VertexId {
    pub const IDENTITY: VertexId = VertexId(0);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// An undirected edge stored with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge(pub VertexId, pub VertexId);

impl Edge {
    pub fn new(a: VertexId, b: VertexId) -> Self {
        if a <= b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }
}

#[derive(Debug)]
pub struct Truncation {
    group: Group,
    radius: u32,
    degree: usize,
    neighbors: Vec<u32>,
    depth: Vec<u8>,
    stem: Vec<u32>,
    last_factor: Vec<u8>,
    last_exp: Vec<i16>,
    sphere_start: Vec<usize>,
    colors: OnceLock<Vec<Vec<VertexId>>>,
}

/// Builds the ball `B_radius(identity)` with full adjacency among its vertices.
pub fn build_truncation(presentation: &Presentation, radius: u32) -> Result<Truncation> {
    if radius < 1 {
        return Err(Error::InvalidArgument("truncation radius must be >= 1".into()));
    }
    if radius > u8::MAX as u32 {
        return Err(Error::InvalidArgument("truncation radius must be <= 255".into()));
    }
    let group = Group::new(presentation.clone())?;
    Ok(Truncation::from_group(group, radius))
}

impl Truncation {
    fn from_group(group: Group, radius: u32) -> Self {
        let letters: Vec<Letter> = group.letters().to_vec();
        let degree = letters.len();
        let mut t = Truncation {
            group,
            radius,
            degree,
            neighbors: vec![NONE; degree],
            depth: vec![0],
            stem: vec![NONE],
            last_factor: vec![NO_FACTOR],
            last_exp: vec![0],
            sphere_start: vec![0],
            colors: OnceLock::new(),
        };

        // Pass 1: create vertices through canonical extensions only, so each
        // element is created exactly once, by its canonical parent.
        let mut v = 0usize;
        while v < t.depth.len() {
            let d = t.depth[v] as u32;
            if d == radius {
                break;
            }
            if t.sphere_start.len() <= d as usize + 1 {
                t.sphere_start.push(t.depth.len());
            }
            for (j, &letter) in letters.iter().enumerate() {
                let Some((stem, syllable)) = t.canonical_extension(v, letter) else {
                    continue;
                };
                let child = t.depth.len() as u32;
                t.depth.push((d + 1) as u8);
                t.stem.push(stem);
                t.last_factor.push(syllable.factor);
                t.last_exp.push(syllable.exp as i16);
                t.neighbors.extend(std::iter::repeat_n(NONE, degree));
                t.neighbors[v * degree + j] = child;
            }
            v += 1;
        }
        if t.sphere_start.len() <= radius as usize {
            t.sphere_start.push(t.depth.len());
        }
        t.sphere_start.push(t.depth.len());

        // Pass 2: every remaining product is either the stem or reached by
        // walking canonical extensions from the stem.
        let n = t.depth.len();
        for v in 0..n {
            for (j, &letter) in letters.iter().enumerate() {
                if t.neighbors[v * degree + j] != NONE {
                    continue;
                }
                let target = t.product_by_walk(v, letter);
                t.neighbors[v * degree + j] = target;
            }
        }
        t
    }

    /// When `v·letter` is one step further from the identity and `v` is its
    /// canonical parent, returns the child's stem and last syllable.
    fn canonical_extension(&self, v: usize, letter: Letter) -> Option<(u32, Syllable)> {
        let f = self.last_factor[v];
        let s = letter.sign() as i64;
        if f == NO_FACTOR || f != letter.factor {
            let exp = self.group.canonical_exponent(letter.factor, s);
            return Some((v as u32, Syllable { factor: letter.factor, exp: exp as i32 }));
        }
        let e = self.last_exp[v] as i64;
        let next = e + s;
        if e.signum() != s || self.group.canonical_exponent(f, next) != next {
            return None;
        }
        Some((self.stem[v], Syllable { factor: f, exp: next as i32 }))
    }

    fn product_by_walk(&self, v: usize, letter: Letter) -> u32 {
        let f = self.last_factor[v];
        if f == NO_FACTOR || f != letter.factor {
            // A canonical extension that left the ball.
            return NONE;
        }
        let e = self.group.canonical_exponent(f, self.last_exp[v] as i64 + letter.sign() as i64);
        let stem = self.stem[v];
        if e == 0 {
            return stem;
        }
        let step = Letter { factor: f, inverse: e < 0 };
        self.walk(stem, step, e.unsigned_abs() as usize)
    }

    fn walk(&self, from: u32, letter: Letter, times: usize) -> u32 {
        let j = self.group.letter_index(letter);
        let mut cur = from;
        for _ in 0..times {
            if cur == NONE {
                return NONE;
            }
            cur = self.neighbors[cur as usize * self.degree + j];
        }
        cur
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn presentation(&self) -> &Presentation {
        self.group.presentation()
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    /// Number of vertices.
    pub fn len(&self) -> usize {
        self.depth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.depth.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.len() as u32).map(VertexId)
    }

    /// Word length of `v`, i.e. its distance from the identity.
    #[inline]
    pub fn depth(&self, v: VertexId) -> u32 {
        self.depth[v.index()] as u32
    }

    #[inline]
    pub fn is_shell(&self, v: VertexId) -> bool {
        self.depth(v) == self.radius
    }

    #[inline]
    pub fn is_interior(&self, v: VertexId) -> bool {
        self.depth(v) < self.radius
    }

    /// Id range of the sphere of radius `k` (empty when `k > radius`).
    pub fn sphere(&self, k: u32) -> Range<usize> {
        if k > self.radius {
            return self.len()..self.len();
        }
        self.sphere_start[k as usize]..self.sphere_start[k as usize + 1]
    }

    /// Number of vertices of word length `<= r`.
    pub fn ball_len(&self, r: u32) -> usize {
        self.sphere(r.min(self.radius)).end
    }

    pub fn interior_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.ball_len(self.radius - 1) as u32).map(VertexId)
    }

    pub fn shell_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.sphere(self.radius).map(|i| VertexId(i as u32))
    }

    /// Neighbor of `v` along the `j`-th generator letter.
    #[inline]
    pub fn neighbor(&self, v: VertexId, j: usize) -> Option<VertexId> {
        let u = self.neighbors[v.index() * self.degree + j];
        (u != NONE).then_some(VertexId(u))
    }

    /// In-ball neighbors of `v` in generator order.
    #[inline]
    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        let base = v.index() * self.degree;
        self.neighbors[base..base + self.degree].iter().filter(|&&u| u != NONE).map(|&u| VertexId(u))
    }

    /// Right action `v ↦ v·letter`; `None` means the product left the ball.
    pub fn apply_generator(&self, v: VertexId, letter: Letter) -> Option<VertexId> {
        self.neighbor(v, self.group.letter_index(letter))
    }

    /// Normal form of the group element at `v`.
    pub fn word(&self, v: VertexId) -> Word {
        let mut syllables = Vec::with_capacity(self.depth(v) as usize);
        let mut cur = v.0;
        while cur != 0 {
            let i = cur as usize;
            syllables.push(Syllable { factor: self.last_factor[i], exp: self.last_exp[i] as i32 });
            cur = self.stem[i];
        }
        let mut w = Word::identity();
        for s in syllables.into_iter().rev() {
            let letter = Letter { factor: s.factor, inverse: s.exp < 0 };
            for _ in 0..s.exp.unsigned_abs() {
                self.group.mul_letter(&mut w, letter);
            }
        }
        w
    }

    pub fn word_string(&self, v: VertexId) -> String {
        self.word(v).to_string()
    }

    /// Vertex of a group element, if it lies in the ball.
    pub fn locate(&self, w: &Word) -> Option<VertexId> {
        if w.len() > self.radius as usize {
            return None;
        }
        let mut cur = VertexId::IDENTITY;
        for letter in w.letters() {
            cur = self.apply_generator(cur, letter)?;
        }
        Some(cur)
    }

    pub fn parse_vertex(&self, text: &str) -> Result<VertexId> {
        let w = self.group.parse_word(text)?;
        self.locate(&w).ok_or_else(|| Error::InvalidWord {
            word: text.to_string(),
            reason: format!("outside the truncation of radius {}", self.radius),
        })
    }

    /// Word-metric distance between two vertices.
    pub fn distance(&self, u: VertexId, v: VertexId) -> u32 {
        self.group.distance(&self.word(u), &self.word(v)) as u32
    }

    /// All group elements of word length `<= r`, in vertex-id order.
    pub fn group_ball(&self, r: u32) -> Vec<Word> {
        (0..self.ball_len(r) as u32).map(|i| self.word(VertexId(i))).collect()
    }

    /// Edges in edge-id order: lexicographic in (lower endpoint, letter).
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.vertices().flat_map(move |v| self.neighbors(v).filter(move |&u| u > v).map(move |u| Edge(v, u)))
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    /// `q·(factor^exp)` for a canonical exponent, merging with the last
    /// syllable of `q` when the factors agree. Every step of the walk is a
    /// canonical extension, so the result is exact whenever it lies in the ball.
    fn append_syllable(&self, q: u32, factor: u8, exp: i64) -> u32 {
        let i = q as usize;
        let (base, e) = if self.last_factor[i] == factor {
            (self.stem[i], self.group.canonical_exponent(factor, self.last_exp[i] as i64 + exp))
        } else {
            (q, exp)
        };
        if e == 0 {
            return base;
        }
        self.walk(base, Letter { factor, inverse: e < 0 }, e.unsigned_abs() as usize)
    }

    /// The vertex map `v ↦ g·v`, with `None` where the product leaves the ball.
    ///
    /// Left multiplication is a graph automorphism of the Cayley graph, so this
    /// is the isometric group action used by pullbacks. Computed through
    /// `g·v = (g·stem(v))·last(v)`; stems have smaller ids than their vertices.
    pub fn left_translation(&self, g: &Word) -> Vec<Option<VertexId>> {
        if g.len() > self.radius as usize {
            return self.vertices().map(|v| self.left_multiply(g, v)).collect();
        }
        let n = self.len();
        let mut map = vec![NONE; n];
        map[0] = self.locate(g).map_or(NONE, |v| v.0);
        for v in 1..n {
            let q = map[self.stem[v] as usize];
            if q != NONE {
                map[v] = self.append_syllable(q, self.last_factor[v], self.last_exp[v] as i64);
            }
        }
        map.into_iter().map(|c| (c != NONE).then_some(VertexId(c))).collect()
    }

    /// `g·v` through explicit word multiplication.
    pub fn left_multiply(&self, g: &Word, v: VertexId) -> Option<VertexId> {
        self.locate(&self.group.multiply(g, &self.word(v)))
    }

    /// Greedy proper coloring of the interior, scanned in id order.
    /// Vertices of one color class have no edges between them.
    pub fn interior_colors(&self) -> &[Vec<VertexId>] {
        self.colors.get_or_init(|| {
            let n_int = self.ball_len(self.radius - 1);
            let mut color = vec![u8::MAX; n_int];
            let mut classes: Vec<Vec<VertexId>> = Vec::new();
            for v in 0..n_int {
                let mut used = 0u64;
                for u in self.neighbors(VertexId(v as u32)) {
                    if u.index() < n_int && color[u.index()] != u8::MAX {
                        used |= 1 << color[u.index()];
                    }
                }
                let c = (!used).trailing_zeros() as usize;
                color[v] = c as u8;
                if classes.len() <= c {
                    classes.resize_with(c + 1, Vec::new);
                }
                classes[c].push(VertexId(v as u32));
            }
            classes
        })
    }

    /// Breadth-first distances from `sources` through vertices accepted by
    /// `passable`, stopping at `max_dist`. Unreached vertices get `u32::MAX`.
    pub fn bfs(&self, sources: &[VertexId], max_dist: u32, passable: impl Fn(VertexId) -> bool) -> Vec<u32> {
        let mut dist = vec![NONE; self.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s.index()] == NONE {
                dist[s.index()] = 0;
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            let d = dist[v.index()];
            if d >= max_dist {
                continue;
            }
            for u in self.neighbors(v) {
                if dist[u.index()] == NONE && passable(u) {
                    dist[u.index()] = d + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    /// Vertices within distance `r` of `center`, found by a local search
    /// that touches only the ball itself.
    pub fn ball_around(&self, center: VertexId, r: u32) -> Vec<VertexId> {
        let mut seen = std::collections::HashSet::from([center]);
        let mut out = vec![center];
        let mut frontier = vec![center];
        for _ in 0..r {
            let mut next = Vec::new();
            for &v in &frontier {
                for u in self.neighbors(v) {
                    if seen.insert(u) {
                        next.push(u);
                    }
                }
            }
            out.extend_from_slice(&next);
            frontier = next;
        }
        out
    }

    /// Vertices within distance `r` of `sources`, as a membership mask.
    pub fn ball_mask(&self, sources: &[VertexId], r: u32) -> Vec<bool> {
        self.bfs(sources, r, |_| true).into_iter().map(|d| d != NONE).collect()
    }
}

/// A greedy maximal `δ`-separated set of vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Net {
    pub spacing: u32,
    pub members: Vec<VertexId>,
}

impl Net {
    pub fn contains(&self, v: VertexId) -> bool {
        self.members.binary_search(&v).is_ok()
    }
}

/// Greedy scan in vertex-id order: a vertex joins unless it is closer than
/// `δ` to a member already chosen. The identity is always a member.
pub fn build_net(t: &Truncation, delta: u32) -> Result<Net> {
    if delta < 1 {
        return Err(Error::InvalidArgument("net spacing must be >= 1".into()));
    }
    let mut blocked = vec![false; t.len()];
    let mut members = Vec::new();
    // Local ball search; `stamp` avoids clearing per member.
    let mut stamp = vec![u32::MAX; t.len()];
    let (mut frontier, mut next) = (Vec::new(), Vec::new());
    for v in t.vertices() {
        if blocked[v.index()] {
            continue;
        }
        let id = members.len() as u32;
        members.push(v);
        frontier.clear();
        frontier.push(v);
        stamp[v.index()] = id;
        for _ in 1..delta {
            next.clear();
            for &x in &frontier {
                blocked[x.index()] = true;
                for u in t.neighbors(x) {
                    if stamp[u.index()] != id {
                        stamp[u.index()] = id;
                        next.push(u);
                    }
                }
            }
            std::mem::swap(&mut frontier, &mut next);
        }
        for &x in &frontier {
            blocked[x.index()] = true;
        }
    }
    Ok(Net { spacing: delta, members })
}
