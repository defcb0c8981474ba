//! Complement components of `B_R(x)` for many centers at once.
//!
//! For a center at word length `m >= R` put `s = m - R`. The ball `B_s(e)`
//! misses `B_{R-1}(x)` and is connected, so it sits in a single complement
//! component `c0`, together with every component of `{|v| > s}` other than
//! the one containing `x` (call it `D`). Only `D ∖ B_{R-1}(x)` is explored;
//! its pieces that reach word length `s + 1` join `c0`, the rest are
//! separate components. Data on `c0` comes from per-level totals minus `D`.

use rayon::prelude::*;
use serde::Serialize;

use crate::ends::{components_outside, interior_mask, label_components, EndClasses};
use crate::error::{Error, Result};
use crate::truncation::{Net, Truncation, VertexId, NONE};

/// Summary of one complement component of a neck.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NeckComponent {
    /// Smallest member id.
    pub representative: VertexId,
    pub size: usize,
    pub unbounded: bool,
    /// End classes met by the component's shell vertices, ascending.
    pub end_classes: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Neck {
    pub center: VertexId,
    pub radius: u32,
    /// All complement components in order of smallest member.
    pub components: Vec<NeckComponent>,
}

impl Neck {
    pub fn unbounded_components(&self) -> impl Iterator<Item = &NeckComponent> {
        self.components.iter().filter(|c| c.unbounded)
    }

    pub fn unbounded_count(&self) -> usize {
        self.unbounded_components().count()
    }

    /// At least three unbounded complement components.
    pub fn is_neck(&self) -> bool {
        self.unbounded_count() >= 3
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverCheck {
    /// Vertices of word length at most this were required to be covered.
    pub window_radius: u32,
    /// Largest distance from a window vertex to the nearest neck center.
    pub covering_radius: Option<u32>,
    pub covered: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NeckSearch {
    pub radius: u32,
    pub margin: u32,
    /// Net members of word length at most this were probed.
    pub probe_radius: u32,
    pub probed: usize,
    pub necks: Vec<Neck>,
    pub cover: CoverCheck,
}

fn summarize(t: &Truncation, classes: &EndClasses, label: &[u32], count: usize) -> Vec<NeckComponent> {
    let mut comps: Vec<NeckComponent> = (0..count)
        .map(|_| NeckComponent {
            representative: VertexId(u32::MAX),
            size: 0,
            unbounded: false,
            end_classes: Vec::new(),
        })
        .collect();
    for v in t.vertices() {
        let l = label[v.index()];
        if l == NONE {
            continue;
        }
        let c = &mut comps[l as usize];
        if c.size == 0 {
            c.representative = v;
        }
        c.size += 1;
        if t.is_shell(v) {
            c.unbounded = true;
            if let Some(k) = classes.class_of(v) {
                c.end_classes.push(k as u32);
            }
        }
    }
    for c in &mut comps {
        c.end_classes.sort_unstable();
        c.end_classes.dedup();
    }
    comps
}

/// Complement components of `B_R(center)` by a full flood fill.
pub fn neck_components(t: &Truncation, classes: &EndClasses, center: VertexId, big_r: u32) -> Vec<NeckComponent> {
    let removed = interior_mask(t, &t.ball_mask(&[center], big_r));
    let (label, count) = label_components(t, &removed);
    summarize(t, classes, &label, count)
}

/// Member lists of the complement components of `B_R(center)`.
pub fn neck_component_members(t: &Truncation, center: VertexId, big_r: u32) -> Vec<Vec<VertexId>> {
    let removed = interior_mask(t, &t.ball_mask(&[center], big_r));
    components_outside(t, &removed).into_iter().map(|c| c.members).collect()
}

struct Level {
    s: u32,
    label: Vec<u32>,
    shell: Vec<bool>,
    classes: Vec<Vec<u32>>,
    class_count: Vec<u32>,
    shell_count: u32,
}

impl Level {
    fn new(t: &Truncation, classes: &EndClasses, s: u32) -> Self {
        let removed: Vec<bool> = t.vertices().map(|v| t.depth(v) <= s).collect();
        let (label, count) = label_components(t, &removed);
        let mut shell = vec![false; count];
        let mut comp_classes = vec![Vec::new(); count];
        for v in t.shell_vertices() {
            let l = label[v.index()] as usize;
            shell[l] = true;
            if let Some(k) = classes.class_of(v) {
                comp_classes[l].push(k as u32);
            }
        }
        let mut class_count = vec![0u32; classes.len()];
        for cs in &mut comp_classes {
            cs.sort_unstable();
            cs.dedup();
            for &k in cs.iter() {
                class_count[k as usize] += 1;
            }
        }
        let shell_count = shell.iter().filter(|&&b| b).count() as u32;
        Level { s, label, shell, classes: comp_classes, class_count, shell_count }
    }
}

struct Scratch {
    seen: Vec<u32>,
    epoch: u32,
    queue: Vec<VertexId>,
}

fn probe_far(
    t: &Truncation,
    classes: &EndClasses,
    level: &Level,
    center: VertexId,
    big_r: u32,
    sc: &mut Scratch,
) -> Vec<NeckComponent> {
    let s = level.s;
    let mut removed: Vec<VertexId> = Vec::new();
    {
        // B_{R-1}(center) by a local search.
        sc.epoch += 1;
        let ep = sc.epoch;
        let mut frontier = vec![center];
        sc.seen[center.index()] = ep;
        for _ in 1..big_r {
            let mut next = Vec::new();
            for &v in &frontier {
                for u in t.neighbors(v) {
                    if sc.seen[u.index()] != ep {
                        sc.seen[u.index()] = ep;
                        next.push(u);
                    }
                }
            }
            removed.append(&mut frontier);
            frontier = next;
        }
        removed.append(&mut frontier);
    }
    removed.sort_unstable();
    let is_removed = |v: VertexId| removed.binary_search(&v).is_ok();
    let dx = level.label[center.index()];

    struct Piece {
        rep: VertexId,
        size: usize,
        shell: bool,
        classes: Vec<u32>,
        portal: bool,
    }
    let mut pieces: Vec<Piece> = Vec::new();
    sc.epoch += 1;
    let ep = sc.epoch;
    for &r in &removed {
        for seed in t.neighbors(r) {
            if is_removed(seed) || level.label[seed.index()] != dx || sc.seen[seed.index()] == ep {
                continue;
            }
            let mut p = Piece { rep: seed, size: 0, shell: false, classes: Vec::new(), portal: false };
            sc.queue.clear();
            sc.queue.push(seed);
            sc.seen[seed.index()] = ep;
            let mut head = 0;
            while head < sc.queue.len() {
                let v = sc.queue[head];
                head += 1;
                p.size += 1;
                p.rep = p.rep.min(v);
                if t.depth(v) == s + 1 {
                    p.portal = true;
                }
                if t.is_shell(v) {
                    p.shell = true;
                    if let Some(k) = classes.class_of(v) {
                        p.classes.push(k as u32);
                    }
                }
                for u in t.neighbors(v) {
                    if sc.seen[u.index()] != ep && level.label[u.index()] == dx && !is_removed(u) {
                        sc.seen[u.index()] = ep;
                        sc.queue.push(u);
                    }
                }
            }
            p.classes.sort_unstable();
            p.classes.dedup();
            pieces.push(p);
        }
    }

    let dx_classes = &level.classes[dx as usize];
    let mut c0_classes: Vec<u32> = (0..classes.len() as u32)
        .filter(|&k| level.class_count[k as usize] > u32::from(dx_classes.binary_search(&k).is_ok()))
        .collect();
    let mut c0_unbounded = level.shell_count > u32::from(level.shell[dx as usize]);
    let mut c0_size = t.len() - removed.len();
    let mut out = Vec::new();
    for p in pieces {
        if p.portal {
            c0_unbounded |= p.shell;
            c0_classes.extend(p.classes);
        } else {
            c0_size -= p.size;
            out.push(NeckComponent { representative: p.rep, size: p.size, unbounded: p.shell, end_classes: p.classes });
        }
    }
    c0_classes.sort_unstable();
    c0_classes.dedup();
    out.push(NeckComponent {
        representative: VertexId::IDENTITY,
        size: c0_size,
        unbounded: c0_unbounded,
        end_classes: c0_classes,
    });
    out.sort_by_key(|c| c.representative);
    out
}

/// Probes every net member of word length `<= ρ - R - margin` and keeps the
/// centers whose complement has at least three unbounded components.
/// The margin defaults to `2R`.
pub fn find_necks(
    t: &Truncation,
    net: &Net,
    classes: &EndClasses,
    big_r: u32,
    margin: Option<u32>,
) -> Result<NeckSearch> {
    if big_r < 1 {
        return Err(Error::InvalidArgument("neck radius R must be >= 1".into()));
    }
    let margin = margin.unwrap_or(2 * big_r);
    let probe_radius = t.radius().checked_sub(big_r + margin).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "truncation radius {} leaves no room for necks of radius {big_r} with margin {margin}",
            t.radius()
        ))
    })?;
    let centers: Vec<VertexId> = net.members.iter().copied().filter(|&v| t.depth(v) <= probe_radius).collect();

    let mut necks = Vec::new();
    let near: Vec<VertexId> = centers.iter().copied().filter(|&v| t.depth(v) < big_r).collect();
    for &x in &near {
        let neck = Neck { center: x, radius: big_r, components: neck_components(t, classes, x, big_r) };
        if neck.is_neck() {
            necks.push(neck);
        }
    }
    let mut m = big_r;
    while m <= probe_radius {
        let at_m: Vec<VertexId> = centers.iter().copied().filter(|&v| t.depth(v) == m).collect();
        if !at_m.is_empty() {
            let level = Level::new(t, classes, m - big_r);
            let found: Vec<Neck> = at_m
                .par_iter()
                .map_init(
                    || Scratch { seen: vec![0; t.len()], epoch: 0, queue: Vec::new() },
                    |sc, &x| Neck { center: x, radius: big_r, components: probe_far(t, classes, &level, x, big_r, sc) },
                )
                .filter(Neck::is_neck)
                .collect();
            necks.extend(found);
        }
        m += 1;
    }
    necks.sort_by_key(|n| n.center);

    let cover = if necks.is_empty() {
        CoverCheck { window_radius: probe_radius, covering_radius: None, covered: false }
    } else {
        let sources: Vec<VertexId> = necks.iter().map(|n| n.center).collect();
        let dist = t.bfs(&sources, u32::MAX - 1, |_| true);
        let worst = (0..t.ball_len(probe_radius)).map(|i| dist[i]).max().unwrap_or(0);
        CoverCheck { window_radius: probe_radius, covering_radius: Some(worst), covered: worst <= big_r }
    };
    Ok(NeckSearch { radius: big_r, margin, probe_radius, probed: centers.len(), necks, cover })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ends::end_classes;
    use crate::group::Presentation;
    use crate::truncation::{build_net, build_truncation};

    fn compare_all(p: Presentation, rho: u32, base: u32, big_r: u32) {
        let t = build_truncation(&p, rho).unwrap();
        let classes = end_classes(&t, base).unwrap();
        let net = build_net(&t, 1).unwrap();
        let search = find_necks(&t, &net, &classes, big_r, Some(0)).unwrap();
        let mut expected = Vec::new();
        for v in t.vertices().filter(|&v| t.depth(v) <= rho - big_r) {
            let comps = neck_components(&t, &classes, v, big_r);
            let n = Neck { center: v, radius: big_r, components: comps };
            if n.is_neck() {
                expected.push(n);
            }
        }
        assert_eq!(search.necks, expected, "{p} R={big_r}");
    }

    #[test]
    fn fast_probe_matches_full_flood_fill() {
        compare_all(Presentation::free(2), 5, 1, 1);
        compare_all(Presentation::free(2), 6, 2, 2);
        compare_all(Presentation::free_product(&[2, 3]), 9, 2, 2);
        compare_all(Presentation::free_product(&[2, 3]), 9, 1, 1);
        compare_all(Presentation::free_product(&[4, 0]), 5, 1, 1);
        compare_all(Presentation::free(3), 4, 1, 2);
    }

    #[test]
    fn every_tree_vertex_is_a_neck() {
        let t = build_truncation(&Presentation::free(2), 7).unwrap();
        let classes = end_classes(&t, 1).unwrap();
        let net = build_net(&t, 1).unwrap();
        let search = find_necks(&t, &net, &classes, 1, None).unwrap();
        assert_eq!(search.probe_radius, 4);
        assert_eq!(search.necks.len(), t.ball_len(4));
        assert!(search.necks.iter().all(|n| n.unbounded_count() == 4));
        assert!(search.cover.covered);
        assert_eq!(search.cover.covering_radius, Some(0));
    }
}
