use std::collections::BTreeSet;

use ends_splitter::ends::{complement_components, end_classes, label_components};
use ends_splitter::{build_truncation, Presentation, Truncation, VertexId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn find(p: &mut [usize], mut x: usize) -> usize {
    while p[x] != x {
        p[x] = p[p[x]];
        x = p[x];
    }
    x
}

/// Components of the kept vertices by union-find over the edge list.
fn union_find_partition(t: &Truncation, removed: &[bool]) -> BTreeSet<Vec<usize>> {
    let mut parent: Vec<usize> = (0..t.len()).collect();
    for e in t.edges() {
        let (a, b) = (e.0.index(), e.1.index());
        if !removed[a] && !removed[b] {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
            }
        }
    }
    let mut groups = std::collections::BTreeMap::<usize, Vec<usize>>::new();
    for (v, &gone) in removed.iter().enumerate() {
        if !gone {
            let r = find(&mut parent, v);
            groups.entry(r).or_default().push(v);
        }
    }
    groups.into_values().collect()
}

#[test]
fn flood_fill_matches_union_find_on_random_removals() {
    let presentations = [
        Presentation::free(2),
        Presentation::free_product(&[2, 3]),
        Presentation::free_product(&[4, 0]),
        Presentation::free(3),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for i in 0..100 {
        let p = &presentations[i % presentations.len()];
        let t = build_truncation(p, 5).unwrap();
        let density = rng.gen_range(0.05..0.6);
        let removed: Vec<bool> = t.vertices().map(|_| rng.gen_bool(density)).collect();
        let (label, count) = label_components(&t, &removed);
        let mut groups = std::collections::BTreeMap::<u32, Vec<usize>>::new();
        for v in 0..t.len() {
            if !removed[v] {
                groups.entry(label[v]).or_default().push(v);
            }
        }
        let ours: BTreeSet<Vec<usize>> = groups.into_values().collect();
        assert_eq!(ours.len(), count, "{p} instance {i}");
        assert_eq!(ours, union_find_partition(&t, &removed), "{p} instance {i}");
    }
}

#[test]
fn ball_complement_on_z2_z3() {
    let t = build_truncation(&Presentation::free_product(&[2, 3]), 8).unwrap();
    let ball = t.ball_around(VertexId::IDENTITY, 2);
    let comps = complement_components(&t, &ball);
    // Removed set is the interior of the ball: the vertices of B_1.
    let removed: Vec<bool> = t.vertices().map(|v| t.depth(v) <= 1).collect();
    let oracle = union_find_partition(&t, &removed);
    assert_eq!(comps.len(), oracle.len());
    let ours: BTreeSet<Vec<usize>> = comps
        .iter()
        .map(|c| c.members.iter().map(|v| v.index()).collect::<BTreeSet<_>>().into_iter().collect())
        .collect();
    assert_eq!(ours, oracle);
}

#[test]
fn end_classes_refine_with_radius() {
    let t = build_truncation(&Presentation::free(2), 6).unwrap();
    for (r, expected) in [(1, 4), (2, 12), (3, 36)] {
        assert_eq!(end_classes(&t, r).unwrap().len(), expected);
    }
    let fine = end_classes(&t, 3).unwrap();
    let coarse = end_classes(&t, 1).unwrap();
    let map = fine.refinement_map(&coarse);
    for (k, img) in map.iter().enumerate() {
        let rep = fine.classes[k].component.representative();
        assert_eq!(*img, coarse.class_of(rep));
    }
}
