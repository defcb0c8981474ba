use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::Word;
use crate::harmonic::HarmonicField;
use crate::truncation::VertexId;

/// How a pullback `f = g*h` compares with `h` and `1 - h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    EqH,
    LtH,
    GtH,
    EqOneMinusH,
    LtOneMinusH,
    GtOneMinusH,
    Violation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrichotomyVerdict {
    pub g: String,
    pub relation: Relation,
    /// For equalities the largest deviation; for inequalities the largest
    /// excess in the wrong direction (at most the tolerance); for violations
    /// the smallest such excess over the four inequalities.
    pub max_slack: f64,
    /// Vertex attaining `max_slack`.
    pub witness: Option<VertexId>,
    /// Number of vertices compared.
    pub compared: usize,
}

#[derive(Debug, Clone, Copy)]
struct Extreme {
    value: f64,
    at: Option<VertexId>,
}

impl Extreme {
    fn new() -> Self {
        Extreme { value: f64::NEG_INFINITY, at: None }
    }

    fn push(&mut self, x: f64, v: VertexId) {
        if x > self.value {
            self.value = x;
            self.at = Some(v);
        }
    }
}

/// Classifies triples `(v, f(v), h(v))` in the fixed priority order
/// eq_h, eq_one_minus_h, lt_h, gt_h, lt_one_minus_h, gt_one_minus_h.
pub fn classify_relation(
    samples: impl IntoIterator<Item = (VertexId, f64, f64)>,
    equality_tol: f64,
) -> Option<(Relation, f64, Option<VertexId>, usize)> {
    // Slots: |f-h|, f-h, h-f, |f-(1-h)|, f-(1-h), (1-h)-f.
    let mut ext = [Extreme::new(); 6];
    let mut n = 0;
    for (v, f, h) in samples {
        let c = 1.0 - h;
        ext[0].push((f - h).abs(), v);
        ext[1].push(f - h, v);
        ext[2].push(h - f, v);
        ext[3].push((f - c).abs(), v);
        ext[4].push(f - c, v);
        ext[5].push(c - f, v);
        n += 1;
    }
    if n == 0 {
        return None;
    }
    let order = [
        (0, Relation::EqH),
        (3, Relation::EqOneMinusH),
        (1, Relation::LtH),
        (2, Relation::GtH),
        (4, Relation::LtOneMinusH),
        (5, Relation::GtOneMinusH),
    ];
    for (slot, rel) in order {
        if ext[slot].value <= equality_tol {
            return Some((rel, ext[slot].value, ext[slot].at, n));
        }
    }
    let best =
        [1, 2, 4, 5].into_iter().map(|s| ext[s]).min_by(|a, b| a.value.total_cmp(&b.value)).expect("four candidates");
    Some((Relation::Violation, best.value, best.at, n))
}

/// Compares `g*h` with `h` and `1 - h` on the vertices `v` with `v` and
/// `g·v` both interior.
pub fn trichotomy(h: &HarmonicField, g: &Word, equality_tol: f64) -> Result<TrichotomyVerdict> {
    let t = h.truncation();
    let map = t.left_translation(g);
    let samples = t.interior_vertices().filter_map(|v| {
        let gv = map[v.index()]?;
        t.is_interior(gv).then(|| (v, h.value(gv), h.value(v)))
    });
    let (relation, max_slack, witness, compared) = classify_relation(samples, equality_tol)
        .ok_or_else(|| Error::InvalidArgument(format!("pullback by {g} has an empty interior window")))?;
    Ok(TrichotomyVerdict { g: g.to_string(), relation, max_slack, witness, compared })
}

pub fn violation_count(verdicts: &[TrichotomyVerdict]) -> usize {
    verdicts.iter().filter(|v| v.relation == Relation::Violation).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ends::{end_classes, EndFunction};
    use crate::group::Presentation;
    use crate::harmonic::{solve_dirichlet, SolverConfig};
    use crate::truncation::build_truncation;
    use std::sync::Arc;

    fn f2_first_letter(rho: u32) -> HarmonicField {
        let t = Arc::new(build_truncation(&Presentation::free(2), rho).unwrap());
        let classes = end_classes(&t, 1).unwrap();
        let chi = EndFunction::first_letter(&t, &classes, 'a').unwrap();
        solve_dirichlet(&t, &classes, &chi, &SolverConfig::default()).unwrap()
    }

    fn rel(pairs: &[(f64, f64)]) -> Relation {
        classify_relation(pairs.iter().enumerate().map(|(i, &(f, h))| (VertexId(i as u32), f, h)), 1e-9).unwrap().0
    }

    #[test]
    fn relation_priority() {
        assert_eq!(rel(&[(0.3, 0.3), (0.5, 0.5)]), Relation::EqH);
        assert_eq!(rel(&[(0.7, 0.3), (0.4, 0.6)]), Relation::EqOneMinusH);
        assert_eq!(rel(&[(0.2, 0.3), (0.5, 0.5)]), Relation::LtH);
        assert_eq!(rel(&[(0.4, 0.3), (0.6, 0.5)]), Relation::GtH);
        // f > h somewhere and f < h elsewhere, but f <= 1 - h throughout.
        assert_eq!(rel(&[(0.1, 0.2), (0.3, 0.2)]), Relation::LtOneMinusH);
        assert_eq!(rel(&[(0.9, 0.8), (0.7, 0.8)]), Relation::GtOneMinusH);
        assert_eq!(rel(&[(0.1, 0.2), (0.5, 0.2), (0.45, 0.6)]), Relation::Violation);
        assert!(classify_relation(std::iter::empty(), 1e-9).is_none());
    }

    #[test]
    fn identity_is_equal_with_zero_slack() {
        let h = f2_first_letter(6);
        let v = trichotomy(&h, &Word::identity(), 1e-9).unwrap();
        assert_eq!(v.relation, Relation::EqH);
        assert_eq!(v.max_slack, 0.0);
    }

    #[test]
    fn shifting_toward_the_one_cluster_raises_h() {
        let h = f2_first_letter(8);
        let t = h.truncation();
        for (w, want) in [("a", Some(Relation::GtH)), ("A", Some(Relation::LtH)), ("b", None)] {
            let g = t.group().parse_word(w).unwrap();
            let verdict = trichotomy(&h, &g, 1e-9).unwrap();
            // Direct scan through word multiplication.
            let (mut above, mut below, mut n) = (f64::NEG_INFINITY, f64::NEG_INFINITY, 0);
            for v in t.interior_vertices() {
                let Some(gv) = t.left_multiply(&g, v) else { continue };
                if !t.is_interior(gv) {
                    continue;
                }
                above = above.max(h.value(gv) - h.value(v));
                below = below.max(h.value(v) - h.value(gv));
                n += 1;
            }
            assert_eq!(verdict.compared, n);
            match want {
                Some(Relation::GtH) => assert!(below <= 1e-9 && verdict.relation == Relation::GtH),
                Some(Relation::LtH) => assert!(above <= 1e-9 && verdict.relation == Relation::LtH),
                _ => {
                    // Recorded against the scan: h-comparisons fail both ways.
                    assert!(above > 1e-9 && below > 1e-9);
                    assert!(!matches!(verdict.relation, Relation::EqH | Relation::LtH | Relation::GtH));
                }
            }
        }
    }
}
