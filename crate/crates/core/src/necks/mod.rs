//! Necks: balls whose complement has at least three unbounded components.
//!
//! Necks are found on a net, classified against an end-function, and the
//! special ones are grouped, arranged into a dual graph and charged with
//! certified energy lower bounds.

mod certificate;
mod classify;
mod partition;
mod probe;

pub use certificate::{
    energy_gap_estimate, gap_certificate, gap_certificates, GapBracket, GapCertificate, ScenarioGap,
};
pub use classify::{classify_neck, classify_verdicts, component_verdict, NeckClass};
pub use partition::{dual_graph, partition_k, DualComponent, DualGraph, DualNode, Partition, PartitionParams};
pub use probe::{find_necks, neck_component_members, neck_components, CoverCheck, Neck, NeckComponent, NeckSearch};

use std::collections::BTreeMap;

use serde::Serialize;

use crate::ends::{components_outside, interior_mask, ClusterVerdict, EndClasses, EndFunction};
use crate::error::{Error, Result};
use crate::truncation::{Truncation, VertexId};

#[derive(Debug, Clone, PartialEq)]
pub struct NeckReport {
    pub radius: u32,
    pub chi: EndFunction,
    /// Centers of special necks.
    pub k: Vec<VertexId>,
    pub k_i: Vec<VertexId>,
    pub k_ii: Vec<VertexId>,
    /// Class of every neck in center order; `None` when undecidable.
    pub classes: Vec<(VertexId, Option<NeckClass>)>,
    pub warnings: Vec<String>,
    /// Whether every unbounded component of the complement of `B_R(K_I)`
    /// cobounds a cluster; `None` when `K_I` is empty.
    pub k_i_complement_clusters: Option<bool>,
    /// `E(h) / μ` once certificates are attached.
    pub kappa_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeckReportJson {
    #[serde(rename = "R")]
    pub radius: u32,
    #[serde(rename = "K")]
    pub k: Vec<String>,
    #[serde(rename = "K_I")]
    pub k_i: Vec<String>,
    #[serde(rename = "K_II")]
    pub k_ii: Vec<String>,
    pub classes: BTreeMap<String, String>,
    pub warnings: Vec<String>,
    pub k_i_complement_clusters: Option<bool>,
    pub kappa_bound: Option<f64>,
}

impl NeckReport {
    pub fn class_of(&self, center: VertexId) -> Option<Option<NeckClass>> {
        self.classes.binary_search_by_key(&center, |(c, _)| *c).ok().map(|i| self.classes[i].1)
    }

    pub fn to_json(&self, t: &Truncation) -> NeckReportJson {
        let words = |vs: &[VertexId]| vs.iter().map(|&v| t.word_string(v)).collect::<Vec<_>>();
        NeckReportJson {
            radius: self.radius,
            k: words(&self.k),
            k_i: words(&self.k_i),
            k_ii: words(&self.k_ii),
            classes: self
                .classes
                .iter()
                .map(|(v, c)| (t.word_string(*v), c.map_or("undecidable", NeckClass::label).to_string()))
                .collect(),
            warnings: self.warnings.clone(),
            k_i_complement_clusters: self.k_i_complement_clusters,
            kappa_bound: self.kappa_bound,
        }
    }
}

/// Classifies every neck found by the search and extracts `K`, `K_I`, `K_II`.
pub fn special_sets(
    t: &Truncation,
    search: &NeckSearch,
    classes: &EndClasses,
    chi: &EndFunction,
) -> Result<NeckReport> {
    chi.require_nonconstant()?;
    let mut report = NeckReport {
        radius: search.radius,
        chi: chi.clone(),
        k: Vec::new(),
        k_i: Vec::new(),
        k_ii: Vec::new(),
        classes: Vec::with_capacity(search.necks.len()),
        warnings: Vec::new(),
        k_i_complement_clusters: None,
        kappa_bound: None,
    };
    for neck in &search.necks {
        match classify_neck(t, neck, chi) {
            Ok(c) => {
                match c {
                    NeckClass::SpecialType1 => report.k_i.push(neck.center),
                    NeckClass::SpecialType2 => report.k_ii.push(neck.center),
                    NeckClass::Regular { .. } => {}
                }
                if c.is_special() {
                    report.k.push(neck.center);
                }
                report.classes.push((neck.center, Some(c)));
            }
            Err(e @ Error::Undecidable { .. }) => {
                report.warnings.push(e.to_string());
                report.classes.push((neck.center, None));
            }
            Err(e) => return Err(e),
        }
    }
    if report.k.is_empty() {
        report.warnings.push("no special neck inside the probed window".into());
    }
    if !search.cover.covered {
        report.warnings.push(match search.cover.covering_radius {
            Some(r) => format!(
                "necks of radius {} do not cover the window of radius {}; covering needs radius {r}",
                search.radius, search.cover.window_radius
            ),
            None => "no necks found".to_string(),
        });
    }
    if !report.k_i.is_empty() {
        let ok = k_i_complement_clusters(t, classes, chi, &report.k_i, search.radius);
        if !ok {
            report
                .warnings
                .push("an unbounded component of the complement of B_R(K_I) does not cobound a cluster".into());
        }
        report.k_i_complement_clusters = Some(ok);
    }
    Ok(report)
}

fn k_i_complement_clusters(
    t: &Truncation,
    classes: &EndClasses,
    chi: &EndFunction,
    k_i: &[VertexId],
    big_r: u32,
) -> bool {
    let removed = interior_mask(t, &t.ball_mask(k_i, big_r));
    components_outside(t, &removed)
        .iter()
        .filter(|c| c.unbounded)
        .all(|c| matches!(crate::ends::cluster_verdict(t, classes, chi, c), ClusterVerdict::Cluster(_)))
}

/// Pairs of regular necks whose balls meet but whose values differ.
pub fn intersecting_regular_conflicts(t: &Truncation, report: &NeckReport) -> Vec<(VertexId, VertexId)> {
    let mut theta = vec![None; t.len()];
    for (v, c) in &report.classes {
        if let Some(NeckClass::Regular { theta: th }) = c {
            theta[v.index()] = Some(*th);
        }
    }
    let mut out = Vec::new();
    for (x, c) in &report.classes {
        let Some(NeckClass::Regular { theta: tx }) = c else { continue };
        for y in t.ball_around(*x, 2 * report.radius) {
            if y > *x {
                if let Some(ty) = theta[y.index()] {
                    if ty != *tx {
                        out.push((*x, y));
                    }
                }
            }
        }
    }
    out
}

/// Necks at word length `>= min_depth` that are not regular with the value
/// of the end class containing their center.
pub fn far_neck_violations(
    t: &Truncation,
    report: &NeckReport,
    classes: &EndClasses,
    chi: &EndFunction,
    min_depth: u32,
) -> Vec<VertexId> {
    report
        .classes
        .iter()
        .filter(|(v, _)| t.depth(*v) >= min_depth)
        .filter(|(v, c)| {
            let expected = classes.class_of(*v).map(|k| NeckClass::Regular { theta: chi.value(k) });
            expected.is_some() && *c != expected
        })
        .map(|(v, _)| *v)
        .collect()
}

/// For a type-1 neck all of whose components cobound clusters, every neck
/// with a disjoint ball must be regular. Returns offending pairs.
pub fn isolated_type1_violations(
    t: &Truncation,
    search: &NeckSearch,
    report: &NeckReport,
) -> Vec<(VertexId, VertexId)> {
    let mut out = Vec::new();
    for &x in &report.k_i {
        let neck = search.necks.iter().find(|n| n.center == x).expect("type-1 center is a neck");
        let all_clusters = neck
            .unbounded_components()
            .all(|c| matches!(component_verdict(c, &report.chi), ClusterVerdict::Cluster(_)));
        if !all_clusters {
            continue;
        }
        let near: std::collections::HashSet<VertexId> = t.ball_around(x, 2 * report.radius).into_iter().collect();
        for &y in &report.k {
            if !near.contains(&y) {
                out.push((x, y));
            }
        }
    }
    out
}

/// For every type-2 neck and each of its non-cluster components `M'`,
/// whether `M' ∪ B_R(x)` contains a type-1 center. Returns the failures.
pub fn type2_without_type1(t: &Truncation, search: &NeckSearch, report: &NeckReport) -> Vec<VertexId> {
    let mut out = Vec::new();
    for &x in &report.k_ii {
        let neck = search.necks.iter().find(|n| n.center == x).expect("type-2 center is a neck");
        let members = neck_component_members(t, x, report.radius);
        let ball: std::collections::HashSet<VertexId> = t.ball_around(x, report.radius).into_iter().collect();
        for (c, m) in neck.components.iter().zip(&members) {
            if !c.unbounded || component_verdict(c, &report.chi) != ClusterVerdict::NotCluster {
                continue;
            }
            let found = report.k_i.iter().any(|y| ball.contains(y) || m.binary_search(y).is_ok());
            if !found {
                out.push(x);
                break;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ends::end_classes;
    use crate::group::Presentation;
    use crate::truncation::{build_net, build_truncation};

    fn f2_report(delta: u32) -> (Truncation, NeckSearch, EndClasses, NeckReport) {
        let t = build_truncation(&Presentation::free(2), 8).unwrap();
        let classes = end_classes(&t, 1).unwrap();
        let chi = EndFunction::first_letter(&t, &classes, 'a').unwrap();
        let net = build_net(&t, delta).unwrap();
        let search = find_necks(&t, &net, &classes, 1, None).unwrap();
        let report = special_sets(&t, &search, &classes, &chi).unwrap();
        (t, search, classes, report)
    }

    #[test]
    fn first_letter_special_sets() {
        let (t, search, classes, report) = f2_report(2);
        assert_eq!(report.k_i, vec![VertexId::IDENTITY]);
        assert!(report.k_ii.is_empty());
        assert_eq!(report.k_i_complement_clusters, Some(true));
        assert!(intersecting_regular_conflicts(&t, &report).is_empty());
        assert!(far_neck_violations(&t, &report, &classes, &report.chi, 1).is_empty());
        assert!(isolated_type1_violations(&t, &search, &report).is_empty());
        let b = t.parse_vertex("bb").unwrap();
        assert_eq!(report.class_of(b), Some(Some(NeckClass::Regular { theta: 0 })));

        // With every vertex in the net, both ends of the transition edge are special.
        let (t1, _, _, r1) = f2_report(1);
        assert_eq!(r1.k_i, vec![VertexId::IDENTITY, t1.parse_vertex("a").unwrap()]);
        assert_eq!(r1.class_of(t1.parse_vertex("b").unwrap()), Some(Some(NeckClass::Regular { theta: 0 })));
    }

    #[test]
    fn constant_chi_is_rejected() {
        let t = build_truncation(&Presentation::free(2), 5).unwrap();
        let classes = end_classes(&t, 1).unwrap();
        let net = build_net(&t, 1).unwrap();
        let search = find_necks(&t, &net, &classes, 1, None).unwrap();
        let chi = EndFunction::constant(&classes, 0);
        assert_eq!(special_sets(&t, &search, &classes, &chi), Err(Error::ConstantEndFunction));
    }

    #[test]
    fn json_uses_words() {
        let (t, _, _, report) = f2_report(2);
        let j = report.to_json(&t);
        assert_eq!(j.k_i, vec!["e".to_string()]);
        assert_eq!(j.classes["e"], "special_type_1");
        assert_eq!(j.classes["bb"], "regular_0");
    }
}
