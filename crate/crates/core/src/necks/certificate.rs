//! Energy lower bounds charged to type-1 necks.
//!
//! A type-1 neck has components `M0`, `M1` carrying 0- and 1-clusters. Pick
//! `x0 ∈ M0` with `h(x0) <= ε` and `x1 ∈ M1` with `h(x1) >= 1 - ε`, join them
//! by a shortest path `β` of length `l`. By Cauchy-Schwarz the energy on the
//! edges of `β` is at least `(h(x1) - h(x0))² / l`, which is the certified `μ`.

use std::collections::BTreeSet;

use serde::Serialize;

use super::classify::component_verdict;
use super::probe::{neck_component_members, Neck};
use super::NeckReport;
use crate::ends::ClusterVerdict;
use crate::error::{Error, Result};
use crate::harmonic::{edge_energy, HarmonicField};
use crate::truncation::{Edge, Truncation, VertexId, NONE};

/// Witness threshold for the low and high endpoints.
pub const WITNESS_EPSILON: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapCertificate {
    pub neck_center: VertexId,
    pub witness_path: Vec<VertexId>,
    pub low_value: f64,
    pub high_value: f64,
    /// Both endpoints met the ε thresholds (otherwise extremes were used).
    pub epsilon_reached: bool,
    pub drop: f64,
    pub length: usize,
    pub mu: f64,
    pub path_energy: f64,
    /// Edges with both endpoints within distance 1 of the path.
    pub region: Vec<Edge>,
    pub region_energy: f64,
}

impl GapCertificate {
    /// `μ <= E(path) <= E(region)`, checked by direct summation.
    pub fn is_sound(&self) -> bool {
        self.mu <= self.path_energy * (1.0 + 1e-12) && self.path_energy <= self.region_energy * (1.0 + 1e-12)
    }

    pub fn region_disjoint(&self, other: &GapCertificate) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.region.len() && j < other.region.len() {
            match self.region[i].cmp(&other.region[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }
}

// Nearest member (from the attachment side) meeting `want`, else the member
// with the extreme value.
fn witness(
    t: &Truncation,
    h: &HarmonicField,
    members: &[VertexId],
    ball: &[bool],
    want_high: bool,
) -> (VertexId, bool) {
    let mut inside = vec![false; t.len()];
    for v in members {
        inside[v.index()] = true;
    }
    let sources: Vec<VertexId> = members.iter().copied().filter(|&v| t.neighbors(v).any(|u| ball[u.index()])).collect();
    let dist = t.bfs(&sources, u32::MAX - 1, |u| inside[u.index()]);
    let good = |v: VertexId| {
        if want_high {
            h.value(v) >= 1.0 - WITNESS_EPSILON
        } else {
            h.value(v) <= WITNESS_EPSILON
        }
    };
    let nearest =
        members.iter().copied().filter(|&v| dist[v.index()] != NONE && good(v)).min_by_key(|&v| (dist[v.index()], v));
    if let Some(v) = nearest {
        return (v, true);
    }
    let extreme = members.iter().copied().max_by(|&a, &b| {
        let (x, y) = (h.value(a), h.value(b));
        let ord = if want_high { x.total_cmp(&y) } else { y.total_cmp(&x) };
        ord.then(b.cmp(&a))
    });
    (extreme.expect("component is nonempty"), false)
}

fn shortest_path(t: &Truncation, from: VertexId, to: VertexId) -> Vec<VertexId> {
    let mut parent = vec![NONE; t.len()];
    parent[from.index()] = from.0;
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for u in t.neighbors(v) {
            if parent[u.index()] == NONE {
                parent[u.index()] = v.0;
                queue.push_back(u);
            }
        }
    }
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        cur = VertexId(parent[cur.index()]);
        path.push(cur);
    }
    path.reverse();
    path
}

/// Best certificate over all (0-cluster, 1-cluster) component pairs of a
/// type-1 neck.
pub fn gap_certificate(h: &HarmonicField, neck: &Neck, report: &NeckReport) -> Result<GapCertificate> {
    let t = h.truncation();
    let members = neck_component_members(t, neck.center, neck.radius);
    let mut zeros = Vec::new();
    let mut ones = Vec::new();
    for (c, m) in neck.components.iter().zip(&members) {
        if !c.unbounded {
            continue;
        }
        match component_verdict(c, &report.chi) {
            ClusterVerdict::Cluster(0) => zeros.push(m),
            ClusterVerdict::Cluster(_) => ones.push(m),
            _ => {}
        }
    }
    if zeros.is_empty() || ones.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "neck at {} has no pair of 0- and 1-cluster components",
            t.word_string(neck.center)
        )));
    }
    let ball: Vec<bool> = t.ball_mask(&[neck.center], neck.radius);
    let lows: Vec<(VertexId, bool)> = zeros.iter().map(|m| witness(t, h, m, &ball, false)).collect();
    let highs: Vec<(VertexId, bool)> = ones.iter().map(|m| witness(t, h, m, &ball, true)).collect();

    let mut best: Option<GapCertificate> = None;
    for &(x0, ok0) in &lows {
        for &(x1, ok1) in &highs {
            let drop = h.value(x1) - h.value(x0);
            let path = shortest_path(t, x0, x1);
            let length = path.len() - 1;
            let mu = if drop > 0.0 { (drop / length as f64).powi(2) } else { 0.0 };
            if best.as_ref().is_some_and(|b| b.mu >= mu) {
                continue;
            }
            best = Some(GapCertificate {
                neck_center: neck.center,
                low_value: h.value(x0),
                high_value: h.value(x1),
                epsilon_reached: ok0 && ok1,
                drop,
                length,
                mu,
                path_energy: path.windows(2).map(|w| edge_energy(h, Edge::new(w[0], w[1]))).sum(),
                witness_path: path,
                region: Vec::new(),
                region_energy: 0.0,
            });
        }
    }
    let mut cert = best.expect("at least one pair");
    if cert.drop <= 0.0 {
        return Err(Error::DegenerateDrop { center: t.word_string(neck.center), drop: cert.drop });
    }
    let near = t.ball_mask(&cert.witness_path, 1);
    let region: BTreeSet<Edge> = cert
        .witness_path
        .iter()
        .flat_map(|&v| t.ball_around(v, 1))
        .flat_map(|v| t.neighbors(v).filter(|u| near[u.index()]).map(move |u| Edge::new(u, v)))
        .collect();
    cert.region_energy = region.iter().map(|&e| edge_energy(h, e)).sum();
    cert.region = region.into_iter().collect();
    Ok(cert)
}

/// Certificates for every type-1 neck of the report.
pub fn gap_certificates(h: &HarmonicField, necks: &[Neck], report: &NeckReport) -> Result<Vec<GapCertificate>> {
    report
        .k_i
        .iter()
        .map(|&x| {
            let neck = necks.iter().find(|n| n.center == x).expect("type-1 center is a neck");
            gap_certificate(h, neck, report)
        })
        .collect()
}

/// One end-function's energy and its best certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioGap {
    pub label: String,
    pub energy: f64,
    pub best_mu: Option<f64>,
}

/// `[certified_mu, min_energy]` at window scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapBracket {
    /// Smallest per-scenario best certificate; a lower bound for every
    /// energy in the list.
    pub certified_mu: f64,
    pub min_energy: f64,
    pub argmin: String,
    pub scenarios: Vec<ScenarioGap>,
    pub warnings: Vec<String>,
}

pub fn energy_gap_estimate(scenarios: Vec<ScenarioGap>) -> Result<GapBracket> {
    if scenarios.is_empty() {
        return Err(Error::InvalidArgument("gap estimate needs at least one end-function".into()));
    }
    let mut warnings = Vec::new();
    let mut certified_mu = f64::INFINITY;
    for s in &scenarios {
        match s.best_mu {
            Some(mu) => certified_mu = certified_mu.min(mu),
            None => {
                warnings.push(format!("{}: no certificate", s.label));
                certified_mu = 0.0;
            }
        }
    }
    let (argmin, min_energy) =
        scenarios.iter().map(|s| (s.label.clone(), s.energy)).min_by(|a, b| a.1.total_cmp(&b.1)).expect("nonempty");
    Ok(GapBracket { certified_mu, min_energy, argmin, scenarios, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ends::{end_classes, EndFunction};
    use crate::group::Presentation;
    use crate::harmonic::{energy, solve_dirichlet, SolverConfig};
    use crate::necks::{find_necks, special_sets};
    use crate::truncation::{build_net, build_truncation};
    use std::sync::Arc;

    #[test]
    fn first_letter_certificate() {
        let t = Arc::new(build_truncation(&Presentation::free(2), 9).unwrap());
        let classes = end_classes(&t, 1).unwrap();
        let chi = EndFunction::first_letter(&t, &classes, 'a').unwrap();
        let h = solve_dirichlet(&t, &classes, &chi, &SolverConfig::default()).unwrap();
        let net = build_net(&t, 2).unwrap();
        let search = find_necks(&t, &net, &classes, 1, None).unwrap();
        let report = special_sets(&t, &search, &classes, &chi).unwrap();
        let certs = gap_certificates(&h, &search.necks, &report).unwrap();
        assert_eq!(certs.len(), 1);
        let c = &certs[0];
        assert!(c.epsilon_reached);
        assert!(c.mu > 0.0 && c.is_sound());
        assert!(c.mu <= energy(&h).total);
        assert!(c.witness_path.contains(&VertexId::IDENTITY));
    }

    #[test]
    fn bracket_takes_the_weakest_certificate() {
        let b = energy_gap_estimate(vec![
            ScenarioGap { label: "x".into(), energy: 0.5, best_mu: Some(0.1) },
            ScenarioGap { label: "y".into(), energy: 0.7, best_mu: Some(0.05) },
        ])
        .unwrap();
        assert_eq!(b.certified_mu, 0.05);
        assert_eq!(b.min_energy, 0.5);
        assert_eq!(b.argmin, "x");
        let single =
            energy_gap_estimate(vec![ScenarioGap { label: "z".into(), energy: 0.4, best_mu: Some(0.2) }]).unwrap();
        assert_eq!((single.certified_mu, single.min_energy), (0.2, 0.4));
    }
}
