//! Stage orchestration and report assembly.
//!
//! Every command renders its files into memory first; the caller decides
//! where they go. Timings are kept apart from the report so that reports are
//! byte-identical across runs.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use ends_splitter::ends::{connectivity_phi, end_classes, EndClasses, EndFunction, PhiConfig, PhiEntry};
use ends_splitter::export::{dual_graph_dot, field_csv, wall_tree_dot, wall_tree_json};
use ends_splitter::harmonic::{energy, solve_dirichlet, FieldSummary, HarmonicField};
use ends_splitter::necks::{
    dual_graph, energy_gap_estimate, find_necks, gap_certificates, intersecting_regular_conflicts,
    isolated_type1_violations, partition_k, special_sets, type2_without_type1, DualGraph, GapBracket, GapCertificate,
    NeckReport, NeckReportJson, NeckSearch, PartitionParams, ScenarioGap,
};
use ends_splitter::walls::{analyze_walls, WallAnalysis, WallTreeSummary};
use ends_splitter::{build_net, build_truncation, Error, Result, Truncation};
use serde::Serialize;

use crate::scenario::{chi_label, resolve_chi, resolve_chi_list, ChiList, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Necks,
    Gap,
    Tree,
    Run,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateSummary {
    pub neck: String,
    pub mu: f64,
    pub drop: f64,
    pub length: usize,
    pub path_energy: f64,
    pub region_energy: f64,
    pub epsilon_reached: bool,
    pub sound: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualSummary {
    pub groups: usize,
    pub components: usize,
    pub edges: usize,
    pub is_tree: bool,
    pub euler: bool,
    pub separated: bool,
    pub chained: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub scenario: Scenario,
    pub group: String,
    pub vertices: usize,
    pub end_classes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub necks: Option<NeckReportJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificates: Option<Vec<CertificateSummary>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual_graph: Option<DualSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<GapBracket>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub walls: Option<WallTreeSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<PhiEntry>>,
    pub warnings: Vec<String>,
}

/// Results of the neck stage for one end-function.
#[derive(Debug, Clone)]
pub struct NeckOutcome {
    pub report: NeckReport,
    pub certificates: Vec<GapCertificate>,
    pub dual: Option<(DualGraph, DualSummary)>,
    pub warnings: Vec<String>,
}

pub struct Context {
    pub scenario: Scenario,
    pub truncation: Arc<Truncation>,
    pub classes: EndClasses,
    verbose: bool,
    timings: Vec<(String, f64)>,
}

impl Context {
    pub fn new(scenario: Scenario, verbose: bool) -> Result<Self> {
        scenario.validate()?;
        let mut timings = Vec::new();
        let start = Instant::now();
        let truncation = Arc::new(build_truncation(&scenario.group, scenario.truncation_radius)?);
        let classes = end_classes(&truncation, scenario.base_radius)?;
        timings.push(("truncation".to_string(), start.elapsed().as_secs_f64()));
        let ctx = Context { scenario, truncation, classes, verbose, timings };
        ctx.log(&format!(
            "truncation {} radius {}: {} vertices, {} end classes",
            ctx.scenario.group,
            ctx.scenario.truncation_radius,
            ctx.truncation.len(),
            ctx.classes.len()
        ));
        Ok(ctx)
    }

    fn log(&self, line: &str) {
        if self.verbose {
            eprintln!("[{}] {line}", self.scenario.name);
        }
    }

    fn timed<T>(&mut self, stage: &str, f: impl FnOnce(&Self) -> Result<T>) -> Result<T> {
        self.log(&format!("{stage}: start"));
        let start = Instant::now();
        let out = f(self);
        let secs = start.elapsed().as_secs_f64();
        self.timings.push((stage.to_string(), secs));
        self.log(&format!("{stage}: done in {secs:.3}s"));
        out
    }

    pub fn timings(&self) -> &[(String, f64)] {
        &self.timings
    }

    /// The scenario's primary end-function: `chi`, else the first entry of
    /// an explicit `chi_list`.
    pub fn primary_chi(&self) -> Result<(String, EndFunction)> {
        let spec = match (&self.scenario.chi, &self.scenario.chi_list) {
            (Some(c), _) => c.clone(),
            (None, Some(ChiList::List(l))) if !l.is_empty() => l[0].clone(),
            _ => {
                return Err(Error::InvalidArgument(
                    "this command needs a single chi (the \"all\" keyword only applies to gap)".into(),
                ))
            }
        };
        Ok((chi_label(&spec), resolve_chi(&self.truncation, &self.classes, &spec)?))
    }

    pub fn solve(&self, chi: &EndFunction) -> Result<HarmonicField> {
        solve_dirichlet(&self.truncation, &self.classes, chi, &self.scenario.solver)
    }

    pub fn neck_search(&self) -> Result<NeckSearch> {
        let net = build_net(&self.truncation, self.scenario.net_delta)?;
        find_necks(&self.truncation, &net, &self.classes, self.scenario.neck_radius, self.scenario.neck_margin)
    }

    pub fn necks(&self, search: &NeckSearch, h: &HarmonicField, chi: &EndFunction) -> Result<NeckOutcome> {
        let t = &self.truncation;
        let mut report = special_sets(t, search, &self.classes, chi)?;
        let mut warnings = Vec::new();
        let conflicts = intersecting_regular_conflicts(t, &report);
        if !conflicts.is_empty() {
            warnings.push(format!("{} intersecting regular necks with different values", conflicts.len()));
        }
        let isolated = isolated_type1_violations(t, search, &report);
        if !isolated.is_empty() {
            warnings.push(format!("{} special necks disjoint from an isolated type-1 neck", isolated.len()));
        }
        let lonely = type2_without_type1(t, search, &report);
        if !lonely.is_empty() {
            warnings.push(format!("{} type-2 necks with a non-cluster side lacking a type-1 neck", lonely.len()));
        }

        let certificates = gap_certificates(h, &search.necks, &report)?;
        let total = energy(h).total;
        if let Some(min_mu) = certificates.iter().map(|c| c.mu).min_by(f64::total_cmp) {
            let kappa = total / min_mu;
            report.kappa_bound = Some(kappa);
            if report.k_i.len() as f64 > kappa {
                warnings.push(format!("|K_I| = {} exceeds E(h)/min mu = {kappa:.6}", report.k_i.len()));
            }
        }
        for c in &certificates {
            if !c.is_sound() {
                warnings.push(format!("certificate at {} is not sound", t.word_string(c.neck_center)));
            }
        }
        let disjoint =
            certificates.iter().enumerate().all(|(i, a)| certificates[i + 1..].iter().all(|b| a.region_disjoint(b)));
        let mu_sum: f64 = certificates.iter().map(|c| c.mu).sum();
        if disjoint && mu_sum > total * (1.0 + 1e-12) {
            warnings.push(format!("disjoint certificates sum to {mu_sum:e} above E(h) = {total:e}"));
        }

        let dual = if report.k.is_empty() {
            None
        } else {
            let r = self.scenario.neck_radius;
            let params = PartitionParams {
                max_diameter: self.scenario.partition.max_diameter.unwrap_or(4 * r),
                min_gap: self.scenario.partition.min_gap,
                radius: r,
            };
            let p = partition_k(t, &report.k, &params)?;
            let g = dual_graph(t, &p.groups, r)?;
            if p.separated && !g.is_tree {
                warnings.push("separated partition produced a dual graph that is not a tree".into());
            }
            let summary = DualSummary {
                groups: g.groups.len(),
                components: g.components.len(),
                edges: g.edges.len(),
                is_tree: g.is_tree,
                euler: g.euler,
                separated: p.separated,
                chained: p.chained,
            };
            Some((g, summary))
        };
        warnings.extend(report.warnings.iter().cloned());
        Ok(NeckOutcome { report, certificates, dual, warnings })
    }

    /// Solves every end-function of the gap list and brackets the window
    /// energy gap.
    pub fn gap(&self, search: &NeckSearch) -> Result<GapBracket> {
        let list = resolve_chi_list(&self.scenario, &self.truncation, &self.classes)?;
        let mut scenarios = Vec::with_capacity(list.len());
        for (label, chi) in &list {
            chi.require_nonconstant()?;
            let h = self.solve(chi)?;
            let report = special_sets(&self.truncation, search, &self.classes, chi)?;
            let certs = gap_certificates(&h, &search.necks, &report)?;
            let best_mu = certs.iter().map(|c| c.mu).max_by(f64::total_cmp);
            scenarios.push(ScenarioGap { label: label.clone(), energy: energy(&h).total, best_mu });
        }
        let mut bracket = energy_gap_estimate(scenarios)?;
        if bracket.certified_mu > bracket.min_energy {
            bracket.warnings.push("certified mu exceeds the smallest energy".into());
        }
        Ok(bracket)
    }

    pub fn walls(&self, h: &HarmonicField) -> Result<WallAnalysis> {
        analyze_walls(h, &self.scenario.wall)
    }

    pub fn phi(&self) -> Result<Option<Vec<PhiEntry>>> {
        let Some(opts) = &self.scenario.phi else { return Ok(None) };
        let t = build_truncation(&self.scenario.group, opts.truncation_radius)?;
        let net = build_net(&t, self.scenario.net_delta)?;
        let cfg = PhiConfig { window_radius: None, max_exhaustive: opts.max_exhaustive, seed: self.scenario.seed };
        let entries = opts
            .r_values
            .iter()
            .map(|&r| connectivity_phi(&t, &net, self.scenario.neck_radius, r, &cfg))
            .collect::<Result<Vec<_>>>()?;
        Ok(Some(entries))
    }
}

fn certificate_summaries(t: &Truncation, certs: &[GapCertificate]) -> Vec<CertificateSummary> {
    certs
        .iter()
        .map(|c| CertificateSummary {
            neck: t.word_string(c.neck_center),
            mu: c.mu,
            drop: c.drop,
            length: c.length,
            path_energy: c.path_energy,
            region_energy: c.region_energy,
            epsilon_reached: c.epsilon_reached,
            sound: c.is_sound(),
        })
        .collect()
}

/// Rendered files keyed by name, plus the stage timings.
#[derive(Debug, Clone, PartialEq)]
pub struct Outputs {
    pub files: BTreeMap<String, String>,
    pub report: RunReport,
    pub timings: Vec<(String, f64)>,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn execute(command: Command, scenario: Scenario, verbose: bool) -> Result<Outputs> {
    let mut ctx = Context::new(scenario, verbose)?;
    let t = ctx.truncation.clone();
    let mut files = BTreeMap::new();
    let mut report = RunReport {
        scenario: ctx.scenario.clone(),
        group: ctx.scenario.group.to_string(),
        vertices: t.len(),
        end_classes: ctx.classes.len(),
        chi: None,
        field: None,
        necks: None,
        certificates: None,
        dual_graph: None,
        gap: None,
        walls: None,
        phi: None,
        warnings: Vec::new(),
    };

    let wants_field = command != Command::Gap;
    let mut field = None;
    if wants_field {
        let (label, chi) = ctx.primary_chi()?;
        let h = ctx.timed("solve", |c| c.solve(&chi))?;
        let summary = h.summary();
        if !(summary.min_interior > 0.0 && summary.max_interior < 1.0) {
            report.warnings.push("interior values touch the boundary range".into());
        }
        files.insert("field.csv".to_string(), field_csv(&h));
        report.chi = Some(label);
        report.field = Some(summary);
        field = Some((h, chi));
    }

    let search = if matches!(command, Command::Necks | Command::Gap | Command::Run) {
        Some(ctx.timed("neck_search", |c| c.neck_search())?)
    } else {
        None
    };

    if matches!(command, Command::Necks | Command::Run) {
        let (h, chi) = field.as_ref().expect("field solved");
        let search = search.as_ref().expect("search run");
        let outcome = ctx.timed("necks", |c| c.necks(search, h, chi))?;
        let json = outcome.report.to_json(&t);
        files.insert("necks.json".to_string(), to_json(&json));
        let dot = match &outcome.dual {
            Some((g, _)) => dual_graph_dot(&t, g),
            None => "graph dual {\n}\n".to_string(),
        };
        files.insert("dual.dot".to_string(), dot);
        report.necks = Some(json);
        report.certificates = Some(certificate_summaries(&t, &outcome.certificates));
        report.dual_graph = outcome.dual.map(|(_, s)| s);
        report.warnings.extend(outcome.warnings);
    }

    if matches!(command, Command::Gap | Command::Run) {
        let search = search.as_ref().expect("search run");
        let bracket = ctx.timed("gap", |c| c.gap(search))?;
        report.warnings.extend(bracket.warnings.iter().cloned());
        report.gap = Some(bracket);
    }

    if matches!(command, Command::Tree | Command::Run) {
        let (h, _) = field.as_ref().expect("field solved");
        let analysis = ctx.timed("walls", |c| c.walls(h))?;
        let summary = analysis.summary();
        if summary.violations > 0 {
            report.warnings.push(format!("{} trichotomy violations in the sample", summary.violations));
        }
        if summary.inversions > 0 {
            report.warnings.push(format!("{} inversions observed", summary.inversions));
        }
        if !summary.precisely_invariant {
            report.warnings.push("the h-wall is not precisely invariant under the sample".into());
        }
        files.insert("tree.dot".to_string(), wall_tree_dot(&analysis.tree));
        files.insert("action.json".to_string(), to_json(&wall_tree_json(&analysis.tree, &analysis.action)));
        report.walls = Some(summary);
    }

    if command == Command::Run {
        report.phi = ctx.timed("phi", |c| c.phi())?;
    }

    files.insert("report.json".to_string(), to_json(&report));
    let timings = ctx.timings().to_vec();
    Ok(Outputs { files, report, timings })
}
