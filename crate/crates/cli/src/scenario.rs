//! Scenario files: one JSON document per run configuration.

use std::collections::BTreeMap;

use ends_splitter::ends::{EndClasses, EndFunction};
use ends_splitter::harmonic::SolverConfig;
use ends_splitter::walls::WallOptions;
use ends_splitter::{Error, Presentation, Result, Truncation};
use serde::{Deserialize, Serialize};

pub const SCHEMA: u32 = 1;

/// Above this many end classes the "all" keyword is refused.
pub const MAX_ALL_CLASSES: usize = 16;

/// An end-function, either a named rule or an explicit prefix map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChiSpec {
    /// `first_letter:<generator>`.
    Rule(String),
    /// Word prefix of the class representative to value; `*` is the default.
    Map(BTreeMap<String, u8>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChiList {
    /// The keyword `all`.
    Keyword(String),
    List(Vec<ChiSpec>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PartitionOptions {
    /// Single-linkage threshold; defaults to `4R`.
    pub max_diameter: Option<u32>,
    pub min_gap: u32,
}

impl Default for PartitionOptions {
    fn default() -> Self {
        PartitionOptions { max_diameter: None, min_gap: 1 }
    }
}

/// Uniform connectivity, computed on its own (smaller) truncation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiOptions {
    pub truncation_radius: u32,
    pub r_values: Vec<u32>,
    #[serde(default = "default_max_exhaustive")]
    pub max_exhaustive: usize,
}

fn default_max_exhaustive() -> usize {
    10_000
}

fn default_name() -> String {
    "scenario".to_string()
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: u32,
    #[serde(default = "default_name")]
    pub name: String,
    pub group: Presentation,
    pub truncation_radius: u32,
    /// Radius whose complement components are the end classes.
    #[serde(default = "one")]
    pub base_radius: u32,
    #[serde(rename = "neck_R")]
    pub neck_radius: u32,
    #[serde(default = "one")]
    pub net_delta: u32,
    /// Neck probe margin; defaults to `2R`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub neck_margin: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi: Option<ChiSpec>,
    /// End-functions for the gap bracket; defaults to `[chi]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi_list: Option<ChiList>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub wall: WallOptions,
    #[serde(default)]
    pub partition: PartitionOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<PhiOptions>,
    #[serde(default)]
    pub seed: u64,
}

impl Scenario {
    /// Parses and validates; parse errors carry the line and column.
    pub fn from_json(text: &str) -> std::result::Result<Self, ScenarioError> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| ScenarioError::Parse {
            message: e.to_string(),
            line: e.line(),
            column: e.column(),
        })?;
        s.validate().map_err(ScenarioError::Invalid)?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.schema != SCHEMA {
            return bad(format!("unsupported scenario schema {}, expected {SCHEMA}", self.schema));
        }
        self.group.validate()?;
        if self.neck_radius < 1 {
            return bad("neck_R must be >= 1".into());
        }
        if self.base_radius < self.neck_radius {
            return bad(format!("base_radius {} must be >= neck_R {}", self.base_radius, self.neck_radius));
        }
        if self.truncation_radius <= self.base_radius {
            return bad(format!(
                "truncation_radius {} must exceed base_radius {}",
                self.truncation_radius, self.base_radius
            ));
        }
        if self.net_delta < 1 {
            return bad("net_delta must be >= 1".into());
        }
        if self.name.is_empty() || self.name.contains(['/', '\\']) || self.name.starts_with('.') {
            return bad(format!("scenario name {:?} is not a plain directory name", self.name));
        }
        if self.chi.is_none() && self.chi_list.is_none() {
            return bad("scenario needs chi or chi_list".into());
        }
        if let Some(ChiList::Keyword(k)) = &self.chi_list {
            if k != "all" {
                return bad(format!("chi_list keyword must be \"all\", got {k:?}"));
            }
        }
        if let Some(phi) = &self.phi {
            if phi.r_values.is_empty() || phi.truncation_radius < 2 {
                return bad("phi needs r_values and truncation_radius >= 2".into());
            }
        }
        self.solver.validate()?;
        self.wall.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioError {
    Parse { message: String, line: usize, column: usize },
    Invalid(Error),
}

impl std::fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScenarioError::Parse { message, .. } => write!(f, "malformed scenario: {message}"),
            ScenarioError::Invalid(e) => write!(f, "{e}"),
        }
    }
}

/// Human-readable name of a `chi` entry.
pub fn chi_label(spec: &ChiSpec) -> String {
    match spec {
        ChiSpec::Rule(r) => r.clone(),
        ChiSpec::Map(m) => m.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(","),
    }
}

/// Resolves a `chi` entry to a total, nonconstant end-function.
pub fn resolve_chi(t: &Truncation, classes: &EndClasses, spec: &ChiSpec) -> Result<EndFunction> {
    let chi = match spec {
        ChiSpec::Rule(rule) => {
            let (name, arg) = rule.split_once(':').unwrap_or((rule.as_str(), ""));
            let mut chars = arg.chars();
            match (name, chars.next(), chars.next()) {
                ("first_letter", Some(c), None) => EndFunction::first_letter(t, classes, c)?,
                _ => return Err(Error::InvalidArgument(format!("unknown chi rule {rule:?}"))),
            }
        }
        ChiSpec::Map(map) => {
            let mut prefixes = BTreeMap::new();
            let mut default = None;
            for (k, &v) in map {
                if k == "*" {
                    default = Some(v);
                } else {
                    prefixes.insert(t.group().parse_word(k)?, v);
                }
            }
            EndFunction::from_prefixes(t, classes, &prefixes, default)?
        }
    };
    chi.require_nonconstant()?;
    Ok(chi)
}

/// Every nonconstant assignment on the classes, labelled by its bit string.
pub fn all_nonconstant(classes: &EndClasses) -> Result<Vec<(String, EndFunction)>> {
    let n = classes.len();
    if n > MAX_ALL_CLASSES {
        return Err(Error::InvalidArgument(format!(
            "\"all\" would expand to 2^{n} - 2 end-functions; the limit is 2^{MAX_ALL_CLASSES}"
        )));
    }
    let mut out = Vec::new();
    for mask in 1u32..(1u32 << n) - 1 {
        let values: Vec<u8> = (0..n).map(|i| ((mask >> i) & 1) as u8).collect();
        let label: String = values.iter().map(|v| char::from(b'0' + v)).collect();
        out.push((label, EndFunction::new(classes.base_radius, values)?));
    }
    Ok(out)
}

/// Resolves the list used by the gap bracket.
pub fn resolve_chi_list(s: &Scenario, t: &Truncation, classes: &EndClasses) -> Result<Vec<(String, EndFunction)>> {
    match (&s.chi_list, &s.chi) {
        (Some(ChiList::Keyword(_)), _) => all_nonconstant(classes),
        (Some(ChiList::List(specs)), _) => {
            specs.iter().map(|c| Ok((chi_label(c), resolve_chi(t, classes, c)?))).collect()
        }
        (None, Some(c)) => Ok(vec![(chi_label(c), resolve_chi(t, classes, c)?)]),
        (None, None) => Err(Error::InvalidArgument("scenario needs chi or chi_list".into())),
    }
}

/// The built-in scenarios shipped under `scenarios/`.
pub fn builtin_suite() -> Vec<Scenario> {
    [
        include_str!("../../../scenarios/f2-first-letter.json"),
        include_str!("../../../scenarios/f3-prefix.json"),
        include_str!("../../../scenarios/z2-z3-first-letter.json"),
        include_str!("../../../scenarios/z4-z-first-letter.json"),
    ]
    .iter()
    .map(|text| Scenario::from_json(text).expect("built-in scenario is valid"))
    .collect()
}

/// The exhaustive F₂ suite: every nonconstant end-function at base radius 1.
pub fn exhaustive_f2() -> Scenario {
    Scenario::from_json(include_str!("../../../scenarios/f2-all.json")).expect("built-in scenario is valid")
}
