//! Discrete Dirichlet problems for end-functions and the quantities built
//! from their solutions.

mod decay;
mod energy;
mod lattice;
mod solver;
mod spectral;

pub use decay::{decay_profile, DecayProfile};
pub use energy::{edge_energy, energy, energy_by_region, energy_form, energy_on_edges, EnergyReport};
pub use lattice::{lattice_ops, pullback, LatticeEnergies, LatticeResult};
pub use solver::{solve_dirichlet, solve_with_boundary, Scheme, SolverConfig};
pub use spectral::{spectral_gap, DirichletGraph, SpectralReport};

use std::sync::Arc;

use serde::Serialize;

use crate::ends::EndFunction;
use crate::error::{Error, Result};
use crate::truncation::{Truncation, VertexId};

/// A real field on every vertex of a truncation, with solver metadata when it
/// came out of [`solve_dirichlet`].
#[derive(Debug, Clone)]
pub struct HarmonicField {
    truncation: Arc<Truncation>,
    values: Vec<f64>,
    boundary_spec: Option<EndFunction>,
    residual: f64,
    iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldSummary {
    pub energy: f64,
    pub residual: f64,
    pub iterations: usize,
    pub min_interior: f64,
    pub max_interior: f64,
}

impl HarmonicField {
    /// Wraps arbitrary values; the residual is measured, not assumed.
    pub fn from_values(truncation: Arc<Truncation>, values: Vec<f64>) -> Result<Self> {
        if values.len() != truncation.len() {
            return Err(Error::InvalidArgument(format!(
                "field has {} values for {} vertices",
                values.len(),
                truncation.len()
            )));
        }
        let mut f = HarmonicField { truncation, values, boundary_spec: None, residual: 0.0, iterations: 0 };
        f.residual = f.mean_value_defect();
        Ok(f)
    }

    pub fn constant(truncation: Arc<Truncation>, c: f64) -> Self {
        let n = truncation.len();
        HarmonicField { truncation, values: vec![c; n], boundary_spec: None, residual: 0.0, iterations: 0 }
    }

    pub(crate) fn solved(
        truncation: Arc<Truncation>,
        values: Vec<f64>,
        boundary_spec: Option<EndFunction>,
        residual: f64,
        iterations: usize,
    ) -> Self {
        HarmonicField { truncation, values, boundary_spec, residual, iterations }
    }

    pub fn truncation(&self) -> &Arc<Truncation> {
        &self.truncation
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn value(&self, v: VertexId) -> f64 {
        self.values[v.index()]
    }

    pub fn boundary_spec(&self) -> Option<&EndFunction> {
        self.boundary_spec.as_ref()
    }

    /// Max mean-value defect over interior vertices reported by the solver.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Recomputes `max |h(v) - mean of neighbors|` over the interior.
    pub fn mean_value_defect(&self) -> f64 {
        let t = &self.truncation;
        t.interior_vertices()
            .map(|v| {
                let (s, k) = t.neighbors(v).fold((0.0, 0usize), |(s, k), u| (s + self.value(u), k + 1));
                (self.value(v) - s / k as f64).abs()
            })
            .fold(0.0, f64::max)
    }

    /// (min, max) over interior vertices.
    pub fn interior_range(&self) -> (f64, f64) {
        self.truncation
            .interior_vertices()
            .map(|v| self.value(v))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
    }

    pub fn same_truncation(&self, other: &HarmonicField) -> bool {
        Arc::ptr_eq(&self.truncation, &other.truncation)
    }

    /// Pointwise `self - other`.
    pub fn sub(&self, other: &HarmonicField) -> Result<HarmonicField> {
        if !self.same_truncation(other) {
            return Err(Error::MismatchedTruncation);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        HarmonicField::from_values(self.truncation.clone(), values)
    }

    /// `1 - h`.
    pub fn complement(&self) -> HarmonicField {
        HarmonicField {
            truncation: self.truncation.clone(),
            values: self.values.iter().map(|x| 1.0 - x).collect(),
            boundary_spec: self.boundary_spec.as_ref().map(|chi| EndFunction {
                base_radius: chi.base_radius,
                values: chi.values.iter().map(|x| 1 - x).collect(),
            }),
            residual: self.residual,
            iterations: self.iterations,
        }
    }

    pub fn to_partial(&self) -> PartialField {
        PartialField { truncation: self.truncation.clone(), values: self.values.iter().map(|&x| Some(x)).collect() }
    }

    pub fn summary(&self) -> FieldSummary {
        let (min_interior, max_interior) = self.interior_range();
        FieldSummary {
            energy: energy(self).total,
            residual: self.residual,
            iterations: self.iterations,
            min_interior,
            max_interior,
        }
    }
}

/// A field defined on part of a truncation.
#[derive(Debug, Clone)]
pub struct PartialField {
    truncation: Arc<Truncation>,
    values: Vec<Option<f64>>,
}

impl PartialEq for PartialField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.truncation, &other.truncation) && self.values == other.values
    }
}

impl PartialField {
    pub fn new(truncation: Arc<Truncation>, values: Vec<Option<f64>>) -> Result<Self> {
        if values.len() != truncation.len() {
            return Err(Error::InvalidArgument("partial field length mismatch".into()));
        }
        Ok(PartialField { truncation, values })
    }

    pub fn truncation(&self) -> &Arc<Truncation> {
        &self.truncation
    }

    #[inline]
    pub fn get(&self, v: VertexId) -> Option<f64> {
        self.values[v.index()]
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn domain(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.truncation.vertices().filter(|v| self.values[v.index()].is_some())
    }

    pub fn domain_len(&self) -> usize {
        self.values.iter().filter(|x| x.is_some()).count()
    }

    /// Sum of squared differences over edges with both endpoints defined.
    pub fn energy(&self) -> f64 {
        let mut total = 0.0;
        for e in self.truncation.edges() {
            if let (Some(a), Some(b)) = (self.get(e.0), self.get(e.1)) {
                total += (a - b) * (a - b);
            }
        }
        total
    }

    /// Restriction to the vertices accepted by `keep`.
    pub fn restrict(&self, keep: impl Fn(VertexId) -> bool) -> PartialField {
        let values = self.truncation.vertices().map(|v| if keep(v) { self.values[v.index()] } else { None }).collect();
        PartialField { truncation: self.truncation.clone(), values }
    }
}

/// Fixed-shape chunked sum, so the result does not depend on thread count.
pub(crate) fn stable_sum(xs: &[f64]) -> f64 {
    use rayon::prelude::*;
    const CHUNK: usize = 1 << 14;
    let partial: Vec<f64> = xs.par_chunks(CHUNK).map(|c| c.iter().sum::<f64>()).collect();
    partial.iter().sum()
}
