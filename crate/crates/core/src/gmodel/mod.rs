//! Geometric hidden-state models ("g-models") over the probability Bloch ball.
//!
//! An extreme g-model places nonnegative mass `q_j` on unit-sphere nodes and on the
//! center, with response probabilities `p(a|A, j)`. It reproduces an assemblage when
//! `sum_j q_j p(a|A,j) = p(a|A) * S` and `sum_j q_j p(a|A,j) xi_j = s_A^a` for every
//! measurement and outcome, where `S = sum_j q_j`. `S <= 1` is equivalent to the
//! existence of a local hidden state model.

mod grid;
mod models;
mod povm;
mod serial;
mod transform;

use std::sync::Arc;

pub use grid::HiddenGrid;
pub use models::{circle_model, great_circle, werner_singlet_model};
pub use povm::{trine_povm_counterexample, TrineReport};
pub use serial::{GModelFile, MeasurementsFile, GMODEL_VERSION};
pub use transform::{
    complete_to_lhs, interior_from_parts, lhs_joint_probability, mix_gmodels, scale_gmodel, to_extreme, SnapMode, SnapReport,
};

use serde::Serialize;

use crate::assemblage::{Assemblage, MeasurementSet};
use crate::error::{Error, Result};
use crate::qubit::{Outcome, Vec3};

/// Tolerance on response normalization and range.
pub const RESPONSE_TOL: f64 = 1e-10;

/// Extreme g-model: masses on grid nodes (surface plus center) and a response table
/// indexed by `(measurement, outcome, node)`.
#[derive(Clone, Debug)]
pub struct ExtremeGModel {
    grid: Arc<HiddenGrid>,
    measurements: MeasurementSet,
    q: Vec<f64>,
    response: Vec<f64>,
}

impl ExtremeGModel {
    pub fn new(
        grid: Arc<HiddenGrid>,
        measurements: MeasurementSet,
        q: Vec<f64>,
        response: Vec<f64>,
    ) -> Result<Self> {
        let n = grid.node_count();
        if q.len() != n {
            return Err(Error::InvalidModel(format!("{} masses for {n} nodes", q.len())));
        }
        if response.len() != 2 * measurements.len() * n {
            return Err(Error::InvalidModel("response table has the wrong size".into()));
        }
        if let Some((j, &m)) = q.iter().enumerate().find(|(_, m)| !(**m >= 0.0) || !m.is_finite()) {
            return Err(Error::InvalidModel(format!("mass {m} at node {j}")));
        }
        let model = Self {
            grid,
            measurements,
            q,
            response,
        };
        for k in 0..model.measurements.len() {
            for j in 0..n {
                let (rp, rm) = (model.response(k, Outcome::Plus, j), model.response(k, Outcome::Minus, j));
                let in_range = |r: f64| (-RESPONSE_TOL..=1.0 + RESPONSE_TOL).contains(&r);
                if !in_range(rp) || !in_range(rm) || (rp + rm - 1.0).abs() > RESPONSE_TOL {
                    return Err(Error::InvalidModel(format!(
                        "responses ({rp}, {rm}) at measurement {k}, node {j}"
                    )));
                }
            }
        }
        Ok(model)
    }

    /// The model with no mass anywhere and uniform responses.
    pub fn zero(grid: Arc<HiddenGrid>, measurements: MeasurementSet) -> Self {
        let n = grid.node_count();
        let len = 2 * measurements.len() * n;
        Self {
            grid,
            measurements,
            q: vec![0.0; n],
            response: vec![0.5; len],
        }
    }

    /// All mass at the center with response `p(+|A)` given per measurement.
    pub fn center_point(
        grid: Arc<HiddenGrid>,
        measurements: MeasurementSet,
        mass: f64,
        plus_response: &[f64],
    ) -> Result<Self> {
        if plus_response.len() != measurements.len() {
            return Err(Error::MismatchedMeasurements);
        }
        let n = grid.node_count();
        let c = grid.center();
        let mut q = vec![0.0; n];
        q[c] = mass;
        let mut response = vec![0.5; 2 * measurements.len() * n];
        for (k, &r) in plus_response.iter().enumerate() {
            response[(2 * k) * n + c] = r;
            response[(2 * k + 1) * n + c] = 1.0 - r;
        }
        Self::new(grid, measurements, q, response)
    }

    pub(crate) fn from_parts_unchecked(
        grid: Arc<HiddenGrid>,
        measurements: MeasurementSet,
        q: Vec<f64>,
        response: Vec<f64>,
    ) -> Self {
        Self {
            grid,
            measurements,
            q,
            response,
        }
    }

    pub fn grid(&self) -> &Arc<HiddenGrid> {
        &self.grid
    }

    pub fn measurements(&self) -> &MeasurementSet {
        &self.measurements
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn response_table(&self) -> &[f64] {
        &self.response
    }

    #[inline]
    pub(crate) fn response_index(&self, k: usize, outcome: Outcome, j: usize) -> usize {
        (2 * k + outcome.index()) * self.grid.node_count() + j
    }

    pub fn response(&self, k: usize, outcome: Outcome, j: usize) -> f64 {
        self.response[self.response_index(k, outcome, j)]
    }

    pub fn center_mass(&self) -> f64 {
        self.q[self.grid.center()]
    }

    /// Total hidden-state mass `S = sum_j q_j`, center included.
    pub fn s_quantity(&self) -> f64 {
        self.q.iter().sum()
    }

    /// Mass-weighted response sums and moments for every `(measurement, outcome)`.
    pub fn reconstruct(&self) -> Reconstruction {
        let n = self.grid.node_count();
        let entries = (0..self.measurements.len())
            .map(|k| {
                Outcome::ALL.map(|o| {
                    let row = &self.response[(2 * k + o.index()) * n..(2 * k + o.index() + 1) * n];
                    let mut mass = 0.0;
                    let mut moment = Vec3::zeros();
                    for (j, (&q, &r)) in self.q.iter().zip(row).enumerate() {
                        let w = q * r;
                        if w != 0.0 {
                            mass += w;
                            moment += self.grid.node(j) * w;
                        }
                    }
                    ReconstructedEntry { mass, moment }
                })
            })
            .collect();
        Reconstruction {
            s: self.s_quantity(),
            entries,
        }
    }

    /// Residuals of both model conditions against `target`; passes when the largest is
    /// at most `tol`.
    pub fn check(&self, target: &Assemblage, tol: f64) -> Result<CheckReport> {
        if !self.measurements.same_as(target.measurements()) {
            return Err(Error::MismatchedMeasurements);
        }
        let rec = self.reconstruct();
        let mut prob = 0.0f64;
        let mut moment = 0.0f64;
        for (k, pair) in rec.entries.iter().enumerate() {
            for o in Outcome::ALL {
                let e = target.entry(k, o);
                let r = pair[o.index()];
                prob = prob.max((r.mass - e.p * rec.s).abs());
                moment = moment.max((r.moment - e.sv).norm());
            }
        }
        Ok(CheckReport {
            passed: prob.max(moment) <= tol,
            max_probability_residual: prob,
            max_moment_residual: moment,
        })
    }
}

/// Output of [`ExtremeGModel::reconstruct`].
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub s: f64,
    pub entries: Vec<[ReconstructedEntry; 2]>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReconstructedEntry {
    /// `sum_j q_j p(a|A, j)`.
    pub mass: f64,
    /// `sum_j q_j p(a|A, j) xi_j`, the reconstructed shrinked Bloch vector.
    pub moment: Vec3,
}

impl Reconstruction {
    /// Reconstructed `p(a|A) = mass / S`; undefined for a massless model.
    pub fn probability(&self, k: usize, outcome: Outcome) -> Result<f64> {
        if self.s == 0.0 {
            return Err(Error::DegenerateModel);
        }
        Ok(self.entries[k][outcome.index()].mass / self.s)
    }

    pub fn moment(&self, k: usize, outcome: Outcome) -> Vec3 {
        self.entries[k][outcome.index()].moment
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub passed: bool,
    pub max_probability_residual: f64,
    pub max_moment_residual: f64,
}

impl CheckReport {
    pub fn max_residual(&self) -> f64 {
        self.max_probability_residual.max(self.max_moment_residual)
    }
}

/// A point mass of a general (interior) g-model.
#[derive(Clone, Debug, PartialEq)]
pub struct InteriorAtom {
    pub eta: Vec3,
    pub mass: f64,
    /// `p(+|A, eta)` per measurement; `p(-|A, eta)` is the complement.
    pub plus_response: Vec<f64>,
}

/// g-model with point masses anywhere in the unit ball.
#[derive(Clone, Debug)]
pub struct InteriorGModel {
    measurements: MeasurementSet,
    atoms: Vec<InteriorAtom>,
}

impl InteriorGModel {
    pub fn new(measurements: MeasurementSet, atoms: Vec<InteriorAtom>) -> Result<Self> {
        for atom in &atoms {
            let norm = atom.eta.norm();
            if !(norm <= 1.0 + 1e-12) {
                return Err(Error::OutsideBall { norm });
            }
            if !(atom.mass > 0.0) {
                return Err(Error::InvalidModel(format!("atom mass {}", atom.mass)));
            }
            if atom.plus_response.len() != measurements.len()
                || atom.plus_response.iter().any(|r| !(0.0..=1.0).contains(r))
            {
                return Err(Error::InvalidModel("atom response out of range".into()));
            }
        }
        Ok(Self { measurements, atoms })
    }

    pub fn atoms(&self) -> &[InteriorAtom] {
        &self.atoms
    }

    pub fn measurements(&self) -> &MeasurementSet {
        &self.measurements
    }

    pub fn s_quantity(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    /// Moments `sum q p(a|A, eta) eta` per `(measurement, outcome)`.
    pub fn moments(&self) -> Vec<[Vec3; 2]> {
        (0..self.measurements.len())
            .map(|k| {
                let mut acc = [Vec3::zeros(); 2];
                for atom in &self.atoms {
                    let r = atom.plus_response[k];
                    acc[0] += atom.eta * (atom.mass * r);
                    acc[1] += atom.eta * (atom.mass * (1.0 - r));
                }
                acc
            })
            .collect()
    }
}

/// An extreme g-model with total mass 1, i.e. a local hidden state model whose hidden
/// states are the pure states on the grid plus the maximally mixed state.
#[derive(Clone, Debug)]
pub struct LhsModel(ExtremeGModel);

impl LhsModel {
    pub fn model(&self) -> &ExtremeGModel {
        &self.0
    }

    pub fn into_model(self) -> ExtremeGModel {
        self.0
    }
}
