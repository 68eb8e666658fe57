//! Linear programming: the steering LP, interchangeable solvers, duals and witnesses.
//!
//! Every program is in standard form `min c.x  s.t.  A x = b, x >= 0`. Its dual is
//! `max b.y  s.t.  A^T y <= c`.

mod export;
mod ipm;
mod report;
mod simplex;
mod steering;
mod witness;

use std::collections::BTreeMap;

use serde::Serialize;

pub use export::export_lp;
pub use ipm::ClarabelSolver;
pub use report::{
    min_s, min_s_with, GridInfo, MeasurementInfo, SteerabilityReport, Verdict, MODEL_TOL, STEERABLE_MARGIN, UNSTEERABLE_MARGIN,
};
pub use simplex::DenseSimplex;
pub use steering::{build_steering_lp, SteeringLP};
pub use witness::{witness_from_dual, Witness};

use crate::error::{Error, Result};

/// Feasibility tolerance on (row-scaled) equality residuals.
pub const PRIMAL_TOL: f64 = 1e-8;
/// Relative duality gap tolerance.
pub const GAP_TOL: f64 = 1e-7;
/// Complementary slackness tolerance, `max_i x_i z_i`.
pub const COMPLEMENTARITY_TOL: f64 = 1e-7;
/// Dual feasibility tolerance, `max_i (A^T y - c)_i`.
pub const DUAL_TOL: f64 = 1e-8;

/// Sparse equality-form linear program. Entries are `(row, col, value)` with no duplicates.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    pub rows: usize,
    pub cols: usize,
    pub cost: Vec<f64>,
    pub rhs: Vec<f64>,
    pub entries: Vec<(usize, usize, f64)>,
}

impl LinearProgram {
    pub fn new(rows: usize, cols: usize, cost: Vec<f64>, rhs: Vec<f64>, entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        if cost.len() != cols || rhs.len() != rows {
            return Err(Error::Solver("cost or rhs length does not match the dimensions".into()));
        }
        if let Some(e) = entries.iter().find(|e| e.0 >= rows || e.1 >= cols || !e.2.is_finite()) {
            return Err(Error::Solver(format!("bad matrix entry {e:?}")));
        }
        Ok(Self {
            rows,
            cols,
            cost,
            rhs,
            entries,
        })
    }

    /// `A x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        for &(i, j, v) in &self.entries {
            out[i] += v * x[j];
        }
        out
    }

    /// `A^T y`.
    pub fn apply_transpose(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for &(i, j, v) in &self.entries {
            out[j] += v * y[i];
        }
        out
    }

    /// Entries sorted by column, then row.
    pub fn column_major(&self) -> Vec<(usize, usize, f64)> {
        let mut e = self.entries.clone();
        e.sort_by_key(|&(i, j, _)| (j, i));
        e
    }

    /// Measures a candidate primal/dual pair against the optimality conditions.
    pub fn residuals(&self, x: &[f64], y: &[f64]) -> Residuals {
        let ax = self.apply(x);
        let primal = ax
            .iter()
            .zip(&self.rhs)
            .map(|(a, b)| (a - b).abs())
            .chain(x.iter().map(|&v| (-v).max(0.0)))
            .fold(0.0, f64::max);
        let aty = self.apply_transpose(y);
        let reduced: Vec<f64> = self.cost.iter().zip(&aty).map(|(c, a)| c - a).collect();
        let dual = reduced.iter().map(|&z| (-z).max(0.0)).fold(0.0, f64::max);
        let complementarity = x
            .iter()
            .zip(&reduced)
            .map(|(&xi, &zi)| (xi.max(0.0) * zi.max(0.0)).abs())
            .fold(0.0, f64::max);
        let primal_obj = dot(&self.cost, x);
        let dual_obj = dot(&self.rhs, y);
        Residuals {
            primal,
            dual,
            complementarity,
            gap: (primal_obj - dual_obj).abs() / primal_obj.abs().max(1.0),
            primal_objective: primal_obj,
            dual_objective: dual_obj,
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Residuals {
    pub primal: f64,
    pub dual: f64,
    pub complementarity: f64,
    /// `|c.x - b.y| / max(1, |c.x|)`.
    pub gap: f64,
    pub primal_objective: f64,
    pub dual_objective: f64,
}

impl Residuals {
    pub fn within_tolerance(&self) -> bool {
        self.primal <= PRIMAL_TOL
            && self.dual <= DUAL_TOL
            && self.gap <= GAP_TOL
            && self.complementarity <= COMPLEMENTARITY_TOL
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// The solver stopped, or its answer misses the residual bounds.
    ToleranceFailure,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    pub x: Vec<f64>,
    /// Row multipliers `y` of the dual `max b.y s.t. A^T y <= c`.
    pub y: Vec<f64>,
    pub residuals: Residuals,
    pub iterations: u32,
}

impl LpSolution {
    /// Non-optimal solution carrying no vectors.
    pub(crate) fn failed(lp: &LinearProgram, status: LpStatus, iterations: u32) -> Self {
        Self {
            status,
            objective: f64::NAN,
            x: vec![0.0; lp.cols],
            y: vec![0.0; lp.rows],
            residuals: Residuals {
                primal: f64::INFINITY,
                dual: f64::INFINITY,
                complementarity: f64::INFINITY,
                gap: f64::INFINITY,
                primal_objective: f64::NAN,
                dual_objective: f64::NAN,
            },
            iterations,
        }
    }

    /// Checks the residuals of a claimed optimum and downgrades it when they miss.
    pub(crate) fn certified(lp: &LinearProgram, mut x: Vec<f64>, y: Vec<f64>, iterations: u32) -> Self {
        for v in &mut x {
            // tiny negative entries are interior-point round-off
            if *v < 0.0 && *v > -PRIMAL_TOL {
                *v = 0.0;
            }
        }
        let residuals = lp.residuals(&x, &y);
        let status = if residuals.within_tolerance() {
            LpStatus::Optimal
        } else {
            LpStatus::ToleranceFailure
        };
        Self {
            status,
            objective: residuals.primal_objective,
            x,
            y,
            residuals,
            iterations,
        }
    }
}

/// A linear programming backend.
pub trait LpSolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve(&self, lp: &LinearProgram) -> Result<LpSolution>;
}

type Factory = fn() -> Box<dyn LpSolver>;

/// Solvers registered by name.
pub struct SolverRegistry {
    factories: BTreeMap<&'static str, Factory>,
}

impl SolverRegistry {
    pub const DEFAULT: &'static str = "ipm";

    pub fn empty() -> Self {
        Self {
            factories: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, name: &'static str, factory: Factory) {
        self.factories.insert(name, factory);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.factories.keys().copied().collect()
    }

    /// A fresh solver instance; each concurrent solve should own one.
    pub fn create(&self, name: &str) -> Result<Box<dyn LpSolver>> {
        self.factories
            .get(name)
            .map(|f| f())
            .ok_or_else(|| Error::UnknownSolver(name.to_string()))
    }
}

impl Default for SolverRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register("ipm", || Box::new(ClarabelSolver::default()));
        r.register("simplex", || Box::new(DenseSimplex::default()));
        r
    }
}

/// Solves with the default registry entry named `name`.
pub fn solve_lp_with(lp: &LinearProgram, name: &str) -> Result<LpSolution> {
    SolverRegistry::default().create(name)?.solve(lp)
}

/// Solves with the default interior-point backend.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    solve_lp_with(lp, SolverRegistry::DEFAULT)
}
