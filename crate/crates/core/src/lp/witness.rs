use serde::Serialize;

use super::{LpSolution, LpStatus, SteeringLP};
use crate::assemblage::Assemblage;
use crate::error::{Error, Result};
use crate::gmodel::{ExtremeGModel, HiddenGrid, Reconstruction};
use crate::qubit::{Outcome, Vec3};

/// Linear functional on assemblages read off the optimal dual of the steering LP:
///
/// `F(p', s') = sum_{A,a} m_{A,a} . s'_{A,a} + sum_A t_A (p'(+|A) - p(+|A))`
///
/// where `p` are the probabilities of the target. `F(target)` equals the optimal mass,
/// while `F <= bound` for every mass-one model on the grid. A witness with
/// `F(target) > bound` certifies steering for the measurement set and grid.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    /// `m_{A,a}`, indexed `[measurement][outcome]`.
    pub moment: Vec<[[f64; 3]; 2]>,
    /// `t_A`.
    pub probability: Vec<f64>,
    /// `p(+|A)` of the target.
    pub reference_p: Vec<f64>,
    /// `F(target)`.
    pub value: f64,
    /// Largest value of `F` over mass-one models on the grid; 1 up to solver tolerance.
    pub bound: f64,
}

impl Witness {
    fn m(&self, k: usize, o: Outcome) -> Vec3 {
        let v = self.moment[k][o.index()];
        Vec3::new(v[0], v[1], v[2])
    }

    /// `F` at an assemblage over the same measurement set.
    pub fn evaluate(&self, a: &Assemblage) -> Result<f64> {
        if a.len() != self.moment.len() {
            return Err(Error::MismatchedMeasurements);
        }
        let mut f = 0.0;
        for k in 0..a.len() {
            for o in Outcome::ALL {
                f += self.m(k, o).dot(&a.entry(k, o).sv);
            }
            f += self.probability[k] * (a.entry(k, Outcome::Plus).p - self.reference_p[k]);
        }
        Ok(f)
    }

    /// `F` at the reconstruction of a model, with probabilities weighted by its mass:
    /// `sum m . s_hat + sum t (mass(+|A) - p(+|A) S)`. For mass-one models this is `F`
    /// at the reconstructed assemblage.
    pub fn evaluate_reconstruction(&self, r: &Reconstruction) -> Result<f64> {
        if r.entries.len() != self.moment.len() {
            return Err(Error::MismatchedMeasurements);
        }
        let mut f = 0.0;
        for (k, pair) in r.entries.iter().enumerate() {
            for o in Outcome::ALL {
                f += self.m(k, o).dot(&pair[o.index()].moment);
            }
            f += self.probability[k] * (pair[0].mass - self.reference_p[k] * r.s);
        }
        Ok(f)
    }

    pub fn evaluate_model(&self, model: &ExtremeGModel) -> Result<f64> {
        self.evaluate_reconstruction(&model.reconstruct())
    }

    /// Best response value of node `xi`: `sum_A max_a (m_{A,a}.xi + [a=+] t_A) - sum_A t_A p(+|A)`.
    fn node_value(&self, xi: &Vec3) -> f64 {
        (0..self.moment.len())
            .map(|k| {
                let plus = self.m(k, Outcome::Plus).dot(xi) + self.probability[k];
                let minus = self.m(k, Outcome::Minus).dot(xi);
                plus.max(minus) - self.probability[k] * self.reference_p[k]
            })
            .sum()
    }

    /// `max_j` of the node values over the grid, center included.
    pub fn grid_bound(&self, grid: &HiddenGrid) -> f64 {
        (0..grid.node_count())
            .map(|j| self.node_value(&grid.node(j)))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Assembles the witness from an optimal dual. Requires an optimum above one.
pub fn witness_from_dual(sol: &LpSolution, lp: &SteeringLP) -> Result<Witness> {
    if sol.status != LpStatus::Optimal {
        return Err(Error::Solver(format!("no optimal dual ({:?})", sol.status)));
    }
    if !(sol.objective > 1.0) {
        return Err(Error::NoWitness {
            objective: sol.objective,
        });
    }
    let y = lp.unscale_duals(&sol.y);
    let target = lp.target();
    let nm = target.len();
    let mrows = lp.moment_rows();
    let prows = lp.probability_rows();
    let moment = (0..nm)
        .map(|k| {
            [0, 1].map(|o| {
                let base = mrows.start + (2 * k + o) * 3;
                [y[base], y[base + 1], y[base + 2]]
            })
        })
        .collect();
    let mut w = Witness {
        moment,
        probability: (0..nm).map(|k| y[prows.start + k]).collect(),
        reference_p: (0..nm).map(|k| target.entry(k, Outcome::Plus).p).collect(),
        value: 0.0,
        bound: 0.0,
    };
    w.value = w.evaluate(target)?;
    w.bound = w.grid_bound(lp.grid());
    Ok(w)
}
