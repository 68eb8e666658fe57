use std::sync::Arc;

use super::LinearProgram;
use crate::assemblage::Assemblage;
use crate::error::{Error, Result};
use crate::gmodel::{ExtremeGModel, HiddenGrid};
use crate::qubit::Outcome;

/// Minimum-mass g-model search as a linear program.
///
/// Variables: node masses `q_j` (center last), then joint masses
/// `w_{A,a,j} = q_j p(a|A, xi_j)` at `N + (2k + o) N + j`. Rows, each scaled to unit
/// Euclidean norm:
/// - normalization `w_{A,+,j} + w_{A,-,j} - q_j = 0` for every measurement and node;
/// - moments `sum_j w_{A,a,j} xi_j = s_A^a`, three per measurement and outcome;
/// - probability `sum_j w_{A,+,j} - p(+|A) sum_j q_j = 0`, one per measurement (the `-`
///   row follows from the others).
#[derive(Clone, Debug)]
pub struct SteeringLP {
    lp: LinearProgram,
    row_scale: Vec<f64>,
    grid: Arc<HiddenGrid>,
    target: Assemblage,
}

/// Builds the steering LP for `target` over the hidden-state grid.
pub fn build_steering_lp(target: &Assemblage, grid: Arc<HiddenGrid>) -> Result<SteeringLP> {
    if target.is_empty() {
        return Err(Error::EmptyMeasurementSet);
    }
    let nm = target.len();
    let n = grid.node_count();
    let cols = n + 2 * nm * n;
    let rows = nm * n + 7 * nm;
    let w = |k: usize, o: usize, j: usize| n + (2 * k + o) * n + j;
    let moment_row = |k: usize, o: usize, c: usize| nm * n + (2 * k + o) * 3 + c;
    let prob_row = |k: usize| nm * n + 6 * nm + k;

    let mut entries = Vec::with_capacity(nm * n * 9);
    let mut rhs = vec![0.0; rows];
    for k in 0..nm {
        for j in 0..n {
            let r = k * n + j;
            entries.push((r, j, -1.0));
            entries.push((r, w(k, 0, j), 1.0));
            entries.push((r, w(k, 1, j), 1.0));
        }
        for o in 0..2 {
            let e = target.entry(k, Outcome::from_index(o));
            for c in 0..3 {
                let r = moment_row(k, o, c);
                rhs[r] = e.sv[c];
                for j in 0..grid.surface_len() {
                    let v = grid.node(j)[c];
                    if v != 0.0 {
                        entries.push((r, w(k, o, j), v));
                    }
                }
            }
        }
        let p = target.entry(k, Outcome::Plus).p;
        let r = prob_row(k);
        for j in 0..n {
            entries.push((r, w(k, 0, j), 1.0));
            if p != 0.0 {
                entries.push((r, j, -p));
            }
        }
    }

    let mut norm2 = vec![0.0; rows];
    for &(i, _, v) in &entries {
        norm2[i] += v * v;
    }
    let row_scale: Vec<f64> = norm2
        .iter()
        .map(|&s| if s > 0.0 { 1.0 / s.sqrt() } else { 1.0 })
        .collect();
    for e in &mut entries {
        e.2 *= row_scale[e.0];
    }
    for (b, d) in rhs.iter_mut().zip(&row_scale) {
        *b *= d;
    }
    let mut cost = vec![0.0; cols];
    cost[..n].fill(1.0);
    Ok(SteeringLP {
        lp: LinearProgram::new(rows, cols, cost, rhs, entries)?,
        row_scale,
        grid,
        target: target.clone(),
    })
}

impl SteeringLP {
    /// The row-scaled program handed to solvers.
    pub fn program(&self) -> &LinearProgram {
        &self.lp
    }

    pub fn grid(&self) -> &Arc<HiddenGrid> {
        &self.grid
    }

    pub fn target(&self) -> &Assemblage {
        &self.target
    }

    pub fn node_count(&self) -> usize {
        self.grid.node_count()
    }

    pub fn variable_count(&self) -> usize {
        self.lp.cols
    }

    pub fn row_count(&self) -> usize {
        self.lp.rows
    }

    pub fn normalization_rows(&self) -> std::ops::Range<usize> {
        0..self.target.len() * self.node_count()
    }

    pub fn moment_rows(&self) -> std::ops::Range<usize> {
        let start = self.target.len() * self.node_count();
        start..start + 6 * self.target.len()
    }

    pub fn probability_rows(&self) -> std::ops::Range<usize> {
        let start = self.moment_rows().end;
        start..start + self.target.len()
    }

    pub fn q_index(&self, j: usize) -> usize {
        j
    }

    pub fn w_index(&self, k: usize, outcome: Outcome, j: usize) -> usize {
        let n = self.node_count();
        n + (2 * k + outcome.index()) * n + j
    }

    /// Multipliers of the unscaled rows from those of the scaled program.
    pub fn unscale_duals(&self, y: &[f64]) -> Vec<f64> {
        y.iter().zip(&self.row_scale).map(|(y, d)| y * d).collect()
    }

    /// Reads a primal vector back as a g-model: `p(a|A, j) = w_{A,a,j} / q_j`, or 1/2 on
    /// massless nodes.
    pub fn to_model(&self, x: &[f64]) -> Result<ExtremeGModel> {
        let n = self.node_count();
        let nm = self.target.len();
        let q: Vec<f64> = x[..n].iter().map(|v| v.max(0.0)).collect();
        let mut response = vec![0.5; 2 * nm * n];
        for k in 0..nm {
            for j in 0..n {
                let wp = x[self.w_index(k, Outcome::Plus, j)].max(0.0);
                let wm = x[self.w_index(k, Outcome::Minus, j)].max(0.0);
                if q[j] > 0.0 && wp + wm > 0.0 {
                    let r = wp / (wp + wm);
                    response[2 * k * n + j] = r;
                    response[(2 * k + 1) * n + j] = 1.0 - r;
                }
            }
        }
        ExtremeGModel::new(self.grid.clone(), self.target.measurements().clone(), q, response)
    }

    /// The primal vector of a g-model on the same grid and measurement set.
    pub fn from_model(&self, model: &ExtremeGModel) -> Result<Vec<f64>> {
        if !model.grid().same_as(&self.grid) {
            return Err(Error::MismatchedGrid);
        }
        if !model.measurements().same_as(self.target.measurements()) {
            return Err(Error::MismatchedMeasurements);
        }
        let n = self.node_count();
        let mut x = vec![0.0; self.lp.cols];
        x[..n].copy_from_slice(model.q());
        for k in 0..self.target.len() {
            for o in Outcome::ALL {
                for j in 0..n {
                    x[self.w_index(k, o, j)] = model.q()[j] * model.response(k, o, j);
                }
            }
        }
        Ok(x)
    }
}
