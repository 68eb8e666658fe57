use nalgebra::DMatrix;

use super::{LinearProgram, LpSolution, LpSolver, LpStatus};
use crate::error::{Error, Result};

/// Dense revised simplex with an explicit basis inverse.
///
/// Two phases with artificial variables; Dantzig pricing that falls back to Bland's
/// rule after a run of degenerate pivots. Memory is `O(rows^2)`, so this backend is
/// meant for small programs and for cross-checking the interior-point backend.
#[derive(Clone, Debug)]
pub struct DenseSimplex {
    pub max_iter: u32,
    pub max_rows: usize,
    /// Pivot and optimality tolerance.
    pub eps: f64,
    /// Pivots between fresh inversions of the basis.
    pub refactor_every: u32,
}

impl Default for DenseSimplex {
    fn default() -> Self {
        Self {
            max_iter: 200_000,
            max_rows: 4_000,
            eps: 1e-10,
            refactor_every: 64,
        }
    }
}

const DEGENERATE_RUN: u32 = 50;

struct Tableau<'a> {
    m: usize,
    /// columns of the row-flipped matrix followed by `m` artificial unit columns
    cols: Vec<Vec<(usize, f64)>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    binv: DMatrix<f64>,
    xb: Vec<f64>,
    n_real: usize,
    cfg: &'a DenseSimplex,
    iterations: u32,
}

enum Phase {
    Optimal,
    Unbounded,
    IterationLimit,
}

impl<'a> Tableau<'a> {
    fn column(&self, j: usize) -> &[(usize, f64)] {
        &self.cols[j]
    }

    fn ftran(&self, j: usize) -> Vec<f64> {
        let mut u = vec![0.0; self.m];
        for &(r, v) in self.column(j) {
            for (i, ui) in u.iter_mut().enumerate() {
                *ui += self.binv[(i, r)] * v;
            }
        }
        u
    }

    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.m];
        for (i, &bj) in self.basis.iter().enumerate() {
            let cb = cost[bj];
            if cb != 0.0 {
                for (k, yk) in y.iter_mut().enumerate() {
                    *yk += cb * self.binv[(i, k)];
                }
            }
        }
        y
    }

    fn reduced_cost(&self, cost: &[f64], y: &[f64], j: usize) -> f64 {
        cost[j] - self.column(j).iter().map(|&(r, v)| y[r] * v).sum::<f64>()
    }

    fn refactor(&mut self) -> Result<()> {
        let mut b = DMatrix::zeros(self.m, self.m);
        for (k, &j) in self.basis.iter().enumerate() {
            for &(r, v) in &self.cols[j] {
                b[(r, k)] = v;
            }
        }
        self.binv = b
            .try_inverse()
            .ok_or_else(|| Error::Solver("singular simplex basis".into()))?;
        for i in 0..self.m {
            self.xb[i] = (0..self.m).map(|k| self.binv[(i, k)] * self.rhs[k]).sum();
        }
        Ok(())
    }

    fn pivot(&mut self, row: usize, entering: usize, u: &[f64]) {
        let p = u[row];
        let theta = self.xb[row] / p;
        for i in 0..self.m {
            if i != row {
                self.xb[i] -= theta * u[i];
            }
        }
        self.xb[row] = theta;
        for k in 0..self.m {
            let pivot_row = self.binv[(row, k)] / p;
            self.binv[(row, k)] = pivot_row;
            if pivot_row != 0.0 {
                for i in 0..self.m {
                    if i != row && u[i] != 0.0 {
                        self.binv[(i, k)] -= u[i] * pivot_row;
                    }
                }
            }
        }
        self.is_basic[self.basis[row]] = false;
        self.is_basic[entering] = true;
        self.basis[row] = entering;
        self.iterations += 1;
    }

    /// Runs simplex iterations for `cost` over the allowed entering columns.
    fn optimize(&mut self, cost: &[f64], allowed: &dyn Fn(usize) -> bool) -> Result<Phase> {
        let eps = self.cfg.eps;
        let mut degenerate = 0u32;
        let mut since_refactor = 0u32;
        loop {
            if self.iterations >= self.cfg.max_iter {
                return Ok(Phase::IterationLimit);
            }
            if since_refactor >= self.cfg.refactor_every {
                self.refactor()?;
                since_refactor = 0;
            }
            let y = self.duals(cost);
            let bland = degenerate >= DEGENERATE_RUN;
            let mut entering = None;
            let mut best = -eps;
            for j in 0..self.cols.len() {
                if !allowed(j) || self.is_basic[j] {
                    continue;
                }
                let d = self.reduced_cost(cost, &y, j);
                if d < best {
                    entering = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(q) = entering else {
                return Ok(Phase::Optimal);
            };
            let u = self.ftran(q);
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                if u[i] > eps {
                    let ratio = self.xb[i].max(0.0) / u[i];
                    let better = match leave {
                        None => true,
                        Some((l, r)) => {
                            ratio < r - 1e-14 || (ratio <= r + 1e-14 && self.basis[i] < self.basis[l])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((row, ratio)) = leave else {
                return Ok(Phase::Unbounded);
            };
            degenerate = if ratio <= eps { degenerate + 1 } else { 0 };
            self.pivot(row, q, &u);
            since_refactor += 1;
        }
    }
}

impl LpSolver for DenseSimplex {
    fn name(&self) -> &'static str {
        "simplex"
    }

    fn solve(&self, lp: &LinearProgram) -> Result<LpSolution> {
        let (m, n) = (lp.rows, lp.cols);
        if m > self.max_rows {
            return Err(Error::Solver(format!(
                "{m} rows exceed the dense simplex limit of {}",
                self.max_rows
            )));
        }
        let flip: Vec<f64> = lp.rhs.iter().map(|&b| if b < 0.0 { -1.0 } else { 1.0 }).collect();
        let mut cols = vec![Vec::new(); n + m];
        for (i, j, v) in lp.column_major() {
            cols[j].push((i, v * flip[i]));
        }
        for i in 0..m {
            cols[n + i].push((i, 1.0));
        }
        let rhs: Vec<f64> = lp.rhs.iter().zip(&flip).map(|(b, f)| b * f).collect();
        let mut t = Tableau {
            m,
            cols,
            xb: rhs.clone(),
            rhs,
            basis: (n..n + m).collect(),
            is_basic: (0..n + m).map(|j| j >= n).collect(),
            binv: DMatrix::identity(m, m),
            n_real: n,
            cfg: self,
            iterations: 0,
        };

        // phase 1: minimize the sum of artificials
        let mut phase1 = vec![0.0; n + m];
        phase1[n..].fill(1.0);
        match t.optimize(&phase1, &|_| true)? {
            Phase::IterationLimit => return Ok(LpSolution::failed(lp, LpStatus::ToleranceFailure, t.iterations)),
            Phase::Unbounded => return Err(Error::Solver("phase one cannot be unbounded".into())),
            Phase::Optimal => {}
        }
        t.refactor()?;
        let scale = t.rhs.iter().fold(1.0f64, |a, b| a.max(b.abs()));
        let infeasibility: f64 = (0..m).filter(|&i| t.basis[i] >= n).map(|i| t.xb[i]).sum();
        if infeasibility > 1e-9 * scale {
            return Ok(LpSolution::failed(lp, LpStatus::Infeasible, t.iterations));
        }
        // drive zero-level artificials out of the basis where possible
        for row in 0..m {
            if t.basis[row] < n {
                continue;
            }
            let mut best: Option<(usize, f64)> = None;
            for j in 0..n {
                if t.is_basic[j] {
                    continue;
                }
                let a: f64 = t.cols[j].iter().map(|&(r, v)| t.binv[(row, r)] * v).sum();
                if a.abs() > best.map_or(1e-7, |b| b.1) {
                    best = Some((j, a.abs()));
                }
            }
            if let Some((j, _)) = best {
                let u = t.ftran(j);
                t.pivot(row, j, &u);
            }
        }
        t.refactor()?;

        let mut cost = lp.cost.clone();
        cost.resize(n + m, 0.0);
        let n_real = t.n_real;
        let status = t.optimize(&cost, &|j| j < n_real)?;
        t.refactor()?;
        match status {
            Phase::IterationLimit => Ok(LpSolution::failed(lp, LpStatus::ToleranceFailure, t.iterations)),
            Phase::Unbounded => Ok(LpSolution::failed(lp, LpStatus::Unbounded, t.iterations)),
            Phase::Optimal => {
                let mut x = vec![0.0; n];
                for (i, &j) in t.basis.iter().enumerate() {
                    if j < n {
                        x[j] = t.xb[i].max(0.0);
                    }
                }
                let y: Vec<f64> = t.duals(&cost).iter().zip(&flip).map(|(y, f)| y * f).collect();
                Ok(LpSolution::certified(lp, x, y, t.iterations))
            }
        }
    }
}
