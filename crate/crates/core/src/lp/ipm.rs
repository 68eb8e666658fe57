use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};

use super::{LinearProgram, LpSolution, LpSolver, LpStatus};
use crate::error::{Error, Result};

/// Interior-point backend (Clarabel).
///
/// Equalities go in a zero cone and `x >= 0` is written as `-x + s = 0, s >= 0`, so the
/// row multipliers of the dual are `y = -z_eq`.
#[derive(Clone, Debug)]
pub struct ClarabelSolver {
    pub tol: f64,
    pub max_iter: u32,
}

impl Default for ClarabelSolver {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 400,
        }
    }
}

impl LpSolver for ClarabelSolver {
    fn name(&self) -> &'static str {
        "ipm"
    }

    fn solve(&self, lp: &LinearProgram) -> Result<LpSolution> {
        let (m, n) = (lp.rows, lp.cols);
        let mut ri = Vec::with_capacity(lp.entries.len() + n);
        let mut ci = Vec::with_capacity(lp.entries.len() + n);
        let mut vals = Vec::with_capacity(lp.entries.len() + n);
        for &(i, j, v) in &lp.entries {
            ri.push(i);
            ci.push(j);
            vals.push(v);
        }
        for j in 0..n {
            ri.push(m + j);
            ci.push(j);
            vals.push(-1.0);
        }
        let a = CscMatrix::new_from_triplets(m + n, n, ri, ci, vals);
        let p = CscMatrix::<f64>::zeros((n, n));
        let mut b = lp.rhs.clone();
        b.resize(m + n, 0.0);
        let mut cones = Vec::with_capacity(2);
        if m > 0 {
            cones.push(SupportedConeT::ZeroConeT(m));
        }
        cones.push(SupportedConeT::NonnegativeConeT(n));
        let settings = DefaultSettingsBuilder::default()
            .verbose(false)
            .max_iter(self.max_iter)
            .tol_gap_abs(self.tol)
            .tol_gap_rel(self.tol)
            .tol_feas(self.tol)
            .tol_ktratio(1e-8)
            .build()
            .map_err(|e| Error::Solver(e.to_string()))?;
        let mut solver = DefaultSolver::new(&p, &lp.cost, &a, &b, &cones, settings)
            .map_err(|e| Error::Solver(e.to_string()))?;
        solver.solve();
        let sol = &solver.solution;
        let iterations = sol.iterations;
        match sol.status {
            SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
                Ok(LpSolution::failed(lp, LpStatus::Infeasible, iterations))
            }
            SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => {
                Ok(LpSolution::failed(lp, LpStatus::Unbounded, iterations))
            }
            SolverStatus::Solved | SolverStatus::AlmostSolved => {
                let y: Vec<f64> = sol.z[..m].iter().map(|z| -z).collect();
                Ok(LpSolution::certified(lp, sol.x.clone(), y, iterations))
            }
            _ => {
                let y: Vec<f64> = sol.z[..m].iter().map(|z| -z).collect();
                let mut out = LpSolution::certified(lp, sol.x.clone(), y, iterations);
                out.status = LpStatus::ToleranceFailure;
                Ok(out)
            }
        }
    }
}
