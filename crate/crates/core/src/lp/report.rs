use std::sync::Arc;

use serde::Serialize;

use super::{build_steering_lp, witness_from_dual, LpSolver, LpStatus, Residuals, SolverRegistry, Witness};
use crate::assemblage::Assemblage;
use crate::error::Result;
use crate::gmodel::{complete_to_lhs, ExtremeGModel, GModelFile, HiddenGrid, LhsModel};

/// Optimal masses above `1 + STEERABLE_MARGIN` are reported steerable.
pub const STEERABLE_MARGIN: f64 = 1e-6;
/// Optimal masses up to `1 + UNSTEERABLE_MARGIN` are candidates for an LHS model.
pub const UNSTEERABLE_MARGIN: f64 = 1e-9;
/// Residual allowed when validating the primal and the completed model.
pub const MODEL_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    UnsteerableForSet,
    SteerableForSet,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct GridInfo {
    /// Subdivision level, absent for custom grids.
    pub level: Option<u32>,
    /// Nodes including the center.
    pub nodes: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasurementInfo {
    pub label: String,
    pub count: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SteerabilityReport {
    /// Optimal total mass over the grid; an upper bound on the grid-free optimum for
    /// this measurement set.
    pub s_value: f64,
    pub verdict: Verdict,
    pub status: LpStatus,
    pub solver: String,
    pub grid: GridInfo,
    pub measurements: MeasurementInfo,
    pub residuals: Residuals,
    /// Largest residual of the primal model against the target.
    pub model_residual: Option<f64>,
    pub witness: Option<Witness>,
    pub note: Option<String>,
    #[serde(skip)]
    pub model: Option<ExtremeGModel>,
    #[serde(skip)]
    pub lhs_model: Option<LhsModel>,
}

impl SteerabilityReport {
    /// The completed LHS model in file form, when there is one.
    pub fn lhs_model_file(&self) -> Option<Result<GModelFile>> {
        self.lhs_model.as_ref().map(|m| GModelFile::from_model(m.model()))
    }
}

/// Minimum g-model mass for `target` over `grid` with the default solver.
pub fn min_s(target: &Assemblage, grid: Arc<HiddenGrid>) -> Result<SteerabilityReport> {
    let solver = SolverRegistry::default().create(SolverRegistry::DEFAULT)?;
    min_s_with(target, grid, solver.as_ref())
}

pub fn min_s_with(target: &Assemblage, grid: Arc<HiddenGrid>, solver: &dyn LpSolver) -> Result<SteerabilityReport> {
    let lp = build_steering_lp(target, grid.clone())?;
    let mut report = SteerabilityReport {
        s_value: f64::NAN,
        verdict: Verdict::Inconclusive,
        status: LpStatus::ToleranceFailure,
        solver: solver.name().to_string(),
        grid: GridInfo {
            level: grid.level(),
            nodes: grid.node_count(),
        },
        measurements: MeasurementInfo {
            label: target.measurements().label().to_string(),
            count: target.len(),
        },
        residuals: Residuals {
            primal: f64::INFINITY,
            dual: f64::INFINITY,
            complementarity: f64::INFINITY,
            gap: f64::INFINITY,
            primal_objective: f64::NAN,
            dual_objective: f64::NAN,
        },
        model_residual: None,
        witness: None,
        note: None,
        model: None,
        lhs_model: None,
    };
    let sol = match solver.solve(lp.program()) {
        Ok(sol) => sol,
        Err(e) => {
            report.note = Some(e.to_string());
            return Ok(report);
        }
    };
    report.status = sol.status;
    report.residuals = sol.residuals;
    if sol.status != LpStatus::Optimal {
        report.note = Some(format!("solver finished with status {:?}", sol.status));
        return Ok(report);
    }
    report.s_value = sol.objective;
    let model = lp.to_model(&sol.x)?;
    let check = model.check(target, MODEL_TOL)?;
    report.model_residual = Some(check.max_residual());

    if sol.objective <= 1.0 + UNSTEERABLE_MARGIN {
        match complete_to_lhs(&model, target, MODEL_TOL) {
            Ok(lhs) => {
                let c = lhs.model().check(target, MODEL_TOL)?;
                if c.passed && (lhs.model().s_quantity() - 1.0).abs() <= 1e-10 {
                    report.verdict = Verdict::UnsteerableForSet;
                    report.lhs_model = Some(lhs);
                } else {
                    report.note = Some(format!("completed model misses by {:.3e}", c.max_residual()));
                }
            }
            Err(e) => report.note = Some(format!("completion failed: {e}")),
        }
    } else if sol.objective > 1.0 + STEERABLE_MARGIN {
        let w = witness_from_dual(&sol, &lp)?;
        report.verdict = Verdict::SteerableForSet;
        report.witness = Some(w);
    } else {
        report.note = Some("optimal mass within the margin around 1".into());
    }
    report.model = Some(model);
    Ok(report)
}
