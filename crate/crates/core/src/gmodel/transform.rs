use std::sync::Arc;

use super::{ExtremeGModel, HiddenGrid, InteriorGModel, LhsModel};
use crate::assemblage::{check_weights, Assemblage, MeasurementSet};
use crate::error::{Error, Result};
use crate::qubit::{Outcome, ProjectiveMeasurement, Vec3};

/// How off-grid surface directions are placed by [`to_extreme`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SnapMode {
    /// Move each direction to the nearest existing grid node.
    Nearest,
    /// Append off-grid directions to the grid as extra nodes.
    Exact,
}

/// Discretization error introduced by [`to_extreme`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SnapReport {
    /// Largest angle between an atom direction and its node.
    pub max_angle: f64,
    /// Largest change in any reconstructed moment caused by snapping.
    pub max_moment_shift: f64,
}

/// Splits every atom `(eta, q)` into surface mass `q|eta|` at `eta/|eta|` and center mass
/// `q(1 - |eta|)`. The total mass is preserved exactly; in [`SnapMode::Exact`] the
/// moments are preserved too.
pub fn to_extreme(
    model: &InteriorGModel,
    grid: &HiddenGrid,
    mode: SnapMode,
) -> Result<(ExtremeGModel, SnapReport)> {
    let grid = match mode {
        SnapMode::Nearest => grid.clone(),
        SnapMode::Exact => {
            let dirs: Vec<Vec3> = model
                .atoms()
                .iter()
                .filter(|a| a.eta.norm() > 0.0)
                .map(|a| a.eta)
                .collect();
            grid.with_extra_nodes(&dirs)?
        }
    };
    let nm = model.measurements().len();
    let n = grid.node_count();
    let c = grid.center();
    let mut q = vec![0.0; n];
    // accumulated q * p(+|A) per node
    let mut weighted = vec![0.0; nm * n];
    let mut report = SnapReport {
        max_angle: 0.0,
        max_moment_shift: 0.0,
    };
    let mut shift = vec![[Vec3::zeros(); 2]; nm];

    for atom in model.atoms() {
        let r = atom.eta.norm();
        let surface = atom.mass * r;
        let center = atom.mass - surface;
        if surface > 0.0 {
            let dir = atom.eta / r;
            let j = match mode {
                SnapMode::Nearest => grid.nearest(&dir),
                SnapMode::Exact => grid.find(&dir).expect("direction added to grid"),
            };
            let node = grid.node(j);
            report.max_angle = report.max_angle.max(node.angle(&dir));
            q[j] += surface;
            for k in 0..nm {
                let p = atom.plus_response[k];
                weighted[k * n + j] += surface * p;
                shift[k][0] += (node - dir) * (surface * p);
                shift[k][1] += (node - dir) * (surface * (1.0 - p));
            }
        }
        if center > 0.0 {
            q[c] += center;
            for k in 0..nm {
                weighted[k * n + c] += center * atom.plus_response[k];
            }
        }
    }
    report.max_moment_shift = shift
        .iter()
        .flat_map(|s| s.iter().map(|v| v.norm()))
        .fold(0.0, f64::max);

    let mut response = vec![0.5; 2 * nm * n];
    for k in 0..nm {
        for j in 0..n {
            if q[j] > 0.0 {
                let p = (weighted[k * n + j] / q[j]).clamp(0.0, 1.0);
                response[2 * k * n + j] = p;
                response[(2 * k + 1) * n + j] = 1.0 - p;
            }
        }
    }
    let extreme = ExtremeGModel::new(Arc::new(grid), model.measurements().clone(), q, response)?;
    Ok((extreme, report))
}

/// Adds center mass `1 - S` so that the model becomes a local hidden state model for
/// `target`. The center response is chosen so the probabilities are reproduced.
pub fn complete_to_lhs(model: &ExtremeGModel, target: &Assemblage, tol: f64) -> Result<LhsModel> {
    let s = model.s_quantity();
    if s > 1.0 + 1e-9 {
        return Err(Error::NotCompletable { s });
    }
    let report = model.check(target, tol)?;
    if !report.passed {
        return Err(Error::Inconsistent(format!(
            "model misses its target by {:.3e}",
            report.max_residual()
        )));
    }
    let n = model.grid().node_count();
    let c = model.grid().center();
    let mut q = model.q().to_vec();
    let center_mass = (1.0 - s + q[c]).max(0.0);
    q[c] = center_mass;
    // normalize total mass to one exactly
    let total: f64 = q.iter().sum();
    let excess = total - 1.0;
    q[c] = (q[c] - excess).max(0.0);
    let center_mass = q[c];

    let mut response = model.response_table().to_vec();
    for k in 0..model.measurements().len() {
        let mut plus = 0.5;
        if center_mass > 0.0 {
            let mut vals = [0.0; 2];
            for o in Outcome::ALL {
                let p = target.entry(k, o).p;
                let surface: f64 = (0..c)
                    .map(|j| model.q()[j] * model.response(k, o, j))
                    .sum();
                let rest = if p == 0.0 { 0.0 } else { p - surface };
                if rest < -tol {
                    return Err(Error::Inconsistent(format!("center remainder {rest:.3e} below -{tol:.1e}")));
                }
                vals[o.index()] = rest / center_mass;
            }
            let (vp, vm) = (vals[0].max(0.0), vals[1].max(0.0));
            plus = if vp + vm > 0.0 { (vp / (vp + vm)).clamp(0.0, 1.0) } else { 0.5 };
        }
        response[2 * k * n + c] = plus;
        response[(2 * k + 1) * n + c] = 1.0 - plus;
    }
    let model = ExtremeGModel::new(model.grid().clone(), model.measurements().clone(), q, response)?;
    Ok(LhsModel(model))
}

/// Mixture of g-models for the states with assemblages `targets`, mixed with weights `c`.
///
/// Surface masses and responses combine linearly; the center is then re-chosen with the
/// smallest total mass that keeps every center response nonnegative.
pub fn mix_gmodels(models: &[&ExtremeGModel], c: &[f64], targets: &[&Assemblage]) -> Result<ExtremeGModel> {
    if models.is_empty() || models.len() != c.len() || models.len() != targets.len() {
        return Err(Error::InvalidParameter {
            name: "weights",
            value: c.len() as f64,
            reason: "one weight and one target per model is required",
        });
    }
    check_weights(c, models.len())?;
    let grid = models[0].grid().clone();
    let set = models[0].measurements().clone();
    for (m, t) in models.iter().zip(targets) {
        if !m.grid().same_as(&grid) {
            return Err(Error::MismatchedGrid);
        }
        if !m.measurements().same_as(&set) || !t.measurements().same_as(&set) {
            return Err(Error::MismatchedMeasurements);
        }
    }
    let mixed_target = Assemblage::mix(targets, c)?;
    let n = grid.node_count();
    let center = grid.center();
    let nm = set.len();

    let mut q = vec![0.0; n];
    let mut w = vec![0.0; 2 * nm * n];
    for (m, &ci) in models.iter().zip(c) {
        for j in 0..n {
            q[j] += ci * m.q()[j];
        }
        for (idx, &r) in m.response_table().iter().enumerate() {
            w[idx] += ci * m.q()[idx % n] * r;
        }
    }
    let mut response = vec![0.5; 2 * nm * n];
    for (idx, r) in response.iter_mut().enumerate() {
        let j = idx % n;
        if j != center && q[j] > 0.0 {
            *r = w[idx] / q[j];
        }
    }
    // fix tiny normalization drift
    for k in 0..nm {
        for j in 0..n {
            let (ip, im) = (2 * k * n + j, (2 * k + 1) * n + j);
            let sum = response[ip] + response[im];
            response[ip] = (response[ip] / sum).clamp(0.0, 1.0);
            response[im] = 1.0 - response[ip];
        }
    }

    let surface_mass: f64 = q[..center].iter().sum();
    let surface_contribution = |q: &[f64], response: &[f64], k: usize, o: Outcome| -> f64 {
        let base = (2 * k + o.index()) * n;
        (0..center).map(|j| q[j] * response[base + j]).sum()
    };
    let mut s_rho = surface_mass;
    for k in 0..nm {
        for o in Outcome::ALL {
            let p = mixed_target.entry(k, o).p;
            if p > 0.0 {
                s_rho = s_rho.max(surface_contribution(&q, &response, k, o) / p);
            }
        }
    }
    let center_mass = (s_rho - surface_mass).max(0.0);
    q[center] = center_mass;
    for k in 0..nm {
        let mut plus = 0.5;
        if center_mass > 0.0 {
            let p = mixed_target.entry(k, Outcome::Plus).p;
            let v = if p == 0.0 {
                0.0
            } else {
                (p * s_rho - surface_contribution(&q, &response, k, Outcome::Plus)) / center_mass
            };
            plus = v.clamp(0.0, 1.0);
        }
        response[2 * k * n + center] = plus;
        response[(2 * k + 1) * n + center] = 1.0 - plus;
    }
    ExtremeGModel::new(grid, set, q, response)
}

/// Model for the state with correlation scale `c`, given one for scale `c0`: masses are
/// multiplied by `c / c0`.
pub fn scale_gmodel(model: &ExtremeGModel, c: f64, c0: f64) -> Result<ExtremeGModel> {
    if !(c0 > 0.0 && c0 <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "c0",
            value: c0,
            reason: "must lie in (0, 1]",
        });
    }
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::InvalidParameter {
            name: "c",
            value: c,
            reason: "must lie in [0, 1]",
        });
    }
    let f = c / c0;
    let q = model.q().iter().map(|&x| x * f).collect();
    Ok(ExtremeGModel::from_parts_unchecked(
        model.grid().clone(),
        model.measurements().clone(),
        q,
        model.response_table().to_vec(),
    ))
}

/// `sum_j q_j p(a|A, xi_j) (1 + b y.xi_j) / 2`: the joint probability predicted by a
/// local hidden state model when Bob measures along `y`.
pub fn lhs_joint_probability(
    model: &LhsModel,
    k: usize,
    a: Outcome,
    bob: &ProjectiveMeasurement,
    b: Outcome,
) -> f64 {
    let m = model.model();
    let y = bob.axis() * b.sign();
    (0..m.grid().node_count())
        .map(|j| m.q()[j] * m.response(k, a, j) * 0.5 * (1.0 + y.dot(&m.grid().node(j))))
        .sum()
}

/// Convenience for tests and callers: an interior model from raw parts.
pub fn interior_from_parts(
    set: MeasurementSet,
    atoms: Vec<(Vec3, f64, Vec<f64>)>,
) -> Result<InteriorGModel> {
    InteriorGModel::new(
        set,
        atoms
            .into_iter()
            .map(|(eta, mass, plus_response)| super::InteriorAtom {
                eta,
                mass,
                plus_response,
            })
            .collect(),
    )
}
