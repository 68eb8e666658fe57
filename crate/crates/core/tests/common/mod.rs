#![allow(dead_code)]

use std::sync::Arc;

use nalgebra::{Matrix2, Matrix3, Matrix4};
use qsteer::assemblage::MeasurementSet;
use qsteer::gmodel::{ExtremeGModel, HiddenGrid};
use qsteer::qubit::{kron, rotation_from_unitary, DensityMatrix, TwoQubitState, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Haar-random SU(2) element from a uniform unit quaternion.
pub fn random_unitary(rng: &mut ChaCha8Rng) -> Matrix2<C64> {
    let mut q = [0.0f64; 4];
    for v in &mut q {
        *v = StandardNormal.sample(rng);
    }
    let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    let [w, x, y, z] = q.map(|v| v / n);
    Matrix2::new(C64::new(w, z), C64::new(y, x), C64::new(-y, x), C64::new(w, -z))
}

pub fn random_rotation(rng: &mut ChaCha8Rng) -> Matrix3<f64> {
    rotation_from_unitary(&random_unitary(rng))
}

/// `(U_A (x) U_B) rho (U_A (x) U_B)^dag` computed on the density matrix.
pub fn conjugate(state: &TwoQubitState, ua: &Matrix2<C64>, ub: &Matrix2<C64>) -> TwoQubitState {
    let u: Matrix4<C64> = kron(ua, ub);
    let rho = u * state.density().matrix() * u.adjoint();
    TwoQubitState::from_density(&DensityMatrix::new(rho).unwrap())
}

/// Mass-one model with random surface masses (center included) and random responses.
pub fn random_mass_one_model(grid: &Arc<HiddenGrid>, set: &MeasurementSet, rng: &mut ChaCha8Rng) -> ExtremeGModel {
    let n = grid.node_count();
    let support = rng.gen_range(1..=n.min(12));
    let mut q = vec![0.0; n];
    for _ in 0..support {
        q[rng.gen_range(0..n)] += rng.gen::<f64>();
    }
    let total: f64 = q.iter().sum();
    if total == 0.0 {
        q[0] = 1.0;
    } else {
        q.iter_mut().for_each(|v| *v /= total);
    }
    let m = set.len();
    let mut response = vec![0.0; 2 * m * n];
    for k in 0..m {
        for j in 0..n {
            let r: f64 = if rng.gen_bool(0.5) { rng.gen_range(0..=1) as f64 } else { rng.gen() };
            response[2 * k * n + j] = r;
            response[(2 * k + 1) * n + j] = 1.0 - r;
        }
    }
    ExtremeGModel::new(grid.clone(), set.clone(), q, response).unwrap()
}

/// Random interior model: atoms uniform in the ball with random masses and responses.
pub fn random_interior_model(set: &MeasurementSet, rng: &mut ChaCha8Rng) -> qsteer::gmodel::InteriorGModel {
    let atoms = (0..rng.gen_range(1..=8))
        .map(|_| {
            let dir: [f64; 3] = std::array::from_fn(|_| StandardNormal.sample(rng));
            let dir = qsteer::qubit::Vec3::from(dir).normalize();
            let r = if rng.gen_bool(0.2) { 1.0 } else { rng.gen::<f64>().cbrt() };
            let mass = rng.gen::<f64>() * 0.5;
            let resp = (0..set.len()).map(|_| rng.gen()).collect();
            (dir * r, mass, resp)
        })
        .collect();
    qsteer::gmodel::interior_from_parts(set.clone(), atoms).unwrap()
}
