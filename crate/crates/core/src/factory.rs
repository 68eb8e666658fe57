//! State families, the local-plus-correlation split and seeded random states.

use nalgebra::{Matrix3, Matrix4, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qubit::{
    assemble_g, check_probability, kron, pauli, DensityMatrix, TwoQubitState, Vec3, C64, POSITIVITY_TOL,
};

/// `p |psi-><psi-| + (1 - p) I/4`: `a = b = 0`, `T = -p I`.
pub fn werner(p: f64) -> Result<TwoQubitState> {
    check_probability("p", p)?;
    TwoQubitState::from_blocks(Vec3::zeros(), Vec3::zeros(), -Matrix3::identity() * p)
}

pub fn singlet() -> TwoQubitState {
    TwoQubitState::from_g_unchecked(assemble_g(&Vec3::zeros(), &Vec3::zeros(), &-Matrix3::identity()))
}

/// Eigenvalues of the Bell-diagonal state `diag(t1, t2, t3)`, labelled by the Bell state
/// carrying them.
pub fn bell_weights(t: [f64; 3]) -> [(&'static str, f64); 4] {
    let [t1, t2, t3] = t;
    [
        ("psi-", 0.25 * (1.0 - t1 - t2 - t3)),
        ("psi+", 0.25 * (1.0 + t1 + t2 - t3)),
        ("phi-", 0.25 * (1.0 - t1 + t2 + t3)),
        ("phi+", 0.25 * (1.0 + t1 - t2 + t3)),
    ]
}

/// Bell-diagonal state with `T = diag(t1, t2, t3)`.
pub fn t_state(t1: f64, t2: f64, t3: f64) -> Result<TwoQubitState> {
    for (name, v) in [("t1", t1), ("t2", t2), ("t3", t3)] {
        if !v.is_finite() {
            return Err(Error::InvalidParameter {
                name,
                value: v,
                reason: "must be finite",
            });
        }
    }
    for (bell, w) in bell_weights([t1, t2, t3]) {
        if w < -POSITIVITY_TOL {
            return Err(Error::InvalidParameter {
                name: match bell {
                    "psi-" => "psi- eigenvalue (1 - t1 - t2 - t3)/4",
                    "psi+" => "psi+ eigenvalue (1 + t1 + t2 - t3)/4",
                    "phi-" => "phi- eigenvalue (1 - t1 + t2 + t3)/4",
                    _ => "phi+ eigenvalue (1 + t1 - t2 + t3)/4",
                },
                value: w,
                reason: "must be nonnegative",
            });
        }
    }
    TwoQubitState::from_blocks(Vec3::zeros(), Vec3::zeros(), Matrix3::from_diagonal(&Vec3::new(t1, t2, t3)))
}

/// `p |psi-><psi-| + (1 - p) component`, mixed at the density-matrix level.
pub fn unsteerable_mixture(p: f64, component: &TwoQubitState) -> Result<TwoQubitState> {
    check_probability("p", p)?;
    let rho = singlet().density().mix(&component.density(), p)?;
    Ok(TwoQubitState::from_density(&rho))
}

/// `rho = c1 pi_a + c2 pi_b + c3 pi_T` with `pi_a = (I + a'.sigma (x) I)/4`,
/// `pi_b = (I + I (x) b'.sigma)/4` and `pi_T = (I + sum T'_ij sigma_i (x) sigma_j)/4`.
#[derive(Clone, Debug, Serialize)]
pub struct AbtDecomposition {
    pub c: [f64; 3],
    /// G matrices of `pi_a`, `pi_b`, `pi_T`.
    pub components: [Matrix4<f64>; 3],
    /// Smallest eigenvalue of each component; negative marks a formal, non-physical part.
    pub min_eigenvalues: [f64; 3],
}

impl AbtDecomposition {
    pub fn physical(&self) -> [bool; 3] {
        self.min_eigenvalues.map(|e| e >= -POSITIVITY_TOL)
    }

    pub fn recombined(&self) -> Matrix4<f64> {
        (0..3).map(|i| self.components[i] * self.c[i]).sum()
    }
}

/// Splits a state into local and correlation parts with `c1 = |a|`, `c2 = |b|` and the
/// remaining weight on `T`. Feasible iff `|a| + |b| + max|T_ij| <= 1`.
pub fn decompose_abt(state: &TwoQubitState) -> Result<AbtDecomposition> {
    let (a, b, t) = (state.a(), state.b(), state.t());
    let tmax = t.amax();
    let required = a.norm() + b.norm() + tmax;
    if required > 1.0 + 1e-12 {
        return Err(Error::DecompositionInfeasible { required });
    }
    let c = if required == 0.0 {
        [1.0 / 3.0; 3]
    } else {
        [a.norm(), b.norm(), (1.0 - a.norm() - b.norm()).max(0.0)]
    };
    let scaled = |v: f64, w: f64| if w > 0.0 { v / w } else { 0.0 };
    let z3 = Vec3::zeros();
    let components = [
        assemble_g(&a.map(|v| scaled(v, c[0])), &z3, &Matrix3::zeros()),
        assemble_g(&z3, &b.map(|v| scaled(v, c[1])), &Matrix3::zeros()),
        assemble_g(&z3, &z3, &t.map(|v| scaled(v, c[2]).clamp(-1.0, 1.0))),
    ];
    Ok(AbtDecomposition {
        c,
        min_eigenvalues: components.map(|g| min_eigenvalue(&g)),
        components,
    })
}

fn min_eigenvalue(g: &Matrix4<f64>) -> f64 {
    let mut rho = Matrix4::<C64>::zeros();
    for u in 0..4 {
        for v in 0..4 {
            if g[(u, v)] != 0.0 {
                rho += kron(&pauli(u), &pauli(v)) * C64::new(0.25 * g[(u, v)], 0.0);
            }
        }
    }
    SymmetricEigen::new(rho).eigenvalues.min()
}

/// Seeded random state: `rho = M M^dag / Tr`, `M` a 4 x k complex Gaussian matrix with
/// `k` in `1..=4` drawn from the same generator.
pub fn random_state(seed: u64) -> TwoQubitState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(1..=4);
    random_state_from(&mut rng, k)
}

/// As [`random_state`] with a fixed purification dimension; `k = 1` gives pure states.
pub fn random_state_with_rank(seed: u64, k: usize) -> Result<TwoQubitState> {
    if !(1..=4).contains(&k) {
        return Err(Error::InvalidParameter {
            name: "k",
            value: k as f64,
            reason: "must lie in 1..=4",
        });
    }
    Ok(random_state_from(&mut ChaCha8Rng::seed_from_u64(seed), k))
}

fn random_state_from(rng: &mut ChaCha8Rng, k: usize) -> TwoQubitState {
    let m = nalgebra::DMatrix::<C64>::from_fn(4, k, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let w = &m * m.adjoint();
    let tr = w.trace().re;
    let rho = Matrix4::from_fn(|i, j| w[(i, j)] / tr);
    let rho = DensityMatrix::new(rho).expect("Gram matrices are positive");
    TwoQubitState::from_density(&rho)
}
