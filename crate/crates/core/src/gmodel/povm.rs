//! Lifting projective response functions to a trine POVM.
//!
//! Each element `E_i = c_i P_i` of a fine-grained POVM reuses the response of the
//! singlet hemisphere model for the projector `P_i`, scaled by `c_i`. Such a lift is a
//! valid model only if the scaled responses sum to one at every hidden state.

use serde::Serialize;

use crate::qubit::Vec3;

#[derive(Clone, Debug, Serialize)]
pub struct TrineReport {
    /// Bloch vectors of the three projectors `P_i`.
    pub projectors: [[f64; 3]; 3],
    /// POVM weights `c_i`.
    pub weights: [f64; 3],
    /// `sum_i c_i p(i|P_i, v)` at `v = z`, `0` and `-z`.
    pub sum_at_z: f64,
    pub sum_at_center: f64,
    pub sum_at_minus_z: f64,
    /// Same sums with a uniform `1/3` weight instead of `c_i`.
    pub uniform_sum_at_z: f64,
    pub uniform_sum_at_minus_z: f64,
    /// `sum_at_z - 1`.
    pub deviation_at_z: f64,
    /// True when some evaluated sum differs from one.
    pub violates_normalization: bool,
}

/// Hemisphere response of the singlet model: 1 when the hidden direction `v` has a
/// nonnegative overlap with Bob's conditioned Bloch vector, 1/2 at the center.
fn singlet_response(projector_bloch: &Vec3, v: &Vec3) -> f64 {
    if v.norm() == 0.0 {
        return 0.5;
    }
    // singlet: Bob's conditioned Bloch vector is opposite to Alice's projector
    let bob = -projector_bloch;
    if v.dot(&bob) >= 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Trine POVM `E_1 = 2/3 |0><0|`, `E_2 = 2/3 |alpha><alpha|`, `E_3 = 2/3 |beta><beta|`
/// with `|alpha>, |beta> = (|0> +- sqrt(3) |1>) / 2`.
pub fn trine_povm_counterexample() -> TrineReport {
    let h = 3f64.sqrt() / 2.0;
    // <sigma> for |0>, |alpha>, |beta>
    let bloch = [Vec3::z(), Vec3::new(h, 0.0, -0.5), Vec3::new(-h, 0.0, -0.5)];
    let c = [2.0 / 3.0; 3];
    let sum = |v: Vec3, w: &[f64; 3]| -> f64 {
        bloch
            .iter()
            .zip(w)
            .map(|(b, ci)| ci * singlet_response(b, &v))
            .sum()
    };
    let uniform = [1.0 / 3.0; 3];
    let at_z = sum(Vec3::z(), &c);
    let at_center = sum(Vec3::zeros(), &c);
    let at_minus_z = sum(-Vec3::z(), &c);
    TrineReport {
        projectors: bloch.map(|b| [b.x, b.y, b.z]),
        weights: c,
        sum_at_z: at_z,
        sum_at_center: at_center,
        sum_at_minus_z: at_minus_z,
        uniform_sum_at_z: sum(Vec3::z(), &uniform),
        uniform_sum_at_minus_z: sum(-Vec3::z(), &uniform),
        deviation_at_z: at_z - 1.0,
        violates_normalization: [at_z, at_center, at_minus_z]
            .iter()
            .any(|s| (s - 1.0).abs() > 1e-12),
    }
}
