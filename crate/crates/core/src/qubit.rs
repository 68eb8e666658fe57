//! Two-qubit states in the Pauli (G-matrix) representation.
//!
//! A state is stored as the real 4x4 matrix `G` with
//! `rho = 1/4 * sum_uv G[u][v] sigma_u (x) sigma_v`, Pauli order `(I, X, Y, Z)` and
//! `sigma_y = [[0, -i], [i, 0]]`. Row index is Alice's Pauli, column index is Bob's, so
//! `G = [[1, b^t], [a, T]]`.

use nalgebra::{Matrix2, Matrix3, Matrix4, SymmetricEigen, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = nalgebra::Complex<f64>;
pub type Vec3 = Vector3<f64>;

/// Eigenvalues below `-POSITIVITY_TOL` reject a state.
pub const POSITIVITY_TOL: f64 = 1e-10;
/// Hermiticity and trace tolerance for density-matrix input.
pub const DENSITY_TOL: f64 = 1e-12;
/// Unit-norm tolerance for measurement axes.
pub const AXIS_TOL: f64 = 1e-12;

const CLAMP_FLOOR: f64 = -1e-14;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Pauli matrix `sigma_i`, `i = 0..4` in the order `(I, X, Y, Z)`.
pub fn pauli(i: usize) -> Matrix2<C64> {
    let (o, l, j) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    match i {
        0 => Matrix2::new(l, o, o, l),
        1 => Matrix2::new(o, l, l, o),
        2 => Matrix2::new(o, -j, j, o),
        3 => Matrix2::new(l, o, o, -l),
        _ => panic!("Pauli index {i} out of range"),
    }
}

/// Kronecker product of two 2x2 complex matrices.
pub fn kron(a: &Matrix2<C64>, b: &Matrix2<C64>) -> Matrix4<C64> {
    Matrix4::from_fn(|r, col| a[(r / 2, col / 2)] * b[(r % 2, col % 2)])
}

/// Binary measurement outcome, labelled `+1` / `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const ALL: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        }
    }

    /// Position in `(measurement, outcome)` tables: `+` is 0, `-` is 1.
    pub fn index(self) -> usize {
        match self {
            Outcome::Plus => 0,
            Outcome::Minus => 1,
        }
    }

    pub fn from_index(i: usize) -> Self {
        if i == 0 {
            Outcome::Plus
        } else {
            Outcome::Minus
        }
    }
}

/// Projective qubit measurement along a Bloch axis, `A_(+/-) = (I +/- x.sigma) / 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectiveMeasurement {
    axis: Vec3,
}

impl ProjectiveMeasurement {
    pub fn new(axis: Vec3) -> Result<Self> {
        let norm = axis.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > AXIS_TOL {
            return Err(Error::NotUnitAxis { norm });
        }
        Ok(Self { axis })
    }

    /// Normalizes `v` first; fails only for the zero vector.
    pub fn along(v: Vec3) -> Result<Self> {
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotUnitAxis { norm });
        }
        Ok(Self { axis: v / norm })
    }

    pub fn axis(&self) -> Vec3 {
        self.axis
    }

    pub fn operator(&self, outcome: Outcome) -> Matrix2<C64> {
        let x = self.axis * outcome.sign();
        let mut op = pauli(0);
        for k in 0..3 {
            op += pauli(k + 1) * c(x[k], 0.0);
        }
        op * c(0.5, 0.0)
    }
}

/// A validated 4x4 density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(Matrix4<C64>);

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity. Eigenvalues in
    /// `[-POSITIVITY_TOL, 0)` are projected to zero and the trace renormalized.
    pub fn new(m: Matrix4<C64>) -> Result<Self> {
        let mut deviation = 0.0f64;
        for r in 0..4 {
            for col in 0..4 {
                deviation = deviation.max((m[(r, col)] - m[(col, r)].conj()).norm());
            }
        }
        if deviation > DENSITY_TOL || deviation.is_nan() {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = m.trace();
        if (trace.re - 1.0).abs() > DENSITY_TOL || trace.im.abs() > DENSITY_TOL {
            return Err(Error::BadTrace { trace: trace.re });
        }
        // symmetrize so the eigen solver sees an exactly Hermitian matrix
        let h = (m + m.adjoint()) * c(0.5, 0.0);
        Self::from_hermitian(h)
    }

    fn from_hermitian(h: Matrix4<C64>) -> Result<Self> {
        let eig = SymmetricEigen::new(h);
        let min = eig.eigenvalues.min();
        if min < -POSITIVITY_TOL {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        if min >= CLAMP_FLOOR {
            return Ok(Self(h));
        }
        let clamped = eig.eigenvalues.map(|e| e.max(0.0));
        let total: f64 = clamped.sum();
        let diag = Matrix4::from_diagonal(&clamped.map(|e| c(e / total, 0.0)));
        let v = eig.eigenvectors;
        Ok(Self(v * diag * v.adjoint()))
    }

    /// Projector onto a (not necessarily normalized) pure state.
    pub fn pure(psi: &Vector4<C64>) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(Error::InvalidParameter {
                name: "state vector norm",
                value: 0.0,
                reason: "must be nonzero",
            });
        }
        let v = psi / c(norm, 0.0);
        Self::new(v * v.adjoint())
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.0
    }

    pub fn eigenvalues(&self) -> Vector4<f64> {
        SymmetricEigen::new(self.0).eigenvalues
    }

    /// `p * self + (1 - p) * other`.
    pub fn mix(&self, other: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
        check_probability("mixing weight", p)?;
        DensityMatrix::new(self.0 * c(p, 0.0) + other.0 * c(1.0 - p, 0.0))
    }

    /// Partial transpose on Bob's qubit.
    pub fn partial_transpose_bob(&self) -> Matrix4<C64> {
        Matrix4::from_fn(|r, col| {
            let (i, j) = (r / 2, r % 2);
            let (k, l) = (col / 2, col % 2);
            self.0[(2 * i + l, 2 * k + j)]
        })
    }
}

pub(crate) fn check_probability(name: &'static str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidParameter {
            name,
            value: p,
            reason: "must lie in [0, 1]",
        });
    }
    Ok(())
}

/// Two-qubit state held as its G matrix, with cached `a`, `b` and `T` blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoQubitState {
    g: Matrix4<f64>,
    a: Vec3,
    b: Vec3,
    t: Matrix3<f64>,
}

impl TwoQubitState {
    pub fn maximally_mixed() -> Self {
        Self::from_g_unchecked(Matrix4::from_diagonal(&Vector4::new(1.0, 0.0, 0.0, 0.0)))
    }

    /// Validates `G[0][0] = 1`, positivity and Bloch-vector lengths.
    pub fn from_g(g: Matrix4<f64>) -> Result<Self> {
        if g[(0, 0)] != 1.0 {
            return Err(Error::BadNormalization { value: g[(0, 0)] });
        }
        if g.iter().any(|x| !x.is_finite()) {
            return Err(Error::Parse("G matrix has non-finite entries".into()));
        }
        let raw = Self::from_g_unchecked(g);
        let rho = DensityMatrix::from_hermitian(raw.density_matrix_raw())?;
        let state = Self::from_density(&rho);
        for (which, v) in [("Alice", state.a), ("Bob", state.b)] {
            if v.norm() > 1.0 + POSITIVITY_TOL {
                return Err(Error::BlochTooLong { which, norm: v.norm() });
            }
        }
        Ok(state)
    }

    pub fn from_blocks(a: Vec3, b: Vec3, t: Matrix3<f64>) -> Result<Self> {
        Self::from_g(assemble_g(&a, &b, &t))
    }

    pub(crate) fn from_g_unchecked(g: Matrix4<f64>) -> Self {
        let a = Vec3::new(g[(1, 0)], g[(2, 0)], g[(3, 0)]);
        let b = Vec3::new(g[(0, 1)], g[(0, 2)], g[(0, 3)]);
        let t = g.fixed_view::<3, 3>(1, 1).into_owned();
        Self { g, a, b, t }
    }

    /// `G_uv = Tr((sigma_u (x) sigma_v) rho)`.
    pub fn from_density(rho: &DensityMatrix) -> Self {
        let mut g = Matrix4::zeros();
        for u in 0..4 {
            for v in 0..4 {
                let op = kron(&pauli(u), &pauli(v));
                g[(u, v)] = (op * rho.matrix()).trace().re;
            }
        }
        g[(0, 0)] = 1.0;
        Self::from_g_unchecked(g)
    }

    fn density_matrix_raw(&self) -> Matrix4<C64> {
        let mut m = Matrix4::zeros();
        for u in 0..4 {
            for v in 0..4 {
                let coeff = self.g[(u, v)];
                if coeff != 0.0 {
                    m += kron(&pauli(u), &pauli(v)) * c(0.25 * coeff, 0.0);
                }
            }
        }
        m
    }

    /// `rho = 1/4 sum G_uv sigma_u (x) sigma_v`.
    pub fn density(&self) -> DensityMatrix {
        DensityMatrix(self.density_matrix_raw())
    }

    pub fn g(&self) -> &Matrix4<f64> {
        &self.g
    }

    /// Alice's Bloch vector.
    pub fn a(&self) -> Vec3 {
        self.a
    }

    /// Bob's Bloch vector.
    pub fn b(&self) -> Vec3 {
        self.b
    }

    /// Correlation block, `T_ij = <sigma_i (x) sigma_j>`.
    pub fn t(&self) -> Matrix3<f64> {
        self.t
    }

    /// Outcome probability and shrinked Bloch vector of Bob's conditioned state:
    /// `p = (1 + x.a) / 2`, `s = (b + T^t x) / 2` with `x = outcome * axis`.
    pub fn conditioned_state(&self, m: &ProjectiveMeasurement, outcome: Outcome) -> (f64, Vec3) {
        let x = m.axis() * outcome.sign();
        let p = 0.5 * (1.0 + x.dot(&self.a));
        let s = 0.5 * (self.b + self.t.transpose() * x);
        (p, s)
    }

    /// `Tr(A_a (x) B_b rho) = (1 + a x.a + b y.b + ab x^t T y) / 4`.
    pub fn joint_probability(
        &self,
        alice: &ProjectiveMeasurement,
        bob: &ProjectiveMeasurement,
        a: Outcome,
        b: Outcome,
    ) -> f64 {
        let x = alice.axis() * a.sign();
        let y = bob.axis() * b.sign();
        0.25 * (1.0 + x.dot(&self.a) + y.dot(&self.b) + x.dot(&(self.t * y)))
    }

    /// Peres-Horodecki test: true iff the partial transpose on Bob has an eigenvalue
    /// below `-POSITIVITY_TOL`.
    pub fn is_entangled_ppt(&self) -> bool {
        let pt = self.density().partial_transpose_bob();
        let h = (pt + pt.adjoint()) * c(0.5, 0.0);
        SymmetricEigen::new(h).eigenvalues.min() < -POSITIVITY_TOL
    }

    /// Local-unitary image given the SO(3) rotations induced on each side:
    /// `a -> Ra a`, `b -> Rb b`, `T -> Ra T Rb^t`.
    pub fn rotated(&self, ra: &Matrix3<f64>, rb: &Matrix3<f64>) -> Self {
        Self::from_g_unchecked(assemble_g(
            &(ra * self.a),
            &(rb * self.b),
            &(ra * self.t * rb.transpose()),
        ))
    }

    /// Depolarizing channel of strength `eta` on Bob: `b -> (1-eta) b`, `T -> (1-eta) T`.
    pub fn depolarize_bob(&self, eta: f64) -> Result<Self> {
        check_probability("depolarizing strength", eta)?;
        let keep = 1.0 - eta;
        Ok(Self::from_g_unchecked(assemble_g(
            &self.a,
            &(self.b * keep),
            &(self.t * keep),
        )))
    }
}

impl From<&DensityMatrix> for TwoQubitState {
    fn from(rho: &DensityMatrix) -> Self {
        Self::from_density(rho)
    }
}

pub(crate) fn assemble_g(a: &Vec3, b: &Vec3, t: &Matrix3<f64>) -> Matrix4<f64> {
    let mut g = Matrix4::zeros();
    g[(0, 0)] = 1.0;
    for i in 0..3 {
        g[(i + 1, 0)] = a[i];
        g[(0, i + 1)] = b[i];
        for j in 0..3 {
            g[(i + 1, j + 1)] = t[(i, j)];
        }
    }
    g
}

/// SO(3) rotation `R` with `U (x.sigma) U^dag = (R x).sigma`.
pub fn rotation_from_unitary(u: &Matrix2<C64>) -> Matrix3<f64> {
    Matrix3::from_fn(|k, i| 0.5 * (pauli(k + 1) * u * pauli(i + 1) * u.adjoint()).trace().re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ket(amps: [(f64, f64); 4]) -> Vector4<C64> {
        Vector4::new(
            c(amps[0].0, amps[0].1),
            c(amps[1].0, amps[1].1),
            c(amps[2].0, amps[2].1),
            c(amps[3].0, amps[3].1),
        )
    }

    fn singlet() -> DensityMatrix {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::pure(&ket([(0.0, 0.0), (r, 0.0), (-r, 0.0), (0.0, 0.0)])).unwrap()
    }

    #[test]
    fn maximally_mixed_g() {
        let rho = DensityMatrix::new(Matrix4::identity() * c(0.25, 0.0)).unwrap();
        let s = TwoQubitState::from_density(&rho);
        let mut expected = Matrix4::zeros();
        expected[(0, 0)] = 1.0;
        assert_abs_diff_eq!(*s.g(), expected, epsilon = 1e-15);
    }

    #[test]
    fn singlet_blocks() {
        let s = TwoQubitState::from_density(&singlet());
        assert_abs_diff_eq!(s.a().norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.b().norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.t(), -Matrix3::identity(), epsilon = 1e-12);
    }

    #[test]
    fn phi_plus_has_t_diag_1_m1_1() {
        // with sigma_y = [[0,-i],[i,0]], <YY> = -1 on (|00> + |11>)/sqrt2
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let phi_plus = DensityMatrix::pure(&ket([(r, 0.0), (0.0, 0.0), (0.0, 0.0), (r, 0.0)])).unwrap();
        let s = TwoQubitState::from_blocks(
            Vec3::zeros(),
            Vec3::zeros(),
            Matrix3::from_diagonal(&Vec3::new(1.0, -1.0, 1.0)),
        )
        .unwrap();
        assert_abs_diff_eq!(*s.density().matrix(), *phi_plus.matrix(), epsilon = 1e-12);
    }

    #[test]
    fn singlet_from_blocks_is_projector() {
        let s = TwoQubitState::from_blocks(Vec3::zeros(), Vec3::zeros(), -Matrix3::identity()).unwrap();
        assert_abs_diff_eq!(*s.density().matrix(), *singlet().matrix(), epsilon = 1e-12);
    }

    #[test]
    fn rejects_invalid_density() {
        let mut m = Matrix4::identity() * c(0.25, 0.0);
        m[(0, 1)] = c(0.1, 0.0);
        assert!(matches!(DensityMatrix::new(m), Err(Error::NotHermitian { .. })));

        let m = Matrix4::identity() * c(0.3, 0.0);
        assert!(matches!(DensityMatrix::new(m), Err(Error::BadTrace { .. })));

        let m = Matrix4::from_diagonal(&Vector4::new(c(1.2, 0.0), c(-0.2, 0.0), c(0.0, 0.0), c(0.0, 0.0)));
        assert!(matches!(DensityMatrix::new(m), Err(Error::NotPositive { .. })));
    }

    #[test]
    fn clamps_tiny_negative_eigenvalue() {
        let m = Matrix4::from_diagonal(&Vector4::new(
            c(0.5 + 5e-11, 0.0),
            c(0.5, 0.0),
            c(-5e-11, 0.0),
            c(0.0, 0.0),
        ));
        let rho = DensityMatrix::new(m).unwrap();
        assert!(rho.eigenvalues().min() >= 0.0);
        assert_abs_diff_eq!(rho.matrix().trace().re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn g_validation_errors() {
        let mut g = Matrix4::zeros();
        g[(0, 0)] = 0.9;
        assert!(matches!(TwoQubitState::from_g(g), Err(Error::BadNormalization { .. })));
        // T = diag(1, 1, 1) is outside the Bell tetrahedron
        let err = TwoQubitState::from_blocks(Vec3::zeros(), Vec3::zeros(), Matrix3::identity());
        assert!(matches!(err, Err(Error::NotPositive { .. })));
    }

    #[test]
    fn conditioned_state_examples() {
        let z = ProjectiveMeasurement::new(Vec3::z()).unwrap();
        let mixed = TwoQubitState::maximally_mixed();
        let (p, s) = mixed.conditioned_state(&z, Outcome::Plus);
        assert_eq!((p, s), (0.5, Vec3::zeros()));

        let singlet = TwoQubitState::from_density(&singlet());
        let (p, s) = singlet.conditioned_state(&z, Outcome::Plus);
        assert_abs_diff_eq!(p, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(s, Vec3::new(0.0, 0.0, -0.5), epsilon = 1e-12);

        let product = TwoQubitState::from_blocks(Vec3::zeros(), Vec3::new(0.0, 0.0, 0.6), Matrix3::zeros()).unwrap();
        let x = ProjectiveMeasurement::along(Vec3::new(1.0, 2.0, -0.5)).unwrap();
        let (p, s) = product.conditioned_state(&x, Outcome::Plus);
        assert_abs_diff_eq!(p, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s, Vec3::new(0.0, 0.0, 0.3), epsilon = 1e-15);
    }

    #[test]
    fn joint_probability_examples() {
        let z = ProjectiveMeasurement::new(Vec3::z()).unwrap();
        let x = ProjectiveMeasurement::new(Vec3::x()).unwrap();
        let mixed = TwoQubitState::maximally_mixed();
        assert_eq!(mixed.joint_probability(&z, &x, Outcome::Plus, Outcome::Minus), 0.25);

        let s = TwoQubitState::from_density(&singlet());
        assert_abs_diff_eq!(s.joint_probability(&z, &z, Outcome::Plus, Outcome::Plus), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.joint_probability(&z, &z, Outcome::Plus, Outcome::Minus), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn ppt_examples() {
        let product = TwoQubitState::from_blocks(
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 0.0, 1.0) * Vec3::new(1.0, 0.0, 0.0).transpose(),
        )
        .unwrap();
        assert!(!product.is_entangled_ppt());
        assert!(TwoQubitState::from_density(&singlet()).is_entangled_ppt());
    }

    #[test]
    fn axis_validation() {
        assert!(matches!(
            ProjectiveMeasurement::new(Vec3::new(1.0, 1.0, 0.0)),
            Err(Error::NotUnitAxis { .. })
        ));
        assert!(ProjectiveMeasurement::along(Vec3::zeros()).is_err());
    }

    #[test]
    fn rotation_matches_unitary_conjugation() {
        // U = exp(-i theta/2 n.sigma)
        let (theta, n) = (0.7f64, Vec3::new(0.3, -0.5, 0.8).normalize());
        let mut u = pauli(0) * c((theta / 2.0).cos(), 0.0);
        for k in 0..3 {
            u -= pauli(k + 1) * c(0.0, (theta / 2.0).sin() * n[k]);
        }
        let r = rotation_from_unitary(&u);
        assert_abs_diff_eq!(r * r.transpose(), Matrix3::identity(), epsilon = 1e-12);
        assert_abs_diff_eq!(r.determinant(), 1.0, epsilon = 1e-12);

        let state = TwoQubitState::from_blocks(
            Vec3::new(0.1, 0.2, -0.1),
            Vec3::new(0.0, 0.3, 0.1),
            Matrix3::new(-0.3, 0.1, 0.0, 0.05, -0.2, 0.1, 0.0, 0.0, 0.25),
        )
        .unwrap();
        let uu = kron(&u, &u);
        let conj = DensityMatrix::new(uu * state.density().matrix() * uu.adjoint()).unwrap();
        let via_g = state.rotated(&r, &r);
        assert_abs_diff_eq!(*via_g.g(), *TwoQubitState::from_density(&conj).g(), epsilon = 1e-12);
    }
}
