//! Measurement sets, measurement assemblages and steering figures.

use std::path::Path;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubit::{Outcome, ProjectiveMeasurement, TwoQubitState, Vec3, AXIS_TOL};
use crate::sphere::{axis_angle, fibonacci_hemisphere};

/// Two directions closer than this (as axes) describe the same measurement.
pub const DUPLICATE_ANGLE: f64 = 1e-9;
/// Tolerance for the probability, no-signalling and positivity checks on assemblages.
pub const ASSEMBLAGE_TOL: f64 = 1e-12;
/// Singular values below this count as zero when classifying steering figures.
pub const RANK_TOL: f64 = 1e-9;

/// Ordered set of binary projective measurements on Alice's side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSet {
    label: String,
    directions: Vec<Vec3>,
}

impl MeasurementSet {
    /// Fails on non-unit directions or on two directions that are equal or antipodal.
    pub fn new(label: impl Into<String>, directions: Vec<Vec3>) -> Result<Self> {
        for (i, d) in directions.iter().enumerate() {
            if (d.norm() - 1.0).abs() > AXIS_TOL {
                return Err(Error::MeasurementSet(format!(
                    "direction {i} has norm {}",
                    d.norm()
                )));
            }
            for (j, e) in directions[..i].iter().enumerate() {
                if axis_angle(d, e) < DUPLICATE_ANGLE {
                    return Err(Error::MeasurementSet(format!(
                        "directions {j} and {i} are equal or antipodal"
                    )));
                }
            }
        }
        Ok(Self {
            label: label.into(),
            directions,
        })
    }

    /// Normalizes every direction, then drops later duplicates of earlier axes.
    pub fn normalized_dedup(label: impl Into<String>, raw: &[Vec3]) -> Result<Self> {
        let mut kept: Vec<Vec3> = Vec::with_capacity(raw.len());
        for (i, v) in raw.iter().enumerate() {
            let n = v.norm();
            if n == 0.0 || !n.is_finite() {
                return Err(Error::MeasurementSet(format!("direction {i} cannot be normalized")));
            }
            let d = v / n;
            if kept.iter().all(|e| axis_angle(&d, e) >= DUPLICATE_ANGLE) {
                kept.push(d);
            }
        }
        Self::new(label, kept)
    }

    /// `n` measurement axes from a Fibonacci lattice on the upper hemisphere.
    pub fn fibonacci(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyMeasurementSet);
        }
        Self::normalized_dedup(format!("fib:{n}"), &fibonacci_hemisphere(n))
    }

    /// Cumulative unions of Fibonacci sets: the `i`-th set holds every direction of
    /// `fib:counts[0]`, ..., `fib:counts[i]`, so the sequence is nested.
    pub fn nested_fibonacci(counts: &[usize]) -> Result<Vec<Self>> {
        let mut out: Vec<Self> = Vec::with_capacity(counts.len());
        let mut label = String::from("nest:");
        for (i, &n) in counts.iter().enumerate() {
            let next = Self::fibonacci(n)?;
            if i > 0 {
                label.push(',');
            }
            label.push_str(&n.to_string());
            let mut set = match out.last() {
                Some(prev) => prev.union(&next),
                None => next,
            };
            set.label = label.clone();
            out.push(set);
        }
        Ok(out)
    }

    /// The three coordinate axes.
    pub fn coordinate_axes() -> Self {
        Self {
            label: "axes:xyz".into(),
            directions: vec![Vec3::x(), Vec3::y(), Vec3::z()],
        }
    }

    /// Parses `fib:<n>`, `nest:<n1,n2,...>` (union of Fibonacci sets), `axes:xyz` or
    /// `file:<path>` (a JSON array of 3-vectors).
    pub fn parse(spec: &str) -> Result<Self> {
        let (kind, arg) = spec
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("measurement spec `{spec}` lacks a `kind:` prefix")))?;
        match kind {
            "fib" => {
                let n: usize = arg
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad measurement count `{arg}`")))?;
                Self::fibonacci(n)
            }
            "nest" => {
                let counts = arg
                    .split(',')
                    .map(|c| c.trim().parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| Error::Parse(format!("bad measurement counts `{arg}`")))?;
                Self::nested_fibonacci(&counts)?
                    .pop()
                    .ok_or(Error::EmptyMeasurementSet)
            }
            "axes" if arg == "xyz" => Ok(Self::coordinate_axes()),
            "file" => Self::from_file(arg),
            _ => Err(Error::Parse(format!("unknown measurement spec `{spec}`"))),
        }
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let raw: Vec<[f64; 3]> = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        let vecs: Vec<Vec3> = raw.iter().map(|v| Vec3::new(v[0], v[1], v[2])).collect();
        Self::normalized_dedup(format!("file:{}", path.display()), &vecs)
    }

    /// Directions of `self` followed by those of `other` not already present.
    pub fn union(&self, other: &MeasurementSet) -> MeasurementSet {
        let mut dirs = self.directions.clone();
        for d in &other.directions {
            if dirs.iter().all(|e| axis_angle(d, e) >= DUPLICATE_ANGLE) {
                dirs.push(*d);
            }
        }
        MeasurementSet {
            label: format!("{}+{}", self.label, other.label),
            directions: dirs,
        }
    }

    /// Applies a rotation to every direction.
    pub fn rotated(&self, r: &Matrix3<f64>) -> MeasurementSet {
        MeasurementSet {
            label: format!("{}@rotated", self.label),
            directions: self.directions.iter().map(|d| (r * d).normalize()).collect(),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn directions(&self) -> &[Vec3] {
        &self.directions
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn measurement(&self, k: usize) -> ProjectiveMeasurement {
        ProjectiveMeasurement::along(self.directions[k]).expect("directions are unit vectors")
    }

    /// Same directions, compared to `AXIS_TOL`.
    pub fn same_as(&self, other: &MeasurementSet) -> bool {
        self.len() == other.len()
            && self
                .directions
                .iter()
                .zip(&other.directions)
                .all(|(u, v)| (u - v).norm() <= 1e-12)
    }
}

/// Outcome probability and shrinked Bloch vector of one conditioned state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssemblageEntry {
    pub p: f64,
    pub sv: Vec3,
}

/// Unnormalized conditioned states on Bob's side, one pair `(+, -)` per measurement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assemblage {
    measurements: MeasurementSet,
    entries: Vec<[AssemblageEntry; 2]>,
    bob_bloch: Vec3,
}

impl Assemblage {
    /// Builds an assemblage from explicit entries, checking its invariants at `tol`.
    pub fn from_entries(
        measurements: MeasurementSet,
        entries: Vec<[AssemblageEntry; 2]>,
        bob_bloch: Vec3,
        tol: f64,
    ) -> Result<Self> {
        if entries.len() != measurements.len() {
            return Err(Error::MismatchedMeasurements);
        }
        let a = Self {
            measurements,
            entries,
            bob_bloch,
        };
        a.check(tol)?;
        Ok(a)
    }

    fn check(&self, tol: f64) -> Result<()> {
        for (k, [plus, minus]) in self.entries.iter().enumerate() {
            if (plus.p + minus.p - 1.0).abs() > tol {
                return Err(Error::Inconsistent(format!("measurement {k}: probabilities do not sum to 1")));
            }
            if (plus.sv + minus.sv - self.bob_bloch).norm() > tol {
                return Err(Error::Inconsistent(format!("measurement {k}: no-signalling violated")));
            }
            for e in [plus, minus] {
                if e.p < -tol || e.sv.norm() > e.p + tol {
                    return Err(Error::Inconsistent(format!(
                        "measurement {k}: conditioned state is not a valid qubit state"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn measurements(&self) -> &MeasurementSet {
        &self.measurements
    }

    pub fn entries(&self) -> &[[AssemblageEntry; 2]] {
        &self.entries
    }

    pub fn entry(&self, k: usize, outcome: Outcome) -> AssemblageEntry {
        self.entries[k][outcome.index()]
    }

    pub fn bob_bloch(&self) -> Vec3 {
        self.bob_bloch
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Convex combination `sum_i w_i A_i` over a common measurement set.
    pub fn mix(parts: &[&Assemblage], weights: &[f64]) -> Result<Assemblage> {
        check_weights(weights, parts.len())?;
        let first = parts.first().ok_or(Error::EmptyMeasurementSet)?;
        if parts.iter().any(|a| !a.measurements.same_as(&first.measurements)) {
            return Err(Error::MismatchedMeasurements);
        }
        let zero = AssemblageEntry { p: 0.0, sv: Vec3::zeros() };
        let mut entries = vec![[zero; 2]; first.len()];
        let mut bob = Vec3::zeros();
        for (a, &w) in parts.iter().zip(weights) {
            bob += a.bob_bloch * w;
            for (acc, e) in entries.iter_mut().zip(&a.entries) {
                for o in 0..2 {
                    acc[o].p += w * e[o].p;
                    acc[o].sv += e[o].sv * w;
                }
            }
        }
        Ok(Assemblage {
            measurements: first.measurements.clone(),
            entries,
            bob_bloch: bob,
        })
    }
}

pub(crate) fn check_weights(weights: &[f64], expected: usize) -> Result<()> {
    if weights.len() != expected || expected == 0 {
        return Err(Error::InvalidParameter {
            name: "weight count",
            value: weights.len() as f64,
            reason: "must match the number of components",
        });
    }
    if let Some(&w) = weights.iter().find(|w| !(**w >= 0.0)) {
        return Err(Error::InvalidParameter {
            name: "mixing weight",
            value: w,
            reason: "must be nonnegative",
        });
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter {
            name: "weight sum",
            value: total,
            reason: "must equal 1",
        });
    }
    Ok(())
}

/// Assemblage generated by Alice's projective measurements on `state`.
pub fn build_assemblage(state: &TwoQubitState, set: &MeasurementSet) -> Assemblage {
    let entries = (0..set.len())
        .map(|k| {
            let m = set.measurement(k);
            Outcome::ALL.map(|o| {
                let (p, sv) = state.conditioned_state(&m, o);
                AssemblageEntry { p, sv }
            })
        })
        .collect();
    Assemblage {
        measurements: set.clone(),
        entries,
        bob_bloch: state.b(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureKind {
    Ellipsoid,
    Ellipse,
    Segment,
    Point,
}

/// Image of all projective measurements in the probability Bloch ball:
/// `center + shape * x` over unit `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct SteeringFigure {
    pub center: Vec3,
    pub shape: Matrix3<f64>,
    pub kind: FigureKind,
}

impl SteeringFigure {
    /// Semi-axis lengths in decreasing order (singular values of `shape`).
    pub fn semi_axes(&self) -> [f64; 3] {
        let mut sv: Vec<f64> = self.shape.singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        [sv[0], sv[1], sv[2]]
    }

    /// Boundary point generated by the measurement direction `x`.
    pub fn point(&self, x: &Vec3) -> Vec3 {
        self.center + self.shape * x
    }
}

pub fn steering_figure(state: &TwoQubitState) -> SteeringFigure {
    let shape = state.t().transpose() * 0.5;
    let rank = shape.singular_values().iter().filter(|&&s| s > RANK_TOL).count();
    let kind = match rank {
        3 => FigureKind::Ellipsoid,
        2 => FigureKind::Ellipse,
        1 => FigureKind::Segment,
        _ => FigureKind::Point,
    };
    SteeringFigure {
        center: state.b() * 0.5,
        shape,
        kind,
    }
}
