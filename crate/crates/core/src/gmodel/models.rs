use std::f64::consts::PI;
use std::sync::Arc;

use super::{ExtremeGModel, HiddenGrid};
use crate::assemblage::{Assemblage, MeasurementSet};
use crate::error::{Error, Result};
use crate::qubit::Vec3;

/// `xi . s` within this of zero counts as a tie and gets response 1/2.
const TIE: f64 = 1e-12;

fn indicator(t: f64) -> f64 {
    if t > TIE {
        1.0
    } else if t < -TIE {
        0.0
    } else {
        0.5
    }
}

/// Hemisphere model of the singlet: `q_j = area_j / 2 pi` on the surface, and response 1
/// on the hemisphere facing the shrinked vector `-x/2` of each outcome.
pub fn werner_singlet_model(grid: Arc<HiddenGrid>, set: &MeasurementSet) -> ExtremeGModel {
    let n = grid.node_count();
    let c = grid.center();
    let mut q: Vec<f64> = grid.area().iter().map(|w| w / (2.0 * PI)).collect();
    q.push(0.0);
    let mut response = vec![0.5; 2 * set.len() * n];
    for (k, x) in set.directions().iter().enumerate() {
        for (o, sign) in [(0, 1.0), (1, -1.0)] {
            let s = -0.5 * sign * x;
            let row = &mut response[(2 * k + o) * n..(2 * k + o + 1) * n];
            for (j, r) in row.iter_mut().enumerate().take(c) {
                *r = indicator(grid.node(j).dot(&s));
            }
        }
    }
    ExtremeGModel::from_parts_unchecked(grid, set.clone(), q, response)
}

/// `count` evenly spaced unit vectors on the great circle orthogonal to `normal`.
pub fn great_circle(normal: &Vec3, count: usize) -> Vec<Vec3> {
    let n = normal.normalize();
    let helper = if n.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let u = n.cross(&helper).normalize();
    let v = n.cross(&u);
    (0..count)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / count as f64;
            u * t.cos() + v * t.sin()
        })
        .collect()
}

/// Ring model for a planar steering circle of radius `radius` with normal `normal`.
///
/// Mass density `radius / 2` per radian on the great circle of the plane, total
/// `pi * radius`. For an outcome with shrinked vector `s` and `lambda = |s| / radius`
/// the response is `lambda` on the half facing `s` plus `(1 - lambda) / 2` everywhere.
/// Only grid nodes lying on that great circle carry mass, weighted by their arc cells;
/// a cell cut by the half-circle boundary gets the covered fraction as its response.
/// Requires `p(a|A) = 1/2` and every `s` in the plane.
pub fn circle_model(
    grid: Arc<HiddenGrid>,
    target: &Assemblage,
    normal: &Vec3,
    radius: f64,
) -> Result<ExtremeGModel> {
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter {
            name: "radius",
            value: radius,
            reason: "must be positive",
        });
    }
    let nrm = normal.normalize();
    for pair in target.entries() {
        for e in pair {
            if (e.p - 0.5).abs() > 1e-12 {
                return Err(Error::InvalidModel("ring model needs p(a|A) = 1/2".into()));
            }
            if e.sv.dot(&nrm).abs() > 1e-12 || e.sv.norm() > radius + 1e-12 {
                return Err(Error::InvalidModel("shrinked vector outside the steering circle".into()));
            }
        }
    }
    let ring: Vec<usize> = (0..grid.surface_len())
        .filter(|&j| grid.node(j).dot(&nrm).abs() < 1e-9)
        .collect();
    if ring.len() < 3 {
        return Err(Error::InvalidModel("grid has too few nodes on the circle".into()));
    }
    let u = grid.node(ring[0]);
    let v = nrm.cross(&u);
    let mut angles: Vec<(f64, usize)> = ring
        .iter()
        .map(|&j| {
            let x = grid.node(j);
            (x.dot(&v).atan2(x.dot(&u)).rem_euclid(2.0 * PI), j)
        })
        .collect();
    angles.sort_by(|a, b| a.0.total_cmp(&b.0));

    let n = grid.node_count();
    let mut q = vec![0.0; n];
    let m = angles.len();
    // arc cell of each ring node: half the gap to each neighbour
    let mut cells = Vec::with_capacity(m);
    for i in 0..m {
        let back = 0.5 * (angles[i].0 - angles[(i + m - 1) % m].0).rem_euclid(2.0 * PI);
        let ahead = 0.5 * (angles[(i + 1) % m].0 - angles[i].0).rem_euclid(2.0 * PI);
        q[angles[i].1] = 0.5 * radius * (back + ahead);
        cells.push((angles[i].0, back, ahead));
    }

    let mut response = vec![0.5; 2 * target.len() * n];
    for (k, pair) in target.entries().iter().enumerate() {
        for (o, e) in pair.iter().enumerate() {
            let lambda = (e.sv.norm() / radius).min(1.0);
            let facing = e.sv.dot(&v).atan2(e.sv.dot(&u));
            let row = &mut response[(2 * k + o) * n..(2 * k + o + 1) * n];
            for (&(_, j), &(phi, back, ahead)) in angles.iter().zip(&cells) {
                let share = if lambda > 0.0 {
                    half_circle_share(phi - facing, back, ahead)
                } else {
                    0.5
                };
                row[j] = lambda * share + (1.0 - lambda) * 0.5;
            }
        }
    }
    ExtremeGModel::new(grid, target.measurements().clone(), q, response)
}

/// Fraction of the arc `[d - back, d + ahead]` inside `(-pi/2, pi/2)` modulo `2 pi`.
fn half_circle_share(d: f64, back: f64, ahead: f64) -> f64 {
    let len = back + ahead;
    if len <= 0.0 {
        return indicator(d.cos());
    }
    let d = (d + PI).rem_euclid(2.0 * PI) - PI;
    let mut inside = 0.0;
    for shift in [-2.0 * PI, 0.0, 2.0 * PI] {
        let lo = (d - back + shift).max(-PI / 2.0);
        let hi = (d + ahead + shift).min(PI / 2.0);
        inside += (hi - lo).max(0.0);
    }
    (inside / len).clamp(0.0, 1.0)
}
