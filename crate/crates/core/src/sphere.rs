//! Direction sampling on the unit sphere.

use std::collections::HashMap;

use crate::qubit::Vec3;

/// Upper-hemisphere Fibonacci lattice with `n` points.
///
/// Binary projective measurements along `x` and `-x` coincide, so only one
/// hemisphere is sampled; the axes then cover the projective plane evenly.
pub fn fibonacci_hemisphere(n: usize) -> Vec<Vec3> {
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    (0..n)
        .map(|i| {
            let z = 1.0 - (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = 2.0 * std::f64::consts::PI * (i as f64 / golden).fract();
            Vec3::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}

/// Subdivided icosahedron projected onto the unit sphere.
///
/// Vertices of level `k` are a prefix of the vertices of level `k + 1`, so grids of
/// increasing level are nested. Vertex counts: 12, 42, 162, 642, 2562, ...
#[derive(Clone, Debug)]
pub struct Icosphere {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[usize; 3]>,
}

impl Icosphere {
    pub fn new(level: u32) -> Self {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let raw = [
            (-1.0, phi, 0.0),
            (1.0, phi, 0.0),
            (-1.0, -phi, 0.0),
            (1.0, -phi, 0.0),
            (0.0, -1.0, phi),
            (0.0, 1.0, phi),
            (0.0, -1.0, -phi),
            (0.0, 1.0, -phi),
            (phi, 0.0, -1.0),
            (phi, 0.0, 1.0),
            (-phi, 0.0, -1.0),
            (-phi, 0.0, 1.0),
        ];
        let mut vertices: Vec<Vec3> = raw
            .iter()
            .map(|&(x, y, z)| Vec3::new(x, y, z).normalize())
            .collect();
        let mut triangles = vec![
            [0, 11, 5],
            [0, 5, 1],
            [0, 1, 7],
            [0, 7, 10],
            [0, 10, 11],
            [1, 5, 9],
            [5, 11, 4],
            [11, 10, 2],
            [10, 7, 6],
            [7, 1, 8],
            [3, 9, 4],
            [3, 4, 2],
            [3, 2, 6],
            [3, 6, 8],
            [3, 8, 9],
            [4, 9, 5],
            [2, 4, 11],
            [6, 2, 10],
            [8, 6, 7],
            [9, 8, 1],
        ];
        for _ in 0..level {
            let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
            let mut next = Vec::with_capacity(triangles.len() * 4);
            for &[a, b, c] in &triangles {
                let mut mid = |i: usize, j: usize| -> usize {
                    let key = (i.min(j), i.max(j));
                    *midpoints.entry(key).or_insert_with(|| {
                        vertices.push((vertices[i] + vertices[j]).normalize());
                        vertices.len() - 1
                    })
                };
                let ab = mid(a, b);
                let bc = mid(b, c);
                let ca = mid(c, a);
                next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
            }
            triangles = next;
        }
        Self { vertices, triangles }
    }

    /// Number of vertices at `level`: `10 * 4^level + 2`.
    pub fn vertex_count(level: u32) -> usize {
        10 * 4usize.pow(level) + 2
    }

    /// Per-vertex share of spherical area: one third of every incident spherical
    /// triangle. Sums to `4 pi`.
    pub fn area_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.vertices.len()];
        for &[a, b, c] in &self.triangles {
            let area = spherical_triangle_area(&self.vertices[a], &self.vertices[b], &self.vertices[c]);
            for v in [a, b, c] {
                w[v] += area / 3.0;
            }
        }
        w
    }
}

/// Solid angle of the spherical triangle with unit-vector corners (Van Oosterom-Strackee).
pub fn spherical_triangle_area(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    let num = a.dot(&b.cross(c)).abs();
    let den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    2.0 * num.atan2(den)
}

/// Angle between two axes, identifying `v` with `-v`.
pub fn axis_angle(u: &Vec3, v: &Vec3) -> f64 {
    let cross = u.cross(v).norm();
    let dot = u.dot(v).abs();
    cross.atan2(dot)
}
