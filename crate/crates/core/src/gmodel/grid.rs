use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::qubit::Vec3;
use crate::sphere::Icosphere;

/// Surface nodes closer than this are treated as the same node.
const SAME_NODE: f64 = 1e-12;

/// Discrete hidden-state support: unit-sphere nodes plus the center of the ball.
///
/// Icosphere vertices come first, then any extra nodes (which carry zero quadrature
/// weight). The center is the last node index, `surface_len()`.
#[derive(Clone, Debug, PartialEq)]
pub struct HiddenGrid {
    level: Option<u32>,
    rotation: Option<Matrix3<f64>>,
    nodes: Vec<Vec3>,
    area: Vec<f64>,
    base_len: usize,
}

impl HiddenGrid {
    pub fn icosphere(level: u32) -> Self {
        let sphere = Icosphere::new(level);
        let area = sphere.area_weights();
        let base_len = sphere.vertices.len();
        Self {
            level: Some(level),
            rotation: None,
            nodes: sphere.vertices,
            area,
            base_len,
        }
    }

    /// A grid of explicit unit nodes with the given quadrature weights.
    pub fn from_nodes(nodes: Vec<Vec3>, area: Vec<f64>) -> Result<Self> {
        if nodes.len() != area.len() {
            return Err(Error::InvalidModel("node and weight counts differ".into()));
        }
        if let Some(v) = nodes.iter().find(|v| (v.norm() - 1.0).abs() > SAME_NODE) {
            return Err(Error::InvalidModel(format!("grid node with norm {}", v.norm())));
        }
        if area.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::InvalidModel("negative quadrature weight".into()));
        }
        let base_len = nodes.len();
        Ok(Self {
            level: None,
            rotation: None,
            nodes,
            area,
            base_len,
        })
    }

    /// Appends directions (normalized) that are not already grid nodes.
    pub fn with_extra_nodes(&self, extra: &[Vec3]) -> Result<Self> {
        let mut g = self.clone();
        for v in extra {
            let n = v.norm();
            if n == 0.0 || !n.is_finite() {
                return Err(Error::InvalidModel("extra node cannot be normalized".into()));
            }
            let d = v / n;
            if g.find(&d).is_none() {
                g.nodes.push(d);
                g.area.push(0.0);
            }
        }
        Ok(g)
    }

    /// Rotates every node; quadrature weights are unchanged.
    pub fn rotated(&self, r: &Matrix3<f64>) -> Self {
        let mut g = self.clone();
        for v in &mut g.nodes {
            *v = (r * *v).normalize();
        }
        g.rotation = Some(match self.rotation {
            Some(prev) => r * prev,
            None => *r,
        });
        g
    }

    pub fn level(&self) -> Option<u32> {
        self.level
    }

    pub fn rotation(&self) -> Option<&Matrix3<f64>> {
        self.rotation.as_ref()
    }

    /// Extra nodes appended after the base grid.
    pub fn extra_nodes(&self) -> &[Vec3] {
        &self.nodes[self.base_len..]
    }

    pub fn surface(&self) -> &[Vec3] {
        &self.nodes
    }

    pub fn surface_len(&self) -> usize {
        self.nodes.len()
    }

    /// Surface nodes plus the center.
    pub fn node_count(&self) -> usize {
        self.nodes.len() + 1
    }

    pub fn center(&self) -> usize {
        self.nodes.len()
    }

    /// Position of node `j`; the zero vector for the center.
    pub fn node(&self, j: usize) -> Vec3 {
        self.nodes.get(j).copied().unwrap_or_else(Vec3::zeros)
    }

    pub fn area(&self) -> &[f64] {
        &self.area
    }

    pub fn find(&self, d: &Vec3) -> Option<usize> {
        self.nodes.iter().position(|v| (v - d).norm() <= SAME_NODE)
    }

    /// Index of the surface node closest to direction `d`.
    pub fn nearest(&self, d: &Vec3) -> usize {
        let mut best = (0, f64::NEG_INFINITY);
        for (j, v) in self.nodes.iter().enumerate() {
            let c = v.dot(d);
            if c > best.1 {
                best = (j, c);
            }
        }
        best.0
    }

    /// Largest angular distance from any node to its nearest neighbour, measured over
    /// the base icosphere edges. Zero for grids without a level.
    pub fn mesh_size(&self) -> f64 {
        match self.level {
            Some(level) => {
                let s = Icosphere::new(level);
                s.triangles
                    .iter()
                    .flat_map(|&[a, b, c]| [(a, b), (b, c), (c, a)])
                    .map(|(i, j)| s.vertices[i].angle(&s.vertices[j]))
                    .fold(0.0, f64::max)
            }
            None => 0.0,
        }
    }

    pub fn same_as(&self, other: &HiddenGrid) -> bool {
        self.nodes.len() == other.nodes.len()
            && self
                .nodes
                .iter()
                .zip(&other.nodes)
                .all(|(u, v)| (u - v).norm() <= SAME_NODE)
    }
}
