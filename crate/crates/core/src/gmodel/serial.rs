use std::sync::Arc;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use super::{ExtremeGModel, HiddenGrid};
use crate::assemblage::MeasurementSet;
use crate::error::{Error, Result};
use crate::qubit::Vec3;

pub const GMODEL_VERSION: &str = "gmodel-v1";

/// On-disk form of an [`ExtremeGModel`]. Icosphere nodes are not stored; they are
/// regenerated from `grid_level` (and `rotation`, if any). Extra nodes are stored as
/// final positions.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GModelFile {
    pub version: String,
    pub grid_level: u32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra_nodes: Vec<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<[[f64; 3]; 3]>,
    pub measurements: MeasurementsFile,
    /// Node masses, center last.
    pub q: Vec<f64>,
    /// `p(a|A, xi_j)` in row-major (measurement, outcome, node) order, outcome `+` first.
    pub response: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MeasurementsFile {
    pub label: String,
    pub directions: Vec<[f64; 3]>,
}

impl GModelFile {
    pub fn from_model(model: &ExtremeGModel) -> Result<Self> {
        let grid = model.grid();
        let level = grid
            .level()
            .ok_or_else(|| Error::InvalidModel("only icosphere-based grids can be serialized".into()))?;
        Ok(Self {
            version: GMODEL_VERSION.into(),
            grid_level: level,
            extra_nodes: grid.extra_nodes().iter().map(|v| [v.x, v.y, v.z]).collect(),
            rotation: grid
                .rotation()
                .map(|r| [0, 1, 2].map(|i| [r[(i, 0)], r[(i, 1)], r[(i, 2)]])),
            measurements: MeasurementsFile {
                label: model.measurements().label().into(),
                directions: model.measurements().directions().iter().map(|v| [v.x, v.y, v.z]).collect(),
            },
            q: model.q().to_vec(),
            response: model.response_table().to_vec(),
        })
    }

    pub fn into_model(self) -> Result<ExtremeGModel> {
        if self.version != GMODEL_VERSION {
            return Err(Error::Parse(format!("unsupported model version {:?}", self.version)));
        }
        let mut grid = HiddenGrid::icosphere(self.grid_level);
        if let Some(r) = self.rotation {
            grid = grid.rotated(&Matrix3::from_fn(|i, j| r[i][j]));
        }
        let extra: Vec<Vec3> = self.extra_nodes.iter().map(|v| Vec3::new(v[0], v[1], v[2])).collect();
        let grid = grid.with_extra_nodes(&extra)?;
        let set = MeasurementSet::new(
            self.measurements.label,
            self.measurements.directions.iter().map(|v| Vec3::new(v[0], v[1], v[2])).collect(),
        )?;
        ExtremeGModel::new(Arc::new(grid), set, self.q, self.response)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmodel::werner_singlet_model;
    use crate::qubit::rotation_from_unitary;
    use nalgebra::Matrix2;

    #[test]
    fn round_trip() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let u = Matrix2::new(h, -h, h, h).map(|x| crate::qubit::C64::new(x, 0.0));
        let r = rotation_from_unitary(&u);
        let grid = HiddenGrid::icosphere(1)
            .rotated(&r)
            .with_extra_nodes(&[Vec3::new(0.3, 0.4, 0.5)])
            .unwrap();
        let set = MeasurementSet::fibonacci(3).unwrap();
        let model = werner_singlet_model(Arc::new(grid), &set);
        let file = GModelFile::from_model(&model).unwrap();
        let text = file.to_json().unwrap();
        assert!(text.contains("\"gmodel-v1\""));
        let back = GModelFile::from_json(&text).unwrap().into_model().unwrap();
        assert!(back.grid().same_as(model.grid()));
        assert_eq!(back.q(), model.q());
        assert_eq!(back.response_table(), model.response_table());
        assert!(back.measurements().same_as(model.measurements()));
    }

    #[test]
    fn rejects_unknown_version() {
        let set = MeasurementSet::fibonacci(1).unwrap();
        let model = werner_singlet_model(Arc::new(HiddenGrid::icosphere(0)), &set);
        let mut file = GModelFile::from_model(&model).unwrap();
        file.version = "gmodel-v0".into();
        assert!(file.into_model().is_err());
    }
}
