//! State files: `{"density": [[{"re": .., "im": ..}, ..], ..]}` or `{"g": [[..], ..]}`.

use std::path::Path;

use nalgebra::Matrix4;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::qubit::{DensityMatrix, TwoQubitState, C64};

fn field_err(field: &str, what: &str) -> Error {
    Error::Parse(format!("field `{field}`: {what}"))
}

fn rows4<'a>(v: &'a Value, field: &str) -> Result<Vec<&'a Vec<Value>>> {
    let rows = v.as_array().ok_or_else(|| field_err(field, "expected a 4x4 array"))?;
    if rows.len() != 4 {
        return Err(field_err(field, &format!("expected 4 rows, found {}", rows.len())));
    }
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            let r = r
                .as_array()
                .ok_or_else(|| field_err(&format!("{field}[{i}]"), "expected an array"))?;
            if r.len() != 4 {
                return Err(field_err(&format!("{field}[{i}]"), &format!("expected 4 entries, found {}", r.len())));
            }
            Ok(r)
        })
        .collect()
}

fn number(v: &Value, field: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| field_err(field, "expected a number"))
}

/// Parses and validates a state document. Validation failures name the offending field.
pub fn state_from_json(text: &str) -> Result<TwoQubitState> {
    let doc: Value = serde_json::from_str(text)?;
    let obj = doc.as_object().ok_or_else(|| field_err("<root>", "expected an object"))?;
    match (obj.get("density"), obj.get("g")) {
        (Some(_), Some(_)) => Err(field_err("density", "give either `density` or `g`, not both")),
        (Some(d), None) => {
            let rows = rows4(d, "density")?;
            let mut m = Matrix4::<C64>::zeros();
            for (i, r) in rows.iter().enumerate() {
                for (j, e) in r.iter().enumerate() {
                    let f = format!("density[{i}][{j}]");
                    let e = e.as_object().ok_or_else(|| field_err(&f, "expected {\"re\", \"im\"}"))?;
                    let part = |k: &str| -> Result<f64> {
                        let v = e.get(k).ok_or_else(|| field_err(&format!("{f}.{k}"), "missing"))?;
                        number(v, &format!("{f}.{k}"))
                    };
                    m[(i, j)] = C64::new(part("re")?, part("im")?);
                }
            }
            let rho = DensityMatrix::new(m).map_err(|e| field_err("density", &e.to_string()))?;
            Ok(TwoQubitState::from_density(&rho))
        }
        (None, Some(g)) => {
            let rows = rows4(g, "g")?;
            let mut m = Matrix4::zeros();
            for (i, r) in rows.iter().enumerate() {
                for (j, e) in r.iter().enumerate() {
                    m[(i, j)] = number(e, &format!("g[{i}][{j}]"))?;
                }
            }
            TwoQubitState::from_g(m).map_err(|e| field_err("g", &e.to_string()))
        }
        (None, None) => Err(field_err("density", "missing (expected `density` or `g`)")),
    }
}

pub fn load_state(path: impl AsRef<Path>) -> Result<TwoQubitState> {
    state_from_json(&std::fs::read_to_string(path)?)
}

/// `{"g": [[..]]}` form of a state.
pub fn state_to_json(state: &TwoQubitState) -> String {
    let g = state.g();
    let rows: Vec<Vec<f64>> = (0..4).map(|i| (0..4).map(|j| g[(i, j)]).collect()).collect();
    serde_json::to_string_pretty(&json!({ "g": rows })).expect("plain numbers serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factory::{random_state, werner};

    #[test]
    fn g_round_trip() {
        let s = random_state(5);
        let back = state_from_json(&state_to_json(&s)).unwrap();
        approx::assert_abs_diff_eq!(*back.g(), *s.g(), epsilon = 1e-14);
    }

    #[test]
    fn density_form() {
        let w = werner(0.6).unwrap();
        let rho = w.density();
        let rows: Vec<Vec<Value>> = (0..4)
            .map(|i| (0..4).map(|j| json!({"re": rho.matrix()[(i, j)].re, "im": rho.matrix()[(i, j)].im})).collect())
            .collect();
        let s = state_from_json(&json!({ "density": rows }).to_string()).unwrap();
        approx::assert_abs_diff_eq!(*s.g(), *w.g(), epsilon = 1e-12);
    }

    #[test]
    fn errors_name_the_field() {
        let cases = [
            (r#"{}"#, "density"),
            (r#"{"g": [[1,0,0,0],[0,0,0,0],[0,0,0,0]]}"#, "`g`"),
            (r#"{"g": [[1,0,0,0],[0,0,0,0],[0,0,"x",0],[0,0,0,0]]}"#, "g[2][2]"),
            (r#"{"g": [[2,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}"#, "`g`"),
            (r#"{"density": [[{"re": 1}]]}"#, "density"),
            (
                r#"{"density": [[{"re":1,"im":0},{"re":0,"im":0},{"re":0,"im":0},{"re":0,"im":0}],
                               [{"re":0,"im":0},{"re":0},{"re":0,"im":0},{"re":0,"im":0}],
                               [{"re":0,"im":0},{"re":0,"im":0},{"re":0,"im":0},{"re":0,"im":0}],
                               [{"re":0,"im":0},{"re":0,"im":0},{"re":0,"im":0},{"re":0,"im":0}]]}"#,
                "density[1][1].im",
            ),
        ];
        for (text, field) in cases {
            let err = state_from_json(text).unwrap_err().to_string();
            assert!(err.contains(field), "{text} -> {err}");
        }
    }
}
