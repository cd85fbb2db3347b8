//! JSON wire formats.
//!
//! Forms: `{"c200":..,"c110":..,"c101":..,"c020":..,"c011":..,"c002":..}`
//! or the special shape `{"a":..,"b":..,"d":..,"e":..,"f":..}`.
//! Norms: `{"g": [[..],[..],[..]]}` with integer or `"p/q"` string
//! entries; a missing norm means the supremum norm.

use serde_json::Value;

use crate::error::{Error, Result};
use crate::norms::{parse_rat, IsometricNorm, Rat};
use crate::quadform::{SpecialConic, TernaryQuadraticForm};

/// Parses either form layout, validating the type invariants.
pub fn parse_form(text: &str) -> Result<TernaryQuadraticForm> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| Error::InvalidInput(format!("bad form JSON: {e}")))?;
    form_from_value(&v)
}

pub fn form_from_value(v: &Value) -> Result<TernaryQuadraticForm> {
    let get = |key: &str| -> Result<i64> {
        v.get(key)
            .and_then(Value::as_i64)
            .ok_or_else(|| Error::InvalidInput(format!("missing integer field \"{key}\"")))
    };
    if v.get("c200").is_some() {
        TernaryQuadraticForm::new(
            get("c200")?,
            get("c110")?,
            get("c101")?,
            get("c020")?,
            get("c011")?,
            get("c002")?,
        )
    } else if v.get("a").is_some() {
        Ok(SpecialConic::new(get("a")?, get("b")?, get("d")?, get("e")?, get("f")?)?.as_form())
    } else {
        Err(Error::InvalidInput(
            "form JSON needs either c200..c002 or a,b,d,e,f keys".into(),
        ))
    }
}

pub fn parse_special(text: &str) -> Result<SpecialConic> {
    let q = parse_form(text)?;
    q.as_special().ok_or_else(|| {
        Error::InvalidInput("form has a y^2 term; a special conic is required".into())
    })
}

/// Parses `{"g": [[..]...]}`; `None` or missing `g` gives the sup norm.
pub fn parse_norm(text: Option<&str>) -> Result<IsometricNorm> {
    let Some(text) = text else {
        return Ok(IsometricNorm::sup());
    };
    let v: Value = serde_json::from_str(text)
        .map_err(|e| Error::InvalidInput(format!("bad norm JSON: {e}")))?;
    norm_from_value(&v)
}

pub fn norm_from_value(v: &Value) -> Result<IsometricNorm> {
    let Some(rows) = v.get("g").and_then(Value::as_array) else {
        return Ok(IsometricNorm::sup());
    };
    if rows.len() != 3 {
        return Err(Error::InvalidInput("norm matrix needs 3 rows".into()));
    }
    let mut g = [[Rat::from_integer(0); 3]; 3];
    for (i, row) in rows.iter().enumerate() {
        let cols = row
            .as_array()
            .filter(|c| c.len() == 3)
            .ok_or_else(|| Error::InvalidInput("norm matrix rows need 3 entries".into()))?;
        for (j, cell) in cols.iter().enumerate() {
            g[i][j] = match cell {
                Value::Number(n) => {
                    let int = n
                        .as_i64()
                        .ok_or_else(|| Error::InvalidNormEntry(n.to_string()))?;
                    Rat::from_integer(int as i128)
                }
                Value::String(s) => parse_rat(s)?,
                other => return Err(Error::InvalidNormEntry(other.to_string())),
            };
        }
    }
    IsometricNorm::from_matrix(g)
}

pub fn form_to_json(q: &TernaryQuadraticForm) -> String {
    serde_json::to_string(q).expect("form serializes")
}

pub fn special_to_json(s: &SpecialConic) -> String {
    serde_json::to_string(s).expect("special conic serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn form_round_trip() {
        let q = TernaryQuadraticForm::new(1, 3, 0, 0, 5, 7).unwrap();
        let parsed = parse_form(&form_to_json(&q)).unwrap();
        assert_eq!(parsed, q);
    }

    #[test]
    fn special_keys_accepted() {
        let q = parse_form(r#"{"a":1,"b":0,"d":0,"e":-1,"f":0}"#).unwrap();
        assert_eq!(q, TernaryQuadraticForm::new(1, 0, 0, 0, -1, 0).unwrap());
        assert!(parse_special(r#"{"a":1,"b":0,"d":0,"e":-1,"f":0}"#).is_ok());
    }

    #[test]
    fn invalid_forms_rejected() {
        assert!(parse_form(r#"{"c200":0,"c110":0,"c101":0,"c020":0,"c011":0,"c002":0}"#).is_err());
        assert!(parse_form(r#"{"x": 1}"#).is_err());
        assert!(parse_form("not json").is_err());
    }

    #[test]
    fn norm_parsing() {
        assert_eq!(parse_norm(None).unwrap(), IsometricNorm::sup());
        let n = parse_norm(Some(r#"{"g": [[1,0,0],[0,1,0],[0,0,"1/2"]]}"#)).unwrap();
        assert_eq!(n.value(&[0.0, 0.0, 2.0]), 1.0);
        assert!(parse_norm(Some(r#"{"g": [[1,0,0],[0,1,0]]}"#)).is_err());
        assert!(parse_norm(Some(r#"{"g": [[1,0,0],[0,1,0],[0,0,0.5]]}"#)).is_err());
    }
}
