//! JSON encodings for specs, elements and arbitrary-precision integers.
//!
//! Integers within `+-2^53` are written as JSON numbers, larger ones as
//! decimal strings. On input, numbers, decimal strings and `{"big": "..."}`
//! objects are all accepted.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec};
use crate::matrix::IntMatrix;

const EXACT_LIMIT: i64 = 1 << 53;

pub fn int_to_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) if (-EXACT_LIMIT..=EXACT_LIMIT).contains(&v) => Value::from(v),
        _ => Value::String(x.to_string()),
    }
}

pub fn int_from_json(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigInt::from(u))
            } else {
                Err(Error::Invalid(format!("non-integer number {n}")))
            }
        }
        Value::String(s) => s
            .trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Invalid(format!("bad integer string {s:?}"))),
        Value::Object(o) => match o.get("big") {
            Some(inner) => int_from_json(inner),
            None => Err(Error::Invalid("expected integer".into())),
        },
        other => Err(Error::Invalid(format!("expected integer, got {other}"))),
    }
}

pub fn ints_to_json(xs: &[BigInt]) -> Value {
    Value::Array(xs.iter().map(int_to_json).collect())
}

pub fn ints_from_json(v: &Value) -> Result<Vec<BigInt>> {
    v.as_array()
        .ok_or_else(|| Error::Invalid("expected array of integers".into()))?
        .iter()
        .map(int_from_json)
        .collect()
}

pub fn matrix_to_json(m: &IntMatrix) -> Value {
    Value::Array(m.rows().iter().map(|r| ints_to_json(r)).collect())
}

pub fn matrix_from_json(v: &Value) -> Result<IntMatrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Invalid("matrix must be an array of rows".into()))?
        .iter()
        .map(ints_from_json)
        .collect::<Result<Vec<_>>>()?;
    IntMatrix::from_rows(rows)
}

/// `{"v": [...], "s": n}`
pub fn element_to_json(g: &Element) -> Value {
    json!({ "v": ints_to_json(&g.vec), "s": int_to_json(&g.shift) })
}

pub fn element_from_json(v: &Value) -> Result<Element> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Invalid("element must be an object {v, s}".into()))?;
    let vec = ints_from_json(obj.get("v").ok_or_else(|| Error::Invalid("missing v".into()))?)?;
    let shift = int_from_json(obj.get("s").ok_or_else(|| Error::Invalid("missing s".into()))?)?;
    Ok(Element::new(vec, shift))
}

pub fn element_from_str(s: &str) -> Result<Element> {
    let v: Value = serde_json::from_str(s).map_err(|e| Error::Invalid(e.to_string()))?;
    element_from_json(&v)
}

pub fn spec_to_json(spec: &GroupSpec) -> Value {
    let gens = if spec.has_default_generators() {
        Value::String("default".into())
    } else {
        Value::Array(spec.generators().iter().map(element_to_json).collect())
    };
    let mut m = Map::new();
    m.insert("k".into(), Value::from(spec.k()));
    m.insert("phi".into(), matrix_to_json(spec.phi()));
    m.insert("generators".into(), gens);
    Value::Object(m)
}

pub fn spec_from_json(v: &Value) -> Result<GroupSpec> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Invalid("spec must be a JSON object".into()))?;
    let phi = matrix_from_json(obj.get("phi").ok_or_else(|| Error::Invalid("missing phi".into()))?)?;
    if let Some(k) = obj.get("k") {
        let k = k
            .as_u64()
            .ok_or_else(|| Error::Invalid("k must be a positive integer".into()))?;
        if k as usize != phi.dim() {
            return Err(Error::DimensionMismatch {
                expected: k as usize,
                found: phi.dim(),
            });
        }
    }
    match obj.get("generators") {
        None => GroupSpec::new(phi),
        Some(Value::String(s)) if s == "default" => GroupSpec::new(phi),
        Some(Value::Array(list)) => {
            let gens = list.iter().map(element_from_json).collect::<Result<Vec<_>>>()?;
            GroupSpec::with_generators(phi, gens)
        }
        Some(other) => Err(Error::Invalid(format!(
            "generators must be \"default\" or a list, got {other}"
        ))),
    }
}

pub fn spec_from_str(s: &str) -> Result<GroupSpec> {
    let v: Value = serde_json::from_str(s).map_err(|e| Error::Invalid(e.to_string()))?;
    spec_from_json(&v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_round_trip() {
        let spec = spec_from_str(r#"{"k": 2, "phi": [[2,1],[1,1]], "generators": "default"}"#).unwrap();
        assert_eq!(spec.generators().len(), 6);
        let back = spec_from_json(&spec_to_json(&spec)).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn explicit_generators() {
        let spec = spec_from_str(
            r#"{"k": 1, "phi": [[-1]], "generators": [{"v":[1],"s":0},{"v":[-1],"s":0},{"v":[0],"s":1},{"v":[0],"s":-1}]}"#,
        )
        .unwrap();
        assert_eq!(spec.generators().len(), 4);
        assert!(spec_from_str(r#"{"k": 3, "phi": [[1]]}"#).is_err());
    }

    #[test]
    fn big_integers() {
        let huge: BigInt = "123456789012345678901234567890".parse().unwrap();
        let v = int_to_json(&huge);
        assert!(v.is_string());
        assert_eq!(int_from_json(&v).unwrap(), huge);
        assert_eq!(int_from_json(&json!({"big": "-17"})).unwrap(), BigInt::from(-17));
        assert_eq!(int_to_json(&BigInt::from(42)), json!(42));
        let g = element_from_str(r#"{"v":[1,"99999999999999999999"],"s":-2}"#).unwrap();
        assert_eq!(element_from_json(&element_to_json(&g)).unwrap(), g);
    }
}
