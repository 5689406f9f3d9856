//! JSON layouts shared with the command-line tool.
//!
//! * set function: `{"n": 3, "values": [v_0, .., v_7]}`
//! * family: `{"n": 3, "functions": [[..8 values..], [..], [..]]}`
//! * weights: `{"n": 3, "weights": [[..8 values..], [..], [..]]}`
//!
//! Values are decimal strings for prime fields and numbers for floats.

use serde_json::{json, Map, Value};

use crate::dag::WeightSystem;
use crate::error::{Error, Result};
use crate::ring::Ring;
use crate::setfn::{Family, SetFunction};

fn values_to_json<R: Ring>(ring: &R, values: &[R::Elem]) -> Value {
    Value::Array(values.iter().map(|&v| ring.to_json(v)).collect())
}

fn values_from_json<R: Ring>(ring: &R, v: &Value, what: &str) -> Result<Vec<R::Elem>> {
    v.as_array()
        .ok_or_else(|| Error::Invalid(format!("{what} must be an array")))?
        .iter()
        .map(|x| ring.from_json(x))
        .collect()
}

fn object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::Invalid(format!("{what} must be a JSON object")))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| Error::Invalid(format!("missing field '{key}'")))
}

fn size_field(obj: &Map<String, Value>) -> Result<usize> {
    field(obj, "n")?
        .as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| Error::Invalid("'n' must be a non-negative integer".into()))
}

fn functions<R: Ring>(ring: &R, v: &Value, key: &str) -> Result<(usize, Vec<SetFunction<R::Elem>>)> {
    let obj = object(v, key)?;
    let n = size_field(obj)?;
    let list = field(obj, key)?
        .as_array()
        .ok_or_else(|| Error::Invalid(format!("'{key}' must be an array")))?;
    let members = list
        .iter()
        .enumerate()
        .map(|(i, f)| SetFunction::new(n, values_from_json(ring, f, &format!("{key}[{i}]"))?))
        .collect::<Result<Vec<_>>>()?;
    Ok((n, members))
}

pub fn setfn_to_json<R: Ring>(ring: &R, f: &SetFunction<R::Elem>) -> Value {
    json!({ "n": f.n(), "values": values_to_json(ring, f.values()) })
}

pub fn setfn_from_json<R: Ring>(ring: &R, v: &Value) -> Result<SetFunction<R::Elem>> {
    let obj = object(v, "set function")?;
    let n = size_field(obj)?;
    SetFunction::new(n, values_from_json(ring, field(obj, "values")?, "values")?)
}

pub fn family_to_json<R: Ring>(ring: &R, fam: &Family<R::Elem>) -> Value {
    let functions: Vec<Value> = fam.members().iter().map(|f| values_to_json(ring, f.values())).collect();
    json!({ "n": fam.n(), "functions": functions })
}

pub fn family_from_json<R: Ring>(ring: &R, v: &Value) -> Result<Family<R::Elem>> {
    let (n, members) = functions(ring, v, "functions")?;
    Family::new(n, members)
}

pub fn weights_to_json<R: Ring>(ring: &R, w: &WeightSystem<R::Elem>) -> Value {
    let weights: Vec<Value> = w.weights().iter().map(|f| values_to_json(ring, f.values())).collect();
    json!({ "n": w.n(), "weights": weights })
}

pub fn weights_from_json<R: Ring>(ring: &R, v: &Value) -> Result<WeightSystem<R::Elem>> {
    let (n, members) = functions(ring, v, "weights")?;
    if members.len() != n {
        return Err(Error::DimensionMismatch(format!("{n} nodes need {n} weight arrays, got {}", members.len())));
    }
    WeightSystem::new(ring, members)
}
