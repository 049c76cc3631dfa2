//! JSON input formats.
//!
//! Measures: `{"n": 2, "atoms": [{"zeta": [[re, im], ...], "weight": w}, ...]}`.
//! Point sets: `{"n": 2, "points": [[[re, im], ...], ...]}`.
//! Errors name the offending JSON path, e.g. `atoms[3].weight`.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geometry::{HomogeneousPoint, C64};
use crate::measures::{validate, AtomicMeasure};

fn err(path: &str, message: impl Into<String>) -> Error {
    Error::Parse { path: path.to_string(), message: message.into() }
}

fn field<'a>(v: &'a Value, key: &str, path: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| err(&join(path, key), "missing field"))
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() { key.to_string() } else { format!("{path}.{key}") }
}

fn dimension(root: &Value) -> Result<usize> {
    let n = field(root, "n", "")?;
    match n.as_u64() {
        Some(n) if n >= 1 => Ok(n as usize),
        _ => Err(err("n", format!("expected a positive integer, got {n}"))),
    }
}

fn number(v: &Value, path: &str) -> Result<f64> {
    v.as_f64().filter(|x| x.is_finite()).ok_or_else(|| err(path, format!("expected a finite number, got {v}")))
}

fn complex_vector(v: &Value, len: usize, path: &str) -> Result<Vec<C64>> {
    let arr = v.as_array().ok_or_else(|| err(path, "expected an array of [re, im] pairs"))?;
    if arr.len() != len {
        return Err(err(path, format!("expected {len} homogeneous coordinates, got {}", arr.len())));
    }
    arr.iter()
        .enumerate()
        .map(|(i, c)| {
            let p = format!("{path}[{i}]");
            match c.as_array().map(|a| a.as_slice()) {
                Some([re, im]) => Ok(C64::new(number(re, &format!("{p}[0]"))?, number(im, &format!("{p}[1]"))?)),
                _ => Err(err(&p, "expected [re, im]")),
            }
        })
        .collect()
}

fn point(v: &Value, n: usize, path: &str) -> Result<HomogeneousPoint> {
    let raw = complex_vector(v, n + 1, path)?;
    HomogeneousPoint::new(&raw).map_err(|e| err(path, e.to_string()))
}

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| err("$", format!("invalid JSON: {e}")))
}

/// Parse and validate a measure file.
pub fn parse_measure(text: &str) -> Result<AtomicMeasure> {
    let root = parse_json(text)?;
    let n = dimension(&root)?;
    let atoms = field(&root, "atoms", "")?.as_array().ok_or_else(|| err("atoms", "expected an array"))?;
    let mut parsed = Vec::with_capacity(atoms.len());
    for (i, a) in atoms.iter().enumerate() {
        let base = format!("atoms[{i}]");
        let zeta = point(field(a, "zeta", &base)?, n, &join(&base, "zeta"))?;
        let weight = number(field(a, "weight", &base)?, &join(&base, "weight"))?;
        parsed.push((zeta, weight));
    }
    let intent = root.get("atomless_intent").and_then(Value::as_bool).unwrap_or(false);
    let mut mu = validate(n, parsed)?;
    mu.atomless_intent = intent;
    Ok(mu)
}

/// Parse a point-set file.
pub fn parse_points(text: &str) -> Result<(usize, Vec<HomogeneousPoint>)> {
    let root = parse_json(text)?;
    let n = dimension(&root)?;
    let pts = field(&root, "points", "")?.as_array().ok_or_else(|| err("points", "expected an array"))?;
    let points = pts
        .iter()
        .enumerate()
        .map(|(i, p)| point(p, n, &format!("points[{i}]")))
        .collect::<Result<_>>()?;
    Ok((n, points))
}

fn coords_json(p: &HomogeneousPoint) -> Value {
    Value::Array(p.coords().iter().map(|c| json!([c.re, c.im])).collect())
}

pub fn measure_to_json(mu: &AtomicMeasure) -> String {
    let atoms: Vec<Value> = mu
        .atoms()
        .iter()
        .map(|a| json!({"zeta": coords_json(&a.point), "weight": a.weight}))
        .collect();
    let mut v = json!({"n": mu.dim(), "atoms": atoms});
    if mu.atomless_intent {
        v["atomless_intent"] = json!(true);
    }
    serde_json::to_string_pretty(&v).expect("serializable")
}

pub fn points_to_json(n: usize, points: &[HomogeneousPoint]) -> String {
    let pts: Vec<Value> = points.iter().map(coords_json).collect();
    serde_json::to_string_pretty(&json!({"n": n, "points": pts})).expect("serializable")
}
