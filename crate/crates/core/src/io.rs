//! JSON formats shared by the library and the command line tool.
//!
//! * system: `{"backend":"finite_perm","perm":[1,2,0]}`,
//!   `{"backend":"finite_perm","n":5,"cycles":[[0,1,2],[3,4]]}`,
//!   `{"backend":"rational_rotation","p":1,"q":3}`,
//!   `{"backend":"aperiodic_orbit","window":64}`;
//! * point: an integer (finite systems, orbit index on the aperiodic model)
//!   or `"num/den"` (an angle on a rotation);
//! * scalar: a number or `[re, im]`, where each part is a number or an exact
//!   rational string such as `"-3/5"`;
//! * function: `{"table":[…]}`, `{"trig":{"m":c}}`,
//!   `{"orbit_table":{"k":c},"tail":c}` or `{"constant":c}`;
//! * element: `{"coeffs":{"n":function}}`;
//! * sequence vector: `{"k":c}`;
//! * circle subset: `{"arcs":[[0.25,0.75]],"points":[0.1]}` (optionally
//!   `"full":true`);
//! * structure-space subset: `{"orbits":{"0":circle subset}}`;
//! * ideal: `{"orbit_of":x,"lambda":c}`, `{"closure":[points]}` or
//!   `{"whole_orbit_of":x}`.
//!
//! Exact values are written as rational strings and floats in the shortest
//! form that reads back to the same double, so output always re-parses to
//! an equal value.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::Zero;
use serde_json::{json, Map, Value};

use crate::algebra::AlgebraElement;
use crate::dynsys::{Backend, DynSystem, Orbit, Point};
use crate::function::FunctionOnX;
use crate::ideals::{OrbitClosure, PrimitiveIdealId};
use crate::matrix::ComplexMatrix;
use crate::reps::SeqVector;
use crate::scalar::{Scalar, C64};
use crate::sspace::{SSpaceSubset, StructureDescription, TSubset, WienerWitness};
use crate::{Error, Result};

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

/// Parses JSON text, reporting syntax errors with their position.
pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| format_err(format!("line {}: {e}", e.line())))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| format_err(format!("missing field {key:?}")))
}

fn as_object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| format_err(format!("{what} must be an object")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| format_err(format!("{what} must be an array")))
}

fn as_i64(v: &Value, what: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| format_err(format!("{what} must be an integer")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64()
        .map(|u| u as usize)
        .ok_or_else(|| format_err(format!("{what} must be a nonnegative integer")))
}

fn as_f64(v: &Value, what: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| format_err(format!("{what} must be a number")))
}

fn key_i64(k: &str) -> Result<i64> {
    k.trim()
        .parse()
        .map_err(|_| format_err(format!("key {k:?} is not an integer")))
}

// ---- systems and points ----

pub fn system_from_json(v: &Value) -> Result<DynSystem> {
    let backend = field(v, "backend")?
        .as_str()
        .ok_or_else(|| format_err("backend must be a string"))?;
    match backend {
        "finite_perm" => {
            if let Some(perm) = v.get("perm") {
                let perm = as_array(perm, "perm")?
                    .iter()
                    .map(|x| as_usize(x, "perm entry"))
                    .collect::<Result<Vec<_>>>()?;
                DynSystem::finite_permutation(perm)
            } else {
                let n = as_usize(field(v, "n")?, "n")?;
                let cycles = as_array(field(v, "cycles")?, "cycles")?
                    .iter()
                    .map(|c| {
                        as_array(c, "cycle")?
                            .iter()
                            .map(|x| as_usize(x, "cycle entry"))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                let refs: Vec<&[usize]> = cycles.iter().map(Vec::as_slice).collect();
                DynSystem::from_cycles(n, &refs)
            }
        }
        "rational_rotation" => DynSystem::rational_rotation(
            as_i64(field(v, "p")?, "p")?,
            as_i64(field(v, "q")?, "q")?,
        ),
        "aperiodic_orbit" => DynSystem::aperiodic_orbit(match v.get("window") {
            Some(w) => as_i64(w, "window")?,
            None => 64,
        }),
        other => Err(format_err(format!("unknown backend {other:?}"))),
    }
}

pub fn parse_system(text: &str) -> Result<DynSystem> {
    system_from_json(&parse_json(text)?)
}

pub fn system_to_json(sys: &DynSystem) -> Value {
    match sys.backend() {
        Backend::FinitePermutation { perm, .. } => json!({"backend": "finite_perm", "perm": perm}),
        Backend::RationalRotation { p, q } => json!({"backend": "rational_rotation", "p": p, "q": q}),
        Backend::AperiodicOrbit { window } => json!({"backend": "aperiodic_orbit", "window": window}),
    }
}

/// Parses a point given as text, according to the system's backend.
pub fn parse_point_str(sys: &DynSystem, s: &str) -> Result<Point> {
    let s = s.trim();
    let p = match sys.backend() {
        Backend::FinitePermutation { .. } => Point::Index(
            s.parse()
                .map_err(|_| format_err(format!("point {s:?} is not an index")))?,
        ),
        Backend::RationalRotation { .. } => {
            let r = Ratio::<i64>::from_str(s).map_err(|_| format_err(format!("angle {s:?} is not num/den")))?;
            let f = r - r.floor();
            Point::Angle(f)
        }
        Backend::AperiodicOrbit { .. } => Point::Orbit(
            s.parse()
                .map_err(|_| format_err(format!("point {s:?} is not an orbit index")))?,
        ),
    };
    sys.check_point(&p)?;
    Ok(p)
}

pub fn point_from_json(sys: &DynSystem, v: &Value) -> Result<Point> {
    match v {
        Value::String(s) => parse_point_str(sys, s),
        Value::Number(n) => parse_point_str(sys, &n.to_string()),
        _ => Err(format_err("a point is an integer or a \"num/den\" string")),
    }
}

pub fn point_to_json(p: &Point) -> Value {
    match p {
        Point::Index(i) => json!(i),
        Point::Angle(r) => json!(format!("{}/{}", r.numer(), r.denom())),
        Point::Orbit(k) => json!(k),
    }
}

pub fn orbit_to_json(o: &Orbit) -> Value {
    match o {
        Orbit::Finite(pts) => Value::Array(pts.iter().map(point_to_json).collect()),
        Orbit::Infinite { base } => json!({"infinite_orbit_of": point_to_json(base)}),
    }
}

// ---- scalars ----

fn rational_from_json(v: &Value, what: &str) -> Result<BigRational> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                return Ok(BigRational::from_integer(BigInt::from(i)));
            }
            let f = n.as_f64().ok_or_else(|| format_err(format!("{what}: bad number")))?;
            BigRational::from_float(f).ok_or_else(|| format_err(format!("{what}: not finite")))
        }
        Value::String(s) => parse_rational(s).ok_or_else(|| format_err(format!("{what}: {s:?} is not a rational"))),
        _ => Err(format_err(format!("{what} must be a number or a rational string"))),
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n.trim().parse().ok()?, d))
        }
        None => match s.parse::<BigInt>() {
            Ok(i) => Some(BigRational::from_integer(i)),
            Err(_) => BigRational::from_float(s.parse::<f64>().ok()?),
        },
    }
}

pub fn scalar_from_json<S: Scalar>(v: &Value) -> Result<S> {
    let (re, im) = match v {
        Value::Array(parts) if parts.len() == 2 => (&parts[0], &parts[1]),
        Value::Array(_) => return Err(format_err("a complex number is [re, im]")),
        _ => (v, &Value::Null),
    };
    // Float fields read JSON numbers directly so that printed values parse
    // back to the same doubles.
    if !S::EXACT {
        if let (Some(a), Some(b)) = (re.as_f64(), im.as_f64().or(im.is_null().then_some(0.0))) {
            if let Some(z) = S::from_c64(C64::new(a, b)) {
                return Ok(z);
            }
        }
    }
    let im = if im.is_null() {
        BigRational::zero()
    } else {
        rational_from_json(im, "imaginary part")?
    };
    Ok(S::from_ratio(&rational_from_json(re, "real part")?, &im))
}

fn rational_to_json(r: &BigRational) -> Value {
    if r.is_integer() {
        json!(r.numer().to_string())
    } else {
        json!(format!("{}/{}", r.numer(), r.denom()))
    }
}

pub fn scalar_to_json<S: Scalar>(z: &S) -> Value {
    match z.exact_parts() {
        Some((re, im)) => json!([rational_to_json(&re), rational_to_json(&im)]),
        None => c64_to_json(z.to_c64()),
    }
}

pub fn c64_to_json(z: C64) -> Value {
    json!([z.re, z.im])
}

// ---- functions and elements ----

fn indexed_map<S: Scalar>(v: &Value, what: &str) -> Result<BTreeMap<i64, S>> {
    let mut out = BTreeMap::new();
    for (k, x) in as_object(v, what)? {
        out.insert(key_i64(k)?, scalar_from_json(x)?);
    }
    Ok(out)
}

pub fn function_from_json<S: Scalar>(sys: &DynSystem, v: &Value) -> Result<FunctionOnX<S>> {
    let f = if let Some(t) = v.get("table") {
        FunctionOnX::table(
            as_array(t, "table")?
                .iter()
                .map(scalar_from_json)
                .collect::<Result<Vec<S>>>()?,
        )
    } else if let Some(t) = v.get("trig") {
        FunctionOnX::trig(indexed_map::<S>(t, "trig")?)
    } else if let Some(t) = v.get("orbit_table") {
        let tail = match v.get("tail") {
            Some(x) => scalar_from_json(x)?,
            None => S::zero(),
        };
        FunctionOnX::orbit_table_with_tail(indexed_map::<S>(t, "orbit_table")?, tail)
    } else if let Some(c) = v.get("constant") {
        FunctionOnX::constant(sys, scalar_from_json(c)?)
    } else {
        return Err(format_err(
            "a function has one of the keys table, trig, orbit_table, constant",
        ));
    };
    f.check_backend(sys)?;
    Ok(f)
}

fn indexed_to_json<S: Scalar>(m: &BTreeMap<i64, S>) -> Value {
    Value::Object(m.iter().map(|(k, x)| (k.to_string(), scalar_to_json(x))).collect())
}

pub fn function_to_json<S: Scalar>(f: &FunctionOnX<S>) -> Value {
    match f {
        FunctionOnX::Table(v) => json!({"table": v.iter().map(scalar_to_json).collect::<Vec<_>>()}),
        FunctionOnX::Trig(c) => json!({"trig": indexed_to_json(c)}),
        FunctionOnX::Orbit { values, tail } => {
            let mut m = Map::new();
            m.insert("orbit_table".into(), indexed_to_json(values));
            if !tail.is_zero() {
                m.insert("tail".into(), scalar_to_json(tail));
            }
            Value::Object(m)
        }
    }
}

pub fn element_from_json<S: Scalar>(sys: &Arc<DynSystem>, v: &Value) -> Result<AlgebraElement<S>> {
    let coeffs = as_object(field(v, "coeffs")?, "coeffs")?;
    let mut terms = Vec::with_capacity(coeffs.len());
    for (k, f) in coeffs {
        let n = key_i64(k)?;
        let f = function_from_json(sys, f).map_err(|e| format_err(format!("coefficient {n}: {e}")))?;
        terms.push((n, f));
    }
    AlgebraElement::new(sys, terms)
}

pub fn parse_element<S: Scalar>(sys: &Arc<DynSystem>, text: &str) -> Result<AlgebraElement<S>> {
    element_from_json(sys, &parse_json(text)?)
}

pub fn element_to_json<S: Scalar>(a: &AlgebraElement<S>) -> Value {
    let coeffs: Map<String, Value> = a
        .coeffs()
        .map(|(n, f)| (n.to_string(), function_to_json(f)))
        .collect();
    json!({ "coeffs": coeffs })
}

pub fn matrix_to_json<S: Scalar>(m: &ComplexMatrix<S>) -> Value {
    Value::Array(
        m.rows()
            .iter()
            .map(|r| Value::Array(r.iter().map(scalar_to_json).collect()))
            .collect(),
    )
}

// ---- sequences ----

pub fn seq_vector_from_json<S: Scalar>(v: &Value) -> Result<SeqVector<S>> {
    Ok(SeqVector::new(indexed_map::<S>(v, "sequence vector")?))
}

pub fn seq_vector_to_json<S: Scalar>(v: &SeqVector<S>) -> Value {
    Value::Object(v.entries().map(|(k, x)| (k.to_string(), scalar_to_json(x))).collect())
}

// ---- structure space ----

pub fn tsubset_from_json(v: &Value) -> Result<TSubset> {
    if v.get("full").and_then(Value::as_bool) == Some(true) {
        return Ok(TSubset::full());
    }
    let mut arcs = Vec::new();
    if let Some(a) = v.get("arcs") {
        for arc in as_array(a, "arcs")? {
            let ends = as_array(arc, "arc")?;
            if ends.len() != 2 {
                return Err(format_err("an arc is [lo, hi]"));
            }
            arcs.push((as_f64(&ends[0], "arc end")?, as_f64(&ends[1], "arc end")?));
        }
    }
    let mut points = Vec::new();
    if let Some(p) = v.get("points") {
        for x in as_array(p, "points")? {
            points.push(as_f64(x, "point")?);
        }
    }
    TSubset::new(&arcs, &points)
}

pub fn tsubset_to_json(t: &TSubset) -> Value {
    if t.is_full() {
        return json!({"full": true});
    }
    json!({
        "arcs": t.arcs().iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(),
        "points": t.points(),
    })
}

pub fn sspace_subset_from_json(v: &Value) -> Result<SSpaceSubset> {
    let mut parts = Vec::new();
    for (k, t) in as_object(field(v, "orbits")?, "orbits")? {
        let o: usize = k
            .trim()
            .parse()
            .map_err(|_| format_err(format!("orbit key {k:?} is not an index")))?;
        parts.push((o, tsubset_from_json(t)?));
    }
    Ok(SSpaceSubset::new(parts))
}

pub fn sspace_subset_to_json(s: &SSpaceSubset) -> Value {
    let orbits: Map<String, Value> = s.parts().map(|(o, t)| (o.to_string(), tsubset_to_json(t))).collect();
    json!({ "orbits": orbits })
}

pub fn witness_to_json(w: &WienerWitness) -> Value {
    json!({
        "coeffs": Value::Object(w.coeffs.iter().map(|(k, c)| (k.to_string(), c64_to_json(*c))).collect()),
        "l1_norm": w.l1_norm,
        "sup_on_forbidden": w.sup_on_forbidden,
        "value_at_lambda0": c64_to_json(w.value_at_lambda0),
        "order": w.order,
        "tail_bound": w.tail_bound,
    })
}

pub fn description_to_json(d: &StructureDescription) -> Value {
    match d {
        StructureDescription::DisjointCircles { components } => json!({
            "components": components.len(),
            "description": d.summary(),
            "circles": components
                .iter()
                .map(|c| json!({"orbit": c.iter().map(point_to_json).collect::<Vec<_>>(), "kind": "circle"}))
                .collect::<Vec<_>>(),
        }),
        StructureDescription::Torus { p, q, chart } => json!({
            "components": 1,
            "description": "T × T",
            "rotation": {"p": p, "q": q},
            "orbit_chart": format!("z ↦ z^{q}"),
            "chart": chart
                .iter()
                .map(|r| json!({
                    "theta": point_to_json(&Point::Angle(r.theta)),
                    "lambda": r.lambda,
                    "image": [point_to_json(&Point::Angle(r.orbit_coordinate)), r.lambda],
                }))
                .collect::<Vec<_>>(),
        }),
    }
}

// ---- ideals ----

pub fn ideal_from_json<S: Scalar>(sys: &DynSystem, v: &Value) -> Result<PrimitiveIdealId<S>> {
    if let Some(x) = v.get("orbit_of") {
        let x = point_from_json(sys, x)?;
        let lambda = scalar_from_json::<S>(field(v, "lambda")?)?;
        PrimitiveIdealId::periodic(sys, &x, lambda)
    } else if let Some(c) = v.get("closure") {
        let pts = as_array(c, "closure")?
            .iter()
            .map(|p| point_from_json(sys, p))
            .collect::<Result<Vec<_>>>()?;
        PrimitiveIdealId::sampled(sys, pts)
    } else if let Some(x) = v.get("whole_orbit_of") {
        PrimitiveIdealId::whole_orbit(sys, &point_from_json(sys, x)?)
    } else {
        Err(format_err("an ideal has one of the keys orbit_of, closure, whole_orbit_of"))
    }
}

pub fn ideal_to_json<S: Scalar>(id: &PrimitiveIdealId<S>) -> Value {
    match id {
        PrimitiveIdealId::Periodic { orbit, lambda } => json!({
            "orbit_of": point_to_json(orbit.base()),
            "orbit": orbit_to_json(orbit),
            "lambda": scalar_to_json(lambda),
        }),
        PrimitiveIdealId::Aperiodic {
            closure: OrbitClosure::Sampled(pts),
        } => json!({"closure": pts.iter().map(point_to_json).collect::<Vec<_>>()}),
        PrimitiveIdealId::Aperiodic {
            closure: OrbitClosure::WholeOrbit(x),
        } => json!({"whole_orbit_of": point_to_json(x)}),
    }
}

// ---- validation ----

/// A problem found in an input file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: Option<usize>,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// First line mentioning `needle`, 1-based.
fn locate(text: &str, needle: &str) -> Option<usize> {
    text.lines().position(|l| l.contains(needle)).map(|i| i + 1)
}

fn diag(text: &str, needle: &str, message: impl Into<String>) -> Diagnostic {
    Diagnostic {
        line: locate(text, needle),
        message: message.into(),
    }
}

/// Checks a system, element, circle subset, structure-space subset, ideal or
/// sequence file. The kind is recognised from its keys; elements and ideals
/// are checked against `sys` when one is given. An empty list means the
/// file is well formed.
pub fn validate_formats(text: &str, sys: Option<&Arc<DynSystem>>) -> Vec<Diagnostic> {
    let v = match serde_json::from_str::<Value>(text) {
        Ok(v) => v,
        Err(e) => {
            return vec![Diagnostic {
                line: Some(e.line()),
                message: e.to_string(),
            }]
        }
    };
    let Some(obj) = v.as_object() else {
        return vec![diag(text, "", "the top level must be an object")];
    };
    let mut out = Vec::new();
    if obj.contains_key("backend") {
        if let Err(e) = system_from_json(&v) {
            let needle = ["\"perm\"", "\"cycles\"", "\"q\"", "\"window\"", "\"backend\""]
                .into_iter()
                .find(|k| text.contains(k))
                .unwrap_or("");
            out.push(diag(text, needle, e.to_string()));
        }
    } else if obj.contains_key("coeffs") {
        for (k, f) in as_object(&v["coeffs"], "coeffs").into_iter().flatten() {
            let needle = format!("\"{k}\"");
            if key_i64(k).is_err() {
                out.push(diag(text, &needle, format!("exponent {k:?} is not an integer")));
                continue;
            }
            let res = match sys {
                Some(s) => function_from_json::<C64>(s, f).map(|_| ()),
                None => check_function_shape(f),
            };
            if let Err(e) = res {
                out.push(diag(text, &needle, format!("coefficient {k}: {e}")));
            }
        }
    } else if obj.contains_key("orbits") {
        if let Err(e) = sspace_subset_from_json(&v) {
            out.push(diag(text, "\"orbits\"", e.to_string()));
        } else if let (Some(s), Ok(sub)) = (sys, sspace_subset_from_json(&v)) {
            if let Err(e) = sub.validate(s) {
                out.push(diag(text, "\"orbits\"", e.to_string()));
            }
        }
    } else if obj.contains_key("arcs") || obj.contains_key("points") || obj.contains_key("full") {
        if let Err(e) = tsubset_from_json(&v) {
            out.push(diag(text, "\"arcs\"", e.to_string()));
        }
    } else if obj.contains_key("orbit_of") || obj.contains_key("closure") || obj.contains_key("whole_orbit_of") {
        if let Some(l) = obj.get("lambda") {
            match scalar_from_json::<C64>(l) {
                Ok(z) if (z.norm() - 1.0).abs() > 1e-12 => {
                    out.push(diag(text, "\"lambda\"", format!("|lambda| = {} is not 1", z.norm())))
                }
                Err(e) => out.push(diag(text, "\"lambda\"", e.to_string())),
                _ => {}
            }
        } else if obj.contains_key("orbit_of") {
            out.push(diag(text, "\"orbit_of\"", "missing field \"lambda\""));
        }
        if let (Some(s), true) = (sys, out.is_empty()) {
            if let Err(e) = ideal_from_json::<C64>(s, &v) {
                out.push(diag(text, "", e.to_string()));
            }
        }
    } else if obj.keys().all(|k| key_i64(k).is_ok()) {
        if let Err(e) = seq_vector_from_json::<C64>(&v) {
            out.push(diag(text, "", e.to_string()));
        }
    } else {
        out.push(diag(text, "", "unrecognised file: no known top-level key"));
    }
    out
}

fn check_function_shape(f: &Value) -> Result<()> {
    if let Some(t) = f.get("table") {
        for x in as_array(t, "table")? {
            scalar_from_json::<C64>(x)?;
        }
        Ok(())
    } else if let Some(t) = f.get("trig").or_else(|| f.get("orbit_table")) {
        indexed_map::<C64>(t, "coefficient map").map(|_| ())
    } else if let Some(c) = f.get("constant") {
        scalar_from_json::<C64>(c).map(|_| ())
    } else {
        Err(format_err("a function has one of the keys table, trig, orbit_table, constant"))
    }
}
