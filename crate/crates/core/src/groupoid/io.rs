//! JSON groupoid documents.
//!
//! Either the explicit table form
//!
//! ```json
//! {"objects": ["0", "1"],
//!  "arrows": [{"id": "a", "src": "0", "rng": "1"}, ...],
//!  "comp": [["a", "b", "c"], ...],
//!  "inv": [["a", "a_inv"], ...],
//!  "units": {"0": "e0", ...}}
//! ```
//!
//! or a builder shorthand such as `{"kind": "transitive", "n": 3}`. Both
//! forms accept an optional `"slices": {"A": ["arrow", ...]}` map of named
//! slices used by expressions.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use super::{Arrow, ArrowId, FiniteGroupoid, ObjectId};
use crate::error::{Error, Result};

/// A parsed groupoid file: the groupoid plus any named slices.
#[derive(Clone, Debug)]
pub struct GroupoidDocument {
    pub groupoid: FiniteGroupoid,
    pub slices: BTreeMap<String, Vec<String>>,
}

fn fmt_err(m: impl Into<String>) -> Error {
    Error::Format(m.into())
}

/// Ids may be written as strings or numbers.
fn id_string(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(fmt_err(format!("expected an id, found {other}"))),
    }
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| fmt_err(format!("missing field `{key}`")))
}

fn usize_field(obj: &Map<String, Value>, key: &str) -> Result<usize> {
    field(obj, key)?
        .as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| fmt_err(format!("`{key}` must be a nonnegative integer")))
}

pub fn parse_document(text: &str) -> Result<GroupoidDocument> {
    let v: Value = serde_json::from_str(text)?;
    document_from_value(&v)
}

pub fn parse_groupoid(text: &str) -> Result<FiniteGroupoid> {
    Ok(parse_document(text)?.groupoid)
}

pub fn document_from_value(v: &Value) -> Result<GroupoidDocument> {
    let obj = v.as_object().ok_or_else(|| fmt_err("groupoid must be a JSON object"))?;
    let groupoid = groupoid_from_value(v)?;
    let mut slices = BTreeMap::new();
    if let Some(s) = obj.get("slices") {
        let s = s.as_object().ok_or_else(|| fmt_err("`slices` must be an object"))?;
        for (name, arrows) in s {
            let arrows = arrows
                .as_array()
                .ok_or_else(|| fmt_err("slice must be a list of arrow ids"))?
                .iter()
                .map(id_string)
                .collect::<Result<Vec<_>>>()?;
            slices.insert(name.clone(), arrows);
        }
    }
    Ok(GroupoidDocument { groupoid, slices })
}

pub fn groupoid_from_value(v: &Value) -> Result<FiniteGroupoid> {
    let obj = v.as_object().ok_or_else(|| fmt_err("groupoid must be a JSON object"))?;
    if let Some(kind) = obj.get("kind") {
        let kind = kind.as_str().ok_or_else(|| fmt_err("`kind` must be a string"))?;
        return shorthand(kind, obj);
    }
    explicit(obj)
}

fn shorthand(kind: &str, obj: &Map<String, Value>) -> Result<FiniteGroupoid> {
    match kind {
        "transitive" => {
            let n = usize_field(obj, "n")?;
            if n == 0 {
                return Err(Error::InvalidParams("transitive groupoid needs n >= 1".into()));
            }
            Ok(FiniteGroupoid::transitive(n))
        }
        "objects_only" => {
            let n = usize_field(obj, "n")?;
            if n == 0 {
                return Err(Error::InvalidParams("needs n >= 1".into()));
            }
            Ok(FiniteGroupoid::objects_only(n))
        }
        "cyclic" => {
            let n = usize_field(obj, "n")?;
            if n == 0 {
                return Err(Error::InvalidParams("cyclic group needs n >= 1".into()));
            }
            Ok(FiniteGroupoid::cyclic_group(n))
        }
        "finite_group" | "group" => {
            let table: Vec<Vec<usize>> = serde_json::from_value(field(obj, "table")?.clone())?;
            let labels = match obj.get("labels") {
                Some(l) => Some(l.as_array().ok_or_else(|| fmt_err("labels must be a list"))?
                    .iter()
                    .map(id_string)
                    .collect::<Result<Vec<_>>>()?),
                None => None,
            };
            FiniteGroupoid::finite_group(&table, labels)
        }
        "disjoint_union" => {
            let parts = field(obj, "parts")?
                .as_array()
                .ok_or_else(|| fmt_err("`parts` must be a list"))?
                .iter()
                .map(groupoid_from_value)
                .collect::<Result<Vec<_>>>()?;
            if parts.is_empty() {
                return Err(Error::InvalidParams("disjoint union of nothing".into()));
            }
            Ok(FiniteGroupoid::disjoint_union(&parts))
        }
        "restriction" => {
            let g = groupoid_from_value(field(obj, "groupoid")?)?;
            let objects = field(obj, "objects")?
                .as_array()
                .ok_or_else(|| fmt_err("`objects` must be a list"))?
                .iter()
                .map(|o| g.find_object(&id_string(o)?))
                .collect::<Result<Vec<_>>>()?;
            g.restrict(&objects)
        }
        "amplify" => {
            let g = groupoid_from_value(field(obj, "groupoid")?)?;
            let n = usize_field(obj, "n")?;
            if n == 0 {
                return Err(Error::InvalidParams("amplification needs n >= 1".into()));
            }
            Ok(g.amplify(n))
        }
        other => Err(fmt_err(format!("unknown groupoid kind `{other}`"))),
    }
}

fn explicit(obj: &Map<String, Value>) -> Result<FiniteGroupoid> {
    let objects = field(obj, "objects")?
        .as_array()
        .ok_or_else(|| fmt_err("`objects` must be a list"))?
        .iter()
        .map(id_string)
        .collect::<Result<Vec<_>>>()?;
    let obj_index: BTreeMap<&str, usize> = objects.iter().enumerate().map(|(i, o)| (o.as_str(), i)).collect();
    if obj_index.len() != objects.len() {
        return Err(fmt_err("duplicate object id"));
    }
    let lookup_obj = |v: &Value| -> Result<ObjectId> {
        let s = id_string(v)?;
        obj_index
            .get(s.as_str())
            .map(|&i| ObjectId(i))
            .ok_or(Error::Unknown { kind: "object", name: s })
    };

    let mut arrows = Vec::new();
    for a in field(obj, "arrows")?.as_array().ok_or_else(|| fmt_err("`arrows` must be a list"))? {
        let a = a.as_object().ok_or_else(|| fmt_err("arrow must be an object"))?;
        arrows.push(Arrow {
            label: id_string(field(a, "id")?)?,
            src: lookup_obj(field(a, "src")?)?,
            rng: lookup_obj(field(a, "rng")?)?,
        });
    }
    let arr_index: BTreeMap<String, usize> = arrows.iter().enumerate().map(|(i, a)| (a.label.clone(), i)).collect();
    if arr_index.len() != arrows.len() {
        return Err(fmt_err("duplicate arrow id"));
    }
    let lookup_arr = |v: &Value| -> Result<ArrowId> {
        let s = id_string(v)?;
        arr_index.get(&s).map(|&i| ArrowId(i)).ok_or(Error::Unknown { kind: "arrow", name: s })
    };

    let tuple = |v: &Value, n: usize| -> Result<Vec<ArrowId>> {
        let items = v.as_array().filter(|t| t.len() == n).ok_or_else(|| fmt_err(format!("expected a {n}-tuple")))?;
        items.iter().map(lookup_arr).collect()
    };
    let comp = field(obj, "comp")?
        .as_array()
        .ok_or_else(|| fmt_err("`comp` must be a list"))?
        .iter()
        .map(|t| tuple(t, 3).map(|t| (t[0], t[1], t[2])))
        .collect::<Result<Vec<_>>>()?;

    let mut inv = vec![None; arrows.len()];
    for t in field(obj, "inv")?.as_array().ok_or_else(|| fmt_err("`inv` must be a list"))? {
        let t = tuple(t, 2)?;
        inv[t[0].0] = Some(t[1]);
    }
    let inv = inv
        .into_iter()
        .enumerate()
        .map(|(i, a)| a.ok_or_else(|| fmt_err(format!("arrow {} has no inverse entry", arrows[i].label))))
        .collect::<Result<Vec<_>>>()?;

    let units_obj = field(obj, "units")?.as_object().ok_or_else(|| fmt_err("`units` must be an object"))?;
    let mut units = vec![None; objects.len()];
    for (x, u) in units_obj {
        let x = lookup_obj(&Value::String(x.clone()))?;
        units[x.0] = Some(lookup_arr(u)?);
    }
    let units = units
        .into_iter()
        .enumerate()
        .map(|(i, u)| u.ok_or_else(|| fmt_err(format!("object {} has no unit", objects[i]))))
        .collect::<Result<Vec<_>>>()?;

    FiniteGroupoid::from_parts(objects, arrows, comp, inv, units)
}

/// Explicit table form of a groupoid.
pub fn to_value(g: &FiniteGroupoid) -> Value {
    let mut comp: Vec<_> = g.composition_entries().collect();
    comp.sort();
    let units: Map<String, Value> = g
        .objects()
        .map(|x| (g.object_label(x).to_string(), Value::String(g.arrow_label(g.unit(x)).to_string())))
        .collect();
    json!({
        "objects": g.objects().map(|x| g.object_label(x)).collect::<Vec<_>>(),
        "arrows": g.arrows().map(|a| json!({
            "id": g.arrow_label(a),
            "src": g.object_label(g.src(a)),
            "rng": g.object_label(g.rng(a)),
        })).collect::<Vec<_>>(),
        "comp": comp.iter().map(|&(l, r, c)| json!([g.arrow_label(l), g.arrow_label(r), g.arrow_label(c)])).collect::<Vec<_>>(),
        "inv": g.arrows().map(|a| json!([g.arrow_label(a), g.arrow_label(g.inverse(a))])).collect::<Vec<_>>(),
        "units": units,
    })
}
