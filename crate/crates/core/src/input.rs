//! Textual and JSON inputs: groups, subgroups and decomposition families.
//!
//! A group is a catalog spec such as `dihedral(4)`, an inline JSON object
//! (`{"cayley": [[…]]}` or `{"permutations": […], "degree": d}`), or `@path`
//! naming a file with one of those. Permutations are image lists on `1..=d`
//! or cycle strings like `"(1,2,3)"`.
//!
//! A subgroup is `trivial`, `whole`, `derived`, a JSON object
//! (`{"members": […]}` or `{"generators": […]}`), or generator tokens
//! separated by `;`. A token is an element label, a cycle string (for
//! permutation groups) or `#i` for element index `i`; in JSON, integers are
//! element indices and strings are tokens.

use std::sync::Arc;

use serde_json::Value;

use crate::cohomology::Family;
use crate::error::{Error, Result};
use crate::group::{
    cyclic_subgroups, derived_subgroup, maximal_cyclic_subgroups, parse_cycles, parse_group_spec, FiniteGroup,
    Permutation, Subgroup, DEFAULT_ORDER_CAP,
};

/// How a group was described, for reports and cache keys.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupSource {
    Catalog(String),
    Cayley,
    Permutations(Vec<String>),
}

impl GroupSource {
    /// Family tag: the catalog family, or `custom`.
    pub fn family(&self) -> String {
        match self {
            GroupSource::Catalog(s) => parse_group_spec(s).map(|g| g.family().to_string()).unwrap_or_else(|_| "custom".into()),
            _ => "custom".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ParsedGroup {
    pub group: Arc<FiniteGroup>,
    pub source: GroupSource,
}

fn read_source(s: &str) -> Result<String> {
    match s.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {path}: {e}"))),
        None => Ok(s.to_string()),
    }
}

fn json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))
}

pub fn parse_group(s: &str) -> Result<ParsedGroup> {
    parse_group_with_cap(s, DEFAULT_ORDER_CAP)
}

pub fn parse_group_with_cap(s: &str, cap: usize) -> Result<ParsedGroup> {
    let text = read_source(s)?;
    let text = text.trim();
    if !text.starts_with('{') {
        let spec = parse_group_spec(text)?;
        let group = spec.build_with_cap(cap)?;
        return Ok(ParsedGroup { group: Arc::new(group), source: GroupSource::Catalog(spec.to_string()) });
    }
    let v = json(text)?;
    let obj = v.as_object().ok_or_else(|| Error::Parse("group JSON must be an object".into()))?;
    if let Some(table) = obj.get("cayley") {
        let rows: Vec<Vec<usize>> =
            serde_json::from_value(table.clone()).map_err(|e| Error::Parse(format!("bad Cayley table: {e}")))?;
        if rows.len() > cap {
            return Err(Error::OrderCapExceeded { what: "Cayley table".into(), order: rows.len(), cap });
        }
        let mut g = FiniteGroup::from_cayley(rows)?;
        if let Some(labels) = obj.get("labels") {
            let labels: Vec<String> =
                serde_json::from_value(labels.clone()).map_err(|e| Error::Parse(format!("bad labels: {e}")))?;
            if labels.len() != g.order() {
                return Err(Error::Parse("label count differs from the group order".into()));
            }
            g = g.with_labels(labels);
        }
        return Ok(ParsedGroup { group: Arc::new(g), source: GroupSource::Cayley });
    }
    if let Some(perms) = obj.get("permutations") {
        let degree = obj
            .get("degree")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("permutation input needs an integer \"degree\"".into()))? as usize;
        let list = perms.as_array().ok_or_else(|| Error::Parse("\"permutations\" must be a list".into()))?;
        let gens = list.iter().map(|p| permutation_from_json(p, degree)).collect::<Result<Vec<_>>>()?;
        let described: Vec<String> = gens.iter().map(|p| p.to_string()).collect();
        let g = FiniteGroup::from_permutations(&gens, degree, cap)?
            .with_descriptor(format!("<{}> on {degree} points", described.join(", ")));
        return Ok(ParsedGroup { group: Arc::new(g), source: GroupSource::Permutations(described) });
    }
    Err(Error::Parse("group JSON needs \"cayley\" or \"permutations\"".into()))
}

fn permutation_from_json(v: &Value, degree: usize) -> Result<Permutation> {
    match v {
        Value::String(s) => parse_cycles(s, degree),
        Value::Array(_) => {
            let images: Vec<usize> =
                serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("bad permutation: {e}")))?;
            if images.len() != degree {
                return Err(Error::Parse(format!("permutation {images:?} does not have {degree} images")));
            }
            Permutation::from_one_based(&images)
        }
        _ => Err(Error::Parse(format!("bad permutation {v}"))),
    }
}

/// Resolves one generator token against `g`.
pub fn parse_element(g: &FiniteGroup, token: &str) -> Result<usize> {
    let t = token.trim();
    if let Some(i) = g.find_label(t) {
        return Ok(i);
    }
    if let Some(idx) = t.strip_prefix('#') {
        let i: usize = idx.parse().map_err(|_| Error::Parse(format!("bad element index {t:?}")))?;
        if i >= g.order() {
            return Err(Error::Parse(format!("element index {i} out of range 0..{}", g.order())));
        }
        return Ok(i);
    }
    if t.starts_with('(') {
        if let Some(perms) = g.permutations() {
            let p = parse_cycles(t, perms[0].degree())?;
            return g.find_permutation(&p).ok_or_else(|| Error::Parse(format!("{t} is not in the group")));
        }
    }
    Err(Error::Parse(format!("unknown element {t:?}")))
}

fn element_from_json(g: &FiniteGroup, v: &Value) -> Result<usize> {
    match v {
        Value::Number(n) => {
            let i = n.as_u64().ok_or_else(|| Error::Parse(format!("bad element index {n}")))? as usize;
            parse_element(g, &format!("#{i}"))
        }
        Value::String(s) => parse_element(g, s),
        _ => Err(Error::Parse(format!("bad element {v}"))),
    }
}

pub fn parse_subgroup(g: &Arc<FiniteGroup>, s: &str) -> Result<Subgroup> {
    let text = read_source(s)?;
    let text = text.trim();
    match text {
        "trivial" | "1" => return Ok(Subgroup::trivial(g)),
        "whole" | "G" => return Ok(Subgroup::whole(g)),
        "derived" => return Ok(derived_subgroup(g)),
        _ => {}
    }
    if text.starts_with('{') {
        return subgroup_from_json(g, &json(text)?);
    }
    let gens = text
        .split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|t| parse_element(g, t))
        .collect::<Result<Vec<_>>>()?;
    Subgroup::generated(g, &gens)
}

pub fn subgroup_from_json(g: &Arc<FiniteGroup>, v: &Value) -> Result<Subgroup> {
    let obj = v.as_object().ok_or_else(|| Error::Parse("subgroup JSON must be an object".into()))?;
    let list = |key: &str| -> Result<Option<Vec<usize>>> {
        match obj.get(key) {
            None => Ok(None),
            Some(Value::Array(items)) => items.iter().map(|x| element_from_json(g, x)).collect::<Result<Vec<_>>>().map(Some),
            Some(_) => Err(Error::Parse(format!("\"{key}\" must be a list"))),
        }
    };
    if let Some(members) = list("members")? {
        return Subgroup::from_members(g, &members);
    }
    if let Some(gens) = list("generators")? {
        return Subgroup::generated(g, &gens);
    }
    Err(Error::Parse("subgroup JSON needs \"members\" or \"generators\"".into()))
}

/// Decomposition family before it is resolved against a group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilySpec {
    Cyclic,
    AllCyclic,
    /// JSON list of subgroup descriptions.
    Explicit(Value),
}

impl FamilySpec {
    pub fn parse(s: &str) -> Result<FamilySpec> {
        match s.trim() {
            "cyclic" => Ok(FamilySpec::Cyclic),
            "all-cyclic" => Ok(FamilySpec::AllCyclic),
            other => {
                let body = other
                    .strip_prefix("explicit:")
                    .ok_or_else(|| Error::Parse(format!("unknown family {other:?}; expected cyclic, all-cyclic or explicit:<json>")))?;
                let v = json(&read_source(body)?)?;
                if !v.is_array() {
                    return Err(Error::Parse("explicit family must be a JSON list".into()));
                }
                Ok(FamilySpec::Explicit(v))
            }
        }
    }

    pub fn resolve(&self, g: &Arc<FiniteGroup>) -> Result<(Family, Vec<Subgroup>)> {
        match self {
            FamilySpec::Cyclic => Ok((Family::MaximalCyclic, maximal_cyclic_subgroups(g))),
            FamilySpec::AllCyclic => Ok((Family::AllCyclic, cyclic_subgroups(g))),
            FamilySpec::Explicit(v) => {
                let items = v.as_array().expect("checked on parse");
                let subs = items
                    .iter()
                    .map(|x| match x {
                        Value::String(s) => parse_subgroup(g, s),
                        other => subgroup_from_json(g, other),
                    })
                    .collect::<Result<Vec<_>>>()?;
                if subs.is_empty() {
                    return Err(Error::Parse("the decomposition family is empty".into()));
                }
                Ok((Family::Explicit(subs.clone()), subs))
            }
        }
    }

    pub fn tag(&self) -> String {
        match self {
            FamilySpec::Cyclic => "cyclic".into(),
            FamilySpec::AllCyclic => "all-cyclic".into(),
            FamilySpec::Explicit(v) => format!("explicit:{v}"),
        }
    }
}
