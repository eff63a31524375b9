//! On-disk model formats and assignment-text parsing.
//!
//! Models are single JSON documents. An NSEM file has the keys
//!
//! ```json
//! {
//!   "exogenous":  { "U": [0, 1] },
//!   "endogenous": { "X": [0, 1], "Y": [0, 1] },
//!   "edges":      [ ["Y", "X"] ],
//!   "equations": {
//!     "X": [ { "when": { "Y": 1 }, "values": [0, 1] },
//!            { "when": "default",  "values": [0] } ],
//!     "Y": [ { "when": "default",  "values": [0, 1] } ]
//!   }
//! }
//! ```
//!
//! Ranges list values in their declared (canonical) order; values are bare
//! integers or strings. Each equation row keys a full parent assignment, or
//! `"default"`, which expands to every parent configuration not covered by an
//! explicit row at load time. Probabilistic models replace `equations` with
//! `cpt`, whose rows carry a distribution instead of a value set:
//!
//! ```json
//! "cpt": {
//!   "H": [ { "when": { "T": 1 }, "dist": [ { "value": 1, "prob": "4/5" },
//!                                           { "value": 0, "prob": "1/5" } ] },
//!          { "when": "default",  "dist": [ { "value": 0, "prob": 1 } ] } ]
//! }
//! ```
//!
//! A `prob` is a `"a/b"` fraction string, a decimal string, or a JSON number;
//! strings are parsed exactly and are the canonical output form. Values of a
//! variable's range missing from a `dist` get probability zero. A causal
//! Bayesian network is a probabilistic model file with no exogenous variables.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::graph::CausalGraph;
use crate::model::{Model, ValidationReport, ValueSet, Violation, World};
use crate::parse::parse_rational_literal;
use crate::prob::{Cbn, Distribution, PModel, Rational};
use crate::signature::{mixed_radix, Signature, Value, VarId, VarKind};

// ---------------------------------------------------------------------------
// File structures
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub exogenous: BTreeMap<String, Vec<Value>>,
    pub endogenous: BTreeMap<String, Vec<Value>>,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
    pub equations: BTreeMap<String, Vec<EquationRow>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquationRow {
    pub when: When,
    pub values: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum When {
    /// The literal string `"default"`.
    Tag(String),
    /// A full assignment of the child's parents.
    Assign(BTreeMap<String, Value>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PModelFile {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub exogenous: BTreeMap<String, Vec<Value>>,
    pub endogenous: BTreeMap<String, Vec<Value>>,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
    pub cpt: BTreeMap<String, Vec<CptRow>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CptRow {
    pub when: When,
    pub dist: Vec<CptEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CptEntry {
    pub value: Value,
    /// String (exact) or JSON number.
    pub prob: serde_json::Value,
}

// ---------------------------------------------------------------------------
// Loading
// ---------------------------------------------------------------------------

fn signature_from_maps(
    exogenous: &BTreeMap<String, Vec<Value>>,
    endogenous: &BTreeMap<String, Vec<Value>>,
) -> Result<Arc<Signature>, ValidationReport> {
    let mut vars: Vec<(String, VarKind, Vec<Value>)> = Vec::new();
    for (name, range) in exogenous {
        vars.push((name.clone(), VarKind::Exogenous, range.clone()));
    }
    for (name, range) in endogenous {
        vars.push((name.clone(), VarKind::Endogenous, range.clone()));
    }
    Signature::new(vars)
}

fn resolve_edges(
    sig: &Signature,
    edges: &[(String, String)],
    report: &mut ValidationReport,
) -> CausalGraph {
    let mut resolved = Vec::new();
    for (from, to) in edges {
        match (sig.lookup(from), sig.lookup(to)) {
            (Some(a), Some(b)) => resolved.push((a, b)),
            (None, _) => report.push(Violation::UnknownVariable {
                name: from.clone(),
                place: "edges".to_string(),
            }),
            (_, None) => report.push(Violation::UnknownVariable {
                name: to.clone(),
                place: "edges".to_string(),
            }),
        }
    }
    CausalGraph::new(sig.len(), &resolved)
}

fn describe_key(sig: &Signature, parents: &[VarId], key: &[usize]) -> String {
    if parents.is_empty() {
        return "()".to_string();
    }
    parents
        .iter()
        .zip(key)
        .map(|(&p, &v)| format!("{}={}", sig.name(p), sig.value(p, v as u32)))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Expands `when` rows over the dense parent-configuration space, applying
/// one optional `"default"` row to every slot without an explicit row.
fn expand_rows<T: Clone>(
    sig: &Signature,
    child: VarId,
    parents: &[VarId],
    rows: &[(When, T)],
    report: &mut ValidationReport,
) -> Option<Vec<T>> {
    let child_name = sig.name(child).to_string();
    let dims: Vec<usize> = parents.iter().map(|&p| sig.range_len(p)).collect();
    let total: usize = dims.iter().product();
    let mut dense: Vec<Option<T>> = vec![None; total];
    let mut fallback: Option<T> = None;
    let mut bad = false;

    for (when, payload) in rows {
        match when {
            When::Tag(tag) if tag == "default" => {
                if fallback.is_some() {
                    report.push(Violation::DuplicateRow {
                        child: child_name.clone(),
                        row: "default".to_string(),
                    });
                    bad = true;
                } else {
                    fallback = Some(payload.clone());
                }
            }
            When::Tag(tag) => {
                report.push(Violation::BadWhenKey {
                    child: child_name.clone(),
                    detail: format!("`{tag}` is not a parent assignment or \"default\""),
                });
                bad = true;
            }
            When::Assign(map) => {
                let mut key = vec![0usize; parents.len()];
                let mut ok = true;
                for (name, value) in map {
                    let Some(var) = sig.lookup(name) else {
                        report.push(Violation::BadWhenKey {
                            child: child_name.clone(),
                            detail: format!("unknown variable `{name}`"),
                        });
                        ok = false;
                        continue;
                    };
                    let Some(pos) = parents.iter().position(|&p| p == var) else {
                        report.push(Violation::BadWhenKey {
                            child: child_name.clone(),
                            detail: format!("`{name}` is not a parent of `{child_name}`"),
                        });
                        ok = false;
                        continue;
                    };
                    match sig.value_index(var, value) {
                        Some(ix) => key[pos] = ix as usize,
                        None => {
                            report.push(Violation::BadWhenKey {
                                child: child_name.clone(),
                                detail: format!("value {value} out of range for `{name}`"),
                            });
                            ok = false;
                        }
                    }
                }
                if map.len() != parents.len() {
                    let missing: Vec<&str> = parents
                        .iter()
                        .filter(|&&p| !map.contains_key(sig.name(p)))
                        .map(|&p| sig.name(p))
                        .collect();
                    if !missing.is_empty() {
                        report.push(Violation::BadWhenKey {
                            child: child_name.clone(),
                            detail: format!("row must assign every parent; missing {missing:?}"),
                        });
                        ok = false;
                    }
                }
                if !ok {
                    bad = true;
                    continue;
                }
                let mut ix = 0;
                for (pos, &k) in key.iter().enumerate() {
                    ix = ix * dims[pos] + k;
                }
                if dense[ix].is_some() {
                    report.push(Violation::DuplicateRow {
                        child: child_name.clone(),
                        row: describe_key(sig, parents, &key),
                    });
                    bad = true;
                } else {
                    dense[ix] = Some(payload.clone());
                }
            }
        }
    }

    for (ix, slot) in dense.iter_mut().enumerate() {
        if slot.is_none() {
            match &fallback {
                Some(payload) => *slot = Some(payload.clone()),
                None => {
                    let key: Vec<usize> = {
                        let mut key = vec![0usize; dims.len()];
                        let mut rest = ix;
                        for pos in (0..dims.len()).rev() {
                            key[pos] = rest % dims[pos];
                            rest /= dims[pos];
                        }
                        key
                    };
                    report.push(Violation::MissingRow {
                        child: child_name.clone(),
                        row: describe_key(sig, parents, &key),
                    });
                    bad = true;
                }
            }
        }
    }

    if bad {
        None
    } else {
        Some(dense.into_iter().map(Option::unwrap).collect())
    }
}

/// Compiles a model file, reporting every violation found.
pub fn compile_model(file: &ModelFile) -> Result<Model, ValidationReport> {
    let sig = signature_from_maps(&file.exogenous, &file.endogenous)?;
    let mut report = ValidationReport::default();
    let graph = resolve_edges(&sig, &file.edges, &mut report);
    if let Err(cycle) = graph.topological_order() {
        report.push(Violation::CyclicGraph {
            path: cycle.iter().map(|&v| sig.name(v).to_string()).collect(),
        });
    }

    let mut equations: Vec<(VarId, Vec<ValueSet>)> = Vec::new();
    for (child_name, rows) in &file.equations {
        let Some(child) = sig.lookup(child_name) else {
            report.push(Violation::UnknownVariable {
                name: child_name.clone(),
                place: "equations".to_string(),
            });
            continue;
        };
        if sig.kind(child) == VarKind::Exogenous {
            report.push(Violation::EquationForExogenous { var: child_name.clone() });
            continue;
        }
        let parents = graph.parents(child).to_vec();
        let keyed: Vec<(When, Vec<Value>)> =
            rows.iter().map(|r| (r.when.clone(), r.values.clone())).collect();
        let Some(dense) = expand_rows(&sig, child, &parents, &keyed, &mut report) else {
            // rows did not expand; still check the values as written
            for row in rows {
                for v in &row.values {
                    if sig.value_index(child, v).is_none() {
                        report.push(Violation::ValueOutOfRange {
                            child: child_name.clone(),
                            value: v.clone(),
                            row: "(as written)".to_string(),
                        });
                    }
                }
            }
            continue;
        };
        let mut sets = Vec::with_capacity(dense.len());
        let mut ok = true;
        for (ix, values) in dense.iter().enumerate() {
            let mut ixs = Vec::with_capacity(values.len());
            for v in values {
                match sig.value_index(child, v) {
                    Some(i) => ixs.push(i),
                    None => {
                        report.push(Violation::ValueOutOfRange {
                            child: child_name.clone(),
                            value: v.clone(),
                            row: describe_key(
                                &sig,
                                &parents,
                                &key_of(ix, &parents, &sig),
                            ),
                        });
                        ok = false;
                    }
                }
            }
            sets.push(ValueSet::new(ixs));
        }
        if ok {
            equations.push((child, sets));
        }
    }

    report.clone().into_result()?;
    Model::from_parts(sig, graph, equations)
}

fn key_of(ix: usize, parents: &[VarId], sig: &Signature) -> Vec<usize> {
    let dims: Vec<usize> = parents.iter().map(|&p| sig.range_len(p)).collect();
    let mut key = vec![0usize; dims.len()];
    let mut rest = ix;
    for pos in (0..dims.len()).rev() {
        key[pos] = rest % dims[pos];
        rest /= dims[pos];
    }
    key
}

/// Validation as a report: empty means well-formed.
pub fn validate_model_file(file: &ModelFile) -> ValidationReport {
    match compile_model(file) {
        Ok(_) => ValidationReport::default(),
        Err(report) => report,
    }
}

pub fn compile_pmodel(file: &PModelFile) -> Result<PModel, ValidationReport> {
    let sig = signature_from_maps(&file.exogenous, &file.endogenous)?;
    let mut report = ValidationReport::default();
    let graph = resolve_edges(&sig, &file.edges, &mut report);
    if let Err(cycle) = graph.topological_order() {
        report.push(Violation::CyclicGraph {
            path: cycle.iter().map(|&v| sig.name(v).to_string()).collect(),
        });
    }

    let mut tables: Vec<(VarId, Vec<Distribution>)> = Vec::new();
    for (name, rows) in &file.cpt {
        let Some(var) = sig.lookup(name) else {
            report.push(Violation::UnknownVariable {
                name: name.clone(),
                place: "cpt".to_string(),
            });
            continue;
        };
        let parents = graph.parents(var).to_vec();
        let keyed: Vec<(When, Vec<CptEntry>)> =
            rows.iter().map(|r| (r.when.clone(), r.dist.clone())).collect();
        let Some(dense) = expand_rows(&sig, var, &parents, &keyed, &mut report) else {
            for row in rows {
                for entry in &row.dist {
                    if sig.value_index(var, &entry.value).is_none() {
                        report.push(Violation::ValueOutOfRange {
                            child: name.clone(),
                            value: entry.value.clone(),
                            row: "(as written)".to_string(),
                        });
                    }
                    if prob_literal(&entry.prob).is_none() {
                        report.push(Violation::BadProbability {
                            var: name.clone(),
                            row: "(as written)".to_string(),
                            text: entry.prob.to_string(),
                        });
                    }
                }
            }
            continue;
        };
        let mut dists = Vec::with_capacity(dense.len());
        let mut ok = true;
        for (ix, entries) in dense.iter().enumerate() {
            let row_desc = || describe_key(&sig, &parents, &key_of(ix, &parents, &sig));
            let mut probs = vec![Rational::from_integer(0.into()); sig.range_len(var)];
            let mut seen = vec![false; sig.range_len(var)];
            for entry in entries {
                let Some(vix) = sig.value_index(var, &entry.value) else {
                    report.push(Violation::ValueOutOfRange {
                        child: name.clone(),
                        value: entry.value.clone(),
                        row: row_desc(),
                    });
                    ok = false;
                    continue;
                };
                if seen[vix as usize] {
                    report.push(Violation::DuplicateDistValue {
                        var: name.clone(),
                        row: row_desc(),
                        value: entry.value.clone(),
                    });
                    ok = false;
                    continue;
                }
                seen[vix as usize] = true;
                match prob_literal(&entry.prob) {
                    Some(p) => probs[vix as usize] = p,
                    None => {
                        report.push(Violation::BadProbability {
                            var: name.clone(),
                            row: row_desc(),
                            text: entry.prob.to_string(),
                        });
                        ok = false;
                    }
                }
            }
            dists.push(Distribution::new(probs));
        }
        if ok {
            tables.push((var, dists));
        }
    }

    report.clone().into_result()?;
    PModel::from_parts(sig, graph, tables)
}

/// Loads a probabilistic model file that must already be exogenous-free.
pub fn compile_cbn(file: &PModelFile) -> Result<Cbn, ValidationReport> {
    let pm = compile_pmodel(file)?;
    Cbn::new(pm).map_err(|e| {
        let mut report = ValidationReport::default();
        report.push(Violation::BadWhenKey {
            child: "(network)".to_string(),
            detail: e.to_string(),
        });
        report
    })
}

fn prob_literal(v: &serde_json::Value) -> Option<Rational> {
    match v {
        serde_json::Value::String(s) => parse_rational_literal(s),
        serde_json::Value::Number(n) => parse_rational_literal(&n.to_string()),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Saving
// ---------------------------------------------------------------------------

fn range_maps(
    sig: &Signature,
) -> (BTreeMap<String, Vec<Value>>, BTreeMap<String, Vec<Value>>) {
    let mut exo = BTreeMap::new();
    let mut endo = BTreeMap::new();
    for id in sig.var_ids() {
        let entry = (sig.name(id).to_string(), sig.range(id).to_vec());
        match sig.kind(id) {
            VarKind::Exogenous => exo.insert(entry.0, entry.1),
            VarKind::Endogenous => endo.insert(entry.0, entry.1),
        };
    }
    (exo, endo)
}

fn edge_names(sig: &Signature, graph: &CausalGraph) -> Vec<(String, String)> {
    graph
        .edges()
        .into_iter()
        .map(|(a, b)| (sig.name(a).to_string(), sig.name(b).to_string()))
        .collect()
}

/// Renders a model with fully explicit rows (no defaults), in canonical
/// order; output is byte-stable for identical models.
pub fn model_to_file(m: &Model) -> ModelFile {
    let sig = m.signature();
    let (exogenous, endogenous) = range_maps(sig);
    let mut equations = BTreeMap::new();
    for &child in sig.endogenous() {
        let eq = m.equation(child).expect("valid model");
        let dims: Vec<usize> = eq.parents().iter().map(|&p| sig.range_len(p)).collect();
        let mut rows = Vec::with_capacity(eq.row_count());
        for (ix, key) in mixed_radix(&dims).enumerate() {
            let mut when = BTreeMap::new();
            for (&p, &k) in eq.parents().iter().zip(&key) {
                when.insert(sig.name(p).to_string(), sig.value(p, k as u32).clone());
            }
            rows.push(EquationRow {
                when: When::Assign(when),
                values: eq.row(ix).iter().map(|v| sig.value(child, v).clone()).collect(),
            });
        }
        equations.insert(sig.name(child).to_string(), rows);
    }
    ModelFile { exogenous, endogenous, edges: edge_names(sig, m.graph()), equations }
}

pub fn pmodel_to_file(pm: &PModel) -> PModelFile {
    let sig = pm.signature();
    let (exogenous, endogenous) = range_maps(sig);
    let mut cpt = BTreeMap::new();
    for id in sig.var_ids() {
        let table = pm.table(id);
        let dims: Vec<usize> = table.parents().iter().map(|&p| sig.range_len(p)).collect();
        let mut rows = Vec::with_capacity(table.row_count());
        for (ix, key) in mixed_radix(&dims).enumerate() {
            let mut when = BTreeMap::new();
            for (&p, &k) in table.parents().iter().zip(&key) {
                when.insert(sig.name(p).to_string(), sig.value(p, k as u32).clone());
            }
            let dist = table
                .row(ix)
                .support()
                .map(|(v, p)| CptEntry {
                    value: sig.value(id, v).clone(),
                    prob: serde_json::Value::String(p.to_string()),
                })
                .collect();
            rows.push(CptRow { when: When::Assign(when), dist });
        }
        cpt.insert(sig.name(id).to_string(), rows);
    }
    PModelFile { exogenous, endogenous, edges: edge_names(sig, pm.graph()), cpt }
}

// ---------------------------------------------------------------------------
// Assignment text (`X=0, Y=1`) and JSON rendering
// ---------------------------------------------------------------------------

/// Parses comma-separated `Var=value` pairs. Values are integers, quoted
/// strings, or bare words. An empty string yields no pairs.
pub fn parse_assignment_text(text: &str) -> Result<Vec<(String, Value)>, String> {
    let mut out = Vec::new();
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Ok(out);
    }
    for part in trimmed.split(',') {
        let Some((name, value)) = part.split_once('=') else {
            return Err(format!("expected `Var=value`, found `{}`", part.trim()));
        };
        let name = name.trim();
        if name.is_empty() {
            return Err(format!("missing variable name in `{}`", part.trim()));
        }
        out.push((name.to_string(), parse_value_text(value.trim())?));
    }
    Ok(out)
}

pub fn parse_value_text(text: &str) -> Result<Value, String> {
    if text.is_empty() {
        return Err("empty value".to_string());
    }
    if let Some(stripped) = text.strip_prefix('"') {
        return match stripped.strip_suffix('"') {
            Some(inner) => Ok(Value::Str(inner.to_string())),
            None => Err(format!("unterminated quoted value `{text}`")),
        };
    }
    if let Ok(n) = text.parse::<i64>() {
        return Ok(Value::Int(n));
    }
    Ok(Value::Str(text.to_string()))
}

/// A world as a name-to-value JSON object.
pub fn world_to_json(sig: &Signature, w: &World) -> serde_json::Value {
    let mut map = serde_json::Map::new();
    for id in sig.var_ids() {
        map.insert(
            sig.name(id).to_string(),
            serde_json::to_value(w.value(sig, id)).expect("values serialize"),
        );
    }
    serde_json::Value::Object(map)
}
