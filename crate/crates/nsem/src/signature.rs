//! Signatures: the variables a model is built from, with their finite ranges.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::model::{ValidationReport, Violation};

/// Index of a variable within its [`Signature`]. Variables are stored sorted
/// by name, so `VarId` order is name order; this is the canonical variable
/// order used for equation row keys and world enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VarKind {
    Exogenous,
    Endogenous,
}

/// A value in a variable's range: a bare integer or a string label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Str(String),
}

impl Value {
    /// True when the value prints as a bare token the formula grammar can
    /// read back without quotes.
    pub fn is_bare(&self) -> bool {
        match self {
            Value::Int(_) => true,
            Value::Str(s) => {
                !s.is_empty()
                    && s.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                    && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                    && s != "true"
                    && s != "false"
            }
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Str(s) if self.is_bare() => write!(f, "{s}"),
            Value::Str(s) => write!(f, "\"{s}\""),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    /// Nonempty, duplicate-free. The declared order is the canonical value
    /// order; assignments store indices into this list.
    pub range: Vec<Value>,
}

/// The variable universe of a model: exogenous and endogenous variables with
/// their finite ranges. Immutable once built; models hold it behind an `Arc`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    vars: Vec<Variable>,
    by_name: BTreeMap<String, VarId>,
    exogenous: Vec<VarId>,
    endogenous: Vec<VarId>,
}

impl Signature {
    /// Builds a signature from `(name, kind, range)` triples. Variables are
    /// sorted by name; duplicate names, empty ranges, and duplicate range
    /// values are reported as violations.
    pub fn new(
        mut vars: Vec<(String, VarKind, Vec<Value>)>,
    ) -> Result<Arc<Signature>, ValidationReport> {
        let mut report = ValidationReport::default();
        vars.sort_by(|a, b| a.0.cmp(&b.0));
        for pair in vars.windows(2) {
            if pair[0].0 == pair[1].0 {
                report.push(Violation::DuplicateVariable { var: pair[0].0.clone() });
            }
        }
        let mut out = Vec::with_capacity(vars.len());
        for (name, kind, range) in vars {
            if range.is_empty() {
                report.push(Violation::EmptyRange { var: name.clone() });
            }
            let mut seen = range.clone();
            seen.sort();
            for pair in seen.windows(2) {
                if pair[0] == pair[1] {
                    report.push(Violation::DuplicateRangeValue {
                        var: name.clone(),
                        value: pair[0].clone(),
                    });
                }
            }
            out.push(Variable { name, kind, range });
        }
        if !report.is_empty() {
            return Err(report);
        }
        let by_name = out
            .iter()
            .enumerate()
            .map(|(i, v)| (v.name.clone(), VarId(i as u32)))
            .collect();
        let exogenous = ids_of(&out, VarKind::Exogenous);
        let endogenous = ids_of(&out, VarKind::Endogenous);
        Ok(Arc::new(Signature { vars: out, by_name, exogenous, endogenous }))
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn var_ids(&self) -> impl Iterator<Item = VarId> {
        (0..self.vars.len() as u32).map(VarId)
    }

    pub fn var(&self, id: VarId) -> &Variable {
        &self.vars[id.index()]
    }

    pub fn name(&self, id: VarId) -> &str {
        &self.vars[id.index()].name
    }

    pub fn kind(&self, id: VarId) -> VarKind {
        self.vars[id.index()].kind
    }

    pub fn range(&self, id: VarId) -> &[Value] {
        &self.vars[id.index()].range
    }

    pub fn range_len(&self, id: VarId) -> usize {
        self.vars[id.index()].range.len()
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        self.by_name.get(name).copied()
    }

    /// Index of `value` within the declared range of `id`.
    pub fn value_index(&self, id: VarId, value: &Value) -> Option<u32> {
        self.range(id).iter().position(|v| v == value).map(|i| i as u32)
    }

    pub fn value(&self, id: VarId, ix: u32) -> &Value {
        &self.range(id)[ix as usize]
    }

    /// Exogenous variables in canonical (name) order.
    pub fn exogenous(&self) -> &[VarId] {
        &self.exogenous
    }

    /// Endogenous variables in canonical (name) order.
    pub fn endogenous(&self) -> &[VarId] {
        &self.endogenous
    }

    /// Number of worlds, i.e. the size of the full range cross-product.
    pub fn world_count(&self) -> usize {
        self.vars.iter().map(|v| v.range.len()).product()
    }
}

fn ids_of(vars: &[Variable], kind: VarKind) -> Vec<VarId> {
    vars.iter()
        .enumerate()
        .filter(|(_, v)| v.kind == kind)
        .map(|(i, _)| VarId(i as u32))
        .collect()
}

/// Iterates over all tuples of a mixed-radix space given per-position sizes.
/// Tuples are produced in lexicographic order with the last position varying
/// fastest. An empty `dims` yields the single empty tuple.
pub(crate) fn mixed_radix(dims: &[usize]) -> MixedRadix {
    MixedRadix { dims: dims.to_vec(), next: Some(vec![0; dims.len()]), empty: dims.contains(&0) }
}

pub(crate) struct MixedRadix {
    dims: Vec<usize>,
    next: Option<Vec<usize>>,
    empty: bool,
}

impl Iterator for MixedRadix {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.empty {
            return None;
        }
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut pos = self.dims.len();
        loop {
            if pos == 0 {
                self.next = None;
                break;
            }
            pos -= 1;
            succ[pos] += 1;
            if succ[pos] < self.dims[pos] {
                self.next = Some(succ);
                break;
            }
            succ[pos] = 0;
        }
        Some(current)
    }
}
