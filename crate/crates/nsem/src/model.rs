//! Nondeterministic structural equation models: multi-valued equation tables
//! over a DAG, worlds, validation, and solution enumeration.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::graph::CausalGraph;
use crate::signature::{mixed_radix, Signature, Value, VarId, VarKind};

// ---------------------------------------------------------------------------
// Worlds and partial assignments
// ---------------------------------------------------------------------------

/// A total assignment: one range index per signature variable. The derived
/// `Ord` is the canonical world order (variables by name, values in declared
/// range order).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct World {
    vals: Box<[u32]>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WorldError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("value {value} out of range for `{var}`")]
    OutOfRange { var: String, value: Value },
    #[error("no value assigned to `{0}`")]
    Missing(String),
    #[error("`{var}` is {actual:?}, expected {expected:?}")]
    WrongKind { var: String, expected: VarKind, actual: VarKind },
}

impl World {
    pub fn from_indices(sig: &Signature, vals: Vec<u32>) -> Result<World, WorldError> {
        assert_eq!(vals.len(), sig.len(), "assignment length must match signature");
        for (i, &ix) in vals.iter().enumerate() {
            let id = VarId(i as u32);
            if ix as usize >= sig.range_len(id) {
                return Err(WorldError::OutOfRange {
                    var: sig.name(id).to_string(),
                    value: Value::Int(ix as i64),
                });
            }
        }
        Ok(World { vals: vals.into_boxed_slice() })
    }

    /// Builds a world from `(name, value)` pairs; must be total and in range.
    pub fn from_named<'a>(
        sig: &Signature,
        pairs: impl IntoIterator<Item = (&'a str, &'a Value)>,
    ) -> Result<World, WorldError> {
        let partial = PartialWorld::from_named(sig, pairs, None)?;
        partial.into_total(sig)
    }

    pub fn value_ix(&self, var: VarId) -> u32 {
        self.vals[var.index()]
    }

    pub fn value<'s>(&self, sig: &'s Signature, var: VarId) -> &'s Value {
        sig.value(var, self.value_ix(var))
    }

    pub fn indices(&self) -> &[u32] {
        &self.vals
    }

    /// Restriction to the given variables, as a partial assignment.
    pub fn restrict(&self, sig: &Signature, vars: &[VarId]) -> PartialWorld {
        let mut vals = vec![None; sig.len()];
        for &v in vars {
            vals[v.index()] = Some(self.vals[v.index()]);
        }
        PartialWorld { vals: vals.into_boxed_slice() }
    }

    pub fn display(&self, sig: &Signature) -> String {
        let mut parts = Vec::with_capacity(sig.len());
        for id in sig.var_ids() {
            parts.push(format!("{}={}", sig.name(id), self.value(sig, id)));
        }
        parts.join(", ")
    }
}

/// A partial assignment over a signature, used for contexts (total over the
/// exogenous variables), states (total over the endogenous ones), and
/// arbitrary enumeration filters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialWorld {
    vals: Box<[Option<u32>]>,
}

impl PartialWorld {
    pub fn empty(sig: &Signature) -> PartialWorld {
        PartialWorld { vals: vec![None; sig.len()].into_boxed_slice() }
    }

    /// Builds a partial assignment from named pairs. With `kind` given, every
    /// named variable must be of that kind.
    pub fn from_named<'a>(
        sig: &Signature,
        pairs: impl IntoIterator<Item = (&'a str, &'a Value)>,
        kind: Option<VarKind>,
    ) -> Result<PartialWorld, WorldError> {
        let mut vals = vec![None; sig.len()];
        for (name, value) in pairs {
            let id = sig
                .lookup(name)
                .ok_or_else(|| WorldError::UnknownVariable(name.to_string()))?;
            if let Some(expected) = kind {
                if sig.kind(id) != expected {
                    return Err(WorldError::WrongKind {
                        var: name.to_string(),
                        expected,
                        actual: sig.kind(id),
                    });
                }
            }
            let ix = sig.value_index(id, value).ok_or_else(|| WorldError::OutOfRange {
                var: name.to_string(),
                value: value.clone(),
            })?;
            vals[id.index()] = Some(ix);
        }
        Ok(PartialWorld { vals: vals.into_boxed_slice() })
    }

    /// A context: total over the exogenous variables, naming nothing else.
    pub fn context_from_named<'a>(
        sig: &Signature,
        pairs: impl IntoIterator<Item = (&'a str, &'a Value)>,
    ) -> Result<PartialWorld, WorldError> {
        let ctx = Self::from_named(sig, pairs, Some(VarKind::Exogenous))?;
        ctx.require_total_over(sig, sig.exogenous())?;
        Ok(ctx)
    }

    /// A state: total over the endogenous variables, naming nothing else.
    pub fn state_from_named<'a>(
        sig: &Signature,
        pairs: impl IntoIterator<Item = (&'a str, &'a Value)>,
    ) -> Result<PartialWorld, WorldError> {
        let st = Self::from_named(sig, pairs, Some(VarKind::Endogenous))?;
        st.require_total_over(sig, sig.endogenous())?;
        Ok(st)
    }

    fn require_total_over(&self, sig: &Signature, vars: &[VarId]) -> Result<(), WorldError> {
        for &v in vars {
            if self.vals[v.index()].is_none() {
                return Err(WorldError::Missing(sig.name(v).to_string()));
            }
        }
        Ok(())
    }

    pub fn get(&self, var: VarId) -> Option<u32> {
        self.vals[var.index()]
    }

    pub fn set(&mut self, var: VarId, ix: u32) {
        self.vals[var.index()] = Some(ix);
    }

    pub fn matches(&self, w: &World) -> bool {
        self.vals
            .iter()
            .enumerate()
            .all(|(i, v)| v.is_none_or(|ix| w.vals[i] == ix))
    }

    pub fn into_total(self, sig: &Signature) -> Result<World, WorldError> {
        let mut vals = Vec::with_capacity(sig.len());
        for (i, v) in self.vals.iter().enumerate() {
            match v {
                Some(ix) => vals.push(*ix),
                None => return Err(WorldError::Missing(sig.name(VarId(i as u32)).to_string())),
            }
        }
        Ok(World { vals: vals.into_boxed_slice() })
    }

    pub fn assigned(&self) -> impl Iterator<Item = (VarId, u32)> + '_ {
        self.vals
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|ix| (VarId(i as u32), ix)))
    }

    pub fn display(&self, sig: &Signature) -> String {
        let parts: Vec<String> = self
            .assigned()
            .map(|(id, ix)| format!("{}={}", sig.name(id), sig.value(id, ix)))
            .collect();
        parts.join(", ")
    }
}

// ---------------------------------------------------------------------------
// Equations
// ---------------------------------------------------------------------------

/// A set of admissible values for one equation row, as sorted range indices.
/// Empty sets are representable so that validation can report them; a valid
/// model never contains one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ValueSet {
    vals: Vec<u32>,
}

impl ValueSet {
    pub fn new(mut vals: Vec<u32>) -> ValueSet {
        vals.sort_unstable();
        vals.dedup();
        ValueSet { vals }
    }

    pub fn singleton(v: u32) -> ValueSet {
        ValueSet { vals: vec![v] }
    }

    pub fn contains(&self, v: u32) -> bool {
        self.vals.binary_search(&v).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.vals.iter().copied()
    }

    pub fn is_subset_of(&self, other: &ValueSet) -> bool {
        self.vals.iter().all(|v| other.contains(*v))
    }

    pub fn display(&self, sig: &Signature, var: VarId) -> String {
        let parts: Vec<String> =
            self.vals.iter().map(|&ix| sig.value(var, ix).to_string()).collect();
        format!("{{{}}}", parts.join(", "))
    }
}

/// The multi-valued structural equation of one endogenous variable: a dense
/// table with one row per parent configuration, parents in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationTable {
    parents: Vec<VarId>,
    dims: Vec<usize>,
    rows: Vec<ValueSet>,
}

impl EquationTable {
    pub fn parents(&self) -> &[VarId] {
        &self.parents
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, ix: usize) -> &ValueSet {
        &self.rows[ix]
    }

    pub fn rows(&self) -> impl Iterator<Item = &ValueSet> {
        self.rows.iter()
    }

    /// Dense index of the row keyed by the given parent value indices.
    pub fn row_index(&self, parent_vals: &[u32]) -> usize {
        debug_assert_eq!(parent_vals.len(), self.parents.len());
        let mut ix = 0;
        for (pos, &v) in parent_vals.iter().enumerate() {
            ix = ix * self.dims[pos] + v as usize;
        }
        ix
    }

    /// Parent value indices keyed by a dense row index.
    pub fn row_key(&self, mut ix: usize) -> Vec<u32> {
        let mut key = vec![0u32; self.dims.len()];
        for pos in (0..self.dims.len()).rev() {
            key[pos] = (ix % self.dims[pos]) as u32;
            ix /= self.dims[pos];
        }
        key
    }

    fn row_index_in<F: Fn(VarId) -> u32>(&self, lookup: F) -> usize {
        let mut ix = 0;
        for (pos, &p) in self.parents.iter().enumerate() {
            ix = ix * self.dims[pos] + lookup(p) as usize;
        }
        ix
    }

    /// The admissible child values under the parent configuration in `w`.
    pub fn allowed_in(&self, w: &World) -> &ValueSet {
        &self.rows[self.row_index_in(|p| w.value_ix(p))]
    }

    /// Dense index of the row selected by `w`'s parent values.
    pub fn row_index_for(&self, w: &World) -> usize {
        self.row_index_in(|p| w.value_ix(p))
    }

    /// Replaces one row. Model surgery only; keeps dimensions intact.
    pub(crate) fn set_row(&mut self, ix: usize, row: ValueSet) {
        self.rows[ix] = row;
    }

    /// The parentless constant equation `{value}` an intervention installs.
    pub(crate) fn constant(value: u32) -> EquationTable {
        EquationTable { parents: Vec::new(), dims: Vec::new(), rows: vec![ValueSet::singleton(value)] }
    }

    pub fn describe_row(&self, sig: &Signature, ix: usize) -> String {
        if self.parents.is_empty() {
            return "()".to_string();
        }
        let key = self.row_key(ix);
        let parts: Vec<String> = self
            .parents
            .iter()
            .zip(&key)
            .map(|(&p, &v)| format!("{}={}", sig.name(p), sig.value(p, v)))
            .collect();
        parts.join(", ")
    }
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// A structural well-formedness violation. Validation reports every violation
/// it finds rather than stopping at the first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateVariable { var: String },
    EmptyRange { var: String },
    DuplicateRangeValue { var: String, value: Value },
    UnknownVariable { name: String, place: String },
    ExogenousHasParents { var: String },
    CyclicGraph { path: Vec<String> },
    MissingEquation { var: String },
    EquationForExogenous { var: String },
    RowCountMismatch { child: String, expected: usize, got: usize },
    MissingRow { child: String, row: String },
    DuplicateRow { child: String, row: String },
    NonTotalEquation { child: String, row: String },
    ValueOutOfRange { child: String, value: Value, row: String },
    BadWhenKey { child: String, detail: String },
    NonUnitRowSum { var: String, row: String, sum: String },
    NegativeProbability { var: String, row: String, value: Value },
    ExogenousZeroSupport { var: String, value: Value },
    DuplicateDistValue { var: String, row: String, value: Value },
    BadProbability { var: String, row: String, text: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateVariable { var } => write!(f, "duplicate variable `{var}`"),
            Violation::EmptyRange { var } => write!(f, "empty range for `{var}`"),
            Violation::DuplicateRangeValue { var, value } => {
                write!(f, "duplicate value {value} in range of `{var}`")
            }
            Violation::UnknownVariable { name, place } => {
                write!(f, "unknown variable `{name}` in {place}")
            }
            Violation::ExogenousHasParents { var } => {
                write!(f, "exogenous variable `{var}` has incoming edges")
            }
            Violation::CyclicGraph { path } => {
                write!(f, "cycle ")?;
                for name in path {
                    write!(f, "{name}->")?;
                }
                write!(f, "{}", path.first().map(String::as_str).unwrap_or(""))
            }
            Violation::MissingEquation { var } => write!(f, "missing equation for `{var}`"),
            Violation::EquationForExogenous { var } => {
                write!(f, "equation given for exogenous variable `{var}`")
            }
            Violation::RowCountMismatch { child, expected, got } => write!(
                f,
                "equation for `{child}` has {got} rows, expected {expected} parent configurations"
            ),
            Violation::MissingRow { child, row } => {
                write!(f, "equation for `{child}` has no row for {row}")
            }
            Violation::DuplicateRow { child, row } => {
                write!(f, "equation for `{child}` has more than one row for {row}")
            }
            Violation::NonTotalEquation { child, row } => {
                write!(f, "non-total equation for `{child}` (empty value set at row {row})")
            }
            Violation::ValueOutOfRange { child, value, row } => {
                write!(f, "value {value} out of range for `{child}` at row {row}")
            }
            Violation::BadWhenKey { child, detail } => {
                write!(f, "bad row key for `{child}`: {detail}")
            }
            Violation::NonUnitRowSum { var, row, sum } => {
                write!(f, "distribution for `{var}` at row {row} sums to {sum}, expected 1")
            }
            Violation::NegativeProbability { var, row, value } => {
                write!(f, "negative probability for `{var}`={value} at row {row}")
            }
            Violation::ExogenousZeroSupport { var, value } => {
                write!(f, "exogenous `{var}` must give positive probability to {value}")
            }
            Violation::DuplicateDistValue { var, row, value } => {
                write!(f, "duplicate distribution entry for `{var}`={value} at row {row}")
            }
            Violation::BadProbability { var, row, text } => {
                write!(f, "cannot parse probability `{text}` for `{var}` at row {row}")
            }
        }
    }
}

/// Collected violations; empty means the model is well-formed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn into_result(self) -> Result<(), ValidationReport> {
        if self.is_empty() {
            Ok(())
        } else {
            Err(self)
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationReport {}

// ---------------------------------------------------------------------------
// Model
// ---------------------------------------------------------------------------

/// A validated total acyclic NSEM. Construction via [`Model::from_parts`]
/// checks every structural invariant, so downstream operations can assume
/// validity. Immutable; model surgery produces new models.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    sig: Arc<Signature>,
    graph: CausalGraph,
    equations: Vec<Option<EquationTable>>,
    /// Exogenous variables in name order followed by endogenous variables in
    /// topological order; the canonical solving order.
    solve_order: Vec<VarId>,
}

impl Model {
    /// Assembles and validates a model. `equations` maps each endogenous
    /// variable to its dense row list, one row per parent configuration in
    /// mixed-radix order over the graph's (canonically ordered) parents.
    pub fn from_parts(
        sig: Arc<Signature>,
        graph: CausalGraph,
        equations: Vec<(VarId, Vec<ValueSet>)>,
    ) -> Result<Model, ValidationReport> {
        let mut report = ValidationReport::default();
        assert_eq!(
            graph.var_count(),
            sig.len(),
            "graph must have one node per signature variable"
        );

        for &u in sig.exogenous() {
            if !graph.parents(u).is_empty() {
                report.push(Violation::ExogenousHasParents { var: sig.name(u).to_string() });
            }
        }

        let topo = match graph.topological_order() {
            Ok(order) => Some(order),
            Err(cycle) => {
                report.push(Violation::CyclicGraph {
                    path: cycle.iter().map(|&v| sig.name(v).to_string()).collect(),
                });
                None
            }
        };

        let mut tables: Vec<Option<EquationTable>> = vec![None; sig.len()];
        let mut seen = vec![false; sig.len()];
        for (child, rows) in equations {
            if seen[child.index()] {
                report.push(Violation::DuplicateRow {
                    child: sig.name(child).to_string(),
                    row: "(whole equation repeated)".to_string(),
                });
                continue;
            }
            seen[child.index()] = true;
            if sig.kind(child) == VarKind::Exogenous {
                report.push(Violation::EquationForExogenous { var: sig.name(child).to_string() });
                continue;
            }
            let parents = graph.parents(child).to_vec();
            let dims: Vec<usize> = parents.iter().map(|&p| sig.range_len(p)).collect();
            let expected: usize = dims.iter().product();
            if rows.len() != expected {
                report.push(Violation::RowCountMismatch {
                    child: sig.name(child).to_string(),
                    expected,
                    got: rows.len(),
                });
                continue;
            }
            let table = EquationTable { parents, dims, rows };
            for (ix, row) in table.rows.iter().enumerate() {
                if row.is_empty() {
                    report.push(Violation::NonTotalEquation {
                        child: sig.name(child).to_string(),
                        row: table.describe_row(&sig, ix),
                    });
                }
                for v in row.iter() {
                    if v as usize >= sig.range_len(child) {
                        report.push(Violation::ValueOutOfRange {
                            child: sig.name(child).to_string(),
                            value: Value::Int(v as i64),
                            row: table.describe_row(&sig, ix),
                        });
                    }
                }
            }
            tables[child.index()] = Some(table);
        }
        for &v in sig.endogenous() {
            if tables[v.index()].is_none() && seen[v.index()] {
                // reported above (bad rows); don't double-report as missing
            } else if tables[v.index()].is_none() {
                report.push(Violation::MissingEquation { var: sig.name(v).to_string() });
            }
        }

        report.into_result()?;
        let topo = topo.expect("acyclic after validation");
        let mut solve_order: Vec<VarId> = sig.exogenous().to_vec();
        solve_order.extend(topo.iter().copied().filter(|&v| sig.kind(v) == VarKind::Endogenous));
        Ok(Model { sig, graph, equations: tables, solve_order })
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn graph(&self) -> &CausalGraph {
        &self.graph
    }

    pub fn equation(&self, var: VarId) -> Option<&EquationTable> {
        self.equations[var.index()].as_ref()
    }

    /// Replaces structural content wholesale. Used by model surgery, which
    /// preserves validity by construction.
    pub(crate) fn with_surgery(
        &self,
        graph: CausalGraph,
        equations: Vec<Option<EquationTable>>,
    ) -> Model {
        let topo = graph.topological_order().expect("surgery keeps the graph acyclic");
        let mut solve_order: Vec<VarId> = self.sig.exogenous().to_vec();
        solve_order
            .extend(topo.iter().copied().filter(|&v| self.sig.kind(v) == VarKind::Endogenous));
        Model { sig: Arc::clone(&self.sig), graph, equations, solve_order }
    }

    pub(crate) fn equations_cloned(&self) -> Vec<Option<EquationTable>> {
        self.equations.clone()
    }

    /// True iff every endogenous value in `w` is admissible under its
    /// equation row for `w`'s parent configuration.
    pub fn is_solution(&self, w: &World) -> bool {
        self.sig.endogenous().iter().all(|&v| {
            self.equations[v.index()]
                .as_ref()
                .expect("validated model has all equations")
                .allowed_in(w)
                .contains(w.value_ix(v))
        })
    }

    /// All solutions, in canonical world order.
    pub fn solutions(&self) -> Vec<World> {
        self.solutions_matching(None)
    }

    /// Solutions consistent with a partial assignment (e.g. a context), in
    /// canonical world order. Enumeration branches over each equation row's
    /// admissible values in solving order, so only solutions are visited.
    pub fn solutions_matching(&self, filter: Option<&PartialWorld>) -> Vec<World> {
        let mut out = Vec::new();
        let mut current = vec![0u32; self.sig.len()];
        self.enumerate(0, filter, &mut current, &mut out);
        out.sort_unstable();
        out
    }

    fn enumerate(
        &self,
        depth: usize,
        filter: Option<&PartialWorld>,
        current: &mut Vec<u32>,
        out: &mut Vec<World>,
    ) {
        if depth == self.solve_order.len() {
            out.push(World { vals: current.clone().into_boxed_slice() });
            return;
        }
        let var = self.solve_order[depth];
        let pinned = filter.and_then(|f| f.get(var));
        match &self.equations[var.index()] {
            None => {
                // exogenous: branch over the whole range
                for ix in 0..self.sig.range_len(var) as u32 {
                    if pinned.is_some_and(|p| p != ix) {
                        continue;
                    }
                    current[var.index()] = ix;
                    self.enumerate(depth + 1, filter, current, out);
                }
            }
            Some(eq) => {
                let row = eq.row_index_in(|p| current[p.index()]);
                for ix in eq.row(row).iter() {
                    if pinned.is_some_and(|p| p != ix) {
                        continue;
                    }
                    current[var.index()] = ix;
                    self.enumerate(depth + 1, filter, current, out);
                }
            }
        }
    }

    /// True iff every equation row is a singleton.
    pub fn is_deterministic(&self) -> bool {
        self.equations
            .iter()
            .flatten()
            .all(|eq| eq.rows().all(|row| row.len() == 1))
    }

    /// True iff `self` refines `base`: identical signature and graph, and
    /// every row of `self` is a subset of the corresponding row of `base`.
    pub fn is_refinement_of(&self, base: &Model) -> bool {
        self.refinement_failure(base).is_none()
    }

    /// Why `self` is not a refinement of `base`, if it is not.
    pub fn refinement_failure(&self, base: &Model) -> Option<String> {
        if *self.sig != *base.sig {
            return Some("signatures differ".to_string());
        }
        if self.graph != base.graph {
            return Some("graphs differ".to_string());
        }
        for &v in self.sig.endogenous() {
            let (mine, theirs) = (
                self.equations[v.index()].as_ref().unwrap(),
                base.equations[v.index()].as_ref().unwrap(),
            );
            for ix in 0..mine.row_count() {
                if !mine.row(ix).is_subset_of(theirs.row(ix)) {
                    return Some(format!(
                        "row for `{}` at {} is {} in the candidate but {} in the base",
                        self.sig.name(v),
                        mine.describe_row(&self.sig, ix),
                        mine.row(ix).display(&self.sig, v),
                        theirs.row(ix).display(&self.sig, v),
                    ));
                }
            }
        }
        None
    }

    /// The functional-dependence graph: an edge X->Y iff two values of X can
    /// be told apart by Y's equation with Y's other parents held fixed. A
    /// subgraph of the declared graph, and acyclic whenever it is.
    pub fn dependence_graph(&self) -> CausalGraph {
        let mut edges = Vec::new();
        for &child in self.sig.endogenous() {
            let eq = self.equations[child.index()].as_ref().unwrap();
            for (pos, &parent) in eq.parents.iter().enumerate() {
                let other_dims: Vec<usize> = eq
                    .dims
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != pos)
                    .map(|(_, &d)| d)
                    .collect();
                let depends = mixed_radix(&other_dims).any(|others| {
                    let mut key = vec![0u32; eq.dims.len()];
                    let mut it = others.iter();
                    for (i, slot) in key.iter_mut().enumerate() {
                        if i != pos {
                            *slot = *it.next().unwrap() as u32;
                        }
                    }
                    let mut first: Option<&ValueSet> = None;
                    (0..eq.dims[pos]).any(|x| {
                        key[pos] = x as u32;
                        let row = eq.row(eq.row_index(&key));
                        match first {
                            None => {
                                first = Some(row);
                                false
                            }
                            Some(f) => f != row,
                        }
                    })
                });
                if depends {
                    edges.push((parent, child));
                }
            }
        }
        CausalGraph::new(self.sig.len(), &edges)
    }
}
