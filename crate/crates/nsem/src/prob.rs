//! Probabilistic NSEMs and causal Bayesian networks, in exact rational
//! arithmetic.
//!
//! A probabilistic model attaches a conditional probability table to *every*
//! variable (exogenous tables are parentless and must have full support); the
//! joint factorizes as the product of the tables (Causal Markov Condition).
//! Counterfactual probabilities follow the same two-step surgery as the exact
//! semantics: pin every actually-used row to its observed value, intervene,
//! then read probabilities off the surged joint. No floating point enters any
//! satisfaction decision.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::formula::{eval_basic, BasicFormula, Intervention, ProbCausalFormula, ProbTarget};
use crate::graph::CausalGraph;
use crate::model::{Model, ValidationReport, ValueSet, Violation, World};
use crate::signature::{Signature, VarId, VarKind};

pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProbError {
    #[error("world ({0}) has zero probability and is not a solution")]
    NotASolution(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CbnError {
    #[error("exogenous `{exo}` is a parent of {children:?}; no two endogenous variables may share an exogenous parent")]
    SharedExogenousParent { exo: String, children: Vec<String> },
    #[error("state ({0}) is outside the support of the network")]
    OutsideSupport(String),
    #[error("model still has exogenous variables: {0:?}")]
    NotExogenousFree(Vec<String>),
}

// ---------------------------------------------------------------------------
// Distributions and tables
// ---------------------------------------------------------------------------

/// A probability distribution over one variable's range, dense by value index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    probs: Vec<Rational>,
}

impl Distribution {
    pub fn new(probs: Vec<Rational>) -> Distribution {
        Distribution { probs }
    }

    pub fn point(value: u32, range_len: usize) -> Distribution {
        let mut probs = vec![Rational::zero(); range_len];
        probs[value as usize] = Rational::one();
        Distribution { probs }
    }

    pub fn get(&self, value: u32) -> &Rational {
        &self.probs[value as usize]
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn sum(&self) -> Rational {
        self.probs.iter().sum()
    }

    /// Values with nonzero probability, in range order.
    pub fn support(&self) -> impl Iterator<Item = (u32, &Rational)> {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(i, p)| (i as u32, p))
    }

    pub fn support_set(&self) -> ValueSet {
        ValueSet::new(self.support().map(|(v, _)| v).collect())
    }

    /// The distribution with all mass moved onto `value`.
    pub fn pinned(&self, value: u32) -> Distribution {
        Distribution::point(value, self.probs.len())
    }
}

/// Conditional probability table: one distribution per parent configuration,
/// parents in canonical order, rows dense in mixed-radix order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionalTable {
    parents: Vec<VarId>,
    dims: Vec<usize>,
    rows: Vec<Distribution>,
}

impl ConditionalTable {
    pub fn parents(&self) -> &[VarId] {
        &self.parents
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, ix: usize) -> &Distribution {
        &self.rows[ix]
    }

    pub fn rows(&self) -> impl Iterator<Item = &Distribution> {
        self.rows.iter()
    }

    pub fn row_index(&self, parent_vals: &[u32]) -> usize {
        debug_assert_eq!(parent_vals.len(), self.parents.len());
        let mut ix = 0;
        for (pos, &v) in parent_vals.iter().enumerate() {
            ix = ix * self.dims[pos] + v as usize;
        }
        ix
    }

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

    pub fn row_index_for(&self, w: &World) -> usize {
        self.row_index_in(|p| w.value_ix(p))
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
// Probabilistic model
// ---------------------------------------------------------------------------

/// A probabilistic NSEM: an acyclic graph with one conditional probability
/// table per variable. Validated at construction; immutable afterwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PModel {
    sig: Arc<Signature>,
    graph: CausalGraph,
    tables: Vec<ConditionalTable>,
}

impl PModel {
    /// Assembles and validates. `tables` maps every variable (exogenous ones
    /// included) to its dense row list over the graph's parents.
    pub fn from_parts(
        sig: Arc<Signature>,
        graph: CausalGraph,
        tables: Vec<(VarId, Vec<Distribution>)>,
    ) -> Result<PModel, ValidationReport> {
        let mut report = ValidationReport::default();
        assert_eq!(graph.var_count(), sig.len());

        for &u in sig.exogenous() {
            if !graph.parents(u).is_empty() {
                report.push(Violation::ExogenousHasParents { var: sig.name(u).to_string() });
            }
        }
        if let Err(cycle) = graph.topological_order() {
            report.push(Violation::CyclicGraph {
                path: cycle.iter().map(|&v| sig.name(v).to_string()).collect(),
            });
        }

        let mut built: Vec<Option<ConditionalTable>> = vec![None; sig.len()];
        for (var, rows) in tables {
            if built[var.index()].is_some() {
                report.push(Violation::DuplicateRow {
                    child: sig.name(var).to_string(),
                    row: "(whole table repeated)".to_string(),
                });
                continue;
            }
            let parents = graph.parents(var).to_vec();
            let dims: Vec<usize> = parents.iter().map(|&p| sig.range_len(p)).collect();
            let expected: usize = dims.iter().product();
            if rows.len() != expected {
                report.push(Violation::RowCountMismatch {
                    child: sig.name(var).to_string(),
                    expected,
                    got: rows.len(),
                });
                continue;
            }
            let table = ConditionalTable { parents, dims, rows };
            for ix in 0..table.row_count() {
                let row = table.row(ix);
                debug_assert_eq!(row.len(), sig.range_len(var), "dense rows over the range");
                for (v, p) in row.probs.iter().enumerate() {
                    if p.is_negative() {
                        report.push(Violation::NegativeProbability {
                            var: sig.name(var).to_string(),
                            row: table.describe_row(&sig, ix),
                            value: sig.value(var, v as u32).clone(),
                        });
                    }
                }
                if row.sum() != Rational::one() {
                    report.push(Violation::NonUnitRowSum {
                        var: sig.name(var).to_string(),
                        row: table.describe_row(&sig, ix),
                        sum: row.sum().to_string(),
                    });
                }
                if sig.kind(var) == VarKind::Exogenous {
                    for (v, p) in row.probs.iter().enumerate() {
                        if p.is_zero() {
                            report.push(Violation::ExogenousZeroSupport {
                                var: sig.name(var).to_string(),
                                value: sig.value(var, v as u32).clone(),
                            });
                        }
                    }
                }
            }
            built[var.index()] = Some(table);
        }
        for id in sig.var_ids() {
            if built[id.index()].is_none() {
                report.push(Violation::MissingEquation { var: sig.name(id).to_string() });
            }
        }
        report.into_result()?;
        Ok(PModel {
            sig,
            graph,
            tables: built.into_iter().map(Option::unwrap).collect(),
        })
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn graph(&self) -> &CausalGraph {
        &self.graph
    }

    pub fn table(&self, var: VarId) -> &ConditionalTable {
        &self.tables[var.index()]
    }

    /// Causal-Markov product of the per-variable row entries at `w`.
    pub fn joint_probability(&self, w: &World) -> Rational {
        let mut acc = Rational::one();
        for id in self.sig.var_ids() {
            let table = &self.tables[id.index()];
            let p = table.row(table.row_index_for(w)).get(w.value_ix(id));
            if p.is_zero() {
                return Rational::zero();
            }
            acc *= p;
        }
        acc
    }

    /// A world is a solution when its joint probability is positive.
    pub fn is_solution(&self, w: &World) -> bool {
        !self.joint_probability(w).is_zero()
    }

    /// All positive-probability worlds with their joint probabilities, in
    /// canonical world order. Enumeration only branches into support.
    pub fn support(&self) -> Vec<(World, Rational)> {
        let order = self.solve_order();
        let mut current = vec![0u32; self.sig.len()];
        let mut out = Vec::new();
        self.enumerate(&order, 0, Rational::one(), &mut current, &mut out);
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    fn solve_order(&self) -> Vec<VarId> {
        self.graph.topological_order().expect("validated acyclic")
    }

    fn enumerate(
        &self,
        order: &[VarId],
        depth: usize,
        acc: Rational,
        current: &mut Vec<u32>,
        out: &mut Vec<(World, Rational)>,
    ) {
        if depth == order.len() {
            let w = World::from_indices(&self.sig, current.clone()).expect("in-range by construction");
            out.push((w, acc));
            return;
        }
        let var = order[depth];
        let table = &self.tables[var.index()];
        let row = table.row(table.row_index_in(|p| current[p.index()]));
        for (val, p) in row.support() {
            current[var.index()] = val;
            self.enumerate(order, depth + 1, acc.clone() * p, current, out);
        }
    }

    /// The NSEM whose rows are exactly the supports of this model's rows; the
    /// canonical witness this model is consistent with.
    pub fn support_nsem(&self) -> Model {
        let equations: Vec<(VarId, Vec<ValueSet>)> = self
            .sig
            .endogenous()
            .iter()
            .map(|&v| {
                let table = &self.tables[v.index()];
                (v, table.rows().map(Distribution::support_set).collect())
            })
            .collect();
        Model::from_parts(Arc::clone(&self.sig), self.graph.clone(), equations)
            .expect("support of a valid probabilistic model is total")
    }

    /// Consistency: identical signature and graph, and row supports matching
    /// the NSEM's rows for every endogenous variable.
    pub fn consistent_with(&self, m: &Model) -> bool {
        self.consistency_failure(m).is_none()
    }

    /// Why this model is not consistent with `m`, if it is not.
    pub fn consistency_failure(&self, m: &Model) -> Option<String> {
        if *self.sig != **m.signature() {
            return Some("signatures differ".to_string());
        }
        if self.graph != *m.graph() {
            return Some("graphs differ".to_string());
        }
        for &v in self.sig.endogenous() {
            let table = &self.tables[v.index()];
            let eq = m.equation(v).expect("valid model");
            for ix in 0..table.row_count() {
                let support = table.row(ix).support_set();
                if &support != eq.row(ix) {
                    return Some(format!(
                        "support of `{}` at {} is {} but the equation row is {}",
                        self.sig.name(v),
                        table.describe_row(&self.sig, ix),
                        support.display(&self.sig, v),
                        eq.row(ix).display(&self.sig, v),
                    ));
                }
            }
        }
        None
    }

    /// Probabilistic actualized refinement: for *every* variable, exogenous
    /// ones included, the actually-used row becomes the point distribution at
    /// the observed value.
    pub fn actualized_refinement(&self, w: &World) -> Result<PModel, ProbError> {
        if !self.is_solution(w) {
            return Err(ProbError::NotASolution(w.display(&self.sig)));
        }
        let mut tables = self.tables.clone();
        for id in self.sig.var_ids() {
            let table = &mut tables[id.index()];
            let ix = table.row_index_for(w);
            table.rows[ix] = table.rows[ix].pinned(w.value_ix(id));
        }
        Ok(PModel { sig: Arc::clone(&self.sig), graph: self.graph.clone(), tables })
    }

    /// Intervened model: each target becomes a parentless point distribution
    /// and loses its incoming edges.
    pub fn intervene(&self, iv: &Intervention) -> PModel {
        let mut tables = self.tables.clone();
        for &(var, val) in iv.pairs() {
            tables[var.index()] = ConditionalTable {
                parents: Vec::new(),
                dims: Vec::new(),
                rows: vec![Distribution::point(val, self.sig.range_len(var))],
            };
        }
        let targets: Vec<VarId> = iv.vars().collect();
        PModel {
            sig: Arc::clone(&self.sig),
            graph: self.graph.without_incoming(&targets),
            tables,
        }
    }

    /// P*(phi | do(iv), w): the probability of `phi` after refining at `w`
    /// and then intervening. An exact sum over the surged model's support.
    pub fn counterfactual_probability(
        &self,
        w: &World,
        iv: &Intervention,
        phi: &BasicFormula,
    ) -> Result<Rational, ProbError> {
        let surged = self.actualized_refinement(w)?.intervene(iv);
        let mut acc = Rational::zero();
        for (world, p) in surged.support() {
            if eval_basic(phi, &world) {
                acc += p;
            }
        }
        Ok(acc)
    }

    /// The full counterfactual distribution over states (contexts summed
    /// out).
    pub fn counterfactual_state_distribution(
        &self,
        w: &World,
        iv: &Intervention,
    ) -> Result<StateDistribution, ProbError> {
        let surged = self.actualized_refinement(w)?.intervene(iv);
        let mut probs: BTreeMap<Box<[u32]>, Rational> = BTreeMap::new();
        for (world, p) in surged.support() {
            let key: Box<[u32]> = self
                .sig
                .endogenous()
                .iter()
                .map(|&v| world.value_ix(v))
                .collect();
            *probs.entry(key).or_insert_with(Rational::zero) += p;
        }
        Ok(StateDistribution { probs })
    }

    /// Satisfaction of probabilistic causal formulas at a solution world.
    /// `phi = p` (basic target) holds via the 0/1 clause; `[iv] phi = p`
    /// holds iff the counterfactual probability equals `p` exactly.
    pub fn satisfies(&self, w: &World, f: &ProbCausalFormula) -> Result<bool, ProbError> {
        if !self.is_solution(w) {
            return Err(ProbError::NotASolution(w.display(&self.sig)));
        }
        self.eval(w, f)
    }

    fn eval(&self, w: &World, f: &ProbCausalFormula) -> Result<bool, ProbError> {
        Ok(match f {
            ProbCausalFormula::Assert(target, p) => match target {
                ProbTarget::Basic(phi) => {
                    let truth = eval_basic(phi, w);
                    (p.is_one() && truth) || (p.is_zero() && !truth)
                }
                ProbTarget::Box(iv, phi) => self.counterfactual_probability(w, iv, phi)? == *p,
            },
            ProbCausalFormula::Not(g) => !self.eval(w, g)?,
            ProbCausalFormula::And(a, b) => self.eval(w, a)? && self.eval(w, b)?,
            ProbCausalFormula::Or(a, b) => self.eval(w, a)? || self.eval(w, b)?,
            ProbCausalFormula::Implies(a, b) => !self.eval(w, a)? || self.eval(w, b)?,
        })
    }
}

// ---------------------------------------------------------------------------
// State distributions
// ---------------------------------------------------------------------------

/// A distribution over endogenous states, keyed by value indices in canonical
/// variable order. Only nonzero entries are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateDistribution {
    probs: BTreeMap<Box<[u32]>, Rational>,
}

impl StateDistribution {
    pub fn entries(&self) -> impl Iterator<Item = (&[u32], &Rational)> {
        self.probs.iter().map(|(k, v)| (k.as_ref(), v))
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn sum(&self) -> Rational {
        self.probs.values().sum()
    }

    pub fn probability_of(&self, key: &[u32]) -> Rational {
        self.probs.get(key).cloned().unwrap_or_else(Rational::zero)
    }

    /// Renders entries as `T=1, H=0: 1/5` lines against the signature whose
    /// endogenous variables key this distribution.
    pub fn display(&self, sig: &Signature) -> String {
        let endo = sig.endogenous();
        let mut out = String::new();
        for (key, p) in &self.probs {
            let parts: Vec<String> = endo
                .iter()
                .zip(key.iter())
                .map(|(&v, &ix)| format!("{}={}", sig.name(v), sig.value(v, ix)))
                .collect();
            out.push_str(&format!("{}: {}\n", parts.join(", "), p));
        }
        out
    }
}

impl fmt::Display for StateDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (key, p) in &self.probs {
            writeln!(f, "{key:?}: {p}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Causal Bayesian networks
// ---------------------------------------------------------------------------

/// An exogenous-free probabilistic model: the form a PNSEM takes after its
/// exogenous variables are marginalized out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cbn {
    model: PModel,
}

impl Cbn {
    pub fn new(model: PModel) -> Result<Cbn, CbnError> {
        if !model.sig.exogenous().is_empty() {
            return Err(CbnError::NotExogenousFree(
                model.sig.exogenous().iter().map(|&v| model.sig.name(v).to_string()).collect(),
            ));
        }
        Ok(Cbn { model })
    }

    pub fn model(&self) -> &PModel {
        &self.model
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.model.sig
    }

    /// The direct counterfactual distribution, computed as the literal
    /// product formula: every non-intervened variable contributes its table
    /// with the actually-used row pinned to the observed value, intervened
    /// variables contribute point factors, and the probability of each
    /// candidate state is the product of its factors. Deliberately does not
    /// reuse the refine-then-intervene machinery, so the two routes check
    /// each other.
    pub fn counterfactual(
        &self,
        state: &World,
        iv: &Intervention,
    ) -> Result<StateDistribution, CbnError> {
        let model = &self.model;
        let sig = &model.sig;
        if !model.is_solution(state) {
            return Err(CbnError::OutsideSupport(state.display(sig)));
        }

        // per-variable pinned row indices (None for intervened variables)
        let pinned_row: Vec<Option<usize>> = sig
            .var_ids()
            .map(|v| {
                if iv.value_for(v).is_some() {
                    None
                } else {
                    Some(model.table(v).row_index_for(state))
                }
            })
            .collect();

        let order = model.graph.topological_order().expect("validated acyclic");
        let mut probs: BTreeMap<Box<[u32]>, Rational> = BTreeMap::new();
        let mut current = vec![0u32; sig.len()];
        self.product_states(&order, 0, Rational::one(), state, iv, &pinned_row, &mut current, &mut probs);
        Ok(StateDistribution { probs })
    }

    #[allow(clippy::too_many_arguments)]
    fn product_states(
        &self,
        order: &[VarId],
        depth: usize,
        acc: Rational,
        state: &World,
        iv: &Intervention,
        pinned_row: &[Option<usize>],
        current: &mut Vec<u32>,
        probs: &mut BTreeMap<Box<[u32]>, Rational>,
    ) {
        let sig = &self.model.sig;
        if depth == order.len() {
            let key: Box<[u32]> = sig.endogenous().iter().map(|&v| current[v.index()]).collect();
            *probs.entry(key).or_insert_with(Rational::zero) += acc;
            return;
        }
        let var = order[depth];
        match iv.value_for(var) {
            Some(forced) => {
                // point factor at the intervened value
                current[var.index()] = forced;
                self.product_states(order, depth + 1, acc, state, iv, pinned_row, current, probs);
            }
            None => {
                let table = self.model.table(var);
                let actual_row = pinned_row[var.index()].expect("non-intervened rows are pinned");
                let row_here = table.row_index_in(|p| current[p.index()]);
                if row_here == actual_row {
                    // pinned: all mass on the observed value
                    current[var.index()] = state.value_ix(var);
                    self.product_states(order, depth + 1, acc, state, iv, pinned_row, current, probs);
                } else {
                    for (val, p) in table.row(row_here).support() {
                        current[var.index()] = val;
                        self.product_states(
                            order,
                            depth + 1,
                            acc.clone() * p,
                            state,
                            iv,
                            pinned_row,
                            current,
                            probs,
                        );
                    }
                }
            }
        }
    }
}

impl PModel {
    /// The distribution over endogenous states: contexts summed out of the
    /// joint.
    pub fn state_distribution(&self) -> StateDistribution {
        let mut probs: BTreeMap<Box<[u32]>, Rational> = BTreeMap::new();
        for (world, p) in self.support() {
            let key: Box<[u32]> =
                self.sig.endogenous().iter().map(|&v| world.value_ix(v)).collect();
            *probs.entry(key).or_insert_with(Rational::zero) += p;
        }
        StateDistribution { probs }
    }
}

/// Marginalizes the exogenous variables out of a Markovian PNSEM, yielding
/// the induced causal Bayesian network. Fails when two endogenous variables
/// share an exogenous parent.
pub fn induce_cbn(pm: &PModel) -> Result<Cbn, CbnError> {
    let sig = pm.signature();

    for &u in sig.exogenous() {
        let children: Vec<VarId> = sig
            .endogenous()
            .iter()
            .copied()
            .filter(|&v| pm.graph().has_edge(u, v))
            .collect();
        if children.len() > 1 {
            return Err(CbnError::SharedExogenousParent {
                exo: sig.name(u).to_string(),
                children: children.iter().map(|&v| sig.name(v).to_string()).collect(),
            });
        }
    }

    // endogenous-only signature; name order is preserved, so the k-th
    // endogenous variable of the old signature becomes VarId(k)
    let endo = sig.endogenous();
    let new_sig = Signature::new(
        endo.iter()
            .map(|&v| (sig.name(v).to_string(), VarKind::Endogenous, sig.range(v).to_vec()))
            .collect(),
    )
    .expect("endogenous subset of a valid signature");
    let new_id = |old: VarId| -> VarId {
        VarId(endo.binary_search(&old).expect("endogenous variable") as u32)
    };

    let edges: Vec<(VarId, VarId)> = pm
        .graph()
        .edges()
        .into_iter()
        .filter(|&(a, b)| sig.kind(a) == VarKind::Endogenous && sig.kind(b) == VarKind::Endogenous)
        .map(|(a, b)| (new_id(a), new_id(b)))
        .collect();
    let new_graph = CausalGraph::new(endo.len(), &edges);

    let mut tables = Vec::with_capacity(endo.len());
    for &v in endo {
        let table = pm.table(v);
        let full_parents = table.parents();
        let endo_pos: Vec<usize> = (0..full_parents.len())
            .filter(|&i| sig.kind(full_parents[i]) == VarKind::Endogenous)
            .collect();
        let exo_pos: Vec<usize> = (0..full_parents.len())
            .filter(|&i| sig.kind(full_parents[i]) == VarKind::Exogenous)
            .collect();
        let endo_dims: Vec<usize> =
            endo_pos.iter().map(|&i| sig.range_len(full_parents[i])).collect();
        let exo_dims: Vec<usize> =
            exo_pos.iter().map(|&i| sig.range_len(full_parents[i])).collect();

        let mut rows = Vec::new();
        for endo_key in crate::signature::mixed_radix(&endo_dims) {
            let mut probs = vec![Rational::zero(); sig.range_len(v)];
            for exo_key in crate::signature::mixed_radix(&exo_dims) {
                // weight of this exogenous configuration
                let mut weight = Rational::one();
                for (slot, &i) in exo_pos.iter().enumerate() {
                    let w_table = pm.table(full_parents[i]);
                    weight *= w_table.row(0).get(exo_key[slot] as u32);
                }
                // assemble the full parent key
                let mut full_key = vec![0u32; full_parents.len()];
                for (slot, &i) in endo_pos.iter().enumerate() {
                    full_key[i] = endo_key[slot] as u32;
                }
                for (slot, &i) in exo_pos.iter().enumerate() {
                    full_key[i] = exo_key[slot] as u32;
                }
                let row = table.row(table.row_index(&full_key));
                for (val, p) in row.support() {
                    probs[val as usize] += weight.clone() * p;
                }
            }
            rows.push(Distribution::new(probs));
        }
        tables.push((new_id(v), rows));
    }

    let model = PModel::from_parts(new_sig, new_graph, tables)
        .expect("marginalization preserves row normalization");
    Cbn::new(model)
}

// ---------------------------------------------------------------------------
// Random probability assignment (for consistency sweeps)
// ---------------------------------------------------------------------------

/// Equips an NSEM with random positive rational probabilities over exactly
/// its row supports (and full-support exogenous tables), producing a
/// probabilistic model consistent with it. Deterministic in the seed.
pub fn randomize_probabilities(m: &Model, seed: u64) -> PModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sig = m.signature();
    let mut tables = Vec::new();
    for id in sig.var_ids() {
        let rows: Vec<Distribution> = match m.equation(id) {
            None => {
                let weights: Vec<u32> =
                    (0..sig.range_len(id)).map(|_| rng.gen_range(1..=4)).collect();
                vec![weighted(&weights, |v| v < sig.range_len(id) as u32)]
            }
            Some(eq) => eq
                .rows()
                .map(|row| {
                    let weights: Vec<u32> =
                        (0..sig.range_len(id)).map(|_| rng.gen_range(1..=4)).collect();
                    weighted(&weights, |v| row.contains(v))
                })
                .collect(),
        };
        tables.push((id, rows));
    }
    PModel::from_parts(Arc::clone(sig), m.graph().clone(), tables)
        .expect("weights normalize exactly")
}

fn weighted(weights: &[u32], in_support: impl Fn(u32) -> bool) -> Distribution {
    let total: u32 = weights
        .iter()
        .enumerate()
        .filter(|&(v, _)| in_support(v as u32))
        .map(|(_, &w)| w)
        .sum();
    let probs = weights
        .iter()
        .enumerate()
        .map(|(v, &w)| {
            if in_support(v as u32) {
                Rational::new(w.into(), total.into())
            } else {
                Rational::zero()
            }
        })
        .collect();
    Distribution::new(probs)
}
