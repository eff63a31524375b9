//! Axiom schemas for causal reasoning, instantiated over concrete signatures
//! and stress-tested by counterexample search across seeded random models.
//!
//! The schema ids D0..D10 follow the standard axiomatization of deterministic
//! causal models: propositional tautologies (D0), functionality (D1),
//! definiteness (D2), weak/strong composition (D3a/D3b), effectiveness (D4),
//! reversibility (D5), recursiveness (D6), distribution (D7), generalization
//! (D8), unique outcomes for near-total interventions (D9), and the
//! at-least-one / at-most-one outcome pair (D10a/D10b), plus the weakening
//! D10c (at most one *actual* outcome). Under multi-valued equations the
//! sweep finds D9 and D10b to fail in both evaluation modes, and D10c to fail
//! in interventionist mode while holding in counterfactual mode; everything
//! else passes.
//!
//! Recursiveness needs a dependence shorthand `Y ~> Z`. We expand it with box
//! modalities: some intervention leaves `Z` forced to one value and forcing
//! `Y` on top re-forces `Z` to a different one. With diamonds instead of
//! boxes (the two are interchangeable only under unique outcomes) mere
//! attainability of two `Z`-values would count as dependence, making the
//! schema fail on models with unrelated nondeterministic variables; the box
//! form is the one that tracks the functional-dependence graph.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::format::{compile_model, model_to_file, ModelFile};
use crate::formula::{BasicFormula, CausalFormula, Intervention};
use crate::graph::CausalGraph;
use crate::model::{Model, PartialWorld, ValueSet, World};
use crate::parse::parse_causal;
use crate::semantics::{Evaluator, SettingLevel};
use crate::signature::{mixed_radix, Signature, Value, VarId, VarKind};

// ---------------------------------------------------------------------------
// Reference models
// ---------------------------------------------------------------------------

/// Small hand-built models whose (counter)example behavior is pinned by
/// tests; the sweep corpus seeds them in ahead of the random models.
pub mod reference {
    use super::*;

    fn binary_endo(names: &[&str]) -> Arc<Signature> {
        Signature::new(
            names
                .iter()
                .map(|n| (n.to_string(), VarKind::Endogenous, vec![Value::Int(0), Value::Int(1)]))
                .collect(),
        )
        .expect("well-formed signature")
    }

    /// `Y -> X` with `f_Y() = {0,1}`, `f_X(Y=0) = {0}`, `f_X(Y=1) = {0,1}`:
    /// forcing `Y = 1` leaves `X` genuinely open, which breaks the
    /// unique-outcome axioms D9 and D10b.
    pub fn model_a() -> Model {
        let sig = binary_endo(&["X", "Y"]);
        let (x, y) = (sig.lookup("X").unwrap(), sig.lookup("Y").unwrap());
        Model::from_parts(
            Arc::clone(&sig),
            CausalGraph::new(2, &[(y, x)]),
            vec![
                (x, vec![ValueSet::new(vec![0]), ValueSet::new(vec![0, 1])]),
                (y, vec![ValueSet::new(vec![0, 1])]),
            ],
        )
        .expect("reference model is valid")
    }

    /// A single binary endogenous `X` with `f_X() = {0,1}`: both outcomes are
    /// attainable across solutions, which breaks D10c in interventionist
    /// mode.
    pub fn model_b() -> Model {
        let sig = binary_endo(&["X"]);
        let x = sig.lookup("X").unwrap();
        Model::from_parts(
            Arc::clone(&sig),
            CausalGraph::new(1, &[]),
            vec![(x, vec![ValueSet::new(vec![0, 1])])],
        )
        .expect("reference model is valid")
    }

    /// `X -> Y` with `f_X() = {1}`, `f_Y(X=0) = {0}`, `f_Y(X=1) = {0,1}`: the
    /// chain where intervening with the actual value must preserve the
    /// actual outcome (conjunction conditionalization).
    pub fn model_c() -> Model {
        let sig = binary_endo(&["X", "Y"]);
        let (x, y) = (sig.lookup("X").unwrap(), sig.lookup("Y").unwrap());
        Model::from_parts(
            Arc::clone(&sig),
            CausalGraph::new(2, &[(x, y)]),
            vec![
                (x, vec![ValueSet::new(vec![1])]),
                (y, vec![ValueSet::new(vec![0]), ValueSet::new(vec![0, 1])]),
            ],
        )
        .expect("reference model is valid")
    }

    pub fn all() -> Vec<(String, Model)> {
        vec![
            ("reference-a".to_string(), model_a()),
            ("reference-b".to_string(), model_b()),
            ("reference-c".to_string(), model_c()),
        ]
    }
}

// ---------------------------------------------------------------------------
// Ids, modes, budgets
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AxiomId {
    D0,
    D1,
    D2,
    D3a,
    D3b,
    D4,
    D5,
    D6,
    D7,
    D8,
    D9,
    D10a,
    D10b,
    D10c,
}

impl AxiomId {
    pub const ALL: [AxiomId; 14] = [
        AxiomId::D0,
        AxiomId::D1,
        AxiomId::D2,
        AxiomId::D3a,
        AxiomId::D3b,
        AxiomId::D4,
        AxiomId::D5,
        AxiomId::D6,
        AxiomId::D7,
        AxiomId::D8,
        AxiomId::D9,
        AxiomId::D10a,
        AxiomId::D10b,
        AxiomId::D10c,
    ];

    /// The system of schemas expected to hold over total acyclic models in
    /// both modes (D0-D8 with strong composition, plus D10a).
    pub const SOUND_CORE: [AxiomId; 12] = [
        AxiomId::D0,
        AxiomId::D1,
        AxiomId::D2,
        AxiomId::D3a,
        AxiomId::D3b,
        AxiomId::D4,
        AxiomId::D5,
        AxiomId::D6,
        AxiomId::D7,
        AxiomId::D8,
        AxiomId::D10a,
        AxiomId::D10c,
    ];

    /// Whether the schema is expected to survive the sweep in the given mode.
    pub fn expected_sound(self, mode: Mode) -> bool {
        match self {
            AxiomId::D9 | AxiomId::D10b => false,
            AxiomId::D10c => mode == Mode::Counterfactual,
            _ => true,
        }
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AxiomId::D0 => "D0",
            AxiomId::D1 => "D1",
            AxiomId::D2 => "D2",
            AxiomId::D3a => "D3a",
            AxiomId::D3b => "D3b",
            AxiomId::D4 => "D4",
            AxiomId::D5 => "D5",
            AxiomId::D6 => "D6",
            AxiomId::D7 => "D7",
            AxiomId::D8 => "D8",
            AxiomId::D9 => "D9",
            AxiomId::D10a => "D10a",
            AxiomId::D10b => "D10b",
            AxiomId::D10c => "D10c",
        };
        write!(f, "{s}")
    }
}

impl FromStr for AxiomId {
    type Err = String;

    fn from_str(s: &str) -> Result<AxiomId, String> {
        let lower = s.trim().to_ascii_lowercase();
        AxiomId::ALL
            .into_iter()
            .find(|id| id.to_string().to_ascii_lowercase() == lower)
            .ok_or_else(|| format!("unknown axiom `{s}` (expected D0..D8, D3a/D3b, D9, D10a/D10b/D10c)"))
    }
}

/// Which settings the check quantifies over: full solution worlds
/// (counterfactual reasoning) or contexts (interventionist reasoning).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "cf")]
    Counterfactual,
    #[serde(rename = "iv")]
    Interventionist,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Counterfactual => write!(f, "cf"),
            Mode::Interventionist => write!(f, "iv"),
        }
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Mode, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cf" | "counterfactual" => Ok(Mode::Counterfactual),
            "iv" | "interventionist" => Ok(Mode::Interventionist),
            other => Err(format!("unknown mode `{other}` (expected `cf` or `iv`)")),
        }
    }
}

/// Enumeration bounds. Instantiation order is canonical (sorted variables,
/// declared value order, subsets by size), so a budget prefix is always the
/// same prefix; summaries record whether it truncated anything.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    /// Cap on instances per axiom per model.
    pub max_instances: usize,
    /// Largest intervention enumerated for the generic schemas.
    pub max_intervention_size: usize,
    /// Cap on the basic-formula pool fed to phi parameters.
    pub max_phi: usize,
    /// D5/D6 only instantiate when the signature has at most this many
    /// endogenous variables (their dependence expansion is exponential).
    pub dependence_max_vars: usize,
    /// ... and every range at most this large.
    pub dependence_max_range: usize,
    /// Longest D6 chain (number of dependence hops).
    pub max_chain: usize,
}

impl Default for Budget {
    fn default() -> Budget {
        Budget {
            max_instances: 96,
            max_intervention_size: 2,
            max_phi: 10,
            dependence_max_vars: 4,
            dependence_max_range: 3,
            max_chain: 2,
        }
    }
}

// ---------------------------------------------------------------------------
// Instantiation
// ---------------------------------------------------------------------------

/// One concrete formula produced from a schema over a signature.
#[derive(Debug, Clone)]
pub struct AxiomInstance {
    pub axiom: AxiomId,
    /// Human-readable parameter choice.
    pub params: String,
    pub formula: CausalFormula,
}

/// All instances enumerated within the budget. `complete` is false when the
/// budget cut the enumeration short (or a dependence guard skipped it).
#[derive(Debug, Clone)]
pub struct InstanceSet {
    pub instances: Vec<AxiomInstance>,
    pub complete: bool,
}

struct Sink {
    axiom: AxiomId,
    out: Vec<AxiomInstance>,
    cap: usize,
    truncated: bool,
}

impl Sink {
    fn new(axiom: AxiomId, cap: usize) -> Sink {
        Sink { axiom, out: Vec::new(), cap, truncated: false }
    }

    /// Returns false once the cap is hit; generators stop eagerly.
    fn push(&mut self, params: String, formula: CausalFormula) -> bool {
        if self.out.len() >= self.cap {
            self.truncated = true;
            return false;
        }
        self.out.push(AxiomInstance { axiom: self.axiom, params, formula });
        true
    }

    fn finish(self) -> InstanceSet {
        InstanceSet { instances: self.out, complete: !self.truncated }
    }
}

/// All interventions over endogenous variables up to the given size, in
/// canonical order (by size, then variable tuple, then values). Starts with
/// the empty intervention.
fn interventions_up_to(sig: &Signature, max_size: usize) -> Vec<Intervention> {
    let endo = sig.endogenous();
    let mut out = vec![Intervention::empty()];
    for size in 1..=max_size.min(endo.len()) {
        for combo in var_combinations(endo, size) {
            let dims: Vec<usize> = combo.iter().map(|&v| sig.range_len(v)).collect();
            for values in mixed_radix(&dims) {
                let pairs: Vec<(VarId, u32)> =
                    combo.iter().zip(&values).map(|(&v, &x)| (v, x as u32)).collect();
                out.push(Intervention::new(sig, pairs).expect("enumerated in range"));
            }
        }
    }
    out
}

/// Sorted `size`-subsets of `vars`, lexicographically.
fn var_combinations(vars: &[VarId], size: usize) -> Vec<Vec<VarId>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(size);
    fn rec(vars: &[VarId], size: usize, start: usize, current: &mut Vec<VarId>, out: &mut Vec<Vec<VarId>>) {
        if current.len() == size {
            out.push(current.clone());
            return;
        }
        for i in start..vars.len() {
            current.push(vars[i]);
            rec(vars, size, i + 1, current, out);
            current.pop();
        }
    }
    rec(vars, size, 0, &mut current, &mut out);
    out
}

/// The deterministic basic-formula pool for phi parameters: `true`, atoms,
/// negated atoms, then a few two-atom conjunctions and disjunctions.
fn phi_pool(sig: &Signature, cap: usize) -> Vec<BasicFormula> {
    let mut pool = vec![BasicFormula::True];
    let mut atoms = Vec::new();
    for &v in sig.endogenous() {
        for x in 0..sig.range_len(v) as u32 {
            atoms.push(BasicFormula::Atom(v, x));
        }
    }
    pool.extend(atoms.iter().cloned());
    pool.extend(atoms.iter().cloned().map(BasicFormula::not));
    'outer: for (i, a) in atoms.iter().enumerate() {
        for b in atoms.iter().skip(i + 1) {
            if let (BasicFormula::Atom(va, _), BasicFormula::Atom(vb, _)) = (a, b) {
                if va == vb {
                    continue;
                }
            }
            pool.push(BasicFormula::and(a.clone(), b.clone()));
            pool.push(BasicFormula::or(a.clone(), b.clone()));
            if pool.len() > 4 * cap {
                break 'outer;
            }
        }
    }
    pool.truncate(cap);
    pool
}

/// Instantiates a schema over a signature within the budget.
pub fn instances(axiom: AxiomId, sig: &Signature, budget: &Budget) -> InstanceSet {
    let mut sink = Sink::new(axiom, budget.max_instances);
    let ivs = interventions_up_to(sig, budget.max_intervention_size);
    let phis = phi_pool(sig, budget.max_phi);
    let endo = sig.endogenous();
    let label = |iv: &Intervention| {
        CausalFormula::Box(iv.clone(), BasicFormula::True)
            .print(sig)
            .trim_end_matches(" true")
            .to_string()
    };

    match axiom {
        AxiomId::D0 => {
            // propositional tautology shapes over basic causal formulas
            let mut pool: Vec<CausalFormula> = Vec::new();
            for iv in ivs.iter().filter(|iv| iv.len() <= 1) {
                for phi in phis.iter().take(4) {
                    pool.push(CausalFormula::Box(iv.clone(), phi.clone()));
                    pool.push(CausalFormula::Diamond(iv.clone(), phi.clone()));
                }
            }
            'd0: for (i, a) in pool.iter().enumerate() {
                let excluded = CausalFormula::or(a.clone(), CausalFormula::not(a.clone()));
                if !sink.push(format!("excluded middle over {}", a.print(sig)), excluded) {
                    break;
                }
                let refl = CausalFormula::implies(a.clone(), a.clone());
                if !sink.push(format!("reflexivity over {}", a.print(sig)), refl) {
                    break;
                }
                for b in pool.iter().skip(i + 1).take(2) {
                    let weaken = CausalFormula::implies(
                        CausalFormula::and(a.clone(), b.clone()),
                        a.clone(),
                    );
                    if !sink.push("conjunction weakening".to_string(), weaken) {
                        break 'd0;
                    }
                    let mp = CausalFormula::implies(
                        CausalFormula::and(
                            CausalFormula::implies(a.clone(), b.clone()),
                            a.clone(),
                        ),
                        b.clone(),
                    );
                    if !sink.push("modus-ponens shape".to_string(), mp) {
                        break 'd0;
                    }
                }
            }
        }
        AxiomId::D1 => {
            'd1: for iv in &ivs {
                for &x_var in endo {
                    let n = sig.range_len(x_var) as u32;
                    for x in 0..n {
                        for x2 in 0..n {
                            if x == x2 {
                                continue;
                            }
                            let body = BasicFormula::implies(
                                BasicFormula::Atom(x_var, x),
                                BasicFormula::not(BasicFormula::Atom(x_var, x2)),
                            );
                            let params = format!(
                                "{} with {}={} vs {}",
                                label(iv),
                                sig.name(x_var),
                                sig.value(x_var, x),
                                sig.value(x_var, x2)
                            );
                            if !sink.push(params, CausalFormula::Box(iv.clone(), body)) {
                                break 'd1;
                            }
                        }
                    }
                }
            }
        }
        AxiomId::D2 => {
            'd2: for iv in &ivs {
                for &x_var in endo {
                    let body = BasicFormula::disj(
                        (0..sig.range_len(x_var) as u32).map(|x| BasicFormula::Atom(x_var, x)),
                    );
                    let params = format!("{} over {}", label(iv), sig.name(x_var));
                    if !sink.push(params, CausalFormula::Box(iv.clone(), body)) {
                        break 'd2;
                    }
                }
            }
        }
        AxiomId::D3a | AxiomId::D3b => {
            let strong = axiom == AxiomId::D3b;
            'd3: for iv in &ivs {
                for &w_var in endo {
                    if iv.vars().any(|v| v == w_var) {
                        continue;
                    }
                    for w in 0..sig.range_len(w_var) as u32 {
                        let extended = iv.extended(sig, w_var, w).expect("W not in iv");
                        for phi in &phis {
                            let premise_body = BasicFormula::and(
                                BasicFormula::Atom(w_var, w),
                                phi.clone(),
                            );
                            let (premise, conclusion) = if strong {
                                (
                                    CausalFormula::Box(iv.clone(), premise_body),
                                    CausalFormula::Box(extended.clone(), phi.clone()),
                                )
                            } else {
                                (
                                    CausalFormula::Diamond(iv.clone(), premise_body),
                                    CausalFormula::Diamond(extended.clone(), phi.clone()),
                                )
                            };
                            let params = format!(
                                "{} composed with {}={}, phi={}",
                                label(iv),
                                sig.name(w_var),
                                sig.value(w_var, w),
                                phi.print(sig)
                            );
                            if !sink.push(params, CausalFormula::implies(premise, conclusion)) {
                                break 'd3;
                            }
                        }
                    }
                }
            }
        }
        AxiomId::D4 => {
            'd4: for iv in ivs.iter().filter(|iv| !iv.is_empty()) {
                let body = BasicFormula::conj(
                    iv.pairs().iter().map(|&(v, x)| BasicFormula::Atom(v, x)),
                );
                if !sink.push(label(iv), CausalFormula::Box(iv.clone(), body)) {
                    break 'd4;
                }
            }
        }
        AxiomId::D5 => {
            if gate_dependence(sig, budget) {
                instantiate_d5(sig, &mut sink);
            } else {
                sink.truncated = true;
            }
        }
        AxiomId::D6 => {
            if gate_dependence(sig, budget) {
                instantiate_d6(sig, budget, &mut sink);
            } else {
                sink.truncated = true;
            }
        }
        AxiomId::D7 => {
            'd7: for iv in &ivs {
                for phi in phis.iter().take(5) {
                    for psi in phis.iter().take(5) {
                        let premise = CausalFormula::and(
                            CausalFormula::Box(iv.clone(), phi.clone()),
                            CausalFormula::Box(
                                iv.clone(),
                                BasicFormula::implies(phi.clone(), psi.clone()),
                            ),
                        );
                        let conclusion = CausalFormula::Box(iv.clone(), psi.clone());
                        let params = format!(
                            "{} with phi={}, psi={}",
                            label(iv),
                            phi.print(sig),
                            psi.print(sig)
                        );
                        if !sink.push(params, CausalFormula::implies(premise, conclusion)) {
                            break 'd7;
                        }
                    }
                }
            }
        }
        AxiomId::D8 => {
            let mut tautologies = vec![BasicFormula::True];
            for &v in endo {
                for x in 0..sig.range_len(v) as u32 {
                    tautologies.push(BasicFormula::or(
                        BasicFormula::Atom(v, x),
                        BasicFormula::not(BasicFormula::Atom(v, x)),
                    ));
                }
                tautologies.push(BasicFormula::disj(
                    (0..sig.range_len(v) as u32).map(|x| BasicFormula::Atom(v, x)),
                ));
            }
            for phi in phis.iter().take(3) {
                tautologies.push(BasicFormula::implies(phi.clone(), phi.clone()));
            }
            'd8: for iv in &ivs {
                for taut in &tautologies {
                    let params = format!("{} with {}", label(iv), taut.print(sig));
                    if !sink.push(params, CausalFormula::Box(iv.clone(), taut.clone())) {
                        break 'd8;
                    }
                }
            }
        }
        AxiomId::D9 => {
            // target sets: all of V, and V minus one variable
            let mut targets: Vec<Vec<VarId>> = vec![endo.to_vec()];
            for &skip in endo {
                targets.push(endo.iter().copied().filter(|&v| v != skip).collect());
            }
            'd9: for target in &targets {
                let dims: Vec<usize> = target.iter().map(|&v| sig.range_len(v)).collect();
                for values in mixed_radix(&dims) {
                    let pairs: Vec<(VarId, u32)> =
                        target.iter().zip(&values).map(|(&v, &x)| (v, x as u32)).collect();
                    let iv = Intervention::new(sig, pairs).expect("in range");
                    for phi in phis.iter().take(6) {
                        let inst = CausalFormula::and(
                            CausalFormula::Diamond(iv.clone(), BasicFormula::True),
                            CausalFormula::implies(
                                CausalFormula::Diamond(iv.clone(), phi.clone()),
                                CausalFormula::Box(iv.clone(), phi.clone()),
                            ),
                        );
                        let params = format!("{} with phi={}", label(&iv), phi.print(sig));
                        if !sink.push(params, inst) {
                            break 'd9;
                        }
                    }
                }
            }
        }
        AxiomId::D10a => {
            'd10a: for iv in &ivs {
                if !sink.push(label(iv), CausalFormula::Diamond(iv.clone(), BasicFormula::True)) {
                    break 'd10a;
                }
            }
        }
        AxiomId::D10b => {
            'd10b: for iv in &ivs {
                for phi in &phis {
                    let inst = CausalFormula::implies(
                        CausalFormula::Diamond(iv.clone(), phi.clone()),
                        CausalFormula::Box(iv.clone(), phi.clone()),
                    );
                    let params = format!("{} with phi={}", label(iv), phi.print(sig));
                    if !sink.push(params, inst) {
                        break 'd10b;
                    }
                }
            }
        }
        AxiomId::D10c => {
            let empty = Intervention::empty();
            'd10c: for phi in &phis {
                let inst = CausalFormula::implies(
                    CausalFormula::Diamond(empty.clone(), phi.clone()),
                    CausalFormula::Box(empty.clone(), phi.clone()),
                );
                if !sink.push(format!("phi={}", phi.print(sig)), inst) {
                    break 'd10c;
                }
            }
        }
    }
    sink.finish()
}

fn gate_dependence(sig: &Signature, budget: &Budget) -> bool {
    sig.endogenous().len() <= budget.dependence_max_vars
        && sig
            .var_ids()
            .all(|v| sig.range_len(v) <= budget.dependence_max_range)
}

fn instantiate_d5(sig: &Signature, sink: &mut Sink) {
    let endo = sig.endogenous();
    if endo.len() < 2 {
        return;
    }
    'd5: for &w_var in endo {
        for &y_var in endo {
            if w_var == y_var {
                continue;
            }
            let rest: Vec<VarId> =
                endo.iter().copied().filter(|&v| v != w_var && v != y_var).collect();
            // X ranges over subsets of the remaining variables
            for xsize in 0..=rest.len() {
                for xvars in var_combinations(&rest, xsize) {
                    let zvars: Vec<VarId> =
                        rest.iter().copied().filter(|v| !xvars.contains(v)).collect();
                    let xdims: Vec<usize> = xvars.iter().map(|&v| sig.range_len(v)).collect();
                    let zdims: Vec<usize> = zvars.iter().map(|&v| sig.range_len(v)).collect();
                    for xvals in mixed_radix(&xdims) {
                        let base = Intervention::new(
                            sig,
                            xvars.iter().zip(&xvals).map(|(&v, &x)| (v, x as u32)).collect(),
                        )
                        .expect("in range");
                        for w in 0..sig.range_len(w_var) as u32 {
                            for y in 0..sig.range_len(y_var) as u32 {
                                for zvals in mixed_radix(&zdims) {
                                    let z_eq = BasicFormula::conj(
                                        zvars
                                            .iter()
                                            .zip(&zvals)
                                            .map(|(&v, &x)| BasicFormula::Atom(v, x as u32)),
                                    );
                                    let with_y = base.extended(sig, y_var, y).expect("distinct");
                                    let with_w = base.extended(sig, w_var, w).expect("distinct");
                                    let p1 = CausalFormula::Diamond(
                                        with_y,
                                        BasicFormula::and(
                                            BasicFormula::Atom(w_var, w),
                                            z_eq.clone(),
                                        ),
                                    );
                                    let p2 = CausalFormula::Diamond(
                                        with_w,
                                        BasicFormula::and(
                                            BasicFormula::Atom(y_var, y),
                                            z_eq.clone(),
                                        ),
                                    );
                                    let conclusion = CausalFormula::Diamond(
                                        base.clone(),
                                        BasicFormula::and(
                                            BasicFormula::Atom(w_var, w),
                                            BasicFormula::and(
                                                BasicFormula::Atom(y_var, y),
                                                z_eq.clone(),
                                            ),
                                        ),
                                    );
                                    let params = format!(
                                        "W={}, Y={}, X={:?}",
                                        sig.name(w_var),
                                        sig.name(y_var),
                                        xvars.iter().map(|&v| sig.name(v)).collect::<Vec<_>>(),
                                    );
                                    let inst = CausalFormula::implies(
                                        CausalFormula::and(p1, p2),
                                        conclusion,
                                    );
                                    if !sink.push(params, inst) {
                                        break 'd5;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

/// `from ~> to`: some intervention over other variables forces `to` to one
/// value outright, and additionally forcing `from` re-forces it to a
/// different value.
fn leads_to(sig: &Signature, from: VarId, to: VarId) -> CausalFormula {
    let others: Vec<VarId> = sig
        .endogenous()
        .iter()
        .copied()
        .filter(|&v| v != from && v != to)
        .collect();
    let mut disjuncts = Vec::new();
    for size in 0..=others.len() {
        for xvars in var_combinations(&others, size) {
            let dims: Vec<usize> = xvars.iter().map(|&v| sig.range_len(v)).collect();
            for xvals in mixed_radix(&dims) {
                let base = Intervention::new(
                    sig,
                    xvars.iter().zip(&xvals).map(|(&v, &x)| (v, x as u32)).collect(),
                )
                .expect("in range");
                for fv in 0..sig.range_len(from) as u32 {
                    let forced = base.extended(sig, from, fv).expect("distinct");
                    for z1 in 0..sig.range_len(to) as u32 {
                        for z2 in 0..sig.range_len(to) as u32 {
                            if z1 == z2 {
                                continue;
                            }
                            disjuncts.push(CausalFormula::and(
                                CausalFormula::Box(base.clone(), BasicFormula::Atom(to, z1)),
                                CausalFormula::Box(forced.clone(), BasicFormula::Atom(to, z2)),
                            ));
                        }
                    }
                }
            }
        }
    }
    CausalFormula::disj(disjuncts)
}

fn instantiate_d6(sig: &Signature, budget: &Budget, sink: &mut Sink) {
    let endo = sig.endogenous();
    if endo.len() < 2 {
        return;
    }
    // chains of distinct variables, shortest first
    'd6: for hops in 1..=budget.max_chain {
        if hops + 1 > endo.len() {
            break;
        }
        for chain in ordered_tuples(endo, hops + 1) {
            let premise = CausalFormula::conj(
                chain.windows(2).map(|pair| leads_to(sig, pair[0], pair[1])),
            );
            let back = leads_to(sig, chain[hops], chain[0]);
            let names: Vec<&str> = chain.iter().map(|&v| sig.name(v)).collect();
            let inst = CausalFormula::implies(premise, CausalFormula::not(back));
            if !sink.push(format!("chain {}", names.join("~>")), inst) {
                break 'd6;
            }
        }
    }
}

/// Ordered tuples of distinct variables, lexicographic.
fn ordered_tuples(vars: &[VarId], len: usize) -> Vec<Vec<VarId>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(len);
    fn rec(vars: &[VarId], len: usize, current: &mut Vec<VarId>, out: &mut Vec<Vec<VarId>>) {
        if current.len() == len {
            out.push(current.clone());
            return;
        }
        for &v in vars {
            if current.contains(&v) {
                continue;
            }
            current.push(v);
            rec(vars, len, current, out);
            current.pop();
        }
    }
    rec(vars, len, &mut current, &mut out);
    out
}

// ---------------------------------------------------------------------------
// Checking
// ---------------------------------------------------------------------------

/// The failing setting of a counterexample, replayable from names and values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CexSetting {
    World(Vec<(String, Value)>),
    Context(Vec<(String, Value)>),
}

impl fmt::Display for CexSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (tag, pairs) = match self {
            CexSetting::World(p) => ("world", p),
            CexSetting::Context(p) => ("context", p),
        };
        if pairs.is_empty() {
            write!(f, "{tag} (empty)")
        } else {
            let body: Vec<String> =
                pairs.iter().map(|(n, v)| format!("{n}={v}")).collect();
            write!(f, "{tag} {}", body.join(", "))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceLine {
    pub leaf: String,
    pub value: bool,
}

/// A reproducible refutation: the model, the failing setting, the instance,
/// and the truth values of its modal/basic leaves there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub axiom: AxiomId,
    pub mode: Mode,
    pub model_label: String,
    pub model: ModelFile,
    pub setting: CexSetting,
    pub params: String,
    pub formula: String,
    pub trace: Vec<TraceLine>,
}

impl CounterexampleReport {
    /// Re-evaluates the stored instance at the stored setting; reports are
    /// only valid when this returns false.
    pub fn replay(&self) -> Result<bool, String> {
        let model = compile_model(&self.model).map_err(|e| e.to_string())?;
        let sig = model.signature();
        let formula = parse_causal(&self.formula, sig).map_err(|e| e.to_string())?;
        let level = match &self.setting {
            CexSetting::World(pairs) => {
                let w = World::from_named(sig, pairs.iter().map(|(n, v)| (n.as_str(), v)))
                    .map_err(|e| e.to_string())?;
                SettingLevel::World(w)
            }
            CexSetting::Context(pairs) => {
                let c = PartialWorld::context_from_named(
                    sig,
                    pairs.iter().map(|(n, v)| (n.as_str(), v)),
                )
                .map_err(|e| e.to_string())?;
                SettingLevel::Context(c)
            }
        };
        Ok(Evaluator::new(&model).satisfies(&level, &formula))
    }
}

/// Outcome of checking one axiom against one model in one mode.
#[derive(Debug, Clone)]
pub enum AxiomCheck {
    Pass { instances: usize, settings: usize, complete: bool },
    Counterexample(Box<CounterexampleReport>),
}

fn settings_for(model: &Model, mode: Mode) -> Vec<SettingLevel> {
    let sig = model.signature();
    match mode {
        Mode::Counterfactual => {
            model.solutions().into_iter().map(SettingLevel::World).collect()
        }
        Mode::Interventionist => {
            let exo = sig.exogenous();
            let dims: Vec<usize> = exo.iter().map(|&v| sig.range_len(v)).collect();
            mixed_radix(&dims)
                .map(|key| {
                    let mut ctx = PartialWorld::empty(sig);
                    for (&v, &ix) in exo.iter().zip(&key) {
                        ctx.set(v, ix as u32);
                    }
                    SettingLevel::Context(ctx)
                })
                .collect()
        }
    }
}

fn setting_to_cex(sig: &Signature, level: &SettingLevel) -> CexSetting {
    match level {
        SettingLevel::World(w) => CexSetting::World(
            sig.var_ids()
                .map(|v| (sig.name(v).to_string(), w.value(sig, v).clone()))
                .collect(),
        ),
        SettingLevel::Context(c) => CexSetting::Context(
            c.assigned()
                .map(|(v, ix)| (sig.name(v).to_string(), sig.value(v, ix).clone()))
                .collect(),
        ),
        _ => unreachable!("axiom checks run at world or context level"),
    }
}

fn leaves_of(f: &CausalFormula, out: &mut Vec<CausalFormula>) {
    match f {
        CausalFormula::Basic(_) | CausalFormula::Box(..) => out.push(f.clone()),
        CausalFormula::Diamond(..) | CausalFormula::BoxSet(..) | CausalFormula::DiamondSet(..) => {
            leaves_of(&f.desugar(), out)
        }
        CausalFormula::Not(g) => leaves_of(g, out),
        CausalFormula::And(a, b) | CausalFormula::Or(a, b) | CausalFormula::Implies(a, b) => {
            leaves_of(a, out);
            leaves_of(b, out);
        }
    }
}

/// Evaluates every instance of the schema at every setting of the mode,
/// stopping at the first counterexample.
pub fn check_axiom(axiom: AxiomId, model: &Model, mode: Mode, budget: &Budget) -> AxiomCheck {
    check_axiom_labeled(axiom, model, "model", mode, budget)
}

pub fn check_axiom_labeled(
    axiom: AxiomId,
    model: &Model,
    label: &str,
    mode: Mode,
    budget: &Budget,
) -> AxiomCheck {
    let sig = model.signature();
    let iset = instances(axiom, sig, budget);
    let settings = settings_for(model, mode);
    let ev = Evaluator::new(model);
    for inst in &iset.instances {
        for level in &settings {
            if !ev.satisfies(level, &inst.formula) {
                let mut leaves = Vec::new();
                leaves_of(&inst.formula, &mut leaves);
                let mut trace = Vec::new();
                let mut seen = std::collections::BTreeSet::new();
                for leaf in &leaves {
                    let printed = leaf.print(sig);
                    if seen.insert(printed.clone()) {
                        trace.push(TraceLine { leaf: printed, value: ev.satisfies(level, leaf) });
                    }
                }
                return AxiomCheck::Counterexample(Box::new(CounterexampleReport {
                    axiom,
                    mode,
                    model_label: label.to_string(),
                    model: model_to_file(model),
                    setting: setting_to_cex(sig, level),
                    params: inst.params.clone(),
                    formula: inst.formula.print(sig),
                    trace,
                }));
            }
        }
    }
    AxiomCheck::Pass {
        instances: iset.instances.len(),
        settings: settings.len(),
        complete: iset.complete,
    }
}

// ---------------------------------------------------------------------------
// Random models
// ---------------------------------------------------------------------------

/// Shape bounds for the random model generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub exogenous: usize,
    pub endogenous: usize,
    /// Range sizes are drawn from `2..=max_range`.
    pub max_range: usize,
    pub max_parents: usize,
    /// Probability that an equation row admits more than one value.
    pub nondeterminism: f64,
}

impl Default for GenConfig {
    fn default() -> GenConfig {
        GenConfig { exogenous: 0, endogenous: 2, max_range: 2, max_parents: 2, nondeterminism: 0.5 }
    }
}

/// A valid total acyclic model drawn deterministically from the seed.
pub fn random_model(seed: u64, cfg: &GenConfig) -> Model {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = cfg.exogenous.max(cfg.endogenous).max(1).to_string().len();

    let mut vars = Vec::new();
    for i in 0..cfg.exogenous {
        let size = rng.gen_range(2..=cfg.max_range.max(2));
        vars.push((
            format!("U{i:0width$}"),
            VarKind::Exogenous,
            (0..size as i64).map(Value::Int).collect::<Vec<Value>>(),
        ));
    }
    for i in 0..cfg.endogenous {
        let size = rng.gen_range(2..=cfg.max_range.max(2));
        vars.push((
            format!("V{i:0width$}"),
            VarKind::Endogenous,
            (0..size as i64).map(Value::Int).collect::<Vec<Value>>(),
        ));
    }
    let sig = Signature::new(vars).expect("generated names are distinct");

    // parents flow from exogenous variables and earlier endogenous variables
    let endo = sig.endogenous().to_vec();
    let mut edges = Vec::new();
    for (i, &child) in endo.iter().enumerate() {
        let mut pool: Vec<VarId> = sig.exogenous().to_vec();
        pool.extend(endo[..i].iter().copied());
        if pool.is_empty() {
            continue;
        }
        let k = rng.gen_range(0..=cfg.max_parents.min(pool.len()));
        for ix in sample(&mut rng, pool.len(), k) {
            edges.push((pool[ix], child));
        }
    }
    let graph = CausalGraph::new(sig.len(), &edges);

    let mut equations = Vec::new();
    for &child in &endo {
        let dims: Vec<usize> = graph.parents(child).iter().map(|&p| sig.range_len(p)).collect();
        let rows: usize = dims.iter().product();
        let range = sig.range_len(child);
        let mut table = Vec::with_capacity(rows);
        for _ in 0..rows {
            let multi = range >= 2 && rng.gen_bool(cfg.nondeterminism.clamp(0.0, 1.0));
            if multi {
                let size = rng.gen_range(2..=range);
                let vals: Vec<u32> =
                    sample(&mut rng, range, size).into_iter().map(|v| v as u32).collect();
                table.push(ValueSet::new(vals));
            } else {
                table.push(ValueSet::singleton(rng.gen_range(0..range) as u32));
            }
        }
        equations.push((child, table));
    }
    Model::from_parts(sig, graph, equations).expect("generated models are valid")
}

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub axioms: Vec<AxiomId>,
    pub modes: Vec<Mode>,
    /// Number of random models (reference models come on top).
    pub models: usize,
    pub seed: u64,
    pub max_exogenous: usize,
    pub max_endogenous: usize,
    pub max_range: usize,
    pub max_parents: usize,
    pub nondeterminism: f64,
    pub include_reference_models: bool,
    pub budget: Budget,
}

impl Default for SweepConfig {
    fn default() -> SweepConfig {
        SweepConfig {
            axioms: AxiomId::ALL.to_vec(),
            modes: vec![Mode::Counterfactual, Mode::Interventionist],
            models: 200,
            seed: 0,
            max_exogenous: 1,
            max_endogenous: 3,
            max_range: 3,
            max_parents: 2,
            nondeterminism: 0.5,
            include_reference_models: true,
            budget: Budget::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub axiom: AxiomId,
    pub mode: Mode,
    pub models_checked: usize,
    /// Instances fully evaluated on models that passed; a refuted model
    /// stops at its first counterexample and contributes none.
    pub instances_evaluated: u64,
    pub counterexample_count: usize,
    /// False when any model's instantiation hit a budget or dependence bound.
    pub complete_coverage: bool,
    /// Up to three stored counterexamples, in corpus order.
    pub counterexamples: Vec<CounterexampleReport>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSummary {
    pub seed: u64,
    pub models: usize,
    pub budget: Budget,
    pub rows: Vec<SweepRow>,
}

impl SweepSummary {
    pub fn row(&self, axiom: AxiomId, mode: Mode) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.axiom == axiom && r.mode == mode)
    }

    pub fn render_text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<6} {:<4} {:>7} {:>10} {:>16} {:>9}",
            "axiom", "mode", "models", "instances", "counterexamples", "coverage"
        );
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{:<6} {:<4} {:>7} {:>10} {:>16} {:>9}",
                row.axiom.to_string(),
                row.mode.to_string(),
                row.models_checked,
                row.instances_evaluated,
                row.counterexample_count,
                if row.complete_coverage { "complete" } else { "bounded" },
            );
        }
        for row in &self.rows {
            for cex in &row.counterexamples {
                let _ = writeln!(
                    out,
                    "\ncounterexample {}/{} on {} at {}:\n  params:  {}\n  formula: {}",
                    row.axiom, row.mode, cex.model_label, cex.setting, cex.params, cex.formula
                );
                for line in &cex.trace {
                    let _ = writeln!(out, "    {} = {}", line.leaf, line.value);
                }
            }
        }
        out
    }
}

/// Builds the model corpus for a sweep: the reference models (when enabled)
/// followed by seeded random models of varied shapes.
pub fn sweep_corpus(cfg: &SweepConfig) -> Vec<(String, Model)> {
    let mut corpus = Vec::new();
    if cfg.include_reference_models {
        corpus.extend(reference::all());
    }
    let mut master = ChaCha8Rng::seed_from_u64(cfg.seed);
    for i in 0..cfg.models {
        let gen = GenConfig {
            exogenous: master.gen_range(0..=cfg.max_exogenous),
            endogenous: master.gen_range(1..=cfg.max_endogenous.max(1)),
            max_range: master.gen_range(2..=cfg.max_range.max(2)),
            max_parents: cfg.max_parents,
            nondeterminism: cfg.nondeterminism,
        };
        let seed = master.gen::<u64>();
        corpus.push((format!("random-{i:04}"), random_model(seed, &gen)));
    }
    corpus
}

/// Runs every requested axiom in every mode across the corpus. Models are
/// checked in parallel; aggregation is in corpus order, so the summary is a
/// deterministic function of the config.
pub fn soundness_sweep(cfg: &SweepConfig) -> SweepSummary {
    sweep_models(&sweep_corpus(cfg), &cfg.axioms, &cfg.modes, &cfg.budget, cfg.seed)
}

/// Like [`soundness_sweep`], over a caller-supplied corpus.
pub fn sweep_models(
    corpus: &[(String, Model)],
    axioms: &[AxiomId],
    modes: &[Mode],
    budget: &Budget,
    seed: u64,
) -> SweepSummary {
    let per_model: Vec<Vec<(AxiomId, Mode, AxiomCheck)>> = corpus
        .par_iter()
        .map(|(label, model)| {
            let mut results = Vec::new();
            for &axiom in axioms {
                for &mode in modes {
                    results.push((
                        axiom,
                        mode,
                        check_axiom_labeled(axiom, model, label, mode, budget),
                    ));
                }
            }
            results
        })
        .collect();

    let mut rows: Vec<SweepRow> = Vec::new();
    for &axiom in axioms {
        for &mode in modes {
            rows.push(SweepRow {
                axiom,
                mode,
                models_checked: 0,
                instances_evaluated: 0,
                counterexample_count: 0,
                complete_coverage: true,
                counterexamples: Vec::new(),
            });
        }
    }
    for results in &per_model {
        for (axiom, mode, check) in results {
            let row = rows
                .iter_mut()
                .find(|r| r.axiom == *axiom && r.mode == *mode)
                .expect("row exists for every requested pair");
            row.models_checked += 1;
            match check {
                AxiomCheck::Pass { instances, complete, .. } => {
                    row.instances_evaluated += *instances as u64;
                    row.complete_coverage &= complete;
                }
                AxiomCheck::Counterexample(report) => {
                    row.counterexample_count += 1;
                    if row.counterexamples.len() < 3 {
                        row.counterexamples.push((**report).clone());
                    }
                }
            }
        }
    }
    SweepSummary { seed, models: corpus.len(), budget: budget.clone(), rows }
}
