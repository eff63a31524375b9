//! Satisfaction of causal formulas via model surgery.
//!
//! A basic causal formula `[iv] phi` holds at a world `(u, v)` when `phi`
//! holds in every state `v'` such that `(u, v')` solves the model obtained by
//! first pinning each equation's actually-used row to its actually-realized
//! value (the *actualized refinement*) and then performing the intervention.
//!
//! At the coarser setting levels the quantification runs over solutions:
//! a basic causal formula holds at `(M, u)` when it holds at `(M, u, v)` for
//! every solution `(u, v)`, at `(M, v)` with the roles of context and state
//! swapped, and at `M` alone for all solutions. Boolean connectives are
//! evaluated classically *on top of* those quantified truth values, so at
//! partial settings `<iv> phi` means "some solution world admits `phi` under
//! `iv`" rather than "every solution world admits it". That reading makes the
//! box/diamond pair at partial settings coincide with plain universal and
//! existential quantification over the intervened model's solutions (see
//! [`interventionist_oracle`]), which is what distinguishes interventionist
//! from counterfactual reasoning here.

use std::cell::{OnceCell, RefCell};
use std::collections::HashMap;
use std::rc::Rc;

use thiserror::Error;

use crate::formula::{eval_basic, BasicFormula, CausalFormula, Intervention};
use crate::model::{EquationTable, Model, PartialWorld, ValueSet, World, WorldError};
use crate::signature::VarId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SettingError {
    #[error("world ({0}) is not a solution of the model")]
    NotASolution(String),
    #[error(transparent)]
    World(#[from] WorldError),
}

/// Where a formula is evaluated: a full world, a context (exogenous part), a
/// state (endogenous part), or the model alone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SettingLevel {
    World(World),
    Context(PartialWorld),
    State(PartialWorld),
    ModelOnly,
}

/// A model paired with an evaluation level. World-level settings are only
/// constructible from solutions; satisfaction is undefined elsewhere.
#[derive(Debug, Clone)]
pub struct Setting<'m> {
    model: &'m Model,
    level: SettingLevel,
}

impl<'m> Setting<'m> {
    pub fn world(model: &'m Model, world: World) -> Result<Setting<'m>, SettingError> {
        if !model.is_solution(&world) {
            return Err(SettingError::NotASolution(world.display(model.signature())));
        }
        Ok(Setting { model, level: SettingLevel::World(world) })
    }

    /// A context setting; `context` must be total over the exogenous
    /// variables (see [`PartialWorld::context_from_named`]).
    pub fn context(model: &'m Model, context: PartialWorld) -> Setting<'m> {
        Setting { model, level: SettingLevel::Context(context) }
    }

    /// A state setting, quantifying over the contexts that complete the state
    /// into a solution.
    pub fn state(model: &'m Model, state: PartialWorld) -> Setting<'m> {
        Setting { model, level: SettingLevel::State(state) }
    }

    pub fn model_only(model: &'m Model) -> Setting<'m> {
        Setting { model, level: SettingLevel::ModelOnly }
    }

    pub fn model(&self) -> &'m Model {
        self.model
    }

    pub fn level(&self) -> &SettingLevel {
        &self.level
    }
}

// ---------------------------------------------------------------------------
// Model surgery
// ---------------------------------------------------------------------------

/// The refinement of `m` that pins, for every endogenous variable, the row
/// selected by `w`'s parent values to the singleton `{w(X)}`. All other rows
/// are untouched, so the result is total and refines `m`, and `w` remains a
/// solution.
pub fn actualized_refinement(m: &Model, w: &World) -> Result<Model, SettingError> {
    if !m.is_solution(w) {
        return Err(SettingError::NotASolution(w.display(m.signature())));
    }
    let mut equations = m.equations_cloned();
    for &var in m.signature().endogenous() {
        let eq = equations[var.index()].as_mut().expect("valid model");
        let row = eq.row_index_for(w);
        eq.set_row(row, ValueSet::singleton(w.value_ix(var)));
    }
    Ok(m.with_surgery(m.graph().clone(), equations))
}

/// The intervened model: every variable in `iv` gets the parentless constant
/// equation `{y}` and loses its incoming edges; everything else is unchanged.
pub fn intervene(m: &Model, iv: &Intervention) -> Model {
    let mut equations = m.equations_cloned();
    for &(var, val) in iv.pairs() {
        equations[var.index()] = Some(EquationTable::constant(val));
    }
    let targets: Vec<VarId> = iv.vars().collect();
    m.with_surgery(m.graph().without_incoming(&targets), equations)
}

// ---------------------------------------------------------------------------
// Satisfaction
// ---------------------------------------------------------------------------

/// Evaluates `f` at the setting. Diamonds and disjunctive interventions are
/// desugared first; evaluation then materializes refined and intervened
/// models and enumerates their solutions.
pub fn satisfies(setting: &Setting<'_>, f: &CausalFormula) -> bool {
    Evaluator::new(setting.model).satisfies(&setting.level, f)
}

/// Decides `phi` in every solution of the intervened model, with no
/// actualized refinement anywhere. With a context, only solutions extending
/// it count. Deliberately independent of [`satisfies`]: at model and context
/// level the two must agree on `[iv] phi`, and tests cross-check them.
pub fn interventionist_oracle(
    m: &Model,
    iv: &Intervention,
    phi: &BasicFormula,
    context: Option<&PartialWorld>,
) -> bool {
    intervene(m, iv)
        .solutions_matching(context)
        .iter()
        .all(|w| eval_basic(phi, w))
}

/// Existential dual of [`interventionist_oracle`].
pub fn interventionist_oracle_some(
    m: &Model,
    iv: &Intervention,
    phi: &BasicFormula,
    context: Option<&PartialWorld>,
) -> bool {
    intervene(m, iv)
        .solutions_matching(context)
        .iter()
        .any(|w| eval_basic(phi, w))
}

/// Cache key for post-surgery solution sets: the world refined at, plus the
/// intervention in canonical pair order.
type SurgeryKey = (World, Vec<(VarId, u32)>);

/// Reusable evaluator for one model. Caches the model's solution list, each
/// world's actualized refinement, and the post-surgery solution sets keyed by
/// (world, intervention), which axiom sweeps hit heavily. Not `Sync`; use one
/// evaluator per thread.
pub struct Evaluator<'m> {
    model: &'m Model,
    solutions: OnceCell<Rc<Vec<World>>>,
    refined: RefCell<HashMap<World, Rc<Model>>>,
    post: RefCell<HashMap<SurgeryKey, Rc<Vec<World>>>>,
}

impl<'m> Evaluator<'m> {
    pub fn new(model: &'m Model) -> Evaluator<'m> {
        Evaluator {
            model,
            solutions: OnceCell::new(),
            refined: RefCell::new(HashMap::new()),
            post: RefCell::new(HashMap::new()),
        }
    }

    pub fn model(&self) -> &'m Model {
        self.model
    }

    pub fn satisfies(&self, level: &SettingLevel, f: &CausalFormula) -> bool {
        self.eval_core(level, &f.desugar())
    }

    /// Solutions of the base model, cached.
    pub fn solutions(&self) -> Rc<Vec<World>> {
        Rc::clone(
            self.solutions
                .get_or_init(|| Rc::new(self.model.solutions())),
        )
    }

    fn eval_core(&self, level: &SettingLevel, f: &CausalFormula) -> bool {
        match f {
            CausalFormula::Basic(_) | CausalFormula::Box(..) => self.eval_leaf(level, f),
            CausalFormula::Not(g) => !self.eval_core(level, g),
            CausalFormula::And(a, b) => self.eval_core(level, a) && self.eval_core(level, b),
            CausalFormula::Or(a, b) => self.eval_core(level, a) || self.eval_core(level, b),
            CausalFormula::Implies(a, b) => !self.eval_core(level, a) || self.eval_core(level, b),
            CausalFormula::Diamond(..)
            | CausalFormula::BoxSet(..)
            | CausalFormula::DiamondSet(..) => {
                unreachable!("satisfies desugars before evaluation")
            }
        }
    }

    /// A bare basic formula or a box, quantified over the level's solutions.
    fn eval_leaf(&self, level: &SettingLevel, f: &CausalFormula) -> bool {
        match level {
            SettingLevel::World(w) => self.eval_leaf_at(w, f),
            SettingLevel::Context(p) | SettingLevel::State(p) => self
                .solutions()
                .iter()
                .filter(|w| p.matches(w))
                .all(|w| self.eval_leaf_at(w, f)),
            SettingLevel::ModelOnly => {
                self.solutions().iter().all(|w| self.eval_leaf_at(w, f))
            }
        }
    }

    fn eval_leaf_at(&self, w: &World, f: &CausalFormula) -> bool {
        match f {
            CausalFormula::Basic(phi) => eval_basic(phi, w),
            CausalFormula::Box(iv, phi) => {
                self.post_solutions(w, iv).iter().all(|w2| eval_basic(phi, w2))
            }
            _ => unreachable!("leaves are basic formulas or boxes"),
        }
    }

    /// Solutions of `(M^w)_iv` that share `w`'s context, cached.
    pub fn post_solutions(&self, w: &World, iv: &Intervention) -> Rc<Vec<World>> {
        let key = (w.clone(), iv.canonical_pairs());
        if let Some(hit) = self.post.borrow().get(&key) {
            return Rc::clone(hit);
        }
        let refined = self.refined_model(w);
        let surged = intervene(&refined, iv);
        let sig = self.model.signature();
        let context = w.restrict(sig, sig.exogenous());
        let sols = Rc::new(surged.solutions_matching(Some(&context)));
        self.post.borrow_mut().insert(key, Rc::clone(&sols));
        sols
    }

    fn refined_model(&self, w: &World) -> Rc<Model> {
        if let Some(hit) = self.refined.borrow().get(w) {
            return Rc::clone(hit);
        }
        let refined =
            Rc::new(actualized_refinement(self.model, w).expect("quantified worlds are solutions"));
        self.refined.borrow_mut().insert(w.clone(), Rc::clone(&refined));
        refined
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::reference::{model_a, model_b, model_c};
    use crate::parse::parse_causal;
    use crate::signature::Value;

    fn world(m: &Model, pairs: &[(&str, i64)]) -> World {
        let named: Vec<(&str, Value)> =
            pairs.iter().map(|&(n, v)| (n, Value::Int(v))).collect();
        World::from_named(m.signature(), named.iter().map(|(n, v)| (*n, v))).unwrap()
    }

    fn holds_at_world(m: &Model, w: &[(&str, i64)], text: &str) -> bool {
        let f = parse_causal(text, m.signature()).unwrap();
        let setting = Setting::world(m, world(m, w)).unwrap();
        satisfies(&setting, &f)
    }

    fn holds_model(m: &Model, text: &str) -> bool {
        let f = parse_causal(text, m.signature()).unwrap();
        satisfies(&Setting::model_only(m), &f)
    }

    #[test]
    fn refinement_pins_only_the_actual_rows() {
        let m = model_c();
        let sig = m.signature();
        let (x, y) = (sig.lookup("X").unwrap(), sig.lookup("Y").unwrap());
        let w = world(&m, &[("X", 1), ("Y", 1)]);
        let refined = actualized_refinement(&m, &w).unwrap();
        let eq_y = refined.equation(y).unwrap();
        // rows keyed by X's value: X=0 untouched, X=1 pinned to {1}
        assert_eq!(eq_y.row(0).iter().collect::<Vec<_>>(), vec![0]);
        assert_eq!(eq_y.row(1).iter().collect::<Vec<_>>(), vec![1]);
        assert!(refined.is_refinement_of(&m));
        assert!(refined.is_solution(&w));
        let _ = x;
    }

    #[test]
    fn refinement_of_deterministic_model_is_identity() {
        let m = model_c();
        // make it deterministic by shrinking Y's nondeterministic row
        let sig = m.signature();
        let y = sig.lookup("Y").unwrap();
        let mut eqs = m.equations_cloned();
        eqs[y.index()].as_mut().unwrap().set_row(1, ValueSet::singleton(1));
        let det = m.with_surgery(m.graph().clone(), eqs);
        assert!(det.is_deterministic());
        for w in det.solutions() {
            assert_eq!(actualized_refinement(&det, &w).unwrap(), det);
        }
    }

    #[test]
    fn refinement_of_model_a_leaves_a_unique_solution() {
        let m = model_a();
        let w = world(&m, &[("Y", 1), ("X", 0)]);
        let refined = actualized_refinement(&m, &w).unwrap();
        assert!(refined.is_refinement_of(&m));
        assert_eq!(refined.solutions(), vec![w]);
        // and the non-actual row for X survives untouched
        let x = m.signature().lookup("X").unwrap();
        assert_eq!(refined.equation(x).unwrap().row(0).len(), 1);
    }

    #[test]
    fn refinement_rejects_non_solutions() {
        let m = model_a();
        let w = world(&m, &[("Y", 0), ("X", 1)]);
        assert!(matches!(
            actualized_refinement(&m, &w),
            Err(SettingError::NotASolution(_))
        ));
        assert!(Setting::world(&m, w).is_err());
    }

    #[test]
    fn intervention_replaces_equations_and_cuts_edges() {
        let m = model_a();
        let sig = m.signature();
        let (x, y) = (sig.lookup("X").unwrap(), sig.lookup("Y").unwrap());

        let on_y = intervene(&m, &Intervention::new(sig, vec![(y, 1)]).unwrap());
        assert_eq!(on_y.equation(y).unwrap().row(0), &ValueSet::singleton(1));
        assert_eq!(on_y.equation(x), m.equation(x));

        let empty = intervene(&m, &Intervention::empty());
        assert_eq!(empty, m);

        let on_x = intervene(&m, &Intervention::new(sig, vec![(x, 1)]).unwrap());
        assert!(!on_x.graph().has_edge(y, x));
        assert_eq!(on_x.equation(y), m.equation(y));
        assert_eq!(on_x.equation(x).unwrap().parents().len(), 0);
    }

    #[test]
    fn intervention_is_idempotent_and_order_independent() {
        let m = model_a();
        let sig = m.signature();
        let (x, y) = (sig.lookup("X").unwrap(), sig.lookup("Y").unwrap());
        let yx = intervene(
            &intervene(&m, &Intervention::new(sig, vec![(y, 1)]).unwrap()),
            &Intervention::new(sig, vec![(x, 0)]).unwrap(),
        );
        let xy = intervene(
            &intervene(&m, &Intervention::new(sig, vec![(x, 0)]).unwrap()),
            &Intervention::new(sig, vec![(y, 1)]).unwrap(),
        );
        let both = intervene(&m, &Intervention::new(sig, vec![(x, 0), (y, 1)]).unwrap());
        assert_eq!(yx, xy);
        assert_eq!(yx, both);
        let twice = intervene(
            &intervene(&m, &Intervention::new(sig, vec![(y, 1)]).unwrap()),
            &Intervention::new(sig, vec![(y, 1)]).unwrap(),
        );
        assert_eq!(twice, intervene(&m, &Intervention::new(sig, vec![(y, 1)]).unwrap()));
    }

    #[test]
    fn world_level_counterexample_to_unique_outcomes() {
        let m = model_a();
        assert!(holds_at_world(&m, &[("X", 0), ("Y", 0)], "<Y<-1> X=1"));
        assert!(!holds_at_world(&m, &[("X", 0), ("Y", 0)], "[Y<-1] X=1"));
        assert!(holds_at_world(&m, &[("X", 0), ("Y", 0)], "<Y<-1> X=0"));
    }

    #[test]
    fn conjunction_conditionalization_on_the_two_variable_chain() {
        let m = model_c();
        assert!(holds_at_world(&m, &[("X", 1), ("Y", 1)], "[] Y=1"));
        assert!(holds_at_world(&m, &[("X", 1), ("Y", 1)], "[X<-1] Y=1"));
    }

    #[test]
    fn single_variable_model_shows_diamond_box_gap_at_context_level() {
        let m = model_b();
        let sig = m.signature();
        let empty_ctx = PartialWorld::context_from_named(sig, []).unwrap();
        let setting = Setting::context(&m, empty_ctx);
        let ev = |text: &str| satisfies(&setting, &parse_causal(text, sig).unwrap());
        assert!(ev("<> X=1"));
        assert!(ev("<> X=0"));
        assert!(!ev("[] X=1"));
        // ... while at any world level the diamond-box gap closes for `[]`
        assert!(holds_at_world(&m, &[("X", 1)], "<> X=1 -> [] X=1"));
        assert!(holds_at_world(&m, &[("X", 0)], "<> X=0 -> [] X=0"));
    }

    #[test]
    fn model_level_agrees_with_interventionist_oracle_on_model_a() {
        let m = model_a();
        let sig = m.signature();
        let (x, y) = (sig.lookup("X").unwrap(), sig.lookup("Y").unwrap());
        assert!(holds_model(&m, "<Y<-1> X=1"));
        assert!(!holds_model(&m, "[Y<-1] X=1"));

        let iv = Intervention::new(sig, vec![(y, 1)]).unwrap();
        assert!(!interventionist_oracle(&m, &iv, &BasicFormula::Atom(x, 1), None));
        assert!(interventionist_oracle_some(&m, &iv, &BasicFormula::Atom(x, 1), None));

        // tautology over solutions
        let taut = BasicFormula::or(
            BasicFormula::Atom(x, 0),
            BasicFormula::Atom(x, 1),
        );
        assert!(interventionist_oracle(&m, &iv, &taut, None));

        // enumerating M_{Y<-0} gives the single world (X=0, Y=0)
        let iv0 = Intervention::new(sig, vec![(y, 0)]).unwrap();
        assert!(interventionist_oracle(&m, &iv0, &BasicFormula::Atom(x, 0), None));
    }

    #[test]
    fn interventionist_oracle_denies_box_on_free_binary_variable() {
        let m = model_b();
        let x = m.signature().lookup("X").unwrap();
        assert!(!interventionist_oracle(
            &m,
            &Intervention::empty(),
            &BasicFormula::Atom(x, 1),
            None
        ));
    }

    #[test]
    fn bare_basic_formula_equals_empty_box() {
        for m in [model_a(), model_b(), model_c()] {
            let sig = m.signature();
            for text in ["X=1", "X=0", "X=1 | X=0"] {
                let bare = parse_causal(text, sig).unwrap();
                let boxed = parse_causal(&format!("[] ({text})"), sig).unwrap();
                for w in m.solutions() {
                    let s = Setting::world(&m, w).unwrap();
                    assert_eq!(satisfies(&s, &bare), satisfies(&s, &boxed));
                }
                let s = Setting::model_only(&m);
                assert_eq!(satisfies(&s, &bare), satisfies(&s, &boxed));
            }
        }
    }

    #[test]
    fn non_descendants_keep_their_values_under_intervention() {
        // Y is upstream of X in the two-variable chain: intervening X must
        // not disturb Y's actual value.
        let m = model_a();
        for w in m.solutions() {
            let y_val = w.value_ix(m.signature().lookup("Y").unwrap());
            let text = format!("[X<-1] Y={}", if y_val == 0 { 0 } else { 1 });
            let f = parse_causal(&text, m.signature()).unwrap();
            let s = Setting::world(&m, w).unwrap();
            assert!(satisfies(&s, &f));
        }
    }

    #[test]
    fn state_level_quantifies_over_contexts() {
        // exogenous U -> X copying U's value; state X=1 forces context U=1
        use crate::graph::CausalGraph;
        use crate::signature::{Signature, VarKind};
        use std::sync::Arc;
        let sig = Signature::new(vec![
            ("U".into(), VarKind::Exogenous, vec![Value::Int(0), Value::Int(1)]),
            ("X".into(), VarKind::Endogenous, vec![Value::Int(0), Value::Int(1)]),
        ])
        .unwrap();
        let (u, x) = (sig.lookup("U").unwrap(), sig.lookup("X").unwrap());
        let m = Model::from_parts(
            Arc::clone(&sig),
            CausalGraph::new(2, &[(u, x)]),
            vec![(x, vec![ValueSet::singleton(0), ValueSet::singleton(1)])],
        )
        .unwrap();
        let st = PartialWorld::state_from_named(&sig, [("X", &Value::Int(1))]).unwrap();
        let f = parse_causal("[] X=1", &sig).unwrap();
        assert!(satisfies(&Setting::state(&m, st), &f));
    }
}
