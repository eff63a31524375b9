//! The causal formula language: basic formulas over endogenous atoms,
//! interventions, box/diamond modalities, disjunctive-intervention sugar, and
//! the probabilistic assertion layer.

use std::fmt::Write as _;

use num_rational::BigRational;
use thiserror::Error;

use crate::model::World;
use crate::signature::{Signature, Value, VarId, VarKind};

// ---------------------------------------------------------------------------
// Basic formulas
// ---------------------------------------------------------------------------

/// A Boolean combination of atoms `X = x` over endogenous variables. Truth
/// depends only on a state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BasicFormula {
    True,
    False,
    /// `X = x`, with the value as a range index.
    Atom(VarId, u32),
    Not(Box<BasicFormula>),
    And(Box<BasicFormula>, Box<BasicFormula>),
    Or(Box<BasicFormula>, Box<BasicFormula>),
    Implies(Box<BasicFormula>, Box<BasicFormula>),
}

impl BasicFormula {
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: BasicFormula) -> BasicFormula {
        BasicFormula::Not(Box::new(f))
    }

    pub fn and(a: BasicFormula, b: BasicFormula) -> BasicFormula {
        BasicFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: BasicFormula, b: BasicFormula) -> BasicFormula {
        BasicFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: BasicFormula, b: BasicFormula) -> BasicFormula {
        BasicFormula::Implies(Box::new(a), Box::new(b))
    }

    /// Conjunction of all formulas; `True` when empty.
    pub fn conj(fs: impl IntoIterator<Item = BasicFormula>) -> BasicFormula {
        let mut it = fs.into_iter();
        match it.next() {
            None => BasicFormula::True,
            Some(first) => it.fold(first, BasicFormula::and),
        }
    }

    /// Disjunction of all formulas; `False` when empty.
    pub fn disj(fs: impl IntoIterator<Item = BasicFormula>) -> BasicFormula {
        let mut it = fs.into_iter();
        match it.next() {
            None => BasicFormula::False,
            Some(first) => it.fold(first, BasicFormula::or),
        }
    }
}

/// Classical evaluation of a basic formula against a total world. Atoms look
/// up the state only; exogenous atoms are ruled out at construction.
pub fn eval_basic(f: &BasicFormula, w: &World) -> bool {
    match f {
        BasicFormula::True => true,
        BasicFormula::False => false,
        BasicFormula::Atom(var, val) => w.value_ix(*var) == *val,
        BasicFormula::Not(g) => !eval_basic(g, w),
        BasicFormula::And(a, b) => eval_basic(a, w) && eval_basic(b, w),
        BasicFormula::Or(a, b) => eval_basic(a, w) || eval_basic(b, w),
        BasicFormula::Implies(a, b) => !eval_basic(a, w) || eval_basic(b, w),
    }
}

// ---------------------------------------------------------------------------
// Interventions
// ---------------------------------------------------------------------------

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InterventionError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("cannot intervene on exogenous variable `{0}`")]
    Exogenous(String),
    #[error("duplicate variable `{0}` in intervention")]
    Duplicate(String),
    #[error("value {value} out of range for `{var}`")]
    OutOfRange { var: String, value: Value },
    #[error("empty value set for `{0}` in disjunctive intervention")]
    EmptySet(String),
}

/// A point intervention `Y1 <- y1, ..., Yk <- yk` over distinct endogenous
/// variables. The empty intervention `[]` is allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Intervention {
    pairs: Vec<(VarId, u32)>,
}

impl Intervention {
    pub fn empty() -> Intervention {
        Intervention { pairs: Vec::new() }
    }

    pub fn new(sig: &Signature, pairs: Vec<(VarId, u32)>) -> Result<Intervention, InterventionError> {
        for (i, &(var, val)) in pairs.iter().enumerate() {
            if sig.kind(var) != VarKind::Endogenous {
                return Err(InterventionError::Exogenous(sig.name(var).to_string()));
            }
            if val as usize >= sig.range_len(var) {
                return Err(InterventionError::OutOfRange {
                    var: sig.name(var).to_string(),
                    value: Value::Int(val as i64),
                });
            }
            if pairs[..i].iter().any(|&(v, _)| v == var) {
                return Err(InterventionError::Duplicate(sig.name(var).to_string()));
            }
        }
        Ok(Intervention { pairs })
    }

    pub fn from_named<'a>(
        sig: &Signature,
        pairs: impl IntoIterator<Item = (&'a str, &'a Value)>,
    ) -> Result<Intervention, InterventionError> {
        let mut resolved = Vec::new();
        for (name, value) in pairs {
            let var = sig
                .lookup(name)
                .ok_or_else(|| InterventionError::UnknownVariable(name.to_string()))?;
            let val = sig.value_index(var, value).ok_or_else(|| InterventionError::OutOfRange {
                var: name.to_string(),
                value: value.clone(),
            })?;
            resolved.push((var, val));
        }
        Intervention::new(sig, resolved)
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(VarId, u32)] {
        &self.pairs
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.pairs.iter().map(|&(v, _)| v)
    }

    pub fn value_for(&self, var: VarId) -> Option<u32> {
        self.pairs.iter().find(|&&(v, _)| v == var).map(|&(_, val)| val)
    }

    /// Pairs sorted by variable, for order-insensitive comparison and cache
    /// keys. Semantics over distinct variables is order-independent.
    pub fn canonical_pairs(&self) -> Vec<(VarId, u32)> {
        let mut pairs = self.pairs.clone();
        pairs.sort_unstable();
        pairs
    }

    /// This intervention extended by one more assignment.
    pub fn extended(&self, sig: &Signature, var: VarId, val: u32) -> Result<Intervention, InterventionError> {
        let mut pairs = self.pairs.clone();
        pairs.push((var, val));
        Intervention::new(sig, pairs)
    }
}

/// A disjunctive intervention `Y1 <- S1, ..., Yk <- Sk` assigning nonempty
/// value sets; surface sugar expanded by [`CausalFormula::desugar_disjunctive`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DisjunctiveIntervention {
    pairs: Vec<(VarId, Vec<u32>)>,
}

impl DisjunctiveIntervention {
    pub fn new(
        sig: &Signature,
        pairs: Vec<(VarId, Vec<u32>)>,
    ) -> Result<DisjunctiveIntervention, InterventionError> {
        for (i, (var, vals)) in pairs.iter().enumerate() {
            if sig.kind(*var) != VarKind::Endogenous {
                return Err(InterventionError::Exogenous(sig.name(*var).to_string()));
            }
            if vals.is_empty() {
                return Err(InterventionError::EmptySet(sig.name(*var).to_string()));
            }
            for &val in vals {
                if val as usize >= sig.range_len(*var) {
                    return Err(InterventionError::OutOfRange {
                        var: sig.name(*var).to_string(),
                        value: Value::Int(val as i64),
                    });
                }
            }
            if pairs[..i].iter().any(|(v, _)| v == var) {
                return Err(InterventionError::Duplicate(sig.name(*var).to_string()));
            }
        }
        Ok(DisjunctiveIntervention { pairs })
    }

    pub fn pairs(&self) -> &[(VarId, Vec<u32>)] {
        &self.pairs
    }

    /// True when every set is a singleton, i.e. this is a point intervention
    /// in disguise.
    pub fn is_point(&self) -> bool {
        self.pairs.iter().all(|(_, vals)| vals.len() == 1)
    }

    /// All point combinations, in lexicographic order over the listed sets.
    pub fn point_combinations(&self) -> Vec<Intervention> {
        let mut out = vec![Vec::new()];
        for (var, vals) in &self.pairs {
            let mut next = Vec::with_capacity(out.len() * vals.len());
            for prefix in &out {
                for &val in vals {
                    let mut ext: Vec<(VarId, u32)> = prefix.clone();
                    ext.push((*var, val));
                    next.push(ext);
                }
            }
            out = next;
        }
        out.into_iter().map(|pairs| Intervention { pairs }).collect()
    }
}

// ---------------------------------------------------------------------------
// Causal formulas
// ---------------------------------------------------------------------------

/// A Boolean combination of basic causal formulas `[Y <- y] phi`. Diamonds and
/// disjunctive interventions are surface forms kept for printing; the
/// desugared core contains only boxes over point interventions, bare basic
/// formulas, and connectives.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CausalFormula {
    /// A bare basic formula; satisfied by exactly the settings of `[] phi`.
    Basic(BasicFormula),
    /// `[iv] phi`: phi holds in every admissible post-intervention state.
    Box(Intervention, BasicFormula),
    /// `<iv> phi`, shorthand for `![iv] !phi`.
    Diamond(Intervention, BasicFormula),
    /// `[Y <- S, ...] phi` over value sets.
    BoxSet(DisjunctiveIntervention, BasicFormula),
    /// `<Y <- S, ...> phi` over value sets.
    DiamondSet(DisjunctiveIntervention, BasicFormula),
    Not(Box<CausalFormula>),
    And(Box<CausalFormula>, Box<CausalFormula>),
    Or(Box<CausalFormula>, Box<CausalFormula>),
    Implies(Box<CausalFormula>, Box<CausalFormula>),
}

impl CausalFormula {
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: CausalFormula) -> CausalFormula {
        CausalFormula::Not(Box::new(f))
    }

    pub fn and(a: CausalFormula, b: CausalFormula) -> CausalFormula {
        CausalFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: CausalFormula, b: CausalFormula) -> CausalFormula {
        CausalFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: CausalFormula, b: CausalFormula) -> CausalFormula {
        CausalFormula::Implies(Box::new(a), Box::new(b))
    }

    pub fn conj(fs: impl IntoIterator<Item = CausalFormula>) -> CausalFormula {
        let mut it = fs.into_iter();
        match it.next() {
            None => CausalFormula::Basic(BasicFormula::True),
            Some(first) => it.fold(first, CausalFormula::and),
        }
    }

    pub fn disj(fs: impl IntoIterator<Item = CausalFormula>) -> CausalFormula {
        let mut it = fs.into_iter();
        match it.next() {
            None => CausalFormula::Basic(BasicFormula::False),
            Some(first) => it.fold(first, CausalFormula::or),
        }
    }

    /// Expands disjunctive interventions: a box over value sets becomes the
    /// conjunction of boxes over all point combinations, a diamond the
    /// disjunction of diamonds. Point-shaped sets collapse in place.
    pub fn desugar_disjunctive(&self) -> CausalFormula {
        match self {
            CausalFormula::BoxSet(div, body) => CausalFormula::conj(
                div.point_combinations()
                    .into_iter()
                    .map(|iv| CausalFormula::Box(iv, body.clone())),
            ),
            CausalFormula::DiamondSet(div, body) => CausalFormula::disj(
                div.point_combinations()
                    .into_iter()
                    .map(|iv| CausalFormula::Diamond(iv, body.clone())),
            ),
            CausalFormula::Basic(_) | CausalFormula::Box(..) | CausalFormula::Diamond(..) => {
                self.clone()
            }
            CausalFormula::Not(g) => CausalFormula::not(g.desugar_disjunctive()),
            CausalFormula::And(a, b) => {
                CausalFormula::and(a.desugar_disjunctive(), b.desugar_disjunctive())
            }
            CausalFormula::Or(a, b) => {
                CausalFormula::or(a.desugar_disjunctive(), b.desugar_disjunctive())
            }
            CausalFormula::Implies(a, b) => {
                CausalFormula::implies(a.desugar_disjunctive(), b.desugar_disjunctive())
            }
        }
    }

    /// Rewrites every `<iv> phi` to `![iv] !phi`, in place throughout the
    /// formula. Disjunctive diamonds must be expanded first.
    pub fn desugar_diamond(&self) -> CausalFormula {
        match self {
            CausalFormula::Diamond(iv, body) => CausalFormula::not(CausalFormula::Box(
                iv.clone(),
                BasicFormula::not(body.clone()),
            )),
            CausalFormula::DiamondSet(div, body) => {
                // expand sets first, then the resulting diamonds
                CausalFormula::DiamondSet(div.clone(), body.clone())
                    .desugar_disjunctive()
                    .desugar_diamond()
            }
            CausalFormula::BoxSet(div, body) => CausalFormula::BoxSet(div.clone(), body.clone())
                .desugar_disjunctive()
                .desugar_diamond(),
            CausalFormula::Basic(_) | CausalFormula::Box(..) => self.clone(),
            CausalFormula::Not(g) => CausalFormula::not(g.desugar_diamond()),
            CausalFormula::And(a, b) => {
                CausalFormula::and(a.desugar_diamond(), b.desugar_diamond())
            }
            CausalFormula::Or(a, b) => CausalFormula::or(a.desugar_diamond(), b.desugar_diamond()),
            CausalFormula::Implies(a, b) => {
                CausalFormula::implies(a.desugar_diamond(), b.desugar_diamond())
            }
        }
    }

    /// Full desugaring to the core fragment: boxes over point interventions,
    /// bare basic formulas, and Boolean connectives.
    pub fn desugar(&self) -> CausalFormula {
        self.desugar_disjunctive().desugar_diamond()
    }

    /// True when no sugar nodes remain.
    pub fn is_core(&self) -> bool {
        match self {
            CausalFormula::Basic(_) | CausalFormula::Box(..) => true,
            CausalFormula::Diamond(..)
            | CausalFormula::BoxSet(..)
            | CausalFormula::DiamondSet(..) => false,
            CausalFormula::Not(g) => g.is_core(),
            CausalFormula::And(a, b) | CausalFormula::Or(a, b) | CausalFormula::Implies(a, b) => {
                a.is_core() && b.is_core()
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Probabilistic layer
// ---------------------------------------------------------------------------

/// What a probability can be asserted of: a bare basic formula (the 0/1
/// clause) or a basic causal formula `[iv] phi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProbTarget {
    Basic(BasicFormula),
    Box(Intervention, BasicFormula),
}

/// Probabilistic causal formulas: assertions `psi = p` with `p` an exact
/// rational in the unit interval, closed under Boolean connectives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProbCausalFormula {
    Assert(ProbTarget, BigRational),
    Not(Box<ProbCausalFormula>),
    And(Box<ProbCausalFormula>, Box<ProbCausalFormula>),
    Or(Box<ProbCausalFormula>, Box<ProbCausalFormula>),
    Implies(Box<ProbCausalFormula>, Box<ProbCausalFormula>),
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

// Precedence levels for minimal-parenthesis printing; higher binds tighter.
const PREC_IMPLIES: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_UNARY: u8 = 4;

fn print_basic(f: &BasicFormula, sig: &Signature, prec: u8, out: &mut String) {
    match f {
        BasicFormula::True => out.push_str("true"),
        BasicFormula::False => out.push_str("false"),
        BasicFormula::Atom(var, val) => {
            let _ = write!(out, "{}={}", sig.name(*var), sig.value(*var, *val));
        }
        BasicFormula::Not(g) => {
            if let BasicFormula::Atom(var, val) = g.as_ref() {
                let _ = write!(out, "{}!={}", sig.name(*var), sig.value(*var, *val));
            } else {
                out.push('!');
                print_basic(g, sig, PREC_UNARY, out);
            }
        }
        BasicFormula::And(a, b) => binary_basic(" & ", PREC_AND, a, b, sig, prec, out),
        BasicFormula::Or(a, b) => binary_basic(" | ", PREC_OR, a, b, sig, prec, out),
        BasicFormula::Implies(a, b) => {
            let needs = prec > PREC_IMPLIES;
            if needs {
                out.push('(');
            }
            print_basic(a, sig, PREC_IMPLIES + 1, out);
            out.push_str(" -> ");
            print_basic(b, sig, PREC_IMPLIES, out);
            if needs {
                out.push(')');
            }
        }
    }
}

fn binary_basic(
    op: &str,
    level: u8,
    a: &BasicFormula,
    b: &BasicFormula,
    sig: &Signature,
    prec: u8,
    out: &mut String,
) {
    let needs = prec > level;
    if needs {
        out.push('(');
    }
    print_basic(a, sig, level, out);
    out.push_str(op);
    print_basic(b, sig, level + 1, out);
    if needs {
        out.push(')');
    }
}

fn print_intervention(pairs: &[(VarId, u32)], sig: &Signature, out: &mut String) {
    for (i, &(var, val)) in pairs.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{}<-{}", sig.name(var), sig.value(var, val));
    }
}

fn print_disjunctive(div: &DisjunctiveIntervention, sig: &Signature, out: &mut String) {
    for (i, (var, vals)) in div.pairs().iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{}<-", sig.name(*var));
        if vals.len() == 1 {
            let _ = write!(out, "{}", sig.value(*var, vals[0]));
        } else {
            out.push('{');
            for (j, &v) in vals.iter().enumerate() {
                if j > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{}", sig.value(*var, v));
            }
            out.push('}');
        }
    }
}

fn print_modal_body(body: &BasicFormula, sig: &Signature, out: &mut String) {
    out.push(' ');
    // the body binds as a unary term; parenthesize anything looser
    match body {
        BasicFormula::And(..) | BasicFormula::Or(..) | BasicFormula::Implies(..) => {
            out.push('(');
            print_basic(body, sig, 0, out);
            out.push(')');
        }
        _ => print_basic(body, sig, PREC_UNARY, out),
    }
}

fn print_causal(f: &CausalFormula, sig: &Signature, prec: u8, out: &mut String) {
    match f {
        CausalFormula::Basic(b) => print_basic(b, sig, prec, out),
        CausalFormula::Box(iv, body) => {
            out.push('[');
            print_intervention(iv.pairs(), sig, out);
            out.push(']');
            print_modal_body(body, sig, out);
        }
        CausalFormula::Diamond(iv, body) => {
            out.push('<');
            print_intervention(iv.pairs(), sig, out);
            out.push('>');
            print_modal_body(body, sig, out);
        }
        CausalFormula::BoxSet(div, body) => {
            out.push('[');
            print_disjunctive(div, sig, out);
            out.push(']');
            print_modal_body(body, sig, out);
        }
        CausalFormula::DiamondSet(div, body) => {
            out.push('<');
            print_disjunctive(div, sig, out);
            out.push('>');
            print_modal_body(body, sig, out);
        }
        CausalFormula::Not(g) => {
            out.push('!');
            match g.as_ref() {
                // modal operands bind tightly; everything else gets parens
                // unless already atomic
                CausalFormula::Basic(BasicFormula::Atom(..))
                | CausalFormula::Basic(BasicFormula::True)
                | CausalFormula::Basic(BasicFormula::False)
                | CausalFormula::Box(..)
                | CausalFormula::Diamond(..)
                | CausalFormula::BoxSet(..)
                | CausalFormula::DiamondSet(..)
                | CausalFormula::Not(..) => print_causal(g, sig, PREC_UNARY, out),
                _ => {
                    out.push('(');
                    print_causal(g, sig, 0, out);
                    out.push(')');
                }
            }
        }
        CausalFormula::And(a, b) => binary_causal(" & ", PREC_AND, a, b, sig, prec, out),
        CausalFormula::Or(a, b) => binary_causal(" | ", PREC_OR, a, b, sig, prec, out),
        CausalFormula::Implies(a, b) => {
            let needs = prec > PREC_IMPLIES;
            if needs {
                out.push('(');
            }
            print_causal(a, sig, PREC_IMPLIES + 1, out);
            out.push_str(" -> ");
            print_causal(b, sig, PREC_IMPLIES, out);
            if needs {
                out.push(')');
            }
        }
    }
}

fn binary_causal(
    op: &str,
    level: u8,
    a: &CausalFormula,
    b: &CausalFormula,
    sig: &Signature,
    prec: u8,
    out: &mut String,
) {
    let needs = prec > level;
    if needs {
        out.push('(');
    }
    print_causal(a, sig, level, out);
    out.push_str(op);
    print_causal(b, sig, level + 1, out);
    if needs {
        out.push(')');
    }
}

impl BasicFormula {
    pub fn print(&self, sig: &Signature) -> String {
        let mut out = String::new();
        print_basic(self, sig, 0, &mut out);
        out
    }
}

impl CausalFormula {
    pub fn print(&self, sig: &Signature) -> String {
        let mut out = String::new();
        print_causal(self, sig, 0, &mut out);
        out
    }
}

impl ProbCausalFormula {
    pub fn print(&self, sig: &Signature) -> String {
        let mut out = String::new();
        self.print_into(sig, 0, &mut out);
        out
    }

    fn print_into(&self, sig: &Signature, prec: u8, out: &mut String) {
        match self {
            ProbCausalFormula::Assert(target, p) => {
                let needs = prec > 0;
                if needs {
                    out.push('(');
                }
                match target {
                    ProbTarget::Basic(b) => print_basic(b, sig, PREC_UNARY, out),
                    ProbTarget::Box(iv, body) => {
                        out.push('[');
                        print_intervention(iv.pairs(), sig, out);
                        out.push(']');
                        print_modal_body(body, sig, out);
                    }
                }
                let _ = write!(out, " = {p}");
                if needs {
                    out.push(')');
                }
            }
            ProbCausalFormula::Not(g) => {
                out.push('!');
                out.push('(');
                g.print_into(sig, 0, out);
                out.push(')');
            }
            ProbCausalFormula::And(a, b) => {
                a.print_into(sig, PREC_AND, out);
                out.push_str(" & ");
                b.print_into(sig, PREC_AND, out);
            }
            ProbCausalFormula::Or(a, b) => {
                a.print_into(sig, PREC_OR, out);
                out.push_str(" | ");
                b.print_into(sig, PREC_OR, out);
            }
            ProbCausalFormula::Implies(a, b) => {
                a.print_into(sig, PREC_IMPLIES + 1, out);
                out.push_str(" -> ");
                b.print_into(sig, PREC_IMPLIES, out);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Structural JSON rendering (golden-test friendly)
// ---------------------------------------------------------------------------

impl BasicFormula {
    pub fn to_json(&self, sig: &Signature) -> serde_json::Value {
        use serde_json::json;
        match self {
            BasicFormula::True => json!(true),
            BasicFormula::False => json!(false),
            BasicFormula::Atom(var, val) => {
                json!({"atom": {"var": sig.name(*var), "value": sig.value(*var, *val)}})
            }
            BasicFormula::Not(g) => json!({"not": g.to_json(sig)}),
            BasicFormula::And(a, b) => json!({"and": [a.to_json(sig), b.to_json(sig)]}),
            BasicFormula::Or(a, b) => json!({"or": [a.to_json(sig), b.to_json(sig)]}),
            BasicFormula::Implies(a, b) => json!({"implies": [a.to_json(sig), b.to_json(sig)]}),
        }
    }
}

impl CausalFormula {
    pub fn to_json(&self, sig: &Signature) -> serde_json::Value {
        use serde_json::json;
        let iv_json = |iv: &Intervention| {
            iv.pairs()
                .iter()
                .map(|&(v, x)| json!([sig.name(v), sig.value(v, x)]))
                .collect::<Vec<_>>()
        };
        match self {
            CausalFormula::Basic(b) => json!({"basic": b.to_json(sig)}),
            CausalFormula::Box(iv, body) => {
                json!({"box": {"do": iv_json(iv), "body": body.to_json(sig)}})
            }
            CausalFormula::Diamond(iv, body) => {
                json!({"diamond": {"do": iv_json(iv), "body": body.to_json(sig)}})
            }
            CausalFormula::BoxSet(div, body) | CausalFormula::DiamondSet(div, body) => {
                let sets = div
                    .pairs()
                    .iter()
                    .map(|(v, vals)| {
                        json!([
                            sig.name(*v),
                            vals.iter().map(|&x| sig.value(*v, x)).collect::<Vec<_>>()
                        ])
                    })
                    .collect::<Vec<_>>();
                let key = if matches!(self, CausalFormula::BoxSet(..)) {
                    "box_set"
                } else {
                    "diamond_set"
                };
                json!({key: {"do": sets, "body": body.to_json(sig)}})
            }
            CausalFormula::Not(g) => json!({"not": g.to_json(sig)}),
            CausalFormula::And(a, b) => json!({"and": [a.to_json(sig), b.to_json(sig)]}),
            CausalFormula::Or(a, b) => json!({"or": [a.to_json(sig), b.to_json(sig)]}),
            CausalFormula::Implies(a, b) => json!({"implies": [a.to_json(sig), b.to_json(sig)]}),
        }
    }
}
