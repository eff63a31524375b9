//! Exact reasoning engine for acyclic nondeterministic structural equation
//! models (NSEMs).
//!
//! An NSEM assigns each endogenous variable a *multi-valued* equation: every
//! configuration of its parents maps to a nonempty set of admissible values
//! instead of a single forced value. This crate evaluates counterfactual and
//! interventionist formulas over such models by explicit model surgery
//! (actualized refinement followed by intervention) and exhaustive solution
//! enumeration, checks the classical causal axioms against concrete models by
//! counterexample search, and computes counterfactual probabilities for
//! probabilistic NSEMs and causal Bayesian networks in exact rational
//! arithmetic.
//!
//! Everything is discrete, finite, and deterministic: models and worlds are
//! immutable after construction, all operations are pure functions, and any
//! randomness is driven by explicit seeds.
//!
//! ```
//! use nsem::format::compile_model;
//! use nsem::model::World;
//! use nsem::parse::parse_causal;
//! use nsem::semantics::{satisfies, Setting};
//! use nsem::signature::Value;
//!
//! // Y -> X; X is forced to 0 when Y=0 but free when Y=1.
//! let model = compile_model(&serde_json::from_str(r#"{
//!     "endogenous": {"X": [0, 1], "Y": [0, 1]},
//!     "edges": [["Y", "X"]],
//!     "equations": {
//!         "X": [ {"when": {"Y": 1}, "values": [0, 1]},
//!                {"when": "default", "values": [0]} ],
//!         "Y": [ {"when": "default", "values": [0, 1]} ]
//!     }
//! }"#).unwrap()).unwrap();
//!
//! let sig = model.signature();
//! let observed =
//!     World::from_named(sig, [("X", &Value::Int(0)), ("Y", &Value::Int(0))]).unwrap();
//! let at_world = Setting::world(&model, observed).unwrap();
//!
//! // Had Y been 1, X = 1 is possible but not guaranteed.
//! assert!(satisfies(&at_world, &parse_causal("<Y<-1> X=1", sig).unwrap()));
//! assert!(!satisfies(&at_world, &parse_causal("[Y<-1] X=1", sig).unwrap()));
//! ```

pub mod axioms;
pub mod format;
pub mod formula;
pub mod graph;
pub mod model;
pub mod parse;
pub mod prob;
pub mod semantics;
pub mod signature;

pub use formula::{BasicFormula, CausalFormula, Intervention, ProbCausalFormula};
pub use graph::CausalGraph;
pub use model::{Model, ValidationReport, World};
pub use semantics::{Setting, SettingLevel};
pub use signature::{Signature, Value, VarId, VarKind};
