//! The rock-throw scenario end to end: a thrower who may or may not throw,
//! and a bottle that may or may not be hit when she does.
//!
//! Run with: cargo run -p nsem --example rock_throw

use std::sync::Arc;

use nsem::format::compile_pmodel;
use nsem::formula::Intervention;
use nsem::graph::CausalGraph;
use nsem::model::{Model, ValueSet, World};
use nsem::parse::parse_causal;
use nsem::prob::induce_cbn;
use nsem::semantics::{satisfies, Setting};
use nsem::signature::{Signature, Value, VarKind};

fn main() {
    // --- exact layer: the multi-valued model ---------------------------
    // T (throw) is unconstrained; H (hit) can go either way when T=1 and
    // is certainly 0 when T=0.
    let sig = Signature::new(vec![
        ("H".into(), VarKind::Endogenous, vec![Value::Int(0), Value::Int(1)]),
        ("T".into(), VarKind::Endogenous, vec![Value::Int(0), Value::Int(1)]),
    ])
    .unwrap();
    let (h, t) = (sig.lookup("H").unwrap(), sig.lookup("T").unwrap());
    let model = Model::from_parts(
        Arc::clone(&sig),
        CausalGraph::new(2, &[(t, h)]),
        vec![
            (h, vec![ValueSet::new(vec![0]), ValueSet::new(vec![0, 1])]),
            (t, vec![ValueSet::new(vec![0, 1])]),
        ],
    )
    .unwrap();

    println!("solutions:");
    for w in model.solutions() {
        println!("  {}", w.display(&sig));
    }

    // Observed: no throw, no hit. Had she thrown, the hit is genuinely
    // open: possibly a hit, but not necessarily.
    let observed = World::from_named(&sig, [("T", &Value::Int(0)), ("H", &Value::Int(0))]).unwrap();
    let setting = Setting::world(&model, observed.clone()).unwrap();
    for text in ["<T<-1> H=1", "[T<-1] H=1", "[T<-1] H=0 | <T<-1> H=0"] {
        let f = parse_causal(text, &sig).unwrap();
        println!("(observed T=0, H=0) |= {text}  ->  {}", satisfies(&setting, &f));
    }

    // --- probabilistic layer -------------------------------------------
    let pm = compile_pmodel(
        &serde_json::from_str(
            r#"{
                "endogenous": {"H": [0, 1], "T": [0, 1]},
                "edges": [["T", "H"]],
                "cpt": {
                    "T": [ {"when": "default", "dist": [
                        {"value": 0, "prob": "1/2"}, {"value": 1, "prob": "1/2"} ]} ],
                    "H": [
                        {"when": {"T": 0}, "dist": [ {"value": 0, "prob": "1"} ]},
                        {"when": {"T": 1}, "dist": [
                            {"value": 0, "prob": "1/5"}, {"value": 1, "prob": "4/5"} ]}
                    ]
                }
            }"#,
        )
        .unwrap(),
    )
    .unwrap();
    assert!(pm.consistent_with(&model));

    let psig = Arc::clone(pm.signature());
    let observed = World::from_named(&psig, [("T", &Value::Int(0)), ("H", &Value::Int(0))]).unwrap();
    let do_throw =
        Intervention::from_named(&psig, [("T", &Value::Int(1))]).unwrap();
    let hit = nsem::parse::parse_basic("H=1", &psig).unwrap();
    let p = pm.counterfactual_probability(&observed, &do_throw, &hit).unwrap();
    println!("P*(H=1 | do(T<-1), observed T=0, H=0) = {p}");

    // The same number falls out of the induced network directly.
    let cbn = induce_cbn(&pm).unwrap();
    let dist = cbn.counterfactual(&observed, &do_throw).unwrap();
    println!("network counterfactual distribution:");
    print!("{}", dist.display(&psig));
}
