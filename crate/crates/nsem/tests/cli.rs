//! End-to-end CLI coverage: output formats, exit codes, and determinism.

use std::process::{Command, Output};

fn nsem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsem"))
        .args(args)
        .output()
        .expect("CLI binary runs")
}

fn stdout_of(out: &Output) -> &str {
    std::str::from_utf8(&out.stdout).expect("utf8 stdout")
}

fn code_of(out: &Output) -> i32 {
    out.status.code().unwrap_or(-1)
}

#[test]
fn validate_reports_and_exit_codes() {
    let ok = nsem(&["validate", "tests/data/modelA.json"]);
    assert_eq!(stdout_of(&ok), "valid\n");
    assert_eq!(code_of(&ok), 0);

    let ok_json = nsem(&["validate", "tests/data/modelA.json", "--json"]);
    let parsed: serde_json::Value = serde_json::from_str(stdout_of(&ok_json)).unwrap();
    assert_eq!(parsed["valid"], serde_json::json!(true));

    let bad = "tests/data/bad_model.json";
    std::fs::write(
        bad,
        r#"{"endogenous": {"X": [0, 1], "Y": [0, 1]},
            "edges": [["Y", "X"], ["X", "Y"]],
            "equations": {
                "X": [{"when": "default", "values": [0]}],
                "Y": [{"when": "default", "values": [0, 1]}]
            }}"#,
    )
    .unwrap();
    let invalid = nsem(&["validate", bad]);
    assert_eq!(code_of(&invalid), 3);
    assert!(stdout_of(&invalid).contains("cycle"), "{}", stdout_of(&invalid));
    std::fs::remove_file(bad).unwrap();

    let missing = nsem(&["validate", "tests/data/nope.json"]);
    assert_eq!(code_of(&missing), 2);
}

#[test]
fn solutions_respect_contexts_and_json() {
    let out = nsem(&["solutions", "tests/data/modelA.json"]);
    assert_eq!(stdout_of(&out), "X=0, Y=0\nX=0, Y=1\nX=1, Y=1\n");

    let json = nsem(&["solutions", "tests/data/modelA.json", "--json"]);
    let parsed: serde_json::Value = serde_json::from_str(stdout_of(&json)).unwrap();
    assert_eq!(parsed["worlds"].as_array().unwrap().len(), 3);
    assert_eq!(parsed["worlds"][0]["X"], serde_json::json!(0));
}

#[test]
fn eval_levels_and_falsity_is_not_an_error() {
    let f = nsem(&["eval", "tests/data/modelB.json", "--formula", "[] X=1"]);
    assert_eq!(stdout_of(&f), "false\nlevel: model\n");
    assert_eq!(code_of(&f), 0, "falsity exits zero");

    let json = nsem(&[
        "eval",
        "tests/data/modelA.json",
        "--formula",
        "<Y<-1> X=1",
        "--world",
        "Y=0,X=0",
        "--json",
    ]);
    let parsed: serde_json::Value = serde_json::from_str(stdout_of(&json)).unwrap();
    assert_eq!(parsed["result"], serde_json::json!(true));
    assert_eq!(parsed["formula"], serde_json::json!("<Y<-1> X=1"));
    assert_eq!(parsed["level"]["world"]["X"], serde_json::json!(0));

    // precondition: not a solution
    let bad_world = nsem(&[
        "eval", "tests/data/modelA.json", "--formula", "[] X=0", "--world", "Y=0,X=1",
    ]);
    assert_eq!(code_of(&bad_world), 4);

    // usage: unknown variable in the formula
    let bad_formula =
        nsem(&["eval", "tests/data/modelA.json", "--formula", "[Z<-1] X=1"]);
    assert_eq!(code_of(&bad_formula), 2);

    // usage: probability assertions belong to `prob`
    let prob_formula = nsem(&[
        "eval", "tests/data/modelA.json", "--formula", "[Y<-1] X=1 = 1/2",
    ]);
    assert_eq!(code_of(&prob_formula), 2);
}

#[test]
fn refine_and_intervene_emit_loadable_models() {
    let refined = nsem(&["refine", "tests/data/modelA.json", "--world", "Y=1,X=0"]);
    assert_eq!(code_of(&refined), 0);
    let file: nsem::format::ModelFile = serde_json::from_str(stdout_of(&refined)).unwrap();
    let model = nsem::format::compile_model(&file).unwrap();
    assert_eq!(model.solutions().len(), 1, "refinement pins the observed world");

    let not_solution = nsem(&["refine", "tests/data/modelA.json", "--world", "Y=0,X=1"]);
    assert_eq!(code_of(&not_solution), 4);

    let surged = nsem(&["intervene", "tests/data/modelA.json", "--do", "X=1"]);
    assert_eq!(code_of(&surged), 0);
    let file: nsem::format::PModelFile = match serde_json::from_str(stdout_of(&surged)) {
        Ok(f) => f,
        Err(_) => {
            let f: nsem::format::ModelFile = serde_json::from_str(stdout_of(&surged)).unwrap();
            assert!(f.edges.is_empty(), "intervening on X removes its incoming edge");
            let m = nsem::format::compile_model(&f).unwrap();
            let x = m.signature().lookup("X").unwrap();
            assert_eq!(m.equation(x).unwrap().row_count(), 1);
            return;
        }
    };
    panic!("intervene must emit a plain model file, got cpt document {file:?}");
}

#[test]
fn axiom_sweep_is_deterministic_and_json_parseable() {
    let args = [
        "axioms",
        "--random",
        "8",
        "--seed",
        "5",
        "--max-endogenous",
        "2",
        "--max-range",
        "2",
    ];
    let a = nsem(&args);
    let b = nsem(&args);
    assert_eq!(stdout_of(&a), stdout_of(&b), "byte-identical given identical seeds");
    assert_eq!(code_of(&a), 0);
    assert!(stdout_of(&a).contains("axiom"), "{}", stdout_of(&a));

    let mut json_args = args.to_vec();
    json_args.push("--json");
    let j = nsem(&json_args);
    let summary: nsem::axioms::SweepSummary =
        serde_json::from_str(stdout_of(&j)).expect("summary round-trips");
    assert_eq!(summary.models, 11, "three references plus eight random models");
    // the reference models witness the unsound schemas
    let d10b = summary
        .row(nsem::axioms::AxiomId::D10b, nsem::axioms::Mode::Counterfactual)
        .unwrap();
    assert!(d10b.counterexample_count > 0);
    assert_eq!(d10b.counterexamples[0].model_label, "reference-a");
}

#[test]
fn axioms_accept_an_explicit_model() {
    let out = nsem(&[
        "axioms",
        "tests/data/modelB.json",
        "--mode",
        "iv",
        "--axioms",
        "D10c,D10a",
    ]);
    assert_eq!(code_of(&out), 0);
    let text = stdout_of(&out);
    assert!(text.contains("D10c"), "{text}");
    assert!(text.contains("counterexample D10c/iv"), "{text}");
    assert!(text.contains("context (empty)"), "{text}");
}

#[test]
fn prob_and_cbn_emit_exact_rationals() {
    let p = nsem(&[
        "prob", "tests/data/suzy.json", "--world", "T=0,H=0", "--do", "T=1", "--phi", "H=1",
        "--json",
    ]);
    let parsed: serde_json::Value = serde_json::from_str(stdout_of(&p)).unwrap();
    assert_eq!(parsed["probability"], serde_json::json!("4/5"));
    assert_eq!(parsed["decimal"], serde_json::json!(0.8));

    // outside-support world
    let outside = nsem(&[
        "prob", "tests/data/suzy.json", "--world", "T=0,H=1", "--do", "T=1", "--phi", "H=1",
    ]);
    assert_eq!(code_of(&outside), 4);

    let c = nsem(&[
        "cbn",
        "tests/data/suzy_exo.json",
        "--induce",
        "--state",
        "T=0,H=0",
        "--do",
        "T=1",
        "--json",
    ]);
    let parsed: serde_json::Value = serde_json::from_str(stdout_of(&c)).unwrap();
    let entries = parsed["distribution"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
    assert_eq!(entries[1]["state"]["H"], serde_json::json!(1));
    assert_eq!(entries[1]["prob"], serde_json::json!("4/5"));

    // without --induce an exogenous model is rejected as a network
    let not_cbn = nsem(&[
        "cbn", "tests/data/suzy_exo.json", "--state", "T=0,H=0", "--do", "T=1",
    ]);
    assert_eq!(code_of(&not_cbn), 3);
}

#[test]
fn eval_supports_state_level_settings() {
    let out = nsem(&[
        "eval", "tests/data/modelA.json", "--formula", "[] X=0", "--state", "X=0,Y=0",
    ]);
    assert_eq!(stdout_of(&out), "true\nlevel: state (X=0, Y=0)\n");
    assert_eq!(code_of(&out), 0);
}

#[test]
fn string_valued_ranges_work_end_to_end() {
    let path = "tests/data/weather_tmp.json";
    std::fs::write(
        path,
        r#"{
            "endogenous": {"Rain": ["no", "yes"], "Lawn": ["dry", "wet"]},
            "edges": [["Rain", "Lawn"]],
            "equations": {
                "Rain": [ {"when": "default", "values": ["no", "yes"]} ],
                "Lawn": [
                    {"when": {"Rain": "yes"}, "values": ["wet"]},
                    {"when": {"Rain": "no"}, "values": ["dry", "wet"]}
                ]
            }
        }"#,
    )
    .unwrap();
    let sols = nsem(&["solutions", path]);
    assert_eq!(
        stdout_of(&sols),
        "Lawn=dry, Rain=no\nLawn=wet, Rain=no\nLawn=wet, Rain=yes\n"
    );
    // bare and quoted value spellings both parse
    let e1 = nsem(&[
        "eval", path, "--formula", "[Rain<-yes] Lawn=wet", "--world", "Rain=no,Lawn=dry",
    ]);
    assert_eq!(stdout_of(&e1), "true\nlevel: world (Lawn=dry, Rain=no)\n");
    let e2 = nsem(&[
        "eval", path, "--formula", "<Rain<-\"no\"> Lawn=\"wet\"", "--world", "Rain=no,Lawn=dry",
    ]);
    // the dry observation pins Lawn's Rain=no row, so wet is not attainable
    assert_eq!(stdout_of(&e2), "false\nlevel: world (Lawn=dry, Rain=no)\n");
    std::fs::remove_file(path).unwrap();
}

#[test]
fn json_outputs_round_trip_through_the_library() {
    // refine output parses back through the same serializer stack
    let refined = nsem(&["refine", "tests/data/modelC.json", "--world", "X=1,Y=1", "--json"]);
    let file: nsem::format::ModelFile = serde_json::from_str(stdout_of(&refined)).unwrap();
    let m = nsem::format::compile_model(&file).unwrap();
    let resaved = serde_json::to_string_pretty(&nsem::format::model_to_file(&m)).unwrap();
    assert_eq!(stdout_of(&refined).trim_end(), resaved);
}
