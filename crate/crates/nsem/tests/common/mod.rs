//! Shared corpus builders for the integration suites.
#![allow(dead_code)] // each test binary uses its own subset

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nsem::axioms::{random_model, GenConfig};
use nsem::formula::{BasicFormula, Intervention};
use nsem::graph::CausalGraph;
use nsem::model::{Model, PartialWorld, ValueSet};
use nsem::signature::{Signature, Value, VarId, VarKind};

/// All tuples of a mixed-radix space, last position fastest.
pub fn tuples(dims: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &d in dims {
        let mut next = Vec::with_capacity(out.len() * d);
        for prefix in &out {
            for v in 0..d {
                let mut t = prefix.clone();
                t.push(v);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

fn subsets(pool: &[VarId]) -> Vec<Vec<VarId>> {
    let mut out = vec![vec![]];
    for &v in pool {
        let mut next = Vec::with_capacity(out.len() * 2);
        for s in &out {
            next.push(s.clone());
            let mut t = s.clone();
            t.push(v);
            next.push(t);
        }
        out = next;
    }
    out
}

fn binary_signature(n_endo: usize, n_exo: usize) -> Arc<Signature> {
    let mut vars = Vec::new();
    for i in 0..n_exo {
        vars.push((format!("U{i}"), VarKind::Exogenous, vec![Value::Int(0), Value::Int(1)]));
    }
    for i in 0..n_endo {
        vars.push((format!("V{i}"), VarKind::Endogenous, vec![Value::Int(0), Value::Int(1)]));
    }
    Signature::new(vars).expect("distinct generated names")
}

/// Every parent-set choice with edges oriented along the canonical variable
/// order: endogenous variable `i` draws parents from the exogenous variables
/// and the endogenous variables before it.
fn graph_choices(sig: &Signature) -> Vec<CausalGraph> {
    let endo = sig.endogenous();
    let mut per_var: Vec<Vec<Vec<VarId>>> = Vec::new();
    for (i, _) in endo.iter().enumerate() {
        let mut pool: Vec<VarId> = sig.exogenous().to_vec();
        pool.extend(endo[..i].iter().copied());
        per_var.push(subsets(&pool));
    }
    let dims: Vec<usize> = per_var.iter().map(Vec::len).collect();
    tuples(&dims)
        .into_iter()
        .map(|choice| {
            let mut edges = Vec::new();
            for (i, &pick) in choice.iter().enumerate() {
                for &p in &per_var[i][pick] {
                    edges.push((p, endo[i]));
                }
            }
            CausalGraph::new(sig.len(), &edges)
        })
        .collect()
}

const BINARY_ROW_CHOICES: [&[u32]; 3] = [&[0], &[1], &[0, 1]];

/// Every total binary NSEM with the given variable counts: all graphs along
/// the canonical order, all equation fillings.
pub fn exhaustive_binary_models(n_endo: usize, n_exo: usize) -> Vec<Model> {
    let sig = binary_signature(n_endo, n_exo);
    let mut out = Vec::new();
    for graph in graph_choices(&sig) {
        let endo = sig.endogenous().to_vec();
        let row_counts: Vec<usize> =
            endo.iter().map(|&v| 1usize << graph.parents(v).len()).collect();
        let total_rows: usize = row_counts.iter().sum();
        for filling in tuples(&vec![BINARY_ROW_CHOICES.len(); total_rows]) {
            let mut slot = 0;
            let mut equations = Vec::new();
            for (i, &v) in endo.iter().enumerate() {
                let rows: Vec<ValueSet> = (0..row_counts[i])
                    .map(|_| {
                        let choice = BINARY_ROW_CHOICES[filling[slot]];
                        slot += 1;
                        ValueSet::new(choice.to_vec())
                    })
                    .collect();
                equations.push((v, rows));
            }
            out.push(
                Model::from_parts(Arc::clone(&sig), graph.clone(), equations)
                    .expect("generated models are total and acyclic"),
            );
        }
    }
    out
}

/// All graph shapes at the given size, each with `per_graph` seeded random
/// equation fillings (binary ranges).
pub fn sampled_graph_models(
    n_endo: usize,
    n_exo: usize,
    per_graph: usize,
    seed: u64,
) -> Vec<Model> {
    let sig = binary_signature(n_endo, n_exo);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for graph in graph_choices(&sig) {
        for _ in 0..per_graph {
            let endo = sig.endogenous().to_vec();
            let equations: Vec<(VarId, Vec<ValueSet>)> = endo
                .iter()
                .map(|&v| {
                    let rows = 1usize << graph.parents(v).len();
                    let table: Vec<ValueSet> = (0..rows)
                        .map(|_| {
                            let pick = rng.gen_range(0..BINARY_ROW_CHOICES.len());
                            ValueSet::new(BINARY_ROW_CHOICES[pick].to_vec())
                        })
                        .collect();
                    (v, table)
                })
                .collect();
            out.push(
                Model::from_parts(Arc::clone(&sig), graph.clone(), equations)
                    .expect("generated models are total and acyclic"),
            );
        }
    }
    out
}

/// Seeded random models up to four endogenous and one exogenous variable
/// with ranges up to three.
pub fn random_models(count: usize, seed: u64) -> Vec<Model> {
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let cfg = GenConfig {
                exogenous: master.gen_range(0..=1),
                endogenous: master.gen_range(1..=4),
                max_range: master.gen_range(2..=3),
                max_parents: 2,
                nondeterminism: 0.5,
            };
            random_model(master.gen::<u64>(), &cfg)
        })
        .collect()
}

/// The oracle-agreement corpus: exhaustive small binary models, all
/// three-variable graph shapes with sampled equations, and seeded random
/// models. Returns (models, description-of-coverage).
pub fn oracle_corpus() -> (Vec<Model>, String) {
    let mut models = Vec::new();
    let mut exhaustive = 0;
    for (n_endo, n_exo) in [(1, 0), (1, 1), (2, 0), (2, 1)] {
        let batch = exhaustive_binary_models(n_endo, n_exo);
        exhaustive += batch.len();
        models.extend(batch);
    }
    let mut sampled = 0;
    for n_exo in [0, 1] {
        let batch = sampled_graph_models(3, n_exo, 20, 11 + n_exo as u64);
        sampled += batch.len();
        models.extend(batch);
    }
    let random = random_models(500, 2024);
    let n_random = random.len();
    models.extend(random);
    let desc = format!(
        "{exhaustive} exhaustive (≤2 endogenous, ≤1 exogenous, binary), \
         {sampled} sampled over all 3-endogenous graph shapes, {n_random} random (≤4 endogenous, ranges ≤3)"
    );
    (models, desc)
}

/// Every intervention over the endogenous variables (all subsets, all value
/// tuples), starting with the empty one.
pub fn all_interventions(sig: &Signature) -> Vec<Intervention> {
    let mut out = Vec::new();
    for vars in subsets(sig.endogenous()) {
        let dims: Vec<usize> = vars.iter().map(|&v| sig.range_len(v)).collect();
        for vals in tuples(&dims) {
            let pairs: Vec<(VarId, u32)> =
                vars.iter().zip(&vals).map(|(&v, &x)| (v, x as u32)).collect();
            out.push(Intervention::new(sig, pairs).expect("in range"));
        }
    }
    out
}

/// Atoms and negated atoms over every endogenous variable and value.
pub fn atomic_formulas(sig: &Signature) -> Vec<BasicFormula> {
    let mut out = Vec::new();
    for &v in sig.endogenous() {
        for x in 0..sig.range_len(v) as u32 {
            out.push(BasicFormula::Atom(v, x));
            out.push(BasicFormula::not(BasicFormula::Atom(v, x)));
        }
    }
    out
}

/// A random basic formula of the given connective depth.
pub fn random_basic(sig: &Signature, rng: &mut ChaCha8Rng, depth: usize) -> BasicFormula {
    let endo = sig.endogenous();
    if depth == 0 || rng.gen_bool(0.5) {
        let v = endo[rng.gen_range(0..endo.len())];
        let x = rng.gen_range(0..sig.range_len(v)) as u32;
        let atom = BasicFormula::Atom(v, x);
        return if rng.gen_bool(0.3) { BasicFormula::not(atom) } else { atom };
    }
    let a = random_basic(sig, rng, depth - 1);
    let b = random_basic(sig, rng, depth - 1);
    match rng.gen_range(0..3) {
        0 => BasicFormula::and(a, b),
        1 => BasicFormula::or(a, b),
        _ => BasicFormula::implies(a, b),
    }
}

/// A random point intervention over at most two endogenous variables.
pub fn random_point_iv(sig: &Signature, rng: &mut ChaCha8Rng) -> Intervention {
    let endo = sig.endogenous();
    let k = rng.gen_range(0..=endo.len().min(2));
    let mut pool: Vec<VarId> = endo.to_vec();
    let mut pairs = Vec::new();
    for _ in 0..k {
        let at = rng.gen_range(0..pool.len());
        let v = pool.swap_remove(at);
        pairs.push((v, rng.gen_range(0..sig.range_len(v)) as u32));
    }
    Intervention::new(sig, pairs).unwrap()
}

/// Combines two causal formulas the way the text grammar groups them: a
/// connective over two purely basic operands is one basic formula.
pub fn combine_causal(
    op: u8,
    a: nsem::formula::CausalFormula,
    b: nsem::formula::CausalFormula,
) -> nsem::formula::CausalFormula {
    use nsem::formula::{BasicFormula, CausalFormula};
    if let (CausalFormula::Basic(x), CausalFormula::Basic(y)) = (&a, &b) {
        let merged = match op {
            0 => BasicFormula::and(x.clone(), y.clone()),
            1 => BasicFormula::or(x.clone(), y.clone()),
            _ => BasicFormula::implies(x.clone(), y.clone()),
        };
        return CausalFormula::Basic(merged);
    }
    match op {
        0 => CausalFormula::and(a, b),
        1 => CausalFormula::or(a, b),
        _ => CausalFormula::implies(a, b),
    }
}

fn negate_causal(f: nsem::formula::CausalFormula) -> nsem::formula::CausalFormula {
    use nsem::formula::{BasicFormula, CausalFormula};
    match f {
        CausalFormula::Basic(b) => CausalFormula::Basic(BasicFormula::not(b)),
        other => CausalFormula::not(other),
    }
}

/// A random causal formula with boxes, diamonds, and bare basic leaves,
/// grouped the way the grammar would group its printed form.
pub fn random_causal(
    sig: &Signature,
    rng: &mut ChaCha8Rng,
    depth: usize,
) -> nsem::formula::CausalFormula {
    use nsem::formula::CausalFormula;
    if depth == 0 || rng.gen_bool(0.4) {
        let iv = random_point_iv(sig, rng);
        let body = random_basic(sig, rng, 1);
        return match rng.gen_range(0..3) {
            0 => CausalFormula::Basic(random_basic(sig, rng, 1)),
            1 => CausalFormula::Box(iv, body),
            _ => CausalFormula::Diamond(iv, body),
        };
    }
    match rng.gen_range(0..4) {
        0 => negate_causal(random_causal(sig, rng, depth - 1)),
        op => combine_causal(
            op - 1,
            random_causal(sig, rng, depth - 1),
            random_causal(sig, rng, depth - 1),
        ),
    }
}

/// A random causal formula that may also use disjunctive-intervention sugar.
pub fn random_sugared(
    sig: &Signature,
    rng: &mut ChaCha8Rng,
    depth: usize,
) -> nsem::formula::CausalFormula {
    use nsem::formula::{CausalFormula, DisjunctiveIntervention};
    if rng.gen_bool(0.3) {
        let endo = sig.endogenous();
        let v = endo[rng.gen_range(0..endo.len())];
        let range = sig.range_len(v);
        let size = rng.gen_range(1..=range);
        let mut vals: Vec<u32> = (0..range as u32).collect();
        while vals.len() > size {
            vals.remove(rng.gen_range(0..vals.len()));
        }
        let div = DisjunctiveIntervention::new(sig, vec![(v, vals)]).unwrap();
        let body = random_basic(sig, rng, 1);
        return if rng.gen_bool(0.5) {
            CausalFormula::BoxSet(div, body)
        } else {
            CausalFormula::DiamondSet(div, body)
        };
    }
    if depth == 0 {
        return random_causal(sig, rng, 0);
    }
    match rng.gen_range(0..4) {
        0 => negate_causal(random_sugared(sig, rng, depth - 1)),
        1 | 2 => {
            let op = rng.gen_range(0..3);
            combine_causal(
                op,
                random_sugared(sig, rng, depth - 1),
                random_sugared(sig, rng, depth - 1),
            )
        }
        _ => random_causal(sig, rng, depth),
    }
}

/// Every context of the signature.
pub fn all_contexts(sig: &Signature) -> Vec<PartialWorld> {
    let exo = sig.exogenous().to_vec();
    let dims: Vec<usize> = exo.iter().map(|&v| sig.range_len(v)).collect();
    tuples(&dims)
        .into_iter()
        .map(|key| {
            let mut ctx = PartialWorld::empty(sig);
            for (&v, &ix) in exo.iter().zip(&key) {
                ctx.set(v, ix as u32);
            }
            ctx
        })
        .collect()
}
