//! Acceptance gate: one test per shipping criterion, each printing a
//! single pass line on success (run with `--nocapture` to see them all).
//!
//! These tests pin the engine to its ground truth: hand-checked fixture
//! models, closed-form laws, and seeded random sweeps large enough to
//! catch regressions in any module.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use relcalc::fragments::witness_model;
use relcalc::generate::{generate_model, GenParams, ModelKind};
use relcalc::identify::{
    identified_graph, rank_options, recursiveness_test, InfoOption, PonderedCost, RecVerdict,
    DEFAULT_MAX_EXTENSIONS,
};
use relcalc::language::{parse_formula_set_with_sig, Literal};
use relcalc::scm::{direct_sum, model_from_json, valuations, Assignment, ModelClass};
use relcalc::semantics::{theory_literals, Evaluator, LiteralTheory};
use relcalc::{AxiomSystem, Calculus, CausalModel, Extension, Formula, Signature, VarSet};

const THM11: &str = include_str!("fixtures/thm11.json");
const TWO_CONTEXT: &str = include_str!("fixtures/two_context.json");
const CHAIN3: &str = include_str!("fixtures/chain3.json");
const EX3: &str = include_str!("fixtures/ex3.json");
const EX1: &str = include_str!("fixtures/ex1.txt");

fn model(json: &str) -> CausalModel {
    model_from_json(json).unwrap()
}

fn uniq_params(n: usize, contexts: usize) -> GenParams {
    GenParams { n, contexts, ..GenParams::new(ModelKind::Uniq) }
}

fn theory_formulas(th: &LiteralTheory) -> Vec<Formula> {
    th.literals().map(Literal::to_formula).collect()
}

fn theory_extension(th: &LiteralTheory) -> Extension {
    Extension::from_verdicts(th.space(), th.verdicts().to_vec())
}

fn ex1_gamma() -> (Calculus, Vec<Formula>) {
    let calc = Calculus::new(Signature::uniform(4, &["0", "1"]).unwrap());
    let gamma = parse_formula_set_with_sig(EX1, calc.space().sig()).unwrap();
    (calc, gamma)
}

/// Every ground axiom instance holds in the theory of every sampled
/// model: 200 unique-response seeds at 3 binary variables, then 60
/// four-variable seeds cycling through all three generator kinds, each
/// with 1 or 2 contexts.
#[test]
fn axiom_soundness_on_random_models() {
    fn instances_hold(m: &CausalModel, label: &str) {
        let th = theory_literals(m).unwrap();
        let calc = Calculus::new(m.sig().clone());
        for inst in calc.instances() {
            let holds = |a| th.verdict(calc.space().id(a));
            if inst.antecedents.iter().all(|&a| holds(a)) {
                assert!(holds(inst.consequent), "{label}: {:?} instance violated", inst.axiom);
            }
        }
    }

    for seed in 0..200u64 {
        let params = uniq_params(3, 1 + (seed % 2) as usize);
        let m = generate_model(&params, seed).unwrap();
        instances_hold(&m, &format!("seed {seed}"));
    }
    for seed in 0..60u64 {
        let kind = match seed % 3 {
            0 => ModelKind::Uniq,
            1 => ModelKind::StrongRecursive,
            _ => ModelKind::Recursive,
        };
        let params =
            GenParams { n: 4, contexts: 1 + (seed % 2) as usize, ..GenParams::new(kind) };
        let m = generate_model(&params, 1000 + seed).unwrap();
        instances_hold(&m, &format!("{kind} seed {seed}"));
    }
    println!(
        "acceptance: axiom soundness on 200 three-variable and 60 four-variable models: pass"
    );
}

/// Responses compose: fixing any variable at the value it already takes
/// under an intervention changes no other response. Checked exhaustively
/// over every intervention subset, valuation, held variable, and context
/// on the fixtures and 100 random models.
#[test]
fn composition_law_is_exhaustive() {
    fn composition_holds(m: &CausalModel, label: &str) {
        let sig = m.sig();
        let full = sig.full_set();
        for xs in full.subsets() {
            let free = full.minus(xs);
            if free.is_empty() {
                continue;
            }
            for x in valuations(sig, xs) {
                for ctx in m.contexts() {
                    let base = m.potential_response(&x, free, ctx).unwrap();
                    for w in free.iter() {
                        let rest = free.minus(VarSet::singleton(w));
                        if rest.is_empty() {
                            continue;
                        }
                        let mut pinned = x;
                        pinned.insert(w, base.get(w).unwrap());
                        let after = m.potential_response(&pinned, rest, ctx).unwrap();
                        for y in rest.iter() {
                            assert_eq!(
                                after.get(y),
                                base.get(y),
                                "{label}: holding {} at its response under do({}) \
                                 moved {} at context {ctx}",
                                sig.name(w),
                                x.render(sig),
                                sig.name(y),
                            );
                        }
                    }
                }
            }
        }
    }

    for (name, m) in [
        ("thm11", model(THM11)),
        ("two_context", model(TWO_CONTEXT)),
        ("ex3", model(EX3)),
    ] {
        composition_holds(&m, name);
    }
    for seed in 0..100u64 {
        let n = 2 + (seed % 2) as usize;
        let m = generate_model(&uniq_params(n, 1 + (seed % 2) as usize), seed).unwrap();
        composition_holds(&m, &format!("seed {seed}"));
    }
    println!("acceptance: response composition on fixtures and 100 random models: pass");
}

/// The worked fixture models reproduce their published behavior exactly:
/// responses, verdicts, semantic graph, and classifications.
#[test]
fn fixture_models_reproduce_known_results() {
    let ex3 = model(EX3);
    let x4 = VarSet::singleton(3);
    let do_01 = Assignment::new([(0, 0), (1, 1)]);
    let do_11 = Assignment::new([(0, 1), (1, 1)]);
    assert_eq!(ex3.potential_response(&do_01, x4, "u").unwrap().get(3), Some(0));
    assert_eq!(ex3.potential_response(&do_11, x4, "u").unwrap().get(3), Some(1));

    let thm11 = model(THM11);
    let mut ev = Evaluator::new(&thm11);
    let sig = thm11.sig();
    let atom = |x: &str, y: &str, z: &[&str]| {
        relcalc::Atom::new(
            VarSet::singleton(sig.var_id(x).unwrap()),
            VarSet::singleton(sig.var_id(y).unwrap()),
            VarSet::from_iter(z.iter().map(|n| sig.var_id(n).unwrap())),
        )
        .unwrap()
    };
    assert!(!ev.satisfies_atom(&atom("X1", "X4", &[])).unwrap());
    assert!(ev.satisfies_atom(&atom("X1", "X4", &["X2"])).unwrap());
    assert!(ev.satisfies_atom(&atom("X1", "X4", &["X3"])).unwrap());
    assert!(!ev.satisfies_atom(&atom("X2", "X4", &["X1", "X3"])).unwrap());
    assert!(!ev.satisfies_atom(&atom("X1", "X3", &["X4"])).unwrap());
    assert!(!ev.satisfies_atom(&atom("X2", "X3", &["X4"])).unwrap());

    let g = thm11.semantic_graph(None).unwrap();
    assert_eq!(g.edges(), vec![(0, 1), (1, 2), (1, 3), (2, 1)]);

    assert_eq!(model(TWO_CONTEXT).classify().unwrap(), ModelClass::Recursive);
    assert_eq!(thm11.classify().unwrap(), ModelClass::UniqOnly);
    println!("acceptance: fixture responses, verdicts, graph and classes: pass");
}

/// Entailment fixtures: the worked derivation, influence reversal under
/// the strong-recursive system, and set-merging left intersection at n=4.
#[test]
fn entailment_fixtures_derive() {
    let (calc4, ex1) = ex1_gamma();
    let sig = calc4.space().sig().clone();
    let phi = relcalc::language::parse_formula("!irr(X2; X4; X1)", &sig).unwrap();
    assert!(calc4.derives(&ex1, &phi, AxiomSystem::Uniq).unwrap());

    for n in 2..=3usize {
        let calc = Calculus::new(Signature::uniform(n, &["0", "1"]).unwrap());
        let s = calc.space().sig().clone();
        for x in 0..n {
            for y in 0..n {
                if x == y {
                    continue;
                }
                let gamma = parse_formula_set_with_sig(
                    &format!("!irr({}; {}; )", s.name(x), s.name(y)),
                    &s,
                )
                .unwrap();
                let back = relcalc::language::parse_formula(
                    &format!("irr({}; {}; )", s.name(y), s.name(x)),
                    &s,
                )
                .unwrap();
                assert!(
                    calc.derives(&gamma, &back, AxiomSystem::Srec).unwrap(),
                    "reversal {x}->{y} at n={n}"
                );
            }
        }
    }

    // merging two lefts: irrelevant given the other's cover means jointly
    // irrelevant, here with a two-variable left part on each side
    for (a, b, y) in [
        ("X1", "X2,X3", "X4"),
        ("X1,X2", "X3", "X4"),
        ("X2,X3", "X4", "X1"),
    ] {
        let gamma_text = format!("irr({a}; {y}; {b})\nirr({b}; {y}; {a})");
        let gamma = parse_formula_set_with_sig(&gamma_text, &sig).unwrap();
        let joint = {
            let (mut l, mut r) = (a.to_string(), b.to_string());
            if l > r {
                std::mem::swap(&mut l, &mut r);
            }
            relcalc::language::parse_formula(&format!("irr({l},{r}; {y}; )"), &sig).unwrap()
        };
        assert!(
            calc4.derives(&gamma, &joint, AxiomSystem::Uniq).unwrap(),
            "merge {a}+{b} over {y}"
        );
    }
    println!("acceptance: derivation fixtures (worked set, reversal, left merging): pass");
}

/// The semantic graph read off the equations agrees edge-for-edge with
/// the syntactic graph of the model's own theory.
#[test]
fn graph_oracle_agreement() {
    fn check(m: &CausalModel, label: &str) {
        let th = theory_literals(m).unwrap();
        let syntactic = theory_extension(&th).syntactic_graph();
        let semantic = m.semantic_graph(None).unwrap();
        assert_eq!(semantic, syntactic, "{label}");
    }
    check(&model(THM11), "thm11");
    check(&model(TWO_CONTEXT), "two_context");
    check(&model(CHAIN3), "chain3");
    check(&model(EX3), "ex3");
    for seed in 0..100u64 {
        let n = 2 + (seed % 2) as usize;
        let m = generate_model(&uniq_params(n, 1 + (seed % 2) as usize), seed).unwrap();
        check(&m, &format!("seed {seed}"));
    }
    println!("acceptance: semantic/syntactic graph agreement on fixtures and 100 models: pass");
}

/// Witness construction round-trips: for a corpus of consistent literal
/// sets at n = 4, the constructed model satisfies every input formula
/// under brute-force semantics.
#[test]
fn witness_models_satisfy_their_inputs() {
    let mut srec_corpus: Vec<(String, Calculus, Vec<Formula>)> = Vec::new();
    let (calc, ex1) = ex1_gamma();
    srec_corpus.push(("ex1".into(), calc, ex1));
    for seed in 100..112u64 {
        let params = GenParams {
            n: 4,
            contexts: 1 + (seed % 2) as usize,
            ..GenParams::new(ModelKind::StrongRecursive)
        };
        let m = generate_model(&params, seed).unwrap();
        let th = theory_literals(&m).unwrap();
        srec_corpus.push((
            format!("full theory seed {seed}"),
            Calculus::new(m.sig().clone()),
            theory_formulas(&th),
        ));
    }
    for seed in 200..207u64 {
        let params = GenParams { n: 4, ..GenParams::new(ModelKind::StrongRecursive) };
        let m = generate_model(&params, seed).unwrap();
        let th = theory_literals(&m).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let subset: Vec<Formula> = th
            .literals()
            .filter(|_| rng.gen_bool(0.5))
            .map(Literal::to_formula)
            .collect();
        srec_corpus.push((
            format!("partial theory seed {seed}"),
            Calculus::new(m.sig().clone()),
            subset,
        ));
    }
    assert!(srec_corpus.len() >= 20);
    for (label, calc, gamma) in &srec_corpus {
        let w = witness_model(calc, gamma, AxiomSystem::Srec).unwrap();
        let mut ev = Evaluator::new(&w);
        for f in gamma {
            assert!(ev.satisfies(f).unwrap(), "srec witness violates {label}");
        }
    }

    let mut rec_count = 0;
    for seed in 300..305u64 {
        let params =
            GenParams { n: 4, contexts: 2, ..GenParams::new(ModelKind::Recursive) };
        let m = generate_model(&params, seed).unwrap();
        let th = theory_literals(&m).unwrap();
        let calc = Calculus::new(m.sig().clone());
        let gamma = theory_formulas(&th);
        let w = witness_model(&calc, &gamma, AxiomSystem::Rec).unwrap();
        let mut ev = Evaluator::new(&w);
        for f in &gamma {
            assert!(ev.satisfies(f).unwrap(), "rec witness violates seed {seed}");
        }
        rec_count += 1;
    }
    assert!(rec_count >= 5);
    println!(
        "acceptance: witness round-trips ({} srec sets, {rec_count} rec sets): pass",
        srec_corpus.len()
    );
}

/// The systems genuinely separate: one fixture theory is satisfiable only
/// without structure, and at two variables no strong-recursive extension
/// holds both atoms false at once.
#[test]
fn system_separation_fixtures() {
    let thm11 = model(THM11);
    let th = theory_literals(&thm11).unwrap();
    let calc = Calculus::new(thm11.sig().clone());
    let gamma = theory_formulas(&th);
    assert!(calc.consistent(&gamma, AxiomSystem::Uniq).unwrap().is_some());
    assert_eq!(recursiveness_test(&calc, &gamma).unwrap(), RecVerdict::NonRecursive);

    let two = model(TWO_CONTEXT);
    let th2 = theory_literals(&two).unwrap();
    let calc2 = Calculus::new(two.sig().clone());
    let gamma2 = theory_formulas(&th2);
    assert!(calc2.consistent(&gamma2, AxiomSystem::Rec).unwrap().is_some());
    let both_false = parse_formula_set_with_sig(
        "!irr(X1; X2; )\n!irr(X2; X1; )",
        calc2.space().sig(),
    )
    .unwrap();
    assert!(calc2.consistent(&both_false, AxiomSystem::Srec).unwrap().is_none());
    println!("acceptance: system separation fixtures: pass");
}

/// Direct sums on 50 seeded pairs: the combined theory is the conjunction
/// of the summand theories, and semantic graphs combine by union.
#[test]
fn direct_sum_laws() {
    for seed in 0..50u64 {
        let n = 2 + (seed % 2) as usize;
        let a = generate_model(&uniq_params(n, 1), seed).unwrap();
        let b = generate_model(&uniq_params(n, 1), seed + 5_000).unwrap();
        let sum = direct_sum(&[a.clone(), b.clone()]).unwrap();
        let (ta, tb, ts) = (
            theory_literals(&a).unwrap(),
            theory_literals(&b).unwrap(),
            theory_literals(&sum).unwrap(),
        );
        for idx in 0..ts.verdicts().len() {
            assert_eq!(
                ts.verdicts()[idx],
                ta.verdicts()[idx] && tb.verdicts()[idx],
                "seed {seed} atom {idx}"
            );
        }
        let union = a.semantic_graph(None).unwrap().union(&b.semantic_graph(None).unwrap());
        assert_eq!(sum.semantic_graph(None).unwrap(), union, "seed {seed}");
    }
    println!("acceptance: direct-sum theory and graph laws on 50 pairs: pass");
}

/// Identification stays sound on partial knowledge: the identified graph
/// is always a subgraph of the generating model's graph, it grows
/// monotonically with knowledge, and ranking reproduces the cost-per-edge
/// formula including its infinite branch.
#[test]
fn identification_soundness_and_ranking() {
    for seed in 0..30u64 {
        let n = 3 + (seed % 2) as usize;
        let params = GenParams {
            n,
            contexts: 1 + (seed % 2) as usize,
            ..GenParams::new(ModelKind::StrongRecursive)
        };
        let m = generate_model(&params, seed).unwrap();
        let th = theory_literals(&m).unwrap();
        let calc = Calculus::new(m.sig().clone());
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xACCE55);
        let lits: Vec<Literal> = th.literals().collect();
        let small: Vec<Formula> = lits
            .iter()
            .filter(|_| rng.gen_bool(0.5))
            .map(|l| l.to_formula())
            .collect();
        let extra: Vec<Formula> = lits
            .iter()
            .filter(|_| rng.gen_bool(0.25))
            .map(|l| l.to_formula())
            .collect();
        let mut big = small.clone();
        big.extend(extra);

        let g_model = m.semantic_graph(None).unwrap();
        let g_small =
            identified_graph(&calc, &small, AxiomSystem::Srec, DEFAULT_MAX_EXTENSIONS).unwrap();
        let g_big =
            identified_graph(&calc, &big, AxiomSystem::Srec, DEFAULT_MAX_EXTENSIONS).unwrap();
        assert!(g_small.is_edge_subgraph_of(&g_model), "seed {seed}: soundness");
        assert!(g_big.is_edge_subgraph_of(&g_model), "seed {seed}: soundness grown");
        assert!(g_small.is_edge_subgraph_of(&g_big), "seed {seed}: monotonicity");

        // price the grown set against a do-nothing option and re-derive
        // the expected quotients
        let opts = vec![
            InfoOption { formulas: big.clone(), cost: num::rational::Ratio::from_integer(3) },
            InfoOption { formulas: small.clone(), cost: num::rational::Ratio::from_integer(1) },
        ];
        let ranked =
            rank_options(&calc, &small, &opts, AxiomSystem::Srec, DEFAULT_MAX_EXTENSIONS)
                .unwrap();
        let new_edges = g_big
            .edges()
            .iter()
            .filter(|&&(x, y)| !g_small.has_edge(x, y))
            .count();
        let expected_big = if new_edges == 0 {
            PonderedCost::Infinite
        } else {
            PonderedCost::Finite(num::rational::Ratio::new(3, new_edges as i64))
        };
        let costs: std::collections::HashMap<usize, PonderedCost> =
            ranked.iter().copied().collect();
        assert_eq!(costs[&0], expected_big, "seed {seed}: quotient");
        assert_eq!(costs[&1], PonderedCost::Infinite, "seed {seed}: no-gain branch");
        for pair in ranked.windows(2) {
            assert!(pair[0].1 <= pair[1].1, "seed {seed}: ordering");
        }
    }
    println!("acceptance: identification soundness, monotonicity and ranking on 30 models: pass");
}
