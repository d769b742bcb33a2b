//! Generators and property bodies shared by the property suites.
#![allow(dead_code)]

use std::collections::BTreeMap;

use asl_core::resolve::Fuel;
use asl_core::syntax::Fresh;
use asl_core::{
    anti_unify, match_atom, resolve, trace, type_check, whnf, Atom, AxiomEnv, ClausePolicy, Evidence, HornFormula,
    MixedTerm, Substitution, Term, TypingContext,
};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub const CONSTRUCTORS: [(&str, usize); 4] = [("Z", 0), ("L", 0), ("S", 1), ("N", 2)];
pub const VARS: [&str; 3] = ["x", "y", "z"];

fn grow(leaf: BoxedStrategy<Term>) -> impl Strategy<Value = Term> {
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::app(Term::cons("S"), t)),
            (inner.clone(), inner).prop_map(|(a, b)| Term::apps(Term::cons("N"), [a, b])),
        ]
    })
}

pub fn ground_term() -> impl Strategy<Value = Term> {
    grow(prop_oneof![Just(Term::cons("Z")), Just(Term::cons("L"))].boxed())
}

pub fn open_term() -> impl Strategy<Value = Term> {
    let var = prop::sample::select(VARS.to_vec()).prop_map(Term::var);
    grow(prop_oneof![Just(Term::cons("Z")), Just(Term::cons("L")), var].boxed())
}

pub fn atom_of(term: impl Strategy<Value = Term>) -> impl Strategy<Value = Atom> {
    prop::collection::vec(term, 1..3).prop_map(|args| Atom::new("P", args))
}

fn subst_of(ts: Vec<Term>, skip: usize) -> Substitution {
    let mut s = Substitution::new();
    for (x, t) in VARS.iter().zip(ts).skip(skip) {
        s.insert((*x).into(), t);
    }
    s
}

pub fn ground_subst() -> impl Strategy<Value = Substitution> {
    prop::collection::vec(ground_term(), VARS.len()).prop_map(|ts| subst_of(ts, 0))
}

/// Leaves `x` unbound.
pub fn open_subst() -> impl Strategy<Value = Substitution> {
    prop::collection::vec(open_term(), VARS.len()).prop_map(|ts| subst_of(ts, 1))
}

/// Pair of atoms with the same predicate and arity.
pub fn atom_pair() -> impl Strategy<Value = (Atom, Atom)> {
    (1..3usize).prop_flat_map(|n| {
        let side = || prop::collection::vec(open_term(), n).prop_map(|args| Atom::new("P", args));
        (side(), side())
    })
}

pub fn anti_unification_laws(a: &Atom, b: &Atom) -> Result<(), TestCaseError> {
    prop_assert_eq!(&anti_unify(a, a, &mut Fresh::new()).unwrap(), a);

    let g = anti_unify(a, b, &mut Fresh::new()).unwrap();
    let left = match_atom(&g, a).expect("generalises the left atom");
    let right = match_atom(&g, b).expect("generalises the right atom");
    prop_assert_eq!(&left.apply(&g), a);
    prop_assert_eq!(&right.apply(&g), b);

    // Distinct generalisation variables stand for distinct mismatch pairs.
    let mut seen: BTreeMap<(Term, Term), String> = BTreeMap::new();
    for v in g.vars().iter().filter(|v| v.starts_with("var_")) {
        let pair = (left.get(v).unwrap().clone(), right.get(v).unwrap().clone());
        prop_assert_ne!(&pair.0, &pair.1);
        if let Some(prev) = seen.insert(pair, v.to_string()) {
            prop_assert!(false, "{} and {} generalise the same pair", prev, v);
        }
    }
    // Symmetric up to the names of the generalisation variables.
    let h = anti_unify(b, a, &mut Fresh::new()).unwrap();
    prop_assert!(match_atom(&g, &h).is_some() && match_atom(&h, &g).is_some());
    Ok(())
}

/// Program over unary predicates `P0..P2` where each clause peels one
/// constructor off its argument, so resolution always terminates, and at
/// most one clause exists per predicate and constructor.
#[derive(Debug, Clone)]
pub struct Program {
    pub clauses: Vec<HornFormula>,
}

fn clause(pred: usize, ctor: usize, body: Vec<(usize, usize)>) -> HornFormula {
    let (c, arity) = CONSTRUCTORS[ctor];
    let head = Atom::new(&format!("P{pred}"), [Term::apps(Term::cons(c), (0..arity).map(|i| Term::var(VARS[i])))]);
    let body = if arity == 0 {
        Vec::new()
    } else {
        body.into_iter().map(|(p, v)| Atom::new(&format!("P{p}"), [Term::var(VARS[v % arity])])).collect()
    };
    HornFormula::new(body, head)
}

pub fn program() -> impl Strategy<Value = Program> {
    let slot = prop::option::weighted(0.8, prop::collection::vec((0..3usize, 0..2usize), 0..3));
    prop::collection::vec(slot, 3 * CONSTRUCTORS.len()).prop_map(|slots| {
        let clauses = slots
            .into_iter()
            .enumerate()
            .filter_map(|(i, s)| s.map(|body| clause(i / CONSTRUCTORS.len(), i % CONSTRUCTORS.len(), body)))
            .collect();
        Program { clauses }
    })
}

pub fn resolution_case() -> impl Strategy<Value = (Program, Atom)> {
    (program(), 0..3usize, ground_term()).prop_map(|(p, pred, arg)| (p, Atom::new(&format!("P{pred}"), [arg])))
}

pub fn env_of(p: &Program) -> AxiomEnv {
    let mut env = AxiomEnv::new();
    for (i, c) in p.clauses.iter().enumerate() {
        env.push_axiom(format!("K{i}").into(), c.clone()).unwrap();
    }
    env
}

fn constants(e: &Evidence) -> usize {
    match e {
        Evidence::Axiom(_) => 1,
        Evidence::Var(_) => 0,
        Evidence::App(f, a) => constants(f) + constants(a),
        Evidence::Lam(_, b) | Evidence::Mu(_, b) => constants(b),
    }
}

fn has_atom(t: &MixedTerm) -> bool {
    match t {
        MixedTerm::Atom(_) => true,
        MixedTerm::App(f, a) => has_atom(f) || has_atom(a),
        MixedTerm::Lam(_, b) | MixedTerm::Mu(_, b) => has_atom(b),
        _ => false,
    }
}

/// Big-step evidence is the final small-step state, and each fails exactly
/// when the other does.
pub fn big_step_agrees_with_small_step(p: &Program, goal: &Atom) -> Result<(), TestCaseError> {
    let env = env_of(p);
    let big = resolve(&env, goal, &mut Fuel::new(10_000), ClausePolicy::NewestFirst);
    let states = trace(&env, goal, 10_000);
    let last = states.last().unwrap();
    match big {
        Ok(e) => {
            prop_assert_eq!(last.to_evidence(), Some(e.clone()));
            prop_assert_eq!(states.len() - 1, constants(&e));
            let ctx = TypingContext::from_env(&env);
            prop_assert!(type_check(&ctx, &e, &HornFormula::fact(goal.clone())).is_ok());
            prop_assert!(whnf(&e, &mut Fuel::new(10_000)).is_ok());
        }
        Err(err) => {
            prop_assert!(has_atom(last), "resolve failed with {} but the trace finished at {}", err, last);
            prop_assert!(states.len() < 10_001);
        }
    }
    if last.to_evidence().is_some() {
        prop_assert!(resolve(&env, goal, &mut Fuel::new(10_000), ClausePolicy::NewestFirst).is_ok());
    }
    Ok(())
}
