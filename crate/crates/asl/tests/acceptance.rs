//! One line per acceptance criterion; exits non-zero if any fails.

mod common;
#[path = "../../asl-core/tests/strategies/mod.rs"]
mod strategies;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use asl::cli::{obs_check, Command, DefKind, RunConfig, EXIT_FAILED, EXIT_PROVEN};
use asl::{parse_atom, parse_horn};
use asl_core::evidence::{check_obs_equiv, detect_simple_loop, inline_lemmas, TypingContext};
use asl_core::resolve::Fuel;
use asl_core::{alpha_equal, prove_horn, resolve, trace, type_check, whnf, AutoOutcome, ClausePolicy, ProofConfig};
use common::*;
use proptest::test_runner::{Config, TestRunner};

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn pair_baseline() -> Outcome {
    let env = axioms("pair.asl");
    let goal = parse_atom("Eq (Int, Int)").unwrap();
    let e = resolve(&env, &goal, &mut Fuel::new(100), ClausePolicy::NewestFirst).map_err(|e| e.to_string())?;
    ensure!(e == ev("Ax1 Ax0 Ax0"), "evidence {e}");
    let states = trace(&env, &goal, 100);
    ensure!(states.len() == 4, "{} rewrite steps", states.len() - 1);
    ensure!(states[3].to_evidence() == Some(e), "final state {}", states[3]);
    Ok(())
}

fn hptree_pipeline() -> Outcome {
    let s = session("hptree.asl");
    ensure!(s.succeeded(), "hptree not proven");
    let lemma = definition(&s, "genLemm");
    ensure!(lemma.formula.is_variant_of(&parse_horn("Eq v => Eq (Mu HPTree v)").unwrap()), "lemma {}", lemma.formula);
    let want = ev("mu a . \\ a1 . Ax2 (Ax3 a1 (a (Ax1 a1 a1)))");
    ensure!(alpha_equal(&lemma.evidence, &want), "lemma evidence {}", lemma.evidence);
    let goal = definition(&s, "goalLem");
    ensure!(alpha_equal(&goal.evidence, &ev(&format!("{} Ax0", lemma.name))), "goal evidence {}", goal.evidence);
    Ok(())
}

fn golden_corpus() -> Outcome {
    let bush = session("bush.asl");
    let l = definition(&bush, "genLemm");
    let own = &l.name;
    let body = ev(&format!("\\ b0 . Ax0 (Ax1 b0 ({own} ({own} b0)))"));
    ensure!(alpha_equal(&l.shown_evidence(), &body), "bush lemma {}", l.shown_evidence());
    ensure!(l.formula.is_variant_of(&parse_horn("Eq v => Eq (Mu HBush v)").unwrap()), "bush lemma {}", l.formula);
    ensure!(same_modulo_numbering(&definition(&bush, "goalLem").evidence, &ev("genLemm Ax2")), "bush goal");

    let lam_body = ev("mu a . \\ b . Ax0 (Ax1 b (a b) (a b) (a (Ax3 b)))");
    let lam = session("lam_auto.asl");
    ensure!(lam.succeeded(), "lam auto not proven");
    ensure!(alpha_equal(&definition(&lam, "genLemm").evidence, &lam_body), "lam auto lemma");
    let lam = session("lam_lemma.asl");
    ensure!(lam.succeeded(), "lam lemma not proven");
    ensure!(alpha_equal(&definitions(&lam, "lem")[0].evidence, &lam_body), "lam lemma evidence");

    let mutual = check("mutual_lemma.asl");
    ensure!(mutual.code == EXIT_PROVEN, "mutual lemma exit {}", mutual.code);
    ensure!(definitions(&session("mutual_lemma.asl"), "lem").len() == 3, "mutual lemma count");
    let start = Instant::now();
    let auto = check("mutual_auto.asl");
    ensure!(auto.code == EXIT_FAILED, "mutual auto exit {}", auto.code);
    ensure!(start.elapsed() < Duration::from_secs(2), "mutual auto took {:?}", start.elapsed());

    let dz = session("dz.asl");
    let tag = dz.goals[0].report.outcome.tag();
    ensure!(tag == "LemmaUnprovable", "dz outcome {tag}");
    ensure!(check("dz.asl").code == EXIT_FAILED, "dz exit code");
    Ok(())
}

fn cycles() -> Outcome {
    let ab = session("ab.asl");
    let e = &definition(&ab, "goalLem").evidence;
    ensure!(alpha_equal(e, &ev("mu a . Ax0 (Ax1 a)")), "ab evidence {e}");
    ensure!(matches!(ab.goals[0].report.outcome, AutoOutcome::DirectlyProven(_)), "ab took another path");
    let eo = session("evenodd.asl");
    let l = definition(&eo, "genLemm");
    ensure!(l.formula.to_string() == "Eq (OddList Int)", "evenodd lemma {}", l.formula);
    ensure!(alpha_equal(&l.evidence, &ev("mu a . Ax1 Ax0 (Ax2 Ax0 a)")), "evenodd evidence {}", l.evidence);
    Ok(())
}

fn q_lemma() -> Outcome {
    let mut env = axioms("q.asl");
    let f = parse_horn("Q x => Q (S x)").unwrap();
    let e = prove_horn(&env, &f, &ProofConfig::default()).map_err(|e| e.to_string())?;
    ensure!(alpha_equal(&e, &ev("mu a . \\ a1 . Ax0 (a (Ax1 a1)) a1")), "lemma evidence {e}");
    env.push_lemma("L".into(), f, e).unwrap();
    let g = resolve(&env, &parse_atom("Q (S Z)").unwrap(), &mut Fuel::new(100), ClausePolicy::NewestFirst)
        .map_err(|e| e.to_string())?;
    ensure!(g == ev("L Ax2"), "goal evidence {g}");
    Ok(())
}

fn theorem_one() -> Outcome {
    let mut runner = TestRunner::new(Config { cases: 250, failure_persistence: None, ..Config::default() });
    runner
        .run(&strategies::resolution_case(), |(p, goal)| strategies::big_step_agrees_with_small_step(&p, &goal))
        .map_err(|e| e.to_string())
}

fn soundness_and_normalisation() -> Outcome {
    for path in corpus_files() {
        let file = path.file_name().unwrap().to_str().unwrap();
        let s = session(file);
        ensure!(s.type_errors.is_empty(), "{file}: {:?}", s.type_errors);
        let ctx = TypingContext::from_env(&s.env);
        for d in s.definitions.iter().filter(|d| d.kind != DefKind::Axiom) {
            ensure!(type_check(&ctx, &d.evidence, &d.formula).is_ok(), "{file}: {} ill-typed", d.name);
            let closed = inline_lemmas(&s.env, &d.evidence);
            ensure!(whnf(&closed, &mut Fuel::new(10_000)).is_ok(), "{file}: {} does not normalise", d.name);
        }
    }
    Ok(())
}

fn observational_equivalence() -> Outcome {
    let cfg = ProofConfig::default();
    for (file, goal) in [("hptree.asl", "Eq (Mu HPTree x)"), ("ab.asl", "A x")] {
        let o = obs_check(&axioms(file), file, &parse_atom(goal).unwrap(), 5, &cfg);
        let v = o.verdict.ok_or_else(|| format!("{file}: {}", o.note.unwrap_or_default()))?;
        ensure!(v.equivalent(), "{file}: {:?}", v.divergence.map(|d| d.reason));
    }
    let env = axioms("hptree.asl");
    let lp = detect_simple_loop(&env, &parse_atom("Eq (Mu HPTree x)").unwrap(), 10_000).ok_or("no hptree loop")?;
    let bad = ev("\\ d . (mu a . \\ b . Ax2 (Ax3 b (a (Ax1 b Ax0)))) d");
    let at = check_obs_equiv(&env, &lp, &bad, 5, 10_000).divergence.map(|d| d.index);
    ensure!(at == Some(1), "mutated evidence diverges at {at:?}");
    Ok(())
}

fn anti_unification() -> Outcome {
    let mut runner = TestRunner::new(Config { cases: 500, failure_persistence: None, ..Config::default() });
    runner.run(&strategies::atom_pair(), |(a, b)| strategies::anti_unification_laws(&a, &b)).map_err(|e| e.to_string())
}

fn totality_watchdog() -> Outcome {
    for path in corpus_files() {
        let start = Instant::now();
        let mut cfg = RunConfig::new(&path);
        cfg.proof.fuel = 20;
        cfg.command = Command::Check;
        let out = asl::run(&cfg);
        let took = start.elapsed();
        ensure!(took < Duration::from_secs(1), "{} took {took:?}", path.display());
        ensure!(out.code == EXIT_PROVEN || out.code == EXIT_FAILED, "{} exit {}", path.display(), out.code);
        ensure!(out.stdout.contains("\nLemmas\n"), "{} has no report", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("pair baseline", pair_baseline),
        ("hptree pipeline", hptree_pipeline),
        ("golden corpus", golden_corpus),
        ("cycle subsumption", cycles),
        ("Q lemma", q_lemma),
        ("big-step equals small-step", theorem_one),
        ("soundness and normalisation", soundness_and_normalisation),
        ("observational equivalence", observational_equivalence),
        ("anti-unification laws", anti_unification),
        ("totality watchdog", totality_watchdog),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(()) => println!("criterion {:>2} {name}: PASS", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
