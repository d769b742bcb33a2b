mod common;

use asl::cli::{Command, EXIT_FAILED, EXIT_PROVEN};
use asl::parse_horn;
use asl_core::{alpha_equal, AutoOutcome, Evidence};
use common::*;

/// `genLemm12` and `goalLem3` become `genLemm#` and `goalLem#`.
fn unnumber_text(s: &str) -> String {
    let mut out = String::new();
    let mut rest = s;
    'scan: while !rest.is_empty() {
        for p in ["genLemm", "goalLem", "lem"] {
            if let Some(tail) = rest.strip_prefix(p) {
                let digits = tail.chars().take_while(char::is_ascii_digit).count();
                if digits > 0 {
                    out.push_str(p);
                    out.push('#');
                    rest = &tail[digits..];
                    continue 'scan;
                }
            }
        }
        let c = rest.chars().next().unwrap();
        out.push(c);
        rest = &rest[c.len_utf8()..];
    }
    out
}

/// (prefix, formula, evidence with the lemma's recursion as `mu`).
type Expected<'a> = &'a [(&'a str, &'a str, &'a str)];

fn assert_definitions(file: &str, expected: Expected) {
    let s = session(file);
    for (prefix, formula, evidence) in expected {
        let f = parse_horn(formula).unwrap();
        let d = definitions(&s, prefix)
            .into_iter()
            .find(|d| d.formula.is_variant_of(&f))
            .unwrap_or_else(|| panic!("{file}: no {prefix} proving {formula}"));
        assert!(
            same_modulo_numbering(&d.evidence, &ev(evidence)),
            "{file}: {} = {}, expected {evidence}",
            d.name,
            d.evidence
        );
    }
}

#[test]
fn bush_listing_is_reproduced() {
    let out = check("bush.asl");
    assert_eq!(out.code, EXIT_PROVEN);
    let golden = std::fs::read_to_string(corpus_path("../golden/bush.out")).unwrap();
    assert_eq!(unnumber_text(&out.stdout), unnumber_text(&golden));
}

#[test]
fn bush_lemma_body() {
    let s = session("bush.asl");
    let lemma = definition(&s, "genLemm");
    let own = lemma.name.as_str();
    let shown = lemma.shown_evidence();
    let expected = ev(&format!("\\ b0 . Ax0 (Ax1 b0 ({own} ({own} b0)))"));
    assert!(alpha_equal(&shown, &expected), "{shown}");
    assert_definitions(
        "bush.asl",
        &[
            ("genLemm", "Eq v => Eq (Mu HBush v)", "mu a . \\ b0 . Ax0 (Ax1 b0 (a (a b0)))"),
            ("goalLem", "Eq (Mu HBush Unit)", "genLemm Ax2"),
        ],
    );
}

#[test]
fn bush_in_source_order_agrees_up_to_axiom_names() {
    let a = session("bush.asl");
    let b = session("bush_listing.asl");
    let swap = |e: &Evidence| {
        e.map_constants(&|k| {
            Evidence::axiom(match &**k {
                "Ax0" => "Ax1",
                "Ax1" => "Ax0",
                other => other,
            })
        })
    };
    let la = definition(&a, "genLemm");
    let lb = definition(&b, "genLemm");
    assert!(la.formula.is_variant_of(&lb.formula));
    assert!(same_modulo_numbering(&swap(&la.evidence), &lb.evidence), "{} vs {}", la.evidence, lb.evidence);
    assert_eq!(check("bush_listing.asl").code, EXIT_PROVEN);
}

#[test]
fn lam_auto() {
    assert_eq!(check("lam_auto.asl").code, EXIT_PROVEN);
    assert_definitions(
        "lam_auto.asl",
        &[
            ("genLemm", "Eq v => Eq (Mu HLam v)", "mu a . \\ b . Ax0 (Ax1 b (a b) (a b) (a (Ax3 b)))"),
            ("goalLem", "Eq (Mu HLam Unit)", "genLemm Ax2"),
        ],
    );
}

#[test]
fn lam_lemma() {
    assert_eq!(check("lam_lemma.asl").code, EXIT_PROVEN);
    assert_definitions(
        "lam_lemma.asl",
        &[
            ("lem", "Eq x => Eq (Mu HLam x)", "mu a . \\ b . Ax0 (Ax1 b (a b) (a b) (a (Ax3 b)))"),
            ("lem", "Eq (Mu HLam Unit)", "lem Ax2"),
        ],
    );
}

#[test]
fn mutual_lemmas_all_prove() {
    let out = check("mutual_lemma.asl");
    assert_eq!(out.code, EXIT_PROVEN, "{}", out.stderr);
    let s = session("mutual_lemma.asl");
    assert_eq!(definitions(&s, "lem").len(), 3);
    assert_definitions(
        "mutual_lemma.asl",
        &[
            ("lem", "(Eq x, Eq (Mu H2 H1 x)) => Eq (Mu H1 H2 x)", "mu a . \\ b c . Ax2 (Ax0 b (Ax3 (a b c) c))"),
            ("lem", "Eq x => Eq (Mu H2 H1 x)", "mu a . \\ b . Ax2 (Ax1 (Ax3 (lem b (a b)) (a (lem b (a b)))))"),
            ("lem", "Eq (Mu H1 H2 Unit)", "lem Ax4 (lem Ax4)"),
        ],
    );
}

#[test]
fn mutual_auto_fails_finitely() {
    let start = std::time::Instant::now();
    let out = check("mutual_auto.asl");
    assert_eq!(out.code, EXIT_FAILED);
    assert!(start.elapsed().as_secs_f64() < 2.0);
    assert!(out.stderr.contains("cannot prove `Eq (Mu H1 H2 Unit)`"), "{}", out.stderr);
}

#[test]
fn dz_candidate_is_unprovable() {
    let out = check("dz.asl");
    assert_eq!(out.code, EXIT_FAILED);
    let s = session("dz.asl");
    match &s.goals[0].report.outcome {
        AutoOutcome::LemmaUnprovable { candidate, .. } => assert_eq!(candidate.formula.to_string(), "D Z var_1"),
        other => panic!("unexpected outcome {}", other.tag()),
    }
    assert!(out.stdout.contains("LemmaUnprovable"));
}

#[test]
fn remaining_corpus() {
    assert_definitions("pair.asl", &[("goalLem", "Eq (Int, Int)", "Ax1 Ax0 Ax0")]);
    assert_definitions(
        "hptree.asl",
        &[
            ("genLemm", "Eq v => Eq (Mu HPTree v)", "mu a . \\ b . Ax2 (Ax3 b (a (Ax1 b b)))"),
            ("goalLem", "Eq (Mu HPTree Int)", "genLemm Ax0"),
        ],
    );
    assert_definitions("ab.asl", &[("goalLem", "A x", "mu a . Ax0 (Ax1 a)")]);
    assert_definitions(
        "evenodd.asl",
        &[("genLemm", "Eq (OddList Int)", "mu a . Ax1 Ax0 (Ax2 Ax0 a)"), ("goalLem", "Eq (OddList Int)", "genLemm")],
    );
    assert_definitions(
        "q.asl",
        &[("lem", "Q x => Q (S x)", "mu a . \\ b . Ax0 (a (Ax1 b)) b"), ("goalLem", "Q (S Z)", "lem Ax2")],
    );
}

#[test]
fn pair_trace_subcommand() {
    let out = run_with("pair.asl", Command::Trace { goal: "Eq (Int, Int)".into(), steps: 10 }, |_| {});
    assert_eq!(out.code, EXIT_PROVEN);
    let lines: Vec<&str> = out.stdout.lines().filter(|l| !l.trim().is_empty()).collect();
    let last = lines.last().unwrap();
    assert!(last.ends_with("Ax1 Ax0 Ax0"), "{}", out.stdout);
    assert!(last.trim_start().starts_with('3'), "{}", out.stdout);
}
