#![allow(dead_code)]

use std::path::PathBuf;

use asl::cli::{process, Command, Definition, RunConfig, RunOutput, Session};
use asl::{parse_evidence, parse_module};
use asl_core::{alpha_equal, AxiomEnv, Evidence, ProofConfig};

pub fn corpus_path(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus").join(file)
}

pub fn corpus_files() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(corpus_path(""))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "asl"))
        .collect();
    v.sort();
    v
}

pub fn source(file: &str) -> String {
    std::fs::read_to_string(corpus_path(file)).unwrap()
}

pub fn session(file: &str) -> Session {
    process(parse_module(&source(file)).unwrap(), &ProofConfig::default())
}

/// Axioms only, named `Ax0, Ax1, ...` in declaration order.
pub fn axioms(file: &str) -> AxiomEnv {
    let m = parse_module(&source(file)).unwrap();
    let mut env = AxiomEnv::new();
    for (n, d) in m.axioms() {
        env.push_axiom(n, d.formula.clone()).unwrap();
    }
    env
}

pub fn ev(s: &str) -> Evidence {
    parse_evidence(s).unwrap()
}

fn strip_number(n: &str) -> Option<&str> {
    ["genLemm", "goalLem", "lem"]
        .into_iter()
        .find(|p| n.strip_prefix(p).is_some_and(|rest| !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit())))
}

/// Lemma references with their numeric suffix removed.
pub fn unnumbered(e: &Evidence) -> Evidence {
    e.map_constants(&|k| Evidence::axiom(strip_number(k).unwrap_or(k)))
}

pub fn same_modulo_numbering(a: &Evidence, b: &Evidence) -> bool {
    alpha_equal(&unnumbered(a), &unnumbered(b))
}

pub fn definition<'a>(s: &'a Session, name: &str) -> &'a Definition {
    s.definitions
        .iter()
        .find(|d| d.name == name || strip_number(&d.name) == Some(name))
        .unwrap_or_else(|| panic!("no definition {name}"))
}

pub fn definitions<'a>(s: &'a Session, prefix: &str) -> Vec<&'a Definition> {
    s.definitions.iter().filter(|d| strip_number(&d.name) == Some(prefix)).collect()
}

pub fn run_with(file: &str, command: Command, adjust: impl FnOnce(&mut RunConfig)) -> RunOutput {
    let mut cfg = RunConfig::new(corpus_path(file));
    cfg.command = command;
    adjust(&mut cfg);
    asl::run(&cfg)
}

pub fn check(file: &str) -> RunOutput {
    run_with(file, Command::Check, |_| {})
}
