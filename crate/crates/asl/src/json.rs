//! Machine-readable mirror of the text reports.

use asl_core::evidence::{ObsVerdict, ObservationRecord};
use asl_core::{AutoOutcome, MixedTerm};
use serde::Serialize;

use crate::cli::{ObsCheck, Session};
use crate::parser::ParseError;

#[derive(Serialize)]
struct Definition {
    name: String,
    kind: &'static str,
    formula: String,
    evidence: String,
}

#[derive(Serialize)]
struct Entry {
    name: String,
    formula: String,
}

#[derive(Serialize)]
struct Goal {
    name: String,
    keyword: &'static str,
    formula: String,
    outcome: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    evidence: Option<String>,
    new_lemmas: Vec<Definition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    candidate: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
    rounds: usize,
    steps: usize,
}

#[derive(Serialize)]
struct Report {
    module: Option<String>,
    type_check: bool,
    definitions: Vec<Definition>,
    goals: Vec<Goal>,
    axioms: Vec<Entry>,
    lemmas: Vec<Entry>,
    warnings: Vec<String>,
    type_errors: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    observation_checks: Vec<Obs>,
}

#[derive(Serialize)]
struct Point {
    m: usize,
    observational: Option<String>,
    corecursive: Option<String>,
}

#[derive(Serialize)]
struct Obs {
    label: String,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    formula: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    evidence: Option<String>,
    equivalent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    diverges_at: Option<usize>,
    points: Vec<Point>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

fn to_string<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

fn entry(name: &str, f: &impl ToString) -> Entry {
    Entry { name: name.to_string(), formula: f.to_string() }
}

pub(crate) fn session(s: &Session, obs: &[ObsCheck]) -> String {
    let definitions = s
        .definitions
        .iter()
        .map(|d| Definition {
            name: d.name.clone(),
            kind: d.kind.tag(),
            formula: d.formula.to_string(),
            evidence: d.shown_evidence().to_string(),
        })
        .collect();
    let goals = s
        .goals
        .iter()
        .map(|g| {
            let o = &g.report.outcome;
            let (candidate, reason) = match o {
                AutoOutcome::LemmaUnprovable { candidate, error, .. } => {
                    (Some(candidate.formula.to_string()), Some(error.to_string()))
                }
                AutoOutcome::Stuck(a) => (None, Some(format!("no clause matches {a}"))),
                AutoOutcome::Inconclusive(why) => (None, Some(why.clone())),
                _ => (None, None),
            };
            let new_lemmas = o
                .new_lemmas()
                .iter()
                .filter(|_| g.report.proven())
                .map(|l| Definition {
                    name: l.name.to_string(),
                    kind: "generated",
                    formula: l.formula.to_string(),
                    evidence: l.evidence.named_recursion(&l.name).to_string(),
                })
                .collect();
            Goal {
                name: g.name.clone(),
                keyword: g.keyword.keyword(),
                formula: g.report.goal.to_string(),
                outcome: o.tag(),
                evidence: o.evidence().map(|e| e.to_string()),
                new_lemmas,
                candidate,
                reason,
                rounds: g.report.rounds.len(),
                steps: g.report.steps,
            }
        })
        .collect();
    let listing = |axioms: bool| -> Vec<Entry> {
        s.definitions
            .iter()
            .rev()
            .filter(|d| (d.kind == crate::cli::DefKind::Axiom) == axioms)
            .map(|d| entry(&d.name, &d.formula))
            .collect()
    };
    to_string(&Report {
        module: s.module.name.clone(),
        type_check: s.type_errors.is_empty(),
        definitions,
        goals,
        axioms: listing(true),
        lemmas: listing(false),
        warnings: s.warnings.clone(),
        type_errors: s.type_errors.clone(),
        observation_checks: obs.iter().map(obs_entry).collect(),
    })
}

fn points(v: &ObsVerdict, n: usize) -> Vec<Point> {
    let text = |r: Option<&ObservationRecord>| r.map(|r| r.context.to_string());
    (1..=n)
        .map(|m| Point {
            m,
            observational: text(v.observational.get(m - 1)),
            corecursive: text(v.corecursive.get(m - 1)),
        })
        .collect()
}

fn obs_entry(o: &ObsCheck) -> Obs {
    Obs {
        label: o.label.clone(),
        n: o.n,
        formula: o.formula.as_ref().map(|f| f.to_string()),
        evidence: o.evidence.as_ref().map(|e| e.to_string()),
        equivalent: o.verdict.as_ref().is_some_and(ObsVerdict::equivalent),
        diverges_at: o.verdict.as_ref().and_then(|v| v.divergence.as_ref()).map(|d| d.index),
        points: o.verdict.as_ref().map(|v| points(v, o.n)).unwrap_or_default(),
        note: o.note.clone(),
    }
}

pub(crate) fn obs(checks: &[ObsCheck]) -> String {
    to_string(&checks.iter().map(obs_entry).collect::<Vec<_>>())
}

#[derive(Serialize)]
struct Trace {
    goal: String,
    proven: bool,
    steps: usize,
    states: Vec<String>,
}

pub(crate) fn trace(goal: &asl_core::Atom, states: &[MixedTerm], proven: bool) -> String {
    to_string(&Trace {
        goal: goal.to_string(),
        proven,
        steps: states.len() - 1,
        states: states.iter().map(|s| s.to_string()).collect(),
    })
}

#[derive(Serialize)]
struct Failure {
    error: &'static str,
    line: usize,
    col: usize,
    message: String,
}

pub(crate) fn parse_error(e: &ParseError) -> String {
    let (kind, line, col) = match e {
        ParseError::Syntax { line, col, .. } => ("syntax", *line, *col),
        ParseError::Scope { line, col, .. } => ("scope", *line, *col),
        ParseError::Arity { line, col, .. } => ("arity", *line, *col),
    };
    to_string(&Failure { error: kind, line, col, message: e.to_string() })
}
