//! The batch driver: processes a module's declarations in order and renders
//! the report.

use std::fmt::Write as _;
use std::path::PathBuf;

use asl_core::corec::{NewLemma, Round};
use asl_core::evidence::{check_obs_equiv, detect_simple_loop, ObsVerdict, ObservationRecord, SimpleLoop};
use asl_core::loopdetect::{find_critical_triples, paterson_holds};
use asl_core::resolve::{trace, NodeLabel, NodeStatus, ResolutionTree};
use asl_core::{
    auto, prove_horn, wf_check, AutoOutcome, AutoReport, AxiomEnv, Evidence, HornFormula, LemmaNamer, MixedTerm,
    ProofConfig, ProofError,
};

use crate::json;
use crate::parser::{parse_atom, parse_module, DeclKind, ParseError, SourceModule};

pub const EXIT_PROVEN: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

pub const DEFAULT_TRACE_STEPS: usize = 20;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Command {
    Check,
    Trace { goal: String, steps: usize },
    Obs { goal: String, n: usize },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RunConfig {
    pub input: PathBuf,
    pub command: Command,
    pub proof: ProofConfig,
    pub trace: bool,
    pub trace_steps: usize,
    pub explain: bool,
    pub obs_check: Option<usize>,
    pub json: bool,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>) -> RunConfig {
        RunConfig {
            input: input.into(),
            command: Command::Check,
            proof: ProofConfig::default(),
            trace: false,
            trace_steps: DEFAULT_TRACE_STEPS,
            explain: false,
            obs_check: None,
            json: false,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct RunOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run(cfg: &RunConfig) -> RunOutput {
    let src = match std::fs::read_to_string(&cfg.input) {
        Ok(s) => s,
        Err(e) => {
            return RunOutput {
                code: EXIT_INPUT,
                stdout: String::new(),
                stderr: format!("error: cannot read {}: {e}\n", cfg.input.display()),
            }
        }
    };
    match &cfg.command {
        Command::Check => check_source(&src, cfg),
        Command::Trace { goal, steps } => trace_source(&src, goal, *steps, cfg),
        Command::Obs { goal, n } => obs_source(&src, goal, *n, cfg),
    }
}

/// How a definition entered the program.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DefKind {
    Axiom,
    Lemma,
    Generated,
    Goal,
}

impl DefKind {
    pub fn tag(self) -> &'static str {
        match self {
            DefKind::Axiom => "axiom",
            DefKind::Lemma => "lemma",
            DefKind::Generated => "generated",
            DefKind::Goal => "goal",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Definition {
    pub name: String,
    pub kind: DefKind,
    pub formula: HornFormula,
    /// As stored, with μ binders intact.
    pub evidence: Evidence,
}

impl Definition {
    /// Evidence as printed: a lemma's own μ binder is written as its name.
    pub fn shown_evidence(&self) -> Evidence {
        self.evidence.named_recursion(&self.name)
    }
}

#[derive(Clone, Debug)]
pub struct GoalResult {
    pub decl: usize,
    pub keyword: DeclKind,
    pub name: String,
    pub report: AutoReport,
    /// Environment the goal was attempted in.
    pub env: AxiomEnv,
}

/// Everything produced by processing a module.
#[derive(Clone, Debug)]
pub struct Session {
    pub module: SourceModule,
    pub env: AxiomEnv,
    pub axioms_only: AxiomEnv,
    pub definitions: Vec<Definition>,
    pub goals: Vec<GoalResult>,
    pub warnings: Vec<String>,
    pub type_errors: Vec<String>,
}

impl Session {
    pub fn failures(&self) -> impl Iterator<Item = &GoalResult> {
        self.goals.iter().filter(|g| !g.report.proven())
    }

    pub fn succeeded(&self) -> bool {
        self.failures().next().is_none() && self.type_errors.is_empty()
    }
}

fn input_error(e: &ParseError, cfg: &RunConfig) -> RunOutput {
    let stdout = if cfg.json { json::parse_error(e) } else { String::new() };
    RunOutput { code: EXIT_INPUT, stdout, stderr: format!("{}:{e}\n", cfg.input.display()) }
}

fn lemma_report(env: &AxiomEnv, goal: &HornFormula, cfg: &ProofConfig) -> AutoReport {
    let outcome = match prove_horn(env, goal, cfg) {
        Ok(e) => AutoOutcome::DirectlyProven(e),
        Err(ProofError::Stuck(a)) => AutoOutcome::Stuck(a),
        Err(e) => AutoOutcome::Inconclusive(e.to_string()),
    };
    AutoReport { goal: goal.clone(), outcome, rounds: Vec::new(), steps: 0 }
}

/// Loads the axioms, then proves `lemma` and `auto` declarations in order,
/// each in the environment left by the ones before.
pub fn process(module: SourceModule, cfg: &ProofConfig) -> Session {
    let mut env = AxiomEnv::new();
    let mut definitions = Vec::new();
    let mut warnings = module.warnings();
    for (name, d) in module.axioms() {
        env.push_axiom(name.clone(), d.formula.clone()).expect("axiom names are unique and parsed formulas scoped");
    }
    for (a, b) in env.overlapping_heads() {
        warnings.push(format!("clauses {a} and {b} have overlapping heads; the newer one is tried first"));
    }
    let axioms_only = env.clone();
    let mut namer = LemmaNamer::new(module.decls.len());
    let mut goals = Vec::new();
    let mut axiom_names = module.axioms().map(|(n, _)| n).collect::<Vec<_>>().into_iter();
    for (i, d) in module.decls.iter().enumerate() {
        let (report, name, kind) = match d.kind {
            DeclKind::Axiom => {
                let name = axiom_names.next().expect("one name per axiom");
                let evidence = Evidence::Axiom(name.clone());
                definitions.push(Definition {
                    name: name.to_string(),
                    kind: DefKind::Axiom,
                    formula: d.formula.clone(),
                    evidence,
                });
                continue;
            }
            DeclKind::Lemma => (lemma_report(&env, &d.formula, cfg), namer.lemma(i), DefKind::Lemma),
            DeclKind::Auto => (auto(&env, &d.formula, cfg, &mut namer), namer.goal(i), DefKind::Goal),
        };
        let before = env.clone();
        if let Some(e) = report.outcome.evidence() {
            for NewLemma { name, formula, evidence } in report.outcome.new_lemmas() {
                env.push_lemma(name.clone(), formula.clone(), evidence.clone()).expect("generated names are fresh");
                let def = Definition {
                    name: name.to_string(),
                    kind: DefKind::Generated,
                    formula: formula.clone(),
                    evidence: evidence.clone(),
                };
                definitions.push(def);
            }
            env.push_lemma(name.clone(), d.formula.clone(), e.clone()).expect("declaration names are unique");
            definitions.push(Definition {
                name: name.to_string(),
                kind,
                formula: d.formula.clone(),
                evidence: e.clone(),
            });
        }
        goals.push(GoalResult { decl: i, keyword: d.kind, name: name.to_string(), report, env: before });
    }
    let type_errors = match wf_check(&env) {
        Ok(()) => Vec::new(),
        Err(fs) => fs.into_iter().map(|f| format!("{}: {}", f.name, f.error)).collect(),
    };
    Session { module, env, axioms_only, definitions, goals, warnings, type_errors }
}

pub fn check_source(src: &str, cfg: &RunConfig) -> RunOutput {
    let module = match parse_module(src) {
        Ok(m) => m,
        Err(e) => return input_error(&e, cfg),
    };
    let session = process(module, &cfg.proof);
    let obs = match cfg.obs_check {
        Some(n) => obs_checks(&session, n, &cfg.proof),
        None => Vec::new(),
    };
    let obs_ok = obs.iter().all(|o| o.verdict.as_ref().is_none_or(ObsVerdict::equivalent));
    let code = if session.succeeded() && obs_ok { EXIT_PROVEN } else { EXIT_FAILED };
    let mut stderr = String::new();
    for w in &session.warnings {
        let _ = writeln!(stderr, "{}: warning: {w}", cfg.input.display());
    }
    for g in session.failures() {
        let _ = writeln!(stderr, "{}: error: {}", cfg.input.display(), failure_line(g));
    }
    for t in &session.type_errors {
        let _ = writeln!(stderr, "{}: error: ill-typed evidence for {t}", cfg.input.display());
    }
    let stdout = if cfg.json { json::session(&session, &obs) } else { render_session(&session, cfg, &obs) };
    RunOutput { code, stdout, stderr }
}

fn failure_line(g: &GoalResult) -> String {
    let goal = &g.report.goal;
    match &g.report.outcome {
        AutoOutcome::LemmaUnprovable { candidate, error, .. } => {
            format!("cannot prove `{goal}`: candidate lemma `{}` is not provable ({error})", candidate.formula)
        }
        AutoOutcome::NoLoopFound => format!("cannot prove `{goal}`: resolution diverges and no loop was found"),
        AutoOutcome::Stuck(a) => format!("cannot prove `{goal}`: no clause matches `{a}`"),
        AutoOutcome::Inconclusive(why) => format!("cannot prove `{goal}`: {why}"),
        AutoOutcome::Proven { .. } | AutoOutcome::DirectlyProven(_) => unreachable!("not a failure"),
    }
}

pub fn render_session(s: &Session, cfg: &RunConfig, obs: &[ObsCheck]) -> String {
    let mut out = String::new();
    out.push_str("Parsing success! \n");
    if s.type_errors.is_empty() {
        out.push_str("Type Checking success! \n");
    } else {
        out.push_str("Type Checking failure! \n");
    }
    out.push_str("Program Definitions\n");
    for d in &s.definitions {
        let _ = writeln!(out, "  {} :: {}", d.name, d.formula);
        let _ = writeln!(out, "  = {} ", d.shown_evidence());
    }
    out.push_str("Axioms\n");
    for d in s.definitions.iter().rev().filter(|d| d.kind == DefKind::Axiom) {
        let _ = writeln!(out, "  {} :: {}", d.name, d.formula);
    }
    out.push_str("Lemmas\n");
    for d in s.definitions.iter().rev().filter(|d| d.kind != DefKind::Axiom) {
        let _ = writeln!(out, "  {} :: {}", d.name, d.formula);
    }
    let failures: Vec<&GoalResult> = s.failures().collect();
    if !failures.is_empty() {
        out.push_str("Failures\n");
        for g in failures {
            render_failure(&mut out, g);
        }
    }
    if cfg.trace {
        render_traces(&mut out, s, cfg.trace_steps);
    }
    if cfg.explain {
        for g in &s.goals {
            render_explanation(&mut out, g);
        }
    }
    for o in obs {
        render_obs_check(&mut out, o);
    }
    out
}

fn render_failure(out: &mut String, g: &GoalResult) {
    let r = &g.report;
    let _ = writeln!(out, "  {} :: {}", g.name, r.goal);
    let _ = writeln!(out, "  outcome: {}", r.outcome.tag());
    match &r.outcome {
        AutoOutcome::LemmaUnprovable { candidate, error, .. } => {
            let _ = writeln!(out, "  candidate: {}", candidate.formula);
            let _ = writeln!(out, "  reason: {error}");
        }
        AutoOutcome::Stuck(a) => {
            let _ = writeln!(out, "  reason: no clause matches {a}");
        }
        AutoOutcome::Inconclusive(why) => {
            let _ = writeln!(out, "  reason: {why}");
        }
        _ => {}
    }
    let _ = writeln!(out, "  rounds: {}, resolution steps: {}", r.rounds.len(), r.steps);
}

fn render_traces(out: &mut String, s: &Session, steps: usize) {
    for g in &s.goals {
        let goal = &g.report.goal;
        if !goal.body.is_empty() || !goal.head.is_ground() {
            continue;
        }
        let _ = writeln!(out, "Trace {} :: {}", g.name, goal);
        for (k, state) in trace(&g.env, &goal.head, steps).iter().enumerate() {
            let _ = writeln!(out, "  {k:>3}  {state}");
        }
    }
}

/// Nodes listed by `--explain` for a full resolution tree, when no closed
/// subtree bounds the interesting part.
pub const EXPLAIN_NODE_LIMIT: usize = 64;

/// One node per line: position, goal, edge label and status. Nodes deeper
/// than `max_depth` are skipped.
pub fn render_tree(out: &mut String, tree: &ResolutionTree, indent: &str, max_depth: usize, max_nodes: usize) {
    let shown: Vec<_> = tree.iter().filter(|(p, _)| p.depth() <= max_depth).collect();
    for (p, node) in shown.iter().take(max_nodes) {
        let label = match &node.label {
            NodeLabel::Goal(a) => a.to_string(),
            NodeLabel::Success => "[]".to_string(),
        };
        let edge = node.edge.as_ref().map(|e| format!("  <- {e}")).unwrap_or_default();
        let status = match node.status {
            NodeStatus::Expanded | NodeStatus::Success => "",
            NodeStatus::Stuck => "  (stuck)",
            NodeStatus::Unexpanded => "  (unexpanded)",
            NodeStatus::Critical => "  (critical)",
        };
        let _ = writeln!(out, "{indent}{:<12} {label}{edge}{status}", p.to_string());
    }
    let hidden = tree.len() - shown.len().min(max_nodes);
    if hidden > 0 {
        let _ = writeln!(out, "{indent}... {hidden} more nodes");
    }
}

fn render_explanation(out: &mut String, g: &GoalResult) {
    if g.report.rounds.is_empty() {
        return;
    }
    let _ = writeln!(out, "Explanation {} :: {}", g.name, g.report.goal);
    for (k, round) in g.report.rounds.iter().enumerate() {
        render_round(out, k + 1, round);
    }
}

fn render_round(out: &mut String, k: usize, round: &Round) {
    let _ = writeln!(out, "  Round {k}");
    let triples = find_critical_triples(&round.tree);
    // Down to the deepest lower position of the chosen loop.
    let depth = match &round.closed {
        Some(c) => c.critical_leaves.iter().map(|l| c.origin.depth() + l.depth()).max().unwrap_or(0),
        None => usize::MAX,
    };
    let _ = writeln!(out, "  Resolution tree ({} nodes)", round.tree.len());
    render_tree(
        out,
        &round.tree,
        "    ",
        depth,
        EXPLAIN_NODE_LIMIT.max(round.closed.as_ref().map_or(0, |c| c.tree.len())),
    );
    let Some(closed) = &round.closed else {
        let _ = writeln!(out, "  Critical triples: {}", triples.len());
        return;
    };
    let _ = writeln!(out, "  Critical triples");
    let leaves: Vec<_> = closed.critical_leaves.iter().map(|l| closed.origin.join(l)).collect();
    let (used, unused): (Vec<_>, Vec<_>) =
        triples.iter().partition(|t| leaves.contains(&t.lower) && t.upper == closed.origin);
    for t in used {
        let _ = writeln!(out, "    {t}  [{}]", t.projection);
    }
    if !unused.is_empty() {
        let _ = writeln!(out, "    ... {} more below the cut or with other upper positions", unused.len());
    }
    let _ = writeln!(out, "  Closed subtree at {}", closed.origin);
    render_tree(out, &closed.tree, "    ", usize::MAX, usize::MAX);
    let Some(abs) = &round.abstract_tree else { return };
    let _ = writeln!(out, "  Abstract tree");
    render_tree(out, &abs.tree, "    ", usize::MAX, usize::MAX);
    let Some(c) = &round.candidate else { return };
    let _ = writeln!(out, "  Candidate lemma: {}", c.formula);
    let head = &c.formula.head;
    for (_, node) in abs.tree.leaves() {
        if let NodeLabel::Goal(b) = &node.label {
            let verdict = if paterson_holds(b, head) { "kept" } else { "dropped" };
            let _ = writeln!(out, "    leaf {b}: {verdict}");
        }
    }
}

/// One observational-equivalence check between a simple loop and proof
/// evidence for `hypotheses => goal`.
#[derive(Clone, Debug)]
pub struct ObsCheck {
    pub label: String,
    pub n: usize,
    pub simple_loop: Option<SimpleLoop>,
    pub formula: Option<HornFormula>,
    pub evidence: Option<Evidence>,
    pub verdict: Option<ObsVerdict>,
    pub note: Option<String>,
}

/// Checks the loop of `goal` in `env` against a corecursive proof of its
/// hypotheses entailing it.
pub fn obs_check(env: &AxiomEnv, label: &str, goal: &asl_core::Atom, n: usize, cfg: &ProofConfig) -> ObsCheck {
    let mut check = ObsCheck {
        label: label.to_string(),
        n,
        simple_loop: None,
        formula: None,
        evidence: None,
        verdict: None,
        note: None,
    };
    let Some(lp) = detect_simple_loop(env, goal, cfg.fuel) else {
        check.note = Some(format!("no simple loop for `{goal}`"));
        return check;
    };
    let formula = HornFormula::new(lp.hypotheses.clone(), goal.clone());
    match prove_horn(env, &formula, cfg) {
        Ok(e) => {
            check.verdict = Some(check_obs_equiv(env, &lp, &e, n, cfg.fuel));
            check.evidence = Some(e);
        }
        Err(e) => check.note = Some(format!("cannot prove `{formula}`: {e}")),
    }
    check.formula = Some(formula);
    check.simple_loop = Some(lp);
    check
}

fn obs_checks(s: &Session, n: usize, cfg: &ProofConfig) -> Vec<ObsCheck> {
    let mut out = Vec::new();
    for g in &s.goals {
        for lemma in g.report.outcome.new_lemmas() {
            if g.report.proven() {
                out.push(obs_check(&g.env, &lemma.name, &lemma.formula.head, n, cfg));
            }
        }
        // Goals proved as Horn formulas carry their own loop.
        let horn = g.keyword == DeclKind::Lemma || !g.report.goal.head.is_ground();
        if horn && g.report.proven() {
            out.push(obs_check(&g.env, &g.name, &g.report.goal.head, n, cfg));
        }
    }
    out
}

fn record_text(r: Option<&ObservationRecord>) -> String {
    r.map_or_else(|| "-".to_string(), |r| r.context.to_string())
}

fn render_obs_check(out: &mut String, o: &ObsCheck) {
    let _ = writeln!(out, "Observation check {} (n = {})", o.label, o.n);
    if let Some(lp) = &o.simple_loop {
        let _ = writeln!(out, "  loop: {} ~> {}", lp.goal, lp.loop_state);
        let _ = writeln!(out, "  sigma: {}", lp.sigma);
        for (d, c) in lp.hypotheses.iter().zip(&lp.hypothesis_contexts) {
            let _ = writeln!(out, "  hypothesis: {d} ~> {}", c.fill(&MixedTerm::Atom(d.clone())));
        }
    }
    if let (Some(f), Some(e)) = (&o.formula, &o.evidence) {
        let _ = writeln!(out, "  evidence: {e} : {f}");
    }
    if let Some(v) = &o.verdict {
        let width = (1..=o.n).map(|m| record_text(v.observational.get(m - 1)).chars().count()).max().unwrap_or(0);
        let _ = writeln!(out, "  {:>3}  {:<width$}  | corecursive", "m", "observational");
        for m in 1..=o.n {
            let (a, b) = (record_text(v.observational.get(m - 1)), record_text(v.corecursive.get(m - 1)));
            let _ = writeln!(out, "  {m:>3}  {a:<width$}  | {b}");
        }
        match &v.divergence {
            None => {
                let _ = writeln!(out, "  verdict: equivalent");
            }
            Some(d) => {
                let _ = writeln!(out, "  verdict: differs at m = {}: {}", d.index, d.reason);
            }
        }
    }
    if let Some(note) = &o.note {
        let _ = writeln!(out, "  {note}");
    }
}

fn module_env(src: &str, cfg: &RunConfig) -> Result<AxiomEnv, RunOutput> {
    let module = parse_module(src).map_err(|e| input_error(&e, cfg))?;
    let mut env = AxiomEnv::new();
    for (name, d) in module.axioms() {
        env.push_axiom(name, d.formula.clone()).expect("axiom names are unique and parsed formulas scoped");
    }
    Ok(env)
}

fn goal_atom(goal: &str, cfg: &RunConfig) -> Result<asl_core::Atom, RunOutput> {
    parse_atom(goal).map_err(|e| RunOutput {
        code: EXIT_INPUT,
        stdout: String::new(),
        stderr: format!("{}: error in --goal: {e}\n", cfg.input.display()),
    })
}

/// Small-step resolution of `goal` against the module's axioms.
pub fn trace_source(src: &str, goal: &str, steps: usize, cfg: &RunConfig) -> RunOutput {
    let env = match module_env(src, cfg) {
        Ok(e) => e,
        Err(o) => return o,
    };
    let goal = match goal_atom(goal, cfg) {
        Ok(a) => a,
        Err(o) => return o,
    };
    let states = trace(&env, &goal, steps);
    let last = states.last().expect("a trace starts with the goal");
    let proven = !last.has_atoms();
    let code = if proven { EXIT_PROVEN } else { EXIT_FAILED };
    let mut stderr = String::new();
    if !proven {
        let why = if states.len() > steps { "step limit reached" } else { "irreducible atoms remain" };
        let _ = writeln!(stderr, "{}: error: no proof of `{goal}` in the trace: {why}", cfg.input.display());
    }
    let stdout = if cfg.json {
        json::trace(&goal, &states, proven)
    } else {
        let mut out = format!("Trace of {goal}\n");
        for (k, s) in states.iter().enumerate() {
            let _ = writeln!(out, "  {k:>3}  {s}");
        }
        out
    };
    RunOutput { code, stdout, stderr }
}

/// Observational equivalence of the loop of `goal` and its corecursive proof.
pub fn obs_source(src: &str, goal: &str, n: usize, cfg: &RunConfig) -> RunOutput {
    let env = match module_env(src, cfg) {
        Ok(e) => e,
        Err(o) => return o,
    };
    let goal = match goal_atom(goal, cfg) {
        Ok(a) => a,
        Err(o) => return o,
    };
    let check = obs_check(&env, &goal.to_string(), &goal, n, &cfg.proof);
    let ok = check.verdict.as_ref().is_some_and(ObsVerdict::equivalent);
    let mut stderr = String::new();
    if !ok {
        let why = match (&check.note, &check.verdict) {
            (Some(note), _) => note.clone(),
            (None, Some(v)) => {
                v.divergence.as_ref().map(|d| format!("differs at m = {}: {}", d.index, d.reason)).unwrap_or_default()
            }
            (None, None) => String::new(),
        };
        let _ = writeln!(stderr, "{}: error: {why}", cfg.input.display());
    }
    let stdout = if cfg.json {
        json::obs(std::slice::from_ref(&check))
    } else {
        let mut out = String::new();
        render_obs_check(&mut out, &check);
        out
    };
    RunOutput { code: if ok { EXIT_PROVEN } else { EXIT_FAILED }, stdout, stderr }
}
