//! Corecursive resolution of Horn formulas and the automatic lemma pipeline.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::evidence::{eigen_instance, eigen_leaks, type_check, TypeError, TypingContext};
use crate::loopdetect::{
    abstract_representation, candidate_lemma, closed_subtree, AbstractTree, CandidateLemma, ClosedSubtree, NotClosed,
    DEFAULT_ABSTRACT_FUEL, DEFAULT_TREE_DEPTH, DEFAULT_TREE_NODES,
};
use crate::resolve::{
    build_tree_with, resolve, AxiomEnv, ClausePolicy, EntryKind, Fuel, OverlapError, OverlapMode, ResolutionTree,
    ResolveError, TreeBounds, DEFAULT_FUEL,
};
use crate::syntax::{name, Atom, Evidence, Fresh, HornFormula, Name};

pub use crate::evidence::hnf;

/// Name of the μ binder in proofs made by [`prove_horn`].
pub const MU_BINDER: &str = "a";
/// Prefix of the λ binders for hypotheses.
pub const HYP_PREFIX: &str = "b";
pub const DEFAULT_LEMMA_ROUNDS: usize = 3;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ProofConfig {
    pub fuel: usize,
    pub max_lemma_rounds: usize,
    pub tree_depth: usize,
    pub tree_nodes: usize,
    pub abstract_fuel: usize,
}

impl ProofConfig {
    /// The μ rule always demands a guarded body; there is no switch.
    pub fn guard_required(&self) -> bool {
        true
    }
}

impl Default for ProofConfig {
    fn default() -> ProofConfig {
        ProofConfig {
            fuel: DEFAULT_FUEL,
            max_lemma_rounds: DEFAULT_LEMMA_ROUNDS,
            tree_depth: DEFAULT_TREE_DEPTH,
            tree_nodes: DEFAULT_TREE_NODES,
            abstract_fuel: DEFAULT_ABSTRACT_FUEL,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ProofError {
    /// The only derivation found has the coinductive hypothesis at its head.
    GuardViolation(Evidence),
    FuelExhausted,
    Stuck(Atom),
    Existential(Vec<Name>),
    /// The derivation failed its own type check. Never expected.
    IllTyped(TypeError),
    /// Proof-local constants escaped into the evidence. Never expected.
    EigenLeak(Vec<Name>),
}

impl fmt::Display for ProofError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProofError::GuardViolation(e) => write!(f, "unguarded corecursion in `{e}`"),
            ProofError::FuelExhausted => f.write_str("fuel exhausted"),
            ProofError::Stuck(a) => write!(f, "stuck: no clause matches `{a}`"),
            ProofError::Existential(vs) => {
                f.write_str("existential variables:")?;
                vs.iter().try_for_each(|v| write!(f, " {v}"))
            }
            ProofError::IllTyped(e) => write!(f, "internal error, ill-typed evidence: {e}"),
            ProofError::EigenLeak(ns) => {
                f.write_str("internal error, eigenconstants escaped:")?;
                ns.iter().try_for_each(|n| write!(f, " {n}"))
            }
        }
    }
}

impl core::error::Error for ProofError {}

impl From<ResolveError> for ProofError {
    fn from(e: ResolveError) -> ProofError {
        match e {
            ResolveError::FuelExhausted => ProofError::FuelExhausted,
            ResolveError::Stuck(a) => ProofError::Stuck(a),
        }
    }
}

/// Proves `goal` with the μ and λ rules: the goal itself is available as a
/// guarded coinductive hypothesis, its variables become eigenconstants and
/// its body atoms become hypotheses. The μ is dropped when unused.
pub fn prove_horn(env: &AxiomEnv, goal: &HornFormula, cfg: &ProofConfig) -> Result<Evidence, ProofError> {
    let ex = goal.existential_vars();
    if !ex.is_empty() {
        return Err(ProofError::Existential(ex));
    }
    let alpha = name(MU_BINDER);
    let mut local = env.clone();
    // A user entry may already be called `a` or `b0`; the hypothesis names
    // only need to be distinct within this proof.
    let taken = |n: &str| env.get(n).is_some();
    let alpha = if taken(&alpha) { fresh_local(&alpha, &taken) } else { alpha };
    local.push_cohypothesis(alpha.clone(), goal.clone()).expect("fresh name");
    let (gamma, _) = eigen_instance(goal, &mut Fresh::new());
    let inst = gamma.apply(goal);
    let mut binders = Vec::new();
    for (k, b) in inst.body.iter().enumerate() {
        let candidate = name(&format!("{HYP_PREFIX}{k}"));
        let n = if taken(&candidate) || candidate == alpha { fresh_local(&candidate, &taken) } else { candidate };
        local.push_hypothesis(n.clone(), b.clone()).expect("fresh name");
        binders.push(n);
    }
    let body = resolve(&local, &inst.head, &mut Fuel::new(cfg.fuel), ClausePolicy::Corecursive)?;
    let lams = Evidence::lams(&binders, body);
    let evidence = if lams.occurs_free(&alpha) {
        if cfg.guard_required() && !hnf(&lams) {
            return Err(ProofError::GuardViolation(lams));
        }
        Evidence::Mu(alpha, alloc::boxed::Box::new(lams))
    } else {
        lams
    };
    let leaks = eigen_leaks(&evidence);
    if !leaks.is_empty() {
        return Err(ProofError::EigenLeak(leaks.into_iter().collect()));
    }
    type_check(&TypingContext::from_env(env), &evidence, goal).map_err(ProofError::IllTyped)?;
    Ok(evidence)
}

fn fresh_local(base: &str, taken: &dyn Fn(&str) -> bool) -> Name {
    (0..).map(|i| name(&format!("{base}'{i}"))).find(|n| !taken(n)).expect("unbounded supply")
}

/// Names for proven declarations. Declarations are numbered by position in
/// the file; generated lemmas continue after the last declaration.
#[derive(Clone, Debug)]
pub struct LemmaNamer {
    next_generated: usize,
}

impl LemmaNamer {
    pub fn new(declarations: usize) -> LemmaNamer {
        LemmaNamer { next_generated: declarations }
    }

    pub fn goal(&self, decl: usize) -> Name {
        name(&format!("goalLem{decl}"))
    }

    pub fn lemma(&self, decl: usize) -> Name {
        name(&format!("lem{decl}"))
    }

    pub fn generated(&mut self) -> Name {
        let n = name(&format!("genLemm{}", self.next_generated));
        self.next_generated += 1;
        n
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NewLemma {
    pub name: Name,
    pub formula: HornFormula,
    pub evidence: Evidence,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AutoOutcome {
    /// Proved after adding the generated lemmas.
    Proven {
        evidence: Evidence,
        lemmas: Vec<NewLemma>,
    },
    DirectlyProven(Evidence),
    LemmaUnprovable {
        candidate: CandidateLemma,
        error: ProofError,
        lemmas: Vec<NewLemma>,
    },
    NoLoopFound,
    /// Some subgoal has no matching clause at all.
    Stuck(Atom),
    Inconclusive(String),
}

impl AutoOutcome {
    pub fn tag(&self) -> &'static str {
        match self {
            AutoOutcome::Proven { .. } => "Proven",
            AutoOutcome::DirectlyProven(_) => "DirectlyProven",
            AutoOutcome::LemmaUnprovable { .. } => "LemmaUnprovable",
            AutoOutcome::NoLoopFound => "NoLoopFound",
            AutoOutcome::Stuck(_) => "Stuck",
            AutoOutcome::Inconclusive(_) => "Inconclusive",
        }
    }

    pub fn evidence(&self) -> Option<&Evidence> {
        match self {
            AutoOutcome::Proven { evidence, .. } | AutoOutcome::DirectlyProven(evidence) => Some(evidence),
            _ => None,
        }
    }

    pub fn new_lemmas(&self) -> &[NewLemma] {
        match self {
            AutoOutcome::Proven { lemmas, .. } | AutoOutcome::LemmaUnprovable { lemmas, .. } => lemmas,
            _ => &[],
        }
    }
}

/// What one lemma round looked at, kept for explanations.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Round {
    pub tree: ResolutionTree,
    pub closed: Option<ClosedSubtree>,
    pub abstract_tree: Option<AbstractTree>,
    pub candidate: Option<CandidateLemma>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AutoReport {
    pub goal: HornFormula,
    pub outcome: AutoOutcome,
    pub rounds: Vec<Round>,
    /// Resolution steps spent, over all attempts.
    pub steps: usize,
}

impl AutoReport {
    pub fn proven(&self) -> bool {
        self.outcome.evidence().is_some()
    }
}

fn resolve_counted(env: &AxiomEnv, goal: &Atom, fuel: usize, steps: &mut usize) -> Result<Evidence, ResolveError> {
    let mut f = Fuel::new(fuel);
    let r = resolve(env, goal, &mut f, ClausePolicy::NewestFirst);
    *steps += f.used();
    r
}

/// First tree depth tried when looking for a loop.
const FIRST_TREE_DEPTH: usize = 8;

/// Resolution tree of `goal` grown by doubling its depth until a closed
/// subtree appears, the tree is complete, or the configured depth is hit.
/// Atoms can grow exponentially with depth, so shallow loops stay cheap.
fn loop_tree(
    env: &AxiomEnv,
    goal: &Atom,
    cfg: &ProofConfig,
) -> Result<(ResolutionTree, Result<ClosedSubtree, NotClosed>), OverlapError> {
    let mut depth = FIRST_TREE_DEPTH.min(cfg.tree_depth);
    loop {
        let bounds = TreeBounds { depth, nodes: cfg.tree_nodes };
        let tree = build_tree_with(env, goal, bounds, OverlapMode::NewestFirst, &|_| false)?;
        let closed = closed_subtree(&tree);
        if closed.is_ok() || depth >= cfg.tree_depth || !tree.is_truncated() {
            return Ok((tree, closed));
        }
        depth = (depth * 2).min(cfg.tree_depth);
    }
}

/// Proves `goal`, generating lemmas from loops in its resolution tree when
/// plain resolution runs out of fuel. Lemmas are named by `namer` and are
/// not added to `env`; the caller decides whether to keep them.
pub fn auto(env: &AxiomEnv, goal: &HornFormula, cfg: &ProofConfig, namer: &mut LemmaNamer) -> AutoReport {
    let mut steps = 0;
    let mut rounds: Vec<Round> = Vec::new();
    if !goal.body.is_empty() || !goal.head.is_ground() {
        let outcome = match prove_horn(env, goal, cfg) {
            Ok(e) => AutoOutcome::DirectlyProven(e),
            Err(ProofError::Stuck(a)) => AutoOutcome::Stuck(a),
            Err(e) => AutoOutcome::Inconclusive(e.to_string()),
        };
        return AutoReport { goal: goal.clone(), outcome, rounds, steps };
    }
    let head = &goal.head;
    let outcome = 'search: {
        match resolve_counted(env, head, cfg.fuel, &mut steps) {
            Ok(e) => break 'search AutoOutcome::DirectlyProven(e),
            Err(ResolveError::Stuck(a)) => break 'search AutoOutcome::Stuck(a),
            Err(ResolveError::FuelExhausted) => {}
        }
        let mut cur = env.clone();
        let mut lemmas: Vec<NewLemma> = Vec::new();
        // Generalised variables are numbered from 1: `var_1`, `var_2`, ...
        let mut fresh = Fresh::starting_at(1);
        for _ in 0..cfg.max_lemma_rounds {
            let (tree, closed) = match loop_tree(&cur, head, cfg) {
                Ok(t) => t,
                Err(e) => break 'search AutoOutcome::Inconclusive(e.to_string()),
            };
            rounds.push(Round { tree, closed: None, abstract_tree: None, candidate: None });
            let round = rounds.last_mut().expect("just pushed");
            let closed = match closed {
                Ok(c) => round.closed.insert(c),
                Err(NotClosed::NoCriticalTriple) => break 'search AutoOutcome::NoLoopFound,
                Err(NotClosed::Inconclusive(why)) => break 'search AutoOutcome::Inconclusive(why),
            };
            let abs = match abstract_representation(closed, &cur, &mut fresh, cfg.abstract_fuel) {
                Ok(a) => round.abstract_tree.insert(a),
                Err(e) => break 'search AutoOutcome::Inconclusive(e.to_string()),
            };
            let candidate = match candidate_lemma(abs) {
                Ok(c) => round.candidate.insert(c).clone(),
                Err(e) => break 'search AutoOutcome::Inconclusive(e.to_string()),
            };
            if let Some(old) = cur.find_variant(&candidate.formula) {
                let why = format!("candidate `{}` is already available as {}", candidate.formula, old.name);
                break 'search AutoOutcome::Inconclusive(why);
            }
            let evidence = match prove_horn(&cur, &candidate.formula, cfg) {
                Ok(e) => e,
                Err(error) => break 'search AutoOutcome::LemmaUnprovable { candidate, error, lemmas },
            };
            let lemma = NewLemma { name: namer.generated(), formula: candidate.formula, evidence };
            cur.push_lemma(lemma.name.clone(), lemma.formula.clone(), lemma.evidence.clone())
                .expect("generated names are fresh and lemmas have no existentials");
            lemmas.push(lemma);
            match resolve_counted(&cur, head, cfg.fuel, &mut steps) {
                Ok(evidence) => break 'search AutoOutcome::Proven { evidence, lemmas },
                Err(ResolveError::Stuck(a)) => break 'search AutoOutcome::Stuck(a),
                Err(ResolveError::FuelExhausted) => {}
            }
        }
        AutoOutcome::Inconclusive(format!("still diverging after {} lemma rounds", cfg.max_lemma_rounds))
    };
    AutoReport { goal: goal.clone(), outcome, rounds, steps }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WfFailure {
    pub name: Name,
    pub error: TypeError,
}

/// Type checks each proven lemma against the entries before it and itself.
/// Lemmas may refer to themselves by name, as generated lemmas do once their
/// μ binder is replaced by their own name.
pub fn wf_check(env: &AxiomEnv) -> Result<(), Vec<WfFailure>> {
    let mut ctx = TypingContext::new();
    let mut failures = Vec::new();
    for e in env.entries() {
        ctx.push(e.name.clone(), e.formula.clone());
        if e.kind == EntryKind::ProvenLemma {
            if let Err(error) = type_check(&ctx, &e.evidence, &e.formula) {
                failures.push(WfFailure { name: e.name.clone(), error });
            }
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(failures)
    }
}
