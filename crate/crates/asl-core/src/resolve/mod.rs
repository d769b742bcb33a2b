//! Axiom environments and term-matching resolution.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::syntax::{match_atom, Atom, Evidence, HornFormula, Name, Substitution};

mod mixed;
mod tree;

pub use mixed::{step, trace, trace_from, Dir, MixedPath, MixedTerm, HOLE};
pub use tree::{
    build_tree, build_tree_with, NodeLabel, NodeStatus, OverlapError, OverlapMode, Position, ResolutionTree,
    TreeBounds, TreeEdge, TreeNode,
};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EntryKind {
    AxiomConst,
    ProvenLemma,
    Hypothesis,
    CoHypothesis,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Entry {
    pub name: Name,
    pub formula: HornFormula,
    pub evidence: Evidence,
    pub kind: EntryKind,
}

impl Entry {
    /// How a derivation refers to this entry: a constant for axioms and
    /// lemmas, a variable for hypotheses.
    pub fn reference(&self) -> Evidence {
        match self.kind {
            EntryKind::AxiomConst | EntryKind::ProvenLemma => Evidence::Axiom(self.name.clone()),
            EntryKind::Hypothesis | EntryKind::CoHypothesis => Evidence::Var(self.name.clone()),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, EntryKind::AxiomConst | EntryKind::ProvenLemma)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum EnvError {
    DuplicateName(Name),
    Existential { name: Name, vars: Vec<Name> },
}

impl fmt::Display for EnvError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnvError::DuplicateName(n) => write!(f, "name `{n}` is already defined"),
            EnvError::Existential { name, vars } => {
                write!(f, "`{name}` has body variables missing from its head:")?;
                for v in vars {
                    write!(f, " {v}")?;
                }
                Ok(())
            }
        }
    }
}

impl core::error::Error for EnvError {}

/// Ordered, named, evidence-backed Horn formulas.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct AxiomEnv {
    entries: Vec<Entry>,
}

impl AxiomEnv {
    pub fn new() -> AxiomEnv {
        AxiomEnv::default()
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| &*e.name == name)
    }

    pub fn push(&mut self, entry: Entry) -> Result<(), EnvError> {
        if self.get(&entry.name).is_some() {
            return Err(EnvError::DuplicateName(entry.name));
        }
        let vars = entry.formula.existential_vars();
        if !vars.is_empty() {
            return Err(EnvError::Existential { name: entry.name, vars });
        }
        self.entries.push(entry);
        Ok(())
    }

    pub fn push_axiom(&mut self, name: Name, formula: HornFormula) -> Result<(), EnvError> {
        let evidence = Evidence::Axiom(name.clone());
        self.push(Entry { name, formula, evidence, kind: EntryKind::AxiomConst })
    }

    pub fn push_lemma(&mut self, name: Name, formula: HornFormula, evidence: Evidence) -> Result<(), EnvError> {
        self.push(Entry { name, formula, evidence, kind: EntryKind::ProvenLemma })
    }

    pub fn push_hypothesis(&mut self, name: Name, atom: Atom) -> Result<(), EnvError> {
        let evidence = Evidence::Var(name.clone());
        self.push(Entry { name, formula: HornFormula::fact(atom), evidence, kind: EntryKind::Hypothesis })
    }

    pub fn push_cohypothesis(&mut self, name: Name, formula: HornFormula) -> Result<(), EnvError> {
        let evidence = Evidence::Var(name.clone());
        self.push(Entry { name, formula, evidence, kind: EntryKind::CoHypothesis })
    }

    /// Entries whose formula is the same up to variable renaming.
    pub fn find_variant(&self, f: &HornFormula) -> Option<&Entry> {
        self.entries.iter().find(|e| e.formula.is_variant_of(f))
    }

    /// Pairs of constant entries where one head is an instance of the other,
    /// so some goal is matched by both.
    pub fn overlapping_heads(&self) -> Vec<(Name, Name)> {
        let consts: Vec<&Entry> = self.entries.iter().filter(|e| e.is_constant()).collect();
        let mut out = Vec::new();
        for (i, a) in consts.iter().enumerate() {
            for b in &consts[i + 1..] {
                let (ha, hb) = (&a.formula.head, &b.formula.head);
                if match_atom(ha, hb).is_some() || match_atom(hb, ha).is_some() {
                    out.push((a.name.clone(), b.name.clone()));
                }
            }
        }
        out
    }

    /// Predicates used with more than one arity.
    pub fn arity_conflicts(&self) -> Vec<(Name, usize, usize)> {
        let mut seen: Vec<(Name, usize)> = Vec::new();
        let mut out = Vec::new();
        for e in &self.entries {
            for a in e.formula.body.iter().chain(core::iter::once(&e.formula.head)) {
                match seen.iter().find(|(p, _)| *p == a.pred) {
                    Some((_, n)) if *n != a.args.len() => out.push((a.pred.clone(), *n, a.args.len())),
                    Some(_) => {}
                    None => seen.push((a.pred.clone(), a.args.len())),
                }
            }
        }
        out
    }
}

/// Step budget: one unit per clause application or rewrite.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Fuel {
    remaining: usize,
    used: usize,
}

pub const DEFAULT_FUEL: usize = 10_000;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct OutOfFuel;

impl Fuel {
    pub fn new(steps: usize) -> Fuel {
        Fuel { remaining: steps, used: 0 }
    }

    pub fn tick(&mut self) -> Result<(), OutOfFuel> {
        if self.remaining == 0 {
            return Err(OutOfFuel);
        }
        self.remaining -= 1;
        self.used += 1;
        Ok(())
    }

    pub fn remaining(&self) -> usize {
        self.remaining
    }

    pub fn used(&self) -> usize {
        self.used
    }
}

impl Default for Fuel {
    fn default() -> Fuel {
        Fuel::new(DEFAULT_FUEL)
    }
}

/// Order in which matching entries are tried.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum ClausePolicy {
    /// All entries, newest first.
    #[default]
    NewestFirst,
    /// Hypotheses, then the coinductive hypothesis when guarded, then
    /// constants newest first.
    Corecursive,
}

/// Matching entries for `goal`, in policy order. `guarded` says whether the
/// goal sits strictly beneath a constant application.
pub fn candidates(env: &AxiomEnv, goal: &Atom, guarded: bool, policy: ClausePolicy) -> Vec<(usize, Substitution)> {
    let matching = |i: usize| match_atom(&env.entries[i].formula.head, goal).map(|s| (i, s));
    let n = env.entries.len();
    match policy {
        ClausePolicy::NewestFirst => (0..n).rev().filter_map(matching).collect(),
        ClausePolicy::Corecursive => {
            let kind = |i: usize| env.entries[i].kind;
            let hyps = (0..n).filter(|&i| kind(i) == EntryKind::Hypothesis);
            let co = (0..n).filter(|&i| guarded && kind(i) == EntryKind::CoHypothesis);
            let consts = (0..n).rev().filter(|&i| env.entries[i].is_constant());
            hyps.chain(co).chain(consts).filter_map(matching).collect()
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ResolveError {
    FuelExhausted,
    /// No entry matches this subgoal, and no alternative avoided it.
    Stuck(Atom),
}

impl fmt::Display for ResolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResolveError::FuelExhausted => f.write_str("fuel exhausted"),
            ResolveError::Stuck(a) => write!(f, "stuck: no clause matches `{a}`"),
        }
    }
}

impl core::error::Error for ResolveError {}

struct Attempt {
    entry: usize,
    subgoals: Vec<Atom>,
    args: Vec<Evidence>,
}

struct Frame {
    guarded: bool,
    cands: Vec<(usize, Substitution)>,
    next: usize,
    current: Option<Attempt>,
}

impl Frame {
    fn new(env: &AxiomEnv, goal: &Atom, guarded: bool, policy: ClausePolicy) -> Frame {
        Frame { guarded, cands: candidates(env, goal, guarded, policy), next: 0, current: None }
    }
}

/// Big-step resolution of `goal`, depth first with chronological
/// backtracking. Runs on an explicit stack, so deep derivations are bounded
/// by fuel alone.
pub fn resolve(env: &AxiomEnv, goal: &Atom, fuel: &mut Fuel, policy: ClausePolicy) -> Result<Evidence, ResolveError> {
    let mut stuck = goal.clone();
    let mut stack = alloc::vec![Frame::new(env, goal, false, policy)];
    let mut returned: Option<Option<Evidence>> = None;
    loop {
        let top = stack.last_mut().expect("resolution stack is never empty here");
        match returned.take() {
            Some(Some(e)) => top.current.as_mut().expect("child answers an attempt").args.push(e),
            Some(None) => top.current = None,
            None => {}
        }
        if top.current.is_none() {
            if top.next == top.cands.len() {
                stack.pop();
                if stack.is_empty() {
                    return Err(ResolveError::Stuck(stuck));
                }
                returned = Some(None);
                continue;
            }
            fuel.tick().map_err(|_| ResolveError::FuelExhausted)?;
            let (entry, sigma) = &top.cands[top.next];
            top.next += 1;
            let subgoals = env.entries[*entry].formula.body.iter().map(|b| sigma.apply(b)).collect();
            top.current = Some(Attempt { entry: *entry, subgoals, args: Vec::new() });
        }
        let attempt = top.current.as_ref().expect("attempt was just set");
        if attempt.args.len() == attempt.subgoals.len() {
            let head = env.entries[attempt.entry].reference();
            let e = Evidence::apps(head, attempt.args.iter().cloned());
            stack.pop();
            if stack.is_empty() {
                return Ok(e);
            }
            returned = Some(Some(e));
            continue;
        }
        let child_guarded = top.guarded || env.entries[attempt.entry].is_constant();
        let sub = &attempt.subgoals[attempt.args.len()];
        let frame = Frame::new(env, sub, child_guarded, policy);
        if frame.cands.is_empty() {
            stuck = sub.clone();
        }
        stack.push(frame);
    }
}

/// Short human-readable description of an entry for diagnostics.
pub fn describe(entry: &Entry) -> String {
    alloc::format!("{} : {}", entry.name, entry.formula)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::syntax::{name, Term};

    fn eq(t: Term) -> Atom {
        Atom::new("Eq", [t])
    }

    pub(crate) fn pair_env() -> AxiomEnv {
        let mut env = AxiomEnv::new();
        env.push_axiom(name("KInt"), HornFormula::fact(eq(Term::cons("Int")))).unwrap();
        let (x, y) = (Term::var("x"), Term::var("y"));
        env.push_axiom(
            name("KPair"),
            HornFormula::new(alloc::vec![eq(x.clone()), eq(y.clone())], eq(Term::pair(x, y))),
        )
        .unwrap();
        env
    }

    #[test]
    fn pair_resolution() {
        let env = pair_env();
        let int = Term::cons("Int");
        let mut fuel = Fuel::default();
        let e = resolve(&env, &eq(Term::pair(int.clone(), int.clone())), &mut fuel, ClausePolicy::NewestFirst).unwrap();
        assert_eq!(e.to_string(), "KPair KInt KInt");
        assert_eq!(fuel.used(), 3);
        let e = resolve(&env, &eq(int), &mut Fuel::default(), ClausePolicy::NewestFirst).unwrap();
        assert_eq!(e, Evidence::axiom("KInt"));
    }

    #[test]
    fn stuck_reports_subgoal() {
        let env = pair_env();
        let goal = eq(Term::pair(Term::cons("Int"), Term::cons("Bool")));
        let err = resolve(&env, &goal, &mut Fuel::default(), ClausePolicy::NewestFirst).unwrap_err();
        assert_eq!(err, ResolveError::Stuck(eq(Term::cons("Bool"))));
    }

    #[test]
    fn divergence_exhausts_fuel() {
        let mut env = AxiomEnv::new();
        let x = Term::var("x");
        env.push_axiom(
            name("KA"),
            HornFormula::new(alloc::vec![Atom::new("B", [x.clone()])], Atom::new("A", [x.clone()])),
        )
        .unwrap();
        env.push_axiom(name("KB"), HornFormula::new(alloc::vec![Atom::new("A", [x.clone()])], Atom::new("B", [x])))
            .unwrap();
        let mut fuel = Fuel::new(50);
        let r = resolve(&env, &Atom::new("A", [Term::cons("Z")]), &mut fuel, ClausePolicy::NewestFirst);
        assert_eq!(r, Err(ResolveError::FuelExhausted));
        assert_eq!(fuel.used(), 50);
    }

    #[test]
    fn backtracks_to_older_entry() {
        let mut env = pair_env();
        let x = Term::var("x");
        // Newer, more general clause that leads nowhere.
        env.push_axiom(name("KDead"), HornFormula::new(alloc::vec![Atom::new("Never", [x.clone()])], eq(x))).unwrap();
        let e = resolve(&env, &eq(Term::cons("Int")), &mut Fuel::default(), ClausePolicy::NewestFirst).unwrap();
        assert_eq!(e, Evidence::axiom("KInt"));
    }

    #[test]
    fn deep_derivation_does_not_overflow() {
        let mut env = AxiomEnv::new();
        let x = Term::var("x");
        env.push_axiom(name("KZ"), HornFormula::fact(Atom::new("N", [Term::cons("Z")]))).unwrap();
        env.push_axiom(
            name("KS"),
            HornFormula::new(alloc::vec![Atom::new("N", [x.clone()])], Atom::new("N", [Term::app(Term::cons("S"), x)])),
        )
        .unwrap();
        let mut t = Term::cons("Z");
        for _ in 0..1000 {
            t = Term::app(Term::cons("S"), t);
        }
        let mut fuel = Fuel::default();
        let e = resolve(&env, &Atom::new("N", [t]), &mut fuel, ClausePolicy::NewestFirst).unwrap();
        assert_eq!(fuel.used(), 1001);
        assert_eq!(e.size(), 2_001);
    }

    #[test]
    fn env_rejects_duplicates_and_existentials() {
        let mut env = pair_env();
        assert!(matches!(
            env.push_axiom(name("KInt"), HornFormula::fact(eq(Term::cons("A")))),
            Err(EnvError::DuplicateName(_))
        ));
        let bad = HornFormula::new(alloc::vec![eq(Term::var("y"))], eq(Term::app(Term::cons("List"), Term::var("x"))));
        assert!(matches!(env.push_axiom(name("K"), bad), Err(EnvError::Existential { .. })));
    }

    #[test]
    fn overlap_detection() {
        let mut env = pair_env();
        assert!(env.overlapping_heads().is_empty());
        env.push_axiom(name("KAny"), HornFormula::fact(eq(Term::var("z")))).unwrap();
        assert_eq!(env.overlapping_heads().len(), 2);
    }
}
