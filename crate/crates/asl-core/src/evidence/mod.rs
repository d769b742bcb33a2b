//! Type checking and reduction of evidence, and the observational
//! equivalence harness for simple loops.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::resolve::AxiomEnv;
use crate::syntax::{match_atom, name, Atom, Evidence, Fresh, HornFormula, Name, Substitution, Term};

mod obs;
mod reduce;

pub use obs::{
    check_obs_equiv, corecursive_points, detect_simple_loop, observational_points, Divergence, ObsError, ObsVerdict,
    ObservationKind, ObservationRecord, SimpleLoop,
};
pub use reduce::{ev_step, next_redex, whnf};

/// Marker that keeps eigenconstants apart from user constants, which the
/// surface syntax cannot spell with it.
pub const EIGEN_MARK: char = '#';

pub fn is_eigen(n: &str) -> bool {
    n.contains(EIGEN_MARK)
}

/// Fresh constants standing for the universally quantified variables of a
/// formula, in order of first occurrence.
pub fn eigen_instance(f: &HornFormula, fresh: &mut Fresh) -> (Substitution, Vec<Name>) {
    let mut s = Substitution::new();
    let mut made = Vec::new();
    for x in f.vars() {
        let c = name(&format!("C{EIGEN_MARK}{}", fresh.next_index()));
        s.insert(x, Term::Const(c.clone()));
        made.push(c);
    }
    (s, made)
}

/// Named Horn-formula assumptions.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct TypingContext {
    assumptions: Vec<(Name, HornFormula)>,
}

impl TypingContext {
    pub fn new() -> TypingContext {
        TypingContext::default()
    }

    pub fn from_env(env: &AxiomEnv) -> TypingContext {
        TypingContext { assumptions: env.entries().iter().map(|e| (e.name.clone(), e.formula.clone())).collect() }
    }

    pub fn push(&mut self, n: Name, f: HornFormula) {
        self.assumptions.push((n, f));
    }

    pub fn lookup(&self, n: &str) -> Option<&HornFormula> {
        self.assumptions.iter().rev().find(|(m, _)| &**m == n).map(|(_, f)| f)
    }

    pub fn assumptions(&self) -> &[(Name, HornFormula)] {
        &self.assumptions
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Rule {
    Assump,
    App,
    Abs,
    Inst,
    Mu,
}

/// First failing rule. `position` lists the descents from the root: `0`
/// under a binder, `k` into the `k`-th argument of a spine.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TypeError {
    pub rule: Rule,
    pub position: Vec<usize>,
    pub message: String,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} rule fails at [", self.rule)?;
        for (i, p) in self.position.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]: {}", self.message)
    }
}

impl core::error::Error for TypeError {}

/// `λᾱ.κ ē` with `κ` a constant.
pub fn hnf(e: &Evidence) -> bool {
    let (_, body) = e.strip_lams();
    matches!(body.spine().0, Evidence::Axiom(_))
}

struct Checker<'a> {
    global: &'a TypingContext,
    local: Vec<(Name, HornFormula)>,
    fresh: Fresh,
    position: Vec<usize>,
}

impl Checker<'_> {
    fn fail(&self, rule: Rule, message: String) -> TypeError {
        TypeError { rule, position: self.position.clone(), message }
    }

    fn lookup(&self, head: &Evidence) -> Option<&HornFormula> {
        match head {
            Evidence::Var(x) => {
                self.local.iter().rev().find(|(n, _)| n == x).map(|(_, f)| f).or_else(|| self.global.lookup(x))
            }
            Evidence::Axiom(k) => self.global.lookup(k),
            _ => None,
        }
    }

    fn formula(&mut self, e: &Evidence, f: &HornFormula) -> Result<(), TypeError> {
        if let Evidence::Mu(x, body) = e {
            if !hnf(body) {
                return Err(self.fail(Rule::Mu, format!("body of `mu {x}` is not in head normal form")));
            }
            self.local.push((x.clone(), f.clone()));
            self.position.push(0);
            let r = self.formula(body, f);
            self.position.pop();
            self.local.pop();
            return r;
        }
        let (gamma, _) = eigen_instance(f, &mut self.fresh);
        let inst = gamma.apply(f);
        let (binders, mut inner) = e.strip_lams();
        if binders.len() > inst.body.len() {
            return Err(
                self.fail(Rule::Abs, format!("{} abstractions for {} hypotheses", binders.len(), inst.body.len()))
            );
        }
        let mark = self.local.len();
        for (x, b) in binders.iter().zip(&inst.body) {
            self.local.push((x.clone(), HornFormula::fact(b.clone())));
        }
        // Missing abstractions are supplied by applying to fresh hypotheses.
        let mut expanded;
        if binders.len() < inst.body.len() {
            expanded = inner.clone();
            for b in &inst.body[binders.len()..] {
                let h = name(&format!("h{EIGEN_MARK}{}", self.fresh.next_index()));
                self.local.push((h.clone(), HornFormula::fact(b.clone())));
                expanded = Evidence::app(expanded, Evidence::Var(h));
            }
            inner = &expanded;
        }
        self.position.extend(core::iter::repeat_n(0, binders.len()));
        let r = self.atom(inner, &inst.head);
        self.position.truncate(self.position.len() - binders.len());
        self.local.truncate(mark);
        r
    }

    fn atom(&mut self, e: &Evidence, target: &Atom) -> Result<(), TypeError> {
        match e {
            Evidence::Mu(..) => return self.formula(e, &HornFormula::fact(target.clone())),
            Evidence::Lam(x, _) => {
                return Err(self.fail(Rule::Abs, format!("`\\ {x}` checked against the atom `{target}`")));
            }
            _ => {}
        }
        let (head, args) = e.spine();
        let Some(f) = self.lookup(head).cloned() else {
            return Err(match head {
                Evidence::Lam(..) | Evidence::Mu(..) => {
                    self.fail(Rule::App, format!("cannot infer the formula of a redex head against `{target}`"))
                }
                _ => self.fail(Rule::Assump, format!("`{head}` is not in scope")),
            });
        };
        let Some(sigma) = match_atom(&f.head, target) else {
            return Err(self.fail(Rule::Inst, format!("`{head} : {f}` does not conclude `{target}`")));
        };
        if args.len() != f.body.len() {
            let msg = format!("`{head}` takes {} arguments, given {}", f.body.len(), args.len());
            return Err(self.fail(Rule::App, msg));
        }
        for (k, (a, b)) in args.iter().zip(&f.body).enumerate() {
            self.position.push(k + 1);
            let r = self.atom(a, &sigma.apply(b));
            self.position.pop();
            r?;
        }
        Ok(())
    }
}

/// Checks `ctx ⊢ e : f`. Variables of `f` are instantiated with fresh
/// eigenconstants, λ binders take the instantiated hypotheses, μ requires a
/// head normal form body, and spines are checked by matching the head's
/// conclusion against the goal atom.
pub fn type_check(ctx: &TypingContext, e: &Evidence, f: &HornFormula) -> Result<(), TypeError> {
    let mut c = Checker { global: ctx, local: Vec::new(), fresh: Fresh::new(), position: Vec::new() };
    c.formula(e, f)
}

/// Names of eigenconstants appearing anywhere in the evidence.
pub fn eigen_leaks(e: &Evidence) -> BTreeSet<Name> {
    let mut out: BTreeSet<Name> = e.constants().into_iter().filter(|k| is_eigen(k)).collect();
    out.extend(e.free_vars().into_iter().filter(|k| is_eigen(k)));
    out
}

/// Replaces lemma constants by their definitions, innermost lemmas first.
pub fn inline_lemmas(env: &AxiomEnv, e: &Evidence) -> Evidence {
    let expand = |k: &Name| -> Evidence {
        match env.get(k) {
            Some(entry) if entry.kind == crate::resolve::EntryKind::ProvenLemma => inline_lemmas(env, &entry.evidence),
            _ => Evidence::Axiom(k.clone()),
        }
    };
    e.map_constants(&expand)
}
