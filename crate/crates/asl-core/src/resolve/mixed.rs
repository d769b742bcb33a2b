//! Mixed terms and small-step resolution.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use super::{candidates, AxiomEnv, ClausePolicy};
use crate::syntax::{name, Atom, Evidence, Name};

/// Rendering of the context hole.
pub const HOLE: &str = "<*>";

/// Evidence interleaved with unresolved atoms. `Hole` only appears in
/// contexts cut out of a state.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum MixedTerm {
    Atom(Atom),
    Axiom(Name),
    Var(Name),
    App(Box<MixedTerm>, Box<MixedTerm>),
    Lam(Name, Box<MixedTerm>),
    Mu(Name, Box<MixedTerm>),
    Hole,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Dir {
    Fun,
    Arg,
    Body,
}

/// Route from the root of a mixed term to one of its subterms.
pub type MixedPath = Vec<Dir>;

impl From<&Evidence> for MixedTerm {
    fn from(e: &Evidence) -> MixedTerm {
        match e {
            Evidence::Axiom(k) => MixedTerm::Axiom(k.clone()),
            Evidence::Var(x) => MixedTerm::Var(x.clone()),
            Evidence::App(f, a) => MixedTerm::app((&**f).into(), (&**a).into()),
            Evidence::Lam(x, b) => MixedTerm::Lam(x.clone(), Box::new((&**b).into())),
            Evidence::Mu(x, b) => MixedTerm::Mu(x.clone(), Box::new((&**b).into())),
        }
    }
}

impl MixedTerm {
    pub fn app(f: MixedTerm, a: MixedTerm) -> MixedTerm {
        MixedTerm::App(Box::new(f), Box::new(a))
    }

    pub fn apps(head: MixedTerm, args: impl IntoIterator<Item = MixedTerm>) -> MixedTerm {
        args.into_iter().fold(head, MixedTerm::app)
    }

    pub fn spine(&self) -> (&MixedTerm, Vec<&MixedTerm>) {
        let mut args = Vec::new();
        let mut t = self;
        while let MixedTerm::App(f, a) = t {
            args.push(&**a);
            t = f;
        }
        args.reverse();
        (t, args)
    }

    /// The evidence value, if no atom or hole remains.
    pub fn to_evidence(&self) -> Option<Evidence> {
        Some(match self {
            MixedTerm::Atom(_) | MixedTerm::Hole => return None,
            MixedTerm::Axiom(k) => Evidence::Axiom(k.clone()),
            MixedTerm::Var(x) => Evidence::Var(x.clone()),
            MixedTerm::App(f, a) => Evidence::app(f.to_evidence()?, a.to_evidence()?),
            MixedTerm::Lam(x, b) => Evidence::Lam(x.clone(), Box::new(b.to_evidence()?)),
            MixedTerm::Mu(x, b) => Evidence::Mu(x.clone(), Box::new(b.to_evidence()?)),
        })
    }

    pub fn get(&self, path: &[Dir]) -> Option<&MixedTerm> {
        let mut t = self;
        for d in path {
            t = match (d, t) {
                (Dir::Fun, MixedTerm::App(f, _)) => f,
                (Dir::Arg, MixedTerm::App(_, a)) => a,
                (Dir::Body, MixedTerm::Lam(_, b) | MixedTerm::Mu(_, b)) => b,
                _ => return None,
            };
        }
        Some(t)
    }

    /// Copy with the subterm at `path` replaced. Panics on an invalid path.
    pub fn replace(&self, path: &[Dir], new: MixedTerm) -> MixedTerm {
        let Some((d, rest)) = path.split_first() else {
            return new;
        };
        match (d, self) {
            (Dir::Fun, MixedTerm::App(f, a)) => MixedTerm::App(Box::new(f.replace(rest, new)), a.clone()),
            (Dir::Arg, MixedTerm::App(f, a)) => MixedTerm::App(f.clone(), Box::new(a.replace(rest, new))),
            (Dir::Body, MixedTerm::Lam(x, b)) => MixedTerm::Lam(x.clone(), Box::new(b.replace(rest, new))),
            (Dir::Body, MixedTerm::Mu(x, b)) => MixedTerm::Mu(x.clone(), Box::new(b.replace(rest, new))),
            _ => panic!("invalid mixed-term path"),
        }
    }

    /// Atoms in leftmost-outermost order, each with its path and whether it
    /// sits in an argument of a constant-headed spine.
    pub fn atoms(&self) -> Vec<(MixedPath, bool, &Atom)> {
        let mut out = Vec::new();
        self.collect_atoms(&mut Vec::new(), false, &mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, path: &mut MixedPath, guarded: bool, out: &mut Vec<(MixedPath, bool, &'a Atom)>) {
        match self {
            MixedTerm::Atom(a) => out.push((path.clone(), guarded, a)),
            MixedTerm::App(..) => {
                let (head, args) = self.spine();
                let n = args.len();
                let under_const = guarded || matches!(head, MixedTerm::Axiom(_));
                path.extend(core::iter::repeat_n(Dir::Fun, n));
                head.collect_atoms(path, guarded, out);
                path.truncate(path.len() - n);
                for (j, a) in args.into_iter().enumerate() {
                    let depth = n - 1 - j;
                    path.extend(core::iter::repeat_n(Dir::Fun, depth));
                    path.push(Dir::Arg);
                    a.collect_atoms(path, under_const, out);
                    path.truncate(path.len() - depth - 1);
                }
            }
            MixedTerm::Lam(_, b) | MixedTerm::Mu(_, b) => {
                path.push(Dir::Body);
                b.collect_atoms(path, guarded, out);
                path.pop();
            }
            MixedTerm::Axiom(_) | MixedTerm::Var(_) | MixedTerm::Hole => {}
        }
    }

    pub fn has_atoms(&self) -> bool {
        match self {
            MixedTerm::Atom(_) => true,
            MixedTerm::App(f, a) => f.has_atoms() || a.has_atoms(),
            MixedTerm::Lam(_, b) | MixedTerm::Mu(_, b) => b.has_atoms(),
            _ => false,
        }
    }

    pub fn holes(&self) -> usize {
        match self {
            MixedTerm::Hole => 1,
            MixedTerm::App(f, a) => f.holes() + a.holes(),
            MixedTerm::Lam(_, b) | MixedTerm::Mu(_, b) => b.holes(),
            _ => 0,
        }
    }

    /// Fills every hole with `t`.
    pub fn fill(&self, t: &MixedTerm) -> MixedTerm {
        match self {
            MixedTerm::Hole => t.clone(),
            MixedTerm::App(f, a) => MixedTerm::app(f.fill(t), a.fill(t)),
            MixedTerm::Lam(x, b) => MixedTerm::Lam(x.clone(), Box::new(b.fill(t))),
            MixedTerm::Mu(x, b) => MixedTerm::Mu(x.clone(), Box::new(b.fill(t))),
            _ => self.clone(),
        }
    }

    /// Replaces every occurrence of the atom `a` with a hole.
    pub fn hole_out(&self, a: &Atom) -> MixedTerm {
        match self {
            MixedTerm::Atom(b) if b == a => MixedTerm::Hole,
            MixedTerm::App(f, x) => MixedTerm::app(f.hole_out(a), x.hole_out(a)),
            MixedTerm::Lam(x, b) => MixedTerm::Lam(x.clone(), Box::new(b.hole_out(a))),
            MixedTerm::Mu(x, b) => MixedTerm::Mu(x.clone(), Box::new(b.hole_out(a))),
            _ => self.clone(),
        }
    }

    fn occurs_free(&self, x: &str) -> bool {
        match self {
            MixedTerm::Var(y) => &**y == x,
            MixedTerm::App(f, a) => f.occurs_free(x) || a.occurs_free(x),
            MixedTerm::Lam(y, b) | MixedTerm::Mu(y, b) => &**y != x && b.occurs_free(x),
            _ => false,
        }
    }

    fn free_vars_into(&self, bound: &mut Vec<Name>, out: &mut Vec<Name>) {
        match self {
            MixedTerm::Var(y) => {
                if !bound.contains(y) && !out.contains(y) {
                    out.push(y.clone());
                }
            }
            MixedTerm::App(f, a) => {
                f.free_vars_into(bound, out);
                a.free_vars_into(bound, out);
            }
            MixedTerm::Lam(y, b) | MixedTerm::Mu(y, b) => {
                bound.push(y.clone());
                b.free_vars_into(bound, out);
                bound.pop();
            }
            _ => {}
        }
    }

    /// Capture-avoiding `[r/x]self` on evidence variables.
    pub fn subst(&self, x: &str, r: &MixedTerm) -> MixedTerm {
        match self {
            MixedTerm::Var(y) if &**y == x => r.clone(),
            MixedTerm::App(f, a) => MixedTerm::app(f.subst(x, r), a.subst(x, r)),
            MixedTerm::Lam(y, b) | MixedTerm::Mu(y, b) => {
                if &**y == x || !b.occurs_free(x) {
                    return self.clone();
                }
                let mut rfree = Vec::new();
                r.free_vars_into(&mut Vec::new(), &mut rfree);
                let (y, b) = if rfree.contains(y) {
                    b.free_vars_into(&mut Vec::new(), &mut rfree);
                    let mut fresh = y.clone();
                    while rfree.contains(&fresh) || &*fresh == x {
                        fresh = name(&format!("{fresh}'"));
                    }
                    let renamed = b.subst(y, &MixedTerm::Var(fresh.clone()));
                    (fresh, renamed)
                } else {
                    (y.clone(), (**b).clone())
                };
                let body = Box::new(b.subst(x, r));
                match self {
                    MixedTerm::Lam(..) => MixedTerm::Lam(y, body),
                    _ => MixedTerm::Mu(y, body),
                }
            }
            _ => self.clone(),
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, as_arg: bool, as_head: bool) -> fmt::Result {
        match self {
            MixedTerm::Axiom(k) | MixedTerm::Var(k) => f.write_str(k),
            MixedTerm::Hole => f.write_str(HOLE),
            MixedTerm::Atom(a) => {
                let wrap = (as_arg || as_head) && !a.args.is_empty();
                if wrap {
                    write!(f, "({a})")
                } else {
                    write!(f, "{a}")
                }
            }
            MixedTerm::App(..) => {
                let (head, args) = self.spine();
                if as_arg {
                    f.write_str("(")?;
                }
                head.fmt_prec(f, false, true)?;
                for a in args {
                    f.write_str(" ")?;
                    a.fmt_prec(f, true, false)?;
                }
                if as_arg {
                    f.write_str(")")?;
                }
                Ok(())
            }
            MixedTerm::Lam(x, b) | MixedTerm::Mu(x, b) => {
                let wrap = as_arg || as_head;
                if wrap {
                    f.write_str("(")?;
                }
                if matches!(self, MixedTerm::Lam(..)) {
                    write!(f, "\\ {x} . ")?;
                } else {
                    write!(f, "mu {x} . ")?;
                }
                b.fmt_prec(f, false, false)?;
                if wrap {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for MixedTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, false, false)
    }
}

/// Rewrites the leftmost-outermost reducible atom `σA` to `e σB̄`, using the
/// first entry `e : B̄ ⇒ A` the policy offers. `None` when no atom reduces.
pub fn step(env: &AxiomEnv, state: &MixedTerm, policy: ClausePolicy) -> Option<MixedTerm> {
    for (path, guarded, atom) in state.atoms() {
        if let Some((i, sigma)) = candidates(env, atom, guarded, policy).into_iter().next() {
            let entry = &env.entries()[i];
            let args = entry.formula.body.iter().map(|b| MixedTerm::Atom(sigma.apply(b)));
            let new = MixedTerm::apps((&entry.reference()).into(), args);
            return Some(state.replace(&path, new));
        }
    }
    None
}

/// States of small-step resolution from `goal`, ending at a normal form or
/// after `max_steps` rewrites.
pub fn trace(env: &AxiomEnv, goal: &Atom, max_steps: usize) -> Vec<MixedTerm> {
    trace_from(env, MixedTerm::Atom(goal.clone()), max_steps)
}

pub fn trace_from(env: &AxiomEnv, start: MixedTerm, max_steps: usize) -> Vec<MixedTerm> {
    let mut states = alloc::vec![start];
    for _ in 0..max_steps {
        match step(env, states.last().expect("nonempty"), ClausePolicy::NewestFirst) {
            Some(next) => states.push(next),
            None => break,
        }
    }
    states
}
