//! Least general anti-unification of atoms.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use super::{Atom, Fresh, Name, Term};

/// Prefix of variables introduced for mismatching pairs.
pub const FRESH_VAR_PREFIX: &str = "var_";

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AntiUnifyError {
    PredicateMismatch { left: Atom, right: Atom },
    Empty,
}

impl fmt::Display for AntiUnifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AntiUnifyError::PredicateMismatch { left, right } => {
                write!(f, "cannot anti-unify `{left}` with `{right}`: predicate or arity differs")
            }
            AntiUnifyError::Empty => f.write_str("cannot anti-unify an empty list of atoms"),
        }
    }
}

impl core::error::Error for AntiUnifyError {}

struct Generaliser<'a> {
    fresh: &'a mut Fresh,
    avoid: &'a BTreeSet<Name>,
    phi: BTreeMap<(Term, Term), Name>,
}

impl Generaliser<'_> {
    fn term(&mut self, s: &Term, t: &Term) -> Term {
        if s == t {
            return s.clone();
        }
        let (sh, sa) = s.spine();
        let (th, ta) = t.spine();
        if !sa.is_empty() && sh == th && sa.len() == ta.len() {
            let args: Vec<Term> = sa.iter().zip(&ta).map(|(x, y)| self.term(x, y)).collect();
            return Term::apps(sh.clone(), args);
        }
        let key = (s.clone(), t.clone());
        if let Some(v) = self.phi.get(&key) {
            return Term::Var(v.clone());
        }
        let v = self.fresh.name_avoiding(FRESH_VAR_PREFIX, self.avoid);
        self.phi.insert(key, v.clone());
        Term::Var(v)
    }
}

fn anti_unify_avoiding(a: &Atom, b: &Atom, fresh: &mut Fresh, avoid: &BTreeSet<Name>) -> Result<Atom, AntiUnifyError> {
    if a.pred != b.pred || a.args.len() != b.args.len() {
        return Err(AntiUnifyError::PredicateMismatch { left: a.clone(), right: b.clone() });
    }
    let mut g = Generaliser { fresh, avoid, phi: BTreeMap::new() };
    let args = a.args.iter().zip(&b.args).map(|(s, t)| g.term(s, t)).collect();
    Ok(Atom { pred: a.pred.clone(), args })
}

/// `a ⊔ b`. Shared structure is kept; each distinct mismatching pair of
/// subterms becomes one fresh variable, reused wherever that pair recurs.
pub fn anti_unify(a: &Atom, b: &Atom, fresh: &mut Fresh) -> Result<Atom, AntiUnifyError> {
    let avoid: BTreeSet<Name> = a.names().union(&b.names()).cloned().collect();
    anti_unify_avoiding(a, b, fresh, &avoid)
}

/// Left fold of [`anti_unify`] over the list.
pub fn anti_unify_all(atoms: &[Atom], fresh: &mut Fresh) -> Result<Atom, AntiUnifyError> {
    let (first, rest) = atoms.split_first().ok_or(AntiUnifyError::Empty)?;
    let avoid: BTreeSet<Name> = atoms.iter().flat_map(Atom::names).collect();
    let mut acc = first.clone();
    for a in rest {
        acc = anti_unify_avoiding(&acc, a, fresh, &avoid)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::match_atom;

    fn mu(args: &[Term]) -> Term {
        Term::apps(Term::cons("Mu"), args.iter().cloned())
    }

    #[test]
    fn hptree_root() {
        let int = Term::cons("Int");
        let a = Atom::new("Eq", [mu(&[Term::cons("HPTree"), int.clone()])]);
        let b = Atom::new("Eq", [mu(&[Term::cons("HPTree"), Term::pair(int.clone(), int)])]);
        let g = anti_unify(&a, &b, &mut Fresh::starting_at(1)).unwrap();
        assert_eq!(g.to_string(), "Eq (Mu HPTree var_1)");
        assert!(match_atom(&g, &a).is_some() && match_atom(&g, &b).is_some());
    }

    #[test]
    fn q_chain() {
        let z = Term::cons("Z");
        let a = Atom::new("Q", [Term::app(Term::cons("S"), z.clone())]);
        let b = Atom::new("Q", [Term::app(Term::cons("S"), Term::app(Term::cons("G"), z))]);
        let g = anti_unify(&a, &b, &mut Fresh::new()).unwrap();
        assert_eq!(g.to_string(), "Q (S var_0)");
    }

    #[test]
    fn shared_mismatch_reuses_variable() {
        let a = Atom::new("D", [Term::cons("A"), Term::cons("A"), Term::cons("B")]);
        let b = Atom::new("D", [Term::cons("C"), Term::cons("C"), Term::cons("A")]);
        let g = anti_unify(&a, &b, &mut Fresh::new()).unwrap();
        assert_eq!(g.args[0], g.args[1]);
        assert_ne!(g.args[0], g.args[2]);
    }

    #[test]
    fn avoids_existing_names() {
        let a = Atom::new("P", [Term::var("var_0"), Term::cons("A")]);
        let b = Atom::new("P", [Term::var("var_0"), Term::cons("B")]);
        let g = anti_unify(&a, &b, &mut Fresh::new()).unwrap();
        assert_eq!(g.to_string(), "P var_0 var_1");
    }

    #[test]
    fn mismatch_and_singleton() {
        let a = Atom::new("P", [Term::cons("A")]);
        let b = Atom::new("Q", [Term::cons("A")]);
        assert!(matches!(anti_unify(&a, &b, &mut Fresh::new()), Err(AntiUnifyError::PredicateMismatch { .. })));
        assert_eq!(anti_unify_all(core::slice::from_ref(&a), &mut Fresh::new()).unwrap(), a);
        assert_eq!(anti_unify_all(&[], &mut Fresh::new()), Err(AntiUnifyError::Empty));
    }

    #[test]
    fn different_constructors_mismatch_whole() {
        let a = Atom::new("Eq", [Term::app(Term::cons("F"), Term::cons("A"))]);
        let b = Atom::new("Eq", [Term::app(Term::cons("G"), Term::cons("A"))]);
        let g = anti_unify(&a, &b, &mut Fresh::new()).unwrap();
        assert_eq!(g.to_string(), "Eq var_0");
    }
}
