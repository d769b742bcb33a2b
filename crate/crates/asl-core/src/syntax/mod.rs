//! Terms, atoms, Horn formulas, substitutions and one-sided matching.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

mod antiunify;
mod evidence;

pub use antiunify::{anti_unify, anti_unify_all, AntiUnifyError};
pub use evidence::{alpha_equal, Evidence};

/// Identifier shared cheaply between terms.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

/// Name of the constructor behind the `(a, b)` sugar.
pub const PAIR: &str = "Pair";

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Term {
    Var(Name),
    Const(Name),
    App(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(s: &str) -> Term {
        Term::Var(name(s))
    }

    pub fn cons(s: &str) -> Term {
        Term::Const(name(s))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    /// Left-nested application of `head` to `args`.
    pub fn apps(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    pub fn pair(a: Term, b: Term) -> Term {
        Term::apps(Term::cons(PAIR), [a, b])
    }

    /// Head symbol and arguments of an application spine.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut t = self;
        while let Term::App(f, a) = t {
            args.push(&**a);
            t = f;
        }
        args.reverse();
        (t, args)
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(_) => true,
            Term::App(f, a) => f.is_ground() && a.is_ground(),
        }
    }

    /// Variables in order of first occurrence.
    pub fn collect_vars(&self, out: &mut Vec<Name>) {
        match self {
            Term::Var(x) => {
                if !out.contains(x) {
                    out.push(x.clone());
                }
            }
            Term::Const(_) => {}
            Term::App(f, a) => {
                f.collect_vars(out);
                a.collect_vars(out);
            }
        }
    }

    fn count(&self, consts: &mut Multiset, vars: &mut Multiset) {
        match self {
            Term::Var(x) => *vars.entry(x.clone()).or_insert(0) += 1,
            Term::Const(k) => *consts.entry(k.clone()).or_insert(0) += 1,
            Term::App(f, a) => {
                f.count(consts, vars);
                a.count(consts, vars);
            }
        }
    }

    fn collect_names(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(x) | Term::Const(x) => {
                out.insert(x.clone());
            }
            Term::App(f, a) => {
                f.collect_names(out);
                a.collect_names(out);
            }
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, as_arg: bool) -> fmt::Result {
        match self {
            Term::Var(x) | Term::Const(x) => f.write_str(x),
            Term::App(..) => {
                let (head, args) = self.spine();
                if matches!(head, Term::Const(k) if &**k == PAIR) && args.len() == 2 {
                    return write!(f, "({}, {})", args[0], args[1]);
                }
                if as_arg {
                    f.write_str("(")?;
                }
                head.fmt_prec(f, true)?;
                for a in args {
                    f.write_str(" ")?;
                    a.fmt_prec(f, true)?;
                }
                if as_arg {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, false)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Atom {
    pub pred: Name,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: &str, args: impl IntoIterator<Item = Term>) -> Atom {
        Atom { pred: name(pred), args: args.into_iter().collect() }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn vars(&self) -> Vec<Name> {
        let mut out = Vec::new();
        for a in &self.args {
            a.collect_vars(&mut out);
        }
        out
    }

    /// Every identifier occurring in the atom, predicate included.
    pub fn names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        out.insert(self.pred.clone());
        for a in &self.args {
            a.collect_names(&mut out);
        }
        out
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pred)?;
        for a in &self.args {
            f.write_str(" ")?;
            a.fmt_prec(f, true)?;
        }
        Ok(())
    }
}

/// `B1, ..., Bn => A`, universally closed.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct HornFormula {
    pub body: Vec<Atom>,
    pub head: Atom,
}

impl HornFormula {
    pub fn new(body: Vec<Atom>, head: Atom) -> HornFormula {
        HornFormula { body, head }
    }

    pub fn fact(head: Atom) -> HornFormula {
        HornFormula { body: Vec::new(), head }
    }

    /// Variables in order of first occurrence, head first.
    pub fn vars(&self) -> Vec<Name> {
        let mut out = self.head.vars();
        for b in &self.body {
            for a in &b.args {
                a.collect_vars(&mut out);
            }
        }
        out
    }

    /// Body variables that do not occur in the head.
    pub fn existential_vars(&self) -> Vec<Name> {
        let head = self.head.vars();
        let mut out = Vec::new();
        for b in &self.body {
            for x in b.vars() {
                if !head.contains(&x) && !out.contains(&x) {
                    out.push(x);
                }
            }
        }
        out
    }

    pub fn is_ground_fact(&self) -> bool {
        self.body.is_empty() && self.head.is_ground()
    }

    /// Renames variables to `v0, v1, ...` by first occurrence, so that two
    /// formulas are variants of each other iff their canonical forms agree.
    pub fn canonical(&self) -> HornFormula {
        let mut s = Substitution::new();
        for (i, x) in self.vars().into_iter().enumerate() {
            s.insert(x, Term::Var(name(&format!("v{i}"))));
        }
        s.apply(self)
    }

    pub fn is_variant_of(&self, other: &HornFormula) -> bool {
        self.canonical() == other.canonical()
    }
}

impl fmt::Display for HornFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.body.is_empty() {
            f.write_str("(")?;
            for (i, b) in self.body.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{b}")?;
            }
            f.write_str(") => ")?;
        }
        write!(f, "{}", self.head)
    }
}

/// Finite map from variables to terms.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct Substitution {
    map: BTreeMap<Name, Term>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn singleton(x: &str, t: Term) -> Substitution {
        let mut s = Substitution::new();
        s.insert(name(x), t);
        s
    }

    pub fn insert(&mut self, x: Name, t: Term) {
        self.map.insert(x, t);
    }

    pub fn get(&self, x: &str) -> Option<&Term> {
        self.map.get(x)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Term)> {
        self.map.iter()
    }

    /// True when every binding maps a variable to itself.
    pub fn is_identity(&self) -> bool {
        self.map.iter().all(|(x, t)| matches!(t, Term::Var(y) if y == x))
    }

    pub fn apply<T: Apply>(&self, target: &T) -> T {
        target.apply_subst(self)
    }

    /// `self ∘ first`: applying the result equals applying `first` then `self`.
    pub fn compose(&self, first: &Substitution) -> Substitution {
        let mut map: BTreeMap<Name, Term> = first.map.iter().map(|(x, t)| (x.clone(), self.apply(t))).collect();
        for (x, t) in &self.map {
            map.entry(x.clone()).or_insert_with(|| t.clone());
        }
        Substitution { map }
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, t)) in self.map.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x} -> {t}")?;
        }
        f.write_str("}")
    }
}

/// Simultaneous replacement of variables.
pub trait Apply {
    fn apply_subst(&self, s: &Substitution) -> Self;
}

impl Apply for Term {
    fn apply_subst(&self, s: &Substitution) -> Term {
        match self {
            Term::Var(x) => s.map.get(x).cloned().unwrap_or_else(|| self.clone()),
            Term::Const(_) => self.clone(),
            Term::App(f, a) => Term::app(f.apply_subst(s), a.apply_subst(s)),
        }
    }
}

impl Apply for Atom {
    fn apply_subst(&self, s: &Substitution) -> Atom {
        Atom { pred: self.pred.clone(), args: self.args.iter().map(|t| t.apply_subst(s)).collect() }
    }
}

impl Apply for HornFormula {
    fn apply_subst(&self, s: &Substitution) -> HornFormula {
        HornFormula { body: self.body.iter().map(|b| b.apply_subst(s)).collect(), head: self.head.apply_subst(s) }
    }
}

fn match_into(p: &Term, t: &Term, s: &mut Substitution) -> bool {
    match (p, t) {
        (Term::Var(x), _) => match s.map.get(x) {
            Some(bound) => bound == t,
            None => {
                s.map.insert(x.clone(), t.clone());
                true
            }
        },
        (Term::Const(a), Term::Const(b)) => a == b,
        (Term::App(pf, pa), Term::App(tf, ta)) => match_into(pf, tf, s) && match_into(pa, ta, s),
        _ => false,
    }
}

/// One-sided matching: the unique σ with `σ(pattern) = subject`.
///
/// Variables of the subject are rigid and only matched by pattern variables.
pub fn match_term(pattern: &Term, subject: &Term) -> Option<Substitution> {
    let mut s = Substitution::new();
    match_into(pattern, subject, &mut s).then_some(s)
}

pub fn match_atom(pattern: &Atom, subject: &Atom) -> Option<Substitution> {
    if pattern.pred != subject.pred || pattern.args.len() != subject.args.len() {
        return None;
    }
    let mut s = Substitution::new();
    for (p, t) in pattern.args.iter().zip(&subject.args) {
        if !match_into(p, t, &mut s) {
            return None;
        }
    }
    Some(s)
}

/// Occurrence counts per identifier.
pub type Multiset = BTreeMap<Name, usize>;

/// Σ(A): term-level constants with multiplicity. The predicate is excluded.
pub fn symbol_multiset(a: &Atom) -> Multiset {
    let (mut consts, mut vars) = (Multiset::new(), Multiset::new());
    for t in &a.args {
        t.count(&mut consts, &mut vars);
    }
    consts
}

/// FVar(A): variable occurrences with multiplicity.
pub fn var_multiset(a: &Atom) -> Multiset {
    let (mut consts, mut vars) = (Multiset::new(), Multiset::new());
    for t in &a.args {
        t.count(&mut consts, &mut vars);
    }
    vars
}

pub fn multiset_sum(a: &Multiset, b: &Multiset) -> Multiset {
    let mut out = a.clone();
    for (k, n) in b {
        *out.entry(k.clone()).or_insert(0) += n;
    }
    out
}

pub fn is_strict_submultiset(small: &Multiset, big: &Multiset) -> bool {
    small.iter().all(|(k, n)| big.get(k).copied().unwrap_or(0) >= *n) && small != big
}

/// Monotone counter for fresh identifiers within one engine run.
#[derive(Clone, Debug, Default)]
pub struct Fresh {
    next: usize,
}

impl Fresh {
    pub fn new() -> Fresh {
        Fresh::default()
    }

    pub fn starting_at(next: usize) -> Fresh {
        Fresh { next }
    }

    pub fn next_index(&mut self) -> usize {
        let n = self.next;
        self.next += 1;
        n
    }

    /// `prefix` followed by the next counter value not in `avoid`.
    pub fn name_avoiding(&mut self, prefix: &str, avoid: &BTreeSet<Name>) -> Name {
        loop {
            let n = name(&format!("{prefix}{}", self.next_index()));
            if !avoid.contains(&n) {
                return n;
            }
        }
    }
}
