//! Evidence terms: axiom constants, variables, application, λ and μ.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use super::{name, Name};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Evidence {
    /// Constant naming an environment entry (axiom or proven lemma).
    Axiom(Name),
    Var(Name),
    App(Box<Evidence>, Box<Evidence>),
    Lam(Name, Box<Evidence>),
    Mu(Name, Box<Evidence>),
}

impl Evidence {
    pub fn axiom(s: &str) -> Evidence {
        Evidence::Axiom(name(s))
    }

    pub fn var(s: &str) -> Evidence {
        Evidence::Var(name(s))
    }

    pub fn app(f: Evidence, a: Evidence) -> Evidence {
        Evidence::App(Box::new(f), Box::new(a))
    }

    pub fn apps(head: Evidence, args: impl IntoIterator<Item = Evidence>) -> Evidence {
        args.into_iter().fold(head, Evidence::app)
    }

    pub fn lam(x: &str, body: Evidence) -> Evidence {
        Evidence::Lam(name(x), Box::new(body))
    }

    /// Nested λ over `binders`, outermost first.
    pub fn lams(binders: &[Name], body: Evidence) -> Evidence {
        binders.iter().rev().fold(body, |b, x| Evidence::Lam(x.clone(), Box::new(b)))
    }

    pub fn mu(x: &str, body: Evidence) -> Evidence {
        Evidence::Mu(name(x), Box::new(body))
    }

    pub fn spine(&self) -> (&Evidence, Vec<&Evidence>) {
        let mut args = Vec::new();
        let mut e = self;
        while let Evidence::App(f, a) = e {
            args.push(&**a);
            e = f;
        }
        args.reverse();
        (e, args)
    }

    /// Leading λ binders and the body beneath them.
    pub fn strip_lams(&self) -> (Vec<Name>, &Evidence) {
        let mut xs = Vec::new();
        let mut e = self;
        while let Evidence::Lam(x, b) = e {
            xs.push(x.clone());
            e = b;
        }
        (xs, e)
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Evidence::Axiom(_) => {}
            Evidence::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Evidence::App(f, a) => {
                f.collect_free(bound, out);
                a.collect_free(bound, out);
            }
            Evidence::Lam(x, b) | Evidence::Mu(x, b) => {
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn occurs_free(&self, x: &str) -> bool {
        match self {
            Evidence::Axiom(_) => false,
            Evidence::Var(y) => &**y == x,
            Evidence::App(f, a) => f.occurs_free(x) || a.occurs_free(x),
            Evidence::Lam(y, b) | Evidence::Mu(y, b) => &**y != x && b.occurs_free(x),
        }
    }

    pub fn constants(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Evidence::Axiom(k) = e {
                out.insert(k.clone());
            }
        });
        out
    }

    fn visit(&self, f: &mut impl FnMut(&Evidence)) {
        f(self);
        match self {
            Evidence::App(g, a) => {
                g.visit(f);
                a.visit(f);
            }
            Evidence::Lam(_, b) | Evidence::Mu(_, b) => b.visit(f),
            _ => {}
        }
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Capture-avoiding `[r/x]self`.
    pub fn subst(&self, x: &str, r: &Evidence) -> Evidence {
        match self {
            Evidence::Axiom(_) => self.clone(),
            Evidence::Var(y) => {
                if &**y == x {
                    r.clone()
                } else {
                    self.clone()
                }
            }
            Evidence::App(f, a) => Evidence::app(f.subst(x, r), a.subst(x, r)),
            Evidence::Lam(y, b) | Evidence::Mu(y, b) => {
                if &**y == x || !b.occurs_free(x) {
                    return self.clone();
                }
                let rfree = r.free_vars();
                let (y, b) = if rfree.contains(y) {
                    let mut taken = rfree;
                    taken.extend(b.free_vars());
                    taken.insert(name(x));
                    let mut fresh = y.clone();
                    while taken.contains(&fresh) {
                        fresh = name(&format!("{fresh}'"));
                    }
                    let renamed = b.subst(y, &Evidence::Var(fresh.clone()));
                    (fresh, renamed)
                } else {
                    (y.clone(), (**b).clone())
                };
                let body = Box::new(b.subst(x, r));
                match self {
                    Evidence::Lam(..) => Evidence::Lam(y, body),
                    _ => Evidence::Mu(y, body),
                }
            }
        }
    }

    /// Replaces axiom constants through `f`, leaving the rest untouched.
    pub fn map_constants(&self, f: &impl Fn(&Name) -> Evidence) -> Evidence {
        match self {
            Evidence::Axiom(k) => f(k),
            Evidence::Var(_) => self.clone(),
            Evidence::App(g, a) => Evidence::app(g.map_constants(f), a.map_constants(f)),
            Evidence::Lam(x, b) => Evidence::Lam(x.clone(), Box::new(b.map_constants(f))),
            Evidence::Mu(x, b) => Evidence::Mu(x.clone(), Box::new(b.map_constants(f))),
        }
    }

    /// For `μα.e` defined under `label`, the body with α written as `label`.
    /// Other terms are returned unchanged.
    pub fn named_recursion(&self, label: &str) -> Evidence {
        match self {
            Evidence::Mu(x, b) => b.subst(x, &Evidence::axiom(label)),
            _ => self.clone(),
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, as_arg: bool, as_head: bool) -> fmt::Result {
        match self {
            Evidence::Axiom(k) | Evidence::Var(k) => f.write_str(k),
            Evidence::App(..) => {
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
            Evidence::Lam(..) | Evidence::Mu(..) => {
                let wrap = as_arg || as_head;
                if wrap {
                    f.write_str("(")?;
                }
                let body = match self {
                    Evidence::Lam(..) => {
                        let (xs, body) = self.strip_lams();
                        f.write_str("\\")?;
                        for x in &xs {
                            write!(f, " {x}")?;
                        }
                        body
                    }
                    Evidence::Mu(x, body) => {
                        write!(f, "mu {x}")?;
                        &**body
                    }
                    _ => unreachable!(),
                };
                f.write_str(" . ")?;
                body.fmt_prec(f, false, false)?;
                if wrap {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, false, false)
    }
}

/// Equality up to consistent renaming of λ and μ binders.
pub fn alpha_equal(e1: &Evidence, e2: &Evidence) -> bool {
    fn go(a: &Evidence, b: &Evidence, env: &mut Vec<(Name, Name)>) -> bool {
        match (a, b) {
            (Evidence::Axiom(x), Evidence::Axiom(y)) => x == y,
            (Evidence::Var(x), Evidence::Var(y)) => {
                let lx = env.iter().rposition(|(l, _)| l == x);
                let ry = env.iter().rposition(|(_, r)| r == y);
                match (lx, ry) {
                    (Some(i), Some(j)) => i == j,
                    (None, None) => x == y,
                    _ => false,
                }
            }
            (Evidence::App(f1, a1), Evidence::App(f2, a2)) => go(f1, f2, env) && go(a1, a2, env),
            (Evidence::Lam(x, b1), Evidence::Lam(y, b2)) | (Evidence::Mu(x, b1), Evidence::Mu(y, b2)) => {
                env.push((x.clone(), y.clone()));
                let ok = go(b1, b2, env);
                env.pop();
                ok
            }
            _ => false,
        }
    }
    go(e1, e2, &mut Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(s: &str) -> Evidence {
        Evidence::axiom(s)
    }
    fn v(s: &str) -> Evidence {
        Evidence::var(s)
    }

    #[test]
    fn alpha_renaming() {
        let a = Evidence::mu("a", Evidence::lam("b", Evidence::app(k("K"), Evidence::app(v("a"), v("b")))));
        let b = Evidence::mu("c", Evidence::lam("d", Evidence::app(k("K"), Evidence::app(v("c"), v("d")))));
        assert!(alpha_equal(&a, &b));
        assert!(!alpha_equal(&Evidence::app(k("K1"), k("K2")), &Evidence::app(k("K2"), k("K1"))));
        let ab1 = Evidence::mu("a", Evidence::app(k("KA"), Evidence::app(k("KB"), v("a"))));
        let ab2 = Evidence::mu("b", Evidence::app(k("KA"), Evidence::app(k("KB"), v("b"))));
        assert!(alpha_equal(&ab1, &ab2));
    }

    #[test]
    fn alpha_distinguishes_binding_structure() {
        let a = Evidence::lam("x", Evidence::lam("y", v("x")));
        let b = Evidence::lam("x", Evidence::lam("y", v("y")));
        assert!(!alpha_equal(&a, &b));
        assert!(!alpha_equal(&Evidence::lam("x", v("x")), &Evidence::lam("x", v("z"))));
        assert!(!alpha_equal(&Evidence::lam("x", v("x")), &Evidence::mu("x", v("x"))));
    }

    #[test]
    fn render() {
        let e = Evidence::lam("b0", Evidence::app(k("Ax0"), Evidence::apps(k("Ax1"), [v("b0"), v("x")])));
        assert_eq!(e.to_string(), "\\ b0 . Ax0 (Ax1 b0 x)");
        let r = Evidence::app(Evidence::lam("a", Evidence::app(k("K"), v("a"))), k("J"));
        assert_eq!(r.to_string(), "(\\ a . K a) J");
        assert_eq!(Evidence::mu("a", Evidence::app(k("K"), v("a"))).to_string(), "mu a . K a");
    }

    #[test]
    fn named_recursion_renders_self_reference() {
        let body = Evidence::lam(
            "b0",
            Evidence::app(
                k("Ax0"),
                Evidence::apps(k("Ax1"), [v("b0"), Evidence::app(v("r"), Evidence::app(v("r"), v("b0")))]),
            ),
        );
        let e = Evidence::Mu(name("r"), Box::new(body));
        assert_eq!(e.named_recursion("genLemm4").to_string(), "\\ b0 . Ax0 (Ax1 b0 (genLemm4 (genLemm4 b0)))");
    }

    #[test]
    fn substitution_avoids_capture() {
        let e = Evidence::lam("y", Evidence::app(v("x"), v("y")));
        let r = e.subst("x", &v("y"));
        let expected = Evidence::lam("z", Evidence::app(v("y"), v("z")));
        assert!(alpha_equal(&r, &expected));
        assert!(r.free_vars().contains("y"));
        let shadow = Evidence::lam("x", v("x"));
        assert_eq!(shadow.subst("x", &k("K")), shadow);
    }
}
