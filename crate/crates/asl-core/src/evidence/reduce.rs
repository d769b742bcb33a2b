//! Weak-head reduction of evidence and outermost reduction of mixed terms.

use alloc::vec::Vec;

use crate::resolve::{Dir, Fuel, MixedPath, MixedTerm, OutOfFuel};
use crate::syntax::Evidence;

/// Unfolds μ and contracts β at the head until the term is `κ ē`, `α ē` or
/// an unapplied λ.
pub fn whnf(e: &Evidence, fuel: &mut Fuel) -> Result<Evidence, OutOfFuel> {
    let mut cur = e.clone();
    loop {
        let (head, args) = cur.spine();
        let next = match head {
            Evidence::Mu(x, body) => Evidence::apps(body.subst(x, head), args.into_iter().cloned()),
            Evidence::Lam(x, body) if !args.is_empty() => {
                let reduced = body.subst(x, args[0]);
                Evidence::apps(reduced, args[1..].iter().map(|a| (*a).clone()))
            }
            _ => return Ok(cur),
        };
        fuel.tick()?;
        cur = next;
    }
}

fn is_redex(t: &MixedTerm) -> bool {
    match t {
        MixedTerm::Mu(..) => true,
        MixedTerm::App(f, _) => matches!(**f, MixedTerm::Lam(..)),
        _ => false,
    }
}

/// Path to the leftmost outermost redex, looking through applications only.
pub fn next_redex(t: &MixedTerm) -> Option<MixedPath> {
    fn go(t: &MixedTerm, path: &mut MixedPath) -> bool {
        if is_redex(t) {
            return true;
        }
        if let MixedTerm::App(f, a) = t {
            path.push(Dir::Fun);
            if go(f, path) {
                return true;
            }
            path.pop();
            path.push(Dir::Arg);
            if go(a, path) {
                return true;
            }
            path.pop();
        }
        false
    }
    let mut path = Vec::new();
    go(t, &mut path).then_some(path)
}

fn contract(t: &MixedTerm) -> MixedTerm {
    match t {
        MixedTerm::Mu(x, body) => body.subst(x, t),
        MixedTerm::App(f, a) => match &**f {
            MixedTerm::Lam(x, body) => body.subst(x, a),
            _ => unreachable!("not a redex"),
        },
        _ => unreachable!("not a redex"),
    }
}

/// One μ-unfolding or β-step at the leftmost outermost redex. Atoms are
/// inert values.
pub fn ev_step(state: &MixedTerm) -> Option<MixedTerm> {
    let path = next_redex(state)?;
    let redex = state.get(&path).expect("path from next_redex");
    Some(state.replace(&path, contract(redex)))
}
