//! Simple loops and the comparison of resolution traces with the unfolding
//! of corecursive evidence.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::reduce::next_redex;
use crate::resolve::{candidates, step, AxiomEnv, ClausePolicy, Dir, Fuel, MixedPath, MixedTerm, OutOfFuel};
use crate::syntax::{match_atom, Atom, Evidence, Substitution, Term};

/// A resolution trace of `goal` reaching `C[σ goal]` with every other atom
/// of `C` irreducible, where each such atom `D_i` resolves to `C_i[D_i]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SimpleLoop {
    pub goal: Atom,
    pub loop_state: MixedTerm,
    pub loop_position: MixedPath,
    pub sigma: Substitution,
    pub hypotheses: Vec<Atom>,
    /// `C_i`, with a hole wherever `D_i` reappears.
    pub hypothesis_contexts: Vec<MixedTerm>,
    /// Rewrites taken to reach `loop_state`.
    pub steps: usize,
}

fn reducible(env: &AxiomEnv, a: &Atom) -> bool {
    !candidates(env, a, false, ClausePolicy::NewestFirst).is_empty()
}

fn distinct_atoms(t: &MixedTerm) -> Vec<Atom> {
    let mut out: Vec<Atom> = Vec::new();
    for (_, _, a) in t.atoms() {
        if !out.contains(a) {
            out.push(a.clone());
        }
    }
    out
}

/// States larger than this many nodes end the search for a simple loop.
/// A simple loop closes after one unfolding, so its states stay small, and
/// the bound keeps each rewrite cheap when terms grow without repeating.
pub const LOOP_SEARCH_NODES: usize = 1 << 12;

fn term_nodes(t: &Term) -> usize {
    match t {
        Term::App(f, a) => term_nodes(f) + term_nodes(a),
        _ => 1,
    }
}

fn nodes(t: &MixedTerm) -> usize {
    match t {
        MixedTerm::Atom(a) => 1 + a.args.iter().map(term_nodes).sum::<usize>(),
        MixedTerm::App(f, a) => 1 + nodes(f) + nodes(a),
        MixedTerm::Lam(_, b) | MixedTerm::Mu(_, b) => 1 + nodes(b),
        _ => 1,
    }
}

/// Steps `t` to normal form. Gives up on fuel or once the state outgrows
/// `LOOP_SEARCH_NODES`.
fn normalise(env: &AxiomEnv, t: &MixedTerm, fuel: &mut Fuel) -> Option<MixedTerm> {
    let mut t = t.clone();
    while let Some(next) = step(env, &t, ClausePolicy::NewestFirst) {
        fuel.tick().ok()?;
        if nodes(&next) > LOOP_SEARCH_NODES {
            return None;
        }
        t = next;
    }
    Some(t)
}

/// Resolves `start` to normal form; `Some(C)` when the result is `C[d]`
/// with no other atom left.
fn self_context(env: &AxiomEnv, start: &Atom, d: &Atom, fuel: &mut Fuel) -> Option<MixedTerm> {
    let state = normalise(env, &MixedTerm::Atom(start.clone()), fuel)?;
    state.atoms().iter().all(|(_, _, a)| *a == d).then(|| state.hole_out(d))
}

/// First state of the trace of `goal` containing `σ goal` with every other
/// atom irreducible, and each of those `D_i` satisfying `σ D_i ~> C_i[D_i]`.
pub fn detect_simple_loop(env: &AxiomEnv, goal: &Atom, fuel: usize) -> Option<SimpleLoop> {
    let mut budget = Fuel::new(fuel);
    let mut state = MixedTerm::Atom(goal.clone());
    let mut steps = 0;
    loop {
        state = step(env, &state, ClausePolicy::NewestFirst)?;
        budget.tick().ok()?;
        steps += 1;
        if nodes(&state) > LOOP_SEARCH_NODES {
            return None;
        }
        let atoms = state.atoms();
        let live: Vec<usize> = (0..atoms.len()).filter(|&i| reducible(env, atoms[i].2)).collect();
        if live.len() > 1 {
            continue;
        }
        for (i, (path, _, atom)) in atoms.iter().enumerate() {
            if live.first().is_some_and(|&j| j != i) {
                continue;
            }
            let Some(sigma) = match_atom(goal, atom) else { continue };
            let hypotheses = distinct_atoms(&state.replace(path, MixedTerm::Hole));
            let contexts: Option<Vec<MixedTerm>> =
                hypotheses.iter().map(|d| self_context(env, &sigma.apply(d), d, &mut budget)).collect();
            if let Some(contexts) = contexts {
                return Some(SimpleLoop {
                    goal: goal.clone(),
                    loop_state: state.clone(),
                    loop_position: path.clone(),
                    sigma,
                    hypotheses,
                    hypothesis_contexts: contexts,
                    steps,
                });
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ObservationKind {
    Observational,
    Corecursive,
}

/// A trace state with its focused subterm cut out.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ObservationRecord {
    pub kind: ObservationKind,
    pub index: usize,
    pub context: MixedTerm,
    pub focus: MixedTerm,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ObsError {
    FuelExhausted,
    /// The trace reached a normal form before `n` points were seen.
    Terminated {
        seen: usize,
    },
}

impl fmt::Display for ObsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObsError::FuelExhausted => f.write_str("fuel exhausted while tracing"),
            ObsError::Terminated { seen } => write!(f, "trace terminated after {seen} points"),
        }
    }
}

impl core::error::Error for ObsError {}

impl From<OutOfFuel> for ObsError {
    fn from(_: OutOfFuel) -> ObsError {
        ObsError::FuelExhausted
    }
}

/// States of the resolution trace just before `σ^m goal` is rewritten, for
/// `m = 1..=n`, with that atom replaced by a hole.
pub fn observational_points(
    env: &AxiomEnv,
    lp: &SimpleLoop,
    n: usize,
    fuel: &mut Fuel,
) -> Result<Vec<ObservationRecord>, ObsError> {
    let mut out = Vec::new();
    let mut target = lp.sigma.apply(&lp.goal);
    // The goal itself is point 0, even when `σ` is the identity.
    let mut state = step(env, &MixedTerm::Atom(lp.goal.clone()), ClausePolicy::NewestFirst)
        .ok_or(ObsError::Terminated { seen: 0 })?;
    fuel.tick()?;
    while out.len() < n {
        let next = state
            .atoms()
            .into_iter()
            .find(|(_, g, a)| !candidates(env, a, *g, ClausePolicy::NewestFirst).is_empty())
            .map(|(p, _, a)| (p, a.clone()));
        let Some((path, atom)) = next else {
            return Err(ObsError::Terminated { seen: out.len() });
        };
        if atom == target {
            out.push(ObservationRecord {
                kind: ObservationKind::Observational,
                index: out.len() + 1,
                context: state.replace(&path, MixedTerm::Hole),
                focus: MixedTerm::Atom(atom),
            });
            target = lp.sigma.apply(&target);
            if out.len() == n {
                break;
            }
        }
        fuel.tick()?;
        state = step(env, &state, ClausePolicy::NewestFirst).expect("an atom was reducible");
    }
    Ok(out)
}

/// States of the reduction of `e D̄` whose next redex is a μ, with the whole
/// application spine headed by that μ replaced by a hole. The start state is
/// point 0; points `1..=n` are returned.
pub fn corecursive_points(
    e: &Evidence,
    hyps: &[Atom],
    n: usize,
    fuel: &mut Fuel,
) -> Result<Vec<ObservationRecord>, ObsError> {
    let mut out = Vec::new();
    let mut state = MixedTerm::apps(e.into(), hyps.iter().map(|a| MixedTerm::Atom(a.clone())));
    let mut seen = 0;
    while out.len() < n {
        let Some(path) = next_redex(&state) else {
            return Err(ObsError::Terminated { seen: out.len() });
        };
        if matches!(state.get(&path), Some(MixedTerm::Mu(..))) {
            let mut spine = path.clone();
            while spine.last() == Some(&Dir::Fun) {
                spine.pop();
            }
            if seen > 0 {
                out.push(ObservationRecord {
                    kind: ObservationKind::Corecursive,
                    index: seen,
                    context: state.replace(&spine, MixedTerm::Hole),
                    focus: state.get(&spine).expect("prefix of a valid path").clone(),
                });
            }
            seen += 1;
            if out.len() == n {
                break;
            }
        }
        fuel.tick()?;
        state = super::ev_step(&state).expect("a redex exists");
    }
    Ok(out)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Divergence {
    pub index: usize,
    pub observational: Option<ObservationRecord>,
    pub corecursive: Option<ObservationRecord>,
    pub reason: String,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ObsVerdict {
    pub observational: Vec<ObservationRecord>,
    pub corecursive: Vec<ObservationRecord>,
    pub divergence: Option<Divergence>,
}

impl ObsVerdict {
    pub fn equivalent(&self) -> bool {
        self.divergence.is_none()
    }
}

/// `C^m[d]`, filling every hole of `c` at each level.
fn iterate_context(c: &MixedTerm, d: &Atom, m: usize) -> MixedTerm {
    let mut t = MixedTerm::Atom(d.clone());
    for _ in 0..m {
        t = c.fill(&t);
    }
    t
}

/// `t` with its atoms resolved to normal form. An atom `σ^k D_i` left
/// behind the loop atom becomes `C_i^k[D_i]`, as it is in evidence.
fn resolved_context(env: &AxiomEnv, t: &MixedTerm, fuel: &mut Fuel) -> Option<MixedTerm> {
    normalise(env, t, fuel)
}

/// Compares the first `n` observational and corecursive points. Contexts
/// must coincide once the observational one is resolved, and the arguments
/// of the `m`-th μ-application must be `C_i^m[D_i]`.
pub fn check_obs_equiv(env: &AxiomEnv, lp: &SimpleLoop, e: &Evidence, n: usize, fuel: usize) -> ObsVerdict {
    let obs = observational_points(env, lp, n, &mut Fuel::new(fuel));
    let cor = corecursive_points(e, &lp.hypotheses, n, &mut Fuel::new(fuel));
    let (obs_ok, obs_err) = match obs {
        Ok(v) => (v, None),
        Err(err) => (Vec::new(), Some(err)),
    };
    let (cor_ok, cor_err) = match cor {
        Ok(v) => (v, None),
        Err(err) => (Vec::new(), Some(err)),
    };
    let mut divergence = None;
    for m in 1..=n {
        let (o, c) = (obs_ok.get(m - 1), cor_ok.get(m - 1));
        let reason = match (o, c) {
            (Some(o), Some(c)) => {
                let resolved = resolved_context(env, &o.context, &mut Fuel::new(fuel));
                if resolved.as_ref() != Some(&c.context) {
                    Some(String::from("contexts differ"))
                } else {
                    let (_, args) = c.focus.spine();
                    let expected: Vec<MixedTerm> = lp
                        .hypotheses
                        .iter()
                        .zip(&lp.hypothesis_contexts)
                        .map(|(d, ctx)| iterate_context(ctx, d, m))
                        .collect();
                    let same = args.len() == expected.len() && args.iter().zip(&expected).all(|(a, b)| *a == b);
                    (!same).then(|| String::from("hypothesis arguments differ from their resolution contexts"))
                }
            }
            _ => {
                let err = obs_err.as_ref().or(cor_err.as_ref());
                Some(match err {
                    Some(e) => alloc::format!("missing point: {e}"),
                    None => String::from("missing point"),
                })
            }
        };
        if let Some(reason) = reason {
            divergence = Some(Divergence { index: m, observational: o.cloned(), corecursive: c.cloned(), reason });
            break;
        }
    }
    ObsVerdict { observational: obs_ok, corecursive: cor_ok, divergence }
}
