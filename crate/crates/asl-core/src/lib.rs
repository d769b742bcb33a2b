//! Proof-relevant term-matching resolution for Horn clauses.
//!
//! Goals are resolved into evidence terms. When resolution diverges the
//! engine looks for a loop in the resolution tree, generalises it into a
//! candidate lemma and tries to prove that lemma corecursively, yielding
//! fixed-point evidence that is then type checked.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod corec;
pub mod evidence;
pub mod loopdetect;
pub mod resolve;
pub mod syntax;

pub use corec::{auto, hnf, prove_horn, wf_check, AutoOutcome, AutoReport, LemmaNamer, ProofConfig, ProofError};
pub use evidence::{type_check, whnf, TypeError, TypingContext};
pub use resolve::{resolve, step, trace, AxiomEnv, ClausePolicy, EntryKind, Fuel, MixedTerm, ResolveError};
pub use syntax::{
    alpha_equal, anti_unify, anti_unify_all, match_atom, Atom, Evidence, HornFormula, Name, Substitution, Term,
};
