//! Divergence analysis on resolution trees: Paterson's condition, critical
//! triples, closed subtrees, abstract trees and candidate lemmas.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::resolve::{
    build_tree_with, AxiomEnv, NodeLabel, NodeStatus, OverlapError, OverlapMode, Position, ResolutionTree, TreeBounds,
    TreeNode,
};
use crate::syntax::{
    anti_unify_all, is_strict_submultiset, multiset_sum, symbol_multiset, var_multiset, AntiUnifyError, Atom, Fresh,
    HornFormula, Name,
};

pub const DEFAULT_TREE_DEPTH: usize = 50;
pub const DEFAULT_TREE_NODES: usize = 10_000;
pub const DEFAULT_ABSTRACT_FUEL: usize = 1_000;

/// `κ^i : B_i ⇒ A`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Projection {
    pub clause: Name,
    pub index: u32,
    pub body_atom: Atom,
    pub head: Atom,
}

impl fmt::Display for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{} : {} => {}", self.clause, self.index, self.body_atom, self.head)
    }
}

/// Σ(B) ⊎ FVar(B) is a strict sub-multiset of Σ(A) ⊎ FVar(A).
pub fn paterson_holds(body: &Atom, head: &Atom) -> bool {
    let b = multiset_sum(&symbol_multiset(body), &var_multiset(body));
    let a = multiset_sum(&symbol_multiset(head), &var_multiset(head));
    is_strict_submultiset(&b, &a)
}

pub fn paterson_ok(p: &Projection) -> bool {
    paterson_holds(&p.body_atom, &p.head)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CriticalTriple {
    pub projection: Projection,
    pub upper: Position,
    pub lower: Position,
}

impl fmt::Display for CriticalTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.projection;
        write!(f, "<{}^{}, {}, {}>", p.clause, p.index, self.upper, self.lower)
    }
}

fn outgoing(tree: &ResolutionTree, p: &Position, i: u32) -> Option<Projection> {
    let e = tree.edge(p, i)?;
    Some(Projection { clause: e.clause.clone(), index: e.index, body_atom: e.body_atom.clone()?, head: e.head.clone() })
}

/// Pairs `w` above `v = (w·i)+v'` whose `i`-th edges carry the same
/// projection, failing Paterson's condition. Ordered breadth first by the
/// lower position, then by depth of the upper one.
pub fn find_critical_triples(tree: &ResolutionTree) -> Vec<CriticalTriple> {
    let mut out = Vec::new();
    for v in tree.bfs_positions() {
        for i in (1..).take_while(|&i| tree.get(&v.child(i)).is_some()) {
            let Some(edge) = tree.edge(&v, i).filter(|e| e.body_atom.is_some()) else { continue };
            let uppers: Vec<Position> = (0..v.depth())
                .filter(|&d| v.0[d] == i)
                .map(|d| Position(v.0[..d].to_vec()))
                .filter(|w| tree.edge(w, i).is_some_and(|q| q.clause == edge.clause && q.index == edge.index))
                .collect();
            if uppers.is_empty() {
                continue;
            }
            let proj = outgoing(tree, &v, i).expect("edge has a body atom");
            if paterson_ok(&proj) {
                continue;
            }
            for w in uppers {
                out.push(CriticalTriple { projection: proj.clone(), upper: w, lower: v.clone() });
            }
        }
    }
    out
}

/// Finite part of a tree below the shallowest upper position, cut at □ and
/// at critical lower positions. Positions are relative to that upper node.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ClosedSubtree {
    pub origin: Position,
    pub tree: ResolutionTree,
    pub critical_leaves: Vec<Position>,
    /// Triples with a different upper position, which play no part.
    pub ignored: Vec<CriticalTriple>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum NotClosed {
    NoCriticalTriple,
    Inconclusive(String),
}

impl fmt::Display for NotClosed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotClosed::NoCriticalTriple => f.write_str("no critical triple in the resolution tree"),
            NotClosed::Inconclusive(why) => f.write_str(why),
        }
    }
}

pub fn closed_subtree(tree: &ResolutionTree) -> Result<ClosedSubtree, NotClosed> {
    let triples = find_critical_triples(tree);
    let upper =
        triples.iter().map(|t| &t.upper).min_by(|a, b| a.bfs_cmp(b)).ok_or(NotClosed::NoCriticalTriple)?.clone();
    let lowers: BTreeSet<&Position> = triples.iter().filter(|t| t.upper == upper).map(|t| &t.lower).collect();
    let mut nodes = BTreeMap::new();
    let mut critical_leaves = Vec::new();
    let mut stack = alloc::vec![upper.clone()];
    while let Some(p) = stack.pop() {
        let node = tree.get(&p).expect("walk follows existing children");
        let rel = upper.relative(&p).expect("walk stays below the upper node");
        let mut kept = node.clone();
        if rel.depth() == 0 {
            kept.edge = None;
        }
        if lowers.contains(&p) {
            kept.status = NodeStatus::Critical;
            critical_leaves.push(rel.clone());
        } else {
            match node.status {
                NodeStatus::Expanded => {
                    let mut kids = tree.children(&p);
                    kids.reverse();
                    stack.extend(kids);
                }
                NodeStatus::Success => {}
                NodeStatus::Stuck => {
                    return Err(NotClosed::Inconclusive(alloc::format!(
                        "irreducible leaf `{}` at {p} below the loop",
                        node.atom().expect("stuck nodes are goals")
                    )))
                }
                NodeStatus::Unexpanded | NodeStatus::Critical => {
                    return Err(NotClosed::Inconclusive(alloc::format!(
                        "tree bound reached at {p} before the loop closed"
                    )))
                }
            }
        }
        nodes.insert(rel, kept);
    }
    critical_leaves.sort();
    let ignored = triples.into_iter().filter(|t| t.upper != upper).collect();
    Ok(ClosedSubtree { origin: upper, tree: ResolutionTree::from_nodes(nodes), critical_leaves, ignored })
}

/// Unfolding of the anti-unifier of a closed subtree's root and critical
/// leaves, left undefined below the critical positions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AbstractTree {
    pub tree: ResolutionTree,
    /// Critical positions that exist in the unfolding.
    pub critical: Vec<Position>,
    /// Root of the closed subtree the abstraction came from.
    pub source_goal: Atom,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AbstractError {
    AntiUnify(AntiUnifyError),
    Overlap(OverlapError),
    FuelExhausted,
}

impl fmt::Display for AbstractError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbstractError::AntiUnify(e) => write!(f, "{e}"),
            AbstractError::Overlap(e) => write!(f, "{e}"),
            AbstractError::FuelExhausted => f.write_str("abstract unfolding ran out of fuel"),
        }
    }
}

impl core::error::Error for AbstractError {}

pub fn abstract_representation(
    ct: &ClosedSubtree,
    env: &AxiomEnv,
    fresh: &mut Fresh,
    fuel: usize,
) -> Result<AbstractTree, AbstractError> {
    let mut atoms = alloc::vec![ct.tree.root_atom().clone()];
    for p in &ct.critical_leaves {
        atoms.push(ct.tree.get(p).and_then(TreeNode::atom).expect("critical leaves are goals").clone());
    }
    let root = anti_unify_all(&atoms, fresh).map_err(AbstractError::AntiUnify)?;
    let critical: BTreeSet<Position> = ct.critical_leaves.iter().cloned().collect();
    let bounds = TreeBounds { depth: usize::MAX, nodes: fuel };
    let stop = |p: &Position| critical.contains(p);
    let tree = build_tree_with(env, &root, bounds, OverlapMode::NewestFirst, &stop).map_err(AbstractError::Overlap)?;
    if tree.is_truncated() {
        return Err(AbstractError::FuelExhausted);
    }
    let critical = tree.iter().filter(|(_, n)| n.status == NodeStatus::Critical).map(|(p, _)| p.clone()).collect();
    Ok(AbstractTree { tree, critical, source_goal: atoms.swap_remove(0) })
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CandidateLemma {
    pub formula: HornFormula,
    pub source_goal: Atom,
    pub critical_positions: Vec<Position>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum NoCandidate {
    Existential(HornFormula),
}

impl fmt::Display for NoCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoCandidate::Existential(h) => write!(f, "candidate `{h}` has existential variables"),
        }
    }
}

/// Head: the abstract root. Body: every non-□ leaf that passes Paterson's
/// condition against the root, left to right, without repeats.
pub fn candidate_lemma(at: &AbstractTree) -> Result<CandidateLemma, NoCandidate> {
    let head = at.tree.root_atom();
    let mut body: Vec<Atom> = Vec::new();
    for (_, node) in at.tree.leaves() {
        if let NodeLabel::Goal(b) = &node.label {
            if paterson_holds(b, head) && !body.contains(b) {
                body.push(b.clone());
            }
        }
    }
    let formula = HornFormula::new(body, head.clone());
    if !formula.existential_vars().is_empty() {
        return Err(NoCandidate::Existential(formula));
    }
    Ok(CandidateLemma { formula, source_goal: at.source_goal.clone(), critical_positions: at.critical.clone() })
}
