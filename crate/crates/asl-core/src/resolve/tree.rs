//! Position-indexed resolution trees.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec::Vec;
use core::fmt;

use super::{candidates, AxiomEnv, ClausePolicy};
use crate::syntax::{Atom, Name};

/// Sequence of positive child indices; the empty sequence is the root.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Position(pub Vec<u32>);

impl Position {
    pub fn root() -> Position {
        Position(Vec::new())
    }

    pub fn child(&self, i: u32) -> Position {
        let mut v = self.0.clone();
        v.push(i);
        Position(v)
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn parent(&self) -> Option<Position> {
        let (_, init) = self.0.split_last()?;
        Some(Position(init.to_vec()))
    }

    /// `self` is `other` or an ancestor of it.
    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn is_strictly_above(&self, other: &Position) -> bool {
        self.depth() < other.depth() && self.is_prefix_of(other)
    }

    /// `other` expressed relative to `self`, when `self` is a prefix of it.
    pub fn relative(&self, other: &Position) -> Option<Position> {
        other.0.strip_prefix(&self.0[..]).map(|r| Position(r.to_vec()))
    }

    pub fn join(&self, rest: &Position) -> Position {
        let mut v = self.0.clone();
        v.extend_from_slice(&rest.0);
        Position(v)
    }

    /// Breadth-first order: shallower first, then left to right.
    pub fn bfs_cmp(&self, other: &Position) -> core::cmp::Ordering {
        self.depth().cmp(&other.depth()).then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(".")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum NodeLabel {
    Goal(Atom),
    /// □, below an empty-body clause.
    Success,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum NodeStatus {
    Expanded,
    Success,
    /// No clause head matches.
    Stuck,
    /// Left unexpanded by a depth or node bound.
    Unexpanded,
    /// Left unexpanded on purpose, as the lower end of a critical triple.
    Critical,
}

/// Label of the edge into a node: clause `κ` and projection index `i`. The
/// clause's declared body atom and head are kept for the Paterson check.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TreeEdge {
    pub clause: Name,
    pub index: u32,
    /// `None` on the single edge to □.
    pub body_atom: Option<Atom>,
    pub head: Atom,
}

impl fmt::Display for TreeEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.body_atom {
            Some(_) => write!(f, "{}^{}", self.clause, self.index),
            None => write!(f, "{}", self.clause),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TreeNode {
    pub label: NodeLabel,
    pub status: NodeStatus,
    pub edge: Option<TreeEdge>,
}

impl TreeNode {
    pub fn atom(&self) -> Option<&Atom> {
        match &self.label {
            NodeLabel::Goal(a) => Some(a),
            NodeLabel::Success => None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.status != NodeStatus::Expanded
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ResolutionTree {
    nodes: BTreeMap<Position, TreeNode>,
}

impl ResolutionTree {
    pub fn from_nodes(nodes: BTreeMap<Position, TreeNode>) -> ResolutionTree {
        ResolutionTree { nodes }
    }

    pub fn root(&self) -> &TreeNode {
        &self.nodes[&Position::root()]
    }

    pub fn root_atom(&self) -> &Atom {
        self.root().atom().expect("the root is a goal")
    }

    pub fn get(&self, p: &Position) -> Option<&TreeNode> {
        self.nodes.get(p)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes in depth-first, left-to-right order.
    pub fn iter(&self) -> impl Iterator<Item = (&Position, &TreeNode)> {
        self.nodes.iter()
    }

    pub fn bfs_positions(&self) -> Vec<Position> {
        let mut ps: Vec<Position> = self.nodes.keys().cloned().collect();
        ps.sort_by(Position::bfs_cmp);
        ps
    }

    /// Label of the edge from `p` to its `i`-th child.
    pub fn edge(&self, p: &Position, i: u32) -> Option<&TreeEdge> {
        self.nodes.get(&p.child(i))?.edge.as_ref()
    }

    pub fn children(&self, p: &Position) -> Vec<Position> {
        (1..).map(|i| p.child(i)).take_while(|c| self.nodes.contains_key(c)).collect()
    }

    pub fn leaves(&self) -> impl Iterator<Item = (&Position, &TreeNode)> {
        self.nodes.iter().filter(|(_, n)| n.is_leaf())
    }

    pub fn is_truncated(&self) -> bool {
        self.nodes.values().any(|n| n.status == NodeStatus::Unexpanded)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OverlapError {
    pub goal: Atom,
    pub clauses: Vec<Name>,
}

impl fmt::Display for OverlapError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "overlapping clauses for `{}`:", self.goal)?;
        for c in &self.clauses {
            write!(f, " {c}")?;
        }
        Ok(())
    }
}

impl core::error::Error for OverlapError {}

/// What to do when several clause heads match one node.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OverlapMode {
    Error,
    /// Take the newest matching entry, as resolution does.
    NewestFirst,
}

/// Limits for [`build_tree_with`]. Nodes at `depth` are not expanded, and
/// expansion stops once the tree would exceed `nodes`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct TreeBounds {
    pub depth: usize,
    pub nodes: usize,
}

/// Resolution tree of `goal`, expanded breadth first. Two or more matching
/// heads at one node are an error.
pub fn build_tree(
    env: &AxiomEnv,
    goal: &Atom,
    depth_bound: usize,
    node_bound: usize,
) -> Result<ResolutionTree, OverlapError> {
    let bounds = TreeBounds { depth: depth_bound, nodes: node_bound };
    build_tree_with(env, goal, bounds, OverlapMode::Error, &|_| false)
}

/// As [`build_tree`], with an overlap policy and a set of positions that are
/// left unexpanded and marked critical.
pub fn build_tree_with(
    env: &AxiomEnv,
    goal: &Atom,
    bounds: TreeBounds,
    overlap: OverlapMode,
    stop: &dyn Fn(&Position) -> bool,
) -> Result<ResolutionTree, OverlapError> {
    let mut nodes = BTreeMap::new();
    let root = Position::root();
    nodes.insert(
        root.clone(),
        TreeNode { label: NodeLabel::Goal(goal.clone()), status: NodeStatus::Unexpanded, edge: None },
    );
    let mut queue = VecDeque::from([root]);
    while let Some(pos) = queue.pop_front() {
        let atom = nodes[&pos].atom().expect("queued nodes are goals").clone();
        let status = if stop(&pos) {
            NodeStatus::Critical
        } else {
            let cands = candidates(env, &atom, false, ClausePolicy::NewestFirst);
            if cands.len() > 1 && overlap == OverlapMode::Error {
                let clauses = cands.iter().rev().map(|(i, _)| env.entries()[*i].name.clone()).collect();
                return Err(OverlapError { goal: atom, clauses });
            }
            match cands.into_iter().next() {
                None => NodeStatus::Stuck,
                Some((i, sigma)) => {
                    let entry = &env.entries()[i];
                    let width = entry.formula.body.len().max(1);
                    if pos.depth() >= bounds.depth || nodes.len() + width > bounds.nodes {
                        NodeStatus::Unexpanded
                    } else {
                        let head = entry.formula.head.clone();
                        if entry.formula.body.is_empty() {
                            let edge =
                                TreeEdge { clause: entry.name.clone(), index: 1, body_atom: None, head: head.clone() };
                            let node =
                                TreeNode { label: NodeLabel::Success, status: NodeStatus::Success, edge: Some(edge) };
                            nodes.insert(pos.child(1), node);
                        }
                        for (k, b) in entry.formula.body.iter().enumerate() {
                            let child = pos.child(k as u32 + 1);
                            let edge = TreeEdge {
                                clause: entry.name.clone(),
                                index: k as u32 + 1,
                                body_atom: Some(b.clone()),
                                head: head.clone(),
                            };
                            let node = TreeNode {
                                label: NodeLabel::Goal(sigma.apply(b)),
                                status: NodeStatus::Unexpanded,
                                edge: Some(edge),
                            };
                            nodes.insert(child.clone(), node);
                            queue.push_back(child);
                        }
                        NodeStatus::Expanded
                    }
                }
            }
        };
        nodes.get_mut(&pos).expect("present").status = status;
    }
    Ok(ResolutionTree { nodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resolve::tests::pair_env;
    use crate::syntax::{name, HornFormula, Term};

    #[test]
    fn fact_has_single_success_child() {
        let env = pair_env();
        let t = build_tree(&env, &Atom::new("Eq", [Term::cons("Int")]), 10, 100).unwrap();
        assert_eq!(t.len(), 2);
        let leaf = t.get(&Position(alloc::vec![1])).unwrap();
        assert_eq!(leaf.label, NodeLabel::Success);
        assert_eq!(t.edge(&Position::root(), 1).unwrap().clause, name("KInt"));
        assert!(!t.is_truncated());
    }

    #[test]
    fn children_count_matches_body() {
        let env = pair_env();
        let int = Term::cons("Int");
        let t = build_tree(&env, &Atom::new("Eq", [Term::pair(int.clone(), int)]), 10, 100).unwrap();
        assert_eq!(t.children(&Position::root()).len(), 2);
        assert_eq!(t.len(), 5);
    }

    #[test]
    fn overlap_is_an_error() {
        let mut env = pair_env();
        env.push_axiom(name("KAny"), HornFormula::fact(Atom::new("Eq", [Term::var("z")]))).unwrap();
        let err = build_tree(&env, &Atom::new("Eq", [Term::cons("Int")]), 10, 100).unwrap_err();
        assert_eq!(err.clauses, [name("KInt"), name("KAny")]);
    }

    #[test]
    fn positions() {
        let p = Position(alloc::vec![1, 2]);
        assert!(Position::root().is_strictly_above(&p));
        assert!(p.is_prefix_of(&p) && !p.is_strictly_above(&p));
        assert_eq!(Position(alloc::vec![1]).relative(&p), Some(Position(alloc::vec![2])));
        assert_eq!(alloc::format!("{p} {}", Position::root()), "1.2 ε");
    }
}
