//! Dependency trees over a sentence of `n` words plus an artificial root.
//!
//! Nodes are the token positions `0..=n`, with `0` reserved for the root.
//! A tree assigns every node `1..=n` exactly one head; the root has none.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// A node is a token position in the sentence; `0` is the artificial root.
pub type NodeId = usize;

/// A directed dependency arc `head -> dependent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arc {
    pub head: NodeId,
    pub dependent: NodeId,
}

impl Arc {
    pub fn new(head: NodeId, dependent: NodeId) -> Self {
        Arc { head, dependent }
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.head, self.dependent)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("a tree needs at least one word")]
    Empty,
    #[error("expected {expected} arcs for sentence length {expected}, got {got}")]
    WrongArcCount { expected: usize, got: usize },
    #[error("node {0} is out of range")]
    OutOfRange(NodeId),
    #[error("node {0} depends on itself")]
    SelfHead(NodeId),
    #[error("the root node cannot be a dependent")]
    RootAsDependent,
    #[error("node {0} has more than one head")]
    MultipleHeads(NodeId),
    #[error("the head assignment contains a cycle through node {0}")]
    Cyclic(NodeId),
}

/// An unlabeled dependency tree: a head for every node `1..=n`, rooted at `0`.
///
/// Stored as the head vector, which makes the single-head constraint
/// structural; construction checks range and acyclicity (acyclicity implies
/// connectivity to the root, since the root is the only headless node).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DependencyTree {
    heads: Vec<NodeId>,
}

impl DependencyTree {
    /// Builds a tree from the heads of nodes `1..=n`, in order.
    pub fn from_heads(heads: &[NodeId]) -> Result<Self, TreeError> {
        if heads.is_empty() {
            return Err(TreeError::Empty);
        }
        let n = heads.len();
        for (i, &h) in heads.iter().enumerate() {
            let node = i + 1;
            if h > n {
                return Err(TreeError::OutOfRange(h));
            }
            if h == node {
                return Err(TreeError::SelfHead(node));
            }
        }
        // Walk up from every node; a walk longer than n steps must repeat.
        for start in 1..=n {
            let mut node = start;
            let mut steps = 0;
            while node != 0 {
                node = heads[node - 1];
                steps += 1;
                if steps > n {
                    return Err(TreeError::Cyclic(start));
                }
            }
        }
        Ok(DependencyTree {
            heads: heads.to_vec(),
        })
    }

    /// Builds a tree from an explicit arc set over nodes `0..=n`.
    pub fn from_arcs(n: usize, arcs: &[Arc]) -> Result<Self, TreeError> {
        if n == 0 {
            return Err(TreeError::Empty);
        }
        if arcs.len() != n {
            return Err(TreeError::WrongArcCount {
                expected: n,
                got: arcs.len(),
            });
        }
        let mut heads: Vec<Option<NodeId>> = vec![None; n];
        for arc in arcs {
            if arc.dependent == 0 {
                return Err(TreeError::RootAsDependent);
            }
            if arc.dependent > n {
                return Err(TreeError::OutOfRange(arc.dependent));
            }
            if arc.head > n {
                return Err(TreeError::OutOfRange(arc.head));
            }
            if arc.head == arc.dependent {
                return Err(TreeError::SelfHead(arc.head));
            }
            let slot = &mut heads[arc.dependent - 1];
            if slot.is_some() {
                return Err(TreeError::MultipleHeads(arc.dependent));
            }
            *slot = Some(arc.head);
        }
        // n distinct dependents among n arcs: every node got exactly one head.
        let heads: Vec<NodeId> = heads.into_iter().map(|h| h.unwrap()).collect();
        Self::from_heads(&heads)
    }

    /// Sentence length (number of words, excluding the root).
    pub fn len(&self) -> usize {
        self.heads.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Head of `node`, which must be in `1..=n`.
    pub fn head_of(&self, node: NodeId) -> NodeId {
        self.heads[node - 1]
    }

    pub fn contains(&self, arc: Arc) -> bool {
        arc.dependent >= 1 && arc.dependent <= self.len() && self.head_of(arc.dependent) == arc.head
    }

    pub fn arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        self.heads
            .iter()
            .enumerate()
            .map(|(i, &h)| Arc::new(h, i + 1))
    }

    /// Arcs as a canonically ordered set, for exact comparisons and display.
    pub fn arc_set(&self) -> BTreeSet<Arc> {
        self.arcs().collect()
    }

    pub fn dependents_of(&self, head: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.heads
            .iter()
            .enumerate()
            .filter_map(move |(i, &h)| (h == head).then_some(i + 1))
    }

    /// Whether `node` lies in the subtree rooted at `ancestor`.
    pub fn is_descendant(&self, node: NodeId, ancestor: NodeId) -> bool {
        let mut current = node;
        loop {
            if current == ancestor {
                return true;
            }
            if current == 0 {
                return false;
            }
            current = self.head_of(current);
        }
    }

    /// A tree is projective when, for every arc, all nodes strictly between
    /// head and dependent in the sentence belong to the head's subtree.
    pub fn is_projective(&self) -> bool {
        self.arcs().all(|arc| {
            let lo = arc.head.min(arc.dependent);
            let hi = arc.head.max(arc.dependent);
            (lo + 1..hi).all(|between| self.is_descendant(between, arc.head))
        })
    }
}

impl fmt::Display for DependencyTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for arc in self.arc_set() {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{arc}")?;
            first = false;
        }
        Ok(())
    }
}

/// All dependency trees on `n` words, generated from head vectors.
///
/// Enumerates every assignment `head[i] in {0..=n} \ {i}` and keeps the
/// acyclic ones. This is independent of any parser and serves as the
/// ground-truth generator for completeness checks.
pub fn all_trees(n: usize) -> Vec<DependencyTree> {
    let mut out = Vec::new();
    let mut heads = vec![0; n];
    fn fill(heads: &mut Vec<NodeId>, node: usize, n: usize, out: &mut Vec<DependencyTree>) {
        if node > n {
            if let Ok(tree) = DependencyTree::from_heads(heads) {
                out.push(tree);
            }
            return;
        }
        for h in 0..=n {
            if h == node {
                continue;
            }
            heads[node - 1] = h;
            fill(heads, node + 1, n, out);
        }
    }
    if n >= 1 {
        fill(&mut heads, 1, n, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree(n: usize, arcs: &[(NodeId, NodeId)]) -> DependencyTree {
        let arcs: Vec<Arc> = arcs.iter().map(|&(h, d)| Arc::new(h, d)).collect();
        DependencyTree::from_arcs(n, &arcs).unwrap()
    }

    #[test]
    fn builds_from_arcs() {
        let t = tree(3, &[(0, 2), (2, 1), (2, 3)]);
        assert_eq!(t.head_of(1), 2);
        assert_eq!(t.head_of(2), 0);
        assert_eq!(t.head_of(3), 2);
        assert_eq!(t.dependents_of(2).collect::<Vec<_>>(), vec![1, 3]);
    }

    #[test]
    fn rejects_root_as_dependent() {
        let arcs = [Arc::new(1, 0)];
        assert_eq!(
            DependencyTree::from_arcs(1, &arcs),
            Err(TreeError::RootAsDependent)
        );
    }

    #[test]
    fn rejects_cycle() {
        // 1 and 2 point at each other; no path to the root.
        let arcs = [Arc::new(2, 1), Arc::new(1, 2)];
        assert!(matches!(
            DependencyTree::from_arcs(2, &arcs),
            Err(TreeError::Cyclic(_))
        ));
    }

    #[test]
    fn rejects_duplicate_head() {
        let arcs = [Arc::new(0, 1), Arc::new(2, 1)];
        assert_eq!(
            DependencyTree::from_arcs(2, &arcs),
            Err(TreeError::MultipleHeads(1))
        );
    }

    #[test]
    fn projectivity_examples() {
        assert!(tree(3, &[(0, 2), (2, 1), (2, 3)]).is_projective());
        assert!(tree(1, &[(0, 1)]).is_projective());
        // 1->3 spans node 2, which is not a descendant of 1.
        assert!(!tree(4, &[(0, 2), (2, 1), (1, 3), (2, 4)]).is_projective());
    }

    #[test]
    fn projectivity_matches_bruteforce_definition() {
        // Definition-level oracle: recompute descendant sets from scratch.
        fn descendants(t: &DependencyTree, h: NodeId) -> BTreeSet<NodeId> {
            let mut out = BTreeSet::new();
            let mut frontier = vec![h];
            while let Some(x) = frontier.pop() {
                for d in t.dependents_of(x) {
                    if out.insert(d) {
                        frontier.push(d);
                    }
                }
            }
            out.insert(h);
            out
        }
        fn projective_by_definition(t: &DependencyTree) -> bool {
            t.arcs().all(|arc| {
                let desc = descendants(t, arc.head);
                let lo = arc.head.min(arc.dependent);
                let hi = arc.head.max(arc.dependent);
                (lo + 1..hi).all(|between| desc.contains(&between))
            })
        }
        for n in 1..=5 {
            for t in all_trees(n) {
                assert_eq!(t.is_projective(), projective_by_definition(&t), "{t}");
            }
        }
    }

    #[test]
    fn all_trees_counts_follow_cayley() {
        // (n+1)^(n-1) rooted labeled trees on n+1 nodes.
        assert_eq!(all_trees(1).len(), 1);
        assert_eq!(all_trees(2).len(), 3);
        assert_eq!(all_trees(3).len(), 16);
        assert_eq!(all_trees(4).len(), 125);
        assert_eq!(all_trees(5).len(), 1296);
    }

    #[test]
    fn display_is_sorted() {
        let t = tree(3, &[(2, 3), (0, 2), (2, 1)]);
        assert_eq!(t.to_string(), "0->2 2->1 2->3");
    }
}
