//! Parser configurations and the mechanics of applying transitions.
//!
//! A configuration is the classic stack/buffer/arc-set triple. The buffer is
//! always the contiguous suffix of unshifted tokens, so it is stored as its
//! first index. Configurations are immutable; `apply` returns a new value.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::system::{ReductionTemplate, SystemSpec};
use crate::tree::{Arc, DependencyTree, NodeId};

/// A parser action: shift the next token, or reduce with a template.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Transition {
    Shift,
    Reduce(ReductionTemplate),
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transition::Shift => write!(f, "sh"),
            Transition::Reduce(t) => write!(f, "{t}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("a sentence needs at least one word")]
    EmptySentence,
    #[error("cannot shift from an empty buffer")]
    EmptyBuffer,
    #[error("reduction needs {needed} stack symbols, the stack has {have}")]
    StackTooShallow { needed: usize, have: usize },
    #[error("the root node cannot become a dependent")]
    RootWouldBeDependent,
    #[error("transition {0} is not in the system")]
    TemplateNotInSystem(ReductionTemplate),
}

/// Stack, buffer suffix, and arc set for a sentence of `n` words.
///
/// The stack is stored bottom-to-top; reductions address it by 1-based
/// position from the top (position 1 = topmost). In every configuration
/// reachable from `initial`, stack node indices strictly increase
/// bottom-to-top and node 0 sits at the bottom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    n: usize,
    stack: Vec<NodeId>,
    buffer_start: NodeId,
    arcs: BTreeSet<Arc>,
}

impl Configuration {
    /// Assembles a configuration from parts already known to satisfy the
    /// reachability invariants (used when stripping stack annotations).
    pub(crate) fn from_parts(
        n: usize,
        stack: Vec<NodeId>,
        buffer_start: NodeId,
        arcs: BTreeSet<Arc>,
    ) -> Self {
        Configuration {
            n,
            stack,
            buffer_start,
            arcs,
        }
    }

    /// The initial configuration: root on the stack, all words in the buffer.
    pub fn initial(n: usize) -> Result<Self, StepError> {
        if n < 1 {
            return Err(StepError::EmptySentence);
        }
        Ok(Configuration {
            n,
            stack: vec![0],
            buffer_start: 1,
            arcs: BTreeSet::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Stack contents, bottom to top.
    pub fn stack(&self) -> &[NodeId] {
        &self.stack
    }

    pub fn stack_len(&self) -> usize {
        self.stack.len()
    }

    /// Node at 1-based stack position `p` counting from the top.
    pub fn node_at(&self, p: usize) -> Option<NodeId> {
        if p < 1 || p > self.stack.len() {
            return None;
        }
        Some(self.stack[self.stack.len() - p])
    }

    /// First buffer node, if the buffer is nonempty.
    pub fn buffer_front(&self) -> Option<NodeId> {
        (self.buffer_start <= self.n).then_some(self.buffer_start)
    }

    pub fn buffer_len(&self) -> usize {
        self.n + 1 - self.buffer_start
    }

    pub fn buffer(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.buffer_start..=self.n
    }

    pub fn arcs(&self) -> &BTreeSet<Arc> {
        &self.arcs
    }

    /// Terminal: only the root remains and the buffer is exhausted.
    pub fn is_terminal(&self) -> bool {
        self.stack == [0] && self.buffer_front().is_none()
    }

    fn check(&self, t: Transition, system: &SystemSpec) -> Result<(), StepError> {
        match t {
            Transition::Shift => {
                if self.buffer_front().is_none() {
                    return Err(StepError::EmptyBuffer);
                }
            }
            Transition::Reduce(template) => {
                if !system.contains(template) {
                    return Err(StepError::TemplateNotInSystem(template));
                }
                if self.stack.len() < template.p() {
                    return Err(StepError::StackTooShallow {
                        needed: template.p(),
                        have: self.stack.len(),
                    });
                }
                // Removing the root leads nowhere: no continuation can end
                // with the terminal stack [0], so prune the branch here.
                let dependent = self.node_at(template.removed_position()).unwrap();
                if dependent == 0 {
                    return Err(StepError::RootWouldBeDependent);
                }
            }
        }
        Ok(())
    }

    pub fn applicable(&self, t: Transition, system: &SystemSpec) -> bool {
        self.check(t, system).is_ok()
    }

    /// Applies a transition, producing the successor configuration.
    pub fn apply(&self, t: Transition, system: &SystemSpec) -> Result<Self, StepError> {
        self.check(t, system)?;
        let mut next = self.clone();
        match t {
            Transition::Shift => {
                next.stack.push(self.buffer_start);
                next.buffer_start += 1;
            }
            Transition::Reduce(template) => {
                let head = self.node_at(template.head_position()).unwrap();
                let dependent = self.node_at(template.removed_position()).unwrap();
                let removed_index = next.stack.len() - template.removed_position();
                next.stack.remove(removed_index);
                next.arcs.insert(Arc::new(head, dependent));
            }
        }
        Ok(next)
    }

    /// The transitions from `system` (plus shift) applicable here, in a fixed
    /// order: shift first, then reductions in template order.
    pub fn applicable_transitions(&self, system: &SystemSpec) -> Vec<Transition> {
        let mut out = Vec::new();
        if self.applicable(Transition::Shift, system) {
            out.push(Transition::Shift);
        }
        for t in system.templates() {
            if self.applicable(Transition::Reduce(t), system) {
                out.push(Transition::Reduce(t));
            }
        }
        out
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "([")?;
        for (i, node) in self.stack.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{node}")?;
        }
        write!(f, "],[")?;
        for (i, node) in self.buffer().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{node}")?;
        }
        write!(f, "],{{")?;
        for (i, arc) in self.arcs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{arc}")?;
        }
        write!(f, "}})")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("transition {step} is not applicable: {source}")]
pub struct ReplayError {
    /// 1-based index of the offending transition.
    pub step: usize,
    pub source: StepError,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompletionError {
    #[error(transparent)]
    Replay(#[from] ReplayError),
    #[error("the computation ends in a non-terminal configuration")]
    NotTerminal,
}

/// A transition sequence for a sentence of `n` words, starting implicitly
/// from the initial configuration.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Computation {
    pub n: usize,
    pub transitions: Vec<Transition>,
}

impl Computation {
    pub fn new(n: usize, transitions: Vec<Transition>) -> Self {
        Computation { n, transitions }
    }

    /// Replays the sequence, returning the final configuration.
    pub fn run(&self, system: &SystemSpec) -> Result<Configuration, ReplayError> {
        let mut c = Configuration::initial(self.n).map_err(|e| ReplayError { step: 0, source: e })?;
        for (i, &t) in self.transitions.iter().enumerate() {
            c = c.apply(t, system).map_err(|e| ReplayError {
                step: i + 1,
                source: e,
            })?;
        }
        Ok(c)
    }

    /// Every configuration visited, from the initial one to the last.
    pub fn configurations(&self, system: &SystemSpec) -> Result<Vec<Configuration>, ReplayError> {
        let mut c = Configuration::initial(self.n).map_err(|e| ReplayError { step: 0, source: e })?;
        let mut out = Vec::with_capacity(self.transitions.len() + 1);
        out.push(c.clone());
        for (i, &t) in self.transitions.iter().enumerate() {
            c = c.apply(t, system).map_err(|e| ReplayError {
                step: i + 1,
                source: e,
            })?;
            out.push(c.clone());
        }
        Ok(out)
    }

    /// Whether the sequence replays successfully and ends terminal.
    pub fn is_complete(&self, system: &SystemSpec) -> bool {
        self.run(system).map(|c| c.is_terminal()).unwrap_or(false)
    }

    /// The tree a complete computation derives.
    pub fn tree(&self, system: &SystemSpec) -> Result<DependencyTree, CompletionError> {
        let end = self.run(system)?;
        if !end.is_terminal() {
            return Err(CompletionError::NotTerminal);
        }
        let arcs: Vec<Arc> = end.arcs().iter().copied().collect();
        // A terminal configuration has removed each word exactly once, each
        // removal adding one arc with that word as dependent; a dependent
        // always leaves the stack before its head, so the arcs are acyclic.
        Ok(DependencyTree::from_arcs(self.n, &arcs)
            .expect("a complete computation always derives a valid tree"))
    }
}

impl fmt::Display for Computation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.transitions.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn la(p: usize, q: usize) -> Transition {
        Transition::Reduce(ReductionTemplate::left(p, q).unwrap())
    }

    fn ra(p: usize, q: usize) -> Transition {
        Transition::Reduce(ReductionTemplate::right(p, q).unwrap())
    }

    #[test]
    fn initial_configuration() {
        let c = Configuration::initial(3).unwrap();
        assert_eq!(c.stack(), &[0]);
        assert_eq!(c.buffer().collect::<Vec<_>>(), vec![1, 2, 3]);
        assert!(c.arcs().is_empty());
        assert_eq!(Configuration::initial(0), Err(StepError::EmptySentence));
    }

    #[test]
    fn shift_moves_buffer_front() {
        let sys = SystemSpec::arc_standard();
        let c = Configuration::initial(1).unwrap();
        let c = c.apply(Transition::Shift, &sys).unwrap();
        assert_eq!(c.stack(), &[0, 1]);
        assert!(c.buffer_front().is_none());
        assert_eq!(
            c.apply(Transition::Shift, &sys),
            Err(StepError::EmptyBuffer)
        );
    }

    #[test]
    fn reductions_address_positions_from_the_top() {
        let sys: SystemSpec = "la:2,1;ra:2,1;la:3,1;ra:3,1".parse().unwrap();
        // Stack [0,1,2]: la(2,1) removes position 2 (node 1), head node 2.
        let c = Configuration::initial(3).unwrap();
        let c = c.apply(Transition::Shift, &sys).unwrap();
        let c = c.apply(Transition::Shift, &sys).unwrap();
        let after = c.apply(la(2, 1), &sys).unwrap();
        assert_eq!(after.stack(), &[0, 2]);
        assert!(after.arcs().contains(&Arc::new(2, 1)));

        // Stack [0,1,2,3]: ra(3,1) removes position 1 (node 3), head node 1.
        let c = c.apply(Transition::Shift, &sys).unwrap();
        let after = c.apply(ra(3, 1), &sys).unwrap();
        assert_eq!(after.stack(), &[0, 1, 2]);
        assert!(after.arcs().contains(&Arc::new(1, 3)));
    }

    #[test]
    fn root_guard_blocks_reducing_node_zero() {
        let sys = SystemSpec::arc_standard();
        let c = Configuration::initial(1).unwrap();
        let c = c.apply(Transition::Shift, &sys).unwrap();
        // Stack [0,1]: la(2,1) would make 0 a dependent of 1.
        assert_eq!(c.apply(la(2, 1), &sys), Err(StepError::RootWouldBeDependent));
        assert!(c.applicable(ra(2, 1), &sys));
    }

    #[test]
    fn shallow_stack_and_foreign_templates_are_rejected() {
        let sys = SystemSpec::arc_standard();
        let c = Configuration::initial(1).unwrap();
        assert_eq!(
            c.apply(la(2, 1), &sys),
            Err(StepError::StackTooShallow { needed: 2, have: 1 })
        );
        let c = c.apply(Transition::Shift, &sys).unwrap();
        assert!(matches!(
            c.apply(la(3, 1), &sys),
            Err(StepError::TemplateNotInSystem(_))
        ));
    }

    #[test]
    fn both_orders_derive_the_same_tree() {
        let sys = SystemSpec::arc_standard();
        let first = Computation::new(3, vec![Transition::Shift, Transition::Shift, la(2, 1), Transition::Shift, ra(2, 1), ra(2, 1)]);
        let second = Computation::new(3, vec![Transition::Shift, Transition::Shift, Transition::Shift, ra(2, 1), la(2, 1), ra(2, 1)]);
        let t1 = first.tree(&sys).unwrap();
        let t2 = second.tree(&sys).unwrap();
        assert_eq!(t1, t2);
        let expected: BTreeSet<Arc> = [Arc::new(0, 2), Arc::new(2, 1), Arc::new(2, 3)]
            .into_iter()
            .collect();
        assert_eq!(t1.arc_set(), expected);
    }

    #[test]
    fn replay_reports_the_failing_step() {
        let sys = SystemSpec::arc_standard();
        let comp = Computation::new(1, vec![la(2, 1)]);
        let err = comp.run(&sys).unwrap_err();
        assert_eq!(err.step, 1);

        let incomplete = Computation::new(2, vec![Transition::Shift]);
        assert_eq!(incomplete.tree(&sys), Err(CompletionError::NotTerminal));
    }

    #[test]
    fn single_word_sentence() {
        let sys = SystemSpec::arc_standard();
        let comp = Computation::new(1, vec![Transition::Shift, ra(2, 1)]);
        let tree = comp.tree(&sys).unwrap();
        assert_eq!(tree.arc_set(), [Arc::new(0, 1)].into_iter().collect());
        assert!(comp.is_complete(&sys));
    }

    #[test]
    fn applicable_transition_order_is_fixed() {
        let sys: SystemSpec = "attardi:3".parse().unwrap();
        let comp = Computation::new(3, vec![Transition::Shift, Transition::Shift, Transition::Shift]);
        let c = comp.run(&sys).unwrap();
        let ts = c.applicable_transitions(&sys);
        assert_eq!(ts, vec![la(2, 1), la(3, 1), ra(2, 1), ra(3, 1)]);
    }

    #[test]
    fn display_rendering() {
        let comp = Computation::new(3, vec![Transition::Shift, la(2, 1), ra(3, 1)]);
        assert_eq!(comp.to_string(), "sh la:2,1 ra:3,1");
    }
}
