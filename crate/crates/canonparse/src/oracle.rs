//! The canonical oracle: a tree-to-derivation map that always picks the
//! highest-priority compatible reduction, plus the rewrite that turns any
//! complete computation into the canonical one, and the lift that decorates
//! a canonical computation with the unique consistent `stop` guesses.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::config::{Computation, Configuration, ReplayError, Transition};
use crate::enriched::{
    EnrichedComputation, EnrichedSystem, EnrichedTransition, NotMonotonicError, Variant,
};
use crate::system::{ReductionTemplate, SystemSpec};
use crate::tree::{Arc, DependencyTree, NodeId};

/// A reduction that is applicable now and builds an arc of the target tree
/// whose dependent has already collected its whole subtree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CompatibleReduction {
    pub template: ReductionTemplate,
    /// The arc the reduction would create.
    pub arc: Arc,
    /// Stack position (1 = top) of the dependent the reduction removes.
    pub dependent_position: usize,
}

/// All reductions compatible with `tree` at `c`: applicable, creating a tree
/// arc, and removing a node whose dependents are all attached already. The
/// completeness requirement reflects that a reduction takes its dependent off
/// the stack for good, so reducing early can never lead to the full tree.
pub fn compatible_reductions(
    c: &Configuration,
    tree: &DependencyTree,
    system: &SystemSpec,
) -> BTreeSet<CompatibleReduction> {
    let mut out = BTreeSet::new();
    for template in system.templates() {
        if !c.applicable(Transition::Reduce(template), system) {
            continue;
        }
        let head = c.node_at(template.head_position()).unwrap();
        let dependent = c.node_at(template.removed_position()).unwrap();
        let arc = Arc::new(head, dependent);
        if !tree.contains(arc) {
            continue;
        }
        let subtree_complete = tree
            .dependents_of(dependent)
            .all(|child| c.arcs().contains(&Arc::new(dependent, child)));
        if !subtree_complete {
            continue;
        }
        out.insert(CompatibleReduction {
            template,
            arc,
            dependent_position: template.removed_position(),
        });
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PriorityError {
    #[error("no compatible reductions to choose from")]
    Empty,
    #[error("two compatible reductions share dependent position {0}")]
    Tie(usize),
}

/// The compatible reduction whose dependent is closest to the stack top.
///
/// Uniqueness is guaranteed: two distinct compatible reductions removing the
/// same node would give it two heads in the tree. `Tie` therefore signals a
/// broken invariant, never a legitimate outcome.
pub fn highest_priority(
    reductions: &BTreeSet<CompatibleReduction>,
) -> Result<CompatibleReduction, PriorityError> {
    let best = reductions
        .iter()
        .min_by_key(|r| r.dependent_position)
        .copied()
        .ok_or(PriorityError::Empty)?;
    let tied = reductions
        .iter()
        .filter(|r| r.dependent_position == best.dependent_position)
        .count();
    if tied > 1 {
        return Err(PriorityError::Tie(best.dependent_position));
    }
    Ok(best)
}

/// Where and why the oracle got stuck: no compatible reduction, nothing left
/// to shift, and not terminal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StuckReport {
    pub configuration: Configuration,
}

impl fmt::Display for StuckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stuck at {}", self.configuration)
    }
}

/// Outcome of the oracle: the canonical computation, or evidence that the
/// system cannot derive the tree. Unparseable is an ordinary result (it is
/// what coverage statistics count), not an error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleOutcome {
    Success(Computation),
    Unparseable(StuckReport),
}

impl OracleOutcome {
    pub fn is_success(&self) -> bool {
        matches!(self, OracleOutcome::Success(_))
    }

    pub fn success(self) -> Option<Computation> {
        match self {
            OracleOutcome::Success(c) => Some(c),
            OracleOutcome::Unparseable(_) => None,
        }
    }
}

/// Computes the canonical computation for `tree`: greedily apply the
/// highest-priority compatible reduction, shifting only when no reduction is
/// compatible. Succeeds exactly on the trees the system can derive at all,
/// and the result never passes over a compatible reduction.
pub fn canonical_oracle(tree: &DependencyTree, system: &SystemSpec) -> OracleOutcome {
    let n = tree.len();
    let mut c = Configuration::initial(n).expect("trees have at least one word");
    let mut transitions = Vec::new();
    loop {
        let reductions = compatible_reductions(&c, tree, system);
        let next = if reductions.is_empty() {
            if c.buffer_front().is_some() {
                Transition::Shift
            } else if c.is_terminal() {
                return OracleOutcome::Success(Computation::new(n, transitions));
            } else {
                return OracleOutcome::Unparseable(StuckReport { configuration: c });
            }
        } else {
            let best = highest_priority(&reductions)
                .expect("compatible reductions never share a dependent");
            Transition::Reduce(best.template)
        };
        c = c.apply(next, system).expect("chosen transition is applicable");
        transitions.push(next);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TroublesomeError {
    #[error("configuration index {index} is out of range for {len} transitions")]
    IndexOutOfRange { index: usize, len: usize },
    #[error(transparent)]
    Replay(#[from] ReplayError),
}

/// Whether the configuration reached after `index` transitions of `comp` is
/// troublesome: some reduction compatible with `tree` is available, but the
/// computation does something else next.
pub fn is_troublesome(
    comp: &Computation,
    index: usize,
    tree: &DependencyTree,
    system: &SystemSpec,
) -> Result<bool, TroublesomeError> {
    if index > comp.transitions.len() {
        return Err(TroublesomeError::IndexOutOfRange {
            index,
            len: comp.transitions.len(),
        });
    }
    let configs = comp.configurations(system)?;
    let reductions = compatible_reductions(&configs[index], tree, system);
    if reductions.is_empty() {
        return Ok(false);
    }
    let best =
        highest_priority(&reductions).expect("compatible reductions never share a dependent");
    Ok(match comp.transitions.get(index) {
        Some(&next) => next != Transition::Reduce(best.template),
        None => false,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("the transition would create an arc touching the removed node {0}")]
pub struct InvolvesRemovedNode(pub NodeId);

/// Rewrites a transition of a computation so that it still creates the same
/// arc after node `removed` has been taken off the stack earlier than it
/// originally was. `c` is the configuration the transition originally applied
/// to (with `removed` still present); positions shift down by one for every
/// template slot that lies at or below the removed node.
pub fn phi(
    removed: NodeId,
    t: Transition,
    c: &Configuration,
) -> Result<Transition, InvolvesRemovedNode> {
    let Transition::Reduce(template) = t else {
        return Ok(Transition::Shift);
    };
    let node_p = c.node_at(template.p()).expect("transition fits the stack");
    let node_q = c.node_at(template.q()).expect("transition fits the stack");
    if node_p == removed || node_q == removed {
        return Err(InvolvesRemovedNode(removed));
    }
    // The stack is index-sorted, so node_p < node_q; `removed` sits deeper
    // than a slot exactly when its node index is smaller.
    let (p, q) = if node_p > removed {
        (template.p(), template.q())
    } else if node_q > removed {
        (template.p() - 1, template.q())
    } else {
        (template.p() - 1, template.q() - 1)
    };
    let rewritten = ReductionTemplate::new(template.kind(), p, q)
        .expect("removing a node strictly between the slots keeps p > q");
    Ok(Transition::Reduce(rewritten))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CanonicalizeError {
    #[error("the computation is not complete: {0}")]
    NotComplete(crate::config::CompletionError),
    #[error(transparent)]
    NotMonotonic(#[from] NotMonotonicError),
}

/// Leftmost troublesome configuration together with its priority reduction.
fn leftmost_troublesome(
    configs: &[Configuration],
    transitions: &[Transition],
    tree: &DependencyTree,
    system: &SystemSpec,
) -> Option<(usize, CompatibleReduction)> {
    for (k, t) in transitions.iter().enumerate() {
        let reductions = compatible_reductions(&configs[k], tree, system);
        if reductions.is_empty() {
            continue;
        }
        let best =
            highest_priority(&reductions).expect("compatible reductions never share a dependent");
        if *t != Transition::Reduce(best.template) {
            return Some((k, best));
        }
    }
    None
}

/// Rewrites a complete computation into the canonical one for its tree by
/// repeatedly eliminating the leftmost troublesome configuration: hoist the
/// passed-over reduction to that point, adjust the intermediate transitions
/// with `phi`, and drop the late duplicate of the hoisted arc. Preserves the
/// tree; the result equals `canonical_oracle` on that tree.
pub fn canonicalize(
    comp: &Computation,
    system: &SystemSpec,
) -> Result<Computation, CanonicalizeError> {
    if !system.is_monotonic() {
        return Err(NotMonotonicError {
            missing: system.missing_mandatory(),
        }
        .into());
    }
    let tree = comp.tree(system).map_err(CanonicalizeError::NotComplete)?;
    let mut current = comp.clone();
    // Every pass extends the troublesome-free prefix by at least one
    // configuration, so the loop runs at most |transitions| + 1 times.
    let max_passes = comp.transitions.len() + 1;
    for _pass in 0..max_passes {
        let configs = current
            .configurations(system)
            .expect("rewriting preserves replayability");
        let Some((k, hoisted)) = leftmost_troublesome(&configs, &current.transitions, &tree, system)
        else {
            debug_assert_eq!(
                current.tree(system).as_ref(),
                Ok(&tree),
                "canonicalization must preserve the tree"
            );
            return Ok(current);
        };
        let removed = hoisted.arc.dependent;
        // The duplicate: the later transition that created the hoisted arc.
        // It exists because the complete computation builds every tree arc.
        let duplicate = (k..current.transitions.len())
            .find(|&i| {
                configs[i + 1].arcs().contains(&hoisted.arc)
                    && !configs[i].arcs().contains(&hoisted.arc)
            })
            .expect("a complete computation creates every arc of its tree");
        let mut rewritten: Vec<Transition> = current.transitions[..k].to_vec();
        rewritten.push(Transition::Reduce(hoisted.template));
        for (t, c) in current.transitions[k..duplicate].iter().zip(&configs[k..duplicate]) {
            // Transitions between the hoist point and the duplicate never
            // touch `removed`: its subtree is already complete and its single
            // incoming arc is the duplicate itself.
            rewritten.push(
                phi(removed, *t, c)
                    .expect("intermediate transitions do not touch the hoisted dependent"),
            );
        }
        rewritten.extend_from_slice(&current.transitions[duplicate + 1..]);
        current = Computation::new(current.n, rewritten);
    }
    unreachable!("canonicalization exceeded its pass bound");
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("the computation is not the canonical one for the tree (step {step})")]
pub struct NotCanonicalError {
    /// 1-based step at which the computation deviates (0 = setup mismatch).
    pub step: usize,
}

/// Decorates the canonical computation for `tree` with `stop` guesses: a
/// shift or reduction commits its affected node to `stop` exactly when the
/// tree holds no further arcs headed by that node. The output is the unique
/// complete enriched computation deriving `tree`.
pub fn lift_to_enriched(
    comp: &Computation,
    tree: &DependencyTree,
    system: &EnrichedSystem,
) -> Result<EnrichedComputation, NotCanonicalError> {
    if comp.n != tree.len() {
        return Err(NotCanonicalError { step: 0 });
    }
    let base = system.base();
    let mut c = Configuration::initial(comp.n).expect("trees have at least one word");
    let mut out = Vec::with_capacity(comp.transitions.len());
    for (i, &t) in comp.transitions.iter().enumerate() {
        let step = i + 1;
        let reductions = compatible_reductions(&c, tree, base);
        let expected = if reductions.is_empty() {
            Transition::Shift
        } else {
            let best = highest_priority(&reductions)
                .expect("compatible reductions never share a dependent");
            Transition::Reduce(best.template)
        };
        if t != expected {
            return Err(NotCanonicalError { step });
        }
        // The affected node keeps collecting iff the tree still has arcs
        // headed by it beyond those built up to and including this step.
        let (affected, created) = match t {
            Transition::Shift => (
                c.buffer_front().expect("canonical steps are applicable"),
                None,
            ),
            Transition::Reduce(template) => {
                let head = c.node_at(template.head_position()).unwrap();
                let dependent = c.node_at(template.removed_position()).unwrap();
                (head, Some(Arc::new(head, dependent)))
            }
        };
        let still_collecting = tree.dependents_of(affected).any(|child| {
            let arc = Arc::new(affected, child);
            !c.arcs().contains(&arc) && created != Some(arc)
        });
        let variant = if still_collecting {
            Variant::NoStop
        } else {
            Variant::Stop
        };
        out.push(match t {
            Transition::Shift => EnrichedTransition::Shift(variant),
            Transition::Reduce(template) => EnrichedTransition::Reduce(template, variant),
        });
        c = c
            .apply(t, base)
            .map_err(|_| NotCanonicalError { step })?;
    }
    if !c.is_terminal() || c.arcs() != &tree.arc_set() {
        return Err(NotCanonicalError {
            step: comp.transitions.len(),
        });
    }
    Ok(EnrichedComputation::new(comp.n, out))
}
