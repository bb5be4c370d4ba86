//! The ambiguity-removing construction: stack symbols annotated with Boolean
//! features that force every tree to have exactly one derivation.
//!
//! Each stack symbol carries `stop` ("this node has collected all of its
//! dependents") plus, for every distance `k` up to the system's degree,
//! `redl_k` / `redr_k` flags that license left/right reductions between this
//! symbol and the one `k` positions deeper. Transitions come in two variants
//! guessing the affected node's `stop` value, and every transition turns off
//! the flags of reductions it decided to pass over. The flags describe pairs
//! of symbols, so when a reduction removes a symbol from between a pair the
//! surviving flags slide one slot inward to keep following their partners;
//! a forfeited reduction therefore stays forfeited at every later distance.
//! The result, for any monotonic base system, derives the same trees but
//! never offers two complete derivations of the same tree.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::config::{Computation, Configuration, Transition};
use crate::system::{ReductionKind, ReductionTemplate, SystemSpec};
use crate::tree::{Arc, DependencyTree, NodeId};

/// The guessed value of the affected node's `stop` feature.
///
/// `Stop` commits the node to acquiring no further dependents; `NoStop`
/// keeps it open. Rendered as `.s` / `.ns`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variant {
    Stop,
    NoStop,
}

impl Variant {
    fn as_bool(self) -> bool {
        self == Variant::Stop
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Stop => write!(f, "s"),
            Variant::NoStop => write!(f, "ns"),
        }
    }
}

/// The Boolean annotation of one stack symbol: `stop` plus `redl_1..redl_d`
/// and `redr_1..redr_d`, where `d` is the base system's degree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeatureVector {
    stop: bool,
    redl: Vec<bool>,
    redr: Vec<bool>,
}

impl FeatureVector {
    /// All features false: the root's initial annotation.
    fn all_false(degree: usize) -> Self {
        FeatureVector {
            stop: false,
            redl: vec![false; degree],
            redr: vec![false; degree],
        }
    }

    /// A freshly shifted symbol: every reduction flag true, `stop` as guessed.
    fn fresh(degree: usize, variant: Variant) -> Self {
        FeatureVector {
            stop: variant.as_bool(),
            redl: vec![true; degree],
            redr: vec![true; degree],
        }
    }

    pub fn stop(&self) -> bool {
        self.stop
    }

    /// `redl_k` for 1-based `k` up to the degree.
    pub fn redl(&self, k: usize) -> bool {
        self.redl[k - 1]
    }

    /// `redr_k` for 1-based `k` up to the degree.
    pub fn redr(&self, k: usize) -> bool {
        self.redr[k - 1]
    }

    /// Re-pairs the distance-indexed flags after the symbol `gap` positions
    /// below this one leaves the stack. Deeper partners move one step closer,
    /// so their flags slide inward; the slot that paired with the departed
    /// symbol disappears with it; the pair entering the window at the far end
    /// starts out allowed, since no template could reach it before and so it
    /// was never passed over.
    fn close_gap(&mut self, gap: usize) {
        if gap <= self.redl.len() {
            self.redl.remove(gap - 1);
            self.redl.push(true);
            self.redr.remove(gap - 1);
            self.redr.push(true);
        }
    }
}

fn fmt_flags(f: &mut fmt::Formatter<'_>, flags: &[bool]) -> fmt::Result {
    write!(f, "[")?;
    for (i, &b) in flags.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{}", if b { "T" } else { "F" })?;
    }
    write!(f, "]")
}

impl fmt::Display for FeatureVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{stop={},redl=", if self.stop { "T" } else { "F" })?;
        fmt_flags(f, &self.redl)?;
        write!(f, ",redr=")?;
        fmt_flags(f, &self.redr)?;
        write!(f, "}}")
    }
}

/// A stack symbol of the enriched system: a node plus its feature vector.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AnnotatedSymbol {
    node: NodeId,
    features: FeatureVector,
}

impl AnnotatedSymbol {
    pub fn node(&self) -> NodeId {
        self.node
    }

    pub fn features(&self) -> &FeatureVector {
        &self.features
    }
}

impl fmt::Display for AnnotatedSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.node, self.features)
    }
}

/// A transition of the enriched system: the base action plus the `stop`
/// guess for the node it affects (the shifted node, or the reduction head).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EnrichedTransition {
    Shift(Variant),
    Reduce(ReductionTemplate, Variant),
}

impl EnrichedTransition {
    /// Drops the variant, yielding the base transition.
    pub fn project(self) -> Transition {
        match self {
            EnrichedTransition::Shift(_) => Transition::Shift,
            EnrichedTransition::Reduce(t, _) => Transition::Reduce(t),
        }
    }

    pub fn variant(self) -> Variant {
        match self {
            EnrichedTransition::Shift(v) | EnrichedTransition::Reduce(_, v) => v,
        }
    }
}

impl fmt::Display for EnrichedTransition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnrichedTransition::Shift(v) => write!(f, "sh.{v}"),
            EnrichedTransition::Reduce(t, v) => {
                let name = match t.kind() {
                    ReductionKind::Left => "la",
                    ReductionKind::Right => "ra",
                };
                write!(f, "{}.{}:{},{}", name, v, t.p(), t.q())
            }
        }
    }
}

/// Error for attempts to enrich a system that is not monotonic: each listed
/// template demands companions the system lacks.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct NotMonotonicError {
    pub missing: Vec<(ReductionTemplate, Vec<ReductionTemplate>)>,
}

impl fmt::Display for NotMonotonicError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "system is not monotonic:")?;
        for (index, (t, needs)) in self.missing.iter().enumerate() {
            write!(f, "{} {t} requires", if index > 0 { ";" } else { "" })?;
            for (i, m) in needs.iter().enumerate() {
                write!(f, "{}{m}", if i > 0 { ", " } else { " " })?;
            }
        }
        Ok(())
    }
}

/// A monotonic base system packaged with the derived feature dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnrichedSystem {
    base: SystemSpec,
    degree: usize,
    depth: usize,
}

impl EnrichedSystem {
    /// Enriches a base system. Fails unless the system is monotonic, since
    /// only then does every tree keep at least one (and exactly one)
    /// derivation.
    pub fn transform(base: &SystemSpec) -> Result<Self, NotMonotonicError> {
        let missing = base.missing_mandatory();
        if !missing.is_empty() {
            return Err(NotMonotonicError { missing });
        }
        Ok(EnrichedSystem {
            degree: base.degree(),
            depth: base.depth(),
            base: base.clone(),
        })
    }

    pub fn base(&self) -> &SystemSpec {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Features carried by each stack symbol: `stop` plus two flags per
    /// distance `1..=degree`.
    pub fn features_per_symbol(&self) -> usize {
        2 * self.degree + 1
    }

    /// The full transition inventory: both shift variants, then both
    /// variants of every reduction template, in template order.
    pub fn transitions(&self) -> Vec<EnrichedTransition> {
        let mut out = vec![
            EnrichedTransition::Shift(Variant::Stop),
            EnrichedTransition::Shift(Variant::NoStop),
        ];
        for t in self.base.templates() {
            out.push(EnrichedTransition::Reduce(t, Variant::Stop));
            out.push(EnrichedTransition::Reduce(t, Variant::NoStop));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnrichedStepError {
    #[error("a sentence needs at least one word")]
    EmptySentence,
    #[error("cannot shift from an empty buffer")]
    EmptyBuffer,
    #[error("transition {0} is not in the system")]
    TemplateNotInSystem(ReductionTemplate),
    #[error("reduction {0} needs more stack symbols than available")]
    StackTooShallow(ReductionTemplate),
    #[error("the root node cannot become a dependent")]
    RootWouldBeDependent,
    #[error("reduction {0} is switched off by the current features")]
    BlockedByFeatures(ReductionTemplate),
}

/// A configuration of the enriched system: annotated stack symbols over the
/// same buffer/arc mechanics as the base system.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EnrichedConfiguration {
    n: usize,
    stack: Vec<AnnotatedSymbol>,
    buffer_start: NodeId,
    arcs: BTreeSet<Arc>,
}

impl EnrichedConfiguration {
    /// Initial configuration: the root alone, with every feature false (it
    /// was never shifted, and its final `stop` comes from its last
    /// reduction).
    pub fn initial(n: usize, system: &EnrichedSystem) -> Result<Self, EnrichedStepError> {
        if n < 1 {
            return Err(EnrichedStepError::EmptySentence);
        }
        Ok(EnrichedConfiguration {
            n,
            stack: vec![AnnotatedSymbol {
                node: 0,
                features: FeatureVector::all_false(system.degree()),
            }],
            buffer_start: 1,
            arcs: BTreeSet::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Stack contents, bottom to top.
    pub fn stack(&self) -> &[AnnotatedSymbol] {
        &self.stack
    }

    pub fn stack_len(&self) -> usize {
        self.stack.len()
    }

    /// Symbol at 1-based stack position `p` counting from the top.
    pub fn symbol_at(&self, p: usize) -> Option<&AnnotatedSymbol> {
        if p < 1 || p > self.stack.len() {
            return None;
        }
        Some(&self.stack[self.stack.len() - p])
    }

    pub fn node_at(&self, p: usize) -> Option<NodeId> {
        self.symbol_at(p).map(|s| s.node)
    }

    pub fn buffer_front(&self) -> Option<NodeId> {
        (self.buffer_start <= self.n).then_some(self.buffer_start)
    }

    pub fn buffer_len(&self) -> usize {
        self.n + 1 - self.buffer_start
    }

    pub fn arcs(&self) -> &BTreeSet<Arc> {
        &self.arcs
    }

    /// Strips the annotations, yielding the base configuration.
    pub fn project(&self) -> Configuration {
        Configuration::from_parts(
            self.n,
            self.stack.iter().map(|s| s.node).collect(),
            self.buffer_start,
            self.arcs.clone(),
        )
    }

    /// Availability of the reduction `template` here: the licensing flag on
    /// the position-`q` symbol is on, the dependent has stopped collecting
    /// while the head has not, the template belongs to the system, and the
    /// dependent is not the root.
    pub fn reduction_available(&self, template: ReductionTemplate, system: &EnrichedSystem) -> bool {
        self.check_reduction(template, system).is_ok()
    }

    fn check_reduction(
        &self,
        template: ReductionTemplate,
        system: &EnrichedSystem,
    ) -> Result<(), EnrichedStepError> {
        if !system.base().contains(template) {
            return Err(EnrichedStepError::TemplateNotInSystem(template));
        }
        let (Some(at_p), Some(at_q)) = (self.symbol_at(template.p()), self.symbol_at(template.q()))
        else {
            return Err(EnrichedStepError::StackTooShallow(template));
        };
        let (head, dependent, flag) = match template.kind() {
            // la(p,q): q heads p; the q symbol licenses via redl.
            ReductionKind::Left => (at_q, at_p, at_q.features.redl(template.degree())),
            // ra(p,q): p heads q; the q symbol licenses via redr.
            ReductionKind::Right => (at_p, at_q, at_q.features.redr(template.degree())),
        };
        if dependent.node == 0 {
            return Err(EnrichedStepError::RootWouldBeDependent);
        }
        if !flag || head.features.stop || !dependent.features.stop {
            return Err(EnrichedStepError::BlockedByFeatures(template));
        }
        Ok(())
    }

    fn check(&self, t: EnrichedTransition, system: &EnrichedSystem) -> Result<(), EnrichedStepError> {
        match t {
            EnrichedTransition::Shift(_) => {
                if self.buffer_front().is_none() {
                    return Err(EnrichedStepError::EmptyBuffer);
                }
                Ok(())
            }
            EnrichedTransition::Reduce(template, _) => self.check_reduction(template, system),
        }
    }

    pub fn applicable(&self, t: EnrichedTransition, system: &EnrichedSystem) -> bool {
        self.check(t, system).is_ok()
    }

    /// Turns off, across the whole update window, every reduction flag whose
    /// reduction is available right now and whose dependent position passes
    /// `blocks`. Evaluated entirely on the antecedent (pre-transition) stack.
    fn blocked_flags(
        &self,
        system: &EnrichedSystem,
        blocks: impl Fn(ReductionKind, usize) -> bool,
    ) -> Vec<(usize, ReductionKind, usize)> {
        let mut out = Vec::new();
        let len = self.stack.len();
        for u in 1..=system.depth().min(len) {
            for k in 1..=system.degree() {
                if u + k > len {
                    break;
                }
                for kind in [ReductionKind::Left, ReductionKind::Right] {
                    // The reduction pairing positions (u+k, u); its dependent
                    // sits at u+k for a left arc and at u for a right arc.
                    let dependent_position = match kind {
                        ReductionKind::Left => u + k,
                        ReductionKind::Right => u,
                    };
                    if !blocks(kind, dependent_position) {
                        continue;
                    }
                    let Ok(template) = ReductionTemplate::new(kind, u + k, u) else {
                        continue;
                    };
                    if self.reduction_available(template, system) {
                        out.push((u, kind, k));
                    }
                }
            }
        }
        out
    }

    fn set_flag(&mut self, position: usize, kind: ReductionKind, k: usize, value: bool) {
        let idx = self.stack.len() - position;
        let features = &mut self.stack[idx].features;
        match kind {
            ReductionKind::Left => features.redl[k - 1] = value,
            ReductionKind::Right => features.redr[k - 1] = value,
        }
    }

    /// Applies an enriched transition: computes every feature update against
    /// the antecedent stack, then performs the structural change.
    pub fn apply(
        &self,
        t: EnrichedTransition,
        system: &EnrichedSystem,
    ) -> Result<Self, EnrichedStepError> {
        self.check(t, system)?;
        // A transition forfeits exactly the available reductions it outranks:
        // shift forfeits all of them, a reduction those whose dependent sits
        // strictly closer to the top than its own.
        let blocked = match t {
            EnrichedTransition::Shift(_) => self.blocked_flags(system, |_, _| true),
            EnrichedTransition::Reduce(template, _) => {
                let own_dependent = template.removed_position();
                self.blocked_flags(system, |_, dependent| dependent < own_dependent)
            }
        };
        let mut next = self.clone();
        for (u, kind, k) in blocked {
            next.set_flag(u, kind, k, false);
        }
        match t {
            EnrichedTransition::Shift(v) => {
                next.stack.push(AnnotatedSymbol {
                    node: self.buffer_start,
                    features: FeatureVector::fresh(system.degree(), v),
                });
                next.buffer_start += 1;
            }
            EnrichedTransition::Reduce(template, v) => {
                let head_position = template.head_position();
                let head_index = next.stack.len() - head_position;
                next.stack[head_index].features.stop = v.as_bool();
                let removed_position = template.removed_position();
                let removed_index = next.stack.len() - removed_position;
                let removed = next.stack.remove(removed_index);
                // Every pair that straddled the removed symbol is now one
                // step narrower; the flags of each surviving symbol above the
                // gap must keep following their partners.
                for above in 1..removed_position {
                    let idx = next.stack.len() - above;
                    next.stack[idx].features.close_gap(removed_position - above);
                }
                let head = self.node_at(head_position).unwrap();
                next.arcs.insert(Arc::new(head, removed.node));
            }
        }
        Ok(next)
    }

    /// The enriched transitions applicable here, in a fixed order: shift
    /// variants first, then both variants of each template in template order.
    pub fn available_transitions(&self, system: &EnrichedSystem) -> Vec<EnrichedTransition> {
        system
            .transitions()
            .into_iter()
            .filter(|&t| self.applicable(t, system))
            .collect()
    }

    /// Terminal: only the root remains, the buffer is exhausted, the root
    /// has `stop` true (all dependents collected) and no reduction flag set.
    pub fn is_terminal(&self) -> bool {
        if self.buffer_front().is_some() || self.stack.len() != 1 {
            return false;
        }
        let root = &self.stack[0];
        root.node == 0
            && root.features.stop
            && root.features.redl.iter().all(|&b| !b)
            && root.features.redr.iter().all(|&b| !b)
    }
}

impl fmt::Display for EnrichedConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "([")?;
        for (i, s) in self.stack.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "],[")?;
        let mut first = true;
        for b in self.buffer_start..=self.n {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
            first = false;
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
#[error("enriched transition {step} is not applicable: {source}")]
pub struct EnrichedReplayError {
    /// 1-based index of the offending transition.
    pub step: usize,
    pub source: EnrichedStepError,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnrichedCompletionError {
    #[error(transparent)]
    Replay(#[from] EnrichedReplayError),
    #[error("the computation ends in a non-terminal enriched configuration")]
    NotTerminal,
}

/// An enriched transition sequence for a sentence of `n` words.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EnrichedComputation {
    pub n: usize,
    pub transitions: Vec<EnrichedTransition>,
}

impl EnrichedComputation {
    pub fn new(n: usize, transitions: Vec<EnrichedTransition>) -> Self {
        EnrichedComputation { n, transitions }
    }

    /// Drops all variants, yielding the base computation.
    pub fn project(&self) -> Computation {
        Computation::new(
            self.n,
            self.transitions.iter().map(|t| t.project()).collect(),
        )
    }

    pub fn run(&self, system: &EnrichedSystem) -> Result<EnrichedConfiguration, EnrichedReplayError> {
        let mut c = EnrichedConfiguration::initial(self.n, system)
            .map_err(|e| EnrichedReplayError { step: 0, source: e })?;
        for (i, &t) in self.transitions.iter().enumerate() {
            c = c.apply(t, system).map_err(|e| EnrichedReplayError {
                step: i + 1,
                source: e,
            })?;
        }
        Ok(c)
    }

    pub fn is_complete(&self, system: &EnrichedSystem) -> bool {
        self.run(system).map(|c| c.is_terminal()).unwrap_or(false)
    }

    /// The tree a complete enriched computation derives.
    pub fn tree(&self, system: &EnrichedSystem) -> Result<DependencyTree, EnrichedCompletionError> {
        let end = self.run(system)?;
        if !end.is_terminal() {
            return Err(EnrichedCompletionError::NotTerminal);
        }
        let arcs: Vec<Arc> = end.arcs().iter().copied().collect();
        Ok(DependencyTree::from_arcs(self.n, &arcs)
            .expect("a complete computation always derives a valid tree"))
    }
}

impl fmt::Display for EnrichedComputation {
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
