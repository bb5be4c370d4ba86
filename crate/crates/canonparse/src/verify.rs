//! Brute-force verification on small sentences: enumerate every complete
//! computation, compare the base and enriched systems tree-for-tree, and
//! cross-check the oracle against an independent generator of all trees.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::config::Computation;
use crate::config::Configuration;
use crate::enriched::{
    EnrichedComputation, EnrichedConfiguration, EnrichedSystem, FeatureVector, NotMonotonicError,
};
use crate::oracle::{canonical_oracle, canonicalize, is_troublesome, lift_to_enriched, OracleOutcome};
use crate::system::SystemSpec;
use crate::tree::{all_trees, DependencyTree};

/// Default cap on explored configurations per enumeration call.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("enumeration budget of {0} explored configurations exceeded")]
pub struct BudgetExceeded(pub u64);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    NotMonotonic(#[from] NotMonotonicError),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

/// All complete computations of the base system for sentences of length `n`,
/// in depth-first order (shift explored before reductions, reductions in
/// template order).
pub fn enumerate_computations(
    system: &SystemSpec,
    n: usize,
    budget: u64,
) -> Result<Vec<Computation>, BudgetExceeded> {
    fn dfs(
        c: &Configuration,
        system: &SystemSpec,
        path: &mut Vec<crate::config::Transition>,
        out: &mut Vec<Computation>,
        explored: &mut u64,
        budget: u64,
        n: usize,
    ) -> Result<(), BudgetExceeded> {
        *explored += 1;
        if *explored > budget {
            return Err(BudgetExceeded(budget));
        }
        if c.is_terminal() {
            out.push(Computation::new(n, path.clone()));
            return Ok(());
        }
        for t in c.applicable_transitions(system) {
            let next = c.apply(t, system).expect("listed transitions are applicable");
            path.push(t);
            dfs(&next, system, path, out, explored, budget, n)?;
            path.pop();
        }
        Ok(())
    }

    let mut out = Vec::new();
    let mut explored = 0;
    let initial = Configuration::initial(n).expect("enumeration needs n >= 1");
    dfs(
        &initial,
        system,
        &mut Vec::new(),
        &mut out,
        &mut explored,
        budget,
        n,
    )?;
    Ok(out)
}

/// All complete computations of the enriched system, in the same expansion
/// order with the stop variant tried before the no-stop variant.
pub fn enumerate_enriched(
    system: &EnrichedSystem,
    n: usize,
    budget: u64,
) -> Result<Vec<EnrichedComputation>, BudgetExceeded> {
    fn dfs(
        c: &EnrichedConfiguration,
        system: &EnrichedSystem,
        path: &mut Vec<crate::enriched::EnrichedTransition>,
        out: &mut Vec<EnrichedComputation>,
        explored: &mut u64,
        budget: u64,
        n: usize,
    ) -> Result<(), BudgetExceeded> {
        *explored += 1;
        if *explored > budget {
            return Err(BudgetExceeded(budget));
        }
        if c.is_terminal() {
            out.push(EnrichedComputation::new(n, path.clone()));
            return Ok(());
        }
        for t in c.available_transitions(system) {
            let next = c.apply(t, system).expect("listed transitions are applicable");
            path.push(t);
            dfs(&next, system, path, out, explored, budget, n)?;
            path.pop();
        }
        Ok(())
    }

    let mut out = Vec::new();
    let mut explored = 0;
    let initial = EnrichedConfiguration::initial(n, system).expect("enumeration needs n >= 1");
    dfs(
        &initial,
        system,
        &mut Vec::new(),
        &mut out,
        &mut explored,
        budget,
        n,
    )?;
    Ok(out)
}

/// Every feature vector occurring on any stack of any reachable enriched
/// configuration for sentences of length `n`.
pub fn reachable_feature_vectors(
    system: &EnrichedSystem,
    n: usize,
    budget: u64,
) -> Result<BTreeSet<FeatureVector>, BudgetExceeded> {
    fn dfs(
        c: &EnrichedConfiguration,
        system: &EnrichedSystem,
        seen: &mut BTreeSet<FeatureVector>,
        explored: &mut u64,
        budget: u64,
    ) -> Result<(), BudgetExceeded> {
        *explored += 1;
        if *explored > budget {
            return Err(BudgetExceeded(budget));
        }
        for symbol in c.stack() {
            seen.insert(symbol.features().clone());
        }
        for t in c.available_transitions(system) {
            let next = c.apply(t, system).expect("listed transitions are applicable");
            dfs(&next, system, seen, explored, budget)?;
        }
        Ok(())
    }

    let mut seen = BTreeSet::new();
    let mut explored = 0;
    let initial = EnrichedConfiguration::initial(n, system).expect("needs n >= 1");
    dfs(&initial, system, &mut seen, &mut explored, budget)?;
    Ok(seen)
}

/// How many complete computations exist per derivable tree. A maximum above
/// one witnesses spurious ambiguity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationReport {
    pub n: usize,
    pub system: String,
    pub computation_count: usize,
    pub per_tree: BTreeMap<DependencyTree, usize>,
    pub max_ambiguity: usize,
}

impl EnumerationReport {
    pub fn tree_count(&self) -> usize {
        self.per_tree.len()
    }

    fn from_trees(n: usize, system: String, trees: Vec<DependencyTree>) -> Self {
        let mut per_tree = BTreeMap::new();
        for t in trees {
            *per_tree.entry(t).or_insert(0) += 1;
        }
        let max_ambiguity = per_tree.values().copied().max().unwrap_or(0);
        EnumerationReport {
            n,
            system,
            computation_count: per_tree.values().sum(),
            per_tree,
            max_ambiguity,
        }
    }
}

/// Groups the base system's complete computations by the tree they derive.
pub fn ambiguity_report(
    system: &SystemSpec,
    n: usize,
    budget: u64,
) -> Result<EnumerationReport, BudgetExceeded> {
    let comps = enumerate_computations(system, n, budget)?;
    let trees = comps
        .iter()
        .map(|c| c.tree(system).expect("enumerated computations are complete"))
        .collect();
    Ok(EnumerationReport::from_trees(n, system.to_string(), trees))
}

/// Groups the enriched system's complete computations by tree.
pub fn enriched_ambiguity_report(
    system: &EnrichedSystem,
    n: usize,
    budget: u64,
) -> Result<EnumerationReport, BudgetExceeded> {
    let comps = enumerate_enriched(system, n, budget)?;
    let trees = comps
        .iter()
        .map(|c| c.tree(system).expect("enumerated computations are complete"))
        .collect();
    Ok(EnumerationReport::from_trees(
        n,
        format!("enriched({})", system.base()),
        trees,
    ))
}

/// Side-by-side comparison of base and enriched derivability, with the
/// projection check that every enriched computation maps to a valid base
/// computation of the same tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub n: usize,
    pub base_trees: BTreeSet<DependencyTree>,
    pub enriched_trees: BTreeSet<DependencyTree>,
    pub enriched_per_tree: BTreeMap<DependencyTree, usize>,
    pub projection_failures: Vec<String>,
}

impl EquivalenceReport {
    pub fn trees_equal(&self) -> bool {
        self.base_trees == self.enriched_trees
    }

    /// Every derivable tree has exactly one enriched computation.
    pub fn enriched_unique(&self) -> bool {
        self.enriched_per_tree.values().all(|&c| c == 1)
    }

    pub fn passed(&self) -> bool {
        self.trees_equal() && self.enriched_unique() && self.projection_failures.is_empty()
    }
}

/// Checks that enriching a system changes neither the set of derivable trees
/// nor any tree's identity under projection, and leaves exactly one enriched
/// computation per tree.
pub fn check_equivalence(
    system: &SystemSpec,
    n: usize,
    budget: u64,
) -> Result<EquivalenceReport, VerifyError> {
    let enriched_system = EnrichedSystem::transform(system)?;
    let base = enumerate_computations(system, n, budget)?;
    let enriched = enumerate_enriched(&enriched_system, n, budget)?;

    let base_trees: BTreeSet<_> = base
        .iter()
        .map(|c| c.tree(system).expect("enumerated computations are complete"))
        .collect();

    let mut enriched_per_tree = BTreeMap::new();
    let mut projection_failures = Vec::new();
    for comp in &enriched {
        let tree = comp
            .tree(&enriched_system)
            .expect("enumerated computations are complete");
        *enriched_per_tree.entry(tree.clone()).or_insert(0usize) += 1;
        match comp.project().tree(system) {
            Ok(projected_tree) if projected_tree == tree => {}
            Ok(projected_tree) => projection_failures.push(format!(
                "projection of `{comp}` derives {projected_tree} instead of {tree}"
            )),
            Err(e) => projection_failures.push(format!("projection of `{comp}` fails: {e}")),
        }
    }

    Ok(EquivalenceReport {
        n,
        enriched_trees: enriched_per_tree.keys().cloned().collect(),
        base_trees,
        enriched_per_tree,
        projection_failures,
    })
}

/// Oracle cross-check over every tree from the independent head-vector
/// generator: success must coincide with derivability, successes must be
/// canonical in every sense, and lifts must hit the unique enriched
/// computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub n: usize,
    pub trees_total: usize,
    pub derivable: usize,
    pub oracle_successes: usize,
    pub failures: Vec<String>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn check_oracle(
    system: &SystemSpec,
    n: usize,
    budget: u64,
) -> Result<OracleReport, VerifyError> {
    let enriched_system = EnrichedSystem::transform(system)?;

    let mut computations_by_tree: BTreeMap<DependencyTree, Vec<Computation>> = BTreeMap::new();
    for comp in enumerate_computations(system, n, budget)? {
        let tree = comp.tree(system).expect("enumerated computations are complete");
        computations_by_tree.entry(tree).or_default().push(comp);
    }
    let mut enriched_by_tree: BTreeMap<DependencyTree, Vec<EnrichedComputation>> = BTreeMap::new();
    for comp in enumerate_enriched(&enriched_system, n, budget)? {
        let tree = comp
            .tree(&enriched_system)
            .expect("enumerated computations are complete");
        enriched_by_tree.entry(tree).or_default().push(comp);
    }

    let trees = all_trees(n);
    let mut report = OracleReport {
        n,
        trees_total: trees.len(),
        derivable: computations_by_tree.len(),
        oracle_successes: 0,
        failures: Vec::new(),
    };

    for tree in &trees {
        let derivable = computations_by_tree.contains_key(tree);
        let comp = match canonical_oracle(tree, system) {
            OracleOutcome::Success(comp) => {
                report.oracle_successes += 1;
                if !derivable {
                    report
                        .failures
                        .push(format!("oracle succeeded on the non-derivable tree {tree}"));
                    continue;
                }
                comp
            }
            OracleOutcome::Unparseable(stuck) => {
                if derivable {
                    report
                        .failures
                        .push(format!("oracle failed on the derivable tree {tree}: {stuck}"));
                }
                continue;
            }
        };

        match comp.tree(system) {
            Ok(derived) if &derived == tree => {}
            outcome => {
                report.failures.push(format!(
                    "oracle output for {tree} derives {outcome:?} instead"
                ));
                continue;
            }
        }
        for k in 0..=comp.transitions.len() {
            if is_troublesome(&comp, k, tree, system).unwrap_or(true) {
                report.failures.push(format!(
                    "oracle output for {tree} passes over a reduction at step {k}"
                ));
            }
        }
        for enumerated in &computations_by_tree[tree] {
            match canonicalize(enumerated, system) {
                Ok(rewritten) if rewritten == comp => {}
                outcome => report.failures.push(format!(
                    "canonicalizing `{enumerated}` for {tree} gave {outcome:?}, oracle gave `{comp}`"
                )),
            }
        }
        let lifted = match lift_to_enriched(&comp, tree, &enriched_system) {
            Ok(l) => l,
            Err(e) => {
                report
                    .failures
                    .push(format!("lift failed for {tree}: {e}"));
                continue;
            }
        };
        match enriched_by_tree.get(tree).map(Vec::as_slice) {
            Some([unique]) if *unique == lifted => {}
            other => report.failures.push(format!(
                "lift for {tree} gave `{lifted}`, enumeration holds {other:?}"
            )),
        }
    }

    Ok(report)
}
