//! Bottom-up shift-reduce dependency parsing with canonical, ambiguity-free
//! derivations.
//!
//! A transition system here is a set of reduction templates `la(p,q)` /
//! `ra(p,q)` over stack positions (plus the ever-present shift). Such systems
//! usually derive the same tree through many transition orders. This crate
//! implements, for any monotonic system:
//!
//! - the base machinery: configurations, transitions, computations
//!   ([`Configuration`], [`Computation`]);
//! - the enrichment that annotates stack symbols with Boolean features so
//!   that every derivable tree keeps exactly one complete computation
//!   ([`EnrichedSystem`]);
//! - the canonical oracle mapping a tree to that unique derivation, the
//!   rewrite turning any computation into the canonical one, and the lift
//!   from canonical base computations to enriched ones ([`canonical_oracle`],
//!   [`canonicalize`], [`lift_to_enriched`]);
//! - brute-force verifiers that enumerate all computations on short
//!   sentences and check the above claims exhaustively ([`check_equivalence`],
//!   [`check_oracle`]);
//! - CoNLL-X ingestion and oracle-coverage statistics ([`parse_conllx`],
//!   [`coverage`]).
//!
//! ```
//! use canonparse::{canonical_oracle, DependencyTree, SystemSpec};
//!
//! let tree = DependencyTree::from_heads(&[2, 0, 2]).unwrap();
//! let system = SystemSpec::arc_standard();
//! let comp = canonical_oracle(&tree, &system).success().unwrap();
//! assert_eq!(comp.to_string(), "sh sh la:2,1 sh ra:2,1 ra:2,1");
//! assert_eq!(comp.tree(&system).unwrap(), tree);
//! ```

pub mod config;
pub mod conll;
pub mod enriched;
pub mod oracle;
pub mod system;
pub mod tree;
pub mod verify;

pub use config::{Computation, CompletionError, Configuration, ReplayError, StepError, Transition};
pub use conll::{
    coverage, coverage_tsv, parse_conllx, write_conllx, ConllSentence, ConllToken, CoverageRow,
    MalformedSentence,
};
pub use enriched::{
    AnnotatedSymbol, EnrichedComputation, EnrichedConfiguration, EnrichedSystem,
    EnrichedTransition, FeatureVector, NotMonotonicError, Variant,
};
pub use oracle::{
    canonical_oracle, canonicalize, compatible_reductions, highest_priority, is_troublesome,
    lift_to_enriched, phi, CompatibleReduction, OracleOutcome, StuckReport,
};
pub use system::{ReductionKind, ReductionTemplate, SystemError, SystemSpec};
pub use tree::{all_trees, Arc, DependencyTree, NodeId, TreeError};
pub use verify::{
    ambiguity_report, check_equivalence, check_oracle, enriched_ambiguity_report,
    enumerate_computations, enumerate_enriched, reachable_feature_vectors, BudgetExceeded,
    EnumerationReport, EquivalenceReport, OracleReport, VerifyError, DEFAULT_BUDGET,
};
