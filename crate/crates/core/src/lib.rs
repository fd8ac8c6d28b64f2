//! A finite combinatorial calculus of dilators: denotation systems with
//! priority permutations and distance data, the flower calculus (integration
//! and differentiation), dendrogram presentations with their decode/rebuild
//! equivalence, decidable-tree reductions to order and dilator families, and
//! the subsidiary games driven by those families.
//!
//! Everything operates at desk scale with exhaustive oracles: diagram spaces
//! are enumerated outright, laws are checked by brute force, and each
//! construction is cross-validated against an independent route.

pub mod coded;
pub mod dendrogram;
pub mod dilator;
pub mod elementary;
pub mod exec;
pub mod flower;
pub mod game;
pub mod gen;
pub mod order;
pub mod pi;
pub mod sort;

pub use dilator::{
    apply_map, apply_order, applied_order, bad_sequence_probe, check_embedding,
    compare_applied, compare_applied_nat, compare_under_diagram, isomorphic_by_data,
    search_embedding, search_isomorphism, validate_predilator, AppliedElement,
    DilatorError, Predilator, PresentedPredilator, TermId, ValidationReport, Violation,
};
pub use order::{
    diag, diag_pair, enum_arity_diagrams, kb_compare, kb_compare_nat, seq_at, seq_index,
    ArityDiagram, FiniteOrder, IncreasingMap, OrderError, SeqEnumerator,
    DEFAULT_DIAGRAM_BOUND,
};
