//! Workbench for multiset-valued linear index grammars ({}-LIG) and
//! unordered vector grammars with dominance links (UVG-DL).
//!
//! A {}-LIG is a context-free grammar whose nonterminals carry multisets of
//! index symbols; a production may remove a multiset from its left-hand side,
//! distribute the remainder freely among the right-hand nonterminals, and add
//! fixed multisets to each of them. A UVG-DL groups context-free productions
//! into vectors that must be used as wholes, with dominance links constraining
//! where the members of one vector instance may attach relative to each other.
//!
//! The crate provides the data model and validation for both formalisms,
//! derivation and bounded exhaustive enumeration, the restricted index and
//! extended two form normal forms, conversions between the two formalisms,
//! and a chart recognizer for {}-LIGs.

pub mod convert;
pub mod derivation;
pub mod mslig;
pub mod multiset;
pub mod normal_forms;
pub mod recognizer;
pub mod samples;
pub mod uvgdl;

mod compile;

pub use convert::{mslig_to_uvgdl, uvgdl_to_mslig, ConvertError, LinkSymbol};
pub use derivation::{
    enumerate_mslig, DerivationMetrics, MsligEnumeration, Rational, SearchBounds, SearchStats,
    StepApplication,
};
pub use mslig::{validate_mslig, Item, MsligGrammar, MsligProduction, SententialForm};
pub use multiset::IndexMultiset;
pub use normal_forms::{is_etf, is_rinf, to_etf, to_rinf};
pub use recognizer::{
    combine_binary, recognize, ChartItem, Recognition, RecognizeError, Recognizer,
    RecognizerConfig,
};
pub use uvgdl::{
    validate_uvgdl, DerivationTree, DominanceLink, UvgdlGrammar, UvgdlProduction, Vector,
    VectorSymbol,
};
