//! Structural search over MathML formulae.
//!
//! Expressions are parsed into [`ExprTree`]s, optionally enriched from
//! presentation to content markup with learned rewrite rules, encoded as
//! path keywords across three fields and ranked with a TF-IDF dismax scorer.

pub mod app;
pub mod encoder;
pub mod engine;
pub mod enrich;
pub mod error;
pub mod eval;
pub mod expr;
pub mod index;
pub mod synth;

pub use encoder::{encode_document, encode_query, Field, FieldedTerms};
pub use engine::{Engine, Mode, Query};
pub use enrich::{apply_rules, cross_validate, extract_rules, EnrichmentResult, RuleSet};
pub use error::{Error, Result};
pub use eval::{Grade, MetricsReport, Qrels, Retriever};
pub use expr::{
    leaf_count, node_token, parse_mathml, serialize, Document, ExprNode, ExprTree, Markup, NodeKind,
};
pub use index::{build_index, Index, SearchResult};
