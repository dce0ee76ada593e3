//! In-memory RDF: terms, graphs, a Turtle subset, and basic graph pattern
//! matching.

mod graph;
mod iso;
mod pattern;
mod term;
mod turtle;

pub use graph::Graph;
pub use iso::isomorphic;
pub use pattern::{match_bgp, Binding, PatternTerm, TriplePattern};
pub use term::{Literal, Term, Triple};
pub use turtle::{parse_turtle, serialize_turtle};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RdfError {
    #[error("syntax error at line {line}, column {column} near `{token}`: {message}")]
    Syntax {
        line: usize,
        column: usize,
        token: String,
        message: String,
    },
    #[error("unknown prefix `{prefix}:` at line {line}, column {column}")]
    UnknownPrefix { prefix: String, line: usize, column: usize },
    #[error("invalid IRI `{0}`")]
    InvalidIri(String),
    #[error("invalid blank node label `{0}`")]
    InvalidBlankLabel(String),
    #[error("invalid prefix label `{0}`")]
    InvalidPrefix(String),
    #[error("literal `{0}` cannot be a subject")]
    LiteralSubject(String),
    #[error("predicate `{0}` is not an IRI")]
    NonIriPredicate(String),
}

impl RdfError {
    pub fn name(&self) -> &'static str {
        match self {
            RdfError::Syntax { .. } => "SyntaxError",
            RdfError::UnknownPrefix { .. } => "UnknownPrefixError",
            RdfError::InvalidIri(_) => "InvalidIriError",
            RdfError::InvalidBlankLabel(_) => "InvalidBlankLabelError",
            RdfError::InvalidPrefix(_) => "InvalidPrefixError",
            RdfError::LiteralSubject(_) => "LiteralSubjectError",
            RdfError::NonIriPredicate(_) => "NonIriPredicateError",
        }
    }
}

/// Shorthand for an IRI term from a string known to be a valid IRI.
///
/// Panics on invalid input; meant for constants and already-validated data.
pub fn iri(value: &str) -> Term {
    Term::iri(value).unwrap_or_else(|e| panic!("{e}"))
}

/// A graph with the crate's standard prefix table.
pub fn graph_with_standard_prefixes() -> Graph {
    let mut g = Graph::new();
    for (label, ns) in crate::ns::STANDARD_PREFIXES {
        g.set_prefix(label, ns).expect("standard prefixes are valid");
    }
    g
}
