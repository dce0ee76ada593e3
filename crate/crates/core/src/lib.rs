//! Build a city knowledge graph from CSV files, project it into
//! contextualized CSV documents, find the indicators those documents can
//! feed, and aggregate them for dashboards.
//!
//! ```
//! use kgforge::{fixture, serializer, vocab::VocabularyRegistry};
//!
//! let reg = VocabularyRegistry::builtin();
//! let kg = fixture::kg(&reg);
//! let bundle = serializer::serialize_kg(&kg, &reg).unwrap();
//! assert_eq!(bundle.documents.len(), 2);
//! ```

pub mod ccsv;
pub mod cli;
pub mod dashboard;
pub mod discovery;
pub mod fixture;
mod fsutil;
pub mod ingest;
pub mod ns;
pub mod rdf;
pub mod serializer;
pub mod service;
#[cfg(test)]
mod testutil;
pub mod vocab;
pub mod workspace;
