//! Characterize and load the bike-share CSV files, then show the
//! provenance chain the loader added.

use kgforge::fixture;
use kgforge::ingest::{characterize, load_dataset};
use kgforge::rdf::{match_bgp, serialize_turtle, Graph, PatternTerm, TriplePattern};
use kgforge::{ns, rdf};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let reg = kgforge::vocab::VocabularyRegistry::builtin();
    let ch = characterize(&fixture::characterization())?;
    println!("study {} on {}", ch.study_iri, ch.data_source.platform_iri);

    let kg = load_dataset(
        fixture::STATIONS_CSV,
        &fixture::stations_mapping(),
        &ch,
        &Graph::new(),
        &reg,
    )?;
    let kg = load_dataset(fixture::TRIPS_CSV, &fixture::trips_mapping(), &ch, &kg, &reg)?;
    println!("{} triples", kg.len());

    let chain = [
        TriplePattern::new(
            PatternTerm::var("acq"),
            rdf::iri(ns::HASCO_IS_MEMBER_OF),
            PatternTerm::var("study"),
        ),
        TriplePattern::new(
            PatternTerm::var("acq"),
            rdf::iri(ns::HASCO_HAS_DEPLOYMENT),
            PatternTerm::var("dep"),
        ),
    ];
    for b in match_bgp(&kg, &chain) {
        println!("{} belongs to {} via {}", b["acq"], b["study"], b["dep"]);
    }
    if std::env::args().any(|a| a == "--dump") {
        println!("{}", serialize_turtle(&kg));
    }
    Ok(())
}
