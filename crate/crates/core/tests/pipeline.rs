mod common;

use kgforge::ccsv::{read_bundle_dir, write_ccsv};
use kgforge::rdf::{isomorphic, parse_turtle, serialize_turtle};
use kgforge::serializer::{serialize_and_discover, write_output};
use kgforge::vocab::{sample_catalog, VocabularyRegistry};

#[test]
fn bike_share_sample() {
    common::fixture_pipeline().unwrap();
}

#[test]
fn written_output_reads_back() {
    let reg = VocabularyRegistry::builtin();
    let kg = kgforge::fixture::kg(&reg);
    let (bundle, discovered, _) = serialize_and_discover(&kg, &reg, &sample_catalog()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = write_output(dir.path(), &bundle, &discovered).unwrap();
    assert_eq!(files.len(), 3);
    assert_eq!(read_bundle_dir(dir.path(), &reg).unwrap().documents, bundle.documents);
    let ttl = std::fs::read_to_string(dir.path().join("discovered-indicators.ttl")).unwrap();
    assert!(isomorphic(&parse_turtle(&ttl).unwrap(), &discovered));
}

#[test]
fn serialization_is_deterministic() {
    let reg = VocabularyRegistry::builtin();
    let a = serialize_and_discover(&kgforge::fixture::kg(&reg), &reg, &sample_catalog()).unwrap();
    let b = serialize_and_discover(&kgforge::fixture::kg(&reg), &reg, &sample_catalog()).unwrap();
    let text = |docs: &[kgforge::ccsv::CcsvDocument]| docs.iter().map(write_ccsv).collect::<Vec<_>>();
    assert_eq!(text(&a.0.documents), text(&b.0.documents));
    assert_eq!(serialize_turtle(&a.1), serialize_turtle(&b.1));
}

#[test]
fn sample_is_lossless() {
    let reg = VocabularyRegistry::builtin();
    assert!(common::lossless(&kgforge::fixture::kg(&reg), &reg));
}

#[test]
fn ingest_order_does_not_matter() {
    use kgforge::ingest::{characterize, load_dataset};
    let reg = VocabularyRegistry::builtin();
    let ch = characterize(&kgforge::fixture::characterization()).unwrap();
    let mut g = kgforge::rdf::Graph::new();
    for r in kgforge::fixture::requests().into_iter().rev() {
        g = load_dataset(&r.csv, &r.mapping, &ch, &g, &reg).unwrap();
    }
    assert!(isomorphic(&g, &kgforge::fixture::kg(&reg)));
}
