//! The bundled bike-share sample: three stations and five trips.

use crate::ingest::{characterize, CharacterizationAnswers, IngestMapping};
use crate::rdf::Graph;
use crate::vocab::VocabularyRegistry;
use crate::workspace::IngestRequest;

pub const STATIONS_CSV: &str = include_str!("../fixtures/bicycle/stations.csv");
pub const TRIPS_CSV: &str = include_str!("../fixtures/bicycle/trips.csv");
pub const STATIONS_MAPPING: &str = include_str!("../fixtures/bicycle/stations.mapping.toml");
pub const TRIPS_MAPPING: &str = include_str!("../fixtures/bicycle/trips.mapping.toml");
pub const CHARACTERIZATION: &str = include_str!("../fixtures/bicycle/characterization.toml");

pub fn characterization() -> CharacterizationAnswers {
    toml::from_str(CHARACTERIZATION).expect("bundled characterization parses")
}

pub fn stations_mapping() -> IngestMapping {
    toml::from_str(STATIONS_MAPPING).expect("bundled mapping parses")
}

pub fn trips_mapping() -> IngestMapping {
    toml::from_str(TRIPS_MAPPING).expect("bundled mapping parses")
}

/// Upload bodies for stations then trips.
pub fn requests() -> Vec<IngestRequest> {
    vec![
        IngestRequest {
            csv: STATIONS_CSV.to_string(),
            mapping: stations_mapping(),
            characterization: characterization(),
        },
        IngestRequest {
            csv: TRIPS_CSV.to_string(),
            mapping: trips_mapping(),
            characterization: characterization(),
        },
    ]
}

/// The KG after loading both files.
pub fn kg(reg: &VocabularyRegistry) -> Graph {
    let mut g = Graph::new();
    for r in requests() {
        let ch = characterize(&r.characterization).expect("bundled answers are complete");
        g = crate::ingest::load_dataset(&r.csv, &r.mapping, &ch, &g, reg).expect("bundled data loads");
    }
    g
}
