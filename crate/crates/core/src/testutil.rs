//! Shared fixtures for unit tests.

use crate::ingest::{characterize, load_dataset, CharacterizationAnswers, IngestMapping};
use crate::ns;
use crate::rdf::Graph;
use crate::vocab::VocabularyRegistry;

fn answers() -> CharacterizationAnswers {
    toml::from_str(
        r#"
        acquisition_kind = "manual_annotation"
        [data_source]
        platform_label = "BikeShare-DB"
        [study]
        label = "Fortaleza Mobility"
        [time_frame]
        start = "2016-07-01T00:00:00Z"
        end = "2016-07-31T23:59:59Z"
        "#,
    )
    .unwrap()
}

fn mapping(class: &str, cols: &[(&str, &str, &str)]) -> IngestMapping {
    let mut text =
        format!("records_class = \"{class}\"\ncolumns = [\n  {{ column = \"id\", role = \"identifier\" }},\n");
    for (col, prop, target) in cols {
        if target.is_empty() {
            text += &format!(
                "  {{ column = \"{col}\", role = \"attribute\", property = \"{}{prop}\" }},\n",
                ns::QOE_M
            );
        } else {
            text += &format!(
                "  {{ column = \"{col}\", role = \"reference\", property = \"{}{prop}\", target_class = \"{}{target}\" }},\n",
                ns::QOE_M,
                ns::QOE_M
            );
        }
    }
    text += "]\n";
    toml::from_str(&text).unwrap()
}

pub(crate) fn fixture_kg() -> Graph {
    let reg = VocabularyRegistry::builtin();
    let ch = characterize(&answers()).unwrap();
    let stations = mapping(
        ns::QOE_M_BICYCLE_SHARE_STATION,
        &[
            ("label", "label", ""),
            ("lat", "latitude", ""),
            ("long", "longitude", ""),
        ],
    );
    let trips = mapping(
        ns::QOE_M_BICYCLE_SHARE_TRIP,
        &[
            ("user_id", "user", "User"),
            ("origin_station_id", "fromStation", "Bicycle-Share_Station"),
            ("destination_station_id", "toStation", "Bicycle-Share_Station"),
        ],
    );
    let g = load_dataset(
        "id,label,lat,long\ns1,A,1,2\ns2,B,3,4\ns3,C,5,6\n",
        &stations,
        &ch,
        &Graph::new(),
        &reg,
    )
    .unwrap();
    load_dataset(
        "id,user_id,origin_station_id,destination_station_id\n\
         t1,u1,s1,s2\nt2,u2,s1,s3\nt3,u2,s2,s1\nt4,u1,s1,s2\nt5,u3,s3,s3\n",
        &trips,
        &ch,
        &g,
        &reg,
    )
    .unwrap()
}
