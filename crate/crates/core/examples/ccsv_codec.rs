//! Build a contextualized CSV document by hand, write it, read it back.

use kgforge::ccsv::{read_ccsv, write_ccsv, CcsvDocument, ColumnBinding};
use kgforge::ns;
use kgforge::rdf::Graph;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let header = vec!["id".to_string(), "label".to_string(), "origin".to_string()];
    let rows = vec![
        vec!["t1".into(), "morning, \"rush\"".into(), "s1".into()],
        vec!["t2".into(), "two\nlines".into(), "".into()],
    ];
    let doc = CcsvDocument::new(
        "http://example.org/dataset/trips",
        ns::QOE_M_BICYCLE_SHARE_TRIP,
        header,
        vec![
            ColumnBinding::identifier(1, "id", ns::QOE_M_BICYCLE_SHARE_TRIP),
            ColumnBinding::attribute(2, "label", format!("{}label", ns::QOE_M)),
            ColumnBinding::reference(
                3,
                "origin",
                Some(format!("{}fromStation", ns::QOE_M)),
                ns::QOE_M_BICYCLE_SHARE_STATION,
            ),
        ],
        rows,
        None,
        &Graph::new(),
    )?;
    let text = write_ccsv(&doc);
    println!("{text}");
    let back = read_ccsv(&text)?;
    println!("round trip preserved rows: {}", back.rows == doc.rows);
    Ok(())
}
