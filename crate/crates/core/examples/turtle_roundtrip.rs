//! Parse a small Turtle document, print it back and check the round trip.

use kgforge::rdf::{isomorphic, match_bgp, parse_turtle, serialize_turtle, PatternTerm, TriplePattern};

const DOC: &str = r#"
@prefix ex: <http://example.org/> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .

ex:s1 a ex:Station ; rdfs:label "Praça do Ferreira"@pt .
ex:s2 a ex:Station ; rdfs:label "Beira Mar" .
ex:t1 ex:from ex:s1 ; ex:to ex:s2 ; ex:minutes 12 .
_:anon ex:from ex:s2 .
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = parse_turtle(DOC)?;
    let text = serialize_turtle(&g);
    println!("{text}");
    let back = parse_turtle(&text)?;
    println!(
        "{} triples, isomorphic after round trip: {}",
        g.len(),
        isomorphic(&g, &back)
    );

    let from = kgforge::rdf::iri("http://example.org/from");
    let label = kgforge::rdf::iri("http://www.w3.org/2000/01/rdf-schema#label");
    let trips_with_origin_label = [
        TriplePattern::new(PatternTerm::var("trip"), from, PatternTerm::var("station")),
        TriplePattern::new(PatternTerm::var("station"), label, PatternTerm::var("name")),
    ];
    for b in match_bgp(&g, &trips_with_origin_label) {
        println!("{} departs from {}", b["trip"], b["name"]);
    }
    Ok(())
}
