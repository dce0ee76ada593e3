//! Load an extra ontology and walk the subclass hierarchy.

use kgforge::rdf::parse_turtle;
use kgforge::vocab::load_registry;

const EXTRA: &str = r#"
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
@prefix owl: <http://www.w3.org/2002/07/owl#> .
@prefix qoe-m: <http://hadatac.org/ont/qoe-m#> .
@prefix ex: <http://example.org/mobility#> .

ex:ElectricBikeTrip a owl:Class ; rdfs:subClassOf qoe-m:Bicycle-Share_Trip .
ex:CargoBikeTrip a owl:Class ; rdfs:subClassOf ex:ElectricBikeTrip .
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let reg = load_registry(&[parse_turtle(EXTRA)?])?;
    let cargo = "http://example.org/mobility#CargoBikeTrip";
    println!("superclasses of {cargo}:");
    for c in reg.subclass_closure(cargo)? {
        println!("  {c}");
    }
    println!(
        "CargoBikeTrip is a Bicycle-Share_Trip: {}",
        reg.is_subclass_of(cargo, kgforge::ns::QOE_M_BICYCLE_SHARE_TRIP)
    );
    Ok(())
}
