//! Which catalog indicators can the serialized sample feed?

use kgforge::discovery::{discover, extract_facts};
use kgforge::fixture;
use kgforge::serializer::serialize_kg;
use kgforge::vocab::{load_indicator_catalog, sample_catalog, VocabularyRegistry};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let reg = VocabularyRegistry::builtin();
    let bundle = serialize_kg(&fixture::kg(&reg), &reg)?;
    let catalog = load_indicator_catalog(&sample_catalog(), &reg)?;
    for r in discover(&extract_facts(&bundle, &catalog, &reg)) {
        println!("{} {}", if r.suitable { "[x]" } else { "[ ]" }, r.indicator.label);
        for c in &r.covered {
            match &c.provider {
                Some(p) => println!("      {:?} {} <- {}", c.role, c.entity_class, p.document),
                None => println!("      {:?} {} <- nothing", c.role, c.entity_class),
            }
        }
    }
    Ok(())
}
