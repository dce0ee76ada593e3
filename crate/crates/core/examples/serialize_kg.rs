//! Project the sample KG into one CCSV document per class and write them
//! to a directory (a temp dir unless one is given).

use kgforge::fixture;
use kgforge::serializer::{serialize_and_discover, write_output};
use kgforge::vocab::{sample_catalog, VocabularyRegistry};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let reg = VocabularyRegistry::builtin();
    let kg = fixture::kg(&reg);
    let (bundle, discovered, _) = serialize_and_discover(&kg, &reg, &sample_catalog())?;
    let dir = match std::env::args().nth(1) {
        Some(d) => std::path::PathBuf::from(d),
        None => std::env::temp_dir().join("kgforge-serialize-example"),
    };
    for f in write_output(&dir, &bundle, &discovered)? {
        println!("wrote {}", dir.join(f).display());
    }
    let trips = bundle.document("Bicycle-Share_Trip").expect("trips document");
    println!("\n{}", kgforge::ccsv::write_ccsv(trips));
    Ok(())
}
