//! Generate dashboard specs from discovered indicators, aggregate them, and
//! cross-filter on a departure station.

use kgforge::dashboard::{aggregate, apply_selection, generate_specs, AggregateResult, FilterExpr};
use kgforge::fixture;
use kgforge::serializer::serialize_and_discover;
use kgforge::vocab::{sample_catalog, VocabularyRegistry};

fn show(r: &AggregateResult) {
    let groups: Vec<String> = r
        .groups
        .iter()
        .map(|g| format!("{}={}", g.label.as_deref().unwrap_or("total"), g.value))
        .collect();
    println!("  {}: {}", r.viz, groups.join(", "));
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let reg = VocabularyRegistry::builtin();
    let (bundle, discovered, _) = serialize_and_discover(&fixture::kg(&reg), &reg, &sample_catalog())?;
    let spec = generate_specs(&discovered, &bundle)?;
    println!("{}", serde_json::to_string_pretty(&spec)?);

    println!("unfiltered:");
    for v in &spec.visualizations {
        show(&aggregate(&bundle, v, &[])?);
    }
    println!("trips leaving s1:");
    let s1 = FilterExpr::eq("Bicycle-Share_Trip", "origin_station_id", "s1");
    for r in apply_selection(&bundle, &spec, &[s1])?.values() {
        show(r);
    }
    Ok(())
}
