//! Indicator suitability over a serialized KG.
//!
//! Facts mirror the inputs: which spec nodes define each indicator, which
//! entity class each spec needs, which classes the documents hold records
//! of, and the subclass axioms. A spec is covered when some document holds
//! records of a (reflexive, transitive) subclass of its entity class; an
//! indicator is suitable when every spec is covered.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::ccsv::CcsvBundle;
use crate::ns;
use crate::rdf::{self, Graph};
use crate::vocab::{export_indicator, IndicatorDef, VocabularyRegistry};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FactBase {
    /// (indicator, spec node)
    pub defined_by: BTreeSet<(String, String)>,
    /// (spec node, entity class)
    pub associated_thing: BTreeSet<(String, String)>,
    /// (dataset IRI, records class)
    pub contains_records_of: BTreeSet<(String, String)>,
    /// (child, parent)
    pub subclass: BTreeSet<(String, String)>,
    /// Dataset IRI → document name.
    pub documents: BTreeMap<String, String>,
    /// The indicators in catalog order.
    pub indicators: Vec<IndicatorDef>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecRole {
    Dimension,
    Measure,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Provider {
    pub entity_class: String,
    pub dataset: String,
    pub document: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpecCoverage {
    pub node: String,
    pub role: SpecRole,
    pub entity_class: String,
    pub provider: Option<Provider>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuitabilityResult {
    pub indicator: IndicatorDef,
    pub covered: Vec<SpecCoverage>,
    pub suitable: bool,
}

fn spec_nodes(def: &IndicatorDef) -> Vec<(String, SpecRole, &str)> {
    let dims = def
        .dimensions
        .iter()
        .enumerate()
        .map(|(i, d)| (def.dimension_node(i), SpecRole::Dimension, d.entity_class.as_str()));
    let measures = def
        .measures
        .iter()
        .enumerate()
        .map(|(i, m)| (def.measure_node(i), SpecRole::Measure, m.entity_class.as_str()));
    dims.chain(measures).collect()
}

pub fn extract_facts(bundle: &CcsvBundle, catalog: &[IndicatorDef], reg: &VocabularyRegistry) -> FactBase {
    let mut f = FactBase {
        subclass: reg.subclass_axioms(),
        indicators: catalog.to_vec(),
        ..FactBase::default()
    };
    for def in catalog {
        for (node, _, class) in spec_nodes(def) {
            f.defined_by.insert((def.iri.clone(), node.clone()));
            f.associated_thing.insert((node, class.to_string()));
        }
    }
    for d in &bundle.documents {
        f.contains_records_of
            .insert((d.dataset_iri.clone(), d.records_class.clone()));
        f.documents.insert(d.dataset_iri.clone(), d.name().to_string());
    }
    f
}

/// Reflexive-transitive `subclass` over every class mentioned in the facts,
/// computed by semi-naive iteration: each round joins only the pairs derived
/// in the previous round with the base axioms.
fn subclass_star(f: &FactBase) -> BTreeSet<(String, String)> {
    let mut classes: BTreeSet<&str> = BTreeSet::new();
    for (c, p) in &f.subclass {
        classes.insert(c);
        classes.insert(p);
    }
    classes.extend(f.associated_thing.iter().map(|(_, c)| c.as_str()));
    classes.extend(f.contains_records_of.iter().map(|(_, c)| c.as_str()));

    let mut parents: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (c, p) in &f.subclass {
        parents.entry(c).or_default().push(p);
    }
    let mut all: BTreeSet<(String, String)> = classes.iter().map(|c| (c.to_string(), c.to_string())).collect();
    let mut delta = all.clone();
    while !delta.is_empty() {
        let mut next = BTreeSet::new();
        for (child, mid) in &delta {
            for p in parents.get(mid.as_str()).into_iter().flatten() {
                let pair = (child.clone(), p.to_string());
                if !all.contains(&pair) {
                    next.insert(pair);
                }
            }
        }
        all.extend(next.iter().cloned());
        delta = next;
    }
    all
}

/// One result per indicator, in catalog order.
///
/// When several documents could provide a spec, an exact class match is
/// preferred, then the lowest (class, dataset) pair.
pub fn discover(f: &FactBase) -> Vec<SuitabilityResult> {
    let star = subclass_star(f);
    f.indicators
        .iter()
        .map(|def| {
            let covered: Vec<SpecCoverage> = spec_nodes(def)
                .into_iter()
                .map(|(node, role, class)| {
                    let provider = f
                        .contains_records_of
                        .iter()
                        .filter(|(_, rc)| star.contains(&(rc.clone(), class.to_string())))
                        .min_by_key(|(ds, rc)| (rc != class, rc.clone(), ds.clone()))
                        .map(|(ds, rc)| Provider {
                            entity_class: rc.clone(),
                            dataset: ds.clone(),
                            document: f
                                .documents
                                .get(ds)
                                .cloned()
                                .unwrap_or_else(|| ns::local_name(rc).to_string()),
                        });
                    SpecCoverage {
                        node,
                        role,
                        entity_class: class.to_string(),
                        provider,
                    }
                })
                .collect();
            let suitable = covered.iter().all(|c| c.provider.is_some());
            SuitabilityResult {
                indicator: def.clone(),
                covered,
                suitable,
            }
        })
        .collect()
}

/// Suitable indicators as Turtle-ready triples, each spec node annotated
/// with `qoe:coveredBy` its providing dataset. No triples when nothing is
/// suitable.
pub fn export_discovered(results: &[SuitabilityResult]) -> Graph {
    let mut g = rdf::graph_with_standard_prefixes();
    for r in results.iter().filter(|r| r.suitable) {
        export_indicator(&r.indicator, &mut g);
        for c in &r.covered {
            if let Some(p) = &c.provider {
                g.add(rdf::iri(&c.node), ns::QOE_COVERED_BY, rdf::iri(&p.dataset))
                    .expect("exported terms are valid");
            }
        }
    }
    g
}
