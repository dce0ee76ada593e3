use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{VocabError, VocabularyRegistry};
use crate::ns;
use crate::rdf::{self, parse_turtle, Graph, Term};

const SAMPLE_CATALOG: &str = include_str!("../../catalog/sample-indicators.ttl");

/// The calculation a measure applies to its values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AggregateFunction {
    Count,
    Sum,
    Avg,
    Min,
    Max,
}

impl AggregateFunction {
    pub const ALL: [AggregateFunction; 5] = [
        AggregateFunction::Count,
        AggregateFunction::Sum,
        AggregateFunction::Avg,
        AggregateFunction::Min,
        AggregateFunction::Max,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AggregateFunction::Count => "count",
            AggregateFunction::Sum => "sum",
            AggregateFunction::Avg => "avg",
            AggregateFunction::Min => "min",
            AggregateFunction::Max => "max",
        }
    }

    /// The `qoe:Function` individual naming this function.
    pub fn iri(self) -> String {
        format!("{}{}", ns::QOE, self.as_str())
    }

    pub fn from_iri(iri: &str) -> Option<Self> {
        let local = iri.strip_prefix(ns::QOE)?;
        Self::ALL.into_iter().find(|f| f.as_str() == local)
    }

    /// Everything but `count` needs a value column to work on.
    pub fn needs_value(self) -> bool {
        self != AggregateFunction::Count
    }
}

impl fmt::Display for AggregateFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DimensionSpec {
    pub entity_class: String,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MeasureSpec {
    pub entity_class: String,
    pub function: AggregateFunction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_property: Option<String>,
}

/// An indicator: one or more measures, optionally grouped by dimensions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndicatorDef {
    pub iri: String,
    pub label: String,
    pub dimensions: Vec<DimensionSpec>,
    pub measures: Vec<MeasureSpec>,
}

impl IndicatorDef {
    /// Checks the structural rules; specs are put in canonical order.
    pub fn new(
        iri: impl Into<String>,
        label: impl Into<String>,
        mut dimensions: Vec<DimensionSpec>,
        mut measures: Vec<MeasureSpec>,
    ) -> Result<Self, VocabError> {
        let iri = iri.into();
        if measures.is_empty() {
            return Err(VocabError::MalformedIndicator {
                indicator: iri,
                missing: "qoe:definedBy some qoe:Measure".into(),
            });
        }
        for m in &measures {
            if m.function.needs_value() && m.value_property.is_none() {
                return Err(VocabError::MalformedIndicator {
                    indicator: iri,
                    missing: format!("qoe:onProperty for the {} measure on <{}>", m.function, m.entity_class),
                });
            }
        }
        dimensions.sort();
        dimensions.dedup();
        measures.sort();
        measures.dedup();
        Ok(IndicatorDef {
            iri,
            label: label.into(),
            dimensions,
            measures,
        })
    }

    /// Every entity class the indicator needs data for.
    pub fn entity_classes(&self) -> BTreeSet<&str> {
        self.dimensions
            .iter()
            .map(|d| d.entity_class.as_str())
            .chain(self.measures.iter().map(|m| m.entity_class.as_str()))
            .collect()
    }

    pub fn dimension_node(&self, index: usize) -> String {
        format!("{}_Dimension{}", self.iri, index + 1)
    }

    pub fn measure_node(&self, index: usize) -> String {
        format!("{}_Measure{}", self.iri, index + 1)
    }
}

/// Nodes written for one exported indicator.
pub struct ExportedNodes {
    pub dimensions: Vec<Term>,
    pub measures: Vec<Term>,
}

/// Writes `def` into `g` as an indicator resource with one node per spec.
pub fn export_indicator(def: &IndicatorDef, g: &mut Graph) -> ExportedNodes {
    let ind = rdf::iri(&def.iri);
    let add = |g: &mut Graph, s: &Term, p: &str, o: Term| {
        g.add(s.clone(), p, o).expect("exported terms are valid");
    };
    add(g, &ind, ns::RDF_TYPE, rdf::iri(ns::QOE_INDICATOR));
    add(g, &ind, ns::RDFS_LABEL, Term::literal(def.label.clone()));
    let mut out = ExportedNodes {
        dimensions: Vec::new(),
        measures: Vec::new(),
    };
    for (i, d) in def.dimensions.iter().enumerate() {
        let node = rdf::iri(&def.dimension_node(i));
        add(g, &ind, ns::QOE_DEFINED_BY, node.clone());
        add(g, &node, ns::RDF_TYPE, rdf::iri(ns::QOE_DIMENSION));
        add(g, &node, ns::QOE_HAS_ASSOCIATED_THING, rdf::iri(&d.entity_class));
        out.dimensions.push(node);
    }
    for (i, m) in def.measures.iter().enumerate() {
        let node = rdf::iri(&def.measure_node(i));
        add(g, &ind, ns::QOE_DEFINED_BY, node.clone());
        add(g, &node, ns::RDF_TYPE, rdf::iri(ns::QOE_MEASURE));
        add(g, &node, ns::QOE_HAS_ASSOCIATED_THING, rdf::iri(&m.entity_class));
        add(g, &node, ns::QOE_HAS_FUNCTION, rdf::iri(&m.function.iri()));
        if let Some(p) = &m.value_property {
            add(g, &node, ns::QOE_ON_PROPERTY, rdf::iri(p));
        }
        out.measures.push(node);
    }
    out
}

/// The shipped sample catalog.
pub fn sample_catalog() -> Graph {
    parse_turtle(SAMPLE_CATALOG).expect("sample catalog is well formed")
}

fn malformed(indicator: &Term, missing: String) -> VocabError {
    VocabError::MalformedIndicator {
        indicator: indicator
            .as_iri()
            .map(str::to_string)
            .unwrap_or_else(|| indicator.to_string()),
        missing,
    }
}

/// Classes declared in `g` itself as (transitive) subclasses of the indicator
/// class, plus the indicator class.
fn local_indicator_classes(g: &Graph) -> BTreeSet<Term> {
    let sub = rdf::iri(ns::RDFS_SUBCLASS_OF);
    let mut found: BTreeSet<Term> = [rdf::iri(ns::QOE_INDICATOR)].into_iter().collect();
    let mut frontier: Vec<Term> = found.iter().cloned().collect();
    while let Some(parent) = frontier.pop() {
        for child in g.subjects(&sub, &parent) {
            if found.insert(child.clone()) {
                frontier.push(child.clone());
            }
        }
    }
    found
}

fn parse_with(g: &Graph, extra_indicator_class: impl Fn(&str) -> bool) -> Result<Vec<IndicatorDef>, VocabError> {
    let type_p = rdf::iri(ns::RDF_TYPE);
    let local = local_indicator_classes(g);
    let mut indicators: BTreeSet<Term> = BTreeSet::new();
    for (class, subject) in g.with_predicate(&type_p) {
        let is_indicator = local.contains(class) || class.as_iri().is_some_and(&extra_indicator_class);
        if is_indicator {
            indicators.insert(subject.clone());
        }
    }

    let label_p = rdf::iri(ns::RDFS_LABEL);
    let defined_by = rdf::iri(ns::QOE_DEFINED_BY);
    let thing_p = rdf::iri(ns::QOE_HAS_ASSOCIATED_THING);
    let function_p = rdf::iri(ns::QOE_HAS_FUNCTION);
    let on_property = rdf::iri(ns::QOE_ON_PROPERTY);
    let measure_t = rdf::iri(ns::QOE_MEASURE);
    let dimension_t = rdf::iri(ns::QOE_DIMENSION);

    let mut out = Vec::new();
    for ind in &indicators {
        let Some(iri) = ind.as_iri() else {
            return Err(malformed(ind, "an IRI naming the indicator".into()));
        };
        let label = g
            .objects(ind, &label_p)
            .filter_map(Term::as_literal)
            .map(|l| l.lexical().to_string())
            .next()
            .ok_or_else(|| malformed(ind, format!("({ind}, rdfs:label, ...)")))?;
        let mut dimensions = Vec::new();
        let mut measures = Vec::new();
        for node in g.objects(ind, &defined_by) {
            let is_measure = g.objects(node, &type_p).any(|t| *t == measure_t);
            let is_dimension = g.objects(node, &type_p).any(|t| *t == dimension_t);
            if !is_measure && !is_dimension {
                return Err(malformed(ind, format!("({node}, rdf:type, qoe:Measure|qoe:Dimension)")));
            }
            let entity_class = g
                .objects(node, &thing_p)
                .filter_map(Term::as_iri)
                .next()
                .ok_or_else(|| malformed(ind, format!("({node}, qoe:hasAssociatedThing, ...)")))?
                .to_string();
            if is_dimension {
                dimensions.push(DimensionSpec {
                    entity_class: entity_class.clone(),
                });
            }
            if is_measure {
                let f_term = g
                    .object(node, &function_p)
                    .ok_or_else(|| malformed(ind, format!("({node}, qoe:hasFunction, ...)")))?;
                let function = f_term
                    .as_iri()
                    .and_then(AggregateFunction::from_iri)
                    .ok_or_else(|| malformed(ind, format!("a known qoe:Function for {node} (found {f_term})")))?;
                let value_property = g.object(node, &on_property).and_then(Term::as_iri).map(str::to_string);
                if function.needs_value() && value_property.is_none() {
                    return Err(malformed(ind, format!("({node}, qoe:onProperty, ...)")));
                }
                measures.push(MeasureSpec {
                    entity_class,
                    function,
                    value_property,
                });
            }
        }
        out.push(IndicatorDef::new(iri, label, dimensions, measures)?);
    }
    Ok(out)
}

/// Reads indicator definitions without checking entity classes against a
/// registry. Indicators come back ordered by IRI.
pub fn parse_catalog(g: &Graph) -> Result<Vec<IndicatorDef>, VocabError> {
    parse_with(g, |_| false)
}

/// Reads indicator definitions and checks every referenced entity class is
/// known to the registry.
pub fn load_indicator_catalog(g: &Graph, reg: &VocabularyRegistry) -> Result<Vec<IndicatorDef>, VocabError> {
    let defs = parse_with(g, |class| reg.is_subclass_of(class, ns::QOE_INDICATOR))?;
    for def in &defs {
        for class in def.entity_classes() {
            if !reg.has_class(class) {
                return Err(VocabError::UnknownClass(class.to_string()));
            }
        }
    }
    Ok(defs)
}
