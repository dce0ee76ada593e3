//! Dashboard specifications derived from discovered indicators, and the
//! aggregates that feed them.

mod aggregate;

pub use aggregate::{
    aggregate, apply_selection, parse_number, AggregateResult, FilterExpr, FilterOp, Group, GroupKey, UNLINKED_LABEL,
};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ccsv::{CcsvBundle, CcsvDocument, ColumnRole};
use crate::ns;
use crate::rdf::{self, Graph};
use crate::vocab::{parse_catalog, AggregateFunction, IndicatorDef, VocabError};

#[derive(Debug, Error)]
pub enum DashboardError {
    #[error("cannot bind {0}")]
    UnresolvableBinding(String),
    #[error("document `{document}` has no column `{column}`")]
    UnknownColumn { document: String, column: String },
    #[error("no document named `{0}`")]
    UnknownDocument(String),
    #[error("{document} row {row} column {column}: `{value}` is not a number")]
    NonNumericCell {
        document: String,
        column: String,
        row: usize,
        value: String,
    },
    #[error("invalid filter: {0}")]
    InvalidFilter(String),
    #[error("invalid visualization `{id}`: {reason}")]
    InvalidViz { id: String, reason: String },
    #[error(transparent)]
    Vocab(#[from] VocabError),
}

impl DashboardError {
    pub fn name(&self) -> &'static str {
        match self {
            DashboardError::UnresolvableBinding(_) => "UnresolvableBindingError",
            DashboardError::UnknownColumn { .. } => "UnknownColumnError",
            DashboardError::UnknownDocument(_) => "UnknownDocumentError",
            DashboardError::NonNumericCell { .. } => "NonNumericCellError",
            DashboardError::InvalidFilter(_) => "InvalidFilterError",
            DashboardError::InvalidViz { .. } => "InvalidVizError",
            DashboardError::Vocab(e) => e.name(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartType {
    Bar,
    Line,
    Table,
    Number,
}

/// Where group keys come from. `column` is the dimension document's
/// identifier column when the dimension is reached through a join.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionBinding {
    pub document: String,
    pub column: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label_column: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureBinding {
    pub document: String,
    pub column: String,
    pub function: AggregateFunction,
}

/// A reference column of the measure document pointing at the dimension
/// document's identifier column.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JoinPath {
    pub measure_column: String,
    pub dimension_column: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VizSpec {
    pub id: String,
    pub title: String,
    pub chart_type: ChartType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indicator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension_binding: Option<DimensionBinding>,
    pub measure_binding: MeasureBinding,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub join_path: Option<JoinPath>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DashboardSpec {
    pub id: String,
    pub title: String,
    pub visualizations: Vec<VizSpec>,
}

impl DashboardSpec {
    pub fn viz(&self, id: &str) -> Option<&VizSpec> {
        self.visualizations.iter().find(|v| v.id == id)
    }

    /// Replaces visualizations with matching ids and appends the rest.
    pub fn merge_edits(&mut self, edits: Vec<VizSpec>) {
        for e in edits {
            match self.visualizations.iter_mut().find(|v| v.id == e.id) {
                Some(slot) => *slot = e,
                None => self.visualizations.push(e),
            }
        }
    }
}

pub(crate) fn document<'a>(bundle: &'a CcsvBundle, name: &str) -> Result<&'a CcsvDocument, DashboardError> {
    bundle
        .document(name)
        .ok_or_else(|| DashboardError::UnknownDocument(name.to_string()))
}

pub(crate) fn position(doc: &CcsvDocument, column: &str) -> Result<usize, DashboardError> {
    doc.position(column).ok_or_else(|| DashboardError::UnknownColumn {
        document: doc.name().to_string(),
        column: column.to_string(),
    })
}

const TEMPORAL: [&str; 4] = [
    ns::XSD_DATE,
    ns::XSD_DATE_TIME,
    ns::XSD_G_YEAR_MONTH,
    "http://www.w3.org/2001/XMLSchema#gYear",
];

fn is_temporal(doc: &CcsvDocument, column: &str) -> bool {
    matches!(
        doc.binding_named(column).map(|b| &b.role),
        Some(ColumnRole::Attribute { datatype: Some(dt), .. }) if TEMPORAL.contains(&dt.as_str())
    )
}

/// Checks a visualization against the bundle: documents and columns exist,
/// the chart type agrees with the presence of a dimension, and a join is
/// given exactly when the dimension lives in another document.
pub fn validate_viz(viz: &VizSpec, bundle: &CcsvBundle) -> Result<(), DashboardError> {
    let invalid = |reason: &str| DashboardError::InvalidViz {
        id: viz.id.clone(),
        reason: reason.to_string(),
    };
    let m = &viz.measure_binding;
    let mdoc = document(bundle, &m.document)?;
    position(mdoc, &m.column)?;
    match (&viz.dimension_binding, viz.chart_type) {
        (None, ChartType::Number) => {}
        (None, _) => return Err(invalid("only number charts have no dimension")),
        (Some(_), ChartType::Number) => return Err(invalid("number charts take no dimension")),
        (Some(_), _) => {}
    }
    if let Some(d) = &viz.dimension_binding {
        let ddoc = document(bundle, &d.document)?;
        position(ddoc, &d.column)?;
        if let Some(l) = &d.label_column {
            position(ddoc, l)?;
        }
        let same = d.document == m.document;
        match (&viz.join_path, same) {
            (None, true) => {}
            (Some(_), true) => return Err(invalid("join given but dimension and measure share a document")),
            (None, false) => return Err(invalid("dimension in another document needs a join")),
            (Some(j), false) => {
                position(mdoc, &j.measure_column)?;
                position(ddoc, &j.dimension_column)?;
                if j.dimension_column != d.column {
                    return Err(invalid("join must end at the dimension column"));
                }
            }
        }
    } else if viz.join_path.is_some() {
        return Err(invalid("join given without a dimension"));
    }
    Ok(())
}

/// Lowercase plural of the last word of a class's local name.
pub fn plural_noun(class: &str) -> String {
    let word = ns::local_name(class)
        .rsplit(['_', '-'])
        .next()
        .unwrap_or_default()
        .to_lowercase();
    if word.ends_with('s') || word.ends_with('x') || word.ends_with("ch") || word.ends_with("sh") {
        format!("{word}es")
    } else if word.ends_with('y') && !word.ends_with("ay") && !word.ends_with("ey") && !word.ends_with("oy") {
        format!("{}ies", &word[..word.len() - 1])
    } else {
        format!("{word}s")
    }
}

/// (indicator, entity class) → dataset IRI from the coverage annotations.
fn coverage(discovered: &Graph) -> BTreeMap<(String, String), String> {
    let defined_by = rdf::iri(ns::QOE_DEFINED_BY);
    let thing = rdf::iri(ns::QOE_HAS_ASSOCIATED_THING);
    let covered_by = rdf::iri(ns::QOE_COVERED_BY);
    let mut out = BTreeMap::new();
    for (node, ind) in discovered.with_predicate(&defined_by) {
        let (Some(ind), Some(class), Some(ds)) = (
            ind.as_iri(),
            discovered.object(node, &thing).and_then(|t| t.as_iri()),
            discovered.object(node, &covered_by).and_then(|t| t.as_iri()),
        ) else {
            continue;
        };
        out.insert((ind.to_string(), class.to_string()), ds.to_string());
    }
    out
}

fn provider<'a>(
    bundle: &'a CcsvBundle,
    covered: &BTreeMap<(String, String), String>,
    def: &IndicatorDef,
    class: &str,
    what: &str,
) -> Result<&'a CcsvDocument, DashboardError> {
    let by_dataset = covered
        .get(&(def.iri.clone(), class.to_string()))
        .and_then(|ds| bundle.documents.iter().find(|d| d.dataset_iri == *ds));
    by_dataset
        .or_else(|| bundle.document_for_class(class))
        .ok_or_else(|| DashboardError::UnresolvableBinding(format!("{what} <{class}> of <{}>: no document", def.iri)))
}

fn measure_column(
    doc: &CcsvDocument,
    function: AggregateFunction,
    property: Option<&str>,
    def: &IndicatorDef,
) -> Result<String, DashboardError> {
    match property {
        None => Ok(doc.identifier_binding().name.clone()),
        Some(p) => doc
            .bindings
            .iter()
            .find(|b| b.property() == Some(p))
            .map(|b| b.name.clone())
            .ok_or_else(|| {
                DashboardError::UnresolvableBinding(format!(
                    "{function} measure of <{}>: document `{}` has no column for <{p}>",
                    def.iri,
                    doc.name()
                ))
            }),
    }
}

fn label_column(doc: &CcsvDocument) -> Option<String> {
    doc.position("label").map(|_| "label".to_string())
}

/// One visualization per suitable indicator, measure, dimension and
/// reference column linking them; number cards for indicators without
/// dimensions.
pub fn generate_specs(discovered: &Graph, bundle: &CcsvBundle) -> Result<DashboardSpec, DashboardError> {
    let defs = parse_catalog(discovered)?;
    let covered = coverage(discovered);
    let mut vizzes = Vec::new();
    for def in &defs {
        for m in &def.measures {
            let mdoc = provider(bundle, &covered, def, &m.entity_class, "measure")?;
            let column = measure_column(mdoc, m.function, m.value_property.as_deref(), def)?;
            let measure = MeasureBinding {
                document: mdoc.name().to_string(),
                column: column.clone(),
                function: m.function,
            };
            let what = match m.function {
                AggregateFunction::Count => plural_noun(&mdoc.records_class),
                f => format!("{f} of {column}"),
            };
            if def.dimensions.is_empty() {
                let title = match m.function {
                    AggregateFunction::Count => format!("number of {what}"),
                    _ => what,
                };
                vizzes.push(VizSpec {
                    id: String::new(),
                    title,
                    chart_type: ChartType::Number,
                    indicator: Some(def.iri.clone()),
                    dimension_binding: None,
                    measure_binding: measure,
                    join_path: None,
                });
                continue;
            }
            for d in &def.dimensions {
                let ddoc = provider(bundle, &covered, def, &d.entity_class, "dimension")?;
                let id_col = ddoc.identifier_binding().name.clone();
                let chart_for = |col: &str| {
                    if is_temporal(ddoc, col) || label_column(ddoc).is_some_and(|l| is_temporal(ddoc, &l)) {
                        ChartType::Line
                    } else {
                        ChartType::Bar
                    }
                };
                if ddoc.name() == mdoc.name() {
                    vizzes.push(VizSpec {
                        id: String::new(),
                        title: format!("{what} by {id_col}"),
                        chart_type: chart_for(&id_col),
                        indicator: Some(def.iri.clone()),
                        dimension_binding: Some(DimensionBinding {
                            document: ddoc.name().to_string(),
                            column: id_col.clone(),
                            label_column: label_column(ddoc),
                        }),
                        measure_binding: measure.clone(),
                        join_path: None,
                    });
                    continue;
                }
                let refs: Vec<&str> = mdoc
                    .bindings
                    .iter()
                    .filter(|b| b.referenced_class() == Some(ddoc.records_class.as_str()))
                    .map(|b| b.name.as_str())
                    .collect();
                if refs.is_empty() {
                    return Err(DashboardError::UnresolvableBinding(format!(
                        "dimension <{}> of <{}>: `{}` has no column referencing `{}`",
                        d.entity_class,
                        def.iri,
                        mdoc.name(),
                        ddoc.name()
                    )));
                }
                for r in refs {
                    vizzes.push(VizSpec {
                        id: String::new(),
                        title: format!("{what} by {r}"),
                        chart_type: chart_for(&id_col),
                        indicator: Some(def.iri.clone()),
                        dimension_binding: Some(DimensionBinding {
                            document: ddoc.name().to_string(),
                            column: id_col.clone(),
                            label_column: label_column(ddoc),
                        }),
                        measure_binding: measure.clone(),
                        join_path: Some(JoinPath {
                            measure_column: r.to_string(),
                            dimension_column: id_col.clone(),
                        }),
                    });
                }
            }
        }
    }
    for (i, v) in vizzes.iter_mut().enumerate() {
        v.id = format!("viz-{}", i + 1);
    }
    let ids: BTreeSet<&str> = vizzes.iter().map(|v| v.id.as_str()).collect();
    debug_assert_eq!(ids.len(), vizzes.len());
    Ok(DashboardSpec {
        id: "generated".into(),
        title: "Discovered indicators".into(),
        visualizations: vizzes,
    })
}
