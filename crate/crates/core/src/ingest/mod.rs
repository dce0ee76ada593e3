//! Loading raw CSV datasets into the KG.
//!
//! Each load adds typed instances for the rows plus the provenance chain
//! platform → deployment → acquisition → study they were produced under.

mod characterization;

pub use characterization::{
    characterize, AcquisitionKind, CharacterizationAnswers, DataSource, DataSourceAnswers, DatasetCharacterization,
    StudyAnswers, TimeFrame, TimeFrameAnswers,
};

use std::collections::BTreeMap;

use percent_encoding::{utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ccsv::{split_values, CcsvDocument, ColumnRole};
use crate::ns;
use crate::rdf::{self, Graph, Literal, RdfError, Term};
use crate::vocab::VocabularyRegistry;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("characterization is missing `{0}`")]
    IncompleteCharacterization(String),
    #[error("invalid characterization: {0}")]
    InvalidCharacterization(String),
    #[error("header does not match mapping: {0}")]
    HeaderMismatch(String),
    #[error("property <{0}> is not declared in the vocabulary")]
    UnknownProperty(String),
    #[error("class <{0}> is not declared in the vocabulary")]
    UnknownClass(String),
    #[error("invalid mapping: {0}")]
    InvalidMapping(String),
    #[error("identifier `{id}` appears on rows {first} and {second}")]
    DuplicateIdentifier { id: String, first: usize, second: usize },
    #[error("row {row} has an empty identifier")]
    EmptyIdentifier { row: usize },
    #[error("data row {row} has {actual} cells, header has {expected}")]
    RowWidth { row: usize, expected: usize, actual: usize },
    #[error("malformed CSV: {0}")]
    Csv(String),
    #[error(transparent)]
    Rdf(#[from] RdfError),
}

impl IngestError {
    pub fn name(&self) -> &'static str {
        match self {
            IngestError::IncompleteCharacterization(_) => "IncompleteCharacterizationError",
            IngestError::InvalidCharacterization(_) => "InvalidCharacterizationError",
            IngestError::HeaderMismatch(_) => "HeaderMismatchError",
            IngestError::UnknownProperty(_) => "UnknownPropertyError",
            IngestError::UnknownClass(_) => "UnknownClassError",
            IngestError::InvalidMapping(_) => "InvalidMappingError",
            IngestError::DuplicateIdentifier { .. } => "DuplicateIdentifierError",
            IngestError::EmptyIdentifier { .. } => "EmptyIdentifierError",
            IngestError::RowWidth { .. } => "RowWidthError",
            IngestError::Csv(_) => "CsvSyntaxError",
            IngestError::Rdf(e) => e.name(),
        }
    }

    /// Errors caused by incomplete characterization answers rather than by
    /// the data itself.
    pub fn is_characterization_gap(&self) -> bool {
        matches!(self, IngestError::IncompleteCharacterization(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "snake_case", deny_unknown_fields)]
pub enum MappingRole {
    Identifier,
    Attribute {
        property: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        datatype: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        language: Option<String>,
    },
    Reference {
        property: String,
        target_class: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnMapping {
    pub column: String,
    #[serde(flatten)]
    pub role: MappingRole,
}

/// How the columns of a CSV file map onto the KG. Columns not listed are
/// ignored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IngestMapping {
    pub records_class: String,
    /// Names the acquisition activity; defaults to the class local name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset_name: Option<String>,
    /// Splits cells into several values when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_separator: Option<char>,
    pub columns: Vec<ColumnMapping>,
}

impl IngestMapping {
    pub fn dataset_name(&self) -> &str {
        self.dataset_name
            .as_deref()
            .unwrap_or_else(|| ns::local_name(&self.records_class))
    }
}

/// Percent-encodes everything except unreserved characters.
const SEGMENT: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'.').remove(b'_').remove(b'~');

pub(crate) fn slug(label: &str) -> String {
    let mut out = String::new();
    for c in label.chars().flat_map(char::to_lowercase) {
        if c.is_ascii_alphanumeric() {
            out.push(c);
        } else if !out.ends_with('-') {
            out.push('-');
        }
    }
    let trimmed = out.trim_matches('-');
    if trimmed.is_empty() {
        "x".to_string()
    } else {
        trimmed.to_string()
    }
}

/// The IRI minted for the record of `class` with identifier `id`.
pub fn instance_iri(class: &str, id: &str) -> String {
    format!(
        "{}inst/{}/{}",
        ns::KG,
        utf8_percent_encode(ns::local_name(class), SEGMENT),
        utf8_percent_encode(id, SEGMENT)
    )
}

pub fn acquisition_iri(dataset_name: &str) -> String {
    format!("{}acquisition/{}", ns::KG, utf8_percent_encode(dataset_name, SEGMENT))
}

pub fn deployment_iri(ch: &DatasetCharacterization) -> String {
    let platform = slug(ns::local_name(&ch.data_source.platform_iri));
    match &ch.data_source.annotator_label {
        Some(a) => format!("{}deployment/{platform}--{}", ns::KG, slug(a)),
        None => format!("{}deployment/{platform}", ns::KG),
    }
}

fn date_time(t: &chrono::DateTime<chrono::Utc>) -> Term {
    Term::typed_literal(t.to_rfc3339_opts(chrono::SecondsFormat::Secs, true), ns::XSD_DATE_TIME)
}

fn put(g: &mut Graph, s: &Term, p: &str, o: Term) {
    g.add(s.clone(), p, o).expect("ingest builds valid triples");
}

/// Adds platform, instrument, deployment, study and the acquisition for one
/// dataset. Nodes shared between datasets are minted identically, so
/// repeated calls reuse them.
fn scaffold(g: &mut Graph, ch: &DatasetCharacterization, dataset_name: &str) -> Result<Term, IngestError> {
    let platform = Term::iri(ch.data_source.platform_iri.as_str())?;
    put(g, &platform, ns::RDF_TYPE, rdf::iri(ns::HACITO_INFORMATION_SYSTEM));
    put(
        g,
        &platform,
        ns::RDFS_LABEL,
        Term::literal(ch.data_source.platform_label.clone()),
    );

    let deployment = rdf::iri(&deployment_iri(ch));
    put(g, &deployment, ns::RDF_TYPE, rdf::iri(ns::VSTOI_DEPLOYMENT));
    put(g, &deployment, ns::VSTOI_HAS_PLATFORM, platform);
    if g.object(&deployment, &rdf::iri(ns::PROV_STARTED_AT)).is_none() {
        put(g, &deployment, ns::PROV_STARTED_AT, date_time(&ch.time_frame.start));
    }
    if let Some(label) = &ch.data_source.annotator_label {
        let instrument = rdf::iri(&format!("{}instrument/{}", ns::KG, slug(label)));
        put(g, &instrument, ns::RDF_TYPE, rdf::iri(ns::HACITO_ANNOTATOR_SOFTWARE));
        put(g, &instrument, ns::RDFS_LABEL, Term::literal(label.clone()));
        put(g, &deployment, ns::VSTOI_HAS_INSTRUMENT, instrument);
    }

    let study = Term::iri(ch.study_iri.as_str())?;
    put(g, &study, ns::RDF_TYPE, rdf::iri(ns::HASCO_STUDY));
    put(g, &study, ns::RDFS_LABEL, Term::literal(ch.study_label.clone()));

    let acq = rdf::iri(&acquisition_iri(dataset_name));
    let kind = match ch.acquisition_kind {
        AcquisitionKind::Native => ns::HASCO_DATA_ACQUISITION,
        AcquisitionKind::ManualAnnotation => ns::HACITO_MANUAL_DATA_ANNOTATION,
    };
    put(g, &acq, ns::RDF_TYPE, rdf::iri(kind));
    put(g, &acq, ns::RDF_TYPE, rdf::iri(ns::PROV_ACTIVITY));
    put(g, &acq, ns::RDFS_LABEL, Term::literal(dataset_name.to_string()));
    put(g, &acq, ns::HASCO_HAS_DEPLOYMENT, deployment);
    put(g, &acq, ns::HASCO_IS_MEMBER_OF, study);
    put(g, &acq, ns::PROV_STARTED_AT, date_time(&ch.time_frame.start));
    put(g, &acq, ns::PROV_ENDED_AT, date_time(&ch.time_frame.end));
    Ok(acq)
}

struct Resolved<'a> {
    id: usize,
    columns: Vec<(usize, &'a MappingRole)>,
}

fn resolve<'a>(
    header: &[String],
    mapping: &'a IngestMapping,
    reg: &VocabularyRegistry,
) -> Result<Resolved<'a>, IngestError> {
    if !reg.has_class(&mapping.records_class) {
        return Err(IngestError::UnknownClass(mapping.records_class.clone()));
    }
    let mut positions = BTreeMap::new();
    for (i, h) in header.iter().enumerate() {
        if positions.insert(h.as_str(), i).is_some() {
            return Err(IngestError::HeaderMismatch(format!("column `{h}` appears twice")));
        }
    }
    let mut id = None;
    let mut columns = Vec::new();
    let mut bound = BTreeMap::new();
    for c in &mapping.columns {
        let &pos = positions
            .get(c.column.as_str())
            .ok_or_else(|| IngestError::HeaderMismatch(format!("mapped column `{}` is not in the header", c.column)))?;
        if bound.insert(pos, ()).is_some() {
            return Err(IngestError::InvalidMapping(format!(
                "column `{}` mapped twice",
                c.column
            )));
        }
        match &c.role {
            MappingRole::Identifier => {
                if id.replace(pos).is_some() {
                    return Err(IngestError::InvalidMapping("more than one identifier column".into()));
                }
            }
            MappingRole::Attribute {
                property,
                datatype,
                language,
            } => {
                if !reg.has_property(property) {
                    return Err(IngestError::UnknownProperty(property.clone()));
                }
                if datatype.is_some() && language.is_some() {
                    return Err(IngestError::InvalidMapping(format!(
                        "column `{}` has both a datatype and a language",
                        c.column
                    )));
                }
                columns.push((pos, &c.role));
            }
            MappingRole::Reference { property, target_class } => {
                if !reg.has_property(property) {
                    return Err(IngestError::UnknownProperty(property.clone()));
                }
                if !reg.has_class(target_class) {
                    return Err(IngestError::UnknownClass(target_class.clone()));
                }
                columns.push((pos, &c.role));
            }
        }
    }
    let id = id.ok_or_else(|| IngestError::InvalidMapping("no identifier column".into()))?;
    Ok(Resolved { id, columns })
}

fn values(cell: &str, separator: Option<char>) -> Vec<String> {
    match separator {
        Some(sep) => split_values(cell, sep),
        None if cell.is_empty() => Vec::new(),
        None => vec![cell.to_string()],
    }
}

/// Adds already-split rows to `kg`. Row numbers in errors are 1-based data
/// rows.
pub fn load_rows(
    header: &[String],
    rows: &[Vec<String>],
    mapping: &IngestMapping,
    ch: &DatasetCharacterization,
    kg: &Graph,
    reg: &VocabularyRegistry,
) -> Result<Graph, IngestError> {
    let resolved = resolve(header, mapping, reg)?;
    let mut first_seen: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != header.len() {
            return Err(IngestError::RowWidth {
                row: i + 1,
                expected: header.len(),
                actual: row.len(),
            });
        }
        let id = row[resolved.id].as_str();
        if id.is_empty() {
            return Err(IngestError::EmptyIdentifier { row: i + 1 });
        }
        if let Some(first) = first_seen.insert(id, i + 1) {
            return Err(IngestError::DuplicateIdentifier {
                id: id.to_string(),
                first,
                second: i + 1,
            });
        }
    }

    let mut g = kg.clone();
    for (label, namespace) in ns::STANDARD_PREFIXES {
        if !g.prefixes().contains_key(*label) {
            g.set_prefix(label, namespace).expect("standard prefixes are valid");
        }
    }
    let acq = scaffold(&mut g, ch, mapping.dataset_name())?;
    let class = rdf::iri(&mapping.records_class);
    for row in rows {
        let id = &row[resolved.id];
        let inst = Term::iri(instance_iri(&mapping.records_class, id))?;
        put(&mut g, &inst, ns::RDF_TYPE, class.clone());
        put(&mut g, &inst, ns::DCTERMS_IDENTIFIER, Term::literal(id.clone()));
        put(&mut g, &inst, ns::PROV_WAS_GENERATED_BY, acq.clone());
        for &(pos, role) in &resolved.columns {
            for v in values(&row[pos], mapping.value_separator) {
                match role {
                    MappingRole::Attribute {
                        property,
                        datatype,
                        language,
                    } => {
                        let lit = match (datatype, language) {
                            (Some(dt), _) => Literal::typed(v, dt.clone()),
                            (None, Some(lang)) => Literal::lang(v, lang.clone()),
                            (None, None) => Literal::plain(v),
                        };
                        g.add(inst.clone(), property, Term::Literal(lit))?;
                    }
                    MappingRole::Reference { property, target_class } => {
                        let target = Term::iri(instance_iri(target_class, &v))?;
                        g.add(inst.clone(), property, target.clone())?;
                        // The target is typed so it can be recognised later even
                        // if its own dataset is never loaded.
                        put(&mut g, &target, ns::RDF_TYPE, rdf::iri(target_class));
                        put(&mut g, &target, ns::DCTERMS_IDENTIFIER, Term::literal(v));
                    }
                    MappingRole::Identifier => unreachable!("identifier handled above"),
                }
            }
        }
    }
    Ok(g)
}

/// Parses a CSV file (header row first) and loads it into a copy of `kg`.
pub fn load_dataset(
    csv_text: &str,
    mapping: &IngestMapping,
    ch: &DatasetCharacterization,
    kg: &Graph,
    reg: &VocabularyRegistry,
) -> Result<Graph, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(csv_text.as_bytes());
    let mut records = reader.records();
    let header: Vec<String> = match records.next() {
        Some(r) => r
            .map_err(|e| IngestError::Csv(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect(),
        None => return Err(IngestError::HeaderMismatch("the file has no header row".into())),
    };
    let mut rows = Vec::new();
    for r in records {
        let r = r.map_err(|e| IngestError::Csv(e.to_string()))?;
        rows.push(r.iter().map(str::to_string).collect::<Vec<_>>());
    }
    load_rows(&header, &rows, mapping, ch, kg, reg)
}

/// The mapping that loads a document's rows back the way its bindings
/// describe them.
pub fn mapping_from_document(doc: &CcsvDocument) -> Result<IngestMapping, IngestError> {
    let mut columns = Vec::new();
    for b in &doc.bindings {
        let role = match &b.role {
            ColumnRole::Identifier { .. } => MappingRole::Identifier,
            ColumnRole::Attribute {
                property,
                datatype,
                language,
            } => MappingRole::Attribute {
                property: property.clone(),
                datatype: datatype.clone(),
                language: language.clone(),
            },
            ColumnRole::Reference {
                property: Some(property),
                target_class,
            } => MappingRole::Reference {
                property: property.clone(),
                target_class: target_class.clone(),
            },
            ColumnRole::Reference { property: None, .. } => {
                return Err(IngestError::InvalidMapping(format!(
                    "reference column `{}` names no property to link through",
                    b.name
                )))
            }
        };
        columns.push(ColumnMapping {
            column: b.name.clone(),
            role,
        });
    }
    Ok(IngestMapping {
        records_class: doc.records_class.clone(),
        dataset_name: None,
        value_separator: doc.value_separator,
        columns,
    })
}

/// Re-ingests a document through [`mapping_from_document`].
pub fn load_document(
    doc: &CcsvDocument,
    ch: &DatasetCharacterization,
    kg: &Graph,
    reg: &VocabularyRegistry,
) -> Result<Graph, IngestError> {
    let mapping = mapping_from_document(doc)?;
    load_rows(&doc.header, &doc.rows, &mapping, ch, kg, reg)
}
