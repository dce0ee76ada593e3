//! Contextualized CSV: a Turtle preamble, a line containing exactly `---`,
//! then an RFC-4180 CSV table whose first row is the header.
//!
//! Column meaning lives in the preamble:
//!
//! ```text
//! kg:dataset/Station ccsv:containsRecordsOf qoe-m:Bicycle-Share_Station ;
//!     ccsv:hasColumn <http://hadatac.org/kg/dataset/Station/col1> .
//! <http://hadatac.org/kg/dataset/Station/col1> ccsv:columnIndex 1 ;
//!     ccsv:columnName "id" ;
//!     ccsv:isIdentifierFor qoe-m:Bicycle-Share_Station .
//! ```

mod bundle;
mod cells;

pub(crate) use bundle::instances_of;
pub use bundle::{
    read_bundle_dir, validate_bundle, validate_bundle_with, write_bundle_dir, CcsvBundle, DanglingReference,
};
pub use cells::{join_values, split_values};

use std::collections::BTreeSet;

use thiserror::Error;

use crate::ns;
use crate::rdf::{self, parse_turtle, serialize_turtle, Graph, RdfError, Term};

pub const SEPARATOR: &str = "---";

#[derive(Debug, Error)]
pub enum CcsvError {
    #[error("no `---` separator line between preamble and table")]
    MissingSeparator,
    #[error("binding error: {0}")]
    Binding(String),
    #[error("data row {row} has {actual} cells, header has {expected}")]
    RowWidth { row: usize, expected: usize, actual: usize },
    #[error("malformed CSV: {0}")]
    Csv(String),
    #[error(transparent)]
    Rdf(#[from] RdfError),
    #[error("{} dangling reference(s): {}", .0.len(), DanglingReference::list(.0))]
    DanglingReference(Vec<DanglingReference>),
    #[error("provenance metadata has no {0}")]
    ProvenanceShape(String),
    #[error("two documents for {0}")]
    DuplicateDocument(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl CcsvError {
    pub fn name(&self) -> &'static str {
        match self {
            CcsvError::MissingSeparator => "MissingSeparatorError",
            CcsvError::Binding(_) => "BindingError",
            CcsvError::RowWidth { .. } => "RowWidthError",
            CcsvError::Csv(_) => "CsvSyntaxError",
            CcsvError::Rdf(e) => e.name(),
            CcsvError::DanglingReference(_) => "DanglingReferenceError",
            CcsvError::ProvenanceShape(_) => "ProvenanceShapeError",
            CcsvError::DuplicateDocument(_) => "DuplicateDocumentError",
            CcsvError::Io { .. } => "IoError",
        }
    }
}

fn binding_err(msg: impl Into<String>) -> CcsvError {
    CcsvError::Binding(msg.into())
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ColumnRole {
    /// Cells are the identifiers of the document's records.
    Identifier { entity_class: String },
    /// Cells are literal values of `property`.
    Attribute {
        property: String,
        datatype: Option<String>,
        language: Option<String>,
    },
    /// Cells are identifiers of `target_class` records, linked through
    /// `property` when one is given.
    Reference {
        property: Option<String>,
        target_class: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColumnBinding {
    /// 1-based.
    pub index: usize,
    pub name: String,
    pub role: ColumnRole,
}

impl ColumnBinding {
    pub fn identifier(index: usize, name: impl Into<String>, entity_class: impl Into<String>) -> Self {
        ColumnBinding {
            index,
            name: name.into(),
            role: ColumnRole::Identifier {
                entity_class: entity_class.into(),
            },
        }
    }

    pub fn attribute(index: usize, name: impl Into<String>, property: impl Into<String>) -> Self {
        ColumnBinding {
            index,
            name: name.into(),
            role: ColumnRole::Attribute {
                property: property.into(),
                datatype: None,
                language: None,
            },
        }
    }

    pub fn reference(
        index: usize,
        name: impl Into<String>,
        property: Option<String>,
        target_class: impl Into<String>,
    ) -> Self {
        ColumnBinding {
            index,
            name: name.into(),
            role: ColumnRole::Reference {
                property,
                target_class: target_class.into(),
            },
        }
    }

    pub fn is_identifier(&self) -> bool {
        matches!(self.role, ColumnRole::Identifier { .. })
    }

    pub fn referenced_class(&self) -> Option<&str> {
        match &self.role {
            ColumnRole::Reference { target_class, .. } => Some(target_class),
            _ => None,
        }
    }

    /// The property the column's values are asserted with, if any.
    pub fn property(&self) -> Option<&str> {
        match &self.role {
            ColumnRole::Attribute { property, .. } => Some(property),
            ColumnRole::Reference { property, .. } => property.as_deref(),
            ColumnRole::Identifier { .. } => None,
        }
    }
}

/// IRI of the resource describing column `index` of `dataset_iri`.
pub fn column_iri(dataset_iri: &str, index: usize) -> String {
    format!("{dataset_iri}/col{index}")
}

/// One `.ccsv` file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CcsvDocument {
    /// Everything above the separator, binding triples included.
    pub preamble: Graph,
    pub dataset_iri: String,
    pub records_class: String,
    /// Sorted by index.
    pub bindings: Vec<ColumnBinding>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub value_separator: Option<char>,
}

impl CcsvDocument {
    /// Builds a document, writing the binding triples into a preamble that
    /// starts from `context`.
    pub fn new(
        dataset_iri: &str,
        records_class: &str,
        header: Vec<String>,
        bindings: Vec<ColumnBinding>,
        rows: Vec<Vec<String>>,
        value_separator: Option<char>,
        context: &Graph,
    ) -> Result<Self, CcsvError> {
        let mut preamble = rdf::graph_with_standard_prefixes();
        preamble.absorb(context);
        let dataset = Term::iri(dataset_iri)?;
        preamble.add(dataset.clone(), ns::CCSV_CONTAINS_RECORDS_OF, Term::iri(records_class)?)?;
        if let Some(sep) = value_separator {
            preamble.add(
                dataset.clone(),
                ns::CCSV_VALUE_SEPARATOR,
                Term::literal(sep.to_string()),
            )?;
        }
        for b in &bindings {
            let col = Term::iri(column_iri(dataset_iri, b.index))?;
            preamble.add(dataset.clone(), ns::CCSV_HAS_COLUMN, col.clone())?;
            preamble.add(
                col.clone(),
                ns::CCSV_COLUMN_INDEX,
                Term::typed_literal(b.index.to_string(), ns::XSD_INTEGER),
            )?;
            preamble.add(col.clone(), ns::CCSV_COLUMN_NAME, Term::literal(b.name.clone()))?;
            match &b.role {
                ColumnRole::Identifier { entity_class } => {
                    preamble.add(col, ns::CCSV_IS_IDENTIFIER_FOR, Term::iri(entity_class.as_str())?)?;
                }
                ColumnRole::Attribute {
                    property,
                    datatype,
                    language,
                } => {
                    preamble.add(col.clone(), ns::CCSV_IS_ATTRIBUTE_OF, Term::iri(property.as_str())?)?;
                    if let Some(dt) = datatype {
                        preamble.add(col.clone(), ns::CCSV_DATATYPE, Term::iri(dt.as_str())?)?;
                    }
                    if let Some(lang) = language {
                        preamble.add(col, ns::CCSV_LANGUAGE, Term::literal(lang.clone()))?;
                    }
                }
                ColumnRole::Reference { property, target_class } => {
                    if let Some(p) = property {
                        preamble.add(col.clone(), ns::CCSV_IS_ATTRIBUTE_OF, Term::iri(p.as_str())?)?;
                    }
                    preamble.add(col, ns::CCSV_REFERENCES, Term::iri(target_class.as_str())?)?;
                }
            }
        }
        Self::from_parts(preamble, header, rows)
    }

    /// Extracts bindings from the preamble and checks every invariant.
    pub fn from_parts(preamble: Graph, header: Vec<String>, rows: Vec<Vec<String>>) -> Result<Self, CcsvError> {
        let recs = rdf::iri(ns::CCSV_CONTAINS_RECORDS_OF);
        let mut found = preamble.with_predicate(&recs);
        let (class, dataset) = found
            .next()
            .map(|(c, d)| (c.clone(), d.clone()))
            .ok_or_else(|| binding_err("preamble has no ccsv:containsRecordsOf triple"))?;
        let dataset = &dataset;
        if found.next().is_some() {
            return Err(binding_err("preamble has more than one ccsv:containsRecordsOf triple"));
        }
        drop(found);
        let dataset_iri = dataset
            .as_iri()
            .ok_or_else(|| binding_err("dataset must be named by an IRI"))?
            .to_string();
        let records_class = class
            .as_iri()
            .ok_or_else(|| binding_err("records class must be an IRI"))?
            .to_string();

        let value_separator = match preamble.object(dataset, &rdf::iri(ns::CCSV_VALUE_SEPARATOR)) {
            None => None,
            Some(t) => {
                let lex = t.as_literal().map(|l| l.lexical()).unwrap_or_default();
                let mut chars = lex.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) if !matches!(c, '\\' | '"' | '\n' | '\r') => Some(c),
                    _ => return Err(binding_err(format!("value separator {t} is not a single character"))),
                }
            }
        };

        let width = header.len();
        let mut bindings = Vec::new();
        let mut seen = BTreeSet::new();
        for col in preamble.objects(dataset, &rdf::iri(ns::CCSV_HAS_COLUMN)) {
            let b = read_binding(&preamble, col, &header)?;
            if !seen.insert(b.index) {
                return Err(binding_err(format!("column index {} bound twice", b.index)));
            }
            bindings.push(b);
        }
        bindings.sort_by_key(|b| b.index);

        let ids: Vec<&ColumnBinding> = bindings.iter().filter(|b| b.is_identifier()).collect();
        match ids.as_slice() {
            [] => return Err(binding_err("no identifier column")),
            [one] => {
                if let ColumnRole::Identifier { entity_class } = &one.role {
                    if *entity_class != records_class {
                        return Err(binding_err(format!(
                            "identifier column is for <{entity_class}> but the document holds <{records_class}>"
                        )));
                    }
                }
            }
            _ => return Err(binding_err("more than one identifier column")),
        }

        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(CcsvError::RowWidth {
                    row: i + 1,
                    expected: width,
                    actual: row.len(),
                });
            }
        }
        Ok(CcsvDocument {
            preamble,
            dataset_iri,
            records_class,
            bindings,
            header,
            rows,
            value_separator,
        })
    }

    /// File stem and the handle dashboards use: the record class's local name.
    pub fn name(&self) -> &str {
        ns::local_name(&self.records_class)
    }

    pub fn identifier_binding(&self) -> &ColumnBinding {
        self.bindings
            .iter()
            .find(|b| b.is_identifier())
            .expect("validated documents have an identifier column")
    }

    /// 0-based position of the identifier column.
    pub fn identifier_position(&self) -> usize {
        self.identifier_binding().index - 1
    }

    /// 0-based position of the column whose header is `name`.
    pub fn position(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn binding_at(&self, position: usize) -> Option<&ColumnBinding> {
        self.bindings.iter().find(|b| b.index == position + 1)
    }

    pub fn binding_named(&self, name: &str) -> Option<&ColumnBinding> {
        self.position(name).and_then(|p| self.binding_at(p))
    }

    /// Values of one cell, split when the document declares a separator.
    pub fn cell_values(&self, row: usize, position: usize) -> Vec<String> {
        let cell = &self.rows[row][position];
        match self.value_separator {
            Some(sep) => split_values(cell, sep),
            None if cell.is_empty() => Vec::new(),
            None => vec![cell.clone()],
        }
    }

    /// The preamble without the binding vocabulary: the provenance context.
    pub fn context(&self) -> Graph {
        strip_bindings(&self.preamble)
    }
}

/// Drops every triple using a predicate from the binding vocabulary.
pub fn strip_bindings(g: &Graph) -> Graph {
    let mut out: Graph = g
        .iter()
        .filter(|t| !t.predicate().as_iri().is_some_and(|p| p.starts_with(ns::CCSV)))
        .cloned()
        .collect();
    for (label, namespace) in g.prefixes() {
        out.set_prefix(label, namespace).expect("prefix already validated");
    }
    out
}

fn read_binding(preamble: &Graph, col: &Term, header: &[String]) -> Result<ColumnBinding, CcsvError> {
    let get = |p: &str| preamble.object(col, &rdf::iri(p)).cloned();
    let get_iri = |p: &str| -> Result<Option<String>, CcsvError> {
        match get(p) {
            None => Ok(None),
            Some(Term::Iri(i)) => Ok(Some(i)),
            Some(other) => Err(binding_err(format!("{col}: {p} must be an IRI, found {other}"))),
        }
    };
    let index: usize = get(ns::CCSV_COLUMN_INDEX)
        .and_then(|t| t.as_literal().and_then(|l| l.lexical().parse().ok()))
        .ok_or_else(|| binding_err(format!("{col} has no usable ccsv:columnIndex")))?;
    if index == 0 || index > header.len() {
        return Err(binding_err(format!(
            "column index {index} outside header width {}",
            header.len()
        )));
    }
    let name = header[index - 1].clone();
    if let Some(declared) = get(ns::CCSV_COLUMN_NAME) {
        let declared = declared.as_literal().map(|l| l.lexical()).unwrap_or_default();
        if declared != name {
            return Err(binding_err(format!(
                "column {index} is named `{declared}` in the preamble but `{name}` in the header"
            )));
        }
    }
    let identifier = get_iri(ns::CCSV_IS_IDENTIFIER_FOR)?;
    let property = get_iri(ns::CCSV_IS_ATTRIBUTE_OF)?;
    let target = get_iri(ns::CCSV_REFERENCES)?;
    let role = match (identifier, property, target) {
        (Some(entity_class), None, None) => ColumnRole::Identifier { entity_class },
        (None, property, Some(target_class)) => ColumnRole::Reference { property, target_class },
        (None, Some(property), None) => ColumnRole::Attribute {
            property,
            datatype: get_iri(ns::CCSV_DATATYPE)?,
            language: get(ns::CCSV_LANGUAGE).and_then(|t| t.as_literal().map(|l| l.lexical().to_string())),
        },
        (None, None, None) => return Err(binding_err(format!("column {index} has no role"))),
        _ => return Err(binding_err(format!("column {index} has conflicting roles"))),
    };
    Ok(ColumnBinding { index, name, role })
}

/// Parses a `.ccsv` document.
pub fn read_ccsv(text: &str) -> Result<CcsvDocument, CcsvError> {
    let mut offset = 0;
    let mut split = None;
    for line in text.split_inclusive('\n') {
        let bare = line.trim_end_matches('\n').trim_end_matches('\r');
        if bare == SEPARATOR {
            split = Some((offset, offset + line.len()));
            break;
        }
        offset += line.len();
    }
    let (end, body_start) = split.ok_or(CcsvError::MissingSeparator)?;
    let preamble = parse_turtle(&text[..end])?;

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(&text.as_bytes()[body_start..]);
    let mut records = reader.records();
    let header: Vec<String> = match records.next() {
        Some(r) => r
            .map_err(|e| CcsvError::Csv(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect(),
        None => return Err(binding_err("no header row after the separator")),
    };
    let mut rows = Vec::new();
    for r in records {
        let r = r.map_err(|e| CcsvError::Csv(e.to_string()))?;
        rows.push(r.iter().map(str::to_string).collect());
    }
    CcsvDocument::from_parts(preamble, header, rows)
}

/// Renders a document; output is a function of the document alone.
pub fn write_ccsv(doc: &CcsvDocument) -> String {
    let mut out = serialize_turtle(&doc.preamble);
    if !out.is_empty() && !out.ends_with('\n') {
        out.push('\n');
    }
    out.push_str(SEPARATOR);
    out.push('\n');
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(&doc.header).expect("writing to memory");
    for row in &doc.rows {
        w.write_record(row).expect("writing to memory");
    }
    let bytes = w.into_inner().expect("writing to memory");
    out.push_str(std::str::from_utf8(&bytes).expect("cells are UTF-8"));
    out
}
