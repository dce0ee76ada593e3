//! KG → CCSV bundle.
//!
//! Every domain class with loaded instances becomes one document: an
//! identifier column, then one column per predicate seen on the instances
//! (sorted by predicate IRI), rows sorted by identifier. Each preamble
//! carries the provenance chain of its rows.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use percent_encoding::{utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use thiserror::Error;

use crate::ccsv::{
    join_values, validate_bundle_with, write_bundle_dir, CcsvBundle, CcsvDocument, CcsvError, ColumnBinding, ColumnRole,
};
use crate::discovery::{discover, export_discovered, extract_facts, SuitabilityResult};
use crate::fsutil::write_atomic;
use crate::ns;
use crate::rdf::{self, serialize_turtle, Graph, Literal, Term};
use crate::vocab::{load_indicator_catalog, VocabError, VocabularyRegistry};

pub const VALUE_SEPARATOR: char = '|';
pub const IDENTIFIER_COLUMN: &str = "id";
pub const DISCOVERED_FILE: &str = "discovered-indicators.ttl";

#[derive(Debug, Error)]
pub enum SerializeError {
    #[error("the KG holds no loaded instances of any domain class")]
    EmptyKg,
    #[error("<{property}> on {class} instances mixes {detail}")]
    MixedObjectTypes {
        class: String,
        property: String,
        detail: String,
    },
    #[error("{instance} has several unrelated domain types: {classes}")]
    AmbiguousType { instance: String, classes: String },
    #[error("{instance} has no single dcterms:identifier")]
    MissingIdentifier { instance: String },
    #[error("two {class} instances share identifier `{id}`")]
    DuplicateIdentifier { class: String, id: String },
    #[error("{instance} <{property}> {object}: the object is not an identified domain instance")]
    UnidentifiedObject {
        instance: String,
        property: String,
        object: String,
    },
    #[error(transparent)]
    Ccsv(#[from] CcsvError),
    #[error(transparent)]
    Vocab(#[from] VocabError),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl SerializeError {
    pub fn name(&self) -> &'static str {
        match self {
            SerializeError::EmptyKg => "EmptyKgError",
            SerializeError::MixedObjectTypes { .. } => "MixedObjectTypesError",
            SerializeError::AmbiguousType { .. } => "AmbiguousTypeError",
            SerializeError::MissingIdentifier { .. } => "MissingIdentifierError",
            SerializeError::DuplicateIdentifier { .. } => "DuplicateIdentifierError",
            SerializeError::UnidentifiedObject { .. } => "UnidentifiedObjectError",
            SerializeError::Ccsv(e) => e.name(),
            SerializeError::Vocab(e) => e.name(),
            SerializeError::Io { .. } => "IoError",
        }
    }
}

/// The single most specific domain class among `types`, if any.
fn domain_type<'a>(
    instance: &Term,
    types: &BTreeSet<&'a str>,
    reg: &VocabularyRegistry,
) -> Result<Option<&'a str>, SerializeError> {
    let domain: Vec<&str> = types.iter().copied().filter(|t| reg.is_domain_class(t)).collect();
    if domain.is_empty() {
        return Ok(None);
    }
    let most_specific = domain
        .iter()
        .copied()
        .find(|c| domain.iter().all(|other| reg.is_subclass_of(c, other)));
    match most_specific {
        Some(c) => Ok(Some(c)),
        None => Err(SerializeError::AmbiguousType {
            instance: instance.to_string(),
            classes: domain.join(", "),
        }),
    }
}

/// Domain class of every subject that has one.
fn typed_subjects<'a>(kg: &'a Graph, reg: &VocabularyRegistry) -> Result<BTreeMap<&'a Term, &'a str>, SerializeError> {
    let type_p = rdf::iri(ns::RDF_TYPE);
    let mut types: BTreeMap<&Term, BTreeSet<&str>> = BTreeMap::new();
    for (class, subject) in kg.with_predicate(&type_p) {
        if let Some(c) = class.as_iri() {
            types.entry(subject).or_default().insert(c);
        }
    }
    let mut out = BTreeMap::new();
    for (s, ts) in types {
        if let Some(c) = domain_type(s, &ts, reg)? {
            out.insert(s, c);
        }
    }
    Ok(out)
}

/// Triples describing domain instances (loaded records and the referenced
/// records typed alongside them), without their provenance links.
pub fn domain_instance_subgraph(kg: &Graph, reg: &VocabularyRegistry) -> Result<Graph, SerializeError> {
    let typed = typed_subjects(kg, reg)?;
    Ok(kg
        .iter()
        .filter(|t| typed.contains_key(t.subject()) && t.predicate().as_iri() != Some(ns::PROV_WAS_GENERATED_BY))
        .cloned()
        .collect())
}

fn identifier(kg: &Graph, instance: &Term) -> Result<String, SerializeError> {
    let p = rdf::iri(ns::DCTERMS_IDENTIFIER);
    let mut ids = kg.objects(instance, &p).filter_map(Term::as_literal);
    match (ids.next(), ids.next()) {
        (Some(id), None) if !id.lexical().is_empty() => Ok(id.lexical().to_string()),
        _ => Err(SerializeError::MissingIdentifier {
            instance: instance.to_string(),
        }),
    }
}

/// Provenance nodes reachable from `roots`, stopping at class IRIs and domain
/// instances.
fn provenance_context(kg: &Graph, roots: &BTreeSet<&Term>, typed: &BTreeMap<&Term, &str>) -> Graph {
    let mut out = Graph::new();
    let mut seen: BTreeSet<&Term> = BTreeSet::new();
    let mut frontier: Vec<&Term> = roots.iter().copied().collect();
    while let Some(node) = frontier.pop() {
        if !seen.insert(node) {
            continue;
        }
        for t in kg.with_subject(node) {
            out.insert(t.clone());
            let o = t.object();
            if t.predicate().as_iri() != Some(ns::RDF_TYPE) && !o.is_literal() && !typed.contains_key(o) {
                frontier.push(o);
            }
        }
    }
    out
}

const SEGMENT: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'_').remove(b'.');

pub fn dataset_iri(class: &str) -> String {
    format!(
        "{}dataset/{}",
        ns::KG,
        utf8_percent_encode(ns::local_name(class), SEGMENT)
    )
}

enum ColumnKind {
    Attribute {
        datatype: Option<String>,
        language: Option<String>,
    },
    Reference {
        target_class: String,
    },
}

const SKIPPED: [&str; 3] = [ns::RDF_TYPE, ns::DCTERMS_IDENTIFIER, ns::PROV_WAS_GENERATED_BY];

fn column_kind(
    kg: &Graph,
    class: &str,
    property: &str,
    instances: &[&Term],
    typed: &BTreeMap<&Term, &str>,
) -> Result<ColumnKind, SerializeError> {
    let p = rdf::iri(property);
    let mut literal_shapes: BTreeSet<(Option<&str>, Option<&str>)> = BTreeSet::new();
    let mut targets: BTreeSet<&str> = BTreeSet::new();
    for inst in instances {
        for o in kg.objects(inst, &p) {
            match o {
                Term::Literal(l) => {
                    literal_shapes.insert((l.datatype(), l.language()));
                }
                Term::Iri(_) => match typed.get(o) {
                    Some(c) if identifier(kg, o).is_ok() => {
                        targets.insert(c);
                    }
                    _ => {
                        return Err(SerializeError::UnidentifiedObject {
                            instance: inst.to_string(),
                            property: property.to_string(),
                            object: o.to_string(),
                        })
                    }
                },
                Term::BlankNode(_) => {
                    return Err(SerializeError::UnidentifiedObject {
                        instance: inst.to_string(),
                        property: property.to_string(),
                        object: o.to_string(),
                    })
                }
            }
        }
    }
    let mixed = |detail: String| SerializeError::MixedObjectTypes {
        class: class.to_string(),
        property: property.to_string(),
        detail,
    };
    if !literal_shapes.is_empty() && !targets.is_empty() {
        return Err(mixed("literal and IRI objects".into()));
    }
    if literal_shapes.len() > 1 {
        let shapes: Vec<String> = literal_shapes
            .iter()
            .map(|(d, l)| match (d, l) {
                (Some(d), _) => format!("^^<{d}>"),
                (None, Some(l)) => format!("@{l}"),
                (None, None) => "plain".into(),
            })
            .collect();
        return Err(mixed(format!("literal types {}", shapes.join(", "))));
    }
    if targets.len() > 1 {
        let list: Vec<&str> = targets.into_iter().collect();
        return Err(mixed(format!("objects of classes {}", list.join(", "))));
    }
    if let Some(target) = targets.into_iter().next() {
        return Ok(ColumnKind::Reference {
            target_class: target.to_string(),
        });
    }
    let (datatype, language) = literal_shapes.into_iter().next().unwrap_or((None, None));
    Ok(ColumnKind::Attribute {
        datatype: datatype.map(str::to_string),
        language: language.map(str::to_string),
    })
}

fn cell(kg: &Graph, instance: &Term, property: &str, kind: &ColumnKind) -> Result<String, SerializeError> {
    let p = rdf::iri(property);
    let mut values = Vec::new();
    for o in kg.objects(instance, &p) {
        match kind {
            ColumnKind::Attribute { .. } => {
                values.push(o.as_literal().map(Literal::lexical).unwrap_or_default().to_string())
            }
            ColumnKind::Reference { .. } => values.push(identifier(kg, o)?),
        }
    }
    values.sort();
    Ok(join_values(&values, VALUE_SEPARATOR))
}

fn column_names(properties: &[&str], reg: &VocabularyRegistry) -> Vec<String> {
    let mut used: BTreeSet<String> = [IDENTIFIER_COLUMN.to_string()].into_iter().collect();
    let mut out = Vec::new();
    for p in properties {
        let base = reg
            .property_label(p)
            .map(str::to_string)
            .unwrap_or_else(|| ns::local_name(p).to_string());
        let mut name = base.clone();
        let mut n = 2;
        while !used.insert(name.clone()) {
            name = format!("{base}_{n}");
            n += 1;
        }
        out.push(name);
    }
    out
}

fn document_for(
    kg: &Graph,
    class: &str,
    instances: &[&Term],
    typed: &BTreeMap<&Term, &str>,
    reg: &VocabularyRegistry,
) -> Result<CcsvDocument, SerializeError> {
    let mut properties: BTreeSet<&str> = BTreeSet::new();
    for inst in instances {
        for t in kg.with_subject(inst) {
            let p = t.predicate().as_iri().expect("predicates are IRIs");
            if !SKIPPED.contains(&p) {
                properties.insert(p);
            }
        }
    }
    let properties: Vec<&str> = properties.into_iter().collect();
    let names = column_names(&properties, reg);
    let mut kinds = Vec::new();
    for p in &properties {
        kinds.push(column_kind(kg, class, p, instances, typed)?);
    }

    let mut header = vec![IDENTIFIER_COLUMN.to_string()];
    let mut bindings = vec![ColumnBinding::identifier(1, IDENTIFIER_COLUMN, class)];
    for (i, ((p, name), kind)) in properties.iter().zip(&names).zip(&kinds).enumerate() {
        header.push(name.clone());
        let role = match kind {
            ColumnKind::Attribute { datatype, language } => ColumnRole::Attribute {
                property: p.to_string(),
                datatype: datatype.clone(),
                language: language.clone(),
            },
            ColumnKind::Reference { target_class } => ColumnRole::Reference {
                property: Some(p.to_string()),
                target_class: target_class.clone(),
            },
        };
        bindings.push(ColumnBinding {
            index: i + 2,
            name: name.clone(),
            role,
        });
    }

    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut ids = BTreeSet::new();
    for inst in instances {
        let id = identifier(kg, inst)?;
        if !ids.insert(id.clone()) {
            return Err(SerializeError::DuplicateIdentifier {
                class: class.to_string(),
                id,
            });
        }
        let mut row = vec![id];
        for (p, kind) in properties.iter().zip(&kinds) {
            row.push(cell(kg, inst, p, kind)?);
        }
        rows.push(row);
    }
    rows.sort();

    let generated_by = rdf::iri(ns::PROV_WAS_GENERATED_BY);
    let roots: BTreeSet<&Term> = instances.iter().flat_map(|i| kg.objects(i, &generated_by)).collect();
    let context = provenance_context(kg, &roots, typed);
    Ok(CcsvDocument::new(
        &dataset_iri(class),
        class,
        header,
        bindings,
        rows,
        Some(VALUE_SEPARATOR),
        &context,
    )?)
}

/// Projects the KG into a validated bundle.
///
/// Only instances with a `prov:wasGeneratedBy` link count as loaded; records
/// that are merely referenced (typed stubs) stay link targets.
pub fn serialize_kg(kg: &Graph, reg: &VocabularyRegistry) -> Result<CcsvBundle, SerializeError> {
    let typed = typed_subjects(kg, reg)?;
    let generated_by = rdf::iri(ns::PROV_WAS_GENERATED_BY);
    let mut by_class: BTreeMap<&str, Vec<&Term>> = BTreeMap::new();
    for (inst, class) in &typed {
        if kg.object(inst, &generated_by).is_some() {
            by_class.entry(class).or_default().push(inst);
        }
    }
    if by_class.is_empty() {
        return Err(SerializeError::EmptyKg);
    }
    let mut docs = Vec::new();
    let mut shared = rdf::graph_with_standard_prefixes();
    for (class, instances) in &by_class {
        let doc = document_for(kg, class, instances, &typed, reg)?;
        shared.absorb(&doc.context());
        docs.push(doc);
    }
    Ok(validate_bundle_with(docs, shared, reg)?)
}

/// Serializes, then runs discovery on the validated bundle.
pub fn serialize_and_discover(
    kg: &Graph,
    reg: &VocabularyRegistry,
    catalog: &Graph,
) -> Result<(CcsvBundle, Graph, Vec<SuitabilityResult>), SerializeError> {
    let bundle = serialize_kg(kg, reg)?;
    let defs = load_indicator_catalog(catalog, reg)?;
    let results = discover(&extract_facts(&bundle, &defs, reg));
    let discovered = export_discovered(&results);
    Ok((bundle, discovered, results))
}

/// Writes the `.ccsv` files and `discovered-indicators.ttl` into `dir`,
/// returning the file names written.
pub fn write_output(dir: &Path, bundle: &CcsvBundle, discovered: &Graph) -> Result<Vec<String>, SerializeError> {
    let mut files = write_bundle_dir(bundle, dir)?;
    let path = dir.join(DISCOVERED_FILE);
    write_atomic(&path, serialize_turtle(discovered).as_bytes()).map_err(|e| SerializeError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    files.push(DISCOVERED_FILE.to_string());
    Ok(files)
}
