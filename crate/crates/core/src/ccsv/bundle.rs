use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use super::{read_ccsv, write_ccsv, CcsvDocument, CcsvError};
use crate::fsutil::write_atomic;
use crate::ns;
use crate::rdf::{self, Graph, Term};
use crate::vocab::VocabularyRegistry;

/// A serialized KG: one document per record class plus the provenance
/// metadata the documents share.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CcsvBundle {
    /// Sorted by record class.
    pub documents: Vec<CcsvDocument>,
    pub shared_metadata: Graph,
}

impl CcsvBundle {
    pub fn document(&self, name: &str) -> Option<&CcsvDocument> {
        self.documents.iter().find(|d| d.name() == name)
    }

    pub fn document_for_class(&self, class: &str) -> Option<&CcsvDocument> {
        self.documents.iter().find(|d| d.records_class == class)
    }

    pub fn records_classes(&self) -> impl Iterator<Item = &str> {
        self.documents.iter().map(|d| d.records_class.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DanglingReference {
    pub document: String,
    pub column: String,
    /// 1-based data row.
    pub row: usize,
    pub id: String,
}

impl DanglingReference {
    pub(super) fn list(refs: &[DanglingReference]) -> String {
        refs.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
    }
}

impl fmt::Display for DanglingReference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} row {} column {}: no record `{}`",
            self.document, self.row, self.column, self.id
        )
    }
}

/// [`validate_bundle_with`] against the built-in vocabulary.
pub fn validate_bundle(docs: Vec<CcsvDocument>, shared_metadata: Graph) -> Result<CcsvBundle, CcsvError> {
    validate_bundle_with(docs, shared_metadata, &VocabularyRegistry::builtin())
}

/// Checks cross-document references and the provenance shape, returning the
/// documents in canonical order.
///
/// References are checked only when some document holds the target class;
/// links to classes without a document are left as external.
pub fn validate_bundle_with(
    mut docs: Vec<CcsvDocument>,
    shared_metadata: Graph,
    reg: &VocabularyRegistry,
) -> Result<CcsvBundle, CcsvError> {
    docs.sort_by(|a, b| a.records_class.cmp(&b.records_class));
    let mut names = BTreeSet::new();
    for pair in docs.windows(2) {
        if pair[0].records_class == pair[1].records_class {
            return Err(CcsvError::DuplicateDocument(pair[0].records_class.clone()));
        }
    }
    for d in &docs {
        if !names.insert(d.name()) {
            return Err(CcsvError::DuplicateDocument(format!("name `{}`", d.name())));
        }
    }

    let mut ids: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for d in &docs {
        let pos = d.identifier_position();
        ids.insert(&d.records_class, d.rows.iter().map(|r| r[pos].as_str()).collect());
    }
    let mut dangling = Vec::new();
    for d in &docs {
        for b in &d.bindings {
            let Some(known) = b.referenced_class().and_then(|c| ids.get(c)) else {
                continue;
            };
            let pos = b.index - 1;
            for row in 0..d.rows.len() {
                for id in d.cell_values(row, pos) {
                    if !known.contains(id.as_str()) {
                        dangling.push(DanglingReference {
                            document: d.name().to_string(),
                            column: b.name.clone(),
                            row: row + 1,
                            id,
                        });
                    }
                }
            }
        }
    }
    if !dangling.is_empty() {
        return Err(CcsvError::DanglingReference(dangling));
    }

    check_provenance(&shared_metadata, reg)?;
    Ok(CcsvBundle {
        documents: docs,
        shared_metadata,
    })
}

pub(crate) fn instances_of(g: &Graph, class: &str, reg: &VocabularyRegistry) -> BTreeSet<Term> {
    let type_p = rdf::iri(ns::RDF_TYPE);
    g.with_predicate(&type_p)
        .filter(|(t, _)| t.as_iri().is_some_and(|t| reg.is_subclass_of(t, class)))
        .map(|(_, s)| s.clone())
        .collect()
}

/// Requires a study, a deployment, and an acquisition that belongs to the
/// study and runs on the deployment.
fn check_provenance(g: &Graph, reg: &VocabularyRegistry) -> Result<(), CcsvError> {
    let studies = instances_of(g, ns::HASCO_STUDY, reg);
    if studies.is_empty() {
        return Err(CcsvError::ProvenanceShape("hasco:Study".into()));
    }
    let deployments = instances_of(g, ns::VSTOI_DEPLOYMENT, reg);
    if deployments.is_empty() {
        return Err(CcsvError::ProvenanceShape("vstoi:Deployment".into()));
    }
    let acquisitions = instances_of(g, ns::HASCO_DATA_ACQUISITION, reg);
    if acquisitions.is_empty() {
        return Err(CcsvError::ProvenanceShape("hasco:DataAcquisition".into()));
    }
    let member = rdf::iri(ns::HASCO_IS_MEMBER_OF);
    let deployed = rdf::iri(ns::HASCO_HAS_DEPLOYMENT);
    let chained = acquisitions.iter().any(|a| {
        g.objects(a, &member).any(|s| studies.contains(s)) && g.objects(a, &deployed).any(|d| deployments.contains(d))
    });
    if !chained {
        return Err(CcsvError::ProvenanceShape(
            "hasco:DataAcquisition linked to both a hasco:Study and a vstoi:Deployment".into(),
        ));
    }
    Ok(())
}

fn io_err(path: &Path, e: impl fmt::Display) -> CcsvError {
    CcsvError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Writes each document as `{name}.ccsv` and returns the file names in
/// document order.
pub fn write_bundle_dir(bundle: &CcsvBundle, dir: &Path) -> Result<Vec<String>, CcsvError> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut files = Vec::new();
    for d in &bundle.documents {
        let file = format!("{}.ccsv", d.name());
        let path = dir.join(&file);
        write_atomic(&path, write_ccsv(d).as_bytes()).map_err(|e| io_err(&path, e))?;
        files.push(file);
    }
    Ok(files)
}

/// Reads every `.ccsv` file in `dir`. Shared metadata is recovered as the
/// union of the preambles minus their binding triples.
pub fn read_bundle_dir(dir: &Path, reg: &VocabularyRegistry) -> Result<CcsvBundle, CcsvError> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| io_err(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "ccsv"))
        .collect();
    paths.sort();
    let mut docs = Vec::new();
    let mut meta = Graph::new();
    for p in paths {
        let text = std::fs::read_to_string(&p).map_err(|e| io_err(&p, e))?;
        let doc = read_ccsv(&text)?;
        meta.absorb(&doc.context());
        docs.push(doc);
    }
    validate_bundle_with(docs, meta, reg)
}
