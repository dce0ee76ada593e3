//! The on-disk working directory shared by the CLI and the HTTP service.
//!
//! ```text
//! kg.ttl                       the KG after every ingest so far
//! datasets.json                one record per ingested dataset
//! bundle/*.ccsv                last serialization
//! bundle/discovered-indicators.ttl
//! manifest.json                present only while the bundle is current
//! dashboards/dash-N.json
//! ```
//!
//! Operations take a [`Snapshot`] and return the next one; nothing is
//! mutated in place, so readers holding an older snapshot stay consistent.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ccsv::{instances_of, read_bundle_dir, CcsvBundle, CcsvError};
use crate::dashboard::{
    aggregate, apply_selection, generate_specs, validate_viz, AggregateResult, DashboardError, DashboardSpec,
    FilterExpr, VizSpec,
};
use crate::discovery::{discover, export_discovered, extract_facts, SpecCoverage, SuitabilityResult};
use crate::fsutil::write_atomic;
use crate::ingest::{characterize, load_dataset, CharacterizationAnswers, IngestError, IngestMapping};
use crate::ns;
use crate::rdf::{parse_turtle, serialize_turtle, Graph, RdfError};
use crate::serializer::{serialize_kg, write_output, SerializeError, DISCOVERED_FILE};
use crate::vocab::{load_indicator_catalog, load_registry, sample_catalog, VocabError, VocabularyRegistry};

pub const KG_FILE: &str = "kg.ttl";
pub const DATASETS_FILE: &str = "datasets.json";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const BUNDLE_DIR: &str = "bundle";
pub const DASHBOARDS_DIR: &str = "dashboards";

#[derive(Debug, Error)]
pub enum WorkspaceError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Serialize(#[from] SerializeError),
    #[error(transparent)]
    Dashboard(#[from] DashboardError),
    #[error(transparent)]
    Ccsv(#[from] CcsvError),
    #[error(transparent)]
    Vocab(#[from] VocabError),
    #[error(transparent)]
    Rdf(#[from] RdfError),
    #[error("the KG has not been serialized since the last ingest")]
    NotSerialized,
    #[error("no dashboard `{0}`")]
    UnknownDashboard(String),
    #[error("dashboard `{dashboard}` has no visualization `{viz}`")]
    UnknownViz { dashboard: String, viz: String },
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl WorkspaceError {
    pub fn name(&self) -> &'static str {
        match self {
            WorkspaceError::Ingest(e) => e.name(),
            WorkspaceError::Serialize(e) => e.name(),
            WorkspaceError::Dashboard(e) => e.name(),
            WorkspaceError::Ccsv(e) => e.name(),
            WorkspaceError::Vocab(e) => e.name(),
            WorkspaceError::Rdf(e) => e.name(),
            WorkspaceError::NotSerialized => "NotSerializedError",
            WorkspaceError::UnknownDashboard(_) => "UnknownDashboardError",
            WorkspaceError::UnknownViz { .. } => "UnknownVizError",
            WorkspaceError::InvalidRequest(_) => "InvalidRequestError",
            WorkspaceError::Io { .. } => "IoError",
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> WorkspaceError {
    WorkspaceError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), WorkspaceError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    write_atomic(path, bytes).map_err(|e| io_err(path, e))
}

fn read_optional(path: &Path) -> Result<Option<String>, WorkspaceError> {
    match std::fs::read_to_string(path) {
        Ok(s) => Ok(Some(s)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(io_err(path, e)),
    }
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("workspace types serialize");
    out.push(b'\n');
    out
}

/// Vocabulary and indicator catalog the pipeline runs against.
#[derive(Clone, Debug)]
pub struct Settings {
    pub registry: VocabularyRegistry,
    pub catalog: Graph,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            registry: VocabularyRegistry::builtin(),
            catalog: sample_catalog(),
        }
    }
}

impl Settings {
    /// Extra ontologies and an optional catalog file; the built-in sample
    /// catalog is used when none is given.
    pub fn load(ontologies: &[PathBuf], catalog: Option<&Path>) -> Result<Self, WorkspaceError> {
        let mut graphs = Vec::new();
        for p in ontologies {
            let text = std::fs::read_to_string(p).map_err(|e| io_err(p, e))?;
            graphs.push(parse_turtle(&text)?);
        }
        let registry = load_registry(&graphs)?;
        let catalog = match catalog {
            Some(p) => parse_turtle(&std::fs::read_to_string(p).map_err(|e| io_err(p, e))?)?,
            None => sample_catalog(),
        };
        Ok(Settings { registry, catalog })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub id: String,
    pub name: String,
    pub records_class: String,
    pub rows: usize,
    /// KG size after this load.
    pub kg_triples: usize,
}

/// Body of a dataset upload.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IngestRequest {
    pub csv: String,
    pub mapping: IngestMapping,
    #[serde(default)]
    pub characterization: CharacterizationAnswers,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestDocument {
    pub name: String,
    pub file: String,
    pub records_class: String,
    pub dataset: String,
    pub columns: Vec<String>,
    pub rows: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetadataSummary {
    pub triples: usize,
    pub studies: Vec<String>,
    pub deployments: Vec<String>,
    pub acquisitions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscoveredIndicator {
    pub iri: String,
    pub label: String,
    pub covered: Vec<SpecCoverageEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecCoverageEntry {
    pub node: String,
    pub entity_class: String,
    pub dataset: String,
    pub document: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub documents: Vec<ManifestDocument>,
    pub metadata: MetadataSummary,
    pub discovered_file: String,
    pub indicators: Vec<DiscoveredIndicator>,
}

impl Manifest {
    fn build(bundle: &CcsvBundle, results: &[SuitabilityResult], reg: &VocabularyRegistry) -> Self {
        let meta = &bundle.shared_metadata;
        let iris =
            |class: &str| -> Vec<String> { instances_of(meta, class, reg).iter().map(|t| t.to_string()).collect() };
        let entry = |c: &SpecCoverage| {
            c.provider.as_ref().map(|p| SpecCoverageEntry {
                node: c.node.clone(),
                entity_class: c.entity_class.clone(),
                dataset: p.dataset.clone(),
                document: p.document.clone(),
            })
        };
        Manifest {
            documents: bundle
                .documents
                .iter()
                .map(|d| ManifestDocument {
                    name: d.name().to_string(),
                    file: format!("{}.ccsv", d.name()),
                    records_class: d.records_class.clone(),
                    dataset: d.dataset_iri.clone(),
                    columns: d.header.clone(),
                    rows: d.rows.len(),
                })
                .collect(),
            metadata: MetadataSummary {
                triples: meta.len(),
                studies: iris(ns::HASCO_STUDY),
                deployments: iris(ns::VSTOI_DEPLOYMENT),
                acquisitions: iris(ns::HASCO_DATA_ACQUISITION),
            },
            discovered_file: DISCOVERED_FILE.to_string(),
            indicators: results
                .iter()
                .filter(|r| r.suitable)
                .map(|r| DiscoveredIndicator {
                    iri: r.indicator.iri.clone(),
                    label: r.indicator.label.clone(),
                    covered: r.covered.iter().filter_map(entry).collect(),
                })
                .collect(),
        }
    }
}

/// Output of the last serialization.
#[derive(Clone, Debug)]
pub struct Serialized {
    pub bundle: CcsvBundle,
    pub discovered: Graph,
    pub results: Vec<SuitabilityResult>,
    pub manifest: Manifest,
}

#[derive(Clone, Debug, Default)]
pub struct Snapshot {
    pub kg: Arc<Graph>,
    pub datasets: Vec<DatasetRecord>,
    pub serialized: Option<Arc<Serialized>>,
    pub dashboards: BTreeMap<String, Arc<DashboardSpec>>,
}

impl Snapshot {
    pub fn serialized(&self) -> Result<&Serialized, WorkspaceError> {
        self.serialized.as_deref().ok_or(WorkspaceError::NotSerialized)
    }

    pub fn dashboard(&self, id: &str) -> Result<&DashboardSpec, WorkspaceError> {
        self.dashboards
            .get(id)
            .map(|d| d.as_ref())
            .ok_or_else(|| WorkspaceError::UnknownDashboard(id.to_string()))
    }

    fn next_dashboard_id(&self) -> String {
        let n = self
            .dashboards
            .keys()
            .filter_map(|k| k.strip_prefix("dash-")?.parse::<usize>().ok())
            .max()
            .unwrap_or(0);
        format!("dash-{}", n + 1)
    }
}

/// Bundle plus discovery against the current catalog.
fn discover_on(bundle: CcsvBundle, settings: &Settings) -> Result<Serialized, WorkspaceError> {
    let defs = load_indicator_catalog(&settings.catalog, &settings.registry)?;
    let results = discover(&extract_facts(&bundle, &defs, &settings.registry));
    let discovered = export_discovered(&results);
    let manifest = Manifest::build(&bundle, &results, &settings.registry);
    Ok(Serialized {
        bundle,
        discovered,
        results,
        manifest,
    })
}

#[derive(Clone, Debug)]
pub struct Workspace {
    root: PathBuf,
    settings: Arc<Settings>,
}

impl Workspace {
    pub fn new(root: impl Into<PathBuf>, settings: Settings) -> Self {
        Workspace {
            root: root.into(),
            settings: Arc::new(settings),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn settings(&self) -> &Settings {
        &self.settings
    }

    pub fn bundle_dir(&self) -> PathBuf {
        self.root.join(BUNDLE_DIR)
    }

    /// Reads whatever state the directory holds. A missing directory is an
    /// empty workspace.
    pub fn load(&self) -> Result<Snapshot, WorkspaceError> {
        let mut snap = Snapshot::default();
        if let Some(text) = read_optional(&self.root.join(KG_FILE))? {
            snap.kg = Arc::new(parse_turtle(&text)?);
        }
        if let Some(text) = read_optional(&self.root.join(DATASETS_FILE))? {
            snap.datasets = serde_json::from_str(&text).map_err(|e| io_err(&self.root.join(DATASETS_FILE), e))?;
        }
        if read_optional(&self.root.join(MANIFEST_FILE))?.is_some() {
            let bundle = read_bundle_dir(&self.bundle_dir(), &self.settings.registry)?;
            snap.serialized = Some(Arc::new(discover_on(bundle, &self.settings)?));
        }
        let dir = self.root.join(DASHBOARDS_DIR);
        if dir.is_dir() {
            let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)
                .map_err(|e| io_err(&dir, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            paths.sort();
            for p in paths {
                let text = std::fs::read_to_string(&p).map_err(|e| io_err(&p, e))?;
                let spec: DashboardSpec = serde_json::from_str(&text).map_err(|e| io_err(&p, e))?;
                snap.dashboards.insert(spec.id.clone(), Arc::new(spec));
            }
        }
        Ok(snap)
    }

    /// Characterizes and loads one CSV dataset. Any previous serialization
    /// is dropped since it no longer reflects the KG.
    pub fn ingest(&self, snap: &Snapshot, req: &IngestRequest) -> Result<(Snapshot, DatasetRecord), WorkspaceError> {
        let ch = characterize(&req.characterization)?;
        let kg = load_dataset(&req.csv, &req.mapping, &ch, &snap.kg, &self.settings.registry)?;
        let record = DatasetRecord {
            id: format!("ds-{}", snap.datasets.len() + 1),
            name: req.mapping.dataset_name().to_string(),
            records_class: req.mapping.records_class.clone(),
            rows: csv_rows(&req.csv),
            kg_triples: kg.len(),
        };
        let mut next = snap.clone();
        next.kg = Arc::new(kg);
        next.datasets.push(record.clone());
        next.serialized = None;

        let manifest = self.root.join(MANIFEST_FILE);
        if manifest.exists() {
            std::fs::remove_file(&manifest).map_err(|e| io_err(&manifest, e))?;
        }
        write_file(&self.root.join(KG_FILE), serialize_turtle(&next.kg).as_bytes())?;
        write_file(&self.root.join(DATASETS_FILE), &to_json(&next.datasets))?;
        Ok((next, record))
    }

    /// Projects the KG into a bundle, runs discovery and persists both.
    pub fn serialize(&self, snap: &Snapshot) -> Result<Snapshot, WorkspaceError> {
        let bundle = serialize_kg(&snap.kg, &self.settings.registry)?;
        let serialized = discover_on(bundle, &self.settings)?;
        let dir = self.bundle_dir();
        if dir.exists() {
            std::fs::remove_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
        }
        write_output(&dir, &serialized.bundle, &serialized.discovered)?;
        // the manifest goes last: its presence marks the bundle as complete
        write_file(&self.root.join(MANIFEST_FILE), &to_json(&serialized.manifest))?;
        let mut next = snap.clone();
        next.serialized = Some(Arc::new(serialized));
        Ok(next)
    }

    /// Generates visualizations for the discovered indicators, then applies
    /// `edits`: an edit replaces the generated viz with the same id, others
    /// are added. Every resulting viz must bind against the bundle.
    pub fn create_dashboard(
        &self,
        snap: &Snapshot,
        edits: Vec<VizSpec>,
    ) -> Result<(Snapshot, Arc<DashboardSpec>), WorkspaceError> {
        let s = snap.serialized()?;
        let mut spec = generate_specs(&s.discovered, &s.bundle)?;
        spec.id = snap.next_dashboard_id();
        spec.merge_edits(edits);
        for v in &spec.visualizations {
            validate_viz(v, &s.bundle)?;
        }
        let path = self.root.join(DASHBOARDS_DIR).join(format!("{}.json", spec.id));
        write_file(&path, &to_json(&spec))?;
        let spec = Arc::new(spec);
        let mut next = snap.clone();
        next.dashboards.insert(spec.id.clone(), spec.clone());
        Ok((next, spec))
    }
}

fn csv_rows(text: &str) -> usize {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(text.as_bytes())
        .records()
        .count()
}

pub fn query(
    snap: &Snapshot,
    dashboard: &str,
    viz: &str,
    filters: &[FilterExpr],
) -> Result<AggregateResult, WorkspaceError> {
    let spec = snap.dashboard(dashboard)?;
    let s = snap.serialized()?;
    let v = spec.viz(viz).ok_or_else(|| WorkspaceError::UnknownViz {
        dashboard: dashboard.to_string(),
        viz: viz.to_string(),
    })?;
    Ok(aggregate(&s.bundle, v, filters)?)
}

pub fn selection(
    snap: &Snapshot,
    dashboard: &str,
    filters: &[FilterExpr],
) -> Result<BTreeMap<String, AggregateResult>, WorkspaceError> {
    let spec = snap.dashboard(dashboard)?;
    let s = snap.serialized()?;
    Ok(apply_selection(&s.bundle, spec, filters)?)
}
