//! Built-in vocabularies and the subclass hierarchy they define.
//!
//! The registry merges the shipped ontologies (instrument, science, city,
//! PROV fragment, indicator and mobility domain) with any caller-supplied
//! graphs, extracts `rdfs:subClassOf` axioms, and answers closure queries.

mod indicator;

pub use indicator::{
    export_indicator, load_indicator_catalog, parse_catalog, sample_catalog, AggregateFunction, DimensionSpec,
    IndicatorDef, MeasureSpec,
};

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::ns;
use crate::rdf::{self, parse_turtle, Graph, RdfError, Term};

const BUILTIN: &[(&str, &str)] = &[
    ("prov", include_str!("../../ontologies/prov.ttl")),
    ("vstoi", include_str!("../../ontologies/vstoi.ttl")),
    ("hasco", include_str!("../../ontologies/hasco.ttl")),
    ("hacito", include_str!("../../ontologies/hacito.ttl")),
    ("qoe", include_str!("../../ontologies/qoe.ttl")),
    ("qoe-m", include_str!("../../ontologies/qoe-m.ttl")),
];

/// Namespaces whose classes are provenance/metadata rather than domain data.
pub const METADATA_NAMESPACES: &[&str] = &[ns::HASCO, ns::VSTOI, ns::HACITO, ns::PROV];

#[derive(Debug, Error)]
pub enum VocabError {
    #[error(transparent)]
    Rdf(#[from] RdfError),
    #[error("subclass hierarchy contains a cycle through <{0}>")]
    CyclicHierarchy(String),
    #[error("unknown class <{0}>")]
    UnknownClass(String),
    #[error("malformed indicator <{indicator}>: missing {missing}")]
    MalformedIndicator { indicator: String, missing: String },
}

impl VocabError {
    pub fn name(&self) -> &'static str {
        match self {
            VocabError::Rdf(e) => e.name(),
            VocabError::CyclicHierarchy(_) => "CyclicHierarchyError",
            VocabError::UnknownClass(_) => "UnknownClassError",
            VocabError::MalformedIndicator { .. } => "MalformedIndicatorError",
        }
    }
}

#[derive(Clone, Debug)]
pub struct VocabularyRegistry {
    ontologies: BTreeMap<String, Graph>,
    merged: Graph,
    classes: BTreeSet<String>,
    properties: BTreeMap<String, Option<String>>,
    parents: BTreeMap<String, BTreeSet<String>>,
    domain_namespaces: BTreeSet<String>,
}

/// Loads the built-in vocabularies plus `extra_ontologies`.
pub fn load_registry(extra_ontologies: &[Graph]) -> Result<VocabularyRegistry, VocabError> {
    let named = extra_ontologies
        .iter()
        .enumerate()
        .map(|(i, g)| (format!("extra-{}", i + 1), g.clone()))
        .collect();
    VocabularyRegistry::load_named(named)
}

impl VocabularyRegistry {
    /// The built-in vocabularies only.
    pub fn builtin() -> Self {
        load_registry(&[]).expect("built-in ontologies are well formed")
    }

    pub fn load_named(extra: Vec<(String, Graph)>) -> Result<Self, VocabError> {
        let mut ontologies = BTreeMap::new();
        for (name, text) in BUILTIN {
            ontologies.insert(name.to_string(), parse_turtle(text)?);
        }
        for (name, g) in extra {
            ontologies.insert(name, g);
        }
        let mut merged = rdf::graph_with_standard_prefixes();
        for g in ontologies.values() {
            merged.absorb(g);
        }

        let type_p = rdf::iri(ns::RDF_TYPE);
        let sub_p = rdf::iri(ns::RDFS_SUBCLASS_OF);
        let label_p = rdf::iri(ns::RDFS_LABEL);

        let mut classes = BTreeSet::new();
        for class_kind in [ns::OWL_CLASS, ns::RDFS_CLASS] {
            let kind = rdf::iri(class_kind);
            classes.extend(
                merged
                    .subjects(&type_p, &kind)
                    .filter_map(Term::as_iri)
                    .map(str::to_string),
            );
        }
        let mut parents: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (parent, child) in merged.with_predicate(&sub_p) {
            let (Some(child), Some(parent)) = (child.as_iri(), parent.as_iri()) else {
                continue;
            };
            classes.insert(child.to_string());
            classes.insert(parent.to_string());
            if child != parent {
                parents.entry(child.to_string()).or_default().insert(parent.to_string());
            }
        }

        let mut properties = BTreeMap::new();
        for kind in [ns::RDF_PROPERTY, ns::OWL_OBJECT_PROPERTY, ns::OWL_DATATYPE_PROPERTY] {
            let kind = rdf::iri(kind);
            for p in merged.subjects(&type_p, &kind) {
                let Some(p_iri) = p.as_iri() else { continue };
                let label = merged
                    .object(p, &label_p)
                    .and_then(Term::as_literal)
                    .map(|l| l.lexical().to_string());
                properties.insert(p_iri.to_string(), label);
            }
        }

        let registry = VocabularyRegistry {
            ontologies,
            merged,
            classes,
            properties,
            parents,
            domain_namespaces: [ns::QOE_M.to_string()].into_iter().collect(),
        };
        registry.check_acyclic()?;
        Ok(registry)
    }

    fn check_acyclic(&self) -> Result<(), VocabError> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Active,
            Done,
        }
        let mut marks: BTreeMap<&str, Mark> = BTreeMap::new();
        for start in self.parents.keys() {
            if marks.contains_key(start.as_str()) {
                continue;
            }
            // Iterative DFS: (node, next parent index)
            let mut stack: Vec<(&str, usize)> = vec![(start, 0)];
            marks.insert(start, Mark::Active);
            while let Some((node, idx)) = stack.pop() {
                let next = self.parents.get(node).and_then(|ps| ps.iter().nth(idx));
                match next {
                    Some(parent) => {
                        stack.push((node, idx + 1));
                        match marks.get(parent.as_str()) {
                            Some(Mark::Active) => return Err(VocabError::CyclicHierarchy(parent.clone())),
                            Some(Mark::Done) => {}
                            None => {
                                marks.insert(parent, Mark::Active);
                                stack.push((parent, 0));
                            }
                        }
                    }
                    None => {
                        marks.insert(node, Mark::Done);
                    }
                }
            }
        }
        Ok(())
    }

    pub fn ontology(&self, name: &str) -> Option<&Graph> {
        self.ontologies.get(name)
    }

    pub fn ontology_names(&self) -> impl Iterator<Item = &str> {
        self.ontologies.keys().map(String::as_str)
    }

    /// All ontologies merged into one graph.
    pub fn merged(&self) -> &Graph {
        &self.merged
    }

    pub fn classes(&self) -> &BTreeSet<String> {
        &self.classes
    }

    pub fn has_class(&self, class: &str) -> bool {
        self.classes.contains(class)
    }

    pub fn subclass_axioms(&self) -> BTreeSet<(String, String)> {
        self.parents
            .iter()
            .flat_map(|(c, ps)| ps.iter().map(move |p| (c.clone(), p.clone())))
            .collect()
    }

    pub fn direct_parents(&self, class: &str) -> impl Iterator<Item = &str> {
        self.parents.get(class).into_iter().flatten().map(String::as_str)
    }

    /// Reflexive-transitive superclasses of `class`.
    pub fn subclass_closure(&self, class: &str) -> Result<BTreeSet<String>, VocabError> {
        if !self.has_class(class) {
            return Err(VocabError::UnknownClass(class.to_string()));
        }
        let mut seen = BTreeSet::new();
        let mut frontier = vec![class.to_string()];
        while let Some(c) = frontier.pop() {
            if seen.insert(c.clone()) {
                frontier.extend(self.direct_parents(&c).map(str::to_string));
            }
        }
        Ok(seen)
    }

    /// `child ⊑* parent`; unknown classes are only subclasses of themselves.
    pub fn is_subclass_of(&self, child: &str, parent: &str) -> bool {
        if child == parent {
            return true;
        }
        self.subclass_closure(child)
            .map(|closure| closure.contains(parent))
            .unwrap_or(false)
    }

    pub fn has_property(&self, property: &str) -> bool {
        self.properties.contains_key(property)
    }

    /// The property's `rdfs:label`, used as its column header.
    pub fn property_label(&self, property: &str) -> Option<&str> {
        self.properties.get(property).and_then(|l| l.as_deref())
    }

    pub fn domain_namespaces(&self) -> impl Iterator<Item = &str> {
        self.domain_namespaces.iter().map(String::as_str)
    }

    /// Registers an additional namespace whose classes hold domain data.
    pub fn add_domain_namespace(&mut self, namespace: &str) {
        self.domain_namespaces.insert(namespace.to_string());
    }

    /// Domain classes are the ones whose instances become table rows.
    pub fn is_domain_class(&self, class: &str) -> bool {
        !METADATA_NAMESPACES.iter().any(|m| class.starts_with(m))
            && self.domain_namespaces.iter().any(|d| class.starts_with(d.as_str()))
    }
}

/// Free-function form of [`VocabularyRegistry::subclass_closure`].
pub fn subclass_closure(reg: &VocabularyRegistry, class: &str) -> Result<BTreeSet<String>, VocabError> {
    reg.subclass_closure(class)
}
