use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::Bound;

use super::term::{Term, Triple};
use super::RdfError;

/// A set of triples plus the prefix declarations used to abbreviate them.
///
/// Triples are kept in two orderings: subject-predicate-object for the
/// serializer and subject lookups, predicate-object-subject for the matcher.
#[derive(Clone, Debug, Default)]
pub struct Graph {
    spo: BTreeSet<Triple>,
    pos: BTreeSet<(Term, Term, Term)>,
    prefixes: BTreeMap<String, String>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.spo == other.spo && self.prefixes == other.prefixes
    }
}

impl Eq for Graph {}

pub(crate) fn valid_prefix_label(label: &str) -> bool {
    if label.is_empty() {
        return true;
    }
    let chars: Vec<char> = label.chars().collect();
    if !chars[0].is_ascii_alphabetic() {
        return false;
    }
    if chars[chars.len() - 1] == '.' {
        return false;
    }
    chars
        .iter()
        .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

fn min_term() -> Term {
    Term::Iri(String::new())
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.spo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spo.is_empty()
    }

    /// Returns `true` when the triple was not already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        if self.spo.contains(&triple) {
            return false;
        }
        self.pos.insert((
            triple.predicate().clone(),
            triple.object().clone(),
            triple.subject().clone(),
        ));
        self.spo.insert(triple)
    }

    /// Convenience for statements built from already-validated parts.
    pub fn add(&mut self, subject: Term, predicate: &str, object: Term) -> Result<bool, RdfError> {
        let triple = Triple::new(subject, Term::iri(predicate)?, object)?;
        Ok(self.insert(triple))
    }

    pub fn remove(&mut self, triple: &Triple) -> bool {
        if self.spo.remove(triple) {
            self.pos.remove(&(
                triple.predicate().clone(),
                triple.object().clone(),
                triple.subject().clone(),
            ));
            true
        } else {
            false
        }
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.spo.contains(triple)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> + '_ {
        self.spo.iter()
    }

    pub fn prefixes(&self) -> &BTreeMap<String, String> {
        &self.prefixes
    }

    pub fn set_prefix(&mut self, label: &str, namespace: &str) -> Result<(), RdfError> {
        if !valid_prefix_label(label) {
            return Err(RdfError::InvalidPrefix(label.to_string()));
        }
        if !super::term::valid_iri(namespace) {
            return Err(RdfError::InvalidIri(namespace.to_string()));
        }
        self.prefixes.insert(label.to_string(), namespace.to_string());
        Ok(())
    }

    /// All triples with the given subject, in predicate/object order.
    pub fn with_subject<'a>(&'a self, subject: &Term) -> impl Iterator<Item = &'a Triple> + 'a {
        let subject = subject.clone();
        let start = Triple::unchecked(subject.clone(), min_term(), min_term());
        self.spo
            .range((Bound::Included(start), Bound::Unbounded))
            .take_while(move |t| *t.subject() == subject)
    }

    /// Subjects `s` with `(s, predicate, object)` in the graph.
    pub fn subjects<'a>(&'a self, predicate: &Term, object: &Term) -> impl Iterator<Item = &'a Term> + 'a {
        let (predicate, object) = (predicate.clone(), object.clone());
        let start = (predicate.clone(), object.clone(), min_term());
        self.pos
            .range((Bound::Included(start), Bound::Unbounded))
            .take_while(move |(p, o, _)| *p == predicate && *o == object)
            .map(|(_, _, s)| s)
    }

    /// Objects `o` with `(subject, predicate, o)` in the graph.
    pub fn objects<'a>(&'a self, subject: &Term, predicate: &Term) -> impl Iterator<Item = &'a Term> + 'a {
        let (subject, predicate) = (subject.clone(), predicate.clone());
        let start = Triple::unchecked(subject.clone(), predicate.clone(), min_term());
        self.spo
            .range((Bound::Included(start), Bound::Unbounded))
            .take_while(move |t| *t.subject() == subject && *t.predicate() == predicate)
            .map(|t| t.object())
    }

    /// All `(object, subject)` pairs under a predicate.
    pub fn with_predicate<'a>(&'a self, predicate: &Term) -> impl Iterator<Item = (&'a Term, &'a Term)> + 'a {
        let predicate = predicate.clone();
        let start = (predicate.clone(), min_term(), min_term());
        self.pos
            .range((Bound::Included(start), Bound::Unbounded))
            .take_while(move |(p, _, _)| *p == predicate)
            .map(|(_, o, s)| (o, s))
    }

    pub fn object<'a>(&'a self, subject: &Term, predicate: &Term) -> Option<&'a Term> {
        self.objects(subject, predicate).next()
    }

    pub fn blank_labels(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        for t in &self.spo {
            for term in [t.subject(), t.object()] {
                if let Term::BlankNode(label) = term {
                    out.insert(label.as_str());
                }
            }
        }
        out
    }

    /// Union of two graphs. Blank nodes of `other` are renamed where their
    /// labels collide with ours, so the two blank-node scopes stay disjoint.
    /// Prefix conflicts resolve in favour of `self`.
    pub fn merge(&self, other: &Graph) -> Graph {
        let mut out = self.clone();
        out.absorb(other);
        out
    }

    /// In-place form of [`Graph::merge`].
    pub fn absorb(&mut self, other: &Graph) {
        let ours: BTreeSet<String> = self.blank_labels().into_iter().map(str::to_string).collect();
        let theirs = other.blank_labels();
        let mut taken: BTreeSet<String> = ours
            .iter()
            .cloned()
            .chain(theirs.iter().map(|s| s.to_string()))
            .collect();
        let mut renames: HashMap<String, String> = HashMap::new();
        for label in theirs {
            if ours.contains(label) {
                let mut n = 1usize;
                let fresh = loop {
                    let candidate = format!("{label}_{n}");
                    if !taken.contains(&candidate) {
                        break candidate;
                    }
                    n += 1;
                };
                taken.insert(fresh.clone());
                renames.insert(label.to_string(), fresh);
            }
        }
        let rename = |t: &Term| match t {
            Term::BlankNode(l) => match renames.get(l) {
                Some(fresh) => Term::BlankNode(fresh.clone()),
                None => t.clone(),
            },
            _ => t.clone(),
        };
        for t in other.iter() {
            self.insert(Triple::unchecked(
                rename(t.subject()),
                t.predicate().clone(),
                rename(t.object()),
            ));
        }
        for (label, ns) in &other.prefixes {
            self.prefixes.entry(label.clone()).or_insert_with(|| ns.clone());
        }
    }

    pub fn extend<I: IntoIterator<Item = Triple>>(&mut self, triples: I) {
        for t in triples {
            self.insert(t);
        }
    }

    /// Expands `label:local` against the declared prefixes.
    pub fn expand(&self, prefixed: &str) -> Option<String> {
        let (label, local) = prefixed.split_once(':')?;
        self.prefixes.get(label).map(|ns| format!("{ns}{local}"))
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut g = Graph::new();
        g.extend(iter);
        g
    }
}
