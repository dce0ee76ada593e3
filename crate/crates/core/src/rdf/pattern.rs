//! Basic graph pattern evaluation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::graph::Graph;
use super::term::{Term, Triple};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PatternTerm {
    Term(Term),
    Var(String),
}

impl PatternTerm {
    pub fn var(name: &str) -> Self {
        PatternTerm::Var(name.to_string())
    }
}

impl From<Term> for PatternTerm {
    fn from(t: Term) -> Self {
        PatternTerm::Term(t)
    }
}

impl fmt::Display for PatternTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternTerm::Term(t) => write!(f, "{t}"),
            PatternTerm::Var(v) => write!(f, "?{v}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: PatternTerm,
    pub object: PatternTerm,
}

impl TriplePattern {
    pub fn new(
        subject: impl Into<PatternTerm>,
        predicate: impl Into<PatternTerm>,
        object: impl Into<PatternTerm>,
    ) -> Self {
        TriplePattern {
            subject: subject.into(),
            predicate: predicate.into(),
            object: object.into(),
        }
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        [&self.subject, &self.predicate, &self.object]
            .into_iter()
            .filter_map(|p| match p {
                PatternTerm::Var(v) => Some(v.as_str()),
                PatternTerm::Term(_) => None,
            })
    }
}

/// Variable name to term.
pub type Binding = BTreeMap<String, Term>;

fn resolve<'a>(p: &'a PatternTerm, b: &'a Binding) -> Option<&'a Term> {
    match p {
        PatternTerm::Term(t) => Some(t),
        PatternTerm::Var(v) => b.get(v),
    }
}

fn unify(p: &PatternTerm, value: &Term, b: &mut Binding) -> bool {
    match p {
        PatternTerm::Term(t) => t == value,
        PatternTerm::Var(v) => match b.get(v) {
            Some(bound) => bound == value,
            None => {
                b.insert(v.clone(), value.clone());
                true
            }
        },
    }
}

fn extend(pattern: &TriplePattern, triple: &Triple, base: &Binding) -> Option<Binding> {
    let mut b = base.clone();
    (unify(&pattern.subject, triple.subject(), &mut b)
        && unify(&pattern.predicate, triple.predicate(), &mut b)
        && unify(&pattern.object, triple.object(), &mut b))
    .then_some(b)
}

fn candidates(g: &Graph, pattern: &TriplePattern, b: &Binding) -> Vec<Triple> {
    let s = resolve(&pattern.subject, b);
    let p = resolve(&pattern.predicate, b);
    let o = resolve(&pattern.object, b);
    match (s, p, o) {
        (Some(s), _, _) => g.with_subject(s).cloned().collect(),
        (None, Some(p), Some(o)) => g
            .subjects(p, o)
            .map(|s| Triple::unchecked(s.clone(), p.clone(), o.clone()))
            .collect(),
        (None, Some(p), None) => g
            .with_predicate(p)
            .map(|(o, s)| Triple::unchecked(s.clone(), p.clone(), o.clone()))
            .collect(),
        _ => g.iter().cloned().collect(),
    }
}

/// Evaluates a conjunction of triple patterns, returning every distinct
/// solution in ascending binding order.
///
/// Patterns are joined greedily: at each step the pattern with the most
/// positions already fixed by the current solution is evaluated next.
pub fn match_bgp(g: &Graph, patterns: &[TriplePattern]) -> Vec<Binding> {
    let mut remaining: Vec<&TriplePattern> = patterns.iter().collect();
    let mut bound: BTreeSet<&str> = BTreeSet::new();
    let mut solutions: Vec<Binding> = vec![Binding::new()];
    while !remaining.is_empty() && !solutions.is_empty() {
        let next = remaining
            .iter()
            .enumerate()
            .max_by_key(|(i, p)| {
                let fixed = [&p.subject, &p.predicate, &p.object]
                    .iter()
                    .filter(|t| match t {
                        PatternTerm::Term(_) => true,
                        PatternTerm::Var(v) => bound.contains(v.as_str()),
                    })
                    .count();
                // Prefer bound subjects, then earlier patterns on ties.
                let subject_fixed = match &p.subject {
                    PatternTerm::Term(_) => 1,
                    PatternTerm::Var(v) => usize::from(bound.contains(v.as_str())),
                };
                (fixed, subject_fixed, usize::MAX - i)
            })
            .map(|(i, _)| i)
            .expect("remaining is non-empty");
        let pattern = remaining.remove(next);
        let mut extended = Vec::new();
        for b in &solutions {
            for t in candidates(g, pattern, b) {
                if let Some(nb) = extend(pattern, &t, b) {
                    extended.push(nb);
                }
            }
        }
        bound.extend(pattern.variables());
        solutions = extended;
    }
    let unique: BTreeSet<Binding> = solutions.into_iter().collect();
    unique.into_iter().collect()
}
