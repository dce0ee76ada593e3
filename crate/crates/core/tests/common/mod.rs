//! Generators and brute-force oracles shared by the integration tests and
//! the acceptance runner. Oracles here deliberately avoid the library's own
//! helpers so they can catch its mistakes.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use kgforge::ccsv::{join_values, CcsvBundle, CcsvDocument, ColumnBinding};
use kgforge::dashboard::{ChartType, DimensionBinding, FilterExpr, FilterOp, JoinPath, MeasureBinding, VizSpec};
use kgforge::discovery::FactBase;
use kgforge::ingest::{
    characterize, load_rows, CharacterizationAnswers, ColumnMapping, DatasetCharacterization, IngestMapping,
    MappingRole,
};
use kgforge::ns;
use kgforge::rdf::{Binding, Graph, Literal, PatternTerm, Term, Triple, TriplePattern};
use kgforge::vocab::{AggregateFunction, DimensionSpec, IndicatorDef, MeasureSpec, VocabularyRegistry};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- strings

const NASTY: &[&str] = &[
    ",", "\"", "\"\"", "\n", "\r\n", "---", "|", "\\", " ", "é", "ção", "日本", "'", ";", "#", "\t", "a", "b", "z",
    "0", "42", "x y", "<", ">", "@", "\\n",
];

/// Short strings mixing CSV, Turtle and separator metacharacters.
pub fn nasty_string(r: &mut Rng8, max_parts: usize) -> String {
    let n = r.gen_range(0..=max_parts);
    (0..n).map(|_| *NASTY.choose(r).unwrap()).collect()
}

pub fn nonempty_nasty(r: &mut Rng8, max_parts: usize) -> String {
    loop {
        let s = nasty_string(r, max_parts.max(1));
        if !s.is_empty() {
            return s;
        }
    }
}

// ---------------------------------------------------------------- CCSV

/// A random valid document: one identifier column plus `0..=6` others.
pub fn random_document(r: &mut Rng8) -> CcsvDocument {
    let others = r.gen_range(0..=6);
    let rows_n = r.gen_range(0..=200);
    let separator = if r.gen_bool(0.3) { Some('|') } else { None };
    let mut header = vec!["id".to_string()];
    let mut names = BTreeSet::from(["id".to_string()]);
    while header.len() < others + 1 {
        let name = format!("c{}{}", header.len(), nasty_string(r, 2));
        if names.insert(name.clone()) {
            header.push(name);
        }
    }
    // identifier need not be first
    let id_pos = r.gen_range(0..header.len());
    header.swap(0, id_pos);
    let class = format!("{}Generated{}", ns::QOE_M, r.gen_range(0..5));
    let mut bindings = Vec::new();
    for (i, name) in header.iter().enumerate() {
        let b = if i == id_pos {
            ColumnBinding::identifier(i + 1, name, &class)
        } else if r.gen_bool(0.6) {
            ColumnBinding::attribute(i + 1, name, format!("{}p{i}", ns::QOE_M))
        } else {
            let prop = r.gen_bool(0.8).then(|| format!("{}r{i}", ns::QOE_M));
            ColumnBinding::reference(i + 1, name, prop, format!("{}Target{i}", ns::QOE_M))
        };
        bindings.push(b);
    }
    let mut ids = BTreeSet::new();
    let mut rows = Vec::new();
    while rows.len() < rows_n {
        let id = format!("{}{}", rows.len(), nasty_string(r, 2));
        if !ids.insert(id.clone()) {
            continue;
        }
        let row = (0..header.len())
            .map(|i| {
                if i == id_pos {
                    id.clone()
                } else if let Some(sep) = separator.filter(|_| r.gen_bool(0.5)) {
                    let vals: Vec<String> = (0..r.gen_range(1..=3)).map(|_| nonempty_nasty(r, 3)).collect();
                    join_values(&vals, sep)
                } else {
                    nasty_string(r, 4)
                }
            })
            .collect();
        rows.push(row);
    }
    CcsvDocument::new(
        &format!("{}dataset/gen{}", ns::KG, r.gen_range(0..100)),
        &class,
        header,
        bindings,
        rows,
        separator,
        &Graph::new(),
    )
    .expect("generated documents are valid")
}

// ---------------------------------------------------------------- RDF

fn random_iri(r: &mut Rng8) -> Term {
    let ns = ["http://example.org/", "http://example.org/vocab#", "urn:x:", ns::QOE_M];
    let locals = ["a", "b", "c", "Station", "trip-1", "x_y", "9lives", "p.q", "", "é"];
    Term::iri(format!("{}{}", ns.choose(r).unwrap(), locals.choose(r).unwrap())).unwrap()
}

fn random_literal(r: &mut Rng8) -> Term {
    let lex = nasty_string(r, 4);
    match r.gen_range(0..4) {
        0 => Term::Literal(Literal::plain(lex)),
        1 => Term::Literal(Literal::lang(lex, *["en", "pt-BR", "x-y-z"].choose(r).unwrap())),
        2 => Term::typed_literal(lex, ns::XSD_INTEGER),
        _ => Term::typed_literal(r.gen_range(-50..50).to_string(), ns::XSD_INTEGER),
    }
}

fn random_node(r: &mut Rng8, blanks: usize) -> Term {
    if blanks > 0 && r.gen_bool(0.25) {
        Term::blank(format!("b{}", r.gen_range(0..blanks))).unwrap()
    } else {
        random_iri(r)
    }
}

/// Up to `max` triples over a small term pool, with blank nodes, literals and
/// a couple of prefixes.
pub fn random_graph(r: &mut Rng8, max: usize) -> Graph {
    let mut g = Graph::new();
    if r.gen_bool(0.7) {
        g.set_prefix("ex", "http://example.org/").unwrap();
        g.set_prefix("qoe-m", ns::QOE_M).unwrap();
    }
    if r.gen_bool(0.3) {
        g.set_prefix("", "http://example.org/vocab#").unwrap();
    }
    let n = r.gen_range(0..=max);
    let blanks = r.gen_range(0..6);
    for _ in 0..n {
        let s = random_node(r, blanks);
        let p = if r.gen_bool(0.1) {
            Term::iri(ns::RDF_TYPE).unwrap()
        } else {
            random_iri(r)
        };
        let o = if r.gen_bool(0.4) {
            random_literal(r)
        } else {
            random_node(r, blanks)
        };
        g.insert(Triple::new(s, p, o).unwrap());
    }
    g
}

/// Dense graph over a handful of terms so patterns join often.
pub fn small_dense_graph(r: &mut Rng8) -> (Graph, Vec<Term>) {
    let pool: Vec<Term> = (0..r.gen_range(2..6))
        .map(|i| Term::iri(format!("http://example.org/n{i}")).unwrap())
        .chain([Term::literal("v")])
        .collect();
    let iris = &pool[..pool.len() - 1];
    let mut g = Graph::new();
    for _ in 0..r.gen_range(0..40) {
        let s = iris.choose(r).unwrap().clone();
        let p = iris.choose(r).unwrap().clone();
        let o = pool.choose(r).unwrap().clone();
        g.insert(Triple::new(s, p, o).unwrap());
    }
    (g, pool)
}

pub fn random_patterns(r: &mut Rng8, pool: &[Term]) -> Vec<TriplePattern> {
    let vars = ["x", "y", "z", "w"];
    let pick = |r: &mut Rng8| -> PatternTerm {
        if r.gen_bool(0.6) {
            PatternTerm::var(vars.choose(r).unwrap())
        } else {
            PatternTerm::Term(pool.choose(r).unwrap().clone())
        }
    };
    (0..r.gen_range(1..=4))
        .map(|_| {
            let s = pick(r);
            let p = pick(r);
            let o = pick(r);
            TriplePattern::new(s, p, o)
        })
        .collect()
}

/// Every assignment built by trying every triple for every pattern in order.
pub fn nested_loop_bgp(g: &Graph, patterns: &[TriplePattern]) -> BTreeSet<Binding> {
    fn bind(slot: &PatternTerm, value: &Term, b: &mut Binding) -> bool {
        match slot {
            PatternTerm::Term(t) => t == value,
            PatternTerm::Var(v) => match b.get(v) {
                Some(old) => old == value,
                None => {
                    b.insert(v.clone(), value.clone());
                    true
                }
            },
        }
    }
    fn go(g: &Graph, patterns: &[TriplePattern], b: Binding, out: &mut BTreeSet<Binding>) {
        let Some((first, rest)) = patterns.split_first() else {
            out.insert(b);
            return;
        };
        for t in g.iter() {
            let mut nb = b.clone();
            if bind(&first.subject, t.subject(), &mut nb)
                && bind(&first.predicate, t.predicate(), &mut nb)
                && bind(&first.object, t.object(), &mut nb)
            {
                go(g, rest, nb, out);
            }
        }
    }
    let mut out = BTreeSet::new();
    go(g, patterns, Binding::new(), &mut out);
    out
}

// ---------------------------------------------------------------- discovery

pub fn class(i: usize) -> String {
    format!("http://example.org/C{i}")
}

fn count_indicator(iri: &str, dims: &[String], measures: &[String]) -> IndicatorDef {
    IndicatorDef::new(
        iri.to_string(),
        iri,
        dims.iter()
            .map(|c| DimensionSpec {
                entity_class: c.clone(),
            })
            .collect(),
        measures
            .iter()
            .map(|c| MeasureSpec {
                entity_class: c.clone(),
                function: AggregateFunction::Count,
                value_property: None,
            })
            .collect(),
    )
    .expect("generated indicators are well formed")
}

/// Up to 10 classes with random acyclic subclass edges, up to 4 record
/// classes and up to 5 indicators.
pub fn random_facts(r: &mut Rng8) -> FactBase {
    let n = r.gen_range(1..=10);
    let mut subclass = BTreeSet::new();
    for child in 0..n {
        for parent in 0..child {
            if r.gen_bool(0.25) {
                subclass.insert((class(child), class(parent)));
            }
        }
    }
    let records: BTreeSet<usize> = (0..r.gen_range(0..=4)).map(|_| r.gen_range(0..n)).collect();
    let indicators = (0..r.gen_range(0..=5))
        .map(|i| {
            let dims: Vec<String> = (0..r.gen_range(0..=2)).map(|_| class(r.gen_range(0..n))).collect();
            let measures: Vec<String> = (0..r.gen_range(1..=2)).map(|_| class(r.gen_range(0..n))).collect();
            count_indicator(&format!("http://example.org/I{i}"), &dims, &measures)
        })
        .collect();
    facts_from(
        subclass,
        &records.iter().map(|&c| class(c)).collect::<Vec<_>>(),
        indicators,
    )
}

pub fn facts_from(subclass: BTreeSet<(String, String)>, records: &[String], indicators: Vec<IndicatorDef>) -> FactBase {
    let mut f = FactBase {
        subclass,
        indicators: indicators.clone(),
        ..FactBase::default()
    };
    for c in records {
        let ds = format!("http://example.org/ds/{}", c.rsplit('/').next().unwrap());
        f.contains_records_of.insert((ds.clone(), c.clone()));
        f.documents.insert(ds, c.rsplit('/').next().unwrap().to_string());
    }
    for def in &indicators {
        for (i, d) in def.dimensions.iter().enumerate() {
            f.defined_by.insert((def.iri.clone(), def.dimension_node(i)));
            f.associated_thing
                .insert((def.dimension_node(i), d.entity_class.clone()));
        }
        for (i, m) in def.measures.iter().enumerate() {
            f.defined_by.insert((def.iri.clone(), def.measure_node(i)));
            f.associated_thing.insert((def.measure_node(i), m.entity_class.clone()));
        }
    }
    f
}

/// A ⊑ B ⊑ C ⊑ D with records of A only and one indicator needing D.
pub fn chain_of_three() -> FactBase {
    let sub = [(1, 2), (2, 3), (3, 4)]
        .iter()
        .map(|&(c, p)| (class(c), class(p)))
        .collect();
    facts_from(
        sub,
        &[class(1)],
        vec![count_indicator("http://example.org/Chain", &[], &[class(4)])],
    )
}

/// Suitability by explicit search: each required class must be reachable
/// upward from some record class.
pub fn brute_force_suitability(f: &FactBase) -> Vec<bool> {
    let reaches = |from: &str, to: &str| -> bool {
        let mut seen = BTreeSet::new();
        let mut stack = vec![from.to_string()];
        while let Some(c) = stack.pop() {
            if c == to {
                return true;
            }
            if seen.insert(c.clone()) {
                stack.extend(f.subclass.iter().filter(|(ch, _)| *ch == c).map(|(_, p)| p.clone()));
            }
        }
        false
    };
    f.indicators
        .iter()
        .map(|def| {
            def.dimensions
                .iter()
                .map(|d| &d.entity_class)
                .chain(def.measures.iter().map(|m| &m.entity_class))
                .all(|need| f.contains_records_of.iter().any(|(_, rc)| reaches(rc, need)))
        })
        .collect()
}

// ---------------------------------------------------------------- ingest

pub fn answers() -> CharacterizationAnswers {
    kgforge::fixture::characterization()
}

pub fn characterization() -> DatasetCharacterization {
    characterize(&answers()).unwrap()
}

const GEN_CLASSES: [&str; 5] = [
    "Bicycle-Share_Trip",
    "Bicycle-Share_Station",
    "Bus_Line",
    "User",
    "Bicycle_Lane",
];
const ATTR_PROPS: [&str; 5] = ["label", "latitude", "longitude", "length", "duration"];
const REF_PROPS: [&str; 4] = ["fromStation", "toStation", "user", "line"];

fn safe_id(r: &mut Rng8, n: usize) -> String {
    let extras = ["", " x", "é", ",q", "\"", "-1", "/"];
    format!("i{n}{}", extras.choose(r).unwrap())
}

/// Loads 1 to 3 random CSV datasets (at most 50 records in total) over the
/// builtin vocabulary. References point at loaded records of the target
/// class when it has a dataset, at fresh identifiers otherwise.
pub fn random_kg(r: &mut Rng8, reg: &VocabularyRegistry) -> Graph {
    let ch = characterization();
    let mut classes: Vec<&str> = GEN_CLASSES.to_vec();
    classes.shuffle(r);
    let loaded: Vec<&str> = classes[..r.gen_range(1..=3)].to_vec();
    let mut budget = 50usize;
    let mut ids: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for (i, c) in loaded.iter().enumerate() {
        let n = r.gen_range(usize::from(i == 0)..=budget.min(20));
        budget -= n;
        ids.insert(c, (0..n).map(|i| safe_id(r, i)).collect());
    }
    let mut kg = Graph::new();
    for c in &loaded {
        let separator = if r.gen_bool(0.4) { Some('|') } else { None };
        let mut columns = vec![ColumnMapping {
            column: "id".into(),
            role: MappingRole::Identifier,
        }];
        let mut kinds = Vec::new();
        let mut attrs = ATTR_PROPS.to_vec();
        attrs.shuffle(r);
        for (k, p) in attrs.iter().take(r.gen_range(0..=3)).enumerate() {
            let (datatype, language) = match r.gen_range(0..3) {
                0 => (None, None),
                1 => (Some(ns::XSD_DECIMAL.to_string()), None),
                _ => (None, Some("pt".to_string())),
            };
            columns.push(ColumnMapping {
                column: format!("a{k}"),
                role: MappingRole::Attribute {
                    property: format!("{}{p}", ns::QOE_M),
                    datatype,
                    language,
                },
            });
            kinds.push(None);
        }
        let mut refs = REF_PROPS.to_vec();
        refs.shuffle(r);
        for (k, p) in refs.iter().take(r.gen_range(0..=2)).enumerate() {
            let target = *GEN_CLASSES.choose(r).unwrap();
            columns.push(ColumnMapping {
                column: format!("r{k}"),
                role: MappingRole::Reference {
                    property: format!("{}{p}", ns::QOE_M),
                    target_class: format!("{}{target}", ns::QOE_M),
                },
            });
            kinds.push(Some(target));
        }
        let header: Vec<String> = columns.iter().map(|c| c.column.clone()).collect();
        let rows: Vec<Vec<String>> = ids[c]
            .iter()
            .map(|id| {
                let mut row = vec![id.clone()];
                for kind in &kinds {
                    let values: Vec<String> = (0..r.gen_range(0..=2))
                        .map(|_| match kind {
                            None => nonempty_nasty(r, 3),
                            Some(t) => match ids.get(t) {
                                Some(pool) if !pool.is_empty() => pool.choose(r).unwrap().clone(),
                                Some(_) => String::new(),
                                None => format!("ext{}", r.gen_range(0..5)),
                            },
                        })
                        .filter(|v| !v.is_empty())
                        .collect();
                    let cell = match separator {
                        Some(sep) => join_values(&values, sep),
                        None => values.into_iter().next().unwrap_or_default(),
                    };
                    row.push(cell);
                }
                row
            })
            .collect();
        let mapping = IngestMapping {
            records_class: format!("{}{c}", ns::QOE_M),
            dataset_name: None,
            value_separator: separator,
            columns,
        };
        kg = load_rows(&header, &rows, &mapping, &ch, &kg, reg).expect("generated datasets load");
    }
    kg
}

// ---------------------------------------------------------------- aggregation

pub struct AggCase {
    pub bundle: CcsvBundle,
    pub vizzes: Vec<VizSpec>,
    pub filters: Vec<FilterExpr>,
}

fn doc(name: &str, header: &[&str], bindings: Vec<ColumnBinding>, rows: Vec<Vec<String>>) -> CcsvDocument {
    CcsvDocument::new(
        &format!("http://example.org/dataset/{name}"),
        &format!("http://example.org/{name}"),
        header.iter().map(|h| h.to_string()).collect(),
        bindings,
        rows,
        Some('|'),
        &Graph::new(),
    )
    .unwrap()
}

fn number(r: &mut Rng8) -> String {
    match r.gen_range(0..4) {
        0 => r.gen_range(0..1000).to_string(),
        1 => format!("{:.2}", r.gen_range(0.0..500.0)),
        2 => format!("{}e{}", r.gen_range(1..9), r.gen_range(-2..3)),
        _ => format!("+{}.5", r.gen_range(0..100)),
    }
}

/// A dimension document `Place` and a measure document `Event` with up to
/// 1000 rows, plus one visualization per function and chart shape and a
/// random filter list.
pub fn random_agg_case(r: &mut Rng8) -> AggCase {
    let places = r.gen_range(1..=12);
    let place_ids: Vec<String> = (0..places).map(|i| format!("p{i:02}")).collect();
    let place_rows = place_ids
        .iter()
        .map(|id| vec![id.clone(), format!("Place {}", id.to_uppercase())])
        .collect();
    let place = doc(
        "Place",
        &["id", "label"],
        vec![
            ColumnBinding::identifier(1, "id", "http://example.org/Place"),
            ColumnBinding::attribute(2, "label", "http://example.org/label"),
        ],
        place_rows,
    );
    let n = r.gen_range(0..=1000);
    let kinds = ["red", "green", "blue"];
    let events = (0..n)
        .map(|i| {
            let at = match r.gen_range(0..10) {
                0 => String::new(),
                1 => {
                    let mut two: Vec<&String> = place_ids.choose_multiple(r, 2).collect();
                    two.sort();
                    two.iter().map(|s| s.as_str()).collect::<Vec<_>>().join("|")
                }
                _ => place_ids.choose(r).unwrap().clone(),
            };
            let amount = if r.gen_bool(0.1) { String::new() } else { number(r) };
            vec![format!("e{i}"), at, amount, kinds.choose(r).unwrap().to_string()]
        })
        .collect();
    let event = doc(
        "Event",
        &["id", "at", "amount", "kind"],
        vec![
            ColumnBinding::identifier(1, "id", "http://example.org/Event"),
            ColumnBinding::reference(
                2,
                "at",
                Some("http://example.org/at".into()),
                "http://example.org/Place",
            ),
            ColumnBinding::attribute(3, "amount", "http://example.org/amount"),
            ColumnBinding::attribute(4, "kind", "http://example.org/kind"),
        ],
        events,
    );
    let bundle = CcsvBundle {
        documents: vec![event, place],
        shared_metadata: Graph::new(),
    };

    let mut vizzes = Vec::new();
    for f in AggregateFunction::ALL {
        let column = if f == AggregateFunction::Count { "id" } else { "amount" };
        let measure = MeasureBinding {
            document: "Event".into(),
            column: column.into(),
            function: f,
        };
        vizzes.push(VizSpec {
            id: format!("joined-{f}"),
            title: String::new(),
            chart_type: ChartType::Bar,
            indicator: None,
            dimension_binding: Some(DimensionBinding {
                document: "Place".into(),
                column: "id".into(),
                label_column: Some("label".into()),
            }),
            measure_binding: measure.clone(),
            join_path: Some(JoinPath {
                measure_column: "at".into(),
                dimension_column: "id".into(),
            }),
        });
        vizzes.push(VizSpec {
            id: format!("local-{f}"),
            title: String::new(),
            chart_type: ChartType::Table,
            indicator: None,
            dimension_binding: Some(DimensionBinding {
                document: "Event".into(),
                column: "kind".into(),
                label_column: None,
            }),
            measure_binding: measure.clone(),
            join_path: None,
        });
        vizzes.push(VizSpec {
            id: format!("total-{f}"),
            title: String::new(),
            chart_type: ChartType::Number,
            indicator: None,
            dimension_binding: None,
            measure_binding: measure,
            join_path: None,
        });
    }

    let mut filters = Vec::new();
    for _ in 0..r.gen_range(0..=2) {
        let f = match r.gen_range(0..4) {
            0 => FilterExpr::eq("Event", "kind", kinds.choose(r).unwrap()),
            1 => FilterExpr {
                document: "Event".into(),
                column: "amount".into(),
                op: {
                    let a = r.gen_range(0.0..600.0);
                    let b = r.gen_range(0.0..600.0);
                    FilterOp::Range {
                        min: f64::min(a, b),
                        max: f64::max(a, b),
                    }
                },
            },
            2 => FilterExpr {
                document: "Place".into(),
                column: "label".into(),
                op: FilterOp::In {
                    values: place_ids
                        .choose_multiple(r, 3)
                        .map(|p| format!("Place {}", p.to_uppercase()))
                        .collect(),
                },
            },
            _ => FilterExpr {
                document: "Event".into(),
                column: "at".into(),
                op: FilterOp::Eq {
                    value: place_ids.choose(r).unwrap().clone(),
                },
            },
        };
        filters.push(f);
    }
    AggCase {
        bundle,
        vizzes,
        filters,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleKey {
    Total,
    Member(String),
    Unlinked,
}

/// Straight group-by over the generated case, for comparison with
/// `aggregate`. Returns (groups in key order, rows considered).
pub fn oracle_aggregate(case: &AggCase, viz: &VizSpec, filters: &[FilterExpr]) -> (Vec<(OracleKey, f64)>, usize) {
    let event = case.bundle.documents.iter().find(|d| d.name() == "Event").unwrap();
    let place = case.bundle.documents.iter().find(|d| d.name() == "Place").unwrap();
    let split = |cell: &str| -> Vec<String> {
        if cell.is_empty() {
            vec![]
        } else {
            cell.split('|').map(str::to_string).collect()
        }
    };
    let label_of: BTreeMap<&str, &str> = place.rows.iter().map(|r| (r[0].as_str(), r[1].as_str())).collect();
    let col = |name: &str| event.header.iter().position(|h| h == name).unwrap();
    let passes = |row: &Vec<String>, f: &FilterExpr| -> bool {
        let test = |v: &str| match &f.op {
            FilterOp::Eq { value } => v == value,
            FilterOp::In { values } => values.iter().any(|x| x == v),
            FilterOp::Range { min, max } => v.parse::<f64>().map(|x| *min <= x && x <= *max).unwrap_or(false),
        };
        if f.document == "Event" {
            split(&row[col(&f.column)]).iter().any(|v| test(v))
        } else {
            // Place.label, reached through `at`
            split(&row[col("at")])
                .iter()
                .any(|p| label_of.get(p.as_str()).is_some_and(|l| test(l)))
        }
    };
    let mut groups: BTreeMap<String, (usize, Vec<f64>)> = BTreeMap::new();
    let mut considered = 0;
    let func = viz.measure_binding.function;
    for row in &event.rows {
        if !filters.iter().all(|f| passes(row, f)) {
            continue;
        }
        considered += 1;
        let keys: BTreeSet<String> = match (&viz.dimension_binding, &viz.join_path) {
            (None, _) => ["".to_string()].into(),
            (Some(_), Some(j)) => split(&row[col(&j.measure_column)])
                .into_iter()
                .map(|k| format!("m{k}"))
                .collect(),
            (Some(d), None) => split(&row[col(&d.column)])
                .into_iter()
                .map(|k| format!("m{k}"))
                .collect(),
        };
        let keys = if keys.is_empty() {
            ["~unlinked".to_string()].into()
        } else {
            keys
        };
        let values: Vec<f64> = if func == AggregateFunction::Count {
            vec![]
        } else {
            split(&row[col(&viz.measure_binding.column)])
                .iter()
                .map(|v| v.parse::<f64>().unwrap())
                .collect()
        };
        let measured = !row[col(&viz.measure_binding.column)].is_empty();
        for k in keys {
            let e = groups.entry(k).or_default();
            e.0 += usize::from(measured);
            if func != AggregateFunction::Count {
                e.1.extend(&values);
            }
        }
    }
    if viz.dimension_binding.is_none() {
        groups.entry(String::new()).or_default();
    }
    let mut out = Vec::new();
    for (k, (rows, vals)) in groups {
        let value = match func {
            AggregateFunction::Count => Some(rows as f64),
            AggregateFunction::Sum => Some(vals.iter().sum()),
            _ if vals.is_empty() => None,
            AggregateFunction::Avg => Some(vals.iter().sum::<f64>() / vals.len() as f64),
            AggregateFunction::Min => vals.iter().copied().reduce(f64::min),
            AggregateFunction::Max => vals.iter().copied().reduce(f64::max),
        };
        let key = if k.is_empty() {
            OracleKey::Total
        } else if k == "~unlinked" {
            OracleKey::Unlinked
        } else {
            OracleKey::Member(k[1..].to_string())
        };
        if let Some(v) = value {
            out.push((key, v));
        }
    }
    (out, considered)
}

pub fn close(a: f64, b: f64, exact: bool) -> bool {
    if exact {
        a == b
    } else {
        (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
    }
}

/// Serializes the KG, reloads every document into an empty graph and
/// compares the domain instance subgraphs.
pub fn lossless(kg: &Graph, reg: &VocabularyRegistry) -> bool {
    use kgforge::ingest::load_document;
    use kgforge::serializer::{domain_instance_subgraph, serialize_kg};
    let bundle = serialize_kg(kg, reg).unwrap();
    let ch = characterization();
    let mut back = Graph::new();
    for d in &bundle.documents {
        back = load_document(d, &ch, &back, reg).unwrap();
    }
    let a = domain_instance_subgraph(kg, reg).unwrap();
    let b = domain_instance_subgraph(&back, reg).unwrap();
    kgforge::rdf::isomorphic(&a, &b)
}

// ---------------------------------------------------------------- fixture

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn types_in(g: &Graph, class: &str) -> usize {
    g.iter()
        .filter(|t| t.predicate().as_iri() == Some(ns::RDF_TYPE) && t.object().as_iri() == Some(class))
        .count()
}

/// Trips per origin station, read straight from the sample CSV.
pub fn fixture_trips_by_origin() -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    let mut lines = kgforge::fixture::TRIPS_CSV.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let origin = header.iter().position(|h| *h == "origin_station_id").unwrap();
    for line in lines.filter(|l| !l.trim().is_empty()) {
        *out.entry(line.split(',').nth(origin).unwrap().to_string())
            .or_insert(0.0) += 1.0;
    }
    out
}

/// The bike-share sample end to end: ingest, serialize, discover and the
/// generated dashboard's numbers.
pub fn fixture_pipeline() -> Result<(), String> {
    use kgforge::dashboard::{aggregate, generate_specs, GroupKey};
    use kgforge::serializer::serialize_and_discover;
    use kgforge::vocab::sample_catalog;

    let reg = VocabularyRegistry::builtin();
    let kg = kgforge::fixture::kg(&reg);
    let (bundle, discovered, results) =
        serialize_and_discover(&kg, &reg, &sample_catalog()).map_err(|e| e.to_string())?;
    ensure!(bundle.documents.len() == 2, "{} documents", bundle.documents.len());
    let meta = &bundle.shared_metadata;
    ensure!(types_in(meta, ns::HASCO_STUDY) == 1, "study missing from provenance");
    ensure!(
        types_in(meta, ns::VSTOI_DEPLOYMENT) == 1,
        "deployment missing from provenance"
    );
    ensure!(
        types_in(meta, ns::HASCO_DATA_ACQUISITION) + types_in(meta, ns::HACITO_MANUAL_DATA_ANNOTATION) >= 2,
        "acquisitions missing from provenance"
    );
    let suitable: Vec<&str> = results
        .iter()
        .filter(|r| r.suitable)
        .map(|r| r.indicator.label.as_str())
        .collect();
    ensure!(suitable == ["Trips by departure station"], "suitable: {suitable:?}");

    let spec = generate_specs(&discovered, &bundle).map_err(|e| e.to_string())?;
    let bar = spec
        .visualizations
        .iter()
        .find(|v| v.dimension_binding.is_some())
        .ok_or("no chart with a dimension")?;
    let got = aggregate(&bundle, bar, &[]).map_err(|e| e.to_string())?;
    let pairs: BTreeMap<String, f64> = got
        .groups
        .iter()
        .filter_map(|g| match &g.key {
            GroupKey::Member(k) => Some((k.clone(), g.value)),
            _ => None,
        })
        .collect();
    ensure!(pairs == fixture_trips_by_origin(), "groups {pairs:?}");
    ensure!(
        pairs.values().copied().collect::<Vec<_>>() == [3.0, 1.0, 1.0],
        "counts {pairs:?}"
    );
    ensure!(got.groups.iter().all(|g| g.label.is_some()), "unlabelled group");
    ensure!(
        got.total_rows_considered == 5,
        "considered {}",
        got.total_rows_considered
    );

    let trip_doc = bundle
        .document_for_class(ns::QOE_M_BICYCLE_SHARE_TRIP)
        .ok_or("no trip document")?;
    let user_col = trip_doc
        .header
        .iter()
        .find(|h| h.contains("user"))
        .ok_or("no user column")?
        .clone();
    let f = kgforge::dashboard::FilterExpr::eq(trip_doc.name(), &user_col, "u1");
    let u1 = aggregate(&bundle, bar, &[f]).map_err(|e| e.to_string())?;
    let u1: Vec<(GroupKey, f64)> = u1.groups.iter().map(|g| (g.key.clone(), g.value)).collect();
    ensure!(u1 == [(GroupKey::Member("s1".into()), 2.0)], "u1 groups {u1:?}");
    Ok(())
}

// ---------------------------------------------------------------- HTTP

/// Starts the API on an ephemeral port over a fresh data directory.
pub async fn spawn_server(dir: &std::path::Path) -> String {
    use kgforge::service::{router, AppState};
    use kgforge::workspace::{Settings, Workspace};
    let ws = Workspace::new(dir, Settings::default());
    let snap = ws.load().unwrap();
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move {
        axum::serve(listener, router(AppState::new(ws, snap))).await.unwrap();
    });
    format!("http://{addr}")
}

async fn call(
    c: &reqwest::Client,
    method: reqwest::Method,
    url: String,
    body: Option<serde_json::Value>,
) -> Result<(u16, serde_json::Value), String> {
    let mut req = c.request(method, url);
    if let Some(b) = body {
        req = req.json(&b);
    }
    let resp = req.send().await.map_err(|e| e.to_string())?;
    let status = resp.status().as_u16();
    let text = resp.text().await.map_err(|e| e.to_string())?;
    let value = if text.is_empty() {
        serde_json::Value::Null
    } else {
        serde_json::from_str(&text).map_err(|e| format!("{e}: {text}"))?
    };
    Ok((status, value))
}

fn error_name(v: &serde_json::Value) -> &str {
    v["error"].as_str().unwrap_or("")
}

/// Walks every endpoint against a server started on an empty directory.
pub async fn http_contract(base: &str) -> Result<(), String> {
    use reqwest::Method;
    use serde_json::json;
    let c = reqwest::Client::new();
    let get = |p: &str| call(&c, Method::GET, format!("{base}{p}"), None);
    let reqs: Vec<serde_json::Value> = kgforge::fixture::requests()
        .iter()
        .map(|r| serde_json::to_value(r).unwrap())
        .collect();

    let (s, v) = get("/datasets").await?;
    ensure!(s == 200 && v == json!([]), "empty list: {s} {v}");
    let (s, v) = call(&c, Method::POST, format!("{base}/kg/serialize"), None).await?;
    ensure!(
        s == 409 && error_name(&v) == "EmptyKgError",
        "serialize before ingest: {s} {v}"
    );
    let (s, v) = get("/indicators/discovered").await?;
    ensure!(
        s == 404 && error_name(&v) == "NotSerializedError",
        "discovered before serialize: {s} {v}"
    );
    let (s, _) = get("/kg/manifest").await?;
    ensure!(s == 404, "manifest before serialize: {s}");
    let (s, v) = call(&c, Method::POST, format!("{base}/dashboards"), None).await?;
    ensure!(
        s == 404 && error_name(&v) == "NotSerializedError",
        "dashboard before serialize: {s} {v}"
    );

    // rejected uploads
    let mut ragged = reqs[0].clone();
    ragged["csv"] = json!("id,label,lat,long\ns1,a,1\n");
    let (s, v) = call(&c, Method::POST, format!("{base}/datasets"), Some(ragged)).await?;
    ensure!(s == 400 && error_name(&v) == "RowWidthError", "ragged csv: {s} {v}");
    let mut unknown = reqs[0].clone();
    unknown["characterization"] = json!({});
    let (s, v) = call(&c, Method::POST, format!("{base}/datasets"), Some(unknown)).await?;
    ensure!(
        s == 422 && error_name(&v) == "IncompleteCharacterizationError",
        "missing answers: {s} {v}"
    );
    let resp = c
        .post(format!("{base}/datasets"))
        .header("content-type", "application/json")
        .body("{not json")
        .send()
        .await
        .map_err(|e| e.to_string())?;
    ensure!(resp.status().as_u16() == 400, "bad json: {}", resp.status());
    let (_, v) = get("/datasets").await?;
    ensure!(v == json!([]), "rejected uploads left datasets: {v}");

    for (i, r) in reqs.iter().enumerate() {
        let (s, v) = call(&c, Method::POST, format!("{base}/datasets"), Some(r.clone())).await?;
        ensure!(
            s == 201 && v["id"] == json!(format!("ds-{}", i + 1)),
            "upload {i}: {s} {v}"
        );
    }
    let (_, v) = get("/datasets").await?;
    ensure!(v.as_array().map(Vec::len) == Some(2), "dataset list: {v}");

    let (s, manifest) = call(&c, Method::POST, format!("{base}/kg/serialize"), None).await?;
    ensure!(s == 200, "serialize: {s} {manifest}");
    ensure!(
        manifest["documents"].as_array().map(Vec::len) == Some(2),
        "manifest: {manifest}"
    );
    let mut bodies = Vec::new();
    for _ in 0..2 {
        let resp = c
            .post(format!("{base}/kg/serialize"))
            .send()
            .await
            .map_err(|e| e.to_string())?;
        bodies.push(resp.bytes().await.map_err(|e| e.to_string())?);
    }
    ensure!(bodies[0] == bodies[1], "repeated serialize bodies differ");
    let again: serde_json::Value = serde_json::from_slice(&bodies[0]).map_err(|e| e.to_string())?;
    ensure!(again == manifest, "serialize output changed");
    let (s, v) = get("/kg/manifest").await?;
    ensure!(s == 200 && v == manifest, "manifest: {s}");

    let (s, v) = get("/indicators/discovered").await?;
    ensure!(s == 200, "discovered: {s} {v}");
    let ttl = v["turtle"].as_str().ok_or("no turtle field")?;
    let parsed = kgforge::rdf::parse_turtle(ttl).map_err(|e| e.to_string())?;
    ensure!(!parsed.is_empty(), "discovered graph is empty");
    ensure!(
        v["indicators"].as_array().map(Vec::len) == Some(1),
        "indicators: {}",
        v["indicators"]
    );
    let raw = c
        .get(format!("{base}/indicators/discovered"))
        .header("accept", "text/turtle")
        .send()
        .await
        .map_err(|e| e.to_string())?;
    ensure!(
        raw.headers()["content-type"]
            .to_str()
            .unwrap_or("")
            .starts_with("text/turtle"),
        "turtle content type"
    );
    let raw = raw.text().await.map_err(|e| e.to_string())?;
    ensure!(
        kgforge::rdf::isomorphic(&kgforge::rdf::parse_turtle(&raw).map_err(|e| e.to_string())?, &parsed),
        "turtle bodies differ"
    );

    let (s, v) = call(&c, Method::POST, format!("{base}/dashboards"), Some(json!({}))).await?;
    ensure!(s == 201 && v["id"] == json!("dash-1"), "dashboard: {s} {v}");
    let (s, spec) = get("/dashboards/dash-1").await?;
    ensure!(s == 200, "get dashboard: {s}");
    let vizzes = spec["visualizations"].as_array().ok_or("no visualizations")?;
    let bar = vizzes
        .iter()
        .find(|v| !v["dimension_binding"].is_null())
        .ok_or("no bar chart")?;
    let viz_id = bar["id"].as_str().unwrap().to_string();
    let measure_doc = bar["measure_binding"]["document"].as_str().unwrap().to_string();

    let (s, r) = call(
        &c,
        Method::POST,
        format!("{base}/dashboards/dash-1/query"),
        Some(json!({"viz": viz_id})),
    )
    .await?;
    ensure!(s == 200, "query: {s} {r}");
    let values: Vec<f64> = r["groups"]
        .as_array()
        .unwrap()
        .iter()
        .map(|g| g["value"].as_f64().unwrap())
        .collect();
    ensure!(values == [3.0, 1.0, 1.0], "query groups: {r}");
    let filter = json!({"document": measure_doc, "column": "user_id", "op": "eq", "value": "u1"});
    let (s, r) = call(
        &c,
        Method::POST,
        format!("{base}/dashboards/dash-1/query"),
        Some(json!({"viz": viz_id, "filters": [filter.clone()]})),
    )
    .await?;
    ensure!(
        s == 200 && r["groups"].as_array().map(Vec::len) == Some(1),
        "filtered query: {s} {r}"
    );
    ensure!(
        r["groups"][0]["key"] == json!({"kind": "member", "value": "s1"}) && r["groups"][0]["value"] == json!(2.0),
        "filtered query: {r}"
    );
    let (s, r) = call(
        &c,
        Method::POST,
        format!("{base}/dashboards/dash-1/selection"),
        Some(json!({"filters": [filter]})),
    )
    .await?;
    ensure!(
        s == 200 && r.as_object().map(|o| o.len()) == Some(vizzes.len()),
        "selection: {s} {r}"
    );

    let (s, v) = get("/dashboards/dash-9").await?;
    ensure!(
        s == 404 && error_name(&v) == "UnknownDashboardError",
        "unknown dashboard: {s} {v}"
    );
    let (s, v) = call(
        &c,
        Method::POST,
        format!("{base}/dashboards/dash-1/query"),
        Some(json!({"viz": "nope"})),
    )
    .await?;
    ensure!(s == 404 && error_name(&v) == "UnknownVizError", "unknown viz: {s} {v}");
    let bad = json!({"viz": viz_id, "filters": [{"document": measure_doc, "column": "user_id", "op": "range", "min": 2, "max": 1}]});
    let (s, v) = call(&c, Method::POST, format!("{base}/dashboards/dash-1/query"), Some(bad)).await?;
    ensure!(
        s == 400 && error_name(&v) == "InvalidFilterError",
        "bad filter: {s} {v}"
    );

    // a new upload invalidates the bundle
    let (s, _) = call(&c, Method::POST, format!("{base}/datasets"), Some(reqs[0].clone())).await?;
    ensure!(s == 201, "third upload: {s}");
    let (s, _) = get("/kg/manifest").await?;
    ensure!(s == 404, "manifest after new upload: {s}");
    Ok(())
}

/// The same kind of case as [`random_facts`], but as real inputs: an
/// ontology loaded into a registry, a bundle with one document per record
/// class and a catalog. Returns the oracle's bitmap alongside.
pub fn random_discovery_inputs(
    r: &mut Rng8,
    force_chain: bool,
) -> (VocabularyRegistry, CcsvBundle, Vec<IndicatorDef>, Vec<bool>) {
    let f = if force_chain { chain_of_three() } else { random_facts(r) };
    let expected = brute_force_suitability(&f);
    let mut onto = Graph::new();
    for (c, p) in &f.subclass {
        onto.add(Term::iri(c).unwrap(), ns::RDFS_SUBCLASS_OF, Term::iri(p).unwrap())
            .unwrap();
    }
    for i in 0..10 {
        onto.add(
            Term::iri(class(i)).unwrap(),
            ns::RDF_TYPE,
            Term::iri(ns::OWL_CLASS).unwrap(),
        )
        .unwrap();
    }
    let reg = VocabularyRegistry::load_named(vec![("generated".into(), onto)]).unwrap();
    let docs = f
        .contains_records_of
        .iter()
        .map(|(ds, c)| {
            CcsvDocument::new(
                ds,
                c,
                vec!["id".into()],
                vec![ColumnBinding::identifier(1, "id", c.as_str())],
                vec![vec!["x".into()]],
                None,
                &Graph::new(),
            )
            .unwrap()
        })
        .collect();
    let bundle = CcsvBundle {
        documents: docs,
        shared_metadata: Graph::new(),
    };
    (reg, bundle, f.indicators, expected)
}
