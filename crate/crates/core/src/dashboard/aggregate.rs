use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{document, position, validate_viz, DashboardError, DashboardSpec, VizSpec};
use crate::ccsv::{CcsvBundle, CcsvDocument};
use crate::vocab::AggregateFunction;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum FilterOp {
    Eq {
        value: String,
    },
    In {
        values: Vec<String>,
    },
    /// Inclusive numeric bounds.
    Range {
        min: f64,
        max: f64,
    },
}

/// Keeps rows whose cell in `document`.`column` satisfies `op`. A
/// multi-valued cell passes when any of its values does.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterExpr {
    pub document: String,
    pub column: String,
    #[serde(flatten)]
    pub op: FilterOp,
}

impl FilterExpr {
    pub fn eq(document: &str, column: &str, value: &str) -> Self {
        FilterExpr {
            document: document.into(),
            column: column.into(),
            op: FilterOp::Eq { value: value.into() },
        }
    }

    pub fn validate(&self) -> Result<(), DashboardError> {
        if let FilterOp::Range { min, max } = self.op {
            if !min.is_finite() || !max.is_finite() || min > max {
                return Err(DashboardError::InvalidFilter(format!(
                    "range on {}.{} needs finite bounds with min <= max, got [{min}, {max}]",
                    self.document, self.column
                )));
            }
        }
        Ok(())
    }

    fn matches(&self, value: &str) -> bool {
        match &self.op {
            FilterOp::Eq { value: v } => v == value,
            FilterOp::In { values } => values.iter().any(|v| v == value),
            FilterOp::Range { min, max } => parse_number(value).is_some_and(|x| *min <= x && x <= *max),
        }
    }
}

/// Decimal numbers with optional sign and exponent; nothing else.
pub fn parse_number(text: &str) -> Option<f64> {
    let b = text.as_bytes();
    let mut i = 0;
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    let int_start = i;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    let mut digits = i - int_start;
    if i < b.len() && b[i] == b'.' {
        i += 1;
        let frac_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        digits += i - frac_start;
    }
    if digits == 0 {
        return None;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        i += 1;
        if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
            i += 1;
        }
        let exp_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        if i == exp_start {
            return None;
        }
    }
    if i != b.len() {
        return None;
    }
    text.parse().ok()
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum GroupKey {
    /// The single group of a chart without dimension.
    Total,
    Member(String),
    /// Rows whose join cell is empty.
    Unlinked,
}

pub const UNLINKED_LABEL: &str = "(unlinked)";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Group {
    pub key: GroupKey,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateResult {
    pub viz: String,
    pub function: AggregateFunction,
    pub groups: Vec<Group>,
    pub total_rows_considered: usize,
}

/// Row predicate over the measure document.
enum RowTest<'a> {
    /// Column of the measure document itself.
    Local { pos: usize, filter: &'a FilterExpr },
    /// Reference column whose targets must include one of `ids`.
    Linked { pos: usize, ids: BTreeSet<String> },
}

fn matching_ids(doc: &CcsvDocument, f: &FilterExpr) -> Result<BTreeSet<String>, DashboardError> {
    let pos = position(doc, &f.column)?;
    let id = doc.identifier_position();
    Ok((0..doc.rows.len())
        .filter(|&r| doc.cell_values(r, pos).iter().any(|v| f.matches(v)))
        .map(|r| doc.rows[r][id].clone())
        .collect())
}

fn compile<'a>(
    bundle: &CcsvBundle,
    viz: &VizSpec,
    mdoc: &CcsvDocument,
    f: &'a FilterExpr,
) -> Result<RowTest<'a>, DashboardError> {
    f.validate()?;
    if f.document == mdoc.name() {
        return Ok(RowTest::Local {
            pos: position(mdoc, &f.column)?,
            filter: f,
        });
    }
    let target = document(bundle, &f.document)?;
    let via_dimension = match (&viz.dimension_binding, &viz.join_path) {
        (Some(d), Some(j)) if d.document == f.document => Some(j.measure_column.as_str()),
        _ => None,
    };
    let link = match via_dimension {
        Some(col) => col.to_string(),
        None => {
            let links: Vec<&str> = mdoc
                .bindings
                .iter()
                .filter(|b| b.referenced_class() == Some(target.records_class.as_str()))
                .map(|b| b.name.as_str())
                .collect();
            match links.as_slice() {
                [one] => one.to_string(),
                [] => {
                    return Err(DashboardError::InvalidFilter(format!(
                        "`{}` has no column referencing `{}`",
                        mdoc.name(),
                        f.document
                    )))
                }
                many => {
                    return Err(DashboardError::InvalidFilter(format!(
                        "`{}` references `{}` through several columns ({}); filter on one of them instead",
                        mdoc.name(),
                        f.document,
                        many.join(", ")
                    )))
                }
            }
        }
    };
    Ok(RowTest::Linked {
        pos: position(mdoc, &link)?,
        ids: matching_ids(target, f)?,
    })
}

#[derive(Default)]
struct Acc {
    non_empty: usize,
    n: usize,
    sum: f64,
    // Neumaier compensation term
    comp: f64,
    min: f64,
    max: f64,
}

impl Acc {
    fn push(&mut self, x: f64) {
        if self.n == 0 {
            self.min = x;
            self.max = x;
        } else {
            self.min = self.min.min(x);
            self.max = self.max.max(x);
        }
        self.n += 1;
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self, f: AggregateFunction) -> Option<f64> {
        match f {
            AggregateFunction::Count => Some(self.non_empty as f64),
            AggregateFunction::Sum => Some(self.sum + self.comp),
            _ if self.n == 0 => None,
            AggregateFunction::Avg => Some((self.sum + self.comp) / self.n as f64),
            AggregateFunction::Min => Some(self.min),
            AggregateFunction::Max => Some(self.max),
        }
    }
}

/// Group-by over the measure document's rows that pass every filter.
///
/// Groups without rows are omitted, except the `Total` group of a count or
/// sum, which is always reported. Groups whose avg/min/max has no values are
/// omitted too.
pub fn aggregate(
    bundle: &CcsvBundle,
    viz: &VizSpec,
    filters: &[FilterExpr],
) -> Result<AggregateResult, DashboardError> {
    validate_viz(viz, bundle)?;
    let m = &viz.measure_binding;
    let mdoc = document(bundle, &m.document)?;
    let mpos = position(mdoc, &m.column)?;
    let tests: Vec<RowTest> = filters
        .iter()
        .map(|f| compile(bundle, viz, mdoc, f))
        .collect::<Result<_, _>>()?;

    // Group key column in the measure document, plus labels by key.
    let mut labels: BTreeMap<String, String> = BTreeMap::new();
    let key_pos = match &viz.dimension_binding {
        None => None,
        Some(d) => {
            let ddoc = document(bundle, &d.document)?;
            let dpos = position(ddoc, &d.column)?;
            if let Some(l) = &d.label_column {
                let lpos = position(ddoc, l)?;
                for r in 0..ddoc.rows.len() {
                    if let (Some(k), Some(label)) = (
                        ddoc.cell_values(r, dpos).into_iter().next(),
                        ddoc.cell_values(r, lpos).into_iter().next(),
                    ) {
                        labels.entry(k).or_insert(label);
                    }
                }
            }
            match &viz.join_path {
                Some(j) => Some(position(mdoc, &j.measure_column)?),
                None => Some(dpos),
            }
        }
    };

    let mut groups: BTreeMap<GroupKey, Acc> = BTreeMap::new();
    let mut considered = 0;
    for r in 0..mdoc.rows.len() {
        let pass = tests.iter().all(|t| match t {
            RowTest::Local { pos, filter } => mdoc.cell_values(r, *pos).iter().any(|v| filter.matches(v)),
            RowTest::Linked { pos, ids } => mdoc.cell_values(r, *pos).iter().any(|v| ids.contains(v)),
        });
        if !pass {
            continue;
        }
        considered += 1;
        let keys: BTreeSet<GroupKey> = match key_pos {
            None => [GroupKey::Total].into(),
            Some(k) => {
                let vals = mdoc.cell_values(r, k);
                if vals.is_empty() {
                    [GroupKey::Unlinked].into()
                } else {
                    vals.into_iter().map(GroupKey::Member).collect()
                }
            }
        };
        let values = mdoc.cell_values(r, mpos);
        let mut numbers = Vec::new();
        if m.function != AggregateFunction::Count {
            for v in &values {
                numbers.push(parse_number(v).ok_or_else(|| DashboardError::NonNumericCell {
                    document: mdoc.name().to_string(),
                    column: m.column.clone(),
                    row: r + 1,
                    value: v.clone(),
                })?);
            }
        }
        for key in keys {
            let acc = groups.entry(key).or_default();
            if !values.is_empty() {
                acc.non_empty += 1;
            }
            for &x in &numbers {
                acc.push(x);
            }
        }
    }
    if key_pos.is_none() {
        groups.entry(GroupKey::Total).or_default();
    }
    let out = groups
        .into_iter()
        .filter_map(|(key, acc)| {
            let value = acc.value(m.function)?;
            let label = match &key {
                GroupKey::Member(k) => labels.get(k).cloned(),
                GroupKey::Unlinked => Some(UNLINKED_LABEL.to_string()),
                GroupKey::Total => None,
            };
            Some(Group { key, label, value })
        })
        .collect();
    Ok(AggregateResult {
        viz: viz.id.clone(),
        function: m.function,
        groups: out,
        total_rows_considered: considered,
    })
}

/// Recomputes every visualization under the same selection.
pub fn apply_selection(
    bundle: &CcsvBundle,
    spec: &DashboardSpec,
    selection: &[FilterExpr],
) -> Result<BTreeMap<String, AggregateResult>, DashboardError> {
    spec.visualizations
        .iter()
        .map(|v| Ok((v.id.clone(), aggregate(bundle, v, selection)?)))
        .collect()
}
