//! Valuation families, the value oracle, sorted telescoping vectors, and the
//! validators for submodularity, order-neutrality and marginal range.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::itemset::ItemSet;
use crate::model::ItemId;

/// Largest item count for which full value tables are built.
pub const MAX_TABLE_ITEMS: usize = 20;

/// One group of a [`CappedGroups`] valuation: the first `cap` items taken
/// from the group are worth `hi` each, every further one `lo`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Group {
    pub items: ItemSet,
    pub cap: u32,
    pub hi: i64,
    pub lo: i64,
}

/// Sum of concave functions of per-group cardinalities. Ungrouped items
/// are worth `default` each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CappedGroups {
    groups: Vec<Group>,
    default: i64,
    group_of: HashMap<ItemId, usize>,
}

impl CappedGroups {
    pub fn new(groups: Vec<Group>, default: i64) -> Self {
        let mut group_of = HashMap::new();
        for (g, group) in groups.iter().enumerate() {
            for item in &group.items {
                group_of.entry(item).or_insert(g);
            }
        }
        Self { groups, default, group_of }
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn default_value(&self) -> i64 {
        self.default
    }

    fn value(&self, set: &ItemSet) -> i64 {
        let mut counts = vec![0u32; self.groups.len()];
        let mut loose = 0i64;
        for item in set {
            match self.group_of.get(&item) {
                Some(&g) => counts[g] += 1,
                None => loose += 1,
            }
        }
        let grouped: i64 = self
            .groups
            .iter()
            .zip(&counts)
            .map(|(g, &k)| g.hi * i64::from(k.min(g.cap)) + g.lo * i64::from(k.saturating_sub(g.cap)))
            .sum();
        grouped + self.default * loose
    }

    fn marginal_given(&self, counts: &[u32], item: ItemId) -> i64 {
        match self.group_of.get(&item) {
            Some(&g) if counts[g] < self.groups[g].cap => self.groups[g].hi,
            Some(&g) => self.groups[g].lo,
            None => self.default,
        }
    }
}

/// Complete value table over all `2^m` subsets, indexed by bitmask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitTable {
    num_items: usize,
    values: Vec<i64>,
}

impl ExplicitTable {
    pub fn new(num_items: usize, values: Vec<i64>) -> Result<Self> {
        if num_items > MAX_TABLE_ITEMS {
            return Err(Error::MalformedValuation {
                agent: None,
                reason: format!("explicit tables support at most {MAX_TABLE_ITEMS} items, got {num_items}"),
            });
        }
        if values.len() != 1 << num_items {
            return Err(Error::MalformedValuation {
                agent: None,
                reason: format!("table over {num_items} items needs {} entries, got {}", 1usize << num_items, values.len()),
            });
        }
        Ok(Self { num_items, values })
    }

    /// Tabulates any set function over `num_items` items.
    pub fn from_fn(num_items: usize, f: impl Fn(&ItemSet) -> i64) -> Result<Self> {
        if num_items > MAX_TABLE_ITEMS {
            return Err(Error::Contract(format!("cannot tabulate {num_items} items")));
        }
        let values = (0..1u64 << num_items).map(|mask| f(&ItemSet::from_mask(mask))).collect();
        Self::new(num_items, values)
    }

    pub fn num_items(&self) -> usize {
        self.num_items
    }

    pub fn at(&self, mask: u64) -> i64 {
        self.values[mask as usize]
    }

    fn marginal_mask(&self, mask: u64, item: usize) -> i64 {
        self.values[(mask | 1 << item) as usize] - self.values[mask as usize]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SpecDoc", into = "SpecDoc")]
pub enum ValuationSpec {
    /// Per-item values, each in `{-1, 0, c}`.
    Additive(Vec<i64>),
    CappedGroups(CappedGroups),
    Explicit(ExplicitTable),
    /// Per-item arbitrary integers. Usable by the brute-force oracles only.
    GeneralAdditive(Vec<i64>),
}

impl ValuationSpec {
    pub fn capped_groups(groups: Vec<Group>, default: i64) -> Self {
        ValuationSpec::CappedGroups(CappedGroups::new(groups, default))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ValuationSpec::Additive(_) => "additive",
            ValuationSpec::CappedGroups(_) => "capped_groups",
            ValuationSpec::Explicit(_) => "explicit",
            ValuationSpec::GeneralAdditive(_) => "general_additive",
        }
    }

    /// Exact value `v(S)`.
    pub fn value(&self, set: &ItemSet) -> i64 {
        match self {
            ValuationSpec::Additive(v) | ValuationSpec::GeneralAdditive(v) => set.iter().map(|o| v[o.index()]).sum(),
            ValuationSpec::CappedGroups(g) => g.value(set),
            ValuationSpec::Explicit(t) => t.at(set.to_mask()),
        }
    }

    /// `v(S + o) - v(S)`.
    pub fn marginal(&self, set: &ItemSet, item: ItemId) -> Result<i64> {
        if set.contains(item) {
            return Err(Error::Contract(format!("marginal of {item} which is already in the set")));
        }
        Ok(match self {
            ValuationSpec::Additive(v) | ValuationSpec::GeneralAdditive(v) => v[item.index()],
            ValuationSpec::Explicit(t) => t.marginal_mask(set.to_mask(), item.index()),
            ValuationSpec::CappedGroups(_) => self.value(&set.with(item)) - self.value(set),
        })
    }

    /// Marginal gains of adding `order` one item at a time, in insertion
    /// order (unsorted). The caller guarantees the items are distinct.
    pub fn marginals_in_order(&self, order: impl IntoIterator<Item = ItemId>) -> Vec<i64> {
        match self {
            ValuationSpec::Additive(v) | ValuationSpec::GeneralAdditive(v) => order.into_iter().map(|o| v[o.index()]).collect(),
            ValuationSpec::CappedGroups(g) => {
                let mut counts = vec![0u32; g.groups.len()];
                order
                    .into_iter()
                    .map(|o| {
                        let d = g.marginal_given(&counts, o);
                        if let Some(&k) = g.group_of.get(&o) {
                            counts[k] += 1;
                        }
                        d
                    })
                    .collect()
            }
            ValuationSpec::Explicit(t) => {
                let mut mask = 0u64;
                order
                    .into_iter()
                    .map(|o| {
                        let d = t.marginal_mask(mask, o.index());
                        mask |= 1 << o.index();
                        d
                    })
                    .collect()
            }
        }
    }

    /// Structural checks that do not need the full table semantics.
    pub(crate) fn check_structure(&self, num_items: usize, c: i64) -> std::result::Result<(), String> {
        let in_range = |x: i64| x == -1 || x == 0 || x == c;
        match self {
            ValuationSpec::Additive(v) => {
                if v.len() != num_items {
                    return Err(format!("expected {num_items} values, got {}", v.len()));
                }
                if let Some((item, x)) = v.iter().enumerate().find(|(_, &x)| !in_range(x)) {
                    return Err(format!("value {x} of item {item} is outside {{-1, 0, {c}}}"));
                }
            }
            ValuationSpec::GeneralAdditive(v) => {
                if v.len() != num_items {
                    return Err(format!("expected {num_items} values, got {}", v.len()));
                }
            }
            ValuationSpec::CappedGroups(g) => {
                let mut seen = ItemSet::new();
                for (k, group) in g.groups.iter().enumerate() {
                    if group.items.upper_bound() > num_items {
                        return Err(format!("group {k} references an item beyond {num_items}"));
                    }
                    if !seen.is_disjoint(&group.items) {
                        return Err(format!("group {k} overlaps an earlier group"));
                    }
                    seen = seen.union(&group.items);
                    if !in_range(group.hi) {
                        return Err(format!("group {k}: hi = {} is outside {{-1, 0, {c}}}", group.hi));
                    }
                    if group.lo != 0 && group.lo != -1 {
                        return Err(format!("group {k}: lo = {} is outside {{-1, 0}}", group.lo));
                    }
                    if group.lo > group.hi {
                        return Err(format!("group {k}: lo = {} exceeds hi = {}", group.lo, group.hi));
                    }
                }
                if !in_range(g.default) {
                    return Err(format!("default = {} is outside {{-1, 0, {c}}}", g.default));
                }
            }
            ValuationSpec::Explicit(t) => {
                if t.num_items != num_items {
                    return Err(format!("table covers {} items, instance has {num_items}", t.num_items));
                }
            }
        }
        Ok(())
    }

    /// Tabulates this valuation over `num_items` items.
    pub fn materialize(&self, num_items: usize) -> Result<ExplicitTable> {
        match self {
            ValuationSpec::Explicit(t) => Ok(t.clone()),
            _ => ExplicitTable::from_fn(num_items, |s| self.value(s)),
        }
    }
}

/// Ascending marginal gains along one insertion order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TelescopingVector(pub Vec<i64>);

impl TelescopingVector {
    pub fn sum(&self) -> i64 {
        self.0.iter().sum()
    }
}

/// Sorted telescoping vector of `set` under the insertion order `order`.
pub fn telescoping_vector(spec: &ValuationSpec, set: &ItemSet, order: &[ItemId]) -> Result<TelescopingVector> {
    let as_set: ItemSet = order.iter().copied().collect();
    if as_set.len() != order.len() || &as_set != set {
        return Err(Error::Contract("order is not a permutation of the set".into()));
    }
    let mut marginals = spec.marginals_in_order(order.iter().copied());
    marginals.sort_unstable();
    Ok(TelescopingVector(marginals))
}

/// Why an explicit table is not a `{-1, 0, c}` order-neutral submodular function.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "failure", rename_all = "snake_case")]
pub enum ValidationFailure {
    NonZeroEmpty { value: i64 },
    /// `Δ(S, o) < Δ(T, o)` with `S ⊆ T`.
    NotSubmodular { smaller: ItemSet, larger: ItemSet, item: ItemId, smaller_delta: i64, larger_delta: i64 },
    NotOrderNeutral { witness: ItemSet, first: Vec<i64>, second: Vec<i64> },
    OutOfRange { set: ItemSet, item: ItemId, delta: i64 },
}

impl fmt::Display for ValidationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationFailure::NonZeroEmpty { value } => write!(f, "v(∅) = {value}, expected 0"),
            ValidationFailure::NotSubmodular { smaller, larger, item, smaller_delta, larger_delta } => write!(
                f,
                "Δ({smaller}, {item}) = {smaller_delta} < Δ({larger}, {item}) = {larger_delta}"
            ),
            ValidationFailure::NotOrderNeutral { witness, first, second } => {
                write!(f, "{witness} has sorted telescoping vectors {first:?} and {second:?}")
            }
            ValidationFailure::OutOfRange { set, item, delta } => write!(f, "Δ({set}, {item}) = {delta} is out of range"),
        }
    }
}

fn mask_set(mask: u64) -> ItemSet {
    ItemSet::from_mask(mask)
}

/// Checks `v(∅) = 0` and the pairwise diminishing-returns condition
/// `Δ(S, o) ≥ Δ(S + o', o)`, which implies the general one.
pub fn validate_submodular(table: &ExplicitTable) -> std::result::Result<(), ValidationFailure> {
    if table.at(0) != 0 {
        return Err(ValidationFailure::NonZeroEmpty { value: table.at(0) });
    }
    let m = table.num_items;
    for mask in 0..1u64 << m {
        for o in (0..m).filter(|&o| mask & 1 << o == 0) {
            let d = table.marginal_mask(mask, o);
            for other in (0..m).filter(|&p| p != o && mask & 1 << p == 0) {
                let bigger = mask | 1 << other;
                let d2 = table.marginal_mask(bigger, o);
                if d < d2 {
                    return Err(ValidationFailure::NotSubmodular {
                        smaller: mask_set(mask),
                        larger: mask_set(bigger),
                        item: ItemId::new(o),
                        smaller_delta: d,
                        larger_delta: d2,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Checks that every set has a single achievable sorted telescoping vector.
///
/// Dynamic program over subsets in order of cardinality; only the previous
/// layer is kept, and the scan stops at the first set with two vectors.
pub fn validate_order_neutral(table: &ExplicitTable) -> std::result::Result<(), ValidationFailure> {
    let m = table.num_items;
    let mut prev: HashMap<u64, Vec<i64>> = HashMap::from([(0, Vec::new())]);
    for size in 1..=m {
        let mut layer = HashMap::new();
        for mask in masks_of_size(m, size) {
            let mut found: Option<Vec<i64>> = None;
            for o in (0..m).filter(|&o| mask & 1 << o != 0) {
                let rest = mask & !(1 << o);
                let mut v = prev[&rest].clone();
                let d = table.marginal_mask(rest, o);
                let at = v.partition_point(|&x| x < d);
                v.insert(at, d);
                match &found {
                    None => found = Some(v),
                    Some(f) if *f != v => {
                        return Err(ValidationFailure::NotOrderNeutral {
                            witness: mask_set(mask),
                            first: f.clone(),
                            second: v,
                        })
                    }
                    Some(_) => {}
                }
            }
            layer.insert(mask, found.expect("non-empty set has a member"));
        }
        prev = layer;
    }
    Ok(())
}

/// Checks every marginal lies in `{-1, 0, c}`.
pub fn validate_range(table: &ExplicitTable, c: i64) -> std::result::Result<(), ValidationFailure> {
    let m = table.num_items;
    for mask in 0..1u64 << m {
        for o in (0..m).filter(|&o| mask & 1 << o == 0) {
            let d = table.marginal_mask(mask, o);
            if d != -1 && d != 0 && d != c {
                return Err(ValidationFailure::OutOfRange { set: mask_set(mask), item: ItemId::new(o), delta: d });
            }
        }
    }
    Ok(())
}

/// Runs all three validators on the tabulated valuation.
pub fn validate_all(spec: &ValuationSpec, num_items: usize, c: i64) -> Result<std::result::Result<(), ValidationFailure>> {
    let table = spec.materialize(num_items)?;
    Ok(validate_submodular(&table).and_then(|_| validate_order_neutral(&table)).and_then(|_| validate_range(&table, c)))
}

/// All `size`-element subsets of `0..m` as masks, ascending (Gosper's hack).
fn masks_of_size(m: usize, size: usize) -> impl Iterator<Item = u64> {
    let limit = 1u64 << m;
    let mut next = if size == 0 { 0 } else { (1u64 << size) - 1 };
    let mut done = size > m;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let cur = next;
        if cur == 0 {
            done = true;
        } else {
            let low = cur & cur.wrapping_neg();
            let ripple = cur + low;
            next = (((ripple ^ cur) >> 2) / low) | ripple;
            if next >= limit {
                done = true;
            }
        }
        Some(cur)
    })
}

// JSON document form.

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum SpecDoc {
    Additive { values: Vec<i64> },
    CappedGroups { groups: Vec<Group>, default: i64 },
    Explicit { table: BTreeMap<String, i64> },
    GeneralAdditive { values: Vec<i64> },
}

impl From<ValuationSpec> for SpecDoc {
    fn from(spec: ValuationSpec) -> Self {
        match spec {
            ValuationSpec::Additive(values) => SpecDoc::Additive { values },
            ValuationSpec::GeneralAdditive(values) => SpecDoc::GeneralAdditive { values },
            ValuationSpec::CappedGroups(g) => SpecDoc::CappedGroups { groups: g.groups, default: g.default },
            ValuationSpec::Explicit(t) => SpecDoc::Explicit {
                table: (0..1u64 << t.num_items).map(|mask| (table_key(mask), t.at(mask))).collect(),
            },
        }
    }
}

fn table_key(mask: u64) -> String {
    mask_set(mask).iter().map(|o| o.index().to_string()).collect::<Vec<_>>().join(",")
}

fn parse_table_key(key: &str) -> std::result::Result<u64, String> {
    if key.is_empty() {
        return Ok(0);
    }
    let mut mask = 0u64;
    let mut last: Option<usize> = None;
    for part in key.split(',') {
        let item: usize = part.trim().parse().map_err(|_| format!("bad table key {key:?}"))?;
        if item >= MAX_TABLE_ITEMS {
            return Err(format!("table key {key:?} names item {item} beyond the table limit"));
        }
        if last.is_some_and(|l| l >= item) {
            return Err(format!("table key {key:?} is not a strictly ascending item list"));
        }
        last = Some(item);
        mask |= 1 << item;
    }
    Ok(mask)
}

impl TryFrom<SpecDoc> for ValuationSpec {
    type Error = String;

    fn try_from(doc: SpecDoc) -> std::result::Result<Self, String> {
        Ok(match doc {
            SpecDoc::Additive { values } => ValuationSpec::Additive(values),
            SpecDoc::GeneralAdditive { values } => ValuationSpec::GeneralAdditive(values),
            SpecDoc::CappedGroups { groups, default } => ValuationSpec::capped_groups(groups, default),
            SpecDoc::Explicit { table } => {
                let mut entries = BTreeMap::new();
                for (key, value) in table {
                    entries.insert(parse_table_key(&key)?, value);
                }
                let span = entries.keys().fold(0u64, |acc, k| acc | k);
                let m = 64 - span.leading_zeros() as usize;
                let mut values = Vec::with_capacity(1 << m);
                for mask in 0..1u64 << m {
                    match entries.get(&mask) {
                        Some(&v) => values.push(v),
                        None => return Err(format!("explicit table is missing the entry for {{{}}}", table_key(mask))),
                    }
                }
                if entries.len() != values.len() {
                    return Err("explicit table has duplicate keys".into());
                }
                ValuationSpec::Explicit(ExplicitTable::new(m, values).map_err(|e| e.to_string())?)
            }
        })
    }
}
