//! Instances, allocations and utility vectors.
//!
//! Agents are numbered `1..=n`; the lower index is the tie-breaking priority
//! everywhere unless an operation says otherwise. Items are numbered `0..m`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::itemset::ItemSet;
use crate::valuations::ValuationSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(u32);

impl AgentId {
    /// Agent with the given 1-based index.
    pub fn new(index: usize) -> Self {
        assert!(index >= 1, "agent indices start at 1");
        Self(index as u32)
    }

    /// Agent stored at 0-based position `pos` of a bundle list.
    pub fn from_position(pos: usize) -> Self {
        Self(pos as u32 + 1)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn position(self) -> usize {
        self.0 as usize - 1
    }

    pub fn all(n: usize) -> impl DoubleEndedIterator<Item = AgentId> + Clone {
        (1..=n).map(AgentId::new)
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ItemId(u32);

impl ItemId {
    pub fn new(index: usize) -> Self {
        Self(index as u32)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn all(m: usize) -> impl DoubleEndedIterator<Item = ItemId> + Clone {
        (0..m).map(ItemId::new)
    }
}

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "o{}", self.0)
    }
}

/// A fair division problem: `n` agents, `m` items, the good value `c`, and
/// one valuation per agent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    c: i64,
    num_items: usize,
    valuations: Vec<ValuationSpec>,
}

impl Instance {
    /// Builds an instance after structural validation of every valuation.
    ///
    /// Semantic checks (submodularity, order-neutrality) are separate; see
    /// [`crate::valuations::validate_all`].
    pub fn new(c: i64, num_items: usize, valuations: Vec<ValuationSpec>) -> Result<Self> {
        if valuations.is_empty() {
            return Err(Error::InvalidInstance("at least one agent is required".into()));
        }
        if c < 1 {
            return Err(Error::InvalidInstance(format!("c must be a positive integer, got {c}")));
        }
        for (pos, spec) in valuations.iter().enumerate() {
            spec.check_structure(num_items, c)
                .map_err(|reason| Error::MalformedValuation { agent: Some(AgentId::from_position(pos)), reason })?;
        }
        Ok(Self { c, num_items, valuations })
    }

    pub fn c(&self) -> i64 {
        self.c
    }

    pub fn num_agents(&self) -> usize {
        self.valuations.len()
    }

    pub fn num_items(&self) -> usize {
        self.num_items
    }

    pub fn agents(&self) -> impl DoubleEndedIterator<Item = AgentId> + Clone {
        AgentId::all(self.num_agents())
    }

    pub fn items(&self) -> ItemSet {
        ItemSet::full(self.num_items)
    }

    pub fn valuation(&self, agent: AgentId) -> &ValuationSpec {
        &self.valuations[agent.position()]
    }

    pub fn valuations(&self) -> &[ValuationSpec] {
        &self.valuations
    }

    pub fn value(&self, agent: AgentId, bundle: &ItemSet) -> i64 {
        self.valuation(agent).value(bundle)
    }
}

/// An `(n+1)`-way partition of the items: one bundle per agent plus the
/// unallocated pool.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Allocation {
    bundles: Vec<ItemSet>,
    unallocated: ItemSet,
    // owner[o] == 0 means unallocated, otherwise the 1-based agent index.
    owner: Vec<u32>,
}

impl Allocation {
    /// Every item unallocated.
    pub fn empty(num_agents: usize, num_items: usize) -> Self {
        Self {
            bundles: vec![ItemSet::new(); num_agents],
            unallocated: ItemSet::full(num_items),
            owner: vec![0; num_items],
        }
    }

    /// Builds an allocation from agent bundles; items not named in any bundle
    /// are unallocated.
    pub fn from_bundles(bundles: Vec<ItemSet>, num_items: usize) -> Result<Self> {
        let mut alloc = Self::empty(bundles.len(), num_items);
        for (pos, bundle) in bundles.into_iter().enumerate() {
            for item in &bundle {
                if item.index() >= num_items {
                    return Err(Error::Contract(format!("item {item} out of range (m = {num_items})")));
                }
                if let Some(other) = alloc.owner_of(item) {
                    return Err(Error::Contract(format!("item {item} given to agents {other} and {}", pos + 1)));
                }
                alloc.assign(item, Some(AgentId::from_position(pos)));
            }
        }
        Ok(alloc)
    }

    pub fn num_agents(&self) -> usize {
        self.bundles.len()
    }

    pub fn num_items(&self) -> usize {
        self.owner.len()
    }

    pub fn bundle(&self, agent: AgentId) -> &ItemSet {
        &self.bundles[agent.position()]
    }

    pub fn bundles(&self) -> &[ItemSet] {
        &self.bundles
    }

    /// `X_0`.
    pub fn unallocated(&self) -> &ItemSet {
        &self.unallocated
    }

    /// Bundle of `holder`, where `None` is the unallocated pool.
    pub fn holding(&self, holder: Option<AgentId>) -> &ItemSet {
        match holder {
            Some(a) => self.bundle(a),
            None => &self.unallocated,
        }
    }

    pub fn owner_of(&self, item: ItemId) -> Option<AgentId> {
        match self.owner[item.index()] {
            0 => None,
            k => Some(AgentId(k)),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.unallocated.is_empty()
    }

    /// Moves `item` to `holder` (`None` = unallocated).
    pub fn assign(&mut self, item: ItemId, holder: Option<AgentId>) {
        match self.owner_of(item) {
            Some(a) => self.bundles[a.position()].remove(item),
            None => self.unallocated.remove(item),
        };
        match holder {
            Some(a) => {
                self.bundles[a.position()].insert(item);
                self.owner[item.index()] = a.0;
            }
            None => {
                self.unallocated.insert(item);
                self.owner[item.index()] = 0;
            }
        }
        debug_assert!(self.check_partition().is_ok());
    }

    /// Per-agent union `X_h ∪ Y_h`. Items held by no agent in either stay unallocated.
    pub fn union(&self, other: &Allocation) -> Result<Allocation> {
        if self.num_agents() != other.num_agents() || self.num_items() != other.num_items() {
            return Err(Error::Contract("allocation shapes differ".into()));
        }
        let bundles = self.bundles.iter().zip(&other.bundles).map(|(a, b)| a.union(b)).collect();
        Allocation::from_bundles(bundles, self.num_items())
    }

    pub fn total_allocated(&self) -> usize {
        self.bundles.iter().map(ItemSet::len).sum()
    }

    /// Checks the disjoint-cover invariant.
    pub fn check_partition(&self) -> Result<()> {
        let m = self.num_items();
        let mut seen = self.unallocated.clone();
        for (pos, b) in self.bundles.iter().enumerate() {
            if !seen.is_disjoint(b) {
                return Err(Error::Invariant(format!("bundle of agent {} overlaps another bundle", pos + 1)));
            }
            seen = seen.union(b);
        }
        if seen != ItemSet::full(m) {
            return Err(Error::Invariant("bundles do not cover exactly the item set".into()));
        }
        Ok(())
    }
}

impl fmt::Debug for Allocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Allocation")
            .field("bundles", &self.bundles)
            .field("unallocated", &self.unallocated)
            .finish()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AllocationDoc {
    bundles: Vec<ItemSet>,
    unallocated: ItemSet,
}

impl Serialize for Allocation {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        AllocationDoc { bundles: self.bundles.clone(), unallocated: self.unallocated.clone() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Allocation {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let doc = AllocationDoc::deserialize(deserializer)?;
        let m = doc.bundles.iter().map(ItemSet::len).sum::<usize>() + doc.unallocated.len();
        let alloc = Allocation::from_bundles(doc.bundles, m).map_err(D::Error::custom)?;
        if alloc.unallocated != doc.unallocated {
            return Err(D::Error::custom("bundles and unallocated do not partition 0..m"));
        }
        Ok(alloc)
    }
}

/// `(v_1(X_1), .., v_n(X_n))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UtilityVector(pub Vec<i64>);

/// A utility vector in ascending order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SortedUtilityVector(Vec<i64>);

impl UtilityVector {
    pub fn sorted(&self) -> SortedUtilityVector {
        let mut v = self.0.clone();
        v.sort_unstable();
        SortedUtilityVector(v)
    }

    pub fn sum(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn min(&self) -> Option<i64> {
        self.0.iter().copied().min()
    }

    pub fn get(&self, agent: AgentId) -> i64 {
        self.0[agent.position()]
    }
}

impl SortedUtilityVector {
    pub fn from_unsorted(mut values: Vec<i64>) -> Self {
        values.sort_unstable();
        Self(values)
    }

    pub fn values(&self) -> &[i64] {
        &self.0
    }
}

/// Lexicographic comparison of two equal-length vectors.
pub fn lex_compare(a: &[i64], b: &[i64]) -> Result<Ordering> {
    if a.len() != b.len() {
        return Err(Error::Contract(format!("length mismatch: {} vs {}", a.len(), b.len())));
    }
    Ok(a.cmp(b))
}

/// True iff `a` is weakly better everywhere and strictly better somewhere.
pub fn pareto_dominates(a: &[i64], b: &[i64]) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::Contract(format!("length mismatch: {} vs {}", a.len(), b.len())));
    }
    Ok(a.iter().zip(b).all(|(x, y)| x >= y) && a.iter().zip(b).any(|(x, y)| x > y))
}

pub fn utility_vector(inst: &Instance, alloc: &Allocation) -> UtilityVector {
    UtilityVector(inst.agents().map(|a| inst.value(a, alloc.bundle(a))).collect())
}
