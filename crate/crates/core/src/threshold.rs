//! Threshold functions `β^τ` and the clean/supplementary and three-way
//! decompositions built on them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::itemset::ItemSet;
use crate::model::{AgentId, Allocation, Instance, ItemId};
use crate::valuations::{ExplicitTable, ValuationSpec};

/// A set function whose marginals are claimed to be 0 or 1.
pub trait BinaryOracle {
    fn eval(&self, set: &ItemSet) -> i64;

    fn marginal(&self, set: &ItemSet, item: ItemId) -> i64 {
        self.eval(&set.with(item)) - self.eval(set)
    }
}

impl<T: BinaryOracle + ?Sized> BinaryOracle for &T {
    fn eval(&self, set: &ItemSet) -> i64 {
        (**self).eval(set)
    }
}

impl BinaryOracle for ExplicitTable {
    fn eval(&self, set: &ItemSet) -> i64 {
        self.at(set.to_mask())
    }
}

/// Number of entries `≥ τ` in the sorted telescoping vector of a bundle.
#[derive(Clone, Copy, Debug)]
pub struct ThresholdFunction<'a> {
    pub spec: &'a ValuationSpec,
    pub tau: i64,
}

impl<'a> ThresholdFunction<'a> {
    pub fn new(spec: &'a ValuationSpec, tau: i64) -> Self {
        Self { spec, tau }
    }

    /// `β^τ_i` for every agent of the instance.
    pub fn for_instance(inst: &'a Instance, tau: i64) -> Vec<Self> {
        inst.valuations().iter().map(|v| Self::new(v, tau)).collect()
    }
}

impl BinaryOracle for ThresholdFunction<'_> {
    fn eval(&self, set: &ItemSet) -> i64 {
        beta(self.spec, self.tau, set) as i64
    }
}

/// `β^τ(S)`, computed along the ascending item order with `|S|` value queries.
pub fn beta(spec: &ValuationSpec, tau: i64, set: &ItemSet) -> usize {
    spec.marginals_in_order(set.iter()).into_iter().filter(|&d| d >= tau).count()
}

/// `β^τ(S + o) - β^τ(S)`.
pub fn beta_marginal(spec: &ValuationSpec, tau: i64, set: &ItemSet, item: ItemId) -> Result<i64> {
    if set.contains(item) {
        return Err(Error::Contract(format!("{item} is already in the set")));
    }
    Ok(beta(spec, tau, &set.with(item)) as i64 - beta(spec, tau, set) as i64)
}

/// Splits every bundle into the items whose running marginal (ascending
/// insertion order) reaches `tau` and the rest.
pub fn decompose_threshold(inst: &Instance, alloc: &Allocation, tau: i64) -> (Allocation, Allocation) {
    let m = inst.num_items();
    let mut clean = Allocation::empty(inst.num_agents(), m);
    let mut supp = Allocation::empty(inst.num_agents(), m);
    for agent in inst.agents() {
        let bundle = alloc.bundle(agent);
        let marginals = inst.valuation(agent).marginals_in_order(bundle.iter());
        for (item, d) in bundle.iter().zip(marginals) {
            let target = if d >= tau { &mut clean } else { &mut supp };
            target.assign(item, Some(agent));
        }
    }
    (clean, supp)
}

/// Per-agent split `X_i = X^c_i ∪ X^0_i ∪ X^{-1}_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriDecomposition {
    pub xc: Allocation,
    pub x0: Allocation,
    pub xm1: Allocation,
}

impl TriDecomposition {
    /// Per-agent union of the three parts.
    pub fn combined(&self) -> Result<Allocation> {
        self.xc.union(&self.x0)?.union(&self.xm1)
    }

    /// `(|X^c_h|)_h`.
    pub fn good_counts(&self) -> Vec<usize> {
        self.xc.bundles().iter().map(ItemSet::len).collect()
    }

    /// `(|X^{-1}_h|)_h`.
    pub fn chore_counts(&self) -> Vec<usize> {
        self.xm1.bundles().iter().map(ItemSet::len).collect()
    }
}

/// Which clause of the three-way decomposition failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Clause {
    /// The three parts do not union to the bundle.
    Cover,
    /// The parts overlap.
    Disjoint,
    /// `v(X^c ∪ X^0) = v(X^c) = c|X^c|` fails.
    GoodValue,
    /// `v(X) = c|X^c| - |X^{-1}|` fails.
    TotalValue,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Clause::Cover => "(a) parts do not cover the bundle",
            Clause::Disjoint => "(b) parts are not pairwise disjoint",
            Clause::GoodValue => "(c) v(Xc ∪ X0) = v(Xc) = c|Xc| fails",
            Clause::TotalValue => "(d) v(X) = c|Xc| - |X-1| fails",
        };
        f.write_str(s)
    }
}

/// Checks clauses (a)-(d) for every agent; returns the first failure.
pub fn verify_tridecomposition(
    inst: &Instance,
    alloc: &Allocation,
    d: &TriDecomposition,
) -> std::result::Result<(), (AgentId, Clause)> {
    let c = inst.c();
    for agent in inst.agents() {
        let (xc, x0, xm1) = (d.xc.bundle(agent), d.x0.bundle(agent), d.xm1.bundle(agent));
        if !xc.is_disjoint(x0) || !xc.is_disjoint(xm1) || !x0.is_disjoint(xm1) {
            return Err((agent, Clause::Disjoint));
        }
        if &xc.union(x0).union(xm1) != alloc.bundle(agent) {
            return Err((agent, Clause::Cover));
        }
        let good = c * xc.len() as i64;
        if inst.value(agent, &xc.union(x0)) != good || inst.value(agent, xc) != good {
            return Err((agent, Clause::GoodValue));
        }
        if inst.value(agent, alloc.bundle(agent)) != good - xm1.len() as i64 {
            return Err((agent, Clause::TotalValue));
        }
    }
    Ok(())
}

/// Three-way decomposition: split by `β^0`, then split the non-negative
/// part by `β^c`. Verified before returning.
pub fn decompose3(inst: &Instance, alloc: &Allocation) -> Result<TriDecomposition> {
    let (nonneg, xm1) = decompose_threshold(inst, alloc, 0);
    let (xc, x0) = decompose_threshold(inst, &nonneg, inst.c());
    let d = TriDecomposition { xc, x0, xm1 };
    verify_tridecomposition(inst, alloc, &d)
        .map_err(|(agent, clause)| Error::Decomposition { agent, clause: clause.to_string() })?;
    Ok(d)
}
