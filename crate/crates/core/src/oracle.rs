//! Exhaustive reference implementations over all `n^m` complete allocations.
//!
//! Items are assigned in index order with item 0 as the fastest-changing
//! digit, so "first witness" always means the same allocation.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::fairness::{p_mean_welfare, PMean};
use crate::itemset::ItemSet;
use crate::model::{lex_compare, AgentId, Allocation, Instance, ItemId, SortedUtilityVector, UtilityVector};
use crate::threshold::TriDecomposition;

pub const DEFAULT_BUDGET: u128 = 100_000_000;
pub const BUDGET_ENV: &str = "MANNA_ORACLE_BUDGET";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_enumerations: u128,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self { max_enumerations: DEFAULT_BUDGET }
    }
}

impl OracleBudget {
    pub fn new(max_enumerations: u128) -> Self {
        Self { max_enumerations }
    }

    /// The default budget, overridden by `MANNA_ORACLE_BUDGET` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(BUDGET_ENV) {
            Ok(text) => text
                .trim()
                .parse()
                .map(Self::new)
                .map_err(|_| Error::Contract(format!("{BUDGET_ENV} must be a non-negative integer, got {text:?}"))),
            Err(_) => Ok(Self::default()),
        }
    }

    /// Number of complete allocations of `m` items to `n` agents, or an
    /// error when it exceeds the budget.
    pub fn check(&self, n: usize, m: usize) -> Result<u128> {
        let required = (n as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
        if required > self.max_enumerations {
            return Err(Error::BudgetExceeded { required, budget: self.max_enumerations });
        }
        Ok(required)
    }
}

/// Calls `f` on every complete allocation in canonical order. Returning
/// `false` from `f` stops the enumeration.
pub fn for_each_complete_allocation(
    n: usize,
    m: usize,
    budget: &OracleBudget,
    mut f: impl FnMut(&[ItemSet]) -> bool,
) -> Result<()> {
    budget.check(n, m)?;
    let mut digits = vec![0usize; m];
    let mut bundles = vec![ItemSet::new(); n];
    bundles[0] = ItemSet::full(m);
    loop {
        if !f(&bundles) {
            return Ok(());
        }
        let mut k = 0;
        loop {
            if k == m {
                return Ok(());
            }
            let item = ItemId::new(k);
            bundles[digits[k]].remove(item);
            digits[k] = (digits[k] + 1) % n;
            bundles[digits[k]].insert(item);
            if digits[k] != 0 {
                break;
            }
            k += 1;
        }
    }
}

fn utilities(inst: &Instance, bundles: &[ItemSet]) -> Vec<i64> {
    inst.agents().map(|a| inst.value(a, &bundles[a.position()])).collect()
}

fn to_allocation(bundles: &[ItemSet], m: usize) -> Allocation {
    Allocation::from_bundles(bundles.to_vec(), m).expect("enumerated bundles partition the items")
}

/// Lexicographically greatest sorted utility vector and its first witness.
pub fn brute_leximin(inst: &Instance, budget: &OracleBudget) -> Result<(SortedUtilityVector, Allocation)> {
    let mut best: Option<(Vec<i64>, Vec<ItemSet>)> = None;
    for_each_complete_allocation(inst.num_agents(), inst.num_items(), budget, |bundles| {
        let mut s = utilities(inst, bundles);
        s.sort_unstable();
        if best.as_ref().is_none_or(|(b, _)| s > *b) {
            best = Some((s, bundles.to_vec()));
        }
        true
    })?;
    let (s, bundles) = best.expect("at least one complete allocation");
    Ok((SortedUtilityVector::from_unsorted(s), to_allocation(&bundles, inst.num_items())))
}

pub fn brute_max_usw(inst: &Instance, budget: &OracleBudget) -> Result<i64> {
    let mut best = i64::MIN;
    for_each_complete_allocation(inst.num_agents(), inst.num_items(), budget, |bundles| {
        best = best.max(utilities(inst, bundles).iter().sum());
        true
    })?;
    Ok(best)
}

/// Maxmin share of `agent`: the best worst bundle over all `n`-partitions.
pub fn brute_mms(inst: &Instance, agent: AgentId, budget: &OracleBudget) -> Result<i64> {
    let spec = inst.valuation(agent);
    let mut best = i64::MIN;
    for_each_complete_allocation(inst.num_agents(), inst.num_items(), budget, |bundles| {
        let worst = bundles.iter().map(|b| spec.value(b)).min().expect("n >= 1");
        best = best.max(worst);
        true
    })?;
    Ok(best)
}

/// Whether the sorted utilities of `x` weakly dominate every complete
/// allocation's in all prefix sums.
pub fn brute_lorenz_dominating(inst: &Instance, x: &Allocation, budget: &OracleBudget) -> Result<bool> {
    if !x.is_complete() {
        return Err(Error::Contract("Lorenz dominance is defined for complete allocations".into()));
    }
    let sx = crate::model::utility_vector(inst, x).sorted();
    let mut dominating = true;
    for_each_complete_allocation(inst.num_agents(), inst.num_items(), budget, |bundles| {
        let sy = SortedUtilityVector::from_unsorted(utilities(inst, bundles));
        dominating = crate::fairness::lorenz_geq(&sx, &sy).expect("equal lengths");
        dominating
    })?;
    Ok(dominating)
}

/// Maximum power-mean welfare over complete allocations where it is
/// defined, or `None` if every allocation has a negative utility.
pub fn brute_max_p_mean(inst: &Instance, p: f64, budget: &OracleBudget) -> Result<Option<f64>> {
    let mut best: Option<f64> = None;
    for_each_complete_allocation(inst.num_agents(), inst.num_items(), budget, |bundles| {
        if let PMean::Value(w) = p_mean_welfare(&UtilityVector(utilities(inst, bundles)), p) {
            best = Some(best.map_or(w, |b: f64| b.max(w)));
        }
        true
    })?;
    Ok(best)
}

/// One side of a domination comparison: a decomposition and the full
/// utility vector it belongs to.
#[derive(Clone, Copy, Debug)]
pub struct DominationSide<'a> {
    pub decomposition: &'a TriDecomposition,
    pub utilities: &'a UtilityVector,
}

/// Compares two leximin allocations by the domination order: sorted
/// `c`-part utilities, then `c`-part utilities by agent, then full
/// utilities by agent. `Greater` means `a` dominates `b`.
pub fn compare_domination(c: i64, a: DominationSide<'_>, b: DominationSide<'_>) -> Result<Ordering> {
    let good = |s: &DominationSide<'_>| -> Vec<i64> {
        s.decomposition.good_counts().iter().map(|&k| c * k as i64).collect()
    };
    let (ga, gb) = (good(&a), good(&b));
    let mut sa = ga.clone();
    let mut sb = gb.clone();
    sa.sort_unstable();
    sb.sort_unstable();
    Ok(lex_compare(&sa, &sb)?
        .then(lex_compare(&ga, &gb)?)
        .then(lex_compare(&a.utilities.0, &b.utilities.0)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instgen::fixtures;
    use crate::valuations::ValuationSpec;

    fn set(v: &[usize]) -> ItemSet {
        v.iter().map(|&i| ItemId::new(i)).collect()
    }

    fn budget() -> OracleBudget {
        OracleBudget::default()
    }

    #[test]
    fn enumeration_order_and_count() {
        let mut seen = Vec::new();
        for_each_complete_allocation(2, 2, &budget(), |b| {
            seen.push((b[0].to_mask(), b[1].to_mask()));
            true
        })
        .unwrap();
        assert_eq!(seen, vec![(0b11, 0b00), (0b10, 0b01), (0b01, 0b10), (0b00, 0b11)]);
        let mut count = 0;
        for_each_complete_allocation(3, 0, &budget(), |_| {
            count += 1;
            true
        })
        .unwrap();
        assert_eq!(count, 1);
    }

    #[test]
    fn budget_is_enforced() {
        let tight = OracleBudget::new(8);
        assert_eq!(tight.check(2, 3), Ok(8));
        assert_eq!(tight.check(2, 4), Err(Error::BudgetExceeded { required: 16, budget: 8 }));
        assert!(brute_leximin(&fixtures::ex_mms(), &OracleBudget::new(1000)).is_err());
        assert!(OracleBudget::default().check(100, 100).is_err());
    }

    #[test]
    fn leximin_examples() {
        let ex2 = fixtures::ex2();
        let (s, _) = brute_leximin(&ex2, &budget()).unwrap();
        assert_eq!(s.values(), &[0, ex2.c()]);
        let (s, _) = brute_leximin(&fixtures::ex_mms(), &budget()).unwrap();
        assert_eq!(s.values(), &[0, 0]);
        let one = Instance::new(1, 2, vec![ValuationSpec::Additive(vec![1, -1])]).unwrap();
        let (s, x) = brute_leximin(&one, &budget()).unwrap();
        assert_eq!((s.values(), x.bundle(AgentId::new(1))), (&[0][..], &set(&[0, 1])));
    }

    #[test]
    fn max_usw_examples() {
        let ex2 = fixtures::ex2();
        assert_eq!(brute_max_usw(&ex2, &budget()).unwrap(), ex2.c());
        let chores = Instance::new(1, 3, vec![ValuationSpec::Additive(vec![-1; 3]); 2]).unwrap();
        assert_eq!(brute_max_usw(&chores, &budget()).unwrap(), -3);
        assert_eq!(brute_max_usw(&fixtures::ex_ef1(2), &budget()).unwrap(), 6);
    }

    #[test]
    fn mms_examples() {
        assert_eq!(brute_mms(&fixtures::ex_mms(), AgentId::new(1), &budget()).unwrap(), 1);
        let c = 3;
        let add = Instance::new(c, 3, vec![ValuationSpec::Additive(vec![c, c, -1]); 2]).unwrap();
        assert_eq!(brute_mms(&add, AgentId::new(1), &budget()).unwrap(), c - 1);
        let one = Instance::new(c, 3, vec![ValuationSpec::Additive(vec![c, 0, -1])]).unwrap();
        assert_eq!(brute_mms(&one, AgentId::new(1), &budget()).unwrap(), c - 1);
    }

    #[test]
    fn lorenz_examples() {
        let ex2 = fixtures::ex2();
        let x = crate::solver::solve(&ex2).unwrap().allocation;
        assert!(brute_lorenz_dominating(&ex2, &x, &budget()).unwrap());
        let unbalanced = Allocation::from_bundles(vec![set(&[0, 1]), set(&[2, 3])], 4).unwrap();
        assert!(!brute_lorenz_dominating(&ex2, &unbalanced, &budget()).unwrap());
        let one = Instance::new(1, 2, vec![ValuationSpec::Additive(vec![1, -1])]).unwrap();
        let all = Allocation::from_bundles(vec![set(&[0, 1])], 2).unwrap();
        assert!(brute_lorenz_dominating(&one, &all, &budget()).unwrap());
        assert!(brute_lorenz_dominating(&ex2, &Allocation::empty(2, 4), &budget()).is_err());
    }

    fn side(good: &[usize], m: usize) -> TriDecomposition {
        let mut bundles = Vec::new();
        let mut next = 0;
        for &k in good {
            bundles.push((next..next + k).map(ItemId::new).collect());
            next += k;
        }
        let xc = Allocation::from_bundles(bundles, m).unwrap();
        let n = good.len();
        TriDecomposition { xc, x0: Allocation::empty(n, m), xm1: Allocation::empty(n, m) }
    }

    #[test]
    fn domination_examples() {
        let d = side(&[1, 1], 2);
        let u = UtilityVector(vec![1, 1]);
        let s = DominationSide { decomposition: &d, utilities: &u };
        assert_eq!(compare_domination(1, s, s).unwrap(), Ordering::Equal);

        let lop = side(&[2, 0], 2);
        let lop_u = UtilityVector(vec![2, 0]);
        let a = DominationSide { decomposition: &lop, utilities: &lop_u };
        assert_eq!(compare_domination(1, s, a).unwrap(), Ordering::Greater);

        let (d10, d01) = (side(&[1, 0], 1), side(&[0, 1], 1));
        let (u10, u01) = (UtilityVector(vec![1, 0]), UtilityVector(vec![0, 1]));
        let a = DominationSide { decomposition: &d10, utilities: &u10 };
        let b = DominationSide { decomposition: &d01, utilities: &u01 };
        assert_eq!(compare_domination(1, a, b).unwrap(), Ordering::Greater);
        assert_eq!(compare_domination(1, b, a).unwrap(), Ordering::Less);
    }
}
