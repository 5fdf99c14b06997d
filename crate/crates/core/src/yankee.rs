//! Yankee Swap: a clean, welfare-maximizing leximin allocation for binary
//! submodular valuations.

use crate::error::{Error, Result};
use crate::exchange::{shift_along, ExchangeGraph};
use crate::model::{AgentId, Allocation};
use crate::threshold::BinaryOracle;

/// Runs Yankee Swap over `num_items` items with one binary oracle per agent.
///
/// The active agent with the smallest bundle (lowest index on ties) either
/// receives an item through a shortest augmenting path into the unallocated
/// pool or leaves the active set.
pub fn yankee_swap<B: BinaryOracle>(num_items: usize, betas: &[B]) -> Result<Allocation> {
    let n = betas.len();
    let mut alloc = Allocation::empty(n, num_items);
    let mut active = vec![true; n];
    while let Some(agent) = AgentId::all(n)
        .filter(|a| active[a.position()])
        .min_by_key(|a| (alloc.bundle(*a).len(), *a))
    {
        let path = {
            let graph = ExchangeGraph::new(&alloc, betas.iter().collect());
            check_marginals(&alloc, &betas[agent.position()], agent)?;
            graph.shortest_path_to_unallocated(agent)
        };
        match path {
            Some(path) => {
                shift_along(&mut alloc, &path, agent);
                for h in AgentId::all(n) {
                    let b = &betas[h.position()];
                    if b.eval(alloc.bundle(h)) != alloc.bundle(h).len() as i64 {
                        return Err(Error::OracleViolation {
                            agent: h,
                            detail: "augmentation left a bundle that is not clean".into(),
                        });
                    }
                }
            }
            None => active[agent.position()] = false,
        }
    }
    Ok(alloc)
}

/// Rejects oracles whose marginals at the agent's current bundle leave `{0, 1}`.
fn check_marginals<B: BinaryOracle>(alloc: &Allocation, beta: &B, agent: AgentId) -> Result<()> {
    let bundle = alloc.bundle(agent);
    let base = beta.eval(bundle);
    if base != bundle.len() as i64 {
        return Err(Error::OracleViolation { agent, detail: format!("bundle {bundle} has value {base}") });
    }
    for o in crate::model::ItemId::all(alloc.num_items()).filter(|&o| !bundle.contains(o)) {
        let d = beta.eval(&bundle.with(o)) - base;
        if d != 0 && d != 1 {
            return Err(Error::OracleViolation { agent, detail: format!("marginal of {o} at {bundle} is {d}") });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::itemset::ItemSet;
    use crate::model::ItemId;
    use crate::valuations::ExplicitTable;
    use proptest::prelude::*;

    fn set(v: &[usize]) -> ItemSet {
        v.iter().map(|&i| ItemId::new(i)).collect()
    }

    fn table(m: usize, f: impl Fn(&ItemSet) -> i64) -> ExplicitTable {
        ExplicitTable::from_fn(m, f).unwrap()
    }

    #[test]
    fn ex2_binary_thresholds() {
        let b1 = table(4, |s| s.len() as i64);
        let b2 = table(4, |s| s.intersection(&set(&[0, 1])).len() as i64);
        let x = yankee_swap(4, &[b1, b2]).unwrap();
        assert_eq!(x.bundle(AgentId::new(1)).len(), 2);
        assert_eq!(x.bundle(AgentId::new(2)), &set(&[0, 1]));
    }

    #[test]
    fn single_agent_takes_its_one_item() {
        let b = table(2, |s| s.intersection(&set(&[0])).len() as i64);
        let x = yankee_swap(2, &[b]).unwrap();
        assert_eq!(x.bundle(AgentId::new(1)), &set(&[0]));
        assert_eq!(x.unallocated(), &set(&[1]));
    }

    #[test]
    fn all_zero_leaves_everything_unallocated() {
        let z = table(3, |_| 0);
        let x = yankee_swap(3, &[z.clone(), z]).unwrap();
        assert_eq!(x.total_allocated(), 0);
    }

    #[test]
    fn non_binary_oracle_is_rejected() {
        let b = table(2, |s| 2 * s.len() as i64);
        assert!(matches!(yankee_swap(2, &[b]), Err(Error::OracleViolation { .. })));
    }

    /// Best sorted size vector and best total over all clean allocations.
    fn brute_clean(m: usize, betas: &[ExplicitTable]) -> (Vec<usize>, usize) {
        let n = betas.len();
        let mut best: Option<Vec<usize>> = None;
        let mut best_total = 0;
        let mut digits = vec![0usize; m];
        loop {
            let mut bundles = vec![0u64; n];
            for (o, &d) in digits.iter().enumerate() {
                if d > 0 {
                    bundles[d - 1] |= 1 << o;
                }
            }
            if bundles.iter().zip(betas).all(|(&b, t)| t.at(b) == b.count_ones() as i64) {
                let mut sizes: Vec<usize> = bundles.iter().map(|b| b.count_ones() as usize).collect();
                best_total = best_total.max(sizes.iter().sum());
                sizes.sort();
                if best.as_ref().is_none_or(|b| sizes > *b) {
                    best = Some(sizes);
                }
            }
            let mut k = 0;
            loop {
                if k == m {
                    return (best.unwrap(), best_total);
                }
                digits[k] += 1;
                if digits[k] <= n {
                    break;
                }
                digits[k] = 0;
                k += 1;
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(96))]

        #[test]
        fn matches_brute_force(n in 1usize..=3, m in 1usize..=6, seed in any::<u64>()) {
            let mut rng = crate::instgen::SplitMix64::new(seed);
            let betas: Vec<ExplicitTable> =
                (0..n).map(|_| crate::instgen::random_two_valued_table(m, &mut rng, 0, 1)).collect();
            let x = yankee_swap(m, &betas).unwrap();
            let mut sizes: Vec<usize> = x.bundles().iter().map(|b| b.len()).collect();
            for (b, t) in x.bundles().iter().zip(&betas) {
                prop_assert_eq!(t.at(b.to_mask()), b.len() as i64);
            }
            let total: usize = sizes.iter().sum();
            sizes.sort();
            let (best, best_total) = brute_clean(m, &betas);
            prop_assert_eq!(sizes, best);
            prop_assert_eq!(total, best_total);
        }
    }
}
