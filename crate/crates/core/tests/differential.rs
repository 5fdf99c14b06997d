mod common;

use manna::instgen::{random_two_valued_table, SplitMix64};
use manna::oracle::{brute_leximin, brute_max_usw, OracleBudget};
use manna::solver::{solve, solve_detailed};
use manna::threshold::verify_tridecomposition;
use manna::valuations::ValuationSpec;
use manna::Instance;
use proptest::prelude::*;

fn matroid_instance(n: usize, m: usize, c: i64, seed: u64) -> Instance {
    // Marginals are either `lo` or `hi`, two values from {-1, 0, c}.
    let mut rng = SplitMix64::new(seed);
    let pairs = [(-1, 0), (-1, c), (0, c)];
    let specs = (0..n)
        .map(|_| {
            let (lo, hi) = pairs[rng.next_below(3) as usize];
            ValuationSpec::Explicit(random_two_valued_table(m, &mut rng, lo, hi))
        })
        .collect();
    Instance::new(c, m, specs).unwrap()
}

fn assert_matches_oracle(inst: &Instance) -> Result<(), TestCaseError> {
    let budget = OracleBudget::default();
    let (report, state) = solve_detailed(inst).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let (best, _) = brute_leximin(inst, &budget).unwrap();
    prop_assert_eq!(&report.sorted, &best);
    prop_assert_eq!(report.usw, brute_max_usw(inst, &budget).unwrap());
    prop_assert!(report.allocation.is_complete());
    prop_assert_eq!(verify_tridecomposition(inst, &report.allocation, &report.decomposition), Ok(()));
    prop_assert!(state.potential_log.iter().all(|(b, a)| a < b));
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn explicit_two_valued_tables(n in 1usize..=3, m in 0usize..=7, c in 1i64..=3, seed in any::<u64>()) {
        assert_matches_oracle(&matroid_instance(n, m, c, seed))?;
    }

    #[test]
    fn capped_groups_beyond_the_suite(k in 1000u64..1_000_000) {
        assert_matches_oracle(&common::suite_instance(common::Family::Capped, k))?;
    }

    #[test]
    fn additive_beyond_the_suite(k in 1000u64..1_000_000) {
        assert_matches_oracle(&common::suite_instance(common::Family::Additive, k))?;
    }

    /// Agents with identical valuations can be permuted without changing
    /// the sorted utilities.
    #[test]
    fn agent_order_does_not_change_sorted_utilities(k in 0u64..100_000, rot in 1usize..3) {
        let inst = common::suite_instance(common::Family::Capped, k);
        let mut vals = inst.valuations().to_vec();
        let len = vals.len();
        vals.rotate_left(rot % len);
        let rotated = Instance::new(inst.c(), inst.num_items(), vals).unwrap();
        prop_assert_eq!(solve(&inst).unwrap().sorted, solve(&rotated).unwrap().sorted);
    }
}

#[test]
fn larger_instances_solve_within_bounds() {
    for k in 0..5 {
        let inst = manna::instgen::gen_capped_groups(&manna::instgen::CappedParams {
            n: 4,
            m: 24,
            c: 2,
            groups: 1..=4,
            caps: 0..=4,
            seed: k,
        })
        .unwrap();
        let report = solve(&inst).unwrap();
        assert!(report.allocation.is_complete());
        assert!(report.pareto_augmentations <= 24);
    }
}
