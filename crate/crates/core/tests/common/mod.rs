//! The seeded randomized suite shared by the integration tests.

#![allow(dead_code)]

use manna::instgen::{gen_capped_groups, gen_random_additive, CappedParams};
use manna::Instance;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Additive,
    Capped,
}

/// Parameters of suite instance `k`: `n` in {2, 3}, `m` in 4..=8, `c` in {1, 2, 3}.
pub fn params(k: u64) -> (usize, usize, i64) {
    let n = 2 + (k % 2) as usize;
    let m = 4 + ((k / 2) % 5) as usize;
    let c = 1 + ((k / 10) % 3) as i64;
    (n, m, c)
}

pub fn suite_instance(family: Family, k: u64) -> Instance {
    let (n, m, c) = params(k);
    match family {
        Family::Additive => {
            let ratios = [(1, 1, 1), (1, 1, 2), (2, 1, 1), (1, 2, 1)][((k / 30) % 4) as usize];
            gen_random_additive(n, m, c, ratios, k).expect("valid parameters")
        }
        Family::Capped => gen_capped_groups(&CappedParams { n, m, c, groups: 0..=3, caps: 0..=3, seed: k })
            .expect("valid parameters"),
    }
}

pub fn suite(family: Family, count: u64) -> Vec<Instance> {
    (0..count).map(|k| suite_instance(family, k)).collect()
}
