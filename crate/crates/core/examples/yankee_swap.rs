//! Yankee Swap on binary submodular valuations given as explicit tables.

use manna::instgen::{random_two_valued_table, SplitMix64};
use manna::valuations::ExplicitTable;
use manna::yankee::yankee_swap;
use manna::{ItemId, ItemSet};

fn main() {
    // Agent 1 likes every item; agent 2 only the first two.
    let m = 4;
    let likes: ItemSet = [ItemId::new(0), ItemId::new(1)].into_iter().collect();
    let b1 = ExplicitTable::from_fn(m, |s| s.len() as i64).unwrap();
    let b2 = ExplicitTable::from_fn(m, |s| s.intersection(&likes).len() as i64).unwrap();
    let x = yankee_swap(m, &[b1, b2]).unwrap();
    println!("{:?}", x);

    // Random matroid rank functions.
    let mut rng = SplitMix64::new(17);
    let betas: Vec<_> = (0..3).map(|_| random_two_valued_table(8, &mut rng, 0, 1)).collect();
    let x = yankee_swap(8, &betas).unwrap();
    for (i, b) in x.bundles().iter().enumerate() {
        println!("agent {}: {b} (rank {})", i + 1, betas[i].at(b.to_mask()));
    }
    println!("unallocated: {}", x.unallocated());
}
