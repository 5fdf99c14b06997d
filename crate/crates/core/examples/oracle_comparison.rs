//! Compare the solver against exhaustive enumeration on random instances.

use manna::instgen::{gen_capped_groups, CappedParams};
use manna::oracle::{brute_leximin, brute_max_usw, OracleBudget};
use manna::solve;

fn main() {
    let budget = OracleBudget::from_env().expect("valid budget");
    let mut agree = 0;
    for seed in 0..25 {
        let inst = gen_capped_groups(&CappedParams { n: 3, m: 7, c: 2, groups: 0..=3, caps: 0..=3, seed }).unwrap();
        let out = solve(&inst).unwrap();
        let (best, witness) = brute_leximin(&inst, &budget).unwrap();
        let usw = brute_max_usw(&inst, &budget).unwrap();
        let same = out.sorted == best && out.usw == usw;
        agree += same as u32;
        println!(
            "seed {seed:>2}: solver {:?} welfare {:>3} | brute {:?} welfare {:>3} (witness {:?}){}",
            out.sorted.values(),
            out.usw,
            best.values(),
            usw,
            witness.bundles(),
            if same { "" } else { "  MISMATCH" }
        );
    }
    println!("{agree}/25 agree");
}
