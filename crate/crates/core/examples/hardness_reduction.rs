//! Reduce exact 3-dimensional matching to leximin with `{-3, 1}` additive
//! valuations: a perfect matching exists exactly when the leximin minimum
//! utility is 0.

use manna::instgen::{fixtures, gen_hardness, ExPDMInstance};
use manna::oracle::{brute_leximin, OracleBudget};

fn run(name: &str, expdm: &ExPDMInstance) {
    let inst = gen_hardness(expdm, 1).unwrap();
    let (sorted, witness) = brute_leximin(&inst, &OracleBudget::default()).unwrap();
    println!(
        "{name}: {} edges, {} items, perfect matching: {}, leximin sorted {:?}",
        expdm.edges.len(),
        inst.num_items(),
        expdm.has_perfect_matching(),
        sorted.values()
    );
    for (e, bundle) in witness.bundles().iter().enumerate() {
        println!("  edge {:?} gets {bundle}", expdm.edges[e]);
    }
    if let Err(e) = manna::solve(&inst) {
        println!("  the solver refuses it: {e}");
    }
}

fn main() {
    run("with matching", &fixtures::expdm_matching());
    run("without matching", &fixtures::expdm_no_matching());
}
