//! Run the fairness checkers on solver outputs, including the two named
//! instances where EF1 and MMS fail.

use manna::fairness::{check_ef1, check_mms, check_prop1, lorenz_geq, p_mean_welfare};
use manna::instgen::{fixtures, gen_random_additive};
use manna::oracle::{brute_leximin, brute_mms, OracleBudget};
use manna::{solve, Instance};

fn report(name: &str, inst: &Instance) {
    let budget = OracleBudget::default();
    let out = solve(inst).expect("instance is in scope");
    let mms: Vec<i64> = inst.agents().map(|a| brute_mms(inst, a, &budget).unwrap()).collect();
    let (best, _) = brute_leximin(inst, &budget).unwrap();

    println!("{name}: utilities {:?}", out.utilities.0);
    println!("  PROP1 {:?}", check_prop1(inst, &out.allocation).unwrap());
    for pair in check_ef1(inst, &out.allocation).unwrap() {
        if !pair.ok {
            println!("  EF1 fails: agent {} envies agent {}", pair.envier, pair.envied);
        }
    }
    println!("  MMS shares {mms:?} -> {:?}", check_mms(inst, &out.allocation, &mms).unwrap());
    println!("  Lorenz-geq the brute-force optimum: {}", lorenz_geq(&out.sorted, &best).unwrap());
    println!("  Nash welfare {:?}", p_mean_welfare(&out.utilities, 0.0));
}

fn main() {
    report("ex_ef1", &fixtures::ex_ef1(2));
    report("ex_mms", &fixtures::ex_mms());
    report("additive seed 3", &gen_random_additive(3, 7, 2, (2, 1, 1), 3).unwrap());
}
