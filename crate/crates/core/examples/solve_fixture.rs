//! Solve one of the named instances and print the allocation, its
//! three-way split and the solver trace.
//!
//! ```text
//! cargo run --example solve_fixture -- ex_ef1
//! ```

use manna::instgen::fixtures;
use manna::solver::solve_detailed;

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "ex_ef1".to_string());
    let Some(inst) = fixtures::by_name(&name) else {
        let names: Vec<_> = fixtures::all().into_iter().map(|(n, _)| n).collect();
        eprintln!("unknown fixture {name}; try one of {}", names.join(", "));
        std::process::exit(2);
    };
    let (report, state) = match solve_detailed(&inst) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{name}: {e}");
            std::process::exit(1);
        }
    };

    println!("{name}: {} agents, {} items, c = {}", inst.num_agents(), inst.num_items(), inst.c());
    for line in &state.trace {
        println!("  {line}");
    }
    let d = &report.decomposition;
    for a in inst.agents() {
        println!(
            "agent {a}: bundle {} utility {} (c-part {}, zero part {}, chores {})",
            report.allocation.bundle(a),
            report.utilities.get(a),
            d.xc.bundle(a),
            d.x0.bundle(a),
            d.xm1.bundle(a),
        );
    }
    println!("sorted utilities {:?}, welfare {}", report.sorted.values(), report.usw);
}
