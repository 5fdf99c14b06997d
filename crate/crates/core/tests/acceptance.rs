//! Runs every acceptance criterion and prints one pass/fail line for each.

mod common;

use std::process::Command;

use common::Family;
use manna::exchange::{augment, check_clean_state, AugmentingPath, CleanState, PathKind};
use manna::fairness::{check_ef1, check_mms, check_prop1, p_mean_welfare, PMean};
use manna::instgen::{self, fixtures, gen_hardness, random_two_valued_table, ExPDMInstance, SplitMix64};
use manna::oracle::{brute_leximin, brute_lorenz_dominating, brute_max_p_mean, brute_max_usw, brute_mms, OracleBudget};
use manna::solver::{exchange_bound, solve_detailed, SolveReport, SolverState};
use manna::valuations::{validate_order_neutral, validate_range, validate_submodular, ValidationFailure};
use manna::{AgentId, Allocation, Instance, ItemId, ItemSet};

const PER_FAMILY: u64 = 200;

struct Run {
    family: Family,
    index: u64,
    inst: Instance,
    outcome: Result<(SolveReport, SolverState), manna::Error>,
}

fn label(run: &Run) -> String {
    format!("{:?} #{}", run.family, run.index)
}

/// Collects failures; a criterion passes when the list stays empty.
struct Check {
    failures: Vec<String>,
    checked: usize,
}

impl Check {
    fn new() -> Self {
        Self { failures: Vec::new(), checked: 0 }
    }

    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

fn report_line(number: usize, name: &str, check: &Check) -> bool {
    let ok = check.failures.is_empty();
    let status = if ok { "PASS" } else { "FAIL" };
    println!("criterion {number:>2} {status} {name} ({} checks)", check.checked);
    for f in check.failures.iter().take(5) {
        println!("      {f}");
    }
    ok
}

fn solved(run: &Run) -> Option<&(SolveReport, SolverState)> {
    run.outcome.as_ref().ok()
}

fn main() {
    let budget = OracleBudget::default();
    let runs: Vec<Run> = [Family::Additive, Family::Capped]
        .into_iter()
        .flat_map(|family| {
            common::suite(family, PER_FAMILY)
                .into_iter()
                .enumerate()
                .map(move |(k, inst)| (family, k as u64, inst))
        })
        .map(|(family, index, inst)| {
            let outcome = solve_detailed(&inst);
            Run { family, index, inst, outcome }
        })
        .collect();
    let leximin: Vec<_> = runs.iter().map(|r| brute_leximin(&r.inst, &budget).expect("within budget")).collect();
    let mut results = Vec::new();

    // 1. Oracle equivalence.
    let mut c1 = Check::new();
    for (run, (best, _)) in runs.iter().zip(&leximin) {
        match solved(run) {
            Some((report, _)) => c1.expect(&report.sorted == best, || {
                format!("{}: solver {:?} vs brute {:?}", label(run), report.sorted.values(), best.values())
            }),
            None => c1.expect(false, || format!("{}: {}", label(run), run.outcome.as_ref().unwrap_err())),
        }
    }
    results.push(report_line(1, "oracle equivalence", &c1));

    // 2. Maximum utilitarian welfare.
    let mut c2 = Check::new();
    for run in &runs {
        let best = brute_max_usw(&run.inst, &budget).expect("within budget");
        let got = solved(run).map(|(r, _)| r.usw);
        c2.expect(got == Some(best), || format!("{}: solver {got:?} vs brute {best}", label(run)));
    }
    results.push(report_line(2, "max utilitarian welfare", &c2));

    // 3. PROP1 on every output.
    let mut c3 = Check::new();
    for run in &runs {
        let ok = solved(run).is_some_and(|(r, _)| check_prop1(&run.inst, &r.allocation).unwrap().iter().all(|&b| b));
        c3.expect(ok, || format!("{}: PROP1 fails", label(run)));
    }
    results.push(report_line(3, "PROP1", &c3));

    // 4. EF1 on additive outputs, and the EF1 counterexample.
    let mut c4 = Check::new();
    for run in runs.iter().filter(|r| r.family == Family::Additive) {
        let ok = solved(run).is_some_and(|(r, _)| check_ef1(&run.inst, &r.allocation).unwrap().iter().all(|p| p.ok));
        c4.expect(ok, || format!("{}: EF1 fails", label(run)));
    }
    {
        let inst = fixtures::ex_ef1(2);
        let report = manna::solve(&inst).expect("fixture solves");
        let (a1, a2) = (AgentId::new(1), AgentId::new(2));
        let own = inst.value(a1, report.allocation.bundle(a1));
        let rival = inst.value(a1, report.allocation.bundle(a2));
        let pair = check_ef1(&inst, &report.allocation).unwrap().into_iter().find(|p| p.envier == a1 && p.envied == a2);
        c4.expect(own == 3 && rival == 6 && pair.is_some_and(|p| !p.ok), || {
            format!("ex_ef1: own {own}, rival {rival}, verdict {pair:?}")
        });
    }
    results.push(report_line(4, "EF1 (additive) and the ONSUB counterexample", &c4));

    // 5. MMS on additive outputs, and the MMS counterexample.
    let mut c5 = Check::new();
    for run in runs.iter().filter(|r| r.family == Family::Additive) {
        let mms: Vec<i64> = run.inst.agents().map(|a| brute_mms(&run.inst, a, &budget).unwrap()).collect();
        let ok = solved(run).is_some_and(|(r, _)| check_mms(&run.inst, &r.allocation, &mms).unwrap().iter().all(|&b| b));
        c5.expect(ok, || format!("{}: MMS fails (mms {mms:?})", label(run)));
    }
    {
        let inst = fixtures::ex_mms();
        let a1 = AgentId::new(1);
        let mms1 = brute_mms(&inst, a1, &budget).unwrap();
        let u1 = manna::solve(&inst).unwrap().utilities.get(a1);
        c5.expect(mms1 == 1 && u1 == 0, || format!("ex_mms: mms_1 = {mms1}, utility = {u1}"));
    }
    results.push(report_line(5, "MMS (additive) and the ONSUB counterexample", &c5));

    // 6. Lorenz dominance.
    let mut c6 = Check::new();
    for run in &runs {
        let ok = solved(run).is_some_and(|(r, _)| brute_lorenz_dominating(&run.inst, &r.allocation, &budget).unwrap());
        c6.expect(ok, || format!("{}: not Lorenz dominating", label(run)));
    }
    results.push(report_line(6, "Lorenz dominance", &c6));

    // 7. Nash and utilitarian optimality when the leximin minimum is non-negative.
    let mut c7 = Check::new();
    for (run, (best, _)) in runs.iter().zip(&leximin) {
        if best.values()[0] < 0 {
            continue;
        }
        let Some((report, _)) = solved(run) else {
            c7.expect(false, || format!("{}: solver failed", label(run)));
            continue;
        };
        let nash = brute_max_p_mean(&run.inst, 0.0, &budget).unwrap().expect("a non-negative allocation exists");
        let got = match p_mean_welfare(&report.utilities, 0.0) {
            PMean::Value(w) => w,
            PMean::Undefined => f64::NAN,
        };
        let close = (got - nash).abs() <= 1e-12 * nash.abs().max(1.0);
        c7.expect(close, || format!("{}: Nash {got} vs best {nash}", label(run)));
        let mean = brute_max_p_mean(&run.inst, 1.0, &budget).unwrap().unwrap();
        let got_mean = p_mean_welfare(&report.utilities, 1.0);
        c7.expect(got_mean == PMean::Value(mean), || format!("{}: mean {got_mean:?} vs best {mean}", label(run)));
    }
    results.push(report_line(7, "Nash and utilitarian welfare", &c7));

    // 8. Cleanness after every augmentation, plus the forced-path negative control.
    let mut c8 = Check::new();
    for run in &runs {
        c8.expect(run.outcome.is_ok(), || format!("{}: {}", label(run), run.outcome.as_ref().unwrap_err()));
    }
    {
        let inst = fixtures::ex_classic();
        let m = inst.num_items();
        let state = CleanState::new(Allocation::empty(1, m), Allocation::from_bundles(vec![set(&[0])], m).unwrap());
        let forced = AugmentingPath {
            items: vec![ItemId::new(1)],
            kind: PathKind::ParetoImproving,
            source_agent: AgentId::new(1),
            target: None,
            doubled_weight: 2,
        };
        let result = check_clean_state(&inst, &augment(&state, &forced));
        c8.expect(result.as_ref().is_err_and(|e| e.to_string().contains("beta^0")), || {
            format!("forced (o2) augmentation should break beta^0 cleanness, got {result:?}")
        });
    }
    results.push(report_line(8, "cleanness invariants", &c8));

    // 9. Termination bounds and potential decrease.
    let mut c9 = Check::new();
    for run in &runs {
        let Some((report, state)) = solved(run) else { continue };
        let (n, m) = (run.inst.num_agents(), run.inst.num_items());
        c9.expect(report.pareto_augmentations <= m as u64, || format!("{}: too many Pareto augmentations", label(run)));
        c9.expect(u128::from(report.exchange_augmentations) <= exchange_bound(n, m), || {
            format!("{}: too many exchange augmentations", label(run))
        });
        c9.expect(state.potential_log.len() as u64 == report.exchange_augmentations, || {
            format!("{}: potential log length mismatch", label(run))
        });
        for &(before, after) in &state.potential_log {
            c9.expect(after < before, || format!("{}: potential {before} -> {after}", label(run)));
        }
    }
    results.push(report_line(9, "termination bound and potential", &c9));

    // 10. Hardness reduction.
    let mut c10 = Check::new();
    for (expdm, want_zero) in [(fixtures::expdm_matching(), true), (fixtures::expdm_no_matching(), false)] {
        let inst = gen_hardness(&expdm, 1).unwrap();
        let (sorted, _) = brute_leximin(&inst, &budget).unwrap();
        let min = sorted.values()[0];
        c10.expect(if want_zero { min == 0 } else { min < 0 }, || {
            format!("matching = {want_zero}: brute min utility {min}")
        });
    }
    {
        let one = ExPDMInstance::new(3, 1, vec![vec![0, 0, 0]]).unwrap();
        let (sorted, _) = brute_leximin(&gen_hardness(&one, 1).unwrap(), &budget).unwrap();
        c10.expect(sorted.values() == [0], || format!("single edge: {:?}", sorted.values()));
    }
    results.push(report_line(10, "hardness reduction", &c10));

    // 11. Validators.
    let mut c11 = Check::new();
    {
        let table = fixtures::non_on().valuations()[0].materialize(2).unwrap();
        let ok = match validate_order_neutral(&table) {
            Err(ValidationFailure::NotOrderNeutral { witness, first, second }) => {
                let mut vectors = vec![first, second];
                vectors.sort();
                witness == set(&[0, 1]) && vectors == vec![vec![-1, 1], vec![0, 0]]
            }
            _ => false,
        };
        c11.expect(ok, || "non_on table is not rejected with the expected witness".into());
        let fig1 = fixtures::fig1().valuations()[0].materialize(9).unwrap();
        c11.expect(validate_submodular(&fig1).is_ok(), || "fig1 is not submodular".into());
        c11.expect(validate_order_neutral(&fig1).is_ok(), || "fig1 is not order-neutral".into());
        c11.expect(validate_range(&fig1, 1).is_ok(), || "fig1 marginals leave {-1, 0, 1}".into());
        let mut rng = SplitMix64::new(11);
        let values = [-1i64, 0, 1, 2, 3];
        for t in 0..100 {
            let m = 1 + (t % 6);
            let lo = values[rng.next_below(4) as usize];
            let hi = values[(rng.next_below((values.len() - 1) as u64) + 1) as usize].max(lo + 1);
            let table = random_two_valued_table(m, &mut rng, lo, hi);
            c11.expect(validate_submodular(&table).is_ok(), || format!("table {t} is not submodular"));
            c11.expect(validate_order_neutral(&table).is_ok(), || format!("table {t} ({lo}, {hi}) is not order-neutral"));
        }
    }
    results.push(report_line(11, "validators", &c11));

    // 12. Byte-identical solve output on every fixture.
    let mut c12 = Check::new();
    let dir = tempfile::tempdir().expect("temporary directory");
    for (name, inst) in fixtures::all() {
        let path = dir.path().join(format!("{name}.json"));
        std::fs::write(&path, instgen::instance_to_json(&inst)).unwrap();
        let outputs: Vec<_> = (0..2)
            .map(|_| {
                Command::new(env!("CARGO_BIN_EXE_manna"))
                    .args(["solve", "--instance"])
                    .arg(&path)
                    .output()
                    .expect("binary runs")
            })
            .collect();
        c12.expect(
            outputs[0].status == outputs[1].status
                && outputs[0].stdout == outputs[1].stdout
                && outputs[0].stderr == outputs[1].stderr,
            || format!("{name}: outputs differ"),
        );
        let expected_ok = name != "non_on";
        c12.expect(outputs[0].status.success() == expected_ok, || format!("{name}: exit {}", outputs[0].status));
    }
    results.push(report_line(12, "determinism", &c12));

    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}

fn set(v: &[usize]) -> ItemSet {
    v.iter().map(|&i| ItemId::new(i)).collect()
}
