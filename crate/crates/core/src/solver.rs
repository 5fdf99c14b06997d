//! The three-phase leximin solver.
//!
//! Phase 1 runs Yankee Swap on the `β^0` thresholds to get a clean allocation
//! of every item with non-negative marginal value. Phase 2 grows and balances
//! the `c`-valued parts with Pareto-improving and exchange paths. Phase 3
//! hands out the remaining items, each a chore to everyone, to the currently
//! best-off agent.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exchange::{augment_checked, check_clean_state, AugmentingPath, CleanState, PathKind, PathTarget, WeightedExchangeGraph};
use crate::model::{utility_vector, AgentId, Allocation, Instance, ItemId, SortedUtilityVector, UtilityVector};
use crate::threshold::{verify_tridecomposition, ThresholdFunction, TriDecomposition};
use crate::valuations::{validate_all, ValuationSpec};
use crate::yankee::yankee_swap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    One,
    Two,
    Three,
    Done,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverState {
    pub xc: Allocation,
    pub x0: Allocation,
    pub xm1: Allocation,
    pub phase: Phase,
    pub pareto_augmentations: u64,
    pub exchange_augmentations: u64,
    /// Integer potential before and after every exchange augmentation.
    pub potential_log: Vec<(u128, u128)>,
    pub trace: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub allocation: Allocation,
    pub utilities: UtilityVector,
    pub sorted: SortedUtilityVector,
    pub decomposition: TriDecomposition,
    pub pareto_augmentations: u64,
    pub exchange_augmentations: u64,
    pub usw: i64,
}

/// Rejects valuations the solver cannot handle: `general_additive`, and
/// explicit tables that fail any validator.
pub fn check_supported(inst: &Instance) -> Result<()> {
    for agent in inst.agents() {
        let spec = inst.valuation(agent);
        match spec {
            ValuationSpec::GeneralAdditive(_) => {
                return Err(Error::UnsupportedValuation { agent, kind: spec.kind().into() });
            }
            ValuationSpec::Explicit(_) => {
                if let Err(failure) = validate_all(spec, inst.num_items(), inst.c())? {
                    return Err(Error::UnsupportedValuation { agent, kind: format!("explicit table ({failure})") });
                }
            }
            ValuationSpec::Additive(_) | ValuationSpec::CappedGroups(_) => {}
        }
    }
    Ok(())
}

/// Upper bound on exchange augmentations, `n^4 m^3`.
pub fn exchange_bound(n: usize, m: usize) -> u128 {
    (n as u128).pow(4) * (m as u128).pow(3)
}

/// `Σ_h (n² |X^c_h| + h)²`, the potential scaled by `n^4` to stay integral.
pub fn potential(xc: &Allocation) -> u128 {
    let n2 = (xc.num_agents() as u128).pow(2);
    AgentId::all(xc.num_agents())
        .map(|h| {
            let t = n2 * xc.bundle(h).len() as u128 + h.index() as u128;
            t * t
        })
        .sum()
}

fn format_path(items: &[ItemId]) -> String {
    let parts: Vec<String> = items.iter().map(|o| o.to_string()).collect();
    format!("[{}]", parts.join(","))
}

pub fn phase1(inst: &Instance) -> Result<SolverState> {
    check_supported(inst)?;
    let betas = ThresholdFunction::for_instance(inst, 0);
    let x0 = yankee_swap(inst.num_items(), &betas)?;
    let (n, m) = (inst.num_agents(), inst.num_items());
    let state = SolverState {
        xc: Allocation::empty(n, m),
        x0,
        xm1: Allocation::empty(n, m),
        phase: Phase::Two,
        pareto_augmentations: 0,
        exchange_augmentations: 0,
        potential_log: Vec::new(),
        trace: Vec::new(),
    };
    check_clean_state(inst, &CleanState::new(state.xc.clone(), state.x0.clone()))?;
    Ok(state)
}

fn record(state: &mut SolverState, path: &AugmentingPath) {
    let (kind, j) = match path.kind {
        PathKind::ParetoImproving => ("pareto", 0),
        PathKind::Exchange => ("exchange", path.target.map_or(0, |t| t.index())),
    };
    let mut line = String::new();
    let _ = write!(
        line,
        "phase2 {kind} i={} j={j} path={} w={}",
        path.source_agent,
        format_path(&path.items),
        path.doubled_weight
    );
    state.trace.push(line);
}

fn pareto_step(inst: &Instance, clean: &CleanState) -> Option<AugmentingPath> {
    let graph = WeightedExchangeGraph::new_unchecked(inst, clean);
    inst.agents().find_map(|a| graph.min_weight_path(a, PathTarget::Unallocated))
}

fn exchange_step(inst: &Instance, clean: &CleanState) -> Option<AugmentingPath> {
    let graph = WeightedExchangeGraph::new_unchecked(inst, clean);
    let size = |a: AgentId| clean.xc.bundle(a).len();
    for i in inst.agents() {
        for j in inst.agents() {
            let qualifies = size(i) + 1 < size(j) || (size(i) + 1 == size(j) && i < j);
            if !qualifies {
                continue;
            }
            if let Some(path) = graph.min_weight_path(i, PathTarget::Agent(j)) {
                return Some(path);
            }
        }
    }
    None
}

pub fn phase2(mut state: SolverState, inst: &Instance) -> Result<SolverState> {
    if state.phase != Phase::Two {
        return Err(Error::Contract("phase2 expects a state fresh from phase1".into()));
    }
    let (n, m) = (inst.num_agents(), inst.num_items());
    let mut clean = CleanState::new(state.xc.clone(), state.x0.clone());
    loop {
        while let Some(path) = pareto_step(inst, &clean) {
            clean = augment_checked(inst, &clean, &path)?;
            state.pareto_augmentations += 1;
            record(&mut state, &path);
            if state.pareto_augmentations > m as u64 {
                return Err(Error::Invariant(format!("more than m = {m} Pareto-improving augmentations")));
            }
        }
        let Some(path) = exchange_step(inst, &clean) else { break };
        let before = potential(&clean.xc);
        clean = augment_checked(inst, &clean, &path)?;
        let after = potential(&clean.xc);
        state.exchange_augmentations += 1;
        state.potential_log.push((before, after));
        record(&mut state, &path);
        if after >= before {
            return Err(Error::Invariant(format!("potential did not decrease: {before} -> {after}")));
        }
        if u128::from(state.exchange_augmentations) > exchange_bound(n, m) {
            return Err(Error::Invariant("exchange augmentations exceeded n^4 m^3".into()));
        }
    }
    state.xc = clean.xc;
    state.x0 = clean.x0;
    state.phase = Phase::Three;
    Ok(state)
}

fn check_value_split(inst: &Instance, state: &SolverState, agent: AgentId) -> Result<()> {
    let bundle = state.xc.bundle(agent).union(state.x0.bundle(agent)).union(state.xm1.bundle(agent));
    let expected = inst.c() * state.xc.bundle(agent).len() as i64 - state.xm1.bundle(agent).len() as i64;
    let got = inst.value(agent, &bundle);
    if got != expected {
        return Err(Error::Invariant(format!("agent {agent} has value {got}, decomposition says {expected}")));
    }
    Ok(())
}

pub fn phase3(mut state: SolverState, inst: &Instance) -> Result<(SolveReport, SolverState)> {
    if state.phase != Phase::Three {
        return Err(Error::Contract("phase3 expects a state fresh from phase2".into()));
    }
    for agent in inst.agents() {
        check_value_split(inst, &state, agent)?;
    }
    let mut bundles: Vec<_> = inst
        .agents()
        .map(|a| state.xc.bundle(a).union(state.x0.bundle(a)).union(state.xm1.bundle(a)))
        .collect();
    let mut utilities: Vec<i64> = inst.agents().map(|a| inst.value(a, &bundles[a.position()])).collect();
    let remaining = state.xc.unallocated().intersection(state.x0.unallocated()).intersection(state.xm1.unallocated());
    for item in &remaining {
        let best = utilities.iter().copied().max().expect("at least one agent");
        let agent = inst.agents().rev().find(|a| utilities[a.position()] == best).expect("a maximizer exists");
        let delta = inst.valuation(agent).marginal(&bundles[agent.position()], item)?;
        if delta != -1 {
            return Err(Error::Invariant(format!("{item} has marginal {delta} for agent {agent} in phase 3")));
        }
        state.xm1.assign(item, Some(agent));
        bundles[agent.position()].insert(item);
        utilities[agent.position()] += delta;
        state.trace.push(format!("phase3 give {item} to agent {agent}"));
        check_value_split(inst, &state, agent)?;
    }
    state.phase = Phase::Done;

    let decomposition = TriDecomposition { xc: state.xc.clone(), x0: state.x0.clone(), xm1: state.xm1.clone() };
    let allocation = decomposition.combined()?;
    if !allocation.is_complete() {
        return Err(Error::Invariant("final allocation is not complete".into()));
    }
    verify_tridecomposition(inst, &allocation, &decomposition)
        .map_err(|(agent, clause)| Error::Decomposition { agent, clause: clause.to_string() })?;
    let utilities = utility_vector(inst, &allocation);
    let usw = utilities.sum();
    let split: i64 = decomposition.good_counts().iter().map(|&k| inst.c() * k as i64).sum::<i64>()
        - decomposition.chore_counts().iter().map(|&k| k as i64).sum::<i64>();
    if usw != split {
        return Err(Error::Invariant(format!("welfare {usw} disagrees with the decomposition ({split})")));
    }
    let report = SolveReport {
        sorted: utilities.sorted(),
        allocation,
        utilities,
        decomposition,
        pareto_augmentations: state.pareto_augmentations,
        exchange_augmentations: state.exchange_augmentations,
        usw,
    };
    Ok((report, state))
}

/// Runs all three phases and returns the final solver state as well.
pub fn solve_detailed(inst: &Instance) -> Result<(SolveReport, SolverState)> {
    let state = phase1(inst)?;
    let state = phase2(state, inst)?;
    phase3(state, inst)
}

/// Computes a leximin allocation that also maximizes utilitarian welfare.
pub fn solve(inst: &Instance) -> Result<SolveReport> {
    solve_detailed(inst).map(|(report, _)| report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instgen::fixtures;
    use crate::itemset::ItemSet;

    fn set(v: &[usize]) -> ItemSet {
        v.iter().map(|&i| ItemId::new(i)).collect()
    }

    fn sizes(x: &Allocation) -> Vec<usize> {
        x.bundles().iter().map(|b| b.len()).collect()
    }

    #[test]
    fn phase1_examples() {
        let s = phase1(&fixtures::ex2()).unwrap();
        assert_eq!(sizes(&s.x0), vec![2, 2]);
        assert_eq!(s.xc.total_allocated() + s.xm1.total_allocated(), 0);
        let s = phase1(&fixtures::ex_classic()).unwrap();
        assert_eq!(s.x0.bundle(AgentId::new(1)), &set(&[0]));
        let empty = Instance::new(1, 0, vec![ValuationSpec::Additive(vec![])]).unwrap();
        let s = phase1(&empty).unwrap();
        assert_eq!(s.x0.total_allocated(), 0);
    }

    #[test]
    fn phase2_examples() {
        let inst = fixtures::ex2();
        let s = phase2(phase1(&inst).unwrap(), &inst).unwrap();
        assert_eq!(s.xc.bundle(AgentId::new(1)), &set(&[0]));
        assert_eq!(sizes(&s.xc), vec![1, 0]);

        let zeros = Instance::new(2, 3, vec![ValuationSpec::Additive(vec![0, 0, -1]); 2]).unwrap();
        let before = phase1(&zeros).unwrap();
        let after = phase2(before.clone(), &zeros).unwrap();
        assert_eq!((after.xc.clone(), after.x0.clone()), (before.xc, before.x0));
        assert_eq!(after.pareto_augmentations + after.exchange_augmentations, 0);

        let ef1 = fixtures::ex_ef1(2);
        let s = phase2(phase1(&ef1).unwrap(), &ef1).unwrap();
        assert_eq!(sizes(&s.xc), vec![2, 2]);
        assert_eq!(s.xc.bundle(AgentId::new(2)), &set(&[0, 1]));
    }

    #[test]
    fn phase3_examples() {
        let inst = fixtures::ex2();
        let (report, state) = solve_detailed(&inst).unwrap();
        assert_eq!(report.utilities.0, vec![inst.c(), 0]);
        assert!(state.trace.iter().all(|l| !l.starts_with("phase3")));

        let mms = fixtures::ex_mms();
        assert_eq!(solve(&mms).unwrap().utilities.0, vec![0, 0]);

        let chores = Instance::new(1, 3, vec![ValuationSpec::Additive(vec![-1; 3]); 2]).unwrap();
        let (report, state) = solve_detailed(&chores).unwrap();
        assert_eq!(report.utilities.0, vec![-1, -2]);
        assert_eq!(state.trace[0], "phase3 give o0 to agent 2");
    }

    #[test]
    fn solve_examples() {
        let ef1 = fixtures::ex_ef1(2);
        let r = solve(&ef1).unwrap();
        assert_eq!(r.sorted.values(), &[3, 3]);
        assert_eq!(r.usw, 6);
        let one = Instance::new(1, 1, vec![ValuationSpec::Additive(vec![-1])]).unwrap();
        assert_eq!(solve(&one).unwrap().utilities.0, vec![-1]);
    }

    #[test]
    fn unsupported_valuations() {
        let hard = crate::instgen::gen_hardness(&fixtures::expdm_matching(), 1).unwrap();
        assert!(matches!(solve(&hard), Err(Error::UnsupportedValuation { .. })));
        assert!(matches!(solve(&fixtures::non_on()), Err(Error::UnsupportedValuation { .. })));
        assert!(solve(&fixtures::fig1()).is_ok());
    }

    #[test]
    fn trace_format() {
        let inst = fixtures::ex_classic();
        let (_, state) = solve_detailed(&inst).unwrap();
        assert_eq!(state.trace, vec!["phase2 pareto i=1 j=0 path=[o0] w=1", "phase3 give o1 to agent 1"]);
    }

    #[test]
    fn potential_orders_by_size_then_index() {
        let a = Allocation::from_bundles(vec![set(&[0]), set(&[1, 2])], 3).unwrap();
        let b = Allocation::from_bundles(vec![set(&[0, 1]), set(&[2])], 3).unwrap();
        // Moving an item from agent 2 to agent 1 on a (1, 2) split lowers it.
        assert!(potential(&b) < potential(&a));
        assert_eq!(exchange_bound(2, 3), 16 * 27);
    }

    #[test]
    fn solve_is_deterministic() {
        for (_, inst) in fixtures::all().into_iter().filter(|(n, _)| *n != "non_on") {
            assert_eq!(solve(&inst).unwrap(), solve(&inst).unwrap());
        }
    }
}
