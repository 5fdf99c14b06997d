//! Fairness checkers and welfare functionals.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{AgentId, Allocation, Instance, ItemId, SortedUtilityVector, UtilityVector};

fn require_complete(inst: &Instance, x: &Allocation) -> Result<()> {
    if x.num_agents() != inst.num_agents() || x.num_items() != inst.num_items() {
        return Err(Error::Contract("allocation does not match the instance".into()));
    }
    if !x.is_complete() {
        return Err(Error::Contract("allocation is not complete".into()));
    }
    Ok(())
}

/// Per-agent PROP1 verdicts, compared exactly as `n v_i(·) >= v_i(O)`.
pub fn check_prop1(inst: &Instance, x: &Allocation) -> Result<Vec<bool>> {
    require_complete(inst, x)?;
    let n = inst.num_agents() as i64;
    let everything = inst.items();
    Ok(inst
        .agents()
        .map(|i| {
            let total = inst.value(i, &everything);
            let ok = |v: i64| n * v >= total;
            let own = x.bundle(i);
            ok(inst.value(i, own))
                || everything.iter().any(|o| {
                    let changed = if own.contains(o) { own.without(o) } else { own.with(o) };
                    ok(inst.value(i, &changed))
                })
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PairVerdict {
    pub envier: AgentId,
    pub envied: AgentId,
    pub ok: bool,
}

/// EF1 verdict for every ordered pair of distinct agents.
pub fn check_ef1(inst: &Instance, x: &Allocation) -> Result<Vec<PairVerdict>> {
    require_complete(inst, x)?;
    let mut out = Vec::new();
    for i in inst.agents() {
        for j in inst.agents().filter(|&j| j != i) {
            let (xi, xj) = (x.bundle(i), x.bundle(j));
            let ok = inst.value(i, xi) >= inst.value(i, xj)
                || xi.union(xj).iter().any(|o: ItemId| inst.value(i, &xi.without(o)) >= inst.value(i, &xj.without(o)));
            out.push(PairVerdict { envier: i, envied: j, ok });
        }
    }
    Ok(out)
}

/// `v_i(X_i) >= mms_i` for every agent.
pub fn check_mms(inst: &Instance, x: &Allocation, mms: &[i64]) -> Result<Vec<bool>> {
    if mms.len() != inst.num_agents() {
        return Err(Error::Contract("one maxmin share per agent is required".into()));
    }
    Ok(inst.agents().map(|i| inst.value(i, x.bundle(i)) >= mms[i.position()]).collect())
}

/// Every prefix sum of `a` is at least the matching prefix sum of `b`.
pub fn lorenz_geq(a: &SortedUtilityVector, b: &SortedUtilityVector) -> Result<bool> {
    let (a, b) = (a.values(), b.values());
    if a.len() != b.len() {
        return Err(Error::Contract(format!("length mismatch: {} vs {}", a.len(), b.len())));
    }
    let (mut sa, mut sb) = (0i64, 0i64);
    for (x, y) in a.iter().zip(b) {
        sa += x;
        sb += y;
        if sa < sb {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PMean {
    Value(f64),
    /// Some utility is negative.
    Undefined,
}

/// Power mean `((1/n) Σ u_i^p)^(1/p)`, the geometric mean at `p = 0`, and
/// `0` when `p <= 0` and some utility is zero.
pub fn p_mean_welfare(u: &UtilityVector, p: f64) -> PMean {
    let u = &u.0;
    if u.iter().any(|&x| x < 0) {
        return PMean::Undefined;
    }
    if u.is_empty() {
        return PMean::Value(0.0);
    }
    if p <= 0.0 && u.contains(&0) {
        return PMean::Value(0.0);
    }
    let n = u.len() as f64;
    if p == 0.0 {
        let log_mean = u.iter().map(|&x| (x as f64).ln()).sum::<f64>() / n;
        return PMean::Value(log_mean.exp());
    }
    let mean = u.iter().map(|&x| (x as f64).powf(p)).sum::<f64>() / n;
    PMean::Value(mean.powf(1.0 / p))
}
