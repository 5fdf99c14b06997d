//! Exchange graphs, the weighted exchange graph with half-weight edges,
//! minimum-weight path search and path augmentation.
//!
//! Weights are stored doubled so every cost is an integer: a half-weight edge
//! costs 1 and a full edge costs 2.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::itemset::ItemSet;
use crate::model::{AgentId, Allocation, Instance, ItemId};
use crate::threshold::{BinaryOracle, ThresholdFunction};

pub const HALF: u64 = 1;
pub const FULL: u64 = 2;

/// `G(X, β)`: an edge `o -> o'` exists when the owner `j` of `o` can swap
/// `o` for `o'` without losing `β_j` value. Edges are computed on demand.
pub struct ExchangeGraph<'a, B> {
    alloc: &'a Allocation,
    betas: Vec<B>,
}

impl<'a, B: BinaryOracle> ExchangeGraph<'a, B> {
    pub fn new(alloc: &'a Allocation, betas: Vec<B>) -> Self {
        assert_eq!(alloc.num_agents(), betas.len(), "one oracle per agent");
        Self { alloc, betas }
    }

    pub fn allocation(&self) -> &Allocation {
        self.alloc
    }

    fn beta(&self, agent: AgentId) -> &B {
        &self.betas[agent.position()]
    }

    pub fn has_edge(&self, from: ItemId, to: ItemId) -> bool {
        let Some(owner) = self.alloc.owner_of(from) else {
            return false;
        };
        let bundle = self.alloc.bundle(owner);
        if bundle.contains(to) {
            return false;
        }
        let mut swapped = bundle.without(from);
        swapped.insert(to);
        self.beta(owner).eval(&swapped) == self.beta(owner).eval(bundle)
    }

    /// Out-neighbours of `from` in ascending item order.
    pub fn out_neighbors(&self, from: ItemId) -> Vec<ItemId> {
        let Some(owner) = self.alloc.owner_of(from) else {
            return Vec::new();
        };
        let bundle = self.alloc.bundle(owner);
        let base = self.beta(owner).eval(bundle);
        let rest = bundle.without(from);
        ItemId::all(self.alloc.num_items())
            .filter(|&to| !bundle.contains(to) && self.beta(owner).eval(&rest.with(to)) == base)
            .collect()
    }

    pub fn edges(&self) -> Vec<(ItemId, ItemId)> {
        ItemId::all(self.alloc.num_items())
            .flat_map(|o| self.out_neighbors(o).into_iter().map(move |p| (o, p)))
            .collect()
    }

    /// `F_β(X, i)`: items outside `X_i` with `β_i`-marginal 1.
    pub fn f_set(&self, agent: AgentId) -> ItemSet {
        let bundle = self.alloc.bundle(agent);
        let base = self.beta(agent).eval(bundle);
        ItemId::all(self.alloc.num_items())
            .filter(|&o| !bundle.contains(o) && self.beta(agent).eval(&bundle.with(o)) - base == 1)
            .collect()
    }

    /// Shortest path from `F(X, i)` to the unallocated pool (fewest edges,
    /// then lexicographically smallest item sequence).
    pub fn shortest_path_to_unallocated(&self, agent: AgentId) -> Option<Vec<ItemId>> {
        let sources = self.f_set(agent);
        let pool = self.alloc.unallocated();
        search(
            &sources,
            |o| pool.contains(o),
            |o| self.out_neighbors(o).into_iter().map(|p| (p, FULL)).collect(),
            |_, _| 0,
        )
        .map(|(_, path)| path)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    ParetoImproving,
    Exchange,
}

/// Where a path must end.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathTarget {
    /// Any item outside every `X^c` bundle.
    Unallocated,
    Agent(AgentId),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AugmentingPath {
    pub items: Vec<ItemId>,
    pub kind: PathKind,
    pub source_agent: AgentId,
    /// `None` for paths ending in the unallocated pool.
    pub target: Option<AgentId>,
    pub doubled_weight: u64,
}

impl AugmentingPath {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// The pair `(X^c, X^0)` that phase two manipulates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CleanState {
    pub xc: Allocation,
    pub x0: Allocation,
}

impl CleanState {
    pub fn new(xc: Allocation, x0: Allocation) -> Self {
        Self { xc, x0 }
    }
}

/// `G^w(X^c, X^0, β^c)`.
pub struct WeightedExchangeGraph<'a> {
    graph: ExchangeGraph<'a, ThresholdFunction<'a>>,
    x0: &'a Allocation,
}

/// Builds the weighted graph after asserting its hypotheses: `X^c` is
/// `β^c`-clean, `X^c ∪ X^0` is `β^0`-clean, and the two are disjoint.
pub fn build_weighted_graph<'a>(inst: &'a Instance, state: &'a CleanState) -> Result<WeightedExchangeGraph<'a>> {
    check_clean_state(inst, state)?;
    Ok(WeightedExchangeGraph::new_unchecked(inst, state))
}

impl<'a> WeightedExchangeGraph<'a> {
    pub fn new_unchecked(inst: &'a Instance, state: &'a CleanState) -> Self {
        Self {
            graph: ExchangeGraph::new(&state.xc, ThresholdFunction::for_instance(inst, inst.c())),
            x0: &state.x0,
        }
    }

    pub fn graph(&self) -> &ExchangeGraph<'a, ThresholdFunction<'a>> {
        &self.graph
    }

    /// Doubled weight of an existing edge.
    pub fn weight(&self, from: ItemId, to: ItemId) -> u64 {
        match self.graph.alloc.owner_of(from) {
            Some(owner) if self.x0.bundle(owner).contains(to) => HALF,
            _ => FULL,
        }
    }

    pub fn weighted_edges(&self) -> Vec<(ItemId, ItemId, u64)> {
        self.graph.edges().into_iter().map(|(a, b)| (a, b, self.weight(a, b))).collect()
    }

    /// Text edge list, one `o -> o' w=<1|2>` line per edge.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (a, b, w) in self.weighted_edges() {
            let _ = writeln!(out, "{a} -> {b} w={w}");
        }
        out
    }

    /// Extra cost of picking up the terminal item: half if it already sits
    /// in the absorbing agent's `X^0` bundle, full otherwise.
    fn pickup_cost(&self, absorber: AgentId, item: ItemId) -> u64 {
        if self.x0.bundle(absorber).contains(item) {
            HALF
        } else {
            FULL
        }
    }

    /// Least-weight path from `F_{β^c}(X^c, agent)` to `target`.
    ///
    /// Ties go to fewer edges, then to the lexicographically smallest item
    /// sequence. Paths into the unallocated pool pay a pickup cost at the end.
    pub fn min_weight_path(&self, agent: AgentId, target: PathTarget) -> Option<AugmentingPath> {
        let sources = self.graph.f_set(agent);
        let xc = self.graph.alloc;
        let found = match target {
            PathTarget::Unallocated => search(
                &sources,
                |o| xc.owner_of(o).is_none(),
                |o| self.graph.out_neighbors(o).into_iter().map(|p| (p, self.weight(o, p))).collect(),
                |pred, last| {
                    let absorber = pred.and_then(|p| xc.owner_of(p)).unwrap_or(agent);
                    self.pickup_cost(absorber, last)
                },
            ),
            PathTarget::Agent(j) => search(
                &sources,
                |o| xc.owner_of(o) == Some(j),
                |o| self.graph.out_neighbors(o).into_iter().map(|p| (p, self.weight(o, p))).collect(),
                |_, _| 0,
            ),
        };
        found.map(|(cost, items)| AugmentingPath {
            items,
            kind: match target {
                PathTarget::Unallocated => PathKind::ParetoImproving,
                PathTarget::Agent(_) => PathKind::Exchange,
            },
            source_agent: agent,
            target: match target {
                PathTarget::Unallocated => None,
                PathTarget::Agent(j) => Some(j),
            },
            doubled_weight: cost,
        })
    }
}

type Label = (u64, usize, Vec<ItemId>);

/// Multi-source least-cost search ordered by `(cost, edges, item sequence)`.
///
/// Target items end a path and are never expanded; `terminal` adds a cost
/// depending on the target and its predecessor (`None` for one-item paths).
fn search(
    sources: &ItemSet,
    is_target: impl Fn(ItemId) -> bool,
    neighbors: impl Fn(ItemId) -> Vec<(ItemId, u64)>,
    terminal: impl Fn(Option<ItemId>, ItemId) -> u64,
) -> Option<(u64, Vec<ItemId>)> {
    fn offer(best: &mut Option<Label>, label: Label) {
        if best.as_ref().is_none_or(|b| label < *b) {
            *best = Some(label);
        }
    }
    let mut best: Option<Label> = None;
    let mut heap = BinaryHeap::new();
    for s in sources {
        if is_target(s) {
            offer(&mut best, (terminal(None, s), 0, vec![s]));
        } else {
            heap.push(Reverse((0u64, 0usize, vec![s])));
        }
    }
    let mut done: HashSet<ItemId> = HashSet::new();
    while let Some(Reverse((cost, edges, path))) = heap.pop() {
        if best.as_ref().is_some_and(|b| cost >= b.0) {
            break;
        }
        let u = *path.last().expect("paths are non-empty");
        if !done.insert(u) {
            continue;
        }
        for (v, w) in neighbors(u) {
            if done.contains(&v) || path.contains(&v) {
                continue;
            }
            let mut next = path.clone();
            next.push(v);
            if is_target(v) {
                offer(&mut best, (cost + w + terminal(Some(u), v), edges + 1, next));
            } else {
                heap.push(Reverse((cost + w, edges + 1, next)));
            }
        }
    }
    best.map(|(cost, _, path)| (cost, path))
}

/// Transfers items along `path`: `o_1` goes to `agent`, and each `o_{k+1}`
/// goes to the original owner of `o_k`. The terminal item leaves its holder.
pub fn shift_along(alloc: &mut Allocation, path: &[ItemId], agent: AgentId) {
    let owners: Vec<Option<AgentId>> = path.iter().map(|&o| alloc.owner_of(o)).collect();
    for (k, &item) in path.iter().enumerate() {
        let new_owner = if k == 0 { Some(agent) } else { owners[k - 1] };
        alloc.assign(item, new_owner);
    }
}

/// Applies a path to `(X^c, X^0)`. Pareto-improving paths also release the
/// terminal item from whichever `X^0` bundle held it.
pub fn augment(state: &CleanState, path: &AugmentingPath) -> CleanState {
    let mut next = state.clone();
    shift_along(&mut next.xc, &path.items, path.source_agent);
    if path.kind == PathKind::ParetoImproving {
        let last = *path.items.last().expect("paths are non-empty");
        next.x0.assign(last, None);
    }
    next
}

/// [`augment`] followed by the cleanness checks.
pub fn augment_checked(inst: &Instance, state: &CleanState, path: &AugmentingPath) -> Result<CleanState> {
    let next = augment(state, path);
    check_clean_state(inst, &next)?;
    Ok(next)
}

/// `F_{β^τ}(X, i)` for the instance's own thresholds.
pub fn f_set(inst: &Instance, x: &Allocation, agent: AgentId, tau: i64) -> ItemSet {
    ExchangeGraph::new(x, ThresholdFunction::for_instance(inst, tau)).f_set(agent)
}

/// Free-function form of [`WeightedExchangeGraph::min_weight_path`].
pub fn min_weight_path(g: &WeightedExchangeGraph<'_>, agent: AgentId, target: PathTarget) -> Option<AugmentingPath> {
    g.min_weight_path(agent, target)
}

/// Checks `β^c`-cleanness of `X^c`, `β^0`-cleanness of `X^c ∪ X^0`, and
/// that no item sits in both.
pub fn check_clean_state(inst: &Instance, state: &CleanState) -> Result<()> {
    state.xc.check_partition()?;
    state.x0.check_partition()?;
    let allocated_c: ItemSet = state.xc.bundles().iter().fold(ItemSet::new(), |a, b| a.union(b));
    let allocated_0: ItemSet = state.x0.bundles().iter().fold(ItemSet::new(), |a, b| a.union(b));
    if !allocated_c.is_disjoint(&allocated_0) {
        return Err(Error::Invariant("an item is held in both X^c and X^0".into()));
    }
    for agent in inst.agents() {
        let xc = state.xc.bundle(agent);
        let spec = inst.valuation(agent);
        if crate::threshold::beta(spec, inst.c(), xc) != xc.len() {
            return Err(Error::Invariant(format!("X^c of agent {agent} is not clean w.r.t. beta^c")));
        }
        let both = xc.union(state.x0.bundle(agent));
        if crate::threshold::beta(spec, 0, &both) != both.len() {
            return Err(Error::Invariant(format!("X^c ∪ X^0 of agent {agent} is not clean w.r.t. beta^0")));
        }
    }
    Ok(())
}
