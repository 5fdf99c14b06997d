//! Seeded instance generators, the named example instances, the hardness
//! reduction from exact p-dimensional matching, and JSON I/O.

use std::ops::RangeInclusive;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::itemset::ItemSet;
use crate::model::{Allocation, Instance, ItemId};
use crate::valuations::{ExplicitTable, Group, ValuationSpec};

/// The splitmix64 generator. Fixed constants make every generated instance
/// identical across platforms.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform draw from `0..bound` by rejection; `bound` must be positive.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let zone = u64::MAX - u64::MAX % bound;
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % bound;
            }
        }
    }

    pub fn in_range<T>(&mut self, range: &RangeInclusive<T>) -> T
    where
        T: Copy + Into<u64> + TryFrom<u64>,
        <T as TryFrom<u64>>::Error: std::fmt::Debug,
    {
        let (lo, hi) = ((*range.start()).into(), (*range.end()).into());
        T::try_from(lo + self.next_below(hi - lo + 1)).expect("draw stays in range")
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

/// Each agent-item value is drawn independently from `{c, 0, -1}` with
/// integer ratios `p_c : p_0 : p_m1`, agent by agent, item by item.
pub fn gen_random_additive(n: usize, m: usize, c: i64, ratios: (u32, u32, u32), seed: u64) -> Result<Instance> {
    let (pc, p0, pm1) = ratios;
    let total = u64::from(pc) + u64::from(p0) + u64::from(pm1);
    if total == 0 {
        return Err(Error::Contract("ratios must not all be zero".into()));
    }
    let mut rng = SplitMix64::new(seed);
    let valuations = (0..n)
        .map(|_| {
            let values = (0..m)
                .map(|_| {
                    let r = rng.next_below(total);
                    if r < u64::from(pc) {
                        c
                    } else if r < u64::from(pc) + u64::from(p0) {
                        0
                    } else {
                        -1
                    }
                })
                .collect();
            ValuationSpec::Additive(values)
        })
        .collect();
    Instance::new(c, m, valuations)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CappedParams {
    pub n: usize,
    pub m: usize,
    pub c: i64,
    /// Range for the number of groups per agent.
    pub groups: RangeInclusive<usize>,
    pub caps: RangeInclusive<u32>,
    pub seed: u64,
}

/// Per agent: a random number of disjoint groups (items are labelled
/// uniformly with a group or "ungrouped"), each with a random `(hi, lo)` pair
/// and cap, and a default marginal of `0` or `-1` for ungrouped items.
pub fn gen_capped_groups(params: &CappedParams) -> Result<Instance> {
    if params.groups.is_empty() || params.caps.is_empty() {
        return Err(Error::Contract("group-count and cap ranges must be non-empty".into()));
    }
    let c = params.c;
    let pairs = [(c, 0), (c, -1), (0, -1), (0, 0)];
    let mut rng = SplitMix64::new(params.seed);
    let mut valuations = Vec::with_capacity(params.n);
    for _ in 0..params.n {
        let k = rng.in_range(&(*params.groups.start() as u64..=*params.groups.end() as u64)) as usize;
        let mut members = vec![ItemSet::new(); k];
        for o in ItemId::all(params.m) {
            let label = rng.next_below(k as u64 + 1) as usize;
            if label < k {
                members[label].insert(o);
            }
        }
        let mut groups = Vec::new();
        for items in members {
            let (hi, lo) = pairs[rng.next_below(4) as usize];
            let cap = rng.in_range(&params.caps);
            if !items.is_empty() {
                groups.push(Group { items, cap, hi, lo });
            }
        }
        let default = if rng.next_below(2) == 0 { 0 } else { -1 };
        valuations.push(ValuationSpec::capped_groups(groups, default));
    }
    Instance::new(c, params.m, valuations)
}

/// Rank of the graphic matroid on `edges` restricted to `set`.
pub fn graphic_rank(edges: &[(usize, usize)], set: &ItemSet) -> usize {
    let nodes = edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0);
    let mut parent: Vec<usize> = (0..nodes).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut rank = 0;
    for o in set {
        let (a, b) = edges[o.index()];
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            rank += 1;
        }
    }
    rank
}

/// `v(S) = a|S| + (b - a) rank(S)` for a random graphic matroid on `m`
/// edges. With `a < b` every marginal is `a` or `b` and `v` is submodular.
pub fn random_two_valued_table(m: usize, rng: &mut SplitMix64, a: i64, b: i64) -> ExplicitTable {
    let nodes = (m / 2 + 2) as u64;
    let edges: Vec<(usize, usize)> =
        (0..m).map(|_| (rng.next_below(nodes) as usize, rng.next_below(nodes) as usize)).collect();
    ExplicitTable::from_fn(m, |s| a * s.len() as i64 + (b - a) * graphic_rank(&edges, s) as i64)
        .expect("m is within the table limit")
}

/// An exact p-dimensional matching instance. Part `k` holds vertices
/// `0..a`; each edge picks one vertex per part.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExPDMInstance {
    pub p: usize,
    pub a: usize,
    pub edges: Vec<Vec<usize>>,
}

impl ExPDMInstance {
    pub fn new(p: usize, a: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        for (e, edge) in edges.iter().enumerate() {
            if edge.len() != p || edge.iter().any(|&v| v >= a) {
                return Err(Error::Contract(format!("edge {e} must pick one of {a} vertices in each of {p} parts")));
            }
        }
        Ok(Self { p, a, edges })
    }

    /// Item index of vertex `v` of part `k`.
    pub fn vertex_item(&self, part: usize, v: usize) -> ItemId {
        ItemId::new(part * self.a + v)
    }

    /// True when some `a` edges cover every vertex exactly once.
    pub fn has_perfect_matching(&self) -> bool {
        fn pick(inst: &ExPDMInstance, used: &mut ItemSet, from: usize, left: usize) -> bool {
            if left == 0 {
                return true;
            }
            (from..inst.edges.len()).any(|e| {
                let items: ItemSet = inst.edges[e].iter().enumerate().map(|(k, &v)| inst.vertex_item(k, v)).collect();
                if !items.is_disjoint(used) {
                    return false;
                }
                let mut next = used.union(&items);
                pick(inst, &mut next, e + 1, left - 1)
            })
        }
        pick(self, &mut ItemSet::new(), 0, self.a)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// One agent per edge valuing its `p` vertices at `q` and every other item,
/// including the `a q` dummies at the highest indices, at `-p`.
pub fn gen_hardness(expdm: &ExPDMInstance, q: u64) -> Result<Instance> {
    let p = expdm.p as u64;
    if p < 3 {
        return Err(Error::Contract(format!("p must be at least 3, got {p}")));
    }
    if q == 0 || gcd(p, q) != 1 {
        return Err(Error::Contract(format!("p = {p} and q = {q} must be coprime")));
    }
    let m = expdm.p * expdm.a + expdm.a * q as usize;
    let valuations = expdm
        .edges
        .iter()
        .map(|edge| {
            let mut values = vec![-(p as i64); m];
            for (k, &v) in edge.iter().enumerate() {
                values[expdm.vertex_item(k, v).index()] = q as i64;
            }
            ValuationSpec::GeneralAdditive(values)
        })
        .collect();
    Instance::new(q as i64, m, valuations)
}

/// The named example instances. Items are 0-based, so `o1` is item 0.
pub mod fixtures {
    use super::*;

    fn items(v: &[usize]) -> ItemSet {
        v.iter().map(|&i| ItemId::new(i)).collect()
    }

    /// Agent 1 values one of `{o1, o2}` at `c`; agent 2 dislikes `o3, o4`.
    pub fn ex2() -> Instance {
        let c = 2;
        Instance::new(
            c,
            4,
            vec![
                ValuationSpec::capped_groups(vec![Group { items: items(&[0, 1]), cap: 1, hi: c, lo: 0 }], 0),
                ValuationSpec::Additive(vec![0, 0, -1, -1]),
            ],
        )
        .expect("fixture is well formed")
    }

    /// One agent, two items: the first item is worth `c`, the second `-1`.
    pub fn ex_classic() -> Instance {
        let c = 2;
        Instance::new(c, 2, vec![ValuationSpec::capped_groups(vec![Group { items: items(&[0, 1]), cap: 1, hi: c, lo: -1 }], 0)])
            .expect("fixture is well formed")
    }

    /// Two agents, six items, where every leximin allocation violates EF1.
    pub fn ex_ef1(c: i64) -> Instance {
        Instance::new(
            c,
            6,
            vec![
                ValuationSpec::capped_groups(
                    vec![
                        Group { items: items(&[0, 1]), cap: 2, hi: c, lo: 0 },
                        Group { items: items(&[2, 3, 4, 5]), cap: 2, hi: c, lo: -1 },
                    ],
                    0,
                ),
                ValuationSpec::Additive(vec![c, c, -1, -1, -1, -1]),
            ],
        )
        .expect("fixture is well formed")
    }

    /// Two agents, ten items, `c = 1`, where agent 1 gets less than its
    /// maxmin share in every leximin allocation.
    pub fn ex_mms() -> Instance {
        Instance::new(
            1,
            10,
            vec![
                ValuationSpec::capped_groups(
                    vec![
                        Group { items: items(&[0, 1, 2, 3]), cap: 2, hi: 1, lo: 0 },
                        Group { items: items(&[4, 5]), cap: 2, hi: 1, lo: 0 },
                    ],
                    -1,
                ),
                ValuationSpec::Additive(vec![-1, -1, -1, -1, 1, 1, -1, -1, -1, -1]),
            ],
        )
        .expect("fixture is well formed")
    }

    /// A submodular table that is not order-neutral:
    /// `v({o1}) = 0, v({o2}) = 1, v({o1, o2}) = 0`.
    pub fn non_on() -> Instance {
        let table = ExplicitTable::new(2, vec![0, 0, 1, 0]).expect("fixture is well formed");
        Instance::new(1, 2, vec![ValuationSpec::Explicit(table)]).expect("fixture is well formed")
    }

    /// Edges of the 6-node, 9-edge lattice graph, as 0-based node pairs.
    pub const FIG1_EDGES: [(usize, usize); 9] =
        [(0, 1), (0, 2), (1, 2), (3, 1), (3, 2), (3, 4), (2, 4), (1, 5), (3, 5)];

    /// Graphic-matroid rank of the lattice graph as an explicit table.
    pub fn fig1() -> Instance {
        let table = ExplicitTable::from_fn(9, |s| graphic_rank(&FIG1_EDGES, s) as i64).expect("9 items fit");
        Instance::new(1, 9, vec![ValuationSpec::Explicit(table)]).expect("fixture is well formed")
    }

    /// Hardness fixture with `p = 3, a = 2` that has a perfect matching.
    pub fn expdm_matching() -> ExPDMInstance {
        ExPDMInstance::new(3, 2, vec![vec![0, 0, 0], vec![1, 1, 1], vec![0, 1, 1]]).expect("fixture is well formed")
    }

    /// [`expdm_matching`] without the edge `(1, 1, 1)`: no perfect matching.
    pub fn expdm_no_matching() -> ExPDMInstance {
        ExPDMInstance::new(3, 2, vec![vec![0, 0, 0], vec![0, 1, 1]]).expect("fixture is well formed")
    }

    /// All six named instances, with `ex_ef1` at `c = 2`.
    pub fn all() -> Vec<(&'static str, Instance)> {
        vec![
            ("ex2", ex2()),
            ("ex_classic", ex_classic()),
            ("ex_ef1", ex_ef1(2)),
            ("ex_mms", ex_mms()),
            ("non_on", non_on()),
            ("fig1", fig1()),
        ]
    }

    pub fn by_name(name: &str) -> Option<Instance> {
        all().into_iter().find(|(n, _)| *n == name).map(|(_, inst)| inst)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    c: i64,
    num_agents: usize,
    num_items: usize,
    agents: Vec<ValuationSpec>,
}

/// Pretty JSON with object keys in sorted order.
pub fn to_json<T: Serialize>(value: &T) -> String {
    // serde_json's Value map is ordered, so a round trip sorts every key.
    let v = serde_json::to_value(value).expect("serializable");
    let mut text = serde_json::to_string_pretty(&v).expect("serializable");
    text.push('\n');
    text
}

pub fn instance_to_json(inst: &Instance) -> String {
    to_json(&InstanceDoc {
        c: inst.c(),
        num_agents: inst.num_agents(),
        num_items: inst.num_items(),
        agents: inst.valuations().to_vec(),
    })
}

fn parse_doc<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        location: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    })
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let doc: InstanceDoc = parse_doc(text)?;
    if doc.num_agents != doc.agents.len() {
        return Err(Error::InvalidInstance(format!(
            "num_agents is {} but {} agents are listed",
            doc.num_agents,
            doc.agents.len()
        )));
    }
    Instance::new(doc.c, doc.num_items, doc.agents)
}

pub fn allocation_to_json(alloc: &Allocation) -> String {
    to_json(alloc)
}

/// Parses an allocation and checks its shape against `inst`.
pub fn parse_allocation(text: &str, inst: &Instance) -> Result<Allocation> {
    let alloc: Allocation = parse_doc(text)?;
    if alloc.num_agents() != inst.num_agents() || alloc.num_items() != inst.num_items() {
        return Err(Error::InvalidInstance(format!(
            "allocation has {} bundles over {} items, instance has {} agents and {} items",
            alloc.num_agents(),
            alloc.num_items(),
            inst.num_agents(),
            inst.num_items()
        )));
    }
    Ok(alloc)
}

pub fn report_to_json(report: &crate::solver::SolveReport) -> String {
    to_json(report)
}

pub fn parse_report(text: &str) -> Result<crate::solver::SolveReport> {
    parse_doc(text)
}

pub fn read_file(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
