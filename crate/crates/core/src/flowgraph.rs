//! Explicit information flow graph for one stage of a protection problem and
//! an exact max-flow min-cut oracle over it.
//!
//! The graph follows the canonical failure order (highest node index fails
//! first; the problem is symmetric, so one order suffices). For the stage
//! where `m` nodes remain:
//!
//! * survivors `i = 1..=m` are chains
//!   `S -inf-> pre(i) -a_n-> v(i,n) -a_{n-1}-> ... -a_m-> fin(i) -inf-> DC`,
//!   one storage-capacity edge per stage the node lives through;
//! * each doomed node `d = m+1..=n` is a hub `x(d)` fed by `S` at infinite
//!   capacity, with a `beta_q` edge into every survivor's stage-`q` vertex
//!   for every exchange `q` the doomed node is still alive for (`q >= d`).
//!
//! Doomed nodes appear as infinitely supplied hubs: a sender's own storage
//! never caps its outgoing transmission edges here (the physical
//! `beta <= alpha` bound lives in the linear program). Under this reading the
//! finite cuts of the graph are exactly the enumerated cut family, which is
//! what makes this module an independent oracle for `cuts`. Doomed-to-doomed
//! transmissions are omitted: with infinite hub supply they can never lie on
//! a minimal cut.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Zero;

use crate::cuts::CutsError;
use crate::model::ProtectionPlan;
use crate::ratio::Rat;

/// Arc capacity: exact rational or the infinite sentinel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Capacity {
    Finite(Rat),
    Infinite,
}

impl fmt::Display for Capacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Capacity::Finite(c) => write!(f, "{c}"),
            Capacity::Infinite => f.write_str("inf"),
        }
    }
}

/// Vertex roles, kept as data so renderers can label them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vertex {
    Source,
    Collector,
    /// Survivor `node`'s entry point (its initial storage flows in here).
    SurvivorEntry { node: u32 },
    /// Survivor `node` during the exchange of stage `epoch`.
    SurvivorStage { node: u32, epoch: u32 },
    /// Survivor `node` once the final stage is reached.
    SurvivorExit { node: u32 },
    /// Doomed node `node`, as an infinitely supplied transmission hub.
    DoomedHub { node: u32 },
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::Source => f.write_str("S"),
            Vertex::Collector => f.write_str("DC"),
            Vertex::SurvivorEntry { node } => write!(f, "pre{node}"),
            Vertex::SurvivorStage { node, epoch } => write!(f, "n{node}e{epoch}"),
            Vertex::SurvivorExit { node } => write!(f, "fin{node}"),
            Vertex::DoomedHub { node } => write!(f, "x{node}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub capacity: Capacity,
}

/// Directed acyclic flow network with designated source and collector.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    vertices: Vec<Vertex>,
    arcs: Vec<Arc>,
    source: usize,
    sink: usize,
}

impl FlowNetwork {
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }
}

/// Builds the stage-`m` flow network for a plan.
pub fn build_flow_network(plan: &ProtectionPlan, m: u32) -> Result<FlowNetwork, CutsError> {
    let spec = plan.spec();
    let (n, k) = (spec.n(), spec.k());
    if m < k || m >= n {
        return Err(CutsError::StageOutOfRange { m, k, n });
    }

    let mut vertices = vec![Vertex::Source, Vertex::Collector];
    let mut arcs = Vec::new();
    let source = 0usize;
    let sink = 1usize;
    let push = |vertices: &mut Vec<Vertex>, v: Vertex| -> usize {
        vertices.push(v);
        vertices.len() - 1
    };

    // stage_vertex[(i - 1, n - q)] = survivor i's vertex at epoch q
    let epochs = (n - m) as usize;
    let mut stage_vertex = vec![0usize; m as usize * epochs];

    for i in 1..=m {
        let entry = push(&mut vertices, Vertex::SurvivorEntry { node: i });
        arcs.push(Arc {
            from: source,
            to: entry,
            capacity: Capacity::Infinite,
        });
        let mut prev = entry;
        for q in (m + 1..=n).rev() {
            let v = push(&mut vertices, Vertex::SurvivorStage { node: i, epoch: q });
            stage_vertex[(i - 1) as usize * epochs + (n - q) as usize] = v;
            // The edge into the epoch-q vertex carries what the node stores
            // while q nodes are alive.
            arcs.push(Arc {
                from: prev,
                to: v,
                capacity: Capacity::Finite(plan.alpha(q).clone()),
            });
            prev = v;
        }
        let exit = push(&mut vertices, Vertex::SurvivorExit { node: i });
        arcs.push(Arc {
            from: prev,
            to: exit,
            capacity: Capacity::Finite(plan.alpha(m).clone()),
        });
        arcs.push(Arc {
            from: exit,
            to: sink,
            capacity: Capacity::Infinite,
        });
    }

    for d in m + 1..=n {
        let hub = push(&mut vertices, Vertex::DoomedHub { node: d });
        arcs.push(Arc {
            from: source,
            to: hub,
            capacity: Capacity::Infinite,
        });
        // Node d exchanges in every epoch from the first (q = n) until its
        // own failure epoch (q = d).
        for q in d..=n {
            for i in 1..=m {
                arcs.push(Arc {
                    from: hub,
                    to: stage_vertex[(i - 1) as usize * epochs + (n - q) as usize],
                    capacity: Capacity::Finite(plan.beta(q).clone()),
                });
            }
        }
    }

    Ok(FlowNetwork {
        vertices,
        arcs,
        source,
        sink,
    })
}

/// Exact max-flow value (equals the min source/collector cut) by shortest
/// augmenting paths. Infinite capacities are materialized as the sum of all
/// finite capacities plus one, which no real cut can reach.
pub fn min_cut(net: &FlowNetwork) -> Rat {
    let mut finite_sum = Rat::zero();
    for arc in &net.arcs {
        if let Capacity::Finite(c) = &arc.capacity {
            finite_sum += c;
        }
    }
    let infinite = finite_sum + Rat::from_integer(1.into());

    // Paired residual edges: forward at even indices, reverse at odd.
    let nv = net.vertices.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nv];
    let mut to: Vec<usize> = Vec::with_capacity(net.arcs.len() * 2);
    let mut residual: Vec<Rat> = Vec::with_capacity(net.arcs.len() * 2);
    for arc in &net.arcs {
        let cap = match &arc.capacity {
            Capacity::Finite(c) => c.clone(),
            Capacity::Infinite => infinite.clone(),
        };
        adj[arc.from].push(to.len());
        to.push(arc.to);
        residual.push(cap);
        adj[arc.to].push(to.len());
        to.push(arc.from);
        residual.push(Rat::zero());
    }

    let mut flow = Rat::zero();
    let mut parent_edge = vec![usize::MAX; nv];
    loop {
        parent_edge.fill(usize::MAX);
        parent_edge[net.source] = usize::MAX - 1;
        let mut queue = alloc::collections::VecDeque::new();
        queue.push_back(net.source);
        'bfs: while let Some(u) = queue.pop_front() {
            for &e in &adj[u] {
                let v = to[e];
                if parent_edge[v] == usize::MAX && !residual[e].is_zero() {
                    parent_edge[v] = e;
                    if v == net.sink {
                        break 'bfs;
                    }
                    queue.push_back(v);
                }
            }
        }
        if parent_edge[net.sink] == usize::MAX {
            break;
        }
        // Bottleneck along the found path, then push.
        let mut bottleneck: Option<Rat> = None;
        let mut v = net.sink;
        while v != net.source {
            let e = parent_edge[v];
            if bottleneck.as_ref().is_none_or(|b| residual[e] < *b) {
                bottleneck = Some(residual[e].clone());
            }
            v = to[e ^ 1];
        }
        let push_amount = bottleneck.expect("path has at least one edge");
        let mut v = net.sink;
        while v != net.source {
            let e = parent_edge[v];
            residual[e] -= &push_amount;
            residual[e ^ 1] += &push_amount;
            v = to[e ^ 1];
        }
        flow += push_amount;
    }
    flow
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cuts::{cut_capacity, enumerate_stage_cuts};
    use crate::model::{ProblemSpec, ProtectionPlan, StrategyTag};
    use crate::rat;
    use alloc::collections::BTreeMap;
    use proptest::prelude::*;

    fn plan(
        n: u32,
        k: u32,
        alpha: &[(u32, Rat)],
        beta: &[(u32, Rat)],
    ) -> ProtectionPlan {
        ProtectionPlan::new(
            ProblemSpec::unit(n, k).unwrap(),
            alpha.iter().cloned().collect(),
            beta.iter().cloned().collect(),
            StrategyTag::Custom,
        )
        .unwrap()
    }

    #[test]
    fn six_five_minimum_storage_stage_is_exactly_one() {
        let p = plan(
            6,
            5,
            &[(6, rat(1, 6)), (5, rat(1, 5))],
            &[(6, rat(1, 30))],
        );
        let net = build_flow_network(&p, 5).unwrap();
        assert_eq!(min_cut(&net), rat(1, 1));
    }

    #[test]
    fn all_storage_no_transmission_bottlenecks_at_m() {
        let one = rat(1, 1);
        let p = plan(
            6,
            4,
            &[(6, one.clone()), (5, one.clone()), (4, one.clone())],
            &[(6, rat(0, 1)), (5, rat(0, 1))],
        );
        for m in [4u32, 5] {
            let net = build_flow_network(&p, m).unwrap();
            assert_eq!(min_cut(&net), rat(i64::from(m), 1));
        }
    }

    #[test]
    fn optimal_six_four_plan_covers_both_stages() {
        // Stage 4 is exactly tight; stage 5 carries slack (per survivor
        // min(1/6 + 1/24, 1/4) = 5/24, times five survivors).
        let p = crate::model::tests::op_64();
        let net4 = build_flow_network(&p, 4).unwrap();
        assert_eq!(min_cut(&net4), rat(1, 1));
        let net5 = build_flow_network(&p, 5).unwrap();
        assert_eq!(min_cut(&net5), rat(25, 24));
    }

    #[test]
    fn single_stage_network_arc_counts() {
        for n in [3u32, 6, 9] {
            let a = rat(1, i64::from(n));
            let p = plan(
                n,
                n - 1,
                &[(n, a.clone()), (n - 1, rat(1, i64::from(n - 1)))],
                &[(n, rat(1, i64::from(n) * i64::from(n - 1)))],
            );
            let net = build_flow_network(&p, n - 1).unwrap();
            let finite = net
                .arcs()
                .iter()
                .filter(|a| matches!(a.capacity, Capacity::Finite(_)))
                .count();
            // n-1 alpha_n arcs, n-1 alpha_{n-1} arcs, n-1 beta_n arcs.
            assert_eq!(finite, 3 * (n as usize - 1));
        }
    }

    #[test]
    fn six_four_hub_epochs() {
        let p = crate::model::tests::op_64();
        let net = build_flow_network(&p, 4).unwrap();
        let hub6 = net
            .vertices()
            .iter()
            .position(|v| *v == Vertex::DoomedHub { node: 6 })
            .unwrap();
        let hub5 = net
            .vertices()
            .iter()
            .position(|v| *v == Vertex::DoomedHub { node: 5 })
            .unwrap();
        let out_epochs = |hub: usize| -> Vec<u32> {
            let mut es: Vec<u32> = net
                .arcs()
                .iter()
                .filter(|a| a.from == hub)
                .map(|a| match net.vertices()[a.to] {
                    Vertex::SurvivorStage { epoch, .. } => epoch,
                    _ => panic!("hub arcs end on stage vertices"),
                })
                .collect();
            es.sort_unstable();
            es.dedup();
            es
        };
        assert_eq!(out_epochs(hub6), vec![6]);
        assert_eq!(out_epochs(hub5), vec![5, 6]);
    }

    #[test]
    fn networks_are_acyclic() {
        // Kahn's algorithm consumes every vertex iff there is no cycle.
        let p = crate::model::tests::op_64();
        for m in [4u32, 5] {
            let net = build_flow_network(&p, m).unwrap();
            let nv = net.vertices().len();
            let mut indegree = alloc::vec![0usize; nv];
            let mut out: alloc::vec::Vec<alloc::vec::Vec<usize>> =
                alloc::vec![alloc::vec::Vec::new(); nv];
            for arc in net.arcs() {
                indegree[arc.to] += 1;
                out[arc.from].push(arc.to);
            }
            let mut queue: alloc::collections::VecDeque<usize> = (0..nv)
                .filter(|&v| indegree[v] == 0)
                .collect();
            let mut seen = 0;
            while let Some(v) = queue.pop_front() {
                seen += 1;
                for &w in &out[v] {
                    indegree[w] -= 1;
                    if indegree[w] == 0 {
                        queue.push_back(w);
                    }
                }
            }
            assert_eq!(seen, nv, "stage {m}");
        }
    }

    #[test]
    fn min_cut_is_monotone_in_capacities() {
        let base = plan(
            6,
            4,
            &[(6, rat(1, 6)), (5, rat(1, 5)), (4, rat(1, 5))],
            &[(6, rat(1, 40)), (5, rat(1, 50))],
        );
        let bumped = plan(
            6,
            4,
            &[(6, rat(1, 6)), (5, rat(1, 5)), (4, rat(1, 5))],
            &[(6, rat(1, 40)), (5, rat(1, 30))],
        );
        for m in [4u32, 5] {
            let lo = min_cut(&build_flow_network(&base, m).unwrap());
            let hi = min_cut(&build_flow_network(&bumped, m).unwrap());
            assert!(hi >= lo);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        /// The max-flow oracle agrees exactly with the enumerated cut family
        /// on arbitrary (feasible or not) nonnegative plans.
        #[test]
        fn oracle_matches_enumeration(
            n in 3u32..=6,
            k_off in 0u32..5,
            nums in proptest::collection::vec(0i64..40, 12),
        ) {
            let k = 1 + k_off % (n - 1);
            let spec = ProblemSpec::unit(n, k).unwrap();
            let mut it = nums.into_iter();
            let mut draw = || rat(it.next().unwrap_or(1), 24);
            let alpha: BTreeMap<u32, Rat> = (k..=n).map(|m| (m, draw())).collect();
            let beta: BTreeMap<u32, Rat> = (k + 1..=n).map(|s| (s, draw())).collect();
            let p = ProtectionPlan::new(spec.clone(), alpha, beta, StrategyTag::Custom).unwrap();
            for m in k..n {
                let oracle = min_cut(&build_flow_network(&p, m).unwrap());
                let enumerated = enumerate_stage_cuts(&spec, m)
                    .unwrap()
                    .iter()
                    .map(|c| cut_capacity(c, &p).unwrap())
                    .min()
                    .unwrap();
                prop_assert_eq!(oracle, enumerated);
            }
        }
    }
}
