//! Switch-to-controller assignment as an exact min-cost flow.
//!
//! For a fixed controller set the assignment problem is a transportation
//! instance: each switch outside the set picks one in-island controller,
//! each controller hosts itself plus at most B-1 switches, and every
//! switch-controller edge costs the best catalog path under the active
//! objective. Successive shortest augmenting paths with potentials keep
//! all arithmetic rational and the outcome deterministic.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_traits::Zero;

use crate::model::Instance;
use crate::rational::Rational;
use crate::topology::NodeId;

use super::CostModel;

/// Total channel cost, the (switch, controller) pairs including controller
/// self-assignments, and the catalog index chosen for every real switch
/// channel.
pub(crate) type SwitchAssignment = (Rational, Vec<(NodeId, NodeId)>, Vec<((NodeId, NodeId), usize)>);

/// Full assignment for a controller set. None when the capacity B cannot
/// absorb all switches.
pub(crate) fn assign_switches(
    instance: &Instance,
    costs: &CostModel,
    subset: &[NodeId],
) -> Option<SwitchAssignment> {
    let catalog = instance.catalog();
    let switches: Vec<NodeId> = instance
        .net()
        .nodes()
        .filter(|n| !subset.contains(n))
        .collect();

    let mut assignment: Vec<(NodeId, NodeId)> = subset.iter().map(|&f| (f, f)).collect();
    if switches.is_empty() {
        return Some((Rational::zero(), assignment, Vec::new()));
    }

    // Each controller hosts itself; B-1 slots remain for other switches.
    let spare = instance.params().b - 1;
    let ns = switches.len();
    let nc = subset.len();
    let source = 0;
    let sink = ns + nc + 1;
    let mut flow = MinCostFlow::new(ns + nc + 2);
    let mut edge_arcs: Vec<(usize, usize, usize)> = Vec::new(); // (arc, switch idx, ctrl idx)
    for (si, &i) in switches.iter().enumerate() {
        flow.add_arc(source, 1 + si, 1, Rational::zero());
        for (ci, &f) in subset.iter().enumerate() {
            if catalog.within_latency(i, f) {
                let arc = flow.add_arc(1 + si, 1 + ns + ci, 1, costs.pair(instance, i, f).min_cost);
                edge_arcs.push((arc, si, ci));
            }
        }
    }
    for ci in 0..nc {
        flow.add_arc(1 + ns + ci, sink, spare, Rational::zero());
    }

    let pushed = flow.run(source, sink);
    if pushed != ns as u32 {
        return None;
    }

    let mut total = Rational::zero();
    let mut s2c = Vec::new();
    for &(arc, si, ci) in &edge_arcs {
        if flow.flow_on(arc) == 1 {
            let (i, f) = (switches[si], subset[ci]);
            let pair = costs.pair(instance, i, f);
            total += pair.min_cost;
            assignment.push((i, f));
            s2c.push(((i, f), pair.best_index));
        }
    }
    assignment.sort();
    s2c.sort();
    Some((total, assignment, s2c))
}

struct Arc {
    to: usize,
    cap: u32,
    cost: Rational,
}

/// Min-cost max-flow with rational costs; arc 2i+1 mirrors arc 2i.
struct MinCostFlow {
    adj: Vec<Vec<usize>>,
    arcs: Vec<Arc>,
}

impl MinCostFlow {
    fn new(nodes: usize) -> Self {
        MinCostFlow {
            adj: vec![Vec::new(); nodes],
            arcs: Vec::new(),
        }
    }

    fn add_arc(&mut self, from: usize, to: usize, cap: u32, cost: Rational) -> usize {
        let id = self.arcs.len();
        self.adj[from].push(id);
        self.arcs.push(Arc { to, cap, cost });
        self.adj[to].push(id + 1);
        self.arcs.push(Arc {
            to: from,
            cap: 0,
            cost: -cost,
        });
        id
    }

    fn flow_on(&self, arc: usize) -> u32 {
        self.arcs[arc ^ 1].cap
    }

    /// Successive shortest paths under Johnson potentials; original costs
    /// are nonnegative so the initial zero potential is valid.
    fn run(&mut self, source: usize, sink: usize) -> u32 {
        let n = self.adj.len();
        let mut potential = vec![Rational::zero(); n];
        let mut total = 0u32;
        loop {
            let mut dist: Vec<Option<Rational>> = vec![None; n];
            let mut parent: Vec<Option<usize>> = vec![None; n];
            let mut heap = BinaryHeap::new();
            dist[source] = Some(Rational::zero());
            heap.push(Reverse((Rational::zero(), source)));
            while let Some(Reverse((d, u))) = heap.pop() {
                if dist[u].as_ref() != Some(&d) {
                    continue;
                }
                for &arc in &self.adj[u] {
                    let a = &self.arcs[arc];
                    if a.cap == 0 {
                        continue;
                    }
                    let reduced = d + a.cost + potential[u] - potential[a.to];
                    let better = match &dist[a.to] {
                        None => true,
                        Some(cur) => reduced < *cur,
                    };
                    if better {
                        dist[a.to] = Some(reduced);
                        parent[a.to] = Some(arc);
                        heap.push(Reverse((reduced, a.to)));
                    }
                }
            }
            if dist[sink].is_none() {
                return total;
            }
            for v in 0..n {
                if let Some(d) = &dist[v] {
                    potential[v] += d;
                }
            }
            let mut bottleneck = u32::MAX;
            let mut v = sink;
            while let Some(arc) = parent[v] {
                bottleneck = bottleneck.min(self.arcs[arc].cap);
                v = self.arcs[arc ^ 1].to;
            }
            let mut v = sink;
            while let Some(arc) = parent[v] {
                self.arcs[arc].cap -= bottleneck;
                self.arcs[arc ^ 1].cap += bottleneck;
                v = self.arcs[arc ^ 1].to;
            }
            total += bottleneck;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_instance;
    use crate::model::Objective;

    const STAR: &str = r#"
format = "cnm-instance/1"

[params]
k = 1
q = 1
B = 3
latency_hops = 2
catalog_K = 2

[network]
nodes = 6
datacenters = [1, 2]
links = [[1, 2], [1, 3], [1, 4], [2, 5], [2, 6], [3, 5]]
"#;

    fn setup(text: &str, objective: Objective) -> (Instance, CostModel) {
        let instance = parse_instance(text).unwrap();
        let costs = CostModel::build(&instance, objective);
        (instance, costs)
    }

    /// Brute-force minimum assignment cost over every capacity-respecting
    /// controller choice vector.
    fn oracle_cost(
        instance: &Instance,
        costs: &CostModel,
        subset: &[NodeId],
    ) -> Option<Rational> {
        let catalog = instance.catalog();
        let switches: Vec<NodeId> = instance
            .net()
            .nodes()
            .filter(|n| !subset.contains(n))
            .collect();
        let spare = instance.params().b - 1;
        let mut best: Option<Rational> = None;
        let mut loads = vec![0u32; subset.len()];
        #[allow(clippy::too_many_arguments)]
        fn recurse(
            instance: &Instance,
            costs: &CostModel,
            subset: &[NodeId],
            switches: &[NodeId],
            spare: u32,
            loads: &mut Vec<u32>,
            acc: Rational,
            at: usize,
            best: &mut Option<Rational>,
            catalog: &crate::topology::PathCatalog,
        ) {
            if at == switches.len() {
                if best.as_ref().map(|b| acc < *b).unwrap_or(true) {
                    *best = Some(acc);
                }
                return;
            }
            let i = switches[at];
            for (ci, &f) in subset.iter().enumerate() {
                if loads[ci] < spare && catalog.within_latency(i, f) {
                    loads[ci] += 1;
                    let cost = costs.pair(instance, i, f).min_cost;
                    recurse(
                        instance, costs, subset, switches, spare, loads,
                        acc + cost, at + 1, best, catalog,
                    );
                    loads[ci] -= 1;
                }
            }
        }
        recurse(
            instance, costs, subset, &switches, spare, &mut loads,
            Rational::zero(), 0, &mut best, catalog,
        );
        best
    }

    #[test]
    fn matches_exhaustive_minimum() {
        let (instance, costs) = setup(STAR, Objective::MinResource);
        let subset = [NodeId(1), NodeId(2)];
        let (cost, assignment, s2c) =
            assign_switches(&instance, &costs, &subset).expect("feasible");
        assert_eq!(cost, oracle_cost(&instance, &costs, &subset).unwrap());
        assert_eq!(assignment.len(), 6);
        assert_eq!(s2c.len(), 4);
        for &(f, g) in assignment.iter().take(2) {
            assert_eq!(f, g);
        }
    }

    #[test]
    fn capacity_binds() {
        // B = 3 leaves two spare slots per controller: the four switches
        // must split exactly two and two.
        let (instance, costs) = setup(STAR, Objective::MinResource);
        let subset = [NodeId(1), NodeId(2)];
        let (_, assignment, _) = assign_switches(&instance, &costs, &subset).unwrap();
        for &f in &subset {
            let hosted = assignment.iter().filter(|&&(_, g)| g == f).count();
            assert_eq!(hosted, instance.params().b as usize);
        }
    }

    #[test]
    fn infeasible_when_capacity_short() {
        let (instance, costs) = setup(STAR, Objective::MinResource);
        // A single controller has two spare slots for five switches.
        assert!(assign_switches(&instance, &costs, &[NodeId(1)]).is_none());
    }

    #[test]
    fn risk_objective_prefers_safe_paths() {
        const RISKY: &str = r#"
format = "cnm-instance/1"

[params]
k = 1
q = 1
B = 5
latency_hops = 3
catalog_K = 3

[network]
nodes = 4
datacenters = [1]
links = [[1, 2], [2, 4], [1, 3], [3, 4]]

[[disaster]]
id = "east"
failed_nodes = [2]
p_occurrence = "1"
p_conditional = "1"
"#;
        let (instance, costs) = setup(RISKY, Objective::MinRisk);
        let subset = [NodeId(1)];
        let (cost, _, s2c) = assign_switches(&instance, &costs, &subset).unwrap();
        // Node 4 must route via 3 to dodge the certain failure of node 2;
        // node 2 itself cannot dodge and contributes risk 1.
        assert_eq!(cost, Rational::from_integer(1));
        let four = s2c
            .iter()
            .find(|((i, _), _)| *i == NodeId(4))
            .expect("node 4 assigned");
        let path = instance
            .catalog()
            .oriented_path(NodeId(4), NodeId(1), four.1)
            .unwrap();
        assert!(!path.nodes().contains(&NodeId(2)));
    }
}
