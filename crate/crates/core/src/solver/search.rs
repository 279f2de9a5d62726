//! Virtual mesh enumeration and path mapping per controller set.
//!
//! Meshes are subsets of controller pairs enumerated in lexicographic
//! prefix order; only two-edge-connected spanning meshes reach the path
//! stage, which branches over catalog indices link by link. Both stages
//! share one incumbent and prune on the remaining-minimum bound; ties
//! always lose to the incumbent, so the first optimum found in
//! enumeration order is the one reported, which makes the tie order
//! (mesh, then path indices) an enumeration property rather than a
//! post-hoc sort.

use num_traits::Zero;

use crate::model::Instance;
use crate::rational::Rational;
use crate::topology::{Link, NodeId};

use super::{CostModel, PairCosts};

pub(crate) struct FoundMesh {
    /// Mesh mapping cost only; the caller adds the assignment cost.
    pub value: Rational,
    pub mesh: Vec<Link>,
    pub indices: Vec<usize>,
}

pub(crate) struct SearchResult {
    pub best: Option<FoundMesh>,
    pub nodes: u64,
    pub exhausted: bool,
    /// Whether any two-edge-connected spanning mesh was seen at all;
    /// distinguishes redundancy infeasibility from survivability.
    pub any_redundant_mesh: bool,
}

struct ZoneCtx {
    /// Original zone index into per-pair survival rows.
    zone: usize,
    /// Controllers (as subset positions) alive in this zone.
    survivors: Vec<usize>,
    alive: Vec<bool>,
}

struct Search<'a> {
    pairs: Vec<Link>,
    ends: Vec<(usize, usize)>,
    costs: Vec<&'a PairCosts>,
    zones: Vec<ZoneCtx>,
    member_count: usize,
    budget: u64,
    nodes: u64,
    exhausted: bool,
    any_redundant_mesh: bool,
    incumbent: Option<FoundMesh>,
}

pub(crate) fn search_mesh(
    instance: &Instance,
    costs: &CostModel,
    subset: &[NodeId],
    node_budget: u64,
) -> SearchResult {
    debug_assert!(subset.len() >= 2);
    let mut pairs = Vec::new();
    let mut ends = Vec::new();
    let mut pair_costs = Vec::new();
    for a in 0..subset.len() {
        for b in a + 1..subset.len() {
            pairs.push(Link::new(subset[a], subset[b]));
            ends.push((a, b));
            pair_costs.push(costs.pair(instance, subset[a], subset[b]));
        }
    }

    let zones = instance
        .disasters()
        .zones()
        .iter()
        .enumerate()
        .filter_map(|(z, zone)| {
            let alive: Vec<bool> = subset.iter().map(|&f| !zone.node_failed(f)).collect();
            let survivors: Vec<usize> =
                (0..subset.len()).filter(|&i| alive[i]).collect();
            (survivors.len() >= 2).then_some(ZoneCtx {
                zone: z,
                survivors,
                alive,
            })
        })
        .collect();

    let mut search = Search {
        pairs,
        ends,
        costs: pair_costs,
        zones,
        member_count: subset.len(),
        budget: node_budget,
        nodes: 0,
        exhausted: false,
        any_redundant_mesh: false,
        incumbent: None,
    };
    let mut chosen = Vec::new();
    search.grow(&mut chosen, 0, Rational::zero());
    SearchResult {
        best: search.incumbent,
        nodes: search.nodes,
        exhausted: search.exhausted,
        any_redundant_mesh: search.any_redundant_mesh,
    }
}

impl<'a> Search<'a> {
    fn spend(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
        }
        self.exhausted
    }

    fn pruned(&self, bound: &Rational) -> bool {
        match &self.incumbent {
            Some(inc) => *bound >= inc.value,
            None => false,
        }
    }

    /// Lexicographic subset growth; `floor` is the sum of minimum path
    /// costs over the chosen pairs, a lower bound for the whole subtree.
    fn grow(&mut self, chosen: &mut Vec<usize>, start: usize, floor: Rational) {
        for idx in start..self.pairs.len() {
            if self.exhausted {
                return;
            }
            chosen.push(idx);
            let next_floor = floor + self.costs[idx].min_cost;
            if !self.spend() && !self.pruned(&next_floor) {
                if self.two_edge_connected(chosen) {
                    self.any_redundant_mesh = true;
                    self.map_paths(chosen);
                }
                self.grow(chosen, idx + 1, next_floor);
            }
            chosen.pop();
        }
    }

    fn two_edge_connected(&self, mesh: &[usize]) -> bool {
        let n = self.member_count;
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (e, &idx) in mesh.iter().enumerate() {
            let (a, b) = self.ends[idx];
            adj[a].push((b, e));
            adj[b].push((a, e));
        }
        if adj.iter().any(|d| d.len() < 2) {
            return false;
        }
        // Iterative lowlink; a bridge or unreached vertex disqualifies.
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut timer = 0;
        let mut stack: Vec<(usize, usize, usize)> = vec![(0, usize::MAX, 0)];
        disc[0] = 0;
        low[0] = 0;
        timer += 1;
        while let Some(&mut (u, via, ref mut next)) = stack.last_mut() {
            if *next < adj[u].len() {
                let (v, e) = adj[u][*next];
                *next += 1;
                if e == via {
                    continue;
                }
                if disc[v] == usize::MAX {
                    disc[v] = timer;
                    low[v] = timer;
                    timer += 1;
                    stack.push((v, e, 0));
                } else {
                    low[u] = low[u].min(disc[v]);
                }
            } else {
                stack.pop();
                if let Some(&mut (p, _, _)) = stack.last_mut() {
                    if low[u] > disc[p] {
                        return false; // bridge p-u
                    }
                    low[p] = low[p].min(low[u]);
                }
            }
        }
        disc.iter().all(|&d| d != usize::MAX)
    }

    fn map_paths(&mut self, mesh: &[usize]) {
        let len = mesh.len();
        let mut suffix = vec![Rational::zero(); len + 1];
        for at in (0..len).rev() {
            suffix[at] = suffix[at + 1] + self.costs[mesh[at]].min_cost;
        }
        let mut indices = vec![0usize; len];
        self.place(mesh, 0, Rational::zero(), &suffix, &mut indices);
    }

    fn place(
        &mut self,
        mesh: &[usize],
        at: usize,
        acc: Rational,
        suffix: &[Rational],
        indices: &mut Vec<usize>,
    ) {
        if self.spend() {
            return;
        }
        let bound = acc + suffix[at];
        if self.pruned(&bound) || !self.survivors_connected(mesh, indices, at) {
            return;
        }
        if at == mesh.len() {
            // Reaching a leaf past the bound check means strict improvement.
            self.incumbent = Some(FoundMesh {
                value: acc,
                mesh: mesh.iter().map(|&idx| self.pairs[idx]).collect(),
                indices: indices.clone(),
            });
            return;
        }
        for idx in 0..self.costs[mesh[at]].costs.len() {
            if self.exhausted {
                return;
            }
            indices[at] = idx;
            let cost = acc + self.costs[mesh[at]].costs[idx];
            self.place(mesh, at + 1, cost, suffix, indices);
        }
    }

    /// Per-zone connectivity of surviving controllers over the mesh,
    /// optimistic for links whose path is not fixed yet: they count as
    /// alive when any catalog path for the pair survives. Exact at leaves.
    fn survivors_connected(&self, mesh: &[usize], indices: &[usize], fixed: usize) -> bool {
        self.zones.iter().all(|ctx| {
            let mut dsu = Dsu::new(self.member_count);
            for (pos, &idx) in mesh.iter().enumerate() {
                let (a, b) = self.ends[idx];
                if !ctx.alive[a] || !ctx.alive[b] {
                    continue;
                }
                let ok = if pos < fixed {
                    self.costs[idx].survives[indices[pos]][ctx.zone]
                } else {
                    self.costs[idx].any_survivor[ctx.zone]
                };
                if ok {
                    dsu.union(a, b);
                }
            }
            let root = dsu.find(ctx.survivors[0]);
            ctx.survivors.iter().all(|&s| dsu.find(s) == root)
        })
    }
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
