//! Physical substrate: network graph, hop distances, loopless k-shortest
//! paths, and the per-pair path catalog with reachability islands.

use std::collections::{BTreeSet, BinaryHeap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

/// A physical node, numbered densely from 1.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An undirected physical or virtual link, stored with endpoints ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Link {
    lo: NodeId,
    hi: NodeId,
}

impl Link {
    /// Normalizes endpoint order. Panics on self-loops, which no caller
    /// constructs from validated input.
    pub fn new(a: NodeId, b: NodeId) -> Self {
        assert!(a != b, "self-loop {a}-{b}");
        if a < b {
            Link { lo: a, hi: b }
        } else {
            Link { lo: b, hi: a }
        }
    }

    pub fn lo(&self) -> NodeId {
        self.lo
    }

    pub fn hi(&self) -> NodeId {
        self.hi
    }

    pub fn endpoints(&self) -> (NodeId, NodeId) {
        (self.lo, self.hi)
    }

    pub fn touches(&self, n: NodeId) -> bool {
        self.lo == n || self.hi == n
    }

    pub fn other(&self, n: NodeId) -> NodeId {
        if self.lo == n {
            self.hi
        } else {
            self.lo
        }
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum TopologyError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate link {0}")]
    DuplicateLink(Link),
    #[error("graph is not connected: node {0} is unreachable from node {1}")]
    Disconnected(NodeId, NodeId),
    #[error("network must have at least one node")]
    Empty,
    #[error("datacenter set references unknown node {0}")]
    UnknownDatacenter(NodeId),
}

/// The substrate graph G(N, E) with the datacenter-attached node set F.
///
/// Links are stored undirected; each is interpreted as a pair of directed
/// arcs wherever a formulation needs directions, and both directions of a
/// node pair share the one physical link for resource counting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhysicalNetwork {
    node_count: u32,
    datacenters: BTreeSet<NodeId>,
    links: BTreeSet<Link>,
    adjacency: Vec<Vec<NodeId>>,
}

impl PhysicalNetwork {
    /// Builds and validates a network over nodes 1..=node_count.
    pub fn new(
        node_count: u32,
        datacenters: impl IntoIterator<Item = NodeId>,
        links: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<Self, TopologyError> {
        if node_count == 0 {
            return Err(TopologyError::Empty);
        }
        let in_range = |n: NodeId| n.0 >= 1 && n.0 <= node_count;
        let mut link_set = BTreeSet::new();
        for (a, b) in links {
            if !in_range(a) {
                return Err(TopologyError::UnknownNode(a));
            }
            if !in_range(b) {
                return Err(TopologyError::UnknownNode(b));
            }
            if a == b {
                return Err(TopologyError::SelfLoop(a));
            }
            let link = Link::new(a, b);
            if !link_set.insert(link) {
                return Err(TopologyError::DuplicateLink(link));
            }
        }
        let mut dc_set = BTreeSet::new();
        for d in datacenters {
            if !in_range(d) {
                return Err(TopologyError::UnknownDatacenter(d));
            }
            dc_set.insert(d);
        }
        let mut adjacency = vec![Vec::new(); node_count as usize + 1];
        for link in &link_set {
            adjacency[link.lo.0 as usize].push(link.hi);
            adjacency[link.hi.0 as usize].push(link.lo);
        }
        for neighbors in &mut adjacency {
            neighbors.sort_unstable();
        }
        let net = PhysicalNetwork {
            node_count,
            datacenters: dc_set,
            links: link_set,
            adjacency,
        };
        // Connectivity is a construction-time guarantee for every consumer.
        let start = NodeId(1);
        let dist = net.bfs_distances(start, &NoFilter);
        for n in net.nodes() {
            if dist[n.0 as usize].is_none() {
                return Err(TopologyError::Disconnected(n, start));
            }
        }
        Ok(net)
    }

    pub fn node_count(&self) -> u32 {
        self.node_count
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (1..=self.node_count).map(NodeId)
    }

    pub fn contains(&self, n: NodeId) -> bool {
        n.0 >= 1 && n.0 <= self.node_count
    }

    pub fn datacenters(&self) -> &BTreeSet<NodeId> {
        &self.datacenters
    }

    pub fn is_datacenter(&self, n: NodeId) -> bool {
        self.datacenters.contains(&n)
    }

    pub fn links(&self) -> &BTreeSet<Link> {
        &self.links
    }

    pub fn has_link(&self, a: NodeId, b: NodeId) -> bool {
        a != b && self.links.contains(&Link::new(a, b))
    }

    pub fn neighbors(&self, n: NodeId) -> &[NodeId] {
        &self.adjacency[n.0 as usize]
    }

    /// Shortest-path hop distance between two nodes; 0 when `i == j`.
    pub fn hop_distance(&self, i: NodeId, j: NodeId) -> u32 {
        assert!(self.contains(i), "unknown node {i}");
        assert!(self.contains(j), "unknown node {j}");
        let dist = self.bfs_distances(j, &NoFilter);
        dist[i.0 as usize].expect("connected graph")
    }

    /// Up to `k` loopless shortest paths from `i` to `j`, ordered by
    /// (hop count, lexicographic node sequence).
    pub fn k_shortest_paths(&self, i: NodeId, j: NodeId, k: usize) -> Vec<Path> {
        assert!(i != j, "path endpoints must differ");
        assert!(k >= 1, "k must be at least 1");
        yen_k_shortest(self, i, j, k)
    }

    fn bfs_distances(&self, target: NodeId, filter: &dyn SearchFilter) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.node_count as usize + 1];
        if filter.node_banned(target) {
            return dist;
        }
        dist[target.0 as usize] = Some(0);
        let mut queue = VecDeque::new();
        queue.push_back(target);
        while let Some(u) = queue.pop_front() {
            let du = dist[u.0 as usize].unwrap();
            for &v in self.neighbors(u) {
                if filter.node_banned(v) || filter.edge_banned(u, v) {
                    continue;
                }
                if dist[v.0 as usize].is_none() {
                    dist[v.0 as usize] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Lexicographically smallest shortest path from `from` to `to` on the
    /// filtered graph, or None when unreachable.
    fn lex_shortest_path(
        &self,
        from: NodeId,
        to: NodeId,
        filter: &dyn SearchFilter,
    ) -> Option<Vec<NodeId>> {
        let dist_to_target = self.bfs_distances(to, filter);
        dist_to_target[from.0 as usize]?;
        if filter.node_banned(from) {
            return None;
        }
        let mut nodes = vec![from];
        let mut current = from;
        while current != to {
            let remaining = dist_to_target[current.0 as usize].unwrap();
            // Neighbors are sorted, so the first admissible step on a
            // shortest path is the lexicographic minimum.
            let next = self
                .neighbors(current)
                .iter()
                .copied()
                .find(|&v| {
                    !filter.node_banned(v)
                        && !filter.edge_banned(current, v)
                        && dist_to_target[v.0 as usize] == Some(remaining - 1)
                })
                .expect("distance map admits a next hop");
            nodes.push(next);
            current = next;
        }
        Some(nodes)
    }
}

trait SearchFilter {
    fn node_banned(&self, n: NodeId) -> bool;
    fn edge_banned(&self, from: NodeId, to: NodeId) -> bool;
}

struct NoFilter;

impl SearchFilter for NoFilter {
    fn node_banned(&self, _: NodeId) -> bool {
        false
    }
    fn edge_banned(&self, _: NodeId, _: NodeId) -> bool {
        false
    }
}

struct YenFilter<'a> {
    banned_nodes: &'a BTreeSet<NodeId>,
    banned_edges: &'a BTreeSet<(NodeId, NodeId)>,
}

impl SearchFilter for YenFilter<'_> {
    fn node_banned(&self, n: NodeId) -> bool {
        self.banned_nodes.contains(&n)
    }
    fn edge_banned(&self, from: NodeId, to: NodeId) -> bool {
        self.banned_edges.contains(&(from, to)) || self.banned_edges.contains(&(to, from))
    }
}

/// A simple path over the substrate, ordered from source to destination.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    nodes: Vec<NodeId>,
}

impl Path {
    pub fn new(nodes: Vec<NodeId>) -> Self {
        debug_assert!(nodes.len() >= 2, "a path needs two endpoints");
        debug_assert!(
            nodes.iter().collect::<BTreeSet<_>>().len() == nodes.len(),
            "path must be simple"
        );
        Path { nodes }
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn source(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn target(&self) -> NodeId {
        *self.nodes.last().unwrap()
    }

    /// Hop count.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> u32 {
        (self.nodes.len() - 1) as u32
    }

    pub fn links(&self) -> impl Iterator<Item = Link> + '_ {
        self.nodes.windows(2).map(|w| Link::new(w[0], w[1]))
    }

    pub fn reversed(&self) -> Path {
        let mut nodes = self.nodes.clone();
        nodes.reverse();
        Path { nodes }
    }

    pub fn is_valid_on(&self, net: &PhysicalNetwork) -> bool {
        self.nodes.len() >= 2
            && self.nodes.iter().all(|&n| net.contains(n))
            && self.nodes.windows(2).all(|w| net.has_link(w[0], w[1]))
            && self.nodes.iter().collect::<BTreeSet<_>>().len() == self.nodes.len()
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for n in &self.nodes {
            if !first {
                write!(f, "-")?;
            }
            write!(f, "{n}")?;
            first = false;
        }
        Ok(())
    }
}

/// Yen's loopless k-shortest-path search specialized to unit hop costs,
/// with candidate order (hop count, lexicographic node sequence) so the
/// output is platform-independent.
fn yen_k_shortest(net: &PhysicalNetwork, from: NodeId, to: NodeId, k: usize) -> Vec<Path> {
    #[derive(PartialEq, Eq)]
    struct Candidate(Vec<NodeId>);

    impl Candidate {
        fn key(&self) -> (usize, &[NodeId]) {
            (self.0.len(), &self.0)
        }
    }

    impl Ord for Candidate {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            // BinaryHeap is a max-heap; reverse for a min-heap on the key.
            other.key().cmp(&self.key())
        }
    }

    impl PartialOrd for Candidate {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }

    let first = match net.lex_shortest_path(from, to, &NoFilter) {
        Some(p) => p,
        None => return Vec::new(),
    };
    let mut routes: Vec<Vec<NodeId>> = vec![first];
    let mut candidates: BinaryHeap<Candidate> = BinaryHeap::new();
    let mut seen: BTreeSet<Vec<NodeId>> = BTreeSet::new();
    seen.insert(routes[0].clone());

    while routes.len() < k {
        let previous = routes.last().unwrap().clone();
        for spur_idx in 0..previous.len() - 1 {
            let spur_node = previous[spur_idx];
            let root = &previous[..=spur_idx];

            let mut banned_edges = BTreeSet::new();
            for route in &routes {
                if route.len() > spur_idx + 1 && route[..=spur_idx] == *root {
                    banned_edges.insert((route[spur_idx], route[spur_idx + 1]));
                }
            }
            let banned_nodes: BTreeSet<NodeId> = root[..spur_idx].iter().copied().collect();
            let filter = YenFilter {
                banned_nodes: &banned_nodes,
                banned_edges: &banned_edges,
            };
            if let Some(spur) = net.lex_shortest_path(spur_node, to, &filter) {
                let mut total: Vec<NodeId> = root[..spur_idx].to_vec();
                total.extend(spur);
                if seen.insert(total.clone()) {
                    candidates.push(Candidate(total));
                }
            }
        }
        match candidates.pop() {
            Some(Candidate(next)) => routes.push(next),
            None => break,
        }
    }

    routes.into_iter().map(Path::new).collect()
}

/// Precomputed per-pair candidate paths plus the reachability matrix.
///
/// Paths are stored once per unordered pair, oriented from the smaller
/// endpoint; the view for the opposite direction is the element-wise
/// reversal, so a path index means the same physical route regardless of
/// the direction it is queried in.
#[derive(Debug, Clone)]
pub struct PathCatalog {
    catalog_size: u32,
    latency_limit: u32,
    per_pair: Vec<Vec<Path>>,
    distances: Vec<Vec<u32>>,
    node_count: u32,
}

impl PathCatalog {
    /// Enumerates up to `catalog_size` shortest paths for every node pair
    /// and the hop-distance / reachability matrices with limit
    /// `latency_limit`.
    pub fn build(net: &PhysicalNetwork, catalog_size: u32, latency_limit: u32) -> Self {
        assert!(catalog_size >= 1, "catalog size must be at least 1");
        let n = net.node_count;
        let mut distances = vec![vec![0u32; n as usize + 1]; n as usize + 1];
        for j in net.nodes() {
            let dist = net.bfs_distances(j, &NoFilter);
            for i in net.nodes() {
                distances[i.0 as usize][j.0 as usize] = dist[i.0 as usize].expect("connected");
            }
        }
        let mut per_pair = Vec::new();
        for i in net.nodes() {
            for j in net.nodes() {
                if i < j {
                    per_pair.push(net.k_shortest_paths(i, j, catalog_size as usize));
                }
            }
        }
        PathCatalog {
            catalog_size,
            latency_limit,
            per_pair,
            distances,
            node_count: n,
        }
    }

    pub fn catalog_size(&self) -> u32 {
        self.catalog_size
    }

    pub fn latency_limit(&self) -> u32 {
        self.latency_limit
    }

    pub fn node_count(&self) -> u32 {
        self.node_count
    }

    fn pair_slot(&self, link: Link) -> usize {
        let n = self.node_count as usize;
        let lo = link.lo().0 as usize - 1;
        let hi = link.hi().0 as usize - 1;
        // Index into the flattened upper triangle.
        lo * n - lo * (lo + 1) / 2 + (hi - lo - 1)
    }

    pub(crate) fn pair_slot_of(&self, a: NodeId, b: NodeId) -> usize {
        self.pair_slot(Link::new(a, b))
    }

    /// Candidate paths for the unordered pair, oriented lo -> hi.
    pub fn paths(&self, a: NodeId, b: NodeId) -> &[Path] {
        &self.per_pair[self.pair_slot(Link::new(a, b))]
    }

    /// Number of stored candidates for a pair.
    pub fn path_count(&self, a: NodeId, b: NodeId) -> usize {
        self.paths(a, b).len()
    }

    /// The indexed path oriented from `from` to `to`.
    pub fn oriented_path(&self, from: NodeId, to: NodeId, index: usize) -> Option<Path> {
        let stored = self.paths(from, to).get(index)?;
        if stored.source() == from {
            Some(stored.clone())
        } else {
            Some(stored.reversed())
        }
    }

    pub fn hop_distance(&self, i: NodeId, j: NodeId) -> u32 {
        self.distances[i.0 as usize][j.0 as usize]
    }

    /// The reachability-island indicator: true iff `j` lies within the
    /// latency limit of `i` (always true on the diagonal).
    pub fn within_latency(&self, i: NodeId, j: NodeId) -> bool {
        self.hop_distance(i, j) <= self.latency_limit
    }

    pub fn pairs(&self) -> impl Iterator<Item = Link> + '_ {
        let n = self.node_count;
        (1..=n).flat_map(move |i| (i + 1..=n).map(move |j| Link::new(NodeId(i), NodeId(j))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(ns: &[u32]) -> Vec<NodeId> {
        ns.iter().map(|&n| NodeId(n)).collect()
    }

    fn triangle() -> PhysicalNetwork {
        PhysicalNetwork::new(
            3,
            [NodeId(1)],
            [
                (NodeId(1), NodeId(2)),
                (NodeId(2), NodeId(3)),
                (NodeId(1), NodeId(3)),
            ],
        )
        .unwrap()
    }

    fn line3() -> PhysicalNetwork {
        PhysicalNetwork::new(
            3,
            [],
            [(NodeId(1), NodeId(2)), (NodeId(2), NodeId(3))],
        )
        .unwrap()
    }

    #[test]
    fn triangle_is_valid() {
        let net = triangle();
        assert_eq!(net.node_count(), 3);
        assert_eq!(net.links().len(), 3);
        assert!(net.is_datacenter(NodeId(1)));
        assert!(!net.is_datacenter(NodeId(2)));
    }

    #[test]
    fn rejects_unknown_nodes_and_duplicates() {
        let err = PhysicalNetwork::new(3, [], [(NodeId(1), NodeId(99))]).unwrap_err();
        assert_eq!(err, TopologyError::UnknownNode(NodeId(99)));
        let err = PhysicalNetwork::new(
            3,
            [],
            [
                (NodeId(1), NodeId(2)),
                (NodeId(2), NodeId(3)),
                (NodeId(3), NodeId(2)),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, TopologyError::DuplicateLink(_)));
    }

    #[test]
    fn rejects_disconnected_graph() {
        let err =
            PhysicalNetwork::new(4, [], [(NodeId(1), NodeId(2)), (NodeId(3), NodeId(4))])
                .unwrap_err();
        assert!(matches!(err, TopologyError::Disconnected(_, _)));
    }

    #[test]
    fn single_node_network_is_connected() {
        let net = PhysicalNetwork::new(1, [NodeId(1)], []).unwrap();
        assert_eq!(net.node_count(), 1);
        assert_eq!(net.hop_distance(NodeId(1), NodeId(1)), 0);
    }

    #[test]
    fn hop_distance_on_line() {
        let net = line3();
        assert_eq!(net.hop_distance(NodeId(1), NodeId(3)), 2);
        assert_eq!(net.hop_distance(NodeId(2), NodeId(2)), 0);
        assert_eq!(net.hop_distance(NodeId(3), NodeId(1)), 2);
    }

    #[test]
    fn triangle_k_shortest() {
        let net = triangle();
        let paths = net.k_shortest_paths(NodeId(1), NodeId(3), 2);
        assert_eq!(paths.len(), 2);
        assert_eq!(paths[0].nodes(), ids(&[1, 3]).as_slice());
        assert_eq!(paths[1].nodes(), ids(&[1, 2, 3]).as_slice());
    }

    #[test]
    fn line_has_single_simple_path() {
        let net = line3();
        let paths = net.k_shortest_paths(NodeId(1), NodeId(3), 3);
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].nodes(), ids(&[1, 2, 3]).as_slice());
    }

    #[test]
    fn four_cycle_breaks_ties_lexicographically() {
        let net = PhysicalNetwork::new(
            4,
            [],
            [
                (NodeId(1), NodeId(2)),
                (NodeId(2), NodeId(3)),
                (NodeId(3), NodeId(4)),
                (NodeId(4), NodeId(1)),
            ],
        )
        .unwrap();
        let paths = net.k_shortest_paths(NodeId(1), NodeId(3), 2);
        assert_eq!(paths.len(), 2);
        assert_eq!(paths[0].nodes(), ids(&[1, 2, 3]).as_slice());
        assert_eq!(paths[1].nodes(), ids(&[1, 4, 3]).as_slice());
    }

    #[test]
    fn catalog_reach_identity_at_zero_limit() {
        let net = triangle();
        let catalog = PathCatalog::build(&net, 2, 0);
        for i in net.nodes() {
            for j in net.nodes() {
                assert_eq!(catalog.within_latency(i, j), i == j);
            }
        }
    }

    #[test]
    fn catalog_reach_full_at_diameter() {
        let net = line3();
        let catalog = PathCatalog::build(&net, 2, 2);
        for i in net.nodes() {
            for j in net.nodes() {
                assert!(catalog.within_latency(i, j));
            }
        }
    }

    #[test]
    fn catalog_orients_paths_per_direction() {
        let net = triangle();
        let catalog = PathCatalog::build(&net, 2, 3);
        let forward = catalog.oriented_path(NodeId(1), NodeId(3), 1).unwrap();
        let backward = catalog.oriented_path(NodeId(3), NodeId(1), 1).unwrap();
        assert_eq!(forward.nodes(), ids(&[1, 2, 3]).as_slice());
        assert_eq!(backward.nodes(), ids(&[3, 2, 1]).as_slice());
        assert!(catalog.oriented_path(NodeId(1), NodeId(3), 2).is_none());
    }

    /// Exhaustive simple-path enumeration, the independent oracle for Yen.
    fn all_simple_paths(net: &PhysicalNetwork, from: NodeId, to: NodeId) -> Vec<Vec<NodeId>> {
        fn recurse(
            net: &PhysicalNetwork,
            current: NodeId,
            to: NodeId,
            visited: &mut Vec<NodeId>,
            out: &mut Vec<Vec<NodeId>>,
        ) {
            if current == to {
                out.push(visited.clone());
                return;
            }
            for &next in net.neighbors(current) {
                if !visited.contains(&next) {
                    visited.push(next);
                    recurse(net, next, to, visited, out);
                    visited.pop();
                }
            }
        }
        let mut out = Vec::new();
        let mut visited = vec![from];
        recurse(net, from, to, &mut visited, &mut out);
        out.sort_by(|a, b| (a.len(), a.as_slice()).cmp(&(b.len(), b.as_slice())));
        out
    }

    #[test]
    fn yen_matches_exhaustive_enumeration_on_small_graphs() {
        // A fixed battery of graphs with rich tie structure.
        let graphs: Vec<(u32, Vec<(u32, u32)>)> = vec![
            (4, vec![(1, 2), (2, 3), (3, 4), (4, 1), (1, 3)]),
            (5, vec![(1, 2), (2, 3), (3, 4), (4, 5), (5, 1), (2, 5), (2, 4)]),
            (
                6,
                vec![
                    (1, 2),
                    (2, 3),
                    (3, 4),
                    (4, 5),
                    (5, 6),
                    (6, 1),
                    (1, 4),
                    (2, 5),
                    (3, 6),
                ],
            ),
            (
                7,
                vec![
                    (1, 2),
                    (1, 3),
                    (2, 4),
                    (3, 4),
                    (4, 5),
                    (4, 6),
                    (5, 7),
                    (6, 7),
                    (2, 3),
                    (5, 6),
                ],
            ),
        ];
        for (n, edges) in graphs {
            let net = PhysicalNetwork::new(
                n,
                [],
                edges.iter().map(|&(a, b)| (NodeId(a), NodeId(b))),
            )
            .unwrap();
            for i in net.nodes() {
                for j in net.nodes() {
                    if i == j {
                        continue;
                    }
                    let expected = all_simple_paths(&net, i, j);
                    let got = net.k_shortest_paths(i, j, usize::MAX);
                    let got_nodes: Vec<Vec<NodeId>> =
                        got.iter().map(|p| p.nodes().to_vec()).collect();
                    assert_eq!(got_nodes, expected, "pair {i}->{j} on n={n}");
                    // Truncated prefixes must agree as well.
                    for k in 1..=expected.len() {
                        let trunc = net.k_shortest_paths(i, j, k);
                        let trunc_nodes: Vec<Vec<NodeId>> =
                            trunc.iter().map(|p| p.nodes().to_vec()).collect();
                        assert_eq!(trunc_nodes, expected[..k].to_vec());
                    }
                }
            }
        }
    }

    #[test]
    fn catalog_first_path_is_shortest_and_reach_symmetric() {
        let net = PhysicalNetwork::new(
            6,
            [],
            [
                (NodeId(1), NodeId(2)),
                (NodeId(2), NodeId(3)),
                (NodeId(3), NodeId(4)),
                (NodeId(4), NodeId(5)),
                (NodeId(5), NodeId(6)),
                (NodeId(6), NodeId(1)),
                (NodeId(2), NodeId(5)),
            ],
        )
        .unwrap();
        let catalog = PathCatalog::build(&net, 3, 2);
        for pair in catalog.pairs() {
            let (i, j) = pair.endpoints();
            let paths = catalog.paths(i, j);
            assert!(!paths.is_empty());
            assert_eq!(paths[0].len(), catalog.hop_distance(i, j));
            let unique: BTreeSet<_> = paths.iter().map(|p| p.nodes().to_vec()).collect();
            assert_eq!(unique.len(), paths.len());
            for p in paths {
                assert!(p.is_valid_on(&net));
            }
        }
        for i in net.nodes() {
            for j in net.nodes() {
                assert_eq!(catalog.within_latency(i, j), catalog.within_latency(j, i));
            }
        }
    }
}
