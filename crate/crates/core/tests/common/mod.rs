//! Shared corpus generator and brute-force oracles for the
//! integration suites.
//!
//! The factored oracle re-derives every constraint from first
//! principles with deliberately different algorithms than the library
//! (naive edge-removal connectivity instead of lowlink, load-vector
//! dynamic programming instead of min-cost flow, plain BFS instead of
//! union-find), so agreement is meaningful. The full oracle enumerates
//! the raw design cross product and filters through the checker; it is
//! only tractable on the smallest instances and exists to certify the
//! factored oracle's stage decomposition.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use num_traits::Zero;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use cnm_core::disaster::DisasterZone;
use cnm_core::format::parse_instance;
use cnm_core::model::{check_feasibility, objective_value, CnmDesign, Instance, Objective};
use cnm_core::rational::Rational;
use cnm_core::topology::{NodeId, Path, PhysicalNetwork};

/// Fixed 6-node reference instance: a ring with three candidate sites
/// and two disasters on opposite sides.
pub const SIX_NODE: &str = r#"
format = "cnm-instance/1"

[params]
k = 1
q = 1
B = 6
latency_hops = 3
catalog_K = 3

[network]
nodes = 6
datacenters = [1, 3, 5]
links = [[1, 2], [2, 3], [3, 4], [4, 5], [5, 6], [6, 1]]

[[disaster]]
id = "south"
failed_nodes = [4]
p_occurrence = "0.3"
p_conditional = "0.5"

[[disaster]]
id = "north"
failed_links = [[1, 2]]
p_occurrence = "0.2"
p_conditional = "0.4"
"#;

pub fn six_node_instance() -> Instance {
    parse_instance(SIX_NODE).expect("reference instance parses")
}

/// Deterministic random instances: up to 7 nodes, up to 3 candidate
/// sites, up to 2 disasters, K <= 3, k and q in 1..=2.
pub fn corpus(count: usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6332_7031);
    let mut out = Vec::new();
    while out.len() < count {
        let text = random_instance_text(&mut rng);
        match parse_instance(&text) {
            Ok(instance) => out.push(instance),
            Err(err) => panic!("generated instance failed to parse: {err}\n{text}"),
        }
    }
    out
}

fn random_instance_text(rng: &mut ChaCha8Rng) -> String {
    let n: u32 = rng.gen_range(4..=7);
    let mut links: BTreeSet<(u32, u32)> = BTreeSet::new();
    for v in 2..=n {
        let u = rng.gen_range(1..v);
        links.insert((u, v));
    }
    for _ in 0..rng.gen_range(0..=3) {
        let a = rng.gen_range(1..=n);
        let b = rng.gen_range(1..=n);
        if a != b {
            links.insert((a.min(b), a.max(b)));
        }
    }

    let mut nodes: Vec<u32> = (1..=n).collect();
    nodes.shuffle(rng);
    // Weighted toward richer instances: three candidate sites and mild
    // parameters keep most of the corpus feasible, the occasional harsh
    // draw keeps infeasibility handling covered.
    let site_count = *[3, 3, 3, 3, 2, 1].choose(rng).unwrap();
    let mut sites: Vec<u32> = nodes[..site_count].to_vec();
    sites.sort_unstable();

    let k = *[1, 1, 1, 2].choose(rng).unwrap();
    let q = *[1, 1, 1, 2].choose(rng).unwrap();
    let b = rng.gen_range(3..=5);
    let latency = *[3, 3, 2].choose(rng).unwrap();
    let catalog_k = rng.gen_range(2..=3);

    let mut text = String::from("format = \"cnm-instance/1\"\n\n[params]\n");
    let _ = writeln!(text, "k = {k}\nq = {q}\nB = {b}");
    let _ = writeln!(text, "latency_hops = {latency}\ncatalog_K = {catalog_k}");
    let _ = writeln!(text, "\n[network]\nnodes = {n}");
    let _ = writeln!(
        text,
        "datacenters = [{}]",
        sites
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join(", ")
    );
    let rendered: Vec<String> = links.iter().map(|(a, b)| format!("[{a}, {b}]")).collect();
    let _ = writeln!(text, "links = [{}]", rendered.join(", "));

    let zone_count = if rng.gen_ratio(1, 10) {
        0
    } else {
        rng.gen_range(1..=2)
    };
    let link_pool: Vec<(u32, u32)> = links.iter().copied().collect();
    for z in 0..zone_count {
        let _ = writeln!(text, "\n[[disaster]]\nid = \"zone{z}\"");
        let style = rng.gen_range(0..3);
        if style != 1 {
            let mut failed: Vec<u32> = (1..=n).collect();
            failed.shuffle(rng);
            failed.truncate(rng.gen_range(1..=2));
            failed.sort_unstable();
            let _ = writeln!(
                text,
                "failed_nodes = [{}]",
                failed
                    .iter()
                    .map(u32::to_string)
                    .collect::<Vec<_>>()
                    .join(", ")
            );
        }
        if style != 0 {
            let mut failed = link_pool.clone();
            failed.shuffle(rng);
            failed.truncate(rng.gen_range(1..=2));
            failed.sort_unstable();
            let rendered: Vec<String> =
                failed.iter().map(|(a, b)| format!("[{a}, {b}]")).collect();
            let _ = writeln!(text, "failed_links = [{}]", rendered.join(", "));
        }
        let occ = ["0.1", "0.2", "0.3", "0.4", "0.5"].choose(rng).unwrap();
        let cond = ["0.2", "0.4", "0.5", "0.6", "0.8"].choose(rng).unwrap();
        let _ = writeln!(text, "p_occurrence = \"{occ}\"\np_conditional = \"{cond}\"");
    }
    text
}

/// A zone hits a path when any path element fails with the zone.
pub fn path_hit(zone: &DisasterZone, path: &Path) -> bool {
    path.nodes().iter().any(|&v| zone.node_failed(v))
        || path.links().any(|l| zone.link_failed(l))
}

pub fn path_cost(instance: &Instance, objective: Objective, path: &Path) -> Rational {
    match objective {
        Objective::MinResource => Rational::from_integer(path.len() as i128),
        Objective::MinRisk => instance
            .disasters()
            .zones()
            .iter()
            .filter(|z| path_hit(z, path))
            .fold(Rational::zero(), |acc, z| acc + z.p_fail()),
    }
}

fn bfs_hops(net: &PhysicalNetwork, from: NodeId) -> BTreeMap<NodeId, u32> {
    let mut dist = BTreeMap::from([(from, 0u32)]);
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        let d = dist[&u];
        for &v in net.neighbors(u) {
            if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(v) {
                e.insert(d + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Best feasible objective value by staged enumeration, or None when
/// no design exists.
pub fn oracle_solve(instance: &Instance, objective: Objective) -> Option<Rational> {
    let sites: Vec<NodeId> = instance.net().datacenters().iter().copied().collect();
    let mut best: Option<Rational> = None;
    for mask in 1u32..(1 << sites.len()) {
        let subset: Vec<NodeId> = sites
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &f)| f)
            .collect();
        let Some(total) = subset_cost(instance, objective, &subset) else {
            continue;
        };
        if best.as_ref().is_none_or(|b| total < *b) {
            best = Some(total);
        }
    }
    best
}

fn subset_cost(
    instance: &Instance,
    objective: Objective,
    subset: &[NodeId],
) -> Option<Rational> {
    let params = instance.params();
    if (subset.len() as u32) < params.q {
        return None;
    }
    if let Some(forced) = params.forced_controller_count {
        if subset.len() as u32 != forced {
            return None;
        }
    }
    let net = instance.net();
    let islands: Vec<BTreeMap<NodeId, u32>> =
        subset.iter().map(|&f| bfs_hops(net, f)).collect();
    let in_island = |i: NodeId, c: usize| -> bool {
        islands[c]
            .get(&i)
            .is_some_and(|&d| d <= params.latency_hops)
    };
    for i in net.nodes() {
        let covered = (0..subset.len()).filter(|&c| in_island(i, c)).count();
        if covered < params.k as usize {
            return None;
        }
    }
    let assignment = assignment_cost(instance, objective, subset, &in_island)?;
    let mesh = if subset.len() == 1 {
        Rational::zero()
    } else {
        mesh_cost(instance, objective, subset)?
    };
    Some(assignment + mesh)
}

/// Min-cost capacitated assignment by dynamic programming over
/// controller load vectors.
fn assignment_cost(
    instance: &Instance,
    objective: Objective,
    subset: &[NodeId],
    in_island: &dyn Fn(NodeId, usize) -> bool,
) -> Option<Rational> {
    let catalog = instance.catalog();
    let spare = instance.params().b - 1;
    let switches: Vec<NodeId> = instance
        .net()
        .nodes()
        .filter(|i| !subset.contains(i))
        .collect();
    let mut frontier: BTreeMap<Vec<u32>, Rational> =
        BTreeMap::from([(vec![0; subset.len()], Rational::zero())]);
    for &i in &switches {
        let mut next: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (loads, cost) in &frontier {
            for (c, &f) in subset.iter().enumerate() {
                if loads[c] >= spare || !in_island(i, c) {
                    continue;
                }
                let Some(channel) = catalog
                    .paths(i, f)
                    .iter()
                    .map(|p| path_cost(instance, objective, p))
                    .min()
                else {
                    continue;
                };
                let mut bumped = loads.clone();
                bumped[c] += 1;
                let total = cost + channel;
                match next.get(&bumped) {
                    Some(seen) if *seen <= total => {}
                    _ => {
                        next.insert(bumped, total);
                    }
                }
            }
        }
        frontier = next;
    }
    frontier.into_values().min()
}

fn connected_over(
    members: &[NodeId],
    edges: &[(NodeId, NodeId)],
    skip: Option<usize>,
) -> bool {
    let Some(&start) = members.first() else {
        return true;
    };
    let mut reached = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for (pos, &(s, t)) in edges.iter().enumerate() {
            if Some(pos) == skip {
                continue;
            }
            let v = if s == u {
                t
            } else if t == u {
                s
            } else {
                continue;
            };
            if reached.insert(v) {
                queue.push_back(v);
            }
        }
    }
    members.iter().all(|m| reached.contains(m))
}

/// Min-cost redundant mesh with per-disaster surviving connectivity,
/// by full enumeration of meshes and path-index maps.
fn mesh_cost(
    instance: &Instance,
    objective: Objective,
    subset: &[NodeId],
) -> Option<Rational> {
    let catalog = instance.catalog();
    let mut pairs: Vec<(NodeId, NodeId)> = Vec::new();
    for (x, &s) in subset.iter().enumerate() {
        for &t in &subset[x + 1..] {
            pairs.push((s, t));
        }
    }
    let zones = instance.disasters().zones();
    let mut best: Option<Rational> = None;
    for mesh_mask in 1u32..(1 << pairs.len()) {
        let mesh: Vec<(NodeId, NodeId)> = pairs
            .iter()
            .enumerate()
            .filter(|(p, _)| mesh_mask >> p & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        if !connected_over(subset, &mesh, None)
            || (0..mesh.len()).any(|pos| !connected_over(subset, &mesh, Some(pos)))
        {
            continue;
        }
        let mut indices = vec![0usize; mesh.len()];
        'maps: loop {
            let paths: Vec<&Path> = mesh
                .iter()
                .zip(&indices)
                .map(|(&(s, t), &idx)| &catalog.paths(s, t)[idx])
                .collect();
            let survivable = zones.iter().all(|zone| {
                let alive: Vec<NodeId> = subset
                    .iter()
                    .copied()
                    .filter(|&f| !zone.node_failed(f))
                    .collect();
                if alive.len() <= 1 {
                    return true;
                }
                let alive_edges: Vec<(NodeId, NodeId)> = mesh
                    .iter()
                    .zip(&paths)
                    .filter(|(&(s, t), p)| {
                        !zone.node_failed(s) && !zone.node_failed(t) && !path_hit(zone, p)
                    })
                    .map(|(&e, _)| e)
                    .collect();
                connected_over(&alive, &alive_edges, None)
            });
            if survivable {
                let total = paths
                    .iter()
                    .fold(Rational::zero(), |acc, p| acc + path_cost(instance, objective, p));
                if best.as_ref().is_none_or(|b| total < *b) {
                    best = Some(total);
                }
            }
            for pos in 0..mesh.len() {
                indices[pos] += 1;
                let (s, t) = mesh[pos];
                if indices[pos] < catalog.path_count(s, t) {
                    continue 'maps;
                }
                indices[pos] = 0;
            }
            break;
        }
    }
    best
}

/// Endpoint pairs together with the catalog index chosen for each.
type MappedPart = (Vec<(NodeId, NodeId)>, Vec<((NodeId, NodeId), usize)>);

/// Ground truth by raw cross-product enumeration filtered through the
/// checker. Only call on tiny instances.
pub fn oracle_solve_full(instance: &Instance, objective: Objective) -> Option<Rational> {
    let net = instance.net();
    let catalog = instance.catalog();
    let sites: Vec<NodeId> = net.datacenters().iter().copied().collect();
    let mut best: Option<Rational> = None;
    for mask in 1u32..(1 << sites.len()) {
        let subset: Vec<NodeId> = sites
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &f)| f)
            .collect();
        let switches: Vec<NodeId> = net.nodes().filter(|i| !subset.contains(i)).collect();
        let mut pairs: Vec<(NodeId, NodeId)> = Vec::new();
        for (x, &s) in subset.iter().enumerate() {
            for &t in &subset[x + 1..] {
                pairs.push((s, t));
            }
        }

        // Every assignment map with every per-channel path index.
        let mut assignment_parts: Vec<MappedPart> = Vec::new();
        let mut targets = vec![0usize; switches.len()];
        'assignments: loop {
            let map: Vec<(NodeId, NodeId)> = switches
                .iter()
                .zip(&targets)
                .map(|(&i, &t)| (i, subset[t]))
                .collect();
            let mut idxs = vec![0usize; switches.len()];
            'indices: loop {
                let s2c: Vec<((NodeId, NodeId), usize)> = map
                    .iter()
                    .zip(&idxs)
                    .map(|(&(i, f), &idx)| ((i, f), idx))
                    .collect();
                assignment_parts.push((map.clone(), s2c));
                for pos in 0..switches.len() {
                    idxs[pos] += 1;
                    let (i, f) = map[pos];
                    if idxs[pos] < catalog.path_count(i, f) {
                        continue 'indices;
                    }
                    idxs[pos] = 0;
                }
                break;
            }
            for t in targets.iter_mut() {
                *t += 1;
                if *t < subset.len() {
                    continue 'assignments;
                }
                *t = 0;
            }
            break;
        }

        // Every mesh with every per-link path index (empty mesh included).
        let mut mesh_parts: Vec<MappedPart> = Vec::new();
        for mesh_mask in 0u32..(1 << pairs.len()) {
            let mesh: Vec<(NodeId, NodeId)> = pairs
                .iter()
                .enumerate()
                .filter(|(p, _)| mesh_mask >> p & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            let mut idxs = vec![0usize; mesh.len()];
            'mesh_indices: loop {
                let c2c: Vec<((NodeId, NodeId), usize)> = mesh
                    .iter()
                    .zip(&idxs)
                    .map(|(&(s, t), &idx)| ((s, t), idx))
                    .collect();
                mesh_parts.push((mesh.clone(), c2c));
                for pos in 0..mesh.len() {
                    idxs[pos] += 1;
                    let (s, t) = mesh[pos];
                    if idxs[pos] < catalog.path_count(s, t) {
                        continue 'mesh_indices;
                    }
                    idxs[pos] = 0;
                }
                break;
            }
        }

        for (map, s2c) in &assignment_parts {
            let mut full_assignment: Vec<(NodeId, NodeId)> =
                subset.iter().map(|&f| (f, f)).collect();
            full_assignment.extend_from_slice(map);
            for (mesh, c2c) in &mesh_parts {
                let Ok(design) = CnmDesign::new(
                    instance,
                    subset.iter().copied(),
                    mesh.iter().copied(),
                    full_assignment.iter().copied(),
                    c2c.iter().copied(),
                    s2c.iter().copied(),
                ) else {
                    continue;
                };
                if !check_feasibility(instance, &design).is_feasible() {
                    continue;
                }
                let total = objective_value(instance, &design, objective);
                if best.as_ref().is_none_or(|b| total < *b) {
                    best = Some(total);
                }
            }
        }
    }
    best
}
