//! Problem instance, design data model, objective evaluators, and the
//! feasibility checker.
//!
//! A design mirrors the optimization variables one-to-one: controller set,
//! virtual mesh, assignment pairs, and the chosen catalog path per channel.
//! Assignment is kept as a set of (switch, controller) pairs rather than a
//! function so that states the optimization variables can express, such as
//! a doubly assigned switch, stay representable and checkable. Structural
//! errors are reserved for states the variables cannot express at all
//! (unknown nodes, out-of-range path indices, and the like).

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::disaster::{design_risk, DisasterModel};
use crate::rational::Rational;
use crate::topology::{Link, NodeId, PathCatalog, PhysicalNetwork};

/// Run parameters of an instance.
///
/// `b` caps the switches per controller counting the controller's own host
/// switch. `forced_controller_count` never comes from instance documents;
/// it is set when a solve or sweep pins the controller count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Parameters {
    pub k: u32,
    pub q: u32,
    pub b: u32,
    pub latency_hops: u32,
    pub catalog_k: u32,
    pub forced_controller_count: Option<u32>,
}

impl Parameters {
    pub fn validate(&self) -> Result<(), ModelError> {
        for (name, value) in [
            ("k", self.k),
            ("q", self.q),
            ("B", self.b),
            ("catalog_K", self.catalog_k),
        ] {
            if value < 1 {
                return Err(ModelError::ParameterOutOfRange(name));
            }
        }
        Ok(())
    }

    pub fn with_forced_count(mut self, count: Option<u32>) -> Self {
        self.forced_controller_count = count;
        self
    }
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("parameter {0} must be at least 1")]
    ParameterOutOfRange(&'static str),
}

/// A fully validated problem instance with its precomputed path catalog.
#[derive(Debug, Clone)]
pub struct Instance {
    net: PhysicalNetwork,
    disasters: DisasterModel,
    params: Parameters,
    catalog: PathCatalog,
    metadata: BTreeMap<String, String>,
}

impl Instance {
    pub fn new(
        net: PhysicalNetwork,
        disasters: DisasterModel,
        params: Parameters,
    ) -> Result<Self, ModelError> {
        params.validate()?;
        let catalog = PathCatalog::build(&net, params.catalog_k, params.latency_hops);
        Ok(Instance {
            net,
            disasters,
            params,
            catalog,
            metadata: BTreeMap::new(),
        })
    }

    /// Free-form informational key-value pairs carried through documents.
    pub fn with_metadata(mut self, metadata: BTreeMap<String, String>) -> Self {
        self.metadata = metadata;
        self
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn net(&self) -> &PhysicalNetwork {
        &self.net
    }

    pub fn disasters(&self) -> &DisasterModel {
        &self.disasters
    }

    pub fn params(&self) -> &Parameters {
        &self.params
    }

    pub fn catalog(&self) -> &PathCatalog {
        &self.catalog
    }

    /// Copy of this instance with a different forced controller count.
    pub fn with_forced_count(&self, count: Option<u32>) -> Instance {
        let mut copy = self.clone();
        copy.params.forced_controller_count = count;
        copy
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Objective {
    MinRisk,
    MinResource,
}

impl Objective {
    pub const ALL: [Objective; 2] = [Objective::MinRisk, Objective::MinResource];

    pub fn as_str(&self) -> &'static str {
        match self {
            Objective::MinRisk => "min-risk",
            Objective::MinResource => "min-resource",
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "min-risk" => Ok(Objective::MinRisk),
            "min-resource" => Ok(Objective::MinResource),
            other => Err(format!("unknown objective {other:?}")),
        }
    }
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum StructuralError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("controller site {0} is not a datacenter node")]
    ControllerSite(NodeId),
    #[error("virtual link endpoint {0} is not a datacenter node")]
    VirtualLinkEndpoint(NodeId),
    #[error("virtual link from node {0} to itself")]
    SelfVirtualLink(NodeId),
    #[error("assignment target {0} is not a datacenter node")]
    AssignmentTarget(NodeId),
    #[error("channel target {0} is not a datacenter node")]
    ChannelTarget(NodeId),
    #[error("channel from node {0} to itself")]
    SelfChannel(NodeId),
    #[error("no catalog path with index {index} between {from} and {to}")]
    PathIndexOutOfRange {
        from: NodeId,
        to: NodeId,
        index: usize,
    },
    #[error("design has no controllers")]
    NoControllers,
}

/// A complete candidate solution.
///
/// `c2c_mapping` keys are undirected controller pairs; `s2c_mapping` keys
/// are directed (switch, controller) pairs. Both map to indices into the
/// catalog's path list for that pair, so a mapped path's endpoints always
/// match its key by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnmDesign {
    controllers: BTreeSet<NodeId>,
    virtual_links: BTreeSet<Link>,
    assignment: BTreeSet<(NodeId, NodeId)>,
    c2c_mapping: BTreeMap<Link, usize>,
    s2c_mapping: BTreeMap<(NodeId, NodeId), usize>,
}

impl CnmDesign {
    pub fn new(
        instance: &Instance,
        controllers: impl IntoIterator<Item = NodeId>,
        virtual_links: impl IntoIterator<Item = (NodeId, NodeId)>,
        assignment: impl IntoIterator<Item = (NodeId, NodeId)>,
        c2c_mapping: impl IntoIterator<Item = ((NodeId, NodeId), usize)>,
        s2c_mapping: impl IntoIterator<Item = ((NodeId, NodeId), usize)>,
    ) -> Result<Self, StructuralError> {
        let net = instance.net();
        let catalog = instance.catalog();
        let known = |n: NodeId| -> Result<NodeId, StructuralError> {
            if net.contains(n) {
                Ok(n)
            } else {
                Err(StructuralError::UnknownNode(n))
            }
        };

        let mut ctrl = BTreeSet::new();
        for f in controllers {
            known(f)?;
            if !net.is_datacenter(f) {
                return Err(StructuralError::ControllerSite(f));
            }
            ctrl.insert(f);
        }
        if ctrl.is_empty() {
            return Err(StructuralError::NoControllers);
        }

        let mut vlinks = BTreeSet::new();
        for (a, b) in virtual_links {
            known(a)?;
            known(b)?;
            if a == b {
                return Err(StructuralError::SelfVirtualLink(a));
            }
            for e in [a, b] {
                if !net.is_datacenter(e) {
                    return Err(StructuralError::VirtualLinkEndpoint(e));
                }
            }
            vlinks.insert(Link::new(a, b));
        }

        let mut assign = BTreeSet::new();
        for (i, f) in assignment {
            known(i)?;
            known(f)?;
            if !net.is_datacenter(f) {
                return Err(StructuralError::AssignmentTarget(f));
            }
            assign.insert((i, f));
        }

        let check_index = |a: NodeId, b: NodeId, index: usize| -> Result<(), StructuralError> {
            if index < catalog.path_count(a, b) {
                Ok(())
            } else {
                Err(StructuralError::PathIndexOutOfRange {
                    from: a,
                    to: b,
                    index,
                })
            }
        };

        let mut c2c = BTreeMap::new();
        for ((a, b), index) in c2c_mapping {
            known(a)?;
            known(b)?;
            if a == b {
                return Err(StructuralError::SelfVirtualLink(a));
            }
            for e in [a, b] {
                if !net.is_datacenter(e) {
                    return Err(StructuralError::VirtualLinkEndpoint(e));
                }
            }
            check_index(a, b, index)?;
            c2c.insert(Link::new(a, b), index);
        }

        let mut s2c = BTreeMap::new();
        for ((i, f), index) in s2c_mapping {
            known(i)?;
            known(f)?;
            if i == f {
                return Err(StructuralError::SelfChannel(i));
            }
            if !net.is_datacenter(f) {
                return Err(StructuralError::ChannelTarget(f));
            }
            check_index(i, f, index)?;
            s2c.insert((i, f), index);
        }

        Ok(CnmDesign {
            controllers: ctrl,
            virtual_links: vlinks,
            assignment: assign,
            c2c_mapping: c2c,
            s2c_mapping: s2c,
        })
    }

    pub fn controllers(&self) -> &BTreeSet<NodeId> {
        &self.controllers
    }

    pub fn is_controller(&self, n: NodeId) -> bool {
        self.controllers.contains(&n)
    }

    pub fn virtual_links(&self) -> &BTreeSet<Link> {
        &self.virtual_links
    }

    pub fn assignment_pairs(&self) -> &BTreeSet<(NodeId, NodeId)> {
        &self.assignment
    }

    /// Assignment targets of a switch, usually a single controller.
    pub fn targets_of(&self, i: NodeId) -> Vec<NodeId> {
        self.assignment
            .range((i, NodeId(u32::MIN))..=(i, NodeId(u32::MAX)))
            .map(|&(_, f)| f)
            .collect()
    }

    pub fn c2c_mapping(&self) -> &BTreeMap<Link, usize> {
        &self.c2c_mapping
    }

    pub fn s2c_mapping(&self) -> &BTreeMap<(NodeId, NodeId), usize> {
        &self.s2c_mapping
    }

    /// Every mapped channel as (from, to, path index): the undirected
    /// controller-to-controller ones first, each counted once, then the
    /// switch-to-controller ones.
    pub fn mapped_channels(&self) -> impl Iterator<Item = (NodeId, NodeId, usize)> + '_ {
        self.c2c_mapping
            .iter()
            .map(|(l, &i)| (l.lo(), l.hi(), i))
            .chain(self.s2c_mapping.iter().map(|(&(s, c), &i)| (s, c, i)))
    }
}

/// Stable identifiers for the checkable constraint families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstraintId {
    C1,
    Cq,
    C3,
    C4,
    C5,
    C6,
    C7,
    C8,
    C10,
    C19,
}

impl ConstraintId {
    pub const ALL: [ConstraintId; 10] = [
        ConstraintId::C1,
        ConstraintId::Cq,
        ConstraintId::C3,
        ConstraintId::C4,
        ConstraintId::C5,
        ConstraintId::C6,
        ConstraintId::C7,
        ConstraintId::C8,
        ConstraintId::C10,
        ConstraintId::C19,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ConstraintId::C1 => "C1",
            ConstraintId::Cq => "Cq",
            ConstraintId::C3 => "C3",
            ConstraintId::C4 => "C4",
            ConstraintId::C5 => "C5",
            ConstraintId::C6 => "C6",
            ConstraintId::C7 => "C7",
            ConstraintId::C8 => "C8",
            ConstraintId::C10 => "C10",
            ConstraintId::C19 => "C19",
        }
    }
}

impl fmt::Display for ConstraintId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConstraintId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ConstraintId::ALL
            .iter()
            .find(|c| c.as_str() == s)
            .copied()
            .ok_or_else(|| format!("unknown constraint id {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub constraint: ConstraintId,
    pub detail: String,
    pub elements: Vec<String>,
}

/// Outcome of a feasibility check: the violations found, plus the
/// witnesses that certify the satisfied C8 and C19 requirements.
#[derive(Debug, Clone, Default)]
pub struct FeasibilityReport {
    violations: Vec<Violation>,
    disjoint_witnesses: BTreeMap<(NodeId, NodeId), [Vec<NodeId>; 2]>,
    survival_witnesses: BTreeMap<(String, (NodeId, NodeId)), Vec<NodeId>>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn violated_constraints(&self) -> BTreeSet<ConstraintId> {
        self.violations.iter().map(|v| v.constraint).collect()
    }

    /// Two virtual-link-disjoint controller paths per satisfied pair.
    pub fn disjoint_witnesses(&self) -> &BTreeMap<(NodeId, NodeId), [Vec<NodeId>; 2]> {
        &self.disjoint_witnesses
    }

    /// Per (zone, surviving controller pair): a virtual path all of whose
    /// links' mapped physical paths survive the zone.
    pub fn survival_witnesses(&self) -> &BTreeMap<(String, (NodeId, NodeId)), Vec<NodeId>> {
        &self.survival_witnesses
    }
}

/// Checks a structurally valid design against every constraint family.
pub fn check_feasibility(instance: &Instance, design: &CnmDesign) -> FeasibilityReport {
    let net = instance.net();
    let catalog = instance.catalog();
    let params = instance.params();
    let mut report = FeasibilityReport::default();
    let push = |violations: &mut Vec<Violation>,
                constraint: ConstraintId,
                detail: String,
                elements: Vec<String>| {
        violations.push(Violation {
            constraint,
            detail,
            elements,
        });
    };
    let mut violations = Vec::new();

    // C1: every switch sees at least k active controllers in its island.
    for i in net.nodes() {
        let visible = design
            .controllers
            .iter()
            .filter(|&&f| catalog.within_latency(i, f))
            .count() as u32;
        if visible < params.k {
            push(
                &mut violations,
                ConstraintId::C1,
                format!(
                    "switch {i} sees {visible} controller(s) within {} hop(s), needs {}",
                    params.latency_hops, params.k
                ),
                vec![i.to_string()],
            );
        }
    }

    // Cq: enough controllers, and exactly the forced count when pinned.
    let count = design.controllers.len() as u32;
    if count < params.q {
        push(
            &mut violations,
            ConstraintId::Cq,
            format!("{count} active controller(s), at least {} required", params.q),
            vec![count.to_string()],
        );
    }
    if let Some(forced) = params.forced_controller_count {
        if count != forced {
            push(
                &mut violations,
                ConstraintId::Cq,
                format!("{count} active controller(s), exactly {forced} required"),
                vec![count.to_string()],
            );
        }
    }

    // C3: per-controller load, counting the host switch.
    let mut loads: BTreeMap<NodeId, u32> = BTreeMap::new();
    for &(_, f) in &design.assignment {
        *loads.entry(f).or_default() += 1;
    }
    for (f, load) in &loads {
        if *load > params.b {
            push(
                &mut violations,
                ConstraintId::C3,
                format!(
                    "controller {f} serves {load} switches (host included), cap is {}",
                    params.b
                ),
                vec![f.to_string()],
            );
        }
    }

    // C5 and C6 per assignment pair.
    for &(i, f) in &design.assignment {
        if i != f && !catalog.within_latency(i, f) {
            push(
                &mut violations,
                ConstraintId::C5,
                format!(
                    "switch {i} assigned to controller {f} at {} hops, limit is {}",
                    catalog.hop_distance(i, f),
                    params.latency_hops
                ),
                vec![i.to_string(), f.to_string()],
            );
        }
        if !design.is_controller(f) {
            push(
                &mut violations,
                ConstraintId::C6,
                format!("switch {i} assigned to {f}, which is not an active controller"),
                vec![i.to_string(), f.to_string()],
            );
        }
        if i != f && design.is_controller(i) {
            push(
                &mut violations,
                ConstraintId::C6,
                format!("controller host {i} assigned away to {f}"),
                vec![i.to_string(), f.to_string()],
            );
        }
    }

    // C4: self-assignment for controller hosts, exactly one target for the
    // rest. Wrong targets are C6's business, counted above.
    for i in net.nodes() {
        let targets = design.targets_of(i);
        if design.is_controller(i) {
            if !targets.contains(&i) {
                push(
                    &mut violations,
                    ConstraintId::C4,
                    format!("controller host {i} is not self-assigned"),
                    vec![i.to_string()],
                );
            }
        } else if targets.len() != 1 {
            push(
                &mut violations,
                ConstraintId::C4,
                format!(
                    "switch {i} has {} assignment(s), exactly one required",
                    targets.len()
                ),
                vec![i.to_string()],
            );
        }
    }

    // C7: virtual links only between active controllers.
    for vl in &design.virtual_links {
        let bad: Vec<NodeId> = [vl.lo(), vl.hi()]
            .into_iter()
            .filter(|&e| !design.is_controller(e))
            .collect();
        if !bad.is_empty() {
            push(
                &mut violations,
                ConstraintId::C7,
                format!("virtual link {vl} touches non-controller node(s)"),
                bad.iter().map(|n| n.to_string()).collect(),
            );
        }
    }

    // C8 over the mesh restricted to controller-to-controller links.
    let mesh: BTreeSet<Link> = design
        .virtual_links
        .iter()
        .copied()
        .filter(|l| design.is_controller(l.lo()) && design.is_controller(l.hi()))
        .collect();
    let ctrls: Vec<NodeId> = design.controllers.iter().copied().collect();
    for (si, &s) in ctrls.iter().enumerate() {
        for &t in &ctrls[si + 1..] {
            match two_disjoint_paths(&mesh, s, t) {
                Some(pair) => {
                    report.disjoint_witnesses.insert((s, t), pair);
                }
                None => push(
                    &mut violations,
                    ConstraintId::C8,
                    format!("controllers {s} and {t} lack two virtual-link-disjoint paths"),
                    vec![s.to_string(), t.to_string()],
                ),
            }
        }
    }

    // C10: channels and mappings correspond one to one.
    for vl in &design.virtual_links {
        if !design.c2c_mapping.contains_key(vl) {
            push(
                &mut violations,
                ConstraintId::C10,
                format!("virtual link {vl} has no mapped physical path"),
                vec![vl.to_string()],
            );
        }
    }
    for key in design.c2c_mapping.keys() {
        if !design.virtual_links.contains(key) {
            push(
                &mut violations,
                ConstraintId::C10,
                format!("mapping for {key} does not correspond to a virtual link"),
                vec![key.to_string()],
            );
        }
    }
    for &(i, f) in &design.assignment {
        if i != f && !design.s2c_mapping.contains_key(&(i, f)) {
            push(
                &mut violations,
                ConstraintId::C10,
                format!("channel {i}->{f} has no mapped physical path"),
                vec![format!("{i}->{f}")],
            );
        }
    }
    for &(i, f) in design.s2c_mapping.keys() {
        if !design.assignment.contains(&(i, f)) {
            push(
                &mut violations,
                ConstraintId::C10,
                format!("mapping for channel {i}->{f} does not correspond to an assignment"),
                vec![format!("{i}->{f}")],
            );
        }
    }

    // C19: for every disaster, surviving controllers stay mutually
    // reachable over virtual links whose mapped paths survive.
    for zone in instance.disasters().zones() {
        let survivors: Vec<NodeId> = ctrls
            .iter()
            .copied()
            .filter(|&f| !zone.node_failed(f))
            .collect();
        let surviving_mesh: BTreeSet<Link> = mesh
            .iter()
            .copied()
            .filter(|l| match design.c2c_mapping.get(l) {
                Some(&idx) => {
                    let path = catalog
                        .oriented_path(l.lo(), l.hi(), idx)
                        .expect("validated index");
                    zone.path_survives(&path)
                }
                // An unmapped virtual link carries nothing.
                None => false,
            })
            .collect();
        for (si, &s) in survivors.iter().enumerate() {
            for &t in &survivors[si + 1..] {
                match mesh_path(&surviving_mesh, s, t) {
                    Some(path) => {
                        report
                            .survival_witnesses
                            .insert((zone.id().to_owned(), (s, t)), path);
                    }
                    None => push(
                        &mut violations,
                        ConstraintId::C19,
                        format!(
                            "surviving controllers {s} and {t} are disconnected under disaster {}",
                            zone.id()
                        ),
                        vec![zone.id().to_owned(), s.to_string(), t.to_string()],
                    ),
                }
            }
        }
    }

    violations.sort_by(|a, b| {
        (a.constraint, &a.detail).cmp(&(b.constraint, &b.detail))
    });
    report.violations = violations;
    report
}

/// Objective value of a design: expected disrupted channels for MinRisk,
/// total mapped path hops for MinResource.
pub fn objective_value(instance: &Instance, design: &CnmDesign, objective: Objective) -> Rational {
    match objective {
        Objective::MinRisk => design_risk(design, instance.catalog(), instance.disasters())
            .expect("design was validated against this instance"),
        Objective::MinResource => {
            let total: i128 = design
                .mapped_channels()
                .map(|(a, b, idx)| instance.catalog().paths(a, b)[idx].len() as i128)
                .sum();
            Rational::from_integer(total)
        }
    }
}

/// Shortest path between two nodes through a link set, by breadth-first
/// search with sorted neighbor expansion.
fn mesh_path(edges: &BTreeSet<Link>, s: NodeId, t: NodeId) -> Option<Vec<NodeId>> {
    if s == t {
        return Some(vec![s]);
    }
    let mut adj: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
    for e in edges {
        adj.entry(e.lo()).or_default().insert(e.hi());
        adj.entry(e.hi()).or_default().insert(e.lo());
    }
    let mut parent: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    let mut queue = VecDeque::new();
    queue.push_back(s);
    parent.insert(s, s);
    while let Some(u) = queue.pop_front() {
        if u == t {
            break;
        }
        if let Some(ns) = adj.get(&u) {
            for &v in ns {
                if let std::collections::btree_map::Entry::Vacant(e) = parent.entry(v) {
                    e.insert(u);
                    queue.push_back(v);
                }
            }
        }
    }
    if !parent.contains_key(&t) {
        return None;
    }
    let mut path = vec![t];
    let mut cur = t;
    while cur != s {
        cur = parent[&cur];
        path.push(cur);
    }
    path.reverse();
    Some(path)
}

/// Two edge-disjoint paths between s and t in an undirected link set, found
/// by two rounds of unit-capacity augmentation. Returns None when the
/// max-flow value is below two.
pub(crate) fn two_disjoint_paths(
    edges: &BTreeSet<Link>,
    s: NodeId,
    t: NodeId,
) -> Option<[Vec<NodeId>; 2]> {
    let mut adj: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
    for e in edges {
        adj.entry(e.lo()).or_default().insert(e.hi());
        adj.entry(e.hi()).or_default().insert(e.lo());
    }
    // net[(u,v)] = 1 when one unit flows u -> v; at most one direction per
    // edge is ever set, so residual capacity on (u,v) is positive iff
    // net[(u,v)] = 0.
    let mut net: BTreeMap<(NodeId, NodeId), u8> = BTreeMap::new();
    for _round in 0..2 {
        let mut parent: BTreeMap<NodeId, NodeId> = BTreeMap::new();
        parent.insert(s, s);
        let mut queue = VecDeque::new();
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            if u == t {
                break;
            }
            if let Some(ns) = adj.get(&u) {
                for &v in ns {
                    if !parent.contains_key(&v) && net.get(&(u, v)).copied().unwrap_or(0) == 0 {
                        parent.insert(v, u);
                        queue.push_back(v);
                    }
                }
            }
        }
        if !parent.contains_key(&t) {
            return None;
        }
        let mut v = t;
        while v != s {
            let u = parent[&v];
            if net.get(&(v, u)).copied().unwrap_or(0) == 1 {
                net.insert((v, u), 0);
            } else {
                net.insert((u, v), 1);
            }
            v = u;
        }
    }
    // Decompose the two units into paths, splicing out any cycles.
    let mut extract = || -> Vec<NodeId> {
        let mut walk = vec![s];
        let mut cur = s;
        while cur != t {
            let next = adj[&cur]
                .iter()
                .copied()
                .find(|&v| net.get(&(cur, v)).copied().unwrap_or(0) == 1)
                .expect("flow conservation");
            net.insert((cur, next), 0);
            if let Some(pos) = walk.iter().position(|&n| n == next) {
                walk.truncate(pos + 1);
            } else {
                walk.push(next);
            }
            cur = next;
        }
        walk
    };
    Some([extract(), extract()])
}
