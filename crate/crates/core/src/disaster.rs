//! Disaster zones and the expected-disruption risk metric.
//!
//! A zone is a correlated-failure event: a set of links and nodes that all
//! fail together when the event realizes. Its unconditional failure
//! probability is p_occurrence * p_conditional. The risk of a set of mapped
//! paths is the expected number of them hit by a zone, summed over zones;
//! zones are treated as independent events, and by linearity no joint
//! distribution is needed.

use std::collections::BTreeSet;

use crate::model::{CnmDesign, StructuralError};
use crate::rational::{Decimal, Rational};
use crate::topology::{Link, NodeId, Path, PathCatalog, PhysicalNetwork};
use num_traits::Zero;

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum DisasterError {
    #[error("disaster {zone}: unknown node {node}")]
    UnknownNode { zone: String, node: NodeId },
    #[error("disaster {zone}: unknown link {link}")]
    UnknownLink { zone: String, link: Link },
    #[error("duplicate disaster id {0}")]
    DuplicateZone(String),
    #[error("disaster {zone}: {field} = {value} is not a probability")]
    ProbabilityOutOfRange {
        zone: String,
        field: &'static str,
        value: String,
    },
}

/// One predicted disaster event.
///
/// `failed_links` is the normalized effective set: it contains every listed
/// link plus every link incident to a failed node. The listed links are kept
/// separately so documents round-trip byte for byte.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisasterZone {
    id: String,
    failed_nodes: BTreeSet<NodeId>,
    listed_links: BTreeSet<Link>,
    failed_links: BTreeSet<Link>,
    p_occurrence: Decimal,
    p_conditional: Decimal,
}

impl DisasterZone {
    pub fn new(
        net: &PhysicalNetwork,
        id: impl Into<String>,
        failed_nodes: impl IntoIterator<Item = NodeId>,
        failed_links: impl IntoIterator<Item = (NodeId, NodeId)>,
        p_occurrence: Decimal,
        p_conditional: Decimal,
    ) -> Result<Self, DisasterError> {
        let id = id.into();
        let mut nodes = BTreeSet::new();
        for n in failed_nodes {
            if !net.contains(n) {
                return Err(DisasterError::UnknownNode {
                    zone: id,
                    node: n,
                });
            }
            nodes.insert(n);
        }
        let mut listed = BTreeSet::new();
        for (a, b) in failed_links {
            let link = Link::new(a, b);
            if !net.has_link(a, b) {
                return Err(DisasterError::UnknownLink { zone: id, link });
            }
            listed.insert(link);
        }
        for (field, p) in [
            ("p_occurrence", &p_occurrence),
            ("p_conditional", &p_conditional),
        ] {
            if p.value() > Rational::from_integer(1) {
                return Err(DisasterError::ProbabilityOutOfRange {
                    zone: id,
                    field,
                    value: p.as_str().to_owned(),
                });
            }
        }
        // A downed node takes its incident links with it.
        let mut effective = listed.clone();
        for link in net.links() {
            if nodes.contains(&link.lo()) || nodes.contains(&link.hi()) {
                effective.insert(*link);
            }
        }
        Ok(DisasterZone {
            id,
            failed_nodes: nodes,
            listed_links: listed,
            failed_links: effective,
            p_occurrence,
            p_conditional,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn failed_nodes(&self) -> &BTreeSet<NodeId> {
        &self.failed_nodes
    }

    /// Effective failed links, including those implied by failed nodes.
    pub fn failed_links(&self) -> &BTreeSet<Link> {
        &self.failed_links
    }

    /// Links exactly as listed in the source document.
    pub fn listed_links(&self) -> &BTreeSet<Link> {
        &self.listed_links
    }

    pub fn p_occurrence(&self) -> &Decimal {
        &self.p_occurrence
    }

    pub fn p_conditional(&self) -> &Decimal {
        &self.p_conditional
    }

    /// Unconditional probability that this zone's failures realize.
    pub fn p_fail(&self) -> Rational {
        self.p_occurrence.value() * self.p_conditional.value()
    }

    pub fn node_failed(&self, n: NodeId) -> bool {
        self.failed_nodes.contains(&n)
    }

    pub fn link_failed(&self, link: Link) -> bool {
        self.failed_links.contains(&link)
    }

    /// True iff the path uses no failed link and visits no failed node,
    /// endpoints included.
    pub fn path_survives(&self, p: &Path) -> bool {
        p.nodes().iter().all(|n| !self.node_failed(*n))
            && p.links().all(|l| !self.link_failed(l))
    }
}

/// The full disaster set of an instance.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DisasterModel {
    zones: Vec<DisasterZone>,
}

impl DisasterModel {
    pub fn new(zones: Vec<DisasterZone>) -> Result<Self, DisasterError> {
        let mut ids = BTreeSet::new();
        for z in &zones {
            if !ids.insert(z.id().to_owned()) {
                return Err(DisasterError::DuplicateZone(z.id().to_owned()));
            }
        }
        Ok(DisasterModel { zones })
    }

    pub fn zones(&self) -> &[DisasterZone] {
        &self.zones
    }

    pub fn zone(&self, id: &str) -> Option<&DisasterZone> {
        self.zones.iter().find(|z| z.id() == id)
    }

    pub fn is_empty(&self) -> bool {
        self.zones.is_empty()
    }

    /// Expected number of zones that hit the path: sum of p_fail over
    /// zones the path does not survive.
    pub fn path_risk(&self, p: &Path) -> Rational {
        let mut total = Rational::zero();
        for z in &self.zones {
            if !z.path_survives(p) {
                total += z.p_fail();
            }
        }
        total
    }
}

/// Risk of a complete design: the sum of path_risk over every mapped
/// channel, controller-to-controller and switch-to-controller alike, each
/// undirected channel counted once.
pub fn design_risk(
    design: &CnmDesign,
    catalog: &PathCatalog,
    model: &DisasterModel,
) -> Result<Rational, StructuralError> {
    let mut total = Rational::zero();
    for (from, to, index) in design.mapped_channels() {
        let path = catalog
            .oriented_path(from, to, index)
            .ok_or(StructuralError::PathIndexOutOfRange { from, to, index })?;
        total += model.path_risk(&path);
    }
    Ok(total)
}

/// Survival and risk of every catalog path, precomputed once per
/// (catalog, zones) pair. Read-only afterwards; shared by solver workers.
#[derive(Debug, Clone)]
pub struct SurvivalMatrix {
    zone_count: usize,
    entries: Vec<Vec<PathFate>>,
}

/// Fate of one catalog path: its risk and its per-zone survival flags.
#[derive(Debug, Clone)]
pub struct PathFate {
    pub risk: Rational,
    pub survives: Vec<bool>,
}

impl SurvivalMatrix {
    pub fn build(catalog: &PathCatalog, model: &DisasterModel) -> Self {
        let mut entries = Vec::new();
        for pair in catalog.pairs() {
            let (i, j) = pair.endpoints();
            let fates = catalog
                .paths(i, j)
                .iter()
                .map(|p| PathFate {
                    risk: model.path_risk(p),
                    survives: model.zones().iter().map(|z| z.path_survives(p)).collect(),
                })
                .collect();
            entries.push(fates);
        }
        SurvivalMatrix {
            zone_count: model.zones().len(),
            entries,
        }
    }

    pub fn zone_count(&self) -> usize {
        self.zone_count
    }

    /// Fates of the catalog paths between a pair, in catalog index order.
    pub fn fates(&self, catalog: &PathCatalog, a: NodeId, b: NodeId) -> &[PathFate] {
        &self.entries[catalog.pair_slot_of(a, b)]
    }
}
