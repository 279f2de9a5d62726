//! Document formats: instance, design, and feasibility-report files.
//!
//! All three are TOML with an explicit `format` version field. Parsing
//! validates completely (referential integrity, graph connectivity,
//! parameter ranges); serialization has a fixed field and element order so
//! identical inputs produce identical bytes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::disaster::{DisasterError, DisasterModel, DisasterZone};
use crate::model::{
    CnmDesign, FeasibilityReport, Instance, ModelError, Objective, Parameters, StructuralError,
};
use crate::rational::Decimal;
use crate::topology::{NodeId, PhysicalNetwork, TopologyError};

pub const INSTANCE_FORMAT: &str = "cnm-instance/1";
pub const DESIGN_FORMAT: &str = "cnm-design/1";
pub const REPORT_FORMAT: &str = "cnm-report/1";

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed document: {0}")]
    Malformed(#[from] toml::de::Error),
    #[error("unsupported format {found:?}, expected {expected:?}")]
    WrongFormat {
        found: String,
        expected: &'static str,
    },
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Disaster(#[from] DisasterError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Structural(#[from] StructuralError),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    format: String,
    params: ParamsDoc,
    network: NetworkDoc,
    #[serde(default, rename = "disaster", skip_serializing_if = "Vec::is_empty")]
    disasters: Vec<DisasterDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    metadata: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsDoc {
    k: u32,
    q: u32,
    #[serde(rename = "B")]
    b: u32,
    latency_hops: u32,
    #[serde(rename = "catalog_K")]
    catalog_k: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkDoc {
    nodes: u32,
    #[serde(default)]
    datacenters: Vec<u32>,
    links: Vec<[u32; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DisasterDoc {
    id: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    failed_nodes: Vec<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    failed_links: Vec<[u32; 2]>,
    p_occurrence: Decimal,
    p_conditional: Decimal,
}

/// Parses and fully validates an instance document.
pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    let doc: InstanceDoc = toml::from_str(text)?;
    if doc.format != INSTANCE_FORMAT {
        return Err(FormatError::WrongFormat {
            found: doc.format,
            expected: INSTANCE_FORMAT,
        });
    }
    let net = PhysicalNetwork::new(
        doc.network.nodes,
        doc.network.datacenters.iter().map(|&d| NodeId(d)),
        doc.network.links.iter().map(|&[a, b]| (NodeId(a), NodeId(b))),
    )?;
    let mut zones = Vec::new();
    for d in doc.disasters {
        zones.push(DisasterZone::new(
            &net,
            d.id,
            d.failed_nodes.iter().map(|&n| NodeId(n)),
            d.failed_links.iter().map(|&[a, b]| (NodeId(a), NodeId(b))),
            d.p_occurrence,
            d.p_conditional,
        )?);
    }
    let disasters = DisasterModel::new(zones)?;
    let params = Parameters {
        k: doc.params.k,
        q: doc.params.q,
        b: doc.params.b,
        latency_hops: doc.params.latency_hops,
        catalog_k: doc.params.catalog_k,
        forced_controller_count: None,
    };
    Ok(Instance::new(net, disasters, params)?.with_metadata(doc.metadata))
}

pub fn serialize_instance(instance: &Instance) -> String {
    let net = instance.net();
    let params = instance.params();
    let doc = InstanceDoc {
        format: INSTANCE_FORMAT.to_owned(),
        params: ParamsDoc {
            k: params.k,
            q: params.q,
            b: params.b,
            latency_hops: params.latency_hops,
            catalog_k: params.catalog_k,
        },
        network: NetworkDoc {
            nodes: net.node_count(),
            datacenters: net.datacenters().iter().map(|d| d.0).collect(),
            links: net
                .links()
                .iter()
                .map(|l| [l.lo().0, l.hi().0])
                .collect(),
        },
        disasters: instance
            .disasters()
            .zones()
            .iter()
            .map(|z| DisasterDoc {
                id: z.id().to_owned(),
                failed_nodes: z.failed_nodes().iter().map(|n| n.0).collect(),
                failed_links: z
                    .listed_links()
                    .iter()
                    .map(|l| [l.lo().0, l.hi().0])
                    .collect(),
                p_occurrence: z.p_occurrence().clone(),
                p_conditional: z.p_conditional().clone(),
            })
            .collect(),
        metadata: instance.metadata().clone(),
    };
    toml::to_string_pretty(&doc).expect("instance serializes")
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DesignDoc {
    format: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    objective: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    objective_value: Option<String>,
    solution: SolutionDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    solver: Option<SolverInfo>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolutionDoc {
    controllers: Vec<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    virtual_links: Vec<[u32; 2]>,
    assignment: Vec<[u32; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    c2c_paths: Vec<[u32; 3]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    s2c_paths: Vec<[u32; 3]>,
}

/// Deterministic solver counters recorded in design documents.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct SolverInfo {
    pub proof: String,
    pub subsets_enumerated: u64,
    pub nodes_explored: u64,
}

/// Descriptive fields carried alongside the solution in a design document.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DesignMetadata {
    pub objective: Option<Objective>,
    pub objective_value: Option<String>,
    pub solver: Option<SolverInfo>,
}

/// Parses a design document and validates it against the instance.
pub fn parse_design(
    text: &str,
    instance: &Instance,
) -> Result<(CnmDesign, DesignMetadata), FormatError> {
    let doc: DesignDoc = toml::from_str(text)?;
    if doc.format != DESIGN_FORMAT {
        return Err(FormatError::WrongFormat {
            found: doc.format,
            expected: DESIGN_FORMAT,
        });
    }
    let objective = doc
        .objective
        .as_deref()
        .map(|s| s.parse::<Objective>().map_err(FormatError::Invalid))
        .transpose()?;
    let design = CnmDesign::new(
        instance,
        doc.solution.controllers.iter().map(|&c| NodeId(c)),
        doc.solution
            .virtual_links
            .iter()
            .map(|&[a, b]| (NodeId(a), NodeId(b))),
        doc.solution
            .assignment
            .iter()
            .map(|&[a, b]| (NodeId(a), NodeId(b))),
        doc.solution
            .c2c_paths
            .iter()
            .map(|&[a, b, i]| ((NodeId(a), NodeId(b)), i as usize)),
        doc.solution
            .s2c_paths
            .iter()
            .map(|&[a, b, i]| ((NodeId(a), NodeId(b)), i as usize)),
    )?;
    Ok((
        design,
        DesignMetadata {
            objective,
            objective_value: doc.objective_value,
            solver: doc.solver,
        },
    ))
}

pub fn serialize_design(design: &CnmDesign, meta: &DesignMetadata) -> String {
    let doc = DesignDoc {
        format: DESIGN_FORMAT.to_owned(),
        objective: meta.objective.map(|o| o.as_str().to_owned()),
        objective_value: meta.objective_value.clone(),
        solution: SolutionDoc {
            controllers: design.controllers().iter().map(|c| c.0).collect(),
            virtual_links: design
                .virtual_links()
                .iter()
                .map(|l| [l.lo().0, l.hi().0])
                .collect(),
            assignment: design
                .assignment_pairs()
                .iter()
                .map(|&(i, f)| [i.0, f.0])
                .collect(),
            c2c_paths: design
                .c2c_mapping()
                .iter()
                .map(|(l, &idx)| [l.lo().0, l.hi().0, idx as u32])
                .collect(),
            s2c_paths: design
                .s2c_mapping()
                .iter()
                .map(|(&(i, f), &idx)| [i.0, f.0, idx as u32])
                .collect(),
        },
        solver: meta.solver.clone(),
    };
    toml::to_string_pretty(&doc).expect("design serializes")
}

#[derive(Serialize)]
struct ReportDoc {
    format: &'static str,
    feasible: bool,
    #[serde(rename = "violation", skip_serializing_if = "Vec::is_empty")]
    violations: Vec<ViolationDoc>,
    #[serde(rename = "disjoint_witness", skip_serializing_if = "Vec::is_empty")]
    disjoint_witnesses: Vec<DisjointWitnessDoc>,
    #[serde(rename = "survival_witness", skip_serializing_if = "Vec::is_empty")]
    survival_witnesses: Vec<SurvivalWitnessDoc>,
}

#[derive(Serialize)]
struct ViolationDoc {
    constraint: &'static str,
    detail: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    elements: Vec<String>,
}

#[derive(Serialize)]
struct DisjointWitnessDoc {
    pair: [u32; 2],
    path_a: Vec<u32>,
    path_b: Vec<u32>,
}

#[derive(Serialize)]
struct SurvivalWitnessDoc {
    disaster: String,
    pair: [u32; 2],
    path: Vec<u32>,
}

pub fn serialize_report(report: &FeasibilityReport) -> String {
    let doc = ReportDoc {
        format: REPORT_FORMAT,
        feasible: report.is_feasible(),
        violations: report
            .violations()
            .iter()
            .map(|v| ViolationDoc {
                constraint: v.constraint.as_str(),
                detail: v.detail.clone(),
                elements: v.elements.clone(),
            })
            .collect(),
        disjoint_witnesses: report
            .disjoint_witnesses()
            .iter()
            .map(|(&(s, t), [a, b])| DisjointWitnessDoc {
                pair: [s.0, t.0],
                path_a: a.iter().map(|n| n.0).collect(),
                path_b: b.iter().map(|n| n.0).collect(),
            })
            .collect(),
        survival_witnesses: report
            .survival_witnesses()
            .iter()
            .map(|((zone, (s, t)), path)| SurvivalWitnessDoc {
                disaster: zone.clone(),
                pair: [s.0, t.0],
                path: path.iter().map(|n| n.0).collect(),
            })
            .collect(),
    };
    toml::to_string_pretty(&doc).expect("report serializes")
}
