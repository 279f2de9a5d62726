//! Exact optimization at desk scale.
//!
//! The search is staged: candidate controller sets are enumerated first
//! (island coverage and count constraints filter them cheaply), then for
//! each set the switch assignment is solved exactly as a min-cost
//! capacitated flow, and the virtual mesh plus its path mapping is found
//! by branch-and-bound. Assignment and mesh are independent once the
//! controller set is fixed: no constraint couples them and the objective
//! splits into their two sums.
//!
//! Determinism contract: every per-set computation is a pure function of
//! the instance, sets get fixed budgets rather than shared ones, and the
//! global winner is reduced sequentially under a total tie order
//! (objective value, controller set, mesh, path indices). The outcome is
//! therefore byte-identical across runs and worker counts.

mod assignment;
pub mod lp;
mod search;

pub use lp::{export_lp, import_solution, lp_variable_count, ImportError};

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::disaster::SurvivalMatrix;
use crate::model::{
    check_feasibility, objective_value, CnmDesign, ConstraintId, Instance, Objective,
};
use crate::rational::Rational;
use crate::topology::{Link, NodeId};

/// Cap on candidate sites for exhaustive subset enumeration.
pub const MAX_SITES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControllerCount {
    Any,
    Exactly(u32),
    Range(u32, u32),
}

impl ControllerCount {
    fn admits(&self, size: u32) -> bool {
        match *self {
            ControllerCount::Any => true,
            ControllerCount::Exactly(n) => size == n,
            ControllerCount::Range(lo, hi) => size >= lo && size <= hi,
        }
    }

    fn forced(&self) -> Option<u32> {
        match *self {
            ControllerCount::Exactly(n) => Some(n),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub objective: Objective,
    pub controller_count: ControllerCount,
    /// Branch-and-bound node allowance per candidate controller set. A
    /// per-set budget keeps the abort point independent of scheduling.
    pub node_budget: u64,
    /// Worker threads; 0 uses the default pool size.
    pub worker_count: usize,
}

impl SolverConfig {
    pub fn new(objective: Objective) -> Self {
        SolverConfig {
            objective,
            controller_count: ControllerCount::Any,
            node_budget: 10_000_000,
            worker_count: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Proof {
    Optimal,
    BudgetExhausted,
}

#[derive(Debug, Clone)]
pub struct SolveStats {
    pub subsets_enumerated: u64,
    pub nodes_explored: u64,
    /// Wall time is informational only and never serialized.
    pub wall: Duration,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub design: CnmDesign,
    pub objective: Objective,
    pub objective_value: Rational,
    pub proof: Proof,
    pub stats: SolveStats,
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("infeasible: no design satisfies constraint family {family}")]
    Infeasible { family: ConstraintId },
    #[error("{0} candidate sites exceed the enumeration cap of {MAX_SITES}; use the LP export")]
    TooManySites(usize),
    #[error("node budget exhausted before any feasible design was found")]
    BudgetExhausted,
}

/// How far the staged search advanced; the furthest stage names the
/// constraint family reported on infeasibility.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Stage {
    NoCountValidSubsets,
    AllIslandFiltered,
    AssignmentFailed,
    NoRedundantMesh,
    SurvivabilityFailed,
    Found,
}

impl Stage {
    fn family(self) -> ConstraintId {
        match self {
            Stage::NoCountValidSubsets => ConstraintId::Cq,
            Stage::AllIslandFiltered => ConstraintId::C1,
            Stage::AssignmentFailed => ConstraintId::C3,
            Stage::NoRedundantMesh => ConstraintId::C8,
            Stage::SurvivabilityFailed => ConstraintId::C19,
            Stage::Found => unreachable!("found designs are not infeasible"),
        }
    }
}

/// Per-pair path costs and survival flags under the chosen objective,
/// shared read-only by all workers.
pub(crate) struct CostModel {
    pairs: Vec<PairCosts>,
}

pub(crate) struct PairCosts {
    /// Cost per catalog path index: risk or hop count.
    pub costs: Vec<Rational>,
    /// survives[index][zone]
    pub survives: Vec<Vec<bool>>,
    pub min_cost: Rational,
    /// Lowest index attaining min_cost.
    pub best_index: usize,
    /// Whether any catalog path for the pair survives each zone.
    pub any_survivor: Vec<bool>,
}

impl CostModel {
    pub fn build(instance: &Instance, objective: Objective) -> Self {
        let catalog = instance.catalog();
        let matrix = SurvivalMatrix::build(catalog, instance.disasters());
        let zone_count = instance.disasters().zones().len();
        let mut pairs = Vec::new();
        for pair in catalog.pairs() {
            let (i, j) = pair.endpoints();
            let fates = matrix.fates(catalog, i, j);
            let costs: Vec<Rational> = match objective {
                Objective::MinRisk => fates.iter().map(|f| f.risk).collect(),
                Objective::MinResource => catalog
                    .paths(i, j)
                    .iter()
                    .map(|p| Rational::from_integer(p.len() as i128))
                    .collect(),
            };
            let best_index = (0..costs.len())
                .min_by_key(|&idx| &costs[idx])
                .expect("catalog pairs are never empty");
            let min_cost = costs[best_index];
            let any_survivor = (0..zone_count)
                .map(|z| fates.iter().any(|f| f.survives[z]))
                .collect();
            pairs.push(PairCosts {
                costs,
                survives: fates.iter().map(|f| f.survives.clone()).collect(),
                min_cost,
                best_index,
                any_survivor,
            });
        }
        CostModel { pairs }
    }

    pub fn pair(&self, instance: &Instance, a: NodeId, b: NodeId) -> &PairCosts {
        &self.pairs[instance.catalog().pair_slot_of(a, b)]
    }
}

/// One complete candidate with its deterministic tie key.
#[derive(Debug, Clone)]
struct Candidate {
    value: Rational,
    controllers: Vec<NodeId>,
    mesh: Vec<Link>,
    c2c_indices: Vec<usize>,
    assignment: Vec<(NodeId, NodeId)>,
    s2c: Vec<((NodeId, NodeId), usize)>,
}

impl Candidate {
    fn tie_key(&self) -> (&Rational, &Vec<NodeId>, &Vec<Link>, &Vec<usize>) {
        (&self.value, &self.controllers, &self.mesh, &self.c2c_indices)
    }
}

struct SubsetOutcome {
    candidate: Option<Candidate>,
    nodes_explored: u64,
    exhausted: bool,
    stage: Stage,
}

/// Exact solve over the catalog-defined search space.
pub fn solve(instance: &Instance, config: &SolverConfig) -> Result<SolveOutcome, SolveError> {
    let started = Instant::now();
    let sites: Vec<NodeId> = instance.net().datacenters().iter().copied().collect();
    if sites.len() > MAX_SITES {
        return Err(SolveError::TooManySites(sites.len()));
    }

    let params = instance.params();
    let mut count_valid = 0u64;
    let mut subsets: Vec<Vec<NodeId>> = Vec::new();
    for mask in 1u32..(1 << sites.len()) {
        let subset: Vec<NodeId> = sites
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &f)| f)
            .collect();
        let size = subset.len() as u32;
        if size < params.q || !config.controller_count.admits(size) {
            continue;
        }
        count_valid += 1;
        if covers_islands(instance, &subset) {
            subsets.push(subset);
        }
    }
    subsets.sort();

    let baseline_stage = if count_valid == 0 {
        Stage::NoCountValidSubsets
    } else {
        Stage::AllIslandFiltered
    };
    if subsets.is_empty() {
        return Err(SolveError::Infeasible {
            family: baseline_stage.family(),
        });
    }

    let costs = CostModel::build(instance, config.objective);
    let run = || -> Vec<SubsetOutcome> {
        subsets
            .par_iter()
            .map(|s| solve_subset(instance, &costs, s, config.node_budget))
            .collect()
    };
    let outcomes = if config.worker_count > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.worker_count)
            .build()
            .expect("thread pool");
        pool.install(run)
    } else {
        run()
    };

    let mut best: Option<Candidate> = None;
    let mut nodes_explored = 0u64;
    let mut exhausted = false;
    let mut stage = baseline_stage;
    for outcome in outcomes {
        nodes_explored += outcome.nodes_explored;
        exhausted |= outcome.exhausted;
        stage = stage.max(outcome.stage);
        if let Some(c) = outcome.candidate {
            let better = match &best {
                None => true,
                Some(b) => c.tie_key() < b.tie_key(),
            };
            if better {
                best = Some(c);
            }
        }
    }

    let candidate = match best {
        Some(c) => c,
        None if exhausted => return Err(SolveError::BudgetExhausted),
        None => {
            return Err(SolveError::Infeasible {
                family: stage.family(),
            })
        }
    };

    let design = CnmDesign::new(
        instance,
        candidate.controllers.iter().copied(),
        candidate.mesh.iter().map(|l| l.endpoints()),
        candidate.assignment.iter().copied(),
        candidate
            .mesh
            .iter()
            .zip(&candidate.c2c_indices)
            .map(|(l, &idx)| (l.endpoints(), idx)),
        candidate.s2c.iter().copied(),
    )
    .expect("solver emits structurally valid designs");

    // The checker is the authority; a disagreement here is a solver bug.
    let checked = instance.with_forced_count(config.controller_count.forced());
    let report = check_feasibility(&checked, &design);
    assert!(
        report.is_feasible(),
        "solver produced an infeasible design: {:?}",
        report.violations()
    );
    let value = objective_value(instance, &design, config.objective);
    assert_eq!(value, candidate.value, "objective accounting mismatch");

    Ok(SolveOutcome {
        design,
        objective: config.objective,
        objective_value: candidate.value,
        proof: if exhausted {
            Proof::BudgetExhausted
        } else {
            Proof::Optimal
        },
        stats: SolveStats {
            subsets_enumerated: subsets.len() as u64,
            nodes_explored,
            wall: started.elapsed(),
        },
    })
}

/// Every switch must see at least k members of the set in its island.
fn covers_islands(instance: &Instance, subset: &[NodeId]) -> bool {
    let catalog = instance.catalog();
    let k = instance.params().k as usize;
    instance
        .net()
        .nodes()
        .all(|i| subset.iter().filter(|&&f| catalog.within_latency(i, f)).count() >= k)
}

fn solve_subset(
    instance: &Instance,
    costs: &CostModel,
    subset: &[NodeId],
    node_budget: u64,
) -> SubsetOutcome {
    let (assign_cost, assignment, s2c) =
        match assignment::assign_switches(instance, costs, subset) {
            Some(t) => t,
            None => {
                return SubsetOutcome {
                    candidate: None,
                    nodes_explored: 0,
                    exhausted: false,
                    stage: Stage::AssignmentFailed,
                }
            }
        };

    if subset.len() == 1 {
        // Degenerate mesh: no controller pairs, nothing to map or survive.
        return SubsetOutcome {
            candidate: Some(Candidate {
                value: assign_cost,
                controllers: subset.to_vec(),
                mesh: Vec::new(),
                c2c_indices: Vec::new(),
                assignment,
                s2c,
            }),
            nodes_explored: 1,
            exhausted: false,
            stage: Stage::Found,
        };
    }

    let search = search::search_mesh(instance, costs, subset, node_budget);
    let stage = if search.best.is_some() {
        Stage::Found
    } else if search.any_redundant_mesh {
        Stage::SurvivabilityFailed
    } else {
        Stage::NoRedundantMesh
    };
    SubsetOutcome {
        candidate: search.best.map(|found| Candidate {
            value: assign_cost + found.value,
            controllers: subset.to_vec(),
            mesh: found.mesh,
            c2c_indices: found.indices,
            assignment: assignment.clone(),
            s2c: s2c.clone(),
        }),
        nodes_explored: search.nodes,
        exhausted: search.exhausted,
        stage,
    }
}

impl Default for SolveStats {
    fn default() -> Self {
        SolveStats {
            subsets_enumerated: 0,
            nodes_explored: 0,
            wall: Duration::ZERO,
        }
    }
}
