//! MILP export in LP text format and solution import.
//!
//! The export is the full joint model: placement, assignment, virtual
//! mesh as two units of arc-disjoint flow per controller pair, path
//! selection over the catalog, and per-disaster survivability flow.
//! Logical products become standard conjunction linearizations, and
//! threshold tests use big-M rows with M = |N| * K. Pair-level rows
//! that only apply between active controllers are gated by w_st, the
//! linearized conjunction of the two placement variables; without the
//! gate the flow rows would force every candidate site to host a
//! controller.
//!
//! Variable families (zones are indexed y0, y1, ... in input order):
//!   C_f          controller active at site f
//!   w_s_t        both s and t active (s < t)
//!   V_s_t        virtual link between controllers s and t (s < t)
//!   a_i_f        switch i assigned to controller f
//!   m_i_j_s_t    arc i->j carries mesh flow for pair (s, t)
//!   o_i_j_s_t    i, j, s, t all host controllers
//!   A_s_t_p      catalog path p realizes virtual link (s, t)
//!   X_i_f_p      catalog path p realizes channel i -> f
//!   K_s_t_y      virtual link (s, t) survives zone y
//!   Kp_i_j_s_t_y arc i->j carries post-disaster flow for (s, t) in y
//!
//! With n = |N|, F = |F|, K paths per pair, Y zones, and every pair
//! holding a full catalog, the variable count is
//!   F + nF + (F choose 2) * (2 + K + Y) + F(F-1) * (F choose 2) * (2 + Y)
//!     + (n-1) * F * K
//! which `lp_variable_count` evaluates.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_traits::Zero;

use crate::disaster::SurvivalMatrix;
use crate::model::{CnmDesign, Instance, Objective, StructuralError};
use crate::rational::{format_exact, Rational};
use crate::topology::NodeId;

use super::{ControllerCount, SolverConfig};

/// Closed-form count of exported binaries when every pair of distinct
/// nodes has exactly `k` catalog paths.
pub fn lp_variable_count(nodes: u64, sites: u64, k: u64, zones: u64) -> u64 {
    let pairs = sites * (sites - 1) / 2;
    let arcs = sites * (sites - 1);
    sites                      // C
        + pairs * 2            // w, V
        + nodes * sites        // a
        + arcs * pairs * 2     // m, o
        + pairs * k            // A
        + (nodes - 1) * sites * k // X
        + pairs * zones        // K
        + arcs * pairs * zones // Kp
}

fn coef(r: &Rational) -> String {
    let text = format_exact(r);
    debug_assert!(
        !text.contains('/'),
        "LP coefficients must be decimal-exact, got {text}"
    );
    text
}

struct Lp {
    out: String,
    binaries: Vec<String>,
}

impl Lp {
    fn term(buf: &mut String, first: &mut bool, c: &Rational, var: &str) {
        if c.is_zero() {
            return;
        }
        let neg = c < &Rational::zero();
        let mag = if neg { -*c } else { *c };
        if *first {
            if neg {
                buf.push_str("- ");
            }
            *first = false;
        } else if neg {
            buf.push_str(" - ");
        } else {
            buf.push_str(" + ");
        }
        if mag != Rational::from_integer(1) {
            let _ = write!(buf, "{} ", coef(&mag));
        }
        buf.push_str(var);
    }

    fn row(&mut self, name: &str, terms: &[(Rational, String)], op: &str, rhs: &Rational) {
        let mut buf = String::new();
        let mut first = true;
        for (c, v) in terms {
            Self::term(&mut buf, &mut first, c, v);
        }
        if first {
            // Constant row; anchor it on a throwaway zero term.
            let anchor = self
                .binaries
                .first()
                .cloned()
                .unwrap_or_else(|| "C_0".to_string());
            buf = format!("0 {anchor}");
        }
        let _ = writeln!(self.out, " {name}: {buf} {op} {}", coef(rhs));
    }

    fn declare(&mut self, name: String) -> String {
        self.binaries.push(name.clone());
        name
    }
}

fn one() -> Rational {
    Rational::from_integer(1)
}

fn int(v: i128) -> Rational {
    Rational::from_integer(v)
}

/// Complete MILP for the instance under the configured objective and
/// controller-count policy.
pub fn export_lp(instance: &Instance, config: &SolverConfig) -> String {
    let net = instance.net();
    let catalog = instance.catalog();
    let params = instance.params();
    let matrix = SurvivalMatrix::build(catalog, instance.disasters());
    let zones = instance.disasters().zones();
    let sites: Vec<NodeId> = net.datacenters().iter().copied().collect();
    let nodes: Vec<NodeId> = net.nodes().collect();
    let site_pairs: Vec<(NodeId, NodeId)> = sites
        .iter()
        .enumerate()
        .flat_map(|(i, &s)| sites[i + 1..].iter().map(move |&t| (s, t)))
        .collect();
    let arcs: Vec<(NodeId, NodeId)> = sites
        .iter()
        .flat_map(|&i| sites.iter().filter(move |&&j| j != i).map(move |&j| (i, j)))
        .collect();
    let big_m = int(nodes.len() as i128 * params.catalog_k as i128);

    let n_c = |f: NodeId| format!("C_{}", f.0);
    let n_w = |s: NodeId, t: NodeId| format!("w_{}_{}", s.0, t.0);
    let n_v = |s: NodeId, t: NodeId| format!("V_{}_{}", s.0, t.0);
    let n_a = |i: NodeId, f: NodeId| format!("a_{}_{}", i.0, f.0);
    let n_m = |i: NodeId, j: NodeId, s: NodeId, t: NodeId| {
        format!("m_{}_{}_{}_{}", i.0, j.0, s.0, t.0)
    };
    let n_o = |i: NodeId, j: NodeId, s: NodeId, t: NodeId| {
        format!("o_{}_{}_{}_{}", i.0, j.0, s.0, t.0)
    };
    let n_path = |s: NodeId, t: NodeId, p: usize| format!("A_{}_{}_{}", s.0, t.0, p);
    let n_x = |i: NodeId, f: NodeId, p: usize| format!("X_{}_{}_{}", i.0, f.0, p);
    let n_k = |s: NodeId, t: NodeId, y: usize| format!("K_{}_{}_y{}", s.0, t.0, y);
    let n_kp = |i: NodeId, j: NodeId, s: NodeId, t: NodeId, y: usize| {
        format!("Kp_{}_{}_{}_{}_y{}", i.0, j.0, s.0, t.0, y)
    };

    let mut lp = Lp {
        out: String::new(),
        binaries: Vec::new(),
    };
    let _ = writeln!(lp.out, "\\ control network mapping MILP");
    let _ = writeln!(lp.out, "\\ objective: {}", config.objective);
    for (y, zone) in zones.iter().enumerate() {
        let _ = writeln!(lp.out, "\\ zone y{y} = {}", zone.id());
    }

    // Declarations drive both the Binaries section and the name reuse
    // below; order matches the family table in the module docs.
    for &f in &sites {
        lp.declare(n_c(f));
    }
    for &(s, t) in &site_pairs {
        lp.declare(n_w(s, t));
        lp.declare(n_v(s, t));
    }
    for &i in &nodes {
        for &f in &sites {
            lp.declare(n_a(i, f));
        }
    }
    for &(i, j) in &arcs {
        for &(s, t) in &site_pairs {
            lp.declare(n_m(i, j, s, t));
            lp.declare(n_o(i, j, s, t));
        }
    }
    for &(s, t) in &site_pairs {
        for p in 0..catalog.paths(s, t).len() {
            lp.declare(n_path(s, t, p));
        }
    }
    for &i in &nodes {
        for &f in &sites {
            if i == f {
                continue;
            }
            for p in 0..catalog.paths(i, f).len() {
                lp.declare(n_x(i, f, p));
            }
        }
    }
    for y in 0..zones.len() {
        for &(s, t) in &site_pairs {
            lp.declare(n_k(s, t, y));
        }
        for &(i, j) in &arcs {
            for &(s, t) in &site_pairs {
                lp.declare(n_kp(i, j, s, t, y));
            }
        }
    }

    // Objective: channel costs per selected catalog path. Risk weights
    // are the affected-path expectations, resources are hop counts.
    let path_cost = |a: NodeId, b: NodeId, p: usize| -> Rational {
        match config.objective {
            Objective::MinRisk => matrix.fates(catalog, a, b)[p].risk,
            Objective::MinResource => int(catalog.paths(a, b)[p].len() as i128),
        }
    };
    let mut obj = String::new();
    let mut first = true;
    for &(s, t) in &site_pairs {
        for p in 0..catalog.paths(s, t).len() {
            Lp::term(&mut obj, &mut first, &path_cost(s, t, p), &n_path(s, t, p));
        }
    }
    for &i in &nodes {
        for &f in &sites {
            if i == f {
                continue;
            }
            for p in 0..catalog.paths(i, f).len() {
                Lp::term(&mut obj, &mut first, &path_cost(i, f, p), &n_x(i, f, p));
            }
        }
    }
    if first {
        obj = format!("0 {}", n_c(sites[0]));
    }
    let _ = writeln!(lp.out, "Minimize");
    let _ = writeln!(lp.out, " obj: {obj}");
    let _ = writeln!(lp.out, "Subject To");

    // Coverage: k controllers inside every switch's island.
    for &i in &nodes {
        let terms: Vec<_> = sites
            .iter()
            .filter(|&&f| catalog.within_latency(i, f))
            .map(|&f| (one(), n_c(f)))
            .collect();
        lp.row(&format!("r1_i{}", i.0), &terms, ">=", &int(params.k as i128));
    }
    // Active-count policy.
    let all_c: Vec<_> = sites.iter().map(|&f| (one(), n_c(f))).collect();
    lp.row("rq", &all_c, ">=", &int(params.q as i128));
    match config.controller_count {
        ControllerCount::Any => {}
        ControllerCount::Exactly(v) => lp.row("rcount", &all_c, "=", &int(v as i128)),
        ControllerCount::Range(lo, hi) => {
            lp.row("rcount_lo", &all_c, ">=", &int(lo as i128));
            lp.row("rcount_hi", &all_c, "<=", &int(hi as i128));
        }
    }
    // Placement/assignment coupling and capacity.
    for &f in &sites {
        let mut le: Vec<_> = vec![(one(), n_c(f))];
        le.extend(nodes.iter().map(|&i| (-one(), n_a(i, f))));
        lp.row(&format!("r2a_f{}", f.0), &le, "<=", &Rational::zero());
        let mut ge: Vec<_> = vec![(big_m, n_c(f))];
        ge.extend(nodes.iter().map(|&i| (-one(), n_a(i, f))));
        lp.row(&format!("r2b_f{}", f.0), &ge, ">=", &Rational::zero());
        let cap: Vec<_> = nodes.iter().map(|&i| (one(), n_a(i, f))).collect();
        lp.row(&format!("r3_f{}", f.0), &cap, "<=", &int(params.b as i128));
    }
    // Exactly one assignment per switch, self-assignment for hosts.
    for &i in &nodes {
        let terms: Vec<_> = sites.iter().map(|&f| (one(), n_a(i, f))).collect();
        lp.row(&format!("r4_i{}", i.0), &terms, "=", &one());
    }
    for &f in &sites {
        lp.row(
            &format!("r4a_f{}", f.0),
            &[(one(), n_a(f, f)), (-one(), n_c(f))],
            ">=",
            &Rational::zero(),
        );
    }
    // Latency: out-of-island assignments pinned to zero.
    for &i in &nodes {
        for &f in &sites {
            if !catalog.within_latency(i, f) {
                lp.row(
                    &format!("r5_i{}_f{}", i.0, f.0),
                    &[(one(), n_a(i, f))],
                    "=",
                    &Rational::zero(),
                );
            }
        }
    }
    // Target validity: a_if <= C_f, and for i != f also a_if <= 1 - C_i.
    for &i in &nodes {
        for &f in &sites {
            lp.row(
                &format!("r6a_i{}_f{}", i.0, f.0),
                &[(one(), n_a(i, f)), (-one(), n_c(f))],
                "<=",
                &Rational::zero(),
            );
            // Hosts must not be assigned elsewhere; for non-sites C_i
            // does not exist (identically zero) and the row is vacuous.
            if i != f && net.is_datacenter(i) {
                lp.row(
                    &format!("r6b_i{}_f{}", i.0, f.0),
                    &[(one(), n_a(i, f)), (one(), n_c(i))],
                    "<=",
                    &one(),
                );
            }
        }
    }
    // w_st = C_s and C_t.
    for &(s, t) in &site_pairs {
        let w = n_w(s, t);
        lp.row(
            &format!("rw1_{}_{}", s.0, t.0),
            &[(one(), w.clone()), (-one(), n_c(s))],
            "<=",
            &Rational::zero(),
        );
        lp.row(
            &format!("rw2_{}_{}", s.0, t.0),
            &[(one(), w.clone()), (-one(), n_c(t))],
            "<=",
            &Rational::zero(),
        );
        lp.row(
            &format!("rw3_{}_{}", s.0, t.0),
            &[(one(), w), (-one(), n_c(s)), (-one(), n_c(t))],
            ">=",
            &-one(),
        );
    }
    // o = conjunction of the four placements; m rides only on o.
    for &(i, j) in &arcs {
        for &(s, t) in &site_pairs {
            let o = n_o(i, j, s, t);
            let tag = format!("{}_{}_{}_{}", i.0, j.0, s.0, t.0);
            for (idx, &site) in [i, j, s, t].iter().enumerate() {
                lp.row(
                    &format!("r7a{}_{}", idx + 1, tag),
                    &[(one(), o.clone()), (-one(), n_c(site))],
                    "<=",
                    &Rational::zero(),
                );
            }
            let mut ge = vec![(one(), o.clone())];
            for &site in &[i, j, s, t] {
                ge.push((-one(), n_c(site)));
            }
            lp.row(&format!("r7a5_{tag}"), &ge, ">=", &int(-3));
            lp.row(
                &format!("r7b_{tag}"),
                &[(one(), n_m(i, j, s, t)), (-one(), o)],
                "<=",
                &Rational::zero(),
            );
        }
    }
    // Mesh redundancy: two units of arc-disjoint flow per active pair.
    for &(s, t) in &site_pairs {
        let w = n_w(s, t);
        for &i in &sites {
            let mut terms: Vec<(Rational, String)> = Vec::new();
            for &j in &sites {
                if j == i {
                    continue;
                }
                terms.push((one(), n_m(i, j, s, t)));
                terms.push((-one(), n_m(j, i, s, t)));
            }
            let tag = format!("{}_{}_{}", s.0, t.0, i.0);
            if i == s {
                terms.push((-int(2), w.clone()));
                lp.row(&format!("r8src_{tag}"), &terms, ">=", &Rational::zero());
            } else if i == t {
                terms.push((int(2), w.clone()));
                lp.row(&format!("r8snk_{tag}"), &terms, "<=", &Rational::zero());
            } else {
                lp.row(&format!("r8mid_{tag}"), &terms, "=", &Rational::zero());
            }
        }
    }
    // Virtual links exist exactly where mesh flow runs.
    for &(s, t) in &site_pairs {
        let mut le = vec![(one(), n_v(s, t))];
        let mut ge = vec![(big_m, n_v(s, t))];
        for &(x, y) in &site_pairs {
            for (u, v) in [(s, t), (t, s)] {
                le.push((-one(), n_m(u, v, x, y)));
                ge.push((-one(), n_m(u, v, x, y)));
            }
        }
        lp.row(&format!("r9a_{}_{}", s.0, t.0), &le, "<=", &Rational::zero());
        lp.row(&format!("r9b_{}_{}", s.0, t.0), &ge, ">=", &Rational::zero());
    }
    // One catalog path per existing channel.
    for &(s, t) in &site_pairs {
        let mut terms: Vec<_> = (0..catalog.paths(s, t).len())
            .map(|p| (one(), n_path(s, t, p)))
            .collect();
        terms.push((-one(), n_v(s, t)));
        lp.row(&format!("r10a_{}_{}", s.0, t.0), &terms, "=", &Rational::zero());
    }
    for &i in &nodes {
        for &f in &sites {
            if i == f {
                continue;
            }
            let mut terms: Vec<_> = (0..catalog.paths(i, f).len())
                .map(|p| (one(), n_x(i, f, p)))
                .collect();
            terms.push((-one(), n_a(i, f)));
            lp.row(
                &format!("r10b_i{}_f{}", i.0, f.0),
                &terms,
                "=",
                &Rational::zero(),
            );
        }
    }
    // Survivability: K flags surviving links, Kp routes one unit of
    // post-disaster flow between pairs whose hosts both survive.
    for (y, zone) in zones.iter().enumerate() {
        for &(s, t) in &site_pairs {
            let fates = matrix.fates(catalog, s, t);
            let mut terms: Vec<(Rational, String)> = (0..catalog.paths(s, t).len())
                .filter(|&p| fates[p].survives[y])
                .map(|p| (one(), n_path(s, t, p)))
                .collect();
            terms.push((-one(), n_k(s, t, y)));
            lp.row(
                &format!("r11a_{}_{}_y{y}", s.0, t.0),
                &terms,
                "=",
                &Rational::zero(),
            );
        }
        for &(i, j) in &arcs {
            for &(s, t) in &site_pairs {
                let (lo, hi) = if i < j { (i, j) } else { (j, i) };
                lp.row(
                    &format!("r11b_{}_{}_{}_{}_y{y}", i.0, j.0, s.0, t.0),
                    &[(one(), n_kp(i, j, s, t, y)), (-one(), n_k(lo, hi, y))],
                    "<=",
                    &Rational::zero(),
                );
            }
        }
        for &(s, t) in &site_pairs {
            if zone.node_failed(s) || zone.node_failed(t) {
                continue;
            }
            let w = n_w(s, t);
            for &i in &sites {
                let mut terms: Vec<(Rational, String)> = Vec::new();
                for &j in &sites {
                    if j == i {
                        continue;
                    }
                    terms.push((one(), n_kp(i, j, s, t, y)));
                    terms.push((-one(), n_kp(j, i, s, t, y)));
                }
                let tag = format!("{}_{}_{}_y{y}", s.0, t.0, i.0);
                if i == s {
                    terms.push((-one(), w.clone()));
                    lp.row(&format!("r19src_{tag}"), &terms, ">=", &Rational::zero());
                } else if i == t {
                    terms.push((one(), w.clone()));
                    lp.row(&format!("r19snk_{tag}"), &terms, "<=", &Rational::zero());
                } else {
                    lp.row(&format!("r19mid_{tag}"), &terms, "=", &Rational::zero());
                }
            }
        }
    }

    let _ = writeln!(lp.out, "Binaries");
    for name in &lp.binaries {
        let _ = writeln!(lp.out, " {name}");
    }
    let _ = writeln!(lp.out, "End");
    lp.out
}

#[derive(Debug, thiserror::Error)]
pub enum ImportError {
    #[error("line {0}: expected 'name value'")]
    Malformed(usize),
    #[error("line {0}: value is not a number")]
    BadValue(usize),
    #[error("conflicting values for {0}")]
    Conflict(String),
    #[error("inconsistent solution: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Structural(#[from] StructuralError),
}

/// Rebuilds a design from "name value" lines as printed by external
/// MILP tools. Only the C/V/a/A/X families matter; flow and gating
/// variables are ignored. The caller still runs the feasibility check.
pub fn import_solution(instance: &Instance, text: &str) -> Result<CnmDesign, ImportError> {
    let mut values: BTreeMap<String, bool> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('\\') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (name, value) = match (parts.next(), parts.next(), parts.next()) {
            (Some(n), Some(v), None) => (n, v),
            _ => return Err(ImportError::Malformed(idx + 1)),
        };
        let value: f64 = value.parse().map_err(|_| ImportError::BadValue(idx + 1))?;
        if !value.is_finite() {
            return Err(ImportError::BadValue(idx + 1));
        }
        let set = value > 0.5;
        if let Some(prev) = values.insert(name.to_string(), set) {
            if prev != set {
                return Err(ImportError::Conflict(name.to_string()));
            }
        }
    }

    let fields = |name: &str| -> Option<Vec<u32>> {
        name.split('_')
            .skip(1)
            .map(|p| p.parse::<u32>().ok())
            .collect()
    };
    let mut controllers: BTreeSet<NodeId> = BTreeSet::new();
    let mut vlinks: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
    let mut assignment: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
    let mut c2c: BTreeMap<(NodeId, NodeId), usize> = BTreeMap::new();
    let mut s2c: BTreeMap<(NodeId, NodeId), usize> = BTreeMap::new();
    for (name, &set) in &values {
        if !set {
            continue;
        }
        let family = name.split('_').next().unwrap_or("");
        let nums = fields(name);
        match (family, nums.as_deref()) {
            ("C", Some([f])) => {
                controllers.insert(NodeId(*f));
            }
            ("V", Some([s, t])) => {
                vlinks.insert((NodeId(*s), NodeId(*t)));
            }
            ("a", Some([i, f])) => {
                assignment.insert((NodeId(*i), NodeId(*f)));
            }
            ("A", Some([s, t, p])) => {
                let key = (NodeId(*s), NodeId(*t));
                if c2c.insert(key, *p as usize).is_some() {
                    return Err(ImportError::Inconsistent(format!(
                        "two paths selected for virtual link {s}-{t}"
                    )));
                }
            }
            ("X", Some([i, f, p])) => {
                let key = (NodeId(*i), NodeId(*f));
                if s2c.insert(key, *p as usize).is_some() {
                    return Err(ImportError::Inconsistent(format!(
                        "two paths selected for channel {i}-{f}"
                    )));
                }
            }
            _ => {} // flow, gating, survival, or foreign names
        }
    }

    for &(s, t) in c2c.keys() {
        if !vlinks.contains(&(s, t)) && !vlinks.contains(&(t, s)) {
            return Err(ImportError::Inconsistent(format!(
                "path selected for absent virtual link {}-{}",
                s.0, t.0
            )));
        }
    }
    for &(i, f) in s2c.keys() {
        if !assignment.contains(&(i, f)) {
            return Err(ImportError::Inconsistent(format!(
                "path selected for absent assignment {}-{}",
                i.0, f.0
            )));
        }
    }

    let design = CnmDesign::new(
        instance,
        controllers.iter().copied(),
        vlinks.iter().copied(),
        assignment.iter().copied(),
        c2c.iter().map(|(&k, &v)| (k, v)),
        s2c.iter().map(|(&k, &v)| (k, v)),
    )?;
    Ok(design)
}
