//! Disaster post-mortems and the controller-count sweep harness.
//!
//! Simulation is a deterministic worst case: every element of a zone
//! fails, probabilities play no role here. The exclusion rule matches
//! the reporting convention the counts are compared against: channels
//! whose own endpoint died are not "disrupted", they are gone with the
//! node, so failed_c2c and failed_s2c only count channels between
//! surviving endpoints whose mapped path was hit. Disconnection is
//! reported twice: raw (the switch's channel is dead) and after a
//! reassignment pass that re-homes orphaned switches onto surviving
//! in-latency controllers with spare capacity, computed as a maximum
//! matching so capacity contention never inflates the count.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use crate::disaster::DisasterZone;
use crate::model::{objective_value, CnmDesign, Instance, Objective};
use crate::solver::{solve, ControllerCount, SolveError, SolverConfig};
use crate::topology::NodeId;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisruptionReport {
    pub disaster_id: String,
    /// Controllers sitting on failed nodes.
    pub failed_controllers: Vec<NodeId>,
    /// Virtual links between surviving controllers whose path was hit.
    pub failed_c2c: u32,
    /// Channels between surviving switch and surviving controller whose
    /// path was hit.
    pub failed_s2c: u32,
    /// Surviving switches whose channel to their controller is dead.
    pub disconnected_raw: u32,
    /// Raw minus the switches a reassignment pass can re-home.
    pub disconnected_after_reassign: u32,
    /// Surviving controllers split by dead virtual links.
    pub islanded: bool,
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("unknown disaster id {0:?}")]
    UnknownDisaster(String),
    #[error("unknown report format {0:?} (expected csv or svg)")]
    UnknownFormat(String),
    #[error("malformed report csv at line {0}")]
    MalformedCsv(usize),
}

/// Worst-case application of one zone to a design.
pub fn simulate(
    instance: &Instance,
    design: &CnmDesign,
    disaster_id: &str,
) -> Result<DisruptionReport, EvalError> {
    let zone = instance
        .disasters()
        .zone(disaster_id)
        .ok_or_else(|| EvalError::UnknownDisaster(disaster_id.to_string()))?;
    Ok(simulate_zone(instance, design, zone))
}

pub fn simulate_zone(
    instance: &Instance,
    design: &CnmDesign,
    zone: &DisasterZone,
) -> DisruptionReport {
    let catalog = instance.catalog();
    let failed_controllers: Vec<NodeId> = design
        .controllers()
        .iter()
        .copied()
        .filter(|&f| zone.node_failed(f))
        .collect();
    let survivors: BTreeSet<NodeId> = design
        .controllers()
        .iter()
        .copied()
        .filter(|&f| !zone.node_failed(f))
        .collect();

    let mut failed_c2c = 0u32;
    let mut alive_mesh: Vec<(NodeId, NodeId)> = Vec::new();
    for (link, &idx) in design.c2c_mapping() {
        let (s, t) = link.endpoints();
        if zone.node_failed(s) || zone.node_failed(t) {
            continue; // gone with the endpoint, not disrupted
        }
        let path = catalog
            .oriented_path(s, t, idx)
            .expect("validated design indices resolve");
        if zone.path_survives(&path) {
            alive_mesh.push((s, t));
        } else {
            failed_c2c += 1;
        }
    }

    let mut failed_s2c = 0u32;
    let mut disconnected: Vec<NodeId> = Vec::new();
    for (&(i, f), &idx) in design.s2c_mapping() {
        if zone.node_failed(i) {
            continue;
        }
        let path = catalog
            .oriented_path(i, f, idx)
            .expect("validated design indices resolve");
        let alive = zone.path_survives(&path);
        if !alive {
            disconnected.push(i);
        }
        if !zone.node_failed(f) && !alive {
            failed_s2c += 1;
        }
    }

    let islanded = if survivors.len() <= 1 {
        false
    } else {
        let mut reached = BTreeSet::new();
        let start = *survivors.iter().next().expect("nonempty");
        let mut queue = VecDeque::from([start]);
        reached.insert(start);
        while let Some(u) = queue.pop_front() {
            for &(s, t) in &alive_mesh {
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
        reached.len() != survivors.len()
    };

    let reassigned = reassign(instance, design, zone, &disconnected, &survivors);
    DisruptionReport {
        disaster_id: zone.id().to_string(),
        failed_controllers,
        failed_c2c,
        failed_s2c,
        disconnected_raw: disconnected.len() as u32,
        disconnected_after_reassign: disconnected.len() as u32 - reassigned,
        islanded,
    }
}

/// Hop distances from `from` over the post-disaster graph.
fn post_disaster_distances(
    instance: &Instance,
    zone: &DisasterZone,
    from: NodeId,
) -> BTreeMap<NodeId, u32> {
    let mut dist = BTreeMap::new();
    if zone.node_failed(from) {
        return dist;
    }
    dist.insert(from, 0);
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        let d = dist[&u];
        for link in instance.net().links() {
            let (a, b) = link.endpoints();
            let v = if a == u {
                b
            } else if b == u {
                a
            } else {
                continue;
            };
            if zone.node_failed(v) || zone.link_failed(*link) || dist.contains_key(&v) {
                continue;
            }
            dist.insert(v, d + 1);
            queue.push_back(v);
        }
    }
    dist
}

/// Maximum number of orphaned switches that fit onto surviving
/// controllers reachable within the latency limit on the post-disaster
/// graph, respecting residual capacity (B minus host and minus switches
/// whose channels survived).
fn reassign(
    instance: &Instance,
    design: &CnmDesign,
    zone: &DisasterZone,
    disconnected: &[NodeId],
    survivors: &BTreeSet<NodeId>,
) -> u32 {
    if disconnected.is_empty() || survivors.is_empty() {
        return 0;
    }
    let catalog = instance.catalog();
    let controllers: Vec<NodeId> = survivors.iter().copied().collect();
    let residual: Vec<u32> = controllers
        .iter()
        .map(|&g| {
            let retained = design
                .s2c_mapping()
                .iter()
                .filter(|(&(i, f), &idx)| {
                    f == g
                        && !zone.node_failed(i)
                        && zone.path_survives(
                            &catalog.oriented_path(i, f, idx).expect("valid index"),
                        )
                })
                .count() as u32;
            (instance.params().b - 1).saturating_sub(retained)
        })
        .collect();

    let limit = instance.params().latency_hops;
    let candidates: Vec<Vec<usize>> = disconnected
        .iter()
        .map(|&i| {
            let dist = post_disaster_distances(instance, zone, i);
            controllers
                .iter()
                .enumerate()
                .filter(|(_, &g)| dist.get(&g).is_some_and(|&d| d <= limit))
                .map(|(ci, _)| ci)
                .collect()
        })
        .collect();

    // Kuhn's augmenting matching over capacity slots.
    let mut matched_to: Vec<Vec<usize>> = vec![Vec::new(); controllers.len()];
    let mut owner: Vec<Option<usize>> = vec![None; disconnected.len()];
    fn augment(
        s: usize,
        candidates: &[Vec<usize>],
        residual: &[u32],
        matched_to: &mut Vec<Vec<usize>>,
        owner: &mut Vec<Option<usize>>,
        visited: &mut Vec<bool>,
    ) -> bool {
        for &c in &candidates[s] {
            if visited[c] {
                continue;
            }
            visited[c] = true;
            if (matched_to[c].len() as u32) < residual[c] {
                matched_to[c].push(s);
                owner[s] = Some(c);
                return true;
            }
            for slot in 0..matched_to[c].len() {
                let other = matched_to[c][slot];
                if augment(other, candidates, residual, matched_to, owner, visited) {
                    matched_to[c][slot] = s;
                    owner[s] = Some(c);
                    return true;
                }
            }
        }
        false
    }
    let mut total = 0u32;
    for s in 0..disconnected.len() {
        let mut visited = vec![false; controllers.len()];
        if augment(
            s,
            &candidates,
            &residual,
            &mut matched_to,
            &mut owner,
            &mut visited,
        ) {
            total += 1;
        }
    }
    total
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    pub objective: Objective,
    pub controller_count: u32,
    pub disaster_id: String,
    pub failed_controllers: u32,
    pub failed_c2c: u32,
    pub failed_s2c: u32,
    pub disconnected_raw: u32,
    pub disconnected_after_reassign: u32,
    pub islanded: bool,
    /// MinResource metric of the design, whatever the solve objective.
    pub resource_links: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedCell {
    pub objective: Objective,
    pub controller_count: u32,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
    pub skipped: Vec<SkippedCell>,
}

/// Solve and post-mortem every (objective, forced count) cell. Cells
/// whose solve fails are recorded as skipped and the sweep moves on.
/// Each cell yields one row per zone, plus an "all" aggregate row when
/// the model holds two or more zones (and a zero "none" row when it
/// holds none, so resource data is still reported).
pub fn sweep(
    instance: &Instance,
    objectives: &[Objective],
    counts: &[u32],
    base: &SolverConfig,
) -> Sweep {
    let mut out = Sweep::default();
    for &objective in objectives {
        for &count in counts {
            let mut config = *base;
            config.objective = objective;
            config.controller_count = ControllerCount::Exactly(count);
            let outcome = match solve(instance, &config) {
                Ok(o) => o,
                Err(e) => {
                    let reason = match e {
                        SolveError::Infeasible { family } => format!("{family} infeasible"),
                        other => other.to_string(),
                    };
                    out.skipped.push(SkippedCell {
                        objective,
                        controller_count: count,
                        reason,
                    });
                    continue;
                }
            };
            let resource =
                objective_value(instance, &outcome.design, Objective::MinResource);
            debug_assert!(resource.is_integer());
            let resource_links = resource.to_integer() as u64;
            let row = |report: &DisruptionReport| SweepRow {
                objective,
                controller_count: count,
                disaster_id: report.disaster_id.clone(),
                failed_controllers: report.failed_controllers.len() as u32,
                failed_c2c: report.failed_c2c,
                failed_s2c: report.failed_s2c,
                disconnected_raw: report.disconnected_raw,
                disconnected_after_reassign: report.disconnected_after_reassign,
                islanded: report.islanded,
                resource_links,
            };
            let zones = instance.disasters().zones();
            if zones.is_empty() {
                out.rows.push(SweepRow {
                    objective,
                    controller_count: count,
                    disaster_id: "none".to_string(),
                    failed_controllers: 0,
                    failed_c2c: 0,
                    failed_s2c: 0,
                    disconnected_raw: 0,
                    disconnected_after_reassign: 0,
                    islanded: false,
                    resource_links,
                });
                continue;
            }
            let reports: Vec<DisruptionReport> = zones
                .iter()
                .map(|z| simulate_zone(instance, &outcome.design, z))
                .collect();
            for report in &reports {
                out.rows.push(row(report));
            }
            if zones.len() >= 2 {
                out.rows.push(SweepRow {
                    objective,
                    controller_count: count,
                    disaster_id: "all".to_string(),
                    failed_controllers: reports
                        .iter()
                        .map(|r| r.failed_controllers.len() as u32)
                        .sum(),
                    failed_c2c: reports.iter().map(|r| r.failed_c2c).sum(),
                    failed_s2c: reports.iter().map(|r| r.failed_s2c).sum(),
                    disconnected_raw: reports.iter().map(|r| r.disconnected_raw).sum(),
                    disconnected_after_reassign: reports
                        .iter()
                        .map(|r| r.disconnected_after_reassign)
                        .sum(),
                    islanded: reports.iter().any(|r| r.islanded),
                    resource_links,
                });
            }
        }
    }
    out
}

pub const CSV_HEADER: &str = "objective,controllers,disaster_id,failed_controllers,failed_c2c,failed_s2c,disconnected_switches_raw,disconnected_switches_after_reassign,islanded,resource_links";

pub fn render_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.objective,
            r.controller_count,
            r.disaster_id,
            r.failed_controllers,
            r.failed_c2c,
            r.failed_s2c,
            r.disconnected_raw,
            r.disconnected_after_reassign,
            r.islanded,
            r.resource_links
        );
    }
    out
}

/// Inverse of [`render_csv`]. Disaster ids must not contain commas,
/// which the renderer already relies on.
pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>, EvalError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == CSV_HEADER => {}
        _ => return Err(EvalError::MalformedCsv(1)),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let bad = || EvalError::MalformedCsv(i + 1);
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 10 {
            return Err(bad());
        }
        let num = |s: &str| s.parse::<u32>().map_err(|_| bad());
        rows.push(SweepRow {
            objective: f[0].parse().map_err(|_| bad())?,
            controller_count: num(f[1])?,
            disaster_id: f[2].to_string(),
            failed_controllers: num(f[3])?,
            failed_c2c: num(f[4])?,
            failed_s2c: num(f[5])?,
            disconnected_raw: num(f[6])?,
            disconnected_after_reassign: num(f[7])?,
            islanded: match f[8] {
                "true" => true,
                "false" => false,
                _ => return Err(bad()),
            },
            resource_links: f[9].parse().map_err(|_| bad())?,
        });
    }
    Ok(rows)
}

pub fn render_report(rows: &[SweepRow], format: &str) -> Result<String, EvalError> {
    match format {
        "csv" => Ok(render_csv(rows)),
        "svg" => Ok(render_svg(rows)),
        other => Err(EvalError::UnknownFormat(other.to_string())),
    }
}

/// The row a chart reads per (objective, count): the "all" aggregate
/// when present, otherwise the single per-zone or "none" row.
fn chart_rows(rows: &[SweepRow]) -> Vec<&SweepRow> {
    let mut groups: BTreeMap<(&str, u32), &SweepRow> = BTreeMap::new();
    for r in rows {
        let key = (r.objective.as_str(), r.controller_count);
        match groups.get(&key) {
            Some(existing) if existing.disaster_id == "all" => {}
            Some(_) if r.disaster_id == "all" => {
                groups.insert(key, r);
            }
            Some(_) => {}
            None => {
                groups.insert(key, r);
            }
        }
    }
    groups.into_values().collect()
}

/// Two fixed-size line charts: disruptions and resource usage against
/// controller count, one polyline per objective. Pure string assembly,
/// byte-identical across runs.
pub fn render_svg(rows: &[SweepRow]) -> String {
    const W: f64 = 800.0;
    const H: f64 = 500.0;
    let panels = [
        (40.0, 360.0, "disruptions"),
        (440.0, 760.0, "resource links"),
    ];
    let (top, bottom) = (40.0, 440.0);

    let data = chart_rows(rows);
    let counts: Vec<u32> = {
        let mut c: Vec<u32> = data.iter().map(|r| r.controller_count).collect();
        c.sort_unstable();
        c.dedup();
        c
    };
    let objectives: Vec<Objective> = Objective::ALL
        .into_iter()
        .filter(|o| data.iter().any(|r| r.objective == *o))
        .collect();
    let colors = |o: Objective| match o {
        Objective::MinRisk => "#1f6fb4",
        Objective::MinResource => "#c23b22",
    };
    let value = |r: &SweepRow, panel: usize| -> u64 {
        if panel == 0 {
            (r.failed_controllers + r.failed_c2c + r.failed_s2c) as u64
        } else {
            r.resource_links
        }
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {W} {H}" width="{W}" height="{H}">"#
    );
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#
    );
    for (panel, &(x0, x1, label)) in panels.iter().enumerate() {
        let max = data
            .iter()
            .map(|r| value(r, panel))
            .max()
            .unwrap_or(0)
            .max(1);
        let xs = |count: u32| -> f64 {
            if counts.len() <= 1 {
                (x0 + x1) / 2.0
            } else {
                let i = counts.iter().position(|&c| c == count).unwrap();
                x0 + (x1 - x0) * i as f64 / (counts.len() - 1) as f64
            }
        };
        let ys = |v: u64| -> f64 { bottom - (bottom - top) * v as f64 / max as f64 };
        let _ = writeln!(
            out,
            r#"<line x1="{x0}" y1="{bottom}" x2="{x1}" y2="{bottom}" stroke="black"/>"#
        );
        let _ = writeln!(
            out,
            r#"<line x1="{x0}" y1="{top}" x2="{x0}" y2="{bottom}" stroke="black"/>"#
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="470" text-anchor="middle" font-size="14">controllers</text>"#,
            (x0 + x1) / 2.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{x0}" y="28" font-size="14">{label}</text>"#
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-size="12">0</text>"#,
            x0 - 6.0,
            bottom + 4.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-size="12">{max}</text>"#,
            x0 - 6.0,
            top + 4.0
        );
        for &c in &counts {
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="12">{c}</text>"#,
                xs(c),
                bottom + 18.0
            );
        }
        for &objective in &objectives {
            let pts: Vec<String> = counts
                .iter()
                .filter_map(|&c| {
                    data.iter()
                        .find(|r| r.objective == objective && r.controller_count == c)
                        .map(|r| format!("{:.1},{:.1}", xs(c), ys(value(r, panel))))
                })
                .collect();
            if pts.is_empty() {
                continue;
            }
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{}" stroke-width="2" points="{}"/>"#,
                colors(objective),
                pts.join(" ")
            );
        }
    }
    for (i, &objective) in objectives.iter().enumerate() {
        let y = 30.0 + 18.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<rect x="600" y="{:.1}" width="12" height="12" fill="{}"/>"#,
            y - 10.0,
            colors(objective)
        );
        let _ = writeln!(
            out,
            r#"<text x="618" y="{y:.1}" font-size="13">{objective}</text>"#
        );
    }
    out.push_str("</svg>\n");
    out
}
