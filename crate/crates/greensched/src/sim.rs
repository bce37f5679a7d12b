//! Discrete-event replay of a schedule and the resulting energy ledger.
//!
//! Each site runs one task at a time. A task starts once all its parents
//! have finished and its assigned site is free; among startable tasks on a
//! site, schedule order wins. Task timing ignores wake latency: the energy
//! model prices wake-ups inside the surrounding idle gap, so every gating
//! policy sees the same timeline and ledgers stay comparable.
//!
//! Energy is split per site into busy, idle, storage and wake joules. Busy
//! and idle intervals go through [`crate::powergate`]; storage pays the
//! task's operation count against the site's operations-per-joule rating.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Catalog, Schedule, Site, Task, Workflow};
use crate::powergate::{busy_energy, idle_energy, GatingPolicy};

/// Wall-clock seconds `task` occupies `site`: compute time at the site's
/// effective instruction rate plus storage service time.
pub fn duration(task: &Task, site: &Site, ipc: f64) -> f64 {
    let compute_s = task.cycles as f64 / (ipc * site.compute.freq_hz);
    let io_s = task.io_ops as f64 / site.storage.iops_rate;
    compute_s + io_s
}

/// One executed task.
#[derive(Debug, Clone, PartialEq)]
pub struct TimelineEntry {
    pub task: String,
    pub site: String,
    pub start_s: f64,
    pub end_s: f64,
}

/// Renders a timeline as CSV, one row per task in execution order.
pub fn timeline_to_csv(timeline: &[TimelineEntry]) -> String {
    let mut out = String::from("task,site,start_s,end_s\n");
    for e in timeline {
        writeln!(out, "{},{},{},{}", e.task, e.site, e.start_s, e.end_s).expect("string write");
    }
    out
}

/// Energy drawn by one site over the whole run, joules.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedgerRow {
    pub busy_j: f64,
    pub idle_j: f64,
    pub storage_j: f64,
    pub wake_j: f64,
}

impl LedgerRow {
    pub fn total(&self) -> f64 {
        self.busy_j + self.idle_j + self.storage_j + self.wake_j
    }
}

/// Per-site energy breakdown plus run totals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyLedger {
    pub makespan_s: f64,
    pub total_j: f64,
    pub sites: BTreeMap<String, LedgerRow>,
}

impl EnergyLedger {
    pub fn from_json(source: &str) -> Result<Self> {
        Ok(serde_json::from_str(source)?)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("ledger serializes");
        out.push('\n');
        out
    }

    /// Renders the per-site breakdown as CSV, sites in id order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("site,busy_j,idle_j,storage_j,wake_j\n");
        for (site, row) in &self.sites {
            writeln!(
                out,
                "{},{},{},{},{}",
                site, row.busy_j, row.idle_j, row.storage_j, row.wake_j
            )
            .expect("string write");
        }
        out
    }
}

/// Timeline and ledger of one simulated run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    pub timeline: Vec<TimelineEntry>,
    pub ledger: EnergyLedger,
}

/// Replays `schedule` and prices the run under `policy`.
pub fn simulate(
    workflow: &Workflow,
    catalog: &Catalog,
    schedule: &Schedule,
    policy: &GatingPolicy,
) -> Result<SimOutput> {
    schedule.validate_for(workflow, catalog)?;
    catalog.validate_for(workflow)?;
    policy.validate()?;

    let order_index: BTreeMap<&str, usize> = schedule
        .order
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_str(), i))
        .collect();
    let mut pending: BTreeMap<&str, Vec<&str>> = catalog
        .sites()
        .iter()
        .map(|s| (s.id.as_str(), Vec::new()))
        .collect();
    for (task, site) in &schedule.assignment {
        pending
            .get_mut(site.as_str())
            .expect("assignment validated against catalog")
            .push(task.as_str());
    }
    for queue in pending.values_mut() {
        queue.sort_by_key(|t| order_index[t]);
    }

    let total = workflow.len();
    let mut running: BTreeMap<&str, (&str, f64)> = BTreeMap::new();
    let mut finished: BTreeMap<&str, f64> = BTreeMap::new();
    let mut timeline = Vec::with_capacity(total);
    let mut now = 0.0_f64;
    loop {
        let done: Vec<&str> = running
            .iter()
            .filter(|(_, (_, end))| *end <= now)
            .map(|(&site, _)| site)
            .collect();
        for site in done {
            let (task, end) = running.remove(site).expect("site is running");
            finished.insert(task, end);
        }
        for site in catalog.sites() {
            if running.contains_key(site.id.as_str()) {
                continue;
            }
            let queue = pending.get_mut(site.id.as_str()).expect("every site has a queue");
            let startable = queue.iter().position(|t| {
                workflow
                    .task(t)
                    .expect("assignment validated against workflow")
                    .parents
                    .iter()
                    .all(|p| finished.contains_key(p.as_str()))
            });
            if let Some(pos) = startable {
                let task_id = queue.remove(pos);
                let task = workflow.task(task_id).expect("task exists");
                let d = duration(task, site, catalog.ipc(task_id, &site.id)?);
                timeline.push(TimelineEntry {
                    task: task_id.to_string(),
                    site: site.id.clone(),
                    start_s: now,
                    end_s: now + d,
                });
                running.insert(site.id.as_str(), (task_id, now + d));
            }
        }
        if finished.len() == total {
            break;
        }
        let next = running
            .values()
            .map(|&(_, end)| end)
            .fold(f64::INFINITY, f64::min);
        if !next.is_finite() {
            return Err(Error::invalid(
                "schedule",
                "simulation stalled with tasks pending",
            ));
        }
        now = next;
    }

    let makespan_s = timeline.iter().map(|e| e.end_s).fold(0.0, f64::max);
    let mut sites = BTreeMap::new();
    let mut total_j = 0.0;
    for site in catalog.sites() {
        let mut row = LedgerRow::default();
        let mut prev = 0.0_f64;
        for entry in timeline.iter().filter(|e| e.site == site.id) {
            let task = workflow.task(&entry.task).expect("task exists");
            let gap = entry.start_s - prev;
            if gap > 0.0 {
                let idle = idle_energy(policy, site.compute.p_idle_w, gap)?;
                row.idle_j += idle.idle_j;
                row.wake_j += idle.wake_j;
            }
            let busy = busy_energy(
                policy,
                &site.compute,
                task.blocks_used.as_ref(),
                entry.end_s - entry.start_s,
            )?;
            row.busy_j += busy.busy_j;
            row.wake_j += busy.wake_j;
            row.storage_j += task.io_ops as f64 / site.storage.iopsw;
            prev = entry.end_s;
        }
        let tail = makespan_s - prev;
        if tail > 0.0 {
            let idle = idle_energy(policy, site.compute.p_idle_w, tail)?;
            row.idle_j += idle.idle_j;
            row.wake_j += idle.wake_j;
        }
        total_j += row.total();
        sites.insert(site.id.clone(), row);
    }

    Ok(SimOutput {
        timeline,
        ledger: EnergyLedger {
            makespan_s,
            total_j,
            sites,
        },
    })
}

/// Savings of a candidate run against a baseline run of the same scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Comparison {
    pub candidate_total_j: f64,
    pub baseline_total_j: f64,
    /// 1 - candidate/baseline; positive when the candidate consumed less.
    pub savings_fraction: f64,
    /// Candidate makespan minus baseline makespan, seconds.
    pub makespan_delta_s: f64,
}

impl Comparison {
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("comparison serializes");
        out.push('\n');
        out
    }

    pub fn to_csv(&self) -> String {
        format!(
            "candidate_total_j,baseline_total_j,savings_fraction,makespan_delta_s\n{},{},{},{}\n",
            self.candidate_total_j, self.baseline_total_j, self.savings_fraction, self.makespan_delta_s
        )
    }
}

/// Compares a candidate ledger against a baseline ledger from the same
/// catalog. Fails if the site sets differ or the baseline consumed no
/// energy.
pub fn compare(candidate: &EnergyLedger, baseline: &EnergyLedger) -> Result<Comparison> {
    if !candidate.sites.keys().eq(baseline.sites.keys()) {
        return Err(Error::MismatchedScenario);
    }
    if baseline.total_j <= 0.0 {
        return Err(Error::ZeroBaseline);
    }
    Ok(Comparison {
        candidate_total_j: candidate.total_j,
        baseline_total_j: baseline.total_j,
        savings_fraction: 1.0 - candidate.total_j / baseline.total_j,
        makespan_delta_s: candidate.makespan_s - baseline.makespan_s,
    })
}
