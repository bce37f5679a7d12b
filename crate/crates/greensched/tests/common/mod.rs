//! Shared oracles for the integration suites: an independently written
//! interpreter of the mapping heuristic, a random instance generator, and
//! an energy/time conservation auditor that re-prices timelines from
//! scratch.

// Each integration target compiles this module separately and uses a
// different subset of it.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use greensched::model::{
    AnalyzerVariant, Catalog, ComputeResource, DataStorage, FormulaVariant, GreenConfig, Schedule,
    Site, Task, Workflow,
};
use greensched::powergate::{GatingKind, GatingPolicy};
use greensched::sim::SimOutput;

/// Positional insert into a decreasing-key list: walks from the front past
/// every entry with key >= the new key, so ties land after existing equals.
fn pos_insert(list: &mut Vec<(String, f64)>, item: String, key: f64) {
    let mut pos = 0;
    while pos < list.len() && list[pos].1 >= key {
        pos += 1;
    }
    list.insert(pos, (item, key));
}

fn interp_weight(task: &Task, config: &GreenConfig) -> f64 {
    match config.analyzer_variant {
        AnalyzerVariant::CyclesPlusIo => task.cycles as f64 + task.dil * task.io_ops as f64,
        AnalyzerVariant::CyclesOnly => task.cycles as f64,
    }
}

fn interp_ee(task: &Task, site: &Site, ipc: f64, config: &GreenConfig, catalog: &Catalog) -> f64 {
    let mut cpe = site.compute.cpe;
    let mut iopsw = site.storage.iopsw;
    let mut ipc_v = ipc;
    if config.normalize_metrics {
        let span = |values: &[f64], v: f64| -> f64 {
            let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if lo == hi {
                1.0
            } else {
                (v - lo) / (hi - lo)
            }
        };
        let cpes: Vec<f64> = catalog.sites().iter().map(|s| s.compute.cpe).collect();
        let iopsws: Vec<f64> = catalog.sites().iter().map(|s| s.storage.iopsw).collect();
        let ipcs: Vec<f64> = catalog
            .sites()
            .iter()
            .map(|s| catalog.ipc(&task.id, &s.id).unwrap())
            .collect();
        cpe = span(&cpes, cpe);
        iopsw = span(&iopsws, iopsw);
        ipc_v = span(&ipcs, ipc_v);
    }
    match config.formula_variant {
        FormulaVariant::Literal => config.gf * (cpe + task.dil * iopsw + ipc_v),
        FormulaVariant::Tradeoff => {
            config.gf * (cpe + task.dil * iopsw) + (1.0 - config.gf) * ipc_v
        }
    }
}

/// A second, deliberately plain implementation of the mapping loop used as
/// an oracle: build the task list by positional inserts, then repeatedly
/// take the frontmost entry whose parents are mapped, rebuild the resource
/// list for it, and assign it to the head.
pub fn interpreter_map(workflow: &Workflow, catalog: &Catalog, config: &GreenConfig) -> Schedule {
    let mut et: Vec<(String, f64)> = Vec::new();
    for task in workflow.tasks() {
        pos_insert(&mut et, task.id.clone(), interp_weight(task, config));
    }

    let mut assignment: BTreeMap<String, String> = BTreeMap::new();
    let mut order = Vec::new();
    while !et.is_empty() {
        let mut chosen = None;
        for (i, (id, _)) in et.iter().enumerate() {
            let task = workflow.task(id).unwrap();
            if task.parents.iter().all(|p| assignment.contains_key(p)) {
                chosen = Some(i);
                break;
            }
        }
        let (id, _) = et.remove(chosen.expect("a ready task always exists in a DAG"));
        let task = workflow.task(&id).unwrap();

        let mut er: Vec<(String, f64)> = Vec::new();
        for site in catalog.sites() {
            let ipc = catalog.ipc(&id, &site.id).unwrap();
            let ee = interp_ee(task, site, ipc, config, catalog);
            pos_insert(&mut er, site.id.clone(), ee);
        }

        assignment.insert(id.clone(), er[0].0.clone());
        order.push(id);
    }
    Schedule { assignment, order }
}

/// Letter names for the small random catalogs: A, B, C, D.
fn site_letter(index: usize) -> String {
    char::from(b'A' + index as u8).to_string()
}

/// Deterministic random instance for the property suites. Blocks usage is
/// mixed: some tasks drive every block, some only one.
pub fn random_instance(
    seed: u64,
    max_tasks: usize,
    max_sites: usize,
    with_blocks: bool,
) -> (Workflow, Catalog) {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let n_tasks = rng.random_range(1..=max_tasks);
    let n_sites = rng.random_range(1..=max_sites);

    let mut tasks = Vec::new();
    for i in 0..n_tasks {
        let mut parents = BTreeSet::new();
        for j in 0..i {
            if rng.random_bool(0.35) {
                parents.insert(format!("t{j:02}"));
            }
        }
        let blocks_used = if with_blocks {
            match rng.random_range(0..4) {
                0 => Some(["narrow".to_string()].into_iter().collect()),
                1 => Some(["wide".to_string()].into_iter().collect()),
                2 => Some(["narrow".to_string(), "wide".to_string()].into_iter().collect()),
                _ => None,
            }
        } else {
            None
        };
        tasks.push(Task {
            id: format!("t{i:02}"),
            cycles: rng.random_range(100_000_000..=5_000_000_000),
            io_ops: rng.random_range(0..=1_000_000),
            dil: rng.random_range(0.0..=1.0),
            parents,
            blocks_used,
        });
    }
    let workflow = Workflow::new(tasks).expect("generated DAG is valid");

    let mut sites = Vec::new();
    for j in 0..n_sites {
        let name = site_letter(j);
        let p_busy_w = rng.random_range(100.0..=400.0);
        sites.push(Site {
            id: name.clone(),
            compute: ComputeResource {
                id: format!("cr{name}"),
                cpe: rng.random_range(500.0..=5_000.0),
                freq_hz: rng.random_range(1e9..=4e9),
                p_busy_w,
                p_idle_w: p_busy_w * rng.random_range(0.2..=0.6),
                block_shares: vec![("narrow".to_string(), 0.6), ("wide".to_string(), 0.4)],
            },
            storage: DataStorage {
                id: format!("ds{name}"),
                iopsw: rng.random_range(1_000.0..=9_000.0),
                iops_rate: 1e5,
            },
        });
    }
    let mut ipc = Vec::new();
    for task in workflow.task_ids() {
        for site in &sites {
            ipc.push((
                task.to_string(),
                site.id.clone(),
                rng.random_range(0.5..=3.0),
            ));
        }
    }
    let catalog = Catalog::new(sites, ipc).expect("generated catalog is valid");
    (workflow, catalog)
}

/// Worst residuals found while re-auditing a run.
pub struct Audit {
    pub energy_relative_error: f64,
    pub time_residual_s: f64,
}

/// Re-prices a finished run from its timeline alone, with freshly written
/// energy arithmetic, and measures per-site busy+idle time against the
/// makespan.
pub fn audit(workflow: &Workflow, catalog: &Catalog, policy: &GatingPolicy, out: &SimOutput) -> Audit {
    let makespan = out
        .timeline
        .iter()
        .map(|e| e.end_s)
        .fold(0.0, f64::max);
    assert_eq!(makespan, out.ledger.makespan_s, "ledger makespan mismatch");

    let mut total = 0.0;
    let mut worst_time = 0.0_f64;
    for site in catalog.sites() {
        let entries: Vec<_> = out.timeline.iter().filter(|e| e.site == site.id).collect();
        let mut busy_time = 0.0;
        let mut idle_time = 0.0;
        let mut prev_end = 0.0_f64;
        for e in &entries {
            assert!(e.end_s > e.start_s, "empty or reversed interval");
            assert!(
                e.start_s >= prev_end,
                "overlapping intervals on site {}",
                site.id
            );
            let dt = e.end_s - e.start_s;
            busy_time += dt;
            let gap = e.start_s - prev_end;
            if gap > 0.0 {
                idle_time += gap;
                total += priced_gap(policy, site.compute.p_idle_w, gap);
            }
            total += priced_run(policy, &site.compute, workflow.task(&e.task).unwrap(), dt);
            total += workflow.task(&e.task).unwrap().io_ops as f64 / site.storage.iopsw;
            prev_end = e.end_s;
        }
        let tail = makespan - prev_end;
        if tail > 0.0 {
            idle_time += tail;
            total += priced_gap(policy, site.compute.p_idle_w, tail);
        }
        worst_time = worst_time.max((busy_time + idle_time - makespan).abs());
    }

    let scale = total.abs().max(out.ledger.total_j.abs()).max(1e-12);
    Audit {
        energy_relative_error: (total - out.ledger.total_j).abs() / scale,
        time_residual_s: worst_time,
    }
}

fn priced_gap(policy: &GatingPolicy, p_idle_w: f64, gap: f64) -> f64 {
    match policy.kind {
        GatingKind::None => p_idle_w * gap,
        GatingKind::Coarse | GatingKind::Fine => {
            if gap <= policy.wake_latency_s {
                p_idle_w * gap
            } else {
                p_idle_w * policy.wake_latency_s
                    + p_idle_w * policy.residual_fraction * (gap - policy.wake_latency_s)
                    + policy.wake_energy_j
            }
        }
    }
}

fn priced_run(policy: &GatingPolicy, compute: &ComputeResource, task: &Task, dt: f64) -> f64 {
    let mut energy = compute.p_busy_w * dt;
    if policy.kind == GatingKind::Fine {
        if let Some(used) = &task.blocks_used {
            for (block, share) in &compute.block_shares {
                if !used.contains(block) {
                    energy -= share * compute.p_idle_w * (1.0 - policy.residual_fraction) * dt;
                    energy += policy.wake_energy_j;
                }
            }
        }
    }
    energy
}
