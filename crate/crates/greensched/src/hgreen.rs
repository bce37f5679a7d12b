//! Energy-aware list scheduling.
//!
//! [`hga_map`] runs three phases: every task gets a waste weight from the
//! [`analyzer`], tasks are ranked into a priority list by decreasing weight,
//! then each ready task in rank order is mapped to the site whose
//! energy-efficiency score for that task is highest. Efficiency scores come
//! from [`efficiency`]; candidate sites are ranked per task, never shared
//! between tasks.
//!
//! [`baseline_map`] provides the reference mappers used to judge the energy
//! scheduler: seeded random placement, everything on the first site, and a
//! per-task makespan greedy.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::model::{
    AnalyzerVariant, Catalog, FormulaVariant, GreenConfig, RankedList, Schedule, Site, Task,
    Workflow,
};
use crate::sim::duration;

/// Energy-waste weight of a task: the work it will burn on a resource.
pub fn analyzer(task: &Task, variant: AnalyzerVariant) -> f64 {
    match variant {
        AnalyzerVariant::CyclesPlusIo => task.cycles as f64 + task.dil * task.io_ops as f64,
        AnalyzerVariant::CyclesOnly => task.cycles as f64,
    }
}

/// Ranks every task by decreasing analyzer weight. Tasks are inserted in id
/// order, so equal weights tie-break lexicographically.
pub fn prioritize(workflow: &Workflow, config: &GreenConfig) -> Result<RankedList<String>> {
    let mut et = RankedList::new();
    for task in workflow.tasks() {
        et.insert(task.id.clone(), analyzer(task, config.analyzer_variant))?;
    }
    Ok(et)
}

/// Min-max bounds of the three efficiency terms over one task's candidate
/// sites.
#[derive(Debug, Clone, PartialEq)]
pub struct Norms {
    pub cpe: (f64, f64),
    pub iopsw: (f64, f64),
    pub ipc: (f64, f64),
}

impl Norms {
    /// Collects bounds for `task` across every site in the catalog.
    pub fn for_task(task_id: &str, catalog: &Catalog) -> Result<Self> {
        let sites = catalog.sites();
        if sites.is_empty() {
            return Err(Error::EmptyCandidates);
        }
        let mut cpe = (f64::INFINITY, f64::NEG_INFINITY);
        let mut iopsw = (f64::INFINITY, f64::NEG_INFINITY);
        let mut ipc = (f64::INFINITY, f64::NEG_INFINITY);
        let widen = |bounds: &mut (f64, f64), v: f64| {
            bounds.0 = bounds.0.min(v);
            bounds.1 = bounds.1.max(v);
        };
        for site in sites {
            widen(&mut cpe, site.compute.cpe);
            widen(&mut iopsw, site.storage.iopsw);
            widen(&mut ipc, catalog.ipc(task_id, &site.id)?);
        }
        Ok(Norms { cpe, iopsw, ipc })
    }
}

/// Min-max rescales `value` into [0, 1]. A degenerate range (all candidates
/// equal) rescales to 1 so the term still contributes.
fn rescale(value: f64, (lo, hi): (f64, f64)) -> f64 {
    if hi == lo {
        1.0
    } else {
        (value - lo) / (hi - lo)
    }
}

/// Energy-efficiency score of running `task` on `site`. Higher is better.
/// With `norms` present each term is min-max rescaled over the candidate
/// set before the formula combines them.
pub fn efficiency(
    task: &Task,
    site: &Site,
    ipc: f64,
    config: &GreenConfig,
    norms: Option<&Norms>,
) -> f64 {
    let (cpe, iopsw, ipc) = match norms {
        Some(n) => (
            rescale(site.compute.cpe, n.cpe),
            rescale(site.storage.iopsw, n.iopsw),
            rescale(ipc, n.ipc),
        ),
        None => (site.compute.cpe, site.storage.iopsw, ipc),
    };
    let gf = config.gf;
    match config.formula_variant {
        FormulaVariant::Literal => gf * (cpe + task.dil * iopsw + ipc),
        FormulaVariant::Tradeoff => gf * (cpe + task.dil * iopsw) + (1.0 - gf) * ipc,
    }
}

/// Ranks every site by decreasing efficiency for `task`. Sites are inserted
/// in id order, so equal scores tie-break lexicographically.
pub fn rank_resources(
    task: &Task,
    catalog: &Catalog,
    config: &GreenConfig,
) -> Result<RankedList<String>> {
    if catalog.sites().is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let norms = if config.normalize_metrics {
        Some(Norms::for_task(&task.id, catalog)?)
    } else {
        None
    };
    let mut er = RankedList::new();
    for site in catalog.sites() {
        let ipc = catalog.ipc(&task.id, &site.id)?;
        let ee = efficiency(task, site, ipc, config, norms.as_ref());
        er.insert(site.id.clone(), ee)?;
    }
    Ok(er)
}

/// Maps a workflow onto sites. The returned schedule assigns every task and
/// records the order tasks were mapped in.
///
/// Mapping walks the priority list repeatedly: the highest-ranked task whose
/// parents are already mapped goes next, onto the top site of its own
/// resource ranking. Tasks ranked above it but still waiting on parents keep
/// their position for a later pass.
pub fn hga_map(workflow: &Workflow, catalog: &Catalog, config: &GreenConfig) -> Result<Schedule> {
    let mut et = prioritize(workflow, config)?;
    let mut assignment: BTreeMap<String, String> = BTreeMap::new();
    let mut order = Vec::with_capacity(workflow.len());
    while !et.is_empty() {
        let pos = et
            .iter()
            .position(|entry| {
                workflow
                    .task(&entry.item)
                    .expect("prioritized task exists")
                    .parents
                    .iter()
                    .all(|p| assignment.contains_key(p))
            })
            .expect("acyclic workflow always has a ready task");
        let entry = et.remove(pos).expect("position is in bounds");
        let task = workflow.task(&entry.item).expect("prioritized task exists");
        let er = rank_resources(task, catalog, config)?;
        let site = er.front().ok_or(Error::EmptyCandidates)?.item.clone();
        assignment.insert(entry.item.clone(), site);
        order.push(entry.item);
    }
    Ok(Schedule { assignment, order })
}

/// Reference mappers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Baseline {
    /// Uniform random site per task, reproducible from the seed.
    RandomSeeded { seed: u64 },
    /// Every task on the lexicographically first site.
    FifoFirstSite,
    /// Each task on the site minimizing its own run time.
    MakespanGreedy,
}

/// Maps tasks in canonical topological order with the chosen baseline rule.
pub fn baseline_map(workflow: &Workflow, catalog: &Catalog, baseline: Baseline) -> Result<Schedule> {
    let sites = catalog.sites();
    if sites.is_empty() && !workflow.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let order = workflow.topological_order();
    let mut assignment = BTreeMap::new();
    let mut rng = match baseline {
        Baseline::RandomSeeded { seed } => Some(ChaCha12Rng::seed_from_u64(seed)),
        _ => None,
    };
    for id in &order {
        let site = match baseline {
            Baseline::RandomSeeded { .. } => {
                let rng = rng.as_mut().expect("rng seeded above");
                &sites[rng.random_range(0..sites.len())]
            }
            Baseline::FifoFirstSite => &sites[0],
            Baseline::MakespanGreedy => {
                let task = workflow.task(id).expect("order comes from workflow");
                let mut best: Option<(&Site, f64)> = None;
                for site in sites {
                    let d = duration(task, site, catalog.ipc(id, &site.id)?);
                    if best.map_or(true, |(_, cur)| d < cur) {
                        best = Some((site, d));
                    }
                }
                best.expect("at least one site").0
            }
        };
        assignment.insert(id.clone(), site.id.clone());
    }
    Ok(Schedule { assignment, order })
}
