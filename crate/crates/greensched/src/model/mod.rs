//! Domain types: workflows, grid sites, schedules and the scheduler
//! configuration, plus strict JSON loading for each document kind.
//!
//! All types are immutable after construction; loaders validate every
//! invariant up front so the scheduling and simulation code can assume
//! well-formed inputs.

mod ranked;

pub use ranked::{RankedEntry, RankedList};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Storage service rate assumed when a catalog does not configure one,
/// in I/O operations per second.
pub const DEFAULT_IOPS_RATE: f64 = 1e5;

fn default_iops_rate() -> f64 {
    DEFAULT_IOPS_RATE
}

/// A unit of workflow work.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Task {
    pub id: String,
    /// Compute demand in processor cycles.
    pub cycles: u64,
    /// Storage operation count.
    pub io_ops: u64,
    /// Data-intensive level, a fraction in [0, 1].
    pub dil: f64,
    #[serde(default)]
    pub parents: BTreeSet<String>,
    /// Processor blocks this task drives while running. Absent means the
    /// task uses every block of whichever resource it lands on.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks_used: Option<BTreeSet<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WorkflowDoc {
    tasks: Vec<Task>,
}

/// A validated DAG of tasks keyed by id.
#[derive(Debug, Clone, PartialEq)]
pub struct Workflow {
    tasks: BTreeMap<String, Task>,
}

impl Workflow {
    /// Builds a workflow, checking field invariants, id uniqueness,
    /// parent references and acyclicity.
    pub fn new(tasks: Vec<Task>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, task) in tasks.into_iter().enumerate() {
            let path = |field: &str| format!("tasks[{i}].{field}");
            if task.id.is_empty() {
                return Err(Error::invalid(path("id"), "task id must not be empty"));
            }
            if task.cycles < 1 {
                return Err(Error::invalid(path("cycles"), "cycles must be at least 1"));
            }
            if !task.dil.is_finite() || !(0.0..=1.0).contains(&task.dil) {
                return Err(Error::invalid(
                    path("dil"),
                    format!("dil must lie in [0, 1], got {}", task.dil),
                ));
            }
            if map.insert(task.id.clone(), task).is_some() {
                return Err(Error::invalid(path("id"), "duplicate task id"));
            }
        }
        let workflow = Workflow { tasks: map };
        workflow.check_parents()?;
        workflow.check_acyclic()?;
        Ok(workflow)
    }

    pub fn from_json(source: &str) -> Result<Self> {
        let doc: WorkflowDoc = serde_json::from_str(source)?;
        Self::new(doc.tasks)
    }

    /// Serializes to the workflow document schema, tasks in id order.
    pub fn to_json(&self) -> String {
        let doc = WorkflowDoc {
            tasks: self.tasks.values().cloned().collect(),
        };
        let mut out = serde_json::to_string_pretty(&doc).expect("workflow serializes");
        out.push('\n');
        out
    }

    pub fn task(&self, id: &str) -> Option<&Task> {
        self.tasks.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.tasks.contains_key(id)
    }

    /// Tasks in id order.
    pub fn tasks(&self) -> impl Iterator<Item = &Task> {
        self.tasks.values()
    }

    pub fn task_ids(&self) -> impl Iterator<Item = &str> {
        self.tasks.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    /// Child lists derived from the parent edges, children in id order.
    pub fn children(&self) -> BTreeMap<&str, Vec<&str>> {
        let mut children: BTreeMap<&str, Vec<&str>> =
            self.tasks.keys().map(|id| (id.as_str(), Vec::new())).collect();
        for task in self.tasks.values() {
            for parent in &task.parents {
                children
                    .get_mut(parent.as_str())
                    .expect("parents validated")
                    .push(&task.id);
            }
        }
        children
    }

    /// Canonical topological order: repeatedly emits the lexicographically
    /// smallest task whose parents have all been emitted.
    pub fn topological_order(&self) -> Vec<String> {
        let children = self.children();
        let mut indegree: BTreeMap<&str, usize> = self
            .tasks
            .values()
            .map(|t| (t.id.as_str(), t.parents.len()))
            .collect();
        let mut ready: BTreeSet<&str> = indegree
            .iter()
            .filter(|(_, &d)| d == 0)
            .map(|(&id, _)| id)
            .collect();
        let mut order = Vec::with_capacity(self.tasks.len());
        while let Some(&next) = ready.iter().next() {
            ready.remove(next);
            order.push(next.to_string());
            for &child in &children[next] {
                let d = indegree.get_mut(child).expect("child exists");
                *d -= 1;
                if *d == 0 {
                    ready.insert(child);
                }
            }
        }
        debug_assert_eq!(order.len(), self.tasks.len(), "workflow validated acyclic");
        order
    }

    fn check_parents(&self) -> Result<()> {
        for task in self.tasks.values() {
            for parent in &task.parents {
                if !self.tasks.contains_key(parent) {
                    return Err(Error::DanglingParent {
                        task: task.id.clone(),
                        parent: parent.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Iterative DFS over parent edges; a gray-on-gray hit names one edge
    /// of the cycle.
    fn check_acyclic(&self) -> Result<()> {
        #[derive(Clone, Copy, PartialEq)]
        enum Color {
            White,
            Gray,
            Black,
        }
        let mut color: BTreeMap<&str, Color> =
            self.tasks.keys().map(|id| (id.as_str(), Color::White)).collect();
        for root in self.tasks.keys() {
            if color[root.as_str()] != Color::White {
                continue;
            }
            let mut stack: Vec<(&str, Vec<&str>, usize)> = Vec::new();
            color.insert(root, Color::Gray);
            stack.push((root, self.parent_list(root), 0));
            while let Some((id, parents, next)) = stack.last_mut() {
                if let Some(&parent) = parents.get(*next) {
                    *next += 1;
                    match color[parent] {
                        Color::White => {
                            color.insert(parent, Color::Gray);
                            let frame = (parent, self.parent_list(parent), 0);
                            stack.push(frame);
                        }
                        Color::Gray => {
                            return Err(Error::Cycle {
                                task: id.to_string(),
                                parent: parent.to_string(),
                            });
                        }
                        Color::Black => {}
                    }
                } else {
                    color.insert(id, Color::Black);
                    stack.pop();
                }
            }
        }
        Ok(())
    }

    fn parent_list(&self, id: &str) -> Vec<&str> {
        self.tasks[id].parents.iter().map(String::as_str).collect()
    }
}

/// The compute half of a grid site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComputeResource {
    pub id: String,
    /// SPECpower-style efficiency score, operations per watt.
    pub cpe: f64,
    /// Clock frequency in hertz.
    pub freq_hz: f64,
    /// Power draw while executing a task, watts.
    pub p_busy_w: f64,
    /// Ungated idle power draw, watts.
    pub p_idle_w: f64,
    /// Named processor blocks and the fraction of idle power each holds;
    /// fractions sum to 1.
    pub block_shares: Vec<(String, f64)>,
}

impl ComputeResource {
    pub fn has_block(&self, name: &str) -> bool {
        self.block_shares.iter().any(|(b, _)| b == name)
    }
}

/// The storage half of a grid site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataStorage {
    pub id: String,
    /// I/O operations per second per watt; its reciprocal is joules per
    /// operation.
    pub iopsw: f64,
    /// Service rate used by the runtime model, operations per second.
    #[serde(default = "default_iops_rate")]
    pub iops_rate: f64,
}

/// One grid site: a compute resource paired with a data storage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Site {
    pub id: String,
    pub compute: ComputeResource,
    pub storage: DataStorage,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogDoc {
    sites: Vec<Site>,
    ipc: Vec<(String, String, f64)>,
}

/// The available sites plus the per-(task, site) instructions-per-cycle
/// table.
#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    sites: Vec<Site>,
    ipc: BTreeMap<(String, String), f64>,
}

impl Catalog {
    pub fn new(sites: Vec<Site>, ipc: Vec<(String, String, f64)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (i, site) in sites.iter().enumerate() {
            validate_site(site, i)?;
            if !seen.insert(site.id.clone()) {
                return Err(Error::invalid(format!("sites[{i}].id"), "duplicate site id"));
            }
        }
        let mut sites = sites;
        sites.sort_by(|a, b| a.id.cmp(&b.id));

        let mut table = BTreeMap::new();
        for (i, (task, site, value)) in ipc.into_iter().enumerate() {
            let path = format!("ipc[{i}]");
            if !seen.contains(&site) {
                return Err(Error::invalid(path, format!("unknown site {site}")));
            }
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::invalid(path, format!("ipc must be positive, got {value}")));
            }
            if table.insert((task.clone(), site.clone()), value).is_some() {
                return Err(Error::invalid(path, format!("duplicate ipc entry for ({task}, {site})")));
            }
        }
        Ok(Catalog { sites, ipc: table })
    }

    pub fn from_json(source: &str) -> Result<Self> {
        let doc: CatalogDoc = serde_json::from_str(source)?;
        Self::new(doc.sites, doc.ipc)
    }

    /// Serializes to the catalog document schema, sites and ipc entries in
    /// id order.
    pub fn to_json(&self) -> String {
        let doc = CatalogDoc {
            sites: self.sites.clone(),
            ipc: self
                .ipc
                .iter()
                .map(|((t, s), v)| (t.clone(), s.clone(), *v))
                .collect(),
        };
        let mut out = serde_json::to_string_pretty(&doc).expect("catalog serializes");
        out.push('\n');
        out
    }

    /// Sites in id order.
    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn site(&self, id: &str) -> Option<&Site> {
        self.sites.iter().find(|s| s.id == id)
    }

    pub fn ipc(&self, task: &str, site: &str) -> Result<f64> {
        self.ipc
            .get(&(task.to_string(), site.to_string()))
            .copied()
            .ok_or_else(|| Error::MissingIpc {
                task: task.to_string(),
                site: site.to_string(),
            })
    }

    pub fn ipc_entries(&self) -> impl Iterator<Item = (&str, &str, f64)> {
        self.ipc.iter().map(|((t, s), v)| (t.as_str(), s.as_str(), *v))
    }

    /// Checks the ipc table covers every (task, site) pair of `workflow`.
    pub fn validate_for(&self, workflow: &Workflow) -> Result<()> {
        for task in workflow.task_ids() {
            for site in &self.sites {
                self.ipc(task, &site.id)?;
            }
        }
        Ok(())
    }
}

fn validate_site(site: &Site, index: usize) -> Result<()> {
    let base = format!("sites[{index}]");
    if site.id.is_empty() {
        return Err(Error::invalid(format!("{base}.id"), "site id must not be empty"));
    }
    let c = &site.compute;
    let cpath = |field: &str| format!("{base}.compute.{field}");
    if !c.cpe.is_finite() || c.cpe <= 0.0 {
        return Err(Error::invalid(cpath("cpe"), format!("cpe must be positive, got {}", c.cpe)));
    }
    if !c.freq_hz.is_finite() || c.freq_hz <= 0.0 {
        return Err(Error::invalid(
            cpath("freq_hz"),
            format!("frequency must be positive, got {}", c.freq_hz),
        ));
    }
    if !c.p_busy_w.is_finite() || !c.p_idle_w.is_finite() || c.p_idle_w <= 0.0 {
        return Err(Error::invalid(
            cpath("p_idle_w"),
            format!("idle power must be positive, got {}", c.p_idle_w),
        ));
    }
    if c.p_idle_w > c.p_busy_w {
        return Err(Error::invalid(
            cpath("p_idle_w"),
            format!("idle power {} exceeds busy power {}", c.p_idle_w, c.p_busy_w),
        ));
    }
    if c.block_shares.is_empty() {
        return Err(Error::invalid(cpath("block_shares"), "at least one block required"));
    }
    let mut names = BTreeSet::new();
    let mut sum = 0.0;
    for (j, (name, share)) in c.block_shares.iter().enumerate() {
        let path = format!("{base}.compute.block_shares[{j}]");
        if !share.is_finite() || *share <= 0.0 || *share > 1.0 {
            return Err(Error::invalid(path, format!("share must lie in (0, 1], got {share}")));
        }
        if !names.insert(name.clone()) {
            return Err(Error::invalid(path, format!("duplicate block name {name}")));
        }
        sum += share;
    }
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(
            cpath("block_shares"),
            format!("shares must sum to 1, got {sum}"),
        ));
    }
    let s = &site.storage;
    if !s.iopsw.is_finite() || s.iopsw <= 0.0 {
        return Err(Error::invalid(
            format!("{base}.storage.iopsw"),
            format!("iopsw must be positive, got {}", s.iopsw),
        ));
    }
    if !s.iops_rate.is_finite() || s.iops_rate <= 0.0 {
        return Err(Error::invalid(
            format!("{base}.storage.iops_rate"),
            format!("iops_rate must be positive, got {}", s.iops_rate),
        ));
    }
    Ok(())
}

/// How the energy-efficiency score combines its terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormulaVariant {
    /// ee = gf * (cpe + dil * iopsw + ipc)
    Literal,
    /// ee = gf * (cpe + dil * iopsw) + (1 - gf) * ipc
    Tradeoff,
}

/// What the task analyzer counts as energy waste.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalyzerVariant {
    /// weight = cycles + dil * io_ops
    CyclesPlusIo,
    /// weight = cycles
    CyclesOnly,
}

/// Scheduler configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenConfig {
    /// Green factor in [0, 1].
    pub gf: f64,
    pub formula_variant: FormulaVariant,
    pub normalize_metrics: bool,
    pub analyzer_variant: AnalyzerVariant,
}

impl GreenConfig {
    pub fn new(
        gf: f64,
        formula_variant: FormulaVariant,
        normalize_metrics: bool,
        analyzer_variant: AnalyzerVariant,
    ) -> Result<Self> {
        if !gf.is_finite() || !(0.0..=1.0).contains(&gf) {
            return Err(Error::invalid("gf", format!("green factor must lie in [0, 1], got {gf}")));
        }
        Ok(GreenConfig {
            gf,
            formula_variant,
            normalize_metrics,
            analyzer_variant,
        })
    }
}

impl Default for GreenConfig {
    fn default() -> Self {
        GreenConfig {
            gf: 0.5,
            formula_variant: FormulaVariant::Literal,
            normalize_metrics: true,
            analyzer_variant: AnalyzerVariant::CyclesPlusIo,
        }
    }
}

/// A task-to-site assignment plus the order tasks were mapped in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    pub assignment: BTreeMap<String, String>,
    pub order: Vec<String>,
}

impl Schedule {
    pub fn from_json(source: &str) -> Result<Self> {
        Ok(serde_json::from_str(source)?)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("schedule serializes");
        out.push('\n');
        out
    }

    /// Checks the schedule is total over `workflow` and consistent with
    /// `catalog`.
    pub fn validate_for(&self, workflow: &Workflow, catalog: &Catalog) -> Result<()> {
        for task in workflow.task_ids() {
            if !self.assignment.contains_key(task) {
                return Err(Error::MissingAssignment {
                    task: task.to_string(),
                });
            }
        }
        for (task, site) in &self.assignment {
            if !workflow.contains(task) {
                return Err(Error::invalid(
                    format!("assignment.{task}"),
                    "task not in workflow",
                ));
            }
            if catalog.site(site).is_none() {
                return Err(Error::invalid(
                    format!("assignment.{task}"),
                    format!("unknown site {site}"),
                ));
            }
        }
        if self.order.len() != workflow.len() {
            return Err(Error::invalid(
                "order",
                format!("expected {} entries, got {}", workflow.len(), self.order.len()),
            ));
        }
        let mut seen = BTreeSet::new();
        for task in &self.order {
            if !workflow.contains(task) {
                return Err(Error::invalid(format!("order.{task}"), "task not in workflow"));
            }
            if !seen.insert(task.as_str()) {
                return Err(Error::invalid(format!("order.{task}"), "task listed twice"));
            }
        }
        Ok(())
    }
}
