//! Seeded synthetic workloads: layered random DAGs and heterogeneous site
//! catalogs, plus the bundled reference scenario used by the comparison
//! experiment. Same spec and seed always reproduce the same bytes.

use std::collections::BTreeSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    Catalog, ComputeResource, DataStorage, Site, Task, Workflow, DEFAULT_IOPS_RATE,
};

/// Parameters for [`gen_workflow`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkflowSpec {
    pub n_tasks: usize,
    pub n_layers: usize,
    /// Probability of an extra dependency edge from each earlier-layer task.
    pub edge_density: f64,
    pub cycles_range: (u64, u64),
    pub io_range: (u64, u64),
    pub dil_range: (f64, f64),
    pub seed: u64,
}

impl WorkflowSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_tasks < 1 {
            return Err(Error::InvalidSpec("n_tasks must be at least 1".to_string()));
        }
        if self.n_layers < 1 {
            return Err(Error::InvalidSpec("n_layers must be at least 1".to_string()));
        }
        if !self.edge_density.is_finite() || !(0.0..=1.0).contains(&self.edge_density) {
            return Err(Error::InvalidSpec(format!(
                "edge_density must lie in [0, 1], got {}",
                self.edge_density
            )));
        }
        if self.cycles_range.0 < 1 || self.cycles_range.0 > self.cycles_range.1 {
            return Err(Error::InvalidSpec(format!(
                "cycles_range must satisfy 1 <= min <= max, got {:?}",
                self.cycles_range
            )));
        }
        if self.io_range.0 > self.io_range.1 {
            return Err(Error::InvalidSpec(format!(
                "io_range must satisfy min <= max, got {:?}",
                self.io_range
            )));
        }
        let (dlo, dhi) = self.dil_range;
        if !dlo.is_finite() || !dhi.is_finite() || dlo < 0.0 || dlo > dhi || dhi > 1.0 {
            return Err(Error::InvalidSpec(format!(
                "dil_range must satisfy 0 <= min <= max <= 1, got {:?}",
                self.dil_range
            )));
        }
        Ok(())
    }
}

/// Parameters for [`gen_catalog`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogSpec {
    pub n_sites: usize,
    pub cpe_range: (f64, f64),
    pub iopsw_range: (f64, f64),
    pub p_busy_range: (f64, f64),
    /// Idle power as a fraction of busy power.
    pub idle_fraction_range: (f64, f64),
    pub freq_range: (f64, f64),
    pub ipc_range: (f64, f64),
    pub seed: u64,
}

fn check_positive_range(name: &str, (lo, hi): (f64, f64)) -> Result<()> {
    if !lo.is_finite() || !hi.is_finite() || lo <= 0.0 || lo > hi {
        return Err(Error::InvalidSpec(format!(
            "{name} must satisfy 0 < min <= max, got ({lo}, {hi})"
        )));
    }
    Ok(())
}

impl CatalogSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 1 {
            return Err(Error::InvalidSpec("n_sites must be at least 1".to_string()));
        }
        check_positive_range("cpe_range", self.cpe_range)?;
        check_positive_range("iopsw_range", self.iopsw_range)?;
        check_positive_range("p_busy_range", self.p_busy_range)?;
        check_positive_range("idle_fraction_range", self.idle_fraction_range)?;
        if self.idle_fraction_range.1 > 1.0 {
            return Err(Error::InvalidSpec(format!(
                "idle_fraction_range max must not exceed 1, got {}",
                self.idle_fraction_range.1
            )));
        }
        check_positive_range("freq_range", self.freq_range)?;
        check_positive_range("ipc_range", self.ipc_range)?;
        Ok(())
    }
}

/// A workflow spec and catalog spec bundled as one document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub workflow: WorkflowSpec,
    pub catalog: CatalogSpec,
}

impl ScenarioSpec {
    /// The bundled reference scenario: three heterogeneous sites, thirty
    /// tasks in five layers, fixed seeds. Site efficiency spans 4x and
    /// per-task instruction rates span 3x, leaving an energy-aware mapper
    /// real headroom over random placement.
    pub fn eega3() -> Self {
        ScenarioSpec {
            workflow: WorkflowSpec {
                n_tasks: 30,
                n_layers: 5,
                edge_density: 0.25,
                cycles_range: (2_000_000_000, 12_000_000_000),
                io_range: (10_000, 500_000),
                dil_range: (0.1, 0.9),
                seed: 7,
            },
            catalog: CatalogSpec {
                n_sites: 3,
                cpe_range: (1_000.0, 4_000.0),
                iopsw_range: (2_000.0, 8_000.0),
                p_busy_range: (150.0, 300.0),
                idle_fraction_range: (0.25, 0.45),
                freq_range: (1e9, 3e9),
                ipc_range: (0.8, 2.4),
                seed: 31,
            },
        }
    }

    /// Reseeds both generators from one base seed.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.workflow.seed = seed;
        self.catalog.seed = seed.wrapping_add(1);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.workflow.validate()?;
        self.catalog.validate()
    }

    pub fn from_json(source: &str) -> Result<Self> {
        let spec: ScenarioSpec = serde_json::from_str(source)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("spec serializes");
        out.push('\n');
        out
    }

    pub fn generate(&self) -> Result<(Workflow, Catalog)> {
        let workflow = gen_workflow(&self.workflow)?;
        let catalog = gen_catalog(&self.catalog, &workflow)?;
        Ok((workflow, catalog))
    }
}

/// Spreadsheet-style site names: A..Z, AA, AB, ...
pub fn site_name(index: usize) -> String {
    let mut n = index + 1;
    let mut buf = Vec::new();
    while n > 0 {
        n -= 1;
        buf.push(b'A' + (n % 26) as u8);
        n /= 26;
    }
    buf.reverse();
    String::from_utf8(buf).expect("ASCII letters")
}

fn task_id(index: usize, n_tasks: usize) -> String {
    let width = n_tasks.to_string().len().max(2);
    format!("t{:0width$}", index + 1)
}

/// Generates a layered random DAG.
///
/// Tasks are dealt round-robin into layers. Every task outside the first
/// layer receives at least one parent from the previous layer; each task in
/// any earlier layer additionally becomes a parent with probability
/// `edge_density`. Attributes are drawn uniformly from the ranges in `spec`.
pub fn gen_workflow(spec: &WorkflowSpec) -> Result<Workflow> {
    spec.validate()?;
    let n = spec.n_tasks;
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);

    let ids: Vec<String> = (0..n).map(|i| task_id(i, n)).collect();
    let layer: Vec<usize> = (0..n).map(|i| i % spec.n_layers).collect();

    let mut tasks = Vec::with_capacity(n);
    for id in &ids {
        tasks.push(Task {
            id: id.clone(),
            cycles: rng.random_range(spec.cycles_range.0..=spec.cycles_range.1),
            io_ops: rng.random_range(spec.io_range.0..=spec.io_range.1),
            dil: rng.random_range(spec.dil_range.0..=spec.dil_range.1),
            parents: BTreeSet::new(),
            blocks_used: None,
        });
    }

    for i in 0..n {
        if layer[i] == 0 {
            continue;
        }
        let earlier: Vec<usize> = (0..n).filter(|&j| layer[j] < layer[i]).collect();
        for &j in &earlier {
            if rng.random_bool(spec.edge_density) {
                tasks[i].parents.insert(ids[j].clone());
            }
        }
        let previous: Vec<usize> = (0..n).filter(|&j| layer[j] + 1 == layer[i]).collect();
        let has_previous_parent = previous.iter().any(|&j| tasks[i].parents.contains(&ids[j]));
        if !has_previous_parent {
            let pick = previous[rng.random_range(0..previous.len())];
            tasks[i].parents.insert(ids[pick].clone());
        }
    }

    Workflow::new(tasks)
}

/// Generates a heterogeneous catalog with a full per-(task, site)
/// instruction-rate table. Sites draw their attributes uniformly from the
/// ranges in `spec`; idle power is busy power scaled by a drawn idle
/// fraction.
pub fn gen_catalog(spec: &CatalogSpec, workflow: &Workflow) -> Result<Catalog> {
    spec.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);

    let mut sites = Vec::with_capacity(spec.n_sites);
    for j in 0..spec.n_sites {
        let name = site_name(j);
        let cpe = rng.random_range(spec.cpe_range.0..=spec.cpe_range.1);
        let iopsw = rng.random_range(spec.iopsw_range.0..=spec.iopsw_range.1);
        let p_busy_w = rng.random_range(spec.p_busy_range.0..=spec.p_busy_range.1);
        let idle_fraction =
            rng.random_range(spec.idle_fraction_range.0..=spec.idle_fraction_range.1);
        let freq_hz = rng.random_range(spec.freq_range.0..=spec.freq_range.1);
        sites.push(Site {
            id: name.clone(),
            compute: ComputeResource {
                id: format!("cr{name}"),
                cpe,
                freq_hz,
                p_busy_w,
                p_idle_w: p_busy_w * idle_fraction,
                block_shares: vec![("narrow".to_string(), 0.6), ("wide".to_string(), 0.4)],
            },
            storage: DataStorage {
                id: format!("ds{name}"),
                iopsw,
                iops_rate: DEFAULT_IOPS_RATE,
            },
        });
    }

    let mut ipc = Vec::new();
    for task in workflow.task_ids() {
        for site in &sites {
            ipc.push((
                task.to_string(),
                site.id.clone(),
                rng.random_range(spec.ipc_range.0..=spec.ipc_range.1),
            ));
        }
    }

    Catalog::new(sites, ipc)
}
