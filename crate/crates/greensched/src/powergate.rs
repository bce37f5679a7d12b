//! Power-gating energy model.
//!
//! Two pure functions price a time interval on a compute resource under a
//! gating policy. [`idle_energy`] covers gaps where the resource runs
//! nothing: coarse and fine policies both drop the whole resource to a
//! residual draw, paying a wake latency at full idle power plus a wake
//! energy, and only gate gaps longer than the latency. [`busy_energy`]
//! covers task execution, where only the fine policy can act: processor
//! blocks the task does not drive are gated for the duration, each paying
//! one wake energy.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ComputeResource;

/// How aggressively unused silicon is switched off.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GatingKind {
    /// Never gate; idle draws full idle power.
    None,
    /// Gate the whole resource during idle gaps.
    Coarse,
    /// Coarse, plus gate unused blocks while a task runs.
    Fine,
}

/// Gating policy with wake-up costs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GatingPolicy {
    pub kind: GatingKind,
    /// Time to bring gated silicon back up, seconds.
    #[serde(default = "default_wake_latency")]
    pub wake_latency_s: f64,
    /// Energy burned per wake-up, joules.
    #[serde(default = "default_wake_energy")]
    pub wake_energy_j: f64,
    /// Fraction of idle power a gated block still leaks, in [0, 1). A value
    /// of 1 would make gating a no-op and is rejected.
    #[serde(default = "default_residual")]
    pub residual_fraction: f64,
}

fn default_wake_latency() -> f64 {
    0.001
}

fn default_wake_energy() -> f64 {
    0.01
}

fn default_residual() -> f64 {
    0.05
}

impl GatingPolicy {
    pub fn new(
        kind: GatingKind,
        wake_latency_s: f64,
        wake_energy_j: f64,
        residual_fraction: f64,
    ) -> Result<Self> {
        let policy = GatingPolicy {
            kind,
            wake_latency_s,
            wake_energy_j,
            residual_fraction,
        };
        policy.validate()?;
        Ok(policy)
    }

    /// A policy of the given kind with the stock wake and residual
    /// parameters.
    pub fn with_defaults(kind: GatingKind) -> Self {
        GatingPolicy {
            kind,
            wake_latency_s: default_wake_latency(),
            wake_energy_j: default_wake_energy(),
            residual_fraction: default_residual(),
        }
    }

    /// A policy that never gates.
    pub fn disabled() -> Self {
        GatingPolicy {
            kind: GatingKind::None,
            wake_latency_s: 0.0,
            wake_energy_j: 0.0,
            residual_fraction: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.wake_latency_s.is_finite() || self.wake_latency_s < 0.0 {
            return Err(Error::invalid(
                "wake_latency_s",
                format!("must be finite and non-negative, got {}", self.wake_latency_s),
            ));
        }
        if !self.wake_energy_j.is_finite() || self.wake_energy_j < 0.0 {
            return Err(Error::invalid(
                "wake_energy_j",
                format!("must be finite and non-negative, got {}", self.wake_energy_j),
            ));
        }
        if !self.residual_fraction.is_finite() || !(0.0..1.0).contains(&self.residual_fraction) {
            return Err(Error::invalid(
                "residual_fraction",
                format!("must lie in [0, 1), got {}", self.residual_fraction),
            ));
        }
        Ok(())
    }

    pub fn from_json(source: &str) -> Result<Self> {
        let policy: GatingPolicy = serde_json::from_str(source)?;
        policy.validate()?;
        Ok(policy)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("policy serializes");
        out.push('\n');
        out
    }
}

impl Default for GatingPolicy {
    fn default() -> Self {
        GatingPolicy {
            kind: GatingKind::Fine,
            wake_latency_s: default_wake_latency(),
            wake_energy_j: default_wake_energy(),
            residual_fraction: default_residual(),
        }
    }
}

/// Energy drawn over an idle gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdleEnergy {
    /// Joules the resource leaked while idle or waking.
    pub idle_j: f64,
    /// Joules spent on wake-ups.
    pub wake_j: f64,
}

impl IdleEnergy {
    pub fn total(&self) -> f64 {
        self.idle_j + self.wake_j
    }
}

/// Prices an idle gap of `dt` seconds on a resource leaking `p_idle_w`.
///
/// Gaps no longer than the wake latency stay ungated: the resource would
/// not be back up in time. Longer gaps draw full idle power for the wake
/// latency, residual power for the rest, and one wake energy.
pub fn idle_energy(policy: &GatingPolicy, p_idle_w: f64, dt: f64) -> Result<IdleEnergy> {
    if !dt.is_finite() || dt < 0.0 {
        return Err(Error::NegativeInterval(dt));
    }
    let ungated = IdleEnergy {
        idle_j: p_idle_w * dt,
        wake_j: 0.0,
    };
    match policy.kind {
        GatingKind::None => Ok(ungated),
        GatingKind::Coarse | GatingKind::Fine => {
            if dt <= policy.wake_latency_s {
                return Ok(ungated);
            }
            let gated = dt - policy.wake_latency_s;
            Ok(IdleEnergy {
                idle_j: p_idle_w * (policy.wake_latency_s + policy.residual_fraction * gated),
                wake_j: policy.wake_energy_j,
            })
        }
    }
}

/// Energy drawn while a task occupies a resource.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BusyEnergy {
    /// Joules the resource consumed running the task.
    pub busy_j: f64,
    /// Joules spent waking gated blocks afterwards.
    pub wake_j: f64,
    /// Joules avoided by gating unused blocks.
    pub gated_saving_j: f64,
}

impl BusyEnergy {
    pub fn total(&self) -> f64 {
        self.busy_j + self.wake_j
    }
}

/// Prices a busy interval of `dt` seconds on `compute`.
///
/// `blocks_used` names the blocks the task drives; `None` means all of
/// them. Under the fine policy each unused block sheds its share of idle
/// power down to the residual fraction and pays one wake energy. Other
/// policies draw full busy power.
pub fn busy_energy(
    policy: &GatingPolicy,
    compute: &ComputeResource,
    blocks_used: Option<&BTreeSet<String>>,
    dt: f64,
) -> Result<BusyEnergy> {
    if !dt.is_finite() || dt < 0.0 {
        return Err(Error::NegativeInterval(dt));
    }
    if let Some(used) = blocks_used {
        for block in used {
            if !compute.has_block(block) {
                return Err(Error::UnknownBlock {
                    resource: compute.id.clone(),
                    block: block.clone(),
                });
            }
        }
    }
    let full = BusyEnergy {
        busy_j: compute.p_busy_w * dt,
        wake_j: 0.0,
        gated_saving_j: 0.0,
    };
    let used = match (policy.kind, blocks_used) {
        (GatingKind::Fine, Some(used)) => used,
        _ => return Ok(full),
    };
    let mut saving = 0.0;
    let mut gated = 0u32;
    for (block, share) in &compute.block_shares {
        if !used.contains(block) {
            saving += share * compute.p_idle_w * (1.0 - policy.residual_fraction) * dt;
            gated += 1;
        }
    }
    Ok(BusyEnergy {
        busy_j: full.busy_j - saving,
        wake_j: f64::from(gated) * policy.wake_energy_j,
        gated_saving_j: saving,
    })
}
