//! Bootstrap confidence radii for persistence diagrams.
//!
//! Each replicate is a fresh sample (a resample of the data, or a new draw
//! from a generator) pushed through the same [`Pipeline`] on the same grid.
//! The radius is an empirical quantile of the replicate-to-data bottleneck
//! distances.

mod pipeline;
mod source;

pub use pipeline::Pipeline;
pub use source::{FixedSource, OracleSource, ReplicateSource, SubsampleSource};

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cubical::PersistenceDiagram;
use crate::diagrams::bottleneck;
use crate::error::{Error, Result};
use crate::neighbors::PointCloud;
use crate::synthgen::Generator;

pub const DEFAULT_REPLICATES: usize = 100;
pub const DEFAULT_ALPHA: f64 = 0.05;
pub const DEFAULT_MAX_REDRAWS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BootstrapMode {
    Subsample,
    Oracle,
}

impl BootstrapMode {
    pub fn as_str(self) -> &'static str {
        match self {
            BootstrapMode::Subsample => "subsample",
            BootstrapMode::Oracle => "oracle",
        }
    }
}

impl fmt::Display for BootstrapMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BootstrapMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subsample" => Ok(BootstrapMode::Subsample),
            "oracle" => Ok(BootstrapMode::Oracle),
            _ => Err(Error::UnknownName {
                what: "bootstrap mode",
                name: s.to_string(),
                available: "oracle, subsample".into(),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BootstrapConfig {
    pub replicates: usize,
    pub alpha: f64,
    pub seed: u64,
    pub mode: BootstrapMode,
    /// Homology dimension compared by the bottleneck distance.
    pub dim: usize,
    /// Fresh draws allowed per replicate after a duplicate overload.
    pub max_redraws: usize,
}

impl BootstrapConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            replicates: DEFAULT_REPLICATES,
            alpha: DEFAULT_ALPHA,
            seed,
            mode: BootstrapMode::Subsample,
            dim: 1,
            max_redraws: DEFAULT_MAX_REDRAWS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::InvalidParameter(
                "at least one replicate is required".into(),
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    pub radius: f64,
    pub alpha: f64,
    #[serde(rename = "B")]
    pub replicates: usize,
    pub dim: usize,
    /// Bottleneck distance of each replicate, in replicate order.
    pub distances: Vec<f64>,
    /// Replicates that needed at least one redraw.
    pub reseeded_replicates: usize,
    pub mode: BootstrapMode,
    pub seed: u64,
}

/// Order statistic `ceil((1 - alpha) B)` of the distances (1-based).
pub fn quantile(distances: &[f64], alpha: f64) -> f64 {
    assert!(!distances.is_empty(), "quantile of an empty sample");
    let b = distances.len();
    // Absorbs rounding such as 0.95 * 100 landing just above 95.
    let rank = (((1.0 - alpha) * b as f64) - 1e-9)
        .ceil()
        .clamp(1.0, b as f64) as usize;
    let mut sorted = distances.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted[rank - 1]
}

/// Seed of draw `attempt` for replicate `index`; independent of scheduling.
pub fn replicate_seed(root: u64, index: usize, attempt: usize) -> u64 {
    let a = splitmix64(root ^ splitmix64(index as u64));
    splitmix64(a.wrapping_add((attempt as u64).wrapping_mul(0xD1B5_4A32_D192_ED03)))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs `cfg.replicates` replicates against an already computed empirical
/// diagram. Replicates run in parallel; results depend only on the seed.
pub fn run_bootstrap(
    empirical: &PersistenceDiagram,
    source: &dyn ReplicateSource,
    pipeline: &Pipeline,
    cfg: &BootstrapConfig,
) -> Result<BootstrapResult> {
    cfg.validate()?;
    let outcomes: Vec<Result<(f64, bool)>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|b| replicate(empirical, source, pipeline, cfg, b))
        .collect();
    let mut distances = Vec::with_capacity(cfg.replicates);
    let mut reseeded = 0;
    for outcome in outcomes {
        let (d, redrawn) = outcome?;
        distances.push(d);
        reseeded += usize::from(redrawn);
    }
    Ok(BootstrapResult {
        radius: quantile(&distances, cfg.alpha),
        alpha: cfg.alpha,
        replicates: cfg.replicates,
        dim: cfg.dim,
        distances,
        reseeded_replicates: reseeded,
        mode: source.mode(),
        seed: cfg.seed,
    })
}

fn replicate(
    empirical: &PersistenceDiagram,
    source: &dyn ReplicateSource,
    pipeline: &Pipeline,
    cfg: &BootstrapConfig,
    index: usize,
) -> Result<(f64, bool)> {
    for attempt in 0..=cfg.max_redraws {
        let mut rng = ChaCha8Rng::seed_from_u64(replicate_seed(cfg.seed, index, attempt));
        let cloud = source.draw(&mut rng)?;
        match pipeline.diagram(&cloud, false) {
            Ok(d) => return Ok((bottleneck(empirical, &d, cfg.dim), attempt > 0)),
            Err(Error::DuplicateOverload { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::ReplicateRetriesExhausted {
        replicate: index,
        attempts: cfg.max_redraws + 1,
    })
}

/// Resamples `N` points with replacement from `cloud`.
pub fn subsample_bootstrap(
    cloud: &PointCloud,
    pipeline: &Pipeline,
    cfg: &BootstrapConfig,
) -> Result<BootstrapResult> {
    let empirical = pipeline.diagram(cloud, true)?;
    run_bootstrap(
        &empirical,
        &SubsampleSource::new(cloud.clone()),
        pipeline,
        cfg,
    )
}

/// Draws fresh samples from `generator`, corruption included.
pub fn oracle_bootstrap(
    cloud: &PointCloud,
    generator: Arc<dyn Generator>,
    pipeline: &Pipeline,
    cfg: &BootstrapConfig,
) -> Result<BootstrapResult> {
    let empirical = pipeline.diagram(cloud, true)?;
    run_bootstrap(&empirical, &OracleSource::new(generator), pipeline, cfg)
}
