use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::BootstrapMode;
use crate::error::Result;
use crate::neighbors::PointCloud;
use crate::synthgen::Generator;

/// Where bootstrap replicates come from.
pub trait ReplicateSource: Send + Sync {
    fn mode(&self) -> BootstrapMode;
    fn draw(&self, rng: &mut ChaCha8Rng) -> Result<PointCloud>;
}

/// Same-size resample with replacement.
pub struct SubsampleSource {
    cloud: PointCloud,
}

impl SubsampleSource {
    pub fn new(cloud: PointCloud) -> Self {
        Self { cloud }
    }
}

impl ReplicateSource for SubsampleSource {
    fn mode(&self) -> BootstrapMode {
        BootstrapMode::Subsample
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Result<PointCloud> {
        let n = self.cloud.len();
        let picks: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        self.cloud.select(&picks)
    }
}

/// Fresh draws from the data-generating process.
pub struct OracleSource {
    generator: Arc<dyn Generator>,
}

impl OracleSource {
    pub fn new(generator: Arc<dyn Generator>) -> Self {
        Self { generator }
    }
}

impl ReplicateSource for OracleSource {
    fn mode(&self) -> BootstrapMode {
        BootstrapMode::Oracle
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Result<PointCloud> {
        self.generator.generate(rng)
    }
}

/// Returns the same cloud every time.
pub struct FixedSource {
    cloud: PointCloud,
    mode: BootstrapMode,
}

impl FixedSource {
    pub fn new(cloud: PointCloud, mode: BootstrapMode) -> Self {
        Self { cloud, mode }
    }
}

impl ReplicateSource for FixedSource {
    fn mode(&self) -> BootstrapMode {
        self.mode
    }

    fn draw(&self, _rng: &mut ChaCha8Rng) -> Result<PointCloud> {
        Ok(self.cloud.clone())
    }
}
