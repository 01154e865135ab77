//! Seeded generators for the synthetic benchmark datasets.
//!
//! Every generator is a pure function of its parameters and the state of
//! the supplied [`ChaCha8Rng`]; [`rng`] fixes the seeding convention.

mod annulus;
mod presets;
mod voronoi;

pub use annulus::{gen_two_square, sample_square_annulus, TwoSquareParams};
pub use presets::{Preset, PresetRegistry};
pub use voronoi::{gen_voronoi, gen_voronoi_detailed, VoronoiParams, VoronoiSample};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::neighbors::{Label, PointCloud};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A dataset family with fixed parameters.
pub trait Generator: Send + Sync {
    fn family(&self) -> &'static str;
    fn generate(&self, rng: &mut ChaCha8Rng) -> Result<PointCloud>;
    /// Parameter echo for provenance files.
    fn params(&self) -> serde_json::Value;

    fn generate_seeded(&self, seed: u64) -> Result<PointCloud> {
        self.generate(&mut rng(seed))
    }
}

/// Closed axis-aligned rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub lower: [f64; 2],
    pub upper: [f64; 2],
}

impl Rect {
    pub fn new(lower: [f64; 2], upper: [f64; 2]) -> Result<Self> {
        let ok =
            (0..2).all(|a| lower[a].is_finite() && upper[a].is_finite() && lower[a] < upper[a]);
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "rectangle {lower:?}..{upper:?} is empty or unbounded"
            )));
        }
        Ok(Self { lower, upper })
    }

    /// Symmetric box `[-x0, x0] x [-y0, y0]`.
    pub fn centered(x0: f64, y0: f64) -> Result<Self> {
        Self::new([-x0, -y0], [x0, y0])
    }

    pub fn bounding(cloud: &PointCloud) -> Self {
        let (lo, hi) = cloud.bounds();
        Self {
            lower: [lo[0], lo[1]],
            upper: [hi[0], hi[1]],
        }
    }

    pub fn padded(&self, fraction: f64) -> Self {
        let mut out = *self;
        for a in 0..2 {
            let pad = fraction * (self.upper[a] - self.lower[a]);
            out.lower[a] -= pad;
            out.upper[a] += pad;
        }
        out
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        (0..2).all(|a| p[a] >= self.lower[a] && p[a] <= self.upper[a])
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> [f64; 2] {
        [
            rng.random_range(self.lower[0]..=self.upper[0]),
            rng.random_range(self.lower[1]..=self.upper[1]),
        ]
    }
}

/// Appends `n_out` points uniform on `region`, labeled outlier. Existing
/// unlabeled points become signal.
pub fn add_outliers(
    cloud: &PointCloud,
    n_out: usize,
    region: &Rect,
    rng: &mut ChaCha8Rng,
) -> Result<PointCloud> {
    if cloud.dim() != 2 {
        return Err(Error::InvalidCloud(
            "outliers are drawn in the plane".into(),
        ));
    }
    Rect::new(region.lower, region.upper)?;
    let mut coords = cloud.coords().to_vec();
    let mut labels = cloud
        .labels()
        .map(<[Label]>::to_vec)
        .unwrap_or_else(|| vec![Label::Signal; cloud.len()]);
    for _ in 0..n_out {
        coords.extend(region.sample(rng));
        labels.push(Label::Outlier);
    }
    labeled(coords, labels)
}

pub(crate) fn labeled(coords: Vec<f64>, labels: Vec<Label>) -> Result<PointCloud> {
    PointCloud::new(2, coords)?.with_labels(labels)
}
