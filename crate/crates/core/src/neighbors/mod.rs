//! Point clouds, exact k-nearest-neighbor search and nearest-neighbor
//! density estimation.

mod density;
mod kdtree;

pub use density::{density_profile, knn_density, unit_ball_volume, DensityProfile};
pub use kdtree::{Neighbor, NeighborIndex, ScaledNeighbors};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Provenance tag attached to generated points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Signal,
    Noise,
    Outlier,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Signal => "signal",
            Label::Noise => "noise",
            Label::Outlier => "outlier",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "signal" => Ok(Label::Signal),
            "noise" => Ok(Label::Noise),
            "outlier" => Ok(Label::Outlier),
            other => Err(Error::Format(format!("unknown point label `{other}`"))),
        }
    }
}

/// An ordered sample of points in `dim`-dimensional Euclidean space.
///
/// Coordinates are stored flat, point-major. Labels are optional; when
/// present there is exactly one per point.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    labels: Option<Vec<Label>>,
}

impl PointCloud {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidCloud("dimension must be at least 1".into()));
        }
        if coords.is_empty() {
            return Err(Error::InvalidCloud(
                "a cloud needs at least one point".into(),
            ));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidCloud(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidCloud(format!(
                "point {} has a non-finite coordinate",
                pos / dim
            )));
        }
        Ok(Self {
            dim,
            coords,
            labels: None,
        })
    }

    pub fn from_points<P: AsRef<[f64]>>(points: &[P]) -> Result<Self> {
        let dim = points
            .first()
            .map(|p| p.as_ref().len())
            .ok_or_else(|| Error::InvalidCloud("a cloud needs at least one point".into()))?;
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::InvalidCloud(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            coords.extend_from_slice(p);
        }
        Self::new(dim, coords)
    }

    pub fn with_labels(mut self, labels: Vec<Label>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::InvalidCloud(format!(
                "{} labels for {} points",
                labels.len(),
                self.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    /// Always false for a validated cloud; present for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn labels(&self) -> Option<&[Label]> {
        self.labels.as_deref()
    }

    pub fn label(&self, i: usize) -> Option<Label> {
        self.labels.as_ref().map(|l| l[i])
    }

    /// Axis-aligned bounding box as `(lower, upper)` corners.
    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in self.points() {
            for (axis, &c) in p.iter().enumerate() {
                lo[axis] = lo[axis].min(c);
                hi[axis] = hi[axis].max(c);
            }
        }
        (lo, hi)
    }

    /// New cloud made of the points at `indices`, in that order, with
    /// labels carried along. Indices may repeat.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        let cloud = Self::new(self.dim, coords)?;
        match &self.labels {
            Some(l) => cloud.with_labels(indices.iter().map(|&i| l[i]).collect()),
            None => Ok(cloud),
        }
    }

    /// Applies `x -> scale * x + shift` to every point.
    pub fn affine(&self, scale: f64, shift: &[f64]) -> Result<Self> {
        assert_eq!(shift.len(), self.dim, "shift dimension mismatch");
        let coords = self
            .coords
            .chunks_exact(self.dim)
            .flat_map(|p| p.iter().zip(shift).map(|(c, b)| scale * c + b))
            .collect();
        let cloud = Self::new(self.dim, coords)?;
        match &self.labels {
            Some(l) => cloud.with_labels(l.clone()),
            None => Ok(cloud),
        }
    }

    /// Order-sensitive fingerprint of the coordinates, used to detect
    /// mixing a density profile with an index over a different cloud.
    pub fn fingerprint(&self) -> u64 {
        // FNV-1a over the coordinate bit patterns.
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for word in std::iter::once(self.dim as u64).chain(self.coords.iter().map(|c| c.to_bits()))
        {
            for byte in word.to_le_bytes() {
                h ^= u64::from(byte);
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        h
    }
}

/// Squared Euclidean distance, summed in axis order.
#[inline]
pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        acc += d * d;
    }
    acc
}
