//! Filtration functions built from a point sample: distance, distance to
//! measure (DTM), density-aware distance (DAD) and its robust version
//! (RDAD), plus their evaluation on uniform grids.
//!
//! Each function is a [`Filtration`] strategy constructed by name through
//! a [`FiltrationRegistry`].

mod grid;
mod registry;

pub use grid::{build_field, build_field_with, evaluate_grid, make_grid, GridSpec, ScalarField};
pub use registry::{
    DensityAwareDistance, DistanceFunction, DistanceToMeasure, Filtration, FiltrationInputs,
    FiltrationRegistry, FiltrationStrategy, RobustDensityAwareDistance, Scratch,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::neighbors::{DensityProfile, NeighborIndex};

/// Default mass fraction for the DTM-style averaging.
pub const DEFAULT_M_DTM: f64 = 0.002;

/// `ceil((log10 N)^2)`, the neighbor count for density estimation.
pub fn default_k_den(n: usize) -> usize {
    assert!(n >= 2, "need at least two points");
    let l = (n as f64).log10();
    (l * l).ceil() as usize
}

/// `max(1, round(m N))` with halves rounded up.
pub fn default_k_dtm(n: usize, m_dtm: f64) -> usize {
    assert!(m_dtm > 0.0 && m_dtm < 1.0, "m_dtm must lie in (0, 1)");
    ((m_dtm * n as f64 + 0.5).floor() as usize).max(1)
}

/// Which filtration to build and how its neighbor counts are chosen.
/// Unset counts fall back to [`default_k_den`] and [`default_k_dtm`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiltrationSpec {
    pub kind: String,
    pub k_dtm: Option<usize>,
    pub k_den: Option<usize>,
    pub m_dtm: f64,
}

impl FiltrationSpec {
    pub fn new(kind: impl Into<String>) -> Self {
        Self {
            kind: kind.into(),
            k_dtm: None,
            k_den: None,
            m_dtm: DEFAULT_M_DTM,
        }
    }

    pub fn with_k_dtm(mut self, k: usize) -> Self {
        self.k_dtm = Some(k);
        self
    }

    pub fn with_k_den(mut self, k: usize) -> Self {
        self.k_den = Some(k);
        self
    }

    pub fn with_m_dtm(mut self, m: f64) -> Self {
        self.m_dtm = m;
        self
    }

    /// Fixes the neighbor counts for a sample of `n` points, keeping only
    /// the ones the named strategy consumes.
    pub fn resolve(&self, registry: &FiltrationRegistry, n: usize) -> Result<ResolvedFiltration> {
        let strategy = registry.get(&self.kind)?;
        let k_dtm = if strategy.uses_k_dtm() {
            if !(self.m_dtm > 0.0 && self.m_dtm < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "m_dtm must lie in (0, 1), got {}",
                    self.m_dtm
                )));
            }
            let k = self.k_dtm.unwrap_or_else(|| default_k_dtm(n, self.m_dtm));
            if k == 0 || k > n {
                return Err(Error::InvalidParameter(format!(
                    "k_dtm must lie in 1..={n}, got {k}"
                )));
            }
            Some(k)
        } else {
            None
        };
        let k_den = if strategy.uses_density() {
            if n < 2 {
                return Err(Error::InvalidParameter(
                    "density estimation needs at least two points".into(),
                ));
            }
            let k = self.k_den.unwrap_or_else(|| default_k_den(n));
            if k < 2 || k > n {
                return Err(Error::InvalidParameter(format!(
                    "k_den must lie in 2..={n}, got {k}"
                )));
            }
            Some(k)
        } else {
            None
        };
        Ok(ResolvedFiltration {
            kind: strategy.name().to_string(),
            k_dtm,
            k_den,
        })
    }
}

/// A filtration kind with concrete neighbor counts for a given sample.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolvedFiltration {
    pub kind: String,
    pub k_dtm: Option<usize>,
    pub k_den: Option<usize>,
}

/// Mean of the first `k` squared values, square-rooted.
#[inline]
fn root_mean(squares: &[(f64, usize)]) -> f64 {
    let mut sum = 0.0;
    for &(s, _) in squares {
        sum += s;
    }
    (sum / squares.len() as f64).sqrt()
}

fn check_query(index: &NeighborIndex, x: &[f64]) -> Result<()> {
    if x.len() != index.dim() {
        return Err(Error::InvalidParameter(format!(
            "query has dimension {}, sample has {}",
            x.len(),
            index.dim()
        )));
    }
    Ok(())
}

fn check_k(index: &NeighborIndex, k: usize) -> Result<()> {
    if k == 0 || k > index.len() {
        return Err(Error::RankOutOfRange { k, n: index.len() });
    }
    Ok(())
}

/// Euclidean distance from `x` to the nearest sample point.
pub fn distance_to_set(index: &NeighborIndex, x: &[f64]) -> Result<f64> {
    eval_dtm(index, x, 1)
}

/// Root mean square of the `k_dtm` smallest distances from `x` to the
/// sample.
pub fn eval_dtm(index: &NeighborIndex, x: &[f64], k_dtm: usize) -> Result<f64> {
    check_k(index, k_dtm)?;
    check_query(index, x)?;
    let mut scratch = Vec::with_capacity(k_dtm);
    Ok(dtm_unchecked(index, x, k_dtm, &mut scratch))
}

/// `c_norm` times the root mean square of the `k_dtm` smallest ratios
/// `d(x, X_i) / d_i`. The order statistics are taken over the ratios,
/// not over the raw distances.
pub fn eval_rdad(
    index: &NeighborIndex,
    profile: &DensityProfile,
    x: &[f64],
    k_dtm: usize,
) -> Result<f64> {
    check_k(index, k_dtm)?;
    check_query(index, x)?;
    profile.check_matches(index)?;
    let mut scratch = Vec::with_capacity(k_dtm);
    Ok(rdad_unchecked(index, profile, x, k_dtm, &mut scratch))
}

/// `min_i c_norm d(x, X_i) / d_i`; the `k_dtm = 1` case of [`eval_rdad`].
pub fn eval_dad(index: &NeighborIndex, profile: &DensityProfile, x: &[f64]) -> Result<f64> {
    eval_rdad(index, profile, x, 1)
}

#[inline]
pub(crate) fn dtm_unchecked(
    index: &NeighborIndex,
    x: &[f64],
    k: usize,
    scratch: &mut Vec<(f64, usize)>,
) -> f64 {
    index.k_smallest_squared(x, k, scratch);
    root_mean(scratch)
}

#[inline]
pub(crate) fn rdad_unchecked(
    index: &NeighborIndex,
    profile: &DensityProfile,
    x: &[f64],
    k: usize,
    scratch: &mut Vec<(f64, usize)>,
) -> f64 {
    // Squared ratios d(x, X_i)^2 / d_i^2, k smallest.
    index.k_smallest_weighted(x, k, &profile.inverse_sq, scratch);
    profile.c_norm() * root_mean(scratch)
}
