use std::f64::consts::PI;

use super::{NeighborIndex, ScaledNeighbors};
use crate::error::{Error, Result};

/// Volume of the unit ball in `dim` dimensions, `pi^(D/2) / Gamma(D/2 + 1)`.
pub fn unit_ball_volume(dim: usize) -> f64 {
    assert!(dim >= 1, "dimension must be positive");
    PI.powf(dim as f64 / 2.0) / gamma_half_integer(dim + 2)
}

/// `Gamma(m / 2)` for a positive integer `m`, by the recurrence from
/// `Gamma(1) = 1` and `Gamma(1/2) = sqrt(pi)`.
fn gamma_half_integer(m: usize) -> f64 {
    let (mut g, mut x) = if m.is_multiple_of(2) {
        (1.0, 1.0)
    } else {
        (PI.sqrt(), 0.5)
    };
    while 2.0 * x < m as f64 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Nearest-neighbor density estimate `(k/N) / (omega_D d_k(x)^D)`.
pub fn knn_density(index: &NeighborIndex, x: &[f64], k: usize) -> Result<f64> {
    let dk = index.kth_distance(x, k)?;
    if dk == 0.0 {
        return Err(Error::DegenerateDistance { k });
    }
    let dim = index.dim();
    let n = index.len() as f64;
    Ok((k as f64 / n) / (unit_ball_volume(dim) * dk.powi(dim as i32)))
}

/// Per-point `k_den`-th neighbor distances and the normalizing constant
/// that turns `d(x, X_i) / d_i` into `d(x, X_i) * f_hat(X_i)^(1/D)`.
#[derive(Clone, Debug)]
pub struct DensityProfile {
    k_den: usize,
    distances: Vec<f64>,
    c_norm: f64,
    omega: f64,
    fingerprint: u64,
    /// `1 / d_i^2` arranged for weighted kd-tree queries.
    pub(crate) inverse_sq: ScaledNeighbors,
}

impl DensityProfile {
    pub fn k_den(&self) -> usize {
        self.k_den
    }

    /// `d_i`: distance from `X_i` to its `k_den`-th nearest sample point,
    /// the point itself counting as the first.
    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    /// `(k_den / (N omega_D))^(1/D)`.
    pub fn c_norm(&self) -> f64 {
        self.c_norm
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub(crate) fn check_matches(&self, index: &NeighborIndex) -> Result<()> {
        if self.fingerprint != index.fingerprint() || self.distances.len() != index.len() {
            return Err(Error::CloudMismatch);
        }
        Ok(())
    }
}

pub fn density_profile(index: &NeighborIndex, k_den: usize) -> Result<DensityProfile> {
    let n = index.len();
    if k_den < 2 || k_den > n {
        return Err(Error::InvalidParameter(format!(
            "k_den must lie in 2..={n}, got {k_den}"
        )));
    }
    let cloud = index.cloud();
    let mut buf = Vec::with_capacity(k_den);
    let mut distances = Vec::with_capacity(n);
    for (i, p) in cloud.points().enumerate() {
        index.k_smallest_squared(p, k_den, &mut buf);
        let d = buf[k_den - 1].0.sqrt();
        if d == 0.0 {
            return Err(Error::DuplicateOverload { index: i, k_den });
        }
        distances.push(d);
    }
    let dim = index.dim();
    let omega = unit_ball_volume(dim);
    let c_norm = (k_den as f64 / (n as f64 * omega)).powf(1.0 / dim as f64);
    let inv: Vec<f64> = distances.iter().map(|d| 1.0 / (d * d)).collect();
    Ok(DensityProfile {
        k_den,
        inverse_sq: index.weighting(&inv),
        distances,
        c_norm,
        omega,
        fingerprint: index.fingerprint(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neighbors::PointCloud;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn line(xs: &[f64]) -> NeighborIndex {
        NeighborIndex::new(PointCloud::new(1, xs.to_vec()).unwrap())
    }

    #[test]
    fn unit_ball_volumes_match_known_values() {
        let known = [2.0, PI, 4.0 * PI / 3.0, PI * PI / 2.0, 8.0 * PI * PI / 15.0];
        for (d, v) in known.iter().enumerate() {
            assert!((unit_ball_volume(d + 1) - v).abs() < 1e-12, "D = {}", d + 1);
        }
    }

    #[test]
    fn density_on_a_line() {
        let idx = line(&[0.0, 1.0, 2.0, 10.0]);
        assert_eq!(knn_density(&idx, &[0.5], 2).unwrap(), 0.5);
    }

    #[test]
    fn density_single_planar_point() {
        let idx = NeighborIndex::new(PointCloud::new(2, vec![0.0, 0.0]).unwrap());
        let f = knn_density(&idx, &[0.6, 0.8], 1).unwrap();
        assert!((f - 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn density_degenerate_at_data_point() {
        let idx = line(&[0.0, 1.0, 2.0, 10.0]);
        assert!(matches!(
            knn_density(&idx, &[1.0], 1),
            Err(Error::DegenerateDistance { k: 1 })
        ));
    }

    fn uniform_square_index(seed: u64, n: usize) -> NeighborIndex {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coords: Vec<f64> = (0..2 * n).map(|_| rng.random::<f64>()).collect();
        NeighborIndex::new(PointCloud::new(2, coords).unwrap())
    }

    #[test]
    fn uniform_square_density_near_one_at_center() {
        // A single k = 14 estimate is 14 / Gamma(14, 1) in law, which falls
        // inside +-30% about 75% of the time; check the band across a
        // fixed seed sweep.
        let n = 5000;
        let k = ((n as f64).log10().powi(2)).ceil() as usize;
        assert_eq!(k, 14);
        let hits = (0..20)
            .filter(|&seed| {
                let f = knn_density(&uniform_square_index(seed, n), &[0.5, 0.5], k).unwrap();
                (f - 1.0).abs() <= 0.3
            })
            .count();
        assert!(hits >= 12, "{hits} of 20 within 30%");
    }

    #[test]
    fn uniform_square_density_mean_over_interior() {
        let n = 5000;
        let idx = uniform_square_index(2024, n);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = 400;
        let mean = (0..m)
            .map(|_| {
                let x = [rng.random_range(0.2..0.8), rng.random_range(0.2..0.8)];
                knn_density(&idx, &x, 14).unwrap()
            })
            .sum::<f64>()
            / m as f64;
        // The estimator's mean is k / (k - 1) for a uniform density.
        assert!((mean - 14.0 / 13.0).abs() < 0.06, "mean {mean}");
    }

    #[test]
    fn profile_on_a_line() {
        let p = density_profile(&line(&[0.0, 1.0, 2.0, 10.0]), 2).unwrap();
        assert_eq!(p.distances(), &[1.0, 1.0, 1.0, 8.0]);
        assert_eq!(p.c_norm(), 0.25);
        assert_eq!(p.k_den(), 2);
    }

    #[test]
    fn profile_rank_two_is_nearest_other_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cloud = PointCloud::new(2, (0..80).map(|_| rng.random::<f64>()).collect()).unwrap();
        let p = density_profile(&NeighborIndex::new(cloud.clone()), 2).unwrap();
        for (i, x) in cloud.points().enumerate() {
            let nearest = cloud
                .points()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, y)| super::super::squared_distance(x, y).sqrt())
                .fold(f64::INFINITY, f64::min);
            assert_eq!(p.distances()[i], nearest);
        }
    }

    #[test]
    fn profile_rejects_overloaded_duplicates() {
        let idx = line(&[0.0, 0.0, 0.0, 5.0]);
        assert!(matches!(
            density_profile(&idx, 3),
            Err(Error::DuplicateOverload { index: 0, k_den: 3 })
        ));
        // Two copies are fine for k_den = 3.
        assert!(density_profile(&line(&[0.0, 0.0, 1.0, 5.0]), 3).is_ok());
        assert!(density_profile(&idx, 1).is_err());
        assert!(density_profile(&idx, 5).is_err());
    }

    #[test]
    fn c_norm_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let cloud = PointCloud::new(2, (0..1000).map(|_| rng.random::<f64>()).collect()).unwrap();
        let p = density_profile(&NeighborIndex::new(cloud), 8).unwrap();
        let want = (8.0 / (500.0 * PI)).sqrt();
        assert!((p.c_norm() - want).abs() <= 1e-15 * want);
    }
}
