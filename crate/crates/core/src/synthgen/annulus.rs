use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{add_outliers, labeled, Generator, Rect};
use crate::error::{Error, Result};
use crate::neighbors::{Label, PointCloud};

/// Two or more axis-aligned square annuli. Radii are half side lengths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoSquareParams {
    pub centers: Vec<[f64; 2]>,
    pub masses: Vec<f64>,
    pub inner: Vec<f64>,
    pub outer: Vec<f64>,
    /// Per-annulus isotropic Gaussian noise; `None` for clean samples.
    pub sigma: Option<Vec<f64>>,
    pub n_outliers: usize,
    /// Outliers are uniform on the clean cloud's bounding box expanded by
    /// this fraction of each side.
    pub outlier_padding: f64,
    pub n: usize,
}

impl TwoSquareParams {
    pub fn david_goliath() -> Self {
        Self {
            centers: vec![[0.0, 0.0], [4.0, 0.0]],
            masses: vec![0.4, 0.6],
            inner: vec![1.0, 0.1],
            outer: vec![1.1, 0.12],
            sigma: None,
            n_outliers: 0,
            outlier_padding: 0.05,
            n: 500,
        }
    }

    pub fn antman() -> Self {
        Self {
            centers: vec![[0.0, 0.0], [4.0, 0.0]],
            masses: vec![0.5, 0.5],
            inner: vec![1.0, 1.0 / 3.0],
            outer: vec![1.4, 1.4 / 3.0],
            sigma: None,
            n_outliers: 0,
            outlier_padding: 0.05,
            n: 5000,
        }
    }

    pub fn antman_noisy() -> Self {
        Self {
            sigma: Some(vec![0.15, 0.05]),
            ..Self::antman()
        }
    }

    pub fn antman_outliers() -> Self {
        Self {
            n_outliers: 8,
            ..Self::antman()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.centers.len();
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if k == 0 || self.masses.len() != k || self.inner.len() != k || self.outer.len() != k {
            return bad("annulus parameter lists must be non-empty and of equal length".into());
        }
        if let Some(s) = &self.sigma {
            if s.len() != k || s.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
                return bad("noise sigmas must be finite, non-negative, one per annulus".into());
            }
        }
        if self.masses.iter().any(|&p| !(p >= 0.0)) {
            return bad("annulus masses must be non-negative".into());
        }
        let total: f64 = self.masses.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return bad(format!("annulus masses must sum to 1, got {total}"));
        }
        for (&r, &big) in self.inner.iter().zip(&self.outer) {
            check_radii(r, big)?;
        }
        if !(self.outlier_padding >= 0.0) {
            return bad("outlier padding must be non-negative".into());
        }
        if self.n == 0 {
            return bad("sample size must be positive".into());
        }
        Ok(())
    }
}

fn check_radii(r: f64, big: f64) -> Result<()> {
    if r > 0.0 && r < big && big.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "square annulus needs 0 < r < R, got r={r}, R={big}"
        )))
    }
}

/// `n` points uniform on `{r <= max(|x - cx|, |y - cy|) <= R}`, by
/// rejection from the outer square.
pub fn sample_square_annulus(
    center: [f64; 2],
    r: f64,
    big: f64,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<PointCloud> {
    check_radii(r, big)?;
    let mut coords = Vec::with_capacity(2 * n);
    push_annulus(&mut coords, center, r, big, n, rng);
    labeled(coords, vec![Label::Signal; n])
}

fn push_annulus(out: &mut Vec<f64>, c: [f64; 2], r: f64, big: f64, n: usize, rng: &mut ChaCha8Rng) {
    let mut accepted = 0;
    while accepted < n {
        let dx = rng.random_range(-big..=big);
        let dy = rng.random_range(-big..=big);
        if dx.abs().max(dy.abs()) >= r {
            out.push(c[0] + dx);
            out.push(c[1] + dy);
            accepted += 1;
        }
    }
}

/// Multinomial split of `n` by mass, uniform sampling per annulus, then
/// optional Gaussian noise and appended outliers.
pub fn gen_two_square(params: &TwoSquareParams, rng: &mut ChaCha8Rng) -> Result<PointCloud> {
    params.validate()?;
    let counts = multinomial(params.n, &params.masses, rng);
    let mut coords = Vec::with_capacity(2 * params.n);
    for (a, &count) in counts.iter().enumerate() {
        let start = coords.len();
        push_annulus(
            &mut coords,
            params.centers[a],
            params.inner[a],
            params.outer[a],
            count,
            rng,
        );
        if let Some(sigma) = &params.sigma {
            if sigma[a] > 0.0 {
                let normal = Normal::new(0.0, sigma[a]).expect("valid sigma");
                for v in &mut coords[start..] {
                    *v += normal.sample(rng);
                }
            }
        }
    }
    let clean = labeled(coords, vec![Label::Signal; params.n])?;
    if params.n_outliers == 0 {
        return Ok(clean);
    }
    let region = Rect::bounding(&clean).padded(params.outlier_padding);
    add_outliers(&clean, params.n_outliers, &region, rng)
}

/// Sequential binomial draws; counts sum to `n`.
pub(crate) fn multinomial(n: usize, masses: &[f64], rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut left = n as u64;
    let mut rest: f64 = masses.iter().sum();
    let mut counts = Vec::with_capacity(masses.len());
    for (i, &p) in masses.iter().enumerate() {
        let c = if i + 1 == masses.len() || rest <= 0.0 {
            left
        } else {
            let q = (p / rest).clamp(0.0, 1.0);
            Binomial::new(left, q)
                .expect("probability in [0, 1]")
                .sample(rng)
        };
        counts.push(c as usize);
        left -= c;
        rest -= p;
    }
    counts
}

impl Generator for TwoSquareParams {
    fn family(&self) -> &'static str {
        "two-square"
    }

    fn generate(&self, rng: &mut ChaCha8Rng) -> Result<PointCloud> {
        gen_two_square(self, rng)
    }

    fn params(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain data")
    }
}
