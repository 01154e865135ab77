use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Normal};
use serde::{Deserialize, Serialize};

use super::{labeled, Generator, Rect};
use crate::error::{Error, Result};
use crate::neighbors::{Label, PointCloud};

const SITE_ATTEMPTS: usize = 16;

/// Noisy samples on the edges of a planar Voronoi diagram whose sites
/// crowd around the line `x = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoronoiParams {
    /// Number of sites in the full diagram.
    pub m_cells: usize,
    /// Super-sample size before cropping.
    pub n_plus: usize,
    pub p_outlier: f64,
    /// Laplace scale of site x-coordinates.
    pub lambda: f64,
    /// Site y-coordinates are uniform on `[-y_plus, y_plus]`.
    pub y_plus: f64,
    pub sigma0: f64,
    pub x0: f64,
    pub y0: f64,
    /// The clipping box extends this many `lambda` past the sites in x.
    pub box_margin: f64,
}

impl Default for VoronoiParams {
    fn default() -> Self {
        Self {
            m_cells: 200,
            n_plus: 20_000,
            p_outlier: 0.002,
            lambda: 1.0,
            y_plus: 2.0,
            sigma0: 0.01,
            x0: 3.0,
            y0: 1.0,
            box_margin: 4.0,
        }
    }
}

impl VoronoiParams {
    pub fn crop(&self) -> Result<Rect> {
        Rect::centered(self.x0, self.y0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.into()));
        if self.m_cells < 2 || self.n_plus == 0 {
            return bad("voronoi needs at least two sites and one sample");
        }
        if !(0.0..1.0).contains(&self.p_outlier) {
            return bad("outlier fraction must lie in [0, 1)");
        }
        let scales = [self.lambda, self.y_plus, self.x0, self.y0];
        if scales.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
            return bad("voronoi scales must be positive and finite");
        }
        if !(self.sigma0 >= 0.0 && self.sigma0.is_finite()) || !(self.box_margin >= 0.0) {
            return bad("noise scale and box margin must be non-negative");
        }
        Ok(())
    }
}

/// Intermediate geometry kept for inspection and tests.
#[derive(Clone, Debug)]
pub struct VoronoiSample {
    pub cloud: PointCloud,
    pub sites: Vec<[f64; 2]>,
    /// Clipped cell polygons, counter-clockwise, one per site.
    pub cells: Vec<Vec<[f64; 2]>>,
    pub working_box: Rect,
    /// Super-sample points replaced by outliers before cropping.
    pub n_replaced: usize,
}

pub fn gen_voronoi(params: &VoronoiParams, rng: &mut ChaCha8Rng) -> Result<PointCloud> {
    gen_voronoi_detailed(params, rng).map(|s| s.cloud)
}

pub fn gen_voronoi_detailed(params: &VoronoiParams, rng: &mut ChaCha8Rng) -> Result<VoronoiSample> {
    params.validate()?;
    let crop = params.crop()?;
    let sites = draw_sites(params, rng)?;

    let (lo, hi) = sites
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
            (lo.min(s[0]), hi.max(s[0]))
        });
    let margin = params.box_margin * params.lambda;
    let working_box = Rect::new([lo - margin, -params.y_plus], [hi + margin, params.y_plus])?;
    let cells: Vec<Vec<[f64; 2]>> = (0..sites.len())
        .map(|i| voronoi_cell(&sites, i, &working_box))
        .collect();
    let perimeters: Vec<Vec<f64>> = cells.iter().map(|c| cumulative_perimeter(c)).collect();
    if perimeters
        .iter()
        .any(|p| !(p.last().copied().unwrap_or(0.0) > 0.0))
    {
        return Err(Error::DegenerateVoronoi { attempts: 1 });
    }

    let mut coords = Vec::with_capacity(2 * params.n_plus);
    for _ in 0..params.n_plus {
        let c = rng.random_range(0..cells.len());
        coords.extend(point_on_boundary(&cells[c], &perimeters[c], rng));
    }
    if params.sigma0 > 0.0 {
        let std = Normal::new(0.0, 1.0).expect("unit normal");
        for p in coords.chunks_exact_mut(2) {
            let sigma = params.sigma0 * (p[0].abs() / params.lambda).exp();
            p[0] += sigma * std.sample(rng);
            p[1] += sigma * std.sample(rng);
        }
    }
    let mut labels = vec![Label::Signal; params.n_plus];
    let n_replaced = (params.p_outlier * params.n_plus as f64).floor() as usize;
    for i in index::sample(rng, params.n_plus, n_replaced) {
        let q = crop.sample(rng);
        coords[2 * i..2 * i + 2].copy_from_slice(&q);
        labels[i] = Label::Outlier;
    }

    let mut kept = Vec::new();
    let mut kept_labels = Vec::new();
    for (p, &l) in coords.chunks_exact(2).zip(&labels) {
        if crop.contains(p) {
            kept.extend_from_slice(p);
            kept_labels.push(l);
        }
    }
    let cloud = labeled(kept, kept_labels)?;
    Ok(VoronoiSample {
        cloud,
        sites,
        cells,
        working_box,
        n_replaced,
    })
}

/// Laplace x via a signed exponential, uniform y. Duplicate sites are
/// redrawn from the same stream.
fn draw_sites(params: &VoronoiParams, rng: &mut ChaCha8Rng) -> Result<Vec<[f64; 2]>> {
    for _ in 0..SITE_ATTEMPTS {
        let sites: Vec<[f64; 2]> = (0..params.m_cells)
            .map(|_| {
                let e: f64 = Exp1.sample(rng);
                let x = if rng.random_bool(0.5) { e } else { -e } * params.lambda;
                let y = rng.random_range(-params.y_plus..=params.y_plus);
                [x, y]
            })
            .collect();
        let mut sorted = sites.clone();
        sorted.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        if sorted.windows(2).all(|w| w[0] != w[1]) {
            return Ok(sites);
        }
    }
    Err(Error::DegenerateVoronoi {
        attempts: SITE_ATTEMPTS,
    })
}

/// Cell of site `i`: the box clipped by the bisector half-plane of every
/// other site.
fn voronoi_cell(sites: &[[f64; 2]], i: usize, bx: &Rect) -> Vec<[f64; 2]> {
    let mut poly = vec![
        [bx.lower[0], bx.lower[1]],
        [bx.upper[0], bx.lower[1]],
        [bx.upper[0], bx.upper[1]],
        [bx.lower[0], bx.upper[1]],
    ];
    let s = sites[i];
    for (j, t) in sites.iter().enumerate() {
        if j == i || poly.is_empty() {
            continue;
        }
        let n = [t[0] - s[0], t[1] - s[1]];
        let m = [(t[0] + s[0]) / 2.0, (t[1] + s[1]) / 2.0];
        poly = clip(&poly, n, m);
    }
    poly
}

/// Keeps `{p : (p - m) . n <= 0}` of a convex polygon.
fn clip(poly: &[[f64; 2]], n: [f64; 2], m: [f64; 2]) -> Vec<[f64; 2]> {
    let side = |p: [f64; 2]| (p[0] - m[0]) * n[0] + (p[1] - m[1]) * n[1];
    let values: Vec<f64> = poly.iter().map(|&p| side(p)).collect();
    if values.iter().all(|&v| v <= 0.0) {
        return poly.to_vec();
    }
    let mut out = Vec::with_capacity(poly.len() + 1);
    for k in 0..poly.len() {
        let (a, b) = (poly[k], poly[(k + 1) % poly.len()]);
        let (fa, fb) = (values[k], values[(k + 1) % poly.len()]);
        if fa <= 0.0 {
            out.push(a);
        }
        if (fa <= 0.0) != (fb <= 0.0) {
            let t = fa / (fa - fb);
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

/// Running edge-length sums; the last entry is the perimeter.
fn cumulative_perimeter(poly: &[[f64; 2]]) -> Vec<f64> {
    let mut acc = 0.0;
    (0..poly.len())
        .map(|k| {
            let (a, b) = (poly[k], poly[(k + 1) % poly.len()]);
            acc += (b[0] - a[0]).hypot(b[1] - a[1]);
            acc
        })
        .collect()
}

fn point_on_boundary(poly: &[[f64; 2]], cum: &[f64], rng: &mut ChaCha8Rng) -> [f64; 2] {
    let total = *cum.last().expect("non-empty polygon");
    let s = rng.random::<f64>() * total;
    let k = cum.partition_point(|&c| c <= s).min(cum.len() - 1);
    let start = if k == 0 { 0.0 } else { cum[k - 1] };
    let len = cum[k] - start;
    let t = if len > 0.0 {
        ((s - start) / len).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (a, b) = (poly[k], poly[(k + 1) % poly.len()]);
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

impl Generator for VoronoiParams {
    fn family(&self) -> &'static str {
        "voronoi"
    }

    fn generate(&self, rng: &mut ChaCha8Rng) -> Result<PointCloud> {
        gen_voronoi(self, rng)
    }

    fn params(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain data")
    }
}
