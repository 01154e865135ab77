use std::io::{Read, Write};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    Filtration, FiltrationInputs, FiltrationRegistry, FiltrationSpec, ResolvedFiltration, Scratch,
};
use crate::error::{Error, Result};
use crate::neighbors::{density_profile, NeighborIndex, PointCloud};

/// Uniform axis-aligned grid of cubical cells of side `delta_x`.
///
/// Cells are numbered in row-major order over the axes: the last axis
/// varies fastest, so a 2-D cell `(i, j)` has flat index `i * counts[1] + j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lower: Vec<f64>,
    pub delta_x: f64,
    pub counts: Vec<usize>,
}

impl GridSpec {
    pub fn new(lower: Vec<f64>, delta_x: f64, counts: Vec<usize>) -> Result<Self> {
        if lower.is_empty() || lower.len() != counts.len() {
            return Err(Error::InvalidParameter(
                "grid corner and cell counts must have the same positive length".into(),
            ));
        }
        if !(delta_x > 0.0 && delta_x.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grid spacing must be positive, got {delta_x}"
            )));
        }
        if counts.contains(&0) {
            return Err(Error::InvalidParameter(
                "every grid axis needs a cell".into(),
            ));
        }
        if lower.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("grid corner must be finite".into()));
        }
        Ok(Self {
            lower,
            delta_x,
            counts,
        })
    }

    /// Smallest grid with corner `lower` whose cells cover `[lower, upper]`.
    pub fn covering(lower: &[f64], upper: &[f64], delta_x: f64) -> Result<Self> {
        let counts = lower
            .iter()
            .zip(upper)
            .enumerate()
            .map(|(axis, (lo, hi))| {
                let side = hi - lo;
                if side <= 0.0 {
                    Err(Error::DegenerateGrid { axis })
                } else {
                    Ok(cells_for(side, delta_x))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(lower.to_vec(), delta_x, counts)
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Per-axis cell indices of a flat index.
    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for axis in (0..self.dim()).rev() {
            idx[axis] = flat % self.counts[axis];
            flat /= self.counts[axis];
        }
        idx
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.counts)
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    /// Center of the cell with per-axis indices `idx`.
    pub fn center(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .zip(&self.lower)
            .map(|(&i, &lo)| lo + (i as f64 + 0.5) * self.delta_x)
            .collect()
    }

    fn center_into(&self, mut flat: usize, out: &mut [f64]) {
        for axis in (0..self.dim()).rev() {
            let i = flat % self.counts[axis];
            flat /= self.counts[axis];
            out[axis] = self.lower[axis] + (i as f64 + 0.5) * self.delta_x;
        }
    }

    /// Upper corner of the covered box.
    pub fn upper(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.counts)
            .map(|(lo, &n)| lo + n as f64 * self.delta_x)
            .collect()
    }
}

/// `ceil(side / delta_x)`, ignoring the last few ulps so exact multiples
/// do not gain a cell from rounding noise.
fn cells_for(side: f64, delta_x: f64) -> usize {
    let q = side / delta_x;
    ((q - q * 1e-12).ceil() as usize).max(1)
}

/// Bounding box of `cloud`, widened by `padding_fraction` of each side
/// length on both ends and cut into cells of side `delta_x`.
pub fn make_grid(cloud: &PointCloud, delta_x: f64, padding_fraction: f64) -> Result<GridSpec> {
    if !(delta_x > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "grid spacing must be positive, got {delta_x}"
        )));
    }
    if !(padding_fraction >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "padding fraction must be non-negative, got {padding_fraction}"
        )));
    }
    let (lo, hi) = cloud.bounds();
    let mut lower = Vec::with_capacity(lo.len());
    let mut upper = Vec::with_capacity(lo.len());
    for (axis, (a, b)) in lo.iter().zip(&hi).enumerate() {
        let side = b - a;
        if side <= 0.0 {
            return Err(Error::DegenerateGrid { axis });
        }
        lower.push(a - padding_fraction * side);
        upper.push(b + padding_fraction * side);
    }
    GridSpec::covering(&lower, &upper, delta_x)
}

/// One value per grid cell, the filtration function sampled at cell
/// centers.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<f64>,
    filtration: Option<ResolvedFiltration>,
}

impl ScalarField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "{} values for a grid of {} cells",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "field value {} at cell {i} is not finite and non-negative",
                values[i]
            )));
        }
        Ok(Self {
            grid,
            values,
            filtration: None,
        })
    }

    /// A 2-D field on the unit-spaced grid at the origin, from rows
    /// indexed by the first axis.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let nx = rows.len();
        let ny = rows.first().map_or(0, |r| r.as_ref().len());
        if nx == 0 || ny == 0 || rows.iter().any(|r| r.as_ref().len() != ny) {
            return Err(Error::InvalidParameter(
                "rows must be non-empty and equal length".into(),
            ));
        }
        let grid = GridSpec::new(vec![0.0, 0.0], 1.0, vec![nx, ny])?;
        Self::new(
            grid,
            rows.iter()
                .flat_map(|r| r.as_ref().iter().copied())
                .collect(),
        )
    }

    pub fn with_filtration(mut self, filtration: ResolvedFiltration) -> Self {
        self.filtration = Some(filtration);
        self
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn filtration(&self) -> Option<&ResolvedFiltration> {
        self.filtration.as_ref()
    }

    /// Same grid, values passed through `f`.
    pub fn map_values(&self, mut f: impl FnMut(f64) -> f64) -> Result<Self> {
        Self::new(
            self.grid.clone(),
            self.values.iter().map(|&v| f(v)).collect(),
        )
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        let file = FieldFile {
            dim: self.grid.dim(),
            lower: self.grid.lower.clone(),
            delta_x: self.grid.delta_x,
            counts: self.grid.counts.clone(),
            kind: self.filtration.as_ref().map(|f| f.kind.clone()),
            k_dtm: self.filtration.as_ref().and_then(|f| f.k_dtm),
            k_den: self.filtration.as_ref().and_then(|f| f.k_den),
            order: ROW_MAJOR.to_string(),
            values: self.values.clone(),
        };
        serde_json::to_writer(w, &file)?;
        Ok(())
    }

    pub fn read_json<R: Read>(r: R) -> Result<Self> {
        let file: FieldFile = serde_json::from_reader(r)?;
        if file.order != ROW_MAJOR {
            return Err(Error::Format(format!(
                "unsupported value order `{}`",
                file.order
            )));
        }
        if file.dim != file.counts.len() {
            return Err(Error::Format("`dim` disagrees with `counts`".into()));
        }
        let grid = GridSpec::new(file.lower, file.delta_x, file.counts)
            .map_err(|e| Error::Format(e.to_string()))?;
        let field = Self::new(grid, file.values).map_err(|e| Error::Format(e.to_string()))?;
        Ok(match file.kind {
            Some(kind) => field.with_filtration(ResolvedFiltration {
                kind,
                k_dtm: file.k_dtm,
                k_den: file.k_den,
            }),
            None => field,
        })
    }

    /// Plot-ready export, one `x,y,value` row per cell (2-D only).
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        if self.grid.dim() != 2 {
            return Err(Error::InvalidParameter(
                "CSV export needs a 2-D field".into(),
            ));
        }
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["x", "y", "value"])?;
        for (flat, v) in self.values.iter().enumerate() {
            let c = self.grid.center(&self.grid.unflatten(flat));
            out.write_record([c[0].to_string(), c[1].to_string(), v.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

const ROW_MAJOR: &str = "row-major";

#[derive(Serialize, Deserialize)]
struct FieldFile {
    dim: usize,
    lower: Vec<f64>,
    delta_x: f64,
    counts: Vec<usize>,
    kind: Option<String>,
    #[serde(default)]
    k_dtm: Option<usize>,
    #[serde(default)]
    k_den: Option<usize>,
    order: String,
    values: Vec<f64>,
}

/// Evaluates `f` at every cell center in flat order. Each cell is
/// computed independently, so the parallel and serial paths agree bit
/// for bit.
pub fn evaluate_grid(f: &dyn Filtration, grid: &GridSpec, parallel: bool) -> Vec<f64> {
    let dim = grid.dim();
    let eval = |scratch: &mut (Scratch, Vec<f64>), flat: usize| {
        grid.center_into(flat, &mut scratch.1);
        f.eval_with(&scratch.1, &mut scratch.0)
    };
    if parallel {
        (0..grid.len())
            .into_par_iter()
            .map_init(|| (Scratch::default(), vec![0.0; dim]), eval)
            .collect()
    } else {
        let mut scratch = (Scratch::default(), vec![0.0; dim]);
        (0..grid.len())
            .map(|flat| eval(&mut scratch, flat))
            .collect()
    }
}

/// Samples the filtration described by `spec` on `grid` using the
/// default strategies.
pub fn build_field(
    cloud: &PointCloud,
    spec: &FiltrationSpec,
    grid: &GridSpec,
) -> Result<ScalarField> {
    build_field_with(&FiltrationRegistry::default(), cloud, spec, grid, true)
}

pub fn build_field_with(
    registry: &FiltrationRegistry,
    cloud: &PointCloud,
    spec: &FiltrationSpec,
    grid: &GridSpec,
    parallel: bool,
) -> Result<ScalarField> {
    if grid.dim() != cloud.dim() {
        return Err(Error::InvalidParameter(format!(
            "grid is {}-D but the points are {}-D",
            grid.dim(),
            cloud.dim()
        )));
    }
    let resolved = spec.resolve(registry, cloud.len())?;
    let index = Arc::new(NeighborIndex::new(cloud.clone()));
    let profile = match resolved.k_den {
        Some(k) => Some(Arc::new(density_profile(&index, k)?)),
        None => None,
    };
    let f = registry.get(&resolved.kind)?.build(&FiltrationInputs {
        index,
        profile,
        k_dtm: resolved.k_dtm,
    })?;
    let values = evaluate_grid(f.as_ref(), grid, parallel);
    Ok(ScalarField::new(grid.clone(), values)?.with_filtration(resolved))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_cloud() -> PointCloud {
        PointCloud::from_points(&[[0.0, 0.0], [1.0, 1.0], [0.3, 0.7]]).unwrap()
    }

    #[test]
    fn grid_from_unit_square() {
        let g = make_grid(&square_cloud(), 0.5, 0.0).unwrap();
        assert_eq!(g.lower, vec![0.0, 0.0]);
        assert_eq!(g.counts, vec![2, 2]);
        let g = make_grid(&square_cloud(), 0.5, 0.25).unwrap();
        assert_eq!(g.lower, vec![-0.25, -0.25]);
        assert_eq!(g.counts, vec![3, 3]);
    }

    #[test]
    fn grid_exact_multiples_do_not_gain_cells() {
        let g = GridSpec::covering(&[0.0], &[0.6], 0.2).unwrap();
        assert_eq!(g.counts, vec![3]);
        let g = GridSpec::covering(&[0.0], &[0.61], 0.2).unwrap();
        assert_eq!(g.counts, vec![4]);
    }

    #[test]
    fn tower_rectangle() {
        let g = GridSpec::covering(&[-126.0, 23.9], &[-65.8, 50.0], 0.261).unwrap();
        assert_eq!(g.counts, vec![231, 100]);
        let up = g.upper();
        assert!(up[0] >= -65.8 && up[1] >= 50.0 - 1e-9);
    }

    #[test]
    fn degenerate_axis() {
        let line = PointCloud::from_points(&[[0.0, 1.0], [2.0, 1.0]]).unwrap();
        assert!(matches!(
            make_grid(&line, 0.1, 0.05),
            Err(Error::DegenerateGrid { axis: 1 })
        ));
        assert!(make_grid(&square_cloud(), 0.0, 0.0).is_err());
        assert!(make_grid(&square_cloud(), 0.1, -0.1).is_err());
    }

    #[test]
    fn flat_indexing_is_row_major() {
        let g = GridSpec::new(vec![0.0, 0.0], 1.0, vec![2, 3]).unwrap();
        assert_eq!(g.flatten(&[1, 2]), 5);
        assert_eq!(g.unflatten(4), vec![1, 1]);
        assert_eq!(g.center(&[1, 2]), vec![1.5, 2.5]);
    }

    #[test]
    fn single_cell_distance_field() {
        let cloud = PointCloud::from_points(&[[0.5, 0.5]]).unwrap();
        let g = GridSpec::new(vec![0.0, 0.0], 1.0, vec![1, 1]).unwrap();
        let f = build_field(&cloud, &FiltrationSpec::new("distance"), &g).unwrap();
        assert_eq!(f.values(), &[0.0]);
    }

    #[test]
    fn three_by_three_distance_field() {
        let cloud = PointCloud::from_points(&[[1.5, 1.5]]).unwrap();
        let g = GridSpec::new(vec![0.0, 0.0], 1.0, vec![3, 3]).unwrap();
        let f = build_field(&cloud, &FiltrationSpec::new("distance"), &g).unwrap();
        let s = 2f64.sqrt();
        assert_eq!(f.values(), &[s, 1.0, s, 1.0, 0.0, 1.0, s, 1.0, s]);
        assert_eq!(f.filtration().unwrap().kind, "distance");
    }

    #[test]
    fn field_json_round_trip() {
        let cloud = square_cloud();
        let g = make_grid(&cloud, 0.1, 0.05).unwrap();
        let f = build_field(&cloud, &FiltrationSpec::new("dtm").with_k_dtm(2), &g).unwrap();
        let mut buf = Vec::new();
        f.write_json(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        for key in [
            "\"dim\"",
            "\"lower\"",
            "\"delta_x\"",
            "\"counts\"",
            "\"kind\":\"dtm\"",
        ] {
            assert!(text.contains(key), "{key} missing");
        }
        assert_eq!(ScalarField::read_json(buf.as_slice()).unwrap(), f);
    }

    #[test]
    fn field_rejects_bad_values() {
        let g = GridSpec::new(vec![0.0], 1.0, vec![2]).unwrap();
        assert!(ScalarField::new(g.clone(), vec![1.0]).is_err());
        assert!(ScalarField::new(g.clone(), vec![1.0, f64::NAN]).is_err());
        assert!(ScalarField::new(g, vec![1.0, -1.0]).is_err());
    }

    #[test]
    fn csv_export() {
        let f = ScalarField::from_rows(&[[1.0, 2.0]]).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "x,y,value\n0.5,0.5,1\n0.5,1.5,2\n"
        );
    }
}
