//! Cubical complexes built from 2-D scalar fields and their sublevel
//! persistent homology.
//!
//! Pixels are the top-dimensional cells and carry the field values; every
//! edge and vertex takes the minimum over the pixels it bounds. Cells are
//! addressed in the interleaved `(2 n_x + 1) x (2 n_y + 1)` layout where
//! pixel `(i, j)` sits at `(2i + 1, 2j + 1)`.
//!
//! Two engines compute diagrams and are registered by name:
//! `reduction` (boundary-matrix column reduction over `Z/pZ` with
//! clearing) and `union-find` (components by union-find on pixels, loops by
//! union-find on the complement in reverse order). Both order cells by
//! `(value, dimension, interleaved index)`.

mod diagram;
mod dual;
mod oracle;
mod reduction;

pub(crate) use diagram::fmt_value;
pub use diagram::{PersistenceDiagram, PersistencePoint};
pub use dual::UnionFindEngine;
pub use oracle::betti_at;
pub use reduction::ReductionEngine;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::filtration::{GridSpec, ScalarField};

/// Coefficient field used unless told otherwise.
pub const DEFAULT_PRIME: u32 = 11;

#[derive(Clone, Debug, PartialEq)]
pub struct CubicalComplex {
    grid: GridSpec,
    nx: usize,
    ny: usize,
    values: Vec<f64>,
}

impl CubicalComplex {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Pixel counts along the two axes.
    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    /// Interleaved extents `(2 n_x + 1, 2 n_y + 1)`.
    pub fn extents(&self) -> (usize, usize) {
        (2 * self.nx + 1, 2 * self.ny + 1)
    }

    pub fn num_cells(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn cell_index(&self, a: usize, b: usize) -> usize {
        a * (2 * self.ny + 1) + b
    }

    #[inline]
    pub fn cell_coords(&self, cell: usize) -> (usize, usize) {
        let h = 2 * self.ny + 1;
        (cell / h, cell % h)
    }

    #[inline]
    pub fn cell_dim(&self, cell: usize) -> usize {
        let (a, b) = self.cell_coords(cell);
        (a & 1) + (b & 1)
    }

    #[inline]
    pub fn value(&self, cell: usize) -> f64 {
        self.values[cell]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Field value of pixel `(i, j)`.
    #[inline]
    pub fn pixel_value(&self, i: usize, j: usize) -> f64 {
        self.values[self.cell_index(2 * i + 1, 2 * j + 1)]
    }

    /// Center of pixel `(i, j)` in data coordinates.
    pub fn pixel_center(&self, i: usize, j: usize) -> [f64; 2] {
        let c = self.grid.center(&[i, j]);
        [c[0], c[1]]
    }

    /// Faces of `cell` with their oriented incidence coefficients
    /// (`+1` or `-1`).
    pub(crate) fn boundary(&self, cell: usize) -> Vec<(usize, i8)> {
        let (a, b) = self.cell_coords(cell);
        match ((a & 1) == 1, (b & 1) == 1) {
            (false, false) => Vec::new(),
            (true, false) => vec![
                (self.cell_index(a + 1, b), 1),
                (self.cell_index(a - 1, b), -1),
            ],
            (false, true) => vec![
                (self.cell_index(a, b + 1), 1),
                (self.cell_index(a, b - 1), -1),
            ],
            (true, true) => vec![
                (self.cell_index(a + 1, b), 1),
                (self.cell_index(a - 1, b), -1),
                (self.cell_index(a, b + 1), -1),
                (self.cell_index(a, b - 1), 1),
            ],
        }
    }

    /// Cells sorted by `(value, dimension, index)`.
    pub(crate) fn filtration_order(&self) -> Vec<u32> {
        let mut order: Vec<u32> = (0..self.values.len() as u32).collect();
        order.sort_unstable_by(|&x, &y| {
            let (x, y) = (x as usize, y as usize);
            self.values[x]
                .total_cmp(&self.values[y])
                .then(self.cell_dim(x).cmp(&self.cell_dim(y)))
                .then(x.cmp(&y))
        });
        order
    }
}

/// Top-cell cubical complex of a 2-D field.
pub fn build_complex(field: &ScalarField) -> Result<CubicalComplex> {
    let grid = field.grid();
    if grid.dim() != 2 {
        return Err(Error::InvalidParameter(format!(
            "cubical persistence needs a 2-D field, got {}-D",
            grid.dim()
        )));
    }
    let (nx, ny) = (grid.counts[0], grid.counts[1]);
    let (w, h) = (2 * nx + 1, 2 * ny + 1);
    let px = field.values();
    let mut values = vec![f64::INFINITY; w * h];
    for i in 0..nx {
        for j in 0..ny {
            let v = px[i * ny + j];
            // The pixel and all eight faces around it.
            for a in 2 * i..=2 * i + 2 {
                for b in 2 * j..=2 * j + 2 {
                    let slot = &mut values[a * h + b];
                    if v < *slot {
                        *slot = v;
                    }
                }
            }
        }
    }
    Ok(CubicalComplex {
        grid: grid.clone(),
        nx,
        ny,
        values,
    })
}

/// Sublevel persistence by boundary-matrix reduction over `Z/pZ`.
pub fn persistence(complex: &CubicalComplex, p: u32) -> Result<PersistenceDiagram> {
    Ok(ReductionEngine::new(p)?.diagram(complex))
}

/// A persistent homology algorithm for cubical complexes.
pub trait PersistenceEngine: Send + Sync {
    fn name(&self) -> &'static str;

    /// Coefficient field characteristic the diagram is reported over.
    fn prime(&self) -> u32;

    fn diagram(&self, complex: &CubicalComplex) -> PersistenceDiagram;
}

type EngineFactory = fn(u32) -> Result<Box<dyn PersistenceEngine>>;

/// Persistence engines keyed by name, each constructed for a prime.
pub struct EngineRegistry {
    factories: BTreeMap<&'static str, EngineFactory>,
}

impl EngineRegistry {
    pub fn empty() -> Self {
        Self {
            factories: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, name: &'static str, factory: EngineFactory) {
        self.factories.insert(name, factory);
    }

    pub fn build(&self, name: &str, prime: u32) -> Result<Box<dyn PersistenceEngine>> {
        let factory = self.factories.get(name).ok_or_else(|| Error::UnknownName {
            what: "persistence engine",
            name: name.to_string(),
            available: self.names().join(", "),
        })?;
        factory(prime)
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.factories.keys().copied().collect()
    }
}

impl Default for EngineRegistry {
    fn default() -> Self {
        let mut reg = Self::empty();
        reg.register(ReductionEngine::NAME, |p| {
            Ok(Box::new(ReductionEngine::new(p)?) as Box<dyn PersistenceEngine>)
        });
        reg.register(UnionFindEngine::NAME, |p| {
            Ok(Box::new(UnionFindEngine::new(p)?) as Box<dyn PersistenceEngine>)
        });
        reg
    }
}

pub(crate) fn check_prime(p: u32) -> Result<()> {
    let prime = p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d));
    if !prime {
        return Err(Error::InvalidParameter(format!(
            "coefficient field needs a prime characteristic, got {p}"
        )));
    }
    Ok(())
}
