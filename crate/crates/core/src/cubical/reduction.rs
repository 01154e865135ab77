use super::{check_prime, CubicalComplex, PersistenceDiagram, PersistenceEngine, PersistencePoint};
use crate::error::Result;

const NONE: u32 = u32::MAX;

/// Standard column reduction of the filtered boundary matrix over
/// `Z/pZ`, top dimension first so that pivots of reduced 2-columns clear
/// the matching edge columns.
#[derive(Clone, Copy, Debug)]
pub struct ReductionEngine {
    prime: u32,
}

impl ReductionEngine {
    pub const NAME: &'static str = "reduction";

    pub fn new(prime: u32) -> Result<Self> {
        check_prime(prime)?;
        Ok(Self { prime })
    }
}

type Column = Vec<(u32, u32)>;

struct Field(u64);

impl Field {
    fn lift_sign(&self, s: i8) -> u32 {
        if s > 0 {
            1
        } else {
            (self.0 - 1) as u32
        }
    }

    fn inv(&self, a: u32) -> u32 {
        // Fermat: a^(p-2).
        let p = self.0;
        let (mut base, mut exp, mut acc) = (u64::from(a) % p, p - 2, 1u64);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            exp >>= 1;
        }
        acc as u32
    }

    /// `target - factor * source`, both sorted by row.
    fn axpy(&self, target: &Column, factor: u32, source: &Column, out: &mut Column) {
        let p = self.0;
        let neg = |c: u32| ((p - u64::from(factor) * u64::from(c) % p) % p) as u32;
        out.clear();
        let (mut i, mut j) = (0, 0);
        while i < target.len() && j < source.len() {
            let (rt, ct) = target[i];
            let (rs, cs) = source[j];
            if rt < rs {
                out.push((rt, ct));
                i += 1;
            } else if rs < rt {
                out.push((rs, neg(cs)));
                j += 1;
            } else {
                let v = ((u64::from(ct) + u64::from(neg(cs))) % p) as u32;
                if v != 0 {
                    out.push((rt, v));
                }
                i += 1;
                j += 1;
            }
        }
        out.extend_from_slice(&target[i..]);
        out.extend(source[j..].iter().map(|&(r, c)| (r, neg(c))));
    }
}

impl PersistenceEngine for ReductionEngine {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn prime(&self) -> u32 {
        self.prime
    }

    fn diagram(&self, complex: &CubicalComplex) -> PersistenceDiagram {
        let field = Field(u64::from(self.prime));
        let order = complex.filtration_order();
        let n = order.len();
        let mut pos = vec![0u32; n];
        for (k, &cell) in order.iter().enumerate() {
            pos[cell as usize] = k as u32;
        }

        // pivot_of[row] = column whose reduced pivot is `row`.
        let mut pivot_of = vec![NONE; n];
        let mut columns: Vec<Column> = vec![Vec::new(); n];
        let mut cleared = vec![false; n];
        let mut col: Column = Vec::new();
        let mut tmp: Column = Vec::new();

        for dim in [2, 1] {
            for k in 0..n {
                let cell = order[k] as usize;
                if complex.cell_dim(cell) != dim || cleared[k] {
                    continue;
                }
                col.clear();
                col.extend(
                    complex
                        .boundary(cell)
                        .into_iter()
                        .map(|(face, s)| (pos[face], field.lift_sign(s))),
                );
                col.sort_unstable_by_key(|e| e.0);
                while let Some(&(piv, a)) = col.last() {
                    let other = pivot_of[piv as usize];
                    if other == NONE {
                        pivot_of[piv as usize] = k as u32;
                        if dim == 2 {
                            cleared[piv as usize] = true;
                        }
                        columns[k] = std::mem::take(&mut col);
                        break;
                    }
                    let src = &columns[other as usize];
                    let b = src.last().expect("stored columns are non-zero").1;
                    let factor = (u64::from(a) * u64::from(field.inv(b)) % field.0) as u32;
                    field.axpy(&col, factor, src, &mut tmp);
                    std::mem::swap(&mut col, &mut tmp);
                }
            }
        }

        let mut points = Vec::new();
        for k in 0..n {
            let cell = order[k] as usize;
            if let Some(&(piv, _)) = columns[k].last() {
                let birth_cell = order[piv as usize] as usize;
                let dim = complex.cell_dim(birth_cell);
                let death_cell = (dim == 1).then(|| {
                    let (a, b) = complex.cell_coords(cell);
                    [(a - 1) / 2, (b - 1) / 2]
                });
                points.push(PersistencePoint {
                    dim,
                    birth: complex.value(birth_cell),
                    death: complex.value(cell),
                    death_cell,
                });
            } else if pivot_of[k] == NONE {
                let dim = complex.cell_dim(cell);
                if dim < 2 {
                    points.push(PersistencePoint {
                        dim,
                        birth: complex.value(cell),
                        death: f64::INFINITY,
                        death_cell: None,
                    });
                }
            }
        }
        PersistenceDiagram::new(points, self.prime)
    }
}
