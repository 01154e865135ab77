use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::filtration::GridSpec;

/// One homology class: born at `birth`, dead at `death` (infinite for
/// essential classes). Loops also record the pixel whose arrival fills
/// them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PersistencePoint {
    pub dim: usize,
    pub birth: f64,
    pub death: f64,
    pub death_cell: Option<[usize; 2]>,
}

impl PersistencePoint {
    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }

    pub fn is_essential(&self) -> bool {
        self.death == f64::INFINITY
    }
}

/// Multiset of persistence points over `Z/pZ`, stored sorted by
/// `(dim, birth, death, death_cell)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PersistenceDiagram {
    points: Vec<PersistencePoint>,
    field_char: u32,
}

impl PersistenceDiagram {
    /// Builds a diagram, dropping zero-persistence points.
    pub fn new(mut points: Vec<PersistencePoint>, field_char: u32) -> Self {
        points.retain(|p| p.death > p.birth);
        points.sort_by(|a, b| {
            a.dim
                .cmp(&b.dim)
                .then(a.birth.total_cmp(&b.birth))
                .then(a.death.total_cmp(&b.death))
                .then(a.death_cell.cmp(&b.death_cell))
        });
        Self { points, field_char }
    }

    pub fn points(&self) -> &[PersistencePoint] {
        &self.points
    }

    pub fn field_char(&self) -> u32 {
        self.field_char
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn in_dim(&self, dim: usize) -> impl Iterator<Item = &PersistencePoint> + '_ {
        self.points.iter().filter(move |p| p.dim == dim)
    }

    /// `(birth, death)` pairs of one dimension.
    pub fn pairs(&self, dim: usize) -> Vec<(f64, f64)> {
        self.in_dim(dim).map(|p| (p.birth, p.death)).collect()
    }

    /// Persistences of one dimension, largest first.
    pub fn persistences(&self, dim: usize) -> Vec<f64> {
        let mut v: Vec<f64> = self.in_dim(dim).map(|p| p.persistence()).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    /// Number of classes of dimension `dim` alive at `t`
    /// (`birth <= t < death`).
    pub fn betti(&self, dim: usize, t: f64) -> usize {
        self.in_dim(dim)
            .filter(|p| p.birth <= t && t < p.death)
            .count()
    }

    /// Writes `dim,birth,death,death_x,death_y` rows; with `indices` the
    /// pixel indices follow as `death_i,death_j`.
    pub fn write_csv<W: Write>(&self, w: W, grid: &GridSpec, indices: bool) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["dim", "birth", "death", "death_x", "death_y"];
        if indices {
            header.extend(["death_i", "death_j"]);
        }
        out.write_record(&header)?;
        for p in &self.points {
            let mut row = vec![p.dim.to_string(), fmt_value(p.birth), fmt_value(p.death)];
            match p.death_cell {
                Some([i, j]) => {
                    let c = grid.center(&[i, j]);
                    row.extend([c[0].to_string(), c[1].to_string()]);
                    if indices {
                        row.extend([i.to_string(), j.to_string()]);
                    }
                }
                None => {
                    row.extend([String::new(), String::new()]);
                    if indices {
                        row.extend([String::new(), String::new()]);
                    }
                }
            }
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads a diagram CSV. Death cells are recovered only when the
    /// index columns are present.
    pub fn read_csv<R: Read>(r: R, field_char: u32) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let headers = rdr.headers()?.clone();
        let col = |name: &str| headers.iter().position(|h| h == name);
        let (dim, birth, death) = match (col("dim"), col("birth"), col("death")) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => return Err(Error::Format("diagram CSV needs dim,birth,death".into())),
        };
        let cells = col("death_i").zip(col("death_j"));
        let mut points = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let field = |i: usize| rec.get(i).unwrap_or("").trim();
            let death_cell = match cells {
                Some((ci, cj)) if !field(ci).is_empty() => {
                    Some([parse_usize(field(ci))?, parse_usize(field(cj))?])
                }
                _ => None,
            };
            points.push(PersistencePoint {
                dim: parse_usize(field(dim))?,
                birth: parse_value(field(birth))?,
                death: parse_value(field(death))?,
                death_cell,
            });
        }
        Ok(Self::new(points, field_char))
    }
}

pub(crate) fn fmt_value(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".to_string()
    } else {
        v.to_string()
    }
}

fn parse_value(s: &str) -> Result<f64> {
    match s {
        "inf" | "Inf" | "+inf" => Ok(f64::INFINITY),
        _ => s
            .parse()
            .map_err(|_| Error::Format(format!("bad number `{s}` in diagram"))),
    }
}

fn parse_usize(s: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| Error::Format(format!("bad integer `{s}` in diagram")))
}
