use super::{check_prime, CubicalComplex, PersistenceDiagram, PersistenceEngine, PersistencePoint};
use crate::error::Result;

/// Planar duality engine. Components of the sublevel set are tracked by
/// union-find over pixels in increasing order with 8-connectivity; loops
/// are components of the complement, tracked over pixels in decreasing
/// order with 4-connectivity and an always-present outside region. Needs
/// no field arithmetic, so the diagram is the same for every prime.
#[derive(Clone, Copy, Debug)]
pub struct UnionFindEngine {
    prime: u32,
}

impl UnionFindEngine {
    pub const NAME: &'static str = "union-find";

    pub fn new(prime: u32) -> Result<Self> {
        check_prime(prime)?;
        Ok(Self { prime })
    }
}

struct Components {
    parent: Vec<u32>,
    /// Rank of the oldest member, by processing order (smaller is older).
    oldest: Vec<u32>,
}

impl Components {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            oldest: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let up = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = up;
            x = up;
        }
        x
    }

    /// Merges two roots; returns the rank of the younger oldest-member,
    /// whose class dies.
    fn merge(&mut self, a: u32, b: u32) -> u32 {
        let (oa, ob) = (self.oldest[a as usize], self.oldest[b as usize]);
        let (keep, drop) = if oa < ob { (a, b) } else { (b, a) };
        self.parent[drop as usize] = keep;
        oa.max(ob)
    }
}

const OFFSETS_8: [(isize, isize); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];
const OFFSETS_4: [(isize, isize); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];

impl PersistenceEngine for UnionFindEngine {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn prime(&self) -> u32 {
        self.prime
    }

    fn diagram(&self, complex: &CubicalComplex) -> PersistenceDiagram {
        let (nx, ny) = complex.shape();
        let n = nx * ny;
        let value = |p: usize| complex.pixel_value(p / ny, p % ny);
        let mut sorted: Vec<u32> = (0..n as u32).collect();
        sorted.sort_unstable_by(|&a, &b| {
            value(a as usize)
                .total_cmp(&value(b as usize))
                .then(a.cmp(&b))
        });
        let neighbor = |p: usize, (di, dj): (isize, isize)| -> Option<usize> {
            let i = (p / ny) as isize + di;
            let j = (p % ny) as isize + dj;
            (i >= 0 && j >= 0 && (i as usize) < nx && (j as usize) < ny)
                .then(|| i as usize * ny + j as usize)
        };

        let mut points = Vec::new();

        // Sublevel components, ascending.
        let mut uf = Components::new(n);
        let mut rank = vec![u32::MAX; n];
        for (r, &p) in sorted.iter().enumerate() {
            let p = p as usize;
            rank[p] = r as u32;
            uf.oldest[p] = r as u32;
            let v = value(p);
            for off in OFFSETS_8 {
                let Some(q) = neighbor(p, off) else { continue };
                if rank[q] == u32::MAX {
                    continue;
                }
                let (a, b) = (uf.find(p as u32), uf.find(q as u32));
                if a != b {
                    let dying = uf.merge(a, b);
                    points.push(PersistencePoint {
                        dim: 0,
                        birth: value(sorted[dying as usize] as usize),
                        death: v,
                        death_cell: None,
                    });
                }
            }
        }
        if let Some(&first) = sorted.first() {
            points.push(PersistencePoint {
                dim: 0,
                birth: value(first as usize),
                death: f64::INFINITY,
                death_cell: None,
            });
        }

        // Complement components, descending; node `n` is the outside.
        let mut uf = Components::new(n + 1);
        uf.oldest[n] = 0;
        let mut added = vec![false; n];
        for (r, &p) in sorted.iter().rev().enumerate() {
            let p = p as usize;
            added[p] = true;
            uf.oldest[p] = r as u32 + 1;
            let v = value(p);
            let i = p / ny;
            let j = p % ny;
            let on_border = i == 0 || j == 0 || i + 1 == nx || j + 1 == ny;
            let outside = on_border.then_some(n);
            let adjacent = OFFSETS_4
                .iter()
                .filter_map(|&off| neighbor(p, off).filter(|&q| added[q]))
                .chain(outside);
            for q in adjacent {
                let (a, b) = (uf.find(p as u32), uf.find(q as u32));
                if a != b {
                    let dying = uf.merge(a, b);
                    let cell = sorted[n - dying as usize] as usize;
                    points.push(PersistencePoint {
                        dim: 1,
                        birth: v,
                        death: value(cell),
                        death_cell: Some([cell / ny, cell % ny]),
                    });
                }
            }
        }
        PersistenceDiagram::new(points, self.prime)
    }
}
