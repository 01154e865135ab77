use crate::filtration::ScalarField;

/// Betti numbers `(b0, b1)` of the sublevel complex `{cells <= t}` of a
/// 2-D field, by brute force: each cell's value is recomputed from its
/// incident pixels, `b0` comes from union-find on vertices and edges, and
/// `b1 = b0 - (V - E + F)`.
///
/// Testing oracle; written for plainness, not speed.
pub fn betti_at(field: &ScalarField, t: f64) -> (usize, usize) {
    let grid = field.grid();
    assert_eq!(grid.dim(), 2, "betti_at needs a 2-D field");
    let (nx, ny) = (grid.counts[0], grid.counts[1]);
    let (w, h) = (2 * nx + 1, 2 * ny + 1);
    let px = field.values();

    let cell_value = |a: usize, b: usize| -> f64 {
        let is = if a % 2 == 1 {
            vec![(a - 1) / 2]
        } else {
            [a / 2, a / 2 + 1]
                .into_iter()
                .filter(|&i| i >= 1 && i <= nx)
                .map(|i| i - 1)
                .collect()
        };
        let js = if b % 2 == 1 {
            vec![(b - 1) / 2]
        } else {
            [b / 2, b / 2 + 1]
                .into_iter()
                .filter(|&j| j >= 1 && j <= ny)
                .map(|j| j - 1)
                .collect()
        };
        let mut m = f64::INFINITY;
        for &i in &is {
            for &j in &js {
                m = m.min(px[i * ny + j]);
            }
        }
        m
    };

    let mut present = vec![false; w * h];
    let (mut v, mut e, mut f) = (0i64, 0i64, 0i64);
    for a in 0..w {
        for b in 0..h {
            if cell_value(a, b) <= t {
                present[a * h + b] = true;
                match (a % 2, b % 2) {
                    (0, 0) => v += 1,
                    (1, 1) => f += 1,
                    _ => e += 1,
                }
            }
        }
    }

    let mut parent: Vec<usize> = (0..w * h).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            x = parent[x];
        }
        x
    }
    for a in 0..w {
        for b in 0..h {
            if !present[a * h + b] || (a % 2) + (b % 2) != 1 {
                continue;
            }
            let (u, z) = if a % 2 == 1 {
                ((a - 1) * h + b, (a + 1) * h + b)
            } else {
                (a * h + b - 1, a * h + b + 1)
            };
            let (ru, rz) = (root(&mut parent, u), root(&mut parent, z));
            if ru != rz {
                parent[ru] = rz;
            }
        }
    }
    let mut b0 = 0i64;
    for a in (0..w).step_by(2) {
        for b in (0..h).step_by(2) {
            let c = a * h + b;
            if present[c] && root(&mut parent, c) == c {
                b0 += 1;
            }
        }
    }
    let b1 = b0 - (v - e + f);
    assert!(b1 >= 0, "negative first Betti number");
    (b0 as usize, b1 as usize)
}
