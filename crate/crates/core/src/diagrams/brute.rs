use super::bottleneck::{diagonal_cost, sup_norm};
use crate::cubical::PersistenceDiagram;
use crate::error::{Error, Result};

/// Largest total point count the exhaustive search accepts.
pub const BRUTE_FORCE_CAP: usize = 8;

/// Bottleneck distance by enumerating every partial matching, with
/// unmatched points sent to the diagonal. Testing oracle.
pub fn brute_force_bottleneck(
    p: &PersistenceDiagram,
    q: &PersistenceDiagram,
    dim: usize,
) -> Result<f64> {
    let left = p.pairs(dim);
    let right = q.pairs(dim);
    let total = left.len() + right.len();
    if total > BRUTE_FORCE_CAP {
        return Err(Error::SizeCapExceeded {
            cap: BRUTE_FORCE_CAP,
            got: total,
        });
    }
    let mut used = vec![false; right.len()];
    Ok(search(&left, &right, 0, &mut used, 0.0))
}

/// Pair cost with `inf - inf = 0` and `inf - x = inf`.
fn pair_cost(a: (f64, f64), b: (f64, f64)) -> f64 {
    match (a.1.is_finite(), b.1.is_finite()) {
        (true, true) => sup_norm(a, b),
        (false, false) => (a.0 - b.0).abs(),
        _ => f64::INFINITY,
    }
}

fn search(
    left: &[(f64, f64)],
    right: &[(f64, f64)],
    i: usize,
    used: &mut [bool],
    so_far: f64,
) -> f64 {
    if i == left.len() {
        return right
            .iter()
            .zip(used.iter())
            .filter(|(_, &u)| !u)
            .map(|(&b, _)| diagonal_cost(b))
            .fold(so_far, f64::max);
    }
    let mut best = search(left, right, i + 1, used, so_far.max(diagonal_cost(left[i])));
    for j in 0..right.len() {
        if !used[j] {
            used[j] = true;
            let c = so_far.max(pair_cost(left[i], right[j]));
            best = best.min(search(left, right, i + 1, used, c));
            used[j] = false;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubical::PersistencePoint;

    fn diagram(pairs: &[(f64, f64)]) -> PersistenceDiagram {
        PersistenceDiagram::new(
            pairs
                .iter()
                .map(|&(birth, death)| PersistencePoint {
                    dim: 0,
                    birth,
                    death,
                    death_cell: None,
                })
                .collect(),
            2,
        )
    }

    #[test]
    fn hand_examples() {
        let d = |v: &[(f64, f64)]| diagram(v);
        assert_eq!(
            brute_force_bottleneck(&d(&[(0.0, 1.0)]), &d(&[(0.0, 1.0)]), 0).unwrap(),
            0.0
        );
        assert_eq!(
            brute_force_bottleneck(&d(&[(0.0, 2.0)]), &d(&[(0.0, 3.0)]), 0).unwrap(),
            1.0
        );
        assert_eq!(
            brute_force_bottleneck(&d(&[(1.0, 5.0)]), &d(&[(1.0, 5.0), (2.0, 2.5)]), 0).unwrap(),
            0.25
        );
        assert_eq!(
            brute_force_bottleneck(&d(&[(0.0, f64::INFINITY)]), &d(&[]), 0).unwrap(),
            f64::INFINITY
        );
    }

    #[test]
    fn cap() {
        let big = diagram(&[(0.0, 1.0); 5]);
        assert!(matches!(
            brute_force_bottleneck(&big, &big, 0),
            Err(Error::SizeCapExceeded { cap: 8, got: 10 })
        ));
    }
}
