use proptest::prelude::*;
use rdad::neighbors::{density_profile, NeighborIndex, PointCloud};

fn cloud_strategy(max: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    // Half-integer lattice points produce many exact distance ties.
    let coord = prop_oneof![(-8i32..8).prop_map(|v| f64::from(v) * 0.5), -4.0..4.0f64];
    prop::collection::vec((coord.clone(), coord), 2..max)
}

fn build(points: &[(f64, f64)]) -> PointCloud {
    PointCloud::new(2, points.iter().flat_map(|&(x, y)| [x, y]).collect()).unwrap()
}

fn brute_knn(points: &[(f64, f64)], q: (f64, f64), k: usize) -> Vec<(f64, usize)> {
    let mut all: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| ((q.0 - x) * (q.0 - x) + (q.1 - y) * (q.1 - y), i))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    all.truncate(k);
    all
}

proptest! {
    #[test]
    fn knn_matches_exhaustive_search(points in cloud_strategy(80), qx in -5.0..5.0f64, qy in -5.0..5.0f64, k in 1usize..12) {
        let k = k.min(points.len());
        let index = NeighborIndex::new(build(&points));
        let got: Vec<(f64, usize)> = index
            .knn(&[qx, qy], k)
            .unwrap()
            .iter()
            .map(|n| (n.distance, n.index))
            .collect();
        let want: Vec<(f64, usize)> = brute_knn(&points, (qx, qy), k)
            .into_iter()
            .map(|(sq, i)| (sq.sqrt(), i))
            .collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn density_distances_follow_permutations(points in cloud_strategy(60), shift in 0usize..1000) {
        // Drop exact duplicates so every profile is defined.
        let mut pts = points;
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        pts.dedup();
        prop_assume!(pts.len() >= 3);
        let n = pts.len();
        let k = 2 + shift % (n - 1).min(6);
        let perm: Vec<usize> = (0..n).map(|i| (i * 7 + shift) % n).collect();
        prop_assume!({ let mut p = perm.clone(); p.sort(); p.dedup(); p.len() == n });
        let permuted: Vec<(f64, f64)> = perm.iter().map(|&i| pts[i]).collect();
        let a = density_profile(&NeighborIndex::new(build(&pts)), k).unwrap();
        let b = density_profile(&NeighborIndex::new(build(&permuted)), k).unwrap();
        for (j, &i) in perm.iter().enumerate() {
            prop_assert_eq!(b.distances()[j], a.distances()[i]);
        }
    }

    #[test]
    fn density_distances_under_similarity(
        points in prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 4..60),
        angle in 0.0..std::f64::consts::TAU,
        scale in 0.1..10.0f64,
        tx in -100.0..100.0f64,
        ty in -100.0..100.0f64,
    ) {
        let (s, c) = angle.sin_cos();
        let moved: Vec<(f64, f64)> = points
            .iter()
            .map(|&(x, y)| (scale * (c * x - s * y) + tx, scale * (s * x + c * y) + ty))
            .collect();
        let k = 3;
        let a = density_profile(&NeighborIndex::new(build(&points)), k).unwrap();
        let b = density_profile(&NeighborIndex::new(build(&moved)), k).unwrap();
        for (da, db) in a.distances().iter().zip(b.distances()) {
            // Rounding in the transform is of order |t| * eps.
            prop_assert!((db - scale * da).abs() <= 1e-9 * (1.0 + scale * da + tx.abs() + ty.abs()));
        }
        prop_assert_eq!(a.c_norm(), b.c_norm());
    }
}

#[test]
fn density_distance_is_kth_neighbor_counting_self() {
    let points = [(0.0, 0.0), (1.0, 0.0), (3.0, 0.0), (3.0, 4.0)];
    let cloud = build(&points);
    let index = NeighborIndex::new(cloud);
    let p = density_profile(&index, 2).unwrap();
    assert_eq!(p.distances(), &[1.0, 1.0, 2.0, 4.0]);
    let p = density_profile(&index, 4).unwrap();
    assert_eq!(p.distances(), &[5.0, 2.0f64.hypot(4.0), 4.0, 5.0]);
}
