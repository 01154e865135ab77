use proptest::prelude::*;
use rdad::filtration::{
    build_field_with, distance_to_set, eval_dad, eval_dtm, eval_rdad, make_grid,
    FiltrationRegistry, FiltrationSpec,
};
use rdad::neighbors::{density_profile, DensityProfile, NeighborIndex, PointCloud};

fn distinct_cloud() -> impl Strategy<Value = PointCloud> {
    prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 4..50).prop_filter_map(
        "distinct points",
        |mut pts| {
            pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
            pts.dedup();
            (pts.len() >= 4).then(|| {
                PointCloud::new(2, pts.iter().flat_map(|&(x, y)| [x, y]).collect()).unwrap()
            })
        },
    )
}

fn setup(cloud: PointCloud, k_den: usize) -> (NeighborIndex, DensityProfile) {
    let index = NeighborIndex::new(cloud);
    let k = k_den.clamp(2, index.len());
    let profile = density_profile(&index, k).unwrap();
    (index, profile)
}

proptest! {
    #[test]
    fn rdad_and_dtm_grow_with_k_dtm(cloud in distinct_cloud(), k_den in 2usize..6, x in -3.0..3.0f64, y in -3.0..3.0f64) {
        let (index, profile) = setup(cloud, k_den);
        let q = [x, y];
        let mut last = (0.0, 0.0);
        for k in 1..=index.len() {
            let r = eval_rdad(&index, &profile, &q, k).unwrap();
            let d = eval_dtm(&index, &q, k).unwrap();
            // Means of sorted prefixes are nondecreasing up to rounding.
            prop_assert!(r >= last.0 * (1.0 - 1e-12), "rdad k={k}: {r} < {}", last.0);
            prop_assert!(d >= last.1 * (1.0 - 1e-12), "dtm k={k}: {d} < {}", last.1);
            last = (r, d);
        }
    }

    #[test]
    fn rdad_is_lipschitz(
        cloud in distinct_cloud(),
        k_den in 2usize..6,
        k_dtm in 1usize..5,
        a in (-3.0..3.0f64, -3.0..3.0f64),
        b in (-3.0..3.0f64, -3.0..3.0f64),
    ) {
        let (index, profile) = setup(cloud, k_den);
        let k = k_dtm.min(index.len());
        let fa = eval_rdad(&index, &profile, &[a.0, a.1], k).unwrap();
        let fb = eval_rdad(&index, &profile, &[b.0, b.1], k).unwrap();
        let max_inv = profile.distances().iter().map(|d| 1.0 / d).fold(0.0, f64::max);
        let bound = profile.c_norm() * max_inv * (a.0 - b.0).hypot(a.1 - b.1);
        prop_assert!((fa - fb).abs() <= bound * (1.0 + 1e-9) + 1e-12, "{} > {bound}", (fa - fb).abs());
    }

    #[test]
    fn all_filtrations_are_nonnegative_and_reduce_at_rank_one(cloud in distinct_cloud(), x in -3.0..3.0f64, y in -3.0..3.0f64) {
        let (index, profile) = setup(cloud, 3);
        let q = [x, y];
        let k = 2.min(index.len());
        for v in [
            distance_to_set(&index, &q).unwrap(),
            eval_dtm(&index, &q, k).unwrap(),
            eval_dad(&index, &profile, &q).unwrap(),
            eval_rdad(&index, &profile, &q, k).unwrap(),
        ] {
            prop_assert!(v >= 0.0 && v.is_finite());
        }
        prop_assert_eq!(eval_rdad(&index, &profile, &q, 1).unwrap(), eval_dad(&index, &profile, &q).unwrap());
        prop_assert_eq!(eval_dtm(&index, &q, 1).unwrap(), distance_to_set(&index, &q).unwrap());
    }

    #[test]
    fn parallel_and_serial_fields_agree_bitwise(cloud in distinct_cloud(), kind in prop::sample::select(vec!["distance", "dtm", "dad", "rdad"])) {
        let registry = FiltrationRegistry::default();
        let spec = FiltrationSpec::new(kind).with_k_dtm(2).with_k_den(3);
        let grid = make_grid(&cloud, 0.1, 0.05).unwrap();
        let par = build_field_with(&registry, &cloud, &spec, &grid, true).unwrap();
        let ser = build_field_with(&registry, &cloud, &spec, &grid, false).unwrap();
        prop_assert!(par.values().iter().zip(ser.values()).all(|(a, b)| a.to_bits() == b.to_bits()));
    }
}

#[test]
fn rdad_vanishes_only_on_data() {
    let cloud = PointCloud::new(2, vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0]).unwrap();
    let (index, profile) = setup(cloud, 2);
    assert_eq!(eval_dad(&index, &profile, &[1.0, 1.0]).unwrap(), 0.0);
    assert!(eval_dad(&index, &profile, &[0.5, 0.5]).unwrap() > 0.0);
    // Two coincident nearest points are needed for a zero at k = 2.
    assert!(eval_rdad(&index, &profile, &[1.0, 1.0], 2).unwrap() > 0.0);
}
