use std::sync::Arc;

use rdad::diagrams::significant_points;
use rdad::filtration::{make_grid, FiltrationSpec};
use rdad::inference::{
    oracle_bootstrap, run_bootstrap, subsample_bootstrap, BootstrapConfig, BootstrapMode,
    BootstrapResult, FixedSource, Pipeline,
};
use rdad::neighbors::PointCloud;
use rdad::synthgen::{Generator, TwoSquareParams};

fn small_setup(seed: u64) -> (PointCloud, Pipeline) {
    let cloud = TwoSquareParams::david_goliath()
        .generate_seeded(seed)
        .unwrap();
    let grid = make_grid(&cloud, 0.05, 0.05).unwrap();
    (cloud, Pipeline::new(FiltrationSpec::new("rdad"), grid))
}

fn config(b: usize, seed: u64) -> BootstrapConfig {
    BootstrapConfig {
        replicates: b,
        ..BootstrapConfig::new(seed)
    }
}

#[test]
fn identical_replicate_gives_zero_radius() {
    let (cloud, pipeline) = small_setup(1);
    let empirical = pipeline.diagram(&cloud, true).unwrap();
    let source = FixedSource::new(cloud, BootstrapMode::Subsample);
    let r = run_bootstrap(&empirical, &source, &pipeline, &config(1, 3)).unwrap();
    assert_eq!(r.radius, 0.0);
    assert_eq!(r.distances, vec![0.0]);
    let sig = significant_points(&empirical, 1, r.radius);
    assert_eq!(sig.len(), empirical.in_dim(1).count());
}

#[test]
fn same_seed_same_result() {
    let (cloud, pipeline) = small_setup(2);
    let a = subsample_bootstrap(&cloud, &pipeline, &config(12, 99)).unwrap();
    let b = subsample_bootstrap(&cloud, &pipeline, &config(12, 99)).unwrap();
    assert_eq!(a, b);
    assert!(a.distances.iter().all(|&d| d >= 0.0 && d.is_finite()));
    let c = subsample_bootstrap(&cloud, &pipeline, &config(12, 100)).unwrap();
    assert_ne!(a.distances, c.distances);
}

#[test]
fn thread_count_does_not_matter() {
    let (cloud, pipeline) = small_setup(3);
    let run = |threads: usize| -> BootstrapResult {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| subsample_bootstrap(&cloud, &pipeline, &config(8, 5)).unwrap())
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn prefix_of_replicates_is_stable() {
    let (cloud, pipeline) = small_setup(4);
    let short = subsample_bootstrap(&cloud, &pipeline, &config(5, 8)).unwrap();
    let long = subsample_bootstrap(&cloud, &pipeline, &config(10, 8)).unwrap();
    assert_eq!(short.distances[..], long.distances[..5]);
}

#[test]
fn oracle_mode_is_echoed() {
    let (cloud, pipeline) = small_setup(5);
    let cfg = BootstrapConfig {
        mode: BootstrapMode::Oracle,
        ..config(4, 1)
    };
    let generator: Arc<dyn Generator> = Arc::new(TwoSquareParams::david_goliath());
    let r = oracle_bootstrap(&cloud, generator, &pipeline, &cfg).unwrap();
    assert_eq!(r.mode, BootstrapMode::Oracle);
    assert_eq!(r.distances.len(), 4);
    assert!(r.radius > 0.0);
    let json = serde_json::to_value(&r).unwrap();
    assert_eq!(json["mode"], "oracle");
    assert_eq!(json["B"], 4);
    assert!(json["reseeded_replicates"].is_u64());
}

#[test]
fn fixed_generator_gives_zero_radius() {
    let (cloud, pipeline) = small_setup(6);
    let empirical = pipeline.diagram(&cloud, true).unwrap();
    let source = FixedSource::new(cloud, BootstrapMode::Oracle);
    let r = run_bootstrap(&empirical, &source, &pipeline, &config(1, 0)).unwrap();
    assert_eq!((r.radius, r.mode), (0.0, BootstrapMode::Oracle));
}

#[test]
fn duplicate_heavy_cloud_exhausts_redraws() {
    // Every resample of two points repeated many times has a zero
    // k_den-th neighbor distance.
    let pts: Vec<[f64; 2]> = (0..40).map(|i| [f64::from(i % 2), 0.5]).collect();
    let cloud = PointCloud::from_points(&pts).unwrap();
    let grid = rdad::filtration::GridSpec::new(vec![-1.0, -1.0], 0.5, vec![6, 5]).unwrap();
    let pipeline = Pipeline::new(FiltrationSpec::new("dad").with_k_den(3), grid);
    let source = FixedSource::new(cloud.clone(), BootstrapMode::Subsample);
    let empirical = rdad::cubical::PersistenceDiagram::new(Vec::new(), 11);
    let err = run_bootstrap(&empirical, &source, &pipeline, &config(2, 0)).unwrap_err();
    assert!(matches!(
        err,
        rdad::Error::ReplicateRetriesExhausted { attempts: 9, .. }
    ));
}

#[test]
fn replicates_share_the_grid() {
    let (cloud, pipeline) = small_setup(7);
    let other = make_grid(&cloud, 0.07, 0.0).unwrap();
    let field = rdad::filtration::build_field(&cloud, &FiltrationSpec::new("dad"), &other).unwrap();
    assert!(pipeline.diagram_of(&field).is_err());
}
