use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rdad::cubical::{
    betti_at, build_complex, persistence, EngineRegistry, PersistenceDiagram, PersistenceEngine,
    ReductionEngine, UnionFindEngine,
};
use rdad::filtration::{GridSpec, ScalarField};

const INF: f64 = f64::INFINITY;

fn ring() -> ScalarField {
    ScalarField::from_rows(&[[1.0, 1.0, 1.0], [1.0, 5.0, 1.0], [1.0, 1.0, 1.0]]).unwrap()
}

fn random_field(rng: &mut ChaCha8Rng, nx: usize, ny: usize, max: u32) -> ScalarField {
    let grid = GridSpec::new(vec![0.0, 0.0], 1.0, vec![nx, ny]).unwrap();
    let values = (0..nx * ny)
        .map(|_| f64::from(rng.random_range(0..=max)))
        .collect();
    ScalarField::new(grid, values).unwrap()
}

fn engines() -> Vec<Box<dyn PersistenceEngine>> {
    let reg = EngineRegistry::default();
    vec![
        reg.build("reduction", 11).unwrap(),
        reg.build("reduction", 2).unwrap(),
        reg.build("union-find", 11).unwrap(),
    ]
}

fn without_cells(d: &PersistenceDiagram) -> Vec<(usize, f64, f64)> {
    d.points()
        .iter()
        .map(|p| (p.dim, p.birth, p.death))
        .collect()
}

#[test]
fn ring_has_one_loop_filled_by_center() {
    let c = build_complex(&ring()).unwrap();
    for engine in engines() {
        let d = engine.diagram(&c);
        assert_eq!(d.pairs(0), vec![(1.0, INF)], "{}", engine.name());
        assert_eq!(d.pairs(1), vec![(1.0, 5.0)], "{}", engine.name());
        let p = d.in_dim(1).next().unwrap();
        assert_eq!(p.death_cell, Some([1, 1]));
    }
    assert_eq!(betti_at(&ring(), 1.0), (1, 1));
    assert_eq!(betti_at(&ring(), 5.0), (1, 0));
    assert_eq!(betti_at(&ring(), 0.5), (0, 0));
}

#[test]
fn constant_field_is_contractible() {
    let f = ScalarField::from_rows(&[[2.0; 4]; 3]).unwrap();
    let c = build_complex(&f).unwrap();
    for engine in engines() {
        let d = engine.diagram(&c);
        assert_eq!(without_cells(&d), vec![(0, 2.0, INF)]);
    }
}

#[test]
fn two_basins_follow_elder_rule() {
    let f = ScalarField::from_rows(&[[1.0, 3.0, 2.0]]).unwrap();
    let c = build_complex(&f).unwrap();
    for engine in engines() {
        let d = engine.diagram(&c);
        assert_eq!(d.pairs(0), vec![(1.0, INF), (2.0, 3.0)]);
        assert!(d.pairs(1).is_empty());
    }
}

#[test]
fn corner_contact_connects_but_encloses_nothing() {
    let f = ScalarField::from_rows(&[[1.0, 5.0], [5.0, 1.0]]).unwrap();
    let d = persistence(&build_complex(&f).unwrap(), 11).unwrap();
    assert_eq!(without_cells(&d), vec![(0, 1.0, INF)]);
    assert_eq!(betti_at(&f, 1.0), (1, 0));
}

#[test]
fn diagrams_agree_with_brute_force_betti_numbers() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xbe77);
    for _ in 0..150 {
        let nx = rng.random_range(1..=7);
        let ny = rng.random_range(1..=7);
        let f = random_field(&mut rng, nx, ny, 9);
        let c = build_complex(&f).unwrap();
        for engine in engines() {
            let d = engine.diagram(&c);
            for t in -1..=10 {
                let t = f64::from(t);
                let (b0, b1) = betti_at(&f, t);
                assert_eq!(d.betti(0, t), b0, "{} dim 0 at {t}", engine.name());
                assert_eq!(d.betti(1, t), b1, "{} dim 1 at {t}", engine.name());
            }
        }
    }
}

#[test]
fn engines_agree_including_death_cells_on_distinct_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..100 {
        let nx = rng.random_range(1..=12);
        let ny = rng.random_range(1..=12);
        let grid = GridSpec::new(vec![0.0, 0.0], 1.0, vec![nx, ny]).unwrap();
        let values = (0..nx * ny).map(|_| rng.random::<f64>()).collect();
        let c = build_complex(&ScalarField::new(grid, values).unwrap()).unwrap();
        let a = ReductionEngine::new(11).unwrap().diagram(&c);
        let b = UnionFindEngine::new(11).unwrap().diagram(&c);
        assert_eq!(a, b);
    }
}

#[test]
fn engines_agree_on_tied_values_up_to_death_cells() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..200 {
        let f = random_field(&mut rng, 8, 9, 4);
        let c = build_complex(&f).unwrap();
        let a = ReductionEngine::new(2).unwrap().diagram(&c);
        let b = UnionFindEngine::new(2).unwrap().diagram(&c);
        assert_eq!(without_cells(&a), without_cells(&b));
    }
}

#[test]
fn characteristic_two_and_eleven_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..100 {
        let f = random_field(&mut rng, 6, 6, 9);
        let c = build_complex(&f).unwrap();
        let two = persistence(&c, 2).unwrap();
        let eleven = persistence(&c, 11).unwrap();
        assert_eq!(without_cells(&two), without_cells(&eleven));
        assert_eq!(two.field_char(), 2);
    }
}

#[test]
fn strictly_increasing_relabeling_is_equivariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let phi = |v: f64| v * v * v + 2.0 * v + 1.0;
    for _ in 0..50 {
        let f = random_field(&mut rng, 7, 5, 9);
        let g = f.map_values(phi).unwrap();
        for engine in engines() {
            let df = engine.diagram(&build_complex(&f).unwrap());
            let dg = engine.diagram(&build_complex(&g).unwrap());
            assert_eq!(df.len(), dg.len());
            for (p, q) in df.points().iter().zip(dg.points()) {
                assert_eq!(phi(p.birth), q.birth);
                assert_eq!(if p.is_essential() { INF } else { phi(p.death) }, q.death);
                assert_eq!(p.death_cell, q.death_cell);
            }
        }
    }
}

#[test]
fn every_loop_has_a_finite_death_and_a_cell() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let f = random_field(&mut rng, 9, 9, 20);
        for engine in engines() {
            let d = engine.diagram(&build_complex(&f).unwrap());
            assert_eq!(d.in_dim(0).filter(|p| p.is_essential()).count(), 1);
            for p in d.in_dim(1) {
                assert!(p.death.is_finite() && p.death_cell.is_some());
                let [i, j] = p.death_cell.unwrap();
                assert_eq!(f.values()[i * 9 + j], p.death);
            }
        }
    }
}
