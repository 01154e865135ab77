//! Bottleneck distance between persistence diagrams and the
//! significance rule for confidence radii.

mod bottleneck;
mod brute;

pub use bottleneck::{bottleneck, bottleneck_matching, Matched, Matching};
pub use brute::{brute_force_bottleneck, BRUTE_FORCE_CAP};

use std::io::Write;

use crate::cubical::{PersistenceDiagram, PersistencePoint};
use crate::error::Result;
use crate::filtration::GridSpec;

/// Points of dimension `dim` lying strictly above the line
/// `death = birth + 2r`. Essential classes always qualify.
pub fn significant_points(
    diagram: &PersistenceDiagram,
    dim: usize,
    radius: f64,
) -> Vec<PersistencePoint> {
    assert!(radius >= 0.0, "radius must be non-negative");
    diagram
        .in_dim(dim)
        .filter(|p| p.is_essential() || p.death - p.birth > 2.0 * radius)
        .copied()
        .collect()
}

/// Writes `dim,birth,death,persistence,death_x,death_y` rows, locating
/// death pixels in data coordinates.
pub fn write_significant_csv<W: Write>(
    points: &[PersistencePoint],
    grid: &GridSpec,
    w: W,
) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["dim", "birth", "death", "persistence", "death_x", "death_y"])?;
    for p in points {
        let (x, y) = match p.death_cell {
            Some([i, j]) => {
                let c = grid.center(&[i, j]);
                (c[0].to_string(), c[1].to_string())
            }
            None => (String::new(), String::new()),
        };
        let fmt = crate::cubical::fmt_value;
        out.write_record([
            p.dim.to_string(),
            fmt(p.birth),
            fmt(p.death),
            fmt(p.persistence()),
            x,
            y,
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diagram(pairs: &[(f64, f64)]) -> PersistenceDiagram {
        PersistenceDiagram::new(
            pairs
                .iter()
                .map(|&(birth, death)| PersistencePoint {
                    dim: 1,
                    birth,
                    death,
                    death_cell: Some([0, 0]),
                })
                .collect(),
            11,
        )
    }

    #[test]
    fn significance_rule_is_strict() {
        let d = diagram(&[(1.0, 5.0)]);
        assert_eq!(significant_points(&d, 1, 0.3).len(), 1);
        assert!(significant_points(&d, 1, 2.0).is_empty());
        assert!(significant_points(&d, 0, 0.0).is_empty());
    }

    #[test]
    fn zero_radius_keeps_everything() {
        let d = diagram(&[(1.0, 5.0), (2.0, 2.1), (0.0, 1e-9)]);
        assert_eq!(significant_points(&d, 1, 0.0).len(), 3);
    }

    #[test]
    fn significant_csv_layout() {
        let grid = GridSpec::new(vec![0.0, 0.0], 1.0, vec![2, 2]).unwrap();
        let d = diagram(&[(1.0, 5.0)]);
        let mut buf = Vec::new();
        write_significant_csv(&significant_points(&d, 1, 0.5), &grid, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "dim,birth,death,persistence,death_x,death_y\n1,1,5,4,0.5,0.5\n"
        );
    }
}
