//! Points CSV (`x,y[,label]`) and bounding-box ingestion of tabular
//! coordinate files.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::neighbors::{Label, PointCloud};

/// Reads a 2-D points CSV. Columns are found by header name; a `label`
/// column is optional and, when present, must be filled on every row.
pub fn read_points<R: Read>(r: R) -> Result<PointCloud> {
    let mut rdr = csv::Reader::from_reader(r);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let (xi, yi) = match (col("x"), col("y")) {
        (Some(x), Some(y)) => (x, y),
        _ => return Err(Error::Format("points CSV needs `x` and `y` columns".into())),
    };
    let li = col("label");
    let mut coords = Vec::new();
    let mut labels = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        for i in [xi, yi] {
            coords.push(parse_coord(rec.get(i).unwrap_or(""), row)?);
        }
        if let Some(li) = li {
            labels.push(rec.get(li).unwrap_or("").parse::<Label>()?);
        }
    }
    let cloud = PointCloud::new(2, coords)?;
    if li.is_some() {
        cloud.with_labels(labels)
    } else {
        Ok(cloud)
    }
}

/// Writes `x,y` rows, plus `label` when the cloud carries labels.
/// Values are written in shortest round-trip form.
pub fn write_points<W: Write>(cloud: &PointCloud, w: W) -> Result<()> {
    if cloud.dim() != 2 {
        return Err(Error::InvalidParameter(format!(
            "points CSV holds 2-D points, cloud has dimension {}",
            cloud.dim()
        )));
    }
    let mut out = csv::Writer::from_writer(w);
    let labelled = cloud.labels().is_some();
    if labelled {
        out.write_record(["x", "y", "label"])?;
    } else {
        out.write_record(["x", "y"])?;
    }
    for (i, p) in cloud.points().enumerate() {
        let (x, y) = (p[0].to_string(), p[1].to_string());
        match cloud.label(i) {
            Some(l) => out.write_record([x.as_str(), y.as_str(), l.as_str()])?,
            None => out.write_record([x.as_str(), y.as_str()])?,
        }
    }
    out.flush()?;
    Ok(())
}

/// Which columns hold the coordinates and which closed box to keep.
#[derive(Clone, Debug, PartialEq)]
pub struct CropSpec {
    pub x_column: String,
    pub y_column: String,
    pub lower: [f64; 2],
    pub upper: [f64; 2],
}

impl CropSpec {
    pub fn new(lower: [f64; 2], upper: [f64; 2]) -> Result<Self> {
        if !(lower[0] <= upper[0] && lower[1] <= upper[1]) {
            return Err(Error::InvalidParameter(format!(
                "empty bounding box {lower:?}..{upper:?}"
            )));
        }
        Ok(Self {
            x_column: "x".into(),
            y_column: "y".into(),
            lower,
            upper,
        })
    }

    pub fn with_columns(mut self, x: impl Into<String>, y: impl Into<String>) -> Self {
        self.x_column = x.into();
        self.y_column = y.into();
        self
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        (0..2).all(|a| self.lower[a] <= p[a] && p[a] <= self.upper[a])
    }
}

/// Row counts from a crop.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CropReport {
    pub read: usize,
    pub kept: usize,
}

/// Streams a CSV with arbitrary columns into a points CSV holding only
/// the rows inside the box, renamed to `x,y`. Input order is kept. An
/// empty result still produces the header line.
pub fn crop_points<R: Read, W: Write>(r: R, w: W, spec: &CropSpec) -> Result<CropReport> {
    let mut rdr = csv::Reader::from_reader(r);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| {
                Error::Format(format!(
                    "missing column `{name}`; found: {}",
                    headers.iter().collect::<Vec<_>>().join(", ")
                ))
            })
    };
    let (xi, yi) = (find(&spec.x_column)?, find(&spec.y_column)?);
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["x", "y"])?;
    let mut report = CropReport { read: 0, kept: 0 };
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        report.read += 1;
        let p = [
            parse_coord(rec.get(xi).unwrap_or(""), row)?,
            parse_coord(rec.get(yi).unwrap_or(""), row)?,
        ];
        if spec.contains(p) {
            out.write_record([p[0].to_string(), p[1].to_string()])?;
            report.kept += 1;
        }
    }
    out.flush()?;
    Ok(report)
}

fn parse_coord(s: &str, row: usize) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Format(format!("row {}: bad coordinate `{s}`", row + 1)))?;
    if !v.is_finite() {
        return Err(Error::Format(format!(
            "row {}: non-finite coordinate",
            row + 1
        )));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_round_trip_bitwise() {
        let coords = vec![0.1, 1.0 / 3.0, -2.5e-17, 7.0];
        let cloud = PointCloud::new(2, coords.clone())
            .unwrap()
            .with_labels(vec![Label::Signal, Label::Outlier])
            .unwrap();
        let mut buf = Vec::new();
        write_points(&cloud, &mut buf).unwrap();
        assert!(buf.starts_with(b"x,y,label\n"));
        let back = read_points(buf.as_slice()).unwrap();
        assert_eq!(back, cloud);
    }

    #[test]
    fn unlabelled_points() {
        let back = read_points("y,x\n2,1\n4,3\n".as_bytes()).unwrap();
        assert_eq!(back.coords(), &[1.0, 2.0, 3.0, 4.0]);
        assert!(back.labels().is_none());
    }

    #[test]
    fn malformed_points() {
        assert!(matches!(
            read_points("a,b\n1,2\n".as_bytes()),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            read_points("x,y\n1,zz\n".as_bytes()),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            read_points("x,y\n1,NaN\n".as_bytes()),
            Err(Error::Format(_))
        ));
    }

    const TOWERS: &str = "id,longitude,latitude\n\
                          1,-100,40\n\
                          2,-150,60\n\
                          3,-70,25\n\
                          4,-126,50\n";

    #[test]
    fn crop_keeps_closed_box_in_order() {
        let spec = CropSpec::new([-126.0, 23.9], [-65.8, 50.0])
            .unwrap()
            .with_columns("longitude", "latitude");
        let mut out = Vec::new();
        let rep = crop_points(TOWERS.as_bytes(), &mut out, &spec).unwrap();
        assert_eq!(rep, CropReport { read: 4, kept: 3 });
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "x,y\n-100,40\n-70,25\n-126,50\n"
        );
    }

    #[test]
    fn crop_to_nothing_writes_header() {
        let spec = CropSpec::new([0.0, 0.0], [1.0, 1.0])
            .unwrap()
            .with_columns("longitude", "latitude");
        let mut out = Vec::new();
        let rep = crop_points(TOWERS.as_bytes(), &mut out, &spec).unwrap();
        assert_eq!(rep.kept, 0);
        assert_eq!(out, b"x,y\n");
    }

    #[test]
    fn crop_missing_column() {
        let spec = CropSpec::new([0.0, 0.0], [1.0, 1.0]).unwrap();
        let err = crop_points(TOWERS.as_bytes(), Vec::new(), &spec).unwrap_err();
        assert!(err.to_string().contains("missing column `x`"), "{err}");
        assert!(CropSpec::new([1.0, 0.0], [0.0, 1.0]).is_err());
    }
}
