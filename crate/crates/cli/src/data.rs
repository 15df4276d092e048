//! Gridded sample files: delimited text with a header `r,phi,value` or
//! `x1,x2,value`, one row per lattice point of a tensor lattice.

use std::f64::consts::TAU;
use std::path::Path;

use divcurl::Point;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coordinates {
    Polar,
    Cartesian,
}

/// Bilinear interpolant of lattice samples; zero outside the lattice.
#[derive(Clone, Debug)]
pub struct GriddedField {
    coords: Coordinates,
    a: Vec<f64>,
    b: Vec<f64>,
    /// Row-major in `(a, b)`.
    values: Vec<f64>,
}

#[derive(Deserialize)]
struct PolarRow {
    r: f64,
    phi: f64,
    value: f64,
}

#[derive(Deserialize)]
struct CartesianRow {
    x1: f64,
    x2: f64,
    value: f64,
}

fn axis(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

impl GriddedField {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let bad = |msg: String| CliError::Config(format!("{}: {msg}", path.display()));
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| match e.into_kind() {
                csv::ErrorKind::Io(io) => CliError::io(path, io),
                other => bad(format!("{other:?}")),
            })?;
        let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
        let names: Vec<&str> = headers.iter().collect();
        let (coords, rows): (Coordinates, Vec<(f64, f64, f64)>) = match names.as_slice() {
            ["r", "phi", "value"] => {
                let rows = reader
                    .deserialize::<PolarRow>()
                    .map(|r| r.map(|r| (r.r, r.phi.rem_euclid(TAU), r.value)))
                    .collect::<Result<_, _>>()
                    .map_err(|e| bad(e.to_string()))?;
                (Coordinates::Polar, rows)
            }
            ["x1", "x2", "value"] => {
                let rows = reader
                    .deserialize::<CartesianRow>()
                    .map(|r| r.map(|r| (r.x1, r.x2, r.value)))
                    .collect::<Result<_, _>>()
                    .map_err(|e| bad(e.to_string()))?;
                (Coordinates::Cartesian, rows)
            }
            _ => {
                return Err(bad(format!(
                    "header must be `r,phi,value` or `x1,x2,value`, found `{}`",
                    names.join(",")
                )))
            }
        };
        Self::from_rows(coords, &rows).map_err(bad)
    }

    pub fn from_rows(coords: Coordinates, rows: &[(f64, f64, f64)]) -> Result<Self, String> {
        if rows.iter().any(|r| !(r.0.is_finite() && r.1.is_finite() && r.2.is_finite())) {
            return Err("non-finite entry".into());
        }
        let a = axis(rows.iter().map(|r| r.0).collect());
        let b = axis(rows.iter().map(|r| r.1).collect());
        if a.len() < 2 || b.len() < 2 {
            return Err("the lattice needs at least two values per coordinate".into());
        }
        if a.len() * b.len() != rows.len() {
            return Err(format!(
                "{} rows do not form a {} × {} tensor lattice",
                rows.len(),
                a.len(),
                b.len()
            ));
        }
        let mut values = vec![f64::NAN; rows.len()];
        for &(x, y, v) in rows {
            let i = a.binary_search_by(|p| p.total_cmp(&x)).unwrap();
            let j = b.binary_search_by(|p| p.total_cmp(&y)).unwrap();
            values[i * b.len() + j] = v;
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err("duplicate lattice points".into());
        }
        Ok(Self {
            coords,
            a,
            b,
            values,
        })
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.b.len() + j]
    }

    /// Interval index and fraction; `None` outside `[v[0], v[last]]`.
    fn bracket(v: &[f64], x: f64) -> Option<(usize, f64)> {
        if x < v[0] || x > v[v.len() - 1] {
            return None;
        }
        let i = v.partition_point(|&p| p <= x).clamp(1, v.len() - 1) - 1;
        Some((i, (x - v[i]) / (v[i + 1] - v[i])))
    }

    fn bilinear(&self, x: f64, y: f64) -> f64 {
        let Some((i, s)) = Self::bracket(&self.a, x) else {
            return 0.0;
        };
        let (j0, j1, t) = match self.coords {
            Coordinates::Cartesian => match Self::bracket(&self.b, y) {
                Some((j, t)) => (j, j + 1, t),
                None => return 0.0,
            },
            // periodic in φ
            Coordinates::Polar => {
                let n = self.b.len();
                let (first, last) = (self.b[0], self.b[n - 1]);
                if y < first || y > last {
                    let span = first + TAU - last;
                    let t = (y - last).rem_euclid(TAU) / span;
                    (n - 1, 0, t)
                } else {
                    let (j, t) = Self::bracket(&self.b, y).unwrap();
                    (j, j + 1, t)
                }
            }
        };
        let lo = self.at(i, j0) * (1.0 - t) + self.at(i, j1) * t;
        let hi = self.at(i + 1, j0) * (1.0 - t) + self.at(i + 1, j1) * t;
        lo * (1.0 - s) + hi * s
    }

    pub fn value(&self, p: Point) -> f64 {
        match self.coords {
            Coordinates::Cartesian => self.bilinear(p[0], p[1]),
            Coordinates::Polar => self.bilinear(p[0].hypot(p[1]), p[1].atan2(p[0]).rem_euclid(TAU)),
        }
    }

    /// Estimated interpolation error: the defect of bilinear interpolation
    /// from the lattice with every other line removed, divided by four for
    /// second-order convergence.
    pub fn interpolation_error(&self) -> f64 {
        let (na, nb) = (self.a.len(), self.b.len());
        let mut worst: f64 = 0.0;
        for i in 1..na.saturating_sub(1) {
            let s = (self.a[i] - self.a[i - 1]) / (self.a[i + 1] - self.a[i - 1]);
            for j in 1..nb.saturating_sub(1) {
                let t = (self.b[j] - self.b[j - 1]) / (self.b[j + 1] - self.b[j - 1]);
                let lo = self.at(i - 1, j - 1) * (1.0 - t) + self.at(i - 1, j + 1) * t;
                let hi = self.at(i + 1, j - 1) * (1.0 - t) + self.at(i + 1, j + 1) * t;
                let coarse = lo * (1.0 - s) + hi * s;
                worst = worst.max((coarse - self.at(i, j)).abs());
            }
        }
        worst / 4.0
    }

    /// Largest radius with a nonzero sample.
    pub fn support_radius(&self) -> f64 {
        let mut r: f64 = 0.0;
        for (i, &x) in self.a.iter().enumerate() {
            for (j, &y) in self.b.iter().enumerate() {
                if self.at(i, j) != 0.0 {
                    let rad = match self.coords {
                        Coordinates::Polar => x,
                        Coordinates::Cartesian => x.hypot(y),
                    };
                    r = r.max(rad);
                }
            }
        }
        r
    }
}
