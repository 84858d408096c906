//! File formats: Matrix Market complex array matrices, the JSON matrix form,
//! and CSV/JSON emission for measures, grids and projections.

pub mod matrix_market;

pub use matrix_market::{read_matrix_market, write_matrix_market};

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat::{C64, OperatorMatrix};
use crate::stats::{AtomicMeasure, GridDensity};

/// JSON matrix form: { "n": int, "re": [[..]], "im": [[..]] }.
#[derive(Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &OperatorMatrix) -> Self {
        let n = m.dim();
        MatrixJson {
            n,
            re: (0..n)
                .map(|i| (0..n).map(|j| m[(i, j)].re).collect())
                .collect(),
            im: (0..n)
                .map(|i| (0..n).map(|j| m[(i, j)].im).collect())
                .collect(),
        }
    }

    pub fn into_matrix(self) -> Result<OperatorMatrix> {
        if self.n == 0 {
            return Err(Error::EmptyMatrix);
        }
        let check = |rows: &Vec<Vec<f64>>, name: &str| -> Result<()> {
            if rows.len() != self.n || rows.iter().any(|r| r.len() != self.n) {
                return Err(Error::InvalidArgument(format!(
                    "JSON matrix field '{name}' does not have shape {0}x{0}",
                    self.n
                )));
            }
            Ok(())
        };
        check(&self.re, "re")?;
        check(&self.im, "im")?;
        let m = OperatorMatrix::from_fn(self.n, |i, j| C64::new(self.re[i][j], self.im[i][j]));
        m.check_finite()?;
        Ok(m)
    }
}

pub fn matrix_to_json(m: &OperatorMatrix) -> String {
    serde_json::to_string_pretty(&MatrixJson::from_matrix(m)).expect("serializable")
}

pub fn matrix_from_json(s: &str) -> Result<OperatorMatrix> {
    let parsed: MatrixJson = serde_json::from_str(s).map_err(|e| Error::Parse {
        line: e.line(),
        col: e.column(),
        msg: e.to_string(),
    })?;
    parsed.into_matrix()
}

/// Reads a matrix by extension: `.mtx`/`.mm` as Matrix Market, otherwise JSON.
pub fn read_matrix_file(path: &Path) -> Result<OperatorMatrix> {
    let text = std::fs::read_to_string(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("mtx") | Some("mm") => read_matrix_market(&text),
        _ => matrix_from_json(&text),
    }
}

pub fn write_matrix_file(path: &Path, m: &OperatorMatrix) -> Result<()> {
    let text = match path.extension().and_then(|e| e.to_str()) {
        Some("mtx") | Some("mm") => write_matrix_market(m),
        _ => matrix_to_json(m),
    };
    std::fs::write(path, text)?;
    Ok(())
}

/// Atom list JSON: [{"re":..,"im":..,"weight":..}, ..].
#[derive(Serialize, Deserialize)]
pub struct AtomJson {
    pub re: f64,
    pub im: f64,
    pub weight: f64,
}

pub fn measure_to_json(nu: &AtomicMeasure) -> String {
    let atoms: Vec<AtomJson> = nu
        .atoms()
        .iter()
        .map(|&(z, w)| AtomJson {
            re: z.re,
            im: z.im,
            weight: w,
        })
        .collect();
    serde_json::to_string_pretty(&atoms).expect("serializable")
}

/// CSV rows "x,y,density" over the grid cells.
pub fn grid_to_csv(g: &GridDensity) -> String {
    let mut out = String::from("x,y,density\n");
    let nx = g.spec.nx();
    let ny = g.spec.ny();
    for iy in 0..ny {
        for ix in 0..nx {
            let c = g.cell_center(ix, iy);
            let d = g.density[iy * nx + ix];
            out.push_str(&format!("{},{},{}\n", c.re, c.im, d));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn awkward_matrix() -> OperatorMatrix {
        OperatorMatrix::from_rows(vec![
            vec![C64::new(1.0 / 3.0, -2.5e-17), C64::new(0.1, 7.0)],
            vec![C64::new(-0.0, 1e300), C64::new(f64::MIN_POSITIVE, 0.0)],
        ])
        .unwrap()
    }

    #[test]
    fn json_round_trip_is_exact() {
        let m = awkward_matrix();
        let s = matrix_to_json(&m);
        let back = matrix_from_json(&s).unwrap();
        assert_eq!(m.data(), back.data());
    }

    #[test]
    fn json_shape_and_finiteness_validated() {
        assert!(matrix_from_json(r#"{"n":2,"re":[[1,2]],"im":[[0,0],[0,0]]}"#).is_err());
        assert!(matrix_from_json(r#"{"n":1,"re":[[1e999]],"im":[[0]]}"#).is_err());
        let err = matrix_from_json("{not json").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn grid_csv_has_header_and_rows() {
        use crate::stats::{brown_grid, GridSpec, Window};
        let t = OperatorMatrix::zeros(2);
        let spec = GridSpec::with_cells(Window::new(-1.0, 1.0, -1.0, 1.0), 4, 4);
        let g = brown_grid(&t, &spec, 0.3).unwrap();
        let csv = grid_to_csv(&g);
        let lines: Vec<&str> = csv.trim().lines().collect();
        assert_eq!(lines[0], "x,y,density");
        assert_eq!(lines.len(), 1 + 16);
    }
}
