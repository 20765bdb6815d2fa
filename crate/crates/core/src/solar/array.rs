use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{check_dims, Error, Result};
use crate::testbed::Matrix;

/// Module voltage of the reference panel, in volts.
pub const DEFAULT_MODULE_VOLTAGE: f64 = 22.512;
/// Module current at standard irradiance, in amperes.
pub const DEFAULT_MODULE_CURRENT: f64 = 3.902;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PvParams {
    pub v_m: f64,
    pub i_m: f64,
}

impl PvParams {
    pub fn new(v_m: f64, i_m: f64) -> Result<Self> {
        if !(v_m > 0.0 && v_m.is_finite()) {
            return Err(Error::config("V_m", "must be positive"));
        }
        if !(i_m > 0.0 && i_m.is_finite()) {
            return Err(Error::config("I_m", "must be positive"));
        }
        Ok(Self { v_m, i_m })
    }
}

impl Default for PvParams {
    fn default() -> Self {
        Self {
            v_m: DEFAULT_MODULE_VOLTAGE,
            i_m: DEFAULT_MODULE_CURRENT,
        }
    }
}

/// Irradiance factor `k = G / G₀` of every cell, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct IrradianceMatrix {
    rows: usize,
    cols: usize,
    k: Vec<f64>,
}

impl IrradianceMatrix {
    pub fn new(rows: usize, cols: usize, k: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Contract(
                "irradiance matrix must not be empty".into(),
            ));
        }
        check_dims(rows * cols, k.len())?;
        if let Some(i) = k.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidIrradiance {
                row: i / cols + 1,
                column: i % cols + 1,
                value: k[i],
            });
        }
        Ok(Self { rows, cols, k })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        for r in rows {
            check_dims(cols, r.len())?;
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn uniform(rows: usize, cols: usize, k: f64) -> Result<Self> {
        Self::new(rows, cols, vec![k; rows * cols])
    }

    /// Uniform factors in `[0, 1]`.
    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Result<Self> {
        Self::new(
            rows,
            cols,
            (0..rows * cols).map(|_| rng.random::<f64>()).collect(),
        )
    }

    /// 9×9 array under a short, wide shadow. TCT row sums are 8.1 for rows
    /// 1–5, 6.6 for row 6 and 3.6 for rows 7–9; the best reconfiguration
    /// reaches 56.7 at full voltage.
    pub fn short_wide_shadow() -> Self {
        let mut rows = vec![vec![0.9; 9]; 5];
        rows.push(vec![0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.6, 0.3, 0.3]);
        for _ in 0..3 {
            rows.push(vec![0.6, 0.6, 0.6, 0.3, 0.3, 0.3, 0.3, 0.3, 0.3]);
        }
        Self::from_rows(&rows).expect("shipped matrix is valid")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.k[row * self.cols + col]
    }

    pub fn total(&self) -> f64 {
        self.k.iter().sum()
    }

    /// First line `R C`, then `R` rows of `C` factors.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let m = Matrix::parse(text, path)?;
        Self::new(m.rows(), m.cols(), m.data().to_vec())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        Matrix::new(self.rows, self.cols, self.k.clone())?.write(path)
    }
}

/// Placement of cells within their own columns.
///
/// Slot `(r, c)` holds the cell that originally sat in row `labels[r·C + c]`
/// of column `c`. Cells never leave their column, so every column is a
/// permutation of `0..R`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Arrangement {
    rows: usize,
    cols: usize,
    labels: Vec<usize>,
}

impl Arrangement {
    /// The TCT wiring: every cell in its original slot.
    pub fn identity(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            labels: (0..rows)
                .flat_map(|r| std::iter::repeat_n(r, cols))
                .collect(),
        }
    }

    /// Independent uniform shuffle of each column.
    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let mut arr = Self::identity(rows, cols);
        let mut column: Vec<usize> = (0..rows).collect();
        for c in 0..cols {
            column.shuffle(rng);
            for (r, &label) in column.iter().enumerate() {
                arr.labels[r * cols + c] = label;
            }
        }
        arr
    }

    /// Zero-based labels, row-major; every column must be a permutation.
    pub fn from_labels(rows: usize, cols: usize, labels: Vec<usize>) -> Result<Self> {
        check_dims(rows * cols, labels.len())?;
        let arr = Self { rows, cols, labels };
        arr.validate()?;
        Ok(arr)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = vec![false; self.rows];
        for c in 0..self.cols {
            seen.iter_mut().for_each(|s| *s = false);
            for r in 0..self.rows {
                let label = self.get(r, c);
                if label >= self.rows || seen[label] {
                    return Err(Error::InvalidArrangement {
                        column: c + 1,
                        rows: self.rows,
                    });
                }
                seen[label] = true;
            }
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Original row of the cell in slot `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> usize {
        self.labels[row * self.cols + col]
    }

    pub fn swap(&mut self, col: usize, a: usize, b: usize) {
        self.labels.swap(a * self.cols + col, b * self.cols + col);
    }

    /// Overwrites column `col`; the caller guarantees a permutation.
    pub(crate) fn set_column(&mut self, col: usize, labels: &[usize]) {
        for (r, &label) in labels.iter().enumerate() {
            self.labels[r * self.cols + col] = label;
        }
    }

    pub fn column(&self, col: usize) -> Vec<usize> {
        (0..self.rows).map(|r| self.get(r, col)).collect()
    }

    pub(crate) fn same_shape(&self, other: &Self) -> Result<()> {
        check_dims(self.rows, other.rows)?;
        check_dims(self.cols, other.cols)
    }

    /// First line `R C`, then `R` rows of `C` one-based original-row labels.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let m = Matrix::parse(text, path)?;
        let labels = m
            .data()
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                if v.fract() == 0.0 && v >= 1.0 {
                    Ok(v as usize - 1)
                } else {
                    Err(Error::InvalidArrangement {
                        column: i % m.cols() + 1,
                        rows: m.rows(),
                    })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_labels(m.rows(), m.cols(), labels)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows, self.cols);
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|c| (self.get(r, c) + 1).to_string())
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}
