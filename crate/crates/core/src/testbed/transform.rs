use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{check_dims, Error, Result};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        check_dims(rows * cols, data.len())?;
        Ok(Self { rows, cols, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self {
            rows: n,
            cols: n,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Row vector times matrix: `out[j] = Σ_i v[i] · M[i][j]`.
    pub fn left_mul(&self, v: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (i, &vi) in v.iter().enumerate() {
            for (o, m) in out.iter_mut().zip(self.row(i)) {
                *o += vi * m;
            }
        }
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Largest deviation of `M · Mᵀ` from the identity.
    pub fn orthogonality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.rows {
                let dot: f64 = self
                    .row(i)
                    .iter()
                    .zip(self.row(j))
                    .map(|(a, b)| a * b)
                    .sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// Plain-text form: `rows cols` on the first line, then whitespace
    /// separated row-major values.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let parse_err = |line: usize, message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (hline, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "missing `rows cols` header".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_err(hline + 1, format!("bad header: {e}")))?;
        let [rows, cols] = dims[..] else {
            return Err(parse_err(hline + 1, "header must be `rows cols`".into()));
        };
        let mut data = Vec::with_capacity(rows * cols);
        for (ln, line) in lines {
            for tok in line.split_whitespace() {
                let v = tok
                    .parse::<f64>()
                    .map_err(|e| parse_err(ln + 1, format!("`{tok}`: {e}")))?;
                data.push(v);
            }
        }
        if data.len() != rows * cols {
            return Err(parse_err(
                hline + 1,
                format!("expected {} values, found {}", rows * cols, data.len()),
            ));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows, self.cols);
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|v| v.to_string()).collect();
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

/// Orthogonal matrix from the QR factorisation of a Gaussian matrix, with
/// column signs fixed by `R`'s diagonal.
pub fn random_orthogonal<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Matrix> {
    if dim < 2 {
        return Err(Error::Contract(format!(
            "rotation needs at least 2 dimensions, got {dim}"
        )));
    }
    let g = DMatrix::<f64>::from_fn(dim, dim, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..dim {
        if r[(c, c)] < 0.0 {
            q.column_mut(c).neg_mut();
        }
    }
    let data = (0..dim)
        .flat_map(|i| (0..dim).map(move |j| (i, j)))
        .map(|(i, j)| q[(i, j)])
        .collect();
    Matrix::new(dim, dim, data)
}

/// `z = ((x − o) / λ + offset) · M`.
#[derive(Debug, Clone, PartialEq)]
pub struct Transform {
    pub shift: Vec<f64>,
    pub rotation: Option<Matrix>,
    pub pre_offset: f64,
    pub scale: f64,
}

impl Transform {
    pub fn shift_only(shift: Vec<f64>) -> Self {
        Self {
            shift,
            rotation: None,
            pre_offset: 0.0,
            scale: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dims(self.dim(), x.len())?;
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &[f64]) -> Vec<f64> {
        let y: Vec<f64> = x
            .iter()
            .zip(&self.shift)
            .map(|(xi, oi)| (xi - oi) / self.scale + self.pre_offset)
            .collect();
        match &self.rotation {
            None => y,
            Some(m) => {
                let mut z = vec![0.0; y.len()];
                m.left_mul(&y, &mut z);
                z
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::norm;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_and_origin() {
        let t = Transform::shift_only(vec![0.0; 3]);
        assert_eq!(t.apply(&[1.0, -2.0, 3.0]).unwrap(), vec![1.0, -2.0, 3.0]);
        let t = Transform::shift_only(vec![5.0, 6.0, 7.0]);
        assert_eq!(t.apply(&[5.0, 6.0, 7.0]).unwrap(), vec![0.0; 3]);
        assert!(t.apply(&[1.0]).is_err());
    }

    #[test]
    fn rotation_preserves_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for dim in [2, 5, 10] {
            let m = random_orthogonal(dim, &mut rng).unwrap();
            assert!(m.orthogonality_error() < 1e-9);
            let shift: Vec<f64> = (0..dim).map(|_| rng.random_range(-5.0..5.0)).collect();
            let t = Transform {
                shift: shift.clone(),
                rotation: Some(m.clone()),
                pre_offset: 1.0,
                scale: 2.5,
            };
            let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-5.0..5.0)).collect();
            let y: Vec<f64> = x
                .iter()
                .zip(&shift)
                .map(|(a, o)| (a - o) / 2.5 + 1.0)
                .collect();
            let z = t.apply(&x).unwrap();
            assert!((norm(&z) - norm(&y)).abs() < 1e-9 * norm(&y).max(1.0));
            let mv = m.mul_vec(&x);
            assert!((norm(&mv) - norm(&x)).abs() < 1e-9 * norm(&x));
        }
    }

    #[test]
    fn rotation_is_deterministic() {
        let a = random_orthogonal(6, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let b = random_orthogonal(6, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(a, b);
        assert!(random_orthogonal(1, &mut ChaCha8Rng::seed_from_u64(3)).is_err());
    }

    #[test]
    fn text_round_trip() {
        let m = random_orthogonal(3, &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
        let back = Matrix::parse(&m.to_text(), Path::new("m.txt")).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn text_errors() {
        let p = Path::new("m.txt");
        assert!(Matrix::parse("", p).is_err());
        assert!(Matrix::parse("2 2\n1 2 3\n", p).is_err());
        let err = Matrix::parse("1 2\n1 x\n", p).unwrap_err().to_string();
        assert!(err.contains("m.txt:2"), "{err}");
        assert_eq!(
            Matrix::parse("1 3\n1 2\n3\n", p).unwrap().data(),
            &[1.0, 2.0, 3.0]
        );
    }
}
