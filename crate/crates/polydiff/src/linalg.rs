//! Exact linear algebra over the scalar fraction field.
//!
//! Plain Gaussian elimination with first-nonzero pivoting; every path is
//! deterministic and exact. Matrices are small throughout the engine, so no
//! fraction-free cleverness is attempted.

use alloc::vec;
use alloc::vec::Vec;

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub a: Vec<Vec<Scalar>>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            a: vec![vec![Scalar::zero(); cols]; rows],
        }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for k in 0..n {
            m.a[k][k] = Scalar::one();
        }
        m
    }

    pub fn from_rows(rows_v: Vec<Vec<Scalar>>) -> Mat {
        let rows = rows_v.len();
        let cols = rows_v.first().map(Vec::len).unwrap_or(0);
        for r in &rows_v {
            assert_eq!(r.len(), cols, "ragged matrix");
        }
        Mat {
            rows,
            cols,
            a: rows_v,
        }
    }

    pub fn from_cols(cols_v: &[Vec<Scalar>]) -> Mat {
        let cols = cols_v.len();
        let rows = cols_v.first().map(Vec::len).unwrap_or(0);
        let mut m = Mat::zeros(rows, cols);
        for (j, c) in cols_v.iter().enumerate() {
            assert_eq!(c.len(), rows, "ragged matrix");
            for (i, x) in c.iter().enumerate() {
                m.a[i][j] = x.clone();
            }
        }
        m
    }

    pub fn transpose(&self) -> Mat {
        let mut m = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.a[j][i] = self.a[i][j].clone();
            }
        }
        m
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut m = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.a[i][k].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    if other.a[k][j].is_zero() {
                        continue;
                    }
                    m.a[i][j] = m.a[i][j].add(&self.a[i][k].mul(&other.a[k][j]));
                }
            }
        }
        m
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut m = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.a[i][j] = m.a[i][j].add(&other.a[i][j]);
            }
        }
        m
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut m = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.a[i][j] = m.a[i][j].sub(&other.a[i][j]);
            }
        }
        m
    }

    pub fn scale(&self, c: &Scalar) -> Mat {
        let mut m = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.a[i][j] = m.a[i][j].mul(c);
            }
        }
        m
    }

    pub fn commutator(&self, other: &Mat) -> Mat {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|r| r.iter().all(Scalar::is_zero))
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len());
        self.a
            .iter()
            .map(|row| {
                let mut acc = Scalar::zero();
                for (x, y) in row.iter().zip(v) {
                    if !x.is_zero() && !y.is_zero() {
                        acc = acc.add(&x.mul(y));
                    }
                }
                acc
            })
            .collect()
    }

    /// Reduced row echelon form; returns the pivot column of each pivot row.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.a[i][c].is_zero()) else {
                continue;
            };
            m.a.swap(r, p);
            let inv = m.a[r][c].inv();
            for j in c..m.cols {
                m.a[r][j] = m.a[r][j].mul(&inv);
            }
            for i in 0..m.rows {
                if i != r && !m.a[i][c].is_zero() {
                    let f = m.a[i][c].clone();
                    for j in c..m.cols {
                        let t = m.a[r][j].mul(&f);
                        m.a[i][j] = m.a[i][j].sub(&t);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel (vectors x with A x = 0).
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let (m, pivots) = self.rref();
        let mut is_pivot = vec![None; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            is_pivot[c] = Some(r);
        }
        let mut basis = Vec::new();
        for c in 0..self.cols {
            if is_pivot[c].is_some() {
                continue;
            }
            let mut v = vec![Scalar::zero(); self.cols];
            v[c] = Scalar::one();
            for (j, slot) in is_pivot.iter().enumerate() {
                if let Some(r) = slot {
                    v[j] = m.a[*r][c].neg();
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Solve A x = b for each column b of `rhs`. None when inconsistent.
    pub fn solve(&self, rhs: &Mat) -> Option<Mat> {
        assert_eq!(self.rows, rhs.rows);
        let mut aug = Mat::zeros(self.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.a[i][j] = self.a[i][j].clone();
            }
            for j in 0..rhs.cols {
                aug.a[i][self.cols + j] = rhs.a[i][j].clone();
            }
        }
        let (m, pivots) = aug.rref();
        // inconsistent when a pivot lands in the rhs block
        if pivots.iter().any(|&c| c >= self.cols) {
            return None;
        }
        let mut x = Mat::zeros(self.cols, rhs.cols);
        for (r, &c) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.a[c][j] = m.a[r][self.cols + j].clone();
            }
        }
        Some(x)
    }
}

/// Indices of a maximal linearly independent subset of `vectors`, scanned in
/// order, plus the subset itself.
pub fn independent_subset(vectors: &[Vec<Scalar>]) -> Vec<usize> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let dim = vectors[0].len();
    let mut reduced: Vec<(usize, Vec<Scalar>)> = Vec::new(); // (lead col, row)
    let mut picked = Vec::new();
    for (idx, v) in vectors.iter().enumerate() {
        assert_eq!(v.len(), dim);
        let mut w = v.clone();
        for (lead, row) in &reduced {
            if !w[*lead].is_zero() {
                let f = w[*lead].clone();
                for j in 0..dim {
                    let t = row[j].mul(&f);
                    w[j] = w[j].sub(&t);
                }
            }
        }
        if let Some(lead) = (0..dim).find(|&j| !w[j].is_zero()) {
            let inv = w[lead].inv();
            for x in w.iter_mut() {
                *x = x.mul(&inv);
            }
            reduced.push((lead, w));
            reduced.sort_by_key(|&(l, _)| l);
            picked.push(idx);
        }
    }
    picked
}

/// Coordinates of `v` in the span of `basis` (as rows). None when outside.
pub fn coords_in_span(basis: &[Vec<Scalar>], v: &[Scalar]) -> Option<Vec<Scalar>> {
    let m = Mat::from_cols(basis);
    let rhs = Mat::from_cols(&[v.to_vec()]);
    let x = m.solve(&rhs)?;
    Some((0..basis.len()).map(|i| x.a[i][0].clone()).collect())
}
