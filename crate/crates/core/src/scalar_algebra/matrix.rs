use super::scalar::{Scalar, ZeroTest};
use crate::error::{Error, Result};

/// Dense row-major matrix over a scalar backend.
#[derive(Clone, Debug)]
pub struct Matrix<S: Scalar> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn zeros(like: &S, rows: usize, cols: usize) -> Self {
        let z = like.zero_like();
        Matrix {
            rows,
            cols,
            data: vec![z; rows * cols],
        }
    }

    pub fn identity(like: &S, n: usize) -> Self {
        let z = like.zero_like();
        let o = like.one_like();
        Matrix::from_fn(n, n, |i, j| if i == j { o.clone() } else { z.clone() })
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<S> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn like(&self) -> &S {
        &self.data[0]
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, o: &Matrix<S>) -> Result<Matrix<S>> {
        if self.cols != o.rows {
            return Err(Error::Dimension(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let z = self.like().zero_like();
        Ok(Matrix::from_fn(self.rows, o.cols, |i, j| {
            let mut acc = z.clone();
            for k in 0..self.cols {
                acc = acc.add(&self.get(i, k).mul(o.get(k, j)));
            }
            acc
        }))
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        (0..self.rows)
            .map(|i| {
                let mut acc = v[0].zero_like();
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).mul(&v[k]));
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, o: &Matrix<S>) -> Matrix<S> {
        Matrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).add(o.get(i, j)))
    }

    pub fn scale(&self, s: &S) -> Matrix<S> {
        Matrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).mul(s))
    }

    pub fn kron(&self, o: &Matrix<S>) -> Matrix<S> {
        Matrix::from_fn(self.rows * o.rows, self.cols * o.cols, |i, j| {
            self.get(i / o.rows, j / o.cols)
                .mul(o.get(i % o.rows, j % o.cols))
        })
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix<S> {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    pub fn conj(&self) -> Matrix<S> {
        Matrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).conj())
    }

    pub fn map(&self, f: impl Fn(&S) -> S) -> Matrix<S> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Gaussian elimination; pivots chosen by largest approximate modulus among
    /// entries certified nonzero.
    fn pivot(&self, a: &[Vec<S>], col: usize, from: usize) -> Result<Option<usize>> {
        let mut best: Option<(usize, f64)> = None;
        let mut unknown = false;
        for (r, row) in a.iter().enumerate().skip(from) {
            match row[col].zero_test() {
                ZeroTest::NonZero => {
                    let m = row[col].abs_approx();
                    if best.map_or(true, |(_, b)| m > b) {
                        best = Some((r, m));
                    }
                }
                ZeroTest::Unknown => unknown = true,
                ZeroTest::Zero => {}
            }
        }
        match best {
            Some((r, _)) => Ok(Some(r)),
            None if unknown => Err(Error::Undecidable),
            None => Ok(None),
        }
    }

    pub fn det(&self) -> Result<S> {
        if self.rows != self.cols {
            return Err(Error::Dimension("det of non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Err(Error::Dimension("empty matrix".into()));
        }
        let mut a = self.to_rows();
        let mut det = self.like().one_like();
        for c in 0..n {
            let p = match self.pivot(&a, c, c)? {
                Some(p) => p,
                None => return Ok(self.like().zero_like()),
            };
            if p != c {
                a.swap(p, c);
                det = det.neg();
            }
            let piv = a[c][c].clone();
            det = det.mul(&piv);
            let inv = piv.inv()?;
            for r in c + 1..n {
                if a[r][c].zero_test() == ZeroTest::Zero {
                    continue;
                }
                let f = a[r][c].mul(&inv);
                for k in c + 1..n {
                    let t = f.mul(&a[c][k]);
                    a[r][k] = a[r][k].sub(&t);
                }
            }
        }
        Ok(det)
    }

    /// Reduced row echelon form; returns pivot columns.
    pub fn rref(&self) -> Result<(Matrix<S>, Vec<usize>)> {
        let mut a = self.to_rows();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let p = match self.pivot(&a, c, r)? {
                Some(p) => p,
                None => continue,
            };
            a.swap(p, r);
            let inv = a[r][c].inv()?;
            for k in 0..self.cols {
                a[r][k] = a[r][k].mul(&inv);
            }
            for i in 0..self.rows {
                if i != r && a[i][c].zero_test() != ZeroTest::Zero {
                    let f = a[i][c].clone();
                    for k in 0..self.cols {
                        let t = f.mul(&a[r][k]);
                        a[i][k] = a[i][k].sub(&t);
                    }
                }
            }
            // exact zero in the eliminated column for the ball backend
            for i in 0..self.rows {
                if i != r {
                    a[i][c] = a[i][c].zero_like();
                }
            }
            pivots.push(c);
            r += 1;
        }
        Ok((Matrix::from_rows(a), pivots))
    }

    pub fn rank(&self) -> Result<usize> {
        Ok(self.rref()?.1.len())
    }

    /// Basis of the right kernel, as column vectors.
    pub fn nullspace(&self) -> Result<Vec<Vec<S>>> {
        let (r, piv) = self.rref()?;
        let z = self.like().zero_like();
        let o = self.like().one_like();
        let mut out = Vec::new();
        for f in 0..self.cols {
            if piv.contains(&f) {
                continue;
            }
            let mut v = vec![z.clone(); self.cols];
            v[f] = o.clone();
            for (i, &p) in piv.iter().enumerate() {
                v[p] = r.get(i, f).neg();
            }
            out.push(v);
        }
        Ok(out)
    }

    /// Solve self * X = b for square invertible self.
    pub fn solve(&self, b: &Matrix<S>) -> Result<Matrix<S>> {
        let n = self.rows;
        if self.cols != n || b.rows != n {
            return Err(Error::Dimension("solve".into()));
        }
        let mut a: Vec<Vec<S>> = (0..n)
            .map(|i| {
                let mut r = self.row(i);
                r.extend(b.row(i));
                r
            })
            .collect();
        let m = n + b.cols;
        for c in 0..n {
            let p = self.pivot(&a, c, c)?.ok_or(Error::Singular)?;
            a.swap(p, c);
            let inv = a[c][c].inv()?;
            for k in c..m {
                a[c][k] = a[c][k].mul(&inv);
            }
            for i in 0..n {
                if i != c && a[i][c].zero_test() != ZeroTest::Zero {
                    let f = a[i][c].clone();
                    for k in c..m {
                        let t = f.mul(&a[c][k]);
                        a[i][k] = a[i][k].sub(&t);
                    }
                }
            }
        }
        Ok(Matrix::from_fn(n, b.cols, |i, j| a[i][n + j].clone()))
    }

    pub fn inverse(&self) -> Result<Matrix<S>> {
        self.solve(&Matrix::identity(self.like(), self.rows))
    }
}

/// Intersection of two column spans inside the same ambient space.
pub fn span_intersection<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>) -> Result<Vec<Vec<S>>> {
    let n = a.rows;
    let joined = Matrix::from_fn(n, a.cols + b.cols, |i, j| {
        if j < a.cols {
            a.get(i, j).clone()
        } else {
            b.get(i, j - a.cols).neg()
        }
    });
    let ker = joined.nullspace()?;
    Ok(ker
        .into_iter()
        .map(|v| {
            let coeffs = &v[..a.cols];
            (0..n)
                .map(|i| {
                    let mut acc = a.like().zero_like();
                    for (k, c) in coeffs.iter().enumerate() {
                        acc = acc.add(&a.get(i, k).mul(c));
                    }
                    acc
                })
                .collect()
        })
        .collect())
}
