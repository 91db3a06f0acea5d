//! Small dense kernels: a row-major matrix, one-sided Jacobi SVD and power
//! iteration for the dominant eigenvector of a symmetric PSD matrix.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                left: rows * cols,
                right: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Stacks equally long rows. An empty input gives a `0 × cols` matrix.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R], cols: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        Ok(out)
    }

    /// `selfᵀ · other` without materializing the transpose.
    pub fn t_matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: other.rows,
            });
        }
        let mut out = Matrix::zeros(self.cols, other.cols);
        for r in 0..self.rows {
            let a = self.row(r);
            let b = other.row(r);
            for (i, &ai) in a.iter().enumerate() {
                if ai == 0.0 {
                    continue;
                }
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &bj) in dst.iter_mut().zip(b) {
                    *d += ai * bj;
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix: `v · self`.
    pub fn left_apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: v.len(),
            });
        }
        let mut out = vec![0.0; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            for (o, &m) in out.iter_mut().zip(self.row(i)) {
                *o += vi * m;
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                got: other.rows * other.cols,
            });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// `‖selfᵀ self − I‖_F`.
    pub fn orthogonality_defect(&self) -> f64 {
        let gram = self.t_matmul(self).expect("square product");
        gram.sub(&Matrix::identity(self.cols))
            .expect("same shape")
            .frobenius_norm()
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `M = U · diag(sigma) · Vᵀ` with `sigma` nonnegative and descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Matrix,
    pub sigma: Vec<f64>,
    pub v: Matrix,
}

pub const SVD_TOLERANCE: f64 = 1e-12;
pub const SVD_MAX_SWEEPS: usize = 60;

/// One-sided (Hestenes) Jacobi SVD of a square matrix.
pub fn svd_square(m: &Matrix) -> Result<Svd> {
    if m.rows != m.cols {
        return Err(Error::DimensionMismatch {
            expected: m.rows,
            got: m.cols,
        });
    }
    if let Some(x) = m.data.iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite matrix entry {x}")));
    }
    let n = m.rows;
    // Work on columns stored contiguously: a[j] is column j of M.
    let mut a: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|i| m[(i, j)]).collect()).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    let mut converged = n < 2;
    for _ in 0..SVD_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&a[p], &a[p]);
                let beta = dot(&a[q], &a[q]);
                let gamma = dot(&a[p], &a[q]);
                if gamma == 0.0 || gamma.abs() <= SVD_TOLERANCE * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut a, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SvdNoConvergence {
            sweeps: SVD_MAX_SWEEPS,
        });
    }

    let norms: Vec<f64> = a.iter().map(|c| norm(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]).then(x.cmp(&y)));
    let sigma_max = order.first().map_or(0.0, |&j| norms[j]);
    let cutoff = sigma_max * 1e-14;

    let mut sigma = Vec::with_capacity(n);
    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut v_cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut pending = Vec::new();
    for &j in &order {
        let s = norms[j];
        sigma.push(s);
        v_cols.push(v[j].clone());
        if s > cutoff && s > 0.0 {
            u_cols.push(a[j].iter().map(|x| x / s).collect());
        } else {
            pending.push(u_cols.len());
            u_cols.push(Vec::new());
        }
    }
    complete_orthonormal(&mut u_cols, &pending, n);

    let mut u = Matrix::zeros(n, n);
    let mut vm = Matrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            u[(i, j)] = u_cols[j][i];
            vm[(i, j)] = v_cols[j][i];
        }
    }
    Ok(Svd { u, sigma, v: vm })
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(q);
    let (cp, cq) = (&mut left[p], &mut right[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, xq) = (*x, *y);
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

/// Fills the empty slots in `cols` with unit vectors orthogonal to all others.
fn complete_orthonormal(cols: &mut [Vec<f64>], pending: &[usize], n: usize) {
    let mut candidate = 0;
    for &slot in pending {
        loop {
            let mut e = vec![0.0; n];
            e[candidate % n] = 1.0;
            candidate += 1;
            // Two Gram-Schmidt passes against every filled column.
            for _ in 0..2 {
                for c in cols.iter().filter(|c| !c.is_empty()) {
                    let proj = dot(&e, c);
                    e.iter_mut().zip(c).for_each(|(x, y)| *x -= proj * y);
                }
            }
            let len = norm(&e);
            if len > 1e-8 {
                cols[slot] = e.into_iter().map(|x| x / len).collect();
                break;
            }
        }
    }
}

pub const POWER_MAX_ITERATIONS: usize = 10_000;
pub const POWER_TOLERANCE: f64 = 1e-14;

/// Dominant eigenvector of a symmetric positive semidefinite matrix by power
/// iteration. Returns `None` when the matrix annihilates the start vector.
pub fn dominant_eigenvector(sym: &Matrix) -> Option<Vec<f64>> {
    let n = sym.rows;
    // Start from the column with the largest diagonal entry, which carries
    // weight on the dominant direction unless that direction has a zero there.
    let start = (0..n).max_by(|&i, &j| sym[(i, i)].total_cmp(&sym[(j, j)]).then(j.cmp(&i)))?;
    let mut v: Vec<f64> = (0..n).map(|i| sym[(i, start)]).collect();
    let len = norm(&v);
    if len == 0.0 || !len.is_finite() {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= len);

    for _ in 0..POWER_MAX_ITERATIONS {
        let mut next = sym.left_apply(&v).expect("square matrix");
        let len = norm(&next);
        if len == 0.0 {
            return None;
        }
        next.iter_mut().for_each(|x| *x /= len);
        let delta = next
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        v = next;
        if delta <= POWER_TOLERANCE {
            return Some(v);
        }
    }
    log::warn!("power iteration stopped after {POWER_MAX_ITERATIONS} iterations without converging");
    Some(v)
}
