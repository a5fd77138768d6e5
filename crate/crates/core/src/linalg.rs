//! Small dense linear algebra: Cholesky solves, Householder least squares and
//! cyclic Jacobi eigen-decomposition of symmetric matrices.

use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> f64>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn transpose_mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, vi) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * vi;
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|a_ij - a_ji|` relative to the largest entry.
    pub fn asymmetry(&self) -> f64 {
        let scale = self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0_f64;
        for i in 0..self.rows {
            for j in 0..i {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst / scale
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

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Relative pivot threshold below which a symmetric solve is declared singular.
pub const PIVOT_TOLERANCE: f64 = 1e-14;

/// Solves `A x = b` for symmetric positive definite `A` by Cholesky factorization.
///
/// A pivot below `PIVOT_TOLERANCE * max_i a_ii` is reported as
/// [`Error::IllConditioned`].
pub fn cholesky_solve(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix is not square",
            a.rows, a.cols
        )));
    }
    let n = a.rows;
    if b.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side has {} entries, expected {n}",
            b.len()
        )));
    }
    let max_diag = (0..n).map(|i| a[(i, i)].abs()).fold(0.0, f64::max);
    let threshold = PIVOT_TOLERANCE * max_diag;
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > threshold) {
            return Err(Error::IllConditioned { row: j, pivot: d });
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[(i, k)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[(k, i)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    Ok(x)
}

/// Minimizes `|M x - y|` by Householder QR.
///
/// Returns [`Error::DegenerateSupport`] when `R` has a diagonal entry below
/// `1e-12` of the largest one.
pub fn least_squares(m: &Matrix, y: &[f64]) -> Result<Vec<f64>> {
    let (rows, cols) = (m.rows, m.cols);
    if y.len() != rows || rows < cols {
        return Err(Error::DimensionMismatch(format!(
            "least squares with {rows}x{cols} matrix and {} observations",
            y.len()
        )));
    }
    let mut r = m.clone();
    let mut q_ty = y.to_vec();
    for k in 0..cols {
        let alpha = (k..rows).map(|i| r[(i, k)] * r[(i, k)]).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let alpha = if r[(k, k)] > 0.0 { -alpha } else { alpha };
        let mut v: Vec<f64> = (k..rows).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for j in k..cols {
            let s: f64 = (k..rows).map(|i| v[i - k] * r[(i, j)]).sum::<f64>() * 2.0 / vnorm2;
            for i in k..rows {
                r[(i, j)] -= s * v[i - k];
            }
        }
        let s: f64 = (k..rows).map(|i| v[i - k] * q_ty[i]).sum::<f64>() * 2.0 / vnorm2;
        for i in k..rows {
            q_ty[i] -= s * v[i - k];
        }
    }
    let max_diag = (0..cols).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if (0..cols).any(|i| !(r[(i, i)].abs() > 1e-12 * max_diag)) {
        return Err(Error::DegenerateSupport);
    }
    let mut x = vec![0.0; cols];
    for i in (0..cols).rev() {
        let mut s = q_ty[i];
        for k in i + 1..cols {
            s -= r[(i, k)] * x[k];
        }
        x[i] = s / r[(i, i)];
    }
    Ok(x)
}

/// Eigenvalues and orthonormal eigenvectors (columns of `vectors`) of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

/// Cyclic Jacobi eigen-decomposition.
///
/// Sweeps until the off-diagonal Frobenius norm falls below `1e-14 * |A|_F`,
/// then applies rotations to any remaining entries that still change the diagonal.
pub fn symmetric_eigen(a: &Matrix) -> Result<SymmetricEigen> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix is not square",
            a.rows, a.cols
        )));
    }
    let n = a.rows;
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    let threshold = 1e-14 * a.frobenius_norm();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum::<f64>()
            .sqrt();
        if off <= threshold {
            // final polish: small entries can still shift tiny eigenvalues
            let mut any = false;
            for p in 0..n {
                for q in p + 1..n {
                    if m[(p, q)] != 0.0 && rotate(&mut m, &mut v, p, q) {
                        any = true;
                    }
                }
            }
            if !any {
                break;
            }
            continue;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[(p, q)] != 0.0 {
                    rotate(&mut m, &mut v, p, q);
                }
            }
        }
    }
    let values = (0..n).map(|i| m[(i, i)]).collect();
    Ok(SymmetricEigen { values, vectors: v })
}

/// One Jacobi rotation zeroing `m[p][q]`. Returns false when the entry is
/// negligible against both diagonal entries.
fn rotate(m: &mut Matrix, v: &mut Matrix, p: usize, q: usize) -> bool {
    let apq = m[(p, q)];
    let (app, aqq) = (m[(p, p)], m[(q, q)]);
    let g = 100.0 * apq.abs();
    if app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
        m[(p, q)] = 0.0;
        m[(q, p)] = 0.0;
        return false;
    }
    let theta = (aqq - app) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let tau = s / (1.0 + c);
    m[(p, p)] = app - t * apq;
    m[(q, q)] = aqq + t * apq;
    m[(p, q)] = 0.0;
    m[(q, p)] = 0.0;
    let n = m.rows;
    for r in 0..n {
        if r != p && r != q {
            let arp = m[(r, p)];
            let arq = m[(r, q)];
            let new_rp = arp - s * (arq + tau * arp);
            let new_rq = arq + s * (arp - tau * arq);
            m[(r, p)] = new_rp;
            m[(p, r)] = new_rp;
            m[(r, q)] = new_rq;
            m[(q, r)] = new_rq;
        }
    }
    for r in 0..n {
        let vrp = v[(r, p)];
        let vrq = v[(r, q)];
        v[(r, p)] = vrp - s * (vrq + tau * vrp);
        v[(r, q)] = vrq + s * (vrp - tau * vrq);
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hilbert(n: usize) -> Matrix {
        Matrix::from_fn(n, n, |i, j| 1.0 / (i + j + 1) as f64)
    }

    #[test]
    fn cholesky_solves_spd_system() {
        let a = Matrix::from_rows(&[vec![4.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let x = cholesky_solve(&a, &[1.0, 2.0]).unwrap();
        let r = a.mul_vec(&x);
        assert!((r[0] - 1.0).abs() < 1e-15 && (r[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn cholesky_flags_singular_matrix() {
        let a = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(matches!(
            cholesky_solve(&a, &[1.0, 1.0]),
            Err(Error::IllConditioned { row: 1, .. })
        ));
        assert!(cholesky_solve(&Matrix::zeros(2, 3), &[0.0, 0.0]).is_err());
    }

    #[test]
    fn least_squares_fits_line() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 / 19.0).collect();
        let m = Matrix::from_fn(20, 2, |i, j| if j == 0 { 1.0 } else { xs[i] });
        let y: Vec<f64> = xs.iter().map(|x| 2.0 - 3.0 * x).collect();
        let c = least_squares(&m, &y).unwrap();
        assert!((c[0] - 2.0).abs() < 1e-13 && (c[1] + 3.0).abs() < 1e-13);
    }

    #[test]
    fn least_squares_detects_rank_deficiency() {
        let m = Matrix::from_fn(10, 2, |i, _| i as f64);
        assert_eq!(
            least_squares(&m, &[1.0; 10]),
            Err(Error::DegenerateSupport)
        );
    }

    #[test]
    fn jacobi_reconstructs_matrix() {
        let a = hilbert(6);
        let eig = symmetric_eigen(&a).unwrap();
        let v = &eig.vectors;
        let rebuilt = Matrix::from_fn(6, 6, |i, j| {
            (0..6).map(|k| v[(i, k)] * eig.values[k] * v[(j, k)]).sum()
        });
        assert!(rebuilt.max_abs_diff(&a) < 1e-14);
        let vtv = Matrix::from_fn(6, 6, |i, j| (0..6).map(|k| v[(k, i)] * v[(k, j)]).sum());
        assert!(vtv.max_abs_diff(&Matrix::identity(6)) < 1e-14);
    }

    #[test]
    fn jacobi_two_by_two() {
        let a = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let mut vals = symmetric_eigen(&a).unwrap().values;
        vals.sort_by(f64::total_cmp);
        assert_eq!(vals, vec![1.0, 3.0]);
    }
}
