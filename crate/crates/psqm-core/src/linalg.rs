//! Small dense real linear algebra.
//!
//! The symplectic layer works with 2N x 2N matrices for N <= 3 and the test
//! oracles diagonalize grid Hamiltonians of a few hundred rows, so a compact
//! row-major matrix type with partial-pivot LU and a cyclic Jacobi
//! eigensolver covers every need without pulling an external solver into the
//! `no_std` core.

use alloc::vec;
use alloc::vec::Vec;
// used for f64 math in the no_std build; std test builds resolve inherent methods
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    nr: usize,
    nc: usize,
    a: Vec<f64>,
}

impl Mat {
    pub fn zeros(nr: usize, nc: usize) -> Self {
        Mat { nr, nc, a: vec![0.0; nr * nc] }
    }

    pub fn eye(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let nr = rows.len();
        let nc = rows[0].len();
        let mut a = Vec::with_capacity(nr * nc);
        for r in rows {
            assert_eq!(r.len(), nc);
            a.extend_from_slice(r);
        }
        Mat { nr, nc, a }
    }

    pub fn from_fn(nr: usize, nc: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Mat::zeros(nr, nc);
        for i in 0..nr {
            for j in 0..nc {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Mat::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nr
    }

    pub fn ncols(&self) -> usize {
        self.nc
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.a
    }

    pub fn t(&self) -> Mat {
        Mat::from_fn(self.nc, self.nr, |i, j| self[(j, i)])
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.nc, other.nr);
        let mut out = Mat::zeros(self.nr, other.nc);
        for i in 0..self.nr {
            for k in 0..self.nc {
                let v = self[(i, k)];
                if v == 0.0 {
                    continue;
                }
                for j in 0..other.nc {
                    out[(i, j)] += v * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.nc, x.len());
        (0..self.nr)
            .map(|i| (0..self.nc).map(|j| self[(i, j)] * x[j]).sum())
            .collect()
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.nr, self.nc), (other.nr, other.nc));
        let mut out = self.clone();
        for (v, w) in out.a.iter_mut().zip(other.a.iter()) {
            *v += w;
        }
        out
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.nr, self.nc), (other.nr, other.nc));
        let mut out = self.clone();
        for (v, w) in out.a.iter_mut().zip(other.a.iter()) {
            *v -= w;
        }
        out
    }

    pub fn scale(&self, s: f64) -> Mat {
        let mut out = self.clone();
        for v in out.a.iter_mut() {
            *v *= s;
        }
        out
    }

    pub fn norm_max(&self) -> f64 {
        self.a.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn symmetry_defect(&self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..self.nr {
            for j in (i + 1)..self.nc {
                d = d.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        d
    }

    /// Average away roundoff asymmetry.
    pub fn symmetrized(&self) -> Mat {
        Mat::from_fn(self.nr, self.nc, |i, j| 0.5 * (self[(i, j)] + self[(j, i)]))
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.nr).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[f64]) {
        for i in 0..self.nr {
            self[(i, j)] = v[i];
        }
    }

    /// Partial-pivot LU determinant.
    pub fn det(&self) -> f64 {
        assert_eq!(self.nr, self.nc);
        let n = self.nr;
        let mut a = self.a.clone();
        let mut det = 1.0;
        for k in 0..n {
            let mut piv = k;
            let mut best = a[k * n + k].abs();
            for i in (k + 1)..n {
                let v = a[i * n + k].abs();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if best == 0.0 {
                return 0.0;
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                det = -det;
            }
            det *= a[k * n + k];
            let inv = 1.0 / a[k * n + k];
            for i in (k + 1)..n {
                let f = a[i * n + k] * inv;
                a[i * n + k] = 0.0;
                for j in (k + 1)..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
            }
        }
        det
    }

    /// Solve `A x = b` by partial-pivot LU. Returns `None` when singular to
    /// working precision.
    pub fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        assert_eq!(self.nr, self.nc);
        assert_eq!(b.len(), self.nr);
        let n = self.nr;
        let mut a = self.a.clone();
        let mut x: Vec<f64> = b.to_vec();
        for k in 0..n {
            let mut piv = k;
            let mut best = a[k * n + k].abs();
            for i in (k + 1)..n {
                let v = a[i * n + k].abs();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if best < 1e-300 {
                return None;
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                x.swap(k, piv);
            }
            let inv = 1.0 / a[k * n + k];
            for i in (k + 1)..n {
                let f = a[i * n + k] * inv;
                a[i * n + k] = 0.0;
                for j in (k + 1)..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
                x[i] -= f * x[k];
            }
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= a[i * n + j] * x[j];
            }
            x[i] = s / a[i * n + i];
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Mat> {
        assert_eq!(self.nr, self.nc);
        let n = self.nr;
        let mut out = Mat::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            let col = self.solve(&e)?;
            out.set_col(j, &col);
        }
        Some(out)
    }
}

impl core::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.a[i * self.nc + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.a[i * self.nc + j]
    }
}

/// Eigendecomposition of a real symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order with matching orthonormal
/// eigenvector columns. Robust and accurate for the small and medium sizes
/// used here; cost is O(n^3) per sweep.
pub fn sym_eigen(m: &Mat) -> (Vec<f64>, Mat) {
    assert_eq!(m.nrows(), m.ncols());
    let n = m.nrows();
    let mut a = m.symmetrized();
    let mut v = Mat::eye(n);
    let scale = a.norm_max().max(1e-300);

    for _sweep in 0..64 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off = off.max(a[(i, j)].abs());
            }
        }
        if off < 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() < 1e-18 * scale {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap());
    let evals: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
    let mut evecs = Mat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = v.col(src);
        evecs.set_col(dst, &col);
    }
    (evals, evecs)
}

/// Eigenvalues of the Hermitian matrix `A + iB` (`A` symmetric, `B`
/// skew-symmetric), via the real symmetric embedding `[[A, -B], [B, A]]`
/// whose spectrum is that of `A + iB` with every eigenvalue doubled.
pub fn hermitian_eigenvalues(re: &Mat, im: &Mat) -> Vec<f64> {
    let n = re.nrows();
    assert_eq!((n, n), (im.nrows(), im.ncols()));
    let mut e = Mat::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            e[(i, j)] = re[(i, j)];
            e[(n + i, n + j)] = re[(i, j)];
            e[(i, n + j)] = -im[(i, j)];
            e[(n + i, j)] = im[(i, j)];
        }
    }
    let (evals, _) = sym_eigen(&e);
    // every eigenvalue appears twice; keep one of each pair
    evals.into_iter().step_by(2).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solve_and_det() {
        let a = Mat::from_rows(&[&[2.0, 1.0, 0.0], &[1.0, 3.0, 1.0], &[0.0, 1.0, 4.0]]);
        let x = a.solve(&[1.0, 2.0, 3.0]).unwrap();
        let b = a.matvec(&x);
        for (got, want) in b.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        // det by cofactor expansion: 2*(12-1) - 1*(4-0) = 18
        assert!((a.det() - 18.0).abs() < 1e-12);
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).sub(&Mat::eye(3)).norm_max() < 1e-12);
    }

    #[test]
    fn jacobi_recovers_spectrum() {
        let q = {
            // a fixed rotation in 3 dimensions
            let (c, s) = (0.8, 0.6);
            let r1 = Mat::from_rows(&[&[c, -s, 0.0], &[s, c, 0.0], &[0.0, 0.0, 1.0]]);
            let r2 = Mat::from_rows(&[&[1.0, 0.0, 0.0], &[0.0, c, s], &[0.0, -s, c]]);
            r1.mul(&r2)
        };
        let d = Mat::diag(&[-1.5, 0.25, 7.0]);
        let m = q.mul(&d).mul(&q.t());
        let (evals, evecs) = sym_eigen(&m);
        assert!((evals[0] + 1.5).abs() < 1e-12);
        assert!((evals[1] - 0.25).abs() < 1e-12);
        assert!((evals[2] - 7.0).abs() < 1e-12);
        let recon = evecs.mul(&Mat::diag(&evals)).mul(&evecs.t());
        assert!(recon.sub(&m).norm_max() < 1e-11);
    }

    #[test]
    fn hermitian_embedding_eigenvalues() {
        // H = [[1, i], [-i, 1]] has eigenvalues 0 and 2
        let re = Mat::eye(2);
        let im = Mat::from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        let ev = hermitian_eigenvalues(&re, &im);
        assert!((ev[0] - 0.0).abs() < 1e-12);
        assert!((ev[1] - 2.0).abs() < 1e-12);
    }
}
