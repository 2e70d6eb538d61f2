//! Symplectic linear algebra on 2N x 2N real matrices.
//!
//! Conventions: phase-space vectors are ordered `z = (x_1..x_N, p_1..p_N)`,
//! the symplectic form is `z ∧ z' = p·x' - p'·x = (z')ᵀ J z` with
//! `J = [[0, I], [-I, 0]]`, and `Sp(N)` is the group with `SᵀJS = J`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
// used for f64 math in the no_std build; std test builds resolve inherent methods
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::Error;
use crate::linalg::{hermitian_eigenvalues, sym_eigen, Mat};
use crate::rng::Rng;
use crate::Result;

/// Certification tolerance for `‖SᵀJS - J‖_max` at construction.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// The standard symplectic matrix `J` for `n` degrees of freedom.
pub fn j_matrix(n: usize) -> Mat {
    let mut j = Mat::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    j
}

/// Symplectic product `z ∧ z' = p·x' - p'·x`.
pub fn symplectic_form(z: &[f64], zp: &[f64]) -> Result<f64> {
    if z.len() != zp.len() || z.len() % 2 != 0 {
        return Err(Error::DimensionMismatch { expected: z.len(), got: zp.len() });
    }
    let n = z.len() / 2;
    let mut s = 0.0;
    for i in 0..n {
        s += z[n + i] * zp[i] - zp[n + i] * z[i];
    }
    Ok(s)
}

/// `‖SᵀJS - J‖_max`.
pub fn symplectic_defect(m: &Mat) -> f64 {
    let n = m.nrows() / 2;
    let j = j_matrix(n);
    m.t().mul(&j).mul(m).sub(&j).norm_max()
}

/// Membership test for `Sp(N)`; errors on odd dimension.
pub fn is_symplectic(m: &Mat, tol: f64) -> Result<bool> {
    if m.nrows() != m.ncols() || m.nrows() % 2 != 0 {
        return Err(Error::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
    }
    Ok(symplectic_defect(m) < tol)
}

/// A real 2N x 2N matrix certified symplectic at construction.
#[derive(Debug, Clone)]
pub struct SymplecticMatrix {
    mat: Mat,
    n: usize,
}

impl SymplecticMatrix {
    pub fn new(mat: Mat) -> Result<SymplecticMatrix> {
        if mat.nrows() != mat.ncols() || mat.nrows() % 2 != 0 {
            return Err(Error::DimensionMismatch { expected: mat.nrows(), got: mat.ncols() });
        }
        let defect = symplectic_defect(&mat);
        if defect >= SYMPLECTIC_TOL {
            return Err(Error::NotSymplectic(defect));
        }
        let n = mat.nrows() / 2;
        Ok(SymplecticMatrix { mat, n })
    }

    pub fn identity(n: usize) -> SymplecticMatrix {
        SymplecticMatrix { mat: Mat::eye(2 * n), n }
    }

    pub fn n_dof(&self) -> usize {
        self.n
    }

    pub fn mat(&self) -> &Mat {
        &self.mat
    }

    pub fn apply(&self, z: &[f64]) -> Vec<f64> {
        self.mat.matvec(z)
    }

    /// Exact group inverse `S⁻¹ = J⁻¹ Sᵀ J` (no linear solve needed).
    pub fn inverse(&self) -> SymplecticMatrix {
        let j = j_matrix(self.n);
        let jinv = j.t(); // J⁻¹ = -J = Jᵀ
        SymplecticMatrix { mat: jinv.mul(&self.mat.t()).mul(&j), n: self.n }
    }

    pub fn compose(&self, other: &SymplecticMatrix) -> Result<SymplecticMatrix> {
        SymplecticMatrix::new(self.mat.mul(&other.mat))
    }

    /// N x N block: `(0,0) = A`, `(0,1) = B`, `(1,0) = C`, `(1,1) = D`.
    pub fn block(&self, bi: usize, bj: usize) -> Mat {
        let n = self.n;
        Mat::from_fn(n, n, |i, j| self.mat[(bi * n + i, bj * n + j)])
    }
}

/// Harmonic-oscillator rotation `[[cos θ, sin θ], [-sin θ, cos θ]]` (N = 1).
pub fn ho_rotation(theta: f64) -> SymplecticMatrix {
    let (c, s) = (theta.cos(), theta.sin());
    SymplecticMatrix::new(Mat::from_rows(&[&[c, s], &[-s, c]])).expect("rotation is symplectic")
}

/// Williamson normal form `M = Sᵀ D S`, `D = diag(Λ, Λ)`.
///
/// The positive numbers `λ_j` (returned in descending order) are determined
/// by the eigenvalues `±iλ_j` of `JM`. The diagonalizer is assembled from
/// the skew canonical form of `M^{-1/2} J M^{-1/2}`; within degenerate
/// blocks the eigenbasis is fixed by symplectic Gram-Schmidt, so `S` itself
/// is not unique (only the reconstruction is asserted by callers).
pub fn williamson(m: &Mat) -> Result<(SymplecticMatrix, Vec<f64>)> {
    let dim = m.nrows();
    if dim != m.ncols() || dim % 2 != 0 {
        return Err(Error::DimensionMismatch { expected: dim, got: m.ncols() });
    }
    let n = dim / 2;
    let sym_defect = m.symmetry_defect();
    if sym_defect >= 1e-9 * m.norm_max().max(1.0) {
        return Err(Error::NotSymmetric(sym_defect));
    }
    let msym = m.symmetrized();
    let (ev, q) = sym_eigen(&msym);
    if ev[0] <= 0.0 {
        return Err(Error::NotPositiveDefinite(ev[0]));
    }
    let half: Vec<f64> = ev.iter().map(|v| v.sqrt()).collect();
    let ihalf: Vec<f64> = half.iter().map(|v| 1.0 / v).collect();
    let m_half = q.mul(&Mat::diag(&half)).mul(&q.t());
    let m_ihalf = q.mul(&Mat::diag(&ihalf)).mul(&q.t());

    let k = m_ihalf.mul(&j_matrix(n)).mul(&m_ihalf); // skew, eigenvalues ±i/λ_j
    let w = k.mul(&k.t()); // symmetric PSD with doubly degenerate spectrum
    let (_wev, wvec) = sym_eigen(&w);

    // symplectic Gram-Schmidt over the eigenbasis, ascending in μ = 1/λ
    let mut us: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut vs: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut mus: Vec<f64> = Vec::with_capacity(n);
    for c in 0..dim {
        if us.len() == n {
            break;
        }
        let mut cand = wvec.col(c);
        for basis in us.iter().chain(vs.iter()) {
            let dot: f64 = cand.iter().zip(basis).map(|(a, b)| a * b).sum();
            for (x, b) in cand.iter_mut().zip(basis) {
                *x -= dot * b;
            }
        }
        let nrm: f64 = cand.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nrm < 0.3 {
            continue; // already spanned by a chosen (u, v) pair
        }
        for x in cand.iter_mut() {
            *x /= nrm;
        }
        let ku = k.matvec(&cand);
        let mu: f64 = ku.iter().map(|x| x * x).sum::<f64>().sqrt();
        if mu <= 0.0 {
            return Err(Error::NotPositiveDefinite(mu));
        }
        let v: Vec<f64> = ku.iter().map(|x| -x / mu).collect();
        us.push(cand);
        vs.push(v);
        mus.push(mu);
    }
    if us.len() != n {
        return Err(Error::NotPositiveDefinite(0.0));
    }

    let lambdas: Vec<f64> = mus.iter().map(|mu| 1.0 / mu).collect(); // descending
    let mut o = Mat::zeros(dim, dim);
    for (i, u) in us.iter().enumerate() {
        o.set_col(i, u);
    }
    for (i, v) in vs.iter().enumerate() {
        o.set_col(n + i, v);
    }
    let mut d_ihalf = vec![0.0; dim];
    for i in 0..n {
        d_ihalf[i] = 1.0 / lambdas[i].sqrt();
        d_ihalf[n + i] = d_ihalf[i];
    }
    let s = Mat::diag(&d_ihalf).mul(&o.t()).mul(&m_half);
    Ok((SymplecticMatrix::new(s)?, lambdas))
}

/// Symplectic Cayley transform `M_S = ½ J (S + I)(S - I)⁻¹`.
///
/// Symmetric whenever `S` is symplectic with `det(S - I) ≠ 0`; the returned
/// matrix is symmetrized and certified to 1e-9.
pub fn symplectic_cayley(s: &SymplecticMatrix) -> Result<Mat> {
    let dim = 2 * s.n;
    let eye = Mat::eye(dim);
    let sm = s.mat.sub(&eye);
    let det = sm.det();
    if det.abs() < 1e-12 {
        return Err(Error::SingularFlow(det));
    }
    let inv = sm.inverse().ok_or(Error::SingularFlow(det))?;
    let ms = j_matrix(s.n).mul(&s.mat.add(&eye)).mul(&inv).scale(0.5);
    let defect = ms.symmetry_defect();
    if defect >= 1e-9 * ms.norm_max().max(1.0) {
        return Err(Error::NotSymmetric(defect));
    }
    Ok(ms.symmetrized())
}

/// Generating-function data of a free symplectic matrix: with blocks
/// `S = [[A, B], [C, D]]` and `det B ≠ 0`,
/// `W(x, x') = ½ P x·x - (L x)·x' + ½ Q x'·x'` where `P = DB⁻¹`, `L = B⁻¹`,
/// `Q = B⁻¹A`. `maslov` is the caller-declared branch integer mod 4.
#[derive(Debug, Clone)]
pub struct FreeDecomposition {
    pub p: Mat,
    pub l: Mat,
    pub q: Mat,
    pub det_b: f64,
    pub maslov: i32,
}

impl FreeDecomposition {
    /// `W(x, x')`.
    pub fn eval(&self, x: &[f64], xp: &[f64]) -> f64 {
        let px = self.p.matvec(x);
        let lx = self.l.matvec(x);
        let qxp = self.q.matvec(xp);
        let mut w = 0.0;
        for i in 0..x.len() {
            w += 0.5 * x[i] * px[i] - xp[i] * lx[i] + 0.5 * xp[i] * qxp[i];
        }
        w
    }

    /// Data of the inverse operator: `W*(x, x') = -W(x', x)`, Maslov
    /// `m* = N - m`.
    pub fn inverse_data(&self) -> FreeDecomposition {
        let n = self.p.nrows() as i32;
        FreeDecomposition {
            p: self.q.scale(-1.0),
            l: self.l.t().scale(-1.0),
            q: self.p.scale(-1.0),
            det_b: self.det_b * if n % 2 == 0 { 1.0 } else { -1.0 },
            maslov: (n - self.maslov).rem_euclid(4),
        }
    }

    /// Number of negative eigenvalues of the Hessian block `W_xx = P`.
    pub fn inert_wxx(&self) -> i32 {
        let (ev, _) = sym_eigen(&self.p);
        ev.iter().filter(|&&v| v < -1e-12).count() as i32
    }
}

/// Extract the generating-function data of `S`; errors when `det B ≈ 0`.
///
/// The default Maslov branch is `arg det B ∈ [0, 2π)`: `m = 0` for
/// `det B > 0`, `m = 1` for `det B < 0`. Pass `Some(m)` to override.
pub fn free_decomposition(
    s: &SymplecticMatrix,
    maslov: Option<i32>,
) -> Result<FreeDecomposition> {
    let b = s.block(0, 1);
    let det_b = b.det();
    if det_b.abs() < 1e-10 {
        return Err(Error::NotFree(det_b));
    }
    let l = b.inverse().ok_or(Error::NotFree(det_b))?;
    let p = s.block(1, 1).mul(&l);
    let q = l.mul(&s.block(0, 0));
    let m = maslov.unwrap_or(if det_b > 0.0 { 0 } else { 1 }).rem_euclid(4);
    Ok(FreeDecomposition { p: p.symmetrized(), l, q: q.symmetrized(), det_b, maslov: m })
}

/// Phase-space ellipsoid `W_M : M z·z ≤ ħ` with `M` symmetric positive
/// definite; the covariance matrix of the matching Gaussian is
/// `Σ = (ħ/2) M⁻¹`.
#[derive(Debug, Clone)]
pub struct WignerEllipsoid {
    m: Mat,
    hbar: f64,
}

impl WignerEllipsoid {
    pub fn new(m: Mat, hbar: f64) -> Result<WignerEllipsoid> {
        if !(hbar > 0.0) {
            return Err(Error::NonPositiveHbar);
        }
        if m.nrows() != m.ncols() || m.nrows() % 2 != 0 {
            return Err(Error::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
        }
        let d = m.symmetry_defect();
        if d >= 1e-10 * m.norm_max().max(1.0) {
            return Err(Error::NotSymmetric(d));
        }
        let msym = m.symmetrized();
        let (ev, _) = sym_eigen(&msym);
        if ev[0] <= 0.0 {
            return Err(Error::NotPositiveDefinite(ev[0]));
        }
        Ok(WignerEllipsoid { m: msym, hbar })
    }

    pub fn matrix(&self) -> &Mat {
        &self.m
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn covariance(&self) -> Mat {
        self.m.inverse().expect("positive definite").scale(self.hbar / 2.0)
    }
}

/// Symplectic capacity (Gromov width) of the ellipsoid: `πħ / λ_max` with
/// `λ_max` the largest Williamson eigenvalue of `M`. The quantum-blob
/// criterion is `capacity ≥ πħ`.
pub fn capacity(e: &WignerEllipsoid) -> Result<f64> {
    let (_, lambdas) = williamson(&e.m)?;
    Ok(PI * e.hbar / lambdas[0])
}

/// Uncertainty-principle test: all eigenvalues of the Hermitian matrix
/// `Σ + i(ħ/2)J` must be ≥ -1e-10. Returns the verdict together with the
/// diagnostic eigenvalues (ascending).
pub fn uncertainty_check(sigma: &Mat, hbar: f64) -> Result<(bool, Vec<f64>)> {
    if sigma.nrows() != sigma.ncols() || sigma.nrows() % 2 != 0 {
        return Err(Error::DimensionMismatch { expected: sigma.nrows(), got: sigma.ncols() });
    }
    let d = sigma.symmetry_defect();
    if d >= 1e-9 * sigma.norm_max().max(1.0) {
        return Err(Error::NotSymmetric(d));
    }
    let n = sigma.nrows() / 2;
    let im = j_matrix(n).scale(hbar / 2.0);
    let evals = hermitian_eigenvalues(&sigma.symmetrized(), &im);
    let ok = evals.iter().all(|&v| v >= -1e-10);
    Ok((ok, evals))
}

/// Random well-conditioned symplectic matrix: a product of symplectic
/// shears, block dilations, and `J` factors. `kick` bounds the shear and
/// dilation magnitudes.
pub fn random_symplectic(rng: &mut Rng, n: usize, kick: f64) -> SymplecticMatrix {
    let dim = 2 * n;
    let mut s = Mat::eye(dim);
    for round in 0..3 {
        // lower shear [[I, 0], [C, I]] with C symmetric
        let mut shear = Mat::eye(dim);
        for i in 0..n {
            for j in 0..=i {
                let v = rng.range(-kick, kick);
                shear[(n + i, j)] = v;
                shear[(n + j, i)] = v;
            }
        }
        s = shear.mul(&s);
        // block dilation diag(E, E⁻ᵀ)
        let mut e = Mat::eye(n);
        for i in 0..n {
            for j in 0..n {
                e[(i, j)] += if i == j { rng.range(-kick, kick) } else { rng.range(-kick, kick) / 2.0 };
            }
        }
        if let Some(einv) = e.inverse() {
            let eit = einv.t();
            let mut dil = Mat::zeros(dim, dim);
            for i in 0..n {
                for j in 0..n {
                    dil[(i, j)] = e[(i, j)];
                    dil[(n + i, n + j)] = eit[(i, j)];
                }
            }
            s = dil.mul(&s);
        }
        if round % 2 == 0 {
            s = j_matrix(n).mul(&s);
        }
    }
    SymplecticMatrix::new(s).expect("product of symplectic factors")
}

/// Random symmetric positive definite matrix with eigenvalues in
/// `[lo, hi]`, built from a random orthogonal basis.
pub fn random_spd(rng: &mut Rng, dim: usize, lo: f64, hi: f64) -> Mat {
    let mut g = Mat::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..=i {
            let v = rng.normal();
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    let (_, q) = sym_eigen(&g);
    let evals: Vec<f64> = (0..dim).map(|_| rng.range(lo, hi)).collect();
    q.mul(&Mat::diag(&evals)).mul(&q.t()).symmetrized()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn form_is_antisymmetric_and_matches_matrix_version() {
        let z = [1.5, -0.3, 0.7, 2.1];
        let zp = [0.2, 1.1, -0.9, 0.4];
        let w = symplectic_form(&z, &zp).unwrap();
        assert!((w + symplectic_form(&zp, &z).unwrap()).abs() < 1e-15);
        assert!(symplectic_form(&z, &z).unwrap().abs() < 1e-15);
        // (z')ᵀ J z
        let j = j_matrix(2);
        let jz = j.matvec(&z);
        let want: f64 = zp.iter().zip(&jz).map(|(a, b)| a * b).sum();
        assert!((w - want).abs() < 1e-15);
    }

    #[test]
    fn form_unit_vectors() {
        // z = (1, 0), z' = (0, 1): p·x' - p'·x = -1
        let w = symplectic_form(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert!((w + 1.0).abs() < 1e-15);
    }

    #[test]
    fn symplectic_matrices_preserve_the_form() {
        let mut rng = Rng::new(7);
        for n in 1..=3usize {
            let s = random_symplectic(&mut rng, n, 0.4);
            let z: Vec<f64> = (0..2 * n).map(|_| rng.normal()).collect();
            let zp: Vec<f64> = (0..2 * n).map(|_| rng.normal()).collect();
            let lhs = symplectic_form(&s.apply(&z), &s.apply(&zp)).unwrap();
            let rhs = symplectic_form(&z, &zp).unwrap();
            assert!((lhs - rhs).abs() < 1e-10, "n={n}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn membership_examples() {
        assert!(is_symplectic(&j_matrix(1), 1e-10).unwrap());
        assert!(is_symplectic(&Mat::diag(&[2.0, 0.5]), 1e-10).unwrap());
        assert!(!is_symplectic(&Mat::diag(&[2.0, 2.0]), 1e-10).unwrap());
        assert!(is_symplectic(&Mat::eye(3), 1e-10).is_err());
    }

    #[test]
    fn williamson_identity_and_diagonals() {
        let (s, l) = williamson(&Mat::eye(2)).unwrap();
        assert!((l[0] - 1.0).abs() < 1e-12);
        let d = Mat::diag(&[l[0], l[0]]);
        let recon = s.mat().t().mul(&d).mul(s.mat());
        assert!(recon.sub(&Mat::eye(2)).norm_max() < 1e-10);

        let (_, l) = williamson(&Mat::diag(&[4.0, 1.0])).unwrap();
        assert!((l[0] - 2.0).abs() < 1e-12, "eigenvalues of JM are ±2i, got {}", l[0]);

        let (_, l) = williamson(&Mat::diag(&[2.0, 0.5])).unwrap();
        assert!((l[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn williamson_reconstructs_random_matrices() {
        let mut rng = Rng::new(42);
        for n in 1..=3usize {
            for _ in 0..25 {
                let m = random_spd(&mut rng, 2 * n, 0.2, 5.0);
                let (s, l) = williamson(&m).unwrap();
                let mut d = vec![0.0; 2 * n];
                for i in 0..n {
                    d[i] = l[i];
                    d[n + i] = l[i];
                }
                let recon = s.mat().t().mul(&Mat::diag(&d)).mul(s.mat());
                let res = recon.sub(&m).norm_max();
                assert!(res < 1e-9, "n={n} residual {res:.3e}");
                assert!(l.windows(2).all(|w| w[0] >= w[1] - 1e-12), "descending");
            }
        }
    }

    #[test]
    fn cayley_of_minus_identity_vanishes() {
        let s = SymplecticMatrix::new(Mat::diag(&[-1.0, -1.0])).unwrap();
        let ms = symplectic_cayley(&s).unwrap();
        assert!(ms.norm_max() < 1e-12);
    }

    #[test]
    fn cayley_of_rotation_is_half_cotangent() {
        for &theta in &[0.4f64, 1.1, 2.0, 2.9] {
            let s = ho_rotation(theta);
            let ms = symplectic_cayley(&s).unwrap();
            let want = 0.5 / (theta / 2.0).tan();
            assert!((ms[(0, 0)] - want).abs() < 1e-10, "theta={theta}");
            assert!((ms[(1, 1)] - want).abs() < 1e-10);
            assert!(ms[(0, 1)].abs() < 1e-10);
            // det(S_t - I) = 2(1 - cos θ) = 4 sin²(θ/2)
            let det = s.mat().sub(&Mat::eye(2)).det();
            assert!((det - 4.0 * (theta / 2.0).sin().powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn cayley_quadratic_form_identity() {
        // M_S z·z = (S - I)⁻¹ z ∧ z
        let mut rng = Rng::new(3);
        let s = ho_rotation(1.23);
        let ms = symplectic_cayley(&s).unwrap();
        let inv = s.mat().sub(&Mat::eye(2)).inverse().unwrap();
        for _ in 0..20 {
            let z = [rng.normal(), rng.normal()];
            let msz = ms.matvec(&z);
            let lhs: f64 = z.iter().zip(&msz).map(|(a, b)| a * b).sum();
            let rhs = symplectic_form(&inv.matvec(&z), &z).unwrap();
            assert!((lhs - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn free_decomposition_of_j() {
        let s = SymplecticMatrix::new(j_matrix(1)).unwrap();
        let f = free_decomposition(&s, None).unwrap();
        assert!(f.p.norm_max() < 1e-12);
        assert!(f.q.norm_max() < 1e-12);
        assert!((f.l[(0, 0)] - 1.0).abs() < 1e-12);
        // W(x, x') = -x·x'
        assert!((f.eval(&[2.0], &[3.0]) + 6.0).abs() < 1e-12);
        assert_eq!(f.maslov, 0);
    }

    #[test]
    fn free_decomposition_of_rotation_matches_principal_function() {
        let theta: f64 = 0.9;
        let s = ho_rotation(theta);
        let f = free_decomposition(&s, None).unwrap();
        for (x, xp) in [(1.0, 0.5), (-0.7, 1.3), (2.0, -2.0)] {
            let want = ((x * x + xp * xp) * theta.cos() - 2.0 * x * xp) / (2.0 * theta.sin());
            assert!((f.eval(&[x], &[xp]) - want).abs() < 1e-10);
        }
    }

    #[test]
    fn identity_is_not_free() {
        let s = SymplecticMatrix::identity(1);
        assert!(matches!(free_decomposition(&s, None), Err(Error::NotFree(_))));
    }

    #[test]
    fn inverse_data_roundtrip() {
        let f = free_decomposition(&ho_rotation(0.7), None).unwrap();
        let g = f.inverse_data().inverse_data();
        assert!(f.p.sub(&g.p).norm_max() < 1e-12);
        assert!(f.l.sub(&g.l).norm_max() < 1e-12);
        assert!(f.q.sub(&g.q).norm_max() < 1e-12);
        assert_eq!(f.maslov, g.maslov);
    }

    #[test]
    fn capacity_examples() {
        let hbar = 1.0;
        let e = WignerEllipsoid::new(Mat::eye(2), hbar).unwrap();
        assert!((capacity(&e).unwrap() - PI).abs() < 1e-12);
        let e = WignerEllipsoid::new(Mat::eye(2).scale(2.0), hbar).unwrap();
        assert!((capacity(&e).unwrap() - PI / 2.0).abs() < 1e-12);
        let e = WignerEllipsoid::new(Mat::diag(&[2.0, 0.5]), hbar).unwrap();
        assert!((capacity(&e).unwrap() - PI).abs() < 1e-12);
    }

    #[test]
    fn capacity_is_symplectically_invariant() {
        let mut rng = Rng::new(11);
        for _ in 0..30 {
            let m = random_spd(&mut rng, 4, 0.3, 4.0);
            let s = random_symplectic(&mut rng, 2, 0.4);
            let m2 = s.mat().t().mul(&m).mul(s.mat()).symmetrized();
            let c1 = capacity(&WignerEllipsoid::new(m.clone(), 1.0).unwrap()).unwrap();
            let c2 = capacity(&WignerEllipsoid::new(m2, 1.0).unwrap()).unwrap();
            assert!((c1 - c2).abs() < 1e-9 * c1, "{c1} vs {c2}");
        }
    }

    #[test]
    fn uncertainty_boundary_cases() {
        let hbar = 1.0;
        // Σ = (ħ/2) I passes at the boundary with eigenvalues {0, ħ}
        let (ok, ev) = uncertainty_check(&Mat::eye(2).scale(0.5), hbar).unwrap();
        assert!(ok);
        assert!(ev[0].abs() < 1e-12 && (ev[1] - 1.0).abs() < 1e-12);
        // Σ = (ħ/4) I fails with eigenvalue -ħ/4
        let (ok, ev) = uncertainty_check(&Mat::eye(2).scale(0.25), hbar).unwrap();
        assert!(!ok);
        assert!((ev[0] + 0.25).abs() < 1e-12);
        // saturating variances with nonzero correlation fail
        let sigma = Mat::from_rows(&[&[0.5, 0.25], &[0.25, 0.5]]);
        let (ok, _) = uncertainty_check(&sigma, hbar).unwrap();
        assert!(!ok);
    }

    #[test]
    fn uncertainty_matches_williamson_criterion() {
        // pass ⟺ all Williamson eigenvalues of (2/ħ)Σ are ≥ 1
        let mut rng = Rng::new(5);
        let hbar = 0.7;
        for _ in 0..50 {
            let sigma = random_spd(&mut rng, 4, 0.1, 1.2).scale(hbar);
            let (ok, _) = uncertainty_check(&sigma, hbar).unwrap();
            let (_, l) = williamson(&sigma.scale(2.0 / hbar)).unwrap();
            let ok_w = l.iter().all(|&v| v >= 1.0 - 1e-10);
            assert_eq!(ok, ok_w);
        }
    }
}
