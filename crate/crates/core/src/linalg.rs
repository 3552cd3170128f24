//! Minimal dense linear algebra for the SDP solver: square matrices,
//! Cholesky factorization, and a symmetric eigendecomposition
//! (Householder tridiagonalization followed by implicit-shift QL).
//!
//! Everything is column-count-agnostic row-major `Vec<f64>` storage; the
//! matrices involved stay well below 100 x 100, so cache games are not
//! worth their complexity here.

use alloc::vec;
use alloc::vec::Vec;

use libm::{fabs, hypot, sqrt};

/// Dense square matrix, row-major.
#[derive(Clone, PartialEq, Debug)]
pub struct Mat {
    n: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Mat {
        Mat {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Mat {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    pub fn add_scaled(&mut self, other: &Mat, s: f64) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    /// Adds `s` to every diagonal entry.
    pub fn shift_diagonal(&mut self, s: f64) {
        for i in 0..self.n {
            self[(i, i)] += s;
        }
    }

    /// Frobenius inner product `<self, other> = sum_ij self_ij other_ij`.
    pub fn dot(&self, other: &Mat) -> f64 {
        debug_assert_eq!(self.n, other.n);
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn norm_fro(&self) -> f64 {
        sqrt(self.data.iter().map(|v| v * v).sum())
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        debug_assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a != 0.0 {
                    let orow = other.row(k);
                    let out_row = &mut out.data[i * n..(i + 1) * n];
                    for (o, &b) in out_row.iter_mut().zip(orow) {
                        *o += a * b;
                    }
                }
            }
        }
        out
    }

    /// Forces exact symmetry by averaging with the transpose.
    pub fn symmetrize(&mut self) {
        for i in 0..self.n {
            for j in 0..i {
                let avg = 0.5 * (self[(i, j)] + self[(j, i)]);
                self[(i, j)] = avg;
                self[(j, i)] = avg;
            }
        }
    }

    pub fn max_abs_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max(fabs(self[(i, j)] - self[(j, i)]));
            }
        }
        worst
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

impl core::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
/// Returns `None` when a pivot drops below `1e-13 * scale` (not PD).
pub fn cholesky(a: &Mat) -> Option<Mat> {
    let scale = (0..a.n()).map(|i| fabs(a[(i, i)])).fold(1.0f64, f64::max);
    cholesky_floor(a, 1e-13 * scale)
}

/// Cholesky with an explicit absolute pivot floor. A floor of zero accepts
/// any numerically positive definite matrix, however close to singular;
/// used for step acceptance where near-boundary iterates are legitimate.
pub fn cholesky_floor(a: &Mat, floor: f64) -> Option<Mat> {
    let n = a.n();
    let mut l = Mat::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[(i, j)];
            for k in 0..j {
                sum -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if sum <= floor {
                    return None;
                }
                l[(i, i)] = sqrt(sum);
            } else {
                l[(i, j)] = sum / l[(j, j)];
            }
        }
    }
    Some(l)
}

/// Solves `L y = b` for lower-triangular `L`.
pub fn solve_lower(l: &Mat, b: &[f64]) -> Vec<f64> {
    let n = l.n();
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            let c = l[(i, k)];
            y[i] -= c * y[k];
        }
        y[i] /= l[(i, i)];
    }
    y
}

/// Solves `L^T x = b` for lower-triangular `L`.
pub fn solve_lower_transpose(l: &Mat, b: &[f64]) -> Vec<f64> {
    let n = l.n();
    let mut x = b.to_vec();
    for i in (0..n).rev() {
        for k in i + 1..n {
            let c = l[(k, i)];
            x[i] -= c * x[k];
        }
        x[i] /= l[(i, i)];
    }
    x
}

/// Solves `(L L^T) x = b`.
pub fn cholesky_solve(l: &Mat, b: &[f64]) -> Vec<f64> {
    solve_lower_transpose(l, &solve_lower(l, b))
}

/// Computes `L^{-1} a L^{-T}` for symmetric `a`; used to reduce generalized
/// eigenvalue problems to standard ones.
pub fn congruence_inv(l: &Mat, a: &Mat) -> Mat {
    let n = l.n();
    // columns of T = L^{-1} A: solve L t = a_col for each column
    let mut t = Mat::zeros(n);
    for j in 0..n {
        let col: Vec<f64> = (0..n).map(|i| a[(i, j)]).collect();
        let sol = solve_lower(l, &col);
        for i in 0..n {
            t[(i, j)] = sol[i];
        }
    }
    // rows of B = T L^{-T}: B^T = L^{-1} T^T, solve per column of T^T (row of T)
    let mut out = Mat::zeros(n);
    for i in 0..n {
        let row: Vec<f64> = t.row(i).to_vec();
        let sol = solve_lower(l, &row);
        for j in 0..n {
            out[(i, j)] = sol[j];
        }
    }
    out.symmetrize();
    out
}

/// Eigendecomposition of a symmetric matrix: `a = Q diag(values) Q^T`,
/// eigenvalues ascending, eigenvectors in the columns of `q`.
#[derive(Clone, Debug)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub q: Mat,
}

impl SymEigen {
    pub fn min_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// Rebuilds `Q f(diag) Q^T`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Mat {
        let n = self.q.n();
        let mut out = Mat::zeros(n);
        for k in 0..n {
            let fv = f(self.values[k]);
            if fv == 0.0 {
                continue;
            }
            for i in 0..n {
                let qik = self.q[(i, k)];
                if qik == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += fv * qik * self.q[(j, k)];
                }
            }
        }
        out.symmetrize();
        out
    }
}

/// Symmetric eigendecomposition. The input is symmetrized first; QL failing
/// to converge (never observed at these sizes) is reported as `None`.
pub fn sym_eigen(a: &Mat) -> Option<SymEigen> {
    let n = a.n();
    if n == 0 {
        return Some(SymEigen {
            values: Vec::new(),
            q: Mat::zeros(0),
        });
    }
    let mut z = a.clone();
    z.symmetrize();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut z, &mut d, &mut e);
    if !tql2(&mut z, &mut d, &mut e) {
        return None;
    }
    // sort ascending, permuting eigenvector columns along
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
    let values: Vec<f64> = idx.iter().map(|&i| d[i]).collect();
    let mut q = Mat::zeros(n);
    for (new, &old) in idx.iter().enumerate() {
        for r in 0..n {
            q[(r, new)] = z[(r, old)];
        }
    }
    Some(SymEigen { values, q })
}

/// Householder reduction to tridiagonal form, accumulating the
/// transformation in `a` (EISPACK tred2).
fn tred2(a: &mut Mat, d: &mut [f64], e: &mut [f64]) {
    let n = a.n();
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let mut scale = 0.0;
            for k in 0..=l {
                scale += fabs(a[(i, k)]);
            }
            if scale == 0.0 {
                e[i] = a[(i, l)];
            } else {
                for k in 0..=l {
                    a[(i, k)] /= scale;
                    h += a[(i, k)] * a[(i, k)];
                }
                let f = a[(i, l)];
                let g = if f >= 0.0 { -sqrt(h) } else { sqrt(h) };
                e[i] = scale * g;
                h -= f * g;
                a[(i, l)] = f - g;
                let mut f_acc = 0.0;
                for j in 0..=l {
                    a[(j, i)] = a[(i, j)] / h;
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[(j, k)] * a[(i, k)];
                    }
                    for k in j + 1..=l {
                        g += a[(k, j)] * a[(i, k)];
                    }
                    e[j] = g / h;
                    f_acc += e[j] * a[(i, j)];
                }
                let hh = f_acc / (h + h);
                for j in 0..=l {
                    let f = a[(i, j)];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        let delta = f * e[k] + g * a[(i, k)];
                        a[(j, k)] -= delta;
                    }
                }
            }
        } else {
            e[i] = a[(i, l)];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for i in 0..n {
        if d[i] != 0.0 {
            for j in 0..i {
                let mut g = 0.0;
                for k in 0..i {
                    g += a[(i, k)] * a[(k, j)];
                }
                for k in 0..i {
                    let delta = g * a[(k, i)];
                    a[(k, j)] -= delta;
                }
            }
        }
        d[i] = a[(i, i)];
        a[(i, i)] = 1.0;
        for j in 0..i {
            a[(j, i)] = 0.0;
            a[(i, j)] = 0.0;
        }
    }
}

/// Implicit-shift QL on the tridiagonal (d, e), rotations accumulated into
/// the columns of `z` (EISPACK tql2). Returns false if an eigenvalue fails
/// to converge in 50 sweeps.
fn tql2(z: &mut Mat, d: &mut [f64], e: &mut [f64]) -> bool {
    let n = z.n();
    if n == 1 {
        return true;
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = fabs(d[m]) + fabs(d[m + 1]);
                if fabs(e[m]) <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return false;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = hypot(g, 1.0);
            let sign_r = if g >= 0.0 { fabs(r) } else { -fabs(r) };
            g = d[m] - d[l] + e[l] / (g + sign_r);
            let (mut s, mut c) = (1.0, 1.0);
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = z[(k, i + 1)];
                    z[(k, i + 1)] = s * z[(k, i)] + c * f;
                    z[(k, i)] = c * z[(k, i)] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(eig: &SymEigen) -> Mat {
        eig.map(|x| x)
    }

    #[test]
    fn cholesky_solves() {
        // SPD matrix built as B B^T + I
        let b = Mat::from_fn(4, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0);
        let mut a = Mat::zeros(4);
        for i in 0..4 {
            for j in 0..4 {
                let mut s = 0.0;
                for k in 0..4 {
                    s += b[(i, k)] * b[(j, k)];
                }
                a[(i, j)] = s;
            }
        }
        a.shift_diagonal(1.0);
        let l = cholesky(&a).unwrap();
        let rhs = vec![1.0, -2.0, 0.5, 3.0];
        let x = cholesky_solve(&l, &rhs);
        let ax = a.mul_vec(&x);
        for (got, want) in ax.iter().zip(&rhs) {
            assert!((got - want).abs() < 1e-10);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let mut a = Mat::identity(3);
        a[(2, 2)] = -1.0;
        assert!(cholesky(&a).is_none());
    }

    #[test]
    fn eigen_diagonal() {
        let mut a = Mat::zeros(3);
        a[(0, 0)] = 3.0;
        a[(1, 1)] = -1.0;
        a[(2, 2)] = 2.0;
        let eig = sym_eigen(&a).unwrap();
        assert!((eig.values[0] + 1.0).abs() < 1e-12);
        assert!((eig.values[1] - 2.0).abs() < 1e-12);
        assert!((eig.values[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_known_2x2() {
        // [[2, 1], [1, 2]] has eigenvalues 1 and 3
        let a = Mat::from_fn(2, |i, j| if i == j { 2.0 } else { 1.0 });
        let eig = sym_eigen(&a).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-12);
        assert!((eig.values[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_reconstructs_random_symmetric() {
        // deterministic pseudo-random fill
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for n in [1usize, 2, 5, 10, 23] {
            let mut a = Mat::zeros(n);
            for i in 0..n {
                for j in 0..=i {
                    let v = next();
                    a[(i, j)] = v;
                    a[(j, i)] = v;
                }
            }
            let eig = sym_eigen(&a).unwrap();
            let back = reconstruct(&eig);
            let mut worst = 0.0f64;
            for i in 0..n {
                for j in 0..n {
                    worst = worst.max((back[(i, j)] - a[(i, j)]).abs());
                }
            }
            assert!(worst < 1e-10, "n={n}: reconstruction error {worst}");
            // Q orthogonal
            for c1 in 0..n {
                for c2 in 0..n {
                    let dot: f64 = (0..n).map(|r| eig.q[(r, c1)] * eig.q[(r, c2)]).sum();
                    let want = if c1 == c2 { 1.0 } else { 0.0 };
                    assert!((dot - want).abs() < 1e-10);
                }
            }
            // trace preserved
            let tr: f64 = eig.values.iter().sum();
            assert!((tr - a.trace()).abs() < 1e-9);
        }
    }

    #[test]
    fn congruence_matches_direct() {
        let a = Mat::from_fn(3, |i, j| if i == j { 4.0 } else { 1.0 });
        let l = cholesky(&a).unwrap();
        // L^{-1} A L^{-T} must be the identity when A = L L^T
        let c = congruence_inv(&l, &a);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((c[(i, j)] - want).abs() < 1e-12);
            }
        }
    }
}
