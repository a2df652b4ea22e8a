//! Dense complex linear algebra for the small matrices used throughout:
//! Hermitian eigendecomposition (cyclic Jacobi), LU solve/determinant and
//! general eigenvalues (shifted QR) for n-by-n complex matrices.

use num_complex::Complex64;

use crate::error::{CfsError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    pub n: usize,
    // row-major
    data: Vec<Complex64>,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n));
        CMatrix {
            n,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn from_spin(m: &crate::dirac::SpinMatrix) -> Self {
        let mut out = CMatrix::zeros(4);
        for i in 0..4 {
            for j in 0..4 {
                out[(i, j)] = m.0[i][j];
            }
        }
        out
    }

    pub fn adjoint(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for l in 0..n {
                let a = self[(i, l)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(l, j)];
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a -= b;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn hermitian_defect(&self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                d = d.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        d
    }

    fn off_diagonal_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s += self[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, `vectors[l]` matching `values[l]`.
    pub vectors: Vec<Vec<Complex64>>,
}

/// Cyclic complex Jacobi iteration. The input must be Hermitian up to
/// roundoff; the Hermitian average is what gets diagonalized.
pub fn hermitian_eigen(a: &CMatrix) -> Result<HermitianEigen> {
    let n = a.n;
    let mut h = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] = (a[(i, j)] + a[(j, i)].conj()) * Complex64::new(0.5, 0.0);
        }
    }
    let mut v = CMatrix::identity(n);
    let scale = h.max_abs().max(1e-300);
    let tol = 1e-15 * scale;
    let max_sweeps = 60;
    for sweep in 0..max_sweeps {
        let off = h.off_diagonal_norm();
        if off <= tol * (n as f64) {
            break;
        }
        if sweep == max_sweeps - 1 {
            return Err(CfsError::EigenFailure {
                iterations: max_sweeps,
                residual: off,
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = h[(p, q)];
                if apq.norm() <= tol * 1e-2 {
                    continue;
                }
                let app = h[(p, p)].re;
                let aqq = h[(q, q)].re;
                // Factor the phase: A restricted to (p, q) equals
                // D B D^H with D = diag(e^{i phi}, 1) and B real symmetric,
                // then rotate B by the real Jacobi angle. The combined
                // unitary is U = D R = [[c e^{i phi}, -s e^{i phi}], [s, c]].
                let abs_apq = apq.norm();
                let phase = apq / abs_apq;
                let theta = 0.5 * (2.0 * abs_apq).atan2(app - aqq);
                let (s, c) = theta.sin_cos();
                let u00 = phase * c;
                let u01 = -(phase * s);
                let u10 = Complex64::new(s, 0.0);
                let u11 = Complex64::new(c, 0.0);
                // rows: U^H A
                for j in 0..n {
                    let hpj = h[(p, j)];
                    let hqj = h[(q, j)];
                    h[(p, j)] = u00.conj() * hpj + u10.conj() * hqj;
                    h[(q, j)] = u01.conj() * hpj + u11.conj() * hqj;
                }
                // columns: A U, and accumulate V U
                for i in 0..n {
                    let hip = h[(i, p)];
                    let hiq = h[(i, q)];
                    h[(i, p)] = hip * u00 + hiq * u10;
                    h[(i, q)] = hip * u01 + hiq * u11;
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * u00 + viq * u10;
                    v[(i, q)] = vip * u01 + viq * u11;
                }
                h[(p, q)] = ZERO;
                h[(q, p)] = ZERO;
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let vals: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
    order.sort_by(|&i, &j| vals[j].partial_cmp(&vals[i]).unwrap());
    let values = order.iter().map(|&i| vals[i]).collect();
    let vectors = order
        .iter()
        .map(|&l| (0..n).map(|i| v[(i, l)]).collect())
        .collect();
    Ok(HermitianEigen { values, vectors })
}

/// Operator 2-norm, computed as the square root of the largest eigenvalue
/// of A^dag A.
pub fn operator_norm(a: &CMatrix) -> f64 {
    let ata = a.adjoint().mul(a);
    match hermitian_eigen(&ata) {
        Ok(e) => e.values.first().copied().unwrap_or(0.0).max(0.0).sqrt(),
        Err(_) => a.max_abs() * a.n as f64, // crude upper bound fallback
    }
}

/// LU decomposition with partial pivoting; returns the determinant.
pub fn determinant(a: &CMatrix) -> Complex64 {
    let n = a.n;
    if n == 0 {
        return ONE;
    }
    let mut lu = a.clone();
    let mut det = ONE;
    for col in 0..n {
        let mut piv = col;
        let mut best = lu[(col, col)].norm();
        for r in (col + 1)..n {
            let v = lu[(r, col)].norm();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 {
            return ZERO;
        }
        if piv != col {
            for j in 0..n {
                let tmp = lu[(col, j)];
                lu[(col, j)] = lu[(piv, j)];
                lu[(piv, j)] = tmp;
            }
            det = -det;
        }
        det *= lu[(col, col)];
        for r in (col + 1)..n {
            let f = lu[(r, col)] / lu[(col, col)];
            lu[(r, col)] = f;
            for j in (col + 1)..n {
                let sub = f * lu[(col, j)];
                lu[(r, j)] -= sub;
            }
        }
    }
    det
}

/// Solve A x = b by LU with partial pivoting.
pub fn solve(a: &CMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = a.n;
    assert_eq!(b.len(), n);
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let mut piv = col;
        let mut best = lu[(col, col)].norm();
        for r in (col + 1)..n {
            let v = lu[(r, col)].norm();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best < 1e-300 {
            return Err(CfsError::NonApproximatingSet);
        }
        if piv != col {
            perm.swap(piv, col);
            for j in 0..n {
                let tmp = lu[(col, j)];
                lu[(col, j)] = lu[(piv, j)];
                lu[(piv, j)] = tmp;
            }
        }
        for r in (col + 1)..n {
            let f = lu[(r, col)] / lu[(col, col)];
            lu[(r, col)] = f;
            for j in (col + 1)..n {
                let sub = f * lu[(col, j)];
                lu[(r, j)] -= sub;
            }
        }
    }
    let mut y = vec![ZERO; n];
    for i in 0..n {
        let mut s = b[perm[i]];
        for j in 0..i {
            s -= lu[(i, j)] * y[j];
        }
        y[i] = s;
    }
    let mut x = vec![ZERO; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for j in (i + 1)..n {
            s -= lu[(i, j)] * x[j];
        }
        x[i] = s / lu[(i, i)];
    }
    Ok(x)
}

/// Condition number estimate in the 2-norm via eigenvalues of A^dag A.
pub fn condition_number(a: &CMatrix) -> f64 {
    let ata = a.adjoint().mul(a);
    match hermitian_eigen(&ata) {
        Ok(e) => {
            let max = e.values.first().copied().unwrap_or(0.0).max(0.0);
            let min = e.values.last().copied().unwrap_or(0.0).max(0.0);
            if min == 0.0 {
                f64::INFINITY
            } else {
                (max / min).sqrt()
            }
        }
        Err(_) => f64::INFINITY,
    }
}

/// Eigenvalues of a general complex matrix by Hessenberg reduction followed
/// by Wilkinson-shifted QR iteration with deflation.
pub fn general_eigenvalues(a: &CMatrix) -> Result<Vec<Complex64>> {
    let n = a.n;
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![a[(0, 0)]]);
    }
    let mut h = a.clone();
    hessenberg(&mut h);
    let scale = h.max_abs().max(1e-300);
    let tol = 1e-14 * scale;
    let mut eigs = Vec::with_capacity(n);
    let mut hi = n; // active block is rows/cols [0, hi)
    let mut iters_since_deflation = 0usize;
    let max_total = 40 * n * n + 200;
    let mut total = 0usize;
    while hi > 0 {
        if hi == 1 {
            eigs.push(h[(0, 0)]);
            hi = 0;
            continue;
        }
        // look for a negligible subdiagonal entry to deflate
        let mut split = None;
        for i in (1..hi).rev() {
            let sub = h[(i, i - 1)].norm();
            if sub <= tol.max(1e-16 * (h[(i, i)].norm() + h[(i - 1, i - 1)].norm())) {
                split = Some(i);
                break;
            }
        }
        if let Some(i) = split {
            if i == hi - 1 {
                eigs.push(h[(hi - 1, hi - 1)]);
                hi -= 1;
                iters_since_deflation = 0;
                continue;
            }
            if i == hi - 2 {
                let (l1, l2) = eig2(
                    h[(hi - 2, hi - 2)],
                    h[(hi - 2, hi - 1)],
                    h[(hi - 1, hi - 2)],
                    h[(hi - 1, hi - 1)],
                );
                eigs.push(l1);
                eigs.push(l2);
                hi -= 2;
                iters_since_deflation = 0;
                continue;
            }
        }
        total += 1;
        iters_since_deflation += 1;
        if total > max_total {
            return Err(CfsError::EigenFailure {
                iterations: total,
                residual: h[(hi - 1, hi - 2)].norm(),
            });
        }
        // Wilkinson shift from the trailing 2x2 block; occasional ad-hoc shift
        // to break symmetry stalls.
        let shift = if iters_since_deflation % 12 == 11 {
            Complex64::new(
                1.0 + h[(hi - 1, hi - 2)].norm(),
                0.5 * h[(hi - 1, hi - 1)].norm(),
            )
        } else {
            let (l1, l2) = eig2(
                h[(hi - 2, hi - 2)],
                h[(hi - 2, hi - 1)],
                h[(hi - 1, hi - 2)],
                h[(hi - 1, hi - 1)],
            );
            let d = h[(hi - 1, hi - 1)];
            if (l1 - d).norm() <= (l2 - d).norm() {
                l1
            } else {
                l2
            }
        };
        qr_step(&mut h, hi, shift);
    }
    Ok(eigs)
}

fn eig2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let tr = a + d;
    let half = Complex64::new(0.5, 0.0);
    let disc = ((a - d) * (a - d) + b * c * Complex64::new(4.0, 0.0)).sqrt();
    (half * (tr + disc), half * (tr - disc))
}

fn hessenberg(h: &mut CMatrix) {
    let n = h.n;
    for col in 0..n.saturating_sub(2) {
        // Householder on the column below the subdiagonal
        let mut norm_sq = 0.0;
        for i in (col + 1)..n {
            norm_sq += h[(i, col)].norm_sqr();
        }
        let x0 = h[(col + 1, col)];
        let norm = norm_sq.sqrt();
        if norm < 1e-300 || (norm_sq - x0.norm_sqr()).sqrt() < 1e-300 {
            continue;
        }
        let alpha = if x0.norm() > 0.0 {
            -(x0 / x0.norm()) * norm
        } else {
            Complex64::new(-norm, 0.0)
        };
        let mut v: Vec<Complex64> = (0..n)
            .map(|i| if i <= col { ZERO } else { h[(i, col)] })
            .collect();
        v[col + 1] -= alpha;
        let vnorm_sq: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        if vnorm_sq < 1e-300 {
            continue;
        }
        let beta = 2.0 / vnorm_sq;
        // H = I - beta v v^dag ; apply H * A
        for j in 0..n {
            let mut s = ZERO;
            for i in (col + 1)..n {
                s += v[i].conj() * h[(i, j)];
            }
            s *= beta;
            for i in (col + 1)..n {
                let sub = v[i] * s;
                h[(i, j)] -= sub;
            }
        }
        // apply A * H
        for i in 0..n {
            let mut s = ZERO;
            for j in (col + 1)..n {
                s += h[(i, j)] * v[j];
            }
            s *= beta;
            for j in (col + 1)..n {
                let sub = s * v[j].conj();
                h[(i, j)] -= sub;
            }
        }
    }
}

fn qr_step(h: &mut CMatrix, hi: usize, shift: Complex64) {
    // explicit single-shift QR on the active Hessenberg block:
    // A - shift I = Q R (Givens), A <- R Q^H + shift I
    for i in 0..hi {
        let d = h[(i, i)] - shift;
        h[(i, i)] = d;
    }
    let mut rotations = Vec::with_capacity(hi - 1);
    for i in 0..(hi - 1) {
        let a = h[(i, i)];
        let b = h[(i + 1, i)];
        let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (c, s) = if r < 1e-300 {
            (ONE, ZERO)
        } else {
            (a.conj() / r, b.conj() / r)
        };
        // G = [[c, s], [-conj(s), conj(c)]] on rows i, i+1
        for j in i..hi {
            let x = h[(i, j)];
            let y = h[(i + 1, j)];
            h[(i, j)] = c * x + s * y;
            h[(i + 1, j)] = -s.conj() * x + c.conj() * y;
        }
        rotations.push((c, s));
    }
    for (i, (c, s)) in rotations.iter().enumerate() {
        // right-multiply by G_i^H = [[conj(c), -s], [conj(s), c]] on columns i, i+1
        let top = (i + 2).min(hi);
        for r in 0..top {
            let x = h[(r, i)];
            let y = h[(r, i + 1)];
            h[(r, i)] = x * c.conj() + y * s.conj();
            h[(r, i + 1)] = -(x * *s) + y * *c;
        }
    }
    for i in 0..hi {
        let d = h[(i, i)] + shift;
        h[(i, i)] = d;
    }
}
