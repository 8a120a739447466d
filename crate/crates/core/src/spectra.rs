//! Eigenvalue engines and spectral identities.
//!
//! * [`eig_symmetric`]: cyclic Jacobi rotations, used for every Hessian.
//! * [`eig_general`]: real Schur form (Hessenberg reduction + shifted QR) for
//!   the non-symmetric linearization matrices, with eigenvectors recovered by
//!   complex inverse iteration.
//! * [`ngon_spectrum_closed_form`]: the circulant spectrum of the N-gon
//!   Hessian evaluated through its generator polynomial.
//! * [`block_determinant`] and [`skew_inner`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::limit_potential::one_minus_cos;

const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenvalues of a matrix together with zero-count metadata.
///
/// Eigenvalues are sorted by `(re, im)` ascending. `zero_count` counts the
/// eigenvalues with `|λ| < tol_used · max(1, ρ)` where `ρ` is the spectral
/// radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<Complex64>,
    pub zero_count: usize,
    pub tol_used: f64,
    pub is_real_spectrum: bool,
}

impl SpectrumReport {
    pub fn from_real(values: &[f64], tol: f64) -> Self {
        let eig: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let mut report = Self::from_complex(eig, tol);
        report.is_real_spectrum = true;
        report
    }

    pub fn from_complex(mut eigenvalues: Vec<Complex64>, tol: f64) -> Self {
        eigenvalues.sort_by(cmp_complex);
        let radius = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let threshold = tol * radius.max(1.0);
        let zero_count = eigenvalues.iter().filter(|z| z.norm() < threshold).count();
        let is_real_spectrum = eigenvalues.iter().all(|z| z.im.abs() <= threshold);
        Self {
            eigenvalues,
            zero_count,
            tol_used: tol,
            is_real_spectrum,
        }
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Absolute magnitude below which an eigenvalue counts as zero.
    pub fn zero_threshold(&self) -> f64 {
        self.tol_used * self.spectral_radius().max(1.0)
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| z.re).collect()
    }

    /// `(negative, zero, positive)` counts by real part, with zeros decided
    /// by modulus against [`Self::zero_threshold`].
    pub fn sign_counts(&self) -> (usize, usize, usize) {
        let thr = self.zero_threshold();
        let mut counts = (0, 0, 0);
        for z in &self.eigenvalues {
            if z.norm() < thr {
                counts.1 += 1;
            } else if z.re < 0.0 {
                counts.0 += 1;
            } else {
                counts.2 += 1;
            }
        }
        counts
    }

    /// Eigenvalues that are not counted as zero.
    pub fn nonzero(&self) -> Vec<Complex64> {
        let thr = self.zero_threshold();
        self.eigenvalues
            .iter()
            .copied()
            .filter(|z| z.norm() >= thr)
            .collect()
    }
}

pub(crate) fn cmp_complex(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`, with its
    /// largest-magnitude component positive.
    pub vectors: DMatrix<f64>,
}

fn check_square(m: &DMatrix<f64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare(m.nrows(), m.ncols()));
    }
    Ok(m.nrows())
}

/// Cyclic Jacobi eigen-decomposition.
pub fn symmetric_eigen(s: &DMatrix<f64>) -> Result<SymmetricEigen> {
    let n = check_square(s)?;
    let scale = s.amax().max(1.0);
    let asym = (s - s.transpose()).amax();
    if asym > 1e-12 * scale {
        return Err(Error::NotSymmetric(asym));
    }
    let mut a = (s + s.transpose()) * 0.5;
    let mut v = DMatrix::<f64>::identity(n, n);
    let frob = a.norm();

    let mut converged = n < 2;
    for sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off == 0.0 || off.sqrt() <= 1e-3 * f64::EPSILON * frob {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                // Negligible against both diagonal entries: drop it.
                let g = 100.0 * apq.abs();
                if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    let nkp = c * akp - sn * akq;
                    let nkq = sn * akp + c * akq;
                    a[(k, p)] = nkp;
                    a[(p, k)] = nkp;
                    a[(k, q)] = nkq;
                    a[(q, k)] = nkq;
                }
                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::ConvergenceFailure(JACOBI_MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src).clone_owned();
        let imax = col.iamax();
        if col[imax] < 0.0 {
            col.neg_mut();
        }
        vectors.set_column(dst, &col);
    }
    Ok(SymmetricEigen { values, vectors })
}

/// Spectrum of a real symmetric matrix.
pub fn eig_symmetric(s: &DMatrix<f64>, tol: f64) -> Result<SpectrumReport> {
    let eig = symmetric_eigen(s)?;
    Ok(SpectrumReport::from_real(&eig.values, tol))
}

/// Complex eigenvalues of a general real square matrix.
pub fn general_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    let n = check_square(m)?;
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("non-finite matrix entry".into()));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    // No exceptional shifts in the QR sweep, so slow cases need a generous cap.
    let cap = (1000 * n).max(10_000);
    let schur = nalgebra::linalg::Schur::try_new(m.clone(), f64::EPSILON, cap)
        .ok_or(Error::ConvergenceFailure(cap))?;
    let mut ev: Vec<Complex64> = schur.complex_eigenvalues().iter().copied().collect();
    ev.sort_by(cmp_complex);
    Ok(ev)
}

/// Spectrum of a general real square matrix.
pub fn eig_general(m: &DMatrix<f64>, tol: f64) -> Result<SpectrumReport> {
    Ok(SpectrumReport::from_complex(general_eigenvalues(m)?, tol))
}

/// Unit eigenvector of `m` for the (approximate) eigenvalue `lambda`, by
/// inverse iteration in complex arithmetic. The largest-magnitude component
/// is made positive real.
pub fn general_eigenvector(m: &DMatrix<f64>, lambda: Complex64) -> Result<DVector<Complex64>> {
    let n = check_square(m)?;
    let scale = m.amax().max(1.0);
    let shift = lambda + Complex64::new(1e-13 * scale, 1e-13 * scale);
    let mut a: DMatrix<Complex64> = m.map(|x| Complex64::new(x, 0.0));
    for i in 0..n {
        a[(i, i)] -= shift;
    }
    let lu = a.lu();
    let mut x = DVector::from_fn(n, |i, _| {
        Complex64::new(1.0 + 0.1 * (i as f64 + 1.0).sqrt(), 0.0)
    });
    for _ in 0..3 {
        let y = lu.solve(&x).ok_or_else(|| {
            Error::InvalidArgument("inverse iteration hit an exactly singular system".into())
        })?;
        let norm = y.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::ConvergenceFailure(3));
        }
        x = y / Complex64::new(norm, 0.0);
    }
    Ok(normalize_phase(x))
}

fn normalize_phase(mut x: DVector<Complex64>) -> DVector<Complex64> {
    let imax = (0..x.len())
        .max_by(|&i, &j| x[i].norm().total_cmp(&x[j].norm()))
        .unwrap_or(0);
    if x.is_empty() || x[imax].norm() == 0.0 {
        return x;
    }
    let phase = x[imax].conj() / x[imax].norm();
    x.apply(|z| *z *= phase);
    x
}

/// First row `(a₀, …, a_{N−1})` of a circulant matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CirculantFirstRow {
    pub a: Vec<f64>,
}

impl CirculantFirstRow {
    /// First row of the limit-potential Hessian at the N-gon, with
    /// `a₀ = −Σ_{k≥1} a_k`.
    pub fn ngon_hessian(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidN(n, 2));
        }
        let mut a = vec![0.0; n];
        for (k, ak) in a.iter_mut().enumerate().skip(1) {
            let d = 2.0 * PI * k as f64 / n as f64;
            *ak = -d.cos() - 1.0 / (2.0 * one_minus_cos(d));
        }
        a[0] = -a[1..].iter().sum::<f64>();
        Ok(Self { a })
    }

    /// Generator polynomial `q(t) = Σ a_k t^k` at `t = ωʲ`, `ω = e^{2πi/N}`,
    /// for `j = 0, …, N−1`.
    pub fn generator_values(&self) -> Vec<Complex64> {
        let n = self.a.len();
        (0..n)
            .map(|j| {
                self.a
                    .iter()
                    .enumerate()
                    .map(|(k, &ak)| {
                        let phase = 2.0 * PI * ((j * k) % n) as f64 / n as f64;
                        Complex64::from_polar(ak, phase)
                    })
                    .sum()
            })
            .collect()
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let n = self.a.len();
        DMatrix::from_fn(n, n, |i, j| self.a[(j + n - i) % n])
    }
}

/// `b(j, N) = ½ Σ_{k=1}^{N−1} (1 − cos(2jkπ/N)) / (1 − cos(2kπ/N))`.
pub fn b_coefficient(j: usize, n: usize) -> f64 {
    0.5 * (1..n)
        .map(|k| {
            let num = one_minus_cos(2.0 * PI * ((j * k) % n) as f64 / n as f64);
            let den = one_minus_cos(2.0 * PI * k as f64 / n as f64);
            num / den
        })
        .sum::<f64>()
}

/// Closed-form eigenvalues `q(ωʲ)`, `j = 0, …, N−1`, of the N-gon Hessian:
/// `q(1) = 0`, `q(ω) = q(ω^{N−1}) = −½`, and `q(ωʲ) = b(j, N)` otherwise.
///
/// For `N = 2` the single nontrivial value is `q(−1)` from the generator
/// polynomial.
pub fn ngon_spectrum_closed_form(n: usize) -> Result<Vec<f64>> {
    match n {
        0 | 1 => Err(Error::InvalidN(n, 2)),
        2 => {
            let row = CirculantFirstRow::ngon_hessian(2)?;
            Ok(vec![0.0, row.a[0] - row.a[1]])
        }
        _ => Ok((0..n)
            .map(|j| match j {
                0 => 0.0,
                1 => -0.5,
                j if j == n - 1 => -0.5,
                j => b_coefficient(j, n),
            })
            .collect()),
    }
}

/// The three evaluations of a 2n×2n block determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockDeterminants {
    /// `det M` from an LU factorization of the assembled matrix.
    pub direct: f64,
    /// `det(A) · det(D − C A⁻¹ B)`.
    pub via_a: f64,
    /// `det(D) · det(A − B D⁻¹ C)`.
    pub via_d: f64,
}

impl BlockDeterminants {
    pub fn max_relative_disagreement(&self) -> f64 {
        let vals = [self.direct, self.via_a, self.via_d];
        let scale = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in (i + 1)..3 {
                worst = worst.max((vals[i] - vals[j]).abs() / scale);
            }
        }
        worst
    }
}

fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Determinant of `[[A, B], [C, D]]` by direct factorization and by both
/// Schur complements.
pub fn block_determinant(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    c: &DMatrix<f64>,
    d: &DMatrix<f64>,
) -> Result<BlockDeterminants> {
    let n = check_square(a)?;
    for (name, m) in [("B", b), ("C", c), ("D", d)] {
        if m.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "block {name} is {}x{}, expected {n}x{n}",
                m.nrows(),
                m.ncols()
            )));
        }
    }
    for m in [a, d] {
        let cond = condition_number(m);
        if !(cond < 1e12) {
            return Err(Error::SingularBlock(cond));
        }
    }
    let mut full = DMatrix::zeros(2 * n, 2 * n);
    full.view_mut((0, 0), (n, n)).copy_from(a);
    full.view_mut((0, n), (n, n)).copy_from(b);
    full.view_mut((n, 0), (n, n)).copy_from(c);
    full.view_mut((n, n), (n, n)).copy_from(d);
    let direct = full.lu().determinant();

    let lu_a = a.clone().lu();
    let a_inv_b = lu_a.solve(b).ok_or(Error::SingularBlock(f64::INFINITY))?;
    let via_a = lu_a.determinant() * (d - c * a_inv_b).determinant();

    let lu_d = d.clone().lu();
    let d_inv_c = lu_d.solve(c).ok_or(Error::SingularBlock(f64::INFINITY))?;
    let via_d = lu_d.determinant() * (a - b * d_inv_c).determinant();

    Ok(BlockDeterminants {
        direct,
        via_a,
        via_d,
    })
}

/// Skew inner product `Ω(v, w) = vᵀ J w` with `J = [[0, −I], [I, 0]]`.
///
/// No complex conjugation is applied to `v`.
pub fn skew_inner(v: &[Complex64], w: &[Complex64]) -> Result<Complex64> {
    if v.len() != w.len() || !v.len().is_multiple_of(2) || v.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "skew product needs equal even lengths, got {} and {}",
            v.len(),
            w.len()
        )));
    }
    let n = v.len() / 2;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        acc += -v[k] * w[n + k] + v[n + k] * w[k];
    }
    Ok(acc)
}
