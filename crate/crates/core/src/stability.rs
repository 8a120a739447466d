//! Linear stability of continued relative equilibria.
//!
//! The reduced system keeps the weak vortices only (the strong vortex follows
//! from the center of vorticity) and is written in the frame rotating at the
//! equilibrium's `ω`. Coordinates are `(r₁, …, r_N, θ₁, …, θ_N)`; in these
//! coordinates the linearization has the asymptotic block form
//!
//! ```text
//! M = [ −εA + O(ε²)   εV_θθ + O(ε²) ]
//!     [ −2I + O(ε)     εA + O(ε²)   ]
//! ```
//!
//! with `a_ij = sin(φⱼ − φᵢ)` off the diagonal and `a_ii = Σ_{j≠i} sin(φᵢ − φⱼ)`.
//!
//! The two symmetry eigenvalues at zero form a Jordan block (rotation and its
//! scaling partner), so any perturbation of size `δ` in `M` moves them by about
//! `√δ`. The zero tolerance is therefore much looser than machine precision.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::continuation::{ngon_equilibrium, polar_residuals, RelativeEquilibrium};
use crate::critical_search::CriticalPoint;
use crate::error::{Error, Result};
use crate::limit_potential::{hessian, DEFAULT_SEPARATION_GUARD};
use crate::spectra::{eig_general, general_eigenvector, skew_inner, SpectrumReport};

/// Zero eigenvalues are those below `DEFAULT_ZERO_FACTOR · √|ε|`.
pub const DEFAULT_ZERO_FACTOR: f64 = 1e-2;
/// `|Re λ| < DEFAULT_IMAG_REL_TOL · |λ|` counts as purely imaginary.
pub const DEFAULT_IMAG_REL_TOL: f64 = 1e-4;
/// Central-difference step for the linearization.
pub const DEFAULT_FD_STEP: f64 = 1e-4;
/// Allowed relative disagreement between the `h` and `h/2` Jacobians.
pub const DEFAULT_RICHARDSON_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityOptions {
    pub zero_factor: f64,
    pub imag_rel_tol: f64,
    pub fd_step: f64,
    pub richardson_tol: f64,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        Self {
            zero_factor: DEFAULT_ZERO_FACTOR,
            imag_rel_tol: DEFAULT_IMAG_REL_TOL,
            fd_step: DEFAULT_FD_STEP,
            richardson_tol: DEFAULT_RICHARDSON_TOL,
        }
    }
}

/// Jacobian of the reduced rotating-frame field, `(r, θ)` ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearizationMatrix {
    pub entries: DMatrix<f64>,
    pub epsilon: f64,
}

impl LinearizationMatrix {
    pub fn n(&self) -> usize {
        self.entries.nrows() / 2
    }

    /// Block `(row, col)` with `0` for the radial half and `1` for the angular.
    pub fn block(&self, row: usize, col: usize) -> DMatrix<f64> {
        let n = self.n();
        self.entries.view((row * n, col * n), (n, n)).into_owned()
    }
}

/// Reduced field `(ṙ, θ̇ − ω)` in the rotating frame.
fn reduced_field(r: &[f64], theta: &[f64], eps: f64, omega: f64) -> Result<Vec<f64>> {
    let (p, _) = polar_residuals(r, theta, eps, omega, DEFAULT_SEPARATION_GUARD)?;
    let n = r.len();
    let mut f = vec![0.0; 2 * n];
    for j in 0..n {
        f[j] = -p[j].re;
        f[n + j] = -p[j].im / r[j];
    }
    Ok(f)
}

fn central_jacobian(eq: &RelativeEquilibrium, h: f64) -> Result<DMatrix<f64>> {
    let n = eq.n();
    let mut jac = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..2 * n {
        let (mut rp, mut tp) = (eq.r.clone(), eq.theta.clone());
        let (mut rm, mut tm) = (eq.r.clone(), eq.theta.clone());
        if k < n {
            rp[k] += h;
            rm[k] -= h;
        } else {
            tp[k - n] += h;
            tm[k - n] -= h;
        }
        let fp = reduced_field(&rp, &tp, eq.epsilon, eq.omega)?;
        let fm = reduced_field(&rm, &tm, eq.epsilon, eq.omega)?;
        for i in 0..2 * n {
            jac[(i, k)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

pub fn linearize(eq: &RelativeEquilibrium) -> Result<LinearizationMatrix> {
    linearize_with(eq, &StabilityOptions::default())
}

/// Central differences at `h` and `h/2`, Richardson-extrapolated.
pub fn linearize_with(
    eq: &RelativeEquilibrium,
    opts: &StabilityOptions,
) -> Result<LinearizationMatrix> {
    if !(eq.residual < 1e-10) {
        return Err(Error::NotCritical(eq.residual));
    }
    let h = opts.fd_step;
    let coarse = central_jacobian(eq, h)?;
    let fine = central_jacobian(eq, h / 2.0)?;
    let scale = fine.amax().max(f64::MIN_POSITIVE);
    let change = (&coarse - &fine).amax() / scale;
    if change > opts.richardson_tol {
        return Err(Error::JacobianUnstable(change));
    }
    Ok(LinearizationMatrix {
        entries: (fine * 4.0 - coarse) / 3.0,
        epsilon: eq.epsilon,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StabilityClass {
    LinearlyStable,
    LinearlyUnstable,
    /// Zero count differs from 2; no claim is made.
    Marginal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub classification: StabilityClass,
    pub spectrum: SpectrumReport,
    pub n_zero: usize,
    /// Largest real part among the nonzero eigenvalues.
    pub max_real_part: f64,
    /// Nonzero eigenvalues with `Re λ > imag_rel_tol · |λ|`.
    pub instability_count: usize,
    pub zero_threshold: f64,
}

pub fn stability_verdict(eq: &RelativeEquilibrium) -> Result<StabilityVerdict> {
    stability_verdict_with(eq, &StabilityOptions::default())
}

pub fn stability_verdict_with(
    eq: &RelativeEquilibrium,
    opts: &StabilityOptions,
) -> Result<StabilityVerdict> {
    let m = linearize_with(eq, opts)?;
    verdict_from_matrix(&m, opts)
}

/// Classifies an already computed linearization.
pub fn verdict_from_matrix(
    m: &LinearizationMatrix,
    opts: &StabilityOptions,
) -> Result<StabilityVerdict> {
    let tol = opts.zero_factor * m.epsilon.abs().sqrt();
    let spectrum = eig_general(&m.entries, tol)?;
    let nonzero = spectrum.nonzero();
    let n_zero = spectrum.zero_count;
    let max_real_part = nonzero
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let instability_count = nonzero
        .iter()
        .filter(|z| z.re > opts.imag_rel_tol * z.norm())
        .count();
    let all_imaginary = nonzero
        .iter()
        .all(|z| z.re.abs() < opts.imag_rel_tol * z.norm());
    let classification = if n_zero != 2 {
        StabilityClass::Marginal
    } else if all_imaginary {
        StabilityClass::LinearlyStable
    } else {
        StabilityClass::LinearlyUnstable
    };
    Ok(StabilityVerdict {
        classification,
        zero_threshold: spectrum.zero_threshold(),
        spectrum,
        n_zero,
        max_real_part,
        instability_count,
    })
}

/// Leading-order nonzero eigenvalues `λ² = −2ζε` for each nonzero Hessian
/// eigenvalue `ζ` of the seed.
pub fn asymptotic_eigenvalues(cp: &CriticalPoint, epsilon: f64) -> Result<Vec<Complex64>> {
    if cp.spectrum.zero_count != 1 {
        return Err(Error::DegenerateSeed(cp.spectrum.zero_count));
    }
    let mut out = Vec::with_capacity(2 * (cp.n() - 1));
    for zeta in cp.nonzero_eigenvalues() {
        let s = -2.0 * zeta * epsilon;
        let root = if s < 0.0 {
            Complex64::new(0.0, (-s).sqrt())
        } else {
            Complex64::new(s.sqrt(), 0.0)
        };
        out.push(root);
        out.push(-root);
    }
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(out)
}

/// Largest relative distance `|λ_pred − λ| / |λ_pred|` after pairing each
/// prediction with the nearest unused computed eigenvalue.
pub fn prediction_mismatch(predicted: &[Complex64], computed: &[Complex64]) -> f64 {
    let mut used = vec![false; computed.len()];
    let mut worst: f64 = 0.0;
    for p in predicted {
        let best = (0..computed.len()).filter(|&k| !used[k]).min_by(|&a, &b| {
            (computed[a] - p)
                .norm()
                .total_cmp(&(computed[b] - p).norm())
        });
        match best {
            Some(k) => {
                used[k] = true;
                worst = worst.max((computed[k] - p).norm() / p.norm());
            }
            None => return f64::INFINITY,
        }
    }
    worst
}

/// Largest `min_μ |λ + μ|` over the spectrum, relative to the spectral radius.
pub fn pairing_defect(spectrum: &SpectrumReport) -> f64 {
    let ev = &spectrum.eigenvalues;
    let rho = spectrum.spectral_radius().max(f64::MIN_POSITIVE);
    ev.iter()
        .map(|l| {
            ev.iter()
                .map(|m| (l + m).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
        / rho
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkewPairing {
    pub eigenvalue: Complex64,
    /// `Ω(v, v̄)` for the unit eigenvector `v`.
    pub omega: Complex64,
    pub omega_over_sqrt_eps: f64,
    /// `|Ω(v, v̄)| > 0.1·√|ε|`.
    pub nondegenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkewPairingReport {
    pub epsilon: f64,
    pub pairings: Vec<SkewPairing>,
    pub all_nondegenerate: bool,
}

/// Skew pairings `Ω(v, v̄)` of the eigenvectors of the nonzero eigenvalues.
pub fn skew_pairing_check(eq: &RelativeEquilibrium) -> Result<SkewPairingReport> {
    let opts = StabilityOptions::default();
    let m = linearize_with(eq, &opts)?;
    let verdict = verdict_from_matrix(&m, &opts)?;
    let root = eq.epsilon.abs().sqrt();
    let mut pairings = Vec::new();
    for lambda in verdict.spectrum.nonzero() {
        let v = general_eigenvector(&m.entries, lambda)?;
        let v: Vec<Complex64> = v.iter().copied().collect();
        let vbar: Vec<Complex64> = v.iter().map(|z| z.conj()).collect();
        let omega = skew_inner(&v, &vbar)?;
        pairings.push(SkewPairing {
            eigenvalue: lambda,
            omega,
            omega_over_sqrt_eps: omega.norm() / root,
            nondegenerate: omega.norm() > 0.1 * root,
        });
    }
    Ok(SkewPairingReport {
        epsilon: eq.epsilon,
        all_nondegenerate: pairings.iter().all(|p| p.nondegenerate),
        pairings,
    })
}

/// Endpoints of the N-gon stability interval in `p = 1/ε`.
pub fn ngon_stability_interval(n: usize) -> (f64, f64) {
    let nf = n as f64;
    let lower = if n.is_multiple_of(2) {
        (nf * nf - 8.0 * nf + 8.0) / 16.0
    } else {
        (nf * nf - 8.0 * nf + 7.0) / 16.0
    };
    (lower, (nf - 1.0) * (nf - 1.0) / 4.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NgonIntervalReport {
    pub n: usize,
    pub epsilon: f64,
    pub p: f64,
    pub lower: f64,
    pub upper: f64,
    pub stable_interval: bool,
    pub verdict: StabilityClass,
    /// Inside the interval exactly when our verdict is linearly stable.
    pub consistent: bool,
}

/// Compares the interval test with the verdict for the exact N-gon family.
pub fn ngon_interval_check(n: usize, epsilon: f64) -> Result<NgonIntervalReport> {
    if n < 2 {
        return Err(Error::InvalidN(n, 2));
    }
    if epsilon == 0.0 || !epsilon.is_finite() {
        return Err(Error::InvalidEpsilon(epsilon, "must be finite and nonzero"));
    }
    let p = 1.0 / epsilon;
    let (lower, upper) = ngon_stability_interval(n);
    let stable_interval = lower < p && p < upper;
    let verdict = stability_verdict(&ngon_equilibrium(n, epsilon)?)?.classification;
    Ok(NgonIntervalReport {
        n,
        epsilon,
        p,
        lower,
        upper,
        stable_interval,
        verdict,
        consistent: stable_interval == (verdict == StabilityClass::LinearlyStable),
    })
}

/// The matrix `A` with `a_ij = sin(φⱼ − φᵢ)` and `a_ii = Σ_{j≠i} sin(φᵢ − φⱼ)`.
pub fn a_matrix(phi: &[f64]) -> DMatrix<f64> {
    let n = phi.len();
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                a[(i, j)] = (phi[j] - phi[i]).sin();
                a[(i, i)] += (phi[i] - phi[j]).sin();
            }
        }
    }
    a
}

/// Leading-order linearization assembled from the seed critical point.
pub fn asymptotic_matrix(cp: &CriticalPoint, epsilon: f64) -> Result<DMatrix<f64>> {
    let n = cp.n();
    let a = a_matrix(cp.config.angles()) * epsilon;
    let h = hessian(&cp.config)?.into_inner() * epsilon;
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(&(-&a));
    m.view_mut((0, n), (n, n)).copy_from(&h);
    m.view_mut((n, 0), (n, n))
        .copy_from(&(DMatrix::identity(n, n) * -2.0));
    m.view_mut((n, n), (n, n)).copy_from(&a);
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationReport {
    pub epsilon: f64,
    /// Max-abs block differences `[upper-left, upper-right, lower-left,
    /// lower-right]` between the true and the leading-order linearization.
    pub block_errors: [f64; 4],
    /// Upper-right block of the true linearization divided by `ε`, minus
    /// `V_θθ(φ)`.
    pub hessian_block_error: f64,
}

pub fn truncation_crosscheck(eq: &RelativeEquilibrium) -> Result<TruncationReport> {
    let m = linearize(eq)?;
    let approx = LinearizationMatrix {
        entries: asymptotic_matrix(&eq.source, eq.epsilon)?,
        epsilon: eq.epsilon,
    };
    let mut block_errors = [0.0; 4];
    for (k, (r, c)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
        block_errors[k] = (m.block(r, c) - approx.block(r, c)).amax();
    }
    let h = hessian(&eq.source.config)?.into_inner();
    let hessian_block_error = (m.block(0, 1) / eq.epsilon - h).amax();
    Ok(TruncationReport {
        epsilon: eq.epsilon,
        block_errors,
        hessian_block_error,
    })
}
