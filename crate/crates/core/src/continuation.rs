//! Continuation of nondegenerate critical points of `V` to relative equilibria
//! of the full (1+N)-vortex problem.
//!
//! The strong vortex has circulation 1, the N weak ones `ε`. With the center
//! of vorticity at the origin the strong vortex sits at `q₀ = −ε Σ qⱼ`, so the
//! unknowns are the polar coordinates `(r, θ)` of the weak vortices. In complex
//! notation the velocity of vortex `j` is `i Σ_{k≠j} Γₖ / conj(zⱼ − zₖ)`, and a
//! relative equilibrium rotating at rate `ω` satisfies
//!
//! ```text
//! Rⱼ = iω zⱼ − i Σ_{k≠j} Γₖ / conj(zⱼ − zₖ) = 0,   j = 1..N.
//! ```
//!
//! Residual vectors are reported in the local polar frame of each weak vortex:
//! the first N entries are `Re(Rⱼ e^{−iθⱼ})` (radial), the last N are
//! `Im(Rⱼ e^{−iθⱼ})` (tangential).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::critical_search::{classify_point, CriticalPoint, NewtonOptions};
use crate::error::{Error, Result};
use crate::limit_potential::{ngon, DEFAULT_SEPARATION_GUARD};

/// Default bound on the sup norm of the rotating-frame residual.
pub const DEFAULT_RELEQ_TOL: f64 = 1e-12;
/// Default ceiling on `|ε|`.
pub const DEFAULT_EPS_CEILING: f64 = 0.05;
/// Minimum distance between any two vortices during continuation.
pub const DEFAULT_COLLISION_GUARD: f64 = 1e-8;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Circulations `Γ₀ = 1`, `Γ₁ = … = Γ_N = ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circulations {
    pub epsilon: f64,
}

impl Circulations {
    pub fn new(epsilon: f64) -> Self {
        Self { epsilon }
    }

    /// Circulation of vortex `k`, with `k = 0` the strong vortex.
    pub fn gamma(&self, k: usize) -> f64 {
        if k == 0 {
            1.0
        } else {
            self.epsilon
        }
    }
}

/// A relative equilibrium of the (1+N)-vortex problem rotating at `omega`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelativeEquilibrium {
    pub r: Vec<f64>,
    pub theta: Vec<f64>,
    pub epsilon: f64,
    pub omega: f64,
    /// Sup norm of the rotating-frame residual.
    pub residual: f64,
    /// Critical point of `V` the equilibrium was continued from.
    pub source: CriticalPoint,
}

impl RelativeEquilibrium {
    pub fn n(&self) -> usize {
        self.r.len()
    }

    pub fn circulations(&self) -> Circulations {
        Circulations::new(self.epsilon)
    }

    /// Complex positions of the weak vortices.
    pub fn weak_positions(&self) -> Vec<Complex64> {
        weak_positions(&self.r, &self.theta)
    }

    /// Position of the strong vortex, `−ε Σ qⱼ`.
    pub fn strong_position(&self) -> Complex64 {
        -self.epsilon * self.weak_positions().iter().sum::<Complex64>()
    }

    /// All N+1 positions, strong vortex first.
    pub fn positions(&self) -> Vec<Complex64> {
        let weak = self.weak_positions();
        let mut all = Vec::with_capacity(weak.len() + 1);
        all.push(-self.epsilon * weak.iter().sum::<Complex64>());
        all.extend(weak);
        all
    }
}

fn weak_positions(r: &[f64], theta: &[f64]) -> Vec<Complex64> {
    r.iter()
        .zip(theta)
        .map(|(&r, &t)| Complex64::from_polar(r, t))
        .collect()
}

fn check_lengths(r: &[f64], theta: &[f64]) -> Result<()> {
    if r.len() != theta.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} radii but {} angles",
            r.len(),
            theta.len()
        )));
    }
    if r.is_empty() {
        return Err(Error::InvalidN(0, 1));
    }
    Ok(())
}

/// Smallest pairwise distance among all N+1 vortices, with the pair attaining
/// it (index 0 is the strong vortex).
fn min_distance(z: &[Complex64], z0: Complex64) -> (f64, usize, usize) {
    let mut best = (f64::INFINITY, 0, 0);
    for j in 0..z.len() {
        let d = (z[j] - z0).norm();
        if d < best.0 {
            best = (d, 0, j + 1);
        }
        for i in 0..j {
            let d = (z[j] - z[i]).norm();
            if d < best.0 {
                best = (d, i + 1, j + 1);
            }
        }
    }
    best
}

/// `Tⱼ = Σ_{k≠j} Γₖ / (wⱼ − wₖ)` with `w = conj z`; velocities are `i Tⱼ`.
fn field_terms(w: &[Complex64], w0: Complex64, eps: f64) -> Vec<Complex64> {
    let n = w.len();
    (0..n)
        .map(|j| {
            let mut t = 1.0 / (w[j] - w0);
            for i in 0..n {
                if i != j {
                    t += eps / (w[j] - w[i]);
                }
            }
            t
        })
        .collect()
}

/// Complex residuals `Rⱼ e^{−iθⱼ}` and the positions used to build them.
pub(crate) fn polar_residuals(
    r: &[f64],
    theta: &[f64],
    eps: f64,
    omega: f64,
    guard: f64,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    check_lengths(r, theta)?;
    let z = weak_positions(r, theta);
    let z0 = -eps * z.iter().sum::<Complex64>();
    let (d, i, j) = min_distance(&z, z0);
    if !(d > guard) {
        return Err(Error::VortexCollision { i, j, distance: d });
    }
    let w: Vec<Complex64> = z.iter().map(|v| v.conj()).collect();
    let t = field_terms(&w, z0.conj(), eps);
    let p = (0..z.len())
        .map(|j| (I * omega * z[j] - I * t[j]) * Complex64::from_polar(1.0, -theta[j]))
        .collect();
    Ok((p, z))
}

/// Rotating-frame residual `[radial; tangential]` of length 2N.
pub fn rotating_frame_residual(
    r: &[f64],
    theta: &[f64],
    epsilon: f64,
    omega: f64,
) -> Result<DVector<f64>> {
    let (p, _) = polar_residuals(r, theta, epsilon, omega, DEFAULT_SEPARATION_GUARD)?;
    Ok(split(&p))
}

fn split(p: &[Complex64]) -> DVector<f64> {
    let n = p.len();
    DVector::from_fn(2 * n, |k, _| if k < n { p[k].re } else { p[k - n].im })
}

/// Jacobian of [`rotating_frame_residual`] with respect to `(r, θ)`.
pub fn residual_jacobian(
    r: &[f64],
    theta: &[f64],
    epsilon: f64,
    omega: f64,
) -> Result<DMatrix<f64>> {
    let (p, z) = polar_residuals(r, theta, epsilon, omega, DEFAULT_SEPARATION_GUARD)?;
    Ok(jacobian_from(&p, &z, theta, epsilon, omega))
}

fn jacobian_from(
    p: &[Complex64],
    z: &[Complex64],
    theta: &[f64],
    eps: f64,
    omega: f64,
) -> DMatrix<f64> {
    let n = z.len();
    let w: Vec<Complex64> = z.iter().map(|v| v.conj()).collect();
    let w0 = -eps * w.iter().sum::<Complex64>();
    let mut jac = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        let rot = Complex64::from_polar(1.0, -theta[j]);
        let s0 = 1.0 / ((w[j] - w0) * (w[j] - w0));
        let mut diag = -s0;
        let mut off = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            if i != j {
                let s = eps / ((w[j] - w[i]) * (w[j] - w[i]));
                diag -= s;
                off[i] = s;
            }
        }
        for k in 0..n {
            // dTⱼ/dwₖ
            let mut d = off[k] - eps * s0;
            if k == j {
                d += diag;
            }
            let unit_k = Complex64::from_polar(1.0, theta[k]);
            let mut dr = -I * d * unit_k.conj();
            let mut dt = -d * w[k];
            if k == j {
                dr += I * omega * unit_k;
                dt += -omega * z[k];
            }
            dr *= rot;
            dt *= rot;
            if k == j {
                dt -= I * p[j];
            }
            jac[(j, k)] = dr.re;
            jac[(n + j, k)] = dr.im;
            jac[(j, n + k)] = dt.re;
            jac[(n + j, n + k)] = dt.im;
        }
    }
    jac
}

/// Tuning for [`continue_equilibrium_with`] and [`sweep_epsilon_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuationOptions {
    pub releq_tol: f64,
    pub max_iter: usize,
    /// Largest admissible `|ε|`; lowered to `1/N²` for N-gon seeds.
    pub eps_ceiling: f64,
    pub collision_guard: f64,
    pub max_halvings: usize,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self {
            releq_tol: DEFAULT_RELEQ_TOL,
            max_iter: 60,
            eps_ceiling: DEFAULT_EPS_CEILING,
            collision_guard: DEFAULT_COLLISION_GUARD,
            max_halvings: 30,
        }
    }
}

fn is_ngon_seed(cp: &CriticalPoint) -> bool {
    let n = cp.n() as f64;
    cp.gaps().iter().all(|g| (g - TAU / n).abs() < 1e-8)
}

/// Largest `|ε|` accepted for this seed under `opts`.
pub fn epsilon_ceiling(cp: &CriticalPoint, opts: &ContinuationOptions) -> f64 {
    if is_ngon_seed(cp) {
        let n = cp.n() as f64;
        opts.eps_ceiling.min(1.0 / (n * n))
    } else {
        opts.eps_ceiling
    }
}

fn check_seed(cp: &CriticalPoint, epsilon: f64, opts: &ContinuationOptions) -> Result<()> {
    if cp.spectrum.zero_count != 1 {
        return Err(Error::DegenerateSeed(cp.spectrum.zero_count));
    }
    if epsilon == 0.0 {
        return Err(Error::InvalidEpsilon(epsilon, "zero is the limit problem"));
    }
    if !epsilon.is_finite() {
        return Err(Error::InvalidEpsilon(epsilon, "not finite"));
    }
    if epsilon.abs() > epsilon_ceiling(cp, opts) {
        return Err(Error::InvalidEpsilon(
            epsilon,
            "exceeds the continuation ceiling",
        ));
    }
    Ok(())
}

/// Continues `cp` to a relative equilibrium at `epsilon` with `ω = 1`.
pub fn continue_equilibrium(cp: &CriticalPoint, epsilon: f64) -> Result<RelativeEquilibrium> {
    continue_equilibrium_with(cp, epsilon, &ContinuationOptions::default())
}

pub fn continue_equilibrium_with(
    cp: &CriticalPoint,
    epsilon: f64,
    opts: &ContinuationOptions,
) -> Result<RelativeEquilibrium> {
    check_seed(cp, epsilon, opts)?;
    let n = cp.n();
    solve(cp, epsilon, vec![1.0; n], cp.config.angles().to_vec(), opts)
}

/// Newton solve of the rotating-frame system plus `Σ(θ − φ) = 0`.
fn solve(
    cp: &CriticalPoint,
    epsilon: f64,
    mut r: Vec<f64>,
    mut theta: Vec<f64>,
    opts: &ContinuationOptions,
) -> Result<RelativeEquilibrium> {
    let n = cp.n();
    let phi = cp.config.angles();
    let omega = 1.0;
    let eval = |r: &[f64], t: &[f64]| -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        polar_residuals(r, t, epsilon, omega, opts.collision_guard).map_err(|e| match e {
            Error::VortexCollision { distance, .. } => Error::CollisionApproach(distance),
            other => other,
        })
    };
    let phase = |t: &[f64]| t.iter().zip(phi).map(|(a, b)| a - b).sum::<f64>();
    let merit = |p: &[Complex64], t: &[f64]| {
        p.iter()
            .map(|c| c.re.abs().max(c.im.abs()))
            .fold(phase(t).abs(), f64::max)
    };

    let (mut p, mut z) = eval(&r, &theta)?;
    let mut m = merit(&p, &theta);
    for _ in 0..opts.max_iter {
        if m < opts.releq_tol {
            return Ok(RelativeEquilibrium {
                residual: split(&p).amax(),
                r,
                theta,
                epsilon,
                omega,
                source: cp.clone(),
            });
        }
        let jac = jacobian_from(&p, &z, &theta, epsilon, omega);
        let mut aug = DMatrix::zeros(2 * n + 1, 2 * n);
        aug.rows_mut(0, 2 * n).copy_from(&jac);
        for k in 0..n {
            aug[(2 * n, n + k)] = 1.0;
        }
        let f = split(&p);
        let mut rhs = DVector::zeros(2 * n + 1);
        rhs.rows_mut(0, 2 * n).copy_from(&(-&f));
        rhs[2 * n] = -phase(&theta);
        let step = aug
            .svd(true, true)
            .solve(&rhs, 0.0)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;

        let mut lambda = 1.0;
        let mut accepted = None;
        let mut last_err = None;
        for _ in 0..=opts.max_halvings {
            let rt: Vec<f64> = (0..n).map(|k| r[k] + lambda * step[k]).collect();
            let tt: Vec<f64> = (0..n).map(|k| theta[k] + lambda * step[n + k]).collect();
            match eval(&rt, &tt) {
                Ok((pt, zt)) => {
                    let mt = merit(&pt, &tt);
                    if mt < m {
                        accepted = Some((rt, tt, pt, zt, mt));
                        break;
                    }
                }
                Err(e) => last_err = Some(e),
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((rt, tt, pt, zt, mt)) => {
                r = rt;
                theta = tt;
                p = pt;
                z = zt;
                m = mt;
            }
            None => {
                if let Some(e @ Error::CollisionApproach(_)) = last_err {
                    return Err(e);
                }
                break;
            }
        }
    }
    if m < opts.releq_tol {
        return Ok(RelativeEquilibrium {
            residual: split(&p).amax(),
            r,
            theta,
            epsilon,
            omega,
            source: cp.clone(),
        });
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        residual: m,
    })
}

/// A sweep that stopped at its first failure.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepFailure {
    /// Equilibria computed before the failure, in solve order.
    pub completed: Vec<RelativeEquilibrium>,
    pub failed_epsilon: f64,
    pub error: Error,
}

impl std::fmt::Display for SweepFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "sweep failed at epsilon {} after {} equilibria: {}",
            self.failed_epsilon,
            self.completed.len(),
            self.error
        )
    }
}

impl std::error::Error for SweepFailure {}

/// Continues `cp` to each `ε` in `eps_list`, solved in order of increasing
/// `|ε|`. Each solve warm-starts by linear extrapolation from the previous
/// solution of the same sign. The result is ordered by `|ε|` (stable for
/// ties).
pub fn sweep_epsilon(
    cp: &CriticalPoint,
    eps_list: &[f64],
) -> std::result::Result<Vec<RelativeEquilibrium>, SweepFailure> {
    sweep_epsilon_with(cp, eps_list, &ContinuationOptions::default())
}

pub fn sweep_epsilon_with(
    cp: &CriticalPoint,
    eps_list: &[f64],
    opts: &ContinuationOptions,
) -> std::result::Result<Vec<RelativeEquilibrium>, SweepFailure> {
    let mut order: Vec<f64> = eps_list.to_vec();
    order.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    if let Some(&bad) = order.iter().find(|e| **e == 0.0 || !e.is_finite()) {
        return Err(SweepFailure {
            completed: Vec::new(),
            failed_epsilon: bad,
            error: Error::InvalidEpsilon(bad, "zero is the limit problem"),
        });
    }
    let n = cp.n();
    let phi = cp.config.angles();
    let mut out: Vec<RelativeEquilibrium> = Vec::with_capacity(order.len());
    for eps in order {
        let attempt = check_seed(cp, eps, opts).and_then(|_| {
            let prev = out
                .iter()
                .rev()
                .find(|e| e.epsilon.signum() == eps.signum());
            match prev {
                Some(prev) => {
                    let s = eps / prev.epsilon;
                    let r0 = (0..n).map(|k| 1.0 + s * (prev.r[k] - 1.0)).collect();
                    let t0 = (0..n)
                        .map(|k| phi[k] + s * (prev.theta[k] - phi[k]))
                        .collect();
                    solve(cp, eps, r0, t0, opts)
                        .or_else(|_| solve(cp, eps, vec![1.0; n], phi.to_vec(), opts))
                }
                None => solve(cp, eps, vec![1.0; n], phi.to_vec(), opts),
            }
        });
        match attempt {
            Ok(eq) => out.push(eq),
            Err(error) => {
                return Err(SweepFailure {
                    completed: out,
                    failed_epsilon: eps,
                    error,
                })
            }
        }
    }
    Ok(out)
}

/// Per-member scaling ratios of a continued family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub epsilon: f64,
    /// `|q₀| / |ε|`.
    pub strong_ratio: f64,
    /// `maxⱼ ||qⱼ|² − 1| / |ε|`.
    pub radial_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub rows: Vec<ScalingRow>,
    /// `max/min` of the non-vanishing strong-vortex ratios (1 when all vanish).
    pub strong_spread: f64,
    pub radial_spread: f64,
    /// Both spreads below [`SCALING_SPREAD_BOUND`].
    pub bounded: bool,
}

pub const SCALING_SPREAD_BOUND: f64 = 10.0;

/// Ratios below this count as vanishing (symmetric configurations place the
/// strong vortex exactly at the origin, leaving only solver roundoff).
pub const VANISHING_RATIO: f64 = 1e-9;

/// `max/min` over the non-vanishing values; 1 when all vanish.
fn spread(values: impl Iterator<Item = f64>) -> f64 {
    let kept: Vec<f64> = values.filter(|v| *v > VANISHING_RATIO).collect();
    if kept.is_empty() {
        return 1.0;
    }
    let max = kept.iter().copied().fold(0.0, f64::max);
    let min = kept.iter().copied().fold(f64::INFINITY, f64::min);
    max / min
}

/// Checks that `|q₀|` and `|qⱼ|² − 1` are `O(ε)` across a family.
pub fn verify_lemma1_scaling(family: &[RelativeEquilibrium]) -> Result<ScalingReport> {
    if family.is_empty() {
        return Err(Error::InsufficientFamily("empty family".into()));
    }
    let sign = family[0].epsilon.signum();
    if family
        .iter()
        .any(|e| e.epsilon.signum() != sign || e.epsilon == 0.0)
    {
        return Err(Error::InsufficientFamily(
            "members differ in the sign of epsilon".into(),
        ));
    }
    let mut mags: Vec<f64> = family.iter().map(|e| e.epsilon.abs()).collect();
    mags.sort_by(f64::total_cmp);
    mags.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    if mags.len() < 3 {
        return Err(Error::InsufficientFamily(format!(
            "need at least 3 distinct magnitudes of epsilon, got {}",
            mags.len()
        )));
    }
    let rows: Vec<ScalingRow> = family
        .iter()
        .map(|eq| {
            let e = eq.epsilon.abs();
            ScalingRow {
                epsilon: eq.epsilon,
                strong_ratio: eq.strong_position().norm() / e,
                radial_ratio: eq.r.iter().map(|r| (r * r - 1.0).abs()).fold(0.0, f64::max) / e,
            }
        })
        .collect();
    let strong_spread = spread(rows.iter().map(|r| r.strong_ratio));
    let radial_spread = spread(rows.iter().map(|r| r.radial_ratio));
    Ok(ScalingReport {
        bounded: strong_spread < SCALING_SPREAD_BOUND && radial_spread < SCALING_SPREAD_BOUND,
        rows,
        strong_spread,
        radial_spread,
    })
}

/// Radius of the regular N-gon relative equilibrium rotating at `ω = 1`.
pub fn ngon_radius(n: usize, epsilon: f64) -> f64 {
    (1.0 + epsilon * (n as f64 - 1.0) / 2.0).sqrt()
}

/// The exact regular N-gon relative equilibrium at any admissible `ε`.
pub fn ngon_equilibrium(n: usize, epsilon: f64) -> Result<RelativeEquilibrium> {
    if n < 2 {
        return Err(Error::InvalidN(n, 2));
    }
    if epsilon == 0.0 || !epsilon.is_finite() {
        return Err(Error::InvalidEpsilon(epsilon, "must be finite and nonzero"));
    }
    if !(epsilon > -2.0 / (n as f64 - 1.0)) {
        return Err(Error::InvalidEpsilon(epsilon, "N-gon radius is not real"));
    }
    let source = classify_point(&ngon(n)?, &NewtonOptions::default())?;
    let r = vec![ngon_radius(n, epsilon); n];
    let theta = source.config.angles().to_vec();
    let residual = rotating_frame_residual(&r, &theta, epsilon, 1.0)?.amax();
    Ok(RelativeEquilibrium {
        r,
        theta,
        epsilon,
        omega: 1.0,
        residual,
        source,
    })
}
