//! The limit potential of the (1+N)-vortex problem.
//!
//! For weak vortices at angles `θ₁, …, θ_N` on the unit circle,
//!
//! ```text
//! V(θ) = −Σ_{i<j} [ cos(θᵢ−θⱼ) + ½ log(2 − 2cos(θᵢ−θⱼ)) ]
//! ```
//!
//! Critical points of `V` are exactly the limiting configurations of relative
//! equilibria as the weak circulation goes to zero. Every quantity here
//! depends only on angle differences, so no wrapping of the input angles is
//! performed.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spectra::{eig_symmetric, SpectrumReport};

/// Default guard on `1 − cos(θᵢ−θⱼ)` below which a pair counts as collided.
pub const DEFAULT_SEPARATION_GUARD: f64 = 1e-10;
/// Default relative tolerance for counting zero Hessian eigenvalues.
pub const DEFAULT_ZERO_TOL: f64 = 1e-9;
/// Default bound on `‖∇V‖∞` accepted by [`classify`].
pub const DEFAULT_CRITICALITY_TOL: f64 = 1e-8;

/// Angular positions of the N weak vortices, in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AngularConfig {
    angles: Vec<f64>,
}

impl AngularConfig {
    /// Wraps a list of angles. Requires `N ≥ 2`; collisions are checked at
    /// evaluation time.
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.len() < 2 {
            return Err(Error::InvalidN(angles.len(), 2));
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidArgument("non-finite angle".into()));
        }
        Ok(Self { angles })
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn into_angles(self) -> Vec<f64> {
        self.angles
    }

    /// Adds `c` to every angle.
    pub fn rotated(&self, c: f64) -> Self {
        Self {
            angles: self.angles.iter().map(|a| a + c).collect(),
        }
    }

    /// Smallest value of `1 − cos(θᵢ−θⱼ)` over all pairs, with the pair.
    pub fn min_separation(&self) -> (f64, usize, usize) {
        let mut best = (f64::INFINITY, 0, 0);
        for i in 0..self.angles.len() {
            for j in (i + 1)..self.angles.len() {
                let s = one_minus_cos(self.angles[i] - self.angles[j]);
                if s < best.0 {
                    best = (s, i, j);
                }
            }
        }
        best
    }
}

/// Nondegeneracy class of a critical point.
///
/// `LocalMin`/`LocalMax` require a semidefinite Hessian with a one-dimensional
/// null space (the rotation direction). Two or more numerically zero
/// eigenvalues give `Degenerate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CriticalPointClass {
    LocalMin,
    LocalMax,
    Saddle,
    Degenerate,
}

/// Hessian of `V`; symmetric with zero row sums.
#[derive(Debug, Clone, PartialEq)]
pub struct HessianMatrix(pub DMatrix<f64>);

impl HessianMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
}

/// `1 − cos(x)` evaluated without cancellation.
#[inline]
pub(crate) fn one_minus_cos(x: f64) -> f64 {
    let s = (0.5 * x).sin();
    2.0 * s * s
}

/// Evaluator for `V` and its derivatives with a configurable collision guard.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitPotential {
    pub separation_guard: f64,
}

impl Default for LimitPotential {
    fn default() -> Self {
        Self {
            separation_guard: DEFAULT_SEPARATION_GUARD,
        }
    }
}

impl LimitPotential {
    fn check(&self, theta: &AngularConfig) -> Result<()> {
        let (sep, i, j) = theta.min_separation();
        if sep < self.separation_guard {
            return Err(Error::AngularCollision {
                i,
                j,
                separation: sep,
            });
        }
        Ok(())
    }

    pub fn potential(&self, theta: &AngularConfig) -> Result<f64> {
        self.check(theta)?;
        let a = theta.angles();
        let mut v = 0.0;
        for i in 0..a.len() {
            for j in (i + 1)..a.len() {
                let d = a[i] - a[j];
                v -= d.cos() + 0.5 * (2.0 * one_minus_cos(d)).ln();
            }
        }
        Ok(v)
    }

    pub fn gradient(&self, theta: &AngularConfig) -> Result<DVector<f64>> {
        self.check(theta)?;
        let a = theta.angles();
        let n = a.len();
        let mut g = DVector::zeros(n);
        for j in 0..n {
            for i in (j + 1)..n {
                // d = θ_j − θ_i; the pair term is odd in d.
                let d = a[j] - a[i];
                let s = d.sin();
                let t = s - s / (2.0 * one_minus_cos(d));
                g[j] += t;
                g[i] -= t;
            }
        }
        Ok(g)
    }

    pub fn hessian(&self, theta: &AngularConfig) -> Result<HessianMatrix> {
        self.check(theta)?;
        let a = theta.angles();
        let n = a.len();
        let mut h = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let d = a[i] - a[j];
                let hij = -d.cos() - 1.0 / (2.0 * one_minus_cos(d));
                h[(i, j)] = hij;
                h[(j, i)] = hij;
                h[(i, i)] -= hij;
                h[(j, j)] -= hij;
            }
        }
        Ok(HessianMatrix(h))
    }
}

pub fn potential(theta: &AngularConfig) -> Result<f64> {
    LimitPotential::default().potential(theta)
}

pub fn gradient(theta: &AngularConfig) -> Result<DVector<f64>> {
    LimitPotential::default().gradient(theta)
}

pub fn hessian(theta: &AngularConfig) -> Result<HessianMatrix> {
    LimitPotential::default().hessian(theta)
}

/// Settings for [`classify_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    /// Relative zero tolerance: `|λ| < zero_tol · max(1, max|λ|)`.
    pub zero_tol: f64,
    /// Upper bound on `‖∇V‖∞` for the input to count as critical.
    pub criticality_tol: f64,
    pub potential: LimitPotential,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            zero_tol: DEFAULT_ZERO_TOL,
            criticality_tol: DEFAULT_CRITICALITY_TOL,
            potential: LimitPotential::default(),
        }
    }
}

/// Classifies a critical point from the full Hessian spectrum.
pub fn classify(
    theta: &AngularConfig,
    zero_tol: f64,
) -> Result<(CriticalPointClass, SpectrumReport)> {
    classify_with(
        theta,
        &ClassifyOptions {
            zero_tol,
            ..Default::default()
        },
    )
}

pub fn classify_with(
    theta: &AngularConfig,
    opts: &ClassifyOptions,
) -> Result<(CriticalPointClass, SpectrumReport)> {
    let g = opts.potential.gradient(theta)?;
    let gmax = g.amax();
    if gmax >= opts.criticality_tol {
        return Err(Error::NotCritical(gmax));
    }
    let h = opts.potential.hessian(theta)?;
    let spectrum = eig_symmetric(h.matrix(), opts.zero_tol)?;
    Ok((class_from_spectrum(&spectrum), spectrum))
}

/// Class implied by a real Hessian spectrum and its zero count.
pub fn class_from_spectrum(spectrum: &SpectrumReport) -> CriticalPointClass {
    if spectrum.zero_count >= 2 {
        return CriticalPointClass::Degenerate;
    }
    let (neg, _, pos) = spectrum.sign_counts();
    match (neg, pos) {
        (0, _) => CriticalPointClass::LocalMin,
        (_, 0) => CriticalPointClass::LocalMax,
        _ => CriticalPointClass::Saddle,
    }
}

/// The regular N-gon `θⱼ = 2π(j−1)/N`.
pub fn ngon(n: usize) -> Result<AngularConfig> {
    if n < 2 {
        return Err(Error::InvalidN(n, 2));
    }
    AngularConfig::new((0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(a: &[f64]) -> AngularConfig {
        AngularConfig::new(a.to_vec()).unwrap()
    }

    #[test]
    fn potential_two_vortex_values() {
        let v = potential(&cfg(&[0.0, PI])).unwrap();
        assert!((v - (1.0 - 2f64.ln())).abs() < 1e-15);
        let v = potential(&cfg(&[0.0, PI / 3.0])).unwrap();
        assert!((v + 0.5).abs() < 1e-15);
        let c = 0.731;
        let v2 = potential(&cfg(&[c, PI + c])).unwrap();
        assert!((v2 - (1.0 - 2f64.ln())).abs() < 1e-14);
    }

    #[test]
    fn gradient_quarter_turn() {
        let g = gradient(&cfg(&[0.0, PI / 2.0])).unwrap();
        assert!((g[0] + 0.5).abs() < 1e-15);
        assert!((g[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn hessian_equilateral_fixture() {
        let h = hessian(&cfg(&[0.0, PI / 3.0])).unwrap();
        let expect = [[1.5, -1.5], [-1.5, 1.5]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((h.0[(i, j)] - expect[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn collision_rejected() {
        let err = potential(&cfg(&[0.3, 0.3, 1.0])).unwrap_err();
        assert!(matches!(err, Error::AngularCollision { i: 0, j: 1, .. }));
        // Coincident modulo 2π is also a collision.
        assert!(gradient(&cfg(&[0.0, 2.0 * PI])).is_err());
        assert!(hessian(&cfg(&[1.0, 1.0 + 1e-6, 2.0])).is_err());
    }

    #[test]
    fn ngon_definition_and_errors() {
        let sq = ngon(4).unwrap();
        let expect = [0.0, PI / 2.0, PI, 1.5 * PI];
        for (a, b) in sq.angles().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(ngon(2).unwrap().angles(), &[0.0, PI]);
        assert_eq!(ngon(1).unwrap_err(), Error::InvalidN(1, 2));
        assert!(AngularConfig::new(vec![0.0]).is_err());
    }

    #[test]
    fn ngon_is_critical() {
        for n in 2..=100 {
            let g = gradient(&ngon(n).unwrap()).unwrap();
            assert!(g.amax() < 1e-11, "n={n} |g|={}", g.amax());
        }
    }

    #[test]
    fn classify_small_fixtures() {
        let (c, s) = classify(&cfg(&[0.0, PI / 3.0]), 1e-9).unwrap();
        assert_eq!(c, CriticalPointClass::LocalMin);
        assert_eq!(s.zero_count, 1);
        assert!((s.real_parts()[1] - 3.0).abs() < 1e-12);

        let (c, _) = classify(&ngon(3).unwrap(), 1e-9).unwrap();
        assert_eq!(c, CriticalPointClass::LocalMax);

        let (c, s) = classify(&ngon(4).unwrap(), 1e-9).unwrap();
        assert_eq!(c, CriticalPointClass::Saddle);
        let ev = s.real_parts();
        for (a, b) in ev.iter().zip([-0.5, -0.5, 0.0, 2.0]) {
            assert!((a - b).abs() < 1e-12, "{ev:?}");
        }
    }

    #[test]
    fn classify_rejects_noncritical() {
        let err = classify(&cfg(&[0.0, PI / 2.0]), 1e-9).unwrap_err();
        assert!(matches!(err, Error::NotCritical(_)));
    }

    #[test]
    fn ngon_nondegenerate_up_to_100() {
        for n in 2..=100 {
            let (c, s) = classify(&ngon(n).unwrap(), 1e-9).unwrap();
            assert_eq!(s.zero_count, 1, "n={n}");
            assert_ne!(c, CriticalPointClass::Degenerate);
        }
    }

    fn random_config() -> impl Strategy<Value = Vec<f64>> {
        (2usize..=10).prop_flat_map(|n| proptest::collection::vec(0.0..(2.0 * PI), n))
    }

    fn separated(a: &[f64]) -> bool {
        AngularConfig::new(a.to_vec())
            .map(|c| c.min_separation().0 > 1e-3)
            .unwrap_or(false)
    }

    proptest! {
        #[test]
        fn rotation_and_permutation_invariance(a in random_config(), c in -10.0..10.0f64, seed in any::<u64>()) {
            prop_assume!(separated(&a));
            let base = potential(&cfg(&a)).unwrap();
            let rot = potential(&cfg(&a).rotated(c)).unwrap();
            prop_assert!((base - rot).abs() <= 1e-12 * base.abs().max(1.0));
            let mut p = a.clone();
            let k = (seed as usize) % p.len();
            p.rotate_left(k);
            p.reverse();
            let perm = potential(&cfg(&p)).unwrap();
            prop_assert!((base - perm).abs() <= 1e-12 * base.abs().max(1.0));
        }

        #[test]
        fn hessian_structure(a in random_config()) {
            prop_assume!(separated(&a));
            let h = hessian(&cfg(&a)).unwrap().0;
            let scale = h.amax().max(1.0);
            for i in 0..h.nrows() {
                prop_assert!(h.row(i).sum().abs() < 1e-12 * scale);
                for j in 0..h.ncols() {
                    prop_assert_eq!(h[(i, j)], h[(j, i)]);
                }
            }
            let g = gradient(&cfg(&a)).unwrap();
            prop_assert!(g.sum().abs() < 1e-12 * g.amax().max(1.0));
        }
    }
}
