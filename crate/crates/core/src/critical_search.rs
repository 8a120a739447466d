//! Multistart search for critical points of the limit potential.
//!
//! Starts are drawn uniformly from the ordered wedge `0 = θ₁ < θ₂ < … < θ_N < 2π`
//! (equivalently, uniformly distributed cyclic gaps), refined by damped Newton
//! on `∇V` restricted to the complement of the rotation direction
//! `v₀ = (1, …, 1)`, and deduplicated modulo rotations, cyclic relabelings and
//! the reflection `θ → −θ`.
//!
//! Plain Newton converges to critical points of every index and very rarely
//! lands on the minimum once N is large, so every `descent_stride`-th start
//! first runs a modified-Newton minimization of `V` before the Newton polish.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::limit_potential::{
    class_from_spectrum, AngularConfig, CriticalPointClass, LimitPotential,
    DEFAULT_SEPARATION_GUARD, DEFAULT_ZERO_TOL,
};
use crate::spectra::{eig_symmetric, SpectrumReport};

/// Tolerance used when comparing canonical gap sequences lexicographically.
const LEX_TIE_TOL: f64 = 1e-12;

/// Gap coordinates `(η₁, …, η_N) = (θ₁, θ₂−θ₁, …, θ_N−θ_{N−1})` of an ordered
/// configuration with `θ₁ = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WedgeConfig {
    gaps: Vec<f64>,
}

impl WedgeConfig {
    /// `gaps[0]` must be 0, the rest strictly positive, total below `2π`.
    pub fn new(gaps: Vec<f64>) -> Result<Self> {
        if gaps.len() < 2 {
            return Err(Error::InvalidN(gaps.len(), 2));
        }
        if gaps[0] != 0.0 {
            return Err(Error::InvalidArgument("first wedge gap must be 0".into()));
        }
        if gaps[1..].iter().any(|&g| !(g > 0.0)) {
            return Err(Error::InvalidArgument("wedge gaps must be positive".into()));
        }
        if !(gaps.iter().sum::<f64>() < TAU) {
            return Err(Error::InvalidArgument(
                "wedge gaps must sum below 2π".into(),
            ));
        }
        Ok(Self { gaps })
    }

    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    /// Samples the interior `{ηᵢ > δ, Σ η < 2π − δ}` uniformly: the N cyclic
    /// gaps (including the closing one) are `δ + (2π − Nδ)·Dirichlet(1, …, 1)`.
    pub fn sample<R: Rng + ?Sized>(n: usize, margin: f64, rng: &mut R) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidN(n, 2));
        }
        let delta = margin.min(PI / n as f64);
        let e: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = e.iter().sum();
        let free = TAU - n as f64 * delta;
        let mut gaps = Vec::with_capacity(n);
        gaps.push(0.0);
        gaps.extend(e[..n - 1].iter().map(|x| delta + free * x / total));
        Self::new(gaps)
    }

    pub fn to_config(&self) -> AngularConfig {
        let mut acc = 0.0;
        let angles = self
            .gaps
            .iter()
            .map(|g| {
                acc += g;
                acc
            })
            .collect();
        AngularConfig::new(angles).expect("wedge has at least two gaps")
    }
}

/// `(negative, zero, positive)` Hessian eigenvalue counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MorseIndex {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

impl MorseIndex {
    pub fn as_tuple(&self) -> (usize, usize, usize) {
        (self.negative, self.zero, self.positive)
    }
}

/// A classified critical point in canonical form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub config: AngularConfig,
    pub class: CriticalPointClass,
    pub spectrum: SpectrumReport,
    pub morse_index: MorseIndex,
    /// `‖∇V‖∞` at `config`.
    pub residual: f64,
    pub potential: f64,
    /// Whether the reflection `θ → −θ` maps the configuration to itself up
    /// to rotation and relabeling.
    pub reflection_symmetric: bool,
}

impl CriticalPoint {
    pub fn n(&self) -> usize {
        self.config.len()
    }

    /// Nonzero Hessian eigenvalues, ascending.
    pub fn nonzero_eigenvalues(&self) -> Vec<f64> {
        self.spectrum.nonzero().iter().map(|z| z.re).collect()
    }

    /// Cyclic gap sequence of the canonical configuration.
    pub fn gaps(&self) -> Vec<f64> {
        cyclic_gaps(self.config.angles())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Convergence bound on `‖∇V‖∞`.
    pub newton_tol: f64,
    pub max_iter: usize,
    /// Backtracking halvings per step.
    pub max_halvings: usize,
    /// Largest allowed change of any angle in one step (radians).
    pub max_step: f64,
    pub zero_tol: f64,
    pub separation_guard: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            newton_tol: 1e-12,
            max_iter: 200,
            max_halvings: 30,
            max_step: 0.5,
            zero_tol: DEFAULT_ZERO_TOL,
            separation_guard: DEFAULT_SEPARATION_GUARD,
        }
    }
}

impl NewtonOptions {
    fn potential(&self) -> LimitPotential {
        LimitPotential {
            separation_guard: self.separation_guard,
        }
    }
}

fn cyclic_gaps(sorted_angles: &[f64]) -> Vec<f64> {
    let n = sorted_angles.len();
    let mut gaps: Vec<f64> = sorted_angles.windows(2).map(|w| w[1] - w[0]).collect();
    gaps.push(TAU - (sorted_angles[n - 1] - sorted_angles[0]));
    gaps
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        if x < &(y - LEX_TIE_TOL) {
            return Ordering::Less;
        }
        if x > &(y + LEX_TIE_TOL) {
            return Ordering::Greater;
        }
    }
    Ordering::Equal
}

struct Canonical {
    angles: Vec<f64>,
    gaps: Vec<f64>,
    reflection_symmetric: bool,
}

fn canonical_form(theta: &AngularConfig, guard: f64) -> Result<Canonical> {
    let (sep, i, j) = theta.min_separation();
    if sep < guard {
        return Err(Error::AngularCollision {
            i,
            j,
            separation: sep,
        });
    }
    let n = theta.len();
    let mut a: Vec<f64> = theta.angles().iter().map(|x| x.rem_euclid(TAU)).collect();
    a.sort_by(f64::total_cmp);

    let candidate = |start: usize, reflect: bool| -> Vec<f64> {
        (0..n)
            .map(|k| {
                if reflect {
                    (a[start] - a[(start + n - k) % n]).rem_euclid(TAU)
                } else {
                    (a[(start + k) % n] - a[start]).rem_euclid(TAU)
                }
            })
            .collect()
    };

    let mut best = candidate(0, false);
    let mut best_gaps = cyclic_gaps(&best);
    let mut best_reflected_gaps: Option<Vec<f64>> = None;
    for reflect in [false, true] {
        for start in 0..n {
            if start == 0 && !reflect {
                continue;
            }
            let cand = candidate(start, reflect);
            let gaps = cyclic_gaps(&cand);
            if reflect
                && best_reflected_gaps
                    .as_ref()
                    .is_none_or(|g| lex_cmp(&gaps, g) == Ordering::Less)
            {
                best_reflected_gaps = Some(gaps.clone());
            }
            if lex_cmp(&gaps, &best_gaps) == Ordering::Less {
                best = cand;
                best_gaps = gaps;
            }
        }
    }
    // Reflection symmetry: the best forward and best reflected gap sequences
    // coincide.
    let mut best_forward = cyclic_gaps(&candidate(0, false));
    for start in 1..n {
        let g = cyclic_gaps(&candidate(start, false));
        if lex_cmp(&g, &best_forward) == Ordering::Less {
            best_forward = g;
        }
    }
    let reflection_symmetric = best_reflected_gaps
        .map(|r| sup_distance(&r, &best_forward) < 1e-9)
        .unwrap_or(false);
    Ok(Canonical {
        angles: best,
        gaps: best_gaps,
        reflection_symmetric,
    })
}

fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Representative with `θ₁ = 0`, angles ascending in `[0, 2π)`, and the
/// lexicographically smallest gap sequence over all cyclic relabelings and the
/// reflection `θ → −θ`.
pub fn canonicalize(theta: &AngularConfig) -> Result<AngularConfig> {
    let c = canonical_form(theta, DEFAULT_SEPARATION_GUARD)?;
    AngularConfig::new(c.angles)
}

/// Cyclic gap sequence of the canonical form (length N, sums to `2π`).
pub fn canonical_gaps(theta: &AngularConfig) -> Result<Vec<f64>> {
    Ok(canonical_form(theta, DEFAULT_SEPARATION_GUARD)?.gaps)
}

/// Newton direction on `span{v₀}^⊥`: solves `(H + v₀v₀ᵀ/N) Δ = −g`, which for
/// `g ⊥ v₀` is the pseudo-inverse step of `H` on that subspace.
fn projected_newton_step(h: &DMatrix<f64>, g: &DVector<f64>) -> Option<DVector<f64>> {
    let n = g.len();
    let shifted = h.add_scalar(1.0 / n as f64);
    let mut step = shifted.lu().solve(&(-g))?;
    if step.iter().any(|x| !x.is_finite()) {
        return None;
    }
    let mean = step.mean();
    step.add_scalar_mut(-mean);
    Some(step)
}

fn clip_step(step: &mut DVector<f64>, max_step: f64) {
    let m = step.amax();
    if m > max_step {
        *step *= max_step / m;
    }
}

fn ensure_separated(theta: &[f64], guard: f64) -> Result<()> {
    let sep = AngularConfig::new(theta.to_vec())?.min_separation().0;
    if sep < guard {
        return Err(Error::CollisionApproach(sep));
    }
    Ok(())
}

/// Smallest `‖∇V‖∞` resolvable in double precision near a critical point:
/// angles carry absolute rounding up to `π·ε_mach`, amplified by `‖H‖∞`.
/// Clustered configurations at large N sit above `10⁻¹²`.
pub fn gradient_floor(h: &DMatrix<f64>) -> f64 {
    let row_max = (0..h.nrows())
        .map(|i| h.row(i).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    8.0 * f64::EPSILON * PI * row_max
}

/// Newton iteration to `‖∇V‖∞ < max(newton_tol, gradient_floor)`; returns the
/// raw iterate.
pub(crate) fn newton_raw(theta0: &AngularConfig, opts: &NewtonOptions) -> Result<AngularConfig> {
    let pot = opts.potential();
    ensure_separated(theta0.angles(), opts.separation_guard)?;
    let mut theta = theta0.clone();
    let mut g = pot.gradient(&theta)?;
    let mut floor = 0.0;
    for _ in 0..opts.max_iter {
        if g.amax() < opts.newton_tol {
            return Ok(theta);
        }
        let h = pot.hessian(&theta)?;
        floor = gradient_floor(h.matrix());
        if g.amax() < floor {
            return Ok(theta);
        }
        let mut step = projected_newton_step(h.matrix(), &g).unwrap_or_else(|| -g.clone());
        clip_step(&mut step, opts.max_step);

        let merit = g.norm_squared();
        let mut alpha = 1.0;
        let mut accepted: Option<(AngularConfig, DVector<f64>)> = None;
        let mut fallback: Option<(AngularConfig, DVector<f64>)> = None;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<f64> = theta
                .angles()
                .iter()
                .zip(step.iter())
                .map(|(a, d)| a + alpha * d)
                .collect();
            let trial = AngularConfig::new(trial)?;
            if trial.min_separation().0 >= opts.separation_guard {
                let gt = pot.gradient(&trial)?;
                if gt.norm_squared() < merit {
                    accepted = Some((trial, gt));
                    break;
                }
                fallback = Some((trial, gt));
            }
            alpha *= 0.5;
        }
        match accepted.or(fallback) {
            Some((t, gt)) => {
                theta = t;
                g = gt;
            }
            None => {
                let sep = theta.min_separation().0;
                return Err(Error::CollisionApproach(sep.min(opts.separation_guard)));
            }
        }
    }
    if g.amax() < opts.newton_tol.max(floor) {
        return Ok(theta);
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        residual: g.amax(),
    })
}

/// Modified-Newton minimization of `V` (Hessian shifted until positive
/// definite, Armijo backtracking on `V`). Stops at `‖∇V‖∞ < tol`.
pub(crate) fn descend(
    theta0: &AngularConfig,
    tol: f64,
    opts: &NewtonOptions,
) -> Result<AngularConfig> {
    let pot = opts.potential();
    let n = theta0.len();
    ensure_separated(theta0.angles(), opts.separation_guard)?;
    let mut theta = theta0.clone();
    let max_iter = 5 * opts.max_iter;
    for _ in 0..max_iter {
        let g = pot.gradient(&theta)?;
        if g.amax() < tol {
            return Ok(theta);
        }
        let h = pot.hessian(&theta)?.into_inner().add_scalar(1.0 / n as f64);
        let scale = h.amax().max(1.0);
        let mut mu = 0.0;
        let mut step = None;
        for _ in 0..60 {
            let mut m = h.clone();
            for i in 0..n {
                m[(i, i)] += mu;
            }
            if let Some(ch) = m.cholesky() {
                step = Some(ch.solve(&(-&g)));
                break;
            }
            mu = if mu == 0.0 { 1e-3 * scale } else { 2.0 * mu };
        }
        let mut step = step.unwrap_or_else(|| -g.clone());
        let mean = step.mean();
        step.add_scalar_mut(-mean);
        clip_step(&mut step, opts.max_step);

        let v0 = pot.potential(&theta)?;
        let slope = g.dot(&step);
        let mut alpha = 1.0;
        let mut next = None;
        for _ in 0..=opts.max_halvings + 10 {
            let trial: Vec<f64> = theta
                .angles()
                .iter()
                .zip(step.iter())
                .map(|(a, d)| a + alpha * d)
                .collect();
            let trial = AngularConfig::new(trial)?;
            if trial.min_separation().0 >= opts.separation_guard {
                let vt = pot.potential(&trial)?;
                if vt <= v0 + 1e-4 * alpha * slope {
                    next = Some(trial);
                    break;
                }
            }
            alpha *= 0.5;
        }
        match next {
            Some(t) => theta = t,
            // No descent possible at this resolution; let Newton finish.
            None => return Ok(theta),
        }
    }
    Ok(theta)
}

/// Canonicalizes and classifies a converged configuration.
pub fn classify_point(theta: &AngularConfig, opts: &NewtonOptions) -> Result<CriticalPoint> {
    let pot = opts.potential();
    let canon = canonical_form(theta, opts.separation_guard)?;
    let config = AngularConfig::new(canon.angles)?;
    let residual = pot.gradient(&config)?.amax();
    let h = pot.hessian(&config)?;
    let spectrum = eig_symmetric(h.matrix(), opts.zero_tol)?;
    let class = class_from_spectrum(&spectrum);
    let (negative, zero, positive) = spectrum.sign_counts();
    Ok(CriticalPoint {
        potential: pot.potential(&config)?,
        config,
        class,
        spectrum,
        morse_index: MorseIndex {
            negative,
            zero,
            positive,
        },
        residual,
        reflection_symmetric: canon.reflection_symmetric,
    })
}

/// Damped Newton refinement followed by classification.
pub fn newton_refine(theta0: &AngularConfig, opts: &NewtonOptions) -> Result<CriticalPoint> {
    let theta = newton_raw(theta0, opts)?;
    classify_point(&theta, opts)
}

/// `(negatives, zeros, positives)` of the Hessian spectrum.
pub fn morse_index(cp: &CriticalPoint) -> MorseIndex {
    let (negative, zero, positive) = cp.spectrum.sign_counts();
    MorseIndex {
        negative,
        zero,
        positive,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub newton_tol: f64,
    pub max_iter: usize,
    pub zero_tol: f64,
    /// Sup-norm tolerance on canonical gap sequences for merging.
    pub dedup_tol: f64,
    /// Minimum gap `δ` of sampled starts.
    pub start_margin: f64,
    /// Every `descent_stride`-th start (indices `k ≡ stride−1`) minimizes `V`
    /// before the Newton polish; 0 disables.
    pub descent_stride: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            newton_tol: 1e-12,
            max_iter: 200,
            zero_tol: DEFAULT_ZERO_TOL,
            dedup_tol: 1e-6,
            start_margin: 1e-2,
            descent_stride: 4,
        }
    }
}

impl SearchOptions {
    fn newton(&self) -> NewtonOptions {
        NewtonOptions {
            newton_tol: self.newton_tol,
            max_iter: self.max_iter,
            zero_tol: self.zero_tol,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchMetadata {
    pub starts: usize,
    pub seed: u64,
    pub converged: usize,
    pub failed: usize,
    /// Number of starts that landed on each family, aligned with `points`.
    pub hits: Vec<usize>,
    pub options: SearchOptions,
}

/// Distinct critical points found for one N, sorted by potential value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyCatalog {
    pub n: usize,
    pub points: Vec<CriticalPoint>,
    pub metadata: SearchMetadata,
}

impl FamilyCatalog {
    /// Points with the given Morse index.
    pub fn with_index(&self, negative: usize, zero: usize, positive: usize) -> Vec<&CriticalPoint> {
        let want = MorseIndex {
            negative,
            zero,
            positive,
        };
        self.points
            .iter()
            .filter(|p| p.morse_index == want)
            .collect()
    }

    /// The entry whose canonical form is the regular N-gon, if found.
    pub fn ngon(&self) -> Option<&CriticalPoint> {
        let gap = TAU / self.n as f64;
        self.points
            .iter()
            .find(|p| p.gaps().iter().all(|g| (g - gap).abs() < 1e-8))
    }
}

pub fn multistart_search(n: usize, n_starts: usize, seed: u64) -> Result<FamilyCatalog> {
    multistart_search_with(n, n_starts, seed, &SearchOptions::default())
}

/// Runs refinements from `n_starts` wedge samples. Starts are generated
/// sequentially from `seed`, refined in parallel, and merged in start order,
/// so the catalog does not depend on thread scheduling.
pub fn multistart_search_with(
    n: usize,
    n_starts: usize,
    seed: u64,
    opts: &SearchOptions,
) -> Result<FamilyCatalog> {
    if n < 2 {
        return Err(Error::InvalidN(n, 2));
    }
    if n_starts == 0 {
        return Err(Error::InvalidArgument("need at least one start".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<AngularConfig> = (0..n_starts)
        .map(|_| WedgeConfig::sample(n, opts.start_margin, &mut rng).map(|w| w.to_config()))
        .collect::<Result<_>>()?;

    let newton = opts.newton();
    let stride = opts.descent_stride;
    let refined: Vec<Option<(AngularConfig, Vec<f64>)>> = starts
        .par_iter()
        .enumerate()
        .map(|(k, start)| {
            let seed_point = if stride > 0 && k % stride == stride - 1 {
                descend(start, 1e-8, &newton).ok()?
            } else {
                start.clone()
            };
            let theta = newton_raw(&seed_point, &newton).ok()?;
            let canon = canonical_form(&theta, newton.separation_guard).ok()?;
            Some((theta, canon.gaps))
        })
        .collect();

    let mut reps: Vec<(AngularConfig, Vec<f64>)> = Vec::new();
    let mut hits: Vec<usize> = Vec::new();
    let mut failed = 0;
    for item in refined {
        let Some((theta, gaps)) = item else {
            failed += 1;
            continue;
        };
        match reps
            .iter()
            .position(|(_, g)| sup_distance(g, &gaps) < opts.dedup_tol)
        {
            Some(idx) => hits[idx] += 1,
            None => {
                reps.push((theta, gaps));
                hits.push(1);
            }
        }
    }

    let mut classified: Vec<(CriticalPoint, usize)> = reps
        .par_iter()
        .zip(hits.par_iter())
        .map(|((theta, _), &h)| classify_point(theta, &newton).map(|cp| (cp, h)))
        .collect::<Result<_>>()?;
    classified.sort_by(|a, b| {
        a.0.potential
            .total_cmp(&b.0.potential)
            .then_with(|| lex_cmp(&a.0.gaps(), &b.0.gaps()))
    });
    let (points, hits): (Vec<_>, Vec<_>) = classified.into_iter().unzip();
    Ok(FamilyCatalog {
        n,
        points,
        metadata: SearchMetadata {
            starts: n_starts,
            seed,
            converged: n_starts - failed,
            failed,
            hits,
            options: *opts,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limit_potential::{gradient, ngon};

    fn cfg(a: &[f64]) -> AngularConfig {
        AngularConfig::new(a.to_vec()).unwrap()
    }

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn canonicalize_removes_rotation() {
        let c = canonicalize(&cfg(&[PI / 2.0, PI / 2.0 + PI])).unwrap();
        assert_close(c.angles(), &[0.0, PI], 1e-15);
    }

    #[test]
    fn canonicalize_identifies_reflection() {
        let a = canonicalize(&cfg(&[0.0, PI / 3.0])).unwrap();
        let b = canonicalize(&cfg(&[0.0, TAU - PI / 3.0])).unwrap();
        assert_close(a.angles(), b.angles(), 1e-14);
        assert_close(a.angles(), &[0.0, PI / 3.0], 1e-14);
    }

    #[test]
    fn canonicalize_handles_relabeling_and_negative_angles() {
        let base = [0.0, 0.4, 1.9, 3.5, 5.0];
        let shuffled = [5.0 - 7.0 * TAU, 1.9, 0.4 + TAU, 3.5, 0.0];
        let a = canonicalize(&cfg(&base)).unwrap();
        let b = canonicalize(&cfg(&shuffled)).unwrap();
        assert_close(a.angles(), b.angles(), 1e-12);
        let mirrored: Vec<f64> = base.iter().map(|x| 2.0 - x).collect();
        let c = canonicalize(&cfg(&mirrored)).unwrap();
        assert_close(a.angles(), c.angles(), 1e-12);
    }

    #[test]
    fn canonicalize_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 2..12 {
            for _ in 0..20 {
                let w = WedgeConfig::sample(n, 1e-2, &mut rng).unwrap();
                let rotated = w.to_config().rotated(rng.random_range(-10.0..10.0));
                let once = canonicalize(&rotated).unwrap();
                let twice = canonicalize(&once).unwrap();
                assert_eq!(once, twice);
                assert_eq!(once.angles()[0], 0.0);
                assert!(once.angles().windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn canonicalize_rejects_collision() {
        assert!(canonicalize(&cfg(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn wedge_validation_and_sampling() {
        assert!(WedgeConfig::new(vec![0.1, 1.0]).is_err());
        assert!(WedgeConfig::new(vec![0.0, -1.0]).is_err());
        assert!(WedgeConfig::new(vec![0.0, 4.0, 3.0]).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [2, 5, 100, 700] {
            let w = WedgeConfig::sample(n, 1e-2, &mut rng).unwrap();
            let delta = 1e-2f64.min(PI / n as f64);
            assert!(w.gaps()[1..].iter().all(|&g| g >= delta));
            assert!(w.gaps().iter().sum::<f64>() <= TAU - delta + 1e-12);
        }
    }

    #[test]
    fn newton_recovers_perturbed_pentagon() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let base = ngon(5).unwrap();
        let noisy: Vec<f64> = base
            .angles()
            .iter()
            .map(|a| a + 1e-3 * rng.random_range(-1.0..1.0))
            .collect();
        let cp = newton_refine(&cfg(&noisy), &NewtonOptions::default()).unwrap();
        assert_close(
            cp.config.angles(),
            canonicalize(&base).unwrap().angles(),
            1e-10,
        );
        assert!(cp.residual < 1e-12);
        assert_eq!(cp.morse_index.as_tuple(), (2, 1, 2));
        assert!(cp.reflection_symmetric);
    }

    #[test]
    fn newton_two_vortex_equilateral() {
        let cp = newton_refine(&cfg(&[0.0, PI / 3.0 + 0.05]), &NewtonOptions::default()).unwrap();
        assert_close(cp.config.angles(), &[0.0, PI / 3.0], 1e-12);
        assert_eq!(cp.class, CriticalPointClass::LocalMin);
    }

    #[test]
    fn newton_collision_input() {
        let err = newton_refine(&cfg(&[0.0, 1.0, 1.0]), &NewtonOptions::default()).unwrap_err();
        assert!(matches!(err, Error::CollisionApproach(_)));
    }

    #[test]
    fn descent_reaches_minimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let w = WedgeConfig::sample(9, 1e-2, &mut rng).unwrap();
        let opts = NewtonOptions::default();
        let theta = descend(&w.to_config(), 1e-8, &opts).unwrap();
        let cp = newton_refine(&theta, &opts).unwrap();
        assert_eq!(cp.class, CriticalPointClass::LocalMin);
    }

    #[test]
    fn search_n2_two_families() {
        let cat = multistart_search(2, 50, 0).unwrap();
        assert_eq!(cat.points.len(), 2);
        let classes: Vec<_> = cat.points.iter().map(|p| p.class).collect();
        assert_eq!(
            classes,
            vec![CriticalPointClass::LocalMin, CriticalPointClass::LocalMax]
        );
        assert_close(cat.points[0].config.angles(), &[0.0, PI / 3.0], 1e-12);
        assert_close(cat.points[1].config.angles(), &[0.0, PI], 1e-12);
        assert_eq!(
            cat.metadata.hits.iter().sum::<usize>(),
            cat.metadata.converged
        );
    }

    #[test]
    fn search_n3_three_families() {
        let cat = multistart_search(3, 200, 4).unwrap();
        assert_eq!(cat.points.len(), 3);
        let classes: Vec<_> = cat.points.iter().map(|p| p.class).collect();
        assert_eq!(
            classes,
            vec![
                CriticalPointClass::LocalMin,
                CriticalPointClass::Saddle,
                CriticalPointClass::LocalMax
            ]
        );
        // Minimum: two gaps of π/4; saddle: gaps π/2, 3π/4, 3π/4.
        assert_close(&cat.points[0].gaps(), &[PI / 4.0, PI / 4.0, 1.5 * PI], 1e-9);
        assert_close(
            &cat.points[1].gaps(),
            &[PI / 2.0, 0.75 * PI, 0.75 * PI],
            1e-9,
        );
        for p in &cat.points {
            assert!(p.residual < 1e-12);
            assert!(gradient(&p.config).unwrap().amax() < 1e-12);
            assert_eq!(&canonicalize(&p.config).unwrap(), &p.config);
        }
    }

    #[test]
    fn search_is_deterministic() {
        let a = multistart_search(5, 60, 17).unwrap();
        let b = multistart_search(5, 60, 17).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn search_argument_errors() {
        assert!(multistart_search(1, 10, 0).is_err());
        assert!(multistart_search(3, 0, 0).is_err());
    }

    #[test]
    fn morse_index_of_ngons() {
        for n in 4..=30 {
            let cp = newton_refine(&ngon(n).unwrap(), &NewtonOptions::default()).unwrap();
            assert_eq!(morse_index(&cp).as_tuple(), (2, 1, n - 3), "n={n}");
        }
    }
}
