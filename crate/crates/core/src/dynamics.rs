//! Direct integration of the (N+1)-vortex equations of motion.
//!
//! Positions are complex numbers; vortex 0 is the strong vortex (`Γ₀ = 1`),
//! the others carry `ε`. The velocity of vortex `j` is
//! `Σ_{i≠j} Γᵢ (qⱼ − qᵢ)^⊥ / |qⱼ − qᵢ|²` with `(x, y)^⊥ = (−y, x)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::io::{self, Write};

use crate::continuation::{Circulations, RelativeEquilibrium};
use crate::error::{Error, Result};
use crate::stability::stability_verdict;

/// Minimum separation accepted by [`vortex_field`] and [`hamiltonian`].
pub const COLLISION_GUARD: f64 = 1e-10;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Positions of the N+1 vortices together with their circulations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarConfiguration {
    pub positions: Vec<Complex64>,
    pub circulations: Circulations,
    /// `Σ Γᵢ qᵢ` at construction.
    pub center_of_vorticity: Complex64,
}

impl PlanarConfiguration {
    pub fn new(positions: Vec<Complex64>, circulations: Circulations) -> Result<Self> {
        if positions.len() < 2 {
            return Err(Error::InvalidN(positions.len().saturating_sub(1), 1));
        }
        check_separation(&positions)?;
        let center_of_vorticity = center(&positions, &circulations);
        Ok(Self {
            positions,
            circulations,
            center_of_vorticity,
        })
    }

    pub fn from_equilibrium(eq: &RelativeEquilibrium) -> Result<Self> {
        Self::new(eq.positions(), eq.circulations())
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    fn with_positions(&self, positions: Vec<Complex64>) -> Self {
        Self {
            positions,
            circulations: self.circulations,
            center_of_vorticity: self.center_of_vorticity,
        }
    }
}

fn center(q: &[Complex64], c: &Circulations) -> Complex64 {
    q.iter().enumerate().map(|(k, z)| c.gamma(k) * z).sum()
}

fn closest_pair(q: &[Complex64]) -> (f64, usize, usize) {
    let mut best = (f64::INFINITY, 0, 0);
    for j in 0..q.len() {
        for i in 0..j {
            let d = (q[j] - q[i]).norm();
            if d < best.0 {
                best = (d, i, j);
            }
        }
    }
    best
}

fn check_separation(q: &[Complex64]) -> Result<()> {
    let (d, i, j) = closest_pair(q);
    if !(d > COLLISION_GUARD) {
        return Err(Error::VortexCollision { i, j, distance: d });
    }
    Ok(())
}

fn field_unchecked(q: &[Complex64], c: &Circulations) -> Vec<Complex64> {
    (0..q.len())
        .map(|j| {
            let mut v = Complex64::new(0.0, 0.0);
            for (i, qi) in q.iter().enumerate() {
                if i != j {
                    v += c.gamma(i) / (q[j] - qi).conj();
                }
            }
            I * v
        })
        .collect()
}

/// Velocities of all vortices.
pub fn vortex_field(c: &PlanarConfiguration) -> Result<Vec<Complex64>> {
    check_separation(&c.positions)?;
    Ok(field_unchecked(&c.positions, &c.circulations))
}

/// `H = −Σ_{i<j} ΓᵢΓⱼ log|qᵢ − qⱼ|`.
pub fn hamiltonian(c: &PlanarConfiguration) -> Result<f64> {
    check_separation(&c.positions)?;
    Ok(hamiltonian_unchecked(&c.positions, &c.circulations))
}

fn hamiltonian_unchecked(q: &[Complex64], c: &Circulations) -> f64 {
    let mut h = 0.0;
    for j in 0..q.len() {
        for i in 0..j {
            h -= c.gamma(i) * c.gamma(j) * (q[i] - q[j]).norm().ln();
        }
    }
    h
}

/// `Σ Γᵢ |qᵢ|²`.
pub fn moment(c: &PlanarConfiguration) -> f64 {
    c.positions
        .iter()
        .enumerate()
        .map(|(k, z)| c.circulations.gamma(k) * z.norm_sqr())
        .sum()
}

/// Sampled solution of the equations of motion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PlanarConfiguration>,
    pub step: f64,
    pub integrator: String,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// CSV with header `t,x0,y0,…,xN,yN`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let n = self.states.first().map_or(0, |s| s.len());
        write!(w, "t")?;
        for k in 0..n {
            write!(w, ",x{k},y{k}")?;
        }
        writeln!(w)?;
        for (t, s) in self.times.iter().zip(&self.states) {
            write!(w, "{t:.16e}")?;
            for z in &s.positions {
                write!(w, ",{:.16e},{:.16e}", z.re, z.im)?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Why an integration stopped early or did not start.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IntegrationError {
    #[error("collision abort at t = {time}: vortices {i} and {j} at distance {distance:e}")]
    CollisionAbort {
        partial: Box<Trajectory>,
        time: f64,
        i: usize,
        j: usize,
        distance: f64,
    },
    #[error(transparent)]
    Invalid(#[from] Error),
}

const RK4_NAME: &str = "rk4";

/// Classical fixed-step RK4 from `0` to `t_end`. The step is shrunk to
/// `t_end / ceil(t_end / h)` so the last sample lands on `t_end`. Every step
/// is sampled. Integration aborts when two vortices come within
/// `10 · COLLISION_GUARD`.
pub fn integrate_rk4(
    c: &PlanarConfiguration,
    h: f64,
    t_end: f64,
) -> std::result::Result<Trajectory, IntegrationError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {h}")).into());
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(
            Error::InvalidArgument(format!("horizon must be positive, got {t_end}")).into(),
        );
    }
    check_separation(&c.positions)?;
    let steps = (t_end / h - 1e-9).ceil().max(1.0) as usize;
    let step = t_end / steps as f64;
    let circ = c.circulations;
    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        step,
        integrator: RK4_NAME.into(),
    };
    traj.times.push(0.0);
    traj.states.push(c.clone());
    let mut q = c.positions.clone();
    let axpy = |q: &[Complex64], k: &[Complex64], a: f64| -> Vec<Complex64> {
        q.iter().zip(k).map(|(x, v)| x + v * a).collect()
    };
    for s in 1..=steps {
        let k1 = field_unchecked(&q, &circ);
        let k2 = field_unchecked(&axpy(&q, &k1, step / 2.0), &circ);
        let k3 = field_unchecked(&axpy(&q, &k2, step / 2.0), &circ);
        let k4 = field_unchecked(&axpy(&q, &k3, step), &circ);
        for k in 0..q.len() {
            q[k] += (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]) * (step / 6.0);
        }
        let (d, i, j) = closest_pair(&q);
        if !(d >= 10.0 * COLLISION_GUARD) {
            return Err(IntegrationError::CollisionAbort {
                partial: Box::new(traj),
                time: s as f64 * step,
                i,
                j,
                distance: d,
            });
        }
        traj.times.push(s as f64 * step);
        traj.states.push(c.with_positions(q.clone()));
    }
    Ok(traj)
}

/// `max_t max_{i<j} | |qᵢ(t)−qⱼ(t)| − |qᵢ(0)−qⱼ(0)| |`.
pub fn rigidity_error(t: &Trajectory) -> f64 {
    let Some(first) = t.states.first() else {
        return 0.0;
    };
    let q0 = &first.positions;
    let mut worst: f64 = 0.0;
    for s in &t.states {
        let q = &s.positions;
        for j in 0..q.len() {
            for i in 0..j {
                worst = worst.max(((q[i] - q[j]).norm() - (q0[i] - q0[j]).norm()).abs());
            }
        }
    }
    worst
}

/// Largest drifts of the first integrals along a trajectory, each relative to
/// a scale that does not vanish at small `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    /// `max |H(t) − H(0)| / Σ_{i<j} |ΓᵢΓⱼ|`.
    pub hamiltonian_drift: f64,
    /// `max |M(t) − M(0)| / Σ |Γᵢ||qᵢ(0)|²` for `M = Σ Γᵢ|qᵢ|²`.
    pub moment_drift: f64,
    /// `max |C(t) − C(0)| / Σ |Γᵢ||qᵢ(0)|` for `C = Σ Γᵢqᵢ`.
    pub center_drift: f64,
}

pub fn conservation_report(t: &Trajectory) -> ConservationReport {
    let Some(first) = t.states.first() else {
        return ConservationReport {
            hamiltonian_drift: 0.0,
            moment_drift: 0.0,
            center_drift: 0.0,
        };
    };
    let circ = first.circulations;
    let n = first.len();
    let g: Vec<f64> = (0..n).map(|k| circ.gamma(k)).collect();
    let mut pair_scale = 0.0;
    for j in 0..n {
        for i in 0..j {
            pair_scale += (g[i] * g[j]).abs();
        }
    }
    let moment_scale: f64 = (0..n)
        .map(|k| g[k].abs() * first.positions[k].norm_sqr())
        .sum();
    let center_scale: f64 = (0..n).map(|k| g[k].abs() * first.positions[k].norm()).sum();
    let h0 = hamiltonian_unchecked(&first.positions, &circ);
    let m0 = moment(first);
    let c0 = center(&first.positions, &circ);
    let mut rep = ConservationReport {
        hamiltonian_drift: 0.0,
        moment_drift: 0.0,
        center_drift: 0.0,
    };
    for s in &t.states {
        rep.hamiltonian_drift = rep
            .hamiltonian_drift
            .max((hamiltonian_unchecked(&s.positions, &circ) - h0).abs());
        rep.moment_drift = rep.moment_drift.max((moment(s) - m0).abs());
        rep.center_drift = rep
            .center_drift
            .max((center(&s.positions, &circ) - c0).norm());
    }
    rep.hamiltonian_drift /= pair_scale;
    rep.moment_drift /= moment_scale;
    rep.center_drift /= center_scale;
    rep
}

/// Settings for [`perturbation_growth_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthOptions {
    pub step: f64,
    /// Seed for the random perturbation direction.
    pub seed: u64,
    /// Upper end of the fitting window on the deviation.
    pub window_max: f64,
    /// Lower end of the window as a multiple of the amplitude.
    pub window_min_factor: f64,
}

impl Default for GrowthOptions {
    fn default() -> Self {
        Self {
            step: std::f64::consts::TAU / 512.0,
            seed: 0,
            window_max: 1e-2,
            window_min_factor: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub amplitude: f64,
    pub horizon: f64,
    /// Slope of the least-squares fit of `log(deviation)` against time, where
    /// the deviation is the distance to the orbit `{e^{iα} q(0)}` of the
    /// unperturbed equilibrium.
    pub fitted_rate: f64,
    /// Same fit against the fixed-phase solution `e^{iωt} q(0)`. Neutral
    /// perturbations that change the rotation rate make this deviation grow
    /// linearly, which biases the fit.
    pub fixed_phase_rate: f64,
    /// Largest real part of the linearization spectrum.
    pub predicted_rate: f64,
    /// `(t_start, t_end)` of the fitted samples.
    pub window: (f64, f64),
    pub window_samples: usize,
    /// The deviation never entered the window; the fit uses every sample
    /// with positive deviation.
    pub window_fallback: bool,
    pub final_deviation: f64,
    pub max_deviation: f64,
}

/// The equilibrium with its weak vortices displaced by a random vector of
/// norm `amplitude` drawn from `seed`; the strong vortex is moved to keep the
/// center of vorticity at the origin.
pub fn perturbed_configuration(
    eq: &RelativeEquilibrium,
    amplitude: f64,
    seed: u64,
) -> Result<PlanarConfiguration> {
    if !(amplitude >= 0.0 && amplitude.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "amplitude must be nonnegative, got {amplitude}"
        )));
    }
    let base = eq.positions();
    let n = eq.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dir: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let norm = dir.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut weak: Vec<Complex64> = base[1..]
        .iter()
        .zip(&dir)
        .map(|(q, d)| q + d * (amplitude / norm))
        .collect();
    let mut q = Vec::with_capacity(n + 1);
    q.push(-eq.epsilon * weak.iter().sum::<Complex64>());
    q.append(&mut weak);
    PlanarConfiguration::new(q, eq.circulations())
}

pub fn perturbation_growth(
    eq: &RelativeEquilibrium,
    amplitude: f64,
    t_end: f64,
) -> std::result::Result<GrowthReport, IntegrationError> {
    perturbation_growth_with(eq, amplitude, t_end, &GrowthOptions::default())
}

/// Integrates the equilibrium with its weak vortices displaced by a random
/// vector of norm `amplitude` (the strong vortex is moved to keep the center
/// of vorticity), and fits the growth of the distance to the exact rigidly
/// rotating solution.
pub fn perturbation_growth_with(
    eq: &RelativeEquilibrium,
    amplitude: f64,
    t_end: f64,
    opts: &GrowthOptions,
) -> std::result::Result<GrowthReport, IntegrationError> {
    let base = eq.positions();
    let start = perturbed_configuration(eq, amplitude, opts.seed)?;
    let traj = integrate_rk4(&start, opts.step, t_end)?;

    let mut fixed_phase = Vec::with_capacity(traj.len());
    let mut orbital = Vec::with_capacity(traj.len());
    for (&t, st) in traj.times.iter().zip(&traj.states) {
        let rot = Complex64::from_polar(1.0, eq.omega * t);
        fixed_phase.push(distance(&st.positions, &base, rot));
        let overlap: Complex64 = base
            .iter()
            .zip(&st.positions)
            .map(|(b, a)| b.conj() * a)
            .sum();
        let best = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            rot
        };
        orbital.push(distance(&st.positions, &base, best));
    }
    let fit = |dev: &[f64]| -> (f64, Vec<usize>, bool) {
        let lo = opts.window_min_factor * amplitude;
        let mut idx: Vec<usize> = Vec::new();
        for (k, &d) in dev.iter().enumerate() {
            if d > opts.window_max {
                break;
            }
            if d >= lo && d > 0.0 {
                idx.push(k);
            }
        }
        let fallback = idx.len() < 2;
        if fallback {
            idx = (1..dev.len()).filter(|&k| dev[k] > 0.0).collect();
        }
        let rate = fit_slope(
            idx.iter().map(|&k| traj.times[k]),
            idx.iter().map(|&k| dev[k].ln()),
        );
        (rate, idx, fallback)
    };
    let (fitted_rate, idx, window_fallback) = fit(&orbital);
    let (fixed_phase_rate, _, _) = fit(&fixed_phase);
    let predicted_rate = stability_verdict(eq)?.max_real_part.max(0.0);
    Ok(GrowthReport {
        amplitude,
        horizon: t_end,
        fitted_rate,
        predicted_rate,
        window: (
            idx.first().map_or(0.0, |&k| traj.times[k]),
            idx.last().map_or(0.0, |&k| traj.times[k]),
        ),
        window_samples: idx.len(),
        window_fallback,
        fixed_phase_rate,
        final_deviation: *orbital.last().unwrap_or(&0.0),
        max_deviation: orbital.iter().copied().fold(0.0, f64::max),
    })
}

fn distance(a: &[Complex64], b: &[Complex64], rot: Complex64) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - rot * y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn fit_slope(x: impl Iterator<Item = f64> + Clone, y: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = x.clone().count() as f64;
    if n < 2.0 {
        return 0.0;
    }
    let mx = x.clone().sum::<f64>() / n;
    let my = y.clone().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (a, b) in x.zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuation::{continue_equilibrium, ngon_equilibrium};
    use crate::critical_search::multistart_search;
    use std::f64::consts::{E, TAU};

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    #[test]
    fn two_vortex_field() {
        let eps = 0.3;
        let cfg = PlanarConfiguration::new(vec![c(0.0, 0.0), c(1.0, 0.0)], Circulations::new(eps))
            .unwrap();
        let v = vortex_field(&cfg).unwrap();
        assert!((v[0] - c(0.0, -eps)).norm() < 1e-15);
        assert!((v[1] - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn center_of_vorticity_is_stationary() {
        let q = vec![c(0.1, -0.2), c(1.0, 0.3), c(-0.4, 0.9), c(0.2, -1.1)];
        let cfg = PlanarConfiguration::new(q, Circulations::new(-0.37)).unwrap();
        let v = vortex_field(&cfg).unwrap();
        let s: Complex64 = v
            .iter()
            .enumerate()
            .map(|(k, z)| cfg.circulations.gamma(k) * z)
            .sum();
        assert!(s.norm() < 1e-15);
    }

    #[test]
    fn hamiltonian_fixtures() {
        let unit = Circulations::new(1.0);
        let at = |d: f64| PlanarConfiguration::new(vec![c(0.0, 0.0), c(d, 0.0)], unit).unwrap();
        assert_eq!(hamiltonian(&at(1.0)).unwrap(), 0.0);
        assert!((hamiltonian(&at(E)).unwrap() + 1.0).abs() < 1e-15);
        let q = vec![c(0.1, 0.2), c(1.0, -0.5), c(-0.7, 0.4), c(0.3, 1.2)];
        let h = hamiltonian(&PlanarConfiguration::new(q.clone(), unit).unwrap()).unwrap();
        let s = 2.5;
        let scaled: Vec<Complex64> = q.iter().map(|z| z * s).collect();
        let hs = hamiltonian(&PlanarConfiguration::new(scaled, unit).unwrap()).unwrap();
        assert!((h - hs - 6.0 * s.ln()).abs() < 1e-13);
    }

    #[test]
    fn collision_is_rejected() {
        let err = PlanarConfiguration::new(vec![c(0.0, 0.0), c(0.0, 0.0)], Circulations::new(1.0));
        assert!(matches!(err, Err(Error::VortexCollision { .. })));
    }

    #[test]
    fn equilibrium_field_is_rigid_rotation() {
        let eq = ngon_equilibrium(5, 0.01).unwrap();
        let cfg = PlanarConfiguration::from_equilibrium(&eq).unwrap();
        let v = vortex_field(&cfg).unwrap();
        for (z, w) in cfg.positions.iter().zip(&v) {
            assert!((w - I * z).norm() < 1e-12);
        }
    }

    #[test]
    fn rigidity_of_exact_rotation_samples_is_zero() {
        let eq = ngon_equilibrium(4, 0.01).unwrap();
        let cfg = PlanarConfiguration::from_equilibrium(&eq).unwrap();
        let states = (0..10)
            .map(|k| {
                let rot = Complex64::from_polar(1.0, k as f64 * 0.3);
                cfg.with_positions(cfg.positions.iter().map(|z| z * rot).collect())
            })
            .collect();
        let t = Trajectory {
            times: (0..10).map(|k| k as f64).collect(),
            states,
            step: 1.0,
            integrator: "exact".into(),
        };
        assert!(rigidity_error(&t) < 1e-14);
    }

    #[test]
    fn generic_configuration_shears() {
        let q = vec![c(0.0, 0.0), c(1.0, 0.1), c(-0.3, 0.8), c(0.5, -0.9)];
        let cfg = PlanarConfiguration::new(q, Circulations::new(0.4)).unwrap();
        let t = integrate_rk4(&cfg, 1e-3, 1.0).unwrap();
        assert!(rigidity_error(&t) > 1e-3);
    }

    #[test]
    fn continued_min_rotates_rigidly_and_conserves() {
        let cat = multistart_search(3, 200, 2).unwrap();
        let eq = continue_equilibrium(&cat.points[0], 1e-3).unwrap();
        let cfg = PlanarConfiguration::from_equilibrium(&eq).unwrap();
        let t = integrate_rk4(&cfg, TAU / 4096.0, TAU).unwrap();
        assert_eq!(t.len(), 4097);
        assert!(rigidity_error(&t) < 1e-6);
        let rep = conservation_report(&t);
        assert!(rep.hamiltonian_drift < 1e-8 && rep.moment_drift < 1e-8 && rep.center_drift < 1e-8);
    }

    #[test]
    fn invalid_step_and_horizon() {
        let eq = ngon_equilibrium(3, 0.01).unwrap();
        let cfg = PlanarConfiguration::from_equilibrium(&eq).unwrap();
        assert!(matches!(
            integrate_rk4(&cfg, 0.0, 1.0),
            Err(IntegrationError::Invalid(_))
        ));
        assert!(matches!(
            integrate_rk4(&cfg, 0.1, -1.0),
            Err(IntegrationError::Invalid(_))
        ));
    }

    #[test]
    fn close_pair_aborts_with_partial_trajectory() {
        // Opposite circulations translate rigidly, keeping a separation that
        // passes construction but sits inside the abort guard.
        let q = vec![c(0.0, 0.0), c(5e-10, 0.0)];
        let cfg = PlanarConfiguration::new(q, Circulations::new(-1.0)).unwrap();
        match integrate_rk4(&cfg, 1e-12, 1e-10) {
            Err(IntegrationError::CollisionAbort { partial, i, j, .. }) => {
                assert_eq!(partial.len(), 1);
                assert_eq!((i, j), (0, 1));
            }
            other => panic!("expected abort, got {other:?}"),
        }
    }

    #[test]
    fn zero_amplitude_stays_on_the_rotation() {
        let eq = ngon_equilibrium(3, 1e-3).unwrap();
        let opts = GrowthOptions {
            step: TAU / 4096.0,
            ..GrowthOptions::default()
        };
        let rep = perturbation_growth_with(&eq, 0.0, TAU, &opts).unwrap();
        assert!(rep.max_deviation < 1e-10, "{}", rep.max_deviation);
    }

    #[test]
    fn csv_layout() {
        let eq = ngon_equilibrium(2, 0.01).unwrap();
        let cfg = PlanarConfiguration::from_equilibrium(&eq).unwrap();
        let t = integrate_rk4(&cfg, 0.5, 1.0).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,x0,y0,x1,y1,x2,y2");
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[1].split(',').count(), 7);
    }
}
