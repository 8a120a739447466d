mod output;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use vortex_releq::continuation::{
    epsilon_ceiling, sweep_epsilon_with, verify_lemma1_scaling, ContinuationOptions,
    RelativeEquilibrium, ScalingReport,
};
use vortex_releq::critical_search::{multistart_search_with, FamilyCatalog, SearchOptions};
use vortex_releq::dynamics::{
    conservation_report, integrate_rk4, perturbation_growth_with, perturbed_configuration,
    rigidity_error, ConservationReport, GrowthOptions, GrowthReport, IntegrationError,
    PlanarConfiguration, Trajectory,
};
use vortex_releq::limit_potential::{hessian, ngon};
use vortex_releq::spectra::{ngon_spectrum_closed_form, symmetric_eigen};
use vortex_releq::stability::{
    asymptotic_eigenvalues, prediction_mismatch, stability_verdict_with, StabilityOptions,
    StabilityVerdict,
};
use vortex_releq::Error;

#[derive(Debug, Parser)]
#[command(
    name = "vortex-releq",
    version,
    about = "Relative equilibria of one strong and N weak point vortices"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Output file (written atomically); stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Zero tolerance. Absolute on Hessian eigenvalues for `find`, a factor
    /// of sqrt|eps| for `stability` and `simulate`.
    #[arg(long, global = true)]
    tol_zero: Option<f64>,
    /// Newton tolerance on the gradient (`find`) or the rotating-frame
    /// residual (`continue`).
    #[arg(long, global = true)]
    tol_newton: Option<f64>,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Include planar coordinates for plotting.
    #[arg(long, global = true)]
    plot_data: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Multistart search for critical points of the limit potential.
    Find {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        starts: usize,
    },
    /// Closed-form against dense Hessian spectrum of the regular N-gon.
    NgonSpectrum {
        #[arg(long)]
        n: usize,
    },
    /// Continue one catalog family to nonzero circulation ratios.
    Continue {
        /// JSON written by `find`.
        #[arg(long)]
        catalog: PathBuf,
        /// Index into the catalog's point list.
        #[arg(long)]
        family: usize,
        /// Comma-separated circulation ratios; may be repeated.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        eps: Vec<f64>,
    },
    /// Linear stability of continued equilibria.
    Stability {
        /// JSON written by `continue`.
        #[arg(long)]
        equilibria: PathBuf,
    },
    /// Integrate one equilibrium with fixed-step RK4.
    Simulate {
        #[arg(long)]
        equilibria: PathBuf,
        #[arg(long, default_value_t = 0)]
        index: usize,
        /// Time step.
        #[arg(long = "h")]
        h: f64,
        /// Final time.
        #[arg(long = "t")]
        t: f64,
        /// Norm of a random displacement of the weak vortices.
        #[arg(long, default_value_t = 0.0)]
        perturb: f64,
        /// CSV file for the sampled trajectory.
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum Failure {
    /// Bad arguments or unreadable input; exit code 2.
    Usage(String),
    /// The computation itself failed; exit code 1.
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidEpsilon(..) | Error::InvalidN(..) | Error::InvalidArgument(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Compute(e.to_string()),
        }
    }
}

fn write_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Compute(format!("cannot write {}: {e}", path.display()))
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    output::emit(out, bytes).map_err(|e| write_failure(out.unwrap_or(Path::new("<stdout>")), e))
}

#[derive(Debug, Serialize)]
struct RunConfig {
    command: CommandConfig,
    format: Format,
    out: Option<String>,
    seed: u64,
    tol_zero: Option<f64>,
    tol_newton: Option<f64>,
    plot_data: bool,
}

#[derive(Debug, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
enum CommandConfig {
    Find {
        n: usize,
        starts: usize,
        search: SearchOptions,
    },
    NgonSpectrum {
        n: usize,
    },
    Continue {
        catalog: String,
        family: usize,
        eps: Vec<f64>,
        continuation: ContinuationOptions,
    },
    Stability {
        equilibria: String,
        stability: StabilityOptions,
    },
    Simulate {
        equilibria: String,
        index: usize,
        h: f64,
        t: f64,
        perturb: f64,
        trajectory: Option<String>,
        growth: GrowthOptions,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let g = &cli.global;
    for (name, v) in [("--tol-zero", g.tol_zero), ("--tol-newton", g.tol_newton)] {
        if let Some(v) = v {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Failure::Usage(format!("{name} must be positive, got {v}")));
            }
        }
    }
    match &cli.command {
        Command::Find { n, starts } => run_find(g, *n, *starts),
        Command::NgonSpectrum { n } => run_ngon_spectrum(g, *n),
        Command::Continue {
            catalog,
            family,
            eps,
        } => run_continue(g, catalog, *family, eps),
        Command::Stability { equilibria } => run_stability(g, equilibria),
        Command::Simulate {
            equilibria,
            index,
            h,
            t,
            perturb,
            trajectory,
        } => run_simulate(
            g,
            equilibria,
            *index,
            *h,
            *t,
            *perturb,
            trajectory.as_deref(),
        ),
    }
}

fn config(g: &GlobalArgs, command: CommandConfig, format: Format) -> RunConfig {
    RunConfig {
        command,
        format,
        out: g.out.as_ref().map(|p| p.display().to_string()),
        seed: g.seed,
        tol_zero: None,
        tol_newton: None,
        plot_data: g.plot_data,
    }
}

fn json(cfg: &RunConfig, result: impl Serialize) -> Result<Vec<u8>, Failure> {
    output::json_document(cfg, result).map_err(|e| Failure::Compute(e.to_string()))
}

fn preamble(cfg: &RunConfig) -> Result<String, Failure> {
    let bytes = output::csv_preamble(cfg).map_err(|e| Failure::Compute(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Compute(e.to_string()))
}

fn xy(points: &[Complex64]) -> Vec<[f64; 2]> {
    points.iter().map(|z| [z.re, z.im]).collect()
}

#[derive(Serialize)]
struct FindResult<'a> {
    catalog: &'a FamilyCatalog,
    #[serde(skip_serializing_if = "Option::is_none")]
    plot_data: Option<Vec<Vec<[f64; 2]>>>,
}

fn run_find(g: &GlobalArgs, n: usize, starts: usize) -> Result<(), Failure> {
    let mut search = SearchOptions::default();
    if let Some(t) = g.tol_zero {
        search.zero_tol = t;
    }
    if let Some(t) = g.tol_newton {
        search.newton_tol = t;
    }
    let format = g.format.unwrap_or(Format::Json);
    let mut cfg = config(g, CommandConfig::Find { n, starts, search }, format);
    cfg.tol_zero = Some(search.zero_tol);
    cfg.tol_newton = Some(search.newton_tol);

    let catalog = multistart_search_with(n, starts, g.seed, &search)?;
    let unit_circle =
        |angles: &[f64]| -> Vec<[f64; 2]> { angles.iter().map(|a| [a.cos(), a.sin()]).collect() };
    let bytes = match format {
        Format::Json => {
            let plot_data = g.plot_data.then(|| {
                catalog
                    .points
                    .iter()
                    .map(|p| unit_circle(p.config.angles()))
                    .collect()
            });
            json(
                &cfg,
                FindResult {
                    catalog: &catalog,
                    plot_data,
                },
            )?
        }
        Format::Csv => {
            let mut s = preamble(&cfg)?;
            s.push_str(
                "family,class,negative,zero,positive,potential,residual,quantity,index,value\n",
            );
            for (f, p) in catalog.points.iter().enumerate() {
                let head = format!(
                    "{f},{:?},{},{},{},{:.16e},{:.16e}",
                    p.class,
                    p.morse_index.negative,
                    p.morse_index.zero,
                    p.morse_index.positive,
                    p.potential,
                    p.residual
                );
                let mut rows: Vec<(&str, Vec<f64>)> = vec![
                    ("angle", p.config.angles().to_vec()),
                    ("gap", p.gaps()),
                    (
                        "eigenvalue",
                        p.spectrum.eigenvalues.iter().map(|z| z.re).collect(),
                    ),
                ];
                if g.plot_data {
                    let pts = unit_circle(p.config.angles());
                    rows.push(("x", pts.iter().map(|q| q[0]).collect()));
                    rows.push(("y", pts.iter().map(|q| q[1]).collect()));
                }
                for (quantity, values) in rows {
                    for (k, v) in values.iter().enumerate() {
                        let _ = writeln!(s, "{head},{quantity},{k},{v:.16e}");
                    }
                }
            }
            s.into_bytes()
        }
    };
    emit(g.out.as_deref(), &bytes)
}

/// Reads a JSON input, accepting either a full output envelope or its bare
/// `result` payload.
fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut v: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("{} is not valid JSON: {e}", path.display())))?;
    if let Some(result) = v.get_mut("result") {
        v = result.take();
    }
    Ok(v)
}

fn decode<T: DeserializeOwned>(path: &Path, v: Value) -> Result<T, Failure> {
    serde_json::from_value(v)
        .map_err(|e| Failure::Usage(format!("unexpected contents in {}: {e}", path.display())))
}

fn read_catalog(path: &Path) -> Result<FamilyCatalog, Failure> {
    let mut v = read_json(path)?;
    if let Some(catalog) = v.get_mut("catalog") {
        v = catalog.take();
    }
    decode(path, v)
}

/// Equilibria from `continue` output, a bare array, or a single object.
fn read_equilibria(path: &Path) -> Result<Vec<RelativeEquilibrium>, Failure> {
    let mut v = read_json(path)?;
    if let Some(list) = v.get_mut("equilibria") {
        v = list.take();
    }
    if v.is_array() {
        decode(path, v)
    } else {
        Ok(vec![decode(path, v)?])
    }
}

#[derive(Serialize)]
struct SpectrumRow {
    rank: usize,
    closed_form: f64,
    dense: f64,
    abs_diff: f64,
}

#[derive(Serialize)]
struct NgonSpectrumResult {
    n: usize,
    /// Closed-form eigenvalue of Fourier mode `j`.
    by_mode: Vec<f64>,
    /// Both spectra sorted ascending and compared rank by rank.
    rows: Vec<SpectrumRow>,
    max_abs_diff: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    plot_data: Option<Vec<[f64; 2]>>,
}

fn run_ngon_spectrum(g: &GlobalArgs, n: usize) -> Result<(), Failure> {
    let format = g.format.unwrap_or(Format::Csv);
    let cfg = config(g, CommandConfig::NgonSpectrum { n }, format);
    let by_mode = ngon_spectrum_closed_form(n)?;
    let h = hessian(&ngon(n)?)?;
    let mut dense = symmetric_eigen(h.matrix())?.values;
    let mut closed = by_mode.clone();
    closed.sort_by(f64::total_cmp);
    dense.sort_by(f64::total_cmp);
    let rows: Vec<SpectrumRow> = closed
        .iter()
        .zip(&dense)
        .enumerate()
        .map(|(rank, (&c, &d))| SpectrumRow {
            rank,
            closed_form: c,
            dense: d,
            abs_diff: (c - d).abs(),
        })
        .collect();
    let max_abs_diff = rows.iter().map(|r| r.abs_diff).fold(0.0, f64::max);
    let bytes = match format {
        Format::Json => {
            let plot_data = g.plot_data.then(|| {
                (0..n)
                    .map(|k| {
                        let a = std::f64::consts::TAU * k as f64 / n as f64;
                        [a.cos(), a.sin()]
                    })
                    .collect()
            });
            json(
                &cfg,
                NgonSpectrumResult {
                    n,
                    by_mode,
                    rows,
                    max_abs_diff,
                    plot_data,
                },
            )?
        }
        Format::Csv => {
            let mut s = preamble(&cfg)?;
            s.push_str("rank,closed_form,dense,abs_diff\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{:.16e},{:.16e},{:.16e}",
                    r.rank, r.closed_form, r.dense, r.abs_diff
                );
            }
            s.into_bytes()
        }
    };
    emit(g.out.as_deref(), &bytes)
}

#[derive(Serialize)]
struct ScalingEntry {
    sign: &'static str,
    count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<ScalingReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

#[derive(Clone, Serialize)]
struct SweepFailureRecord {
    epsilon: f64,
    message: String,
}

#[derive(Serialize)]
struct ContinueResult {
    family: usize,
    n: usize,
    eps_ceiling: f64,
    equilibria: Vec<RelativeEquilibrium>,
    scaling: Vec<ScalingEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    failure: Option<SweepFailureRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    plot_data: Option<Vec<Vec<[f64; 2]>>>,
}

fn run_continue(
    g: &GlobalArgs,
    catalog_path: &Path,
    family: usize,
    eps: &[f64],
) -> Result<(), Failure> {
    let mut opts = ContinuationOptions::default();
    if let Some(t) = g.tol_newton {
        opts.releq_tol = t;
    }
    let format = g.format.unwrap_or(Format::Json);
    let mut cfg = config(
        g,
        CommandConfig::Continue {
            catalog: catalog_path.display().to_string(),
            family,
            eps: eps.to_vec(),
            continuation: opts,
        },
        format,
    );
    cfg.tol_newton = Some(opts.releq_tol);

    let catalog = read_catalog(catalog_path)?;
    let cp = catalog.points.get(family).ok_or_else(|| {
        Failure::Usage(format!(
            "family {family} out of range: catalog has {} points",
            catalog.points.len()
        ))
    })?;
    if let Some(&bad) = eps.iter().find(|e| **e == 0.0 || !e.is_finite()) {
        return Err(Error::InvalidEpsilon(bad, "must be finite and nonzero").into());
    }
    if cp.spectrum.zero_count != 1 {
        return Err(Error::DegenerateSeed(cp.spectrum.zero_count).into());
    }
    let ceiling = epsilon_ceiling(cp, &opts);
    if let Some(&bad) = eps.iter().find(|e| e.abs() > ceiling) {
        return Err(Failure::Usage(format!(
            "invalid circulation epsilon {bad}: |eps| exceeds the continuation ceiling {ceiling}"
        )));
    }

    let (equilibria, failure) = match sweep_epsilon_with(cp, eps, &opts) {
        Ok(list) => (list, None),
        Err(f) => (
            f.completed,
            Some(SweepFailureRecord {
                epsilon: f.failed_epsilon,
                message: f.error.to_string(),
            }),
        ),
    };
    let scaling = [("negative", -1.0), ("positive", 1.0)]
        .into_iter()
        .filter_map(|(sign, s)| {
            let fam: Vec<RelativeEquilibrium> = equilibria
                .iter()
                .filter(|e| e.epsilon * s > 0.0)
                .cloned()
                .collect();
            if fam.is_empty() {
                return None;
            }
            let (report, note) = match verify_lemma1_scaling(&fam) {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.to_string())),
            };
            Some(ScalingEntry {
                sign,
                count: fam.len(),
                report,
                note,
            })
        })
        .collect();

    let bytes = match format {
        Format::Json => {
            let plot_data = g
                .plot_data
                .then(|| equilibria.iter().map(|e| xy(&e.positions())).collect());
            json(
                &cfg,
                ContinueResult {
                    family,
                    n: cp.n(),
                    eps_ceiling: ceiling,
                    equilibria: equilibria.clone(),
                    scaling,
                    failure: failure.clone(),
                    plot_data,
                },
            )?
        }
        Format::Csv => {
            let mut s = preamble(&cfg)?;
            if let Some(f) = &failure {
                let _ = writeln!(s, "# failure at epsilon {}: {}", f.epsilon, f.message);
            }
            s.push_str("epsilon,omega,residual,vortex,r,theta,x,y\n");
            for e in &equilibria {
                for (k, z) in e.positions().iter().enumerate() {
                    let _ = writeln!(
                        s,
                        "{:.16e},{:.16e},{:.16e},{k},{:.16e},{:.16e},{:.16e},{:.16e}",
                        e.epsilon,
                        e.omega,
                        e.residual,
                        z.norm(),
                        z.arg(),
                        z.re,
                        z.im
                    );
                }
            }
            s.into_bytes()
        }
    };
    emit(g.out.as_deref(), &bytes)?;
    match failure {
        Some(f) => Err(Failure::Compute(format!(
            "continuation failed at epsilon {} after {} equilibria: {}",
            f.epsilon,
            equilibria.len(),
            f.message
        ))),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct StabilityEntry {
    index: usize,
    n: usize,
    epsilon: f64,
    verdict: StabilityVerdict,
    /// Leading-order eigenvalues from the seed Hessian, when the seed is
    /// nondegenerate.
    predicted: Option<Vec<Complex64>>,
    prediction_mismatch: Option<f64>,
}

#[derive(Serialize)]
struct StabilityResult {
    entries: Vec<StabilityEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    plot_data: Option<Vec<Vec<[f64; 2]>>>,
}

fn run_stability(g: &GlobalArgs, path: &Path) -> Result<(), Failure> {
    let mut opts = StabilityOptions::default();
    if let Some(t) = g.tol_zero {
        opts.zero_factor = t;
    }
    let format = g.format.unwrap_or(Format::Json);
    let mut cfg = config(
        g,
        CommandConfig::Stability {
            equilibria: path.display().to_string(),
            stability: opts,
        },
        format,
    );
    cfg.tol_zero = Some(opts.zero_factor);

    let equilibria = read_equilibria(path)?;
    let mut entries = Vec::with_capacity(equilibria.len());
    for (index, eq) in equilibria.iter().enumerate() {
        let verdict = stability_verdict_with(eq, &opts)?;
        let predicted = asymptotic_eigenvalues(&eq.source, eq.epsilon).ok();
        let prediction_mismatch = predicted
            .as_ref()
            .map(|p| prediction_mismatch(p, &verdict.spectrum.nonzero()));
        entries.push(StabilityEntry {
            index,
            n: eq.n(),
            epsilon: eq.epsilon,
            verdict,
            predicted,
            prediction_mismatch,
        });
    }
    let bytes = match format {
        Format::Json => {
            let plot_data = g.plot_data.then(|| {
                entries
                    .iter()
                    .map(|e| xy(&e.verdict.spectrum.eigenvalues))
                    .collect()
            });
            json(&cfg, StabilityResult { entries, plot_data })?
        }
        Format::Csv => {
            let mut s = preamble(&cfg)?;
            s.push_str("index,n,epsilon,classification,n_zero,max_real_part,instability_count,prediction_mismatch\n");
            for e in &entries {
                let mismatch = e
                    .prediction_mismatch
                    .map_or(String::new(), |m| format!("{m:.16e}"));
                let _ = writeln!(
                    s,
                    "{},{},{:.16e},{:?},{},{:.16e},{},{mismatch}",
                    e.index,
                    e.n,
                    e.epsilon,
                    e.verdict.classification,
                    e.verdict.n_zero,
                    e.verdict.max_real_part,
                    e.verdict.instability_count
                );
            }
            s.into_bytes()
        }
    };
    emit(g.out.as_deref(), &bytes)
}

#[derive(Serialize)]
struct CollisionRecord {
    time: f64,
    i: usize,
    j: usize,
    distance: f64,
}

#[derive(Serialize)]
struct SimulateResult {
    index: usize,
    n: usize,
    epsilon: f64,
    omega: f64,
    perturb: f64,
    step: f64,
    steps: usize,
    horizon: f64,
    rigidity_error: f64,
    conservation: ConservationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    growth: Option<GrowthReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    collision: Option<CollisionRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    plot_data: Option<Vec<Vec<[f64; 2]>>>,
}

/// At most this many trajectory samples go into `plot_data`.
const PLOT_SAMPLES: usize = 256;

#[allow(clippy::too_many_arguments)]
fn run_simulate(
    g: &GlobalArgs,
    path: &Path,
    index: usize,
    h: f64,
    t: f64,
    perturb: f64,
    trajectory_path: Option<&Path>,
) -> Result<(), Failure> {
    if g.format == Some(Format::Csv) {
        return Err(Failure::Usage(
            "simulate writes a JSON report; use --trajectory for CSV".into(),
        ));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Failure::Usage(format!("--h must be positive, got {h}")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Failure::Usage(format!("--t must be positive, got {t}")));
    }
    if !(perturb >= 0.0 && perturb.is_finite()) {
        return Err(Failure::Usage(format!(
            "--perturb must be nonnegative, got {perturb}"
        )));
    }
    let growth_opts = GrowthOptions {
        step: h,
        seed: g.seed,
        ..GrowthOptions::default()
    };
    let cfg = config(
        g,
        CommandConfig::Simulate {
            equilibria: path.display().to_string(),
            index,
            h,
            t,
            perturb,
            trajectory: trajectory_path.map(|p| p.display().to_string()),
            growth: growth_opts,
        },
        Format::Json,
    );

    let equilibria = read_equilibria(path)?;
    let eq = equilibria.get(index).ok_or_else(|| {
        Failure::Usage(format!(
            "index {index} out of range: {} equilibria in {}",
            equilibria.len(),
            path.display()
        ))
    })?;
    let start = if perturb > 0.0 {
        perturbed_configuration(eq, perturb, g.seed)?
    } else {
        PlanarConfiguration::from_equilibrium(eq)?
    };
    let (traj, collision) = match integrate_rk4(&start, h, t) {
        Ok(traj) => (traj, None),
        Err(IntegrationError::CollisionAbort {
            partial,
            time,
            i,
            j,
            distance,
        }) => (
            *partial,
            Some(CollisionRecord {
                time,
                i,
                j,
                distance,
            }),
        ),
        Err(IntegrationError::Invalid(e)) => return Err(e.into()),
    };
    if let Some(p) = trajectory_path {
        let mut s = preamble(&cfg)?.into_bytes();
        traj.write_csv(&mut s).map_err(|e| write_failure(p, e))?;
        output::emit(Some(p), &s).map_err(|e| write_failure(p, e))?;
    }
    let growth = if perturb > 0.0 && collision.is_none() {
        match perturbation_growth_with(eq, perturb, t, &growth_opts) {
            Ok(r) => Some(r),
            Err(IntegrationError::Invalid(e)) => return Err(e.into()),
            Err(e) => return Err(Failure::Compute(e.to_string())),
        }
    } else {
        None
    };
    let plot_data = g.plot_data.then(|| plot_samples(&traj));
    let result = SimulateResult {
        index,
        n: eq.n(),
        epsilon: eq.epsilon,
        omega: eq.omega,
        perturb,
        step: traj.step,
        steps: traj.len().saturating_sub(1),
        horizon: traj.times.last().copied().unwrap_or(0.0),
        rigidity_error: rigidity_error(&traj),
        conservation: conservation_report(&traj),
        growth,
        collision,
        plot_data,
    };
    let collided = result.collision.as_ref().map(|c| {
        format!(
            "collision at t = {}: vortices {} and {} at distance {:e}",
            c.time, c.i, c.j, c.distance
        )
    });
    emit(g.out.as_deref(), &json(&cfg, result)?)?;
    match collided {
        Some(msg) => Err(Failure::Compute(msg)),
        None => Ok(()),
    }
}

fn plot_samples(traj: &Trajectory) -> Vec<Vec<[f64; 2]>> {
    let stride = traj.len().div_ceil(PLOT_SAMPLES).max(1);
    let mut out: Vec<Vec<[f64; 2]>> = traj
        .states
        .iter()
        .step_by(stride)
        .map(|s| xy(&s.positions))
        .collect();
    if !(traj.len() - 1).is_multiple_of(stride) {
        if let Some(last) = traj.states.last() {
            out.push(xy(&last.positions));
        }
    }
    out
}
