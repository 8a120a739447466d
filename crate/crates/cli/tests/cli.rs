use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;
use vortex_releq::continuation::ngon_equilibrium;

const BIN: &str = env!("CARGO_BIN_EXE_vortex-releq");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    assert!(
        o.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).display().to_string()
}

/// N = 3 catalog written to `cat.json` in `dir`.
fn catalog3(dir: &TempDir) -> String {
    let cat = path(dir, "cat.json");
    let o = run(&["find", "--n", "3", "--starts", "200", "--out", &cat]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    cat
}

fn family_index(catalog: &Value, class: &str) -> usize {
    catalog["result"]["catalog"]["points"]
        .as_array()
        .unwrap()
        .iter()
        .position(|p| p["class"] == class)
        .unwrap()
}

#[test]
fn find_reports_three_families_for_four_vortices() {
    let v = stdout_json(&run(&["find", "--n", "4", "--starts", "400"]));
    let points = v["result"]["catalog"]["points"].as_array().unwrap();
    assert_eq!(points.len(), 3);
    for p in points {
        assert!(p["residual"].as_f64().unwrap() < 1e-12);
    }
    assert_eq!(v["tool"]["name"], "vortex-releq");
    assert_eq!(v["config"]["command"]["name"], "find");
    assert_eq!(v["config"]["seed"], 1);
}

#[test]
fn find_reports_two_families_for_two_vortices() {
    let v = stdout_json(&run(&["find", "--n", "2", "--starts", "100"]));
    assert_eq!(
        v["result"]["catalog"]["points"].as_array().unwrap().len(),
        2
    );
}

#[test]
fn find_rejects_a_single_vortex() {
    let o = run(&["find", "--n", "1"]);
    assert_eq!(code(&o), 2);
    assert!(o.stdout.is_empty());
}

#[test]
fn find_csv_has_preamble_and_rows() {
    let o = run(&["find", "--n", "3", "--starts", "50", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# vortex-releq "));
    assert!(lines.next().unwrap().starts_with("# config: {"));
    assert_eq!(
        lines.next().unwrap(),
        "family,class,negative,zero,positive,potential,residual,quantity,index,value"
    );
    assert!(text.lines().any(|l| l.contains(",eigenvalue,")));
}

#[test]
fn ngon_spectrum_of_the_square() {
    let v = stdout_json(&run(&["ngon-spectrum", "--n", "4", "--format", "json"]));
    let modes: Vec<f64> = v["result"]["by_mode"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    let want = [0.0, -0.5, 2.0, -0.5];
    for (a, b) in modes.iter().zip(want) {
        assert!((a - b).abs() < 1e-12, "{modes:?}");
    }
    assert!(v["result"]["max_abs_diff"].as_f64().unwrap() < 1e-12);
}

#[test]
fn ngon_spectrum_pentagon_contains_three() {
    let v = stdout_json(&run(&["ngon-spectrum", "--n", "5", "--format", "json"]));
    let modes = v["result"]["by_mode"].as_array().unwrap();
    let threes = modes
        .iter()
        .filter(|x| (x.as_f64().unwrap() - 3.0).abs() < 1e-12)
        .count();
    assert_eq!(threes, 2);
}

#[test]
fn ngon_spectrum_dense_agrees_at_hundred() {
    let v = stdout_json(&run(&["ngon-spectrum", "--n", "100", "--format", "json"]));
    assert!(v["result"]["max_abs_diff"].as_f64().unwrap() < 1e-9);
}

#[test]
fn ngon_spectrum_defaults_to_csv() {
    let o = run(&["ngon-spectrum", "--n", "6"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().nth(2), Some("rank,closed_form,dense,abs_diff"));
    assert_eq!(text.lines().count(), 3 + 6);
}

#[test]
fn continue_then_stability_on_the_triangle_minimum() {
    let dir = TempDir::new().unwrap();
    let cat = catalog3(&dir);
    let min = family_index(&read_json(Path::new(&cat)), "LocalMin");
    let eq = path(&dir, "eq.json");
    let o = run(&[
        "continue",
        "--catalog",
        &cat,
        "--family",
        &min.to_string(),
        "--eps",
        "-1e-3,1e-3",
        "--out",
        &eq,
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(Path::new(&eq));
    let eqs = v["result"]["equilibria"].as_array().unwrap();
    assert_eq!(eqs.len(), 2);
    for e in eqs {
        assert!(e["residual"].as_f64().unwrap() < 1e-12);
    }

    let s = stdout_json(&run(&["stability", "--equilibria", &eq]));
    for entry in s["result"]["entries"].as_array().unwrap() {
        let eps = entry["epsilon"].as_f64().unwrap();
        let want = if eps > 0.0 {
            "LinearlyStable"
        } else {
            "LinearlyUnstable"
        };
        assert_eq!(entry["verdict"]["classification"], want, "eps {eps}");
        assert!(entry["prediction_mismatch"].as_f64().unwrap() < 1e-2);
    }
}

#[test]
fn continue_rejects_zero_epsilon() {
    let dir = TempDir::new().unwrap();
    let cat = catalog3(&dir);
    let o = run(&[
        "continue",
        "--catalog",
        &cat,
        "--family",
        "0",
        "--eps",
        "1e-3,0",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn continue_rejects_epsilon_over_the_ceiling() {
    let dir = TempDir::new().unwrap();
    let cat = catalog3(&dir);
    let o = run(&[
        "continue",
        "--catalog",
        &cat,
        "--family",
        "0",
        "--eps",
        "0.5",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn continue_reports_a_degenerate_seed() {
    let dir = TempDir::new().unwrap();
    let cat = catalog3(&dir);
    let mut v = read_json(Path::new(&cat));
    v["result"]["catalog"]["points"][0]["spectrum"]["zero_count"] = 2.into();
    let bad = path(&dir, "degenerate.json");
    std::fs::write(&bad, serde_json::to_string(&v).unwrap()).unwrap();
    let o = run(&[
        "continue",
        "--catalog",
        &bad,
        "--family",
        "0",
        "--eps",
        "1e-3",
    ]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("degenerate"));
}

#[test]
fn unreadable_input_is_a_usage_error() {
    let o = run(&["stability", "--equilibria", "/nonexistent/equilibria.json"]);
    assert_eq!(code(&o), 2);
}

fn write_equilibria(
    dir: &TempDir,
    eqs: &[vortex_releq::continuation::RelativeEquilibrium],
) -> String {
    let p = path(dir, "eqs.json");
    std::fs::write(&p, serde_json::to_string(eqs).unwrap()).unwrap();
    p
}

#[test]
fn simulate_keeps_the_polygon_rigid() {
    let dir = TempDir::new().unwrap();
    let eqs = write_equilibria(&dir, &[ngon_equilibrium(25, 1e-3).unwrap()]);
    let traj = path(&dir, "traj.csv");
    let v = stdout_json(&run(&[
        "simulate",
        "--equilibria",
        &eqs,
        "--h",
        "0.01",
        "--t",
        "6.283185307179586",
        "--trajectory",
        &traj,
    ]));
    let r = &v["result"];
    assert!(r["rigidity_error"].as_f64().unwrap() < 1e-9);
    assert!(r["conservation"]["hamiltonian_drift"].as_f64().unwrap() < 1e-10);
    let csv = std::fs::read_to_string(&traj).unwrap();
    let header = csv.lines().nth(2).unwrap();
    assert!(header.starts_with("t,x0,y0,x1,y1,"));
    assert_eq!(
        csv.lines().count() - 3,
        r["steps"].as_u64().unwrap() as usize + 1
    );
}

#[test]
fn simulate_rejects_nonpositive_step() {
    let dir = TempDir::new().unwrap();
    let eqs = write_equilibria(&dir, &[ngon_equilibrium(3, 1e-3).unwrap()]);
    for h in ["0", "-0.1"] {
        let o = run(&["simulate", "--equilibria", &eqs, "--h", h, "--t", "1"]);
        assert_eq!(code(&o), 2, "h = {h}");
    }
}

#[test]
fn simulate_collision_aborts_with_partial_trajectory() {
    let dir = TempDir::new().unwrap();
    // One weak vortex of nearly opposite circulation, 5e-10 from the strong
    // one: the pair translates almost rigidly inside the abort guard.
    let mut eq = ngon_equilibrium(2, 1e-3).unwrap();
    eq.r = vec![1.0];
    eq.theta = vec![0.0];
    eq.epsilon = -1.0 + 5e-10;
    let eqs = write_equilibria(&dir, &[eq]);
    let traj = path(&dir, "partial.csv");
    let o = run(&[
        "simulate",
        "--equilibria",
        &eqs,
        "--h",
        "1e-12",
        "--t",
        "1e-10",
        "--trajectory",
        &traj,
    ]);
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["result"]["collision"]["distance"].as_f64().unwrap() < 1e-9);
    let csv = std::fs::read_to_string(&traj).unwrap();
    assert_eq!(csv.lines().count(), 3 + 1);
}

#[test]
fn output_is_deterministic() {
    let args = ["find", "--n", "4", "--starts", "200", "--seed", "7"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_file_matches_stdout_apart_from_config() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "spectrum.json");
    let o = run(&[
        "ngon-spectrum",
        "--n",
        "7",
        "--format",
        "json",
        "--out",
        &out,
    ]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let from_file = read_json(Path::new(&out));
    let from_stdout = stdout_json(&run(&["ngon-spectrum", "--n", "7", "--format", "json"]));
    assert_eq!(from_file["result"], from_stdout["result"]);
    assert_eq!(from_file["config"]["out"], out.as_str());
}
