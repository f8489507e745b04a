use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_stencilcert");

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn file(&self, name: &str, content: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        fs::write(&p, content).unwrap();
        p
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(BIN)
            .current_dir(self.dir.path())
            .args(args)
            .output()
            .unwrap()
    }
}

fn config(kernel: &str, alpha: &str, center: &str, points: &str) -> String {
    format!(
        r#"{{"kernel": {kernel}, "operator": [{{"alpha": {alpha}, "coeff": 1}}], "center": {center}, "points": "{points}"}}"#
    )
}

const PHS3: &str = r#"{"family": "phs", "nu": 3, "s": 2}"#;

fn midpoint(fx: &Fixture) -> PathBuf {
    fx.file("pts.csv", "0\n1\n");
    fx.file("midpoint.json", &config(PHS3, "[0]", "[0.5]", "pts.csv"))
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn midpoint_weights_csv() {
    let fx = Fixture::new();
    let cfg = midpoint(&fx);
    let out = fx.run(&["weights", "--config", path_str(&cfg)]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "0.5\n0.5\n");
}

#[test]
fn weights_report_and_out_file() {
    let fx = Fixture::new();
    let cfg = midpoint(&fx);
    let out = fx.run(&[
        "weights",
        "--config",
        path_str(&cfg),
        "--out",
        "w.csv",
        "--report",
        "w.json",
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(fs::read_to_string(fx.dir.path().join("w.csv")).unwrap(), "0.5\n0.5\n");
    let rep: Value = serde_json::from_str(&fs::read_to_string(fx.dir.path().join("w.json")).unwrap()).unwrap();
    assert_eq!(rep["schema"], "stencilcert/1");
    assert_eq!(rep["diagnostics"]["rank"], 2);
    assert_eq!(rep["diagnostics"]["route"], "symmetric_indefinite");
}

#[test]
fn midpoint_certificate() {
    let fx = Fixture::new();
    let cfg = midpoint(&fx);
    let rep = json(&fx.run(&["certify", "--config", path_str(&cfg)]));
    assert_eq!(rep["schema"], "stencilcert/1");
    assert_eq!(rep["p"].as_f64().unwrap(), 0.5);
    assert!((rep["rho"].as_f64().unwrap() - 0.353553).abs() < 1e-6);
    assert!((rep["rhs"].as_f64().unwrap() - 0.816497).abs() < 1e-6);
    assert_eq!(rep["certified"], true);
    assert_eq!(rep["power"]["literal_shortcut"].as_f64().unwrap(), -0.125);
    assert_eq!(rep["bound"]["phi_seminorm"]["mode"], "exact_closed_form");
    assert_eq!(rep["growth"]["q"], 2);
}

#[test]
fn center_on_a_node_gives_zero_bound() {
    let fx = Fixture::new();
    fx.file("pts.csv", "0\n1\n-0.5\n");
    let cfg = fx.file("c.json", &config(PHS3, "[0]", "[0]", "pts.csv"));
    let rep = json(&fx.run(&["certify", "--config", path_str(&cfg)]));
    assert_eq!(rep["p"].as_f64().unwrap(), 0.0);
    assert_eq!(rep["rho"].as_f64().unwrap(), 0.0);
    assert_eq!(rep["rhs"].as_f64().unwrap(), 0.0);
}

#[test]
fn wendland_without_polynomials() {
    let fx = Fixture::new();
    fx.file("pts.csv", "0.2,0\n-0.2,0\n0,0.2\n0,-0.2\n0.1,0.1\n");
    let cfg = fx.file(
        "w.json",
        &config(
            r#"{"family": "wendland", "d": 3, "n": 1, "s": 0}"#,
            "[1, 0]",
            "[0, 0]",
            "pts.csv",
        ),
    );
    let rep = json(&fx.run(&["certify", "--config", path_str(&cfg)]));
    assert_eq!(rep["bound"]["q"], 2);
    assert_eq!(rep["bound"]["mu"].as_f64().unwrap(), 1.5);
}

#[test]
fn collinear_sets() {
    let fx = Fixture::new();
    fx.file("line.csv", "-1,0\n1,0\n");
    let inline = fx.file("a.json", &config(PHS3, "[1, 0]", "[0, 0]", "line.csv"));
    let out = fx.run(&["weights", "--config", path_str(&inline)]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "-0.5\n0.5\n");

    let transverse = fx.file("b.json", &config(PHS3, "[0, 1]", "[0, 0]", "line.csv"));
    for cmd in ["weights", "certify"] {
        let out = fx.run(&[cmd, "--config", path_str(&transverse)]);
        assert_eq!(out.status.code(), Some(2));
        assert!(String::from_utf8_lossy(&out.stderr).contains("(0,1)"));
    }
}

#[test]
fn growth_subcommand() {
    let fx = Fixture::new();
    let cfg = midpoint(&fx);
    let rep = json(&fx.run(&["growth", "--config", path_str(&cfg), "--certificates", "cert.csv"]));
    assert_eq!(rep["status"], "finite");
    assert_eq!(rep["q"], 2);
    assert_eq!(rep["mu"].as_f64().unwrap(), 1.5);
    let v = rep["value"].as_f64().unwrap();
    assert!((v - 0.5f64.powf(1.5)).abs() < 1e-12);
    assert!((rep["primal_value"].as_f64().unwrap() - v).abs() < 1e-12);
    let csv = fs::read_to_string(fx.dir.path().join("cert.csv")).unwrap();
    assert!(csv.starts_with("kind,index,value\n"));
    assert_eq!(csv.lines().filter(|l| l.starts_with("dual_weight")).count(), 2);
}

#[test]
fn growth_reports_infinity() {
    let fx = Fixture::new();
    fx.file("line.csv", "-1,0\n1,0\n");
    let cfg = fx.file("g.json", &config(PHS3, "[0, 1]", "[0, 0]", "line.csv"));
    let rep = json(&fx.run(&["growth", "--config", path_str(&cfg)]));
    assert_eq!(rep["value"], "inf");
    assert_eq!(rep["status"], "infeasible_dual");
}

#[test]
fn convergence_central_difference() {
    let fx = Fixture::new();
    fx.file("pts.csv", "-1\n1\n");
    let cfg = fx.file("c.json", &config(PHS3, "[1]", "[0]", "pts.csv"));
    let rep = json(&fx.run(&[
        "converge",
        "--config",
        path_str(&cfg),
        "--levels",
        "1,0.5,0.25,0.125,0.0625",
        "--table",
        "t.csv",
    ]));
    assert_eq!(rep["levels"].as_array().unwrap().len(), 5);
    let slope = rep["p"]["slope"].as_f64().unwrap();
    assert!((slope - 0.5).abs() < 1e-10, "slope {slope}");
    assert_eq!(rep["predicted_order"].as_f64().unwrap(), 0.5);
    assert_eq!(rep["flagged"], false);
    let table = fs::read_to_string(fx.dir.path().join("t.csv")).unwrap();
    assert_eq!(table.lines().count(), 6);
}

#[test]
fn convergence_degenerate_series() {
    let fx = Fixture::new();
    fx.file("pts.csv", "0\n1\n-0.5\n");
    let cfg = fx.file("c.json", &config(PHS3, "[0]", "[0]", "pts.csv"));
    let rep = json(&fx.run(&["converge", "--config", path_str(&cfg)]));
    assert_eq!(rep["error"]["status"], "degenerate");
    assert_eq!(rep["p"]["status"], "degenerate");
}

#[test]
fn convergence_needs_four_levels() {
    let fx = Fixture::new();
    let cfg = midpoint(&fx);
    let out = fx.run(&["converge", "--config", path_str(&cfg), "--levels", "1,0.5,0.25"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reports_are_byte_stable() {
    let fx = Fixture::new();
    fx.file("pts.csv", "0.9,0.1\n-0.7,0.4\n0.2,-0.8\n-0.3,-0.5\n0.5,0.6\n0,0.3\n");
    let cfg = fx.file(
        "t.json",
        &config(
            r#"{"family": "tps", "n": 2, "s": 3}"#,
            "[1, 0]",
            "[0.05, -0.02]",
            "pts.csv",
        ),
    );
    let a = fx.run(&["certify", "--config", path_str(&cfg), "--seed", "17"]);
    let b = fx.run(&["certify", "--config", path_str(&cfg), "--seed", "17"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let rep: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(rep["bound"]["phi_seminorm"]["seed"], 17);
    assert_eq!(rep["bound"]["phi_seminorm"]["mode"], "sampled_lower_estimate");
    assert!(rep["certified"].is_null());

    let c1 = fx.run(&["converge", "--config", path_str(&cfg)]);
    let c2 = fx.run(&["converge", "--config", path_str(&cfg)]);
    assert!(c1.status.success());
    assert_eq!(c1.stdout, c2.stdout);
}

#[test]
fn points_flag_overrides_config() {
    let fx = Fixture::new();
    let cfg = midpoint(&fx);
    fx.file("other.csv", "-1\n1\n");
    let out = fx.run(&["weights", "--config", path_str(&cfg), "--points", "other.csv"]);
    let w: Vec<f64> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    assert_eq!(w.len(), 2);
    assert!((w[0] - 0.25).abs() < 1e-12 && (w[1] - 0.75).abs() < 1e-12, "{w:?}");
}

#[test]
fn malformed_inputs_exit_one() {
    let fx = Fixture::new();
    fx.file("pts.csv", "0\n1\n");
    fx.file("bad_row.csv", "0\nabc\n");
    fx.file("wide.csv", "0,1\n1,2\n");
    fx.file("empty.csv", "");
    let cases = [
        ("unknown.json", r#"{"kernel": {"family": "phs", "nu": 3, "s": 2}, "operator": [{"alpha": [0], "coeff": 1}], "center": [0.5], "points": "pts.csv", "tolerance": 1}"#.to_string()),
        ("family.json", config(r#"{"family": "gauss", "eps": 1, "s": 0}"#, "[0]", "[0.5]", "pts.csv")),
        ("even.json", config(r#"{"family": "phs", "nu": 2, "s": 1}"#, "[0]", "[0.5]", "pts.csv")),
        ("low_s.json", config(r#"{"family": "phs", "nu": 3, "s": 1}"#, "[0]", "[0.5]", "pts.csv")),
        ("order.json", config(PHS3, "[2]", "[0.5]", "pts.csv")),
        ("alpha_dim.json", config(PHS3, "[0, 1]", "[0.5]", "pts.csv")),
        ("missing.json", config(PHS3, "[0]", "[0.5]", "nope.csv")),
        ("bad_row.json", config(PHS3, "[0]", "[0.5]", "bad_row.csv")),
        ("wide.json", config(PHS3, "[0]", "[0.5]", "wide.csv")),
        ("empty.json", config(PHS3, "[0]", "[0.5]", "empty.csv")),
        ("syntax.json", "{\"kernel\": ".to_string()),
    ];
    for (name, text) in &cases {
        let cfg = fx.file(name, text);
        let out = fx.run(&["certify", "--config", path_str(&cfg)]);
        assert_eq!(
            out.status.code(),
            Some(1),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(fx.run(&["certify", "--config", "absent.json"]).status.code(), Some(1));
    assert_eq!(fx.run(&["certify"]).status.code(), Some(1));
    assert_eq!(fx.run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(fx.run(&["--help"]).status.code(), Some(0));
}

#[test]
fn duplicate_nodes_exit_three() {
    let fx = Fixture::new();
    fx.file("dup.csv", "0\n1\n1\n");
    let cfg = fx.file("d.json", &config(PHS3, "[0]", "[0.5]", "dup.csv"));
    let out = fx.run(&["weights", "--config", path_str(&cfg)]);
    assert_eq!(out.status.code(), Some(3));
}
