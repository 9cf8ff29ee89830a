use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn parm(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_parm"))
        .args(args)
        .arg("--output-dir")
        .arg(dir)
        .output()
        .expect("spawn parm")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.cfg");
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const CONNECTION: &str = "\
# constant c, one unstable direction
alpha = 2.1
c = constant
nu = 1.1
K = 20
M = 80
scalings = -1.1
theta = search
";

#[test]
fn pipeline_writes_certificates_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let out = parm(dir.path(), &["pipeline"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["equilibrium.json", "eigen.json", "morse.json", "manifold.json", "manifold_certificate.json", "decay.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let first = fs::read(dir.path().join("manifold_certificate.json")).unwrap();
    let again = parm(dir.path(), &["pipeline", "--sequential"]);
    assert_eq!(code(&again), 0);
    assert_eq!(first, fs::read(dir.path().join("manifold_certificate.json")).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["stage"], "validate");
}

#[test]
fn stages_chain_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONNECTION);
    for stage in ["equilibrium", "eigen", "morse", "manifold", "validate", "connect"] {
        let out = parm(dir.path(), &[stage, "--config", &cfg]);
        assert_eq!(code(&out), 0, "{stage}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let conn: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("connection.json")).unwrap()).unwrap();
    assert!(conn["payload"]["image_distance"].is_array() || conn["payload"]["image_distance"].is_object());
    assert!(dir.path().join("trajectory.csv").exists());

    // θ = 0 is the source equilibrium itself, far from the sink.
    let out = parm(dir.path(), &["connect", "--config", &cfg, "--set", "theta=0"]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
    let fail: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("failure.json")).unwrap()).unwrap();
    assert_eq!(fail["stage"], "connect");
    assert!(fail["payload"]["report"]["distance"].is_array() || fail["payload"]["report"]["distance"].is_object());

    for kind in ["decay", "surface", "trajectory", "eigenfunction"] {
        let out = parm(dir.path(), &["figures", "--config", &cfg, "--kind", kind]);
        assert_eq!(code(&out), 0, "{kind}: {}", String::from_utf8_lossy(&out.stderr));
        let csv = fs::read_to_string(dir.path().join(format!("{kind}.csv"))).unwrap();
        assert!(csv.lines().count() > 2, "{kind}");
    }
}

#[test]
fn failed_validation_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    // An oversized chart makes the far-order terms too large to contract.
    let out = parm(dir.path(), &["pipeline", "--set", "c=constant", "--set", "M=20", "--set", "scalings=3"]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
    let fail: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("failure.json")).unwrap()).unwrap();
    assert_eq!(fail["stage"], "validate");
    assert!(fail["payload"]["report"].is_object());
}

#[test]
fn operational_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = parm(dir.path(), &["pipeline", "--set", "colour=blue"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown key"));
    let out = parm(dir.path(), &["validate"]);
    assert_eq!(code(&out), 1);
    let out = parm(dir.path(), &["figures", "--kind", "decay"]);
    assert_eq!(code(&out), 1);
    let out = parm(dir.path(), &["figures", "--kind", "histogram"]);
    assert_eq!(code(&out), 1);
    assert!(!dir.path().join("failure.json").exists());
}
