use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ffnet"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn dir() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}

fn csv(d: &Path, name: &str) -> PathBuf {
    d.join(name)
}

#[test]
fn phase_diagram_is_byte_identical_across_runs() {
    let d = dir();
    for name in ["a.csv", "b.csv"] {
        let o = run_in(d.path(), &["phase-diagram", "--sigma", "-3:3:61", "--mu", "0.01:4:41", "-o", name]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = std::fs::read(csv(d.path(), "a.csv")).unwrap();
    assert_eq!(a, std::fs::read(csv(d.path(), "b.csv")).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("sigma_t,mu_t,region_tag,n_equilibria,n_stable\n"));
    assert_eq!(text.lines().count(), 1 + 61 * 41);
}

#[test]
fn basins_are_byte_identical_across_runs() {
    let d = dir();
    for name in ["a.csv", "b.csv"] {
        let o = run_in(d.path(), &["basins", "--mu", "0.01", "--eps", "0.5", "--x", "-1.2:1.2:25", "--y", "-1.2:1.2:25", "-o", name]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(
        std::fs::read(csv(d.path(), "a.csv")).unwrap(),
        std::fs::read(csv(d.path(), "b.csv")).unwrap()
    );
    assert!(d.path().join("a.json").exists());
}

#[test]
fn sidecar_rerun_matches() {
    let d = dir();
    let o = run_in(d.path(), &["sweep", "--mu", "-0.4:2:121", "-o", "s.csv"]);
    assert!(o.status.success());
    let side = std::fs::read_to_string(d.path().join("s.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&side).unwrap();
    v["config"]["output"] = serde_json::Value::String("s2.csv".into());
    std::fs::write(d.path().join("cfg.json"), v.to_string()).unwrap();
    let o = run_in(d.path(), &["--config", "cfg.json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        std::fs::read(d.path().join("s.csv")).unwrap(),
        std::fs::read(d.path().join("s2.csv")).unwrap()
    );
}

#[test]
fn toml_config_with_flag_override() {
    let d = dir();
    std::fs::write(d.path().join("run.toml"), "command = \"beam\"\nn_elements = 8\nphi = \"-1:1:11\"\noutput = \"beam.csv\"\n").unwrap();
    let o = run_in(d.path(), &["--config", "run.toml", "--theta", "0.2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let side: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.path().join("beam.json")).unwrap()).unwrap();
    assert_eq!(side["config"]["theta"], 0.2);
    assert_eq!(side["config"]["n_elements"], 8);
    assert_eq!(std::fs::read_to_string(d.path().join("beam.csv")).unwrap().lines().count(), 12);
}

#[test]
fn exit_codes() {
    let d = dir();
    let o = run_in(d.path(), &["render"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    for cmd in ["phase-diagram", "bifurcation", "basins", "loci", "simulate", "sweep", "jump", "scaling", "beam"] {
        assert!(err.contains(cmd));
    }

    let o = run_in(d.path(), &["phase-diagram", "--sigma", "0:1:1", "-o", "x.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!d.path().join("x.csv").exists());

    let o = run_in(d.path(), &["simulate", "--system", "sl-reduced", "--mu", "-1", "-o", "y.csv"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!d.path().join("y.csv").exists());

    let o = run_in(d.path(), &["beam", "-o", "/proc/ffnet-none/z.csv"]);
    assert_eq!(o.status.code(), Some(4));

    let o = run_in(d.path(), &["--config", "missing.toml"]);
    assert_eq!(o.status.code(), Some(4));

    let o = run_in(d.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulate_writes_named_components() {
    let d = dir();
    let o = run_in(d.path(), &["simulate", "--system", "pitchfork", "--mu", "1", "--eps", "0", "--x0", "0.9,0.1", "--t-end", "5", "-o", "t.csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(d.path().join("t.csv")).unwrap();
    assert!(text.starts_with("t,x,y\n"));
}
