//! End-to-end CLI checks: exit codes, file emission, manifest runs.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coupled-descent"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cdcli_{tag}_{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn solve_l1_family_writes_outputs() {
    let dir = temp_dir("solve");
    let out = bin()
        .args([
            "solve", "--family", "l1", "--n", "30", "--m-dim", "4", "--lambda", "0.5",
            "--algo", "rcd", "--eps", "1e-8", "--seed", "3", "--max-full-iters", "200",
            "--x0", "uniform",
        ])
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.join("summary.csv").exists());
    assert!(dir.join("trace_s0_rcd_seed3.csv").exists());
    // The extended-norm variant runs too.
    let out = bin()
        .args([
            "solve", "--family", "l1", "--n", "30", "--m-dim", "4", "--algo", "rcd",
            "--alpha", "1", "--max-full-iters", "50", "--x0", "e1",
        ])
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn usage_errors_exit_with_2() {
    let out = bin().args(["solve", "--family", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args(["bench", "--manifest", "/definitely/not/here.txt"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "io error is a runtime failure");
}

#[test]
fn manifest_parse_error_exits_with_2() {
    let dir = temp_dir("badmanifest");
    let path = dir.join("m.txt");
    fs::write(&path, "family = l1\nthis is not a key value line\n").unwrap();
    let out = bin().arg("bench").arg("--manifest").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn bench_runs_multi_solver_manifest() {
    let dir = temp_dir("bench");
    let manifest = format!
        ("family = chebyshev\nn = 40\nm_dim = 2\ngen_seed = 9\nx0 = uniform\n\
          algos = rcd, gm\neps = 1e-7\nmax_full_iters = 150\nseeds = 1, 2\nout = {}\n",
        dir.display()
    );
    let path = dir.join("manifest.txt");
    fs::write(&path, manifest).unwrap();
    let out = bin()
        .args(["bench", "--jobs", "2", "--manifest"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    // 2 solvers x 2 seeds traces + summary + 2 aggregates.
    for f in [
        "trace_s0_rcd_seed1.csv",
        "trace_s0_rcd_seed2.csv",
        "trace_s1_gm_seed1.csv",
        "trace_s1_gm_seed2.csv",
        "summary.csv",
        "aggregate_s0_rcd.csv",
        "aggregate_s1_gm.csv",
    ] {
        assert!(dir.join(f).exists(), "missing {f}");
    }
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn output_collision_exits_with_3() {
    let dir = temp_dir("collision");
    let blocker = dir.join("blocked");
    fs::write(&blocker, "file in the way").unwrap();
    let out = bin()
        .args([
            "solve", "--family", "l1", "--n", "10", "--m-dim", "2", "--algo", "rcd",
            "--max-full-iters", "20",
        ])
        .arg("--out")
        .arg(&blocker)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let _ = fs::remove_dir_all(&dir);
}
