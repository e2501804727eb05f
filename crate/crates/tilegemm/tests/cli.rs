//! Exercises the command-line surface through the real binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn tilegemm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tilegemm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("tilegemm-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn gen_map_writes_map_and_heatmap() {
    let map_path = tmp("m.map");
    let pgm_path = tmp("m.pgm");
    let out = tilegemm(&[
        "gen-map", "--mt", "100", "--nt", "100", "--ratio", "80:20", "--seed", "42",
        "--out", map_path.to_str().unwrap(), "--heatmap", pgm_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let text = std::fs::read_to_string(&map_path).unwrap();
    assert!(text.starts_with("100 100\n"));
    assert_eq!(text.chars().filter(|c| *c == 'D').count(), 8000);
    assert_eq!(text.chars().filter(|c| *c == 'S').count(), 2000);

    let pgm = std::fs::read_to_string(&pgm_path).unwrap();
    assert!(pgm.starts_with("P2\n100 100\n255\n"));

    std::fs::remove_file(map_path).ok();
    std::fs::remove_file(pgm_path).ok();
}

#[test]
fn gen_map_is_seed_deterministic() {
    let p1 = tmp("d1.map");
    let p2 = tmp("d2.map");
    for p in [&p1, &p2] {
        let out = tilegemm(&[
            "gen-map", "--mt", "8", "--nt", "8", "--ratio", "50:50", "--seed", "7",
            "--out", p.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(
        std::fs::read_to_string(&p1).unwrap(),
        std::fs::read_to_string(&p2).unwrap()
    );
    std::fs::remove_file(p1).ok();
    std::fs::remove_file(p2).ok();
}

#[test]
fn verify_all_fp64_exits_zero_with_zero_error() {
    let out = tilegemm(&[
        "verify", "--n", "256", "--nb", "32", "--ratio", "100:0", "--seed", "1",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("rel_err vs FP64 oracle: 0e0"), "{stdout}");
    assert!(stdout.contains("verify: PASS"));
}

#[test]
fn verify_mixed_ratio_passes_default_tolerance() {
    let out = tilegemm(&[
        "verify", "--n", "128", "--nb", "16", "--ratio", "50:50", "--seed", "3",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn verify_impossible_tolerance_exits_one() {
    let out = tilegemm(&[
        "verify", "--n", "128", "--nb", "16", "--ratio", "0:100", "--seed", "3",
        "--tol", "1e-30",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("verify: FAIL"));
}

#[test]
fn sim_hand_enumerated_case() {
    let out = tilegemm(&[
        "sim", "--mt", "2", "--nt", "2", "--kt", "2", "--nb", "2",
        "--grid", "2x1", "--ratio", "100:0", "--seed", "1",
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("summary,bytes_total,128"), "{stdout}");
    assert!(stdout.contains("summary,messages,4"));
}

#[test]
fn bench_emits_csv_schema() {
    let out = tilegemm(&[
        "bench", "--m", "64", "--n", "64", "--k", "64", "--nb", "16",
        "--seed", "5", "--reps", "1",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let mut lines = stdout.lines();
    assert_eq!(lines.next().unwrap(), "label,elapsed_s,gflops,speedup,rel_err");
    // Default ratio set: baseline plus four mixed configs.
    assert_eq!(stdout.lines().count(), 6);
    assert!(stdout.lines().nth(1).unwrap().starts_with("100D:0S,"));
}

#[test]
fn usage_errors_exit_two() {
    let out = tilegemm(&["gemm", "--m", "64"]);
    assert_eq!(out.status.code(), Some(2));

    let out = tilegemm(&[
        "gen-map", "--mt", "4", "--nt", "4", "--ratio", "80:30", "--seed", "1",
        "--out", "/dev/null",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = tilegemm(&["sim", "--mt", "2", "--nt", "2", "--kt", "2", "--nb", "2",
        "--ratio", "100:0", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2), "missing --grid/--ranks");
}
