use std::path::Path;
use std::process::{Command, Output};

fn floqsim(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_floqsim"))
        .args(args)
        .current_dir(dir)
        .env("FLOQSIM_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn ok(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn lattice_reports_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(&floqsim(&["lattice", "--ell", "2", "--out", "l2.lattice"], dir.path()));
    assert!(out.contains("64 qubits") && out.contains("genus 2") && out.contains("valid"), "{out}");
    let again = ok(&floqsim(&["lattice", "--lattice", "l2.lattice"], dir.path()));
    assert!(again.contains("64 qubits"), "{again}");
}

#[test]
fn run_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &'static str| {
        vec!["run", "--ell", "1", "--p", "0.002,0.004", "--shots", "300", "--seed", "7", "--periods", "2", "--out", out]
    };
    ok(&floqsim(&args("a.csv"), dir.path()));
    ok(&floqsim(&args("b.csv"), dir.path()));
    let a = std::fs::read_to_string(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read_to_string(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 3, "{a}");
    assert!(a.starts_with("family,"));
}

#[test]
fn json_report_carries_config_hash() {
    let dir = tempfile::tempdir().unwrap();
    ok(&floqsim(&["run", "--shots", "50", "--periods", "1", "--out", "r.json"], dir.path()));
    let text = std::fs::read_to_string(dir.path().join("r.json")).unwrap();
    assert!(text.contains("\"config_hash\""), "{text}");
}

#[test]
fn dem_histogram_and_decode_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let hist = ok(&floqsim(&["dem", "--ell", "1", "--p", "0.001", "--out", "m.dem"], dir.path()));
    // HCF with independent noise is graphlike
    assert_eq!(hist.trim(), "w,count,percent\n2,576,100.0", "{hist}");
    std::fs::write(dir.path().join("s.txt"), "\nD0 D2\n").unwrap();
    for decoder in ["mwpm", "bposd"] {
        let out = ok(&floqsim(&["decode", "--dem", "m.dem", "--syndromes", "s.txt", "--decoder", decoder], dir.path()));
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "0000");
    }
}

#[test]
fn bad_inputs_fail_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let odd = floqsim(&["run", "--family", "hf", "--periods", "3", "--shots", "10"], dir.path());
    assert!(!odd.status.success());
    assert!(String::from_utf8_lossy(&odd.stderr).contains("even number of periods"));

    let threads = Command::new(env!("CARGO_BIN_EXE_floqsim"))
        .args(["run", "--shots", "10"])
        .env("FLOQSIM_THREADS", "zero")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(!threads.status.success());
    assert!(String::from_utf8_lossy(&threads.stderr).contains("FLOQSIM_THREADS"));

    assert!(!floqsim(&["run", "--decoder", "unionfind"], dir.path()).status.success());
    assert!(!floqsim(&["threshold", "--ell", "2"], dir.path()).status.success());
    std::fs::write(dir.path().join("s.txt"), "D99999\n").unwrap();
    let range = floqsim(&["decode", "--syndromes", "s.txt", "--periods", "1"], dir.path());
    assert!(String::from_utf8_lossy(&range.stderr).contains("out of range"));
}

#[test]
fn threshold_prints_an_outcome() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(&floqsim(&["threshold", "--ell", "1,2", "--p", "0.01,0.03", "--shots", "200", "--resamples", "20"], dir.path()));
    assert!(out.contains("crossing"), "{out}");
}
