use std::path::Path;
use std::process::{Command, Output};

fn modmoon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modmoon"))
        .args(args)
        .env_remove("MODMOON_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn golden(name: &str, args: &[&str]) {
    let out = modmoon(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    let want = std::fs::read_to_string(&path).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), want, "{name}");
}

#[test]
fn jcoeffs() {
    golden("jcoeffs_5.tsv", &["jcoeffs", "--terms", "5"]);
    golden("jcoeffs_3.json", &["jcoeffs", "--terms", "3", "--format", "json"]);
}

#[test]
fn theta_of_wedge_square() {
    golden("theta_ext2_e8.tsv", &["lattice", "theta", "--construct", "ext2-e8", "--max-norm", "4"]);
}

#[test]
fn split_of_3b_and_6b() {
    golden("split_3b_6b.tsv", &["split", "--class", "3B", "--sigma-class", "6B"]);
}

#[test]
fn sieve_tables() {
    golden("sieve_run_59_12.tsv", &["sieve", "run", "--prime", "59", "--depth", "12"]);
    golden("sieve_all_12.tsv", &["sieve", "all", "--depth", "12"]);
}

#[test]
fn small_commands() {
    golden("cohomology_h_i_3_8.tsv", &["cohomology", "series", "--kind", "h_I", "--p", "3", "--bound", "8"]);
    golden("kring_lambda2_i_5.tsv", &["kring", "--prime", "5", "--element", "0,0,1", "--op", "lambda", "--n", "2"]);
    golden("haupt_17a_20.tsv", &["haupt", "extend", "--class", "17A", "--terms", "20"]);
}

#[test]
fn verify_for_17() {
    golden("verify_17.tsv", &["verify-theorem41", "--prime", "17"]);
}

#[test]
fn worker_count_does_not_change_output() {
    let a = modmoon(&["sieve", "run", "--prime", "13", "--depth", "14", "--workers", "1"]);
    let b = modmoon(&["sieve", "run", "--prime", "13", "--depth", "14", "--workers", "4"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exit_codes() {
    let out = modmoon(&["sieve", "run", "--prime", "59", "--depth", "12", "--seeds", "/no/such/file"]);
    assert_eq!(out.status.code(), Some(2));
    let out = modmoon(&["verify-theorem41", "--depth", "12"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("at least 26"));
    let out = modmoon(&["sieve", "run", "--prime", "11", "--depth", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = modmoon(&["jcoeffs", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let out = modmoon(&["replicate", "extend", "--prime", "17", "--values", "7,14,50,93"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn replicate_check_passes_for_table_row() {
    let out = modmoon(&["replicate", "check", "--class", "Γ0(34)+", "--terms", "45"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("# violations\t0"));
}

#[test]
fn cache_round_trip() {
    let dir = std::env::temp_dir().join(format!("modmoon-cache-{}", std::process::id()));
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_modmoon"))
            .args(["haupt", "extend", "--class", "19A", "--terms", "12"])
            .env("MODMOON_CACHE_DIR", &dir)
            .output()
            .unwrap()
    };
    let first = run();
    assert!(dir.read_dir().unwrap().count() >= 1);
    let second = run();
    assert_eq!(first.stdout, second.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}
