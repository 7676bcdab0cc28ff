//! End-to-end CLI behavior: flags, config files, outputs, determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_ncrsim")
}

fn tmpdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ncrsim_test_{name}_{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(bin());
    cmd.args(args);
    match threads {
        Some(n) => {
            cmd.env("NCRSIM_THREADS", n);
        }
        None => {
            cmd.env_remove("NCRSIM_THREADS");
        }
    }
    cmd.output().expect("spawn ncrsim")
}

#[test]
fn happy_path_writes_csv_and_manifest() {
    let dir = tmpdir("happy");
    let out = run(
        &["--scenario", "fig3", "--seed", "1", "--trials", "3", "--out", dir.to_str().unwrap()],
        None,
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = dir.join("fig3.csv");
    let manifest = dir.join("manifest.txt");
    assert!(csv.is_file());
    assert!(manifest.is_file());
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("scenario,sweep_value,method,mean_rate_bps,stderr_rate_bps,trials\n"));
    assert!(text.contains("fig3,"));
    assert!(!text.contains('\r'));
    let m = fs::read_to_string(&manifest).unwrap();
    assert!(m.contains("scenario = fig3"));
    assert!(m.contains("seed = 1"));
    assert!(m.contains("config_digest = "));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bogus_scenario_exits_2_and_names_valid_ones() {
    let out = run(&["--scenario", "bogus"], None);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    for name in ["fig3", "fig4", "fig5", "fig7"] {
        assert!(err.contains(name), "expected {name} in: {err}");
    }
}

#[test]
fn missing_scenario_fails_with_diagnostic() {
    let out = run(&["--trials", "2"], None);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("scenario"), "got: {err}");
}

#[test]
fn identical_invocations_are_byte_identical_across_thread_counts() {
    let scenarios: [(&str, &str); 4] = [("fig3", "4"), ("fig4", "3"), ("fig5", "4"), ("fig7", "3")];
    for (scenario, trials) in scenarios {
        let mut blobs: Vec<Vec<u8>> = Vec::new();
        for threads in ["1", "2", "0"] {
            let dir = tmpdir(&format!("det_{scenario}_{threads}"));
            let out = run(
                &[
                    "--scenario", scenario,
                    "--seed", "7",
                    "--trials", trials,
                    "--out", dir.to_str().unwrap(),
                    "--raw",
                ],
                Some(threads),
            );
            assert!(
                out.status.success(),
                "{scenario} with {threads} threads: {}",
                String::from_utf8_lossy(&out.stderr)
            );
            let mut blob = fs::read(dir.join(format!("{scenario}.csv"))).unwrap();
            blob.extend(fs::read(dir.join(format!("{scenario}_raw.csv"))).unwrap());
            blobs.push(blob);
            fs::remove_dir_all(&dir).unwrap();
        }
        assert!(
            blobs.windows(2).all(|w| w[0] == w[1]),
            "{scenario}: outputs differ across thread counts"
        );
    }
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tmpdir("config");
    let cfg = dir.join("run.cfg");
    fs::write(
        &cfg,
        "# test configuration\nscenario = fig5\nseed = 3\ntrials = 2\nbs_power_dbm = 30\n",
    )
    .unwrap();
    // flag overrides the file's seed
    let out = run(
        &[
            "--config", cfg.to_str().unwrap(),
            "--seed", "9",
            "--out", dir.to_str().unwrap(),
        ],
        None,
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let manifest = fs::read_to_string(dir.join("manifest.txt")).unwrap();
    assert!(manifest.contains("scenario = fig5"));
    assert!(manifest.contains("seed = 9"));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bad_config_key_names_offender() {
    let dir = tmpdir("badkey");
    let cfg = dir.join("run.cfg");
    fs::write(&cfg, "scenario = fig3\nwarp_factor = 9\n").unwrap();
    let out = run(&["--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()], None);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warp_factor"));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn raw_dump_has_per_trial_rows() {
    let dir = tmpdir("raw");
    let out = run(
        &["--scenario", "fig5", "--seed", "2", "--trials", "3", "--out", dir.to_str().unwrap(), "--raw"],
        None,
    );
    assert!(out.status.success());
    let raw = fs::read_to_string(dir.join("fig5_raw.csv")).unwrap();
    assert!(raw.starts_with("scenario,sweep_value,method,trial_index,rate_bps,sinr_db\n"));
    // 11 track points x 2 curves x 3 trials
    assert_eq!(raw.lines().count(), 1 + 11 * 2 * 3);
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn manifest_digest_tracks_effective_config() {
    let dir = tmpdir("digest");
    let digest_for = |seed: &str, subdir: &str| {
        let out_dir = dir.join(subdir);
        fs::create_dir_all(&out_dir).unwrap();
        let out = run(
            &["--scenario", "fig5", "--seed", seed, "--trials", "2", "--out", out_dir.to_str().unwrap()],
            None,
        );
        assert!(out.status.success());
        let manifest = fs::read_to_string(out_dir.join("manifest.txt")).unwrap();
        manifest
            .lines()
            .find(|l| l.starts_with("config_digest"))
            .unwrap()
            .to_string()
    };
    let a = digest_for("1", "a");
    let b = digest_for("1", "b");
    let c = digest_for("2", "c");
    assert_eq!(a, b);
    assert_ne!(a, c);
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bad_thread_env_is_a_clean_error() {
    let out = run(&["--scenario", "fig5", "--trials", "1"], Some("not_a_number"));
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("NCRSIM_THREADS"));
}

#[test]
fn writes_into_missing_directory_by_creating_it() {
    let dir = tmpdir("mkdir");
    let nested = dir.join("a/b");
    let out = run(
        &["--scenario", "fig5", "--trials", "2", "--out", nested.to_str().unwrap()],
        None,
    );
    assert!(out.status.success());
    assert!(Path::new(&nested.join("fig5.csv")).is_file());
    fs::remove_dir_all(&dir).unwrap();
}
