use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cldp::{tossing_grid, CldpConfig};

fn cldp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cldp"))
        .args(args)
        .output()
        .unwrap()
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/household_power_excerpt.txt")
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn perturb_constant_series_adds_grid_amplitudes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.csv");
    let o = cldp(&[
        "perturb",
        "--synth",
        "constant",
        "--level",
        "2",
        "--samples",
        "24",
        "--users",
        "4",
        "--tossing",
        "6",
        "--window",
        "6",
        "--amplitude",
        "1.5",
        "--seed",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = read_csv(&out);
    assert_eq!(header, ["user", "sample_index", "original", "perturbed"]);
    assert_eq!(rows.len(), 4 * 24);

    let cfg = CldpConfig::new(4, 6, 6, 1.5).unwrap();
    for user in 1..=4 {
        let mut want = tossing_grid(user, &cfg).unwrap().amplitudes;
        want.sort_by(f64::total_cmp);
        let diffs: Vec<f64> = rows
            .iter()
            .filter(|r| r[0] == user.to_string())
            .map(|r| r[3].parse::<f64>().unwrap() - r[2].parse::<f64>().unwrap())
            .collect();
        for window in diffs.chunks(6) {
            let mut got = window.to_vec();
            got.sort_by(f64::total_cmp);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-12, "user {user}: {g} vs {w}");
            }
        }
    }
    assert!(stdout(&o).contains("mean per-sample mse="));
}

#[test]
fn odd_user_count_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.csv");
    let o = cldp(&[
        "perturb",
        "--mode",
        "shuffle",
        "--users",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(!o.status.success());
    let err = stderr(&o);
    assert!(err.contains("even"), "{err}");
    assert_eq!(err.trim_end().lines().count(), 1);
    assert!(!out.exists());
}

#[test]
fn zero_amplitude_grid_point_gives_zero_mse() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.csv");
    let o = cldp(&[
        "perturb",
        "--users",
        "2",
        "--tossing",
        "1",
        "--window",
        "10",
        "--samples",
        "100",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(
        stdout(&o).contains("user 1: windows=10 mse=0\n"),
        "{}",
        stdout(&o)
    );

    let sweep = dir.path().join("s.csv");
    let o = cldp(&[
        "sweep",
        "--sweep",
        "k",
        "--values",
        "1",
        "--users",
        "2",
        "--window",
        "10",
        "--samples",
        "100",
        "--reps",
        "3",
        "--out",
        sweep.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (_, rows) = read_csv(&sweep);
    assert_eq!(rows.len(), 3);
}

#[test]
fn amplitude_sweep_scales_mse_by_four() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let summary = dir.path().join("sum.csv");
    let o = cldp(&[
        "sweep",
        "--sweep",
        "A",
        "--values",
        "1.5,3",
        "--mode",
        "toss",
        "--reps",
        "2",
        "--samples",
        "400",
        "--out",
        out.to_str().unwrap(),
        "--summary",
        summary.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = read_csv(&out);
    assert_eq!(
        header,
        [
            "swept_param",
            "swept_value",
            "seed",
            "mse_per_sample",
            "aggregate_error",
            "epsilon_proxy",
            "log10_pbreak",
            "wall_ms"
        ]
    );
    assert_eq!(rows.len(), 4);
    for seed in ["0", "1"] {
        let mse = |a: &str| -> f64 {
            rows.iter().find(|r| r[1] == a && r[2] == seed).unwrap()[3]
                .parse()
                .unwrap()
        };
        let ratio = mse("3") / mse("1.5");
        assert!((ratio - 4.0).abs() < 4e-12, "seed {seed}: {ratio}");
    }
    assert!(rows.iter().all(|r| r[7] == "0.000"));
    let (header, rows) = read_csv(&summary);
    assert_eq!(
        header,
        [
            "swept_param",
            "swept_value",
            "mse_mean",
            "mse_std",
            "aggerr_mean",
            "aggerr_std"
        ]
    );
    assert_eq!(rows.len(), 2);
}

#[test]
fn sweep_rejects_invalid_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = cldp(&[
        "sweep",
        "--sweep",
        "k",
        "--values",
        "40,7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("k=7"), "{}", stderr(&o));
}

#[test]
fn privacy_report() {
    let o = cldp(&[
        "privacy",
        "--tossing",
        "10",
        "--window",
        "5",
        "--users",
        "3",
        "--amplitude",
        "3",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("log10_pbreak=-15\n"), "{text}");
    assert!(text.contains("epsilon_proxy=0.5\n"), "{text}");
    assert!(text.contains("pbreak=1e-15\n"), "{text}");

    let o = cldp(&["privacy", "--tossing", "1", "--window", "5", "--users", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("log10_pbreak=0\n"));
    assert!(stderr(&o).contains("no tossing entropy"));

    let o = cldp(&[
        "privacy",
        "--tossing",
        "40",
        "--window",
        "200",
        "--users",
        "16",
    ]);
    assert!(stdout(&o).contains("pbreak=underflow"));

    let o = cldp(&["privacy", "--tossing", "0"]);
    assert!(!o.status.success());
    assert!(stderr(&o).starts_with("error: domain error"));
}

#[test]
fn privacy_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.csv");
    let o = cldp(&[
        "privacy",
        "--tossing",
        "10",
        "--window",
        "5",
        "--users",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let (header, rows) = read_csv(&out);
    assert_eq!(
        header,
        [
            "k",
            "l",
            "u",
            "amplitude",
            "c",
            "epsilon_proxy",
            "log10_pbreak",
            "pbreak"
        ]
    );
    assert_eq!(rows[0][6], "-15");
}

#[test]
fn aggregate_from_household_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a.csv");
    let o = cldp(&[
        "aggregate",
        "--input",
        fixture().to_str().unwrap(),
        "--offset",
        "100",
        "--length",
        "800",
        "--tossing",
        "10",
        "--window",
        "50",
        "--amplitude",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = read_csv(&out);
    assert_eq!(header, ["window", "true_total", "noisy_total", "residual"]);
    // 800 values / 4 users = 200 each, 4 windows of 50
    assert_eq!(rows.len(), 4);
    for r in rows {
        let residual: f64 = r[3].parse().unwrap();
        assert!(residual.abs() < 1e-9 * 2.0 * 4.0 * 50.0, "{residual}");
    }
    assert!(stderr(&o).contains("skipped 12 rows"));
}

#[test]
fn ingestion_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.csv");
    let o = cldp(&[
        "perturb",
        "--input",
        "/definitely/missing.txt",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("file not found"), "{}", stderr(&o));

    let o = cldp(&[
        "perturb",
        "--input",
        fixture().to_str().unwrap(),
        "--column",
        "Frequency",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("Frequency"));

    // 988 values / 4 users leaves fewer samples than one window of 400
    let o = cldp(&[
        "perturb",
        "--input",
        fixture().to_str().unwrap(),
        "--window",
        "400",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(!o.status.success());
}
