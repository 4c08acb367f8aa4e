use std::path::Path;
use std::process::{Command, Output};

fn bosefluct(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bosefluct"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn data_lines(stdout: &[u8]) -> Vec<String> {
    String::from_utf8_lossy(stdout)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_owned)
        .collect()
}

#[test]
fn sample_w_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sample-w", "--trap", "harmonic-1d", "--samples", "10000", "--seed", "7"];
    let a = bosefluct(&args, dir.path());
    let b = bosefluct(&args, dir.path());
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let lines = data_lines(&a.stdout);
    assert_eq!(lines[0], "W");
    assert_eq!(lines.len(), 10_001);
    let other = bosefluct(&["sample-w", "--samples", "10000", "--seed", "8"], dir.path());
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn sample_w_writes_sidecar_and_histogram() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.csv");
    let o = bosefluct(
        &["sample-w", "--samples", "2000", "--bins", "20", "--out", out.to_str().unwrap()],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# bosefluct "));
    assert!(text.contains("# command: sample-w"));

    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("w.csv.json")).unwrap())
            .unwrap();
    assert!(sidecar["J"].as_u64().unwrap() > 0);
    assert_eq!(sidecar["delta"].as_f64().unwrap(), 0.01);
    assert_eq!(sidecar["normalization"].as_f64().unwrap(), 1.0);
    assert!(sidecar["l2_error"].as_f64().unwrap() <= 0.01);

    let hist = std::fs::read_to_string(dir.path().join("w.csv.hist.csv")).unwrap();
    let rows = data_lines(hist.as_bytes());
    assert_eq!(rows.len(), 21);
    let total: u64 = rows[1..]
        .iter()
        .map(|r| r.rsplit(',').next().unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 2000);
}

#[test]
fn sample_ensemble_columns_are_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let o = bosefluct(&["sample-ensemble", "--n", "1000", "--samples", "50", "--seed", "3"], dir.path());
    assert!(o.status.success());
    let lines = data_lines(&o.stdout);
    assert_eq!(lines[0], "replica,N0,Ntot_excited,Etot,tries");
    for (i, row) in lines[1..].iter().enumerate() {
        let f: Vec<&str> = row.split(',').collect();
        assert_eq!(f[0].parse::<usize>().unwrap(), i);
        let n0: u64 = f[1].parse().unwrap();
        let m: u64 = f[2].parse().unwrap();
        assert_eq!(n0 + m, 1000);
        assert!(f[4].parse::<u64>().unwrap() >= 1);
    }
}

#[test]
fn invalid_configuration_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["sample-w", "--n", "0"][..],
        &["sample-ensemble", "--trap", "no-such-trap"],
        &["fraction", "--format", "xml"],
        &["no-such-command"],
    ] {
        let o = bosefluct(args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn sampling_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = bosefluct(
        &["sample-ensemble", "--n", "1000", "--t-over-tc", "3", "--max-tries", "5"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# comment\nn = 500\nsamples = 2\nt-over-tc = 0.4\n").unwrap();
    let o = bosefluct(
        &["--config", cfg.to_str().unwrap(), "sample-ensemble", "--samples", "4"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("# n = 500\n"));
    assert!(text.contains("# samples = 4\n"));
    assert!(text.contains("# t_over_tc = 0.4\n"));
    assert_eq!(data_lines(&o.stdout).len(), 5);
}

#[test]
fn loaded_spectrum_file_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("levels.txt");
    let o = bosefluct(&["spectrum", "--trap", "harmonic-3d", "--cutoff", "200"], dir.path());
    let body: String = data_lines(&o.stdout)[1..]
        .iter()
        .map(|r| {
            let f: Vec<&str> = r.split(',').collect();
            format!("{} {}\n", f[1], f[2])
        })
        .collect();
    std::fs::write(&spec, body).unwrap();
    let o = bosefluct(
        &["sample-ensemble", "--trap", spec.to_str().unwrap(), "--n", "1000", "--samples", "5"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("# weyl_alpha"));
}

#[test]
fn verify_reports_json_and_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let o = bosefluct(&["verify", "--suite", "gumbel", "--suite", "gibbs"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8_lossy(&o.stdout);
    let json_start = text.find('{').unwrap();
    let report: serde_json::Value = serde_json::from_str(&text[json_start..]).unwrap();
    let suites = report["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 2);
    assert!(suites.iter().all(|s| s["pass"] == true));

    let o = bosefluct(&["verify", "--suite", "bogus"], dir.path());
    assert_ne!(o.status.code(), Some(0));
}
