use std::process::{Command, Output};

fn qgt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgt")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn thresholds_report() {
    let o = qgt(&["thresholds", "--n", "10000", "--theta", "0.5"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["m_inf"].as_f64().unwrap(), 200.0);
    assert_eq!(v["k"].as_u64().unwrap(), 100);
}

#[test]
fn csv_headers_match_schemas() {
    let cases: [(&[&str], &str); 3] = [
        (
            &["sweep", "--n", "100", "--m", "0,20", "--trials", "3"],
            "n,theta,k,m,trials,successes,rate,stderr,cond_i_rate,cond_ii_rate,cond_iii_rate,seed",
        ),
        (&["min-tests", "--n", "100", "--trials", "3"], "n,theta,k,target_rate,trials,m_required,m_greedy,ratio,seed"),
        (&["z-estimate", "--n", "10", "--k", "2", "--m", "3", "--trials", "5"], "n,k,m,ell,trials,z_mean,z_stderr,bound_mean,seed"),
    ];
    for (args, header) in cases {
        let o = qgt(args);
        assert!(o.status.success(), "{args:?}");
        assert_eq!(stdout(&o).lines().next().unwrap(), header);
    }
}

#[test]
fn fig1_fixture() {
    let o = qgt(&["verify", "--n", "7", "--fixture", "fig1"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["results"], "2,2,3,1,1");
    assert_eq!(v["solutions"].as_array().unwrap().len(), 4);
    assert_eq!(v["greedy"]["estimate"], "1110000");
    assert_eq!(v["greedy"]["success"], false);
    assert_eq!(qgt(&["verify", "--n", "8", "--fixture", "fig1"]).status.code(), Some(1));
}

#[test]
fn exit_codes() {
    let too_large = qgt(&["verify", "--n", "50", "--k", "10"]);
    assert_eq!(too_large.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&too_large.stderr).contains("instance too large"));
    assert_eq!(qgt(&["thresholds", "--theta", "1.5"]).status.code(), Some(1));
    let unknown = qgt(&["thresholds", "--bogus", "1"]);
    assert_eq!(unknown.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("--bogus"));
    assert_eq!(qgt(&["thresholds", "--format", "gnuplot"]).status.code(), Some(1));
    assert_eq!(qgt(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_file_and_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("t.cfg");
    std::fs::write(&cfg, "# thresholds\nn = 1000\ntheta = 0.3\nformat = csv\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let o = qgt(&["thresholds", "--config", cfg]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("1000,0.3,8,"));
    let o = qgt(&["thresholds", "--config", cfg, "--theta", "0.5"]);
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("1000,0.5,32,"));

    std::fs::write(dir.path().join("bad.cfg"), "trials = 5\n").unwrap();
    let o = qgt(&["thresholds", "--config", dir.path().join("bad.cfg").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("trials"));
}

#[test]
fn rate_table_changes_slope_sign() {
    let o = qgt(&["analyze", "--rate-f", "--n", "10000", "--k", "100", "--c", "2.5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<Vec<f64>> =
        text.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows[1][0], 1.0);
    assert!(rows[1][1] < 0.0);
    assert!(rows.iter().any(|r| r[2] > 0.0) && rows.iter().any(|r| r[2] < 0.0));
}

#[test]
fn output_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.dat");
    let o = qgt(&[
        "sweep", "--n", "100", "--theta", "0.2,0.3", "--m", "0:40:20", "--trials", "5", "--format", "gnuplot", "-o",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.matches("# n=100").count(), 2);
    assert!(text.contains("\n\n\n# n=100 theta=0.3\n"));
}
