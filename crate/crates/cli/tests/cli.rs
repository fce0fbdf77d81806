use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_aoa-mcrb"))
}

#[test]
fn bounds_to_stdout() {
    let out = bin().args(["bounds", "--sweep.snr_db", "[0, 50, 10]"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("offset_deg,snr_db,sigma2,gamma,eta,crb_rad2"));
    assert_eq!(lines.count(), 3 * 6);
}

#[test]
fn fig2_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fig2.csv");
    let svg = dir.path().join("fig2.svg");
    let status = bin()
        .args(["fig2", "--out"])
        .arg(&csv)
        .arg("--svg")
        .arg(&svg)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("elements,offset_deg"));
    let svg = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 4);
}

#[test]
fn config_file_and_seed_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(
        &cfg,
        "[attacker]\noffsets_deg = [0.5]\n[sweep]\nsnr_db = [20.0, 30.0, 10.0]\n[mc]\ntrials = 30\n",
    )
    .unwrap();
    let run = |seed: &str, threads: &str| {
        let out = bin()
            .args(["fig1", "--config"])
            .arg(&cfg)
            .args(["--seed", seed, "--threads", threads])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        out.stdout
    };
    let a = run("5", "1");
    assert_eq!(a, run("5", "3"));
    assert_ne!(a, run("6", "1"));
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(10) == Some("30")));
}

#[test]
fn exit_codes() {
    let bad_key = bin().args(["bounds", "--set", "geometry.colour=3"]).output().unwrap();
    assert_eq!(bad_key.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_key.stderr).contains("geometry.colour"));

    let bad_value = bin().args(["bounds", "--geometry.elements", "1"]).output().unwrap();
    assert_eq!(bad_value.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_value.stderr).contains("geometry.elements"));

    let endfire = bin()
        .args(["bounds", "--scenario.theta_deg", "90", "--attacker.offsets_deg", "[0]"])
        .output()
        .unwrap();
    assert_eq!(endfire.status.code(), Some(3));
    let text = String::from_utf8(endfire.stdout).unwrap();
    assert!(text.lines().skip(1).all(|l| l.contains("degenerate")));

    let io = bin()
        .args(["fig2", "--out", "/nonexistent-dir/x.csv"])
        .output()
        .unwrap();
    assert_eq!(io.status.code(), Some(4));

    let missing = bin().args(["bounds", "--config", "/nonexistent.toml"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(4));
}
