use std::process::{Command, Output};

fn ptwell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptwell")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_column(text: &str, name: &str) -> Vec<String> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(k).unwrap().to_string()).collect()
}

fn real_parts(text: &str) -> Vec<f64> {
    csv_column(text, "re_F").iter().map(|s| s.parse().unwrap()).collect()
}

#[test]
fn spectrum_from_physical_coupling() {
    let o = ptwell(&["spectrum", "--N", "4", "--q", "0", "--Z", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let f = real_parts(&text);
    for (got, want) in f.iter().zip([-1.0, 0.0, 1.0]) {
        assert!((got - want).abs() < 1e-12, "{text}");
    }
    assert!(csv_column(&text, "xi").iter().all(|x| x == "1.0"));
}

#[test]
fn spectrum_json_of_the_half_well() {
    let o = ptwell(&["spectrum", "--N", "6", "--q", "1", "--ell", "1/2", "--xi", "0", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["N"], 6);
    assert_eq!(v["ell"][0], "1/2");
    let re: Vec<f64> = v["eigenvalues"].as_array().unwrap().iter().map(|e| e["re"].as_f64().unwrap()).collect();
    let r3 = 3f64.sqrt();
    for (got, want) in re.iter().zip([-r3, -1.0, 0.0, 1.0, r3]) {
        assert!((got - want).abs() < 1e-12);
    }
}

#[test]
fn invalid_models_exit_with_two() {
    assert_eq!(ptwell(&["spectrum", "--N", "1", "--xi", "0"]).status.code(), Some(2));
    assert_eq!(ptwell(&["spectrum", "--N", "8", "--q", "1", "--ell", "9/8", "--xi", "0"]).status.code(), Some(2));
    assert_eq!(ptwell(&["spectrum", "--N", "8", "--q", "2", "--ell", "1/2", "--xi", "0"]).status.code(), Some(2));
    assert_eq!(ptwell(&["spectrum", "--N", "4"]).status.code(), Some(2));
    assert_eq!(ptwell(&["spectrum", "--N", "4", "--Z", "1", "--xi", "1"]).status.code(), Some(2));
    assert_eq!(ptwell(&["sweep", "--N", "4", "--xi-to", "1", "--steps", "0"]).status.code(), Some(2));
    assert_eq!(ptwell(&["critical", "--N", "4", "--tol", "0"]).status.code(), Some(2));
}

#[test]
fn sweep_shows_one_complex_pair() {
    let o =
        ptwell(&["sweep", "--N", "8", "--q", "1", "--ell", "5/8", "--xi-from", "0", "--xi-to", "2", "--steps", "200"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("xi,Z,track,re_F,im_F,re_E,im_E,is_real\n"));
    let tracks = csv_column(&text, "track");
    let real = csv_column(&text, "is_real");
    let mut complex: Vec<&String> = tracks.iter().zip(&real).filter(|(_, r)| *r == "false").map(|(t, _)| t).collect();
    complex.sort();
    complex.dedup();
    assert_eq!(complex.len(), 2);
    assert_eq!(tracks.len(), 7 * 201);
}

#[test]
fn critical_tables() {
    let o = ptwell(&["critical", "--N-list", "4,6,8,10,12", "--q", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let z: Vec<f64> = csv_column(&text, "Z_crit").iter().map(|s| s.parse().unwrap()).collect();
    for (got, want) in z.iter().zip([5.657, 4.500, 4.463, 4.461, 4.463]) {
        assert!((got - want).abs() <= 2e-3, "{got} vs {want}");
    }
    let o = ptwell(&["critical", "--N", "6", "--q", "1", "--ell", "1/2"]);
    let xi: f64 = csv_column(&stdout(&o), "xi_crit")[0].parse().unwrap();
    assert!((xi - 1.224745).abs() <= 1e-6);
}

#[test]
fn metric_requests() {
    let o = ptwell(&["metric", "--N", "4", "--q", "0", "--xi", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["quasi_hermiticity_residual"].as_f64().unwrap() <= 1e-10);
    assert_eq!(v["model"]["N"], 4);

    assert_eq!(ptwell(&["metric", "--N", "4", "--q", "0", "--xi", "2"]).status.code(), Some(4));

    let o = ptwell(&["metric", "--N", "4", "--q", "0", "--xi", "0", "--theta", "1,1,1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let theta = v["theta"].as_array().unwrap();
    for (i, row) in theta.iter().enumerate() {
        for (j, z) in row.as_array().unwrap().iter().enumerate() {
            let re = z[0].as_f64().unwrap();
            let im = z[1].as_f64().unwrap();
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((re - want).abs() < 1e-12 && im.abs() < 1e-12);
        }
    }
    assert_eq!(ptwell(&["metric", "--N", "4", "--xi", "0", "--theta", "1,1"]).status.code(), Some(2));
}

#[test]
fn output_file_matches_stdout() {
    let path = std::env::temp_dir().join(format!("ptwell-cli-{}.csv", std::process::id()));
    let args = ["spectrum", "--N", "9", "--Z", "2.5"];
    let direct = stdout(&ptwell(&args));
    let mut with_out = args.to_vec();
    let p = path.to_str().unwrap();
    with_out.extend(["--out", p]);
    assert_eq!(ptwell(&with_out).status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), direct);
    std::fs::remove_file(path).ok();
}

#[test]
fn sweeps_are_bit_stable() {
    let args = ["sweep", "--N", "10", "--q", "1", "--ell", "1/2", "--xi-to", "1", "--steps", "40"];
    assert_eq!(ptwell(&args).stdout, ptwell(&args).stdout);
}

#[test]
fn verify_reports_every_check() {
    let o = ptwell(&["verify", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.len() >= 25);
    let failed: Vec<&str> =
        checks.iter().filter(|c| c["passed"] == false).map(|c| c["name"].as_str().unwrap()).collect();
    // the quadruplet values do not hold at the stated couplings
    assert_eq!(failed, ["N=10 quadruplet at xi=0.50209209", "N=10 pair width at xi=0.502092091"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn negative_control_fails_its_check() {
    let o = ptwell(&["verify", "--negative-control", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let c = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "double merger N=8 l=3/8").unwrap();
    assert_eq!(c["passed"], false);
    assert_eq!(o.status.code(), Some(1));
}
