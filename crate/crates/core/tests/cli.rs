use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_point-source"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn header(path: &Path) -> String {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .find(|l| !l.starts_with('#'))
        .unwrap()
        .to_string()
}

fn error_record(out: &Output) -> serde_json::Value {
    let stderr = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(stderr.lines().last().unwrap()).unwrap()
}

#[test]
fn golden_headers() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[(&[&str], &str)] = &[
        (
            &["density", "--v0", "0.05", "--x", "1.5", "--t", "1:2:3"],
            "v0,x,t,rho,norm,rho_n,rho_saddle,rho_pole,psi_int,rho_approx",
        ),
        (&["flux", "--v0", "0.5", "--x", "0", "--t", "1,2"], "v0,x,t,flux,norm,flux_n"),
        (
            &["times", "--v0", "0.1", "--x", "0.1,1"],
            "v0,x,t_c,t_max_saddle,bl_time,scenario,n_crossings,crossings,t_p,t_min1",
        ),
        (&["dit-map", "--v0", "0.05", "--x", "1,2"], "v0,x,norm,t_min1,amplitude"),
        (&["figure", "norm-factor", "--v0", "0.5"], "v0,norm"),
        (&["figure", "ratio", "--t", "1:2:2"], "v0,x,t,ratio"),
        (
            &["figure", "transition", "--x", "0.1,1"],
            "v0,x,t_c,scenario,n_crossings,t_p,rho_n_tp",
        ),
        (
            &["oracle-check", "--points", "3"],
            "v0,x,t,exact_re,exact_im,quad_re,quad_im,abs_err,rel_err",
        ),
    ];
    for (i, (args, expected)) in cases.iter().enumerate() {
        let path = dir.path().join(format!("{i}.csv"));
        let mut full = args.to_vec();
        full.extend_from_slice(&["--out", path.to_str().unwrap()]);
        let out = run(&full);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(header(&path), *expected, "{args:?}");
    }
}

#[test]
fn metadata_block() {
    let out = run(&["density", "--v0", "0.05", "--x", "1.5", "--t", "0.1:40:2000"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let meta: Vec<&str> = text.lines().take_while(|l| l.starts_with('#')).collect();
    assert!(meta[0].starts_with("# tool: point-source "));
    assert!(meta.contains(&"# t: 0.1:40.0:2000:lin"));
    assert!(meta.iter().any(|l| l.starts_with("# norm_rel_tol: ")));
    assert!(meta.contains(&"# rows: 2000"));
    assert_eq!(text.lines().count(), meta.len() + 1 + 2000);
}

#[test]
fn byte_identical_reruns() {
    let dir = tempfile::tempdir().unwrap();
    for (k, args) in [
        &["figure", "dit-map", "--v0", "0.01:0.2:6:log", "--x", "0.2:10:12:log"][..],
        &["figure", "transition", "--x", "0.05:2:30:log"],
        &["oracle-check", "--points", "40", "--seed", "7"],
    ]
    .iter()
    .enumerate()
    {
        let a = dir.path().join(format!("{k}a.csv"));
        let b = dir.path().join(format!("{k}b.json"));
        let c = dir.path().join(format!("{k}c.json"));
        let mut files = Vec::new();
        for (p, fmt) in [(&a, "csv"), (&b, "json"), (&c, "json")] {
            let mut full = args.to_vec();
            full.extend_from_slice(&["--out", p.to_str().unwrap(), "--format", fmt]);
            assert!(run(&full).status.success());
            files.push(std::fs::read(p).unwrap());
        }
        assert_eq!(files[1], files[2], "{args:?}");
        let again = dir.path().join(format!("{k}d.csv"));
        let mut full = args.to_vec();
        full.extend_from_slice(&["--out", again.to_str().unwrap()]);
        assert!(run(&full).status.success());
        assert_eq!(files[0], std::fs::read(&again).unwrap(), "{args:?}");
    }
}

#[test]
fn sorted_output() {
    let out = run(&["times", "--v0", "0.5,0.1,0.25", "--x", "2,0.5,1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let keys: Vec<(f64, f64)> = rdr
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].parse().unwrap(), r[1].parse().unwrap())
        })
        .collect();
    assert_eq!(keys.len(), 9);
    let mut sorted = keys.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(keys, sorted);
}

#[test]
fn json_records() {
    let out = run(&["times", "--v0", "0.1", "--x", "0.1,2.5", "--format", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["metadata"]["command"], "times");
    let recs = doc["records"].as_array().unwrap();
    assert_eq!(recs[0]["scenario"], "double");
    assert_eq!(recs[1]["scenario"], "none");
    assert!(recs[1]["t_p"].is_null());
}

#[test]
fn full_precision_round_trip() {
    let out = run(&["flux", "--v0", "0.1", "--x", "0.7", "--t", "0.30000000000000004"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().last().unwrap();
    let cols: Vec<&str> = row.split(',').collect();
    assert_eq!(cols[2], "0.30000000000000004");
    let p = point_source::Params::new(0.1).unwrap();
    let j = point_source::source_model::flux(&p, 0.7, 0.30000000000000004).unwrap();
    assert_eq!(cols[3].parse::<f64>().unwrap().to_bits(), j.to_bits());
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# dit trace\nv0 = 0.9\nx = 1.5\nt = 1:2:2\nformat = json\n").unwrap();
    let out = run(&["density", "--config", cfg.to_str().unwrap(), "--v0", "0.05"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["metadata"]["v0"], "0.05");
    assert_eq!(doc["records"].as_array().unwrap().len(), 2);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["density", "--v0", "0.1", "--x", "1"][..],
        &["density", "--v0", "1.5", "--x", "1", "--t", "1"],
        &["density", "--v0", "0.1", "--x", "1", "--t", "1:2:1"],
        &["times", "--v0", "0.1", "--x", "1", "--t", "2"],
        &["figure", "no-such-figure"],
        &["frobnicate"],
        &["density", "--config", "/nonexistent/run.cfg"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert_eq!(error_record(&out)["error"]["exit_code"], 2, "{args:?}");
    }
}

#[test]
fn unwritable_output_is_a_usage_error() {
    let out = run(&["times", "--v0", "0.1", "--x", "1", "--out", "/nonexistent/dir/out.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_record(&out)["error"]["kind"], "IoError");
}

#[test]
fn numerical_errors_exit_3_with_cell() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    let out = run(&[
        "density", "--v0", "0.1", "--x", "1", "--t", "0,1", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let rec = error_record(&out);
    assert_eq!(rec["error"]["kind"], "DomainError");
    assert_eq!(rec["error"]["cell"]["t"], 0.0);
    assert_eq!(rec["error"]["cell"]["v0"], 0.1);
    assert!(!path.exists());

    // N(0) diverges, so the normalized map refuses v0 = 0.
    let out = run(&["dit-map", "--v0", "0,0.1", "--x", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_record(&out)["error"]["cell"]["v0"], 0.0);
}

#[test]
fn oracle_check_threshold() {
    let out = run(&["oracle-check", "--points", "5", "--max-rel-err", "1e-30"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_record(&out)["error"]["kind"], "OracleMismatch");
    assert!(!out.stdout.is_empty());
}

#[test]
fn oracle_check_cn() {
    let out = run(&[
        "oracle-check", "--method", "cn", "--v0", "0.3", "--dx", "0.02", "--dt", "1e-3",
        "--x-max", "2", "--t-final", "2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let l2: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("# relative_l2: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(l2 < 1e-2, "{l2}");
    assert!(text.contains("\nt,x,cn_re,cn_im,exact_re,exact_im\r\n"));
}

#[test]
fn figure_flux_origin_series() {
    let out = run(&["figure", "flux-origin"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut v0s: Vec<String> = rdr.records().map(|r| r.unwrap()[0].to_string()).collect();
    assert_eq!(v0s.len(), 4000);
    v0s.dedup();
    assert_eq!(v0s, ["0.001", "0.25", "0.5", "0.999"]);
}

#[test]
fn help_and_version_exit_0() {
    assert!(run(&["--help"]).status.success());
    assert!(run(&["--version"]).status.success());
}
