use std::process::Command;

use serde_json::Value;

fn polykernel(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_polykernel"))
        .args(args)
        .env_remove("POLYKERNEL_MAX_TERMS")
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).expect("valid json")
}

#[test]
fn eval_bergman_q2_at_origin() {
    let (code, out, _) = polykernel(&[
        "eval",
        "--measure",
        "bergman",
        "--alpha",
        "0",
        "--q",
        "2",
        "--z",
        "0",
        "--w",
        "0",
    ]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["schema"], "polykernel/1");
    assert!((v["re"].as_f64().unwrap() - 4.0).abs() < 1e-12);
    assert_eq!(v["im"].as_f64().unwrap(), 0.0);
    assert_eq!(v["truncated"], false);
}

#[test]
fn series_and_closed_agree_through_the_binary() {
    let args = [
        "eval",
        "--measure",
        "fock",
        "--q",
        "3",
        "--z",
        "0.3+1.1i",
        "--w",
        "-0.4-0.2i",
    ];
    let (_, series, _) = polykernel(&args);
    let mut closed_args = args.to_vec();
    closed_args.extend(["--method", "closed"]);
    let (code, closed, _) = polykernel(&closed_args);
    assert_eq!(code, 0);
    let (s, c) = (json(&series), json(&closed));
    for part in ["re", "im"] {
        let (a, b) = (s[part].as_f64().unwrap(), c[part].as_f64().unwrap());
        assert!(
            (a - b).abs() <= 1e-10 * (1.0 + b.abs()),
            "{part}: {a} vs {b}"
        );
    }
    assert!(c.get("terms_used").is_none());
}

#[test]
fn term_cap_from_environment_flags_truncation() {
    let out = Command::new(env!("CARGO_BIN_EXE_polykernel"))
        .args(["eval", "--z", "0.9", "--w", "0.9"])
        .env("POLYKERNEL_MAX_TERMS", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v = json(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(v["truncated"], true);
    assert_eq!(v["terms_used"], 3);
    assert!(String::from_utf8(out.stderr).unwrap().contains("warning"));
}

#[test]
fn grid_csv_has_one_row_per_point() {
    let (code, out, _) = polykernel(&[
        "eval",
        "--grid",
        "0:0.2:0:0.1:0.1",
        "--w",
        "0.1",
        "--format",
        "csv",
    ]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "z0_re,z0_im,re,im,terms_used,truncated");
    assert_eq!(lines.len(), 1 + 6);
    assert!(lines[1].starts_with("0,0,1,"));
}

#[test]
fn product_kernel_atoms_per_coordinate() {
    let (code, out, _) = polykernel(&[
        "eval",
        "--measure",
        "atoms,bergman",
        "--atoms",
        "0.25:0.5,1:0.5",
        "--q",
        "1",
        "--z",
        "0.1,0.2i",
        "--w",
        "0.1,0",
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(json(&out)["re"].as_f64().unwrap() > 0.0);
}

#[test]
fn compare_reports_grid_and_argmax() {
    let (code, out, _) = polykernel(&[
        "compare",
        "--measure",
        "bergman",
        "--alpha",
        "0.5",
        "--q",
        "2",
    ]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["grid"]["pairs"], 81);
    assert!(v["max_rel_err"].as_f64().unwrap() < 1e-6);
    assert_eq!(v["exact_formula"], true);
    assert!(v["argmax_point"]["z"].is_array());
}

#[test]
fn published_form_is_off_by_the_binomial() {
    let (_, out, _) = polykernel(&[
        "compare",
        "--alpha",
        "2",
        "--q",
        "2",
        "--method",
        "published",
        "--points",
        "3",
    ]);
    // binom(3, 2) - 1
    let err = json(&out)["max_rel_err"].as_f64().unwrap();
    assert!((err - 2.0).abs() < 1e-9, "{err}");
}

#[test]
fn verify_exit_codes() {
    let (code, out, _) = polykernel(&[
        "verify",
        "--measure",
        "bergman",
        "--alpha",
        "0.5",
        "--q",
        "2",
    ]);
    assert_eq!(code, 0, "{out}");
    let v = json(&out);
    assert_eq!(v["all_pass"], true);
    assert!(v["reports"].as_array().unwrap().len() >= 5);

    // too few moments for the Gram check
    let raw = [
        "verify",
        "--measure",
        "raw",
        "--moments",
        "1,0.5,0.25",
        "--suite",
        "orthonormality",
    ];
    let (code, out, _) = polykernel(&raw);
    assert_eq!(code, 1);
    assert_eq!(json(&out)["all_pass"], false);
    let mut lenient = raw.to_vec();
    lenient.push("--report-only");
    assert_eq!(polykernel(&lenient).0, 0);

    // the published form is known not to be the kernel: reported, never failing
    let (code, out, _) = polykernel(&[
        "verify",
        "--suite",
        "compare",
        "--method",
        "published",
        "--alpha",
        "2",
        "--q",
        "3",
    ]);
    assert_eq!(code, 0);
    let r = &json(&out)["reports"][0];
    assert_eq!(r["pass"], false);
    assert_eq!(r["report_only"], true);
}

#[test]
fn fock_alpha_nonzero_compare_does_not_fail_verify() {
    let (code, out, _) = polykernel(&[
        "verify",
        "--measure",
        "fock",
        "--alpha",
        "1",
        "--q",
        "2",
        "--suite",
        "compare",
    ]);
    assert_eq!(code, 0, "{out}");
    let v = json(&out);
    let r = &v["reports"][0];
    assert_eq!(r["report_only"], true);
    assert!(r["max_error"].as_f64().unwrap() > 0.0);
}

#[test]
fn moments_with_exact_values() {
    let (code, out, _) = polykernel(&[
        "moments",
        "--measure",
        "bergman",
        "--alpha",
        "0",
        "--max-d",
        "3",
    ]);
    assert_eq!(code, 0);
    let v = json(&out);
    let m = v["moments"].as_array().unwrap();
    assert_eq!(m.len(), 4);
    assert_eq!(m[3]["s_exact"], "1/4");
    assert!((m[3]["s"].as_f64().unwrap() - 0.25).abs() < 1e-14);
}

#[test]
fn raw_moments_from_file() {
    let dir = std::env::temp_dir().join(format!("polykernel-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("moments.txt");
    let text: String = (0..40)
        .map(|d| format!("{}\n", 1.0 / (d as f64 + 1.0)))
        .collect();
    std::fs::write(&path, text).unwrap();
    let (code, out, _) = polykernel(&[
        "eval",
        "--measure",
        "raw",
        "--moments-file",
        path.to_str().unwrap(),
        "--z",
        "0.2",
        "--w",
        "0.2",
    ]);
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(code, 0, "{out}");
    // these are the Bergman alpha=0 moments: 1/(1-|z|^2)^2
    let want = 1.0 / (1.0f64 - 0.04).powi(2);
    assert!((json(&out)["re"].as_f64().unwrap() - want).abs() < 1e-9);
}

#[test]
fn basis_json_and_csv() {
    let (code, out, _) = polykernel(&[
        "basis",
        "--measure",
        "fock",
        "--d",
        "0",
        "--n",
        "2",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["coefficients"].as_array().unwrap().len(), 3);
    assert!(v["cond_estimate"].as_f64().unwrap() >= 1.0);
    let (code, out, _) = polykernel(&["basis", "--measure", "fock", "--n", "1"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next().unwrap(), "degree,c0,c1");
}

#[test]
fn usage_and_compute_errors() {
    let (code, _, err) = polykernel(&["eval", "--z", "0.1", "--w", "1e"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error:"));

    let (code, _, _) = polykernel(&["eval", "--z", "0.1,0.2", "--w", "0.1"]);
    assert_eq!(code, 2);

    let (code, _, _) = polykernel(&["eval", "--measure", "atoms", "--z", "0", "--w", "0"]);
    assert_eq!(code, 2);

    let (code, out, _) = polykernel(&["eval", "--alpha", "-1", "--z", "0", "--w", "0"]);
    assert_eq!(code, 1);
    assert_eq!(json(&out)["error"]["kind"], "parameter");

    let (code, out, _) = polykernel(&["eval", "--z", "0.5", "--w", "1.2"]);
    assert_eq!(code, 1);
    assert_eq!(json(&out)["error"]["kind"], "domain");

    let (code, _, _) = polykernel(&["nonsense"]);
    assert_eq!(code, 2);
}

#[test]
fn table_diagonal_matches_closed_form() {
    let (code, out, _) = polykernel(&["table", "--q", "2", "--rmax", "0.8", "--steps", "4"]);
    assert_eq!(code, 0);
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 5);
    for row in rows {
        let rel: f64 = row[3].parse().unwrap();
        assert!(rel < 1e-10);
    }
}
