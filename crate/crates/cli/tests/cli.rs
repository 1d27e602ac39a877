use poincare_cli::{run, EXIT_ASSERTION, EXIT_INPUT, EXIT_OK};
use serde_json::Value;

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(
        std::iter::once("poincare").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn thresholds_report_the_three_values() {
    let (code, out, _) = cli(&["thresholds", "--epsilon", "2", "--n", "1"]);
    assert_eq!(code, EXIT_OK);
    let r = json(&out);
    assert_eq!(r["command"], "thresholds");
    assert_eq!(r["result"]["demailly"], 3);
    assert_eq!(r["result"]["main"], 4);
    // (m − 2 + 1/2)·2 > 2 first holds at m = 3
    assert_eq!(r["result"]["donnelly_fefferman"], 3);
    assert!(out.ends_with("}\n"));
}

#[test]
fn unknown_command_is_an_input_error_with_usage() {
    let (code, out, err) = cli(&["frobnicate"]);
    assert_eq!(code, EXIT_INPUT);
    assert!(out.is_empty());
    assert!(err.contains("Usage"), "{err}");
}

#[test]
fn help_and_version_succeed() {
    let (code, out, _) = cli(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("separation-scan"));
    let (code, out, _) = cli(&["--version"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("poincare "));
}

#[test]
fn bad_values_are_input_errors() {
    let (code, _, err) = cli(&["thresholds", "--epsilon", "two"]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("command line"), "{err}");
    let (code, _, err) = cli(&["thresholds"]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("epsilon"), "{err}");
    let (code, _, _) = cli(&["thresholds", "--epsilon", "-1"]);
    assert_eq!(code, EXIT_INPUT);
}

#[test]
fn failed_inequality_exits_with_assertion_code() {
    // partial sums listed in decreasing radius are not monotone
    let (code, out, err) = cli(&["weight-sum", "--radii", "8,6"]);
    assert_eq!(code, EXIT_ASSERTION, "{err}");
    assert_eq!(json(&out)["passed"], false);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exp.conf");
    std::fs::write(&path, "# thresholds\nepsilon = 0.5\nn = 2\n").unwrap();
    let p = path.to_str().unwrap();
    let (code, out, _) = cli(&["thresholds", "--config", p]);
    assert_eq!(code, EXIT_OK);
    let r = json(&out);
    // (m − 1)/2 > 4 and (m − 2)/2 > 4
    assert_eq!(r["result"]["demailly"], 10);
    assert_eq!(r["result"]["main"], 11);
    let (_, out, _) = cli(&["thresholds", "--config", p, "--n", "1"]);
    let r = json(&out);
    assert_eq!(r["config"]["n"], 1);
    assert_eq!(r["config"]["epsilon"], 0.5);
    assert_eq!(r["result"]["main"], 7);
}

#[test]
fn config_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.conf");
    std::fs::write(&path, "epsilon = 1\nbogus_key = 3\n").unwrap();
    let (code, _, err) = cli(&["thresholds", "--config", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn report_and_csv_files_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let csv = dir.path().join("t.csv");
    let (code, out, _) = cli(&[
        "enumerate",
        "-R",
        "4",
        "-o",
        report.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.is_empty());
    let r = json(&std::fs::read_to_string(&report).unwrap());
    let count = r["result"]["count"].as_u64().unwrap() as usize;
    let table = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "word,displacement,alpha_re,alpha_im,beta_re,beta_im");
    assert_eq!(lines.len(), count + 1);
    // identity first, then floats with 17 significant digits
    assert!(
        lines[1].starts_with("id,0.0000000000000000e0,1.0000000000000000e0"),
        "{}",
        lines[1]
    );
}

#[test]
fn resolved_defaults_are_recorded() {
    let (code, out, _) = cli(&["injectivity-radius"]);
    assert_eq!(code, EXIT_OK);
    let r = json(&out);
    assert_eq!(r["config"]["group"]["preset"], "genus2");
    assert_eq!(r["config"]["x"], serde_json::json!([0.0, 0.0]));
    let rho = r["result"]["rho"].as_f64().unwrap();
    // half of 2·arccosh(1 + √2)
    assert!((rho - (1.0 + 2f64.sqrt()).acosh()).abs() < 1e-12, "{rho}");
}

#[test]
fn group_file_matches_preset() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.conf");
    std::fs::write(
        &path,
        poincare_core::config::group_to_config(&poincare_core::group::preset("genus2").unwrap()),
    )
    .unwrap();
    let (c1, a, _) = cli(&["enumerate", "-R", "5"]);
    let (c2, b, _) = cli(&["enumerate", "-R", "5", "--group-file", path.to_str().unwrap()]);
    assert_eq!((c1, c2), (EXIT_OK, EXIT_OK));
    assert_eq!(json(&a)["result"]["count"], json(&b)["result"]["count"]);
    assert_eq!(
        json(&a)["result"]["counts_by_radius"],
        json(&b)["result"]["counts_by_radius"]
    );
}

#[test]
fn explicit_point_gives_the_pointwise_bound() {
    let (code, out, err) = cli(&["seshadri-bound", "-x", "0.1+0.2i"]);
    assert_eq!(code, EXIT_OK, "{err}");
    let r = json(&out);
    assert_eq!(r["config"]["samples"], Value::Null);
    assert_eq!(r["result"]["reports"].as_array().unwrap().len(), 1);
    assert_eq!(r["result"]["argmin"], serde_json::json!([0.1, 0.2]));
    let eps = r["result"]["epsilon_lower"].as_f64().unwrap();
    let rho = r["result"]["reports"][0]["rho_x"].as_f64().unwrap();
    assert!(eps >= rho * rho / 2.0 - 1e-12, "{eps} {rho}");
}
