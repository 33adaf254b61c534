use std::io::Write;

use serde_json::Value;
use treecells::cli::run;

fn call(args: &[&str]) -> (i32, Vec<Value>, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["treecells"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    let lines = String::from_utf8(out)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    (code, lines, String::from_utf8(err).unwrap())
}

/// Records between the command echo and the status line.
fn payload(lines: &[Value]) -> &[Value] {
    &lines[2..lines.len() - 1]
}

#[test]
fn header_and_status() {
    let (code, lines, err) = call(&["trees", "enum", "--dim", "3"]);
    assert_eq!(code, 0);
    assert_eq!(lines[0]["schema"], "treecells.report/1");
    assert_eq!(lines[1]["command"], "trees enum");
    assert_eq!(lines.last().unwrap()["exit_status"], 0);
    assert_eq!(payload(&lines).len(), 8);
    assert!(err.contains("8 reduced trees"));
}

#[test]
fn linear_differential_example() {
    let (code, lines, _) = call(&["diff", "--barcode", "[1|2||3]", "--linear-only"]);
    assert_eq!(code, 0);
    let terms: Vec<(String, i64)> = payload(&lines)
        .iter()
        .map(|v| (v["term"].as_str().unwrap().to_string(), v["coeff"].as_i64().unwrap()))
        .collect();
    assert_eq!(terms, vec![("[1|2|3]".into(), 1), ("[1|3|2]".into(), -1), ("[3|1|2]".into(), 1)]);
}

#[test]
fn full_differential_over_both_rings() {
    let (_, z, _) = call(&["diff", "--barcode", "[1|2||3]"]);
    let (_, f2, _) = call(&["diff", "--barcode", "[1|2||3]", "--ring", "f2"]);
    assert_eq!(payload(&z).len(), 6);
    let zt: Vec<&Value> = payload(&z).iter().map(|v| &v["term"]).collect();
    let ft: Vec<&Value> = payload(&f2).iter().map(|v| &v["term"]).collect();
    assert_eq!(zt, ft);
}

#[test]
fn classification_example() {
    let (code, lines, _) = call(&["classify", "--arity", "6", "--height", "2"]);
    assert_eq!(code, 0);
    let c = &payload(&lines)[0];
    assert_eq!(c["regular"], false);
    assert_eq!(c["d_crit"], 6);
    assert_eq!(c["witness"]["certificate"][0], "[[1||3||5]|[2||4||6]]");
    let (_, lines, _) = call(&["classify", "--arity", "5", "--height", "inf"]);
    assert_eq!(payload(&lines)[0]["d_crit"], 5);
    let (_, lines, _) = call(&["classify", "--arity", "3", "--height", "inf"]);
    assert_eq!(payload(&lines)[0]["d_crit"], "inf");
}

#[test]
fn counterterm_round_trip() {
    let (code, lines, _) = call(&["counterterm", "--barcode", "[1|2|||3|4]"]);
    assert_eq!(code, 0);
    let r = &payload(&lines)[0];
    assert_eq!(r["verified"], true);
    let terms: Vec<String> =
        r["counterterm"].as_array().unwrap().iter().map(|t| t.as_str().unwrap().to_string()).collect();
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "{}", terms.join(" ")).unwrap();
    let path = f.path().to_str().unwrap();
    let (code, lines, _) = call(&["counterterm", "--barcode", "[1|2|||3|4]", "--verify", path]);
    assert_eq!(code, 0);
    assert_eq!(payload(&lines)[0]["verified"], true);
}

#[test]
fn lie_commands() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "+(1,2,3) -(1,3,2) -(2,3,1) +(3,2,1)").unwrap();
    let path = f.path().to_str().unwrap();
    let (_, lines, _) = call(&["lie", "ree", "--n", "3", "--input", path]);
    assert_eq!(payload(&lines)[0]["ree"], true);
    let (_, lines, _) = call(&["lie", "coords", "--n", "3", "--input", path]);
    assert_eq!(payload(&lines)[0]["coordinates"]["(1,2)"], 1);
    let (_, lines, _) = call(&["lie", "quotient", "--n", "4"]);
    assert_eq!(payload(&lines)[0]["quotient_rank"], 6);
}

#[test]
fn homology_command() {
    let (code, lines, err) = call(&["homology", "--arity", "4", "--height", "inf", "--dmax", "5"]);
    assert_eq!(code, 0);
    let ranks: Vec<i64> = payload(&lines).iter().map(|r| r["rank"].as_i64().unwrap()).collect();
    assert_eq!(ranks[2], 6);
    assert!(err.contains("torsion free"));
}

#[test]
fn exit_codes() {
    assert_eq!(call(&["classify", "--arity", "1", "--height", "2"]).0, 1);
    assert_eq!(call(&["diff", "--barcode", "[1|1]"]).0, 1);
    assert_eq!(call(&["lie", "quotient", "--n", "9"]).0, 2);
    assert_eq!(call(&["trees", "enum", "--dim", "2", "--arity", "12", "--labeled"]).0, 2);
    assert_eq!(call(&["homology", "--arity", "3"]).0, 1);
    let (code, lines, _) = call(&["faces", "--barcode", "[1|2|3|4|5|6|7|8|9|10]"]);
    assert_eq!(code, 2);
    assert_eq!(lines.last().unwrap()["exit_status"], 2);
}

#[test]
fn identical_invocations_give_identical_bytes() {
    let once = || {
        let mut out = Vec::new();
        run(["treecells", "faces", "--barcode", "[2|1||3|4]"], &mut out, &mut Vec::new());
        out
    };
    assert_eq!(once(), once());
}
