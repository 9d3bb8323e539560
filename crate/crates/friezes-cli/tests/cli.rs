use assert_cmd::Command;

fn data(name: &str) -> String {
    format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn friezes() -> Command {
    Command::cargo_bin("friezes").unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = friezes().args(args).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn integer_frieze_rows() {
    let out = stdout(&["frieze", "integer", "--quiddity", "4,1,2,3,2", "--rows", "5", "--format", "tsv"]);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows[3], "3\t1\t5\t5\t7");
    assert_eq!(rows[4], "2\t2\t8\t17\t5");
    assert_eq!(rows[5], "3\t3\t27\t12\t3");
    let json = stdout(&["frieze", "integer", "--quiddity", "1,2,6", "--rows", "4", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["period"], 3);
    assert!(stdout(&["frieze", "integer", "--quiddity", "1,2,6", "--rows", "3", "--format", "latex"]).starts_with("\\begin{array}"));
}

#[test]
fn worked_arc_with_both_engines() {
    let d5 = data("d5.json");
    let out = stdout(&["expand", "arc", "--triangulation", &d5, "--from", "5", "--to", "4", "--level", "2", "--engine", "both"]);
    let mut lines = out.lines();
    let poly = friezes::laurent::LaurentPoly::parse_text(lines.next().unwrap(), None).unwrap();
    let expect = friezes::laurent::LaurentPoly::parse_text(
        "1 + 2*x0^-1*x3 + 2*x0*x1^-1*x4^-1 + 4*x1^-1*x3*x4^-1 + 2*x0^-1*x1^-1*x3^2*x4^-1",
        None,
    )
    .unwrap();
    assert_eq!(poly, expect);
    assert!(lines.next().unwrap().contains("agree"));
}

#[test]
fn verification_exit_codes() {
    let d5 = data("d5.json");
    friezes().args(["verify", "diamond", "--triangulation", &d5, "--rows", "3", "--cols", "10"]).assert().code(0);
    friezes().args(["verify", "bijection", "--triangulation", &d5, "--seed", "7"]).assert().code(0);
    friezes().args(["verify", "growth", "--triangulation", &data("c31.json")]).assert().code(0);
    friezes().args(["verify", "diamond", "--triangulation", "missing.json"]).assert().code(2);
    friezes().args(["frieze", "integer", "--quiddity", "1,1", "--rows", "4"]).assert().code(2);
    friezes().args(["expand", "arc", "--engine", "fast"]).assert().code(2);
    friezes().args(["verify", "growth", "--triangulation", &data("p5.json")]).assert().code(2);
}

#[test]
fn broken_schema_is_an_input_error() {
    let dir = std::env::temp_dir().join("friezes-cli-schema.json");
    std::fs::write(&dir, r#"{"surface": {"kind": "polygon", "n": 5}, "arcs": []}"#).unwrap();
    friezes().args(["verify", "diamond", "--triangulation", dir.to_str().unwrap()]).assert().code(2);
}

#[test]
fn lattice_and_cover_exports() {
    let d5 = data("d5.json");
    let arc = ["--triangulation", d5.as_str(), "--from", "5", "--to", "4", "--level", "2"];
    let dot = stdout(&[&["lattice"][..], &arc[..]].concat());
    assert!(dot.starts_with("digraph"));
    let json = stdout(&[&["lattice"][..], &arc[..], &["--out", "json"][..]].concat());
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["poset"]["order_ideals"], 11);
    assert_eq!(v["isomorphic"], true);
    let cover = stdout(&[&["cover"][..], &arc[..], &["--out", "json"][..]].concat());
    let v: serde_json::Value = serde_json::from_str(&cover).unwrap();
    assert_eq!(v["diagonals"].as_array().unwrap().len(), 5);
}

#[test]
fn output_is_deterministic() {
    let c31 = data("c31.json");
    let args = ["frieze", "laurent", "--triangulation", c31.as_str(), "--boundary", "inner", "--rows", "4", "--cols", "3"];
    assert_eq!(stdout(&args), stdout(&args));
}
