use std::process::{Command, Output};

fn polywythoff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polywythoff")).args(args).env_remove("POLYWYTHOFF_CAP").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const G2: [&str; 8] = ["build", "--modred", "tail=[3] triangle=(4,inf,2)", "--lengths", "1,1,2,4", "--prime", "2", "--no-timing"];

#[test]
fn tomotope_report() {
    let o = polywythoff(&["build", "--fixture", "tomotope.tt"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("order: 96"));
    assert!(out.contains("fvec = (4, 12, 16, 4+4) flags=192 orbits=2 class=TwoOrbit"));
    assert!(out.contains("intersection: full=pass reduced=pass (agree)"));
    assert!(out.lines().any(|l| l.starts_with("timing: ")));
}

#[test]
fn failed_relation_exits_with_one() {
    let o = polywythoff(&["build", "--fixture", "bad_commutation"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("CommutationViolation"));
}

#[test]
fn reduction_mod_two_has_three_vertices() {
    let o = polywythoff(&G2);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("fvec = (3, 12, 16, 4+4) flags=192 orbits=2 class=Regular"));
}

#[test]
fn reports_are_deterministic() {
    let (a, b) = (polywythoff(&G2), polywythoff(&G2));
    assert_eq!(a.stdout, b.stdout);
    let mut json = G2.to_vec();
    json.push("--json");
    let (a, b) = (polywythoff(&json), polywythoff(&json));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["order"], 96);
    assert_eq!(v["flags"], 192);
    assert_eq!(v["classification"], "Regular");
    assert_eq!(v["intersection"]["agree"], true);
    assert!(v.get("timings_ms").is_none());
}

#[test]
fn input_errors_exit_with_two() {
    let cases: [&[&str]; 5] = [
        &["build", "--fixture", "no_such_fixture"],
        &["build", "--modred", "tail=[3] triangle=(4,inf,inf)", "--lengths", "1,1,2,4", "--prime", "2"],
        &["build", "--modred", "tail=[3] triangle=(4,inf,2)", "--lengths", "1,1,2,4", "--prime", "5"],
        &["build", "--modred", "tail=[3] triangle=(4,inf,2)", "--lengths", "1,1,2,4", "--prime", "4"],
        &["build", "--fixture", "diagram64.mr", "--prime", "3", "--ringing", "4"],
    ];
    for args in cases {
        let o = polywythoff(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).starts_with("error: "));
    }
}

#[test]
fn malformed_fixture_reports_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.tt");
    std::fs::write(&path, "tail-triangle n=1 degree=3\nalpha0 = (1,2)\nbeta = (2,9\n").unwrap();
    let o = polywythoff(&["build", "--fixture", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn closure_cap_comes_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_polywythoff"))
        .args(["build", "--fixture", "tomotope"])
        .env("POLYWYTHOFF_CAP", "50")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("CapExceeded"), "{}", stderr(&o));
}

#[test]
fn hasse_export_lists_faces_covers_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tomotope.hasse");
    let o = polywythoff(&["export-hasse", "--fixture", "tomotope", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&path).unwrap();
    // bottom, 4 + 12 + 16 + 8 proper faces and top
    assert_eq!(text.lines().filter(|l| l.starts_with("face ")).count(), 42);
    assert!(text.lines().any(|l| l.starts_with("cover ")));
    assert!(text.lines().any(|l| l.contains("kind=P")));
    assert_eq!(text.lines().last().unwrap(), "fvec = (4, 12, 16, 4+4) flags=192 orbits=2 class=TwoOrbit");
    let via_build = dir.path().join("build.hasse");
    polywythoff(&["build", "--fixture", "tomotope", "--export-hasse", via_build.to_str().unwrap()]);
    assert_eq!(std::fs::read_to_string(via_build).unwrap(), text);
}

#[test]
fn verify_and_classify() {
    let o = polywythoff(&["verify", "--fixture", "m66_240a", "--no-timing"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("order: 240"));
    let o = polywythoff(&["classify", "--fixture", "b3_digon"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "fvec = (8, 24, 6+12) flags=96 orbits=2 class=TwoOrbit");
}

#[test]
fn modred_compares_ringings() {
    let o = polywythoff(&["modred", "--fixture", "diagram64.mr", "--prime", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("discriminant: 0 singular: true"));
    assert!(out.contains("ringings 1 and 3: isomorphic"));
    assert!(out.contains("ringings 1 and 2: not isomorphic"));
    let o = polywythoff(&["modred", "--fixture", "diagram64.mr", "--prime", "2", "--search-lengths"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().filter(|l| l.ends_with("C-group of order 96")).count(), 1);
}

#[test]
fn amalgam_words_and_balls() {
    let args = ["amalgam", "--p", "tetrahedron", "--q", "hemioctahedron", "--shared", "2", "--ball", "2", "--word", "a2 b a2 b a0 a0"];
    let o = polywythoff(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("normal form 1 | a2 | b | a2 | b (length 4)"));
    assert!(out.contains("5 ridges, 6 facets, open and alternating"));
    let o = polywythoff(&["amalgam", "--p", "tetrahedron", "--q", "octahedron", "--shared", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = polywythoff(&["amalgam", "--p", "triangle", "--q", "square", "--close-up", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("open question"));
    let o = polywythoff(&["amalgam", "--p", "tomotope", "--q", "square"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn selftest_writes_a_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = polywythoff(&["selftest", "--quick", "--json-report", path.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let criteria = v["criteria"].as_array().unwrap();
    assert_eq!(criteria.len(), 10);
    let all = criteria.iter().all(|c| c["passed"] == true);
    assert_eq!(o.status.code(), Some(if all { 0 } else { 1 }));
    assert!(stdout(&o).contains("criteria passed"));
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c.get("expected").is_some() && c.get("computed").is_some()));
}
