use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const SCENE: &str = r#"
order = 12

[media]
kind = "direct"
k0 = 1.0
k1 = 2.0
lambda_e = 0.5
lambda_h = 1.0

[interface]
kind = "sphere"
radius = 2.0

[obstacle]
kind = "sphere"
radius = 1.0

[boundary]
kind = "impedance"
lambda = 1.0
"#;

fn strata(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strata")).args(args).output().expect("spawn")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_subset_passes() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write(dir.path(), "scene.toml", SCENE);
    let out = strata(&["verify", s(&scene), "--checks", "residuals,energy,oracle", "--seed", "3"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{text}\n{}", String::from_utf8_lossy(&out.stderr));
    assert!(text.starts_with("report scene_hash="));
    assert!(text.contains("check=oracle_farfield order=12"));
    assert!(text.trim_end().ends_with("summary pass=true failed=0"));
}

#[test]
fn bad_input_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", &SCENE.replace("radius = 1.0", "radius = 3.0"));
    assert_eq!(strata(&["verify", s(&bad)]).status.code(), Some(2));
    let junk = write(dir.path(), "junk.toml", "order = \"many\"");
    assert_eq!(strata(&["geometry-dump", s(&junk)]).status.code(), Some(2));
    let scene = write(dir.path(), "scene.toml", SCENE);
    assert_eq!(strata(&["verify", s(&scene), "--checks", "nonsense"]).status.code(), Some(2));
    assert_eq!(strata(&["solve", s(&scene), "--incident", "plane:0,0,1:0,0,1", "--out", "x.csv"]).status.code(), Some(2));
    assert_eq!(strata(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn solver_agrees_with_oracle_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write(dir.path(), "scene.toml", SCENE);
    let (a, b) = (dir.path().join("bie.csv"), dir.path().join("series.csv"));
    let inc = "plane:0,0,1:1,0,0";
    let solve = strata(&["solve", s(&scene), "--incident", inc, "--out", s(&a), "--grid", "8"]);
    assert!(solve.status.success(), "{}", String::from_utf8_lossy(&solve.stderr));
    assert!(strata(&["oracle", s(&scene), "--incident", inc, "--out", s(&b), "--grid", "8"]).status.success());
    let head = fs::read_to_string(&a).unwrap();
    assert!(head.contains("# source=bie"));
    assert!(head.contains("theta,phi,ReEx,ImEx,ReEy,ImEy,ReEz,ImEz"));
    let out = strata(&["distance", s(&a), s(&b)]);
    assert!(out.status.success());
    let d: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!(d <= 1e-3, "distance {d}");
}

#[test]
fn geometry_dump_lists_both_surfaces() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write(dir.path(), "scene.toml", &SCENE.replace("kind = \"impedance\"", "kind = \"cap\"\npolar_angle = 1.0"));
    let out = dir.path().join("nodes.csv");
    assert!(strata(&["geometry-dump", s(&scene), "--out", s(&out)]).status.success());
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("surface,index,x,y,z,nx,ny,nz,weight,boundary"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert!(rows.iter().all(|r| r.len() == 10));
    let count = |k: &str| rows.iter().filter(|r| r[9] == k).count();
    assert_eq!(count("transmission"), rows.iter().filter(|r| r[0] == "interface").count());
    assert!(count("conducting") > 0 && count("impedance") > 0);
    let area: f64 = rows.iter().filter(|r| r[0] == "obstacle").map(|r| r[8].parse::<f64>().unwrap()).sum();
    assert!((area - 4.0 * std::f64::consts::PI).abs() < 1e-10, "{area}");
}
