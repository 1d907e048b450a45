use std::path::PathBuf;
use std::process::{Command, Output};

fn i2_file() -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/i2.dgcat").display().to_string()
}

fn dgquot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dgquot")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn validate_bundled_file() {
    let o = dgquot(&["validate", &i2_file()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("valid: 3 objects"));
}

#[test]
fn render_is_canonical() {
    let f = i2_file();
    let o = dgquot(&["render", &f]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), std::fs::read_to_string(&f).unwrap());
    let j = dgquot(&["--format", "json", "render", &f]);
    let v: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    assert_eq!(v["format_version"], 1);
    assert_eq!(v["presentation"]["mode"], "table");
}

#[test]
fn json_input_is_accepted() {
    let j = dgquot(&["--format", "json", "render", &i2_file()]);
    let dir = std::env::temp_dir().join(format!("dgquot-json-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("i2.json");
    std::fs::write(&path, &j.stdout).unwrap();
    let o = dgquot(&["render", path.to_str().unwrap()]);
    assert_eq!(stdout(&o), std::fs::read_to_string(i2_file()).unwrap());
}

#[test]
fn ext_of_a_hom() {
    let o = dgquot(&["ext", &i2_file(), "X1", "Cone(f)", "--window=-2:2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_slice(&dgquot(&["--format", "json", "ext", &i2_file(), "X1", "Cone(f)", "--window", "-2:2"]).stdout)
            .unwrap();
    for m in -2..=2 {
        assert_eq!(v["table"]["entries"][m.to_string()]["dim"], 0);
    }
}

#[test]
fn pretr_ext_of_a_cone() {
    let o = dgquot(&[
        "--format",
        "json",
        "pretr-ext",
        &i2_file(),
        "X2 + X1[1] ; q(0,1) = 1 f",
        "X2 + X1[1] ; q(0,1) = 1 f",
        "--window=-2:2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    // twisted complexes over the table category itself: the entries are Homs of A
    assert!(v["table"]["entries"].is_object());
}

#[test]
fn quotient_ext_requires_window_and_level() {
    let o = dgquot(&["quotient-ext", &i2_file(), "X1", "X2"]);
    assert_eq!(o.status.code(), Some(3));
    let o = dgquot(&["quotient-ext", &i2_file(), "X1", "X2", "--window=-2:2", "--max-level", "6"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("truncation:") && text.contains("cone:") && text.contains("verdier:"));
    assert!(text.contains("H^0   1"));
}

#[test]
fn cross_check_on_x_pairs() {
    let o = dgquot(&[
        "cross-check",
        &i2_file(),
        "--pairs",
        "X1:X1,X1:X2,X2:X1,X2:X2",
        "--window=-2:2",
        "--max-level",
        "8",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("no discrepancies"));
}

#[test]
fn cross_check_random_seed() {
    let o = dgquot(&["--format", "json", "cross-check", "--random", "--seed", "4", "--window=-2:2", "--max-level", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["discrepancies"], serde_json::json!([]));
    assert_eq!(dgquot(&["cross-check", "--random", "--window=-2:2", "--max-level", "6"]).status.code(), Some(3));
}

#[test]
fn orthogonal_of_x2() {
    let o = dgquot(&["orthogonal", &i2_file(), "X2", "--window=-3:3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("acyclic on B in every degree: true"));
}

#[test]
fn resolve_category_prints_a_free_file() {
    let dir = std::env::temp_dir().join(format!("dgquot-res-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("i2.dgcat");
    std::fs::write(
        &src,
        "dgcat 1\nfield Q\nobjects a b\npresentation table\nhom a a\n  basis id 0\nhom a b\n  basis f 0\nhom b a\n  basis g 0\nhom b b\n  basis id 0\nunit a = 1 id\nunit b = 1 id\ncompose a a a id id = 1 id\ncompose a a b f id = 1 f\ncompose a b a g f = 1 id\ncompose a b b id f = 1 f\ncompose b a a id g = 1 g\ncompose b a b f g = 1 id\ncompose b b a g id = 1 g\ncompose b b b id id = 1 id\n",
    )
    .unwrap();
    let o = dgquot(&["resolve-category", src.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = dir.join("k.dgcat");
    std::fs::write(&out, &o.stdout).unwrap();
    let v = dgquot(&["validate", out.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0), "{}", String::from_utf8_lossy(&v.stderr));
}

#[test]
fn check_quotient_exit_codes() {
    let good = dgquot(&["check-quotient", "i2"]);
    assert_eq!(good.status.code(), Some(0));
    assert_eq!(stdout(&good), "yes\n");
    let broken = dgquot(&["check-quotient", "i2-broken"]);
    assert_eq!(broken.status.code(), Some(1));
    assert!(stdout(&broken).starts_with("no: (a)"));
    assert_eq!(dgquot(&["check-quotient", "k"]).status.code(), Some(0));
    let kb = dgquot(&["check-quotient", "k-broken"]);
    assert_eq!(kb.status.code(), Some(1), "{}", stdout(&kb));
}

#[test]
fn demo_i2_matches() {
    let o = dgquot(&["demo", "i2", "--window", "-3:3", "--max-level", "8", "--stable", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.matches("as expected").count(), 4);
    assert!(text.contains("no discrepancies"));
}

#[test]
fn input_errors_exit_3() {
    assert_eq!(dgquot(&["validate", "/nonexistent.dgcat"]).status.code(), Some(3));
    let dir = std::env::temp_dir().join(format!("dgquot-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.dgcat");
    std::fs::write(&bad, "dgcat 1\nfield Q\nobjects P\npresentation table\nhom P Q\n").unwrap();
    let o = dgquot(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains(":5:7:"));
    let invalid = dir.join("invalid.dgcat");
    std::fs::write(&invalid, "dgcat 1\nfield Q\nobjects P\npresentation table\nhom P P\n  basis id 0\n").unwrap();
    assert_eq!(dgquot(&["validate", invalid.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(dgquot(&["ext", &i2_file(), "X1", "Nope", "--window=0:0"]).status.code(), Some(3));
    assert_eq!(dgquot(&["ext", &i2_file(), "X1", "X2", "--window=2:0"]).status.code(), Some(3));
}
