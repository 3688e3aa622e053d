use std::path::Path;
use std::process::{Command, Output};

fn maxmod(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxmod"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn config(dir: &Path, name: &str, body: &str) -> String {
    std::fs::write(dir.join(name), body).unwrap();
    name.to_string()
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn hardy_eval_default_grid() {
    let d = tempfile::tempdir().unwrap();
    let out = maxmod(d.path(), &["eval", "--out", "o"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(d.path().join("o/eval.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,log_modulus,argument"));
    assert_eq!(lines.count(), 160_000);
}

#[test]
fn tyler_on_imaginary_axis() {
    let d = tempfile::tempdir().unwrap();
    let c = config(
        d.path(),
        "t.toml",
        "[model]\nkind = \"tyler\"\n[grid]\nx = [0.0, 0.0]\ny = [-3.0, 3.0]\npoints = [1, 61]\n",
    );
    let out = maxmod(d.path(), &["eval", "--config", &c, "--out", "o"]);
    assert_eq!(out.status.code(), Some(0));
    let rs = rows(&d.path().join("o/eval.csv"));
    assert_eq!(rs.len(), 61);
    for r in rs {
        let y: f64 = r[1].parse().unwrap();
        let lm: f64 = r[2].parse().unwrap();
        assert!((lm - (-y * y).exp()).abs() < 1e-12, "y = {y}: {lm}");
    }
}

#[test]
fn hardy_has_three_jumps_below_ten() {
    let d = tempfile::tempdir().unwrap();
    let out = maxmod(d.path(), &["discont", "--out", "o"]);
    assert_eq!(out.status.code(), Some(0));
    let rs = rows(&d.path().join("o/discontinuities.csv"));
    assert_eq!(rs.len(), 3);
    for (k, r) in rs.iter().enumerate() {
        let radius: f64 = r[0].parse().unwrap();
        assert!((radius - (k + 1) as f64 * std::f64::consts::PI).abs() < 1e-6);
        assert_eq!(r[2], "jump");
    }
}

#[test]
fn exponential_has_no_discontinuities() {
    let d = tempfile::tempdir().unwrap();
    let c = config(d.path(), "e.toml", "[model]\nkind = \"exponential\"\n[radius]\nmin = 0.5\nmax = 5.0\nsteps = 90\n");
    let out = maxmod(d.path(), &["discont", "--config", &c, "--out", "o"]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(d.path().join("o/discontinuities.csv")).unwrap();
    assert_eq!(text.lines().collect::<Vec<_>>(), ["r,theta,kind,left_gap"]);
}

#[test]
fn malformed_config_exits_2() {
    let d = tempfile::tempdir().unwrap();
    let c = config(d.path(), "bad.toml", "[model]\nkind = \"hardy\"\nalhpa = 2.0\n");
    let out = maxmod(d.path(), &["eval", "--config", &c]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alhpa"));
    assert!(!d.path().join("out").exists());
}

#[test]
fn non_monotone_radii_exit_2() {
    let d = tempfile::tempdir().unwrap();
    let c = config(d.path(), "r.toml", "[tract]\nlog_radii = [7.0, 6.0, 8.0]\n");
    let out = maxmod(d.path(), &["tract", "--config", &c]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tract.radii"));
}

#[test]
fn unknown_verify_level_exits_2() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(maxmod(d.path(), &["verify", "thorough"]).status.code(), Some(2));
}

#[test]
fn overflow_exits_3() {
    let d = tempfile::tempdir().unwrap();
    let c = config(d.path(), "o.toml", "[model]\nkind = \"tyler\"\n[grid]\nx = [29.0, 30.0]\ny = [0.0, 0.0]\npoints = [2, 1]\n");
    assert_eq!(maxmod(d.path(), &["eval", "--config", &c]).status.code(), Some(3));
}

#[test]
fn identical_configs_give_identical_bytes() {
    let d = tempfile::tempdir().unwrap();
    let body = "[model]\nkind = \"hardy\"\nalpha = 2.0\n[radius]\nmin = 2.0\nmax = 7.0\nsteps = 250\n";
    let a = config(d.path(), "a.toml", body);
    let b = config(d.path(), "b.toml", body);
    for (c, o) in [(&a, "oa"), (&b, "ob")] {
        assert_eq!(maxmod(d.path(), &["trace", "--config", c, "--out", o]).status.code(), Some(0));
        assert_eq!(maxmod(d.path(), &["discont", "--config", c, "--out", o]).status.code(), Some(0));
    }
    for f in ["branches.csv", "discontinuities.csv"] {
        let x = std::fs::read(d.path().join("oa").join(f)).unwrap();
        let y = std::fs::read(d.path().join("ob").join(f)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, y, "{f}");
    }
}

#[test]
fn tract_and_solve_write_outputs() {
    let d = tempfile::tempdir().unwrap();
    let c = config(d.path(), "t.toml", "[tract]\nlog_radii = [6.0, 7.0]\n[output]\nformat = \"both\"\n");
    assert_eq!(maxmod(d.path(), &["tract", "--config", &c, "--out", "o"]).status.code(), Some(0));
    assert!(std::fs::read_to_string(d.path().join("o/tract.svg")).unwrap().starts_with("<svg"));
    let out = maxmod(d.path(), &["solve", "--config", &c, "--out", "o"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let dump = std::fs::read_to_string(d.path().join("o/solution.txt")).unwrap();
    assert!(dump.starts_with("# x"));
    assert!(d.path().join("o/heatmap.svg").exists());
}
