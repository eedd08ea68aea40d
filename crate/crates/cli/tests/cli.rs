use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn aia(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aia")).args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let idx = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().to_string()).collect()
}

const OPEN: &str = "model = open\ntemperatures = 0.1, 0.5\ntf_min = 1\ntf_max = 100\ntf_points = 6\n";

#[test]
fn parallel_and_serial_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "open.conf", OPEN);
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for (out, threads) in [(&a, "1"), (&b, "6")] {
        let o = aia(&["open", "--config", s(&cfg), "--out", s(out), "--threads", threads]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    assert!(!text.contains('\r'));
    assert!(text.starts_with("t_f,T,d_adi,d_adi1,d_aia1,"));
    // 6 times × 2 temperatures, ascending in t_f
    let t: Vec<f64> = column(&text, "t_f").iter().map(|v| v.parse().unwrap()).collect();
    assert_eq!(t.len(), 12);
    assert!(t.windows(2).all(|w| w[0] <= w[1]));
    // first-order column exists only for the closed sweep
    assert!(column(&text, "d_adi1").iter().all(String::is_empty));
}

#[test]
fn out_defaults_to_stdout() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "lz.conf", "tf_min = 1\ntf_max = 10\ntf_points = 3\nscenarios = 1\n");
    let o = aia(&["lz", "--config", s(&cfg)]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert_eq!(column(&text, "t_f"), ["1", "3.1622776601683795", "10"]);
    // unselected scenarios stay empty
    assert!(column(&text, "d_aia2").iter().all(String::is_empty));
    assert!(column(&text, "d_aia1").iter().all(|v| !v.is_empty()));
}

#[test]
fn config_errors_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.conf", "x = 0.1\n# fine\nwidth = 3\n");
    let o = aia(&["lz", "--config", s(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    let empty = write(&dir, "empty.conf", "scenarios =\n");
    let o = aia(&["lz", "--config", s(&empty)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("scenario list is empty"));

    let o = aia(&["tfi", "--config", s(&dir.path().join("missing.conf"))]);
    assert_eq!(o.status.code(), Some(1));

    let o = aia(&["lz"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn all_rows_failing_exits_with_two() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "f.conf", "rel_tol = 1e-300\nabs_tol = 1e-300\ntf_min = 1\ntf_max = 2\n");
    let o = aia(&["lz", "--config", s(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(column(&text, "err").iter().all(|e| e.contains("underflow")));
}

#[test]
fn fit_recovers_synthetic_power_law() {
    let dir = TempDir::new().unwrap();
    let mut text = String::from("t_f,d_adi\n");
    for i in 0..20 {
        let t = 10f64.powf(1.0 + i as f64 / 10.0);
        text.push_str(&format!("{t},{}\n", 3.0 * t.powi(-2)));
    }
    let csv = write(&dir, "syn.csv", &text);
    let o = aia(&["fit", "--csv", s(&csv), "--column", "d_adi", "--tmin", "1", "--tmax", "1e9"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = String::from_utf8(o.stdout).unwrap();
    let line = out.lines().find(|l| l.starts_with("fit d_adi ")).unwrap();
    let field = |k: &str| -> f64 {
        line.split_whitespace().find_map(|w| w.strip_prefix(k)).unwrap().parse().unwrap()
    };
    assert!((field("A=") - 3.0).abs() < 1e-10);
    assert!((field("p=") + 2.0).abs() < 1e-12);
    assert!(field("rms=") < 1e-12);

    let o = aia(&["fit", "--csv", s(&csv), "--column", "d_adi", "--tmin", "10", "--tmax", "15"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("need at least 3"));
}

#[test]
fn dtau_scan_collapses_to_adiabatic_at_zero() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "scan.conf", "model = lz\ndtau_points = 201\ntf_min = 40\ntf_max = 400\ntf_points = 2\n");
    let o = aia(&["dtau-scan", "--config", s(&cfg), "--tf", "40"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let scan = String::from_utf8(o.stdout).unwrap();
    let dtau = column(&scan, "dtau");
    let d = column(&scan, "d");
    assert_eq!(dtau.len(), 201);
    assert_eq!(dtau[100], "0");
    assert_eq!((dtau[0].as_str(), dtau[200].as_str()), ("-40", "40"));

    let o = aia(&["lz", "--config", s(&cfg)]);
    let sweep = String::from_utf8(o.stdout).unwrap();
    let adi: f64 = column(&sweep, "d_adi")[0].parse().unwrap();
    let at_zero: f64 = d[100].parse().unwrap();
    assert!((adi - at_zero).abs() < 1e-13, "{adi} vs {at_zero}");

    // the optimizer cannot be beaten by the grid
    let best = d.iter().map(|v| v.parse::<f64>().unwrap()).fold(f64::INFINITY, f64::min);
    let opt: f64 = column(&sweep, "d_aia_opt")[0].parse().unwrap();
    assert!(opt <= best + 1e-12, "optimizer {opt} vs grid {best}");
}

#[test]
fn dtau_scan_needs_a_model_key() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "scan.conf", "x = 0.1\n");
    let o = aia(&["dtau-scan", "--config", s(&cfg), "--tf", "10"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("model"));
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let model = aia_cli::SweepConfig::declared_model(&text).unwrap().expect("configs name their model");
        aia_cli::SweepConfig::parse(&text, model).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        n += 1;
    }
    assert_eq!(n, 9);
}
