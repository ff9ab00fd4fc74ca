use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn sfdyn(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sfdyn"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| if v.is_empty() { f64::NAN } else { v.parse().unwrap() }).collect())
        .collect();
    (header, rows)
}

#[test]
fn free_particle_moves_on_a_straight_line() {
    let dir = TempDir::new().unwrap();
    let o = sfdyn(&["simulate", "--preset", "free"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = csv_rows(&dir.path().join("traj_000.csv"));
    assert_eq!(&header[..7], ["t", "x", "y", "z", "p1", "p2", "p3"]);
    assert_eq!(rows.len(), 51);
    // uniform time grid: second differences of the position vanish
    for w in rows.windows(3) {
        for c in 1..4 {
            assert!((w[0][c] - 2.0 * w[1][c] + w[2][c]).abs() < 1e-12);
        }
    }
    let summary = json(&dir.path().join("summary.json"));
    let run = &summary["runs"][0];
    assert!(run["drift"]["max_drift"].as_f64().unwrap() < 1e-13);
    assert_eq!(summary["all_within_tolerance"], true);
}

#[test]
fn fig1_preset_gives_five_orbits_that_enter_and_leave() {
    let dir = TempDir::new().unwrap();
    let o = sfdyn(&["simulate", "--preset", "fig1"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary = json(&dir.path().join("summary.json"));
    let runs = summary["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 5);
    for (i, run) in runs.iter().enumerate() {
        assert_eq!(run["terminated_by"], "stop");
        assert!(run["closed_form"]["max_position_gap"].as_f64().unwrap() < 1e-8);
        let (_, rows) = csv_rows(&dir.path().join(format!("traj_{i:03}.csv")));
        let zmax = rows.iter().map(|r| r[3]).fold(f64::MIN, f64::max);
        assert!(zmax > 0.01, "orbit {i} never entered the field");
        let p3_end = rows.last().unwrap()[6];
        assert!(p3_end > 0.0, "orbit {i} was not turned around");
    }
}

#[test]
fn fig2_preset_follows_the_erf_relation() {
    let dir = TempDir::new().unwrap();
    let o = sfdyn(&["simulate", "--preset", "fig2"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary = json(&dir.path().join("summary.json"));
    let runs = summary["runs"].as_array().unwrap();
    let kappas: Vec<f64> = runs.iter().map(|r| r["fig2"]["kappa"].as_f64().unwrap()).collect();
    assert_eq!(kappas, [0.3, 0.5, 0.7, 0.9]);
    for r in runs {
        let f = &r["fig2"];
        assert!(f["max_relation_residual"].as_f64().unwrap() < 1e-8);
        let (end, asym) = (f["final_xplus"].as_f64().unwrap(), f["asymptote"].as_f64().unwrap());
        assert!(((end - asym) / asym).abs() < 1e-5, "{end} vs {asym}");
    }

    let curves = TempDir::new().unwrap();
    assert_eq!(code(&sfdyn(&["orbit", "--preset", "fig2"], curves.path())), 0);
    let (header, rows) = csv_rows(&curves.path().join("fig2_curve_003.csv"));
    assert_eq!(header, ["X-", "X+"]);
    assert_eq!(rows[0], [0.0, 1.0]);
    assert!(rows.windows(2).all(|w| w[1][1] > w[0][1]));
}

#[test]
fn certification_labels() {
    let dir = TempDir::new().unwrap();
    let label = |args: &[&str]| {
        let o = sfdyn(args, dir.path());
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        json(&dir.path().join("certificate.json"))["label"].as_str().unwrap().to_string()
    };
    assert_eq!(label(&["certify", "--preset", "spacelike"]), "maximally superintegrable");
    let conformal = label(&["certify", "--preset", "conformal"]);
    assert!(
        conformal == "minimally superintegrable" || conformal == "maximally superintegrable",
        "{conformal}"
    );
    assert_eq!(
        label(&["certify", "--preset", "spacelike", "--set", "quantities.list=p1,p2"]),
        "not certified"
    );
}

#[test]
fn kg_presets_pass_and_off_shell_control_fails() {
    for preset in ["planewave", "conformal", "dilation"] {
        let dir = TempDir::new().unwrap();
        let o = sfdyn(&["kg", "--preset", preset], dir.path());
        assert_eq!(code(&o), 0, "{preset}: {}", String::from_utf8_lossy(&o.stderr));
        let s = json(&dir.path().join("kg_summary.json"));
        assert_eq!(s["points"], 50);
        assert_eq!(s["tables"].as_array().unwrap().len(), 4);
        let (header, rows) = csv_rows(&dir.path().join("kg_residual.csv"));
        assert_eq!(header, ["point", "t", "x", "y", "z", "h", "residual", "ratio"]);
        assert_eq!(rows.len(), 100);
    }
    let dir = TempDir::new().unwrap();
    let o = sfdyn(&["kg", "--preset", "free", "--set", "kg.solution=off-shell"], dir.path());
    assert_eq!(code(&o), 1);
    let s = json(&dir.path().join("kg_summary.json"));
    assert_eq!(s["pass"], false);
    // the residual plateaus instead of shrinking by four
    let t = &s["tables"][0];
    assert!(t["max_residual"].as_f64().unwrap() > 0.5);
    assert!(t["ratio_max"].as_f64().unwrap() < 1.5);
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn same_config_and_seed_give_identical_files() {
    for args in [
        &["simulate", "--preset", "fig1"][..],
        &["kg", "--preset", "conformal", "--seed", "7"][..],
        &["certify", "--preset", "spacelike", "--seed", "7"][..],
    ] {
        let a = TempDir::new().unwrap();
        let b = TempDir::new().unwrap();
        assert_eq!(code(&sfdyn(args, a.path())), 0);
        assert_eq!(code(&sfdyn(args, b.path())), 0);
        assert_eq!(dir_bytes(a.path()), dir_bytes(b.path()), "{args:?}");
    }
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    sfdyn(&["kg", "--preset", "planewave", "--seed", "1"], a.path());
    sfdyn(&["kg", "--preset", "planewave", "--seed", "2"], b.path());
    assert_ne!(dir_bytes(a.path()), dir_bytes(b.path()));
}

#[test]
fn exit_codes_for_bad_input_singularities_and_drift() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    assert_eq!(code(&sfdyn(&["simulate", "--preset", "nope"], d)), 2);
    assert_eq!(code(&sfdyn(&["simulate", "--preset", "free", "--set", "dynamics.tend=3"], d)), 2);
    assert_eq!(code(&sfdyn(&["simulate", "--preset", "free", "--set", "dynamics.form=sideways"], d)), 2);
    // front form with p_- = 0
    assert_eq!(code(&sfdyn(&["simulate", "--preset", "conformal", "--set", "initial.p=0,0.1,0.1"], d)), 2);
    // quantities of another background
    assert_eq!(code(&sfdyn(&["simulate", "--preset", "free", "--set", "quantities.list=spacelike"], d)), 2);
    // pushed into m^2 < 0
    let o = sfdyn(&["simulate", "--preset", "spacelike", "--set", "dynamics.t_end=20"], d);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&sfdyn(&["simulate", "--preset", "free", "--set", "tolerance.drift=1e-20"], d)), 1);
}

#[test]
fn config_file_then_overrides_then_flags() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.ini");
    fs::write(
        &cfg,
        "[background]\nfamily = constant\nm0sq = 4\n\n[dynamics]\nt_end = 2\nsamples = 5\n\n\
         [initial]\nq = 1, 0, 0\np = 0, 0, 0\n\n[quantities]\nlist = H, p1\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = Command::new(env!("CARGO_BIN_EXE_sfdyn"))
        .args(["simulate", "--config"])
        .arg(&cfg)
        .args(["--set", "dynamics.samples=3", "--format", "json", "--tol-abs", "1e-9", "--out-dir"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let t = json(&out.join("traj_000.json"));
    let samples = t["samples"].as_array().unwrap();
    assert_eq!(samples.len(), 3);
    // at rest with m = 2
    assert_eq!(samples[2]["Q"]["H"].as_f64().unwrap(), 2.0);
    assert_eq!(samples[2]["q"][0].as_f64().unwrap(), 1.0);
}

#[test]
fn orbit_samples_closed_forms() {
    let dir = TempDir::new().unwrap();
    let o = sfdyn(&["orbit", "--preset", "fig1"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = json(&dir.path().join("orbit_summary.json"));
    let orbits = s["orbits"].as_array().unwrap();
    assert_eq!(orbits.len(), 5);
    for (i, orb) in orbits.iter().enumerate() {
        let (_, rows) = csv_rows(&dir.path().join(format!("orbit_{i:03}.csv")));
        // from entry to exit: z returns to zero
        assert!(rows[0][3].abs() < 1e-12);
        assert!(rows.last().unwrap()[3].abs() < 1e-12);
        assert!(orb["drift"]["max_drift"].as_f64().unwrap() < 1e-12);
    }
    for preset in ["conformal", "planewave", "spacelike", "free"] {
        let d = TempDir::new().unwrap();
        let o = sfdyn(&["orbit", "--preset", preset], d.path());
        assert_eq!(code(&o), 0, "{preset}: {}", String::from_utf8_lossy(&o.stderr));
        let s = json(&d.path().join("orbit_summary.json"));
        assert!(s["orbits"][0]["drift"]["max_drift"].as_f64().unwrap() < 1e-10, "{preset}");
    }
    let d = TempDir::new().unwrap();
    assert_eq!(code(&sfdyn(&["orbit", "--preset", "dilation"], d.path())), 2);
}
