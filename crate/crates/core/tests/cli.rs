use std::process::{Command, Output};

use mapbound::output::Table;

fn mapbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mapbound")).args(args).output().expect("binary runs")
}

fn ok_table(args: &[&str]) -> Table {
    let out = mapbound(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# schema=1\n"));
    Table::parse(&text).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn map1_bounds_row() {
    let t = ok_table(&["bounds", "--preset", "map1", "--w", "1", "--dx", "1", "--sigma", "3", "--js", "12"]);
    assert_eq!(t.columns, ["family", "axis", "value_m2", "sqrt_value_m", "diagnostics"]);
    assert_eq!(t.rows.len(), 3);
    let r = &t.rows[0];
    assert_eq!((r[0].as_str(), r[1].as_str()), ("bcrb", "x"));
    let v: f64 = r[2].parse().unwrap();
    let s: f64 = r[3].parse().unwrap();
    assert!((v - 0.08257).abs() < 5e-6, "{v}");
    assert!((s - 0.2873).abs() < 5e-5, "{s}");
    assert!(t.rows[2][4].starts_with("h_opt_m="));
}

#[test]
fn map_file_gives_six_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("floor.json");
    let out = mapbound(&["presets", "floor", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let t = ok_table(&["bounds", "--map", path.to_str().unwrap(), "--sigma-x", "3", "--sigma-y", "3"]);
    assert_eq!(t.rows.len(), 6);
    let axes: Vec<&str> = t.column("axis").unwrap();
    assert_eq!(axes, ["x", "y", "x", "y", "x", "y"]);
}

#[test]
fn missing_map_file() {
    let out = mapbound(&["bounds", "--map", "/no/such/map.json", "--sigma", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("map file not found"));
}

#[test]
fn validation_errors_exit_2() {
    let cases: &[&[&str]] = &[
        &["simulate", "--preset", "map1", "--runs", "0"],
        &["bounds", "--preset", "map1", "--sigma", "-1"],
        &["bounds", "--preset", "map1", "--w", "0"],
        &["bounds", "--preset", "map1", "--family", "crb"],
        &["sweep", "--preset", "map1", "--param", "bogus", "--values", "1,2"],
        &["presets", "map2", "--w1", "-5"],
        &["simulate", "--preset", "map1", "--estimator", "foo", "--runs", "5"],
    ];
    for args in cases {
        let out = mapbound(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
        assert!(!stderr(&out).is_empty());
    }
}

#[test]
fn sigma_error_names_the_field() {
    let out = mapbound(&["bounds", "--preset", "map1", "--sigma", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("sigma"), "{}", stderr(&out));
}

#[test]
fn simulate_is_byte_reproducible() {
    let args = ["simulate", "--preset", "map1", "--estimator", "mmse,map,ml", "--runs", "2000", "--seed", "7"];
    let a = mapbound(&args);
    let b = mapbound(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let t = Table::parse(&String::from_utf8(a.stdout).unwrap()).unwrap();
    assert_eq!(t.rows.len(), 3);
    let ml = t.column_f64("rmse_m").unwrap()[2];
    assert!((ml - 3.0).abs() < 0.15, "{ml}");
}

#[test]
fn thread_count_does_not_change_results() {
    let args = ["simulate", "--preset", "map2", "--estimator", "mmse,map", "--runs", "3000", "--seed", "3"];
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_mapbound")).env("MAPBOUND_THREADS", threads).args(args).output().unwrap()
    };
    let one = run("1");
    let four = run("4");
    assert_eq!(one.status.code(), Some(0), "{}", stderr(&one));
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(run("zero").status.code(), Some(2));
}

#[test]
fn presets_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("m2.json");
    let out =
        mapbound(&["presets", "map2", "--w1", "5", "--w2", "5", "--h1", "5", "--h2", "5", "-o", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let m = mapbound::mapfile::load_map(&p).unwrap();
    let mapbound::montecarlo::Support::Plane(m) = m else { panic!("expected a 2-D map") };
    assert_eq!(m.rects().len(), 2);
    assert_eq!(m.area(), 75.0);

    let out = mapbound(&["presets", "map1", "--w", "1", "--dx", "1"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["segments"], serde_json::json!([[0.0, 1.0], [2.0, 3.0]]));

    let out = mapbound(&["presets", "floor", "--bounding-box"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rects = v["rects"].as_array().unwrap();
    assert_eq!(rects.len(), 1);
    let bb = mapbound::mapfile::floor_plan().bounding_box();
    assert_eq!(rects[0]["w"].as_f64().unwrap(), bb.width());
    assert_eq!(rects[0]["h"].as_f64().unwrap(), bb.height());
}

#[test]
fn sweep_columns_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.csv");
    let out = mapbound(&[
        "sweep",
        "--preset",
        "map1",
        "--param",
        "dx",
        "--values",
        "1:1:3,8",
        "--runs",
        "200",
        "-o",
        p.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(&p).unwrap();
    let t = Table::parse(&text).unwrap();
    assert_eq!(t.column_f64("dx_m").unwrap(), [1.0, 2.0, 3.0, 8.0]);
    for c in ["sigma_m", "bcrb_m2", "sqrt_wwb_m", "rmse_mmse_m", "se_ml_m"] {
        assert!(t.columns.iter().any(|x| x == c), "{c} missing");
    }
    // Re-emitting the parsed table reproduces the file exactly.
    assert_eq!(t.to_csv_string(), text);
}

#[test]
fn sweep_figure_seven_columns() {
    let t = ok_table(&["sweep", "--figure", "7", "--runs", "50"]);
    assert_eq!(t.rows.len(), 15);
    let h1 = t.column_f64("h1_m").unwrap();
    let w2 = t.column_f64("w2_m").unwrap();
    for (h, w) in h1.iter().zip(&w2) {
        assert!((h - 50.0 / (5.0 + w)).abs() < 1e-12);
    }
    assert!(t.columns.iter().any(|c| c == "sqrt_bcrb_x_m"));
    assert!(t.columns.iter().any(|c| c == "rmse_ml_m"));
}
