// Copyright 2026 sqbath Contributors
// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sqbath_cli::{parse_config, parse_csv, run};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sqbath"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn exec(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn shipped_configs_parse() {
    for entry in std::fs::read_dir(configs()).unwrap() {
        let p = entry.unwrap().path();
        let text = std::fs::read_to_string(&p).unwrap();
        parse_config(&text, &[]).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
    let fan = parse_config(&std::fs::read_to_string(configs().join("fan_scan.json")).unwrap(), &[]).unwrap();
    assert_eq!(fan.gammas(), vec![0.1, 0.5, 0.9]);
    assert_eq!(fan.m1_grid.unwrap().count, 201);
}

#[test]
fn purity_scan_reaches_bound() {
    let cfg = configs().join("purity_curves.json");
    let o = exec(&["purity-scan", "--config", cfg.to_str().unwrap(), "R.count=21"]);
    assert!(o.status.success());
    let tables = parse_csv(&stdout(&o));
    let t = &tables[0].1;
    let (g, r, p) = (t.column("gamma").unwrap(), t.column("R").unwrap(), t.column("purity").unwrap());
    assert_eq!(t.rows.len(), 63);
    assert_eq!(r.iter().cloned().fold(f64::MIN, f64::max), 0.866);
    for k in 1..g.len() {
        if g[k] == g[k - 1] {
            assert!(p[k] > p[k - 1]);
        }
    }
}

#[test]
fn single_mode_ray_finds_ep() {
    let cfg = configs().join("single_mode_ep.json");
    let o = exec(&["ep-scan", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    let tables = parse_csv(&stdout(&o));
    let (name, c) = &tables[1];
    assert_eq!(name, "contours");
    assert_eq!(c.columns, vec!["gamma", "M1", "M2", "gap", "cond_V"]);
    assert!((c.column("M1").unwrap()[0] - 0.5).abs() < 1e-6);
}

#[test]
fn antisymmetric_ray_with_splitting_predicate() {
    let o = exec(&[
        "ep-scan",
        "modes=2",
        "J=0.2",
        "gamma=0.5",
        r#"ray={"lo": 2.0, "hi": 3.5, "count": 4, "angle": -0.7853981633974483, "predicate": "real-part-splitting"}"#,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let c = &parse_csv(&stdout(&o))[1].1;
    assert!((c.column("M1").unwrap()[0] - 2.0).abs() < 1e-6);
    assert!((c.column("M2").unwrap()[0] + 2.0).abs() < 1e-6);
}

#[test]
fn undriven_zero_state_stays_zero() {
    let o = exec(&["evolve", "modes=2", "J=0.2", "M=0.1", "initial_state=zero", "diffusion_scale=0", r#"t={"min": 0, "max": 5, "count": 6}"#]);
    assert!(o.status.success());
    let t = &parse_csv(&stdout(&o))[0].1;
    assert_eq!(t.rows.len(), 6);
    for name in t.columns.iter().filter(|c| c.starts_with('s') && c.as_bytes()[1].is_ascii_digit()) {
        assert!(t.column(name).unwrap().iter().all(|&x| x == 0.0), "{name}");
    }
}

#[test]
fn csv_file_round_trips_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("two.csv");
    let cfg = configs().join("two_mode.json");
    let o = exec(&["two-mode", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let parsed = parse_csv(&text);
    let direct = run(&parse_config(&std::fs::read_to_string(&cfg).unwrap(), &[]).unwrap()).unwrap();
    assert_eq!(parsed[0].1.columns, direct.table.columns);
    for (row, want) in parsed[0].1.rows.iter().zip(&direct.table.rows) {
        for (cell, w) in row.iter().zip(want) {
            match w {
                sqbath_cli::output::Cell::Num(x) => assert_eq!(cell.parse::<f64>().unwrap().to_bits(), x.to_bits()),
                sqbath_cli::output::Cell::Int(i) => assert_eq!(cell, &i.to_string()),
                sqbath_cli::output::Cell::Text(s) => assert_eq!(cell, s),
            }
        }
    }
    assert!(text.ends_with('\n') && !text.contains('\r'));
}

#[test]
fn json_output_shape() {
    let cfg = configs().join("single_mode.json");
    let o = exec(&["single-mode", "--config", cfg.to_str().unwrap(), "--format", "json"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["metadata"]["tool"], "sqbath");
    assert_eq!(v["metadata"]["config"]["diffusion_convention"], "consistency-corrected");
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
    let cols = v["columns"].as_array().unwrap();
    let k = cols.iter().position(|c| c == "occupation_solver").unwrap();
    assert!((v["rows"][0][k].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn convention_flag_changes_solution() {
    let cfg = configs().join("single_mode.json");
    let a = stdout(&exec(&["single-mode", "--config", cfg.to_str().unwrap(), "--convention", "paper"]));
    assert!(a.contains("\"diffusion_convention\":\"paper-literal\""));
    let occ = parse_csv(&a)[0].1.column("occupation_solver").unwrap()[0];
    assert!((occ - 0.5).abs() > 0.5);
}

#[test]
fn config_error_record() {
    let o = exec(&["single-mode", "gamma=-1"]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_str(String::from_utf8_lossy(&o.stderr).trim()).unwrap();
    assert_eq!(v["error"]["kind"], "config");
    assert_eq!(v["error"]["detail"]["constraint"], "gamma > 0");
    let o = exec(&["single-mode", "bogus=1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
}

#[test]
fn flagged_rows_still_written() {
    let o = exec(&["purity-scan", "N=0.5", r#"R={"min": 0.8, "max": 0.9, "count": 3}"#]);
    assert_eq!(o.status.code(), Some(1));
    let t = &parse_csv(&stdout(&o))[0].1;
    assert_eq!(t.rows.len(), 3);
    assert_eq!(t.rows[0].last().unwrap(), "ok");
    assert_eq!(t.rows[2].last().unwrap(), "unphysical");
    assert!(String::from_utf8_lossy(&o.stderr).contains("flagged-rows"));
}

#[test]
fn unstable_single_mode_is_flagged() {
    // |M| > ω/γ makes the drift unstable; no steady state exists
    let o = exec(&["single-mode", "gamma=2", "N=2", "M=0.8"]);
    assert_eq!(o.status.code(), Some(1));
    let t = &parse_csv(&stdout(&o))[0].1;
    assert_eq!(t.rows[0].last().unwrap(), "unstable");
}

#[test]
fn echoed_config_reproduces_data() {
    let cfg = configs().join("entropy_shift.json");
    let first = run(&parse_config(&std::fs::read_to_string(&cfg).unwrap(), &[]).unwrap()).unwrap();
    let echo = first.metadata["config"].to_string();
    let second = run(&parse_config(&echo, &[]).unwrap()).unwrap();
    assert_eq!(first.data_csv(), second.data_csv());
    assert_eq!(first.table.rows.len(), 50 * 5);
}
