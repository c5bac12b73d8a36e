//! End-to-end tests of the `cohamp` binary: exit codes, file schemas, the
//! qualitative structure of the emitted data, and byte-level determinism.

use std::collections::HashMap;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cohamp"))
}

fn run_ok(args: &[&str], out_dir: &Path) {
    let status = bin()
        .args(args)
        .arg("--output")
        .arg(out_dir)
        .status()
        .expect("spawn cohamp");
    assert!(status.success(), "cohamp {args:?} failed with {status:?}");
}

fn read_csv(path: &Path) -> (String, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{path:?}: {e}"));
    let mut lines = text.lines();
    let header = lines.next().expect("header row").to_string();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}

fn col(header: &str, name: &str) -> usize {
    header
        .split(',')
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name} in {header}"))
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");

    let ok = bin().args(["steady-state"]).arg("--output").arg(&out).status().unwrap();
    assert_eq!(ok.code(), Some(0));

    // invalid config: unparseable file
    let bad = tmp.path().join("bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    let code = bin()
        .args(["steady-state", "--config"])
        .arg(&bad)
        .arg("--output")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(code.code(), Some(1));

    // invalid config: non-positive atom state
    let code = bin()
        .args(["steady-state", "--atom-delta", "0.9", "--atom-re-c", "0.4"])
        .arg("--output")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(code.code(), Some(1));

    // regime violation escalated by --strict
    let code = bin()
        .args(["steady-state", "--phi", "0.5", "--strict"])
        .arg("--output")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(code.code(), Some(2));
    // same parameters without --strict still run
    let code = bin()
        .args(["steady-state", "--phi", "0.5"])
        .arg("--output")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(code.code(), Some(0));

    // numerical failure: infinite-temperature bath surfaces at solve time
    let code = bin()
        .args(["steady-state", "--beta2", "0"])
        .arg("--output")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(code.code(), Some(3));
}

#[test]
fn steady_state_record() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let output = bin()
        .args(["steady-state"])
        .arg("--output")
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    for key in ["pi00", "pi_v_abs", "residual", "beta_v"] {
        assert!(stdout.contains(key), "missing {key} in text block");
    }
    let record: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("steady_state.json")).unwrap())
            .unwrap();
    assert!(record["pi_v_abs"].as_f64().unwrap() > 0.01);
    assert!(record["residual"].as_f64().unwrap() <= 1e-10);
    assert!((record["beta_v"].as_f64().unwrap() + 1.2).abs() < 1e-9);
    let pops = ["pi00", "pi01", "pi10", "pi11"]
        .iter()
        .map(|k| record[*k].as_f64().unwrap())
        .sum::<f64>();
    assert!((pops - 1.0).abs() < 1e-10);
}

#[test]
fn sweep_structure() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    run_ok(&["sweep"], &out);
    let (header, rows) = read_csv(&out.join("sweep.csv"));
    assert_eq!(header, "beta2_over_beta1,Cdot_a,Cdot_max,Sdot_tot,Qdot1,Qdot2,Edot_a");
    assert_eq!(rows.len(), 39);

    let ca = col(&header, "Cdot_a");
    let cmax = col(&header, "Cdot_max");
    let stot = col(&header, "Sdot_tot");
    let q2 = col(&header, "Qdot2");
    let b = col(&header, "beta2_over_beta1");
    let mut sign_changes = 0;
    let mut prev: Option<f64> = None;
    for row in &rows {
        let ca_v: f64 = row[ca].parse().unwrap();
        let cmax_v: f64 = row[cmax].parse().unwrap();
        let stot_v: f64 = row[stot].parse().unwrap();
        assert!(ca_v <= cmax_v + 1e-12, "bound violated in emitted row");
        assert!(stot_v >= -1e-12);
        if let Some(p) = prev {
            if (p > 0.0) != (ca_v > 0.0) {
                sign_changes += 1;
            }
        }
        prev = Some(ca_v);
    }
    assert_eq!(sign_changes, 1, "south-state Cdot_a should change sign exactly once");
    // equal temperatures: the Carnot term vanishes
    let last = rows.last().unwrap();
    let ratio: f64 = last[b].parse().unwrap();
    assert!((ratio - 1.0).abs() < 1e-12);
    let q2_v: f64 = last[q2].parse().unwrap();
    let beta1 = 1.2;
    assert!((beta1 - ratio * beta1) * q2_v == 0.0);
}

#[test]
fn bloch_map_structure_and_refinement() {
    let tmp = tempfile::tempdir().unwrap();
    let coarse_dir = tmp.path().join("coarse");
    let fine_dir = tmp.path().join("fine");
    run_ok(&["bloch-map", "--grid-resolution", "21"], &coarse_dir);
    run_ok(&["bloch-map", "--grid-resolution", "41"], &fine_dir);

    let (header, rows) = read_csv(&fine_dir.join("bloch_map.csv"));
    let (xc, zc, cc) = (col(&header, "x"), col(&header, "z"), col(&header, "Cdot_a"));
    let mut south_positive = 0;
    for row in &rows {
        let x: f64 = row[xc].parse().unwrap();
        let z: f64 = row[zc].parse().unwrap();
        let c: f64 = row[cc].parse().unwrap();
        if x == 0.0 {
            assert!(c.abs() <= 1e-12, "on-axis state with Cdot_a = {c:.3e}");
        }
        if z < 0.0 && c > 0.0 {
            south_positive += 1;
        }
    }
    assert!(south_positive > 50, "southern amplification region missing");

    // refining the grid twice moves the zero contour by less than one
    // coarse cell
    let midpoints = |dir: &Path| -> Vec<(f64, f64)> {
        let (h, rows) = read_csv(&dir.join("bloch_map_contour.csv"));
        let (xa, za) = (col(&h, "x_a"), col(&h, "z_a"));
        let (xb, zb) = (col(&h, "x_b"), col(&h, "z_b"));
        rows.iter()
            .map(|r| {
                let x: f64 = r[xa].parse::<f64>().unwrap() + r[xb].parse::<f64>().unwrap();
                let z: f64 = r[za].parse::<f64>().unwrap() + r[zb].parse::<f64>().unwrap();
                (x / 2.0, z / 2.0)
            })
            .collect()
    };
    let coarse = midpoints(&coarse_dir);
    let fine = midpoints(&fine_dir);
    assert!(!coarse.is_empty() && !fine.is_empty());
    let coarse_cell = 2.0 / 20.0;
    for (x, z) in &coarse {
        let nearest = fine
            .iter()
            .map(|(fx, fz)| ((fx - x).powi(2) + (fz - z).powi(2)).sqrt())
            .fold(f64::INFINITY, f64::min);
        assert!(nearest < coarse_cell, "contour moved {nearest:.3} at ({x:.2}, {z:.2})");
    }
}

#[test]
fn trajectories_structure() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    run_ok(&["trajectories", "--stages", "300"], &out);
    let (header, rows) = read_csv(&out.join("trajectories.csv"));
    assert_eq!(header, "state_index,stage,x,z,kick");
    let mut by_state: HashMap<i64, Vec<&Vec<String>>> = HashMap::new();
    for row in &rows {
        by_state.entry(row[0].parse().unwrap()).or_default().push(row);
    }
    // the fixed point row is appended with index -1 and (near) zero kick
    let fp = &by_state[&-1];
    assert_eq!(fp.len(), 1);
    let fp_kick: f64 = fp[0][4].parse().unwrap();
    assert!(fp_kick < 1e-6);
    let fp_x: f64 = fp[0][2].parse().unwrap();
    assert!(fp_x.abs() < 1e-12);

    // default initial states 3 and 4 are incoherent: they stay on the axis
    for idx in [3i64, 4] {
        for row in &by_state[&idx] {
            let x: f64 = row[2].parse().unwrap();
            assert!(x.abs() <= 1e-12);
        }
    }
    // default initial state 0 is the coherent south state: |x| grows
    // somewhere along the trajectory
    let x0: f64 = by_state[&0][0][2].parse().unwrap();
    let max_x = by_state[&0]
        .iter()
        .map(|r| r[2].parse::<f64>().unwrap().abs())
        .fold(0.0, f64::max);
    assert!(max_x > x0.abs());
}

#[test]
fn appendix_bundle() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    run_ok(&["appendix"], &out);

    let (_, rows) = read_csv(&out.join("appendix_delta_c_root.csv"));
    let root: f64 = rows[0][0].parse().unwrap();
    assert!((0.4508..=0.4518).contains(&root));

    let (h, rows) = read_csv(&out.join("appendix_theta_ratios.csv"));
    let (ra, rb) = (col(&h, "ratio_a"), col(&h, "ratio_b"));
    let both = rows
        .iter()
        .filter(|r| r[ra].parse::<f64>().unwrap() > 1.0 && r[rb].parse::<f64>().unwrap() > 1.0)
        .count();
    assert!(both > 0, "no common amplification window in the ratio file");

    let (h, rows) = read_csv(&out.join("appendix_stage_diagram.csv"));
    let rea = col(&h, "rea");
    let v2: f64 = rows[1][rea].parse().unwrap();
    let v3: f64 = rows[2][rea].parse().unwrap();
    assert!((v2 - v3).abs() <= 1e-10, "REA not conserved across the evolution stage");

    let (h, rows) = read_csv(&out.join("appendix_delta_c.csv"));
    let (cc, dc) = (col(&h, "c"), col(&h, "delta_c"));
    for row in &rows {
        let c: f64 = row[cc].parse().unwrap();
        let d: f64 = row[dc].parse().unwrap();
        if c > 0.001 && c <= 0.45 {
            assert!(d > 0.0, "delta_c({c}) = {d}");
        }
        if c >= 0.46 {
            assert!(d < 0.0, "delta_c({c}) = {d}");
        }
    }
}

#[test]
fn config_file_and_flag_precedence() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let cfg = tmp.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"sweep": {"points": 5}}"#).unwrap();

    run_ok(&["sweep", "--config", cfg.to_str().unwrap()], &out);
    let (_, rows) = read_csv(&out.join("sweep.csv"));
    assert_eq!(rows.len(), 5);

    run_ok(&["sweep", "--config", cfg.to_str().unwrap(), "--sweep-points", "7"], &out);
    let (_, rows) = read_csv(&out.join("sweep.csv"));
    assert_eq!(rows.len(), 7);
}

#[test]
fn byte_identical_runs_across_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for (dir, threads) in [(&a, "1"), (&b, "4")] {
        let status = bin()
            .args(["sweep", "--output"])
            .arg(dir)
            .env("COHAMP_THREADS", threads)
            .status()
            .unwrap();
        assert!(status.success());
        let status = bin()
            .args(["appendix", "--output"])
            .arg(dir)
            .env("COHAMP_THREADS", threads)
            .status()
            .unwrap();
        assert!(status.success());
    }
    for name in [
        "sweep.csv",
        "appendix_delta_c.csv",
        "appendix_delta_c_root.csv",
        "appendix_stage_diagram.csv",
        "appendix_theta_ratios.csv",
    ] {
        let fa = std::fs::read(a.join(name)).unwrap();
        let fb = std::fs::read(b.join(name)).unwrap();
        assert_eq!(fa, fb, "{name} differs across thread counts");
    }
}

#[test]
fn validate_command_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let output = bin()
        .args(["validate", "--draws", "60", "--seed", "3"])
        .arg("--output")
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("validated 60 random configurations: 0 invariant failures"));
}
