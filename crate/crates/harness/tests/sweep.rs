use std::fs;

use ratioslab::config::{Format, MethodSet, QSelection, SweepConfig};
use ratioslab::report::{rows_from_csv, ComparisonRow};
use ratioslab::sweep::{fit_rows, fits_path, gnuplot_path, journal_path, run_sweep};

fn config(out: &std::path::Path) -> SweepConfig {
    SweepConfig::new(QSelection::List(vec![101, 53, 211, 307, 401, 503]), vec![1.0, 1.5], "fejer", out)
}

#[test]
fn rows_are_sorted_and_complete() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rows.csv");
    let mut cfg = config(&out);
    cfg.emit_gnuplot = true;
    let res = run_sweep(&cfg).unwrap();
    assert_eq!(res.rows.len(), 12);
    assert_eq!(res.computed, 12);
    let keys: Vec<(u64, f64)> = res.rows.iter().map(|r| (r.q, r.sigma)).collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    assert_eq!(keys, sorted);
    assert_eq!(rows_from_csv(&fs::read_to_string(&out).unwrap()).unwrap(), res.rows);
    assert_eq!(res.fits.len(), 4);
    assert!(res.fits.iter().all(|f| f.fit.is_some()));
    assert!(fits_path(&out).exists() && gnuplot_path(&out).exists());
    assert!(!journal_path(&out).exists());
}

#[test]
fn repeated_sweeps_are_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (name, jobs, format) in [("a.csv", 1, Format::Csv), ("b.csv", 3, Format::Csv), ("c.jsonl", 2, Format::Jsonl), ("d.jsonl", 1, Format::Jsonl)] {
        let out = dir.path().join(name);
        let mut cfg = config(&out);
        cfg.jobs = jobs;
        cfg.format = format;
        run_sweep(&cfg).unwrap();
        outputs.push((fs::read(&out).unwrap(), fs::read(fits_path(&out)).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[2], outputs[3]);
}

#[test]
fn interrupted_sweep_resumes_to_the_same_rows() {
    let dir = tempfile::tempdir().unwrap();
    let reference = dir.path().join("ref.csv");
    let full = run_sweep(&config(&reference)).unwrap();

    // Leave a journal as a killed run would: a few complete rows, one
    // row for a configuration no longer requested and a torn final line.
    let out = dir.path().join("resumed.csv");
    let mut journal = String::new();
    for row in full.rows.iter().step_by(3) {
        journal.push_str(&serde_json::to_string(row).unwrap());
        journal.push('\n');
    }
    let mut stray = full.rows[0].clone();
    stray.q = 7;
    journal.push_str(&serde_json::to_string(&stray).unwrap());
    journal.push('\n');
    let torn = serde_json::to_string(&full.rows[1]).unwrap();
    journal.push_str(&torn[..torn.len() / 2]);
    fs::write(journal_path(&out), journal).unwrap();

    let resumed = run_sweep(&config(&out)).unwrap();
    assert_eq!(resumed.computed, 8);
    assert_eq!(resumed.rows, full.rows);
    assert_eq!(fs::read(&out).unwrap(), fs::read(&reference).unwrap());
}

#[test]
fn failed_rows_are_excluded_from_fits() {
    let dir = tempfile::tempdir().unwrap();
    let res = run_sweep(&config(&dir.path().join("r.csv"))).unwrap();
    let mut rows: Vec<ComparisonRow> = res.rows.clone();
    let before = fit_rows(&rows, &[1.0]);
    let mut broken = rows[0].clone();
    broken.q = 997;
    broken.decomposition.as_mut().unwrap().s = 1e6;
    broken.d_exp_ratios = Some(1e6);
    broken.status = "error: injected".into();
    rows.push(broken);
    assert_eq!(fit_rows(&rows, &[1.0]), before);
}

#[test]
fn invalid_configurations_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let mut cfg = config(&out);
    cfg.q = QSelection::List(vec![11, 21]);
    assert_eq!(run_sweep(&cfg).unwrap_err().exit_code(), 2);
    let mut cfg = config(&out);
    cfg.sigmas = vec![0.0];
    assert_eq!(run_sweep(&cfg).unwrap_err().exit_code(), 2);
    let mut cfg = config(&out);
    cfg.methods = "empirical".parse::<MethodSet>().unwrap();
    cfg.t_max = Some(1000.0);
    assert_eq!(run_sweep(&cfg).unwrap_err().exit_code(), 2);
    assert!(!out.exists());
}
