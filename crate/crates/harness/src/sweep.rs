//! Parallel `(q, σ)` sweeps with a crash-safe journal and decay fits.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, OpenOptions};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::mpsc;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cache::write_atomic;
use crate::config::{Format, SweepConfig};
use crate::error::HarnessError;
use crate::experiment::{failed_row, run_density, DensityConfig};
use crate::fit::{fit_decay_exponent, FitResult};
use crate::report::{rows_to_csv, rows_to_jsonl, ComparisonRow, RowKey, ROW_COLUMNS};

/// Quantities fitted against `q` for each σ.
pub const FIT_QUANTITIES: [&str; 2] = ["S", "d_exp_ratios"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub sigma: f64,
    pub quantity: String,
    pub fit: Option<FitResult>,
    pub error: Option<String>,
    /// Sign counts of the fitted quantity; fits use absolute values.
    pub positive: usize,
    pub negative: usize,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub rows: Vec<ComparisonRow>,
    pub fits: Vec<FitRecord>,
    /// Rows computed in this call, as opposed to recovered from the journal.
    pub computed: usize,
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn journal_path(out: &Path) -> PathBuf {
    sibling(out, ".journal")
}

pub fn fits_path(out: &Path) -> PathBuf {
    sibling(out, ".fits.json")
}

pub fn gnuplot_path(out: &Path) -> PathBuf {
    out.with_extension("gp")
}

fn read_journal(path: &Path) -> Result<Vec<ComparisonRow>, HarnessError> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(HarnessError::io(path, e)),
    };
    let mut rows = Vec::new();
    for (n, line) in text.lines().enumerate() {
        match serde_json::from_str::<ComparisonRow>(line) {
            Ok(r) => rows.push(r),
            Err(_) if line.trim().is_empty() => {}
            Err(_) => warn!("{}:{}: skipping unreadable journal line", path.display(), n + 1),
        }
    }
    Ok(rows)
}

fn fit_quantity(rows: &[ComparisonRow], sigma: f64, quantity: &str) -> FitRecord {
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.is_ok() && r.sigma.to_bits() == sigma.to_bits())
        .filter_map(|r| {
            let y = match quantity {
                "S" => r.decomposition.map(|d| d.s),
                _ => r.d_exp_ratios,
            }?;
            Some((r.q as f64, y))
        })
        .collect();
    let positive = points.iter().filter(|p| p.1 > 0.0).count();
    let negative = points.iter().filter(|p| p.1 < 0.0).count();
    let (fit, error) = match fit_decay_exponent(&points) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    FitRecord {
        sigma,
        quantity: quantity.to_string(),
        fit,
        error,
        positive,
        negative,
    }
}

/// Fits of `|S|` and `|explicit − ratios|` against `q`, per σ, over rows
/// whose status is `ok`.
pub fn fit_rows(rows: &[ComparisonRow], sigmas: &[f64]) -> Vec<FitRecord> {
    let mut out = Vec::new();
    for &sigma in sigmas {
        for quantity in FIT_QUANTITIES {
            out.push(fit_quantity(rows, sigma, quantity));
        }
    }
    out
}

fn gnuplot_script(data: &Path, sigmas: &[f64]) -> String {
    let col = |name: &str| ROW_COLUMNS.iter().position(|c| *c == name).expect("column") + 1;
    let (s_col, d_col) = (col("S"), col("d_exp_ratios"));
    let file = data.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
    let mut out = String::from(
        "set datafile separator ','\nset logscale xy\nset key top right\nset xlabel 'q'\nset ylabel 'absolute value'\n",
    );
    let mut plots = Vec::new();
    for s in sigmas {
        plots.push(format!(
            "'{file}' every ::1 using 1:($2=={s} ? abs(${s_col}) : 1/0) with points title '|S|, sigma={s}'"
        ));
        plots.push(format!(
            "'{file}' every ::1 using 1:($2=={s} ? abs(${d_col}) : 1/0) with points title '|explicit-ratios|, sigma={s}'"
        ));
    }
    out.push_str("plot ");
    out.push_str(&plots.join(", \\\n     "));
    out.push('\n');
    out
}

/// Runs every `(q, σ)` of the configuration. Completed rows are appended to
/// a journal next to the output as they arrive, so an interrupted sweep
/// resumes where it stopped; the sorted output replaces the journal at the end.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutcome, HarnessError> {
    let qs = config.validate()?;
    let mut tasks = Vec::new();
    let mut wanted = BTreeSet::new();
    for &q in &qs {
        for &sigma in &config.sigmas {
            let mut dc = DensityConfig::new(q, sigma, &config.phi, config.methods.clone());
            dc.t_max = config.t_max;
            dc.cache_dir = config.cache_dir.clone();
            tasks.push(dc);
        }
    }

    if let Some(parent) = config.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| HarnessError::io(parent, e))?;
    }
    let journal = journal_path(&config.out);
    let mut done: BTreeMap<RowKey, ComparisonRow> = BTreeMap::new();
    for row in read_journal(&journal)? {
        done.entry(row.key()).or_insert(row);
    }
    let phi_name = ratioslab_core::testfn::TestFunction::from_name(&config.phi, 1.0)?.name();
    let key_of = |t: &DensityConfig| RowKey {
        q: t.q,
        sigma_bits: t.sigma.to_bits(),
        phi: phi_name.to_string(),
        methods: t.methods.clone(),
    };
    for t in &tasks {
        wanted.insert(key_of(t));
    }
    done.retain(|k, _| wanted.contains(k));
    let pending: Vec<DensityConfig> = tasks.into_iter().filter(|t| !done.contains_key(&key_of(t))).collect();
    info!("sweep: {} rows to compute, {} recovered from journal", pending.len(), done.len());

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| HarnessError::Argument(format!("cannot build worker pool: {e}")))?;
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&journal)
        .map_err(|e| HarnessError::io(&journal, e))?;
    let (tx, rx) = mpsc::channel::<ComparisonRow>();
    let computed = pending.len();
    let written = std::thread::scope(|scope| -> Result<Vec<ComparisonRow>, HarnessError> {
        scope.spawn(move || {
            pool.install(|| {
                pending.par_iter().for_each_with(tx, |tx, task| {
                    let row = run_density(task).map(|o| o.row).unwrap_or_else(|e| {
                        warn!("q={} sigma={}: {e}", task.q, task.sigma);
                        failed_row(task, &e)
                    });
                    let _ = tx.send(row);
                });
            });
        });
        let mut rows = Vec::new();
        for row in rx {
            let line = serde_json::to_string(&row).expect("rows serialize");
            writeln!(file, "{line}")
                .and_then(|_| file.sync_data())
                .map_err(|e| HarnessError::io(&journal, e))?;
            rows.push(row);
        }
        Ok(rows)
    })?;
    for row in written {
        done.insert(row.key(), row);
    }

    let mut rows: Vec<ComparisonRow> = done.into_values().collect();
    rows.sort_by(|a, b| a.q.cmp(&b.q).then(a.sigma.total_cmp(&b.sigma)));
    let text = match config.format {
        Format::Csv => rows_to_csv(&rows),
        Format::Jsonl => rows_to_jsonl(&rows),
    };
    write_atomic(&config.out, &text)?;
    let fits = fit_rows(&rows, &config.sigmas);
    let fits_text = serde_json::to_string_pretty(&fits).expect("fits serialize") + "\n";
    write_atomic(&fits_path(&config.out), &fits_text)?;
    if config.emit_gnuplot && config.format == Format::Csv {
        write_atomic(&gnuplot_path(&config.out), &gnuplot_script(&config.out, &config.sigmas))?;
    }
    fs::remove_file(&journal).map_err(|e| HarnessError::io(&journal, e))?;
    Ok(SweepOutcome { rows, fits, computed })
}
