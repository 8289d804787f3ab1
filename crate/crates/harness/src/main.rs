use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ratioslab::cache::{cache_zeros, write_atomic};
use ratioslab::config::{default_t_max, parse_complex, Format, MethodSet, QSelection, SweepConfig};
use ratioslab::experiment::{run_density, zeros_for, DensityConfig};
use ratioslab::fit::fit_decay_exponent;
use ratioslab::report::{reports_to_csv, rows_from_csv, rows_to_csv, rows_to_jsonl};
use ratioslab::selftest::run_selftest;
use ratioslab::sweep::run_sweep;
use ratioslab::HarnessError;
use ratioslab_core::density::Method;
use ratioslab_core::ratios::{
    brute_force_R, ratios_prediction_R, ratios_prediction_dR, RatiosParams, Variant,
};
use ratioslab_core::testfn::TestFunction;
use ratioslab_core::Complex;
use serde_json::json;

#[derive(Parser)]
#[command(name = "ratioslab", version, about = "One-level density experiments for Dirichlet L-functions of prime modulus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CacheArgs {
    /// Zero cache directory.
    #[arg(long = "cache", env = "RATIOSLAB_CACHE")]
    cache: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Locate (or load cached) zeros of every L(s, χ) modulo q.
    Zeros {
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 30.0)]
        tmax: f64,
        #[command(flatten)]
        cache: CacheArgs,
        /// Write the zero sets as JSON lines to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare density methods for one modulus and test function.
    Density {
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value = "fejer")]
        phi: String,
        /// Methods joined by '+' or ',' (empirical, explicit, ratios, all).
        #[arg(long, default_value = "all")]
        method: MethodSet,
        /// Zero height; defaults to the decay-envelope policy.
        #[arg(long)]
        tmax: Option<f64>,
        #[command(flatten)]
        cache: CacheArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Also print the per-method term breakdown.
        #[arg(long)]
        terms: bool,
    },
    /// Ratios prediction for the first moment of L'/L-type ratios.
    Ratios {
        #[arg(long)]
        q: u64,
        /// Shift in the numerator, as RE[+IMi].
        #[arg(long, default_value = "0.1", value_parser = parse_complex, allow_hyphen_values = true)]
        alpha: Complex,
        /// Shift in the denominator, as RE[+IMi].
        #[arg(long, default_value = "0.3", value_parser = parse_complex, allow_hyphen_values = true)]
        gamma: Complex,
        #[arg(long, default_value = "standard")]
        variant: Variant,
        /// Also evaluate the family average directly.
        #[arg(long)]
        compare: bool,
        /// Report the derivative at alpha = gamma = r instead.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        derivative: Option<Complex>,
    },
    /// Sweep over moduli and support parameters, with decay fits.
    Sweep {
        /// Explicit moduli (comma separated).
        #[arg(long, value_delimiter = ',', conflicts_with_all = ["qmin", "qmax", "count"])]
        q: Vec<u64>,
        #[arg(long, requires_all = ["qmax", "count"])]
        qmin: Option<u64>,
        #[arg(long)]
        qmax: Option<u64>,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        sigma: Vec<f64>,
        #[arg(long, default_value = "fejer")]
        phi: String,
        #[arg(long, default_value = "explicit+ratios")]
        method: MethodSet,
        #[arg(long)]
        tmax: Option<f64>,
        #[command(flatten)]
        cache: CacheArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: Format,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write a gnuplot script next to the CSV output.
        #[arg(long)]
        emit_gnuplot: bool,
    },
    /// Fit log|y| against log q from a sweep CSV or a two-column q,y file.
    Fit {
        input: PathBuf,
        /// Sweep column to fit.
        #[arg(long, default_value = "S")]
        column: String,
        /// Restrict sweep rows to this sigma.
        #[arg(long)]
        sigma: Option<f64>,
    },
    /// Run quick internal consistency checks.
    Selftest,
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), HarnessError> {
    match out {
        Some(p) => write_atomic(p, text),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| HarnessError::io("<stdout>", e)),
    }
}

fn json_line(v: &serde_json::Value) -> String {
    format!("{v}\n")
}

fn fit_points(input: &Path, column: &str, sigma: Option<f64>) -> Result<Vec<(f64, f64)>, HarnessError> {
    let text = fs::read_to_string(input).map_err(|e| HarnessError::io(input, e))?;
    let parse_err = |message: String| HarnessError::Parse {
        path: input.to_path_buf(),
        message,
    };
    if let Ok(rows) = rows_from_csv(&text) {
        let pick = |r: &ratioslab::report::ComparisonRow| -> Result<Option<f64>, HarnessError> {
            let d = r.decomposition;
            Ok(match column {
                "S" => d.map(|d| d.s),
                "S1" => d.map(|d| d.s1),
                "S2" => d.map(|d| d.s2),
                "d_emp_exp" => r.d_emp_exp,
                "d_exp_ratios" => r.d_exp_ratios,
                "empirical" => r.empirical,
                "explicit" => r.explicit,
                "ratios" => r.ratios,
                other => return Err(HarnessError::Argument(format!("cannot fit column '{other}'"))),
            })
        };
        let mut pts = Vec::new();
        for r in rows.iter().filter(|r| r.is_ok() && sigma.is_none_or(|s| s == r.sigma)) {
            if let Some(y) = pick(r)? {
                pts.push((r.q as f64, y));
            }
        }
        return Ok(pts);
    }
    let mut pts = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        match (f.first().map(|s| s.parse::<f64>()), f.get(1).map(|s| s.parse::<f64>())) {
            (Some(Ok(q)), Some(Ok(y))) if f.len() == 2 => pts.push((q, y)),
            _ if n == 0 => {}
            _ => return Err(parse_err(format!("line {}: expected 'q,y'", n + 1))),
        }
    }
    Ok(pts)
}

fn run(cli: Cli) -> Result<bool, HarnessError> {
    match cli.command {
        Command::Zeros { q, tmax, cache, out } => {
            let (sets, computed) = match &cache.cache {
                Some(dir) => {
                    let o = cache_zeros(q, tmax, dir)?;
                    let n = o.computed.len();
                    (o.sets, n)
                }
                None => {
                    let sets = zeros_for(q, tmax, None)?;
                    let n = sets.len();
                    (sets, n)
                }
            };
            let mut text = String::new();
            for s in &sets {
                text.push_str(&serde_json::to_string(s).expect("zero sets serialize"));
                text.push('\n');
            }
            match out {
                Some(p) => write_atomic(&p, &text)?,
                None => {
                    println!("j,n_zeros,count_residual,count_warning,first_ordinate");
                    for s in &sets {
                        let first = s.ordinates.iter().copied().find(|g| *g > 0.0);
                        println!(
                            "{},{},{:.4},{},{}",
                            s.j,
                            s.ordinates.len(),
                            s.count_residual,
                            s.count_warning,
                            first.map(|g| g.to_string()).unwrap_or_default()
                        );
                    }
                }
            }
            eprintln!("{} zero sets for q={q} up to height {tmax}; {computed} computed", sets.len());
            Ok(true)
        }
        Command::Density {
            q,
            sigma,
            phi,
            method,
            tmax,
            cache,
            output,
            terms,
        } => {
            let mut config = DensityConfig::new(q, sigma, &phi, method);
            config.t_max = tmax;
            config.cache_dir = cache.cache;
            if config.methods.contains(Method::Empirical) && tmax.is_none() {
                let f = TestFunction::from_name(&phi, sigma)?;
                log::info!("default height {}", default_t_max(q, &f));
            }
            let outcome = run_density(&config)?;
            let rows = [outcome.row];
            let text = match output.format {
                Format::Csv => rows_to_csv(&rows),
                Format::Jsonl => rows_to_jsonl(&rows),
            };
            emit(output.out.as_deref(), &text)?;
            if terms {
                eprint!("{}", reports_to_csv(&outcome.reports));
            }
            Ok(true)
        }
        Command::Ratios {
            q,
            alpha,
            gamma,
            variant,
            compare,
            derivative,
        } => {
            if let Some(r) = derivative {
                let d = ratios_prediction_dR(q, r, variant)?;
                println!("{}", serde_json::to_string_pretty(&d).expect("serialize"));
                return Ok(true);
            }
            let params = RatiosParams::new(alpha, gamma, variant)?;
            let pred = ratios_prediction_R(q, &params)?;
            let mut v = json!({ "q": q, "alpha": alpha, "gamma": gamma, "prediction": pred });
            if compare {
                let brute = brute_force_R(q, alpha, gamma)?;
                let gap = (brute - pred.value).norm();
                v["brute_force"] = json!(brute);
                v["gap"] = json!(gap);
                v["normalized_gap"] = json!(gap / (q - 2) as f64);
            }
            print!("{}", json_line(&v));
            Ok(true)
        }
        Command::Sweep {
            q,
            qmin,
            qmax,
            count,
            sigma,
            phi,
            method,
            tmax,
            cache,
            out,
            format,
            jobs,
            seed,
            emit_gnuplot,
        } => {
            let selection = match (qmin, qmax, count) {
                (Some(q_min), Some(q_max), Some(count)) => QSelection::Geometric { q_min, q_max, count },
                _ if !q.is_empty() => QSelection::List(q),
                _ => return Err(HarnessError::Argument("give --q or --qmin/--qmax/--count".into())),
            };
            let mut config = SweepConfig::new(selection, sigma, &phi, out);
            config.methods = method;
            config.t_max = tmax;
            config.cache_dir = cache.cache;
            config.format = format;
            config.jobs = jobs;
            config.seed = seed;
            config.emit_gnuplot = emit_gnuplot;
            let outcome = run_sweep(&config)?;
            let failed = outcome.rows.iter().filter(|r| !r.is_ok()).count();
            for f in &outcome.fits {
                match &f.fit {
                    Some(fit) => println!(
                        "sigma={} |{}|: slope {:.4} ± {:.4} over {} points ({} positive, {} negative)",
                        f.sigma, f.quantity, fit.slope, fit.stderr, fit.n_points, f.positive, f.negative
                    ),
                    None => println!(
                        "sigma={} |{}|: no fit ({})",
                        f.sigma,
                        f.quantity,
                        f.error.as_deref().unwrap_or("")
                    ),
                }
            }
            eprintln!(
                "{} rows ({} computed, {failed} failed) written to {}",
                outcome.rows.len(),
                outcome.computed,
                config.out.display()
            );
            Ok(failed == 0)
        }
        Command::Fit { input, column, sigma } => {
            let pts = fit_points(&input, &column, sigma)?;
            let fit = fit_decay_exponent(&pts)?;
            println!("{}", serde_json::to_string_pretty(&fit).expect("serialize"));
            Ok(true)
        }
        Command::Selftest => {
            let checks = run_selftest();
            for c in &checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            Ok(checks.iter().all(|c| c.passed))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
