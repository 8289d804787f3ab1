//! Single `(q, σ)` comparison of the empirical, explicit and ratios densities.

use std::path::PathBuf;

use log::warn;
use ratioslab_core::characters::CharacterFamily;
use ratioslab_core::density::{
    empirical_density, explicit_formula_parts, prime_sum_term, DensityReport, Method,
};
use ratioslab_core::lfunc::{find_family_zeros, ZeroSet, MAX_HEIGHT};
use ratioslab_core::ratios::ratios_density_prediction;
use ratioslab_core::testfn::TestFunction;
use serde::{Deserialize, Serialize};

use crate::cache::cache_zeros;
use crate::config::{check_family_modulus, default_t_max, MethodSet};
use crate::error::HarnessError;
use crate::report::ComparisonRow;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityConfig {
    pub q: u64,
    pub sigma: f64,
    pub phi: String,
    pub methods: MethodSet,
    /// Zero height for the empirical method; `None` uses [`default_t_max`].
    pub t_max: Option<f64>,
    pub cache_dir: Option<PathBuf>,
}

impl DensityConfig {
    pub fn new(q: u64, sigma: f64, phi: &str, methods: MethodSet) -> Self {
        DensityConfig {
            q,
            sigma,
            phi: phi.to_string(),
            methods,
            t_max: None,
            cache_dir: None,
        }
    }
}

/// All reports computed for one configuration, plus the row built from them.
#[derive(Debug, Clone)]
pub struct DensityOutcome {
    pub row: ComparisonRow,
    pub reports: Vec<DensityReport>,
}

/// Zero sets for `q` up to `t_max`, through the cache when one is given.
pub fn zeros_for(q: u64, t_max: f64, cache_dir: Option<&std::path::Path>) -> Result<Vec<ZeroSet>, HarnessError> {
    match cache_dir {
        Some(dir) => Ok(cache_zeros(q, t_max, dir)?.sets),
        None => {
            check_family_modulus(q)?;
            Ok(find_family_zeros(&CharacterFamily::new(q)?, t_max)?)
        }
    }
}

pub fn run_density(config: &DensityConfig) -> Result<DensityOutcome, HarnessError> {
    let q = config.q;
    check_family_modulus(q)?;
    let phi = TestFunction::from_name(&config.phi, config.sigma)?;
    let with = |m: Method, e: HarnessError| e.context(q, m.as_str());
    let mut reports = Vec::new();

    let (explicit, decomposition) = if config.methods.contains(Method::Explicit) {
        let (r, s) = explicit_formula_parts(q, &phi).map_err(|e| with(Method::Explicit, e.into()))?;
        reports.push(r);
        (Some(r), s)
    } else {
        (None, prime_sum_term(q, &phi).map_err(|e| with(Method::Explicit, e.into()))?)
    };

    let ratios = if config.methods.contains(Method::Ratios) {
        let r = ratios_density_prediction(q, &phi).map_err(|e| with(Method::Ratios, e.into()))?;
        reports.push(r);
        Some(r)
    } else {
        None
    };

    let mut t_used = None;
    let empirical = if config.methods.contains(Method::Empirical) {
        let t_max = config.t_max.unwrap_or_else(|| default_t_max(q, &phi));
        if !(t_max > 0.0 && t_max <= MAX_HEIGHT) {
            return Err(HarnessError::Argument(format!("tmax {t_max} outside (0, {MAX_HEIGHT}]")));
        }
        let run = || -> Result<DensityReport, HarnessError> {
            let zeros = zeros_for(q, t_max, config.cache_dir.as_deref())?;
            Ok(empirical_density(q, &zeros, &phi)?)
        };
        let r = run().map_err(|e| with(Method::Empirical, e))?;
        if r.count_warnings > 0 {
            warn!("q={q}: {} zero sets have count residual above tolerance", r.count_warnings);
        }
        reports.push(r);
        t_used = Some(t_max);
        Some(r)
    } else {
        None
    };

    let total = |r: Option<DensityReport>| r.map(|r| r.total);
    let (emp, exp, rat) = (total(empirical), total(explicit), total(ratios));
    let diff = |a: Option<f64>, b: Option<f64>| a.zip(b).map(|(a, b)| a - b);
    let row = ComparisonRow {
        q,
        sigma: config.sigma,
        phi: phi.name().to_string(),
        methods: config.methods.clone(),
        empirical: emp,
        explicit: exp,
        ratios: rat,
        d_emp_exp: diff(emp, exp),
        d_exp_ratios: diff(exp, rat),
        truncation_bound: empirical.map(|r| r.truncation_bound),
        t_max: t_used,
        decomposition: Some(decomposition),
        status: "ok".into(),
    };
    Ok(DensityOutcome { row, reports })
}

pub fn run_density_command(config: &DensityConfig) -> Result<ComparisonRow, HarnessError> {
    run_density(config).map(|o| o.row)
}

/// Row recording a failed configuration; such rows are excluded from fits.
pub fn failed_row(config: &DensityConfig, err: &HarnessError) -> ComparisonRow {
    ComparisonRow {
        q: config.q,
        sigma: config.sigma,
        phi: config.phi.clone(),
        methods: config.methods.clone(),
        empirical: None,
        explicit: None,
        ratios: None,
        d_emp_exp: None,
        d_exp_ratios: None,
        truncation_bound: None,
        t_max: None,
        decomposition: None,
        status: format!("error: {err}"),
    }
}
