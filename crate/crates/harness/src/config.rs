//! Experiment configuration and argument parsing helpers.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use ratioslab_core::arith::{is_prime, next_prime};
use ratioslab_core::density::Method;
use ratioslab_core::lfunc::MAX_HEIGHT;
use ratioslab_core::testfn::TestFunction;
use ratioslab_core::Complex;
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;

/// Target for `|φ|` beyond the last located zero in the default height policy.
pub const DEFAULT_DECAY_TARGET: f64 = 1e-6;

/// `2π A(ε)/log(q/π)` with `ε = 1e−6`, capped at the largest supported height.
pub fn default_t_max(q: u64, phi: &TestFunction) -> f64 {
    let l = (q as f64 / PI).ln();
    (2.0 * PI * phi.decay_radius(DEFAULT_DECAY_TARGET) / l).min(MAX_HEIGHT)
}

pub fn check_family_modulus(q: u64) -> Result<(), HarnessError> {
    if q < 5 || !is_prime(q) {
        return Err(HarnessError::Argument(format!("q={q} is not a prime ≥ 5")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "jsonl" => Ok(Format::Jsonl),
            _ => Err(format!("unknown format '{s}' (expected csv or jsonl)")),
        }
    }
}

/// Nonempty set of density methods, written `empirical+explicit+ratios`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct MethodSet(BTreeSet<Method>);

impl MethodSet {
    pub fn all() -> Self {
        MethodSet([Method::Empirical, Method::Explicit, Method::Ratios].into())
    }

    pub fn new(methods: impl IntoIterator<Item = Method>) -> Result<Self, String> {
        let set: BTreeSet<Method> = methods.into_iter().collect();
        if set.is_empty() {
            return Err("at least one method is required".into());
        }
        Ok(MethodSet(set))
    }

    pub fn contains(&self, m: Method) -> bool {
        self.0.contains(&m)
    }
}

impl fmt::Display for MethodSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.0.iter().map(|m| m.as_str()).collect();
        f.write_str(&names.join("+"))
    }
}

impl FromStr for MethodSet {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let methods = s
            .split(['+', ','])
            .filter(|t| !t.is_empty())
            .map(|t| if t == "all" { Ok(None) } else { t.parse::<Method>().map(Some) })
            .collect::<Result<Vec<_>, _>>()?;
        if methods.iter().any(Option::is_none) {
            return Ok(MethodSet::all());
        }
        MethodSet::new(methods.into_iter().flatten())
    }
}

impl TryFrom<String> for MethodSet {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<MethodSet> for String {
    fn from(m: MethodSet) -> String {
        m.to_string()
    }
}

/// Parses `RE`, `RE+IMi`, `RE-IMi` or `IMi`.
pub fn parse_complex(s: &str) -> Result<Complex, String> {
    let t = s.trim().replace(' ', "");
    let bad = || format!("cannot parse complex number '{s}'");
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| Complex::new(re, 0.0)).map_err(|_| bad());
    };
    // Split at the last sign that is not part of an exponent or leading.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    };
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = im.parse().map_err(|_| bad())?;
    Ok(Complex::new(re, im))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QSelection {
    List(Vec<u64>),
    /// Primes evenly spaced in `log q`: the next prime after each point of
    /// a geometric grid, duplicates removed.
    Geometric { q_min: u64, q_max: u64, count: usize },
}

impl QSelection {
    pub fn resolve(&self) -> Result<Vec<u64>, HarnessError> {
        let mut qs = match self {
            QSelection::List(v) => v.clone(),
            QSelection::Geometric { q_min, q_max, count } => {
                if *count < 2 || q_min >= q_max || *q_min < 5 {
                    return Err(HarnessError::Argument(format!(
                        "geometric selection needs 5 ≤ qmin < qmax and count ≥ 2, got {q_min}, {q_max}, {count}"
                    )));
                }
                let ratio = (*q_max as f64 / *q_min as f64).ln();
                (0..*count)
                    .map(|i| {
                        let x = *q_min as f64 * (ratio * i as f64 / (*count - 1) as f64).exp();
                        next_prime(x.round() as u64)
                    })
                    .collect()
            }
        };
        for &q in &qs {
            check_family_modulus(q)?;
        }
        qs.sort_unstable();
        qs.dedup();
        Ok(qs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub q: QSelection,
    pub sigmas: Vec<f64>,
    pub phi: String,
    pub methods: MethodSet,
    /// Zero height for the empirical method; `None` uses [`default_t_max`].
    pub t_max: Option<f64>,
    pub out: PathBuf,
    pub format: Format,
    /// Worker threads; 0 means all available cores.
    pub jobs: usize,
    pub cache_dir: Option<PathBuf>,
    /// Recorded for provenance; the computations themselves are deterministic.
    pub seed: u64,
    pub emit_gnuplot: bool,
}

impl SweepConfig {
    pub fn new(q: QSelection, sigmas: Vec<f64>, phi: &str, out: impl Into<PathBuf>) -> Self {
        SweepConfig {
            q,
            sigmas,
            phi: phi.to_string(),
            methods: MethodSet::new([Method::Explicit, Method::Ratios]).expect("nonempty"),
            t_max: None,
            out: out.into(),
            format: Format::Csv,
            jobs: 0,
            cache_dir: None,
            seed: 0,
            emit_gnuplot: false,
        }
    }

    pub fn validate(&self) -> Result<Vec<u64>, HarnessError> {
        if self.sigmas.is_empty() {
            return Err(HarnessError::Argument("at least one sigma is required".into()));
        }
        for &s in &self.sigmas {
            TestFunction::from_name(&self.phi, s)?;
        }
        if let Some(t) = self.t_max {
            if !(t > 0.0 && t <= MAX_HEIGHT) {
                return Err(HarnessError::Argument(format!("tmax {t} outside (0, {MAX_HEIGHT}]")));
            }
        }
        self.q.resolve()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("0.1").unwrap(), Complex::new(0.1, 0.0));
        assert_eq!(parse_complex("0.1+2i").unwrap(), Complex::new(0.1, 2.0));
        assert_eq!(parse_complex("0.1-2.5i").unwrap(), Complex::new(0.1, -2.5));
        assert_eq!(parse_complex("-3i").unwrap(), Complex::new(0.0, -3.0));
        assert_eq!(parse_complex("1e-3+1e-2i").unwrap(), Complex::new(1e-3, 1e-2));
        assert_eq!(parse_complex("2-i").unwrap(), Complex::new(2.0, -1.0));
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn method_sets() {
        let m: MethodSet = "ratios,explicit".parse().unwrap();
        assert_eq!(m.to_string(), "explicit+ratios");
        assert_eq!("all".parse::<MethodSet>().unwrap(), MethodSet::all());
        assert!("".parse::<MethodSet>().is_err());
        assert!("exact".parse::<MethodSet>().is_err());
    }

    #[test]
    fn geometric_selection() {
        let qs = QSelection::Geometric { q_min: 1000, q_max: 100_000, count: 30 }.resolve().unwrap();
        assert_eq!(qs.len(), 30);
        assert!(qs.iter().all(|&q| is_prime(q)));
        assert_eq!(qs[0], 1009);
        assert!(QSelection::List(vec![11, 12]).resolve().is_err());
        assert!(QSelection::Geometric { q_min: 100, q_max: 50, count: 3 }.resolve().is_err());
    }

    #[test]
    fn height_policy() {
        let fejer = TestFunction::from_name("fejer", 1.0).unwrap();
        assert_eq!(default_t_max(101, &fejer), 100.0);
        let s4 = TestFunction::from_name("spline4", 1.0).unwrap();
        assert!(default_t_max(101, &s4) < 100.0);
    }
}
