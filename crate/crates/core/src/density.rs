//! One-level density of the family `F(q)` of non-principal characters:
//! from located zeros, from the explicit formula, and the symmetry-group
//! reference values.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{is_prime, sieve, ArithError};
use crate::lfunc::ZeroSet;
use crate::special::{exp_integral_e1, SpecialError};
use crate::testfn::{quadrature, quadrature_with_breaks, QuadratureError, TestFunction};

/// Absolute tolerance of every density quadrature.
pub const QUAD_TOL: f64 = 1e-11;

/// Multiple of `env(T)` added to the smooth tail integral to cover the
/// deviation of the true zero count from its smooth approximation.
const COUNT_SLACK: f64 = 4.0;

const PRIME_CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DensityError {
    #[error("modulus {0} must be a prime ≥ 5")]
    Modulus(u64),
    #[error("zero sets for q={q} do not cover the family: {detail}")]
    Coverage { q: u64, detail: String },
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Special(#[from] SpecialError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Empirical,
    Explicit,
    Ratios,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Empirical => "empirical",
            Method::Explicit => "explicit",
            Method::Ratios => "ratios",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "empirical" => Ok(Method::Empirical),
            "explicit" => Ok(Method::Explicit),
            "ratios" => Ok(Method::Ratios),
            _ => Err(format!("unknown method '{s}'")),
        }
    }
}

/// The normalized prime-power sum
/// `S = (1/((q−2)L)) Σ_{p,k} (log p / p^{k/2}) φ̂(k log p / L) Σ_{χ∈F(q)} χ(p^k)`
/// with `L = log(q/π)`, split by `Σ_χ χ(p^k) = −1 + (q−1)[p^k ≡ 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SDecomposition {
    pub q: u64,
    pub sigma: f64,
    pub s: f64,
    /// The `−1` branch.
    pub s1: f64,
    /// The `(q−1)[p^k ≡ 1]` branch.
    pub s2: f64,
    /// `Σ p^{−1/2}` over `p ≡ 1 (mod q)`, `p < X`.
    pub b1: f64,
    /// `Σ p^{−1}` over `p ≡ ±1 (mod q)`, `p² < X`.
    pub b2: f64,
    /// `Σ p^{−k/2}` over `k ≥ 3`, `p^k ≡ 1 (mod q)`, `p^k < X`.
    pub b3: f64,
}

impl SDecomposition {
    /// `((q−1)/(q−2)) σ max|φ̂| (B1 + B2 + B3)`, an upper bound for `S2`
    /// since `log p / L < σ/k` on the support.
    pub fn s2_envelope(&self, phi: &TestFunction) -> f64 {
        let q = self.q as f64;
        (q - 1.0) / (q - 2.0) * self.sigma * phi.phi_hat_max() * (self.b1 + self.b2 + self.b3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub q: u64,
    pub phi: TestFunction,
    pub method: Method,
    pub main_term: f64,
    /// Absent for the empirical method.
    pub gamma_term: Option<f64>,
    /// Absent for the empirical method; zero for the ratios prediction.
    pub prime_term: Option<f64>,
    pub total: f64,
    pub truncation_bound: f64,
    /// Zero sets whose count residual stayed above tolerance.
    pub count_warnings: usize,
}

fn check_modulus(q: u64) -> Result<(), DensityError> {
    if q < 5 || !is_prime(q) {
        return Err(DensityError::Modulus(q));
    }
    Ok(())
}

/// `log(q/π)`.
pub fn log_conductor(q: u64) -> f64 {
    (q as f64 / PI).ln()
}

/// Sum in a fixed tree shape, independent of how the inputs were produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Bound on `Σ_{|γ|>T} |φ(γL/2π)|` for one character, from the decay
/// envelope and the smooth zero density `(1/π) log(qt/2π)`.
pub fn truncation_bound(q: u64, t_max: f64, phi: &TestFunction) -> Result<f64, DensityError> {
    let l = log_conductor(q);
    let env = |t: f64| phi.envelope(t * l / (2.0 * PI));
    let density = |t: f64| ((q as f64 * t / (2.0 * PI)).ln() / PI).max(0.0);
    // t = 1/u maps (T, ∞) onto (0, 1/T).
    let tail = quadrature(
        |u| {
            let t = 1.0 / u;
            env(t) * density(t) * t * t
        },
        0.0,
        1.0 / t_max,
        QUAD_TOL,
    )?;
    Ok(tail + COUNT_SLACK * env(t_max))
}

/// `(1/(q−2)) Σ_χ Σ_γ φ(γ log(q/π)/2π)` over the supplied zeros.
pub fn empirical_density(
    q: u64,
    zeros: &[ZeroSet],
    phi: &TestFunction,
) -> Result<DensityReport, DensityError> {
    check_modulus(q)?;
    let coverage = |detail: String| DensityError::Coverage { q, detail };
    let mut seen = vec![false; q as usize - 1];
    let t_max = zeros.first().map(|z| z.t_max).ok_or_else(|| coverage("no zero sets".into()))?;
    for z in zeros {
        if z.q != q || z.j == 0 || z.j >= q - 1 {
            return Err(coverage(format!("foreign zero set (q={}, j={})", z.q, z.j)));
        }
        if z.t_max != t_max {
            return Err(coverage(format!("mixed heights {} and {}", t_max, z.t_max)));
        }
        if std::mem::replace(&mut seen[z.j as usize], true) {
            return Err(coverage(format!("duplicate character j={}", z.j)));
        }
    }
    if let Some(j) = (1..q as usize - 1).find(|&j| !seen[j]) {
        return Err(coverage(format!("missing character j={j}")));
    }
    let mut sets: Vec<&ZeroSet> = zeros.iter().collect();
    sets.sort_by_key(|z| z.j);
    let l = log_conductor(q);
    let per_char: Vec<f64> = sets
        .iter()
        .map(|z| {
            let w: Vec<f64> = z.ordinates.iter().map(|g| phi.phi(g * l / (2.0 * PI))).collect();
            pairwise_sum(&w)
        })
        .collect();
    let total = pairwise_sum(&per_char) / (q - 2) as f64;
    let bound = if phi.amplitude == 0.0 {
        0.0
    } else {
        truncation_bound(q, t_max, phi)?
    };
    Ok(DensityReport {
        q,
        phi: *phi,
        method: Method::Empirical,
        main_term: phi.phi_hat(0.0),
        gamma_term: None,
        prime_term: None,
        total,
        truncation_bound: bound,
        count_warnings: zeros.iter().filter(|z| z.count_warning).count(),
    })
}

/// `∫ φ(τ) Re ψ(b + iπτ/L) dτ`, evaluated on the Fourier side through
/// `ψ(z) = ∫_0^∞ (e^{−t}/t − e^{−zt}/(1 − e^{−t})) dt`, which turns the
/// `τ`-integral into a finite one against `φ̂(t/2L)`.
pub fn digamma_pairing(phi: &TestFunction, b: f64, l: f64) -> Result<f64, DensityError> {
    let hat0 = phi.phi_hat(0.0);
    let cut = 2.0 * l * phi.sigma;
    let integrand = |t: f64| {
        let geom = -(-t).exp_m1();
        hat0 * (-t).exp() / t - (-b * t).exp() * phi.phi_hat(t / (2.0 * l)) / geom
    };
    let breaks: Vec<f64> = phi.kinks().iter().map(|u| u * 2.0 * l).collect();
    let body = quadrature_with_breaks(integrand, 0.0, cut, &breaks, QUAD_TOL)?;
    Ok(body + hat0 * exp_integral_e1(cut)?)
}

/// `(1/((q−2) log(q/π))) Σ_{χ∈F(q)} ∫ φ(τ) ψ(1/4 + a(χ)/2 + πiτ/log(q/π)) dτ`.
/// `F(q)` has `(q−3)/2` even and `(q−1)/2` odd characters.
pub fn gamma_integral_term(q: u64, phi: &TestFunction) -> Result<f64, DensityError> {
    check_modulus(q)?;
    let l = log_conductor(q);
    let even = digamma_pairing(phi, 0.25, l)?;
    let odd = digamma_pairing(phi, 0.75, l)?;
    let qf = q as f64;
    Ok(((qf - 3.0) / 2.0 * even + (qf - 1.0) / 2.0 * odd) / ((qf - 2.0) * l))
}

#[derive(Default, Clone, Copy)]
struct PrimePartial {
    s1: f64,
    s2: f64,
    b1: f64,
    b2: f64,
    b3: f64,
}

fn prime_chunk(primes: &[u32], q: u64, phi: &TestFunction, l: f64, log_x: f64) -> PrimePartial {
    let mut acc = PrimePartial::default();
    let qm1 = (q - 1) as f64;
    for &p in primes {
        let p = p as u64;
        if p == q {
            continue;
        }
        let lp = (p as f64).ln();
        let mut residue = p % q;
        let mut k = 1u32;
        while k as f64 * lp < log_x {
            let kf = k as f64;
            let decay = (-0.5 * kf * lp).exp();
            let term = lp * decay * phi.phi_hat(kf * lp / l);
            acc.s1 -= term;
            if residue == 1 {
                acc.s2 += qm1 * term;
                match k {
                    1 => acc.b1 += decay,
                    2 => acc.b2 += decay,
                    _ => acc.b3 += decay,
                }
            }
            residue = residue * (p % q) % q;
            k += 1;
        }
    }
    acc
}

/// The prime-power sum `S` and its decomposition, by orthogonality over
/// the family (no character is evaluated). Only `p^k < X = (q/π)^σ`
/// contribute since `φ̂` vanishes outside `(−σ, σ)`.
pub fn prime_sum_term(q: u64, phi: &TestFunction) -> Result<SDecomposition, DensityError> {
    check_modulus(q)?;
    let l = log_conductor(q);
    let sigma = phi.sigma;
    let log_x = sigma * l;
    let mut out = SDecomposition {
        q,
        sigma,
        s: 0.0,
        s1: 0.0,
        s2: 0.0,
        b1: 0.0,
        b2: 0.0,
        b3: 0.0,
    };
    let x = log_x.exp();
    if x < 2.0 {
        return Ok(out);
    }
    let table = sieve(x.floor() as usize)?;
    let primes = table.primes();
    let parts: Vec<PrimePartial> = primes
        .par_chunks(PRIME_CHUNK)
        .map(|c| prime_chunk(c, q, phi, l, log_x))
        .collect();
    let norm = (q - 2) as f64 * l;
    let field = |f: fn(&PrimePartial) -> f64| pairwise_sum(&parts.iter().map(f).collect::<Vec<_>>());
    out.s1 = field(|p| p.s1) / norm;
    out.s2 = field(|p| p.s2) / norm;
    out.s = out.s1 + out.s2;
    out.b1 = field(|p| p.b1);
    out.b2 = field(|p| p.b2);
    out.b3 = field(|p| p.b3);
    Ok(out)
}

/// `φ̂(0) + gamma term − 2S`, together with the decomposition of `S`.
pub fn explicit_formula_parts(
    q: u64,
    phi: &TestFunction,
) -> Result<(DensityReport, SDecomposition), DensityError> {
    let gamma_term = gamma_integral_term(q, phi)?;
    let s = prime_sum_term(q, phi)?;
    let main_term = phi.phi_hat(0.0);
    let prime_term = 2.0 * s.s;
    let report = DensityReport {
        q,
        phi: *phi,
        method: Method::Explicit,
        main_term,
        gamma_term: Some(gamma_term),
        prime_term: Some(prime_term),
        total: main_term + gamma_term - prime_term,
        truncation_bound: 0.0,
        count_warnings: 0,
    };
    Ok((report, s))
}

pub fn explicit_formula_density(q: u64, phi: &TestFunction) -> Result<DensityReport, DensityError> {
    explicit_formula_parts(q, phi).map(|(r, _)| r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Group {
    U,
    Sp,
    O,
    SOeven,
    SOodd,
}

impl std::str::FromStr for Group {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "U" => Ok(Group::U),
            "Sp" => Ok(Group::Sp),
            "O" => Ok(Group::O),
            "SOeven" => Ok(Group::SOeven),
            "SOodd" => Ok(Group::SOodd),
            _ => Err(format!("unknown group '{s}'")),
        }
    }
}

/// `∫ φ̂(u) Ŵ(u) du` with `Ŵ` the limiting density transform of the group:
/// `δ₀` (U), `δ₀ ± η/2` (SO(even) / Sp), `δ₀ + 1/2` (O), `δ₀ − η/2 + 1`
/// (SO(odd)), where `η` is the indicator of `(−1, 1)`.
pub fn katz_sarnak_main_term(group: Group, phi: &TestFunction) -> Result<f64, DensityError> {
    let hat0 = phi.phi_hat(0.0);
    let inner = || phi.integrate_hat(-1.0, 1.0, 1e-14);
    Ok(match group {
        Group::U => hat0,
        Group::SOeven => hat0 + 0.5 * inner()?,
        Group::Sp => hat0 - 0.5 * inner()?,
        Group::O => hat0 + 0.5 * phi.phi(0.0),
        Group::SOodd => hat0 - 0.5 * inner()? + phi.phi(0.0),
    })
}
