//! Predicted and true averages of `L(1/2+α,χ)/L(1/2+γ,χ)` over `F(q)`,
//! and the density prediction they imply.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::is_prime;
use crate::characters::{CharacterError, CharacterFamily};
use crate::density::{gamma_integral_term, DensityError, DensityReport, Method};
use crate::lfunc::{FamilyEvaluator, LfuncError};
use crate::special::{
    e_of_real, g_pm, g_pm_derivative, riemann_zeta, riemann_zeta_derivative, Complex, SpecialError,
};
use crate::testfn::TestFunction;

/// `|L|` below this counts as sitting on a zero.
pub const SINGULAR_THRESHOLD: f64 = 1e-10;
/// Largest modulus accepted by [`brute_force_R`] by default.
pub const BRUTE_FORCE_BUDGET: u64 = 2003;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RatiosError {
    #[error("modulus {0} must be an odd prime")]
    Modulus(u64),
    #[error("invalid shifts: {0}")]
    Params(String),
    #[error("{what} vanishes to within {SINGULAR_THRESHOLD:e} (q={q}, j={j}) at s={at}")]
    NearSingular {
        what: &'static str,
        q: u64,
        j: u64,
        at: Complex,
    },
    #[error("modulus {q} exceeds the brute-force budget {budget}")]
    Budget { q: u64, budget: u64 },
    #[error(transparent)]
    Character(#[from] CharacterError),
    #[error(transparent)]
    Lfunc(#[from] LfuncError),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Density(#[from] DensityError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Standard,
    /// Keeps the sign-weighted terms whose family average is only small.
    Weak,
}

impl std::str::FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "standard" => Ok(Variant::Standard),
            "weak" => Ok(Variant::Weak),
            _ => Err(format!("unknown variant '{s}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatiosParams {
    pub alpha: Complex,
    pub gamma_shift: Complex,
    pub variant: Variant,
}

impl RatiosParams {
    pub fn new(alpha: Complex, gamma_shift: Complex, variant: Variant) -> Result<Self, RatiosError> {
        if !(gamma_shift.re > 0.0) {
            return Err(RatiosError::Params(format!("Re γ must be positive, got {gamma_shift}")));
        }
        if !(alpha.re < 0.5) {
            return Err(RatiosError::Params(format!("Re α must be below 1/2, got {alpha}")));
        }
        Ok(Self {
            alpha,
            gamma_shift,
            variant,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RPieces {
    /// `(q−1) Σ_{h≡1 (q)} μ(h) h^{−1/2−γ}`.
    pub h_sum_term: Complex,
    /// `(q−1)[G₊(α)e(−1/q) + G₋(α)e(1/q)]/(2q^{1/2+α})`; zero for the
    /// standard variant.
    pub bracket_term: Complex,
    /// `−ζ(1/2+α)/ζ(1/2+γ)`.
    pub zeta_ratio_term: Complex,
    /// `−G₊(α)ζ(1/2−α)/(2q^{1/2+α}ζ(1/2+γ))`.
    pub s2_zeta_term: Complex,
    /// `−G₋(α)ζ(1/2−α)/(2q^{1/2+α}ζ(1/2+γ))`.
    pub s3_zeta_term: Complex,
}

impl RPieces {
    pub fn sum(&self) -> Complex {
        self.h_sum_term + self.bracket_term + self.zeta_ratio_term + self.s2_zeta_term + self.s3_zeta_term
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RPrediction {
    pub value: Complex,
    pub pieces: RPieces,
    pub variant: Variant,
}

fn check_modulus(q: u64) -> Result<(), RatiosError> {
    if q < 3 || !is_prime(q) {
        return Err(RatiosError::Modulus(q));
    }
    Ok(())
}

fn nonvanishing(
    v: Complex,
    what: &'static str,
    q: u64,
    j: u64,
    at: Complex,
) -> Result<Complex, RatiosError> {
    if v.norm() < SINGULAR_THRESHOLD {
        return Err(RatiosError::NearSingular { what, q, j, at });
    }
    Ok(v)
}

/// `Σ_{h≡1 (q)} μ(h) h^{−s}`, by inverting over all characters mod `q`:
/// `(1/(q−1)) Σ_ψ 1/L(s,ψ)`, the principal term being `1/(ζ(s)(1−q^{−s}))`.
pub fn mobius_ap_sum(s: Complex, q: u64) -> Result<Complex, RatiosError> {
    check_modulus(q)?;
    if !(s.re > 0.5) {
        return Err(RatiosError::Params(format!("Re s must exceed 1/2, got {s}")));
    }
    let ev = FamilyEvaluator::new(CharacterFamily::new(q)?)?;
    let values = ev.l_values(s)?;
    let mut total = Complex::new(0.0, 0.0);
    // At s = 1 the principal term 1/(ζ(s)(1−q^{−s})) vanishes.
    let skip = usize::from(s == Complex::new(1.0, 0.0));
    for (j, l) in values.iter().enumerate().skip(skip) {
        total += nonvanishing(*l, "L(s,ψ)", q, j as u64, s)?.inv();
    }
    Ok(total / (q - 1) as f64)
}

struct Shared {
    sqrt_q_pow: Complex,
    g_plus: Complex,
    g_minus: Complex,
    zeta_gamma: Complex,
}

fn shared(q: u64, alpha: Complex, gamma_shift: Complex) -> Result<Shared, RatiosError> {
    let half = Complex::new(0.5, 0.0);
    let (g_plus, g_minus) = g_pm(alpha)?;
    let zeta_gamma = nonvanishing(
        riemann_zeta(half + gamma_shift)?,
        "ζ(1/2+γ)",
        q,
        0,
        half + gamma_shift,
    )?;
    Ok(Shared {
        // q^{1/2+α}
        sqrt_q_pow: ((half + alpha) * (q as f64).ln()).exp(),
        g_plus,
        g_minus,
        zeta_gamma,
    })
}

/// The prediction for `Σ_{χ∈F(q)} L(1/2+α,χ)/L(1/2+γ,χ)`, piece by piece.
#[allow(non_snake_case)]
pub fn ratios_prediction_R(q: u64, params: &RatiosParams) -> Result<RPrediction, RatiosError> {
    check_modulus(q)?;
    let RatiosParams {
        alpha,
        gamma_shift,
        variant,
    } = *params;
    let half = Complex::new(0.5, 0.0);
    let sh = shared(q, alpha, gamma_shift)?;
    let qm1 = (q - 1) as f64;
    let h_sum_term = mobius_ap_sum(half + gamma_shift, q)? * qm1;
    let bracket_term = match variant {
        Variant::Standard => Complex::new(0.0, 0.0),
        Variant::Weak => {
            let inv_q = 1.0 / q as f64;
            qm1 * (sh.g_plus * e_of_real(-inv_q) + sh.g_minus * e_of_real(inv_q))
                / (2.0 * sh.sqrt_q_pow)
        }
    };
    let zeta_ratio_term = -riemann_zeta(half + alpha)? / sh.zeta_gamma;
    let common = riemann_zeta(half - alpha)? / (2.0 * sh.sqrt_q_pow * sh.zeta_gamma);
    let pieces = RPieces {
        h_sum_term,
        bracket_term,
        zeta_ratio_term,
        s2_zeta_term: -sh.g_plus * common,
        s3_zeta_term: -sh.g_minus * common,
    };
    Ok(RPrediction {
        value: pieces.sum(),
        pieces,
        variant,
    })
}

/// `∂/∂α` of [`ratios_prediction_R`], piece by piece. The `h`-sum does
/// not depend on `α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DRPrediction {
    pub value: Complex,
    pub bracket_term: Complex,
    pub zeta_ratio_term: Complex,
    pub s2_zeta_term: Complex,
    pub s3_zeta_term: Complex,
    pub variant: Variant,
}

/// The `α`-derivative at general `(α, γ)`.
pub fn ratios_prediction_dr_at(
    q: u64,
    alpha: Complex,
    gamma_shift: Complex,
    variant: Variant,
) -> Result<DRPrediction, RatiosError> {
    check_modulus(q)?;
    let half = Complex::new(0.5, 0.0);
    let sh = shared(q, alpha, gamma_shift)?;
    let (dg_plus, dg_minus) = g_pm_derivative(alpha)?;
    let log_q = (q as f64).ln();
    let qm1 = (q - 1) as f64;
    // d/dα [G(α) q^{−1/2−α}] = (G′ − G log q) q^{−1/2−α}
    let bracket_term = match variant {
        Variant::Standard => Complex::new(0.0, 0.0),
        Variant::Weak => {
            let inv_q = 1.0 / q as f64;
            qm1 * ((dg_plus - sh.g_plus * log_q) * e_of_real(-inv_q)
                + (dg_minus - sh.g_minus * log_q) * e_of_real(inv_q))
                / (2.0 * sh.sqrt_q_pow)
        }
    };
    let zeta_ratio_term = -riemann_zeta_derivative(half + alpha)? / sh.zeta_gamma;
    let z = riemann_zeta(half - alpha)?;
    let dz = riemann_zeta_derivative(half - alpha)?;
    let scale = 2.0 * sh.sqrt_q_pow * sh.zeta_gamma;
    // d/dα [G ζ(1/2−α) q^{−α}] = (G′ζ − Gζ′ − G ζ log q) q^{−α}
    let piece = |g: Complex, dg: Complex| -(dg * z - g * dz - g * z * log_q) / scale;
    let s2_zeta_term = piece(sh.g_plus, dg_plus);
    let s3_zeta_term = piece(sh.g_minus, dg_minus);
    Ok(DRPrediction {
        value: bracket_term + zeta_ratio_term + s2_zeta_term + s3_zeta_term,
        bracket_term,
        zeta_ratio_term,
        s2_zeta_term,
        s3_zeta_term,
        variant,
    })
}

/// `∂R/∂α` at `α = γ = r`.
#[allow(non_snake_case)]
pub fn ratios_prediction_dR(q: u64, r: Complex, variant: Variant) -> Result<DRPrediction, RatiosError> {
    if !(r.re > 0.0 && r.re <= 0.25) {
        return Err(RatiosError::Params(format!("Re r must lie in (0, 1/4], got {r}")));
    }
    ratios_prediction_dr_at(q, r, r, variant)
}

/// `Σ_{χ∈F(q)} L(1/2+α,χ)/L(1/2+γ,χ)` from actual L-values.
#[allow(non_snake_case)]
pub fn brute_force_R(q: u64, alpha: Complex, gamma_shift: Complex) -> Result<Complex, RatiosError> {
    brute_force_R_with_budget(q, alpha, gamma_shift, BRUTE_FORCE_BUDGET)
}

#[allow(non_snake_case)]
pub fn brute_force_R_with_budget(
    q: u64,
    alpha: Complex,
    gamma_shift: Complex,
    budget: u64,
) -> Result<Complex, RatiosError> {
    check_modulus(q)?;
    if q > budget {
        return Err(RatiosError::Budget { q, budget });
    }
    let half = Complex::new(0.5, 0.0);
    let ev = FamilyEvaluator::new(CharacterFamily::new(q)?)?;
    let (num, den) = rayon::join(|| ev.l_values(half + alpha), || ev.l_values(half + gamma_shift));
    let (num, den) = (num?, den?);
    let mut total = Complex::new(0.0, 0.0);
    for j in 1..(q - 1) as usize {
        let d = nonvanishing(den[j], "L(1/2+γ,χ)", q, j as u64, half + gamma_shift)?;
        total += num[j] / d;
    }
    Ok(total)
}

/// `φ̂(0)` plus the Gamma-integral term: the density predicted without
/// any prime contribution.
pub fn ratios_density_prediction(q: u64, phi: &TestFunction) -> Result<DensityReport, RatiosError> {
    let gamma_term = gamma_integral_term(q, phi)?;
    let main_term = phi.phi_hat(0.0);
    Ok(DensityReport {
        q,
        phi: *phi,
        method: Method::Ratios,
        main_term,
        gamma_term: Some(gamma_term),
        prime_term: Some(0.0),
        total: main_term + gamma_term,
        truncation_bound: 0.0,
        count_warnings: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::sieve;
    use crate::density::explicit_formula_density;
    use crate::special::gamma;
    use crate::testfn::make_fejer;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn mobius_sum_matches_direct_summation() {
        let table = sieve(1_000_000).unwrap();
        let mu = table.mobius_values();
        let mut direct = 0.0;
        let mut h = 1usize;
        while h <= 1_000_000 {
            direct += mu[h] as f64 / (h as f64 * h as f64);
            h += 5;
        }
        let v = mobius_ap_sum(c(2.0, 0.0), 5).unwrap();
        assert!((v.re - direct).abs() < 1e-7, "{v} vs {direct}");
        assert!(v.im.abs() < 1e-14);
    }

    #[test]
    fn mobius_sum_leading_term() {
        for q in [101u64, 1009] {
            let v = mobius_ap_sum(c(0.9, 0.0), q).unwrap();
            assert!((v - 1.0).norm() <= 10.0 * (q as f64).powf(-0.9), "q={q}: {v}");
        }
        let s = c(0.8, 3.0);
        let a = mobius_ap_sum(s, 13).unwrap();
        let b = mobius_ap_sum(s.conj(), 13).unwrap();
        assert!((a - b.conj()).norm() < 1e-12);
        assert!(mobius_ap_sum(c(0.4, 0.0), 13).is_err());
    }

    #[test]
    fn prediction_on_the_diagonal() {
        let q = 101;
        let p = RatiosParams::new(c(0.25, 0.0), c(0.25, 0.0), Variant::Standard).unwrap();
        let r = ratios_prediction_R(q, &p).unwrap();
        assert!((r.value - (q - 2) as f64).norm() <= 3.0 * (q as f64).sqrt(), "{}", r.value);
        assert_eq!(r.pieces.bracket_term, c(0.0, 0.0));
        assert!((r.pieces.sum() - r.value).norm() < 1e-12);
    }

    #[test]
    fn weak_minus_standard_is_the_bracket() {
        let q = 31;
        let a = c(0.1, 0.2);
        let g = c(0.3, -0.1);
        let s = ratios_prediction_R(q, &RatiosParams::new(a, g, Variant::Standard).unwrap()).unwrap();
        let w = ratios_prediction_R(q, &RatiosParams::new(a, g, Variant::Weak).unwrap()).unwrap();
        assert!((w.value - s.value - w.pieces.bracket_term).norm() < 1e-12);
        let (gp, gm) = g_pm(a).unwrap();
        let env = (q - 1) as f64 * (gp.norm() + gm.norm()) / (2.0 * (q as f64).powf(0.5 + a.re));
        assert!(w.pieces.bracket_term.norm() <= env * (1.0 + 1e-12));
    }

    #[test]
    fn prediction_recomposed_from_primitives() {
        let q = 101u64;
        let (a, g) = (c(0.1, 0.0), c(0.3, 0.0));
        let p = ratios_prediction_R(q, &RatiosParams::new(a, g, Variant::Weak).unwrap()).unwrap();
        let half = c(0.5, 0.0);
        let ratio = |x: f64, y: f64| gamma(c(x, 0.0) - a / 2.0).unwrap() / gamma(c(y, 0.0) + a / 2.0).unwrap();
        let gp = ratio(0.75, 0.75) / c(0.0, 1.0) + ratio(0.25, 0.25);
        let gm = ratio(0.75, 0.75) / c(0.0, 1.0) - ratio(0.25, 0.25);
        let qpow = (q as f64).powf(0.6);
        let zg = riemann_zeta(half + g).unwrap();
        let e = |x: f64| c((2.0 * PI * x).cos(), (2.0 * PI * x).sin());
        let expected = 100.0 * mobius_ap_sum(half + g, q).unwrap()
            + 100.0 * (gp * e(-1.0 / 101.0) + gm * e(1.0 / 101.0)) / (2.0 * qpow)
            - riemann_zeta(half + a).unwrap() / zg
            - (gp + gm) * riemann_zeta(half - a).unwrap() / (2.0 * qpow * zg);
        assert!((p.value - expected).norm() < 1e-10, "{} vs {expected}", p.value);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let h = 1e-6;
        for (q, r) in [(101u64, c(0.2, 0.0)), (31, c(0.15, 0.4)), (1009, c(0.05, -2.0))] {
            for variant in [Variant::Standard, Variant::Weak] {
                let at = |alpha: Complex| {
                    ratios_prediction_R(q, &RatiosParams { alpha, gamma_shift: r, variant })
                        .unwrap()
                        .value
                };
                let fd = (at(r + h) - at(r - h)) / (2.0 * h);
                let d = ratios_prediction_dR(q, r, variant).unwrap().value;
                assert!((d - fd).norm() <= 1e-6 * d.norm(), "q={q} r={r}: {d} vs {fd}");
            }
            let s = ratios_prediction_dR(q, r, Variant::Standard).unwrap();
            let w = ratios_prediction_dR(q, r, Variant::Weak).unwrap();
            assert!((w.value - s.value - w.bracket_term).norm() < 1e-12);
        }
    }

    #[test]
    fn derivative_tends_to_log_derivative() {
        let r = c(0.1, 0.0);
        let half = c(0.5, 0.0);
        let log_deriv = riemann_zeta_derivative(half + r).unwrap() / riemann_zeta(half + r).unwrap();
        for q in [1009u64, 10007] {
            let d = ratios_prediction_dR(q, r, Variant::Standard).unwrap().value;
            let bound = 10.0 * (q as f64).powf(-0.5 + r.re);
            assert!((d + log_deriv).norm() <= bound, "q={q}: {}", (d + log_deriv).norm());
        }
        // Schwarz reflection: the ζ piece has real coefficients; G₊ + G₋ is
        // i times a real-coefficient function, so s2 + s3 flips sign.
        let r = c(0.2, 0.7);
        let a = ratios_prediction_dR(101, r, Variant::Standard).unwrap();
        let b = ratios_prediction_dR(101, r.conj(), Variant::Standard).unwrap();
        assert!((a.zeta_ratio_term - b.zeta_ratio_term.conj()).norm() < 1e-10);
        let pair = |d: &DRPrediction| d.s2_zeta_term + d.s3_zeta_term;
        assert!((pair(&a) + pair(&b).conj()).norm() < 1e-10);
        assert!(ratios_prediction_dR(101, c(0.3, 0.0), Variant::Standard).is_err());
    }

    #[test]
    fn brute_force_identities() {
        for q in [7u64, 101] {
            let a = c(0.2, 1.5);
            let r = brute_force_R(q, a, a).unwrap();
            assert!((r - (q - 2) as f64).norm() < 1e-9);
            let (x, y) = (c(0.1, 0.5), c(0.3, -0.2));
            let lhs = brute_force_R(q, x, y).unwrap();
            let rhs = brute_force_R(q, x.conj(), y.conj()).unwrap().conj();
            assert!((lhs - rhs).norm() < 1e-9);
        }
        assert!(matches!(
            brute_force_R(2011, c(0.1, 0.0), c(0.3, 0.0)),
            Err(RatiosError::Budget { .. })
        ));
        assert!(matches!(brute_force_R(12, c(0.1, 0.0), c(0.3, 0.0)), Err(RatiosError::Modulus(12))));
    }

    #[test]
    fn density_prediction_is_explicit_minus_primes() {
        let phi = make_fejer(1.0).unwrap();
        let r = ratios_density_prediction(101, &phi).unwrap();
        let e = explicit_formula_density(101, &phi).unwrap();
        assert_eq!(r.total, e.main_term + e.gamma_term.unwrap());
        assert!((r.total - e.total - e.prime_term.unwrap()).abs() < 1e-15);
        assert!((r.total - e.total).abs() <= 0.2);
        assert_eq!(r.method, Method::Ratios);
    }

    #[test]
    fn params_validation() {
        assert!(RatiosParams::new(c(0.1, 0.0), c(0.0, 1.0), Variant::Standard).is_err());
        assert!(RatiosParams::new(c(0.6, 0.0), c(0.3, 0.0), Variant::Standard).is_err());
        assert!("weak".parse::<Variant>().is_ok());
    }
}
