//! Dirichlet L-functions of prime modulus: values, completed `Λ(s,χ)`, the
//! real rotation of `Λ` on the critical line, and low-lying zeros.
//!
//! Values come from the Hurwitz decomposition
//! `L(s,χ) = q^{−s} Σ_{a=1}^{q−1} χ(a) ζ(s, a/q)`. Because
//! `χ_j(g^k) = e(jk/(q−1))`, the same `q − 1` Hurwitz values give `L(s,χ_j)`
//! for every `j` at once through one length-`(q−1)` DFT, which is how whole
//! families are evaluated.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::characters::{CharacterError, CharacterFamily, CharacterId, DirichletCharacter};
use crate::special::{digamma, hurwitz_zeta, log_gamma, Complex, SpecialError};

pub const MIN_RE: f64 = -1.0;
pub const MAX_RE: f64 = 3.0;
pub const MAX_HEIGHT: f64 = 100.0;

/// Largest tolerated imaginary part of the rotated `Λ` on the critical line.
pub const ROTATION_TOLERANCE: f64 = 1e-8;
/// Largest tolerated `|Z|` (normalized to `|L|`) at a reported ordinate.
pub const ZERO_RESIDUAL_TOLERANCE: f64 = 1e-8;
/// Allowed gap between the zero count and [`zero_count_estimate`].
pub const COUNT_TOLERANCE: f64 = 2.0;

const ORDINATE_XTOL: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LfuncError {
    #[error(transparent)]
    Character(#[from] CharacterError),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error("s = {0} outside the supported strip −1 ≤ Re s ≤ 3, |Im s| ≤ 100")]
    Strip(Complex),
    #[error("zero search height {0} outside (0, 100]")]
    Height(f64),
    #[error("L-function of the principal character is not in the family")]
    Principal,
    #[error("rotated Λ not real for q={q}, j={j} at t={t}: imaginary part {residual:e}")]
    Rotation { q: u64, j: u64, t: f64, residual: f64 },
    #[error("root refinement failed for q={q}, j={j} on [{a}, {b}]")]
    Refinement { q: u64, j: u64, a: f64, b: f64 },
}

fn check_strip(s: Complex) -> Result<(), LfuncError> {
    if s.re < MIN_RE || s.re > MAX_RE || s.im.abs() > MAX_HEIGHT || !s.re.is_finite() {
        return Err(LfuncError::Strip(s));
    }
    Ok(())
}

/// `ζ(s, a/q)` for `a = 1..q−1` (index `a − 1`).
///
/// At `s = 1` the common pole `1/(s−1)` is dropped and `−ψ(a/q)` returned,
/// which is exact for any combination with `Σ_a χ(a) = 0`.
pub fn hurwitz_batch(s: Complex, q: u64) -> Result<Vec<Complex>, LfuncError> {
    if s == Complex::new(1.0, 0.0) {
        return (1..q)
            .map(|a| {
                digamma(Complex::new(a as f64 / q as f64, 0.0))
                    .map(|v| -v)
                    .map_err(LfuncError::from)
            })
            .collect();
    }
    (1..q)
        .map(|a| hurwitz_zeta(s, a as f64 / q as f64).map_err(LfuncError::from))
        .collect()
}

/// `L(s,χ)` for a non-principal character.
pub fn l_value(s: Complex, chi: &DirichletCharacter) -> Result<Complex, LfuncError> {
    if chi.is_principal() {
        return Err(LfuncError::Principal);
    }
    check_strip(s)?;
    let q = chi.modulus();
    let z = hurwitz_batch(s, q)?;
    let sum: Complex = z
        .iter()
        .enumerate()
        .map(|(i, v)| chi.value(i as i64 + 1) * v)
        .sum();
    Ok(sum * (-s * (q as f64).ln()).exp())
}

/// `log[(q/π)^{(s+a)/2} Γ((s+a)/2)]`.
fn log_gamma_factor(s: Complex, q: u64, parity: u8) -> Result<Complex, SpecialError> {
    let w = (s + parity as f64) * 0.5;
    Ok(w * (q as f64 / PI).ln() + log_gamma(w)?)
}

/// `Λ(s,χ) = (π/q)^{−(s+a)/2} Γ((s+a)/2) L(s,χ)`.
pub fn completed_lambda(s: Complex, chi: &DirichletCharacter) -> Result<Complex, LfuncError> {
    let l = l_value(s, chi)?;
    Ok(log_gamma_factor(s, chi.modulus(), chi.parity())?.exp() * l)
}

/// Principal square root of `1/ε(χ)`.
fn inverse_sqrt_sign(chi: &DirichletCharacter) -> Result<Complex, LfuncError> {
    let fe = chi.functional_equation_data()?;
    Ok(fe.sign.sqrt().inv())
}

/// `Z(t) = Re[ε^{−1/2} Λ(1/2+it, χ)]`, with the principal branch of the
/// square root. Fails if the rotated value is not real to
/// [`ROTATION_TOLERANCE`].
pub fn hardy_z(t: f64, chi: &DirichletCharacter) -> Result<f64, LfuncError> {
    let rot = inverse_sqrt_sign(chi)?;
    let v = rot * completed_lambda(Complex::new(0.5, t), chi)?;
    if v.im.abs() > ROTATION_TOLERANCE {
        return Err(LfuncError::Rotation {
            q: chi.modulus(),
            j: chi.index(),
            t,
            residual: v.im,
        });
    }
    Ok(v.re)
}

/// Expected number of zeros with `|γ| ≤ T`: `(T/π) log(qT/(2πe))`.
/// Meaningful for `T > 2`; clamped at zero below that.
pub fn zero_count_estimate(q: u64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    (t / PI * (q as f64 * t / (2.0 * PI * std::f64::consts::E)).ln()).max(0.0)
}

/// Validated ordinates of one `L(s,χ)` with `|γ| ≤ t_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    pub q: u64,
    pub j: u64,
    pub g: u64,
    pub t_max: f64,
    pub ordinates: Vec<f64>,
    pub count_residual: f64,
    /// Set when `count_residual` still exceeds [`COUNT_TOLERANCE`] after the
    /// refined rescan.
    pub count_warning: bool,
}

impl ZeroSet {
    pub fn id(&self) -> CharacterId {
        CharacterId {
            q: self.q,
            j: self.j,
            g: self.g,
        }
    }
}

/// Evaluates `L(s,χ_j)` for the whole family modulo `q` from a single batch
/// of Hurwitz values, plus the per-character critical-line rotations.
#[derive(Clone)]
pub struct FamilyEvaluator {
    family: CharacterFamily,
    fft: Arc<dyn Fft<f64>>,
    /// `ε(χ_j)^{−1/2}`, index `j`; entry 0 is unused.
    rotations: Vec<Complex>,
}

impl std::fmt::Debug for FamilyEvaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FamilyEvaluator")
            .field("q", &self.family.modulus())
            .finish()
    }
}

impl FamilyEvaluator {
    pub fn new(family: CharacterFamily) -> Result<Self, LfuncError> {
        let n = family.modulus() as usize - 1;
        let fft = FftPlanner::new().plan_fft_inverse(n);
        let mut rotations = vec![Complex::new(1.0, 0.0); n];
        for chi in family.non_principal() {
            rotations[chi.index() as usize] = inverse_sqrt_sign(&chi)?;
        }
        Ok(Self {
            family,
            fft,
            rotations,
        })
    }

    pub fn family(&self) -> &CharacterFamily {
        &self.family
    }

    /// `L(s,χ_j)` for `j = 0..q−2`; entry 0 is `L(s,χ₀) = ζ(s)(1 − q^{−s})`,
    /// which is meaningless at the pole `s = 1`.
    pub fn l_values(&self, s: Complex) -> Result<Vec<Complex>, LfuncError> {
        check_strip(s)?;
        let q = self.family.modulus();
        let z = hurwitz_batch(s, q)?;
        let dlog = self.family.dlog();
        let mut buf: Vec<Complex> = (0..q - 1).map(|k| z[dlog.pow(k) as usize - 1]).collect();
        self.fft.process(&mut buf);
        let scale = (-s * (q as f64).ln()).exp();
        buf.iter_mut().for_each(|v| *v *= scale);
        Ok(buf)
    }

    fn phase(&self, t: f64, parity: u8) -> Result<Complex, LfuncError> {
        let lg = log_gamma_factor(Complex::new(0.5, t), self.family.modulus(), parity)?;
        Ok(Complex::from_polar(1.0, lg.im))
    }

    fn check_rotation(&self, j: u64, t: f64, v: Complex) -> Result<f64, LfuncError> {
        if v.im.abs() > ROTATION_TOLERANCE {
            return Err(LfuncError::Rotation {
                q: self.family.modulus(),
                j,
                t,
                residual: v.im,
            });
        }
        Ok(v.re)
    }

    /// `Z(t)/|Γ-factor|` for every non-principal `j` (index `j`, entry 0 is 0).
    /// Same sign as [`hardy_z`], magnitude `|L(1/2+it,χ)|`.
    pub fn rotated_values(&self, t: f64) -> Result<Vec<f64>, LfuncError> {
        let l = self.l_values(Complex::new(0.5, t))?;
        let phases = [self.phase(t, 0)?, self.phase(t, 1)?];
        let mut out = vec![0.0; l.len()];
        for j in 1..l.len() {
            let v = self.rotations[j] * phases[j % 2] * l[j];
            out[j] = self.check_rotation(j as u64, t, v)?;
        }
        Ok(out)
    }

    /// Normalized rotated value for one character.
    pub fn rotated_value(&self, j: u64, t: f64) -> Result<f64, LfuncError> {
        let chi = self.family.character(j)?;
        let l = l_value(Complex::new(0.5, t), &chi)?;
        let v = self.rotations[j as usize] * self.phase(t, chi.parity())? * l;
        self.check_rotation(j, t, v)
    }
}

/// Grid spacing resolving the local zero spacing at height `t`.
fn grid_step(q: u64, t: f64) -> f64 {
    0.5 * PI / (q as f64 * (t.abs() + 3.0)).ln()
}

fn grid(q: u64, t_max: f64, refine: f64) -> Vec<f64> {
    let mut ts = vec![-t_max];
    let mut t = -t_max;
    loop {
        t += grid_step(q, t) / refine;
        if t >= t_max {
            ts.push(t_max);
            break;
        }
        ts.push(t);
    }
    ts
}

/// Brent's method on a sign-changing bracket.
fn brent<E>(
    mut f: impl FnMut(f64) -> Result<f64, E>,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    xtol: f64,
) -> Result<Option<f64>, E> {
    if fa == 0.0 {
        return Ok(Some(a));
    }
    if fb == 0.0 {
        return Ok(Some(b));
    }
    if fa.signum() == fb.signum() {
        return Ok(None);
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(Some(b));
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut qq);
            if a == c {
                p = 2.0 * m * s;
                qq = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                qq = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                qq = -qq;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * qq - (tol * qq).abs()).min((e * qq).abs()) {
                e = d;
                d = p / qq;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol * m.signum() };
        fb = f(b)?;
    }
    Ok(Some(b))
}

/// Sign-change brackets in a sampled `Z`, plus recursive probing of local
/// minima of `|Z|` that do not change sign (candidate close zero pairs).
fn brackets(
    ts: &[f64],
    zs: &[f64],
    eval: &mut dyn FnMut(f64) -> Result<f64, LfuncError>,
    depth: usize,
    out: &mut Vec<(f64, f64, f64, f64)>,
) -> Result<(), LfuncError> {
    let n = ts.len();
    for i in 0..n.saturating_sub(1) {
        if zs[i] == 0.0 || zs[i].signum() != zs[i + 1].signum() {
            out.push((ts[i], ts[i + 1], zs[i], zs[i + 1]));
        }
    }
    if depth == 0 {
        return Ok(());
    }
    for i in 1..n.saturating_sub(1) {
        let (l, m, r) = (zs[i - 1], zs[i], zs[i + 1]);
        let same = l.signum() == m.signum() && m.signum() == r.signum() && m != 0.0;
        if same && m.abs() < l.abs() && m.abs() < r.abs() {
            const SUB: usize = 8;
            let (a, b) = (ts[i - 1], ts[i + 1]);
            let mut sub_t = Vec::with_capacity(SUB + 1);
            let mut sub_z = Vec::with_capacity(SUB + 1);
            for k in 0..=SUB {
                let t = a + (b - a) * k as f64 / SUB as f64;
                sub_t.push(t);
                sub_z.push(match k {
                    0 => l,
                    SUB => r,
                    _ if (t - ts[i]).abs() < 1e-15 => m,
                    _ => eval(t)?,
                });
            }
            brackets(&sub_t, &sub_z, eval, depth - 1, out)?;
        }
    }
    Ok(())
}

const PROBE_DEPTH: usize = 4;

fn refine_character(
    evaluator: &FamilyEvaluator,
    j: u64,
    ts: &[f64],
    zs: &[f64],
) -> Result<Vec<f64>, LfuncError> {
    let q = evaluator.family.modulus();
    let mut eval = |t: f64| evaluator.rotated_value(j, t);
    let mut found = Vec::new();
    brackets(ts, zs, &mut eval, PROBE_DEPTH, &mut found)?;
    found.sort_by(|x, y| x.0.total_cmp(&y.0));
    found.dedup_by(|x, y| x.0 == y.0 && x.1 == y.1);
    let mut ordinates = Vec::with_capacity(found.len());
    for (a, b, fa, fb) in found {
        let root = brent(&mut eval, a, b, fa, fb, ORDINATE_XTOL)?
            .ok_or(LfuncError::Refinement { q, j, a, b })?;
        let residual = eval(root)?.abs();
        if residual > ZERO_RESIDUAL_TOLERANCE {
            return Err(LfuncError::Refinement { q, j, a, b });
        }
        ordinates.push(root);
    }
    ordinates.sort_by(f64::total_cmp);
    ordinates.dedup_by(|x, y| (*x - *y).abs() < 1e-9);
    Ok(ordinates)
}

fn check_height(t_max: f64) -> Result<(), LfuncError> {
    if !(t_max > 0.0 && t_max <= MAX_HEIGHT) {
        return Err(LfuncError::Height(t_max));
    }
    Ok(())
}

fn zero_set(evaluator: &FamilyEvaluator, j: u64, t_max: f64, ordinates: Vec<f64>) -> ZeroSet {
    let q = evaluator.family.modulus();
    let residual = (ordinates.len() as f64 - zero_count_estimate(q, t_max)).abs();
    ZeroSet {
        q,
        j,
        g: evaluator.family.generator(),
        t_max,
        ordinates,
        count_residual: residual,
        count_warning: residual > COUNT_TOLERANCE,
    }
}

fn scan_character(
    evaluator: &FamilyEvaluator,
    j: u64,
    t_max: f64,
    refine: f64,
) -> Result<Vec<f64>, LfuncError> {
    let ts = grid(evaluator.family.modulus(), t_max, refine);
    let zs = ts
        .iter()
        .map(|&t| evaluator.rotated_value(j, t))
        .collect::<Result<Vec<_>, _>>()?;
    refine_character(evaluator, j, &ts, &zs)
}

/// All sign-change zeros of `Z` on `[−t_max, t_max]` for one character.
///
/// A count residual above [`COUNT_TOLERANCE`] triggers one rescan at half
/// the grid step; if it persists the set is returned with `count_warning`.
pub fn find_zeros(chi: &DirichletCharacter, t_max: f64) -> Result<ZeroSet, LfuncError> {
    if chi.is_principal() {
        return Err(LfuncError::Principal);
    }
    check_height(t_max)?;
    let evaluator = FamilyEvaluator::new(chi.family().clone())?;
    let j = chi.index();
    let mut set = zero_set(&evaluator, j, t_max, scan_character(&evaluator, j, t_max, 1.0)?);
    if set.count_warning {
        set = zero_set(&evaluator, j, t_max, scan_character(&evaluator, j, t_max, 2.0)?);
    }
    Ok(set)
}

/// Zero sets for every `χ ∈ F(q)` (ordered by `j`), sharing the grid
/// evaluation across the family. Characters are refined in parallel.
pub fn find_family_zeros(
    family: &CharacterFamily,
    t_max: f64,
) -> Result<Vec<ZeroSet>, LfuncError> {
    check_height(t_max)?;
    let evaluator = FamilyEvaluator::new(family.clone())?;
    let q = family.modulus();
    let ts = grid(q, t_max, 1.0);
    let rows = ts
        .par_iter()
        .map(|&t| evaluator.rotated_values(t))
        .collect::<Result<Vec<_>, _>>()?;
    (1..q - 1)
        .into_par_iter()
        .map(|j| {
            let zs: Vec<f64> = rows.iter().map(|r| r[j as usize]).collect();
            let ordinates = refine_character(&evaluator, j, &ts, &zs)?;
            let set = zero_set(&evaluator, j, t_max, ordinates);
            if set.count_warning {
                let ordinates = scan_character(&evaluator, j, t_max, 2.0)?;
                return Ok(zero_set(&evaluator, j, t_max, ordinates));
            }
            Ok(set)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn l2_matches_euler_product() {
        let fam = CharacterFamily::new(5).unwrap();
        let chi = fam.character(2).unwrap();
        let sieve = crate::arith::sieve(100_000).unwrap();
        let mut prod = c(1.0, 0.0);
        for &p in sieve.primes() {
            prod /= c(1.0, 0.0) - chi.value(p as i64) / (p as f64 * p as f64);
        }
        let l = l_value(c(2.0, 0.0), &chi).unwrap();
        assert!((l - prod).norm() < 1e-8, "{l} vs {prod}");
    }

    #[test]
    fn l1_for_the_character_mod_3() {
        // Alternating-series oracle: Σ χ(n)/n = Σ_k (1/(3k+1) − 1/(3k+2)).
        let chi = CharacterFamily::new(3).unwrap().character(1).unwrap();
        let mut direct = 0.0;
        let n = 2_000_000;
        for k in 0..n {
            let k = k as f64;
            direct += 1.0 / (3.0 * k + 1.0) - 1.0 / (3.0 * k + 2.0);
        }
        // The remaining tail is ≈ 1/(9n).
        direct += 1.0 / (9.0 * n as f64);
        let l = l_value(c(1.0, 0.0), &chi).unwrap();
        let exact = PI / (3.0 * 3f64.sqrt());
        assert!((l.re - exact).abs() < 1e-12);
        assert!((direct - exact).abs() < 1e-10);
        assert!(l.im.abs() < 1e-14);
    }

    #[test]
    fn reflection_on_real_axis() {
        let fam = CharacterFamily::new(13).unwrap();
        for chi in fam.non_principal() {
            let a = l_value(c(0.5, 0.0), &chi).unwrap();
            let b = l_value(c(0.5, 0.0), &chi.conjugate()).unwrap();
            assert!((a.conj() - b).norm() < 1e-12);
        }
    }

    #[test]
    fn family_fft_matches_direct_sum() {
        let fam = CharacterFamily::new(31).unwrap();
        let ev = FamilyEvaluator::new(fam.clone()).unwrap();
        let s = c(0.3, 7.5);
        let all = ev.l_values(s).unwrap();
        for chi in fam.non_principal() {
            let direct = l_value(s, &chi).unwrap();
            assert!((all[chi.index() as usize] - direct).norm() < 1e-11);
        }
        // Principal entry is ζ(s)(1 − q^{−s}).
        let zeta = crate::special::riemann_zeta(s).unwrap();
        let principal = zeta * (c(1.0, 0.0) - (-s * 31f64.ln()).exp());
        assert!((all[0] - principal).norm() < 1e-11);
    }

    #[test]
    fn strip_and_principal_errors() {
        let fam = CharacterFamily::new(7).unwrap();
        let chi = fam.character(1).unwrap();
        assert!(matches!(l_value(c(3.5, 0.0), &chi), Err(LfuncError::Strip(_))));
        assert!(matches!(l_value(c(0.5, 101.0), &chi), Err(LfuncError::Strip(_))));
        let p = fam.character(0).unwrap();
        assert!(matches!(l_value(c(0.5, 1.0), &p), Err(LfuncError::Principal)));
        assert!(matches!(find_zeros(&chi, 150.0), Err(LfuncError::Height(_))));
    }

    #[test]
    fn hardy_z_squares_to_lambda_modulus() {
        let fam = CharacterFamily::new(11).unwrap();
        for chi in fam.non_principal() {
            for t in [0.0, 1.3, -4.2, 9.9] {
                let z = hardy_z(t, &chi).unwrap();
                let lam = completed_lambda(c(0.5, t), &chi).unwrap();
                assert!((z * z - lam.norm_sqr()).abs() < 1e-12 * lam.norm_sqr().max(1.0));
            }
        }
    }

    #[test]
    fn first_zero_of_the_character_mod_3() {
        let chi = CharacterFamily::new(3).unwrap().character(1).unwrap();
        // Independent bisection directly on hardy_z.
        let (mut a, mut b) = (7.5, 8.5);
        let fa = hardy_z(a, &chi).unwrap();
        assert!(fa.signum() != hardy_z(b, &chi).unwrap().signum());
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if hardy_z(m, &chi).unwrap().signum() == fa.signum() {
                a = m;
            } else {
                b = m;
            }
        }
        assert!((a - 8.0397).abs() < 1e-4);
        let set = find_zeros(&chi, 10.0).unwrap();
        assert_eq!(set.ordinates.len(), 2);
        assert!((set.ordinates[1] - a).abs() < 1e-9);
        assert!((set.ordinates[0] + a).abs() < 1e-9);
        assert!((zero_count_estimate(3, 10.0) - 1.7932).abs() < 1e-3);
        assert!(set.count_residual <= COUNT_TOLERANCE);
    }

    #[test]
    fn brent_finds_simple_roots() {
        let f = |x: f64| Ok::<f64, ()>(x * x - 2.0);
        let r = brent(f, 1.0, 2.0, -1.0, 2.0, 1e-14).unwrap().unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        let f = |x: f64| Ok::<f64, ()>(x.cos());
        assert_eq!(brent(f, 0.0, 1.0, 1.0, 0.54, 1e-12).unwrap(), None);
    }

    #[test]
    fn close_pairs_are_found_by_probing() {
        // Two roots 0.01 apart inside a single grid cell of width 1.2.
        let f = |t: f64| (t - 0.495) * (t - 0.505);
        let ts = [-1.0, 0.2, 1.4, 2.6];
        let zs: Vec<f64> = ts.iter().map(|&t| f(t)).collect();
        assert!(zs.iter().all(|&z| z > 0.0));
        let mut out = Vec::new();
        let mut eval = |t: f64| Ok(f(t));
        brackets(&ts, &zs, &mut eval, PROBE_DEPTH, &mut out).unwrap();
        assert_eq!(out.len(), 2, "{out:?}");
    }
}
