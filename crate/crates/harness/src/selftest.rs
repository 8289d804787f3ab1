//! Fast end-to-end consistency checks run by the `selftest` subcommand.

use std::f64::consts::PI;

use ratioslab_core::characters::{family_char_sum, family_char_sum_brute, CharacterFamily};
use ratioslab_core::density::{empirical_density, explicit_formula_density, katz_sarnak_main_term, Group};
use ratioslab_core::lfunc::find_family_zeros;
use ratioslab_core::ratios::{brute_force_R, ratios_prediction_R, ratios_prediction_dR, RatiosParams, Variant};
use ratioslab_core::special::riemann_zeta;
use ratioslab_core::testfn::{make_fejer, make_spline_pair};
use ratioslab_core::Complex;
use serde::Serialize;

use crate::error::HarnessError;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String), HarnessError>) -> Check {
    match f() {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

pub fn run_selftest() -> Vec<Check> {
    vec![
        check("gauss sums and orthogonality, q ≤ 31", || {
            let mut worst: f64 = 0.0;
            for q in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
                let fam = CharacterFamily::new(q)?;
                for chi in fam.non_principal() {
                    worst = worst.max((chi.gauss_sum()?.norm_sqr() - q as f64).abs());
                }
                for r in -40..40 {
                    let d = family_char_sum_brute(&fam, r) - Complex::new(family_char_sum(q, r) as f64, 0.0);
                    worst = worst.max(d.norm());
                }
            }
            Ok((worst <= 1e-8, format!("max residual {worst:.2e}")))
        }),
        check("zeta special values", || {
            let z2 = riemann_zeta(Complex::new(2.0, 0.0))?.re - PI * PI / 6.0;
            let z0 = riemann_zeta(Complex::new(0.0, 0.0))?.re + 0.5;
            Ok((z2.abs() <= 1e-10 && z0.abs() <= 1e-10, format!("errors {z2:.1e}, {z0:.1e}")))
        }),
        check("empirical vs explicit density, q=11", || {
            let zeros = find_family_zeros(&CharacterFamily::new(11)?, 40.0)?;
            let phi = make_spline_pair(1.0, 4)?;
            let emp = empirical_density(11, &zeros, &phi)?;
            let exp = explicit_formula_density(11, &phi)?;
            let diff = (emp.total - exp.total).abs();
            let allowed = emp.truncation_bound + 1e-4;
            Ok((diff <= allowed, format!("difference {diff:.2e}, allowed {allowed:.2e}")))
        }),
        check("diagonal ratio identity, q=31", || {
            let a = Complex::new(0.1, 0.0);
            let brute = brute_force_R(31, a, a)?;
            let d = (brute - Complex::new(29.0, 0.0)).norm();
            let pred = ratios_prediction_R(31, &RatiosParams::new(a, a, Variant::Standard)?)?.value;
            let p = (pred - Complex::new(29.0, 0.0)).norm();
            Ok((d <= 1e-9 && p <= 3.0 * 31f64.sqrt(), format!("brute {d:.1e}, prediction gap {p:.3}")))
        }),
        check("derivative vs finite difference, q=101", || {
            let r = Complex::new(0.1, 0.5);
            let h = 1e-6;
            let at = |alpha: Complex| -> Result<Complex, HarnessError> {
                let p = RatiosParams::new(alpha, r, Variant::Weak)?;
                Ok(ratios_prediction_R(101, &p)?.value)
            };
            let fd = (at(r + h)? - at(r - h)?) / (2.0 * h);
            let d = ratios_prediction_dR(101, r, Variant::Weak)?.value;
            let rel = (d - fd).norm() / d.norm();
            Ok((rel <= 1e-5, format!("relative error {rel:.1e}")))
        }),
        check("symmetry group main terms, fejer sigma=1", || {
            let phi = make_fejer(1.0)?;
            let expected = [
                (Group::U, 1.0),
                (Group::SOeven, 1.5),
                (Group::Sp, 0.5),
                (Group::O, 1.5),
                (Group::SOodd, 1.5),
            ];
            let mut worst: f64 = 0.0;
            for (g, v) in expected {
                worst = worst.max((katz_sarnak_main_term(g, &phi)? - v).abs());
            }
            Ok((worst <= 1e-10, format!("max error {worst:.1e}")))
        }),
    ]
}
