//! Even test functions `φ` whose Fourier transform `φ̂(ξ) = ∫ φ(x) e(−xξ) dx`
//! is supported in `(−σ, σ)`, plus the adaptive quadrature used throughout.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("quadrature on [{a}, {b}] did not reach tolerance {tol:e} (estimate {estimate}, error {error:e})")]
    NonConvergence {
        a: f64,
        b: f64,
        tol: f64,
        estimate: f64,
        error: f64,
    },
    #[error("integrand is not finite at x = {0}")]
    NonFinite(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TestFnError {
    #[error("support radius must be positive and finite, got {0}")]
    Sigma(f64),
    #[error("spline order must be 2 or 4, got {0}")]
    Order(u32),
    #[error("unknown test function '{0}' (expected fejer, spline2 or spline4)")]
    Name(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    /// `φ̂` is the triangle, `φ` is `sinc²`.
    Fejer,
    /// `φ̂` is a cubic B-spline, `φ` is `sinc⁴`.
    Spline4,
}

/// An even pair `(φ, φ̂)` with closed forms on both sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub shape: Shape,
    pub sigma: f64,
    /// Constant multiplier on both `φ` and `φ̂`.
    pub amplitude: f64,
}

fn check_sigma(sigma: f64) -> Result<(), TestFnError> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(TestFnError::Sigma(sigma));
    }
    Ok(())
}

pub fn make_fejer(sigma: f64) -> Result<TestFunction, TestFnError> {
    check_sigma(sigma)?;
    Ok(TestFunction {
        shape: Shape::Fejer,
        sigma,
        amplitude: 1.0,
    })
}

/// Normalized `order`-fold self-convolution of an indicator, rescaled to
/// support `(−σ, σ)` with `φ̂(0) = 1`. Order 2 is the Fejér pair.
pub fn make_spline_pair(sigma: f64, order: u32) -> Result<TestFunction, TestFnError> {
    check_sigma(sigma)?;
    let shape = match order {
        2 => Shape::Fejer,
        4 => Shape::Spline4,
        _ => return Err(TestFnError::Order(order)),
    };
    Ok(TestFunction {
        shape,
        sigma,
        amplitude: 1.0,
    })
}

/// `sin(y)/y`, accurate near 0.
fn sinc(y: f64) -> f64 {
    if y.abs() < 1e-4 {
        let y2 = y * y;
        1.0 - y2 / 6.0 + y2 * y2 / 120.0
    } else {
        y.sin() / y
    }
}

/// Cubic B-spline on `[−2, 2]`, integral 1.
fn cubic_bspline(x: f64) -> f64 {
    let a = x.abs();
    if a >= 2.0 {
        0.0
    } else if a <= 1.0 {
        2.0 / 3.0 - a * a + 0.5 * a * a * a
    } else {
        let r = 2.0 - a;
        r * r * r / 6.0
    }
}

impl TestFunction {
    pub fn from_name(name: &str, sigma: f64) -> Result<Self, TestFnError> {
        match name {
            "fejer" | "spline2" => make_fejer(sigma),
            "spline4" => make_spline_pair(sigma, 4),
            _ => Err(TestFnError::Name(name.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self.shape {
            Shape::Fejer => "fejer",
            Shape::Spline4 => "spline4",
        }
    }

    /// The same pair multiplied by `c`.
    pub fn scaled(mut self, c: f64) -> Self {
        self.amplitude *= c;
        self
    }

    pub fn phi(&self, x: f64) -> f64 {
        let s = self.sigma;
        self.amplitude
            * match self.shape {
                Shape::Fejer => s * sinc(PI * s * x).powi(2),
                Shape::Spline4 => 0.75 * s * sinc(0.5 * PI * s * x).powi(4),
            }
    }

    pub fn phi_hat(&self, u: f64) -> f64 {
        let s = self.sigma;
        if u.abs() >= s {
            return 0.0;
        }
        self.amplitude
            * match self.shape {
                Shape::Fejer => 1.0 - u.abs() / s,
                Shape::Spline4 => 1.5 * cubic_bspline(2.0 * u / s),
            }
    }

    /// `max |φ̂|`, attained at 0.
    pub fn phi_hat_max(&self) -> f64 {
        self.amplitude.abs()
    }

    /// Decreasing bound `|φ(x)| ≤ envelope(x)`.
    pub fn envelope(&self, x: f64) -> f64 {
        let s = self.sigma;
        let x = x.abs();
        self.amplitude.abs()
            * match self.shape {
                Shape::Fejer => s * (1.0f64).min(1.0 / (PI * s * x).powi(2)),
                Shape::Spline4 => 0.75 * s * (1.0f64).min((2.0 / (PI * s * x)).powi(4)),
            }
    }

    /// `A(ε)` with `|φ(x)| ≤ ε` whenever `|x| ≥ A(ε)`.
    pub fn decay_radius(&self, eps: f64) -> f64 {
        let amp = self.amplitude.abs();
        if amp == 0.0 {
            return 0.0;
        }
        let e = eps / amp;
        let s = self.sigma;
        match self.shape {
            Shape::Fejer => 1.0 / (PI * (s * e).sqrt()),
            Shape::Spline4 => (12.0 / (PI.powi(4) * s.powi(3) * e)).powf(0.25),
        }
    }

    /// Points where `φ̂` is not smooth.
    pub fn kinks(&self) -> Vec<f64> {
        let s = self.sigma;
        match self.shape {
            Shape::Fejer => vec![-s, 0.0, s],
            Shape::Spline4 => vec![-s, -0.5 * s, 0.0, 0.5 * s, s],
        }
    }

    /// `∫_a^b φ̂(u) du`, splitting at the kinks.
    pub fn integrate_hat(&self, a: f64, b: f64, tol: f64) -> Result<f64, QuadratureError> {
        quadrature_with_breaks(|u| self.phi_hat(u), a, b, &self.kinks(), tol)
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(sigma={})", self.name(), self.sigma)?;
        if self.amplitude != 1.0 {
            write!(f, "*{}", self.amplitude)?;
        }
        Ok(())
    }
}

/// `φ(γ · log(q/π) / 2π)`.
pub fn scaled_sum_weight(phi: &TestFunction, q: u64, gamma: f64) -> f64 {
    phi.phi(gamma * (q as f64 / PI).ln() / (2.0 * PI))
}

const XK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One G7/K15 panel: (Kronrod estimate, |K − G|).
fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> Result<(f64, f64), QuadratureError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut eval = |x: f64| {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(QuadratureError::NonFinite(x))
        }
    };
    let fc = eval(c)?;
    let mut k = WK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XK[i];
        let pair = eval(c - dx)? + eval(c + dx)?;
        k += WK[i] * pair;
        if i % 2 == 1 {
            g += WG[i / 2] * pair;
        }
    }
    Ok((k * h, ((k - g) * h).abs()))
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

const MAX_PANELS: usize = 20_000;

/// Globally adaptive Gauss–Kronrod quadrature with absolute tolerance `tol`.
pub fn quadrature(f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64, QuadratureError> {
    quadrature_with_breaks(f, a, b, &[], tol)
}

/// As [`quadrature`], with the interval split first at every break point
/// inside `(a, b)`.
pub fn quadrature_with_breaks(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: f64,
) -> Result<f64, QuadratureError> {
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return quadrature_with_breaks(f, b, a, breaks, tol).map(|v| -v);
    }
    let mut points = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    points.extend(inner);
    points.push(b);

    let mut heap = BinaryHeap::new();
    let (mut total, mut total_err) = (0.0, 0.0);
    for w in points.windows(2) {
        let (value, error) = gk15(&mut f, w[0], w[1])?;
        total += value;
        total_err += error;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value,
            error,
        });
    }
    while total_err > tol {
        let worst = heap.pop().expect("nonempty panel heap");
        let m = 0.5 * (worst.a + worst.b);
        // No further resolution possible in double precision.
        let exhausted = m <= worst.a || m >= worst.b || heap.len() >= MAX_PANELS;
        if exhausted {
            if worst.error <= 1e3 * f64::EPSILON * worst.value.abs().max(tol) {
                heap.push(worst);
                break;
            }
            return Err(QuadratureError::NonConvergence {
                a,
                b,
                tol,
                estimate: total,
                error: total_err,
            });
        }
        let (v1, e1) = gk15(&mut f, worst.a, m)?;
        let (v2, e2) = gk15(&mut f, m, worst.b)?;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: m,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: m,
            b: worst.b,
            value: v2,
            error: e2,
        });
        // Re-sum occasionally to keep the running totals from drifting.
        if heap.len() % 256 == 0 {
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.error).sum();
        }
    }
    let mut panels = heap.into_vec();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    Ok(panels.iter().map(|p| p.value).sum())
}
