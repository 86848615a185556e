//! Closed forms and root solvers: the occupancy kernel `m`, the critical
//! time `theta(x)` and its finite-n version, the exponent `G_x(a, b)`, the
//! profile `f_n`, its derivative sign expression, and the U-shape test.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("x = {0} is outside [0, 1]")]
    XOutOfRange(f64),
    #[error("theta must be positive, got {0}")]
    ThetaNotPositive(f64),
    #[error("Hamming weight {k} is not allowed in dimension {n}")]
    WeightOutOfRange { n: u32, k: u32 },
    #[error("no nonnegative root for n = {n}, k = 0")]
    NoRoot { n: u32 },
    #[error("log argument {0} is not positive")]
    NonPositiveLogArgument(f64),
    #[error("a = {a} and b = {b} must both be nonnegative")]
    NegativeArgument { a: f64, b: f64 },
    #[error("t = {t} is outside [0, {upper}]")]
    TOutOfRange { t: f64, upper: f64 },
    #[error("alpha = {0} is outside [0, 1]")]
    AlphaOutOfRange(f64),
    #[error("invalid solver configuration")]
    InvalidConfig,
    #[error("no sign change on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
    #[error("root solver did not converge in {0} iterations")]
    NoConvergence(u32),
    #[error("curve needs at least two points")]
    TooFewPoints,
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaConfig {
    pub tolerance: f64,
    pub max_iterations: u32,
}

impl Default for ThetaConfig {
    fn default() -> Self {
        ThetaConfig { tolerance: 1e-12, max_iterations: 200 }
    }
}

impl ThetaConfig {
    fn check(&self) -> Result<(), NumericsError> {
        if self.tolerance > 0.0 && self.max_iterations > 0 {
            Ok(())
        } else {
            Err(NumericsError::InvalidConfig)
        }
    }
}

/// `ln cosh t`, accurate for small and large `t`.
pub fn ln_cosh(t: f64) -> f64 {
    let t = t.abs();
    if t < 1.0 {
        let s = (0.5 * t).sinh();
        (2.0 * s * s).ln_1p()
    } else {
        t + (-2.0 * t).exp().ln_1p() - LN_2
    }
}

/// `ln sinh t` for `t > 0`; `-inf` at 0.
pub fn ln_sinh(t: f64) -> f64 {
    if t < 1.0 {
        t.sinh().ln()
    } else {
        t + (-(-2.0 * t).exp()).ln_1p() - LN_2
    }
}

/// `ln m` with `m = sinh(t)^k cosh(t)^(n-k)`.
pub fn m_log(n: u32, k: u32, t: f64) -> f64 {
    debug_assert!(k <= n);
    let a = if k == 0 { 0.0 } else { f64::from(k) * ln_sinh(t) };
    a + f64::from(n - k) * ln_cosh(t)
}

/// `m = sinh(t)^k cosh(t)^(n-k)`, the expected number of particles at a
/// vertex of weight `k` at time `t` for a single particle started at the
/// source.
pub fn m_value(n: u32, k: u32, t: f64) -> f64 {
    if k == 0 {
        t.cosh().powi(n as i32)
    } else {
        m_log(n, k, t).exp()
    }
}

/// Safeguarded Newton iteration on a bracket with `f(lo) <= 0 <= f(hi)`.
fn solve_increasing<F>(f: F, mut lo: f64, mut hi: f64, cfg: &ThetaConfig) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> (f64, f64),
{
    cfg.check()?;
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo > 0.0 || fhi < 0.0 {
        return Err(NumericsError::NoBracket { lo, hi });
    }
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..cfg.max_iterations {
        let (fx, dfx) = f(x);
        if fx.abs() < cfg.tolerance * 1e-3 || hi - lo <= 4.0 * f64::EPSILON * x.abs() {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        x = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else if lo > 0.0 && hi / lo > 1e3 {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
    }
    let (fx, _) = f(x);
    if fx.abs() < cfg.tolerance {
        Ok(x)
    } else {
        Err(NumericsError::NoConvergence(cfg.max_iterations))
    }
}

/// Bisection for a continuous function with a sign change on `[lo, hi]`.
fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> Result<f64, NumericsError> {
    let (mut flo, fhi) = (f(lo), f(hi));
    if flo.signum() == fhi.signum() {
        return Err(NumericsError::NoBracket { lo, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

const THETA_LOWER: f64 = 1e-300;

fn asinh_one() -> f64 {
    1.0f64.asinh()
}

/// `theta(x)`: the nonnegative root of `x ln sinh t + (1-x) ln cosh t = 0`.
pub fn theta_of_x(x: f64, cfg: &ThetaConfig) -> Result<f64, NumericsError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(NumericsError::XOutOfRange(x));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let h = |t: f64| {
        let val = x * ln_sinh(t) + (1.0 - x) * ln_cosh(t);
        let der = x / t.tanh() + (1.0 - x) * t.tanh();
        (val, der)
    };
    solve_increasing(h, THETA_LOWER, asinh_one(), cfg)
}

/// Residual of the defining equation of `theta(x)`.
pub fn theta_residual(x: f64, theta: f64) -> f64 {
    if x == 0.0 {
        ln_cosh(theta)
    } else {
        x * ln_sinh(theta) + (1.0 - x) * ln_cosh(theta)
    }
}

/// `x(theta) = ln cosh theta / (-ln tanh theta)`, the inverse of
/// [`theta_of_x`].
pub fn x_of_theta(theta: f64) -> Result<f64, NumericsError> {
    if !(theta > 0.0) {
        return Err(NumericsError::ThetaNotPositive(theta));
    }
    Ok(ln_cosh(theta) / (ln_cosh(theta) - ln_sinh(theta)))
}

/// `theta_n`: the root of `m(v, t) = 1/n` for `|v| = k` in dimension `n`.
pub fn theta_n(n: u32, k: u32, cfg: &ThetaConfig) -> Result<f64, NumericsError> {
    if n == 0 || k > n {
        return Err(NumericsError::WeightOutOfRange { n, k });
    }
    if k == 0 {
        return if n == 1 { Ok(0.0) } else { Err(NumericsError::NoRoot { n }) };
    }
    let (nf, kf) = (f64::from(n), f64::from(k));
    let ln_n = nf.ln();
    let h = |t: f64| {
        let val = m_log(n, k, t) + ln_n;
        let der = kf / t.tanh() + (nf - kf) * t.tanh();
        (val, der)
    };
    solve_increasing(h, THETA_LOWER, asinh_one(), cfg)
}

/// `G_x(a, b) = b + x ln(cosh(2a)/2 - e^{-2b}/2) + (1-x) ln(cosh(2a)/2 + e^{-2b}/2)`.
#[allow(non_snake_case)]
pub fn G(x: f64, a: f64, b: f64) -> Result<f64, NumericsError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(NumericsError::XOutOfRange(x));
    }
    if !(a >= 0.0 && b >= 0.0) {
        return Err(NumericsError::NegativeArgument { a, b });
    }
    let half_cosh = 0.5 * (2.0 * a).cosh();
    let half_exp = 0.5 * (-2.0 * b).exp();
    let mut value = b + (1.0 - x) * (half_cosh + half_exp).ln();
    if x > 0.0 {
        // cosh(2a)/2 - e^{-2b}/2 = sinh^2(a) + e^{-b} sinh(b)
        let arg = a.sinh().powi(2) + (-b).exp() * b.sinh();
        if !(arg > 0.0) {
            return Err(NumericsError::NonPositiveLogArgument(half_cosh - half_exp));
        }
        value += x * arg.ln();
    }
    Ok(value)
}

fn check_t(t: f64, upper: f64) -> Result<(), NumericsError> {
    if (0.0..=upper).contains(&t) {
        Ok(())
    } else {
        Err(NumericsError::TOutOfRange { t, upper })
    }
}

/// `f_n(t) = G_{k/n}(t, theta_n - t)` on `[0, theta_n]`.
pub fn f_n(t: f64, n: u32, k: u32, cfg: &ThetaConfig) -> Result<f64, NumericsError> {
    let theta = theta_n(n, k, cfg)?;
    check_t(t, theta)?;
    G(f64::from(k) / f64::from(n), t, (theta - t).max(0.0))
}

/// `f(t) = G_x(t, theta(x) - t)` on `[0, theta(x)]`.
pub fn f_limit(t: f64, x: f64, cfg: &ThetaConfig) -> Result<f64, NumericsError> {
    let theta = theta_of_x(x, cfg)?;
    check_t(t, theta)?;
    G(x, t, (theta - t).max(0.0))
}

/// `d/dt G_x(t, theta - t)`.
fn profile_derivative(t: f64, x: f64, theta: f64) -> f64 {
    let half_cosh = 0.5 * (2.0 * t).cosh();
    let e = 0.5 * (-2.0 * (theta - t)).exp();
    let s = (2.0 * t).sinh();
    let mut d = -1.0 + (1.0 - x) * (s + 2.0 * e) / (half_cosh + e);
    if x > 0.0 {
        let below = t.sinh().powi(2) + (-(theta - t)).exp() * (theta - t).sinh();
        d += x * (s - 2.0 * e) / below;
    }
    d
}

/// `f_n'(t)`.
pub fn f_n_prime(t: f64, n: u32, k: u32, cfg: &ThetaConfig) -> Result<f64, NumericsError> {
    let theta = theta_n(n, k, cfg)?;
    check_t(t, theta)?;
    Ok(profile_derivative(t, f64::from(k) / f64::from(n), theta))
}

/// `f'(t)`.
pub fn f_limit_prime(t: f64, x: f64, cfg: &ThetaConfig) -> Result<f64, NumericsError> {
    let theta = theta_of_x(x, cfg)?;
    check_t(t, theta)?;
    Ok(profile_derivative(t, x, theta))
}

fn sign_expr(t: f64, theta: f64, one_minus_2x: f64) -> f64 {
    (0.25 - (-4.0 * theta).exp()) * (4.0 * t).exp() - 0.75 * (-4.0 * t).exp() - 0.5
        + 2.0 * one_minus_2x * (-2.0 * theta).exp()
}

/// An expression with the sign of `f_n'(t)`.
pub fn fprime_sign_expr_n(t: f64, n: u32, k: u32, cfg: &ThetaConfig) -> Result<f64, NumericsError> {
    let theta = theta_n(n, k, cfg)?;
    check_t(t, theta)?;
    Ok(sign_expr(t, theta, (f64::from(n) - 2.0 * f64::from(k)) / f64::from(n)))
}

/// An expression with the sign of `f'(t)`.
pub fn fprime_sign_expr(t: f64, x: f64, cfg: &ThetaConfig) -> Result<f64, NumericsError> {
    let theta = theta_of_x(x, cfg)?;
    check_t(t, theta)?;
    Ok(sign_expr(t, theta, 1.0 - 2.0 * x))
}

/// The sign expression at `t = theta`:
/// `e^{4 theta}/4 - 3 e^{-4 theta}/4 + 2 (1 - 2x) e^{-2 theta} - 3/2`.
pub fn endpoint_sign_value(x: f64, theta: f64) -> f64 {
    0.25 * (4.0 * theta).exp() - 0.75 * (-4.0 * theta).exp()
        + 2.0 * (1.0 - 2.0 * x) * (-2.0 * theta).exp()
        - 1.5
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct UShapeReport {
    pub x: f64,
    pub theta: f64,
    pub fprime_at_theta_sign: f64,
    pub u_shaped: bool,
    /// `min(-f'(0), f'(theta))`.
    pub margin: f64,
}

pub fn u_shape_report(x: f64, cfg: &ThetaConfig) -> Result<UShapeReport, NumericsError> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(NumericsError::XOutOfRange(x));
    }
    let theta = theta_of_x(x, cfg)?;
    let value = endpoint_sign_value(x, theta);
    let margin = (-profile_derivative(0.0, x, theta)).min(profile_derivative(theta, x, theta));
    Ok(UShapeReport { x, theta, fprime_at_theta_sign: value, u_shaped: value > 0.0, margin })
}

/// The endpoint sign value as a function of `theta`, with `x = x(theta)`.
pub fn endpoint_sign_of_theta(theta: f64) -> Result<f64, NumericsError> {
    Ok(endpoint_sign_value(x_of_theta(theta)?, theta))
}

/// `(theta*, x*)`: where the endpoint sign value changes sign.
pub fn critical_x_star(cfg: &ThetaConfig) -> Result<(f64, f64), NumericsError> {
    cfg.check()?;
    let g = |t: f64| endpoint_sign_of_theta(t).unwrap_or(f64::NAN);
    let theta = bisect(g, 1e-6, 0.5)?;
    Ok((theta, x_of_theta(theta)?))
}

/// `x` above which the U-shape holds by the elementary bound,
/// `1 - ln(2 sqrt 2) / ln 3`.
pub fn easy_x_bound() -> f64 {
    1.0 - (2.0 * 2f64.sqrt()).ln() / 3f64.ln()
}

/// Expected number of accessible paths from the source to the top of the
/// oriented cube, given source fitness `alpha` and top fitness 1:
/// `n (1 - alpha)^(n-1)`.
pub fn oriented_expected_paths(n: u32, alpha: f64) -> Result<f64, NumericsError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(NumericsError::AlphaOutOfRange(alpha));
    }
    Ok(f64::from(n) * (1.0 - alpha).powi(n as i32 - 1))
}

/// `sinh(1 - alpha)^x cosh(1 - alpha)^(1 - x)`.
pub fn ex_growth_rate(x: f64, alpha: f64) -> Result<f64, NumericsError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(NumericsError::XOutOfRange(x));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(NumericsError::AlphaOutOfRange(alpha));
    }
    let s = 1.0 - alpha;
    Ok(s.sinh().powf(x) * s.cosh().powf(1.0 - x))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitScenario {
    /// Target at the all-ones vertex.
    AtOnes,
    /// Target chosen uniformly at random.
    UniformTarget,
}

/// Limiting accessibility probability: `1 - ln(1 + sqrt 2)` or
/// `1 - ln(2 + sqrt 5) / 2`.
pub fn limit_probability(scenario: LimitScenario) -> f64 {
    match scenario {
        LimitScenario::AtOnes => 1.0 - 1.0f64.asinh(),
        LimitScenario::UniformTarget => 1.0 - 0.5 * 2.0f64.asinh(),
    }
}

fn grid(from: f64, to: f64, points: usize) -> Result<impl Iterator<Item = f64>, NumericsError> {
    if points < 2 {
        return Err(NumericsError::TooFewPoints);
    }
    let step = (to - from) / (points - 1) as f64;
    Ok((0..points).map(move |i| if i == points - 1 { to } else { from + step * i as f64 }))
}

/// `(x, theta(x))` on an even grid.
pub fn theta_curve(
    from: f64,
    to: f64,
    points: usize,
    cfg: &ThetaConfig,
) -> Result<Vec<(f64, f64)>, NumericsError> {
    grid(from, to, points)?.map(|x| Ok((x, theta_of_x(x, cfg)?))).collect()
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct EndpointPoint {
    pub theta: f64,
    pub x: f64,
    pub value: f64,
    pub value_over_x: f64,
}

/// Endpoint sign value against `theta` on an even grid of positive thetas.
pub fn endpoint_curve(from: f64, to: f64, points: usize) -> Result<Vec<EndpointPoint>, NumericsError> {
    grid(from, to, points)?
        .map(|theta| {
            let x = x_of_theta(theta)?;
            let value = endpoint_sign_value(x, theta);
            Ok(EndpointPoint { theta, x, value, value_over_x: value / x })
        })
        .collect()
}
