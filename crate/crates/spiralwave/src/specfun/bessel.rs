//! Bessel J of real order: evaluation and first positive zeros.

use super::theta::theta;
use super::{SeriesConfig, SpecFunError};
use crate::quad::gl32_panel_real;
use num_complex::Complex64;

/// Above this argument the alternating power series loses too many digits to
/// cancellation and the integral representation takes over.
const SERIES_ARG_LIMIT: f64 = 18.0;

/// J_tau(t) for tau ≥ 0, t ≥ 0.
///
/// Small arguments use `J_tau(t) = (t/2)^tau Θ_tau(-t²)`; large arguments use
/// the Schläfli integral representation
///
/// ```text
/// J_tau(t) = (1/π) ∫_0^π cos(tau θ - t sin θ) dθ
///          - (sin(tau π)/π) ∫_0^∞ e^{-tau s - t sinh s} ds,
/// ```
///
/// which is uniformly stable in both parameters.
pub fn bessel_j(tau: f64, t: f64) -> Result<f64, SpecFunError> {
    if tau < 0.0 {
        return Err(SpecFunError::InvalidOrder(tau));
    }
    if t == 0.0 {
        return Ok(if tau == 0.0 { 1.0 } else { 0.0 });
    }
    if t <= SERIES_ARG_LIMIT {
        let cfg = SeriesConfig::default();
        let th = theta(Complex64::new(tau, 0.0), Complex64::new(-t * t, 0.0), &cfg)?;
        return Ok((t / 2.0).powf(tau) * th.re);
    }
    Ok(bessel_j_integral(tau, t))
}

fn bessel_j_integral(tau: f64, t: f64) -> f64 {
    use std::f64::consts::PI;
    // Oscillatory part: panel count scales with the total phase variation.
    let panels = (8 + ((tau + t) / 2.0) as usize).min(4000);
    let h = PI / panels as f64;
    let mut osc = 0.0;
    for p in 0..panels {
        let a = p as f64 * h;
        osc += gl32_panel_real(&mut |th: f64| (tau * th - t * th.sin()).cos(), a, a + h);
    }
    osc /= PI;

    // Monotone part, absent at integer order.
    let s = (tau * PI).sin();
    if s.abs() < 1e-300 {
        return osc;
    }
    // e^{-tau s - t sinh s} falls below 1e-18 once the exponent passes 42.
    let mut s_max = 1e-3f64;
    while tau * s_max + t * s_max.sinh() < 42.0 {
        s_max *= 1.5;
        if s_max > 50.0 {
            break;
        }
    }
    let panels = 24;
    let h = s_max / panels as f64;
    let mut mono = 0.0;
    for p in 0..panels {
        let a = p as f64 * h;
        mono += gl32_panel_real(&mut |u: f64| (-tau * u - t * u.sinh()).exp(), a, a + h);
    }
    osc - s / PI * mono
}

/// First positive zero j_{tau,1} of J_tau, bracketed by a forward scan and
/// bisected to 1e-10 in the argument. Satisfies j_{tau,1} ≥ j_{0,1} + tau.
pub fn bessel_j_first_zero(tau: f64) -> Result<f64, SpecFunError> {
    Ok(bessel_j_zeros(tau, 1)?[0])
}

/// First `count` positive zeros of J_tau, in increasing order.
pub fn bessel_j_zeros(tau: f64, count: usize) -> Result<Vec<f64>, SpecFunError> {
    if tau < 0.0 {
        return Err(SpecFunError::InvalidOrder(tau));
    }
    let mut zeros = Vec::with_capacity(count);
    // J_tau > 0 on (0, j_{tau,1}); the lower bound j_{0,1} + tau > 2 + tau
    // lets the scan start safely above possible underflow at tiny t.
    let mut a = (2.0 + tau).max(0.5);
    let mut fa = bessel_j(tau, a)?;
    let step = 0.05 * (1.0 + tau.cbrt() / 3.0);
    let limit = tau + 12.0 + 10.0 * (count as f64) + 3.0 * tau.cbrt();
    while zeros.len() < count {
        let b = a + step;
        if b > limit {
            return Err(SpecFunError::BracketFailure(tau));
        }
        let fb = bessel_j(tau, b)?;
        if fa == 0.0 {
            zeros.push(a);
        } else if fa * fb < 0.0 {
            zeros.push(bisect(tau, a, b, fa)?);
        }
        a = b;
        fa = fb;
    }
    Ok(zeros)
}

fn bisect(tau: f64, mut a: f64, mut b: f64, mut fa: f64) -> Result<f64, SpecFunError> {
    for _ in 0..80 {
        let mid = 0.5 * (a + b);
        if b - a < 1e-12 * mid.max(1.0) {
            return Ok(mid);
        }
        let fm = bessel_j(tau, mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    Ok(0.5 * (a + b))
}
