//! Power series evaluation of Θ_ν and its derivative.

use super::gamma::reciprocal_gamma;
use super::{SeriesConfig, SpecFunError};
use num_complex::Complex64;

/// Index of the first non-vanishing series coefficient.
///
/// 1/Γ(n+1+ν) is zero exactly while n+1+ν is a non-positive integer, which
/// happens iff ν is an integer -m with m ≥ 1; the series then starts at n = m.
fn leading_index(nu: Complex64) -> usize {
    let nearest = nu.re.round();
    if nearest <= -1.0 && (nu.re - nearest).abs() < 1e-12 && nu.im.abs() < 1e-12 {
        (-nearest) as usize
    } else {
        0
    }
}

/// c_{n0} = (z/4)^{n0} / (n0! Γ(n0+1+ν)), built by repeated multiplication
/// to avoid overflowing intermediate factorials.
fn leading_term(nu: Complex64, z: Complex64, n0: usize) -> Complex64 {
    let mut term = reciprocal_gamma(nu + (n0 as f64 + 1.0));
    for j in 1..=n0 {
        term *= z / (4.0 * j as f64);
    }
    term
}

/// Θ_ν(z) = Σ_{n≥0} (z/4)^n / (n! Γ(n+1+ν)).
///
/// Terms are generated by the recursion `c_n = c_{n-1} · z / (4n(n+ν))`,
/// exactly the three-term identity `4n(n+ν) c_n = z c_{n-1}` satisfied by the
/// coefficients. Summation stops once a geometric majorant of the tail drops
/// below `cfg.rel_tol` relative to the running sum.
pub fn theta(nu: Complex64, z: Complex64, cfg: &SeriesConfig) -> Result<Complex64, SpecFunError> {
    let n0 = leading_index(nu);
    let mut term = leading_term(nu, z, n0);
    let mut sum = term;
    let mut peak = term.norm();
    let z_abs = z.norm();

    let mut n = n0 + 1;
    loop {
        if n > cfg.max_terms {
            return Err(SpecFunError::NonConvergence {
                rel_tol: cfg.rel_tol,
                max_terms: cfg.max_terms,
                z_abs,
            });
        }
        term *= z / (4.0 * n as f64 * (nu + n as f64));
        sum += term;
        peak = peak.max(term.norm());

        // Tail majorant: once the term ratio r stays below one the remainder
        // is bounded by |term| r / (1-r). The floor `peak * 1e-16` keeps the
        // loop finite at a zero of Θ, where |sum| collapses by cancellation.
        let r = z_abs / (4.0 * (n as f64 + 1.0) * (nu + (n as f64 + 1.0)).norm());
        if r < 0.75 {
            let tail = term.norm() * r / (1.0 - r);
            if tail <= cfg.rel_tol * (sum.norm() + peak * 1e-16) {
                return Ok(sum);
            }
        }
        n += 1;
    }
}

/// dΘ_ν/dz. Differentiating the series termwise gives coefficients
/// 1/(4 n! Γ(n+2+ν)), i.e. Θ'_ν(z) = Θ_{ν+1}(z) / 4.
pub fn theta_derivative(
    nu: Complex64,
    z: Complex64,
    cfg: &SeriesConfig,
) -> Result<Complex64, SpecFunError> {
    Ok(theta(nu + 1.0, z, cfg)? * 0.25)
}
