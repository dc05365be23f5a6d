//! Single-mode solutions of the separated ODE on the half-line.
//!
//! Each Fourier block of the half-plane problem reduces to
//!
//! ```text
//! X''(y) = [ν² + λ e^{-2y}] X(y),   X(0) = 1,   X ∈ H¹(0, ∞),
//! ```
//!
//! with ν = sign(k)(k - iα) and λ = ωα - μ + iωk. Away from resonance
//! (λ not a zero of Θ_ν) the unique solution is
//! `X(y) = Θ_ν(λ e^{-2y}) e^{-νy} / Θ_ν(λ)`, decaying like e^{-|k|y}.

use crate::quad;
use crate::specfun::{
    bessel_j_first_zero, theta, theta_derivative, SeriesConfig, SpecFunError,
};
use num_complex::Complex64;
use thiserror::Error;

/// Parameters of one Fourier block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeParams {
    /// Fourier index, nonzero.
    pub k: i32,
    /// Asymmetry parameter of the competition matrix.
    pub alpha: f64,
    /// Reaction coefficient.
    pub mu: f64,
    /// Angular speed of the rotating frame.
    pub omega: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModeError {
    #[error("mode frequency must be nonzero")]
    ZeroFrequency,
    #[error("resonant mode at frequency {freq}: |Θ_ν(λ)| = {ratio:.3e} of |Θ_ν(0)|")]
    Resonant { freq: f64, ratio: f64 },
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

/// λ = ωα - μ + iωk.
pub fn lambda_of(p: &ModeParams) -> Complex64 {
    lambda_of_freq(p.k as f64, p.alpha, p.mu, p.omega)
}

pub(crate) fn lambda_of_freq(m: f64, alpha: f64, mu: f64, omega: f64) -> Complex64 {
    Complex64::new(omega * alpha - mu, omega * m)
}

/// ν = sign(k)(k - iα).
pub fn nu_of(p: &ModeParams) -> Complex64 {
    nu_of_freq(p.k as f64, p.alpha)
}

pub(crate) fn nu_of_freq(m: f64, alpha: f64) -> Complex64 {
    let s = if m >= 0.0 { 1.0 } else { -1.0 };
    Complex64::new(s * m, -s * alpha)
}

/// Default relative tolerance deciding resonance: zeros of Θ_ν are simple,
/// so |Θ_ν(λ)| grows linearly away from them and 1e-8 gives a thin band.
pub const RESONANCE_TOL: f64 = 1e-8;

/// True iff λ(params) sits (numerically) on the resonance set, i.e.
/// |Θ_ν(λ)| < tol · |Θ_ν(0)|.
pub fn is_resonant(p: &ModeParams, tol: f64, cfg: &SeriesConfig) -> Result<bool, SpecFunError> {
    is_resonant_freq(p.k as f64, p.alpha, p.mu, p.omega, tol, cfg)
}

pub(crate) fn is_resonant_freq(
    m: f64,
    alpha: f64,
    mu: f64,
    omega: f64,
    tol: f64,
    cfg: &SeriesConfig,
) -> Result<bool, SpecFunError> {
    let nu = nu_of_freq(m, alpha);
    let lambda = lambda_of_freq(m, alpha, mu, omega);
    let at_lambda = theta(nu, lambda, cfg)?;
    let at_zero = theta(nu, Complex64::new(0.0, 0.0), cfg)?;
    Ok(at_lambda.norm() < tol * at_zero.norm())
}

/// A validated non-resonant mode, ready for evaluation.
#[derive(Debug, Clone)]
pub struct Mode {
    /// Signed frequency; equals `params.k` for integer modes, a half-integer
    /// on the double cover of an odd-K problem.
    pub freq: f64,
    pub alpha: f64,
    pub mu: f64,
    pub omega: f64,
    pub nu: Complex64,
    pub lambda: Complex64,
    pub theta_at_lambda: Complex64,
    cfg: SeriesConfig,
}

impl Mode {
    pub fn new(p: &ModeParams, tol: f64, cfg: &SeriesConfig) -> Result<Self, ModeError> {
        Self::with_frequency(p.k as f64, p.alpha, p.mu, p.omega, tol, cfg)
    }

    /// Mode at an arbitrary real nonzero frequency. Integer frequencies are
    /// the 2π-periodic case; odd half-integers arise from period doubling.
    pub fn with_frequency(
        m: f64,
        alpha: f64,
        mu: f64,
        omega: f64,
        tol: f64,
        cfg: &SeriesConfig,
    ) -> Result<Self, ModeError> {
        if m == 0.0 {
            return Err(ModeError::ZeroFrequency);
        }
        let nu = nu_of_freq(m, alpha);
        let lambda = lambda_of_freq(m, alpha, mu, omega);
        let theta_at_lambda = theta(nu, lambda, cfg)?;
        let at_zero = theta(nu, Complex64::new(0.0, 0.0), cfg)?;
        if theta_at_lambda.norm() < tol * at_zero.norm() {
            return Err(ModeError::Resonant {
                freq: m,
                ratio: theta_at_lambda.norm() / at_zero.norm(),
            });
        }
        Ok(Self {
            freq: m,
            alpha,
            mu,
            omega,
            nu,
            lambda,
            theta_at_lambda,
            cfg: *cfg,
        })
    }

    /// X(y) = Θ_ν(λ e^{-2y}) e^{-νy} / Θ_ν(λ); reduces to e^{-νy} for λ = 0.
    pub fn eval(&self, y: f64) -> Result<Complex64, SpecFunError> {
        let decay = (-self.nu * y).exp();
        if self.lambda.norm() == 0.0 {
            return Ok(decay);
        }
        let th = theta(self.nu, self.lambda * (-2.0 * y).exp(), &self.cfg)?;
        Ok(th / self.theta_at_lambda * decay)
    }

    /// X'(y) by the closed form
    /// `X' = [-2λe^{-2y} Θ'_ν(λe^{-2y}) - ν Θ_ν(λe^{-2y})] e^{-νy} / Θ_ν(λ)`.
    pub fn eval_derivative(&self, y: f64) -> Result<Complex64, SpecFunError> {
        let decay = (-self.nu * y).exp();
        if self.lambda.norm() == 0.0 {
            return Ok(-self.nu * decay);
        }
        let w = self.lambda * (-2.0 * y).exp();
        let th = theta(self.nu, w, &self.cfg)?;
        let dth = theta_derivative(self.nu, w, &self.cfg)?;
        Ok((-2.0 * w * dth - self.nu * th) * decay / self.theta_at_lambda)
    }
}

/// Max scaled residual of the mode ODE over a uniform grid:
/// `|D²_h X - [ν² + λ e^{-2y}] X| / max(1, |X|)` with the central second
/// difference D²_h.
pub fn mode_ode_residual(mode: &Mode, y_grid: &[f64]) -> Result<f64, SpecFunError> {
    assert!(y_grid.len() >= 3, "need at least three grid points");
    let h = y_grid[1] - y_grid[0];
    let values: Vec<Complex64> = y_grid
        .iter()
        .map(|&y| mode.eval(y))
        .collect::<Result<_, _>>()?;
    let mut worst = 0.0f64;
    for i in 1..y_grid.len() - 1 {
        let d2 = (values[i + 1] - 2.0 * values[i] + values[i - 1]) / (h * h);
        let rhs = (mode.nu * mode.nu + mode.lambda * (-2.0 * y_grid[i]).exp()) * values[i];
        let res = (d2 - rhs).norm() / values[i].norm().max(1.0);
        worst = worst.max(res);
    }
    Ok(worst)
}

/// Which sufficient non-resonance condition the parameters satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coercivity {
    /// μ < (j_{0,1} + sqrt(k² + α²))².
    MuSmall,
    /// α ≠ 0 and ω/α < 2.
    OmegaAlphaSmall,
    /// sup_{τ>0} [(j_{τ,1})² - (ω/2α) τ²] > μ - (ω/2α)(k² + α²), certified
    /// by a numeric scan of τ.
    SupCondition,
    Unknown,
}

/// Checks the explicit coercivity conditions in order of increasing cost.
pub fn coercivity_certificate(p: &ModeParams) -> Result<Coercivity, SpecFunError> {
    let j01 = bessel_j_first_zero(0.0)?;
    let kk = (p.k as f64).powi(2) + p.alpha * p.alpha;
    if p.mu < (j01 + kk.sqrt()).powi(2) {
        return Ok(Coercivity::MuSmall);
    }
    if p.alpha != 0.0 && p.omega / p.alpha < 2.0 {
        return Ok(Coercivity::OmegaAlphaSmall);
    }
    if p.alpha == 0.0 {
        return Ok(Coercivity::Unknown);
    }
    // Scan sup over τ ∈ (0, 50]: coarse pass, then a refined pass with step
    // 1e-2 around the coarse maximizer.
    let c = p.omega / (2.0 * p.alpha);
    let rhs = p.mu - c * kk;
    let score = |tau: f64| -> Result<f64, SpecFunError> {
        let j = bessel_j_first_zero(tau)?;
        Ok(j * j - c * tau * tau)
    };
    let mut best = f64::NEG_INFINITY;
    let mut best_tau = 0.25;
    let mut tau = 0.25;
    while tau <= 50.0 {
        let s = score(tau)?;
        if s > best {
            best = s;
            best_tau = tau;
        }
        tau += 0.25;
    }
    let mut tau = (best_tau - 0.25).max(0.01);
    while tau <= (best_tau + 0.25).min(50.0) {
        best = best.max(score(tau)?);
        tau += 0.01;
    }
    if best > rhs {
        Ok(Coercivity::SupCondition)
    } else {
        Ok(Coercivity::Unknown)
    }
}

/// L², H¹-seminorm and sup norm of a mode profile on (0, ∞).
#[derive(Debug, Clone, Copy)]
pub struct ModeNorms {
    pub l2: f64,
    pub h1_seminorm: f64,
    pub sup: f64,
}

/// Norms by adaptive quadrature on [0, Y], with Y chosen so that the
/// exponential tail e^{-|freq| Y} is below 1e-12 (the discarded tail of the
/// squared integrals is then below 1e-24 relative).
pub fn mode_norms(mode: &Mode) -> Result<ModeNorms, SpecFunError> {
    let rate = mode.freq.abs();
    let y_max = 12.0 * std::f64::consts::LN_10 / rate;
    let mut err: Option<SpecFunError> = None;
    {
        // probe once so series failures surface before quadrature swallows them
        mode.eval(0.0)?;
    }
    let mut sq = |f: &dyn Fn(f64) -> Result<Complex64, SpecFunError>, y: f64| -> f64 {
        match f(y) {
            Ok(v) => v.norm_sqr(),
            Err(e) => {
                err = Some(e);
                0.0
            }
        }
    };
    let l2_sq = quad::adaptive_real(|y| sq(&|y| mode.eval(y), y), 0.0, y_max, 1e-9, 0.0);
    let h1_sq = quad::adaptive_real(
        |y| sq(&|y| mode.eval_derivative(y), y),
        0.0,
        y_max,
        1e-9,
        0.0,
    );
    if let Some(e) = err {
        return Err(e);
    }

    // Sup over a dense grid plus golden-section refinement of the best cell.
    let samples = 4096usize;
    let mut best_i = 0usize;
    let mut best = 0.0f64;
    for i in 0..=samples {
        let y = y_max * i as f64 / samples as f64;
        let v = mode.eval(y)?.norm();
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let lo = y_max * (best_i.saturating_sub(1)) as f64 / samples as f64;
    let hi = y_max * ((best_i + 1).min(samples)) as f64 / samples as f64;
    let sup = golden_max(|y| mode.eval(y).map(|v| v.norm()), lo, hi, best)?;

    Ok(ModeNorms {
        l2: l2_sq.sqrt(),
        h1_seminorm: h1_sq.sqrt(),
        sup,
    })
}

fn golden_max<F: Fn(f64) -> Result<f64, SpecFunError>>(
    f: F,
    mut a: f64,
    mut b: f64,
    floor: f64,
) -> Result<f64, SpecFunError> {
    const PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = b - PHI * (b - a);
    let mut x2 = a + PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..60 {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + PHI * (b - a);
            f2 = f(x2)?;
        }
        if b - a < 1e-12 {
            break;
        }
    }
    Ok(floor.max(f1).max(f2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SeriesConfig {
        SeriesConfig::default()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lambda_formula() {
        let p = ModeParams { k: 1, alpha: 0.0, mu: 0.0, omega: 0.0 };
        assert_eq!(lambda_of(&p), c(0.0, 0.0));
        let p = ModeParams { k: 1, alpha: 0.0, mu: 0.0, omega: 1.0 };
        assert_eq!(lambda_of(&p), c(0.0, 1.0));
        let p = ModeParams { k: 2, alpha: 1.0, mu: 3.0, omega: 2.0 };
        assert_eq!(lambda_of(&p), c(-1.0, 4.0));
    }

    #[test]
    fn nu_sign_convention() {
        let p = ModeParams { k: 3, alpha: 0.5, mu: 0.0, omega: 0.0 };
        assert_eq!(nu_of(&p), c(3.0, -0.5));
        let p = ModeParams { k: -3, alpha: 0.5, mu: 0.0, omega: 0.0 };
        assert_eq!(nu_of(&p), c(3.0, 0.5));
    }

    #[test]
    fn resonance_at_first_dirichlet_eigenvalue() {
        // λ = -j_{1,1}² is a zero of Θ_1.
        let j11 = bessel_j_first_zero(1.0).unwrap();
        let p = ModeParams { k: 1, alpha: 0.0, mu: j11 * j11, omega: 0.0 };
        assert!(is_resonant(&p, RESONANCE_TOL, &cfg()).unwrap());
        let p0 = ModeParams { k: 1, alpha: 0.0, mu: 0.0, omega: 0.0 };
        assert!(!is_resonant(&p0, RESONANCE_TOL, &cfg()).unwrap());
    }

    #[test]
    fn resonance_at_complex_reference_zero() {
        // λ* = -13.29546288 + 10.36075651i is a zero of Θ_{1-i}; the matching
        // parameters are ω = Im λ*, μ = Im λ* - Re λ* (k = 1, α = 1).
        let lam = c(-13.295_462_879, 10.360_756_509);
        let p = ModeParams {
            k: 1,
            alpha: 1.0,
            mu: lam.im - lam.re,
            omega: lam.im,
        };
        assert!(is_resonant(&p, 1e-6, &cfg()).unwrap());
    }

    #[test]
    fn boundary_normalization_is_exact() {
        let p = ModeParams { k: 2, alpha: 0.7, mu: 1.0, omega: -1.5 };
        let mode = Mode::new(&p, RESONANCE_TOL, &cfg()).unwrap();
        assert_eq!(mode.eval(0.0).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn pure_exponential_when_lambda_vanishes() {
        // λ = 0, ν = 1: X(ln 2) = 1/2.
        let p = ModeParams { k: 1, alpha: 0.0, mu: 0.0, omega: 0.0 };
        let mode = Mode::new(&p, RESONANCE_TOL, &cfg()).unwrap();
        let v = mode.eval(std::f64::consts::LN_2).unwrap();
        assert!((v - 0.5).norm() < 1e-15);
    }

    #[test]
    fn negative_index_is_conjugate() {
        let (alpha, mu, omega) = (0.8, 1.2, 2.0);
        for k in [1, 2, 5] {
            let plus = Mode::new(&ModeParams { k, alpha, mu, omega }, RESONANCE_TOL, &cfg()).unwrap();
            let minus =
                Mode::new(&ModeParams { k: -k, alpha, mu, omega }, RESONANCE_TOL, &cfg()).unwrap();
            for y in [0.0, 0.3, 1.1, 2.7] {
                let a = minus.eval(y).unwrap();
                let b = plus.eval(y).unwrap().conj();
                assert!((a - b).norm() < 1e-13 * (1.0 + b.norm()), "k={k}, y={y}");
            }
        }
    }

    #[test]
    fn ode_residual_second_order() {
        let grid = |h: f64| -> Vec<f64> {
            let n = (5.0 / h) as usize;
            (0..=n).map(|i| i as f64 * h).collect()
        };
        // analytic exponential case: pure discretization error
        let p = ModeParams { k: 1, alpha: 0.0, mu: 0.0, omega: 0.0 };
        let mode = Mode::new(&p, RESONANCE_TOL, &cfg()).unwrap();
        let r = mode_ode_residual(&mode, &grid(1e-3)).unwrap();
        assert!(r < 1e-5, "residual {r:e}");

        for p in [
            ModeParams { k: 1, alpha: 1.0, mu: 0.0, omega: 1.0 },
            ModeParams { k: 3, alpha: 0.5, mu: 2.0, omega: -2.0 },
        ] {
            let mode = Mode::new(&p, RESONANCE_TOL, &cfg()).unwrap();
            let r = mode_ode_residual(&mode, &grid(1e-3)).unwrap();
            assert!(r < 1e-4, "params {p:?}: residual {r:e}");
            // Richardson: halving h divides the residual by about four. Run
            // at the coarse end of the admissible range, where the h² term
            // still dominates the 1e-12 series noise amplified by 1/h².
            let ra = mode_ode_residual(&mode, &grid(1e-2)).unwrap();
            let rb = mode_ode_residual(&mode, &grid(5e-3)).unwrap();
            let ratio = ra / rb;
            assert!((3.0..5.0).contains(&ratio), "O(h²) ratio {ratio}");
        }
    }

    #[test]
    fn coercivity_tiers() {
        let p = ModeParams { k: 1, alpha: 0.0, mu: 0.0, omega: 5.0 };
        assert_eq!(coercivity_certificate(&p).unwrap(), Coercivity::MuSmall);
        let p = ModeParams { k: 1, alpha: 2.0, mu: 50.0, omega: 1.0 };
        assert_eq!(coercivity_certificate(&p).unwrap(), Coercivity::OmegaAlphaSmall);
        // ω/α = 1 < 2 so this lands in a tier at least as strong as the scan.
        let p = ModeParams { k: 1, alpha: 0.1, mu: 20.0, omega: 0.1 };
        let tier = coercivity_certificate(&p).unwrap();
        assert!(tier != Coercivity::Unknown, "got {tier:?}");
    }

    #[test]
    fn coercivity_sup_scan_fires() {
        // μ above both explicit bounds but ω/2α barely above 1: the scan
        // certifies via moderate τ where (j_{τ,1})² - c τ² is still large.
        let p = ModeParams { k: 1, alpha: 1.0, mu: 40.0, omega: 2.2 };
        let j01 = bessel_j_first_zero(0.0).unwrap();
        assert!(p.mu >= (j01 + (2.0f64).sqrt()).powi(2));
        assert!(p.omega / p.alpha >= 2.0);
        assert_eq!(coercivity_certificate(&p).unwrap(), Coercivity::SupCondition);
    }

    #[test]
    fn norms_of_pure_exponential() {
        // λ = 0, ν = k: ||X||_2 = 1/sqrt(2k) exactly.
        for k in [1, 2, 4] {
            let p = ModeParams { k, alpha: 0.0, mu: 0.0, omega: 0.0 };
            let mode = Mode::new(&p, RESONANCE_TOL, &cfg()).unwrap();
            let norms = mode_norms(&mode).unwrap();
            let expected = 1.0 / (2.0 * k as f64).sqrt();
            assert!(
                (norms.l2 - expected).abs() < 1e-6 * expected,
                "k={k}: {} vs {expected}",
                norms.l2
            );
            assert!((norms.sup - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn norm_family_scaling_in_k() {
        // At fixed (α, μ, ω) = (1, 0, 1): l2·sqrt(k) and h1/sqrt(k) stay bounded.
        let mut max_l2_scaled = 0.0f64;
        let mut max_h1_scaled = 0.0f64;
        for k in (1..=50).step_by(7) {
            let p = ModeParams { k, alpha: 1.0, mu: 0.0, omega: 1.0 };
            let mode = Mode::new(&p, RESONANCE_TOL, &cfg()).unwrap();
            let n = mode_norms(&mode).unwrap();
            let sk = (k as f64).sqrt();
            max_l2_scaled = max_l2_scaled.max(n.l2 * sk);
            max_h1_scaled = max_h1_scaled.max(n.h1_seminorm / sk);
            // interpolation bound: sup ≤ sqrt(2) (l2 · h1_total)^{1/2}
            let h1_total = (n.l2 * n.l2 + n.h1_seminorm * n.h1_seminorm).sqrt();
            assert!(
                n.sup <= (2.0f64).sqrt() * (n.l2 * h1_total).sqrt() + 1e-9,
                "k={k}: sup={} l2={} h1={}",
                n.sup,
                n.l2,
                n.h1_seminorm
            );
        }
        assert!(max_l2_scaled < 1.2, "l2*sqrt(k) peak {max_l2_scaled}");
        assert!(max_h1_scaled < 1.6, "h1/sqrt(k) peak {max_h1_scaled}");
    }

    #[test]
    fn resonance_symmetric_under_full_reflection() {
        // (k, α, ω) -> (-k, -α, -ω) conjugates ν and λ simultaneously.
        for (k, alpha, mu, omega) in [(1, 0.7, 2.0, 1.3), (3, -0.2, 5.0, -0.8)] {
            let p = ModeParams { k, alpha, mu, omega };
            let q = ModeParams { k: -k, alpha: -alpha, mu, omega: -omega };
            let a = is_resonant(&p, 1e-8, &cfg()).unwrap();
            let b = is_resonant(&q, 1e-8, &cfg()).unwrap();
            assert_eq!(a, b);
        }
    }
}
