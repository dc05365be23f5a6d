//! Series solution of the drifted equation on the half-plane and its nodal
//! structure.
//!
//! The field is `v(x, y) = e^{αx} Σ_{m} φ_m X_m(y) e^{imx}`, summed
//! symmetrically over active frequencies ±m, solving
//!
//! ```text
//! -Δv + ω e^{-2y} v_x = μ e^{-2y} v,    v(x+2π, y) = σ v(x, y),
//! ```
//!
//! with σ = e^{2πα} for integer frequencies and σ = -e^{2πα} on the odd
//! double cover, where the active frequencies are the odd half-integers.

use crate::compat::TraceCombination;
use crate::modes::{Mode, ModeError};
use crate::specfun::{bessel_j_first_zero, SeriesConfig, SpecFunError};
use crate::compat;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone)]
pub enum HalfPlaneError {
    #[error("resonant mode at frequency {0}")]
    ResonantMode(f64),
    #[error("truncation too small: tail weight {tail:.3e} above {tol:.3e} at index {index}")]
    TruncationTooSmall { index: usize, tail: f64, tol: f64 },
    #[error("mean condition violated: |φ_0| = {0:.3e} relative to the coefficient scale")]
    NonzeroMean(f64),
    #[error("μ = {mu} is not below the mode bound (j_{{0,1}}+1)² = {bound:.4}; pass the waiver to assemble anyway")]
    MuBound { mu: f64, bound: f64 },
    #[error("expected {expected} nodal intersections at the top level, found {got}")]
    UnexpectedZeroCount { expected: usize, got: usize },
    #[error("curve lost near (x, y) = ({x:.4}, {y:.4}): {detail}")]
    CurveLost { x: f64, y: f64, detail: String },
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Mode(#[from] ModeError),
}

/// Frequency lattice of the expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreqKind {
    /// m = 1, 2, 3, ... (σ > 0, even number of arcs).
    Integer,
    /// m = 1/2, 3/2, 5/2, ... (σ < 0, odd number of arcs on the cover).
    HalfOdd,
}

impl FreqKind {
    fn freq(&self, j: usize) -> f64 {
        match self {
            FreqKind::Integer => j as f64,
            FreqKind::HalfOdd => j as f64 - 0.5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AssembleOptions {
    /// Explicit truncation index; `None` selects the smallest index ≥ n+8
    /// whose coefficient tail drops below `tail_tol` relative.
    pub truncation: Option<usize>,
    pub tail_tol: f64,
    pub resonance_tol: f64,
    pub series: SeriesConfig,
    /// Skip the μ < (j_{0,1}+1)² precondition and rely on the per-mode
    /// resonance checks alone.
    pub waive_mu_bound: bool,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        Self {
            truncation: None,
            tail_tol: 1e-10,
            resonance_tol: crate::modes::RESONANCE_TOL,
            series: SeriesConfig::default(),
            waive_mu_bound: false,
        }
    }
}

/// Assembled truncated series solution.
#[derive(Debug, Clone)]
pub struct HalfPlaneSolution {
    pub alpha: f64,
    pub mu: f64,
    pub omega: f64,
    /// First active frequency (K/2 for K arcs).
    pub n_freq: f64,
    pub kind: FreqKind,
    freqs: Vec<f64>,
    coeffs: Vec<Complex64>,
    modes: Vec<Mode>,
    coeff_scale: f64,
}

impl HalfPlaneSolution {
    /// Multiplier picked up over one period: v(x+2π, y) = σ v(x, y).
    pub fn sigma(&self) -> f64 {
        let mag = (2.0 * std::f64::consts::PI * self.alpha).exp();
        match self.kind {
            FreqKind::Integer => mag,
            FreqKind::HalfOdd => -mag,
        }
    }

    /// Number of nodal intersections per period: 2 n_freq.
    pub fn zeros_per_period(&self) -> usize {
        (2.0 * self.n_freq).round() as usize
    }

    pub fn active_frequencies(&self) -> &[f64] {
        &self.freqs
    }

    pub fn coefficient(&self, m: f64) -> Option<Complex64> {
        self.freqs
            .iter()
            .position(|&f| (f - m).abs() < 1e-9)
            .map(|i| self.coeffs[i])
    }

    pub fn eval_v(&self, x: f64, y: f64) -> Result<f64, SpecFunError> {
        Ok(self.row(y)?.v(x))
    }

    pub fn eval_grad_v(&self, x: f64, y: f64) -> Result<(f64, f64), SpecFunError> {
        let row = self.row_with_derivatives(y)?;
        Ok((row.vx(x), row.vy(x)))
    }

    /// Amplitude envelope e^{αx} Σ 2|φ_m||X_m(y)|; the natural local scale
    /// for deciding whether a value is "numerically zero".
    pub fn envelope(&self, x: f64, y: f64) -> Result<f64, SpecFunError> {
        let mut acc = 0.0;
        for (phi, mode) in self.coeffs.iter().zip(&self.modes) {
            acc += 2.0 * phi.norm() * mode.eval(y)?.norm();
        }
        Ok(acc * (self.alpha * x).exp())
    }

    /// Mode profiles frozen at one height; evaluations along the row then
    /// cost one complex exponential per mode.
    pub fn row(&self, y: f64) -> Result<Row<'_>, SpecFunError> {
        let profiles = self
            .modes
            .iter()
            .map(|m| m.eval(y))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Row {
            sol: self,
            profiles,
            derivatives: None,
        })
    }

    pub fn row_with_derivatives(&self, y: f64) -> Result<Row<'_>, SpecFunError> {
        let mut row = self.row(y)?;
        let d = self
            .modes
            .iter()
            .map(|m| m.eval_derivative(y))
            .collect::<Result<Vec<_>, _>>()?;
        row.derivatives = Some(d);
        Ok(row)
    }

    /// Samples v on the tensor grid xs × ys, one row cache per height.
    pub fn sample(&self, xs: &[f64], ys: &[f64]) -> Result<Vec<Vec<f64>>, SpecFunError> {
        let mut out = Vec::with_capacity(ys.len());
        for &y in ys {
            let row = self.row(y)?;
            out.push(xs.iter().map(|&x| row.v(x)).collect());
        }
        Ok(out)
    }

    /// Max scaled PDE residual on the grid [x0, x1]×[y0, y1] with spacing h:
    /// central differences of `-Δv + ω e^{-2y} v_x - μ e^{-2y} v`, normalized
    /// by the largest single-term magnitude over the grid.
    pub fn pde_residual(
        &self,
        x_range: (f64, f64),
        y_range: (f64, f64),
        h: f64,
    ) -> Result<f64, SpecFunError> {
        let nx = ((x_range.1 - x_range.0) / h).round() as usize;
        let ny = ((y_range.1 - y_range.0) / h).round() as usize;
        let xs: Vec<f64> = (0..=nx).map(|i| x_range.0 + i as f64 * h).collect();
        let ys: Vec<f64> = (0..=ny).map(|j| y_range.0 + j as f64 * h).collect();
        let v = self.sample(&xs, &ys)?;
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for j in 1..ny {
            let w = (-2.0 * ys[j]).exp();
            for i in 1..nx {
                let lap = (v[j][i + 1] - 2.0 * v[j][i] + v[j][i - 1]) / (h * h)
                    + (v[j + 1][i] - 2.0 * v[j][i] + v[j - 1][i]) / (h * h);
                let vx = (v[j][i + 1] - v[j][i - 1]) / (2.0 * h);
                let res = -lap + self.omega * w * vx - self.mu * w * v[j][i];
                worst = worst.max(res.abs());
                scale = scale
                    .max(lap.abs())
                    .max((self.omega * w * vx).abs())
                    .max((self.mu * w * v[j][i]).abs());
            }
        }
        Ok(worst / scale.max(1e-300))
    }

    /// Number of sign changes of x ↦ v(x, y) over one period, counting the
    /// wrap through the σ-multiplier.
    pub fn count_sign_changes(&self, y: f64, samples: usize) -> Result<usize, SpecFunError> {
        let row = self.row(y)?;
        let two_pi = 2.0 * std::f64::consts::PI;
        let vals: Vec<f64> = (0..samples)
            .map(|i| row.v(two_pi * i as f64 / samples as f64))
            .collect();
        let wrap_sign = if self.sigma() > 0.0 { 1.0 } else { -1.0 };
        let mut count = 0;
        for i in 0..samples {
            let a = vals[i];
            let b = if i + 1 < samples {
                vals[i + 1]
            } else {
                wrap_sign * vals[0]
            };
            if a * b < 0.0 {
                count += 1;
            } else if a * b == 0.0 && (a != 0.0 || b != 0.0) {
                // refine a touch of zero: nudge off the node
                let x_mid = two_pi * (i as f64 + 0.5) / samples as f64;
                if row.v(x_mid) * (if a != 0.0 { a } else { b }) < 0.0 {
                    count += 1;
                }
            }
        }
        Ok(count)
    }
}

/// Frozen-height evaluator.
pub struct Row<'a> {
    sol: &'a HalfPlaneSolution,
    profiles: Vec<Complex64>,
    derivatives: Option<Vec<Complex64>>,
}

impl Row<'_> {
    pub fn v(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for ((phi, m), prof) in self
            .sol
            .coeffs
            .iter()
            .zip(&self.sol.freqs)
            .zip(&self.profiles)
        {
            let osc = Complex64::new(0.0, m * x).exp();
            acc += 2.0 * (phi * prof * osc).re;
        }
        acc * (self.sol.alpha * x).exp()
    }

    pub fn vx(&self, x: f64) -> f64 {
        let mut w = 0.0;
        let mut wx = 0.0;
        for ((phi, m), prof) in self
            .sol
            .coeffs
            .iter()
            .zip(&self.sol.freqs)
            .zip(&self.profiles)
        {
            let osc = Complex64::new(0.0, m * x).exp();
            let term = phi * prof * osc;
            w += 2.0 * term.re;
            wx += 2.0 * (Complex64::new(0.0, *m) * term).re;
        }
        (self.sol.alpha * x).exp() * (self.sol.alpha * w + wx)
    }

    pub fn vy(&self, x: f64) -> f64 {
        let d = self
            .derivatives
            .as_ref()
            .expect("row built without derivatives");
        let mut acc = 0.0;
        for ((phi, m), dprof) in self.sol.coeffs.iter().zip(&self.sol.freqs).zip(d) {
            let osc = Complex64::new(0.0, m * x).exp();
            acc += 2.0 * (phi * dprof * osc).re;
        }
        acc * (self.sol.alpha * x).exp()
    }
}

/// Builds the truncated series solution from a combined boundary trace.
///
/// All frequencies up to the truncation are checked non-resonant; the
/// coefficients come from the weighted Fourier transform of the combination.
pub fn assemble(
    combo: &TraceCombination,
    alpha: f64,
    mu: f64,
    omega: f64,
    kind: FreqKind,
    opts: &AssembleOptions,
) -> Result<HalfPlaneSolution, HalfPlaneError> {
    let j01 = bessel_j_first_zero(0.0)?;
    let bound = (j01 + 1.0).powi(2);
    if !opts.waive_mu_bound && mu >= bound {
        return Err(HalfPlaneError::MuBound { mu, bound });
    }

    // Coefficients computed outward until the tail test decides the cut.
    let hard_cap = 72usize;
    let head = 24usize.min(hard_cap);
    let mut phis: Vec<Complex64> = (1..=head)
        .map(|j| compat::fourier_mode(combo, alpha, kind.freq(j)))
        .collect();
    let scale: f64 = phis.iter().map(|p| p.norm()).sum::<f64>().max(1e-300);

    if kind == FreqKind::Integer {
        let mean = compat::fourier_mode(combo, alpha, 0.0).norm();
        if mean > 1e-7 * scale {
            return Err(HalfPlaneError::NonzeroMean(mean / scale));
        }
    }

    let n_index = phis
        .iter()
        .position(|p| p.norm() > 1e-8 * scale)
        .map(|i| i + 1)
        .unwrap_or(1);
    let n_freq = kind.freq(n_index);

    let truncation = match opts.truncation {
        Some(n) => {
            while phis.len() < n.min(hard_cap) {
                let j = phis.len() + 1;
                phis.push(compat::fourier_mode(combo, alpha, kind.freq(j)));
            }
            n
        }
        None => {
            let mut t = None;
            for j in (n_index + 8)..=hard_cap {
                while phis.len() < j {
                    let jj = phis.len() + 1;
                    phis.push(compat::fourier_mode(combo, alpha, kind.freq(jj)));
                }
                if phis[j - 1].norm() < opts.tail_tol * scale {
                    t = Some(j);
                    break;
                }
            }
            t.ok_or(HalfPlaneError::TruncationTooSmall {
                index: hard_cap,
                tail: phis.last().unwrap().norm() / scale,
                tol: opts.tail_tol,
            })?
        }
    };

    // Every frequency up to the truncation must be non-resonant.
    let mut freqs = Vec::new();
    let mut coeffs = Vec::new();
    let mut modes = Vec::new();
    for j in 1..=truncation {
        let m = kind.freq(j);
        let mode = match Mode::with_frequency(m, alpha, mu, omega, opts.resonance_tol, &opts.series)
        {
            Ok(mode) => mode,
            Err(ModeError::Resonant { freq, .. }) => {
                return Err(HalfPlaneError::ResonantMode(freq))
            }
            Err(e) => return Err(e.into()),
        };
        let phi = phis[j - 1];
        if phi.norm() > 1e-14 * scale {
            freqs.push(m);
            coeffs.push(phi);
            modes.push(mode);
        }
    }

    // Tail control at the cut: coefficient times the profile sup norm.
    if let Some(n_explicit) = opts.truncation {
        let m = kind.freq(n_explicit);
        let phi_tail = compat::fourier_mode(combo, alpha, m).norm();
        let sup = profile_sup(&Mode::with_frequency(
            m,
            alpha,
            mu,
            omega,
            opts.resonance_tol,
            &opts.series,
        )?)?;
        if phi_tail * sup > opts.tail_tol * scale {
            return Err(HalfPlaneError::TruncationTooSmall {
                index: n_explicit,
                tail: phi_tail * sup / scale,
                tol: opts.tail_tol,
            });
        }
    }

    Ok(HalfPlaneSolution {
        alpha,
        mu,
        omega,
        n_freq,
        kind,
        freqs,
        coeffs,
        modes,
        coeff_scale: scale,
    })
}

fn profile_sup(mode: &Mode) -> Result<f64, SpecFunError> {
    let mut sup = 0.0f64;
    for i in 0..=64 {
        sup = sup.max(mode.eval(i as f64 * 0.1)?.norm());
    }
    Ok(sup)
}

/// One traced zero-level curve, stored with y strictly increasing.
#[derive(Debug, Clone)]
pub struct NodalCurve {
    pub points: Vec<(f64, f64)>,
    /// Asymptote αy + n x = beta + π·index.
    pub beta: f64,
    pub index: i32,
    /// Fitted dx/dy on the top quarter (tends to -α/n).
    pub slope: f64,
}

impl NodalCurve {
    /// x-position at height y: interpolated on the stored polyline, extended
    /// by the asymptote above and by the last segment's direction below.
    pub fn x_at(&self, y: f64, alpha: f64, n_freq: f64) -> f64 {
        let pts = &self.points;
        if y >= pts[pts.len() - 1].1 {
            return (self.beta + std::f64::consts::PI * self.index as f64 - alpha * y) / n_freq;
        }
        if y <= pts[0].1 {
            let (x0, y0) = pts[0];
            let (x1, y1) = pts[1];
            return x0 + (y - y0) * (x1 - x0) / (y1 - y0);
        }
        let mut lo = 0;
        let mut hi = pts.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if pts[mid].1 <= y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (x0, y0) = pts[lo];
        let (x1, y1) = pts[hi];
        x0 + (y - y0) * (x1 - x0) / (y1 - y0)
    }
}

/// Traces the nodal curves from y_max down to y_min.
///
/// The zeros at the top level are transversal (the solution is dominated by
/// its first active harmonic up there); each is continued downward by an
/// explicit Euler predictor on dx/dy = -v_y/v_x and a Newton corrector in x,
/// with the y-step bisected on corrector failure.
pub fn trace_nodal_curves(
    sol: &HalfPlaneSolution,
    y_min: f64,
    y_max: f64,
) -> Result<Vec<NodalCurve>, HalfPlaneError> {
    assert!(y_min > 0.0 && y_max > y_min);
    let expected = sol.zeros_per_period();
    let two_pi = 2.0 * std::f64::consts::PI;

    // top-level zeros
    let row = sol.row(y_max)?;
    let samples = 2048;
    let vals: Vec<f64> = (0..=samples)
        .map(|i| row.v(two_pi * i as f64 / samples as f64))
        .collect();
    let mut tops = Vec::new();
    for i in 0..samples {
        if vals[i] == 0.0 {
            tops.push(two_pi * i as f64 / samples as f64);
        } else if vals[i] * vals[i + 1] < 0.0 {
            let mut a = two_pi * i as f64 / samples as f64;
            let mut b = two_pi * (i + 1) as f64 / samples as f64;
            let mut fa = vals[i];
            for _ in 0..80 {
                let m = 0.5 * (a + b);
                let fm = row.v(m);
                if fa * fm <= 0.0 {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            tops.push(0.5 * (a + b));
        }
    }
    if tops.len() != expected {
        return Err(HalfPlaneError::UnexpectedZeroCount {
            expected,
            got: tops.len(),
        });
    }

    let mut curves = Vec::with_capacity(expected);
    for &x_top in &tops {
        curves.push(trace_single(sol, x_top, y_min, y_max)?);
    }

    // asymptote bookkeeping relative to the first curve
    let n = sol.n_freq;
    let means: Vec<f64> = curves
        .iter()
        .map(|c| {
            let span = y_max - y_min;
            let cut = y_max - 0.25 * span;
            let sel: Vec<&(f64, f64)> = c.points.iter().filter(|p| p.1 >= cut).collect();
            sel.iter().map(|(x, y)| sol.alpha * y + n * x).sum::<f64>() / sel.len() as f64
        })
        .collect();
    let beta = means[0];
    for (curve, &mean) in curves.iter_mut().zip(&means) {
        curve.index = ((mean - beta) / std::f64::consts::PI).round() as i32;
        curve.beta = beta;
    }
    Ok(curves)
}

fn trace_single(
    sol: &HalfPlaneSolution,
    x_top: f64,
    y_min: f64,
    y_max: f64,
) -> Result<NodalCurve, HalfPlaneError> {
    let max_dy: f64 = 1e-2;
    let mut pts: Vec<(f64, f64)> = vec![(x_top, y_max)];
    let mut x = x_top;
    let mut y = y_max;
    let mut dy = max_dy;
    while y > y_min {
        let step = dy.min(y - y_min);
        let row = sol.row_with_derivatives(y)?;
        let vx = row.vx(x);
        let vy = row.vy(x);
        if vx == 0.0 {
            return Err(HalfPlaneError::CurveLost {
                x,
                y,
                detail: "tangent vertical to the period direction".into(),
            });
        }
        let predictor = x + (vy / vx) * step; // dx/dy = -v_y/v_x, moving down
        let y_next = y - step;
        match newton_in_x(sol, predictor, y_next) {
            Ok(x_next) => {
                // guard against jumping to the neighboring curve
                if (x_next - x).abs() > 0.45 * std::f64::consts::PI / sol.n_freq {
                    if shrink(&mut dy, x, y)? {
                        continue;
                    }
                }
                x = x_next;
                y = y_next;
                pts.push((x, y));
                dy = (dy * 1.6).min(max_dy);
            }
            Err(_) => {
                if shrink(&mut dy, x, y)? {
                    continue;
                }
            }
        }
    }
    pts.reverse();

    // slope fit on the top quarter
    let span = y_max - y_min;
    let cut = y_max - 0.25 * span;
    let sel: Vec<(f64, f64)> = pts.iter().filter(|p| p.1 >= cut).cloned().collect();
    let slope = least_squares_slope(&sel);

    Ok(NodalCurve {
        points: pts,
        beta: 0.0,
        index: 0,
        slope,
    })
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    // slope of x against y
    let n = points.len() as f64;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in points {
        num += (y - my) * (x - mx);
        den += (y - my) * (y - my);
    }
    num / den.max(1e-300)
}

fn shrink(dy: &mut f64, x: f64, y: f64) -> Result<bool, HalfPlaneError> {
    *dy *= 0.5;
    if *dy < 1e-2 / (1 << 20) as f64 {
        return Err(HalfPlaneError::CurveLost {
            x,
            y,
            detail: "step bisected 20 times without corrector convergence".into(),
        });
    }
    Ok(true)
}

fn newton_in_x(sol: &HalfPlaneSolution, x0: f64, y: f64) -> Result<f64, HalfPlaneError> {
    let row = sol.row_with_derivatives(y)?;
    let tol_scale = sol.coeff_scale;
    let mut x = x0;
    for _ in 0..12 {
        let v = row.v(x);
        let vx = row.vx(x);
        if vx == 0.0 {
            break;
        }
        let step = v / vx;
        x -= step;
        if step.abs() < 1e-13 {
            let env = envelope_at(sol, &row, x, y);
            if v.abs() <= 1e-9 * env.max(1e-12 * tol_scale) {
                return Ok(x);
            }
        }
    }
    let v = row.v(x);
    let env = envelope_at(sol, &row, x, y);
    if v.abs() <= 1e-9 * env.max(1e-12 * tol_scale) {
        Ok(x)
    } else {
        Err(HalfPlaneError::CurveLost {
            x,
            y,
            detail: format!("corrector residual {:.3e}", v.abs() / env.max(1e-300)),
        })
    }
}

fn envelope_at(sol: &HalfPlaneSolution, row: &Row<'_>, x: f64, y: f64) -> f64 {
    let _ = y;
    let mut acc = 0.0;
    for (phi, prof) in sol.coeffs.iter().zip(&row.profiles) {
        acc += 2.0 * phi.norm() * prof.norm();
    }
    acc * (sol.alpha * x).exp()
}

/// Max scaled PDE residual of an arbitrary field, by plain pointwise central
/// differences. Suitable for single-mode fields where evaluation is cheap.
pub fn field_pde_residual<F: Fn(f64, f64) -> f64>(
    field: F,
    omega: f64,
    mu: f64,
    x_range: (f64, f64),
    y_range: (f64, f64),
    h: f64,
) -> f64 {
    let nx = ((x_range.1 - x_range.0) / h).round() as usize;
    let ny = ((y_range.1 - y_range.0) / h).round() as usize;
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for j in 1..ny {
        let y = y_range.0 + j as f64 * h;
        let w = (-2.0 * y).exp();
        for i in 1..nx {
            let x = x_range.0 + i as f64 * h;
            let c = field(x, y);
            let lap = (field(x + h, y) - 2.0 * c + field(x - h, y)) / (h * h)
                + (field(x, y + h) - 2.0 * c + field(x, y - h)) / (h * h);
            let vx = (field(x + h, y) - field(x - h, y)) / (2.0 * h);
            let res = -lap + omega * w * vx - mu * w * c;
            worst = worst.max(res.abs());
            scale = scale.max(lap.abs()).max((omega * w * vx).abs()).max((mu * w * c).abs());
        }
    }
    worst / scale.max(1e-300)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compat::{
        compat_solve, cyclic_matrix, setup_of, ArcShape, BoundaryTraces,
    };
    use std::f64::consts::PI;

    /// Symmetric K = 4 problem with α = 1: all ratios e^{π/2}.
    fn k4_alpha1() -> (crate::compat::CompetitionSetup, BoundaryTraces) {
        let ratios = vec![(PI / 2.0).exp(); 4];
        let setup = setup_of(cyclic_matrix(4, &ratios)).unwrap();
        let traces = BoundaryTraces::symmetric(4, ArcShape::Bump);
        (setup, traces)
    }

    fn assemble_k4(mu: f64, omega: f64) -> HalfPlaneSolution {
        let (setup, traces) = k4_alpha1();
        let res = compat_solve(&setup, &traces).unwrap();
        let combo = res.combination(&traces);
        assemble(
            &combo,
            setup.alpha,
            mu,
            omega,
            FreqKind::Integer,
            &AssembleOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn single_harmonic_closed_form() {
        // Only φ_{±1} active, α = μ = ω = 0: v = 2 Re(φ_1 e^{ix}) e^{-y}.
        let traces = BoundaryTraces::new(
            vec![0.0, PI, 2.0 * PI],
            vec![
                crate::compat::Arc { shape: ArcShape::Sine, amplitude: 1.0 },
                crate::compat::Arc { shape: ArcShape::Sine, amplitude: -1.0 },
            ],
        )
        .unwrap();
        let combo = TraceCombination { traces, c: vec![1.0, 1.0] }; // Φ = sin x
        let sol = assemble(
            &combo,
            0.0,
            0.0,
            0.0,
            FreqKind::Integer,
            &AssembleOptions::default(),
        )
        .unwrap();
        assert!((sol.n_freq - 1.0).abs() < 1e-12);
        for (x, y) in [(0.3, 0.5), (2.0, 1.5), (5.5, 0.1)] {
            let v = sol.eval_v(x, y).unwrap();
            let exact = x.sin() * (-y as f64).exp();
            assert!((v - exact).abs() < 1e-9, "v({x},{y}) = {v} vs {exact}");
        }
    }

    #[test]
    fn first_active_index_is_half_the_arc_count() {
        let sol = assemble_k4(0.0, 0.0);
        assert!((sol.n_freq - 2.0).abs() < 1e-12);
        // symmetric config: only frequencies ≡ 2 (mod 4) are active
        for m in sol.active_frequencies() {
            let r = (*m as i64) % 4;
            assert!(r == 2 || r == -2, "active frequency {m}");
        }
    }

    #[test]
    fn boundary_trace_is_reproduced() {
        let (setup, traces) = k4_alpha1();
        let res = compat_solve(&setup, &traces).unwrap();
        let combo = res.combination(&traces);
        let sol = assemble(
            &combo,
            setup.alpha,
            0.0,
            0.0,
            FreqKind::Integer,
            &AssembleOptions::default(),
        )
        .unwrap();
        let sup = combo.sup_norm(512);
        for i in 0..64 {
            let x = 2.0 * PI * i as f64 / 64.0;
            let v = sol.eval_v(x, 0.0).unwrap();
            let phi = combo.eval(x);
            assert!(
                (v - phi).abs() < 1e-6 * sup,
                "x = {x}: v = {v}, Φ = {phi}"
            );
        }
    }

    #[test]
    fn pseudo_periodicity() {
        use rand::{Rng, SeedableRng};
        let sol = assemble_k4(1.0, 2.0);
        let sigma = sol.sigma();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let x = rng.gen_range(0.0..2.0 * PI);
            let y = rng.gen_range(0.05..4.0);
            let a = sol.eval_v(x + 2.0 * PI, y).unwrap();
            let b = sigma * sol.eval_v(x, y).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-6));
        }
    }

    #[test]
    fn decay_rate_matches_first_harmonic() {
        let sol = assemble_k4(0.0, 0.0);
        // amplitude ratio across Δy = 1 approaches e^{-n}
        let a: f64 = (0..256)
            .map(|i| sol.eval_v(2.0 * PI * i as f64 / 256.0, 3.0).unwrap().abs())
            .fold(0.0, f64::max);
        let b: f64 = (0..256)
            .map(|i| sol.eval_v(2.0 * PI * i as f64 / 256.0, 4.0).unwrap().abs())
            .fold(0.0, f64::max);
        let ratio = b / a;
        let expected = (-sol.n_freq).exp();
        assert!(
            (ratio - expected).abs() < 0.05 * expected,
            "ratio {ratio} vs {expected}"
        );
    }

    #[test]
    fn truncation_self_convergence() {
        let (setup, traces) = k4_alpha1();
        let res = compat_solve(&setup, &traces).unwrap();
        let combo = res.combination(&traces);
        let coarse = assemble(
            &combo,
            setup.alpha,
            0.0,
            0.0,
            FreqKind::Integer,
            &AssembleOptions { truncation: Some(14), ..Default::default() },
        )
        .unwrap();
        let fine = assemble(
            &combo,
            setup.alpha,
            0.0,
            0.0,
            FreqKind::Integer,
            &AssembleOptions { truncation: Some(28), ..Default::default() },
        )
        .unwrap();
        let mut worst = 0.0f64;
        for i in 0..48 {
            for j in 1..=10 {
                let x = 2.0 * PI * i as f64 / 48.0;
                let y = 0.1 + 0.49 * j as f64;
                let d = (coarse.eval_v(x, y).unwrap() - fine.eval_v(x, y).unwrap()).abs();
                worst = worst.max(d);
            }
        }
        assert!(worst < 1e-8, "truncation drift {worst:e}");
    }

    #[test]
    fn resonant_mode_is_reported() {
        let (setup, traces) = k4_alpha1();
        let res = compat_solve(&setup, &traces).unwrap();
        let combo = res.combination(&traces);
        // μ = j_{2,1}² resonates the first active frequency m = 2 at ω = 0,
        // α = 0 — use a symmetric (α = 0) variant.
        let setup0 = setup_of(cyclic_matrix(4, &[1.0; 4])).unwrap();
        let _ = setup0;
        let j21 = crate::specfun::bessel_j_first_zero(2.0).unwrap();
        let err = assemble(
            &combo,
            0.0,
            j21 * j21,
            0.0,
            FreqKind::Integer,
            &AssembleOptions { waive_mu_bound: true, ..Default::default() },
        )
        .unwrap_err();
        match err {
            HalfPlaneError::ResonantMode(m) => assert!((m - 2.0).abs() < 1e-12),
            other => panic!("expected resonance, got {other}"),
        }
    }

    #[test]
    fn mu_bound_enforced_without_waiver() {
        let (setup, traces) = k4_alpha1();
        let res = compat_solve(&setup, &traces).unwrap();
        let combo = res.combination(&traces);
        let err = assemble(
            &combo,
            setup.alpha,
            12.0,
            0.0,
            FreqKind::Integer,
            &AssembleOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, HalfPlaneError::MuBound { .. }));
    }

    #[test]
    fn pde_residual_small_and_second_order() {
        let sol = assemble_k4(0.0, 3.0);
        let r1 = sol.pde_residual((0.0, 2.0 * PI), (0.2, 3.0), 5e-3).unwrap();
        assert!(r1 < 1e-3, "residual {r1:e}");
        let r2 = sol.pde_residual((0.0, 2.0 * PI), (0.2, 3.0), 1e-2).unwrap();
        let ratio = r2 / r1;
        assert!((2.5..6.5).contains(&ratio), "order ratio {ratio}");
    }

    #[test]
    fn nodal_curves_structure() {
        let sol = assemble_k4(0.0, 0.0);
        let curves = trace_nodal_curves(&sol, 0.05, 8.0).unwrap();
        assert_eq!(curves.len(), 4);
        // slope tends to -α/n
        let target = -sol.alpha / sol.n_freq;
        for c in &curves {
            assert!(
                (c.slope - target).abs() <= 0.01 * target.abs(),
                "slope {} vs {target}",
                c.slope
            );
            // y strictly increasing
            assert!(c.points.windows(2).all(|w| w[1].1 > w[0].1));
        }
        // evenly spaced indices and non-crossing ordering
        let idx: Vec<i32> = curves.iter().map(|c| c.index).collect();
        assert_eq!(idx, vec![0, 1, 2, 3]);
        for y in [0.1, 0.5, 1.0, 3.0, 6.0] {
            let xs: Vec<f64> = curves
                .iter()
                .map(|c| c.x_at(y, sol.alpha, sol.n_freq))
                .collect();
            for w in xs.windows(2) {
                assert!(w[1] > w[0], "crossing at y = {y}: {xs:?}");
            }
        }
        // consecutive gaps tend to π/n at the top
        let xs: Vec<f64> = curves
            .iter()
            .map(|c| c.x_at(7.5, sol.alpha, sol.n_freq))
            .collect();
        for w in xs.windows(2) {
            let gap = w[1] - w[0];
            assert!((gap - PI / sol.n_freq).abs() < 0.02, "gap {gap}");
        }
    }

    #[test]
    fn sign_change_count_is_constant() {
        let sol = assemble_k4(0.0, 3.0);
        for y in [0.02, 0.1, 0.7, 2.0, 5.0, 8.0] {
            let c = sol.count_sign_changes(y, 4096).unwrap();
            assert_eq!(c, 4, "y = {y}");
        }
    }

    #[test]
    fn pure_mode_sign_changes() {
        // single harmonic k: 2k changes at every height
        let traces = BoundaryTraces::new(
            vec![0.0, PI, 2.0 * PI],
            vec![
                crate::compat::Arc { shape: ArcShape::Sine, amplitude: 1.0 },
                crate::compat::Arc { shape: ArcShape::Sine, amplitude: -1.0 },
            ],
        )
        .unwrap();
        let combo = TraceCombination { traces, c: vec![1.0, 1.0] };
        let sol = assemble(
            &combo,
            0.0,
            0.0,
            0.0,
            FreqKind::Integer,
            &AssembleOptions::default(),
        )
        .unwrap();
        for y in [0.5, 2.0, 6.0] {
            assert_eq!(sol.count_sign_changes(y, 4096).unwrap(), 2);
        }
        let curves = trace_nodal_curves(&sol, 0.1, 6.0).unwrap();
        assert_eq!(curves.len(), 2);
        // vertical lines spaced π/k
        for c in &curves {
            assert!(c.slope.abs() < 1e-9);
            let spread = c
                .points
                .iter()
                .map(|p| p.0)
                .fold((f64::MAX, f64::MIN), |(lo, hi), x| (lo.min(x), hi.max(x)));
            assert!(spread.1 - spread.0 < 1e-8);
        }
        let gap = curves[1].points[0].0 - curves[0].points[0].0;
        assert!((gap - PI).abs() < 1e-8);
    }

    #[test]
    fn odd_cover_assembly_has_odd_count() {
        // K = 3 ratios-10 problem: half-odd frequencies, 3 sign changes.
        let setup = setup_of(cyclic_matrix(3, &[10.0, 10.0, 10.0])).unwrap();
        let traces = BoundaryTraces::symmetric(3, ArcShape::Bump);
        let (setup2, traces2) = crate::compat::double_cover(&setup, &traces);
        let res2 = compat_solve(&setup2, &traces2).unwrap();
        let folded = crate::compat::fold_sbar(&res2, 3).unwrap();
        let c: Vec<f64> = folded
            .iter()
            .zip(&setup.l)
            .enumerate()
            .map(|(m, (s, l))| if m % 2 == 0 { s / l } else { -s / l })
            .collect();
        let combo = TraceCombination { traces, c };
        let sol = assemble(
            &combo,
            setup.alpha,
            0.0,
            3.0,
            FreqKind::HalfOdd,
            &AssembleOptions::default(),
        )
        .unwrap();
        assert!((sol.n_freq - 1.5).abs() < 1e-12);
        assert!(sol.sigma() < 0.0);
        for y in [0.05, 0.5, 2.0, 5.0] {
            assert_eq!(sol.count_sign_changes(y, 4096).unwrap(), 3, "y = {y}");
        }
        let r = sol.pde_residual((0.0, 2.0 * PI), (0.3, 2.5), 5e-3).unwrap();
        assert!(r < 1e-3, "residual {r:e}");
    }
}
