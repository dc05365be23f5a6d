//! Complex zeros of Θ_ν in a rectangle: winding-number boxes, then Newton.

use super::theta::{theta, theta_derivative};
use super::{SeriesConfig, SpecFunError};
use num_complex::Complex64;

/// Axis-aligned search rectangle in the complex plane.
#[derive(Debug, Clone, Copy)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Self {
            re_min,
            re_max,
            im_min,
            im_max,
        }
    }

    fn contains(&self, z: Complex64, margin: f64) -> bool {
        z.re >= self.re_min - margin
            && z.re <= self.re_max + margin
            && z.im >= self.im_min - margin
            && z.im <= self.im_max + margin
    }
}

/// Outcome of a zero search: polished zeros sorted by modulus, plus any
/// candidates dropped because Newton failed on them.
#[derive(Debug, Clone)]
pub struct ZeroScan {
    pub zeros: Vec<Complex64>,
    pub dropped: Vec<(Complex64, String)>,
}

/// All zeros of Θ_ν inside `region`.
///
/// Pass 1 evaluates Θ on a lattice of spacing `grid_step / 2` and flags every
/// `grid_step` cell whose boundary (8 lattice points) carries a non-trivial
/// winding of arg Θ. Pass 2 polishes each flagged cell center by complex
/// Newton until the residual falls below `1e-10` times the lattice maximum of
/// |Θ|, then deduplicates and discards polish escapes.
pub fn theta_zeros(
    nu: Complex64,
    region: Rect,
    grid_step: f64,
    cfg: &SeriesConfig,
) -> Result<ZeroScan, SpecFunError> {
    let nx = (((region.re_max - region.re_min) / grid_step).ceil() as usize).max(1);
    let ny = (((region.im_max - region.im_min) / grid_step).ceil() as usize).max(1);
    let hx = (region.re_max - region.re_min) / nx as f64;
    let hy = (region.im_max - region.im_min) / ny as f64;

    // Half-step lattice shared by all cell boundaries.
    let cols = 2 * nx + 1;
    let rows = 2 * ny + 1;
    let mut values = vec![Complex64::new(0.0, 0.0); cols * rows];
    let mut sup = 0.0f64;
    for j in 0..rows {
        for i in 0..cols {
            let z = Complex64::new(
                region.re_min + 0.5 * hx * i as f64,
                region.im_min + 0.5 * hy * j as f64,
            );
            let v = theta(nu, z, cfg)?;
            sup = sup.max(v.norm());
            values[j * cols + i] = v;
        }
    }
    let residual_tol = 1e-10 * sup;

    let mut candidates = Vec::new();
    for cy in 0..ny {
        for cx in 0..nx {
            // 8 boundary lattice points of the cell, counterclockwise.
            let (i0, j0) = (2 * cx, 2 * cy);
            let loop_idx = [
                (i0, j0),
                (i0 + 1, j0),
                (i0 + 2, j0),
                (i0 + 2, j0 + 1),
                (i0 + 2, j0 + 2),
                (i0 + 1, j0 + 2),
                (i0, j0 + 2),
                (i0, j0 + 1),
            ];
            let mut winding = 0.0;
            let mut degenerate = false;
            for p in 0..8 {
                let a = values[loop_idx[p].1 * cols + loop_idx[p].0];
                let b = values[loop_idx[(p + 1) % 8].1 * cols + loop_idx[(p + 1) % 8].0];
                if a.norm() == 0.0 || b.norm() == 0.0 {
                    degenerate = true;
                    break;
                }
                winding += (b / a).arg();
            }
            if degenerate || winding.abs() > std::f64::consts::PI {
                candidates.push(Complex64::new(
                    region.re_min + hx * (cx as f64 + 0.5),
                    region.im_min + hy * (cy as f64 + 0.5),
                ));
            }
        }
    }

    let mut zeros: Vec<Complex64> = Vec::new();
    let mut dropped = Vec::new();
    let span = hx.max(hy);
    'candidates: for start in candidates {
        match newton_polish(nu, start, residual_tol, span, &region, cfg) {
            Ok(z) => {
                if !region.contains(z, 1e-9 * (1.0 + z.norm())) {
                    continue; // converged to a zero outside the requested box
                }
                if z.norm() <= 1e-9 * (1.0 + sup) {
                    continue; // the origin is excluded by convention
                }
                for seen in &zeros {
                    if (z - seen).norm() < 0.25 * span {
                        continue 'candidates;
                    }
                }
                zeros.push(z);
            }
            Err(msg) => dropped.push((start, msg)),
        }
    }
    zeros.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
    Ok(ZeroScan { zeros, dropped })
}

fn newton_polish(
    nu: Complex64,
    start: Complex64,
    residual_tol: f64,
    span: f64,
    region: &Rect,
    cfg: &SeriesConfig,
) -> Result<Complex64, String> {
    let mut z = start;
    for _ in 0..60 {
        let f = theta(nu, z, cfg).map_err(|e| e.to_string())?;
        if f.norm() <= residual_tol {
            // Confirm at a doubled budget before accepting.
            let strict = theta(nu, z, &cfg.doubled()).map_err(|e| e.to_string())?;
            if strict.norm() <= 10.0 * residual_tol {
                return Ok(z);
            }
        }
        let df = theta_derivative(nu, z, cfg).map_err(|e| e.to_string())?;
        if df.norm() == 0.0 {
            return Err("vanishing derivative".into());
        }
        let step = f / df;
        z -= step;
        if !region.contains(z, 4.0 * span) {
            return Err(format!("escaped region near {z}"));
        }
        if step.norm() < 1e-15 * (1.0 + z.norm()) {
            let f = theta(nu, z, cfg).map_err(|e| e.to_string())?;
            if f.norm() <= residual_tol {
                return Ok(z);
            }
            return Err(format!("stalled with residual {:e}", f.norm()));
        }
    }
    Err("newton iteration limit".into())
}
