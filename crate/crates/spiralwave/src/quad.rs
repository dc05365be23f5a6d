//! Gauss-Legendre quadrature with adaptive panel splitting.
//!
//! Nodes are generated at runtime by Newton iteration on the Legendre
//! recurrence, which avoids hard-coded tables and gives full f64 accuracy.

use num_complex::Complex64;
use std::sync::OnceLock;

/// Legendre polynomial value and derivative at `x` for degree `n`.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0f64;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    // derivative from the standard identity (1-x^2) P_n' = n (P_{n-1} - x P_n)
    let dp = n as f64 * (p0 - x * p1) / (1.0 - x * x);
    (p1, dp)
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Tricomi initial guess, then Newton.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..64 {
            let (p, dp) = legendre_pair(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_pair(n, x);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    CACHE.get_or_init(|| gauss_legendre(16))
}

fn gl32() -> &'static (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    CACHE.get_or_init(|| gauss_legendre(32))
}

/// Fixed 16-point rule on [a, b] for a complex-valued integrand.
pub fn gl16_panel<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> Complex64 {
    let (nodes, weights) = gl16();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in nodes.iter().zip(weights) {
        acc += f(mid + half * x) * *w;
    }
    acc * half
}

/// Fixed 32-point rule on [a, b] for a real integrand.
pub fn gl32_panel_real<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = gl32();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        acc += f(mid + half * x) * *w;
    }
    acc * half
}

/// Adaptive Gauss-Legendre integration of a complex integrand on [a, b].
///
/// Panels are split until the 16-point value of the whole panel agrees with
/// the sum over its halves to `rel_tol` relative; `abs_floor` is an absolute
/// accuracy target that stops refinement of integrals which are tiny by
/// cancellation (set it to the scale the result will be compared against).
pub fn adaptive_complex<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_floor: f64,
) -> Complex64 {
    fn recurse<F: FnMut(f64) -> Complex64>(
        f: &mut F,
        a: f64,
        b: f64,
        whole: Complex64,
        tol: f64,
        depth: usize,
    ) -> Complex64 {
        let mid = 0.5 * (a + b);
        let left = gl16_panel(f, a, mid);
        let right = gl16_panel(f, mid, b);
        let refined = left + right;
        if depth == 0 || (refined - whole).norm() <= tol {
            return refined;
        }
        recurse(f, a, mid, left, 0.5 * tol, depth - 1)
            + recurse(f, mid, b, right, 0.5 * tol, depth - 1)
    }
    let whole = gl16_panel(&mut f, a, b);
    let tol = (rel_tol * whole.norm()).max(abs_floor);
    recurse(&mut f, a, b, whole, tol.max(1e-300), 24)
}

/// Adaptive integration of a real integrand on [a, b].
pub fn adaptive_real<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_floor: f64) -> f64 {
    let mut g = f;
    adaptive_complex(|x| Complex64::new(g(x), 0.0), a, b, rel_tol, abs_floor).re
}

/// Integrate over a list of subintervals (splitting at known kinks) and sum.
pub fn adaptive_complex_split<F: FnMut(f64) -> Complex64>(
    mut f: F,
    breakpoints: &[f64],
    rel_tol: f64,
    abs_floor: f64,
) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for pair in breakpoints.windows(2) {
        if pair[1] > pair[0] {
            acc += adaptive_complex(&mut f, pair[0], pair[1], rel_tol, abs_floor);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn nodes_integrate_polynomials_exactly() {
        // 16-point rule is exact through degree 31.
        let exact = 2.0 / 21.0; // \int_{-1}^1 x^20 dx
        let got = gl16_panel(&mut |x: f64| Complex64::new(x.powi(20), 0.0), -1.0, 1.0);
        assert!((got.re - exact).abs() < 1e-14, "got {got}");
    }

    #[test]
    fn adaptive_handles_oscillatory_integrand() {
        // \int_0^{2pi} e^{-ix} sin x dx = -i pi
        let got = adaptive_complex(
            |x| Complex64::new(0.0, -x).exp() * x.sin(),
            0.0,
            2.0 * PI,
            1e-12,
            0.0,
        );
        assert!((got - Complex64::new(0.0, -PI)).norm() < 1e-11, "got {got}");
    }

    #[test]
    fn split_integration_matches_single_interval() {
        let f = |x: f64| Complex64::new((3.0 * x).cos(), x);
        let whole = adaptive_complex(f, 0.0, 5.0, 1e-12, 0.0);
        let split = adaptive_complex_split(f, &[0.0, 1.3, 2.0, 5.0], 1e-12, 0.0);
        assert!((whole - split).norm() < 1e-10);
    }
}
