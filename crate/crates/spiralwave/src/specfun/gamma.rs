//! Reciprocal gamma function on the complex plane.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Lanczos coefficients (g = 7, 9 terms).
const LANCZOS_G: f64 = 7.0;
const LANCZOS_C: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma via Lanczos, valid for Re(w) > 0.5.
fn lanczos_gamma(w: Complex64) -> Complex64 {
    let z = w - 1.0;
    let mut acc = Complex64::new(LANCZOS_C[0], 0.0);
    for (i, c) in LANCZOS_C.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * acc
}

/// 1/Γ(w), entire in `w`.
///
/// Non-positive integers are poles of Γ, so the reciprocal is exactly zero
/// there; arguments within 1e-12 of such a point are snapped to the pole.
pub fn reciprocal_gamma(w: Complex64) -> Complex64 {
    let nearest = w.re.round();
    if nearest <= 0.0 && (w.re - nearest).abs() < 1e-12 && w.im.abs() < 1e-12 {
        return Complex64::new(0.0, 0.0);
    }
    if w.re >= 0.5 {
        1.0 / lanczos_gamma(w)
    } else {
        // Reflection: 1/Γ(w) = sin(πw) Γ(1-w) / π, with Re(1-w) > 0.5.
        (PI * w).sin() * lanczos_gamma(1.0 - w) / PI
    }
}
