//! Complex log-gamma for the Mellin–Barnes integrand.
//!
//! Only `exp` of the result is ever used, so the imaginary part is returned
//! modulo 2π without tracking the principal branch.

use num_complex::Complex64;
use std::f64::consts::PI;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const SHIFT: f64 = 10.0;

const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

fn stirling(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut corr = Complex64::new(0.0, 0.0);
    for &c in STIRLING.iter().rev() {
        corr = corr * inv2 + c;
    }
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + corr * inv
}

/// ln sin(πz), stable for large |Im z|.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let y = z.im;
    if y.abs() < 5.0 {
        return (z * PI).sin().ln();
    }
    if y < 0.0 {
        return ln_sin_pi(z.conj()).conj();
    }
    // sin w = (i/2) e^{-iw} (1 - e^{2iw}), |e^{2iw}| = e^{-2πy}
    let w = z * PI;
    let i = Complex64::i();
    let tail = (Complex64::new(1.0, 0.0) - (i * w * 2.0).exp()).ln();
    Complex64::new(-std::f64::consts::LN_2, PI / 2.0) - i * w + tail
}

/// ln Γ(z) for complex z away from the poles.
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Γ(z) Γ(1-z) = π / sin(πz)
        return Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma_complex(Complex64::new(1.0, 0.0) - z);
    }
    let mut w = z;
    let mut acc = Complex64::new(0.0, 0.0);
    while w.re < SHIFT && w.norm() < 2.0 * SHIFT {
        acc += w.ln();
        w += 1.0;
    }
    stirling(w) - acc
}
