//! Gamma, log-gamma, reciprocal gamma and beta for real arguments.
//!
//! `ln Γ` uses the Stirling series once the argument has been shifted to
//! x ≥ 10 by the recurrence Γ(x+1) = xΓ(x). Negative arguments go through
//! the reflection formula with an exactly reduced `sin(πx)`.

use super::SpecialError;
use std::f64::consts::PI;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const STIRLING_SHIFT: f64 = 10.0;

// B_{2k} / (2k (2k-1)) for k = 1..=8
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

fn stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    for c in STIRLING.iter().rev() {
        corr = corr * inv2 + c;
    }
    (x - 0.5) * x.ln() - x + LN_SQRT_2PI + corr * inv
}

/// `sin(πx)` with the argument reduced exactly to [-1/2, 1/2].
pub fn sin_pi(x: f64) -> f64 {
    let n = x.round();
    let r = x - n;
    let s = (PI * r).sin();
    if (n as i64) % 2 == 0 {
        s
    } else {
        -s
    }
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64, SpecialError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(SpecialError::Domain {
            function: "ln_gamma",
            detail: format!("argument must be positive and finite, got {x}"),
        });
    }
    Ok(ln_gamma_pos(x))
}

/// ln Γ(x) without the domain check; x must be positive.
pub fn ln_gamma_pos(x: f64) -> f64 {
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    if x >= STIRLING_SHIFT {
        return stirling(x);
    }
    // Shift up, dividing out the product x (x+1) ... (x+n-1).
    let mut y = x;
    let mut prod = 1.0;
    let mut ln_prod = 0.0;
    while y < STIRLING_SHIFT {
        prod *= y;
        if !(1e-280..=1e280).contains(&prod) {
            ln_prod += prod.ln();
            prod = 1.0;
        }
        y += 1.0;
    }
    stirling(y) - ln_prod - prod.ln()
}

/// ln |Γ(x)| together with the sign of Γ(x), for any real x that is not a
/// pole (0, -1, -2, ...).
pub fn ln_abs_gamma(x: f64) -> Result<(f64, f64), SpecialError> {
    if x > 0.0 {
        return Ok((ln_gamma_pos(x), 1.0));
    }
    if x == x.floor() || !x.is_finite() {
        return Err(SpecialError::Domain {
            function: "gamma",
            detail: format!("pole at {x}"),
        });
    }
    // Γ(x) Γ(1-x) = π / sin(πx)
    let s = sin_pi(x);
    let ln = PI.ln() - s.abs().ln() - ln_gamma_pos(1.0 - x);
    Ok((ln, s.signum()))
}

/// Γ(x) for real non-pole x.
pub fn gamma(x: f64) -> Result<f64, SpecialError> {
    if x > 0.0 && x < 171.0 && x == x.floor() {
        // exact factorials
        let mut f = 1.0;
        let mut k = 2.0;
        while k < x {
            f *= k;
            k += 1.0;
        }
        return Ok(f);
    }
    let (ln, sign) = ln_abs_gamma(x)?;
    Ok(sign * ln.exp())
}

/// 1/Γ(x); zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    match ln_abs_gamma(x) {
        Ok((ln, sign)) => sign * (-ln).exp(),
        Err(_) => f64::NAN,
    }
}

/// B(a, b) = Γ(a)Γ(b)/Γ(a+b) for a, b > 0.
pub fn beta(a: f64, b: f64) -> Result<f64, SpecialError> {
    Ok(ln_beta(a, b)?.exp())
}

pub fn ln_beta(a: f64, b: f64) -> Result<f64, SpecialError> {
    if !(a > 0.0 && b > 0.0) {
        return Err(SpecialError::Domain {
            function: "beta",
            detail: format!("arguments must be positive, got ({a}, {b})"),
        });
    }
    Ok(ln_gamma_pos(a) + ln_gamma_pos(b) - ln_gamma_pos(a + b))
}
