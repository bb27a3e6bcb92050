//! Incomplete gamma functions.
//!
//! The regularized pair is computed once, by the power series when
//! x < a + 1 and by the Legendre continued fraction otherwise; the other
//! member is its complement, so P + Q = 1 holds by construction.

use super::gamma::{gamma, ln_gamma_pos};
use super::SpecialError;

const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;
const MAX_ITER: usize = 100_000;
const EULER: f64 = 0.577_215_664_901_532_9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaKind {
    /// Γ(a, x) = ∫ₓ^∞ t^{a-1} e^{-t} dt
    Upper,
    /// γ(a, x) = ∫₀ˣ t^{a-1} e^{-t} dt
    Lower,
}

/// Σ x^n / ((a+1)...(a+n)), so that P(a,x) = e^{-x} x^a / Γ(a+1) times it.
fn p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut del = 1.0;
    let mut sum = 1.0;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum
}

/// Continued fraction for e^{x} x^{-a} Γ(a, x); converges for any real a once x is not small.
fn q_fraction(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

fn check(a: f64, x: f64) -> Result<(), SpecialError> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(SpecialError::Domain {
            function: "incomplete_gamma",
            detail: format!("order must be positive and finite, got {a}"),
        });
    }
    if !(x >= 0.0) {
        return Err(SpecialError::Domain {
            function: "incomplete_gamma",
            detail: format!("argument must be non-negative, got {x}"),
        });
    }
    Ok(())
}

/// (P(a,x), Q(a,x)) for a > 0, x ≥ 0.
fn regularized_pair(a: f64, x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (0.0, 1.0);
    }
    if x == f64::INFINITY {
        return (1.0, 0.0);
    }
    if x < a + 1.0 {
        let ln_pre = a * x.ln() - x - ln_gamma_pos(a + 1.0);
        let p = (ln_pre.exp() * p_series(a, x)).min(1.0);
        (p, 1.0 - p)
    } else {
        let ln_pre = a * x.ln() - x - ln_gamma_pos(a);
        let q = (ln_pre.exp() * q_fraction(a, x)).min(1.0);
        (1.0 - q, q)
    }
}

/// P(a, x) = γ(a, x)/Γ(a).
pub fn regularized_lower(a: f64, x: f64) -> Result<f64, SpecialError> {
    check(a, x)?;
    Ok(regularized_pair(a, x).0)
}

/// Q(a, x) = Γ(a, x)/Γ(a).
pub fn regularized_upper(a: f64, x: f64) -> Result<f64, SpecialError> {
    check(a, x)?;
    Ok(regularized_pair(a, x).1)
}

/// Un-regularized Γ(a, x) or γ(a, x) for a > 0, x ≥ 0.
pub fn incomplete_gamma(kind: GammaKind, a: f64, x: f64) -> Result<f64, SpecialError> {
    check(a, x)?;
    let g = ln_gamma_pos(a).exp();
    let (p, q) = regularized_pair(a, x);
    Ok(match kind {
        GammaKind::Lower => g * p,
        GammaKind::Upper => g * q,
    })
}

/// Alternating series Σ_{n<terms} (-1)^n x^{a+n} / (n! (a+n)) for γ(a, x).
pub fn lower_gamma_series(a: f64, x: f64, terms: usize) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut pow = x.powf(a);
    for n in 0..terms {
        let nf = n as f64;
        if n > 0 {
            pow *= -x / nf;
        }
        let term = pow / (a + nf);
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

fn exp_integral_e1_small(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for n in 1..200 {
        let nf = n as f64;
        term *= -x / nf;
        let add = term / nf;
        sum += add;
        if add.abs() < EPS * sum.abs() {
            break;
        }
    }
    -EULER - x.ln() - sum
}

/// Γ(a, x) for any real order a and x > 0, including a ≤ 0.
pub fn upper_gamma_any(a: f64, x: f64) -> Result<f64, SpecialError> {
    if !(x > 0.0) || !a.is_finite() {
        return Err(SpecialError::Domain {
            function: "upper_gamma_any",
            detail: format!("requires finite order and x > 0, got a={a}, x={x}"),
        });
    }
    if a > 0.0 {
        return incomplete_gamma(GammaKind::Upper, a, x);
    }
    if x >= 1.5 {
        return Ok((a * x.ln() - x).exp() * q_fraction(a, x));
    }
    let r = a.round();
    if (a - r).abs() < 1e-9 {
        // Γ(0, x) = E₁(x), then Γ(b, x) = (Γ(b+1, x) - x^b e^{-x}) / b downwards.
        let mut g = exp_integral_e1_small(x);
        let mut b = 0.0;
        while b > r {
            b -= 1.0;
            g = (g - x.powf(b) * (-x).exp()) / b;
        }
        return Ok(g);
    }
    let lower = lower_gamma_series(a, x, 400);
    Ok(gamma(a)? - lower)
}

/// E_p(x) = x^{p-1} Γ(1-p, x) for p > 1. Stays bounded as x → 0, where
/// Γ(1-p, x) and x^{p-1} separately leave the f64 range.
pub fn exp_integral_e(p: f64, x: f64) -> Result<f64, SpecialError> {
    if !(p > 1.0) || !p.is_finite() || !(x >= 0.0) {
        return Err(SpecialError::Domain {
            function: "exp_integral_e",
            detail: format!("requires finite p > 1 and x >= 0, got p={p}, x={x}"),
        });
    }
    if x == 0.0 {
        return Ok(1.0 / (p - 1.0));
    }
    if x >= 1.0 || p >= 20.0 {
        return Ok((-x).exp() * q_fraction(1.0 - p, x));
    }
    let n = p.round();
    if (p - n).abs() < 1e-9 {
        // E_{j+1} = (e^{-x} - x E_j) / j, stable upwards for x < 1
        let ex = (-x).exp();
        let mut e = exp_integral_e1_small(x);
        for j in 1..n as usize {
            e = (ex - x * e) / j as f64;
        }
        return Ok(e);
    }
    // E_p = Γ(1-p) x^{p-1} - Σ_j (-x)^j / (j! (1-p+j))
    let mut sum = 0.0;
    let mut term = 1.0;
    for j in 0..MAX_ITER {
        let jf = j as f64;
        if j > 0 {
            term *= -x / jf;
        }
        let add = term / (1.0 - p + jf);
        sum += add;
        if jf > p && add.abs() < EPS * sum.abs() {
            break;
        }
    }
    Ok(gamma(1.0 - p)? * x.powf(p - 1.0) - sum)
}
