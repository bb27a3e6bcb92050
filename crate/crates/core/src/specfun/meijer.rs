//! Meijer G-function for the handful of shapes the outage expressions use.
//!
//! Two independent routes are provided. The Slater route sums the residues
//! at the poles of Γ(b_h + s), h ≤ m; the contour route integrates the
//! Mellin–Barnes integrand along a vertical line through its real saddle.
//! `meijer_g` tries Slater first and falls back to the contour whenever the
//! residue sum is ill-conditioned.

use super::cgamma::ln_gamma_complex;
use super::gamma::{ln_abs_gamma, ln_gamma_pos};
use super::SpecialError;
use crate::quad;
use num_complex::Complex64;
use std::f64::consts::PI;

/// (m, n, p, q) instances accepted by the evaluator.
const SHAPES: [(usize, usize, usize, usize); 6] = [
    (1, 0, 0, 1),
    (2, 0, 0, 2),
    (3, 0, 1, 3),
    (2, 1, 2, 3),
    (3, 1, 2, 4),
    (6, 1, 3, 7),
];

const COLLISION_TOL: f64 = 1e-12;
// Residue pairs closer than this to an integer spacing cancel to ~eps/δ².
const SLATER_SEPARATION: f64 = 1e-3;
const PERTURBATION: f64 = 1e-9;
const MAX_CONDITION: f64 = 1e6;
const MAX_TERMS: usize = 20_000;
// e^{-41} ≈ 1.6e-18 relative to the largest term
const TAIL_LN: f64 = -41.0;

#[derive(Debug, Clone, PartialEq)]
pub struct MeijerGSpec {
    pub m: usize,
    pub n: usize,
    /// numerator parameters a₁..a_p; the first n enter as Γ(1 - a_j - s)
    pub a: Vec<f64>,
    /// denominator parameters b₁..b_q; the first m enter as Γ(b_j + s)
    pub b: Vec<f64>,
}

/// A value stored as `mantissa · exp(ln_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mantissa: f64,
    pub ln_scale: f64,
}

impl Scaled {
    pub fn value(self) -> f64 {
        if self.mantissa == 0.0 {
            return 0.0;
        }
        self.mantissa * self.ln_scale.exp()
    }

    /// ln |value|
    pub fn ln_abs(self) -> f64 {
        self.mantissa.abs().ln() + self.ln_scale
    }
}

impl MeijerGSpec {
    pub fn new(m: usize, n: usize, a: Vec<f64>, b: Vec<f64>) -> Result<Self, SpecialError> {
        let spec = MeijerGSpec { m, n, a, b };
        spec.validate()?;
        Ok(spec)
    }

    pub fn p(&self) -> usize {
        self.a.len()
    }

    pub fn q(&self) -> usize {
        self.b.len()
    }

    fn validate(&self) -> Result<(), SpecialError> {
        let (m, n, p, q) = (self.m, self.n, self.p(), self.q());
        if m > q || n > p || !SHAPES.contains(&(m, n, p, q)) {
            return Err(SpecialError::Unsupported { m, n, p, q });
        }
        if self.a.iter().chain(&self.b).any(|v| !v.is_finite()) {
            return Err(SpecialError::Divergent("non-finite parameter".into()));
        }
        let (lo, hi) = self.strip();
        if !(lo < hi) {
            return Err(SpecialError::Divergent(format!(
                "poles of Γ(b+s) and Γ(1-a-s) are not separable (strip {lo} .. {hi})"
            )));
        }
        Ok(())
    }

    /// Open interval of Re(s) separating the two pole families.
    fn strip(&self) -> (f64, f64) {
        let lo = -self.b[..self.m].iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = if self.n == 0 {
            f64::INFINITY
        } else {
            1.0 - self.a[..self.n].iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        };
        (lo, hi)
    }
}

fn check_z(z: f64) -> Result<(), SpecialError> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(SpecialError::Domain {
            function: "meijer_g",
            detail: format!("argument must be positive and finite, got {z}"),
        });
    }
    Ok(())
}

fn near_integer(x: f64) -> Option<f64> {
    let r = x.round();
    ((x - r).abs() < COLLISION_TOL).then_some(r)
}

/// b with colliding m-block entries shifted by k·1e-9 (k = collision index).
fn separated_b(spec: &MeijerGSpec) -> Vec<f64> {
    let mut b = spec.b.clone();
    let mut k = 0;
    for j in 1..spec.m {
        if (0..j).any(|i| near_integer(b[j] - b[i]).is_some()) {
            k += 1;
            b[j] += k as f64 * PERTURBATION;
        }
    }
    b
}

/// Residue series around the poles of Γ(b_h + s).
pub fn meijer_g_slater(spec: &MeijerGSpec, z: f64) -> Result<Scaled, SpecialError> {
    spec.validate()?;
    check_z(z)?;
    let (m, n, p, q) = (spec.m, spec.n, spec.p(), spec.q());
    let a = &spec.a;
    let b = separated_b(spec);
    let ln_z = z.ln();
    let ratio_sign = if (p + m + n) % 2 == 0 { 1.0 } else { -1.0 };

    let mut terms: Vec<(f64, f64)> = Vec::new();
    for h in 0..m {
        let bh = b[h];
        // A later term would revive after zeros: not representable by ratios.
        if (m..q).any(|j| near_integer(b[j] - bh).is_some_and(|r| r >= 1.0)) {
            return Err(SpecialError::Divergent(
                "non-m denominator parameter exceeds b_h by an integer".into(),
            ));
        }
        // 1/Γ(a_j - b_h) = 0 for j > n: the whole residue family vanishes.
        if (n..p).any(|j| near_integer(a[j] - bh).is_some_and(|r| r <= 0.0)) {
            continue;
        }
        let mut ln_t = bh * ln_z;
        let mut sign = 1.0;
        let mut acc = |x: f64, invert: bool| -> Result<(), SpecialError> {
            let (l, s) = ln_abs_gamma(x)
                .map_err(|_| SpecialError::Divergent(format!("gamma pole at {x} in the residue coefficient")))?;
            ln_t += if invert { -l } else { l };
            sign *= s;
            Ok(())
        };
        for j in (0..m).filter(|&j| j != h) {
            acc(b[j] - bh, false)?;
        }
        for aj in &a[..n] {
            acc(1.0 - aj + bh, false)?;
        }
        for bj in &b[m..] {
            acc(1.0 - bj + bh, true)?;
        }
        for aj in &a[n..] {
            acc(aj - bh, true)?;
        }
        terms.push((ln_t, sign));
        let mut ln_max = ln_t;
        let mut k = 0usize;
        loop {
            let kf = k as f64;
            let mut num = ratio_sign * z;
            for aj in a {
                num *= 1.0 + bh - aj + kf;
            }
            if num == 0.0 {
                break;
            }
            let mut den = kf + 1.0;
            for (j, bj) in b.iter().enumerate() {
                if j != h {
                    den *= 1.0 + bh - bj + kf;
                }
            }
            let r = num / den;
            ln_t += r.abs().ln();
            sign *= r.signum();
            terms.push((ln_t, sign));
            ln_max = ln_max.max(ln_t);
            k += 1;
            if r.abs() < 1.0 && ln_t < ln_max + TAIL_LN {
                break;
            }
            if k >= MAX_TERMS {
                return Err(SpecialError::NoConvergence {
                    function: "meijer_g_slater",
                    iterations: k,
                });
            }
        }
    }
    if terms.is_empty() {
        return Ok(Scaled {
            mantissa: 0.0,
            ln_scale: 0.0,
        });
    }
    let scale = terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut abs_sum = 0.0;
    for &(l, s) in &terms {
        let v = s * (l - scale).exp();
        abs_sum += v.abs();
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    let condition = abs_sum / sum.abs();
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(SpecialError::Cancellation {
            function: "meijer_g_slater",
            condition,
        });
    }
    Ok(Scaled {
        mantissa: sum,
        ln_scale: scale,
    })
}

/// Sum over h ≤ m of the k = 0 residue only: the small-z behaviour of each
/// pole family, with colliding parameters separated as in the full series.
pub fn meijer_g_leading(spec: &MeijerGSpec, z: f64) -> Result<f64, SpecialError> {
    Ok(meijer_g_leading_terms(spec, z)?.iter().map(|t| t.0).sum())
}

/// The k = 0 residues individually as (value at z, power of z); vanishing
/// residues are omitted.
pub fn meijer_g_leading_terms(spec: &MeijerGSpec, z: f64) -> Result<Vec<(f64, f64)>, SpecialError> {
    Ok(meijer_g_leading_terms_scaled(spec, z)?
        .into_iter()
        .map(|(v, p)| (v.value(), p))
        .collect())
}

/// As [`meijer_g_leading_terms`], with each value kept in scaled form.
pub fn meijer_g_leading_terms_scaled(spec: &MeijerGSpec, z: f64) -> Result<Vec<(Scaled, f64)>, SpecialError> {
    spec.validate()?;
    check_z(z)?;
    let (m, n) = (spec.m, spec.n);
    let a = &spec.a;
    let b = separated_b(spec);
    let mut terms = Vec::with_capacity(m);
    for h in 0..m {
        let bh = b[h];
        let mut ln_t = bh * z.ln();
        let mut sign = 1.0;
        let mut zero = false;
        let mut acc = |x: f64, invert: bool| -> Result<(), SpecialError> {
            match ln_abs_gamma(x) {
                Ok((l, s)) => {
                    ln_t += if invert { -l } else { l };
                    sign *= s;
                    Ok(())
                }
                Err(_) if invert => {
                    zero = true;
                    Ok(())
                }
                Err(_) => Err(SpecialError::Divergent(format!(
                    "gamma pole at {x} in the residue coefficient"
                ))),
            }
        };
        for j in (0..m).filter(|&j| j != h) {
            acc(b[j] - bh, false)?;
        }
        for aj in &a[..n] {
            acc(1.0 - aj + bh, false)?;
        }
        for bj in &b[m..] {
            acc(1.0 - bj + bh, true)?;
        }
        for aj in &a[n..] {
            acc(aj - bh, true)?;
        }
        if !zero {
            terms.push((
                Scaled {
                    mantissa: sign,
                    ln_scale: ln_t,
                },
                bh,
            ));
        }
    }
    Ok(terms)
}

/// ln of the integrand modulus with each 1/|Γ(x)|, x < 1/2, replaced by its
/// envelope Γ(1-x)/π; smooth on the whole strip.
fn ln_envelope(spec: &MeijerGSpec, c: f64, ln_z: f64) -> f64 {
    let upper = |x: f64| {
        if x > 0.5 {
            ln_gamma_pos(x)
        } else {
            PI.ln() - ln_gamma_pos(1.0 - x)
        }
    };
    let (m, n) = (spec.m, spec.n);
    let mut v = -c * ln_z;
    for bj in &spec.b[..m] {
        v += ln_gamma_pos(bj + c);
    }
    for aj in &spec.a[..n] {
        v += ln_gamma_pos(1.0 - aj - c);
    }
    for bj in &spec.b[m..] {
        v -= upper(1.0 - bj - c);
    }
    for aj in &spec.a[n..] {
        v -= upper(aj + c);
    }
    v
}

fn ln_integrand(spec: &MeijerGSpec, s: Complex64, ln_z: f64) -> Complex64 {
    let (m, n) = (spec.m, spec.n);
    let one = Complex64::new(1.0, 0.0);
    let mut v = -s * ln_z;
    for bj in &spec.b[..m] {
        v += ln_gamma_complex(s + bj);
    }
    for aj in &spec.a[..n] {
        v += ln_gamma_complex(one - aj - s);
    }
    for bj in &spec.b[m..] {
        v -= ln_gamma_complex(one - bj - s);
    }
    for aj in &spec.a[n..] {
        v -= ln_gamma_complex(s + aj);
    }
    v
}

fn saddle(spec: &MeijerGSpec, ln_z: f64) -> f64 {
    let (lo, hi) = spec.strip();
    let hi = if hi.is_finite() {
        hi
    } else {
        let growth = (ln_z / (spec.q() - spec.p()) as f64).exp();
        lo + 10.0 + 3.0 * growth
    };
    let pad = 1e-3 * (hi - lo).min(1.0);
    let (lo, hi) = (lo + pad, hi - pad);
    let f = |c: f64| ln_envelope(spec, c, ln_z);
    let grid = 64;
    let step = (hi - lo) / grid as f64;
    let mut best = lo;
    let mut best_v = f64::INFINITY;
    for i in 0..=grid {
        let c = lo + step * i as f64;
        let v = f(c);
        if v < best_v {
            best_v = v;
            best = c;
        }
    }
    // golden-section refinement on the bracketing cell pair
    let mut l = (best - step).max(lo);
    let mut r = (best + step).min(hi);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = r - g * (r - l);
    let mut x2 = l + g * (r - l);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..60 {
        if f1 < f2 {
            r = x2;
            x2 = x1;
            f2 = f1;
            x1 = r - g * (r - l);
            f1 = f(x1);
        } else {
            l = x1;
            x1 = x2;
            f1 = f2;
            x2 = l + g * (r - l);
            f2 = f(x2);
        }
    }
    0.5 * (l + r)
}

/// Mellin–Barnes integral along Re(s) = c through the real saddle.
pub fn meijer_g_contour(spec: &MeijerGSpec, z: f64) -> Result<Scaled, SpecialError> {
    spec.validate()?;
    check_z(z)?;
    let (m, n, p, q) = (spec.m, spec.n, spec.p(), spec.q());
    if 2 * (m + n) <= p + q {
        return Err(SpecialError::Divergent(
            "contour integral requires m + n > (p + q)/2".into(),
        ));
    }
    let ln_z = z.ln();
    let c = saddle(spec, ln_z);
    let scale = ln_envelope(spec, c, ln_z);
    let integrand = |t: f64| -> f64 {
        let v = ln_integrand(spec, Complex64::new(c, t), ln_z) - scale;
        if v.re < -745.0 {
            return 0.0;
        }
        let e = v.exp();
        if e.re.is_finite() {
            e.re
        } else {
            0.0
        }
    };
    let modulus = |t: f64| (ln_integrand(spec, Complex64::new(c, t), ln_z).re - scale).exp();

    let mut peak = modulus(0.0);
    let mut t_end = 0.0;
    let mut quiet = 0;
    while quiet < 2 {
        t_end += 0.5;
        let v = modulus(t_end);
        peak = peak.max(v);
        if v < 1e-18 * peak || !v.is_finite() {
            quiet += 1;
        } else {
            quiet = 0;
        }
        if t_end > 1e4 {
            return Err(SpecialError::NoConvergence {
                function: "meijer_g_contour",
                iterations: (t_end * 2.0) as usize,
            });
        }
    }
    let panels = t_end.ceil() as usize;
    let width = t_end / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let a = width * i as f64;
        let r = quad::gauss_kronrod(integrand, a, a + width, 1e-10, 1e-16 * peak);
        total += r.value;
    }
    Ok(Scaled {
        mantissa: total / PI,
        ln_scale: scale,
    })
}

fn poles_well_separated(spec: &MeijerGSpec) -> bool {
    let b = &spec.b[..spec.m];
    b.iter().enumerate().all(|(j, bj)| {
        b[..j].iter().all(|bi| {
            let d = bj - bi;
            (d - d.round()).abs() >= SLATER_SEPARATION
        })
    })
}

/// G^{m,n}_{p,q}(z) as a scaled value: Slater series, contour on failure.
pub fn meijer_g_scaled(spec: &MeijerGSpec, z: f64) -> Result<Scaled, SpecialError> {
    spec.validate()?;
    check_z(z)?;
    if !poles_well_separated(spec) {
        return meijer_g_contour(spec, z);
    }
    match meijer_g_slater(spec, z) {
        Ok(v) => Ok(v),
        Err(SpecialError::Cancellation { .. })
        | Err(SpecialError::NoConvergence { .. })
        | Err(SpecialError::Divergent(_)) => meijer_g_contour(spec, z),
        Err(e) => Err(e),
    }
}

pub fn meijer_g(spec: &MeijerGSpec, z: f64) -> Result<f64, SpecialError> {
    Ok(meijer_g_scaled(spec, z)?.value())
}
