//! Real roots of cubic polynomials and the pitchfork root-structure helpers.

use crate::error::{Error, Result};
use crate::tol::{MAX_NEWTON, TOL_ACOS, TOL_DISC, TOL_RESID};
use std::f64::consts::PI;

/// c3·y³ + c2·y² + c1·y + c0
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cubic {
    pub c3: f64,
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

impl Cubic {
    pub fn new(c3: f64, c2: f64, c1: f64, c0: f64) -> Self {
        Cubic { c3, c2, c1, c0 }
    }

    pub fn eval(&self, y: f64) -> f64 {
        ((self.c3 * y + self.c2) * y + self.c1) * y + self.c0
    }

    pub fn deriv(&self, y: f64) -> f64 {
        (3.0 * self.c3 * y + 2.0 * self.c2) * y + self.c1
    }

    pub fn scale(&self) -> f64 {
        self.c3
            .abs()
            .max(self.c2.abs())
            .max(self.c1.abs())
            .max(self.c0.abs())
    }

    pub fn discriminant(&self) -> f64 {
        let (a, b, c, d) = (self.c3, self.c2, self.c1, self.c0);
        18.0 * a * b * c * d - 4.0 * b * b * b * d + b * b * c * c
            - 4.0 * a * c * c * c
            - 27.0 * a * a * d * d
    }

    /// True when |disc| is below the double-root threshold.
    pub fn has_multiple_root(&self) -> bool {
        let s = self.scale();
        self.discriminant().abs() <= TOL_DISC * s.powi(4)
    }
}

/// Distinct real roots in ascending order with their multiplicities.
#[derive(Debug, Clone, PartialEq)]
pub struct RealRoots {
    pub roots: Vec<f64>,
    pub multiplicities: Vec<u8>,
    /// False if Newton polishing hit the iteration cap for some root.
    pub converged: bool,
}

impl RealRoots {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn count_with_multiplicity(&self) -> usize {
        self.multiplicities.iter().map(|&m| m as usize).sum()
    }

    fn negated(&self) -> RealRoots {
        let mut roots: Vec<f64> = self.roots.iter().rev().map(|r| -r).collect();
        for r in roots.iter_mut() {
            // avoid -0.0
            *r += 0.0;
        }
        RealRoots {
            roots,
            multiplicities: self.multiplicities.iter().rev().copied().collect(),
            converged: self.converged,
        }
    }
}

fn polish(c: &Cubic, mut r: f64, tol: f64) -> (f64, bool) {
    let target = tol * c.scale();
    let mut f = c.eval(r);
    // keep stepping while Newton still shrinks the residual
    for _ in 0..MAX_NEWTON {
        if f == 0.0 {
            break;
        }
        let d = c.deriv(r);
        if d == 0.0 {
            break;
        }
        let next = r - f / d;
        if !next.is_finite() {
            break;
        }
        let fn_ = c.eval(next);
        if fn_.abs() >= f.abs() {
            break;
        }
        r = next;
        f = fn_;
    }
    (r, f.abs() <= target)
}

/// Solve a cubic for its real roots.
///
/// Three distinct real roots use the trigonometric form, a single real root
/// uses Cardano with the cancellation-free sign choice, and a discriminant
/// below `1e-12·scale⁴` is reported as a double (or triple) root.
pub fn solve_cubic_real(c: &Cubic, tol_resid: f64) -> Result<RealRoots> {
    if c.c3 == 0.0 {
        return Err(Error::DegenerateDegree);
    }
    if ![c.c3, c.c2, c.c1, c.c0].iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidParams("non-finite cubic coefficient".into()));
    }
    let s = c.scale();
    let disc = c.discriminant();
    let a = c.c2 / c.c3;
    let b = c.c1 / c.c3;
    let d = c.c0 / c.c3;
    let shift = -a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + d;

    let mut raw: Vec<(f64, u8)> = Vec::with_capacity(3);
    if disc.abs() <= TOL_DISC * s.powi(4) {
        // Critical points of c: 3c3 y² + 2c2 y + c1 = 0.
        let qa = 3.0 * c.c3;
        let qb = 2.0 * c.c2;
        let qc = c.c1;
        let qd = qb * qb - 4.0 * qa * qc;
        if qd <= 0.0 {
            raw.push((-c.c2 / (3.0 * c.c3), 3));
        } else {
            let sq = qd.sqrt();
            let t = -0.5 * (qb + qb.signum() * sq);
            let (r1, r2) = if t != 0.0 {
                (t / qa, qc / t)
            } else {
                ((-qb + sq) / (2.0 * qa), (-qb - sq) / (2.0 * qa))
            };
            let dbl = if c.eval(r1).abs() <= c.eval(r2).abs() { r1 } else { r2 };
            let single = -a - 2.0 * dbl;
            let sep = (single - dbl).abs();
            if sep <= 1e-7 * dbl.abs().max(single.abs()).max(1e-300) {
                raw.push((-c.c2 / (3.0 * c.c3), 3));
            } else {
                raw.push((dbl, 2));
                raw.push((single, 1));
            }
        }
    } else if disc > 0.0 && p < 0.0 {
        let m = 2.0 * (-p / 3.0).sqrt();
        let mut arg = (3.0 * q / (2.0 * p)) * (-3.0 / p).sqrt();
        if arg.abs() > 1.0 {
            if arg.abs() - 1.0 <= TOL_ACOS {
                arg = arg.clamp(-1.0, 1.0);
            } else {
                return Err(Error::Internal(format!(
                    "arccos argument {arg} outside [-1, 1]"
                )));
            }
        }
        let phi = arg.acos() / 3.0;
        for k in 0..3 {
            let t = m * (phi - 2.0 * PI * k as f64 / 3.0).cos();
            raw.push((t + shift, 1));
        }
    } else {
        let dd = (q * q / 4.0 + p * p * p / 27.0).max(0.0);
        let sgn = if q >= 0.0 { 1.0 } else { -1.0 };
        let u = (-q / 2.0 - sgn * dd.sqrt()).cbrt();
        let t = if u != 0.0 { u - p / (3.0 * u) } else { 0.0 };
        raw.push((t + shift, 1));
    }

    let mut converged = true;
    for (r, m) in raw.iter_mut() {
        if *m == 1 {
            let (pr, ok) = polish(c, *r, tol_resid);
            *r = pr;
            converged &= ok;
        }
    }
    raw.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    Ok(RealRoots {
        roots: raw.iter().map(|r| r.0).collect(),
        multiplicities: raw.iter().map(|r| r.1).collect(),
        converged,
    })
}

/// Roots of p₊(y) = (μ+ε)y − y³ − λ√μ and p₋(y) = (μ+ε)y − y³ + λ√μ.
#[derive(Debug, Clone, PartialEq)]
pub struct PmRoots {
    pub plus: RealRoots,
    pub minus: RealRoots,
}

pub fn p_plus(mu: f64, eps: f64, lambda: f64) -> Cubic {
    Cubic::new(-1.0, 0.0, mu + eps, -lambda * mu.sqrt())
}

pub fn root_structure_p_pm(mu: f64, eps: f64, lambda: f64) -> Result<PmRoots> {
    if !(mu > 0.0) {
        return Err(Error::InvalidMu(mu));
    }
    let plus = solve_cubic_real(&p_plus(mu, eps, lambda), TOL_RESID)?;
    let minus = plus.negated();
    Ok(PmRoots { plus, minus })
}

/// Positive solutions μ of 2(μ+ε)^{3/2} = 3√3 λ μ^{1/2}, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalMu {
    pub roots: Vec<f64>,
    /// μ₁* and μ₂* coincide (ε = λ).
    pub doubled: bool,
    /// ε = 0: the list includes μ = 0, which lies on the edge of the μ > 0 domain.
    pub boundary_zero: bool,
}

impl CriticalMu {
    pub fn mu1(&self) -> Option<f64> {
        self.roots.first().copied()
    }

    pub fn mu2(&self) -> Option<f64> {
        self.roots.get(1).copied()
    }
}

pub fn critical_mu_residual(mu: f64, eps: f64, lambda: f64) -> f64 {
    4.0 * (mu + eps).powi(3) - 27.0 * lambda * lambda * mu
}

pub fn critical_mu_roots(eps: f64, lambda: f64) -> Result<CriticalMu> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidLambda(lambda));
    }
    let a = (1.5 * 3f64.sqrt() * lambda).powf(2.0 / 3.0);
    let rr = solve_cubic_real(&Cubic::new(1.0, 0.0, -a, eps), TOL_RESID)?;
    let mut roots = Vec::new();
    let mut doubled = false;
    let boundary_zero = eps == 0.0;
    if boundary_zero {
        roots.push(0.0);
    }
    for (&t, &m) in rr.roots.iter().zip(&rr.multiplicities) {
        let t_min = if boundary_zero { 1e-8 * a.sqrt() } else { 0.0 };
        if t <= t_min {
            continue;
        }
        let mut mu = t * t * t;
        if m >= 2 {
            doubled = true;
        } else {
            mu = polish_critical(mu, eps, lambda);
        }
        roots.push(mu);
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(CriticalMu {
        roots,
        doubled,
        boundary_zero,
    })
}

fn polish_critical(mut mu: f64, eps: f64, lambda: f64) -> f64 {
    let l2 = lambda * lambda;
    for _ in 0..MAX_NEWTON {
        let f = critical_mu_residual(mu, eps, lambda);
        let df = 12.0 * (mu + eps).powi(2) - 27.0 * l2;
        if df == 0.0 {
            break;
        }
        let next = mu - f / df;
        if !(next > 0.0) || (next - mu).abs() <= 1e-16 * mu {
            if next > 0.0 {
                mu = next;
            }
            break;
        }
        mu = next;
    }
    mu
}

/// Small-μ approximations of the p₊ roots: ±√ε − λ√μ/(2ε) and λ√μ/ε.
pub fn approx_small_mu_roots(mu: f64, eps: f64, lambda: f64) -> Result<[f64; 3]> {
    if !(mu > 0.0) {
        return Err(Error::InvalidMu(mu));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidParams(format!("eps must be positive (got {eps})")));
    }
    let se = eps.sqrt();
    let shift = lambda * mu.sqrt() / (2.0 * eps);
    Ok([se - shift, -se - shift, lambda * mu.sqrt() / eps])
}
