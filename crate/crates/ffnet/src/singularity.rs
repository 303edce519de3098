//! Singularity analysis of the amplitude equation
//! G(x; μ, ε, σ, λ, γ) = (1+γ²)x³ − 2(μ+ε+σγ)x² + ((μ+ε)²+σ²)x − λ²μ,
//! with x = |u|².

use crate::cubic::{solve_cubic_real, Cubic};
use crate::error::{Error, Result};
use crate::reduced::{unreduced_stability, SLParams};
use crate::tol::TOL_RESID;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GValues {
    pub g: f64,
    pub g_x: f64,
    pub g_xx: f64,
    pub g_sigma: f64,
}

pub fn g_and_partials(x: f64, mu: f64, eps: f64, sigma: f64, lambda: f64, gamma: f64) -> GValues {
    let k = mu + eps + sigma * gamma;
    let l = (mu + eps).powi(2) + sigma * sigma;
    let a = 1.0 + gamma * gamma;
    GValues {
        g: ((a * x - 2.0 * k) * x + l) * x - lambda * lambda * mu,
        g_x: 3.0 * a * x * x - 4.0 * k * x + l,
        g_xx: 6.0 * a * x - 4.0 * k,
        g_sigma: -2.0 * gamma * x * x + 2.0 * sigma * x,
    }
}

pub fn g_cubic(mu: f64, eps: f64, sigma: f64, lambda: f64, gamma: f64) -> Cubic {
    Cubic::new(
        1.0 + gamma * gamma,
        -2.0 * (mu + eps + sigma * gamma),
        (mu + eps).powi(2) + sigma * sigma,
        -lambda * lambda * mu,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingularPoint {
    pub mu: f64,
    pub eps: f64,
    pub sigma: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub x: f64,
}

impl SingularPoint {
    pub fn g(&self) -> GValues {
        g_and_partials(self.x, self.mu, self.eps, self.sigma, self.lambda, self.gamma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SetKind {
    Hysteresis,
    Bifurcation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularSet {
    pub kind: SetKind,
    /// "+" or "-" for the two hysteresis branches, "cubic" for 𝓑.
    pub branch: String,
    pub points: Vec<SingularPoint>,
}

fn check_mu_lambda(mu: f64, lambda: f64) -> Result<()> {
    if !(mu > 0.0) {
        return Err(Error::InvalidMu(mu));
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidLambda(lambda));
    }
    Ok(())
}

fn hysteresis_point(mu: f64, lambda: f64, gamma: f64, upper: bool) -> SingularPoint {
    let s3 = 3f64.sqrt();
    let sg = if upper { 1.0 } else { -1.0 };
    let c = lambda.powf(2.0 / 3.0) * mu.cbrt() / (1.0 + gamma * gamma).cbrt();
    SingularPoint {
        mu,
        eps: 1.5 * (1.0 + sg * gamma / s3) * c - mu,
        sigma: 1.5 * (gamma - sg / s3) * c,
        lambda,
        gamma,
        x: c,
    }
}

fn minus_branch_exists(gamma: f64) -> bool {
    gamma < 3f64.sqrt()
}

/// Hysteresis points (G = G_x = G_xx = 0) at fixed μ, λ, γ. The "−" branch
/// is dropped for γ ≥ √3, where it would need μ + ε ≤ 0.
pub fn hysteresis_set(mu: f64, lambda: f64, gamma: f64) -> Result<Vec<SingularSet>> {
    check_mu_lambda(mu, lambda)?;
    let mut out = vec![SingularSet {
        kind: SetKind::Hysteresis,
        branch: "+".into(),
        points: vec![hysteresis_point(mu, lambda, gamma, true)],
    }];
    if minus_branch_exists(gamma) {
        out.push(SingularSet {
            kind: SetKind::Hysteresis,
            branch: "-".into(),
            points: vec![hysteresis_point(mu, lambda, gamma, false)],
        });
    }
    Ok(out)
}

/// Hysteresis set sampled in the (ε, λ) plane at fixed μ, γ:
/// λ = (2(μ+ε)/(3(1 ± γ/√3)))^{3/2}·((1+γ²)/μ)^{1/2} for μ + ε > 0.
pub fn hysteresis_slice(mu: f64, gamma: f64, eps_range: (f64, f64), n_pts: usize) -> Result<Vec<SingularSet>> {
    if !(mu > 0.0) {
        return Err(Error::InvalidMu(mu));
    }
    let s3 = 3f64.sqrt();
    let mut out = Vec::new();
    for upper in [true, false] {
        if !upper && !minus_branch_exists(gamma) {
            continue;
        }
        let f = 1.0 + if upper { gamma / s3 } else { -gamma / s3 };
        let mut pts = Vec::new();
        for eps in crate::linspace(eps_range.0, eps_range.1, n_pts) {
            let m = mu + eps;
            if !(m > 0.0) {
                continue;
            }
            let lambda = (2.0 * m / (3.0 * f)).powf(1.5) * ((1.0 + gamma * gamma) / mu).sqrt();
            let mut p = hysteresis_point(mu, lambda, gamma, upper);
            p.eps = eps;
            pts.push(p);
        }
        out.push(SingularSet {
            kind: SetKind::Hysteresis,
            branch: if upper { "+" } else { "-" }.into(),
            points: pts,
        });
    }
    Ok(out)
}

/// The trivial component of 𝓑: λ = 0, σ = γ(μ+ε), x = μ+ε. It is a line on
/// the ε axis of the (ε, λ) plane, reported as a marker rather than points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxisMarker {
    pub eps_min: f64,
    pub eps_max: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BifurcationSet {
    pub cubic: SingularSet,
    pub axis: AxisMarker,
}

/// Bifurcation set 𝓑 over an ε range: (4/27)(μ+ε)³ = λ²μ, σ = γ(μ+ε)/3,
/// x = (μ+ε)/3, plus the λ = 0 axis component.
pub fn bifurcation_set(mu: f64, gamma: f64, eps_range: (f64, f64), n_pts: usize) -> Result<BifurcationSet> {
    if !(mu > 0.0) {
        return Err(Error::InvalidMu(mu));
    }
    let mut pts = Vec::new();
    for eps in crate::linspace(eps_range.0, eps_range.1, n_pts) {
        let m = mu + eps;
        if !(m > 0.0) {
            continue;
        }
        pts.push(SingularPoint {
            mu,
            eps,
            sigma: gamma * m / 3.0,
            lambda: (4.0 * m.powi(3) / (27.0 * mu)).sqrt(),
            gamma,
            x: m / 3.0,
        });
    }
    Ok(BifurcationSet {
        cubic: SingularSet {
            kind: SetKind::Bifurcation,
            branch: "cubic".into(),
            points: pts,
        },
        axis: AxisMarker {
            eps_min: eps_range.0.min(eps_range.1),
            eps_max: eps_range.0.max(eps_range.1),
            lambda: 0.0,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedPoint {
    pub sigma_t: f64,
    pub mu_t: f64,
    pub x_v: f64,
}

/// Map singular points to reduced coordinates (σ̃, μ̃) and x_v = x/(μ+ε).
pub fn to_reduced_coordinates(s: &SingularSet) -> Result<Vec<ReducedPoint>> {
    s.points
        .iter()
        .map(|p| {
            let m = p.mu + p.eps;
            if !(m > 0.0) || !(p.lambda > 0.0) || !(p.mu > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "point with mu+eps = {m}, lambda = {} has no reduced image",
                    p.lambda
                )));
            }
            let r = (m / p.mu).sqrt();
            Ok(ReducedPoint {
                sigma_t: p.sigma / p.lambda * r,
                mu_t: m / p.lambda * r,
                x_v: p.x / m,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchRow {
    pub sigma: f64,
    pub x: f64,
    pub stable: bool,
    pub vertical_tangent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchDiagram {
    pub rows: Vec<BranchRow>,
    /// Points where the branch x(σ) has a vertical tangent (G = G_x = 0).
    pub folds: Vec<BranchRow>,
    /// x-intervals of the connected components of {G = 0, x > 0}.
    pub components: Vec<(f64, f64)>,
}

/// Positive roots of G over a σ grid with stability, plus the exact fold
/// points located along the x-parametrisation of the branch.
pub fn branch_diagram(
    mu: f64,
    eps: f64,
    lambda: f64,
    gamma: f64,
    sigma_range: (f64, f64),
    n_pts: usize,
) -> Result<BranchDiagram> {
    check_mu_lambda(mu, lambda)?;
    let mut rows = Vec::new();
    for sigma in crate::linspace(sigma_range.0, sigma_range.1, n_pts) {
        let c = g_cubic(mu, eps, sigma, lambda, gamma);
        let tol = 1e-8 * c.scale();
        let p = SLParams {
            mu,
            eps,
            sigma,
            lambda,
            gamma,
            omega: 0.0,
        };
        for &x in &solve_cubic_real(&c, TOL_RESID)?.roots {
            if !(x > 0.0) {
                continue;
            }
            let (det, _, stable) = unreduced_stability(x, &p);
            rows.push(BranchRow {
                sigma,
                x,
                stable,
                vertical_tangent: det.abs() < tol,
            });
        }
    }
    let (lo, hi) = (sigma_range.0.min(sigma_range.1), sigma_range.0.max(sigma_range.1));
    let folds = fold_points(mu, eps, lambda, gamma)?
        .into_iter()
        .filter(|r| r.sigma >= lo && r.sigma <= hi)
        .collect();
    Ok(BranchDiagram {
        rows,
        folds,
        components: branch_components(mu, eps, lambda)?,
    })
}

/// x-intervals where λ²μ/x − (μ+ε−x)² ≥ 0; each is one connected piece of
/// the branch in the (σ, x) plane. Two pieces appear once λ²μ < 4(μ+ε)³/27.
pub fn branch_components(mu: f64, eps: f64, lambda: f64) -> Result<Vec<(f64, f64)>> {
    check_mu_lambda(mu, lambda)?;
    let m = mu + eps;
    let l = lambda * lambda * mu;
    // H(x) = l − x(m − x)² = −x³ + 2m x² − m² x + l
    let r = solve_cubic_real(&Cubic::new(-1.0, 2.0 * m, -m * m, l), TOL_RESID)?;
    let pos: Vec<f64> = r.roots.iter().copied().filter(|&x| x > 0.0).collect();
    Ok(match pos.len() {
        3 => vec![(0.0, pos[0]), (pos[1], pos[2])],
        2 => vec![(0.0, pos[1])],
        1 => vec![(0.0, pos[0])],
        _ => vec![],
    })
}

fn fold_points(mu: f64, eps: f64, lambda: f64, gamma: f64) -> Result<Vec<BranchRow>> {
    let m = mu + eps;
    let l = lambda * lambda * mu;
    let r_of = |x: f64| (l / x - (m - x).powi(2)).max(0.0);
    let dr = |x: f64| -l / (x * x) + 2.0 * (m - x);
    let scale = 1.0 + m.abs() + l.cbrt() + gamma.abs();
    let mut out = Vec::new();
    for (a, b) in branch_components(mu, eps, lambda)? {
        let a = if a == 0.0 { b * 1e-6 } else { a };
        let n = 4000;
        let xs: Vec<f64> = (1..n).map(|k| a + (b - a) * k as f64 / n as f64).collect();
        for sg in [1.0, -1.0] {
            let h = |x: f64| 2.0 * gamma * r_of(x).sqrt() + sg * dr(x);
            let hs: Vec<f64> = xs.iter().map(|&x| h(x)).collect();
            let mut found = Vec::new();
            for i in 0..xs.len() - 1 {
                if hs[i] == 0.0 || hs[i] * hs[i + 1] < 0.0 {
                    found.push(bisect(&h, xs[i], xs[i + 1]));
                }
            }
            for i in 1..xs.len() - 1 {
                if hs[i].abs() < hs[i - 1].abs() && hs[i].abs() <= hs[i + 1].abs() && hs[i - 1] * hs[i + 1] > 0.0 {
                    let x = golden_min(&|x| h(x).abs(), xs[i - 1], xs[i + 1]);
                    if h(x).abs() <= 1e-7 * scale {
                        found.push(x);
                    }
                }
            }
            for x in found {
                let sigma = gamma * x + sg * r_of(x).sqrt();
                let p = SLParams {
                    mu,
                    eps,
                    sigma,
                    lambda,
                    gamma,
                    omega: 0.0,
                };
                let (_, _, stable) = unreduced_stability(x, &p);
                out.push(BranchRow {
                    sigma,
                    x,
                    stable,
                    vertical_tangent: true,
                });
            }
        }
    }
    out.sort_by(|p, q| (p.sigma, p.x).partial_cmp(&(q.sigma, q.x)).unwrap());
    Ok(out)
}

fn bisect(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let c = 0.5 * (a + b);
        if c == a || c == b {
            break;
        }
        let fc = f(c);
        if fc == 0.0 {
            return c;
        }
        if fa * fc < 0.0 {
            b = c;
        } else {
            a = c;
            fa = fc;
        }
    }
    0.5 * (a + b)
}

fn golden_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (a.abs() + b.abs()) {
            break;
        }
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    0.5 * (a + b)
}
