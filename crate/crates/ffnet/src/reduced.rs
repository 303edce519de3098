//! Two-cell Stuart-Landau network in the co-rotating frame and its reduced
//! (σ̃, μ̃) phase diagram.

use crate::cubic::{solve_cubic_real, Cubic};
use crate::error::{Error, Result};
use crate::tol::{TOL_CURVE, TOL_HYP, TOL_RESID};
use crate::LocusCurve;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct SLParams {
    pub mu: f64,
    pub eps: f64,
    pub omega: f64,
    pub sigma: f64,
    pub lambda: f64,
    pub gamma: f64,
}

impl Default for SLParams {
    fn default() -> Self {
        SLParams {
            mu: 0.2,
            eps: 0.0,
            omega: 1.0,
            sigma: 0.0,
            lambda: 1.0,
            gamma: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ReducedCase {
    /// μ + ε > 0
    Plus,
    /// μ + ε < 0
    Minus,
    /// μ + ε = 0
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedParams {
    pub mu_t: f64,
    pub sigma_t: f64,
    pub gamma: f64,
    pub case: ReducedCase,
    /// τ = time_scale · t
    pub time_scale: f64,
    /// u = amp_scale · v
    pub amp_scale: f64,
}

impl ReducedParams {
    /// Plus-case parameters given directly in reduced units.
    pub fn plus(sigma_t: f64, mu_t: f64, gamma: f64) -> Self {
        ReducedParams {
            mu_t,
            sigma_t,
            gamma,
            case: ReducedCase::Plus,
            time_scale: 1.0,
            amp_scale: 1.0,
        }
    }

    fn alpha(&self) -> f64 {
        match self.case {
            ReducedCase::Plus => self.mu_t,
            ReducedCase::Minus => -self.mu_t,
            ReducedCase::Zero => 0.0,
        }
    }

    /// A(x) and B(x) with v̇ = (A + iB)v − 1 at |v|² = x.
    pub fn ab(&self, x: f64) -> (f64, f64) {
        (
            self.alpha() - self.mu_t * x,
            self.sigma_t - self.mu_t * self.gamma * x,
        )
    }
}

pub fn reduce(p: &SLParams) -> Result<ReducedParams> {
    if !(p.mu > 0.0) {
        return Err(Error::InvalidMu(p.mu));
    }
    if !(p.lambda > 0.0) {
        return Err(Error::InvalidLambda(p.lambda));
    }
    let m = p.mu + p.eps;
    if m.abs() <= 1e-9 * p.mu {
        return Ok(ReducedParams {
            mu_t: p.mu / p.lambda,
            sigma_t: p.sigma / p.lambda,
            gamma: p.gamma,
            case: ReducedCase::Zero,
            time_scale: p.lambda,
            amp_scale: p.mu.sqrt(),
        });
    }
    let am = m.abs();
    let r = (am / p.mu).sqrt();
    Ok(ReducedParams {
        mu_t: am / p.lambda * r,
        sigma_t: p.sigma / p.lambda * r,
        gamma: p.gamma,
        case: if m > 0.0 {
            ReducedCase::Plus
        } else {
            ReducedCase::Minus
        },
        time_scale: p.lambda / r,
        amp_scale: am.sqrt(),
    })
}

pub fn reduced_field(rp: &ReducedParams, v: [f64; 2]) -> [f64; 2] {
    let x = v[0] * v[0] + v[1] * v[1];
    let (a, b) = rp.ab(x);
    [a * v[0] - b * v[1] - 1.0, a * v[1] + b * v[0]]
}

/// Cubic in x = |v|² whose positive roots are the reduced equilibria.
pub fn x_cubic(rp: &ReducedParams) -> Cubic {
    let m = rp.mu_t;
    let g = rp.gamma;
    let al = rp.alpha();
    let s = rp.sigma_t;
    Cubic::new(
        m * m * (1.0 + g * g),
        -2.0 * m * (al + s * g),
        al * al + s * s,
        -1.0,
    )
}

/// (det J, tr J) of the reduced field at an equilibrium with |v|² = x.
pub fn det_tr(rp: &ReducedParams, x: f64) -> (f64, f64) {
    let (a, b) = rp.ab(x);
    let da = -rp.mu_t;
    let db = -rp.mu_t * rp.gamma;
    let det = a * (a + 2.0 * x * da) + b * (b + 2.0 * x * db);
    let tr = 2.0 * (rp.alpha() - 2.0 * rp.mu_t * x);
    (det, tr)
}

/// Solve [A −B; B A][vR; vI] = [1; 0].
pub fn recover_v(rp: &ReducedParams, x: f64) -> Result<[f64; 2]> {
    let (a, b) = rp.ab(x);
    let d = a * a + b * b;
    if d < 1e-14 {
        return Err(Error::Internal(format!(
            "singular equilibrium system at x = {x}"
        )));
    }
    Ok([a / d, -b / d])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedEquilibrium {
    pub v: [f64; 2],
    pub x: f64,
    pub det_j: f64,
    pub tr_j: f64,
    pub stable: bool,
    pub hyperbolic: bool,
    pub multiplicity: u8,
}

pub fn equilibria_reduced(rp: &ReducedParams) -> Result<Vec<ReducedEquilibrium>> {
    if !(rp.mu_t > 0.0) && rp.sigma_t == 0.0 {
        return Err(Error::InvalidParams(
            "reduced system has no equilibria for mu_t = sigma_t = 0".into(),
        ));
    }
    let c = x_cubic(rp);
    let roots = if c.c3 == 0.0 {
        // μ̃ = 0: (α² + σ̃²) x = 1
        vec![(1.0 / c.c1, 1u8)]
    } else {
        let r = solve_cubic_real(&c, TOL_RESID)?;
        r.roots.into_iter().zip(r.multiplicities).collect()
    };
    let mut out = Vec::new();
    for (x, mult) in roots {
        if !(x > 0.0) {
            continue;
        }
        let v = recover_v(rp, x)?;
        let (det, tr) = det_tr(rp, x);
        let hyperbolic = mult == 1 && det.abs() > TOL_HYP && !(det > 0.0 && tr.abs() <= TOL_HYP);
        out.push(ReducedEquilibrium {
            v,
            x,
            det_j: det,
            tr_j: tr,
            stable: hyperbolic && det > 0.0 && tr < 0.0,
            hyperbolic,
            multiplicity: mult,
        });
    }
    Ok(out)
}

/// x − 1/(A(x)² + B(x)²); zero exactly at equilibria.
pub fn witch_residual(rp: &ReducedParams, x: f64) -> f64 {
    let (a, b) = rp.ab(x);
    x - 1.0 / (a * a + b * b)
}

/// Set of (σ̃, μ̃), μ̃ > 0, for which the Plus-case equilibrium has |v|² = x.
/// At x = 1 this degenerates to the two lines σ̃ − μ̃γ = ±1, sampled for
/// μ̃ ∈ (0, 4].
pub fn level_set_ellipse(x: f64, gamma: f64, n_pts: usize) -> Result<LocusCurve> {
    if !(x > 0.0) {
        return Err(Error::InvalidParams(format!("x must be positive (got {x})")));
    }
    let name = format!("level_x_{x}");
    if x == 1.0 {
        let mus: Vec<f64> = (1..=n_pts).map(|k| 4.0 * k as f64 / n_pts as f64).collect();
        let segs = [1.0, -1.0]
            .iter()
            .map(|s| mus.iter().map(|&m| [s + m * gamma, m]).collect())
            .collect();
        return Ok(LocusCurve {
            name,
            segments: segs,
        });
    }
    let rx = x.sqrt();
    let base = if x < 1.0 { -FRAC_PI_2 } else { FRAC_PI_2 };
    let pts = (0..n_pts)
        .map(|k| {
            let th = base + PI * (k as f64 + 0.5) / n_pts as f64;
            let m = th.cos() / (rx * (1.0 - x));
            [th.sin() / rx + m * gamma * x, m]
        })
        .collect();
    Ok(LocusCurve {
        name,
        segments: vec![pts],
    })
}

/// The trJ = 0 curve: μ̃²(1+γ²)/8 − γσ̃μ̃/2 + σ̃²/2 = 1 (x = 1/2 level set).
pub fn tr_zero_ellipse_residual(sigma_t: f64, mu_t: f64, gamma: f64) -> f64 {
    mu_t * mu_t * (1.0 + gamma * gamma) / 8.0 - gamma * sigma_t * mu_t / 2.0
        + sigma_t * sigma_t / 2.0
        - 1.0
}

/// Point of the det J = 0 curve (γ = 0) at double root x ∈ [1/3, 1).
pub fn det_curve_point(x: f64) -> [f64; 2] {
    [
        ((3.0 * x - 1.0) / (2.0 * x * x)).max(0.0).sqrt(),
        1.0 / (x * (2.0 * (1.0 - x)).sqrt()),
    ]
}

/// Start of the three-equilibria region on the μ̃ axis: (0, 3√3/2).
pub fn landmark_start() -> [f64; 2] {
    det_curve_point(1.0 / 3.0)
}

/// Cusp of the det J = 0 curve: (3/(2√2), 3√3/(2√2)).
pub fn landmark_cusp() -> [f64; 2] {
    det_curve_point(2.0 / 3.0)
}

/// Where the det J = 0 curve meets the trJ = 0 ellipse: (√10/3, 4√2/3).
pub fn landmark_meet() -> [f64; 2] {
    det_curve_point(0.75)
}

/// μ̃ threshold separating Hopf from saddle-node torus birth.
pub fn torus_threshold() -> f64 {
    4.0 * 2f64.sqrt() / 3.0
}

/// The det J = 0 curve for x ∈ [1/3, 1), both signs of σ̃.
pub fn det_zero_curve(n_pts: usize) -> LocusCurve {
    let xs = crate::linspace(1.0 / 3.0, 1.0 - 1e-3, n_pts);
    let pos: Vec<[f64; 2]> = xs.iter().map(|&x| det_curve_point(x)).collect();
    let neg = pos.iter().map(|p| [-p[0], p[1]]).collect();
    LocusCurve {
        name: "det_zero".into(),
        segments: vec![pos, neg],
    }
}

/// Boundary of the region where a stable equilibrium exists (γ = 0): the
/// trJ = 0 ellipse arcs with μ̃ ≤ (4/√5)|σ̃| joined to the det J = 0 curve
/// for x ∈ [3/4, 1).
pub fn stable_boundary_curve(n_pts: usize) -> LocusCurve {
    let s_meet = landmark_meet()[0];
    let mut pos = Vec::new();
    for x in crate::linspace(1.0 - 1e-3, 0.75, n_pts) {
        pos.push(det_curve_point(x));
    }
    for s in crate::linspace(s_meet, 2f64.sqrt(), n_pts).into_iter().skip(1) {
        pos.push([s, (8.0 * (1.0 - s * s / 2.0)).max(0.0).sqrt()]);
    }
    let neg = pos.iter().map(|p| [-p[0], p[1]]).collect();
    LocusCurve {
        name: "stable_boundary".into(),
        segments: vec![pos, neg],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SLRegionTag {
    UniqueStable,
    TwoStableOneUnstable,
    OneStableTwoUnstable,
    ThreeNoneStable,
    UniqueUnstableTorus,
}

impl SLRegionTag {
    pub fn from_counts(n: usize, stable: usize) -> SLRegionTag {
        match (n, stable) {
            (1, 1) => SLRegionTag::UniqueStable,
            (1, _) => SLRegionTag::UniqueUnstableTorus,
            (_, 0) => SLRegionTag::ThreeNoneStable,
            (_, 1) => SLRegionTag::OneStableTwoUnstable,
            _ => SLRegionTag::TwoStableOneUnstable,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SLRegionTag::UniqueStable => "UniqueStable",
            SLRegionTag::TwoStableOneUnstable => "TwoStableOneUnstable",
            SLRegionTag::OneStableTwoUnstable => "OneStableTwoUnstable",
            SLRegionTag::ThreeNoneStable => "ThreeNoneStable",
            SLRegionTag::UniqueUnstableTorus => "UniqueUnstableTorus",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SLRegion {
    pub tag: SLRegionTag,
    pub n_equilibria: usize,
    pub n_stable: usize,
    pub boundary: bool,
}

/// Region by counting equilibria of the reduced system.
pub fn classify_region_sl(rp: &ReducedParams) -> Result<SLRegion> {
    let eq = equilibria_reduced(rp)?;
    let n = eq.iter().map(|e| e.multiplicity as usize).sum::<usize>();
    let n_stable = eq.iter().filter(|e| e.stable).count();
    let scale = rp.mu_t.powi(2) + rp.sigma_t.powi(2) + 1.0;
    let boundary = eq.iter().any(|e| {
        e.multiplicity > 1
            || e.det_j.abs() <= TOL_CURVE * scale
            || (e.det_j > 0.0 && e.tr_j.abs() <= TOL_CURVE * scale)
    });
    let n_distinct = if n == 3 { 3 } else { 1 };
    Ok(SLRegion {
        tag: SLRegionTag::from_counts(n_distinct, n_stable),
        n_equilibria: n_distinct,
        n_stable,
        boundary,
    })
}

/// μ̃ on the lower (x ∈ [1/3, 2/3]) and upper (x ∈ [2/3, 1)) det J = 0
/// branches at a given |σ̃|, γ = 0.
fn det_branches(s: f64) -> (Option<f64>, Option<f64>) {
    let s2 = s * s;
    let disc = 9.0 - 8.0 * s2;
    if disc < 0.0 {
        return (None, None);
    }
    let sq = disc.sqrt();
    let x_lo = 2.0 / (3.0 + sq);
    let lo = Some(det_curve_point(x_lo)[1]);
    let up = if s > 1.0 {
        let x_up = (3.0 + sq) / (4.0 * s2);
        if x_up < 1.0 {
            Some(det_curve_point(x_up)[1])
        } else {
            None
        }
    } else {
        None
    };
    (lo, up)
}

/// Region from the closed-form boundary curves (γ = 0 only).
pub fn classify_region_sl_analytic(sigma_t: f64, mu_t: f64) -> SLRegion {
    let s = sigma_t.abs();
    let m = mu_t;
    let tol = TOL_CURVE;
    let s_cusp = landmark_cusp()[0];
    let s_meet = landmark_meet()[0];
    let ell = m * m / 8.0 + s * s / 2.0 - 1.0;
    let (lo, up) = det_branches(s);
    let mut boundary = (s - s_cusp).abs() <= tol || (s - s_meet).abs() <= tol;

    let three = match (lo, up) {
        (Some(l), _) if s <= 1.0 => {
            boundary |= (m - l).abs() <= tol;
            m > l
        }
        (Some(l), Some(u)) => {
            boundary |= (m - l).abs() <= tol || (m - u).abs() <= tol;
            m > l && m < u
        }
        (Some(l), None) => {
            // s slightly above 1 where the upper branch runs off to μ̃ = ∞
            boundary |= (m - l).abs() <= tol;
            m > l
        }
        _ => false,
    };
    let (n, n_stable) = if three {
        boundary |= ell.abs() <= tol;
        // the smallest root is a stable node iff it lies above x = 1/2,
        // i.e. P(1/2) < 0 with 1/2 left of the local maximum of P
        (3, if ell < 0.0 && s > 0.5 * m { 2 } else { 1 })
    } else {
        let stable = if s <= 1.0 {
            true
        } else if s < s_meet {
            let u = up.unwrap_or(f64::INFINITY);
            boundary |= (m - u).abs() <= tol;
            m < u
        } else {
            boundary |= ell.abs() <= tol;
            ell < 0.0
        };
        (1, stable as usize)
    };
    SLRegion {
        tag: SLRegionTag::from_counts(n, n_stable),
        n_equilibria: n,
        n_stable,
        boundary,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TorusBirth {
    SaddleNode,
    Hopf,
    Boundary,
}

pub fn torus_birth_type(mu_t: f64) -> TorusBirth {
    let th = torus_threshold();
    if (mu_t - th).abs() <= TOL_CURVE {
        TorusBirth::Boundary
    } else if mu_t > th {
        TorusBirth::SaddleNode
    } else {
        TorusBirth::Hopf
    }
}

/// (det J, tr J, stable) of the u-system at an equilibrium with |u|² = x.
pub fn unreduced_stability(x: f64, p: &SLParams) -> (f64, f64, bool) {
    let m = p.mu + p.eps;
    let det = (m - x) * (m - 3.0 * x) + (p.sigma - p.gamma * x) * (p.sigma - 3.0 * p.gamma * x);
    let tr = 2.0 * (m - 2.0 * x);
    (det, tr, det > TOL_HYP && tr < -TOL_HYP)
}

/// u̇ = (μ+ε + iσ)u − (1+iγ)|u|²u − λ√μ
pub fn u_field(p: &SLParams, u: [f64; 2]) -> [f64; 2] {
    let x = u[0] * u[0] + u[1] * u[1];
    let a = p.mu + p.eps - x;
    let b = p.sigma - p.gamma * x;
    [
        a * u[0] - b * u[1] - p.lambda * p.mu.max(0.0).sqrt(),
        a * u[1] + b * u[0],
    ]
}

/// |σ − γ(μ+ε)| ≤ λ√(μ/(μ+ε)), i.e. |σ̃ − γμ̃| ≤ 1 in the Plus case.
pub fn in_phase_lock_strip(rp: &ReducedParams) -> bool {
    rp.case == ReducedCase::Plus && (rp.sigma_t - rp.gamma * rp.mu_t).abs() <= 1.0
}
