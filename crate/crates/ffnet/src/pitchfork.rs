//! Two- and three-cell pitchfork feedforward networks.
//!
//! ẋ = μx − x³, ẏ = (μ+ε)y − y³ − λx (and ż = (μ+ε)z − z³ + λx for the
//! three-cell variant).

use crate::cubic::{critical_mu_roots, solve_cubic_real, Cubic, RealRoots};
use crate::error::{Error, Result};
use crate::sim::{self, SystemSpec};
use crate::tol::{TOL_CURVE, TOL_HYP, TOL_RESID};
use crate::LocusCurve;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PitchforkParams {
    pub mu: f64,
    pub eps: f64,
    pub lambda: f64,
}

impl PitchforkParams {
    pub fn new(mu: f64, eps: f64, lambda: f64) -> Self {
        PitchforkParams { mu, eps, lambda }
    }

    fn check(&self) -> Result<()> {
        if self.lambda > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidLambda(self.lambda))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Stability {
    StableNode,
    Saddle,
    Source,
    NonHyperbolic,
}

/// Classify real eigenvalues with the hyperbolicity band `tol_hyp`.
pub fn classify_eigs(eigs: &[f64]) -> Stability {
    if eigs.iter().any(|e| e.abs() <= TOL_HYP) {
        Stability::NonHyperbolic
    } else if eigs.iter().all(|&e| e < 0.0) {
        Stability::StableNode
    } else if eigs.iter().all(|&e| e > 0.0) {
        Stability::Source
    } else {
        Stability::Saddle
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Equilibrium2D {
    pub x: f64,
    pub y: f64,
    pub eig1: f64,
    pub eig2: f64,
    pub stability: Stability,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Equilibrium3D {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub eigs: [f64; 3],
    pub stability: Stability,
}

pub fn vector_field(p: &PitchforkParams, x: f64, y: f64) -> [f64; 2] {
    [
        p.mu * x - x * x * x,
        (p.mu + p.eps) * y - y * y * y - p.lambda * x,
    ]
}

/// y-roots of (μ+ε)y − y³ − λx = 0 for a given x.
fn y_roots(p: &PitchforkParams, x: f64) -> Result<RealRoots> {
    solve_cubic_real(
        &Cubic::new(-1.0, 0.0, p.mu + p.eps, -p.lambda * x),
        TOL_RESID,
    )
}

fn x_values(mu: f64) -> Vec<f64> {
    if mu > 0.0 {
        let s = mu.sqrt();
        vec![-s, 0.0, s]
    } else {
        vec![0.0]
    }
}

pub fn equilibria(p: &PitchforkParams) -> Result<Vec<Equilibrium2D>> {
    p.check()?;
    let mut out = Vec::new();
    for x in x_values(p.mu) {
        for &y in &y_roots(p, x)?.roots {
            let eig1 = p.mu - 3.0 * x * x;
            let eig2 = p.mu + p.eps - 3.0 * y * y;
            out.push(Equilibrium2D {
                x,
                y,
                eig1,
                eig2,
                stability: classify_eigs(&[eig1, eig2]),
            });
        }
    }
    out.sort_by(|a, b| (a.x, a.y).partial_cmp(&(b.x, b.y)).unwrap());
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RegionTag {
    EpsNegPreBif,
    EpsNegPostBif,
    ZeroEpsPre,
    ZeroEpsPost,
    SmallEpsFourSink,
    SmallEpsTwoSink,
    SmallEpsPostMu2,
    LargeEps,
    MuNegOne,
    MuNegThree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub total: usize,
    pub stable: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionP {
    pub tag: RegionTag,
    pub expected_counts: Counts,
    /// Within tol_curve of a separating curve.
    pub boundary: bool,
}

/// Region of the (μ, ε) plane, measured in λ-units.
pub fn classify_region(p: &PitchforkParams) -> Result<RegionP> {
    p.check()?;
    let m = p.mu / p.lambda;
    let e = p.eps / p.lambda;
    let near = |a: f64, b: f64| (a - b).abs() <= TOL_CURVE * b.abs().max(1.0);
    let mut boundary = near(m, 0.0) || near(m + e, 0.0) || near(e, 1.0);
    boundary |= e != 0.0 && near(e, 0.0);

    if m <= 0.0 {
        let (tag, counts) = if m + e < 0.0 {
            (RegionTag::MuNegOne, Counts { total: 1, stable: 1 })
        } else {
            (RegionTag::MuNegThree, Counts { total: 3, stable: 2 })
        };
        return Ok(RegionP {
            tag,
            expected_counts: counts,
            boundary,
        });
    }

    let crit = critical_mu_roots(e, 1.0)?;
    for &c in &crit.roots {
        boundary |= near(m, c);
    }
    let x0_count = if m + e > 0.0 { 3 } else { 1 };
    let few = Counts {
        total: x0_count + 2,
        stable: 2,
    };
    let many = Counts {
        total: x0_count + 6,
        stable: 4,
    };
    let (tag, counts) = if e.abs() <= TOL_CURVE {
        let mu2 = 1.5 * 3f64.sqrt();
        if m < mu2 {
            (RegionTag::ZeroEpsPre, few)
        } else {
            (RegionTag::ZeroEpsPost, many)
        }
    } else if e < 0.0 {
        let mu_star = crit.roots[0];
        if m < mu_star {
            (RegionTag::EpsNegPreBif, few)
        } else {
            (RegionTag::EpsNegPostBif, many)
        }
    } else if e < 1.0 {
        let (mu1, mu2) = (crit.roots[0], crit.roots[1]);
        if m < mu1 {
            (RegionTag::SmallEpsFourSink, many)
        } else if m < mu2 {
            (RegionTag::SmallEpsTwoSink, few)
        } else {
            (RegionTag::SmallEpsPostMu2, many)
        }
    } else {
        (RegionTag::LargeEps, many)
    };
    Ok(RegionP {
        tag,
        expected_counts: counts,
        boundary,
    })
}

/// Count equilibria and stable nodes by direct enumeration.
pub fn enumerate_counts(p: &PitchforkParams) -> Result<Counts> {
    let eq = equilibria(p)?;
    Ok(Counts {
        total: eq.len(),
        stable: eq
            .iter()
            .filter(|e| e.stability == Stability::StableNode)
            .count(),
    })
}

/// λ(ε) = √(4(μ+ε)³/(27μ)) where p₊ has a double root, for ε ≥ −μ.
pub fn saddle_node_lambda(mu: f64, eps: f64) -> f64 {
    (4.0 * (mu + eps).max(0.0).powi(3) / (27.0 * mu)).sqrt()
}

/// Sampled saddle-node locus in the (ε, λ) plane. When ε = −μ lies in the
/// range the hysteresis point (−μ, 0) is the first point of the curve.
pub fn saddle_node_locus(mu: f64, eps_range: (f64, f64), n_pts: usize) -> Result<LocusCurve> {
    if !(mu > 0.0) {
        return Err(Error::InvalidMu(mu));
    }
    let (lo, hi) = (eps_range.0.min(eps_range.1), eps_range.0.max(eps_range.1));
    let mut pts = Vec::new();
    let start = lo.max(-mu);
    if -mu >= lo && -mu <= hi {
        pts.push([-mu, 0.0]);
    }
    if start <= hi {
        for e in crate::linspace(start, hi, n_pts) {
            if pts.last().map_or(false, |q| q[0] == e) {
                continue;
            }
            pts.push([e, saddle_node_lambda(mu, e)]);
        }
    }
    Ok(LocusCurve {
        name: "saddle_node".into(),
        segments: vec![pts],
    })
}

/// The hysteresis point of the (ε, λ) unfolding at fixed μ.
pub fn hysteresis_point(mu: f64) -> [f64; 2] {
    [-mu, 0.0]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpRecord {
    pub mu: f64,
    pub x_sign: i8,
    pub y_initial: f64,
    pub y_final: f64,
    pub dy: f64,
}

fn pre_jump_y(eps: f64, sign: f64) -> f64 {
    if eps <= 0.0 {
        0.0
    } else {
        sign * eps.sqrt()
    }
}

/// Response of y to a sudden switch of μ from 0 to each value in `mu_values`,
/// with x held on its attractor x = s√μ. Both x-signs are reported.
pub fn jump_response(
    eps: f64,
    lambda: f64,
    mu_values: &[f64],
    initial_y_sign: i8,
) -> Result<Vec<JumpRecord>> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidLambda(lambda));
    }
    let sign = if initial_y_sign < 0 { -1.0 } else { 1.0 };
    let y0 = pre_jump_y(eps, sign);
    let mut out = Vec::with_capacity(2 * mu_values.len());
    for &mu in mu_values {
        if !(mu > 0.0) {
            return Err(Error::InvalidMu(mu));
        }
        for s in [1i8, -1] {
            let p = PitchforkParams::new(mu, eps, lambda);
            let x = s as f64 * mu.sqrt();
            let spec = SystemSpec::Pitchfork2(p);
            let end = sim::settle(&spec, &[x, y0], sim::default_dt(&spec), settle_time(&p))?;
            out.push(JumpRecord {
                mu,
                x_sign: s,
                y_initial: y0,
                y_final: end[1],
                dy: (end[1] - y0).abs(),
            });
        }
    }
    Ok(out)
}

fn settle_time(p: &PitchforkParams) -> f64 {
    2e4 / p.lambda + 40.0 / p.mu.abs().max(1e-12)
}

/// Full coupled integration of a jump to `mu_new`: x starts at s·δ₀
/// instead of being pinned, y starts on its pre-jump equilibrium (y sign +).
pub fn jump_trajectory(p: &PitchforkParams, branch_sign: i8, mu_new: f64) -> Result<JumpRecord> {
    p.check()?;
    if !(mu_new > 0.0) {
        return Err(Error::InvalidMu(mu_new));
    }
    let q = PitchforkParams::new(mu_new, p.eps, p.lambda);
    let s = if branch_sign < 0 { -1.0 } else { 1.0 };
    let y0 = pre_jump_y(q.eps, 1.0);
    let spec = SystemSpec::Pitchfork2(q);
    let dt = 0.01f64.min(0.2 / (q.mu + q.eps.abs() + q.lambda));
    let end = sim::settle(&spec, &[s * crate::tol::DELTA0, y0], dt, settle_time(&q))?;
    Ok(JumpRecord {
        mu: mu_new,
        x_sign: s as i8,
        y_initial: y0,
        y_final: end[1],
        dy: (end[1] - y0).abs(),
    })
}

/// Largest ε for which μ₁*(ε) stays below μ0, from μ₁* ≈ 4ε³/(27λ²).
pub fn sensitivity_epsilon_bound(mu0: f64, lambda: f64) -> f64 {
    3.0 * mu0.cbrt() * lambda.powf(2.0 / 3.0) / 4f64.cbrt()
}

pub fn three_cell_vector_field(p: &PitchforkParams, v: [f64; 3]) -> [f64; 3] {
    let [x, y, z] = v;
    let m = p.mu + p.eps;
    [
        p.mu * x - x * x * x,
        m * y - y * y * y - p.lambda * x,
        m * z - z * z * z + p.lambda * x,
    ]
}

/// Equilibria of the three-cell network where cell one drives y with −λx
/// and z with +λx.
pub fn three_cell_equilibria(p: &PitchforkParams) -> Result<Vec<Equilibrium3D>> {
    p.check()?;
    let mut out = Vec::new();
    for x in x_values(p.mu) {
        let ys = y_roots(p, x)?;
        let zs = y_roots(p, -x)?;
        for &y in &ys.roots {
            for &z in &zs.roots {
                let eigs = [
                    p.mu - 3.0 * x * x,
                    p.mu + p.eps - 3.0 * y * y,
                    p.mu + p.eps - 3.0 * z * z,
                ];
                out.push(Equilibrium3D {
                    x,
                    y,
                    z,
                    eigs,
                    stability: classify_eigs(&eigs),
                });
            }
        }
    }
    out.sort_by(|a, b| (a.x, a.y, a.z).partial_cmp(&(b.x, b.y, b.z)).unwrap());
    Ok(out)
}
