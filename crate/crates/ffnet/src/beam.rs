//! Array factor of an N-element uniform linear array steered by the
//! phase-lock angle θ.

use crate::error::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct ArrayConfig {
    pub n: usize,
    /// Free-space wave number.
    pub k: f64,
    /// Element spacing.
    pub d: f64,
    /// Phase-lock angle between neighbouring elements (radians).
    pub theta: f64,
}

impl ArrayConfig {
    pub fn kd(&self) -> f64 {
        self.k * self.d
    }
}

/// A(Ψ) = sin(N(Ψ+θ)/2) / (N sin((Ψ+θ)/2)) · e^{i(N−1)(Ψ+θ)/2}, as (re, im).
pub fn array_factor(cfg: &ArrayConfig, psi: f64) -> [f64; 2] {
    let n = cfg.n.max(1);
    let nf = n as f64;
    let a = psi + cfg.theta;
    let den = (a / 2.0).sin();
    let mag = if den.abs() < 1e-9 {
        // limit: ratio → ±1 depending on the branch of sin
        let k = (a / (2.0 * std::f64::consts::PI)).round();
        if (k as i64 * (n as i64 - 1)) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    } else {
        (nf * a / 2.0).sin() / (nf * den)
    };
    let ph = (nf - 1.0) * a / 2.0;
    [mag * ph.cos(), mag * ph.sin()]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeamPattern {
    pub phi: Vec<f64>,
    pub gain: Vec<f64>,
    /// Steering angle (radians) of the largest |A|.
    pub main_lobe: f64,
}

/// |A(kd·sin φ)| over the given emission angles.
pub fn pattern(cfg: &ArrayConfig, phi_grid: &[f64]) -> Result<BeamPattern> {
    if cfg.n < 1 {
        return Err(Error::InvalidParams("array needs at least one element".into()));
    }
    if phi_grid.is_empty() {
        return Err(Error::InvalidParams("empty angle grid".into()));
    }
    let gain: Vec<f64> = phi_grid
        .iter()
        .map(|&phi| {
            let a = array_factor(cfg, cfg.kd() * phi.sin());
            a[0].hypot(a[1])
        })
        .collect();
    let mut best = 0;
    for (i, g) in gain.iter().enumerate() {
        if *g > gain[best] + 1e-12 {
            best = i;
        }
    }
    Ok(BeamPattern {
        phi: phi_grid.to_vec(),
        main_lobe: phi_grid[best],
        gain,
    })
}

/// Steering angle φ₀ = −asin(θ/kd) where the main lobe points for a given θ.
pub fn steering_angle(kd: f64, theta: f64) -> Option<f64> {
    let s = -theta / kd;
    (s.abs() <= 1.0).then(|| s.asin())
}
