//! Browser bindings: reduced-plane phase diagram, beam pattern and
//! co-rotating trajectories.

use ffnet::beam::{pattern, ArrayConfig};
use ffnet::reduced::{classify_region_sl, ReducedParams, SLRegionTag};
use ffnet::sim::{classify_attractor, integrate_sampled, SystemSpec};
use wasm_bindgen::prelude::*;

fn region_code(tag: SLRegionTag) -> u8 {
    match tag {
        SLRegionTag::UniqueStable => 0,
        SLRegionTag::TwoStableOneUnstable => 1,
        SLRegionTag::OneStableTwoUnstable => 2,
        SLRegionTag::ThreeNoneStable => 3,
        SLRegionTag::UniqueUnstableTorus => 4,
    }
}

/// Region codes over an nx × ny grid, row-major with μ̃ descending so row 0
/// is the top of the image. 255 marks a point that could not be classified.
#[wasm_bindgen]
pub fn phase_diagram(
    sigma_min: f64,
    sigma_max: f64,
    nx: usize,
    mu_min: f64,
    mu_max: f64,
    ny: usize,
    gamma: f64,
) -> Vec<u8> {
    let mut out = Vec::with_capacity(nx * ny);
    for mu in ffnet::linspace(mu_max, mu_min, ny) {
        for s in ffnet::linspace(sigma_min, sigma_max, nx) {
            let code = classify_region_sl(&ReducedParams::plus(s, mu, gamma))
                .map(|r| region_code(r.tag))
                .unwrap_or(255);
            out.push(code);
        }
    }
    out
}

/// Gain |A| at `n_phi` emission angles spanning [−π/2, π/2].
#[wasm_bindgen]
pub fn beam_pattern(n_elements: usize, kd: f64, theta: f64, n_phi: usize) -> Vec<f64> {
    let h = std::f64::consts::FRAC_PI_2;
    let phis = ffnet::linspace(-h, h, n_phi.max(2));
    let cfg = ArrayConfig { n: n_elements.max(1), k: 1.0, d: kd, theta };
    pattern(&cfg, &phis).map(|p| p.gain).unwrap_or_default()
}

/// Reduced-system orbit from (v0_re, v0_im) as interleaved [re, im, re, im, ...].
#[wasm_bindgen]
pub fn reduced_trajectory(
    sigma_t: f64,
    mu_t: f64,
    gamma: f64,
    v0_re: f64,
    v0_im: f64,
    t_end: f64,
    dt: f64,
    stride: usize,
) -> Vec<f64> {
    let s = SystemSpec::SL2Reduced(ReducedParams::plus(sigma_t, mu_t, gamma));
    match integrate_sampled(&s, &[v0_re, v0_im], t_end, dt, stride) {
        Ok(tr) => tr.states.into_iter().flatten().collect(),
        Err(_) => Vec::new(),
    }
}

/// Attractor class reached from (v0_re, v0_im): "FixedPoint", "Torus", ...
#[wasm_bindgen]
pub fn reduced_attractor(sigma_t: f64, mu_t: f64, gamma: f64, v0_re: f64, v0_im: f64) -> String {
    let s = SystemSpec::SL2Reduced(ReducedParams::plus(sigma_t, mu_t, gamma));
    match classify_attractor(&s, &[v0_re, v0_im], 200.0, 100.0, 5e-3) {
        Ok(r) => r.class.name().to_string(),
        Err(e) => format!("error: {e}"),
    }
}
