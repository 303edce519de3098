//! Default tolerances and integration settings, kept in one place.

/// Residual tolerance for polished polynomial roots, relative to coefficient scale.
pub const TOL_RESID: f64 = 1e-10;
/// Eigenvalues (or det/trace) inside this band are reported as non-hyperbolic.
pub const TOL_HYP: f64 = 1e-9;
/// Points closer than this to a separating curve are flagged as boundary points.
pub const TOL_CURVE: f64 = 1e-6;
/// Relative amplitude variance below which an attractor is treated as stationary.
pub const TOL_AMP: f64 = 1e-8;
/// Vector-field norm below which a trajectory is considered settled.
pub const TOL_SETTLE: f64 = 1e-8;
/// Discriminant threshold for double roots, relative to scale^4.
pub const TOL_DISC: f64 = 1e-12;
/// Allowed overshoot of the arccos argument in the trigonometric cubic branch.
pub const TOL_ACOS: f64 = 1e-12;
/// Newton polishing iteration cap.
pub const MAX_NEWTON: usize = 50;
/// Basin/jump seed perturbation.
pub const DELTA0: f64 = 1e-6;
/// State norm treated as blow-up.
pub const BLOWUP_NORM: f64 = 1e6;
/// Peak-to-peak amplitude above which a co-rotating signal counts as oscillating.
pub const TORUS_P2P: f64 = 1e-4;

/// Default RK4 step: 1e-3 in units of 1/λ.
pub fn default_dt(lambda: f64) -> f64 {
    1e-3 / lambda
}

/// Default transient length: 200 in units of 1/λ.
pub fn default_transient(lambda: f64) -> f64 {
    200.0 / lambda
}

/// Table of named defaults, written into CLI sidecars.
pub fn table() -> Vec<(&'static str, f64)> {
    vec![
        ("tol_resid", TOL_RESID),
        ("tol_hyp", TOL_HYP),
        ("tol_curve", TOL_CURVE),
        ("tol_amp", TOL_AMP),
        ("tol_settle", TOL_SETTLE),
        ("tol_disc", TOL_DISC),
        ("delta0", DELTA0),
        ("blowup_norm", BLOWUP_NORM),
        ("dt_per_inv_lambda", 1e-3),
        ("transient_per_inv_lambda", 200.0),
    ]
}
