//! Fixed-step RK4 integration, attractor classification, basins, scaling
//! fits and one-parameter branch sweeps.

use crate::error::{Error, Result};
use crate::pitchfork::{self, PitchforkParams, Stability};
use crate::reduced::{
    classify_region_sl, equilibria_reduced, reduce, reduced_field, unreduced_stability,
    ReducedParams, SLParams, SLRegionTag, TorusBirth,
};
use crate::singularity::g_cubic;
use crate::tol::{self, BLOWUP_NORM, TOL_AMP, TOL_RESID, TOL_SETTLE, TORUS_P2P};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SystemSpec {
    Pitchfork2(PitchforkParams),
    Pitchfork3(PitchforkParams),
    Hopf3 {
        mu: f64,
        omega: f64,
        lambda: f64,
        self_coupling: bool,
    },
    SL2Full(SLParams),
    SL2Reduced(ReducedParams),
}

impl SystemSpec {
    pub fn dim(&self) -> usize {
        match self {
            SystemSpec::Pitchfork2(_) => 2,
            SystemSpec::Pitchfork3(_) => 3,
            SystemSpec::Hopf3 { .. } => 6,
            SystemSpec::SL2Full(_) => 4,
            SystemSpec::SL2Reduced(_) => 2,
        }
    }

    /// Characteristic coupling used for default time scales.
    pub fn lambda(&self) -> f64 {
        match self {
            SystemSpec::Pitchfork2(p) | SystemSpec::Pitchfork3(p) => p.lambda,
            SystemSpec::Hopf3 { lambda, .. } => *lambda,
            SystemSpec::SL2Full(p) => p.lambda,
            SystemSpec::SL2Reduced(_) => 1.0,
        }
    }

    pub fn rhs(&self, x: &[f64], out: &mut [f64]) {
        match self {
            SystemSpec::Pitchfork2(p) => {
                let f = pitchfork::vector_field(p, x[0], x[1]);
                out[..2].copy_from_slice(&f);
            }
            SystemSpec::Pitchfork3(p) => {
                let f = pitchfork::three_cell_vector_field(p, [x[0], x[1], x[2]]);
                out[..3].copy_from_slice(&f);
            }
            SystemSpec::Hopf3 {
                mu,
                omega,
                lambda,
                self_coupling,
            } => {
                for j in 0..3 {
                    let (zr, zi) = (x[2 * j], x[2 * j + 1]);
                    let a = mu - (zr * zr + zi * zi);
                    let mut fr = a * zr - omega * zi;
                    let mut fi = a * zi + omega * zr;
                    let (dr, di) = if j == 0 {
                        if *self_coupling {
                            (zr, zi)
                        } else {
                            (0.0, 0.0)
                        }
                    } else {
                        (x[2 * j - 2], x[2 * j - 1])
                    };
                    fr -= lambda * dr;
                    fi -= lambda * di;
                    out[2 * j] = fr;
                    out[2 * j + 1] = fi;
                }
            }
            SystemSpec::SL2Full(p) => {
                let (ar, ai) = (x[0], x[1]);
                let r1 = ar * ar + ai * ai;
                out[0] = (p.mu - r1) * ar - p.omega * ai;
                out[1] = (p.mu - r1) * ai + p.omega * ar;
                let (br, bi) = (x[2], x[3]);
                let r2 = br * br + bi * bi;
                let a = p.mu + p.eps - r2;
                let b = p.omega + p.sigma - p.gamma * r2;
                out[2] = a * br - b * bi - p.lambda * ar;
                out[3] = a * bi + b * br - p.lambda * ai;
            }
            SystemSpec::SL2Reduced(rp) => {
                let f = reduced_field(rp, [x[0], x[1]]);
                out[..2].copy_from_slice(&f);
            }
        }
    }

    pub fn field_norm(&self, x: &[f64]) -> f64 {
        let mut f = vec![0.0; self.dim()];
        self.rhs(x, &mut f);
        f.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

pub fn default_dt(s: &SystemSpec) -> f64 {
    tol::default_dt(s.lambda())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub dt: f64,
}

struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4 {
    fn new(n: usize) -> Self {
        Rk4 {
            k1: vec![0.0; n],
            k2: vec![0.0; n],
            k3: vec![0.0; n],
            k4: vec![0.0; n],
            tmp: vec![0.0; n],
        }
    }

    fn step(&mut self, s: &SystemSpec, x: &mut [f64], dt: f64) {
        let n = x.len();
        s.rhs(x, &mut self.k1);
        for i in 0..n {
            self.tmp[i] = x[i] + 0.5 * dt * self.k1[i];
        }
        s.rhs(&self.tmp, &mut self.k2);
        for i in 0..n {
            self.tmp[i] = x[i] + 0.5 * dt * self.k2[i];
        }
        s.rhs(&self.tmp, &mut self.k3);
        for i in 0..n {
            self.tmp[i] = x[i] + dt * self.k3[i];
        }
        s.rhs(&self.tmp, &mut self.k4);
        for i in 0..n {
            x[i] += dt / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
    }
}

fn check_state(s: &SystemSpec, x0: &[f64], dt: f64) -> Result<()> {
    if x0.len() != s.dim() {
        return Err(Error::InvalidParams(format!(
            "state has dimension {}, system needs {}",
            x0.len(),
            s.dim()
        )));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidParams(format!("dt must be positive (got {dt})")));
    }
    Ok(())
}

fn blown_up(x: &[f64]) -> bool {
    let n2: f64 = x.iter().map(|v| v * v).sum();
    !(n2 <= BLOWUP_NORM * BLOWUP_NORM)
}

/// Integrate and keep every `stride`-th state (the first and last are always kept).
pub fn integrate_sampled(
    s: &SystemSpec,
    x0: &[f64],
    t_end: f64,
    dt: f64,
    stride: usize,
) -> Result<Trajectory> {
    check_state(s, x0, dt)?;
    if !(t_end > 0.0) {
        return Err(Error::InvalidParams(format!("t_end must be positive (got {t_end})")));
    }
    let steps = (t_end / dt).round().max(1.0) as usize;
    let stride = stride.max(1);
    let mut rk = Rk4::new(s.dim());
    let mut x = x0.to_vec();
    let mut times = vec![0.0];
    let mut states = vec![x.clone()];
    for i in 1..=steps {
        rk.step(s, &mut x, dt);
        if blown_up(&x) {
            return Err(Error::Blowup { t: i as f64 * dt });
        }
        if i % stride == 0 || i == steps {
            times.push(i as f64 * dt);
            states.push(x.clone());
        }
    }
    Ok(Trajectory { times, states, dt })
}

pub fn integrate(s: &SystemSpec, x0: &[f64], t_end: f64, dt: f64) -> Result<Trajectory> {
    integrate_sampled(s, x0, t_end, dt, 1)
}

/// Advance a state in place by `t_span` without storing the path.
pub fn advance(s: &SystemSpec, x: &mut [f64], t_span: f64, dt: f64) -> Result<()> {
    check_state(s, x, dt)?;
    let steps = (t_span / dt).round() as usize;
    let mut rk = Rk4::new(s.dim());
    for i in 1..=steps {
        rk.step(s, x, dt);
        if blown_up(x) {
            return Err(Error::Blowup { t: i as f64 * dt });
        }
    }
    Ok(())
}

/// Integrate until the vector field norm drops below tol_settle.
pub fn settle(s: &SystemSpec, x0: &[f64], dt: f64, t_max: f64) -> Result<Vec<f64>> {
    check_state(s, x0, dt)?;
    let mut x = x0.to_vec();
    let mut rk = Rk4::new(s.dim());
    let check_every = ((0.1 / dt).round() as usize).max(1);
    let steps = (t_max / dt).round() as usize;
    for i in 1..=steps {
        rk.step(s, &mut x, dt);
        if i % check_every == 0 {
            if blown_up(&x) {
                return Err(Error::Blowup { t: i as f64 * dt });
            }
            if s.field_norm(&x) < TOL_SETTLE {
                return Ok(x);
            }
        }
    }
    if s.field_norm(&x) < TOL_SETTLE {
        Ok(x)
    } else {
        Err(Error::NonConvergence(format!(
            "field norm {:.3e} after t = {t_max}",
            s.field_norm(&x)
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum AttractorClass {
    FixedPoint,
    PhaseLocked,
    Torus,
    Undetermined,
}

impl AttractorClass {
    pub fn name(&self) -> &'static str {
        match self {
            AttractorClass::FixedPoint => "FixedPoint",
            AttractorClass::PhaseLocked => "PhaseLocked",
            AttractorClass::Torus => "Torus",
            AttractorClass::Undetermined => "Undetermined",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttractorReport {
    pub class: AttractorClass,
    pub amp_mean: f64,
    pub amp_var: f64,
    pub amp_p2p: f64,
    /// Mean of arg(u) over the window (PhaseLocked only).
    pub phase_lock_angle: Option<f64>,
    pub phase_var: f64,
    /// Period of the amplitude oscillation in the co-rotating frame (Torus only).
    pub secondary_period: Option<f64>,
    pub final_state: Vec<f64>,
}

/// Co-rotating signal: z₂ rotated by the phase of z₁ (full), v (reduced).
fn corotating(s: &SystemSpec, x: &[f64]) -> [f64; 2] {
    match s {
        SystemSpec::SL2Full(_) => {
            let r1 = x[0].hypot(x[1]);
            if r1 > 1e-12 {
                let (c, sn) = (x[0] / r1, -x[1] / r1);
                [x[2] * c - x[3] * sn, x[2] * sn + x[3] * c]
            } else {
                [x[2], x[3]]
            }
        }
        _ => [x[0], x[1]],
    }
}

fn unwrap_angles(a: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len());
    let mut off = 0.0;
    for (i, &v) in a.iter().enumerate() {
        if i > 0 {
            let d = v - a[i - 1];
            if d > std::f64::consts::PI {
                off -= 2.0 * std::f64::consts::PI;
            } else if d < -std::f64::consts::PI {
                off += 2.0 * std::f64::consts::PI;
            }
        }
        out.push(v + off);
    }
    out
}

fn mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|a| (a - m) * (a - m)).sum::<f64>() / n;
    (m, var)
}

/// Period from upward crossings of (signal − mean); needs at least two full periods.
fn crossing_period(t: &[f64], a: &[f64], mean: f64) -> Option<f64> {
    let mut ups = Vec::new();
    for i in 1..a.len() {
        let (p, q) = (a[i - 1] - mean, a[i] - mean);
        if p < 0.0 && q >= 0.0 {
            let f = p / (p - q);
            ups.push(t[i - 1] + f * (t[i] - t[i - 1]));
        }
    }
    if ups.len() < 3 {
        return None;
    }
    Some((ups[ups.len() - 1] - ups[0]) / (ups.len() - 1) as f64)
}

pub fn classify_attractor(
    s: &SystemSpec,
    x0: &[f64],
    t_transient: f64,
    t_window: f64,
    dt: f64,
) -> Result<AttractorReport> {
    let full = match s {
        SystemSpec::SL2Full(_) => true,
        SystemSpec::SL2Reduced(_) => false,
        _ => {
            return Err(Error::InvalidParams(
                "attractor classification needs an SL2Full or SL2Reduced system".into(),
            ))
        }
    };
    check_state(s, x0, dt)?;
    let mut x = x0.to_vec();
    advance(s, &mut x, t_transient, dt)?;
    let stride = ((t_window / dt) / 200_000.0).ceil().max(1.0) as usize;
    let tr = integrate_sampled(s, &x, t_window, dt, stride)?;
    let sig: Vec<[f64; 2]> = tr.states.iter().map(|st| corotating(s, st)).collect();
    let amps: Vec<f64> = sig.iter().map(|u| u[0].hypot(u[1])).collect();
    let (amp_mean, amp_var) = mean_var(&amps);
    let amp_p2p = amps.iter().cloned().fold(f64::MIN, f64::max) - amps.iter().cloned().fold(f64::MAX, f64::min);
    let angles = unwrap_angles(&sig.iter().map(|u| u[1].atan2(u[0])).collect::<Vec<_>>());
    let (ang_mean, phase_var) = mean_var(&angles);
    let final_state = tr.states.last().unwrap().clone();

    let stationary = amp_var <= TOL_AMP * amp_mean * amp_mean && phase_var <= TOL_AMP;
    let at_rest = final_state.iter().all(|v| v.abs() < 1e-6);
    let period = if amp_p2p > TORUS_P2P {
        crossing_period(&tr.times, &amps, amp_mean)
    } else {
        None
    };
    let class = if full && at_rest {
        AttractorClass::FixedPoint
    } else if stationary {
        if full {
            AttractorClass::PhaseLocked
        } else {
            AttractorClass::FixedPoint
        }
    } else if period.is_some() {
        AttractorClass::Torus
    } else {
        AttractorClass::Undetermined
    };
    let wrap = |a: f64| {
        let t = a.rem_euclid(2.0 * std::f64::consts::PI);
        if t > std::f64::consts::PI {
            t - 2.0 * std::f64::consts::PI
        } else {
            t
        }
    };
    Ok(AttractorReport {
        class,
        amp_mean,
        amp_var,
        amp_p2p,
        phase_lock_angle: (class == AttractorClass::PhaseLocked).then(|| wrap(ang_mean)),
        phase_var,
        secondary_period: if class == AttractorClass::Torus { period } else { None },
        final_state,
    })
}

/// How a torus appeared between two reduced parameter points: Hopf if the
/// previously stable equilibrium survives as an unstable focus, saddle-node
/// if it has disappeared.
pub fn torus_birth_numeric(prev_v: [f64; 2], next: &ReducedParams) -> Result<TorusBirth> {
    let eq = equilibria_reduced(next)?;
    let r = prev_v[0].hypot(prev_v[1]);
    let near = eq
        .iter()
        .map(|e| ((e.v[0] - prev_v[0]).hypot(e.v[1] - prev_v[1]), e))
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(match near {
        Some((d, e)) if d < 0.25 * (1.0 + r) && e.det_j > 0.0 && e.tr_j > 0.0 => TorusBirth::Hopf,
        _ => TorusBirth::SaddleNode,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BasinGrid {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub nx: usize,
    pub ny: usize,
}

impl BasinGrid {
    /// 201×201 over [−2√μ−1, 2√μ+1]².
    pub fn default_for(p: &PitchforkParams) -> Self {
        let r = 2.0 * p.mu.max(0.0).sqrt() + 1.0;
        BasinGrid {
            x_range: (-r, r),
            y_range: (-r, r),
            nx: 201,
            ny: 201,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasinMap {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Row-major over (y, x): labels[j * nx + i] for (xs[i], ys[j]); index into
    /// `equilibria`, or −1 when the trajectory did not reach a sink.
    pub labels: Vec<i32>,
    pub equilibria: Vec<pitchfork::Equilibrium2D>,
}

impl BasinMap {
    pub fn distinct_labels(&self) -> Vec<i32> {
        let mut l: Vec<i32> = self.labels.iter().copied().filter(|&v| v >= 0).collect();
        l.sort_unstable();
        l.dedup();
        l
    }
}

/// Step used for basin integrations, in units of 1/λ.
pub const BASIN_DT: f64 = 1e-2;

pub fn basin_map(p: &PitchforkParams, grid: &BasinGrid, dt: Option<f64>, t_max: Option<f64>) -> Result<BasinMap> {
    if !(p.mu > 0.0) {
        return Err(Error::InvalidMu(p.mu));
    }
    if grid.nx < 1 || grid.ny < 1 {
        return Err(Error::InvalidParams("empty basin grid".into()));
    }
    let eq = pitchfork::equilibria(p)?;
    let sinks: Vec<(usize, f64, f64, f64)> = eq
        .iter()
        .enumerate()
        .filter(|(_, e)| e.stability == Stability::StableNode)
        .map(|(i, e)| (i, e.x, e.y, e.eig1.abs().min(e.eig2.abs())))
        .collect();
    let mut dmin = f64::INFINITY;
    for (i, a) in eq.iter().enumerate() {
        for b in &eq[i + 1..] {
            dmin = dmin.min((a.x - b.x).hypot(a.y - b.y));
        }
    }
    let radius = (0.01 * dmin).min(1e-3);
    let slowest = sinks.iter().map(|s| s.3).fold(f64::INFINITY, f64::min);
    let dt = dt.unwrap_or(BASIN_DT / p.lambda);
    let t_max = t_max.unwrap_or(200.0 / p.lambda + 60.0 / slowest.max(1e-9));
    let xs = crate::linspace(grid.x_range.0, grid.x_range.1, grid.nx);
    let ys = crate::linspace(grid.y_range.0, grid.y_range.1, grid.ny);
    let spec = SystemSpec::Pitchfork2(*p);
    let cells: Vec<(f64, f64)> = ys.iter().flat_map(|&y| xs.iter().map(move |&x| (x, y))).collect();
    let steps = (t_max / dt).round() as usize;
    let labels = crate::par_map(&cells, |&(x, y)| {
        let mut st = [x, y];
        let mut rk = Rk4::new(2);
        for _ in 0..steps {
            for s in &sinks {
                if (st[0] - s.1).hypot(st[1] - s.2) < radius {
                    return s.0 as i32;
                }
            }
            rk.step(&spec, &mut st, dt);
            if blown_up(&st) {
                return -1;
            }
        }
        -1
    });
    Ok(BasinMap {
        xs,
        ys,
        labels,
        equilibria: eq,
    })
}

/// System families swept in μ for amplitude scaling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ScalingFamily {
    SL2Full {
        eps: f64,
        sigma: f64,
        omega: f64,
        lambda: f64,
        gamma: f64,
    },
    Hopf3 {
        omega: f64,
        lambda: f64,
        self_coupling: bool,
    },
}

impl ScalingFamily {
    pub fn spec(&self, mu: f64) -> SystemSpec {
        match *self {
            ScalingFamily::SL2Full {
                eps,
                sigma,
                omega,
                lambda,
                gamma,
            } => SystemSpec::SL2Full(SLParams {
                mu,
                eps,
                omega,
                sigma,
                lambda,
                gamma,
            }),
            ScalingFamily::Hopf3 {
                omega,
                lambda,
                self_coupling,
            } => SystemSpec::Hopf3 {
                mu,
                omega,
                lambda,
                self_coupling,
            },
        }
    }

    /// Start with every upstream cell already on its attractor.
    fn initial_state(&self, mu: f64) -> Vec<f64> {
        let r = mu.sqrt();
        match *self {
            ScalingFamily::SL2Full { .. } => vec![r, 0.0, 0.0, 0.0],
            ScalingFamily::Hopf3 { self_coupling, .. } => {
                if self_coupling {
                    vec![0.0, 0.0, r, 0.0, 0.0, 0.0]
                } else {
                    vec![r, 0.0, 0.0, 0.0, 0.0, 0.0]
                }
            }
        }
    }

    fn lambda(&self) -> f64 {
        match *self {
            ScalingFamily::SL2Full { lambda, .. } | ScalingFamily::Hopf3 { lambda, .. } => lambda,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub mu: Vec<f64>,
    pub amplitude: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

impl ScalingFit {
    pub fn prefactor(&self) -> f64 {
        self.intercept.exp()
    }
}

/// Settled mean amplitude of cell `read_cell` (1-based).
pub fn settled_amplitude(fam: &ScalingFamily, mu: f64, read_cell: usize) -> Result<f64> {
    let spec = fam.spec(mu);
    let ncell = spec.dim() / 2;
    if read_cell == 0 || read_cell > ncell {
        return Err(Error::InvalidParams(format!("read_cell must be in 1..={ncell}")));
    }
    let lam = fam.lambda();
    let dt = (1e-2 / lam).min(1e-2);
    let slow = mu.powf(-1.0 / 3.0) / lam.powf(2.0 / 3.0);
    let transient = tol::default_transient(lam) + 60.0 * slow;
    let mut x = fam.initial_state(mu);
    advance(&spec, &mut x, transient, dt)?;
    let window = 50.0 / lam + 2.0 * std::f64::consts::PI * 4.0;
    let tr = integrate_sampled(&spec, &x, window, dt, 10)?;
    let c = read_cell - 1;
    let amps: Vec<f64> = tr.states.iter().map(|s| s[2 * c].hypot(s[2 * c + 1])).collect();
    let (m, var) = mean_var(&amps);
    if var > 1e-6 * m * m {
        return Err(Error::NonConvergence(format!(
            "amplitude of cell {read_cell} still varying at mu = {mu}"
        )));
    }
    Ok(m)
}

pub fn scaling_fit(fam: &ScalingFamily, mu_values: &[f64], read_cell: usize) -> Result<ScalingFit> {
    if mu_values.len() < 2 || mu_values.iter().any(|&m| !(m > 0.0)) {
        return Err(Error::InvalidParams("need at least two positive mu values".into()));
    }
    let amps: Vec<Result<f64>> = crate::par_map(mu_values, |&mu| settled_amplitude(fam, mu, read_cell));
    let amps: Vec<f64> = amps.into_iter().collect::<Result<_>>()?;
    let lx: Vec<f64> = mu_values.iter().map(|m| m.ln()).collect();
    let ly: Vec<f64> = amps.iter().map(|a| a.ln()).collect();
    let (slope, intercept, r2) = least_squares(&lx, &ly);
    Ok(ScalingFit {
        mu: mu_values.to_vec(),
        amplitude: amps,
        slope,
        intercept,
        r2,
    })
}

pub fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, intercept, r2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepParam {
    Mu,
    Eps,
    Sigma,
    Lambda,
}

impl SweepParam {
    pub fn parse(s: &str) -> Option<SweepParam> {
        match s {
            "mu" => Some(SweepParam::Mu),
            "eps" => Some(SweepParam::Eps),
            "sigma" => Some(SweepParam::Sigma),
            "lambda" => Some(SweepParam::Lambda),
            _ => None,
        }
    }

    fn apply(&self, p: &SLParams, v: f64) -> SLParams {
        let mut q = *p;
        match self {
            SweepParam::Mu => q.mu = v,
            SweepParam::Eps => q.eps = v,
            SweepParam::Sigma => q.sigma = v,
            SweepParam::Lambda => q.lambda = v,
        }
        q
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EventKind {
    HB,
    TR,
    SN,
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::HB => "HB",
            EventKind::TR => "TR",
            EventKind::SN => "SN",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepEvent {
    pub kind: EventKind,
    pub value: f64,
}

/// Branch ids: 0 = both cells at rest, 1 = only cell two oscillating
/// (z₁ = 0, |z₂| = √(μ+ε)), 2.. = phase-locked periodic solutions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchPoint {
    pub branch_id: usize,
    pub amplitude: f64,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepStep {
    pub value: f64,
    pub branches: Vec<BranchPoint>,
    pub class: AttractorClass,
    pub region: Option<SLRegionTag>,
    pub n_locked: usize,
    pub n_locked_stable: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub param: SweepParam,
    pub steps: Vec<SweepStep>,
    pub events: Vec<SweepEvent>,
    /// Parameter intervals with three coexisting phase-locked solutions.
    pub three_windows: Vec<(f64, f64)>,
    /// Parameter intervals over which each locked branch is stable.
    pub stable_intervals: Vec<(usize, f64, f64)>,
    /// Branches lost between steps (no continuation found): (branch_id, last value).
    pub terminated: Vec<(usize, f64)>,
}

fn locked_solutions(p: &SLParams) -> Result<Vec<(f64, bool)>> {
    if !(p.mu > 0.0) {
        return Ok(vec![]);
    }
    let c = g_cubic(p.mu, p.eps, p.sigma, p.lambda, p.gamma);
    let r = crate::cubic::solve_cubic_real(&c, TOL_RESID)?;
    Ok(r
        .roots
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| (x, unreduced_stability(x, p).2))
        .collect())
}

/// Newton refinement of a root of G from a previous-step seed.
fn newton_g(p: &SLParams, mut x: f64) -> Option<f64> {
    for _ in 0..50 {
        let g = crate::singularity::g_and_partials(x, p.mu, p.eps, p.sigma, p.lambda, p.gamma);
        if g.g_x == 0.0 {
            return None;
        }
        let nx = x - g.g / g.g_x;
        if !nx.is_finite() || nx <= 0.0 {
            return None;
        }
        if (nx - x).abs() <= 1e-14 * x.max(1e-300) {
            return Some(nx);
        }
        x = nx;
    }
    None
}

fn has_stable_locked(p: &SLParams) -> bool {
    locked_solutions(p).map(|v| v.iter().any(|s| s.1)).unwrap_or(false)
}

fn step_class(p: &SLParams) -> AttractorClass {
    if p.mu < 0.0 {
        if p.mu + p.eps < 0.0 {
            AttractorClass::FixedPoint
        } else {
            // cell two alone on its limit cycle: a single-frequency orbit
            AttractorClass::PhaseLocked
        }
    } else if p.mu == 0.0 {
        AttractorClass::Undetermined
    } else if has_stable_locked(p) {
        AttractorClass::PhaseLocked
    } else {
        AttractorClass::Torus
    }
}

fn refine(mut a: f64, mut b: f64, f: &dyn Fn(f64) -> bool) -> f64 {
    let fa = f(a);
    for _ in 0..60 {
        let c = 0.5 * (a + b);
        if f(c) == fa {
            a = c;
        } else {
            b = c;
        }
    }
    0.5 * (a + b)
}

pub fn branch_sweep(p: &SLParams, param: SweepParam, range: (f64, f64), n: usize) -> Result<SweepResult> {
    if n < 2 || !(range.0.is_finite() && range.1.is_finite()) || range.0 == range.1 {
        return Err(Error::InvalidParams("sweep needs a non-empty range and n >= 2".into()));
    }
    let values = crate::linspace(range.0, range.1, n);
    let mut steps: Vec<SweepStep> = Vec::with_capacity(n);
    let mut events = Vec::new();
    let mut prev_locked: Vec<(usize, f64)> = Vec::new();
    let mut next_id = 2usize;
    let mut terminated = Vec::new();

    for (k, &v) in values.iter().enumerate() {
        let q = param.apply(p, v);
        let m = q.mu + q.eps;
        let mut branches = vec![BranchPoint {
            branch_id: 0,
            amplitude: 0.0,
            stable: q.mu < 0.0 && m < 0.0,
        }];
        if m > 0.0 {
            branches.push(BranchPoint {
                branch_id: 1,
                amplitude: m.sqrt(),
                stable: q.mu < 0.0,
            });
        }
        let fresh = locked_solutions(&q)?;
        // continue previous branches by Newton, then attach fresh roots
        let mut used = vec![false; fresh.len()];
        let mut cur: Vec<(usize, f64)> = Vec::new();
        for &(id, x_prev) in &prev_locked {
            if let Some(x) = newton_g(&q, x_prev) {
                if let Some(j) = (0..fresh.len())
                    .filter(|&j| !used[j])
                    .min_by(|&a, &b| (fresh[a].0 - x).abs().partial_cmp(&(fresh[b].0 - x).abs()).unwrap())
                {
                    if (fresh[j].0 - x).abs() <= 1e-8 * x.max(1.0) {
                        used[j] = true;
                        cur.push((id, fresh[j].0));
                        continue;
                    }
                }
            }
            terminated.push((id, values[k - 1]));
        }
        for (j, f) in fresh.iter().enumerate() {
            if !used[j] {
                cur.push((next_id, f.0));
                next_id += 1;
            }
        }
        cur.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let mut n_stable = 0;
        for &(id, x) in &cur {
            let st = unreduced_stability(x, &q).2;
            n_stable += st as usize;
            branches.push(BranchPoint {
                branch_id: id,
                amplitude: x.sqrt(),
                stable: st,
            });
        }
        let region = if q.mu > 0.0 {
            reduce(&q).ok().and_then(|rp| classify_region_sl(&rp).ok()).map(|r| r.tag)
        } else {
            None
        };
        let step = SweepStep {
            value: v,
            branches,
            class: step_class(&q),
            region,
            n_locked: cur.len(),
            n_locked_stable: n_stable,
        };

        if let Some(prev) = steps.last() {
            let pp = param.apply(p, prev.value);
            let a = prev.value;
            if (pp.mu + pp.eps) * m < 0.0 || (pp.mu + pp.eps != 0.0 && m == 0.0) {
                let f = |t: f64| {
                    let r = param.apply(p, t);
                    r.mu + r.eps > 0.0
                };
                events.push(SweepEvent {
                    kind: EventKind::HB,
                    value: refine(a, v, &f),
                });
            }
            if pp.mu * q.mu < 0.0 || (pp.mu != 0.0 && q.mu == 0.0) {
                let f = |t: f64| param.apply(p, t).mu > 0.0;
                events.push(SweepEvent {
                    kind: EventKind::HB,
                    value: refine(a, v, &f),
                });
            }
            let lock = |c: AttractorClass| c == AttractorClass::PhaseLocked;
            let tor = |c: AttractorClass| c == AttractorClass::Torus;
            let flip = (lock(prev.class) && tor(step.class)) || (tor(prev.class) && lock(step.class));
            if flip {
                let value = if pp.mu > 0.0 && q.mu > 0.0 {
                    refine(a, v, &|t| has_stable_locked(&param.apply(p, t)))
                } else {
                    refine(a, v, &|t| param.apply(p, t).mu > 0.0)
                };
                events.push(SweepEvent {
                    kind: EventKind::TR,
                    value,
                });
            }
            if pp.mu > 0.0 && q.mu > 0.0 && prev.n_locked != step.n_locked {
                let f = |t: f64| locked_solutions(&param.apply(p, t)).map(|s| s.len()).unwrap_or(0) == prev.n_locked;
                events.push(SweepEvent {
                    kind: EventKind::SN,
                    value: refine(a, v, &f),
                });
            }
        }
        prev_locked = cur;
        steps.push(step);
    }

    let mut three_windows = Vec::new();
    let mut start: Option<f64> = None;
    for s in &steps {
        match (s.n_locked == 3, start) {
            (true, None) => start = Some(s.value),
            (false, Some(a)) => {
                three_windows.push((a, s.value));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(a) = start {
        three_windows.push((a, steps.last().unwrap().value));
    }

    let mut stable_intervals: Vec<(usize, f64, f64)> = Vec::new();
    let mut open: std::collections::BTreeMap<usize, (f64, f64)> = Default::default();
    for s in &steps {
        let stable_ids: Vec<usize> = s
            .branches
            .iter()
            .filter(|b| b.branch_id >= 2 && b.stable)
            .map(|b| b.branch_id)
            .collect();
        let ids: Vec<usize> = open.keys().copied().collect();
        for id in ids {
            if !stable_ids.contains(&id) {
                let (a, b) = open.remove(&id).unwrap();
                stable_intervals.push((id, a, b));
            }
        }
        for id in stable_ids {
            open.entry(id).and_modify(|e| e.1 = s.value).or_insert((s.value, s.value));
        }
    }
    for (id, (a, b)) in open {
        stable_intervals.push((id, a, b));
    }
    stable_intervals.sort_by(|a, b| (a.1, a.0).partial_cmp(&(b.1, b.0)).unwrap());
    events.sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap());

    Ok(SweepResult {
        param,
        steps,
        events,
        three_windows,
        stable_intervals,
        terminated,
    })
}
