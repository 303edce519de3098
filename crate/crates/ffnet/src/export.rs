//! Run configurations, command dispatch and CSV/JSON dataset export.

use crate::beam::{pattern, ArrayConfig};
use crate::error::{Error, Result};
use crate::pitchfork::{self, PitchforkParams, Stability};
use crate::reduced::{
    classify_region_sl, det_zero_curve, level_set_ellipse, reduce, stable_boundary_curve,
    ReducedParams, SLParams,
};
use crate::sim::{self, BasinGrid, ScalingFamily, SweepParam, SystemSpec};
use crate::singularity::{bifurcation_set, branch_diagram, hysteresis_slice};
use crate::{geomspace, linspace, par_map, tol};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

pub const COMMANDS: [&str; 9] = [
    "phase-diagram",
    "bifurcation",
    "basins",
    "loci",
    "simulate",
    "sweep",
    "jump",
    "scaling",
    "beam",
];

/// A scalar or a `start:end:count` range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Param {
    Num(f64),
    Text(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl Range {
    pub fn parse(s: &str) -> Result<Range> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!("range '{s}' is not start:end:count")));
        }
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Config(format!("bad number '{t}' in range '{s}'")))
        };
        let start = num(parts[0])?;
        let end = num(parts[1])?;
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("bad count in range '{s}'")))?;
        if count < 2 {
            return Err(Error::Config(format!("range '{s}' is empty: count must be >= 2")));
        }
        if start == end {
            return Err(Error::Config(format!("range '{s}' is empty: start equals end")));
        }
        Ok(Range { start, end, count })
    }

    pub fn values(&self) -> Vec<f64> {
        linspace(self.start, self.end, self.count)
    }

    pub fn geometric(&self) -> Result<Vec<f64>> {
        if !(self.start > 0.0 && self.end > 0.0) {
            return Err(Error::Config("geometric range needs positive end points".into()));
        }
        Ok(geomspace(self.start, self.end, self.count))
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.end, self.count)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Param>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Param>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Param>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Param>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Param>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<Param>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Param>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Param>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Param>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stride: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_sign: Option<i8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub read_cell: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub self_coupling: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_elements: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kd: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

impl RunConfig {
    pub fn new(command: &str) -> Self {
        RunConfig {
            command: command.to_string(),
            ..Default::default()
        }
    }

    /// Parse a TOML or JSON config (a sidecar file is accepted as well).
    pub fn from_str_any(text: &str, json: bool) -> Result<RunConfig> {
        if json {
            let v: serde_json::Value =
                serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
            let v = match v.get("config") {
                Some(c) => c.clone(),
                None => v,
            };
            serde_json::from_value(v).map_err(|e| Error::Config(e.to_string()))
        } else {
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
        }
    }

    pub fn from_file(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let json = path
            .extension()
            .map_or(false, |e| e.eq_ignore_ascii_case("json"));
        RunConfig::from_str_any(&text, json)
    }
}

fn scalar_of(name: &str, v: &Option<Param>, default: f64) -> Result<f64> {
    match v {
        None => Ok(default),
        Some(Param::Num(x)) => Ok(*x),
        Some(Param::Text(t)) => {
            if t.contains(':') {
                Err(Error::Config(format!("{name} must be a single value here, got range '{t}'")))
            } else {
                t.trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("bad value '{t}' for {name}")))
            }
        }
    }
}

fn range_of(name: &str, v: &Option<Param>, default: &str) -> Result<Range> {
    match v {
        None => Range::parse(default),
        Some(Param::Text(t)) => Range::parse(t),
        Some(Param::Num(x)) => Err(Error::Config(format!(
            "{name} must be a range start:end:count here, got {x}"
        ))),
    }
}

fn num(x: f64) -> Option<Param> {
    Some(Param::Num(x))
}

fn rng(r: Range) -> Option<Param> {
    Some(Param::Text(r.to_string()))
}

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // Display for f64 is the shortest representation that round-trips
            Cell::F(v) => write!(f, "{v}"),
            Cell::I(v) => write!(f, "{v}"),
            Cell::S(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub schema: &'static str,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Command-specific summary written into the sidecar.
    pub summary: serde_json::Value,
}

impl Dataset {
    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(|c| c.to_string()).collect();
            s.push_str(&line.join(","));
            s.push('\n');
        }
        s
    }
}

/// Frozen column sets per schema. `...` marks a variable tail.
pub fn csv_schemas() -> BTreeMap<&'static str, Vec<&'static str>> {
    let mut m = BTreeMap::new();
    m.insert("basins", vec!["x0", "y0", "sink_index"]);
    m.insert("bifurcation", vec!["param", "branch_id", "amplitude", "stable", "event"]);
    m.insert("trajectory", vec!["t", "..."]);
    m.insert("loci", vec!["curve_id", "p1", "p2", "aux1", "aux2"]);
    m.insert("scaling", vec!["mu", "amplitude", "log_mu", "log_amp"]);
    m.insert("phase_diagram", vec!["sigma_t", "mu_t", "region_tag", "n_equilibria", "n_stable"]);
    m.insert("phase_diagram_pitchfork", vec!["eps", "mu", "region_tag", "n_equilibria", "n_stable"]);
    m.insert("jump", vec!["mu", "x_sign", "y_initial", "y_final", "dy"]);
    m.insert("beam", vec!["phi", "gain"]);
    m
}

/// True if the dataset's header matches its registered schema.
pub fn validate(ds: &Dataset) -> bool {
    let reg = csv_schemas();
    let Some(cols) = reg.get(ds.schema) else {
        return false;
    };
    let fixed: Vec<&str> = cols.iter().copied().filter(|c| *c != "...").collect();
    let variable = cols.contains(&"...");
    let header_ok = if variable {
        ds.columns.len() > fixed.len()
            && ds.columns.iter().zip(&fixed).all(|(a, b)| a == b)
    } else {
        ds.columns.iter().map(|s| s.as_str()).eq(fixed.iter().copied())
    };
    header_ok && ds.rows.iter().all(|r| r.len() == ds.columns.len())
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => 2,
        Error::Io(_) => 4,
        _ => 3,
    }
}

fn system_of(cfg: &RunConfig, default: &str, allowed: &[&str]) -> Result<String> {
    let s = cfg.system.clone().unwrap_or_else(|| default.to_string());
    if allowed.contains(&s.as_str()) {
        Ok(s)
    } else {
        Err(Error::Config(format!(
            "system '{s}' not supported by {}; use one of: {}",
            cfg.command,
            allowed.join(", ")
        )))
    }
}

/// Fill in every default the command uses. The result is what the sidecar
/// records and what `execute` runs.
pub fn resolve(cfg: &RunConfig) -> Result<RunConfig> {
    let c = cfg;
    let mut r = RunConfig {
        command: c.command.clone(),
        output: c.output.clone(),
        seed: Some(c.seed.unwrap_or(0)),
        ..Default::default()
    };
    match c.command.as_str() {
        "phase-diagram" => {
            let sys = system_of(c, "sl-reduced", &["sl-reduced", "pitchfork"])?;
            if sys == "sl-reduced" {
                r.gamma = num(scalar_of("gamma", &c.gamma, 0.0)?);
                r.sigma = rng(range_of("sigma", &c.sigma, "-3:3:601")?);
                r.mu = rng(range_of("mu", &c.mu, "0.01:4:400")?);
            } else {
                r.lambda = num(scalar_of("lambda", &c.lambda, 1.0)?);
                r.eps = rng(range_of("eps", &c.eps, "-1:1.5:251")?);
                r.mu = rng(range_of("mu", &c.mu, "0.01:3:300")?);
            }
            r.system = Some(sys);
        }
        "bifurcation" => {
            let sys = system_of(c, "sl-full", &["sl-full", "pitchfork"])?;
            if sys == "sl-full" {
                r.mu = num(scalar_of("mu", &c.mu, 0.2)?);
                r.eps = num(scalar_of("eps", &c.eps, 0.5)?);
                r.lambda = num(scalar_of("lambda", &c.lambda, 1.0)?);
                r.gamma = num(scalar_of("gamma", &c.gamma, 0.0)?);
                r.sigma = rng(range_of("sigma", &c.sigma, "-2:2:401")?);
            } else {
                r.mu = rng(range_of("mu", &c.mu, "-1:3:401")?);
                r.eps = num(scalar_of("eps", &c.eps, 0.1)?);
                r.lambda = num(scalar_of("lambda", &c.lambda, 1.0)?);
            }
            r.system = Some(sys);
        }
        "basins" => {
            r.system = Some(system_of(c, "pitchfork", &["pitchfork"])?);
            let mu = scalar_of("mu", &c.mu, 0.01)?;
            let lambda = scalar_of("lambda", &c.lambda, 1.0)?;
            r.mu = num(mu);
            r.eps = num(scalar_of("eps", &c.eps, 0.5)?);
            r.lambda = num(lambda);
            let g = BasinGrid::default_for(&PitchforkParams::new(mu, 0.0, lambda));
            let dx = format!("{}:{}:{}", g.x_range.0, g.x_range.1, g.nx);
            let dy = format!("{}:{}:{}", g.y_range.0, g.y_range.1, g.ny);
            r.x = rng(range_of("x", &c.x, &dx)?);
            r.y = rng(range_of("y", &c.y, &dy)?);
            r.dt = Some(c.dt.unwrap_or(sim::BASIN_DT / lambda));
            r.t_end = c.t_end;
        }
        "loci" => {
            let kind = c.kind.clone().unwrap_or_else(|| "hysteresis".into());
            match kind.as_str() {
                "hysteresis" | "bifurcation" => {
                    let mu = scalar_of("mu", &c.mu, 0.2)?;
                    r.mu = num(mu);
                    r.gamma = num(scalar_of("gamma", &c.gamma, 0.0)?);
                    let d = format!("{}:2:400", -mu * 0.95);
                    r.eps = rng(range_of("eps", &c.eps, &d)?);
                }
                "saddle-node" => {
                    r.mu = num(scalar_of("mu", &c.mu, 0.2)?);
                    r.eps = rng(range_of("eps", &c.eps, "-0.5:1:400")?);
                }
                "level-set" => {
                    r.level = Some(c.level.unwrap_or(0.5));
                    r.gamma = num(scalar_of("gamma", &c.gamma, 0.0)?);
                    r.stride = Some(c.stride.unwrap_or(400));
                }
                "det-zero" | "stable-boundary" => {
                    r.stride = Some(c.stride.unwrap_or(400));
                }
                other => {
                    return Err(Error::Config(format!(
                        "unknown loci kind '{other}'; use hysteresis, bifurcation, saddle-node, level-set, det-zero, stable-boundary"
                    )))
                }
            }
            r.kind = Some(kind);
        }
        "simulate" => {
            let sys = system_of(c, "sl-full", &["pitchfork", "pitchfork3", "hopf3", "sl-full", "sl-reduced"])?;
            let lambda = scalar_of("lambda", &c.lambda, 1.0)?;
            let mu = scalar_of("mu", &c.mu, 0.2)?;
            r.mu = num(mu);
            r.lambda = num(lambda);
            match sys.as_str() {
                "pitchfork" | "pitchfork3" => {
                    r.eps = num(scalar_of("eps", &c.eps, 0.1)?);
                }
                "hopf3" => {
                    r.omega = num(scalar_of("omega", &c.omega, 1.0)?);
                    r.self_coupling = Some(c.self_coupling.unwrap_or(true));
                }
                "sl-full" | "sl-reduced" => {
                    r.eps = num(scalar_of("eps", &c.eps, 0.0)?);
                    r.sigma = num(scalar_of("sigma", &c.sigma, 0.0)?);
                    r.gamma = num(scalar_of("gamma", &c.gamma, 0.0)?);
                    r.omega = num(scalar_of("omega", &c.omega, 1.0)?);
                }
                _ => unreachable!(),
            }
            let spec = build_system(&sys, &r)?;
            r.x0 = Some(match &c.x0 {
                Some(v) => v.clone(),
                None => default_x0(&spec, mu),
            });
            r.t_end = Some(c.t_end.unwrap_or(100.0 / lambda));
            r.dt = Some(c.dt.unwrap_or(sim::default_dt(&spec)));
            r.stride = Some(c.stride.unwrap_or(100));
            r.system = Some(sys);
        }
        "sweep" => {
            let param = c.param.clone().unwrap_or_else(|| "mu".into());
            if SweepParam::parse(&param).is_none() {
                return Err(Error::Config(format!(
                    "unknown sweep parameter '{param}'; use mu, eps, sigma or lambda"
                )));
            }
            r.system = Some(system_of(c, "sl-full", &["sl-full"])?);
            let set = |name: &str, v: &Option<Param>, d: f64, dr: &str| -> Result<Option<Param>> {
                if name == param {
                    Ok(rng(range_of(name, v, dr)?))
                } else {
                    Ok(num(scalar_of(name, v, d)?))
                }
            };
            r.mu = set("mu", &c.mu, 0.5, "-0.4:2:2401")?;
            r.eps = set("eps", &c.eps, 0.2, "-0.5:2:1001")?;
            r.sigma = set("sigma", &c.sigma, 0.98, "0:3:1001")?;
            r.lambda = set("lambda", &c.lambda, 1.0, "0.05:3:1001")?;
            r.gamma = num(scalar_of("gamma", &c.gamma, 0.0)?);
            r.param = Some(param);
        }
        "jump" => {
            r.system = Some(system_of(c, "pitchfork", &["pitchfork"])?);
            r.eps = num(scalar_of("eps", &c.eps, 0.1)?);
            r.lambda = num(scalar_of("lambda", &c.lambda, 1.0)?);
            r.mu = rng(range_of("mu", &c.mu, "0.001:0.1:10")?);
            r.y_sign = Some(c.y_sign.unwrap_or(1));
        }
        "scaling" => {
            let sys = system_of(c, "sl-full", &["sl-full", "hopf3"])?;
            r.mu = rng(range_of("mu", &c.mu, "1e-6:1e-3:8")?);
            r.lambda = num(scalar_of("lambda", &c.lambda, 1.0)?);
            r.omega = num(scalar_of("omega", &c.omega, 1.0)?);
            if sys == "sl-full" {
                r.eps = num(scalar_of("eps", &c.eps, 0.0)?);
                r.sigma = num(scalar_of("sigma", &c.sigma, 0.0)?);
                r.gamma = num(scalar_of("gamma", &c.gamma, 0.0)?);
                r.read_cell = Some(c.read_cell.unwrap_or(2));
            } else {
                r.self_coupling = Some(c.self_coupling.unwrap_or(true));
                r.read_cell = Some(c.read_cell.unwrap_or(3));
            }
            r.system = Some(sys);
        }
        "beam" => {
            r.n_elements = Some(c.n_elements.unwrap_or(20));
            r.kd = Some(c.kd.unwrap_or(std::f64::consts::PI));
            r.theta = Some(c.theta.unwrap_or(0.0));
            let h = std::f64::consts::FRAC_PI_2;
            r.phi = rng(range_of("phi", &c.phi, &format!("{}:{}:721", -h, h))?);
        }
        other => {
            return Err(Error::Config(format!(
                "unknown command '{other}'; valid commands: {}",
                COMMANDS.join(", ")
            )))
        }
    }
    Ok(r)
}

fn sc(name: &str, v: &Option<Param>) -> Result<f64> {
    scalar_of(name, v, f64::NAN).and_then(|x| {
        if x.is_nan() {
            Err(Error::Config(format!("missing value for {name}")))
        } else {
            Ok(x)
        }
    })
}

fn rg(name: &str, v: &Option<Param>) -> Result<Range> {
    match v {
        Some(Param::Text(t)) => Range::parse(t),
        _ => Err(Error::Config(format!("{name} must be a range"))),
    }
}

fn sl_params(r: &RunConfig) -> Result<SLParams> {
    Ok(SLParams {
        mu: sc("mu", &r.mu)?,
        eps: sc("eps", &r.eps)?,
        omega: scalar_of("omega", &r.omega, 1.0)?,
        sigma: sc("sigma", &r.sigma)?,
        lambda: sc("lambda", &r.lambda)?,
        gamma: sc("gamma", &r.gamma)?,
    })
}

fn build_system(sys: &str, r: &RunConfig) -> Result<SystemSpec> {
    Ok(match sys {
        "pitchfork" => SystemSpec::Pitchfork2(PitchforkParams::new(sc("mu", &r.mu)?, sc("eps", &r.eps)?, sc("lambda", &r.lambda)?)),
        "pitchfork3" => SystemSpec::Pitchfork3(PitchforkParams::new(sc("mu", &r.mu)?, sc("eps", &r.eps)?, sc("lambda", &r.lambda)?)),
        "hopf3" => SystemSpec::Hopf3 {
            mu: sc("mu", &r.mu)?,
            omega: sc("omega", &r.omega)?,
            lambda: sc("lambda", &r.lambda)?,
            self_coupling: r.self_coupling.unwrap_or(true),
        },
        "sl-full" => SystemSpec::SL2Full(sl_params(r)?),
        "sl-reduced" => SystemSpec::SL2Reduced(reduce(&sl_params(r)?)?),
        other => return Err(Error::Config(format!("unknown system '{other}'"))),
    })
}

fn default_x0(spec: &SystemSpec, mu: f64) -> Vec<f64> {
    let r = mu.max(0.0).sqrt();
    match spec {
        SystemSpec::Pitchfork2(_) => vec![1e-3, 0.0],
        SystemSpec::Pitchfork3(_) => vec![1e-3, 0.0, 0.0],
        SystemSpec::Hopf3 { .. } => vec![r, 0.0, 0.0, 0.0, 0.0, 0.0],
        SystemSpec::SL2Full(_) => vec![r, 0.0, 0.0, 0.0],
        SystemSpec::SL2Reduced(_) => vec![0.0, 0.0],
    }
}

fn component_names(spec: &SystemSpec) -> Vec<String> {
    let v: &[&str] = match spec {
        SystemSpec::Pitchfork2(_) => &["x", "y"],
        SystemSpec::Pitchfork3(_) => &["x", "y", "z"],
        SystemSpec::Hopf3 { .. } => &["z1_re", "z1_im", "z2_re", "z2_im", "z3_re", "z3_im"],
        SystemSpec::SL2Full(_) => &["z1_re", "z1_im", "z2_re", "z2_im"],
        SystemSpec::SL2Reduced(_) => &["v_re", "v_im"],
    };
    v.iter().map(|s| s.to_string()).collect()
}

fn cols(c: &[&str]) -> Vec<String> {
    c.iter().map(|s| s.to_string()).collect()
}

fn b(v: bool) -> Cell {
    Cell::I(v as i64)
}

/// Compute the dataset for a resolved config without touching the file system.
pub fn execute(r: &RunConfig) -> Result<Dataset> {
    let null = serde_json::Value::Null;
    match r.command.as_str() {
        "phase-diagram" => {
            let sys = r.system.as_deref().unwrap_or("sl-reduced");
            let mus = rg("mu", &r.mu)?.values();
            if sys == "sl-reduced" {
                let gamma = sc("gamma", &r.gamma)?;
                let sigmas = rg("sigma", &r.sigma)?.values();
                let pts: Vec<(f64, f64)> = mus.iter().flat_map(|&m| sigmas.iter().map(move |&s| (s, m))).collect();
                let res: Vec<Result<Vec<Cell>>> = par_map(&pts, |&(s, m)| {
                    let reg = classify_region_sl(&ReducedParams::plus(s, m, gamma))?;
                    Ok(vec![
                        Cell::F(s),
                        Cell::F(m),
                        Cell::S(reg.tag.name().into()),
                        Cell::I(reg.n_equilibria as i64),
                        Cell::I(reg.n_stable as i64),
                    ])
                });
                Ok(Dataset {
                    schema: "phase_diagram",
                    columns: cols(&["sigma_t", "mu_t", "region_tag", "n_equilibria", "n_stable"]),
                    rows: res.into_iter().collect::<Result<_>>()?,
                    summary: null,
                })
            } else {
                let lambda = sc("lambda", &r.lambda)?;
                let epss = rg("eps", &r.eps)?.values();
                let pts: Vec<(f64, f64)> = mus.iter().flat_map(|&m| epss.iter().map(move |&e| (e, m))).collect();
                let res: Vec<Result<Vec<Cell>>> = par_map(&pts, |&(e, m)| {
                    let p = PitchforkParams::new(m, e, lambda);
                    let reg = pitchfork::classify_region(&p)?;
                    Ok(vec![
                        Cell::F(e),
                        Cell::F(m),
                        Cell::S(format!("{:?}", reg.tag)),
                        Cell::I(reg.expected_counts.total as i64),
                        Cell::I(reg.expected_counts.stable as i64),
                    ])
                });
                Ok(Dataset {
                    schema: "phase_diagram_pitchfork",
                    columns: cols(&["eps", "mu", "region_tag", "n_equilibria", "n_stable"]),
                    rows: res.into_iter().collect::<Result<_>>()?,
                    summary: null,
                })
            }
        }
        "bifurcation" => {
            let mut rows = Vec::new();
            if r.system.as_deref() == Some("pitchfork") {
                let eps = sc("eps", &r.eps)?;
                let lambda = sc("lambda", &r.lambda)?;
                for mu in rg("mu", &r.mu)?.values() {
                    let eq = pitchfork::equilibria(&PitchforkParams::new(mu, eps, lambda))?;
                    for (i, e) in eq.iter().enumerate() {
                        rows.push(vec![
                            Cell::F(mu),
                            Cell::I(i as i64),
                            Cell::F(e.y),
                            b(e.stability == Stability::StableNode),
                            Cell::S(String::new()),
                        ]);
                    }
                }
            } else {
                let s = rg("sigma", &r.sigma)?;
                let d = branch_diagram(
                    sc("mu", &r.mu)?,
                    sc("eps", &r.eps)?,
                    sc("lambda", &r.lambda)?,
                    sc("gamma", &r.gamma)?,
                    (s.start, s.end),
                    s.count,
                )?;
                let mut last_sigma = f64::NAN;
                let mut idx = 0;
                for row in &d.rows {
                    if row.sigma != last_sigma {
                        idx = 0;
                        last_sigma = row.sigma;
                    }
                    rows.push(vec![
                        Cell::F(row.sigma),
                        Cell::I(idx),
                        Cell::F(row.x.sqrt()),
                        b(row.stable),
                        Cell::S(if row.vertical_tangent { "VT".into() } else { String::new() }),
                    ]);
                    idx += 1;
                }
                for f in &d.folds {
                    rows.push(vec![Cell::F(f.sigma), Cell::I(-1), Cell::F(f.x.sqrt()), b(f.stable), Cell::S("VT".into())]);
                }
            }
            Ok(Dataset {
                schema: "bifurcation",
                columns: cols(&["param", "branch_id", "amplitude", "stable", "event"]),
                rows,
                summary: null,
            })
        }
        "basins" => {
            let p = PitchforkParams::new(sc("mu", &r.mu)?, sc("eps", &r.eps)?, sc("lambda", &r.lambda)?);
            let xr = rg("x", &r.x)?;
            let yr = rg("y", &r.y)?;
            let grid = BasinGrid {
                x_range: (xr.start, xr.end),
                y_range: (yr.start, yr.end),
                nx: xr.count,
                ny: yr.count,
            };
            let m = sim::basin_map(&p, &grid, r.dt, r.t_end)?;
            let mut rows = Vec::with_capacity(m.labels.len());
            for (j, &y) in m.ys.iter().enumerate() {
                for (i, &x) in m.xs.iter().enumerate() {
                    rows.push(vec![Cell::F(x), Cell::F(y), Cell::I(m.labels[j * m.xs.len() + i] as i64)]);
                }
            }
            let sinks: Vec<serde_json::Value> = m
                .distinct_labels()
                .iter()
                .map(|&l| {
                    let e = m.equilibria[l as usize];
                    serde_json::json!({"index": l, "x": e.x, "y": e.y})
                })
                .collect();
            Ok(Dataset {
                schema: "basins",
                columns: cols(&["x0", "y0", "sink_index"]),
                rows,
                summary: serde_json::json!({ "sinks": sinks }),
            })
        }
        "loci" => {
            let mut rows = Vec::new();
            let kind = r.kind.as_deref().unwrap_or("hysteresis");
            match kind {
                "hysteresis" => {
                    let e = rg("eps", &r.eps)?;
                    for set in hysteresis_slice(sc("mu", &r.mu)?, sc("gamma", &r.gamma)?, (e.start, e.end), e.count)? {
                        for p in &set.points {
                            rows.push(vec![Cell::S(set.branch.clone()), Cell::F(p.eps), Cell::F(p.lambda), Cell::F(p.sigma), Cell::F(p.x)]);
                        }
                    }
                }
                "bifurcation" => {
                    let e = rg("eps", &r.eps)?;
                    let bs = bifurcation_set(sc("mu", &r.mu)?, sc("gamma", &r.gamma)?, (e.start, e.end), e.count)?;
                    for p in &bs.cubic.points {
                        rows.push(vec![Cell::S("cubic".into()), Cell::F(p.eps), Cell::F(p.lambda), Cell::F(p.sigma), Cell::F(p.x)]);
                    }
                    for eps in [bs.axis.eps_min, bs.axis.eps_max] {
                        let mu = sc("mu", &r.mu)?;
                        let g = sc("gamma", &r.gamma)?;
                        rows.push(vec![Cell::S("axis".into()), Cell::F(eps), Cell::F(0.0), Cell::F(g * (mu + eps)), Cell::F(mu + eps)]);
                    }
                }
                "saddle-node" => {
                    let e = rg("eps", &r.eps)?;
                    let c = pitchfork::saddle_node_locus(sc("mu", &r.mu)?, (e.start, e.end), e.count)?;
                    for p in c.points() {
                        rows.push(vec![Cell::S(c.name.clone()), Cell::F(p[0]), Cell::F(p[1]), Cell::F(0.0), Cell::F(0.0)]);
                    }
                }
                "level-set" | "det-zero" | "stable-boundary" => {
                    let n = r.stride.unwrap_or(400);
                    let (curve, aux) = match kind {
                        "level-set" => {
                            let x = r.level.unwrap_or(0.5);
                            (level_set_ellipse(x, sc("gamma", &r.gamma)?, n)?, x)
                        }
                        "det-zero" => (det_zero_curve(n), 0.0),
                        _ => (stable_boundary_curve(n), 0.0),
                    };
                    for (k, seg) in curve.segments.iter().enumerate() {
                        for p in seg {
                            rows.push(vec![Cell::S(format!("{}_{k}", curve.name)), Cell::F(p[0]), Cell::F(p[1]), Cell::F(aux), Cell::F(0.0)]);
                        }
                    }
                }
                _ => return Err(Error::Config(format!("unknown loci kind '{kind}'"))),
            }
            Ok(Dataset {
                schema: "loci",
                columns: cols(&["curve_id", "p1", "p2", "aux1", "aux2"]),
                rows,
                summary: null,
            })
        }
        "simulate" => {
            let spec = build_system(r.system.as_deref().unwrap_or("sl-full"), r)?;
            let x0 = r.x0.clone().unwrap_or_default();
            let tr = sim::integrate_sampled(&spec, &x0, r.t_end.unwrap_or(100.0), r.dt.unwrap_or(1e-3), r.stride.unwrap_or(100))?;
            let mut columns = vec!["t".to_string()];
            columns.extend(component_names(&spec));
            let rows = tr
                .times
                .iter()
                .zip(&tr.states)
                .map(|(t, s)| std::iter::once(Cell::F(*t)).chain(s.iter().map(|v| Cell::F(*v))).collect())
                .collect();
            Ok(Dataset {
                schema: "trajectory",
                columns,
                rows,
                summary: null,
            })
        }
        "sweep" => {
            let param_name = r.param.as_deref().unwrap_or("mu");
            let param = SweepParam::parse(param_name).ok_or_else(|| Error::Config(format!("bad sweep parameter '{param_name}'")))?;
            let range = match param_name {
                "mu" => rg("mu", &r.mu)?,
                "eps" => rg("eps", &r.eps)?,
                "sigma" => rg("sigma", &r.sigma)?,
                _ => rg("lambda", &r.lambda)?,
            };
            let val = |name: &str, v: &Option<Param>| if name == param_name { Ok(range.start) } else { sc(name, v) };
            let p = SLParams {
                mu: val("mu", &r.mu)?,
                eps: val("eps", &r.eps)?,
                sigma: val("sigma", &r.sigma)?,
                lambda: val("lambda", &r.lambda)?,
                gamma: sc("gamma", &r.gamma)?,
                omega: 1.0,
            };
            let res = sim::branch_sweep(&p, param, (range.start, range.end), range.count)?;
            let mut rows = Vec::new();
            let mut ev = res.events.iter().peekable();
            for s in &res.steps {
                while let Some(e) = ev.peek() {
                    if e.value <= s.value {
                        rows.push(vec![Cell::F(e.value), Cell::I(-1), Cell::F(0.0), b(false), Cell::S(e.kind.name().into())]);
                        ev.next();
                    } else {
                        break;
                    }
                }
                for br in &s.branches {
                    rows.push(vec![Cell::F(s.value), Cell::I(br.branch_id as i64), Cell::F(br.amplitude), b(br.stable), Cell::S(String::new())]);
                }
            }
            for e in ev {
                rows.push(vec![Cell::F(e.value), Cell::I(-1), Cell::F(0.0), b(false), Cell::S(e.kind.name().into())]);
            }
            Ok(Dataset {
                schema: "bifurcation",
                columns: cols(&["param", "branch_id", "amplitude", "stable", "event"]),
                rows,
                summary: serde_json::json!({
                    "events": res.events.iter().map(|e| serde_json::json!({"kind": e.kind.name(), "value": e.value})).collect::<Vec<_>>(),
                    "three_windows": res.three_windows,
                    "stable_intervals": res.stable_intervals,
                }),
            })
        }
        "jump" => {
            let mus = rg("mu", &r.mu)?.values();
            let recs = pitchfork::jump_response(sc("eps", &r.eps)?, sc("lambda", &r.lambda)?, &mus, r.y_sign.unwrap_or(1))?;
            let rows = recs
                .iter()
                .map(|j| vec![Cell::F(j.mu), Cell::I(j.x_sign as i64), Cell::F(j.y_initial), Cell::F(j.y_final), Cell::F(j.dy)])
                .collect();
            Ok(Dataset {
                schema: "jump",
                columns: cols(&["mu", "x_sign", "y_initial", "y_final", "dy"]),
                rows,
                summary: null,
            })
        }
        "scaling" => {
            let mus = rg("mu", &r.mu)?.geometric()?;
            let fam = if r.system.as_deref() == Some("hopf3") {
                ScalingFamily::Hopf3 {
                    omega: sc("omega", &r.omega)?,
                    lambda: sc("lambda", &r.lambda)?,
                    self_coupling: r.self_coupling.unwrap_or(true),
                }
            } else {
                ScalingFamily::SL2Full {
                    eps: sc("eps", &r.eps)?,
                    sigma: sc("sigma", &r.sigma)?,
                    omega: sc("omega", &r.omega)?,
                    lambda: sc("lambda", &r.lambda)?,
                    gamma: sc("gamma", &r.gamma)?,
                }
            };
            let fit = sim::scaling_fit(&fam, &mus, r.read_cell.unwrap_or(2))?;
            let rows = fit
                .mu
                .iter()
                .zip(&fit.amplitude)
                .map(|(m, a)| vec![Cell::F(*m), Cell::F(*a), Cell::F(m.ln()), Cell::F(a.ln())])
                .collect();
            Ok(Dataset {
                schema: "scaling",
                columns: cols(&["mu", "amplitude", "log_mu", "log_amp"]),
                rows,
                summary: serde_json::json!({"slope": fit.slope, "intercept": fit.intercept, "prefactor": fit.prefactor(), "r2": fit.r2}),
            })
        }
        "beam" => {
            let cfg = ArrayConfig {
                n: r.n_elements.unwrap_or(20),
                k: 1.0,
                d: r.kd.unwrap_or(std::f64::consts::PI),
                theta: r.theta.unwrap_or(0.0),
            };
            let phis = rg("phi", &r.phi)?.values();
            let pat = pattern(&cfg, &phis)?;
            let rows = pat.phi.iter().zip(&pat.gain).map(|(p, g)| vec![Cell::F(*p), Cell::F(*g)]).collect();
            Ok(Dataset {
                schema: "beam",
                columns: cols(&["phi", "gain"]),
                rows,
                summary: serde_json::json!({"main_lobe": pat.main_lobe}),
            })
        }
        other => Err(Error::Config(format!(
            "unknown command '{other}'; valid commands: {}",
            COMMANDS.join(", ")
        ))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub csv: PathBuf,
    pub sidecar: PathBuf,
    pub rows: usize,
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

fn sidecar_json(resolved: &RunConfig, ds: &Dataset) -> Result<String> {
    let tols: BTreeMap<&str, f64> = tol::table().into_iter().collect();
    let v = serde_json::json!({
        "config": resolved,
        "schema": ds.schema,
        "columns": ds.columns,
        "tolerances": tols,
        "summary": ds.summary,
    });
    serde_json::to_string_pretty(&v)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Error::Internal(e.to_string()))
}

/// Validate, compute, then write the CSV and its JSON sidecar. Nothing is
/// written if validation or computation fails.
pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    let resolved = resolve(cfg)?;
    let out = resolved
        .output
        .clone()
        .unwrap_or_else(|| format!("{}.csv", resolved.command));
    if out.trim().is_empty() {
        return Err(Error::Config("output path is empty".into()));
    }
    let ds = execute(&resolved)?;
    let csv = PathBuf::from(out);
    let side = sidecar_path(&csv);
    let side_text = sidecar_json(&resolved, &ds)?;
    if let Some(dir) = csv.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        }
    }
    std::fs::write(&csv, ds.to_csv()).map_err(|e| Error::Io(format!("{}: {e}", csv.display())))?;
    std::fs::write(&side, side_text).map_err(|e| Error::Io(format!("{}: {e}", side.display())))?;
    Ok(RunOutput {
        csv,
        sidecar: side,
        rows: ds.rows.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parsing() {
        let r = Range::parse("-3:3:601").unwrap();
        assert_eq!((r.start, r.end, r.count), (-3.0, 3.0, 601));
        assert!(matches!(Range::parse("0:1:1"), Err(Error::Config(_))));
        assert!(matches!(Range::parse("1:1:5"), Err(Error::Config(_))));
        assert!(matches!(Range::parse("a:1:5"), Err(Error::Config(_))));
        assert_eq!(Range::parse(&r.to_string()).unwrap(), r);
    }

    #[test]
    fn unknown_command_lists_commands() {
        let e = resolve(&RunConfig::new("plot")).unwrap_err();
        match e {
            Error::Config(msg) => {
                for c in COMMANDS {
                    assert!(msg.contains(c));
                }
            }
            _ => panic!("expected config error"),
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Config("x".into())), 2);
        assert_eq!(exit_code(&Error::InvalidMu(0.0)), 3);
        assert_eq!(exit_code(&Error::Io("x".into())), 4);
    }

    #[test]
    fn scalar_vs_range() {
        let mut c = RunConfig::new("jump");
        c.eps = Some(Param::Text("0:1:3".into()));
        assert!(matches!(resolve(&c), Err(Error::Config(_))));
    }
}
