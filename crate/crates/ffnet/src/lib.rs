//! Equilibria, bifurcation sets and simulations for small feedforward
//! networks of pitchfork and Stuart-Landau cells.

pub mod beam;
pub mod cubic;
pub mod error;
pub mod export;
pub mod pitchfork;
pub mod reduced;
pub mod sim;
pub mod singularity;
pub mod tol;

pub use error::{Error, Result};

pub(crate) fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    b
                } else {
                    a + (b - a) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// `n` geometrically spaced points from `a` to `b` inclusive (both positive).
pub fn geomspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a.ln(), b.ln(), n)
        .into_iter()
        .enumerate()
        .map(|(i, l)| if i == 0 { a } else if i == n - 1 { b } else { l.exp() })
        .collect()
}

/// A sampled curve in some parameter plane, possibly made of several pieces.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct LocusCurve {
    pub name: String,
    pub segments: Vec<Vec<[f64; 2]>>,
}

impl LocusCurve {
    pub fn points(&self) -> impl Iterator<Item = &[f64; 2]> {
        self.segments.iter().flatten()
    }
}
