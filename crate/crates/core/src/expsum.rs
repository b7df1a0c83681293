//! Weighted exponential sums `S(y) = Σ_k c_k · exp(i·s·p_k·y)`.
//!
//! Both the momentum-space construction of `ψ(x,t)` and the transform back to
//! momentum space are sums of this form. Pointwise evaluation is direct; for
//! uniform nodes evaluated on a uniform grid the sum is a chirp-z transform,
//! computed blockwise with Bluestein's convolution so that chirp phases stay
//! small even for millions of nodes.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::types::Grid;

/// Below this many node-point products the direct sum is cheaper.
const DIRECT_LIMIT: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq)]
pub enum NodeSet {
    /// `p_k = start + k·step`, `k = 0..n`.
    Uniform { start: f64, step: f64, n: usize },
    General(Vec<f64>),
}

impl NodeSet {
    pub fn len(&self) -> usize {
        match self {
            NodeSet::Uniform { n, .. } => *n,
            NodeSet::General(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn node(&self, k: usize) -> f64 {
        match self {
            NodeSet::Uniform { start, step, .. } => start + k as f64 * step,
            NodeSet::General(p) => p[k],
        }
    }
}

/// Coefficients held in memory, or computed on demand so that sums over
/// millions of nodes need no storage.
pub enum Coeffs<'a> {
    Stored(Vec<Complex64>),
    Computed(Box<dyn Fn(usize) -> Complex64 + Sync + 'a>),
}

pub struct ExpSum<'a> {
    nodes: NodeSet,
    coeffs: Coeffs<'a>,
}

impl<'a> ExpSum<'a> {
    pub fn new(nodes: NodeSet, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(nodes.len(), coeffs.len(), "one coefficient per node");
        Self {
            nodes,
            coeffs: Coeffs::Stored(coeffs),
        }
    }

    pub fn computed(nodes: NodeSet, coeff: impl Fn(usize) -> Complex64 + Sync + 'a) -> Self {
        Self {
            nodes,
            coeffs: Coeffs::Computed(Box::new(coeff)),
        }
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        match &self.coeffs {
            Coeffs::Stored(c) => c[k],
            Coeffs::Computed(f) => f(k),
        }
    }

    /// `Σ_k c_k exp(i·scale·p_k·y)` at a single point.
    pub fn at(&self, y: f64, scale: f64) -> Complex64 {
        let n = self.len();
        match &self.nodes {
            NodeSet::Uniform { start, step, .. } => {
                // Horner in r = exp(i·scale·step·y); |r| = 1 keeps it stable.
                let r = Complex64::from_polar(1.0, scale * step * y);
                let mut acc = Complex64::new(0.0, 0.0);
                for k in (0..n).rev() {
                    acc = acc * r + self.coeff(k);
                }
                acc * Complex64::from_polar(1.0, scale * start * y)
            }
            NodeSet::General(p) => p
                .iter()
                .enumerate()
                .map(|(k, pk)| self.coeff(k) * Complex64::from_polar(1.0, scale * pk * y))
                .sum(),
        }
    }

    /// The sum evaluated at every point of `grid`.
    pub fn on_grid(&self, grid: &Grid, scale: f64) -> Vec<Complex64> {
        match &self.nodes {
            NodeSet::Uniform { start, step, n } if n * grid.n > DIRECT_LIMIT => {
                chirp_z(*start, *step, *n, &|k| self.coeff(k), grid, scale)
            }
            _ => grid.points().map(|y| self.at(y, scale)).collect(),
        }
    }
}

fn chirp_z(start: f64, step: f64, n: usize, coeff: &dyn Fn(usize) -> Complex64, grid: &Grid, scale: f64) -> Vec<Complex64> {
    let m = grid.n;
    let y0 = grid.min;
    let theta = scale * step * grid.spacing();

    let len = (2 * m).next_power_of_two();
    let block = len - m + 1;

    let mut planner = FftPlanner::<f64>::new();
    let forward: Arc<dyn Fft<f64>> = planner.plan_fft_forward(len);
    let inverse: Arc<dyn Fft<f64>> = planner.plan_fft_inverse(len);

    let chirp = |n: i64| Complex64::from_polar(1.0, reduce(-0.5 * theta * (n * n) as f64));
    let mut kernel = vec![Complex64::new(0.0, 0.0); len];
    for n in 0..m {
        kernel[n] = chirp(n as i64);
    }
    for r in 1..block {
        kernel[len - r] = chirp(-(r as i64));
    }
    forward.process(&mut kernel);

    let pre: Vec<Complex64> = (0..block)
        .map(|r| Complex64::from_polar(1.0, reduce(0.5 * theta * (r * r) as f64)))
        .collect();
    let post: Vec<Complex64> = (0..m)
        .map(|j| Complex64::from_polar(1.0, reduce(0.5 * theta * (j * j) as f64)) / len as f64)
        .collect();

    let mut out = vec![Complex64::new(0.0, 0.0); m];
    let mut work = vec![Complex64::new(0.0, 0.0); len];
    for offset in (0..n).step_by(block) {
        work.iter_mut().for_each(|w| *w = Complex64::new(0.0, 0.0));
        for r in 0..block.min(n - offset) {
            let k = offset + r;
            let shift = Complex64::from_polar(1.0, scale * (k as f64 * step) * y0);
            work[r] = coeff(k) * shift * pre[r];
        }
        forward.process(&mut work);
        work.iter_mut().zip(&kernel).for_each(|(w, k)| *w *= k);
        inverse.process(&mut work);
        for j in 0..m {
            let block_phase = if offset == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::from_polar(1.0, theta * (offset as f64 * j as f64))
            };
            out[j] += work[j] * post[j] * block_phase;
        }
    }
    for (j, v) in out.iter_mut().enumerate() {
        *v *= Complex64::from_polar(1.0, scale * start * grid.point(j));
    }
    out
}

fn reduce(phase: f64) -> f64 {
    phase.rem_euclid(TAU)
}
