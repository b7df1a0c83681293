//! Discretization of momentum integrals.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expsum::NodeSet;
use crate::types::{PacketShape, PacketSpec};

pub const DEFAULT_NODES: usize = 4096;
pub const MIN_NODES: usize = 64;
/// Window half-width for Gaussian spectra, in units of `1/α`.
pub const GAUSSIAN_WINDOW_WIDTHS: f64 = 10.0;
/// Probability allowed outside the Lorentzian window.
pub const DEFAULT_LORENTZIAN_TAIL_MASS: f64 = 1e-10;
/// Minimum nodes per phase period of `exp(i·p·x/ħ)`.
pub const NODES_PER_PERIOD: f64 = 8.0;
const GAUSS_LEGENDRE_ORDER: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Trapezoid,
    GaussLegendreComposite,
}

impl Rule {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "trapezoid" => Some(Rule::Trapezoid),
            "gauss-legendre-composite" | "gauss-legendre" => Some(Rule::GaussLegendreComposite),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSettings {
    /// Half-width of the integration window around `p0`.
    pub p_window: f64,
    pub n_nodes: usize,
    pub rule: Rule,
}

impl QuadratureSettings {
    pub fn new(p_window: f64, n_nodes: usize, rule: Rule) -> Result<Self> {
        let settings = Self { p_window, n_nodes, rule };
        settings.check()?;
        Ok(settings)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.p_window.is_finite() && self.p_window > 0.0) {
            return Err(Error::InvalidParameter {
                name: "p_window",
                value: self.p_window,
                reason: "must be positive and finite",
            });
        }
        if self.n_nodes < MIN_NODES {
            return Err(Error::InvalidParameter {
                name: "n_nodes",
                value: self.n_nodes as f64,
                reason: "need at least 64 quadrature nodes",
            });
        }
        Ok(())
    }

    /// Default window for the packet shape, with enough nodes to resolve the
    /// phase `exp(i·p·x/ħ)` for every `|x| <= x_extent` on both the full-line
    /// and the half-line (sine) intervals.
    pub fn for_packet(spec: &PacketSpec, hbar: f64, x_extent: f64) -> Self {
        Self::for_packet_with_tail(spec, hbar, x_extent, DEFAULT_LORENTZIAN_TAIL_MASS)
    }

    pub fn for_packet_with_tail(spec: &PacketSpec, hbar: f64, x_extent: f64, tail_mass: f64) -> Self {
        let p_window = default_window(spec, tail_mass);
        let mut settings = Self {
            p_window,
            n_nodes: DEFAULT_NODES,
            rule: Rule::Trapezoid,
        };
        let span = settings.free_interval(spec).length().max(settings.sine_interval(spec).length());
        let max_step = max_node_spacing(hbar, x_extent);
        let needed = (span / max_step).ceil() as usize + 1;
        settings.n_nodes = settings.n_nodes.max(needed);
        settings
    }

    /// Interval of the full-line momentum integral.
    pub fn free_interval(&self, spec: &PacketSpec) -> Interval {
        match &spec.shape {
            PacketShape::Tabulated(table) => Interval::new(table.p_min(), table.p_max()),
            _ => Interval::new(spec.p0 - self.p_window, spec.p0 + self.p_window),
        }
    }

    /// Interval `[0, P]` of the half-line integral with the odd kernel; it
    /// covers the mirror image of the full-line window.
    pub fn sine_interval(&self, spec: &PacketSpec) -> Interval {
        let free = self.free_interval(spec);
        Interval::new(0.0, free.lo.abs().max(free.hi.abs()))
    }

    /// Mean node spacing on `interval`.
    pub fn node_spacing(&self, interval: Interval) -> f64 {
        match self.rule {
            Rule::Trapezoid => interval.length() / (self.n_nodes - 1) as f64,
            Rule::GaussLegendreComposite => interval.length() / self.n_nodes as f64,
        }
    }

    /// Checks that the nodes on `interval` resolve the phase at `|x| = x_extent`.
    pub fn check_resolution(&self, interval: Interval, hbar: f64, x_extent: f64) -> Result<()> {
        let spacing = self.node_spacing(interval);
        let limit = max_node_spacing(hbar, x_extent);
        if spacing > limit * (1.0 + 1e-12) {
            return Err(Error::Resolution {
                invariant: "momentum node spacing <= 2πħ/(8·|x|)",
                actual: spacing,
                limit,
            });
        }
        Ok(())
    }

    /// Nodes and weights of the rule on `interval`.
    pub fn nodes(&self, interval: Interval) -> (NodeSet, Weights) {
        match self.rule {
            Rule::Trapezoid => {
                let n = self.n_nodes;
                let h = interval.length() / (n - 1) as f64;
                (
                    NodeSet::Uniform {
                        start: interval.lo,
                        step: h,
                        n,
                    },
                    Weights::Trapezoid { h, n },
                )
            }
            Rule::GaussLegendreComposite => {
                let (ref_nodes, ref_weights) = gauss_legendre(GAUSS_LEGENDRE_ORDER);
                let panels = self.n_nodes.div_ceil(GAUSS_LEGENDRE_ORDER);
                let width = interval.length() / panels as f64;
                let mut nodes = Vec::with_capacity(panels * GAUSS_LEGENDRE_ORDER);
                let mut weights = Vec::with_capacity(panels * GAUSS_LEGENDRE_ORDER);
                for panel in 0..panels {
                    let mid = interval.lo + (panel as f64 + 0.5) * width;
                    for (x, w) in ref_nodes.iter().zip(&ref_weights) {
                        nodes.push(mid + 0.5 * width * x);
                        weights.push(0.5 * width * w);
                    }
                }
                (NodeSet::General(nodes), Weights::Listed(weights))
            }
        }
    }
}

/// Quadrature weights; the trapezoid ones are computed rather than stored.
#[derive(Debug, Clone, PartialEq)]
pub enum Weights {
    Trapezoid { h: f64, n: usize },
    Listed(Vec<f64>),
}

impl Weights {
    pub fn get(&self, k: usize) -> f64 {
        match self {
            Weights::Trapezoid { h, n } => {
                if k == 0 || k == n - 1 {
                    0.5 * h
                } else {
                    *h
                }
            }
            Weights::Listed(w) => w[k],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Largest node spacing that still gives eight nodes per period of
/// `exp(i·p·x/ħ)` at `|x| = x_extent`.
pub fn max_node_spacing(hbar: f64, x_extent: f64) -> f64 {
    if x_extent <= 0.0 {
        f64::INFINITY
    } else {
        TAU * hbar / (NODES_PER_PERIOD * x_extent)
    }
}

fn default_window(spec: &PacketSpec, tail_mass: f64) -> f64 {
    match &spec.shape {
        PacketShape::Gaussian { alpha } => GAUSSIAN_WINDOW_WIDTHS / alpha,
        PacketShape::Lorentzian { alpha } => lorentzian_window(*alpha, tail_mass),
        PacketShape::Tabulated(table) => (table.p_max() - spec.p0).abs().max((spec.p0 - table.p_min()).abs()),
    }
}

/// Probability of the unit-normalized Lorentzian spectrum `|φ|²` lying outside
/// `|p − p0| <= window`.
pub fn lorentzian_tail_mass(alpha: f64, window: f64) -> f64 {
    let s = alpha * window;
    // (2/π)·[π/2 − atan(s) − s/(s²+1)], with π/2 − atan(s) = atan(1/s) for accuracy at large s.
    (2.0 / PI) * ((1.0 / s).atan() - s / (s * s + 1.0))
}

/// Smallest half-width whose Lorentzian tail mass is below `tail_mass`.
pub fn lorentzian_window(alpha: f64, tail_mass: f64) -> f64 {
    let (mut lo, mut hi) = (1e-3 / alpha, 1.0 / alpha);
    while lorentzian_tail_mass(alpha, hi) > tail_mass {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if lorentzian_tail_mass(alpha, mid) > tail_mass {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    hi
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let n = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut derivative = 0.0;
        for _ in 0..100 {
            let (p, dp) = legendre(order, x);
            derivative = dp;
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * derivative * derivative);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(order: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=order {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = order as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}
