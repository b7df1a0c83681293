//! Position-space amplitudes from momentum-space spectra.
//!
//! Three routes give the wall-bounded state: the odd (sine) kernel over
//! positive momenta, and the mirror superposition `ψ(x,t) − ψ(−x,t)` of two
//! free amplitudes. Free amplitudes are quadratures of
//! `ψ(x,t) = (2πħ)^(-1/2) ∫ exp(ipx/ħ) exp(−ip²t/2mħ) φ(p,0) dp`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expsum::ExpSum;
use crate::oracle::GaussianClosedForm;
use crate::quadrature::{Interval, QuadratureSettings};
use crate::types::{Grid, PacketShape, PacketSpec, PhysicalParams, SampledField, Space};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Free,
    WallSine,
    WallMirror,
}

impl Method {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "free" => Some(Method::Free),
            "wall-sine" => Some(Method::WallSine),
            "wall-mirror" => Some(Method::WallMirror),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Free => "free",
            Method::WallSine => "wall-sine",
            Method::WallMirror => "wall-mirror",
        }
    }

    pub fn is_wall(self) -> bool {
        !matches!(self, Method::Free)
    }
}

/// Where the mirror route takes its free amplitudes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MirrorSource {
    #[default]
    Quadrature,
    /// Exact Gaussian evolution; only valid for Gaussian packets.
    ClosedForm,
}

/// `φ(p,0)`, including the translation phase `exp(−i·p·x0/ħ)`.
pub fn initial_spectrum(spec: &PacketSpec, params: &PhysicalParams, p: f64) -> Complex64 {
    let q = p - spec.p0;
    let envelope = match &spec.shape {
        PacketShape::Gaussian { alpha } => {
            let norm = (alpha / PI.sqrt()).sqrt();
            Complex64::new(norm * (-0.5 * alpha * alpha * q * q).exp(), 0.0)
        }
        PacketShape::Lorentzian { alpha } => {
            let norm = (2.0 * alpha / PI).sqrt();
            Complex64::new(norm / (alpha * alpha * q * q + 1.0), 0.0)
        }
        PacketShape::Tabulated(table) => table.amplitude(p),
    };
    envelope * Complex64::from_polar(1.0, -p * spec.x0 / params.hbar)
}

/// `φ(p,t) = φ(p,0)·exp(−i·p²·t/2mħ)`.
pub fn spectrum_at(spec: &PacketSpec, params: &PhysicalParams, p: f64, t: f64) -> Complex64 {
    initial_spectrum(spec, params, p) * free_phase(params, p, t)
}

fn free_phase(params: &PhysicalParams, p: f64, t: f64) -> Complex64 {
    Complex64::from_polar(1.0, -p * p * t / (2.0 * params.mass * params.hbar))
}

#[derive(Debug, Clone)]
pub struct Propagator {
    spec: PacketSpec,
    params: PhysicalParams,
    quadrature: QuadratureSettings,
    mirror_source: MirrorSource,
}

impl Propagator {
    pub fn new(spec: PacketSpec, params: PhysicalParams, quadrature: QuadratureSettings) -> Result<Self> {
        params.check()?;
        quadrature.check()?;
        Ok(Self {
            spec,
            params,
            quadrature,
            mirror_source: MirrorSource::Quadrature,
        })
    }

    pub fn with_mirror_source(mut self, source: MirrorSource) -> Result<Self> {
        if source == MirrorSource::ClosedForm {
            GaussianClosedForm::new(&self.spec, self.params)?;
        }
        self.mirror_source = source;
        Ok(self)
    }

    pub fn spec(&self) -> &PacketSpec {
        &self.spec
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn quadrature(&self) -> &QuadratureSettings {
        &self.quadrature
    }

    fn prefactor(&self) -> f64 {
        1.0 / (2.0 * PI * self.params.hbar).sqrt()
    }

    /// Weighted spectrum `c_k = w_k·φ(p_k,t)/sqrt(2πħ)` on the full-line window.
    fn free_sum(&self, t: f64) -> ExpSum<'_> {
        let interval = self.quadrature.free_interval(&self.spec);
        let (nodes, weights) = self.quadrature.nodes(interval);
        let pre = self.prefactor();
        let at = nodes.clone();
        ExpSum::computed(nodes, move |k| {
            spectrum_at(&self.spec, &self.params, at.node(k), t) * (weights.get(k) * pre)
        })
    }

    /// Weighted odd spectrum `c_k = w_k·[φ(p_k) − φ(−p_k)]·phase/sqrt(2πħ)` on `[0, P]`.
    fn sine_sum(&self, t: f64) -> ExpSum<'_> {
        let interval = self.quadrature.sine_interval(&self.spec);
        let (nodes, weights) = self.quadrature.nodes(interval);
        let pre = self.prefactor();
        let at = nodes.clone();
        ExpSum::computed(nodes, move |k| {
            let p = at.node(k);
            let odd = initial_spectrum(&self.spec, &self.params, p) - initial_spectrum(&self.spec, &self.params, -p);
            odd * free_phase(&self.params, p, t) * (weights.get(k) * pre)
        })
    }

    fn check(&self, interval: Interval, x_extent: f64) -> Result<()> {
        self.quadrature.check_resolution(interval, self.params.hbar, x_extent)
    }

    /// Free-particle `ψ(x,t)` by quadrature over `[p0 − W, p0 + W]`.
    pub fn free_amplitude(&self, x: f64, t: f64) -> Result<Complex64> {
        self.check(self.quadrature.free_interval(&self.spec), x.abs())?;
        Ok(self.free_sum(t).at(x, 1.0 / self.params.hbar))
    }

    /// Wall-bounded `ψ(x,t)` from the kernel `exp(ipx/ħ) − exp(−ipx/ħ) = 2i·sin(px/ħ)`
    /// integrated over `p ∈ [0, P]`. Zero for `x >= 0`.
    pub fn wall_amplitude_sine(&self, x: f64, t: f64) -> Result<Complex64> {
        if x >= 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        self.check(self.quadrature.sine_interval(&self.spec), x.abs())?;
        let sum = self.sine_sum(t);
        let nodes = sum.nodes();
        let total: Complex64 = (0..sum.len())
            .map(|k| sum.coeff(k) * (nodes.node(k) * x / self.params.hbar).sin())
            .sum();
        Ok(total * Complex64::new(0.0, 2.0))
    }

    /// Wall-bounded `ψ(x,t) − ψ(−x,t)` for `x < 0`; zero for `x >= 0`.
    pub fn wall_amplitude_mirror(&self, x: f64, t: f64) -> Result<Complex64> {
        if x >= 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        match self.mirror_source {
            MirrorSource::Quadrature => Ok(self.free_amplitude(x, t)? - self.free_amplitude(-x, t)?),
            MirrorSource::ClosedForm => {
                let cf = GaussianClosedForm::new(&self.spec, self.params)?;
                Ok(cf.psi(x, t) - cf.psi(-x, t))
            }
        }
    }

    /// Samples the chosen route on every grid point.
    pub fn sample(&self, grid: &Grid, t: f64, method: Method) -> Result<SampledField> {
        if method.is_wall() && grid.max > 0.0 {
            return Err(Error::GridCrossesWall { max: grid.max });
        }
        let scale = 1.0 / self.params.hbar;
        let values = match method {
            Method::Free => {
                self.check(self.quadrature.free_interval(&self.spec), grid.extent())?;
                self.free_sum(t).on_grid(grid, scale)
            }
            Method::WallSine => {
                self.check(self.quadrature.sine_interval(&self.spec), grid.extent())?;
                let sum = self.sine_sum(t);
                let terms: Vec<(f64, Complex64)> =
                    (0..sum.len()).map(|k| (sum.nodes().node(k) * scale, sum.coeff(k))).collect();
                grid.points()
                    .collect::<Vec<_>>()
                    .par_iter()
                    .map(|&x| {
                        if x >= 0.0 {
                            return Complex64::new(0.0, 0.0);
                        }
                        let total: Complex64 = terms.iter().map(|(k, c)| c * (k * x).sin()).sum();
                        total * Complex64::new(0.0, 2.0)
                    })
                    .collect()
            }
            Method::WallMirror => match self.mirror_source {
                MirrorSource::Quadrature => {
                    self.check(self.quadrature.free_interval(&self.spec), grid.extent())?;
                    let sum = self.free_sum(t);
                    antisymmetrize(grid, &sum.on_grid(grid, scale), &sum.on_grid(&grid.reflected(), scale))
                }
                MirrorSource::ClosedForm => {
                    let cf = GaussianClosedForm::new(&self.spec, self.params)?;
                    grid.points()
                        .map(|x| if x >= 0.0 { Complex64::new(0.0, 0.0) } else { cf.psi(x, t) - cf.psi(-x, t) })
                        .collect()
                }
            },
        };
        SampledField::new(*grid, values, Space::Position, t)
    }
}

/// `f(x_j) − f(−x_j)`, given `f` on the grid and on its reflection; exactly zero at `x = 0`.
fn antisymmetrize(grid: &Grid, direct: &[Complex64], reflected: &[Complex64]) -> Vec<Complex64> {
    let n = grid.n;
    (0..n)
        .map(|j| {
            if grid.point(j) >= 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                direct[j] - reflected[n - 1 - j]
            }
        })
        .collect()
}
