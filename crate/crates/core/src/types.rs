//! Shared vocabulary: physical constants, packet descriptions, grids and
//! sampled fields.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Packets closer to the wall than this many widths (`|x0| < 5·α·ħ`) trigger
/// a warning: their initial tail already overlaps the wall region.
pub const FAR_FROM_WALL_WIDTHS: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub hbar: f64,
    pub mass: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
        }
    }
}

impl PhysicalParams {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        let params = Self { hbar, mass };
        params.check()?;
        Ok(params)
    }

    pub fn check(&self) -> Result<()> {
        positive("hbar", self.hbar)?;
        positive("mass", self.mass)
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}

/// Momentum-space amplitude sampled on a uniform grid. Values between samples
/// are linearly interpolated; outside the table the amplitude is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    p_start: f64,
    dp: f64,
    amplitudes: Vec<Complex64>,
}

impl SpectrumTable {
    pub fn from_samples(samples: &[(f64, Complex64)]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidTable("need at least two samples".into()));
        }
        let p_start = samples[0].0;
        let p_end = samples[samples.len() - 1].0;
        let dp = (p_end - p_start) / (samples.len() - 1) as f64;
        if !(dp > 0.0) || !dp.is_finite() {
            return Err(Error::InvalidTable("momenta must be increasing".into()));
        }
        for (i, (p, _)) in samples.iter().enumerate() {
            let expected = p_start + i as f64 * dp;
            if (p - expected).abs() > 1e-9 * dp.max(expected.abs()) {
                return Err(Error::InvalidTable(format!(
                    "momentum grid is not uniform at sample {i} (p = {p}, expected {expected})"
                )));
            }
        }
        Ok(Self {
            p_start,
            dp,
            amplitudes: samples.iter().map(|s| s.1).collect(),
        })
    }

    pub fn p_min(&self) -> f64 {
        self.p_start
    }

    pub fn p_max(&self) -> f64 {
        self.p_start + (self.amplitudes.len() - 1) as f64 * self.dp
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitude(&self, p: f64) -> Complex64 {
        let s = (p - self.p_start) / self.dp;
        if !(s >= 0.0) || s > (self.amplitudes.len() - 1) as f64 {
            return Complex64::new(0.0, 0.0);
        }
        let i = (s.floor() as usize).min(self.amplitudes.len() - 2);
        let frac = s - i as f64;
        self.amplitudes[i] * (1.0 - frac) + self.amplitudes[i + 1] * frac
    }

    /// Standard deviation of the tabulated momentum density.
    pub fn momentum_spread(&self) -> f64 {
        let grid = Grid {
            min: self.p_min(),
            max: self.p_max(),
            n: self.amplitudes.len(),
        };
        let density: Vec<f64> = self.amplitudes.iter().map(|a| a.norm_sqr()).collect();
        moments_of_density(&grid, &density).spread
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PacketShape {
    /// `φ(p) ∝ exp(−α²(p−p0)²/2)`.
    Gaussian { alpha: f64 },
    /// `φ(p) ∝ 1/(α̃²(p−p0)² + 1)`.
    Lorentzian { alpha: f64 },
    Tabulated(SpectrumTable),
}

impl PacketShape {
    pub fn name(&self) -> &'static str {
        match self {
            PacketShape::Gaussian { .. } => "gaussian",
            PacketShape::Lorentzian { .. } => "lorentzian",
            PacketShape::Tabulated(_) => "tabulated",
        }
    }
}

/// Initial momentum-space amplitude plus the kinematics that place it.
///
/// For tabulated packets the table holds the shape of the amplitude; the
/// translation phase `exp(−i·p·x0/ħ)` is applied on top of it, as for the
/// analytic shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct PacketSpec {
    pub shape: PacketShape,
    pub x0: f64,
    pub p0: f64,
}

impl PacketSpec {
    pub fn gaussian(alpha: f64, x0: f64, p0: f64) -> Self {
        Self {
            shape: PacketShape::Gaussian { alpha },
            x0,
            p0,
        }
    }

    pub fn lorentzian(alpha: f64, x0: f64, p0: f64) -> Self {
        Self {
            shape: PacketShape::Lorentzian { alpha },
            x0,
            p0,
        }
    }

    pub fn tabulated(table: SpectrumTable, x0: f64, p0: f64) -> Self {
        Self {
            shape: PacketShape::Tabulated(table),
            x0,
            p0,
        }
    }

    /// The standard packet: Gaussian with α = 1 starting at x0 = −10 with p0 = 10.
    pub fn standard() -> Self {
        Self::gaussian(1.0, -10.0, 10.0)
    }

    /// Inverse momentum width. Tabulated packets report the Gaussian-equivalent
    /// value `1/(√2·Δp)`.
    pub fn alpha(&self) -> f64 {
        match &self.shape {
            PacketShape::Gaussian { alpha } | PacketShape::Lorentzian { alpha } => *alpha,
            PacketShape::Tabulated(table) => 1.0 / (2f64.sqrt() * table.momentum_spread()),
        }
    }
}

/// Which potential the packet evolves in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Free,
    Wall,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedScales {
    /// Spreading time `m·ħ·α²`.
    pub t0: f64,
    /// Initial width scale `α·ħ`.
    pub width0: f64,
    /// Classical arrival time `m·|x0|/p0`, when the packet moves toward the wall.
    pub collision_time: Option<f64>,
}

impl DerivedScales {
    /// `β_t = α·ħ·sqrt(1 + (t/t0)²)`.
    pub fn beta(&self, t: f64) -> f64 {
        self.width0 * (t / self.t0).hypot(1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ValidationWarning {
    NearWall { x0: f64, widths: f64 },
}

impl fmt::Display for ValidationWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationWarning::NearWall { x0, widths } => write!(
                f,
                "packet starts only {widths:.2} widths from the wall (x0 = {x0}); \
                 its initial tail overlaps x >= 0"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Validated {
    pub scales: DerivedScales,
    pub warnings: Vec<ValidationWarning>,
}

pub fn validate(spec: &PacketSpec, params: &PhysicalParams, boundary: Boundary) -> Result<Validated> {
    params.check()?;
    if !spec.x0.is_finite() {
        return Err(Error::InvalidParameter {
            name: "x0",
            value: spec.x0,
            reason: "must be finite",
        });
    }
    if !spec.p0.is_finite() {
        return Err(Error::InvalidParameter {
            name: "p0",
            value: spec.p0,
            reason: "must be finite",
        });
    }
    match &spec.shape {
        PacketShape::Gaussian { alpha } | PacketShape::Lorentzian { alpha } => positive("alpha", *alpha)?,
        PacketShape::Tabulated(table) => {
            if table.amplitudes.iter().all(|a| a.norm_sqr() == 0.0) {
                return Err(Error::InvalidTable("all amplitudes are zero".into()));
            }
        }
    }
    let alpha = spec.alpha();
    let width0 = alpha * params.hbar;
    let scales = DerivedScales {
        t0: params.mass * params.hbar * alpha * alpha,
        width0,
        collision_time: (spec.p0 > 0.0 && spec.x0 < 0.0).then(|| params.mass * spec.x0.abs() / spec.p0),
    };

    let mut warnings = Vec::new();
    if boundary == Boundary::Wall {
        if spec.x0 >= 0.0 {
            return Err(Error::PacketBehindWall { x0: spec.x0 });
        }
        let widths = spec.x0.abs() / width0;
        if widths < FAR_FROM_WALL_WIDTHS {
            let warning = ValidationWarning::NearWall { x0: spec.x0, widths };
            log::warn!("{warning}");
            warnings.push(warning);
        }
    }
    Ok(Validated { scales, warnings })
}

/// Uniform 1-D grid of `n` points spanning `[min, max]` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(min: f64, max: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {n}")));
        }
        if !(min.is_finite() && max.is_finite() && max > min) {
            return Err(Error::InvalidGrid(format!("need min < max, got [{min}, {max}]")));
        }
        Ok(Self { min, max, n })
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.n - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i == self.n - 1 {
            self.max
        } else {
            self.min + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.point(i))
    }

    /// Largest coordinate magnitude on the grid.
    pub fn extent(&self) -> f64 {
        self.min.abs().max(self.max.abs())
    }

    /// The grid of negated points, `[−max, −min]`, in ascending order.
    pub fn reflected(&self) -> Self {
        Self {
            min: -self.max,
            max: -self.min,
            n: self.n,
        }
    }

    /// Trapezoid weight of point `i`.
    pub fn weight(&self, i: usize) -> f64 {
        let h = self.spacing();
        if i == 0 || i == self.n - 1 {
            0.5 * h
        } else {
            h
        }
    }

    /// Trapezoid rule over samples taken at the grid points.
    pub fn integrate(&self, values: impl IntoIterator<Item = f64>) -> f64 {
        let mut sum = 0.0;
        let mut count = 0;
        let mut first = 0.0;
        let mut last = 0.0;
        for (i, v) in values.into_iter().enumerate() {
            if i == 0 {
                first = v;
            }
            last = v;
            sum += v;
            count += 1;
        }
        debug_assert_eq!(count, self.n);
        self.spacing() * (sum - 0.5 * (first + last))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Position,
    Momentum,
}

impl Space {
    pub fn name(self) -> &'static str {
        match self {
            Space::Position => "position",
            Space::Momentum => "momentum",
        }
    }
}

/// A complex function sampled on a uniform grid at a fixed time.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    grid: Grid,
    values: Vec<Complex64>,
    space: Space,
    time: f64,
}

impl SampledField {
    pub fn new(grid: Grid, values: Vec<Complex64>, space: Space, time: f64) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::InvalidGrid(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.n
            )));
        }
        Ok(Self {
            grid,
            values,
            space,
            time,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// `∫|f|²` by the trapezoid rule.
    pub fn norm(&self) -> f64 {
        self.grid.integrate(self.values.iter().map(|v| v.norm_sqr()))
    }

    pub fn expect_space(&self, expected: Space) -> Result<()> {
        if self.space == expected {
            Ok(())
        } else {
            Err(Error::WrongSpace {
                expected: expected.name(),
                found: self.space.name(),
            })
        }
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }
}

/// Normalization, mean and standard deviation of a density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub norm: f64,
    pub mean: f64,
    pub spread: f64,
}

/// Moments of a sampled density, divided by its norm.
pub fn moments_of_density(grid: &Grid, density: &[f64]) -> MomentSet {
    let norm = grid.integrate(density.iter().copied());
    if !(norm > 0.0) {
        return MomentSet {
            norm: norm.max(0.0),
            mean: 0.0,
            spread: 0.0,
        };
    }
    let first = grid.integrate(grid.points().zip(density).map(|(x, d)| x * d)) / norm;
    let second = grid.integrate(grid.points().zip(density).map(|(x, d)| (x - first) * (x - first) * d)) / norm;
    MomentSet {
        norm,
        mean: first,
        spread: second.max(0.0).sqrt(),
    }
}
