//! The acceptance suite: each criterion is measured numerically and compared
//! with its reference value at a fixed tolerance.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::analysis::{
    compute_time_series, ehrenfest_residual, fourier_to_momentum, position_moments, symmetrized_momentum_mean,
    AnalysisGrids, TimeSeries, UNCERTAINTY_SLACK,
};
use crate::error::Result;
use crate::oracle::{lorentzian_psi0, GaussianClosedForm};
use crate::quadrature::QuadratureSettings;
use crate::spectral::{initial_spectrum, Method, Propagator};
use crate::types::{Grid, PacketSpec, PhysicalParams, SampledField};

/// The α values of the width study.
pub const ALPHA_SET: [f64; 5] = [1.0 / 3.0, 0.5, 1.0, 2.0, 3.0];

/// Test-harness perturbations; the default leaves everything untouched.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hooks {
    /// Multiplies `β_{T_C}` inside the oracle's collision-time formulas.
    pub collision_beta_scale: f64,
}

impl Default for Hooks {
    fn default() -> Self {
        Self {
            collision_beta_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Check {
    Within { expected: f64, tolerance: f64 },
    Below { limit: f64 },
    Above { limit: f64 },
    AtLeast { limit: f64 },
}

impl Check {
    pub fn holds(&self, measured: f64) -> bool {
        match *self {
            Check::Within { expected, tolerance } => (measured - expected).abs() <= tolerance,
            Check::Below { limit } => measured < limit,
            Check::Above { limit } => measured > limit,
            Check::AtLeast { limit } => measured >= limit,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Check::Within { expected, tolerance } => write!(f, "expected {expected:.6} ± {tolerance:.1e}"),
            Check::Below { limit } => write!(f, "required < {limit:.1e}"),
            Check::Above { limit } => write!(f, "required > {limit}"),
            Check::AtLeast { limit } => write!(f, "required >= {limit:.6}"),
        }
    }
}

/// One measured line of the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub id: String,
    pub name: String,
    pub measured: f64,
    pub check: Check,
    pub pass: bool,
    pub detail: String,
}

impl Outcome {
    fn new(id: impl Into<String>, name: impl Into<String>, measured: f64, check: Check) -> Self {
        Self {
            id: id.into(),
            name: name.into(),
            measured,
            pass: check.holds(measured),
            check,
            detail: String::new(),
        }
    }

    fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    fn errored(id: &str, name: &str, error: &crate::error::Error) -> Self {
        Self {
            id: id.into(),
            name: name.into(),
            measured: f64::NAN,
            check: Check::Below { limit: f64::NAN },
            pass: false,
            detail: format!("error: {error}"),
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{verdict} [{}] {}: measured {:.6e}, {}", self.id, self.name, self.measured, self.check)?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Report {
    pub outcomes: Vec<Outcome>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        !self.outcomes.is_empty() && self.outcomes.iter().all(|o| o.pass)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.outcomes {
            writeln!(f, "{o}")?;
        }
        let passed = self.outcomes.iter().filter(|o| o.pass).count();
        write!(f, "{passed}/{} criteria passed", self.outcomes.len())
    }
}

/// A single criterion: its id, a short title, and how to measure it.
pub struct Criterion {
    pub id: &'static str,
    pub title: &'static str,
    pub run: fn(&Hooks) -> Result<Vec<Outcome>>,
}

pub const CRITERIA: [Criterion; 10] = [
    Criterion {
        id: "1",
        title: "compression ratio at T_C",
        run: compression_ratio,
    },
    Criterion {
        id: "2",
        title: "symmetrized momentum at T_C",
        run: collision_momentum,
    },
    Criterion {
        id: "3",
        title: "free quadrature vs closed form",
        run: oracle_equivalence,
    },
    Criterion {
        id: "4",
        title: "sine route vs mirror route",
        run: route_equivalence,
    },
    Criterion {
        id: "5",
        title: "momentum reversal",
        run: momentum_reversal,
    },
    Criterion {
        id: "6",
        title: "uncertainty floor and initial saturation",
        run: uncertainty,
    },
    Criterion {
        id: "7",
        title: "Ehrenfest relation",
        run: ehrenfest,
    },
    Criterion {
        id: "8",
        title: "norm conservation",
        run: norm_conservation,
    },
    Criterion {
        id: "9",
        title: "collision density shape",
        run: collision_density_shape,
    },
    Criterion {
        id: "10",
        title: "Lorentzian consistency",
        run: lorentzian,
    },
];

/// Runs one criterion, turning an error into a failing line.
pub fn run_criterion(criterion: &Criterion, hooks: &Hooks) -> Vec<Outcome> {
    match (criterion.run)(hooks) {
        Ok(outcomes) => outcomes,
        Err(e) => vec![Outcome::errored(criterion.id, criterion.title, &e)],
    }
}

pub fn run_all(hooks: &Hooks) -> Report {
    Report {
        outcomes: CRITERIA.iter().flat_map(|c| run_criterion(c, hooks)).collect(),
    }
}

fn standard_params() -> PhysicalParams {
    PhysicalParams::default()
}

fn wall_grid() -> Grid {
    Grid {
        min: -30.0,
        max: 0.0,
        n: 4096,
    }
}

fn free_grid() -> Grid {
    Grid {
        min: -30.0,
        max: 30.0,
        n: 4096,
    }
}

fn momentum_grid(alpha: f64) -> Grid {
    // both peaks at ±p0 plus ten momentum widths
    let reach = (10.0 + 10.0 / (2f64.sqrt() * alpha)).max(20.0).ceil();
    Grid {
        min: -reach,
        max: reach,
        n: 4096,
    }
}

fn propagator(spec: PacketSpec, extent: f64) -> Result<Propagator> {
    let params = standard_params();
    let q = QuadratureSettings::for_packet(&spec, params.hbar, extent);
    Propagator::new(spec, params, q)
}

fn oracle(spec: &PacketSpec, hooks: &Hooks) -> Result<GaussianClosedForm> {
    Ok(GaussianClosedForm::new(spec, standard_params())?.with_collision_beta_scale(hooks.collision_beta_scale))
}

fn alpha_label(alpha: f64) -> String {
    if (alpha - 1.0 / 3.0).abs() < 1e-12 {
        "1/3".into()
    } else {
        format!("{alpha}")
    }
}

fn max_abs_diff(a: &SampledField, b: &SampledField) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn times(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| start + i as f64 * step).collect()
}

fn wall_series(alpha: f64, step: f64) -> Result<TimeSeries> {
    let prop = propagator(PacketSpec::gaussian(alpha, -10.0, 10.0), 30.0)?;
    let grids = AnalysisGrids {
        position: wall_grid(),
        momentum: momentum_grid(alpha),
    };
    compute_time_series(&prop, &times(0.0, 2.0, step), Method::WallMirror, &grids)
}

/// Wall and free spreads at `T_C`, measured on sampled fields.
pub fn measured_compression_ratio(alpha: f64) -> Result<f64> {
    let spec = PacketSpec::gaussian(alpha, -10.0, 10.0);
    let prop = propagator(spec, 30.0)?;
    let t_c = 1.0;
    let wall = position_moments(&prop.sample(&wall_grid(), t_c, Method::WallMirror)?)?;
    let free = position_moments(&prop.sample(&free_grid(), t_c, Method::Free)?)?;
    Ok(wall.spread / free.spread)
}

fn compression_ratio(hooks: &Hooks) -> Result<Vec<Outcome>> {
    ALPHA_SET
        .iter()
        .map(|&alpha| {
            let expected = oracle(&PacketSpec::gaussian(alpha, -10.0, 10.0), hooks)?.compression_ratio()?;
            let measured = measured_compression_ratio(alpha)?;
            Ok(Outcome::new(
                "1",
                format!("Δx_wall/Δx_free at T_C, α = {}", alpha_label(alpha)),
                measured,
                Check::Within {
                    expected,
                    tolerance: 0.005,
                },
            ))
        })
        .collect()
}

fn collision_momentum(hooks: &Hooks) -> Result<Vec<Outcome>> {
    let mut out = Vec::new();
    for alpha in [0.5, 1.0, 2.0] {
        let spec = PacketSpec::gaussian(alpha, -10.0, 10.0);
        let expected = oracle(&spec, hooks)?.collision_p_mean()?;
        let prop = propagator(spec, 30.0)?;
        let field = prop.sample(&wall_grid(), 1.0, Method::WallMirror)?;
        let sym = symmetrized_momentum_mean(&field, standard_params().hbar)?;
        out.push(
            Outcome::new(
                "2",
                format!("symmetrized ⟨p⟩ at T_C, α = {alpha}"),
                sym.value,
                Check::Within {
                    expected,
                    tolerance: 0.01 * expected.abs(),
                },
            )
            .with_detail(format!("imaginary residue {:.1e}", sym.imaginary_residue)),
        );
        if alpha == 1.0 {
            out.push(Outcome::new(
                "2",
                "symmetrized ⟨p⟩ at T_C, standard packet",
                sym.value,
                Check::Within {
                    expected: -0.399,
                    tolerance: 0.004,
                },
            ));
        }
    }
    Ok(out)
}

fn oracle_equivalence(hooks: &Hooks) -> Result<Vec<Outcome>> {
    let spec = PacketSpec::standard();
    let cf = oracle(&spec, hooks)?;
    let grid = Grid::new(-30.0, 30.0, 2048)?;
    let prop = propagator(spec, grid.extent())?;
    let mut worst: f64 = 0.0;
    for t in [0.0, 1.0, 2.0] {
        let field = prop.sample(&grid, t, Method::Free)?;
        for (x, v) in grid.points().zip(field.values()) {
            worst = worst.max((v - cf.psi(x, t)).norm());
        }
    }
    Ok(vec![Outcome::new(
        "3",
        "max |ψ_quadrature − ψ_closed| on 2048 points, t ∈ {0, 1, 2}",
        worst,
        Check::Below { limit: 1e-8 },
    )])
}

fn route_equivalence(_: &Hooks) -> Result<Vec<Outcome>> {
    let prop = propagator(PacketSpec::standard(), 30.0)?;
    let mut worst: f64 = 0.0;
    for t in [0.5, 1.0, 1.5] {
        let sine = prop.sample(&wall_grid(), t, Method::WallSine)?;
        let mirror = prop.sample(&wall_grid(), t, Method::WallMirror)?;
        worst = worst.max(max_abs_diff(&sine, &mirror));
    }
    Ok(vec![Outcome::new(
        "4",
        "max |ψ_sine − ψ_mirror| on the wall grid, t ∈ {0.5, 1, 1.5}",
        worst,
        Check::Below { limit: 1e-6 },
    )])
}

/// `max_p | |φ_wall(p, t)|² − |φ(−p, 0)|² |`, with the position of the worst point.
fn reversal_deviation(prop: &Propagator, t: f64, p_grid: &Grid) -> Result<(f64, f64, SampledField)> {
    let params = *prop.params();
    let field = prop.sample(&wall_grid(), t, Method::WallMirror)?;
    let phi = fourier_to_momentum(&field, p_grid, params.hbar)?;
    let mut worst = (0.0, 0.0);
    for (p, v) in p_grid.points().zip(phi.values()) {
        let d = (v.norm_sqr() - initial_spectrum(prop.spec(), &params, -p).norm_sqr()).abs();
        if d > worst.0 {
            worst = (d, p);
        }
    }
    Ok((worst.0, worst.1, phi))
}

fn momentum_reversal(_: &Hooks) -> Result<Vec<Outcome>> {
    let prop = propagator(PacketSpec::standard(), 30.0)?;
    let (worst, _, _) = reversal_deviation(&prop, 2.0, &momentum_grid(1.0))?;
    Ok(vec![Outcome::new(
        "5",
        "max_p |P(p, 2) − P_initial(−p)|, standard packet",
        worst,
        Check::Below { limit: 1e-4 },
    )])
}

fn uncertainty(_: &Hooks) -> Result<Vec<Outcome>> {
    let mut floor = f64::INFINITY;
    let mut saturation = f64::NAN;
    for alpha in ALPHA_SET {
        let series = wall_series(alpha, 0.01)?;
        floor = series.rows.iter().map(|r| r.product).fold(floor, f64::min);
        if alpha == 1.0 {
            saturation = (series.rows[0].product - 0.5).abs();
        }
    }
    Ok(vec![
        Outcome::new(
            "6",
            "min Δx·Δp/ħ over all rows, five α, t ∈ [0, 2]",
            floor,
            Check::AtLeast {
                limit: 0.5 - UNCERTAINTY_SLACK,
            },
        ),
        Outcome::new(
            "6",
            "|Δx·Δp/ħ − 1/2| at t = 0, standard packet",
            saturation,
            Check::Below { limit: 1e-6 },
        ),
    ])
}

/// Wall-packet Ehrenfest residual around the collision, with a momentum
/// grid wide enough for the `1/p⁴` tails the wall produces.
pub fn wall_ehrenfest_residual(step: f64) -> Result<f64> {
    let prop = propagator(PacketSpec::standard(), 30.0)?;
    let grids = AnalysisGrids {
        position: wall_grid(),
        momentum: Grid::new(-200.0, 200.0, 16384)?,
    };
    let series = compute_time_series(&prop, &times(0.5, 1.5, step), Method::WallMirror, &grids)?;
    ehrenfest_residual(&series, standard_params().mass)
}

fn ehrenfest(_: &Hooks) -> Result<Vec<Outcome>> {
    let prop = propagator(PacketSpec::standard(), 30.0)?;
    let grids = AnalysisGrids {
        position: free_grid(),
        momentum: momentum_grid(1.0),
    };
    let free = compute_time_series(&prop, &times(0.0, 2.0, 0.01), Method::Free, &grids)?;
    let free_residual = ehrenfest_residual(&free, standard_params().mass)?;
    let coarse = wall_ehrenfest_residual(0.01)?;
    let fine = wall_ehrenfest_residual(0.005)?;
    Ok(vec![
        Outcome::new(
            "7",
            "free packet max |⟨p⟩ − m·d⟨x⟩/dt|, Δt = 0.01",
            free_residual,
            Check::Below { limit: 1e-6 },
        ),
        Outcome::new(
            "7",
            "wall residual ratio, Δt = 0.01 over Δt = 0.005",
            coarse / fine,
            Check::AtLeast { limit: 3.5 },
        )
        .with_detail(format!("residuals {coarse:.3e} and {fine:.3e}")),
    ])
}

fn norm_conservation(_: &Hooks) -> Result<Vec<Outcome>> {
    let series = wall_series(1.0, 0.01)?;
    Ok(vec![Outcome::new(
        "8",
        "wall-mirror norm drift over t ∈ [0, 2]",
        series.norm_drift(),
        Check::Below { limit: 1e-7 },
    )])
}

fn collision_density_shape(hooks: &Hooks) -> Result<Vec<Outcome>> {
    let spec = PacketSpec::standard();
    let cf = oracle(&spec, hooks)?;
    let prop = propagator(spec, 30.0)?;
    let t_c = cf.collision_time()?;
    let field = prop.sample(&wall_grid(), t_c, Method::WallMirror)?;
    let density = field.density();
    let peak = density.iter().copied().fold(0.0, f64::max);
    let mut worst: f64 = 0.0;
    for (x, d) in wall_grid().points().zip(&density) {
        if *d > 0.01 * peak {
            worst = worst.max((d / cf.collision_density(x)? - 1.0).abs());
        }
    }
    Ok(vec![Outcome::new(
        "9",
        "max relative deviation from the sin² envelope where density > 1% of peak",
        worst,
        Check::Below { limit: 0.02 },
    )])
}

/// Tail mass of `|φ|²` left outside the momentum window when checking the
/// initial Lorentzian pointwise; the cusp at `x0` converges only as `1/W`.
pub const LORENTZIAN_POINTWISE_TAIL: f64 = 5e-19;

fn lorentzian(_: &Hooks) -> Result<Vec<Outcome>> {
    let params = standard_params();
    let spec = PacketSpec::lorentzian(1.0, -10.0, 10.0);

    let grid = Grid::new(-30.0, 30.0, 8191)?;
    let q = QuadratureSettings::for_packet_with_tail(&spec, params.hbar, grid.extent(), LORENTZIAN_POINTWISE_TAIL);
    let fine = Propagator::new(spec.clone(), params, q)?;
    let field = fine.sample(&grid, 0.0, Method::Free)?;
    let mut initial: f64 = 0.0;
    for (x, v) in grid.points().zip(field.values()) {
        initial = initial.max((v - lorentzian_psi0(&spec, &params, x)?).norm());
    }

    let prop = propagator(spec.clone(), 30.0)?;
    let p_grid = momentum_grid(1.0);
    let (reversal, at, phi) = reversal_deviation(&prop, 2.0, &p_grid)?;
    // the negative-momentum components never reach the wall and interfere
    // with the reflected peak: late-time |φ(p) − φ(−p)|²
    let odd = p_grid
        .points()
        .zip(phi.values())
        .filter(|(p, _)| *p <= 0.0)
        .map(|(p, v)| {
            let expected = initial_spectrum(&spec, &params, p) - initial_spectrum(&spec, &params, -p);
            (v.norm_sqr() - expected.norm_sqr()).abs()
        })
        .fold(0.0, f64::max);

    let start = prop.sample(&wall_grid(), 0.0, Method::WallMirror)?;
    let end = prop.sample(&wall_grid(), 2.0, Method::WallMirror)?;
    let before = best_gaussian_overlap(&start);
    let after = best_gaussian_overlap(&end);

    Ok(vec![
        Outcome::new(
            "10a",
            "Lorentzian max |ψ(x, 0) − ψ_closed(x)| on [−30, 30]",
            initial,
            Check::Below { limit: 1e-6 },
        )
        .with_detail(format!("momentum window ±{:.3e}, {} nodes", q.p_window, q.n_nodes)),
        Outcome::new(
            "10b",
            "Lorentzian max_p |P(p, 2) − P_initial(−p)|",
            reversal,
            Check::Below { limit: 1e-3 },
        )
        .with_detail(format!(
            "worst at p = {at:.3}; for p <= 0 the deviation from |φ(p) − φ(−p)|² is {odd:.2e}"
        )),
        Outcome::new(
            "10c",
            "Lorentzian best-fit Gaussian overlap gain, t = 2 over t = 0",
            after - before,
            Check::Above { limit: 0.0 },
        )
        .with_detail(format!("overlap {before:.5} at t = 0, {after:.5} at t = 2")),
    ])
}

/// Largest Bhattacharyya coefficient `∫ sqrt(ρ·g)` between the normalized
/// density of `field` and a normal density `g`, over its center and width.
pub fn best_gaussian_overlap(field: &SampledField) -> f64 {
    let grid = field.grid();
    let density = field.density();
    let norm = grid.integrate(density.iter().copied());
    let overlap = |mu: f64, sigma: f64| {
        grid.integrate(grid.points().zip(&density).map(|(x, d)| {
            let z = (x - mu) / sigma;
            (d / norm * (-0.5 * z * z).exp() / (sigma * (2.0 * PI).sqrt())).sqrt()
        }))
    };
    let Ok(m) = position_moments(field) else {
        return 0.0;
    };
    let (mut mu, mut sigma) = (m.mean, m.spread.max(grid.spacing()));
    let mut best = overlap(mu, sigma);
    let mut step = (sigma, 0.5);
    while step.0 > 1e-6 * sigma.max(1.0) {
        let mut improved = false;
        for (dm, ds) in [(step.0, 1.0), (-step.0, 1.0), (0.0, 1.0 + step.1), (0.0, 1.0 / (1.0 + step.1))] {
            let value = overlap(mu + dm, sigma * ds);
            if value > best {
                best = value;
                mu += dm;
                sigma *= ds;
                improved = true;
            }
        }
        if !improved {
            step = (0.5 * step.0, 0.5 * step.1);
        }
    }
    best
}
