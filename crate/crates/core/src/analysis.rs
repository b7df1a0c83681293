//! Momentum-space transforms, moments, the symmetrized momentum expectation
//! and time series built from them.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expsum::{ExpSum, NodeSet};
use crate::spectral::{Method, Propagator};
use crate::types::{moments_of_density, Grid, MomentSet, PacketSpec, PhysicalParams, SampledField, Space};

/// Limit on the imaginary part of the symmetrized momentum integral.
pub const IMAGINARY_RESIDUE_LIMIT: f64 = 1e-8;

/// Slack allowed below `ħ/2` in the uncertainty product.
pub const UNCERTAINTY_SLACK: f64 = 1e-3;

fn transform(field: &SampledField, target: &Grid, hbar: f64, sign: f64) -> Vec<Complex64> {
    let grid = field.grid();
    let pre = 1.0 / (2.0 * PI * hbar).sqrt();
    let coeffs = field
        .values()
        .iter()
        .enumerate()
        .map(|(j, v)| v * (grid.weight(j) * pre))
        .collect();
    let nodes = NodeSet::Uniform {
        start: grid.min,
        step: grid.spacing(),
        n: grid.n,
    };
    ExpSum::new(nodes, coeffs).on_grid(target, sign / hbar)
}

fn check_sampling(source: &Grid, target: &Grid, hbar: f64, invariant: &'static str) -> Result<()> {
    let limit = PI * hbar / target.extent();
    let actual = source.spacing();
    if actual > limit {
        return Err(Error::Resolution { invariant, actual, limit });
    }
    Ok(())
}

/// `φ(p) = (2πħ)^(-1/2) ∫ ψ(x)·exp(−ipx/ħ) dx` by the trapezoid rule on `p_grid`.
pub fn fourier_to_momentum(field: &SampledField, p_grid: &Grid, hbar: f64) -> Result<SampledField> {
    field.expect_space(Space::Position)?;
    check_sampling(field.grid(), p_grid, hbar, "position spacing <= πħ/|p|max")?;
    SampledField::new(*p_grid, transform(field, p_grid, hbar, -1.0), Space::Momentum, field.time())
}

/// The inverse transform, `ψ(x) = (2πħ)^(-1/2) ∫ φ(p)·exp(ipx/ħ) dp`.
pub fn fourier_to_position(field: &SampledField, x_grid: &Grid, hbar: f64) -> Result<SampledField> {
    field.expect_space(Space::Momentum)?;
    check_sampling(field.grid(), x_grid, hbar, "momentum spacing <= πħ/|x|max")?;
    SampledField::new(*x_grid, transform(field, x_grid, hbar, 1.0), Space::Position, field.time())
}

pub fn position_moments(field: &SampledField) -> Result<MomentSet> {
    field.expect_space(Space::Position)?;
    Ok(moments_of_density(field.grid(), &field.density()))
}

pub fn momentum_moments(field: &SampledField) -> Result<MomentSet> {
    field.expect_space(Space::Momentum)?;
    Ok(moments_of_density(field.grid(), &field.density()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetrizedMomentum {
    pub value: f64,
    pub imaginary_residue: f64,
}

/// `dψ/dx` with a fourth-order centered stencil. Beyond each end the samples
/// are continued by point reflection, `ψ(e − s) = 2ψ(e) − ψ(e + s)`, which is
/// exact for a field that is odd about a wall at the end point.
fn derivative(values: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = values.len() as isize;
    let at = |k: isize| {
        if k < 0 {
            2.0 * values[0] - values[(-k) as usize]
        } else if k >= n {
            2.0 * values[(n - 1) as usize] - values[(2 * (n - 1) - k) as usize]
        } else {
            values[k as usize]
        }
    };
    (0..n)
        .map(|j| (at(j - 2) - 8.0 * at(j - 1) + 8.0 * at(j + 1) - at(j + 2)) / (12.0 * h))
        .collect()
}

/// `⟨p̂⟩` from `½[(p̂ψ)*ψ + ψ*(p̂ψ)]` with `p̂ = −iħ·d/dx`, divided by the norm.
///
/// The reported residue is the imaginary part of the unsymmetrized
/// `⟨ψ|p̂ψ⟩`, which is the boundary term `ħ·(|ψ(a)|² − |ψ(b)|²)/2`; it
/// vanishes only when the field vanishes at both grid ends.
pub fn symmetrized_momentum_mean(field: &SampledField, hbar: f64) -> Result<SymmetrizedMomentum> {
    field.expect_space(Space::Position)?;
    let grid = field.grid();
    if grid.n < 3 {
        return Err(Error::InvalidGrid(format!("derivative stencil needs 3 points, got {}", grid.n)));
    }
    let psi = field.values();
    let h = grid.spacing();
    let d = derivative(psi, h);

    let norm = field.norm();
    if !(norm > 0.0) {
        return Err(Error::InvalidGrid("field has zero norm".into()));
    }
    let k_rms = (grid.integrate(d.iter().map(|v| v.norm_sqr())) / norm).sqrt();
    if k_rms * h > FRAC_PI_4 {
        return Err(Error::Resolution {
            invariant: "rms wavenumber × spacing <= π/4",
            actual: k_rms * h,
            limit: FRAC_PI_4,
        });
    }

    let integrand = psi.iter().zip(&d).map(|(p, dp)| {
        let p_psi = Complex64::new(0.0, -hbar) * dp;
        0.5 * (p_psi.conj() * p + p.conj() * p_psi).re
    });
    let value = grid.integrate(integrand) / norm;
    let ends = psi[0].norm_sqr() - psi[psi.len() - 1].norm_sqr();
    let imaginary_residue = 0.5 * hbar * ends.abs() / norm;
    if imaginary_residue >= IMAGINARY_RESIDUE_LIMIT {
        return Err(Error::ImaginaryResidue {
            residue: imaginary_residue,
            limit: IMAGINARY_RESIDUE_LIMIT,
        });
    }
    Ok(SymmetrizedMomentum { value, imaginary_residue })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesRow {
    pub t: f64,
    pub norm: f64,
    pub mean_x: f64,
    pub dx: f64,
    pub mean_p: f64,
    pub dp: f64,
    /// `Δx·Δp/ħ`
    pub product: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TimeSeries {
    pub rows: Vec<TimeSeriesRow>,
}

impl TimeSeries {
    pub fn new(rows: Vec<TimeSeriesRow>) -> Result<Self> {
        check_increasing(rows.iter().map(|r| r.t))?;
        Ok(Self { rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows whose uncertainty product falls below `1/2 − slack`.
    pub fn uncertainty_violations(&self, slack: f64) -> Vec<&TimeSeriesRow> {
        self.rows.iter().filter(|r| r.product < 0.5 - slack).collect()
    }

    /// `max − min` of the position-space norm over all rows.
    pub fn norm_drift(&self) -> f64 {
        let (lo, hi) = self
            .rows
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.norm), hi.max(r.norm)));
        if self.rows.is_empty() {
            0.0
        } else {
            hi - lo
        }
    }

    pub fn row_at(&self, t: f64) -> Option<&TimeSeriesRow> {
        self.rows.iter().min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
    }
}

fn check_increasing(times: impl IntoIterator<Item = f64>) -> Result<()> {
    let mut previous = f64::NEG_INFINITY;
    for t in times {
        if !(t > previous) {
            return Err(Error::UnorderedTimes);
        }
        previous = t;
    }
    Ok(())
}

/// Position and momentum grids used for one time series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisGrids {
    pub position: Grid,
    pub momentum: Grid,
}

impl AnalysisGrids {
    pub const DEFAULT_POINTS: usize = 4096;

    /// `[−30, 0]` for wall methods, `[−30, 30]` for free runs, and `p ∈ [−20, 20]`.
    pub fn default_for(method: Method) -> Self {
        let max = if method.is_wall() { 0.0 } else { 30.0 };
        Self {
            position: Grid {
                min: -30.0,
                max,
                n: Self::DEFAULT_POINTS,
            },
            momentum: Grid {
                min: -20.0,
                max: 20.0,
                n: Self::DEFAULT_POINTS,
            },
        }
    }
}

/// Position field, its momentum transform and the moments of both at time `t`.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub position: SampledField,
    pub momentum: SampledField,
    pub row: TimeSeriesRow,
}

pub fn snapshot(propagator: &Propagator, t: f64, method: Method, grids: &AnalysisGrids) -> Result<Snapshot> {
    let hbar = propagator.params().hbar;
    let position = propagator.sample(&grids.position, t, method)?;
    let momentum = fourier_to_momentum(&position, &grids.momentum, hbar)?;
    let x = position_moments(&position)?;
    let p = momentum_moments(&momentum)?;
    let row = TimeSeriesRow {
        t,
        norm: x.norm,
        mean_x: x.mean,
        dx: x.spread,
        mean_p: p.mean,
        dp: p.spread,
        product: x.spread * p.spread / hbar,
    };
    Ok(Snapshot { position, momentum, row })
}

/// One row per time, computed in parallel and returned in time order.
pub fn compute_time_series(
    propagator: &Propagator,
    times: &[f64],
    method: Method,
    grids: &AnalysisGrids,
) -> Result<TimeSeries> {
    check_increasing(times.iter().copied())?;
    let rows = times
        .par_iter()
        .map(|&t| snapshot(propagator, t, method, grids).map(|s| s.row))
        .collect::<Result<Vec<_>>>()?;
    Ok(TimeSeries { rows })
}

/// `max |⟨p⟩ − m·d⟨x⟩/dt|` over interior rows, with a centered difference.
pub fn ehrenfest_residual(series: &TimeSeries, mass: f64) -> Result<f64> {
    let rows = &series.rows;
    if rows.len() < 3 {
        return Err(Error::TooFewRows {
            needed: 3,
            found: rows.len(),
        });
    }
    let dt = (rows[rows.len() - 1].t - rows[0].t) / (rows.len() - 1) as f64;
    if rows.windows(2).any(|w| ((w[1].t - w[0].t) - dt).abs() > 1e-9 * dt.abs().max(1.0)) {
        return Err(Error::NonUniformTimes);
    }
    Ok(rows
        .windows(3)
        .map(|w| (w[1].mean_p - mass * (w[2].mean_x - w[0].mean_x) / (w[2].t - w[0].t)).abs())
        .fold(0.0, f64::max))
}

/// `m·|x0|/p0`.
pub fn classical_collision_time(spec: &PacketSpec, params: &PhysicalParams) -> Result<f64> {
    if !(spec.p0 > 0.0) {
        return Err(Error::NoArrival { p0: spec.p0 });
    }
    if spec.x0 >= 0.0 {
        return Err(Error::PacketBehindWall { x0: spec.x0 });
    }
    Ok(params.mass * spec.x0.abs() / spec.p0)
}

/// Time of the smallest `Δx`, earliest on ties; `None` for an empty series.
pub fn empirical_compression_time(series: &TimeSeries) -> Option<f64> {
    let mut best: Option<&TimeSeriesRow> = None;
    for row in &series.rows {
        if best.is_none_or(|b| row.dx < b.dx) {
            best = Some(row);
        }
    }
    best.map(|r| r.t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::GaussianClosedForm;
    use crate::quadrature::QuadratureSettings;
    use proptest::prelude::*;

    fn propagator(spec: PacketSpec, extent: f64) -> Propagator {
        let params = PhysicalParams::default();
        let q = QuadratureSettings::for_packet(&spec, params.hbar, extent);
        Propagator::new(spec, params, q).unwrap()
    }

    fn closed_form_field(spec: &PacketSpec, grid: Grid, t: f64) -> SampledField {
        let cf = GaussianClosedForm::new(spec, PhysicalParams::default()).unwrap();
        let values = grid.points().map(|x| cf.psi(x, t)).collect();
        SampledField::new(grid, values, Space::Position, t).unwrap()
    }

    fn p_grid() -> Grid {
        Grid::new(-20.0, 20.0, 4096).unwrap()
    }

    #[test]
    fn free_gaussian_spectrum_peak() {
        let field = closed_form_field(&PacketSpec::standard(), Grid::new(-30.0, 30.0, 4096).unwrap(), 0.0);
        let phi = fourier_to_momentum(&field, &p_grid(), 1.0).unwrap();
        let (i, peak) = phi
            .values()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .unwrap();
        assert!((p_grid().point(i) - 10.0).abs() <= p_grid().spacing());
        assert!((peak.norm() - PI.powf(-0.25)).abs() < 1e-4);
        assert!((phi.norm() - field.norm()).abs() < 1e-6);
    }

    #[test]
    fn wall_packet_reverses_momentum() {
        let prop = propagator(PacketSpec::standard(), 30.0);
        let grids = AnalysisGrids::default_for(Method::WallMirror);
        let snap = snapshot(&prop, 2.0, Method::WallMirror, &grids).unwrap();
        let (i, _) = snap
            .momentum
            .values()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .unwrap();
        assert!((grids.momentum.point(i) + 10.0).abs() <= grids.momentum.spacing());
        assert!((snap.row.mean_p + 10.0).abs() < 1e-3);
    }

    #[test]
    fn round_trip_is_identity() {
        let spec = PacketSpec::gaussian(1.0, -2.0, 3.0);
        let x = Grid::new(-20.0, 16.0, 1024).unwrap();
        let p = Grid::new(-20.0, 26.0, 1024).unwrap();
        let field = closed_form_field(&spec, x, 0.5);
        let phi = fourier_to_momentum(&field, &p, 1.0).unwrap();
        let back = fourier_to_position(&phi, &x, 1.0).unwrap();
        let phi2 = fourier_to_momentum(&back, &p, 1.0).unwrap();
        let worst = phi.values().iter().zip(phi2.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(worst < 1e-8, "{worst}");
    }

    #[test]
    fn aliasing_guard() {
        let field = closed_form_field(&PacketSpec::standard(), Grid::new(-30.0, 30.0, 256).unwrap(), 0.0);
        assert!(matches!(fourier_to_momentum(&field, &p_grid(), 1.0), Err(Error::Resolution { .. })));
        let phi = fourier_to_momentum(&field, &Grid::new(-1.0, 1.0, 8).unwrap(), 1.0).unwrap();
        assert!(fourier_to_momentum(&phi, &p_grid(), 1.0).is_err());
    }

    #[test]
    fn free_moments() {
        let spec = PacketSpec::standard();
        let x = Grid::new(-30.0, 30.0, 4096).unwrap();
        let m0 = position_moments(&closed_form_field(&spec, x, 0.0)).unwrap();
        assert!((m0.mean + 10.0).abs() < 1e-10);
        assert!((m0.spread - 0.5f64.sqrt()).abs() < 1e-10);
        let f2 = closed_form_field(&spec, x, 2.0);
        assert!((position_moments(&f2).unwrap().mean - 10.0).abs() < 1e-10);
        let p = momentum_moments(&fourier_to_momentum(&f2, &p_grid(), 1.0).unwrap()).unwrap();
        assert!((p.mean - 10.0).abs() < 1e-8);
        assert!((p.spread - 0.5f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn collision_moments() {
        let spec = PacketSpec::standard();
        let prop = propagator(spec.clone(), 30.0);
        let grids = AnalysisGrids::default_for(Method::WallMirror);
        let snap = snapshot(&prop, 1.0, Method::WallMirror, &grids).unwrap();
        let cf = GaussianClosedForm::new(&spec, PhysicalParams::default()).unwrap();
        let (mean, dx) = cf.collision_x_moments().unwrap();
        // the sin² → ½ replacement is good to about 1/(2·p0²β²)
        assert!((snap.row.mean_x / mean - 1.0).abs() < 5e-3, "{} vs {mean}", snap.row.mean_x);
        assert!((snap.row.dx / dx - 1.0).abs() < 5e-3, "{} vs {dx}", snap.row.dx);
        assert!(snap.row.mean_p < 0.0);
        assert!(snap.row.dp > 5.0 / 2f64.sqrt());
        assert!((snap.row.dp - 10.0).abs() < 0.5);
    }

    #[test]
    fn symmetrized_examples() {
        let spec = PacketSpec::standard();
        let free = closed_form_field(&spec, Grid::new(-30.0, 30.0, 4096).unwrap(), 0.0);
        let s = symmetrized_momentum_mean(&free, 1.0).unwrap();
        assert!((s.value - 10.0).abs() < 1e-3);
        let fine = closed_form_field(&PacketSpec::standard(), Grid::new(-30.0, 30.0, 16384).unwrap(), 0.0);
        assert!((symmetrized_momentum_mean(&fine, 1.0).unwrap().value - 10.0).abs() < 1e-5);
        assert!(s.imaginary_residue < 1e-12);

        let prop = propagator(spec, 30.0);
        let wall = prop.sample(&Grid::new(-30.0, 0.0, 4096).unwrap(), 1.0, Method::WallMirror).unwrap();
        let s = symmetrized_momentum_mean(&wall, 1.0).unwrap();
        assert!((s.value / -0.398_942_280_401_432_7 - 1.0).abs() < 0.01);

        let grid = Grid::new(-1.0, 1.0, 11).unwrap();
        let flat = SampledField::new(grid, vec![Complex64::new(0.3, 0.0); 11], Space::Position, 0.0).unwrap();
        assert_eq!(symmetrized_momentum_mean(&flat, 1.0).unwrap().value, 0.0);
    }

    #[test]
    fn symmetrized_rejects_coarse_grid_and_open_ends() {
        let coarse = closed_form_field(&PacketSpec::standard(), Grid::new(-30.0, 30.0, 501).unwrap(), 0.0);
        assert!(matches!(symmetrized_momentum_mean(&coarse, 1.0), Err(Error::Resolution { .. })));
        let cut = closed_form_field(&PacketSpec::standard(), Grid::new(-30.0, -10.0, 2001).unwrap(), 0.0);
        assert!(matches!(symmetrized_momentum_mean(&cut, 1.0), Err(Error::ImaginaryResidue { .. })));
    }

    #[test]
    fn time_series_examples() {
        let prop = propagator(PacketSpec::standard(), 30.0);
        let grids = AnalysisGrids::default_for(Method::WallMirror);
        let times: Vec<f64> = (0..=20).map(|i| i as f64 * 0.1).collect();
        let series = compute_time_series(&prop, &times, Method::WallMirror, &grids).unwrap();
        assert_eq!(series.len(), times.len());
        assert!((series.rows[0].mean_p - 10.0).abs() < 1e-6);
        assert!((series.rows[20].mean_p + 10.0).abs() < 1e-3);
        assert!(series.uncertainty_violations(UNCERTAINTY_SLACK).is_empty());
        assert!((series.rows[0].product - 0.5).abs() < 1e-6);
        assert!((empirical_compression_time(&series).unwrap() - 1.0).abs() < 0.1 + 1e-9);
        let free_dx = GaussianClosedForm::new(prop.spec(), PhysicalParams::default()).unwrap().moments(1.0).dx;
        assert!((series.row_at(1.0).unwrap().dx / free_dx - 0.603).abs() < 0.005);
        assert!(series.norm_drift() < 1e-7);
        assert!(ehrenfest_residual(&series, 1.0).unwrap() < 0.2 * 10.0);

        assert!(matches!(
            compute_time_series(&prop, &[0.0, 0.0], Method::WallMirror, &grids),
            Err(Error::UnorderedTimes)
        ));
    }

    #[test]
    fn ehrenfest_free_packet() {
        let prop = propagator(PacketSpec::standard(), 30.0);
        let grids = AnalysisGrids::default_for(Method::Free);
        let times: Vec<f64> = (0..=10).map(|i| i as f64 * 0.01).collect();
        let series = compute_time_series(&prop, &times, Method::Free, &grids).unwrap();
        assert!(ehrenfest_residual(&series, 1.0).unwrap() < 1e-6);
        assert_eq!(empirical_compression_time(&series), Some(0.0));
    }

    #[test]
    fn ehrenfest_preconditions() {
        let row = |t: f64| TimeSeriesRow {
            t,
            norm: 1.0,
            mean_x: t,
            dx: 1.0,
            mean_p: 1.0,
            dp: 0.5,
            product: 0.5,
        };
        let one = TimeSeries::new(vec![row(0.0)]).unwrap();
        assert!(matches!(ehrenfest_residual(&one, 1.0), Err(Error::TooFewRows { .. })));
        assert_eq!(empirical_compression_time(&one), Some(0.0));
        let uneven = TimeSeries::new(vec![row(0.0), row(0.1), row(0.3)]).unwrap();
        assert!(matches!(ehrenfest_residual(&uneven, 1.0), Err(Error::NonUniformTimes)));
        let even = TimeSeries::new(vec![row(0.0), row(0.1), row(0.2)]).unwrap();
        assert!(ehrenfest_residual(&even, 1.0).unwrap() < 1e-12);
        assert!(TimeSeries::new(vec![row(0.1), row(0.0)]).is_err());
        assert_eq!(empirical_compression_time(&TimeSeries::default()), None);
    }

    #[test]
    fn compression_time_ties_break_early() {
        let rows = [(0.0, 2.0), (0.1, 1.0), (0.2, 1.0), (0.3, 3.0)]
            .iter()
            .map(|&(t, dx)| TimeSeriesRow {
                t,
                norm: 1.0,
                mean_x: 0.0,
                dx,
                mean_p: 0.0,
                dp: 1.0,
                product: dx,
            })
            .collect();
        assert_eq!(empirical_compression_time(&TimeSeries::new(rows).unwrap()), Some(0.1));
    }

    #[test]
    fn collision_time_examples() {
        let params = PhysicalParams::default();
        assert_eq!(classical_collision_time(&PacketSpec::standard(), &params).unwrap(), 1.0);
        assert_eq!(classical_collision_time(&PacketSpec::gaussian(1.0, -20.0, 10.0), &params).unwrap(), 2.0);
        assert!(matches!(
            classical_collision_time(&PacketSpec::gaussian(1.0, -10.0, 0.0), &params),
            Err(Error::NoArrival { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn parseval_and_uncertainty(alpha in 0.5f64..2.0, x0 in -8.0f64..-2.0, p0 in -5.0f64..5.0, t in 0.0f64..2.0) {
            let spec = PacketSpec::gaussian(alpha, x0, p0);
            let x = Grid::new(-40.0, 40.0, 2048).unwrap();
            let p = Grid::new(-20.0, 20.0, 1024).unwrap();
            let field = closed_form_field(&spec, x, t);
            let phi = fourier_to_momentum(&field, &p, 1.0).unwrap();
            prop_assert!((phi.norm() - field.norm()).abs() < 1e-6);
            let product = position_moments(&field).unwrap().spread * momentum_moments(&phi).unwrap().spread;
            prop_assert!(product >= 0.5 - 1e-6);
        }
    }
}
