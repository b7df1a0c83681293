//! Closed-form reference results for Gaussian packets, the collision-time
//! approximations, and the initial Lorentzian wavefunction.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{DerivedScales, PacketShape, PacketSpec, PhysicalParams};

/// Exact free evolution of the Gaussian packet, built on `F = 1 + i·t/t0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianClosedForm {
    alpha: f64,
    x0: f64,
    p0: f64,
    params: PhysicalParams,
    // Multiplies β_{T_C} inside the collision-time approximations only.
    collision_beta_scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianMoments {
    pub mean_x: f64,
    pub dx: f64,
    pub mean_p: f64,
    pub dp: f64,
}

impl GaussianMoments {
    pub fn product(&self) -> f64 {
        self.dx * self.dp
    }
}

impl GaussianClosedForm {
    pub fn new(spec: &PacketSpec, params: PhysicalParams) -> Result<Self> {
        let PacketShape::Gaussian { alpha } = spec.shape else {
            return Err(Error::NotGaussian {
                what: "the closed-form Gaussian oracle",
            });
        };
        params.check()?;
        Ok(Self {
            alpha,
            x0: spec.x0,
            p0: spec.p0,
            params,
            collision_beta_scale: 1.0,
        })
    }

    /// Scales the width `β_{T_C}` used by the collision-time formulas; a test
    /// hook for checking that comparisons against them are sensitive.
    pub fn with_collision_beta_scale(mut self, scale: f64) -> Self {
        self.collision_beta_scale = scale;
        self
    }

    pub fn scales(&self) -> DerivedScales {
        let PhysicalParams { hbar, mass } = self.params;
        DerivedScales {
            t0: mass * hbar * self.alpha * self.alpha,
            width0: self.alpha * hbar,
            collision_time: (self.p0 > 0.0 && self.x0 < 0.0).then(|| mass * self.x0.abs() / self.p0),
        }
    }

    /// `F = 1 + i·t/t0`.
    pub fn spreading_factor(&self, t: f64) -> Complex64 {
        Complex64::new(1.0, t / self.scales().t0)
    }

    pub fn psi(&self, x: f64, t: f64) -> Complex64 {
        let PhysicalParams { hbar, mass } = self.params;
        let f = self.spreading_factor(t);
        let prefactor = (f * (self.alpha * hbar * PI.sqrt())).sqrt().inv();
        let phase = (self.p0 * (x - self.x0) - self.p0 * self.p0 * t / (2.0 * mass)) / hbar;
        let shift = x - self.x0 - self.p0 * t / mass;
        let width2 = 2.0 * self.alpha * self.alpha * hbar * hbar;
        prefactor * Complex64::from_polar(1.0, phase) * (-(shift * shift) / (f * width2)).exp()
    }

    pub fn density(&self, x: f64, t: f64) -> f64 {
        let beta = self.scales().beta(t);
        let shift = x - self.x0 - self.p0 * t / self.params.mass;
        (-(shift * shift) / (beta * beta)).exp() / (beta * PI.sqrt())
    }

    pub fn moments(&self, t: f64) -> GaussianMoments {
        GaussianMoments {
            mean_x: self.x0 + self.p0 * t / self.params.mass,
            dx: self.scales().beta(t) / 2f64.sqrt(),
            mean_p: self.p0,
            dp: 1.0 / (2f64.sqrt() * self.alpha),
        }
    }

    pub fn collision_time(&self) -> Result<f64> {
        self.scales().collision_time.ok_or(Error::NoArrival { p0: self.p0 })
    }

    /// `β` at the collision time, including the test-hook scale.
    pub fn collision_beta(&self) -> Result<f64> {
        Ok(self.scales().beta(self.collision_time()?) * self.collision_beta_scale)
    }

    /// `(4/(β√π))·sin²(p0·x/ħ)·exp(−x²/β²)` at `t = T_C`; zero for `x > 0`.
    pub fn collision_density(&self, x: f64) -> Result<f64> {
        let beta = self.collision_beta()?;
        if x > 0.0 {
            return Ok(0.0);
        }
        let s = (self.p0 * x / self.params.hbar).sin();
        Ok(4.0 / (beta * PI.sqrt()) * s * s * (-(x * x) / (beta * beta)).exp())
    }

    /// `(⟨x⟩, Δx)` at `T_C` with `sin²` replaced by its mean:
    /// `⟨x⟩ = −β/√π`, `Δx = β·sqrt(1/2 − 1/π)`.
    pub fn collision_x_moments(&self) -> Result<(f64, f64)> {
        let beta = self.collision_beta()?;
        Ok((-beta / PI.sqrt(), beta * (0.5 - 1.0 / PI).sqrt()))
    }

    /// Wall spread at `T_C` over the free spread at `T_C`; `sqrt((π−2)/π)` unperturbed.
    pub fn compression_ratio(&self) -> Result<f64> {
        let (_, dx_wall) = self.collision_x_moments()?;
        Ok(dx_wall / self.moments(self.collision_time()?).dx)
    }

    /// `⟨p⟩` at `T_C`: `−ħ·τ/(√π·β)` with `τ = T_C/t0`, which is
    /// `−(1/(α√π))·τ/sqrt(1+τ²)` unperturbed.
    pub fn collision_p_mean(&self) -> Result<f64> {
        let tau = self.collision_time()? / self.scales().t0;
        Ok(-self.params.hbar * tau / (PI.sqrt() * self.collision_beta()?))
    }
}

/// `ψ(x,0) = (α̃ħ)^(-1/2)·exp(−|x−x0|/(α̃ħ))·exp(i·p0·(x−x0)/ħ)`, unit normalized.
pub fn lorentzian_psi0(spec: &PacketSpec, params: &PhysicalParams, x: f64) -> Result<Complex64> {
    let PacketShape::Lorentzian { alpha } = spec.shape else {
        return Err(Error::NotLorentzian {
            what: "the initial Lorentzian wavefunction",
        });
    };
    let length = alpha * params.hbar;
    let y = x - spec.x0;
    Ok(Complex64::from_polar(
        (-y.abs() / length).exp() / length.sqrt(),
        spec.p0 * y / params.hbar,
    ))
}
