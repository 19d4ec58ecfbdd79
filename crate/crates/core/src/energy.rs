//! Discrete energy, Lagrange multipliers and flow right-hand side.
//!
//! Two sets of variables appear. The physical state `u` carries mass `c`.
//! The rescaled state `v` has unit mass and lives on coordinates stretched
//! by `σ`:
//!
//! ```text
//! u(x) = sqrt(c σ³) v(σ x)
//! ```
//!
//! In rescaled variables the flow reads
//!
//! ```text
//! ∂t v = σ²Δv + θcσ⁵ vΔ(v²) + (cσ³)^((p−1)/2) |v|^(p−1) v + η(v) v
//! η(v) = [σ²∫|∇v|² + 4θcσ⁵∫v²|∇v|² − (cσ³)^((p−1)/2) ∫|v|^(p+1)] / ∫v²
//! ```
//!
//! and `E(u)` equals
//! `c [σ²/2 ∫|∇v|² + θcσ⁵ ∫v²|∇v|² − (cσ³)^((p−1)/2)/(p+1) ∫|v|^(p+1)]`.
//!
//! Derivatives are spectral, integrals are the grid Riemann sum. The
//! gradient integrals are evaluated on the spectral side as
//! `∫|∇v|² = Σ|k|²|v̂|²` and `∫v²|∇v|² = ¼ Σ|k|²|(v²)^|²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{dot_values, Field3D, SpectralWorkspace, C64};

/// Exponent, mass, quasi-linear switch and spatial scaling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub p: f64,
    pub c: f64,
    /// 1 for the quasi-linear functional, 0 for the semilinear one.
    pub theta: f64,
    pub sigma: f64,
}

impl ProblemParams {
    pub fn new(p: f64, c: f64, theta: f64, sigma: f64) -> Result<Self> {
        let params = Self { p, c, theta, sigma };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 1.0 && self.p < 11.0) {
            return Err(Error::InvalidParameter(format!(
                "p must lie in (1, 11), got {}",
                self.p
            )));
        }
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mass c must be positive, got {}",
                self.c
            )));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        if self.theta != 0.0 && self.theta != 1.0 {
            return Err(Error::InvalidParameter(format!(
                "theta must be 0 or 1, got {}",
                self.theta
            )));
        }
        Ok(())
    }

    /// `(cσ³)^((p−1)/2)`, the weight of the power nonlinearity after scaling.
    pub fn source_coefficient(&self) -> f64 {
        (self.c * self.sigma.powi(3)).powf((self.p - 1.0) / 2.0)
    }

    /// `θcσ⁵`, the weight of `vΔ(v²)` after scaling.
    pub fn quasilinear_coefficient(&self) -> f64 {
        self.theta * self.c * self.sigma.powi(5)
    }

    pub fn with_sigma(self, sigma: f64) -> Self {
        Self { sigma, ..self }
    }
}

/// Kinetic and potential parts of the energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub kinetic: f64,
    pub potential: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    fn new(kinetic: f64, potential: f64) -> Self {
        Self {
            kinetic,
            potential,
            total: kinetic + potential,
        }
    }
}

/// The four integrals everything here is built from.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Moments {
    /// `∫ v²`
    pub mass: f64,
    /// `∫ |∇v|²`
    pub gradient: f64,
    /// `∫ v² |∇v|²`
    pub weighted_gradient: f64,
    /// `∫ |v|^(p+1)`
    pub power: f64,
}

/// `sign(v) |v|^p`, i.e. `|v|^(p−1) v`.
#[inline]
pub fn signed_power(v: f64, p: f64) -> f64 {
    if p == 3.0 {
        v * v * v
    } else if p == 2.0 {
        v * v.abs()
    } else {
        v.signum() * v.abs().powf(p)
    }
}

#[inline]
pub(crate) fn abs_power(v: f64, q: f64) -> f64 {
    if q == 4.0 {
        let s = v * v;
        s * s
    } else if q == 3.0 {
        (v * v * v).abs()
    } else {
        v.abs().powf(q)
    }
}

/// Computes the moments of `v`.
pub fn moments(v: &Field3D, p: f64, ws: &mut SpectralWorkspace) -> Result<Moments> {
    let spectrum = ws.forward(v)?;
    let sq_hat = square_spectrum(v.values(), ws);
    Ok(moments_from_spectra(v.values(), spectrum.coeffs(), &sq_hat, p, ws))
}

/// Spectrum of `v²`.
pub(crate) fn square_spectrum(values: &[f64], ws: &mut SpectralWorkspace) -> Vec<C64> {
    let squared: Vec<f64> = values.iter().map(|v| v * v).collect();
    let mut sq_hat = vec![C64::new(0.0, 0.0); ws.grid().spectral_len()];
    ws.forward_raw(&squared, &mut sq_hat);
    sq_hat
}

/// Gradient terms are Dirichlet forms of the discrete Laplacian:
/// `∫|∇v|² = −∫vΔv` and `∫v²|∇v|² = ¼∫|∇(v²)|² = −¼∫v²Δ(v²)`. With these
/// `η` makes `∫v·rhs` vanish to roundoff and the discrete energy is an
/// exact potential for the discrete right-hand side.
pub(crate) fn moments_from_spectra(
    values: &[f64],
    coeffs: &[C64],
    sq_hat: &[C64],
    p: f64,
    ws: &SpectralWorkspace,
) -> Moments {
    let dv = ws.grid().cell_volume();
    let mut m = Moments {
        gradient: ws.dirichlet_raw(coeffs),
        weighted_gradient: 0.25 * ws.dirichlet_raw(sq_hat),
        ..Moments::default()
    };
    for &v in values {
        m.mass += v * v;
        m.power += abs_power(v, p + 1.0);
    }
    m.mass *= dv;
    m.power *= dv;
    m
}

impl Moments {
    /// Energy of a physical state.
    pub fn energy_u(&self, params: &ProblemParams) -> EnergyBreakdown {
        let kinetic = 0.5 * self.gradient + params.theta * self.weighted_gradient;
        let potential = -self.power / (params.p + 1.0);
        EnergyBreakdown::new(kinetic, potential)
    }

    /// Energy of the physical state represented by the rescaled state.
    pub fn energy_scaled(&self, params: &ProblemParams) -> EnergyBreakdown {
        let c = params.c;
        let s2 = params.sigma * params.sigma;
        let kinetic = c * (0.5 * s2 * self.gradient + params.quasilinear_coefficient() * self.weighted_gradient);
        let potential = -c * params.source_coefficient() / (params.p + 1.0) * self.power;
        EnergyBreakdown::new(kinetic, potential)
    }

    /// `η(v)` for the rescaled flow.
    pub fn eta(&self, params: &ProblemParams) -> Result<f64> {
        if self.mass == 0.0 {
            return Err(Error::ZeroMass);
        }
        let s2 = params.sigma * params.sigma;
        Ok((s2 * self.gradient + 4.0 * params.quasilinear_coefficient() * self.weighted_gradient
            - params.source_coefficient() * self.power)
            / self.mass)
    }

    /// `λ(u)` for the physical flow.
    pub fn lambda(&self, params: &ProblemParams) -> Result<f64> {
        if self.mass == 0.0 {
            return Err(Error::ZeroMass);
        }
        Ok(-(self.gradient + 4.0 * params.theta * self.weighted_gradient - self.power) / self.mass)
    }
}

/// `E(u) = 1/2 ∫(1+2θu²)|∇u|² − 1/(p+1) ∫|u|^(p+1)`. Uses `p` and `θ`
/// only.
pub fn energy_u(u: &Field3D, params: &ProblemParams, ws: &mut SpectralWorkspace) -> Result<EnergyBreakdown> {
    let m = moments(u, params.p, ws)?;
    Ok(m.energy_u(params))
}

/// Energy of `u(x) = sqrt(cσ³) v(σx)` computed from `v`.
pub fn energy_scaled(v: &Field3D, params: &ProblemParams, ws: &mut SpectralWorkspace) -> Result<EnergyBreakdown> {
    let m = moments(v, params.p, ws)?;
    Ok(m.energy_scaled(params))
}

/// `λ(u) = −[∫(1+4θu²)|∇u|² − ∫|u|^(p+1)] / ∫u²`.
pub fn lambda_u(u: &Field3D, params: &ProblemParams, ws: &mut SpectralWorkspace) -> Result<f64> {
    let m = moments(u, params.p, ws)?;
    m.lambda(params)
}

/// `η(v)`, see the module docs.
pub fn eta(v: &Field3D, params: &ProblemParams, ws: &mut SpectralWorkspace) -> Result<f64> {
    let m = moments(v, params.p, ws)?;
    m.eta(params)
}

/// Full right-hand side of the rescaled flow.
pub fn flow_rhs_scaled(v: &Field3D, params: &ProblemParams, ws: &mut SpectralWorkspace) -> Result<Field3D> {
    let mut out = nonlinear_part(v, params, ws)?;
    let lap = ws.laplacian(v)?;
    let s2 = params.sigma * params.sigma;
    for (o, l) in out.values_mut().iter_mut().zip(lap.values()) {
        *o += s2 * l;
    }
    Ok(out)
}

/// Everything in the rescaled right-hand side except `σ²Δv`:
/// `θcσ⁵ vΔ(v²) + (cσ³)^((p−1)/2)|v|^(p−1)v + η(v)v`.
pub fn nonlinear_part(v: &Field3D, params: &ProblemParams, ws: &mut SpectralWorkspace) -> Result<Field3D> {
    let spectrum = ws.forward(v)?;
    let mut out = vec![0.0; v.grid().len()];
    nonlinear_from_spectrum(v.values(), spectrum.coeffs(), params, ws, &mut out)?;
    Ok(Field3D::from_raw(*v.grid(), out))
}

/// Evaluates the nonlinear part into `out` given node values and their
/// spectrum; returns the moments of `v` (needed for the energy).
pub(crate) fn nonlinear_from_spectrum(
    values: &[f64],
    coeffs: &[C64],
    params: &ProblemParams,
    ws: &mut SpectralWorkspace,
    out: &mut [f64],
) -> Result<Moments> {
    let mut sq_hat = square_spectrum(values, ws);
    let m = moments_from_spectra(values, coeffs, &sq_hat, params.p, ws);
    let eta = m.eta(params)?;
    let source = params.source_coefficient();
    let quasi = params.quasilinear_coefficient();
    if quasi != 0.0 {
        for (c, k) in sq_hat.iter_mut().zip(ws.laplacian_multiplier()) {
            *c *= *k;
        }
        ws.inverse_raw(&sq_hat, out);
        for (o, &v) in out.iter_mut().zip(values) {
            *o = quasi * v * *o + source * signed_power(v, params.p) + eta * v;
        }
    } else {
        for (o, &v) in out.iter_mut().zip(values) {
            *o = source * signed_power(v, params.p) + eta * v;
        }
    }
    Ok(m)
}

/// `‖rhs(v)‖_L²` with every `σ` of the right-hand side (including the one
/// inside `η`) replaced by `sigma_bar`.
pub fn stationary_residual(
    v: &Field3D,
    params: &ProblemParams,
    sigma_bar: f64,
    ws: &mut SpectralWorkspace,
) -> Result<f64> {
    let at_bar = params.with_sigma(sigma_bar);
    let rhs = flow_rhs_scaled(v, &at_bar, ws)?;
    Ok(rhs.l2_norm())
}

/// `∫ a b` with the grid quadrature.
pub fn inner(a: &Field3D, b: &Field3D) -> f64 {
    dot_values(a.values(), b.values()) * a.grid().cell_volume()
}
