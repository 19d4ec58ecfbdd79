//! Adaptive ETD2RK integration of the rescaled normalized gradient flow.
//!
//! The right-hand side splits into the diagonal linear part `Lv = σ²Δv`
//! and the remainder `N(v)`, which carries `η(v)` and is re-evaluated at
//! every stage. One step of size `h` is
//!
//! ```text
//! a      = e^{hL} v + h φ₁(hL) N(v)
//! v_next = a + h φ₂(hL) (N(a) − N(v))
//! ```
//!
//! with `a` doubling as the embedded exponential Euler solution, so the
//! local error estimate is `‖h φ₂(hL)(N(a) − N(v))‖`. Accepted states are
//! projected back onto the unit sphere.
//!
//! The driver works on spectra: each state keeps `v̂` and `N̂(v)`, so the
//! residual `‖Lv̂ + N̂(v)‖` and the error norm come from Parseval without
//! extra transforms.

use serde::{Deserialize, Serialize};

use crate::energy::{nonlinear_from_spectrum, Moments, ProblemParams};
use crate::error::{Error, Result};
use crate::gaussian::unit_gaussian;
use crate::grid::{radial_profile, Field3D, GridSpec, SpectralWorkspace, C64};

/// Everything a flow run needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    /// `params.sigma` is the flow's scaling `σ = σ̄ c / c_g`.
    pub params: ProblemParams,
    /// `σ̄` of the seeding rule, kept for provenance of the run.
    pub sigma_bar: f64,
    pub grid: GridSpec,
    pub local_error_tol: f64,
    pub steady_tol: f64,
    pub max_time: f64,
    pub max_steps: usize,
    pub spread_shell_fraction: f64,
    pub spread_mass_threshold: f64,
    pub h0: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub safety: f64,
    /// Largest ratio `h_next / h` after an accepted step.
    pub growth_cap: f64,
    /// Apply the 2/3 rule on every forward transform.
    pub dealias: bool,
    /// Multiple of [`stabilization_for`] moved into the linear part at
    /// each step; 0 gives the plain split `L = σ²Δ`.
    pub stabilization: f64,
}

impl FlowConfig {
    pub fn new(params: ProblemParams, sigma_bar: f64) -> Self {
        Self {
            params,
            sigma_bar,
            grid: GridSpec::default(),
            local_error_tol: 1e-8,
            steady_tol: 1e-7,
            max_time: 1e4,
            max_steps: 200_000,
            spread_shell_fraction: 0.8,
            spread_mass_threshold: 0.05,
            h0: 1e-4,
            h_min: 1e-12,
            h_max: 1.0,
            safety: 0.9,
            growth_cap: 5.0,
            dealias: false,
            stabilization: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        if !(self.h_min > 0.0 && self.h_min <= self.h0 && self.h0 <= self.h_max) {
            return bad("step bounds must satisfy 0 < h_min <= h0 <= h_max");
        }
        if !(self.local_error_tol > 0.0 && self.steady_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.spread_shell_fraction > 0.0 && self.spread_shell_fraction < 1.0) {
            return bad("spread_shell_fraction must lie in (0, 1)");
        }
        if !(self.spread_mass_threshold > 0.0 && self.spread_mass_threshold < 1.0) {
            return bad("spread_mass_threshold must lie in (0, 1)");
        }
        if !(self.safety > 0.0 && self.safety <= 1.0 && self.growth_cap >= 1.0) {
            return bad("safety must lie in (0, 1] and growth_cap be at least 1");
        }
        if !(self.stabilization >= 0.0) {
            return bad("stabilization must be non-negative");
        }
        if !(self.max_time > 0.0) || self.max_steps == 0 {
            return bad("time and step budgets must be positive");
        }
        Ok(())
    }

    pub fn controller(&self) -> StepController {
        StepController {
            h_min: self.h_min,
            h_max: self.h_max,
            safety: self.safety,
            growth_cap: self.growth_cap,
            max_rejections: 25,
            rejections_at_floor: 0,
        }
    }
}

/// Terminal classification of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// Steady state with negative energy and a radially decreasing profile.
    Minimizer,
    /// Steady state with positive energy.
    PositiveSteadyState,
    /// Mass reached the edge of the box before the flow settled.
    Vanishing,
    /// Budget exhausted, step failure, or a steady state that fits neither
    /// class above.
    Inconclusive,
}

/// One accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub t: f64,
    pub energy: f64,
    pub residual: f64,
    /// Step that produced this state.
    pub h: f64,
    /// `∫v² − 1` before renormalization.
    pub mass_drift: f64,
    /// `∫v²` after renormalization.
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowReport {
    pub outcome: Outcome,
    pub final_energy: f64,
    pub final_residual: f64,
    pub steps_taken: usize,
    pub steps_rejected: usize,
    pub time_reached: f64,
    /// Starts with the initial state at `t = 0`.
    pub energy_trace: Vec<TracePoint>,
    pub radial_ok: bool,
    /// `max |u|² = cσ³ max v²` of the final state.
    pub peak_density: f64,
    pub diagnostic: Option<String>,
    #[serde(skip)]
    pub snapshot: Option<Field3D>,
}

impl FlowReport {
    pub fn energy_pairs(&self) -> Vec<(f64, f64)> {
        self.energy_trace.iter().map(|p| (p.t, p.energy)).collect()
    }

    pub fn max_mass_drift(&self) -> f64 {
        self.energy_trace
            .iter()
            .map(|p| p.mass_drift.abs())
            .fold(0.0, f64::max)
    }
}

/// `(e^z, φ₁(z), φ₂(z))`, with Taylor series near zero.
pub fn phi_functions(z: f64) -> (f64, f64, f64) {
    let ez = z.exp();
    if z.abs() < 1e-2 {
        // φ₁ = Σ z^k/(k+1)!, φ₂ = Σ z^k/(k+2)!, six terms each.
        let (mut p1, mut p2) = (0.0, 0.0);
        let mut zk = 1.0;
        let mut f1 = 1.0; // (k+1)!
        let mut f2 = 2.0; // (k+2)!
        for k in 0..6 {
            p1 += zk / f1;
            p2 += zk / f2;
            zk *= z;
            f1 *= (k + 2) as f64;
            f2 *= (k + 3) as f64;
        }
        (ez, p1, p2)
    } else {
        (ez, (ez - 1.0) / z, (ez - 1.0 - z) / (z * z))
    }
}

/// The linear/nonlinear split of the rescaled right-hand side.
///
/// `L = (σ² + κ)Δ` and `N(v) = rhs(v) − Lv`. With `κ = 0` this is the
/// plain split `L = σ²Δ`. A positive `κ` moves part of the stiff
/// quasi-linear diffusion `2θcσ⁵v²Δv` into the exactly integrated part
/// and subtracts it again in `N`; the sum is unchanged.
#[derive(Debug, Clone)]
pub struct SplitOperator {
    params: ProblemParams,
    kappa: f64,
    laplacian: Vec<f64>,
}

/// The plain split `L = σ²Δ`, i.e. the multiplier `−σ²|k|²`.
pub fn split_operator(params: &ProblemParams, ws: &SpectralWorkspace) -> SplitOperator {
    SplitOperator {
        params: *params,
        kappa: 0.0,
        laplacian: ws.laplacian_multiplier().to_vec(),
    }
}

/// `θcσ⁵ max v²`, half the largest quasi-linear diffusion coefficient.
/// With this `κ` the explicitly treated diffusion stays within `±κ`.
pub fn stabilization_for(params: &ProblemParams, v: &[f64]) -> f64 {
    let peak = v.iter().fold(0.0_f64, |m, x| m.max(x * x));
    params.quasilinear_coefficient() * peak
}

impl SplitOperator {
    pub fn with_stabilization(self, kappa: f64) -> Self {
        Self { kappa, ..self }
    }

    pub fn params(&self) -> &ProblemParams {
        &self.params
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `−(σ² + κ)|k|²` per stored mode.
    pub fn linear_multiplier(&self) -> Vec<f64> {
        let d = self.params.sigma * self.params.sigma + self.kappa;
        self.laplacian.iter().map(|k| d * k).collect()
    }

    pub fn nonlinear(&self, v: &Field3D, ws: &mut SpectralWorkspace) -> Result<Field3D> {
        let mut out = crate::energy::nonlinear_part(v, &self.params, ws)?;
        if self.kappa != 0.0 {
            let lap = ws.laplacian(v)?;
            for (o, l) in out.values_mut().iter_mut().zip(lap.values()) {
                *o -= self.kappa * l;
            }
        }
        Ok(out)
    }
}

/// Output of [`etd2rk_step`].
#[derive(Debug, Clone)]
pub struct StepResult {
    pub v_next: Field3D,
    pub v_embedded: Field3D,
    pub err_est: f64,
}

/// One ETD2RK step from `v` with the embedded exponential Euler estimate.
pub fn etd2rk_step(v: &Field3D, h: f64, ops: &SplitOperator, ws: &mut SpectralWorkspace) -> Result<StepResult> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("step size must be positive, got {h}")));
    }
    let state = State::new(v.values().to_vec(), &ops.params, ws)?;
    let weights = StepWeights::new(h, ops.kappa, &ops.params, &ops.laplacian, ws);
    let trial = attempt(&state, &weights, &ops.laplacian, &ops.params, ws)?;
    let grid = *v.grid();
    Ok(StepResult {
        v_next: Field3D::from_raw(grid, trial.next.values),
        v_embedded: Field3D::from_raw(grid, trial.embedded),
        err_est: trial.err,
    })
}

/// Standard step-size controller for an order 2(1) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepController {
    pub h_min: f64,
    pub h_max: f64,
    pub safety: f64,
    pub growth_cap: f64,
    pub max_rejections: usize,
    rejections_at_floor: usize,
}

impl StepController {
    pub fn new(h_min: f64, h_max: f64, safety: f64) -> Self {
        Self {
            h_min,
            h_max,
            safety,
            growth_cap: 5.0,
            max_rejections: 25,
            rejections_at_floor: 0,
        }
    }

    /// Accepts iff `err_est <= tol`; proposes
    /// `clamp(safety h sqrt(tol/err), h_min, min(h_max, growth_cap h))`.
    pub fn adapt_step(&mut self, h: f64, err_est: f64, tol: f64) -> Result<(bool, f64)> {
        let accept = err_est <= tol;
        let factor = if err_est > 0.0 {
            self.safety * (tol / err_est).sqrt()
        } else {
            f64::INFINITY
        };
        let h_next = (h * factor.min(self.growth_cap)).clamp(self.h_min, self.h_max);
        if accept {
            self.rejections_at_floor = 0;
        } else if h_next <= self.h_min {
            self.rejections_at_floor += 1;
            if self.rejections_at_floor >= self.max_rejections {
                return Err(Error::StepUnderflow {
                    h: h_next,
                    rejections: self.rejections_at_floor,
                });
            }
        }
        Ok((accept, h_next))
    }
}

/// `v / ‖v‖`.
pub fn renormalize(v: &Field3D) -> Result<Field3D> {
    let norm = v.l2_norm();
    if norm == 0.0 {
        return Err(Error::ZeroMass);
    }
    Ok(v.map(|x| x / norm))
}

/// Whether more than `spread_mass_threshold` of the mass sits where
/// `‖x‖_∞ > spread_shell_fraction · L`.
pub fn detect_spread(v: &Field3D, cfg: &FlowConfig) -> bool {
    let shell = ShellMask::new(v.grid(), cfg.spread_shell_fraction);
    shell.fraction(v.values()) > cfg.spread_mass_threshold
}

/// Radial check of a steady state: over bins with `r <= 0.8 L`, bin means
/// of `|v|` never increase by more than 1% of the peak and no node deviates
/// from its shell mean by more than 1% of the peak.
pub fn radially_decreasing(v: &Field3D) -> bool {
    let grid = v.grid();
    let bins = (0.8 * grid.half_width() / grid.spacing()).floor() as usize + 1;
    let abs = v.map(f64::abs);
    let Ok(profile) = radial_profile(&abs, bins.max(4)) else {
        return false;
    };
    let peak = abs.max_abs();
    if peak == 0.0 {
        return false;
    }
    let slack = 0.01 * peak;
    let limit = 0.8 * grid.half_width();
    let inside: Vec<_> = profile.iter().filter(|b| b.radius <= limit).collect();
    inside.windows(2).all(|w| w[1].mean <= w[0].mean + slack)
        && inside.iter().all(|b| b.max_deviation <= slack)
}

struct ShellMask {
    outside: Vec<bool>,
}

impl ShellMask {
    fn new(grid: &GridSpec, fraction: f64) -> Self {
        let n = grid.points();
        let edge = fraction * grid.half_width();
        let far: Vec<bool> = (0..n).map(|i| grid.coordinate(i).abs() > edge).collect();
        let mut outside = Vec::with_capacity(grid.len());
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    outside.push(far[i] || far[j] || far[k]);
                }
            }
        }
        Self { outside }
    }

    fn fraction(&self, values: &[f64]) -> f64 {
        let (mut shell, mut total) = (0.0, 0.0);
        for (&v, &o) in values.iter().zip(&self.outside) {
            let m = v * v;
            total += m;
            if o {
                shell += m;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            shell / total
        }
    }
}

/// A state with its spectrum, the spectrum of everything in the
/// right-hand side except `σ²Δv`, and its moments.
struct State {
    values: Vec<f64>,
    spectrum: Vec<C64>,
    remainder: Vec<C64>,
    moments: Moments,
}

impl State {
    fn new(values: Vec<f64>, params: &ProblemParams, ws: &mut SpectralWorkspace) -> Result<Self> {
        let mut spectrum = vec![C64::new(0.0, 0.0); ws.grid().spectral_len()];
        ws.forward_raw(&values, &mut spectrum);
        Self::from_parts(values, spectrum, params, ws)
    }

    fn from_parts(
        values: Vec<f64>,
        spectrum: Vec<C64>,
        params: &ProblemParams,
        ws: &mut SpectralWorkspace,
    ) -> Result<Self> {
        let mut q = vec![0.0; values.len()];
        let moments = nonlinear_from_spectrum(&values, &spectrum, params, ws, &mut q)?;
        let mut remainder = vec![C64::new(0.0, 0.0); spectrum.len()];
        ws.forward_raw(&q, &mut remainder);
        Ok(Self {
            values,
            spectrum,
            remainder,
            moments,
        })
    }

    /// `‖σ²Δv + remainder‖`, the flow's right-hand side norm.
    fn residual(&self, params: &ProblemParams, laplacian: &[f64], ws: &SpectralWorkspace) -> f64 {
        let s2 = params.sigma * params.sigma;
        let rhs: Vec<C64> = self
            .spectrum
            .iter()
            .zip(&self.remainder)
            .zip(laplacian)
            .map(|((v, q), k)| v * (s2 * k) + q)
            .collect();
        ws.norm_sqr_raw(&rhs).sqrt()
    }

    /// `N̂ = remainder − κΔv̂`.
    fn split_nonlinear(&self, kappa: f64, laplacian: &[f64]) -> Vec<C64> {
        self.remainder
            .iter()
            .zip(&self.spectrum)
            .zip(laplacian)
            .map(|((q, v), k)| q - v * (kappa * k))
            .collect()
    }

    fn scale(&mut self, factor: f64) {
        self.values.iter_mut().for_each(|v| *v *= factor);
        self.spectrum.iter_mut().for_each(|c| *c *= factor);
    }
}

/// `e^{hL}`, `hφ₁(hL)`, `hφ₂(hL)` per stored mode for `L = (σ² + κ)Δ`.
struct StepWeights {
    h: f64,
    kappa: f64,
    exp: Vec<f64>,
    phi1: Vec<f64>,
    phi2: Vec<f64>,
}

impl StepWeights {
    fn new(h: f64, kappa: f64, params: &ProblemParams, laplacian: &[f64], ws: &SpectralWorkspace) -> Self {
        let d = params.sigma * params.sigma + kappa;
        // The multiplier depends on the mode only through m², so evaluate
        // the φ functions once per distinct m².
        let shells = ws.squared_mode_numbers();
        let max_shell = shells.iter().copied().max().unwrap_or(0) as usize;
        let mut table: Vec<Option<(f64, f64, f64)>> = vec![None; max_shell + 1];
        let len = laplacian.len();
        let (mut exp, mut phi1, mut phi2) = (Vec::with_capacity(len), Vec::with_capacity(len), Vec::with_capacity(len));
        for (&k, &s) in laplacian.iter().zip(shells) {
            let (e, p1, p2) = *table[s as usize].get_or_insert_with(|| {
                let (e, p1, p2) = phi_functions(h * d * k);
                (e, h * p1, h * p2)
            });
            exp.push(e);
            phi1.push(p1);
            phi2.push(p2);
        }
        Self {
            h,
            kappa,
            exp,
            phi1,
            phi2,
        }
    }
}

struct Attempt {
    next: State,
    embedded: Vec<f64>,
    err: f64,
}

fn attempt(
    state: &State,
    w: &StepWeights,
    laplacian: &[f64],
    params: &ProblemParams,
    ws: &mut SpectralWorkspace,
) -> Result<Attempt> {
    let len = state.spectrum.len();
    let n_v = state.split_nonlinear(w.kappa, laplacian);
    let a_hat: Vec<C64> = (0..len)
        .map(|i| state.spectrum[i] * w.exp[i] + n_v[i] * w.phi1[i])
        .collect();
    let mut a = vec![0.0; ws.grid().len()];
    ws.inverse_raw(&a_hat, &mut a);
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite { h: w.h });
    }
    let stage = State::from_parts(a, a_hat, params, ws)?;
    let n_a = stage.split_nonlinear(w.kappa, laplacian);
    let correction: Vec<C64> = (0..len).map(|i| (n_a[i] - n_v[i]) * w.phi2[i]).collect();
    let err = ws.norm_sqr_raw(&correction).sqrt();
    let next_hat: Vec<C64> = stage.spectrum.iter().zip(&correction).map(|(a, d)| a + d).collect();
    let mut next = vec![0.0; ws.grid().len()];
    ws.inverse_raw(&next_hat, &mut next);
    if !err.is_finite() || next.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite { h: w.h });
    }
    Ok(Attempt {
        next: State {
            values: next,
            spectrum: next_hat,
            remainder: Vec::new(),
            moments: Moments::default(),
        },
        embedded: stage.values,
        err,
    })
}

/// `|u(x, 0, 0)|²` along the physical x-axis, from the rescaled state:
/// `x = ξ/σ`, `|u|² = cσ³ v(ξ, 0, 0)²`.
pub fn axis_section(v: &Field3D, params: &ProblemParams) -> Vec<(f64, f64)> {
    let grid = v.grid();
    let mid = grid.points() / 2;
    let amp = params.c * params.sigma.powi(3);
    (0..grid.points())
        .map(|i| (grid.coordinate(i) / params.sigma, amp * v.at(i, mid, mid).powi(2)))
        .collect()
}

/// The seeded initial state `π^(−3/4) e^(−r²/2)` on the config grid.
pub fn initial_state(cfg: &FlowConfig) -> Field3D {
    unit_gaussian(cfg.grid)
}

/// Integrates from [`initial_state`].
pub fn run_flow(cfg: &FlowConfig) -> Result<FlowReport> {
    run_flow_from(cfg, &initial_state(cfg))
}

/// Integrates from `v0` until the residual drops below `steady_tol`, the
/// spread criterion fires, or the budget runs out.
///
/// Configuration errors are returned as `Err`; failures during
/// integration end the run as [`Outcome::Inconclusive`] with a diagnostic.
pub fn run_flow_from(cfg: &FlowConfig, v0: &Field3D) -> Result<FlowReport> {
    cfg.validate()?;
    if *v0.grid() != cfg.grid {
        return Err(Error::GridMismatch {
            expected: cfg.grid,
            found: *v0.grid(),
        });
    }
    let params = cfg.params;
    let mut ws = SpectralWorkspace::with_dealiasing(cfg.grid, cfg.dealias);
    let laplacian = ws.laplacian_multiplier().to_vec();
    let shell = ShellMask::new(&cfg.grid, cfg.spread_shell_fraction);
    let mut controller = cfg.controller();

    let v0 = renormalize(v0)?;
    let mut state = State::new(v0.into_values(), &params, &mut ws)?;
    let mut energy = state.moments.energy_scaled(&params).total;
    let mut residual = state.residual(&params, &laplacian, &ws);
    let mut trace = vec![TracePoint {
        t: 0.0,
        energy,
        residual,
        h: 0.0,
        mass_drift: 0.0,
        mass: state.moments.mass,
    }];

    let mut t = 0.0;
    let mut h = cfg.h0;
    let mut steps = 0;
    let mut rejected = 0;
    let mut cached: Option<StepWeights> = None;
    let mut failure: Option<String> = None;
    let mut spread = shell.fraction(&state.values) > cfg.spread_mass_threshold;

    while !spread && residual >= cfg.steady_tol {
        if steps >= cfg.max_steps || t >= cfg.max_time {
            failure = Some(format!(
                "budget exhausted after {steps} steps at t = {t:.6e} with residual {residual:.3e}"
            ));
            break;
        }
        let h_try = h.min(cfg.max_time - t).max(cfg.h_min);
        let kappa = cfg.stabilization * stabilization_for(&params, &state.values);
        if cached.as_ref().map_or(true, |w| w.h != h_try || w.kappa != kappa) {
            cached = Some(StepWeights::new(h_try, kappa, &params, &laplacian, &ws));
        }
        let weights = cached.as_ref().expect("weights cached above");
        let outcome = attempt(&state, weights, &laplacian, &params, &mut ws);
        let (trial, err) = match outcome {
            Ok(a) => {
                let err = a.err;
                (Some(a), err)
            }
            Err(Error::NonFinite { .. }) => (None, f64::INFINITY),
            Err(e) => return Err(e),
        };
        let (accept, h_next) = match controller.adapt_step(h_try, err, cfg.local_error_tol) {
            Ok(r) => r,
            Err(e) => {
                failure = Some(e.to_string());
                break;
            }
        };
        if !accept {
            rejected += 1;
            h = h_next;
            continue;
        }
        let trial = trial.expect("accepted steps have a finite trial");
        let mut next = trial.next;
        let mass: f64 = crate::grid::integrate_values(
            &next.values.iter().map(|x| x * x).collect::<Vec<_>>(),
            &cfg.grid,
        );
        if !(mass > 0.0) {
            failure = Some("state lost all mass".into());
            break;
        }
        next.scale(1.0 / mass.sqrt());
        state = match State::from_parts(next.values, next.spectrum, &params, &mut ws) {
            Ok(s) => s,
            Err(e) => {
                failure = Some(e.to_string());
                break;
            }
        };
        t += h_try;
        steps += 1;
        h = h_next;
        energy = state.moments.energy_scaled(&params).total;
        residual = state.residual(&params, &laplacian, &ws);
        trace.push(TracePoint {
            t,
            energy,
            residual,
            h: h_try,
            mass_drift: mass - 1.0,
            mass: state.moments.mass,
        });
        if steps % 500 == 0 {
            log::debug!("step {steps}: t = {t:.4e}, E = {energy:.6e}, residual = {residual:.3e}, h = {h_try:.3e}");
        }
        spread = shell.fraction(&state.values) > cfg.spread_mass_threshold;
    }

    let v = Field3D::from_raw(cfg.grid, state.values);
    let radial_ok = radially_decreasing(&v);
    let converged = failure.is_none() && !spread && residual < cfg.steady_tol;
    let (outcome, diagnostic) = if spread {
        (Outcome::Vanishing, None)
    } else if let Some(msg) = failure {
        (Outcome::Inconclusive, Some(msg))
    } else if converged && energy < 0.0 && radial_ok {
        (Outcome::Minimizer, None)
    } else if converged && energy > 0.0 {
        (Outcome::PositiveSteadyState, None)
    } else {
        (
            Outcome::Inconclusive,
            Some(format!("steady state with energy {energy:.6e}, radial check {radial_ok}")),
        )
    };
    let peak_density = params.c * params.sigma.powi(3) * v.max_abs().powi(2);
    let keep = matches!(outcome, Outcome::Minimizer | Outcome::PositiveSteadyState);
    log::info!(
        "flow p = {}, c = {}, theta = {}: {:?} after {steps} steps (t = {t:.4e}), E = {energy:.6e}",
        params.p,
        params.c,
        params.theta,
        outcome
    );
    Ok(FlowReport {
        outcome,
        final_energy: energy,
        final_residual: residual,
        steps_taken: steps,
        steps_rejected: rejected,
        time_reached: t,
        energy_trace: trace,
        radial_ok,
        peak_density,
        diagnostic,
        snapshot: keep.then_some(v),
    })
}
