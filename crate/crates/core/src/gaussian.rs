//! Gaussian trial states, the Gaussian mass threshold and analytic bounds on
//! the constrained infimum `M(c)`.
//!
//! The family `g_{c,σ}(r) = sqrt(cσ³) π^(−3/4) exp(−σ²r²/2)` has mass `c`
//! for every `σ`, and its energy has the closed form
//!
//! ```text
//! E(σ) = σ² 3c/4 + θ σ⁵ 3c²/(8√2 π^(3/2))
//!        − σ^(3(p−1)/2) 2√2 c^((p+1)/2) π^(3/2 − 3(p+1)/4) / (p+1)^(5/2)
//! ```
//!
//! Minimizing over `σ` gives an upper bound on `M(c)`; the smallest `c` at
//! which that minimum turns negative is the Gaussian threshold `c_g`, an
//! upper bound for the bifurcation mass.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field3D, GridSpec};

/// One member of the Gaussian family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianSeed {
    pub c: f64,
    pub sigma: f64,
    pub p: f64,
    pub theta: f64,
}

impl GaussianSeed {
    pub fn new(c: f64, sigma: f64, p: f64, theta: f64) -> Self {
        Self { c, sigma, p, theta }
    }

    /// `g_{c,σ}(r)`.
    pub fn profile(&self, r: f64) -> f64 {
        (self.c * self.sigma.powi(3)).sqrt() * PI.powf(-0.75) * (-0.5 * (self.sigma * r).powi(2)).exp()
    }

    /// Samples `g_{c,σ}` centered at the origin.
    pub fn sample(&self, grid: GridSpec) -> Field3D {
        Field3D::from_fn(grid, |x, y, z| self.profile((x * x + y * y + z * z).sqrt()))
    }

    pub fn energy(&self) -> f64 {
        gaussian_energy(self)
    }
}

/// The unit-mass Gaussian `π^(−3/4) exp(−r²/2)`, the rescaled initial state.
pub fn unit_gaussian(grid: GridSpec) -> Field3D {
    GaussianSeed::new(1.0, 1.0, 3.0, 1.0).sample(grid)
}

/// Closed-form energy of `g_{c,σ}`. Zero at `σ = 0`.
pub fn gaussian_energy(seed: &GaussianSeed) -> f64 {
    let GaussianSeed { c, sigma, p, theta } = *seed;
    if sigma == 0.0 {
        return 0.0;
    }
    let kinetic = sigma * sigma * 3.0 * c / 4.0;
    let quartic = theta * sigma.powi(5) * 3.0 * c * c / (8.0 * SQRT_2 * PI.powf(1.5));
    let source = sigma.powf(1.5 * (p - 1.0)) * 2.0 * SQRT_2 * c.powf((p + 1.0) / 2.0)
        * PI.powf(1.5 - 0.75 * (p + 1.0))
        / (p + 1.0).powf(2.5);
    kinetic + quartic - source
}

/// Where the infimum of the Gaussian energy over `σ` sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaMinimumKind {
    /// Attained at some `σ̄ > 0` with negative energy.
    Interior,
    /// Not attained: the infimum is the `σ → 0` limit, zero.
    VanishingLimit,
    /// Energy keeps decreasing at the upper end of the search range.
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaMinimum {
    pub sigma_bar: f64,
    pub e_min: f64,
    pub kind: SigmaMinimumKind,
}

impl SigmaMinimum {
    pub fn is_interior(&self) -> bool {
        self.kind == SigmaMinimumKind::Interior
    }
}

const SIGMA_LO: f64 = 1e-4;
const SIGMA_HI: f64 = 1e2;
const SIGMA_SCAN: usize = 200;

/// Global minimum of the Gaussian energy over `σ ∈ [1e−4, 1e2]`.
///
/// A 200-point log scan locates every sampled local minimum; each is then
/// refined by golden-section search on `log σ`. A narrow negative dip
/// between two samples still shows up as a sampled local minimum, so it is
/// not lost. When the best value is non-negative the infimum is the zero
/// limit at `σ → 0` and `(0, 0)` is returned.
pub fn minimize_sigma(c: f64, p: f64, theta: f64) -> SigmaMinimum {
    let energy = |log_sigma: f64| gaussian_energy(&GaussianSeed::new(c, log_sigma.exp(), p, theta));
    let (lo, hi) = (SIGMA_LO.ln(), SIGMA_HI.ln());
    let step = (hi - lo) / (SIGMA_SCAN - 1) as f64;
    let xs: Vec<f64> = (0..SIGMA_SCAN).map(|i| lo + step * i as f64).collect();
    let es: Vec<f64> = xs.iter().map(|&x| energy(x)).collect();

    let mut best: Option<(f64, f64)> = None;
    for i in 1..SIGMA_SCAN - 1 {
        if es[i] <= es[i - 1] && es[i] <= es[i + 1] {
            let (x, e) = golden_section(energy, xs[i - 1], xs[i + 1], 1e-12);
            if best.map_or(true, |(_, b)| e < b) {
                best = Some((x, e));
            }
        }
    }
    let last = SIGMA_SCAN - 1;
    if es[last] < es[last - 1] && es[last] < best.map_or(f64::INFINITY, |b| b.1) {
        return SigmaMinimum {
            sigma_bar: SIGMA_HI,
            e_min: es[last],
            kind: SigmaMinimumKind::Unbounded,
        };
    }
    match best {
        Some((x, e)) if e < 0.0 => SigmaMinimum {
            sigma_bar: x.exp(),
            e_min: e,
            kind: SigmaMinimumKind::Interior,
        },
        _ => SigmaMinimum {
            sigma_bar: 0.0,
            e_min: 0.0,
            kind: SigmaMinimumKind::VanishingLimit,
        },
    }
}

/// Golden-section search for a minimum of `f` on `[a, b]`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// How [`find_cg`] walks up in `c` and how tightly it refines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScanPolicy {
    pub c_start: f64,
    /// Ratio between consecutive coarse masses.
    pub growth: f64,
    pub ceiling: f64,
    /// Final bracket width relative to `c_g`.
    pub rel_tol: f64,
}

impl Default for ScanPolicy {
    fn default() -> Self {
        Self {
            c_start: 1.0,
            growth: 1.25,
            ceiling: 1e5,
            rel_tol: 1e-3,
        }
    }
}

fn gaussian_negative(c: f64, p: f64, theta: f64) -> bool {
    let m = minimize_sigma(c, p, theta);
    m.is_interior() && m.e_min < 0.0
}

/// Smallest mass at which some Gaussian has negative energy.
///
/// Walks an increasing geometric sequence of masses until the minimized
/// Gaussian energy is negative, then bisects between the last two masses.
/// The result `c_g` satisfies `e_min(c_g) < 0 ≤ e_min(c_g − rel_tol·c_g)`.
pub fn find_cg(p: f64, theta: f64, scan: &ScanPolicy) -> Result<f64> {
    if !(7.0 / 3.0 - 1e-12..13.0 / 3.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "the Gaussian threshold is defined for 7/3 <= p < 13/3, got {p}"
        )));
    }
    if !(scan.growth > 1.0 && scan.c_start > 0.0 && scan.rel_tol > 0.0) {
        return Err(Error::InvalidParameter("degenerate scan policy".into()));
    }
    let mut lo = 0.0;
    let mut hi = scan.c_start;
    while !gaussian_negative(hi, p, theta) {
        lo = hi;
        hi *= scan.growth;
        if hi > scan.ceiling {
            return Err(Error::NotFound { ceiling: scan.ceiling });
        }
    }
    while hi - lo > scan.rel_tol * hi {
        let mid = 0.5 * (lo + hi);
        if gaussian_negative(mid, p, theta) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Seeding rule for the flow: start from `g_{c,σ}` with `σ = σ̄ c / c_g`,
/// where `σ̄` minimizes the Gaussian energy at `c_g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedRule {
    pub p: f64,
    pub theta: f64,
    pub c_g: f64,
    pub sigma_bar: f64,
}

impl SeedRule {
    /// Threshold-based rule for `7/3 <= p < 13/3`.
    pub fn from_threshold(p: f64, theta: f64, scan: &ScanPolicy) -> Result<Self> {
        let c_g = find_cg(p, theta, scan)?;
        let m = minimize_sigma(c_g, p, theta);
        Ok(Self {
            p,
            theta,
            c_g,
            sigma_bar: m.sigma_bar,
        })
    }

    /// Rule anchored at `c` itself, for cases where the Gaussian minimum
    /// is already negative at `c` (e.g. `p < 7/3`).
    pub fn at_mass(c: f64, p: f64, theta: f64) -> Result<Self> {
        let m = minimize_sigma(c, p, theta);
        if !m.is_interior() {
            return Err(Error::InvalidParameter(format!(
                "no Gaussian with negative energy at c = {c}, p = {p}"
            )));
        }
        Ok(Self {
            p,
            theta,
            c_g: c,
            sigma_bar: m.sigma_bar,
        })
    }

    pub fn sigma_for(&self, c: f64) -> f64 {
        self.sigma_bar * c / self.c_g
    }
}

/// One point of the `e_min(c)` curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub c: f64,
    pub sigma_bar: f64,
    pub e_min: f64,
}

/// `minimize_sigma` over `points` equally spaced masses in `[c_min, c_max]`.
pub fn emin_curve(p: f64, theta: f64, c_min: f64, c_max: f64, points: usize) -> Vec<CurvePoint> {
    let step = if points > 1 {
        (c_max - c_min) / (points - 1) as f64
    } else {
        0.0
    };
    (0..points)
        .map(|i| {
            let c = c_min + step * i as f64;
            let m = minimize_sigma(c, p, theta);
            CurvePoint {
                c,
                sigma_bar: m.sigma_bar,
                e_min: m.e_min,
            }
        })
        .collect()
}

/// Best Sobolev constant `S = 2^(1/3) / (sqrt(3π) Γ(3/2)^(1/3))`, with
/// `Γ(3/2) = √π / 2`.
pub fn sobolev_constant() -> f64 {
    let gamma_three_halves = PI.sqrt() / 2.0;
    2f64.powf(1.0 / 3.0) / ((3.0 * PI).sqrt() * gamma_three_halves.powf(1.0 / 3.0))
}

/// `K_p = 4^((3p−3)/10) S^((3p−3)/5)`.
pub fn k_p(p: f64) -> f64 {
    let e = (3.0 * p - 3.0) / 10.0;
    4f64.powf(e) * sobolev_constant().powf(2.0 * e)
}

/// Lower bound on `M(c)` and the point where the auxiliary function
/// `ω(s) = s − K_p c^((11−p)/10) s^((3p−3)/10) / (p+1)` attains it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBound {
    pub value: f64,
    pub minimizer: f64,
}

/// Distance from `p = 13/3` below which the lower bound degenerates.
pub const CRITICAL_EXPONENT_GUARD: f64 = 1e-3;

/// Closed-form lower bound on `M(c)` for `7/3 <= p < 13/3`:
///
/// ```text
/// M(c) >= −(13−3p)/(3(p−1)) (10(p+1)/(3(p−1)K_p))^(10/(3p−13)) c^((11−p)/(13−3p))
/// ```
///
/// Within [`CRITICAL_EXPONENT_GUARD`] of `13/3` the exponents blow up and
/// the value `−∞` is returned. Evaluated in log space so large exponents do
/// not overflow intermediate powers.
pub fn lower_bound(c: f64, p: f64) -> Result<LowerBound> {
    if !(7.0 / 3.0 - 1e-12..13.0 / 3.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "lower bound is defined for 7/3 <= p < 13/3, got {p}"
        )));
    }
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("c must be positive, got {c}")));
    }
    if 13.0 / 3.0 - p < CRITICAL_EXPONENT_GUARD {
        log::warn!("lower bound degenerates near p = 13/3 (p = {p}); reporting -inf");
        return Ok(LowerBound {
            value: f64::NEG_INFINITY,
            minimizer: f64::INFINITY,
        });
    }
    let kp = k_p(p);
    let beta = (3.0 * p - 3.0) / 10.0;
    let amplitude = kp * c.powf((11.0 - p) / 10.0) / (p + 1.0);
    // ω'(s) = 0  ⇔  s = (β A)^(1/(1−β)), ω(s) = −s (1−β)/β.
    let log_s = (beta * amplitude).ln() / (1.0 - beta);
    let prefactor = (13.0 - 3.0 * p) / (3.0 * (p - 1.0));
    let log_closed = (10.0 / (3.0 * p - 13.0)) * (10.0 * (p + 1.0) / (3.0 * (p - 1.0) * kp)).ln()
        + (11.0 - p) / (13.0 - 3.0 * p) * c.ln();
    Ok(LowerBound {
        value: -prefactor * log_closed.exp(),
        minimizer: log_s.exp(),
    })
}

/// `ω(s)` from the lower-bound argument.
pub fn omega(s: f64, c: f64, p: f64) -> f64 {
    s - k_p(p) / (p + 1.0) * c.powf((11.0 - p) / 10.0) * s.powf((3.0 * p - 3.0) / 10.0)
}

/// `(A, B, c♯)` of the sharp `p = 7/3` upper bound.
pub fn p73_constants() -> (f64, f64, f64) {
    let a = 2.0 * SQRT_2 * 3f64.powf(2.5) / (10f64.powf(2.5) * PI);
    let b = 3f64.powf(2.0 / 3.0) / (2f64.powf(7.0 / 3.0) * PI);
    let c_sharp = (10f64.powf(2.5) * PI / (2f64.powf(3.5) * 3f64.powf(1.5))).powf(1.5);
    (a, b, c_sharp)
}

/// Upper bound on `M(c)` at `p = 7/3`:
/// zero for `c ≤ c♯`, else
/// `−[(2/5)^(2/3) − (2/5)^(5/3)] (A c^(5/3) − 3c/4)^(5/3) / (B c^(4/3))`.
pub fn upper_bound_p73(c: f64) -> f64 {
    let (a, b, c_sharp) = p73_constants();
    if c <= c_sharp {
        return 0.0;
    }
    let r: f64 = 2.0 / 5.0;
    let gap = a * c.powf(5.0 / 3.0) - 0.75 * c;
    -(r.powf(2.0 / 3.0) - r.powf(5.0 / 3.0)) * gap.max(0.0).powf(5.0 / 3.0) / (b * c.powf(4.0 / 3.0))
}

/// Masses bracketing the critical exponent `p = 13/3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalConstants {
    /// `(16 / (3 K_{13/3}))^(3/2)`: below it the infimum is zero and not
    /// attained.
    pub c_flat: f64,
    /// `3^(3/2) (16/3)^(15/4) π^(3/2) / 32^(3/2)`: above it the infimum is
    /// `−∞`.
    pub c_flat_sup: f64,
}

pub fn critical_constants() -> CriticalConstants {
    let k = 4.0 * sobolev_constant().powi(2);
    CriticalConstants {
        c_flat: (16.0 / (3.0 * k)).powf(1.5),
        c_flat_sup: 3f64.powf(1.5) * (16.0f64 / 3.0).powf(3.75) * PI.powf(1.5) / 32f64.powf(1.5),
    }
}

/// `sup_y ∫_{B_R(y)} g_{c,σ}²`, attained at `y = 0`:
/// `c [erf(σR) − 2σR e^(−σ²R²)/√π]`.
pub fn vanishing_mass_bound(seed: &GaussianSeed, radius: f64) -> f64 {
    let x = seed.sigma * radius;
    seed.c * (libm::erf(x) - 2.0 * x * (-x * x).exp() / PI.sqrt())
}

/// All analytic bounds at one `(c, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub c: f64,
    pub p: f64,
    pub upper_gaussian: f64,
    pub lower: f64,
    pub upper_p73: Option<f64>,
    pub c_flat: f64,
    pub c_flat_sup: f64,
    pub sobolev_s: f64,
    pub k_p: f64,
}

pub fn bounds_report(c: f64, p: f64) -> Result<BoundsReport> {
    let lower = lower_bound(c, p)?;
    let upper = minimize_sigma(c, p, 1.0);
    let crit = critical_constants();
    let is_p73 = (p - 7.0 / 3.0).abs() < 1e-12;
    Ok(BoundsReport {
        c,
        p,
        upper_gaussian: upper.e_min,
        lower: lower.value,
        upper_p73: is_p73.then(|| upper_bound_p73(c)),
        c_flat: crit.c_flat,
        c_flat_sup: crit.c_flat_sup,
        sobolev_s: sobolev_constant(),
        k_p: k_p(p),
    })
}
