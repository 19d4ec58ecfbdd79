//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use qlsflow::energy::ProblemParams;
use qlsflow::flow::{etd2rk_step, FlowConfig, FlowReport, SplitOperator};
use qlsflow::gaussian::{ScanPolicy, SeedRule};
use qlsflow::{Field3D, GridSpec, SpectralWorkspace};

/// Flow config on `[−5, 5]³` with `n` points per axis, seeded like the CLI:
/// by `c_g(p)` where it exists, otherwise at the mass itself.
pub fn config(p: f64, c: f64, theta: f64, n: usize, max_steps: usize) -> FlowConfig {
    let rule = if p >= 7.0 / 3.0 && theta == 1.0 {
        SeedRule::from_threshold(p, theta, &ScanPolicy::default()).unwrap()
    } else {
        SeedRule::at_mass(c, p, theta).unwrap()
    };
    let base = FlowConfig {
        grid: GridSpec::new(5.0, n).unwrap(),
        max_steps,
        ..FlowConfig::new(ProblemParams::new(p, c, theta, 1.0).unwrap(), 1.0)
    };
    base.for_mass(&rule, c).unwrap()
}

/// Energy never rises by more than `10 · local_error_tol` between accepted
/// steps and the mass is 1 after every accepted step.
pub fn check_invariants(report: &FlowReport, cfg: &FlowConfig) -> Result<(), String> {
    let slack = 10.0 * cfg.local_error_tol;
    for w in report.energy_trace.windows(2) {
        if w[1].energy > w[0].energy + slack {
            return Err(format!(
                "energy rose from {:e} to {:e} at t = {:e}",
                w[0].energy, w[1].energy, w[1].t
            ));
        }
    }
    for point in &report.energy_trace[1..] {
        if (point.mass - 1.0).abs() > 1e-13 {
            return Err(format!("mass {} at t = {:e}", point.mass, point.t));
        }
    }
    Ok(())
}

pub fn integrate_fixed(v0: &Field3D, steps: usize, t_end: f64, ops: &SplitOperator, embedded: bool) -> Field3D {
    let mut ws = SpectralWorkspace::new(*v0.grid());
    let h = t_end / steps as f64;
    let mut v = v0.clone();
    for _ in 0..steps {
        let step = etd2rk_step(&v, h, ops, &mut ws).unwrap();
        v = if embedded { step.v_embedded } else { step.v_next };
    }
    v
}

pub fn distance(a: &Field3D, b: &Field3D) -> f64 {
    let d: Vec<f64> = a.values().iter().zip(b.values()).map(|(x, y)| x - y).collect();
    Field3D::new(*a.grid(), d).unwrap().l2_norm()
}

/// Observed orders of ETD2RK and of the embedded exponential Euler method
/// between `h = T/100, T/200, T/400`, against a `T/6400` ETD2RK reference.
pub fn observed_orders(ops: &SplitOperator, v0: &Field3D, t_end: f64) -> ([f64; 2], [f64; 2]) {
    let reference = integrate_fixed(v0, 6400, t_end, ops, false);
    let errors = |embedded: bool| -> Vec<f64> {
        [100, 200, 400]
            .iter()
            .map(|&n| distance(&integrate_fixed(v0, n, t_end, ops, embedded), &reference))
            .collect()
    };
    let rates = |e: Vec<f64>| [(e[0] / e[1]).log2(), (e[1] / e[2]).log2()];
    (rates(errors(false)), rates(errors(true)))
}

/// The manufactured problem of the order study: the quasi-linear flow at
/// `p = 3, c = 100, σ = 0.3` on a `16³` grid from the unit Gaussian.
pub fn order_problem() -> (ProblemParams, Field3D) {
    let grid = GridSpec::new(5.0, 16).unwrap();
    let params = ProblemParams::new(3.0, 100.0, 1.0, 0.3).unwrap();
    (params, qlsflow::gaussian::unit_gaussian(grid))
}

/// Unit-mass sum of Gaussian bumps that are resolved on a `[−6, 6]³`,
/// `48³` grid and below 1e−7 at its edge.
pub fn smooth_field(grid: GridSpec, bumps: &[(f64, f64, f64, f64, f64)]) -> Field3D {
    let f = Field3D::from_fn(grid, |x, y, z| {
        bumps
            .iter()
            .map(|&(cx, cy, cz, w, a)| {
                let r2 = (x - cx).powi(2) + (y - cy).powi(2) + (z - cz).powi(2);
                a * (-r2 / (2.0 * w * w)).exp()
            })
            .sum()
    });
    let m = f.map(|v| v * v).integrate();
    f.map(|v| v / m.sqrt())
}
