use std::f64::consts::PI;

use proptest::prelude::*;
use qlsflow::flow::{detect_spread, FlowConfig};
use qlsflow::gaussian::{
    find_cg, gaussian_energy, lower_bound, minimize_sigma, omega, vanishing_mass_bound, GaussianSeed, ScanPolicy,
};
use qlsflow::energy::ProblemParams;
use qlsflow::{Field3D, GridSpec};

/// Composite Simpson rule on [a, b] with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

#[test]
fn reference_thresholds_within_one_percent() {
    let policy = ScanPolicy::default();
    for (p, expect) in [
        (7.0 / 3.0, 69.510),
        (8.0 / 3.0, 150.65),
        (3.0, 212.91),
        (10.0 / 3.0, 241.01),
        (11.0 / 3.0, 225.42),
        (4.0, 170.33),
    ] {
        let cg = find_cg(p, 1.0, &policy).unwrap();
        assert!((cg / expect - 1.0).abs() <= 0.01, "p = {p}: {cg}");
        assert!(minimize_sigma(cg, p, 1.0).e_min < 0.0);
        assert!(minimize_sigma(cg * (1.0 - 2.0 * policy.rel_tol), p, 1.0).e_min >= 0.0);
    }
}

#[test]
fn quadrature_oracle_for_p3_c100() {
    // 3D quadrature of the unscaled energy on a box wide enough for σ = 0.5.
    let grid = GridSpec::new(12.0, 64).unwrap();
    let seed = GaussianSeed::new(100.0, 0.5, 3.0, 1.0);
    let mut ws = qlsflow::SpectralWorkspace::new(grid);
    let params = ProblemParams::new(3.0, 100.0, 1.0, 1.0).unwrap();
    let quad = qlsflow::energy::energy_u(&seed.sample(grid), &params, &mut ws).unwrap().total;
    let exact = gaussian_energy(&seed);
    assert!(((quad - exact) / exact).abs() <= 1e-4, "{quad} vs {exact}");
}

#[test]
fn semilinear_infimum_is_negative_below_seven_thirds() {
    // E(σ) = Aσ² − Bσ^e with e = 3(p−1)/2 < 2 is negative for
    // σ < (B/A)^(1/(2−e)); check at half that crossover.
    for c in [0.1, 1.0, 10.0] {
        for p in [1.5, 2.0, 2.3] {
            let a = 0.75 * c;
            let b = -gaussian_energy(&GaussianSeed::new(c, 1.0, p, 0.0)) + a;
            let e = 1.5 * (p - 1.0);
            let sigma = 0.5 * (b / a).powf(1.0 / (2.0 - e));
            assert!(gaussian_energy(&GaussianSeed::new(c, sigma, p, 0.0)) < 0.0, "c = {c}, p = {p}");
        }
    }
    // Where the dip lies inside the scanned σ range the minimizer finds it.
    for c in [10.0, 70.0] {
        assert!(minimize_sigma(c, 2.0, 0.0).is_interior());
    }
}

#[test]
fn gaussian_energy_vanishes_at_small_sigma() {
    for p in [7.0 / 3.0, 3.0, 4.2] {
        let e = gaussian_energy(&GaussianSeed::new(200.0, 1e-6, p, 1.0));
        assert!(e.abs() < 1e-8);
    }
}

#[test]
fn lower_bound_matches_numerical_minimum_of_omega() {
    for (c, p) in [(50.0, 7.0 / 3.0), (212.0, 3.0), (400.0, 4.0)] {
        let lb = lower_bound(c, p).unwrap();
        // Oracle: dense log grid then local refinement by ternary search.
        let f = |s: f64| omega(s, c, p);
        let (mut best, mut arg) = (f64::INFINITY, 0.0);
        for i in 0..=8000 {
            let s = 10f64.powf(-8.0 + 40.0 * i as f64 / 8000.0);
            if f(s) < best {
                best = f(s);
                arg = s;
            }
        }
        let (mut a, mut b) = (arg / 1.01, arg * 1.01);
        for _ in 0..200 {
            let (m1, m2) = (a + (b - a) / 3.0, b - (b - a) / 3.0);
            if f(m1) < f(m2) {
                b = m2;
            } else {
                a = m1;
            }
        }
        let oracle = f(0.5 * (a + b));
        assert!((lb.value - oracle).abs() <= 1e-8 * oracle.abs(), "{} vs {oracle}", lb.value);
        assert!(lb.value < 0.0);
    }
}

#[test]
fn lower_bound_below_gaussian_minimum_on_a_grid() {
    for i in 0..10 {
        let p = 7.0 / 3.0 + (13.0 / 3.0 - 7.0 / 3.0 - 0.01) * i as f64 / 9.0;
        for j in 0..10 {
            let c = 10f64.powf(0.5 + 2.5 * j as f64 / 9.0);
            let lb = lower_bound(c, p).unwrap().value;
            let up = minimize_sigma(c, p, 1.0).e_min;
            assert!(lb <= up, "p = {p}, c = {c}: {lb} > {up}");
        }
    }
}

#[test]
fn vanishing_bound_matches_radial_quadrature() {
    let r = 1.0;
    for sigma in [0.2, 0.1, 0.05] {
        let seed = GaussianSeed::new(70.0, sigma, 3.0, 1.0);
        let oracle = simpson(|s| 4.0 * PI * s * s * seed.profile(s).powi(2), 0.0, r, 2000);
        let bound = vanishing_mass_bound(&seed, r);
        assert!((bound - oracle).abs() <= 1e-10 * oracle);
        // Small-σ limit: ball volume times the central density c σ³ π^(−3/2).
        let ratio = bound / sigma.powi(3);
        let limit = 4.0 / 3.0 * PI * r.powi(3) * 70.0 * PI.powf(-1.5);
        assert!(ratio <= limit && ratio >= 0.9 * limit);
    }
    let seed = GaussianSeed::new(70.0, 0.5, 3.0, 1.0);
    assert!((vanishing_mass_bound(&seed, 100.0) - 70.0).abs() < 1e-9);
}

#[test]
fn spread_flips_at_the_analytic_shell_threshold() {
    // Shell mass of π^(−3/2) σ³ e^(−σ²r²) outside the cube |x|∞ ≤ a is
    // 1 − erf(σa)³; the grid flag should flip near where that hits 5%.
    let grid = GridSpec::new(5.0, 32).unwrap();
    let params = ProblemParams::new(3.0, 100.0, 1.0, 0.3).unwrap();
    let cfg = FlowConfig { grid, ..FlowConfig::new(params, 0.3) };
    let a = cfg.spread_shell_fraction * grid.half_width();
    let shell = |s: f64| 1.0 - libm::erf(s * a).powi(3);
    let (mut lo, mut hi) = (0.01, 2.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if shell(mid) > cfg.spread_mass_threshold {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let critical = 0.5 * (lo + hi);
    let field = |s: f64| Field3D::from_fn(grid, |x, y, z| (-0.5 * s * s * (x * x + y * y + z * z)).exp());
    for s in [1.0, 0.6, 1.25 * critical] {
        assert!(!detect_spread(&field(s), &cfg), "σ = {s}");
    }
    for s in [0.8 * critical, 0.5 * critical, 0.1] {
        assert!(detect_spread(&field(s), &cfg), "σ = {s}");
    }
}

proptest! {
    #[test]
    fn cg_brackets_the_sign_change(p in (7.0 / 3.0)..4.3f64) {
        let policy = ScanPolicy::default();
        let cg = find_cg(p, 1.0, &policy).unwrap();
        prop_assert!(minimize_sigma(cg, p, 1.0).e_min < 0.0);
        prop_assert!(minimize_sigma(cg * (1.0 - 2.0 * policy.rel_tol), p, 1.0).e_min >= 0.0);
    }

    #[test]
    fn lower_bound_is_monotone_in_mass(p in (7.0 / 3.0)..4.3f64, c in 1.0..500.0f64, f in 1.01..3.0f64) {
        let a = lower_bound(c, p).unwrap().value;
        let b = lower_bound(c * f, p).unwrap().value;
        prop_assert!(b <= a);
        prop_assert!(a <= minimize_sigma(c, p, 1.0).e_min);
    }
}
