use std::f64::consts::PI;

use proptest::prelude::*;
use qlsflow::grid::radial_profile;
use qlsflow::{Field3D, GridSpec, SpectralWorkspace};

/// Random trigonometric polynomial with modes |m| < N/2 on each axis.
fn trig_field(grid: GridSpec, terms: &[(i64, i64, i64, f64, f64)]) -> Field3D {
    let kk = PI / grid.half_width();
    Field3D::from_fn(grid, |x, y, z| {
        terms
            .iter()
            .map(|&(a, b, c, amp, phase)| amp * (kk * (a as f64 * x + b as f64 * y + c as f64 * z) + phase).cos())
            .sum()
    })
}

fn terms(max_mode: i64) -> impl Strategy<Value = Vec<(i64, i64, i64, f64, f64)>> {
    prop::collection::vec(
        (
            -max_mode..=max_mode,
            -max_mode..=max_mode,
            -max_mode..=max_mode,
            -1.0..1.0f64,
            0.0..(2.0 * PI),
        ),
        1..6,
    )
}

/// Max error of the spectral Laplacian of e^(−r²/2) against (r² − 3)e^(−r²/2),
/// and the node where it occurs.
fn gaussian_laplacian_error(l: f64, n: usize) -> (f64, [f64; 3]) {
    let grid = GridSpec::new(l, n).unwrap();
    let mut ws = SpectralWorkspace::new(grid);
    let f = Field3D::from_fn(grid, |x, y, z| (-(x * x + y * y + z * z) / 2.0).exp());
    let exact = Field3D::from_fn(grid, |x, y, z| {
        let r2 = x * x + y * y + z * z;
        (r2 - 3.0) * (-r2 / 2.0).exp()
    });
    let lap = ws.laplacian(&f).unwrap();
    let (idx, err) = lap
        .values()
        .iter()
        .zip(exact.values())
        .map(|(a, b)| (a - b).abs())
        .enumerate()
        .fold((0, 0.0), |best, (i, e)| if e > best.1 { (i, e) } else { best });
    let at = [idx % n, (idx / n) % n, idx / (n * n)].map(|i| grid.coordinate(i));
    (err, at)
}

#[test]
fn gaussian_laplacian_on_default_box_is_limited_by_the_seam() {
    // On [−5, 5)³ the periodic extension of the Gaussian has a slope jump
    // of about 4e−5 at the faces, so the error peaks there. The frozen value
    // is the same DFT Laplacian computed independently with numpy.
    let (err, at) = gaussian_laplacian_error(5.0, 64);
    assert!((err / 3.412924226416976e-4 - 1.0).abs() <= 1e-6, "max error {err:e}");
    assert!(at.contains(&-5.0), "max error at {at:?}");
}

#[test]
fn gaussian_laplacian_matches_analytic_formula() {
    let (err, _) = gaussian_laplacian_error(7.0, 64);
    assert!(err <= 1e-6, "max error {err:e}");
}

#[test]
fn sine_is_a_laplacian_eigenfunction() {
    let grid = GridSpec::new(5.0, 32).unwrap();
    let mut ws = SpectralWorkspace::new(grid);
    let k = PI / 5.0;
    let f = Field3D::from_fn(grid, |x, _, _| (k * x).sin());
    let lap = ws.laplacian(&f).unwrap();
    for (l, v) in lap.values().iter().zip(f.values()) {
        assert!((l + k * k * v).abs() <= 1e-10);
    }
}

#[test]
fn gaussian_mass_integral() {
    let grid = GridSpec::new(5.0, 64).unwrap();
    let seed = qlsflow::gaussian::GaussianSeed::new(70.0, 1.0, 2.0, 1.0);
    let mass = seed.sample(grid).map(|v| v * v).integrate();
    assert!((mass / 70.0 - 1.0).abs() <= 1e-6, "mass {mass}");
}

#[test]
fn off_center_gaussian_breaks_radial_symmetry() {
    let grid = GridSpec::new(5.0, 32).unwrap();
    let h = grid.spacing();
    let centered = Field3D::from_fn(grid, |x, y, z| (-(x * x + y * y + z * z)).exp());
    let shifted = Field3D::from_fn(grid, |x, y, z| (-((x - h).powi(2) + y * y + z * z)).exp());
    let bins = 16;
    let a = radial_profile(&centered, bins).unwrap();
    let b = radial_profile(&shifted, bins).unwrap();
    for bin in a.iter().filter(|b| b.count > 0 && b.radius < 2.0) {
        assert!(bin.max_deviation <= 1e-10 * bin.mean.max(1e-300));
    }
    assert!(b.iter().any(|bin| bin.max_deviation > 1e-3));
    let means: Vec<f64> = a.iter().filter(|b| b.count > 0 && b.radius <= 5.0).map(|b| b.mean).collect();
    assert!(means.windows(2).all(|w| w[1] < w[0]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn round_trip_is_identity(values in prop::collection::vec(-1.0..1.0f64, 16 * 16 * 16)) {
        let grid = GridSpec::new(3.0, 16).unwrap();
        let mut ws = SpectralWorkspace::new(grid);
        let f = Field3D::new(grid, values).unwrap();
        let spec = ws.forward(&f).unwrap();
        let back = ws.inverse(&spec).unwrap();
        let err = back.values().iter().zip(f.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-12 * f.max_abs().max(1.0));
    }

    #[test]
    fn parseval(values in prop::collection::vec(-1.0..1.0f64, 8 * 8 * 8), l in 1.0..8.0f64) {
        let grid = GridSpec::new(l, 8).unwrap();
        let mut ws = SpectralWorkspace::new(grid);
        let f = Field3D::new(grid, values).unwrap();
        let physical = f.map(|v| v * v).integrate();
        let spectrum = ws.forward(&f).unwrap();
        let spectral = ws.spectral_norm_sqr(&spectrum);
        prop_assert!((physical - spectral).abs() <= 1e-10 * physical.abs());
    }

    #[test]
    fn laplacian_is_divergence_of_gradient(t in terms(7)) {
        let grid = GridSpec::new(4.0, 16).unwrap();
        let mut ws = SpectralWorkspace::new(grid);
        let f = trig_field(grid, &t);
        let lap = ws.laplacian(&f).unwrap();
        let grad = ws.gradient(&f).unwrap();
        let mut div = vec![0.0; grid.len()];
        for (axis, g) in grad.iter().enumerate() {
            let d = ws.gradient(g).unwrap();
            for (acc, v) in div.iter_mut().zip(d[axis].values()) {
                *acc += v;
            }
        }
        let scale = lap.max_abs().max(1e-12);
        let err = lap.values().iter().zip(&div).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-10 * scale);
    }

    #[test]
    fn quadrature_is_exact_for_trig_polynomials(t in terms(7), offset in -2.0..2.0f64) {
        let grid = GridSpec::new(4.0, 16).unwrap();
        let f = trig_field(grid, &t).map(|v| v + offset);
        let exact: f64 = offset * 512.0
            + t.iter()
                .filter(|&&(a, b, c, _, _)| a == 0 && b == 0 && c == 0)
                .map(|&(_, _, _, amp, phase)| amp * phase.cos() * 512.0)
                .sum::<f64>();
        prop_assert!((f.integrate() - exact).abs() <= 1e-10 * 512.0);
    }
}
