//! Uniform periodic grid on the cube `[-L, L)^3`, its discrete Fourier
//! transform, spectral derivatives and quadrature.
//!
//! Nodes sit at `x_i = -L + i h` with `h = 2L/N`, so the origin is the node
//! `(N/2, N/2, N/2)`. Values are stored row-major with x fastest:
//! `index = i + N (j + N k)`.
//!
//! Spectral coefficients use the unnormalized forward DFT and keep only the
//! non-negative x wavenumbers (`N/2 + 1` of them); the remaining half follows
//! from Hermitian symmetry of real fields.

use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Geometry of the periodic cube `[-L, L)^3` sampled with `N` points per axis.
///
/// Serialized as `{"L": .., "N": ..}`; missing keys take the defaults and
/// deserialization validates like [`GridSpec::new`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRepr", into = "GridRepr")]
pub struct GridSpec {
    half_width: f64,
    points: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct GridRepr {
    #[serde(rename = "L")]
    half_width: f64,
    #[serde(rename = "N")]
    points: usize,
}

impl Default for GridRepr {
    fn default() -> Self {
        GridSpec::default().into()
    }
}

impl From<GridSpec> for GridRepr {
    fn from(g: GridSpec) -> Self {
        Self {
            half_width: g.half_width,
            points: g.points,
        }
    }
}

impl TryFrom<GridRepr> for GridSpec {
    type Error = Error;

    fn try_from(r: GridRepr) -> Result<Self> {
        GridSpec::new(r.half_width, r.points)
    }
}

impl GridSpec {
    pub fn new(half_width: f64, points: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half width must be positive, got {half_width}"
            )));
        }
        if points < 8 || points % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be even and at least 8, got {points}"
            )));
        }
        Ok(Self { half_width, points })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    /// Total number of nodes, `N^3`.
    pub fn len(&self) -> usize {
        self.points.pow(3)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    /// Coordinate of node `i` along any axis.
    pub fn coordinate(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.points * (j + self.points * k)
    }

    /// Signed mode number `m` of FFT index `idx`, in `[-N/2, N/2)`.
    #[inline]
    pub fn mode_number(&self, idx: usize) -> i64 {
        if idx < self.points / 2 {
            idx as i64
        } else {
            idx as i64 - self.points as i64
        }
    }

    /// Wavenumber `k = (pi / L) m`.
    #[inline]
    pub fn wavenumber(&self, m: i64) -> f64 {
        std::f64::consts::PI / self.half_width * m as f64
    }

    /// Number of stored spectral coefficients, `(N/2 + 1) N^2`.
    pub fn spectral_len(&self) -> usize {
        (self.points / 2 + 1) * self.points * self.points
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            half_width: 5.0,
            points: 64,
        }
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[-{0}, {0})^3 with {1}^3 nodes", self.half_width, self.points)
    }
}

/// A real function sampled on the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Field3D {
    grid: GridSpec,
    values: Vec<f64>,
}

impl Field3D {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue(pos));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_raw(grid: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self::from_raw(grid, vec![0.0; grid.len()])
    }

    pub fn constant(grid: GridSpec, value: f64) -> Self {
        Self::from_raw(grid, vec![value; grid.len()])
    }

    /// Samples `f(x, y, z)` at every node.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64, f64) -> f64) -> Self {
        let n = grid.points();
        let coords: Vec<f64> = (0..n).map(|i| grid.coordinate(i)).collect();
        let mut values = Vec::with_capacity(grid.len());
        for &z in &coords {
            for &y in &coords {
                for &x in &coords {
                    values.push(f(x, y, z));
                }
            }
        }
        Self::from_raw(grid, values)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field3D {
        Self::from_raw(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&mut self, factor: f64) {
        self.values.iter_mut().for_each(|v| *v *= factor);
    }

    /// Riemann sum `h^3 * sum(values)`, the periodic trapezoid rule.
    pub fn integrate(&self) -> f64 {
        integrate_values(&self.values, &self.grid)
    }

    /// `sqrt(integral of f^2)`.
    pub fn l2_norm(&self) -> f64 {
        (dot_values(&self.values, &self.values) * self.grid.cell_volume()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Value at node `(i, j, k)`.
    pub fn at(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[self.grid.index(i, j, k)]
    }
}

/// See [`Field3D::integrate`].
pub fn integrate(f: &Field3D) -> f64 {
    f.integrate()
}

pub(crate) fn integrate_values(values: &[f64], grid: &GridSpec) -> f64 {
    values.iter().sum::<f64>() * grid.cell_volume()
}

pub(crate) fn dot_values(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Half-spectrum Fourier coefficients of a real field.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<C64>,
}

impl SpectralField {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Stored coefficients, indexed `kx + (N/2 + 1) (ky + N kz)` with
    /// `kx` in `0..=N/2`.
    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [C64] {
        &mut self.coeffs
    }

    /// Coefficient of the signed mode `(mx, my, mz)`, each in `[-N/2, N/2)`.
    /// Negative `mx` is recovered by conjugate symmetry.
    pub fn mode(&self, mx: i64, my: i64, mz: i64) -> C64 {
        let n = self.grid.points() as i64;
        let wrap = |m: i64| m.rem_euclid(n) as usize;
        let nxh = self.grid.points() / 2 + 1;
        let (kx, ky, kz) = (wrap(mx), wrap(my), wrap(mz));
        if kx < nxh {
            self.coeffs[kx + nxh * (ky + self.grid.points() * kz)]
        } else {
            let (kx, ky, kz) = (wrap(-mx), wrap(-my), wrap(-mz));
            self.coeffs[kx + nxh * (ky + self.grid.points() * kz)].conj()
        }
    }
}

/// Grid geometry, Fourier multipliers and FFT plans for one grid.
///
/// Transforms borrow the workspace mutably for scratch space; give each
/// concurrent computation its own workspace.
pub struct SpectralWorkspace {
    grid: GridSpec,
    laplacian: Vec<f64>,
    gradient: [Vec<f64>; 3],
    squared_mode: Vec<u32>,
    weights: Vec<f64>,
    dealias: Option<Vec<bool>>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    lines: Vec<C64>,
    scratch: Vec<C64>,
    spectral_tmp: Vec<C64>,
}

impl fmt::Debug for SpectralWorkspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralWorkspace")
            .field("grid", &self.grid)
            .field("dealias", &self.dealias.is_some())
            .finish()
    }
}

impl SpectralWorkspace {
    pub fn new(grid: GridSpec) -> Self {
        Self::with_dealiasing(grid, false)
    }

    /// With `dealias` set, every forward transform zeroes modes with
    /// `|m| > N/3` along any axis (the 2/3 rule).
    pub fn with_dealiasing(grid: GridSpec, dealias: bool) -> Self {
        let n = grid.points();
        let nxh = n / 2 + 1;
        let mut laplacian = Vec::with_capacity(grid.spectral_len());
        let mut gradient = [
            Vec::with_capacity(grid.spectral_len()),
            Vec::with_capacity(grid.spectral_len()),
            Vec::with_capacity(grid.spectral_len()),
        ];
        let mut squared_mode = Vec::with_capacity(grid.spectral_len());
        let mut weights = Vec::with_capacity(grid.spectral_len());
        let mut mask = Vec::with_capacity(grid.spectral_len());
        let nyquist = -(n as i64) / 2;
        // Odd derivatives of the Nyquist mode are not representable by a
        // real field, so the gradient multiplier is zero there.
        let grad_k = |m: i64| {
            if m == nyquist {
                0.0
            } else {
                grid.wavenumber(m)
            }
        };
        for kz in 0..n {
            let mz = grid.mode_number(kz);
            for ky in 0..n {
                let my = grid.mode_number(ky);
                for kx in 0..nxh {
                    // kx runs over 0..=N/2; the last one is the Nyquist mode.
                    let mx = if kx == n / 2 { nyquist } else { kx as i64 };
                    let k2 = grid.wavenumber(mx).powi(2)
                        + grid.wavenumber(my).powi(2)
                        + grid.wavenumber(mz).powi(2);
                    laplacian.push(-k2);
                    gradient[0].push(grad_k(mx));
                    gradient[1].push(grad_k(my));
                    gradient[2].push(grad_k(mz));
                    squared_mode.push((mx * mx + my * my + mz * mz) as u32);
                    weights.push(if kx == 0 || kx == n / 2 { 1.0 } else { 2.0 });
                    let cut = n as i64 / 3;
                    mask.push(mx.abs() <= cut && my.abs() <= cut && mz.abs() <= cut);
                }
            }
        }
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n);
        let ifft = planner.plan_fft_inverse(n);
        let scratch_len = fft
            .get_inplace_scratch_len()
            .max(ifft.get_inplace_scratch_len());
        Self {
            grid,
            laplacian,
            gradient,
            squared_mode,
            weights,
            dealias: dealias.then_some(mask),
            fft,
            ifft,
            lines: vec![C64::new(0.0, 0.0); n * n * n / 2 + nxh * n],
            scratch: vec![C64::new(0.0, 0.0); scratch_len],
            spectral_tmp: vec![C64::new(0.0, 0.0); grid.spectral_len()],
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn dealiasing(&self) -> bool {
        self.dealias.is_some()
    }

    /// `-|k|^2` per stored mode. Zero at the zero mode.
    pub fn laplacian_multiplier(&self) -> &[f64] {
        &self.laplacian
    }

    /// Wavenumber components `(k_x, k_y, k_z)` per stored mode; the gradient
    /// multiplies by `i k_j`.
    pub fn gradient_multipliers(&self) -> [&[f64]; 3] {
        [&self.gradient[0], &self.gradient[1], &self.gradient[2]]
    }

    /// Integer `mx^2 + my^2 + mz^2` per stored mode.
    pub fn squared_mode_numbers(&self) -> &[u32] {
        &self.squared_mode
    }

    fn check(&self, grid: &GridSpec) -> Result<()> {
        if *grid != self.grid {
            return Err(Error::GridMismatch {
                expected: self.grid,
                found: *grid,
            });
        }
        Ok(())
    }

    pub fn forward(&mut self, f: &Field3D) -> Result<SpectralField> {
        self.check(f.grid())?;
        let mut coeffs = vec![C64::new(0.0, 0.0); self.grid.spectral_len()];
        self.forward_raw(f.values(), &mut coeffs);
        Ok(SpectralField {
            grid: self.grid,
            coeffs,
        })
    }

    pub fn inverse(&mut self, spectrum: &SpectralField) -> Result<Field3D> {
        self.check(spectrum.grid())?;
        let mut values = vec![0.0; self.grid.len()];
        self.inverse_raw(spectrum.coeffs(), &mut values);
        Ok(Field3D::from_raw(self.grid, values))
    }

    /// Spectral Laplacian.
    pub fn laplacian(&mut self, f: &Field3D) -> Result<Field3D> {
        self.check(f.grid())?;
        let mut coeffs = vec![C64::new(0.0, 0.0); self.grid.spectral_len()];
        self.forward_raw(f.values(), &mut coeffs);
        for (c, m) in coeffs.iter_mut().zip(&self.laplacian) {
            *c *= *m;
        }
        let mut out = vec![0.0; self.grid.len()];
        self.inverse_raw(&coeffs, &mut out);
        Ok(Field3D::from_raw(self.grid, out))
    }

    /// Spectral gradient `(d/dx, d/dy, d/dz)`.
    pub fn gradient(&mut self, f: &Field3D) -> Result<[Field3D; 3]> {
        self.check(f.grid())?;
        let mut coeffs = vec![C64::new(0.0, 0.0); self.grid.spectral_len()];
        self.forward_raw(f.values(), &mut coeffs);
        let [gx, gy, gz] = self.gradient_from_spectrum(&coeffs);
        Ok([
            Field3D::from_raw(self.grid, gx),
            Field3D::from_raw(self.grid, gy),
            Field3D::from_raw(self.grid, gz),
        ])
    }

    pub(crate) fn gradient_from_spectrum(&mut self, coeffs: &[C64]) -> [Vec<f64>; 3] {
        let mut out: [Vec<f64>; 3] = std::array::from_fn(|_| vec![0.0; self.grid.len()]);
        let mut work = vec![C64::new(0.0, 0.0); coeffs.len()];
        for (axis, dst) in out.iter_mut().enumerate() {
            for ((w, c), k) in work.iter_mut().zip(coeffs).zip(&self.gradient[axis]) {
                *w = C64::new(-c.im * k, c.re * k);
            }
            self.inverse_raw(&work, dst);
        }
        out
    }

    /// `integral of |f|^2` evaluated on the spectral side (Parseval).
    pub fn spectral_norm_sqr(&self, spectrum: &SpectralField) -> f64 {
        self.norm_sqr_raw(spectrum.coeffs())
    }

    /// `−∫ f Δf = Σ |k|² |f̂|²` on the spectral side. This is the Dirichlet
    /// form of the discrete Laplacian, so it includes the Nyquist modes
    /// that the spectral gradient drops.
    pub fn dirichlet_form(&self, spectrum: &SpectralField) -> f64 {
        self.dirichlet_raw(spectrum.coeffs())
    }

    pub(crate) fn dirichlet_raw(&self, coeffs: &[C64]) -> f64 {
        let n3 = self.grid.len() as f64;
        let sum: f64 = coeffs
            .iter()
            .zip(&self.weights)
            .zip(&self.laplacian)
            .map(|((c, w), k)| -w * k * c.norm_sqr())
            .sum();
        sum * self.grid.cell_volume() / n3
    }

    pub(crate) fn norm_sqr_raw(&self, coeffs: &[C64]) -> f64 {
        let n3 = self.grid.len() as f64;
        let sum: f64 = coeffs
            .iter()
            .zip(&self.weights)
            .map(|(c, w)| w * c.norm_sqr())
            .sum();
        sum * self.grid.cell_volume() / n3
    }

    /// Forward transform of raw node values into `out` (half spectrum).
    pub(crate) fn forward_raw(&mut self, input: &[f64], out: &mut [C64]) {
        let n = self.grid.points();
        let nxh = n / 2 + 1;
        let pairs = n * n / 2;
        // x pass: two real lines per complex FFT.
        let packed = &mut self.lines[..pairs * n];
        for pair in 0..pairs {
            let a = &input[2 * pair * n..(2 * pair + 1) * n];
            let b = &input[(2 * pair + 1) * n..(2 * pair + 2) * n];
            let dst = &mut packed[pair * n..(pair + 1) * n];
            for ((d, &x), &y) in dst.iter_mut().zip(a).zip(b) {
                *d = C64::new(x, y);
            }
        }
        self.fft.process_with_scratch(packed, &mut self.scratch);
        for pair in 0..pairs {
            let z = &packed[pair * n..(pair + 1) * n];
            let (l0, l1) = (2 * pair, 2 * pair + 1);
            for m in 0..nxh {
                let zm = z[m];
                let zc = z[(n - m) % n].conj();
                out[l0 * nxh + m] = (zm + zc) * 0.5;
                out[l1 * nxh + m] = (zm - zc) * C64::new(0.0, -0.5);
            }
        }
        self.pass_y(out, true);
        self.pass_z(out, true);
        if let Some(mask) = &self.dealias {
            for (c, keep) in out.iter_mut().zip(mask) {
                if !keep {
                    *c = C64::new(0.0, 0.0);
                }
            }
        }
    }

    /// Inverse transform (normalized) of a half spectrum into node values.
    pub(crate) fn inverse_raw(&mut self, coeffs: &[C64], out: &mut [f64]) {
        let n = self.grid.points();
        let nxh = n / 2 + 1;
        let pairs = n * n / 2;
        let mut tmp = std::mem::take(&mut self.spectral_tmp);
        tmp.copy_from_slice(coeffs);
        self.pass_z(&mut tmp, false);
        self.pass_y(&mut tmp, false);
        let packed = &mut self.lines[..pairs * n];
        for pair in 0..pairs {
            let (l0, l1) = (2 * pair, 2 * pair + 1);
            let a = &tmp[l0 * nxh..(l0 + 1) * nxh];
            let b = &tmp[l1 * nxh..(l1 + 1) * nxh];
            let dst = &mut packed[pair * n..(pair + 1) * n];
            let real_edge = |c: C64, m: usize| {
                if m == 0 || m == n / 2 {
                    C64::new(c.re, 0.0)
                } else {
                    c
                }
            };
            for m in 0..n {
                let (am, bm) = if m < nxh {
                    (real_edge(a[m], m), real_edge(b[m], m))
                } else {
                    (a[n - m].conj(), b[n - m].conj())
                };
                dst[m] = am + C64::new(-bm.im, bm.re);
            }
        }
        self.ifft.process_with_scratch(packed, &mut self.scratch);
        let norm = 1.0 / self.grid.len() as f64;
        for pair in 0..pairs {
            let z = &packed[pair * n..(pair + 1) * n];
            let (l0, l1) = (2 * pair, 2 * pair + 1);
            for (i, zi) in z.iter().enumerate() {
                out[l0 * n + i] = zi.re * norm;
                out[l1 * n + i] = zi.im * norm;
            }
        }
        self.spectral_tmp = tmp;
    }

    fn pass_y(&mut self, data: &mut [C64], forward: bool) {
        let n = self.grid.points();
        let nxh = n / 2 + 1;
        let buf = &mut self.lines[..nxh * n];
        let plan = if forward { &self.fft } else { &self.ifft };
        for kz in 0..n {
            let plane = &mut data[kz * n * nxh..(kz + 1) * n * nxh];
            for ky in 0..n {
                for kx in 0..nxh {
                    buf[kx * n + ky] = plane[ky * nxh + kx];
                }
            }
            plan.process_with_scratch(buf, &mut self.scratch);
            for ky in 0..n {
                for kx in 0..nxh {
                    plane[ky * nxh + kx] = buf[kx * n + ky];
                }
            }
        }
    }

    fn pass_z(&mut self, data: &mut [C64], forward: bool) {
        let n = self.grid.points();
        let nxh = n / 2 + 1;
        let buf = &mut self.lines[..nxh * n];
        let plan = if forward { &self.fft } else { &self.ifft };
        let stride = nxh * n;
        for ky in 0..n {
            for kz in 0..n {
                let row = &data[ky * nxh + kz * stride..ky * nxh + kz * stride + nxh];
                for (kx, v) in row.iter().enumerate() {
                    buf[kx * n + kz] = *v;
                }
            }
            plan.process_with_scratch(buf, &mut self.scratch);
            for kz in 0..n {
                let row = &mut data[ky * nxh + kz * stride..ky * nxh + kz * stride + nxh];
                for (kx, v) in row.iter_mut().enumerate() {
                    *v = buf[kx * n + kz];
                }
            }
        }
    }
}

/// One shell of [`radial_profile`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialBin {
    /// Bin midpoint.
    pub radius: f64,
    pub mean: f64,
    /// Largest `|f - m|` over the bin's nodes, where `m` is the mean of `f`
    /// over nodes at exactly the same distance from the center.
    pub max_deviation: f64,
    pub count: usize,
}

/// Bins nodes by distance from the domain center into `bins` shells of
/// width `h`.
///
/// Nodes at different radii inside one bin legitimately differ, so the
/// asymmetry measure compares each node with the nodes sharing its exact
/// radius; it vanishes for radial input. Bins with no nodes are omitted.
pub fn radial_profile(f: &Field3D, bins: usize) -> Result<Vec<RadialBin>> {
    if bins < 4 {
        return Err(Error::InvalidParameter(format!(
            "radial profile needs at least 4 bins, got {bins}"
        )));
    }
    let grid = f.grid();
    let n = grid.points();
    let half = (n / 2) as i64;
    let max_shell = 3 * (half as usize).pow(2) + 1;
    let mut shell_sum = vec![0.0; max_shell];
    let mut shell_count = vec![0usize; max_shell];
    let shell_of = |i: usize| {
        let d = i as i64 - half;
        (d * d) as usize
    };
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let s = shell_of(i) + shell_of(j) + shell_of(k);
                shell_sum[s] += f.at(i, j, k);
                shell_count[s] += 1;
            }
        }
    }
    let mut sum = vec![0.0; bins];
    let mut count = vec![0usize; bins];
    let mut dev = vec![0.0_f64; bins];
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let s = shell_of(i) + shell_of(j) + shell_of(k);
                let b = isqrt(s);
                if b >= bins {
                    continue;
                }
                let v = f.at(i, j, k);
                sum[b] += v;
                count[b] += 1;
                let shell_mean = shell_sum[s] / shell_count[s] as f64;
                dev[b] = dev[b].max((v - shell_mean).abs());
            }
        }
    }
    let h = grid.spacing();
    Ok((0..bins)
        .filter(|&b| count[b] > 0)
        .map(|b| RadialBin {
            radius: (b as f64 + 0.5) * h,
            mean: sum[b] / count[b] as f64,
            max_deviation: dev[b],
            count: count[b],
        })
        .collect())
}

fn isqrt(s: usize) -> usize {
    let mut r = (s as f64).sqrt() as usize;
    while r * r > s {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= s {
        r += 1;
    }
    r
}
