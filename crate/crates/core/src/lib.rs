//! Ground states of the quasi-linear Schrödinger energy
//!
//! ```text
//! E(u) = 1/2 ∫ (1 + 2θu²)|∇u|² dx − 1/(p+1) ∫ |u|^(p+1) dx,   ‖u‖²_L² = c
//! ```
//!
//! on `R^3`, computed by a Fourier-spectral normalized gradient flow with an
//! adaptive exponential Runge–Kutta integrator. The crate also evaluates the
//! closed-form Gaussian trial energies and analytic bounds on the constrained
//! infimum, and brackets the mass threshold above which minimizers exist.
//!
//! Modules, bottom-up:
//!
//! * [`grid`]: periodic cube, FFTs, spectral derivatives, quadrature.
//! * [`energy`]: the discrete energy, Lagrange multipliers and flow
//!   right-hand side in physical and rescaled variables.
//! * [`gaussian`]: Gaussian trial family, the Gaussian threshold `c_g`, and
//!   the analytic upper/lower bounds.
//! * [`flow`]: ETD2RK integration of the rescaled flow to a classified
//!   terminal state.
//! * [`scan`]: bisection of the threshold between `c_g/2` and `c_g`.
//! * [`io`] and [`config`]: file formats, CSV/JSON emission, configuration.
//!
//! ```
//! use qlsflow::gaussian::{find_cg, ScanPolicy};
//!
//! let cg = find_cg(3.0, 1.0, &ScanPolicy::default()).unwrap();
//! assert!((cg - 212.91).abs() / 212.91 < 0.01);
//! ```

pub mod config;
pub mod energy;
pub mod error;
pub mod flow;
pub mod gaussian;
pub mod grid;
pub mod io;
pub mod scan;

pub use error::{Error, Result};
pub use grid::{Field3D, GridSpec, SpectralField, SpectralWorkspace};
