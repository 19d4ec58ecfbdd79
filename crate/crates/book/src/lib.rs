//! Code listings of the guide in `book/src`, compiled as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/spectral-grid.md")]
pub mod spectral_grid {}

#[doc = include_str!("../../../book/src/energy.md")]
pub mod energy {}

#[doc = include_str!("../../../book/src/gaussian-bounds.md")]
pub mod gaussian_bounds {}

#[doc = include_str!("../../../book/src/gradient-flow.md")]
pub mod gradient_flow {}

#[doc = include_str!("../../../book/src/threshold-scan.md")]
pub mod threshold_scan {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
