//! Gaussian fields with star-body covariance structure: representation
//! constants, the covariance kernel, exact simulators, and the isotropic
//! spectral measure.

pub mod constants;
pub mod fbm;
pub mod isotropic;
pub mod kernel;
pub mod simulate;

pub use constants::{a_hd, b_hd, c_h, representation_constants, RepresentationConstants};
pub use fbm::{cholesky_with_jitter, cov1d, fbm1d_sample, Fbm1d, GRID_CAP};
pub use isotropic::{isotropic_spectral_measure, IsotropicMeasureInfo};
pub use kernel::{MfBfSpec, Variant};
pub use simulate::{cholesky_simulate, plane_wave_simulate, GaussSampleBatch, SimMethod};
