//! Integer-valued shot-noise fields: counts of Poisson (location, scale)
//! points in a scaled body at the argument minus counts in the body at the
//! origin. Simulation is exact via envelope thinning, variances come from
//! fiber integrals, and single-point marginals are Skellam.

mod charfn;
mod engine;
mod scaling;
mod spec;
mod variance;

pub use charfn::{empirical_char_function, skellam_log_char, CharFnPoint};
pub use engine::simulate;
pub use scaling::scaling_check;
pub use spec::{Counters, PoissonFieldSpec, PoissonSampleBatch};
pub use variance::{
    directional_variance, fractional_variance, truncated_variance, variance_quadrature,
};
