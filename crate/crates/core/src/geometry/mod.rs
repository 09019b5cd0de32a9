//! Star bodies, convex bodies, direction grids, and the transforms between
//! them (polar projection body, radial pth mean body, p-sums).

pub mod convex;
pub mod grid;
pub mod integrals;
pub mod star;
pub mod transform;
pub mod vec;

pub use convex::{ConvexBody, ShadowSampler, UniformSampler};
pub use grid::DirectionGrid;
pub use star::{SpectralAtom, SpectralMeasure, StarBody, TabulatedGauge};
pub use transform::{
    associated_star_body, p_sum, polar_projection_body, radial_mean_gauge_quadrature,
    radial_pth_mean_body,
};
