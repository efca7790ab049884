//! Weighted epigraph measures, surface-area and moment measures, and the
//! bulk and boundary integrals of the first-variation formula.

mod body;
mod functional;
mod grid;
mod weight;

pub use body::{
    body_measure, edge_integral, funny_integral, funny_integral_exact, surface_area_measure,
    weighted_surface_area_measure, Density, ExpCertificate,
};
pub use functional::{
    boundary_integral, bulk_integral, epigraph_measure, moment_measure, surface_measure_fn, BoundaryDensity,
    WeightedFunction, DEFAULT_BINS,
};
pub use weight::{Carrier, DiscreteMeasure, Phi, PhiTable, Psi, WeightSpec};
