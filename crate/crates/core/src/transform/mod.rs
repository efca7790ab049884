//! Fenchel–Legendre conjugation, infimal convolution, epi-multiplication,
//! recession functions and the perturbation `u_t = (u* + tζ)*`.

mod exact;
mod grid;
mod perturbation;

pub use exact::{biconjugate, conjugate_as_perturbation, epi_scale, inf_conv, inf_conv_plq, legendre, perturb_exact};
pub use grid::{
    biconjugate_grid, conjugate_values, discrete_conjugate_1d, epi_scale_grid, hopf_lax_residual, inf_conv_grid,
    legendre_grid, perturb_grid, DualOptions, DualSamples, GridConjugate, GridFlow, HopfLaxReport, PerturbOptions,
};
pub use perturbation::{ladder_recession, Perturbation, DEFAULT_LADDER};
