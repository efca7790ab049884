//! Computational convex analysis for log-concave functional volumes.
//!
//! The crate has two numeric tracks. The exact track works with
//! one-dimensional piecewise linear-quadratic functions ([`convexfn::Plq`])
//! and polyhedral functions ([`convexfn::PolyhedralFn`]), where conjugation,
//! infimal convolution and the weighted epigraph measures are computed in
//! closed form. The grid track ([`convexfn::GridFn`]) samples functions on
//! regular boxes in one or two dimensions and uses discrete Legendre
//! transforms.
//!
//! On top of both tracks, [`variation`] compares finite-difference
//! derivatives of `t ↦ μ((u* + tζ)*)` with the bulk + boundary formula.

// `!(x > 0.0)` is used on purpose to reject NaN along with the bound.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod convexfn;
pub mod error;
pub mod extended;
pub mod geometry;
pub mod harness;
pub mod measures;
pub mod quadrature;
pub mod transform;
pub mod variation;
pub mod wulff;

pub use error::{Error, Result};
pub use extended::ExtReal;

/// Size of the rayon pool, honouring `FWL_THREADS` when set.
pub fn configure_threads() {
    if let Some(n) = std::env::var("FWL_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // a second call (or a pool already built by the host) is not an error
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}
