//! Representations of convex functions with compact domain and the
//! epigraph geometry attached to them.

mod body;
mod grid;
mod metric;
mod plq;
mod poly;

pub use body::{ceil_body, floor_body, lift_body, lift_body_stretched, CeilFn, EpigraphBody};
pub(crate) use grid::{flat_index, multi_index};
pub use grid::{Domain, GridFn};
pub use metric::{sym_diff_distance, Epigraph, Membership, MetricEstimate, DEFAULT_SAMPLES};
pub use plq::{Plq, Quad};
pub use poly::{canonicalize, MaxAffine, PolyhedralFn, CANON_REL_TOL};

/// A function of one variable on the exact track.
pub trait Exact1D {
    fn to_plq(&self) -> Plq;
}

impl Exact1D for Plq {
    fn to_plq(&self) -> Plq {
        self.clone()
    }
}

impl Exact1D for PolyhedralFn {
    fn to_plq(&self) -> Plq {
        Plq::from(self)
    }
}
