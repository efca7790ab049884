//! The Gaussian symmetric-difference distance `γ₂(A Δ B)` by Monte Carlo.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::body::EpigraphBody;
use super::grid::GridFn;
use super::plq::Plq;
use super::poly::PolyhedralFn;
use crate::geometry::Point2;

pub const DEFAULT_SAMPLES: usize = 1_000_000;

/// Membership oracle for a closed subset of `ℝ²`.
pub trait Membership {
    fn contains(&self, p: Point2) -> bool;
}

impl Membership for EpigraphBody {
    fn contains(&self, p: Point2) -> bool {
        EpigraphBody::contains(self, p, 0.0)
    }
}

/// The epigraph `{(x, z) : z ≥ u(x)}` of a function of one variable.
pub struct Epigraph<'a, F: ?Sized>(pub &'a F);

impl Membership for Epigraph<'_, PolyhedralFn> {
    fn contains(&self, p: Point2) -> bool {
        p[1] >= self.0.evaluate(p[0])
    }
}

impl Membership for Epigraph<'_, Plq> {
    fn contains(&self, p: Point2) -> bool {
        p[1] >= self.0.evaluate(p[0])
    }
}

impl Membership for Epigraph<'_, GridFn> {
    fn contains(&self, p: Point2) -> bool {
        p[1] >= self.0.evaluate(&[p[0]])
    }
}

impl<F: Fn(Point2) -> bool> Membership for F {
    fn contains(&self, p: Point2) -> bool {
        self(p)
    }
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct MetricEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Monte-Carlo estimate of `γ₂(A Δ B)` under the standard Gaussian;
/// deterministic for a fixed seed.
pub fn sym_diff_distance<A, B>(a: &A, b: &B, samples: usize, seed: u64) -> MetricEstimate
where
    A: Membership + ?Sized,
    B: Membership + ?Sized,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..samples {
        let x: f64 = StandardNormal.sample(&mut rng);
        let z: f64 = StandardNormal.sample(&mut rng);
        let p = [x, z];
        if a.contains(p) != b.contains(p) {
            hits += 1;
        }
    }
    let n = samples.max(1) as f64;
    let p = hits as f64 / n;
    MetricEstimate {
        value: p,
        std_error: (p * (1.0 - p) / n).sqrt(),
        samples,
        seed,
    }
}
