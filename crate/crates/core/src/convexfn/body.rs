//! Convex bodies in the plane viewed as (bounded pieces of) epigraphs, and
//! the lifts between functions and bodies.

use serde::{Deserialize, Serialize};

use super::poly::{canonicalize, PolyhedralFn};
use crate::error::{Error, Result};
use crate::geometry::{Edge, Point2, Polygon};

/// Compact convex set in `ℝ²` (ambient space of the graph of a function of
/// one variable). Segments are allowed: the lift of an indicator is flat.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BodyDoc", into = "BodyDoc")]
pub struct EpigraphBody {
    polygon: Polygon,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BodyDoc {
    vertices: Vec<Point2>,
}

impl TryFrom<BodyDoc> for EpigraphBody {
    type Error = Error;
    fn try_from(d: BodyDoc) -> Result<Self> {
        EpigraphBody::from_points(&d.vertices)
    }
}

impl From<EpigraphBody> for BodyDoc {
    fn from(b: EpigraphBody) -> Self {
        BodyDoc {
            vertices: b.polygon.vertices().to_vec(),
        }
    }
}

impl EpigraphBody {
    /// Convex hull of `points`.
    pub fn from_points(points: &[Point2]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::DegenerateBody("no vertices".into()));
        }
        if points.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(Error::InvalidArgument("vertices must be finite".into()));
        }
        Ok(EpigraphBody {
            polygon: Polygon::from_points(points),
        })
    }

    pub fn from_polygon(polygon: Polygon) -> Self {
        EpigraphBody { polygon }
    }

    pub fn polygon(&self) -> &Polygon {
        &self.polygon
    }

    pub fn vertices(&self) -> &[Point2] {
        self.polygon.vertices()
    }

    /// Facets with outer unit normals and lengths.
    pub fn facets(&self) -> Vec<Edge> {
        self.polygon.edges()
    }

    pub fn area(&self) -> f64 {
        self.polygon.area()
    }

    pub fn has_interior(&self) -> bool {
        self.polygon.len() >= 3 && self.area() > 0.0
    }

    pub fn support(&self, nu: Point2) -> f64 {
        self.polygon.support(nu)
    }

    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        self.polygon.contains(p, tol)
    }

    /// Radial function `max{s > 0 : s·dir ∈ K}`; needs the origin inside.
    pub fn radial(&self, dir: Point2) -> Result<f64> {
        if !self.has_interior() || !self.polygon.contains([0.0, 0.0], 0.0) {
            return Err(Error::DegenerateBody(
                "radial function needs the origin in the body".into(),
            ));
        }
        Ok(self.polygon.radial(dir))
    }

    pub fn translate(&self, y: Point2) -> EpigraphBody {
        EpigraphBody {
            polygon: self.polygon.translate(y),
        }
    }

    /// Reflection `R_H` through the horizontal axis.
    pub fn reflect(&self) -> EpigraphBody {
        EpigraphBody {
            polygon: self.polygon.reflect_y(),
        }
    }

    pub fn hausdorff(&self, other: &EpigraphBody) -> f64 {
        self.polygon.hausdorff(&other.polygon)
    }
}

/// `K^u = epi(u − M) ∩ R_H epi(u − M) + M e₂` with `M = max u`.
pub fn lift_body(u: &PolyhedralFn) -> EpigraphBody {
    lift_body_stretched(u, 0.0)
}

/// `K^u + ℓ_T`: the lift stretched upwards by the vertical segment
/// `{s e₂ : 0 ≤ s ≤ T}`.
pub fn lift_body_stretched(u: &PolyhedralFn, t_lift: f64) -> EpigraphBody {
    let m = u.max_value();
    let mut pts: Vec<Point2> = u.generators().iter().map(|&(x, z)| [x, z]).collect();
    pts.extend(u.generators().iter().map(|&(x, z)| [x, 2.0 * m - z + t_lift]));
    EpigraphBody {
        polygon: Polygon::from_points(&pts),
    }
}

/// `⌊K⌋(x) = inf{t : (x, t) ∈ K}`.
pub fn floor_body(k: &EpigraphBody) -> PolyhedralFn {
    let pts: Vec<(f64, f64)> = k.vertices().iter().map(|p| (p[0], p[1])).collect();
    canonicalize(&pts).expect("bodies have at least one vertex")
}

/// `⌈K⌉(x) = sup{t : (x, t) ∈ K}`, a concave function (`−∞` off the
/// projection of `K`).
#[derive(Clone, Debug, PartialEq)]
pub struct CeilFn {
    negated: PolyhedralFn,
}

impl CeilFn {
    pub fn evaluate(&self, x: f64) -> f64 {
        -self.negated.evaluate(x)
    }

    /// The convex function `−⌈K⌉`.
    pub fn negated(&self) -> &PolyhedralFn {
        &self.negated
    }
}

pub fn ceil_body(k: &EpigraphBody) -> CeilFn {
    let pts: Vec<(f64, f64)> = k.vertices().iter().map(|p| (p[0], -p[1])).collect();
    CeilFn {
        negated: canonicalize(&pts).expect("bodies have at least one vertex"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lift_of_indicator_is_flat() {
        let u = PolyhedralFn::indicator(-1.0, 1.0).unwrap();
        let k = lift_body(&u);
        assert_eq!(k.vertices().len(), 2);
        assert!(!k.has_interior());
        assert_eq!(floor_body(&k), u);
    }

    #[test]
    fn lift_of_v_shape_is_quadrilateral() {
        let u = canonicalize(&[(-1.0, 1.0), (0.0, 0.0), (1.0, 1.0)]).unwrap();
        let k = lift_body(&u);
        let mut v = k.vertices().to_vec();
        v.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        assert_eq!(v, vec![[-1.0, 1.0], [0.0, 0.0], [0.0, 2.0], [1.0, 1.0]]);
        assert_eq!(floor_body(&k), u);
    }

    #[test]
    fn floor_and_ceil_of_square() {
        let k = EpigraphBody::from_points(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let f = floor_body(&k);
        assert_eq!(f, PolyhedralFn::indicator(0.0, 1.0).unwrap());
        let c = ceil_body(&k);
        assert_eq!(c.evaluate(0.4), 1.0);
        assert_eq!(c.evaluate(1.4), f64::NEG_INFINITY);
        // ⌈K⌉ = −⌊R_H K⌋
        let r = floor_body(&k.reflect());
        for x in [0.0, 0.25, 1.0] {
            assert_eq!(c.evaluate(x), -r.evaluate(x));
        }
    }

    #[test]
    fn floor_of_triangle_reads_lower_edges() {
        let k = EpigraphBody::from_points(&[[0.0, 0.0], [1.0, 0.0], [0.5, 1.0]]).unwrap();
        let f = floor_body(&k);
        assert_eq!(f.generators(), vec![(0.0, 0.0), (1.0, 0.0)]);
        let c = ceil_body(&k);
        assert_eq!(c.evaluate(0.25), 0.5);
    }

    #[test]
    fn support_of_lift_is_conjugate() {
        let u = canonicalize(&[(-1.0, 0.5), (0.0, 0.0), (2.0, 1.0)]).unwrap();
        let k = lift_body(&u);
        let c = u.conjugate();
        for y in [-2.0, -0.3, 0.0, 0.4, 3.0] {
            assert!((k.support([y, -1.0]) - c.evaluate(y)).abs() < 1e-12);
        }
    }
}
