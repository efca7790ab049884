//! The atom grammar of scenario files and its translation to functions,
//! bodies and densities.

use serde::{Deserialize, Serialize};

use crate::convexfn::{canonicalize, Domain, EpigraphBody, GridFn, Plq, PolyhedralFn, Quad};
use crate::error::{Error, Result};
use crate::geometry::{Point2, Polygon};
use crate::transform::Perturbation;
use crate::wulff::SphericalFn;

/// A convex set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    Interval { lo: f64, hi: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Polygon { vertices: Vec<Point2> },
    Ball { center: Vec<f64>, radius: f64 },
}

impl SetSpec {
    pub fn dimension(&self) -> usize {
        match self {
            SetSpec::Interval { .. } => 1,
            SetSpec::Box { lo, .. } => lo.len(),
            SetSpec::Polygon { .. } => 2,
            SetSpec::Ball { center, .. } => center.len(),
        }
    }

    pub fn to_domain(&self) -> Result<Domain> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        match self {
            SetSpec::Interval { lo, hi } if lo < hi => Ok(Domain::Interval { lo: *lo, hi: *hi }),
            SetSpec::Interval { .. } => bad("interval needs lo < hi"),
            SetSpec::Box { lo, hi } => match (lo.as_slice(), hi.as_slice()) {
                ([a], [b]) if a < b => Ok(Domain::Interval { lo: *a, hi: *b }),
                ([a0, a1], [b0, b1]) if a0 < b0 && a1 < b1 => {
                    Ok(Domain::polygon(&Polygon::rect([*a0, *a1], [*b0, *b1])))
                }
                _ => bad("box needs lo < hi in one or two dimensions"),
            },
            SetSpec::Polygon { vertices } => {
                let p = Polygon::from_points(vertices);
                if p.area() <= 0.0 {
                    return bad("polygon has empty interior");
                }
                Ok(Domain::polygon(&p))
            }
            SetSpec::Ball { center, radius } if *radius > 0.0 => match center.as_slice() {
                [c] => Ok(Domain::Interval {
                    lo: c - radius,
                    hi: c + radius,
                }),
                [c0, c1] => Ok(Domain::Disk {
                    center: [*c0, *c1],
                    radius: *radius,
                }),
                _ => bad("ball needs one or two dimensions"),
            },
            SetSpec::Ball { .. } => bad("ball needs a positive radius"),
        }
    }

    /// The set as a planar polygon.
    pub fn to_body(&self) -> Result<EpigraphBody> {
        match self.to_domain()?.as_polygon() {
            Some(p) => Ok(EpigraphBody::from_polygon(p)),
            None => Err(Error::Config("expected a planar box or polygon".into())),
        }
    }
}

fn one() -> f64 {
    1.0
}

/// A convex function as a sum of atoms; at least one `indicator` (or a
/// `polyhedral` atom) must bound the domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "atom", rename_all = "snake_case", deny_unknown_fields)]
pub enum FnSpec {
    Indicator {
        set: SetSpec,
    },
    /// `a|x|² + b·x + c`.
    Quadratic {
        #[serde(default = "one")]
        a: f64,
        #[serde(default)]
        b: Vec<f64>,
        #[serde(default)]
        c: f64,
    },
    /// `max_i (slopes_i·x + intercepts_i)`.
    MaxAffine {
        slopes: Vec<Vec<f64>>,
        intercepts: Vec<f64>,
    },
    /// Lower convex envelope of the points `(x, value)` in one dimension,
    /// `+∞` outside their span.
    Polyhedral {
        points: Vec<(f64, f64)>,
    },
    Sum {
        terms: Vec<FnSpec>,
    },
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl FnSpec {
    pub fn indicator(set: SetSpec) -> Self {
        FnSpec::Indicator { set }
    }

    fn collect_sets<'a>(&'a self, out: &mut Vec<&'a SetSpec>) {
        match self {
            FnSpec::Indicator { set } => out.push(set),
            FnSpec::Sum { terms } => terms.iter().for_each(|t| t.collect_sets(out)),
            _ => {}
        }
    }

    fn polyhedral_span(&self) -> Option<(f64, f64)> {
        match self {
            FnSpec::Polyhedral { points } => {
                let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
                let hi = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
                Some((lo, hi))
            }
            FnSpec::Sum { terms } => terms
                .iter()
                .filter_map(|t| t.polyhedral_span())
                .reduce(|a, b| (a.0.max(b.0), a.1.min(b.1))),
            _ => None,
        }
    }

    /// Pointwise value, ignoring indicator atoms.
    fn eval_finite(&self, x: &[f64]) -> f64 {
        match self {
            FnSpec::Indicator { .. } => 0.0,
            FnSpec::Quadratic { a, b, c } => a * dot(x, x) + dot(b, x) + c,
            FnSpec::MaxAffine { slopes, intercepts } => slopes
                .iter()
                .zip(intercepts)
                .map(|(s, i)| dot(s, x) + i)
                .fold(f64::NEG_INFINITY, f64::max),
            FnSpec::Polyhedral { points } => canonicalize(points).map_or(f64::INFINITY, |p| p.evaluate(x[0])),
            FnSpec::Sum { terms } => terms.iter().map(|t| t.eval_finite(x)).sum(),
        }
    }

    /// Exact one-dimensional form.
    pub fn to_plq(&self) -> Result<Plq> {
        let whole = |q: Quad| Plq::new(vec![f64::NEG_INFINITY, f64::INFINITY], vec![q]);
        let one_d = |v: &[f64]| -> Result<f64> {
            match v {
                [] => Ok(0.0),
                [b] => Ok(*b),
                _ => Err(Error::Config("exact track is one-dimensional".into())),
            }
        };
        match self {
            FnSpec::Indicator { set } => match set.to_domain()? {
                Domain::Interval { lo, hi } => Plq::indicator(lo, hi),
                _ => Err(Error::Config("exact track is one-dimensional".into())),
            },
            FnSpec::Quadratic { a, b, c } => {
                if *a < 0.0 {
                    return Err(Error::Config("quadratic atom needs a >= 0".into()));
                }
                whole(Quad::new(*a, one_d(b)?, *c))
            }
            FnSpec::MaxAffine { slopes, intercepts } => {
                if slopes.len() != intercepts.len() {
                    return Err(Error::Config("slopes and intercepts differ in length".into()));
                }
                Perturbation::MaxAffine {
                    slopes: slopes.clone(),
                    intercepts: intercepts.clone(),
                }
                .to_plq()
            }
            FnSpec::Polyhedral { points } => Ok(Plq::from(&canonicalize(points)?)),
            FnSpec::Sum { terms } => {
                let mut acc = Plq::constant(0.0);
                for t in terms {
                    acc = acc
                        .add(&t.to_plq()?)
                        .ok_or_else(|| Error::Config("sum of atoms has empty domain".into()))?;
                }
                Ok(acc)
            }
        }
    }

    /// Exact form with a compact domain.
    pub fn to_compact_plq(&self) -> Result<Plq> {
        let p = self.to_plq()?;
        if !p.has_compact_domain() {
            return Err(Error::Config(
                "function needs a bounded domain (add an indicator atom)".into(),
            ));
        }
        Ok(p)
    }

    pub fn to_polyhedral(&self) -> Result<PolyhedralFn> {
        self.to_compact_plq()?
            .to_polyhedral()
            .ok_or_else(|| Error::Config("expected a polyhedral function".into()))
    }

    /// Samples on a grid with `nodes` intervals per axis over the bounding
    /// box of the domain.
    pub fn to_grid(&self, nodes: usize) -> Result<GridFn> {
        if nodes < 2 {
            return Err(Error::Config("grid needs at least 2 intervals per axis".into()));
        }
        let mut sets = Vec::new();
        self.collect_sets(&mut sets);
        let domain = match (sets.as_slice(), self.polyhedral_span()) {
            ([s], None) => s.to_domain()?,
            ([], Some((lo, hi))) if lo < hi => Domain::Interval { lo, hi },
            ([s], Some((lo, hi))) => match s.to_domain()? {
                Domain::Interval { lo: a, hi: b } if a.max(lo) < b.min(hi) => Domain::Interval {
                    lo: a.max(lo),
                    hi: b.min(hi),
                },
                _ => return Err(Error::Config("incompatible domains".into())),
            },
            _ => return Err(Error::Config("grid track needs exactly one indicator atom".into())),
        };
        let (lo, hi) = domain.bbox();
        let shape = vec![nodes + 1; lo.len()];
        GridFn::sample(|x| self.eval_finite(x), &lo, &hi, &shape, Some(domain))
    }
}

/// A function on the unit circle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SphSpec {
    Constant {
        value: f64,
    },
    /// Support function of the hull of `vertices`.
    Support {
        vertices: Vec<Point2>,
    },
    /// Support function of the scenario's body.
    BodySupport,
    /// `ν ↦ y·ν`.
    Linear {
        y: Point2,
    },
    Sum {
        terms: Vec<SphSpec>,
    },
}

impl SphSpec {
    pub fn build(&self, body: &EpigraphBody) -> SphericalFn {
        match self {
            SphSpec::Constant { value } => SphericalFn::Constant(*value),
            SphSpec::Support { vertices } => SphericalFn::Support(Polygon::from_points(vertices)),
            SphSpec::BodySupport => SphericalFn::Support(body.polygon().clone()),
            SphSpec::Linear { y } => SphericalFn::Linear(*y),
            SphSpec::Sum { terms } => SphericalFn::Sum(terms.iter().map(|t| t.build(body)).collect()),
        }
    }
}

/// Density `Ψ(x, z)` on the plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DensitySpec {
    #[default]
    One,
    /// `e^{−z}`.
    ExpHeight,
    /// `e^{−(x² + z²)/2}`.
    Gauss,
}

impl DensitySpec {
    pub fn eval(&self, p: Point2) -> f64 {
        match self {
            DensitySpec::One => 1.0,
            DensitySpec::ExpHeight => (-p[1]).exp(),
            DensitySpec::Gauss => (-0.5 * (p[0] * p[0] + p[1] * p[1])).exp(),
        }
    }
}
