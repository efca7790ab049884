//! Wulff shapes of functions on the circle, the spherical lift `ζ̄` of a
//! perturbation, and the functional Wulff construction of `u_t`.

use std::fmt;
use std::sync::Arc;

use crate::convexfn::{floor_body, lift_body_stretched, Domain, EpigraphBody, PolyhedralFn};
use crate::error::{Error, Result};
use crate::geometry::{dot, intersect_halfplanes, unit, Point2, Polygon};
use crate::transform::Perturbation;

pub const DEFAULT_DIRECTIONS_S1: usize = 4096;
pub const DEFAULT_DIRECTIONS_S2: usize = 16384;

/// `m` equally spaced unit vectors, starting at `e₁`.
pub fn directions_s1(m: usize) -> Vec<Point2> {
    (0..m)
        .map(|k| unit(2.0 * std::f64::consts::PI * k as f64 / m as f64))
        .collect()
}

/// `m` Fibonacci points on the unit sphere in `ℝ³`.
pub fn fibonacci_s2(m: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..m)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / m as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let a = golden * k as f64;
            [r * a.cos(), r * a.sin(), z]
        })
        .collect()
}

/// A continuous function on the unit circle.
#[derive(Clone)]
pub enum SphericalFn {
    Constant(f64),
    /// Support function of a polygon.
    Support(Polygon),
    /// `ν ↦ y·ν`, the support function of `{y}`.
    Linear(Point2),
    /// The lift `ζ̄` restricted to the circle (`n = 1`).
    ZetaBar(Perturbation),
    /// Values on `directions_s1(values.len())`, interpolated linearly in
    /// the angle.
    Samples(Vec<f64>),
    Scaled(f64, Box<SphericalFn>),
    Sum(Vec<SphericalFn>),
    Custom(Arc<dyn Fn(Point2) -> f64 + Send + Sync>),
}

impl fmt::Debug for SphericalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SphericalFn::Constant(c) => write!(f, "Constant({c})"),
            SphericalFn::Support(p) => write!(f, "Support({:?})", p.vertices()),
            SphericalFn::Linear(y) => write!(f, "Linear({y:?})"),
            SphericalFn::ZetaBar(z) => write!(f, "ZetaBar({z:?})"),
            SphericalFn::Samples(v) => write!(f, "Samples(len={})", v.len()),
            SphericalFn::Scaled(s, g) => write!(f, "Scaled({s}, {g:?})"),
            SphericalFn::Sum(v) => f.debug_tuple("Sum").field(v).finish(),
            SphericalFn::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl SphericalFn {
    pub fn custom<F: Fn(Point2) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        SphericalFn::Custom(Arc::new(f))
    }

    pub fn evaluate(&self, nu: Point2) -> f64 {
        match self {
            SphericalFn::Constant(c) => *c,
            SphericalFn::Support(p) => p.support(nu),
            SphericalFn::Linear(y) => dot(*y, nu),
            SphericalFn::ZetaBar(z) => zeta_bar(z, &nu),
            SphericalFn::Samples(v) => {
                let m = v.len();
                let a = nu[1].atan2(nu[0]).rem_euclid(2.0 * std::f64::consts::PI);
                let s = a * m as f64 / (2.0 * std::f64::consts::PI);
                let k = (s.floor() as usize) % m;
                let w = s - s.floor();
                (1.0 - w) * v[k] + w * v[(k + 1) % m]
            }
            SphericalFn::Scaled(s, g) => s * g.evaluate(nu),
            SphericalFn::Sum(v) => v.iter().map(|g| g.evaluate(nu)).sum(),
            SphericalFn::Custom(f) => f(nu),
        }
    }

    /// Largest jump between adjacent sample directions: a continuity
    /// witness.
    pub fn oscillation(&self, m: usize) -> f64 {
        let d = directions_s1(m);
        let v: Vec<f64> = d.iter().map(|&n| self.evaluate(n)).collect();
        (0..m).map(|k| (v[(k + 1) % m] - v[k]).abs()).fold(0.0, f64::max)
    }
}

/// Intersection of `{x : x·ν ≤ f(ν)}` over `m` uniform directions;
/// `None` when empty.
pub fn wulff_shape(f: &SphericalFn, m: usize) -> Option<EpigraphBody> {
    assert!(m >= 3, "need at least three directions");
    let dirs = directions_s1(m);
    let offsets: Vec<f64> = dirs.iter().map(|&n| f.evaluate(n)).collect();
    intersect_halfplanes(&dirs, &offsets).map(EpigraphBody::from_polygon)
}

/// `F_t K = [h_K + t f]`.
pub fn wulff_flow(k: &EpigraphBody, f: &SphericalFn, t: f64, m: usize) -> Option<EpigraphBody> {
    let g = SphericalFn::Sum(vec![
        SphericalFn::Support(k.polygon().clone()),
        SphericalFn::Scaled(t, Box::new(f.clone())),
    ]);
    wulff_shape(&g, m)
}

/// Gnomonic projection of a lower-hemisphere direction to the horizontal
/// hyperplane, normalised so that the downward normal `(p, −1)/√(1+|p|²)`
/// of a graph maps to its gradient `p`.
pub fn gnomonic(nu: &[f64]) -> Vec<f64> {
    let n = nu.len() - 1;
    let s = nu[n].abs();
    nu[..n].iter().map(|v| v / s).collect()
}

/// `ζ̄(ν) = |ν_{n+1}| ζ(g(ν))` off the equator, `ρ_ζ(ν_H)` on it; even in
/// the last coordinate.
pub fn zeta_bar(zeta: &Perturbation, nu: &[f64]) -> f64 {
    let n = nu.len() - 1;
    let s = nu[n].abs();
    if s == 0.0 {
        return zeta.recession(&nu[..n]);
    }
    s * zeta.evaluate(&gnomonic(nu))
}

/// Distance from `x` to the complement of the domain (negative outside).
pub fn domain_depth(d: &Domain, x: &[f64]) -> f64 {
    match d {
        Domain::Interval { lo, hi } => (x[0] - lo).min(hi - x[0]),
        Domain::Polygon { vertices } => Polygon::from_ccw_unchecked(vertices.clone())
            .edges()
            .iter()
            .map(|e| dot(e.normal, e.a) - dot(e.normal, [x[0], x[1]]))
            .fold(f64::INFINITY, f64::min),
        Domain::Disk { center, radius } => radius - (x[0] - center[0]).hypot(x[1] - center[1]),
    }
}

/// `[h_D + tρ_ζ]`: the domain of `u_t` when `D = dom(u)`.
pub fn evolve_domain(d: &Domain, zeta: &Perturbation, t: f64, m: usize) -> Result<Domain> {
    match d {
        Domain::Interval { lo, hi } => {
            let a = lo - t * zeta.recession(&[-1.0]);
            let b = hi + t * zeta.recession(&[1.0]);
            if a > b {
                return Err(Error::DomainCollapsed);
            }
            Ok(Domain::Interval { lo: a, hi: b })
        }
        Domain::Disk { center, radius } if zeta.radial_recession(2).is_some() => {
            let c = zeta.radial_recession(2).unwrap();
            let r = radius + t * c;
            if r <= 0.0 {
                return Err(Error::DomainCollapsed);
            }
            Ok(Domain::Disk {
                center: *center,
                radius: r,
            })
        }
        _ => {
            let poly = match d {
                Domain::Polygon { vertices } => Some(Polygon::from_ccw_unchecked(vertices.clone())),
                _ => None,
            };
            let mut dirs = directions_s1(m);
            if let Some(p) = &poly {
                dirs.extend(p.edges().iter().map(|e| e.normal));
            }
            let offsets: Vec<f64> = dirs.iter().map(|&n| d.support(&n) + t * zeta.recession(&n)).collect();
            let w = intersect_halfplanes(&dirs, &offsets).ok_or(Error::DomainCollapsed)?;
            if w.area() <= 0.0 {
                return Err(Error::DomainCollapsed);
            }
            Ok(Domain::polygon(&w))
        }
    }
}

/// `dom(u_t) = [h_dom(u) + tρ_ζ]` for a polyhedral `u`.
pub fn domain_evolution(u: &PolyhedralFn, zeta: &Perturbation, t: f64) -> Result<(f64, f64)> {
    let (lo, hi) = u.domain();
    match evolve_domain(&Domain::Interval { lo, hi }, zeta, t, 0)? {
        Domain::Interval { lo, hi } => Ok((lo, hi)),
        _ => unreachable!(),
    }
}

/// Lift height `T = (max u − min u) + ε·sup|ζ̄| + 1`, with the supremum
/// taken over `m` sample directions.
pub fn default_lift_height(u: &PolyhedralFn, zeta: &Perturbation, epsilon: f64, m: usize) -> f64 {
    let sup = directions_s1(m)
        .iter()
        .map(|&n| zeta_bar(zeta, &n).abs())
        .fold(0.0, f64::max);
    (u.max_value() - u.min_value()) + epsilon.abs() * sup + 1.0
}

/// `u_t = ⌊[h_{K^u + ℓ_T} + t ζ̄]⌋`, the Wulff-shape route to the
/// perturbation. `T = None` picks [`default_lift_height`] with `ε = |t|`.
///
/// The floor is recomputed with a taller lift; disagreement means `T` was
/// too small and is reported as [`Error::LiftTooSmall`].
pub fn functional_wulff(
    u: &PolyhedralFn,
    zeta: &Perturbation,
    t: f64,
    t_lift: Option<f64>,
    m: usize,
) -> Result<PolyhedralFn> {
    let tl = t_lift.unwrap_or_else(|| default_lift_height(u, zeta, t, m));
    let floor_at = |h: f64| -> Result<PolyhedralFn> {
        let k = lift_body_stretched(u, h);
        let f = SphericalFn::Sum(vec![
            SphericalFn::Support(k.polygon().clone()),
            SphericalFn::Scaled(t, Box::new(SphericalFn::ZetaBar(zeta.clone()))),
        ]);
        let w = wulff_shape(&f, m).ok_or(Error::DomainCollapsed)?;
        Ok(floor_body(&w))
    };
    let low = floor_at(tl)?;
    let high = floor_at(2.0 * tl + 1.0)?;
    let (a0, a1) = low.domain();
    let (b0, b1) = high.domain();
    let scale = 1.0 + u.max_value().abs() + tl;
    let mut gap = (a0 - b0).abs().max((a1 - b1).abs());
    for &x in low.breakpoints().iter().chain(high.breakpoints()) {
        let (p, q) = (low.evaluate(x), high.evaluate(x));
        if p.is_finite() && q.is_finite() {
            gap = gap.max((p - q).abs());
        }
    }
    if gap > 1e-9 * scale {
        return Err(Error::LiftTooSmall { t_lift: tl, gap });
    }
    Ok(low)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wulff_of_square_support() {
        let sq = Polygon::rect([0.0, 0.0], [1.0, 1.0]);
        let w = wulff_shape(&SphericalFn::Support(sq.clone()), 64).unwrap();
        assert!(w.polygon().hausdorff(&sq) < 1e-12);
        let shifted = SphericalFn::Sum(vec![SphericalFn::Support(sq.clone()), SphericalFn::Linear([1.0, 0.0])]);
        let w2 = wulff_shape(&shifted, 64).unwrap();
        assert!(w2.polygon().hausdorff(&sq.translate([1.0, 0.0])) < 1e-12);
    }

    #[test]
    fn wulff_of_constant_is_disk() {
        let w = wulff_shape(&SphericalFn::Constant(1.0), 4096).unwrap();
        assert!((w.area() - std::f64::consts::PI).abs() < 1e-5);
        assert!(wulff_shape(&SphericalFn::Constant(-1.0), 64).is_none());
    }

    #[test]
    fn zeta_bar_special_directions() {
        let z = Perturbation::SoftNorm { coeff: 1.0 };
        assert_eq!(zeta_bar(&z, &[0.0, -1.0]), 1.0);
        assert_eq!(zeta_bar(&z, &[1.0, 0.0]), 1.0);
        let p = 0.7f64;
        let s = (1.0 + p * p).sqrt();
        let nu = [p / s, -1.0 / s];
        assert!((zeta_bar(&z, &nu) * s - z.evaluate(&[p])).abs() < 1e-14);
        assert!((zeta_bar(&z, &nu) - zeta_bar(&z, &[p / s, 1.0 / s])).abs() == 0.0);
    }

    #[test]
    fn domain_evolution_examples() {
        let u = PolyhedralFn::indicator(-1.0, 1.0).unwrap();
        let (a, b) = domain_evolution(&u, &Perturbation::norm(1.0), 0.3).unwrap();
        assert!((a + 1.3).abs() < 1e-15 && (b - 1.3).abs() < 1e-15);
        assert_eq!(
            domain_evolution(&u, &Perturbation::constant(1.0), 0.7).unwrap(),
            (-1.0, 1.0)
        );
        assert!(matches!(
            domain_evolution(&u, &Perturbation::norm(1.0), -1.5),
            Err(Error::DomainCollapsed)
        ));
    }

    #[test]
    fn functional_wulff_of_indicator() {
        let u = PolyhedralFn::indicator(-1.0, 1.0).unwrap();
        let ut = functional_wulff(&u, &Perturbation::norm(1.0), 0.2, None, 4096).unwrap();
        let (a, b) = ut.domain();
        assert!((a + 1.2).abs() < 1e-9 && (b - 1.2).abs() < 1e-9);
        assert!(ut.max_value().abs() < 1e-9);
        let u0 = functional_wulff(&u, &Perturbation::norm(1.0), 0.0, None, 4096).unwrap();
        let (a, b) = u0.domain();
        assert!((a + 1.0).abs() < 1e-12 && (b - 1.0).abs() < 1e-12);
    }
}
