//! Surface-area measures of planar bodies, weighted body measures and two
//! integrability checks.

use serde::Serialize;

use super::weight::{Carrier, DiscreteMeasure};
use crate::convexfn::{EpigraphBody, GridFn};
use crate::error::{Error, Result};
use crate::geometry::{norm, sub, Point2};
use crate::quadrature::{abs_power, adaptive, polygon_integral, Estimate};

/// Density `Ψ(x, z)` on the plane.
pub type Density<'a> = &'a (dyn Fn(Point2) -> f64 + Sync);

fn check_body(k: &EpigraphBody) -> Result<()> {
    if !k.has_interior() {
        return Err(Error::DegenerateBody("body has empty interior".into()));
    }
    Ok(())
}

/// `S_K`: one atom per facet at its outer normal, weighted by its length.
pub fn surface_area_measure(k: &EpigraphBody) -> Result<DiscreteMeasure> {
    check_body(k)?;
    let atoms = k.facets().iter().map(|e| (e.normal.to_vec(), e.length)).collect();
    DiscreteMeasure::new(Carrier::Sphere(1), atoms)
}

/// `∫_{[a,b]} Ψ(X) |x|^{q−1} dH¹(X)`, where `x` is the first coordinate;
/// `q = None` drops the radial factor.
pub fn edge_integral(a: Point2, b: Point2, psi: Density<'_>, q: Option<f64>) -> Result<Estimate> {
    let len = norm(sub(b, a));
    if len == 0.0 {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let q = q.filter(|&q| (q - 1.0).abs() > 1e-15);
    let at = |s: f64| [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
    match q {
        None => {
            let f = |s: f64| psi(at(s));
            let e = adaptive(&f, 0.0, 1.0, 1e-13, 1e-300);
            Ok(Estimate {
                value: len * e.value,
                error: len * e.error,
            })
        }
        Some(q) => {
            let dx = b[0] - a[0];
            if dx.abs() <= 1e-15 * len {
                let x = a[0].abs();
                if x == 0.0 && q < 1.0 {
                    return Err(Error::NonIntegrable("vertical facet on the singular axis".into()));
                }
                let f = |s: f64| psi(at(s));
                let e = adaptive(&f, 0.0, 1.0, 1e-13, 1e-300);
                let c = x.powf(q - 1.0) * len;
                return Ok(Estimate {
                    value: c * e.value,
                    error: c * e.error,
                });
            }
            // integrate in x so the factor |x|^{q−1} is handled by the
            // radial substitution
            let (lo, hi) = if dx > 0.0 { (a[0], b[0]) } else { (b[0], a[0]) };
            let stretch = len / dx.abs();
            let f = |x: f64| psi(at((x - a[0]) / dx));
            let e = abs_power(&f, lo, hi, q, 1e-12, 1e-300);
            Ok(Estimate {
                value: stretch * e.value,
                error: stretch * e.error,
            })
        }
    }
}

/// `S_{μ,K}`: per-facet atoms weighted by `∫_F Ψ |x|^{q−1} dH¹`.
///
/// With `q < 1` the origin must project into the interior of the shadow
/// of `K` on the horizontal axis.
pub fn weighted_surface_area_measure(k: &EpigraphBody, psi: Density<'_>, q: Option<f64>) -> Result<DiscreteMeasure> {
    check_body(k)?;
    if let Some(q) = q {
        if !(q > 0.0) {
            return Err(Error::InvalidArgument(format!("q must be positive, got {q}")));
        }
        if q < 1.0 {
            let (lo, hi) = k.polygon().bbox();
            if !(lo[0] < 0.0 && 0.0 < hi[0]) {
                return Err(Error::SingularityHypothesis);
            }
        }
    }
    let atoms = k
        .facets()
        .iter()
        .map(|e| Ok((e.normal.to_vec(), edge_integral(e.a, e.b, psi, q)?.value)))
        .collect::<Result<Vec<_>>>()?;
    DiscreteMeasure::new(Carrier::Sphere(1), atoms)
}

/// `μ(K) = ∫_K Ψ(X) |x|^{q−1} dX`.
pub fn body_measure(k: &EpigraphBody, psi: Density<'_>, q: Option<f64>) -> f64 {
    polygon_integral(k.polygon(), &|x: f64, z: f64| psi([x, z]), q)
}

/// Midpoint-rule value of `∫_{S^n} |pr_H ν|^{q−n} dν` with `m` angular
/// nodes, `n ∈ {1, 2}`.
pub fn funny_integral(n: usize, q: f64, m: usize) -> Result<f64> {
    let pi = std::f64::consts::PI;
    match n {
        1 => {
            let h = 2.0 * pi / m as f64;
            Ok((0..m)
                .map(|k| ((k as f64 + 0.5) * h).cos().abs().powf(q - 1.0) * h)
                .sum())
        }
        2 => {
            // polar angle from the vertical; the azimuth integrates to 2π
            let h = pi / m as f64;
            Ok(2.0
                * pi
                * (0..m)
                    .map(|k| ((k as f64 + 0.5) * h).sin().powf(q - 1.0) * h)
                    .sum::<f64>())
        }
        _ => Err(Error::DimensionMismatch { expected: 2, got: n }),
    }
}

/// Closed form `|S^{n−1}|·B(q/2, 1/2)` of [`funny_integral`].
pub fn funny_integral_exact(n: usize, q: f64) -> f64 {
    let beta = libm::tgamma(0.5 * q) * std::f64::consts::PI.sqrt() / libm::tgamma(0.5 * q + 0.5);
    match n {
        1 => 2.0 * beta,
        _ => 2.0 * std::f64::consts::PI * beta,
    }
}

/// Constants with `e^{−u(x)} ≤ A e^{−c|x|}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExpCertificate {
    pub a: f64,
    pub c: f64,
}

impl ExpCertificate {
    /// Fits `c` as half the least-squares slope of `u` against `|x|` (at
    /// least `1e-3`), then takes the smallest valid `A`.
    pub fn fit(points: &[Vec<f64>], values: &[f64]) -> Result<Self> {
        let pairs: Vec<(f64, f64)> = points
            .iter()
            .zip(values)
            .filter(|(_, v)| v.is_finite())
            .map(|(x, v)| (x.iter().map(|c| c * c).sum::<f64>().sqrt(), *v))
            .collect();
        if pairs.is_empty() {
            return Err(Error::EmptyGenerators);
        }
        let n = pairs.len() as f64;
        let mr = pairs.iter().map(|p| p.0).sum::<f64>() / n;
        let mv = pairs.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pairs.iter().map(|p| (p.0 - mr).powi(2)).sum();
        let sxy: f64 = pairs.iter().map(|p| (p.0 - mr) * (p.1 - mv)).sum();
        let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
        let c = (0.5 * slope).max(1e-3);
        let log_a = pairs.iter().map(|&(r, v)| -v + c * r).fold(f64::NEG_INFINITY, f64::max);
        Ok(ExpCertificate {
            a: log_a.exp() * (1.0 + 1e-12),
            c,
        })
    }

    pub fn for_grid(u: &GridFn) -> Result<Self> {
        let pts: Vec<Vec<f64>> = (0..u.len()).map(|i| u.node(i)).collect();
        Self::fit(&pts, u.values())
    }

    pub fn holds(&self, points: &[Vec<f64>], values: &[f64]) -> bool {
        points.iter().zip(values).all(|(x, &v)| {
            let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
            (-v).exp() <= self.a * (-self.c * r).exp()
        })
    }
}
