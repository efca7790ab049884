//! Weighted epigraph measures and the two terms of the first-variation
//! formula on the exact one-dimensional track.

use super::weight::{Carrier, DiscreteMeasure, WeightSpec};
use crate::convexfn::{Plq, PolyhedralFn, Quad};
use crate::error::{Error, Result};
use crate::quadrature::{abs_power, adaptive, pairwise_sum, Estimate};
use crate::transform::Perturbation;

const REL: f64 = 1e-13;
const ABS: f64 = 1e-300;

/// Which density a boundary measure carries: `φ(u)` (the push-forward
/// `S_u`) or `Φ(u)` (the boundary term of the variation formula).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryDensity {
    Phi,
    Tail,
}

/// Integrals of a function against a [`WeightSpec`].
pub trait WeightedFunction {
    fn dimension(&self) -> usize;

    /// `μ(u) = ∫_{dom u} Φ(u) ψ |x|^{q−n} dx`.
    fn epigraph_measure(&self, w: &WeightSpec) -> Result<Estimate>;

    /// `∫_{dom u} ζ(∇u) φ(u) ψ |x|^{q−n} dx`.
    fn bulk_integral(&self, zeta: &Perturbation, w: &WeightSpec) -> Result<Estimate>;

    /// `∫_{∂dom u} ρ_ζ(N) Φ(u) ψ |y|^{q−n} dH^{n−1}`.
    fn boundary_integral(&self, zeta: &Perturbation, w: &WeightSpec) -> Result<Estimate>;

    /// Push-forward of `φ(u) ψ |x|^{q−n} dx` under `∇u`, binned with
    /// `bins` bins per axis; each nonempty bin becomes an atom at its
    /// barycenter.
    fn moment_measure(&self, w: &WeightSpec, bins: usize) -> Result<DiscreteMeasure>;

    /// Push-forward of the boundary density under the Gauss map of the
    /// domain.
    fn surface_measure(&self, w: &WeightSpec, density: BoundaryDensity) -> Result<DiscreteMeasure>;

    /// Whether the origin is an interior point of the domain.
    fn origin_interior(&self) -> bool;
}

pub fn epigraph_measure<U: WeightedFunction + ?Sized>(u: &U, w: &WeightSpec) -> Result<Estimate> {
    u.epigraph_measure(w)
}

pub fn bulk_integral<U: WeightedFunction + ?Sized>(u: &U, zeta: &Perturbation, w: &WeightSpec) -> Result<Estimate> {
    u.bulk_integral(zeta, w)
}

pub fn boundary_integral<U: WeightedFunction + ?Sized>(u: &U, zeta: &Perturbation, w: &WeightSpec) -> Result<Estimate> {
    u.boundary_integral(zeta, w)
}

pub fn moment_measure<U: WeightedFunction + ?Sized>(u: &U, w: &WeightSpec, bins: usize) -> Result<DiscreteMeasure> {
    u.moment_measure(w, bins)
}

pub fn surface_measure_fn<U: WeightedFunction + ?Sized>(
    u: &U,
    w: &WeightSpec,
    density: BoundaryDensity,
) -> Result<DiscreteMeasure> {
    u.surface_measure(w, density)
}

/// Default number of moment-measure bins per axis.
pub const DEFAULT_BINS: usize = 256;

/// `∫_l^r e^{−q(x)} dx` in closed form, when that is numerically safe.
fn exp_piece(l: f64, r: f64, q: &Quad) -> Option<f64> {
    if r <= l {
        return Some(0.0);
    }
    if q.a == 0.0 {
        if q.b == 0.0 {
            return Some((-q.c).exp() * (r - l));
        }
        let ul = q.eval(l);
        return Some((-ul).exp() * -(-q.b * (r - l)).exp_m1() / q.b);
    }
    if q.a < 0.0 {
        return None;
    }
    let m = -q.b / (2.0 * q.a);
    let k = q.c - q.b * q.b / (4.0 * q.a);
    let s = q.a.sqrt();
    let (al, be) = (s * (l - m), s * (r - m));
    let half_sqrt_pi = 0.5 * std::f64::consts::PI.sqrt();
    let diff = if al >= 0.0 {
        if al > 5.0 {
            return None;
        }
        libm::erfc(al) - libm::erfc(be)
    } else if be <= 0.0 {
        if be < -5.0 {
            return None;
        }
        libm::erfc(-be) - libm::erfc(-al)
    } else {
        libm::erf(be) - libm::erf(al)
    };
    let v = (-k).exp() * half_sqrt_pi / s * diff;
    v.is_finite().then_some(v)
}

fn integrate_piece<F: Fn(f64) -> f64>(f: &F, l: f64, r: f64, w: &WeightSpec) -> Estimate {
    match w.singular_q(1) {
        Some(q) => abs_power(f, l, r, q, REL, ABS),
        None => adaptive(f, l, r, REL, ABS),
    }
}

fn sum_estimates(v: &[Estimate]) -> Estimate {
    let vals: Vec<f64> = v.iter().map(|e| e.value).collect();
    Estimate {
        value: pairwise_sum(&vals),
        error: v.iter().map(|e| e.error).sum(),
    }
}

fn compact(u: &Plq) -> Result<(f64, f64)> {
    if !u.has_compact_domain() {
        return Err(Error::UnboundedDomain(
            "weighted integrals need a compact domain".into(),
        ));
    }
    Ok(u.domain())
}

/// Sorted cut points of `[l, r]` where `q'` meets one of `kinks`.
fn gradient_cuts(l: f64, r: f64, q: &Quad, kinks: &[f64]) -> Vec<f64> {
    let mut cuts = vec![l, r];
    if q.a != 0.0 {
        for &y in kinks {
            let x = (y - q.b) / (2.0 * q.a);
            if x > l && x < r {
                cuts.push(x);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts
}

impl WeightedFunction for Plq {
    fn dimension(&self) -> usize {
        1
    }

    fn epigraph_measure(&self, w: &WeightSpec) -> Result<Estimate> {
        compact(self)?;
        let parts: Vec<Estimate> = self
            .segments()
            .map(|(l, r, q)| {
                if w.is_plain_exp(1) {
                    if let Some(v) = exp_piece(l, r, &q) {
                        return Estimate { value: v, error: 0.0 };
                    }
                }
                let f = |x: f64| w.tail(q.eval(x)) * w.psi(&[x]);
                integrate_piece(&f, l, r, w)
            })
            .collect();
        Ok(sum_estimates(&parts))
    }

    fn bulk_integral(&self, zeta: &Perturbation, w: &WeightSpec) -> Result<Estimate> {
        compact(self)?;
        let kinks = zeta.kinks_1d();
        let mut parts = Vec::new();
        for (l, r, q) in self.segments() {
            if q.a == 0.0 && w.is_plain_exp(1) {
                if let Some(v) = exp_piece(l, r, &q) {
                    parts.push(Estimate {
                        value: zeta.evaluate(&[q.b]) * v,
                        error: 0.0,
                    });
                    continue;
                }
            }
            let f = |x: f64| zeta.evaluate(&[q.deriv(x)]) * w.phi(q.eval(x)) * w.psi(&[x]);
            for c in gradient_cuts(l, r, &q, &kinks).windows(2) {
                parts.push(integrate_piece(&f, c[0], c[1], w));
            }
        }
        Ok(sum_estimates(&parts))
    }

    fn boundary_integral(&self, zeta: &Perturbation, w: &WeightSpec) -> Result<Estimate> {
        let (a, b) = compact(self)?;
        if w.singular_q(1).is_some_and(|q| q < 1.0) && (a == 0.0 || b == 0.0) {
            return Err(Error::SingularBoundary);
        }
        let term = |y: f64, nu: f64| {
            let rho = zeta.recession(&[nu]);
            if rho == 0.0 {
                return 0.0;
            }
            rho * w.tail(self.evaluate(y)) * w.psi(&[y]) * w.radial(&[y])
        };
        Ok(Estimate {
            value: term(a, -1.0) + term(b, 1.0),
            error: 0.0,
        })
    }

    fn moment_measure(&self, w: &WeightSpec, bins: usize) -> Result<DiscreteMeasure> {
        compact(self)?;
        let bins = bins.max(1);
        let density = |x: f64, q: &Quad| w.phi(q.eval(x)) * w.psi(&[x]);
        let mut atoms: Vec<(Vec<f64>, f64)> = Vec::new();
        // gradient range over the curved pieces
        let (mut gmin, mut gmax) = (f64::INFINITY, f64::NEG_INFINITY);
        for (l, r, q) in self.segments() {
            if q.a != 0.0 && r > l {
                for g in [q.deriv(l), q.deriv(r)] {
                    gmin = gmin.min(g);
                    gmax = gmax.max(g);
                }
            }
        }
        let width = if gmax > gmin { (gmax - gmin) / bins as f64 } else { 1.0 };
        let mut mass = vec![0.0; bins];
        let mut moment = vec![0.0; bins];
        for (l, r, q) in self.segments() {
            if r <= l {
                continue;
            }
            if q.a == 0.0 {
                let f = |x: f64| density(x, &q);
                let m = match exp_piece(l, r, &q).filter(|_| w.is_plain_exp(1)) {
                    Some(v) => v,
                    None => integrate_piece(&f, l, r, w).value,
                };
                match atoms.iter_mut().find(|a| a.0[0] == q.b) {
                    Some(a) => a.1 += m,
                    None => atoms.push((vec![q.b], m)),
                }
                continue;
            }
            let edges: Vec<f64> = (1..bins).map(|k| gmin + k as f64 * width).collect();
            let cuts = gradient_cuts(l, r, &q, &edges);
            for c in cuts.windows(2) {
                let f = |x: f64| density(x, &q);
                let g = |x: f64| q.deriv(x) * density(x, &q);
                let m = integrate_piece(&f, c[0], c[1], w).value;
                let mo = integrate_piece(&g, c[0], c[1], w).value;
                let mid = q.deriv(0.5 * (c[0] + c[1]));
                let k = (((mid - gmin) / width).floor().max(0.0) as usize).min(bins - 1);
                mass[k] += m;
                moment[k] += mo;
            }
        }
        for k in 0..bins {
            if mass[k] > 0.0 {
                atoms.push((vec![moment[k] / mass[k]], mass[k]));
            }
        }
        atoms.sort_by(|a, b| a.0[0].total_cmp(&b.0[0]));
        DiscreteMeasure::new(Carrier::Euclidean(1), atoms)
    }

    fn surface_measure(&self, w: &WeightSpec, density: BoundaryDensity) -> Result<DiscreteMeasure> {
        let (a, b) = compact(self)?;
        let dens = |y: f64| {
            let v = self.evaluate(y);
            let h = match density {
                BoundaryDensity::Phi => w.phi(v),
                BoundaryDensity::Tail => w.tail(v),
            };
            h * w.psi(&[y]) * w.radial(&[y])
        };
        let (da, db) = (dens(a), dens(b));
        if !da.is_finite() || !db.is_finite() {
            return Err(Error::SingularBoundary);
        }
        DiscreteMeasure::new(Carrier::Sphere(0), vec![(vec![-1.0], da), (vec![1.0], db)])
    }

    fn origin_interior(&self) -> bool {
        let (a, b) = self.domain();
        a < 0.0 && 0.0 < b
    }
}

impl WeightedFunction for PolyhedralFn {
    fn dimension(&self) -> usize {
        1
    }

    fn epigraph_measure(&self, w: &WeightSpec) -> Result<Estimate> {
        Plq::from(self).epigraph_measure(w)
    }

    fn bulk_integral(&self, zeta: &Perturbation, w: &WeightSpec) -> Result<Estimate> {
        Plq::from(self).bulk_integral(zeta, w)
    }

    fn boundary_integral(&self, zeta: &Perturbation, w: &WeightSpec) -> Result<Estimate> {
        Plq::from(self).boundary_integral(zeta, w)
    }

    fn moment_measure(&self, w: &WeightSpec, bins: usize) -> Result<DiscreteMeasure> {
        Plq::from(self).moment_measure(w, bins)
    }

    fn surface_measure(&self, w: &WeightSpec, density: BoundaryDensity) -> Result<DiscreteMeasure> {
        Plq::from(self).surface_measure(w, density)
    }

    fn origin_interior(&self) -> bool {
        let (a, b) = self.domain();
        a < 0.0 && 0.0 < b
    }
}
