//! Weighted integrals of grid functions.
//!
//! In two dimensions the domain is cut along the grid: cells inside it use
//! a tensor Gauss–Legendre rule on the bilinear interpolant, cells crossing
//! its boundary are clipped and integrated over a fan of triangles. With a
//! singular radial factor and the origin in the domain the integral is
//! taken in polar coordinates instead.

use rayon::prelude::*;

use super::functional::{BoundaryDensity, WeightedFunction};
use super::weight::{Carrier, DiscreteMeasure, WeightSpec};
use crate::convexfn::{Domain, GridFn};
use crate::error::{Error, Result};
use crate::geometry::{dot, norm, sub, unit, Chains, Point2, Polygon};
use crate::quadrature::{abs_power, adaptive, gauss_legendre, gl8, pairwise_sum, radial, Estimate};
use crate::transform::Perturbation;

/// Vertex count used when a disk domain has to be cut into cells.
const DISK_SIDES: usize = 2048;
const COLUMN_BLOCK: usize = 64;

/// A quadrature node with the interpolated value and gradient there.
#[derive(Clone, Copy, Debug)]
struct Node {
    x: Point2,
    w: f64,
    u: f64,
    g: Point2,
}

fn unit_rule(n: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    x.iter().zip(&w).map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect()
}

/// Polygon with the same area as the disk.
fn disk_polygon(center: Point2, radius: f64) -> Polygon {
    let m = DISK_SIDES as f64;
    let area = 0.5 * m * (2.0 * std::f64::consts::PI / m).sin();
    Polygon::regular(center, radius * (std::f64::consts::PI / area).sqrt(), DISK_SIDES)
}

fn domain_of(u: &GridFn) -> Domain {
    u.domain().cloned().unwrap_or_else(|| u.effective_domain())
}

struct Planar<'a> {
    u: &'a GridFn,
    xs: Vec<f64>,
    ys: Vec<f64>,
    poly: Polygon,
    chains: Chains,
    grads: Vec<Vec<f64>>,
    rule: Vec<(f64, f64)>,
}

impl<'a> Planar<'a> {
    fn new(u: &'a GridFn, dom: &Domain) -> Result<Self> {
        let poly = match dom {
            Domain::Disk { center, radius } => disk_polygon(*center, *radius),
            Domain::Polygon { vertices } => Polygon::from_ccw_unchecked(vertices.clone()),
            Domain::Interval { .. } => {
                return Err(Error::DimensionMismatch { expected: 2, got: 1 });
            }
        };
        let chains = poly
            .chains()
            .ok_or_else(|| Error::DegenerateBody("domain has empty interior".into()))?;
        Ok(Planar {
            u,
            xs: u.axis_coords(0),
            ys: u.axis_coords(1),
            poly,
            chains,
            grads: u.node_gradients(),
            rule: unit_rule(4),
        })
    }

    /// Value and gradient of the interpolant in cell `(i, j)`.
    fn at(&self, i: usize, j: usize, x: Point2) -> (f64, Point2) {
        let ny = self.ys.len();
        let s = (x[0] - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        let r = (x[1] - self.ys[j]) / (self.ys[j + 1] - self.ys[j]);
        let w = [(1.0 - s) * (1.0 - r), (1.0 - s) * r, s * (1.0 - r), s * r];
        let idx = [i * ny + j, i * ny + j + 1, (i + 1) * ny + j, (i + 1) * ny + j + 1];
        let f = self.u.filled_values();
        let mix = |v: &[f64]| (0..4).map(|k| w[k] * v[idx[k]]).sum::<f64>();
        (mix(f), [mix(&self.grads[0]), mix(&self.grads[1])])
    }

    /// Range of a convex (lower) or concave (upper) chain over `[a, b]`.
    fn chain_range(&self, chain: &[Point2], a: f64, b: f64, lower: bool) -> (f64, f64) {
        let at = |x: f64| {
            if lower {
                self.chains.lower_at(x)
            } else {
                self.chains.upper_at(x)
            }
        };
        let mut lo = at(a).min(at(b));
        let mut hi = at(a).max(at(b));
        for p in chain {
            if p[0] > a && p[0] < b {
                lo = lo.min(p[1]);
                hi = hi.max(p[1]);
            }
        }
        (lo, hi)
    }

    fn visit_column<V: FnMut(&Node)>(&self, i: usize, visit: &mut V) {
        let (xa, xb) = (self.xs[i], self.xs[i + 1]);
        let (x0, x1) = self.chains.x_range();
        if xb <= x0 || xa >= x1 {
            return;
        }
        let inside_x = xa >= x0 && xb <= x1;
        let (lo_min, lo_max) = self.chain_range(&self.chains.lower, xa.max(x0), xb.min(x1), true);
        let (up_min, up_max) = self.chain_range(&self.chains.upper, xa.max(x0), xb.min(x1), false);
        for j in 0..self.ys.len() - 1 {
            let (ya, yb) = (self.ys[j], self.ys[j + 1]);
            if yb <= lo_min || ya >= up_max {
                continue;
            }
            if inside_x && ya >= lo_max && yb <= up_min {
                let area = (xb - xa) * (yb - ya);
                for &(s, ws) in &self.rule {
                    for &(r, wr) in &self.rule {
                        let x = [xa + s * (xb - xa), ya + r * (yb - ya)];
                        let (u, g) = self.at(i, j, x);
                        visit(&Node {
                            x,
                            w: ws * wr * area,
                            u,
                            g,
                        });
                    }
                }
                continue;
            }
            let mut cell = Polygon::rect([xa, ya], [xb, yb]);
            for e in self.poly.edges() {
                cell = cell.clip(e.normal, dot(e.normal, e.a));
                if cell.len() < 3 {
                    break;
                }
            }
            let v = cell.vertices();
            if v.len() < 3 {
                continue;
            }
            for k in 1..v.len() - 1 {
                let (a, b, c) = (v[0], v[k], v[k + 1]);
                let ab = sub(b, a);
                let bc = sub(c, b);
                let jac = (ab[0] * bc[1] - ab[1] * bc[0]).abs();
                for &(xi, wx) in &self.rule {
                    for &(eta, we) in &self.rule {
                        let x = [
                            a[0] + xi * ab[0] + xi * eta * bc[0],
                            a[1] + xi * ab[1] + xi * eta * bc[1],
                        ];
                        let (u, g) = self.at(i, j, x);
                        visit(&Node {
                            x,
                            w: wx * we * xi * jac,
                            u,
                            g,
                        });
                    }
                }
            }
        }
    }

    /// Per-column accumulators, merged in column order.
    fn fold<A, M, V, G>(&self, make: M, visit: V, mut merge: G)
    where
        A: Send,
        M: Fn() -> A + Sync,
        V: Fn(&mut A, &Node) + Sync,
        G: FnMut(A),
    {
        let cols = self.xs.len() - 1;
        let mut start = 0;
        while start < cols {
            let end = (start + COLUMN_BLOCK).min(cols);
            let parts: Vec<A> = (start..end)
                .into_par_iter()
                .map(|i| {
                    let mut acc = make();
                    self.visit_column(i, &mut |n: &Node| visit(&mut acc, n));
                    acc
                })
                .collect();
            for a in parts {
                merge(a);
            }
            start = end;
        }
    }

    fn integrate<F: Fn(&Node) -> f64 + Sync>(&self, f: F) -> f64 {
        let mut cols = Vec::new();
        self.fold(|| 0.0, |acc: &mut f64, n| *acc += n.w * f(n), |a| cols.push(a));
        pairwise_sum(&cols)
    }
}

/// `R(θ)` of a domain containing the origin (0 in directions that leave
/// immediately).
fn radial_extent(dom: &Domain, nu: Point2) -> f64 {
    match dom {
        Domain::Disk { center, radius } => {
            let b = dot(nu, *center);
            let disc = b * b - dot(*center, *center) + radius * radius;
            (b + disc.max(0.0).sqrt()).max(0.0)
        }
        Domain::Polygon { vertices } => Polygon::from_ccw_unchecked(vertices.clone()).radial(nu).max(0.0),
        Domain::Interval { .. } => unreachable!(),
    }
}

/// `∫_D F(x) |x|^{q−2} dx` in polar coordinates around the origin, which
/// must lie in the closed domain.
fn polar_integral<F: Fn(Point2) -> f64 + Sync>(dom: &Domain, f: &F, q: f64, min_panels: usize) -> Estimate {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut cuts = vec![0.0, two_pi];
    if let Domain::Polygon { vertices } = dom {
        for v in vertices {
            if norm(*v) > 0.0 {
                cuts.push(v[1].atan2(v[0]).rem_euclid(two_pi));
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let mut panels = Vec::new();
    for w in cuts.windows(2) {
        let k = ((w[1] - w[0]) / two_pi * min_panels as f64).ceil().max(1.0) as usize;
        for p in 0..k {
            panels.push((
                w[0] + (w[1] - w[0]) * p as f64 / k as f64,
                w[0] + (w[1] - w[0]) * (p + 1) as f64 / k as f64,
            ));
        }
    }
    let (gx, gw) = gauss_legendre(8);
    let parts: Vec<(f64, f64)> = panels
        .par_iter()
        .map(|&(a, b)| {
            let half = 0.5 * (b - a);
            let mut v = 0.0;
            let mut e = 0.0;
            for k in 0..8 {
                let th = a + half * (gx[k] + 1.0);
                let nu = unit(th);
                let r = radial_extent(dom, nu);
                let g = |s: f64| f([s * nu[0], s * nu[1]]);
                let est = radial(&g, 0.0, r, q, 1e-11, 1e-15);
                v += half * gw[k] * est.value;
                e += half * gw[k] * est.error;
            }
            (v, e)
        })
        .collect();
    let vals: Vec<f64> = parts.iter().map(|p| p.0).collect();
    Estimate {
        value: pairwise_sum(&vals),
        error: parts.iter().map(|p| p.1).sum(),
    }
}

/// One-dimensional grid: cellwise integration over `[a, b]`.
fn line_integral<F: Fn(f64, f64, f64) -> f64 + Sync>(u: &GridFn, dom: &Domain, w: &WeightSpec, f: &F) -> Estimate {
    let Domain::Interval { lo: a, hi: b } = *dom else {
        unreachable!()
    };
    let xs = u.axis_coords(0);
    let parts: Vec<Estimate> = xs
        .windows(2)
        .filter_map(|c| {
            let (l, r) = (c[0].max(a), c[1].min(b));
            (r > l).then_some((l, r))
        })
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(l, r)| {
            let h = |x: f64| {
                let v = u.evaluate_extended(&[x]);
                let g = u.gradient(&[x])[0];
                f(x, v, g) * w.psi(&[x])
            };
            match w.singular_q(1) {
                Some(q) => abs_power(&h, l, r, q, 1e-12, 1e-300),
                None => Estimate {
                    value: gl8(&h, l, r),
                    error: 0.0,
                },
            }
        })
        .collect();
    let vals: Vec<f64> = parts.iter().map(|p| p.value).collect();
    Estimate {
        value: pairwise_sum(&vals),
        error: parts.iter().map(|p| p.error).sum(),
    }
}

/// Weighted domain integral of `f(x, u(x), ∇u(x))`; `f` excludes `ψ` and
/// the radial factor.
fn domain_integral<F>(u: &GridFn, w: &WeightSpec, f: F) -> Result<Estimate>
where
    F: Fn(&[f64], f64, &[f64]) -> f64 + Sync,
{
    let dom = domain_of(u);
    match u.dimension() {
        1 => Ok(line_integral(u, &dom, w, &|x, v, g| f(&[x], v, &[g]))),
        2 => {
            let q = w.singular_q(2);
            if let Some(q) = q {
                if dom.contains(&[0.0, 0.0], 0.0) {
                    let g = |x: Point2| {
                        let v = u.evaluate_extended(&x);
                        let d = u.gradient(&x);
                        f(&x, v, &d) * w.psi(&x)
                    };
                    let panels = 2 * u.shape().iter().copied().max().unwrap_or(64).max(64);
                    return Ok(polar_integral(&dom, &g, q, panels));
                }
            }
            let p = Planar::new(u, &dom)?;
            let value = p.integrate(|n| f(&n.x, n.u, &n.g) * w.psi(&n.x) * w.radial(&n.x));
            Ok(Estimate { value, error: 0.0 })
        }
        d => Err(Error::DimensionMismatch { expected: 2, got: d }),
    }
}

/// Sub-segments of `[a, b]` between the grid lines it crosses.
fn grid_pieces(u: &GridFn, a: Point2, b: Point2) -> Vec<(Point2, Point2)> {
    let mut ts = vec![0.0, 1.0];
    for axis in 0..2 {
        let d = b[axis] - a[axis];
        if d == 0.0 {
            continue;
        }
        for c in u.axis_coords(axis) {
            let t = (c - a[axis]) / d;
            if t > 0.0 && t < 1.0 {
                ts.push(t);
            }
        }
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let at = |t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    ts.windows(2).map(|w| (at(w[0]), at(w[1]))).collect()
}

/// `∫` of `dens` along each boundary facet of a planar domain, with the
/// facet's outer normal. Disks are cut into `arcs` equal arcs.
fn boundary_facets<F>(u: &GridFn, dom: &Domain, dens: &F, arcs: usize) -> Vec<(Point2, f64)>
where
    F: Fn(Point2) -> f64 + Sync,
{
    match dom {
        Domain::Polygon { vertices } => {
            let poly = Polygon::from_ccw_unchecked(vertices.clone());
            poly.edges()
                .par_iter()
                .map(|e| {
                    let parts: Vec<f64> = grid_pieces(u, e.a, e.b)
                        .into_iter()
                        .map(|(p, q)| {
                            let len = norm(sub(q, p));
                            let h = |s: f64| dens([p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])]);
                            len * adaptive(&h, 0.0, 1.0, 1e-12, 1e-300).value
                        })
                        .collect();
                    (e.normal, pairwise_sum(&parts))
                })
                .collect()
        }
        Domain::Disk { center, radius } => {
            let two_pi = 2.0 * std::f64::consts::PI;
            (0..arcs)
                .into_par_iter()
                .map(|k| {
                    let (a, b) = (two_pi * k as f64 / arcs as f64, two_pi * (k + 1) as f64 / arcs as f64);
                    let h = |th: f64| {
                        let nu = unit(th);
                        dens([center[0] + radius * nu[0], center[1] + radius * nu[1]])
                    };
                    let mass = radius * gl8(&h, a, b);
                    let mean = unit(0.5 * (a + b));
                    (mean, mass)
                })
                .collect()
        }
        Domain::Interval { .. } => unreachable!(),
    }
}

fn origin_on_boundary(dom: &Domain) -> bool {
    let d = crate::wulff::domain_depth(dom, &[0.0; 2][..dom.dimension()]);
    let (lo, hi) = dom.bbox();
    let scale = lo.iter().chain(&hi).fold(1.0f64, |m, v| m.max(v.abs()));
    d.abs() <= 1e-12 * scale
}

impl WeightedFunction for GridFn {
    fn dimension(&self) -> usize {
        GridFn::dimension(self)
    }

    fn epigraph_measure(&self, w: &WeightSpec) -> Result<Estimate> {
        domain_integral(self, w, |_, v, _| w.tail(v))
    }

    fn bulk_integral(&self, zeta: &Perturbation, w: &WeightSpec) -> Result<Estimate> {
        domain_integral(self, w, |_, v, g| zeta.evaluate(g) * w.phi(v))
    }

    fn boundary_integral(&self, zeta: &Perturbation, w: &WeightSpec) -> Result<Estimate> {
        let dom = domain_of(self);
        let n = GridFn::dimension(self);
        if w.singular_q(n).is_some_and(|q| q < n as f64) && origin_on_boundary(&dom) {
            return Err(Error::SingularBoundary);
        }
        if n == 1 {
            let Domain::Interval { lo, hi } = dom else {
                unreachable!()
            };
            let term = |y: f64, nu: f64| {
                let rho = zeta.recession(&[nu]);
                if rho == 0.0 {
                    return 0.0;
                }
                rho * w.tail(self.evaluate_extended(&[y])) * w.psi(&[y]) * w.radial(&[y])
            };
            return Ok(Estimate {
                value: term(lo, -1.0) + term(hi, 1.0),
                error: 0.0,
            });
        }
        let arcs = 4 * self.shape().iter().copied().max().unwrap_or(64).max(64);
        let value = match &dom {
            Domain::Disk { .. } => {
                let dens = |y: Point2| {
                    let c = match &dom {
                        Domain::Disk { center, .. } => *center,
                        _ => unreachable!(),
                    };
                    let nu = sub(y, c);
                    let r = norm(nu);
                    zeta.recession(&[nu[0] / r, nu[1] / r])
                        * w.tail(self.evaluate_extended(&y))
                        * w.psi(&y)
                        * w.radial(&y)
                };
                let parts: Vec<f64> = boundary_facets(self, &dom, &dens, arcs).iter().map(|p| p.1).collect();
                pairwise_sum(&parts)
            }
            _ => {
                let dens = |y: Point2| w.tail(self.evaluate_extended(&y)) * w.psi(&y) * w.radial(&y);
                let parts: Vec<f64> = boundary_facets(self, &dom, &dens, arcs)
                    .iter()
                    .map(|(nu, m)| zeta.recession(nu) * m)
                    .collect();
                pairwise_sum(&parts)
            }
        };
        Ok(Estimate { value, error: 0.0 })
    }

    fn moment_measure(&self, w: &WeightSpec, bins: usize) -> Result<DiscreteMeasure> {
        let bins = bins.max(1);
        let dom = domain_of(self);
        let n = GridFn::dimension(self);
        let grads = self.node_gradients();
        let (mut gmin, mut gmax) = (vec![f64::INFINITY; n], vec![f64::NEG_INFINITY; n]);
        for idx in 0..self.len() {
            if dom.contains(&self.node(idx), 1e-9) {
                for (k, gk) in grads.iter().enumerate() {
                    let g = gk[idx];
                    if g.is_finite() {
                        gmin[k] = gmin[k].min(g);
                        gmax[k] = gmax[k].max(g);
                    }
                }
            }
        }
        let width: Vec<f64> = (0..n)
            .map(|k| {
                let span = gmax[k] - gmin[k];
                if span > 0.0 {
                    span * (1.0 + 1e-9) / bins as f64
                } else {
                    1.0
                }
            })
            .collect();
        let bin_of = |g: &[f64]| -> usize {
            let mut b = 0;
            for k in 0..n {
                let i = (((g[k] - gmin[k]) / width[k]).floor().max(0.0) as usize).min(bins - 1);
                b = b * bins + i;
            }
            b
        };
        let mut acc = vec![[0.0f64; 3]; bins.pow(n as u32)];
        if n == 1 {
            let Domain::Interval { lo: a, hi: b } = dom else {
                unreachable!()
            };
            let rule = unit_rule(8);
            let xs = self.axis_coords(0);
            for c in xs.windows(2) {
                let (l, r) = (c[0].max(a), c[1].min(b));
                if r <= l {
                    continue;
                }
                for &(s, ws) in &rule {
                    let x = l + s * (r - l);
                    let g = self.gradient(&[x])[0];
                    let m = ws * (r - l) * w.phi(self.evaluate_extended(&[x])) * w.psi(&[x]) * w.radial(&[x]);
                    let e = &mut acc[bin_of(&[g])];
                    e[0] += m;
                    e[1] += m * g;
                }
            }
        } else {
            let p = Planar::new(self, &dom)?;
            p.fold(
                Vec::new,
                |v: &mut Vec<(usize, f64, f64, f64)>, nd| {
                    let m = nd.w * w.phi(nd.u) * w.psi(&nd.x) * w.radial(&nd.x);
                    v.push((bin_of(&nd.g), m, m * nd.g[0], m * nd.g[1]));
                },
                |v| {
                    for (b, m, mx, my) in v {
                        let e = &mut acc[b];
                        e[0] += m;
                        e[1] += mx;
                        e[2] += my;
                    }
                },
            );
        }
        let atoms = acc
            .iter()
            .filter(|e| e[0] > 0.0)
            .map(|e| ((1..=n).map(|k| e[k] / e[0]).collect(), e[0]))
            .collect();
        DiscreteMeasure::new(Carrier::Euclidean(n), atoms)
    }

    fn surface_measure(&self, w: &WeightSpec, density: BoundaryDensity) -> Result<DiscreteMeasure> {
        let dom = domain_of(self);
        let n = GridFn::dimension(self);
        if w.singular_q(n).is_some_and(|q| q < n as f64) && origin_on_boundary(&dom) {
            return Err(Error::SingularBoundary);
        }
        let h = |v: f64| match density {
            BoundaryDensity::Phi => w.phi(v),
            BoundaryDensity::Tail => w.tail(v),
        };
        if n == 1 {
            let Domain::Interval { lo, hi } = dom else {
                unreachable!()
            };
            let d = |y: f64| h(self.evaluate_extended(&[y])) * w.psi(&[y]) * w.radial(&[y]);
            return DiscreteMeasure::new(Carrier::Sphere(0), vec![(vec![-1.0], d(lo)), (vec![1.0], d(hi))]);
        }
        let dens = |y: Point2| h(self.evaluate_extended(&y)) * w.psi(&y) * w.radial(&y);
        let atoms = boundary_facets(self, &dom, &dens, super::functional::DEFAULT_BINS)
            .into_iter()
            .map(|(nu, m)| (nu.to_vec(), m))
            .collect();
        DiscreteMeasure::new(Carrier::Sphere(1), atoms)
    }

    fn origin_interior(&self) -> bool {
        let dom = domain_of(self);
        crate::wulff::domain_depth(&dom, &[0.0; 2][..dom.dimension()]) > 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_indicator(n: usize) -> GridFn {
        GridFn::sample(
            |_| 0.0,
            &[0.0, 0.0],
            &[1.0, 1.0],
            &[n, n],
            Some(Domain::polygon(&Polygon::rect([0.0, 0.0], [1.0, 1.0]))),
        )
        .unwrap()
    }

    #[test]
    fn unit_square_measure_is_one() {
        let u = square_indicator(17);
        let w = WeightSpec::exp();
        assert!((u.epigraph_measure(&w).unwrap().value - 1.0).abs() < 1e-13);
        let s = u.surface_measure(&w, BoundaryDensity::Phi).unwrap();
        assert_eq!(s.len(), 4);
        assert!(s.atoms().iter().all(|a| (a.1 - 1.0).abs() < 1e-13));
    }

    #[test]
    fn disk_with_singular_weight() {
        let d = Domain::Disk {
            center: [0.0, 0.0],
            radius: 1.0,
        };
        let u = GridFn::sample(|_| 0.0, &[-1.0, -1.0], &[1.0, 1.0], &[33, 33], Some(d)).unwrap();
        let w = WeightSpec::exp_q(0.5).unwrap();
        let v = u.epigraph_measure(&w).unwrap().value;
        assert!((v - 4.0 * std::f64::consts::PI).abs() < 1e-8, "{v}");
        let plain = u.epigraph_measure(&WeightSpec::exp()).unwrap().value;
        assert!((plain - std::f64::consts::PI).abs() < 1e-8, "{plain}");
    }

    #[test]
    fn clipped_cells_integrate_a_triangle() {
        let tri = Polygon::from_points(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        let u = GridFn::sample(
            |x| x[0] + x[1],
            &[0.0, 0.0],
            &[1.0, 1.0],
            &[9, 9],
            Some(Domain::polygon(&tri)),
        )
        .unwrap();
        let w = WeightSpec::exp();
        // ∫_T e^{−x−y} = 1 − 2/e
        let want = 1.0 - 2.0 * (-1.0f64).exp();
        assert!((u.epigraph_measure(&w).unwrap().value - want).abs() < 1e-12);
        let zeta = Perturbation::norm(1.0);
        let b = u.bulk_integral(&zeta, &w).unwrap().value;
        assert!((b - 2f64.sqrt() * want).abs() < 1e-10, "{b}");
    }

    #[test]
    fn one_dimensional_grid_matches_exact() {
        let d = Domain::Interval { lo: -1.0, hi: 1.0 };
        let u = GridFn::sample(|x| x[0] * x[0], &[-1.0], &[1.0], &[401], Some(d)).unwrap();
        let w = WeightSpec::exp();
        let want = std::f64::consts::PI.sqrt() * libm::erf(1.0);
        assert!((u.epigraph_measure(&w).unwrap().value - want).abs() < 1e-5);
        let zeta = Perturbation::norm(1.0);
        let e = (-1.0f64).exp();
        assert!((u.boundary_integral(&zeta, &w).unwrap().value - 2.0 * e).abs() < 1e-12);
        assert!((u.bulk_integral(&zeta, &w).unwrap().value - 2.0 * (1.0 - e)).abs() < 1e-4);
        let m = u.moment_measure(&w, 64).unwrap();
        assert!((m.total_mass() - want).abs() < 1e-5);
    }

    #[test]
    fn box_quadratic_2d_matches_product() {
        let dom = Domain::polygon(&Polygon::rect([-1.0, -1.0], [1.0, 1.0]));
        let u = GridFn::sample(
            |x| x[0] * x[0] + x[1] * x[1],
            &[-1.0, -1.0],
            &[1.0, 1.0],
            &[65, 65],
            Some(dom),
        )
        .unwrap();
        let w = WeightSpec::exp();
        let c = std::f64::consts::PI.sqrt() * libm::erf(1.0);
        let mu = u.epigraph_measure(&w).unwrap().value;
        assert!((mu - c * c).abs() < 1e-3 * c * c, "{mu}");
        let zeta = Perturbation::cube_support(2);
        let e = (-1.0f64).exp();
        // boundary: four edges, each ∫ e^{−1−s²} ds, ρ = 1
        let bnd = u.boundary_integral(&zeta, &w).unwrap().value;
        assert!((bnd - 4.0 * e * c).abs() < 1e-3, "{bnd}");
        // bulk: (|u_x| + |u_y|) e^{−u} = 2 · 2(1 − e^{−1}) · c
        let bulk = u.bulk_integral(&zeta, &w).unwrap().value;
        assert!((bulk - 4.0 * (1.0 - e) * c).abs() < 5e-3, "{bulk}");
        let m = u.moment_measure(&w, 32).unwrap();
        assert!((m.total_mass() - mu).abs() < 1e-10);
    }
}
