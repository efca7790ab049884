//! Property checks shared by the proptest suite and the acceptance run.
//! Each returns `Err` with a description of the first violation.
#![allow(dead_code)]

use fwl::convexfn::{canonicalize, lift_body, EpigraphBody, Plq, PolyhedralFn};
use fwl::geometry::{Point2, Polygon};
use fwl::measures::{BoundaryDensity, WeightSpec, WeightedFunction};
use fwl::transform::{biconjugate, conjugate_as_perturbation, inf_conv, inf_conv_plq, Perturbation};
use fwl::wulff::{gnomonic, wulff_flow, wulff_shape, zeta_bar, SphericalFn};
use rand::Rng;

pub type Check = Result<(), String>;

pub fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

/// Polyhedral function from generators, requiring a domain of width at
/// least `0.25`.
pub fn poly(points: &[(f64, f64)]) -> Option<PolyhedralFn> {
    let u = canonicalize(points).ok()?;
    let (lo, hi) = u.domain();
    (hi - lo >= 0.25).then_some(u)
}

pub fn random_points<R: Rng>(rng: &mut R) -> Vec<(f64, f64)> {
    let k = rng.random_range(2..=6);
    (0..k)
        .map(|_| (rng.random_range(-2.0..2.0), rng.random_range(0.0..2.0)))
        .collect()
}

pub fn random_poly<R: Rng>(rng: &mut R) -> PolyhedralFn {
    loop {
        if let Some(u) = poly(&random_points(rng)) {
            return u;
        }
    }
}

/// `sup_x (x y − u(x))` over the generators: the definition.
pub fn brute_conjugate(u: &PolyhedralFn, y: f64) -> f64 {
    u.generators()
        .iter()
        .map(|&(x, z)| x * y - z)
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn biconjugation(u: &PolyhedralFn, xs: &[f64]) -> Check {
    let uu = biconjugate(u);
    let uuu = biconjugate(&uu);
    let (lo, hi) = u.domain();
    for &s in xs {
        let x = lo + s * (hi - lo);
        let (a, b, c) = (u.evaluate(x), uu.evaluate(x), uuu.evaluate(x));
        ensure(close(a, b, 1e-10) && close(b, c, 1e-10), || {
            format!("u(x)={a}, u**(x)={b}, u****(x)={c} at x={x}")
        })?;
    }
    Ok(())
}

/// `(u □ v)* = u* + v*`.
pub fn dual_sum(u: &PolyhedralFn, v: &PolyhedralFn, ys: &[f64]) -> Check {
    let w = inf_conv(u, v);
    for &y in ys {
        let lhs = brute_conjugate(&w, y);
        let rhs = brute_conjugate(u, y) + brute_conjugate(v, y);
        ensure(close(lhs, rhs, 1e-10), || format!("(u□v)*({y})={lhs}, u*+v*={rhs}"))?;
    }
    Ok(())
}

/// The generator route and the piecewise conjugate route to `u □ v`.
pub fn inf_conv_routes(u: &PolyhedralFn, v: &PolyhedralFn, xs: &[f64]) -> Check {
    let a = inf_conv(u, v);
    let b = inf_conv_plq(&Plq::from(u), &Plq::from(v)).map_err(|e| e.to_string())?;
    let (lo, hi) = a.domain();
    let (blo, bhi) = b.domain();
    ensure(close(lo, blo, 1e-12) && close(hi, bhi, 1e-12), || {
        format!("domains [{lo}, {hi}] vs [{blo}, {bhi}]")
    })?;
    for &s in xs {
        let x = lo + s * (hi - lo);
        let (p, q) = (a.evaluate(x), b.evaluate(x));
        ensure(close(p, q, 1e-12), || format!("u□v({x}): {p} vs {q}"))?;
    }
    Ok(())
}

/// Hausdorff excess of a circumscribed polygon with `m` equally spaced
/// normals over a body of diameter `d`.
pub fn direction_bound(d: f64, m: usize) -> f64 {
    d * (std::f64::consts::PI / m as f64).tan()
}

fn diameter(p: &Polygon) -> f64 {
    let v = p.vertices();
    let mut d = 0.0f64;
    for a in v {
        for b in v {
            d = d.max((a[0] - b[0]).hypot(a[1] - b[1]));
        }
    }
    d
}

/// `F_s F_t K = F_{s+t} K` and `[f + ℓ_y] = [f] + y`, with `f = h_P`.
pub fn wulff_semigroup(k: &[Point2], p: &[Point2], y: Point2, s: f64, t: f64, m: usize) -> Check {
    let k = EpigraphBody::from_polygon(Polygon::from_points(k));
    let f = SphericalFn::Support(Polygon::from_points(p));
    let st = wulff_flow(&k, &f, s + t, m).ok_or("F_{s+t}K empty")?;
    let two = wulff_flow(&wulff_flow(&k, &f, t, m).ok_or("F_tK empty")?, &f, s, m).ok_or("F_sF_tK empty")?;
    let bound = direction_bound(diameter(st.polygon()), m);
    let d = st.hausdorff(&two);
    ensure(d <= 2.0 * bound, || format!("semigroup gap {d:e} > 2·{bound:e}"))?;

    let g = SphericalFn::Sum(vec![f.clone(), SphericalFn::Linear(y)]);
    let a = wulff_shape(&f, m).ok_or("[f] empty")?.translate(y);
    let b = wulff_shape(&g, m).ok_or("[f + ℓ_y] empty")?;
    let bound = direction_bound(diameter(a.polygon()), m);
    let d = a.hausdorff(&b);
    ensure(d <= 2.0 * bound, || format!("translation gap {d:e} > 2·{bound:e}"))
}

/// Recession function in closed form for the atoms used in the tests.
pub fn rho(zeta: &Perturbation, nu: &[f64]) -> f64 {
    let norm = nu.iter().map(|v| v * v).sum::<f64>().sqrt();
    match zeta {
        Perturbation::Norm { coeff } | Perturbation::SoftNorm { coeff } => coeff * norm,
        Perturbation::Constant { .. } | Perturbation::Bump { .. } => 0.0,
        Perturbation::Support { polytope } => polytope
            .iter()
            .map(|v| v.iter().zip(nu).map(|(a, b)| a * b).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max),
        Perturbation::Sum { terms } => terms.iter().map(|t| rho(t, nu)).sum(),
        Perturbation::Scaled { factor, term } => factor * rho(term, nu),
        Perturbation::MaxAffine { slopes, .. } => slopes
            .iter()
            .map(|s| s.iter().zip(nu).map(|(a, b)| a * b).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max),
    }
}

/// `ζ̄(ν) = |ν_{n+1}| ζ(ν_H / |ν_{n+1}|)` below the equator and
/// `ζ̄ = ρ_ζ` on it.
pub fn zeta_bar_factorization(zeta: &Perturbation, nu_h: &[f64], height: f64) -> Check {
    let mut nu: Vec<f64> = nu_h.to_vec();
    nu.push(-height.abs());
    let norm = nu.iter().map(|v| v * v).sum::<f64>().sqrt();
    nu.iter_mut().for_each(|v| *v /= norm);
    let n = nu_h.len();
    let s = nu[n].abs();
    if s > 0.0 {
        let g: Vec<f64> = nu[..n].iter().map(|v| v / s).collect();
        let oracle = s * zeta.evaluate(&g);
        let got = zeta_bar(zeta, &nu);
        ensure(close(got, oracle, 1e-12), || {
            format!("ζ̄({nu:?}) = {got}, expected {oracle}")
        })?;
        let gn = gnomonic(&nu);
        ensure(gn.iter().zip(&g).all(|(a, b)| close(*a, *b, 1e-12)), || {
            format!("gnomonic {gn:?} vs {g:?}")
        })?;
    }
    let mut eq: Vec<f64> = nu_h.to_vec();
    let en = eq.iter().map(|v| v * v).sum::<f64>().sqrt();
    if en > 0.0 {
        eq.iter_mut().for_each(|v| *v /= en);
        let r = rho(zeta, &eq);
        eq.push(0.0);
        let got = zeta_bar(zeta, &eq);
        ensure(close(got, r, 1e-12), || format!("ζ̄ on the equator {got} vs ρ_ζ {r}"))?;
    }
    Ok(())
}

/// `∫ e^{−u}` for a polyhedral `u` by summing exact piece integrals.
pub fn exp_volume(u: &PolyhedralFn) -> f64 {
    let g = u.generators();
    g.windows(2)
        .map(|w| {
            let ((x0, z0), (x1, z1)) = (w[0], w[1]);
            let dz = z1 - z0;
            if dz.abs() < 1e-14 {
                (x1 - x0) * (-z0).exp()
            } else {
                (x1 - x0) * ((-z0).exp() - (-z1).exp()) / dz
            }
        })
        .sum()
}

/// Total mass of the moment measure against an independent volume.
pub fn moment_mass(u: &PolyhedralFn, bins: usize) -> Check {
    let m = u.moment_measure(&WeightSpec::exp(), bins).map_err(|e| e.to_string())?;
    let mass = m.total_mass();
    let vol = exp_volume(u);
    ensure(close(mass, vol, 1e-10), || format!("mass {mass} vs ∫e^(−u) {vol}"))
}

/// The two forms of the inf-convolution derivative: integrals over the
/// domain and its boundary, and integrals against `M_u` and `S_u`.
pub fn pushforward(u: &PolyhedralFn, v: &PolyhedralFn) -> Check {
    let w = WeightSpec::exp();
    let zeta = conjugate_as_perturbation(v);
    let bulk = u.bulk_integral(&zeta, &w).map_err(|e| e.to_string())?.value;
    let bdry = u.boundary_integral(&zeta, &w).map_err(|e| e.to_string())?.value;
    let mu = u.moment_measure(&w, 64).map_err(|e| e.to_string())?;
    let su = u
        .surface_measure(&w, BoundaryDensity::Tail)
        .map_err(|e| e.to_string())?;
    let vs = v.conjugate();
    let via_m = mu.integrate(|y| vs.evaluate(y[0]));
    let via_s = su.integrate(|nu| v.domain_support(nu[0]));
    ensure(close(bulk + bdry, via_m + via_s, 1e-10), || {
        format!("domain form {bulk} + {bdry} vs measure form {via_m} + {via_s}")
    })
}

/// Surface integral of `ζ̄(ν) e^{−z}` over the lower boundary of `K^u`
/// against `∫ ζ(∇u) e^{−u} dx`.
pub fn change_of_variables(u: &PolyhedralFn, zeta: &Perturbation) -> Check {
    let k = lift_body(u);
    let mut surface = 0.0;
    for e in k.facets() {
        if e.normal[1] >= -1e-12 {
            continue;
        }
        let (za, zb) = (e.a[1], e.b[1]);
        let avg = if (zb - za).abs() < 1e-14 {
            (-za).exp()
        } else {
            ((-za).exp() - (-zb).exp()) / (zb - za)
        };
        surface += zeta_bar(zeta, &e.normal) * e.length * avg;
    }
    let domain = u
        .bulk_integral(zeta, &WeightSpec::exp())
        .map_err(|e| e.to_string())?
        .value;
    ensure(close(surface, domain, 1e-6), || {
        format!("surface {surface} vs domain {domain}")
    })
}
