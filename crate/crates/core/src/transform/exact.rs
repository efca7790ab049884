//! Conjugate calculus on the exact one-dimensional track.

use super::perturbation::Perturbation;
use crate::convexfn::{canonicalize, Exact1D, MaxAffine, Plq, PolyhedralFn};
use crate::error::{Error, Result};

/// `u*` as a max of affine functions.
pub fn legendre(u: &PolyhedralFn) -> MaxAffine {
    u.conjugate()
}

/// `u**`; equals the canonical form of `u`.
pub fn biconjugate(u: &PolyhedralFn) -> PolyhedralFn {
    u.conjugate()
        .conjugate()
        .expect("conjugates of nonempty functions have generators")
}

/// `u □ v`, computed as `(u* + v*)*`: the envelope of all pairwise sums of
/// generators.
pub fn inf_conv(u: &PolyhedralFn, v: &PolyhedralFn) -> PolyhedralFn {
    let sum = u.conjugate().add(&v.conjugate());
    sum.conjugate().expect("pairwise sums are nonempty")
}

/// `t □ u`.
pub fn epi_scale(t: f64, u: &PolyhedralFn) -> Result<PolyhedralFn> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::InvalidArgument(format!(
            "epi-multiplication needs t >= 0, got {t}"
        )));
    }
    if t == 0.0 {
        return canonicalize(&[(0.0, 0.0)]);
    }
    let pts: Vec<(f64, f64)> = u.generators().iter().map(|&(x, z)| (t * x, t * z)).collect();
    canonicalize(&pts)
}

/// `u □ v` for piecewise linear-quadratic functions.
pub fn inf_conv_plq(u: &Plq, v: &Plq) -> Result<Plq> {
    let s = u.conjugate()?.add(&v.conjugate()?).ok_or(Error::PerturbationTooLarge)?;
    s.conjugate()
}

/// `u_t = (u* + tζ)*` on the exact track. Negative `t` is allowed; an
/// improper result is reported as [`Error::PerturbationTooLarge`].
pub fn perturb_exact<U: Exact1D + ?Sized>(u: &U, zeta: &Perturbation, t: f64) -> Result<Plq> {
    let u = u.to_plq();
    if !u.has_compact_domain() {
        return Err(Error::UnboundedDomain(
            "exact perturbation needs a compact domain".into(),
        ));
    }
    let dual = u.conjugate()?;
    if t == 0.0 {
        return dual.conjugate();
    }
    let z = zeta.to_plq()?.scale(t);
    let f = dual.add(&z).ok_or(Error::PerturbationTooLarge)?;
    let ut = f.conjugate()?;
    if !ut.has_compact_domain() {
        return Err(Error::PerturbationTooLarge);
    }
    Ok(ut)
}

/// Perturbation `v*` for a polyhedral `v` (an element of the admissible
/// class with recession `h_dom(v)`).
pub fn conjugate_as_perturbation(v: &PolyhedralFn) -> Perturbation {
    let c = v.conjugate();
    Perturbation::MaxAffine {
        slopes: c.slopes.iter().map(|&s| vec![s]).collect(),
        intercepts: c.intercepts,
    }
}
