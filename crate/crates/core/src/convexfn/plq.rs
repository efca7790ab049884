//! Piecewise linear-quadratic functions of one variable.
//!
//! This class is closed under conjugation, sums, pointwise maxima and
//! epi-multiplication, which makes it the exact track for examples such as
//! `x² + I_[−1,1]`. Inputs need not be convex: conjugation is computed as
//! the pointwise maximum of the per-piece conjugates.

use serde::{Deserialize, Serialize};

use super::poly::PolyhedralFn;
use crate::error::{Error, Result};

/// `a x² + b x + c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quad {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Quad {
    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Quad { a, b, c }
    }

    pub const fn linear(b: f64, c: f64) -> Self {
        Quad { a: 0.0, b, c }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.a * x + self.b) * x + self.c
    }

    #[inline]
    pub fn deriv(&self, x: f64) -> f64 {
        2.0 * self.a * x + self.b
    }

    fn sub(&self, o: &Quad) -> Quad {
        Quad::new(self.a - o.a, self.b - o.b, self.c - o.c)
    }

    fn add(&self, o: &Quad) -> Quad {
        Quad::new(self.a + o.a, self.b + o.b, self.c + o.c)
    }

    fn close_to(&self, o: &Quad) -> bool {
        let near = |x: f64, y: f64| (x - y).abs() <= 1e-14 * (1.0 + x.abs().max(y.abs()));
        near(self.a, o.a) && near(self.b, o.b) && near(self.c, o.c)
    }

    /// Roots strictly inside `(lo, hi)`, sorted.
    fn roots_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        let (a, b, c) = (self.a, self.b, self.c);
        let mut r = Vec::new();
        if a == 0.0 {
            if b != 0.0 {
                r.push(-c / b);
            }
        } else {
            let disc = b * b - 4.0 * a * c;
            if disc >= 0.0 {
                let sq = disc.sqrt();
                let q = -0.5 * (b + b.signum() * sq);
                if q != 0.0 {
                    r.push(q / a);
                    r.push(c / q);
                } else {
                    r.push(0.0);
                }
            }
        }
        r.retain(|x| x.is_finite() && *x > lo && *x < hi);
        r.sort_by(f64::total_cmp);
        r.dedup();
        r
    }
}

/// Piecewise quadratic on `[breaks[0], breaks[last]]` (ends may be
/// infinite), `+∞` outside. A single-point domain has `breaks = [p, p]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plq {
    breaks: Vec<f64>,
    pieces: Vec<Quad>,
}

/// A point inside the open interval `(lo, hi)`, which may be unbounded.
fn interior_point(lo: f64, hi: f64) -> f64 {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => 0.5 * (lo + hi),
        (true, false) => lo + 1.0 + lo.abs(),
        (false, true) => hi - 1.0 - hi.abs(),
        (false, false) => 0.0,
    }
}

impl Plq {
    pub fn new(breaks: Vec<f64>, pieces: Vec<Quad>) -> Result<Self> {
        if pieces.is_empty() || breaks.len() != pieces.len() + 1 {
            return Err(Error::InvalidArgument("need one more breakpoint than pieces".into()));
        }
        if breaks.iter().any(|b| b.is_nan())
            || breaks[1..breaks.len() - 1].iter().any(|b| !b.is_finite())
            || breaks[0] == f64::INFINITY
            || breaks[breaks.len() - 1] == f64::NEG_INFINITY
        {
            return Err(Error::InvalidArgument("invalid breakpoints".into()));
        }
        if breaks.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidArgument("breakpoints must be sorted".into()));
        }
        if pieces.len() > 1 && breaks.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("zero-length piece".into()));
        }
        if pieces
            .iter()
            .any(|q| !(q.a.is_finite() && q.b.is_finite() && q.c.is_finite()))
        {
            return Err(Error::InvalidArgument("non-finite coefficients".into()));
        }
        Ok(Plq { breaks, pieces })
    }

    pub fn indicator(lo: f64, hi: f64) -> Result<Self> {
        Plq::new(vec![lo, hi], vec![Quad::linear(0.0, 0.0)])
    }

    /// `a x² + b x + c` restricted to `[lo, hi]`.
    pub fn quadratic(a: f64, b: f64, c: f64, lo: f64, hi: f64) -> Result<Self> {
        Plq::new(vec![lo, hi], vec![Quad::new(a, b, c)])
    }

    /// `c` everywhere.
    pub fn constant(c: f64) -> Self {
        Plq {
            breaks: vec![f64::NEG_INFINITY, f64::INFINITY],
            pieces: vec![Quad::linear(0.0, c)],
        }
    }

    /// `max(lo_slope·y, hi_slope·y)`; the support function of
    /// `[lo_slope, hi_slope]`.
    pub fn support_of_interval(lo_slope: f64, hi_slope: f64) -> Self {
        Plq {
            breaks: vec![f64::NEG_INFINITY, 0.0, f64::INFINITY],
            pieces: vec![Quad::linear(lo_slope, 0.0), Quad::linear(hi_slope, 0.0)],
        }
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[Quad] {
        &self.pieces
    }

    /// Pieces with their intervals.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, Quad)> + '_ {
        self.pieces
            .iter()
            .enumerate()
            .map(|(k, q)| (self.breaks[k], self.breaks[k + 1], *q))
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.breaks[0], self.breaks[self.breaks.len() - 1])
    }

    pub fn has_compact_domain(&self) -> bool {
        let (lo, hi) = self.domain();
        lo.is_finite() && hi.is_finite()
    }

    fn piece_index(&self, x: f64) -> usize {
        let n = self.pieces.len();
        if n == 1 {
            return 0;
        }
        let k = self.breaks[1..n].partition_point(|&b| b < x);
        k.min(n - 1)
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let (lo, hi) = self.domain();
        if !(lo..=hi).contains(&x) {
            return f64::INFINITY;
        }
        self.pieces[self.piece_index(x)].eval(x)
    }

    /// Derivative of the piece containing `x` (left piece at breakpoints).
    pub fn derivative(&self, x: f64) -> f64 {
        self.pieces[self.piece_index(x)].deriv(x)
    }

    pub fn min_value(&self) -> f64 {
        let mut m = f64::INFINITY;
        for (l, r, q) in self.segments() {
            for x in [l, r] {
                if x.is_finite() {
                    m = m.min(q.eval(x));
                }
            }
            if q.a > 0.0 {
                let v = -q.b / (2.0 * q.a);
                if v > l && v < r {
                    m = m.min(q.eval(v));
                }
            } else if (l == f64::NEG_INFINITY && (q.a < 0.0 || q.b > 0.0))
                || (r == f64::INFINITY && (q.a < 0.0 || q.b < 0.0))
            {
                return f64::NEG_INFINITY;
            }
        }
        m
    }

    /// Maximum over the domain (`+∞` if unbounded above).
    pub fn max_value(&self) -> f64 {
        let mut m = f64::NEG_INFINITY;
        for (l, r, q) in self.segments() {
            if (!l.is_finite() || !r.is_finite()) && (q.a != 0.0 || q.b != 0.0) {
                return f64::INFINITY;
            }
            for x in [l, r] {
                if x.is_finite() {
                    m = m.max(q.eval(x));
                }
            }
            if q.a < 0.0 {
                let v = -q.b / (2.0 * q.a);
                if v > l && v < r {
                    m = m.max(q.eval(v));
                }
            }
            if !l.is_finite() || !r.is_finite() {
                m = m.max(q.c);
            }
        }
        m
    }

    /// `true` when every piece is convex and the slopes do not drop at
    /// breakpoints (within `tol`).
    pub fn is_convex(&self, tol: f64) -> bool {
        if self.pieces.iter().any(|q| q.a < -tol) {
            return false;
        }
        (1..self.pieces.len()).all(|k| {
            let x = self.breaks[k];
            let jump = self.pieces[k].deriv(x) - self.pieces[k - 1].deriv(x);
            jump >= -tol * (1.0 + x.abs())
        })
    }

    /// `self + c`.
    pub fn shift(&self, c: f64) -> Plq {
        Plq {
            breaks: self.breaks.clone(),
            pieces: self.pieces.iter().map(|q| Quad::new(q.a, q.b, q.c + c)).collect(),
        }
    }

    /// `s·self` for any real `s` (no convexity is implied for `s < 0`).
    pub fn scale(&self, s: f64) -> Plq {
        Plq {
            breaks: self.breaks.clone(),
            pieces: self
                .pieces
                .iter()
                .map(|q| Quad::new(s * q.a, s * q.b, s * q.c))
                .collect(),
        }
    }

    /// `t □ u`: `t·u(x/t)` for `t > 0`, the indicator of the origin for
    /// `t = 0`.
    pub fn epi_scale(&self, t: f64) -> Result<Plq> {
        if t < 0.0 || t.is_nan() {
            return Err(Error::InvalidArgument(format!(
                "epi-multiplication needs t >= 0, got {t}"
            )));
        }
        if t == 0.0 {
            return Plq::indicator(0.0, 0.0);
        }
        Ok(Plq {
            breaks: self.breaks.iter().map(|b| b * t).collect(),
            pieces: self.pieces.iter().map(|q| Quad::new(q.a / t, q.b, q.c * t)).collect(),
        })
    }

    /// Pointwise sum; `None` if the domains do not meet.
    pub fn add(&self, other: &Plq) -> Option<Plq> {
        self.combine(other, |p, q| p.add(q))
    }

    /// Pointwise maximum; `None` if the domains do not meet.
    pub fn max(&self, other: &Plq) -> Option<Plq> {
        let (lo, hi) = intersect(self.domain(), other.domain())?;
        if lo == hi {
            let v = self.evaluate(lo).max(other.evaluate(lo));
            return Some(Plq {
                breaks: vec![lo, lo],
                pieces: vec![Quad::linear(0.0, v)],
            });
        }
        let cuts = merged_cuts(self, other, lo, hi);
        let mut breaks = vec![lo];
        let mut pieces: Vec<Quad> = Vec::new();
        for w in cuts.windows(2) {
            let (l, r) = (w[0], w[1]);
            let mid = interior_point(l, r);
            let p = self.pieces[self.piece_index(mid)];
            let q = other.pieces[other.piece_index(mid)];
            let d = p.sub(&q);
            let mut sub = vec![l];
            sub.extend(d.roots_in(l, r));
            sub.push(r);
            for s in sub.windows(2) {
                let m = interior_point(s[0], s[1]);
                let pick = if d.eval(m) >= 0.0 { p } else { q };
                push_piece(&mut breaks, &mut pieces, s[1], pick);
            }
        }
        Some(Plq { breaks, pieces })
    }

    fn combine(&self, other: &Plq, op: impl Fn(&Quad, &Quad) -> Quad) -> Option<Plq> {
        let (lo, hi) = intersect(self.domain(), other.domain())?;
        if lo == hi {
            let p = self.pieces[self.piece_index(lo)];
            let q = other.pieces[other.piece_index(lo)];
            let v = op(&p, &q).eval(lo);
            return Some(Plq {
                breaks: vec![lo, lo],
                pieces: vec![Quad::linear(0.0, v)],
            });
        }
        let cuts = merged_cuts(self, other, lo, hi);
        let mut breaks = vec![lo];
        let mut pieces = Vec::new();
        for w in cuts.windows(2) {
            let mid = interior_point(w[0], w[1]);
            let p = self.pieces[self.piece_index(mid)];
            let q = other.pieces[other.piece_index(mid)];
            push_piece(&mut breaks, &mut pieces, w[1], op(&p, &q));
        }
        Some(Plq { breaks, pieces })
    }

    /// Fenchel conjugate `f*(s) = sup_x (s x − f(x))`.
    ///
    /// Fails with [`Error::PerturbationTooLarge`] when the conjugate is
    /// identically `+∞`.
    pub fn conjugate(&self) -> Result<Plq> {
        let mut acc: Option<Plq> = None;
        for (l, r, q) in self.segments() {
            let g = piece_conjugate(l, r, &q)?;
            acc = Some(match acc {
                None => g,
                Some(f) => f.max(&g).ok_or(Error::PerturbationTooLarge)?,
            });
        }
        Ok(acc.expect("at least one piece"))
    }

    /// Sublevel set `{u ≤ t}` of a convex function, as an interval.
    pub fn sublevel(&self, t: f64) -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (l, r, q) in self.segments() {
            let d = Quad::new(q.a, q.b, q.c - t);
            let mut pts = vec![l];
            pts.extend(d.roots_in(l, r));
            pts.push(r);
            for w in pts.windows(2) {
                let inside = if w[0] == w[1] {
                    d.eval(w[0]) <= 0.0
                } else {
                    d.eval(interior_point(w[0], w[1])) <= 0.0
                };
                if inside {
                    lo = lo.min(w[0]);
                    hi = hi.max(w[1]);
                }
            }
        }
        (lo <= hi).then_some((lo, hi))
    }

    /// Exact conversion when every piece is affine on a compact domain.
    pub fn to_polyhedral(&self) -> Option<PolyhedralFn> {
        if !self.has_compact_domain() || self.pieces.iter().any(|q| q.a != 0.0) {
            return None;
        }
        let mut pts: Vec<(f64, f64)> = self
            .segments()
            .flat_map(|(l, r, q)| [(l, q.eval(l)), (r, q.eval(r))])
            .collect();
        pts.dedup();
        super::poly::canonicalize(&pts).ok()
    }
}

fn intersect(a: (f64, f64), b: (f64, f64)) -> Option<(f64, f64)> {
    let lo = a.0.max(b.0);
    let hi = a.1.min(b.1);
    (lo <= hi).then_some((lo, hi))
}

fn merged_cuts(f: &Plq, g: &Plq, lo: f64, hi: f64) -> Vec<f64> {
    let mut cuts: Vec<f64> = f
        .breaks
        .iter()
        .chain(&g.breaks)
        .copied()
        .filter(|&b| b > lo && b < hi)
        .collect();
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts
}

fn push_piece(breaks: &mut Vec<f64>, pieces: &mut Vec<Quad>, right: f64, q: Quad) {
    if let Some(last) = pieces.last() {
        if last.close_to(&q) {
            *breaks.last_mut().unwrap() = right;
            return;
        }
    }
    pieces.push(q);
    breaks.push(right);
}

/// Conjugate of `q` restricted to `[l, r]`.
fn piece_conjugate(l: f64, r: f64, q: &Quad) -> Result<Plq> {
    let inf = f64::INFINITY;
    if l == r {
        return Ok(Plq {
            breaks: vec![-inf, inf],
            pieces: vec![Quad::linear(l, -q.eval(l))],
        });
    }
    let left_line = || Quad::linear(l, -q.eval(l));
    let right_line = || Quad::linear(r, -q.eval(r));
    if q.a > 0.0 {
        let sl = if l.is_finite() { q.b + 2.0 * q.a * l } else { -inf };
        let sr = if r.is_finite() { q.b + 2.0 * q.a * r } else { inf };
        let mid = Quad::new(1.0 / (4.0 * q.a), -q.b / (2.0 * q.a), q.b * q.b / (4.0 * q.a) - q.c);
        let mut breaks = vec![-inf];
        let mut pieces = Vec::new();
        if sl.is_finite() {
            pieces.push(left_line());
            breaks.push(sl);
        }
        pieces.push(mid);
        if sr.is_finite() {
            breaks.push(sr);
            pieces.push(right_line());
        }
        breaks.push(inf);
        return Plq::new(breaks, pieces);
    }
    if q.a == 0.0 {
        let b = q.b;
        return match (l.is_finite(), r.is_finite()) {
            (true, true) => Plq::new(
                vec![-inf, b, inf],
                vec![Quad::linear(l, -b * l - q.c), Quad::linear(r, -b * r - q.c)],
            ),
            (false, true) => Plq::new(vec![b, inf], vec![Quad::linear(r, -b * r - q.c)]),
            (true, false) => Plq::new(vec![-inf, b], vec![Quad::linear(l, -b * l - q.c)]),
            (false, false) => Plq::new(vec![b, b], vec![Quad::linear(0.0, -q.c)]),
        };
    }
    if !(l.is_finite() && r.is_finite()) {
        return Err(Error::PerturbationTooLarge);
    }
    let (ql, qr) = (q.eval(l), q.eval(r));
    let kink = (qr - ql) / (r - l);
    Plq::new(vec![-inf, kink, inf], vec![left_line(), right_line()])
}

impl From<&PolyhedralFn> for Plq {
    fn from(u: &PolyhedralFn) -> Plq {
        let xs = u.breakpoints();
        let zs = u.values();
        if xs.len() == 1 {
            return Plq {
                breaks: vec![xs[0], xs[0]],
                pieces: vec![Quad::linear(0.0, zs[0])],
            };
        }
        let pieces = (0..xs.len() - 1)
            .map(|k| {
                let s = (zs[k + 1] - zs[k]) / (xs[k + 1] - xs[k]);
                Quad::linear(s, zs[k] - s * xs[k])
            })
            .collect();
        Plq {
            breaks: xs.to_vec(),
            pieces,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn conjugate_of_indicator_is_abs() {
        let u = Plq::indicator(-1.0, 1.0).unwrap();
        let c = u.conjugate().unwrap();
        for y in [-3.0, -0.5, 0.0, 0.7, 5.0] {
            assert_eq!(c.evaluate(y), f64::abs(y));
        }
    }

    #[test]
    fn conjugate_of_capped_parabola() {
        let u = Plq::quadratic(1.0, 0.0, 0.0, -1.0, 1.0).unwrap();
        let c = u.conjugate().unwrap();
        for y in [-4.0f64, -2.0, -1.0, 0.0, 1.5, 2.0, 3.0] {
            let want = if y.abs() <= 2.0 { y * y / 4.0 } else { y.abs() - 1.0 };
            assert!(close(c.evaluate(y), want, 1e-15), "{y}");
        }
        let back = c.conjugate().unwrap();
        assert_eq!(back.domain(), (-1.0, 1.0));
        for x in [-1.0, -0.3, 0.0, 0.9, 1.0] {
            assert!(close(back.evaluate(x), x * x, 1e-15));
        }
    }

    #[test]
    fn improper_conjugate_detected() {
        // −|y| has conjugate identically +∞
        let f = Plq::support_of_interval(-1.0, 1.0).scale(-1.0);
        assert!(matches!(f.conjugate(), Err(Error::PerturbationTooLarge)));
    }

    #[test]
    fn nonconvex_input_gives_envelope_conjugate() {
        // min((x+1)^2, (x-1)^2) on [-2, 2]
        let f = Plq::new(
            vec![-2.0, 0.0, 2.0],
            vec![Quad::new(1.0, 2.0, 1.0), Quad::new(1.0, -2.0, 1.0)],
        )
        .unwrap();
        let env = f.conjugate().unwrap().conjugate().unwrap();
        assert!(close(env.evaluate(0.0), 0.0, 1e-15));
        assert!(close(env.evaluate(0.5), 0.0, 1e-15));
        assert!(close(env.evaluate(1.5), 0.25, 1e-15));
        assert!(env.is_convex(1e-12));
    }

    #[test]
    fn epi_scale_and_point_domain() {
        let u = Plq::indicator(0.0, 1.0).unwrap();
        assert_eq!(u.epi_scale(2.0).unwrap().domain(), (0.0, 2.0));
        let z = u.epi_scale(0.0).unwrap();
        assert_eq!(z.domain(), (0.0, 0.0));
        assert_eq!(z.evaluate(0.0), 0.0);
        assert!(u.epi_scale(-1.0).is_err());
        let c = z.conjugate().unwrap();
        assert_eq!(c.evaluate(3.0), 0.0);
    }

    #[test]
    fn max_splits_at_crossings() {
        let a = Plq::constant(0.0);
        let b = Plq::quadratic(1.0, 0.0, -1.0, f64::NEG_INFINITY, f64::INFINITY).unwrap();
        let m = a.max(&b).unwrap();
        assert_eq!(m.breaks(), &[f64::NEG_INFINITY, -1.0, 1.0, f64::INFINITY]);
        assert_eq!(m.evaluate(0.0), 0.0);
        assert_eq!(m.evaluate(2.0), 3.0);
    }
}
