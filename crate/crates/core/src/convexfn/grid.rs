//! Extended-real samples on regular boxes in one or two dimensions.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::ExtReal;
use crate::geometry::{Point2, Polygon};

/// Explicit domain of a grid function. Grid nodes outside it carry `+∞`;
/// inside, interpolation may use extrapolated values near the boundary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Domain {
    Interval { lo: f64, hi: f64 },
    Polygon { vertices: Vec<Point2> },
    Disk { center: Point2, radius: f64 },
}

impl Domain {
    pub fn polygon(p: &Polygon) -> Domain {
        Domain::Polygon {
            vertices: p.vertices().to_vec(),
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            _ => 2,
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        match self {
            Domain::Interval { lo, hi } => x[0] >= lo - tol && x[0] <= hi + tol,
            Domain::Polygon { vertices } => Polygon::from_ccw_unchecked(vertices.clone()).contains([x[0], x[1]], tol),
            Domain::Disk { center, radius } => (x[0] - center[0]).hypot(x[1] - center[1]) <= radius + tol,
        }
    }

    /// Support function `h_D(ν)`.
    pub fn support(&self, nu: &[f64]) -> f64 {
        match self {
            Domain::Interval { lo, hi } => (lo * nu[0]).max(hi * nu[0]),
            Domain::Polygon { vertices } => Polygon::from_ccw_unchecked(vertices.clone()).support([nu[0], nu[1]]),
            Domain::Disk { center, radius } => center[0] * nu[0] + center[1] * nu[1] + radius * nu[0].hypot(nu[1]),
        }
    }

    pub fn bbox(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Domain::Interval { lo, hi } => (vec![*lo], vec![*hi]),
            Domain::Polygon { vertices } => {
                let (lo, hi) = Polygon::from_ccw_unchecked(vertices.clone()).bbox();
                (lo.to_vec(), hi.to_vec())
            }
            Domain::Disk { center, radius } => (
                vec![center[0] - radius, center[1] - radius],
                vec![center[0] + radius, center[1] + radius],
            ),
        }
    }

    pub fn as_polygon(&self) -> Option<Polygon> {
        match self {
            Domain::Polygon { vertices } => Some(Polygon::from_ccw_unchecked(vertices.clone())),
            _ => None,
        }
    }

    /// `true` when the box `[lo, hi]` is exactly this domain.
    pub fn is_box(&self, lo: &[f64], hi: &[f64]) -> bool {
        match self {
            Domain::Interval { lo: a, hi: b } => *a == lo[0] && *b == hi[0],
            Domain::Polygon { vertices } => {
                let r = Polygon::rect([lo[0], lo[1]], [hi[0], hi[1]]);
                vertices.len() == 4 && Polygon::from_ccw_unchecked(vertices.clone()).hausdorff(&r) == 0.0
            }
            Domain::Disk { .. } => false,
        }
    }
}

/// Samples of an extended-real function on a regular box grid.
///
/// Values are stored row-major with the last axis fastest; `+∞` marks nodes
/// outside the domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridDoc", into = "GridDoc")]
pub struct GridFn {
    lo: Vec<f64>,
    hi: Vec<f64>,
    shape: Vec<usize>,
    values: Vec<f64>,
    convexified: bool,
    domain: Option<Domain>,
    filled: Vec<f64>,
    grads: OnceLock<Vec<Vec<f64>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridDoc {
    #[serde(rename = "box")]
    bounds: Vec<[f64; 2]>,
    shape: Vec<usize>,
    values: Vec<ExtReal>,
    #[serde(default)]
    convexified: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    domain: Option<Domain>,
}

impl TryFrom<GridDoc> for GridFn {
    type Error = Error;
    fn try_from(d: GridDoc) -> Result<Self> {
        let lo = d.bounds.iter().map(|b| b[0]).collect();
        let hi = d.bounds.iter().map(|b| b[1]).collect();
        let values = d.values.into_iter().map(f64::from).collect();
        let mut g = GridFn::new(lo, hi, d.shape, values)?;
        g.convexified = d.convexified;
        if let Some(dom) = d.domain {
            g = g.with_domain(dom)?;
        }
        Ok(g)
    }
}

impl From<GridFn> for GridDoc {
    fn from(g: GridFn) -> Self {
        GridDoc {
            bounds: g.lo.iter().zip(&g.hi).map(|(&a, &b)| [a, b]).collect(),
            shape: g.shape,
            values: g.values.into_iter().map(ExtReal::new).collect(),
            convexified: g.convexified,
            domain: g.domain,
        }
    }
}

impl GridFn {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, shape: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        let n = shape.len();
        if !(1..=2).contains(&n) {
            return Err(Error::Unsupported(format!("grid dimension {n}")));
        }
        if lo.len() != n || hi.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: lo.len().min(hi.len()),
            });
        }
        if shape.iter().any(|&s| s < 2) {
            return Err(Error::InvalidArgument("need at least 2 nodes per axis".into()));
        }
        if lo
            .iter()
            .zip(&hi)
            .any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite())
        {
            return Err(Error::InvalidArgument("grid box must be nondegenerate".into()));
        }
        let count: usize = shape.iter().product();
        if values.len() != count {
            return Err(Error::InvalidArgument(format!(
                "expected {count} values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| v.is_nan() || *v == f64::NEG_INFINITY) {
            return Err(Error::InvalidArgument("values must lie in R ∪ {+inf}".into()));
        }
        if !values.iter().any(|v| v.is_finite()) {
            return Err(Error::InvalidArgument("finite-value region is empty".into()));
        }
        let mut g = GridFn {
            lo,
            hi,
            shape,
            values,
            convexified: false,
            domain: None,
            filled: Vec::new(),
            grads: OnceLock::new(),
        };
        g.filled = g.extend_values();
        Ok(g)
    }

    /// Samples `f` at the nodes of the box grid; nodes outside `domain` are
    /// set to `+∞`.
    pub fn sample<F>(f: F, lo: &[f64], hi: &[f64], shape: &[usize], domain: Option<Domain>) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let n = shape.len();
        let count: usize = shape.iter().product();
        let steps: Vec<f64> = (0..n).map(|k| (hi[k] - lo[k]) / (shape[k] - 1) as f64).collect();
        let tol = 1e-12 * steps.iter().fold(0.0f64, |m, s| m.max(*s));
        let values: Vec<f64> = (0..count)
            .into_par_iter()
            .map(|idx| {
                let x = node_coords(idx, lo, &steps, shape);
                if let Some(d) = &domain {
                    if !d.contains(&x, tol) {
                        return f64::INFINITY;
                    }
                }
                f(&x)
            })
            .collect();
        let g = GridFn::new(lo.to_vec(), hi.to_vec(), shape.to_vec(), values)?;
        match domain {
            Some(d) => g.with_domain(d),
            None => Ok(g),
        }
    }

    pub fn with_domain(mut self, d: Domain) -> Result<Self> {
        if d.dimension() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                got: d.dimension(),
            });
        }
        self.domain = Some(d);
        Ok(self)
    }

    pub fn with_convexified(mut self, flag: bool) -> Self {
        self.convexified = flag;
        self
    }

    pub fn dimension(&self) -> usize {
        self.shape.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn convexified(&self) -> bool {
        self.convexified
    }

    pub fn domain(&self) -> Option<&Domain> {
        self.domain.as_ref()
    }

    pub fn step(&self, axis: usize) -> f64 {
        (self.hi[axis] - self.lo[axis]) / (self.shape[axis] - 1) as f64
    }

    pub fn steps(&self) -> Vec<f64> {
        (0..self.dimension()).map(|k| self.step(k)).collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn axis_coords(&self, axis: usize) -> Vec<f64> {
        let h = self.step(axis);
        (0..self.shape[axis])
            .map(|i| {
                if i + 1 == self.shape[axis] {
                    self.hi[axis]
                } else {
                    self.lo[axis] + i as f64 * h
                }
            })
            .collect()
    }

    pub fn node(&self, idx: usize) -> Vec<f64> {
        node_coords(idx, &self.lo, &self.steps(), &self.shape)
    }

    /// Flat index of the multi-index `ij`.
    pub fn index(&self, ij: &[usize]) -> usize {
        match ij.len() {
            1 => ij[0],
            _ => ij[0] * self.shape[1] + ij[1],
        }
    }

    /// Finite values extended past the domain boundary by linear
    /// extrapolation along grid lines; used only for interpolation.
    pub fn filled_values(&self) -> &[f64] {
        &self.filled
    }

    fn extend_values(&self) -> Vec<f64> {
        let mut f: Vec<f64> = self
            .values
            .iter()
            .map(|&v| if v.is_finite() { v } else { f64::NAN })
            .collect();
        if f.iter().all(|v| !v.is_nan()) {
            return f;
        }
        let shape = self.shape.clone();
        let n = shape.len();
        loop {
            let mut changed = false;
            let snapshot = f.clone();
            for idx in 0..f.len() {
                if !snapshot[idx].is_nan() {
                    continue;
                }
                let ij = multi_index(idx, &shape);
                let mut acc = 0.0;
                let mut cnt = 0;
                for axis in 0..n {
                    for dir in [-1i64, 1] {
                        let i1 = ij[axis] as i64 + dir;
                        let i2 = ij[axis] as i64 + 2 * dir;
                        if i2 < 0 || i2 >= shape[axis] as i64 {
                            continue;
                        }
                        let mut a = ij.clone();
                        a[axis] = i1 as usize;
                        let mut b = ij.clone();
                        b[axis] = i2 as usize;
                        let va = snapshot[flat_index(&a, &shape)];
                        let vb = snapshot[flat_index(&b, &shape)];
                        if !va.is_nan() && !vb.is_nan() {
                            acc += 2.0 * va - vb;
                            cnt += 1;
                        }
                    }
                }
                if cnt == 0 {
                    // fall back to any single finite neighbour
                    for axis in 0..n {
                        for dir in [-1i64, 1] {
                            let i1 = ij[axis] as i64 + dir;
                            if i1 < 0 || i1 >= shape[axis] as i64 {
                                continue;
                            }
                            let mut a = ij.clone();
                            a[axis] = i1 as usize;
                            let va = snapshot[flat_index(&a, &shape)];
                            if !va.is_nan() {
                                acc += va;
                                cnt += 1;
                            }
                        }
                    }
                }
                if cnt > 0 {
                    f[idx] = acc / cnt as f64;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        f
    }

    /// Cell index along `axis` and the local coordinate in `[0, 1]`.
    fn locate(&self, axis: usize, x: f64) -> (usize, f64) {
        let h = self.step(axis);
        let s = (x - self.lo[axis]) / h;
        let i = (s.floor().max(0.0) as usize).min(self.shape[axis] - 2);
        (i, (s - i as f64).clamp(0.0, 1.0))
    }

    fn in_box(&self, x: &[f64]) -> bool {
        (0..self.dimension()).all(|k| {
            let slack = 1e-12 * self.step(k);
            x[k] >= self.lo[k] - slack && x[k] <= self.hi[k] + slack
        })
    }

    /// Multilinear interpolation of the finite nodes; `+∞` outside the
    /// finite region (or outside the explicit domain, when one is set).
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        if x.len() != self.dimension() || !self.in_box(x) {
            return f64::INFINITY;
        }
        match &self.domain {
            Some(d) => {
                if !d.contains(x, 1e-12 * self.step(0)) {
                    return f64::INFINITY;
                }
                self.interpolate(&self.filled, x)
            }
            None => self.interpolate(&self.values, x),
        }
    }

    /// Interpolation that always uses the extended values (finite wherever
    /// any finite node exists).
    pub fn evaluate_extended(&self, x: &[f64]) -> f64 {
        self.interpolate(&self.filled, x)
    }

    fn interpolate(&self, vals: &[f64], x: &[f64]) -> f64 {
        match self.dimension() {
            1 => {
                let (i, s) = self.locate(0, x[0]);
                lerp_ext(vals[i], vals[i + 1], s)
            }
            _ => {
                let (i, s) = self.locate(0, x[0]);
                let (j, r) = self.locate(1, x[1]);
                let ny = self.shape[1];
                let v00 = vals[i * ny + j];
                let v01 = vals[i * ny + j + 1];
                let v10 = vals[(i + 1) * ny + j];
                let v11 = vals[(i + 1) * ny + j + 1];
                lerp_ext(lerp_ext(v00, v01, r), lerp_ext(v10, v11, r), s)
            }
        }
    }

    /// Gradient of the interpolant built from node gradients (central
    /// differences inside, one-sided where a neighbour is missing).
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let g = self.grads.get_or_init(|| self.node_gradients());
        let mut out = Vec::with_capacity(self.dimension());
        for comp in g {
            out.push(self.interpolate(comp, x));
        }
        out
    }

    /// Per-axis node gradients computed on the extended values.
    pub fn node_gradients(&self) -> Vec<Vec<f64>> {
        let n = self.dimension();
        let f = &self.filled;
        (0..n)
            .map(|axis| {
                let h = self.step(axis);
                let m = self.shape[axis];
                (0..f.len())
                    .map(|idx| {
                        let ij = multi_index(idx, &self.shape);
                        let at = |i: usize| {
                            let mut k = ij.clone();
                            k[axis] = i;
                            f[flat_index(&k, &self.shape)]
                        };
                        let i = ij[axis];
                        let c = at(i);
                        if c.is_nan() {
                            return f64::NAN;
                        }
                        let left = (i > 0).then(|| at(i - 1)).filter(|v| !v.is_nan());
                        let right = (i + 1 < m).then(|| at(i + 1)).filter(|v| !v.is_nan());
                        match (left, right) {
                            (Some(l), Some(r)) => (r - l) / (2.0 * h),
                            (None, Some(r)) => (r - c) / h,
                            (Some(l), None) => (c - l) / h,
                            (None, None) => 0.0,
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Largest finite-difference slope between adjacent finite nodes.
    pub fn max_discrete_gradient(&self) -> f64 {
        let mut m = 0.0f64;
        for axis in 0..self.dimension() {
            let h = self.step(axis);
            for idx in 0..self.values.len() {
                let ij = multi_index(idx, &self.shape);
                if ij[axis] + 1 >= self.shape[axis] {
                    continue;
                }
                let mut k = ij.clone();
                k[axis] += 1;
                let (a, b) = (self.values[idx], self.values[flat_index(&k, &self.shape)]);
                if a.is_finite() && b.is_finite() {
                    m = m.max(((b - a) / h).abs());
                }
            }
        }
        m
    }

    /// Discrete midpoint convexity along every grid line, up to `tol`.
    pub fn is_midpoint_convex(&self, tol: f64) -> bool {
        for axis in 0..self.dimension() {
            for idx in 0..self.values.len() {
                let ij = multi_index(idx, &self.shape);
                if ij[axis] == 0 || ij[axis] + 1 >= self.shape[axis] {
                    continue;
                }
                let mut l = ij.clone();
                l[axis] -= 1;
                let mut r = ij.clone();
                r[axis] += 1;
                let (a, b, c) = (
                    self.values[flat_index(&l, &self.shape)],
                    self.values[idx],
                    self.values[flat_index(&r, &self.shape)],
                );
                if a.is_finite() && c.is_finite() && (!b.is_finite() || a + c - 2.0 * b < -tol) {
                    return false;
                }
            }
        }
        true
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_finite_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Finite nodes as points.
    pub fn finite_nodes(&self) -> Vec<Vec<f64>> {
        (0..self.values.len())
            .filter(|&i| self.values[i].is_finite())
            .map(|i| self.node(i))
            .collect()
    }

    /// The explicit domain, or the convex hull of the finite nodes.
    pub fn effective_domain(&self) -> Domain {
        if let Some(d) = &self.domain {
            return d.clone();
        }
        let nodes = self.finite_nodes();
        if self.dimension() == 1 {
            let lo = nodes.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let hi = nodes.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            Domain::Interval { lo, hi }
        } else {
            let pts: Vec<Point2> = nodes.iter().map(|p| [p[0], p[1]]).collect();
            Domain::polygon(&Polygon::from_points(&pts))
        }
    }

    /// Sup-norm distance to `other` over nodes finite in both.
    pub fn sup_distance(&self, other: &GridFn) -> f64 {
        let mut m = 0.0f64;
        for idx in 0..self.values.len() {
            let x = self.node(idx);
            let a = self.values[idx];
            let b = other.evaluate(&x);
            if a.is_finite() && b.is_finite() {
                m = m.max((a - b).abs());
            }
        }
        m
    }
}

fn lerp_ext(a: f64, b: f64, s: f64) -> f64 {
    if s == 0.0 {
        return a;
    }
    if s == 1.0 {
        return b;
    }
    if a.is_nan() || b.is_nan() || a.is_infinite() || b.is_infinite() {
        return f64::INFINITY;
    }
    a + s * (b - a)
}

pub(crate) fn multi_index(idx: usize, shape: &[usize]) -> Vec<usize> {
    match shape.len() {
        1 => vec![idx],
        _ => vec![idx / shape[1], idx % shape[1]],
    }
}

pub(crate) fn flat_index(ij: &[usize], shape: &[usize]) -> usize {
    match shape.len() {
        1 => ij[0],
        _ => ij[0] * shape[1] + ij[1],
    }
}

fn node_coords(idx: usize, lo: &[f64], steps: &[f64], shape: &[usize]) -> Vec<f64> {
    multi_index(idx, shape)
        .iter()
        .enumerate()
        .map(|(k, &i)| lo[k] + i as f64 * steps[k])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bilinear_reproduces_affine() {
        let g = GridFn::sample(|x| 2.0 * x[0] - x[1] + 1.0, &[-1.0, -1.0], &[1.0, 1.0], &[5, 7], None).unwrap();
        for p in [[0.1, 0.2], [-0.93, 0.77], [1.0, 1.0]] {
            assert!((g.evaluate(&p) - (2.0 * p[0] - p[1] + 1.0)).abs() < 1e-14);
        }
        let grad = g.gradient(&[0.3, -0.4]);
        assert!((grad[0] - 2.0).abs() < 1e-12 && (grad[1] + 1.0).abs() < 1e-12);
        assert_eq!(g.evaluate(&[1.5, 0.0]), f64::INFINITY);
    }

    #[test]
    fn infinity_outside_domain() {
        let d = Domain::Disk {
            center: [0.0, 0.0],
            radius: 1.0,
        };
        let g = GridFn::sample(
            |x| x[0] * x[0] + x[1] * x[1],
            &[-1.0, -1.0],
            &[1.0, 1.0],
            &[21, 21],
            Some(d),
        )
        .unwrap();
        assert_eq!(g.values()[0], f64::INFINITY);
        assert_eq!(g.evaluate(&[0.9, 0.9]), f64::INFINITY);
        let v = g.evaluate(&[0.69, 0.69]);
        assert!((v - 2.0 * 0.69 * 0.69).abs() < 0.02, "{v}");
        assert!(g.filled_values().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn midpoint_convexity_check() {
        let g = GridFn::sample(|x| x[0] * x[0], &[-1.0], &[1.0], &[11], None).unwrap();
        assert!(g.is_midpoint_convex(1e-12));
        let h = GridFn::sample(|x| -(x[0] * x[0]), &[-1.0], &[1.0], &[11], None).unwrap();
        assert!(!h.is_midpoint_convex(1e-12));
        assert!((g.max_discrete_gradient() - 1.8).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip_with_infinity() {
        let g = GridFn::new(vec![0.0], vec![1.0], vec![3], vec![0.0, 1.0, f64::INFINITY]).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.contains("\"box\":[[0.0,1.0]]"));
        assert!(s.contains("null"));
        let back: GridFn = serde_json::from_str(&s).unwrap();
        assert_eq!(back.values()[2], f64::INFINITY);
        assert!(GridFn::new(vec![0.0], vec![1.0], vec![1], vec![0.0]).is_err());
    }
}
