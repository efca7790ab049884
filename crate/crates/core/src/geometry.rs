//! Planar convex geometry: hulls, half-plane clipping, support functions.
//!
//! Polygons are stored as counter-clockwise vertex lists. Degenerate
//! polygons are allowed: two vertices describe a segment (its two "edges"
//! have opposite normals) and one vertex describes a point.

use serde::{Deserialize, Serialize};

pub type Point2 = [f64; 2];

/// Relative tolerance used when deciding collinearity in hull construction.
pub const HULL_REL_TOL: f64 = 1e-12;

#[inline]
pub fn dot(a: Point2, b: Point2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn sub(a: Point2, b: Point2) -> Point2 {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn norm(a: Point2) -> f64 {
    a[0].hypot(a[1])
}

#[inline]
fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Unit vector at angle `theta`.
#[inline]
pub fn unit(theta: f64) -> Point2 {
    [theta.cos(), theta.sin()]
}

/// Convex hull (Andrew's monotone chain), CCW, collinear points removed.
pub fn convex_hull(points: &[Point2]) -> Vec<Point2> {
    let mut pts: Vec<Point2> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup_by(|a, b| a[0] == b[0] && a[1] == b[1]);
    if pts.len() <= 2 {
        return pts;
    }
    let scale = pts
        .iter()
        .fold(0.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()))
        .max(1.0);
    let tol = HULL_REL_TOL * scale * scale;
    let mut lower: Vec<Point2> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= tol {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point2> = Vec::with_capacity(pts.len());
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= tol {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// One edge of a polygon with its outer unit normal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub a: Point2,
    pub b: Point2,
    pub normal: Point2,
    pub length: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    vertices: Vec<Point2>,
}

impl Polygon {
    /// Convex hull of the given points.
    pub fn from_points(points: &[Point2]) -> Self {
        Polygon {
            vertices: convex_hull(points),
        }
    }

    /// Trusts the caller that `vertices` is already a CCW convex chain.
    pub fn from_ccw_unchecked(vertices: Vec<Point2>) -> Self {
        Polygon { vertices }
    }

    pub fn rect(lo: Point2, hi: Point2) -> Self {
        Polygon {
            vertices: vec![lo, [hi[0], lo[1]], hi, [lo[0], hi[1]]],
        }
    }

    /// Regular `m`-gon inscribed in the circle of radius `r` around `c`.
    pub fn regular(c: Point2, r: f64, m: usize) -> Self {
        let vertices = (0..m)
            .map(|k| {
                let u = unit(2.0 * std::f64::consts::PI * k as f64 / m as f64);
                [c[0] + r * u[0], c[1] + r * u[1]]
            })
            .collect();
        Polygon { vertices }
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        if v.len() < 3 {
            return 0.0;
        }
        let mut s = 0.0;
        for i in 0..v.len() {
            let j = (i + 1) % v.len();
            s += v[i][0] * v[j][1] - v[j][0] * v[i][1];
        }
        0.5 * s
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().iter().map(|e| e.length).sum()
    }

    pub fn edges(&self) -> Vec<Edge> {
        let v = &self.vertices;
        let m = v.len();
        if m < 2 {
            return Vec::new();
        }
        (0..m)
            .filter_map(|i| {
                let a = v[i];
                let b = v[(i + 1) % m];
                let d = sub(b, a);
                let length = norm(d);
                (length > 0.0).then(|| Edge {
                    a,
                    b,
                    normal: [d[1] / length, -d[0] / length],
                    length,
                })
            })
            .collect()
    }

    pub fn support(&self, nu: Point2) -> f64 {
        self.vertices
            .iter()
            .map(|&v| dot(v, nu))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn centroid(&self) -> Point2 {
        let a = self.area();
        let v = &self.vertices;
        if a.abs() < 1e-300 {
            let n = v.len().max(1) as f64;
            let s = v.iter().fold([0.0, 0.0], |s, p| [s[0] + p[0], s[1] + p[1]]);
            return [s[0] / n, s[1] / n];
        }
        let mut cx = 0.0;
        let mut cy = 0.0;
        for i in 0..v.len() {
            let j = (i + 1) % v.len();
            let w = v[i][0] * v[j][1] - v[j][0] * v[i][1];
            cx += (v[i][0] + v[j][0]) * w;
            cy += (v[i][1] + v[j][1]) * w;
        }
        [cx / (6.0 * a), cy / (6.0 * a)]
    }

    pub fn bbox(&self) -> (Point2, Point2) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    fn scale_hint(&self) -> f64 {
        let (lo, hi) = self.bbox();
        lo.iter()
            .chain(hi.iter())
            .fold(1.0f64, |m, x| if x.is_finite() { m.max(x.abs()) } else { m })
    }

    /// Closed membership with absolute slack `tol`.
    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        match self.vertices.len() {
            0 => false,
            1 => norm(sub(p, self.vertices[0])) <= tol,
            2 => point_segment_distance(p, self.vertices[0], self.vertices[1]) <= tol,
            _ => self.edges().iter().all(|e| dot(sub(p, e.a), e.normal) <= tol),
        }
    }

    /// Euclidean distance from `p` to the polygon (0 inside).
    pub fn distance(&self, p: Point2) -> f64 {
        match self.vertices.len() {
            0 => f64::INFINITY,
            1 => norm(sub(p, self.vertices[0])),
            2 => point_segment_distance(p, self.vertices[0], self.vertices[1]),
            _ => {
                if self.contains(p, 0.0) {
                    0.0
                } else {
                    self.edges()
                        .iter()
                        .map(|e| point_segment_distance(p, e.a, e.b))
                        .fold(f64::INFINITY, f64::min)
                }
            }
        }
    }

    /// Hausdorff distance between two convex polygons; attained at vertices.
    pub fn hausdorff(&self, other: &Polygon) -> f64 {
        let d1 = self.vertices.iter().map(|&v| other.distance(v)).fold(0.0, f64::max);
        let d2 = other.vertices.iter().map(|&v| self.distance(v)).fold(0.0, f64::max);
        d1.max(d2)
    }

    pub fn translate(&self, y: Point2) -> Polygon {
        Polygon {
            vertices: self.vertices.iter().map(|p| [p[0] + y[0], p[1] + y[1]]).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Polygon {
        Polygon {
            vertices: self.vertices.iter().map(|p| [s * p[0], s * p[1]]).collect(),
        }
    }

    pub fn reflect_y(&self) -> Polygon {
        let pts: Vec<Point2> = self.vertices.iter().map(|p| [p[0], -p[1]]).collect();
        Polygon::from_points(&pts)
    }

    /// Intersection with `{x : nu·x ≤ c}` (Sutherland–Hodgman step).
    pub fn clip(&self, nu: Point2, c: f64) -> Polygon {
        let v = &self.vertices;
        let tol = 1e-13 * self.scale_hint().max(c.abs());
        match v.len() {
            0 => return self.clone(),
            1 => {
                return if dot(nu, v[0]) <= c + tol {
                    self.clone()
                } else {
                    Polygon { vertices: vec![] }
                }
            }
            _ => {}
        }
        let m = v.len();
        let mut out: Vec<Point2> = Vec::with_capacity(m + 1);
        for i in 0..m {
            let p = v[i];
            let q = v[(i + 1) % m];
            let fp = dot(nu, p) - c;
            let fq = dot(nu, q) - c;
            let p_in = fp <= tol;
            let q_in = fq <= tol;
            if p_in {
                out.push(p);
            }
            if (p_in && fq > tol && fp < -tol) || (!p_in && q_in && fq < -tol) {
                let s = fp / (fp - fq);
                out.push([p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])]);
            }
        }
        Polygon {
            vertices: dedup_ring(out, tol.max(1e-14)),
        }
    }

    /// Radial function with respect to the origin, `max{s ≥ 0 : s·dir ∈ P}`.
    /// Only meaningful when the origin lies in the polygon.
    pub fn radial(&self, dir: Point2) -> f64 {
        self.edges()
            .iter()
            .filter_map(|e| {
                let den = dot(e.normal, dir);
                (den > 1e-300).then(|| dot(e.normal, e.a) / den)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Lower and upper boundary chains of a convex polygon, each running left
/// to right without vertical end segments.
#[derive(Clone, Debug)]
pub struct Chains {
    pub lower: Vec<Point2>,
    pub upper: Vec<Point2>,
}

impl Polygon {
    /// `None` for polygons with fewer than three vertices.
    pub fn chains(&self) -> Option<Chains> {
        let v = &self.vertices;
        let m = v.len();
        if m < 3 {
            return None;
        }
        let by = |f: fn(&Point2, &Point2) -> std::cmp::Ordering| (0..m).min_by(|&i, &j| f(&v[i], &v[j])).unwrap();
        let left_bottom = by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        let left_top = by(|a, b| a[0].total_cmp(&b[0]).then(b[1].total_cmp(&a[1])));
        let right_bottom = by(|a, b| b[0].total_cmp(&a[0]).then(a[1].total_cmp(&b[1])));
        let right_top = by(|a, b| b[0].total_cmp(&a[0]).then(b[1].total_cmp(&a[1])));
        let walk = |from: usize, to: usize| {
            let mut out = vec![v[from]];
            let mut i = from;
            while i != to {
                i = (i + 1) % m;
                out.push(v[i]);
            }
            out
        };
        let lower = walk(left_bottom, right_bottom);
        let mut upper = walk(right_top, left_top);
        upper.reverse();
        Some(Chains { lower, upper })
    }
}

impl Chains {
    pub fn x_range(&self) -> (f64, f64) {
        (self.lower[0][0], self.lower[self.lower.len() - 1][0])
    }

    fn at(chain: &[Point2], x: f64) -> f64 {
        if chain.len() == 1 {
            return chain[0][1];
        }
        let k = chain.partition_point(|p| p[0] <= x).clamp(1, chain.len() - 1);
        let (a, b) = (chain[k - 1], chain[k]);
        let s = ((x - a[0]) / (b[0] - a[0])).clamp(0.0, 1.0);
        a[1] + s * (b[1] - a[1])
    }

    /// Lower boundary at `x`, clamped to the x-range.
    pub fn lower_at(&self, x: f64) -> f64 {
        Self::at(&self.lower, x)
    }

    pub fn upper_at(&self, x: f64) -> f64 {
        Self::at(&self.upper, x)
    }
}

fn dedup_ring(mut pts: Vec<Point2>, tol: f64) -> Vec<Point2> {
    pts.dedup_by(|a, b| norm(sub(*a, *b)) <= tol);
    while pts.len() > 1 && norm(sub(pts[0], pts[pts.len() - 1])) <= tol {
        pts.pop();
    }
    pts
}

pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let d = sub(b, a);
    let l2 = dot(d, d);
    if l2 == 0.0 {
        return norm(sub(p, a));
    }
    let s = (dot(sub(p, a), d) / l2).clamp(0.0, 1.0);
    norm(sub(p, [a[0] + s * d[0], a[1] + s * d[1]]))
}

/// Intersection of the half-planes `{x : nu_k·x ≤ c_k}`.
///
/// Directions must positively span the plane. Returns `None` when the
/// intersection is empty. Starts from the triangle cut out by three
/// well-separated constraints and clips by the rest.
pub fn intersect_halfplanes(normals: &[Point2], offsets: &[f64]) -> Option<Polygon> {
    assert_eq!(normals.len(), offsets.len());
    let m = normals.len();
    assert!(m >= 3, "need at least three directions");
    let ang: Vec<f64> = normals.iter().map(|n| n[1].atan2(n[0])).collect();
    let i0 = 0;
    let pick = |target: f64| -> usize {
        (0..m)
            .min_by(|&a, &b| angle_gap(ang[a], target).total_cmp(&angle_gap(ang[b], target)))
            .unwrap()
    };
    let i1 = pick(ang[i0] + 2.0 * std::f64::consts::FRAC_PI_3);
    let i2 = pick(ang[i0] + 4.0 * std::f64::consts::FRAC_PI_3);
    let tri = [i0, i1, i2];
    // positive spanning: each consecutive pair turns left by less than π
    for k in 0..3 {
        let a = normals[tri[k]];
        let b = normals[tri[(k + 1) % 3]];
        if a[0] * b[1] - a[1] * b[0] <= 0.0 {
            panic!("direction set does not positively span the plane");
        }
    }
    let line_meet = |i: usize, j: usize| -> Point2 {
        let (a, b) = (normals[i], normals[j]);
        let det = a[0] * b[1] - a[1] * b[0];
        [
            (offsets[i] * b[1] - offsets[j] * a[1]) / det,
            (a[0] * offsets[j] - b[0] * offsets[i]) / det,
        ]
    };
    let v01 = line_meet(i0, i1);
    let v12 = line_meet(i1, i2);
    let v20 = line_meet(i2, i0);
    let scale = offsets.iter().fold(1.0f64, |s, c| s.max(c.abs()));
    if dot(normals[i2], v01) > offsets[i2] + 1e-12 * scale {
        return None;
    }
    let mut poly = Polygon {
        vertices: dedup_ring(vec![v20, v01, v12], 1e-14 * scale),
    };
    for k in 0..m {
        if k == i0 || k == i1 || k == i2 {
            continue;
        }
        poly = poly.clip(normals[k], offsets[k]);
        if poly.is_empty() {
            return None;
        }
    }
    Some(poly)
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * std::f64::consts::PI);
    d.min(2.0 * std::f64::consts::PI - d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chains_of_square_and_triangle() {
        let c = Polygon::rect([-1.0, -1.0], [1.0, 1.0]).chains().unwrap();
        assert_eq!(c.x_range(), (-1.0, 1.0));
        for x in [-1.0, 0.3, 1.0] {
            assert_eq!(c.lower_at(x), -1.0);
            assert_eq!(c.upper_at(x), 1.0);
        }
        let t = Polygon::from_points(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
            .chains()
            .unwrap();
        assert_eq!(t.upper_at(0.0), 1.0);
        assert!((t.upper_at(0.25) - 0.75).abs() < 1e-15);
        assert_eq!(t.lower_at(1.0), 0.0);
    }

    #[test]
    fn hull_drops_interior_and_collinear_points() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [0.5, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]];
        let h = convex_hull(&pts);
        assert_eq!(h, vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
    }

    #[test]
    fn unit_square_measures() {
        let sq = Polygon::rect([0.0, 0.0], [1.0, 1.0]);
        assert_eq!(sq.area(), 1.0);
        assert_eq!(sq.perimeter(), 4.0);
        let normals: Vec<Point2> = sq.edges().iter().map(|e| e.normal).collect();
        assert_eq!(normals, vec![[0.0, -1.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]]);
        assert_eq!(sq.support([1.0, 1.0]), 2.0);
    }

    #[test]
    fn segment_has_two_opposite_edges() {
        let seg = Polygon::from_points(&[[-1.0, 0.0], [1.0, 0.0]]);
        let e = seg.edges();
        assert_eq!(e.len(), 2);
        assert_eq!(e[0].normal, [0.0, -1.0]);
        assert_eq!(e[1].normal, [0.0, 1.0]);
        assert_eq!(e[0].length, 2.0);
    }

    #[test]
    fn clip_square_diagonal() {
        let sq = Polygon::rect([0.0, 0.0], [1.0, 1.0]);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let half = sq.clip([s, s], s);
        assert!((half.area() - 0.5).abs() < 1e-15);
        assert!(sq.clip([1.0, 0.0], -0.5).is_empty());
    }

    #[test]
    fn halfplanes_recover_square() {
        let m = 64;
        let normals: Vec<Point2> = (0..m)
            .map(|k| unit(2.0 * std::f64::consts::PI * k as f64 / m as f64))
            .collect();
        let sq = Polygon::rect([0.0, 0.0], [1.0, 1.0]);
        let offsets: Vec<f64> = normals.iter().map(|&n| sq.support(n)).collect();
        let w = intersect_halfplanes(&normals, &offsets).unwrap();
        assert!(w.hausdorff(&sq) < 1e-12);
        let bad: Vec<f64> = offsets.iter().map(|c| c - 2.0).collect();
        assert!(intersect_halfplanes(&normals, &bad).is_none());
    }

    #[test]
    fn radial_function_of_square() {
        let sq = Polygon::rect([-1.0, -1.0], [1.0, 1.0]);
        assert!((sq.radial([1.0, 0.0]) - 1.0).abs() < 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((sq.radial([s, s]) - 2f64.sqrt()).abs() < 1e-14);
    }
}
