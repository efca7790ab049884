//! Exact one-dimensional polyhedral functions: lower convex envelopes of
//! finitely many points, and their max-of-affine conjugates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative collinearity tolerance for envelope retention.
pub const CANON_REL_TOL: f64 = 1e-12;

/// Piecewise-linear convex function with compact domain, stored as the
/// sorted breakpoints of its lower envelope.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolyhedralDoc", into = "PolyhedralDoc")]
pub struct PolyhedralFn {
    xs: Vec<f64>,
    zs: Vec<f64>,
}

/// Serialized form: every generator is `[x, z]`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyhedralDoc {
    dimension: usize,
    generators: Vec<Vec<f64>>,
}

impl TryFrom<PolyhedralDoc> for PolyhedralFn {
    type Error = Error;
    fn try_from(doc: PolyhedralDoc) -> Result<Self> {
        if doc.dimension != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: doc.dimension,
            });
        }
        let pts = doc
            .generators
            .iter()
            .map(|g| match g.as_slice() {
                [x, z] => Ok((*x, *z)),
                _ => Err(Error::InvalidArgument(format!(
                    "generator must be [x, z], got {} numbers",
                    g.len()
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        canonicalize(&pts)
    }
}

impl From<PolyhedralFn> for PolyhedralDoc {
    fn from(u: PolyhedralFn) -> Self {
        PolyhedralDoc {
            dimension: 1,
            generators: u.xs.iter().zip(&u.zs).map(|(&x, &z)| vec![x, z]).collect(),
        }
    }
}

/// Lower convex envelope of the points `(x_i, z_i)`.
pub fn canonicalize(points: &[(f64, f64)]) -> Result<PolyhedralFn> {
    if points.is_empty() {
        return Err(Error::EmptyGenerators);
    }
    if points.iter().any(|(x, z)| !x.is_finite() || !z.is_finite()) {
        return Err(Error::InvalidArgument("generators must be finite".into()));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup_by(|later, first| later.0 == first.0);
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for p in pts {
        while hull.len() >= 2 {
            let o = hull[hull.len() - 2];
            let a = hull[hull.len() - 1];
            let (ax, az) = (a.0 - o.0, a.1 - o.1);
            let (bx, bz) = (p.0 - a.0, p.1 - a.1);
            let cross = ax * bz - az * bx;
            let scale = ax.hypot(az) * bx.hypot(bz);
            if cross <= CANON_REL_TOL * scale {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let (xs, zs) = hull.into_iter().unzip();
    Ok(PolyhedralFn { xs, zs })
}

impl PolyhedralFn {
    /// Indicator of `[lo, hi]`.
    pub fn indicator(lo: f64, hi: f64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidArgument(format!("empty interval [{lo}, {hi}]")));
        }
        canonicalize(&[(lo, 0.0), (hi, 0.0)])
    }

    pub fn dimension(&self) -> usize {
        1
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.zs
    }

    pub fn generators(&self) -> Vec<(f64, f64)> {
        self.xs.iter().copied().zip(self.zs.iter().copied()).collect()
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    /// Slopes between consecutive breakpoints (strictly increasing).
    pub fn slopes(&self) -> Vec<f64> {
        self.xs
            .windows(2)
            .zip(self.zs.windows(2))
            .map(|(x, z)| (z[1] - z[0]) / (x[1] - x[0]))
            .collect()
    }

    pub fn max_value(&self) -> f64 {
        self.zs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.zs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest absolute slope; zero for a single point.
    pub fn lipschitz(&self) -> f64 {
        self.slopes().iter().fold(0.0, |m, s| m.max(s.abs()))
    }

    /// Envelope value on the domain, `+∞` outside.
    pub fn evaluate(&self, x: f64) -> f64 {
        let (lo, hi) = self.domain();
        if !(lo..=hi).contains(&x) {
            return f64::INFINITY;
        }
        if self.xs.len() == 1 {
            return self.zs[0];
        }
        let k = self.xs.partition_point(|&b| b <= x).clamp(1, self.xs.len() - 1);
        let (x0, x1) = (self.xs[k - 1], self.xs[k]);
        let (z0, z1) = (self.zs[k - 1], self.zs[k]);
        z0 + (z1 - z0) * (x - x0) / (x1 - x0)
    }

    /// `u*(y) = max_i (x_i y − z_i)`.
    pub fn conjugate(&self) -> MaxAffine {
        MaxAffine {
            slopes: self.xs.clone(),
            intercepts: self.zs.iter().map(|z| -z).collect(),
        }
    }

    /// Support function of the domain, `h_dom(y)`.
    pub fn domain_support(&self, y: f64) -> f64 {
        let (lo, hi) = self.domain();
        (lo * y).max(hi * y)
    }
}

/// `y ↦ max_i (s_i y + b_i)`: the conjugate representation on the exact
/// track.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxAffine {
    pub slopes: Vec<f64>,
    pub intercepts: Vec<f64>,
}

impl MaxAffine {
    pub fn evaluate(&self, y: f64) -> f64 {
        self.slopes
            .iter()
            .zip(&self.intercepts)
            .map(|(s, b)| s * y + b)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Conjugate back to the primal side: the lower envelope of
    /// `(s_i, −b_i)`.
    pub fn conjugate(&self) -> Result<PolyhedralFn> {
        let pts: Vec<(f64, f64)> = self
            .slopes
            .iter()
            .zip(&self.intercepts)
            .map(|(&s, &b)| (s, -b))
            .collect();
        canonicalize(&pts)
    }

    /// Pointwise sum, as the max over all pairs.
    pub fn add(&self, other: &MaxAffine) -> MaxAffine {
        let mut slopes = Vec::with_capacity(self.slopes.len() * other.slopes.len());
        let mut intercepts = Vec::with_capacity(slopes.capacity());
        for (s, b) in self.slopes.iter().zip(&self.intercepts) {
            for (s2, b2) in other.slopes.iter().zip(&other.intercepts) {
                slopes.push(s + s2);
                intercepts.push(b + b2);
            }
        }
        MaxAffine { slopes, intercepts }
    }

    /// `t·f` for `t ≥ 0`; `t = 0` gives the zero function.
    pub fn scale(&self, t: f64) -> MaxAffine {
        assert!(t >= 0.0);
        if t == 0.0 {
            return MaxAffine {
                slopes: vec![0.0],
                intercepts: vec![0.0],
            };
        }
        MaxAffine {
            slopes: self.slopes.iter().map(|s| t * s).collect(),
            intercepts: self.intercepts.iter().map(|b| t * b).collect(),
        }
    }
}
