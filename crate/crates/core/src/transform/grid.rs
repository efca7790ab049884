//! Discrete Legendre transforms on regular grids and the grid-track
//! perturbation `u_t = (u* + tζ)*`.

use rayon::prelude::*;
use serde::Serialize;

use super::perturbation::Perturbation;
use crate::convexfn::{Domain, GridFn};
use crate::error::{Error, Result};
use crate::geometry::Polygon;
use crate::wulff;

/// `g_k = max_j (x_j y_k − f_j)` over nodes with finite `f_j`, for sorted
/// `xs` and `ys`. Runs in `O(len(xs) + len(ys))`: lower hull of the
/// samples, then a merge of the hull slopes with the dual points.
pub fn discrete_conjugate_1d(xs: &[f64], fs: &[f64], ys: &[f64], out: &mut [f64]) {
    let mut hx: Vec<f64> = Vec::with_capacity(xs.len());
    let mut hf: Vec<f64> = Vec::with_capacity(xs.len());
    for (&x, &f) in xs.iter().zip(fs) {
        if !f.is_finite() {
            continue;
        }
        while hx.len() >= 2 {
            let k = hx.len();
            let (x0, f0, x1, f1) = (hx[k - 2], hf[k - 2], hx[k - 1], hf[k - 1]);
            // drop the middle point if it lies on or above the chord
            if (f1 - f0) * (x - x0) >= (f - f0) * (x1 - x0) {
                hx.pop();
                hf.pop();
            } else {
                break;
            }
        }
        hx.push(x);
        hf.push(f);
    }
    if hx.is_empty() {
        out.iter_mut().for_each(|v| *v = f64::NEG_INFINITY);
        return;
    }
    let mut j = 0;
    for (k, &y) in ys.iter().enumerate() {
        while j + 1 < hx.len() && (hf[j + 1] - hf[j]) <= y * (hx[j + 1] - hx[j]) {
            j += 1;
        }
        out[k] = hx[j] * y - hf[j];
    }
}

/// Separable discrete conjugate of node values on the tensor grid
/// `x_axes` evaluated on the tensor grid `y_axes` (n ∈ {1, 2}).
pub fn conjugate_values(x_axes: &[Vec<f64>], vals: &[f64], y_axes: &[Vec<f64>]) -> Vec<f64> {
    match x_axes.len() {
        1 => {
            let mut out = vec![0.0; y_axes[0].len()];
            discrete_conjugate_1d(&x_axes[0], vals, &y_axes[0], &mut out);
            out
        }
        2 => {
            let (n0, n1) = (x_axes[0].len(), x_axes[1].len());
            let (m0, m1) = (y_axes[0].len(), y_axes[1].len());
            // stage 1: conjugate along the second axis, row by row
            let rows: Vec<Vec<f64>> = (0..n0)
                .into_par_iter()
                .map(|i| {
                    let mut g = vec![0.0; m1];
                    discrete_conjugate_1d(&x_axes[1], &vals[i * n1..(i + 1) * n1], &y_axes[1], &mut g);
                    // negate so the second stage is again a conjugate
                    g.iter_mut().for_each(|v| *v = -*v);
                    g
                })
                .collect();
            // stage 2: conjugate along the first axis, column by column
            let cols: Vec<Vec<f64>> = (0..m1)
                .into_par_iter()
                .map(|k| {
                    let col: Vec<f64> = (0..n0).map(|i| rows[i][k]).collect();
                    let mut out = vec![0.0; m0];
                    discrete_conjugate_1d(&x_axes[0], &col, &y_axes[0], &mut out);
                    out
                })
                .collect();
            let mut out = vec![0.0; m0 * m1];
            for (k, col) in cols.iter().enumerate() {
                for (i, v) in col.iter().enumerate() {
                    out[i * m1 + k] = *v;
                }
            }
            out
        }
        n => panic!("unsupported grid dimension {n}"),
    }
}

fn axes(lo: &[f64], hi: &[f64], shape: &[usize]) -> Vec<Vec<f64>> {
    (0..shape.len())
        .map(|k| {
            let h = (hi[k] - lo[k]) / (shape[k] - 1) as f64;
            (0..shape[k])
                .map(|i| if i + 1 == shape[k] { hi[k] } else { lo[k] + i as f64 * h })
                .collect()
        })
        .collect()
}

/// Options for the dual grid.
#[derive(Clone, Debug)]
pub struct DualOptions {
    /// Extra slope range added on each side of `[−L, L]`.
    pub margin: f64,
    /// Dual node counts (defaults to the primal shape).
    pub shape: Option<Vec<usize>>,
    /// Explicit dual box, overriding the automatic choice.
    pub bounds: Option<(Vec<f64>, Vec<f64>)>,
}

impl Default for DualOptions {
    fn default() -> Self {
        DualOptions {
            margin: 1.0,
            shape: None,
            bounds: None,
        }
    }
}

/// Grid conjugate together with the dual-box diagnostic.
#[derive(Clone, Debug)]
pub struct GridConjugate {
    pub grid: GridFn,
    /// Set when the dual box does not cover the discrete slopes of `u`.
    pub warning: bool,
}

fn dual_box(u: &GridFn, opts: &DualOptions) -> (Vec<f64>, Vec<f64>, bool) {
    let l = u.max_discrete_gradient();
    let n = u.dimension();
    match &opts.bounds {
        Some((lo, hi)) => {
            let warn = (0..n).any(|k| lo[k] > -l || hi[k] < l);
            (lo.clone(), hi.clone(), warn)
        }
        None => (vec![-l - opts.margin; n], vec![l + opts.margin; n], false),
    }
}

/// Grid Legendre transform on the dual box `[−L−1, L+1]ⁿ`, `L` the largest
/// discrete slope of `u`.
pub fn legendre_grid(u: &GridFn, opts: &DualOptions) -> Result<GridConjugate> {
    let (lo, hi, warning) = dual_box(u, opts);
    let shape = opts.shape.clone().unwrap_or_else(|| u.shape().to_vec());
    let x_axes: Vec<Vec<f64>> = (0..u.dimension()).map(|k| u.axis_coords(k)).collect();
    let y_axes = axes(&lo, &hi, &shape);
    let vals = conjugate_values(&x_axes, u.values(), &y_axes);
    let grid = GridFn::new(lo, hi, shape, vals)?.with_convexified(true);
    Ok(GridConjugate { grid, warning })
}

fn mask_outside(lo: &[f64], hi: &[f64], shape: &[usize], vals: &mut [f64], dom: &Domain) {
    let ax = axes(lo, hi, shape);
    let tol = 1e-9 * (0..shape.len()).map(|k| hi[k] - lo[k]).fold(0.0, f64::max) / shape[0] as f64;
    for (idx, v) in vals.iter_mut().enumerate() {
        let x: Vec<f64> = match shape.len() {
            1 => vec![ax[0][idx]],
            _ => vec![ax[0][idx / shape[1]], ax[1][idx % shape[1]]],
        };
        if !dom.contains(&x, tol) {
            *v = f64::INFINITY;
        }
    }
}

/// `u**` on the grid of `u`, restricted to the effective domain of `u`.
pub fn biconjugate_grid(u: &GridFn) -> Result<GridFn> {
    let c = legendre_grid(u, &DualOptions::default())?.grid;
    let x_axes: Vec<Vec<f64>> = (0..u.dimension()).map(|k| u.axis_coords(k)).collect();
    let y_axes: Vec<Vec<f64>> = (0..c.dimension()).map(|k| c.axis_coords(k)).collect();
    let mut vals = conjugate_values(&y_axes, c.values(), &x_axes);
    let dom = u.effective_domain();
    mask_outside(u.lo(), u.hi(), u.shape(), &mut vals, &dom);
    Ok(GridFn::new(u.lo().to_vec(), u.hi().to_vec(), u.shape().to_vec(), vals)?
        .with_domain(dom)?
        .with_convexified(true))
}

/// `t □ u` on the grid track (`t > 0`; the indicator of the origin is not
/// representable on a nondegenerate grid).
pub fn epi_scale_grid(t: f64, u: &GridFn) -> Result<GridFn> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::InvalidArgument(format!(
            "epi-multiplication needs t >= 0, got {t}"
        )));
    }
    if t == 0.0 {
        return Err(Error::Unsupported(
            "0 □ u is the indicator of a point; use the exact track".into(),
        ));
    }
    let lo: Vec<f64> = u.lo().iter().map(|v| v * t).collect();
    let hi: Vec<f64> = u.hi().iter().map(|v| v * t).collect();
    let vals: Vec<f64> = u.values().iter().map(|v| v * t).collect();
    let mut g = GridFn::new(lo, hi, u.shape().to_vec(), vals)?.with_convexified(u.convexified());
    if let Some(d) = u.domain() {
        g = g.with_domain(scale_domain(d, t))?;
    }
    Ok(g)
}

fn scale_domain(d: &Domain, t: f64) -> Domain {
    match d {
        Domain::Interval { lo, hi } => Domain::Interval { lo: lo * t, hi: hi * t },
        Domain::Polygon { vertices } => Domain::Polygon {
            vertices: vertices.iter().map(|p| [p[0] * t, p[1] * t]).collect(),
        },
        Domain::Disk { center, radius } => Domain::Disk {
            center: [center[0] * t, center[1] * t],
            radius: radius * t,
        },
    }
}

fn polygonize(d: &Domain) -> Polygon {
    match d {
        Domain::Polygon { vertices } => Polygon::from_ccw_unchecked(vertices.clone()),
        Domain::Disk { center, radius } => Polygon::regular(*center, *radius, 512),
        Domain::Interval { .. } => unreachable!("planar domains only"),
    }
}

fn minkowski_sum(a: &Domain, b: &Domain) -> Domain {
    match (a, b) {
        (Domain::Interval { lo: a0, hi: a1 }, Domain::Interval { lo: b0, hi: b1 }) => Domain::Interval {
            lo: a0 + b0,
            hi: a1 + b1,
        },
        (Domain::Disk { center: c, radius: r }, Domain::Disk { center: d, radius: s }) => Domain::Disk {
            center: [c[0] + d[0], c[1] + d[1]],
            radius: r + s,
        },
        _ => {
            let (p, q) = (polygonize(a), polygonize(b));
            let pts: Vec<[f64; 2]> = p
                .vertices()
                .iter()
                .flat_map(|x| q.vertices().iter().map(move |y| [x[0] + y[0], x[1] + y[1]]))
                .collect();
            Domain::polygon(&Polygon::from_points(&pts))
        }
    }
}

/// `u □ v = (u* + v*)*` on the grid track.
pub fn inf_conv_grid(u: &GridFn, v: &GridFn) -> Result<GridFn> {
    if u.dimension() != v.dimension() {
        return Err(Error::DimensionMismatch {
            expected: u.dimension(),
            got: v.dimension(),
        });
    }
    let n = u.dimension();
    let l = u.max_discrete_gradient().max(v.max_discrete_gradient()) + 1.0;
    let bounds = Some((vec![-l; n], vec![l; n]));
    let shape: Vec<usize> = (0..n).map(|k| u.shape()[k].max(v.shape()[k])).collect();
    let opts = DualOptions {
        margin: 1.0,
        shape: Some(shape.clone()),
        bounds,
    };
    let cu = legendre_grid(u, &opts)?.grid;
    let cv = legendre_grid(v, &opts)?.grid;
    let sum: Vec<f64> = cu.values().iter().zip(cv.values()).map(|(a, b)| a + b).collect();
    let dom = minkowski_sum(&u.effective_domain(), &v.effective_domain());
    let (lo, hi) = dom.bbox();
    let y_axes: Vec<Vec<f64>> = (0..n).map(|k| cu.axis_coords(k)).collect();
    let x_axes = axes(&lo, &hi, &shape);
    let mut vals = conjugate_values(&y_axes, &sum, &x_axes);
    mask_outside(&lo, &hi, &shape, &mut vals, &dom);
    Ok(GridFn::new(lo, hi, shape, vals)?
        .with_domain(dom)?
        .with_convexified(true))
}

/// Options for the grid perturbation.
#[derive(Clone, Debug)]
pub struct PerturbOptions {
    pub dual: DualOptions,
    /// Output node counts (defaults to the input shape).
    pub out_shape: Option<Vec<usize>>,
    /// Direction count for planar domain evolution.
    pub directions: usize,
}

impl Default for PerturbOptions {
    fn default() -> Self {
        PerturbOptions {
            dual: DualOptions::default(),
            out_shape: None,
            directions: wulff::DEFAULT_DIRECTIONS_S1,
        }
    }
}

/// Dual samples `u* + tζ` reused across several `t`.
pub struct DualSamples {
    y_axes: Vec<Vec<f64>>,
    conj: Vec<f64>,
    zeta: Vec<f64>,
}

impl DualSamples {
    pub fn new(u: &GridFn, zeta: &Perturbation, opts: &DualOptions) -> Result<Self> {
        let c = legendre_grid(u, opts)?.grid;
        let y_axes: Vec<Vec<f64>> = (0..c.dimension()).map(|k| c.axis_coords(k)).collect();
        let zeta_vals: Vec<f64> = (0..c.len()).map(|i| zeta.evaluate(&c.node(i))).collect();
        Ok(DualSamples {
            y_axes,
            conj: c.values().to_vec(),
            zeta: zeta_vals,
        })
    }

    /// `(u* + tζ)*` at the nodes of the box grid `[lo, hi]`.
    pub fn conjugate_onto(&self, t: f64, lo: &[f64], hi: &[f64], shape: &[usize]) -> Vec<f64> {
        let f: Vec<f64> = self.conj.iter().zip(&self.zeta).map(|(c, z)| c + t * z).collect();
        let x_axes = axes(lo, hi, shape);
        conjugate_values(&self.y_axes, &f, &x_axes)
    }
}

/// The family `t ↦ (u* + tζ)*` on the grid track, sharing one dual grid
/// across all `t`.
pub struct GridFlow {
    domain: Domain,
    zeta: Perturbation,
    samples: DualSamples,
    shape: Vec<usize>,
    directions: usize,
}

impl GridFlow {
    pub fn new(u: &GridFn, zeta: &Perturbation, opts: &PerturbOptions) -> Result<Self> {
        Ok(GridFlow {
            domain: u.effective_domain(),
            zeta: zeta.clone(),
            samples: DualSamples::new(u, zeta, &opts.dual)?,
            shape: opts.out_shape.clone().unwrap_or_else(|| u.shape().to_vec()),
            directions: opts.directions,
        })
    }

    /// `u_t` on the bounding box of `[h_dom(u) + tρ_ζ]`, with `+∞` outside
    /// that domain.
    pub fn at(&self, t: f64) -> Result<GridFn> {
        let dom_t = wulff::evolve_domain(&self.domain, &self.zeta, t, self.directions)?;
        let (lo, hi) = dom_t.bbox();
        let mut vals = self.samples.conjugate_onto(t, &lo, &hi, &self.shape);
        mask_outside(&lo, &hi, &self.shape, &mut vals, &dom_t);
        if vals.iter().all(|v| !v.is_finite()) {
            return Err(Error::PerturbationTooLarge);
        }
        Ok(GridFn::new(lo, hi, self.shape.clone(), vals)?
            .with_domain(dom_t)?
            .with_convexified(true))
    }
}

/// `u_t = (u* + tζ)*` on the grid track.
///
/// The output grid covers the bounding box of the evolved domain
/// `[h_dom(u) + tρ_ζ]` with the input node counts; nodes outside it are
/// `+∞`.
pub fn perturb_grid(u: &GridFn, zeta: &Perturbation, t: f64, opts: &PerturbOptions) -> Result<GridFn> {
    GridFlow::new(u, zeta, opts)?.at(t)
}

/// Max-norm of the Hopf–Lax residual `∂_t w + ζ(∇_x w)` of
/// `w(t, ·) = (u* + tζ)*`.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct HopfLaxReport {
    pub t: f64,
    pub delta: f64,
    pub h: f64,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub nodes: usize,
}

/// Central differences in `t` (step `delta`) and `x` on a common grid over
/// the domain at time `t`; only nodes at depth ≥ 2h inside the domains at
/// `t − δ`, `t`, `t + δ` are used.
pub fn hopf_lax_residual(
    u: &GridFn,
    zeta: &Perturbation,
    t: f64,
    delta: f64,
    opts: &PerturbOptions,
) -> Result<HopfLaxReport> {
    let dom = u.effective_domain();
    let doms = [
        wulff::evolve_domain(&dom, zeta, t - delta, opts.directions)?,
        wulff::evolve_domain(&dom, zeta, t, opts.directions)?,
        wulff::evolve_domain(&dom, zeta, t + delta, opts.directions)?,
    ];
    let (lo, hi) = doms[1].bbox();
    let shape = opts.out_shape.clone().unwrap_or_else(|| u.shape().to_vec());
    let samples = DualSamples::new(u, zeta, &opts.dual)?;
    let wm = samples.conjugate_onto(t - delta, &lo, &hi, &shape);
    let w0 = samples.conjugate_onto(t, &lo, &hi, &shape);
    let wp = samples.conjugate_onto(t + delta, &lo, &hi, &shape);
    let ax = axes(&lo, &hi, &shape);
    let n = shape.len();
    let steps: Vec<f64> = (0..n).map(|k| (hi[k] - lo[k]) / (shape[k] - 1) as f64).collect();
    let h = steps.iter().fold(0.0f64, |m, s| m.max(*s));
    let mut max_r = 0.0f64;
    let mut sum_r = 0.0;
    let mut count = 0usize;
    let total: usize = shape.iter().product();
    for idx in 0..total {
        let ij = crate::convexfn::multi_index(idx, &shape);
        if (0..n).any(|k| ij[k] == 0 || ij[k] + 1 >= shape[k]) {
            continue;
        }
        let x: Vec<f64> = (0..n).map(|k| ax[k][ij[k]]).collect();
        if doms.iter().any(|d| wulff::domain_depth(d, &x) < 2.0 * h) {
            continue;
        }
        let grad: Vec<f64> = (0..n)
            .map(|k| {
                let mut a = ij.clone();
                a[k] -= 1;
                let mut b = ij.clone();
                b[k] += 1;
                let fa = w0[crate::convexfn::flat_index(&a, &shape)];
                let fb = w0[crate::convexfn::flat_index(&b, &shape)];
                (fb - fa) / (2.0 * steps[k])
            })
            .collect();
        let dt = (wp[idx] - wm[idx]) / (2.0 * delta);
        let r = (dt + zeta.evaluate(&grad)).abs();
        max_r = max_r.max(r);
        sum_r += r;
        count += 1;
    }
    Ok(HopfLaxReport {
        t,
        delta,
        h,
        max_residual: max_r,
        mean_residual: if count > 0 { sum_r / count as f64 } else { 0.0 },
        nodes: count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discrete_conjugate_matches_brute_force() {
        let xs: Vec<f64> = (0..41).map(|i| -1.0 + i as f64 * 0.05).collect();
        let fs: Vec<f64> = xs.iter().map(|x| (x - 0.3f64).abs() + x * x).collect();
        let ys: Vec<f64> = (0..57).map(|i| -4.0 + i as f64 * 0.15).collect();
        let mut out = vec![0.0; ys.len()];
        discrete_conjugate_1d(&xs, &fs, &ys, &mut out);
        for (k, &y) in ys.iter().enumerate() {
            let b = xs
                .iter()
                .zip(&fs)
                .map(|(x, f)| x * y - f)
                .fold(f64::NEG_INFINITY, f64::max);
            assert!((out[k] - b).abs() < 1e-14);
        }
    }

    #[test]
    fn grid_conjugate_of_half_square() {
        let u = GridFn::sample(|x| 0.5 * x[0] * x[0], &[-4.0], &[4.0], &[801], None).unwrap();
        let c = legendre_grid(&u, &DualOptions::default()).unwrap();
        for y in [-2.0, -0.5, 0.0, 1.3] {
            assert!((c.grid.evaluate(&[y]) - 0.5 * y * y).abs() < 1e-3);
        }
    }

    #[test]
    fn separable_conjugate_2d() {
        let u = GridFn::sample(
            |x| x[0] * x[0] + x[1] * x[1],
            &[-1.0, -1.0],
            &[1.0, 1.0],
            &[81, 81],
            None,
        )
        .unwrap();
        let c = legendre_grid(&u, &DualOptions::default()).unwrap().grid;
        let one_d = |y: f64| if y.abs() <= 2.0 { y * y / 4.0 } else { y.abs() - 1.0 };
        for y in [[0.0, 0.0], [1.0, -2.5], [2.9, 0.4]] {
            assert!((c.evaluate(&y) - one_d(y[0]) - one_d(y[1])).abs() < 2e-3);
        }
    }

    #[test]
    fn biconjugate_grid_is_convex_envelope() {
        let w = GridFn::sample(
            |x| (x[0] * x[0]).min((x[0] - 1.0) * (x[0] - 1.0)),
            &[-1.0],
            &[2.0],
            &[301],
            None,
        )
        .unwrap();
        let e = biconjugate_grid(&w).unwrap();
        assert!(e.is_midpoint_convex(1e-12));
        for x in [-0.8f64, 0.1, 0.5, 0.9, 1.7] {
            let want = if x < 0.0 {
                x * x
            } else if x > 1.0 {
                (x - 1.0) * (x - 1.0)
            } else {
                0.0
            };
            assert!((e.evaluate(&[x]) - want).abs() < 1e-3, "{x}");
        }
    }
}
