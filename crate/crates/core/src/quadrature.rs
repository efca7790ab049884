//! Gauss–Legendre rules, adaptive bisection, the radial substitution for
//! `|x|^{q-1}` singularities, and integration over convex polygons.

use std::sync::OnceLock;

use crate::geometry::{Point2, Polygon};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn rule(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static R8: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    static R16: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    match n {
        8 => R8.get_or_init(|| gauss_legendre(8)),
        16 => R16.get_or_init(|| gauss_legendre(16)),
        _ => panic!("only the 8- and 16-point rules are cached"),
    }
}

/// Order-8 Gauss–Legendre on `[a, b]`.
pub fn gl8<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    gl_panel(f, a, b, 8)
}

/// Order-16 Gauss–Legendre on `[a, b]`.
pub fn gl16<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    gl_panel(f, a, b, 16)
}

fn gl_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, n: usize) -> f64 {
    let (x, w) = rule(n);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for k in 0..n {
        s += w[k] * f(c + h * x[k]);
    }
    s * h
}

/// Composite order-8 rule with `panels` equal panels.
pub fn composite_gl8<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let parts: Vec<f64> = (0..panels)
        .map(|k| gl8(f, a + k as f64 * h, a + (k + 1) as f64 * h))
        .collect();
    pairwise_sum(&parts)
}

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Adaptive bisection with the order-8 rule: a panel is accepted once the
/// whole-panel value and the sum over its halves agree to
/// `max(abs_tol, rel_tol·|value|)`.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Estimate {
    if a == b {
        return Estimate { value: 0.0, error: 0.0 };
    }
    let whole = gl8(f, a, b);
    let mut err = 0.0;
    let v = adaptive_rec(f, a, b, whole, rel_tol, abs_tol.max(0.0), 0, &mut err);
    Estimate { value: v, error: err }
}

#[allow(clippy::too_many_arguments)]
fn adaptive_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    whole: f64,
    rel_tol: f64,
    abs_tol: f64,
    depth: u32,
    err: &mut f64,
) -> f64 {
    let m = 0.5 * (a + b);
    let left = gl8(f, a, m);
    let right = gl8(f, m, b);
    let halves = left + right;
    let diff = (halves - whole).abs();
    if diff <= abs_tol.max(rel_tol * halves.abs()) || depth >= 48 || m <= a || m >= b {
        *err += diff;
        return halves;
    }
    adaptive_rec(f, a, m, left, rel_tol, 0.5 * abs_tol, depth + 1, err)
        + adaptive_rec(f, m, b, right, rel_tol, 0.5 * abs_tol, depth + 1, err)
}

/// `∫_a^∞ f` through `x = a + s/(1-s)`.
pub fn semi_infinite<F: Fn(f64) -> f64>(f: &F, a: f64, rel_tol: f64, abs_tol: f64) -> Estimate {
    let g = |s: f64| {
        let one_minus = 1.0 - s;
        if one_minus <= 0.0 {
            return 0.0;
        }
        let x = a + s / one_minus;
        let v = f(x) / (one_minus * one_minus);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    adaptive(&g, 0.0, 1.0, rel_tol, abs_tol)
}

/// `∫_c^d g(x) x^{q-1} dx` for `0 ≤ c < d`, computed as
/// `(1/q) ∫_{c^q}^{d^q} g(w^{1/q}) dw`, which removes the endpoint
/// singularity at the origin when `q < 1`.
pub fn radial<F: Fn(f64) -> f64>(g: &F, c: f64, d: f64, q: f64, rel_tol: f64, abs_tol: f64) -> Estimate {
    assert!(c >= 0.0 && d >= c && q > 0.0);
    let inv = 1.0 / q;
    let h = |w: f64| g(w.max(0.0).powf(inv));
    let e = adaptive(&h, c.powf(q), d.powf(q), rel_tol, abs_tol * q);
    Estimate {
        value: e.value * inv,
        error: e.error * inv,
    }
}

/// `∫_a^b g(x) |x|^{q-1} dx` on any interval, splitting at the origin.
pub fn abs_power<F: Fn(f64) -> f64>(g: &F, a: f64, b: f64, q: f64, rel_tol: f64, abs_tol: f64) -> Estimate {
    if (q - 1.0).abs() < 1e-15 {
        return adaptive(g, a, b, rel_tol, abs_tol);
    }
    let mut value = 0.0;
    let mut error = 0.0;
    if b > 0.0 {
        let e = radial(g, a.max(0.0), b, q, rel_tol, abs_tol);
        value += e.value;
        error += e.error;
    }
    if a < 0.0 {
        let neg = |x: f64| g(-x);
        let e = radial(&neg, (-b).max(0.0), -a, q, rel_tol, abs_tol);
        value += e.value;
        error += e.error;
    }
    Estimate { value, error }
}

/// Pairwise summation in a fixed order.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        2 => v[0] + v[1],
        n if n <= 16 => v.iter().sum(),
        n => {
            let (l, r) = v.split_at(n / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}

/// A convex polygon cut into vertical slabs over which the lower and upper
/// boundaries are affine.
struct Slabs {
    xs: Vec<f64>,
    lower: Vec<(f64, f64)>,
    upper: Vec<(f64, f64)>,
}

/// Affine piece `(intercept, slope)` of a monotone-in-x chain at `x`, which
/// must not coincide with a vertex abscissa.
fn chain_piece(chain: &[Point2], x: f64) -> (f64, f64) {
    let k = chain.partition_point(|p| p[0] <= x).clamp(1, chain.len() - 1);
    let (a, b) = (chain[k - 1], chain[k]);
    let s = (b[1] - a[1]) / (b[0] - a[0]);
    (a[1] - s * a[0], s)
}

fn slabs(poly: &Polygon, extra_cuts: &[f64]) -> Option<Slabs> {
    let v = poly.vertices();
    if v.len() < 3 {
        return None;
    }
    let m = v.len();
    let left = (0..m)
        .min_by(|&i, &j| v[i][0].total_cmp(&v[j][0]).then(v[i][1].total_cmp(&v[j][1])))
        .unwrap();
    let right = (0..m)
        .max_by(|&i, &j| v[i][0].total_cmp(&v[j][0]).then(v[j][1].total_cmp(&v[i][1])))
        .unwrap();
    // CCW from the leftmost vertex walks the lower chain first
    let mut lower = vec![v[left]];
    let mut i = left;
    while i != right {
        i = (i + 1) % m;
        lower.push(v[i]);
    }
    let mut upper = vec![v[right]];
    while i != left {
        i = (i + 1) % m;
        upper.push(v[i]);
    }
    upper.reverse();
    let (x0, x1) = (v[left][0], v[right][0]);
    let mut xs: Vec<f64> = v.iter().map(|p| p[0]).collect();
    xs.extend(extra_cuts.iter().copied().filter(|&c| c > x0 && c < x1));
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut lo = Vec::with_capacity(xs.len());
    let mut hi = Vec::with_capacity(xs.len());
    for w in xs.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        lo.push(chain_piece(&lower, mid));
        hi.push(chain_piece(&upper, mid));
    }
    Some(Slabs {
        xs,
        lower: lo,
        upper: hi,
    })
}

/// `∫_P f(x, z) |x|^{q-1} dx dz` over a convex polygon (`q = None` means no
/// radial factor). The singular factor only depends on the first
/// coordinate; slabs touching `x = 0` use the radial substitution.
pub fn polygon_integral<F>(poly: &Polygon, f: &F, q: Option<f64>) -> f64
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let q = q.filter(|&q| (q - 1.0).abs() > 1e-15);
    let Some(s) = slabs(poly, &[0.0]) else {
        return 0.0;
    };
    let parts: Vec<f64> = (0..s.lower.len())
        .map(|k| {
            let (a, b) = (s.xs[k], s.xs[k + 1]);
            let (l0, l1) = s.lower[k];
            let (u0, u1) = s.upper[k];
            let column = |x: f64| {
                let lo = l0 + l1 * x;
                let hi = u0 + u1 * x;
                if hi <= lo {
                    return 0.0;
                }
                let inner = |z: f64| f(x, z);
                gl16(&inner, lo, hi)
            };
            match q {
                None => {
                    let e = adaptive(&column, a, b, 1e-13, 1e-15);
                    e.value
                }
                Some(q) => abs_power(&column, a, b, q, 1e-12, 1e-15).value,
            }
        })
        .collect();
    pairwise_sum(&parts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        // degree 15 is the limit for eight nodes
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((m - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_gaussian() {
        let f = |x: f64| (-x * x).exp();
        let e = adaptive(&f, -1.0, 1.0, 1e-14, 0.0);
        let exact = std::f64::consts::PI.sqrt() * libm::erf(1.0);
        assert!((e.value - exact).abs() < 1e-14);
    }

    #[test]
    fn radial_substitution_handles_inverse_sqrt() {
        let one = |_: f64| 1.0;
        let e = radial(&one, 0.0, 1.0, 0.5, 1e-14, 0.0);
        assert!((e.value - 2.0).abs() < 1e-13);
        let e = abs_power(&one, -1.0, 1.0, 0.25, 1e-14, 0.0);
        assert!((e.value - 8.0).abs() < 1e-12);
    }

    #[test]
    fn semi_infinite_exponential() {
        let f = |x: f64| (-x).exp();
        let e = semi_infinite(&f, 1.0, 1e-13, 0.0);
        assert!((e.value - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn polygon_integral_of_exponential_on_square() {
        let sq = Polygon::rect([0.0, 0.0], [1.0, 1.0]);
        let f = |_x: f64, z: f64| (-z).exp();
        let v = polygon_integral(&sq, &f, None);
        assert!((v - (1.0 - (-1.0f64).exp())).abs() < 1e-14);
        let tri = Polygon::from_points(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        let one = |_x: f64, _z: f64| 1.0;
        assert!((polygon_integral(&tri, &one, None) - 0.5).abs() < 1e-15);
        // ∫_{[-1,1]^2} |x|^{-1/2} = 2 · 4
        let big = Polygon::rect([-1.0, -1.0], [1.0, 1.0]);
        assert!((polygon_integral(&big, &one, Some(0.5)) - 8.0).abs() < 1e-11);
    }
}
