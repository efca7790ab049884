//! Both sides of the first-variation identities: finite differences of
//! `t ↦ μ(u_t)` against the bulk + boundary formula.

mod ladder;

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use ladder::{finite_difference, observed_order, richardson, Ladder, LadderResult, Mode, Step};

use crate::convexfn::{EpigraphBody, Exact1D, GridFn, Plq, PolyhedralFn};
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::measures::{body_measure, weighted_surface_area_measure, Density, WeightSpec, WeightedFunction};
use crate::transform::{
    conjugate_as_perturbation, inf_conv_plq, perturb_exact, GridFlow, PerturbOptions, Perturbation,
};
use crate::wulff::{wulff_flow, SphericalFn, DEFAULT_DIRECTIONS_S1};

/// Which numeric track produced a report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Track {
    #[default]
    Exact,
    Grid,
}

/// Pass threshold on `|LHS − RHS|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tolerance {
    Absolute(f64),
    Relative(f64),
}

impl Tolerance {
    pub const EXACT: Tolerance = Tolerance::Absolute(1e-9);

    /// 2% up to 256 nodes per axis, 1% from 512 on.
    pub fn grid(nodes: usize) -> Tolerance {
        if nodes >= 512 {
            Tolerance::Relative(0.01)
        } else {
            Tolerance::Relative(0.02)
        }
    }

    pub fn accepts(&self, abs_err: f64, rel_err: f64) -> bool {
        match *self {
            Tolerance::Absolute(t) => abs_err <= t,
            Tolerance::Relative(t) => rel_err <= t,
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            Tolerance::Absolute(t) | Tolerance::Relative(t) => t,
        }
    }
}

/// One comparison of the two sides of a variational identity.
#[derive(Clone, Debug, Serialize)]
pub struct VariationReport {
    pub scenario: String,
    pub mode: Mode,
    pub ladder: LadderResult,
    pub lhs: f64,
    pub rhs_bulk: f64,
    pub rhs_boundary: f64,
    pub rhs_total: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub pass: bool,
    #[serde(skip)]
    pub tol: Tolerance,
    #[serde(skip)]
    pub track: Track,
    /// Nodes per axis on the grid track.
    #[serde(skip)]
    pub grid: Option<usize>,
    #[serde(skip)]
    pub runtime_ms: f64,
    #[serde(skip)]
    pub notes: Vec<String>,
}

impl VariationReport {
    /// Assembles a report; `rhs_total` is `bulk + boundary` and the LHS is
    /// the Richardson value of the ladder.
    pub fn new(
        scenario: impl Into<String>,
        requested: Mode,
        (mode, ladder): (Mode, LadderResult),
        (rhs_bulk, rhs_boundary): (f64, f64),
        tol: Tolerance,
        track: Track,
    ) -> Self {
        let lhs = ladder.richardson;
        let rhs_total = rhs_bulk + rhs_boundary;
        let abs_err = (lhs - rhs_total).abs();
        let rel_err = if rhs_total != 0.0 {
            abs_err / rhs_total.abs()
        } else {
            abs_err
        };
        let mut notes = Vec::new();
        if mode != requested {
            notes.push("two-sided differences failed at −h; degraded to one-sided".to_string());
        }
        VariationReport {
            scenario: scenario.into(),
            mode,
            lhs,
            rhs_bulk,
            rhs_boundary,
            rhs_total,
            abs_err,
            rel_err,
            pass: tol.accepts(abs_err, rel_err) && abs_err.is_finite(),
            tol,
            track,
            grid: None,
            runtime_ms: 0.0,
            notes,
            ladder,
        }
    }

    /// A plain computed value against its expected value, in
    /// [`Mode::Direct`] with an empty ladder.
    pub fn direct(scenario: impl Into<String>, value: f64, expected: f64, tol: Tolerance, track: Track) -> Self {
        let ladder = LadderResult {
            steps: Vec::new(),
            richardson: value,
            order: None,
        };
        VariationReport::new(
            scenario,
            Mode::Direct,
            (Mode::Direct, ladder),
            (expected, 0.0),
            tol,
            track,
        )
    }

    pub(crate) fn timed(mut self, start: Instant) -> Self {
        self.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
        self
    }
}

/// Settings shared by the runners.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VariationOptions {
    pub mode: Mode,
    pub ladder: Ladder,
    /// Overrides the per-track default tolerance.
    pub tol: Option<Tolerance>,
    /// Direction count for Wulff shapes.
    pub directions: usize,
}

impl Default for VariationOptions {
    fn default() -> Self {
        VariationOptions {
            mode: Mode::TwoSided,
            ladder: Ladder::default(),
            tol: None,
            directions: DEFAULT_DIRECTIONS_S1,
        }
    }
}

impl VariationOptions {
    pub fn one_sided() -> Self {
        VariationOptions {
            mode: Mode::OneSided,
            ..Default::default()
        }
    }
}

/// `(∫ ζ(∇u) φ(u) dμ, ∫ ρ_ζ(N) Φ(u) dμ_∂)`.
///
/// With a radial exponent the origin must be interior to the domain.
pub fn analytic_first_variation<U: WeightedFunction + ?Sized>(
    u: &U,
    zeta: &Perturbation,
    w: &WeightSpec,
) -> Result<(f64, f64)> {
    if w.q().is_some() && !u.origin_interior() {
        return Err(Error::SingularityHypothesis);
    }
    Ok((u.bulk_integral(zeta, w)?.value, u.boundary_integral(zeta, w)?.value))
}

/// Finite-difference derivative of `t ↦ μ(u_t)` at `0` on the exact track.
pub fn numeric_first_variation<U: Exact1D + ?Sized>(
    u: &U,
    zeta: &Perturbation,
    w: &WeightSpec,
    mode: Mode,
    ladder: &Ladder,
) -> Result<(Mode, LadderResult)> {
    let u = u.to_plq();
    finite_difference(
        |t| Ok(perturb_exact(&u, zeta, t)?.epigraph_measure(w)?.value),
        mode,
        ladder,
    )
}

/// Both sides for `u_t = (u* + tζ)*` on the exact track.
pub fn exact_first_variation<U: Exact1D + ?Sized>(
    scenario: &str,
    u: &U,
    zeta: &Perturbation,
    w: &WeightSpec,
    opts: &VariationOptions,
) -> Result<VariationReport> {
    let start = Instant::now();
    let u = u.to_plq();
    let rhs = analytic_first_variation(&u, zeta, w)?;
    let lhs = numeric_first_variation(&u, zeta, w, opts.mode, &opts.ladder)?;
    let tol = opts.tol.unwrap_or(Tolerance::EXACT);
    Ok(VariationReport::new(scenario, opts.mode, lhs, rhs, tol, Track::Exact).timed(start))
}

/// Both sides for `u_t = (u* + tζ)*` on the grid track; the RHS is
/// integrated on the grid of `u`.
pub fn grid_first_variation(
    scenario: &str,
    u: &GridFn,
    zeta: &Perturbation,
    w: &WeightSpec,
    opts: &VariationOptions,
    perturb: &PerturbOptions,
) -> Result<VariationReport> {
    let start = Instant::now();
    let rhs = analytic_first_variation(u, zeta, w)?;
    let flow = GridFlow::new(u, zeta, perturb)?;
    let lhs = finite_difference(|t| Ok(flow.at(t)?.epigraph_measure(w)?.value), opts.mode, &opts.ladder)?;
    let nodes = u.shape().iter().copied().max().unwrap_or(0);
    let tol = opts.tol.unwrap_or_else(|| Tolerance::grid(nodes.saturating_sub(1)));
    let mut r = VariationReport::new(scenario, opts.mode, lhs, rhs, tol, Track::Grid);
    r.grid = Some(nodes.saturating_sub(1));
    Ok(r.timed(start))
}

fn flow_area(k: &EpigraphBody, f: &SphericalFn, t: f64, m: usize) -> Result<f64> {
    wulff_flow(k, f, t, m).map(|b| b.area()).ok_or(Error::DomainCollapsed)
}

/// `d/dt Vol(F_t K)|₀` against `∫ f dS_K` for a polygon.
pub fn aleksandrov_polytope(
    scenario: &str,
    k: &EpigraphBody,
    f: &SphericalFn,
    opts: &VariationOptions,
) -> Result<VariationReport> {
    let start = Instant::now();
    if !k.has_interior() {
        return Err(Error::DegenerateBody("polygon has empty interior".into()));
    }
    let rhs: f64 = k.facets().iter().map(|e| f.evaluate(e.normal) * e.length).sum();
    let lhs = finite_difference(|t| flow_area(k, f, t, opts.directions), opts.mode, &opts.ladder)?;
    let tol = opts.tol.unwrap_or(Tolerance::Absolute(1e-4));
    Ok(VariationReport::new(scenario, opts.mode, lhs, (0.0, rhs), tol, Track::Exact).timed(start))
}

/// `d/dt μ(F_t K)|₀` against `∫ f dS_{μ,K}`, with `dμ = Ψ |x|^{q−1} dX`.
pub fn kryvonos_langharst(
    scenario: &str,
    k: &EpigraphBody,
    f: &SphericalFn,
    psi: Density<'_>,
    q: Option<f64>,
    opts: &VariationOptions,
) -> Result<VariationReport> {
    let start = Instant::now();
    let s = weighted_surface_area_measure(k, psi, q)?;
    let rhs = s.integrate(|nu| f.evaluate([nu[0], nu[1]]));
    let mu = |t: f64| {
        let kt = wulff_flow(k, f, t, opts.directions).ok_or(Error::DomainCollapsed)?;
        Ok(body_measure(&kt, psi, q))
    };
    let lhs = finite_difference(mu, opts.mode, &opts.ladder)?;
    let tol = opts.tol.unwrap_or(Tolerance::Relative(1e-3));
    Ok(VariationReport::new(scenario, opts.mode, lhs, (0.0, rhs), tol, Track::Exact).timed(start))
}

/// [`kryvonos_langharst`] for `K + Y` with the density `Ψ(· − Y)`; both
/// sides should reproduce the untranslated values.
pub fn kryvonos_langharst_translated(
    scenario: &str,
    k: &EpigraphBody,
    f: &SphericalFn,
    psi: Density<'_>,
    y: Point2,
    opts: &VariationOptions,
) -> Result<VariationReport> {
    let shifted = |x: Point2| psi([x[0] - y[0], x[1] - y[1]]);
    kryvonos_langharst(scenario, &k.translate(y), f, &shifted, None, opts)
}

fn inf_conv_family(u: &Plq, v: &PolyhedralFn, w: &WeightSpec, opts: &VariationOptions) -> Result<(Mode, LadderResult)> {
    let v = Plq::from(v);
    let mu = |t: f64| {
        if t < 0.0 {
            return Err(Error::PerturbationTooLarge);
        }
        let ut = if t == 0.0 {
            u.clone()
        } else {
            inf_conv_plq(u, &v.epi_scale(t)?)?
        };
        Ok(ut.epigraph_measure(w)?.value)
    };
    finite_difference(mu, Mode::OneSided, &opts.ladder)
}

/// `d/dt μ_n(u □ (t □ v))|_{0⁺}` against the formula with `ζ = v*`.
pub fn rotem_check<U: Exact1D + ?Sized>(
    scenario: &str,
    u: &U,
    v: &PolyhedralFn,
    opts: &VariationOptions,
) -> Result<VariationReport> {
    let start = Instant::now();
    let u = u.to_plq();
    let w = WeightSpec::exp();
    let zeta = conjugate_as_perturbation(v);
    let rhs = analytic_first_variation(&u, &zeta, &w)?;
    let lhs = inf_conv_family(&u, v, &w, opts)?;
    let tol = opts.tol.unwrap_or(Tolerance::EXACT);
    Ok(VariationReport::new(scenario, Mode::OneSided, lhs, rhs, tol, Track::Exact).timed(start))
}

/// `d/dt μ_q(u □ (t □ v))|_{0⁺}` against the formula with the radial
/// weight `|x|^{q−n}`.
pub fn dual_check<U: Exact1D + ?Sized>(
    scenario: &str,
    u: &U,
    v: &PolyhedralFn,
    q: f64,
    opts: &VariationOptions,
) -> Result<VariationReport> {
    let start = Instant::now();
    let u = u.to_plq();
    let (lo, hi) = v.domain();
    if !(lo <= 0.0 && 0.0 <= hi) {
        return Err(Error::InvalidArgument("the origin must lie in dom(v)".into()));
    }
    let w = WeightSpec::exp_q(q)?;
    let zeta = conjugate_as_perturbation(v);
    let rhs = analytic_first_variation(&u, &zeta, &w)?;
    let lhs = inf_conv_family(&u, v, &w, opts)?;
    let tol = opts.tol.unwrap_or(Tolerance::Absolute(1e-8));
    Ok(VariationReport::new(scenario, Mode::OneSided, lhs, rhs, tol, Track::Exact).timed(start))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Polygon;

    fn indicator() -> Plq {
        Plq::indicator(-1.0, 1.0).unwrap()
    }

    fn cap() -> Plq {
        Plq::quadratic(1.0, 0.0, 0.0, -1.0, 1.0).unwrap()
    }

    fn opts() -> VariationOptions {
        VariationOptions::default()
    }

    #[test]
    fn analytic_examples() {
        let w = WeightSpec::exp();
        let (b, s) = analytic_first_variation(&indicator(), &Perturbation::norm(1.0), &w).unwrap();
        assert!(b.abs() < 1e-15 && (s - 2.0).abs() < 1e-14);
        let (b, s) = analytic_first_variation(&indicator(), &Perturbation::constant(1.0), &w).unwrap();
        assert!((b - 2.0).abs() < 1e-14 && s.abs() < 1e-15);
        let (b, s) = analytic_first_variation(&cap(), &Perturbation::norm(1.0), &w).unwrap();
        let e = (-1.0f64).exp();
        assert!((b - (2.0 - 2.0 * e)).abs() < 1e-12, "{b}");
        assert!((s - 2.0 * e).abs() < 1e-12, "{s}");
    }

    #[test]
    fn singular_weight_needs_interior_origin() {
        let u = Plq::indicator(0.0, 1.0).unwrap();
        let w = WeightSpec::exp_q(0.5).unwrap();
        assert!(matches!(
            analytic_first_variation(&u, &Perturbation::norm(1.0), &w),
            Err(Error::SingularityHypothesis)
        ));
    }

    #[test]
    fn exact_track_examples() {
        let w = WeightSpec::exp();
        let r = exact_first_variation("norm", &indicator(), &Perturbation::norm(1.0), &w, &opts()).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.ladder.steps.iter().all(|s| (s.lhs - 2.0).abs() < 1e-12));
        let r = exact_first_variation("const", &indicator(), &Perturbation::constant(1.0), &w, &opts()).unwrap();
        assert!(r.pass, "{r:?}");
        assert!((r.ladder.order.unwrap() - 2.0).abs() < 0.05);
        let r = exact_first_variation("cap", &cap(), &Perturbation::norm(1.0), &w, &opts()).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn rotem_examples() {
        let v = PolyhedralFn::indicator(-1.0, 1.0).unwrap();
        assert!(rotem_check("ii", &indicator(), &v, &opts()).unwrap().pass);
        assert!(rotem_check("ci", &cap(), &v, &opts()).unwrap().pass);
        let v = crate::convexfn::canonicalize(&[(-1.0, 1.0), (0.0, 0.0), (1.0, 1.0)]).unwrap();
        let r = rotem_check("iv", &indicator(), &v, &opts()).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.rhs_bulk.abs() < 1e-15 && (r.rhs_boundary - 2.0).abs() < 1e-14);
    }

    #[test]
    fn dual_examples() {
        let v = PolyhedralFn::indicator(-1.0, 1.0).unwrap();
        for q in [0.5, 1.0, 2.0] {
            let r = dual_check("dual", &indicator(), &v, q, &opts()).unwrap();
            assert!(r.pass, "q={q}: {r:?}");
            assert!((r.lhs - 2.0).abs() < 1e-8);
        }
        let r = dual_check("cap", &cap(), &v, 1.0, &opts()).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn aleksandrov_examples() {
        let k = EpigraphBody::from_polygon(Polygon::rect([0.0, 0.0], [1.0, 1.0]));
        let r = aleksandrov_polytope("disk", &k, &SphericalFn::Constant(1.0), &opts()).unwrap();
        assert!(r.pass && (r.rhs_total - 4.0).abs() < 1e-14, "{r:?}");
        let f = SphericalFn::Support(k.polygon().clone());
        let r = aleksandrov_polytope("homothety", &k, &f, &opts()).unwrap();
        assert!(r.pass && (r.rhs_total - 2.0).abs() < 1e-14, "{r:?}");
    }

    #[test]
    fn weighted_aleksandrov_example() {
        let k = EpigraphBody::from_polygon(Polygon::rect([0.0, 0.0], [1.0, 1.0]));
        let psi = |x: Point2| (-x[1]).exp();
        let f = SphericalFn::Constant(1.0);
        let r = kryvonos_langharst("kl", &k, &f, &psi, None, &opts()).unwrap();
        let oracle = 3.0 - (-1.0f64).exp();
        assert!((r.rhs_total - oracle).abs() < 1e-12);
        assert!(r.pass, "{r:?}");
        let r = kryvonos_langharst_translated("kl+y", &k, &f, &psi, [5.0, 5.0], &opts()).unwrap();
        assert!((r.rhs_total - oracle).abs() < 1e-12);
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn report_json_has_exact_fields() {
        let w = WeightSpec::exp();
        let r = exact_first_variation("norm", &indicator(), &Perturbation::norm(1.0), &w, &opts()).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(|s| s.as_str()).collect();
        keys.sort();
        assert_eq!(
            keys,
            [
                "abs_err",
                "ladder",
                "lhs",
                "mode",
                "pass",
                "rel_err",
                "rhs_boundary",
                "rhs_bulk",
                "rhs_total",
                "scenario"
            ]
        );
        assert_eq!(v["ladder"]["order"], "n/a");
    }
}
