//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Expected values come from closed forms or from quadrature done
//! here, not from the library.

mod common;

use std::f64::consts::E;
use std::process::ExitCode;
use std::time::Instant;

use fwl::convexfn::{EpigraphBody, Plq};
use fwl::geometry::{Point2, Polygon};
use fwl::harness::{self, Check, Config, RunOptions};
use fwl::measures::{WeightSpec, WeightedFunction};
use fwl::transform::{hopf_lax_residual, PerturbOptions, Perturbation};
use fwl::variation::{
    aleksandrov_polytope, dual_check, exact_first_variation, kryvonos_langharst, kryvonos_langharst_translated,
    VariationOptions, VariationReport,
};
use fwl::wulff::SphericalFn;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// Composite Simpson with `n` (even) intervals.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(a + k as f64 * h);
    }
    s * h / 3.0
}

fn expect(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fail(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn interval() -> Plq {
    Plq::indicator(-1.0, 1.0).unwrap()
}

fn cap() -> Plq {
    Plq::quadratic(1.0, 0.0, 0.0, -1.0, 1.0).unwrap()
}

fn exact_case(name: &str, u: &Plq, zeta: &Perturbation) -> Result<VariationReport, String> {
    exact_first_variation(name, u, zeta, &WeightSpec::exp(), &VariationOptions::default()).map_err(fail)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let inv_e = (-1.0f64).exp();
    let cases = [
        ("indicator, |y|", interval(), Perturbation::norm(1.0), (0.0, 2.0)),
        ("indicator, 1", interval(), Perturbation::constant(1.0), (2.0, 0.0)),
        (
            "cap, |y|",
            cap(),
            Perturbation::norm(1.0),
            (2.0 - 2.0 * inv_e, 2.0 * inv_e),
        ),
    ];
    let mut worst = 0.0f64;
    for (name, u, zeta, (bulk, bdry)) in &cases {
        let r = exact_case(name, u, zeta)?;
        let err = [
            (r.lhs - 2.0).abs(),
            (r.rhs_bulk - bulk).abs(),
            (r.rhs_boundary - bdry).abs(),
            (r.rhs_total - 2.0).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        if err > 1e-9 {
            return Err(format!(
                "{name}: lhs {} bulk {} boundary {}",
                r.lhs, r.rhs_bulk, r.rhs_boundary
            ));
        }
        worst = worst.max(err);
    }
    let secs = start.elapsed().as_secs_f64();
    expect(secs < 1.0, format!("max error {worst:.2e}, {secs:.3} s"))
}

fn criterion_2() -> Outcome {
    let r = exact_case("boundary", &interval(), &Perturbation::norm(1.0))?;
    let gap = (r.lhs - r.rhs_bulk - r.rhs_boundary).abs();
    expect(
        r.rhs_bulk.abs() <= 1e-9 && (r.lhs - 2.0).abs() <= 1e-9 && gap <= 1e-9,
        format!(
            "boundary-free value {:.2e}, lhs {}, lhs − bulk − boundary {gap:.2e}",
            r.rhs_bulk, r.lhs
        ),
    )
}

fn criterion_3() -> Outcome {
    let v = fwl::convexfn::PolyhedralFn::indicator(-1.0, 1.0).unwrap();
    let mut worst = 0.0f64;
    for q in [0.5, 1.0, 2.0] {
        // d/dt 2(1+t)^q/q at 0
        let expected = 2.0;
        let r = dual_check("mu_q", &interval(), &v, q, &VariationOptions::one_sided()).map_err(fail)?;
        let err = (r.lhs - expected).abs().max((r.rhs_total - expected).abs());
        if err > 1e-8 {
            return Err(format!("q={q}: lhs {} rhs {}", r.lhs, r.rhs_total));
        }
        worst = worst.max(err);
    }
    // singular weight |x|^{q−1} with q = 1/2: x = s² removes the singularity
    let w = WeightSpec::exp_q(0.5).map_err(fail)?;
    let flat = interval().epigraph_measure(&w).map_err(fail)?.value;
    let curved = cap().epigraph_measure(&w).map_err(fail)?.value;
    let oracle_curved = 4.0 * simpson(|s| (-s.powi(4)).exp(), 0.0, 1.0, 20_000);
    let rel = ((flat - 4.0) / 4.0)
        .abs()
        .max(((curved - oracle_curved) / oracle_curved).abs());
    expect(
        rel <= 1e-6,
        format!("max derivative error {worst:.2e}, singular quadrature relative error {rel:.2e}"),
    )
}

fn square() -> EpigraphBody {
    EpigraphBody::from_polygon(Polygon::rect([0.0, 0.0], [1.0, 1.0]))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let k = square();
    let opts = VariationOptions::default();
    let one = aleksandrov_polytope("disk", &k, &SphericalFn::Constant(1.0), &opts).map_err(fail)?;
    let own = aleksandrov_polytope("homothety", &k, &SphericalFn::Support(k.polygon().clone()), &opts).map_err(fail)?;
    let secs = start.elapsed().as_secs_f64();
    let e1 = (one.lhs - 4.0).abs().max((one.rhs_total - 4.0).abs());
    let e2 = (own.lhs - 2.0).abs().max((own.rhs_total - 2.0).abs());
    expect(
        e1 <= 1e-4 && e2 <= 1e-4 && secs < 5.0,
        format!(
            "f≡1 error {e1:.2e}, f=h_K error {e2:.2e}, {} directions, {secs:.3} s",
            opts.directions
        ),
    )
}

fn criterion_5() -> Outcome {
    // edge quadrature: bottom, top and the two sides of [0,1]²
    let side = simpson(|z| (-z).exp(), 0.0, 1.0, 2_000);
    let oracle = 1.0 + (-1.0f64).exp() + 2.0 * side;
    let psi = |x: Point2| (-x[1]).exp();
    let f = SphericalFn::Constant(1.0);
    let opts = VariationOptions::default();
    let a = kryvonos_langharst("weighted", &square(), &f, &psi, None, &opts).map_err(fail)?;
    let b = kryvonos_langharst_translated("translated", &square(), &f, &psi, [5.0, 5.0], &opts).map_err(fail)?;
    let rel = |x: f64| ((x - oracle) / oracle).abs();
    let worst = [a.lhs, a.rhs_total, b.lhs, b.rhs_total]
        .into_iter()
        .map(rel)
        .fold(0.0, f64::max);
    let closed = ((oracle - (3.0 - 1.0 / E)) / oracle).abs();
    expect(
        worst <= 1e-3 && closed <= 1e-9,
        format!(
            "oracle {oracle:.6}, lhs {:.6}, translated lhs {:.6}, max relative error {worst:.2e}",
            a.lhs, b.lhs
        ),
    )
}

fn square_scenario(c: &Config) -> &fwl::harness::Scenario {
    c.scenarios
        .iter()
        .find(|s| s.name == "first-variation-grid-2d-square")
        .expect("standard suite has the square scenario")
}

fn criterion_6() -> Outcome {
    let c = Config::standard();
    let s = square_scenario(&c);
    let start = Instant::now();
    let t = harness::convergence(s, &[64, 128, 256, 512], &RunOptions::default()).map_err(fail)?;
    let secs = start.elapsed().as_secs_f64();
    let oracle = 4.0 * simpson(|s| (-s * s).exp(), -1.0, 1.0, 20_000);
    let errs: Vec<String> = t
        .rows
        .iter()
        .map(|r| format!("{}:{:.2e}", r.grid.unwrap_or(0), r.rel_err))
        .collect();
    let at = |n: usize| {
        t.rows
            .iter()
            .find(|r| r.grid == Some(n))
            .map(|r| r.rel_err)
            .unwrap_or(f64::INFINITY)
    };
    let lhs512 = t.rows.last().map(|r| r.lhs).unwrap_or(f64::NAN);
    expect(
        at(256) <= 0.02 && at(512) <= 0.01 && t.monotone && secs < 120.0,
        format!(
            "relative errors {}, monotone {}, lhs@512 vs closed form {:.2e}, {secs:.1} s",
            errs.join(" "),
            t.monotone,
            ((lhs512 - oracle) / oracle).abs()
        ),
    )
}

fn criterion_7() -> Outcome {
    const CASES: u64 = 128;
    let fractions = [0.0, 0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9, 1.0];
    let ys = [-4.0, -1.5, -0.3, 0.0, 0.7, 2.0, 5.0];
    let zetas = [
        Perturbation::norm(1.3),
        Perturbation::constant(0.7),
        Perturbation::SoftNorm { coeff: 0.9 },
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut counts = [0usize; 8];
    for case in 0..CASES {
        let u = common::random_poly(&mut rng);
        let v = common::random_poly(&mut rng);
        let tag = |name: &str, r: common::Check| r.map_err(|e| format!("{name} case {case}: {e}"));
        tag("biconjugation", common::biconjugation(&u, &fractions))?;
        tag("dual sum", common::dual_sum(&u, &v, &ys))?;
        tag("inf-conv routes", common::inf_conv_routes(&u, &v, &fractions))?;
        let pts = |rng: &mut ChaCha8Rng| -> Vec<Point2> {
            use rand::Rng;
            loop {
                let p: Vec<Point2> = (0..5)
                    .map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])
                    .collect();
                if Polygon::from_points(&p).area() > 0.05 {
                    return p;
                }
            }
        };
        let (k, p) = (pts(&mut rng), pts(&mut rng));
        tag("wulff", common::wulff_semigroup(&k, &p, [0.3, -0.6], 0.4, 0.7, 512))?;
        let z = &zetas[case as usize % 3];
        let nu_h = case as f64 / CASES as f64 * 6.0 - 3.0;
        tag(
            "zeta bar",
            common::zeta_bar_factorization(z, &[nu_h], 0.5 + case as f64 / 64.0),
        )?;
        tag("moment mass", common::moment_mass(&u, 64))?;
        tag("push-forward", common::pushforward(&u, &v))?;
        counts[..7].iter_mut().for_each(|c| *c += 1);
        if u.max_value() - u.min_value() > 0.1 {
            for z in &zetas {
                tag("change of variables", common::change_of_variables(&u, z))?;
            }
            counts[7] += 1;
        }
    }
    expect(
        counts[7] >= 100,
        format!(
            "{CASES} cases for seven properties, {} for change of variables",
            counts[7]
        ),
    )
}

fn criterion_8() -> Outcome {
    let c = Config::standard();
    let s = square_scenario(&c);
    let Check::FirstVariation { u, zeta, .. } = &s.check else {
        return Err("square scenario is not a first-variation check".into());
    };
    let grids = [64usize, 128, 256, 512];
    let mut means = Vec::new();
    for &n in &grids {
        let g = u.to_grid(n).map_err(fail)?;
        let h = 2.0 / n as f64;
        let r = hopf_lax_residual(&g, zeta, 0.1, h, &PerturbOptions::default()).map_err(fail)?;
        means.push(r.mean_residual);
    }
    let order = harness::fitted_order(&grids, &means).unwrap_or(f64::NAN);
    let decreasing = means.windows(2).all(|w| w[1] < w[0]);
    let shown: Vec<String> = grids.iter().zip(&means).map(|(n, m)| format!("{n}:{m:.2e}")).collect();
    expect(
        decreasing && order >= 0.9,
        format!("mean residual {}, fitted order {order:.2}", shown.join(" ")),
    )
}

fn main() -> ExitCode {
    fwl::configure_threads();
    let criteria: [Criterion; 8] = [
        ("exact 1D identities", criterion_1),
        ("boundary term is necessary", criterion_2),
        ("q-weighted volume", criterion_3),
        ("classical Aleksandrov on polygons", criterion_4),
        ("weighted Aleksandrov", criterion_5),
        ("2D grid convergence", criterion_6),
        ("property suites", criterion_7),
        ("Hopf-Lax residual", criterion_8),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
