//! Scenario files, suite execution, convergence studies and report output.

mod atoms;
mod output;

use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use atoms::{DensitySpec, FnSpec, SetSpec, SphSpec};
pub use output::{convergence_csv, convergence_json, reports_csv, reports_json, CSV_HEADER};

use crate::convexfn::{Plq, Quad};
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::measures::{edge_integral, WeightSpec, WeightedFunction, DEFAULT_BINS};
use crate::transform::{inf_conv_plq, ladder_recession, perturb_exact, PerturbOptions, Perturbation, DEFAULT_LADDER};
use crate::variation::{
    aleksandrov_polytope, dual_check, exact_first_variation, grid_first_variation, kryvonos_langharst,
    kryvonos_langharst_translated, rotem_check, Ladder, Mode, Tolerance, Track, VariationOptions, VariationReport,
};
use crate::wulff::DEFAULT_DIRECTIONS_S1;

/// The built-in suite.
pub const STANDARD_SUITE: &str = include_str!("../../suites/standard.json");

/// Default grid size (intervals per axis) for grid-track scenarios.
pub const DEFAULT_GRID: usize = 256;

/// A scenario file: `{"scenarios": [...]}`. Unknown keys are errors.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub scenarios: Vec<Scenario>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    /// The statement the scenario checks.
    #[serde(default)]
    pub verifies: String,
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub ladder: Option<Ladder>,
    /// Replaces the value of the default tolerance (absolute on the exact
    /// track, relative on the grid track).
    #[serde(default)]
    pub tol: Option<f64>,
    pub check: Check,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Check {
    /// `d/dt μ((u* + tζ)*)` against bulk + boundary.
    FirstVariation {
        u: FnSpec,
        zeta: Perturbation,
        #[serde(default)]
        weight: WeightSpec,
        #[serde(default)]
        track: Track,
        /// Intervals per axis; one report per entry.
        #[serde(default)]
        grid: Vec<usize>,
    },
    Aleksandrov {
        body: SetSpec,
        f: SphSpec,
        #[serde(default)]
        directions: Option<usize>,
    },
    KryvonosLangharst {
        body: SetSpec,
        f: SphSpec,
        #[serde(default)]
        psi: DensitySpec,
        #[serde(default)]
        q: Option<f64>,
        /// Also run the check for `K + Y` with `Ψ(· − Y)`.
        #[serde(default)]
        translate: Option<Point2>,
        #[serde(default)]
        directions: Option<usize>,
    },
    Rotem {
        u: FnSpec,
        v: FnSpec,
    },
    Dual {
        u: FnSpec,
        v: FnSpec,
        q: f64,
    },
    /// Exact-track first variations of random piecewise linear-quadratic
    /// `u` and piecewise linear `ζ`, drawn from the run seed.
    RandomExact {
        cases: usize,
    },
    /// A computed value against a closed form.
    Value {
        probe: Probe,
        expected: f64,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "probe", rename_all = "snake_case", deny_unknown_fields)]
pub enum Probe {
    Conjugate {
        u: FnSpec,
        at: f64,
    },
    Biconjugate {
        u: FnSpec,
        at: f64,
    },
    InfConv {
        u: FnSpec,
        v: FnSpec,
        at: f64,
    },
    EpiScale {
        t: f64,
        u: FnSpec,
        at: f64,
    },
    Perturb {
        u: FnSpec,
        zeta: Perturbation,
        t: f64,
        at: f64,
    },
    /// Radius-ladder estimate of `ρ_ζ(direction)`.
    Recession {
        zeta: Perturbation,
        direction: Vec<f64>,
    },
    Measure {
        u: FnSpec,
        #[serde(default)]
        weight: WeightSpec,
        #[serde(default)]
        track: Track,
        #[serde(default)]
        grid: Option<usize>,
    },
    Bulk {
        u: FnSpec,
        zeta: Perturbation,
        #[serde(default)]
        weight: WeightSpec,
        #[serde(default)]
        track: Track,
        #[serde(default)]
        grid: Option<usize>,
    },
    Boundary {
        u: FnSpec,
        zeta: Perturbation,
        #[serde(default)]
        weight: WeightSpec,
        #[serde(default)]
        track: Track,
        #[serde(default)]
        grid: Option<usize>,
    },
    /// Total mass of the moment measure.
    MomentMass {
        u: FnSpec,
        #[serde(default)]
        weight: WeightSpec,
        #[serde(default)]
        bins: Option<usize>,
    },
    /// Weight of the atom of `S_{μ,K}` at `normal`.
    SurfaceAtom {
        body: SetSpec,
        #[serde(default)]
        psi: DensitySpec,
        #[serde(default)]
        q: Option<f64>,
        normal: Point2,
    },
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let c: Config = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut seen = std::collections::HashSet::new();
        for s in &c.scenarios {
            if !seen.insert(s.name.as_str()) {
                return Err(Error::Config(format!("duplicate scenario name {:?}", s.name)));
            }
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Config::parse(&text)
    }

    pub fn standard() -> Self {
        Config::parse(STANDARD_SUITE).expect("the standard suite parses")
    }

    /// Scenarios in config order, restricted to `names` when nonempty.
    pub fn select(&self, names: &[String]) -> Result<Vec<&Scenario>> {
        if names.is_empty() {
            return Ok(self.scenarios.iter().collect());
        }
        for n in names {
            if !self.scenarios.iter().any(|s| &s.name == n) {
                return Err(Error::UnknownScenario(n.clone()));
            }
        }
        Ok(self.scenarios.iter().filter(|s| names.contains(&s.name)).collect())
    }
}

/// Command-line overrides applied to every scenario.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Grid sizes for grid-track scenarios.
    pub grid: Vec<usize>,
    /// Number of ladder halvings.
    pub steps: Option<usize>,
    pub tol: Option<f64>,
    pub seed: u64,
}

/// One report, or the error that prevented it.
#[derive(Clone, Debug)]
pub struct Record {
    pub scenario: String,
    pub result: std::result::Result<VariationReport, String>,
    /// The failure was a configuration problem.
    pub config_error: bool,
}

impl Record {
    pub fn passed(&self) -> bool {
        matches!(&self.result, Ok(r) if r.pass)
    }
}

fn tol_for(default: Tolerance, over: Option<f64>) -> Tolerance {
    match (default, over) {
        (Tolerance::Absolute(_), Some(v)) => Tolerance::Absolute(v),
        (Tolerance::Relative(_), Some(v)) => Tolerance::Relative(v),
        (t, None) => t,
    }
}

impl Scenario {
    fn options(&self, o: &RunOptions, mode: Mode, directions: Option<usize>) -> VariationOptions {
        let mut ladder = self.ladder.unwrap_or_default();
        if let Some(k) = o.steps {
            ladder.halvings = k;
        }
        VariationOptions {
            mode: self.mode.unwrap_or(mode),
            ladder,
            tol: None,
            directions: directions.unwrap_or(DEFAULT_DIRECTIONS_S1),
        }
    }

    fn tol_override(&self, o: &RunOptions) -> Option<f64> {
        o.tol.or(self.tol)
    }

    fn grids(&self, own: &[usize], o: &RunOptions) -> Vec<usize> {
        if !o.grid.is_empty() {
            o.grid.clone()
        } else if !own.is_empty() {
            own.to_vec()
        } else {
            vec![DEFAULT_GRID]
        }
    }

    /// Whether the scenario runs on the grid track.
    pub fn is_grid(&self) -> bool {
        matches!(&self.check, Check::FirstVariation { track: Track::Grid, .. })
    }

    /// Runs the scenario; most checks give one report, grid scenarios give
    /// one per grid size.
    pub fn run(&self, o: &RunOptions) -> Vec<Record> {
        let wrap = |name: String, r: Result<VariationReport>| Record {
            config_error: matches!(r, Err(Error::Config(_))),
            result: r.map_err(|e| e.to_string()),
            scenario: name,
        };
        let name = self.name.clone();
        let fix_tol = |mut r: VariationReport| {
            r.tol = tol_for(r.tol, self.tol_override(o));
            r.pass = r.tol.accepts(r.abs_err, r.rel_err) && r.abs_err.is_finite();
            r
        };
        match &self.check {
            Check::FirstVariation {
                u,
                zeta,
                weight,
                track: Track::Exact,
                ..
            } => {
                let r = u.to_compact_plq().and_then(|u| {
                    exact_first_variation(&name, &u, zeta, weight, &self.options(o, Mode::TwoSided, None))
                });
                vec![wrap(name, r.map(fix_tol))]
            }
            Check::FirstVariation {
                u,
                zeta,
                weight,
                track: Track::Grid,
                grid,
            } => {
                let grids = self.grids(grid, o);
                let single = grids.len() == 1;
                grids
                    .into_iter()
                    .map(|n| {
                        let label = if single { name.clone() } else { format!("{name}@{n}") };
                        let r = u.to_grid(n).and_then(|g| {
                            let opts = self.options(o, Mode::TwoSided, None);
                            grid_first_variation(&label, &g, zeta, weight, &opts, &PerturbOptions::default())
                        });
                        wrap(label, r.map(fix_tol))
                    })
                    .collect()
            }
            Check::Aleksandrov { body, f, directions } => {
                let r = body.to_body().and_then(|k| {
                    let f = f.build(&k);
                    aleksandrov_polytope(&name, &k, &f, &self.options(o, Mode::TwoSided, *directions))
                });
                vec![wrap(name, r.map(fix_tol))]
            }
            Check::KryvonosLangharst {
                body,
                f,
                psi,
                q,
                translate,
                directions,
            } => {
                let opts = self.options(o, Mode::TwoSided, *directions);
                let density = |p: Point2| psi.eval(p);
                let k = match body.to_body() {
                    Ok(k) => k,
                    Err(e) => return vec![wrap(name, Err(e))],
                };
                let f = f.build(&k);
                let mut out = vec![wrap(
                    name.clone(),
                    kryvonos_langharst(&name, &k, &f, &density, *q, &opts).map(fix_tol),
                )];
                if let Some(y) = translate {
                    let label = format!("{name}+translated");
                    let r = if q.is_some() {
                        Err(Error::Config("the translation recheck needs q = null".into()))
                    } else {
                        kryvonos_langharst_translated(&label, &k, &f, &density, *y, &opts)
                    };
                    out.push(wrap(label, r.map(fix_tol)));
                }
                out
            }
            Check::Rotem { u, v } => {
                let r = u.to_compact_plq().and_then(|u| {
                    let v = v.to_polyhedral()?;
                    rotem_check(&name, &u, &v, &self.options(o, Mode::OneSided, None))
                });
                vec![wrap(name, r.map(fix_tol))]
            }
            Check::Dual { u, v, q } => {
                let r = u.to_compact_plq().and_then(|u| {
                    let v = v.to_polyhedral()?;
                    dual_check(&name, &u, &v, *q, &self.options(o, Mode::OneSided, None))
                });
                vec![wrap(name, r.map(fix_tol))]
            }
            Check::RandomExact { cases } => {
                let opts = self.options(o, Mode::TwoSided, None);
                (0..*cases)
                    .into_par_iter()
                    .map(|k| {
                        let label = format!("{name}#{k}");
                        let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
                        rng.set_stream(k as u64);
                        let (u, zeta) = random_case(&mut rng);
                        let r = exact_first_variation(&label, &u, &zeta, &WeightSpec::exp(), &opts);
                        wrap(label, r.map(fix_tol))
                    })
                    .collect()
            }
            Check::Value { probe, expected } => {
                let start = Instant::now();
                let r = probe.evaluate(o).map(|(v, track, default)| {
                    let mut r =
                        VariationReport::direct(&name, v, *expected, tol_for(default, self.tol_override(o)), track);
                    if track == Track::Grid {
                        r.grid = Some(probe.grid_size(o));
                    }
                    r.timed(start)
                });
                vec![wrap(name, r)]
            }
        }
    }
}

/// A random convex piecewise linear-quadratic `u` with domain in
/// `[−2, 2]` and a piecewise linear `ζ`.
pub fn random_case<R: Rng>(rng: &mut R) -> (Plq, Perturbation) {
    let k = rng.random_range(2..=6);
    let mut xs: Vec<f64> = (0..k).map(|_| rng.random_range(-2.0..2.0)).collect();
    xs.sort_by(f64::total_cmp);
    // keep the domain at least half a unit wide
    if xs[k - 1] - xs[0] < 0.5 {
        xs[k - 1] = xs[0] + 0.5;
    }
    let pts: Vec<(f64, f64)> = xs.iter().map(|&x| (x, rng.random_range(0.0..2.0))).collect();
    let mut u = Plq::from(&crate::convexfn::canonicalize(&pts).expect("distinct points"));
    if rng.random_bool(0.5) {
        let a = rng.random_range(0.1..1.0);
        let b = rng.random_range(-1.0..1.0);
        let q = Plq::new(vec![f64::NEG_INFINITY, f64::INFINITY], vec![Quad::new(a, b, 0.0)]).expect("finite");
        u = u.add(&q).expect("full domain");
    }
    let lo = rng.random_range(-1.0..1.0);
    let hi = lo + rng.random_range(0.1..1.0);
    let zeta = Perturbation::Sum {
        terms: vec![
            Perturbation::support(vec![vec![lo], vec![hi]]),
            Perturbation::constant(rng.random_range(-1.0..1.0)),
        ],
    };
    (u, zeta)
}

impl Probe {
    fn grid_size(&self, o: &RunOptions) -> usize {
        let own = match self {
            Probe::Measure { grid, .. } | Probe::Bulk { grid, .. } | Probe::Boundary { grid, .. } => *grid,
            _ => None,
        };
        o.grid.first().copied().or(own).unwrap_or(DEFAULT_GRID)
    }

    /// The value, its track and the default tolerance.
    fn evaluate(&self, o: &RunOptions) -> Result<(f64, Track, Tolerance)> {
        let exact = |v: f64| Ok((v, Track::Exact, Tolerance::EXACT));
        let n = self.grid_size(o);
        let on_track = |u: &FnSpec, track: Track, f: &dyn Fn(&dyn WeightedFunction) -> Result<f64>| match track {
            Track::Exact => exact(f(&u.to_compact_plq()?)?),
            Track::Grid => Ok((f(&u.to_grid(n)?)?, Track::Grid, Tolerance::grid(n))),
        };
        match self {
            Probe::Conjugate { u, at } => exact(u.to_compact_plq()?.conjugate()?.evaluate(*at)),
            Probe::Biconjugate { u, at } => exact(u.to_compact_plq()?.conjugate()?.conjugate()?.evaluate(*at)),
            Probe::InfConv { u, v, at } => {
                exact(inf_conv_plq(&u.to_compact_plq()?, &v.to_compact_plq()?)?.evaluate(*at))
            }
            Probe::EpiScale { t, u, at } => exact(u.to_compact_plq()?.epi_scale(*t)?.evaluate(*at)),
            Probe::Perturb { u, zeta, t, at } => exact(perturb_exact(&u.to_compact_plq()?, zeta, *t)?.evaluate(*at)),
            Probe::Recession { zeta, direction } => {
                let r = ladder_recession(&|x: &[f64]| zeta.evaluate(x), direction, &DEFAULT_LADDER)?;
                Ok((
                    r,
                    Track::Exact,
                    Tolerance::Absolute(1.0 / DEFAULT_LADDER[DEFAULT_LADDER.len() - 1]),
                ))
            }
            Probe::Measure { u, weight, track, .. } => on_track(u, *track, &|f| Ok(f.epigraph_measure(weight)?.value)),
            Probe::Bulk {
                u, zeta, weight, track, ..
            } => on_track(u, *track, &|f| Ok(f.bulk_integral(zeta, weight)?.value)),
            Probe::Boundary {
                u, zeta, weight, track, ..
            } => on_track(u, *track, &|f| Ok(f.boundary_integral(zeta, weight)?.value)),
            Probe::MomentMass { u, weight, bins } => {
                let m = u
                    .to_compact_plq()?
                    .moment_measure(weight, bins.unwrap_or(DEFAULT_BINS))?;
                Ok((m.total_mass(), Track::Exact, Tolerance::Absolute(1e-8)))
            }
            Probe::SurfaceAtom { body, psi, q, normal } => {
                // only the requested facet: with q < 1 the other facets may
                // touch the singular axis
                let k = body.to_body()?;
                let mut w = 0.0;
                for e in k.facets() {
                    if (e.normal[0] - normal[0]).hypot(e.normal[1] - normal[1]) < 1e-9 {
                        w += edge_integral(e.a, e.b, &|p: Point2| psi.eval(p), *q)?.value;
                    }
                }
                exact(w)
            }
        }
    }
}

/// Runs `scenarios` in parallel; records come back in config order.
pub fn run_scenarios(scenarios: &[&Scenario], o: &RunOptions) -> Vec<Record> {
    scenarios
        .par_iter()
        .map(|s| s.run(o))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Error against resolution for one scenario.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceTable {
    pub scenario: String,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `log err` against `log h`; `None` for fewer
    /// than two rows or a zero error.
    pub order: Option<f64>,
    pub monotone: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    pub grid: Option<usize>,
    pub lhs: f64,
    pub rhs_total: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub pass: bool,
}

/// Fitted order of `errs` against `1/n`.
pub fn fitted_order(grids: &[usize], errs: &[f64]) -> Option<f64> {
    if grids.len() < 2 || errs.iter().any(|&e| !(e > 0.0)) {
        return None;
    }
    let xs: Vec<f64> = grids.iter().map(|&n| -(n as f64).ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Runs a scenario over `grids` (grid track) or once (otherwise).
pub fn convergence(s: &Scenario, grids: &[usize], o: &RunOptions) -> Result<ConvergenceTable> {
    let records = if s.is_grid() {
        let grids = if grids.is_empty() {
            vec![64, 128, 256, 512]
        } else {
            grids.to_vec()
        };
        grids
            .iter()
            .flat_map(|&n| {
                let o = RunOptions {
                    grid: vec![n],
                    ..o.clone()
                };
                s.run(&o)
            })
            .collect::<Vec<_>>()
    } else {
        s.run(o).into_iter().take(1).collect()
    };
    let mut rows = Vec::new();
    for r in records {
        let r = r
            .result
            .map_err(|e| Error::InvalidArgument(format!("{}: {e}", r.scenario)))?;
        rows.push(ConvergenceRow {
            grid: r.grid,
            lhs: r.lhs,
            rhs_total: r.rhs_total,
            abs_err: r.abs_err,
            rel_err: r.rel_err,
            pass: r.pass,
        });
    }
    let ns: Vec<usize> = rows.iter().filter_map(|r| r.grid).collect();
    let errs: Vec<f64> = rows.iter().map(|r| r.abs_err).collect();
    let order = if ns.len() == rows.len() {
        fitted_order(&ns, &errs)
    } else {
        None
    };
    let monotone = errs.windows(2).all(|w| w[1] <= w[0]);
    Ok(ConvergenceTable {
        scenario: s.name.clone(),
        rows,
        order,
        monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_suite_parses_and_documents_itself() {
        let c = Config::standard();
        assert!(c.scenarios.len() > 20);
        assert!(c.scenarios.iter().all(|s| !s.verifies.is_empty()));
    }

    #[test]
    fn unknown_keys_are_config_errors() {
        let bad = r#"{"scenarios": [], "extra": 1}"#;
        assert!(matches!(Config::parse(bad), Err(Error::Config(_))));
        let bad = r#"{"scenarios": [{"name": "a", "check": {"kind": "rotem", "u": {"atom": "quadratic"}, "v": {"atom": "quadratic"}, "w": 1}}]}"#;
        assert!(matches!(Config::parse(bad), Err(Error::Config(_))));
    }

    #[test]
    fn unknown_scenario() {
        let c = Config::standard();
        assert!(matches!(c.select(&["missing".into()]), Err(Error::UnknownScenario(_))));
    }

    #[test]
    fn fitted_order_of_power_law() {
        let ns = [64, 128, 256];
        let errs: Vec<f64> = ns.iter().map(|&n| 3.0 / (n as f64 * n as f64)).collect();
        assert!((fitted_order(&ns, &errs).unwrap() - 2.0).abs() < 1e-12);
        assert!(fitted_order(&[64], &[0.1]).is_none());
    }

    #[test]
    fn random_cases_pass() {
        let s = Scenario {
            name: "r".into(),
            verifies: String::new(),
            mode: None,
            ladder: None,
            tol: None,
            check: Check::RandomExact { cases: 16 },
        };
        for r in s.run(&RunOptions::default()) {
            let rep = r.result.unwrap();
            assert!(rep.pass, "{rep:?}");
        }
    }
}
