//! Perturbations `ζ` with linear growth at infinity, built from atoms.

use serde::{Deserialize, Serialize};

use crate::convexfn::Plq;
use crate::error::{Error, Result};

/// Default radius ladder for numeric recession estimates.
pub const DEFAULT_LADDER: [f64; 4] = [10.0, 1e2, 1e3, 1e4];

fn one() -> f64 {
    1.0
}

/// A perturbation `ζ : ℝⁿ → ℝ` as a finite sum of atoms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Perturbation {
    /// Support function of the convex hull of `polytope` (a vertex list).
    Support {
        polytope: Vec<Vec<f64>>,
    },
    /// `coeff·|x|`.
    Norm {
        coeff: f64,
    },
    /// The constant `value`.
    Constant {
        value: f64,
    },
    /// `coeff·√(1 + |x|²)`.
    SoftNorm {
        #[serde(default = "one")]
        coeff: f64,
    },
    /// `coeff / (1 + |x|²)`.
    Bump {
        coeff: f64,
    },
    /// `max_i (slopes_i·x + intercepts_i)`, e.g. the conjugate of a
    /// polyhedral function.
    MaxAffine {
        slopes: Vec<Vec<f64>>,
        intercepts: Vec<f64>,
    },
    /// `factor·term`.
    Scaled {
        factor: f64,
        term: Box<Perturbation>,
    },
    Sum {
        terms: Vec<Perturbation>,
    },
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Perturbation {
    pub fn norm(coeff: f64) -> Self {
        Perturbation::Norm { coeff }
    }

    pub fn constant(value: f64) -> Self {
        Perturbation::Constant { value }
    }

    pub fn support(polytope: Vec<Vec<f64>>) -> Self {
        Perturbation::Support { polytope }
    }

    /// `h_[−1,1]^n`, the ℓ¹ norm.
    pub fn cube_support(n: usize) -> Self {
        let verts: Vec<Vec<f64>> = (0..1usize << n)
            .map(|mask| (0..n).map(|k| if mask >> k & 1 == 1 { 1.0 } else { -1.0 }).collect())
            .collect();
        Perturbation::Support { polytope: verts }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Perturbation::Scaled {
            factor,
            term: Box::new(self),
        }
    }

    pub fn negated(&self) -> Self {
        self.clone().scaled(-1.0)
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        match self {
            Perturbation::Support { polytope } => polytope.iter().map(|v| dot(v, x)).fold(f64::NEG_INFINITY, f64::max),
            Perturbation::Norm { coeff } => coeff * norm(x),
            Perturbation::Constant { value } => *value,
            Perturbation::SoftNorm { coeff } => coeff * (1.0 + x.iter().map(|v| v * v).sum::<f64>()).sqrt(),
            Perturbation::Bump { coeff } => coeff / (1.0 + x.iter().map(|v| v * v).sum::<f64>()),
            Perturbation::MaxAffine { slopes, intercepts } => slopes
                .iter()
                .zip(intercepts)
                .map(|(s, b)| dot(s, x) + b)
                .fold(f64::NEG_INFINITY, f64::max),
            Perturbation::Scaled { factor, term } => factor * term.evaluate(x),
            Perturbation::Sum { terms } => terms.iter().map(|t| t.evaluate(x)).sum(),
        }
    }

    /// Closed-form recession function `ρ_ζ(ν) = lim ζ(sν)/s`.
    pub fn recession(&self, nu: &[f64]) -> f64 {
        match self {
            Perturbation::Support { .. } | Perturbation::Norm { .. } => self.evaluate(nu),
            Perturbation::Constant { .. } | Perturbation::Bump { .. } => 0.0,
            Perturbation::SoftNorm { coeff } => coeff * norm(nu),
            Perturbation::MaxAffine { slopes, .. } => {
                slopes.iter().map(|s| dot(s, nu)).fold(f64::NEG_INFINITY, f64::max)
            }
            Perturbation::Scaled { factor, term } => factor * term.recession(nu),
            Perturbation::Sum { terms } => terms.iter().map(|t| t.recession(nu)).sum(),
        }
    }

    /// Analytic bound on `sup |ρ_ζ − ζ|`.
    pub fn certificate(&self) -> f64 {
        match self {
            Perturbation::Support { .. } | Perturbation::Norm { .. } => 0.0,
            Perturbation::Constant { value } => value.abs(),
            Perturbation::SoftNorm { coeff } => coeff.abs(),
            Perturbation::Bump { coeff } => coeff.abs(),
            Perturbation::MaxAffine { intercepts, .. } => intercepts.iter().fold(0.0, |m, b| m.max(b.abs())),
            Perturbation::Scaled { factor, term } => factor.abs() * term.certificate(),
            Perturbation::Sum { terms } => terms.iter().map(|t| t.certificate()).sum(),
        }
    }

    /// Largest `|ρ_ζ(x) − ζ(x)|` over `directions × radii` samples.
    pub fn sampled_certificate(&self, directions: &[Vec<f64>], radii: &[f64]) -> f64 {
        let mut m = 0.0f64;
        for d in directions {
            for &r in radii {
                let x: Vec<f64> = d.iter().map(|v| v * r).collect();
                m = m.max((self.recession(&x) - self.evaluate(&x)).abs());
            }
        }
        m
    }

    /// `Some(c)` when `ρ_ζ(ν) = c|ν|` (checked on a few directions).
    pub fn radial_recession(&self, n: usize) -> Option<f64> {
        let dirs: Vec<Vec<f64>> = if n == 1 {
            vec![vec![1.0], vec![-1.0]]
        } else {
            (0..12)
                .map(|k| {
                    let a = 0.37 + k as f64 * std::f64::consts::PI / 6.0;
                    vec![a.cos(), a.sin()]
                })
                .collect()
        };
        let c = self.recession(&dirs[0]);
        dirs.iter()
            .all(|d| (self.recession(d) - c).abs() <= 1e-12 * (1.0 + c.abs()))
            .then_some(c)
    }

    /// Exact piecewise linear-quadratic form in one dimension.
    pub fn to_plq(&self) -> Result<Plq> {
        match self {
            Perturbation::Support { polytope } => {
                if polytope.iter().any(|v| v.len() != 1) {
                    return Err(Error::DimensionMismatch {
                        expected: 1,
                        got: polytope.first().map_or(0, |v| v.len()),
                    });
                }
                let lo = polytope.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
                let hi = polytope.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max);
                if !lo.is_finite() {
                    return Err(Error::EmptyGenerators);
                }
                Ok(Plq::support_of_interval(lo, hi))
            }
            Perturbation::Norm { coeff } => Ok(Plq::support_of_interval(-1.0, 1.0).scale(*coeff)),
            Perturbation::Constant { value } => Ok(Plq::constant(*value)),
            Perturbation::MaxAffine { slopes, intercepts } => {
                let mut acc: Option<Plq> = None;
                for (s, b) in slopes.iter().zip(intercepts) {
                    if s.len() != 1 {
                        return Err(Error::DimensionMismatch {
                            expected: 1,
                            got: s.len(),
                        });
                    }
                    let line = Plq::new(
                        vec![f64::NEG_INFINITY, f64::INFINITY],
                        vec![crate::convexfn::Quad::linear(s[0], *b)],
                    )?;
                    acc = Some(match acc {
                        None => line,
                        Some(f) => f.max(&line).expect("lines share the real line"),
                    });
                }
                acc.ok_or(Error::EmptyGenerators)
            }
            Perturbation::Scaled { factor, term } => Ok(term.to_plq()?.scale(*factor)),
            Perturbation::Sum { terms } => {
                let mut acc = Plq::constant(0.0);
                for t in terms {
                    acc = acc.add(&t.to_plq()?).expect("full domains");
                }
                Ok(acc)
            }
            Perturbation::SoftNorm { .. } | Perturbation::Bump { .. } => Err(Error::Unsupported(
                "soft_norm and bump atoms are not piecewise linear-quadratic".into(),
            )),
        }
    }

    /// Points where `ζ` is not smooth in one dimension (used to split
    /// quadrature panels).
    pub fn kinks_1d(&self) -> Vec<f64> {
        match self {
            Perturbation::Support { .. } | Perturbation::Norm { .. } => vec![0.0],
            Perturbation::MaxAffine { .. } => self
                .to_plq()
                .map(|p| {
                    let b = p.breaks();
                    b[1..b.len() - 1].to_vec()
                })
                .unwrap_or_default(),
            Perturbation::Scaled { term, .. } => term.kinks_1d(),
            Perturbation::Sum { terms } => {
                let mut v: Vec<f64> = terms.iter().flat_map(|t| t.kinks_1d()).collect();
                v.sort_by(f64::total_cmp);
                v.dedup();
                v
            }
            _ => Vec::new(),
        }
    }
}

/// `ζ(Rν)/R` along `radii` with a convergence check: successive
/// differences must shrink. Returns the estimate at the largest radius.
pub fn ladder_recession<F: Fn(&[f64]) -> f64>(f: &F, nu: &[f64], radii: &[f64]) -> Result<f64> {
    assert!(!radii.is_empty());
    let est: Vec<f64> = radii
        .iter()
        .map(|&r| {
            let x: Vec<f64> = nu.iter().map(|v| v * r).collect();
            f(&x) / r
        })
        .collect();
    let diffs: Vec<f64> = est.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let scale = 1.0 + est.last().unwrap().abs();
    for w in diffs.windows(2) {
        if w[1] > w[0] && w[1] > 1e-12 * scale {
            return Err(Error::RecessionDiverges { direction: nu.to_vec() });
        }
    }
    if !est.last().unwrap().is_finite() {
        return Err(Error::RecessionDiverges { direction: nu.to_vec() });
    }
    Ok(*est.last().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recession_of_atoms() {
        assert_eq!(Perturbation::norm(1.0).recession(&[-3.0]), 3.0);
        assert_eq!(Perturbation::constant(5.0).recession(&[1.0]), 0.0);
        let soft = Perturbation::SoftNorm { coeff: 1.0 };
        assert_eq!(soft.recession(&[-2.0]), 2.0);
        let est = ladder_recession(&|x: &[f64]| soft.evaluate(x), &[1.0], &DEFAULT_LADDER).unwrap();
        assert!((est - 1.0).abs() <= 1.0 / 1e4);
    }

    #[test]
    fn ladder_detects_divergence() {
        let f = |x: &[f64]| x[0] * x[0];
        assert!(matches!(
            ladder_recession(&f, &[1.0], &DEFAULT_LADDER),
            Err(Error::RecessionDiverges { .. })
        ));
    }

    #[test]
    fn homogeneity_and_certificate() {
        let z = Perturbation::Sum {
            terms: vec![
                Perturbation::cube_support(2),
                Perturbation::Bump { coeff: 0.5 },
                Perturbation::constant(-1.0),
            ],
        };
        for s in [0.5, 2.0, 7.0] {
            let a = z.recession(&[0.3 * s, -0.8 * s]);
            let b = s * z.recession(&[0.3, -0.8]);
            assert!((a - b).abs() < 1e-14);
        }
        let dirs = vec![vec![1.0, 0.0], vec![0.6, 0.8], vec![-0.6, 0.8]];
        assert!(z.sampled_certificate(&dirs, &DEFAULT_LADDER) <= z.certificate());
    }

    #[test]
    fn config_round_trip() {
        let s = r#"{"kind":"sum","terms":[{"kind":"norm","coeff":2.0},{"kind":"soft_norm"}]}"#;
        let z: Perturbation = serde_json::from_str(s).unwrap();
        assert_eq!(z.evaluate(&[0.0]), 1.0);
        assert!(serde_json::from_str::<Perturbation>(r#"{"kind":"norm","coef":1}"#).is_err());
    }

    #[test]
    fn plq_form_matches_evaluation() {
        let z = Perturbation::Sum {
            terms: vec![
                Perturbation::norm(0.5),
                Perturbation::support(vec![vec![-2.0], vec![1.0]]),
            ],
        };
        let p = z.to_plq().unwrap();
        for y in [-3.0, -0.1, 0.0, 0.4, 5.0] {
            assert!((p.evaluate(y) - z.evaluate(&[y])).abs() < 1e-15);
        }
    }
}
