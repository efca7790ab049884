use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite-difference mode. `Direct` marks reports of plain values, where
/// nothing is differentiated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    TwoSided,
    OneSided,
    Direct,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::TwoSided => "two_sided",
            Mode::OneSided => "one_sided",
            Mode::Direct => "direct",
        }
    }
}

/// Steps `h₀, h₀/2, …, h₀/2^halvings`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ladder {
    pub h0: f64,
    pub halvings: usize,
}

impl Default for Ladder {
    fn default() -> Self {
        Ladder { h0: 1e-2, halvings: 4 }
    }
}

impl Ladder {
    pub fn steps(&self) -> Vec<f64> {
        (0..=self.halvings)
            .map(|k| self.h0 / f64::powi(2.0, k as i32))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h0 > 0.0) || !self.h0.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "ladder step must be positive, got {}",
                self.h0
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Step {
    pub h: f64,
    pub lhs: f64,
}

/// The finite-difference ladder with its extrapolation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LadderResult {
    pub steps: Vec<Step>,
    /// Richardson value on the last three steps (the finest raw value when
    /// fewer are available).
    pub richardson: f64,
    /// Observed convergence order; `None` when fewer than three steps or
    /// when the raw values already agree to rounding.
    #[serde(serialize_with = "order_or_na")]
    pub order: Option<f64>,
}

fn order_or_na<S: serde::Serializer>(o: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match o {
        Some(v) => s.serialize_f64(*v),
        None => s.serialize_str("n/a"),
    }
}

/// Eliminates error terms `a h + b h²` from the values at `h, h/2, h/4`.
pub fn richardson(d_h: f64, d_h2: f64, d_h4: f64) -> f64 {
    (8.0 * d_h4 - 6.0 * d_h2 + d_h) / 3.0
}

/// `log₂` of the ratio of successive differences of the last three values.
pub fn observed_order(vals: &[f64]) -> Option<f64> {
    let n = vals.len();
    if n < 3 {
        return None;
    }
    let d1 = (vals[n - 2] - vals[n - 3]).abs();
    let d2 = (vals[n - 1] - vals[n - 2]).abs();
    let scale = vals[n - 1].abs().max(1.0);
    if d1 <= 1e-12 * scale || d2 <= 1e-13 * scale {
        return None;
    }
    Some((d1 / d2).log2())
}

impl LadderResult {
    pub fn from_steps(steps: Vec<Step>) -> Self {
        let vals: Vec<f64> = steps.iter().map(|s| s.lhs).collect();
        let n = vals.len();
        let richardson = if n >= 3 {
            richardson(vals[n - 3], vals[n - 2], vals[n - 1])
        } else {
            vals.last().copied().unwrap_or(f64::NAN)
        };
        LadderResult {
            richardson,
            order: observed_order(&vals),
            steps,
        }
    }
}

/// Central or forward differences of `mu` over the ladder.
///
/// In two-sided mode a failing `mu(−h)` switches the whole ladder to
/// forward differences; the returned mode says which one was used.
pub fn finite_difference<F>(mu: F, mode: Mode, ladder: &Ladder) -> Result<(Mode, LadderResult)>
where
    F: Fn(f64) -> Result<f64>,
{
    ladder.validate()?;
    if mode == Mode::Direct {
        return Err(Error::InvalidArgument("direct mode has no finite differences".into()));
    }
    let hs = ladder.steps();
    if mode == Mode::TwoSided {
        let two: Result<Vec<Step>> = hs
            .iter()
            .map(|&h| {
                let lhs = (mu(h)? - mu(-h)?) / (2.0 * h);
                Ok(Step { h, lhs })
            })
            .collect();
        match two {
            Ok(steps) => return Ok((Mode::TwoSided, LadderResult::from_steps(steps))),
            Err(Error::PerturbationTooLarge | Error::DomainCollapsed) => {}
            Err(e) => return Err(e),
        }
    }
    let m0 = mu(0.0)?;
    let steps = hs
        .iter()
        .map(|&h| {
            Ok(Step {
                h,
                lhs: (mu(h)? - m0) / h,
            })
        })
        .collect::<Result<Vec<Step>>>()?;
    Ok((Mode::OneSided, LadderResult::from_steps(steps)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_removes_two_terms() {
        let d = |h: f64| 2.0 + 3.0 * h - 5.0 * h * h;
        assert!((richardson(d(0.1), d(0.05), d(0.025)) - 2.0).abs() < 1e-13);
    }

    #[test]
    fn central_differences_of_exponential() {
        let (mode, r) = finite_difference(|t| Ok(2.0 * t.exp()), Mode::TwoSided, &Ladder::default()).unwrap();
        assert_eq!(mode, Mode::TwoSided);
        assert!((r.richardson - 2.0).abs() < 1e-10);
        let p = r.order.unwrap();
        assert!((p - 2.0).abs() < 0.05, "{p}");
    }

    #[test]
    fn linear_functions_have_no_order() {
        let (_, r) = finite_difference(|t| Ok(2.0 * (1.0 + t)), Mode::TwoSided, &Ladder::default()).unwrap();
        assert!(r.order.is_none());
        assert!(r.steps.iter().all(|s| (s.lhs - 2.0).abs() < 1e-12));
        let (_, r) = finite_difference(Ok, Mode::OneSided, &Ladder { h0: 0.1, halvings: 0 }).unwrap();
        assert!(r.order.is_none());
    }

    #[test]
    fn degrades_to_one_sided() {
        let mu = |t: f64| {
            if t < 0.0 {
                Err(Error::PerturbationTooLarge)
            } else {
                Ok(t * t + t)
            }
        };
        let (mode, r) = finite_difference(mu, Mode::TwoSided, &Ladder::default()).unwrap();
        assert_eq!(mode, Mode::OneSided);
        assert!((r.richardson - 1.0).abs() < 1e-12);
    }
}
