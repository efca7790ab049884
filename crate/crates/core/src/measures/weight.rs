use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Height density `φ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phi {
    /// `φ(z) = e^{−z}`.
    Exp,
    /// Piecewise linear samples, constant below the first node and with an
    /// exponential tail fitted to the last tenth of the table.
    Table(PhiTable),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, try_from = "TableDoc", into = "TableDoc")]
pub struct PhiTable {
    z: Vec<f64>,
    phi: Vec<f64>,
    rate: f64,
    // ∫_{z_k}^{z_N} φ
    cum: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableDoc {
    z: Vec<f64>,
    phi: Vec<f64>,
}

impl From<PhiTable> for TableDoc {
    fn from(t: PhiTable) -> Self {
        TableDoc { z: t.z, phi: t.phi }
    }
}

impl TryFrom<TableDoc> for PhiTable {
    type Error = Error;
    fn try_from(d: TableDoc) -> Result<Self> {
        PhiTable::new(d.z, d.phi)
    }
}

impl PhiTable {
    pub fn new(z: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        if z.len() < 2 || z.len() != phi.len() {
            return Err(Error::InvalidArgument(
                "phi table needs matching z and phi of length >= 2".into(),
            ));
        }
        if z.windows(2).any(|w| !(w[1] > w[0])) || z.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "phi table abscissae must increase strictly".into(),
            ));
        }
        if phi.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidArgument(
                "phi table values must be finite and nonnegative".into(),
            ));
        }
        let n = z.len() - 1;
        let cut = z[n] - 0.1 * (z[n] - z[0]);
        let k = z.iter().rposition(|&v| v <= cut).unwrap_or(0).min(n - 1);
        let rate = if phi[n] == 0.0 {
            f64::INFINITY
        } else {
            let r = (phi[k] / phi[n]).ln() / (z[n] - z[k]);
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::NonIntegrable("phi table does not decay at its right end".into()));
            }
            r
        };
        let mut cum = vec![0.0; n + 1];
        for i in (0..n).rev() {
            cum[i] = cum[i + 1] + 0.5 * (phi[i] + phi[i + 1]) * (z[i + 1] - z[i]);
        }
        Ok(PhiTable { z, phi, rate, cum })
    }

    fn tail_beyond(&self, t: f64) -> f64 {
        let n = self.z.len() - 1;
        if self.rate.is_infinite() {
            0.0
        } else {
            self.phi[n] * (-(self.rate) * (t - self.z[n])).exp() / self.rate
        }
    }

    fn eval(&self, t: f64) -> f64 {
        let n = self.z.len() - 1;
        if t <= self.z[0] {
            return self.phi[0];
        }
        if t >= self.z[n] {
            return if self.rate.is_infinite() {
                0.0
            } else {
                self.phi[n] * (-(self.rate) * (t - self.z[n])).exp()
            };
        }
        let k = self.z.partition_point(|&v| v <= t) - 1;
        let s = (t - self.z[k]) / (self.z[k + 1] - self.z[k]);
        self.phi[k] + s * (self.phi[k + 1] - self.phi[k])
    }

    fn tail(&self, t: f64) -> f64 {
        let n = self.z.len() - 1;
        if t >= self.z[n] {
            return self.tail_beyond(t);
        }
        let end = self.tail_beyond(self.z[n]);
        if t <= self.z[0] {
            return self.phi[0] * (self.z[0] - t) + self.cum[0] + end;
        }
        let k = self.z.partition_point(|&v| v <= t) - 1;
        0.5 * (self.eval(t) + self.phi[k + 1]) * (self.z[k + 1] - t) + self.cum[k + 1] + end
    }
}

/// Horizontal density `ψ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Psi {
    #[default]
    One,
    /// `ψ(x) = e^{−|x|²/2}`.
    Gauss,
}

/// Weight `dμ(x, z) = φ(z) ψ(x) |x|^{q−n} dz dx`; `q = None` drops the
/// radial factor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, try_from = "WeightDoc", into = "WeightDoc")]
pub struct WeightSpec {
    pub phi: Phi,
    pub psi: Psi,
    q: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightDoc {
    #[serde(default = "default_phi")]
    phi: Phi,
    #[serde(default)]
    psi: Psi,
    #[serde(default)]
    q: Option<f64>,
}

fn default_phi() -> Phi {
    Phi::Exp
}

impl From<WeightSpec> for WeightDoc {
    fn from(w: WeightSpec) -> Self {
        WeightDoc {
            phi: w.phi,
            psi: w.psi,
            q: w.q,
        }
    }
}

impl TryFrom<WeightDoc> for WeightSpec {
    type Error = Error;
    fn try_from(d: WeightDoc) -> Result<Self> {
        WeightSpec::new(d.phi, d.psi, d.q)
    }
}

impl Default for WeightSpec {
    fn default() -> Self {
        WeightSpec::exp()
    }
}

impl WeightSpec {
    pub fn new(phi: Phi, psi: Psi, q: Option<f64>) -> Result<Self> {
        if let Some(q) = q {
            if !(q > 0.0) || !q.is_finite() {
                return Err(Error::InvalidArgument(format!("q must be positive, got {q}")));
            }
        }
        Ok(WeightSpec { phi, psi, q })
    }

    /// `e^{−z} dz dx`.
    pub fn exp() -> Self {
        WeightSpec {
            phi: Phi::Exp,
            psi: Psi::One,
            q: None,
        }
    }

    /// `e^{−z} |x|^{q−n} dz dx`.
    pub fn exp_q(q: f64) -> Result<Self> {
        WeightSpec::new(Phi::Exp, Psi::One, Some(q))
    }

    pub fn q(&self) -> Option<f64> {
        self.q
    }

    /// The exponent `q`, or `n` when absent.
    pub fn q_or(&self, n: usize) -> f64 {
        self.q.unwrap_or(n as f64)
    }

    /// `q` when it actually produces a radial factor in dimension `n`.
    pub fn singular_q(&self, n: usize) -> Option<f64> {
        self.q.filter(|&q| (q - n as f64).abs() > 1e-15)
    }

    /// `φ = exp`, `ψ = 1`, no radial factor.
    pub fn is_plain_exp(&self, n: usize) -> bool {
        self.phi == Phi::Exp && self.psi == Psi::One && self.singular_q(n).is_none()
    }

    pub fn phi(&self, z: f64) -> f64 {
        if z == f64::INFINITY {
            return 0.0;
        }
        match &self.phi {
            Phi::Exp => (-z).exp(),
            Phi::Table(t) => t.eval(z),
        }
    }

    /// `Φ(t) = ∫_t^∞ φ`.
    pub fn tail(&self, t: f64) -> f64 {
        if t == f64::INFINITY {
            return 0.0;
        }
        match &self.phi {
            Phi::Exp => (-t).exp(),
            Phi::Table(tab) => tab.tail(t),
        }
    }

    pub fn psi(&self, x: &[f64]) -> f64 {
        match self.psi {
            Psi::One => 1.0,
            Psi::Gauss => (-0.5 * x.iter().map(|v| v * v).sum::<f64>()).exp(),
        }
    }

    /// `|x|^{q−n}` (1 without `q`).
    pub fn radial(&self, x: &[f64]) -> f64 {
        match self.singular_q(x.len()) {
            None => 1.0,
            Some(q) => x.iter().map(|v| v * v).sum::<f64>().sqrt().powf(q - x.len() as f64),
        }
    }
}

/// Where a discrete measure lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "dim")]
pub enum Carrier {
    /// `ℝ^k`.
    Euclidean(usize),
    /// The unit sphere `S^k ⊂ ℝ^{k+1}`.
    Sphere(usize),
}

/// A finite sum of weighted point masses.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscreteMeasure {
    carrier: Carrier,
    atoms: Vec<(Vec<f64>, f64)>,
    total: f64,
}

impl DiscreteMeasure {
    pub fn new(carrier: Carrier, atoms: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        let dim = match carrier {
            Carrier::Euclidean(k) => k,
            Carrier::Sphere(k) => k + 1,
        };
        for (x, w) in &atoms {
            if !(*w >= 0.0) || !w.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "atom weight {w} is not a finite nonnegative number"
                )));
            }
            if x.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: x.len(),
                });
            }
        }
        let ws: Vec<f64> = atoms.iter().map(|a| a.1).collect();
        let total = crate::quadrature::pairwise_sum(&ws);
        Ok(DiscreteMeasure { carrier, atoms, total })
    }

    pub fn carrier(&self) -> Carrier {
        self.carrier
    }

    pub fn atoms(&self) -> &[(Vec<f64>, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.total
    }

    /// `∫ f dm`.
    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        let parts: Vec<f64> = self.atoms.iter().map(|(x, w)| w * f(x)).collect();
        crate::quadrature::pairwise_sum(&parts)
    }

    /// Barycenter `∫ x dm / m(total)`.
    pub fn barycenter(&self) -> Vec<f64> {
        let dim = self.atoms.first().map_or(0, |a| a.0.len());
        (0..dim).map(|k| self.integrate(|x| x[k]) / self.total).collect()
    }
}
