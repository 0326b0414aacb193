//! Shared value types: level systems, thermodynamic parameters, activity
//! vectors, and occupation states. Constructors validate once so the math
//! modules can assume well-formed inputs.

use crate::error::{Error, Result};

fn require_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite, got {x}")))
    }
}

/// A list of single-state energies, optionally annotated with a conserved
/// charge vector per state (particle number, spin projection, ...).
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSystem {
    energies: Vec<f64>,
    charges: Option<Vec<Vec<f64>>>,
}

impl LevelSystem {
    pub fn new(energies: Vec<f64>) -> Result<Self> {
        if energies.is_empty() {
            return Err(Error::Domain("level system needs at least one state".into()));
        }
        for (i, &e) in energies.iter().enumerate() {
            require_finite(&format!("energy[{i}]"), e)?;
        }
        Ok(LevelSystem { energies, charges: None })
    }

    /// Attach one charge vector per state; all must share a dimension.
    pub fn with_charges(energies: Vec<f64>, charges: Vec<Vec<f64>>) -> Result<Self> {
        let mut sys = Self::new(energies)?;
        if charges.len() != sys.energies.len() {
            return Err(Error::Domain(format!(
                "{} charge rows for {} states",
                charges.len(),
                sys.energies.len()
            )));
        }
        let dim = charges[0].len();
        for (i, row) in charges.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::Domain(format!(
                    "charge row {i} has dimension {}, expected {dim}",
                    row.len()
                )));
            }
            for (c, &u) in row.iter().enumerate() {
                require_finite(&format!("charge[{i}][{c}]"), u)?;
            }
        }
        sys.charges = Some(charges);
        Ok(sys)
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        false // constructor rejects empty systems
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn charges(&self) -> Option<&[Vec<f64>]> {
        self.charges.as_deref()
    }

    pub fn charge_dim(&self) -> Option<usize> {
        self.charges.as_ref().map(|c| c[0].len())
    }
}

/// Inverse temperature plus the chemical potentials conjugate to whatever is
/// conserved: a plain `mu`, or a vector `nu` paired with per-state charges.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermoParams {
    beta: f64,
    mu: f64,
    nu: Option<Vec<f64>>,
}

impl ThermoParams {
    pub fn new(beta: f64, mu: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::Domain(format!("beta must be positive and finite, got {beta}")));
        }
        require_finite("mu", mu)?;
        Ok(ThermoParams { beta, mu, nu: None })
    }

    pub fn with_nu(beta: f64, nu: Vec<f64>) -> Result<Self> {
        let mut p = Self::new(beta, 0.0)?;
        if nu.is_empty() {
            return Err(Error::Domain("nu must have at least one component".into()));
        }
        for (i, &v) in nu.iter().enumerate() {
            require_finite(&format!("nu[{i}]"), v)?;
        }
        p.nu = Some(nu);
        Ok(p)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nu(&self) -> Option<&[f64]> {
        self.nu.as_deref()
    }
}

/// Which domain the per-state activities live in.
///
/// Geometric-law operations need every q strictly inside (0,1); exclusion
/// (Bernoulli) and capped laws stay normalizable for any positive q.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QRegime {
    /// all components in (0,1)
    OpenUnit,
    /// all components in (0, inf)
    Positive,
}

/// Validated vector of per-state transfer ratios ("activities").
#[derive(Debug, Clone, PartialEq)]
pub struct QVector {
    q: Vec<f64>,
    regime: QRegime,
}

impl QVector {
    /// Activities for an unbounded (geometric) law: every q in (0,1).
    pub fn open_unit(q: Vec<f64>) -> Result<Self> {
        Self::build(q, QRegime::OpenUnit)
    }

    /// Activities for capped or exclusion laws: every q positive and finite.
    pub fn positive(q: Vec<f64>) -> Result<Self> {
        Self::build(q, QRegime::Positive)
    }

    fn build(q: Vec<f64>, regime: QRegime) -> Result<Self> {
        if q.is_empty() {
            return Err(Error::Domain("activity vector must be nonempty".into()));
        }
        for (j, &x) in q.iter().enumerate() {
            let ok = match regime {
                QRegime::OpenUnit => x > 0.0 && x < 1.0,
                QRegime::Positive => x > 0.0 && x.is_finite(),
            };
            if !ok {
                let want = match regime {
                    QRegime::OpenUnit => "(0, 1)",
                    QRegime::Positive => "(0, inf)",
                };
                return Err(Error::Domain(format!("q[{j}] = {x} outside {want}")));
            }
        }
        Ok(QVector { q, regime })
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        false // constructor rejects empty vectors
    }

    pub fn get(&self, j: usize) -> f64 {
        self.q[j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.q
    }

    pub fn regime(&self) -> QRegime {
        self.regime
    }

    /// True when every component also fits the open-unit regime.
    pub fn all_below_one(&self) -> bool {
        self.q.iter().all(|&x| x < 1.0)
    }
}

/// An occupation state: how many particles sit in each single-particle state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Occupancy {
    n: Vec<u64>,
    cap: Option<u64>,
}

impl Occupancy {
    /// Unbounded occupation numbers.
    pub fn new(n: Vec<u64>) -> Self {
        Occupancy { n, cap: None }
    }

    /// Occupation numbers with a per-state cap (exclusion: cap = 1).
    pub fn capped(n: Vec<u64>, cap: u64) -> Result<Self> {
        if let Some((j, &v)) = n.iter().enumerate().find(|(_, &v)| v > cap) {
            return Err(Error::Domain(format!("n[{j}] = {v} exceeds cap {cap}")));
        }
        Ok(Occupancy { n, cap: Some(cap) })
    }

    pub fn counts(&self) -> &[u64] {
        &self.n
    }

    pub fn len(&self) -> usize {
        self.n.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n.is_empty()
    }

    pub fn get(&self, j: usize) -> u64 {
        self.n[j]
    }

    pub fn total(&self) -> u64 {
        self.n.iter().sum()
    }

    pub fn cap(&self) -> Option<u64> {
        self.cap
    }
}
