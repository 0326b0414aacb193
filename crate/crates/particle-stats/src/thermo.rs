//! Single-state thermodynamics built on one number: the transfer ratio q,
//! i.e. how much probability weight adding one more particle to a state
//! multiplies in. Mean occupation, the map from (beta, mu, energy) to q,
//! entropies, and the grand potential whose stationary point recovers q.

use crate::error::{Error, Result};
use crate::types::ThermoParams;

/// Mean occupation of a geometric law with ratio `q`: q / (1 - q).
pub fn mean_from_q(q: f64) -> Result<f64> {
    check_open_unit("q", q)?;
    Ok(q / (1.0 - q))
}

/// Inverse of [`mean_from_q`]: the ratio producing mean `m` is m / (1 + m).
pub fn q_from_mean(m: f64) -> Result<f64> {
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::Domain(format!("mean must be positive and finite, got {m}")));
    }
    Ok(1.0 / (1.0 / m + 1.0))
}

/// A computed activity together with whether it admits an unbounded
/// (geometric) law, which needs q < 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Activity {
    pub value: f64,
    pub unbounded_admissible: bool,
}

/// q = exp(beta * (mu - energy)).
pub fn q_thermo(params: &ThermoParams, energy: f64) -> Result<Activity> {
    check_finite("energy", energy)?;
    activity_from_drive(params.beta(), params.mu(), energy)
}

/// Generalized activity q = exp(beta * (<nu, charge> - energy)) for a state
/// carrying a vector of conserved charges. With a single charge equal to 1
/// this reduces exactly to [`q_thermo`].
pub fn q_thermo_generalized(params: &ThermoParams, energy: f64, charge: &[f64]) -> Result<Activity> {
    check_finite("energy", energy)?;
    let nu = params
        .nu()
        .ok_or_else(|| Error::Domain("generalized activity needs nu in the parameters".into()))?;
    activity_from_drive(params.beta(), dot(nu, charge)?, energy)
}

fn activity_from_drive(beta: f64, drive: f64, energy: f64) -> Result<Activity> {
    let q = (beta * (drive - energy)).exp();
    if !(q.is_finite() && q > 0.0) {
        return Err(Error::Numeric(format!(
            "activity exp({} * ({} - {})) out of range: {q}",
            beta, drive, energy
        )));
    }
    Ok(Activity { value: q, unbounded_admissible: q < 1.0 })
}

fn dot(nu: &[f64], charge: &[f64]) -> Result<f64> {
    if nu.len() != charge.len() {
        return Err(Error::Domain(format!(
            "charge has dimension {}, nu has dimension {}",
            charge.len(),
            nu.len()
        )));
    }
    for (i, &u) in charge.iter().enumerate() {
        check_finite(&format!("charge[{i}]"), u)?;
    }
    Ok(nu.iter().zip(charge).map(|(a, b)| a * b).sum())
}

/// Entropy of a geometric occupation law with ratio `q`:
/// -ln(1-q) - (q / (1-q)) ln q.
pub fn entropy_geometric(q: f64) -> Result<f64> {
    check_open_unit("q", q)?;
    let ln_1mq = (-q).ln_1p();
    Ok(-ln_1mq - q / (1.0 - q) * q.ln())
}

/// Entropy of a Bernoulli law with success probability `a`; 0 at either
/// endpoint (the closed-interval limit).
pub fn entropy_bernoulli(a: f64) -> Result<f64> {
    if !(a.is_finite() && (0.0..=1.0).contains(&a)) {
        return Err(Error::Domain(format!("probability must lie in [0, 1], got {a}")));
    }
    if a == 0.0 || a == 1.0 {
        return Ok(0.0);
    }
    Ok(-a * a.ln() - (1.0 - a) * (-a).ln_1p())
}

/// Grand potential of one state at trial ratio `q`:
///
///   phi(q) = (energy - drive) * q/(1-q) - (1/beta) * entropy_geometric(q)
///
/// where `drive` is mu, or <nu, charge> when a charge vector is supplied.
/// Stationary in q exactly at the thermodynamic activity from [`q_thermo`].
pub fn grand_potential(
    q: f64,
    params: &ThermoParams,
    energy: f64,
    charge: Option<&[f64]>,
) -> Result<f64> {
    check_open_unit("q", q)?;
    check_finite("energy", energy)?;
    let drive = match (params.nu(), charge) {
        (Some(nu), Some(u)) => dot(nu, u)?,
        (None, None) => params.mu(),
        (Some(_), None) => {
            return Err(Error::Domain("parameters carry nu but no charge was supplied".into()))
        }
        (None, Some(_)) => {
            return Err(Error::Domain("charge supplied but parameters carry no nu".into()))
        }
    };
    let phi = (energy - drive) * q / (1.0 - q) - entropy_geometric(q)? / params.beta();
    if !phi.is_finite() {
        return Err(Error::Numeric(format!("grand potential not finite at q = {q}")));
    }
    Ok(phi)
}

fn check_open_unit(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must lie in (0, 1), got {x}")))
    }
}

fn check_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite, got {x}")))
    }
}
