//! Occupation-number ensembles. Unbounded (geometric), exclusion
//! (Bernoulli), and capped (truncated geometric) product laws; canonical
//! weights for a single particle and for magnetic configuration tables;
//! the fixed-total reduction of the product law, its closed form, and the
//! condensation limit; plus two comparison formulas (a bilinear expansion
//! and the multinomial law it is often contrasted with).

use crate::compositions::{composition_count, compositions};
use crate::error::{Error, Result};
use crate::numeric::{upow, KahanSum};
use crate::types::{LevelSystem, Occupancy, QVector};

/// Default cap on enumeration size (number of compositions visited).
pub const DEFAULT_ENUM_BUDGET: u64 = 2_000_000;

/// Below this pairwise activity gap the partial-fraction closed form is
/// refused as ill-conditioned.
pub const DEFAULT_Q_SEPARATION: f64 = 1e-6;

/// Which per-state occupation law a product distribution uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleKind {
    /// Unbounded occupation, geometric marginals (requires q < 1).
    BoseEinstein,
    /// Occupation in {0,1}, Bernoulli marginals (any q > 0).
    FermiDirac,
    /// Occupation capped at K, truncated-geometric marginals (any q > 0).
    /// K = 1 coincides with FermiDirac; K -> infinity approaches
    /// BoseEinstein.
    Gentile(u64),
}

impl EnsembleKind {
    /// Per-state occupation cap, if any.
    pub fn cap(&self) -> Option<u64> {
        match self {
            EnsembleKind::BoseEinstein => None,
            EnsembleKind::FermiDirac => Some(1),
            EnsembleKind::Gentile(k) => Some(*k),
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if let EnsembleKind::Gentile(0) = self {
            return Err(Error::Domain("capped ensemble needs cap >= 1".into()));
        }
        Ok(())
    }

    pub(crate) fn check_q(&self, q: &QVector) -> Result<()> {
        if matches!(self, EnsembleKind::BoseEinstein) && !q.all_below_one() {
            return Err(Error::Domain(
                "unbounded occupation needs every activity below 1".into(),
            ));
        }
        Ok(())
    }

    fn check_occupancy(&self, n: &Occupancy) -> Result<()> {
        if let Some(cap) = self.cap() {
            if let Some((j, &v)) = n.counts().iter().enumerate().find(|(_, &v)| v > cap) {
                return Err(Error::Domain(format!(
                    "n[{j}] = {v} exceeds the cap {cap} of {self:?}"
                )));
            }
        }
        Ok(())
    }
}

impl std::fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EnsembleKind::BoseEinstein => write!(f, "be"),
            EnsembleKind::FermiDirac => write!(f, "fd"),
            EnsembleKind::Gentile(k) => write!(f, "gentile({k})"),
        }
    }
}

/// One row of a magnetic configuration table.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinConfiguration {
    pub label: String,
    pub energy: f64,
    pub magnetization: f64,
}

/// Configurations of a magnetic system in an external field.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinConfigurationTable {
    configurations: Vec<SpinConfiguration>,
    field: f64,
}

impl SpinConfigurationTable {
    pub fn new(configurations: Vec<SpinConfiguration>, field: f64) -> Result<Self> {
        if configurations.is_empty() {
            return Err(Error::Domain("configuration table must be nonempty".into()));
        }
        if !field.is_finite() {
            return Err(Error::Domain(format!("field must be finite, got {field}")));
        }
        let mut labels = std::collections::HashSet::new();
        for c in &configurations {
            if !(c.energy.is_finite() && c.magnetization.is_finite()) {
                return Err(Error::Domain(format!("non-finite entry in configuration {}", c.label)));
            }
            if !labels.insert(c.label.as_str()) {
                return Err(Error::Domain(format!("duplicate configuration label {}", c.label)));
            }
        }
        Ok(SpinConfigurationTable { configurations, field })
    }

    pub fn configurations(&self) -> &[SpinConfiguration] {
        &self.configurations
    }

    pub fn field(&self) -> f64 {
        self.field
    }
}

fn check_lengths(q: &QVector, n: &Occupancy) -> Result<()> {
    if q.len() != n.len() {
        return Err(Error::Domain(format!(
            "occupancy has {} states, activities have {}",
            n.len(),
            q.len()
        )));
    }
    Ok(())
}

/// Normalizer of one capped-geometric state: sum_{m=0..K} q^m.
/// Finite at q = 1 (uniform law over K+1 values).
fn capped_norm(q: f64, cap: u64) -> f64 {
    if q == 1.0 {
        (cap + 1) as f64
    } else {
        (1.0 - upow(q, cap + 1)) / (1.0 - q)
    }
}

/// Probability of the exact occupation vector `n` under the product law.
pub fn joint_prob(kind: EnsembleKind, q: &QVector, n: &Occupancy) -> Result<f64> {
    kind.validate()?;
    kind.check_q(q)?;
    kind.check_occupancy(n)?;
    check_lengths(q, n)?;
    let mut p = 1.0;
    for (j, &nj) in n.counts().iter().enumerate() {
        let qj = q.get(j);
        let norm = match kind {
            EnsembleKind::BoseEinstein => 1.0 / (1.0 - qj),
            EnsembleKind::FermiDirac => 1.0 + qj,
            EnsembleKind::Gentile(cap) => capped_norm(qj, cap),
        };
        p *= upow(qj, nj) / norm;
    }
    Ok(p)
}

/// Probability that every state j holds at least n_j particles.
///
/// For the unbounded law this is the bare product of powers prod q_j^{n_j};
/// capped laws use the per-state truncated tail.
pub fn tail_prob(kind: EnsembleKind, q: &QVector, n: &Occupancy) -> Result<f64> {
    kind.validate()?;
    kind.check_q(q)?;
    kind.check_occupancy(n)?;
    check_lengths(q, n)?;
    let mut p = 1.0;
    for (j, &nj) in n.counts().iter().enumerate() {
        let qj = q.get(j);
        p *= match kind {
            EnsembleKind::BoseEinstein => upow(qj, nj),
            EnsembleKind::FermiDirac => {
                if nj == 0 {
                    1.0
                } else {
                    qj / (1.0 + qj)
                }
            }
            EnsembleKind::Gentile(cap) => {
                // sum_{m=n_j..K} q^m / sum_{m=0..K} q^m
                if qj == 1.0 {
                    (cap + 1 - nj) as f64 / (cap + 1) as f64
                } else {
                    (upow(qj, nj) - upow(qj, cap + 1)) / (1.0 - upow(qj, cap + 1))
                }
            }
        };
    }
    Ok(p)
}

/// Mean occupation of a single state under each law.
pub fn mean_occupancy(kind: EnsembleKind, q: f64) -> Result<f64> {
    kind.validate()?;
    if !(q.is_finite() && q > 0.0) {
        return Err(Error::Domain(format!("activity must be positive and finite, got {q}")));
    }
    match kind {
        EnsembleKind::BoseEinstein => {
            if q >= 1.0 {
                return Err(Error::Domain(format!(
                    "unbounded occupation needs q < 1, got {q}"
                )));
            }
            Ok(q / (1.0 - q))
        }
        EnsembleKind::FermiDirac => Ok(q / (1.0 + q)),
        EnsembleKind::Gentile(cap) => {
            if q == 1.0 {
                // uniform over {0..K}
                return Ok(cap as f64 / 2.0);
            }
            let k = cap as f64;
            let qk = upow(q, cap);
            let qk1 = qk * q;
            Ok(q * (1.0 + k * qk1 - (1.0 + k) * qk) / ((1.0 - q) * (1.0 - qk1)))
        }
    }
}

/// Boltzmann weights of a single particle over the level system,
/// exp(-beta (eps_j - <nu, u_j>)) normalized. Max-shift keeps the
/// exponentials in range; the result is invariant under a common energy
/// shift.
pub fn canonical_single_particle(
    beta: f64,
    levels: &LevelSystem,
    nu: Option<&[f64]>,
) -> Result<Vec<f64>> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::Domain(format!("beta must be positive and finite, got {beta}")));
    }
    let exponents: Vec<f64> = match nu {
        None => levels.energies().iter().map(|&e| -beta * e).collect(),
        Some(nu) => {
            let charges = levels.charges().ok_or_else(|| {
                Error::Domain("nu supplied but the level system carries no charges".into())
            })?;
            if levels.charge_dim() != Some(nu.len()) {
                return Err(Error::Domain(format!(
                    "nu has dimension {}, charges have dimension {:?}",
                    nu.len(),
                    levels.charge_dim()
                )));
            }
            levels
                .energies()
                .iter()
                .zip(charges)
                .map(|(&e, u)| {
                    let drive: f64 = nu.iter().zip(u).map(|(a, b)| a * b).sum();
                    -beta * (e - drive)
                })
                .collect()
        }
    };
    Ok(normalized_boltzmann(&exponents))
}

/// Probabilities of magnetic configurations: exp(-beta (E - H M)) normalized.
pub fn magnetic_canonical(table: &SpinConfigurationTable, beta: f64) -> Result<Vec<f64>> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::Domain(format!("beta must be positive and finite, got {beta}")));
    }
    let h = table.field();
    let exponents: Vec<f64> = table
        .configurations()
        .iter()
        .map(|c| -beta * (c.energy - h * c.magnetization))
        .collect();
    Ok(normalized_boltzmann(&exponents))
}

fn normalized_boltzmann(exponents: &[f64]) -> Vec<f64> {
    let m = exponents.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = exponents.iter().map(|&x| (x - m).exp()).collect();
    let z: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / z).collect()
}

fn check_enum_budget(total: u64, parts: usize, budget: u64) -> Result<u64> {
    match composition_count(total, parts) {
        Some(c) if c <= budget => Ok(c),
        Some(c) => Err(Error::Budget(format!(
            "enumeration needs {c} compositions, budget is {budget}"
        ))),
        None => Err(Error::Budget(format!(
            "composition count for total {total} into {parts} parts overflows"
        ))),
    }
}

/// Partition sum over all occupation vectors with exactly `total` particles:
/// sum over compositions of prod q_j^{n_j}. Exact enumeration in fixed
/// lexicographic order with compensated summation.
pub fn zgc_direct(q: &QVector, total: u64, budget: u64) -> Result<f64> {
    EnsembleKind::BoseEinstein.check_q(q)?;
    check_enum_budget(total, q.len(), budget)?;
    let mut acc = KahanSum::default();
    for n in compositions(total, q.len()) {
        let term = n
            .iter()
            .enumerate()
            .fold(1.0, |t, (j, &nj)| t * upow(q.get(j), nj));
        acc.add(term);
    }
    Ok(acc.value())
}

fn min_pairwise_gap(q: &[f64]) -> f64 {
    let mut gap = f64::INFINITY;
    for i in 0..q.len() {
        for j in i + 1..q.len() {
            gap = gap.min((q[i] - q[j]).abs());
        }
    }
    gap
}

/// Closed form of [`zgc_direct`] for pairwise-distinct activities:
/// sum_j q_j^{total+k-1} / prod_{m != j} (q_j - q_m).
///
/// Near-coincident activities make the partial fractions cancel
/// catastrophically, so those inputs are refused; use [`zgc_direct`].
pub fn zgc_closed(q: &QVector, total: u64) -> Result<f64> {
    EnsembleKind::BoseEinstein.check_q(q)?;
    let k = q.len();
    if k > 1 {
        let gap = min_pairwise_gap(q.as_slice());
        if gap < DEFAULT_Q_SEPARATION {
            return Err(Error::IllConditioned(format!(
                "activity gap {gap:.3e} below {DEFAULT_Q_SEPARATION:.0e}; use direct enumeration"
            )));
        }
    }
    let mut acc = KahanSum::default();
    for j in 0..k {
        let qj = q.get(j);
        let mut term = upow(qj, total + k as u64 - 1);
        for m in 0..k {
            if m != j {
                term /= qj - q.get(m);
            }
        }
        acc.add(term);
    }
    Ok(acc.value())
}

/// Probability of occupation vector `n` given that the total is `total`:
/// prod q_j^{n_j} / Z(total).
pub fn conditional_prob_given_total(
    q: &QVector,
    n: &Occupancy,
    total: u64,
    budget: u64,
) -> Result<f64> {
    check_lengths(q, n)?;
    if n.total() != total {
        return Err(Error::Domain(format!(
            "occupancy sums to {}, conditioning total is {total}",
            n.total()
        )));
    }
    let z = zgc_direct(q, total, budget)?;
    let w = n
        .counts()
        .iter()
        .enumerate()
        .fold(1.0, |t, (j, &nj)| t * upow(q.get(j), nj));
    Ok(w / z)
}

/// Conditional mean occupation of one state at fixed total, by enumeration
/// and (when the activities are well separated) by the partial-fraction
/// closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalMean {
    /// The enumeration value (always computed; the trustworthy number).
    pub value: f64,
    /// The closed-form value when the activities allowed it.
    pub closed_form: Option<f64>,
    /// True when the closed form was refused and only enumeration ran.
    pub used_fallback: bool,
}

/// E(n_i | total). The closed form requires k >= 2 and pairwise-separated
/// activities; otherwise the result falls back to enumeration alone and
/// says so. When both paths run they must agree to 1e-8 relative.
pub fn conditional_mean_given_total(
    q: &QVector,
    state: usize,
    total: u64,
    budget: u64,
) -> Result<ConditionalMean> {
    let k = q.len();
    if state >= k {
        return Err(Error::Domain(format!("state index {state} out of range for {k} states")));
    }
    EnsembleKind::BoseEinstein.check_q(q)?;
    check_enum_budget(total, k, budget)?;

    // enumeration: E = sum n_i w(n) / sum w(n)
    let mut num = KahanSum::default();
    let mut den = KahanSum::default();
    for n in compositions(total, k) {
        let w = n
            .iter()
            .enumerate()
            .fold(1.0, |t, (j, &nj)| t * upow(q.get(j), nj));
        den.add(w);
        num.add(n[state] as f64 * w);
    }
    let enumerated = num.value() / den.value();

    let closed = if k >= 2 && min_pairwise_gap(q.as_slice()) >= DEFAULT_Q_SEPARATION {
        Some(conditional_mean_closed(q, state, total)?)
    } else {
        None
    };

    if let Some(c) = closed {
        let scale = enumerated.abs().max(1e-12);
        let rel = (c - enumerated).abs() / scale;
        if total > 0 && rel > 1e-8 {
            return Err(Error::Numeric(format!(
                "closed form {c} and enumeration {enumerated} disagree (rel {rel:.3e})"
            )));
        }
    }

    Ok(ConditionalMean {
        value: enumerated,
        closed_form: closed,
        used_fallback: closed.is_none(),
    })
}

/// Partial-fraction closed form for the conditional mean:
///
///   E(n_i | N) = Z(N)^{-1} sum_{j != i} q_i q_j^{k-2}
///       [ q_j^{N+1} + N q_i^{N+1} - (N+1) q_i^N q_j ]
///       / [ (q_j - q_i)^2 prod_{m != i,j} (q_j - q_m) ]
///
/// (for k = 2 the q_j^{k-2} factor is 1).
fn conditional_mean_closed(q: &QVector, state: usize, total: u64) -> Result<f64> {
    let k = q.len();
    let z = zgc_closed(q, total)?;
    let qi = q.get(state);
    let n = total as f64;
    let mut acc = KahanSum::default();
    for j in 0..k {
        if j == state {
            continue;
        }
        let qj = q.get(j);
        let bracket = upow(qj, total + 1) + n * upow(qi, total + 1) - (n + 1.0) * upow(qi, total) * qj;
        let mut denom = (qj - qi) * (qj - qi);
        for m in 0..k {
            if m != state && m != j {
                denom *= qj - q.get(m);
            }
        }
        acc.add(qi * upow(qj, k as u64 - 2) * bracket / denom);
    }
    Ok(acc.value() / z)
}

/// Limit of E(n_other | total) as total -> infinity when `ground` carries
/// the strictly largest activity: q_other / (q_ground - q_other).
pub fn condensation_limit(q: &QVector, ground: usize, other: usize) -> Result<f64> {
    let k = q.len();
    if ground >= k || other >= k {
        return Err(Error::Domain(format!(
            "state indices ({ground}, {other}) out of range for {k} states"
        )));
    }
    if ground == other {
        return Err(Error::Domain("ground and other state must differ".into()));
    }
    let qg = q.get(ground);
    for m in 0..k {
        if m != ground && q.get(m) >= qg {
            return Err(Error::Domain(format!(
                "state {ground} is not the unique activity maximum (q[{m}] = {} >= {qg})",
                q.get(m)
            )));
        }
    }
    Ok(q.get(other) / (qg - q.get(other)))
}

/// First-order expansion of P0 prod (p + delta_j)^{n_j} in the deltas:
/// P0 p^N (1 + (1/p) sum delta_j n_j). Second-order accurate.
pub fn bilinear_approx(p: f64, deltas: &[f64], n: &Occupancy, p0: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("base probability must lie in (0,1), got {p}")));
    }
    if !p0.is_finite() {
        return Err(Error::Domain(format!("prefactor must be finite, got {p0}")));
    }
    if deltas.len() != n.len() {
        return Err(Error::Domain(format!(
            "{} deltas for {} states",
            deltas.len(),
            n.len()
        )));
    }
    for (j, &d) in deltas.iter().enumerate() {
        let qj = p + d;
        if !(qj > 0.0 && qj < 1.0) {
            return Err(Error::Domain(format!("p + delta[{j}] = {qj} outside (0,1)")));
        }
    }
    let total = n.total();
    let linear: f64 = deltas
        .iter()
        .zip(n.counts())
        .map(|(&d, &nj)| d * nj as f64)
        .sum();
    Ok(p0 * upow(p, total) * (1.0 + linear / p))
}

const FACTORIAL_TOTAL_LIMIT: u64 = 1_000_000;

/// Multinomial mass N! prod p_j^{n_j} / n_j! for a normalized probability
/// vector p. This is the distinguishable-particle law that differs from the
/// fixed-total product law by exactly the multinomial coefficient.
pub fn johnson_prob(p: &[f64], n: &Occupancy) -> Result<f64> {
    if p.len() != n.len() {
        return Err(Error::Domain(format!("{} probabilities for {} states", p.len(), n.len())));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!("probabilities sum to {sum}, expected 1")));
    }
    if p.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
        return Err(Error::Domain("probabilities must lie in [0,1]".into()));
    }
    let total = n.total();
    if total > FACTORIAL_TOTAL_LIMIT {
        return Err(Error::Budget(format!(
            "total occupation {total} exceeds factorial budget {FACTORIAL_TOTAL_LIMIT}"
        )));
    }
    // log space: ln N! - sum ln n_j! + sum n_j ln p_j
    if p.iter().zip(n.counts()).any(|(&pj, &nj)| pj == 0.0 && nj > 0) {
        return Ok(0.0);
    }
    let mut ln_mass = ln_factorial(total);
    for (&pj, &nj) in p.iter().zip(n.counts()) {
        ln_mass -= ln_factorial(nj);
        if nj > 0 {
            ln_mass += nj as f64 * pj.ln();
        }
    }
    Ok(ln_mass.exp())
}

fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn occ(n: &[u64]) -> Occupancy {
        Occupancy::new(n.to_vec())
    }

    #[test]
    fn joint_prob_spot_values() {
        let q1 = QVector::open_unit(vec![0.5]).unwrap();
        assert_eq!(joint_prob(EnsembleKind::BoseEinstein, &q1, &occ(&[0])).unwrap(), 0.5);

        let qfd = QVector::positive(vec![1.0]).unwrap();
        assert_eq!(joint_prob(EnsembleKind::FermiDirac, &qfd, &occ(&[0])).unwrap(), 0.5);
        assert_eq!(joint_prob(EnsembleKind::FermiDirac, &qfd, &occ(&[1])).unwrap(), 0.5);

        let g = joint_prob(EnsembleKind::Gentile(2), &q1, &occ(&[1])).unwrap();
        assert!((g - 0.25 / 0.875).abs() < 1e-15, "{g}");
    }

    #[test]
    fn joint_prob_normalizes() {
        // exclusion law: exact over {0,1}^2
        let q = QVector::positive(vec![0.7, 2.5]).unwrap();
        let mut s = 0.0;
        for a in 0..2u64 {
            for b in 0..2u64 {
                s += joint_prob(EnsembleKind::FermiDirac, &q, &occ(&[a, b])).unwrap();
            }
        }
        assert!((s - 1.0).abs() < 1e-14, "{s}");

        // capped law: exact over {0..3}^2
        let qg = QVector::positive(vec![0.6, 1.3]).unwrap();
        let mut s = 0.0;
        for a in 0..4u64 {
            for b in 0..4u64 {
                s += joint_prob(EnsembleKind::Gentile(3), &qg, &occ(&[a, b])).unwrap();
            }
        }
        assert!((s - 1.0).abs() < 1e-14, "{s}");

        // unbounded law: truncated with analytic tail
        let qb = QVector::open_unit(vec![0.5, 0.3]).unwrap();
        let m = 40u64;
        let mut s = 0.0;
        for a in 0..=m {
            for b in 0..=m {
                s += joint_prob(EnsembleKind::BoseEinstein, &qb, &occ(&[a, b])).unwrap();
            }
        }
        let tail = 1.0 - (1.0 - 0.5f64.powi(41)) * (1.0 - 0.3f64.powi(41));
        assert!((s - 1.0).abs() < tail + 1e-13, "sum {s} tail {tail}");
    }

    #[test]
    fn ratio_property_unbounded() {
        let q = QVector::open_unit(vec![0.5, 0.3, 0.2]).unwrap();
        for a in 0..4u64 {
            for b in 0..4u64 {
                for c in 0..4u64 {
                    let base = joint_prob(EnsembleKind::BoseEinstein, &q, &occ(&[a, b, c])).unwrap();
                    for j in 0..3 {
                        let mut up = [a, b, c];
                        up[j] += 1;
                        let bumped =
                            joint_prob(EnsembleKind::BoseEinstein, &q, &occ(&up)).unwrap();
                        let ratio = bumped / base;
                        assert!(
                            (ratio - q.get(j)).abs() < 1e-12,
                            "n=({a},{b},{c}) j={j} ratio={ratio}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn tail_prob_spot_values() {
        let q = QVector::open_unit(vec![0.5, 1.0 / 3.0]).unwrap();
        let t = tail_prob(EnsembleKind::BoseEinstein, &q, &occ(&[1, 2])).unwrap();
        assert!((t - 1.0 / 18.0).abs() < 1e-15, "{t}");
        assert_eq!(tail_prob(EnsembleKind::BoseEinstein, &q, &occ(&[0, 0])).unwrap(), 1.0);

        // exclusion: sum the joint over the 4 states and compare
        let qfd = QVector::positive(vec![1.0, 3.0]).unwrap();
        let t = tail_prob(EnsembleKind::FermiDirac, &qfd, &occ(&[1, 1])).unwrap();
        assert!((t - 0.375).abs() < 1e-15, "{t}");
        let direct: f64 = joint_prob(EnsembleKind::FermiDirac, &qfd, &occ(&[1, 1])).unwrap();
        assert!((t - direct).abs() < 1e-15); // only (1,1) is >= (1,1)

        // capped tail sums the truncated masses
        let qg = QVector::positive(vec![0.5]).unwrap();
        let t = tail_prob(EnsembleKind::Gentile(3), &qg, &occ(&[2])).unwrap();
        let by_sum: f64 = (2..=3)
            .map(|m| joint_prob(EnsembleKind::Gentile(3), &qg, &occ(&[m])).unwrap())
            .sum();
        assert!((t - by_sum).abs() < 1e-15);
    }

    #[test]
    fn tail_ratio_property_unbounded() {
        let q = QVector::open_unit(vec![0.5, 0.3, 0.2]).unwrap();
        for a in 0..4u64 {
            for b in 0..4u64 {
                for c in 0..4u64 {
                    let base = tail_prob(EnsembleKind::BoseEinstein, &q, &occ(&[a, b, c])).unwrap();
                    for j in 0..3 {
                        let mut up = [a, b, c];
                        up[j] += 1;
                        let bumped = tail_prob(EnsembleKind::BoseEinstein, &q, &occ(&up)).unwrap();
                        assert!((bumped / base - q.get(j)).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn occupancy_cap_enforced() {
        let q = QVector::positive(vec![0.5]).unwrap();
        assert!(joint_prob(EnsembleKind::FermiDirac, &q, &occ(&[2])).is_err());
        assert!(joint_prob(EnsembleKind::Gentile(3), &q, &occ(&[4])).is_err());
        assert!(joint_prob(EnsembleKind::Gentile(0), &q, &occ(&[0])).is_err());
        let qhot = QVector::positive(vec![1.5]).unwrap();
        assert!(joint_prob(EnsembleKind::BoseEinstein, &qhot, &occ(&[0])).is_err());
    }

    #[test]
    fn mean_occupancy_values() {
        assert_eq!(mean_occupancy(EnsembleKind::FermiDirac, 1.0).unwrap(), 0.5);
        let g1 = mean_occupancy(EnsembleKind::Gentile(1), 0.7).unwrap();
        let fd = mean_occupancy(EnsembleKind::FermiDirac, 0.7).unwrap();
        assert!((g1 - fd).abs() < 1e-15, "{g1} vs {fd}");
        let g2 = mean_occupancy(EnsembleKind::Gentile(2), 0.5).unwrap();
        assert!((g2 - 4.0 / 7.0).abs() < 1e-15, "{g2}");
        let g200 = mean_occupancy(EnsembleKind::Gentile(200), 0.5).unwrap();
        assert!((g200 - 1.0).abs() < 1e-10, "{g200}");
        assert_eq!(mean_occupancy(EnsembleKind::Gentile(4), 1.0).unwrap(), 2.0);
        assert!(mean_occupancy(EnsembleKind::BoseEinstein, 1.0).is_err());
        assert!(mean_occupancy(EnsembleKind::BoseEinstein, -0.2).is_err());
    }

    #[test]
    fn capped_mean_matches_enumeration() {
        for &cap in &[1u64, 2, 3, 7] {
            for &q in &[0.2, 0.5, 0.9, 1.3] {
                let qv = QVector::positive(vec![q]).unwrap();
                let mut mean = 0.0;
                for m in 0..=cap {
                    mean += m as f64
                        * joint_prob(EnsembleKind::Gentile(cap), &qv, &occ(&[m])).unwrap();
                }
                let closed = mean_occupancy(EnsembleKind::Gentile(cap), q).unwrap();
                assert!((mean - closed).abs() < 1e-13, "cap={cap} q={q}: {mean} vs {closed}");
            }
        }
    }

    #[test]
    fn canonical_weights() {
        let levels = LevelSystem::new(vec![0.0, std::f64::consts::LN_2]).unwrap();
        let p = canonical_single_particle(1.0, &levels, None).unwrap();
        assert!((p[0] - 2.0 / 3.0).abs() < 1e-14);
        assert!((p[1] - 1.0 / 3.0).abs() < 1e-14);

        let flat = LevelSystem::new(vec![3.3, 3.3, 3.3]).unwrap();
        for w in canonical_single_particle(0.7, &flat, None).unwrap() {
            assert!((w - 1.0 / 3.0).abs() < 1e-14);
        }

        // generalized exponent cancels: energies (0,1), charges (0),(1), nu=(1)
        let sys = LevelSystem::with_charges(vec![0.0, 1.0], vec![vec![0.0], vec![1.0]]).unwrap();
        let p = canonical_single_particle(1.0, &sys, Some(&[1.0])).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-14);
        assert!((p[1] - 0.5).abs() < 1e-14);

        assert!(canonical_single_particle(1.0, &levels, Some(&[1.0])).is_err());
        assert!(canonical_single_particle(0.0, &levels, None).is_err());
    }

    #[test]
    fn canonical_shift_invariance_and_overflow() {
        let a = LevelSystem::new(vec![0.1, 0.9, 2.0]).unwrap();
        let b = LevelSystem::new(vec![100.1, 100.9, 102.0]).unwrap();
        let pa = canonical_single_particle(2.0, &a, None).unwrap();
        let pb = canonical_single_particle(2.0, &b, None).unwrap();
        for (x, y) in pa.iter().zip(&pb) {
            assert!((x - y).abs() < 1e-12);
        }
        // would overflow exp without the max shift
        let wide = LevelSystem::new(vec![0.0, -2000.0]).unwrap();
        let p = canonical_single_particle(1.0, &wide, None).unwrap();
        assert_eq!(p[1], 1.0);
        assert!(p.iter().sum::<f64>() <= 1.0 + 1e-15);
    }

    #[test]
    fn magnetic_weights() {
        let c = |label: &str, e: f64, m: f64| SpinConfiguration {
            label: label.into(),
            energy: e,
            magnetization: m,
        };
        let free = SpinConfigurationTable::new(vec![c("up", 0.0, 1.0), c("dn", 0.0, -1.0)], 0.0)
            .unwrap();
        let p = magnetic_canonical(&free, 1.0).unwrap();
        assert_eq!(p, vec![0.5, 0.5]);

        let field = SpinConfigurationTable::new(vec![c("up", 0.0, 1.0), c("dn", 0.0, -1.0)], 1.0)
            .unwrap();
        let p = magnetic_canonical(&field, 1.0).unwrap();
        // logistic of 2 beta H; partition function 2 cosh(beta H)
        assert!((p[0] - 0.8807970779778823).abs() < 1e-15, "{}", p[0]);
        assert!((p[1] - 0.11920292202211755).abs() < 1e-15);
        let z_direct = (1.0f64).exp() + (-1.0f64).exp();
        assert!((z_direct - 2.0 * 1.0f64.cosh()).abs() < 1e-14);

        // zero field reduces to canonical weights on the energies
        let table = SpinConfigurationTable::new(vec![c("a", 0.2, 1.0), c("b", 1.1, -1.0)], 0.0)
            .unwrap();
        let pm = magnetic_canonical(&table, 1.3).unwrap();
        let pc =
            canonical_single_particle(1.3, &LevelSystem::new(vec![0.2, 1.1]).unwrap(), None)
                .unwrap();
        for (x, y) in pm.iter().zip(&pc) {
            assert!((x - y).abs() < 1e-15);
        }

        assert!(SpinConfigurationTable::new(vec![], 0.0).is_err());
        assert!(
            SpinConfigurationTable::new(vec![c("x", 0.0, 1.0), c("x", 1.0, 0.0)], 0.0).is_err()
        );
    }

    #[test]
    fn partition_sums() {
        let q = QVector::open_unit(vec![0.5, 0.25]).unwrap();
        let b = DEFAULT_ENUM_BUDGET;
        assert_eq!(zgc_direct(&q, 0, b).unwrap(), 1.0);
        assert!((zgc_direct(&q, 1, b).unwrap() - 0.75).abs() < 1e-15);
        assert!((zgc_direct(&q, 2, b).unwrap() - 0.4375).abs() < 1e-15);
        assert!((zgc_closed(&q, 1).unwrap() - 0.75).abs() < 1e-14);
        assert!((zgc_closed(&q, 2).unwrap() - 0.4375).abs() < 1e-14);

        let q3 = QVector::open_unit(vec![0.5, 0.3, 0.2]).unwrap();
        for n in 0..=10u64 {
            let d = zgc_direct(&q3, n, b).unwrap();
            let c = zgc_closed(&q3, n).unwrap();
            assert!((d - c).abs() / d.abs() < 1e-9, "N={n}: {d} vs {c}");
        }
    }

    #[test]
    fn partition_guards() {
        let q = QVector::open_unit(vec![0.5, 0.25]).unwrap();
        match zgc_direct(&q, 10_000_000, 1000) {
            Err(Error::Budget(msg)) => assert!(msg.contains("budget")),
            other => panic!("expected budget error, got {other:?}"),
        }
        let close = QVector::open_unit(vec![0.5, 0.5 + 1e-9]).unwrap();
        match zgc_closed(&close, 3) {
            Err(Error::IllConditioned(_)) => {}
            other => panic!("expected ill-conditioned error, got {other:?}"),
        }
        // single state: closed form degenerates to q^N with no separation demand
        let q1 = QVector::open_unit(vec![0.5]).unwrap();
        assert_eq!(zgc_closed(&q1, 3).unwrap(), 0.125);
    }

    #[test]
    fn conditional_probabilities() {
        let q = QVector::open_unit(vec![0.5, 0.25]).unwrap();
        let b = DEFAULT_ENUM_BUDGET;
        let p = conditional_prob_given_total(&q, &occ(&[1, 0]), 1, b).unwrap();
        assert!((p - 2.0 / 3.0).abs() < 1e-14);
        let p = conditional_prob_given_total(&q, &occ(&[1, 1]), 2, b).unwrap();
        assert!((p - 2.0 / 7.0).abs() < 1e-14);
        assert!(conditional_prob_given_total(&q, &occ(&[1, 1]), 3, b).is_err());

        // equal activities: uniform over compositions
        let qe = QVector::open_unit(vec![0.3, 0.3]).unwrap();
        let p = conditional_prob_given_total(&qe, &occ(&[2, 0]), 2, b).unwrap();
        assert!((p - 1.0 / 3.0).abs() < 1e-14);

        // conditional probabilities sum to 1 over compositions
        let mut s = 0.0;
        for n in compositions(4, 2) {
            s += conditional_prob_given_total(&q, &occ(&n), 4, b).unwrap();
        }
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conditional_means() {
        let q = QVector::open_unit(vec![0.5, 0.25]).unwrap();
        let b = DEFAULT_ENUM_BUDGET;
        let m = conditional_mean_given_total(&q, 0, 2, b).unwrap();
        assert!((m.value - 10.0 / 7.0).abs() < 1e-13, "{}", m.value);
        assert!(!m.used_fallback);
        let c = m.closed_form.unwrap();
        assert!((c - 10.0 / 7.0).abs() < 1e-10, "{c}");

        // totals are conserved
        let m2 = conditional_mean_given_total(&q, 1, 2, b).unwrap();
        assert!((m.value + m2.value - 2.0).abs() < 1e-10);

        // exchangeable case falls back (equal q refused by the closed form)
        let qe = QVector::open_unit(vec![0.4, 0.4, 0.4]).unwrap();
        let m = conditional_mean_given_total(&qe, 1, 6, b).unwrap();
        assert!(m.used_fallback);
        assert!((m.value - 2.0).abs() < 1e-12);

        // near-equal activities also fall back rather than cancel
        let qn = QVector::open_unit(vec![0.4, 0.4 + 1e-9]).unwrap();
        let m = conditional_mean_given_total(&qn, 0, 3, b).unwrap();
        assert!(m.used_fallback && m.closed_form.is_none());
    }

    #[test]
    fn condensation_values() {
        let q = QVector::open_unit(vec![0.5, 0.25]).unwrap();
        assert_eq!(condensation_limit(&q, 0, 1).unwrap(), 1.0);
        let q3 = QVector::open_unit(vec![0.6, 0.3, 0.1]).unwrap();
        assert!((condensation_limit(&q3, 0, 2).unwrap() - 0.2).abs() < 1e-15);
        let tiny = QVector::open_unit(vec![0.5, 1e-12]).unwrap();
        assert!(condensation_limit(&tiny, 0, 1).unwrap() < 1e-11);

        let tie = QVector::open_unit(vec![0.5, 0.5, 0.1]).unwrap();
        assert!(condensation_limit(&tie, 0, 2).is_err());
        assert!(condensation_limit(&q, 1, 0).is_err()); // not the max
        assert!(condensation_limit(&q, 0, 0).is_err());
    }

    #[test]
    fn bilinear_expansion() {
        // zero perturbation is exact
        let v = bilinear_approx(0.5, &[0.0, 0.0], &occ(&[2, 1]), 1.0).unwrap();
        assert_eq!(v, 0.125);

        // documented one-state instance: approx 0.26 vs exact 0.2601
        let approx = bilinear_approx(0.5, &[0.01], &occ(&[2]), 1.0).unwrap();
        assert!((approx - 0.26).abs() < 1e-15);
        let exact = 0.51f64.powi(2);
        assert!((approx - exact).abs() <= 1e-4);

        // halving the perturbation quarters the error (second order)
        let n = occ(&[2, 3]);
        let exact = |d: f64| (0.5f64 + d).powi(2) * (0.5f64 - d).powi(3);
        let err = |d: f64| (bilinear_approx(0.5, &[d, -d], &n, 1.0).unwrap() - exact(d)).abs();
        let ratio = err(0.01) / err(0.005);
        assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");

        assert!(bilinear_approx(0.5, &[0.6], &occ(&[1]), 1.0).is_err());
        assert!(bilinear_approx(0.5, &[0.0], &occ(&[1, 2]), 1.0).is_err());
    }

    #[test]
    fn multinomial_masses() {
        let p = johnson_prob(&[0.5, 0.5], &occ(&[1, 1])).unwrap();
        assert!((p - 0.5).abs() < 1e-14);
        let p = johnson_prob(&[0.2, 0.3, 0.5], &occ(&[0, 1, 0])).unwrap();
        assert!((p - 0.3).abs() < 1e-14);

        let probs = [0.2, 0.3, 0.5];
        let mut s = 0.0;
        for n in compositions(3, 3) {
            s += johnson_prob(&probs, &occ(&n)).unwrap();
        }
        assert!((s - 1.0).abs() < 1e-12, "{s}");

        assert!(johnson_prob(&[0.5, 0.4], &occ(&[1, 1])).is_err());
        assert_eq!(johnson_prob(&[0.0, 1.0], &occ(&[1, 1])).unwrap(), 0.0);
    }
}
