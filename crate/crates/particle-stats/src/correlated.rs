//! A correlated occupancy family that keeps geometric-style tails but allows
//! cross-state dependence through a single coupling constant omega.
//!
//! Parameters are (q_j, q_0j, omega): q_0j weights the first particle on
//! state j, q_j every further one, and omega scales all non-vacuum mass.
//! omega = 1 with q0 = q recovers the independent product law; omega != 1
//! makes every pair of states covary with sign(1 - omega) ... more precisely
//! Cov(n_i, n_j) = (1/omega - 1) E n_i E n_j.

use crate::compositions::box_points;
use crate::error::{Error, Result};
use crate::numeric::{upow, KahanSum};
use crate::thermo::{entropy_bernoulli, entropy_geometric};
use crate::types::{Occupancy, QVector};

/// Slack below this magnitude is treated as sitting exactly on the
/// feasibility boundary (the arithmetic itself carries ~1e-16 error).
const FEASIBILITY_SNAP: f64 = 1e-14;

/// Parameters of the correlated family. Construction enforces feasibility:
/// omega * (1 - prod(1 - q0_j)) <= 1, which is exactly the statement that
/// the vacuum mass is nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatedParams {
    q: Vec<f64>,
    q0: Vec<f64>,
    omega: f64,
    allow_unit_q: bool,
}

impl CorrelatedParams {
    /// Standard constructor: every q_j strictly below 1 (finite moments).
    pub fn new(q: Vec<f64>, q0: Vec<f64>, omega: f64) -> Result<Self> {
        Self::build(q, q0, omega, false)
    }

    /// Opt-in constructor permitting q_j = 1. Point probabilities stay
    /// well-defined but every occupied unit-q state has infinite mean, so
    /// the moment and entropy operations will refuse such parameters.
    pub fn new_allowing_unit_q(q: Vec<f64>, q0: Vec<f64>, omega: f64) -> Result<Self> {
        Self::build(q, q0, omega, true)
    }

    fn build(q: Vec<f64>, q0: Vec<f64>, omega: f64, allow_unit_q: bool) -> Result<Self> {
        if q.is_empty() || q.len() != q0.len() {
            return Err(Error::Domain(format!(
                "need matching nonempty parameter vectors, got {} and {}",
                q.len(),
                q0.len()
            )));
        }
        for (j, &x) in q.iter().enumerate() {
            let ok = x > 0.0 && if allow_unit_q { x <= 1.0 } else { x < 1.0 };
            if !ok {
                let bound = if allow_unit_q { "(0, 1]" } else { "(0, 1)" };
                return Err(Error::Domain(format!("q[{j}] = {x} outside {bound}")));
            }
        }
        for (j, &x) in q0.iter().enumerate() {
            if !(x > 0.0 && x <= 1.0) {
                return Err(Error::Domain(format!("q0[{j}] = {x} outside (0, 1]")));
            }
        }
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::Domain(format!("omega must be positive and finite, got {omega}")));
        }
        let occupied_mass = omega * (1.0 - prod_one_minus(&q0));
        if occupied_mass > 1.0 + FEASIBILITY_SNAP {
            return Err(Error::Domain(format!(
                "infeasible: omega * (1 - prod(1 - q0_j)) = {occupied_mass} exceeds 1"
            )));
        }
        Ok(CorrelatedParams { q, q0, omega, allow_unit_q })
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        false // constructor rejects empty parameter vectors
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn q0(&self) -> &[f64] {
        &self.q0
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn has_unit_q(&self) -> bool {
        self.q.contains(&1.0)
    }

    /// Mass of the all-zero state, 1 - omega * (1 - prod(1 - q0_j));
    /// snapped to exactly 0 within rounding of the feasibility boundary.
    pub fn vacuum_mass(&self) -> f64 {
        let v = 1.0 - self.omega * (1.0 - prod_one_minus(&self.q0));
        if v.abs() < FEASIBILITY_SNAP {
            0.0
        } else {
            v
        }
    }

    fn check_len(&self, n: &Occupancy) -> Result<()> {
        if n.len() != self.len() {
            return Err(Error::Domain(format!(
                "occupancy has {} states, parameters have {}",
                n.len(),
                self.len()
            )));
        }
        Ok(())
    }

    fn require_finite_means(&self, what: &str) -> Result<()> {
        if self.has_unit_q() {
            return Err(Error::Domain(format!(
                "{what} diverges: some q_j = 1 (infinite occupation mean)"
            )));
        }
        Ok(())
    }
}

fn prod_one_minus(xs: &[f64]) -> f64 {
    xs.iter().fold(1.0, |p, &x| p * (1.0 - x))
}

/// Probability that every state j holds at least n_j particles:
/// 1 for n = 0, else omega * prod_{j occupied} q0_j q_j^{n_j - 1}.
pub fn tail_prob_corr(params: &CorrelatedParams, n: &Occupancy) -> Result<f64> {
    params.check_len(n)?;
    if n.total() == 0 {
        return Ok(1.0);
    }
    let mut p = params.omega;
    for (j, &nj) in n.counts().iter().enumerate() {
        if nj >= 1 {
            p *= params.q0[j] * upow(params.q[j], nj - 1);
        }
    }
    Ok(p)
}

/// Point mass of the exact occupation vector `n`.
pub fn prob_corr(params: &CorrelatedParams, n: &Occupancy) -> Result<f64> {
    params.check_len(n)?;
    if n.total() == 0 {
        return Ok(params.vacuum_mass());
    }
    let mut p = tail_prob_corr(params, n)?;
    for (j, &nj) in n.counts().iter().enumerate() {
        p *= if nj >= 1 {
            1.0 - params.q[j]
        } else {
            1.0 - params.q0[j]
        };
    }
    Ok(p)
}

/// First and second moments of the family.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatedMoments {
    /// E n_j = omega q0_j / (1 - q_j)
    pub means: Vec<f64>,
    /// E n_i n_j; off-diagonal (1/omega) E n_i E n_j, diagonal
    /// omega q0_j (1 + q_j) / (1 - q_j)^2
    pub pair_means: Vec<Vec<f64>>,
    /// Cov(n_i, n_j); off-diagonal (1/omega - 1) E n_i E n_j
    pub covariances: Vec<Vec<f64>>,
}

pub fn moments_corr(params: &CorrelatedParams) -> Result<CorrelatedMoments> {
    params.require_finite_means("moment")?;
    let k = params.len();
    let omega = params.omega;
    let means: Vec<f64> = (0..k)
        .map(|j| omega * params.q0[j] / (1.0 - params.q[j]))
        .collect();
    let mut pair_means = vec![vec![0.0; k]; k];
    let mut covariances = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            if i == j {
                let second =
                    omega * params.q0[i] * (1.0 + params.q[i]) / ((1.0 - params.q[i]) * (1.0 - params.q[i]));
                pair_means[i][i] = second;
                covariances[i][i] = second - means[i] * means[i];
            } else {
                let cross = means[i] * means[j] / omega;
                pair_means[i][j] = cross;
                covariances[i][j] = (1.0 / omega - 1.0) * means[i] * means[j];
            }
        }
    }
    Ok(CorrelatedMoments { means, pair_means, covariances })
}

/// Parameters of the family conditioned on state `j` being empty. The
/// remaining states keep their q and q0; the coupling becomes
/// omega (1 - q0_j) / (1 - omega q0_j).
pub fn condition_on_empty_level(params: &CorrelatedParams, j: usize) -> Result<CorrelatedParams> {
    let k = params.len();
    if j >= k {
        return Err(Error::Domain(format!("state index {j} out of range for {k} states")));
    }
    if k == 1 {
        return Err(Error::Domain("conditioning would remove the last state".into()));
    }
    let oq = params.omega * params.q0[j];
    if oq >= 1.0 {
        return Err(Error::Domain(format!(
            "state {j} is almost surely occupied (omega q0 = {oq}); conditioning on it being empty is a null event"
        )));
    }
    let omega = params.omega * (1.0 - params.q0[j]) / (1.0 - oq);
    let keep = |v: &[f64]| {
        v.iter()
            .enumerate()
            .filter(|&(m, _)| m != j)
            .map(|(_, &x)| x)
            .collect::<Vec<f64>>()
    };
    CorrelatedParams::build(keep(&params.q), keep(&params.q0), omega, params.allow_unit_q)
}

/// The independent product law conditioned on at least one particle
/// existing, expressed inside this family: q0 = q and
/// omega = 1 / (1 - prod(1 - q_j)). The vacuum mass of the result is 0.
pub fn condition_no_vacuum(q: &QVector) -> Result<CorrelatedParams> {
    if !q.all_below_one() {
        return Err(Error::Domain("needs every activity below 1".into()));
    }
    let qs = q.as_slice().to_vec();
    let omega = 1.0 / (1.0 - prod_one_minus(&qs));
    CorrelatedParams::new(qs.clone(), qs, omega)
}

/// Entropy of the marginal law of state `j`, via the exact decomposition
/// S_Bernoulli(omega q0_j) + omega q0_j * S_geometric(q_j):
/// occupation indicator first, particle count given occupied second.
pub fn entropy_marginal_corr(params: &CorrelatedParams, j: usize) -> Result<f64> {
    if j >= params.len() {
        return Err(Error::Domain(format!(
            "state index {j} out of range for {} states",
            params.len()
        )));
    }
    params.require_finite_means("entropy")?;
    let a = (params.omega * params.q0[j]).min(1.0); // feasibility bounds it by 1 up to rounding
    Ok(entropy_bernoulli(a)? + a * entropy_geometric(params.q[j])?)
}

/// Sum of marginal entropies minus the joint entropy, by truncated
/// enumeration with per-state tails below 1e-13 / k. Zero exactly under
/// independence (omega = 1); positive when omega couples the states.
pub fn mixing_entropy_gap(params: &CorrelatedParams, max_terms: u64) -> Result<f64> {
    params.require_finite_means("mixing entropy")?;
    let k = params.len();
    // P(n_j > M) = omega q0_j q_j^M; choose M so each state's tail is tiny
    let per_state_tol = 1e-13 / k as f64;
    let mut cutoffs = Vec::with_capacity(k);
    let mut terms: u64 = 1;
    for j in 0..k {
        let head = params.omega * params.q0[j];
        let mut m = 8u64;
        while head * upow(params.q[j], m) >= per_state_tol {
            m += 1;
        }
        terms = terms
            .checked_mul(m + 1)
            .filter(|&t| t <= max_terms)
            .ok_or_else(|| {
                Error::Budget(format!("entropy enumeration box exceeds {max_terms} terms"))
            })?;
        cutoffs.push(m);
    }

    // one pass: joint entropy and marginal masses from the same box
    let mut joint_entropy = KahanSum::default();
    let mut marginals: Vec<Vec<f64>> = cutoffs.iter().map(|&m| vec![0.0; m as usize + 1]).collect();
    for n in box_points(&cutoffs) {
        let p = prob_corr(params, &Occupancy::new(n.clone()))?;
        if p > 0.0 {
            joint_entropy.add(-p * p.ln());
        }
        for (j, &nj) in n.iter().enumerate() {
            marginals[j][nj as usize] += p;
        }
    }
    let mut gap = KahanSum::default();
    for marg in &marginals {
        for &p in marg {
            if p > 0.0 {
                gap.add(-p * p.ln());
            }
        }
    }
    gap.add(-joint_entropy.value());
    Ok(gap.value())
}

/// Result of sweeping the tail-ratio identity over a grid of states.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    /// Number of (state, level) ratios checked.
    pub checked: u64,
    /// Largest relative deviation of a tail ratio from its target.
    pub max_violation: f64,
    /// The occupancy and level where the maximum occurred.
    pub worst: Option<(Vec<u64>, usize)>,
}

/// Check the identity defining the family: removing one particle from
/// level j divides the tail probability by
///   q_j        when n_j >= 2 (further particles),
///   q0_j       when n_j = 1 and other levels stay occupied,
///   omega q0_j when n = e_j (the step that leaves the vacuum).
/// Scans all n in [0, grid_max]^k, n != 0.
pub fn consistency_check(params: &CorrelatedParams, grid_max: u64) -> ConsistencyReport {
    let k = params.len();
    let cutoffs = vec![grid_max; k];
    let mut checked = 0u64;
    let mut max_violation = 0.0f64;
    let mut worst = None;
    for n in box_points(&cutoffs) {
        let total: u64 = n.iter().sum();
        if total == 0 {
            continue;
        }
        let tail_n = tail_prob_corr(params, &Occupancy::new(n.clone())).expect("validated");
        for j in 0..k {
            if n[j] == 0 {
                continue;
            }
            let mut lower = n.clone();
            lower[j] -= 1;
            let tail_lower = tail_prob_corr(params, &Occupancy::new(lower)).expect("validated");
            let expected = if n[j] >= 2 {
                params.q[j]
            } else if total == 1 {
                params.omega * params.q0[j]
            } else {
                params.q0[j]
            };
            let violation = (tail_n / tail_lower - expected).abs() / expected;
            checked += 1;
            if violation > max_violation {
                max_violation = violation;
                worst = Some((n.clone(), j));
            }
        }
    }
    ConsistencyReport { checked, max_violation, worst }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{joint_prob, EnsembleKind};

    fn occ(n: &[u64]) -> Occupancy {
        Occupancy::new(n.to_vec())
    }

    fn no_vacuum_half() -> CorrelatedParams {
        condition_no_vacuum(&QVector::open_unit(vec![0.5, 0.5]).unwrap()).unwrap()
    }

    fn skewed() -> CorrelatedParams {
        CorrelatedParams::new(vec![0.5, 0.3], vec![0.4, 0.6], 0.8).unwrap()
    }

    #[test]
    fn construction_and_feasibility() {
        assert!(CorrelatedParams::new(vec![0.5], vec![0.5], 1.0).is_ok());
        // omega too large for these q0
        assert!(CorrelatedParams::new(vec![0.5, 0.5], vec![0.5, 0.5], 1.5).is_err());
        // boundary case builds (vacuum mass 0)
        let p = no_vacuum_half();
        assert!((p.omega() - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(p.vacuum_mass(), 0.0);
        // q = 1 requires the opt-in constructor
        assert!(CorrelatedParams::new(vec![1.0], vec![0.5], 1.0).is_err());
        assert!(CorrelatedParams::new_allowing_unit_q(vec![1.0], vec![0.5], 1.0).is_ok());
        // q0 = 1 forces omega <= 1
        assert!(CorrelatedParams::new(vec![0.5], vec![1.0], 1.0 + 1e-9).is_err());
        assert!(CorrelatedParams::new(vec![0.5], vec![1.0], 1.0).is_ok());
        assert!(CorrelatedParams::new(vec![0.5], vec![0.5], -1.0).is_err());
        assert!(CorrelatedParams::new(vec![0.5, 0.4], vec![0.5], 1.0).is_err());
    }

    #[test]
    fn tail_values() {
        let p = no_vacuum_half();
        assert_eq!(tail_prob_corr(&p, &occ(&[0, 0])).unwrap(), 1.0);
        let t = tail_prob_corr(&p, &occ(&[1, 1])).unwrap();
        assert!((t - 1.0 / 3.0).abs() < 1e-15, "{t}");
        // omega = 1, q0 = q reduces to the plain product of powers
        let ind = CorrelatedParams::new(vec![0.5, 0.25], vec![0.5, 0.25], 1.0).unwrap();
        let t = tail_prob_corr(&ind, &occ(&[2, 1])).unwrap();
        assert!((t - 0.25 * 0.25).abs() < 1e-15);
    }

    #[test]
    fn point_masses_match_conditioned_product_law() {
        // the no-vacuum family must equal the product law divided by the
        // non-vacuum mass on every nonzero state
        let p = no_vacuum_half();
        let q = QVector::open_unit(vec![0.5, 0.5]).unwrap();
        let nonvac = 1.0 - 0.25;
        for a in 0..8u64 {
            for b in 0..8u64 {
                if a == 0 && b == 0 {
                    assert_eq!(prob_corr(&p, &occ(&[0, 0])).unwrap(), 0.0);
                    continue;
                }
                let lhs = prob_corr(&p, &occ(&[a, b])).unwrap();
                let rhs =
                    joint_prob(EnsembleKind::BoseEinstein, &q, &occ(&[a, b])).unwrap() / nonvac;
                assert!((lhs - rhs).abs() < 1e-15 * rhs.max(1.0), "({a},{b}): {lhs} vs {rhs}");
            }
        }
        let one_zero = prob_corr(&p, &occ(&[1, 0])).unwrap();
        assert!((one_zero - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn masses_sum_to_one() {
        for params in [no_vacuum_half(), skewed()] {
            let mut s = KahanSum::default();
            for n in box_points(&[60, 60]) {
                s.add(prob_corr(&params, &occ(&n)).unwrap());
            }
            // per-state geometric tails bound what the box misses
            let tail: f64 = (0..2)
                .map(|j| params.omega() * params.q0()[j] * upow(params.q()[j], 60))
                .sum();
            assert!((s.value() - 1.0).abs() < tail + 1e-13, "sum {} tail {tail}", s.value());
        }
    }

    #[test]
    fn moment_formulas_match_enumeration() {
        for params in [no_vacuum_half(), skewed()] {
            let m = moments_corr(&params).unwrap();
            let (mut e1, mut e2, mut e11, mut e22, mut e12) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for n in box_points(&[70, 70]) {
                let p = prob_corr(&params, &occ(&n)).unwrap();
                let (a, b) = (n[0] as f64, n[1] as f64);
                e1 += a * p;
                e2 += b * p;
                e11 += a * a * p;
                e22 += b * b * p;
                e12 += a * b * p;
            }
            assert!((m.means[0] - e1).abs() < 1e-8, "{} vs {e1}", m.means[0]);
            assert!((m.means[1] - e2).abs() < 1e-8);
            assert!((m.pair_means[0][0] - e11).abs() < 1e-8);
            assert!((m.pair_means[1][1] - e22).abs() < 1e-8);
            assert!((m.pair_means[0][1] - e12).abs() < 1e-8);
            let cov = e12 - e1 * e2;
            assert!((m.covariances[0][1] - cov).abs() < 1e-8);
            let var0 = e11 - e1 * e1;
            assert!((m.covariances[0][0] - var0).abs() < 1e-8);
        }
    }

    #[test]
    fn moment_spot_values() {
        let m = moments_corr(&no_vacuum_half()).unwrap();
        assert!((m.means[0] - 4.0 / 3.0).abs() < 1e-15);
        assert!((m.covariances[0][1] + 4.0 / 9.0).abs() < 1e-15);
        assert!((m.pair_means[0][1] - 4.0 / 3.0).abs() < 1e-15);

        let m = moments_corr(&skewed()).unwrap();
        assert!((m.means[0] - 0.64).abs() < 1e-15);
        assert!((m.covariances[0][1] - 0.10971428571428574).abs() < 1e-15);
        assert!((m.pair_means[0][0] - 1.92).abs() < 1e-15);

        // independence: zero off-diagonal covariance
        let ind = CorrelatedParams::new(vec![0.5, 0.25], vec![0.5, 0.25], 1.0).unwrap();
        let m = moments_corr(&ind).unwrap();
        assert_eq!(m.covariances[0][1], 0.0);
        assert!((m.means[0] - 1.0).abs() < 1e-15);

        let unit = CorrelatedParams::new_allowing_unit_q(vec![1.0], vec![0.5], 1.0).unwrap();
        assert!(moments_corr(&unit).is_err());
    }

    #[test]
    fn covariance_sign_follows_omega() {
        let pos = CorrelatedParams::new(vec![0.4, 0.4], vec![0.4, 0.4], 0.7).unwrap();
        assert!(moments_corr(&pos).unwrap().covariances[0][1] > 0.0);
        let ind = CorrelatedParams::new(vec![0.4, 0.4], vec![0.4, 0.4], 1.0).unwrap();
        assert_eq!(moments_corr(&ind).unwrap().covariances[0][1], 0.0);
        let neg = no_vacuum_half();
        assert!(moments_corr(&neg).unwrap().covariances[0][1] < 0.0);
    }

    #[test]
    fn conditioning_on_an_empty_level() {
        let p = no_vacuum_half();
        let cond = condition_on_empty_level(&p, 1).unwrap();
        assert!((cond.omega() - 2.0).abs() < 1e-14, "{}", cond.omega());
        assert_eq!(cond.len(), 1);

        // against enumeration: P(n_1 = m | n_2 = 0) from the original law
        let p_n2_zero: f64 = (0..80u64)
            .map(|m| prob_corr(&p, &occ(&[m, 0])).unwrap())
            .sum();
        for m in 0..12u64 {
            let direct = prob_corr(&p, &occ(&[m, 0])).unwrap() / p_n2_zero;
            let through = prob_corr(&cond, &occ(&[m])).unwrap();
            assert!((direct - through).abs() < 1e-12, "m={m}: {direct} vs {through}");
        }

        // independence is preserved untouched
        let ind = CorrelatedParams::new(vec![0.5, 0.25], vec![0.5, 0.25], 1.0).unwrap();
        let c = condition_on_empty_level(&ind, 0).unwrap();
        assert_eq!(c.omega(), 1.0);

        // conditioning on an a.s. occupied level is refused
        let certain = CorrelatedParams::new(vec![0.5, 0.5], vec![1.0, 0.5], 1.0).unwrap();
        assert!(condition_on_empty_level(&certain, 0).is_err());
        assert!(condition_on_empty_level(&ind, 5).is_err());
    }

    #[test]
    fn iterated_conditioning_matches_single_shot() {
        let base = CorrelatedParams::new(
            vec![0.5, 0.4, 0.3],
            vec![0.5, 0.35, 0.25],
            1.2,
        )
        .unwrap();
        // condition on level 2 empty, then on (what was) level 1 empty
        let once = condition_on_empty_level(&base, 2).unwrap();
        let twice = condition_on_empty_level(&once, 1).unwrap();
        assert_eq!(twice.len(), 1);

        // oracle: P(n_0 = m | n_1 = n_2 = 0) by direct enumeration
        let norm: f64 = (0..100u64)
            .map(|m| prob_corr(&base, &occ(&[m, 0, 0])).unwrap())
            .sum();
        for m in 0..10u64 {
            let direct = prob_corr(&base, &occ(&[m, 0, 0])).unwrap() / norm;
            let through = prob_corr(&twice, &occ(&[m])).unwrap();
            assert!((direct - through).abs() < 1e-12, "m={m}: {direct} vs {through}");
        }
    }

    #[test]
    fn no_vacuum_construction() {
        let p = no_vacuum_half();
        assert!((p.omega() - 4.0 / 3.0).abs() < 1e-15);

        // k=1: shifted geometric
        let single = condition_no_vacuum(&QVector::open_unit(vec![0.4]).unwrap()).unwrap();
        assert!((single.omega() - 2.5).abs() < 1e-14);
        assert_eq!(prob_corr(&single, &occ(&[0])).unwrap(), 0.0);
        let p1 = prob_corr(&single, &occ(&[1])).unwrap();
        assert!((p1 - 0.6).abs() < 1e-14, "{p1}"); // (1-q) q^0
        // near-certain occupation: omega tends to 1
        let hot = condition_no_vacuum(&QVector::open_unit(vec![0.999999]).unwrap()).unwrap();
        assert!((hot.omega() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn marginal_entropy_decomposition() {
        // independent case: the decomposition collapses to the geometric entropy
        let ind = CorrelatedParams::new(vec![0.5], vec![0.5], 1.0).unwrap();
        let s = entropy_marginal_corr(&ind, 0).unwrap();
        assert!((s - entropy_geometric(0.5).unwrap()).abs() < 1e-14);

        // against the directly summed series -sum p ln p
        let p = no_vacuum_half();
        let s = entropy_marginal_corr(&p, 0).unwrap();
        let mut series = 0.0;
        let (omega, q0, q) = (p.omega(), p.q0()[0], p.q()[0]);
        let at_zero: f64 = 1.0 - omega * q0;
        if at_zero > 0.0 {
            series -= at_zero * at_zero.ln();
        }
        for m in 1..200u64 {
            let mass = omega * q0 * upow(q, m - 1) * (1.0 - q);
            series -= mass * mass.ln();
        }
        assert!((s - series).abs() < 1e-10, "{s} vs {series}");

        // always-occupied level: only the geometric part remains
        let certain = CorrelatedParams::new(vec![0.5], vec![1.0], 1.0).unwrap();
        let s = entropy_marginal_corr(&certain, 0).unwrap();
        assert!((s - entropy_geometric(0.5).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn mixing_gap_values() {
        let ind = CorrelatedParams::new(vec![0.5, 0.3], vec![0.5, 0.3], 1.0).unwrap();
        let gap = mixing_entropy_gap(&ind, 2_000_000).unwrap();
        assert!(gap.abs() < 1e-9, "{gap}");

        let gap = mixing_entropy_gap(&no_vacuum_half(), 2_000_000).unwrap();
        assert!(gap > 0.0);
        // regression anchor from an independent enumeration
        assert!((gap - 0.174416047921502).abs() < 1e-9, "{gap}");

        // permutation symmetry
        let a = CorrelatedParams::new(vec![0.5, 0.3], vec![0.4, 0.6], 0.8).unwrap();
        let b = CorrelatedParams::new(vec![0.3, 0.5], vec![0.6, 0.4], 0.8).unwrap();
        let ga = mixing_entropy_gap(&a, 2_000_000).unwrap();
        let gb = mixing_entropy_gap(&b, 2_000_000).unwrap();
        assert!((ga - gb).abs() < 1e-12);
        assert!(ga > 0.0);

        assert!(mixing_entropy_gap(&no_vacuum_half(), 10).is_err());
    }

    #[test]
    fn consistency_holds_on_grids() {
        for params in [
            no_vacuum_half(),
            skewed(),
            CorrelatedParams::new(vec![0.5, 0.4, 0.3], vec![0.5, 0.35, 0.25], 1.2).unwrap(),
        ] {
            let report = consistency_check(&params, 6);
            assert!(report.checked > 0);
            assert!(
                report.max_violation < 1e-12,
                "violation {} at {:?}",
                report.max_violation,
                report.worst
            );
        }
    }

    #[test]
    fn consistency_detects_perturbation() {
        // a 1e-6 multiplicative error on one stored tail would surface as a
        // ratio violation of the same order, far above the clean baseline
        let params = skewed();
        let n = occ(&[2, 1]);
        let lower = occ(&[1, 1]);
        let clean = tail_prob_corr(&params, &n).unwrap() / tail_prob_corr(&params, &lower).unwrap();
        let perturbed = clean * (1.0 + 1e-6);
        let violation = (perturbed - params.q()[0]).abs() / params.q()[0];
        assert!(violation >= 1e-7);
    }
}
