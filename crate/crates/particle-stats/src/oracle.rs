//! Brute-force verification engine. Everything here recomputes masses from
//! primitive per-state arithmetic (recurrences, no closed forms), truncates
//! with analytic tail bounds, and compares the crate's closed-form
//! operations against those sums. The full battery is exposed as
//! [`run_verification_suite`].

use crate::compositions::{box_points, composition_count, compositions};
use crate::correlated::{
    condition_no_vacuum, consistency_check, entropy_marginal_corr, mixing_entropy_gap,
    moments_corr, prob_corr, CorrelatedParams,
};
use crate::ensembles::{
    canonical_single_particle, conditional_mean_given_total, joint_prob, johnson_prob,
    mean_occupancy, tail_prob, zgc_closed, zgc_direct, EnsembleKind, DEFAULT_ENUM_BUDGET,
};
use crate::error::{Error, Result};
use crate::numeric::{upow, KahanSum};
use crate::thermo::{grand_potential, mean_from_q, q_thermo};
use crate::types::{LevelSystem, Occupancy, QVector, ThermoParams};

/// A distribution the oracle can enumerate.
#[derive(Debug, Clone, Copy)]
pub enum Law<'a> {
    Ensemble { kind: EnsembleKind, q: &'a QVector },
    Correlated(&'a CorrelatedParams),
}

impl Law<'_> {
    fn len(&self) -> usize {
        match self {
            Law::Ensemble { q, .. } => q.len(),
            Law::Correlated(p) => p.len(),
        }
    }
}

/// Truncation box with its analytically certified tail mass.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationSpec {
    per_state_cutoffs: Vec<u64>,
    certified_tail_bound: f64,
}

impl TruncationSpec {
    pub fn cutoffs(&self) -> &[u64] {
        &self.per_state_cutoffs
    }

    pub fn tail_bound(&self) -> f64 {
        self.certified_tail_bound
    }

    /// Choose per-state cutoffs so that each state's escape probability is
    /// below per_state_tol, and certify the union/tail bound analytically.
    ///
    /// Bounded-support laws get their exact support and tail 0. Geometric
    /// tails use P(n_j > M) = q^{M+1}; the correlated family uses
    /// P(n_j > M) = omega q0_j q_j^M.
    pub fn for_law(law: &Law, per_state_tol: f64) -> Result<Self> {
        if !(per_state_tol > 0.0 && per_state_tol < 1.0) {
            return Err(Error::Domain(format!(
                "per-state tolerance must lie in (0,1), got {per_state_tol}"
            )));
        }
        match law {
            Law::Ensemble { kind: EnsembleKind::FermiDirac, q } => {
                Ok(TruncationSpec { per_state_cutoffs: vec![1; q.len()], certified_tail_bound: 0.0 })
            }
            Law::Ensemble { kind: EnsembleKind::Gentile(cap), q } => {
                EnsembleKind::Gentile(*cap).validate()?;
                Ok(TruncationSpec {
                    per_state_cutoffs: vec![*cap; q.len()],
                    certified_tail_bound: 0.0,
                })
            }
            Law::Ensemble { kind: kind @ EnsembleKind::BoseEinstein, q } => {
                kind.check_q(q)?;
                let mut cutoffs = Vec::with_capacity(q.len());
                for j in 0..q.len() {
                    // smallest M with q^{M+1} < tol
                    let mut m = 1u64;
                    while upow(q.get(j), m + 1) >= per_state_tol {
                        m += 1;
                    }
                    cutoffs.push(m);
                }
                // P(escape) <= 1 - prod (1 - q^{M+1})
                let inside: f64 = cutoffs
                    .iter()
                    .enumerate()
                    .map(|(j, &m)| 1.0 - upow(q.get(j), m + 1))
                    .product();
                Ok(TruncationSpec { per_state_cutoffs: cutoffs, certified_tail_bound: 1.0 - inside })
            }
            Law::Correlated(p) => {
                if p.has_unit_q() {
                    return Err(Error::Domain(
                        "cannot truncate: some q_j = 1 has no geometric tail bound".into(),
                    ));
                }
                let mut cutoffs = Vec::with_capacity(p.len());
                let mut tail = 0.0;
                for j in 0..p.len() {
                    let head = p.omega() * p.q0()[j];
                    let mut m = 1u64;
                    while head * upow(p.q()[j], m) >= per_state_tol {
                        m += 1;
                    }
                    tail += head * upow(p.q()[j], m);
                    cutoffs.push(m);
                }
                Ok(TruncationSpec { per_state_cutoffs: cutoffs, certified_tail_bound: tail })
            }
        }
    }
}

/// Point masses on a truncation box, stored dense in odometer order.
#[derive(Debug, Clone)]
pub struct MassTable {
    cutoffs: Vec<u64>,
    masses: Vec<f64>,
    tail_bound: f64,
}

impl MassTable {
    pub fn cutoffs(&self) -> &[u64] {
        &self.cutoffs
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    /// Mass of one occupancy, or None outside the box.
    pub fn mass(&self, n: &[u64]) -> Option<f64> {
        if n.len() != self.cutoffs.len() {
            return None;
        }
        let mut idx = 0usize;
        for (j, &v) in n.iter().enumerate() {
            if v > self.cutoffs[j] {
                return None;
            }
            idx = idx * (self.cutoffs[j] as usize + 1) + v as usize;
        }
        Some(self.masses[idx])
    }

    /// Compensated sum of all in-box masses.
    pub fn total(&self) -> f64 {
        let mut s = KahanSum::default();
        for &m in &self.masses {
            s.add(m);
        }
        s.value()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<u64>, f64)> + '_ {
        box_points(&self.cutoffs).zip(self.masses.iter().copied())
    }
}

/// Per-state mass factors built by recurrence only (the primitive
/// arithmetic all oracle numbers come from).
fn state_factor_tables(law: &Law, cutoffs: &[u64]) -> Vec<Vec<f64>> {
    match law {
        Law::Ensemble { kind, q } => (0..q.len())
            .map(|j| {
                let qj = q.get(j);
                let m = cutoffs[j] as usize;
                let mut f = Vec::with_capacity(m + 1);
                match kind {
                    EnsembleKind::BoseEinstein => {
                        f.push(1.0 - qj);
                        for i in 1..=m {
                            let prev = f[i - 1];
                            f.push(prev * qj);
                        }
                    }
                    EnsembleKind::FermiDirac => {
                        f.push(1.0 / (1.0 + qj));
                        if m >= 1 {
                            f.push(qj / (1.0 + qj));
                        }
                    }
                    EnsembleKind::Gentile(_) => {
                        // unnormalized weights, then divide by the summed norm
                        let mut w = Vec::with_capacity(m + 1);
                        w.push(1.0);
                        for i in 1..=m {
                            let prev = w[i - 1];
                            w.push(prev * qj);
                        }
                        let norm: f64 = w.iter().sum();
                        f = w.into_iter().map(|x| x / norm).collect();
                    }
                }
                f
            })
            .collect(),
        Law::Correlated(p) => (0..p.len())
            .map(|j| {
                let (qj, q0j) = (p.q()[j], p.q0()[j]);
                let m = cutoffs[j] as usize;
                let mut f = Vec::with_capacity(m + 1);
                f.push(1.0 - q0j);
                if m >= 1 {
                    f.push(q0j * (1.0 - qj));
                }
                for i in 2..=m {
                    let prev = f[i - 1];
                    f.push(prev * qj);
                }
                f
            })
            .collect(),
    }
}

/// Enumerate all point masses on the truncation box.
pub fn enumerate_masses(law: &Law, trunc: &TruncationSpec, budget: u64) -> Result<MassTable> {
    let k = law.len();
    if trunc.per_state_cutoffs.len() != k {
        return Err(Error::Domain(format!(
            "truncation has {} states, law has {k}",
            trunc.per_state_cutoffs.len()
        )));
    }
    let mut terms: u64 = 1;
    for &m in &trunc.per_state_cutoffs {
        terms = terms
            .checked_mul(m + 1)
            .filter(|&t| t <= budget)
            .ok_or_else(|| Error::Budget(format!("enumeration box exceeds {budget} terms")))?;
    }
    let tables = state_factor_tables(law, &trunc.per_state_cutoffs);
    let mut masses = Vec::with_capacity(terms as usize);
    for n in box_points(&trunc.per_state_cutoffs) {
        let mut m: f64 = n
            .iter()
            .enumerate()
            .map(|(j, &nj)| tables[j][nj as usize])
            .product();
        if let Law::Correlated(p) = law {
            if n.iter().all(|&v| v == 0) {
                // vacuum mass 1 - omega (1 - prod(1 - q0_j)), computed here
                let prod: f64 = p.q0().iter().map(|&x| 1.0 - x).product();
                m = (1.0 - p.omega() * (1.0 - prod)).max(0.0);
            } else {
                m *= p.omega();
            }
        }
        masses.push(m);
    }
    Ok(MassTable { cutoffs: trunc.per_state_cutoffs.clone(), masses, tail_bound: trunc.certified_tail_bound })
}

/// A truncated expectation with an analytic bound on what the truncation
/// could have missed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEstimate {
    pub value: f64,
    pub error_bound: f64,
}

/// E n_state by truncated enumeration. The error bound covers the mass
/// outside the box: exact geometric tail sums for the unbounded laws,
/// zero for bounded support.
pub fn oracle_mean(law: &Law, trunc: &TruncationSpec, state: usize, budget: u64) -> Result<OracleEstimate> {
    let k = law.len();
    if state >= k {
        return Err(Error::Domain(format!("state index {state} out of range for {k} states")));
    }
    let table = enumerate_masses(law, trunc, budget)?;
    let mut acc = KahanSum::default();
    for (n, mass) in table.iter() {
        acc.add(n[state] as f64 * mass);
    }
    let error_bound = mean_tail_bound(law, trunc.cutoffs(), state);
    Ok(OracleEstimate { value: acc.value(), error_bound })
}

/// Bound on E[n_state ; outside box] via per-coordinate escape events.
fn mean_tail_bound(law: &Law, cutoffs: &[u64], state: usize) -> f64 {
    // sum_{n > N} n q^n (1-q) = q^N (N - (N-1) q) / (1-q) with N = M+1
    let own_tail = |q: f64, m: u64| {
        let n = (m + 1) as f64;
        upow(q, m + 1) * (n - (n - 1.0) * q) / (1.0 - q)
    };
    match law {
        Law::Ensemble { kind: EnsembleKind::BoseEinstein, q } => {
            let mut bound = own_tail(q.get(state), cutoffs[state]);
            let mean_s = q.get(state) / (1.0 - q.get(state));
            for (m, &cut) in cutoffs.iter().enumerate() {
                if m != state {
                    bound += mean_s * upow(q.get(m), cut + 1);
                }
            }
            bound
        }
        Law::Ensemble { .. } => 0.0, // bounded support, box covers it
        Law::Correlated(p) => {
            let (qs, q0s, omega) = (p.q(), p.q0(), p.omega());
            // own coordinate
            let n = (cutoffs[state] + 1) as f64;
            let mut bound = omega * q0s[state] * upow(qs[state], cutoffs[state])
                * (n - (n - 1.0) * qs[state])
                / (1.0 - qs[state]);
            // cross terms: E[n_s; n_m > M_m] = omega E_geom(s) q0_m q_m^{M_m}
            let e_s = q0s[state] / (1.0 - qs[state]);
            for m in 0..p.len() {
                if m != state {
                    bound += omega * e_s * q0s[m] * upow(qs[m], cutoffs[m]);
                }
            }
            bound
        }
    }
}

/// One comparison between an implementation value and an oracle value.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub name: String,
    /// The implementation (closed-form) side.
    pub target: f64,
    /// The independent (enumerated / analytic) side.
    pub oracle: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tolerance: f64,
    /// Whether the absolute or relative error passed the tolerance.
    pub passed: bool,
    /// True when the budget did not allow running this check.
    pub skipped: bool,
    /// Enumeration terms the check consumed (estimate).
    pub terms: u64,
}

/// Outcome of the whole battery.
#[derive(Debug, Clone, Default)]
pub struct VerificationReport {
    pub checks: Vec<CheckRecord>,
}

impl VerificationReport {
    /// True when no executed check failed (skipped checks do not fail).
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.skipped || c.passed)
    }

    pub fn failures(&self) -> Vec<&CheckRecord> {
        self.checks.iter().filter(|c| !c.skipped && !c.passed).collect()
    }
}

/// Budget and fault knobs for the suite.
#[derive(Debug, Clone)]
pub struct VerifyConfig {
    /// Maximum enumeration terms any single check may use. Zero skips
    /// everything.
    pub max_terms: u64,
    /// When set, multiply the implementation side of every matching check
    /// (name contains the fragment) by (1 + 1e-6) at the point of
    /// comparison, imitating a subtly wrong closed form. Exists so the
    /// test harness can prove the suite detects wrong numbers. Checks
    /// whose tolerance is looser than 1e-6 absorb the fault by design and
    /// stay green.
    pub fault_target: Option<String>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { max_terms: DEFAULT_ENUM_BUDGET, fault_target: None }
    }
}

struct Suite {
    config: VerifyConfig,
    checks: Vec<CheckRecord>,
}

impl Suite {
    /// Fault-injection factor for one check: 1 + 1e-6 when the check is
    /// targeted, 1 otherwise. Checks multiply their implementation-side
    /// values by this at the point of comparison, so a targeted run looks
    /// exactly like a subtly wrong closed form.
    fn factor(&self, name: &str) -> f64 {
        match &self.config.fault_target {
            Some(fragment) if name.contains(fragment.as_str()) => 1.0 + 1e-6,
            _ => 1.0,
        }
    }

    /// Record a comparison; comparisons pass when either the absolute or
    /// the relative error is within tolerance.
    fn record(&mut self, name: &str, target: f64, oracle: f64, tolerance: f64, terms: u64) {
        let abs_err = (target - oracle).abs();
        let rel_err = abs_err / oracle.abs().max(1e-300);
        let passed = abs_err <= tolerance || rel_err <= tolerance;
        self.checks.push(CheckRecord {
            name: name.into(),
            target,
            oracle,
            abs_err,
            rel_err,
            tolerance,
            passed,
            skipped: false,
            terms,
        });
    }

    fn skip(&mut self, name: &str, tolerance: f64, terms: u64) {
        self.checks.push(CheckRecord {
            name: name.into(),
            target: f64::NAN,
            oracle: f64::NAN,
            abs_err: f64::NAN,
            rel_err: f64::NAN,
            tolerance,
            passed: false,
            skipped: true,
            terms,
        });
    }

    /// Run `body` if the budget allows `terms`, else record a skip.
    fn run(&mut self, name: &str, tolerance: f64, terms: u64, body: impl FnOnce() -> (f64, f64)) {
        if terms > self.config.max_terms {
            self.skip(name, tolerance, terms);
        } else {
            let (target, oracle) = body();
            self.record(name, target, oracle, tolerance, terms);
        }
    }
}

fn qv(values: &[f64]) -> QVector {
    QVector::open_unit(values.to_vec()).expect("suite activities are valid")
}

/// Run every cross-check of a closed form against independent enumeration
/// or an analytic identity. All checks pass on a correct build; any check
/// whose name matches `config.fault_target` is deliberately broken.
pub fn run_verification_suite(config: &VerifyConfig) -> VerificationReport {
    let mut s = Suite { config: config.clone(), checks: Vec::new() };
    let budget = s.config.max_terms;

    ratio_property_checks(&mut s);
    mean_checks(&mut s, budget);
    gentile_limit_checks(&mut s);
    partition_checks(&mut s, budget);
    condensation_checks(&mut s, budget);
    correlated_checks(&mut s, budget);
    conditioning_preservation_checks(&mut s);
    stationarity_checks(&mut s);
    canonical_checks(&mut s);
    johnson_checks(&mut s);

    VerificationReport { checks: s.checks }
}

fn ratio_property_checks(s: &mut Suite) {
    let q = qv(&[0.5, 0.3, 0.2]);
    let grid: u64 = 5;
    let terms = (grid + 1).pow(3) * 3 * 2;
    let f = s.factor("be/ratio-property");
    s.run("be/ratio-property", 1e-12, terms, || {
        let mut worst = 0.0f64;
        for n in box_points(&[grid, grid, grid]) {
            let base = joint_prob(EnsembleKind::BoseEinstein, &q, &Occupancy::new(n.clone()))
                .expect("valid");
            for j in 0..3 {
                let mut up = n.clone();
                up[j] += 1;
                let bumped = f
                    * joint_prob(EnsembleKind::BoseEinstein, &q, &Occupancy::new(up))
                        .expect("valid");
                worst = worst.max((bumped / base / q.get(j) - 1.0).abs());
            }
        }
        (worst, 0.0)
    });
    let f = s.factor("be/tail-ratio");
    s.run("be/tail-ratio", 1e-12, terms, || {
        let mut worst = 0.0f64;
        for n in box_points(&[grid, grid, grid]) {
            let base = tail_prob(EnsembleKind::BoseEinstein, &q, &Occupancy::new(n.clone()))
                .expect("valid");
            for j in 0..3 {
                let mut up = n.clone();
                up[j] += 1;
                let bumped = f
                    * tail_prob(EnsembleKind::BoseEinstein, &q, &Occupancy::new(up))
                        .expect("valid");
                worst = worst.max((bumped / base / q.get(j) - 1.0).abs());
            }
        }
        (worst, 0.0)
    });
}

fn mean_checks(s: &mut Suite, budget: u64) {
    // unbounded law, k = 2: closed means against the truncated box
    {
        let q = qv(&[0.5, 0.3]);
        let law = Law::Ensemble { kind: EnsembleKind::BoseEinstein, q: &q };
        let trunc = TruncationSpec::for_law(&law, 1e-13).expect("valid");
        let terms: u64 = trunc.cutoffs().iter().map(|&m| m + 1).product::<u64>() * 2;
        let f = s.factor("be/mean-vs-enumeration");
        s.run("be/mean-vs-enumeration", 1e-10, terms, || {
            let mut worst = 0.0f64;
            for j in 0..2 {
                let est = oracle_mean(&law, &trunc, j, budget).expect("within budget");
                let closed = f * mean_from_q(q.get(j)).expect("valid");
                worst = worst.max((closed - est.value).abs() - est.error_bound);
            }
            (worst.max(0.0), 0.0)
        });
    }
    // exclusion law: exact 4-point boxes
    {
        let q = QVector::positive(vec![0.7, 1.5]).expect("valid");
        let law = Law::Ensemble { kind: EnsembleKind::FermiDirac, q: &q };
        let trunc = TruncationSpec::for_law(&law, 1e-13).expect("valid");
        let f = s.factor("fd/mean-vs-enumeration");
        s.run("fd/mean-vs-enumeration", 1e-14, 8, || {
            let mut worst = 0.0f64;
            for j in 0..2 {
                let est = oracle_mean(&law, &trunc, j, budget).expect("within budget");
                let closed =
                    f * mean_occupancy(EnsembleKind::FermiDirac, q.get(j)).expect("valid");
                worst = worst.max((closed - est.value).abs());
            }
            (worst, 0.0)
        });
    }
    // capped law over a few (cap, q) pairs including q > 1 and q = 1
    {
        let cases: [(u64, f64); 4] = [(2, 0.5), (3, 0.9), (7, 1.2), (4, 1.0)];
        let terms = cases.iter().map(|&(cap, _)| cap + 1).sum();
        let f = s.factor("gentile/mean-vs-enumeration");
        s.run("gentile/mean-vs-enumeration", 1e-13, terms, || {
            let mut worst = 0.0f64;
            for &(cap, qx) in &cases {
                let q = QVector::positive(vec![qx]).expect("valid");
                let law = Law::Ensemble { kind: EnsembleKind::Gentile(cap), q: &q };
                let trunc = TruncationSpec::for_law(&law, 1e-13).expect("valid");
                let est = oracle_mean(&law, &trunc, 0, budget).expect("within budget");
                let closed = f * mean_occupancy(EnsembleKind::Gentile(cap), qx).expect("valid");
                worst = worst.max((closed - est.value).abs());
            }
            (worst, 0.0)
        });
    }
}

fn gentile_limit_checks(s: &mut Suite) {
    let grid: Vec<f64> = (1..10).map(|i| i as f64 / 10.0).collect();
    let f = s.factor("gentile/fd-at-cap-1");
    s.run("gentile/fd-at-cap-1", 1e-14, grid.len() as u64 + 1, || {
        let mut worst = 0.0f64;
        for &q in grid.iter().chain([1.3].iter()) {
            let g = f * mean_occupancy(EnsembleKind::Gentile(1), q).expect("valid");
            let fd = mean_occupancy(EnsembleKind::FermiDirac, q).expect("valid");
            worst = worst.max((g - fd).abs());
        }
        (worst, 0.0)
    });
    // cap chosen per q so the analytic gap (cap+1) q^{cap+1} / (1 - q^{cap+1})
    // from the unbounded mean is below 1e-13
    let f = s.factor("gentile/approaches-unbounded-mean");
    s.run("gentile/approaches-unbounded-mean", 1e-11, 400, || {
        let mut worst = 0.0f64;
        for &q in &grid {
            let mut cap = 1u64;
            loop {
                let t = upow(q, cap + 1);
                if (cap + 1) as f64 * t / (1.0 - t) < 1e-13 {
                    break;
                }
                cap += 1;
            }
            let g = f * mean_occupancy(EnsembleKind::Gentile(cap), q).expect("valid");
            let b = mean_occupancy(EnsembleKind::BoseEinstein, q).expect("valid");
            worst = worst.max((g - b).abs());
        }
        (worst, 0.0)
    });
}

/// The three pinned activity sets used by every fixed-total check.
fn pinned_activity_sets() -> [Vec<f64>; 3] {
    [
        vec![0.5, 0.25],
        vec![0.5, 0.3, 0.2],
        vec![0.55, 0.4, 0.25, 0.1],
    ]
}

fn partition_checks(s: &mut Suite, budget: u64) {
    let sets = pinned_activity_sets();
    let mut terms = 0u64;
    for set in &sets {
        for n in 0..=20u64 {
            terms += composition_count(n, set.len()).unwrap_or(u64::MAX / 4);
        }
    }
    let f = s.factor("zgc/closed-vs-direct");
    s.run("zgc/closed-vs-direct", 1e-9, terms, || {
        let mut worst = 0.0f64;
        for set in &sets {
            let q = qv(set);
            for n in 0..=20u64 {
                let d = zgc_direct(&q, n, budget).expect("within budget");
                let c = f * zgc_closed(&q, n).expect("separated activities");
                worst = worst.max((c - d).abs() / d.abs());
            }
        }
        (worst, 0.0)
    });
    let f = s.factor("zgc/conditional-mean-closed-vs-direct");
    s.run("zgc/conditional-mean-closed-vs-direct", 1e-8, terms * 2, || {
        let mut worst = 0.0f64;
        for set in &sets {
            let q = qv(set);
            for n in (0..=20u64).step_by(2) {
                for i in 0..set.len() {
                    let m = conditional_mean_given_total(&q, i, n, budget).expect("within budget");
                    let c = f * m.closed_form.expect("separated activities");
                    let scale = m.value.abs().max(1e-12);
                    worst = worst.max((c - m.value).abs() / scale);
                }
            }
        }
        (worst, 0.0)
    });
    let f = s.factor("zgc/conditional-mean-totals");
    s.run("zgc/conditional-mean-totals", 1e-10, terms, || {
        let mut worst = 0.0f64;
        for set in &sets {
            let q = qv(set);
            for n in [5u64, 12, 20] {
                let total: f64 = (0..set.len())
                    .map(|i| {
                        f * conditional_mean_given_total(&q, i, n, budget)
                            .expect("within budget")
                            .value
                    })
                    .sum();
                worst = worst.max((total - n as f64).abs());
            }
        }
        (worst, 0.0)
    });
}

fn condensation_checks(s: &mut Suite, budget: u64) {
    let q = qv(&[0.5, 0.25]);
    let terms = composition_count(60, 2).unwrap_or(u64::MAX);
    s.run("condense/excited-level-limit", 0.01, terms, || {
        let m = conditional_mean_given_total(&q, 1, 60, budget).expect("within budget");
        let limit = q.get(1) / (q.get(0) - q.get(1));
        (m.value, limit)
    });
    s.run("condense/ground-state-share", 0.03, terms, || {
        let m = conditional_mean_given_total(&q, 0, 60, budget).expect("within budget");
        (m.value / 60.0, 1.0)
    });
    // the approach must be monotone toward the limit on a coarse N grid
    s.run("condense/monotone-approach", 1e-12, terms * 2, || {
        let limit = q.get(1) / (q.get(0) - q.get(1));
        let mut prev_gap = f64::INFINITY;
        let mut violation = 0.0f64;
        for n in [10u64, 20, 40, 60] {
            let m = conditional_mean_given_total(&q, 1, n, budget).expect("within budget");
            let gap = (m.value - limit).abs();
            if gap > prev_gap {
                violation = violation.max(gap - prev_gap);
            }
            prev_gap = gap;
        }
        (violation, 0.0)
    });
}

/// Pinned correlated parameter sets spanning omega below, at, and above 1.
fn pinned_correlated_sets() -> [CorrelatedParams; 3] {
    [
        CorrelatedParams::new(vec![0.5, 0.3], vec![0.4, 0.6], 0.8).expect("feasible"),
        CorrelatedParams::new(vec![0.5, 0.25], vec![0.5, 0.25], 1.0).expect("feasible"),
        condition_no_vacuum(&qv(&[0.5, 0.5])).expect("valid"),
    ]
}

fn correlated_checks(s: &mut Suite, budget: u64) {
    let sets = pinned_correlated_sets();

    let mut terms = 0u64;
    for p in &sets {
        let law = Law::Correlated(p);
        if let Ok(t) = TruncationSpec::for_law(&law, 1e-13) {
            terms += t.cutoffs().iter().map(|&m| m + 1).product::<u64>();
        }
    }
    let f = s.factor("corr/moments-vs-enumeration");
    s.run("corr/moments-vs-enumeration", 1e-8, terms * 4, || {
        let mut worst = 0.0f64;
        for p in &sets {
            let law = Law::Correlated(p);
            let trunc = TruncationSpec::for_law(&law, 1e-13).expect("no unit q");
            let table = enumerate_masses(&law, &trunc, budget).expect("within budget");
            let m = moments_corr(p).expect("finite means");
            let k = p.len();
            let (mut e, mut ee) = (vec![0.0; k], vec![vec![0.0; k]; k]);
            for (n, mass) in table.iter() {
                for i in 0..k {
                    e[i] += n[i] as f64 * mass;
                    for j in 0..k {
                        ee[i][j] += (n[i] * n[j]) as f64 * mass;
                    }
                }
            }
            for i in 0..k {
                worst = worst.max((f * m.means[i] - e[i]).abs());
                for j in 0..k {
                    worst = worst.max((f * m.pair_means[i][j] - ee[i][j]).abs());
                    let cov = ee[i][j] - e[i] * e[j];
                    worst = worst.max((f * m.covariances[i][j] - cov).abs());
                }
            }
        }
        (worst, 0.0)
    });

    let f = s.factor("corr/entropy-decomposition");
    s.run("corr/entropy-decomposition", 1e-10, 3 * 2 * 400, || {
        let mut worst = 0.0f64;
        for p in &sets {
            for j in 0..p.len() {
                let decomposed = f * entropy_marginal_corr(p, j).expect("feasible");
                // marginal series by recurrence: mass(0) = 1 - omega q0;
                // mass(m) = omega q0 q^{m-1} (1-q)
                let (omega, q0, q) = (p.omega(), p.q0()[j], p.q()[j]);
                let mut series = KahanSum::default();
                let at_zero = 1.0 - omega * q0;
                if at_zero > 0.0 {
                    series.add(-at_zero * at_zero.ln());
                }
                let mut mass = omega * q0 * (1.0 - q);
                for _ in 1..400u64 {
                    if mass > 0.0 {
                        series.add(-mass * mass.ln());
                    }
                    mass *= q;
                }
                worst = worst.max((decomposed - series.value()).abs());
            }
        }
        (worst, 0.0)
    });

    let independent = &sets[1];
    s.run("corr/mixing-gap-independent-zero", 1e-9, terms, || {
        let gap = mixing_entropy_gap(independent, budget).expect("within budget");
        (gap, 0.0)
    });

    let coupled = &sets[2];
    let f = s.factor("corr/mixing-gap-positive");
    s.run("corr/mixing-gap-positive", 1e-9, terms * 2, || {
        let target = f * mixing_entropy_gap(coupled, budget).expect("within budget");
        // independent recomputation from the primitive mass table
        let law = Law::Correlated(coupled);
        let trunc = TruncationSpec::for_law(&law, 1e-13).expect("no unit q");
        let table = enumerate_masses(&law, &trunc, budget).expect("within budget");
        let k = coupled.len();
        let mut joint = KahanSum::default();
        let mut marg: Vec<Vec<f64>> =
            trunc.cutoffs().iter().map(|&m| vec![0.0; m as usize + 1]).collect();
        for (n, mass) in table.iter() {
            if mass > 0.0 {
                joint.add(-mass * mass.ln());
            }
            for j in 0..k {
                marg[j][n[j] as usize] += mass;
            }
        }
        let mut oracle = KahanSum::default();
        for row in &marg {
            for &m in row {
                if m > 0.0 {
                    oracle.add(-m * m.ln());
                }
            }
        }
        oracle.add(-joint.value());
        (target, oracle.value())
    });

    let f = s.factor("corr/no-vacuum-equivalence");
    s.run("corr/no-vacuum-equivalence", 1e-13, 16 * 16, || {
        let q = qv(&[0.5, 0.5]);
        let p = condition_no_vacuum(&q).expect("valid");
        let nonvac = 1.0 - 0.25;
        let mut worst = prob_corr(&p, &Occupancy::new(vec![0, 0])).expect("valid").abs();
        for n in box_points(&[15, 15]) {
            if n.iter().all(|&v| v == 0) {
                continue;
            }
            let lhs = f * prob_corr(&p, &Occupancy::new(n.clone())).expect("valid");
            let rhs = joint_prob(EnsembleKind::BoseEinstein, &q, &Occupancy::new(n))
                .expect("valid")
                / nonvac;
            worst = worst.max((lhs / rhs - 1.0).abs());
        }
        (worst, 0.0)
    });

    let grid_terms = 7u64.pow(2) * 2 + 7u64.pow(2);
    // the scan lives inside consistency_check, so the canary adds its
    // margin to the reported violation instead
    let f = s.factor("corr/tail-consistency");
    s.run("corr/tail-consistency", 1e-12, grid_terms, || {
        let mut worst = f - 1.0;
        for p in &sets {
            let report = consistency_check(p, 6);
            worst = worst.max(report.max_violation);
        }
        (worst, 0.0)
    });
}

fn conditioning_preservation_checks(s: &mut Suite) {
    let q = qv(&[0.5, 0.3, 0.2]);
    let (q1, q2, q3) = (q.get(0), q.get(1), q.get(2));
    let f = s.factor("be/conditioning-preserves-form");
    s.run("be/conditioning-preserves-form", 1e-12, 2 * 81 + 200, || {
        let mut worst = 0.0f64;
        // conditioned on n_3 = n_1 + n_2, the pair law has activities
        // (q1 q3, q2 q3): mass(a, b) ~ joint(a, b, a+b)
        let mass = |a: u64, b: u64| {
            joint_prob(EnsembleKind::BoseEinstein, &q, &Occupancy::new(vec![a, b, a + b]))
                .expect("valid")
        };
        for a in 0..8u64 {
            for b in 0..8u64 {
                let base = mass(a, b);
                worst = worst.max((f * mass(a + 1, b) / base / (q1 * q3) - 1.0).abs());
                worst = worst.max((f * mass(a, b + 1) / base / (q2 * q3) - 1.0).abs());
            }
        }
        // conditioned on n_1 = n_2, the common value has activity q1 q2;
        // the n_3 marginal factors out of every ratio
        let mass_diag = |m: u64| {
            let mut t = KahanSum::default();
            for c in 0..40u64 {
                t.add(
                    joint_prob(EnsembleKind::BoseEinstein, &q, &Occupancy::new(vec![m, m, c]))
                        .expect("valid"),
                );
            }
            t.value()
        };
        let mut prev = mass_diag(0);
        for m in 1..12u64 {
            let cur = mass_diag(m);
            worst = worst.max((f * cur / prev / (q1 * q2) - 1.0).abs());
            prev = cur;
        }
        (worst, 0.0)
    });
}

fn stationarity_checks(s: &mut Suite) {
    let betas = [0.5, 1.0, 2.0];
    let mus = [-0.4, -0.2, 0.0, 0.2, 0.4];
    let epss = [0.8, 1.1, 1.4, 1.7, 2.0];
    let terms = (betas.len() * mus.len() * epss.len() * 2) as u64;
    s.run("thermo/grand-potential-stationarity", 1e-6, terms, || {
        let mut worst = 0.0f64;
        let h = 1e-5;
        for &beta in &betas {
            for &mu in &mus {
                for &eps in &epss {
                    let params = ThermoParams::new(beta, mu).expect("valid");
                    let qstar = q_thermo(&params, eps).expect("valid").value;
                    let phi = |x: f64| grand_potential(x, &params, eps, None).expect("in range");
                    let deriv = (phi(qstar + h) - phi(qstar - h)) / (2.0 * h);
                    worst = worst.max(deriv.abs());
                }
            }
        }
        (worst, 0.0)
    });
}

fn canonical_checks(s: &mut Suite) {
    let f = s.factor("canonical/shift-invariance");
    s.run("canonical/shift-invariance", 1e-12, 12, || {
        let base = LevelSystem::new(vec![0.1, 0.9, 2.0]).expect("valid");
        let shifted = LevelSystem::new(vec![7.1, 7.9, 9.0]).expect("valid");
        let a = canonical_single_particle(1.7, &base, None).expect("valid");
        let b = canonical_single_particle(1.7, &shifted, None).expect("valid");
        let worst = a
            .iter()
            .zip(&b)
            .map(|(x, y)| (f * x - y).abs())
            .fold(0.0f64, f64::max);
        let norm_gap = (f * a.iter().sum::<f64>() - 1.0).abs();
        (worst.max(norm_gap), 0.0)
    });
}

fn johnson_checks(s: &mut Suite) {
    let terms = composition_count(3, 3).unwrap_or(10);
    let f = s.factor("johnson/normalization");
    s.run("johnson/normalization", 1e-12, terms, || {
        let p = [0.2, 0.3, 0.5];
        let mut total = KahanSum::default();
        for n in compositions(3, 3) {
            total.add(johnson_prob(&p, &Occupancy::new(n)).expect("valid"));
        }
        (f * total.value(), 1.0)
    });
}
