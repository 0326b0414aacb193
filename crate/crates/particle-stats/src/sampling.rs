//! Seeded exact samplers for every distribution in the crate, the
//! birth-death chain whose stationary law is the product-geometric
//! distribution, and empirical-statistics helpers for checking them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::correlated::CorrelatedParams;
use crate::ensembles::EnsembleKind;
use crate::error::{Error, Result};
use crate::numeric::upow;
use crate::types::{Occupancy, QVector};

/// Pseudo-random generator family. Only one is provided; the enum exists so
/// the reproducibility contract (seed + algorithm -> identical draws) is
/// explicit in every serialized run description.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RngAlgorithm {
    ChaCha8,
}

impl RngAlgorithm {
    pub fn name(&self) -> &'static str {
        match self {
            RngAlgorithm::ChaCha8 => "chacha8",
        }
    }
}

/// A reproducible randomness source: (seed, algorithm, stream index)
/// determines the full draw sequence. Parallel or multi-phase runs derive
/// disjoint substreams from one seed via [`SeededSource::substream`], so
/// results do not depend on how work was split.
#[derive(Debug, Clone)]
pub struct SeededSource {
    seed: u64,
    stream: u64,
    algorithm: RngAlgorithm,
    rng: ChaCha8Rng,
}

impl SeededSource {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    /// Substream `index` of the same seed (stream 0 is `new`).
    pub fn with_stream(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        SeededSource { seed, stream: index, algorithm: RngAlgorithm::ChaCha8, rng }
    }

    /// A fresh source on substream `index`, independent of this source's
    /// position in its own stream.
    pub fn substream(&self, index: u64) -> Self {
        Self::with_stream(self.seed, index)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn algorithm(&self) -> RngAlgorithm {
        self.algorithm
    }

    fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    /// Uniform on (0,1): rejects the measure-zero 0 so ln(U) is safe.
    fn uniform_open(&mut self) -> f64 {
        loop {
            let u = self.rng.gen::<f64>();
            if u > 0.0 {
                return u;
            }
        }
    }
}

/// Geometric draw on {0,1,2,...} with ratio q: floor(ln U / ln q).
fn draw_geometric(q: f64, src: &mut SeededSource) -> u64 {
    let u = src.uniform_open();
    (u.ln() / q.ln()).floor() as u64
}

/// One exact draw from the product occupation law of `kind`.
pub fn sample_occupancy(kind: EnsembleKind, q: &QVector, src: &mut SeededSource) -> Result<Occupancy> {
    kind.validate()?;
    kind.check_q(q)?;
    let mut n = Vec::with_capacity(q.len());
    for j in 0..q.len() {
        let qj = q.get(j);
        let nj = match kind {
            EnsembleKind::BoseEinstein => draw_geometric(qj, src),
            EnsembleKind::FermiDirac => {
                if src.uniform() < qj / (1.0 + qj) {
                    1
                } else {
                    0
                }
            }
            EnsembleKind::Gentile(cap) => draw_capped_geometric(qj, cap, src),
        };
        n.push(nj);
    }
    match kind.cap() {
        Some(c) => Occupancy::capped(n, c),
        None => Ok(Occupancy::new(n)),
    }
}

/// Inverse transform on the truncated support {0..cap}.
fn draw_capped_geometric(q: f64, cap: u64, src: &mut SeededSource) -> u64 {
    if q == 1.0 {
        // uniform over cap+1 values
        let m = (src.uniform() * (cap + 1) as f64) as u64;
        return m.min(cap);
    }
    // walk the unnormalized CDF: target = U * sum_{m=0..cap} q^m
    let norm = (1.0 - upow(q, cap + 1)) / (1.0 - q);
    let target = src.uniform() * norm;
    let mut cum = 0.0;
    let mut weight = 1.0;
    for m in 0..cap {
        cum += weight;
        if target < cum {
            return m;
        }
        weight *= q;
    }
    cap
}

const CORRELATED_PATTERN_LIMIT: usize = 20;

/// Sampler for the correlated family. Stage one picks which states are
/// occupied (2^k pattern table built once); stage two draws each occupied
/// count as 1 + geometric.
#[derive(Debug, Clone)]
pub struct CorrelatedSampler {
    params: CorrelatedParams,
    // cumulative pattern masses; pattern bit j set = state j occupied
    pattern_cum: Vec<f64>,
}

impl CorrelatedSampler {
    pub fn new(params: &CorrelatedParams) -> Result<Self> {
        let k = params.len();
        if k > CORRELATED_PATTERN_LIMIT {
            return Err(Error::Budget(format!(
                "pattern enumeration is 2^k; k = {k} exceeds the limit {CORRELATED_PATTERN_LIMIT}"
            )));
        }
        if params.has_unit_q() {
            return Err(Error::Domain(
                "cannot sample: some q_j = 1 puts infinite mass at infinity".into(),
            ));
        }
        let q0 = params.q0();
        let mut cum = Vec::with_capacity(1usize << k);
        let mut acc = 0.0;
        for pattern in 0..(1u32 << k) {
            let mass = if pattern == 0 {
                params.vacuum_mass()
            } else {
                let mut w = params.omega();
                for (j, &q0j) in q0.iter().enumerate() {
                    w *= if pattern >> j & 1 == 1 { q0j } else { 1.0 - q0j };
                }
                w
            };
            acc += mass;
            cum.push(acc);
        }
        Ok(CorrelatedSampler { params: params.clone(), pattern_cum: cum })
    }

    pub fn sample(&self, src: &mut SeededSource) -> Occupancy {
        let total = *self.pattern_cum.last().expect("nonempty");
        let target = src.uniform() * total;
        let pattern = match self
            .pattern_cum
            .iter()
            .position(|&c| target < c)
        {
            Some(p) => p,
            None => self.pattern_cum.len() - 1,
        };
        let k = self.params.len();
        let mut n = vec![0u64; k];
        for (j, nj) in n.iter_mut().enumerate() {
            if pattern >> j & 1 == 1 {
                *nj = 1 + draw_geometric(self.params.q()[j], src);
            }
        }
        Occupancy::new(n)
    }
}

/// One exact draw from the correlated family. For repeated draws build a
/// [`CorrelatedSampler`] once.
pub fn sample_correlated(params: &CorrelatedParams, src: &mut SeededSource) -> Result<Occupancy> {
    Ok(CorrelatedSampler::new(params)?.sample(src))
}

/// Birth-death rates of the occupation chain. The stationary law of the
/// chain is the product-geometric distribution with q_j = birth_j / death_j,
/// which positive recurrence requires to be below 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    birth: Vec<f64>,
    death: Vec<f64>,
    rate_total: f64,
}

impl ChainSpec {
    pub fn new(birth: Vec<f64>, death: Vec<f64>) -> Result<Self> {
        if birth.is_empty() || birth.len() != death.len() {
            return Err(Error::Domain(format!(
                "need matching nonempty rate vectors, got {} and {}",
                birth.len(),
                death.len()
            )));
        }
        for (j, (&b, &d)) in birth.iter().zip(&death).enumerate() {
            if !(b > 0.0 && b.is_finite() && d > 0.0 && d.is_finite()) {
                return Err(Error::Domain(format!(
                    "rates must be positive and finite, got birth[{j}] = {b}, death[{j}] = {d}"
                )));
            }
            if b >= d {
                return Err(Error::Domain(format!(
                    "birth[{j}]/death[{j}] = {} >= 1: coordinate {j} is not positive recurrent",
                    b / d
                )));
            }
        }
        let rate_total = birth.iter().sum::<f64>() + death.iter().sum::<f64>();
        Ok(ChainSpec { birth, death, rate_total })
    }

    pub fn len(&self) -> usize {
        self.birth.len()
    }

    pub fn is_empty(&self) -> bool {
        false // constructor rejects empty rate vectors
    }

    /// q_j = birth_j / death_j.
    pub fn activity(&self, j: usize) -> f64 {
        self.birth[j] / self.death[j]
    }

    pub fn activities(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.activity(j)).collect()
    }
}

/// One step of the occupation chain: propose (coordinate, direction) with
/// probability rate / sum(all rates); a down-proposal at an empty coordinate
/// is a hold (the state does not change).
///
/// The hold rule keeps the proposal mass state-independent, which is what
/// makes detailed balance hold exactly against pi(n) ~ prod q_j^{n_j}:
/// pi(n) birth_j = pi(n + e_j) death_j on every edge. Renormalizing over
/// the currently legal moves instead would inflate boundary states and the
/// chain would converge to a different law.
pub fn chain_step(state: &Occupancy, spec: &ChainSpec, src: &mut SeededSource) -> Occupancy {
    assert_eq!(state.len(), spec.len(), "state and chain spec disagree on k");
    let target = src.uniform() * spec.rate_total;
    let mut cum = 0.0;
    let mut n = state.counts().to_vec();
    for j in 0..spec.len() {
        cum += spec.birth[j];
        if target < cum {
            n[j] += 1;
            return Occupancy::new(n);
        }
    }
    for j in 0..spec.len() {
        cum += spec.death[j];
        if target < cum {
            if n[j] > 0 {
                n[j] -= 1;
            }
            return Occupancy::new(n);
        }
    }
    Occupancy::new(n) // target == rate_total within rounding: hold
}

/// Options for [`empirical_report`].
#[derive(Debug, Clone)]
pub struct EmpiricalOptions {
    /// Histogram cells 0..=cutoff plus one overflow bucket.
    pub histogram_cutoff: u64,
    /// When set, standard errors use batch means over this many consecutive
    /// batches (for correlated sequences such as chain output) instead of
    /// the i.i.d. formula.
    pub batches: Option<usize>,
}

impl Default for EmpiricalOptions {
    fn default() -> Self {
        EmpiricalOptions { histogram_cutoff: 20, batches: None }
    }
}

/// Sample statistics of a set of draws.
#[derive(Debug, Clone)]
pub struct EmpiricalReport {
    pub count: usize,
    pub means: Vec<f64>,
    /// Unbiased sample covariance matrix.
    pub covariances: Vec<Vec<f64>>,
    /// Standard error of each mean (i.i.d. or batch-means, per options).
    pub std_errors: Vec<f64>,
    /// Per-state counts for n = 0..=cutoff, then one overflow bucket.
    pub histograms: Vec<Vec<u64>>,
    /// Number of batches used for the standard errors, when batching.
    pub batches: Option<usize>,
}

pub fn empirical_report(draws: &[Occupancy], opts: &EmpiricalOptions) -> Result<EmpiricalReport> {
    if draws.len() < 2 {
        return Err(Error::Domain(format!(
            "need at least 2 draws for sample statistics, got {}",
            draws.len()
        )));
    }
    let k = draws[0].len();
    if draws.iter().any(|d| d.len() != k) {
        return Err(Error::Domain("draws disagree on the number of states".into()));
    }
    let count = draws.len();
    let nf = count as f64;

    let mut means = vec![0.0; k];
    for d in draws {
        for (m, &v) in means.iter_mut().zip(d.counts()) {
            *m += v as f64;
        }
    }
    for m in &mut means {
        *m /= nf;
    }

    let mut cov = vec![vec![0.0; k]; k];
    for d in draws {
        for (i, row) in cov.iter_mut().enumerate() {
            let di = d.get(i) as f64 - means[i];
            for (j, v) in row.iter_mut().enumerate() {
                *v += di * (d.get(j) as f64 - means[j]);
            }
        }
    }
    for row in &mut cov {
        for v in row {
            *v /= nf - 1.0;
        }
    }

    let std_errors = match opts.batches {
        None => (0..k).map(|j| (cov[j][j] / nf).sqrt()).collect(),
        Some(b) => batch_means_se(draws, &means, b)?,
    };

    let cells = opts.histogram_cutoff as usize + 2;
    let mut histograms = vec![vec![0u64; cells]; k];
    for d in draws {
        for (j, &v) in d.counts().iter().enumerate() {
            let cell = (v as usize).min(cells - 1);
            histograms[j][cell] += 1;
        }
    }

    Ok(EmpiricalReport { count, means, covariances: cov, std_errors, histograms, batches: opts.batches })
}

fn batch_means_se(draws: &[Occupancy], means: &[f64], batches: usize) -> Result<Vec<f64>> {
    if batches < 2 {
        return Err(Error::Domain("batch-means needs at least 2 batches".into()));
    }
    let per = draws.len() / batches;
    if per < 1 {
        return Err(Error::Domain(format!(
            "{} draws cannot fill {batches} batches",
            draws.len()
        )));
    }
    let mut se = Vec::with_capacity(means.len());
    for (j, &mean_j) in means.iter().enumerate() {
        let mut var_of_means = 0.0;
        for b in 0..batches {
            let slice = &draws[b * per..(b + 1) * per];
            let bm = slice.iter().map(|d| d.get(j) as f64).sum::<f64>() / per as f64;
            var_of_means += (bm - mean_j) * (bm - mean_j);
        }
        var_of_means /= (batches - 1) as f64;
        se.push((var_of_means / batches as f64).sqrt());
    }
    Ok(se)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducibility() {
        let q = QVector::open_unit(vec![0.5, 0.3]).unwrap();
        let mut a = SeededSource::new(7);
        let mut b = SeededSource::new(7);
        for _ in 0..100 {
            assert_eq!(
                sample_occupancy(EnsembleKind::BoseEinstein, &q, &mut a).unwrap(),
                sample_occupancy(EnsembleKind::BoseEinstein, &q, &mut b).unwrap()
            );
        }
        // substreams differ from the base stream
        let mut c = SeededSource::new(7).substream(1);
        let x = sample_occupancy(EnsembleKind::BoseEinstein, &q, &mut a).unwrap();
        let y = sample_occupancy(EnsembleKind::BoseEinstein, &q, &mut c).unwrap();
        let mut any_diff = x != y;
        for _ in 0..50 {
            if sample_occupancy(EnsembleKind::BoseEinstein, &q, &mut a).unwrap()
                != sample_occupancy(EnsembleKind::BoseEinstein, &q, &mut c).unwrap()
            {
                any_diff = true;
            }
        }
        assert!(any_diff);
    }

    #[test]
    fn support_constraints() {
        let mut src = SeededSource::new(11);
        let qfd = QVector::positive(vec![0.8, 2.0, 1.0]).unwrap();
        for _ in 0..500 {
            let d = sample_occupancy(EnsembleKind::FermiDirac, &qfd, &mut src).unwrap();
            assert!(d.counts().iter().all(|&v| v <= 1));
        }
        let qg = QVector::positive(vec![0.9, 1.2]).unwrap();
        for _ in 0..500 {
            let d = sample_occupancy(EnsembleKind::Gentile(3), &qg, &mut src).unwrap();
            assert!(d.counts().iter().all(|&v| v <= 3));
        }
        let hot = QVector::positive(vec![1.1]).unwrap();
        assert!(sample_occupancy(EnsembleKind::BoseEinstein, &hot, &mut src).is_err());
    }

    #[test]
    fn geometric_frequencies_match_the_law() {
        let q = QVector::open_unit(vec![0.5]).unwrap();
        let mut src = SeededSource::new(20240817);
        let n = 20_000usize;
        let mut zero = 0usize;
        let mut sum = 0u64;
        for _ in 0..n {
            let d = sample_occupancy(EnsembleKind::BoseEinstein, &q, &mut src).unwrap();
            if d.get(0) == 0 {
                zero += 1;
            }
            sum += d.get(0);
        }
        // P(0) = 0.5; SE = sqrt(0.25/n); mean 1.0, var 2.0
        let zero_freq = zero as f64 / n as f64;
        assert!((zero_freq - 0.5).abs() < 3.0 * (0.25f64 / n as f64).sqrt(), "{zero_freq}");
        let mean = sum as f64 / n as f64;
        assert!((mean - 1.0).abs() < 3.0 * (2.0f64 / n as f64).sqrt(), "{mean}");
    }

    #[test]
    fn capped_sampler_hits_exact_masses() {
        // uniform at q = 1
        let mut src = SeededSource::new(5);
        let q1 = QVector::positive(vec![1.0]).unwrap();
        let mut counts = [0usize; 4];
        let n = 40_000;
        for _ in 0..n {
            let d = sample_occupancy(EnsembleKind::Gentile(3), &q1, &mut src).unwrap();
            counts[d.get(0) as usize] += 1;
        }
        for &c in &counts {
            let f = c as f64 / n as f64;
            assert!((f - 0.25).abs() < 3.0 * (0.25 * 0.75 / n as f64).sqrt(), "{f}");
        }
    }

    #[test]
    fn correlated_sampler_avoids_dead_vacuum() {
        let params = crate::correlated::condition_no_vacuum(
            &QVector::open_unit(vec![0.5, 0.5]).unwrap(),
        )
        .unwrap();
        let sampler = CorrelatedSampler::new(&params).unwrap();
        let mut src = SeededSource::new(99);
        for _ in 0..20_000 {
            let d = sampler.sample(&mut src);
            assert!(d.total() > 0, "drew the vacuum though its mass is 0");
        }
    }

    #[test]
    fn correlated_sampler_guards() {
        let unit = CorrelatedParams::new_allowing_unit_q(vec![1.0], vec![0.5], 1.0).unwrap();
        assert!(CorrelatedSampler::new(&unit).is_err());
        let wide = CorrelatedParams::new(vec![0.5; 25], vec![0.01; 25], 1.0).unwrap();
        assert!(matches!(CorrelatedSampler::new(&wide), Err(Error::Budget(_))));
    }

    #[test]
    fn chain_balances_in_closed_form() {
        // pi(n) birth_j = pi(n + e_j) death_j with pi ~ prod q^n reduces to
        // q_j death_j = birth_j; verify the identity the step rule encodes
        let spec = ChainSpec::new(vec![0.3, 0.2], vec![0.6, 0.8]).unwrap();
        for j in 0..2 {
            let lhs = spec.activity(j) * spec.death[j];
            assert!((lhs - spec.birth[j]).abs() < 1e-15 * spec.birth[j]);
        }
    }

    #[test]
    fn chain_long_run_hits_geometric_means() {
        let spec = ChainSpec::new(vec![0.3, 0.2], vec![0.6, 0.8]).unwrap();
        // activities 0.5 and 0.25 -> means 1.0 and 1/3
        let mut src = SeededSource::new(4242);
        let mut state = Occupancy::new(vec![0, 0]);
        for _ in 0..5_000 {
            state = chain_step(&state, &spec, &mut src);
        }
        let mut draws = Vec::with_capacity(200_000);
        for _ in 0..200_000 {
            state = chain_step(&state, &spec, &mut src);
            draws.push(state.clone());
        }
        let report = empirical_report(
            &draws,
            &EmpiricalOptions { batches: Some(50), ..Default::default() },
        )
        .unwrap();
        for (j, target) in [1.0, 1.0 / 3.0].iter().enumerate() {
            let dev = (report.means[j] - target).abs();
            assert!(
                dev < 3.0 * report.std_errors[j],
                "coordinate {j}: mean {} vs {target}, se {}",
                report.means[j],
                report.std_errors[j]
            );
        }
    }

    #[test]
    fn chain_holds_at_the_boundary() {
        // death-dominated rates: from the origin the chain must sometimes
        // hold, and every state stays a valid occupancy
        let spec = ChainSpec::new(vec![0.01, 0.01], vec![1.0, 1.0]).unwrap();
        let mut src = SeededSource::new(3);
        let mut state = Occupancy::new(vec![0, 0]);
        let mut held = 0;
        for _ in 0..2_000 {
            let next = chain_step(&state, &spec, &mut src);
            if next == state {
                held += 1;
            }
            state = next;
        }
        assert!(held > 0, "boundary holds never happened under death-dominated rates");
    }

    #[test]
    fn chain_spec_validation() {
        assert!(ChainSpec::new(vec![0.5], vec![0.4]).is_err()); // q >= 1
        assert!(ChainSpec::new(vec![0.5], vec![0.5]).is_err()); // q = 1
        assert!(ChainSpec::new(vec![], vec![]).is_err());
        assert!(ChainSpec::new(vec![0.5, -0.1], vec![1.0, 1.0]).is_err());
        assert!(ChainSpec::new(vec![0.3], vec![0.6, 0.7]).is_err());
    }

    #[test]
    fn empirical_report_arithmetic() {
        let draws = vec![Occupancy::new(vec![0]), Occupancy::new(vec![2])];
        let r = empirical_report(&draws, &EmpiricalOptions::default()).unwrap();
        assert_eq!(r.means, vec![1.0]);
        assert_eq!(r.covariances[0][0], 2.0);
        assert_eq!(r.histograms[0][0], 1);
        assert_eq!(r.histograms[0][2], 1);

        let constant = vec![Occupancy::new(vec![3, 1]); 10];
        let r = empirical_report(&constant, &EmpiricalOptions::default()).unwrap();
        assert_eq!(r.covariances[0][0], 0.0);
        assert_eq!(r.std_errors, vec![0.0, 0.0]);

        assert!(empirical_report(&[], &EmpiricalOptions::default()).is_err());
        assert!(empirical_report(&draws[..1], &EmpiricalOptions::default()).is_err());

        // overflow bucket
        let big = vec![Occupancy::new(vec![100]), Occupancy::new(vec![0])];
        let r = empirical_report(&big, &EmpiricalOptions { histogram_cutoff: 5, batches: None })
            .unwrap();
        assert_eq!(r.histograms[0][6], 1);

        // batch means path
        let seq: Vec<Occupancy> = (0..100).map(|i| Occupancy::new(vec![i % 3])).collect();
        let r = empirical_report(&seq, &EmpiricalOptions { batches: Some(10), ..Default::default() })
            .unwrap();
        assert_eq!(r.batches, Some(10));
        assert!(r.std_errors[0] >= 0.0);
        assert!(empirical_report(&seq, &EmpiricalOptions { batches: Some(1), ..Default::default() }).is_err());
    }
}
