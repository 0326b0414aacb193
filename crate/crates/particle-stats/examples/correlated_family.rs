//! The correlated occupancy family: a weight omega tilts the vacuum
//! against all occupied states, producing identical-sign correlations
//! between every pair of levels while each level keeps a simple marginal.
//!
//! Walks through feasibility, moments, the special no-vacuum member,
//! conditioning, and the entropy bookkeeping.

use particle_stats::correlated::{
    condition_no_vacuum, condition_on_empty_level, entropy_marginal_corr, mixing_entropy_gap,
    moments_corr, prob_corr, CorrelatedParams,
};
use particle_stats::types::{Occupancy, QVector};

fn main() {
    let q = vec![0.5, 0.3];
    let q0 = vec![0.4, 0.6];

    for omega in [0.8, 1.0, 1.3] {
        let params = CorrelatedParams::new(q.clone(), q0.clone(), omega).unwrap();
        let m = moments_corr(&params).unwrap();
        println!(
            "omega = {omega}: means = ({:.6}, {:.6}), cov12 = {:+.6}, vacuum = {:.6}",
            m.means[0],
            m.means[1],
            m.covariances[0][1],
            params.vacuum_mass()
        );
    }
    println!("cov12 flips sign exactly at omega = 1 (independent levels)\n");

    // pushing omega past the feasibility bound is refused
    let bound = 1.0 / (1.0 - (1.0 - q0[0]) * (1.0 - q0[1]));
    match CorrelatedParams::new(q.clone(), q0.clone(), bound + 0.01) {
        Err(e) => println!("omega = {:.4} refused: {e}", bound + 0.01),
        Ok(_) => unreachable!(),
    }

    // the no-vacuum member: omega exactly uses up the vacuum mass
    let nv = condition_no_vacuum(&QVector::open_unit(vec![0.5, 0.5]).unwrap()).unwrap();
    let m = moments_corr(&nv).unwrap();
    println!(
        "\nno-vacuum member at q = (1/2, 1/2): omega = {}, vacuum = {}, means = ({}, {}), cov12 = {}",
        nv.omega(),
        nv.vacuum_mass(),
        m.means[0],
        m.means[1],
        m.covariances[0][1],
    );
    println!("P(0,0) = {}", prob_corr(&nv, &Occupancy::new(vec![0, 0])).unwrap());

    // conditioning on one level being empty stays in the family
    let base = CorrelatedParams::new(q.clone(), q0.clone(), 0.9).unwrap();
    let cond = condition_on_empty_level(&base, 1).unwrap();
    println!(
        "\ngiven level 2 empty: omega {} -> {}, remaining q0 = {:?}",
        base.omega(),
        cond.omega(),
        cond.q0()
    );

    // each marginal entropy splits into a Bernoulli piece (occupied or not)
    // plus the geometric piece; the mixing gap measures inter-level coupling
    let coupled = condition_no_vacuum(&QVector::open_unit(vec![0.5, 0.5]).unwrap()).unwrap();
    for (label, p) in [("independent", &CorrelatedParams::new(vec![0.5, 0.25], vec![0.5, 0.25], 1.0).unwrap()), ("no-vacuum", &coupled)] {
        let s1 = entropy_marginal_corr(p, 0).unwrap();
        let s2 = entropy_marginal_corr(p, 1).unwrap();
        let gap = mixing_entropy_gap(p, 2_000_000).unwrap();
        println!("{label:>12}: S1 = {s1:.6}, S2 = {s2:.6}, S1 + S2 - S_joint = {gap:.6}");
    }
}
