//! Mean occupancy of a single level as the activity q sweeps upward, for
//! all three per-level laws. The capped law is sandwiched between the
//! exclusion and unbounded curves and converges to each in its limit.

use particle_stats::ensembles::{mean_occupancy, EnsembleKind};
use particle_stats::thermo::{q_from_mean, q_thermo};
use particle_stats::types::ThermoParams;

fn main() {
    println!("{:>6} {:>12} {:>12} {:>12} {:>12}", "q", "fd", "gentile(2)", "gentile(8)", "be");
    for i in 1..10 {
        let q = i as f64 / 10.0;
        let fd = mean_occupancy(EnsembleKind::FermiDirac, q).unwrap();
        let g2 = mean_occupancy(EnsembleKind::Gentile(2), q).unwrap();
        let g8 = mean_occupancy(EnsembleKind::Gentile(8), q).unwrap();
        let be = mean_occupancy(EnsembleKind::BoseEinstein, q).unwrap();
        assert!(fd <= g2 && g2 <= g8 && g8 <= be);
        println!("{q:>6.2} {fd:>12.8} {g2:>12.8} {g8:>12.8} {be:>12.8}");
    }

    // the activity comes from thermodynamic data: q = exp(beta (mu - eps))
    let params = ThermoParams::new(2.0, -0.3).unwrap();
    println!("\nbeta = 2, mu = -0.3:");
    for eps in [0.0, 0.5, 1.0, 2.0] {
        let a = q_thermo(&params, eps).unwrap();
        let mean = mean_occupancy(EnsembleKind::BoseEinstein, a.value).unwrap();
        println!("  eps = {eps:<4} q = {:<22} mean = {mean}", a.value);
    }

    // and can be inverted: a target mean pins q
    let q = q_from_mean(2.5).unwrap();
    println!("\nmean 2.5 needs q = {q} (check: q/(1-q) = {})", q / (1.0 - q));
}
