//! Push more and more particles into a two-level system at fixed total N:
//! the level with the largest activity soaks up the excess while every
//! other level's conditional mean saturates at q_j / (q_i - q_j).

use particle_stats::ensembles::{
    condensation_limit, conditional_mean_given_total, DEFAULT_ENUM_BUDGET,
};
use particle_stats::types::QVector;

fn main() {
    let q = QVector::open_unit(vec![0.5, 0.25]).unwrap();
    let limit = condensation_limit(&q, 0, 1).unwrap();
    println!("activities (0.5, 0.25); excited-level limit q2/(q1-q2) = {limit}\n");
    println!("{:>5} {:>14} {:>14} {:>14}", "N", "E(n_1|N)", "E(n_2|N)", "E(n_1|N)/N");
    for n in [1u64, 2, 5, 10, 20, 40, 60, 90] {
        let ground = conditional_mean_given_total(&q, 0, n, DEFAULT_ENUM_BUDGET).unwrap().value;
        let excited = conditional_mean_given_total(&q, 1, n, DEFAULT_ENUM_BUDGET).unwrap().value;
        println!("{n:>5} {ground:>14.8} {excited:>14.8} {:>14.8}", ground / n as f64);
    }

    let at60 = conditional_mean_given_total(&q, 1, 60, DEFAULT_ENUM_BUDGET).unwrap().value;
    println!("\nat N = 60 the excited level sits {:.2e} from its limit", (at60 - limit).abs());

    // a three-level ladder shows each excited level saturating separately
    let q = QVector::open_unit(vec![0.6, 0.3, 0.1]).unwrap();
    print!("\nladder (0.6, 0.3, 0.1), N = 70: limits");
    for j in 1..3 {
        print!(" {:.6}", condensation_limit(&q, 0, j).unwrap());
    }
    print!("  enumerated");
    for j in 1..3 {
        let m = conditional_mean_given_total(&q, j, 70, DEFAULT_ENUM_BUDGET).unwrap();
        print!(" {:.6}", m.value);
    }
    println!();
}
