//! Fixed-total partition sums Z(N) = sum over {n : |n| = N} of prod q_j^{n_j},
//! three ways: brute-force enumeration, the partial-fraction closed form,
//! and the bilinear recursion hiding inside conditional means. Also shows
//! the closed form refusing nearly-equal activities instead of cancelling
//! catastrophically.

use particle_stats::ensembles::{
    conditional_mean_given_total, zgc_closed, zgc_direct, DEFAULT_ENUM_BUDGET,
};
use particle_stats::types::QVector;
use particle_stats::Error;

fn main() {
    let q = QVector::open_unit(vec![0.5, 0.3, 0.2]).unwrap();
    println!("{:>4} {:>22} {:>22} {:>10}", "N", "direct", "closed", "rel gap");
    for n in 0..=12u64 {
        let d = zgc_direct(&q, n, DEFAULT_ENUM_BUDGET).unwrap();
        let c = zgc_closed(&q, n).unwrap();
        println!("{n:>4} {d:>22.16e} {c:>22.16e} {:>10.1e}", (c - d).abs() / d);
    }

    // conditional means under the fixed-total law add up to the total
    let n = 9;
    let mut sum = 0.0;
    print!("\nE(n_j | N = {n}):");
    for j in 0..q.len() {
        let m = conditional_mean_given_total(&q, j, n, DEFAULT_ENUM_BUDGET).unwrap();
        print!(" {:.6}", m.value);
        sum += m.value;
    }
    println!("   sum = {sum}");

    // two activities 1e-9 apart: the denominators prod (q_j - q_m) blow up
    let tight = QVector::open_unit(vec![0.4, 0.4 + 1e-9]).unwrap();
    match zgc_closed(&tight, 5) {
        Err(Error::IllConditioned(msg)) => println!("\nrefused as expected: {msg}"),
        other => panic!("expected a conditioning refusal, got {other:?}"),
    }
    // enumeration has no such problem
    println!("direct sum still fine: {}", zgc_direct(&tight, 5, DEFAULT_ENUM_BUDGET).unwrap());
}
