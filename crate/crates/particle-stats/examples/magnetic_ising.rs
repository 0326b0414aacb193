//! Canonical weights for small magnetic systems: configurations weighted by
//! exp(-beta (E - H M)). A pair of coupled spins develops magnetization as
//! the field H grows.

use particle_stats::ensembles::{magnetic_canonical, SpinConfiguration, SpinConfigurationTable};

fn spin_pair(coupling: f64, field: f64) -> SpinConfigurationTable {
    let c = |label: &str, s1: f64, s2: f64| SpinConfiguration {
        label: label.into(),
        energy: -coupling * s1 * s2,
        magnetization: s1 + s2,
    };
    SpinConfigurationTable::new(
        vec![c("++", 1.0, 1.0), c("+-", 1.0, -1.0), c("-+", -1.0, 1.0), c("--", -1.0, -1.0)],
        field,
    )
    .unwrap()
}

fn main() {
    let beta = 1.0;
    let j = 0.5;
    println!("two spins, coupling J = {j}, beta = {beta}");
    println!("{:>6} {:>10} {:>10} {:>10} {:>10} {:>12}", "H", "p(++)", "p(+-)", "p(-+)", "p(--)", "<M>");
    for h in [0.0, 0.25, 0.5, 1.0, 2.0] {
        let table = spin_pair(j, h);
        let p = magnetic_canonical(&table, beta).unwrap();
        let m: f64 = table
            .configurations()
            .iter()
            .zip(&p)
            .map(|(c, w)| c.magnetization * w)
            .sum();
        println!("{h:>6.2} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {m:>12.8}", p[0], p[1], p[2], p[3]);
    }

    // zero field: up and down are symmetric, magnetization vanishes
    let p = magnetic_canonical(&spin_pair(j, 0.0), beta).unwrap();
    assert_eq!(p[0], p[3]);
    assert_eq!(p[1], p[2]);
    println!("\nzero-field symmetry holds exactly: p(++) = p(--), p(+-) = p(-+)");
}
