//! Small numeric utilities shared by the enumeration-heavy modules.

/// Kahan-Babuska compensated accumulator. Enumeration sums run to ~10^6
/// terms; compensation keeps the result independent of term magnitude
/// ordering to well below the crate's tolerances.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// x^n for unsigned n without the powi i32 cast trap.
pub(crate) fn upow(x: f64, n: u64) -> f64 {
    if n <= i32::MAX as u64 {
        x.powi(n as i32)
    } else {
        x.powf(n as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_beats_naive_on_mixed_magnitudes() {
        let mut k = KahanSum::default();
        let mut naive = 0.0f64;
        // 1 followed by many tiny terms that naive addition drops entirely
        k.add(1.0);
        naive += 1.0;
        for _ in 0..1000 {
            k.add(1e-18);
            naive += 1e-18;
        }
        assert_eq!(naive, 1.0);
        assert!((k.value() - (1.0 + 1e-15)).abs() < 1e-18);
    }

    #[test]
    fn upow_small_and_edge() {
        assert_eq!(upow(0.5, 0), 1.0);
        assert_eq!(upow(0.5, 1), 0.5);
        assert_eq!(upow(0.5, 3), 0.125);
        assert_eq!(upow(0.0, 0), 1.0);
        assert_eq!(upow(0.0, 5), 0.0);
        // exponent beyond i32 takes the powf path
        assert!(upow(0.999999, 4_000_000_000) < 1e-300);
    }
}
