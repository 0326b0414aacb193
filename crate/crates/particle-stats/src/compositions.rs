//! Enumeration of compositions: all ways to place `total` indistinguishable
//! particles into `parts` ordered states. Used by the fixed-total ensembles
//! and by the brute-force verification oracle.

/// Iterator over all vectors of length `parts` of nonnegative integers
/// summing to `total`, in lexicographic order: (0,...,0,total) first,
/// (total,0,...,0) last.
#[derive(Debug, Clone)]
pub struct Compositions {
    current: Vec<u64>,
    started: bool,
    done: bool,
}

pub fn compositions(total: u64, parts: usize) -> Compositions {
    assert!(parts > 0, "compositions need at least one part");
    let mut current = vec![0; parts];
    current[parts - 1] = total;
    Compositions { current, started: false, done: false }
}

impl Iterator for Compositions {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.current.clone());
        }
        let k = self.current.len();
        // bump the rightmost position that still has mass to its right,
        // then push all remaining mass to the tail
        let mut suffix = 0u64;
        for i in (0..k.saturating_sub(1)).rev() {
            suffix += self.current[i + 1];
            if suffix > 0 {
                self.current[i] += 1;
                for t in &mut self.current[i + 1..] {
                    *t = 0;
                }
                self.current[k - 1] = suffix - 1;
                return Some(self.current.clone());
            }
        }
        self.done = true;
        None
    }
}

/// Iterator over all integer points of the box prod [0, cutoffs[j]],
/// odometer order (last coordinate fastest).
#[derive(Debug, Clone)]
pub(crate) struct BoxPoints {
    cutoffs: Vec<u64>,
    current: Vec<u64>,
    started: bool,
    done: bool,
}

pub(crate) fn box_points(cutoffs: &[u64]) -> BoxPoints {
    BoxPoints {
        cutoffs: cutoffs.to_vec(),
        current: vec![0; cutoffs.len()],
        started: false,
        done: cutoffs.is_empty(),
    }
}

impl Iterator for BoxPoints {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.current.clone());
        }
        for i in (0..self.current.len()).rev() {
            if self.current[i] < self.cutoffs[i] {
                self.current[i] += 1;
                for t in &mut self.current[i + 1..] {
                    *t = 0;
                }
                return Some(self.current.clone());
            }
        }
        self.done = true;
        None
    }
}

/// Number of compositions of `total` into `parts` parts:
/// C(total + parts - 1, parts - 1). `None` if it overflows u64.
pub fn composition_count(total: u64, parts: usize) -> Option<u64> {
    let k = parts as u64;
    if k == 0 {
        return None;
    }
    // running product C = prod_{i=1..k-1} (total + i) / i stays integral
    let mut c: u128 = 1;
    for i in 1..k {
        c = c.checked_mul(total as u128 + i as u128)? / i as u128;
        if c > u64::MAX as u128 {
            return None;
        }
    }
    Some(c as u64)
}
