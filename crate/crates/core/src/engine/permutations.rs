//! Enumeration of the symmetric group in Heap's order.

use crate::error::{Error, Result};

pub const DEFAULT_MAX_ORDER: usize = 10;

pub fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}

pub fn check_order(k: usize, max: usize) -> Result<()> {
    if k == 0 || k > max {
        Err(Error::OrderTooLarge { k, max })
    } else {
        Ok(())
    }
}

/// Iterator over all orderings of `0..k`, each yielded exactly once.
#[derive(Debug, Clone)]
pub struct Permutations {
    current: Vec<usize>,
    counters: Vec<usize>,
    i: usize,
    first: bool,
}

impl Iterator for Permutations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.first {
            self.first = false;
            return Some(self.current.clone());
        }
        if heap_step(&mut self.current, &mut self.counters, &mut self.i) {
            Some(self.current.clone())
        } else {
            None
        }
    }
}

/// Advances to the next ordering; false once all `k!` have been produced.
fn heap_step(a: &mut [usize], c: &mut [usize], i: &mut usize) -> bool {
    let k = a.len();
    while *i < k {
        if c[*i] < *i {
            if (*i).is_multiple_of(2) {
                a.swap(0, *i);
            } else {
                a.swap(c[*i], *i);
            }
            c[*i] += 1;
            *i = 1;
            return true;
        }
        c[*i] = 0;
        *i += 1;
    }
    false
}

pub fn permutations(k: usize) -> Result<Permutations> {
    permutations_with_max(k, DEFAULT_MAX_ORDER)
}

pub fn permutations_with_max(k: usize, max: usize) -> Result<Permutations> {
    check_order(k, max)?;
    Ok(Permutations {
        current: (0..k).collect(),
        counters: vec![0; k],
        i: 1,
        first: true,
    })
}

/// Calls `f` on every ordering of `0..k` in the same order as [`permutations`],
/// without allocating per ordering.
pub fn for_each_permutation(k: usize, mut f: impl FnMut(&[usize])) {
    let mut a: Vec<usize> = (0..k).collect();
    let mut c = vec![0; k];
    let mut i = 1;
    f(&a);
    while heap_step(&mut a, &mut c, &mut i) {
        f(&a);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn small_orders() {
        assert_eq!(permutations(1).unwrap().collect::<Vec<_>>(), vec![vec![0]]);
        assert_eq!(permutations(2).unwrap().collect::<Vec<_>>(), vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn all_distinct() {
        for k in 1..=7 {
            let all: Vec<_> = permutations(k).unwrap().collect();
            assert_eq!(all.len() as u64, factorial(k));
            let set: HashSet<_> = all.iter().cloned().collect();
            assert_eq!(set.len(), all.len());
            for p in &all {
                let mut s = p.clone();
                s.sort_unstable();
                assert_eq!(s, (0..k).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn callback_matches_iterator() {
        let it: Vec<_> = permutations(5).unwrap().collect();
        let mut cb = Vec::new();
        for_each_permutation(5, |p| cb.push(p.to_vec()));
        assert_eq!(it, cb);
    }

    #[test]
    fn order_limits() {
        assert!(matches!(permutations(0), Err(Error::OrderTooLarge { .. })));
        assert!(matches!(permutations(11), Err(Error::OrderTooLarge { k: 11, max: 10 })));
        assert_eq!(permutations_with_max(11, 11).unwrap().take(3).count(), 3);
    }
}
