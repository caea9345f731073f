//! Lexicographic ranking and unranking of fixed-size node subsets.
//!
//! Solutions are p-element subsets of {1, ..., n}. Enumeration-heavy code
//! (exact search, search-space graphs) indexes them densely by their
//! lexicographic rank instead of hashing the sets themselves.

/// C(n, k), saturating at `u128::MAX` instead of overflowing.
pub(crate) fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        match acc.checked_mul((n - i) as u128) {
            Some(v) => acc = v / (i as u128 + 1),
            None => return u128::MAX,
        }
    }
    acc
}

/// Advances a strictly ascending subset of {1, ..., n} to its lexicographic
/// successor in place. Returns false (leaving the set untouched) at the last
/// combination.
pub(crate) fn next_combination(set: &mut [usize], n: usize) -> bool {
    let p = set.len();
    for i in (0..p).rev() {
        if set[i] < n - (p - 1 - i) {
            set[i] += 1;
            for j in i + 1..p {
                set[j] = set[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Rank/unrank table for p-subsets of {1, ..., n} in lexicographic order.
#[derive(Debug, Clone)]
pub(crate) struct SubsetIndexer {
    n: usize,
    p: usize,
    /// choose[a][b] = C(a, b) for a in 0..=n, b in 0..=p, saturating.
    choose: Vec<Vec<u128>>,
}

impl SubsetIndexer {
    pub(crate) fn new(n: usize, p: usize) -> Self {
        let mut choose = vec![vec![0u128; p + 1]; n + 1];
        for a in 0..=n {
            choose[a][0] = 1;
            for b in 1..=p.min(a) {
                let up = choose[a - 1][b];
                let left = choose[a - 1][b - 1];
                choose[a][b] = up.saturating_add(left);
            }
        }
        Self { n, p, choose }
    }

    pub(crate) fn total(&self) -> u128 {
        self.choose[self.n][self.p]
    }

    /// Rank of a strictly ascending subset of {1, ..., n}.
    pub(crate) fn rank(&self, set: &[usize]) -> u64 {
        debug_assert_eq!(set.len(), self.p);
        let mut rank: u128 = 0;
        let mut prev = 0usize;
        for (k, &v) in set.iter().enumerate() {
            debug_assert!(v > prev && v <= self.n);
            for skipped in prev + 1..v {
                rank += self.choose[self.n - skipped][self.p - k - 1];
            }
            prev = v;
        }
        rank as u64
    }

    /// Inverse of [`rank`]: the subset at the given lexicographic position.
    pub(crate) fn unrank(&self, rank: u64) -> Vec<usize> {
        let mut rank = rank as u128;
        debug_assert!(rank < self.total());
        let mut set = Vec::with_capacity(self.p);
        let mut v = 1usize;
        for k in 0..self.p {
            loop {
                let block = self.choose[self.n - v][self.p - k - 1];
                if rank < block {
                    set.push(v);
                    v += 1;
                    break;
                }
                rank -= block;
                v += 1;
            }
        }
        set
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(40, 2), 780);
        assert_eq!(binomial(100, 10), 17_310_309_456_440);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(500, 250), u128::MAX); // saturates
    }

    #[test]
    fn rank_unrank_roundtrip() {
        let idx = SubsetIndexer::new(7, 3);
        assert_eq!(idx.total(), 35);
        let mut seen = Vec::new();
        for r in 0..35u64 {
            let set = idx.unrank(r);
            assert_eq!(idx.rank(&set), r);
            seen.push(set);
        }
        // ranks enumerate sets in strictly increasing lexicographic order
        for w in seen.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert_eq!(seen[0], vec![1, 2, 3]);
        assert_eq!(seen[34], vec![5, 6, 7]);
    }

    #[test]
    fn unrank_p_equals_one() {
        let idx = SubsetIndexer::new(3, 1);
        assert_eq!(idx.unrank(0), vec![1]);
        assert_eq!(idx.unrank(2), vec![3]);
    }

    #[test]
    fn successor_matches_unrank_order() {
        let idx = SubsetIndexer::new(8, 3);
        let mut set = idx.unrank(0);
        for r in 1..idx.total() as u64 {
            assert!(next_combination(&mut set, 8));
            assert_eq!(set, idx.unrank(r));
        }
        assert!(!next_combination(&mut set, 8));
        assert_eq!(set, vec![6, 7, 8]);
    }
}
