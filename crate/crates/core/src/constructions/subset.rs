//! Lexicographic ranking of `r`-subsets of `[0, k)`.

/// Binomial coefficient, zero when `r > n`.
pub fn binomial(n: u64, r: u64) -> u64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u64 = 1;
    for i in 0..r {
        // exact at every step: acc * (n - i) is divisible by (i + 1)
        acc = (acc as u128 * (n - i) as u128 / (i + 1) as u128) as u64;
    }
    acc
}

/// Bijection between the `r`-subsets of `[0, k)` in lexicographic order and
/// `[0, C(k, r))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubsetRank {
    k: usize,
    r: usize,
}

impl SubsetRank {
    pub fn new(k: usize, r: usize) -> Self {
        SubsetRank { k, r }
    }

    pub fn count(&self) -> u64 {
        binomial(self.k as u64, self.r as u64)
    }

    /// Rank of a strictly increasing subset.
    ///
    /// Closed form: `C(k, r) - 1 - Σ_i C(k - 1 - c_i, r - i)`, i.e. the
    /// complement of the subset's co-lexicographic position.
    pub fn rank(&self, subset: &[usize]) -> u64 {
        debug_assert_eq!(subset.len(), self.r);
        debug_assert!(subset.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(subset.last().is_none_or(|&c| c < self.k));
        let tail: u64 = subset
            .iter()
            .enumerate()
            .map(|(i, &c)| binomial((self.k - 1 - c) as u64, (self.r - i) as u64))
            .sum();
        self.count() - 1 - tail
    }

    pub fn unrank(&self, mut rank: u64) -> Vec<usize> {
        assert!(rank < self.count(), "rank {rank} out of range");
        let mut out = Vec::with_capacity(self.r);
        let mut next = 0;
        for i in 0..self.r {
            let left = (self.r - i - 1) as u64;
            let mut c = next;
            loop {
                // subsets whose i-th element is c
                let block = binomial((self.k - c - 1) as u64, left);
                if rank < block {
                    break;
                }
                rank -= block;
                c += 1;
            }
            out.push(c);
            next = c + 1;
        }
        out
    }

    /// All subsets in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.count()).map(|i| self.unrank(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference enumeration: recursive lexicographic generation.
    fn enumerate(k: usize, r: usize) -> Vec<Vec<usize>> {
        fn go(start: usize, k: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == r {
                out.push(cur.clone());
                return;
            }
            for c in start..k {
                cur.push(c);
                go(c + 1, k, r, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(0, k, r, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(4, 5), 0);
        assert_eq!(binomial(0, 0), 1);
        assert_eq!(binomial(30, 15), 155_117_520);
        assert_eq!(binomial(60, 30), 118_264_581_564_861_424);
    }

    #[test]
    fn matches_enumeration() {
        for k in 0..=9 {
            for r in 0..=k {
                let sr = SubsetRank::new(k, r);
                let all = enumerate(k, r);
                assert_eq!(all.len() as u64, sr.count());
                for (i, s) in all.iter().enumerate() {
                    assert_eq!(sr.rank(s), i as u64, "k={k} r={r} {s:?}");
                    assert_eq!(&sr.unrank(i as u64), s);
                }
            }
        }
    }

    #[test]
    fn three_subsets_of_four() {
        let sr = SubsetRank::new(4, 3);
        assert_eq!(sr.rank(&[0, 1, 2]), 0);
        assert_eq!(sr.rank(&[0, 1, 3]), 1);
        assert_eq!(sr.rank(&[0, 2, 3]), 2);
        assert_eq!(sr.rank(&[1, 2, 3]), 3);
    }

    #[test]
    fn large_ground_set() {
        let sr = SubsetRank::new(30, 15);
        let last: Vec<usize> = (15..30).collect();
        assert_eq!(sr.rank(&last), sr.count() - 1);
        assert_eq!(sr.unrank(sr.count() - 1), last);
        let mid = sr.unrank(77_777_777);
        assert_eq!(sr.rank(&mid), 77_777_777);
    }
}
