use super::rng::RngStream;
use crate::error::{Error, Result};

/// Assignment of sample indices to K held-out folds, each with its held-in
/// (training) index set.
///
/// Held-out sets are disjoint and cover `0..n`; fold sizes differ by at most
/// one, with the first `n mod K` folds one larger. Held-in sets default to
/// the complement of the fold; the bootstrap variant replaces them with
/// random subsets of the full data set of the same size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldPartition {
    n: usize,
    heldout: Vec<Vec<usize>>,
    heldin: Vec<Vec<usize>>,
}

fn fold_sizes(n: usize, k: usize) -> impl Iterator<Item = usize> {
    (0..k).map(move |i| n / k + usize::from(i < n % k))
}

impl FoldPartition {
    /// Folds of consecutive indices, in order.
    pub fn contiguous(n: usize, k: usize) -> Result<Self> {
        Self::check(n, k)?;
        Ok(Self::from_order((0..n).collect(), k))
    }

    /// Folds over a uniformly shuffled index order.
    pub fn shuffled(n: usize, k: usize, rng: &mut RngStream) -> Result<Self> {
        Self::check(n, k)?;
        Ok(Self::from_order(rng.permutation(n), k))
    }

    /// Leave-one-out: `K = n`, fold `i` holds out index `i`.
    pub fn leave_one_out(n: usize) -> Result<Self> {
        Self::contiguous(n, n)
    }

    /// Build from explicit held-out sets; held-in sets are the complements.
    pub fn from_heldout(n: usize, heldout: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for fold in &heldout {
            for &i in fold {
                if i >= n || seen[i] {
                    return Err(Error::InvalidPartition(format!(
                        "index {i} out of range or held out twice"
                    )));
                }
                seen[i] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidPartition(
                "held-out sets do not cover every index".into(),
            ));
        }
        if heldout.len() < 2 || heldout.iter().any(|f| f.is_empty()) {
            return Err(Error::InvalidPartition("need at least two nonempty folds".into()));
        }
        let heldin = heldout.iter().map(|f| complement(n, f)).collect();
        Ok(Self { n, heldout, heldin })
    }

    fn check(n: usize, k: usize) -> Result<()> {
        if k < 2 {
            return Err(Error::InvalidPartition(format!("need K >= 2 folds, got {k}")));
        }
        if n < k {
            return Err(Error::InvalidPartition(format!(
                "need at least K = {k} samples, got {n}"
            )));
        }
        Ok(())
    }

    fn from_order(order: Vec<usize>, k: usize) -> Self {
        let n = order.len();
        let mut heldout = Vec::with_capacity(k);
        let mut start = 0;
        for size in fold_sizes(n, k) {
            let mut fold = order[start..start + size].to_vec();
            fold.sort_unstable();
            heldout.push(fold);
            start += size;
        }
        let heldin = heldout.iter().map(|f| complement(n, f)).collect();
        Self { n, heldout, heldin }
    }

    /// Replace every held-in set by a uniform random subset, drawn without
    /// replacement from all `n` indices, of size `n - m_k`.
    pub fn bootstrap_heldin(mut self, rng: &mut RngStream) -> Self {
        for k in 0..self.heldout.len() {
            let size = self.n - self.heldout[k].len();
            let mut set = rng.sample_without_replacement(self.n, size);
            set.sort_unstable();
            self.heldin[k] = set;
        }
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.heldout.len()
    }

    pub fn heldout(&self, k: usize) -> &[usize] {
        &self.heldout[k]
    }

    pub fn heldin(&self, k: usize) -> &[usize] {
        &self.heldin[k]
    }

    pub fn sizes_equal(&self) -> bool {
        self.heldout.iter().all(|f| f.len() == self.heldout[0].len())
    }
}

fn complement(n: usize, fold: &[usize]) -> Vec<usize> {
    let mut mask = vec![true; n];
    for &i in fold {
        mask[i] = false;
    }
    (0..n).filter(|&i| mask[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn assert_exact_cover(p: &FoldPartition) {
        let mut count = vec![0usize; p.n()];
        for k in 0..p.k() {
            for &i in p.heldout(k) {
                count[i] += 1;
            }
        }
        assert!(count.iter().all(|&c| c == 1));
        let sizes: Vec<usize> = (0..p.k()).map(|k| p.heldout(k).len()).collect();
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    }

    #[test]
    fn remainder_goes_to_first_folds() {
        let p = FoldPartition::contiguous(11, 4).unwrap();
        let sizes: Vec<usize> = (0..4).map(|k| p.heldout(k).len()).collect();
        assert_eq!(sizes, vec![3, 3, 3, 2]);
        assert_eq!(p.heldin(0), &[3, 4, 5, 6, 7, 8, 9, 10]);
    }

    #[test]
    fn leave_one_out_shape() {
        let p = FoldPartition::leave_one_out(5).unwrap();
        assert_eq!(p.k(), 5);
        for k in 0..5 {
            assert_eq!(p.heldout(k), &[k]);
            assert_eq!(p.heldin(k).len(), 4);
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(FoldPartition::contiguous(3, 4).is_err());
        assert!(FoldPartition::contiguous(3, 1).is_err());
        assert!(FoldPartition::from_heldout(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(FoldPartition::from_heldout(3, vec![vec![0], vec![1]]).is_err());
    }

    #[test]
    fn bootstrap_heldin_sizes_and_distinctness() {
        let mut rng = RngStream::new(3);
        let p = FoldPartition::shuffled(23, 5, &mut rng)
            .unwrap()
            .bootstrap_heldin(&mut rng);
        assert_exact_cover(&p);
        for k in 0..p.k() {
            let h = p.heldin(k);
            assert_eq!(h.len(), 23 - p.heldout(k).len());
            assert!(h.windows(2).all(|w| w[0] < w[1]));
        }
    }

    proptest! {
        #[test]
        fn shuffled_partitions_are_exact_covers(n in 2usize..200, k in 2usize..20, seed in any::<u64>()) {
            prop_assume!(k <= n);
            let p = FoldPartition::shuffled(n, k, &mut RngStream::new(seed)).unwrap();
            assert_exact_cover(&p);
            for f in 0..k {
                let mut all: Vec<usize> = p.heldin(f).iter().chain(p.heldout(f)).copied().collect();
                all.sort_unstable();
                prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
            }
        }
    }
}
