//! Multisets of index symbols.
//!
//! The representation is a map from symbol to positive count; a count of zero
//! is never stored, so equality and hashing are canonical (explicit zero and
//! absence cannot be distinguished).

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MultisetError {
    /// Subtraction would drive some count negative.
    #[error("not a sub-multiset: {0}")]
    NotSubMultiset(String),
    /// A nonempty multiset cannot be distributed over zero targets.
    #[error("cannot distribute nonempty multiset over zero targets")]
    EmptyDistributionTarget,
}

/// A multiset over index symbols. Counts are nonnegative; zero counts are
/// not stored.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexMultiset {
    counts: BTreeMap<String, u32>,
}

impl IndexMultiset {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Build from (symbol, count) pairs. Zero counts are dropped; repeated
    /// symbols accumulate.
    pub fn from_counts<S, I>(pairs: I) -> Self
    where
        S: Into<String>,
        I: IntoIterator<Item = (S, u32)>,
    {
        let mut counts = BTreeMap::new();
        for (sym, n) in pairs {
            if n > 0 {
                *counts.entry(sym.into()).or_insert(0) += n;
            }
        }
        IndexMultiset { counts }
    }

    /// Build from a sequence of symbols, each contributing one occurrence.
    pub fn from_symbols<S, I>(symbols: I) -> Self
    where
        S: Into<String>,
        I: IntoIterator<Item = S>,
    {
        Self::from_counts(symbols.into_iter().map(|s| (s, 1)))
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn count(&self, symbol: &str) -> u32 {
        self.counts.get(symbol).copied().unwrap_or(0)
    }

    /// Total number of occurrences across all symbols.
    pub fn total(&self) -> u32 {
        self.counts.values().sum()
    }

    /// Number of distinct symbols present.
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    /// (symbol, count) pairs in symbol order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, u32)> {
        self.counts.iter().map(|(s, &n)| (s.as_str(), n))
    }

    /// Symbols with repetition, in symbol order: `{f:2, g:1}` yields f, f, g.
    pub fn expanded(&self) -> Vec<&str> {
        let mut out = Vec::with_capacity(self.total() as usize);
        for (s, &n) in &self.counts {
            for _ in 0..n {
                out.push(s.as_str());
            }
        }
        out
    }

    /// Multiset sum: per-symbol counts add.
    pub fn plus(&self, other: &IndexMultiset) -> IndexMultiset {
        let mut counts = self.counts.clone();
        for (s, &n) in &other.counts {
            *counts.entry(s.clone()).or_insert(0) += n;
        }
        IndexMultiset { counts }
    }

    /// Multiset difference. Errors unless `other` is contained in `self`.
    pub fn minus(&self, other: &IndexMultiset) -> Result<IndexMultiset, MultisetError> {
        let mut counts = self.counts.clone();
        for (s, &n) in &other.counts {
            let have = counts.get(s).copied().unwrap_or(0);
            if have < n {
                return Err(MultisetError::NotSubMultiset(s.clone()));
            }
            if have == n {
                counts.remove(s);
            } else {
                counts.insert(s.clone(), have - n);
            }
        }
        Ok(IndexMultiset { counts })
    }

    /// True iff `other` is contained in `self` (pointwise counts).
    pub fn contains(&self, other: &IndexMultiset) -> bool {
        other.counts.iter().all(|(s, &n)| self.count(s) >= n)
    }

    /// All ways of splitting `self` into an ordered sequence of `n` multisets
    /// whose sum is `self`. The result has exactly
    /// `prod_k C(m_k + n - 1, n - 1)` elements, where `m_k` ranges over the
    /// per-symbol counts, and is in a deterministic order.
    ///
    /// `n == 0` is valid only for the empty multiset, where the sole
    /// distribution is the empty sequence.
    pub fn distributions(&self, n: usize) -> Result<Vec<Vec<IndexMultiset>>, MultisetError> {
        if n == 0 {
            return if self.is_empty() {
                Ok(vec![Vec::new()])
            } else {
                Err(MultisetError::EmptyDistributionTarget)
            };
        }
        let mut result: Vec<Vec<IndexMultiset>> = vec![vec![IndexMultiset::empty(); n]];
        for (sym, &count) in &self.counts {
            let splits = compositions(count, n);
            let mut next = Vec::with_capacity(result.len() * splits.len());
            for base in &result {
                for split in &splits {
                    let mut dist = base.clone();
                    for (share, &k) in dist.iter_mut().zip(split.iter()) {
                        if k > 0 {
                            share.counts.insert(sym.clone(), k);
                        }
                    }
                    next.push(dist);
                }
            }
            result = next;
        }
        Ok(result)
    }
}

/// All ways of writing `total` as an ordered sum of `n` nonnegative parts.
fn compositions(total: u32, n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; n];
    fn rec(remaining: u32, pos: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == current.len() - 1 {
            current[pos] = remaining;
            out.push(current.clone());
            return;
        }
        for k in 0..=remaining {
            current[pos] = k;
            rec(remaining - k, pos + 1, current, out);
        }
    }
    rec(total, 0, &mut current, &mut out);
    out
}

impl fmt::Debug for IndexMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for (s, n) in self.entries() {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            if n == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}:{n}")?;
            }
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(pairs: &[(&str, u32)]) -> IndexMultiset {
        IndexMultiset::from_counts(pairs.iter().map(|&(s, n)| (s, n)))
    }

    #[test]
    fn zero_counts_are_not_stored() {
        let a = ms(&[("sa", 1), ("sb", 0)]);
        let b = ms(&[("sa", 1)]);
        assert_eq!(a, b);
        assert_eq!(a.distinct(), 1);
    }

    #[test]
    fn plus_adds_counts() {
        let a = ms(&[("sa", 1)]);
        let b = ms(&[("sa", 1), ("sb", 1)]);
        assert_eq!(a.plus(&b), ms(&[("sa", 2), ("sb", 1)]));
    }

    #[test]
    fn plus_with_empty_is_identity() {
        let a = ms(&[("sa", 2), ("sc", 1)]);
        assert_eq!(a.plus(&IndexMultiset::empty()), a);
        assert_eq!(IndexMultiset::empty().plus(&a), a);
    }

    #[test]
    fn minus_removes_counts() {
        let a = ms(&[("sa", 2), ("sb", 1)]);
        assert_eq!(a.minus(&ms(&[("sa", 1)])).unwrap(), ms(&[("sa", 1), ("sb", 1)]));
        assert_eq!(a.minus(&a).unwrap(), IndexMultiset::empty());
    }

    #[test]
    fn minus_rejects_non_submultiset() {
        let a = ms(&[("sa", 1)]);
        assert_eq!(
            a.minus(&ms(&[("sb", 1)])),
            Err(MultisetError::NotSubMultiset("sb".into()))
        );
        assert_eq!(
            a.minus(&ms(&[("sa", 2)])),
            Err(MultisetError::NotSubMultiset("sa".into()))
        );
    }

    #[test]
    fn contains_is_pointwise() {
        let a = ms(&[("sa", 2), ("sb", 1)]);
        assert!(a.contains(&ms(&[("sa", 1)])));
        assert!(a.contains(&a));
        assert!(a.contains(&IndexMultiset::empty()));
        assert!(!a.contains(&ms(&[("sa", 3)])));
        assert!(!a.contains(&ms(&[("sc", 1)])));
    }

    #[test]
    fn distributions_of_f2_over_two() {
        let m = ms(&[("f", 2)]);
        let dists = m.distributions(2).unwrap();
        assert_eq!(dists.len(), 3);
        assert!(dists.contains(&vec![ms(&[("f", 2)]), IndexMultiset::empty()]));
        assert!(dists.contains(&vec![ms(&[("f", 1)]), ms(&[("f", 1)])]));
        assert!(dists.contains(&vec![IndexMultiset::empty(), ms(&[("f", 2)])]));
    }

    #[test]
    fn distributions_of_two_symbols_over_two() {
        let m = ms(&[("f", 1), ("g", 1)]);
        let dists = m.distributions(2).unwrap();
        assert_eq!(dists.len(), 4);
    }

    #[test]
    fn distributions_over_zero_targets() {
        assert_eq!(
            IndexMultiset::empty().distributions(0).unwrap(),
            vec![Vec::new()]
        );
        assert_eq!(
            ms(&[("f", 1)]).distributions(0),
            Err(MultisetError::EmptyDistributionTarget)
        );
    }

    #[test]
    fn distributions_sum_back_to_original() {
        let m = ms(&[("f", 2), ("g", 1)]);
        for dist in m.distributions(3).unwrap() {
            let sum = dist
                .iter()
                .fold(IndexMultiset::empty(), |acc, share| acc.plus(share));
            assert_eq!(sum, m);
        }
    }

    #[test]
    fn expanded_is_sorted_with_repeats() {
        let m = ms(&[("sb", 1), ("sa", 2)]);
        assert_eq!(m.expanded(), vec!["sa", "sa", "sb"]);
    }
}
