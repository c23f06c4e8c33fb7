use crate::action::ActionId;
use std::collections::{BTreeMap, BTreeSet};

/// A strict partial order over action ids, stored transitively closed.
///
/// Every constructor establishes the closure invariant, so `contains` is a
/// single set lookup and the size of the relation (`len`) counts the pairs of
/// the closure, not of whatever edge set the order was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderRelation {
    pairs: BTreeSet<(ActionId, ActionId)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("ordering constraints form a cycle through {through}")]
pub struct OrderCycle {
    pub through: ActionId,
}

impl OrderRelation {
    pub fn empty() -> Self {
        OrderRelation { pairs: BTreeSet::new() }
    }

    /// Transitively close `pairs`. Fails if the result would order some
    /// action before itself.
    pub fn from_pairs<I>(pairs: I) -> Result<Self, OrderCycle>
    where
        I: IntoIterator<Item = (ActionId, ActionId)>,
    {
        let pairs: BTreeSet<(ActionId, ActionId)> = pairs.into_iter().collect();

        let mut ids: BTreeSet<&ActionId> = BTreeSet::new();
        for (a, b) in &pairs {
            ids.insert(a);
            ids.insert(b);
        }
        let ids: Vec<&ActionId> = ids.into_iter().collect();
        let index: BTreeMap<&ActionId, usize> = ids.iter().enumerate().map(|(i, a)| (*a, i)).collect();

        let n = ids.len();
        let words = n.div_ceil(64);
        let mut row: Vec<Vec<u64>> = vec![vec![0u64; words]; n];
        for (a, b) in &pairs {
            let (i, j) = (index[a], index[b]);
            row[i][j / 64] |= 1 << (j % 64);
        }

        // Warshall: row[i] |= row[k] whenever i reaches k.
        for k in 0..n {
            for i in 0..n {
                if i != k && row[i][k / 64] >> (k % 64) & 1 == 1 {
                    let (rk, ri) = if i < k {
                        let (lo, hi) = row.split_at_mut(k);
                        (&hi[0], &mut lo[i])
                    } else {
                        let (lo, hi) = row.split_at_mut(i);
                        (&lo[k], &mut hi[0])
                    };
                    for w in 0..words {
                        ri[w] |= rk[w];
                    }
                }
            }
        }

        for (i, id) in ids.iter().enumerate() {
            if row[i][i / 64] >> (i % 64) & 1 == 1 {
                return Err(OrderCycle { through: (*id).clone() });
            }
        }

        let mut closed = BTreeSet::new();
        for i in 0..n {
            for j in 0..n {
                if row[i][j / 64] >> (j % 64) & 1 == 1 {
                    closed.insert((ids[i].clone(), ids[j].clone()));
                }
            }
        }
        Ok(OrderRelation { pairs: closed })
    }

    /// The total order putting `ids` in the given sequence.
    pub fn chain(ids: &[ActionId]) -> Self {
        let mut pairs = BTreeSet::new();
        for i in 0..ids.len() {
            for j in i + 1..ids.len() {
                pairs.insert((ids[i].clone(), ids[j].clone()));
            }
        }
        OrderRelation { pairs }
    }

    /// Wrap a pair set already known to be transitively closed and acyclic.
    pub(crate) fn from_closed_unchecked(pairs: BTreeSet<(ActionId, ActionId)>) -> Self {
        OrderRelation { pairs }
    }

    pub fn contains(&self, a: &ActionId, b: &ActionId) -> bool {
        self.pairs.contains(&(a.clone(), b.clone()))
    }

    pub fn contains_pair(&self, pair: &(ActionId, ActionId)) -> bool {
        self.pairs.contains(pair)
    }

    /// Number of pairs in the transitive closure.
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(ActionId, ActionId)> {
        self.pairs.iter()
    }

    pub fn pairs(&self) -> &BTreeSet<(ActionId, ActionId)> {
        &self.pairs
    }

    /// The transitive reduction: pairs (a, b) with no c strictly between.
    /// For a finite strict order this is the unique minimal edge set whose
    /// closure is `self`.
    pub fn reduction(&self) -> BTreeSet<(ActionId, ActionId)> {
        self.pairs
            .iter()
            .filter(|(a, b)| {
                // (a, b) is redundant iff some c has a ≺ c ≺ b.
                !self
                    .pairs
                    .iter()
                    .any(|(x, c)| x == a && c != b && self.pairs.contains(&(c.clone(), b.clone())))
            })
            .cloned()
            .collect()
    }

    /// Remove one pair. Sound only for reduction edges: removing a pair with
    /// nothing strictly between keeps the relation transitively closed.
    pub fn without_pair(&self, pair: &(ActionId, ActionId)) -> OrderRelation {
        debug_assert!(self.reduction().contains(pair), "only reduction edges may be dropped");
        let mut pairs = self.pairs.clone();
        pairs.remove(pair);
        OrderRelation { pairs }
    }

    /// The induced order on `keep`.
    pub fn restrict(&self, keep: &BTreeSet<ActionId>) -> OrderRelation {
        let pairs = self
            .pairs
            .iter()
            .filter(|(a, b)| keep.contains(a) && keep.contains(b))
            .cloned()
            .collect();
        OrderRelation { pairs }
    }

    /// Does `self` contain every pair of `other`?
    pub fn refines(&self, other: &OrderRelation) -> bool {
        other.pairs.is_subset(&self.pairs)
    }

    /// All ids mentioned by some pair.
    pub fn mentioned(&self) -> BTreeSet<ActionId> {
        let mut ids = BTreeSet::new();
        for (a, b) in &self.pairs {
            ids.insert(a.clone());
            ids.insert(b.clone());
        }
        ids
    }
}
