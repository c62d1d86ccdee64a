use std::fmt;

use serde::{Deserialize, Serialize};

/// Largest node label a [`NodeSubset`] can hold.
pub const MAX_NODES: usize = 63;

/// A set of node labels `1..=63`, stored as a bitmask where bit `i` stands for node `i`.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeSubset(u64);

impl NodeSubset {
    pub const EMPTY: NodeSubset = NodeSubset(0);

    #[inline]
    pub const fn from_bits(bits: u64) -> Self {
        NodeSubset(bits & !1)
    }

    #[inline]
    pub const fn bits(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn singleton(node: usize) -> Self {
        debug_assert!((1..=MAX_NODES).contains(&node));
        NodeSubset(1 << node)
    }

    pub fn from_nodes<I: IntoIterator<Item = usize>>(nodes: I) -> Self {
        nodes
            .into_iter()
            .fold(Self::EMPTY, |acc, n| acc | Self::singleton(n))
    }

    #[inline]
    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub const fn len(self) -> u32 {
        self.0.count_ones()
    }

    #[inline]
    pub const fn contains(self, node: usize) -> bool {
        node <= MAX_NODES && self.0 & (1 << node) != 0
    }

    #[inline]
    pub fn insert(&mut self, node: usize) {
        *self |= Self::singleton(node);
    }

    #[inline]
    pub fn remove(&mut self, node: usize) {
        self.0 &= !(1 << node);
    }

    #[inline]
    pub const fn without(self, node: usize) -> Self {
        NodeSubset(self.0 & !(1 << node))
    }

    #[inline]
    pub const fn is_subset(self, other: NodeSubset) -> bool {
        self.0 & !other.0 == 0
    }

    /// Smallest node label in the set.
    #[inline]
    pub const fn first(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    pub fn iter(self) -> Nodes {
        Nodes(self.0)
    }
}

impl std::ops::BitOr for NodeSubset {
    type Output = NodeSubset;
    #[inline]
    fn bitor(self, rhs: Self) -> Self {
        NodeSubset(self.0 | rhs.0)
    }
}

impl std::ops::BitOrAssign for NodeSubset {
    #[inline]
    fn bitor_assign(&mut self, rhs: Self) {
        self.0 |= rhs.0;
    }
}

impl std::ops::BitAnd for NodeSubset {
    type Output = NodeSubset;
    #[inline]
    fn bitand(self, rhs: Self) -> Self {
        NodeSubset(self.0 & rhs.0)
    }
}

impl std::ops::Sub for NodeSubset {
    type Output = NodeSubset;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        NodeSubset(self.0 & !rhs.0)
    }
}

impl FromIterator<usize> for NodeSubset {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self::from_nodes(iter)
    }
}

impl IntoIterator for NodeSubset {
    type Item = usize;
    type IntoIter = Nodes;
    fn into_iter(self) -> Nodes {
        self.iter()
    }
}

/// Ascending iterator over the members of a [`NodeSubset`].
#[derive(Clone, Debug)]
pub struct Nodes(u64);

impl Iterator for Nodes {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let node = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(node)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Nodes {}

impl fmt::Display for NodeSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, node) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{node}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for NodeSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_algebra() {
        let a = NodeSubset::from_nodes([2, 3]);
        let b = NodeSubset::from_nodes([3, 4]);
        assert_eq!(a | b, NodeSubset::from_nodes([2, 3, 4]));
        assert_eq!(a & b, NodeSubset::singleton(3));
        assert_eq!(a - b, NodeSubset::singleton(2));
        assert!(NodeSubset::singleton(3).is_subset(a));
        assert!(!b.is_subset(a));
        assert_eq!(b.first(), Some(3));
        assert_eq!(NodeSubset::EMPTY.first(), None);
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![2, 3]);
        assert_eq!(a.to_string(), "{2,3}");
        assert_eq!(NodeSubset::EMPTY.to_string(), "{}");
    }

    #[test]
    fn high_labels() {
        let s = NodeSubset::from_nodes([1, 63]);
        assert!(s.contains(63));
        assert!(!s.contains(64));
        assert_eq!(s.len(), 2);
        assert_eq!(s.without(63), NodeSubset::singleton(1));
    }
}
