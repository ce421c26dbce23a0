//! Sets of residues modulo `p` with O(1) membership and sorted iteration.

use alloc::vec::Vec;

use thiserror::Error;

use crate::bits::Bits;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("residue {value} out of range for modulus {p}")]
pub struct ResidueRangeError {
    pub value: u64,
    pub p: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueSet {
    p: u64,
    members: Bits,
    sorted: Vec<u64>,
}

impl ResidueSet {
    pub fn empty(p: u64) -> Self {
        Self {
            p,
            members: Bits::new(p as usize),
            sorted: Vec::new(),
        }
    }

    pub fn full(p: u64) -> Self {
        Self {
            p,
            members: Bits::full(p as usize),
            sorted: (0..p).collect(),
        }
    }

    /// Builds a set from residues in `0..p`; duplicates collapse.
    pub fn from_residues<I>(p: u64, items: I) -> Result<Self, ResidueRangeError>
    where
        I: IntoIterator<Item = u64>,
    {
        let mut set = Self::empty(p);
        for v in items {
            if v >= p {
                return Err(ResidueRangeError { value: v, p });
            }
            set.members.set(v as usize);
        }
        set.sorted = set.members.iter().map(|v| v as u64).collect();
        Ok(set)
    }

    /// Builds a set from arbitrary integers, reducing each modulo `p`.
    pub fn from_integers<I>(p: u64, items: I) -> Self
    where
        I: IntoIterator<Item = i64>,
    {
        let mut set = Self::empty(p);
        for v in items {
            set.members.set(v.rem_euclid(p as i64) as usize);
        }
        set.sorted = set.members.iter().map(|v| v as u64).collect();
        set
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    #[inline]
    pub fn contains(&self, v: u64) -> bool {
        v < self.p && self.members.get(v as usize)
    }

    /// Returns `true` if the value was newly inserted.
    pub fn insert(&mut self, v: u64) -> bool {
        assert!(
            v < self.p,
            "residue {v} out of range for modulus {}",
            self.p
        );
        if self.members.get(v as usize) {
            return false;
        }
        self.members.set(v as usize);
        let pos = self.sorted.partition_point(|&x| x < v);
        self.sorted.insert(pos, v);
        true
    }

    /// Returns `true` if the value was present.
    pub fn remove(&mut self, v: u64) -> bool {
        if !self.contains(v) {
            return false;
        }
        self.members.clear(v as usize);
        let pos = self.sorted.partition_point(|&x| x < v);
        self.sorted.remove(pos);
        true
    }

    #[inline]
    pub fn as_slice(&self) -> &[u64] {
        &self.sorted
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.sorted.iter().copied()
    }

    pub fn bits(&self) -> &Bits {
        &self.members
    }

    /// The set with 0 removed, as used for Cayley generators.
    pub fn nonzero(&self) -> Vec<u64> {
        self.sorted.iter().copied().filter(|&v| v != 0).collect()
    }

    pub fn is_subset(&self, other: &ResidueSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }
}
