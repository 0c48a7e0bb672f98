//! Owner identities and fixed-width owner sets.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{BitAnd, BitOr};

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::{Error, Result};

/// Default cap on the number of owners in one scenario.
pub const DEFAULT_MAX_OWNERS: usize = 4096;

/// A data owner, identified by a dense index within its scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OwnerId(pub u32);

impl OwnerId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for OwnerId {
    fn from(i: usize) -> Self {
        OwnerId(i as u32)
    }
}

impl fmt::Display for OwnerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u{}", self.0)
    }
}

/// Checks a universe size against a cap.
pub fn check_universe(owners: usize, cap: usize) -> Result<()> {
    if owners > cap {
        return Err(Error::TooManyOwners { requested: owners, cap });
    }
    Ok(())
}

/// A set of owners drawn from a universe of `universe` owners, stored as a
/// bit-vector of `ceil(universe / 64)` words.
///
/// Sets over different universes never compare equal, and the checked
/// operations ([`OwnerSet::union`], [`OwnerSet::intersection`],
/// [`OwnerSet::is_subset`]) reject them. The `|` and `&` operators panic on a
/// mismatch instead.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct OwnerSet {
    universe: u32,
    words: SmallVec<[u64; 2]>,
}

impl OwnerSet {
    pub fn new(universe: usize) -> Self {
        let n = universe.div_ceil(64);
        OwnerSet { universe: universe as u32, words: SmallVec::from_elem(0, n) }
    }

    pub fn singleton(universe: usize, owner: OwnerId) -> Result<Self> {
        let mut s = Self::new(universe);
        s.insert(owner)?;
        Ok(s)
    }

    pub fn from_owners<I>(universe: usize, owners: I) -> Result<Self>
    where
        I: IntoIterator,
        I::Item: Into<OwnerId>,
    {
        let mut s = Self::new(universe);
        for o in owners {
            s.insert(o.into())?;
        }
        Ok(s)
    }

    /// The full universe.
    pub fn full(universe: usize) -> Self {
        let mut s = Self::new(universe);
        for (i, w) in s.words.iter_mut().enumerate() {
            let rem = universe - i * 64;
            *w = if rem >= 64 { u64::MAX } else { (1u64 << rem) - 1 };
        }
        s
    }

    #[inline]
    pub fn universe(&self) -> usize {
        self.universe as usize
    }

    pub fn insert(&mut self, owner: OwnerId) -> Result<bool> {
        let i = owner.index();
        if i >= self.universe() {
            return Err(Error::OwnerOutOfRange { owner: i, universe: self.universe() });
        }
        let (w, b) = (i / 64, 1u64 << (i % 64));
        let fresh = self.words[w] & b == 0;
        self.words[w] |= b;
        Ok(fresh)
    }

    pub fn remove(&mut self, owner: OwnerId) -> bool {
        let i = owner.index();
        if i >= self.universe() {
            return false;
        }
        let (w, b) = (i / 64, 1u64 << (i % 64));
        let had = self.words[w] & b != 0;
        self.words[w] &= !b;
        had
    }

    #[inline]
    pub fn contains(&self, owner: OwnerId) -> bool {
        let i = owner.index();
        i < self.universe() && self.words[i / 64] & (1u64 << (i % 64)) != 0
    }

    /// Number of members (popcount).
    #[inline]
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Members in ascending order.
    pub fn iter(&self) -> Iter<'_> {
        Iter { words: &self.words, word: 0, bits: self.words.first().copied().unwrap_or(0) }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.universe != other.universe {
            return Err(Error::UniverseMismatch { left: self.universe(), right: other.universe() });
        }
        Ok(())
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        out.union_with(other);
        Ok(out)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
        Ok(out)
    }

    /// `self ⊆ other`.
    pub fn is_subset(&self, other: &Self) -> Result<bool> {
        self.check(other)?;
        Ok(self.subset_of(other))
    }

    /// In-place union; both sets must share a universe.
    #[inline]
    pub(crate) fn union_with(&mut self, other: &Self) {
        debug_assert_eq!(self.universe, other.universe);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    #[inline]
    pub(crate) fn subset_of(&self, other: &Self) -> bool {
        debug_assert_eq!(self.universe, other.universe);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }
}

impl BitOr for &OwnerSet {
    type Output = OwnerSet;

    fn bitor(self, rhs: &OwnerSet) -> OwnerSet {
        self.union(rhs).expect("owner set universe mismatch")
    }
}

impl BitAnd for &OwnerSet {
    type Output = OwnerSet;

    fn bitand(self, rhs: &OwnerSet) -> OwnerSet {
        self.intersection(rhs).expect("owner set universe mismatch")
    }
}

/// Orders by universe, then lexicographically on the ascending member lists.
impl Ord for OwnerSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.universe.cmp(&other.universe).then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for OwnerSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for OwnerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for OwnerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, o) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{o}")?;
        }
        f.write_str("}")
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    word: usize,
    bits: u64,
}

impl Iterator for Iter<'_> {
    type Item = OwnerId;

    fn next(&mut self) -> Option<OwnerId> {
        loop {
            if self.bits != 0 {
                let tz = self.bits.trailing_zeros() as usize;
                self.bits &= self.bits - 1;
                return Some(OwnerId((self.word * 64 + tz) as u32));
            }
            self.word += 1;
            self.bits = *self.words.get(self.word)?;
        }
    }
}

impl<'a> IntoIterator for &'a OwnerSet {
    type Item = OwnerId;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}
