//! Ground sets and subsets over a dense `0..n` universe.
//!
//! Element ids are dense integers so that set families can be enumerated
//! exhaustively with 64-bit masks at desk scale.

use std::cmp::Ordering;
use std::fmt;

use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::error::{Error, Result};

/// Largest supported universe. Masks are 64-bit; one bit is reserved so
/// `2^n` never overflows intermediate counters.
pub const MAX_UNIVERSE: usize = 63;

/// A finite ground set with elements `0..n` and optional display labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundSet {
    n: usize,
    labels: Option<Vec<String>>,
}

impl GroundSet {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_UNIVERSE {
            return Err(Error::UniverseTooLarge { size: n, max: MAX_UNIVERSE });
        }
        Ok(GroundSet { n, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        let mut gs = GroundSet::new(labels.len())?;
        gs.labels = Some(labels);
        Ok(gs)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Display label for an element; falls back to `e<id>`.
    pub fn label(&self, e: usize) -> String {
        match &self.labels {
            Some(l) if e < l.len() => l[e].clone(),
            _ => format!("e{e}"),
        }
    }

    pub fn empty_subset(&self) -> Subset {
        Subset::empty(self.n)
    }

    pub fn full_subset(&self) -> Subset {
        Subset::full(self.n)
    }
}

/// A subset of a ground set of size `n`, stored as a bitmask.
///
/// All binary operations require both operands to share the same universe
/// size; this is enforced with debug assertions on the hot paths and with
/// `Result`-returning constructors at the API boundary.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Subset {
    n: u8,
    mask: u64,
}

impl Subset {
    pub fn empty(n: usize) -> Subset {
        debug_assert!(n <= MAX_UNIVERSE);
        Subset { n: n as u8, mask: 0 }
    }

    pub fn full(n: usize) -> Subset {
        debug_assert!(n <= MAX_UNIVERSE);
        let mask = if n == 0 { 0 } else { (1u64 << n) - 1 };
        Subset { n: n as u8, mask }
    }

    pub fn singleton(n: usize, e: usize) -> Subset {
        let mut s = Subset::empty(n);
        s.insert(e);
        s
    }

    pub fn from_ids(n: usize, ids: &[usize]) -> Result<Subset> {
        if n > MAX_UNIVERSE {
            return Err(Error::UniverseTooLarge { size: n, max: MAX_UNIVERSE });
        }
        let mut s = Subset::empty(n);
        for &e in ids {
            if e >= n {
                return Err(Error::ElementOutsideUniverse { element: e, universe: n });
            }
            s.insert(e);
        }
        Ok(s)
    }

    pub fn from_mask(n: usize, mask: u64) -> Subset {
        debug_assert!(n <= MAX_UNIVERSE);
        debug_assert!(n == 64 || mask < (1u64 << n));
        Subset { n: n as u8, mask }
    }

    pub fn universe_len(&self) -> usize {
        self.n as usize
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, e: usize) -> bool {
        e < self.n as usize && self.mask & (1u64 << e) != 0
    }

    pub fn insert(&mut self, e: usize) {
        debug_assert!(e < self.n as usize);
        self.mask |= 1u64 << e;
    }

    pub fn remove(&mut self, e: usize) {
        self.mask &= !(1u64 << e);
    }

    pub fn with(mut self, e: usize) -> Subset {
        self.insert(e);
        self
    }

    pub fn without(mut self, e: usize) -> Subset {
        self.remove(e);
        self
    }

    pub fn union(&self, other: Subset) -> Subset {
        debug_assert_eq!(self.n, other.n);
        Subset { n: self.n, mask: self.mask | other.mask }
    }

    pub fn intersection(&self, other: Subset) -> Subset {
        debug_assert_eq!(self.n, other.n);
        Subset { n: self.n, mask: self.mask & other.mask }
    }

    pub fn difference(&self, other: Subset) -> Subset {
        debug_assert_eq!(self.n, other.n);
        Subset { n: self.n, mask: self.mask & !other.mask }
    }

    pub fn complement(&self) -> Subset {
        Subset::full(self.n as usize).difference(*self)
    }

    pub fn is_subset_of(&self, other: Subset) -> bool {
        debug_assert_eq!(self.n, other.n);
        self.mask & !other.mask == 0
    }

    pub fn is_disjoint(&self, other: Subset) -> bool {
        debug_assert_eq!(self.n, other.n);
        self.mask & other.mask == 0
    }

    /// Iterate member ids in ascending order.
    pub fn iter(&self) -> MemberIter {
        MemberIter { mask: self.mask }
    }

    pub fn ids(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn first(&self) -> Option<usize> {
        if self.mask == 0 {
            None
        } else {
            Some(self.mask.trailing_zeros() as usize)
        }
    }
}

/// Iterator over member ids of a subset, ascending.
pub struct MemberIter {
    mask: u64,
}

impl Iterator for MemberIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.mask == 0 {
            None
        } else {
            let e = self.mask.trailing_zeros() as usize;
            self.mask &= self.mask - 1;
            Some(e)
        }
    }
}

/// All subsets of `base`, in ascending mask order (starts at the empty
/// set, ends at `base` itself).
pub fn subsets_of(base: Subset) -> SubsetIter {
    SubsetIter { base: base.mask, cur: 0, n: base.universe_len(), done: false }
}

pub struct SubsetIter {
    base: u64,
    cur: u64,
    n: usize,
    done: bool,
}

impl Iterator for SubsetIter {
    type Item = Subset;

    fn next(&mut self) -> Option<Subset> {
        if self.done {
            return None;
        }
        let out = Subset::from_mask(self.n, self.cur);
        if self.cur == self.base {
            self.done = true;
        } else {
            self.cur = (self.cur.wrapping_sub(self.base)) & self.base;
        }
        Some(out)
    }
}

/// All subsets of `base` with exactly `size` members, ascending mask order.
pub fn subsets_of_size(base: Subset, size: usize) -> Vec<Subset> {
    subsets_of(base).filter(|s| s.len() == size).collect()
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Subsets order by their sorted member lists, lexicographically, with a
/// strict prefix ordering before any extension. This is the tie-breaking
/// order used by the deterministic solvers.
impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        let mut a = self.mask;
        let mut b = other.mask;
        loop {
            match (a == 0, b == 0) {
                (true, true) => return self.n.cmp(&other.n),
                (true, false) => return Ordering::Less,
                (false, true) => return Ordering::Greater,
                (false, false) => {
                    let ea = a.trailing_zeros();
                    let eb = b.trailing_zeros();
                    if ea != eb {
                        return ea.cmp(&eb);
                    }
                    a &= a - 1;
                    b &= b - 1;
                }
            }
        }
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}/{}", self.n)
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

/// Subsets serialize as sorted id lists.
impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.len()))?;
        for e in self.iter() {
            seq.serialize_element(&e)?;
        }
        seq.end()
    }
}
