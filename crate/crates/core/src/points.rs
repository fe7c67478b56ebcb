use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A subset of {1..32} stored as a bitmask, bit `i` for point `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PointSet(u32);

impl PointSet {
    pub const fn empty() -> Self {
        PointSet(0)
    }

    /// The closed range {a..b}; empty when `a > b`. Points below 1 are ignored.
    pub fn range(a: i64, b: i64) -> Self {
        let mut s = PointSet(0);
        let mut x = a.max(1);
        while x <= b && x <= 31 {
            s.0 |= 1 << x;
            x += 1;
        }
        s
    }

    pub fn full(n: usize) -> Self {
        Self::range(1, n as i64)
    }

    pub fn from_bits(bits: u32) -> Self {
        PointSet(bits & !1)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn contains(self, x: usize) -> bool {
        x < 32 && self.0 & (1 << x) != 0
    }

    pub fn insert(&mut self, x: usize) {
        assert!((1..32).contains(&x), "point {x} outside PointSet capacity");
        self.0 |= 1 << x;
    }

    pub fn remove(&mut self, x: usize) {
        if x < 32 {
            self.0 &= !(1 << x);
        }
    }

    pub fn union(self, other: Self) -> Self {
        PointSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        PointSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        PointSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn max(self) -> Option<usize> {
        (self.0 != 0).then(|| 31 - self.0.leading_zeros() as usize)
    }

    /// Points in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        (1..32).filter(move |&x| self.0 & (1 << x) != 0)
    }

    /// Every subset of `self`, in increasing bitmask order.
    pub fn subsets(self) -> impl Iterator<Item = PointSet> {
        let full = self.0;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full {
                None
            } else {
                Some((cur.wrapping_sub(full)) & full)
            };
            Some(PointSet(cur))
        })
    }
}

impl FromIterator<usize> for PointSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = PointSet::empty();
        for x in iter {
            s.insert(x);
        }
        s
    }
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, x) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for PointSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for PointSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        if let Some(bad) = v.iter().find(|&&x| !(1..32).contains(&x)) {
            return Err(serde::de::Error::custom(format!("point {bad} out of range")));
        }
        Ok(v.into_iter().collect())
    }
}
