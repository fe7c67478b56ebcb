//! Partial injective maps on {1..n}.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::points::PointSet;

/// Largest ambient size a [`PartialInjection`] can hold.
pub const MAX_N: usize = 16;

/// A partial injection on {1..n}. Images are stored densely; 0 means undefined.
///
/// Maps act on the right, so in a product the left factor acts first.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialInjection {
    n: u8,
    map: [u8; MAX_N],
}

impl PartialInjection {
    fn check_n(n: usize) -> Result<()> {
        if n == 0 || n > MAX_N {
            return Err(Error::OutOfRange { what: "ambient size", value: n, n: MAX_N });
        }
        Ok(())
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::partial_identity(PointSet::full(n), n)
    }

    /// The empty map ε.
    pub fn empty(n: usize) -> Result<Self> {
        Self::check_n(n)?;
        Ok(PartialInjection { n: n as u8, map: [0; MAX_N] })
    }

    pub fn partial_identity(domain: PointSet, n: usize) -> Result<Self> {
        let mut f = Self::empty(n)?;
        for x in domain.iter() {
            if x > n {
                return Err(Error::OutOfRange { what: "domain point", value: x, n });
            }
            f.map[x - 1] = x as u8;
        }
        Ok(f)
    }

    /// Build from `(point, image)` pairs, rejecting duplicates and out-of-range values.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut f = Self::empty(n)?;
        let mut seen = PointSet::empty();
        for &(a, b) in pairs {
            for (what, v) in [("domain point", a), ("image point", b)] {
                if v == 0 || v > n {
                    return Err(Error::OutOfRange { what, value: v, n });
                }
            }
            if f.map[a - 1] != 0 {
                return Err(Error::Domain(format!("point {a} mapped twice")));
            }
            if seen.contains(b) {
                return Err(Error::Domain(format!("image {b} hit twice")));
            }
            seen.insert(b);
            f.map[a - 1] = b as u8;
        }
        Ok(f)
    }

    /// Parse pairs written as `1->3, 5->5`, optionally inside braces (the `Display` form).
    pub fn parse_pairs(n: usize, text: &str) -> Result<Self> {
        let body = text.trim().trim_start_matches('{').trim_end_matches('}');
        let mut pairs = Vec::new();
        for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let bad = || Error::Parse(format!("bad pair '{part}', expected a->b"));
            let (a, b) = part.split_once("->").ok_or_else(bad)?;
            pairs.push((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?));
        }
        Self::from_pairs(n, &pairs)
    }

    /// Build from a dense image list; `images[k]` is the image of `k + 1`.
    pub fn from_images(images: &[Option<usize>]) -> Result<Self> {
        let pairs: Vec<_> = images
            .iter()
            .enumerate()
            .filter_map(|(k, im)| im.map(|b| (k + 1, b)))
            .collect();
        Self::from_pairs(images.len(), &pairs)
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn image(&self, x: usize) -> Option<usize> {
        if x == 0 || x > self.n() {
            return None;
        }
        match self.map[x - 1] {
            0 => None,
            b => Some(b as usize),
        }
    }

    /// Domain points with their images, ascending by point.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..=self.n()).filter_map(|x| self.image(x).map(|b| (x, b)))
    }

    pub fn domain(&self) -> PointSet {
        self.pairs().map(|(a, _)| a).collect()
    }

    pub fn image_set(&self) -> PointSet {
        self.pairs().map(|(_, b)| b).collect()
    }

    pub fn rank(&self) -> usize {
        self.map[..self.n()].iter().filter(|&&b| b != 0).count()
    }

    pub fn is_empty_map(&self) -> bool {
        self.rank() == 0
    }

    /// `self` first, then `other`: x ↦ other(self(x)).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { left: self.n(), right: other.n() });
        }
        let mut out = Self::empty(self.n())?;
        for k in 0..self.n() {
            let a = self.map[k];
            if a != 0 {
                out.map[k] = other.map[a as usize - 1];
            }
        }
        Ok(out)
    }

    pub fn inverse(&self) -> Self {
        let mut out = PartialInjection { n: self.n, map: [0; MAX_N] };
        for (a, b) in self.pairs() {
            out.map[b - 1] = a as u8;
        }
        out
    }

    /// Remove the given points from the domain.
    pub fn restrict_away(&self, points: PointSet) -> Self {
        let mut out = *self;
        for x in points.iter().filter(|&x| x <= self.n()) {
            out.map[x - 1] = 0;
        }
        out
    }

    /// Every partial injection on {1..n}, ordered by domain subset then image tuple.
    pub fn all(n: usize) -> Result<Vec<Self>> {
        Self::check_n(n)?;
        let mut out = Vec::new();
        for dom in PointSet::full(n).subsets() {
            let points: Vec<usize> = dom.iter().collect();
            let mut f = Self::empty(n)?;
            let mut used = PointSet::empty();
            all_rec(&points, 0, n, &mut f, &mut used, &mut out);
        }
        Ok(out)
    }
}

fn all_rec(
    points: &[usize],
    k: usize,
    n: usize,
    f: &mut PartialInjection,
    used: &mut PointSet,
    out: &mut Vec<PartialInjection>,
) {
    if k == points.len() {
        out.push(*f);
        return;
    }
    for b in 1..=n {
        if !used.contains(b) {
            used.insert(b);
            f.map[points[k] - 1] = b as u8;
            all_rec(points, k + 1, n, f, used, out);
            f.map[points[k] - 1] = 0;
            used.remove(b);
        }
    }
}

impl fmt::Debug for PartialInjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PartialInjection(n={}, {})", self.n, self)
    }
}

impl fmt::Display for PartialInjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, (a, b)) in self.pairs().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}->{b}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Serialize, Deserialize)]
struct Repr {
    n: usize,
    map: Vec<(usize, usize)>,
}

impl Serialize for PartialInjection {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        Repr { n: self.n(), map: self.pairs().collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PartialInjection {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = Repr::deserialize(d)?;
        if r.map.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(serde::de::Error::custom("map pairs must be sorted by domain point"));
        }
        PartialInjection::from_pairs(r.n, &r.map).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pi(n: usize, pairs: &[(usize, usize)]) -> PartialInjection {
        PartialInjection::from_pairs(n, pairs).unwrap()
    }

    #[test]
    fn parse_pairs_reads_display() {
        let f = PartialInjection::from_pairs(6, &[(1, 3), (5, 5)]).unwrap();
        assert_eq!(PartialInjection::parse_pairs(6, &f.to_string()).unwrap(), f);
        assert_eq!(PartialInjection::parse_pairs(6, "1->3,5->5").unwrap(), f);
        assert!(PartialInjection::parse_pairs(6, "").unwrap().is_empty_map());
        assert!(matches!(PartialInjection::parse_pairs(6, "1-3"), Err(Error::Parse(_))));
    }

    #[test]
    fn compose_left_acts_first() {
        let f = pi(3, &[(1, 2)]);
        let g = pi(3, &[(2, 3)]);
        assert_eq!(f.compose(&g).unwrap(), pi(3, &[(1, 3)]));
        assert!(g.compose(&f).unwrap().is_empty_map());
    }

    #[test]
    fn compose_rejects_mismatched_n() {
        let e = PartialInjection::identity(3).unwrap().compose(&PartialInjection::identity(4).unwrap());
        assert_eq!(e, Err(Error::DimensionMismatch { left: 3, right: 4 }));
    }

    #[test]
    fn empty_absorbs() {
        let e = PartialInjection::empty(4).unwrap();
        for f in PartialInjection::all(4).unwrap() {
            assert_eq!(e.compose(&f).unwrap(), e);
            assert_eq!(f.compose(&e).unwrap(), e);
        }
    }

    #[test]
    fn inverse_of_shift() {
        // points 1,2 move up by two; 6 is fixed
        let f = pi(6, &[(1, 3), (2, 4), (6, 6)]);
        assert_eq!(f.inverse(), pi(6, &[(3, 1), (4, 2), (6, 6)]));
        assert_eq!(f.inverse().inverse(), f);
    }

    #[test]
    fn partial_identities() {
        let d: PointSet = [1, 2, 4, 5, 6].into_iter().collect();
        let v3 = PartialInjection::partial_identity(d, 6).unwrap();
        assert_eq!(v3.image(3), None);
        assert_eq!(v3.image(4), Some(4));
        assert!(PartialInjection::partial_identity(PointSet::empty(), 5).unwrap().is_empty_map());
        assert_eq!(
            PartialInjection::partial_identity(PointSet::full(5), 5).unwrap(),
            PartialInjection::identity(5).unwrap()
        );
        let bad = PartialInjection::partial_identity([7].into_iter().collect(), 6);
        assert!(matches!(bad, Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn from_pairs_rejects_non_injective() {
        assert!(PartialInjection::from_pairs(3, &[(1, 2), (3, 2)]).is_err());
        assert!(PartialInjection::from_pairs(3, &[(1, 4)]).is_err());
    }

    #[test]
    fn json_is_bit_exact() {
        let text = r#"{"n":6,"map":[[1,3],[5,5],[6,6]]}"#;
        let f: PartialInjection = serde_json::from_str(text).unwrap();
        assert_eq!(f, pi(6, &[(1, 3), (5, 5), (6, 6)]));
        assert_eq!(serde_json::to_string(&f).unwrap(), text);
        assert!(serde_json::from_str::<PartialInjection>(r#"{"n":6,"map":[[5,5],[1,3]]}"#).is_err());
    }

    fn closed_form(n: usize) -> usize {
        let binom = |n: usize, k: usize| (0..k).fold(1usize, |acc, t| acc * (n - t) / (t + 1));
        let fact = |k: usize| (1..=k).product::<usize>();
        (0..=n).map(|k| binom(n, k) * binom(n, k) * fact(k)).sum()
    }

    #[test]
    fn enumeration_matches_closed_form() {
        assert_eq!(PartialInjection::all(2).unwrap().len(), 7);
        for n in 1..=6 {
            assert_eq!(PartialInjection::all(n).unwrap().len(), closed_form(n), "n={n}");
        }
        assert_eq!(closed_form(6), 13327);
    }

    #[test]
    fn associativity_exhaustive_n3() {
        let all = PartialInjection::all(3).unwrap();
        for f in &all {
            for g in &all {
                let fg = f.compose(g).unwrap();
                for h in &all {
                    assert_eq!(fg.compose(h).unwrap(), f.compose(&g.compose(h).unwrap()).unwrap());
                }
            }
        }
    }

    #[test]
    fn regular_identity_exhaustive_n4() {
        for f in PartialInjection::all(4).unwrap() {
            let ff = f.compose(&f.inverse()).unwrap().compose(&f).unwrap();
            assert_eq!(ff, f);
        }
    }
}
