//! Membership in the monoid, its generators, enumeration and generator closure.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::points::PointSet;
use crate::transformation::PartialInjection;

/// The first clause of the four-condition membership test that fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "condition", content = "at")]
pub enum FailedCondition {
    /// Images not strictly increasing at the given (1-based) domain position.
    Order(usize),
    /// First domain point and its image differ in parity.
    Parity,
    /// A gap of 1 on one side is not matched by a gap of 1 on the other.
    Step1(usize),
    /// Gap parities differ between domain and image.
    Even(usize),
}

impl fmt::Display for FailedCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailedCondition::Order(i) => write!(f, "ORDER({i})"),
            FailedCondition::Parity => write!(f, "PARITY"),
            FailedCondition::Step1(i) => write!(f, "STEP1({i})"),
            FailedCondition::Even(i) => write!(f, "EVEN({i})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub is_member: bool,
    pub failed_condition: Option<FailedCondition>,
}

impl MembershipReport {
    fn from(failed: Option<FailedCondition>) -> Self {
        MembershipReport { is_member: failed.is_none(), failed_condition: failed }
    }
}

/// Membership via the gap conditions on the ordered domain d_1 < .. < d_p and images m_1 .. m_p.
pub fn is_member_prop1(f: &PartialInjection) -> MembershipReport {
    MembershipReport::from(first_failure(f))
}

fn first_failure(f: &PartialInjection) -> Option<FailedCondition> {
    let pairs: Vec<(i64, i64)> = f.pairs().map(|(a, b)| (a as i64, b as i64)).collect();
    if let Some(k) = pairs.windows(2).position(|w| w[1].1 <= w[0].1) {
        return Some(FailedCondition::Order(k + 1));
    }
    match pairs.first() {
        None => return None,
        Some(&(d1, m1)) if (d1 - m1).rem_euclid(2) != 0 => return Some(FailedCondition::Parity),
        _ => {}
    }
    for (k, w) in pairs.windows(2).enumerate() {
        let dg = w[1].0 - w[0].0;
        let mg = w[1].1 - w[0].1;
        if (dg == 1) != (mg == 1) {
            return Some(FailedCondition::Step1(k + 1));
        }
        if (dg % 2 == 0) != (mg % 2 == 0) {
            return Some(FailedCondition::Even(k + 1));
        }
    }
    None
}

/// x ≺ y in the fence 1 ≺ 2 ≻ 3 ≺ 4 ..: odd points lie below their neighbours.
fn fence_below(x: usize, y: usize) -> bool {
    x % 2 == 1 && x.abs_diff(y) == 1
}

/// x ≺ y implies f(x) ≺ f(y) on the domain.
pub fn is_fence_preserving(f: &PartialInjection) -> bool {
    let pairs: Vec<(usize, usize)> = f.pairs().collect();
    pairs.iter().all(|&(x, fx)| {
        pairs.iter().all(|&(y, fy)| !fence_below(x, y) || fence_below(fx, fy))
    })
}

/// Membership straight from the definitions: order-preserving, parity-preserving, and
/// regular among fence-preserving partial injections. For a partial injection the
/// latter means both it and its inverse preserve the fence.
pub fn is_member_direct(f: &PartialInjection) -> bool {
    let pairs: Vec<(usize, usize)> = f.pairs().collect();
    let order = pairs.iter().all(|&(x, fx)| pairs.iter().all(|&(y, fy)| !(x < y && fx > fy)));
    let parity = pairs.iter().all(|&(x, fx)| x % 2 == fx % 2);
    order && parity && is_fence_preserving(f) && is_fence_preserving(&f.inverse())
}

pub fn is_member(f: &PartialInjection) -> bool {
    first_failure(f).is_none()
}

/// The partial identity missing only point `i`.
pub fn gen_v(i: usize, n: usize) -> Result<PartialInjection> {
    if i == 0 || i > n {
        return Err(Error::OutOfRange { what: "v index", value: i, n });
    }
    let mut dom = PointSet::full(n);
    dom.remove(i);
    PartialInjection::partial_identity(dom, n)
}

/// Shifts 1..=i up by two, leaves i+1..=i+3 undefined and fixes the rest.
pub fn gen_u(i: usize, n: usize) -> Result<PartialInjection> {
    if i == 0 || i + 2 > n {
        return Err(Error::OutOfRange { what: "u index", value: i, n });
    }
    let images: Vec<Option<usize>> = (1..=n)
        .map(|k| {
            if k <= i {
                Some(k + 2)
            } else if k <= i + 3 {
                None
            } else {
                Some(k)
            }
        })
        .collect();
    PartialInjection::from_images(&images)
}

pub fn gen_x(i: usize, n: usize) -> Result<PartialInjection> {
    if i == 0 || i + 2 > n {
        return Err(Error::OutOfRange { what: "x index", value: i, n });
    }
    Ok(gen_u(i, n)?.inverse())
}

/// All generators: v_1..v_n, then u_1..u_{n-2}, then x_1..x_{n-2}.
pub fn generators(n: usize) -> Result<Vec<PartialInjection>> {
    let mut out = (1..=n).map(|i| gen_v(i, n)).collect::<Result<Vec<_>>>()?;
    for i in 1..=n.saturating_sub(2) {
        out.push(gen_u(i, n)?);
    }
    for i in 1..=n.saturating_sub(2) {
        out.push(gen_x(i, n)?);
    }
    Ok(out)
}

/// Every member for the given n, sorted by domain/image pairs.
pub fn enumerate_monoid(n: usize, limits: &Limits) -> Result<Vec<PartialInjection>> {
    limits.check(n)?;
    let mut out = Vec::new();
    for dom in PointSet::full(n).subsets() {
        let points: Vec<usize> = dom.iter().collect();
        let mut images = Vec::with_capacity(points.len());
        extend_images(&points, n, &mut images, &mut out)?;
    }
    sort_canonically(&mut out);
    Ok(out)
}

/// Extends a strictly increasing image tuple, pruning on the gap conditions as it goes.
fn extend_images(
    points: &[usize],
    n: usize,
    images: &mut Vec<usize>,
    out: &mut Vec<PartialInjection>,
) -> Result<()> {
    let k = images.len();
    if k == points.len() {
        let pairs: Vec<_> = points.iter().copied().zip(images.iter().copied()).collect();
        out.push(PartialInjection::from_pairs(n, &pairs)?);
        return Ok(());
    }
    let lo = images.last().map_or(1, |&m| m + 1);
    for m in lo..=n {
        let ok = match k {
            0 => points[0] % 2 == m % 2,
            _ => {
                let dg = points[k] - points[k - 1];
                let mg = m - images[k - 1];
                (dg == 1) == (mg == 1) && dg % 2 == mg % 2
            }
        };
        if ok {
            images.push(m);
            extend_images(points, n, images, out)?;
            images.pop();
        }
    }
    Ok(())
}

fn sort_canonically(v: &mut [PartialInjection]) {
    v.sort_by_cached_key(|f| f.pairs().collect::<Vec<_>>());
}

/// The submonoid generated by `generators` (always containing the identity).
pub fn closure(generators: &[PartialInjection], n: usize) -> Result<Vec<PartialInjection>> {
    if let Some(g) = generators.iter().find(|g| g.n() != n) {
        return Err(Error::DimensionMismatch { left: n, right: g.n() });
    }
    let id = PartialInjection::identity(n)?;
    let mut seen: HashSet<PartialInjection> = HashSet::from([id]);
    let mut queue = VecDeque::from([id]);
    while let Some(e) = queue.pop_front() {
        for g in generators {
            let h = e.compose(g)?;
            if seen.insert(h) {
                queue.push_back(h);
            }
        }
    }
    let mut out: Vec<_> = seen.into_iter().collect();
    sort_canonically(&mut out);
    Ok(out)
}
