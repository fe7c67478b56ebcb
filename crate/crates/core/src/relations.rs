//! The relation schema, instantiated for a given n, and semantic verification of each instance.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transformation::PartialInjection;
use crate::word::{DroppingBuilder, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    E,
    L1,
    L2,
    L3,
    L4,
    L5,
    L6,
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    R9,
    R10,
    R11,
    R12,
    R13,
    R14,
    R15,
    R16,
    R17,
    R18,
    R19,
    Lem3i,
    Lem3ii,
}

impl Family {
    pub const ALL: [Family; 28] = [
        Family::E,
        Family::L1,
        Family::L2,
        Family::L3,
        Family::L4,
        Family::L5,
        Family::L6,
        Family::R1,
        Family::R2,
        Family::R3,
        Family::R4,
        Family::R5,
        Family::R6,
        Family::R7,
        Family::R8,
        Family::R9,
        Family::R10,
        Family::R11,
        Family::R12,
        Family::R13,
        Family::R14,
        Family::R15,
        Family::R16,
        Family::R17,
        Family::R18,
        Family::R19,
        Family::Lem3i,
        Family::Lem3ii,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Family::E => "E",
            Family::L1 => "L1",
            Family::L2 => "L2",
            Family::L3 => "L3",
            Family::L4 => "L4",
            Family::L5 => "L5",
            Family::L6 => "L6",
            Family::R1 => "R1",
            Family::R2 => "R2",
            Family::R3 => "R3",
            Family::R4 => "R4",
            Family::R5 => "R5",
            Family::R6 => "R6",
            Family::R7 => "R7",
            Family::R8 => "R8",
            Family::R9 => "R9",
            Family::R10 => "R10",
            Family::R11 => "R11",
            Family::R12 => "R12",
            Family::R13 => "R13",
            Family::R14 => "R14",
            Family::R15 => "R15",
            Family::R16 => "R16",
            Family::R17 => "R17",
            Family::R18 => "R18",
            Family::R19 => "R19",
            Family::Lem3i => "LEM3i",
            Family::Lem3ii => "LEM3ii",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.tag() == s)
            .ok_or_else(|| Error::Parse(format!("unknown relation family `{s}`")))
    }
}

/// u_{i_0} .. u_{i_l} x_{j_1} .. x_{j_{m+1}} with ascending u indices and descending x indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WtWord {
    pub u: Vec<u8>,
    pub x: Vec<u8>,
}

impl WtWord {
    pub fn l(&self) -> usize {
        self.u.len() - 1
    }

    pub fn m(&self) -> usize {
        self.x.len() - 1
    }

    pub fn i0(&self) -> usize {
        self.u[0] as usize
    }

    /// The last x index j_{m+1}.
    pub fn j_last(&self) -> usize {
        *self.x.last().expect("non-empty x part") as usize
    }

    /// Checks the index ranges, monotonicity and the no-gap-of-1-or-3 rule.
    pub fn is_valid(&self, n: usize) -> bool {
        if self.u.is_empty() || self.x.is_empty() || n < 3 {
            return false;
        }
        let in_range = |v: &[u8]| v.iter().all(|&i| i >= 1 && (i as usize) + 2 <= n);
        in_range(&self.u)
            && in_range(&self.x)
            && self.l() <= n - 2
            && self.m() <= n - 3
            && self.u.windows(2).all(|w| w[0] < w[1])
            && self.x.windows(2).all(|w| w[0] > w[1])
            && no_step_1_or_3(&self.u)
            && no_step_1_or_3(&self.x)
    }

    pub fn word(&self) -> Word {
        let mut b = DroppingBuilder::new(usize::MAX);
        for &i in &self.u {
            b = b.u(i as usize);
        }
        for &j in &self.x {
            b = b.x(j as usize);
        }
        b.build()
    }
}

/// No element equals another element plus 1 or plus 3.
fn no_step_1_or_3(s: &[u8]) -> bool {
    s.iter().all(|&k| !s.contains(&(k + 1)) && !s.contains(&(k + 3)))
}

impl fmt::Display for WtWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u8]| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "u={};x={}", join(&self.u), join(&self.x))
    }
}

/// All index sets in {1..=n-2} (ascending) satisfying the spacing rule.
fn spaced_sets(n: usize) -> Vec<Vec<u8>> {
    let top = n.saturating_sub(2);
    let mut out = Vec::new();
    for mask in 1u32..(1 << top) {
        let s: Vec<u8> = (1..=top as u8).filter(|&i| mask & (1 << (i - 1)) != 0).collect();
        if no_step_1_or_3(&s) {
            out.push(s);
        }
    }
    out.sort();
    out
}

/// Every W_t word for n, ordered by u part then x part.
pub fn enumerate_wt(n: usize) -> Vec<WtWord> {
    if n < 3 {
        return Vec::new();
    }
    let sets = spaced_sets(n);
    let mut out = Vec::new();
    for u in &sets {
        for x in &sets {
            let w = WtWord { u: u.clone(), x: x.iter().rev().copied().collect() };
            if w.is_valid(n) {
                out.push(w);
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Params {
    None,
    I(usize),
    IJ(usize, usize),
    Wt(WtWord),
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Params::None => Ok(()),
            Params::I(i) => write!(f, "i={i}"),
            Params::IJ(i, j) => write!(f, "i={i},j={j}"),
            Params::Wt(w) => write!(f, "{w}"),
        }
    }
}

/// One equation lhs = rhs of the schema, oriented as printed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelationInstance {
    pub family: Family,
    pub params: Params,
    pub lhs: Word,
    pub rhs: Word,
}

impl fmt::Display for RelationInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) ", self.family)?;
        if self.params != Params::None {
            write!(f, "{} ", self.params)?;
        }
        write!(f, ": {} = {}", self.lhs, self.rhs)
    }
}

struct Collector {
    n: usize,
    out: Vec<RelationInstance>,
}

impl Collector {
    fn b(&self) -> DroppingBuilder {
        DroppingBuilder::new(self.n)
    }

    fn add(&mut self, family: Family, params: Params, lhs: DroppingBuilder, rhs: DroppingBuilder) {
        let (lhs, rhs) = (lhs.build(), rhs.build());
        if lhs != rhs {
            self.out.push(RelationInstance { family, params, lhs, rhs });
        }
    }
}

fn u_block(b: DroppingBuilder, i: usize, j: usize) -> DroppingBuilder {
    (0..j).fold(b, |b, t| b.u(i + 2 * t))
}

/// x_{i,j}^{-1}: the x letters of the block in descending order.
fn x_block_inv(b: DroppingBuilder, i: usize, j: usize) -> DroppingBuilder {
    (0..j).rev().fold(b, |b, t| b.x(i + 2 * t))
}

/// Every instance of every family for n, with out-of-range v letters dropped.
pub fn instantiate_relations(n: usize) -> Vec<RelationInstance> {
    let mut c = Collector { n, out: Vec::new() };
    let top = n.saturating_sub(2);

    for i in 1..=top {
        for j in 1..=top {
            let lhs = c.b().x(i).u(j);
            let base = c.b().v(1).v(2);
            let rhs = match (i, j) {
                _ if i < j && (j - i == 2 || j - i == 3) => base.v_range(i + 3, j + 3),
                _ if i > j && (i - j == 2 || i - j == 3) => base.v_range(j + 3, i + 3),
                _ if i == j + 1 => base.v(j + 3).v(j + 4),
                _ if j == i + 1 => base.v(j + 2).v(j + 3),
                _ if i == j => base.v(i + 3),
                _ if j >= i + 4 => base.u(j).x(i + 2),
                _ => base.u(j + 2).x(i),
            };
            c.add(Family::E, Params::IJ(i, j), lhs, rhs);
        }
    }

    if top >= 2 {
        let chain = [
            c.b().u(2).u(1),
            c.b().u(1).u(2),
            c.b().x(1).x(2),
            c.b().x(2).x(1),
            c.b().u(2).u(2),
            c.b().x(2).x(2),
        ];
        for lhs in chain {
            c.add(Family::L1, Params::None, lhs, c.b().v_range(1, 5));
        }
    }
    if top >= 3 {
        for lhs in [c.b().u(3).u(2), c.b().x(2).x(3)] {
            c.add(Family::L2, Params::None, lhs, c.b().v_range(1, 6));
        }
    }
    for i in 3..=top {
        c.add(Family::L3, Params::I(i), c.b().u(i).u(1), c.b().v(1).v(2).u(i));
        c.add(Family::L3, Params::I(i), c.b().x(1).x(i), c.b().v(3).v(4).x(i));
    }
    for i in 4..=top {
        c.add(Family::L4, Params::I(i), c.b().u(i).u(2), c.b().v_range(1, 3).u(i));
        c.add(Family::L4, Params::I(i), c.b().x(2).x(i), c.b().v_range(3, 5).x(i));
        c.add(Family::L5, Params::I(i), c.b().u(i).u(i - 1), c.b().v(i + 3).u(i - 3).u(i - 1));
        c.add(Family::L5, Params::I(i), c.b().x(i - 1).x(i), c.b().v(i + 3).x(i - 1).x(i - 3));
    }
    for i in 1..=top {
        for j in 3..=i.saturating_sub(2) {
            c.add(Family::L6, Params::IJ(i, j), c.b().u(i).u(j), c.b().u(j - 2).u(i));
            c.add(Family::L6, Params::IJ(i, j), c.b().x(j).x(i), c.b().x(i).x(j - 2));
        }
    }

    for i in 1..=n {
        c.add(Family::R1, Params::I(i), c.b().v(i).v(i), c.b().v(i));
        for j in (1..=n).filter(|&j| j != i) {
            c.add(Family::R2, Params::IJ(i, j), c.b().v(i).v(j), c.b().v(j).v(i));
        }
    }
    for j in 1..=top {
        for i in j + 4..=n {
            c.add(Family::R3, Params::IJ(i, j), c.b().v(i).u(j), c.b().u(j).v(i));
            c.add(Family::R3, Params::IJ(i, j), c.b().v(i).x(j), c.b().x(j).v(i));
        }
        for i in 1..=j {
            c.add(Family::R4, Params::IJ(i, j), c.b().v(i).u(j), c.b().u(j).v(i + 2));
            c.add(Family::R4, Params::IJ(i, j), c.b().v(i + 2).x(j), c.b().x(j).v(i));
        }
        for i in [j + 1, j + 2, j + 3] {
            c.add(Family::R5, Params::IJ(i, j), c.b().v(i).u(j), c.b().u(j));
            c.add(Family::R5, Params::IJ(i, j), c.b().x(j).v(i), c.b().x(j));
        }
        for i in [1, 2, j + 3] {
            c.add(Family::R6, Params::IJ(i, j), c.b().u(j).v(i), c.b().u(j));
            c.add(Family::R6, Params::IJ(i, j), c.b().v(i).x(j), c.b().x(j));
        }
    }
    if top >= 1 {
        c.add(Family::R7, Params::None, c.b().u(1).u(1), c.b().v_range(1, 4));
        c.add(Family::R7, Params::None, c.b().x(1).x(1), c.b().v_range(1, 4));
    }
    for i in 3..=top {
        c.add(Family::R8, Params::I(i), c.b().u(i).u(i), c.b().u(i - 2).u(i));
        c.add(Family::R8, Params::I(i), c.b().x(i).x(i), c.b().x(i).x(i - 2));
    }
    for i in 2..=n.saturating_sub(5) {
        c.add(Family::R9, Params::I(i), c.b().u(i).u(i + 1), c.b().u(i - 1).u(i + 1));
        c.add(Family::R9, Params::I(i), c.b().x(i + 1).x(i), c.b().x(i + 1).x(i - 1));
    }
    for i in 1..=n.saturating_sub(5) {
        c.add(Family::R10, Params::I(i), c.b().u(i).u(i + 3), c.b().v(i + 6).u(i).u(i + 2));
        c.add(Family::R10, Params::I(i), c.b().x(i + 3).x(i), c.b().v(i + 6).x(i + 2).x(i));
    }

    for wt in enumerate_wt(n) {
        let (l, m) = (wt.l() as i64, wt.m() as i64);
        let i0 = wt.i0() as i64;
        let jl = wt.j_last() as i64;
        let w = wt.word();
        let full = |b: DroppingBuilder| b.word(&w);
        let rest = |b: DroppingBuilder| {
            let b = wt.u[1..].iter().fold(b, |b, &i| b.u(i as usize));
            wt.x[..wt.x.len() - 1].iter().fold(b, |b, &j| b.x(j as usize))
        };
        let all_u = |b: DroppingBuilder| wt.u.iter().fold(b, |b, &i| b.u(i as usize));
        let p = || Params::Wt(wt.clone());
        let i0u = wt.i0();
        if jl == i0 + 2 * l - 2 * m {
            c.add(Family::R11, p(), full(c.b()), rest(c.b().v_range(i0u + 1, i0u + 3)));
        }
        if jl == i0 + 2 * l - 2 * m - 1 {
            c.add(Family::R12, p(), full(c.b()), rest(c.b().v_range(i0u, i0u + 3)));
        }
        if jl == i0 + 2 * l - 2 * m + 1 {
            c.add(Family::R13, p(), full(c.b()), rest(c.b().v_range(i0u + 1, i0u + 4)));
        }
        if jl < 2 * l - 2 * m {
            let rhs = wt.x[..wt.x.len() - 1].iter().fold(all_u(c.b()), |b, &j| b.x(j as usize));
            c.add(Family::R14, p(), full(c.b()), rhs);
        }
        if i0 < 2 * m - 2 * l {
            let rhs = wt.x.iter().fold(
                wt.u[1..].iter().fold(c.b(), |b, &i| b.u(i as usize)),
                |b, &j| b.x(j as usize),
            );
            c.add(Family::R15, p(), full(c.b()), rhs);
        }
        if jl == 2 * l - 2 * m {
            let rhs = wt.x[..wt.x.len() - 1].iter().fold(all_u(c.b().v(1)), |b, &j| b.x(j as usize));
            c.add(Family::Lem3i, p(), full(c.b()), rhs);
        }
        if i0 == 2 * m - 2 * l {
            let rhs = wt.x.iter().fold(
                wt.u[1..].iter().fold(c.b().v(i0u + 3), |b, &i| b.u(i as usize)),
                |b, &j| b.x(j as usize),
            );
            c.add(Family::Lem3ii, p(), full(c.b()), rhs);
        }
    }

    for i in 1..=top {
        for j in 1..=(n - i) / 2 {
            let k = i + 2 * j - 2;
            let p = Params::IJ(i, j);
            c.add(Family::R16, p.clone(), u_block(c.b().v_range(1, i), i, j), c.b().v_range(1, k + 3));
            c.add(
                Family::R17,
                p.clone(),
                x_block_inv(c.b().v_range(k + 3 - i, k + 2), i, j),
                c.b().v_range(1, k + 3),
            );
            if i >= 2 {
                c.add(Family::R18, p.clone(), u_block(c.b().v(i), i, j), u_block(c.b().v(k + 3), i - 1, j));
                c.add(Family::R19, p, x_block_inv(c.b().v(k + 2), i, j), x_block_inv(c.b().v(k + 3), i - 1, j));
            }
        }
    }
    c.out
}

/// Outcome of checking one instance; evaluations are kept only on failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationCheck {
    pub instance: RelationInstance,
    pub ok: bool,
    pub lhs_eval: Option<PartialInjection>,
    pub rhs_eval: Option<PartialInjection>,
}

/// Does the instance hold as an equation between transformations?
pub fn verify_relation(r: &RelationInstance, n: usize) -> Result<RelationCheck> {
    let a = r.lhs.evaluate(n)?;
    let b = r.rhs.evaluate(n)?;
    let ok = a == b;
    Ok(RelationCheck {
        instance: r.clone(),
        ok,
        lhs_eval: (!ok).then_some(a),
        rhs_eval: (!ok).then_some(b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn find<'a>(rs: &'a [RelationInstance], fam: Family, lhs: &str) -> &'a RelationInstance {
        let lhs: Word = lhs.parse().unwrap();
        rs.iter().find(|r| r.family == fam && r.lhs == lhs).expect("instance present")
    }

    #[test]
    fn printed_examples() {
        let rs = instantiate_relations(6);
        assert_eq!(find(&rs, Family::R7, "u1 u1").rhs, "v1 v2 v3 v4".parse().unwrap());
        let r4 = find(&rs, Family::R4, "v1 u2");
        assert_eq!(r4.params, Params::IJ(1, 2));
        assert_eq!(r4.rhs, "u2 v3".parse().unwrap());
        let rs4 = instantiate_relations(4);
        assert_eq!(find(&rs4, Family::L1, "u2 u1").rhs, "v1 v2 v3 v4".parse().unwrap());
    }

    #[test]
    fn printed_equations_hold() {
        let rs8 = instantiate_relations(8);
        let r10 = find(&rs8, Family::R10, "u1 u4");
        assert_eq!(r10.rhs, "v7 u1 u3".parse().unwrap());
        assert!(verify_relation(r10, 8).unwrap().ok);
        let rs7 = instantiate_relations(7);
        let e = find(&rs7, Family::E, "x2 u2");
        assert_eq!(e.rhs, "v1 v2 v5".parse().unwrap());
        assert!(verify_relation(e, 7).unwrap().ok);
        for n in 1..=8 {
            for r in instantiate_relations(n).iter().filter(|r| r.family == Family::R1) {
                assert!(verify_relation(r, n).unwrap().ok);
            }
        }
    }

    #[test]
    fn small_n_has_only_v_families() {
        for n in 1..=2 {
            let rs = instantiate_relations(n);
            assert!(rs.iter().all(|r| matches!(r.family, Family::R1 | Family::R2)));
        }
        assert_eq!(instantiate_relations(1).len(), 1);
    }

    #[test]
    fn instances_are_nontrivial() {
        for n in 3..=8 {
            assert!(instantiate_relations(n).iter().all(|r| r.lhs != r.rhs));
        }
    }

    #[test]
    fn wt_examples() {
        let w5 = enumerate_wt(5);
        assert!(w5.iter().all(|w| w.u.iter().chain(&w.x).all(|&i| i <= 3)));
        assert!(w5.contains(&WtWord { u: vec![1], x: vec![1] }));
        assert!(!w5.iter().any(|w| w.u == vec![1, 2]));
        assert!(enumerate_wt(2).is_empty());
    }

    #[test]
    fn family_tags_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.tag().parse::<Family>().unwrap(), f);
        }
    }
}
