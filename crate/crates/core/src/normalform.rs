//! Block sequences, the spacing conditions of Q_0, admissible v-sets and the normal-form set W_n.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::points::PointSet;
use crate::word::{parse_blocks, Block, BlockKind, Letter, LetterKind, Word};

/// The pair (k_u, k_x) attached to block k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Indicator {
    pub u: i64,
    pub x: i64,
}

/// A sequence of blocks w_1 .. w_m.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BlockSequence {
    pub blocks: Vec<Block>,
}

impl BlockSequence {
    pub fn new(blocks: Vec<Block>) -> Self {
        BlockSequence { blocks }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Letter counts (u, x) of the blocks after position `k` (0-based).
    pub fn suffix_counts(&self, k: usize) -> (i64, i64) {
        self.blocks[k + 1..].iter().fold((0, 0), |(u, x), b| match b.kind {
            BlockKind::U => (u + b.len() as i64, x),
            BlockKind::X => (u, x + b.len() as i64),
        })
    }

    pub fn indicators(&self) -> Vec<Indicator> {
        (0..self.blocks.len()).map(|k| indicator_of(&self.blocks[k], self.suffix_counts(k))).collect()
    }

    /// u blocks in order, then the x letters of all x blocks in descending order.
    pub fn star(&self) -> Word {
        let mut us = Vec::new();
        let mut xs = Vec::new();
        for b in &self.blocks {
            let target = if b.kind == BlockKind::U { &mut us } else { &mut xs };
            target.extend_from_slice(b.expand().letters());
        }
        us.extend(xs.into_iter().rev());
        Word::new(us)
    }
}

fn indicator_of(b: &Block, (wu, wx): (i64, i64)) -> Indicator {
    let (i, j) = (b.start() as i64, b.len() as i64);
    match b.kind {
        BlockKind::U => Indicator { u: i, x: i + 2 * j + 2 * wu - 2 * wx },
        BlockKind::X => Indicator { u: i + 2 * j - 2 * wu + 2 * wx, x: i },
    }
}

impl fmt::Display for BlockSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.blocks.iter().map(|b| b.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// The first violated spacing condition (positions are 1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Q0Violation {
    /// Empty sequence, or a block that does not exist for n.
    InvalidBlock(usize),
    /// Two x blocks k < l with i_k + 2j_k + 1 >= i_l.
    XSpacing(usize, usize),
    /// Two u blocks k < l with i_k + 2j_k + 1 >= i_l.
    USpacing(usize, usize),
    /// u block k followed by a block violating the indicator bounds.
    UNext(usize),
    /// x block k followed by a block violating the indicator bounds.
    XNext(usize),
    /// An indicator of block k lies outside 1..=n.
    IndicatorRange(usize),
}

impl fmt::Display for Q0Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Q0Violation::InvalidBlock(k) => write!(f, "block {k} invalid"),
            Q0Violation::XSpacing(k, l) => write!(f, "x blocks {k},{l} too close"),
            Q0Violation::USpacing(k, l) => write!(f, "u blocks {k},{l} too close"),
            Q0Violation::UNext(k) => write!(f, "u block {k} and its successor"),
            Q0Violation::XNext(k) => write!(f, "x block {k} and its successor"),
            Q0Violation::IndicatorRange(k) => write!(f, "indicator of block {k} out of range"),
        }
    }
}

/// Conditions that involve block `k` and later blocks only, given its indicators.
fn check_at(bs: &[Block], ind: &[Indicator], k: usize, n: usize) -> std::result::Result<(), Q0Violation> {
    let b = &bs[k];
    if !b.is_valid(n) {
        return Err(Q0Violation::InvalidBlock(k + 1));
    }
    let reach = b.start() + 2 * b.len() + 1;
    for (l, c) in bs.iter().enumerate().skip(k + 1) {
        if c.kind == b.kind && reach >= c.start() {
            return Err(match b.kind {
                BlockKind::X => Q0Violation::XSpacing(k + 1, l + 1),
                BlockKind::U => Q0Violation::USpacing(k + 1, l + 1),
            });
        }
    }
    if let Some(next) = ind.get(k + 1) {
        let end = (b.start() + 2 * b.len() + 2) as i64;
        match b.kind {
            BlockKind::U if !(end <= next.u && next.x - ind[k].x >= 2) => {
                return Err(Q0Violation::UNext(k + 1))
            }
            BlockKind::X if !(end <= next.x && next.u - ind[k].u >= 2) => {
                return Err(Q0Violation::XNext(k + 1))
            }
            _ => {}
        }
    }
    let range = 1..=n as i64;
    if !range.contains(&ind[k].u) || !range.contains(&ind[k].x) {
        return Err(Q0Violation::IndicatorRange(k + 1));
    }
    Ok(())
}

/// Checks membership in Q_0, reporting the first violation in block order.
pub fn check_q0(bs: &BlockSequence, n: usize) -> std::result::Result<(), Q0Violation> {
    if bs.is_empty() {
        return Err(Q0Violation::InvalidBlock(0));
    }
    let ind = bs.indicators();
    (0..bs.len()).try_for_each(|k| check_at(&bs.blocks, &ind, k, n))
}

pub fn in_q0(bs: &BlockSequence, n: usize) -> bool {
    check_q0(bs, n).is_ok()
}

/// The admissible v-set A_w of a sequence in Q_0.
pub fn compute_aw(bs: &BlockSequence, n: usize) -> PointSet {
    let ind = bs.indicators();
    let Some(last) = ind.last() else {
        return PointSet::full(n);
    };
    let n = n as i64;
    let mut a = if last.u > last.x && last.u + 2 <= n {
        PointSet::range(last.u + 2, n)
    } else if last.u < last.x && last.x + 2 <= n {
        PointSet::range(last.x + 2, n)
    } else {
        PointSet::empty()
    };
    for k in (0..bs.len() - 1).rev() {
        let b = &bs.blocks[k];
        let lo = match b.kind {
            BlockKind::U => (b.start() + 2 * b.len() + 2) as i64,
            BlockKind::X => ind[k].u + 2,
        };
        a = a.union(PointSet::range(lo, ind[k + 1].u - 1));
    }
    let first = ind[0];
    if first.u == 1 || first.x == 1 {
        a
    } else if 1 < first.u && first.u <= first.x {
        a.union(PointSet::range(1, first.u - 1))
    } else if 1 < first.x && first.x < first.u {
        a.union(PointSet::range(first.u - first.x + 1, first.u - 1))
    } else {
        a
    }
}

/// A member v_A w* of W_n, stored as the set A and the sequence w.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NormalFormWord {
    pub a: PointSet,
    pub blocks: BlockSequence,
    pub aw: PointSet,
}

impl NormalFormWord {
    /// Validates Q_0 and A ⊆ A_w; a pure v-word accepts any A ⊆ {1..n}.
    pub fn new(a: PointSet, blocks: BlockSequence, n: usize) -> Result<Self> {
        if blocks.is_empty() {
            let full = PointSet::full(n);
            if !a.is_subset(full) {
                return Err(Error::Structure(format!("{a} is not a subset of 1..{n}")));
            }
            return Ok(NormalFormWord { a, blocks, aw: full });
        }
        check_q0(&blocks, n).map_err(|v| Error::Structure(format!("{blocks} not in Q_0: {v}")))?;
        let aw = compute_aw(&blocks, n);
        if !a.is_subset(aw) {
            return Err(Error::Structure(format!("{a} is not a subset of A_w = {aw}")));
        }
        Ok(NormalFormWord { a, blocks, aw })
    }

    pub fn render(&self) -> Word {
        let mut w: Vec<Letter> = self.a.iter().map(Letter::v).collect();
        w.extend_from_slice(self.blocks.star().letters());
        Word::new(w)
    }
}

impl fmt::Display for NormalFormWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// Interleave ascending u blocks with x blocks (given in sequence order) by the
/// pairwise position rule. A tie, or a pairwise order no merge can honour, is a defect.
pub fn interleave(us: &[Block], xs: &[Block]) -> Result<Vec<Block>> {
    let a = us.len();
    // rendered order of x blocks is the reverse of sequence order
    let rendered: Vec<&Block> = xs.iter().rev().collect();
    let u_after: Vec<i64> = (0..a).map(|k| us[k + 1..].iter().map(|b| b.len() as i64).sum()).collect();
    let mut x_before = Vec::with_capacity(rendered.len());
    let mut acc = 0i64;
    for b in &rendered {
        x_before.push(acc);
        acc += b.len() as i64;
    }
    // u_first[k][l]: u block k precedes rendered x block l
    let mut u_first = vec![vec![false; rendered.len()]; a];
    for k in 0..a {
        for (l, xb) in rendered.iter().enumerate() {
            let lhs = us[k].last() as i64 + 2 * u_after[k] - 2 * x_before[l];
            let rhs = xb.last() as i64;
            if lhs == rhs {
                return Err(Error::Defect(format!("tie between {} and {}", us[k], xb)));
            }
            u_first[k][l] = lhs < rhs;
        }
    }
    let b = xs.len();
    let (mut ui, mut xi) = (0, 0);
    let mut out = Vec::with_capacity(a + b);
    while ui < a || xi < b {
        // sequence position xi corresponds to rendered position b - 1 - xi
        let take_u = xi == b || (ui < a && u_first[ui][b - 1 - xi]);
        if take_u {
            out.push(us[ui]);
            ui += 1;
        } else {
            out.push(xs[xi]);
            xi += 1;
        }
    }
    let pos = |blk: &Block| out.iter().position(|c| c == blk).expect("present");
    for k in 0..a {
        for l in 0..b {
            if (pos(&us[k]) < pos(rendered[l])) != u_first[k][l] {
                return Err(Error::Defect("inconsistent block order".into()));
            }
        }
    }
    Ok(out)
}

/// Recover (A, w) from a word, or None if the word is not in W_n.
pub fn recognize(w: &Word, n: usize) -> Option<NormalFormWord> {
    if w.iter().any(|l| !l.is_valid(n)) {
        return None;
    }
    let p = w.v_prefix_len();
    let vs = &w.letters()[..p];
    if vs.windows(2).any(|x| x[0].index >= x[1].index) {
        return None;
    }
    let a: PointSet = vs.iter().map(|l| l.index()).collect();
    let rest = &w.letters()[p..];
    let nu = rest.iter().take_while(|l| l.kind == LetterKind::U).count();
    if rest[nu..].iter().any(|l| l.kind != LetterKind::X) {
        return None;
    }
    let us = parse_blocks(&Word::new(rest[..nu].to_vec())).ok()?;
    let xs = parse_blocks(&Word::new(rest[nu..].iter().rev().copied().collect())).ok()?;
    let blocks = BlockSequence::new(interleave(&us, &xs).ok()?);
    let nf = NormalFormWord::new(a, blocks, n).ok()?;
    (nf.render() == *w).then_some(nf)
}

/// Every sequence in Q_0 for n, built by prepending blocks to valid suffixes.
pub fn enumerate_q0(n: usize) -> Vec<BlockSequence> {
    let mut all_blocks = Vec::new();
    for kind in [BlockKind::U, BlockKind::X] {
        for i in 1..=n.saturating_sub(2) {
            for j in 1..=(n - i) / 2 {
                all_blocks.push(Block { kind, i: i as u8, j: j as u8 });
            }
        }
    }
    let mut out = Vec::new();
    let mut suffix: Vec<Block> = Vec::new();
    extend_left(&all_blocks, &mut suffix, n, &mut out);
    out.sort();
    out
}

fn extend_left(all: &[Block], suffix: &mut Vec<Block>, n: usize, out: &mut Vec<BlockSequence>) {
    for b in all {
        suffix.insert(0, *b);
        let seq = BlockSequence::new(suffix.clone());
        // later blocks were already checked; their indicators do not depend on b
        if check_at(suffix, &seq.indicators(), 0, n).is_ok() {
            out.push(seq);
            extend_left(all, suffix, n, out);
        }
        suffix.remove(0);
    }
}

/// All members of W_n, deduplicated by rendered word and sorted by it.
pub fn enumerate_wn(n: usize, limits: &Limits) -> Result<Vec<NormalFormWord>> {
    limits.check(n)?;
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut push = |nf: NormalFormWord| {
        if seen.insert(nf.render()) {
            out.push(nf);
        }
    };
    for a in PointSet::full(n).subsets() {
        push(NormalFormWord::new(a, BlockSequence::default(), n)?);
    }
    for bs in enumerate_q0(n) {
        let aw = compute_aw(&bs, n);
        for a in aw.subsets() {
            push(NormalFormWord { a, blocks: bs.clone(), aw });
        }
    }
    out.sort_by_cached_key(|nf| nf.render());
    Ok(out)
}

pub fn count_wn(n: usize, limits: &Limits) -> Result<usize> {
    Ok(enumerate_wn(n, limits)?.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(blocks: &[Block]) -> BlockSequence {
        BlockSequence::new(blocks.to_vec())
    }

    #[test]
    fn q0_examples() {
        assert!(in_q0(&seq(&[Block::u(1, 2)]), 6));
        assert_eq!(check_q0(&seq(&[Block::u(1, 1), Block::u(2, 1)]), 6), Err(Q0Violation::USpacing(1, 2)));
    }

    #[test]
    fn q0_u_then_x_by_indicator_arithmetic() {
        // 2_u = 7 + 2 - 0 + 0 = 9, 2_x = 7; 1_u = 1, 1_x = 1 + 2 + 0 - 2 = 1
        let s = seq(&[Block::u(1, 1), Block::x(7, 1)]);
        let ind = s.indicators();
        assert_eq!(ind[0], Indicator { u: 1, x: 1 });
        assert_eq!(ind[1], Indicator { u: 9, x: 7 });
        // u-block followed by a later block: 1 + 2 + 2 = 5 <= 9 and 7 - 1 >= 2
        assert!(in_q0(&s, 9));
    }

    #[test]
    fn aw_examples() {
        assert_eq!(compute_aw(&seq(&[Block::u(1, 2)]), 8), PointSet::range(7, 8));
        assert_eq!(compute_aw(&seq(&[Block::u(1, 2)]), 6), PointSet::empty());
    }

    #[test]
    fn render_examples() {
        let nf = NormalFormWord::new(PointSet::range(7, 8), seq(&[Block::u(1, 2)]), 8).unwrap();
        assert_eq!(nf.render().to_string(), "v7 v8 u1 u3");
        let v = NormalFormWord::new(PointSet::range(1, 4), BlockSequence::default(), 6).unwrap();
        assert_eq!(v.render().to_string(), "v1 v2 v3 v4");
        assert!(NormalFormWord::new(PointSet::range(6, 6), seq(&[Block::u(1, 2)]), 8).is_err());
    }

    #[test]
    fn recognize_examples() {
        let w: Word = "v7 v8 u1 u3".parse().unwrap();
        let nf = recognize(&w, 8).unwrap();
        assert_eq!(nf.blocks, seq(&[Block::u(1, 2)]));
        assert!(recognize(&"u1 u2".parse().unwrap(), 6).is_none());
        assert!(recognize(&"v2 v1".parse().unwrap(), 6).is_none());
        assert!(recognize(&Word::empty(), 3).is_some());
    }

    #[test]
    fn tiny_wn() {
        let l = Limits::default();
        let w1 = enumerate_wn(1, &l).unwrap();
        let words: Vec<String> = w1.iter().map(|nf| nf.render().to_string()).collect();
        assert_eq!(words, vec!["ε", "v1"]);
    }

    #[test]
    fn suffixes_of_q0_are_in_q0() {
        for n in 3..=8 {
            let all = enumerate_q0(n);
            let set: HashSet<_> = all.iter().cloned().collect();
            for s in &all {
                assert!(in_q0(s, n));
                if s.len() > 1 {
                    assert!(set.contains(&seq(&s.blocks[1..])));
                }
            }
        }
    }
}
