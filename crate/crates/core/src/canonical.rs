//! The canonical normal-form word of a transformation, and the transformation of a normal form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monoid::is_member;
use crate::normalform::{BlockSequence, Indicator, NormalFormWord};
use crate::points::PointSet;
use crate::transformation::PartialInjection;
use crate::word::{Block, BlockKind, Letter, Word};

/// Positions (1-based, into the ordered domain) where the domain gap and image gap differ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BreakpointData {
    pub r: Vec<usize>,
    /// Rank of the transformation; the sentinel r_{l+1}.
    pub p: usize,
}

impl BreakpointData {
    pub fn l(&self) -> usize {
        self.r.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalBuild {
    pub breakpoints: BreakpointData,
    /// Breakpoint blocks w_1 .. w_l, then the tail block if any, in construction order.
    pub blocks: Vec<Block>,
    pub star: Word,
    /// λ_0 .. λ_p.
    pub lambda: Vec<Word>,
    pub result: NormalFormWord,
}

fn sorted_pairs(f: &PartialInjection) -> (Vec<i64>, Vec<i64>) {
    f.pairs().map(|(a, b)| (a as i64, b as i64)).unzip()
}

fn v_run(a: i64, b: i64, n: i64) -> Vec<Letter> {
    (a.max(1)..=b.min(n)).map(|i| Letter::v(i as usize)).collect()
}

fn prepend(prefix: Vec<Letter>, w: &Word) -> Word {
    let mut v = prefix;
    v.extend_from_slice(w.letters());
    Word::new(v)
}

pub fn breakpoints(f: &PartialInjection) -> BreakpointData {
    let (d, m) = sorted_pairs(f);
    let r = (1..d.len()).filter(|&k| d[k] - d[k - 1] != m[k] - m[k - 1]).collect();
    BreakpointData { r, p: d.len() }
}

/// Runs the whole construction, keeping every intermediate stage.
pub fn canonical_build(f: &PartialInjection, n: usize) -> Result<CanonicalBuild> {
    if f.n() != n {
        return Err(Error::DimensionMismatch { left: n, right: f.n() });
    }
    if f.is_empty_map() {
        return Err(Error::Domain("the empty transformation has no canonical block word".into()));
    }
    if !is_member(f) {
        return Err(Error::Domain(format!("{f} is not in the monoid")));
    }
    let (d, m) = sorted_pairs(f);
    let p = d.len();
    let bp = breakpoints(f);
    let mut blocks = Vec::new();
    for &r in &bp.r {
        let (dg, mg) = (d[r] - d[r - 1], m[r] - m[r - 1]);
        blocks.push(if mg > dg {
            Block::x(m[r - 1] as usize, ((mg - dg) / 2) as usize)
        } else {
            Block::u(d[r - 1] as usize, ((dg - mg) / 2) as usize)
        });
    }
    let (dp, mp) = (d[p - 1], m[p - 1]);
    if dp > mp {
        blocks.push(Block::x(mp as usize, ((dp - mp) / 2) as usize));
    } else if dp < mp {
        blocks.push(Block::u(dp as usize, ((mp - dp) / 2) as usize));
    }
    let seq = BlockSequence::new(blocks.clone());
    let star = seq.star();

    let ni = n as i64;
    let first = if dp <= ni - 2 {
        if mp < dp {
            v_run(dp + 2, ni, ni)
        } else if ni - 1 > mp && mp > dp {
            v_run(mp + 2, ni, ni)
        } else if mp == dp {
            v_run(mp + 1, ni, ni)
        } else {
            Vec::new()
        }
    } else if dp == ni - 1 && mp == ni - 1 {
        v_run(ni, ni, ni)
    } else {
        Vec::new()
    };
    let mut lambda = vec![prepend(first, &star)];
    for k in (2..=p).rev() {
        let (dg, mg) = (d[k - 1] - d[k - 2], m[k - 1] - m[k - 2]);
        let add = if 2 <= mg && mg == dg {
            v_run(d[k - 2] + 1, d[k - 1] - 1, ni)
        } else if 2 < mg && mg < dg {
            v_run(d[k - 1] - (mg - 2), d[k - 1] - 1, ni)
        } else if mg > dg && dg > 2 {
            v_run(d[k - 2] + 2, d[k - 1] - 1, ni)
        } else {
            Vec::new()
        };
        let prev = lambda.last().expect("λ_0 present");
        lambda.push(prepend(add, prev));
    }
    let (d1, m1) = (d[0], m[0]);
    let add = if d1 == 1 || m1 == 1 {
        Vec::new()
    } else if d1 <= m1 {
        v_run(1, d1 - 1, ni)
    } else {
        v_run(d1 - m1 + 1, d1 - 1, ni)
    };
    let prev = lambda.last().expect("λ_0 present");
    lambda.push(prepend(add, prev));

    let last = lambda.last().expect("λ_p present");
    let a: PointSet = last.iter().filter(|l| l.is_v()).map(|l| l.index()).collect();
    let result = if seq.is_empty() {
        NormalFormWord::new(a, seq, n)?
    } else {
        NormalFormWord::new(a, seq, n).map_err(|e| Error::Defect(format!("construction left W_n: {e}")))?
    };
    if result.render() != *last {
        return Err(Error::Defect(format!("λ_p = {last} differs from v_A w* = {}", result.render())));
    }
    Ok(CanonicalBuild { breakpoints: bp, blocks, star, lambda, result })
}

/// The canonical word of a non-empty member.
pub fn canonical_word(f: &PartialInjection, n: usize) -> Result<NormalFormWord> {
    canonical_build(f, n).map(|b| b.result)
}

/// A domain interval mapped increasingly onto an image interval of the same length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub dom: (i64, i64),
    pub img: (i64, i64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReconstructionFrame {
    pub indicators: Vec<Indicator>,
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    /// First segment, tail segment last; empty segments are kept.
    pub segments: Vec<Segment>,
}

pub fn reconstruction_frame(blocks: &BlockSequence, n: usize) -> Result<ReconstructionFrame> {
    if blocks.is_empty() {
        return Err(Error::Structure("no blocks to reconstruct from".into()));
    }
    let ind = blocks.indicators();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (k, blk) in blocks.blocks.iter().enumerate() {
        let end = (blk.start() + 2 * blk.len() + 2) as i64;
        match blk.kind {
            BlockKind::X => {
                a.push(ind[k].u + 2);
                b.push(end);
            }
            BlockKind::U => {
                a.push(end);
                b.push(ind[k].x + 2);
            }
        }
    }
    let mn = ind[0].u.min(ind[0].x);
    let mut segments = vec![Segment {
        dom: (1 + ind[0].u - mn, ind[0].u),
        img: (1 + ind[0].x - mn, ind[0].x),
    }];
    for k in 0..blocks.len() - 1 {
        segments.push(Segment { dom: (a[k], ind[k + 1].u), img: (b[k], ind[k + 1].x) });
    }
    let last = blocks.len() - 1;
    let ni = n as i64;
    segments.push(Segment { dom: (a[last], ni), img: (b[last], ni) });
    Ok(ReconstructionFrame { indicators: ind, a, b, segments })
}

fn frame_problem(frame: &ReconstructionFrame, n: usize) -> Option<String> {
    let ni = n as i64;
    let m = frame.a.len();
    if frame.a[m - 1] != frame.b[m - 1] {
        return Some("tail start differs between domain and image".into());
    }
    for k in 0..m {
        if frame.a[k] - frame.indicators[k].u == frame.b[k] - frame.indicators[k].x {
            return Some(format!("block {} does not break the gap pattern", k + 1));
        }
    }
    let mut prev: Option<Segment> = None;
    for s in frame.segments.iter().filter(|s| s.dom.0 <= s.dom.1 || s.img.0 <= s.img.1) {
        if s.dom.1 - s.dom.0 != s.img.1 - s.img.0 {
            return Some(format!("segment {:?} -> {:?} has unequal lengths", s.dom, s.img));
        }
        if s.dom.0 < 1 || s.img.0 < 1 || s.dom.1 > ni || s.img.1 > ni {
            return Some(format!("segment {:?} -> {:?} leaves 1..{n}", s.dom, s.img));
        }
        if let Some(p) = prev {
            if p.dom.1 >= s.dom.0 || p.img.1 >= s.img.0 {
                return Some("segments overlap or are out of order".into());
            }
        }
        prev = Some(*s);
    }
    None
}

/// The transformation denoted by a normal form, built from the segment frame.
pub fn reconstruct(nf: &NormalFormWord, n: usize) -> Result<PartialInjection> {
    if nf.blocks.is_empty() {
        return PartialInjection::partial_identity(PointSet::full(n).difference(nf.a), n);
    }
    let frame = reconstruction_frame(&nf.blocks, n)?;
    if let Some(why) = frame_problem(&frame, n) {
        return Err(Error::Structure(why));
    }
    let mut pairs = Vec::new();
    for s in &frame.segments {
        for t in 0..=(s.dom.1 - s.dom.0) {
            pairs.push(((s.dom.0 + t) as usize, (s.img.0 + t) as usize));
        }
    }
    Ok(PartialInjection::from_pairs(n, &pairs)?.restrict_away(nf.a))
}

/// Segment lengths match, segments are disjoint and increasing, and the result is a member.
pub fn check_wellformed_reconstruction(nf: &NormalFormWord, n: usize) -> bool {
    if nf.blocks.is_empty() {
        return true;
    }
    let Ok(frame) = reconstruction_frame(&nf.blocks, n) else {
        return false;
    };
    frame_problem(&frame, n).is_none() && reconstruct(nf, n).map(|f| is_member(&f)).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::gen_u;

    fn pi(n: usize, pairs: &[(usize, usize)]) -> PartialInjection {
        PartialInjection::from_pairs(n, pairs).unwrap()
    }

    #[test]
    fn single_u_block() {
        let f = pi(8, &[(1, 5), (7, 7), (8, 8)]);
        let b = canonical_build(&f, 8).unwrap();
        assert_eq!(b.breakpoints.r, vec![1]);
        assert_eq!(b.blocks, vec![Block::u(1, 2)]);
        assert_eq!(b.result.a, PointSet::empty());
        assert_eq!(b.result.render().to_string(), "u1 u3");
        assert_eq!(reconstruct(&b.result, 8).unwrap(), f);
    }

    #[test]
    fn rule_five() {
        let f = pi(5, &[(5, 5)]);
        let nf = canonical_word(&f, 5).unwrap();
        assert_eq!(nf.render().to_string(), "v1 v2 v3 v4");
        assert_eq!(reconstruct(&nf, 5).unwrap(), f);
    }

    #[test]
    fn generator_is_its_own_normal_form() {
        let u2 = gen_u(2, 6).unwrap();
        let nf = canonical_word(&u2, 6).unwrap();
        assert_eq!(nf.render().to_string(), "u2");
        assert_eq!(nf.render().evaluate(6).unwrap(), u2);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(canonical_word(&PartialInjection::empty(4).unwrap(), 4), Err(Error::Domain(_))));
        assert!(matches!(canonical_word(&pi(4, &[(1, 2)]), 4), Err(Error::Domain(_))));
    }

    #[test]
    fn single_u_block_frame_breaks_gap() {
        let nf = NormalFormWord::new(PointSet::empty(), BlockSequence::new(vec![Block::u(1, 2)]), 8).unwrap();
        let fr = reconstruction_frame(&nf.blocks, 8).unwrap();
        assert_eq!(fr.a[0] - fr.indicators[0].u, 2 * 2 + 2);
        assert_eq!(fr.b[0] - fr.indicators[0].x, 2);
        assert!(check_wellformed_reconstruction(&nf, 8));
    }

    #[test]
    fn pure_v_words() {
        let nf = NormalFormWord::new(PointSet::range(2, 3), BlockSequence::default(), 4).unwrap();
        assert_eq!(reconstruct(&nf, 4).unwrap(), pi(4, &[(1, 1), (4, 4)]));
        assert!(check_wellformed_reconstruction(&nf, 4));
    }
}
