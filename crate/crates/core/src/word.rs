//! Letters, words and blocks over the generating alphabet, and their evaluation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::transformation::{PartialInjection, MAX_N};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LetterKind {
    V,
    U,
    X,
}

impl LetterKind {
    pub fn symbol(self) -> char {
        match self {
            LetterKind::V => 'v',
            LetterKind::U => 'u',
            LetterKind::X => 'x',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub kind: LetterKind,
    pub index: u8,
}

impl Letter {
    pub const fn v(i: usize) -> Self {
        Letter { kind: LetterKind::V, index: i as u8 }
    }

    pub const fn u(i: usize) -> Self {
        Letter { kind: LetterKind::U, index: i as u8 }
    }

    pub const fn x(i: usize) -> Self {
        Letter { kind: LetterKind::X, index: i as u8 }
    }

    pub fn index(self) -> usize {
        self.index as usize
    }

    pub fn is_v(self) -> bool {
        self.kind == LetterKind::V
    }

    pub fn is_valid(self, n: usize) -> bool {
        let i = self.index();
        match self.kind {
            LetterKind::V => (1..=n).contains(&i),
            LetterKind::U | LetterKind::X => i >= 1 && i + 2 <= n,
        }
    }

    pub fn check(self, n: usize) -> Result<()> {
        if self.is_valid(n) {
            Ok(())
        } else {
            Err(Error::OutOfRange { what: "letter index", value: self.index(), n })
        }
    }

    /// Where this generator sends `point`.
    pub fn act(self, point: usize) -> Option<usize> {
        let i = self.index();
        match self.kind {
            LetterKind::V => (point != i).then_some(point),
            LetterKind::U => match point {
                p if p <= i => Some(p + 2),
                p if p <= i + 3 => None,
                p => Some(p),
            },
            LetterKind::X => match point {
                p if p <= 2 => None,
                p if p <= i + 2 => Some(p - 2),
                p if p == i + 3 => None,
                p => Some(p),
            },
        }
    }

    /// Swap u and x, keep v.
    pub fn dual(self) -> Self {
        let kind = match self.kind {
            LetterKind::U => LetterKind::X,
            LetterKind::X => LetterKind::U,
            LetterKind::V => LetterKind::V,
        };
        Letter { kind, index: self.index }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.symbol(), self.index)
    }
}

/// A word over the alphabet; the empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Rejects any letter that does not exist for `n`.
    pub fn checked(letters: Vec<Letter>, n: usize) -> Result<Self> {
        for l in &letters {
            l.check(n)?;
        }
        Ok(Word(letters))
    }

    /// v_a v_{a+1} .. v_b, empty when a > b.
    pub fn v_range(a: usize, b: usize) -> Self {
        Word((a..=b).map(Letter::v).collect())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Letter> {
        self.0.iter()
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Replace `len` letters at `pos` with `with`.
    pub fn splice(&self, pos: usize, len: usize, with: &[Letter]) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + with.len() - len.min(self.0.len()));
        v.extend_from_slice(&self.0[..pos]);
        v.extend_from_slice(with);
        v.extend_from_slice(&self.0[pos + len..]);
        Word(v)
    }

    pub fn count(&self, kind: LetterKind) -> usize {
        self.0.iter().filter(|l| l.kind == kind).count()
    }

    /// The transformation this word denotes, leftmost letter acting first.
    pub fn evaluate(&self, n: usize) -> Result<PartialInjection> {
        if n == 0 || n > MAX_N {
            return Err(Error::OutOfRange { what: "ambient size", value: n, n: MAX_N });
        }
        for l in &self.0 {
            l.check(n)?;
        }
        let images: Vec<Option<usize>> = (1..=n)
            .map(|p| self.0.iter().try_fold(p, |q, l| l.act(q)))
            .collect();
        PartialInjection::from_images(&images)
    }

    /// The letters in reverse order, with no substitution.
    pub fn reverse_inverse(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    /// Reverse and swap u with x: the word of the inverse transformation when no v occurs.
    pub fn dual(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.dual()).collect())
    }

    /// The longest prefix made of v letters.
    pub fn v_prefix_len(&self) -> usize {
        self.0.iter().take_while(|l| l.is_v()).count()
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

fn parse_index(s: &str, tok: &str) -> Result<usize> {
    let ok = !s.is_empty() && !s.starts_with('0') && s.bytes().all(|b| b.is_ascii_digit());
    if !ok {
        return Err(Error::Parse(format!("bad token `{tok}`")));
    }
    s.parse().map_err(|_| Error::Parse(format!("index too large in `{tok}`")))
}

fn parse_token(tok: &str, out: &mut Vec<Letter>) -> Result<()> {
    let mut chars = tok.chars();
    let kind = match chars.next() {
        Some('v') => LetterKind::V,
        Some('u') => LetterKind::U,
        Some('x') => LetterKind::X,
        _ => return Err(Error::Parse(format!("bad token `{tok}`"))),
    };
    let rest = chars.as_str();
    match rest.split_once('.') {
        None => {
            let i = parse_index(rest, tok)?;
            out.push(Letter { kind, index: checked_u8(i, tok)? });
        }
        Some((a, b)) => {
            if kind == LetterKind::V {
                return Err(Error::Parse(format!("block shorthand needs u or x: `{tok}`")));
            }
            let i = parse_index(a, tok)?;
            let j = parse_index(b, tok)?;
            for t in 0..j {
                out.push(Letter { kind, index: checked_u8(i + 2 * t, tok)? });
            }
        }
    }
    Ok(())
}

fn checked_u8(i: usize, tok: &str) -> Result<u8> {
    u8::try_from(i).map_err(|_| Error::Parse(format!("index too large in `{tok}`")))
}

impl FromStr for Word {
    type Err = Error;

    /// Whitespace-separated tokens `v3`, `u1`, `x4`, or block shorthand `u1.2`.
    /// An empty string or `ε` is the empty word.
    fn from_str(s: &str) -> Result<Self> {
        let mut out = Vec::new();
        for tok in s.split_whitespace() {
            if tok == "ε" {
                continue;
            }
            parse_token(tok, &mut out)?;
        }
        Ok(Word(out))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Collects letters for relation instances, silently dropping v_i with i > n.
#[derive(Debug, Clone)]
pub struct DroppingBuilder {
    n: usize,
    letters: Vec<Letter>,
}

impl DroppingBuilder {
    pub fn new(n: usize) -> Self {
        DroppingBuilder { n, letters: Vec::new() }
    }

    pub fn v(mut self, i: usize) -> Self {
        if i <= self.n {
            self.letters.push(Letter::v(i));
        }
        self
    }

    pub fn vs(mut self, idx: impl IntoIterator<Item = usize>) -> Self {
        for i in idx {
            self = self.v(i);
        }
        self
    }

    pub fn v_range(self, a: usize, b: usize) -> Self {
        self.vs(a..=b)
    }

    pub fn u(mut self, i: usize) -> Self {
        self.letters.push(Letter::u(i));
        self
    }

    pub fn x(mut self, i: usize) -> Self {
        self.letters.push(Letter::x(i));
        self
    }

    pub fn word(mut self, w: &Word) -> Self {
        for &l in w.letters() {
            if l.is_v() {
                self = self.v(l.index());
            } else {
                self.letters.push(l);
            }
        }
        self
    }

    pub fn build(self) -> Word {
        Word(self.letters)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BlockKind {
    U,
    X,
}

impl BlockKind {
    pub fn letter_kind(self) -> LetterKind {
        match self {
            BlockKind::U => LetterKind::U,
            BlockKind::X => LetterKind::X,
        }
    }
}

/// u_{i,j} = u_i u_{i+2} .. u_{i+2j-2}, or the same with x.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Block {
    pub kind: BlockKind,
    pub i: u8,
    pub j: u8,
}

impl Block {
    /// Checks 1 ≤ i ≤ n-2 and 1 ≤ j ≤ ⌊(n-i)/2⌋.
    pub fn new(kind: BlockKind, i: usize, j: usize, n: usize) -> Result<Self> {
        if i == 0 || i + 2 > n {
            return Err(Error::OutOfRange { what: "block start", value: i, n });
        }
        if j == 0 || j > (n - i) / 2 {
            return Err(Error::OutOfRange { what: "block length", value: j, n });
        }
        Ok(Block { kind, i: i as u8, j: j as u8 })
    }

    pub fn u(i: usize, j: usize) -> Self {
        Block { kind: BlockKind::U, i: i as u8, j: j as u8 }
    }

    pub fn x(i: usize, j: usize) -> Self {
        Block { kind: BlockKind::X, i: i as u8, j: j as u8 }
    }

    pub fn start(&self) -> usize {
        self.i as usize
    }

    pub fn len(&self) -> usize {
        self.j as usize
    }

    pub fn is_empty(&self) -> bool {
        self.j == 0
    }

    /// Index of the last letter, i + 2j - 2.
    pub fn last(&self) -> usize {
        self.start() + 2 * self.len() - 2
    }

    pub fn is_valid(&self, n: usize) -> bool {
        Block::new(self.kind, self.start(), self.len(), n).is_ok()
    }

    pub fn expand(&self) -> Word {
        let kind = self.kind.letter_kind();
        Word((0..self.len()).map(|t| Letter { kind, index: (self.start() + 2 * t) as u8 }).collect())
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            BlockKind::U => 'U',
            BlockKind::X => 'X',
        };
        write!(f, "{k}({},{})", self.i, self.j)
    }
}

/// Split a u/x word into maximal runs whose indices step by two.
pub fn parse_blocks(w: &Word) -> Result<Vec<Block>> {
    let mut out: Vec<Block> = Vec::new();
    for l in w.letters() {
        let kind = match l.kind {
            LetterKind::U => BlockKind::U,
            LetterKind::X => BlockKind::X,
            LetterKind::V => return Err(Error::Structure(format!("letter {l} is not a block letter"))),
        };
        if l.index == 0 {
            return Err(Error::Structure(format!("letter {l} has index 0")));
        }
        match out.last_mut() {
            Some(b) if b.kind == kind && b.last() + 2 == l.index() => b.j += 1,
            _ => out.push(Block { kind, i: l.index, j: 1 }),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::{gen_u, gen_v, gen_x};

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn single_letters_match_generators() {
        for n in 1..=9 {
            for i in 1..=n {
                assert_eq!(Word::new(vec![Letter::v(i)]).evaluate(n).unwrap(), gen_v(i, n).unwrap());
            }
            for i in 1..=n.saturating_sub(2) {
                assert_eq!(Word::new(vec![Letter::u(i)]).evaluate(n).unwrap(), gen_u(i, n).unwrap());
                assert_eq!(Word::new(vec![Letter::x(i)]).evaluate(n).unwrap(), gen_x(i, n).unwrap());
            }
        }
    }

    #[test]
    fn evaluation_examples() {
        let f = w("u1 u1").evaluate(6).unwrap();
        assert_eq!(f, PartialInjection::from_pairs(6, &[(5, 5), (6, 6)]).unwrap());
        assert_eq!(Word::empty().evaluate(4).unwrap(), PartialInjection::identity(4).unwrap());
        assert_eq!(w("v3 u2").evaluate(6).unwrap(), w("u2").evaluate(6).unwrap());
        assert!(matches!(w("u5").evaluate(6), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(w("u1.2 x4").to_string(), "u1 u3 x4");
        assert_eq!(w("").to_string(), "ε");
        assert_eq!(w("ε"), Word::empty());
        assert_eq!(w("  v10   x2 "), Word::new(vec![Letter::v(10), Letter::x(2)]));
        for bad in ["u0", "v1.2", "y3", "u", "u01", "u1.", "u1.0", "3", "u1x"] {
            assert!(bad.parse::<Word>().is_err(), "{bad}");
        }
    }

    #[test]
    fn reverse_inverse_basics() {
        assert_eq!(w("x1 x3").reverse_inverse(), w("x3 x1"));
        assert_eq!(Word::empty().reverse_inverse(), Word::empty());
        let a = w("u1 v2 x5");
        assert_eq!(a.reverse_inverse().reverse_inverse(), a);
    }

    #[test]
    fn blocks() {
        assert_eq!(Block::u(1, 2).expand(), w("u1 u3"));
        assert_eq!(Block::x(4, 1).expand(), w("x4"));
        assert_eq!(parse_blocks(&w("u1 u3 x5")).unwrap(), vec![Block::u(1, 2), Block::x(5, 1)]);
        assert!(parse_blocks(&w("v1 u2")).is_err());
        assert!(Block::new(BlockKind::U, 1, 3, 6).is_err());
        assert!(Block::new(BlockKind::U, 2, 2, 6).is_ok());
    }

    #[test]
    fn dropping_builder() {
        let r = DroppingBuilder::new(4).v_range(1, 5).build();
        assert_eq!(r, w("v1 v2 v3 v4"));
        assert!(Word::checked(vec![Letter::v(5)], 4).is_err());
    }
}
