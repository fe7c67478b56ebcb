//! Normalization of arbitrary words into W_n by oriented application of the relations.
//!
//! The strategy is deterministic: at every step the phases are tried in order and the
//! leftmost applicable rule of the first phase that has one is applied; then the scan
//! restarts from phase 1. Only instances that hold semantically are loaded.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normalform::{recognize, NormalFormWord};
use crate::relations::{instantiate_relations, verify_relation, Family, Params, RelationInstance};
use crate::word::{Letter, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Backward,
}

/// The six phases: pull v's to the front, separate u from x, sort, remove local
/// patterns, cancel across the middle, lower indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Phase {
    PullV = 1,
    Separate = 2,
    Sort = 3,
    Local = 4,
    Cancel = 5,
    Lower = 6,
}

impl Phase {
    pub fn number(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteStep {
    pub phase: Phase,
    pub round: usize,
    /// Index into the rewriter's instance list.
    pub instance: usize,
    pub family: Family,
    pub params: Params,
    pub direction: Direction,
    /// Set when the step is part of a derived rule; names the rule it belongs to.
    pub derived: Option<String>,
    pub position: usize,
    pub before: Word,
    pub after: Word,
}

impl fmt::Display for RewriteStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inv = if self.direction == Direction::Backward { "^-1" } else { "" };
        write!(f, "[({}{inv})", self.family)?;
        if self.params != Params::None {
            write!(f, " {}", self.params)?;
        }
        write!(f, " @{}] {} -> {}", self.position, self.before, self.after)?;
        if let Some(d) = &self.derived {
            write!(f, "  # {d}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RewriteTrace {
    pub input: Word,
    pub steps: Vec<RewriteStep>,
    /// How many times the scan went back to phase 1 after a later phase fired.
    pub rounds: usize,
}

impl RewriteTrace {
    pub fn output(&self) -> &Word {
        self.steps.last().map_or(&self.input, |s| &s.after)
    }

    /// One step per line.
    pub fn to_text(&self) -> String {
        self.steps.iter().map(|s| format!("{s}\n")).collect()
    }

    /// Checks that the steps chain, that each one is the stated instance applied at the
    /// stated position, and that each one preserves evaluation.
    pub fn replay(&self, n: usize, instances: &[RelationInstance]) -> Result<()> {
        let mut cur = self.input.clone();
        let target = cur.evaluate(n)?;
        for (k, s) in self.steps.iter().enumerate() {
            if s.before != cur {
                return Err(Error::Defect(format!("step {k} does not start from the previous word")));
            }
            let found = instances.get(s.instance).is_some_and(|r| {
                r.family == s.family
                    && r.params == s.params
                    && apply_once(&s.before, r, s.direction, s.position).as_ref() == Ok(&s.after)
            });
            if !found {
                return Err(Error::Defect(format!("step {k} is not a single relation application: {s}")));
            }
            if s.after.evaluate(n)? != target {
                return Err(Error::Defect(format!("step {k} changes the transformation: {s}")));
            }
            cur = s.after.clone();
        }
        Ok(())
    }
}

/// Replace the occurrence of one side of `r` at `position` by the other side.
pub fn apply_once(w: &Word, r: &RelationInstance, dir: Direction, position: usize) -> Result<Word> {
    let (from, to) = match dir {
        Direction::Forward => (&r.lhs, &r.rhs),
        Direction::Backward => (&r.rhs, &r.lhs),
    };
    let l = from.len();
    if position + l > w.len() || w.letters()[position..position + l] != *from.letters() {
        return Err(Error::Application { position });
    }
    Ok(w.splice(position, l, to.letters()))
}

#[derive(Debug, Clone)]
struct Rule {
    inst: usize,
    dir: Direction,
    from: Vec<Letter>,
    to: Vec<Letter>,
}

/// A rule whose rhs is reached from its lhs by a fixed chain of primitive steps.
#[derive(Debug, Clone)]
pub struct DerivedRule {
    pub family: Family,
    pub params: Params,
    pub from: Word,
    pub to: Word,
    /// (rule index, offset) pairs replayed relative to the match position.
    path: Vec<(usize, usize)>,
}

impl DerivedRule {
    pub fn label(&self) -> String {
        format!("derived {} {}: {} -> {}", self.family, self.params, self.from, self.to)
    }

    pub fn path_len(&self) -> usize {
        self.path.len()
    }
}

/// Rules of one phase keyed by first letter, in priority order.
#[derive(Debug, Clone, Default)]
struct PhaseTable {
    by_first: HashMap<Letter, Vec<Candidate>>,
}

#[derive(Debug, Clone, Copy)]
enum Candidate {
    Plain(usize),
    Derived(usize),
}

impl PhaseTable {
    fn push(&mut self, first: Letter, c: Candidate) {
        self.by_first.entry(first).or_default().push(c);
    }
}

pub struct Rewriter {
    n: usize,
    instances: Vec<RelationInstance>,
    rules: Vec<Rule>,
    derived: Vec<DerivedRule>,
    missing: Vec<(Word, Word)>,
    pull: HashMap<(Letter, Letter), usize>,
    push: HashMap<(Letter, Letter), usize>,
    transport: HashMap<(Letter, Letter), usize>,
    v_sort: HashMap<(Letter, Letter), usize>,
    phases: Vec<(Phase, PhaseTable)>,
    lower: Vec<usize>,
}

struct State {
    word: Word,
    trace: RewriteTrace,
    phase_seen: Phase,
    budget: usize,
}

impl State {
    #[allow(clippy::too_many_arguments)]
    fn record(
        &mut self,
        phase: Phase,
        index: usize,
        inst: &RelationInstance,
        dir: Direction,
        derived: Option<String>,
        position: usize,
        after: Word,
    ) -> Result<()> {
        if self.trace.steps.len() >= self.budget {
            return Err(Error::NonTermination { budget: self.budget, trace: Box::new(self.trace.clone()) });
        }
        if phase == Phase::PullV && self.phase_seen > Phase::PullV {
            self.trace.rounds += 1;
        }
        self.phase_seen = phase;
        let before = std::mem::replace(&mut self.word, after.clone());
        self.trace.steps.push(RewriteStep {
            phase,
            round: self.trace.rounds,
            instance: index,
            family: inst.family,
            params: inst.params.clone(),
            direction: dir,
            derived,
            position,
            before,
            after,
        });
        Ok(())
    }
}

/// Step budget for a word of the given length.
pub fn step_budget(len: usize, n: usize) -> usize {
    10 * (len + 4) * (n + 4).pow(3)
}

impl Rewriter {
    /// Loads every semantically valid instance for n and derives the missing R9 cases.
    pub fn new(n: usize) -> Result<Self> {
        let mut instances = Vec::new();
        for r in instantiate_relations(n) {
            if verify_relation(&r, n)?.ok {
                instances.push(r);
            }
        }
        Self::with_instances(n, instances)
    }

    /// Builds the tables from an explicit instance list, which is trusted as given.
    pub fn with_instances(n: usize, instances: Vec<RelationInstance>) -> Result<Self> {
        let mut rules = Vec::with_capacity(2 * instances.len());
        for (k, r) in instances.iter().enumerate() {
            for dir in [Direction::Forward, Direction::Backward] {
                let (from, to) = match dir {
                    Direction::Forward => (&r.lhs, &r.rhs),
                    Direction::Backward => (&r.rhs, &r.lhs),
                };
                rules.push(Rule { inst: k, dir, from: from.letters().to_vec(), to: to.letters().to_vec() });
            }
        }
        let mut rw = Rewriter {
            n,
            instances,
            rules,
            derived: Vec::new(),
            missing: Vec::new(),
            pull: HashMap::new(),
            push: HashMap::new(),
            transport: HashMap::new(),
            v_sort: HashMap::new(),
            phases: Vec::new(),
            lower: Vec::new(),
        };
        rw.derive_r9_extension()?;
        rw.build_tables();
        Ok(rw)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn instances(&self) -> &[RelationInstance] {
        &self.instances
    }

    pub fn derived_rules(&self) -> &[DerivedRule] {
        &self.derived
    }

    /// Patterns for which no derivation was found within the search bounds.
    pub fn missing_derivations(&self) -> &[(Word, Word)] {
        &self.missing
    }

    fn rule_ids(&self, family: Family, dir: Direction) -> impl Iterator<Item = usize> + '_ {
        self.rules
            .iter()
            .enumerate()
            .filter(move |(_, r)| r.dir == dir && self.instances[r.inst].family == family)
            .map(|(k, _)| k)
    }

    fn pair_map(&self, table: &[(Family, Direction)], keep: impl Fn(&Rule) -> bool) -> HashMap<(Letter, Letter), usize> {
        let mut m = HashMap::new();
        for &(fam, dir) in table {
            for id in self.rule_ids(fam, dir) {
                let r = &self.rules[id];
                if r.from.len() == 2 && keep(r) {
                    m.entry((r.from[0], r.from[1])).or_insert(id);
                }
            }
        }
        m
    }

    fn build_tables(&mut self) {
        use Direction::{Backward as B, Forward as F};
        use Family::*;
        self.pull = self.pair_map(&[(R3, B), (R4, B), (R4, F), (R5, F), (R6, F)], |r| {
            !r.from[0].is_v() && r.from[1].is_v()
        });
        self.v_sort = self.pair_map(&[(R1, F), (R2, F)], |r| match r.to.as_slice() {
            [_] => true,
            [a, b] => a.index < b.index,
            _ => false,
        });
        self.push = self.pair_map(&[(R1, F), (R2, F), (R3, F), (R4, F), (R5, F), (R6, F)], |r| r.from[0].is_v());
        self.transport = self.pair_map(&[(R2, F), (R3, F), (R4, F)], |r| r.from[0].is_v() && r.to.len() == 2);

        let groups: [(Phase, &[Family]); 4] = [
            (Phase::Separate, &[E]),
            (Phase::Sort, &[L1, L2, L3, L4, L5, L6]),
            (Phase::Local, &[R7, R8, R9, R10]),
            (Phase::Cancel, &[R11, R12, R13, R14, R15, Lem3i, Lem3ii]),
        ];
        let mut phases = Vec::new();
        for (phase, fams) in groups {
            let mut entries: Vec<(usize, usize, Candidate, Letter)> = Vec::new();
            for (prio, &fam) in fams.iter().enumerate() {
                for id in self.rule_ids(fam, F) {
                    let r = &self.rules[id];
                    if let Some(&first) = r.from.first() {
                        entries.push((r.from.len(), prio, Candidate::Plain(id), first));
                    }
                }
                for (k, d) in self.derived.iter().enumerate().filter(|(_, d)| d.family == fam) {
                    if let Some(&first) = d.from.letters().first() {
                        entries.push((d.from.len(), prio, Candidate::Derived(k), first));
                    }
                }
            }
            entries.sort_by_key(|e| (e.0, e.1));
            let mut t = PhaseTable::default();
            for (_, _, c, first) in entries {
                t.push(first, c);
            }
            phases.push((phase, t));
        }
        self.phases = phases;
        self.lower = [R16, R17, R18, R19].iter().flat_map(|&f| self.rule_ids(f, F).collect::<Vec<_>>()).collect();
    }

    /// u_i u_{i+1} and x_{i+1} x_i for the i near n that the printed R9 range leaves out.
    fn derive_r9_extension(&mut self) -> Result<()> {
        let n = self.n;
        if n < 5 {
            return Ok(());
        }
        let lo = 2.max(n - 4);
        for i in lo..=n - 3 {
            let pairs = [
                (Word::new(vec![Letter::u(i), Letter::u(i + 1)]), Word::new(vec![Letter::u(i - 1), Letter::u(i + 1)])),
                (Word::new(vec![Letter::x(i + 1), Letter::x(i)]), Word::new(vec![Letter::x(i + 1), Letter::x(i - 1)])),
            ];
            for (from, to) in pairs {
                if from.evaluate(n)? != to.evaluate(n)? {
                    self.missing.push((from, to));
                    continue;
                }
                match search_derivation(&self.rules, &from, &to, from.len() + 2, 200_000) {
                    Some(path) => self.derived.push(DerivedRule {
                        family: Family::R9,
                        params: Params::I(i),
                        from,
                        to,
                        path,
                    }),
                    None => self.missing.push((from, to)),
                }
            }
        }
        Ok(())
    }

    /// Normalize `w` into W_n, returning the normal form and the full trace.
    pub fn normalize(&self, w: &Word) -> Result<(NormalFormWord, RewriteTrace)> {
        for l in w.iter() {
            l.check(self.n)?;
        }
        let mut st = State {
            word: w.clone(),
            trace: RewriteTrace { input: w.clone(), steps: Vec::new(), rounds: 0 },
            phase_seen: Phase::PullV,
            budget: step_budget(w.len(), self.n),
        };
        while self.step(&mut st)? {}
        match recognize(&st.word, self.n) {
            Some(nf) => Ok((nf, st.trace)),
            None => Err(Error::Defect(format!("no rule applies to {} which is not in W_n", st.word))),
        }
    }

    fn apply_rule(&self, st: &mut State, phase: Phase, id: usize, pos: usize, derived: Option<String>) -> Result<()> {
        let r = &self.rules[id];
        let after = st.word.splice(pos, r.from.len(), &r.to);
        st.record(phase, r.inst, &self.instances[r.inst], r.dir, derived, pos, after)
    }

    /// Performs one rule application (or one derived/bundled move); false at a fixpoint.
    fn step(&self, st: &mut State) -> Result<bool> {
        if let Some((id, pos)) = self.find_pull(&st.word)? {
            self.apply_rule(st, Phase::PullV, id, pos, None)?;
            return Ok(true);
        }
        for (phase, table) in &self.phases {
            if let Some((c, pos)) = self.find_in(table, &st.word) {
                match c {
                    Candidate::Plain(id) => self.apply_rule(st, *phase, id, pos, None)?,
                    Candidate::Derived(k) => {
                        let d = &self.derived[k];
                        for &(id, off) in &d.path {
                            self.apply_rule(st, *phase, id, pos + off, Some(d.label()))?;
                        }
                    }
                }
                return Ok(true);
            }
        }
        let nv = st.word.v_prefix_len();
        for p in 0..nv {
            if let Some(moves) = self.absorb(&st.word, p) {
                for (id, pos) in moves {
                    self.apply_rule(st, Phase::PullV, id, pos, None)?;
                }
                return Ok(true);
            }
        }
        for p in 0..nv {
            if let Some(moves) = self.lower_at(&st.word, p) {
                for (id, pos) in moves {
                    self.apply_rule(st, Phase::Lower, id, pos, None)?;
                }
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn find_pull(&self, w: &Word) -> Result<Option<(usize, usize)>> {
        let ls = w.letters();
        for pos in 0..ls.len().saturating_sub(1) {
            if !ls[pos].is_v() && ls[pos + 1].is_v() {
                return match self.pull.get(&(ls[pos], ls[pos + 1])) {
                    Some(&id) => Ok(Some((id, pos))),
                    None => Err(Error::Defect(format!("no rule moves {} left past {}", ls[pos + 1], ls[pos]))),
                };
            }
        }
        for pos in 0..ls.len().saturating_sub(1) {
            if let Some(&id) = self.v_sort.get(&(ls[pos], ls[pos + 1])) {
                return Ok(Some((id, pos)));
            }
        }
        Ok(None)
    }

    fn find_in(&self, t: &PhaseTable, w: &Word) -> Option<(Candidate, usize)> {
        let ls = w.letters();
        for pos in 0..ls.len() {
            let Some(cands) = t.by_first.get(&ls[pos]) else {
                continue;
            };
            for &c in cands {
                let from: &[Letter] = match c {
                    Candidate::Plain(id) => &self.rules[id].from,
                    Candidate::Derived(k) => self.derived[k].from.letters(),
                };
                if ls[pos..].starts_with(from) {
                    return Some((c, pos));
                }
            }
        }
        None
    }

    /// Carry the v at `p` to the right until it is deleted; None if it survives.
    fn absorb(&self, w: &Word, mut p: usize) -> Option<Vec<(usize, usize)>> {
        let mut cur = w.letters().to_vec();
        let mut moves = Vec::new();
        while p + 1 < cur.len() {
            let &id = self.push.get(&(cur[p], cur[p + 1]))?;
            let r = &self.rules[id];
            cur.splice(p..p + 2, r.to.iter().copied());
            moves.push((id, p));
            if r.to.len() == 1 {
                return Some(moves);
            }
            p += 1;
        }
        None
    }

    /// Carry the v at `p` right with R2-R4 until an R16-R19 lhs ends at it.
    fn lower_at(&self, w: &Word, mut p: usize) -> Option<Vec<(usize, usize)>> {
        let mut cur = w.letters().to_vec();
        let mut moves = Vec::new();
        loop {
            if let Some((id, s)) = self.lower_match(&cur, p) {
                moves.push((id, s));
                return Some(moves);
            }
            if p + 1 >= cur.len() {
                return None;
            }
            let &id = self.transport.get(&(cur[p], cur[p + 1]))?;
            cur.splice(p..p + 2, self.rules[id].to.iter().copied());
            moves.push((id, p));
            p += 1;
        }
    }

    fn lower_match(&self, cur: &[Letter], p: usize) -> Option<(usize, usize)> {
        for &id in &self.lower {
            let from = &self.rules[id].from;
            let nv = from.iter().filter(|l| l.is_v()).count();
            if nv == 0 || nv > p + 1 {
                continue;
            }
            let s = p + 1 - nv;
            if cur[s..].starts_with(from) {
                return Some((id, s));
            }
        }
        None
    }
}

type Edge = (Vec<Letter>, usize, usize);

/// Breadth-first search for a chain of rule applications (either direction) from
/// `from` to `to`, never exceeding `max_len` letters or `node_limit` visited words.
fn search_derivation(
    rules: &[Rule],
    from: &Word,
    to: &Word,
    max_len: usize,
    node_limit: usize,
) -> Option<Vec<(usize, usize)>> {
    let mut by_first: HashMap<Letter, Vec<usize>> = HashMap::new();
    for (k, r) in rules.iter().enumerate() {
        if let Some(&f) = r.from.first() {
            by_first.entry(f).or_default().push(k);
        }
    }
    let start = from.letters().to_vec();
    let goal = to.letters().to_vec();
    // word -> (predecessor, rule, position)
    let mut prev: HashMap<Vec<Letter>, Option<Edge>> = HashMap::new();
    prev.insert(start.clone(), None);
    let mut queue = VecDeque::from([start]);
    let mut seen_len: HashSet<usize> = HashSet::new();
    while let Some(w) = queue.pop_front() {
        if w == goal {
            let mut path = Vec::new();
            let mut cur = w;
            while let Some(Some((p, id, pos))) = prev.get(&cur).cloned() {
                path.push((id, pos));
                cur = p;
            }
            path.reverse();
            return Some(path);
        }
        seen_len.insert(w.len());
        for pos in 0..w.len() {
            for &id in by_first.get(&w[pos]).into_iter().flatten() {
                let r = &rules[id];
                if !w[pos..].starts_with(&r.from) {
                    continue;
                }
                let next_len = w.len() - r.from.len() + r.to.len();
                if next_len > max_len {
                    continue;
                }
                let mut next = Vec::with_capacity(next_len);
                next.extend_from_slice(&w[..pos]);
                next.extend_from_slice(&r.to);
                next.extend_from_slice(&w[pos + r.from.len()..]);
                if !prev.contains_key(&next) {
                    prev.insert(next.clone(), Some((w.clone(), id, pos)));
                    queue.push_back(next);
                }
            }
        }
        if prev.len() > node_limit {
            return None;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::points::PointSet;
    use crate::word::Block;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn u1_squared() {
        let rw = Rewriter::new(6).unwrap();
        let (nf, trace) = rw.normalize(&w("u1 u1")).unwrap();
        assert_eq!(nf.a, PointSet::range(1, 4));
        assert!(nf.blocks.is_empty());
        assert_eq!(nf.render(), w("v1 v2 v3 v4"));
        trace.replay(6, rw.instances()).unwrap();
    }

    #[test]
    fn v_absorbed_by_u() {
        let rw = Rewriter::new(6).unwrap();
        let (nf, _) = rw.normalize(&w("v3 u2")).unwrap();
        assert_eq!(nf.a, PointSet::empty());
        assert_eq!(nf.blocks.blocks, vec![Block::u(2, 1)]);
    }

    #[test]
    fn normal_forms_are_fixed() {
        let rw = Rewriter::new(8).unwrap();
        let (nf, trace) = rw.normalize(&w("v7 v8 u1 u3")).unwrap();
        assert_eq!(nf.render(), w("v7 v8 u1 u3"));
        assert!(trace.steps.is_empty());
    }

    #[test]
    fn apply_once_r10() {
        let rs = instantiate_relations(8);
        let r10 = rs.iter().find(|r| r.family == Family::R10 && r.lhs == w("u1 u4")).unwrap();
        assert_eq!(apply_once(&w("u1 u4"), r10, Direction::Forward, 0).unwrap(), w("v7 u1 u3"));
        assert_eq!(
            apply_once(&w("u1 u4"), r10, Direction::Forward, 1),
            Err(Error::Application { position: 1 })
        );
    }

    #[test]
    fn trace_text_format() {
        let rw = Rewriter::new(8).unwrap();
        let (_, trace) = rw.normalize(&w("u1 u4")).unwrap();
        assert_eq!(trace.to_text().lines().next().unwrap(), "[(R10) i=1 @0] u1 u4 -> v7 u1 u3");
    }

    #[test]
    fn r9_gap_is_derived() {
        let rw = Rewriter::new(6).unwrap();
        assert!(rw.missing_derivations().is_empty());
        let froms: Vec<String> = rw.derived_rules().iter().map(|d| d.from.to_string()).collect();
        assert_eq!(froms, vec!["u2 u3", "x3 x2", "u3 u4", "x4 x3"]);
        let (nf, trace) = rw.normalize(&w("u2 u3")).unwrap();
        assert_eq!(nf.render(), w("u1 u3"));
        trace.replay(6, rw.instances()).unwrap();
    }
}
