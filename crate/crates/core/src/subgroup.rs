//! The subgroups generated by `t_n = b^l(n) a B^l(n)`: a folded automaton for
//! membership, a normal-form search used as an oracle, and coset cells of
//! path vertices.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::SubgroupError;
use crate::geometry::{Letter, ReducedWord, TreePath, VertexSet};
use crate::union_find::UnionFind;

/// `n -> l(n)`, strictly increasing in `n`, all lengths positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct LengthSequence(BTreeMap<u32, u32>);

impl LengthSequence {
    pub fn new(lengths: BTreeMap<u32, u32>) -> Result<Self, SubgroupError> {
        let mut previous: Option<u32> = None;
        for (&index, &length) in &lengths {
            if index == 0 {
                return Err(SubgroupError::ZeroIndex);
            }
            if length == 0 {
                return Err(SubgroupError::ZeroLength { index });
            }
            if let Some(prev) = previous {
                if length <= prev {
                    return Err(SubgroupError::NotIncreasing { index, length, previous: prev });
                }
            }
            previous = Some(length);
        }
        Ok(LengthSequence(lengths))
    }

    pub fn from_pairs(pairs: &[(u32, u32)]) -> Result<Self, SubgroupError> {
        Self::new(pairs.iter().copied().collect())
    }

    pub fn get(&self, index: u32) -> Option<u32> {
        self.0.get(&index).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.0.iter().map(|(&k, &v)| (k, v))
    }

    pub fn indices(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.keys().copied()
    }
}

/// An index set together with the lengths of its generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubgroupSpec {
    indices: BTreeSet<u32>,
    lengths: LengthSequence,
}

impl SubgroupSpec {
    pub fn new(indices: BTreeSet<u32>, lengths: LengthSequence) -> Result<Self, SubgroupError> {
        for &index in &indices {
            if lengths.get(index).is_none() {
                return Err(SubgroupError::MissingLength { index });
            }
        }
        Ok(SubgroupSpec { indices, lengths })
    }

    pub fn trivial(lengths: LengthSequence) -> Self {
        SubgroupSpec { indices: BTreeSet::new(), lengths }
    }

    pub fn indices(&self) -> &BTreeSet<u32> {
        &self.indices
    }

    pub fn lengths(&self) -> &LengthSequence {
        &self.lengths
    }

    /// Same lengths, different index set.
    pub fn with_indices(&self, indices: BTreeSet<u32>) -> Result<Self, SubgroupError> {
        SubgroupSpec::new(indices, self.lengths.clone())
    }

    pub fn generators(&self) -> Vec<(u32, ReducedWord)> {
        self.indices.iter().map(|&n| (n, generator(n, &self.lengths).expect("checked in new"))).collect()
    }

    pub fn max_length(&self) -> u32 {
        self.indices.iter().filter_map(|&n| self.lengths.get(n)).max().unwrap_or(0)
    }
}

impl fmt::Display for SubgroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.indices.iter().map(|n| n.to_string()).collect();
        write!(f, "{{{}}}", idx.join(","))
    }
}

/// `b^l(n) a B^l(n)`.
pub fn generator(n: u32, lengths: &LengthSequence) -> Result<ReducedWord, SubgroupError> {
    let l = lengths.get(n).ok_or(SubgroupError::MissingLength { index: n })? as i64;
    Ok(ReducedWord::power(Letter::B, l)
        .mul(&ReducedWord::letter(Letter::A))
        .mul(&ReducedWord::power(Letter::B, -l)))
}

/// Deterministic, co-deterministic labelled graph whose closed walks at the
/// base state read exactly the subgroup's elements.
#[derive(Clone, Debug)]
pub struct FoldedAutomaton {
    edges: Vec<[Option<usize>; 4]>,
    base: usize,
}

impl FoldedAutomaton {
    pub fn build(spec: &SubgroupSpec) -> Self {
        let mut folder = Folder::default();
        let base = folder.add_state();
        for (_, word) in spec.generators() {
            let letters = word.letters();
            let mut cur = base;
            for (i, &l) in letters.iter().enumerate() {
                let next = if i + 1 == letters.len() { base } else { folder.add_state() };
                folder.pending.push((cur, l, next));
                cur = next;
            }
        }
        folder.fold();
        folder.finish(base)
    }

    pub fn state_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(|e| e.iter().flatten().count()).sum::<usize>() / 2
    }

    pub fn accepts(&self, w: &ReducedWord) -> bool {
        let mut state = self.base;
        for &l in w.letters() {
            match self.edges[state][l.index()] {
                Some(next) => state = next,
                None => return false,
            }
        }
        state == self.base
    }
}

#[derive(Default)]
struct Folder {
    uf: UnionFind,
    edges: Vec<[Option<usize>; 4]>,
    pending: Vec<(usize, Letter, usize)>,
}

impl Folder {
    fn add_state(&mut self) -> usize {
        self.edges.push([None; 4]);
        self.uf.push()
    }

    fn fold(&mut self) {
        while let Some((u, l, v)) = self.pending.pop() {
            let u = self.uf.find(u);
            let v = self.uf.find(v);
            self.attach(u, l, v);
            self.attach(v, l.inverse(), u);
        }
    }

    fn attach(&mut self, u: usize, l: Letter, v: usize) {
        match self.edges[u][l.index()] {
            Some(w) => {
                let w = self.uf.find(w);
                if w != v {
                    self.merge(w, v);
                }
            }
            None => self.edges[u][l.index()] = Some(v),
        }
    }

    fn merge(&mut self, a: usize, b: usize) {
        let (keep, gone) = self.uf.union(a, b);
        if keep == gone {
            return;
        }
        let moved = std::mem::replace(&mut self.edges[gone], [None; 4]);
        for l in Letter::ALL {
            if let Some(t) = moved[l.index()] {
                self.pending.push((keep, l, t));
            }
        }
    }

    fn finish(mut self, base: usize) -> FoldedAutomaton {
        let n = self.edges.len();
        let mut renumber = vec![usize::MAX; n];
        let mut count = 0;
        for s in 0..n {
            if self.uf.find(s) == s {
                renumber[s] = count;
                count += 1;
            }
        }
        let mut edges = vec![[None; 4]; count];
        for s in 0..n {
            if self.uf.find(s) != s {
                continue;
            }
            for l in Letter::ALL {
                if let Some(t) = self.edges[s][l.index()] {
                    let t = self.uf.find(t);
                    edges[renumber[s]][l.index()] = Some(renumber[t]);
                }
            }
        }
        let base = renumber[self.uf.find(base)];
        FoldedAutomaton { edges, base }
    }
}

/// Membership test bundling a spec with its automaton.
#[derive(Clone, Debug)]
pub struct Membership {
    spec: SubgroupSpec,
    automaton: FoldedAutomaton,
}

impl Membership {
    pub fn new(spec: &SubgroupSpec) -> Self {
        Membership { spec: spec.clone(), automaton: FoldedAutomaton::build(spec) }
    }

    pub fn spec(&self) -> &SubgroupSpec {
        &self.spec
    }

    pub fn automaton(&self) -> &FoldedAutomaton {
        &self.automaton
    }

    pub fn contains(&self, w: &ReducedWord) -> bool {
        self.automaton.accepts(w)
    }

    /// Whether `g` and `h` lie in the same left coset.
    pub fn same_coset(&self, g: &ReducedWord, h: &ReducedWord) -> bool {
        self.contains(&g.left_divide(h))
    }

    pub fn coset_partition(&self, path: &TreePath) -> CosetPartition {
        let vertices = path.vertices();
        let mut uf = UnionFind::with_len(vertices.len());
        if !self.spec.indices().is_empty() {
            for i in 0..vertices.len() {
                for j in i + 1..vertices.len() {
                    if uf.find(i) != uf.find(j) && self.same_coset(&vertices[i], &vertices[j]) {
                        uf.union(i, j);
                    }
                }
            }
        }
        let mut groups: BTreeMap<usize, VertexSet> = BTreeMap::new();
        for (i, v) in vertices.into_iter().enumerate() {
            groups.entry(uf.find(i)).or_default().insert(v);
        }
        let mut cells: Vec<VertexSet> = groups.into_values().collect();
        cells.sort();
        CosetPartition { cells }
    }
}

pub fn is_member(w: &ReducedWord, spec: &SubgroupSpec) -> bool {
    FoldedAutomaton::build(spec).accepts(w)
}

pub fn coset_partition(path: &TreePath, spec: &SubgroupSpec) -> CosetPartition {
    Membership::new(spec).coset_partition(path)
}

/// Path vertices grouped by left coset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CosetPartition {
    pub cells: Vec<VertexSet>,
}

impl CosetPartition {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn non_singleton(&self) -> impl Iterator<Item = &VertexSet> {
        self.cells.iter().filter(|c| c.len() > 1)
    }
}

/// Searches products `t_{i1}^{k1} ... t_{im}^{km}` (adjacent indices distinct)
/// with `sum |k_j| <= |w|` and at most `max_syllables` factors.
///
/// Any product of that shape keeps all of its `a` letters after reduction, so
/// the exponent budget is complete; only the syllable bound can cut the search
/// short, and that is reported as [`SubgroupError::BoundExceeded`].
pub fn membership_oracle_bfs(
    w: &ReducedWord,
    spec: &SubgroupSpec,
    max_syllables: usize,
) -> Result<bool, SubgroupError> {
    if w.is_identity() {
        return Ok(true);
    }
    let gens = spec.generators();
    let budget = w.len();
    let mut truncated = false;
    let found = search(w, &gens, budget, max_syllables, &ReducedWord::identity(), None, &mut truncated);
    if found {
        Ok(true)
    } else if truncated {
        Err(SubgroupError::BoundExceeded { max_syllables })
    } else {
        Ok(false)
    }
}

fn search(
    target: &ReducedWord,
    gens: &[(u32, ReducedWord)],
    budget: usize,
    syllables_left: usize,
    acc: &ReducedWord,
    last: Option<usize>,
    truncated: &mut bool,
) -> bool {
    if acc == target {
        return true;
    }
    if budget == 0 {
        return false;
    }
    if syllables_left == 0 {
        *truncated = true;
        return false;
    }
    for (gi, (_, g)) in gens.iter().enumerate() {
        if Some(gi) == last {
            continue;
        }
        for sign in [1i64, -1] {
            let step = if sign > 0 { g.clone() } else { g.inverse() };
            let mut cur = acc.clone();
            for k in 1..=budget {
                cur = cur.mul(&step);
                if search(target, gens, budget - k, syllables_left - 1, &cur, Some(gi), truncated) {
                    return true;
                }
            }
        }
    }
    false
}

/// Every subgroup element of length at most `max_len`, from the same
/// normal-form products the oracle uses.
pub fn enumerate_members(spec: &SubgroupSpec, max_len: usize) -> BTreeSet<ReducedWord> {
    let gens = spec.generators();
    let mut out = BTreeSet::new();
    fn walk(
        gens: &[(u32, ReducedWord)],
        budget: usize,
        max_len: usize,
        acc: &ReducedWord,
        last: Option<usize>,
        out: &mut BTreeSet<ReducedWord>,
    ) {
        if acc.len() <= max_len {
            out.insert(acc.clone());
        }
        for (gi, (_, g)) in gens.iter().enumerate() {
            if Some(gi) == last {
                continue;
            }
            for step in [g.clone(), g.inverse()] {
                let mut cur = acc.clone();
                for k in 1..=budget {
                    cur = cur.mul(&step);
                    walk(gens, budget - k, max_len, &cur, Some(gi), out);
                }
            }
        }
    }
    walk(&gens, max_len, max_len, &ReducedWord::identity(), None, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> ReducedWord {
        s.parse().unwrap()
    }

    fn spec(indices: &[u32]) -> SubgroupSpec {
        let lengths = LengthSequence::from_pairs(&[(1, 3), (2, 6)]).unwrap();
        SubgroupSpec::new(indices.iter().copied().collect(), lengths).unwrap()
    }

    #[test]
    fn lengths_validated() {
        assert!(LengthSequence::from_pairs(&[(1, 3), (2, 3)]).is_err());
        assert!(LengthSequence::from_pairs(&[(1, 0)]).is_err());
        assert!(LengthSequence::from_pairs(&[(0, 1)]).is_err());
        let l = LengthSequence::from_pairs(&[(1, 3)]).unwrap();
        assert!(SubgroupSpec::new([2].into_iter().collect(), l).is_err());
    }

    #[test]
    fn generator_words() {
        let s = spec(&[1, 2]);
        assert_eq!(generator(1, s.lengths()).unwrap().to_string(), "bbbaBBB");
        let t2 = generator(2, s.lengths()).unwrap();
        assert_eq!(t2.len(), 13);
        assert!(t2.to_string().ends_with("BBBBBB"));
        assert!(generator(3, s.lengths()).is_err());
    }

    #[test]
    fn trivial_automaton() {
        let a = FoldedAutomaton::build(&spec(&[]));
        assert_eq!(a.state_count(), 1);
        assert_eq!(a.edge_count(), 0);
        assert!(a.accepts(&ReducedWord::identity()));
        assert!(!a.accepts(&w("a")));
    }

    #[test]
    fn folded_shape_is_stem_with_loops() {
        let a = FoldedAutomaton::build(&spec(&[1, 2]));
        // b-stem of length 6 plus two a-loops
        assert_eq!(a.state_count(), 7);
        assert_eq!(a.edge_count(), 8);
    }

    #[test]
    fn spec_membership_examples() {
        let s1 = spec(&[1]);
        assert!(is_member(&w("bbbaaaaaaaaaaBBB"), &s1));
        assert!(!is_member(&w("bbb"), &s1));
        assert!(!is_member(&w("a"), &s1));
        let s12 = spec(&[1, 2]);
        let t1 = generator(1, s12.lengths()).unwrap();
        let t2 = generator(2, s12.lengths()).unwrap();
        assert!(is_member(&t1.mul(&t2).mul(&t1.inverse()), &s12));
    }

    #[test]
    fn oracle_examples() {
        let s1 = spec(&[1]);
        assert_eq!(membership_oracle_bfs(&ReducedWord::identity(), &s1, 0), Ok(true));
        let t1 = generator(1, s1.lengths()).unwrap();
        assert_eq!(membership_oracle_bfs(&t1.mul(&t1), &s1, 2), Ok(true));
        assert_eq!(membership_oracle_bfs(&w("a"), &s1, 6), Ok(false));
        let s12 = spec(&[1, 2]);
        let t2 = generator(2, s12.lengths()).unwrap();
        let long = t1.mul(&t2).mul(&t1).mul(&t2).mul(&t1);
        assert_eq!(membership_oracle_bfs(&long, &s12, 5), Ok(true));
        assert!(matches!(
            membership_oracle_bfs(&w("bbbaBBBbab"), &s12, 1),
            Err(SubgroupError::BoundExceeded { .. })
        ));
    }

    #[test]
    fn bridge_partition() {
        let bridge = TreePath::from_steps_str(&ReducedWord::identity(), "bbbaaaaaaaaaaBBB").unwrap();
        assert_eq!(coset_partition(&bridge, &spec(&[1])).len(), 16);
        assert_eq!(coset_partition(&bridge, &spec(&[])).len(), 17);
        let run = TreePath::from_steps_str(&ReducedWord::identity(), "aaaa").unwrap();
        assert_eq!(coset_partition(&run, &spec(&[1, 2])).len(), 5);
    }
}
