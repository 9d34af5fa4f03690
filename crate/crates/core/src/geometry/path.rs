use std::fmt;

use serde::{Deserialize, Serialize};

use super::{is_connected, Letter, ReducedWord, VertexSet};
use crate::error::GeometryError;

/// A simple path in the Cayley tree, given by a base vertex and backtrack-free
/// steps. `vertex_count` is always `steps.len() + 1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "PathRepr", into = "PathRepr")]
pub struct TreePath {
    base: ReducedWord,
    steps: Vec<Letter>,
}

#[derive(Serialize, Deserialize)]
struct PathRepr {
    base: ReducedWord,
    steps: String,
}

impl TryFrom<PathRepr> for TreePath {
    type Error = GeometryError;
    fn try_from(r: PathRepr) -> Result<Self, Self::Error> {
        TreePath::from_steps_str(&r.base, &r.steps)
    }
}

impl From<TreePath> for PathRepr {
    fn from(p: TreePath) -> Self {
        PathRepr { base: p.base.clone(), steps: p.step_string() }
    }
}

/// A horizontal run that makes the path fail the dogleg-free test.
/// The main segment is the run's `run_len + 1` vertices starting at `start`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dogleg {
    pub start: usize,
    pub run_len: usize,
}

impl TreePath {
    pub fn new(base: ReducedWord, steps: Vec<Letter>) -> Result<Self, GeometryError> {
        for i in 1..steps.len() {
            if steps[i] == steps[i - 1].inverse() {
                return Err(GeometryError::Backtrack { index: i });
            }
        }
        Ok(TreePath { base, steps })
    }

    pub fn singleton(base: ReducedWord) -> Self {
        TreePath { base, steps: Vec::new() }
    }

    /// Steps written over `a A b B`; `""` or `"e"` gives a single vertex.
    pub fn from_steps_str(base: &ReducedWord, steps: &str) -> Result<Self, GeometryError> {
        let steps = steps.trim();
        let steps = if steps == "e" { "" } else { steps };
        let letters = steps
            .chars()
            .map(|c| Letter::from_char(c).ok_or(GeometryError::BadLetter(c)))
            .collect::<Result<Vec<_>, _>>()?;
        TreePath::new(base.clone(), letters)
    }

    /// Orders a vertex set into a path, starting from its least endpoint.
    pub fn from_vertex_set(set: &VertexSet) -> Result<Self, GeometryError> {
        let start = set.iter().next().ok_or(GeometryError::EmptyPath)?;
        if !is_connected(set) {
            return Err(GeometryError::NotAPath);
        }
        let degree = |v: &ReducedWord| v.neighbours().iter().filter(|n| set.contains(n)).count();
        if set.iter().any(|v| degree(v) > 2) {
            return Err(GeometryError::NotAPath);
        }
        let first = set.iter().find(|v| degree(v) <= 1).unwrap_or(start).clone();
        let mut steps = Vec::with_capacity(set.len() - 1);
        let mut prev: Option<ReducedWord> = None;
        let mut cur = first.clone();
        while steps.len() + 1 < set.len() {
            let next = Letter::ALL
                .into_iter()
                .map(|l| (l, cur.mul_letter(l)))
                .find(|(_, n)| set.contains(n) && Some(n) != prev.as_ref())
                .ok_or(GeometryError::NotAPath)?;
            steps.push(next.0);
            prev = Some(std::mem::replace(&mut cur, next.1));
        }
        TreePath::new(first, steps)
    }

    pub fn base(&self) -> &ReducedWord {
        &self.base
    }

    pub fn steps(&self) -> &[Letter] {
        &self.steps
    }

    pub fn vertex_count(&self) -> usize {
        self.steps.len() + 1
    }

    pub fn step_string(&self) -> String {
        self.steps.iter().map(|l| l.to_char()).collect()
    }

    pub fn vertices(&self) -> Vec<ReducedWord> {
        let mut out = Vec::with_capacity(self.vertex_count());
        let mut cur = self.base.clone();
        for &s in &self.steps {
            let next = cur.mul_letter(s);
            out.push(cur);
            cur = next;
        }
        out.push(cur);
        out
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.vertices().into_iter().collect()
    }

    pub fn last(&self) -> ReducedWord {
        self.base.mul(&ReducedWord::reduce(self.steps.iter().copied()))
    }

    /// Same vertex set traversed from the other end.
    pub fn reversed(&self) -> TreePath {
        TreePath {
            base: self.last(),
            steps: self.steps.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// `g * P`.
    pub fn translate(&self, g: &ReducedWord) -> TreePath {
        TreePath { base: g.mul(&self.base), steps: self.steps.clone() }
    }

    /// The path moved so that it starts at the identity.
    pub fn rebased(&self) -> TreePath {
        TreePath { base: ReducedWord::identity(), steps: self.steps.clone() }
    }
}

impl fmt::Display for TreePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.steps.is_empty() {
            write!(f, "{}:e", self.base)
        } else {
            write!(f, "{}:{}", self.base, self.step_string())
        }
    }
}

impl fmt::Debug for TreePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Every short horizontal run that touches a vertical step, including runs
/// that start or end at an endpoint of the path.
pub fn horizontal_doglegs(steps: &[Letter], max_run: usize) -> Vec<Dogleg> {
    let mut out = Vec::new();
    let n = steps.len();
    let mut i = 0;
    while i < n {
        if !steps[i].is_horizontal() {
            i += 1;
            continue;
        }
        let mut j = i;
        while j < n && steps[j].is_horizontal() {
            j += 1;
        }
        let run = j - i;
        // A maximal run is bordered by vertical steps or path ends; only the
        // run covering the whole path touches no vertical step.
        if run <= max_run && !(i == 0 && j == n) {
            out.push(Dogleg { start: i, run_len: run });
        }
        i = j;
    }
    out
}

pub fn has_small_horizontal_dogleg(path: &TreePath, max_run: usize) -> bool {
    !horizontal_doglegs(path.steps(), max_run).is_empty()
}
