//! Cayley tree of the free group on two letters: words, balls, paths and
//! dogleg-free path classes.

mod classes;
mod path;
mod word;

use std::collections::{BTreeSet, VecDeque};

pub use classes::{canonical_steps, enumerate_dogleg_free_classes, for_each_dogleg_free_class};
pub use path::{has_small_horizontal_dogleg, horizontal_doglegs, Dogleg, TreePath};
pub use word::{Letter, ReducedWord};

/// A finite set of tree vertices with deterministic iteration order.
pub type VertexSet = BTreeSet<ReducedWord>;

/// Every word at distance at most `radius` from `center`.
pub fn ball(center: &ReducedWord, radius: usize) -> VertexSet {
    let mut out = VertexSet::new();
    fn walk(cur: &ReducedWord, last: Option<Letter>, left: usize, out: &mut VertexSet) {
        out.insert(cur.clone());
        if left == 0 {
            return;
        }
        for l in Letter::ALL {
            if Some(l.inverse()) == last {
                continue;
            }
            walk(&cur.mul_letter(l), Some(l), left - 1, out);
        }
    }
    walk(center, None, radius, &mut out);
    out
}

/// Every vertex within distance `radius` of some vertex of `set`.
pub fn neighbourhood(set: &VertexSet, radius: usize) -> VertexSet {
    let mut out: VertexSet = set.clone();
    let mut frontier: Vec<ReducedWord> = set.iter().cloned().collect();
    for _ in 0..radius {
        let mut next = Vec::new();
        for v in &frontier {
            for n in v.neighbours() {
                if out.insert(n.clone()) {
                    next.push(n);
                }
            }
        }
        frontier = next;
    }
    out
}

/// Vertices adjacent to `set` but not in it.
pub fn boundary(set: &VertexSet) -> VertexSet {
    let mut out = VertexSet::new();
    for v in set {
        for n in v.neighbours() {
            if !set.contains(&n) {
                out.insert(n);
            }
        }
    }
    out
}

/// Closed-form size of a radius-`r` ball: `2 * 3^r - 1`.
pub fn ball_size(r: u32) -> u64 {
    2 * 3u64.pow(r) - 1
}

/// Closed-form size of the radius-`r` neighbourhood of a path with
/// `vertices` vertices: `(vertices + 1) * 3^r - 1`.
pub fn path_ball_size(vertices: u64, r: u32) -> u64 {
    (vertices + 1) * 3u64.pow(r) - 1
}

/// Whether the induced subgraph on `set` is connected.
pub fn is_connected(set: &VertexSet) -> bool {
    let Some(start) = set.iter().next() else {
        return true;
    };
    let mut seen = VertexSet::new();
    seen.insert(start.clone());
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(v) = queue.pop_front() {
        for n in v.neighbours() {
            if set.contains(&n) && seen.insert(n.clone()) {
                queue.push_back(n);
            }
        }
    }
    seen.len() == set.len()
}

/// `g * set`.
pub fn translate(g: &ReducedWord, set: &VertexSet) -> VertexSet {
    set.iter().map(|v| g.mul(v)).collect()
}
