use rayon::prelude::*;

use super::{Letter, ReducedWord, TreePath};

/// The smaller of a path's two step words (read from either end).
pub fn canonical_steps(steps: &[Letter]) -> Vec<Letter> {
    let rev: Vec<Letter> = steps.iter().rev().map(|l| l.inverse()).collect();
    if rev.as_slice() < steps {
        rev
    } else {
        steps.to_vec()
    }
}

fn is_canonical(steps: &[Letter]) -> bool {
    let n = steps.len();
    for i in 0..n {
        let r = steps[n - 1 - i].inverse();
        match steps[i].cmp(&r) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    true
}

struct Walk<'a, F> {
    target: usize,
    max_run: usize,
    steps: Vec<Letter>,
    visit: &'a mut F,
}

impl<F: FnMut(&[Letter])> Walk<'_, F> {
    /// `run` is the length of the trailing horizontal run.
    fn go(&mut self, run: usize) {
        let n = self.steps.len();
        if n == self.target {
            let whole = run == n;
            if run > 0 && run <= self.max_run && !whole {
                return;
            }
            if is_canonical(&self.steps) {
                (self.visit)(&self.steps);
            }
            return;
        }
        let last = self.steps.last().copied();
        for l in Letter::ALL {
            if Some(l.inverse()) == last {
                continue;
            }
            let next_run = if l.is_horizontal() {
                run + 1
            } else {
                if run > 0 && run <= self.max_run {
                    continue;
                }
                0
            };
            self.steps.push(l);
            self.go(next_run);
            self.steps.pop();
        }
    }
}

/// Calls `visit` once per translation class of dogleg-free paths with exactly
/// `vertices` vertices, passing the canonical step word.
pub fn for_each_dogleg_free_class<F: FnMut(&[Letter])>(vertices: usize, max_run: usize, mut visit: F) {
    if vertices == 0 {
        return;
    }
    let mut walk = Walk { target: vertices - 1, max_run, steps: Vec::with_capacity(vertices), visit: &mut visit };
    walk.go(0);
}

/// Canonical representatives (based at `e`) of every translation class of
/// dogleg-free paths with exactly `vertices` vertices, sorted by step word.
pub fn enumerate_dogleg_free_classes(vertices: usize, max_run: usize) -> Vec<TreePath> {
    if vertices <= 2 {
        let mut out = Vec::new();
        for_each_dogleg_free_class(vertices, max_run, |s| out.push(s.to_vec()));
        return into_paths(out);
    }
    // Split by first step so that prefixes can be walked in parallel.
    let mut words: Vec<Vec<Letter>> = Letter::ALL
        .par_iter()
        .flat_map_iter(|&first| {
            let mut out = Vec::new();
            let mut visit = |s: &[Letter]| out.push(s.to_vec());
            let mut walk = Walk {
                target: vertices - 1,
                max_run,
                steps: vec![first],
                visit: &mut visit,
            };
            walk.go(usize::from(first.is_horizontal()));
            out
        })
        .collect();
    words.sort();
    into_paths(words)
}

fn into_paths(mut words: Vec<Vec<Letter>>) -> Vec<TreePath> {
    words.sort();
    words
        .into_iter()
        .map(|w| TreePath::new(ReducedWord::identity(), w).expect("walk never backtracks"))
        .collect()
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::geometry::{has_small_horizontal_dogleg, VertexSet};

    /// Independent count: every based step word, dogleg filter, bucket by the
    /// translate-normal form of the vertex set.
    fn brute_force_classes(vertices: usize, d: usize) -> usize {
        let mut words: Vec<Vec<Letter>> = vec![vec![]];
        for _ in 1..vertices {
            let mut next = Vec::new();
            for w in &words {
                for l in Letter::ALL {
                    if w.last() != Some(&l.inverse()) {
                        let mut v = w.clone();
                        v.push(l);
                        next.push(v);
                    }
                }
            }
            words = next;
        }
        let mut buckets: BTreeSet<Vec<ReducedWord>> = BTreeSet::new();
        for w in words {
            let path = TreePath::new(ReducedWord::identity(), w).unwrap();
            if has_small_horizontal_dogleg(&path, d) {
                continue;
            }
            let set = path.vertex_set();
            let key = set
                .iter()
                .map(|g| {
                    let shifted: VertexSet = set.iter().map(|h| g.left_divide(h)).collect();
                    shifted.into_iter().collect::<Vec<_>>()
                })
                .min()
                .unwrap();
            buckets.insert(key);
        }
        buckets.len()
    }

    #[test]
    fn spec_examples() {
        let five = enumerate_dogleg_free_classes(5, 9);
        let names: Vec<String> = five.iter().map(|p| p.step_string()).collect();
        assert_eq!(names, vec!["aaaa", "bbbb"]);
        assert_eq!(enumerate_dogleg_free_classes(1, 9).len(), 1);
        let bridge: Vec<Letter> = "bbbaaaaaaaaaaBBB".chars().map(|c| Letter::from_char(c).unwrap()).collect();
        let seventeen = enumerate_dogleg_free_classes(17, 9);
        assert!(seventeen.iter().any(|p| p.steps() == canonical_steps(&bridge).as_slice()));
    }

    #[test]
    fn counts_match_brute_force() {
        for vertices in 1..=9 {
            for d in [0usize, 1, 2, 9] {
                assert_eq!(
                    enumerate_dogleg_free_classes(vertices, d).len(),
                    brute_force_classes(vertices, d),
                    "vertices={vertices} d={d}"
                );
            }
        }
    }

    #[test]
    fn representatives_are_stable_under_translation() {
        for p in enumerate_dogleg_free_classes(8, 1) {
            assert!(!has_small_horizontal_dogleg(&p, 1));
            let set = p.vertex_set();
            for g in crate::geometry::neighbourhood(&set, 1) {
                let moved = p.translate(&g);
                let again = TreePath::from_vertex_set(&moved.vertex_set()).unwrap();
                assert_eq!(canonical_steps(again.steps()), p.steps());
            }
        }
    }
}
