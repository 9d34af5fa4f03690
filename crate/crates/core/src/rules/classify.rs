use std::fmt;

use serde::Serialize;
use serde_json::{json, Value};

use super::{Configuration, RuleEngine, RuleParams};
use crate::error::RuleError;
use crate::geometry::{Letter, ReducedWord, TreePath, VertexSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ClassLabel {
    Inert,
    OneOne,
    OneTwo,
    TwoTwo,
    OneInfinite,
    TwoInfinite,
    InfiniteInfinite,
    Undetermined,
}

impl ClassLabel {
    pub fn is_finite_class(self) -> bool {
        matches!(self, ClassLabel::OneOne | ClassLabel::OneTwo | ClassLabel::TwoTwo)
    }

    /// Number of bad ends, for the finite classes.
    pub fn bad_ends(self) -> Option<usize> {
        match self {
            ClassLabel::OneOne => Some(0),
            ClassLabel::OneTwo => Some(1),
            ClassLabel::TwoTwo => Some(2),
            _ => None,
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassLabel::Inert => "C0",
            ClassLabel::OneOne => "(1,1)",
            ClassLabel::OneTwo => "(1,2)",
            ClassLabel::TwoTwo => "(2,2)",
            ClassLabel::OneInfinite => "(1,inf)",
            ClassLabel::TwoInfinite => "(2,inf)",
            ClassLabel::InfiniteInfinite => "(inf,inf)",
            ClassLabel::Undetermined => "UNDETERMINED",
        })
    }
}

/// How one walker's journey ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Walk {
    /// Stopped at an end of the zero path.
    GoodEnd,
    /// Stopped before `bad`, the first vertex that is not locally good.
    BadEnd { bad: ReducedWord },
}

/// Outcome of classifying the configuration seen from `origin`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub origin: ReducedWord,
    pub label: ClassLabel,
    /// Walked path; for one bad end it runs from the good end to the bad one.
    pub inner: Option<TreePath>,
    /// `inner` extended past each bad end, oriented the same way.
    pub outer: Option<TreePath>,
    /// Zeros of the configuration on `B(outer, rho)` minus `outer`; every
    /// other vertex there is 1.
    pub exterior_zeros: Option<VertexSet>,
    /// For each bad end of `inner` (first end first), its neighbour on
    /// `outer` beyond `inner`.
    pub bad_neighbours: Vec<ReducedWord>,
    pub note: Option<String>,
}

impl Classification {
    fn bare(origin: &ReducedWord, label: ClassLabel, note: Option<String>) -> Self {
        Classification {
            origin: origin.clone(),
            label,
            inner: None,
            outer: None,
            exterior_zeros: None,
            bad_neighbours: Vec::new(),
            note,
        }
    }

    /// Value forced on `v` by membership in this triple's cylinder.
    pub fn cylinder_value(&self, v: &ReducedWord, rho: usize) -> Option<bool> {
        let outer = self.outer.as_ref()?;
        let verts = outer.vertices();
        if verts.contains(v) {
            return Some(false);
        }
        if verts.iter().any(|r| r.distance(v) <= rho) {
            return Some(!self.exterior_zeros.as_ref()?.contains(v));
        }
        None
    }

    /// Whether the two triples' cylinders share a point.
    pub fn cylinder_meets(&self, other: &Classification, rho: usize) -> bool {
        let Some(a) = &self.outer else {
            return false;
        };
        if other.outer.is_none() {
            return false;
        }
        crate::geometry::neighbourhood(&a.vertex_set(), rho).iter().all(|v| {
            match other.cylinder_value(v, rho) {
                Some(x) => Some(x) == self.cylinder_value(v, rho),
                None => true,
            }
        })
    }

    /// Whether `cfg` lies in this triple's cylinder.
    pub fn contains(&self, cfg: &Configuration, rho: usize) -> bool {
        let Some(outer) = &self.outer else {
            return false;
        };
        let dom = crate::geometry::neighbourhood(&outer.vertex_set(), rho);
        dom.iter().all(|v| cfg.value(v) == self.cylinder_value(v, rho))
    }

    pub fn to_json(&self) -> Value {
        let path = |p: &Option<TreePath>| match p {
            Some(p) => json!({ "base": p.base().to_string(), "steps": p.step_string(), "vertices": p.vertex_count() }),
            None => Value::Null,
        };
        let psi = match &self.exterior_zeros {
            Some(z) => json!({ "default": 1, "zeros": z.iter().map(|v| v.to_string()).collect::<Vec<_>>() }),
            None => Value::Null,
        };
        json!({
            "origin": self.origin.to_string(),
            "label": self.label.to_string(),
            "inner": path(&self.inner),
            "outer": path(&self.outer),
            "psi": psi,
            "bad_neighbours": self.bad_neighbours.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "note": self.note,
        })
    }
}

pub fn classify(cfg: &Configuration, params: &RuleParams) -> Result<Classification, RuleError> {
    classify_at(&RuleEngine::new(cfg, params), &ReducedWord::identity())
}

fn undetermined(origin: &ReducedWord, err: RuleError) -> Result<Classification, RuleError> {
    match err {
        RuleError::InsufficientDomain { .. } => {
            Ok(Classification::bare(origin, ClassLabel::Undetermined, Some(err.to_string())))
        }
        other => Err(other),
    }
}

/// Classifies the configuration seen from `origin`.
pub fn classify_at(engine: &RuleEngine<'_>, origin: &ReducedWord) -> Result<Classification, RuleError> {
    if engine.is_inert(origin)? {
        return Ok(Classification::bare(origin, ClassLabel::Inert, None));
    }
    match walk_out(engine, origin) {
        Ok(c) => Ok(c),
        Err(e) => undetermined(origin, e),
    }
}

fn walk_out(engine: &RuleEngine<'_>, origin: &ReducedWord) -> Result<Classification, RuleError> {
    let params = engine.params();
    let rho = params.rho as usize;
    let mut start = None;
    for cand in std::iter::once(origin.clone()).chain(Letter::ALL.map(|l| origin.mul_letter(l))) {
        if engine.is_locally_good(&cand)? {
            start = Some(cand);
            break;
        }
    }
    let start = start.ok_or_else(|| {
        RuleError::RuleViolation(format!("{origin} carries weight but no nearby point is locally good"))
    })?;
    let view = engine.view(&start)?;
    let dirs = view.neighbours_of(&start);
    if dirs.is_empty() {
        return Err(RuleError::RuleViolation(format!("locally good {start} is isolated")));
    }
    let (left, left_end) = walk(engine, &start, &dirs[0])?;
    let (right, right_end) = match dirs.get(1) {
        Some(d) => walk(engine, &start, d)?,
        None => (Vec::new(), Walk::GoodEnd),
    };

    let mut verts: Vec<ReducedWord> = left.into_iter().rev().collect();
    verts.push(start);
    verts.extend(right);
    let mut ends = [left_end, right_end];
    let bad_count = ends.iter().filter(|w| matches!(w, Walk::BadEnd { .. })).count();
    let reverse = match bad_count {
        1 => matches!(ends[0], Walk::BadEnd { .. }),
        _ => verts.last() < verts.first(),
    };
    if reverse {
        verts.reverse();
        ends.swap(0, 1);
    }
    if verts.len() < params.min_central_vertices {
        return Err(RuleError::RuleViolation(format!(
            "walkers covered {} vertices, fewer than {}",
            verts.len(),
            params.min_central_vertices
        )));
    }
    let label = match bad_count {
        0 => ClassLabel::OneOne,
        1 => ClassLabel::OneTwo,
        _ => ClassLabel::TwoTwo,
    };

    let cfg = engine.config();
    let mut outer = verts.clone();
    let mut bad_neighbours = Vec::new();
    if let Walk::BadEnd { bad } = &ends[0] {
        let ext = extend(cfg, &verts[0], bad, rho)?;
        bad_neighbours.push(bad.clone());
        outer = ext.into_iter().rev().chain(outer).collect();
    }
    if let Walk::BadEnd { bad } = &ends[1] {
        let ext = extend(cfg, verts.last().expect("nonempty"), bad, rho)?;
        bad_neighbours.push(bad.clone());
        outer.extend(ext);
    }
    for r in &outer {
        cfg.require(r, rho)?;
    }
    let exterior_zeros: VertexSet = cfg
        .zeros()
        .iter()
        .filter(|z| !outer.contains(z) && outer.iter().any(|r| r.distance(z) <= rho))
        .cloned()
        .collect();
    let to_path = |vs: &[ReducedWord]| {
        let steps = vs.windows(2).map(|w| w[0].step_to(&w[1]).expect("walk is connected")).collect();
        TreePath::new(vs[0].clone(), steps).expect("walk never backtracks")
    };
    Ok(Classification {
        origin: origin.clone(),
        label,
        inner: Some(to_path(&verts)),
        outer: Some(to_path(&outer)),
        exterior_zeros: Some(exterior_zeros),
        bad_neighbours,
        note: None,
    })
}

/// Follows the zero path from `start` through `first` while points stay
/// locally good. Returns the good vertices visited after `start`.
fn walk(
    engine: &RuleEngine<'_>,
    start: &ReducedWord,
    first: &ReducedWord,
) -> Result<(Vec<ReducedWord>, Walk), RuleError> {
    let mut visited = Vec::new();
    let mut prev = start.clone();
    let mut next = first.clone();
    loop {
        if !engine.is_locally_good(&next)? {
            return Ok((visited, Walk::BadEnd { bad: next }));
        }
        visited.push(next.clone());
        let cur = next;
        let view = engine.view(&cur)?;
        let onward: Vec<ReducedWord> = view.neighbours_of(&cur).into_iter().filter(|n| *n != prev).collect();
        match onward.as_slice() {
            [] => return Ok((visited, Walk::GoodEnd)),
            [n] => {
                next = n.clone();
                prev = cur;
            }
            _ => return Err(RuleError::RuleViolation(format!("view at {cur} forks"))),
        }
    }
}

/// `bad` followed by up to `rho` further zeros continuing the path away
/// from `end`; stops early at a fork or at the end of the zeros.
fn extend(cfg: &Configuration, end: &ReducedWord, bad: &ReducedWord, rho: usize) -> Result<Vec<ReducedWord>, RuleError> {
    let mut out = vec![bad.clone()];
    let mut prev = end.clone();
    let mut cur = bad.clone();
    for _ in 0..rho {
        cfg.require(&cur, 1)?;
        let onward: Vec<ReducedWord> =
            cur.neighbours().into_iter().filter(|n| *n != prev && cfg.is_zero(n)).collect();
        if onward.len() != 1 {
            break;
        }
        prev = std::mem::replace(&mut cur, onward[0].clone());
        out.push(cur.clone());
    }
    Ok(out)
}
