//! The finite weighted graphs that model the operator on each finite class,
//! and their exact kernel at eigenvalue 4.
//!
//! Vertex order is fixed: path vertices `v1..vl`, then the two leaves of
//! each path vertex, then the extra vertex at each bad end.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::QuotientError;
use crate::geometry::{neighbourhood, ReducedWord, VertexSet};
use crate::linalg::nullspace;
use crate::rational::rational_string;
use crate::rules::{ClassLabel, Classification, RuleEngine, RuleParams};

/// Which ends of the central path are bad.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QuotientCase {
    OneOne,
    OneTwo,
    TwoTwo,
}

impl QuotientCase {
    pub const ALL: [QuotientCase; 3] = [QuotientCase::OneOne, QuotientCase::OneTwo, QuotientCase::TwoTwo];

    pub fn bad_ends(self) -> usize {
        match self {
            QuotientCase::OneOne => 0,
            QuotientCase::OneTwo => 1,
            QuotientCase::TwoTwo => 2,
        }
    }
}

impl TryFrom<ClassLabel> for QuotientCase {
    type Error = QuotientError;

    fn try_from(label: ClassLabel) -> Result<Self, Self::Error> {
        match label {
            ClassLabel::OneOne => Ok(QuotientCase::OneOne),
            ClassLabel::OneTwo => Ok(QuotientCase::OneTwo),
            ClassLabel::TwoTwo => Ok(QuotientCase::TwoTwo),
            other => Err(QuotientError::NotFinite(other.to_string())),
        }
    }
}

impl fmt::Display for QuotientCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuotientCase::OneOne => "(1,1)",
            QuotientCase::OneTwo => "(1,2)",
            QuotientCase::TwoTwo => "(2,2)",
        })
    }
}

impl FromStr for QuotientCase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s.chars().filter(|c| c.is_ascii_digit()).collect();
        match key.as_str() {
            "11" => Ok(QuotientCase::OneOne),
            "12" => Ok(QuotientCase::OneTwo),
            "22" => Ok(QuotientCase::TwoTwo),
            _ => Err(format!("unknown case {s:?}; expected 1,1 or 1,2 or 2,2")),
        }
    }
}

/// Role of a quotient graph vertex; indices are 1-based as in `v1..vl`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexRole {
    Path(usize),
    Leaf(usize, usize),
    /// Extra vertex hanging off the bad end `v_i`.
    Extra(usize),
    /// Weight-0 padding, only used to test invariance.
    Isolated(usize),
}

impl fmt::Display for VertexRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexRole::Path(i) => write!(f, "v{i}"),
            VertexRole::Leaf(i, j) => write!(f, "v{i},{j}"),
            VertexRole::Extra(i) => write!(f, "v{i}'"),
            VertexRole::Isolated(k) => write!(f, "z{k}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedGraph {
    roles: Vec<VertexRole>,
    index: BTreeMap<VertexRole, usize>,
    weights: BTreeMap<(usize, usize), BigRational>,
}

impl WeightedGraph {
    pub fn new(roles: Vec<VertexRole>) -> Self {
        let index = roles.iter().enumerate().map(|(i, r)| (*r, i)).collect();
        WeightedGraph { roles, index, weights: BTreeMap::new() }
    }

    /// Sets the symmetric weight between two roles; zero removes the edge.
    pub fn set_weight(&mut self, u: VertexRole, v: VertexRole, w: BigRational) {
        let (a, b) = (self.index[&u], self.index[&v]);
        let key = (a.min(b), a.max(b));
        if w.is_zero() {
            self.weights.remove(&key);
        } else {
            self.weights.insert(key, w);
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.roles.len()
    }

    pub fn edge_count(&self) -> usize {
        self.weights.len()
    }

    pub fn roles(&self) -> &[VertexRole] {
        &self.roles
    }

    pub fn index_of(&self, role: VertexRole) -> Option<usize> {
        self.index.get(&role).copied()
    }

    pub fn weight(&self, u: usize, v: usize) -> BigRational {
        self.weights.get(&(u.min(v), u.max(v))).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &BigRational)> {
        self.weights.iter().map(|(&(u, v), w)| (u, v, w))
    }

    /// Adds `k` vertices with no edges.
    pub fn with_isolated(&self, k: usize) -> WeightedGraph {
        let mut roles = self.roles.clone();
        roles.extend((1..=k).map(VertexRole::Isolated));
        let mut g = WeightedGraph::new(roles);
        g.weights = self.weights.clone();
        g
    }

    /// Dense `Q - lambda I`.
    pub fn shifted_matrix(&self, lambda: &BigRational) -> Vec<Vec<BigRational>> {
        let n = self.vertex_count();
        let mut m = vec![vec![BigRational::zero(); n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = -lambda.clone();
        }
        for (u, v, w) in self.edges() {
            m[u][v] = w.clone();
            m[v][u] = w.clone();
        }
        m
    }

    pub fn apply(&self, x: &[BigRational]) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); self.vertex_count()];
        for (u, v, w) in self.edges() {
            out[u] += w * &x[v];
            out[v] += w * &x[u];
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "vertices": self.roles.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
            "edges": self.edges().map(|(u, v, w)| json!([self.roles[u].to_string(), self.roles[v].to_string(), rational_string(w)])).collect::<Vec<_>>(),
        })
    }
}

fn two() -> BigRational {
    BigRational::from_integer(2.into())
}

pub fn build_quotient_graph(len: usize, case: QuotientCase, params: &RuleParams) -> Result<WeightedGraph, QuotientError> {
    if len < params.min_central_vertices.max(2) {
        return Err(QuotientError::TooShort(len));
    }
    let bad_ends: Vec<usize> = match case {
        QuotientCase::OneOne => vec![],
        QuotientCase::OneTwo => vec![len],
        QuotientCase::TwoTwo => vec![1, len],
    };
    let mut roles: Vec<VertexRole> = (1..=len).map(VertexRole::Path).collect();
    roles.extend((1..=len).flat_map(|i| [VertexRole::Leaf(i, 1), VertexRole::Leaf(i, 2)]));
    roles.extend(bad_ends.iter().map(|&i| VertexRole::Extra(i)));
    let mut g = WeightedGraph::new(roles);
    for i in 1..=len {
        if i < len {
            g.set_weight(VertexRole::Path(i), VertexRole::Path(i + 1), two());
        }
        for j in 1..=2 {
            g.set_weight(VertexRole::Path(i), VertexRole::Leaf(i, j), two());
        }
    }
    let bad_edge = BigRational::one() + &params.bad_weight;
    for &i in &bad_ends {
        g.set_weight(VertexRole::Path(i), VertexRole::Extra(i), bad_edge.clone());
    }
    Ok(g)
}

/// Kernel of `Q - 4` as primitive integer vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelBasis {
    vectors: Vec<Vec<BigInt>>,
}

impl KernelBasis {
    pub fn nullity(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<BigInt>] {
        &self.vectors
    }

    pub fn rational_vectors(&self) -> Vec<Vec<BigRational>> {
        self.vectors.iter().map(|v| v.iter().cloned().map(BigRational::from_integer).collect()).collect()
    }
}

pub fn four() -> BigRational {
    BigRational::from_integer(4.into())
}

pub fn kernel_at_4(graph: &WeightedGraph) -> KernelBasis {
    KernelBasis { vectors: nullspace(&graph.shifted_matrix(&four()), graph.vertex_count()) }
}

/// Real form of the periodic eigenvector on the `(1,1)` graph of length
/// `len`: path values repeat `1,1,0,-1,-1,0`, leaves carry half their path
/// value. Ordered like `build_quotient_graph`.
pub fn explicit_eigenvector(len: usize) -> Result<Vec<BigRational>, QuotientError> {
    if len < 2 || len % 3 != 2 {
        return Err(QuotientError::NotAdmissible(len));
    }
    const PATTERN: [i64; 6] = [1, 1, 0, -1, -1, 0];
    let path: Vec<BigRational> = (0..len).map(|i| BigRational::from_integer(PATTERN[i % 6].into())).collect();
    let half = BigRational::new(1.into(), 2.into());
    let leaves = path.iter().flat_map(|x| {
        let h = x * &half;
        [h.clone(), h]
    });
    Ok(path.iter().cloned().chain(leaves).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NullityRow {
    pub len: usize,
    pub case: QuotientCase,
    pub nullity: usize,
}

pub fn nullity_table(lens: std::ops::RangeInclusive<usize>, cases: &[QuotientCase], params: &RuleParams) -> Result<Vec<NullityRow>, QuotientError> {
    let jobs: Vec<(usize, QuotientCase)> = lens.flat_map(|l| cases.iter().map(move |&c| (l, c))).collect();
    jobs.into_par_iter()
        .map(|(len, case)| {
            let g = build_quotient_graph(len, case, params)?;
            Ok(NullityRow { len, case, nullity: kernel_at_4(&g).nullity() })
        })
        .collect()
}

pub fn nullity_csv(rows: &[NullityRow]) -> String {
    let mut out = String::from("length,case,nullity\n");
    for r in rows {
        out.push_str(&format!("{},\"{}\",{}\n", r.len, r.case, r.nullity));
    }
    out
}

/// Lengths carrying the eigenvalue 4 on `(1,1)` graphs, read off the table.
pub fn eigen_lengths(rows: &[NullityRow]) -> Vec<usize> {
    rows.iter().filter(|r| r.case == QuotientCase::OneOne && r.nullity > 0).map(|r| r.len).collect()
}

/// A weight-preserving map from the quotient graph into the ball `B(P,1)`.
#[derive(Clone, Debug)]
pub struct RuleIsomorphism {
    pub graph: WeightedGraph,
    /// Image of each graph vertex, in graph order.
    pub image: Vec<ReducedWord>,
    /// Points of `B(P,1)` with no positive-weight edge, left out of the map.
    pub dropped: VertexSet,
}

impl RuleIsomorphism {
    pub fn to_json(&self) -> Value {
        json!({
            "graph": self.graph.to_json(),
            "map": self.graph.roles().iter().zip(&self.image).map(|(r, g)| json!([r.to_string(), g.to_string()])).collect::<Vec<_>>(),
            "dropped": self.dropped.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// Matches the rule weights on `B(P,1)` against the quotient graph of the
/// classification's case, and checks that no weight leaves `B(P,1)`.
pub fn check_rule_isomorphism(class: &Classification, engine: &RuleEngine<'_>) -> Result<RuleIsomorphism, QuotientError> {
    let case = QuotientCase::try_from(class.label)?;
    let inner = class.inner.as_ref().ok_or_else(|| QuotientError::Mismatch("classification has no path".into()))?;
    let path = inner.vertices();
    let len = path.len();
    let graph = build_quotient_graph(len, case, engine.params())?;
    let mismatch = |m: String| QuotientError::Mismatch(m);

    let mut extras: BTreeMap<usize, ReducedWord> = BTreeMap::new();
    match (case, class.bad_neighbours.as_slice()) {
        (QuotientCase::OneOne, []) => {}
        (QuotientCase::OneTwo, [b]) => {
            extras.insert(len, b.clone());
        }
        (QuotientCase::TwoTwo, [b1, b2]) => {
            extras.insert(1, b1.clone());
            extras.insert(len, b2.clone());
        }
        _ => return Err(mismatch(format!("{} bad neighbours for case {case}", class.bad_neighbours.len()))),
    }

    let mut image: BTreeMap<VertexRole, ReducedWord> = BTreeMap::new();
    for (i, g) in path.iter().enumerate() {
        image.insert(VertexRole::Path(i + 1), g.clone());
    }
    for (&i, b) in &extras {
        image.insert(VertexRole::Extra(i), b.clone());
    }
    for (i, g) in path.iter().enumerate() {
        let mut leaves = Vec::new();
        for s in crate::geometry::Letter::ALL {
            let h = g.mul_letter(s);
            if path.contains(&h) || extras.values().any(|b| *b == h) {
                continue;
            }
            if !engine.edge_weight(g, s)?.is_zero() {
                leaves.push(h);
            }
        }
        leaves.sort();
        if leaves.len() != 2 {
            return Err(mismatch(format!("{g} has {} off-path neighbours of positive weight", leaves.len())));
        }
        for (j, h) in leaves.into_iter().enumerate() {
            image.insert(VertexRole::Leaf(i + 1, j + 1), h);
        }
    }

    let image: Vec<ReducedWord> = graph.roles().iter().map(|r| image[r].clone()).collect();
    let preimage: BTreeMap<&ReducedWord, usize> = image.iter().enumerate().map(|(i, g)| (g, i)).collect();
    if preimage.len() != image.len() {
        return Err(mismatch("map is not injective".into()));
    }
    let ball = neighbourhood(&inner.vertex_set(), 1);
    let mut dropped = VertexSet::new();
    for g in &ball {
        for s in crate::geometry::Letter::ALL {
            let h = g.mul_letter(s);
            let w = engine.edge_weight(g, s)?;
            let expected = match (preimage.get(g), preimage.get(&h)) {
                (Some(&u), Some(&v)) => graph.weight(u, v),
                _ => BigRational::zero(),
            };
            if w != expected {
                return Err(mismatch(format!(
                    "weight {} on {g}-{h}, model has {}",
                    rational_string(&w),
                    rational_string(&expected)
                )));
            }
        }
        if !preimage.contains_key(g) {
            dropped.insert(g.clone());
        }
    }
    if dropped.len() > 2 {
        return Err(mismatch(format!("{} isolated points in B(P,1)", dropped.len())));
    }
    Ok(RuleIsomorphism { graph, image, dropped })
}
