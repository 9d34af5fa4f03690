//! GF(2) constraints cutting out `V_I^perp` on finite windows: cylinder
//! nonemptiness, the window-sum criterion, admissible counts, the extension
//! procedure and the infinite-path mass bound.
//!
//! A generator row for centre `g` and index `n` is the indicator of
//! `W(g) + W(g t_n)`, where `W(g) = { g a^i : |i| <= rho }` is the
//! horizontal window. The two windows sit on different horizontal lines, so
//! every row has weight exactly `2(2 rho + 1)`.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use rustc_hash::FxHashMap;
use serde_json::{json, Value};

use crate::error::CylinderError;
use crate::geometry::{is_connected, neighbourhood, path_ball_size, Letter, ReducedWord, TreePath, VertexSet};
use crate::gf2::{BitRow, Gf2System};
use crate::rules::{Configuration, RuleParams};
use crate::subgroup::{coset_partition, CosetPartition, SubgroupSpec};

/// `W(g)`, left to right.
pub fn window(g: &ReducedWord, rho: u32) -> Vec<ReducedWord> {
    let mut left = vec![g.clone()];
    for _ in 0..rho {
        let next = left.last().expect("nonempty").mul_letter(Letter::AInv);
        left.push(next);
    }
    left.reverse();
    for _ in 0..rho {
        let next = left.last().expect("nonempty").mul_letter(Letter::A);
        left.push(next);
    }
    left
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintRow {
    pub centre: ReducedWord,
    pub index: u32,
    /// Coordinate indices of `W(g) + W(g t_n)`.
    pub support: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct BinaryConstraintSystem {
    coords: Vec<ReducedWord>,
    index: FxHashMap<ReducedWord, usize>,
    rows: Vec<ConstraintRow>,
}

impl BinaryConstraintSystem {
    pub fn coords(&self) -> &[ReducedWord] {
        &self.coords
    }

    pub fn rows(&self) -> &[ConstraintRow] {
        &self.rows
    }

    pub fn coordinate(&self, v: &ReducedWord) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn rank(&self) -> usize {
        self.homogeneous().rank()
    }

    fn homogeneous(&self) -> Gf2System {
        let mut s = Gf2System::new(self.coords.len());
        for r in &self.rows {
            s.push(BitRow::from_ones(self.coords.len(), r.support.iter().copied()), false);
        }
        s
    }

    /// Basis of the solutions, as bit rows over `coords`.
    pub fn solution_basis(&self) -> Vec<BitRow> {
        self.homogeneous().kernel_basis()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "coords": self.coords.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "rows": self.rows.iter().map(|r| json!({ "centre": r.centre.to_string(), "index": r.index, "support": r.support })).collect::<Vec<_>>(),
        })
    }
}

/// Every generator row whose support lies in `region`.
pub fn generator_rows(spec: &SubgroupSpec, region: &VertexSet, params: &RuleParams) -> BinaryConstraintSystem {
    let coords: Vec<ReducedWord> = region.iter().cloned().collect();
    let index: FxHashMap<ReducedWord, usize> = coords.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
    // Horizontal neighbours inside the region, so windows are index walks.
    let step = |l: Letter| -> Vec<Option<usize>> { coords.iter().map(|c| index.get(&c.mul_letter(l)).copied()).collect() };
    let (right, left) = (step(Letter::A), step(Letter::AInv));
    let rho = params.rho as usize;
    let window_at = |g: usize, out: &mut Vec<usize>| -> bool {
        out.push(g);
        for next in [&right, &left] {
            let mut cur = g;
            for _ in 0..rho {
                match next[cur] {
                    Some(n) => cur = n,
                    None => return false,
                }
                out.push(cur);
            }
        }
        true
    };
    let gens = spec.generators();
    let mut rows = Vec::new();
    let mut support = Vec::with_capacity(4 * rho + 2);
    for (gi, g) in coords.iter().enumerate() {
        support.clear();
        if !window_at(gi, &mut support) {
            continue;
        }
        let base = support.len();
        for (n, t) in &gens {
            let Some(&hi) = index.get(&g.mul(t)) else { continue };
            support.truncate(base);
            if window_at(hi, &mut support) {
                let mut s = support.clone();
                s.sort_unstable();
                rows.push(ConstraintRow { centre: g.clone(), index: *n, support: s });
            }
        }
    }
    BinaryConstraintSystem { coords, index, rows }
}

/// Distance from `g` to the geodesic `[u, v]`.
fn distance_to_geodesic(u: &ReducedWord, v: &ReducedWord, g: &ReducedWord) -> usize {
    (u.distance(g) + v.distance(g) - u.distance(v)) / 2
}

/// Centres reachable from the path by right multiplication with
/// `t_n^{+-1}` without leaving distance `max l(n)` of the path.
///
/// Any two path vertices in one coset are joined by such a chain: the
/// partial products of the reduced `t`-word stay within `l(n)` of the
/// geodesic between them, which is part of the path.
pub fn chain_centres(path: &TreePath, spec: &SubgroupSpec) -> VertexSet {
    let verts = path.vertices();
    let (first, last) = (path.base().clone(), path.last());
    let reach = spec.max_length() as usize;
    let steps: Vec<ReducedWord> = spec.generators().into_iter().flat_map(|(_, t)| [t.inverse(), t]).collect();
    let mut seen: VertexSet = verts.iter().cloned().collect();
    let mut queue: VecDeque<ReducedWord> = verts.iter().cloned().collect();
    while let Some(c) = queue.pop_front() {
        for t in &steps {
            let next = c.mul(t);
            if !seen.contains(&next) && distance_to_geodesic(&first, &last, &next) <= reach {
                seen.insert(next.clone());
                queue.push_back(next);
            }
        }
    }
    seen
}

/// `B(P, rho)` together with the windows of every chain centre: large
/// enough that a finite solve decides nonemptiness for data on `B(P, rho)`.
pub fn chain_envelope(path: &TreePath, spec: &SubgroupSpec, params: &RuleParams) -> VertexSet {
    let mut env = neighbourhood(&path.vertex_set(), params.rho as usize);
    for c in chain_centres(path, spec) {
        env.extend(window(&c, params.rho));
    }
    env
}

fn finite_domain(phi: &Configuration) -> Result<VertexSet, CylinderError> {
    phi.domain_vertices().ok_or(CylinderError::InfiniteDomain)
}

/// Generator rows on a fixed envelope, ready to test many assignments.
#[derive(Clone, Debug)]
pub struct CylinderSolver {
    system: BinaryConstraintSystem,
}

impl CylinderSolver {
    pub fn new(spec: &SubgroupSpec, envelope: &VertexSet, params: &RuleParams) -> Self {
        CylinderSolver { system: generator_rows(spec, envelope, params) }
    }

    pub fn system(&self) -> &BinaryConstraintSystem {
        &self.system
    }

    /// Whether `phi` extends to an assignment of the envelope meeting every row.
    pub fn admits(&self, phi: &Configuration) -> Result<bool, CylinderError> {
        let system = &self.system;
        let domain = finite_domain(phi)?;
        if let Some(v) = domain.iter().find(|v| !system.index.contains_key(*v)) {
            return Err(CylinderError::OutsideEnvelope(v.clone()));
        }
        if system.rows.is_empty() {
            return Ok(true);
        }
        // Known coordinates carry their value, the rest get a column.
        let mut fixed: Vec<Option<bool>> = vec![None; system.coords.len()];
        let mut column = vec![usize::MAX; system.coords.len()];
        let mut free = 0;
        for (i, c) in system.coords.iter().enumerate() {
            if domain.contains(c) {
                fixed[i] = Some(!phi.is_zero(c));
            } else {
                column[i] = free;
                free += 1;
            }
        }
        let mut gf = Gf2System::new(free);
        for row in &system.rows {
            let mut rhs = false;
            let mut vars = Vec::new();
            for &i in &row.support {
                match fixed[i] {
                    Some(x) => rhs ^= x,
                    None => vars.push(column[i]),
                }
            }
            if vars.is_empty() {
                if rhs {
                    return Ok(false);
                }
                continue;
            }
            gf.push(BitRow::from_ones(free, vars), rhs);
        }
        Ok(gf.is_consistent())
    }
}

/// Whether `phi` extends to an assignment of `envelope` meeting every
/// generator row supported there.
pub fn cylinder_nonempty(
    phi: &Configuration,
    spec: &SubgroupSpec,
    envelope: &VertexSet,
    params: &RuleParams,
) -> Result<bool, CylinderError> {
    CylinderSolver::new(spec, envelope, params).admits(phi)
}

/// Parity of `phi` over `W(p)` for each path vertex, in path order.
pub fn window_sums(path: &TreePath, phi: &Configuration, params: &RuleParams) -> Result<Vec<bool>, CylinderError> {
    path.vertices()
        .iter()
        .map(|p| {
            window(p, params.rho).iter().try_fold(false, |acc, v| match phi.value(v) {
                Some(x) => Ok(acc ^ x),
                None => Err(CylinderError::OutsideEnvelope(v.clone())),
            })
        })
        .collect()
}

/// Window sums are constant on each coset cell of the path.
pub fn window_sum_criterion(
    path: &TreePath,
    phi: &Configuration,
    spec: &SubgroupSpec,
    params: &RuleParams,
) -> Result<bool, CylinderError> {
    window_sums_agree(path, phi, &coset_partition(path, spec), params)
}

/// [`window_sum_criterion`] against a precomputed coset partition of `path`.
pub fn window_sums_agree(
    path: &TreePath,
    phi: &Configuration,
    partition: &CosetPartition,
    params: &RuleParams,
) -> Result<bool, CylinderError> {
    let sums: BTreeMap<ReducedWord, bool> = path.vertices().into_iter().zip(window_sums(path, phi, params)?).collect();
    Ok(partition.non_singleton().all(|cell| {
        let mut values = cell.iter().map(|v| sums[v]);
        let first = values.next();
        values.all(|x| Some(x) == first)
    }))
}

/// Zero on the path, one on the rest of `B(P, rho)`.
pub fn zero_inside(path: &TreePath, params: &RuleParams) -> Configuration {
    let verts = path.vertex_set();
    Configuration::on_set(neighbourhood(&verts, params.rho as usize), verts).expect("path lies in its neighbourhood")
}

/// The window-sum criterion for the zero-inside configuration, read off the
/// path alone: the sum over `W(p)` is `|W(p) \ P|` mod 2.
pub fn zero_inside_sums_agree(path: &TreePath, partition: &CosetPartition, params: &RuleParams) -> bool {
    let verts = path.vertex_set();
    let parity = |p: &ReducedWord| window(p, params.rho).iter().filter(|v| !verts.contains(v)).count() % 2;
    partition.non_singleton().all(|cell| {
        let mut it = cell.iter().map(parity);
        let first = it.next();
        it.all(|x| Some(x) == first)
    })
}

/// `|W(p) \ P|` for every vertex in a non-singleton coset cell.
pub fn exterior_window_counts(path: &TreePath, spec: &SubgroupSpec, params: &RuleParams) -> Vec<(ReducedWord, usize)> {
    let verts = path.vertex_set();
    let mut out: Vec<(ReducedWord, usize)> = coset_partition(path, spec)
        .non_singleton()
        .flatten()
        .map(|p| (p.clone(), window(p, params.rho).iter().filter(|v| !verts.contains(v)).count()))
        .collect();
    out.sort();
    out
}

/// `2^exponent` admissible assignments of `B(P, rho)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AdmissibleCount {
    pub exponent: u64,
}

impl AdmissibleCount {
    pub fn value(&self) -> BigUint {
        BigUint::one() << self.exponent
    }
}

pub fn count_admissible(path: &TreePath, spec: &SubgroupSpec, params: &RuleParams) -> AdmissibleCount {
    let len = path.vertex_count() as u64;
    let cells = coset_partition(path, spec).len() as u64;
    AdmissibleCount { exponent: path_ball_size(len, params.rho) - len + cells }
}

/// Enumerates `V^perp` inside `Z_2^n` (vectors as bit masks) and checks that
/// all nonempty restrictions to the coordinates in `subset` are equally
/// frequent.
pub fn equipartition_check(rows: &[u32], n: usize, subset: u32) -> Result<bool, CylinderError> {
    if n > 24 {
        return Err(CylinderError::TooLarge(n));
    }
    let mut buckets: HashMap<u32, u64> = HashMap::new();
    for x in 0..1u32 << n {
        if rows.iter().all(|r| (r & x).count_ones() % 2 == 0) {
            *buckets.entry(x & subset).or_default() += 1;
        }
    }
    let mut sizes = buckets.values();
    let first = sizes.next().copied();
    Ok(sizes.all(|s| Some(*s) == first))
}

/// Rows containing `v` whose other coordinates all lie in `known`.
fn completed_rows<'a>(
    v: &'a ReducedWord,
    known: &'a HashSet<ReducedWord>,
    gens: &'a [(u32, ReducedWord)],
    rho: u32,
) -> impl Iterator<Item = Vec<ReducedWord>> + 'a {
    let r = i64::from(rho);
    (-r..=r).flat_map(move |i| {
        let on_line = v.mul(&ReducedWord::power(Letter::A, -i));
        gens.iter().flat_map(move |(_, t)| {
            [on_line.clone(), on_line.mul(&t.inverse())].into_iter().filter_map(move |g| {
                let h = g.mul(t);
                let others: Vec<ReducedWord> =
                    window(&g, rho).into_iter().chain(window(&h, rho)).filter(|u| u != v).collect();
                others.iter().all(|u| known.contains(u)).then_some(others)
            })
        })
    })
}

/// Extends `phi` from its connected domain across `target`, one vertex at a
/// time in breadth-first order. A vertex no completed row constrains gets 1.
pub fn extend_configuration(
    phi: &Configuration,
    spec: &SubgroupSpec,
    target: &VertexSet,
    params: &RuleParams,
) -> Result<Configuration, CylinderError> {
    let domain = finite_domain(phi)?;
    if !is_connected(&domain) || !is_connected(target) {
        return Err(CylinderError::Disconnected);
    }
    if !domain.is_subset(target) {
        return Err(CylinderError::TargetTooSmall);
    }
    let system = generator_rows(spec, &domain, params);
    for row in system.rows() {
        if row.support.iter().fold(false, |acc, &i| acc ^ !phi.is_zero(&system.coords[i])) {
            return Err(CylinderError::Inconsistent(format!("row at {} for index {} fails", row.centre, row.index)));
        }
    }

    let gens = spec.generators();
    let mut values: BTreeMap<ReducedWord, bool> = domain.iter().map(|v| (v.clone(), !phi.is_zero(v))).collect();
    let mut known: HashSet<ReducedWord> = domain.iter().cloned().collect();
    let mut queue: VecDeque<ReducedWord> = domain.iter().cloned().collect();
    while let Some(u) = queue.pop_front() {
        for v in u.neighbours() {
            if known.contains(&v) || !target.contains(&v) {
                continue;
            }
            let mut forced: Option<bool> = None;
            for others in completed_rows(&v, &known, &gens, params.rho) {
                let x = others.iter().fold(false, |acc, o| acc ^ values[o]);
                match forced {
                    Some(y) if y != x => {
                        return Err(CylinderError::Inconsistent(format!("rows force both values at {v}")));
                    }
                    _ => forced = Some(x),
                }
            }
            values.insert(v.clone(), forced.unwrap_or(true));
            known.insert(v.clone());
            queue.push_back(v);
        }
    }
    Ok(Configuration::from_values(&values))
}

/// `3^N 2^N 2^{-(2 * 3^{rho-1})(N - rho)}`, the bound on the mass of
/// configurations whose zero path reaches distance `N` untouched.
pub fn infinite_path_mass_bound(n: u32, params: &RuleParams) -> Result<BigRational, CylinderError> {
    if n <= params.rho {
        return Err(CylinderError::InvalidArgument(format!("N = {n} must exceed rho = {}", params.rho)));
    }
    let six_n = num_traits::pow(BigInt::from(6), n as usize);
    let shift: BigUint = BigUint::from(2u32) * num_traits::pow(BigUint::from(3u32), (params.rho - 1) as usize) * BigUint::from(n - params.rho);
    let shift: usize = shift.try_into().map_err(|_| CylinderError::InvalidArgument("exponent overflow".into()))?;
    Ok(BigRational::new(six_n, BigInt::one() << shift))
}
