//! Truncations of the dimension series for `ker(Q_I - 4)`, the tail bound,
//! and monotonicity certificates along lexicographic chains.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde_json::{json, Value};

use crate::cylinder::zero_inside_sums_agree;
use crate::dyadic::{Dyadic, ScaledRatio};
use crate::error::SeriesError;
use crate::geometry::{enumerate_dogleg_free_classes, path_ball_size, TreePath};
use crate::quotient::{build_quotient_graph, kernel_at_4, QuotientCase};
use crate::rules::RuleParams;
use crate::subgroup::{Membership, SubgroupSpec};

/// Which path lengths carry the eigenvalue 4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LengthRule {
    /// `l = 5 mod 6` only.
    StrictPaper,
    /// Every length whose `(1,1)` graph has a kernel at 4.
    Nullity,
}

impl fmt::Display for LengthRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LengthRule::StrictPaper => "strict-paper",
            LengthRule::Nullity => "nullity",
        })
    }
}

impl std::str::FromStr for LengthRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strict-paper" | "strict" => Ok(LengthRule::StrictPaper),
            "nullity" => Ok(LengthRule::Nullity),
            _ => Err(format!("unknown length rule {s:?}")),
        }
    }
}

/// Admissible lengths under a rule, with nullities cached.
pub struct LengthFilter {
    rule: LengthRule,
    params: RuleParams,
    nullity: RefCell<BTreeMap<usize, usize>>,
}

impl LengthFilter {
    pub fn new(rule: LengthRule, params: &RuleParams) -> Self {
        LengthFilter { rule, params: params.clone(), nullity: RefCell::new(BTreeMap::new()) }
    }

    pub fn rule(&self) -> LengthRule {
        self.rule
    }

    pub fn admits(&self, len: usize) -> Result<bool, SeriesError> {
        if len < self.params.min_central_vertices {
            return Ok(false);
        }
        match self.rule {
            LengthRule::StrictPaper => Ok(len % 6 == 5),
            LengthRule::Nullity => {
                if let Some(&n) = self.nullity.borrow().get(&len) {
                    return Ok(n > 0);
                }
                let n = kernel_at_4(&build_quotient_graph(len, QuotientCase::OneOne, &self.params)?).nullity();
                self.nullity.borrow_mut().insert(len, n);
                Ok(n > 0)
            }
        }
    }

    /// Smallest admissible length above `len`.
    pub fn next_after(&self, len: usize) -> Result<usize, SeriesError> {
        // nullity is 3-periodic from the minimum on, so a window of 6 suffices
        let start = (len + 1).max(self.params.min_central_vertices);
        for l in start..start + 6 {
            if self.admits(l)? {
                return Ok(l);
            }
        }
        Err(SeriesError::InvalidInput(format!("no admissible length in {start}..{}", start + 6)))
    }

    pub fn admissible_up_to(&self, len: usize) -> Result<Vec<usize>, SeriesError> {
        let mut out = Vec::new();
        for l in self.params.min_central_vertices..=len {
            if self.admits(l)? {
                out.push(l);
            }
        }
        Ok(out)
    }
}

/// Candidate paths for a truncation: dogleg-free classes of admissible length.
#[derive(Clone, Debug)]
pub struct Catalog {
    pub truncation: usize,
    pub rule: LengthRule,
    pub lengths: Vec<usize>,
    pub paths: Vec<TreePath>,
}

impl Catalog {
    pub fn build(truncation: usize, rule: LengthRule, params: &RuleParams) -> Result<Catalog, SeriesError> {
        let lengths = LengthFilter::new(rule, params).admissible_up_to(truncation)?;
        let paths = lengths
            .iter()
            .flat_map(|&l| enumerate_dogleg_free_classes(l, params.dogleg_bound as usize))
            .collect();
        Ok(Catalog { truncation, rule, lengths, paths })
    }

    /// Same catalog, paths in a seeded random order.
    pub fn shuffled(&self, seed: u64) -> Catalog {
        let mut c = self.clone();
        c.paths.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        c
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ActiveClass {
    pub vertex_count: usize,
    pub path: TreePath,
    pub cells: usize,
    /// The class contributes `2^-exponent`.
    pub exponent: u64,
}

impl ActiveClass {
    pub fn to_json(&self) -> Value {
        json!({
            "path": self.path.step_string(),
            "vertices": self.vertex_count,
            "cells": self.cells,
            "exponent": self.exponent,
        })
    }
}

pub fn dimension_term(class: &ActiveClass) -> Dyadic {
    Dyadic::pow2_neg(class.exponent)
}

pub fn class_exponent(len: usize, cells: usize, params: &RuleParams) -> u64 {
    path_ball_size(len as u64, params.rho) - len as u64 + cells as u64
}

/// Classes of the catalog that are active for `spec`, canonically sorted.
pub fn activate(catalog: &Catalog, spec: &SubgroupSpec, params: &RuleParams) -> Vec<ActiveClass> {
    let membership = Membership::new(spec);
    let mut out: Vec<ActiveClass> = catalog
        .paths
        .iter()
        .filter_map(|p| {
            let partition = membership.coset_partition(p);
            zero_inside_sums_agree(p, &partition, params).then(|| ActiveClass {
                vertex_count: p.vertex_count(),
                path: p.clone(),
                cells: partition.len(),
                exponent: class_exponent(p.vertex_count(), partition.len(), params),
            })
        })
        .collect();
    out.sort();
    out
}

pub fn enumerate_active_classes(
    truncation: usize,
    spec: &SubgroupSpec,
    params: &RuleParams,
    rule: LengthRule,
) -> Result<Vec<ActiveClass>, SeriesError> {
    Ok(activate(&Catalog::build(truncation, rule, params)?, spec, params))
}

/// `2 * sum_{l >= from} (3l+2) 6^l 2^{-(3^rho - 1) l}` in closed form.
///
/// With `K = 3^rho - 1`, `r = 6/2^K` and `D = 2^K - 6` this is
/// `2 * 6^L * ((3L+2) D + 18) / (D^2 2^{K(L-1)})`.
pub fn tail_bound(from: usize, params: &RuleParams) -> Result<ScaledRatio, SeriesError> {
    if from == 0 {
        return Err(SeriesError::InvalidInput("tail must start at a positive length".into()));
    }
    let k = num_traits::pow(3u64, params.rho as usize) - 1;
    if k < 3 {
        return Err(SeriesError::Divergent { rho: params.rho });
    }
    let d = (BigUint::one() << k) - BigUint::from(6u32);
    let l = from as u64;
    let num = BigUint::from(2u32)
        * num_traits::pow(BigUint::from(6u32), from)
        * (BigUint::from(3 * l + 2) * &d + BigUint::from(18u32));
    Ok(ScaledRatio { num, den: &d * &d, exp: k * (l - 1) })
}

#[derive(Clone, Debug)]
pub struct DimensionReport {
    pub spec: SubgroupSpec,
    pub params: RuleParams,
    pub truncation: usize,
    pub rule: LengthRule,
    pub lengths: Vec<usize>,
    pub classes: Vec<ActiveClass>,
    pub partial_sum: Dyadic,
    /// The tail covers lengths from `tail_from` on.
    pub tail_from: usize,
    pub tail: ScaledRatio,
}

impl DimensionReport {
    pub fn to_json(&self, digits: usize) -> Value {
        json!({
            "spec": self.spec.to_string(),
            "params": serde_json::to_value(&self.params).expect("plain data"),
            "lengths": self.spec.lengths().iter().map(|(n, l)| json!([n, l])).collect::<Vec<_>>(),
            "truncation": self.truncation,
            "length_rule": self.rule.to_string(),
            "admissible_lengths": self.lengths,
            "terms": self.classes.iter().map(ActiveClass::to_json).collect::<Vec<_>>(),
            "partial_sum": self.partial_sum.to_json(),
            "partial_sum_display": short_display(&self.partial_sum),
            "partial_sum_decimal": self.partial_sum.to_decimal(digits),
            "partial_sum_approx": self.partial_sum.approx_scientific(),
            "tail_from": self.tail_from,
            "tail": self.tail.to_json(),
        })
    }
}

/// `m*2^-k` when `m` is small enough to read, else null.
fn short_display(d: &Dyadic) -> Value {
    if d.numerator().bits() <= 64 {
        Value::from(d.to_string())
    } else {
        Value::Null
    }
}

/// Partial sum over the catalog's active classes plus the tail beyond it.
pub fn report_from_catalog(catalog: &Catalog, spec: &SubgroupSpec, params: &RuleParams) -> Result<DimensionReport, SeriesError> {
    let classes = activate(catalog, spec, params);
    let terms: Vec<Dyadic> = classes.iter().map(dimension_term).collect();
    let tail_from = LengthFilter::new(catalog.rule, params).next_after(catalog.truncation)?;
    Ok(DimensionReport {
        spec: spec.clone(),
        params: params.clone(),
        truncation: catalog.truncation,
        rule: catalog.rule,
        lengths: catalog.lengths.clone(),
        partial_sum: Dyadic::sum(&terms),
        classes,
        tail_from,
        tail: tail_bound(tail_from, params)?,
    })
}

pub fn partial_dimension(
    spec: &SubgroupSpec,
    truncation: usize,
    params: &RuleParams,
    rule: LengthRule,
) -> Result<DimensionReport, SeriesError> {
    report_from_catalog(&Catalog::build(truncation, rule, params)?, spec, params)
}

/// `a < b` in the lexicographic order: the least index where they differ
/// belongs to `b`.
pub fn lex_cmp(a: &BTreeSet<u32>, b: &BTreeSet<u32>) -> Ordering {
    match a.symmetric_difference(b).next() {
        None => Ordering::Equal,
        Some(n) if b.contains(n) => Ordering::Less,
        Some(_) => Ordering::Greater,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    CertifiedPositive,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::CertifiedPositive => "CERTIFIED_POSITIVE",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Debug)]
pub struct MonotonicityCertificate {
    pub params: RuleParams,
    pub lower: SubgroupSpec,
    pub upper: SubgroupSpec,
    pub truncation: usize,
    pub rule: LengthRule,
    /// Partial sum for `upper` minus partial sum for `lower`.
    pub delta: Dyadic,
    pub tail_from: usize,
    pub tail: ScaledRatio,
    pub verdict: Verdict,
}

impl MonotonicityCertificate {
    pub fn to_json(&self) -> Value {
        json!({
            "params": serde_json::to_value(&self.params).expect("plain data"),
            "lower": self.lower.to_string(),
            "upper": self.upper.to_string(),
            "lengths": self.lower.lengths().iter().map(|(n, l)| json!([n, l])).collect::<Vec<_>>(),
            "truncation": self.truncation,
            "length_rule": self.rule.to_string(),
            "delta": self.delta.to_json(),
            "delta_display": short_display(&self.delta),
            "delta_approx": self.delta.approx_scientific(),
            "tail_from": self.tail_from,
            "tail": self.tail.to_json(),
            "verdict": self.verdict.to_string(),
        })
    }
}

fn certificate(lower: DimensionReport, upper: DimensionReport) -> MonotonicityCertificate {
    let delta = upper.partial_sum.sub(&lower.partial_sum);
    // both true values lie within one tail of their partial sums
    let verdict = if delta.is_positive() && upper.tail.scale(2).cmp_dyadic(&delta) == Ordering::Less {
        Verdict::CertifiedPositive
    } else {
        Verdict::Inconclusive
    };
    MonotonicityCertificate {
        params: upper.params,
        lower: lower.spec,
        upper: upper.spec,
        truncation: upper.truncation,
        rule: upper.rule,
        delta,
        tail_from: upper.tail_from,
        tail: upper.tail,
        verdict,
    }
}

fn check_shared_lengths(a: &SubgroupSpec, b: &SubgroupSpec) -> Result<(), SeriesError> {
    if a.lengths() != b.lengths() {
        return Err(SeriesError::InvalidInput("specs must share one length sequence".into()));
    }
    Ok(())
}

/// Certificate that the dimension for `upper` exceeds that for `lower`.
pub fn compare(
    lower: &SubgroupSpec,
    upper: &SubgroupSpec,
    truncation: usize,
    params: &RuleParams,
    rule: LengthRule,
) -> Result<MonotonicityCertificate, SeriesError> {
    compare_in(&Catalog::build(truncation, rule, params)?, lower, upper, params)
}

pub fn compare_in(
    catalog: &Catalog,
    lower: &SubgroupSpec,
    upper: &SubgroupSpec,
    params: &RuleParams,
) -> Result<MonotonicityCertificate, SeriesError> {
    check_shared_lengths(lower, upper)?;
    let lo = report_from_catalog(catalog, lower, params)?;
    let hi = report_from_catalog(catalog, upper, params)?;
    Ok(certificate(lo, hi))
}

/// Certificates for consecutive pairs of a lexicographically increasing
/// chain.
pub fn certify_chain(
    specs: &[SubgroupSpec],
    truncation: usize,
    params: &RuleParams,
    rule: LengthRule,
) -> Result<Vec<MonotonicityCertificate>, SeriesError> {
    certify_chain_in(&Catalog::build(truncation, rule, params)?, specs, params)
}

pub fn certify_chain_in(
    catalog: &Catalog,
    specs: &[SubgroupSpec],
    params: &RuleParams,
) -> Result<Vec<MonotonicityCertificate>, SeriesError> {
    for pair in specs.windows(2) {
        check_shared_lengths(&pair[0], &pair[1])?;
        if lex_cmp(pair[0].indices(), pair[1].indices()) != Ordering::Less {
            return Err(SeriesError::NotIncreasing);
        }
    }
    let reports: Vec<DimensionReport> =
        specs.iter().map(|s| report_from_catalog(catalog, s, params)).collect::<Result<_, _>>()?;
    Ok(reports.windows(2).map(|w| certificate(w[0].clone(), w[1].clone())).collect())
}

/// Re-derives a certificate's verdict from its serialized numbers alone:
/// positive iff `delta > 2 * tail`, i.e. `m * den * 2^e > 2 * num * 2^k`
/// for `delta = m / 2^k` and `tail = num / (den * 2^e)`.
pub fn recheck_certificate(cert: &Value) -> Result<bool, SeriesError> {
    let bad = |m: &str| SeriesError::InvalidInput(format!("certificate: {m}"));
    let delta = &cert["delta"];
    let m = crate::dyadic::parse_signed_hex(delta["num_hex"].as_str().ok_or_else(|| bad("delta.num_hex"))?)
        .ok_or_else(|| bad("delta.num_hex"))?;
    let k = delta["exp"].as_u64().ok_or_else(|| bad("delta.exp"))?;
    let tail = &cert["tail"];
    let hex = |key: &str| {
        tail[key]
            .as_str()
            .and_then(|s| BigInt::parse_bytes(s.as_bytes(), 16))
            .ok_or_else(|| bad(key))
    };
    let (num, den) = (hex("num_hex")?, hex("den_hex")?);
    let e = tail["exp"].as_u64().ok_or_else(|| bad("tail.exp"))?;
    let positive = m > BigInt::zero() && (m * den) << e > (num * 2) << k;
    let claimed = cert["verdict"].as_str().ok_or_else(|| bad("verdict"))? == Verdict::CertifiedPositive.to_string();
    Ok(positive == claimed)
}

pub fn certificates_csv(certs: &[MonotonicityCertificate]) -> String {
    let mut out = String::from("lower,upper,truncation,delta,tail_log2,verdict\n");
    for c in certs {
        out.push_str(&format!(
            "\"{}\",\"{}\",{},{},{:.3},{}\n",
            c.lower,
            c.upper,
            c.truncation,
            c.delta.approx_scientific(),
            c.tail.log2_approx(),
            c.verdict
        ));
    }
    out
}

#[cfg(test)]
mod tests;
