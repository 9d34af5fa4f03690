//! Exact nullspaces of sparse rational matrices.
//!
//! Rows are cleared to integers first. Forward elimination stays in
//! `BigInt` with cross-multiplication and per-row content division, picking
//! the sparsest row as pivot; fractions only appear in back substitution.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

type SparseRow = BTreeMap<usize, BigInt>;

fn clear_denominators(row: &[BigRational]) -> SparseRow {
    let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, (x * BigRational::from_integer(lcm.clone())).to_integer()))
        .collect()
}

fn divide_content<'a>(values: impl Iterator<Item = &'a mut BigInt>) {
    let mut values: Vec<&mut BigInt> = values.collect();
    let g = values.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in values.iter_mut() {
            **x = &**x / &g;
        }
    }
}

/// Echelon form: pivot rows in elimination order with their pivot columns.
fn echelon(matrix: &[Vec<BigRational>]) -> Vec<(usize, SparseRow)> {
    let mut rows: Vec<Option<SparseRow>> = matrix.iter().map(|r| Some(clear_denominators(r))).collect();
    let cols = matrix.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    for c in 0..cols {
        let Some(p) = (0..rows.len())
            .filter(|&i| rows[i].as_ref().is_some_and(|r| r.contains_key(&c)))
            .min_by_key(|&i| rows[i].as_ref().map_or(0, BTreeMap::len))
        else {
            continue;
        };
        let mut pivot = rows[p].take().expect("candidate row is live");
        divide_content(pivot.values_mut());
        let a = pivot[&c].clone();
        for row in rows.iter_mut().flatten() {
            let Some(b) = row.get(&c).cloned() else {
                continue;
            };
            for x in row.values_mut() {
                *x *= &a;
            }
            for (j, y) in &pivot {
                let e = row.entry(*j).or_insert_with(BigInt::zero);
                *e -= y * &b;
            }
            row.retain(|_, x| !x.is_zero());
            divide_content(row.values_mut());
        }
        out.push((c, pivot));
    }
    out
}

/// Basis of `{x : Mx = 0}`, one primitive integer vector per free column.
pub fn nullspace(matrix: &[Vec<BigRational>], cols: usize) -> Vec<Vec<BigInt>> {
    let pivots = echelon(matrix);
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; cols];
        for (c, _) in &pivots {
            v[*c] = true;
        }
        v
    };
    let mut basis = Vec::new();
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut x = vec![BigRational::zero(); cols];
        x[free] = BigRational::one();
        for (c, row) in pivots.iter().rev() {
            let rest: BigRational = row
                .iter()
                .filter(|(j, _)| *j != c)
                .map(|(j, y)| &x[*j] * BigRational::from_integer(y.clone()))
                .sum();
            x[*c] = -rest / BigRational::from_integer(row[c].clone());
        }
        let lcm = x.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let mut v: Vec<BigInt> = x.iter().map(|q| (q * BigRational::from_integer(lcm.clone())).to_integer()).collect();
        divide_content(v.iter_mut());
        if v.iter().find(|t| !t.is_zero()).is_some_and(|t| t.is_negative()) {
            v.iter_mut().for_each(|t| *t = -&*t);
        }
        basis.push(v);
    }
    basis
}

pub fn rank(matrix: &[Vec<BigRational>]) -> usize {
    echelon(matrix).len()
}
