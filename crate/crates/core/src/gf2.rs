//! Dense bit-packed linear algebra over GF(2).

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitRow {
    words: Vec<u64>,
}

impl BitRow {
    pub fn zeros(len: usize) -> Self {
        BitRow { words: vec![0; len.div_ceil(64)] }
    }

    pub fn from_ones(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut r = BitRow::zeros(len);
        for i in ones {
            r.flip(i);
        }
        r
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &BitRow) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words.iter().enumerate().find(|(_, w)| **w != 0).map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }
}

/// Linear system `Ax = b` over GF(2).
#[derive(Clone, Debug, Default)]
pub struct Gf2System {
    cols: usize,
    rows: Vec<(BitRow, bool)>,
}

/// Reduced row echelon form with the pivot column of each row.
struct Echelon {
    rows: Vec<(BitRow, bool)>,
    pivots: Vec<usize>,
    consistent: bool,
}

impl Gf2System {
    pub fn new(cols: usize) -> Self {
        Gf2System { cols, rows: Vec::new() }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn push(&mut self, row: BitRow, rhs: bool) {
        self.rows.push((row, rhs));
    }

    fn echelon(&self) -> Echelon {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            let Some(p) = (r..rows.len()).find(|&i| rows[i].0.get(c)) else {
                continue;
            };
            rows.swap(r, p);
            let (pivot, prhs) = rows[r].clone();
            for (i, (row, rhs)) in rows.iter_mut().enumerate() {
                if i != r && row.get(c) {
                    row.xor_assign(&pivot);
                    *rhs ^= prhs;
                }
            }
            pivots.push(c);
            r += 1;
        }
        let consistent = rows[r..].iter().all(|(_, rhs)| !rhs);
        rows.truncate(r);
        Echelon { rows, pivots, consistent }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Forward elimination only, into a basis keyed by leading column.
    pub fn is_consistent(&self) -> bool {
        let mut basis: Vec<Option<(BitRow, bool)>> = vec![None; self.cols];
        for (row, rhs) in &self.rows {
            let (mut row, mut rhs) = (row.clone(), *rhs);
            loop {
                let Some(c) = row.first_one() else {
                    if rhs {
                        return false;
                    }
                    break;
                };
                match &basis[c] {
                    Some((b, brhs)) => {
                        row.xor_assign(b);
                        rhs ^= brhs;
                    }
                    None => {
                        basis[c] = Some((row, rhs));
                        break;
                    }
                }
            }
        }
        true
    }

    /// A solution with every free variable set to `free_value`.
    pub fn solve(&self, free_value: bool) -> Option<Vec<bool>> {
        let e = self.echelon();
        if !e.consistent {
            return None;
        }
        let mut x = vec![free_value; self.cols];
        for &p in &e.pivots {
            x[p] = false;
        }
        for ((row, rhs), &p) in e.rows.iter().zip(&e.pivots) {
            let rest = row.ones().filter(|&c| c != p).fold(false, |acc, c| acc ^ x[c]);
            x[p] = rhs ^ rest;
        }
        Some(x)
    }

    /// Basis of the homogeneous solutions.
    pub fn kernel_basis(&self) -> Vec<BitRow> {
        let e = self.echelon();
        let mut is_pivot = vec![false; self.cols];
        for &p in &e.pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = BitRow::zeros(self.cols);
                v.flip(f);
                for ((row, _), &p) in e.rows.iter().zip(&e.pivots) {
                    if row.get(f) {
                        v.flip(p);
                    }
                }
                v
            })
            .collect()
    }
}

/// Rank of a list of rows.
pub fn rank_of(rows: &[BitRow], cols: usize) -> usize {
    let mut s = Gf2System::new(cols);
    for r in rows {
        s.push(r.clone(), false);
    }
    s.rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_row_basics() {
        let r = BitRow::from_ones(130, [0, 64, 129, 64]);
        assert_eq!(r.ones().collect::<Vec<_>>(), vec![0, 129]);
        assert_eq!(r.first_one(), Some(0));
        assert!(BitRow::zeros(70).is_zero());
    }

    #[test]
    fn solves_and_detects_inconsistency() {
        let mut s = Gf2System::new(3);
        s.push(BitRow::from_ones(3, [0, 1]), true);
        s.push(BitRow::from_ones(3, [1, 2]), false);
        let x = s.solve(true).unwrap();
        assert!(x[0] ^ x[1]);
        assert_eq!(x[1], x[2]);
        assert_eq!(s.rank(), 2);
        s.push(BitRow::from_ones(3, [0, 2]), false);
        assert!(s.solve(false).is_none());
    }

    #[test]
    fn agrees_with_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let cols = rng.gen_range(1..9);
            let mut s = Gf2System::new(cols);
            let mut plain = Vec::new();
            for _ in 0..rng.gen_range(0..8) {
                let mask: u32 = rng.gen_range(0..1 << cols);
                let rhs = rng.gen_bool(0.5);
                s.push(BitRow::from_ones(cols, (0..cols).filter(|i| mask >> i & 1 == 1)), rhs);
                plain.push((mask, rhs));
            }
            let sat = |x: u32| plain.iter().all(|&(m, r)| ((m & x).count_ones() % 2 == 1) == r);
            let count = (0..1u32 << cols).filter(|&x| sat(x)).count();
            match s.solve(true) {
                Some(x) => {
                    let bits = x.iter().enumerate().fold(0u32, |acc, (i, &b)| acc | (u32::from(b) << i));
                    assert!(sat(bits));
                    assert_eq!(count, 1 << (cols - s.rank()));
                    assert_eq!(s.kernel_basis().len(), cols - s.rank());
                }
                None => assert_eq!(count, 0),
            }
        }
    }
}
