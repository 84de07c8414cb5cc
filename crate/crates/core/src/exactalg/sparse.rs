use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ring::CoeffRing;
use super::scalar::Scalar;

/// A sparse vector: entries sorted by index, no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SparseVec {
    entries: Vec<(u32, Scalar)>,
}

impl SparseVec {
    pub fn new() -> Self {
        SparseVec { entries: Vec::new() }
    }

    pub fn unit(i: usize) -> Self {
        SparseVec { entries: vec![(i as u32, Scalar::ONE)] }
    }

    pub fn single(i: usize, c: Scalar) -> Self {
        if c.is_zero() {
            SparseVec::new()
        } else {
            SparseVec { entries: vec![(i as u32, c)] }
        }
    }

    /// Entries must already be sorted, unique and nonzero.
    pub fn from_sorted(entries: Vec<(u32, Scalar)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|(_, c)| !c.is_zero()));
        SparseVec { entries }
    }

    /// Sums repeated indices and drops zeros.
    pub fn from_terms<I>(ring: CoeffRing, terms: I) -> Self
    where
        I: IntoIterator<Item = (usize, Scalar)>,
    {
        let mut v: Vec<(u32, Scalar)> = terms
            .into_iter()
            .map(|(i, c)| (i as u32, ring.normalize(c)))
            .collect();
        v.sort_by_key(|e| e.0);
        let mut out: Vec<(u32, Scalar)> = Vec::with_capacity(v.len());
        for (i, c) in v {
            match out.last_mut() {
                Some((j, d)) if *j == i => *d = ring.add(d, &c),
                _ => out.push((i, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        SparseVec { entries: out }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(u32, Scalar)] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<(u32, Scalar)> {
        self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.entries.iter().map(|(i, c)| (*i as usize, c))
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|(i, _)| *i as usize)
    }

    pub fn get(&self, i: usize) -> Scalar {
        match self.entries.binary_search_by_key(&(i as u32), |e| e.0) {
            Ok(k) => self.entries[k].1.clone(),
            Err(_) => Scalar::ZERO,
        }
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|e| e.0 as usize)
    }

    pub fn min_index(&self) -> Option<usize> {
        self.entries.first().map(|e| e.0 as usize)
    }

    pub fn scale(&self, ring: CoeffRing, c: &Scalar) -> SparseVec {
        if c.is_zero() {
            return SparseVec::new();
        }
        let entries = self
            .entries
            .iter()
            .map(|(i, x)| (*i, ring.mul(x, c)))
            .filter(|(_, x)| !x.is_zero())
            .collect();
        SparseVec { entries }
    }

    /// `self + c * other`.
    pub fn axpy(&self, ring: CoeffRing, c: &Scalar, other: &SparseVec) -> SparseVec {
        if c.is_zero() || other.is_empty() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i].clone());
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                let v = ring.mul(c, &b[j].1);
                if !v.is_zero() {
                    out.push((b[j].0, v));
                }
                j += 1;
            } else {
                let v = ring.add(&a[i].1, &ring.mul(c, &b[j].1));
                if !v.is_zero() {
                    out.push((a[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        SparseVec { entries: out }
    }

    pub fn add(&self, ring: CoeffRing, other: &SparseVec) -> SparseVec {
        self.axpy(ring, &Scalar::ONE, other)
    }

    pub fn sub(&self, ring: CoeffRing, other: &SparseVec) -> SparseVec {
        self.axpy(ring, &ring.from_i64(-1), other)
    }

    pub fn neg(&self, ring: CoeffRing) -> SparseVec {
        self.scale(ring, &ring.from_i64(-1))
    }

    pub fn dot(&self, ring: CoeffRing, other: &SparseVec) -> Scalar {
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j) = (0, 0);
        let mut acc = Scalar::ZERO;
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc = ring.add(&acc, &ring.mul(&a[i].1, &b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// Reindexes entries through `f`, dropping those mapped to `None`.
    pub fn remap(&self, ring: CoeffRing, f: impl Fn(usize) -> Option<usize>) -> SparseVec {
        SparseVec::from_terms(
            ring,
            self.entries.iter().filter_map(|(i, c)| f(*i as usize).map(|j| (j, c.clone()))),
        )
    }

    pub fn retain(&mut self, mut f: impl FnMut(usize) -> bool) {
        self.entries.retain(|(i, _)| f(*i as usize));
    }
}

/// Accumulates a linear combination with arbitrary insertion order.
#[derive(Clone, Debug, Default)]
pub struct Accumulator {
    terms: BTreeMap<u32, Scalar>,
}

impl Accumulator {
    pub fn new() -> Self {
        Accumulator::default()
    }

    pub fn add(&mut self, ring: CoeffRing, i: usize, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(i as u32).or_insert(Scalar::ZERO);
        *e = ring.add(e, c);
    }

    pub fn add_vec(&mut self, ring: CoeffRing, c: &Scalar, v: &SparseVec) {
        for (i, x) in v.iter() {
            self.add(ring, i, &ring.mul(c, x));
        }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.values().all(|c| c.is_zero())
    }

    pub fn finish(self) -> SparseVec {
        SparseVec::from_sorted(self.terms.into_iter().filter(|(_, c)| !c.is_zero()).collect())
    }
}

/// A sparse matrix stored by columns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseMatrix {
    pub ring: CoeffRing,
    pub rows: usize,
    pub cols: usize,
    columns: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zero(ring: CoeffRing, rows: usize, cols: usize) -> Self {
        SparseMatrix { ring, rows, cols, columns: vec![SparseVec::new(); cols] }
    }

    pub fn identity(ring: CoeffRing, n: usize) -> Self {
        SparseMatrix { ring, rows: n, cols: n, columns: (0..n).map(SparseVec::unit).collect() }
    }

    pub fn from_columns(ring: CoeffRing, rows: usize, columns: Vec<SparseVec>) -> Self {
        debug_assert!(columns.iter().all(|c| c.max_index().map_or(true, |m| m < rows)));
        SparseMatrix { ring, rows, cols: columns.len(), columns }
    }

    /// Builds from `(row, col, value)` triples; repeated positions add.
    pub fn from_triplets(
        ring: CoeffRing,
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Scalar)>,
    ) -> Self {
        let mut per: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); cols];
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "entry ({r},{c}) outside {rows}x{cols}");
            per[c].push((r, v));
        }
        let columns = per.into_iter().map(|t| SparseVec::from_terms(ring, t)).collect();
        SparseMatrix { ring, rows, cols, columns }
    }

    pub fn from_dense(ring: CoeffRing, rows: &[Vec<i64>]) -> Self {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.len());
        let trip = rows.iter().enumerate().flat_map(|(i, r)| {
            r.iter().enumerate().map(move |(j, v)| (i, j, Scalar::from_i64(*v)))
        });
        SparseMatrix::from_triplets(ring, nr, nc, trip)
    }

    pub fn column(&self, j: usize) -> &SparseVec {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.columns
    }

    pub fn into_columns(self) -> Vec<SparseVec> {
        self.columns
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        self.columns[c].get(r)
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(|c| c.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_empty())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(j, col)| col.iter().map(move |(i, v)| (i, j, v)))
    }

    pub fn transpose(&self) -> SparseMatrix {
        let trip: Vec<_> = self.triplets().map(|(i, j, v)| (j, i, v.clone())).collect();
        SparseMatrix::from_triplets(self.ring, self.cols, self.rows, trip)
    }

    pub fn mul_vec(&self, v: &SparseVec) -> SparseVec {
        let mut acc = Accumulator::new();
        for (j, c) in v.iter() {
            acc.add_vec(self.ring, c, &self.columns[j]);
        }
        acc.finish()
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let columns = other.columns.iter().map(|c| self.mul_vec(c)).collect();
        SparseMatrix { ring: self.ring, rows: self.rows, cols: other.cols, columns }
    }

    pub fn sub(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let columns = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| a.sub(self.ring, b))
            .collect();
        SparseMatrix { ring: self.ring, rows: self.rows, cols: self.cols, columns }
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, other.cols);
        let off = self.rows;
        let columns = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| {
                let mut e = a.entries().to_vec();
                e.extend(b.entries().iter().map(|(i, c)| (*i + off as u32, c.clone())));
                SparseVec::from_sorted(e)
            })
            .collect();
        SparseMatrix { ring: self.ring, rows: self.rows + other.rows, cols: self.cols, columns }
    }

    pub fn to_dense(&self) -> Vec<Vec<Scalar>> {
        let mut d = vec![vec![Scalar::ZERO; self.cols]; self.rows];
        for (i, j, v) in self.triplets() {
            d[i][j] = v.clone();
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axpy_cancels() {
        let q = CoeffRing::Rationals;
        let a = SparseVec::from_terms(q, [(0, Scalar::from_i64(1)), (3, Scalar::from_i64(2))]);
        let b = SparseVec::from_terms(q, [(3, Scalar::from_i64(1)), (5, Scalar::from_i64(1))]);
        let c = a.axpy(q, &Scalar::from_i64(-2), &b);
        assert_eq!(c.entries(), &[(0, Scalar::ONE), (5, Scalar::from_i64(-2))][..]);
    }

    #[test]
    fn product_and_transpose() {
        let q = CoeffRing::Rationals;
        let m = SparseMatrix::from_dense(q, &[vec![1, 2], vec![0, 1]]);
        let p = m.mul(&m);
        assert_eq!(p, SparseMatrix::from_dense(q, &[vec![1, 4], vec![0, 1]]));
        assert_eq!(m.transpose().transpose(), m);
    }
}
