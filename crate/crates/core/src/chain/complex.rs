use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::exactalg::{Accumulator, CoeffRing, Scalar, SparseMatrix, SparseVec};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChainError {
    #[error("d∘d ≠ 0 at cell {cell} ({label})")]
    NotAComplex { cell: usize, label: String },
    #[error("differential of cell {cell} has a term in degree {found}, expected {expected}")]
    BadDegree { cell: usize, found: i32, expected: i32 },
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(CoeffRing, CoeffRing),
    #[error("not a chain map at source cell {0}")]
    NotAChainMap(usize),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Ring(#[from] crate::exactalg::RingError),
}

/// A finitely generated free graded module with a differential of degree −1.
///
/// Cells are numbered globally; `diff(j)` is the boundary of cell `j`
/// written in global indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    pub ring: CoeffRing,
    labels: Vec<String>,
    degrees: Vec<i32>,
    diff: Vec<SparseVec>,
    by_degree: BTreeMap<i32, Vec<u32>>,
    local: Vec<u32>,
}

/// Incremental construction of a [`ChainComplex`].
#[derive(Clone, Debug)]
pub struct ChainBuilder {
    ring: CoeffRing,
    labels: Vec<String>,
    degrees: Vec<i32>,
    diff: Vec<SparseVec>,
}

impl ChainBuilder {
    pub fn new(ring: CoeffRing) -> Self {
        ChainBuilder { ring, labels: Vec::new(), degrees: Vec::new(), diff: Vec::new() }
    }

    pub fn add_cell(&mut self, label: impl Into<String>, degree: i32) -> usize {
        self.labels.push(label.into());
        self.degrees.push(degree);
        self.diff.push(SparseVec::new());
        self.labels.len() - 1
    }

    pub fn set_diff(&mut self, cell: usize, d: SparseVec) {
        self.diff[cell] = d;
    }

    pub fn add_diff_term(&mut self, cell: usize, target: usize, c: Scalar) {
        let t = SparseVec::single(target, self.ring.normalize(c));
        self.diff[cell] = self.diff[cell].add(self.ring, &t);
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn build(self) -> Result<ChainComplex, ChainError> {
        let c = ChainComplex::from_parts(self.ring, self.labels, self.degrees, self.diff);
        c.validate()?;
        Ok(c)
    }

    pub fn build_unchecked(self) -> ChainComplex {
        ChainComplex::from_parts(self.ring, self.labels, self.degrees, self.diff)
    }
}

impl ChainComplex {
    pub fn from_parts(
        ring: CoeffRing,
        labels: Vec<String>,
        degrees: Vec<i32>,
        diff: Vec<SparseVec>,
    ) -> Self {
        assert_eq!(labels.len(), degrees.len());
        assert_eq!(labels.len(), diff.len());
        let mut by_degree: BTreeMap<i32, Vec<u32>> = BTreeMap::new();
        let mut local = vec![0u32; labels.len()];
        for (i, &d) in degrees.iter().enumerate() {
            let v = by_degree.entry(d).or_default();
            local[i] = v.len() as u32;
            v.push(i as u32);
        }
        ChainComplex { ring, labels, degrees, diff, by_degree, local }
    }

    pub fn zero(ring: CoeffRing) -> Self {
        ChainBuilder::new(ring).build_unchecked()
    }

    /// A single free generator in degree `n` with zero differential.
    pub fn sphere(ring: CoeffRing, n: i32) -> Self {
        let mut b = ChainBuilder::new(ring);
        b.add_cell(format!("e{n}"), n);
        b.build_unchecked()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.degrees[i]
    }

    pub fn degrees(&self) -> &[i32] {
        &self.degrees
    }

    pub fn diff(&self, i: usize) -> &SparseVec {
        &self.diff[i]
    }

    pub fn diffs(&self) -> &[SparseVec] {
        &self.diff
    }

    /// Position of cell `i` among the cells of its degree.
    pub fn local_index(&self, i: usize) -> usize {
        self.local[i] as usize
    }

    pub fn cells_in_degree(&self, n: i32) -> &[u32] {
        self.by_degree.get(&n).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn rank_in_degree(&self, n: i32) -> usize {
        self.cells_in_degree(n).len()
    }

    pub fn support(&self) -> impl Iterator<Item = i32> + '_ {
        self.by_degree.keys().copied()
    }

    pub fn min_degree(&self) -> Option<i32> {
        self.by_degree.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i32> {
        self.by_degree.keys().next_back().copied()
    }

    /// Ranks per degree.
    pub fn dims(&self) -> BTreeMap<i32, usize> {
        self.by_degree.iter().map(|(d, v)| (*d, v.len())).collect()
    }

    /// Matrix of `d_n: C_n → C_{n−1}` in local bases.
    pub fn diff_matrix(&self, n: i32) -> SparseMatrix {
        let cols = self.cells_in_degree(n);
        let rows = self.rank_in_degree(n - 1);
        let columns = cols
            .iter()
            .map(|&j| self.diff[j as usize].remap(self.ring, |i| Some(self.local[i] as usize)))
            .collect();
        SparseMatrix::from_columns(self.ring, rows, columns)
    }

    /// Applies the differential to a chain.
    pub fn apply_diff(&self, v: &SparseVec) -> SparseVec {
        let mut acc = Accumulator::new();
        for (j, c) in v.iter() {
            acc.add_vec(self.ring, c, &self.diff[j]);
        }
        acc.finish()
    }

    /// Checks degrees of boundary terms and `d∘d = 0`.
    pub fn validate(&self) -> Result<(), ChainError> {
        for j in 0..self.len() {
            for i in self.diff[j].indices() {
                if i >= self.len() {
                    return Err(ChainError::Invalid(format!("cell {j} has boundary term {i} out of range")));
                }
                if self.degrees[i] != self.degrees[j] - 1 {
                    return Err(ChainError::BadDegree {
                        cell: j,
                        found: self.degrees[i],
                        expected: self.degrees[j] - 1,
                    });
                }
            }
        }
        for j in 0..self.len() {
            if !self.apply_diff(&self.diff[j]).is_empty() {
                return Err(ChainError::NotAComplex { cell: j, label: self.labels[j].clone() });
            }
        }
        Ok(())
    }

    /// Cells of degree in `[lo, hi]`; differentials into degree `lo − 1` are dropped.
    pub fn window(&self, lo: i32, hi: i32) -> ChainComplex {
        self.restrict(|i| (lo..=hi).contains(&self.degrees[i]))
    }

    /// The subquotient spanned by the cells satisfying `keep`; boundary terms
    /// on dropped cells are discarded. This is a chain complex when the kept
    /// set is a difference of two sets closed under taking boundaries.
    pub fn restrict(&self, keep: impl Fn(usize) -> bool) -> ChainComplex {
        let (c, _) = self.restrict_with_map(keep);
        c
    }

    /// As [`restrict`](Self::restrict), also returning old→new indices.
    pub fn restrict_with_map(&self, keep: impl Fn(usize) -> bool) -> (ChainComplex, Vec<Option<u32>>) {
        let mut map = vec![None; self.len()];
        let mut labels = Vec::new();
        let mut degrees = Vec::new();
        for i in 0..self.len() {
            if keep(i) {
                map[i] = Some(labels.len() as u32);
                labels.push(self.labels[i].clone());
                degrees.push(self.degrees[i]);
            }
        }
        let diff = (0..self.len())
            .filter(|&i| map[i].is_some())
            .map(|i| self.diff[i].remap(self.ring, |k| map[k].map(|x| x as usize)))
            .collect();
        (ChainComplex::from_parts(self.ring, labels, degrees, diff), map)
    }

    /// Same complex with a different ring (coefficients reinterpreted).
    pub fn change_ring(&self, ring: CoeffRing) -> Result<ChainComplex, ChainError> {
        let mut diff = Vec::with_capacity(self.len());
        for d in &self.diff {
            let mut terms = Vec::with_capacity(d.len());
            for (i, c) in d.iter() {
                terms.push((i, ring.try_normalize(c.clone())?));
            }
            diff.push(SparseVec::from_terms(ring, terms));
        }
        Ok(ChainComplex::from_parts(ring, self.labels.clone(), self.degrees.clone(), diff))
    }

    /// Suspension: degrees shift by `k`, differential sign `(−1)^k`.
    pub fn shift(&self, k: i32) -> ChainComplex {
        let s = self.ring.sign(if k % 2 == 0 { 1 } else { -1 });
        ChainComplex::from_parts(
            self.ring,
            self.labels.iter().map(|l| format!("s{k}({l})")).collect(),
            self.degrees.iter().map(|d| d + k).collect(),
            self.diff.iter().map(|d| d.scale(self.ring, &s)).collect(),
        )
    }

    pub fn direct_sum(&self, other: &ChainComplex) -> Result<ChainComplex, ChainError> {
        if self.ring != other.ring {
            return Err(ChainError::RingMismatch(self.ring, other.ring));
        }
        let off = self.len();
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        let mut degrees = self.degrees.clone();
        degrees.extend(other.degrees.iter().copied());
        let mut diff = self.diff.clone();
        diff.extend(other.diff.iter().map(|d| d.remap(self.ring, |i| Some(i + off))));
        Ok(ChainComplex::from_parts(self.ring, labels, degrees, diff))
    }
}

/// The quotient of a complex by the span of homogeneous vectors `rels`,
/// which must span a subcomplex.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub complex: ChainComplex,
    /// Indices of the cells of the ambient complex kept as a basis.
    pub kept: Vec<u32>,
    red: crate::exactalg::Reducer,
    new_index: Vec<Option<u32>>,
}

impl Quotient {
    pub fn new(c: &ChainComplex, rels: &[SparseVec]) -> Result<Quotient, ChainError> {
        let ring = c.ring;
        let mut red = crate::exactalg::Reducer::new(ring);
        for r in rels {
            red.insert(r);
        }
        for r in red.basis() {
            if !red.reduce(&c.apply_diff(r)).is_empty() {
                return Err(ChainError::Invalid("relations do not span a subcomplex".into()));
            }
        }
        let kept: Vec<u32> = (0..c.len()).filter(|&i| !red.is_pivot(i)).map(|i| i as u32).collect();
        let mut new_index = vec![None; c.len()];
        for (k, &i) in kept.iter().enumerate() {
            new_index[i as usize] = Some(k as u32);
        }
        let labels = kept.iter().map(|&i| c.label(i as usize).to_string()).collect();
        let degrees = kept.iter().map(|&i| c.degree(i as usize)).collect();
        let diff = kept
            .iter()
            .map(|&i| {
                red.reduce(c.diff(i as usize)).remap(ring, |j| new_index[j].map(|x| x as usize))
            })
            .collect();
        let complex = ChainComplex::from_parts(ring, labels, degrees, diff);
        complex.validate()?;
        Ok(Quotient { complex, kept, red, new_index })
    }

    /// Image of an ambient vector in the quotient basis.
    pub fn project(&self, v: &SparseVec) -> SparseVec {
        self.red.reduce(v).remap(self.complex.ring, |j| self.new_index[j].map(|x| x as usize))
    }
}

/// A degree-preserving chain map, stored as images of source cells.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub source: Arc<ChainComplex>,
    pub target: Arc<ChainComplex>,
    images: Vec<SparseVec>,
}

impl ChainMap {
    pub fn new(
        source: Arc<ChainComplex>,
        target: Arc<ChainComplex>,
        images: Vec<SparseVec>,
    ) -> Result<Self, ChainError> {
        if source.ring != target.ring {
            return Err(ChainError::RingMismatch(source.ring, target.ring));
        }
        assert_eq!(images.len(), source.len());
        let m = ChainMap { source, target, images };
        m.validate()?;
        Ok(m)
    }

    pub fn identity(c: Arc<ChainComplex>) -> Self {
        let images = (0..c.len()).map(SparseVec::unit).collect();
        ChainMap { source: c.clone(), target: c, images }
    }

    pub fn zero(source: Arc<ChainComplex>, target: Arc<ChainComplex>) -> Self {
        let images = vec![SparseVec::new(); source.len()];
        ChainMap { source, target, images }
    }

    pub fn image(&self, i: usize) -> &SparseVec {
        &self.images[i]
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let ring = self.source.ring;
        let mut acc = Accumulator::new();
        for (j, c) in v.iter() {
            acc.add_vec(ring, c, &self.images[j]);
        }
        acc.finish()
    }

    pub fn validate(&self) -> Result<(), ChainError> {
        for j in 0..self.source.len() {
            for i in self.images[j].indices() {
                if self.target.degree(i) != self.source.degree(j) {
                    return Err(ChainError::NotAChainMap(j));
                }
            }
            let lhs = self.target.apply_diff(&self.images[j]);
            let rhs = self.apply(self.source.diff(j));
            if lhs != rhs {
                return Err(ChainError::NotAChainMap(j));
            }
        }
        Ok(())
    }

    /// Component `C_n → D_n` in local bases.
    pub fn matrix(&self, n: i32) -> SparseMatrix {
        let ring = self.source.ring;
        let cols = self
            .source
            .cells_in_degree(n)
            .iter()
            .map(|&j| self.images[j as usize].remap(ring, |i| Some(self.target.local_index(i))))
            .collect();
        SparseMatrix::from_columns(ring, self.target.rank_in_degree(n), cols)
    }

    pub fn compose(&self, first: &ChainMap) -> ChainMap {
        assert!(Arc::ptr_eq(&first.target, &self.source) || *first.target == *self.source);
        let images = first.images.iter().map(|v| self.apply(v)).collect();
        ChainMap { source: first.source.clone(), target: self.target.clone(), images }
    }
}

/// Mapping cone of `f: X → Y`: `X[−1] ⊕ Y`, with `d(x, y) = (−dx, f(x) + dy)`.
pub fn cone(f: &ChainMap) -> ChainComplex {
    let (x, y) = (&f.source, &f.target);
    let ring = x.ring;
    let off = x.len();
    let mut labels: Vec<String> = x.labels.iter().map(|l| format!("c({l})")).collect();
    labels.extend(y.labels.iter().cloned());
    let mut degrees: Vec<i32> = x.degrees.iter().map(|d| d + 1).collect();
    degrees.extend(y.degrees.iter().copied());
    let mut diff: Vec<SparseVec> = (0..x.len())
        .map(|j| {
            let a = x.diff(j).neg(ring);
            let b = f.image(j).remap(ring, |i| Some(i + off));
            a.add(ring, &b)
        })
        .collect();
    diff.extend((0..y.len()).map(|j| y.diff(j).remap(ring, |i| Some(i + off))));
    ChainComplex::from_parts(ring, labels, degrees, diff)
}

#[derive(Serialize, Deserialize)]
struct ChainJson {
    ring: CoeffRing,
    cells: Vec<(String, i32)>,
    #[serde(default)]
    diff: Vec<(usize, usize, Scalar)>,
}

impl Serialize for ChainComplex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let cells = self.labels.iter().cloned().zip(self.degrees.iter().copied()).collect();
        let diff = (0..self.len())
            .flat_map(|j| self.diff[j].iter().map(move |(i, c)| (j, i, c.clone())))
            .collect();
        ChainJson { ring: self.ring, cells, diff }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ChainComplex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = ChainJson::deserialize(d)?;
        let mut b = ChainBuilder::new(j.ring);
        for (l, deg) in j.cells {
            b.add_cell(l, deg);
        }
        let n = b.len();
        for (col, row, c) in j.diff {
            if col >= n || row >= n {
                return Err(serde::de::Error::custom(format!("diff entry ({col},{row}) out of range")));
            }
            let c = j.ring.try_normalize(c).map_err(serde::de::Error::custom)?;
            b.add_diff_term(col, row, c);
        }
        b.build().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn interval(ring: CoeffRing) -> ChainComplex {
        let mut b = ChainBuilder::new(ring);
        let e = b.add_cell("e", 1);
        let v0 = b.add_cell("v0", 0);
        let v1 = b.add_cell("v1", 0);
        b.set_diff(e, SparseVec::from_terms(ring, [(v1, Scalar::ONE), (v0, Scalar::from_i64(-1))]));
        b.build().unwrap()
    }

    #[test]
    fn detects_bad_square() {
        let q = CoeffRing::Rationals;
        let mut b = ChainBuilder::new(q);
        let x = b.add_cell("x", 2);
        let y = b.add_cell("y", 1);
        let z = b.add_cell("z", 0);
        b.set_diff(x, SparseVec::unit(y));
        b.set_diff(y, SparseVec::unit(z));
        assert!(matches!(b.build(), Err(ChainError::NotAComplex { .. })));
    }

    #[test]
    fn json_round_trip() {
        let c = interval(CoeffRing::Integers);
        let s = serde_json::to_string(&c).unwrap();
        let back: ChainComplex = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }
}
