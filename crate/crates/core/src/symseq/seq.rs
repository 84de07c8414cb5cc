//! Symmetric sequences of chain complexes with signed permutation actions.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::canon::{blocks_of, Canon, Canonicalizer, GeneratorAction};
use super::perm;
use crate::chain::{tensor, ChainBuilder, ChainComplex, ChainError, Quotient};
use crate::exactalg::{CoeffRing, Scalar, SparseVec};

#[derive(Debug, thiserror::Error)]
pub enum SymSeqError {
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(CoeffRing, CoeffRing),
    #[error("level {level}: {msg}")]
    BadAction { level: usize, msg: String },
    #[error("unsupported outside a derived context: {0}")]
    NotDerived(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// One arity of a symmetric sequence: a complex and the right action of the
/// adjacent transpositions, `gens[i][x] = (x·s_i, sign)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Level {
    pub complex: ChainComplex,
    pub gens: Vec<Vec<(u32, i8)>>,
}

impl Level {
    pub fn trivial(complex: ChainComplex, arity: usize) -> Level {
        let n = complex.len();
        let gens = (0..arity.saturating_sub(1)).map(|_| (0..n as u32).map(|x| (x, 1)).collect()).collect();
        Level { complex, gens }
    }

    pub fn len(&self) -> usize {
        self.complex.len()
    }

    pub fn is_empty(&self) -> bool {
        self.complex.is_empty()
    }

    /// `x·σ` for a permutation of the arity.
    pub fn act_perm(&self, x: u32, sigma: &[usize]) -> (u32, i8) {
        let mut x = x;
        let mut s = 1i8;
        for i in perm::reduced_word(sigma) {
            let (y, t) = self.gens[i][x as usize];
            x = y;
            s *= t;
        }
        (x, s)
    }

    pub fn act_vec(&self, ring: CoeffRing, v: &SparseVec, i: usize) -> SparseVec {
        SparseVec::from_terms(
            ring,
            v.iter().map(|(x, c)| {
                let (y, s) = self.gens[i][x];
                (y as usize, ring.mul(c, &ring.sign(s)))
            }),
        )
    }

    /// Every basis orbit has `r!` elements up to sign.
    pub fn is_sigma_free(&self, arity: usize) -> bool {
        let n = perm::factorial(arity);
        let mut seen = vec![false; self.len()];
        for x in 0..self.len() {
            if seen[x] {
                continue;
            }
            let mut orbit = vec![x as u32];
            seen[x] = true;
            let mut i = 0;
            while i < orbit.len() {
                let y = orbit[i];
                for g in &self.gens {
                    let z = g[y as usize].0;
                    if !seen[z as usize] {
                        seen[z as usize] = true;
                        orbit.push(z);
                    }
                }
                i += 1;
            }
            if orbit.len() != n {
                return false;
            }
        }
        true
    }

    fn check(&self, ring: CoeffRing, arity: usize) -> Result<(), String> {
        let n = self.len();
        if self.gens.len() != arity.saturating_sub(1) {
            return Err(format!("expected {} generators, found {}", arity.saturating_sub(1), self.gens.len()));
        }
        for (i, g) in self.gens.iter().enumerate() {
            if g.len() != n {
                return Err(format!("generator s_{i} has {} entries for {n} cells", g.len()));
            }
            for x in 0..n {
                let (y, s) = g[x];
                if y as usize >= n || (s != 1 && s != -1) {
                    return Err(format!("generator s_{i} is not a signed permutation"));
                }
                if self.complex.degree(y as usize) != self.complex.degree(x) {
                    return Err(format!("generator s_{i} changes degree of cell {x}"));
                }
            }
        }
        let word = |x: u32, w: &[usize]| -> (u32, i8) {
            let mut x = x;
            let mut s = 1;
            for &i in w {
                let (y, t) = self.gens[i][x as usize];
                x = y;
                s *= t;
            }
            (x, s)
        };
        let signs = ring.signs_matter();
        let is_id = |x: u32, w: &[usize]| {
            let (y, s) = word(x, w);
            y == x && (s == 1 || !signs)
        };
        for x in 0..n as u32 {
            for i in 0..self.gens.len() {
                if !is_id(x, &[i, i]) {
                    return Err(format!("s_{i}² ≠ 1 on cell {x}"));
                }
                if i + 1 < self.gens.len() && !is_id(x, &[i, i + 1, i, i + 1, i, i + 1]) {
                    return Err(format!("braid relation fails for s_{i} on cell {x}"));
                }
                for j in i + 2..self.gens.len() {
                    if !is_id(x, &[i, j, i, j]) {
                        return Err(format!("s_{i} and s_{j} do not commute on cell {x}"));
                    }
                }
            }
        }
        for i in 0..self.gens.len() {
            for x in 0..n {
                let lhs = self.act_vec(ring, self.complex.diff(x), i);
                let (y, s) = self.gens[i][x];
                let rhs = self.complex.diff(y as usize).scale(ring, &ring.sign(s));
                if lhs != rhs {
                    return Err(format!("s_{i} does not commute with d on cell {x}"));
                }
            }
        }
        Ok(())
    }
}

/// An arity-indexed family of complexes, stored for arities `≤ cutoff`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymSeq {
    pub ring: CoeffRing,
    pub cutoff: usize,
    levels: BTreeMap<usize, Level>,
}

impl GeneratorAction for SymSeq {
    fn level_len(&self, t: usize) -> usize {
        self.dim(t)
    }

    fn act(&self, t: usize, i: usize, a: u32) -> (u32, i8) {
        self.levels[&t].gens[i][a as usize]
    }
}

impl SymSeq {
    pub fn zero(ring: CoeffRing, cutoff: usize) -> Self {
        SymSeq { ring, cutoff, levels: BTreeMap::new() }
    }

    pub fn insert_level(&mut self, arity: usize, level: Level) -> Result<(), SymSeqError> {
        if level.complex.ring != self.ring {
            return Err(SymSeqError::RingMismatch(self.ring, level.complex.ring));
        }
        if arity > self.cutoff {
            return Err(SymSeqError::Invalid(format!("arity {arity} exceeds cutoff {}", self.cutoff)));
        }
        level.check(self.ring, arity).map_err(|msg| SymSeqError::BadAction { level: arity, msg })?;
        if !level.is_empty() {
            self.levels.insert(arity, level);
        }
        Ok(())
    }

    fn insert_unchecked(&mut self, arity: usize, level: Level) {
        if !level.is_empty() && arity <= self.cutoff {
            self.levels.insert(arity, level);
        }
    }

    pub fn validate(&self) -> Result<(), SymSeqError> {
        for (&r, l) in &self.levels {
            l.complex.validate()?;
            l.check(self.ring, r).map_err(|msg| SymSeqError::BadAction { level: r, msg })?;
        }
        Ok(())
    }

    pub fn level(&self, r: usize) -> Option<&Level> {
        self.levels.get(&r)
    }

    pub fn levels(&self) -> impl Iterator<Item = (usize, &Level)> {
        self.levels.iter().map(|(r, l)| (*r, l))
    }

    pub fn support(&self) -> Vec<usize> {
        self.levels.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn dim(&self, r: usize) -> usize {
        self.levels.get(&r).map_or(0, Level::len)
    }

    /// `(arity, degree) → rank`.
    pub fn dims(&self) -> BTreeMap<(usize, i32), usize> {
        let mut out = BTreeMap::new();
        for (&r, l) in &self.levels {
            for (d, k) in l.complex.dims() {
                out.insert((r, d), k);
            }
        }
        out
    }

    /// A single level with the given action.
    pub fn concentrated(ring: CoeffRing, cutoff: usize, at: usize, level: Level) -> Result<Self, SymSeqError> {
        let mut s = SymSeq::zero(ring, cutoff);
        s.insert_level(at, level)?;
        Ok(s)
    }

    /// The unit `I`: the ground ring in degree 0 at arity 1.
    pub fn unit(ring: CoeffRing, cutoff: usize) -> Self {
        let mut s = SymSeq::zero(ring, cutoff);
        s.insert_unchecked(1, Level::trivial(ChainComplex::sphere(ring, 0), 1));
        s
    }

    /// `1`: the ground ring concentrated at arity 0.
    pub fn one(ring: CoeffRing, cutoff: usize) -> Self {
        SymSeq::hat(&ChainComplex::sphere(ring, 0), cutoff)
    }

    /// A complex regarded as a sequence concentrated at arity 0.
    pub fn hat(v: &ChainComplex, cutoff: usize) -> Self {
        let mut s = SymSeq::zero(v.ring, cutoff);
        s.insert_unchecked(0, Level::trivial(v.clone(), 0));
        s
    }

    /// The regular representation `𝒦[Σ_r]` in degree 0, basis in rank order,
    /// acting by `(w·σ)_k = σ^{-1}(w_k)`.
    pub fn regular_level(ring: CoeffRing, r: usize) -> Level {
        let all = perm::all(r);
        let mut b = ChainBuilder::new(ring);
        for w in &all {
            let l: Vec<String> = w.iter().map(|x| (x + 1).to_string()).collect();
            b.add_cell(format!("w{}", l.join("")), 0);
        }
        let gens = (0..r.saturating_sub(1))
            .map(|i| {
                all.iter()
                    .map(|w| {
                        let w2: Vec<usize> = w.iter().map(|&x| if x == i { i + 1 } else if x == i + 1 { i } else { x }).collect();
                        (perm::rank(&w2) as u32, 1)
                    })
                    .collect()
            })
            .collect();
        Level { complex: b.build_unchecked(), gens }
    }

    pub fn truncate(&self, k: usize) -> Result<Self, SymSeqError> {
        if k == 0 {
            return Err(SymSeqError::Invalid("truncation τ_k needs k ≥ 1".into()));
        }
        Ok(self.filter(|r| r <= k))
    }

    pub fn level_only(&self, k: usize) -> Self {
        self.filter(|r| r == k)
    }

    pub fn above(&self, k: usize) -> Self {
        self.filter(|r| r > k)
    }

    fn filter(&self, keep: impl Fn(usize) -> bool) -> Self {
        SymSeq {
            ring: self.ring,
            cutoff: self.cutoff,
            levels: self.levels.iter().filter(|(r, _)| keep(**r)).map(|(r, l)| (*r, l.clone())).collect(),
        }
    }

    pub fn direct_sum(&self, other: &SymSeq) -> Result<Self, SymSeqError> {
        if self.ring != other.ring {
            return Err(SymSeqError::RingMismatch(self.ring, other.ring));
        }
        let mut out = SymSeq::zero(self.ring, self.cutoff.min(other.cutoff));
        let arities: Vec<usize> = self.levels.keys().chain(other.levels.keys()).copied().collect();
        for r in arities {
            if out.levels.contains_key(&r) {
                continue;
            }
            let l = match (self.levels.get(&r), other.levels.get(&r)) {
                (Some(a), Some(b)) => {
                    let off = a.len() as u32;
                    let gens = a
                        .gens
                        .iter()
                        .zip(&b.gens)
                        .map(|(ga, gb)| ga.iter().copied().chain(gb.iter().map(|&(y, s)| (y + off, s))).collect())
                        .collect();
                    Level { complex: a.complex.direct_sum(&b.complex)?, gens }
                }
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            };
            out.insert_unchecked(r, l);
        }
        Ok(out)
    }

    /// Whether every level is a free signed-permutation module.
    pub fn is_sigma_free(&self) -> bool {
        self.levels.iter().all(|(&r, l)| l.is_sigma_free(r))
    }
}

fn bits(mask: u32) -> Vec<usize> {
    (0..32).filter(|&i| mask >> i & 1 == 1).collect()
}

fn subsets_of_size(n: usize, k: usize) -> Vec<u32> {
    (0u32..1 << n).filter(|m| m.count_ones() as usize == k).collect()
}

fn parity(d: i32) -> bool {
    d.rem_euclid(2) == 1
}

/// `(A ⊗̌ B)[r] = ⊕_{r₁+r₂=r} ⊕_{shuffles} A[r₁] ⊗ B[r₂]`.
pub fn tensor_check(a: &SymSeq, b: &SymSeq) -> Result<SymSeq, SymSeqError> {
    if a.ring != b.ring {
        return Err(SymSeqError::RingMismatch(a.ring, b.ring));
    }
    let ring = a.ring;
    let cutoff = a.cutoff.min(b.cutoff);
    let mut out = SymSeq::zero(ring, cutoff);
    for r in 0..=cutoff {
        let mut cells: Vec<(usize, u32, u32, u32)> = Vec::new();
        let mut index: HashMap<(usize, u32, u32, u32), u32> = HashMap::new();
        let mut bld = ChainBuilder::new(ring);
        for r1 in 0..=r {
            let (Some(la), Some(lb)) = (a.level(r1), b.level(r - r1)) else { continue };
            for s in subsets_of_size(r, r1) {
                for x in 0..la.len() as u32 {
                    for y in 0..lb.len() as u32 {
                        let lab: Vec<String> = bits(s).iter().map(|i| (i + 1).to_string()).collect();
                        let id = bld.add_cell(
                            format!("{}|{}@{}", la.complex.label(x as usize), lb.complex.label(y as usize), lab.join(",")),
                            la.complex.degree(x as usize) + lb.complex.degree(y as usize),
                        );
                        index.insert((r1, s, x, y), id as u32);
                        cells.push((r1, s, x, y));
                    }
                }
            }
        }
        if cells.is_empty() {
            continue;
        }
        for (id, &(r1, s, x, y)) in cells.iter().enumerate() {
            let la = a.level(r1).unwrap();
            let lb = b.level(r - r1).unwrap();
            let sg = ring.sign(if parity(la.complex.degree(x as usize)) { -1 } else { 1 });
            let mut terms = Vec::new();
            for (x2, c) in la.complex.diff(x as usize).iter() {
                terms.push((index[&(r1, s, x2 as u32, y)] as usize, c.clone()));
            }
            for (y2, c) in lb.complex.diff(y as usize).iter() {
                terms.push((index[&(r1, s, x, y2 as u32)] as usize, ring.mul(&sg, c)));
            }
            bld.set_diff(id, SparseVec::from_terms(ring, terms));
        }
        let gens = (0..r.saturating_sub(1))
            .map(|i| {
                cells
                    .iter()
                    .map(|&(r1, s, x, y)| {
                        let la = a.level(r1).unwrap();
                        let lb = b.level(r - r1).unwrap();
                        let (ini, inj) = (s >> i & 1 == 1, s >> (i + 1) & 1 == 1);
                        match (ini, inj) {
                            (true, true) => {
                                let pos = (s & ((1 << i) - 1)).count_ones() as usize;
                                let (x2, sg) = la.gens[pos][x as usize];
                                (index[&(r1, s, x2, y)], sg)
                            }
                            (false, false) => {
                                let pos = i - (s & ((1 << i) - 1)).count_ones() as usize;
                                let (y2, sg) = lb.gens[pos][y as usize];
                                (index[&(r1, s, x, y2)], sg)
                            }
                            _ => {
                                let s2 = s ^ (1 << i) ^ (1 << (i + 1));
                                (index[&(r1, s2, x, y)], 1)
                            }
                        }
                    })
                    .collect()
            })
            .collect();
        out.insert_level(r, Level { complex: bld.build()?, gens })?;
    }
    Ok(out)
}

/// `B^{⊗̌t}` with the left action of `Σ_t` permuting factors with Koszul signs.
#[derive(Clone, Debug)]
pub struct TensorPower {
    pub t: usize,
    pub seq: SymSeq,
    /// `factor[r][j][x]`: the swap of factors `j, j+1` applied to cell `x` of level `r`.
    pub factor: BTreeMap<usize, Vec<Vec<(u32, i8)>>>,
}

/// A factor of a tensor word: a block of input labels and a cell of `B[|block|]`.
type Factor = (u32, u32);

pub fn tensor_power(b: &SymSeq, t: usize) -> Result<TensorPower, SymSeqError> {
    let ring = b.ring;
    let cutoff = b.cutoff;
    let mut seq = SymSeq::zero(ring, cutoff);
    let mut factor = BTreeMap::new();
    for r in 0..=cutoff {
        // Assign each input to a factor, then choose cells.
        let mut words: Vec<Vec<Factor>> = Vec::new();
        let mut assign = vec![0usize; r];
        loop {
            let mut masks = vec![0u32; t];
            for (i, &j) in assign.iter().enumerate() {
                masks[j] |= 1 << i;
            }
            if t > 0 || r == 0 {
                let choices: Vec<usize> = masks.iter().map(|m| b.dim(m.count_ones() as usize)).collect();
                if choices.iter().all(|&c| c > 0) || t == 0 {
                    let mut idx = vec![0usize; t];
                    loop {
                        words.push(masks.iter().zip(&idx).map(|(&m, &i)| (m, i as u32)).collect());
                        let mut k = t;
                        let mut done = true;
                        while k > 0 {
                            k -= 1;
                            idx[k] += 1;
                            if idx[k] < choices[k] {
                                done = false;
                                break;
                            }
                            idx[k] = 0;
                        }
                        if done {
                            break;
                        }
                    }
                }
            }
            if t == 0 {
                break;
            }
            let mut k = r;
            let mut done = true;
            while k > 0 {
                k -= 1;
                assign[k] += 1;
                if assign[k] < t {
                    done = false;
                    break;
                }
                assign[k] = 0;
            }
            if done {
                break;
            }
        }
        if t == 0 && r > 0 {
            continue;
        }
        if words.is_empty() {
            continue;
        }
        let index: HashMap<Vec<Factor>, u32> = words.iter().enumerate().map(|(i, w)| (w.clone(), i as u32)).collect();
        let lvl = |m: u32| b.level(m.count_ones() as usize).unwrap();
        let deg = |f: &Factor| lvl(f.0).complex.degree(f.1 as usize);
        let mut bld = ChainBuilder::new(ring);
        for w in &words {
            let label: Vec<String> = w
                .iter()
                .map(|f| {
                    let l: Vec<String> = bits(f.0).iter().map(|i| (i + 1).to_string()).collect();
                    format!("{}@{}", lvl(f.0).complex.label(f.1 as usize), l.join(","))
                })
                .collect();
            bld.add_cell(format!("[{}]", label.join(";")), w.iter().map(|f| deg(f)).sum());
        }
        for (id, w) in words.iter().enumerate() {
            let mut terms = Vec::new();
            let mut pre = 0;
            for j in 0..t {
                let sg = ring.sign(if parity(pre) { -1 } else { 1 });
                for (y, c) in lvl(w[j].0).complex.diff(w[j].1 as usize).iter() {
                    let mut w2 = w.clone();
                    w2[j].1 = y as u32;
                    terms.push((index[&w2] as usize, ring.mul(&sg, c)));
                }
                pre += deg(&w[j]);
            }
            bld.set_diff(id, SparseVec::from_terms(ring, terms));
        }
        let gens: Vec<Vec<(u32, i8)>> = (0..r.saturating_sub(1))
            .map(|i| {
                words
                    .iter()
                    .map(|w| {
                        let mut w2 = w.clone();
                        let mut sg = 1;
                        let ji = w.iter().position(|f| f.0 >> i & 1 == 1).unwrap();
                        let jj = w.iter().position(|f| f.0 >> (i + 1) & 1 == 1).unwrap();
                        if ji == jj {
                            let pos = (w[ji].0 & ((1 << i) - 1)).count_ones() as usize;
                            let (y, s) = lvl(w[ji].0).gens[pos][w[ji].1 as usize];
                            w2[ji].1 = y;
                            sg = s;
                        } else {
                            w2[ji].0 ^= (1 << i) | (1 << (i + 1));
                            w2[jj].0 ^= (1 << i) | (1 << (i + 1));
                        }
                        (index[&w2], sg)
                    })
                    .collect()
            })
            .collect();
        let fact: Vec<Vec<(u32, i8)>> = (0..t.saturating_sub(1))
            .map(|j| {
                words
                    .iter()
                    .map(|w| {
                        let mut w2 = w.clone();
                        w2.swap(j, j + 1);
                        let odd = parity(deg(&w[j])) && parity(deg(&w[j + 1]));
                        (index[&w2], if odd { -1 } else { 1 })
                    })
                    .collect()
            })
            .collect();
        seq.insert_level(r, Level { complex: bld.build()?, gens })?;
        factor.insert(r, fact);
    }
    Ok(TensorPower { t, seq, factor })
}

/// `M ⊗_{Σ_t} N` for a right action on `M` and a left action on `N`, as the
/// cokernel of `m·g ⊗ n − m ⊗ g·n` over the generators.
pub fn coinvariants(m: &Level, n: &ChainComplex, n_left: &[Vec<(u32, i8)>]) -> Result<ChainComplex, SymSeqError> {
    let ring = n.ring;
    if m.gens.len() != n_left.len() {
        return Err(SymSeqError::Invalid("actions of different groups".into()));
    }
    let t = tensor(&m.complex, n)?;
    let nn = n.len();
    // Cells of the tensor product are numbered by degree, then factor degrees.
    let mut id = vec![0usize; m.len() * nn];
    let mut next = 0;
    for p in m.complex.support() {
        for q in n.support() {
            for &i in m.complex.cells_in_degree(p) {
                for &j in n.cells_in_degree(q) {
                    id[i as usize * nn + j as usize] = next;
                    next += 1;
                }
            }
        }
    }
    let mut rels = Vec::new();
    for (g, h) in m.gens.iter().zip(n_left) {
        for x in 0..m.len() {
            for y in 0..nn {
                let (x2, s1) = g[x];
                let (y2, s2) = h[y];
                rels.push(SparseVec::from_terms(
                    ring,
                    [
                        (id[x2 as usize * nn + y], ring.sign(s1)),
                        (id[x * nn + y2 as usize], ring.neg(&ring.sign(s2))),
                    ],
                ));
            }
        }
    }
    Ok(Quotient::new(&t, &rels)?.complex)
}

/// An item of a circle-product word: a block of labels and a cell of `B`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Kid {
    key: (u32, u32),
    mask: u32,
    cell: u32,
}

fn kid(b: &SymSeq, mask: u32, cell: u32) -> (Kid, bool) {
    let min = if mask == 0 { u32::MAX } else { mask.trailing_zeros() };
    let d = b.level(mask.count_ones() as usize).unwrap().complex.degree(cell as usize);
    (Kid { key: (min, if mask == 0 { cell } else { 0 }), mask, cell }, parity(d))
}

/// `(A∘B)[r] = ⊕_t A[t] ⊗_{Σ_t} (B^{⊗̌t})[r]` with a basis of normal forms.
///
/// Over ℤ, `A` must be Σ-free; otherwise coinvariants acquire 2-torsion
/// that this basis cannot represent.
pub fn circle(a: &SymSeq, b: &SymSeq) -> Result<SymSeq, SymSeqError> {
    if a.ring != b.ring {
        return Err(SymSeqError::RingMismatch(a.ring, b.ring));
    }
    let ring = a.ring;
    if ring == CoeffRing::Integers && !a.is_sigma_free() {
        return Err(SymSeqError::NotDerived("circle product over Z needs a Σ-free left factor".into()));
    }
    let canon = Canonicalizer::new(ring.signs_matter());
    let cutoff = b.cutoff;
    let mut out = SymSeq::zero(ring, cutoff);
    for r in 0..=cutoff {
        let mut cells: Vec<(usize, u32, Vec<Kid>)> = Vec::new();
        let mut index: HashMap<(usize, u32, Vec<Kid>), u32> = HashMap::new();
        for (&t, la) in &a.levels {
            for w in tensor_words(b, t, r) {
                let mut items: Vec<(Kid, bool)> = w.iter().map(|&(m, c)| kid(b, m, c)).collect();
                items.sort();
                let sorted: Vec<Kid> = items.iter().map(|k| k.0.clone()).collect();
                let blocks = blocks_of(&items);
                let reps: Vec<u32> = if blocks.is_empty() {
                    (0..la.len() as u32).collect()
                } else {
                    let table = canon.table(a, t, blocks);
                    if ring == CoeffRing::Integers && table.canon.contains(&Canon::Zero) {
                        return Err(SymSeqError::NotDerived("coinvariant with 2-torsion over Z".into()));
                    }
                    table.reps.clone()
                };
                for x in reps {
                    index.insert((t, x, sorted.clone()), cells.len() as u32);
                    cells.push((t, x, sorted.clone()));
                }
            }
        }
        if cells.is_empty() {
            continue;
        }
        let normal = |t: usize, x: u32, kids: Vec<Kid>| -> Option<(u32, i8)> {
            let mut items: Vec<(Kid, bool)> = kids.into_iter().map(|k| kid(b, k.mask, k.cell)).collect();
            match canon.canonicalize(a, t, x, &mut items) {
                Canon::Term(x2, s) => {
                    let ks: Vec<Kid> = items.into_iter().map(|k| k.0).collect();
                    Some((index[&(t, x2, ks)], s))
                }
                Canon::Zero => None,
            }
        };
        let mut bld = ChainBuilder::new(ring);
        for (t, x, kids) in &cells {
            let la = a.level(*t).unwrap();
            let ks: Vec<String> = kids
                .iter()
                .map(|k| {
                    let l: Vec<String> = bits(k.mask).iter().map(|i| (i + 1).to_string()).collect();
                    format!("{}@{}", b.level(k.mask.count_ones() as usize).unwrap().complex.label(k.cell as usize), l.join(","))
                })
                .collect();
            let deg = la.complex.degree(*x as usize)
                + kids.iter().map(|k| b.level(k.mask.count_ones() as usize).unwrap().complex.degree(k.cell as usize)).sum::<i32>();
            bld.add_cell(format!("{}({})", la.complex.label(*x as usize), ks.join(";")), deg);
        }
        for (id, (t, x, kids)) in cells.iter().enumerate() {
            let la = a.level(*t).unwrap();
            let mut terms: Vec<(usize, Scalar)> = Vec::new();
            for (x2, c) in la.complex.diff(*x as usize).iter() {
                if let Some((j, s)) = normal(*t, x2 as u32, kids.clone()) {
                    terms.push((j as usize, ring.mul(c, &ring.sign(s))));
                }
            }
            let mut pre = la.complex.degree(*x as usize);
            for i in 0..kids.len() {
                let lb = b.level(kids[i].mask.count_ones() as usize).unwrap();
                let sg = ring.sign(if parity(pre) { -1 } else { 1 });
                for (y, c) in lb.complex.diff(kids[i].cell as usize).iter() {
                    let mut k2 = kids.clone();
                    k2[i].cell = y as u32;
                    if let Some((j, s)) = normal(*t, *x, k2) {
                        terms.push((j as usize, ring.mul(&ring.mul(c, &sg), &ring.sign(s))));
                    }
                }
                pre += lb.complex.degree(kids[i].cell as usize);
            }
            bld.set_diff(id, SparseVec::from_terms(ring, terms));
        }
        let gens = (0..r.saturating_sub(1))
            .map(|i| {
                cells
                    .iter()
                    .map(|(t, x, kids)| {
                        let mut k2 = kids.clone();
                        let mut sg = 1i8;
                        let both = (1u32 << i) | (1 << (i + 1));
                        for k in k2.iter_mut() {
                            if k.mask & both == both {
                                let pos = (k.mask & ((1 << i) - 1)).count_ones() as usize;
                                let (y, s) = b.level(k.mask.count_ones() as usize).unwrap().gens[pos][k.cell as usize];
                                k.cell = y;
                                sg *= s;
                            } else if k.mask & both != 0 {
                                k.mask ^= both;
                            }
                        }
                        let (j, s) = normal(*t, *x, k2).expect("relabelling preserves nonvanishing");
                        (j, sg * s)
                    })
                    .collect()
            })
            .collect();
        out.insert_level(r, Level { complex: bld.build()?, gens })?;
    }
    Ok(out)
}

/// Words of `t` factors `(mask, cell)` with disjoint masks covering `0..r`,
/// listed once per unordered arrangement: nonempty blocks by increasing
/// minimum, then empty blocks by increasing cell.
fn tensor_words(b: &SymSeq, t: usize, r: usize) -> Vec<Vec<Factor>> {
    let mut out = Vec::new();
    let mut cur: Vec<Factor> = Vec::new();
    fn rec(b: &SymSeq, t: usize, r: usize, used: u32, cur: &mut Vec<Factor>, out: &mut Vec<Vec<Factor>>) {
        let full = if r == 0 { 0 } else { (1u32 << r) - 1 };
        if cur.len() == t {
            if used == full {
                out.push(cur.clone());
            }
            return;
        }
        if used != full {
            // Next nonempty block contains the least unused label.
            let low = (!used).trailing_zeros();
            let rest = full & !used & !(1 << low);
            let rest_bits = bits(rest);
            for sub in 0u32..(1 << rest_bits.len()) {
                let mut m: u32 = 1 << low;
                for (k, &bit) in rest_bits.iter().enumerate() {
                    if sub >> k & 1 == 1 {
                        m |= 1 << bit;
                    }
                }
                let n = b.dim(m.count_ones() as usize);
                for c in 0..n as u32 {
                    cur.push((m, c));
                    rec(b, t, r, used | m, cur, out);
                    cur.pop();
                }
            }
        }
        if used == full {
            // Empty blocks, nondecreasing cells, after all nonempty ones.
            let start = cur.iter().rev().find(|f| f.0 == 0).map_or(0, |f| f.1);
            for c in start..b.dim(0) as u32 {
                cur.push((0, c));
                rec(b, t, r, used, cur, out);
                cur.pop();
            }
        }
    }
    rec(b, t, r, 0, &mut cur, &mut out);
    out
}

#[derive(Serialize, Deserialize)]
struct SymSeqJson {
    ring: CoeffRing,
    cutoff: usize,
    levels: Vec<LevelJson>,
}

#[derive(Serialize, Deserialize)]
struct LevelJson {
    arity: usize,
    #[serde(flatten)]
    level: Level,
}

impl Serialize for SymSeq {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SymSeqJson {
            ring: self.ring,
            cutoff: self.cutoff,
            levels: self.levels.iter().map(|(&arity, l)| LevelJson { arity, level: l.clone() }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymSeq {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = SymSeqJson::deserialize(d)?;
        let mut s = SymSeq::zero(j.ring, j.cutoff);
        for l in j.levels {
            s.insert_level(l.arity, l.level).map_err(serde::de::Error::custom)?;
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::homology;

    const Q: CoeffRing = CoeffRing::Rationals;

    fn com(cutoff: usize) -> SymSeq {
        let mut s = SymSeq::zero(Q, cutoff);
        for r in 1..=cutoff {
            s.insert_level(r, Level::trivial(ChainComplex::sphere(Q, 0), r)).unwrap();
        }
        s
    }

    fn ass(cutoff: usize) -> SymSeq {
        let mut s = SymSeq::zero(Q, cutoff);
        for r in 1..=cutoff {
            s.insert_level(r, SymSeq::regular_level(Q, r)).unwrap();
        }
        s
    }

    fn graded(degs: &[i32], cutoff: usize) -> SymSeq {
        let mut b = ChainBuilder::new(Q);
        for (i, &d) in degs.iter().enumerate() {
            b.add_cell(format!("v{i}"), d);
        }
        SymSeq::hat(&b.build().unwrap(), cutoff)
    }

    fn via_coinvariants(a: &SymSeq, b: &SymSeq) -> BTreeMap<(usize, i32), usize> {
        let mut out = BTreeMap::new();
        for t in a.support() {
            let tp = tensor_power(b, t).unwrap();
            for (r, l) in tp.seq.levels() {
                let c = coinvariants(a.level(t).unwrap(), &l.complex, &tp.factor[&r]).unwrap();
                for (d, k) in c.dims() {
                    *out.entry((r, d)).or_insert(0) += k;
                }
            }
        }
        out.retain(|_, k| *k > 0);
        out
    }

    #[test]
    fn tensor_of_units() {
        let i = SymSeq::unit(Q, 4);
        let ii = tensor_check(&i, &i).unwrap();
        assert_eq!(ii.dim(2), 2);
        assert!(ii.level(2).unwrap().is_sigma_free(2));
        let i3 = tensor_power(&i, 3).unwrap();
        assert_eq!(i3.seq.dim(3), 6);
        assert_eq!(i3.seq.support(), vec![3]);
    }

    #[test]
    fn regular_level_is_free() {
        for r in 0..5 {
            let l = SymSeq::regular_level(Q, r);
            assert!(l.is_sigma_free(r));
            l.check(Q, r).unwrap();
        }
    }

    #[test]
    fn unit_laws() {
        let a = ass(4);
        let i = SymSeq::unit(Q, 4);
        assert_eq!(circle(&i, &a).unwrap().dims(), a.dims());
        assert_eq!(circle(&a, &i).unwrap().dims(), a.dims());
        let c = com(4);
        assert_eq!(circle(&c, &i).unwrap().dims(), c.dims());
    }

    #[test]
    fn free_algebras_on_graded_modules() {
        // As(V) on an odd generator: one word per length.
        let x = graded(&[1], 4);
        let ax = circle(&ass(4), &x).unwrap();
        let c = &ax.level(0).unwrap().complex;
        assert_eq!(c.dims().into_iter().collect::<Vec<_>>(), vec![(1, 1), (2, 1), (3, 1), (4, 1)]);
        // Com(V) on an odd generator is an exterior algebra.
        let cx = circle(&com(4), &x).unwrap();
        assert_eq!(cx.level(0).unwrap().complex.dims().into_iter().collect::<Vec<_>>(), vec![(1, 1)]);
        // Com(V) on an even generator is polynomial.
        let y = graded(&[2], 4);
        let cy = circle(&com(4), &y).unwrap();
        assert_eq!(cy.level(0).unwrap().len(), 4);
        // Two odd generators: Sym² has dim 1 in degree 2.
        let xy = graded(&[1, 1], 4);
        let cxy = circle(&com(2), &xy).unwrap();
        assert_eq!(cxy.level(0).unwrap().complex.rank_in_degree(2), 1);
    }

    #[test]
    fn canonical_route_matches_cokernel_route() {
        let a = com(3);
        let b = ass(3).direct_sum(&graded(&[1, 2], 3)).unwrap();
        assert_eq!(circle(&a, &b).unwrap().dims(), via_coinvariants(&a, &b));
        let a = ass(3);
        assert_eq!(circle(&a, &b).unwrap().dims(), via_coinvariants(&a, &b));
        let b2 = com(3).direct_sum(&graded(&[1], 3)).unwrap();
        assert_eq!(circle(&com(3), &b2).unwrap().dims(), via_coinvariants(&com(3), &b2));
    }

    #[test]
    fn circle_with_differential() {
        let mut bl = ChainBuilder::new(Q);
        let y = bl.add_cell("y", 2);
        let x = bl.add_cell("x", 1);
        bl.set_diff(y, SparseVec::unit(x));
        let v = SymSeq::hat(&bl.build().unwrap(), 4);
        let sv = circle(&com(4), &v).unwrap();
        sv.validate().unwrap();
        // Free commutative on an acyclic complex is acyclic in char 0.
        assert!(homology(&sv.level(0).unwrap().complex).is_zero());
        let av = circle(&ass(4), &v).unwrap();
        assert!(homology(&av.level(0).unwrap().complex).is_zero());
    }

    #[test]
    fn integers_need_sigma_free() {
        let z = CoeffRing::Integers;
        let mut c = SymSeq::zero(z, 2);
        c.insert_level(2, Level::trivial(ChainComplex::sphere(z, 0), 2)).unwrap();
        let x = SymSeq::hat(&ChainComplex::sphere(z, 1), 2);
        assert!(matches!(circle(&c, &x), Err(SymSeqError::NotDerived(_))));
    }

    #[test]
    fn json_round_trip() {
        let b = ass(3).direct_sum(&graded(&[1], 3)).unwrap();
        let s = serde_json::to_string(&b).unwrap();
        let back: SymSeq = serde_json::from_str(&s).unwrap();
        assert_eq!(back, b);
    }
}
