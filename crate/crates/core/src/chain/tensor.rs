//! Tensor products with the Koszul sign rule and totalization of bicomplexes.

use super::complex::{ChainBuilder, ChainComplex, ChainError};
use crate::exactalg::{CoeffRing, Scalar, SparseVec};

fn koszul(ring: CoeffRing, deg: i32) -> Scalar {
    ring.sign(if deg.rem_euclid(2) == 0 { 1 } else { -1 })
}

/// `C ⊗ D` with `d(x⊗y) = dx⊗y + (−1)^{|x|} x⊗dy`, restricted to total
/// degrees in `window` when given. Cell `(i, j)` is labelled `ci⊗dj`.
pub fn tensor_window(c: &ChainComplex, d: &ChainComplex, window: Option<(i32, i32)>) -> Result<ChainComplex, ChainError> {
    if c.ring != d.ring {
        return Err(ChainError::RingMismatch(c.ring, d.ring));
    }
    let ring = c.ring;
    let keep = |n: i32| window.map_or(true, |(lo, hi)| lo <= n && n <= hi);
    let mut index = vec![u32::MAX; c.len() * d.len()];
    let mut b = ChainBuilder::new(ring);
    for p in c.support() {
        for q in d.support() {
            if !keep(p + q) {
                continue;
            }
            for &i in c.cells_in_degree(p) {
                for &j in d.cells_in_degree(q) {
                    let id = b.add_cell(format!("{}⊗{}", c.label(i as usize), d.label(j as usize)), p + q);
                    index[i as usize * d.len() + j as usize] = id as u32;
                }
            }
        }
    }
    for i in 0..c.len() {
        let s = koszul(ring, c.degree(i));
        for j in 0..d.len() {
            let id = index[i * d.len() + j];
            if id == u32::MAX {
                continue;
            }
            let mut terms = Vec::new();
            for (k, x) in c.diff(i).iter() {
                let t = index[k * d.len() + j];
                if t != u32::MAX {
                    terms.push((t as usize, x.clone()));
                }
            }
            for (k, y) in d.diff(j).iter() {
                let t = index[i * d.len() + k];
                if t != u32::MAX {
                    terms.push((t as usize, ring.mul(&s, y)));
                }
            }
            b.set_diff(id as usize, SparseVec::from_terms(ring, terms));
        }
    }
    b.build()
}

pub fn tensor(c: &ChainComplex, d: &ChainComplex) -> Result<ChainComplex, ChainError> {
    tensor_window(c, d, None)
}

/// A bicomplex with cells at `(p, q)` and commuting
/// horizontal `dh: (p,q) → (p−1,q)` and vertical `dv: (p,q) → (p,q−1)`.
#[derive(Clone, Debug)]
pub struct Bicomplex {
    pub ring: CoeffRing,
    pub cells: Vec<(i32, i32, String)>,
    pub dh: Vec<SparseVec>,
    pub dv: Vec<SparseVec>,
}

impl Bicomplex {
    pub fn new(ring: CoeffRing) -> Self {
        Bicomplex { ring, cells: Vec::new(), dh: Vec::new(), dv: Vec::new() }
    }

    pub fn add_cell(&mut self, p: i32, q: i32, label: impl Into<String>) -> usize {
        self.cells.push((p, q, label.into()));
        self.dh.push(SparseVec::new());
        self.dv.push(SparseVec::new());
        self.cells.len() - 1
    }

    fn apply(&self, m: &[SparseVec], v: &SparseVec) -> SparseVec {
        let mut acc = crate::exactalg::Accumulator::new();
        for (j, c) in v.iter() {
            acc.add_vec(self.ring, c, &m[j]);
        }
        acc.finish()
    }

    pub fn validate(&self) -> Result<(), ChainError> {
        for j in 0..self.cells.len() {
            let (p, q, _) = self.cells[j];
            for i in self.dh[j].indices() {
                if (self.cells[i].0, self.cells[i].1) != (p - 1, q) {
                    return Err(ChainError::Invalid(format!("horizontal differential of cell {j} leaves its row")));
                }
            }
            for i in self.dv[j].indices() {
                if (self.cells[i].0, self.cells[i].1) != (p, q - 1) {
                    return Err(ChainError::Invalid(format!("vertical differential of cell {j} leaves its column")));
                }
            }
            if !self.apply(&self.dh, &self.dh[j]).is_empty() || !self.apply(&self.dv, &self.dv[j]).is_empty() {
                return Err(ChainError::NotAComplex { cell: j, label: self.cells[j].2.clone() });
            }
            if self.apply(&self.dh, &self.dv[j]) != self.apply(&self.dv, &self.dh[j]) {
                return Err(ChainError::Invalid(format!("square at cell {j} does not commute")));
            }
        }
        Ok(())
    }
}

/// `Tot_n = ⊕_{p+q=n}` with `d = d^v + (−1)^q d^h`.
pub fn totalize(bc: &Bicomplex) -> Result<ChainComplex, ChainError> {
    bc.validate()?;
    let ring = bc.ring;
    let mut b = ChainBuilder::new(ring);
    for (p, q, l) in &bc.cells {
        b.add_cell(l.clone(), p + q);
    }
    for j in 0..bc.cells.len() {
        let s = koszul(ring, bc.cells[j].1);
        let d = bc.dv[j].axpy(ring, &s, &bc.dh[j]);
        b.set_diff(j, d);
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::homology::{connectivity, homology};

    #[test]
    fn unit_and_spheres() {
        let q = CoeffRing::Rationals;
        let unit = ChainComplex::sphere(q, 0);
        let s2 = ChainComplex::sphere(q, 2);
        let s3 = ChainComplex::sphere(q, 3);
        let t = tensor(&s2, &s3).unwrap();
        assert_eq!(t.dims().into_iter().collect::<Vec<_>>(), vec![(5, 1)]);
        assert_eq!(tensor(&unit, &s3).unwrap().dims(), s3.dims());
        assert_eq!(connectivity(&homology(&t)), Some(4));
    }

    #[test]
    fn square_of_identities_is_acyclic() {
        let q = CoeffRing::Rationals;
        let mut bc = Bicomplex::new(q);
        let a = bc.add_cell(0, 0, "a");
        let b = bc.add_cell(1, 0, "b");
        let c = bc.add_cell(0, 1, "c");
        let d = bc.add_cell(1, 1, "d");
        bc.dh[b] = SparseVec::unit(a);
        bc.dh[d] = SparseVec::unit(c);
        bc.dv[c] = SparseVec::unit(a);
        bc.dv[d] = SparseVec::unit(b);
        let t = totalize(&bc).unwrap();
        assert!(homology(&t).is_zero());
        // A single column is the column.
        let mut col = Bicomplex::new(q);
        let x = col.add_cell(0, 1, "x");
        let y = col.add_cell(0, 0, "y");
        col.dv[x] = SparseVec::unit(y);
        assert!(homology(&totalize(&col).unwrap()).is_zero());
    }

    #[test]
    fn noncommuting_square_rejected() {
        let q = CoeffRing::Rationals;
        let mut bc = Bicomplex::new(q);
        let a = bc.add_cell(0, 0, "a");
        let b = bc.add_cell(1, 0, "b");
        let c = bc.add_cell(0, 1, "c");
        let d = bc.add_cell(1, 1, "d");
        bc.dh[b] = SparseVec::unit(a);
        bc.dh[d] = SparseVec::unit(c);
        bc.dv[c] = SparseVec::unit(a);
        bc.dv[d] = SparseVec::single(b, Scalar::from_i64(-1));
        assert!(totalize(&bc).is_err());
    }
}
