//! Smith normal form over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::elim;
use super::ring::{CoeffRing, RingError};
use super::scalar::Scalar;
use super::sparse::SparseMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub u: SparseMatrix,
    pub d: SparseMatrix,
    pub v: SparseMatrix,
    /// Nonzero diagonal entries of `d`, each dividing the next.
    pub invariant_factors: Vec<BigInt>,
}

type Dense = Vec<Vec<BigInt>>;

fn to_dense(m: &SparseMatrix) -> Dense {
    let mut d = vec![vec![BigInt::zero(); m.cols]; m.rows];
    for (i, j, x) in m.triplets() {
        d[i][j] = x.to_bigint().expect("non-integral entry in integer matrix");
    }
    d
}

fn from_dense(d: &Dense, rows: usize, cols: usize) -> SparseMatrix {
    let trip = d.iter().enumerate().flat_map(|(i, r)| {
        r.iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(move |(j, x)| (i, j, Scalar::from_bigint(x.clone())))
    });
    SparseMatrix::from_triplets(CoeffRing::Integers, rows, cols, trip)
}

fn identity(n: usize) -> Dense {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

struct Work {
    a: Dense,
    u: Dense,
    v: Dense,
    rows: usize,
    cols: usize,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        self.u.swap(i, j);
    }
    fn swap_cols(&mut self, i: usize, j: usize) {
        for r in self.a.iter_mut() {
            r.swap(i, j);
        }
        for r in self.v.iter_mut() {
            r.swap(i, j);
        }
    }
    /// row_i += q * row_j
    fn add_row(&mut self, i: usize, j: usize, q: &BigInt) {
        for k in 0..self.cols {
            let t = &self.a[j][k] * q;
            self.a[i][k] += t;
        }
        for k in 0..self.rows {
            let t = &self.u[j][k] * q;
            self.u[i][k] += t;
        }
    }
    /// col_i += q * col_j
    fn add_col(&mut self, i: usize, j: usize, q: &BigInt) {
        for k in 0..self.rows {
            let t = &self.a[k][j] * q;
            self.a[k][i] += t;
        }
        for k in 0..self.cols {
            let t = &self.v[k][j] * q;
            self.v[k][i] += t;
        }
    }
    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -&*x;
        }
        for x in self.u[i].iter_mut() {
            *x = -&*x;
        }
    }
}

/// Computes unimodular `U`, `V` with `U·M·V = D` diagonal and `d_i | d_{i+1}`.
///
/// The pivot at each step is an entry of minimal absolute value in the
/// remaining block, first in row-major order.
pub fn smith_normal_form(m: &SparseMatrix) -> Result<SnfResult, RingError> {
    if m.ring != CoeffRing::Integers {
        return Err(RingError::Unknown(format!("smith normal form needs Z, got {}", m.ring)));
    }
    let (rows, cols) = (m.rows, m.cols);
    let mut w = Work { a: to_dense(m), u: identity(rows), v: identity(cols), rows, cols };
    let mut t = 0;
    while t < rows.min(cols) {
        // Minimal nonzero pivot in the block [t.., t..].
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !w.a[i][j].is_zero()
                    && best.map_or(true, |(bi, bj)| w.a[i][j].abs() < w.a[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if !w.a[i][t].is_zero() {
                    let q = w.a[i][t].div_floor(&w.a[t][t]);
                    w.add_row(i, t, &-q);
                    if !w.a[i][t].is_zero() {
                        dirty = true;
                    }
                }
            }
            for j in t + 1..cols {
                if !w.a[t][j].is_zero() {
                    let q = w.a[t][j].div_floor(&w.a[t][t]);
                    w.add_col(j, t, &-q);
                    if !w.a[t][j].is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                // Move the smallest remaining entry of row/column t to the pivot.
                let mut bi = t;
                let mut bj = t;
                for i in t + 1..rows {
                    if !w.a[i][t].is_zero() && w.a[i][t].abs() < w.a[bi][bj].abs() {
                        bi = i;
                        bj = t;
                    }
                }
                for j in t + 1..cols {
                    if !w.a[t][j].is_zero() && w.a[t][j].abs() < w.a[bi][bj].abs() {
                        bi = t;
                        bj = j;
                    }
                }
                w.swap_rows(t, bi);
                w.swap_cols(t, bj);
                continue;
            }
            // Divisibility of the remaining block.
            let p = w.a[t][t].clone();
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !w.a[i][j].is_multiple_of(&p));
            match bad {
                Some((i, _)) => {
                    w.add_row(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if w.a[t][t].is_negative() {
            w.negate_row(t);
        }
        t += 1;
    }
    let invariant_factors: Vec<BigInt> =
        (0..rows.min(cols)).map(|i| w.a[i][i].clone()).filter(|x| !x.is_zero()).collect();
    Ok(SnfResult {
        u: from_dense(&w.u, rows, rows),
        d: from_dense(&w.a, rows, cols),
        v: from_dense(&w.v, cols, cols),
        invariant_factors,
    })
}

/// Presentation of the cokernel of `M: ring^cols -> ring^rows`, with
/// generators indexed by columns: vectors are rows and relations are the
/// rows of `M` read as `ring^cols` elements. Thus `freeRank = cols - rank`.
pub fn cokernel_presentation(m: &SparseMatrix) -> Result<(usize, Vec<BigInt>), RingError> {
    if m.ring.is_field() {
        let r = elim::rank(m)?;
        return Ok((m.cols - r, Vec::new()));
    }
    let snf = smith_normal_form(m)?;
    let r = snf.invariant_factors.len();
    let torsion = snf.invariant_factors.into_iter().filter(|x| !x.is_one()).collect();
    Ok((m.cols - r, torsion))
}

/// Determinant of a square integer matrix (Bareiss), for unimodularity checks.
pub fn determinant(m: &SparseMatrix) -> BigInt {
    assert_eq!(m.rows, m.cols);
    let n = m.rows;
    let mut a = to_dense(m);
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let x = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = x / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    if n == 0 {
        return BigInt::one();
    }
    sign * &a[n - 1][n - 1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z(rows: &[Vec<i64>]) -> SparseMatrix {
        SparseMatrix::from_dense(CoeffRing::Integers, rows)
    }

    fn check(m: &SparseMatrix) -> SnfResult {
        let s = smith_normal_form(m).unwrap();
        assert_eq!(s.u.mul(m).mul(&s.v), s.d);
        assert!(determinant(&s.u).abs().is_one());
        assert!(determinant(&s.v).abs().is_one());
        for w in s.invariant_factors.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
        for (i, j, _) in s.d.triplets() {
            assert_eq!(i, j);
        }
        s
    }

    #[test]
    fn examples() {
        let s = check(&SparseMatrix::identity(CoeffRing::Integers, 3));
        assert_eq!(s.invariant_factors, vec![BigInt::one(); 3]);
        assert!(check(&SparseMatrix::zero(CoeffRing::Integers, 2, 3)).invariant_factors.is_empty());
        let s = check(&z(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(s.invariant_factors, vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn cokernels() {
        assert_eq!(
            cokernel_presentation(&SparseMatrix::zero(CoeffRing::Rationals, 0, 3)).unwrap(),
            (3, vec![])
        );
        assert_eq!(cokernel_presentation(&z(&[vec![2]])).unwrap(), (0, vec![BigInt::from(2)]));
    }

    /// Invariant factors from gcds of k-minors, brute force.
    fn minors_oracle(rows: &[Vec<i64>]) -> Vec<BigInt> {
        fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for last in k - 1..n {
                for mut s in subsets(last, k - 1) {
                    s.push(last);
                    out.push(s);
                }
            }
            out
        }
        let nr = rows.len();
        let nc = rows[0].len();
        let mut dets = vec![BigInt::one()];
        for k in 1..=nr.min(nc) {
            let mut g = BigInt::zero();
            for rs in subsets(nr, k) {
                for cs in subsets(nc, k) {
                    let sub: Vec<Vec<i64>> =
                        rs.iter().map(|&r| cs.iter().map(|&c| rows[r][c]).collect()).collect();
                    g = g.gcd(&determinant(&z(&sub)));
                }
            }
            if g.is_zero() {
                break;
            }
            dets.push(g);
        }
        dets.windows(2).map(|w| &w[1] / &w[0]).collect()
    }

    proptest! {
        #[test]
        fn snf_matches_minors(rows in prop::collection::vec(prop::collection::vec(-4i64..5, 3), 1..4)) {
            let s = check(&z(&rows));
            prop_assert_eq!(s.invariant_factors, minors_oracle(&rows));
        }
    }
}
