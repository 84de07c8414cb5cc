//! Fixtures shared by the benchmarks in `benches/`.

use std::sync::Arc;

use hocomp_core::chain::ChainBuilder;
use hocomp_core::{Algebra, ChainComplex, CoeffRing, Operad};

pub const Q: CoeffRing = CoeffRing::Rationals;

/// One cell per entry of `degs`, zero differential.
pub fn generators(degs: &[i32]) -> ChainComplex {
    let mut b = ChainBuilder::new(Q);
    for (i, &d) in degs.iter().enumerate() {
        b.add_cell(format!("x{i}"), d);
    }
    b.build().expect("no differential")
}

pub fn trivial(o: &Operad, degs: &[i32]) -> Arc<Algebra> {
    Arc::new(Algebra::trivial(o, &generators(degs)).expect("trivial algebra"))
}

pub fn free(o: &Operad, degs: &[i32], budget: i32) -> Arc<Algebra> {
    Arc::new(Algebra::free(o, &generators(degs), budget).expect("free algebra"))
}

/// A banded random-looking integer complex, `n` cells per degree 0..=3.
pub fn banded(n: usize) -> ChainComplex {
    let mut b = ChainBuilder::new(CoeffRing::Integers);
    let mut cells = Vec::new();
    for d in 0..4 {
        cells.push((0..n).map(|i| b.add_cell(format!("c{d}_{i}"), d)).collect::<Vec<_>>());
    }
    // d² = 0: the differential out of degree 1 is zero, degrees 1 → 0 and 3 → 2 are banded.
    for (top, bot) in [(1, 0), (3, 2)] {
        for i in 0..n {
            for j in [i, (i + 1) % n] {
                let c = ((i * 7 + j * 3) % 5) as i64 + 1;
                b.add_diff_term(cells[top][i], cells[bot][j], c.into());
            }
        }
    }
    b.build().expect("banded complex")
}
