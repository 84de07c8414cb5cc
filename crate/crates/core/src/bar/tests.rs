use std::sync::Arc;

use super::derived::*;
use super::*;
use crate::chain::{homology, ChainBuilder, HomologyReport};
use crate::operad::Operad;

const Q: CoeffRing = CoeffRing::Rationals;

fn cells(degs: &[i32]) -> ChainComplex {
    let mut b = ChainBuilder::new(Q);
    for (i, &d) in degs.iter().enumerate() {
        b.add_cell(format!("v{i}"), d);
    }
    b.build().unwrap()
}

fn ranks(h: &HomologyReport, lo: i32, hi: i32) -> Vec<usize> {
    (lo..=hi).map(|n| h.rank(n)).collect()
}

#[test]
fn simplicial_identities_hold() {
    let o = Operad::assoc(Q, 4);
    let c = Operad::comm(Q, 4).unwrap();
    let algs = [
        Algebra::trivial(&o, &cells(&[1])).unwrap(),
        Algebra::free(&o, &cells(&[1]), 4).unwrap(),
        Algebra::free(&c, &cells(&[1, 2]), 4).unwrap(),
    ];
    for a in algs {
        let a = Arc::new(a);
        let bar = Bar::new(&a, BarOptions::new(3, 4).uniform()).unwrap();
        let n = bar.check_identities().unwrap();
        assert!(n > 0);
        if a.is_free() {
            bar.check_extra_degeneracy().unwrap();
        }
        for k in 0..=3 {
            bar.degenerate_subobject(k).unwrap();
        }
    }
}

#[test]
fn realizations_are_complexes() {
    let o = Operad::assoc(Q, 6);
    let a = Arc::new(Algebra::free(&o, &cells(&[1, 2]), 6).unwrap());
    let f = Fattened::new(&a, Params::window(0, 5)).unwrap();
    for k in 1..=4 {
        f.stage(k).complex.validate().unwrap();
        f.layer(k).complex.validate().unwrap();
    }
}

#[test]
fn fattened_tower_recovers_x() {
    let o = Operad::assoc(Q, 6);
    let c = Operad::comm(Q, 6).unwrap();
    let algs = [
        Algebra::trivial(&o, &cells(&[1])).unwrap(),
        Algebra::free(&o, &cells(&[1]), 6).unwrap(),
        Algebra::free(&c, &cells(&[2]), 6).unwrap(),
    ];
    for a in algs {
        let a = Arc::new(a);
        let p = Params::window(0, 5);
        let f = Fattened::new(&a, p).unwrap();
        let full = f.realize(RightModule::Whole);
        let s = p.soundness();
        assert_eq!(ranks(&homology(&full.complex), 0, s), ranks(&homology(&f.carrier()), 0, s), "{}", a.kind());
    }
}

#[test]
fn quillen_homology_of_trivial_and_free() {
    let o = Operad::assoc(Q, 6);
    let t = Arc::new(Algebra::trivial(&o, &cells(&[1])).unwrap());
    let q = tq(&t, Params::window(0, 6)).unwrap();
    let h = homology(&q.complex);
    assert_eq!(h.rank(1), 1);
    assert_eq!(h.rank(0), 0);
    let v = cells(&[1, 2]);
    let free = Arc::new(Algebra::free(&o, &v, 6).unwrap());
    let q = tq(&free, Params::window(0, 5)).unwrap();
    assert_eq!(ranks(&homology(&q.complex), 0, 5), ranks(&homology(&v), 0, 5));
}

#[test]
fn moore_matches_normalized() {
    let o = Operad::assoc(Q, 5);
    for a in [Algebra::trivial(&o, &cells(&[1])).unwrap(), Algebra::free(&o, &cells(&[1, 2]), 5).unwrap()] {
        let a = Arc::new(a);
        let bar = Bar::new(&a, BarOptions::new(4, 5)).unwrap();
        for band in [(1, 1), (1, 2), (1, usize::MAX)] {
            let n = bar.realize(band).complex;
            let m = bar.moore(band).unwrap();
            m.validate().unwrap();
            assert_eq!(ranks(&homology(&n), 0, 4), ranks(&homology(&m), 0, 4));
        }
    }
}
