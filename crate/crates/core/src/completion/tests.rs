use std::sync::Arc;

use super::verify::{self, Status};
use super::*;
use crate::chain::ChainComplex;
use crate::operad::Operad;
use crate::CoeffRing;

const Q: CoeffRing = CoeffRing::Rationals;

fn trivial_as() -> Arc<Algebra> {
    Arc::new(Algebra::trivial(&Operad::assoc(Q, 6), &ChainComplex::sphere(Q, 1)).unwrap())
}

fn free(o: Operad, deg: i32, budget: i32) -> Arc<Algebra> {
    Arc::new(Algebra::free(&o, &ChainComplex::sphere(Q, deg), budget).unwrap())
}

#[test]
fn trivial_tower_sequences() {
    let t = CompletionTower::build(&trivial_as(), 3, Params::window(0, 4)).unwrap();
    assert_eq!(t.stage_homology(1).dim(1), 1);
    for k in 2..=3 {
        assert!(t.short_exact(k).unwrap().exact);
        let les = t.long_exact(k).unwrap();
        assert!(les.exact, "{:?}", les.nodes);
        assert!(t.layer_routes(k).unwrap().agree);
    }
    assert!(t.coaugmented_short_exact(2).unwrap().exact);
    let v = verify::convergence_of(&t);
    assert!(v.passed(), "{}", v.to_json());
}

#[test]
fn free_commutative_converges() {
    let x = free(Operad::comm(Q, 6).unwrap(), 2, 7);
    let v = verify::convergence(&x, 6, Params::window(0, 6)).unwrap();
    assert!(v.passed(), "{}", v.to_json());
}

#[test]
fn spectral_sequence_of_free_algebra_degenerates() {
    let x = free(Operad::assoc(Q, 6), 1, 6);
    let t = CompletionTower::build(&x, 5, Params::window(0, 5)).unwrap();
    let ss = t.spectral_sequence(5).unwrap();
    assert!(ss.certificate.holds, "{}", ss.report());
    assert!(ss.degenerates_at_e1());
}

#[test]
fn spectral_sequence_of_trivial_algebra() {
    let t = CompletionTower::build(&trivial_as(), 5, Params::window(0, 5)).unwrap();
    let ss = t.spectral_sequence(5).unwrap();
    assert!(ss.certificate.holds, "{}", ss.report());
    assert!(ss.to_csv().starts_with("r,s,t,rank,torsion\n"));
}

#[test]
fn hurewicz_boundaries() {
    let p = Params::window(0, 4);
    let x = free(Operad::assoc(Q, 6), 1, 5);
    assert!(verify::hurewicz(&x, p).unwrap().passed());
    let b = verify::hurewicz_boundary(&x, p).unwrap();
    assert_eq!((b.n, b.iso_at_top, b.strict_surjection), (0, Some(true), Some(true)));
    assert!(verify::hurewicz(&trivial_as(), p).unwrap().passed());
}

#[test]
fn whitehead_pass_and_fail() {
    let p = Params::window(0, 4);
    let x = free(Operad::assoc(Q, 6), 1, 5);
    let id = crate::algebra::AlgebraMap::identity(x.clone());
    assert!(verify::whitehead(&id, p).unwrap().passed());
    assert!(verify::relative_hurewicz(&id, 4, p).unwrap().passed());
    let y = trivial_as();
    let f = crate::algebra::AlgebraMap::from_generators(x, y, &[crate::SparseVec::unit(0)]).unwrap();
    let v = verify::whitehead(&f, p).unwrap();
    assert_eq!(v.status, Status::Fail);
    assert_eq!(v.witness.as_ref().unwrap().degree, 2);
    assert!(verify::relative_hurewicz(&f, 4, p).unwrap().passed());
}
