use std::sync::Arc;

use hocomp_core::chain::{connectivity, homology, tensor, ChainBuilder};
use hocomp_core::pushout::relative_circle;
use hocomp_core::symseq::{circle, SymSeq};
use hocomp_core::{Algebra, ChainComplex, CoeffRing, Operad, RightModule};
use proptest::prelude::*;

const Q: CoeffRing = CoeffRing::Rationals;

/// Per degree `lo + i`: `cycles[i]` cycles, then `bounds[i]` cells whose
/// boundaries are combinations of the cycles one degree down.
fn complex(ring: CoeffRing, lo: i32, cycles: &[usize], bounds: &[usize], coeffs: &[i64]) -> ChainComplex {
    let mut b = ChainBuilder::new(ring);
    let mut c = coeffs.iter().cycle();
    let mut below: Vec<usize> = Vec::new();
    for (i, (&z, &w)) in cycles.iter().zip(bounds).enumerate() {
        let d = lo + i as i32;
        let here: Vec<usize> = (0..z).map(|j| b.add_cell(format!("z{d}_{j}"), d)).collect();
        for j in 0..w {
            let cell = b.add_cell(format!("b{d}_{j}"), d);
            for &t in &below {
                let k = *c.next().unwrap();
                if k != 0 {
                    b.add_diff_term(cell, t, k.into());
                }
            }
        }
        below = here;
    }
    b.build().unwrap()
}

fn small(ring: CoeffRing) -> impl Strategy<Value = ChainComplex> {
    (0i32..3, prop::collection::vec(0usize..3, 4), prop::collection::vec(0usize..3, 4), prop::collection::vec(-3i64..4, 1..12))
        .prop_map(move |(lo, z, w, c)| complex(ring, lo, &z, &w, &c))
}

/// Cells only, no differential.
fn generators(degs: &[i32]) -> ChainComplex {
    let mut b = ChainBuilder::new(Q);
    for (i, &d) in degs.iter().enumerate() {
        b.add_cell(format!("v{i}"), d);
    }
    b.build().unwrap()
}

fn operad(com: bool, cutoff: usize) -> Operad {
    if com {
        Operad::comm(Q, cutoff).unwrap()
    } else {
        Operad::assoc(Q, cutoff)
    }
}

fn dims_through(s: &SymSeq, d: i32) -> Vec<((usize, i32), usize)> {
    s.dims().into_iter().filter(|&((_, n), k)| n <= d && k > 0).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kunneth_over_a_field(c in small(Q), d in small(Q)) {
        let (hc, hd) = (homology(&c), homology(&d));
        let t = homology(&tensor(&c, &d).unwrap());
        for n in 0..12 {
            let want: usize = (0..=n).map(|p| hc.rank(p) * hd.rank(n - p)).sum();
            prop_assert_eq!(t.rank(n), want, "degree {}", n);
        }
    }

    #[test]
    fn tensor_connectivity(c in small(Q), d in small(Q)) {
        let t = homology(&tensor(&c, &d).unwrap());
        if let (Some(m), Some(n)) = (connectivity(&homology(&c)), connectivity(&homology(&d))) {
            prop_assert!(connectivity(&t).map_or(true, |k| k >= m + n + 1));
        } else {
            prop_assert!(connectivity(&t).is_none());
        }
    }

    #[test]
    fn tensor_is_symmetric_over_z(c in small(CoeffRing::Integers), d in small(CoeffRing::Integers)) {
        let a = homology(&tensor(&c, &d).unwrap());
        let b = homology(&tensor(&d, &c).unwrap());
        for n in 0..12 {
            prop_assert_eq!(a.group(n), b.group(n), "degree {}", n);
        }
    }

    #[test]
    fn circle_is_associative(com_a in any::<bool>(), com_b in any::<bool>(), degs in prop::collection::vec(1i32..3, 1..3)) {
        // Below degree 5 only arities ≤ 4 contribute, so cutoff 4 is exact there.
        let (a, b) = (operad(com_a, 4), operad(com_b, 4));
        let v = SymSeq::hat(&generators(&degs), 4);
        let left = circle(&circle(a.seq(), b.seq()).unwrap(), &v).unwrap();
        let right = circle(a.seq(), &circle(b.seq(), &v).unwrap()).unwrap();
        prop_assert_eq!(dims_through(&left, 4), dims_through(&right, 4));
    }

    #[test]
    fn relative_circle_counit(com in any::<bool>(), free in any::<bool>(), degs in prop::collection::vec(1i32..4, 1..3)) {
        let o = operad(com, 6);
        let v = generators(&degs);
        let x = Arc::new(if free { Algebra::free(&o, &v, 5).unwrap() } else { Algebra::trivial(&o, &v).unwrap() });
        // O ∘_O X ≅ X.
        let whole = homology(&relative_circle(RightModule::Whole, &x, 5).unwrap());
        let hx = homology(&x.carrier);
        for n in 0..=4 {
            prop_assert_eq!(whole.group(n), hx.group(n), "degree {}", n);
        }
        // τ_1 O ∘_O (O ∘ V) ≅ V.
        if free {
            let t1 = homology(&relative_circle(RightModule::Truncation(1), &x, 5).unwrap());
            let hv = homology(&v);
            for n in 0..=4 {
                prop_assert_eq!(t1.group(n), hv.group(n), "degree {}", n);
            }
        }
    }
}
