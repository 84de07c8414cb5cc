use super::*;
use crate::bar::derived::circle_on;
use crate::operad::Operad;
use crate::symseq::perm;

const Q: CoeffRing = CoeffRing::Rationals;

fn gens(degs: &[i32]) -> ChainComplex {
    let mut b = ChainBuilder::new(Q);
    for (i, &d) in degs.iter().enumerate() {
        b.add_cell(format!("v{i}"), d);
    }
    b.build().unwrap()
}

/// `e` in degree `n + 1` bounding `v` in degree `n`, plus extra cycles.
fn disk(n: i32, extra: &[i32]) -> ChainComplex {
    let mut b = ChainBuilder::new(Q);
    let e = b.add_cell("e", n + 1);
    let v = b.add_cell("v", n);
    b.set_diff(e, SparseVec::unit(v));
    for (i, &d) in extra.iter().enumerate() {
        b.add_cell(format!("w{i}"), d);
    }
    b.build().unwrap()
}

fn through(c: &ChainComplex, d: i32) -> BTreeMap<i32, usize> {
    dims_through(c, d)
}

fn inclusion(x: &ChainComplex, y: &ChainComplex, cells: &[usize]) -> ChainMap {
    ChainMap::new(Arc::new(x.clone()), Arc::new(y.clone()), cells.iter().map(|&c| SparseVec::unit(c)).collect()).unwrap()
}

#[test]
fn relative_circle_units() {
    let o = Operad::assoc(Q, 4);
    let v = gens(&[1, 2]);
    let x = Arc::new(Algebra::free(&o, &v, 4).unwrap());
    // O ∘_O X = X and τ_1 O ∘_O (O ∘ V) = V.
    let whole = relative_circle(RightModule::Whole, &x, 4).unwrap();
    assert_eq!(through(&whole, 4), through(&x.carrier, 4));
    let t1 = relative_circle(RightModule::Truncation(1), &x, 4).unwrap();
    assert_eq!(through(&t1, 4), through(&v, 4));
    let t2 = relative_circle(RightModule::Truncation(2), &x, 4).unwrap();
    assert_eq!(through(&t2, 4), through(&circle_on(&x, RightModule::Truncation(2), &v, 4).unwrap(), 4));
    // A trivial algebra is its own relative circle product.
    let tr = Arc::new(Algebra::trivial(&o, &disk(1, &[2])).unwrap());
    assert_eq!(through(&relative_circle(RightModule::Whole, &tr, 4).unwrap(), 4), through(&tr.carrier, 4));
}

#[test]
fn enveloping_of_initial_algebra() {
    for o in [Operad::assoc(Q, 5), Operad::comm(Q, 5).unwrap()] {
        let x = Arc::new(Algebra::free(&o, &ChainComplex::zero(Q), 3).unwrap());
        for q in 1..=3 {
            let e = enveloping(&x, q, 3).unwrap();
            assert_eq!(e.complex.len(), o.dim(q), "{} q={q}", o.name);
            let basis: Vec<SparseVec> = (0..o.dim(q) as u32).map(|a| e.operation((q, a)).unwrap()).collect();
            for sigma in perm::all(q) {
                let m = e.action(&sigma);
                for a in 0..o.dim(q) as u32 {
                    let (b, s) = o.act_perm((q, a), &sigma);
                    let want = basis[b as usize].scale(Q, &Q.sign(s));
                    let got = {
                        let mut acc = Accumulator::new();
                        for (i, c) in basis[a as usize].iter() {
                            acc.add_vec(Q, c, &m[i]);
                        }
                        acc.finish()
                    };
                    assert_eq!(got, want, "{} σ={sigma:?} a={a}", o.name);
                }
            }
        }
    }
}

#[test]
fn enveloping_of_free_algebra() {
    let o = Operad::assoc(Q, 6);
    let v = gens(&[1]);
    let x = Arc::new(Algebra::free(&o, &v, 3).unwrap());
    for q in 0..=2 {
        let e = enveloping(&x, q, 3).unwrap();
        // ∐_p O[p+q] ⊗_{Σ_p} V^{⊗p}: words in p letters and q slots.
        let leaves = v.direct_sum(&{
            let mut b = ChainBuilder::new(Q);
            for j in 0..q {
                b.add_cell(format!("s{j}"), 0);
            }
            b.build_unchecked()
        })
        .unwrap();
        let o2 = o.with_cutoff(3 + q).unwrap();
        let slots: Vec<usize> = (1..1 + q).collect();
        let mut f = Forest::new(&o2, &leaves, &slots);
        let all = |k: &[u32]| k.iter().filter(|&&c| c >= 1).count() == q;
        let l = f.add_layer(0, LayerSpec::band(q.max(1), 3 + q, 3), &Filter { kids: Some(&all), ..Filter::default() }).unwrap();
        let (want, _) = f.layer_complex(l, |_| true);
        assert_eq!(e.complex.dims(), want.dims(), "q={q}");
    }
}

#[test]
fn cube_ends_and_span() {
    let y = gens(&[1, 1]);
    let x = gens(&[1]);
    let i = inclusion(&x, &y, &[0]);
    let mut b = CubeBuilder::new(&i, 6).unwrap();
    for t in 1..=3 {
        assert_eq!(b.cube(t, 0).unwrap().complex.len(), 1);
        assert_eq!(b.cube(t, t).unwrap().complex.len(), 1 << t);
        for q in 0..=t {
            let c = b.cube(t, q).unwrap();
            // Tuples with at most q factors outside X.
            let want = c.power.tuples.iter().filter(|w| w.iter().filter(|&&y| y != 0).count() <= q).count();
            assert_eq!(c.complex.len(), want, "t={t} q={q}");
            for sigma in perm::all(t) {
                c.action(&sigma).unwrap();
            }
        }
    }
    // Y ⊗ X + X ⊗ Y inside Y^{⊗2}.
    let c = b.cube(2, 1).unwrap();
    let span = crate::exactalg::Span::of(Q, c.power.tuples.len(), c.into.iter().cloned());
    let oracle = crate::exactalg::Span::of(Q, 4, [0, 1, 2].map(SparseVec::unit));
    assert_eq!(span.dim(), oracle.dim());
    assert!(span.contains_span(&oracle));
    let zero = inclusion(&ChainComplex::zero(Q), &y, &[]);
    let mut z = CubeBuilder::new(&zero, 6).unwrap();
    assert!(z.cube(2, 1).unwrap().complex.is_empty());
    assert!(z.cube(3, 2).unwrap().complex.is_empty());
}

#[test]
fn cube_with_differential() {
    let y = disk(1, &[1]);
    let x = gens(&[1]);
    let xm = inclusion(&x, &y, &[1]);
    let mut b = CubeBuilder::new(&xm, 5).unwrap();
    for t in 1..=3 {
        for q in 0..=t {
            let c = b.cube(t, q).unwrap();
            c.complex.validate().unwrap();
            ChainMap::new(Arc::new(c.complex.clone()), Arc::new(c.power.complex.clone()), c.into.clone()).unwrap();
        }
    }
}

fn data(a: Arc<Algebra>, x: &ChainComplex, fimg: Vec<SparseVec>, y: &ChainComplex, cells: &[usize]) -> PushoutData {
    let f = ChainMap::new(Arc::new(x.clone()), Arc::new(a.carrier.clone()), fimg).unwrap();
    PushoutData::new(a, f, inclusion(x, y, cells)).unwrap()
}

#[test]
fn pushout_along_identity() {
    let o = Operad::assoc(Q, 5);
    let a = Arc::new(Algebra::free(&o, &gens(&[1, 2]), 4).unwrap());
    let x = gens(&[1]);
    let d = data(a.clone(), &x, vec![SparseVec::unit(0)], &x, &[0]);
    let p = pushout(&d, 4).unwrap();
    assert_eq!(p.dims(), through(&a.carrier, 4));
}

#[test]
fn pushout_of_free_along_free() {
    for o in [Operad::assoc(Q, 5), Operad::comm(Q, 5).unwrap()] {
        let x = gens(&[1]);
        let y = disk(1, &[2]);
        let a = Arc::new(Algebra::free(&o, &x, 4).unwrap());
        let d = data(a.clone(), &x, vec![SparseVec::unit(0)], &y, &[1]);
        let p = pushout(&d, 4).unwrap();
        let want = Algebra::free(&o, &y, 4).unwrap();
        assert_eq!(p.dims(), through(&want.carrier, 4), "{}", o.name);
    }
}

#[test]
fn pushout_into_trivial_algebra() {
    let o = Operad::assoc(Q, 5);
    let a = Arc::new(Algebra::trivial(&o, &gens(&[1, 2])).unwrap());
    let x = gens(&[1]);
    let y = disk(1, &[]);
    let d = data(a, &x, vec![SparseVec::unit(0)], &y, &[1]);
    let p = pushout(&d, 4).unwrap();
    assert_eq!(p.filtered.stages.len(), 5);
    p.direct.validate().unwrap();
}
