use criterion::{black_box, criterion_group, criterion_main, Criterion};
use hocomp_bench::{banded, free, trivial, Q};
use hocomp_core::bar::derived::tq;
use hocomp_core::chain::{homology, tensor};
use hocomp_core::operad::check_operad_axioms;
use hocomp_core::{CompletionTower, Operad, Params};

fn linear_algebra(c: &mut Criterion) {
    let x = banded(40);
    c.bench_function("homology banded Z 160 cells", |b| b.iter(|| homology(black_box(&x))));
    let small = banded(6);
    c.bench_function("tensor square 24 cells", |b| b.iter(|| tensor(black_box(&small), black_box(&small)).unwrap()));
}

fn operads(c: &mut Criterion) {
    let a = Operad::assoc(Q, 5);
    let m = Operad::comm(Q, 6).unwrap();
    c.bench_function("axioms As R=5", |b| b.iter(|| check_operad_axioms(black_box(&a))));
    c.bench_function("axioms Com R=6", |b| b.iter(|| check_operad_axioms(black_box(&m))));
}

fn bar(c: &mut Criterion) {
    let o = Operad::assoc(Q, 6);
    let x = trivial(&o, &[1]);
    c.bench_function("tq trivial As deg1 window 0:6", |b| b.iter(|| tq(black_box(&x), Params::window(0, 6)).unwrap()));
    let m = Operad::comm(Q, 6).unwrap();
    let y = free(&m, &[1, 2], 7);
    c.bench_function("tower free Com deg1,2 Kmax 6", |b| {
        b.iter(|| CompletionTower::build(black_box(&y), 6, Params::window(0, 6)).unwrap().completion().unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = linear_algebra, operads, bar
}
criterion_main!(benches);
