//! The acceptance criteria, each run at exact equality. One line per
//! criterion; the process fails if any criterion does.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use hocomp_core::algebra::io::{map_from_str, AlgebraFile};
use hocomp_core::bar::derived::{derived_circle, tq, Fattened};
use hocomp_core::bar::{prepare, Bar, BarOptions};
use hocomp_core::chain::{connectivity, homology, tensor, ChainBuilder};
use hocomp_core::completion::verify;
use hocomp_core::operad::check_operad_axioms;
use hocomp_core::pushout::{pushout_direct, pushout_filtered, PushoutData};
use hocomp_core::{Algebra, AlgebraMap, ChainComplex, ChainMap, CoeffRing, CompletionTower, HomologyReport, Operad, Params, RightModule, SparseVec, Status};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const Q: CoeffRing = CoeffRing::Rationals;
const SEED: u64 = 0x5eed;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn data(rel: &str) -> String {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

/// Every bundled algebra, with free ones computed through `budget`.
fn bundled(budget: i32) -> Vec<Arc<Algebra>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/algebras");
    let mut names: Vec<_> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    names.sort();
    names
        .iter()
        .map(|p| {
            let f: AlgebraFile = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
            Arc::new(f.build(None, Some(budget)).unwrap())
        })
        .collect()
}

fn operads() -> [Operad; 2] {
    [Operad::assoc(Q, 6), Operad::comm(Q, 6).unwrap()]
}

fn cells(degs: &[i32]) -> ChainComplex {
    let mut b = ChainBuilder::new(Q);
    for (i, &d) in degs.iter().enumerate() {
        b.add_cell(format!("v{i}"), d);
    }
    b.build().unwrap()
}

fn nonzero(rng: &mut ChaCha8Rng) -> i64 {
    let c = rng.gen_range(1..=3);
    if rng.gen_bool(0.5) {
        -c
    } else {
        c
    }
}

/// At most two cells in degrees `lo..=hi`, sometimes joined by a differential.
fn random_v(rng: &mut ChaCha8Rng, lo: i32, hi: i32) -> ChainComplex {
    let n = rng.gen_range(1..=2);
    let mut degs: Vec<i32> = (0..n).map(|_| rng.gen_range(lo..=hi)).collect();
    degs.sort();
    let mut b = ChainBuilder::new(Q);
    let ids: Vec<usize> = degs.iter().enumerate().map(|(i, &d)| b.add_cell(format!("v{i}"), d)).collect();
    if n == 2 && degs[1] == degs[0] + 1 && rng.gen_bool(0.5) {
        b.add_diff_term(ids[1], ids[0], nonzero(rng).into());
    }
    b.build().unwrap()
}

/// Cycles in degrees `lo..lo + 4`; every other cell bounds into them.
fn random_complex(rng: &mut ChaCha8Rng, lo: i32) -> ChainComplex {
    let mut b = ChainBuilder::new(Q);
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for d in lo..lo + 4 {
        let z: Vec<usize> = (0..rng.gen_range(0..=2)).map(|i| b.add_cell(format!("z{d}_{i}"), d)).collect();
        if d > lo {
            let below = cycles.last().unwrap().clone();
            for i in 0..rng.gen_range(0..=2) {
                let c = b.add_cell(format!("b{d}_{i}"), d);
                for &t in &below {
                    if rng.gen_bool(0.6) {
                        b.add_diff_term(c, t, nonzero(rng).into());
                    }
                }
            }
        }
        cycles.push(z);
    }
    b.build().unwrap()
}

fn ranks(h: &HomologyReport, hi: i32) -> Vec<usize> {
    (0..=hi).map(|n| h.rank(n)).collect()
}

/// Homology through `P − 1` is unchanged when the bar construction gains a level.
fn stable_in_levels(p: Params, f: impl Fn(Params) -> Result<HomologyReport, String>) -> Result<(), String> {
    let hi = p.soundness().min(p.levels as i32 - 1);
    let a = f(p)?;
    let b = f(p.with_levels(p.levels + 1))?;
    ensure!(ranks(&a, hi) == ranks(&b, hi), "P = {} gives {:?}, P + 1 gives {:?}", p.levels, ranks(&a, hi), ranks(&b, hi));
    for n in 0..=hi {
        ensure!(a.group(n) == b.group(n), "degree {n}: {} vs {}", a.group(n), b.group(n));
    }
    Ok(())
}

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

fn c01_axioms() -> Outcome {
    let mut out = Vec::new();
    for o in [Operad::assoc(Q, 6), Operad::comm(Q, 6).unwrap()] {
        let t = Instant::now();
        let r = check_operad_axioms(&o);
        let dt = t.elapsed();
        ensure!(r.pass, "{}: {}", o.name, r.witness.unwrap_or_default());
        ensure!(dt < Duration::from_secs(10), "{} took {dt:?}", o.name);
        out.push(format!("{} {} identities in {:.2}s", o.name, r.checked, dt.as_secs_f64()));
    }
    Ok(out.join(", "))
}

fn c02_derived_circle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let p = Params::window(0, 6);
    let mut worst = Duration::ZERO;
    for i in 0..5 {
        let o = &operads()[i % 2];
        let v = random_v(&mut rng, 1, 3);
        let t = Instant::now();
        let x = Arc::new(Algebra::free(o, &v, p.dtot()).map_err(e)?);
        let h = homology(&derived_circle(RightModule::Truncation(1), &x, p).map_err(e)?.complex);
        let dt = t.elapsed();
        worst = worst.max(dt);
        let want = homology(&v);
        for n in 0..=6 {
            ensure!(h.group(n) == want.group(n), "instance {i} over {}: degree {n} gives {} but H(V) is {}", o.name, h.group(n), want.group(n));
        }
        ensure!(dt < Duration::from_secs(60), "instance {i} took {dt:?}");
    }
    Ok(format!("5 instances through degree 6, slowest {:.2}s", worst.as_secs_f64()))
}

fn c03_fattened() -> Outcome {
    let p = Params::window(0, 5).with_levels(5);
    let hi = p.levels as i32 - 1;
    let algs = bundled(p.dtot());
    for x in &algs {
        let f = Fattened::new(x, p).map_err(e)?;
        let full = homology(&f.realize(RightModule::Whole).complex);
        let h = homology(&x.carrier);
        for n in 0..=hi {
            ensure!(full.group(n) == h.group(n), "{}: degree {n} gives {} but H(X) is {}", x.name, full.group(n), h.group(n));
        }
    }
    Ok(format!("{} bundled algebras through degree {hi} at P = {}", algs.len(), p.levels))
}

fn c04_layer_ses() -> Outcome {
    let x = Arc::new(Algebra::trivial(&Operad::assoc(Q, 6), &cells(&[1])).map_err(e)?);
    let t = CompletionTower::build(&x, 4, Params::window(0, 6)).map_err(e)?;
    let mut rows = 0;
    for k in 2..=4 {
        let r = t.short_exact(k).map_err(e)?;
        for n in 0..=6 {
            let d = r.degrees.iter().find(|d| d.degree == n);
            let ok = d.map_or(true, |d| d.exact && d.sub + d.quot == d.mid);
            ensure!(ok, "k = {k}, degree {n}: {:?}", d);
            rows += usize::from(d.is_some());
        }
        ensure!(r.exact, "k = {k} not exact");
    }
    Ok(format!("k = 2..4, {rows} nonempty degrees"))
}

fn c05_layer_routes() -> Outcome {
    let mut algs = bundled(6);
    algs.retain(|x| x.operad.is_unitary1());
    ensure!(!algs.is_empty(), "no unitary1 algebras");
    for x in &algs {
        let t = CompletionTower::build(x, 3, Params::window(0, 5)).map_err(e)?;
        for k in 2..=3 {
            let r = t.layer_routes(k).map_err(e)?;
            ensure!(r.agree, "{} k = {k}: bar {:?} vs tensor {:?}", x.name, r.bar, r.tensor);
        }
    }
    Ok(format!("{} algebras, k = 2, 3, through degree 5", algs.len()))
}

fn c06_strong_convergence() -> Outcome {
    let p = Params::window(0, 6);
    let mut algs = bundled(p.dtot());
    algs.retain(|x| connectivity(&homology(&x.carrier)).map_or(true, |c| c >= 0));
    let mut isos = 0;
    for x in &algs {
        let t = CompletionTower::build(x, 6, p).map_err(e)?;
        let hi = t.soundness();
        for k in 1..=6 {
            for i in 0..=hi.min(k as i32) {
                let m = t.coaugmentation_map(k, i);
                ensure!(m.rank() == m.source_dim && m.rank() == m.target_dim, "{}: H_{i}(X) → H_{i}(stage {k}) has rank {} for {} → {}", x.name, m.rank(), m.source_dim, m.target_dim);
                isos += 1;
            }
            if (k as i32) < hi {
                let m = t.coaugmentation_map(k, k as i32 + 1);
                ensure!(m.rank() == m.target_dim, "{}: H_{}(X) → stage {k} not onto", x.name, k + 1);
            }
        }
    }
    Ok(format!("{} algebras, {isos} isomorphisms, Kmax 6", algs.len()))
}

fn c07_spectral_sequence() -> Outcome {
    // Degree n is certified once the differentials out of n + 1 are known.
    let p = Params::window(0, 6);
    let mut algs = bundled(p.dtot());
    for o in operads() {
        algs.push(Arc::new(Algebra::free(&o, &cells(&[1, 2]), p.dtot()).map_err(e)?));
    }
    let mut free = 0;
    for x in &algs {
        let t = CompletionTower::build(x, 6, p).map_err(e)?;
        let ss = t.spectral_sequence(6).map_err(e)?;
        ensure!(ss.certificate.holds, "{}:\n{}", x.name, ss.report());
        ensure!(ss.through >= 5, "{}: certified only through {}", x.name, ss.through);
        let lim = t.completion().map_err(e)?;
        for i in 0..=5 {
            let f = ss.certificate.filtration.iter().find(|f| f.degree == i).ok_or(format!("{}: degree {i} missing", x.name))?;
            let sum: usize = ss.infinity.entries.iter().filter(|en| en.t - en.s as i32 == i).map(|en| en.rank).sum();
            ensure!(f.ok && sum == f.e_infinity && sum == lim.rank(i), "{} degree {i}: Σ E^∞ = {sum}, H(X^) = {}", x.name, lim.rank(i));
        }
        if x.is_free() {
            free += 1;
            ensure!(ss.degenerates_at_e1(), "{} is free but has a nonzero differential", x.name);
        }
    }
    Ok(format!("{} algebras, {free} free ones degenerate at E1", algs.len()))
}

fn c08_hurewicz() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let p = Params::window(0, 5);
    let mut tally = [0usize; 3];
    let check = |x: &Arc<Algebra>, tally: &mut [usize; 3]| -> Result<(), String> {
        let v = verify::hurewicz(x, p).map_err(e)?;
        ensure!(v.status == Status::Pass, "{}: {}", x.name, v.to_json());
        let b = verify::hurewicz_boundary(x, p).map_err(e)?;
        tally[0] += 1;
        tally[1] += usize::from(b.iso_at_top == Some(true));
        tally[2] += usize::from(b.strict_surjection == Some(true));
        Ok(())
    };
    for i in 0..12 {
        let o = &operads()[i % 2];
        let n = rng.gen_range(0..=1);
        let v = random_v(&mut rng, n + 1, n + 2);
        let x = if rng.gen_bool(0.5) { Algebra::free(o, &v, p.dtot()) } else { Algebra::trivial(o, &v) };
        check(&Arc::new(x.map_err(e)?.named(format!("random {i}"))), &mut tally)?;
    }
    let random = tally;
    // Free associative algebras on one generator in degree 1, and on
    // generators in degrees 2 and 3: iso at 2n + 1, strictly onto at 2n + 2.
    for degs in [vec![1], vec![2, 3]] {
        let x = Arc::new(Algebra::free(&operads()[0], &cells(&degs), p.dtot()).map_err(e)?.named(format!("free {degs:?}")));
        let before = tally;
        check(&x, &mut tally)?;
        ensure!(tally[1] > before[1] && tally[2] > before[2], "{} does not witness both boundaries", x.name);
    }
    ensure!(random[0] >= 10, "only {} random instances", random[0]);
    Ok(format!("{} random passes, boundary witnessed {} (iso) and {} (surjection) times", random[0], tally[1], tally[2]))
}

fn c09_whitehead() -> Outcome {
    let p = Params::window(0, 4);
    let o = Operad::assoc(Q, 6);
    let x = Arc::new(Algebra::free(&o, &cells(&[1]), p.dtot()).map_err(e)?);
    // Adjoining an acyclic pair of generators changes nothing up to homology.
    let mut b = ChainBuilder::new(Q);
    b.add_cell("x", 1);
    let v = b.add_cell("v", 2);
    let w = b.add_cell("w", 3);
    b.set_diff(w, SparseVec::unit(v));
    let y = Arc::new(Algebra::free(&o, &b.build().map_err(e)?, p.dtot()).map_err(e)?);
    let f = AlgebraMap::from_generators(x.clone(), y, &[SparseVec::unit(0)]).map_err(e)?;
    for (name, m) in [("identity", AlgebraMap::identity(x)), ("acyclic extension", f)] {
        let v = verify::whitehead(&m, p).map_err(e)?;
        ensure!(v.status == Status::Pass, "{name}: {}", v.to_json());
    }
    let bad = map_from_str(&data("maps/free_to_trivial.json"), None, Some(p.dtot())).map_err(e)?;
    let v = verify::whitehead(&bad, p).map_err(e)?;
    ensure!(v.status == Status::Fail, "free to trivial: {}", v.to_json());
    let w = v.witness.ok_or("fail without witness")?;
    Ok(format!("two isomorphisms pass, free to trivial fails at degree {}", w.degree))
}

/// A random pushout of `A ← X → Y` with `X ⊂ Y` a subcomplex of cycles.
fn random_pushout(rng: &mut ChaCha8Rng, dtot: i32) -> Result<PushoutData, String> {
    let o = &operads()[rng.gen_range(0..2)];
    let gens = {
        let n = rng.gen_range(1..=2);
        let degs: Vec<i32> = (0..n).map(|_| rng.gen_range(1..=2)).collect();
        cells(&degs)
    };
    let a = match rng.gen_range(0..3) {
        0 => Algebra::free(o, &gens, dtot).map_err(e)?,
        1 => Algebra::trivial(o, &random_v(rng, 1, 3)).map_err(e)?,
        _ => {
            let name = if o.name.contains("om") { "algebras/exterior_com.json" } else { "algebras/dual_as.json" };
            let f: AlgebraFile = serde_json::from_str(&data(name)).map_err(e)?;
            f.build(None, Some(dtot)).map_err(e)?
        }
    };
    let a = Arc::new(a);
    let xdegs: Vec<i32> = (0..rng.gen_range(1..=2)).map(|_| rng.gen_range(1..=2)).collect();
    let x = cells(&xdegs);
    // Images: combinations of cycles and boundaries of A in the same degree.
    let c = &a.carrier;
    let mut images = Vec::new();
    for &d in &xdegs {
        let mut img = SparseVec::new();
        for &cell in c.cells_in_degree(d) {
            if c.diff(cell as usize).is_empty() && rng.gen_bool(0.5) {
                img = img.add(Q, &SparseVec::unit(cell as usize).scale(Q, &nonzero(rng).into()));
            }
        }
        for &cell in c.cells_in_degree(d + 1) {
            if rng.gen_bool(0.3) {
                img = img.add(Q, c.diff(cell as usize));
            }
        }
        images.push(img);
    }
    let f = ChainMap::new(Arc::new(x.clone()), Arc::new(c.clone()), images).map_err(e)?;
    // Y: the cells of X, extra cycles, then cells bounding into both.
    let mut b = ChainBuilder::new(Q);
    let mut cyc: Vec<(usize, i32)> = xdegs.iter().enumerate().map(|(i, &d)| (b.add_cell(format!("x{i}"), d), d)).collect();
    for i in 0..rng.gen_range(0..=1) {
        let d = rng.gen_range(1..=3);
        cyc.push((b.add_cell(format!("w{i}"), d), d));
    }
    for i in 0..rng.gen_range(1..=2) {
        let d = rng.gen_range(2..=3);
        let cell = b.add_cell(format!("c{i}"), d);
        for &(z, dz) in &cyc {
            if dz == d - 1 && rng.gen_bool(0.7) {
                b.add_diff_term(cell, z, nonzero(rng).into());
            }
        }
    }
    let y = b.build().map_err(e)?;
    let i = ChainMap::new(Arc::new(x), Arc::new(y), (0..xdegs.len()).map(SparseVec::unit).collect()).map_err(e)?;
    PushoutData::new(a, f, i).map_err(e)
}

fn c10_pushouts() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 10);
    let dtot = 4;
    let mut cells_total = 0;
    for k in 0..25 {
        let d = random_pushout(&mut rng, dtot)?;
        let direct = pushout_direct(&d, dtot).map_err(e)?;
        let filtered = pushout_filtered(&d, dtot).map_err(e)?;
        let last = filtered.stages.last().ok_or("no stages")?;
        for n in 0..=dtot {
            let a = direct.rank_in_degree(n);
            let b = last.get(&n).copied().unwrap_or(0);
            ensure!(a == b, "instance {k}, degree {n}: direct {a}, filtered {b}");
            cells_total += a;
        }
    }
    Ok(format!("25 instances through degree {dtot}, {cells_total} cells in all"))
}

fn c11_degenerate() -> Outcome {
    let dtot = 4;
    let mut out = Vec::new();
    for name in ["algebras/trivial_deg1.json", "algebras/free_com_deg2.json"] {
        let f: AlgebraFile = serde_json::from_str(&data(name)).map_err(e)?;
        let x = prepare(&Arc::new(f.build(None, Some(dtot)).map_err(e)?), dtot).map_err(e)?;
        let bar = Bar::new(&x, BarOptions::new(3, dtot).uniform()).map_err(e)?;
        let mut total = 0;
        for n in 0..=3 {
            let parts = bar.degenerate_subobject(n).map_err(|m| format!("{} level {n}: {m}", x.name))?;
            total += parts.iter().map(|p| p.dim).sum::<usize>();
        }
        ensure!(total > 0, "{}: no degenerate part", x.name);
        out.push(format!("{} ({total} degenerate cells)", x.name));
    }
    Ok(out.join(", "))
}

fn c12_kunneth() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 12);
    let mut tested = 0;
    for k in 0..50 {
        let (lc, ld) = (rng.gen_range(0..=2), rng.gen_range(0..=2));
        let c = random_complex(&mut rng, lc);
        let d = random_complex(&mut rng, ld);
        let (hc, hd) = (homology(&c), homology(&d));
        let t = homology(&tensor(&c, &d).map_err(e)?);
        let (Some(m), Some(n)) = (connectivity(&hc), connectivity(&hd)) else {
            ensure!(connectivity(&t).is_none(), "pair {k}: an acyclic factor but a non-acyclic product");
            continue;
        };
        let ct = connectivity(&t).unwrap_or(i32::MAX);
        ensure!(ct >= m + n + 1, "pair {k}: {m}- and {n}-connected, product only {ct}-connected");
        tested += 1;
    }
    Ok(format!("50 pairs, {tested} with both factors non-acyclic"))
}

fn c13_truncation() -> Outcome {
    let mut runs = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for p in [Params::window(0, 5), Params::window(0, 6).with_levels(4)] {
        for x in bundled(p.dtot() + 1) {
            stable_in_levels(p, |q| Ok(homology(&tq(&x, q).map_err(e)?.complex))).map_err(|m| format!("tq {}: {m}", x.name))?;
            stable_in_levels(p, |q| Ok(homology(&Fattened::new(&x, q).map_err(e)?.realize(RightModule::Whole).complex)))
                .map_err(|m| format!("realization {}: {m}", x.name))?;
            for k in 2..=3 {
                stable_in_levels(p, |q| Ok(homology(&derived_circle(RightModule::Truncation(k), &x, q).map_err(e)?.complex)))
                    .map_err(|m| format!("tau_{k} {}: {m}", x.name))?;
            }
            runs += 4;
        }
        for i in 0..5 {
            let o = &operads()[i % 2];
            let v = random_v(&mut rng, 1, 3);
            let x = Arc::new(Algebra::free(o, &v, p.dtot() + 1).map_err(e)?);
            stable_in_levels(p, |q| Ok(homology(&derived_circle(RightModule::Truncation(1), &x, q).map_err(e)?.complex)))?;
            runs += 1;
        }
    }
    Ok(format!("{runs} computations agree at P and P + 1"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("operad axioms", c01_axioms),
        ("bar computes the derived circle product", c02_derived_circle),
        ("fattened tower", c03_fattened),
        ("layer short exactness", c04_layer_ses),
        ("layer formula consistency", c05_layer_routes),
        ("strong convergence", c06_strong_convergence),
        ("spectral sequence", c07_spectral_sequence),
        ("hurewicz", c08_hurewicz),
        ("whitehead", c09_whitehead),
        ("pushout filtration", c10_pushouts),
        ("degenerate subobjects", c11_degenerate),
        ("kunneth connectivity", c12_kunneth),
        ("truncation stability", c13_truncation),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        let t = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(detail) => println!("criterion {:>2} pass  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} failed, {:.1}s", failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
