//! Algebras over degree-0 operads: trivial, free, product-defined and
//! tabulated actions, with axiom checks and algebra maps.

pub mod io;

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use serde::Serialize;

use crate::chain::{ChainComplex, ChainMap};
use crate::exactalg::{Accumulator, CoeffRing, SparseVec};
use crate::forest::{Filter, Forest, ForestError, LayerSpec};
use crate::operad::{Op, Operad, OperadError, Rule};
use crate::symseq::{perm, GeneratorAction};

#[derive(Debug, thiserror::Error)]
pub enum AlgebraError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Operad(#[from] OperadError),
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error(transparent)]
    Chain(#[from] crate::chain::ChainError),
}

#[derive(Clone, Debug)]
pub enum Action {
    /// Only the unit acts.
    Trivial,
    /// `O ∘ V`, the carrier being layer 1 of the forest over `V`.
    Free { forest: Arc<Forest>, layer: usize },
    /// A binary product, associative or graded commutative as the operad requires.
    Product(Arc<HashMap<(u32, u32), SparseVec>>),
    /// Values on `(orbit representative, sorted children)`.
    Table(Arc<HashMap<(Op, Vec<u32>), SparseVec>>),
}

#[derive(Debug)]
pub struct Algebra {
    pub name: String,
    pub operad: Operad,
    pub carrier: ChainComplex,
    pub action: Action,
    cache: RwLock<HashMap<(Op, Vec<u32>), SparseVec>>,
}

impl Clone for Algebra {
    fn clone(&self) -> Self {
        Algebra::with_action(&self.name, &self.operad, self.carrier.clone(), self.action.clone())
    }
}

impl Algebra {
    fn with_action(name: &str, operad: &Operad, carrier: ChainComplex, action: Action) -> Self {
        Algebra { name: name.into(), operad: operad.clone(), carrier, action, cache: RwLock::new(HashMap::new()) }
    }

    pub fn ring(&self) -> CoeffRing {
        self.operad.ring
    }

    /// `V` with only the unit acting; needs `O[1] = I[1]`.
    pub fn trivial(operad: &Operad, v: &ChainComplex) -> Result<Self, AlgebraError> {
        if !operad.is_unitary1() {
            return Err(AlgebraError::Invalid("trivial algebras need O[1] = I[1]".into()));
        }
        check_ring(operad, v)?;
        Ok(Algebra::with_action("trivial", operad, v.clone(), Action::Trivial))
    }

    /// `O ∘ V` through total degree `budget`.
    pub fn free(operad: &Operad, v: &ChainComplex, budget: i32) -> Result<Self, AlgebraError> {
        check_ring(operad, v)?;
        if operad.ring == CoeffRing::Integers && !operad.is_sigma_free() {
            return Err(AlgebraError::Unsupported(format!(
                "free algebras over Z need a Σ-free operad; {} is not",
                operad.name
            )));
        }
        let mut forest = Forest::new(operad, v, &[]);
        let hi = if operad.is_truncated() { operad.cutoff() } else { operad.cutoff().min(budget.max(1) as usize) };
        let layer = forest.add_layer(0, LayerSpec::band(1, hi, budget), &Filter::default())?;
        let (carrier, _) = forest.layer_complex(layer, |_| true);
        Ok(Algebra::with_action("free", operad, carrier, Action::Free { forest: Arc::new(forest), layer }))
    }

    /// A product algebra over the associative or commutative operad (or a
    /// truncation of either); `mul[(i, j)] = x_i · x_j`.
    pub fn product(operad: &Operad, carrier: &ChainComplex, mul: HashMap<(u32, u32), SparseVec>) -> Result<Self, AlgebraError> {
        check_ring(operad, carrier)?;
        match operad.rule() {
            Rule::Assoc | Rule::Comm => {}
            _ => return Err(AlgebraError::Unsupported("product algebras need the associative or commutative operad".into())),
        }
        for ((i, j), v) in &mul {
            let n = carrier.len() as u32;
            if *i >= n || *j >= n || v.max_index().is_some_and(|k| k as u32 >= n) {
                return Err(AlgebraError::Invalid(format!("product entry ({i},{j}) names a missing cell")));
            }
            let d = carrier.degree(*i as usize) + carrier.degree(*j as usize);
            if v.indices().any(|k| carrier.degree(k) != d) {
                return Err(AlgebraError::Invalid(format!("product ({i},{j}) is not of degree 0")));
            }
        }
        Ok(Algebra::with_action("product", operad, carrier.clone(), Action::Product(Arc::new(mul))))
    }

    pub fn table(operad: &Operad, carrier: &ChainComplex, values: HashMap<(Op, Vec<u32>), SparseVec>) -> Result<Self, AlgebraError> {
        check_ring(operad, carrier)?;
        Ok(Algebra::with_action("table", operad, carrier.clone(), Action::Table(Arc::new(values))))
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// The same algebra over another operad through which the action factors,
    /// such as a larger cutoff of the same rule.
    pub fn over(&self, operad: &Operad) -> Result<Self, AlgebraError> {
        match &self.action {
            Action::Free { .. } => {
                let Action::Free { forest, .. } = &self.action else { unreachable!() };
                let budget = self.carrier.max_degree().unwrap_or(0);
                Ok(Algebra::free(operad, &forest.leaves, budget)?.named(&self.name))
            }
            a => Ok(Algebra::with_action(&self.name, operad, self.carrier.clone(), a.clone())),
        }
    }

    pub fn is_free(&self) -> bool {
        matches!(self.action, Action::Free { .. })
    }

    /// Generators of a free algebra and their inclusion as `(1; v)`.
    pub fn generators(&self) -> Option<(ChainComplex, Vec<SparseVec>)> {
        let Action::Free { forest, layer } = &self.action else { return None };
        let inc = (0..forest.leaves.len() as u32)
            .map(|v| forest.normal(*layer, (1, 0), &[v]).map_or_else(SparseVec::new, |(j, s)| SparseVec::single(j as usize, self.ring().sign(s))))
            .collect();
        Some((forest.leaves.clone(), inc))
    }

    pub fn kind(&self) -> &'static str {
        match self.action {
            Action::Trivial => "trivial",
            Action::Free { .. } => "free",
            Action::Product(_) => "product",
            Action::Table(_) => "table",
        }
    }

    /// `op(x_{k_1}, …, x_{k_t})` on carrier cells.
    pub fn act(&self, op: Op, kids: &[u32]) -> SparseVec {
        debug_assert_eq!(op.0, kids.len());
        if self.operad.is_unit(op) {
            return SparseVec::unit(kids[0] as usize);
        }
        if op.0 > self.operad.cutoff() || self.operad.dim(op.0) == 0 {
            return SparseVec::new();
        }
        let key = (op, kids.to_vec());
        if let Some(v) = self.cache.read().unwrap().get(&key) {
            return v.clone();
        }
        let v = self.compute(op, kids);
        self.cache.write().unwrap().insert(key, v.clone());
        v
    }

    fn parity(&self, k: u32) -> bool {
        self.carrier.degree(k as usize).rem_euclid(2) == 1
    }

    fn compute(&self, op: Op, kids: &[u32]) -> SparseVec {
        let ring = self.ring();
        match &self.action {
            Action::Trivial => SparseVec::new(),
            Action::Free { forest, layer } => forest.compose(op, *layer, kids, *layer),
            Action::Product(mul) => {
                let (order, sign) = match self.operad.rule() {
                    Rule::Assoc => {
                        let w = perm::unrank(op.0, op.1 as usize);
                        let order: Vec<u32> = w.iter().map(|&j| kids[j]).collect();
                        (order, koszul(&w, &|j| self.parity(kids[j])))
                    }
                    _ => (kids.to_vec(), 1),
                };
                let mut cur = SparseVec::single(order[0] as usize, ring.sign(sign));
                for &k in &order[1..] {
                    let mut acc = Accumulator::new();
                    for (a, c) in cur.iter() {
                        if let Some(v) = mul.get(&(a as u32, k)) {
                            acc.add_vec(ring, c, v);
                        }
                    }
                    cur = acc.finish();
                    if cur.is_empty() {
                        break;
                    }
                }
                cur
            }
            Action::Table(t) => {
                let mut items: Vec<(u32, bool)> = kids.iter().map(|&k| (k, self.parity(k))).collect();
                match self.operad.canon().canonicalize(&self.operad, op.0, op.1, &mut items) {
                    crate::symseq::Canon::Zero => SparseVec::new(),
                    crate::symseq::Canon::Term(b, s) => {
                        let sorted: Vec<u32> = items.iter().map(|x| x.0).collect();
                        t.get(&((op.0, b), sorted)).map_or_else(SparseVec::new, |v| v.scale(ring, &ring.sign(s)))
                    }
                }
            }
        }
    }

    /// The multilinear extension of [`Algebra::act`].
    pub fn act_vecs(&self, op: Op, args: &[SparseVec]) -> SparseVec {
        let ring = self.ring();
        multilinear(ring, args, |kids, c, acc| acc.add_vec(ring, c, &self.act(op, kids)))
    }
}

fn check_ring(operad: &Operad, v: &ChainComplex) -> Result<(), AlgebraError> {
    if operad.ring != v.ring {
        return Err(AlgebraError::Invalid(format!("operad over {} but carrier over {}", operad.ring, v.ring)));
    }
    Ok(())
}

/// Sign of `x_1 ⊗ ⋯ ⊗ x_t ↦ x_{w_1} ⊗ ⋯ ⊗ x_{w_t}`.
pub fn koszul(w: &[usize], odd: &dyn Fn(usize) -> bool) -> i8 {
    let mut s = 1i8;
    for a in 0..w.len() {
        for b in a + 1..w.len() {
            if w[a] > w[b] && odd(w[a]) && odd(w[b]) {
                s = -s;
            }
        }
    }
    s
}

/// Runs `f(kids, coefficient, acc)` over every choice of one term per argument.
pub fn multilinear(ring: CoeffRing, args: &[SparseVec], mut f: impl FnMut(&[u32], &crate::Scalar, &mut Accumulator)) -> SparseVec {
    let mut acc = Accumulator::new();
    if args.iter().any(|v| v.is_empty()) {
        return acc.finish();
    }
    let mut choice = vec![0usize; args.len()];
    let mut kids = vec![0u32; args.len()];
    loop {
        let mut coef = ring.one();
        for (p, &c) in choice.iter().enumerate() {
            let (k, s) = &args[p].entries()[c];
            kids[p] = *k;
            coef = ring.mul(&coef, s);
        }
        f(&kids, &coef, &mut acc);
        let mut p = args.len();
        loop {
            if p == 0 {
                return acc.finish();
            }
            p -= 1;
            choice[p] += 1;
            if choice[p] < args[p].len() {
                break;
            }
            choice[p] = 0;
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgebraReport {
    pub pass: bool,
    pub checked: u64,
    pub witness: Option<String>,
}

/// Ordered tuples of cells with total degree at most `max_degree`.
fn tuples(c: &ChainComplex, t: usize, max_degree: i32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(c: &ChainComplex, t: usize, left: i32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == t {
            out.push(cur.clone());
            return;
        }
        for k in 0..c.len() as u32 {
            let d = c.degree(k as usize);
            if d <= left || d <= 0 {
                cur.push(k);
                rec(c, t, left - d.max(0), cur, out);
                cur.pop();
            }
        }
    }
    rec(c, t, max_degree, &mut cur, &mut out);
    out
}

/// Unit, Leibniz, equivariance and associativity on cell tuples of arity at
/// most `max_arity` and total degree at most `max_degree`.
pub fn check_algebra_axioms(a: &Algebra, max_arity: usize, max_degree: i32) -> AlgebraReport {
    let mut checked = 0u64;
    let res = run_checks(a, max_arity.min(a.operad.cutoff()), max_degree, &mut checked);
    AlgebraReport { pass: res.is_ok(), checked, witness: res.err() }
}

fn run_checks(a: &Algebra, max_arity: usize, max_degree: i32, checked: &mut u64) -> Result<(), String> {
    let ring = a.ring();
    let o = &a.operad;
    let c = &a.carrier;
    c.validate().map_err(|e| format!("carrier: {e}"))?;
    let lab = |ks: &[u32]| ks.iter().map(|&k| c.label(k as usize).to_string()).collect::<Vec<_>>().join(",");
    for t in 1..=max_arity {
        let tups = tuples(c, t, max_degree);
        for ks in &tups {
            for x in 0..o.dim(t) as u32 {
                let op = (t, x);
                let val = a.act(op, ks);
                let deg: i32 = ks.iter().map(|&k| c.degree(k as usize)).sum();
                *checked += 1;
                if val.indices().any(|j| c.degree(j) != deg) {
                    return Err(format!("{}({}) changes degree", o.label(op), lab(ks)));
                }
                // Leibniz.
                let lhs = c.apply_diff(&val);
                let mut rhs = Accumulator::new();
                let mut pre = 0;
                for p in 0..t {
                    let sg = ring.sign(if pre % 2 == 0 { 1 } else { -1 });
                    for (k2, cf) in c.diff(ks[p] as usize).iter() {
                        let mut ks2 = ks.clone();
                        ks2[p] = k2 as u32;
                        rhs.add_vec(ring, &ring.mul(&sg, cf), &a.act(op, &ks2));
                    }
                    pre += c.degree(ks[p] as usize);
                }
                *checked += 1;
                if lhs != rhs.finish() {
                    return Err(format!("the differential is not a derivation for {}({})", o.label(op), lab(ks)));
                }
                // Equivariance: (x; …, y_i, y_{i+1}, …) = ε (x·s_i; …, y_{i+1}, y_i, …).
                for g in 0..t.saturating_sub(1) {
                    let (x2, s) = o.act(t, g, x);
                    let mut ks2 = ks.clone();
                    ks2.swap(g, g + 1);
                    let eps = if a.parity(ks[g]) && a.parity(ks[g + 1]) { -s } else { s };
                    let rhs = a.act((t, x2), &ks2).scale(ring, &ring.sign(eps));
                    *checked += 1;
                    if val != rhs {
                        return Err(format!("the action is not equivariant: {}({}) under s_{}", o.label(op), lab(ks), g + 1));
                    }
                }
                // Associativity over every split of the tuple.
                for m in 2..=t {
                    for x in 0..o.dim(m) as u32 {
                        let mut cuts = Vec::new();
                        assoc_splits(a, (m, x), ks, 0, &mut cuts, checked)?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn assoc_splits(a: &Algebra, x: Op, ks: &[u32], from: usize, ys: &mut Vec<(Op, std::ops::Range<usize>)>, checked: &mut u64) -> Result<(), String> {
    let o = &a.operad;
    let ring = a.ring();
    let m = x.0;
    if ys.len() == m {
        if from != ks.len() {
            return Ok(());
        }
        let ops: Vec<Op> = ys.iter().map(|y| y.0).collect();
        let lhs = {
            let g = o.gamma(x, &ops);
            let mut acc = Accumulator::new();
            for (z, cf) in g.iter() {
                acc.add_vec(ring, cf, &a.act((ks.len(), z as u32), ks));
            }
            acc.finish()
        };
        let inner: Vec<SparseVec> = ys.iter().map(|(y, r)| a.act(*y, &ks[r.clone()])).collect();
        let rhs = a.act_vecs(x, &inner);
        *checked += 1;
        if lhs != rhs {
            let names: Vec<String> = ops.iter().map(|&y| o.label(y).to_string()).collect();
            return Err(format!("the action is not associative at {}∘({}) on {:?}", o.label(x), names.join(","), ks));
        }
        return Ok(());
    }
    let left = m - ys.len() - 1;
    for n in 1..=ks.len() - from - left {
        if ys.len() + 1 == m && from + n != ks.len() {
            continue;
        }
        for y in 0..o.dim(n) as u32 {
            ys.push(((n, y), from..from + n));
            assoc_splits(a, x, ks, from + n, ys, checked)?;
            ys.pop();
        }
    }
    Ok(())
}

/// A map of algebras over the same operad, given on carrier cells.
#[derive(Clone, Debug)]
pub struct AlgebraMap {
    pub source: Arc<Algebra>,
    pub target: Arc<Algebra>,
    pub images: Vec<SparseVec>,
}

impl AlgebraMap {
    pub fn new(source: Arc<Algebra>, target: Arc<Algebra>, images: Vec<SparseVec>) -> Self {
        AlgebraMap { source, target, images }
    }

    pub fn identity(a: Arc<Algebra>) -> Self {
        let images = (0..a.carrier.len()).map(SparseVec::unit).collect();
        AlgebraMap { source: a.clone(), target: a, images }
    }

    /// The map `O ∘ V → A` extending `images` on generators.
    pub fn from_generators(source: Arc<Algebra>, target: Arc<Algebra>, gen_images: &[SparseVec]) -> Result<Self, AlgebraError> {
        let Action::Free { forest, layer } = &source.action else {
            return Err(AlgebraError::Invalid("maps out of an algebra given on generators need a free source".into()));
        };
        let images = (0..forest.layer(*layer).len() as u32)
            .map(|i| {
                let n = forest.node(*layer, i);
                let args: Vec<SparseVec> = n.kids.iter().map(|&k| gen_images[k as usize].clone()).collect();
                target.act_vecs(n.op, &args)
            })
            .collect();
        Ok(AlgebraMap { source, target, images })
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let ring = self.source.ring();
        let mut acc = Accumulator::new();
        for (i, c) in v.iter() {
            acc.add_vec(ring, c, &self.images[i]);
        }
        acc.finish()
    }

    pub fn chain_map(&self) -> ChainMap {
        ChainMap::new(Arc::new(self.source.carrier.clone()), Arc::new(self.target.carrier.clone()), self.images.clone())
            .expect("algebra maps preserve degree")
    }

    /// Chain map and action compatibility on tuples within the bounds.
    pub fn check(&self, max_arity: usize, max_degree: i32) -> Result<(), String> {
        self.chain_map().validate().map_err(|e| e.to_string())?;
        let a = &self.source;
        let o = &a.operad;
        for t in 2..=max_arity.min(o.cutoff()) {
            for ks in tuples(&a.carrier, t, max_degree) {
                for x in 0..o.dim(t) as u32 {
                    let lhs = self.apply(&a.act((t, x), &ks));
                    let args: Vec<SparseVec> = ks.iter().map(|&k| self.images[k as usize].clone()).collect();
                    let rhs = self.target.act_vecs((t, x), &args);
                    if lhs != rhs {
                        return Err(format!("the map does not commute with {} on {:?}", o.label((t, x)), ks));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::ChainBuilder;

    const Q: CoeffRing = CoeffRing::Rationals;

    fn deg1() -> ChainComplex {
        ChainComplex::sphere(Q, 1)
    }

    #[test]
    fn free_as_on_odd_generator() {
        let a = Algebra::free(&Operad::assoc(Q, 3), &deg1(), 3).unwrap();
        assert_eq!(a.carrier.dims().into_values().collect::<Vec<_>>(), vec![1, 1, 1]);
        let r = check_algebra_axioms(&a, 3, 3);
        assert!(r.pass, "{:?}", r.witness);
    }

    #[test]
    fn trivial_and_free_pass() {
        let o = Operad::comm(Q, 4).unwrap();
        let mut b = ChainBuilder::new(Q);
        b.add_cell("x", 1);
        b.add_cell("y", 2);
        let v = b.build().unwrap();
        for a in [Algebra::trivial(&o, &v).unwrap(), Algebra::free(&o, &v, 4).unwrap()] {
            let r = check_algebra_axioms(&a, 4, 4);
            assert!(r.pass, "{}: {:?}", a.kind(), r.witness);
        }
    }

    #[test]
    fn dual_numbers_product() {
        // 𝒦[e]/(e³) without unit: e in degree 2, e² in degree 4.
        let mut b = ChainBuilder::new(Q);
        let e = b.add_cell("e", 2) as u32;
        let e2 = b.add_cell("e2", 4) as u32;
        let c = b.build().unwrap();
        let mul = HashMap::from([((e, e), SparseVec::unit(e2 as usize))]);
        for o in [Operad::assoc(Q, 3), Operad::comm(Q, 3).unwrap()] {
            let a = Algebra::product(&o, &c, mul.clone()).unwrap();
            let r = check_algebra_axioms(&a, 3, 8);
            assert!(r.pass, "{:?}", r.witness);
        }
        // Products must preserve degree.
        let bad = HashMap::from([((e, e), SparseVec::unit(e2 as usize)), ((e, e2), SparseVec::unit(e as usize))]);
        assert!(Algebra::product(&Operad::assoc(Q, 3), &c, bad).is_err());
    }

    #[test]
    fn odd_commutative_square_fails_leibniz_free_check() {
        // x·x for odd x in a commutative algebra must vanish.
        let c = deg1();
        let mut b = ChainBuilder::new(Q);
        b.add_cell("x", 1);
        b.add_cell("xx", 2);
        let c2 = b.build().unwrap();
        let mul = HashMap::from([((0, 0), SparseVec::unit(1))]);
        let a = Algebra::product(&Operad::comm(Q, 2).unwrap(), &c2, mul).unwrap();
        let r = check_algebra_axioms(&a, 2, 2);
        assert!(!r.pass);
        assert!(c.len() == 1);
    }

    #[test]
    fn maps_from_generators() {
        let o = Operad::assoc(Q, 3);
        let f = Arc::new(Algebra::free(&o, &deg1(), 3).unwrap());
        let t = Arc::new(Algebra::trivial(&o, &deg1()).unwrap());
        let m = AlgebraMap::from_generators(f.clone(), t, &[SparseVec::unit(0)]).unwrap();
        m.check(3, 3).unwrap();
        assert_eq!(m.images.iter().filter(|v| !v.is_empty()).count(), 1);
    }
}
