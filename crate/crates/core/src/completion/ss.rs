//! The spectral sequence of the completion tower, from the exact couple of
//! the long exact sequences of `layer k ↪ stage k ↠ stage k − 1`.
//!
//! Indexing: `E^r_{−s,t}` sits in column `s` (layer `s + 1`) and total degree
//! `n = t − s`; `d^r: E^r_{−s,t} → E^r_{−s−r,t+r−1}`. Beyond `kmax` the tower is
//! continued by identities, so layers there vanish and the sequence is the
//! one of the finite tower.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::{CompletionError, CompletionTower};
use crate::exactalg::{LinearMap, Reducer, Span, SparseVec, Subquotient};

/// One nonzero entry of a page.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Entry {
    pub s: usize,
    pub t: i32,
    pub rank: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Differential {
    /// Source entry.
    pub s: usize,
    pub t: i32,
    pub rank: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Page {
    pub r: usize,
    pub entries: Vec<Entry>,
    /// Nonzero differentials leaving this page.
    pub differentials: Vec<Differential>,
}

impl Page {
    pub fn rank(&self, s: usize, t: i32) -> usize {
        self.entries.iter().find(|e| e.s == s && e.t == t).map_or(0, |e| e.rank)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Stabilization {
    pub s: usize,
    pub t: i32,
    /// First page from which the entry no longer changes.
    pub r: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiltrationCheck {
    pub degree: i32,
    /// `Σ_s dim E^∞_{−s,s+n}`.
    pub e_infinity: usize,
    /// `dim H_n(X^{h∧})`.
    pub completion: usize,
    /// The degree is stable in the tower, so the limit is attained.
    pub stable: bool,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceCertificate {
    pub stabilization: Vec<Stabilization>,
    /// Per total degree, the largest `s` with `E^∞_{−s,s+n} ≠ 0`.
    pub vanishing: BTreeMap<i32, Option<usize>>,
    pub filtration: Vec<FiltrationCheck>,
    /// `d^r ∘ d^r = 0` on every page.
    pub d_squared_zero: bool,
    /// `E^{r+1}` agrees with the homology of `(E^r, d^r)` everywhere.
    pub pages_consistent: bool,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralSequence {
    pub pages: Vec<Page>,
    pub infinity: Page,
    pub certificate: ConvergenceCertificate,
    /// Highest certified total degree.
    pub through: i32,
    pub kmax: usize,
}

/// Subspaces of one column-degree slot across pages.
struct Slot {
    layer_dim: usize,
    z: Vec<Span>,
    b: Vec<Span>,
    e: Vec<Subquotient>,
}

struct Couple<'a> {
    t: &'a CompletionTower,
    /// `i[k][n]`, `j[k][n]`, `d[k][n]` with `k` the layer or upper stage.
    i: BTreeMap<(usize, i32), LinearMap>,
    j: BTreeMap<(usize, i32), LinearMap>,
    d: BTreeMap<(usize, i32), LinearMap>,
}

impl Couple<'_> {
    fn stage_dim(&self, k: usize, n: i32) -> usize {
        if k == 0 {
            0
        } else {
            self.t.stage_homology(k.min(self.t.kmax)).dim(n)
        }
    }

    /// `H_n(A_a) → H_n(A_b)`, `a ≥ b ≥ 1`, with `A_m = A_kmax` above the top.
    fn composite(&self, a: usize, b: usize, n: i32) -> LinearMap {
        let ring = self.t.ring();
        let a = a.min(self.t.kmax);
        let mut m = LinearMap::identity(ring, self.stage_dim(a, n));
        for k in ((b + 1)..=a).rev() {
            m = self.j[&(k, n)].compose(&m);
        }
        m
    }

    /// Kernel of `H_n(A_a) → H_n(A_b)`; `b = 0` gives everything.
    fn kernel_to(&self, a: usize, b: usize, n: i32) -> Span {
        let ring = self.t.ring();
        if b == 0 {
            Span::full(ring, self.stage_dim(a, n))
        } else {
            self.composite(a, b, n).kernel()
        }
    }

    fn z(&self, k: usize, n: i32, r: usize) -> Span {
        let top = k + r - 1;
        if r == 1 || k >= self.t.kmax {
            return Span::full(self.t.ring(), self.t.layer_homology(k).dim(n));
        }
        let im = self.composite(top, k, n).image();
        self.i[&(k, n)].preimage(&im)
    }

    fn b(&self, k: usize, n: i32, r: usize) -> Span {
        let ring = self.t.ring();
        let dim = self.t.layer_homology(k).dim(n);
        if k == 1 || r == 1 {
            return Span::zero(ring, dim);
        }
        let low = k.saturating_sub(r);
        let ker = self.kernel_to(k - 1, low, n + 1);
        ker.image(&self.d[&(k, n + 1)])
    }
}

fn coords_matrix(target: &Subquotient, vecs: &[SparseVec]) -> Option<LinearMap> {
    let cols = vecs.iter().map(|v| target.coords(v)).collect::<Option<Vec<_>>>()?;
    Some(LinearMap::new(target.ring, vecs.len(), target.dim(), cols))
}

impl CompletionTower {
    /// Pages `1..=rmax` (at most up to the one where every entry is final),
    /// `E^∞` and the convergence certificate, for total degrees up to one
    /// below the soundness bound.
    pub fn spectral_sequence(&self, rmax: usize) -> Result<SpectralSequence, CompletionError> {
        self.require_field()?;
        let q = self.stage_homology(1);
        if let Some(n) = q.report.nonzero_degrees().into_iter().find(|&n| n <= 0) {
            return Err(CompletionError::Hypothesis(format!(
                "the completion spectral sequence needs Q(X) 0-connected, but H_{n}(Q(X)) ≠ 0"
            )));
        }
        let kmax = self.kmax;
        let through = self.soundness() - 1;
        let degrees: Vec<i32> = (0..=through).collect();
        let mut c = Couple { t: self, i: BTreeMap::new(), j: BTreeMap::new(), d: BTreeMap::new() };
        for k in 1..=kmax {
            for n in 0..=through + 1 {
                c.i.insert((k, n), self.inclusion_map(k, n));
                if k >= 2 {
                    c.j.insert((k, n), self.stage_map(k, n));
                    c.d.insert((k, n), self.connecting_map(k, n));
                }
            }
        }
        let r_final = kmax.max(1);
        let r_last = rmax.clamp(1, r_final);
        let mut slots: BTreeMap<(usize, i32), Slot> = BTreeMap::new();
        for k in 1..=kmax {
            for &n in &degrees {
                let layer_dim = self.layer_homology(k).dim(n);
                let mut slot = Slot { layer_dim, z: vec![], b: vec![], e: vec![] };
                for r in 1..=r_final {
                    let z = c.z(k, n, r);
                    let b = c.b(k, n, r);
                    if !z.contains_span(&b) {
                        return Err(CompletionError::Internal(format!("B^{r} ⊄ Z^{r} at layer {k}, degree {n}")));
                    }
                    slot.e.push(Subquotient::new(&z, &b));
                    slot.z.push(z);
                    slot.b.push(b);
                }
                slots.insert((k, n), slot);
            }
        }
        // Differentials d^r: (k, n) → (k + r, n − 1), recorded on pages.
        let mut pages = Vec::new();
        let mut d_squared_zero = true;
        let mut pages_consistent = true;
        for r in 1..=r_final {
            let mut diffs: BTreeMap<(usize, i32), LinearMap> = BTreeMap::new();
            for k in 1..=kmax {
                for &n in &degrees {
                    let src = &slots[&(k, n)].e[r - 1];
                    let tk = k + r;
                    if tk > kmax || n < 1 || src.dim() == 0 {
                        continue;
                    }
                    let tgt = &slots[&(tk, n - 1)].e[r - 1];
                    let lift = LiftSolver::new(&c.composite(tk - 1, k, n));
                    let mut imgs = Vec::new();
                    for x in &src.reps {
                        let v = c.i[&(k, n)].apply(x);
                        let y = lift.solve(&v).ok_or_else(|| CompletionError::Internal(format!("Z^{r} element at layer {k}, degree {n} does not lift")))?;
                        imgs.push(c.d[&(tk, n)].apply(&y));
                    }
                    let m = coords_matrix(tgt, &imgs)
                        .ok_or_else(|| CompletionError::Internal(format!("d^{r} from layer {k}, degree {n} leaves Z^{r}")))?;
                    diffs.insert((k, n), m);
                }
            }
            for (&(k, n), m) in &diffs {
                if let Some(next) = diffs.get(&(k + r, n - 1)) {
                    if next.compose(m).rank() != 0 {
                        d_squared_zero = false;
                    }
                }
            }
            if r < r_final {
                // Incoming differentials at the top degree start outside the slots.
                for (&(k, n), slot) in slots.iter().filter(|((_, n), _)| *n < through) {
                    let dim = slot.e[r - 1].dim();
                    let out = diffs.get(&(k, n)).map_or(0, |m| m.rank());
                    let inc = if k > r { diffs.get(&(k - r, n + 1)).map_or(0, |m| m.rank()) } else { 0 };
                    if slot.e[r].dim() + out + inc != dim {
                        pages_consistent = false;
                    }
                }
            }
            if r <= r_last {
                let entries = page_entries(&slots, r - 1);
                let differentials = diffs
                    .iter()
                    .filter(|(_, m)| m.rank() > 0)
                    .map(|(&(k, n), m)| Differential { s: k - 1, t: n + (k as i32 - 1), rank: m.rank() })
                    .collect();
                pages.push(Page { r, entries, differentials });
            }
        }
        let infinity = Page { r: usize::MAX, entries: page_entries(&slots, r_final - 1), differentials: vec![] };
        let mut stabilization = Vec::new();
        for (&(k, n), slot) in &slots {
            if slot.layer_dim == 0 {
                continue;
            }
            let last = r_final - 1;
            let mut r = last;
            while r > 0 && slot.z[r - 1].dim() == slot.z[last].dim() && slot.b[r - 1].dim() == slot.b[last].dim() {
                r -= 1;
            }
            stabilization.push(Stabilization { s: k - 1, t: n + k as i32 - 1, r: r + 1 });
        }
        let mut vanishing = BTreeMap::new();
        for &n in &degrees {
            let top = (1..=kmax).rev().find(|&k| slots[&(k, n)].e[r_final - 1].dim() > 0).map(|k| k - 1);
            vanishing.insert(n, top);
        }
        let lim = self.completion()?;
        let mut filtration = Vec::new();
        for &n in &degrees {
            let e: usize = (1..=kmax).map(|k| slots[&(k, n)].e[r_final - 1].dim()).sum();
            let d = lim.degrees.iter().find(|d| d.degree == n);
            let completion = d.map_or(0, |d| d.rank);
            let stable = d.is_some_and(|d| !d.inconclusive);
            filtration.push(FiltrationCheck { degree: n, e_infinity: e, completion, stable, ok: stable && e == completion });
        }
        let holds = d_squared_zero && pages_consistent && filtration.iter().all(|f| f.ok);
        Ok(SpectralSequence {
            pages,
            infinity,
            certificate: ConvergenceCertificate { stabilization, vanishing, filtration, d_squared_zero, pages_consistent, holds },
            through,
            kmax,
        })
    }
}

fn page_entries(slots: &BTreeMap<(usize, i32), Slot>, idx: usize) -> Vec<Entry> {
    let mut v: Vec<Entry> = slots
        .iter()
        .filter(|(_, s)| s.e[idx].dim() > 0)
        .map(|(&(k, n), s)| Entry { s: k - 1, t: n + k as i32 - 1, rank: s.e[idx].dim() })
        .collect();
    v.sort_by_key(|e| (e.s, e.t));
    v
}

/// Preimages under a fixed linear map.
struct LiftSolver {
    red: Reducer,
}

impl LiftSolver {
    fn new(m: &LinearMap) -> Self {
        let mut red = Reducer::tracking(m.ring);
        for c in &m.columns {
            red.insert(c);
        }
        LiftSolver { red }
    }

    fn solve(&self, v: &SparseVec) -> Option<SparseVec> {
        self.red.solve(v)
    }
}

impl SpectralSequence {
    /// `E¹ = E^∞`: every differential vanishes.
    pub fn degenerates_at_e1(&self) -> bool {
        self.pages.iter().all(|p| p.differentials.is_empty()) && self.pages.first().is_some_and(|p| p.entries == self.infinity.entries)
    }

    /// CSV with header `r,s,t,rank,torsion`; `r = inf` rows give `E^∞`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,s,t,rank,torsion\n");
        for p in &self.pages {
            for e in &p.entries {
                let _ = writeln!(out, "{},{},{},{},", p.r, e.s, e.t, e.rank);
            }
        }
        for e in &self.infinity.entries {
            let _ = writeln!(out, "inf,{},{},{},", e.s, e.t, e.rank);
        }
        out
    }

    pub fn report(&self) -> String {
        let c = &self.certificate;
        let mut out = String::new();
        let _ = writeln!(out, "total degrees 0..={} from {} stages", self.through, self.kmax);
        let _ = writeln!(out, "deg  E^inf  H(X^)  max s  ok");
        for f in &c.filtration {
            let v = c.vanishing.get(&f.degree).copied().flatten().map_or("-".to_string(), |s| s.to_string());
            let _ = writeln!(out, "{:>3}  {:>5}  {:>5}  {:>5}  {}", f.degree, f.e_infinity, f.completion, v, if f.ok { "yes" } else { "no" });
        }
        let rmax = c.stabilization.iter().map(|s| s.r).max().unwrap_or(1);
        let _ = writeln!(out, "every entry final by page {rmax}");
        let _ = writeln!(out, "d∘d = 0: {}; pages agree with homology: {}", c.d_squared_zero, c.pages_consistent);
        let _ = writeln!(out, "converges strongly: {}", if c.holds { "yes" } else { "no" });
        out
    }
}
