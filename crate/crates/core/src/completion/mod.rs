//! The completion tower `X → {τ_k O ∘^h_O X}_k`, its limit, its layers and
//! the spectral sequence of the tower, plus verdicts for the connectivity
//! theorems.

pub mod ss;
pub mod verify;

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::algebra::Algebra;
use crate::bar::derived::{layer_from_tq, Fattened, Params, RightModule};
use crate::bar::{BarError, Realized};
use crate::chain::{homology, AbGroup, ChainComplex, ChainMap, GradedTower, Homology};
use crate::exactalg::{LinearMap, SparseMatrix, SparseVec};

pub use ss::{ConvergenceCertificate, Page, SpectralSequence};
pub use verify::{Status, Verdict, Witness};

#[derive(Debug, thiserror::Error)]
pub enum CompletionError {
    #[error(transparent)]
    Bar(#[from] BarError),
    #[error(transparent)]
    Chain(#[from] crate::chain::ChainError),
    #[error("{0}")]
    Field(String),
    #[error("{0}")]
    Hypothesis(String),
    #[error("{0}")]
    Invalid(String),
    #[error("internal: {0}")]
    Internal(String),
}

struct Homologies {
    carrier: Homology,
    stages: Vec<Homology>,
    layers: Vec<Homology>,
}

/// Stages `1..=kmax` of the fattened tower with their layers.
pub struct CompletionTower {
    pub fattened: Fattened,
    pub kmax: usize,
    /// `stages[k − 1] = |Bar(τ_k O, O, X)|`.
    pub stages: Vec<Realized>,
    /// `layers[k − 1] = |Bar(i_k O, O, X)|`; the first is the first stage.
    pub layers: Vec<Realized>,
    pub carrier: Arc<ChainComplex>,
    hom: OnceLock<Homologies>,
}

impl CompletionTower {
    pub fn build(x: &Arc<Algebra>, kmax: usize, params: Params) -> Result<Self, CompletionError> {
        if kmax == 0 {
            return Err(CompletionError::Invalid("the tower needs at least one stage".into()));
        }
        let fattened = Fattened::new(x, params)?;
        let (stages, layers) = std::thread::scope(|s| {
            let f = &fattened;
            let st = s.spawn(move || (1..=kmax).map(|k| f.stage(k)).collect::<Vec<_>>());
            let ly: Vec<Realized> = (1..=kmax).map(|k| f.layer(k)).collect();
            (st.join().expect("stage worker"), ly)
        });
        let carrier = Arc::new(fattened.carrier());
        let t = CompletionTower { fattened, kmax, stages, layers, carrier, hom: OnceLock::new() };
        t.check_structure()?;
        Ok(t)
    }

    pub fn ring(&self) -> crate::CoeffRing {
        self.carrier.ring
    }

    pub fn params(&self) -> Params {
        self.fattened.params
    }

    /// Degrees through which stage homology is certified.
    pub fn soundness(&self) -> i32 {
        self.params().soundness()
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        self.fattened.algebra()
    }

    pub fn stage(&self, k: usize) -> &Realized {
        &self.stages[k - 1]
    }

    pub fn layer(&self, k: usize) -> &Realized {
        &self.layers[k - 1]
    }

    /// Tower maps are surjective and compatible with the coaugmentations.
    fn check_structure(&self) -> Result<(), CompletionError> {
        let ring = self.ring();
        for k in 2..=self.kmax {
            let (a, b) = (self.stage(k), self.stage(k - 1));
            if let Some(c) = b.cells.iter().find(|c| !a.index.contains_key(c)) {
                return Err(CompletionError::Internal(format!("stage {} → {} misses cell {:?}", k, k - 1, c)));
            }
            let ca = self.fattened.coaugmentation(a);
            let cb = self.fattened.coaugmentation(b);
            let p = a.map_to(b);
            for (x, (u, v)) in ca.iter().zip(&cb).enumerate() {
                let mut acc = crate::exactalg::Accumulator::new();
                for (i, c) in u.iter() {
                    acc.add_vec(ring, c, &p[i]);
                }
                if acc.finish() != *v {
                    return Err(CompletionError::Internal(format!("coaugmentation of carrier cell {x} does not commute with stage {k} → {}", k - 1)));
                }
            }
        }
        Ok(())
    }

    pub fn projection(&self, k: usize) -> ChainMap {
        self.fattened.projection(self.stage(k), self.stage(k - 1))
    }

    pub fn inclusion(&self, k: usize) -> ChainMap {
        self.fattened.projection(self.layer(k), self.stage(k))
    }

    pub fn coaugmentation(&self, k: usize) -> ChainMap {
        self.fattened.coaugmentation_map(self.stage(k))
    }

    fn require_field(&self) -> Result<(), CompletionError> {
        if self.ring().is_field() {
            Ok(())
        } else {
            Err(CompletionError::Field(format!("maps on homology need a field, not {}", self.ring())))
        }
    }

    fn homologies(&self) -> &Homologies {
        self.hom.get_or_init(|| {
            std::thread::scope(|s| {
                let st = s.spawn(|| self.stages.iter().map(|r| Homology::compute(&r.complex, true)).collect::<Vec<_>>());
                let carrier = Homology::compute(&self.carrier, true);
                let mut layers = vec![];
                for (k, r) in self.layers.iter().enumerate() {
                    if k == 0 {
                        layers.push(None);
                    } else {
                        layers.push(Some(Homology::compute(&r.complex, true)));
                    }
                }
                let stages = st.join().expect("homology worker");
                let layers = layers.into_iter().enumerate().map(|(k, h)| h.unwrap_or_else(|| stages[k].clone())).collect();
                Homologies { carrier, stages, layers }
            })
        })
    }

    pub fn carrier_homology(&self) -> &Homology {
        &self.homologies().carrier
    }

    pub fn stage_homology(&self, k: usize) -> &Homology {
        &self.homologies().stages[k - 1]
    }

    pub fn layer_homology(&self, k: usize) -> &Homology {
        &self.homologies().layers[k - 1]
    }

    /// `H_n(stage k) → H_n(stage k − 1)`.
    pub fn stage_map(&self, k: usize, n: i32) -> LinearMap {
        let h = self.homologies();
        let p = self.stage(k).map_to(self.stage(k - 1));
        crate::chain::induced_map(&h.stages[k - 1], &h.stages[k - 2], n, |v| apply(self.ring(), &p, v))
    }

    /// `H_n(stage a) → H_n(stage b)` for `a ≥ b`, as a composite.
    pub fn stage_composite(&self, a: usize, b: usize, n: i32) -> LinearMap {
        let mut m = LinearMap::identity(self.ring(), self.stage_homology(a).dim(n));
        for k in ((b + 1)..=a).rev() {
            m = self.stage_map(k, n).compose(&m);
        }
        m
    }

    /// `H_n(layer k) → H_n(stage k)`.
    pub fn inclusion_map(&self, k: usize, n: i32) -> LinearMap {
        let h = self.homologies();
        let p = self.layer(k).map_to(self.stage(k));
        crate::chain::induced_map(&h.layers[k - 1], &h.stages[k - 1], n, |v| apply(self.ring(), &p, v))
    }

    /// The connecting map `H_n(stage k − 1) → H_{n−1}(layer k)`.
    pub fn connecting_map(&self, k: usize, n: i32) -> LinearMap {
        let h = self.homologies();
        let ring = self.ring();
        let (lo, hi, lay) = (self.stage(k - 1), self.stage(k), self.layer(k));
        let up: Vec<SparseVec> = lo.map_to(hi);
        let cols = h.stages[k - 2]
            .representatives(n)
            .iter()
            .map(|z| {
                let lifted = apply(ring, &up, z);
                let d = hi.complex.apply_diff(&lifted);
                let back = d.remap(ring, |i| lay.index.get(&hi.cells[i]).map(|&j| j as usize));
                debug_assert_eq!(back.len(), d.len(), "boundary of a lift leaves the layer");
                h.layers[k - 1].classify(&back)
            })
            .collect();
        LinearMap::new(ring, h.stages[k - 2].dim(n), h.layers[k - 1].dim(n - 1), cols)
    }

    /// `H_n(X) → H_n(stage k)`; for `k = 1` this is the Hurewicz map.
    pub fn coaugmentation_map(&self, k: usize, n: i32) -> LinearMap {
        let h = self.homologies();
        let c = self.fattened.coaugmentation(self.stage(k));
        let index: Vec<usize> = (0..self.algebra().carrier.len()).filter(|&i| self.algebra().carrier.degree(i) <= self.params().dtot()).collect();
        crate::chain::induced_map(&h.carrier, &h.stages[k - 1], n, |v| {
            let mut acc = crate::exactalg::Accumulator::new();
            for (i, s) in v.iter() {
                acc.add_vec(self.ring(), s, &c[index[i]]);
            }
            acc.finish()
        })
    }

    pub fn hurewicz_map(&self, n: i32) -> LinearMap {
        self.coaugmentation_map(1, n)
    }

    /// The tower `H_*(stage 1) ← H_*(stage 2) ← ⋯` over the certified degrees.
    pub fn homology_tower(&self) -> Result<GradedTower, CompletionError> {
        self.require_field()?;
        let ring = self.ring();
        let (lo, hi) = (self.params().window.0.min(0), self.soundness());
        let mut t = GradedTower::new(ring);
        for k in 1..=self.kmax {
            t.stages.push((lo..=hi).map(|n| (n, self.stage_homology(k).dim(n))).collect());
            if k > 1 {
                t.maps.push((lo..=hi).map(|n| (n, matrix(&self.stage_map(k, n)))).collect());
            }
        }
        Ok(t)
    }

    /// `H_*(X^{h∧}) = lim_k H_*(stage k)` with `lim¹` and stabilization.
    pub fn completion(&self) -> Result<CompletionReport, CompletionError> {
        let t = self.homology_tower()?;
        let lims = t.lim_and_lim1();
        let mut degrees = Vec::new();
        for (&n, g) in &lims.lim {
            let stable = lims.stable_from.get(&n).copied().flatten().map(|s| s + 1);
            let x = self.carrier_homology().dim(n);
            let f = self.coaugmentation_map(self.kmax, n);
            degrees.push(DegreeLimit {
                degree: n,
                rank: g.rank,
                lim1: lims.lim1.get(&n).cloned().unwrap_or_default(),
                stable_from: stable,
                inconclusive: lims.inconclusive.contains(&n),
                carrier_rank: x,
                coaugmentation_iso: f.source_dim == f.target_dim && f.rank() == f.source_dim,
            });
        }
        Ok(CompletionReport { kmax: self.kmax, soundness: self.soundness(), mittag_leffler: lims.mittag_leffler, degrees })
    }

    /// `|Bar(i_k O, O, X)| ↪ stage k ↠ stage k − 1`, checked per degree.
    pub fn short_exact(&self, k: usize) -> Result<SesReport, CompletionError> {
        if k < 2 || k > self.kmax {
            return Err(CompletionError::Invalid("layer sequences need 2 ≤ k ≤ kmax".into()));
        }
        let inc = self.inclusion(k);
        let proj = self.projection(k);
        Ok(ses_report(&format!("layer {k}"), &inc, &proj))
    }

    /// `|Bar(O^{>k}, O, X)| ↪ |Bar(O, O, X)| ↠ stage k`.
    pub fn coaugmented_short_exact(&self, k: usize) -> Result<SesReport, CompletionError> {
        let whole = self.fattened.realize(RightModule::Whole);
        let above = self.fattened.realize(RightModule::Above(k));
        let stage = self.fattened.stage(k);
        let inc = self.fattened.projection(&above, &whole);
        let proj = self.fattened.projection(&whole, &stage);
        Ok(ses_report(&format!("above {k}"), &inc, &proj))
    }

    /// Exactness of `⋯ → H_n(layer k) → H_n(stage k) → H_n(stage k−1) → H_{n−1}(layer k) → ⋯`
    /// through the certified degrees.
    pub fn long_exact(&self, k: usize) -> Result<LesReport, CompletionError> {
        self.require_field()?;
        let hi = self.soundness();
        let mut nodes = Vec::new();
        for n in (1..=hi).rev() {
            let i = self.inclusion_map(k, n);
            let j = self.stage_map(k, n);
            let d = self.connecting_map(k, n);
            let d_next = if n < hi { Some(self.connecting_map(k, n + 1)) } else { None };
            let i_prev = self.inclusion_map(k, n - 1);
            // At H_n(layer k): ker i = im ∂_{n+1}, only when ∂_{n+1} is sound.
            if let Some(dn) = &d_next {
                nodes.push(node("layer", n, i.source_dim, dn.rank(), i.rank(), is_zero(&i.compose(dn))));
            }
            nodes.push(node("stage", n, j.source_dim, i.rank(), j.rank(), is_zero(&j.compose(&i))));
            nodes.push(node("quotient", n, d.source_dim, j.rank(), d.rank(), is_zero(&d.compose(&j))));
            nodes.push(node("layer", n - 1, i_prev.source_dim, d.rank(), i_prev.rank(), is_zero(&i_prev.compose(&d))));
        }
        nodes.sort_by(|a, b| (a.degree, a.node).cmp(&(b.degree, b.node)));
        nodes.dedup_by(|a, b| a.degree == b.degree && a.node == b.node);
        let exact = nodes.iter().all(|n| n.exact);
        Ok(LesReport { k, nodes, exact })
    }

    /// Layer homology through the bar construction against
    /// `O[k] ⊗_{Σ_k} Q(X)^{⊗k}`; needs `O[1]` to be the unit.
    pub fn layer_routes(&self, k: usize) -> Result<RouteReport, CompletionError> {
        let x = self.algebra();
        if !x.operad.is_unitary1() {
            return Err(CompletionError::Hypothesis(format!("{} has O[1] ≠ k, so the layer is not a tensor power of Q(X)", x.operad.name)));
        }
        let hi = self.soundness();
        let bar = homology(&self.layer(k).complex).window(0, hi);
        let q = &self.stage(1).complex;
        let tq = layer_from_tq(x, k, q, self.params().dtot())?;
        let direct = homology(&tq).window(0, hi);
        let agree = (0..=hi).all(|n| bar.group(n) == direct.group(n));
        Ok(RouteReport { k, through: hi, bar: groups(&bar, hi), tensor: groups(&direct, hi), agree })
    }
}

fn groups(r: &crate::chain::HomologyReport, hi: i32) -> BTreeMap<i32, AbGroup> {
    (0..=hi).map(|n| (n, r.group(n))).collect()
}

fn node(name: &'static str, degree: i32, dim: usize, incoming: usize, outgoing: usize, composite_zero: bool) -> LesNode {
    LesNode { node: name, degree, dim, incoming, outgoing, exact: composite_zero && incoming + outgoing == dim }
}

fn is_zero(m: &LinearMap) -> bool {
    m.columns.iter().all(|c| c.is_empty())
}

fn apply(ring: crate::CoeffRing, images: &[SparseVec], v: &SparseVec) -> SparseVec {
    let mut acc = crate::exactalg::Accumulator::new();
    for (i, c) in v.iter() {
        acc.add_vec(ring, c, &images[i]);
    }
    acc.finish()
}

pub(crate) fn matrix(m: &LinearMap) -> SparseMatrix {
    SparseMatrix::from_columns(m.ring, m.target_dim, m.columns.clone())
}

fn ses_report(name: &str, inc: &ChainMap, proj: &ChainMap) -> SesReport {
    let (sub, mid, quot) = (&inc.source, &inc.target, &proj.target);
    let mut degrees = Vec::new();
    let ring = mid.ring;
    let composite = proj.compose(inc);
    let mut exact = (0..sub.len()).all(|i| composite.image(i).is_empty());
    let lo = [sub.min_degree(), mid.min_degree(), quot.min_degree()].into_iter().flatten().min().unwrap_or(0);
    let hi = [sub.max_degree(), mid.max_degree(), quot.max_degree()].into_iter().flatten().max().unwrap_or(-1);
    for n in lo..=hi {
        let (a, b, c) = (sub.rank_in_degree(n), mid.rank_in_degree(n), quot.rank_in_degree(n));
        let mi = inc.matrix(n);
        let mp = proj.matrix(n);
        let ri = crate::exactalg::rank_of(ring, mi.columns());
        let rp = crate::exactalg::rank_of(ring, &mp.transpose().into_columns());
        let ok = ri == a && rp == c && a + c == b;
        exact &= ok;
        degrees.push(SesDegree { degree: n, sub: a, mid: b, quot: c, exact: ok });
    }
    SesReport { name: name.to_string(), degrees, exact }
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeLimit {
    pub degree: i32,
    pub rank: usize,
    pub lim1: AbGroup,
    /// First stage from which all tower maps in this degree are isomorphisms.
    pub stable_from: Option<usize>,
    pub inconclusive: bool,
    pub carrier_rank: usize,
    /// `H_n(X) → H_n(stage kmax)` is an isomorphism.
    pub coaugmentation_iso: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompletionReport {
    pub kmax: usize,
    pub soundness: i32,
    pub mittag_leffler: bool,
    pub degrees: Vec<DegreeLimit>,
}

impl CompletionReport {
    pub fn rank(&self, n: i32) -> usize {
        self.degrees.iter().find(|d| d.degree == n).map_or(0, |d| d.rank)
    }

    pub fn table(&self) -> String {
        let mut s = String::from("deg  lim  lim1  stable  H(X)  X→X^\n");
        for d in &self.degrees {
            let st = match (d.stable_from, d.inconclusive) {
                (Some(k), false) => k.to_string(),
                _ => "?".into(),
            };
            s.push_str(&format!(
                "{:>3}  {:>3}  {:>4}  {:>6}  {:>4}  {}\n",
                d.degree,
                d.rank,
                d.lim1.to_string(),
                st,
                d.carrier_rank,
                if d.coaugmentation_iso { "iso" } else { "no" }
            ));
        }
        s
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SesDegree {
    pub degree: i32,
    pub sub: usize,
    pub mid: usize,
    pub quot: usize,
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SesReport {
    pub name: String,
    pub degrees: Vec<SesDegree>,
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LesNode {
    pub node: &'static str,
    pub degree: i32,
    pub dim: usize,
    /// Rank of the map into this node.
    pub incoming: usize,
    /// Rank of the map out of it.
    pub outgoing: usize,
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LesReport {
    pub k: usize,
    pub nodes: Vec<LesNode>,
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RouteReport {
    pub k: usize,
    pub through: i32,
    pub bar: BTreeMap<i32, AbGroup>,
    pub tensor: BTreeMap<i32, AbGroup>,
    pub agree: bool,
}

#[cfg(test)]
mod tests;
