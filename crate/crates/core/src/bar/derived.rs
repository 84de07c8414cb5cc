//! Derived circle products `N ∘^h_O X` through the bar construction: Quillen
//! homology, tower stages and layers.

use std::sync::Arc;

use crate::algebra::Algebra;
use crate::chain::{ChainComplex, ChainMap};
use crate::exactalg::{CoeffRing, SparseVec};
use crate::forest::{Filter, Forest, LayerSpec};

use super::{prepare, Bar, BarError, BarOptions, Realized};

/// Truncation data for one computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Params {
    /// Requested homology degrees.
    pub window: (i32, i32),
    /// Highest simplicial level.
    pub levels: usize,
}

impl Params {
    /// Default simplicial truncation `dmax + 2`.
    pub fn window(lo: i32, hi: i32) -> Self {
        Params { window: (lo, hi), levels: (hi.max(0) + 2) as usize }
    }

    pub fn with_levels(mut self, p: usize) -> Self {
        self.levels = p;
        self
    }

    /// Degrees whose homology is certified: `min(dmax, P − 1)`.
    pub fn soundness(&self) -> i32 {
        self.window.1.min(self.levels as i32 - 1)
    }

    /// Total degree through which cells are kept.
    pub fn dtot(&self) -> i32 {
        self.soundness() + 1
    }
}

/// Right `O`-modules cut out of `O` by arity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RightModule {
    /// `O` itself.
    Whole,
    /// `τ_k O`.
    Truncation(usize),
    /// `i_k O`: arity exactly `k`.
    Layer(usize),
    /// `O^{>k}`.
    Above(usize),
}

impl RightModule {
    pub fn band(&self) -> (usize, usize) {
        match *self {
            RightModule::Whole => (1, usize::MAX),
            RightModule::Truncation(k) => (1, k),
            RightModule::Layer(k) => (k, k),
            RightModule::Above(k) => (k + 1, usize::MAX),
        }
    }
}

/// Policy for derived computations: a field of characteristic zero, a
/// prime field above the arity cutoff, or `Z` with a Σ-free operad.
pub fn check_policy(x: &Algebra, cutoff: usize) -> Result<(), BarError> {
    let o = &x.operad;
    match o.ring {
        CoeffRing::Rationals => Ok(()),
        CoeffRing::PrimeField(p) if p as usize > cutoff => Ok(()),
        // Carriers are free on their cells.
        CoeffRing::Integers if o.is_sigma_free() => Ok(()),
        r => Err(BarError::Policy(format!(
            "derived circle products over {r} need Q, a prime field above the cutoff {cutoff}, or Z with a Σ-free operad ({} is not)",
            o.name
        ))),
    }
}

/// `|Bar(O, O, X)|` with every arity quotient available.
pub struct Fattened {
    pub bar: Bar,
    pub params: Params,
}

impl Fattened {
    pub fn new(x: &Arc<Algebra>, params: Params) -> Result<Self, BarError> {
        Self::with_roots(x, params, RightModule::Whole)
    }

    /// Only roots in the band of `n` are built.
    pub fn with_roots(x: &Arc<Algebra>, params: Params, n: RightModule) -> Result<Self, BarError> {
        let dtot = params.dtot();
        let x = prepare(x, dtot)?;
        check_policy(&x, x.operad.cutoff().max(dtot as usize))?;
        let (lo, hi) = n.band();
        let bar = Bar::new(&x, BarOptions::new(params.levels, dtot).roots(lo, hi))?;
        Ok(Fattened { bar, params })
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.bar.algebra
    }

    pub fn realize(&self, n: RightModule) -> Realized {
        self.bar.realize(n.band())
    }

    /// `|Bar(τ_k O, O, X)|`.
    pub fn stage(&self, k: usize) -> Realized {
        self.realize(RightModule::Truncation(k))
    }

    /// `|Bar(i_k O, O, X)|`.
    pub fn layer(&self, k: usize) -> Realized {
        self.realize(RightModule::Layer(k))
    }

    /// `x ↦ (1; x)` at level 0, from the carrier into a realization.
    pub fn coaugmentation(&self, target: &Realized) -> Vec<SparseVec> {
        let f = &self.bar.forest;
        let ring = self.bar.ring();
        let r0 = self.bar.r[0];
        (0..self.algebra().carrier.len() as u32)
            .map(|x| {
                f.normal(r0, f.operad.unit(), &[x])
                    .and_then(|(i, s)| target.index.get(&(0, i)).map(|&j| SparseVec::single(j as usize, ring.sign(s))))
                    .unwrap_or_default()
            })
            .collect()
    }

    /// The carrier cut at the same total degree.
    pub fn carrier(&self) -> ChainComplex {
        let c = &self.algebra().carrier;
        c.restrict(|i| c.degree(i) <= self.params.dtot())
    }

    pub fn coaugmentation_map(&self, target: &Realized) -> ChainMap {
        let c = self.carrier();
        let c_full = &self.algebra().carrier;
        let imgs = self.coaugmentation(target);
        let images = (0..c_full.len()).filter(|&i| c_full.degree(i) <= self.params.dtot()).map(|i| imgs[i].clone()).collect();
        ChainMap::new(Arc::new(c), Arc::new(target.complex.clone()), images).expect("the coaugmentation is a chain map")
    }

    /// The tower map `stage a → stage b` (or any band projection).
    pub fn projection(&self, from: &Realized, to: &Realized) -> ChainMap {
        ChainMap::new(Arc::new(from.complex.clone()), Arc::new(to.complex.clone()), from.map_to(to)).expect("band projections are chain maps")
    }
}

/// `N ∘^h_O X` as `|Bar(N, O, X)|`.
pub fn derived_circle(n: RightModule, x: &Arc<Algebra>, params: Params) -> Result<Realized, BarError> {
    let f = Fattened::with_roots(x, params, n)?;
    Ok(f.realize(n))
}

/// The Quillen homology complex `Q(X) = τ_1 O ∘^h_O X`.
pub fn tq(x: &Arc<Algebra>, params: Params) -> Result<Realized, BarError> {
    derived_circle(RightModule::Truncation(1), x, params)
}

/// `O[k] ⊗_{Σ_k} Q^{⊗k}` for a complex `q` of `Q(X)` and the operad of `x`.
pub fn layer_from_tq(x: &Algebra, k: usize, q: &ChainComplex, dtot: i32) -> Result<ChainComplex, BarError> {
    let o = if x.operad.is_truncated() || x.operad.cutoff() >= k { x.operad.clone() } else { x.operad.with_cutoff(k)? };
    let q = q.restrict(|i| q.degree(i) <= dtot);
    let mut f = Forest::new(&o, &q, &[]);
    let l = f.add_layer(0, LayerSpec::band(k, k, dtot), &Filter::default())?;
    Ok(f.layer_complex(l, |_| true).0)
}

/// `O ∘ V` through total degree `dtot`, restricted to the arity band of `n`.
pub fn circle_on(x: &Algebra, n: RightModule, v: &ChainComplex, dtot: i32) -> Result<ChainComplex, BarError> {
    let (lo, hi) = n.band();
    let hi = hi.min(x.operad.cutoff()).min(dtot.max(1) as usize);
    let mut f = Forest::new(&x.operad, v, &[]);
    let l = f.add_layer(0, LayerSpec::band(lo, hi, dtot), &Filter::default())?;
    Ok(f.layer_complex(l, |_| true).0)
}
