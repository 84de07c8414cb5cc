//! Three-valued verdicts for the Hurewicz, relative Hurewicz, Whitehead,
//! finiteness and convergence statements, checked through the certified
//! degrees of a computation.
//!
//! A map is `c`-connected when it is an isomorphism on `H_k` for `k < c` and
//! onto on `H_c`. Connectivities are capped at the certified degree.

use std::sync::Arc;

use serde::Serialize;

use super::{CompletionError, CompletionTower};
use crate::algebra::{Algebra, AlgebraMap};
use crate::bar::derived::{Params, RightModule};
use crate::bar::prepare;
use crate::chain::{homology, induced_map, ChainMap, HomologyReport};
use crate::exactalg::{CoeffRing, LinearMap};
use crate::operad::{check_operad_axioms, Operad};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub degree: i32,
    pub claim: String,
    pub source_dim: usize,
    pub target_dim: usize,
    pub rank: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<i32>,
    pub ok: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub statement: &'static str,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// Highest certified degree.
    pub through: i32,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl Verdict {
    fn not_applicable(statement: &'static str, reason: impl Into<String>) -> Self {
        Verdict { statement, status: Status::NotApplicable, reason: Some(reason.into()), through: -1, checks: vec![], witness: None }
    }

    fn from_checks(statement: &'static str, through: i32, checks: Vec<Check>, witness: Option<Witness>) -> Self {
        let status = if checks.iter().all(|c| c.ok) && witness.is_none() { Status::Pass } else { Status::Fail };
        Verdict { statement, status, reason: None, through, checks, witness }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdicts serialize")
    }
}

fn check(name: impl Into<String>, degree: Option<i32>, ok: bool, detail: impl Into<String>) -> Check {
    Check { name: name.into(), degree, ok, detail: detail.into() }
}

fn stage(k: Option<usize>) -> String {
    k.map_or_else(|| "none".into(), |k| k.to_string())
}

fn is_iso(m: &LinearMap) -> bool {
    m.source_dim == m.target_dim && m.rank() == m.source_dim
}

fn describe(m: &LinearMap) -> String {
    format!("{} → {}, rank {}", m.source_dim, m.target_dim, m.rank())
}

fn witness(degree: i32, claim: impl Into<String>, m: &LinearMap) -> Witness {
    Witness { degree, claim: claim.into(), source_dim: m.source_dim, target_dim: m.target_dim, rank: m.rank() }
}

/// Connectivity of a complex through `hi`: the largest `n ≤ hi` with
/// `H_k = 0` for `k ≤ n`.
pub fn connectivity_through(r: &HomologyReport, hi: i32) -> i32 {
    (0..=hi).find(|&n| !r.group(n).is_zero()).map_or(hi, |n| n - 1)
}

/// Connectivity of a map from its components `H_k` for `k = 0..=hi`.
pub fn map_connectivity(maps: &[LinearMap], hi: i32) -> i32 {
    for (k, m) in maps.iter().enumerate() {
        if !is_iso(m) {
            return if m.rank() == m.target_dim { k as i32 } else { k as i32 - 1 };
        }
    }
    hi
}

fn field_only(statement: &'static str, ring: CoeffRing) -> Option<Verdict> {
    (!ring.is_field()).then(|| Verdict::not_applicable(statement, format!("maps on homology are only compared over a field, not {ring}")))
}

fn hypotheses(statement: &'static str, x: &Algebra) -> Option<Verdict> {
    let o = &x.operad;
    if !o.is_reduced() {
        return Some(Verdict::not_applicable(statement, format!("{} has operations in arity 0", o.name)));
    }
    if let Some(c) = (0..x.carrier.len()).find(|&c| x.carrier.degree(c) <= 0) {
        return Some(Verdict::not_applicable(statement, format!("{} is not 0-connected at the chain level (cell {})", x.name, x.carrier.label(c))));
    }
    None
}

/// `Q(X)` is `n`-connected iff `X` is, and `H_k X → H_k Q(X)` is an
/// isomorphism for `k ≤ 2n + 1` and onto for `k = 2n + 2`.
pub fn hurewicz(x: &Arc<Algebra>, params: Params) -> Result<Verdict, CompletionError> {
    const S: &str = "hurewicz";
    if let Some(v) = hypotheses(S, x).or_else(|| field_only(S, x.ring())) {
        return Ok(v);
    }
    let t = CompletionTower::build(x, 1, params)?;
    let hi = t.soundness();
    let hx = &t.carrier_homology().report;
    let hq = &t.stage_homology(1).report;
    let (cx, cq) = (connectivity_through(hx, hi), connectivity_through(hq, hi));
    let mut checks = vec![check("connectivity", None, cx == cq, format!("X is {cx}-connected, Q(X) is {cq}-connected (through degree {hi})"))];
    let mut wit = None;
    let n = cq.max(0);
    for k in 0..=hi.min(2 * n + 2) {
        let h = t.hurewicz_map(k);
        let (name, ok) = if k <= 2 * n + 1 { ("isomorphism", is_iso(&h)) } else { ("surjection", h.rank() == h.target_dim) };
        if !ok && wit.is_none() {
            wit = Some(witness(k, format!("Hurewicz map is an {name}"), &h));
        }
        checks.push(check(format!("hurewicz {name}"), Some(k), ok, describe(&h)));
    }
    Ok(Verdict::from_checks(S, hi, checks, wit))
}

/// The boundary degrees of the Hurewicz statement for `X`: whether the
/// map is an isomorphism at `2n + 1` and whether it is onto but not
/// injective at `2n + 2`.
#[derive(Clone, Debug, Serialize)]
pub struct HurewiczBoundary {
    pub n: i32,
    pub iso_at_top: Option<bool>,
    pub strict_surjection: Option<bool>,
}

pub fn hurewicz_boundary(x: &Arc<Algebra>, params: Params) -> Result<HurewiczBoundary, CompletionError> {
    let t = CompletionTower::build(x, 1, params)?;
    let hi = t.soundness();
    let n = connectivity_through(&t.stage_homology(1).report, hi).max(0);
    let iso = (2 * n + 1 <= hi).then(|| {
        let h = t.hurewicz_map(2 * n + 1);
        is_iso(&h) && h.source_dim > 0
    });
    let strict = (2 * n + 2 <= hi).then(|| {
        let h = t.hurewicz_map(2 * n + 2);
        h.rank() == h.target_dim && h.rank() < h.source_dim
    });
    Ok(HurewiczBoundary { n, iso_at_top: iso, strict_surjection: strict })
}

/// Induced maps of the realized bar constructions of a map of algebras.
pub struct TowerMap {
    pub f: AlgebraMap,
    pub x: CompletionTower,
    pub y: CompletionTower,
}

impl TowerMap {
    pub fn build(f: &AlgebraMap, kmax: usize, params: Params) -> Result<Self, CompletionError> {
        f.check(params.dtot().max(1) as usize, params.dtot()).map_err(CompletionError::Invalid)?;
        let dt = params.dtot();
        for a in [&f.source, &f.target] {
            let p = prepare(a, dt)?;
            if p.carrier != a.carrier {
                return Err(CompletionError::Invalid(format!("{} must be computed through degree {dt} before mapping it", a.name)));
            }
        }
        let x = CompletionTower::build(&f.source, kmax, params)?;
        let y = CompletionTower::build(&f.target, kmax, params)?;
        Ok(TowerMap { f: f.clone(), x, y })
    }

    /// `H_n(stage k of X) → H_n(stage k of Y)`; `k = 1` is `H_n Q(f)`.
    pub fn stage_map(&self, k: usize, n: i32) -> LinearMap {
        let (bx, by) = (&self.x.fattened.bar, &self.y.fattened.bar);
        let leaf = |c: u32| self.f.images[c as usize].clone();
        let imgs = by.map_realized(bx, self.x.stage(k), self.y.stage(k), &leaf);
        let ring = self.x.ring();
        induced_map(self.x.stage_homology(k), self.y.stage_homology(k), n, |v| {
            let mut acc = crate::exactalg::Accumulator::new();
            for (i, c) in v.iter() {
                acc.add_vec(ring, c, &imgs[i]);
            }
            acc.finish()
        })
    }

    /// The chain map of stage `k`, validated.
    pub fn stage_chain_map(&self, k: usize) -> Result<ChainMap, CompletionError> {
        let (bx, by) = (&self.x.fattened.bar, &self.y.fattened.bar);
        let leaf = |c: u32| self.f.images[c as usize].clone();
        let imgs = by.map_realized(bx, self.x.stage(k), self.y.stage(k), &leaf);
        Ok(ChainMap::new(Arc::new(self.x.stage(k).complex.clone()), Arc::new(self.y.stage(k).complex.clone()), imgs)?)
    }

    /// `H_n(f)` on carriers.
    pub fn carrier_map(&self, n: i32) -> LinearMap {
        let keep: Vec<usize> = (0..self.f.source.carrier.len()).filter(|&i| self.f.source.carrier.degree(i) <= self.x.params().dtot()).collect();
        let tgt: Vec<Option<usize>> = {
            let c = &self.f.target.carrier;
            let mut j = 0;
            (0..c.len())
                .map(|i| {
                    if c.degree(i) <= self.y.params().dtot() {
                        j += 1;
                        Some(j - 1)
                    } else {
                        None
                    }
                })
                .collect()
        };
        let ring = self.x.ring();
        induced_map(self.x.carrier_homology(), self.y.carrier_homology(), n, |v| {
            let mut acc = crate::exactalg::Accumulator::new();
            for (i, c) in v.iter() {
                acc.add_vec(ring, c, &self.f.images[keep[i]].remap(ring, |j| tgt[j]));
            }
            acc.finish()
        })
    }

    fn carrier_maps(&self, hi: i32) -> Vec<LinearMap> {
        (0..=hi).map(|n| self.carrier_map(n)).collect()
    }

    fn q_maps(&self, hi: i32) -> Vec<LinearMap> {
        (0..=hi).map(|n| self.stage_map(1, n)).collect()
    }
}

/// The four parts of the relative statement for `f: X → Y`.
pub fn relative_hurewicz(f: &AlgebraMap, kmax: usize, params: Params) -> Result<Verdict, CompletionError> {
    const S: &str = "relative-hurewicz";
    for a in [&f.source, &f.target] {
        if let Some(v) = hypotheses(S, a).or_else(|| field_only(S, a.ring())) {
            return Ok(v);
        }
    }
    let tm = TowerMap::build(f, kmax, params)?;
    let hi = tm.x.soundness();
    let cf = map_connectivity(&tm.carrier_maps(hi), hi);
    let cq = map_connectivity(&tm.q_maps(hi), hi);
    let mut checks = vec![
        check("(a) f and Q(f) equally connected", None, cf == cq, format!("f is {cf}-connected, Q(f) is {cq}-connected")),
        check("(b) Q(f) at least as connected as f", None, cq >= cf, format!("{cq} ≥ {cf}")),
    ];
    let lx = tm.x.completion()?;
    let ly = tm.y.completion()?;
    // Degrees where both limits are attained.
    let cap = (0..=hi).take_while(|&n| [&lx, &ly].iter().all(|l| l.degrees.iter().any(|d| d.degree == n && !d.inconclusive))).last().unwrap_or(-1);
    let fhat: Vec<LinearMap> = (0..=cap).map(|n| tm.stage_map(tm.x.kmax, n)).collect();
    let chat = map_connectivity(&fhat, cap);
    checks.push(check(
        "(c) completion of f is (c(Q(f)) − 1)-connected",
        None,
        chat >= (cq - 1).min(cap),
        format!("completion map is {chat}-connected through degree {cap}, Q(f) is {cq}-connected"),
    ));
    let qx = connectivity_through(&tm.x.stage_homology(1).report, hi);
    let hx = (0..=cap).find(|&n| lx.rank(n) > 0).map_or(cap, |n| n - 1);
    checks.push(check(
        "(d) completion as connected as Q(X)",
        None,
        hx >= qx.min(cap),
        format!("X^ is {hx}-connected through degree {cap}, Q(X) is {qx}-connected"),
    ));
    Ok(Verdict::from_checks(S, hi, checks, None))
}

/// `f` is a homology isomorphism iff `Q(f)` is, for 0-connected `X, Y`.
/// Through the certified degree `s`, an isomorphism on one side forces the
/// other to be an isomorphism below `s` and onto at `s`; the verdict
/// passes when both sides are isomorphisms and fails with a witness
/// otherwise.
pub fn whitehead(f: &AlgebraMap, params: Params) -> Result<Verdict, CompletionError> {
    const S: &str = "whitehead";
    for a in [&f.source, &f.target] {
        if let Some(v) = hypotheses(S, a).or_else(|| field_only(S, a.ring())) {
            return Ok(v);
        }
    }
    let tm = TowerMap::build(f, 1, params)?;
    let hi = tm.x.soundness();
    let hf = tm.carrier_maps(hi);
    let hq = tm.q_maps(hi);
    let (cf, cq) = (map_connectivity(&hf, hi), map_connectivity(&hq, hi));
    let iso_f = hf.iter().all(is_iso);
    let iso_q = hq.iter().all(is_iso);
    let consistent = (!iso_q || cf >= hi) && (!iso_f || cq >= hi);
    let mut checks = vec![check(
        "theorem",
        None,
        consistent,
        format!("H(f) iso: {iso_f}, H(Q(f)) iso: {iso_q}; connectivities {cf} and {cq} through degree {hi}"),
    )];
    for (n, (a, b)) in hf.iter().zip(&hq).enumerate() {
        checks.push(check("H(f) and H(Q(f))", Some(n as i32), is_iso(a) && is_iso(b), format!("{}; {}", describe(a), describe(b))));
    }
    let wit = if !consistent {
        let n = (cf.min(cq) + 1).max(0);
        Some(witness(n, "an isomorphism on one side forces one on the other", &hf[n as usize]))
    } else {
        (0..=hi as usize).find(|&n| !is_iso(&hf[n]) || !is_iso(&hq[n])).map(|n| {
            if !is_iso(&hf[n]) {
                witness(n as i32, "H(f) is an isomorphism", &hf[n])
            } else {
                witness(n as i32, "H(Q(f)) is an isomorphism", &hq[n])
            }
        })
    };
    Ok(Verdict::from_checks(S, hi, checks, wit))
}

/// Over `Z` with a Σ-free operad: finite (resp. finitely generated)
/// `H_{≤k} Q(X)` gives finite (resp. finitely generated) `H_{≤k} X`.
pub fn finiteness(x: &Arc<Algebra>, params: Params) -> Result<Verdict, CompletionError> {
    const S: &str = "finiteness";
    if let Some(v) = hypotheses(S, x) {
        return Ok(v);
    }
    if x.ring() != CoeffRing::Integers {
        return Ok(Verdict::not_applicable(S, format!("the statement is about abelian groups; {} is over {}", x.name, x.ring())));
    }
    if !x.operad.is_sigma_free() {
        return Ok(Verdict::not_applicable(S, format!("{} is not Σ-free", x.operad.name)));
    }
    let q = crate::bar::derived::derived_circle(RightModule::Truncation(1), x, params)?;
    let hi = params.soundness();
    let hq = homology(&q.complex).window(0, hi);
    let c = &x.carrier;
    let hx = homology(&c.restrict(|i| c.degree(i) <= params.dtot())).window(0, hi);
    let mut checks = Vec::new();
    let mut q_finite = true;
    let mut wit = None;
    for k in 0..=hi {
        let (gq, gx) = (hq.group(k), hx.group(k));
        q_finite &= gq.is_finite();
        let ok = !q_finite || gx.is_finite();
        if !ok && wit.is_none() {
            wit = Some(Witness { degree: k, claim: "finite H_{≤k} Q(X) gives finite H_k X".into(), source_dim: gq.rank, target_dim: gx.rank, rank: 0 });
        }
        checks.push(check("finite", Some(k), ok, format!("H_{k} Q(X) = {gq}, H_{k} X = {gx}")));
    }
    Ok(Verdict::from_checks(S, hi, checks, wit))
}

/// `H_i X → H_i(stage k)` is an isomorphism for `i ≤ k`, the homology
/// tower in degree `i` is constant from stage `i` on (so `lim¹ = 0`), and
/// `X → X^{h∧}` is an isomorphism in every degree where it has stabilized.
pub fn convergence(x: &Arc<Algebra>, kmax: usize, params: Params) -> Result<Verdict, CompletionError> {
    const S: &str = "convergence";
    if let Some(v) = hypotheses(S, x).or_else(|| field_only(S, x.ring())) {
        return Ok(v);
    }
    let t = CompletionTower::build(x, kmax, params)?;
    Ok(convergence_of(&t))
}

pub fn convergence_of(t: &CompletionTower) -> Verdict {
    const S: &str = "convergence";
    let hi = t.soundness();
    let mut checks = Vec::new();
    let mut wit = None;
    for k in 1..=t.kmax {
        for i in 0..=(k as i32).min(hi) {
            let m = t.coaugmentation_map(k, i);
            let ok = is_iso(&m);
            if !ok && wit.is_none() {
                wit = Some(witness(i, format!("H_{i} X → H_{i}(stage {k}) is an isomorphism"), &m));
            }
            checks.push(check(format!("stage {k}"), Some(i), ok, describe(&m)));
        }
    }
    match t.completion() {
        Ok(c) => {
            for d in &c.degrees {
                checks.push(check("lim1", Some(d.degree), d.lim1.is_zero(), d.lim1.to_string()));
                if (d.degree as usize) < t.kmax {
                    let ok = !d.inconclusive && d.stable_from.is_some_and(|k| k <= (d.degree as usize).max(1));
                    checks.push(check("stabilized", Some(d.degree), ok, format!("stable from stage {}", stage(d.stable_from))));
                }
                if !d.inconclusive {
                    checks.push(check(
                        "coaugmentation",
                        Some(d.degree),
                        d.coaugmentation_iso && d.rank == d.carrier_rank,
                        format!("H(X) rank {}, limit rank {}, stable from stage {}", d.carrier_rank, d.rank, stage(d.stable_from)),
                    ));
                }
            }
        }
        Err(e) => checks.push(check("limit", None, false, e.to_string())),
    }
    Verdict::from_checks(S, hi, checks, wit)
}

/// Operad axioms through the operad's cutoff.
pub fn axioms(o: &Operad) -> Verdict {
    const S: &str = "axioms";
    let r = check_operad_axioms(o);
    let checks = vec![check("operad axioms", None, r.pass, format!("{} identities checked through arity {}", r.checked, o.cutoff()))];
    let mut v = Verdict::from_checks(S, o.cutoff() as i32, checks, None);
    if let Some(w) = r.witness {
        v.status = Status::Fail;
        v.reason = Some(w);
    }
    v
}
