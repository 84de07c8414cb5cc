use std::fs;
use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use hocomp_core::algebra::check_algebra_axioms;
use hocomp_core::algebra::io::{AlgebraFile, MapFile};
use hocomp_core::chain::io as chain_io;
use hocomp_core::chain::ChainBuilder;
use hocomp_core::{Algebra, AlgebraMap, ChainComplex, CoeffRing, Operad, Params, RightModule};

use crate::Job;

pub fn parse_window(s: &str) -> Result<(i32, i32), String> {
    let (a, b) = s.split_once(':').ok_or("expected dmin:dmax")?;
    let lo: i32 = a.trim().parse().map_err(|e| format!("dmin: {e}"))?;
    let hi: i32 = b.trim().parse().map_err(|e| format!("dmax: {e}"))?;
    if lo > hi {
        return Err(format!("empty window {lo}:{hi}"));
    }
    Ok((lo, hi))
}

pub fn parse_module(s: &str) -> Result<RightModule, String> {
    let k = |v: &str| v.parse::<usize>().map_err(|e| format!("{s}: {e}")).and_then(|k| if k == 0 { Err("arity must be ≥ 1".into()) } else { Ok(k) });
    match s.split_once(':') {
        None if s == "whole" => Ok(RightModule::Whole),
        Some(("tau", v)) => Ok(RightModule::Truncation(k(v)?)),
        Some(("layer", v)) => Ok(RightModule::Layer(k(v)?)),
        Some(("above", v)) => Ok(RightModule::Above(k(v)?)),
        _ => Err(format!("unknown module `{s}`; use whole, tau:K, layer:K or above:K")),
    }
}

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// A chain complex in the text format, or as JSON when the file starts with `{`.
pub fn read_complex(path: &Path) -> Result<ChainComplex> {
    let text = read(path)?;
    let c = if text.trim_start().starts_with('{') {
        serde_json::from_str(&text).map_err(anyhow::Error::from)
    } else {
        chain_io::from_text(&text).map_err(anyhow::Error::from)
    };
    c.with_context(|| format!("in {}", path.display()))
}

impl Job {
    pub fn ring(&self) -> Result<CoeffRing> {
        self.ring.parse().with_context(|| format!("ring `{}`", self.ring))
    }

    pub fn params(&self) -> Params {
        let p = Params::window(self.window.0, self.window.1);
        match self.levels {
            Some(l) => p.with_levels(l),
            None => p,
        }
    }

    pub fn kmax(&self) -> usize {
        self.kmax.unwrap_or(self.window.1.max(1) as usize)
    }

    pub fn operad(&self) -> Result<Operad> {
        let ring = self.ring()?;
        let path = Path::new(&self.operad);
        let v = if path.extension().map_or(false, |e| e == "json") {
            serde_json::from_str(&read(path)?).with_context(|| format!("in {}", path.display()))?
        } else {
            serde_json::Value::String(self.operad.clone())
        };
        let o = Operad::from_json(&v, ring, self.cutoff)?;
        let report = hocomp_core::operad::check_operad_axioms(&o);
        if !report.pass {
            bail!("operad {} fails its axioms: {}", o.name, report.witness.unwrap_or_default());
        }
        Ok(o)
    }

    pub fn algebra(&self) -> Result<Arc<Algebra>> {
        let spec = self.algebra.as_deref().context("--algebra is required")?;
        let budget = self.params().dtot();
        if let Some((kind, degs)) = spec.split_once(':') {
            if kind == "trivial" || kind == "free" {
                let o = self.operad()?;
                let mut b = ChainBuilder::new(o.ring);
                for (i, d) in degs.split(',').enumerate() {
                    let d = d.trim();
                    let n: i32 = d.strip_prefix("deg").unwrap_or(d).parse().with_context(|| format!("degree `{d}`"))?;
                    b.add_cell(format!("x{i}"), n);
                }
                let v = b.build()?;
                let a = if kind == "trivial" { Algebra::trivial(&o, &v)? } else { Algebra::free(&o, &v, budget)? };
                return Ok(Arc::new(a.named(spec)));
            }
        }
        let path = Path::new(spec);
        let f: AlgebraFile = serde_json::from_str(&read(path)?).with_context(|| format!("in {}", path.display()))?;
        let a = f.build(self.cutoff, Some(budget)).with_context(|| format!("in {}", path.display()))?;
        if !a.is_free() {
            let r = check_algebra_axioms(&a, budget.max(1) as usize, budget);
            if !r.pass {
                bail!("{}: algebra {} fails its axioms: {}", path.display(), a.name, r.witness.unwrap_or_default());
            }
        }
        Ok(Arc::new(a))
    }

    pub fn map(&self, path: Option<&Path>) -> Result<AlgebraMap> {
        let path = path.context("--map is required")?;
        let f: MapFile = serde_json::from_str(&read(path)?).with_context(|| format!("in {}", path.display()))?;
        Ok(f.build(self.cutoff, Some(self.params().dtot())).with_context(|| format!("in {}", path.display()))?)
    }
}
