//! JSON documents for algebras.
//!
//! ```json
//! {"format": "algebra", "name": "dual", "ring": "Q",
//!  "operad": "assocNonunital", "cutoff": 6,
//!  "kind": "product",
//!  "carrier": {"ring": "Q", "cells": [["e", 2], ["e2", 4]]},
//!  "product": [{"a": 0, "b": 0, "value": [[1, 1]]}]}
//! ```
//!
//! `operad` is a preset name or an inline operad document. `kind` is
//! `trivial`, `free` (carrier replaced by `generators` and a degree
//! `budget`), `product` or `table` (entries on orbit representatives with
//! sorted children).

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::chain::ChainComplex;
use crate::exactalg::{CoeffRing, Scalar, SparseVec};
use crate::operad::Operad;

use super::{Action, Algebra, AlgebraError, AlgebraMap};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProductEntry {
    pub a: u32,
    pub b: u32,
    pub value: Vec<(u32, Scalar)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableEntry {
    pub arity: usize,
    pub op: u32,
    pub kids: Vec<u32>,
    pub value: Vec<(u32, Scalar)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub format: String,
    #[serde(default)]
    pub name: Option<String>,
    pub ring: CoeffRing,
    pub operad: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub carrier: Option<ChainComplex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<ChainComplex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<i32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub product: Vec<ProductEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub table: Vec<TableEntry>,
}

fn vec_of(ring: CoeffRing, v: &[(u32, Scalar)]) -> Result<SparseVec, AlgebraError> {
    let terms: Result<Vec<_>, _> = v.iter().map(|(k, c)| ring.try_normalize(c.clone()).map(|c| (*k as usize, c))).collect();
    Ok(SparseVec::from_terms(ring, terms.map_err(|e| AlgebraError::Invalid(e.to_string()))?))
}

fn entries_of(v: &SparseVec) -> Vec<(u32, Scalar)> {
    v.iter().map(|(k, c)| (k as u32, c.clone())).collect()
}

impl AlgebraFile {
    /// Builds the algebra; `cutoff` overrides the stored operad cutoff and
    /// `budget` the stored degree budget of free algebras.
    pub fn build(&self, cutoff: Option<usize>, budget: Option<i32>) -> Result<Algebra, AlgebraError> {
        if self.format != "algebra" {
            return Err(AlgebraError::Invalid(format!("expected format \"algebra\", found {:?}", self.format)));
        }
        let ring = self.ring;
        let operad = Operad::from_json(&self.operad, ring, cutoff.or(self.cutoff))?;
        let need = |c: &Option<ChainComplex>, what: &str| c.clone().ok_or_else(|| AlgebraError::Invalid(format!("{} algebra needs `{what}`", self.kind)));
        let a = match self.kind.as_str() {
            "trivial" => Algebra::trivial(&operad, &need(&self.carrier, "carrier")?)?,
            "free" => {
                let b = budget.or(self.budget).ok_or_else(|| AlgebraError::Invalid("free algebra needs a degree `budget`".into()))?;
                Algebra::free(&operad, &need(&self.generators, "generators")?, b)?
            }
            "product" => {
                let mut mul = HashMap::new();
                for e in &self.product {
                    mul.insert((e.a, e.b), vec_of(ring, &e.value)?);
                }
                Algebra::product(&operad, &need(&self.carrier, "carrier")?, mul)?
            }
            "table" => {
                let mut t = HashMap::new();
                for e in &self.table {
                    if e.kids.len() != e.arity {
                        return Err(AlgebraError::Invalid(format!("table entry has {} children for arity {}", e.kids.len(), e.arity)));
                    }
                    t.insert(((e.arity, e.op), e.kids.clone()), vec_of(ring, &e.value)?);
                }
                Algebra::table(&operad, &need(&self.carrier, "carrier")?, t)?
            }
            k => return Err(AlgebraError::Invalid(format!("unknown algebra kind `{k}`"))),
        };
        Ok(match &self.name {
            Some(n) => a.named(n.clone()),
            None => a,
        })
    }

    pub fn from_algebra(a: &Algebra) -> Self {
        let mut f = AlgebraFile {
            format: "algebra".into(),
            name: Some(a.name.clone()),
            ring: a.ring(),
            operad: a.operad.to_json(),
            cutoff: None,
            kind: a.kind().into(),
            carrier: None,
            generators: None,
            budget: None,
            product: Vec::new(),
            table: Vec::new(),
        };
        match &a.action {
            Action::Trivial => f.carrier = Some(a.carrier.clone()),
            Action::Free { forest, .. } => {
                f.generators = Some(forest.leaves.clone());
                f.budget = Some(forest.layer(1).spec.budget);
            }
            Action::Product(mul) => {
                f.carrier = Some(a.carrier.clone());
                let mut es: Vec<_> = mul.iter().filter(|(_, v)| !v.is_empty()).collect();
                es.sort_by_key(|(k, _)| **k);
                f.product = es.into_iter().map(|(&(a, b), v)| ProductEntry { a, b, value: entries_of(v) }).collect();
            }
            Action::Table(t) => {
                f.carrier = Some(a.carrier.clone());
                let mut es: Vec<_> = t.iter().filter(|(_, v)| !v.is_empty()).collect();
                es.sort_by(|x, y| x.0.cmp(y.0));
                f.table = es
                    .into_iter()
                    .map(|(((arity, op), kids), v)| TableEntry { arity: *arity, op: *op, kids: kids.clone(), value: entries_of(v) })
                    .collect();
            }
        }
        f
    }
}

/// `{"format": "algebra-map", "source": …, "target": …, "on": "generators", "images": […]}`.
///
/// `on` is `generators` (the source is free; images of its generators) or
/// `cells` (images of every carrier cell).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapFile {
    pub format: String,
    pub source: AlgebraFile,
    pub target: AlgebraFile,
    pub on: String,
    pub images: Vec<Vec<(u32, Scalar)>>,
}

impl MapFile {
    pub fn build(&self, cutoff: Option<usize>, budget: Option<i32>) -> Result<AlgebraMap, AlgebraError> {
        if self.format != "algebra-map" {
            return Err(AlgebraError::Invalid(format!("expected format \"algebra-map\", found {:?}", self.format)));
        }
        let source = Arc::new(self.source.build(cutoff, budget)?);
        let target = Arc::new(self.target.build(cutoff, budget)?);
        let ring = source.ring();
        if target.ring() != ring || source.operad.name != target.operad.name {
            return Err(AlgebraError::Invalid("source and target must share ring and operad".into()));
        }
        let images = self.images.iter().map(|v| vec_of(ring, v)).collect::<Result<Vec<_>, _>>()?;
        let cells = target.carrier.len();
        if images.iter().any(|v| v.max_index().map_or(false, |i| i >= cells)) {
            return Err(AlgebraError::Invalid(format!("image index out of range; the target has {cells} cells")));
        }
        let map = match self.on.as_str() {
            "generators" => {
                let (gens, _) = source.generators().ok_or_else(|| AlgebraError::Invalid("`on: generators` needs a free source".into()))?;
                if images.len() != gens.len() {
                    return Err(AlgebraError::Invalid(format!("{} images for {} generators", images.len(), gens.len())));
                }
                AlgebraMap::from_generators(source, target, &images)?
            }
            "cells" => {
                if images.len() != source.carrier.len() {
                    return Err(AlgebraError::Invalid(format!("{} images for {} cells", images.len(), source.carrier.len())));
                }
                AlgebraMap::new(source, target, images)
            }
            o => return Err(AlgebraError::Invalid(format!("unknown `on` value `{o}`"))),
        };
        let deg = map.source.carrier.max_degree().unwrap_or(0);
        map.check(map.source.operad.cutoff().min(deg.max(1) as usize), deg).map_err(AlgebraError::Invalid)?;
        Ok(map)
    }
}

pub fn map_from_str(text: &str, cutoff: Option<usize>, budget: Option<i32>) -> Result<AlgebraMap, AlgebraError> {
    let f: MapFile = serde_json::from_str(text).map_err(|e| AlgebraError::Invalid(format!("map document: {e}")))?;
    f.build(cutoff, budget)
}

pub fn algebra_from_str(text: &str, cutoff: Option<usize>, budget: Option<i32>) -> Result<Algebra, AlgebraError> {
    let f: AlgebraFile = serde_json::from_str(text).map_err(|e| AlgebraError::Invalid(format!("algebra document: {e}")))?;
    f.build(cutoff, budget)
}

pub fn algebra_to_string(a: &Algebra) -> String {
    serde_json::to_string_pretty(&AlgebraFile::from_algebra(a)).unwrap() + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        let q = CoeffRing::Rationals;
        let o = Operad::assoc(q, 4);
        let v = ChainComplex::sphere(q, 1);
        let mut b = crate::chain::ChainBuilder::new(q);
        b.add_cell("e", 2);
        b.add_cell("e2", 4);
        let c = b.build().unwrap();
        let mul = HashMap::from([((0, 0), SparseVec::unit(1))]);
        for a in [Algebra::trivial(&o, &v).unwrap(), Algebra::free(&o, &v, 3).unwrap(), Algebra::product(&o, &c, mul).unwrap()] {
            let s = algebra_to_string(&a);
            let back = algebra_from_str(&s, None, None).unwrap();
            assert_eq!(back.carrier, a.carrier);
            assert_eq!(algebra_to_string(&back), s);
        }
    }
}
