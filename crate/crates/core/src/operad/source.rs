//! Operads named by preset or given by a file.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::exactalg::CoeffRing;
use crate::symseq::SymSeq;

use super::table::OperadFile;
use super::{Operad, OperadError};

/// `{"format":"operad-preset","name":"assocNonunital","cutoff":6}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresetFile {
    pub format: String,
    pub name: String,
    pub cutoff: usize,
}

#[derive(Serialize, Deserialize)]
struct FreeFile {
    format: String,
    #[serde(default)]
    name: Option<String>,
    cutoff: usize,
    generators: SymSeq,
}

impl Operad {
    /// `assocNonunital` (alias `as`) or `comNonunital` (alias `com`).
    pub fn preset(name: &str, ring: CoeffRing, cutoff: usize) -> Result<Operad, OperadError> {
        match name {
            "as" | "assoc" | "assocNonunital" => Ok(Operad::assoc(ring, cutoff)),
            "com" | "comm" | "comNonunital" => Operad::comm(ring, cutoff),
            _ => Err(OperadError::Invalid(format!("unknown operad preset `{name}`"))),
        }
    }

    /// Reads any operad document: a preset descriptor, a free operad on
    /// generators, or a composition table. Presets take `ring` and, when
    /// given, `cutoff` in place of the stored one.
    pub fn from_json(v: &Value, ring: CoeffRing, cutoff: Option<usize>) -> Result<Operad, OperadError> {
        if let Some(name) = v.as_str() {
            return Operad::preset(name, ring, cutoff.unwrap_or(6));
        }
        let bad = |e: serde_json::Error| OperadError::Invalid(format!("operad document: {e}"));
        match v.get("format").and_then(Value::as_str) {
            Some("operad-preset") => {
                let p: PresetFile = serde_json::from_value(v.clone()).map_err(bad)?;
                Operad::preset(&p.name, ring, cutoff.unwrap_or(p.cutoff))
            }
            Some("operad-free") => {
                let f: FreeFile = serde_json::from_value(v.clone()).map_err(bad)?;
                if f.generators.ring != ring {
                    return Err(OperadError::Invalid(format!("free operad generators over {}, expected {ring}", f.generators.ring)));
                }
                let mut o = Operad::free(&f.generators, cutoff.unwrap_or(f.cutoff))?;
                if let Some(n) = f.name {
                    o.name = n;
                }
                Ok(o)
            }
            Some("operad") => {
                let f: OperadFile = serde_json::from_value(v.clone()).map_err(bad)?;
                let (name, table) = f.into_table()?;
                if table.seq.ring != ring {
                    return Err(OperadError::Invalid(format!("operad table over {}, expected {ring}", table.seq.ring)));
                }
                let o = Operad::from_table(name, table)?;
                match cutoff {
                    Some(r) if r != o.cutoff() => o.with_cutoff(r),
                    _ => Ok(o),
                }
            }
            other => Err(OperadError::Invalid(format!("unknown operad format {other:?}"))),
        }
    }

    /// A document that [`Operad::from_json`] reads back to this operad.
    pub fn to_json(&self) -> Value {
        use super::Rule;
        match self.rule() {
            Rule::Assoc | Rule::Comm if !self.is_truncated() => serde_json::to_value(PresetFile {
                format: "operad-preset".into(),
                name: self.name.clone(),
                cutoff: self.cutoff(),
            })
            .unwrap(),
            Rule::Free(f) if !self.is_truncated() => serde_json::to_value(FreeFile {
                format: "operad-free".into(),
                name: Some(self.name.clone()),
                cutoff: self.cutoff(),
                generators: f.gens.clone(),
            })
            .unwrap(),
            _ => serde_json::to_value(OperadFile::from_table(&self.name, &self.tabulate())).unwrap(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documents_round_trip() {
        let q = CoeffRing::Rationals;
        for o in [Operad::assoc(q, 4), Operad::comm(q, 3).unwrap(), Operad::assoc(q, 3).truncation(2).unwrap()] {
            let v = o.to_json();
            let back = Operad::from_json(&v, q, None).unwrap();
            assert_eq!(back.tabulate(), o.tabulate());
            assert_eq!(back.to_json(), v);
        }
        assert!(Operad::from_json(&Value::String("lie".into()), q, None).is_err());
    }
}
