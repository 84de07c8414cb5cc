//! Plain-text chain complex format.
//!
//! ```text
//! ring Q
//! basis 0 v0 v1
//! basis 1 e
//! diff 1 1 0 1
//! diff 1 0 0 -1
//! ```
//!
//! `basis <deg> <labels…>` lists the cells of one degree (repeatable;
//! labels accumulate). `diff <deg> <row> <col> <value>` is the entry of
//! `d_deg` with `row` indexing the basis of degree `deg − 1` and `col` the
//! basis of degree `deg`. Lines starting with `#` are comments.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::complex::{ChainBuilder, ChainComplex, ChainError};
use crate::exactalg::{CoeffRing, Scalar};

pub fn to_text(c: &ChainComplex) -> String {
    let mut s = String::new();
    writeln!(s, "ring {}", c.ring).unwrap();
    for n in c.support() {
        let labels: Vec<&str> = c.cells_in_degree(n).iter().map(|&i| c.label(i as usize)).collect();
        writeln!(s, "basis {} {}", n, labels.join(" ")).unwrap();
    }
    for n in c.support() {
        for (col, &j) in c.cells_in_degree(n).iter().enumerate() {
            for (i, x) in c.diff(j as usize).iter() {
                writeln!(s, "diff {} {} {} {}", n, c.local_index(i), col, x).unwrap();
            }
        }
    }
    s
}

fn err(line: usize, msg: impl std::fmt::Display) -> ChainError {
    ChainError::Invalid(format!("line {line}: {msg}"))
}

pub fn from_text(text: &str) -> Result<ChainComplex, ChainError> {
    let mut ring: Option<CoeffRing> = None;
    let mut bases: BTreeMap<i32, Vec<String>> = BTreeMap::new();
    let mut diffs: Vec<(usize, i32, usize, usize, Scalar)> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let ln = ln + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("ring") => {
                let r = tok.next().ok_or_else(|| err(ln, "missing ring"))?;
                ring = Some(r.parse().map_err(|e| err(ln, e))?);
            }
            Some("basis") => {
                let d: i32 = tok.next().ok_or_else(|| err(ln, "missing degree"))?.parse().map_err(|e| err(ln, e))?;
                bases.entry(d).or_default().extend(tok.map(String::from));
            }
            Some("diff") => {
                let f: Vec<&str> = tok.collect();
                if f.len() != 4 {
                    return Err(err(ln, "diff needs <deg> <row> <col> <value>"));
                }
                let d: i32 = f[0].parse().map_err(|e| err(ln, e))?;
                let r: usize = f[1].parse().map_err(|e| err(ln, e))?;
                let c: usize = f[2].parse().map_err(|e| err(ln, e))?;
                let v: Scalar = f[3].parse().map_err(|e: crate::exactalg::scalar::ParseScalarError| err(ln, e.0))?;
                diffs.push((ln, d, r, c, v));
            }
            Some(other) => return Err(err(ln, format!("unknown directive `{other}`"))),
            None => {}
        }
    }
    let ring = ring.ok_or_else(|| ChainError::Invalid("missing `ring` line".into()))?;
    let mut b = ChainBuilder::new(ring);
    let mut ids: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (d, labels) in &bases {
        ids.insert(*d, labels.iter().map(|l| b.add_cell(l.clone(), *d)).collect());
    }
    for (ln, d, r, c, v) in diffs {
        let col = ids.get(&d).and_then(|v| v.get(c)).ok_or_else(|| err(ln, "column out of range"))?;
        let row = ids.get(&(d - 1)).and_then(|v| v.get(r)).ok_or_else(|| err(ln, "row out of range"))?;
        let v = ring.try_normalize(v).map_err(|e| err(ln, e))?;
        b.add_diff_term(*col, *row, v);
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::homology::homology;

    #[test]
    fn round_trip() {
        let text = "ring Z\nbasis 0 v\nbasis 1 e\ndiff 1 0 0 2\n";
        let c = from_text(text).unwrap();
        assert_eq!(to_text(&c), text);
        assert_eq!(from_text(&to_text(&c)).unwrap(), c);
        assert_eq!(homology(&c).group(0).torsion.len(), 1);
    }

    #[test]
    fn reports_line() {
        let e = from_text("ring Q\nbasis 0 v\ndiff 1 0 0 1\n").unwrap_err();
        assert!(e.to_string().contains("line 3"));
    }
}
