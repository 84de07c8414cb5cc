//! Unit, associativity and equivariance checks on basis elements.

use serde::Serialize;

use crate::exactalg::{Accumulator, SparseVec};
use crate::symseq::{perm, GeneratorAction};

use super::{Op, Operad};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub pass: bool,
    pub checked: u64,
    pub witness: Option<String>,
}

fn lin_partial(o: &Operad, v: &SparseVec, arity: usize, i: usize, y: Op) -> SparseVec {
    let mut acc = Accumulator::new();
    for (k, c) in v.iter() {
        acc.add_vec(o.ring, c, &o.partial((arity, k as u32), i, y));
    }
    acc.finish()
}

fn lin_partial_right(o: &Operad, x: Op, i: usize, arity: usize, v: &SparseVec) -> SparseVec {
    let mut acc = Accumulator::new();
    for (k, c) in v.iter() {
        acc.add_vec(o.ring, c, &o.partial(x, i, (arity, k as u32)));
    }
    acc.finish()
}

fn act_vec(o: &Operad, arity: usize, v: &SparseVec, sigma: &[usize]) -> SparseVec {
    SparseVec::from_terms(
        o.ring,
        v.iter().map(|(k, c)| {
            let (j, s) = o.act_perm((arity, k as u32), sigma);
            (j as usize, o.ring.mul(c, &o.ring.sign(s)))
        }),
    )
}

fn name(o: &Operad, op: Op) -> String {
    format!("{}[{}]", o.label(op), op.0)
}

struct Checker<'a> {
    o: &'a Operad,
    checked: u64,
}

impl Checker<'_> {
    fn eq(&mut self, a: &SparseVec, b: &SparseVec, what: impl FnOnce() -> String) -> Result<(), String> {
        self.checked += 1;
        if a == b {
            Ok(())
        } else {
            Err(what())
        }
    }
}

/// Checks the monoid axioms through partial compositions within the cutoff,
/// and that full composition agrees with iterated partial compositions.
pub fn check_operad_axioms(o: &Operad) -> AxiomReport {
    let mut ch = Checker { o, checked: 0 };
    let res = run(&mut ch);
    AxiomReport { pass: res.is_ok(), checked: ch.checked, witness: res.err() }
}

fn run(ch: &mut Checker) -> Result<(), String> {
    let o = ch.o;
    o.seq().validate().map_err(|e| format!("action: {e}"))?;
    if !o.is_reduced() {
        return Err("O[0] must vanish".into());
    }
    if o.dim(1) == 0 {
        return Err("missing unit in arity 1".into());
    }
    let r = o.cutoff();
    let u = o.unit();
    let ops = |m: usize| (0..o.dim(m) as u32).map(move |a| (m, a));
    for m in 1..=r {
        for x in ops(m) {
            let e = SparseVec::unit(x.1 as usize);
            ch.eq(&o.partial(u, 0, x), &e, || format!("left unit fails on {}", name(o, x)))?;
            for i in 0..m {
                ch.eq(&o.partial(x, i, u), &e, || format!("right unit fails on {} at input {}", name(o, x), i + 1))?;
            }
        }
    }
    for m in 1..=r {
        for n in 1..=r + 1 - m {
            for p in 1..=r + 2 - m - n {
                for x in ops(m) {
                    for y in ops(n) {
                        for z in ops(p) {
                            for i in 0..m {
                                let xy = o.partial(x, i, y);
                                for j in 0..n {
                                    let lhs = lin_partial(o, &xy, m + n - 1, i + j, z);
                                    let rhs = lin_partial_right(o, x, i, n + p - 1, &o.partial(y, j, z));
                                    ch.eq(&lhs, &rhs, || {
                                        format!(
                                            "sequential associativity fails: ({} ∘_{} {}) ∘_{} {}",
                                            name(o, x),
                                            i + 1,
                                            name(o, y),
                                            i + j + 1,
                                            name(o, z)
                                        )
                                    })?;
                                }
                                for k in i + 1..m {
                                    let lhs = lin_partial(o, &xy, m + n - 1, k + n - 1, z);
                                    let rhs = lin_partial(o, &o.partial(x, k, z), m + p - 1, i, y);
                                    ch.eq(&lhs, &rhs, || {
                                        format!(
                                            "parallel associativity fails: {} with {} at {} and {} at {}",
                                            name(o, x),
                                            name(o, y),
                                            i + 1,
                                            name(o, z),
                                            k + 1
                                        )
                                    })?;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    // Equivariance, on generators of both factors.
    for m in 1..=r {
        for n in 1..=r + 1 - m {
            for x in ops(m) {
                for y in ops(n) {
                    for i in 0..m {
                        let c = o.partial(x, i, y);
                        for g in 0..n.saturating_sub(1) {
                            let (y2, s) = o.act(n, g, y.1);
                            let lhs = o.partial(x, i, (n, y2)).scale(o.ring, &o.ring.sign(s));
                            let rhs = act_vec(o, m + n - 1, &c, &perm::transposition(m + n - 1, g + i));
                            ch.eq(&lhs, &rhs, || format!("equivariance in the inner factor fails: {} ∘_{} {}·s_{}", name(o, x), i + 1, name(o, y), g + 1))?;
                        }
                        for g in 0..m.saturating_sub(1) {
                            let sigma = perm::transposition(m, g);
                            let (x2, s) = o.act(m, g, x.1);
                            let lhs = o.partial((m, x2), i, y).scale(o.ring, &o.ring.sign(s));
                            // γ(x·σ; ys) = γ(x; ys∘σ^{-1})·ℓ^{-1}, ℓ listing the blocks in the new order.
                            let arities: Vec<usize> = (0..m).map(|j| if j == i { n } else { 1 }).collect();
                            let mut offsets = vec![0; m];
                            for j in 1..m {
                                offsets[j] = offsets[j - 1] + arities[j - 1];
                            }
                            let inv = perm::inverse(&sigma);
                            let mut ell = Vec::with_capacity(m + n - 1);
                            for q in 0..m {
                                let j = inv[q];
                                ell.extend(offsets[j]..offsets[j] + arities[j]);
                            }
                            let c2 = o.partial(x, sigma[i], y);
                            let rhs = act_vec(o, m + n - 1, &c2, &perm::inverse(&ell));
                            ch.eq(&lhs, &rhs, || format!("equivariance in the outer factor fails: {}·s_{} ∘_{} {}", name(o, x), g + 1, i + 1, name(o, y)))?;
                        }
                    }
                }
            }
        }
    }
    // Full composition against iterated partials.
    for m in 2..=r {
        for x in ops(m) {
            let mut ys: Vec<Op> = Vec::new();
            check_tuples(ch, x, &mut ys, r)?;
        }
    }
    Ok(())
}

fn check_tuples(ch: &mut Checker, x: Op, ys: &mut Vec<Op>, budget: usize) -> Result<(), String> {
    let o = ch.o;
    let m = x.0;
    if ys.len() == m {
        let full = o.gamma(x, ys);
        let mut cur = SparseVec::unit(x.1 as usize);
        let mut arity = m;
        for j in (0..m).rev() {
            cur = lin_partial(o, &cur, arity, j, ys[j]);
            arity += ys[j].0 - 1;
        }
        return ch.eq(&full, &cur, || {
            let names: Vec<String> = ys.iter().map(|&y| name(o, y)).collect();
            format!("γ({}; {}) differs from iterated partial compositions", name(o, x), names.join(", "))
        });
    }
    let left = m - ys.len() - 1;
    for n in 1..=budget - left {
        for a in 0..o.dim(n) as u32 {
            ys.push((n, a));
            check_tuples(ch, x, ys, budget - n)?;
            ys.pop();
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::CoeffRing;
    use crate::operad::free::FreeOperad;
    use crate::symseq::{Level, SymSeq};

    const Q: CoeffRing = CoeffRing::Rationals;

    #[test]
    fn presets_pass() {
        let a = check_operad_axioms(&Operad::assoc(Q, 4));
        assert!(a.pass, "{:?}", a.witness);
        let c = check_operad_axioms(&Operad::comm(Q, 4).unwrap());
        assert!(c.pass, "{:?}", c.witness);
        let t = check_operad_axioms(&Operad::assoc(Q, 4).truncation(2).unwrap());
        assert!(t.pass, "{:?}", t.witness);
    }

    #[test]
    fn free_operads_pass() {
        let g = SymSeq::concentrated(Q, 4, 2, SymSeq::regular_level(Q, 2)).unwrap();
        let f = Operad::free(&g, 4).unwrap();
        let rep = check_operad_axioms(&f);
        assert!(rep.pass, "{:?}", rep.witness);
        let mut sgn = Level::trivial(crate::chain::ChainComplex::sphere(Q, 0), 2);
        sgn.gens[0][0].1 = -1;
        let g2 = SymSeq::concentrated(Q, 4, 2, sgn).unwrap();
        let f2 = Operad::free(&g2, 4).unwrap();
        let rep = check_operad_axioms(&f2);
        assert!(rep.pass, "{:?}", rep.witness);
        assert_eq!(FreeOperad::new(&g2, 4).unwrap().levels[3].len(), 3);
    }

    #[test]
    fn perturbed_table_fails() {
        let a = Operad::assoc(Q, 3);
        let mut t = a.tabulate();
        assert!(check_operad_axioms(&Operad::from_table("as", t.clone()).unwrap()).pass);
        t.set((2, 2, 0, 0, 0), SparseVec::unit(1));
        let rep = check_operad_axioms(&Operad::from_table("bad", t).unwrap());
        assert!(!rep.pass);
        assert!(rep.witness.is_some());
    }
}
