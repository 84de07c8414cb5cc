//! Free operads on reduced generators, with a basis of trees whose children
//! are ordered by their least leaf.

use std::collections::HashMap;

use crate::exactalg::CoeffRing;
use crate::symseq::{GeneratorAction, Level, SymSeq};
use crate::chain::ChainBuilder;

use super::OperadError;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tree {
    Leaf(u8),
    /// Generator `(arity, cell)` and its children.
    Node(u8, u32, Vec<Tree>),
}

impl Tree {
    pub fn min_leaf(&self) -> u8 {
        match self {
            Tree::Leaf(l) => *l,
            Tree::Node(_, _, kids) => kids.iter().map(Tree::min_leaf).min().unwrap_or(u8::MAX),
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Tree::Leaf(_) => 1,
            Tree::Node(_, _, kids) => kids.iter().map(Tree::arity).sum(),
        }
    }

    pub fn height(&self) -> usize {
        match self {
            Tree::Leaf(_) => 0,
            Tree::Node(_, _, kids) => 1 + kids.iter().map(Tree::height).max().unwrap_or(0),
        }
    }

    fn relabel(&self, f: &dyn Fn(u8) -> u8) -> Tree {
        match self {
            Tree::Leaf(l) => Tree::Leaf(f(*l)),
            Tree::Node(t, a, kids) => Tree::Node(*t, *a, kids.iter().map(|k| k.relabel(f)).collect()),
        }
    }

    /// Replaces leaf `j` by `subs[j]`, whose leaves are shifted by `offsets[j]`.
    fn substitute(&self, subs: &[Tree], offsets: &[u8]) -> Tree {
        match self {
            Tree::Leaf(l) => {
                let off = offsets[*l as usize];
                subs[*l as usize].relabel(&|x| x + off)
            }
            Tree::Node(t, a, kids) => Tree::Node(*t, *a, kids.iter().map(|k| k.substitute(subs, offsets)).collect()),
        }
    }

    fn label(&self, gens: &SymSeq) -> String {
        match self {
            Tree::Leaf(l) => (l + 1).to_string(),
            Tree::Node(t, a, kids) => {
                let g = gens.level(*t as usize).unwrap().complex.label(*a as usize);
                let k: Vec<String> = kids.iter().map(|k| k.label(gens)).collect();
                format!("{g}({})", k.join(","))
            }
        }
    }
}

/// Sorts children by least leaf bottom-up, acting on generators; returns the
/// sign picked up.
fn canonical(gens: &SymSeq, tree: Tree) -> (Tree, i8) {
    match tree {
        Tree::Leaf(l) => (Tree::Leaf(l), 1),
        Tree::Node(t, mut a, kids) => {
            let mut sign = 1i8;
            let mut kids: Vec<Tree> = kids
                .into_iter()
                .map(|k| {
                    let (k, s) = canonical(gens, k);
                    sign *= s;
                    k
                })
                .collect();
            for j in 1..kids.len() {
                let mut i = j;
                while i > 0 && kids[i - 1].min_leaf() > kids[i].min_leaf() {
                    let (a2, s) = gens.act(t as usize, i - 1, a);
                    a = a2;
                    sign *= s;
                    kids.swap(i - 1, i);
                    i -= 1;
                }
            }
            (Tree::Node(t, a, kids), sign)
        }
    }
}

#[derive(Clone, Debug)]
pub struct FreeOperad {
    pub gens: SymSeq,
    pub levels: Vec<Vec<Tree>>,
    index: Vec<HashMap<Tree, u32>>,
    /// Least colimit stage after which each level no longer changes.
    pub stable_stage: Vec<usize>,
}

fn set_partitions(elems: &[u8], blocks: usize) -> Vec<Vec<Vec<u8>>> {
    // Blocks are listed by least element.
    fn rec(elems: &[u8], i: usize, cur: &mut Vec<Vec<u8>>, k: usize, out: &mut Vec<Vec<Vec<u8>>>) {
        if i == elems.len() {
            if cur.len() == k {
                out.push(cur.clone());
            }
            return;
        }
        if cur.len() + (elems.len() - i) < k {
            return;
        }
        for b in 0..cur.len() {
            cur[b].push(elems[i]);
            rec(elems, i + 1, cur, k, out);
            cur[b].pop();
        }
        if cur.len() < k {
            cur.push(vec![elems[i]]);
            rec(elems, i + 1, cur, k, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(elems, 0, &mut Vec::new(), blocks, &mut out);
    out
}

impl FreeOperad {
    pub fn new(gens: &SymSeq, cutoff: usize) -> Result<Self, OperadError> {
        if gens.dim(0) > 0 || gens.dim(1) > 0 {
            return Err(OperadError::Invalid("free operads need generators in arities ≥ 2".into()));
        }
        for (r, l) in gens.levels() {
            if l.complex.support().any(|d| d != 0) || l.complex.diffs().iter().any(|d| !d.is_empty()) {
                return Err(OperadError::Invalid(format!("generators in arity {r} must sit in degree 0")));
            }
        }
        if cutoff > 12 {
            return Err(OperadError::Invalid("free operad cutoff above 12 is not supported".into()));
        }
        let mut memo: HashMap<Vec<u8>, Vec<Tree>> = HashMap::new();
        fn trees(gens: &SymSeq, leaves: &[u8], memo: &mut HashMap<Vec<u8>, Vec<Tree>>) -> Vec<Tree> {
            if leaves.len() == 1 {
                return vec![Tree::Leaf(leaves[0])];
            }
            // Shapes depend only on the size; relabel a standard set.
            let n = leaves.len();
            let std: Vec<u8> = (0..n as u8).collect();
            if !memo.contains_key(&std) {
                let mut out = Vec::new();
                for (t, l) in gens.levels() {
                    if t < 2 || t > n {
                        continue;
                    }
                    for part in set_partitions(&std, t) {
                        let subs: Vec<Vec<Tree>> = part.iter().map(|b| trees(gens, b, memo)).collect();
                        let mut idx = vec![0usize; t];
                        'outer: loop {
                            let kids: Vec<Tree> = idx.iter().zip(&subs).map(|(&i, s)| s[i].clone()).collect();
                            for a in 0..l.len() as u32 {
                                out.push(Tree::Node(t as u8, a, kids.clone()));
                            }
                            let mut k = t;
                            while k > 0 {
                                k -= 1;
                                idx[k] += 1;
                                if idx[k] < subs[k].len() {
                                    continue 'outer;
                                }
                                idx[k] = 0;
                            }
                            break;
                        }
                    }
                }
                memo.insert(std.clone(), out);
            }
            memo[&std].iter().map(|tr| tr.relabel(&|x| leaves[x as usize])).collect()
        }
        let mut levels = vec![Vec::new(); cutoff + 1];
        let mut stable_stage = vec![0; cutoff + 1];
        for r in 1..=cutoff {
            let leaves: Vec<u8> = (0..r as u8).collect();
            let mut ts = trees(gens, &leaves, &mut memo);
            ts.sort();
            stable_stage[r] = ts.iter().map(Tree::height).max().unwrap_or(0);
            levels[r] = ts;
        }
        let index = levels.iter().map(|l| l.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect()).collect();
        Ok(FreeOperad { gens: gens.clone(), levels, index, stable_stage })
    }

    pub fn cutoff(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn lookup(&self, tree: Tree) -> (u32, i8) {
        let (t, s) = canonical(&self.gens, tree);
        let r = t.arity();
        (self.index[r][&t], s)
    }

    pub fn act(&self, r: usize, i: usize, x: u32) -> (u32, i8) {
        let swap = |l: u8| if l as usize == i { l + 1 } else if l as usize == i + 1 { l - 1 } else { l };
        self.lookup(self.levels[r][x as usize].relabel(&swap))
    }

    /// `γ(x; y_1, …, y_t)`, a signed basis element.
    pub fn compose(&self, x: (usize, u32), ys: &[(usize, u32)]) -> (u32, i8) {
        let subs: Vec<Tree> = ys.iter().map(|&(r, y)| self.levels[r][y as usize].clone()).collect();
        let mut offsets = Vec::with_capacity(ys.len());
        let mut off = 0u8;
        for &(r, _) in ys {
            offsets.push(off);
            off += r as u8;
        }
        self.lookup(self.levels[x.0][x.1 as usize].substitute(&subs, &offsets))
    }

    pub fn seq(&self, ring: CoeffRing) -> SymSeq {
        let mut s = SymSeq::zero(ring, self.cutoff());
        for r in 1..=self.cutoff() {
            if self.levels[r].is_empty() {
                continue;
            }
            let mut b = ChainBuilder::new(ring);
            for t in &self.levels[r] {
                b.add_cell(t.label(&self.gens), 0);
            }
            let gens = (0..r - 1)
                .map(|i| (0..self.levels[r].len() as u32).map(|x| self.act(r, i, x)).collect())
                .collect();
            s.insert_level(r, Level { complex: b.build_unchecked(), gens }).expect("free operad levels are valid");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::ChainComplex;

    #[test]
    fn binary_trees() {
        let q = CoeffRing::Rationals;
        let g = SymSeq::concentrated(q, 5, 2, Level::trivial(ChainComplex::sphere(q, 0), 2)).unwrap();
        let f = FreeOperad::new(&g, 5).unwrap();
        let dims: Vec<usize> = f.levels.iter().map(Vec::len).collect();
        // (2r−3)!! binary trees with labelled leaves.
        assert_eq!(dims, vec![0, 1, 1, 3, 15, 105]);
        assert_eq!(f.stable_stage[4], 3);
        let empty = FreeOperad::new(&SymSeq::zero(q, 4), 4).unwrap();
        assert_eq!(empty.levels.iter().map(Vec::len).collect::<Vec<_>>(), vec![0, 1, 0, 0, 0]);
    }

    #[test]
    fn rejects_arity_one_generators() {
        let q = CoeffRing::Rationals;
        let g = SymSeq::concentrated(q, 3, 1, Level::trivial(ChainComplex::sphere(q, 0), 1)).unwrap();
        assert!(FreeOperad::new(&g, 3).is_err());
    }
}
