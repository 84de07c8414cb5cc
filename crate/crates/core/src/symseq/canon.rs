//! Normal forms in coinvariants `A[t] ⊗_{Σ_t} (y_1 ⊗ ⋯ ⊗ y_t)`.
//!
//! `A[t]` carries a right action of `Σ_t` by signed permutations of its
//! basis. Swapping adjacent factors gives
//! `(a; …, y_i, y_{i+1}, …) = ε · (a·s_i; …, y_{i+1}, y_i, …)` with
//! `ε = (−1)^{|y_i||y_{i+1}|}`. A normal form sorts the factors by key and
//! then picks the least basis element in the orbit of the stabilizer of the
//! sorted tuple.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

/// Signed action of adjacent transpositions on the basis of each arity.
pub trait GeneratorAction {
    fn level_len(&self, t: usize) -> usize;
    /// `a·s_i` where `s_i` swaps inputs `i` and `i+1` (0-based) in arity `t`.
    fn act(&self, t: usize, i: usize, a: u32) -> (u32, i8);
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Canon {
    Term(u32, i8),
    /// The element equals its own negative.
    Zero,
}

impl Canon {
    pub fn times(self, s: i8) -> Canon {
        match self {
            Canon::Term(b, t) => Canon::Term(b, s * t),
            Canon::Zero => Canon::Zero,
        }
    }
}

/// Runs of equal sorted factors: `(start, length, odd)`.
pub type Blocks = Vec<(u16, u16, bool)>;

/// Orbits of a Young subgroup on one arity: the normal form of every basis
/// element and the list of orbit minima that survive.
#[derive(Debug)]
pub struct OrbitTable {
    pub canon: Vec<Canon>,
    pub reps: Vec<u32>,
}

#[derive(Debug, Default)]
pub struct Canonicalizer {
    signs_matter: bool,
    cache: RwLock<HashMap<(usize, Blocks), Arc<OrbitTable>>>,
}

impl Clone for Canonicalizer {
    fn clone(&self) -> Self {
        Canonicalizer { signs_matter: self.signs_matter, cache: RwLock::new(self.cache.read().unwrap().clone()) }
    }
}

pub fn blocks_of<K: Eq>(items: &[(K, bool)]) -> Blocks {
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let mut j = i + 1;
        while j < items.len() && items[j].0 == items[i].0 {
            j += 1;
        }
        if j - i > 1 {
            blocks.push((i as u16, (j - i) as u16, items[i].1));
        }
        i = j;
    }
    blocks
}

/// Sorts `items` by adjacent swaps, returning `(a', sign)` with
/// `(a; items_before) = sign · (a'; items_after)`.
pub fn sort_items<K: Ord>(act: &dyn GeneratorAction, t: usize, a: u32, items: &mut [(K, bool)]) -> (u32, i8) {
    let mut a = a;
    let mut sign: i8 = 1;
    for j in 1..items.len() {
        let mut i = j;
        while i > 0 && items[i - 1].0 > items[i].0 {
            let (a2, s) = act.act(t, i - 1, a);
            let eps = if items[i - 1].1 && items[i].1 { -1 } else { 1 };
            a = a2;
            sign *= s * eps;
            items.swap(i - 1, i);
            i -= 1;
        }
    }
    (a, sign)
}

impl Canonicalizer {
    pub fn new(signs_matter: bool) -> Self {
        Canonicalizer { signs_matter, cache: RwLock::new(HashMap::new()) }
    }

    /// Sorts `items` (key, odd-degree flag) in place and returns the
    /// normal form of `(a; items)` relative to the sorted tuple.
    pub fn canonicalize<K: Ord + Eq>(
        &self,
        act: &dyn GeneratorAction,
        t: usize,
        a: u32,
        items: &mut [(K, bool)],
    ) -> Canon {
        debug_assert_eq!(items.len(), t);
        let (a, sign) = sort_items(act, t, a, items);
        let blocks = blocks_of(items);
        if blocks.is_empty() {
            return Canon::Term(a, sign);
        }
        self.table(act, t, blocks).canon[a as usize].times(sign)
    }

    /// The orbit table of the stabilizer described by `blocks`.
    pub fn table(&self, act: &dyn GeneratorAction, t: usize, blocks: Blocks) -> Arc<OrbitTable> {
        let key = (t, blocks);
        if let Some(c) = self.cache.read().unwrap().get(&key) {
            return c.clone();
        }
        let table = Arc::new(self.orbits(act, t, &key.1));
        self.cache.write().unwrap().insert(key, table.clone());
        table
    }

    fn orbits(&self, act: &dyn GeneratorAction, t: usize, blocks: &[(u16, u16, bool)]) -> OrbitTable {
        let n = act.level_len(t);
        let gens: Vec<(usize, bool)> = blocks
            .iter()
            .flat_map(|&(s, l, odd)| (s as usize..(s + l - 1) as usize).map(move |i| (i, odd)))
            .collect();
        let mut canon = vec![Canon::Zero; n];
        let mut seen = vec![false; n];
        let mut reps = Vec::new();
        // `val[b]`: (b; y) = val · (start; y).
        let mut val: Vec<i8> = vec![0; n];
        for start in 0..n as u32 {
            if seen[start as usize] {
                continue;
            }
            seen[start as usize] = true;
            val[start as usize] = 1;
            let mut orbit = vec![start];
            let mut zero = false;
            let mut i = 0;
            while i < orbit.len() {
                let a = orbit[i];
                let v = val[a as usize];
                for &(g, odd) in &gens {
                    let (b, s) = act.act(t, g, a);
                    // (a; y) = ε s (b; y)  ⇒  (b; y) = ε s v (start; y).
                    let w = v * s * if odd { -1 } else { 1 };
                    if seen[b as usize] {
                        if val[b as usize] != w && self.signs_matter {
                            zero = true;
                        }
                    } else {
                        seen[b as usize] = true;
                        val[b as usize] = w;
                        orbit.push(b);
                    }
                }
                i += 1;
            }
            // Orbits are discovered from their least element.
            if !zero {
                reps.push(start);
                for &b in &orbit {
                    canon[b as usize] = Canon::Term(start, val[b as usize]);
                }
            }
        }
        OrbitTable { canon, reps }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Trivial;
    impl GeneratorAction for Trivial {
        fn level_len(&self, _t: usize) -> usize {
            1
        }
        fn act(&self, _t: usize, _i: usize, a: u32) -> (u32, i8) {
            (a, 1)
        }
    }

    struct Regular2;
    impl GeneratorAction for Regular2 {
        fn level_len(&self, _t: usize) -> usize {
            2
        }
        fn act(&self, _t: usize, _i: usize, a: u32) -> (u32, i8) {
            (1 - a, 1)
        }
    }

    #[test]
    fn graded_commutativity() {
        let c = Canonicalizer::new(true);
        let mut odd = [(3u32, true), (3, true)];
        assert_eq!(c.canonicalize(&Trivial, 2, 0, &mut odd), Canon::Zero);
        let mut swapped = [(5u32, true), (3, true)];
        assert_eq!(c.canonicalize(&Trivial, 2, 0, &mut swapped), Canon::Term(0, -1));
        let c2 = Canonicalizer::new(false);
        let mut odd = [(3u32, true), (3, true)];
        assert_eq!(c2.canonicalize(&Trivial, 2, 0, &mut odd), Canon::Term(0, 1));
    }

    #[test]
    fn regular_orbit() {
        let c = Canonicalizer::new(true);
        let mut same = [(1u32, true), (1, true)];
        assert_eq!(c.canonicalize(&Regular2, 2, 1, &mut same), Canon::Term(0, -1));
        let t = c.table(&Regular2, 2, vec![(0, 2, true)]);
        assert_eq!(t.reps, vec![0]);
    }
}
