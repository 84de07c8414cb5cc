//! Permutations in one-line notation, 0-based: `p[i] = σ(i)`.
//!
//! The symmetric groups act on the right, `x·(στ) = (x·σ)·τ`, with
//! `(στ)(i) = σ(τ(i))`.

pub type Perm = Vec<usize>;

pub fn identity(n: usize) -> Perm {
    (0..n).collect()
}

pub fn compose(s: &[usize], t: &[usize]) -> Perm {
    t.iter().map(|&i| s[i]).collect()
}

pub fn inverse(s: &[usize]) -> Perm {
    let mut inv = vec![0; s.len()];
    for (i, &j) in s.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

/// The adjacent transposition swapping `i` and `i+1` in `Σ_n`.
pub fn transposition(n: usize, i: usize) -> Perm {
    let mut p = identity(n);
    p.swap(i, i + 1);
    p
}

pub fn sign(s: &[usize]) -> i8 {
    let mut inv = 0usize;
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            if s[i] > s[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 { 1 } else { -1 }
}

/// A reduced word `w` with `σ = s_{w[0]} s_{w[1]} ⋯`, so the right action of
/// `σ` is applying `s_{w[0]}` first.
pub fn reduced_word(s: &[usize]) -> Vec<usize> {
    let mut p = s.to_vec();
    let mut rev = Vec::new();
    loop {
        // σ = (σ s_j) s_j; peel descents off the right.
        let Some(j) = (0..p.len().saturating_sub(1)).find(|&j| p[j] > p[j + 1]) else { break };
        p.swap(j, j + 1);
        rev.push(j);
    }
    rev.reverse();
    rev
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Lehmer-code rank in lexicographic order.
pub fn rank(s: &[usize]) -> usize {
    let n = s.len();
    let mut r = 0;
    for i in 0..n {
        let smaller = s[i + 1..].iter().filter(|&&x| x < s[i]).count();
        r = r * (n - i) + smaller;
    }
    r
}

pub fn unrank(n: usize, mut r: usize) -> Perm {
    let mut digits = vec![0; n];
    for i in (0..n).rev() {
        let base = n - i;
        digits[i] = r % base;
        r /= base;
    }
    let mut pool: Vec<usize> = (0..n).collect();
    digits.iter().map(|&d| pool.remove(d)).collect()
}

/// All permutations of `n` in rank order.
pub fn all(n: usize) -> Vec<Perm> {
    (0..factorial(n)).map(|r| unrank(n, r)).collect()
}

/// Position ranks of a list of distinct keys: `ρ(i)` = number of keys below `keys[i]`.
pub fn ranks_of<T: Ord>(keys: &[T]) -> Perm {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    inverse(&idx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lehmer_round_trip() {
        for n in 0..6 {
            for r in 0..factorial(n) {
                assert_eq!(rank(&unrank(n, r)), r);
            }
        }
        assert_eq!(unrank(3, 0), vec![0, 1, 2]);
        assert_eq!(unrank(3, 5), vec![2, 1, 0]);
    }

    proptest! {
        #[test]
        fn reduced_word_multiplies_back(r in 0usize..5040) {
            let s = unrank(7, r);
            let w = reduced_word(&s);
            let mut p = identity(7);
            for &j in &w {
                p = compose(&p, &transposition(7, j));
            }
            prop_assert_eq!(&p, &s);
            prop_assert_eq!(if w.len() % 2 == 0 { 1 } else { -1 }, sign(&s));
        }
    }
}
