use std::fmt;

use crate::error::{Error, Result};
use crate::kernel::scalar::Scalar;

/// A permutation of `{0, …, n-1}` stored as a position map: `σ.image(i) = σ(i)`.
///
/// The left action on tensors moves the factor in position `i` to position
/// `σ(i)`: `σ·(x_0 ⊗ … ⊗ x_{n-1}) = ±x_{σ⁻¹(0)} ⊗ … ⊗ x_{σ⁻¹(n-1)}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<usize>);

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.0)
    }
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(Error::Argument(format!("not a permutation: {images:?}")));
            }
            seen[x] = true;
        }
        Ok(Perm(images))
    }

    /// Transposition of positions `i` and `j`.
    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        let mut v: Vec<usize> = (0..n).collect();
        v.swap(i, j);
        Perm(v)
    }

    /// The cycle `i ↦ i + 1 (mod n)`.
    pub fn cycle(n: usize) -> Self {
        Perm((0..n).map(|i| (i + 1) % n).collect())
    }

    /// Order reversal `i ↦ n-1-i`.
    pub fn reversal(n: usize) -> Self {
        Perm((0..n).rev().collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn image(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.len(), other.len());
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x] = i;
        }
        Perm(inv)
    }

    pub fn pow(&self, k: usize) -> Perm {
        (0..k).fold(Perm::identity(self.len()), |acc, _| self.compose(&acc))
    }

    /// Number of inversions mod 2.
    pub fn parity(&self) -> i64 {
        let n = self.len();
        let mut p = 0;
        for i in 0..n {
            for j in i + 1..n {
                if self.0[i] > self.0[j] {
                    p ^= 1;
                }
            }
        }
        p
    }

    /// `sgn(σ)` as `±1`.
    pub fn sgn(&self) -> Scalar {
        Scalar::sign(self.parity())
    }

    /// `σ·x`: the entry at position `i` moves to position `σ(i)`.
    pub fn act<T: Clone>(&self, xs: &[T]) -> Vec<T> {
        assert_eq!(xs.len(), self.len());
        let mut out: Vec<Option<T>> = vec![None; xs.len()];
        for (i, x) in xs.iter().enumerate() {
            out[self.0[i]] = Some(x.clone());
        }
        out.into_iter().map(|x| x.expect("bijective")).collect()
    }

    /// `(x_{σ(0)}, …, x_{σ(n-1)})`, i.e. `σ⁻¹·x`; the superscript
    /// reading `r^{σ(1)…σ(n)}`.
    pub fn pull<T: Clone>(&self, xs: &[T]) -> Vec<T> {
        assert_eq!(xs.len(), self.len());
        self.0.iter().map(|&i| xs[i].clone()).collect()
    }
}

/// Parity of the Koszul sign `ε(σ; x)` of `σ·x`: every pair whose relative
/// order flips contributes `|x_i||x_j|`.
pub fn koszul_parity(sigma: &Perm, degrees: &[i64]) -> i64 {
    let n = sigma.len();
    let mut e = 0;
    for i in 0..n {
        if degrees[i] & 1 == 0 {
            continue;
        }
        for j in i + 1..n {
            if degrees[j] & 1 == 1 && sigma.image(i) > sigma.image(j) {
                e ^= 1;
            }
        }
    }
    e
}

/// `ε(σ; x_1, …, x_n)` as `±1`.
pub fn koszul_sign(sigma: &Perm, degrees: &[i64]) -> Result<Scalar> {
    if sigma.len() != degrees.len() {
        return Err(Error::Argument(format!("permutation of size {} against {} degrees", sigma.len(), degrees.len())));
    }
    Ok(Scalar::sign(koszul_parity(sigma, degrees)))
}

/// `χ(σ; x) = ε(σ; x)·sgn(σ)` as a parity.
pub fn chi_parity(sigma: &Perm, degrees: &[i64]) -> i64 {
    koszul_parity(sigma, degrees) ^ sigma.parity()
}

/// Parity of the Koszul sign for reordering `xs` into `(xs[order[0]], xs[order[1]], …)`.
pub fn reorder_parity(order: &[usize], degrees: &[i64]) -> i64 {
    let mut e = 0;
    for a in 0..order.len() {
        for b in a + 1..order.len() {
            if order[a] > order[b] && degrees[order[a]] & 1 == 1 && degrees[order[b]] & 1 == 1 {
                e ^= 1;
            }
        }
    }
    e
}

/// Ordered compositions of `n` into positive parts, in lexicographic order.
pub fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All `(i_1, …, i_r)`-shuffles: `σ` is increasing on each consecutive block
/// of its domain, listed in lexicographic order of image sequences.
pub fn enumerate_shuffles(blocks: &[usize]) -> Vec<Perm> {
    let n: usize = blocks.iter().sum();
    let mut out = Vec::new();
    let mut images = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(
        blocks: &[usize],
        block: usize,
        filled: usize,
        last: Option<usize>,
        images: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Perm>,
    ) {
        if block == blocks.len() {
            out.push(Perm(images.clone()));
            return;
        }
        if filled == blocks[block] {
            rec(blocks, block + 1, 0, None, images, used, out);
            return;
        }
        let start = last.map_or(0, |l| l + 1);
        for v in start..used.len() {
            if !used[v] {
                used[v] = true;
                images.push(v);
                rec(blocks, block, filled + 1, Some(v), images, used, out);
                images.pop();
                used[v] = false;
            }
        }
    }
    rec(blocks, 0, 0, None, &mut images, &mut used, &mut out);
    out
}

/// The powers `c^0, …, c^{n-1}` of the cycle `c = (1 2 … n)`.
pub fn cyclic_group(n: usize) -> Result<Vec<Perm>> {
    if n < 1 {
        return Err(Error::Argument("cyclic group needs n ≥ 1".into()));
    }
    let c = Perm::cycle(n);
    Ok((0..n).map(|k| c.pow(k)).collect())
}

/// All of `S_n`, in lexicographic order.
pub fn symmetric_group(n: usize) -> Vec<Perm> {
    enumerate_shuffles(&vec![1; n])
}

/// Adjacent transpositions generating `S_n`.
pub fn adjacent_transpositions(n: usize) -> Vec<Perm> {
    (0..n.saturating_sub(1)).map(|i| Perm::transposition(n, i, i + 1)).collect()
}

/// `σ̃ ∈ S_{2n}` from `σ ∈ S_n`: pairs of slots move together,
/// `σ̃(2i) = 2σ(i)`, `σ̃(2i-1) = 2σ(i)-1` (one-based).
pub fn doubled(sigma: &Perm) -> Perm {
    let mut v = Vec::with_capacity(2 * sigma.len());
    for i in 0..sigma.len() {
        let s = sigma.image(i);
        v.push(2 * s);
        v.push(2 * s + 1);
    }
    Perm(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(0), vec![Vec::<usize>::new()]);
        assert_eq!(compositions(3), vec![vec![1, 1, 1], vec![1, 2], vec![2, 1], vec![3]]);
        assert_eq!(compositions(6).len(), 32);
    }
    use proptest::prelude::*;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    /// Independent oracle: write σ as a product of adjacent swaps by bubble
    /// sorting the target positions and multiply the pairwise swap signs.
    fn bubble_sign(sigma: &Perm, degrees: &[i64]) -> i64 {
        let mut pos: Vec<usize> = sigma.images().to_vec();
        let mut deg: Vec<i64> = degrees.to_vec();
        let mut sign = 1;
        for _ in 0..pos.len() {
            for k in 0..pos.len().saturating_sub(1) {
                if pos[k] > pos[k + 1] {
                    if deg[k] % 2 != 0 && deg[k + 1] % 2 != 0 {
                        sign = -sign;
                    }
                    pos.swap(k, k + 1);
                    deg.swap(k, k + 1);
                }
            }
        }
        sign
    }

    #[test]
    fn koszul_small_cases() {
        let id = Perm::identity(2);
        assert!(koszul_sign(&id, &[1, 1]).unwrap().is_one());
        let t = Perm::transposition(2, 0, 1);
        assert_eq!(koszul_sign(&t, &[1, 1]).unwrap(), -Scalar::one());
        assert!(koszul_sign(&t, &[1]).is_err());
    }

    #[test]
    fn koszul_three_cycle_matches_bubble_oracle() {
        let c = Perm::cycle(3);
        let degs = [1, 1, 0];
        assert_eq!(koszul_sign(&c, &degs).unwrap(), Scalar::from_int(bubble_sign(&c, &degs)));
        // c moves x_1 to slot 2, x_2 to slot 3, x_3 to slot 1: x_3 (even)
        // passes both odd factors, the odd pair keeps its order.
        assert!(koszul_sign(&c, &degs).unwrap().is_one());
    }

    #[test]
    fn shuffle_counts() {
        assert_eq!(enumerate_shuffles(&[1, 1]).len(), 2);
        assert_eq!(enumerate_shuffles(&[2, 0]), vec![Perm::identity(2)]);
        assert_eq!(enumerate_shuffles(&[2, 1]).len(), 3);
        for n in 0..=6 {
            for i in 0..=n {
                assert_eq!(enumerate_shuffles(&[i, n - i]).len(), binom(n, i));
            }
        }
    }

    #[test]
    fn shuffles_match_brute_force_filter() {
        let blocks = [2, 1, 2];
        let brute: Vec<Perm> = symmetric_group(5)
            .into_iter()
            .filter(|s| {
                let im = s.images();
                im[0] < im[1] && im[3] < im[4]
            })
            .collect();
        let mut got = enumerate_shuffles(&blocks);
        got.sort();
        let mut want = brute;
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn cyclic_group_parities() {
        assert!(cyclic_group(0).is_err());
        assert_eq!(cyclic_group(1).unwrap(), vec![Perm::identity(1)]);
        let c2 = cyclic_group(2).unwrap();
        assert_eq!(c2[1], Perm::transposition(2, 0, 1));
        for s in cyclic_group(3).unwrap() {
            assert!(s.sgn().is_one());
        }
        let c4: Vec<i64> = cyclic_group(4).unwrap().iter().map(|s| s.parity()).collect();
        assert_eq!(c4, vec![0, 1, 0, 1]);
    }

    #[test]
    fn act_and_pull_are_inverse() {
        let s = Perm::from_images(vec![2, 0, 1]).unwrap();
        let xs = ['a', 'b', 'c'];
        assert_eq!(s.act(&xs), vec!['b', 'c', 'a']);
        assert_eq!(s.inverse().pull(&s.act(&xs)).len(), 3);
        assert_eq!(s.pull(&s.act(&xs)), xs.to_vec());
    }

    #[test]
    fn doubled_pairs() {
        let t = Perm::transposition(2, 0, 1);
        assert_eq!(doubled(&t).images(), &[2, 3, 0, 1]);
    }

    fn perm_strategy(n: usize) -> impl Strategy<Value = Perm> {
        Just((0..n).collect::<Vec<usize>>()).prop_shuffle().prop_map(Perm)
    }

    proptest! {
        #[test]
        fn koszul_agrees_with_bubble(p in perm_strategy(5), d in prop::collection::vec(-3i64..4, 5)) {
            prop_assert_eq!(koszul_sign(&p, &d).unwrap(), Scalar::from_int(bubble_sign(&p, &d)));
        }

        #[test]
        fn koszul_invariant_under_even_shift(p in perm_strategy(4), d in prop::collection::vec(-3i64..4, 4), k in 0usize..4) {
            let mut e = d.clone();
            e[k] += 2;
            prop_assert_eq!(koszul_parity(&p, &d), koszul_parity(&p, &e));
        }
    }

    /// Cocycle: ε(στ; x) = ε(σ; τ·x) ε(τ; x), exhaustively for n ≤ 4.
    #[test]
    fn koszul_cocycle_exhaustive() {
        for n in 0..=4 {
            let group = symmetric_group(n);
            for bits in 0..(1u32 << n) {
                let d: Vec<i64> = (0..n).map(|k| ((bits >> k) & 1) as i64).collect();
                for s in &group {
                    for t in &group {
                        let lhs = koszul_parity(&s.compose(t), &d);
                        let rhs = koszul_parity(s, &t.act(&d)) ^ koszul_parity(t, &d);
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }
}
