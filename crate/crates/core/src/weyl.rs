//! Classical Weyl groups as groups of signed permutations.
//!
//! A signed permutation sends the basis vector `e_i` to `signs[i] * e_{perm[i]}`.
//! Type `A_n` lives in `Z^{n+1}` with all signs `+1`; types `B_n` and `C_n`
//! allow every sign pattern; type `D_n` requires an even number of `-1` signs.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::intlinalg::IntMatrix;

/// Default cap on the number of group elements we are willing to walk.
pub const ENUMERATION_THRESHOLD: u128 = 20_000_000;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedPermutation {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl SignedPermutation {
    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        let n = perm.len();
        if signs.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: signs.len(),
            });
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(Error::OutOfRange(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::OutOfRange(format!("{signs:?} are not signs")));
        }
        Ok(Self { perm, signs })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
            signs: vec![1; n],
        }
    }

    /// `-1` on every coordinate.
    pub fn negation(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
            signs: vec![-1; n],
        }
    }

    /// `t_k`: flips the sign of coordinate `k` (1-based).
    pub fn sign_flip(n: usize, k: usize) -> Self {
        assert!((1..=n).contains(&k), "coordinate {k} out of range");
        let mut g = Self::identity(n);
        g.signs[k - 1] = -1;
        g
    }

    /// The cycle `(c_1 c_2 ... c_k)` on 1-based coordinates, all signs `+1`.
    pub fn cycle(n: usize, cycle: &[usize]) -> Self {
        let mut g = Self::identity(n);
        for (i, &c) in cycle.iter().enumerate() {
            let next = cycle[(i + 1) % cycle.len()];
            assert!(c >= 1 && c <= n && next >= 1 && next <= n);
            g.perm[c - 1] = next - 1;
        }
        debug_assert!(Self::new(g.perm.clone(), g.signs.clone()).is_ok());
        g
    }

    /// From signed 1-based images: `images[i] = ±(j+1)` means `e_i -> ±e_j`.
    pub fn from_images(images: &[i64]) -> Result<Self> {
        let perm = images
            .iter()
            .map(|&x| (x.unsigned_abs() as usize).wrapping_sub(1))
            .collect();
        let signs = images.iter().map(|&x| if x < 0 { -1 } else { 1 }).collect();
        Self::new(perm, signs)
    }

    pub fn images(&self) -> Vec<i64> {
        self.perm
            .iter()
            .zip(&self.signs)
            .map(|(&p, &s)| s as i64 * (p as i64 + 1))
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p) && self.signs.iter().all(|&s| s == 1)
    }

    pub fn negative_count(&self) -> usize {
        self.signs.iter().filter(|&&s| s < 0).count()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "dimension");
        let (perm, signs) = (0..self.dim())
            .map(|i| {
                let j = other.perm[i];
                (self.perm[j], other.signs[i] * self.signs[j])
            })
            .unzip();
        Self { perm, signs }
    }

    pub fn inverse(&self) -> Self {
        let n = self.dim();
        let mut perm = vec![0; n];
        let mut signs = vec![1; n];
        for i in 0..n {
            perm[self.perm[i]] = i;
            signs[self.perm[i]] = self.signs[i];
        }
        Self { perm, signs }
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Self::identity(self.dim());
        for _ in 0..k {
            acc = self.compose(&acc);
        }
        acc
    }

    pub fn order(&self) -> usize {
        let mut g = self.clone();
        let mut k = 1;
        while !g.is_identity() {
            g = self.compose(&g);
            k += 1;
        }
        k
    }

    /// `self ∘ other == other ∘ self`, without allocating.
    pub fn commutes_with(&self, other: &Self) -> bool {
        (0..self.dim()).all(|i| {
            let (a, b) = (other.perm[i], self.perm[i]);
            self.perm[a] == other.perm[b]
                && other.signs[i] * self.signs[a] == self.signs[i] * other.signs[b]
        })
    }

    pub fn apply<T>(&self, x: &[T]) -> Vec<T>
    where
        T: Clone + Default + std::ops::Neg<Output = T>,
    {
        assert_eq!(x.len(), self.dim(), "vector length");
        let mut y = vec![T::default(); x.len()];
        for i in 0..x.len() {
            y[self.perm[i]] = if self.signs[i] < 0 {
                -x[i].clone()
            } else {
                x[i].clone()
            };
        }
        y
    }

    /// Matrix acting on column vectors; column `i` is `signs[i] e_{perm[i]}`.
    pub fn matrix(&self) -> IntMatrix {
        let n = self.dim();
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(self.perm[i], i)] = BigInt::from(self.signs[i]);
        }
        m
    }

    /// Lexicographic rank of the underlying permutation (Lehmer code).
    fn perm_rank(&self) -> usize {
        let n = self.dim();
        let mut rank = 0;
        for i in 0..n {
            let smaller = (i + 1..n).filter(|&j| self.perm[j] < self.perm[i]).count();
            rank = rank * (n - i) + smaller;
        }
        rank
    }

    fn sign_mask(&self) -> usize {
        self.signs
            .iter()
            .enumerate()
            .filter(|(_, &s)| s < 0)
            .fold(0, |m, (i, _)| m | (1 << i))
    }
}

impl fmt::Debug for SignedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for SignedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.images().iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

#[derive(Serialize, Deserialize)]
struct SignedPermutationRepr {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl Serialize for SignedPermutation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SignedPermutationRepr {
            perm: self.perm.iter().map(|p| p + 1).collect(),
            signs: self.signs.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SignedPermutation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = SignedPermutationRepr::deserialize(d)?;
        let perm = repr.perm.iter().map(|p| p.wrapping_sub(1)).collect();
        Self::new(perm, repr.signs).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WeylType {
    A,
    B,
    C,
    D,
}

impl WeylType {
    pub fn min_rank(self) -> usize {
        match self {
            WeylType::A => 1,
            WeylType::B | WeylType::C => 2,
            WeylType::D => 4,
        }
    }

    pub fn ambient_dim(self, rank: usize) -> usize {
        match self {
            WeylType::A => rank + 1,
            _ => rank,
        }
    }

    /// Order of a Coxeter element.
    pub fn coxeter_number(self, rank: usize) -> usize {
        match self {
            WeylType::A => rank + 1,
            WeylType::B | WeylType::C => 2 * rank,
            WeylType::D => 2 * (rank - 1),
        }
    }
}

impl fmt::Display for WeylType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for WeylType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" => Ok(WeylType::A),
            "B" => Ok(WeylType::B),
            "C" => Ok(WeylType::C),
            "D" => Ok(WeylType::D),
            _ => Err(Error::OutOfRange(format!("unknown Weyl type {s}"))),
        }
    }
}

/// Simple roots in Bourbaki order.
pub fn simple_roots(kind: WeylType, rank: usize) -> Vec<Vec<i64>> {
    let n = kind.ambient_dim(rank);
    let unit = |i: usize, c: i64| {
        let mut v = vec![0; n];
        v[i] = c;
        v
    };
    let diff = |i: usize| {
        let mut v = vec![0; n];
        v[i] = 1;
        v[i + 1] = -1;
        v
    };
    let mut roots: Vec<Vec<i64>> = (0..rank - 1).map(diff).collect();
    roots.push(match kind {
        WeylType::A => diff(rank - 1),
        WeylType::B => unit(n - 1, 1),
        WeylType::C => unit(n - 1, 2),
        WeylType::D => {
            let mut v = vec![0; n];
            v[n - 2] = 1;
            v[n - 1] = 1;
            v
        }
    });
    roots
}

/// Orthogonal reflection in a root of the given classical system.
pub fn reflection(kind: WeylType, root: &[i64]) -> Result<SignedPermutation> {
    let n = root.len();
    let support: Vec<usize> = (0..n).filter(|&i| root[i] != 0).collect();
    let not_root = || Error::NotARoot(root.to_vec());
    match *support.as_slice() {
        [i, j] => {
            let (a, b) = (root[i], root[j]);
            if a.abs() != 1 || b.abs() != 1 {
                return Err(not_root());
            }
            let mut g = SignedPermutation::identity(n);
            g.perm.swap(i, j);
            if a == b {
                // e_i + e_j: e_i -> -e_j, e_j -> -e_i
                if kind == WeylType::A {
                    return Err(not_root());
                }
                g.signs[i] = -1;
                g.signs[j] = -1;
            }
            Ok(g)
        }
        [i] => {
            let ok = match kind {
                WeylType::B => root[i].abs() == 1,
                WeylType::C => root[i].abs() == 2,
                _ => false,
            };
            if !ok {
                return Err(not_root());
            }
            Ok(SignedPermutation::sign_flip(n, i + 1))
        }
        _ => Err(not_root()),
    }
}

/// Product `w_{α_1} w_{α_2} ... w_{α_n}` of the simple reflections.
pub fn coxeter_element(kind: WeylType, rank: usize) -> Result<SignedPermutation> {
    if rank < kind.min_rank() {
        return Err(Error::OutOfRange(format!(
            "rank {rank} below minimum {} for type {kind}",
            kind.min_rank()
        )));
    }
    let n = kind.ambient_dim(rank);
    simple_roots(kind, rank)
        .iter()
        .try_fold(SignedPermutation::identity(n), |acc, root| {
            Ok(acc.compose(&reflection(kind, root)?))
        })
}

/// The signed `n`-cycle `(x_1, ..., x_n) -> (-x_n, x_1, ..., x_{n-2}, -x_{n-1})`
/// in `W(D_n)`. It has order `n` and fixes `(1, ..., 1, -1)`, so it is not a
/// Coxeter element.
pub fn dn_displayed_cycle(n: usize) -> SignedPermutation {
    assert!(n >= 2);
    let mut images: Vec<i64> = (2..=n as i64).collect();
    images.push(-1);
    images[n - 2] = -(n as i64);
    SignedPermutation::from_images(&images).expect("valid signed cycle")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylGroup {
    kind: WeylType,
    rank: usize,
    generators: Vec<SignedPermutation>,
}

impl WeylGroup {
    pub fn new(kind: WeylType, rank: usize) -> Result<Self> {
        if rank < kind.min_rank() {
            return Err(Error::OutOfRange(format!(
                "rank {rank} below minimum {} for type {kind}",
                kind.min_rank()
            )));
        }
        let generators = simple_roots(kind, rank)
            .iter()
            .map(|r| reflection(kind, r))
            .collect::<Result<_>>()?;
        Ok(Self {
            kind,
            rank,
            generators,
        })
    }

    pub fn kind(&self) -> WeylType {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ambient_dim(&self) -> usize {
        self.kind.ambient_dim(self.rank)
    }

    pub fn generators(&self) -> &[SignedPermutation] {
        &self.generators
    }

    pub fn order(&self) -> u128 {
        let n = self.ambient_dim() as u128;
        let fact: u128 = (1..=n).product();
        match self.kind {
            WeylType::A => fact,
            WeylType::B | WeylType::C => fact << n,
            WeylType::D => fact << (n - 1),
        }
    }

    pub fn contains(&self, g: &SignedPermutation) -> bool {
        g.dim() == self.ambient_dim()
            && match self.kind {
                WeylType::A => g.negative_count() == 0,
                WeylType::B | WeylType::C => true,
                WeylType::D => g.negative_count().is_multiple_of(2),
            }
    }

    fn sign_space(&self) -> usize {
        match self.kind {
            WeylType::A => 1,
            _ => 1 << self.ambient_dim(),
        }
    }

    fn index_space(&self) -> usize {
        let n = self.ambient_dim();
        (1..=n).product::<usize>() * self.sign_space()
    }

    fn index_of(&self, g: &SignedPermutation) -> usize {
        g.perm_rank() * self.sign_space()
            + if self.kind == WeylType::A {
                0
            } else {
                g.sign_mask()
            }
    }

    fn check_size(&self, threshold: u128) -> Result<()> {
        if self.order() > threshold {
            return Err(Error::TooLarge {
                what: "Weyl group",
                size: self.order(),
                threshold,
            });
        }
        Ok(())
    }

    /// Visits every element in ascending order. The callback sees a buffer
    /// that is overwritten between calls.
    pub fn for_each_element(&self, mut f: impl FnMut(&SignedPermutation)) {
        let n = self.ambient_dim();
        let mut g = SignedPermutation::identity(n);
        let masks: Vec<usize> = match self.kind {
            WeylType::A => vec![(1 << n) - 1],
            WeylType::B | WeylType::C => (0..1 << n).collect(),
            WeylType::D => (0..1usize << n)
                .filter(|m| (n - m.count_ones() as usize).is_multiple_of(2))
                .collect(),
        };
        loop {
            for &mask in &masks {
                // bit (n-1-i) clear means sign -1 at i, so masks ascend lexicographically
                for i in 0..n {
                    g.signs[i] = if mask >> (n - 1 - i) & 1 == 1 { 1 } else { -1 };
                }
                f(&g);
            }
            if !next_permutation(&mut g.perm) {
                break;
            }
        }
    }

    /// All elements in ascending order, if there are at most `threshold`.
    pub fn elements(&self, threshold: u128) -> Result<Vec<SignedPermutation>> {
        self.check_size(threshold)?;
        let mut out = Vec::with_capacity(self.order() as usize);
        self.for_each_element(|g| out.push(g.clone()));
        Ok(out)
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..n)
        .rev()
        .find(|&j| p[j] > p[i])
        .expect("successor exists");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// Elements `s` of `group` with `s ∘ (w ∘ f0) = (w ∘ f0) ∘ s`, by exhaustive
/// search. Sorted ascending.
pub fn centralizer_twisted(
    group: &WeylGroup,
    w: &SignedPermutation,
    f0: &SignedPermutation,
    threshold: u128,
) -> Result<Vec<SignedPermutation>> {
    group.check_size(threshold)?;
    let frob = w.compose(f0);
    let mut out = Vec::new();
    group.for_each_element(|s| {
        if s.commutes_with(&frob) {
            out.push(s.clone());
        }
    });
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistedClass {
    pub representative: SignedPermutation,
    pub size: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistedClassTable {
    pub automorphism: SignedPermutation,
    /// Sorted by representative.
    pub classes: Vec<TwistedClass>,
}

impl TwistedClassTable {
    pub fn total(&self) -> u128 {
        self.classes.iter().map(|c| c.size).sum()
    }
}

/// `x · w · F(x)^{-1}` with `F(x) = f0 x f0^{-1}`.
pub fn twisted_conjugate(
    x: &SignedPermutation,
    w: &SignedPermutation,
    f0: &SignedPermutation,
) -> SignedPermutation {
    let fx_inv = f0.compose(&x.inverse()).compose(&f0.inverse());
    x.compose(w).compose(&fx_inv)
}

/// Partition of the group under twisted conjugation by `f0`.
///
/// Orbits are grown from the simple reflections, so the cost is linear in
/// the group order. Each class is represented by its smallest element.
pub fn twisted_conjugacy_classes(
    group: &WeylGroup,
    f0: &SignedPermutation,
    threshold: u128,
) -> Result<TwistedClassTable> {
    group.check_size(threshold)?;
    let f0_conj = |g: &SignedPermutation| f0.compose(g).compose(&f0.inverse());
    if !group.generators.iter().all(|g| group.contains(&f0_conj(g))) {
        return Err(Error::Inconsistent(
            "automorphism does not normalize the Weyl group".into(),
        ));
    }

    let mut visited = vec![0u64; group.index_space().div_ceil(64)];
    let mut mark = |idx: usize| -> bool {
        let (word, bit) = (idx / 64, 1u64 << (idx % 64));
        let fresh = visited[word] & bit == 0;
        visited[word] |= bit;
        fresh
    };

    let mut classes = Vec::new();
    let mut queue = VecDeque::new();
    group.for_each_element(|start| {
        if !mark(group.index_of(start)) {
            return;
        }
        // enumeration is ascending, so the first unvisited element is the
        // smallest of its class
        let representative = start.clone();
        let mut size = 1u128;
        queue.push_back(start.clone());
        while let Some(w) = queue.pop_front() {
            for x in &group.generators {
                let next = twisted_conjugate(x, &w, f0);
                if mark(group.index_of(&next)) {
                    size += 1;
                    queue.push_back(next);
                }
            }
        }
        classes.push(TwistedClass {
            representative,
            size,
        });
    });
    Ok(TwistedClassTable {
        automorphism: f0.clone(),
        classes,
    })
}

/// Subgroup generated by `gens`, sorted ascending.
pub fn generated_subgroup(n: usize, gens: &[SignedPermutation]) -> Vec<SignedPermutation> {
    let mut seen = std::collections::BTreeSet::new();
    let id = SignedPermutation::identity(n);
    seen.insert(id.clone());
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for h in gens {
            let next = h.compose(&g);
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    seen.into_iter().collect()
}
