//! Permutations and perfect pairings on the signed ground set
//! `{1,...,n, 1^,...,n^}` (non-hat and hat numbers).
//!
//! Encoding: the non-hat number `i` is the signed integer `+i`, the hat
//! number `i^` is `-i`. Internally points live in a dense index space
//! `0..2n` ordered `1 < 1^ < 2 < 2^ < ...`, which is also the order used for
//! "smallest point" and lexicographic tie-breaks everywhere in the crate.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::{map_reduce, Exec};
use crate::partitions::{Partition, PartitionError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("permutations act on different ground sets")]
    SizeMismatch,
    #[error("image is not a bijection on the 2n points")]
    NotBijective,
    #[error("point {0} out of range")]
    PointRange(i32),
    #[error("not a fixed-point-free involution")]
    NotPairing,
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// Dense index of a signed point, `1 -> 0`, `1^ -> 1`, `2 -> 2`, ...
pub fn point_to_index(p: i32) -> usize {
    debug_assert!(p != 0);
    if p > 0 {
        2 * (p as usize - 1)
    } else {
        2 * ((-p) as usize - 1) + 1
    }
}

/// Inverse of [`point_to_index`].
pub fn index_to_point(idx: usize) -> i32 {
    let i = (idx / 2 + 1) as i32;
    if idx % 2 == 0 {
        i
    } else {
        -i
    }
}

/// A permutation of the `2n` signed points.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    n: usize,
    img: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            n,
            img: (0..2 * n as u32).collect(),
        }
    }

    pub fn from_images(n: usize, img: Vec<u32>) -> Result<Self, PermError> {
        if img.len() != 2 * n {
            return Err(PermError::NotBijective);
        }
        let mut seen = vec![false; 2 * n];
        for &t in &img {
            let t = t as usize;
            if t >= 2 * n || seen[t] {
                return Err(PermError::NotBijective);
            }
            seen[t] = true;
        }
        Ok(Permutation { n, img })
    }

    /// Build from a list of cycles of signed points; points not mentioned are
    /// fixed.
    pub fn from_cycles(n: usize, cycles: &[Vec<i32>]) -> Result<Self, PermError> {
        let mut img: Vec<u32> = (0..2 * n as u32).collect();
        let mut seen = vec![false; 2 * n];
        for cycle in cycles {
            for window in 0..cycle.len() {
                let a = cycle[window];
                let b = cycle[(window + 1) % cycle.len()];
                for p in [a, b] {
                    if p == 0 || p.unsigned_abs() as usize > n {
                        return Err(PermError::PointRange(p));
                    }
                }
                let ia = point_to_index(a);
                if seen[ia] {
                    return Err(PermError::NotBijective);
                }
                seen[ia] = true;
                img[ia] = point_to_index(b) as u32;
            }
        }
        Permutation::from_images(n, img)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        2 * self.n
    }

    pub fn apply_index(&self, idx: usize) -> usize {
        self.img[idx] as usize
    }

    pub fn apply(&self, p: i32) -> i32 {
        index_to_point(self.img[point_to_index(p)] as usize)
    }

    pub fn images(&self) -> &[u32] {
        &self.img
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.img.len()];
        for (i, &t) in self.img.iter().enumerate() {
            inv[t as usize] = i as u32;
        }
        Permutation { n: self.n, img: inv }
    }

    /// `self * other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation, PermError> {
        if self.n != other.n {
            return Err(PermError::SizeMismatch);
        }
        let img = other.img.iter().map(|&t| self.img[t as usize]).collect();
        Ok(Permutation { n: self.n, img })
    }

    /// Disjoint cycles, each rotated to start at its smallest point, sorted
    /// by that point.
    pub fn cycles(&self) -> Vec<Vec<i32>> {
        let m = self.img.len();
        let mut seen = vec![false; m];
        let mut cycles = Vec::new();
        for start in 0..m {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(index_to_point(x));
                x = self.img[x] as usize;
            }
            cycles.push(cycle);
        }
        cycles
    }

    /// Sorted cycle lengths, a partition of `2n`.
    pub fn cycle_type(&self) -> Partition {
        let lengths: Vec<u32> = self.cycles().iter().map(|c| c.len() as u32).collect();
        Partition::from_unsorted(lengths).expect("cycle lengths are positive")
    }

    /// For a cycle type of doubled form, the halved partition of `n`.
    pub fn halved_cycle_type(&self) -> Result<Partition, PermError> {
        Ok(self.cycle_type().halve_doubled()?)
    }

    /// The pairing `(w^-1(1), w^-1(1^)) (w^-1(2), w^-1(2^)) ...`.
    pub fn induced_pairing(&self) -> Pairing {
        let inv = self.inverse();
        let mut img = vec![0u32; self.img.len()];
        for i in 1..=self.n as i32 {
            let a = inv.img[point_to_index(i)] as usize;
            let b = inv.img[point_to_index(-i)] as usize;
            img[a] = b as u32;
            img[b] = a as u32;
        }
        Pairing(Permutation { n: self.n, img })
    }

    /// Index of the double coset containing this permutation: the halved
    /// cycle type of `f* . f_w`.
    pub fn double_coset(&self) -> Partition {
        let f_star = canonical_f_star(self.n);
        f_star
            .as_permutation()
            .compose(self.induced_pairing().as_permutation())
            .expect("same ground set")
            .halved_cycle_type()
            .expect("product of two pairings has doubled type")
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for cycle in self.cycles() {
            if cycle.len() == 1 {
                continue;
            }
            write!(f, "(")?;
            for (i, p) in cycle.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                if *p > 0 {
                    write!(f, "{}", p)?;
                } else {
                    write!(f, "{}^", -p)?;
                }
            }
            write!(f, ")")?;
            wrote = true;
        }
        if !wrote {
            write!(f, "()")?;
        }
        Ok(())
    }
}

impl Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let cycles: Vec<Vec<i32>> = self.cycles().into_iter().filter(|c| c.len() > 1).collect();
        (self.n, cycles).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (n, cycles): (usize, Vec<Vec<i32>>) = Deserialize::deserialize(d)?;
        Permutation::from_cycles(n, &cycles).map_err(serde::de::Error::custom)
    }
}

/// A fixed-point-free involution on the `2n` signed points.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pairing(Permutation);

impl Pairing {
    pub fn from_permutation(p: Permutation) -> Result<Self, PermError> {
        let ok = (0..p.degree()).all(|i| {
            let t = p.img[i] as usize;
            t != i && p.img[t] as usize == i
        });
        if ok {
            Ok(Pairing(p))
        } else {
            Err(PermError::NotPairing)
        }
    }

    pub fn from_pairs(n: usize, pairs: &[(i32, i32)]) -> Result<Self, PermError> {
        let cycles: Vec<Vec<i32>> = pairs.iter().map(|&(a, b)| vec![a, b]).collect();
        Pairing::from_permutation(Permutation::from_cycles(n, &cycles)?)
    }

    pub fn as_permutation(&self) -> &Permutation {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.n
    }

    pub fn apply(&self, p: i32) -> i32 {
        self.0.apply(p)
    }

    pub fn apply_index(&self, idx: usize) -> usize {
        self.0.apply_index(idx)
    }

    /// The unordered pairs, each `(smaller, larger)` in point order, sorted.
    pub fn pairs(&self) -> Vec<(i32, i32)> {
        let mut out = Vec::with_capacity(self.0.n);
        for i in 0..self.0.degree() {
            let j = self.0.img[i] as usize;
            if i < j {
                out.push((index_to_point(i), index_to_point(j)));
            }
        }
        out
    }
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The pairing `(1 n^)(2 1^)(3 2^)...(n n-1^)`.
pub fn canonical_f1(n: usize) -> Pairing {
    let mut pairs = Vec::with_capacity(n);
    for i in 1..=n as i32 {
        let hat = if i == 1 { n as i32 } else { i - 1 };
        pairs.push((i, -hat));
    }
    Pairing::from_pairs(n, &pairs).expect("canonical pairing")
}

/// The pairing `(1 1^)(2 2^)...(n n^)` whose centralizer is the
/// hyperoctahedral group.
pub fn canonical_f_star(n: usize) -> Pairing {
    let pairs: Vec<(i32, i32)> = (1..=n as i32).map(|i| (i, -i)).collect();
    Pairing::from_pairs(n, &pairs).expect("canonical pairing")
}

/// The fixed representative of the long-cycle double coset:
/// `f1 . f* = (1 2 ... n)(n^ n-1^ ... 1^)`.
pub fn long_target(n: usize) -> Permutation {
    canonical_f1(n)
        .as_permutation()
        .compose(canonical_f_star(n).as_permutation())
        .expect("same ground set")
}

/// Visit every perfect pairing of the `2n` points exactly once, pairing the
/// smallest unpaired point with each larger point in increasing order.
pub fn for_each_pairing<F: FnMut(&Pairing)>(n: usize, mut f: F) {
    let mut img = vec![u32::MAX; 2 * n];
    pairing_rec(&mut img, &mut |img| {
        f(&Pairing(Permutation {
            n,
            img: img.to_vec(),
        }))
    });
}

fn pairing_rec(img: &mut [u32], f: &mut impl FnMut(&[u32])) {
    let a = match img.iter().position(|&x| x == u32::MAX) {
        None => {
            f(img);
            return;
        }
        Some(a) => a,
    };
    for b in a + 1..img.len() {
        if img[b] != u32::MAX {
            continue;
        }
        img[a] = b as u32;
        img[b] = a as u32;
        pairing_rec(img, f);
        img[a] = u32::MAX;
        img[b] = u32::MAX;
    }
}

/// Number of perfect pairings, `(2n-1)!!`.
pub fn double_factorial_odd(n: usize) -> u64 {
    (1..=n).map(|k| (2 * k - 1) as u64).product()
}

/// Fold every pairing into per-worker accumulators and merge them. Work is
/// split by the partner of the smallest point.
pub(crate) fn scan_pairings<T: Send>(
    n: usize,
    exec: Exec,
    identity: fn() -> T,
    fold: impl Fn(&mut T, &Pairing) + Sync + Send,
    merge: impl Fn(T, T) -> T + Sync + Send,
) -> T {
    if n == 0 {
        return identity();
    }
    let firsts: Vec<usize> = (1..2 * n).collect();
    map_reduce(
        firsts,
        exec,
        identity,
        |b| {
            let mut acc = identity();
            let mut img = vec![u32::MAX; 2 * n];
            img[0] = b as u32;
            img[b] = 0;
            pairing_rec(&mut img, &mut |img| {
                fold(
                    &mut acc,
                    &Pairing(Permutation {
                        n,
                        img: img.to_vec(),
                    }),
                )
            });
            acc
        },
        merge,
    )
}

/// Visit every permutation of the `2n` signed points.
pub fn for_each_permutation<F: FnMut(&Permutation)>(n: usize, mut f: F) {
    let mut img: Vec<u32> = Vec::new();
    let mut used = vec![false; 2 * n];
    perm_rec(n, &mut img, &mut used, &mut f);
}

fn perm_rec(n: usize, img: &mut Vec<u32>, used: &mut [bool], f: &mut impl FnMut(&Permutation)) {
    if img.len() == used.len() {
        f(&Permutation { n, img: img.clone() });
        return;
    }
    for t in 0..used.len() {
        if !used[t] {
            used[t] = true;
            img.push(t as u32);
            perm_rec(n, img, used, f);
            img.pop();
            used[t] = false;
        }
    }
}

/// Fold every element of the symmetric group on the `2n` signed points,
/// split by the image of the smallest point.
pub(crate) fn scan_permutations<T: Send>(
    n: usize,
    exec: Exec,
    identity: fn() -> T,
    fold: impl Fn(&mut T, &Permutation) + Sync + Send,
    merge: impl Fn(T, T) -> T + Sync + Send,
) -> T {
    let firsts: Vec<u32> = (0..2 * n as u32).collect();
    map_reduce(
        firsts,
        exec,
        identity,
        |first| {
            let mut acc = identity();
            let mut img = vec![first];
            let mut used = vec![false; 2 * n];
            used[first as usize] = true;
            perm_rec(n, &mut img, &mut used, &mut |p| fold(&mut acc, p));
            acc
        },
        merge,
    )
}

/// Cycle-type census of a plain symmetric group `S_m` acting on `{1..m}`,
/// used by the orientable specialization. Calls `f` with the one-line image
/// array of every permutation.
pub fn for_each_sym<F: FnMut(&[u32])>(m: usize, mut f: F) {
    let mut img: Vec<u32> = Vec::new();
    let mut used = vec![false; m];
    sym_rec(&mut img, &mut used, &mut f);
}

fn sym_rec(img: &mut Vec<u32>, used: &mut [bool], f: &mut impl FnMut(&[u32])) {
    if img.len() == used.len() {
        f(img);
        return;
    }
    for t in 0..used.len() {
        if !used[t] {
            used[t] = true;
            img.push(t as u32);
            sym_rec(img, used, f);
            img.pop();
            used[t] = false;
        }
    }
}

/// Cycle type of a one-line image array over `{0..m}`.
pub fn sym_cycle_type(img: &[u32]) -> Partition {
    let mut seen = vec![false; img.len()];
    let mut lengths = Vec::new();
    for start in 0..img.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0u32;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            len += 1;
            x = img[x] as usize;
        }
        lengths.push(len);
    }
    Partition::from_unsorted(lengths).expect("cycle lengths are positive")
}

/// Fold every element of the plain symmetric group `S_m`, split by the image
/// of the first point.
pub(crate) fn scan_sym<T: Send>(
    m: usize,
    exec: Exec,
    identity: fn() -> T,
    fold: impl Fn(&mut T, &[u32]) + Sync + Send,
    merge: impl Fn(T, T) -> T + Sync + Send,
) -> T {
    if m == 0 {
        return identity();
    }
    let firsts: Vec<u32> = (0..m as u32).collect();
    map_reduce(
        firsts,
        exec,
        identity,
        |first| {
            let mut acc = identity();
            let mut img = vec![first];
            let mut used = vec![false; m];
            used[first as usize] = true;
            sym_rec(&mut img, &mut used, &mut |p| fold(&mut acc, p));
            acc
        },
        merge,
    )
}

/// The canonical table key `(halved cycle type, cycle type)` census of the
/// full symmetric group on the signed points, grouped by double coset.
pub fn double_coset_census(n: usize, exec: Exec) -> BTreeMap<(Partition, Partition), u64> {
    scan_permutations(
        n,
        exec,
        BTreeMap::new,
        |acc, w| {
            let key = (w.double_coset(), w.cycle_type());
            *acc.entry(key).or_insert(0) += 1;
        },
        |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::partition;

    fn worked_example_f3() -> Pairing {
        Pairing::from_pairs(
            12,
            &[
                (1, -3),
                (2, 7),
                (3, -10),
                (4, 12),
                (5, -9),
                (6, 10),
                (8, -12),
                (9, -8),
                (11, -2),
                (-1, -6),
                (-4, -5),
                (-7, -11),
            ],
        )
        .unwrap()
    }

    fn cycle_set(p: &Permutation) -> Vec<Vec<i32>> {
        p.cycles()
    }

    fn normalize(mut cycles: Vec<Vec<i32>>) -> Vec<Vec<i32>> {
        for c in cycles.iter_mut() {
            let pos = (0..c.len())
                .min_by_key(|&i| point_to_index(c[i]))
                .unwrap();
            c.rotate_left(pos);
        }
        cycles.sort_by_key(|c| point_to_index(c[0]));
        cycles
    }

    #[test]
    fn composition_is_involution_on_pairings() {
        for n in 1..=4 {
            let f = canonical_f1(n);
            let id = f.as_permutation().compose(f.as_permutation()).unwrap();
            assert_eq!(id, Permutation::identity(n));
        }
    }

    #[test]
    fn long_cycle_shape() {
        for n in 2..=6 {
            let w = long_target(n);
            // (1 2 ... n)(n^ ... 1^)
            assert_eq!(w.apply(1), 2);
            assert_eq!(w.apply(n as i32), 1);
            assert_eq!(w.apply(-1), -(n as i32));
            assert_eq!(w.cycle_type(), partition(&[n as u32, n as u32]));
        }
        // n = 1: both points fixed
        assert_eq!(long_target(1).cycle_type(), partition(&[1, 1]));
    }

    #[test]
    fn canonical_pairings_match_definitions() {
        assert_eq!(
            normalize(cycle_set(canonical_f1(3).as_permutation())),
            normalize(vec![vec![1, -3], vec![2, -1], vec![3, -2]])
        );
        assert_eq!(
            normalize(cycle_set(canonical_f_star(2).as_permutation())),
            normalize(vec![vec![1, -1], vec![2, -2]])
        );
    }

    #[test]
    fn worked_example_compositions() {
        let f3 = worked_example_f3();
        let f1 = canonical_f1(12);
        let f2 = canonical_f_star(12);
        let f3f1 = f3.as_permutation().compose(f1.as_permutation()).unwrap();
        let expected_f3f1 = vec![
            vec![-8],
            vec![9],
            vec![2, -6],
            vec![7, -1],
            vec![3, 11],
            vec![-10, -2],
            vec![5, -5, 10],
            vec![-9, 6, -4],
            vec![1, 8, -11, 4],
            vec![-3, 12, -7, -12],
        ];
        assert_eq!(normalize(f3f1.cycles()), normalize(expected_f3f1));

        let f3f2 = f3.as_permutation().compose(f2.as_permutation()).unwrap();
        let expected_f3f2 = vec![
            vec![2, 11, -7],
            vec![7, -11, -2],
            vec![1, -6, 10, 3],
            vec![-3, -10, 6, -1],
            vec![4, -5, -9, -8, -12],
            vec![12, 8, 9, 5, -4],
        ];
        assert_eq!(normalize(f3f2.cycles()), normalize(expected_f3f2));

        assert_eq!(f3f1.halved_cycle_type().unwrap(), partition(&[4, 3, 2, 2, 1]));
        assert_eq!(f3f2.halved_cycle_type().unwrap(), partition(&[5, 4, 3]));
    }

    #[test]
    fn halved_cycle_type_examples() {
        let id = Permutation::identity(2);
        assert_eq!(id.cycle_type(), partition(&[1, 1, 1, 1]));
        assert_eq!(id.halved_cycle_type().unwrap(), partition(&[1, 1]));
    }

    #[test]
    fn pairing_enumeration_counts_and_order() {
        let mut seen = Vec::new();
        for_each_pairing(2, |f| seen.push(f.pairs()));
        assert_eq!(
            seen,
            vec![
                vec![(1, -1), (2, -2)],
                vec![(1, 2), (-1, -2)],
                vec![(1, -2), (-1, 2)],
            ]
        );
        for n in 1..=7 {
            let mut count = 0u64;
            for_each_pairing(n, |_| count += 1);
            assert_eq!(count, double_factorial_odd(n));
        }
    }

    #[test]
    fn scan_pairings_matches_sequential() {
        for exec in [Exec::Sequential, Exec::Parallel] {
            let count = scan_pairings(5, exec, || 0u64, |c, _| *c += 1, |a, b| a + b);
            assert_eq!(count, 945);
        }
    }

    #[test]
    fn induced_pairing_examples() {
        // identity induces f*
        let id = Permutation::identity(3);
        assert_eq!(id.induced_pairing(), canonical_f_star(3));
        // the long target transports f* to the pairing {j, (j+2)^}, which is
        // f1 itself exactly when the shift by 2 inverts the shift by -1,
        // i.e. for n dividing 3
        for n in [1usize, 3] {
            assert_eq!(long_target(n).induced_pairing(), canonical_f1(n));
        }
        let f = long_target(4).induced_pairing();
        assert_eq!(f.apply(1), -3);
        assert_eq!(f.apply(2), -4);
    }

    #[test]
    fn hyperoctahedral_elements_induce_f_star() {
        // elements whose double coset is the all-ones partition form the
        // centralizer of f*, and all induce f* itself
        let mut checked = 0;
        for_each_permutation(2, |w| {
            if w.double_coset() == partition(&[1, 1]) {
                assert_eq!(w.induced_pairing(), canonical_f_star(2));
                checked += 1;
            }
        });
        assert_eq!(checked, 8); // |B_2|
    }

    #[test]
    fn double_coset_of_identity_and_long_cycle() {
        for n in 1..=4 {
            assert_eq!(
                Permutation::identity(n).double_coset(),
                partition(&vec![1; n])
            );
        }
        // the long target shifts non-hats by two under f* . f_w, so its
        // coset is the single row only for odd n and splits for even n
        assert_eq!(long_target(3).double_coset(), partition(&[3]));
        assert_eq!(long_target(5).double_coset(), partition(&[5]));
        assert_eq!(long_target(2).double_coset(), partition(&[1, 1]));
        assert_eq!(long_target(4).double_coset(), partition(&[2, 2]));
    }

    #[test]
    fn double_coset_partition_matches_sizes() {
        use crate::partitions::enumerate_partitions;
        use num::bigint::BigUint;
        for n in 1..=3 {
            let mut counts: BTreeMap<Partition, u64> = BTreeMap::new();
            for_each_permutation(n, |w| {
                *counts.entry(w.double_coset()).or_insert(0) += 1;
            });
            for nu in enumerate_partitions(n as u32) {
                assert_eq!(
                    BigUint::from(counts[&nu]),
                    nu.double_coset_size(),
                    "coset size mismatch at nu={nu}"
                );
            }
        }
    }

    #[test]
    fn product_of_pairings_has_doubled_type() {
        for n in 1..=4 {
            let f1 = canonical_f1(n);
            for_each_pairing(n, |f3| {
                let p = f3.as_permutation().compose(f1.as_permutation()).unwrap();
                assert!(p.halved_cycle_type().is_ok());
            });
        }
    }

    #[test]
    fn serde_cycles_roundtrip() {
        let f3 = worked_example_f3();
        let json = serde_json::to_string(f3.as_permutation()).unwrap();
        let back: Permutation = serde_json::from_str(&json).unwrap();
        assert_eq!(&back, f3.as_permutation());
    }

    #[test]
    fn display_uses_hat_notation() {
        let f = Pairing::from_pairs(3, &[(1, -3), (2, 3), (-1, -2)]).unwrap();
        assert_eq!(f.to_string(), "(1 3^)(1^ 2^)(2 3)");
    }
}
