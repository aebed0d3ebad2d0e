//! Integer partitions and the arithmetic on them used throughout the crate:
//! multiplicity maps, automorphism factors, doubling/halving, set-partition
//! refinement counts, hook products and double-coset sizes.
//!
//! The canonical order on partitions of a fixed `n` is reverse-lexicographic,
//! e.g. `(3) < (2,1) < (1,1,1)`; every table in the crate iterates in that
//! order so serialized output is deterministic.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num::bigint::BigUint;
use num::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PartitionError {
    #[error("parts must be positive and weakly decreasing")]
    Malformed,
    #[error("partition is not of doubled form: part {0} has odd multiplicity")]
    NotDoubled(u32),
    #[error("cannot parse partition from {0:?}")]
    Parse(String),
}

/// A weakly decreasing sequence of positive integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self, PartitionError> {
        if parts.iter().any(|&p| p == 0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(PartitionError::Malformed);
        }
        Ok(Partition { parts })
    }

    /// Build from parts in any order.
    pub fn from_unsorted(mut parts: Vec<u32>) -> Result<Self, PartitionError> {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition::new(parts)
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Sum of the parts.
    pub fn n(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Number of parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Multiplicity map `part size -> count`; absent keys mean zero.
    pub fn multiplicities(&self) -> BTreeMap<u32, u32> {
        let mut m = BTreeMap::new();
        for &p in &self.parts {
            *m.entry(p).or_insert(0) += 1;
        }
        m
    }

    /// Product of the factorials of the multiplicities.
    pub fn automorphism_factor(&self) -> BigUint {
        self.multiplicities()
            .values()
            .map(|&c| factorial(c as u64))
            .product()
    }

    /// Size of the centralizer of a permutation of this cycle type:
    /// `Aut * prod_i i^{n_i}`.
    pub fn z_factor(&self) -> BigUint {
        let mut z = self.automorphism_factor();
        for (&i, &c) in &self.multiplicities() {
            z *= BigUint::from(i).pow(c);
        }
        z
    }

    /// Each part repeated twice: `(3,1) -> (3,3,1,1)`.
    pub fn doubled(&self) -> Partition {
        let mut parts = Vec::with_capacity(2 * self.parts.len());
        for &p in &self.parts {
            parts.push(p);
            parts.push(p);
        }
        Partition { parts }
    }

    /// Each part scaled by two: `(3,1) -> (6,2)`.
    pub fn scaled2(&self) -> Partition {
        Partition {
            parts: self.parts.iter().map(|&p| 2 * p).collect(),
        }
    }

    /// Inverse of [`Partition::doubled`]; fails when some part size has odd
    /// multiplicity.
    pub fn halve_doubled(&self) -> Result<Partition, PartitionError> {
        for (&p, &c) in &self.multiplicities() {
            if c % 2 == 1 {
                return Err(PartitionError::NotDoubled(p));
            }
        }
        let parts = self.parts.iter().step_by(2).copied().collect();
        Ok(Partition { parts })
    }

    /// Number of unordered set partitions of the index set `[len(self)]`
    /// whose block sums, sorted decreasingly, equal `target`. Zero when
    /// `self` does not refine `target`.
    pub fn refinement_count(&self, target: &Partition) -> u64 {
        assert_eq!(self.n(), target.n(), "refinement needs equal weight");
        let mut sums = Vec::new();
        count_refinements(&self.parts, 0, &mut sums, target)
    }

    /// Product over the Young-diagram cells of the hook lengths.
    pub fn hook_product(&self) -> BigUint {
        let mut h = BigUint::one();
        for (row, &len) in self.parts.iter().enumerate() {
            for col in 0..len {
                let arm = len - col - 1;
                let leg = self.parts[row + 1..]
                    .iter()
                    .take_while(|&&lower| lower > col)
                    .count() as u32;
                h *= BigUint::from(arm + leg + 1);
            }
        }
        h
    }

    /// Size of the double coset indexed by this partition of `n` inside the
    /// symmetric group on `2n` points: `|B_n| * |C_nu| * 2^(n - len(nu))`.
    pub fn double_coset_size(&self) -> BigUint {
        let n = self.n() as u64;
        let b_n = BigUint::from(2u32).pow(n as u32) * factorial(n);
        let class_size = factorial(n) / self.z_factor();
        b_n * class_size * BigUint::from(2u32).pow(n as u32 - self.parts.len() as u32)
    }
}

fn count_refinements(parts: &[u32], idx: usize, block_sums: &mut Vec<u32>, target: &Partition) -> u64 {
    if idx == parts.len() {
        let mut sums = block_sums.clone();
        sums.sort_unstable_by(|a, b| b.cmp(a));
        return (sums == target.parts) as u64;
    }
    let mut total = 0;
    // place element idx into an existing block or open a new one
    for b in 0..block_sums.len() {
        block_sums[b] += parts[idx];
        if block_sums[b] <= target.parts[0] {
            total += count_refinements(parts, idx + 1, block_sums, target);
        }
        block_sums[b] -= parts[idx];
    }
    block_sums.push(parts[idx]);
    total += count_refinements(parts, idx + 1, block_sums, target);
    block_sums.pop();
    total
}

/// All partitions of `n` exactly once, in reverse-lexicographic order.
pub fn enumerate_partitions(n: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    descend(n, n, &mut current, &mut out);
    out
}

fn descend(remaining: u32, max: u32, current: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if remaining == 0 {
        out.push(Partition {
            parts: current.clone(),
        });
        return;
    }
    let mut p = max.min(remaining);
    while p >= 1 {
        current.push(p);
        descend(remaining - p, p, current, out);
        current.pop();
        p -= 1;
    }
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).map(BigUint::from).product()
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Partition {
    /// Weight first, then reverse-lexicographic, matching the enumeration
    /// order: `(3) < (2,1) < (1,1,1)`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.n()
            .cmp(&other.n())
            .then_with(|| other.parts.cmp(&self.parts))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let strs: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", strs.join(","))
    }
}

impl FromStr for Partition {
    type Err = PartitionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Result<Vec<u32>, _> = s
            .split(',')
            .map(|t| t.trim().parse::<u32>())
            .collect();
        match parts {
            Ok(v) => Partition::from_unsorted(v).map_err(|_| PartitionError::Parse(s.to_string())),
            Err(_) => Err(PartitionError::Parse(s.to_string())),
        }
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = PartitionError;

    fn try_from(v: Vec<u32>) -> Result<Self, Self::Error> {
        Partition::from_unsorted(v)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Vec<u32> {
        p.parts
    }
}

/// Convenience constructor for literals in tests and tables.
pub fn partition(parts: &[u32]) -> Partition {
    Partition::from_unsorted(parts.to_vec()).expect("valid partition literal")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn multiplicities_examples() {
        assert_eq!(
            partition(&[4, 3, 2, 2, 1]).multiplicities(),
            BTreeMap::from([(1, 1), (2, 2), (3, 1), (4, 1)])
        );
        assert_eq!(partition(&[1]).multiplicities(), BTreeMap::from([(1, 1)]));
        assert_eq!(
            partition(&[5, 4, 3]).multiplicities(),
            BTreeMap::from([(3, 1), (4, 1), (5, 1)])
        );
    }

    #[test]
    fn automorphism_factor_examples() {
        assert_eq!(partition(&[4, 3, 2, 2, 1]).automorphism_factor(), big(2));
        assert_eq!(partition(&[5, 4, 3]).automorphism_factor(), big(1));
        assert_eq!(partition(&[1, 1, 1]).automorphism_factor(), big(6));
    }

    #[test]
    fn z_factor_examples() {
        assert_eq!(partition(&[2, 1]).z_factor(), big(2));
        assert_eq!(partition(&[7]).z_factor(), big(7));
        assert_eq!(partition(&[1, 1]).z_factor(), big(2));
    }

    #[test]
    fn doubling_examples() {
        assert_eq!(partition(&[3, 1]).doubled(), partition(&[3, 3, 1, 1]));
        assert_eq!(partition(&[3, 1]).scaled2(), partition(&[6, 2]));
        assert_eq!(
            partition(&[4, 3, 2, 2, 1]).doubled(),
            partition(&[4, 4, 3, 3, 2, 2, 2, 2, 1, 1])
        );
        assert_eq!(partition(&[3, 3, 1, 1]).halve_doubled(), Ok(partition(&[3, 1])));
        assert_eq!(
            partition(&[2, 2, 2]).halve_doubled(),
            Err(PartitionError::NotDoubled(2))
        );
        assert_eq!(
            partition(&[4, 4, 3, 3, 2, 2, 2, 2, 1, 1]).halve_doubled(),
            Ok(partition(&[4, 3, 2, 2, 1]))
        );
    }

    #[test]
    fn enumeration_order_and_counts() {
        assert_eq!(
            enumerate_partitions(3),
            vec![partition(&[3]), partition(&[2, 1]), partition(&[1, 1, 1])]
        );
        assert_eq!(enumerate_partitions(1), vec![partition(&[1])]);
        assert_eq!(enumerate_partitions(5).len(), 7);
        // p(n) for n = 1..9
        let expected = [1, 2, 3, 5, 7, 11, 15, 22, 30];
        for (n, &count) in (1..=9).zip(&expected) {
            assert_eq!(enumerate_partitions(n).len(), count);
        }
    }

    #[test]
    fn refinement_examples() {
        assert_eq!(partition(&[1, 1, 1]).refinement_count(&partition(&[2, 1])), 3);
        assert_eq!(partition(&[2, 1]).refinement_count(&partition(&[2, 1])), 1);
        assert_eq!(partition(&[1, 1]).refinement_count(&partition(&[2])), 1);
    }

    #[test]
    fn refinement_to_single_block_is_one() {
        for n in 1..=7 {
            for lam in enumerate_partitions(n) {
                assert_eq!(lam.refinement_count(&partition(&[n])), 1);
            }
        }
    }

    #[test]
    fn refinement_sums_against_bell_numbers() {
        // For distinct parts every set partition of the index set gives a
        // distinct block-sum type, so the row sums are Bell numbers.
        let bell = [1u64, 1, 2, 5, 15];
        for lam in [partition(&[1]), partition(&[2, 1]), partition(&[4, 2, 1]), partition(&[8, 4, 2, 1])] {
            let n = lam.n();
            let total: u64 = enumerate_partitions(n)
                .iter()
                .map(|mu| lam.refinement_count(mu))
                .sum();
            assert_eq!(total, bell[lam.len()]);
        }
    }

    #[test]
    fn hook_product_examples() {
        assert_eq!(partition(&[2]).hook_product(), big(2));
        assert_eq!(partition(&[2, 2]).hook_product(), big(12));
        assert_eq!(partition(&[1]).hook_product(), big(1));
        // hooks of (3,1): 4,2,1 / 1
        assert_eq!(partition(&[3, 1]).hook_product(), big(8));
    }

    #[test]
    fn double_coset_size_examples() {
        assert_eq!(partition(&[1]).double_coset_size(), big(2));
        assert_eq!(partition(&[2]).double_coset_size(), big(16));
        assert_eq!(partition(&[1, 1]).double_coset_size(), big(8));
    }

    #[test]
    fn double_coset_sizes_partition_the_group() {
        for n in 1..=6u32 {
            let total: BigUint = enumerate_partitions(n)
                .iter()
                .map(|nu| nu.double_coset_size())
                .sum();
            assert_eq!(total, factorial(2 * n as u64));
        }
    }

    #[test]
    fn display_and_parse() {
        let p = partition(&[4, 3, 2, 2, 1]);
        assert_eq!(p.to_string(), "4,3,2,2,1");
        assert_eq!("4,3,2,2,1".parse::<Partition>().unwrap(), p);
        assert!("4,0,1".parse::<Partition>().is_err());
        // unsorted input is normalized
        assert_eq!("2,3,1".parse::<Partition>().unwrap(), partition(&[3, 2, 1]));
    }

    proptest! {
        #[test]
        fn doubling_roundtrip(parts in proptest::collection::vec(1u32..9, 1..8)) {
            let lam = Partition::from_unsorted(parts).unwrap();
            prop_assert_eq!(lam.doubled().halve_doubled().unwrap(), lam.clone());
            prop_assert_eq!(lam.doubled().n(), 2 * lam.n());
            prop_assert_eq!(lam.scaled2().n(), 2 * lam.n());
        }

        #[test]
        fn z_factor_is_centralizer_order(parts in proptest::collection::vec(1u32..6, 1..6)) {
            // z_lambda divides n! and Aut divides z
            let lam = Partition::from_unsorted(parts).unwrap();
            let z = lam.z_factor();
            prop_assert_eq!(factorial(lam.n() as u64) % &z, BigUint::from(0u32));
            prop_assert_eq!(&z % lam.automorphism_factor(), BigUint::from(0u32));
        }
    }
}
