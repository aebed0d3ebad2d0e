//! Finite coefficient tables for the two-alphabet generating series, in the
//! power-sum or monomial basis, plus the exact basis changes between them.
//!
//! Series are never materialized as polynomials in variables: a series of
//! degree `n` is a table `(lambda, mu) -> coefficient` over partition pairs
//! of `n`, one partition per alphabet.

use std::collections::BTreeMap;
use std::fmt;

use num::bigint::{BigInt, BigUint};
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Exec;
use crate::hypermaps::count_l;
use crate::partitions::{enumerate_partitions, Partition};

pub type Scalar = BigRational;

pub fn scalar_from_u64(v: u64) -> Scalar {
    BigRational::from_integer(BigInt::from(v))
}

pub fn scalar_from_biguint(v: &BigUint) -> Scalar {
    BigRational::from_integer(BigInt::from(v.clone()))
}

/// True when the scalar is a nonnegative integer.
pub fn scalar_is_count(v: &Scalar) -> bool {
    v.is_integer() && !v.is_negative()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    #[serde(rename = "p")]
    PowerPower,
    #[serde(rename = "m")]
    MonomialMonomial,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::PowerPower => write!(f, "p"),
            Basis::MonomialMonomial => write!(f, "m"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("series have different bases or degrees")]
    BasisMismatch,
    #[error("series differ at ({lambda}; {mu}): {left} vs {right}")]
    Different {
        lambda: Partition,
        mu: Partition,
        left: String,
        right: String,
    },
}

/// A degree-`n` two-alphabet series as a sparse coefficient table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymSeries {
    pub n: u32,
    pub basis: Basis,
    pub coeffs: BTreeMap<(Partition, Partition), Scalar>,
}

impl SymSeries {
    pub fn new(n: u32, basis: Basis) -> Self {
        SymSeries {
            n,
            basis,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, lambda: Partition, mu: Partition, value: Scalar) {
        if !value.is_zero() {
            self.coeffs.insert((lambda, mu), value);
        }
    }

    pub fn get(&self, lambda: &Partition, mu: &Partition) -> Scalar {
        self.coeffs
            .get(&(lambda.clone(), mu.clone()))
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    /// Exact comparison; reports the first differing key.
    pub fn compare(&self, other: &SymSeries) -> Result<(), SeriesError> {
        if self.n != other.n || self.basis != other.basis {
            return Err(SeriesError::BasisMismatch);
        }
        let keys: std::collections::BTreeSet<_> =
            self.coeffs.keys().chain(other.coeffs.keys()).cloned().collect();
        for (lambda, mu) in keys {
            let left = self.get(&lambda, &mu);
            let right = other.get(&lambda, &mu);
            if left != right {
                return Err(SeriesError::Different {
                    lambda,
                    mu,
                    left: left.to_string(),
                    right: right.to_string(),
                });
            }
        }
        Ok(())
    }
}

/// Expansion of one power-sum indexed by `lambda` in the monomial basis:
/// coefficient of `m_nu` is `Aut(nu) * R(lambda, nu)` where `R` counts the
/// set partitions of the parts of `lambda` with block sums `nu`.
pub fn power_in_monomials(lambda: &Partition) -> BTreeMap<Partition, BigUint> {
    let mut row = BTreeMap::new();
    for nu in enumerate_partitions(lambda.n()) {
        let r = lambda.refinement_count(&nu);
        if r > 0 {
            row.insert(nu.clone(), nu.automorphism_factor() * BigUint::from(r));
        }
    }
    row
}

/// The generating series of the pairing count table in the power basis.
pub fn lhs_series_from_l(n: u32, exec: Exec) -> SymSeries {
    let mut s = SymSeries::new(n, Basis::PowerPower);
    for ((lambda, mu), count) in count_l(n as usize, exec) {
        s.set(lambda, mu, scalar_from_u64(count));
    }
    s
}

/// Change of basis `p x p -> m x m` applied to both alphabets.
pub fn convert_pp_to_mm(s: &SymSeries) -> Result<SymSeries, SeriesError> {
    if s.basis != Basis::PowerPower {
        return Err(SeriesError::BasisMismatch);
    }
    let rows: BTreeMap<Partition, BTreeMap<Partition, BigUint>> = enumerate_partitions(s.n)
        .into_iter()
        .map(|lam| (lam.clone(), power_in_monomials(&lam)))
        .collect();
    let mut out = SymSeries::new(s.n, Basis::MonomialMonomial);
    for ((lambda, mu), c) in &s.coeffs {
        for (nu, a) in &rows[lambda] {
            for (rho, b) in &rows[mu] {
                let add = c * scalar_from_biguint(a) * scalar_from_biguint(b);
                let key = (nu.clone(), rho.clone());
                let cur = out.coeffs.remove(&key).unwrap_or_else(Scalar::zero) + add;
                if !cur.is_zero() {
                    out.coeffs.insert(key, cur);
                }
            }
        }
    }
    Ok(out)
}

/// Inverse change of basis `m x m -> p x p`, by inverting the triangular
/// transition matrix (sorted by number of parts, a power-sum only involves
/// monomials with at most as many parts).
pub fn convert_mm_to_pp(s: &SymSeries) -> Result<SymSeries, SeriesError> {
    if s.basis != Basis::MonomialMonomial {
        return Err(SeriesError::BasisMismatch);
    }
    let mut order = enumerate_partitions(s.n);
    order.sort_by_key(|p| (p.len(), p.clone()));
    let dim = order.len();
    let mut t = vec![vec![Scalar::zero(); dim]; dim];
    for (i, lam) in order.iter().enumerate() {
        for (nu, a) in power_in_monomials(lam) {
            let j = order.iter().position(|x| *x == nu).expect("same degree");
            t[i][j] = scalar_from_biguint(&a);
        }
    }
    // invert the lower-triangular transition matrix
    let mut inv = vec![vec![Scalar::zero(); dim]; dim];
    for i in 0..dim {
        inv[i][i] = Scalar::one() / &t[i][i];
        for j in (0..i).rev() {
            let mut acc = Scalar::zero();
            for k in j..i {
                acc += &t[i][k] * &inv[k][j];
            }
            inv[i][j] = -acc / &t[i][i];
        }
    }
    // both alphabets transform the same way: pp = inv^T * mm * inv
    let mut out = SymSeries::new(s.n, Basis::PowerPower);
    for (ai, a) in order.iter().enumerate() {
        for (bi, b) in order.iter().enumerate() {
            let mut acc = Scalar::zero();
            for (ni, nu) in order.iter().enumerate() {
                if inv[ni][ai].is_zero() {
                    continue;
                }
                for (ri, rho) in order.iter().enumerate() {
                    if inv[ri][bi].is_zero() {
                        continue;
                    }
                    let c = s.get(nu, rho);
                    if !c.is_zero() {
                        acc += c * &inv[ni][ai] * &inv[ri][bi];
                    }
                }
            }
            if !acc.is_zero() {
                out.set(a.clone(), b.clone(), acc);
            }
        }
    }
    Ok(out)
}

/// Partitioned-hypermap table derived from the plain table by refinement:
/// `LP(nu, rho) = sum R(lambda,nu) R(mu,rho) L(lambda,mu)`.
pub fn lp_from_l(n: u32, exec: Exec) -> BTreeMap<(Partition, Partition), u64> {
    let l = count_l(n as usize, exec);
    let mut out = BTreeMap::new();
    for nu in enumerate_partitions(n) {
        for rho in enumerate_partitions(n) {
            let mut total = 0u64;
            for ((lambda, mu), &c) in &l {
                total += lambda.refinement_count(&nu) * mu.refinement_count(&rho) * c;
            }
            if total > 0 {
                out.insert((nu.clone(), rho.clone()), total);
            }
        }
    }
    out
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    basis: Basis,
    n: u32,
    entries: Vec<EntryJson>,
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    lambda: Partition,
    mu: Partition,
    value: String,
}

impl Serialize for SymSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SeriesJson {
            basis: self.basis,
            n: self.n,
            entries: self
                .coeffs
                .iter()
                .map(|((lambda, mu), v)| EntryJson {
                    lambda: lambda.clone(),
                    mu: mu.clone(),
                    value: v.to_string(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = SeriesJson::deserialize(d)?;
        let mut out = SymSeries::new(raw.n, raw.basis);
        for e in raw.entries {
            let v: Scalar = e
                .value
                .parse()
                .map_err(|_| serde::de::Error::custom(format!("bad fraction {:?}", e.value)))?;
            out.set(e.lambda, e.mu, v);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::partition;

    #[test]
    fn power_row_for_two_ones() {
        // p_1 p_1 = m_2 + 2 m_11
        let row = power_in_monomials(&partition(&[1, 1]));
        assert_eq!(row[&partition(&[2])], BigUint::from(1u32));
        assert_eq!(row[&partition(&[1, 1])], BigUint::from(2u32));
    }

    #[test]
    fn power_row_single_part_is_monomial() {
        for n in 1..=6 {
            let row = power_in_monomials(&partition(&[n]));
            assert_eq!(row.len(), 1);
            assert_eq!(row[&partition(&[n])], BigUint::from(1u32));
        }
    }

    #[test]
    fn lhs_series_small() {
        let s = lhs_series_from_l(1, Exec::Sequential);
        assert_eq!(s.get(&partition(&[1]), &partition(&[1])), scalar_from_u64(1));
        assert_eq!(s.coeffs.len(), 1);

        let s5 = lhs_series_from_l(5, Exec::Sequential);
        let total: Scalar = s5.coeffs.values().cloned().sum();
        assert_eq!(total, scalar_from_u64(945));
    }

    #[test]
    fn conversion_of_two_edge_table() {
        let s = lhs_series_from_l(2, Exec::Sequential);
        let m = convert_pp_to_mm(&s).unwrap();
        let two = partition(&[2]);
        let one_one = partition(&[1, 1]);
        assert_eq!(m.get(&two, &two), scalar_from_u64(3));
        assert_eq!(m.get(&two, &one_one), scalar_from_u64(2));
        assert_eq!(m.get(&one_one, &two), scalar_from_u64(2));
        assert_eq!(m.get(&one_one, &one_one), scalar_from_u64(0));
    }

    #[test]
    fn mm_to_pp_inverts_pp_to_mm() {
        for n in 1..=5 {
            let s = lhs_series_from_l(n, Exec::Sequential);
            let m = convert_pp_to_mm(&s).unwrap();
            let back = convert_mm_to_pp(&m).unwrap();
            assert_eq!(back.compare(&s), Ok(()));
        }
    }

    #[test]
    fn lp_from_l_examples() {
        let t = lp_from_l(2, Exec::Sequential);
        let two = partition(&[2]);
        let one_one = partition(&[1, 1]);
        assert_eq!(t[&(two.clone(), two.clone())], 3);
        assert_eq!(t[&(two.clone(), one_one.clone())], 1);
        assert_eq!(t.get(&(one_one.clone(), one_one)).copied().unwrap_or(0), 0);
    }

    #[test]
    fn lp_from_l_matches_enumeration() {
        use crate::hypermaps::lp_half_type_table;
        for n in 1..=4u32 {
            let direct = lp_half_type_table(n as usize, Exec::default());
            let derived = lp_from_l(n, Exec::Sequential);
            assert_eq!(direct, derived, "n={n}");
        }
    }

    #[test]
    fn compare_reports_first_difference() {
        let mut a = SymSeries::new(2, Basis::PowerPower);
        a.set(partition(&[2]), partition(&[2]), scalar_from_u64(1));
        let b = a.clone();
        assert_eq!(a.compare(&b), Ok(()));
        let mut c = b.clone();
        c.set(partition(&[2]), partition(&[2]), scalar_from_u64(7));
        match a.compare(&c) {
            Err(SeriesError::Different { lambda, mu, .. }) => {
                assert_eq!(lambda, partition(&[2]));
                assert_eq!(mu, partition(&[2]));
            }
            other => panic!("expected difference, got {other:?}"),
        }
        let d = SymSeries::new(2, Basis::MonomialMonomial);
        assert_eq!(a.compare(&d), Err(SeriesError::BasisMismatch));
    }

    #[test]
    fn series_json_roundtrip() {
        let s = lhs_series_from_l(3, Exec::Sequential);
        let json = serde_json::to_string(&s).unwrap();
        let back: SymSeries = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        assert!(json.contains("\"basis\":\"p\""));
    }
}
