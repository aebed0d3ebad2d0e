//! Irreducible symmetric-group characters by border-strip recursion, the
//! zonal spherical sums built from them, and the character-theoretic route
//! to the factorization counts.

use std::collections::{BTreeMap, HashMap};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};

use crate::exec::Exec;
use crate::pairings::double_coset_census;
use crate::partitions::{enumerate_partitions, Partition};
use crate::series::{scalar_from_biguint, Scalar};

/// Memoized character evaluations `chi^lambda_mu`.
#[derive(Debug, Default)]
pub struct CharacterTable {
    cache: HashMap<(Vec<u32>, Vec<u32>), BigInt>,
}

impl CharacterTable {
    pub fn new() -> Self {
        CharacterTable::default()
    }

    /// Character of the irreducible indexed by `lambda` at class `mu`, by
    /// removing a border strip for each part of `mu` with the sign
    /// `(-1)^height`.
    pub fn chi(&mut self, lambda: &Partition, mu: &Partition) -> BigInt {
        assert_eq!(lambda.n(), mu.n(), "character needs |lambda| = |mu|");
        self.chi_rec(lambda.parts().to_vec(), mu.parts())
    }

    fn chi_rec(&mut self, lambda: Vec<u32>, mu_rest: &[u32]) -> BigInt {
        if mu_rest.is_empty() {
            return BigInt::one();
        }
        let key = (lambda.clone(), mu_rest.to_vec());
        if let Some(v) = self.cache.get(&key) {
            return v.clone();
        }
        let strip = mu_rest[0];
        let rest = &mu_rest[1..];
        // first-column hook lengths ("beta numbers"), strictly decreasing
        let ell = lambda.len();
        let betas: Vec<u32> = lambda
            .iter()
            .enumerate()
            .map(|(i, &p)| p + (ell - 1 - i) as u32)
            .collect();
        let mut total = BigInt::zero();
        for (i, &b) in betas.iter().enumerate() {
            if b < strip {
                continue;
            }
            let target = b - strip;
            if betas.contains(&target) {
                continue;
            }
            let height = betas.iter().filter(|&&x| target < x && x < b).count();
            let mut next: Vec<u32> = betas.clone();
            next[i] = target;
            next.sort_unstable_by(|a, c| c.cmp(a));
            let reduced: Vec<u32> = next
                .iter()
                .enumerate()
                .map(|(j, &x)| x - (ell - 1 - j) as u32)
                .filter(|&p| p > 0)
                .collect();
            let term = self.chi_rec(reduced, rest);
            if height % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
        self.cache.insert(key, total.clone());
        total
    }
}

/// Census of the symmetric group on the signed points bucketed by
/// `(double coset, cycle type)`; one scan serves every spherical sum.
pub struct CosetScan {
    pub n: usize,
    census: BTreeMap<(Partition, Partition), u64>,
}

impl CosetScan {
    pub fn new(n: usize, exec: Exec) -> Self {
        CosetScan {
            n,
            census: double_coset_census(n, exec),
        }
    }

    /// Zonal spherical value: sum over the double coset `mu` of the
    /// character of the doubled shape `beta`.
    pub fn phi(&self, table: &mut CharacterTable, beta: &Partition, mu: &Partition) -> BigInt {
        let doubled_shape = beta.scaled2();
        let mut total = BigInt::zero();
        for ((coset, cyc), &count) in &self.census {
            if coset == mu {
                total += table.chi(&doubled_shape, cyc) * BigInt::from(count);
            }
        }
        total
    }
}

/// Which hook product divides each spherical summand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HookReading {
    /// `H_{2 beta}` varying with the summation index.
    PerSummand,
    /// `H_{2 nu}` fixed by the target coset.
    ConstantTarget,
}

/// Factorization count through spherical functions:
/// `(1/|K_nu|) sum_beta phi(beta,nu) phi(beta,lambda) phi(beta,mu) / H`.
pub fn hecke_b(
    scan: &CosetScan,
    table: &mut CharacterTable,
    nu: &Partition,
    lambda: &Partition,
    mu: &Partition,
    reading: HookReading,
) -> Scalar {
    let n = nu.n();
    assert_eq!(scan.n, n as usize);
    let mut total = Scalar::zero();
    for beta in enumerate_partitions(n) {
        let hook = match reading {
            HookReading::PerSummand => beta.scaled2().hook_product(),
            HookReading::ConstantTarget => nu.scaled2().hook_product(),
        };
        let product = scan.phi(table, &beta, nu)
            * scan.phi(table, &beta, lambda)
            * scan.phi(table, &beta, mu);
        total += BigRational::from_integer(product) / scalar_from_biguint(&hook);
    }
    total / scalar_from_biguint(&nu.double_coset_size())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::{factorial, partition};

    #[test]
    fn trivial_representation_is_all_ones() {
        let mut t = CharacterTable::new();
        for m in 1..=6u32 {
            for mu in enumerate_partitions(m) {
                assert_eq!(t.chi(&partition(&[m]), &mu), BigInt::one());
            }
        }
    }

    #[test]
    fn sign_and_dimension_values() {
        let mut t = CharacterTable::new();
        assert_eq!(t.chi(&partition(&[1, 1]), &partition(&[2])), BigInt::from(-1));
        assert_eq!(
            t.chi(&partition(&[2, 1]), &partition(&[1, 1, 1])),
            BigInt::from(2)
        );
        assert_eq!(
            t.chi(&partition(&[2, 2]), &partition(&[1, 1, 1, 1])),
            BigInt::from(2)
        );
        assert_eq!(
            t.chi(&partition(&[2, 2]), &partition(&[3, 1])),
            BigInt::from(-1)
        );
    }

    #[test]
    fn dimensions_are_positive() {
        let mut t = CharacterTable::new();
        for m in 1..=7u32 {
            let ones = partition(&vec![1; m as usize]);
            for lam in enumerate_partitions(m) {
                assert!(t.chi(&lam, &ones) > BigInt::zero(), "dim chi^{lam} <= 0");
            }
        }
    }

    #[test]
    fn column_orthogonality() {
        let mut t = CharacterTable::new();
        for m in 1..=6u32 {
            let classes = enumerate_partitions(m);
            for mu in &classes {
                for rho in &classes {
                    let total: BigInt = classes
                        .iter()
                        .map(|lam| t.chi(lam, mu) * t.chi(lam, rho))
                        .sum();
                    let expected = if mu == rho {
                        BigInt::from(mu.z_factor().clone())
                    } else {
                        BigInt::zero()
                    };
                    assert_eq!(total, expected, "mu={mu} rho={rho}");
                }
            }
        }
    }

    #[test]
    fn spherical_values_small() {
        let mut t = CharacterTable::new();
        let scan1 = CosetScan::new(1, Exec::Sequential);
        assert_eq!(
            scan1.phi(&mut t, &partition(&[1]), &partition(&[1])),
            BigInt::from(2)
        );

        // the doubled one-row shape carries the trivial character, so the
        // phi values sum to the full group order
        let scan2 = CosetScan::new(2, Exec::Sequential);
        let total: BigInt = enumerate_partitions(2)
            .iter()
            .map(|mu| scan2.phi(&mut t, &partition(&[2]), mu))
            .sum();
        assert_eq!(total, BigInt::from(factorial(4)));
    }

    #[test]
    fn hecke_matches_brute_force_small() {
        use crate::hypermaps::brute_force_b;
        let mut t = CharacterTable::new();
        let one = partition(&[1]);
        let scan1 = CosetScan::new(1, Exec::Sequential);
        let b = hecke_b(&scan1, &mut t, &one, &one, &one, HookReading::PerSummand);
        assert_eq!(b, crate::series::scalar_from_u64(2));

        let two = partition(&[2]);
        let scan2 = CosetScan::new(2, Exec::Sequential);
        let b = hecke_b(&scan2, &mut t, &two, &two, &two, HookReading::PerSummand);
        assert_eq!(b, crate::series::scalar_from_u64(8));
        assert_eq!(
            b,
            crate::series::scalar_from_u64(brute_force_b(&two, &two, &two, Exec::Sequential))
        );
    }

    #[test]
    fn constant_hook_reading_breaks_integrality() {
        use crate::series::scalar_is_count;
        let mut t = CharacterTable::new();
        let two = partition(&[2]);
        let scan2 = CosetScan::new(2, Exec::Sequential);
        let b = hecke_b(&scan2, &mut t, &two, &two, &two, HookReading::ConstantTarget);
        assert!(!scalar_is_count(&b), "expected a non-integral value, got {b}");
    }
}
