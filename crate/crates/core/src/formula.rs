//! The closed-form side of the main identity: enumeration of the admissible
//! degree arrays for a pair of half-types, the exact per-array forest count,
//! and the assembled monomial-basis series, together with the orientable
//! specialization.
//!
//! Two evaluations of the per-array weight are provided. The literal one
//! ([`printed_summand`]) transcribes the published expression, including its
//! two special cases; it is kept for auditing because it is undefined or
//! wrong on a family of degenerate arrays (for instance arrays with no
//! internal black vertex and no thorns but two or more non-root whites,
//! where its factorial arguments go negative). The corrected evaluation
//! ([`closed_form_summand`]) counts the forests directly: a sum over the
//! choice of seed vertex and edge-slot allocations, with an exact
//! determinant factor for the number of rooted attachment structures. The
//! enumeration oracles adjudicate: the corrected count matches them on every
//! array, and [`audit_printed_formula`] reports where the literal form
//! deviates.

use std::collections::BTreeMap;

use num::bigint::{BigInt, BigUint};
use num::rational::BigRational;
use num::{One, Zero};
use thiserror::Error;

use crate::degree::{DegreeArray, TriMap};
use crate::exec::{map_reduce, Exec};
use crate::pairings::{scan_sym, sym_cycle_type};
use crate::partitions::{enumerate_partitions, factorial, Partition};
use crate::series::{scalar_from_biguint, scalar_from_u64, Basis, Scalar, SymSeries};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("coefficient at ({lambda}; {mu}) is not a nonnegative integer: {value}")]
    NonIntegralTotal {
        lambda: Partition,
        mu: Partition,
        value: String,
    },
}

/// `m! / (a! b! c! (m-a-b-c)!)`, zero when `a+b+c > m`.
pub fn bounded_multinomial(m: u32, a: u32, b: u32, c: u32) -> BigUint {
    if a + b + c > m {
        return BigUint::zero();
    }
    let rest = m - a - b - c;
    factorial(m as u64)
        / (factorial(a as u64) * factorial(b as u64) * factorial(c as u64) * factorial(rest as u64))
}

fn binom(a: u64, b: u64) -> BigUint {
    if b > a {
        return BigUint::zero();
    }
    factorial(a) / (factorial(b) * factorial(a - b))
}

/// `(2l-1)!! `, the number of perfect matchings of `2l` fixed positions.
fn matchings(l: u32) -> BigUint {
    (1..=l as u64).map(|k| BigUint::from(2 * k - 1)).product()
}

// Slot-sequence counts per vertex: `d` descendant slots carrying `l`
// matched loop-end pairs, the rest free for edges and thorns.
fn shape_unconstrained(d: u32, l: u32) -> BigUint {
    binom(d as u64, 2 * l as u64) * matchings(l)
}

// Same, but the rightmost slot must be a loop end (non-seed roots).
fn shape_root(d: u32, l: u32) -> BigUint {
    if l == 0 || d < 2 * l {
        return BigUint::zero();
    }
    binom(d as u64 - 1, 2 * l as u64 - 1) * matchings(l)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Class {
    WhiteInternal,
    WhiteRoot,
    BlackInternal,
    BlackRoot,
}

/// Number of rooted attachment structures: every internal vertex hangs off
/// an edge slot of the opposite color, every non-seed root hangs off an
/// arrow slot, and the whole thing is a tree rooted at the seed. Computed by
/// the multitype tree count `det(D) / prod(class sizes)` times the
/// placement multinomials, which the caller supplies; this returns only the
/// determinant ratio.
fn attachment_ratio(
    sizes: &[(Class, u64)],
    edge_slots: impl Fn(Class) -> u64,
    arrow_slots: impl Fn(Class) -> u64,
) -> Scalar {
    let present: Vec<(Class, u64)> = sizes.iter().copied().filter(|&(_, n)| n > 0).collect();
    if present.is_empty() {
        return Scalar::one();
    }
    let dim = present.len();
    let mut mat = vec![vec![BigInt::zero(); dim]; dim];
    for (row, &(t, _)) in present.iter().enumerate() {
        for (col, &(s, ns)) in present.iter().enumerate() {
            // slots of type s sitting on class-t vertices
            let slots = match s {
                Class::BlackInternal => match t {
                    Class::WhiteInternal | Class::WhiteRoot => edge_slots(t),
                    _ => 0,
                },
                Class::BlackRoot => match t {
                    Class::WhiteInternal | Class::WhiteRoot => arrow_slots(t),
                    _ => 0,
                },
                Class::WhiteInternal => match t {
                    Class::BlackInternal | Class::BlackRoot => edge_slots(t),
                    _ => 0,
                },
                Class::WhiteRoot => match t {
                    Class::BlackInternal | Class::BlackRoot => arrow_slots(t),
                    _ => 0,
                },
            };
            let diag = if row == col { BigInt::from(ns) } else { BigInt::zero() };
            mat[row][col] = diag - BigInt::from(slots);
        }
    }
    let det = determinant(&mat);
    let denom: BigInt = present.iter().map(|&(_, n)| BigInt::from(n)).product();
    BigRational::new(det, denom)
}

fn determinant(mat: &[Vec<BigInt>]) -> BigInt {
    match mat.len() {
        0 => BigInt::one(),
        1 => mat[0][0].clone(),
        n => {
            let mut det = BigInt::zero();
            for col in 0..n {
                if mat[0][col].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<BigInt>> = (1..n)
                    .map(|r| {
                        (0..n)
                            .filter(|&c| c != col)
                            .map(|c| mat[r][c].clone())
                            .collect()
                    })
                    .collect();
                let term = &mat[0][col] * determinant(&minor);
                if col % 2 == 0 {
                    det += term;
                } else {
                    det -= term;
                }
            }
            det
        }
    }
}

struct ArrayStats {
    p: u64,
    p_prime: u64,
    q: u64,
    q_prime: u64,
    r: u64,
    n: u64,
    thorns: i64,
}

fn stats(a: &DegreeArray) -> ArrayStats {
    let p = a.white_count();
    let p_prime = a.white_root_count();
    let q = a.black_count();
    let q_prime = a.black_root_count();
    let r = a.loop_pairs();
    let n = a.n();
    let thorns = n as i64 + 1 - p as i64 - q as i64 - 2 * r as i64;
    ArrayStats {
        p,
        p_prime,
        q,
        q_prime,
        r,
        n,
        thorns,
    }
}

fn sum_weighted(m: &TriMap, f: impl Fn(i64, i64, i64) -> i64) -> i64 {
    m.iter()
        .map(|(&(i, j, k), &c)| f(i as i64, j as i64, k as i64) * c as i64)
        .sum()
}

fn prod_over<F: Fn(u32, u32, u32) -> BigUint>(m: &TriMap, f: F) -> BigUint {
    let mut acc = BigUint::one();
    for (&(i, j, k), &c) in m {
        let base = f(i, j, k);
        if base.is_zero() {
            return BigUint::zero();
        }
        acc *= base.pow(c as u32);
    }
    acc
}

fn multiplicity_factorial(a: &DegreeArray) -> BigUint {
    let mut acc = BigUint::one();
    for m in [&a.white, &a.white_roots, &a.black, &a.black_roots] {
        for &c in m.values() {
            acc *= factorial(c);
        }
    }
    acc
}

/// Exact number of permuted forests with degree array `a`, evaluated in
/// closed form (no enumeration). Returns zero for unrealizable arrays.
pub fn closed_form_summand(a: &DegreeArray) -> Scalar {
    let st = stats(a);
    if !a.is_consistent() {
        return Scalar::zero();
    }
    if st.p == 0 || st.thorns < 0 || st.r < st.p_prime || st.r < st.q_prime {
        return Scalar::zero();
    }
    let thorns = st.thorns as u64;

    // loop-target assignments with prescribed per-vertex counts
    let mut greek = scalar_from_biguint(&factorial(st.r - st.p_prime))
        * scalar_from_biguint(&factorial(st.r - st.q_prime));
    for m in [&a.black, &a.black_roots, &a.white, &a.white_roots] {
        for (&(_, _, k), &c) in m.iter() {
            greek /= scalar_from_biguint(&factorial(k as u64).pow(c as u32));
        }
    }

    // arrow-target assignments: the tree multinomials contribute
    // (p-1)! p'! q! q'! over the per-vertex arrow counts
    let mut arrow_pre = scalar_from_biguint(
        &(factorial(st.p - 1) * factorial(st.p_prime) * factorial(st.q) * factorial(st.q_prime)),
    );
    for m in [&a.white, &a.white_roots, &a.black, &a.black_roots] {
        for (&(_, j, _), &c) in m.iter() {
            arrow_pre /= scalar_from_biguint(&factorial(j as u64).pow(c as u32));
        }
    }

    // per-class totals that do not depend on the seed choice
    let free_root = |m: &TriMap| sum_weighted(m, |i, j, k| i - 2 * (j + k));
    let free_internal = |m: &TriMap| sum_weighted(m, |i, j, k| i - 1 - 2 * (j + k));
    let arrows_of = |m: &TriMap| sum_weighted(m, |_, j, _| j) as u64;
    let phi_wr = free_root(&a.white_roots);
    let phi_bi = free_internal(&a.black);
    let phi_br = free_root(&a.black_roots);
    let j_wr = arrows_of(&a.white_roots);
    let j_bi = arrows_of(&a.black);
    let j_br = arrows_of(&a.black_roots);
    let j_p_total = arrows_of(&a.white);

    let shapes_wr = prod_over(&a.white_roots, |i, j, k| shape_root(i, j + k));
    let shapes_bi = prod_over(&a.black, |i, j, k| {
        if i >= 1 {
            shape_unconstrained(i - 1, j + k)
        } else {
            BigUint::zero()
        }
    });
    let shapes_br = prod_over(&a.black_roots, |i, j, k| shape_root(i, j + k));
    if (shapes_wr.is_zero() && !a.white_roots.is_empty())
        || (shapes_bi.is_zero() && !a.black.is_empty())
        || (shapes_br.is_zero() && !a.black_roots.is_empty())
    {
        return Scalar::zero();
    }

    let mut total = Scalar::zero();
    for (&(t, u, v), &count) in &a.white {
        // this triple supplies the seed; its remaining copies are internal
        let loops_seed = u + v;
        if t < 2 * loops_seed {
            continue;
        }
        let seed_shape = shape_unconstrained(t, loops_seed);
        let mut internal_shapes = BigUint::one();
        let mut phi_wi: i64 = 0;
        let mut ok = true;
        for (&(i, j, k), &c) in &a.white {
            let m = if (i, j, k) == (t, u, v) { c - 1 } else { c };
            if m == 0 {
                continue;
            }
            if i < 1 + 2 * (j + k) {
                ok = false;
                break;
            }
            internal_shapes *= shape_unconstrained(i - 1, j + k).pow(m as u32);
            phi_wi += (i as i64 - 1 - 2 * (j + k) as i64) * m as i64;
        }
        if !ok {
            continue;
        }
        let phi_seed = (t - 2 * loops_seed) as u64;
        // arrows into internal whites: total over the white array minus the
        // seed instance's own share
        let j_wi = j_p_total - u as u64;

        let shapes = scalar_from_biguint(
            &(BigUint::from(count)
                * seed_shape
                * internal_shapes
                * shapes_wr.clone()
                * shapes_bi.clone()
                * shapes_br.clone()),
        );
        if shapes.is_zero() {
            continue;
        }

        // distribute the black-child edge slots over the white classes and
        // the white-child edge slots over the black classes
        let mut inner = Scalar::zero();
        for e_seed in 0..=st.q.min(phi_seed) {
            for e_wi in 0..=(st.q - e_seed).min(phi_wi.max(0) as u64) {
                let e_wr = st.q - e_seed - e_wi;
                let c_white = binom(phi_seed, e_seed)
                    * binom(phi_wi.max(0) as u64, e_wi)
                    * binom(phi_wr.max(0) as u64, e_wr);
                if c_white.is_zero() {
                    continue;
                }
                for e_bi in 0..=(st.p - 1).min(phi_bi.max(0) as u64) {
                    let e_br = st.p - 1 - e_bi;
                    let c_black =
                        binom(phi_bi.max(0) as u64, e_bi) * binom(phi_br.max(0) as u64, e_br);
                    if c_black.is_zero() {
                        continue;
                    }
                    let ratio = attachment_ratio(
                        &[
                            (Class::WhiteInternal, st.p - 1),
                            (Class::WhiteRoot, st.p_prime),
                            (Class::BlackInternal, st.q),
                            (Class::BlackRoot, st.q_prime),
                        ],
                        |class| match class {
                            Class::WhiteInternal => e_wi,
                            Class::WhiteRoot => e_wr,
                            Class::BlackInternal => e_bi,
                            Class::BlackRoot => e_br,
                        },
                        |class| match class {
                            Class::WhiteInternal => j_wi,
                            Class::WhiteRoot => j_wr,
                            Class::BlackInternal => j_bi,
                            Class::BlackRoot => j_br,
                        },
                    );
                    if !ratio.is_zero() {
                        inner += scalar_from_biguint(&(c_white.clone() * c_black)) * ratio;
                    }
                }
            }
        }
        total += shapes * inner;
    }

    let labeled = total
        * arrow_pre
        * greek
        * scalar_from_biguint(&factorial(thorns));
    labeled / scalar_from_biguint(&multiplicity_factorial(a))
}

/// Every admissible degree array for the given pair of half-types.
pub fn enumerate_m(lambda: &Partition, mu: &Partition) -> Vec<DegreeArray> {
    assert_eq!(lambda.n(), mu.n());
    let n = lambda.n() as u64;
    let white_cfgs = side_configs(lambda, true);
    let black_cfgs = side_configs(mu, false);
    let mut out = Vec::new();
    for w in &white_cfgs {
        if w.plain_count == 0 {
            continue;
        }
        for b in &black_cfgs {
            if w.r != b.r {
                continue;
            }
            if w.sum_j != b.root_count || b.sum_j != w.root_count {
                continue;
            }
            let thorns =
                n as i64 + 1 - w.plain_count as i64 - b.plain_count as i64 - 2 * w.r as i64;
            if thorns < 0 {
                continue;
            }
            if w.has_equality_entry && b.root_count == 0 {
                continue;
            }
            out.push(DegreeArray {
                white: w.plain.clone(),
                white_roots: w.roots.clone(),
                black: b.plain.clone(),
                black_roots: b.roots.clone(),
            });
        }
    }
    out.sort();
    out.dedup();
    out
}

#[derive(Debug, Clone)]
struct SideConfig {
    plain: TriMap,
    roots: TriMap,
    plain_count: u64,
    root_count: u64,
    sum_j: u64,
    r: u64,
    has_equality_entry: bool,
}

/// Distribute the parts of a half-type over plain/root classes and loop
/// statistics. `white` enables the seed-only entries with all slots taken by
/// loops (`2(j+k) = i`), at most one and with multiplicity one.
fn side_configs(shape: &Partition, white: bool) -> Vec<SideConfig> {
    #[derive(Clone, Copy)]
    struct Opt {
        root: bool,
        j: u32,
        k: u32,
        equality: bool,
    }
    let mut configs = Vec::new();
    let mults: Vec<(u32, u32)> = shape.multiplicities().into_iter().collect();

    fn options_for(i: u32, white: bool) -> Vec<Opt> {
        let mut opts = Vec::new();
        for j in 0..=i / 2 {
            for k in 0..=(i / 2 - j) {
                let l = j + k;
                if 2 * l + 1 <= i {
                    opts.push(Opt {
                        root: false,
                        j,
                        k,
                        equality: false,
                    });
                } else if white && 2 * l == i {
                    opts.push(Opt {
                        root: false,
                        j,
                        k,
                        equality: true,
                    });
                }
                if l >= 1 && 2 * l <= i {
                    opts.push(Opt {
                        root: true,
                        j,
                        k,
                        equality: false,
                    });
                }
            }
        }
        opts
    }

    fn rec(
        mults: &[(u32, u32)],
        white: bool,
        cur: &mut SideConfig,
        out: &mut Vec<SideConfig>,
    ) {
        match mults.split_first() {
            None => out.push(cur.clone()),
            Some((&(i, m), rest)) => {
                let opts = options_for(i, white);
                distribute(&opts, i, m, 0, mults, rest, white, cur, out);
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn distribute(
        opts: &[Opt],
        i: u32,
        remaining: u32,
        idx: usize,
        _mults: &[(u32, u32)],
        rest: &[(u32, u32)],
        white: bool,
        cur: &mut SideConfig,
        out: &mut Vec<SideConfig>,
    ) {
        if remaining == 0 {
            rec(rest, white, cur, out);
            return;
        }
        if idx == opts.len() {
            return;
        }
        let max_take = if opts[idx].equality { 1 } else { remaining };
        for take in 0..=max_take.min(remaining) {
            if take > 0 {
                if opts[idx].equality && cur.has_equality_entry {
                    break;
                }
                let o = opts[idx];
                let key = (i, o.j, o.k);
                if o.root {
                    *cur.roots.entry(key).or_insert(0) += take as u64;
                    cur.root_count += take as u64;
                } else {
                    *cur.plain.entry(key).or_insert(0) += take as u64;
                    cur.plain_count += take as u64;
                }
                cur.sum_j += (o.j as u64) * take as u64;
                cur.r += ((o.j + o.k) as u64) * take as u64;
                if o.equality {
                    cur.has_equality_entry = true;
                }
            }
            distribute(opts, i, remaining - take, idx + 1, _mults, rest, white, cur, out);
            if take > 0 {
                let o = opts[idx];
                let key = (i, o.j, o.k);
                if o.root {
                    let e = cur.roots.get_mut(&key).unwrap();
                    *e -= take as u64;
                    if *e == 0 {
                        cur.roots.remove(&key);
                    }
                    cur.root_count -= take as u64;
                } else {
                    let e = cur.plain.get_mut(&key).unwrap();
                    *e -= take as u64;
                    if *e == 0 {
                        cur.plain.remove(&key);
                    }
                    cur.plain_count -= take as u64;
                }
                cur.sum_j -= (o.j as u64) * take as u64;
                cur.r -= ((o.j + o.k) as u64) * take as u64;
                if o.equality {
                    cur.has_equality_entry = false;
                }
            }
        }
    }

    let mut cur = SideConfig {
        plain: TriMap::new(),
        roots: TriMap::new(),
        plain_count: 0,
        root_count: 0,
        sum_j: 0,
        r: 0,
        has_equality_entry: false,
    };
    rec(&mults, white, &mut cur, &mut configs);
    configs
}

/// The literal per-array weight: `N(A)` of the published expression with the
/// obvious index fix (`t - 2u - 2v` in place of the undefined `t - 2b -
/// 2v`). `None` when an all-loop seed entry routes the evaluation to the
/// special-case replacement.
pub fn n_factor(a: &DegreeArray) -> Option<Scalar> {
    let st = stats(a);
    let q_prime = st.q_prime;
    if q_prime == 0 {
        let total = sum_weighted(&a.white, |i, _, _| i);
        return Some(scalar_from_u64(total as u64));
    }
    // any entry with t = 2u + 2v divides by zero: handled by the caller
    if a.white.keys().any(|&(i, j, k)| i == 2 * (j + k)) {
        return None;
    }
    let (c1, c2) = bracket_terms(a, &st)?;
    let mut total = Scalar::zero();
    for (&(t, u, v), &c) in &a.white {
        let weight = scalar_from_u64(t as u64 * c);
        let denom = scalar_from_u64((t - 2 * u - 2 * v) as u64);
        total += &weight * &c1 + weight * scalar_from_u64(u as u64) * &c2 / denom;
    }
    Some(total / scalar_from_u64(q_prime))
}

// The two bracketed combinations shared by the generic weight and the
// special cases. `None` when the `n - q - 2r` denominator vanishes.
fn bracket_terms(a: &DegreeArray, st: &ArrayStats) -> Option<(Scalar, Scalar)> {
    let nq2r = st.n as i64 - st.q as i64 - 2 * st.r as i64;
    if nq2r == 0 {
        return None;
    }
    let nq2r = scalar_from_u64(nq2r as u64);
    let sum_j_q = sum_weighted(&a.black, |_, j, _| j);
    let sum_j_qp = sum_weighted(&a.black_roots, |_, j, _| j);
    let sum_j_p = sum_weighted(&a.white, |_, j, _| j);
    let sum_j_pp = sum_weighted(&a.white_roots, |_, j, _| j);
    let sum_free_q = sum_weighted(&a.black, |i, j, k| i - 1 - 2 * j - 2 * k);
    let sum_free2_pp = sum_weighted(&a.white_roots, |i, j, k| i - 2 * j - 2 * k);
    let sum_free2_qp = sum_weighted(&a.black_roots, |i, j, k| i - 2 * j - 2 * k);
    let sum_free_p = sum_weighted(&a.white, |i, j, k| i - 1 - 2 * j - 2 * k);

    let int = |x: i64| BigRational::from_integer(BigInt::from(x));

    let mut c1 = int(sum_free_q) * int(sum_j_p) / nq2r.clone();
    let mut c2 = int(sum_free2_qp) * (Scalar::one() + int(sum_free_p)) / nq2r;
    if st.p_prime > 0 {
        let pp = scalar_from_u64(st.p_prime);
        c1 += int(sum_j_q) * int(sum_j_pp) / pp.clone();
        c2 += int(sum_free2_pp) * int(sum_j_qp) / pp;
    }
    Some((c1, c2))
}

/// Literal transcription of the published per-array weight, special cases
/// included. `None` when the expression is not evaluable on this array
/// (negative factorial arguments outside the covered special cases).
pub fn printed_summand(a: &DegreeArray) -> Option<Scalar> {
    let st = stats(a);
    let nq2r = st.n as i64 - st.q as i64 - 2 * st.r as i64;
    let np2r = st.n as i64 - st.p as i64 - 2 * st.r as i64;
    if st.thorns < 0 || st.r < st.p_prime || st.r < st.q_prime {
        return Some(Scalar::zero());
    }
    let a_fact = scalar_from_biguint(&multiplicity_factorial(a));
    let mid = scalar_from_biguint(
        &(factorial(st.p_prime)
            * factorial(st.q_prime)
            * factorial(st.r - st.p_prime)
            * factorial(st.r - st.q_prime)),
    ) / scalar_from_biguint(
        &BigUint::from(2u32).pow((2 * st.r - st.p_prime - st.q_prime) as u32),
    );

    let binomials = |skip: Option<(u32, u32, u32)>| -> BigUint {
        let mut acc = BigUint::one();
        for (&(i, j, k), &c) in &a.white {
            if Some((i, j, k)) == skip {
                if c > 1 {
                    acc *= bounded_multinomial(i - 1, j, k, j + k).pow(c as u32 - 1);
                }
                continue;
            }
            acc *= bounded_multinomial(i - 1, j, k, j + k).pow(c as u32);
        }
        for (&(i, j, k), &c) in &a.black {
            acc *= bounded_multinomial(i - 1, j, k, j + k).pow(c as u32);
        }
        for m in [&a.white_roots, &a.black_roots] {
            for (&(i, j, k), &c) in m {
                if j + k == 0 {
                    return BigUint::zero();
                }
                acc *= bounded_multinomial(i - 1, j, k, j + k - 1).pow(c as u32);
            }
        }
        acc
    };

    if st.q_prime != 0 && nq2r == 0 {
        // second special case: the seed is the only non-root white and there
        // are no thorns
        if st.p != 1 || a.white.len() != 1 {
            return None;
        }
        let (&(t, u, v), _) = a.white.iter().next().unwrap();
        let n2r = st.n as i64 - 2 * st.r as i64;
        let sum_j_q = sum_weighted(&a.black, |_, j, _| j);
        let sum_j_qp = sum_weighted(&a.black_roots, |_, j, _| j);
        let int = |x: i64| BigRational::from_integer(BigInt::from(x));
        let mut bracket = Scalar::zero();
        if n2r != 0 && st.p_prime != 0 {
            bracket += int((t as i64 - 2 * u as i64 - 2 * v as i64) * sum_j_q)
                / (int(n2r) * scalar_from_u64(st.p_prime));
        }
        if st.p_prime != 0 {
            bracket += scalar_from_u64(u as u64) * int(sum_j_qp)
                / (scalar_from_u64(st.p_prime) * scalar_from_u64(st.q_prime));
        }
        if st.p_prime == 0 {
            bracket += Scalar::one();
        }
        if n2r < 0 {
            return None;
        }
        let front = scalar_from_biguint(&factorial(n2r as u64));
        let mut blacks_only = BigUint::one();
        for (&(i, j, k), &c) in &a.black {
            blacks_only *= bounded_multinomial(i - 1, j, k, j + k).pow(c as u32);
        }
        for m in [&a.white_roots, &a.black_roots] {
            for (&(i, j, k), &c) in m {
                if j + k == 0 {
                    return Some(Scalar::zero());
                }
                blacks_only *= bounded_multinomial(i - 1, j, k, j + k - 1).pow(c as u32);
            }
        }
        return Some(
            bracket / a_fact
                * front
                * mid
                * scalar_from_biguint(&bounded_multinomial(t, u, v, u + v))
                * scalar_from_biguint(&blacks_only),
        );
    }

    if nq2r < 0 || np2r < 0 {
        return None;
    }
    let global = scalar_from_biguint(&(factorial(nq2r as u64) * factorial(np2r as u64)))
        / scalar_from_biguint(&factorial(st.thorns as u64));

    let equality_entry = a
        .white
        .iter()
        .find(|(&(i, j, k), _)| i == 2 * (j + k))
        .map(|(&e, _)| e);

    if st.q_prime != 0 {
        if let Some((i0, j0, k0)) = equality_entry {
            // first special case: replace N(A) and the vanishing binomial
            let (_, c2) = bracket_terms(a, &st)?;
            let replaced = scalar_from_u64(j0 as u64) / scalar_from_u64(st.q_prime)
                * scalar_from_biguint(&bounded_multinomial(i0, j0, k0, j0 + k0))
                * c2;
            return Some(
                replaced / a_fact * global * mid * scalar_from_biguint(&binomials(Some((i0, j0, k0)))),
            );
        }
    }
    let n_a = n_factor(a)?;
    Some(n_a / a_fact * global * mid * scalar_from_biguint(&binomials(None)))
}

/// Where the literal weight deviates from the corrected forest count.
#[derive(Debug)]
pub struct PrintedDiscrepancy {
    pub lambda: Partition,
    pub mu: Partition,
    pub array: DegreeArray,
    pub printed: Option<Scalar>,
    pub corrected: Scalar,
}

/// Compare the literal and corrected weights on every admissible array of
/// degree `n`.
pub fn audit_printed_formula(n: u32) -> Vec<PrintedDiscrepancy> {
    let mut out = Vec::new();
    for lambda in enumerate_partitions(n) {
        for mu in enumerate_partitions(n) {
            for array in enumerate_m(&lambda, &mu) {
                let corrected = closed_form_summand(&array);
                let printed = printed_summand(&array);
                if printed.as_ref() != Some(&corrected) {
                    out.push(PrintedDiscrepancy {
                        lambda: lambda.clone(),
                        mu: mu.clone(),
                        array,
                        printed,
                        corrected,
                    });
                }
            }
        }
    }
    out
}

/// Monomial-basis coefficient at `(lambda, mu)`: the automorphism scaling
/// times the sum of the per-array forest counts.
pub fn rhs_cell(lambda: &Partition, mu: &Partition) -> Result<Scalar, FormulaError> {
    let mut total = Scalar::zero();
    for array in enumerate_m(lambda, mu) {
        total += closed_form_summand(&array);
    }
    let scaled = total
        * scalar_from_biguint(&lambda.automorphism_factor())
        * scalar_from_biguint(&mu.automorphism_factor());
    if !crate::series::scalar_is_count(&scaled) {
        return Err(FormulaError::NonIntegralTotal {
            lambda: lambda.clone(),
            mu: mu.clone(),
            value: scaled.to_string(),
        });
    }
    Ok(scaled)
}

/// The full closed-form series in the monomial basis.
pub fn rhs_series(n: u32, exec: Exec) -> Result<SymSeries, FormulaError> {
    let shapes = enumerate_partitions(n);
    let mut cells = Vec::new();
    for lambda in &shapes {
        for mu in &shapes {
            cells.push((lambda.clone(), mu.clone()));
        }
    }
    let results = map_reduce(
        cells,
        exec,
        Vec::new,
        |(lambda, mu)| {
            let value = rhs_cell(&lambda, &mu);
            vec![(lambda, mu, value)]
        },
        |mut a, mut b| {
            a.append(&mut b);
            a
        },
    );
    let mut out = SymSeries::new(n, Basis::MonomialMonomial);
    for (lambda, mu, value) in results {
        out.set(lambda, mu, value?);
    }
    Ok(out)
}

/// Monomial-basis series of the orientable specialization:
/// `n (n-len(lambda))! (n-len(mu))! / (n+1-len(lambda)-len(mu))!`.
pub fn orientable_series(n: u32) -> SymSeries {
    let mut out = SymSeries::new(n, Basis::MonomialMonomial);
    for lambda in enumerate_partitions(n) {
        for mu in enumerate_partitions(n) {
            let denom = n as i64 + 1 - lambda.len() as i64 - mu.len() as i64;
            if denom < 0 {
                continue;
            }
            let value = scalar_from_u64(n as u64)
                * scalar_from_biguint(&factorial((n as usize - lambda.len()) as u64))
                * scalar_from_biguint(&factorial((n as usize - mu.len()) as u64))
                / scalar_from_biguint(&factorial(denom as u64));
            out.set(lambda.clone(), mu.clone(), value);
        }
    }
    out
}

/// Number of ordered factorizations of the long cycle of the plain
/// symmetric group into two permutations of prescribed cycle types.
pub fn brute_force_c(n: u32, exec: Exec) -> BTreeMap<(Partition, Partition), u64> {
    let m = n as usize;
    scan_sym(
        m,
        exec,
        BTreeMap::new,
        |acc, img| {
            // w2 = w1^{-1} . sigma where sigma is the long cycle x -> x+1
            let mut inv = vec![0u32; m];
            for (x, &y) in img.iter().enumerate() {
                inv[y as usize] = x as u32;
            }
            let w2: Vec<u32> = (0..m).map(|x| inv[(x + 1) % m]).collect();
            let key = (sym_cycle_type(img), sym_cycle_type(&w2));
            *acc.entry(key).or_insert(0) += 1;
        },
        crate::hypermaps::merge_counts,
    )
}
