//! The four-array degree statistic attached to a partitioned hypermap and,
//! through the bijection, to a permuted forest.
//!
//! Entry `(i, j, k) -> c` in one of the arrays says: `c` vertices (blocks) of
//! half-size `i` with `j` incoming arrows and `j + k` loops. The four arrays
//! split by color and by root-ness:
//!
//! * `white`       - white non-root vertices, including the seed root
//! * `white_roots` - white roots of non-seed trees
//! * `black`       - black non-root vertices
//! * `black_roots` - black roots of non-seed trees

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::partitions::Partition;

pub type TriMap = BTreeMap<(u32, u32, u32), u64>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct DegreeArray {
    pub white: TriMap,
    pub white_roots: TriMap,
    pub black: TriMap,
    pub black_roots: TriMap,
}

fn entry_count(m: &TriMap) -> u64 {
    m.values().sum()
}

fn weighted<F: Fn(u32, u32, u32) -> u64>(m: &TriMap, f: F) -> u64 {
    m.iter().map(|(&(i, j, k), &c)| f(i, j, k) * c).sum()
}

impl DegreeArray {
    pub fn from_entries(
        white: &[(u32, u32, u32)],
        white_roots: &[(u32, u32, u32)],
        black: &[(u32, u32, u32)],
        black_roots: &[(u32, u32, u32)],
    ) -> Self {
        fn build(entries: &[(u32, u32, u32)]) -> TriMap {
            let mut m = TriMap::new();
            for &e in entries {
                *m.entry(e).or_insert(0) += 1;
            }
            m
        }
        DegreeArray {
            white: build(white),
            white_roots: build(white_roots),
            black: build(black),
            black_roots: build(black_roots),
        }
    }

    /// `p`: number of white non-root vertices (never zero for a realizable
    /// array since the seed root is one of them).
    pub fn white_count(&self) -> u64 {
        entry_count(&self.white)
    }

    /// `p'`: number of white roots.
    pub fn white_root_count(&self) -> u64 {
        entry_count(&self.white_roots)
    }

    /// `q`: number of black non-root vertices.
    pub fn black_count(&self) -> u64 {
        entry_count(&self.black)
    }

    /// `q'`: number of black roots.
    pub fn black_root_count(&self) -> u64 {
        entry_count(&self.black_roots)
    }

    /// `r`: loops per color.
    pub fn loop_pairs(&self) -> u64 {
        weighted(&self.white, |_, j, k| (j + k) as u64)
            + weighted(&self.white_roots, |_, j, k| (j + k) as u64)
    }

    /// Total half-size of the white side; equals the edge count `n`.
    pub fn n(&self) -> u64 {
        weighted(&self.white, |i, _, _| i as u64)
            + weighted(&self.white_roots, |i, _, _| i as u64)
    }

    /// Half-type of the white side, the partition of `n` this array sits
    /// under on the white axis.
    pub fn white_half_type(&self) -> Partition {
        let mut parts = Vec::new();
        for (m, _) in [(&self.white, 0), (&self.white_roots, 1)] {
            for (&(i, _, _), &c) in m {
                for _ in 0..c {
                    parts.push(i);
                }
            }
        }
        Partition::from_unsorted(parts).expect("positive half sizes")
    }

    pub fn black_half_type(&self) -> Partition {
        let mut parts = Vec::new();
        for m in [&self.black, &self.black_roots] {
            for (&(i, _, _), &c) in m {
                for _ in 0..c {
                    parts.push(i);
                }
            }
        }
        Partition::from_unsorted(parts).expect("positive half sizes")
    }

    /// The linear constraints every realizable array satisfies: the two loop
    /// counts agree, incoming-arrow sums match the opposite side's root
    /// counts, and there is a seed candidate.
    pub fn is_consistent(&self) -> bool {
        let r_white = self.loop_pairs();
        let r_black = weighted(&self.black, |_, j, k| (j + k) as u64)
            + weighted(&self.black_roots, |_, j, k| (j + k) as u64);
        let arrows_into_white =
            weighted(&self.white, |_, j, _| j as u64) + weighted(&self.white_roots, |_, j, _| j as u64);
        let arrows_into_black =
            weighted(&self.black, |_, j, _| j as u64) + weighted(&self.black_roots, |_, j, _| j as u64);
        self.white_count() >= 1
            && r_white == r_black
            && arrows_into_white == self.black_root_count()
            && arrows_into_black == self.white_root_count()
            && self.n() == weighted(&self.black, |i, _, _| i as u64)
                + weighted(&self.black_roots, |i, _, _| i as u64)
    }
}

fn fmt_tri(f: &mut fmt::Formatter<'_>, m: &TriMap) -> fmt::Result {
    if m.is_empty() {
        return write!(f, "0");
    }
    let mut first = true;
    for (&(i, j, k), &c) in m.iter().rev() {
        if !first {
            write!(f, " + ")?;
        }
        first = false;
        if c != 1 {
            write!(f, "{c}*")?;
        }
        write!(f, "E({i},{j},{k})")?;
    }
    Ok(())
}

impl fmt::Display for DegreeArray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P = ")?;
        fmt_tri(f, &self.white)?;
        write!(f, "; P' = ")?;
        fmt_tri(f, &self.white_roots)?;
        write!(f, "; Q = ")?;
        fmt_tri(f, &self.black)?;
        write!(f, "; Q' = ")?;
        fmt_tri(f, &self.black_roots)
    }
}
